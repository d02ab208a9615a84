//! Built-in chains with closed-form reference values.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{depolarizing_kappa, Convention, KrausFamily, SuperOperator};
use crate::linalg::{self, pauli, ComplexMatrix, C64};
use crate::mps::{Caps, LocalObservable, MpsChain};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingParams {
    p: f64,
}

impl DepolarizingParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterOutOfRange { name: "p", value: p });
        }
        Ok(DepolarizingParams { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Which closed form, if any, describes the thermodynamic limit of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Ghz,
    Depolarizing { p: f64 },
}

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub name: &'static str,
    pub chain: MpsChain,
    pub closed_form: Option<ClosedForm>,
    /// Named reference numbers, e.g. `normalization_2` or `phi_limit_e00`.
    pub reference_values: BTreeMap<&'static str, f64>,
    pub notes: Vec<String>,
}

impl ModelBundle {
    /// Closed-form thermodynamic limit of `x`, when the model has one.
    pub fn closed_form(&self, x: &LocalObservable, caps: &Caps) -> Option<Result<C64>> {
        self.closed_form.map(|form| match form {
            ClosedForm::Ghz => ghz_closed_form(x, caps),
            ClosedForm::Depolarizing { p } => depolarizing_closed_form(x, p, caps),
        })
    }
}

fn ghz_family() -> KrausFamily {
    KrausFamily::new(
        vec![linalg::diag(&[1.0, 0.0]), linalg::diag(&[0.0, 1.0])],
        Convention::Heisenberg,
    )
    .expect("GHZ projectors form a valid family")
}

/// `d = D = 2`, `A_0 = diag(1, 0)`, `A_1 = diag(0, 1)`.
pub fn ghz_model() -> ModelBundle {
    let chain = MpsChain::translation_invariant(ghz_family()).expect("valid GHZ chain");
    let reference_values = BTreeMap::from([
        ("normalization", 2.0),
        ("transfer_trace", 2.0),
        ("phi_e00", 0.5),
    ]);
    ModelBundle {
        name: "ghz",
        chain,
        closed_form: Some(ClosedForm::Ghz),
        reference_values,
        notes: vec![
            "site tensors are the diagonal projectors diag(1,0) and diag(0,1)".into(),
            "amplitudes are 1 on the two constant configurations; the state is left unnormalized".into(),
        ],
    }
}

/// Kraus operators `sqrt(1-p) I, sqrt(p/3) sigma_x, sqrt(p/3) sigma_y, sqrt(p/3) sigma_z`.
pub fn depolarizing_operators(p: f64) -> Vec<ComplexMatrix> {
    let a = (p / 3.0).sqrt();
    vec![
        linalg::identity(2).scale((1.0 - p).sqrt()),
        pauli::x().scale(a),
        pauli::y().scale(a),
        pauli::z().scale(a),
    ]
}

/// The depolarizing channel `rho -> sum_i K_i rho K_i^†`.
pub fn depolarizing_channel(params: DepolarizingParams) -> SuperOperator {
    SuperOperator::from_kraus(
        &KrausFamily::new(depolarizing_operators(params.p), Convention::Schrodinger)
            .expect("Pauli Kraus family is valid"),
    )
}

/// `d = 4`, `D = 2` chain whose site tensors are the depolarizing Kraus
/// operators; physical index 0 carries `sqrt(1-p) I`.
pub fn depolarizing_model(params: DepolarizingParams) -> ModelBundle {
    let p = params.p;
    let family = KrausFamily::new(depolarizing_operators(p), Convention::Heisenberg)
        .expect("Pauli Kraus family is valid");
    let chain = MpsChain::translation_invariant(family).expect("valid depolarizing chain");
    let q = (1.0 - p).powi(2) + p * p / 3.0;
    let kappa = depolarizing_kappa(p).expect("p already validated");
    let mut reference_values = BTreeMap::from([
        ("kappa_scalar", kappa),
        ("kappa_trace", 2.0 * kappa),
        ("normalization_2", 4.0 * q),
        ("phi1_e00", (1.0 - p).powi(2) / q),
        ("phi_limit_e00", 1.0 - p),
        ("bloch_contraction", 1.0 - 4.0 * p / 3.0),
    ]);
    if 2.0 * kappa > 0.0 && 2.0 * kappa < 1.0 {
        reference_values.insert("theta", -(1.0 - 2.0 * kappa).ln());
    }
    ModelBundle {
        name: "depolarizing",
        chain,
        closed_form: Some(ClosedForm::Depolarizing { p }),
        reference_values,
        notes: vec![
            "physical index 0 binds to sqrt(1-p) I, indices 1..3 to the scaled Paulis".into(),
            "the invariant state of the transfer channel is I/2 for every p > 0".into(),
        ],
    }
}

/// Whether a random chain repeats one family or stores `n` independent ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    TranslationInvariant,
    Sites(usize),
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// A family with `sum_i A_i A_i^† = I`: the rows of a random `D x dD`
/// Gaussian matrix are orthonormalized and the columns cut into `d` blocks.
fn gauge_family(d: usize, bond: usize, rng: &mut ChaCha8Rng) -> KrausFamily {
    let q = ginibre(d * bond, bond, rng).qr().q();
    let w = q.adjoint();
    let ops = (0..d)
        .map(|i| w.columns(i * bond, bond).into_owned())
        .collect();
    KrausFamily::new(ops, Convention::Heisenberg).expect("blocks share one shape")
}

pub fn random_gauge_chain(d: usize, bond: usize, layout: Layout, seed: u64) -> Result<MpsChain> {
    if d == 0 {
        return Err(Error::ParameterOutOfRange { name: "d", value: 0.0 });
    }
    if bond == 0 {
        return Err(Error::ParameterOutOfRange { name: "D", value: 0.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match layout {
        Layout::TranslationInvariant => MpsChain::translation_invariant(gauge_family(d, bond, &mut rng)),
        Layout::Sites(0) => Err(Error::ParameterOutOfRange { name: "sites", value: 0.0 }),
        Layout::Sites(n) => MpsChain::per_site((0..n).map(|_| gauge_family(d, bond, &mut rng)).collect()),
    }
}

/// Translation-invariant chain of `d` mutually orthogonal projectors summing
/// to `I_D`, in a random basis. Such chains satisfy the consistency identity.
pub fn random_projector_chain(d: usize, bond: usize, seed: u64) -> Result<MpsChain> {
    if d == 0 || d > bond {
        return Err(Error::ParameterOutOfRange {
            name: "d",
            value: d as f64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = ginibre(bond, bond, &mut rng).qr().q();
    let mut basis: Vec<usize> = (0..bond).collect();
    basis.shuffle(&mut rng);
    let mut part = vec![0usize; bond];
    for (slot, &b) in basis.iter().enumerate() {
        part[b] = if slot < d { slot } else { rng.random_range(0..d) };
    }
    let ops = (0..d)
        .map(|i| {
            let mask: Vec<f64> = part.iter().map(|&p| if p == i { 1.0 } else { 0.0 }).collect();
            &u * linalg::diag(&mask) * u.adjoint()
        })
        .collect();
    MpsChain::translation_invariant(KrausFamily::new(ops, Convention::Heisenberg)?)
}

fn check_closed_form_input(x: &LocalObservable, d: usize, caps: &Caps) -> Result<()> {
    x.check_dim(d)?;
    let entries = x.matrix().nrows().saturating_mul(x.matrix().nrows());
    if entries > caps.observable_entries {
        return Err(Error::CapExceeded {
            what: "observable entries",
            required: entries,
            cap: caps.observable_entries,
        });
    }
    Ok(())
}

/// `phi(X) = 1/2 sum_l <l...l|X|l...l>`, the average of the two constant
/// configurations.
pub fn ghz_closed_form(x: &LocalObservable, caps: &Caps) -> Result<C64> {
    check_closed_form_input(x, 2, caps)?;
    let all_ones = x.matrix().nrows() - 1;
    Ok((x.matrix()[(0, 0)] + x.matrix()[(all_ones, all_ones)]) * 0.5)
}

/// `phi(X) = 1/2 sum_{i,j} <i|X|j> Tr(A_{i_N}^† ... A_{i_1}^† A_{j_1} ... A_{j_N})`
/// with the depolarizing Kraus operators as site tensors.
pub fn depolarizing_closed_form(x: &LocalObservable, p: f64, caps: &Caps) -> Result<C64> {
    DepolarizingParams::new(p)?;
    check_closed_form_input(x, 4, caps)?;
    let ops = depolarizing_operators(p);
    let mut products = vec![linalg::identity(2)];
    for _ in 0..x.width() {
        products = products
            .iter()
            .flat_map(|prod| ops.iter().map(move |a| prod * a))
            .collect();
    }
    let xm = x.matrix();
    let mut total = C64::new(0.0, 0.0);
    for (i, pi) in products.iter().enumerate() {
        for (j, pj) in products.iter().enumerate() {
            let coeff = xm[(i, j)];
            if coeff != C64::new(0.0, 0.0) {
                total += coeff * (pi.adjoint() * pj).trace();
            }
        }
    }
    Ok(total * 0.5)
}
