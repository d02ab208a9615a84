//! Markov-Dobrushin constants and the contraction bounds they certify.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::linalg::{self, ComplexMatrix, C64};
use crate::{Error, Result};

use super::{DensityMatrix, SuperOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaMethod {
    /// Exact constant of the qubit Pauli depolarizing channel with parameter `p`.
    ClosedFormDepolarizing { p: f64 },
    /// `c * I` with `c` the smallest `lambda_min(phi(xi xi^†))` found over a
    /// deterministic grid of unit vectors followed by `refinements` rounds of
    /// local pattern search.
    SphereSearch { grid: usize, refinements: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    ClosedForm,
    LowerBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct MdReport {
    #[serde(with = "crate::serde_matrix")]
    pub kappa: ComplexMatrix,
    pub kappa_trace: f64,
    /// `-ln(1 - Tr kappa)`, present only when `0 < Tr kappa < 1`.
    pub theta: Option<f64>,
    pub exactness: Exactness,
}

impl MdReport {
    fn new(kappa: ComplexMatrix, exactness: Exactness) -> Self {
        let kappa_trace = kappa.trace().re;
        let theta = (kappa_trace > 0.0 && kappa_trace < 1.0).then(|| -(1.0 - kappa_trace).ln());
        MdReport {
            kappa,
            kappa_trace,
            theta,
            exactness,
        }
    }

    /// `Tr kappa >= 1`: every input is mapped to the same state in one step.
    pub fn one_step_stationary(&self) -> bool {
        self.kappa_trace >= 1.0
    }

    /// `1 - Tr kappa`, clamped at zero.
    pub fn contraction_factor(&self) -> f64 {
        (1.0 - self.kappa_trace).max(0.0)
    }
}

/// Scalar `c` with `kappa = c I` for the depolarizing channel:
/// `(1 - |1 - 4p/3|) / 2`, i.e. `2p/3` for `p <= 3/4`.
pub fn depolarizing_kappa(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterOutOfRange { name: "p", value: p });
    }
    Ok((1.0 - (1.0 - 4.0 * p / 3.0).abs()) / 2.0)
}

/// Closed-form action of the depolarizing channel on a 2x2 matrix.
fn depolarizing_action(p: f64, m: &ComplexMatrix) -> ComplexMatrix {
    let stay = 1.0 - 2.0 * p / 3.0;
    let swap = 2.0 * p / 3.0;
    let off = 1.0 - 4.0 * p / 3.0;
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            m[(0, 0)] * stay + m[(1, 1)] * swap,
            m[(0, 1)] * off,
            m[(1, 0)] * off,
            m[(1, 1)] * stay + m[(0, 0)] * swap,
        ],
    )
}

pub fn md_constant(phi: &SuperOperator, method: KappaMethod) -> Result<MdReport> {
    match method {
        KappaMethod::ClosedFormDepolarizing { p } => {
            let c = depolarizing_kappa(p)?;
            if phi.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: phi.dim(),
                });
            }
            let reference = SuperOperator::from_fn(2, |m| depolarizing_action(p, m));
            let deviation = phi.max_abs_diff(&reference);
            if deviation > 1e-9 {
                return Err(Error::ClosedFormMismatch(deviation));
            }
            Ok(MdReport::new(linalg::identity(2).scale(c), Exactness::ClosedForm))
        }
        KappaMethod::SphereSearch { grid, refinements } => {
            if grid == 0 {
                return Err(Error::EmptySearchGrid);
            }
            let c = sphere_search(phi, grid, refinements)?;
            Ok(MdReport::new(
                linalg::identity(phi.dim()).scale(c),
                Exactness::LowerBound,
            ))
        }
    }
}

/// `theta = -ln(1 - Tr kappa)`. `Tr kappa >= 1` yields `+inf`.
pub fn mixing_rate(report: &MdReport) -> Result<f64> {
    let t = report.kappa_trace;
    if t <= 0.0 {
        return Err(Error::NoErgodicityCertificate(t));
    }
    if t >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(1.0 - t).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionCheck {
    /// `||phi(rho) - phi(sigma)||_TV`
    pub lhs: f64,
    /// `(1 - Tr kappa) ||rho - sigma||_TV`
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_contraction(
    phi: &SuperOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    report: &MdReport,
    tol: f64,
) -> Result<ContractionCheck> {
    let out = phi.apply(rho.matrix())? - phi.apply(sigma.matrix())?;
    let lhs = linalg::tv_norm(&out)?;
    let rhs = report.contraction_factor() * linalg::tv_norm(&(rho.matrix() - sigma.matrix()))?;
    Ok(ContractionCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub tv_distance: f64,
    pub bound: f64,
}

/// `||phi^n(rho0) - rho*||_TV` against `2 e^{-n theta}` for `n = 0..=n_max`,
/// for a trace-preserving `phi` with fixed point `rho_star`.
///
/// The difference `phi^n(rho0) - phi^n(rho*)` is evolved directly and kept
/// traceless after every step (removing its component along `rho*`), so the
/// distance stays resolvable far below machine precision instead of flooring
/// at rounding noise.
pub fn convergence_trace(
    phi: &SuperOperator,
    rho0: &DensityMatrix,
    rho_star: &DensityMatrix,
    theta: f64,
    n_max: usize,
) -> Result<Vec<ConvergenceRow>> {
    let star = rho_star.matrix();
    let traceless = |m: ComplexMatrix| {
        let t = m.trace();
        m - star * t
    };
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut delta = traceless(rho0.matrix() - star);
    for n in 0..=n_max {
        if n > 0 {
            delta = traceless(phi.apply(&delta)?);
        }
        let tv_distance = linalg::tv_norm(&delta)?;
        let bound = if n == 0 { 2.0 } else { 2.0 * (-(n as f64) * theta).exp() };
        rows.push(ConvergenceRow { n, tv_distance, bound });
    }
    Ok(rows)
}

fn objective(phi: &SuperOperator, xi: &DVector<C64>) -> Result<f64> {
    let proj = xi * xi.adjoint();
    linalg::min_eigenvalue(&phi.apply(&proj)?)
}

fn grid_points(dim: usize, n: usize) -> Vec<DVector<C64>> {
    match dim {
        1 => vec![DVector::from_element(1, C64::new(1.0, 0.0))],
        // Fibonacci lattice on the Bloch sphere; the global phase is irrelevant.
        2 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let polar = z.clamp(-1.0, 1.0).acos();
                    let azimuth = golden * i as f64;
                    DVector::from_vec(vec![
                        C64::new((polar / 2.0).cos(), 0.0),
                        C64::from_polar((polar / 2.0).sin(), azimuth),
                    ])
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x006b_6170_7061);
            (0..n)
                .map(|_| {
                    let v = DVector::from_fn(dim, |_, _| {
                        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
                    });
                    let norm = v.norm();
                    v.unscale(norm)
                })
                .collect()
        }
    }
}

fn sphere_search(phi: &SuperOperator, grid: usize, refinements: usize) -> Result<f64> {
    let dim = phi.dim();
    let mut scored = grid_points(dim, grid)
        .into_iter()
        .map(|xi| objective(phi, &xi).map(|f| (f, xi)))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let real_dims = 2 * dim - 1;
    let initial_step = (grid as f64).powf(-1.0 / real_dims.max(1) as f64);
    let mut best = scored[0].0;
    for (start_value, start) in scored.into_iter().take(4) {
        let (value, _) = pattern_search(phi, start, start_value, initial_step, refinements)?;
        best = best.min(value);
    }
    Ok(best)
}

/// Coordinate pattern search on the real and imaginary parts of `xi`,
/// renormalizing after every move and halving the step `rounds` times.
fn pattern_search(
    phi: &SuperOperator,
    mut xi: DVector<C64>,
    mut value: f64,
    mut step: f64,
    rounds: usize,
) -> Result<(f64, DVector<C64>)> {
    let dim = xi.len();
    for _ in 0..rounds {
        let mut improved = true;
        let mut sweeps = 0;
        while improved && sweeps < 50 {
            improved = false;
            sweeps += 1;
            for j in 0..dim {
                for dir in [
                    C64::new(step, 0.0),
                    C64::new(-step, 0.0),
                    C64::new(0.0, step),
                    C64::new(0.0, -step),
                ] {
                    let mut cand = xi.clone();
                    cand[j] += dir;
                    let norm = cand.norm();
                    if norm == 0.0 {
                        continue;
                    }
                    cand.unscale_mut(norm);
                    let f = objective(phi, &cand)?;
                    if f < value {
                        value = f;
                        xi = cand;
                        improved = true;
                    }
                }
            }
        }
        step *= 0.5;
    }
    Ok((value, xi))
}
