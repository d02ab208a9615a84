use serde::{Deserialize, Serialize};

use crate::channel::{Convention, KrausFamily};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Sites {
    TranslationInvariant(KrausFamily),
    PerSite(Vec<KrausFamily>),
}

/// Site tensors `A_i^{[k]}`: `d` matrices of size `D x D` per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct MpsChain {
    d: usize,
    bond_dim: usize,
    sites: Sites,
}

#[derive(Serialize, Deserialize)]
struct RawChain {
    d: usize,
    #[serde(rename = "D")]
    bond_dim: usize,
    translation_invariant: bool,
    sites: Vec<KrausFamily>,
}

impl TryFrom<RawChain> for MpsChain {
    type Error = Error;

    fn try_from(raw: RawChain) -> Result<Self> {
        let chain = if raw.translation_invariant {
            let mut sites = raw.sites;
            if sites.len() != 1 {
                return Err(Error::InvalidChain(format!(
                    "a translation-invariant chain lists exactly one site family, found {}",
                    sites.len()
                )));
            }
            MpsChain::translation_invariant(sites.remove(0))?
        } else {
            MpsChain::per_site(raw.sites)?
        };
        if chain.d != raw.d || chain.bond_dim != raw.bond_dim {
            return Err(Error::InvalidChain(format!(
                "header says d={}, D={} but the site families have d={}, D={}",
                raw.d, raw.bond_dim, chain.d, chain.bond_dim
            )));
        }
        Ok(chain)
    }
}

impl From<MpsChain> for RawChain {
    fn from(chain: MpsChain) -> Self {
        let (translation_invariant, sites) = match chain.sites {
            Sites::TranslationInvariant(f) => (true, vec![f]),
            Sites::PerSite(fs) => (false, fs),
        };
        RawChain {
            d: chain.d,
            bond_dim: chain.bond_dim,
            translation_invariant,
            sites,
        }
    }
}

impl MpsChain {
    pub fn translation_invariant(family: KrausFamily) -> Result<Self> {
        Ok(MpsChain {
            d: family.len(),
            bond_dim: family.dim(),
            sites: Sites::TranslationInvariant(family.with_convention(Convention::Heisenberg)),
        })
    }

    pub fn per_site(families: Vec<KrausFamily>) -> Result<Self> {
        let first = families
            .first()
            .ok_or_else(|| Error::InvalidChain("a chain needs at least one site".into()))?;
        let (d, bond_dim) = (first.len(), first.dim());
        for (k, f) in families.iter().enumerate() {
            if f.len() != d || f.dim() != bond_dim {
                return Err(Error::InvalidChain(format!(
                    "site {} has {} operators of size {}, expected {} of size {}",
                    k + 1,
                    f.len(),
                    f.dim(),
                    d,
                    bond_dim
                )));
            }
        }
        Ok(MpsChain {
            d,
            bond_dim,
            sites: Sites::PerSite(
                families
                    .into_iter()
                    .map(|f| f.with_convention(Convention::Heisenberg))
                    .collect(),
            ),
        })
    }

    /// Physical (local) dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn sites(&self) -> &Sites {
        &self.sites
    }

    pub fn is_translation_invariant(&self) -> bool {
        matches!(self.sites, Sites::TranslationInvariant(_))
    }

    /// Number of explicitly stored sites; `None` for an infinite
    /// translation-invariant chain.
    pub fn site_count(&self) -> Option<usize> {
        match &self.sites {
            Sites::TranslationInvariant(_) => None,
            Sites::PerSite(fs) => Some(fs.len()),
        }
    }

    /// Site family at 1-based position `k`.
    pub fn site(&self, k: usize) -> Result<&KrausFamily> {
        match &self.sites {
            Sites::TranslationInvariant(f) if k >= 1 => Ok(f),
            Sites::PerSite(fs) if k >= 1 && k <= fs.len() => Ok(&fs[k - 1]),
            _ => Err(Error::InvalidChain(format!(
                "site {k} is outside the chain (length {})",
                self.site_count().map_or("unbounded".to_string(), |n| n.to_string())
            ))),
        }
    }

    /// Fails unless sites `1..=n` all exist.
    pub fn ensure_sites(&self, n: usize) -> Result<()> {
        if n > 0 {
            self.site(n)?;
        }
        Ok(())
    }

    /// The translation-invariant family, if any.
    pub fn uniform_family(&self) -> Option<&KrausFamily> {
        match &self.sites {
            Sites::TranslationInvariant(f) => Some(f),
            Sites::PerSite(_) => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
