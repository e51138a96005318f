//! Run configuration: a JSON file mirroring the command-line flags, with
//! flags taking precedence.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hardyheat_core::{AccuracyBudget, ChannelParams, CouplingParams, EvalPoint};

use crate::error::{usage, Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Auto,
    Closed,
    Subordination,
    Spectral,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RatioArg {
    None,
    Envelope,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub zeta: Option<f64>,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub d: Option<u32>,
    pub ell: Option<u32>,
    pub kappa: Option<f64>,
    pub t: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub method: Option<MethodArg>,
    pub grid: Option<GridSpec>,
    pub budget: Option<AccuracyBudget>,
    pub suite: Option<String>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub ratio: Option<RatioArg>,
}

/// The operator selected by the coupling flags. `eta` is exactly 0 for the
/// free kernel, which is then not subject to the coupling constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub zeta: f64,
    pub alpha: f64,
    pub eta: f64,
}

impl Coupling {
    pub fn params(&self) -> Result<CouplingParams> {
        Ok(CouplingParams::new(self.zeta, self.alpha, self.eta)?)
    }
}

/// Reads JSON from a file, or parses it directly when it starts with '{'.
pub fn read_json<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::io(arg, e))?
    };
    Ok(serde_json::from_str(&text)?)
}

macro_rules! take {
    ($self:ident, $other:ident; $($f:ident),*) => {
        $( if $other.$f.is_some() { $self.$f = $other.$f; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `flags` replace those of `self`.
    pub fn merge(mut self, flags: RunConfig) -> Self {
        take!(self, flags; zeta, alpha, eta, d, ell, kappa, t, r, s, method, grid, budget, suite, out, cache, format, seed, ratio);
        self
    }

    /// (ζ, α, η) from either the direct flags or the channel flags (d, ℓ, κ).
    pub fn coupling(&self) -> Result<Coupling> {
        let alpha = self.alpha.ok_or_else(|| usage!("--alpha is required"))?;
        let channel = self.d.is_some() || self.ell.is_some() || self.kappa.is_some();
        if channel {
            if self.zeta.is_some() || self.eta.is_some() {
                return Err(usage!("give either --zeta/--eta or --d/--ell/--kappa, not both"));
            }
            let d = self.d.ok_or_else(|| usage!("--d is required with --ell/--kappa"))?;
            let ch = ChannelParams::new(d, self.ell.unwrap_or(0))?;
            let kappa = self.kappa.unwrap_or(0.0);
            if kappa == 0.0 {
                return Ok(Coupling {
                    zeta: ch.zeta(),
                    alpha,
                    eta: 0.0,
                });
            }
            let p = ch.coupling(alpha, kappa)?;
            return Ok(Coupling {
                zeta: p.zeta,
                alpha,
                eta: p.eta,
            });
        }
        let zeta = self.zeta.ok_or_else(|| usage!("--zeta (or --d) is required"))?;
        Ok(Coupling {
            zeta,
            alpha,
            eta: self.eta.unwrap_or(0.0),
        })
    }

    pub fn point(&self) -> Result<EvalPoint> {
        let get = |v: Option<f64>, name: &str| v.ok_or_else(|| usage!("--{name} is required"));
        Ok(EvalPoint::new(get(self.t, "t")?, get(self.r, "r")?, get(self.s, "s")?)?)
    }

    /// The grid with the scalar flags applied: --zeta, --alpha, --t and
    /// --seed narrow or replace the corresponding grid fields.
    pub fn grid(&self) -> GridSpec {
        let mut g = self.grid.clone().unwrap_or_default();
        if let Some(z) = self.zeta {
            g.zeta_values = vec![z];
        }
        if let Some(a) = self.alpha {
            g.alpha_values = vec![a];
        }
        if let Some(t) = self.t {
            g.t_values = vec![t];
        }
        if let Some(seed) = self.seed {
            g.seed = seed;
        }
        g
    }

    pub fn budget(&self) -> Result<AccuracyBudget> {
        let b = self.budget.unwrap_or_default();
        b.validate()?;
        Ok(b)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let file: RunConfig = serde_json::from_str(r#"{"zeta": 1.0, "alpha": 1.5, "seed": 3}"#).unwrap();
        let flags = RunConfig {
            alpha: Some(0.5),
            ..Default::default()
        };
        let c = file.merge(flags);
        assert_eq!((c.zeta, c.alpha, c.seed), (Some(1.0), Some(0.5), Some(3)));
        assert!(serde_json::from_str::<RunConfig>(r#"{"zeta": 1, "bogus": 2}"#).is_err());
    }

    #[test]
    fn channel_and_direct_couplings() {
        let ch = RunConfig {
            d: Some(3),
            alpha: Some(2.0),
            kappa: Some(0.0),
            ..Default::default()
        };
        assert_eq!(
            ch.coupling().unwrap(),
            Coupling {
                zeta: 1.0,
                alpha: 2.0,
                eta: 0.0
            }
        );
        let both = RunConfig {
            zeta: Some(1.0),
            ..ch.clone()
        };
        assert!(matches!(both.coupling(), Err(Error::Usage(_))));
        let direct = RunConfig {
            zeta: Some(0.0),
            alpha: Some(1.0),
            ..Default::default()
        };
        assert_eq!(direct.coupling().unwrap().eta, 0.0);
        assert!(matches!(RunConfig::default().coupling(), Err(Error::Usage(_))));
    }

    #[test]
    fn scalar_flags_narrow_the_grid() {
        let c = RunConfig {
            alpha: Some(1.0),
            seed: Some(9),
            ..Default::default()
        };
        let g = c.grid();
        assert_eq!(g.alpha_values, vec![1.0]);
        assert_eq!(g.zeta_values, GridSpec::default().zeta_values);
        assert_eq!(g.seed, 9);
    }
}
