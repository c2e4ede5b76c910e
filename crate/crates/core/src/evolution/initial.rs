use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{random_field, sobolev_norm, Field, Grid};

/// Initial data library. Centres default to the middle of the period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<f64>,
    },
    Sech2 {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<f64>,
    },
    Cosine {
        amplitude: f64,
        mode: u32,
    },
    /// Random coefficients with `(1+ξ²)^{−(s+1)/2}` decay, optionally
    /// rescaled to a given `H^s` norm.
    RandomSpectrum {
        s: f64,
        #[serde(default)]
        norm: Option<f64>,
    },
    /// A snapshot CSV with columns `x,eta` on the same grid.
    File {
        path: PathBuf,
    },
    Zero {},
}

impl InitialCondition {
    pub fn build(&self, grid: Grid, seed: u64) -> Result<Field> {
        let mid = grid.length() / 2.0;
        match *self {
            InitialCondition::Gaussian {
                amplitude,
                width,
                center,
            } => {
                check_width(width)?;
                let c = center.unwrap_or(mid);
                Field::from_fn(grid, |x| amplitude * (-((x - c) / width).powi(2)).exp())
            }
            InitialCondition::Sech2 {
                amplitude,
                width,
                center,
            } => {
                check_width(width)?;
                let c = center.unwrap_or(mid);
                Field::from_fn(grid, |x| amplitude / ((x - c) / width).cosh().powi(2))
            }
            InitialCondition::Cosine { amplitude, mode } => {
                let k = grid.dk() * mode as f64;
                Field::from_fn(grid, |x| amplitude * (k * x).cos())
            }
            InitialCondition::RandomSpectrum { s, norm } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = random_field(grid, s, &mut rng);
                match norm {
                    Some(target) => scale_to_norm(&f, s, target),
                    None => Ok(f),
                }
            }
            InitialCondition::File { ref path } => {
                let f = crate::io::read_snapshot(path)?;
                if f.grid().n() != grid.n() || (f.grid().length() - grid.length()).abs() > 1e-9 * grid.length() {
                    return Err(Error::GridMismatch);
                }
                Ok(f)
            }
            InitialCondition::Zero {} => Ok(Field::zeros(grid)),
        }
    }
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("width", format!("must be positive, got {width}")))
    }
}

/// Rescales `f` so that `‖f‖_{H^s} = target`.
pub fn scale_to_norm(f: &Field, s: f64, target: f64) -> Result<Field> {
    let norm = sobolev_norm(f, s);
    if norm == 0.0 {
        return Err(Error::invalid("norm", "cannot rescale the zero field"));
    }
    Ok(f.scale(target / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_build() {
        let g = Grid::new(64, 20.0).unwrap();
        let ic: InitialCondition = serde_json::from_str(r#"{"kind":"sech2","amplitude":0.5,"width":1.0}"#).unwrap();
        let f = ic.build(g, 0).unwrap();
        assert!((f.max_abs() - 0.5).abs() < 1e-12);
        let r = InitialCondition::RandomSpectrum {
            s: 1.0,
            norm: Some(0.25),
        };
        let a = r.build(g, 9).unwrap();
        assert!((sobolev_norm(&a, 1.0) - 0.25).abs() < 1e-14);
        assert_eq!(a, r.build(g, 9).unwrap());
        assert!(serde_json::from_str::<InitialCondition>(r#"{"kind":"zero","extra":1}"#).is_err());
    }
}
