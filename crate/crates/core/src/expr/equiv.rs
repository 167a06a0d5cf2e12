//! Zero testing: exact normal-form comparison, falling back to evaluation
//! at seeded pseudo-random points for identities the normal form cannot see
//! (e.g. `sin(y)^2 + cos(y)^2 = 1`).

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Expr, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceConfig {
    pub seed: u64,
    pub points: usize,
    /// Accept when `|a - b| < tolerance * (1 + max(|a|, |b|))` at every point.
    pub tolerance: f64,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig {
            seed: 0x6a65_7476_6172,
            points: 32,
            tolerance: 1e-9,
        }
    }
}

impl EquivalenceConfig {
    pub fn with_seed(seed: u64) -> Self {
        EquivalenceConfig {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence {
    /// The normal form of `a - b` is the zero constant.
    Symbolic,
    /// Agreement at every sampled point.
    Numeric { points: usize },
    /// A point where the two sides differ.
    Distinct {
        witness: Vec<(Symbol, f64)>,
        lhs: f64,
        rhs: f64,
    },
    /// Too few sample points were inside both domains.
    Undetermined { valid_points: usize },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Symbolic | Equivalence::Numeric { .. })
    }

    pub fn witness(&self) -> Option<&[(Symbol, f64)]> {
        match self {
            Equivalence::Distinct { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equivalence::Symbolic => f.write_str("equal (symbolic)"),
            Equivalence::Numeric { points } => write!(f, "equal (numeric, {points} points)"),
            Equivalence::Distinct { witness, lhs, rhs } => {
                f.write_str("distinct at ")?;
                for (k, (s, v)) in witness.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{s}={v:.6}")?;
                }
                write!(f, " ({lhs:.9e} vs {rhs:.9e})")
            }
            Equivalence::Undetermined { valid_points } => {
                write!(f, "undetermined ({valid_points} valid sample points)")
            }
        }
    }
}

fn sample(rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = rng.random_range(0.1..2.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

impl Expr {
    pub fn equivalent(&self, other: &Expr, config: &EquivalenceConfig) -> Equivalence {
        let difference = (self - other).normalize();
        if difference.is_zero() {
            return Equivalence::Symbolic;
        }
        let mut symbols = self.free_symbols();
        symbols.extend(other.free_symbols());
        let symbols: Vec<Symbol> = symbols.into_iter().collect();

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut valid = 0;
        let mut point = HashMap::with_capacity(symbols.len());
        for _ in 0..config.points * 4 {
            if valid == config.points {
                break;
            }
            point.clear();
            for s in &symbols {
                point.insert(s.clone(), sample(&mut rng));
            }
            let (Ok(lhs), Ok(rhs)) = (self.eval(&point), other.eval(&point)) else {
                continue;
            };
            valid += 1;
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            if (lhs - rhs).abs() >= config.tolerance * scale {
                let witness = symbols.iter().map(|s| (s.clone(), point[s])).collect();
                return Equivalence::Distinct { witness, lhs, rhs };
            }
        }
        if valid * 4 < config.points {
            Equivalence::Undetermined {
                valid_points: valid,
            }
        } else {
            Equivalence::Numeric { points: valid }
        }
    }

    /// Shorthand for [`Expr::equivalent`] with the default seed.
    pub fn is_equivalent(&self, other: &Expr) -> bool {
        self.equivalent(other, &EquivalenceConfig::default())
            .holds()
    }
}
