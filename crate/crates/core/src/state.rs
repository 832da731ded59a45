//! Variant-tagged state vectors for the four model levels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Round-off allowance for `x_j` slightly below zero or `sum x_j` slightly
/// above one.
pub const OMEGA_X_TOL: f64 = 1e-12;

/// Model level, from the full binding model down to the two-variable loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Binding chain `x`, monomers `y1`, dimers `y2`, mRNA `z`.
    Full,
    /// Dimers at their quasi-stationary level `phi(x, y1)`.
    NoDimers,
    /// Binding chain at its quasi-stationary occupancy `psi(y2)`.
    WithDimers,
    /// Both reductions: `y2 = y1^2` and `x0 = psi(y1^2)`.
    Classical,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Full,
        Variant::NoDimers,
        Variant::WithDimers,
        Variant::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoDimers => "no-dimers",
            Variant::WithDimers => "with-dimers",
            Variant::Classical => "classical",
        }
    }

    /// State dimension for `n` binding sites.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Variant::Full => n + 3,
            Variant::NoDimers => n + 2,
            Variant::WithDimers => 3,
            Variant::Classical => 2,
        }
    }

    /// Whether the state carries the binding-chain block `x0..x_{n-1}`.
    pub fn has_binding(self) -> bool {
        matches!(self, Variant::Full | Variant::NoDimers)
    }

    /// Column names in state order.
    pub fn variable_names(self, n: usize) -> Vec<String> {
        let mut names: Vec<String> = if self.has_binding() {
            (0..n).map(|j| format!("x{j}")).collect()
        } else {
            Vec::new()
        };
        let tail: &[&str] = match self {
            Variant::Full | Variant::WithDimers => &["y1", "y2", "z"],
            Variant::NoDimers | Variant::Classical => &["y1", "z"],
        };
        names.extend(tail.iter().map(|s| s.to_string()));
        names
    }

    /// Index of `y1` in the state.
    pub fn y1_index(self, n: usize) -> usize {
        if self.has_binding() {
            n
        } else {
            0
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "no-dimers" | "nodimers" => Ok(Variant::NoDimers),
            "with-dimers" | "withdimers" => Ok(Variant::WithDimers),
            "classical" => Ok(Variant::Classical),
            other => Err(Error::InvalidState(format!(
                "unknown variant '{other}' (expected full, no-dimers, with-dimers or classical)"
            ))),
        }
    }
}

/// State of one model level. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    variant: Variant,
    values: Vec<f64>,
}

impl StateVector {
    pub fn new(variant: Variant, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidState(format!(
                "{variant} state has non-finite entry {} at index {i}",
                values[i]
            )));
        }
        Ok(Self { variant, values })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Checks the dimension for `n` sites, `x in Omega_x` (up to
    /// [`OMEGA_X_TOL`]) and non-negative `y1`, `y2`, `z`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let dim = self.variant.dim(n);
        if self.values.len() != dim {
            return Err(Error::InvalidState(format!(
                "{} state for n = {n} needs {dim} entries, got {}",
                self.variant,
                self.values.len()
            )));
        }
        let split = if self.variant.has_binding() { n } else { 0 };
        let (x, rest) = self.values.split_at(split);
        if let Some(j) = x.iter().position(|v| *v < -OMEGA_X_TOL) {
            return Err(Error::InvalidState(format!("x{j} = {} is negative", x[j])));
        }
        let sum: f64 = x.iter().sum();
        if sum > 1.0 + OMEGA_X_TOL {
            return Err(Error::InvalidState(format!(
                "occupancies sum to {sum} > 1"
            )));
        }
        let names = self.variant.variable_names(n);
        for (v, name) in rest.iter().zip(&names[split..]) {
            if *v < 0.0 {
                return Err(Error::InvalidState(format!("{name} = {v} is negative")));
            }
        }
        Ok(())
    }

    /// Cold start: promoter free (`x0 = 1`), no protein, dimer or mRNA.
    pub fn cold_start(variant: Variant, n: usize) -> Self {
        let mut values = vec![0.0; variant.dim(n)];
        if variant.has_binding() && n > 0 {
            values[0] = 1.0;
        }
        Self { variant, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_dims() {
        assert_eq!(Variant::Full.variable_names(2), ["x0", "x1", "y1", "y2", "z"]);
        assert_eq!(Variant::NoDimers.variable_names(1), ["x0", "y1", "z"]);
        assert_eq!(Variant::WithDimers.variable_names(7), ["y1", "y2", "z"]);
        assert_eq!(Variant::Classical.variable_names(7), ["y1", "z"]);
        for v in Variant::ALL {
            assert_eq!(v.variable_names(4).len(), v.dim(4));
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
    }

    #[test]
    fn validation() {
        assert!(StateVector::new(Variant::Classical, vec![1.0, f64::NAN]).is_err());
        let s = StateVector::new(Variant::Full, vec![0.6, 0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(s.validate(2).is_err());
        let s = StateVector::new(Variant::Full, vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(s.validate(2).is_ok());
        assert!(s.validate(3).is_err());
        let s = StateVector::new(Variant::WithDimers, vec![1.0, -1.0, 0.0]).unwrap();
        assert!(s.validate(3).is_err());
        let s = StateVector::new(Variant::NoDimers, vec![-1e-13, 1.0, 1.0]).unwrap();
        assert!(s.validate(1).is_ok());
    }

    #[test]
    fn cold_start_states() {
        assert_eq!(StateVector::cold_start(Variant::Full, 2).values(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(StateVector::cold_start(Variant::Classical, 2).values(), &[0.0, 0.0]);
        assert_eq!(StateVector::cold_start(Variant::Full, 0).values(), &[0.0, 0.0, 0.0]);
    }
}
