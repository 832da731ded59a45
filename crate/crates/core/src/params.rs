//! Model parameters: the nondimensional parameter set, the dimensional set it
//! is derived from, the occupancy polynomial behind the repression function
//! and the invariant box.

use crate::error::{Error, Result};
use crate::numeric::bisect_increasing;

/// Relative tolerance for checking a declared `r0` against the recomputed one.
pub const R0_REL_TOL: f64 = 1e-12;

/// Occupancy polynomial `q(y) = sum_{j=1..n} c_j y^j` with `q(0) = 0`.
///
/// The repression function is `psi(y) = 1 / (1 + q(y))` and `r0 = 1 + q(1)`.
/// For the binding model `c_j = (k_0..k_{j-1}) / (j! gamma_1..gamma_j)`; the
/// Hill form puts all weight on the top degree.
#[derive(Debug, Clone, PartialEq)]
pub struct BindingPolynomial {
    coeffs: Vec<f64>,
}

impl BindingPolynomial {
    /// Builds `q` from `c_1..c_n`. All coefficients must be finite and `>= 0`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidParams(format!(
                "occupancy coefficients must be finite and non-negative, got {c}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Coefficients of the binding chain with rates `k_0..k_{n-1}` and
    /// `gamma_1..gamma_n`.
    pub fn from_rates(k: &[f64], gamma: &[f64]) -> Result<Self> {
        if k.len() != gamma.len() {
            return Err(Error::InvalidParams(format!(
                "k has {} entries but gamma has {}",
                k.len(),
                gamma.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(k.len());
        let mut running = 1.0;
        for (j, (kj, gj)) in k.iter().zip(gamma).enumerate() {
            running *= kj / (gj * (j + 1) as f64);
            coeffs.push(running);
        }
        Self::new(coeffs)
    }

    /// `q(y) = (r0 - 1) y^n`, giving `psi(y) = 1 / (1 + (r0 - 1) y^n)`.
    pub fn hill(n: usize, r0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("Hill form needs n >= 1".into()));
        }
        if !r0.is_finite() || r0 < 1.0 {
            return Err(Error::InvalidParams(format!("Hill form needs r0 >= 1, got {r0}")));
        }
        let mut coeffs = vec![0.0; n];
        coeffs[n - 1] = r0 - 1.0;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_1..c_n`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn q(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * y)
    }

    pub fn q_prime(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, c)| acc * y + (i + 1) as f64 * c)
    }

    pub fn psi(&self, y: f64) -> f64 {
        1.0 / (1.0 + self.q(y))
    }

    pub fn psi_prime(&self, y: f64) -> f64 {
        let d = 1.0 + self.q(y);
        -self.q_prime(y) / d / d
    }

    /// `1 + q(1)`, which equals `1 / psi(1)`.
    pub fn r0(&self) -> f64 {
        1.0 + self.coeffs.iter().sum::<f64>()
    }

    /// Quasi-stationary occupancies `x_0..x_{n-1}` at dimer level `y`.
    pub fn occupancy(&self, y: f64) -> Vec<f64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let psi = self.psi(y);
        let mut out = Vec::with_capacity(n);
        out.push(psi);
        let mut yj = 1.0;
        for c in &self.coeffs[..n - 1] {
            yj *= y;
            out.push(c * yj * psi);
        }
        out
    }
}

/// Nondimensional parameter set of the full model.
///
/// `r0` is always recomputed from the binding rates so that the positive
/// steady state sits at `y1 = y2 = z = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    n: usize,
    k_binding: Vec<f64>,
    gamma: Vec<f64>,
    kk: f64,
    delta1: f64,
    delta2: f64,
    theta: f64,
    eps1: f64,
    eps2: f64,
    poly: BindingPolynomial,
    r0: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {v}")))
    }
}

impl ModelParams {
    /// Validates the rates and derives `r0`.
    ///
    /// `k_binding` holds `k_0..k_{n-1}` with `k_0 = 1`; `gamma` holds
    /// `gamma_1..gamma_n`. `n = 0` is accepted as the no-binding baseline.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        k_binding: Vec<f64>,
        gamma: Vec<f64>,
        kk: f64,
        delta1: f64,
        delta2: f64,
        theta: f64,
        eps1: f64,
        eps2: f64,
    ) -> Result<Self> {
        if k_binding.len() != n || gamma.len() != n {
            return Err(Error::InvalidParams(format!(
                "n = {n} needs {n} binding rates and {n} dissociation rates, got {} and {}",
                k_binding.len(),
                gamma.len()
            )));
        }
        if n > 0 && k_binding[0] != 1.0 {
            return Err(Error::InvalidParams(format!(
                "k_0 must equal 1 under the scaling, got {}",
                k_binding[0]
            )));
        }
        for (j, k) in k_binding.iter().enumerate() {
            non_negative(&format!("k_{j}"), *k)?;
        }
        for (j, g) in gamma.iter().enumerate() {
            positive(&format!("gamma_{}", j + 1), *g)?;
        }
        non_negative("kk", kk)?;
        positive("delta1", delta1)?;
        positive("delta2", delta2)?;
        non_negative("theta", theta)?;
        positive("eps1", eps1)?;
        positive("eps2", eps2)?;
        let poly = BindingPolynomial::from_rates(&k_binding, &gamma)?;
        let r0 = poly.r0();
        if !r0.is_finite() {
            return Err(Error::InvalidParams("r0 overflowed".into()));
        }
        Ok(Self {
            n,
            k_binding,
            gamma,
            kk,
            delta1,
            delta2,
            theta,
            eps1,
            eps2,
            poly,
            r0,
        })
    }

    /// Checks a declared `r0` against the value implied by the binding rates.
    pub fn check_declared_r0(&self, declared: f64) -> Result<()> {
        if (declared - self.r0).abs() <= R0_REL_TOL * self.r0 {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "declared r0 = {declared} disagrees with the binding rates (r0 = {})",
                self.r0
            )))
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    /// `k_0..k_{n-1}`.
    pub fn k_binding(&self) -> &[f64] {
        &self.k_binding
    }
    /// `gamma_1..gamma_n`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
    /// Dimer formation coupling `k` in the monomer equation.
    pub fn kk(&self) -> f64 {
        self.kk
    }
    pub fn delta1(&self) -> f64 {
        self.delta1
    }
    pub fn delta2(&self) -> f64 {
        self.delta2
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn eps1(&self) -> f64 {
        self.eps1
    }
    pub fn eps2(&self) -> f64 {
        self.eps2
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn poly(&self) -> &BindingPolynomial {
        &self.poly
    }

    /// `theta * sum_j j gamma_j`.
    pub fn theta_gamma(&self) -> f64 {
        self.theta
            * self
                .gamma
                .iter()
                .enumerate()
                .map(|(i, g)| (i + 1) as f64 * g)
                .sum::<f64>()
    }

    pub fn with_eps1(&self, eps1: f64) -> Result<Self> {
        positive("eps1", eps1)?;
        Ok(Self { eps1, ..self.clone() })
    }

    pub fn with_eps2(&self, eps2: f64) -> Result<Self> {
        positive("eps2", eps2)?;
        Ok(Self { eps2, ..self.clone() })
    }

    pub fn with_kk(&self, kk: f64) -> Result<Self> {
        non_negative("kk", kk)?;
        Ok(Self { kk, ..self.clone() })
    }

    /// Parameters of the reduced with-dimers and classical models.
    pub fn dimer_params(&self) -> DimerParams {
        DimerParams {
            kk: self.kk,
            delta1: self.delta1,
            delta2: self.delta2,
            eps2: self.eps2,
            poly: self.poly.clone(),
        }
    }
}

/// Parameters of the with-dimers model and the classical two-variable model.
///
/// These only see the binding chain through `psi`, so the repression function
/// may also be a Hill-form polynomial that no finite set of binding rates
/// produces.
#[derive(Debug, Clone, PartialEq)]
pub struct DimerParams {
    pub kk: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub eps2: f64,
    pub poly: BindingPolynomial,
}

impl DimerParams {
    pub fn new(kk: f64, delta1: f64, delta2: f64, eps2: f64, poly: BindingPolynomial) -> Result<Self> {
        non_negative("kk", kk)?;
        positive("delta1", delta1)?;
        positive("delta2", delta2)?;
        positive("eps2", eps2)?;
        Ok(Self {
            kk,
            delta1,
            delta2,
            eps2,
            poly,
        })
    }

    /// Hill-form repression `psi(y) = 1 / (1 + (r0 - 1) y^n)`.
    pub fn hill(n: usize, r0: f64, kk: f64, delta1: f64, delta2: f64, eps2: f64) -> Result<Self> {
        Self::new(kk, delta1, delta2, eps2, BindingPolynomial::hill(n, r0)?)
    }

    pub fn r0(&self) -> f64 {
        self.poly.r0()
    }
}

/// Box bounds of the forward-invariant region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantRegion {
    pub ybar1: f64,
    pub ybar2: f64,
    pub zbar: f64,
}

/// `ybar1 = r0 + (k / delta1) theta_gamma`, `ybar2 = ybar1^2 + theta_gamma`,
/// `zbar = r0`.
pub fn invariant_region(p: &ModelParams) -> InvariantRegion {
    let tg = p.theta_gamma();
    let ybar1 = p.r0() + p.kk() / p.delta1() * tg;
    InvariantRegion {
        ybar1,
        ybar2: ybar1 * ybar1 + tg,
        zbar: p.r0(),
    }
}

/// Dimensional rates of the binding model before scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionalParams {
    /// Binding rates `k_0..k_{n-1}`.
    pub k: Vec<f64>,
    /// Dissociation rates `gamma_1..gamma_n`.
    pub gamma: Vec<f64>,
    pub k_y: f64,
    pub gamma_y: f64,
    pub r_y: f64,
    pub r_z: f64,
    pub delta_y: f64,
    pub delta_z: f64,
}

impl DimensionalParams {
    fn validate(&self) -> Result<()> {
        if self.k.is_empty() || self.k.len() != self.gamma.len() {
            return Err(Error::InvalidParams(
                "dimensional set needs n >= 1 with matching k and gamma".into(),
            ));
        }
        for (name, v) in self
            .k
            .iter()
            .map(|v| ("k", *v))
            .chain(self.gamma.iter().map(|v| ("gamma", *v)))
            .chain([
                ("k_y", self.k_y),
                ("gamma_y", self.gamma_y),
                ("r_y", self.r_y),
                ("r_z", self.r_z),
                ("delta_y", self.delta_y),
                ("delta_z", self.delta_z),
            ])
        {
            positive(name, v)?;
        }
        Ok(())
    }

    /// Positive root of the scaling equation
    /// `(delta_y delta_z / (r_y r_z)) q = 1 / (1 + sum_j c_j (k_y q^2 / gamma_y)^j)`.
    pub fn scale_q(&self) -> Result<f64> {
        self.validate()?;
        let poly = BindingPolynomial::from_rates(&self.k, &self.gamma)?;
        let a = self.delta_y * self.delta_z / (self.r_y * self.r_z);
        let b = self.k_y / self.gamma_y;
        // a q (1 + Q(b q^2)) - 1 is increasing, -1 at q = 0 and >= 0 at q = 1/a.
        let f = |q: f64| a * q * (1.0 + poly.q(b * q * q)) - 1.0;
        bisect_increasing(f, 0.0, 1.0 / a)
    }
}

/// Scales the dimensional rates to the nondimensional parameter set.
pub fn derive_nondimensional(p: &DimensionalParams) -> Result<ModelParams> {
    let q = p.scale_q()?;
    let k0 = p.k[0];
    let time = p.k_y * q * q;
    let k_binding = p.k.iter().map(|k| k / k0).collect();
    let gamma = p.gamma.iter().map(|g| g * p.gamma_y / (k0 * time)).collect();
    let params = ModelParams::new(
        p.k.len(),
        k_binding,
        gamma,
        2.0 / q,
        p.delta_y / time,
        p.delta_z / time,
        k0 / p.gamma_y,
        p.gamma_y / k0,
        time / p.gamma_y,
    )?;
    let r0_scaled = p.r_y * p.r_z / (p.delta_y * p.delta_z * q);
    if (r0_scaled - params.r0()).abs() > 1e-9 * params.r0() {
        return Err(Error::RootNotFound {
            iterations: 0,
            residual: (r0_scaled - params.r0()).abs(),
        });
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn par_n3() -> ModelParams {
        ModelParams::new(3, vec![1.0, 1.5, 1.5], vec![1.0, 0.5, 0.5], 0.2, 0.2242, 0.2075, 0.5, 1.0, 1.0)
            .unwrap()
    }

    #[test]
    fn r0_for_three_sites() {
        // 1 + 1/1 + (1 * 1.5) / (2 * 1 * 0.5) + (1 * 1.5 * 1.5) / (6 * 1 * 0.5 * 0.5)
        assert!((par_n3().r0() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_scaling_and_lengths() {
        assert!(ModelParams::new(1, vec![2.0], vec![1.0], 0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(2, vec![1.0], vec![1.0, 1.0], 0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1, vec![1.0], vec![0.0], 0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1, vec![1.0], vec![1.0], 0.0, 1.0, 1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn declared_r0_is_checked() {
        let p = par_n3();
        assert!(p.check_declared_r0(5.0).is_ok());
        assert!(p.check_declared_r0(5.75).is_err());
        assert!(p.check_declared_r0(5.0 * (1.0 + 1e-9)).is_err());
    }

    #[test]
    fn no_binding_sites_baseline() {
        let p = ModelParams::new(0, vec![], vec![], 0.1, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(p.r0(), 1.0);
        assert_eq!(p.poly().psi(3.0), 1.0);
        assert_eq!(p.theta_gamma(), 0.0);
    }

    #[test]
    fn polynomial_derivative_matches_finite_difference() {
        let poly = BindingPolynomial::new(vec![0.3, 1.2, 0.0, 2.5]).unwrap();
        let y = 0.8;
        let h = 1e-6;
        let fd = (poly.q(y + h) - poly.q(y - h)) / (2.0 * h);
        assert!((fd - poly.q_prime(y)).abs() < 1e-8);
        let fd = (poly.psi(y + h) - poly.psi(y - h)) / (2.0 * h);
        assert!((fd - poly.psi_prime(y)).abs() < 1e-8);
    }

    #[test]
    fn hill_polynomial() {
        let poly = BindingPolynomial::hill(5, 10.0).unwrap();
        assert!((poly.r0() - 10.0).abs() < 1e-15);
        assert!((-poly.psi_prime(1.0) - 0.45).abs() < 1e-15);
        assert!(BindingPolynomial::hill(5, 0.5).is_err());
    }

    #[test]
    fn invariant_region_values() {
        let p = ModelParams::new(1, vec![1.0], vec![1.0], 0.2, 0.2242, 1.0, 0.5, 1.0, 1.0).unwrap();
        let r = invariant_region(&p);
        assert!((p.theta_gamma() - 0.5).abs() < 1e-15);
        assert!((r.ybar1 - (2.0 + 0.2 * 0.5 / 0.2242)).abs() < 1e-14);
        assert!((r.ybar1 - 2.4461).abs() < 1e-4);
        assert!((r.ybar2 - (r.ybar1 * r.ybar1 + 0.5)).abs() < 1e-14);
        assert!(r.ybar1 > 1.0);

        let p0 = p.with_kk(0.0).unwrap();
        let r = invariant_region(&p0);
        assert_eq!(r.ybar1, p0.r0());
        assert!((r.ybar2 - (p0.r0() * p0.r0() + 0.5)).abs() < 1e-14);
    }

    fn unit_dimensional() -> DimensionalParams {
        DimensionalParams {
            k: vec![1.0],
            gamma: vec![1.0],
            k_y: 1.0,
            gamma_y: 1.0,
            r_y: 1.0,
            r_z: 1.0,
            delta_y: 1.0,
            delta_z: 1.0,
        }
    }

    #[test]
    fn nondimensional_unit_rates() {
        // Oracle: Newton on q^3 + q - 1, independent of the bisection path.
        let mut q: f64 = 1.0;
        for _ in 0..50 {
            q -= (q * q * q + q - 1.0) / (3.0 * q * q + 1.0);
        }
        let d = unit_dimensional();
        assert!((d.scale_q().unwrap() - q).abs() < 1e-14);
        let p = derive_nondimensional(&d).unwrap();
        assert_eq!(p.k_binding(), &[1.0]);
        assert!((p.gamma()[0] - 1.0 / (q * q)).abs() < 1e-12);
        assert!((p.gamma()[0] - 2.1479).abs() < 1e-4);
        assert!((p.r0() - 1.0 / q).abs() < 1e-12);
        assert!((p.r0() - 1.4656).abs() < 1e-4);
        assert!((p.kk() - 2.0 / q).abs() < 1e-12);
    }

    #[test]
    fn nondimensional_unit_scale() {
        // delta_y delta_z / (r_y r_z) = 1/2 with k_y = gamma_y = 1 gives q = 1.
        let d = DimensionalParams {
            delta_y: 0.5,
            ..unit_dimensional()
        };
        let q = d.scale_q().unwrap();
        assert!((q - 1.0).abs() < 1e-14);
        let p = derive_nondimensional(&d).unwrap();
        assert!((p.r0() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn nondimensional_identity_many_sites() {
        let d = DimensionalParams {
            k: vec![0.7, 3.0, 0.2, 9.0],
            gamma: vec![2.0, 0.1, 4.0, 1.5],
            k_y: 0.3,
            gamma_y: 5.0,
            r_y: 2.0,
            r_z: 7.0,
            delta_y: 0.4,
            delta_z: 0.9,
        };
        let p = derive_nondimensional(&d).unwrap();
        assert_eq!(p.k_binding()[0], 1.0);
        let q = d.scale_q().unwrap();
        let r0_scaled = d.r_y * d.r_z / (d.delta_y * d.delta_z * q);
        assert!((p.r0() - r0_scaled).abs() <= 1e-12 * p.r0());
    }
}
