//! Physical and confluent-Heun parameter sets.
//!
//! The driven two-level system is described by the dimensionless Hamiltonian
//!
//! ```text
//! H(tau) = 1/2 [[ f sin(tau),  nu          ],
//!               [ nu,          -f sin(tau) ]]
//! ```
//!
//! with `tau = omega t`, `f = F / omega` and `nu = omega0 / omega` (hbar = 1).
//! Everything downstream is a function of `(f, nu)` only.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound on the scaled drive frequency `omega / (omega0 + omega + F)`
/// below which the z = 1/2 series lose too many digits to cancellation.
pub const MIN_SCALED_OMEGA: f64 = 3.0 / 128.0;

/// Dimensionless drive amplitude `f` and Larmor frequency `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub f: f64,
    pub nu: f64,
}

impl PhysicalParams {
    /// Negative inputs are mapped to their magnitudes; the quasienergy pair
    /// only depends on `|f|` and `|nu|`.
    pub fn new(f: f64, nu: f64) -> Result<Self> {
        if !f.is_finite() || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "f and nu must be finite (got f = {f}, nu = {nu})"
            )));
        }
        Ok(Self {
            f: f.abs(),
            nu: nu.abs(),
        })
    }

    /// `omega / (omega0 + omega + F)` for any dimensional point mapping to
    /// these parameters.
    pub fn scaled_omega(&self) -> f64 {
        1.0 / (1.0 + self.f + self.nu)
    }

    pub fn within_accuracy_guard(&self) -> bool {
        self.scaled_omega() > MIN_SCALED_OMEGA
    }
}

/// Drive parameters in physical units (hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams {
    pub omega0: f64,
    pub omega: f64,
    #[serde(rename = "F")]
    pub f_amp: f64,
}

impl DimensionalParams {
    pub fn new(omega0: f64, omega: f64, f_amp: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega.is_finite() && f_amp.is_finite()) {
            return Err(Error::InvalidParameter(
                "omega0, omega and F must be finite".into(),
            ));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive frequency omega must be positive (got {omega})"
            )));
        }
        Ok(Self {
            omega0,
            omega,
            f_amp,
        })
    }

    pub fn physical(&self) -> PhysicalParams {
        PhysicalParams {
            f: (self.f_amp / self.omega).abs(),
            nu: (self.omega0 / self.omega).abs(),
        }
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    pub fn scaled_omega(&self) -> f64 {
        self.omega / (self.omega0.abs() + self.omega + self.f_amp.abs())
    }

    /// Physical quasienergy `hbar omega eps` of a dimensionless value.
    pub fn energy(&self, eps: f64) -> f64 {
        self.omega * eps
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            omega0: lambda * self.omega0,
            omega: lambda * self.omega,
            f_amp: lambda * self.f_amp,
        }
    }
}

/// The two exponent pairs `(mu0, mu1)` for which the local series at `z = 0`
/// are needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MuPair {
    /// `(1/2, 1/2)`: the regular solution `y01`.
    PlusPlus,
    /// `(-1/2, 1/2)`: the holomorphic factor of `y02 = sqrt(z) eta0(z, -1/2, 1/2)`.
    MinusPlus,
}

impl MuPair {
    pub fn mu0(self) -> f64 {
        match self {
            MuPair::PlusPlus => 0.5,
            MuPair::MinusPlus => -0.5,
        }
    }

    pub fn mu1(self) -> f64 {
        0.5
    }
}

/// The five parameters of the confluent Heun equation
///
/// ```text
/// y'' + ((1-mu0)/z + (1-mu1)/(z-1) + a) y'
///     + (1/2 (1-mu0)(1-mu1) + a/2 ((1-mu0)(z-1) + (1-mu1) z) + b0 + b1 z) y / (z(z-1)) = 0
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    pub mu0: f64,
    pub mu1: f64,
    pub a: Complex64,
    pub b0: Complex64,
    pub b1: Complex64,
}

impl HeunParams {
    /// Residual of the confluent Heun equation at `z` for a candidate value
    /// `y` with first and second derivatives `dy`, `d2y`.
    pub fn residual(&self, z: f64, y: Complex64, dy: Complex64, d2y: Complex64) -> Complex64 {
        let p = 1.0 - self.mu0;
        let q = 1.0 - self.mu1;
        let first = p / z + q / (z - 1.0) + self.a;
        let zero = 0.5 * p * q + self.a / 2.0 * (p * (z - 1.0) + q * z) + self.b0 + self.b1 * z;
        d2y + first * dy + zero * y / (z * (z - 1.0))
    }
}

/// Map the physical parameters onto the confluent Heun equation obeyed by
/// `exp(-i f z) psi1` with `z = sin^2(tau/2)`.
pub fn che_params(p: PhysicalParams) -> HeunParams {
    let i = Complex64::i();
    HeunParams {
        mu0: 0.5,
        mu1: 0.5,
        a: 2.0 * i * p.f,
        b0: -(4.0 * i * p.f + 2.0 * p.nu * p.nu + 1.0) / 8.0,
        b1: i * p.f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn che_params_substitution() {
        let h = che_params(PhysicalParams::new(0.5, 1.0).unwrap());
        assert_eq!((h.mu0, h.mu1), (0.5, 0.5));
        assert_eq!(h.a, c(0.0, 1.0));
        assert_eq!(h.b0, c(-3.0 / 8.0, -0.25));
        assert_eq!(h.b1, c(0.0, 0.5));

        let h = che_params(PhysicalParams::new(0.0, 0.0).unwrap());
        assert_eq!(h.a, c(0.0, 0.0));
        assert_eq!(h.b0, c(-1.0 / 8.0, 0.0));
        assert_eq!(h.b1, c(0.0, 0.0));

        let h = che_params(PhysicalParams::new(1.0, 2.0).unwrap());
        assert_eq!(h.a, c(0.0, 2.0));
        assert_eq!(h.b0, c(-9.0 / 8.0, -0.5));
        assert_eq!(h.b1, c(0.0, 1.0));
    }

    #[test]
    fn heun_form_reduces_to_transformed_schroedinger_equation() {
        // y'' + (1/(2z) + 1/(2(z-1)) + 2if) y' + (if(2z-1) - nu^2/4) y/(z(z-1))
        let p = PhysicalParams::new(0.7, 1.3).unwrap();
        let h = che_params(p);
        let i = Complex64::i();
        for &z in &[0.1, 0.25, 0.4, 0.6] {
            let (y, dy, d2y) = (c(0.3, -0.2), c(1.1, 0.4), c(-0.5, 2.0));
            let direct = d2y
                + (0.5 / z + 0.5 / (z - 1.0) + 2.0 * i * p.f) * dy
                + (i * p.f * (2.0 * z - 1.0) - p.nu * p.nu / 4.0) * y / (z * (z - 1.0));
            assert!((h.residual(z, y, dy, d2y) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn negative_inputs_map_to_magnitudes() {
        let p = PhysicalParams::new(-0.5, -2.0).unwrap();
        assert_eq!((p.f, p.nu), (0.5, 2.0));
        assert!(PhysicalParams::new(f64::NAN, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn dimensional_mapping() {
        let d = DimensionalParams::new(1.0, 2.0, 0.5).unwrap();
        let p = d.physical();
        assert_eq!((p.f, p.nu), (0.25, 0.5));
        assert_eq!(d.period(), std::f64::consts::PI);
        assert!(DimensionalParams::new(1.0, 0.0, 1.0).is_err());
        assert!((d.scaled_omega() - p.scaled_omega()).abs() < 1e-15);
    }
}
