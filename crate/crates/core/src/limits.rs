//! The weak static-field limit `nu -> 0`.
//!
//! At `nu = 0` the quarter-period data reduce to Bessel and Struve functions
//! of order zero through the integral
//!
//! ```text
//! I(f) = int_0^{1/2} exp(2 i f z) / sqrt(z (1 - z)) dz
//!      = (pi/2) exp(i f) (J0(f) - i H0(f)).
//! ```
//!
//! Expanding `(1 - z)^{-1/2}` and integrating termwise gives the incomplete
//! Beta series used by [`IntegralMethod::Series`]; the substitution
//! `z = sin^2(theta/2)` turns the integral into `int_0^{pi/2} exp(i f (1 - cos
//! theta)) d theta` with smooth integrand, used by
//! [`IntegralMethod::Quadrature`].
//!
//! All ascending series are summed in double-double arithmetic. Their terms
//! grow like `exp(f)` before decaying, and the extra precision keeps the
//! cancellation harmless on the whole `|f| <= 30` domain.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::floquet::solve;
use crate::heun::{eta_at_half, Precision, SeriesControl};
use crate::params::PhysicalParams;

/// Largest `|f|` accepted by the series in this module.
pub const MAX_ARGUMENT: f64 = 30.0;

const MAX_SERIES_TERMS: usize = 1000;

// 1/pi and 1/sqrt(2) as double-double values.
const INV_PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::FRAC_1_PI,
    lo: -1.967_867_667_518_248_6e-17,
};
const INV_SQRT2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::FRAC_1_SQRT_2,
    lo: -4.833_646_656_726_457e-17,
};

fn guard(function: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::Domain {
            function,
            value: x,
            reason: "ascending series limited to |f| <= 30",
        });
    }
    Ok(())
}

fn scale(x: DoubleDouble, c: f64) -> DoubleDouble {
    x * DoubleDouble::new(c)
}

/// Sums `t_0 + t_1 + ...` with `t_k = t_{k-1} * ratio(k)` until the terms
/// have decayed below double-double resolution of the running maximum.
fn ascending(
    what: &'static str,
    first: DoubleDouble,
    ratio: impl Fn(usize) -> DoubleDouble,
) -> Result<f64> {
    let mut term = first;
    let mut sum = first;
    let mut biggest = first.hi.abs();
    for k in 1..MAX_SERIES_TERMS {
        term = term * ratio(k);
        sum = sum + term;
        biggest = biggest.max(term.hi.abs());
        if term.hi.abs() <= 1e-34 * biggest {
            return Ok(sum.to_f64());
        }
    }
    Err(Error::NotConverged {
        what,
        terms: MAX_SERIES_TERMS,
    })
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    guard("bessel_j0", x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let q = DoubleDouble::product(x, x).div_f64(-4.0);
    ascending("bessel_j0", DoubleDouble::ONE, |k| {
        q.div_f64((k * k) as f64)
    })
}

/// Struve function of order zero.
pub fn struve_h0(x: f64) -> Result<f64> {
    guard("struve_h0", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    // Leading term (x/2) / Gamma(3/2)^2 = 2x/pi.
    let first = scale(INV_PI, 2.0 * x);
    let q = DoubleDouble::product(x, x).div_f64(-4.0);
    ascending("struve_h0", first, |k| {
        let d = k as f64 + 0.5;
        q.div_f64(d * d)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegralMethod {
    Series,
    Quadrature,
}

/// `I(f)` by the chosen method.
pub fn i_integral(f: f64, method: IntegralMethod) -> Result<Complex64> {
    guard("i_integral", f)?;
    match method {
        IntegralMethod::Series => integral_series(f),
        IntegralMethod::Quadrature => Ok(integral_quadrature(f)),
    }
}

/// `(pi/2) exp(i f) (J0(f) - i H0(f))`.
pub fn i_integral_closed(f: f64) -> Result<Complex64> {
    let jh = Complex64::new(bessel_j0(f)?, -struve_h0(f)?);
    Ok(FRAC_PI_2 * Complex64::from_polar(1.0, f) * jh)
}

/// `beta_n = B_{1/2}(n + 1/2, 1/2)`, from
/// `sum_k (1/2)_k / k! * 2^{-n-k-1/2} / (n + k + 1/2)`.
fn incomplete_beta_half(n: usize) -> Result<DoubleDouble> {
    let two_n1 = (2 * n + 1) as f64;
    let mut pochhammer = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    for k in 1..MAX_SERIES_TERMS {
        pochhammer = scale(pochhammer, (2 * k - 1) as f64).div_f64((4 * k) as f64);
        let term = scale(pochhammer, two_n1).div_f64(two_n1 + (2 * k) as f64);
        sum = sum + term;
        if term.hi <= 1e-34 * sum.hi {
            // 2^{-n} * sqrt(1/2) * 2 / (2n + 1)
            let prefactor = scale(INV_SQRT2, 2.0f64.powi(1 - n as i32)).div_f64(two_n1);
            return Ok(prefactor * sum);
        }
    }
    Err(Error::NotConverged {
        what: "incomplete beta",
        terms: MAX_SERIES_TERMS,
    })
}

/// `sum_n (2 i f)^n / n! * beta_n`, real and imaginary parts summed apart.
fn integral_series(f: f64) -> Result<Complex64> {
    let mut parts = [DoubleDouble::ZERO; 2];
    let mut power = DoubleDouble::ONE;
    let mut biggest: f64 = 0.0;
    for n in 0..MAX_SERIES_TERMS {
        if n > 0 {
            power = scale(power, 2.0 * f).div_f64(n as f64);
        }
        let term = power * incomplete_beta_half(n)?;
        let signed = if n % 4 < 2 { term } else { -term };
        parts[n % 2] = parts[n % 2] + signed;
        biggest = biggest.max(term.hi.abs());
        if n as f64 > 2.0 * f.abs() && term.hi.abs() <= 1e-34 * biggest {
            return Ok(Complex64::new(parts[0].to_f64(), parts[1].to_f64()));
        }
    }
    Err(Error::NotConverged {
        what: "i_integral series",
        terms: MAX_SERIES_TERMS,
    })
}

const GAUSS_ORDER: usize = 16;
const PANELS: usize = 48;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`.
fn gauss_legendre() -> &'static [(f64, f64); GAUSS_ORDER] {
    static RULE: OnceLock<[(f64, f64); GAUSS_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut rule = [(0.0, 0.0); GAUSS_ORDER];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn integral_quadrature(f: f64) -> Complex64 {
    let rule = gauss_legendre();
    let width = FRAC_PI_2 / PANELS as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for panel in 0..PANELS {
        let mid = (panel as f64 + 0.5) * width;
        for &(x, w) in rule {
            let theta = mid + 0.5 * width * x;
            sum += w * Complex64::from_polar(1.0, f * (1.0 - theta.cos()));
        }
    }
    0.5 * width * sum
}

/// `eta_{-+}(f, 0) = pi / (2 sqrt 2) (J0(f) - i H0(f))`.
pub fn eta_mp_nu0(f: f64) -> Result<Complex64> {
    let jh = Complex64::new(bessel_j0(f)?, -struve_h0(f)?);
    Ok(PI / (2.0 * std::f64::consts::SQRT_2) * jh)
}

/// `eta_{++}(f, 0) = exp(-i f)`.
pub fn eta_pp_nu0(f: f64) -> Complex64 {
    Complex64::from_polar(1.0, -f)
}

/// `(1/pi) asin((pi/2) nu J0(f))`, the small-`nu` quasienergy.
pub fn quasienergy_small_nu(f: f64, nu: f64) -> Result<f64> {
    let s = FRAC_PI_2 * nu * bessel_j0(f)?;
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::Domain {
            function: "quasienergy_small_nu",
            value: nu,
            reason: "(pi/2) nu J0(f) must lie in [-1, 1]",
        });
    }
    Ok(s.asin() / PI)
}

/// Leading order `(nu/2) J0(f)`.
pub fn leading_small_nu(f: f64, nu: f64) -> Result<f64> {
    Ok(0.5 * nu * bessel_j0(f)?)
}

/// One sample of the `nu = 0` identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCheckReport {
    pub f: f64,
    pub eta_mp_series: Complex64,
    pub eta_mp_closed: Complex64,
    pub integral_quadrature: Complex64,
    pub integral_closed: Complex64,
    pub max_abs_error: f64,
}

impl LimitCheckReport {
    pub fn at(f: f64) -> Result<Self> {
        let half = eta_at_half(PhysicalParams::new(f, 0.0)?, &reference_control())?;
        let eta_mp_closed = eta_mp_nu0(f)?;
        let integral_quadrature = i_integral(f, IntegralMethod::Quadrature)?;
        let integral_closed = i_integral_closed(f)?;
        let max_abs_error = (half.eta_mp.value - eta_mp_closed)
            .norm()
            .max((integral_quadrature - integral_closed).norm());
        Ok(Self {
            f,
            eta_mp_series: half.eta_mp.value,
            eta_mp_closed,
            integral_quadrature,
            integral_closed,
            max_abs_error,
        })
    }
}

fn reference_control() -> SeriesControl {
    SeriesControl::trace().precision(Precision::DoubleDouble)
}

pub const INTEGRAL_TOL: f64 = 1e-9;
pub const ETA_TOL: f64 = 1e-8;
pub const SLOPE_TOL: f64 = 1e-4;
/// Static field used for the finite-difference slope.
pub const SLOPE_NU: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteResult {
    fn new(name: &str, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_error,
            tolerance,
            passed: max_error < tolerance,
        }
    }
}

/// Max error of `I(f)` by quadrature and by series against the closed form.
pub fn integral_identity_error(fs: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &f in fs {
        let closed = i_integral_closed(f)?;
        worst = worst
            .max((i_integral(f, IntegralMethod::Quadrature)? - closed).norm())
            .max((i_integral(f, IntegralMethod::Series)? - closed).norm());
    }
    Ok(worst)
}

/// Max error of both half-values of the `nu = 0` series against their
/// closed forms.
pub fn eta_identity_error(fs: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &f in fs {
        let half = eta_at_half(PhysicalParams::new(f, 0.0)?, &reference_control())?;
        worst = worst
            .max((half.eta_mp.value - eta_mp_nu0(f)?).norm())
            .max((half.eta_pp.value - eta_pp_nu0(f)).norm());
    }
    Ok(worst)
}

/// Max relative deviation of `eps(f, nu) / nu` at `nu = SLOPE_NU` from
/// `J0(f)/2`.
///
/// The denominator is floored at `nu` so that samples sitting on a Bessel
/// zero compare at the absolute scale of the neglected `O(nu^3)` terms.
pub fn slope_identity_error(fs: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &f in fs {
        let sol = solve(
            PhysicalParams::new(f, SLOPE_NU)?,
            &SeriesControl::quasienergy(),
        )?;
        let slope = sol.quasienergy.epsilon / SLOPE_NU;
        let expected = 0.5 * bessel_j0(f)?;
        worst = worst.max((slope - expected).abs() / expected.abs().max(SLOPE_NU));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsReport {
    pub f_max: f64,
    pub samples: usize,
    pub rows: Vec<LimitCheckReport>,
    pub suites: Vec<SuiteResult>,
}

impl LimitsReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

/// `samples` equally spaced values in `[0, f_max]`; a single `0` when either
/// is degenerate.
pub fn sample_grid(f_max: f64, samples: usize) -> Vec<f64> {
    if samples < 2 || f_max == 0.0 {
        return vec![0.0];
    }
    (0..samples)
        .map(|k| f_max * k as f64 / (samples - 1) as f64)
        .collect()
}

/// Runs the three identity suites on [`sample_grid`].
pub fn check_identities(f_max: f64, samples: usize) -> Result<LimitsReport> {
    if !(0.0..=MAX_ARGUMENT).contains(&f_max) {
        return Err(Error::InvalidParameter(format!(
            "f_max must lie in [0, {MAX_ARGUMENT}] (got {f_max})"
        )));
    }
    let fs = sample_grid(f_max, samples);
    let rows = fs
        .iter()
        .map(|&f| LimitCheckReport::at(f))
        .collect::<Result<Vec<_>>>()?;
    let suites = vec![
        SuiteResult::new("integral", integral_identity_error(&fs)?, INTEGRAL_TOL),
        SuiteResult::new("eta_nu0", eta_identity_error(&fs)?, ETA_TOL),
        SuiteResult::new("small_nu_slope", slope_identity_error(&fs)?, SLOPE_TOL),
    ];
    Ok(LimitsReport {
        f_max,
        samples: fs.len(),
        rows,
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational, ToPrimitive};

    #[test]
    fn j0_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!(bessel_j0(2.4048255577).unwrap().abs() < 1e-8);
        assert!(bessel_j0(30.5).is_err());
        assert!(bessel_j0(f64::NAN).is_err());
        assert_eq!(bessel_j0(-1.3).unwrap(), bessel_j0(1.3).unwrap());
    }

    #[test]
    fn j0_half_against_exact_rational_series() {
        // (x/2)^2 = 1/16 at x = 1/2.
        let q = BigRational::new(BigInt::from(-1), BigInt::from(16));
        let mut term = BigRational::from_integer(BigInt::from(1));
        let mut sum = term.clone();
        for k in 1..50 {
            term = term * &q / BigRational::from_integer(BigInt::from(k * k));
            sum += &term;
        }
        let exact = sum.to_f64().unwrap();
        assert!((bessel_j0(0.5).unwrap() - exact).abs() <= 1e-16);
    }

    #[test]
    fn j0_root_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if bessel_j0(mid).unwrap() > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn h0_small_argument() {
        assert_eq!(struve_h0(0.0).unwrap(), 0.0);
        let x = 1e-3;
        let h = struve_h0(x).unwrap();
        assert!(((h - 2.0 * x / PI) / h).abs() < 1e-4);
        assert_eq!(struve_h0(-0.7).unwrap(), -struve_h0(0.7).unwrap());
    }

    /// Composite Simpson on `(2/pi) int_0^{pi/2} sin(x cos t) dt`.
    fn struve_by_simpson(x: f64) -> f64 {
        let n = 20_000;
        let h = FRAC_PI_2 / n as f64;
        let g = |t: f64| (x * t.cos()).sin();
        let mut s = g(0.0) + g(FRAC_PI_2);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * g(k as f64 * h);
        }
        2.0 / PI * s * h / 3.0
    }

    #[test]
    fn h0_against_quadrature() {
        for x in [0.3, 1.0, 4.0] {
            assert!((struve_h0(x).unwrap() - struve_by_simpson(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_at_zero() {
        for m in [IntegralMethod::Series, IntegralMethod::Quadrature] {
            let v = i_integral(0.0, m).unwrap();
            assert!((v - Complex64::new(FRAC_PI_2, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn integral_identity() {
        let fs = [0.0, 0.5, 1.0, 2.0, 5.0];
        assert!(integral_identity_error(&fs).unwrap() < INTEGRAL_TOL);
        for f in [10.0, 20.0, 30.0] {
            let a = i_integral(f, IntegralMethod::Series).unwrap();
            let b = i_integral(f, IntegralMethod::Quadrature).unwrap();
            assert!((a - b).norm() < 1e-9, "f = {f}");
        }
    }

    #[test]
    fn nu0_closed_forms() {
        let v = eta_mp_nu0(0.0).unwrap();
        assert!((v.re - 1.110_720_734_539_591_5).abs() < 1e-15);
        assert!((eta_pp_nu0(2.0 * PI) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let fs = sample_grid(5.0, 20);
        assert!(eta_identity_error(&fs).unwrap() < ETA_TOL);
        let fs: Vec<f64> = (0..=6).map(|k| 5.0 * k as f64).collect();
        assert!(eta_identity_error(&fs).unwrap() < ETA_TOL);
    }

    #[test]
    fn small_nu_formula() {
        assert_eq!(quasienergy_small_nu(1.0, 0.0).unwrap(), 0.0);
        let nu = 1e-3;
        assert!((quasienergy_small_nu(0.0, nu).unwrap() - nu / 2.0).abs() < 1e-9);
        assert!(quasienergy_small_nu(2.404_825_557_7, 0.01).unwrap().abs() < 1e-12);
        assert!(quasienergy_small_nu(0.0, 0.7).is_err());
        assert_eq!(leading_small_nu(0.0, 0.2).unwrap(), 0.1);
    }

    #[test]
    fn slope_and_quenching() {
        let fs = sample_grid(5.0, 20);
        assert!(slope_identity_error(&fs).unwrap() < SLOPE_TOL);
        let p = PhysicalParams::new(2.404_825_557_695_773, 1e-3).unwrap();
        let eps = solve(p, &SeriesControl::quasienergy())
            .unwrap()
            .quasienergy
            .epsilon;
        assert!(eps.abs() < 1e-8);
    }

    #[test]
    fn report() {
        let r = check_identities(5.0, 20).unwrap();
        assert!(r.passed(), "{:?}", r.suites);
        assert_eq!(r.rows.len(), 20);
        let r = check_identities(0.0, 20).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.suites.iter().all(|s| s.max_error < 1e-14));
        assert!(check_identities(31.0, 3).is_err());
    }
}
