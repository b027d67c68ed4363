//! Local power-series solutions `eta0(z, mu)` of the confluent Heun equation
//! about `z = 0`.
//!
//! The coefficients obey three-term recurrences started from `tau_{-1} = 0`,
//! `tau_0 = 1`. Two exponent pairs are supported: `(1/2, 1/2)` for the
//! regular solution and `(-1/2, 1/2)` for the factor of the `sqrt(z)`
//! solution. Both series have radius of convergence one.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{DoubleDouble, Real};
use crate::error::{Error, Result};
use crate::params::{MuPair, PhysicalParams};

/// Working precision of the coefficient recurrence and partial sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Binary64,
    /// Double-double, for large `f` or `nu` where the partial sums cancel
    /// over many orders of magnitude.
    DoubleDouble,
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f64" | "binary64" | "double" => Ok(Precision::Binary64),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            other => Err(Error::InvalidParameter(format!(
                "unknown precision `{other}` (expected `f64` or `dd`)"
            ))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Binary64 => "f64",
            Precision::DoubleDouble => "dd",
        })
    }
}

/// Truncation control for the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Hard cap on the number of terms, `tau_0` included.
    pub max_terms: usize,
    /// Relative size below which a term counts as negligible.
    pub tol: f64,
    /// Number of consecutive negligible terms required to stop.
    pub consecutive: usize,
    pub precision: Precision,
}

impl SeriesControl {
    pub const QUASIENERGY_TERMS: usize = 100;
    pub const TRACE_TERMS: usize = 1000;

    /// 100 terms, the truncation used for quasienergy surfaces.
    pub fn quasienergy() -> Self {
        Self::with_terms(Self::QUASIENERGY_TERMS)
    }

    /// 1,000 terms, the truncation used for full-period traces.
    pub fn trace() -> Self {
        Self::with_terms(Self::TRACE_TERMS)
    }

    pub fn with_terms(max_terms: usize) -> Self {
        Self {
            max_terms,
            tol: 1e-14,
            consecutive: 5,
            precision: Precision::Binary64,
        }
    }

    pub fn precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self::quasienergy()
    }
}

/// A truncated series value together with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    pub value: Complex64,
    pub terms_used: usize,
    pub last_term_magnitude: f64,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Cx<R> {
    re: R,
    im: R,
}

impl<R: Real> Cx<R> {
    fn zero() -> Self {
        Self {
            re: R::from_f64(0.0),
            im: R::from_f64(0.0),
        }
    }

    fn one() -> Self {
        Self {
            re: R::from_f64(1.0),
            im: R::from_f64(0.0),
        }
    }

    fn from_c64(c: Complex64) -> Self {
        Self {
            re: R::from_f64(c.re),
            im: R::from_f64(c.im),
        }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// One step of the coefficient recurrence, written as
///
/// ```text
/// tau_{k+1} = ((A_k - i B_k) tau_k + i C_k tau_{k-1}) / D_k
/// ```
///
/// with `A_k` carrying the `-nu^2` shift and `B_k`, `C_k` proportional to `f`.
#[inline]
fn step<R: Real>(mu: MuPair, k: usize, t: Cx<R>, tm1: Cx<R>, f: f64, nu2: R) -> Cx<R> {
    let k = k as f64;
    let (a_int, b_int, c_int, d) = match mu {
        MuPair::PlusPlus => (
            4.0 * k * k,
            4.0 * (2.0 * k + 1.0),
            8.0 * k,
            2.0 * (k + 1.0) * (2.0 * k + 1.0),
        ),
        MuPair::MinusPlus => (
            4.0 * k * (k + 1.0) + 1.0,
            8.0 * (k + 1.0),
            4.0 * (2.0 * k + 1.0),
            2.0 * (k + 1.0) * (2.0 * k + 3.0),
        ),
    };
    let a = R::from_f64(a_int) - nu2;
    let b = R::product(f, b_int);
    let c = R::product(f, c_int);
    Cx {
        re: (a * t.re + b * t.im - c * tm1.im).div_f64(d),
        im: (a * t.im - b * t.re + c * tm1.re).div_f64(d),
    }
}

/// `tau_{k+1}` from `tau_k` and `tau_{k-1}` in binary64.
pub fn recurrence_step(
    mu: MuPair,
    k: usize,
    tau_k: Complex64,
    tau_km1: Complex64,
    p: PhysicalParams,
) -> Complex64 {
    step::<f64>(
        mu,
        k,
        Cx::from_c64(tau_k),
        Cx::from_c64(tau_km1),
        p.f,
        p.nu * p.nu,
    )
    .to_c64()
}

fn hypot_cx<R: Real>(c: Cx<R>) -> f64 {
    c.re.to_f64().hypot(c.im.to_f64())
}

fn sum_series<R: Real>(z: f64, mu: MuPair, p: PhysicalParams, ctrl: &SeriesControl) -> SeriesEval {
    let nu2 = R::product(p.nu, p.nu);
    let zr = R::from_f64(z);
    let mut sum = Cx::<R>::one();
    let mut t = Cx::<R>::one();
    let mut tm1 = Cx::<R>::zero();
    let mut zk = R::from_f64(1.0);
    let mut terms_used = 1;
    let mut last = 1.0;
    let mut small_run = 0;
    let mut converged = false;

    for k in 0..ctrl.max_terms.saturating_sub(1) {
        let next = step(mu, k, t, tm1, p.f, nu2);
        zk = zk * zr;
        let term = Cx {
            re: next.re * zk,
            im: next.im * zk,
        };
        sum = Cx {
            re: sum.re + term.re,
            im: sum.im + term.im,
        };
        terms_used = k + 2;
        last = hypot_cx(term);
        if last <= ctrl.tol * hypot_cx(sum) {
            small_run += 1;
            if small_run >= ctrl.consecutive {
                converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        tm1 = t;
        t = next;
    }

    SeriesEval {
        value: sum.to_c64(),
        terms_used,
        last_term_magnitude: last,
        converged,
    }
}

/// Partial sum of `eta0(z, mu) = sum_k tau_k z^k` for `0 <= z < 1`.
///
/// Summation stops once `ctrl.consecutive` successive terms are below
/// `ctrl.tol` relative to the partial sum; hitting `ctrl.max_terms` first
/// leaves `converged == false`.
pub fn eta0(z: f64, mu: MuPair, p: PhysicalParams, ctrl: &SeriesControl) -> Result<SeriesEval> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain {
            function: "eta0",
            value: z,
            reason: "series about z = 0 requires 0 <= z < 1",
        });
    }
    if ctrl.max_terms == 0 {
        return Err(Error::InvalidParameter(
            "max_terms must be at least 1".into(),
        ));
    }
    if z == 0.0 {
        return Ok(SeriesEval {
            value: Complex64::new(1.0, 0.0),
            terms_used: 1,
            last_term_magnitude: 0.0,
            converged: true,
        });
    }
    Ok(match ctrl.precision {
        Precision::Binary64 => sum_series::<f64>(z, mu, p, ctrl),
        Precision::DoubleDouble => sum_series::<DoubleDouble>(z, mu, p, ctrl),
    })
}

/// `eta_{++}` and `eta_{-+}`: both series evaluated at `z = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfValues {
    pub eta_pp: SeriesEval,
    pub eta_mp: SeriesEval,
}

impl HalfValues {
    pub fn converged(&self) -> bool {
        self.eta_pp.converged && self.eta_mp.converged
    }

    pub fn terms_used(&self) -> usize {
        self.eta_pp.terms_used.max(self.eta_mp.terms_used)
    }
}

pub fn eta_at_half(p: PhysicalParams, ctrl: &SeriesControl) -> Result<HalfValues> {
    Ok(HalfValues {
        eta_pp: eta0(0.5, MuPair::PlusPlus, p, ctrl)?,
        eta_mp: eta0(0.5, MuPair::MinusPlus, p, ctrl)?,
    })
}
