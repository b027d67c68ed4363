//! Quarter-period data, the auxiliary pair `(r, alpha)`, the half- and
//! full-period monodromy matrices and the quasienergy.
//!
//! The drive `f sin(tau)` is odd under `tau -> tau + pi` and even under
//! `tau -> pi - tau`. These two symmetries force the half-period propagator
//! into the form
//!
//! ```text
//! U(pi, 0) = [[ sqrt(1-r^2) e^{i alpha},  i r                      ],
//!             [ i r,                      sqrt(1-r^2) e^{-i alpha} ]]
//! ```
//!
//! and express it through the quarter-period propagator as
//! `U(pi, 0) = U(pi/2, 0)^T U(pi/2, 0)`, so the single column
//! `(a, b) = psi(pi/2)` fixes everything.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heun::{eta_at_half, HalfValues, SeriesControl};
use crate::params::{DimensionalParams, PhysicalParams};
use crate::su2::{EvolutionMatrix, SpinorState};

/// `|r| - 1` tolerated as roundoff and clamped away.
pub const R_CLAMP_TOL: f64 = 1e-8;

/// `|a^2 + b^2|` below which `alpha` is reported as zero.
pub const ALPHA_DEGENERACY_TOL: f64 = 1e-12;

/// `a = psi1(pi/2)` and `b = psi2(pi/2)` for the solution starting at `(1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarterData {
    pub a: Complex64,
    pub b: Complex64,
    pub converged: bool,
    pub terms_used: usize,
}

impl QuarterData {
    /// Quarter data from an exactly known (e.g. numerically integrated) state.
    pub fn from_state(state: SpinorState) -> Self {
        Self {
            a: state.psi1,
            b: state.psi2,
            converged: true,
            terms_used: 0,
        }
    }

    pub fn from_half_values(p: PhysicalParams, half: &HalfValues) -> Self {
        let phase = Complex64::from_polar(1.0, p.f / 2.0);
        let a = phase * half.eta_pp.value;
        let b = -Complex64::i() * p.nu * phase.conj() * FRAC_1_SQRT_2 * half.eta_mp.value.conj();
        Self {
            a,
            b,
            converged: half.converged(),
            terms_used: half.terms_used(),
        }
    }

    pub fn state(&self) -> SpinorState {
        SpinorState::new(self.a, self.b)
    }

    pub fn norm_error(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs()
    }
}

pub fn quarter_data(p: PhysicalParams, ctrl: &SeriesControl) -> Result<QuarterData> {
    let half = eta_at_half(p, ctrl)?;
    Ok(QuarterData::from_half_values(p, &half))
}

/// The auxiliary pair parameterizing `U(pi, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyData {
    /// `U(pi, 0)_{21} = i r`, in `[-1, 1]`.
    pub r: f64,
    /// Principal argument of `U(pi, 0)_{11}`, in `(-pi, pi]`.
    pub alpha: f64,
    /// Set when `U(pi, 0)_{11}` vanishes and `alpha` carries no information.
    pub alpha_degenerate: bool,
}

impl MonodromyData {
    /// Clamps `r` into `[-1, 1]` when it overshoots by at most [`R_CLAMP_TOL`].
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        if !r.is_finite() || r.abs() > 1.0 + R_CLAMP_TOL {
            return Err(Error::UnphysicalR(r));
        }
        Ok(Self {
            r: r.clamp(-1.0, 1.0),
            alpha,
            alpha_degenerate: false,
        })
    }

    /// `sqrt(1 - r^2)`.
    pub fn cos_part(&self) -> f64 {
        (1.0 - self.r * self.r).max(0.0).sqrt()
    }

    /// Eigenvalues `i r +- sqrt(1 - r^2)` of `T U(pi, 0)`; they do not depend
    /// on `alpha`.
    pub fn half_period_eigenvalues(&self) -> [Complex64; 2] {
        let c = self.cos_part();
        [Complex64::new(c, self.r), Complex64::new(-c, self.r)]
    }
}

/// `r = 2 Im(conj(a) b)`, `alpha = arg(a^2 + b^2)`.
pub fn r_alpha(q: &QuarterData) -> Result<MonodromyData> {
    let r = 2.0 * (q.a.conj() * q.b).im;
    let w = q.a * q.a + q.b * q.b;
    let mut m = MonodromyData::new(r, 0.0)?;
    if w.norm() < ALPHA_DEGENERACY_TOL {
        m.alpha_degenerate = true;
    } else {
        m.alpha = w.arg();
    }
    Ok(m)
}

/// The same pair written directly in terms of `eta_{++}` and `eta_{-+}`:
///
/// ```text
/// r     = -sqrt(2) nu Re(e^{if} eta_pp eta_mp)
/// alpha = arg(e^{if} eta_pp^2 - nu^2/2 e^{-if} conj(eta_mp)^2)
/// ```
///
/// No clamping or degeneracy handling; used to cross-check [`r_alpha`].
pub fn r_alpha_from_half_values(p: PhysicalParams, half: &HalfValues) -> (f64, f64) {
    let e = Complex64::from_polar(1.0, p.f);
    let (pp, mp) = (half.eta_pp.value, half.eta_mp.value);
    let r = -SQRT_2 * p.nu * (e * pp * mp).re;
    let w = e * pp * pp - p.nu * p.nu / 2.0 * e.conj() * mp.conj() * mp.conj();
    (r, w.arg())
}

/// Dimensionless quasienergy, principal value in `[-1/2, 1/2]`; the Floquet
/// pair is `(epsilon, -epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quasienergy {
    pub epsilon: f64,
}

impl Quasienergy {
    pub fn pair(&self) -> [f64; 2] {
        [self.epsilon, -self.epsilon]
    }

    /// `hbar omega epsilon`.
    pub fn physical(&self, omega: f64) -> f64 {
        omega * self.epsilon
    }
}

/// `epsilon = -arcsin(r) / pi`. The sign makes `epsilon -> nu/2` in the
/// undriven limit for `nu <= 1`.
pub fn quasienergy(m: &MonodromyData) -> Quasienergy {
    Quasienergy {
        // `+ 0.0` turns a negative zero into zero.
        epsilon: -m.r.clamp(-1.0, 1.0).asin() / PI + 0.0,
    }
}

pub fn half_monodromy(m: &MonodromyData) -> EvolutionMatrix {
    EvolutionMatrix::from_first_column(SpinorState::new(
        Complex64::from_polar(m.cos_part(), m.alpha),
        Complex64::new(0.0, m.r),
    ))
}

/// `U(2 pi, 0) = (T U(pi, 0))^2`.
pub fn full_monodromy(m: &MonodromyData) -> EvolutionMatrix {
    let off = 2.0 * m.r * m.cos_part();
    EvolutionMatrix::from_first_column(SpinorState::new(
        Complex64::new(1.0 - 2.0 * m.r * m.r, 0.0),
        Complex64::i() * Complex64::from_polar(off, m.alpha),
    ))
}

/// Everything the series route produces for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetSolution {
    pub params: PhysicalParams,
    pub half: HalfValues,
    pub quarter: QuarterData,
    pub monodromy: MonodromyData,
    pub quasienergy: Quasienergy,
}

impl FloquetSolution {
    pub fn converged(&self) -> bool {
        self.half.converged()
    }
}

/// Series route from `(f, nu)` to the quasienergy.
pub fn solve(p: PhysicalParams, ctrl: &SeriesControl) -> Result<FloquetSolution> {
    let half = eta_at_half(p, ctrl)?;
    let quarter = QuarterData::from_half_values(p, &half);
    let monodromy = r_alpha(&quarter)?;
    Ok(FloquetSolution {
        params: p,
        half,
        quarter,
        monodromy,
        quasienergy: quasienergy(&monodromy),
    })
}

/// One member `sign * E + n hbar omega` of the branch family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub n: i64,
    pub sign: i8,
    pub energy: f64,
}

/// `+-E + n omega` for every `n` in `n_range`, `+` before `-`.
pub fn branches_from_energy(energy: f64, omega: f64, n_range: RangeInclusive<i64>) -> Vec<Branch> {
    n_range
        .flat_map(|n| {
            [1i8, -1].map(|sign| Branch {
                n,
                sign,
                energy: f64::from(sign) * energy + n as f64 * omega,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFan {
    pub point: DimensionalParams,
    /// Physical quasienergy `hbar omega epsilon`.
    pub energy: f64,
    pub converged: bool,
    pub branches: Vec<Branch>,
}

pub fn branch_energies(
    d: &DimensionalParams,
    n_range: RangeInclusive<i64>,
    ctrl: &SeriesControl,
) -> Result<BranchFan> {
    let sol = solve(d.physical(), ctrl)?;
    let energy = d.energy(sol.quasienergy.epsilon);
    Ok(BranchFan {
        point: *d,
        energy,
        converged: sol.converged(),
        branches: branches_from_energy(energy, d.omega, n_range),
    })
}
