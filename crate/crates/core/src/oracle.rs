//! Direct integration of the Schroedinger equation `i psi' = H(tau) psi`
//! with the classical fixed-step fourth-order Runge-Kutta scheme.
//!
//! Nothing here touches the Heun series; it is the reference every analytic
//! result is checked against.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{r_alpha, MonodromyData, QuarterData, Quasienergy};
use crate::params::PhysicalParams;
use crate::su2::{Mat2, SpinorState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub steps_per_period: usize,
}

impl IntegratorConfig {
    pub const DEFAULT_STEPS: usize = 20_000;
    pub const MIN_STEPS: usize = 100;

    pub fn new(steps_per_period: usize) -> Result<Self> {
        if steps_per_period < Self::MIN_STEPS {
            return Err(Error::InvalidParameter(format!(
                "steps_per_period must be at least {} (got {steps_per_period})",
                Self::MIN_STEPS
            )));
        }
        Ok(Self { steps_per_period })
    }

    fn steps_for(&self, span: f64) -> usize {
        ((self.steps_per_period as f64 * span / TAU) - 1e-9)
            .ceil()
            .max(1.0) as usize
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            steps_per_period: Self::DEFAULT_STEPS,
        }
    }
}

type Column = [Complex64; 2];

/// `-i H psi` with `s = f sin(tau)` precomputed.
#[inline]
fn rhs(s: f64, nu: f64, y: &Column) -> Column {
    let half_i = Complex64::new(0.0, -0.5);
    [
        half_i * (s * y[0] + nu * y[1]),
        half_i * (nu * y[0] - s * y[1]),
    ]
}

#[inline]
fn axpy(y: &Column, h: f64, k: &Column) -> Column {
    [y[0] + h * k[0], y[1] + h * k[1]]
}

fn advance(p: &PhysicalParams, tau0: f64, tau1: f64, steps: usize, cols: &mut [Column]) {
    let h = (tau1 - tau0) / steps as f64;
    let nu = p.nu;
    for i in 0..steps {
        let t = tau0 + i as f64 * h;
        let s0 = p.f * t.sin();
        let sm = p.f * (t + 0.5 * h).sin();
        let s1 = p.f * (t + h).sin();
        for y in cols.iter_mut() {
            let k1 = rhs(s0, nu, y);
            let k2 = rhs(sm, nu, &axpy(y, 0.5 * h, &k1));
            let k3 = rhs(sm, nu, &axpy(y, 0.5 * h, &k2));
            let k4 = rhs(s1, nu, &axpy(y, h, &k3));
            for c in 0..2 {
                y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
        }
    }
}

fn check_span(tau0: f64, tau1: f64) -> Result<()> {
    if !(tau0.is_finite() && tau1.is_finite()) || tau1 < tau0 {
        return Err(Error::InvalidParameter(format!(
            "integration requires finite tau1 >= tau0 (got {tau0} -> {tau1})"
        )));
    }
    Ok(())
}

/// `psi(tau1)` from `psi(tau0) = psi0`.
pub fn integrate(
    p: PhysicalParams,
    tau0: f64,
    tau1: f64,
    psi0: SpinorState,
    cfg: &IntegratorConfig,
) -> Result<SpinorState> {
    check_span(tau0, tau1)?;
    if tau1 == tau0 {
        return Ok(psi0);
    }
    let mut cols = [psi0.as_array()];
    advance(&p, tau0, tau1, cfg.steps_for(tau1 - tau0), &mut cols);
    Ok(SpinorState::new(cols[0][0], cols[0][1]))
}

/// `U(tau1, tau0)`, both columns integrated.
pub fn propagator(p: PhysicalParams, tau0: f64, tau1: f64, cfg: &IntegratorConfig) -> Result<Mat2> {
    check_span(tau0, tau1)?;
    let mut cols = [Mat2::IDENTITY.column(0), Mat2::IDENTITY.column(1)];
    if tau1 > tau0 {
        advance(&p, tau0, tau1, cfg.steps_for(tau1 - tau0), &mut cols);
    }
    Ok(Mat2::from_columns(cols[0], cols[1]))
}

/// `U(2 pi, 0)`.
pub fn numeric_monodromy(p: PhysicalParams, cfg: &IntegratorConfig) -> Result<Mat2> {
    propagator(p, 0.0, TAU, cfg)
}

/// `(r, alpha)` from the integrated state at `tau = pi/2`.
pub fn numeric_r_alpha(p: PhysicalParams, cfg: &IntegratorConfig) -> Result<MonodromyData> {
    let state = integrate(p, 0.0, PI / 2.0, SpinorState::UP, cfg)?;
    r_alpha(&QuarterData::from_state(state))
}

/// Eigenphase of `m`, in `[0, pi]`, assuming the special-unitary form.
///
/// For `[[A, -conj(B)], [B, conj(A)]]` the eigenvalues are
/// `Re A +- i sqrt(Im(A)^2 + |B|^2)`.
pub fn eigenphase(m: &Mat2) -> f64 {
    let a = 0.5 * (m.get(0, 0) + m.get(1, 1).conj());
    let b = 0.5 * (m.get(1, 0) - m.get(0, 1).conj());
    (a.im * a.im + b.norm_sqr()).sqrt().atan2(a.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericFloquet {
    pub half: Mat2,
    pub monodromy: Mat2,
    pub quasienergy: Quasienergy,
}

/// Monodromy and quasienergy by integrating over one period.
///
/// The magnitude comes from the eigenphases `exp(-+2 pi i eps)` of
/// `U(2 pi, 0)`; the sign follows `Im U(pi, 0)_{21}` so the convention
/// matches [`crate::floquet::quasienergy`].
pub fn numeric_floquet(p: PhysicalParams, cfg: &IntegratorConfig) -> Result<NumericFloquet> {
    let half = propagator(p, 0.0, PI, cfg)?;
    let second = propagator(p, PI, TAU, cfg)?;
    let monodromy = second * half;
    let magnitude = eigenphase(&monodromy) / TAU;
    let r = half.get(1, 0).im;
    let epsilon = if r > 0.0 { -magnitude } else { magnitude };
    Ok(NumericFloquet {
        half,
        monodromy,
        quasienergy: Quasienergy { epsilon },
    })
}

pub fn numeric_quasienergy(p: PhysicalParams, cfg: &IntegratorConfig) -> Result<Quasienergy> {
    Ok(numeric_floquet(p, cfg)?.quasienergy)
}

/// States from `(1, 0)` at the given increasing times, integrated piecewise.
pub fn numeric_trace(
    p: PhysicalParams,
    taus: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SpinorState>> {
    let mut out = Vec::with_capacity(taus.len());
    let mut state = SpinorState::UP;
    let mut at = 0.0;
    for &tau in taus {
        state = integrate(p, at, tau, state, cfg)?;
        at = tau;
        out.push(state);
    }
    Ok(out)
}

/// Residuals of the drive-symmetry identities evaluated on the numeric
/// propagator, at offset `s` for the two identities that take one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResiduals {
    /// `U(pi + s, pi) = T U(s, 0) T`.
    pub half_shift: f64,
    /// `U(2 pi, 0) = (T U(pi, 0))^2`.
    pub monodromy_square: f64,
    /// `U(pi, 0)_{12} = U(pi, 0)_{21}`, both imaginary.
    pub off_diagonal: f64,
    /// `U(pi/2, 0) = U(pi, pi/2)^T`.
    pub quarter_transpose: f64,
    /// `U(pi/2 + s, 0) = conj(U(pi/2 - s, 0)) U(pi, 0)` with `0 <= s <= pi/2`.
    pub reflection: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        [
            self.half_shift,
            self.monodromy_square,
            self.off_diagonal,
            self.quarter_transpose,
            self.reflection,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn symmetry_residuals(
    p: PhysicalParams,
    s: f64,
    cfg: &IntegratorConfig,
) -> Result<SymmetryResiduals> {
    if !(0.0..=PI / 2.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "symmetry offset must lie in [0, pi/2] (got {s})"
        )));
    }
    use crate::su2::TRANSPOSITION as T;
    let quarter = propagator(p, 0.0, PI / 2.0, cfg)?;
    let second_quarter = propagator(p, PI / 2.0, PI, cfg)?;
    let half = second_quarter * quarter;
    let full = propagator(p, PI, TAU, cfg)? * half;
    let th = T * half;

    let shifted = propagator(p, PI, PI + s, cfg)?;
    let early = propagator(p, 0.0, s, cfg)?;
    let late = propagator(p, 0.0, PI / 2.0 + s, cfg)?;
    let mirrored = propagator(p, 0.0, PI / 2.0 - s, cfg)?;

    let u12 = half.get(0, 1);
    let u21 = half.get(1, 0);
    Ok(SymmetryResiduals {
        half_shift: shifted.max_abs_diff(&(T * early * T)),
        monodromy_square: full.max_abs_diff(&(th * th)),
        off_diagonal: (u12 - u21).norm().max(u21.re.abs()),
        quarter_transpose: quarter.max_abs_diff(&second_quarter.transpose()),
        reflection: late.max_abs_diff(&(mirrored.conj() * half)),
    })
}
