//! Full time evolution rebuilt from the first quarter-period.
//!
//! On `[0, pi/2]` the propagator comes straight from the two Heun series at
//! `z = sin^2(tau/2) <= 1/2`:
//!
//! ```text
//! psi1(tau) = e^{ifz} eta0(z, 1/2, 1/2)
//! psi2(tau) = -i nu e^{-ifz} sin(tau/2) conj(eta0(z, -1/2, 1/2))
//! ```
//!
//! The rest of the period is glued on with
//!
//! ```text
//! U(pi/2 + s, 0) = conj(U(pi/2 - s, 0)) U(pi, 0)     s in [0, pi/2]
//! U(pi + s, 0)   = T U(s, 0) T U(pi, 0)               s in [0, pi]
//! U(2 pi k + s)  = U(s, 0) U(2 pi, 0)^k
//! ```
//!
//! and `U(pi, 0)` is rebuilt from `(r, alpha)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{self, half_monodromy, MonodromyData};
use crate::heun::{eta0, SeriesControl};
use crate::params::{MuPair, PhysicalParams};
use crate::su2::{EvolutionMatrix, SpinorState};

/// Dimensionless time split into whole periods and a remainder in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTime {
    pub tau: f64,
    pub periods: i64,
    pub reduced: f64,
}

impl PhaseTime {
    pub fn new(tau: f64) -> Self {
        let reduced = tau.rem_euclid(TAU);
        let periods = ((tau - reduced) / TAU).round() as i64;
        Self {
            tau,
            periods,
            reduced,
        }
    }

    /// `z = sin^2(tau/2)` of the reduced time.
    pub fn z(&self) -> f64 {
        let s = (self.reduced / 2.0).sin();
        s * s
    }
}

impl From<f64> for PhaseTime {
    fn from(tau: f64) -> Self {
        PhaseTime::new(tau)
    }
}

/// A propagator or state together with the convergence of the series
/// that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluated<T> {
    pub value: T,
    pub converged: bool,
}

impl<T> Evaluated<T> {
    fn map<U>(self, f: impl FnOnce(T) -> U) -> Evaluated<U> {
        Evaluated {
            value: f(self.value),
            converged: self.converged,
        }
    }
}

const SEAM_SLACK: f64 = 1e-12;

pub fn state_first_quarter(
    tau: f64,
    p: PhysicalParams,
    ctrl: &SeriesControl,
) -> Result<Evaluated<SpinorState>> {
    if !(-SEAM_SLACK..=FRAC_PI_2 + SEAM_SLACK).contains(&tau) {
        return Err(Error::Domain {
            function: "state_first_quarter",
            value: tau,
            reason: "requires 0 <= tau <= pi/2",
        });
    }
    let tau = tau.clamp(0.0, FRAC_PI_2);
    let sin_half = (tau / 2.0).sin();
    let z = sin_half * sin_half;
    let regular = eta0(z, MuPair::PlusPlus, p, ctrl)?;
    let singular = eta0(z, MuPair::MinusPlus, p, ctrl)?;
    let phase = Complex64::from_polar(1.0, p.f * z);
    let psi1 = phase * regular.value;
    let psi2 = -Complex64::i() * p.nu * phase.conj() * sin_half * singular.value.conj();
    Ok(Evaluated {
        value: SpinorState::new(psi1, psi2),
        converged: regular.converged && singular.converged,
    })
}

fn first_quarter(
    tau: f64,
    p: PhysicalParams,
    ctrl: &SeriesControl,
) -> Result<Evaluated<EvolutionMatrix>> {
    Ok(state_first_quarter(tau, p, ctrl)?.map(EvolutionMatrix::from_first_column))
}

/// `U(tau, 0)` on `[pi/2, pi]` by reflection about the quarter period.
fn second_quarter(
    tau: f64,
    p: PhysicalParams,
    half: &EvolutionMatrix,
    ctrl: &SeriesControl,
) -> Result<Evaluated<EvolutionMatrix>> {
    Ok(first_quarter(PI - tau, p, ctrl)?.map(|u| u.conj() * *half))
}

fn first_half(
    tau: f64,
    p: PhysicalParams,
    half: &EvolutionMatrix,
    ctrl: &SeriesControl,
) -> Result<Evaluated<EvolutionMatrix>> {
    if tau <= FRAC_PI_2 {
        first_quarter(tau, p, ctrl)
    } else {
        second_quarter(tau, p, half, ctrl)
    }
}

/// `U(tau, 0)` on `[pi, 2 pi]` from the first half-period.
fn second_half(
    tau: f64,
    p: PhysicalParams,
    half: &EvolutionMatrix,
    ctrl: &SeriesControl,
) -> Result<Evaluated<EvolutionMatrix>> {
    Ok(first_half(tau - PI, p, half, ctrl)?.map(|u| u.swap_conjugated() * *half))
}

/// `U(2 pi, 0)^k`.
///
/// The monodromy has eigenvalues `exp(+-i theta)` with
/// `theta = 2 arcsin|r|`, so its powers are
/// `(cos(k theta), i sgn(r) e^{i alpha} sin(k theta))` in first-column form.
pub fn monodromy_power(m: &MonodromyData, k: i64) -> EvolutionMatrix {
    let theta = 2.0 * m.r.abs().min(1.0).asin();
    let angle = k as f64 * theta;
    let sign = if m.r < 0.0 { -1.0 } else { 1.0 };
    EvolutionMatrix::from_first_column(SpinorState::new(
        Complex64::new(angle.cos(), 0.0),
        Complex64::i() * Complex64::from_polar(sign * angle.sin(), m.alpha),
    ))
}

/// `U(tau, 0)` for any `tau`.
pub fn evolution_matrix(
    tau: PhaseTime,
    p: PhysicalParams,
    m: &MonodromyData,
    ctrl: &SeriesControl,
) -> Result<Evaluated<EvolutionMatrix>> {
    let half = half_monodromy(m);
    let s = tau.reduced;
    let within = if s <= PI {
        first_half(s, p, &half, ctrl)?
    } else {
        second_half(s, p, &half, ctrl)?
    };
    if tau.periods == 0 {
        return Ok(within);
    }
    Ok(within.map(|u| u * monodromy_power(m, tau.periods)))
}

/// `psi(tau)` for the initial state `(1, 0)`.
pub fn state_any(
    tau: PhaseTime,
    p: PhysicalParams,
    m: &MonodromyData,
    ctrl: &SeriesControl,
) -> Result<Evaluated<SpinorState>> {
    Ok(evolution_matrix(tau, p, m, ctrl)?.map(|u| u.first_column()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub tau: f64,
    pub state: SpinorState,
    pub converged: bool,
}

/// Uniform grid of `samples` points over `[0, 2 pi]`, both ends included.
pub fn tau_grid(samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|j| {
            if j + 1 == samples {
                TAU
            } else {
                TAU * j as f64 / (samples - 1) as f64
            }
        })
        .collect()
}

pub fn trace(
    p: PhysicalParams,
    m: &MonodromyData,
    samples: usize,
    ctrl: &SeriesControl,
) -> Result<Vec<TracePoint>> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "a trace needs at least 2 samples (got {samples})"
        )));
    }
    tau_grid(samples)
        .into_par_iter()
        .map(|tau| {
            let s = state_any(PhaseTime::new(tau), p, m, ctrl)?;
            Ok(TracePoint {
                tau,
                state: s.value,
                converged: s.converged,
            })
        })
        .collect()
}

/// Parameters, series control and the derived `(r, alpha)` in one place.
#[derive(Debug, Clone, Copy)]
pub struct TimeEvolution {
    pub params: PhysicalParams,
    pub monodromy: MonodromyData,
    pub ctrl: SeriesControl,
    /// Whether the `z = 1/2` series behind `(r, alpha)` converged.
    pub converged: bool,
}

impl TimeEvolution {
    pub fn new(params: PhysicalParams, ctrl: SeriesControl) -> Result<Self> {
        let sol = floquet::solve(params, &ctrl)?;
        Ok(Self {
            params,
            monodromy: sol.monodromy,
            ctrl,
            converged: sol.converged(),
        })
    }

    pub fn matrix(&self, tau: f64) -> Result<Evaluated<EvolutionMatrix>> {
        evolution_matrix(
            PhaseTime::new(tau),
            self.params,
            &self.monodromy,
            &self.ctrl,
        )
    }

    pub fn state(&self, tau: f64) -> Result<Evaluated<SpinorState>> {
        state_any(
            PhaseTime::new(tau),
            self.params,
            &self.monodromy,
            &self.ctrl,
        )
    }

    pub fn trace(&self, samples: usize) -> Result<Vec<TracePoint>> {
        trace(self.params, &self.monodromy, samples, &self.ctrl)
    }
}
