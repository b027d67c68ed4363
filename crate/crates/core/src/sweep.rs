//! Parameter sweeps: the barycentric simplex grid, series-vs-reference
//! comparisons over it, and branch fans with their gap minima.

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{branches_from_energy, solve};
use crate::heun::SeriesControl;
use crate::params::{DimensionalParams, MIN_SCALED_OMEGA};
use crate::registry::{MethodSettings, Registry};

/// Interior point `(i, j, k) / depth` of the barycentric lattice, mapped to
/// `(omega0, omega, F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub index: [usize; 3],
    pub params: DimensionalParams,
}

/// Interior lattice points of the triangle `omega0 + omega + F = 1`, ordered
/// by `(i, j)`, keeping those with `omega > omega_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexGrid {
    pub depth: usize,
    pub omega_min: f64,
    pub points_total: usize,
    pub points: Vec<GridPoint>,
}

impl SimplexGrid {
    pub fn new(depth: usize, omega_min: f64) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidParameter("depth must be at least 1".into()));
        }
        if !omega_min.is_finite() {
            return Err(Error::InvalidParameter("omega_min must be finite".into()));
        }
        let d = depth as f64;
        let mut points_total = 0;
        let mut points = Vec::new();
        for i in 1..depth {
            for j in 1..depth - i {
                let k = depth - i - j;
                points_total += 1;
                let omega = j as f64 / d;
                if omega > omega_min {
                    points.push(GridPoint {
                        index: [i, j, k],
                        params: DimensionalParams {
                            omega0: i as f64 / d,
                            omega,
                            f_amp: k as f64 / d,
                        },
                    });
                }
            }
        }
        Ok(Self {
            depth,
            omega_min,
            points_total,
            points,
        })
    }

    pub fn points_kept(&self) -> usize {
        self.points.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub method: String,
    /// Method compared against, if any.
    pub reference: Option<String>,
    pub settings: MethodSettings,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            method: "heun".into(),
            reference: None,
            settings: MethodSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub point: DimensionalParams,
    pub eps_series: f64,
    pub eps_oracle: Option<f64>,
    pub deviation: Option<f64>,
    pub terms_used: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub max_deviation: Option<f64>,
    pub points_total: usize,
    pub points_kept: usize,
    pub terms: usize,
    pub depth: usize,
    pub omega_min: f64,
    pub method: String,
    pub reference: Option<String>,
    pub unconverged: usize,
}

/// Evaluates every grid point. A point whose evaluation fails is kept with
/// `converged = false` and NaN values rather than aborting the sweep.
pub fn run_sweep(
    grid: &SimplexGrid,
    cfg: &SweepConfig,
    registry: &Registry,
) -> Result<(Vec<SweepRecord>, SweepSummary)> {
    let method = registry.create(&cfg.method, &cfg.settings)?;
    let reference = cfg
        .reference
        .as_deref()
        .map(|name| registry.create(name, &cfg.settings))
        .transpose()?;

    let records: Vec<SweepRecord> = grid
        .points
        .par_iter()
        .map(|gp| {
            let p = gp.params.physical();
            let (eps_series, terms_used, mut converged) = match method.evaluate(p) {
                Ok(m) => (m.quasienergy.epsilon, m.terms_used, m.converged),
                Err(_) => (f64::NAN, 0, false),
            };
            let eps_oracle = reference.as_ref().map(|r| match r.evaluate(p) {
                Ok(m) => m.quasienergy.epsilon,
                Err(_) => {
                    converged = false;
                    f64::NAN
                }
            });
            SweepRecord {
                point: gp.params,
                eps_series,
                eps_oracle,
                deviation: eps_oracle.map(|o| (eps_series - o).abs()),
                terms_used,
                converged,
            }
        })
        .collect();

    let max_deviation = cfg.reference.as_ref().map(|_| {
        records
            .iter()
            .filter_map(|r| r.deviation)
            .fold(
                0.0,
                |acc: f64, d| if d.is_nan() { f64::NAN } else { acc.max(d) },
            )
    });
    let summary = SweepSummary {
        max_deviation,
        points_total: grid.points_total,
        points_kept: grid.points_kept(),
        terms: cfg.settings.series.max_terms,
        depth: grid.depth,
        omega_min: grid.omega_min,
        method: cfg.method.clone(),
        reference: cfg.reference.clone(),
        unconverged: records.iter().filter(|r| !r.converged).count(),
    };
    Ok((records, summary))
}

#[derive(Serialize)]
struct SweepRow {
    omega0: f64,
    omega: f64,
    #[serde(rename = "F")]
    f_amp: f64,
    f: f64,
    nu: f64,
    eps_series: f64,
    eps_oracle: Option<f64>,
    deviation: Option<f64>,
    terms_used: usize,
    converged: bool,
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        let p = r.point.physical();
        w.serialize(SweepRow {
            omega0: r.point.omega0,
            omega: r.point.omega,
            f_amp: r.point.f_amp,
            f: p.f,
            nu: p.nu,
            eps_series: r.eps_series,
            eps_oracle: r.eps_oracle,
            deviation: r.deviation,
            terms_used: r.terms_used,
            converged: r.converged,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Frequency axis and branch indices of a branch fan at fixed `omega0`, `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchScan {
    pub omega0: f64,
    pub f_amp: f64,
    pub omega_from: f64,
    pub omega_to: f64,
    pub samples: usize,
    pub n_range: RangeInclusive<i64>,
}

impl BranchScan {
    pub fn omegas(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.omega_from];
        }
        let step = (self.omega_to - self.omega_from) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| self.omega_from + k as f64 * step)
            .collect()
    }

    /// Errors unless the range is well formed and, without `force`, every
    /// frequency passes the accuracy guard.
    pub fn validate(&self, force: bool) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        if !(self.omega_from > 0.0 && self.omega_to >= self.omega_from) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < omega_from <= omega_to (got {} .. {})",
                self.omega_from, self.omega_to
            )));
        }
        if self.n_range.is_empty() {
            return Err(Error::InvalidParameter("empty n range".into()));
        }
        // The scaled frequency grows with omega, so the lower end decides.
        let low = DimensionalParams::new(self.omega0, self.omega_from, self.f_amp)?;
        if !force && low.scaled_omega() <= MIN_SCALED_OMEGA {
            return Err(Error::InvalidParameter(format!(
                "scaled frequency {} at omega = {} is below the accuracy guard 3/128",
                low.scaled_omega(),
                self.omega_from
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub omega: f64,
    pub n: i64,
    pub sign: i8,
    pub energy: f64,
}

/// Branch energies `+-E(omega) + n omega` on the scan grid, plus whether
/// every series evaluation converged.
pub fn branch_rows(scan: &BranchScan, ctrl: &SeriesControl) -> Result<(Vec<BranchRow>, bool)> {
    let per_omega: Vec<(Vec<BranchRow>, bool)> = scan
        .omegas()
        .par_iter()
        .map(|&omega| {
            let d = DimensionalParams::new(scan.omega0, omega, scan.f_amp)?;
            let sol = solve(d.physical(), ctrl)?;
            let energy = d.energy(sol.quasienergy.epsilon);
            let rows = branches_from_energy(energy, omega, scan.n_range.clone())
                .into_iter()
                .map(|b| BranchRow {
                    omega,
                    n: b.n,
                    sign: b.sign,
                    energy: b.energy,
                })
                .collect();
            Ok((rows, sol.converged()))
        })
        .collect::<Result<_>>()?;
    let converged = per_omega.iter().all(|(_, c)| *c);
    Ok((
        per_omega.into_iter().flat_map(|(r, _)| r).collect(),
        converged,
    ))
}

pub fn write_branch_csv<W: Write>(rows: &[BranchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Smallest distance between two distinct members of the branch family at
/// `omega`: `omega * min(2|eps|, 1 - 2|eps|)`.
pub fn branch_gap(omega0: f64, omega: f64, f_amp: f64, ctrl: &SeriesControl) -> Result<f64> {
    let d = DimensionalParams::new(omega0, omega, f_amp)?;
    let eps = solve(d.physical(), ctrl)?.quasienergy.epsilon.abs();
    Ok(omega * (2.0 * eps).min(1.0 - 2.0 * eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub omega: f64,
    pub gap: f64,
    pub bracket: [f64; 2],
}

const GOLDEN_TOL: f64 = 1e-10;

fn golden_section(mut a: f64, mut b: f64, g: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    while b - a > GOLDEN_TOL {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, g(x)?))
}

/// Local minima of [`branch_gap`] over the scan grid, each refined by
/// golden-section search on the bracket formed by its grid neighbours.
pub fn gap_minima(scan: &BranchScan, ctrl: &SeriesControl) -> Result<Vec<GapMinimum>> {
    let omegas = scan.omegas();
    let gaps: Vec<f64> = omegas
        .par_iter()
        .map(|&w| branch_gap(scan.omega0, w, scan.f_amp, ctrl))
        .collect::<Result<_>>()?;
    let g = |w: f64| branch_gap(scan.omega0, w, scan.f_amp, ctrl);
    let mut out = Vec::new();
    for k in 1..omegas.len().saturating_sub(1) {
        if gaps[k] <= gaps[k - 1] && gaps[k] < gaps[k + 1] {
            let bracket = [omegas[k - 1], omegas[k + 1]];
            let (omega, gap) = golden_section(bracket[0], bracket[1], g)?;
            out.push(GapMinimum {
                omega,
                gap,
                bracket,
            });
        }
    }
    Ok(out)
}
