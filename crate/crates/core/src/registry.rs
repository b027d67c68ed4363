//! Quasienergy methods selectable by name at runtime.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{solve, Quasienergy};
use crate::heun::SeriesControl;
use crate::limits::{bessel_j0, quasienergy_small_nu};
use crate::oracle::{numeric_quasienergy, numeric_r_alpha, IntegratorConfig};
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub quasienergy: Quasienergy,
    pub r: f64,
    /// `None` when the method does not produce the phase.
    pub alpha: Option<f64>,
    pub terms_used: usize,
    pub converged: bool,
}

pub trait QuasienergyMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, p: PhysicalParams) -> Result<MethodResult>;
}

/// Knobs shared by all built-in methods; each reads what it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MethodSettings {
    pub series: SeriesControl,
    pub integrator: IntegratorConfig,
}

pub type Factory = fn(&MethodSettings) -> Box<dyn QuasienergyMethod>;

struct Entry {
    description: &'static str,
    factory: Factory,
}

pub struct Registry {
    entries: BTreeMap<&'static str, Entry>,
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// `heun`, `oracle` and `small-nu`.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("heun", "confluent Heun series at z = 1/2", |s| {
            Box::new(HeunSeries { ctrl: s.series })
        });
        reg.register("oracle", "fixed-step RK4 over one period", |s| {
            Box::new(Oracle { cfg: s.integrator })
        });
        reg.register("small-nu", "leading order in the static field", |_| {
            Box::new(SmallNu)
        });
        reg
    }

    /// Adds or replaces `name`.
    pub fn register(&mut self, name: &'static str, description: &'static str, factory: Factory) {
        self.entries.insert(
            name,
            Entry {
                description,
                factory,
            },
        );
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries
            .iter()
            .map(|(k, e)| (*k, e.description))
            .collect()
    }

    pub fn create(
        &self,
        name: &str,
        settings: &MethodSettings,
    ) -> Result<Box<dyn QuasienergyMethod>> {
        match self.entries.get(name) {
            Some(e) => Ok((e.factory)(settings)),
            None => Err(Error::UnknownMethod {
                name: name.to_string(),
                available: self.names().join(", "),
            }),
        }
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

struct HeunSeries {
    ctrl: SeriesControl,
}

impl QuasienergyMethod for HeunSeries {
    fn name(&self) -> &'static str {
        "heun"
    }

    fn evaluate(&self, p: PhysicalParams) -> Result<MethodResult> {
        let sol = solve(p, &self.ctrl)?;
        Ok(MethodResult {
            quasienergy: sol.quasienergy,
            r: sol.monodromy.r,
            alpha: Some(sol.monodromy.alpha),
            terms_used: sol.half.terms_used(),
            converged: sol.converged(),
        })
    }
}

struct Oracle {
    cfg: IntegratorConfig,
}

impl QuasienergyMethod for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn evaluate(&self, p: PhysicalParams) -> Result<MethodResult> {
        let m = numeric_r_alpha(p, &self.cfg)?;
        Ok(MethodResult {
            quasienergy: numeric_quasienergy(p, &self.cfg)?,
            r: m.r,
            alpha: Some(m.alpha),
            terms_used: 0,
            converged: true,
        })
    }
}

struct SmallNu;

impl QuasienergyMethod for SmallNu {
    fn name(&self) -> &'static str {
        "small-nu"
    }

    fn evaluate(&self, p: PhysicalParams) -> Result<MethodResult> {
        Ok(MethodResult {
            quasienergy: Quasienergy {
                epsilon: quasienergy_small_nu(p.f, p.nu)?,
            },
            r: -FRAC_PI_2 * p.nu * bessel_j0(p.f)?,
            alpha: None,
            terms_used: 0,
            converged: true,
        })
    }
}
