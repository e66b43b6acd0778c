//! Exact checks of proved inequalities and open conjectures, and sweeps
//! over catalogs.
//!
//! Proved statements carry [`Severity::Theorem`] and a failure means a bug;
//! conjectures carry [`Severity::Conjecture`] and a failure is a discovery;
//! `O(·)` statements are [`Severity::Report`] and only report extremal values.

mod checks;
mod sweep;

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::balance::BalanceConfig;
use crate::engine::{exact_stats_with, Caps, ExtensionStats};
use crate::error::{Error, Result};
use crate::geometry::{geometry_from, GeometryReport};
use crate::lattice::IdealLattice;
use crate::poset::Poset;
use crate::rational::{from_int, Rational};
use crate::report::{CheckReport, Severity, Status};

pub use sweep::{summarize, summary_table, sweep, to_json_lines, SummaryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Xyz,
    Fishburn,
    Tsumwin,
    Tehs,
    Lsks,
    LogConcavity,
    GrunbaumPairs,
    Efxy,
    Cl1,
    WinH,
    CornerBounds,
    WinVariance,
    A1Full,
    OneThird,
    ConjA1,
    ConjWinVar,
    ConjIncreaseH,
    ConjGapW,
    ConjGapTau,
    HDeleteX,
}

impl Check {
    pub const ALL: [Check; 20] = [
        Check::Xyz,
        Check::Fishburn,
        Check::Tsumwin,
        Check::Tehs,
        Check::Lsks,
        Check::LogConcavity,
        Check::GrunbaumPairs,
        Check::Efxy,
        Check::Cl1,
        Check::WinH,
        Check::CornerBounds,
        Check::WinVariance,
        Check::A1Full,
        Check::OneThird,
        Check::ConjA1,
        Check::ConjWinVar,
        Check::ConjIncreaseH,
        Check::ConjGapW,
        Check::ConjGapTau,
        Check::HDeleteX,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Xyz => "xyz",
            Check::Fishburn => "fishburn",
            Check::Tsumwin => "tsumwin",
            Check::Tehs => "tehs",
            Check::Lsks => "lsks",
            Check::LogConcavity => "logconcavity",
            Check::GrunbaumPairs => "grunbaum-pairs",
            Check::Efxy => "efxy",
            Check::Cl1 => "cl1",
            Check::WinH => "winh",
            Check::CornerBounds => "corner-bounds",
            Check::WinVariance => "win-variance",
            Check::A1Full => "a1-full",
            Check::OneThird => "one-third",
            Check::ConjA1 => "conj-a1",
            Check::ConjWinVar => "conj-winvar",
            Check::ConjIncreaseH => "conj-increase-h",
            Check::ConjGapW => "conj-gapw",
            Check::ConjGapTau => "conj-gaptau",
            Check::HDeleteX => "hdeletex",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Check::OneThird | Check::ConjA1 | Check::ConjWinVar | Check::ConjIncreaseH => Severity::Conjecture,
            Check::ConjGapW | Check::ConjGapTau | Check::HDeleteX => Severity::Report,
            _ => Severity::Theorem,
        }
    }

    /// Parses a comma-separated list; `all`, `theorems`, `conjectures` and
    /// `reports` expand to groups. Duplicates are dropped, order is canonical.
    pub fn parse_list(s: &str) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "all" => out.extend(Check::ALL),
                "theorems" => out.extend(Check::ALL.iter().filter(|c| c.severity() == Severity::Theorem)),
                "conjectures" => out.extend(Check::ALL.iter().filter(|c| c.severity() == Severity::Conjecture)),
                "reports" => out.extend(Check::ALL.iter().filter(|c| c.severity() == Severity::Report)),
                name => out.push(name.parse()?),
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
            Error::InvalidArgument(format!("unknown check `{s}` (known: {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub caps: Caps,
    pub balance: BalanceConfig,
    /// Fishburn pairs are only enumerated up to this size.
    pub fishburn_max_n: usize,
    /// Largest |Y| in the XYZ check.
    pub xyz_max_y: usize,
    /// Ideal splits whose h-gap reaches this value are examined for τ-witnesses.
    pub gaptau_threshold: Rational,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            caps: Caps::default(),
            balance: BalanceConfig::default(),
            fishburn_max_n: 6,
            xyz_max_y: 4,
            gaptau_threshold: from_int(2),
        }
    }
}

/// One poset with lazily computed, shared intermediate results.
pub struct Context<'a> {
    pub poset: &'a Poset,
    pub config: &'a VerifyConfig,
    lattice: OnceCell<Result<IdealLattice>>,
    stats: OnceCell<Result<ExtensionStats>>,
    deletions: OnceCell<Result<Vec<ExtensionStats>>>,
    geometry: OnceCell<Result<GeometryReport>>,
}

impl<'a> Context<'a> {
    pub fn new(poset: &'a Poset, config: &'a VerifyConfig) -> Self {
        Context {
            poset,
            config,
            lattice: OnceCell::new(),
            stats: OnceCell::new(),
            deletions: OnceCell::new(),
            geometry: OnceCell::new(),
        }
    }

    pub fn lattice(&self) -> Result<&IdealLattice> {
        self.lattice
            .get_or_init(|| IdealLattice::build(self.poset, self.config.caps.ideal_cap))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn stats(&self) -> Result<&ExtensionStats> {
        self.stats
            .get_or_init(|| Ok(exact_stats_with(self.poset, self.lattice()?, self.config.caps.enum_cap)))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Lattice statistics of `P - x` for every x (element `y` of P is
    /// element `y - [y > x]` of `P - x`).
    pub fn deletions(&self) -> Result<&[ExtensionStats]> {
        self.deletions
            .get_or_init(|| {
                (0..self.poset.n())
                    .map(|x| {
                        let q = self.poset.delete(x)?;
                        let l = IdealLattice::build(&q, self.config.caps.ideal_cap)?;
                        Ok(exact_stats_with(&q, &l, 0))
                    })
                    .collect()
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    pub fn deletion_counts(&self) -> Result<Vec<BigUint>> {
        Ok(self.deletions()?.iter().map(|s| s.e.clone()).collect())
    }

    pub fn geometry(&self) -> Result<&GeometryReport> {
        self.geometry
            .get_or_init(|| Ok(geometry_from(self.stats()?, &self.deletion_counts()?)))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn run(&self, check: Check) -> CheckReport {
        checks::run(self, check).unwrap_or_else(|e| {
            CheckReport::new(check.name(), check.severity(), Status::Error, self.poset.n()).with_note(e.to_string())
        })
    }
}

/// Runs `checks` on one poset, in the given order. Witness elements refer to
/// the poset's own labels.
pub fn run_checks(p: &Poset, checks: &[Check], config: &VerifyConfig) -> Vec<CheckReport> {
    let ctx = Context::new(p, config);
    checks.iter().map(|&c| ctx.run(c)).collect()
}

pub fn run_check(p: &Poset, check: Check, config: &VerifyConfig) -> CheckReport {
    Context::new(p, config).run(check)
}
