//! Orbits `ν ↦ B_w^ν v`, limit-point detection and growth of monomial
//! orbits.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;

use crate::basis::monomial_norm;
use crate::config::WeightedShift;
use crate::error::{Error, Result};
use crate::numeric::{BasisTag, BilateralVector, NormKind, SignedLog};
use crate::shiftmatrix::{apply, ShiftImage};
use crate::verdict::Status;

/// Share of the norm mass in edge-tainted coordinates above which a record
/// is flagged.
pub const EDGE_DOMINATED: f64 = 0.25;
/// Hits needed below tolerance to call a candidate a limit point.
const MIN_HITS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    All,
    PowersOfTwo,
}

impl Schedule {
    pub fn as_str(self) -> &'static str {
        match self {
            Schedule::All => "all",
            Schedule::PowersOfTwo => "powers_of_two",
        }
    }

    /// Powers `ν <= steps` visited by the schedule, in increasing order.
    pub fn steps(self, steps: u64) -> Vec<i64> {
        match self {
            Schedule::All => (1..=steps as i64).collect(),
            Schedule::PowersOfTwo => std::iter::successors(Some(1i64), |k| k.checked_mul(2))
                .take_while(|k| *k as u64 <= steps)
                .collect(),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Schedule::All),
            "powers_of_two" => Ok(Schedule::PowersOfTwo),
            other => Err(Error::Config(format!("unknown schedule `{other}`"))),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub step: i64,
    pub norm: SignedLog,
    /// `‖B_w^ν v - c‖` for each candidate `c`.
    pub distances: Vec<f64>,
    /// Share of `‖B_w^ν v‖^p` carried by edge-tainted coordinates.
    pub edge_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRun {
    pub records: Vec<OrbitRecord>,
    pub schedule: Schedule,
    /// Some record has more than a quarter of its mass near the edges.
    pub edge_dominated: bool,
}

fn mass(norm: NormKind, values: impl Iterator<Item = SignedLog>) -> SignedLog {
    let n = norm.norm_of_logs(values);
    match norm {
        NormKind::Lp(p) => n.abs_pow(p),
        NormKind::C0 => n,
    }
}

fn record(
    op: &WeightedShift,
    nu: i64,
    image: &ShiftImage,
    candidates: &[BilateralVector],
) -> OrbitRecord {
    let norm_kind = op.norm();
    let norm = norm_kind.norm_of_logs(image.values.iter().copied());
    let total = mass(norm_kind, image.values.iter().copied());
    let edge = mass(
        norm_kind,
        image
            .values
            .iter()
            .zip(&image.tainted)
            .filter(|(_, t)| **t)
            .map(|(v, _)| *v),
    );
    let edge_fraction = if total.is_zero() {
        0.0
    } else {
        (edge / total).to_real()
    };
    let distances = candidates
        .par_iter()
        .map(|c| {
            let window = image.vector.window();
            let diff = window
                .indices()
                .zip(&image.values)
                .map(|(n, v)| *v - SignedLog::from_real(c.get(n)));
            norm_kind.norm_of_logs(diff).to_real()
        })
        .collect();
    OrbitRecord {
        step: nu,
        norm,
        distances,
        edge_fraction,
    }
}

/// Computes `B_w^ν v0` by the closed form for each `ν` of the schedule.
pub fn simulate_orbit(
    op: &WeightedShift,
    v0: &BilateralVector,
    steps: u64,
    candidates: &[BilateralVector],
    schedule: Schedule,
) -> Result<OrbitRun> {
    if v0.basis() != BasisTag::Schauder {
        return Err(Error::WrongBasis {
            expected: BasisTag::Schauder.as_str(),
            found: v0.basis().as_str(),
        });
    }
    let window = v0.window();
    if let Some((lo, _)) = v0.support() {
        let reach = lo - steps as i64;
        if reach < window.min() {
            return Err(Error::WindowTooSmall {
                needed: -reach,
                have: -window.min(),
            });
        }
    }
    let mut records = Vec::new();
    for nu in schedule.steps(steps) {
        let image = apply(op, nu, v0)?;
        records.push(record(op, nu, &image, candidates));
    }
    let edge_dominated = records.iter().any(|r| r.edge_fraction > EDGE_DOMINATED);
    Ok(OrbitRun {
        records,
        schedule,
        edge_dominated,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitPointReport {
    pub candidate: usize,
    pub detected: bool,
    /// Steps at which the distance was below tolerance.
    pub hits: Vec<i64>,
    pub min_distance: f64,
    /// Why the candidate was not considered.
    pub rejected: Option<String>,
}

/// A candidate is detected when at least three records fall below
/// `tolerance` and the last of them lies in the final quarter of the run.
pub fn detect_limit_point(
    run: &OrbitRun,
    candidates: &[BilateralVector],
    tolerance: f64,
) -> Vec<LimitPointReport> {
    let len = run.records.len();
    candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let dists: Vec<f64> = run.records.iter().map(|r| r.distances[i]).collect();
            let min_distance = dists.iter().copied().fold(f64::INFINITY, f64::min);
            let rejected = if c.is_zero() {
                Some("zero candidate: only nonzero limit points count".to_string())
            } else if len < MIN_HITS {
                Some(format!("need at least {MIN_HITS} records, have {len}"))
            } else {
                None
            };
            let hit_idx: Vec<usize> = dists
                .iter()
                .enumerate()
                .filter(|(_, d)| **d < tolerance)
                .map(|(k, _)| k)
                .collect();
            let detected = rejected.is_none()
                && hit_idx.len() >= MIN_HITS
                && hit_idx.last().is_some_and(|k| 4 * k >= 3 * (len - 1));
            LimitPointReport {
                candidate: i,
                detected,
                hits: hit_idx.iter().map(|k| run.records[*k].step).collect(),
                min_distance,
                rejected,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub j: i64,
    /// `‖B_w^n z^j‖` for `n = 1..=steps`.
    pub norms: Vec<SignedLog>,
    /// `‖B_w^{n+1} z^j‖ / ‖B_w^n z^j‖`.
    pub ratios: Vec<f64>,
    pub status: Status,
}

/// Growth of `‖B_w^n z^j‖ = |w_j⋯w_{j-n+1}| ‖z^{j-n}‖` for each `j`.
pub fn check_divergent_subspace(
    op: &WeightedShift,
    range: RangeInclusive<i64>,
    steps: u64,
) -> Result<Vec<DivergenceReport>> {
    range
        .map(|j| {
            let mut w = SignedLog::ONE;
            let mut norms = Vec::with_capacity(steps as usize);
            for n in 1..=steps as i64 {
                w = w * SignedLog::from_real(op.try_w(j - n + 1)?);
                let m = monomial_norm(op, j - n)?;
                norms.push(w.abs() * SignedLog::from_real(m.norm));
            }
            let ratios: Vec<f64> = norms.windows(2).map(|p| (p[1] / p[0]).to_real()).collect();
            let tail = &ratios[ratios.len() / 2..];
            let status = if tail.is_empty() {
                Status::Inconclusive
            } else if tail.iter().all(|r| *r > 1.0 + 1e-9) {
                Status::Holds
            } else if tail.iter().all(|r| *r <= 1.0 - 1e-12) {
                Status::Fails
            } else {
                Status::Inconclusive
            };
            Ok(DivergenceReport {
                j,
                norms,
                ratios,
                status,
            })
        })
        .collect()
}
