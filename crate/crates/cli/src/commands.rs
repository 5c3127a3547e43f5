//! One function per subcommand; each returns the text to emit.

use anyhow::Result;

use bwshift::report::{format_float, Json};
use bwshift::{
    analyze as run_analysis, assemble_matrix, coefficient_functional_bound, decompose,
    detect_limit_point, essential_spectrum_estimate, monomial_norm, schauder_from_laurent,
    simulate_orbit, BasisTag, BilateralVector, ExperimentConfig, NormKind, Schedule, VectorSpec,
    WeightedShift, Window,
};

use crate::{inline_or_file, usage, Format, OrbitOpts};

const DEFAULT_STEPS: u64 = 16;
const DEFAULT_TOLERANCE: f64 = 1e-3;
const DEFAULT_I_MAX: usize = 60;
const DEFAULT_NORM_RANGE: (i64, i64) = (-4, 4);
/// Default candidates are `e_n` for `|n| <= DEFAULT_CANDIDATE_RADIUS`.
const DEFAULT_CANDIDATE_RADIUS: i64 = 2;

fn build(cfg: &ExperimentConfig) -> Result<WeightedShift> {
    Ok(WeightedShift::new(cfg.shift.clone())?)
}

fn json_only(format: Option<Format>, what: &str) -> Result<()> {
    match format {
        Some(Format::Csv) => Err(usage(format!("{what} only supports --format json"))),
        _ => Ok(()),
    }
}

fn norm_label(n: NormKind) -> Json {
    match n {
        NormKind::Lp(p) => Json::Num(p),
        NormKind::C0 => Json::Str("c0".to_string()),
    }
}

fn space_json(op: &WeightedShift) -> Json {
    let w = op.window();
    Json::obj()
        .with("p", norm_label(op.norm()))
        .with("basis_variant", op.variant().as_str())
        .with("window", vec![w.min(), w.max()])
}

pub fn analyze(cfg: &ExperimentConfig, format: Option<Format>) -> Result<String> {
    json_only(format, "analyze")?;
    let op = build(cfg)?;
    Ok(run_analysis(&op, &cfg.analysis)?.to_json().render())
}

pub fn validate(cfg: &ExperimentConfig, format: Option<Format>) -> Result<String> {
    json_only(format, "validate")?;
    let op = build(cfg)?;
    let doc = Json::obj()
        .with("valid", true)
        .with("space", space_json(&op))
        .with("validation", op.validation().to_json());
    Ok(doc.render())
}

pub fn norms(
    cfg: &ExperimentConfig,
    range: Option<(i64, i64)>,
    format: Option<Format>,
) -> Result<String> {
    let op = build(cfg)?;
    let (lo, hi) = range.unwrap_or(DEFAULT_NORM_RANGE);
    let mut rows = Vec::new();
    for nu in lo..=hi {
        let m = monomial_norm(&op, nu)?;
        let bound = coefficient_functional_bound(&op, nu)?;
        rows.push((m, bound));
    }
    Ok(match format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut out = String::from("nu,norm,member,terms,functional_bound\n");
            for (m, bound) in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    m.nu,
                    format_float(m.norm),
                    m.member,
                    m.terms,
                    format_float(*bound)
                ));
            }
            out
        }
        Format::Json => {
            let items = rows
                .iter()
                .map(|(m, bound)| {
                    Json::obj()
                        .with("nu", m.nu)
                        .with("norm", m.norm)
                        .with("member", m.member)
                        .with("terms", m.terms)
                        .with("functional_bound", *bound)
                })
                .collect::<Vec<_>>();
            Json::obj()
                .with("space", space_json(&op))
                .with("monomials", items)
                .render()
        }
    })
}

pub fn matrix(
    cfg: &ExperimentConfig,
    power: Option<i64>,
    i_max: Option<usize>,
    format: Option<Format>,
) -> Result<String> {
    let op = build(cfg)?;
    let req = cfg.matrix.unwrap_or_default();
    let power = power.or(req.power).unwrap_or(1);
    let i_max = i_max.or(req.i_max).unwrap_or(DEFAULT_I_MAX);
    let m = assemble_matrix(&op, power)?;
    Ok(match format.unwrap_or(Format::Json) {
        Format::Csv => m.to_csv(),
        Format::Json => {
            let dec = decompose(&op, i_max)?;
            let spectrum = essential_spectrum_estimate(&dec).ok();
            Json::obj()
                .with("space", space_json(&op))
                .with("power", power)
                .with("decomposition", dec.to_json(spectrum.as_ref()))
                .render()
        }
    })
}

/// Converts a user vector to Schauder coordinates on `window`.
fn to_schauder(op: &WeightedShift, spec: &VectorSpec, window: Window) -> Result<BilateralVector> {
    let v = spec.to_vector(window)?;
    Ok(match v.basis() {
        BasisTag::Schauder => v,
        BasisTag::Laurent => schauder_from_laurent(op, &v)?,
    })
}

fn entries_json(v: &BilateralVector) -> Json {
    Json::Arr(
        v.iter()
            .filter(|(_, x)| *x != 0.0)
            .map(|(n, x)| Json::Arr(vec![n.into(), x.into()]))
            .collect(),
    )
}

pub fn orbit(cfg: &ExperimentConfig, opts: &OrbitOpts, format: Option<Format>) -> Result<String> {
    let op = build(cfg)?;
    let window = op.window();
    let req = cfg.orbit.clone().unwrap_or_default();

    let vector = match &opts.vector {
        Some(arg) => VectorSpec::from_json(&inline_or_file(arg)?)?,
        None => req
            .vector
            .clone()
            .ok_or_else(|| usage("no start vector: pass --vector or add orbit.vector"))?,
    };
    let v0 = to_schauder(&op, &vector, window)?;
    let steps = opts.steps.or(req.steps).unwrap_or(DEFAULT_STEPS);
    let schedule = opts.schedule.or(req.schedule).unwrap_or(Schedule::All);
    let tolerance = opts
        .tolerance
        .or(req.tolerance)
        .unwrap_or(DEFAULT_TOLERANCE);

    let mut labels = Vec::new();
    let mut candidates = Vec::new();
    for n in -DEFAULT_CANDIDATE_RADIUS..=DEFAULT_CANDIDATE_RADIUS {
        labels.push(format!("e_{n}"));
        candidates.push(BilateralVector::unit(window, n, BasisTag::Schauder));
    }
    let mut extra = req.candidates.clone();
    if let Some(arg) = &opts.candidates {
        extra.extend(VectorSpec::list_from_json(&inline_or_file(arg)?)?);
    }
    for (i, spec) in extra.iter().enumerate() {
        labels.push(format!("user_{i}"));
        candidates.push(to_schauder(&op, spec, window)?);
    }

    let run = simulate_orbit(&op, &v0, steps, &candidates, schedule)?;
    let limits = detect_limit_point(&run, &candidates, tolerance);

    Ok(match format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut out = String::from("step,norm,ln_norm,edge_fraction");
            for l in &labels {
                out.push_str(&format!(",dist_{l}"));
            }
            out.push('\n');
            for r in &run.records {
                out.push_str(&format!(
                    "{},{},{},{}",
                    r.step,
                    format_float(r.norm.to_real()),
                    format_float(r.norm.ln_mag()),
                    format_float(r.edge_fraction)
                ));
                for d in &r.distances {
                    out.push(',');
                    out.push_str(&format_float(*d));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let records = run
                .records
                .iter()
                .map(|r| {
                    Json::obj()
                        .with("step", r.step)
                        .with("norm", r.norm.to_real())
                        .with("ln_norm", r.norm.ln_mag())
                        .with("edge_fraction", r.edge_fraction)
                        .with("distances", r.distances.as_slice())
                })
                .collect::<Vec<_>>();
            let limit_points = limits
                .iter()
                .map(|l| {
                    Json::obj()
                        .with("candidate", labels[l.candidate].as_str())
                        .with("entries", entries_json(&candidates[l.candidate]))
                        .with("detected", l.detected)
                        .with("hits", l.hits.clone())
                        .with("min_distance", l.min_distance)
                        .with("rejected", l.rejected.clone())
                })
                .collect::<Vec<_>>();
            Json::obj()
                .with("space", space_json(&op))
                .with("vector", entries_json(&v0))
                .with("steps", steps as i64)
                .with("schedule", schedule.as_str())
                .with("tolerance", tolerance)
                .with("edge_dominated", run.edge_dominated)
                .with("limit_points", limit_points)
                .with("records", records)
                .render()
        }
    })
}
