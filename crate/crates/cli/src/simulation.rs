//! `asymm sweep` and `asymm coverage`.

use std::io::Write;
use std::time::Instant;

use asymm_core::measures::WeightKind;
use asymm_core::{coverage_experiment, sweep_cs, CoverageConfig, CsSpec, SweepRow, WeightScheme};
use serde::Serialize;

use crate::format::{csv_number, to_json};
use crate::svg::{line_chart, Series};
use crate::{
    check_alpha, emit, parse_lambdas, CliError, CliResult, CoverageArgs, SingleWeight, SweepArgs, SCHEMA_VERSION,
};

const MAX_GRID_POINTS: f64 = 1e6;

/// Points `min, min + step, ...` up to `max`. When the step divides the
/// range the points are `min + (max − min)·k/N`, so `max` is hit exactly.
pub fn delta_grid(min: f64, max: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(min >= 0.0 && min.is_finite() && max.is_finite()) || max < min {
        return Err(CliError::Input(format!("invalid delta range [{min}, {max}]")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Input(format!("delta step must be positive, got {step}")));
    }
    let ratio = (max - min) / step;
    if ratio > MAX_GRID_POINTS {
        return Err(CliError::Input(format!(
            "delta grid would have more than {MAX_GRID_POINTS} points"
        )));
    }
    let whole = ratio.round();
    if (ratio - whole).abs() < 1e-9 {
        let n = whole as u64;
        if n == 0 {
            return Ok(vec![min]);
        }
        return Ok((0..=n).map(|k| min + (max - min) * k as f64 / n as f64).collect());
    }
    Ok((0..=ratio.floor() as u64).map(|k| min + step * k as f64).collect())
}

pub fn sweep_csv(rows: &[SweepRow], lambdas: &[f64]) -> String {
    let mut out = String::from("delta,pc,sqrt_pc,phi");
    for l in lambdas {
        out += &format!(",phi_power_{l}");
    }
    out.push('\n');
    for r in rows {
        out += &format!(
            "{},{},{},{}",
            csv_number(r.delta),
            csv_number(r.pc),
            csv_number(r.sqrt_pc),
            csv_number(r.phi)
        );
        for (_, v) in &r.power {
            out += &format!(",{}", csv_number(*v));
        }
        out.push('\n');
    }
    out
}

pub fn sweep_svg(rows: &[SweepRow], lambdas: &[f64]) -> String {
    let x_range = (
        rows.first().map_or(0.0, |r| r.delta),
        rows.last().map_or(1.0, |r| r.delta),
    );
    let mut series = vec![Series {
        id: "phi".into(),
        label: "Φ".into(),
        points: rows.iter().map(|r| (r.delta, r.phi)).collect(),
    }];
    for (k, l) in lambdas.iter().enumerate() {
        series.push(Series {
            id: format!("phi-power-{k}"),
            label: format!("Φ^({l})"),
            points: rows.iter().map(|r| (r.delta, r.power[k].1)).collect(),
        });
    }
    line_chart(&series, x_range, "Δ", "measure")
}

pub fn run_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let grid = delta_grid(args.delta_min, args.delta_max, args.delta_step)?;
    let lambdas = parse_lambdas(&args.lambda)?;
    let base = CsSpec::uniform(1.0, 3)?;
    let rows = sweep_cs(&grid, &lambdas, &base)?;
    if let Some(path) = &args.svg {
        std::fs::write(path, sweep_svg(&rows, &lambdas))?;
    }
    emit(&sweep_csv(&rows, &lambdas), args.out.as_ref(), stdout)
}

#[derive(Debug, Serialize)]
pub struct CoverageParameters {
    pub delta: f64,
    pub dim: usize,
    pub n: u64,
    pub reps: u64,
    pub alpha: f64,
    pub seed: u64,
    pub weight: WeightKind,
}

/// Fields outside the deterministic part of the document.
#[derive(Debug, Serialize)]
pub struct RunMetadata {
    pub runtime_seconds: f64,
    pub threads: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct CoverageDocument {
    pub schema_version: u32,
    pub command: &'static str,
    pub parameters: CoverageParameters,
    pub truth: f64,
    pub covered: u64,
    pub not_available: u64,
    pub coverage: Option<f64>,
    pub mean_ci_width: Option<f64>,
    pub mean_estimate: Option<f64>,
    pub generator: &'static str,
    pub metadata: RunMetadata,
}

pub fn coverage_document(args: &CoverageArgs, threads: Option<usize>) -> CliResult<CoverageDocument> {
    check_alpha(args.alpha)?;
    if args.reps < 100 {
        return Err(CliError::Input(format!(
            "coverage needs at least 100 replicates, got {}",
            args.reps
        )));
    }
    if args.n == 0 {
        return Err(CliError::Input("sample size must be positive".into()));
    }
    if !(2..=100).contains(&args.dim) {
        return Err(CliError::Input(format!(
            "dimension must lie in 2..=100, got {}",
            args.dim
        )));
    }
    let spec = CsSpec::uniform(args.delta, args.dim).map_err(CliError::input)?;
    let scheme = match args.weight {
        SingleWeight::Uniform => WeightScheme::Uniform,
        SingleWeight::Pair => WeightScheme::PairProportional,
    };
    let config = CoverageConfig {
        n: args.n,
        reps: args.reps,
        alpha: args.alpha,
        scheme: scheme.clone(),
        seed: args.seed,
        threads,
    };
    let start = Instant::now();
    let result = coverage_experiment(&spec, &config)?;
    Ok(CoverageDocument {
        schema_version: SCHEMA_VERSION,
        command: "coverage",
        parameters: CoverageParameters {
            delta: args.delta,
            dim: args.dim,
            n: args.n,
            reps: args.reps,
            alpha: args.alpha,
            seed: args.seed,
            weight: scheme.kind(),
        },
        truth: result.truth,
        covered: result.covered,
        not_available: result.not_available,
        coverage: result.coverage,
        mean_ci_width: result.mean_ci_width,
        mean_estimate: result.mean_estimate,
        generator: result.generator,
        metadata: RunMetadata {
            runtime_seconds: start.elapsed().as_secs_f64(),
            threads,
        },
    })
}

pub fn run_coverage(args: &CoverageArgs, threads: Option<usize>, stdout: &mut dyn Write) -> CliResult<()> {
    let doc = coverage_document(args, threads)?;
    stdout.write_all(to_json(&doc).as_bytes())?;
    Ok(())
}
