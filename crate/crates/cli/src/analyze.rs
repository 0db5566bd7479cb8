//! `asymm analyze`: every measure and test for one count table.

use std::io::Write;

use asymm_core::measures::WeightKind;
use asymm_core::{
    bowker, parse_table, phi_interval, phi_power, realize_weights, to_probabilities, CountTable, EstimateOptions,
    Normalization, WeightScheme, ZeroPairPolicy,
};
use serde::Serialize;

use crate::format::{csv_number, to_json};
use crate::{
    check_alpha, parse_lambdas, AnalyzeArgs, CliError, CliResult, NormalizationArg, OutputFormat, PolicyArg,
    WeightChoice, SCHEMA_VERSION,
};

#[derive(Debug, Serialize)]
pub struct AnalysisDocument {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: InputDigest,
    pub options: AnalysisOptions,
    pub measures: Vec<PhiEntry>,
    pub power_divergence: Vec<PowerEntry>,
    pub symmetry_test: SymmetryEntry,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub dimension: usize,
    pub total: u64,
    pub off_diagonal_total: u64,
    pub diagonal_total: u64,
}

#[derive(Debug, Serialize)]
pub struct AnalysisOptions {
    pub weights: Vec<WeightKind>,
    pub lambdas: Vec<f64>,
    pub alpha: f64,
    pub normalization: &'static str,
    pub zero_pair_policy: ZeroPairPolicy,
}

#[derive(Debug, Serialize)]
pub struct PhiEntry {
    pub weight: WeightKind,
    pub estimate: f64,
    pub se: Option<f64>,
    pub ci_lower: Option<f64>,
    pub ci_upper: Option<f64>,
    pub n: u64,
    pub skipped_pairs: usize,
    pub ci_clipped: bool,
    pub boundary: bool,
    pub zero_se: bool,
}

#[derive(Debug, Serialize)]
pub struct PowerEntry {
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct SymmetryEntry {
    pub test: &'static str,
    pub statistic: f64,
    pub df: u32,
    pub p_value: Option<f64>,
}

fn schemes(choice: WeightChoice) -> Vec<WeightScheme> {
    match choice {
        WeightChoice::Uniform => vec![WeightScheme::Uniform],
        WeightChoice::Pair => vec![WeightScheme::PairProportional],
        WeightChoice::Both => vec![WeightScheme::Uniform, WeightScheme::PairProportional],
    }
}

fn weight_name(kind: WeightKind) -> &'static str {
    match kind {
        WeightKind::Uniform => "uniform",
        WeightKind::Pair => "pair",
        WeightKind::Custom => "custom",
    }
}

/// Builds the analysis document for an already parsed table.
pub fn analyze_table(
    table: &CountTable,
    weight: WeightChoice,
    lambdas: &[f64],
    alpha: f64,
    options: EstimateOptions,
) -> CliResult<AnalysisDocument> {
    check_alpha(alpha)?;
    let probs = to_probabilities(table, options.convention)?;
    let mut warnings = Vec::new();
    let mut measures = Vec::new();
    for scheme in schemes(weight) {
        let report = phi_interval(table, &scheme, alpha, options)?;
        let name = weight_name(report.weight);
        let realized = realize_weights(&scheme, &probs, options.zero_pairs)?;
        for &(i, j) in realized.skipped() {
            warnings.push(format!(
                "{name}: pair ({}, {}) has no observations and was skipped",
                i + 1,
                j + 1
            ));
        }
        if report.boundary {
            warnings.push(format!(
                "{name}: standard error unavailable, an included pair has a zero cell"
            ));
        }
        if report.ci_clipped {
            warnings.push(format!("{name}: confidence interval clipped to [0, 1]"));
        }
        if report.zero_se {
            warnings.push(format!("{name}: estimated standard error is zero"));
        }
        measures.push(PhiEntry {
            weight: report.weight,
            estimate: report.estimate,
            se: report.se,
            ci_lower: report.ci.map(|c| c.0),
            ci_upper: report.ci.map(|c| c.1),
            n: report.n,
            skipped_pairs: report.skipped_pairs,
            ci_clipped: report.ci_clipped,
            boundary: report.boundary,
            zero_se: report.zero_se,
        });
    }
    let power_divergence = lambdas
        .iter()
        .map(|&lambda| {
            let v = phi_power(&probs, lambda).map_err(CliError::input)?;
            Ok(PowerEntry { lambda, value: v.value })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let test = bowker(table)?;
    let diagonal_total: u64 = (0..table.dim()).map(|i| table.get(i, i)).sum();
    Ok(AnalysisDocument {
        schema_version: SCHEMA_VERSION,
        command: "analyze",
        input: InputDigest {
            dimension: table.dim(),
            total: table.total(),
            off_diagonal_total: table.off_diagonal_total(),
            diagonal_total,
        },
        options: AnalysisOptions {
            weights: schemes(weight).iter().map(WeightScheme::kind).collect(),
            lambdas: lambdas.to_vec(),
            alpha,
            normalization: options.convention.as_str(),
            zero_pair_policy: options.zero_pairs,
        },
        measures,
        power_divergence,
        symmetry_test: SymmetryEntry {
            test: if table.dim() == 2 { "mcnemar" } else { "bowker" },
            statistic: test.statistic,
            df: test.df,
            p_value: test.p_value,
        },
        warnings,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(csv_number).unwrap_or_default()
}

/// One row per measure: `Φ` per weight, `Φ^(λ)` per λ, then the symmetry test.
pub fn to_csv(doc: &AnalysisDocument) -> String {
    let mut out = String::from("measure,weight,lambda,estimate,se,ci_lower,ci_upper,df,p_value\n");
    for m in &doc.measures {
        out += &format!(
            "phi,{},,{},{},{},{},,\n",
            weight_name(m.weight),
            csv_number(m.estimate),
            opt(m.se),
            opt(m.ci_lower),
            opt(m.ci_upper)
        );
    }
    for p in &doc.power_divergence {
        out += &format!("phi_power,,{},{},,,,,\n", p.lambda, csv_number(p.value));
    }
    let t = &doc.symmetry_test;
    out += &format!(
        "{},,,{},,,,{},{}\n",
        t.test,
        csv_number(t.statistic),
        t.df,
        opt(t.p_value)
    );
    out
}

pub fn run(args: &AnalyzeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.input.display())))?;
    let table = parse_table(&text).map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let lambdas = parse_lambdas(&args.lambda)?;
    let options = EstimateOptions {
        convention: match args.normalization {
            NormalizationArg::Offdiag => Normalization::OffDiagonal,
            NormalizationArg::Full => Normalization::Full,
        },
        zero_pairs: match args.zero_pair_policy {
            PolicyArg::Error => ZeroPairPolicy::Error,
            PolicyArg::Skip => ZeroPairPolicy::Skip,
        },
    };
    let doc = analyze_table(&table, args.weight, &lambdas, args.alpha, options)?;
    let text = match args.format {
        OutputFormat::Json => to_json(&doc),
        OutputFormat::Csv => to_csv(&doc),
    };
    stdout.write_all(text.as_bytes())?;
    Ok(())
}
