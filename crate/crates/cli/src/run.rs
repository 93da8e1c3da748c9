//! Dispatch of `run` subcommands to the library suites.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sphereiso::io::{Bundle, BundleFile, OperatorFile, OracleSpec};
use sphereiso::lamperti::check_isometry;
use sphereiso::suites::*;
use sphereiso::tingley::{extract, verify_agreement, ExtractConfig, PerturbedOracle, PlantedOracle, SphereMap, SubprocessOracle};
use sphereiso::{Error, Exact, Result, Scalar};

use crate::report::Report;
use crate::{Common, Mode, RunCommand};

const BUNDLE_TOL: f64 = 1e-9;
const BUNDLE_SAMPLES: usize = 100;

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable value")
}

fn exponents(common: &Common, default: Vec<f64>) -> Vec<f64> {
    common.p.map_or(default, |p| vec![p])
}

pub fn run(cmd: &RunCommand) -> Result<bool> {
    let started = Instant::now();
    let (name, common, config, suites) = match cmd {
        RunCommand::Extract { bundle: Some(path), common } => {
            let (config, suite) = match common.mode {
                Mode::Exact => bundle_extract::<Exact>(path, common)?,
                Mode::Float => bundle_extract::<f64>(path, common)?,
            };
            ("extract", common, config, vec![suite])
        }
        RunCommand::Extract { bundle: None, common } => {
            let d = ExtractionSuiteConfig::default();
            let cfg = ExtractionSuiteConfig {
                trials: common.trials.unwrap_or(d.trials),
                max_atoms: common.atoms.unwrap_or(d.max_atoms),
                exponents: exponents(common, d.exponents),
                samples: d.samples,
                tol: common.tol.unwrap_or(d.tol),
                seed: common.seed,
            };
            let suite = match common.mode {
                Mode::Exact => extraction_suite::<Exact>(&cfg)?,
                Mode::Float => extraction_suite::<f64>(&cfg)?,
            };
            ("extract", common, json!({ "extraction": cfg }), vec![suite])
        }
        RunCommand::Verify { bundle: Some(path), common } => {
            let (config, suite) = match common.mode {
                Mode::Exact => bundle_verify::<Exact>(path, common)?,
                Mode::Float => bundle_verify::<f64>(path, common)?,
            };
            ("verify", common, config, vec![suite])
        }
        RunCommand::Verify { bundle: None, common } => {
            let d = IsoSuiteConfig::default();
            let iso_cfg = IsoSuiteConfig {
                trials: common.trials.unwrap_or(d.trials),
                max_atoms: common.atoms.unwrap_or(d.max_atoms),
                seed: common.seed,
            };
            let trials = common.trials.unwrap_or(100);
            let max_atoms = common.atoms.unwrap_or(8);
            let tol = common.tol.unwrap_or(BUNDLE_TOL);
            let suites = vec![iso_existence_suite(&iso_cfg)?, isometry_suite(trials, max_atoms, common.seed, tol)?];
            let config = json!({
                "regular_iso_existence": iso_cfg,
                "planted_isometry": { "trials": trials, "max_atoms": max_atoms, "tol": tol, "seed": common.seed },
            });
            ("verify", common, config, suites)
        }
        RunCommand::Rn { exhaustive, common } => {
            let cfg = RnSuiteConfig { max_atoms: *exhaustive };
            ("rn", common, json!({ "rn_equivalence": cfg }), vec![rn_equivalence_suite(&cfg)])
        }
        RunCommand::Dist { common } => {
            let d = DistanceSuiteConfig::default();
            let cfg = DistanceSuiteConfig {
                trials: common.trials.unwrap_or(d.trials),
                max_atoms: common.atoms.unwrap_or(d.max_atoms),
                exponents: exponents(common, d.exponents),
                tol: common.tol.unwrap_or(d.tol),
                seed: common.seed,
            };
            ("dist", common, json!({ "restricted_distance": cfg }), vec![distance_suite(&cfg)?])
        }
        RunCommand::Sharp { common } => {
            let d = SharpSuiteConfig::default();
            let cfg = SharpSuiteConfig { max_points: common.atoms.unwrap_or(d.max_points), ..d };
            ("sharp", common, json!({ "sharp": cfg }), vec![sharp_suite(&cfg)])
        }
        RunCommand::Homeo { common } => {
            let (dh, dp) = (HomeoSuiteConfig::default(), PxSuiteConfig::default());
            let homeo = HomeoSuiteConfig {
                trials: common.trials.unwrap_or(dh.trials),
                max_points: common.atoms.unwrap_or(dh.max_points),
                seed: common.seed,
            };
            let px = PxSuiteConfig {
                trials: common.trials.unwrap_or(dp.trials),
                tol: common.tol.unwrap_or(dp.tol),
                seed: common.seed,
                ..dp
            };
            let suites = vec![homeo_suite(&homeo)?, px_distance_suite(&px)];
            ("homeo", common, json!({ "homeomorphism": homeo, "peak_distance": px }), suites)
        }
    };
    let config = json!({ "flags": common, "suites": config });
    Report::new(name, config, suites, started).emit(common.out.as_deref())
}

/// The oracle a bundle describes, and whether it should be found
/// extendable.
fn bundle_oracle<S: Scalar>(bundle: &Bundle<S>) -> Result<(Box<dyn SphereMap<S>>, bool)> {
    let op = bundle.operator.clone();
    Ok(match &bundle.manifest.oracle {
        OracleSpec::Planted => (Box::new(PlantedOracle::new(op)), true),
        OracleSpec::Perturbed { scale, atom } => {
            let y = bundle.codomain.index_of(atom)?;
            let eps = scale.as_f64().ok_or_else(|| Error::Configuration(format!("perturbation scale `{scale}` is not a number")))?;
            (Box::new(PerturbedOracle::new(op, y, eps)?), false)
        }
        OracleSpec::External { command } => {
            let (program, args) = command.split_first().ok_or_else(|| Error::Configuration("external oracle has an empty command".into()))?;
            let oracle = SubprocessOracle::spawn(bundle.domain.clone(), bundle.codomain.clone(), op.p(), program, args)?;
            (Box::new(oracle), true)
        }
    })
}

fn single_report(suite: &str, metric: &str, tol: f64, records: Vec<TrialRecord>, summary: BTreeMap<String, Value>) -> SuiteReport {
    let failures = records.iter().filter(|r| !r.passed).count();
    SuiteReport {
        suite: suite.into(),
        trials: records.len(),
        failures,
        metric: metric.into(),
        max_metric: records.iter().map(|r| r.metric).fold(0.0, f64::max),
        tolerance: tol,
        passed: failures == 0,
        summary,
        records,
    }
}

fn bundle_config(path: &Path, common: &Common, tol: f64, samples: usize) -> Value {
    json!({ "bundle": path.display().to_string(), "tol": tol, "samples": samples, "seed": common.seed })
}

fn bundle_extract<S: Scalar>(path: &Path, common: &Common) -> Result<(Value, SuiteReport)> {
    let bundle = BundleFile::load::<S>(path)?;
    let (oracle, expect_extendable) = bundle_oracle(&bundle)?;
    let tol = common.tol.unwrap_or(BUNDLE_TOL);
    let samples = common.trials.unwrap_or(BUNDLE_SAMPLES);
    let report = extract(oracle.as_ref(), &ExtractConfig { tol, n_samples: samples, seed: common.seed })?;

    let mut summary = BTreeMap::new();
    summary.insert("oracle".into(), to_value(&oracle.kind()));
    summary.insert("expected".into(), json!(if expect_extendable { "extendable" } else { "rejected" }));
    summary.insert("verdict".into(), to_value(&report.verdict));
    summary.insert("probes".into(), json!(report.probe_log.len()));
    let mut matches_bundle = None;
    if let Some(rec) = &report.recovered {
        let same = rec.iso().pairs().eq(bundle.operator.iso().pairs())
            && rec.h().iter().zip(bundle.operator.h()).all(|(a, b)| a.approx_eq(b, tol));
        matches_bundle = Some(same);
        summary.insert("recovered".into(), to_value(&OperatorFile::from_operator(rec)));
        summary.insert("matches_bundle".into(), json!(same));
    }
    if let Some(v) = &report.verification {
        summary.insert("verification".into(), to_value(v));
    }

    let planted = matches!(bundle.manifest.oracle, OracleSpec::Planted);
    let passed = if expect_extendable {
        report.is_extendable() && (!planted || matches_bundle == Some(true))
    } else {
        !report.is_extendable()
    };
    let record = TrialRecord { index: 0, seed: common.seed, passed, metric: report.agreement, detail: None };
    Ok((bundle_config(path, common, tol, samples), single_report("bundle_extraction", "agreement", tol, vec![record], summary)))
}

fn bundle_verify<S: Scalar>(path: &Path, common: &Common) -> Result<(Value, SuiteReport)> {
    let bundle = BundleFile::load::<S>(path)?;
    let (oracle, expect_extendable) = bundle_oracle(&bundle)?;
    let tol = common.tol.unwrap_or(BUNDLE_TOL);
    let samples = common.trials.unwrap_or(BUNDLE_SAMPLES);

    let isometry = check_isometry(&bundle.operator, samples, common.seed, tol);
    let agreement = verify_agreement(oracle.as_ref(), &bundle.operator, samples, tol, common.seed)?;
    let records = vec![
        TrialRecord { index: 0, seed: common.seed, passed: isometry.passed, metric: isometry.max_deviation, detail: isometry.witness.clone() },
        TrialRecord {
            index: 1,
            seed: common.seed,
            passed: agreement.passed == expect_extendable,
            metric: agreement.max_deviation,
            detail: agreement.worst_sample.clone(),
        },
    ];
    let mut summary = BTreeMap::new();
    summary.insert("oracle".into(), to_value(&oracle.kind()));
    summary.insert("expected_agreement".into(), json!(expect_extendable));
    summary.insert("operator_is_isometry".into(), json!(isometry.passed));
    summary.insert("agreement".into(), to_value(&agreement));
    Ok((bundle_config(path, common, tol, samples), single_report("bundle_verification", "max_deviation", tol, records, summary)))
}
