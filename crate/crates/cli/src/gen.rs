//! Instance generation.
//!
//! From one seed, `gen` writes a random space together with the isometries
//! onto its adjacent-transposition relabellings, a planted isometry between
//! two random spaces and, on request, a perturbation of that isometry. Each
//! operator comes with a bundle manifest that `run extract` and `run verify`
//! accept.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sphereiso::io::{write_json, BundleFile, InstanceFile, OperatorFile, OracleSpec, SCHEMA_VERSION};
use sphereiso::lamperti::LampertiOperator;
use sphereiso::suites::{planted_operator, random_space};
use sphereiso::{Exact, Exponent, FiniteMeasureSpace, RegularSetIso, Result, Scalar};

use crate::{GenArgs, Mode};

#[derive(Serialize)]
struct GenReport<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a GenArgs,
    files: Vec<String>,
    passed: bool,
}

pub fn gen(args: &GenArgs) -> Result<bool> {
    let files = match args.mode {
        Mode::Exact => write_instances::<Exact>(args)?,
        Mode::Float => write_instances::<f64>(args)?,
    };
    let report = GenReport { schema_version: SCHEMA_VERSION, command: "gen", config: args, files, passed: true };
    crate::report::print_json(&report);
    Ok(true)
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, value: &impl Serialize) -> Result<String> {
        write_json(&self.dir.join(name), value)?;
        self.written.push(name.to_string());
        Ok(name.to_string())
    }

    fn bundle<S: Scalar>(&mut self, stem: &str, domain: &str, op: &LampertiOperator<S>, oracle: OracleSpec) -> Result<()> {
        let codomain = self.put(&format!("{stem}.codomain.json"), &InstanceFile::from_space(op.iso().codomain()))?;
        let operator = self.put(&format!("{stem}.operator.json"), &OperatorFile::from_operator(op))?;
        let manifest = BundleFile { schema_version: SCHEMA_VERSION, domain: domain.into(), codomain, operator, oracle };
        self.put(&format!("{stem}.json"), &manifest)?;
        Ok(())
    }
}

/// The isometry from `space` onto the space whose atoms `i` and `i + 1`
/// trade weights. Its canonical weight is `1`.
fn swap_operator<S: Scalar>(space: &Arc<FiniteMeasureSpace<S>>, i: usize, p: Exponent) -> Result<LampertiOperator<S>> {
    let n = space.len();
    let tau = |k: usize| if k == i { i + 1 } else if k == i + 1 { i } else { k };
    let swapped = FiniteMeasureSpace::new((0..n).map(|k| (format!("y{k}"), space.weight(tau(k)).clone())))?;
    let iso = RegularSetIso::new(space.clone(), Arc::new(swapped), (0..n).map(|a| (a, tau(a))))?;
    LampertiOperator::canonical(iso, p)
}

fn write_instances<S: Scalar>(args: &GenArgs) -> Result<Vec<String>> {
    if args.atoms == 0 {
        return Err(sphereiso::Error::Configuration("--atoms must be at least 1".into()));
    }
    let p = Exponent::new(args.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut w = Writer { dir: &args.out, written: Vec::new() };

    let space = Arc::new(random_space::<S>(&mut rng, args.atoms, false));
    let space_file = w.put("space.json", &InstanceFile::from_space(&space))?;
    for i in 0..args.atoms.saturating_sub(1) {
        let op = swap_operator(&space, i, p)?;
        w.bundle(&format!("swap_{i}"), &space_file, &op, OracleSpec::Planted)?;
    }

    let planted = planted_operator::<S>(&mut rng, args.atoms, p)?;
    let planted_domain = w.put("planted.domain.json", &InstanceFile::from_space(planted.iso().domain()))?;
    w.bundle("planted", &planted_domain, &planted, OracleSpec::Planted)?;

    if let Some(scale) = args.adversarial {
        let nu = planted.iso().codomain();
        let atom = nu.id(rng.gen_range(0..nu.len())).to_string();
        let manifest = BundleFile {
            schema_version: SCHEMA_VERSION,
            domain: planted_domain,
            codomain: "planted.codomain.json".into(),
            operator: "planted.operator.json".into(),
            oracle: OracleSpec::Perturbed { scale: serde_json::Number::from_f64(scale).expect("finite scale"), atom },
        };
        w.put("perturbed.json", &manifest)?;
    }
    Ok(w.written)
}
