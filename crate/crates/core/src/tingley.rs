//! Recovering the linear isometry behind a black-box map between positive
//! unit spheres.
//!
//! [`extract`] probes the map with normalized atom indicators, reads off the
//! atom bijection from the supports of the images, rebuilds the canonical
//! weight and then compares the resulting Lamperti operator with the map on
//! structured and random samples. Maps that are not restrictions of a
//! Lamperti isometry are rejected with a concrete witness.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::lamperti::LampertiOperator;
use crate::lp_geometry::{LpVector, SphereVector};
use crate::measure::{FiniteMeasureSpace, RegularSetIso};
use crate::scalar::{Exponent, Scalar};
use crate::set::AtomSet;
use crate::{Error, Result};

/// Tolerance for the sphere contract on oracle outputs.
pub const CONTRACT_TOL: f64 = 1e-9;

/// Description of where an oracle comes from; extraction never reads it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleKind {
    Planted,
    Perturbed { scale: f64, atom: String },
    External { command: String },
    Custom,
}

/// A map `Φ` from the positive sphere of `L^p(μ)` to that of `L^p(ν)`.
pub trait SphereMap<S: Scalar>: Send + Sync {
    fn domain(&self) -> &Arc<FiniteMeasureSpace<S>>;
    fn codomain(&self) -> &Arc<FiniteMeasureSpace<S>>;
    fn p(&self) -> Exponent;
    fn kind(&self) -> OracleKind;
    /// `Φ(f)`; the result is validated by the caller.
    fn eval(&self, f: &SphereVector<S>) -> Result<LpVector<S>>;
}

/// `Φ = T` for a Lamperti operator `T`.
#[derive(Clone, Debug)]
pub struct PlantedOracle<S> {
    op: LampertiOperator<S>,
}

impl<S: Scalar> PlantedOracle<S> {
    pub fn new(op: LampertiOperator<S>) -> Self {
        Self { op }
    }

    pub fn operator(&self) -> &LampertiOperator<S> {
        &self.op
    }
}

impl<S: Scalar> SphereMap<S> for PlantedOracle<S> {
    fn domain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        self.op.iso().domain()
    }

    fn codomain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        self.op.iso().codomain()
    }

    fn p(&self) -> Exponent {
        self.op.p()
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Planted
    }

    fn eval(&self, f: &SphereVector<S>) -> Result<LpVector<S>> {
        self.op.apply(f.as_vector())
    }
}

/// `T f` with the value at one codomain atom multiplied by `1 + eps`, then
/// renormalized onto the sphere.
#[derive(Clone, Debug)]
pub struct PerturbedOracle<S> {
    op: LampertiOperator<S>,
    atom: usize,
    factor: S,
    eps: f64,
}

impl<S: Scalar> PerturbedOracle<S> {
    pub fn new(op: LampertiOperator<S>, atom: usize, eps: f64) -> Result<Self> {
        if atom >= op.iso().codomain().len() {
            return Err(Error::UnknownAtom(format!("#{atom}")));
        }
        Ok(Self { op, atom, factor: S::from_f64_lossy(1.0 + eps), eps })
    }
}

impl<S: Scalar> SphereMap<S> for PerturbedOracle<S> {
    fn domain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        self.op.iso().domain()
    }

    fn codomain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        self.op.iso().codomain()
    }

    fn p(&self) -> Exponent {
        self.op.p()
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Perturbed { scale: self.eps, atom: self.codomain().id(self.atom).to_string() }
    }

    fn eval(&self, f: &SphereVector<S>) -> Result<LpVector<S>> {
        let mut values = self.op.apply(f.as_vector())?.into_values();
        values[self.atom] = values[self.atom].clone() * self.factor.clone();
        let v = LpVector::new(self.codomain().clone(), values, self.p())?;
        Ok(v.normalized().unwrap_or(v))
    }
}

type EvalFn<S> = dyn Fn(&SphereVector<S>) -> Result<LpVector<S>> + Send + Sync;

/// An oracle given by a closure.
pub struct FnOracle<S> {
    domain: Arc<FiniteMeasureSpace<S>>,
    codomain: Arc<FiniteMeasureSpace<S>>,
    p: Exponent,
    f: Box<EvalFn<S>>,
}

impl<S: Scalar> FnOracle<S> {
    pub fn new(
        domain: Arc<FiniteMeasureSpace<S>>,
        codomain: Arc<FiniteMeasureSpace<S>>,
        p: Exponent,
        f: impl Fn(&SphereVector<S>) -> Result<LpVector<S>> + Send + Sync + 'static,
    ) -> Self {
        Self { domain, codomain, p, f: Box::new(f) }
    }
}

impl<S: Scalar> SphereMap<S> for FnOracle<S> {
    fn domain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        &self.domain
    }

    fn codomain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        &self.codomain
    }

    fn p(&self) -> Exponent {
        self.p
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Custom
    }

    fn eval(&self, f: &SphereVector<S>) -> Result<LpVector<S>> {
        (self.f)(f)
    }
}

/// An oracle running as a child process.
///
/// Each query writes one line `{"values": {"<atom>": <number>, …}}` to the
/// child's standard input and reads one line of the same shape back.
pub struct SubprocessOracle<S> {
    domain: Arc<FiniteMeasureSpace<S>>,
    codomain: Arc<FiniteMeasureSpace<S>>,
    p: Exponent,
    command: String,
    io: Mutex<(Child, ChildStdin, BufReader<ChildStdout>)>,
}

impl<S: Scalar> SubprocessOracle<S> {
    /// Spawns `program` with `args`.
    pub fn spawn(
        domain: Arc<FiniteMeasureSpace<S>>,
        codomain: Arc<FiniteMeasureSpace<S>>,
        p: Exponent,
        program: &str,
        args: &[String],
    ) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|source| Error::Io { path: program.to_string(), source })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let command = std::iter::once(program.to_string()).chain(args.iter().cloned()).collect::<Vec<_>>().join(" ");
        Ok(Self { domain, codomain, p, command, io: Mutex::new((child, stdin, stdout)) })
    }
}

impl<S> Drop for SubprocessOracle<S> {
    fn drop(&mut self) {
        if let Ok(mut io) = self.io.lock() {
            let _ = io.0.kill();
            let _ = io.0.wait();
        }
    }
}

impl<S: Scalar> SphereMap<S> for SubprocessOracle<S> {
    fn domain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        &self.domain
    }

    fn codomain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        &self.codomain
    }

    fn p(&self) -> Exponent {
        self.p
    }

    fn kind(&self) -> OracleKind {
        OracleKind::External { command: self.command.clone() }
    }

    fn eval(&self, f: &SphereVector<S>) -> Result<LpVector<S>> {
        let values: serde_json::Map<String, serde_json::Value> = self
            .domain
            .ids()
            .iter()
            .zip(f.values())
            .map(|(id, v)| (id.clone(), serde_json::json!(v.to_f64_lossy())))
            .collect();
        let line = serde_json::json!({ "values": values }).to_string();
        let mut io = self.io.lock().map_err(|_| Error::OracleContract("oracle process lock poisoned".into()))?;
        let io_err = |source| Error::Io { path: self.command.clone(), source };
        writeln!(io.1, "{line}").map_err(io_err)?;
        io.1.flush().map_err(io_err)?;
        let mut reply = String::new();
        if io.2.read_line(&mut reply).map_err(io_err)? == 0 {
            return Err(Error::OracleContract("oracle process closed its output".into()));
        }
        let parsed: serde_json::Value =
            serde_json::from_str(&reply).map_err(|e| Error::OracleContract(format!("malformed reply: {e}")))?;
        let map = parsed
            .get("values")
            .and_then(|v| v.as_object())
            .ok_or_else(|| Error::OracleContract("reply lacks a `values` object".into()))?;
        let mut out = vec![S::zero(); self.codomain.len()];
        for (id, v) in map {
            let x = v.as_f64().ok_or_else(|| Error::OracleContract(format!("value for `{id}` is not a number")))?;
            out[self.codomain.index_of(id)?] = S::from_f64_lossy(x);
        }
        LpVector::new(self.codomain.clone(), out, self.p)
    }
}

/// Evaluates `Φ(f)` and enforces the sphere contract.
pub fn eval_checked<S: Scalar>(oracle: &dyn SphereMap<S>, f: &SphereVector<S>) -> Result<LpVector<S>> {
    let v = oracle.eval(f)?;
    if v.space().len() != oracle.codomain().len() || v.p() != oracle.p() {
        return Err(Error::OracleContract("image is not a vector of the codomain".into()));
    }
    if let Some(i) = v.values().iter().position(|x| x.to_f64_lossy() < -CONTRACT_TOL) {
        return Err(Error::OracleContract(format!("negative value at `{}`", oracle.codomain().id(i))));
    }
    let np = v.norm_pow().to_f64_lossy();
    if (np - 1.0).abs() > CONTRACT_TOL {
        return Err(Error::OracleContract(format!("image has ‖·‖_p^p = {np}")));
    }
    Ok(v)
}

fn support_of<S: Scalar>(v: &LpVector<S>, tol: f64) -> AtomSet {
    let pos = v.space().positive_finite_atoms();
    pos.iter().filter(|&i| !v.value(i).is_negligible(tol)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRecord {
    /// Atoms carrying the probe.
    pub probe: Vec<String>,
    /// Image values by codomain atom.
    pub image: Vec<f64>,
    /// Non-null support of the image.
    pub support: Vec<String>,
}

/// Why a map was found not to be the restriction of a Lamperti isometry.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    /// Images of two disjoint atoms overlap.
    Overlap { atoms: [String; 2], shared: Vec<String> },
    /// Some codomain atom is reached by no atom image.
    NotExhaustive { missed: Vec<String> },
    /// An atom image has several atoms in its support.
    NonAtomicImage { atom: String, support: Vec<String> },
    /// The map disagrees with the rebuilt operator on a sample.
    Disagreement { sample: String, deviation: f64, distance_gap: f64 },
    /// Domain and codomain cannot be matched atom for atom.
    SizeMismatch { domain: usize, codomain: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Extendable,
    Rejected(Rejection),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    pub samples: usize,
    /// Largest `‖Φf − Ψf‖_p`.
    pub max_deviation: f64,
    /// Largest difference of restricted-sphere distances of `Φf` and `Ψf`.
    pub max_distance_gap: f64,
    /// Samples where `Φf` and `Ψf` have different non-null supports.
    pub support_mismatches: usize,
    /// Description of the sample with the largest deviation.
    pub worst_sample: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct ExtractionReport<S> {
    pub recovered: Option<LampertiOperator<S>>,
    pub probe_log: Vec<ProbeRecord>,
    /// Largest deviation seen during verification (`0` when not reached).
    pub agreement: f64,
    pub verdict: Verdict,
    pub verification: Option<AgreementReport>,
}

impl<S> ExtractionReport<S> {
    pub fn is_extendable(&self) -> bool {
        self.verdict == Verdict::Extendable
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractConfig {
    pub tol: f64,
    /// Random sphere points checked after the structured samples.
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self { tol: 1e-9, n_samples: 32, seed: 0 }
    }
}

fn record<S: Scalar>(oracle: &dyn SphereMap<S>, probe: &AtomSet, image: &LpVector<S>, tol: f64) -> ProbeRecord {
    ProbeRecord {
        probe: oracle.domain().ids_of(probe),
        image: image.values().iter().map(|v| v.to_f64_lossy()).collect(),
        support: oracle.codomain().ids_of(&support_of(image, tol)),
    }
}

/// Recovers `(Λ, h)` from black-box access to `Φ` and checks `Φ = Ψ` on
/// samples.
pub fn extract<S: Scalar>(oracle: &dyn SphereMap<S>, cfg: &ExtractConfig) -> Result<ExtractionReport<S>> {
    let mu = oracle.domain().clone();
    let nu = oracle.codomain().clone();
    let p = oracle.p();
    let mut log = Vec::new();
    let rejected = |log, r| Ok(ExtractionReport { recovered: None, probe_log: log, agreement: 0.0, verdict: Verdict::Rejected(r), verification: None });

    let atoms: Vec<usize> = mu.positive_finite_atoms().iter().collect();
    let cod_atoms = nu.positive_finite_atoms();
    if atoms.len() != cod_atoms.len() {
        return rejected(log, Rejection::SizeMismatch { domain: atoms.len(), codomain: cod_atoms.len() });
    }

    let mut supports = Vec::with_capacity(atoms.len());
    for &a in &atoms {
        let probe = AtomSet::singleton(a);
        let f = SphereVector::normalized_indicator(mu.clone(), &probe, p)?;
        let image = eval_checked(oracle, &f)?;
        log.push(record(oracle, &probe, &image, cfg.tol));
        supports.push(support_of(&image, cfg.tol));
    }

    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            let shared = supports[i].intersection(&supports[j]);
            if !shared.is_empty() {
                return rejected(
                    log,
                    Rejection::Overlap { atoms: [mu.id(atoms[i]).into(), mu.id(atoms[j]).into()], shared: nu.ids_of(&shared) },
                );
            }
        }
    }
    let covered = supports.iter().fold(AtomSet::empty(), |acc, s| acc.union(s));
    let missed = cod_atoms.difference(&covered);
    if !missed.is_empty() {
        return rejected(log, Rejection::NotExhaustive { missed: nu.ids_of(&missed) });
    }

    if let Some(k) = supports.iter().position(|s| s.len() != 1) {
        // Log how the split image interacts with every other atom.
        for &b in atoms.iter().filter(|&&b| b != atoms[k]) {
            let probe: AtomSet = [atoms[k], b].into_iter().collect();
            let f = SphereVector::normalized_indicator(mu.clone(), &probe, p)?;
            let image = eval_checked(oracle, &f)?;
            log.push(record(oracle, &probe, &image, cfg.tol));
        }
        return rejected(log, Rejection::NonAtomicImage { atom: mu.id(atoms[k]).into(), support: nu.ids_of(&supports[k]) });
    }

    let pairs: Vec<(usize, usize)> = atoms.iter().zip(&supports).map(|(&a, s)| (a, s.first().expect("one atom"))).collect();
    let iso = RegularSetIso::new(mu, nu, pairs)?;
    let psi = LampertiOperator::canonical(iso, p)?;
    let report = verify_agreement(oracle, &psi, cfg.n_samples, cfg.tol, cfg.seed)?;
    let verdict = if report.passed {
        Verdict::Extendable
    } else {
        Verdict::Rejected(Rejection::Disagreement {
            sample: report.worst_sample.clone().unwrap_or_default(),
            deviation: report.max_deviation,
            distance_gap: report.max_distance_gap,
        })
    };
    Ok(ExtractionReport { recovered: Some(psi), probe_log: log, agreement: report.max_deviation, verdict, verification: Some(report) })
}

/// `((t/μ(a))^{1/p}, ((1−t)/μ(b))^{1/p})` on atoms `a`, `b`: a sphere vector
/// putting `p`-th mass `t` on `a`.
pub fn pair_mixture<S: Scalar>(
    space: &Arc<FiniteMeasureSpace<S>>,
    a: usize,
    b: usize,
    t: f64,
    p: Exponent,
) -> Result<SphereVector<S>> {
    let mut values = vec![S::zero(); space.len()];
    let t = S::from_f64_lossy(t);
    let mass = |x: usize| space.weight(x).finite().cloned().ok_or(Error::Precondition("atom of infinite weight".into()));
    values[a] = (t.clone() / mass(a)?).root(p.get());
    values[b] = ((S::one() - t) / mass(b)?).root(p.get());
    Ok(SphereVector::trusted(LpVector::new(space.clone(), values, p)?))
}

/// Random sphere vector on the positive finite atoms, with a random support.
pub fn random_sphere_vector<S: Scalar>(
    rng: &mut ChaCha8Rng,
    space: &Arc<FiniteMeasureSpace<S>>,
    p: Exponent,
) -> Result<SphereVector<S>> {
    let atoms: Vec<usize> = space.positive_finite_atoms().iter().collect();
    if atoms.is_empty() {
        return Err(Error::EmptyRestrictedSphere);
    }
    let sparse = rng.gen_bool(0.25);
    let mut values = vec![S::zero(); space.len()];
    for &i in &atoms {
        if !(sparse && rng.gen_bool(0.5)) {
            values[i] = S::from_f64_lossy(rng.gen_range(1..=1024) as f64 / 1024.0);
        }
    }
    if values.iter().all(|v| v.is_zero()) {
        values[atoms[rng.gen_range(0..atoms.len())]] = S::one();
    }
    SphereVector::normalize(LpVector::new(space.clone(), values, p)?)
}

fn masses<S: Scalar>(v: &LpVector<S>) -> Vec<f64> {
    let p = v.p().get();
    let space = v.space();
    (0..space.len())
        .map(|i| match space.weight(i).finite() {
            Some(w) => w.to_f64_lossy() * v.value(i).to_f64_lossy().abs().powf(p),
            None => 0.0,
        })
        .collect()
}

fn restricted_distance(masses: &[f64], set: &AtomSet, p: f64) -> f64 {
    let rp: f64 = set.iter().map(|i| masses[i]).sum();
    if rp <= 0.0 {
        return 2f64.powf(1.0 / p);
    }
    let outside: f64 = masses.iter().enumerate().filter(|(i, _)| !set.contains(*i)).map(|(_, m)| m).sum();
    let r = rp.powf(1.0 / p);
    (outside + (1.0 - r).abs().powf(p)).powf(1.0 / p)
}

/// Compares `Φ` with `Ψ` on every normalized atom indicator, on the pair
/// mixtures of cyclically adjacent atoms with `t ∈ {¼, ½, ¾}`, and on
/// `n_samples` random sphere points.
///
/// Besides `‖Φf − Ψf‖_p` it compares the non-null supports of the two images
/// and their distances to the restricted spheres over each singleton, each
/// co-singleton and the support itself.
pub fn verify_agreement<S: Scalar>(
    oracle: &dyn SphereMap<S>,
    psi: &LampertiOperator<S>,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<AgreementReport> {
    let mu = oracle.domain().clone();
    let nu = oracle.codomain();
    let p = oracle.p();
    let atoms: Vec<usize> = mu.positive_finite_atoms().iter().collect();
    let mut samples: Vec<(String, SphereVector<S>)> = Vec::new();
    for &a in &atoms {
        samples.push((format!("indicator of {}", mu.id(a)), SphereVector::normalized_indicator(mu.clone(), &AtomSet::singleton(a), p)?));
    }
    if atoms.len() > 1 {
        for (k, &a) in atoms.iter().enumerate() {
            let b = atoms[(k + 1) % atoms.len()];
            if atoms.len() == 2 && k == 1 {
                break;
            }
            for t in [0.25, 0.5, 0.75] {
                samples.push((format!("mixture {t} of {} and {}", mu.id(a), mu.id(b)), pair_mixture(&mu, a, b, t, p)?));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..n_samples {
        samples.push((format!("random sample {k}"), random_sphere_vector(&mut rng, &mu, p)?));
    }

    let cod_atoms = nu.positive_finite_atoms();
    let pw = p.get();
    let mut report = AgreementReport {
        samples: samples.len(),
        max_deviation: 0.0,
        max_distance_gap: 0.0,
        support_mismatches: 0,
        worst_sample: None,
        passed: true,
    };
    for (label, f) in &samples {
        let phi = eval_checked(oracle, f)?;
        let psi_f = psi.apply(f.as_vector())?;
        let diff = phi.sub(&psi_f)?;
        let deviation = masses(&diff).iter().sum::<f64>().powf(1.0 / pw);
        if deviation > report.max_deviation || report.worst_sample.is_none() {
            report.max_deviation = report.max_deviation.max(deviation);
            report.worst_sample = Some(label.clone());
        }
        let s_phi = support_of(&phi, tol);
        let s_psi = support_of(&psi_f, tol);
        if s_phi != s_psi {
            report.support_mismatches += 1;
        }
        let (m_phi, m_psi) = (masses(&phi), masses(&psi_f));
        let mut tests: Vec<AtomSet> = cod_atoms.iter().map(AtomSet::singleton).collect();
        tests.extend(cod_atoms.iter().map(|y| cod_atoms.difference(&AtomSet::singleton(y))));
        tests.push(s_psi);
        for g in tests.iter().filter(|g| !g.is_empty()) {
            let gap = (restricted_distance(&m_phi, g, pw) - restricted_distance(&m_psi, g, pw)).abs();
            report.max_distance_gap = report.max_distance_gap.max(gap);
        }
    }
    report.passed = report.max_deviation <= tol && report.max_distance_gap <= tol && report.support_mismatches == 0;
    Ok(report)
}

/// The linear extension of `Ψ` to signed vectors.
pub fn extend_linear<S: Scalar>(psi: &LampertiOperator<S>, f: &LpVector<S>) -> Result<LpVector<S>> {
    psi.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn swap_oracle() -> PlantedOracle<BigRational> {
        let mu = Arc::new(FiniteMeasureSpace::from_weights([ratio(1, 1), ratio(1, 1)]).unwrap());
        let nu = Arc::new(FiniteMeasureSpace::from_weights([ratio(2, 1), ratio(1, 2)]).unwrap());
        let iso = RegularSetIso::new(mu, nu, [(0, 1), (1, 0)]).unwrap();
        PlantedOracle::new(LampertiOperator::canonical(iso, Exponent::new(1.0).unwrap()).unwrap())
    }

    #[test]
    fn recovers_planted_swap_exactly() {
        let oracle = swap_oracle();
        let rep = extract(&oracle, &ExtractConfig::default()).unwrap();
        assert!(rep.is_extendable());
        assert_eq!(rep.agreement, 0.0);
        let psi = rep.recovered.unwrap();
        assert_eq!(psi.h(), &[ratio(1, 2), ratio(2, 1)]);
        assert_eq!(psi.iso().pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert_eq!(rep.probe_log.len(), 2);
    }

    #[test]
    fn identity_oracle() {
        let mu = Arc::new(FiniteMeasureSpace::from_weights([0.5, 2.0, 1.0]).unwrap());
        let p = Exponent::new(2.0).unwrap();
        let oracle = FnOracle::new(mu.clone(), mu.clone(), p, |f| Ok(f.as_vector().clone()));
        let rep = extract(&oracle, &ExtractConfig::default()).unwrap();
        assert!(rep.is_extendable());
        let psi = rep.recovered.unwrap();
        assert!(psi.h().iter().all(|h: &f64| (h - 1.0).abs() < 1e-15));
    }

    #[test]
    fn overlapping_images_are_rejected() {
        let mu = Arc::new(FiniteMeasureSpace::from_weights([1.0, 1.0]).unwrap());
        let p = Exponent::new(1.0).unwrap();
        let oracle = FnOracle::new(mu.clone(), mu.clone(), p, {
            let mu = mu.clone();
            move |_| LpVector::new(mu.clone(), vec![0.5, 0.5], p)
        });
        let rep = extract(&oracle, &ExtractConfig::default()).unwrap();
        assert!(matches!(rep.verdict, Verdict::Rejected(Rejection::Overlap { .. })));
    }

    #[test]
    fn off_sphere_output_breaks_the_contract() {
        let mu = Arc::new(FiniteMeasureSpace::from_weights([1.0, 1.0]).unwrap());
        let p = Exponent::new(1.0).unwrap();
        let oracle = FnOracle::new(mu.clone(), mu.clone(), p, |f| Ok(f.as_vector().scale(&2.0)));
        assert!(matches!(extract(&oracle, &ExtractConfig::default()), Err(Error::OracleContract(_))));
    }

    #[test]
    fn perturbed_oracle_is_rejected() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let mu = Arc::new(FiniteMeasureSpace::from_weights([1.0, 2.0, 0.5, 1.0]).unwrap());
            let nu = Arc::new(FiniteMeasureSpace::from_weights([3.0, 1.0, 1.0, 0.25]).unwrap());
            let iso = RegularSetIso::new(mu, nu, [(0, 2), (1, 0), (2, 3), (3, 1)]).unwrap();
            let op = LampertiOperator::canonical(iso, Exponent::new(p).unwrap()).unwrap();
            let oracle = PerturbedOracle::new(op, 3, 0.01).unwrap();
            let rep = extract(&oracle, &ExtractConfig::default()).unwrap();
            assert!(!rep.is_extendable(), "p = {p}");
            assert!(rep.agreement > 1e-3, "p = {p}: {}", rep.agreement);
        }
    }

    #[test]
    fn signed_extension_is_linear_and_isometric() {
        let oracle = swap_oracle();
        let psi = extract(&oracle, &ExtractConfig::default()).unwrap().recovered.unwrap();
        let f = LpVector::new(psi.iso().domain().clone(), vec![ratio(-3, 4), ratio(1, 4)], psi.p()).unwrap();
        let direct = extend_linear(&psi, &f).unwrap();
        let parts = psi.apply(&f.positive_part()).unwrap().sub(&psi.apply(&f.negative_part()).unwrap()).unwrap();
        assert_eq!(direct, parts);
        assert_eq!(direct.norm(), f.norm());
    }
}
