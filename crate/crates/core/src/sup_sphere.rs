//! Positive unit sphere of `C(X)` for a finite discrete `X`.
//!
//! A sphere function takes values in `[0, 1]` and attains `1`. Its peak set
//! `p(f)` and zero set `z(f)` drive everything here: two sphere functions are
//! at sup-distance `1` exactly when one peaks where the other vanishes. That
//! makes the sharp set `S^#` (functions at distance `< 1` from all of `S`)
//! a family `F_F^E = {g : p(g) ⊆ E, z(g) ⊆ F}` described by two point sets.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::scalar::Scalar;
use crate::set::AtomSet;
use crate::{Error, Result};

/// Peak threshold in float mode.
pub const PEAK_TOL: f64 = 1e-12;

/// A finite set of named points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpace {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl PointSpace {
    pub fn new<I, K>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = K>,
        K: Into<String>,
    {
        let mut out = Self { ids: Vec::new(), index: HashMap::new() };
        for id in ids {
            let id = id.into();
            if out.index.insert(id.clone(), out.ids.len()).is_some() {
                return Err(Error::DuplicateAtom(id));
            }
            out.ids.push(id);
        }
        Ok(out)
    }

    /// Points `x0, …, x{n-1}`.
    pub fn numbered(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("x{i}"))).expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownAtom(id.to_string()))
    }

    pub fn all(&self) -> AtomSet {
        AtomSet::full(self.len())
    }
}

/// A function `X → [0, 1]`.
#[derive(Clone, Debug)]
pub struct SupVector<S> {
    space: Arc<PointSpace>,
    values: Vec<S>,
}

impl<S: Scalar> PartialEq for SupVector<S> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space) && self.values == other.values
    }
}

fn is_peak<S: Scalar>(v: &S) -> bool {
    if S::EXACT {
        v.is_one()
    } else {
        v.to_f64_lossy() >= 1.0 - PEAK_TOL
    }
}

impl<S: Scalar> SupVector<S> {
    pub fn new(space: Arc<PointSpace>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::InvalidVector(format!("{} values for {} points", values.len(), space.len())));
        }
        if let Some(i) = values.iter().position(|v| v.is_negative() || *v > S::one()) {
            return Err(Error::InvalidVector(format!("value at `{}` is outside [0, 1]", space.id(i))));
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &Arc<PointSpace> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &S {
        &self.values[i]
    }

    pub fn is_sphere(&self) -> bool {
        self.values.iter().any(is_peak)
    }

    /// `p(f)`.
    pub fn peak_set(&self) -> AtomSet {
        self.values.iter().enumerate().filter(|(_, v)| is_peak(*v)).map(|(i, _)| i).collect()
    }

    /// `z(f)`.
    pub fn zero_set(&self) -> AtomSet {
        self.values.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i).collect()
    }

    /// `‖f − g‖_∞`.
    pub fn dist(&self, other: &Self) -> S {
        self.values
            .iter()
            .zip(&other.values)
            .fold(S::zero(), |acc, (a, b)| acc.max_of((a.clone() - b.clone()).abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Features {
    pub peaks: AtomSet,
    pub zeros: AtomSet,
    /// Nowhere zero.
    pub in_p: bool,
}

impl Serialize for AtomSet {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        s.collect_seq(self.iter())
    }
}

pub fn features<S: Scalar>(f: &SupVector<S>) -> Result<Features> {
    if !f.is_sphere() {
        return Err(Error::NotOnSphere("maximum is not 1".into()));
    }
    let zeros = f.zero_set();
    Ok(Features { peaks: f.peak_set(), in_p: zeros.is_empty(), zeros })
}

/// The family `F_F^E`, kept in canonical form.
///
/// `E = ∅` is the empty family. When `E = {x}` every member peaks at `x`, so
/// `x` is dropped from `F`. With the canonical `F`, `E` and `F` are exactly
/// the unions of the peak sets and zero sets of the members.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SharpFamily {
    n: usize,
    e: AtomSet,
    f: AtomSet,
}

impl SharpFamily {
    pub fn new(n: usize, e: AtomSet, f: AtomSet) -> Self {
        let all = AtomSet::full(n);
        let e = e.intersection(&all);
        if e.is_empty() {
            return Self::empty(n);
        }
        let mut f = f.intersection(&all);
        if e.len() == 1 {
            f = f.difference(&e);
        }
        Self { n, e, f }
    }

    pub fn empty(n: usize) -> Self {
        Self { n, e: AtomSet::empty(), f: AtomSet::empty() }
    }

    /// The whole positive sphere `F_X^X`.
    pub fn full(n: usize) -> Self {
        Self::new(n, AtomSet::full(n), AtomSet::full(n))
    }

    /// `𝒫 = F_∅^X`.
    pub fn nowhere_zero(n: usize) -> Self {
        Self::new(n, AtomSet::full(n), AtomSet::empty())
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn e(&self) -> &AtomSet {
        &self.e
    }

    pub fn f(&self) -> &AtomSet {
        &self.f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p(g) ⊆ E` and `z(g) ⊆ F`.
    pub fn contains<S: Scalar>(&self, g: &SupVector<S>) -> bool {
        !self.is_empty() && g.is_sphere() && g.peak_set().is_subset(&self.e) && g.zero_set().is_subset(&self.f)
    }

    /// Inclusion of families.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.is_empty() || (!other.is_empty() && self.e.is_subset(&other.e) && self.f.is_subset(&other.f))
    }
}

/// `S^# = F_{F_S}^{E_S}` with `E_S = ∩ (X ∖ z(g))` and `F_S = ∩ (X ∖ p(g))`.
pub fn sharp_of_set<S: Scalar>(n: usize, set: &[SupVector<S>]) -> Result<SharpFamily> {
    let all = AtomSet::full(n);
    let mut e = all.clone();
    let mut f = all.clone();
    for g in set {
        let ft = features(g)?;
        e = e.difference(&ft.zeros);
        f = f.difference(&ft.peaks);
    }
    Ok(SharpFamily::new(n, e, f))
}

/// `(F_F^E)^# = F_{X∖E}^{X∖F}`; the sharp of the empty family is the whole
/// sphere.
pub fn sharp_of_family(fam: &SharpFamily) -> SharpFamily {
    if fam.is_empty() {
        return SharpFamily::full(fam.n);
    }
    let all = AtomSet::full(fam.n);
    SharpFamily::new(fam.n, all.difference(&fam.f), all.difference(&fam.e))
}

/// Membership through the `(E, F)` description.
pub fn membership<S: Scalar>(f: &SupVector<S>, fam: &SharpFamily) -> bool {
    fam.contains(f)
}

/// `‖f − g‖ < 1` for every `g` in `members`.
pub fn quantifier_membership<S: Scalar>(f: &SupVector<S>, members: &[SupVector<S>]) -> bool {
    members.iter().all(|g| f.dist(g) < S::one())
}

/// `dist(f, 𝒫^x) = 1 − f(x)`, where `𝒫^x` is the set of nowhere-zero sphere
/// functions peaking at `x`.
pub fn dist_to_px<S: Scalar>(f: &SupVector<S>, x: usize) -> Result<S> {
    features(f)?;
    Ok(S::one() - f.value(x).clone())
}

/// Grid search for `dist(f, 𝒫^x)` with values of `g` in `{1/N, …, 1}`.
///
/// The sup-distance is a maximum of per-point terms, so each point is
/// optimized independently over the grid. The infimum is not attained when
/// `f` vanishes somewhere, so the search runs at `N` and `2N` and combines
/// them as `2 b(2N) − b(N)`, which cancels the `1/N` term.
pub fn dist_to_px_grid(f: &SupVector<f64>, x: usize, n: usize) -> f64 {
    let best = |n: usize| {
        let mut worst = 1.0 - f.value(x);
        for (y, v) in f.values().iter().enumerate() {
            if y != x {
                let d = (1..=n).map(|k| (v - k as f64 / n as f64).abs()).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        worst
    };
    2.0 * best(2 * n) - best(n)
}

/// Every sphere function on `n` points with values in `levels`.
pub fn grid_sphere_functions(space: &Arc<PointSpace>, levels: &[f64]) -> Vec<SupVector<f64>> {
    let n = space.len();
    let k = levels.len();
    let total = k.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let values: Vec<f64> = (0..n)
                .map(|_| {
                    let v = levels[code % k];
                    code /= k;
                    v
                })
                .collect();
            values.contains(&1.0).then(|| SupVector { space: space.clone(), values })
        })
        .collect()
}

/// The five-level grid `{0, ¼, ½, ¾, 1}`.
pub const FIVE_LEVELS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// A map between the positive unit spheres of `C(X)` and `C(Y)`.
pub trait SupMap<S: Scalar>: Send + Sync {
    fn domain(&self) -> &Arc<PointSpace>;
    fn codomain(&self) -> &Arc<PointSpace>;
    fn eval(&self, f: &SupVector<S>) -> Result<SupVector<S>>;
}

/// `Φ(f) = f ∘ σ` for `σ: Y → X`, stored as `sigma[y] = x`.
#[derive(Clone, Debug)]
pub struct PermutationOracle {
    domain: Arc<PointSpace>,
    codomain: Arc<PointSpace>,
    sigma: Vec<usize>,
}

impl PermutationOracle {
    pub fn new(domain: Arc<PointSpace>, codomain: Arc<PointSpace>, sigma: Vec<usize>) -> Result<Self> {
        if sigma.len() != codomain.len() || domain.len() != codomain.len() {
            return Err(Error::Precondition("σ must be a bijection Y → X".into()));
        }
        let mut seen = vec![false; domain.len()];
        for &x in &sigma {
            if x >= domain.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Precondition("σ must be a bijection Y → X".into()));
            }
        }
        Ok(Self { domain, codomain, sigma })
    }

    /// A uniformly random permutation of `n` points.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sigma: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            sigma.swap(i, rng.gen_range(0..=i));
        }
        let x = Arc::new(PointSpace::numbered(n));
        let y = Arc::new(PointSpace::new((0..n).map(|i| format!("y{i}"))).expect("distinct names"));
        Self { domain: x, codomain: y, sigma }
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }
}

impl<S: Scalar> SupMap<S> for PermutationOracle {
    fn domain(&self) -> &Arc<PointSpace> {
        &self.domain
    }

    fn codomain(&self) -> &Arc<PointSpace> {
        &self.codomain
    }

    fn eval(&self, f: &SupVector<S>) -> Result<SupVector<S>> {
        SupVector::new(self.codomain.clone(), self.sigma.iter().map(|&x| f.value(x).clone()).collect())
    }
}

/// `f ↦ f²`, which keeps peaks and zeros but is not a composition.
#[derive(Clone, Debug)]
pub struct SquareOracle {
    space: Arc<PointSpace>,
}

impl SquareOracle {
    pub fn new(space: Arc<PointSpace>) -> Self {
        Self { space }
    }
}

impl<S: Scalar> SupMap<S> for SquareOracle {
    fn domain(&self) -> &Arc<PointSpace> {
        &self.space
    }

    fn codomain(&self) -> &Arc<PointSpace> {
        &self.space
    }

    fn eval(&self, f: &SupVector<S>) -> Result<SupVector<S>> {
        SupVector::new(self.space.clone(), f.values().iter().map(|v| v.clone() * v.clone()).collect())
    }
}

type SupFn<S> = dyn Fn(&SupVector<S>) -> Result<SupVector<S>> + Send + Sync;

pub struct FnSupOracle<S> {
    domain: Arc<PointSpace>,
    codomain: Arc<PointSpace>,
    f: Box<SupFn<S>>,
}

impl<S: Scalar> FnSupOracle<S> {
    pub fn new(
        domain: Arc<PointSpace>,
        codomain: Arc<PointSpace>,
        f: impl Fn(&SupVector<S>) -> Result<SupVector<S>> + Send + Sync + 'static,
    ) -> Self {
        Self { domain, codomain, f: Box::new(f) }
    }
}

impl<S: Scalar> SupMap<S> for FnSupOracle<S> {
    fn domain(&self) -> &Arc<PointSpace> {
        &self.domain
    }

    fn codomain(&self) -> &Arc<PointSpace> {
        &self.codomain
    }

    fn eval(&self, f: &SupVector<S>) -> Result<SupVector<S>> {
        (self.f)(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum HomeoRejection {
    SizeMismatch { domain: usize, codomain: usize },
    /// The image of the probe peaking at `point` does not peak at exactly one point.
    NonSingletonPeak { point: String, peaks: Vec<String> },
    /// Two probes peak at the same image point.
    NotBijective { points: [String; 2], image: String },
    /// `Φ(f) ≠ f ∘ σ` on a sample.
    NotComposition { sample: Vec<f64>, deviation: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomeoReport {
    /// `sigma[y] = x` when recovered.
    pub sigma: Option<Vec<usize>>,
    pub samples: usize,
    pub max_deviation: f64,
    pub rejection: Option<HomeoRejection>,
}

impl HomeoReport {
    pub fn passed(&self) -> bool {
        self.rejection.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomeoConfig {
    pub tol: f64,
    pub n_random: usize,
    pub seed: u64,
    /// Largest `|X|` for which the five-level grid is checked completely.
    pub grid_bound: usize,
}

impl Default for HomeoConfig {
    fn default() -> Self {
        Self { tol: 0.0, n_random: 64, seed: 0, grid_bound: 4 }
    }
}

/// Recovers `σ` with `Φ(f) = f ∘ σ`.
///
/// For each `x` the probe is `1` at `x` and `½` elsewhere; `τ(x)` is the
/// unique peak of its image and `σ = τ⁻¹`. The composition law is then
/// checked on the five-level grid (small `X`) and on random functions.
pub fn extract_homeo<S: Scalar>(oracle: &dyn SupMap<S>, cfg: &HomeoConfig) -> Result<HomeoReport> {
    let x_space = oracle.domain().clone();
    let y_space = oracle.codomain().clone();
    let n = x_space.len();
    let mut report = HomeoReport { sigma: None, samples: 0, max_deviation: 0.0, rejection: None };
    if n != y_space.len() {
        report.rejection = Some(HomeoRejection::SizeMismatch { domain: n, codomain: y_space.len() });
        return Ok(report);
    }
    let half = S::one() / (S::one() + S::one());
    let mut tau = vec![usize::MAX; n];
    let mut sigma = vec![usize::MAX; n];
    for x in 0..n {
        let values = (0..n).map(|i| if i == x { S::one() } else { half.clone() }).collect();
        let image = oracle.eval(&SupVector::new(x_space.clone(), values)?)?;
        let peaks = features(&image).map_err(|_| Error::OracleContract("image is not a sphere function".into()))?.peaks;
        if peaks.len() != 1 {
            report.rejection = Some(HomeoRejection::NonSingletonPeak {
                point: x_space.id(x).into(),
                peaks: peaks.iter().map(|y| y_space.id(y).to_string()).collect(),
            });
            return Ok(report);
        }
        let y = peaks.first().expect("one peak");
        if sigma[y] != usize::MAX {
            report.rejection = Some(HomeoRejection::NotBijective {
                points: [x_space.id(sigma[y]).into(), x_space.id(x).into()],
                image: y_space.id(y).into(),
            });
            return Ok(report);
        }
        tau[x] = y;
        sigma[y] = x;
    }

    let mut samples: Vec<Vec<S>> = Vec::new();
    if n <= cfg.grid_bound {
        for g in grid_sphere_functions(&x_space, &FIVE_LEVELS) {
            samples.push(g.values().iter().map(|&v| S::from_f64_lossy(v)).collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.n_random {
        let mut v: Vec<S> = (0..n).map(|_| S::from_f64_lossy(rng.gen_range(0..=256) as f64 / 256.0)).collect();
        if n > 0 {
            v[rng.gen_range(0..n)] = S::one();
        }
        samples.push(v);
    }
    report.samples = samples.len();
    for v in samples {
        let f = SupVector::new(x_space.clone(), v)?;
        let image = oracle.eval(&f)?;
        let dev = (0..n)
            .map(|y| (image.value(y).clone() - f.value(sigma[y]).clone()).abs().to_f64_lossy())
            .fold(0.0, f64::max);
        if dev > report.max_deviation {
            report.max_deviation = dev;
        }
        if dev > cfg.tol && report.rejection.is_none() {
            report.rejection = Some(HomeoRejection::NotComposition {
                sample: f.values().iter().map(|v| v.to_f64_lossy()).collect(),
                deviation: dev,
            });
        }
    }
    report.sigma = Some(sigma);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn pts(n: usize) -> Arc<PointSpace> {
        Arc::new(PointSpace::numbered(n))
    }

    fn sv(space: &Arc<PointSpace>, v: &[f64]) -> SupVector<f64> {
        SupVector::new(space.clone(), v.to_vec()).unwrap()
    }

    #[test]
    fn features_examples() {
        let x = pts(3);
        let ft = features(&sv(&x, &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!((ft.peaks, ft.zeros.is_empty(), ft.in_p), (x.all(), true, true));
        let ft = features(&sv(&x, &[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(ft.peaks, AtomSet::singleton(0));
        assert_eq!(ft.zeros, AtomSet::from_mask(0b110));
        assert!(!ft.in_p);
        let ft = features(&sv(&x, &[1.0, 0.5, 0.5])).unwrap();
        assert!(ft.in_p);
        assert!(features(&sv(&x, &[0.5, 0.5, 0.5])).is_err());
    }

    #[test]
    fn exact_peaks_need_equality() {
        let x = pts(2);
        let f = SupVector::new(x, vec![ratio(1, 1), BigRational::new(999_999_999_999i64.into(), 1_000_000_000_000i64.into())]).unwrap();
        assert_eq!(f.peak_set(), AtomSet::singleton(0));
    }

    #[test]
    fn sharp_of_set_examples() {
        let x = pts(3);
        let g = sv(&x, &[1.0, 0.5, 0.25]);
        let s = sharp_of_set(3, &[g]).unwrap();
        assert_eq!((s.e().clone(), s.f().clone()), (x.all(), AtomSet::from_mask(0b110)));
        assert_eq!(sharp_of_set::<f64>(3, &[]).unwrap(), SharpFamily::full(3));
        let spike = sv(&x, &[1.0, 0.0, 0.0]);
        let s = sharp_of_set(3, &[spike]).unwrap();
        assert_eq!(s.e(), &AtomSet::singleton(0));
        assert_eq!(s.f(), &AtomSet::from_mask(0b110));
    }

    #[test]
    fn sharp_of_family_examples() {
        let n = 4;
        let all = AtomSet::full(n);
        let peaks = AtomSet::from_mask(0b0011);
        let fam = SharpFamily::new(n, all.clone(), all.difference(&peaks));
        assert_eq!(sharp_of_family(&fam), SharpFamily::new(n, peaks, AtomSet::empty()));
        assert_eq!(sharp_of_family(&SharpFamily::empty(n)), SharpFamily::full(n));
        assert!(sharp_of_family(&SharpFamily::full(n)).is_empty());
        let one = SharpFamily::full(1);
        assert_eq!(sharp_of_family(&one), SharpFamily::new(1, AtomSet::full(1), AtomSet::empty()));
    }

    #[test]
    fn membership_examples() {
        let x = pts(3);
        let f = sv(&x, &[1.0, 0.5, 0.0]);
        let fam = SharpFamily::new(3, x.all(), AtomSet::from_mask(0b011));
        assert!(!membership(&f, &fam));
        let g = sv(&x, &[1.0, 0.5, 0.5]);
        let p = SharpFamily::new(3, g.peak_set(), AtomSet::empty());
        assert!(membership(&g, &p));
    }

    #[test]
    fn dist_to_px_examples() {
        let x = pts(3);
        let f = sv(&x, &[1.0, 0.3, 0.0]);
        assert_eq!(dist_to_px(&f, 0).unwrap(), 0.0);
        assert!((dist_to_px(&f, 1).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(dist_to_px(&f, 2).unwrap(), 1.0);
        for y in 0..3 {
            let grid = dist_to_px_grid(&f, y, 40);
            assert!((grid - dist_to_px(&f, y).unwrap()).abs() < 1e-9, "{y}: {grid}");
        }
    }

    #[test]
    fn homeo_round_trip() {
        let x = pts(3);
        let y = Arc::new(PointSpace::new(["a", "b", "c"]).unwrap());
        let oracle = PermutationOracle::new(x.clone(), y, vec![1, 2, 0]).unwrap();
        let rep = extract_homeo::<f64>(&oracle, &HomeoConfig::default()).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.sigma.as_deref(), Some(&[1, 2, 0][..]));
        assert_eq!(rep.max_deviation, 0.0);

        let id = PermutationOracle::new(x.clone(), x.clone(), vec![0, 1, 2]).unwrap();
        assert_eq!(extract_homeo::<f64>(&id, &HomeoConfig::default()).unwrap().sigma, Some(vec![0, 1, 2]));

        let sq = SquareOracle::new(x);
        let rep = extract_homeo::<f64>(&sq, &HomeoConfig::default()).unwrap();
        assert!(matches!(rep.rejection, Some(HomeoRejection::NotComposition { .. })));
    }
}
