//! Vectors of `L^p(μ)` over a finite space, the positive unit sphere and
//! distances to restricted spheres.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{FiniteMeasureSpace, NullClass};
use crate::scalar::{Exponent, Scalar};
use crate::set::AtomSet;
use crate::{Error, Result};

/// Tolerance for sphere membership in float mode.
pub const SPHERE_TOL: f64 = 1e-12;

/// A function on the atoms of a space, viewed in `L^p`.
///
/// Atoms of infinite weight must carry the value `0`.
#[derive(Clone, Debug)]
pub struct LpVector<S> {
    space: Arc<FiniteMeasureSpace<S>>,
    values: Vec<S>,
    p: Exponent,
}

impl<S: Scalar> PartialEq for LpVector<S> {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && same_space(&self.space, &other.space) && self.values == other.values
    }
}

pub(crate) fn same_space<S: Scalar>(a: &Arc<FiniteMeasureSpace<S>>, b: &Arc<FiniteMeasureSpace<S>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<S: Scalar> LpVector<S> {
    pub fn new(space: Arc<FiniteMeasureSpace<S>>, values: Vec<S>, p: Exponent) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::InvalidVector(format!("{} values for {} atoms", values.len(), space.len())));
        }
        if let Some(i) = space.infinite_atoms().iter().find(|&i| !values[i].is_zero()) {
            return Err(Error::InvalidVector(format!("atom `{}` has infinite weight but a non-zero value", space.id(i))));
        }
        if let Some(i) = values.iter().position(|v| !v.to_f64_lossy().is_finite()) {
            return Err(Error::InvalidVector(format!("value at `{}` is not finite", space.id(i))));
        }
        Ok(Self { space, values, p })
    }

    /// Builds a vector from `(atom id, value)` pairs; unspecified atoms get `0`.
    pub fn from_ids<T: AsRef<str>>(space: Arc<FiniteMeasureSpace<S>>, pairs: &[(T, S)], p: Exponent) -> Result<Self> {
        let mut values = vec![S::zero(); space.len()];
        for (id, v) in pairs {
            values[space.index_of(id.as_ref())?] = v.clone();
        }
        Self::new(space, values, p)
    }

    pub fn zero(space: Arc<FiniteMeasureSpace<S>>, p: Exponent) -> Self {
        let values = vec![S::zero(); space.len()];
        Self { space, values, p }
    }

    /// `1_A`; `A` must avoid atoms of infinite weight.
    pub fn indicator(space: Arc<FiniteMeasureSpace<S>>, set: &AtomSet, p: Exponent) -> Result<Self> {
        let values = (0..space.len()).map(|i| if set.contains(i) { S::one() } else { S::zero() }).collect();
        Self::new(space, values, p)
    }

    pub fn space(&self) -> &Arc<FiniteMeasureSpace<S>> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &S {
        &self.values[i]
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ExponentMismatch(self.p.get(), other.p.get()));
        }
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch("vectors live on different spaces".into()));
        }
        Ok(())
    }

    /// `∑ |f(x)|^p μ(x)`.
    pub fn norm_pow(&self) -> S {
        let p = self.p.get();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .fold(S::zero(), |acc, (i, v)| {
                let w = self.space.weight(i).finite().expect("non-zero values sit on finite atoms");
                acc + v.abs().powf(p) * w.clone()
            })
    }

    pub fn norm(&self) -> S {
        self.norm_pow().root(self.p.get())
    }

    /// `{x : f(x) ≠ 0}`.
    pub fn support(&self) -> AtomSet {
        self.values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i).collect()
    }

    /// The support modulo null atoms.
    pub fn support_class(&self) -> NullClass {
        self.space.class_of(&self.support())
    }

    /// `f · 1_F`.
    pub fn restrict(&self, set: &AtomSet) -> Self {
        let values = self.values.iter().enumerate().map(|(i, v)| if set.contains(i) { v.clone() } else { S::zero() }).collect();
        Self { space: self.space.clone(), values, p: self.p }
    }

    pub fn scale(&self, c: &S) -> Self {
        let values = self.values.iter().map(|v| v.clone() * c.clone()).collect();
        Self { space: self.space.clone(), values, p: self.p }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { space: self.space.clone(), values, p: self.p })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn positive_part(&self) -> Self {
        let values = self.values.iter().map(|v| if v.is_positive() { v.clone() } else { S::zero() }).collect();
        Self { space: self.space.clone(), values, p: self.p }
    }

    pub fn negative_part(&self) -> Self {
        let values = self.values.iter().map(|v| if v.is_negative() { -v.clone() } else { S::zero() }).collect();
        Self { space: self.space.clone(), values, p: self.p }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    /// `‖f − g‖_p`.
    pub fn dist(&self, other: &Self) -> Result<S> {
        Ok(self.sub(other)?.norm())
    }

    /// `f / ‖f‖_p`; fails on null vectors.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::NoMinimizer);
        }
        Ok(self.scale(&(S::one() / n)))
    }
}

/// A nonnegative vector of norm one.
#[derive(Clone, Debug)]
pub struct SphereVector<S>(LpVector<S>);

impl<S: Scalar> PartialEq for SphereVector<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<S: Scalar> SphereVector<S> {
    pub fn new(v: LpVector<S>) -> Result<Self> {
        if !v.is_nonnegative() {
            return Err(Error::NotOnSphere("negative value".into()));
        }
        let np = v.norm_pow();
        let on_sphere = if S::EXACT && v.p.get().fract() == 0.0 {
            np.is_one()
        } else {
            (np.to_f64_lossy() - 1.0).abs() <= SPHERE_TOL
        };
        if !on_sphere {
            return Err(Error::NotOnSphere(format!("‖f‖_p^p = {}", np.to_f64_lossy())));
        }
        Ok(Self(v))
    }

    pub(crate) fn trusted(v: LpVector<S>) -> Self {
        Self(v)
    }

    /// Normalizes a nonnegative non-null vector onto the sphere.
    pub fn normalize(v: LpVector<S>) -> Result<Self> {
        if !v.is_nonnegative() {
            return Err(Error::NotOnSphere("negative value".into()));
        }
        Ok(Self(v.normalized()?))
    }

    /// `μ(A)^{-1/p} 1_A` for a set of finite positive measure.
    pub fn normalized_indicator(space: Arc<FiniteMeasureSpace<S>>, set: &AtomSet, p: Exponent) -> Result<Self> {
        Self::normalize(LpVector::indicator(space, set, p)?)
    }

    pub fn as_vector(&self) -> &LpVector<S> {
        &self.0
    }

    pub fn into_vector(self) -> LpVector<S> {
        self.0
    }

    pub fn values(&self) -> &[S] {
        self.0.values()
    }

    pub fn space(&self) -> &Arc<FiniteMeasureSpace<S>> {
        self.0.space()
    }

    pub fn p(&self) -> Exponent {
        self.0.p
    }

    pub fn dist(&self, other: &Self) -> Result<S> {
        self.0.dist(&other.0)
    }
}

/// The normalized restriction `f|_F / ‖f|_F‖_p`, which attains the distance
/// from `f` to the positive sphere of functions supported in `F`.
pub fn nearest_restricted<S: Scalar>(f: &SphereVector<S>, set: &AtomSet) -> Result<SphereVector<S>> {
    let r = f.0.restrict(set);
    if r.norm_pow().is_zero() {
        return Err(Error::NoMinimizer);
    }
    Ok(SphereVector(r.normalized()?))
}

/// Whether the positive sphere of functions supported in `F` is non-empty.
pub fn restricted_sphere_nonempty<S: Scalar>(space: &FiniteMeasureSpace<S>, set: &AtomSet) -> bool {
    !set.is_disjoint(&space.positive_finite_atoms())
}

/// `(1 − ‖f|_F‖^p + (1 − ‖f|_F‖)^p)^{1/p}`, the distance from `f` to the
/// positive sphere of functions supported in `F`; `2^{1/p}` when `f|_F = 0`.
///
/// On the sphere `1 − ‖f|_F‖^p` is the mass of `f` outside `F`, and that is
/// how it is computed: the subtraction would leave a rounding residue that
/// the final `p`-th root inflates to about `1e-5` when `f` lives in `F`.
pub fn dist_restricted_sphere<S: Scalar>(f: &SphereVector<S>, set: &AtomSet) -> Result<S> {
    if !restricted_sphere_nonempty(f.space(), set) {
        return Err(Error::EmptyRestrictedSphere);
    }
    let p = f.p().get();
    let rp = f.0.restrict(set).norm_pow();
    let two = S::one() + S::one();
    if rp.is_zero() {
        return Ok(two.root(p));
    }
    let outside = f.0.restrict(&set.complement(f.space().len())).norm_pow();
    let r = rp.root(p);
    let inner = outside + (S::one() - r).abs().powf(p);
    Ok(inner.root(p))
}

/// Search effort of [`dist_oracle_bruteforce`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub seed: u64,
    /// Random starting points for the descent.
    pub starts: usize,
    /// Maximum sweeps over coordinate pairs per start.
    pub max_sweeps: usize,
    /// Grid points per angle when the restricted sphere has dimension ≤ 3.
    pub grid: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { seed: 0, starts: 6, max_sweeps: 400, grid: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub converged: bool,
}

/// Distance from `f` to the restricted positive sphere by direct search.
///
/// Works in the coordinates `w = μ^{1/p} g`, in which the restricted sphere
/// is the positive part of the unit sphere of `ℓ^p` over the positive finite
/// atoms of `F`. Each descent step moves mass between two coordinates along
/// the curve `(R cos^{2/p} θ, R sin^{2/p} θ)`, which stays on the sphere, and
/// optimizes `θ` by a grid scan followed by golden-section refinement. Every
/// evaluated point is feasible, so the result never undercuts the true
/// distance by more than rounding.
pub fn dist_oracle_bruteforce<S: Scalar>(f: &SphereVector<S>, set: &AtomSet, budget: &OracleBudget) -> Result<OracleResult> {
    let space = f.space();
    if !restricted_sphere_nonempty(space, set) {
        return Err(Error::EmptyRestrictedSphere);
    }
    let p = f.p().get();
    let pf = space.positive_finite_atoms();
    let coords: Vec<usize> = set.intersection(&pf).iter().collect();
    let u = |i: usize| {
        let mu = space.weight(i).to_f64_lossy();
        mu.powf(1.0 / p) * f.values()[i].to_f64_lossy()
    };
    let outside: f64 = pf.iter().filter(|i| !set.contains(*i)).map(|i| u(i).abs().powf(p)).sum();
    let target: Vec<f64> = coords.iter().map(|&i| u(i)).collect();
    let problem = Problem { target, outside, p };

    let k = problem.target.len();
    if k == 1 {
        return Ok(OracleResult { value: problem.value(&[1.0]).powf(1.0 / p), converged: true });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut starts: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    starts.push(problem.project(&vec![1.0; k]));
    for _ in 0..budget.starts {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        starts.push(problem.project(&raw));
    }
    if k <= 3 {
        starts.push(problem.grid_best(budget.grid));
    }

    let mut best = f64::INFINITY;
    let mut converged = true;
    for s in starts {
        let (w, ok) = problem.descend(s, budget.max_sweeps);
        converged &= ok;
        best = best.min(problem.value(&w));
    }
    Ok(OracleResult { value: best.max(0.0).powf(1.0 / p), converged })
}

struct Problem {
    target: Vec<f64>,
    outside: f64,
    p: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

impl Problem {
    fn value(&self, w: &[f64]) -> f64 {
        self.outside + self.target.iter().zip(w).map(|(u, w)| (u - w).abs().powf(self.p)).sum::<f64>()
    }

    fn project(&self, raw: &[f64]) -> Vec<f64> {
        let n: f64 = raw.iter().map(|x| x.abs().powf(self.p)).sum::<f64>().powf(1.0 / self.p);
        raw.iter().map(|x| x.abs() / n).collect()
    }

    fn on_curve(&self, r: f64, theta: f64) -> (f64, f64) {
        let e = 2.0 / self.p;
        (r * theta.cos().max(0.0).powf(e), r * theta.sin().max(0.0).powf(e))
    }

    fn pair_cost(&self, i: usize, j: usize, r: f64, theta: f64) -> f64 {
        let (a, b) = self.on_curve(r, theta);
        (self.target[i] - a).abs().powf(self.p) + (self.target[j] - b).abs().powf(self.p)
    }

    /// Best point of the curve through coordinates `i`, `j`.
    fn best_on_pair(&self, w: &[f64], i: usize, j: usize) -> (f64, f64) {
        let r = (w[i].powf(self.p) + w[j].powf(self.p)).powf(1.0 / self.p);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        let scan = 24;
        let mut best_t = 0.0;
        let mut best_v = f64::INFINITY;
        for s in 0..=scan {
            let t = half_pi * s as f64 / scan as f64;
            let v = self.pair_cost(i, j, r, t);
            if v < best_v {
                best_v = v;
                best_t = t;
            }
        }
        let h = half_pi / scan as f64;
        let (mut lo, mut hi) = ((best_t - h).max(0.0), (best_t + h).min(half_pi));
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = self.pair_cost(i, j, r, x1);
        let mut f2 = self.pair_cost(i, j, r, x2);
        while hi - lo > 1e-13 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = self.pair_cost(i, j, r, x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = self.pair_cost(i, j, r, x2);
            }
        }
        let mid = 0.5 * (lo + hi);
        let cur = (w[i], w[j]);
        let cur_v = (self.target[i] - cur.0).abs().powf(self.p) + (self.target[j] - cur.1).abs().powf(self.p);
        let cand = [(self.pair_cost(i, j, r, mid), mid), (best_v, best_t)];
        let (v, t) = cand.iter().copied().fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
        if v < cur_v {
            self.on_curve(r, t)
        } else {
            cur
        }
    }

    fn descend(&self, mut w: Vec<f64>, max_sweeps: usize) -> (Vec<f64>, bool) {
        let k = w.len();
        let mut last = self.value(&w);
        for _ in 0..max_sweeps {
            for i in 0..k {
                for j in i + 1..k {
                    let (a, b) = self.best_on_pair(&w, i, j);
                    w[i] = a;
                    w[j] = b;
                }
            }
            let v = self.value(&w);
            if last - v <= 1e-16 {
                return (w, true);
            }
            last = v;
        }
        (w, false)
    }

    /// Best point of a dense angular grid (dimension 2 or 3).
    fn grid_best(&self, n: usize) -> Vec<f64> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let e = 2.0 / self.p;
        let mut best = (f64::INFINITY, vec![]);
        let mut consider = |w: Vec<f64>| {
            let v = self.value(&w);
            if v < best.0 {
                best = (v, w);
            }
        };
        match self.target.len() {
            2 => {
                for s in 0..=n {
                    let t = half_pi * s as f64 / n as f64;
                    consider(vec![t.cos().powf(e), t.sin().powf(e)]);
                }
            }
            _ => {
                for s in 0..=n {
                    let a = half_pi * s as f64 / n as f64;
                    for q in 0..=n {
                        let b = half_pi * q as f64 / n as f64;
                        // Squares of a point on the unit 2-sphere sum to one.
                        let x = a.cos() * b.cos();
                        let y = a.cos() * b.sin();
                        let z = a.sin();
                        consider(vec![(x * x).powf(1.0 / self.p), (y * y).powf(1.0 / self.p), (z * z).powf(1.0 / self.p)]);
                    }
                }
            }
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(ws: &[f64]) -> Arc<FiniteMeasureSpace<f64>> {
        Arc::new(FiniteMeasureSpace::from_weights(ws.iter().copied()).unwrap())
    }

    fn p(x: f64) -> Exponent {
        Exponent::new(x).unwrap()
    }

    #[test]
    fn norm_examples() {
        let s = sp(&[1.0, 1.0]);
        assert_eq!(LpVector::new(s.clone(), vec![1.0, 0.0], p(2.0)).unwrap().norm(), 1.0);
        assert_eq!(LpVector::new(s.clone(), vec![1.0, 1.0], p(1.0)).unwrap().norm(), 2.0);
        let h = 0.5f64.sqrt();
        assert!((LpVector::new(s, vec![h, h], p(2.0)).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn support_class_examples() {
        let s = sp(&[1.0, 1.0]);
        let v = LpVector::new(s.clone(), vec![1.0, 0.0], p(2.0)).unwrap();
        assert_eq!(v.support_class().canonical(), &AtomSet::singleton(0));
        assert!(LpVector::zero(s, p(2.0)).support_class().is_empty());
        let z = sp(&[1.0, 0.0]);
        let v = LpVector::new(z, vec![1.0, 1.0], p(2.0)).unwrap();
        assert_eq!(v.support_class().canonical(), &AtomSet::singleton(0));
    }

    #[test]
    fn infinite_atoms_must_vanish() {
        let s = Arc::new(
            FiniteMeasureSpace::new([("a", crate::Weight::Finite(1.0)), ("b", crate::Weight::Infinite)]).unwrap(),
        );
        assert!(LpVector::new(s.clone(), vec![1.0, 1.0], p(1.0)).is_err());
        assert!(LpVector::new(s, vec![1.0, 0.0], p(1.0)).is_ok());
    }

    #[test]
    fn nearest_and_distance_examples() {
        let s = sp(&[1.0, 1.0]);
        let h = 0.5f64.sqrt();
        let f = SphereVector::new(LpVector::new(s.clone(), vec![h, h], p(2.0)).unwrap()).unwrap();
        let a = AtomSet::singleton(0);
        assert_eq!(nearest_restricted(&f, &a).unwrap().values(), &[1.0, 0.0]);
        let d = dist_restricted_sphere(&f, &a).unwrap();
        assert!((d - 0.765_366_864_730_179_8).abs() < 1e-12, "{d}");
        assert!(dist_restricted_sphere(&f, &s.all()).unwrap().abs() < 1e-15);
        assert_eq!(nearest_restricted(&f, &s.all()).unwrap(), f);

        let g = SphereVector::new(LpVector::new(s.clone(), vec![0.8, 0.2], p(1.0)).unwrap()).unwrap();
        let b = AtomSet::singleton(1);
        assert_eq!(nearest_restricted(&g, &b).unwrap().values(), &[0.0, 1.0]);

        let e = SphereVector::new(LpVector::new(s, vec![1.0, 0.0], p(3.0)).unwrap()).unwrap();
        assert_eq!(dist_restricted_sphere(&e, &b).unwrap(), 2f64.powf(1.0 / 3.0));
        assert!(matches!(nearest_restricted(&e, &b), Err(Error::NoMinimizer)));
    }

    #[test]
    fn empty_restricted_sphere_is_an_error() {
        let s = sp(&[1.0, 0.0]);
        let f = SphereVector::new(LpVector::new(s, vec![1.0, 0.0], p(2.0)).unwrap()).unwrap();
        assert!(matches!(dist_restricted_sphere(&f, &AtomSet::singleton(1)), Err(Error::EmptyRestrictedSphere)));
        assert!(matches!(dist_restricted_sphere(&f, &AtomSet::empty()), Err(Error::EmptyRestrictedSphere)));
    }

    #[test]
    fn oracle_matches_formula_on_small_cases() {
        let s = sp(&[1.0, 2.0, 0.5, 3.0]);
        let f = SphereVector::normalize(LpVector::new(s.clone(), vec![0.3, 0.1, 0.7, 0.2], p(1.5)).unwrap()).unwrap();
        for mask in 1u64..16 {
            let set = AtomSet::from_mask(mask);
            let exact = dist_restricted_sphere(&f, &set).unwrap();
            let oracle = dist_oracle_bruteforce(&f, &set, &OracleBudget::default()).unwrap();
            assert!((exact - oracle.value).abs() <= 1e-6, "mask {mask}: {exact} vs {}", oracle.value);
        }
    }

    #[test]
    fn exact_mode_distance_for_integer_p() {
        use crate::scalar::ratio;
        let s = Arc::new(FiniteMeasureSpace::from_weights([ratio(1, 1), ratio(1, 1)]).unwrap());
        let f = SphereVector::new(LpVector::new(s, vec![ratio(3, 4), ratio(1, 4)], p(1.0)).unwrap()).unwrap();
        let d = dist_restricted_sphere(&f, &AtomSet::singleton(0)).unwrap();
        assert_eq!(d, ratio(1, 2));
    }
}
