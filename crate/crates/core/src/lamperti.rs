//! Weighted composition operators `f ↦ Λ̂(f) · h`.
//!
//! `Λ̂` is the linear map sending `1_A` to `1_{Λ(A)}`; at finite scale it moves
//! the value of each positive finite atom to its image atom. With the weight
//! `h = (dμ^Λ/dν)^{1/p}` the operator is an isometric order isomorphism of
//! `L^p(μ)` onto `L^p(ν)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp_geometry::{same_space, LpVector, SphereVector};
use crate::measure::RegularSetIso;
use crate::radon_nikodym::{rn_derivative, Scope, SubSigmaAlgebra};
use crate::scalar::{Exponent, Scalar, Weight};
use crate::set::AtomSet;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct LampertiOperator<S> {
    iso: RegularSetIso<S>,
    density: Vec<S>,
    h: Vec<S>,
    p: Exponent,
}

/// `dμ^Λ/dν` on the codomain atoms, exactly.
pub fn canonical_density<S: Scalar>(iso: &RegularSetIso<S>) -> Result<Vec<S>> {
    let nu = iso.codomain();
    let masses = iso.pushforward()?.atom_masses();
    for (y, m) in masses.iter().enumerate() {
        if let Some(m) = m {
            if nu.weight(y).is_zero() && m.is_positive() {
                return Err(Error::AbsoluteContinuity(nu.id(y).to_string()));
            }
        }
    }
    let lambda = masses.into_iter().map(|m| m.unwrap_or(Weight::Infinite)).collect();
    let c = SubSigmaAlgebra::singletons(nu, lambda)?;
    Ok(rn_derivative(nu, &c, Scope::SigmaOnly)?.g)
}

/// `h = (dμ^Λ/dν)^{1/p}`.
pub fn canonical_weight<S: Scalar>(iso: &RegularSetIso<S>, p: Exponent) -> Result<Vec<S>> {
    Ok(canonical_density(iso)?.iter().map(|d| d.root(p.get())).collect())
}

impl<S: Scalar> LampertiOperator<S> {
    /// Operator with weight `density^{1/p}`.
    pub fn from_density(iso: RegularSetIso<S>, density: Vec<S>, p: Exponent) -> Result<Self> {
        let nu = iso.codomain();
        if density.len() != nu.len() {
            return Err(Error::InvalidVector(format!("{} density values for {} atoms", density.len(), nu.len())));
        }
        if let Some(y) = density.iter().position(|d| d.is_negative()) {
            return Err(Error::InvalidVector(format!("negative weight at `{}`", nu.id(y))));
        }
        if let Some((_, y)) = iso.pairs().find(|&(_, y)| density[y].is_zero()) {
            return Err(Error::InvalidVector(format!("weight vanishes on image atom `{}`", nu.id(y))));
        }
        let h = density.iter().map(|d| d.root(p.get())).collect();
        Ok(Self { iso, density, h, p })
    }

    /// Operator with an explicit weight `h`.
    pub fn from_weight(iso: RegularSetIso<S>, h: Vec<S>, p: Exponent) -> Result<Self> {
        let density: Vec<S> = h.iter().map(|x| x.powf(p.get())).collect();
        let mut op = Self::from_density(iso, density, p)?;
        op.h = h;
        Ok(op)
    }

    /// The isometry induced by `Λ`.
    pub fn canonical(iso: RegularSetIso<S>, p: Exponent) -> Result<Self> {
        let density = canonical_density(&iso)?;
        Self::from_density(iso, density, p)
    }

    pub fn iso(&self) -> &RegularSetIso<S> {
        &self.iso
    }

    pub fn h(&self) -> &[S] {
        &self.h
    }

    /// `h^p`.
    pub fn density(&self) -> &[S] {
        &self.density
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    /// `(Tf)(y) = f(Λ⁻¹ y) h(y)` on image atoms and `0` elsewhere.
    pub fn apply(&self, f: &LpVector<S>) -> Result<LpVector<S>> {
        if f.p() != self.p {
            return Err(Error::ExponentMismatch(f.p().get(), self.p.get()));
        }
        if !same_space(f.space(), self.iso.domain()) {
            return Err(Error::SpaceMismatch("input is not on the operator's domain".into()));
        }
        let mut values = vec![S::zero(); self.iso.codomain().len()];
        for (a, y) in self.iso.pairs() {
            values[y] = f.value(a).clone() * self.h[y].clone();
        }
        LpVector::new(self.iso.codomain().clone(), values, self.p)
    }

    /// Image of a sphere vector, trusted to lie on the sphere.
    pub fn apply_sphere(&self, f: &SphereVector<S>) -> Result<SphereVector<S>> {
        Ok(SphereVector::trusted(self.apply(f.as_vector())?))
    }
}

/// Result of a sampled check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub passed: bool,
    pub max_deviation: f64,
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn new() -> Self {
        Self { passed: true, max_deviation: 0.0, witness: None }
    }

    fn record(&mut self, deviation: f64, tol: f64, describe: impl FnOnce() -> String) {
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
        if (deviation > tol || deviation.is_nan()) && self.passed {
            self.passed = false;
            self.witness = Some(describe());
        }
    }
}

/// Random vector with values in `[-1, 1]` (or `[0, 1]`) on finite atoms.
pub fn random_vector<S: Scalar>(
    rng: &mut ChaCha8Rng,
    space: &std::sync::Arc<crate::measure::FiniteMeasureSpace<S>>,
    p: Exponent,
    signed: bool,
) -> LpVector<S> {
    let fin = space.finite_atoms();
    let values = (0..space.len())
        .map(|i| {
            if !fin.contains(i) {
                return S::zero();
            }
            let x: f64 = if signed { rng.gen_range(-1.0..=1.0) } else { rng.gen_range(0.0..=1.0) };
            S::from_f64_lossy((x * 1024.0).round() / 1024.0)
        })
        .collect();
    LpVector::new(space.clone(), values, p).expect("finite values on finite atoms")
}

/// Certifies an operator as an isometric order isomorphism.
///
/// Checks the atomwise change of measure `h(y)^p ν(y) = μ(Λ⁻¹ y)`, then
/// `‖Tf‖ = ‖f‖` on `samples` signed and `samples` nonnegative vectors, then
/// `f ≤ g ⟺ Tf ≤ Tg` on sampled pairs (compared on non-null atoms).
pub fn check_isometry<S: Scalar>(t: &LampertiOperator<S>, samples: usize, seed: u64, tol: f64) -> CheckOutcome {
    let mut out = CheckOutcome::new();
    let mu = t.iso.domain();
    let nu = t.iso.codomain();
    for y in nu.positive_finite_atoms().iter() {
        let lhs = t.density[y].clone() * nu.weight(y).finite().expect("finite").clone();
        let rhs = t.iso.preimage_of_atom(y).map_or(S::zero(), |a| mu.weight(a).finite().expect("finite").clone());
        let dev = (lhs.clone() - rhs.clone()).abs().to_f64_lossy();
        out.record(dev, if S::EXACT { 0.0 } else { tol }, || {
            format!("change of measure fails at `{}`: h^p ν = {} but μ(Λ⁻¹ y) = {}", nu.id(y), lhs, rhs)
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = t.p;
    for k in 0..2 * samples {
        let f = random_vector(&mut rng, mu, p, k % 2 == 0);
        let Ok(tf) = t.apply(&f) else {
            out.record(f64::INFINITY, tol, || "operator rejected a domain vector".into());
            continue;
        };
        let (a, b) = (f.norm().to_f64_lossy(), tf.norm().to_f64_lossy());
        out.record((a - b).abs() / a.max(1.0), tol, || format!("‖f‖ = {a} but ‖Tf‖ = {b} for f = {:?}", f.values()));
    }

    let pos_mu = mu.positive_atoms().intersection(mu.finite_atoms());
    let pos_nu = nu.positive_atoms().intersection(nu.finite_atoms());
    let le = |f: &LpVector<S>, g: &LpVector<S>, on: &AtomSet| on.iter().all(|i| f.value(i) <= g.value(i));
    for k in 0..samples {
        let f = random_vector(&mut rng, mu, p, true);
        let g = if k % 2 == 0 {
            f.add(&random_vector(&mut rng, mu, p, false)).expect("same space")
        } else {
            random_vector(&mut rng, mu, p, true)
        };
        let (tf, tg) = (t.apply(&f).expect("domain vector"), t.apply(&g).expect("domain vector"));
        let dom = le(&f, &g, &pos_mu);
        let cod = le(&tf, &tg, &pos_nu);
        out.record(if dom == cod { 0.0 } else { 1.0 }, 0.5, || {
            format!("order mismatch: f ≤ g is {dom} but Tf ≤ Tg is {cod}")
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::FiniteMeasureSpace;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use std::sync::Arc;

    fn swap_example(p: f64) -> LampertiOperator<BigRational> {
        let mu = Arc::new(FiniteMeasureSpace::from_weights([ratio(1, 1), ratio(1, 1)]).unwrap());
        let nu = Arc::new(FiniteMeasureSpace::from_weights([ratio(2, 1), ratio(1, 2)]).unwrap());
        let iso = RegularSetIso::new(mu, nu, [(0, 1), (1, 0)]).unwrap();
        LampertiOperator::canonical(iso, Exponent::new(p).unwrap()).unwrap()
    }

    #[test]
    fn swap_weights() {
        let t = swap_example(1.0);
        assert_eq!(t.h(), &[ratio(1, 2), ratio(2, 1)]);
        let t2 = swap_example(2.0);
        assert!((t2.h()[0].to_f64_lossy() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((t2.h()[1].to_f64_lossy() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(t2.density(), t.density());
    }

    #[test]
    fn apply_examples() {
        let t = swap_example(1.0);
        let f = LpVector::indicator(t.iso().domain().clone(), &AtomSet::singleton(0), t.p()).unwrap();
        let tf = t.apply(&f).unwrap();
        assert_eq!(tf.values(), &[ratio(0, 1), ratio(2, 1)]);
        assert_eq!(tf.norm(), ratio(1, 1));
        let z = LpVector::zero(t.iso().domain().clone(), t.p());
        assert!(t.apply(&z).unwrap().values().iter().all(|v| v == &ratio(0, 1)));
    }

    #[test]
    fn identity_weight_is_one() {
        let mu = Arc::new(FiniteMeasureSpace::from_weights([ratio(3, 2), ratio(5, 1)]).unwrap());
        let t = LampertiOperator::canonical(RegularSetIso::identity(mu.clone()), Exponent::new(2.0).unwrap()).unwrap();
        assert!(t.h().iter().all(|h| *h == ratio(1, 1)));
        let f = LpVector::new(mu, vec![ratio(-1, 3), ratio(7, 2)], t.p()).unwrap();
        assert_eq!(t.apply(&f).unwrap(), f);
    }

    #[test]
    fn isometry_certificates() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let t = swap_example(p);
            let c = check_isometry(&t, 100, 1, 1e-12);
            assert!(c.passed, "p = {p}: {c:?}");
        }
        let t = swap_example(1.0);
        let mut h = t.h().to_vec();
        h[1] = h[1].clone() * ratio(2, 1);
        let bad = LampertiOperator::from_weight(t.iso().clone(), h, t.p()).unwrap();
        let c = check_isometry(&bad, 20, 1, 1e-12);
        assert!(!c.passed);
        assert!(c.witness.is_some());
    }

    #[test]
    fn absolute_continuity_violation() {
        let mu = Arc::new(FiniteMeasureSpace::from_weights([1.0, 1.0]).unwrap());
        let nu = Arc::new(FiniteMeasureSpace::from_weights([1.0, 1.0]).unwrap());
        let iso = RegularSetIso::new(mu, nu, [(0, 0), (1, 1)]).unwrap();
        assert!(LampertiOperator::from_weight(iso, vec![1.0, 0.0], Exponent::new(1.0).unwrap()).is_err());
    }
}
