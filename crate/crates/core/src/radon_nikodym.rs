//! Radon–Nikodym derivatives of a measure `λ` on a coarser σ-algebra `𝒞`
//! (a partition of the atoms) with respect to a measure `ν` on the atoms.
//!
//! Three entry points:
//!
//! * [`rn_solve_bruteforce`] decides `λ(E) = ∫_E g dν` as a linear
//!   feasibility problem in exact arithmetic and reports uniqueness,
//! * [`rn_conditions`] evaluates the measure-theoretic hypotheses and
//!   predicts existence and uniqueness without solving anything,
//! * [`rn_derivative`] returns a canonical density.
//!
//! Two families of test sets are supported through [`Scope`]: the sets of
//! `𝒞^σ` only, or every set of `𝒞`.

use std::fmt;

use serde::Serialize;

use crate::lp::{feasible_point, independent_rows, minimize, LpOutcome};
use crate::measure::FiniteMeasureSpace;
use crate::scalar::{Scalar, Weight};
use crate::set::AtomSet;
use crate::{Error, Result};

/// A sub-σ-algebra given by a partition of the base atoms, with a measure on
/// its blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct SubSigmaAlgebra<S> {
    n_atoms: usize,
    blocks: Vec<AtomSet>,
    lambda: Vec<Weight<S>>,
    block_of: Vec<usize>,
}

impl<S: Scalar> SubSigmaAlgebra<S> {
    pub fn new(base: &FiniteMeasureSpace<S>, blocks: Vec<AtomSet>, lambda: Vec<Weight<S>>) -> Result<Self> {
        let n = base.len();
        if blocks.len() != lambda.len() {
            return Err(Error::InvalidPartition(format!("{} blocks but {} block measures", blocks.len(), lambda.len())));
        }
        let mut block_of = vec![usize::MAX; n];
        for (k, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidPartition(format!("block {k} is empty")));
            }
            for a in b.iter() {
                if a >= n {
                    return Err(Error::UnknownAtom(format!("#{a}")));
                }
                if block_of[a] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("atom `{}` lies in two blocks", base.id(a))));
                }
                block_of[a] = k;
            }
        }
        if let Some(a) = block_of.iter().position(|&k| k == usize::MAX) {
            return Err(Error::InvalidPartition(format!("atom `{}` is in no block", base.id(a))));
        }
        for w in &lambda {
            if !w.validate() {
                return Err(Error::InvalidPartition(format!("block measure {w} is not in [0, inf]")));
            }
        }
        Ok(Self { n_atoms: n, blocks, lambda, block_of })
    }

    /// Every atom its own block.
    pub fn singletons(base: &FiniteMeasureSpace<S>, lambda: Vec<Weight<S>>) -> Result<Self> {
        Self::new(base, (0..base.len()).map(AtomSet::singleton).collect(), lambda)
    }

    pub fn blocks(&self) -> &[AtomSet] {
        &self.blocks
    }

    pub fn lambda(&self) -> &[Weight<S>] {
        &self.lambda
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Union of the blocks whose indices are set in `mask`.
    pub fn union_of(&self, mask: &AtomSet) -> AtomSet {
        mask.iter().fold(AtomSet::empty(), |acc, k| acc.union(&self.blocks[k]))
    }

    /// `λ` of the union of the blocks in `mask`.
    pub fn measure_of(&self, mask: &AtomSet) -> Weight<S> {
        crate::scalar::total(mask.iter().map(|k| self.lambda[k].clone()))
    }

    /// Indices of blocks with finite `λ`; their unions make up `𝒞^σ`.
    pub fn finite_blocks(&self) -> AtomSet {
        self.lambda.iter().enumerate().filter(|(_, w)| w.is_finite()).map(|(k, _)| k).collect()
    }

    /// Whether `set` is a union of blocks.
    pub fn contains(&self, set: &AtomSet) -> bool {
        set.iter().all(|a| self.blocks[self.block_of[a]].is_subset(set))
    }
}

/// Which sets must satisfy `λ(E) = ∫_E g dν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// `E ∈ 𝒞^σ`.
    SigmaOnly,
    /// Every `E ∈ 𝒞`.
    AllSets,
}

impl Scope {
    pub const ALL: [Scope; 2] = [Scope::SigmaOnly, Scope::AllSets];
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::SigmaOnly => "sigma_only",
            Scope::AllSets => "all_sets",
        })
    }
}

/// A density `g ≥ 0` with `λ(E) = ∫_E g dν` on the required sets.
#[derive(Clone, Debug, PartialEq)]
pub struct RNSolution<S> {
    pub g: Vec<S>,
    pub unique_mod_null: bool,
    /// A second solution that differs from `g` on a non-null set.
    pub witness: Option<Vec<S>>,
}

fn required_family<S: Scalar>(c: &SubSigmaAlgebra<S>, scope: Scope) -> Vec<AtomSet> {
    let blocks = match scope {
        Scope::SigmaOnly => c.finite_blocks(),
        Scope::AllSets => AtomSet::full(c.blocks.len()),
    };
    blocks.subsets().collect()
}

/// Linear system for one choice of which `∞`-weight atoms carry `g > 0`.
/// `None` when some required identity fails independently of the finite
/// variables.
fn system_for_pattern<S: Scalar>(
    nu: &FiniteMeasureSpace<S>,
    c: &SubSigmaAlgebra<S>,
    family: &[AtomSet],
    vars: &[usize],
    positive_inf: &AtomSet,
) -> Option<(Vec<Vec<S>>, Vec<S>)> {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for mask in family {
        let e = c.union_of(mask);
        let target = c.measure_of(mask);
        let lhs_infinite = !e.is_disjoint(positive_inf);
        match (lhs_infinite, target) {
            (true, Weight::Infinite) => {}
            (true, Weight::Finite(_)) => return None,
            (false, Weight::Infinite) => return None,
            (false, Weight::Finite(t)) => {
                rows.push(
                    vars.iter()
                        .map(|&x| if e.contains(x) { nu.weight(x).finite().expect("finite variable").clone() } else { S::zero() })
                        .collect(),
                );
                rhs.push(t);
            }
        }
    }
    Some((rows, rhs))
}

fn assemble<S: Scalar>(n: usize, vars: &[usize], values: &[S], positive_inf: &AtomSet, inf_value: &S) -> Vec<S> {
    let mut g = vec![S::zero(); n];
    for (&x, v) in vars.iter().zip(values) {
        g[x] = v.clone();
    }
    for x in positive_inf.iter() {
        g[x] = inf_value.clone();
    }
    g
}

/// Decides the existence of a density by enumerating the required sets and
/// solving the resulting linear system exactly.
///
/// Atoms of infinite `ν`-weight contribute `∞` when `g > 0` there and `0`
/// otherwise; every such on/off pattern is tried. Uniqueness modulo
/// `ν`-null atoms is settled by minimising and maximising each finite
/// variable over the solution polytope.
pub fn rn_solve_bruteforce<S: Scalar>(
    nu: &FiniteMeasureSpace<S>,
    c: &SubSigmaAlgebra<S>,
    scope: Scope,
) -> Option<RNSolution<S>> {
    let n = nu.len();
    let family = required_family(c, scope);
    let vars: Vec<usize> = nu.positive_finite_atoms().iter().collect();
    let inf_atoms = nu.infinite_atoms();

    let mut feasible: Vec<(AtomSet, Vec<Vec<S>>, Vec<S>, Vec<S>)> = Vec::new();
    for pattern in inf_atoms.subsets() {
        if let Some((a, b)) = system_for_pattern(nu, c, &family, &vars, &pattern) {
            if let Some(x) = feasible_point(&a, &b, vars.len()) {
                feasible.push((pattern, a, b, x));
            }
        }
    }
    let (pattern, a, b, x) = feasible.first()?.clone();
    let g = assemble(n, &vars, &x, &pattern, &S::one());

    if feasible.len() > 1 {
        let (p2, _, _, x2) = &feasible[1];
        let witness = assemble(n, &vars, x2, p2, &S::one());
        return Some(RNSolution { g, unique_mod_null: false, witness: Some(witness) });
    }
    if !pattern.is_empty() {
        let two = S::one() + S::one();
        let witness = assemble(n, &vars, &x, &pattern, &two);
        return Some(RNSolution { g, unique_mod_null: false, witness: Some(witness) });
    }
    let (a, b) = independent_rows(&a, &b, vars.len()).expect("consistent system");
    if a.len() == vars.len() {
        return Some(RNSolution { g, unique_mod_null: true, witness: None });
    }
    let non_unique = |lo: &[S], other: &[S]| RNSolution {
        g: assemble(n, &vars, lo, &pattern, &S::one()),
        unique_mod_null: false,
        witness: Some(assemble(n, &vars, other, &pattern, &S::one())),
    };
    for k in 0..vars.len() {
        let mut cost = vec![S::zero(); vars.len()];
        cost[k] = S::one();
        let LpOutcome::Optimal { x: lo, value: lo_value } = minimize(&a, &b, &cost) else {
            unreachable!("feasible and bounded below by zero");
        };
        cost[k] = -S::one();
        match minimize(&a, &b, &cost) {
            LpOutcome::Unbounded => {
                let hi = ray_point(&a, &b, vars.len(), k, &lo_value).expect("unbounded direction has feasible points");
                return Some(non_unique(&lo, &hi));
            }
            LpOutcome::Optimal { x: hi, value } => {
                if !(-value).approx_eq(&lo_value, 1e-12) {
                    return Some(non_unique(&lo, &hi));
                }
            }
            LpOutcome::Infeasible => unreachable!("feasibility established above"),
        }
    }
    Some(RNSolution { g, unique_mod_null: true, witness: None })
}

/// A feasible point whose coordinate `k` exceeds `below` by one.
fn ray_point<S: Scalar>(a: &[Vec<S>], b: &[S], n: usize, k: usize, below: &S) -> Option<Vec<S>> {
    let mut rows: Vec<Vec<S>> = a
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.push(S::zero());
            r
        })
        .collect();
    let mut extra = vec![S::zero(); n + 1];
    extra[k] = S::one();
    extra[n] = -S::one();
    rows.push(extra);
    let mut rhs = b.to_vec();
    rhs.push(below.clone() + S::one());
    feasible_point(&rows, &rhs, n + 1).map(|mut x| {
        x.truncate(n);
        x
    })
}

/// Which reasoning produced a prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RnCase {
    /// `𝒞^σ ⊆ 𝔅^σ ⊆ 𝒞`: semi-finiteness and absolute continuity suffice.
    NestedSigmaRings,
    /// `𝔅^σ ⊆ 𝒞`: semi-finiteness, absolute continuity and an exhausting set.
    SemiFiniteAbsCont,
    /// `𝔅^σ = 𝒞^σ`: absolute continuity alone decides.
    EqualSigmaRings,
    /// Absolute continuity plus an exhausting set `A₀`, with the local
    /// uniqueness test.
    ExhaustingSet,
    /// Outside the hypotheses of the general theorems: decided block by block.
    Blockwise,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub case: RnCase,
    pub exists: bool,
    /// `None` when no solution is predicted.
    pub unique: Option<bool>,
}

/// Hypotheses of the Radon–Nikodym theorems evaluated on one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RnConditions {
    /// `(𝒞, λ)` is semi-finite.
    pub c_semifinite: bool,
    /// `(𝔅, ν)` is semi-finite, hence localizable at finite scale.
    pub nu_semifinite: bool,
    /// `𝔅^0 ⊆ 𝒞^0`.
    pub abs_cont: bool,
    /// `𝔅^σ ⊆ 𝒞`.
    pub b_sigma_in_c: bool,
    /// `𝒞^σ ⊆ 𝔅^σ`.
    pub c_sigma_in_b_sigma: bool,
    /// `𝔅^σ = 𝒞^σ`.
    pub sigma_rings_equal: bool,
    /// Some `A₀` has `E ∩ A₀ ∈ 𝔅^σ` and `λ(E) = λ(E ∩ A₀)` for all `E ∈ 𝒞^σ`.
    pub a0_exists: bool,
    /// Every non-null `A ∈ 𝔅^σ` contains a non-null `E ∈ 𝒞^σ`.
    pub local_uniqueness: bool,
    pub sigma_only: Prediction,
    pub all_sets: Prediction,
    /// The two scopes predict different outcomes.
    pub scopes_differ: bool,
}

impl RnConditions {
    pub fn prediction(&self, scope: Scope) -> &Prediction {
        match scope {
            Scope::SigmaOnly => &self.sigma_only,
            Scope::AllSets => &self.all_sets,
        }
    }
}

const A0_ENUMERATION_BOUND: usize = 12;

/// Evaluates every hypothesis by finite enumeration and predicts existence
/// and uniqueness for both scopes.
///
/// The general theorems need `ν` localizable (no `∞` atom here) together with
/// `𝔅^σ ⊆ 𝒞`. Outside that regime the prediction falls back to the
/// block-by-block description of the solution set.
pub fn rn_conditions<S: Scalar>(nu: &FiniteMeasureSpace<S>, c: &SubSigmaAlgebra<S>) -> RnConditions {
    let n = nu.len();
    let finite = nu.finite_atoms();
    let blocks = c.blocks();
    let lambda = c.lambda();

    let c_semifinite = lambda.iter().all(|w| w.is_finite());
    let nu_semifinite = nu.is_semi_finite();
    let null = nu.null_atoms();
    let abs_cont = null.subsets().all(|z| c.contains(&z) && {
        let mask: AtomSet = z.iter().map(|a| c.block_of(a)).collect();
        c.measure_of(&mask).is_zero()
    });
    let singleton_block = |a: usize| blocks[c.block_of(a)].len() == 1;
    let b_sigma_in_c = finite.iter().all(singleton_block);
    let fin_blocks = c.finite_blocks();
    let c_sigma_in_b_sigma = fin_blocks.iter().all(|k| blocks[k].is_subset(finite));
    let b_sigma_in_c_sigma = finite.iter().all(|a| singleton_block(a) && lambda[c.block_of(a)].is_finite());
    let sigma_rings_equal = c_sigma_in_b_sigma && b_sigma_in_c_sigma;

    let a0_exists = if n <= A0_ENUMERATION_BOUND {
        let family: Vec<AtomSet> = fin_blocks.subsets().collect();
        nu.all().subsets().any(|a0| {
            family.iter().all(|mask| {
                let e = c.union_of(mask);
                let cut = e.intersection(&a0);
                cut.is_subset(finite) && c.contains(&cut) && {
                    let cut_mask: AtomSet = cut.iter().map(|a| c.block_of(a)).collect();
                    c.measure_of(&cut_mask) == c.measure_of(mask)
                }
            })
        })
    } else {
        fin_blocks.iter().all(|k| lambda[k].is_zero() || blocks[k].is_subset(finite))
    };

    // Singletons of positive finite atoms are the minimal non-null members of 𝔅^σ.
    let local_uniqueness = nu
        .positive_finite_atoms()
        .iter()
        .all(|a| singleton_block(a) && lambda[c.block_of(a)].is_finite());

    let blockwise = blockwise_predictions(nu, c);
    let regime = nu_semifinite && b_sigma_in_c;

    let all_sets = if !regime {
        blockwise[1].clone()
    } else if c_sigma_in_b_sigma {
        let exists = c_semifinite && abs_cont;
        Prediction { case: RnCase::NestedSigmaRings, exists, unique: exists.then_some(true) }
    } else {
        let exists = c_semifinite && abs_cont && a0_exists;
        Prediction { case: RnCase::SemiFiniteAbsCont, exists, unique: exists.then_some(true) }
    };
    let sigma_only = if !regime {
        blockwise[0].clone()
    } else if sigma_rings_equal {
        Prediction { case: RnCase::EqualSigmaRings, exists: abs_cont, unique: abs_cont.then_some(true) }
    } else if abs_cont {
        Prediction { case: RnCase::ExhaustingSet, exists: a0_exists, unique: a0_exists.then_some(local_uniqueness) }
    } else {
        blockwise[0].clone()
    };
    let scopes_differ = sigma_only.exists != all_sets.exists || sigma_only.unique != all_sets.unique;

    RnConditions {
        c_semifinite,
        nu_semifinite,
        abs_cont,
        b_sigma_in_c,
        c_sigma_in_b_sigma,
        sigma_rings_equal,
        a0_exists,
        local_uniqueness,
        sigma_only,
        all_sets,
        scopes_differ,
    }
}

/// The defining identities decouple over blocks, and each block is decided
/// by counting its positive atoms of finite and infinite weight.
fn blockwise_predictions<S: Scalar>(nu: &FiniteMeasureSpace<S>, c: &SubSigmaAlgebra<S>) -> [Prediction; 2] {
    let pf = nu.positive_finite_atoms();
    let inf = nu.infinite_atoms();
    let mut sigma_exists = true;
    let mut sigma_unique = true;
    let mut all_exists = true;
    let mut all_unique = true;
    for (b, w) in c.blocks().iter().zip(c.lambda()) {
        let n_pf = b.intersection(&pf).len();
        match w {
            Weight::Finite(l) if l.is_zero() => {}
            Weight::Finite(_) => {
                sigma_exists &= n_pf > 0;
                sigma_unique &= n_pf == 1;
                all_unique &= n_pf == 1;
            }
            Weight::Infinite => {
                sigma_unique &= n_pf == 0 && b.is_disjoint(&inf);
                all_exists &= !b.is_disjoint(&inf);
                all_unique = false;
            }
        }
    }
    all_exists &= sigma_exists;
    [
        Prediction { case: RnCase::Blockwise, exists: sigma_exists, unique: sigma_exists.then_some(sigma_unique) },
        Prediction { case: RnCase::Blockwise, exists: all_exists, unique: all_exists.then_some(all_unique) },
    ]
}

/// A canonical density: on each block of finite measure `λ(B)` the constant
/// `λ(B) / ν(B ∩ finite atoms)` on finite atoms and `0` on infinite ones.
///
/// Blocks of infinite measure get `0` under [`Scope::SigmaOnly`]; under
/// [`Scope::AllSets`] they get `1` on their infinite atoms, which makes the
/// integral infinite as required.
pub fn rn_derivative<S: Scalar>(nu: &FiniteMeasureSpace<S>, c: &SubSigmaAlgebra<S>, scope: Scope) -> Result<RNSolution<S>> {
    let cond = rn_conditions(nu, c);
    let pred = cond.prediction(scope);
    if !pred.exists {
        return Err(Error::Precondition(format!("no density exists under {scope}: {}", violated(&cond, scope))));
    }
    let mut g = vec![S::zero(); nu.len()];
    for (b, w) in c.blocks().iter().zip(c.lambda()) {
        match w {
            Weight::Finite(l) => {
                if l.is_zero() {
                    continue;
                }
                let fin = b.intersection(nu.finite_atoms());
                let mass = nu.measure(&fin).finite().expect("finite atoms").clone();
                let value = l.clone() / mass;
                for x in fin.iter() {
                    g[x] = value.clone();
                }
            }
            Weight::Infinite => {
                if scope == Scope::AllSets {
                    for x in b.intersection(&nu.infinite_atoms()).iter() {
                        g[x] = S::one();
                    }
                }
            }
        }
    }
    Ok(RNSolution { g, unique_mod_null: pred.unique == Some(true), witness: None })
}

fn violated(cond: &RnConditions, scope: Scope) -> String {
    let mut out = Vec::new();
    if !cond.abs_cont {
        out.push("absolute continuity");
    }
    if scope == Scope::AllSets && !cond.c_semifinite {
        out.push("semi-finiteness of the coarse measure");
    }
    if !cond.a0_exists {
        out.push("existence of an exhausting set");
    }
    if out.is_empty() {
        out.push("some block of positive finite measure has no atom of positive finite weight");
    }
    out.join(", ")
}

/// Checks `λ(E) = ∫_E g dν` on the required sets.
pub fn satisfies<S: Scalar>(nu: &FiniteMeasureSpace<S>, c: &SubSigmaAlgebra<S>, g: &[S], scope: Scope, tol: f64) -> bool {
    required_family(c, scope).iter().all(|mask| {
        let e = c.union_of(mask);
        match (nu.integrate(g, &e), c.measure_of(mask)) {
            (Weight::Infinite, Weight::Infinite) => true,
            (Weight::Finite(a), Weight::Finite(b)) => a.approx_eq(&b, tol),
            _ => false,
        }
    })
}

/// Whether two densities differ on an atom of positive `ν`-weight.
pub fn differ_on_non_null<S: Scalar>(nu: &FiniteMeasureSpace<S>, g1: &[S], g2: &[S], tol: f64) -> bool {
    nu.positive_atoms().iter().any(|x| !g1[x].approx_eq(&g2[x], tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use num_traits::Signed;

    fn fin(n: i64, d: i64) -> Weight<BigRational> {
        Weight::Finite(ratio(n, d))
    }

    fn space(ws: Vec<Weight<BigRational>>) -> FiniteMeasureSpace<BigRational> {
        FiniteMeasureSpace::new(ws.into_iter().enumerate().map(|(i, w)| (format!("{}", (b'a' + i as u8) as char), w))).unwrap()
    }

    #[test]
    fn singleton_ratio() {
        let nu = space(vec![fin(2, 1), fin(3, 1)]);
        let c = SubSigmaAlgebra::singletons(&nu, vec![fin(1, 1), fin(6, 1)]).unwrap();
        for scope in Scope::ALL {
            let s = rn_solve_bruteforce(&nu, &c, scope).unwrap();
            assert_eq!(s.g, vec![ratio(1, 2), ratio(2, 1)]);
            assert!(s.unique_mod_null);
            assert_eq!(rn_derivative(&nu, &c, scope).unwrap().g, s.g);
        }
        let cond = rn_conditions(&nu, &c);
        assert!(cond.abs_cont && cond.c_semifinite && cond.a0_exists);
        assert_eq!(cond.all_sets, Prediction { case: RnCase::NestedSigmaRings, exists: true, unique: Some(true) });
        assert_eq!(cond.sigma_only.case, RnCase::EqualSigmaRings);
    }

    #[test]
    fn null_atom_cannot_carry_mass() {
        let nu = space(vec![fin(0, 1), fin(1, 1)]);
        let c = SubSigmaAlgebra::singletons(&nu, vec![fin(1, 1), fin(1, 1)]).unwrap();
        assert!(rn_solve_bruteforce(&nu, &c, Scope::SigmaOnly).is_none());
        let cond = rn_conditions(&nu, &c);
        assert!(!cond.abs_cont && !cond.sigma_only.exists);
        assert!(matches!(rn_derivative(&nu, &c, Scope::SigmaOnly), Err(Error::Precondition(_))));
    }

    #[test]
    fn coarse_block_is_not_unique() {
        let nu = space(vec![fin(1, 1), fin(2, 1)]);
        let c = SubSigmaAlgebra::new(&nu, vec![nu.all()], vec![fin(3, 1)]).unwrap();
        let s = rn_solve_bruteforce(&nu, &c, Scope::AllSets).unwrap();
        assert!(!s.unique_mod_null);
        let w = s.witness.unwrap();
        assert!(satisfies(&nu, &c, &w, Scope::AllSets, 0.0));
        assert!(differ_on_non_null(&nu, &s.g, &w, 0.0));
        let d = rn_derivative(&nu, &c, Scope::AllSets).unwrap();
        assert_eq!(d.g, vec![ratio(1, 1), ratio(1, 1)]);
        assert!(!d.unique_mod_null);
    }

    #[test]
    fn infinite_atom_in_infinite_block() {
        let nu = space(vec![fin(1, 1), Weight::Infinite]);
        let c = SubSigmaAlgebra::new(&nu, vec![nu.all()], vec![Weight::Infinite]).unwrap();
        let cond = rn_conditions(&nu, &c);
        assert!(!cond.c_semifinite);
        let s = rn_solve_bruteforce(&nu, &c, Scope::AllSets).unwrap();
        assert!(s.g[1].is_positive());
        assert!(cond.all_sets.exists);
        assert_eq!(cond.all_sets.unique, Some(false));
        let d = rn_derivative(&nu, &c, Scope::AllSets).unwrap();
        assert!(satisfies(&nu, &c, &d.g, Scope::AllSets, 0.0));
    }

    #[test]
    fn zero_measure_block_is_absolutely_continuous() {
        let nu = space(vec![fin(1, 1), fin(1, 1)]);
        let c = SubSigmaAlgebra::singletons(&nu, vec![fin(0, 1), fin(1, 1)]).unwrap();
        let cond = rn_conditions(&nu, &c);
        assert!(cond.abs_cont && cond.all_sets.exists && cond.all_sets.unique == Some(true));
        assert!(rn_solve_bruteforce(&nu, &c, Scope::AllSets).unwrap().unique_mod_null);
    }

    #[test]
    fn identity_derivative() {
        let nu = space(vec![fin(1, 2), fin(2, 1), fin(7, 3)]);
        let c = SubSigmaAlgebra::singletons(&nu, nu.weights().to_vec()).unwrap();
        let d = rn_derivative(&nu, &c, Scope::AllSets).unwrap();
        assert!(d.g.iter().all(|x| *x == ratio(1, 1)));
    }

    #[test]
    fn unbounded_direction_gives_witness() {
        let nu = space(vec![fin(1, 1), fin(1, 1)]);
        let c = SubSigmaAlgebra::singletons(&nu, vec![fin(1, 1), Weight::Infinite]).unwrap();
        let s = rn_solve_bruteforce(&nu, &c, Scope::SigmaOnly).unwrap();
        assert!(!s.unique_mod_null);
        let w = s.witness.unwrap();
        assert!(satisfies(&nu, &c, &w, Scope::SigmaOnly, 0.0));
        assert!(differ_on_non_null(&nu, &s.g, &w, 0.0));
        assert!(rn_solve_bruteforce(&nu, &c, Scope::AllSets).is_none());
        let cond = rn_conditions(&nu, &c);
        assert!(cond.scopes_differ);
        assert_eq!(cond.sigma_only.case, RnCase::ExhaustingSet);
    }
}
