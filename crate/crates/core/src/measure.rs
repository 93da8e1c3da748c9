//! Finite atomic measure spaces and their null-quotient algebra.
//!
//! The σ-algebra of a [`FiniteMeasureSpace`] is the power set of its atoms.
//! Atoms of weight `∞` stand in for the parts of a measure space that are not
//! σ-finite: they have no finite non-null subset, so
//!
//! * `𝔄^0` is the set of subsets of null atoms,
//! * `𝔄^f` is the set of subsets of finite total weight,
//! * `𝔄^σ` is the set of subsets made only of finite-weight atoms,
//! * `𝔄^σcσ` adds the complements of those.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{total, Scalar, Weight};
use crate::set::AtomSet;
use crate::{Error, Result};

/// Finitely many named atoms with weights in `[0, ∞]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasureSpace<S> {
    ids: Vec<String>,
    weights: Vec<Weight<S>>,
    index: HashMap<String, usize>,
    positive: AtomSet,
    finite: AtomSet,
}

impl<S: Scalar> FiniteMeasureSpace<S> {
    pub fn new<I, K>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Weight<S>)>,
        K: Into<String>,
    {
        let mut ids = Vec::new();
        let mut weights = Vec::new();
        let mut index = HashMap::new();
        for (id, w) in atoms {
            let id: String = id.into();
            if !w.validate() {
                return Err(Error::InvalidWeight { atom: id, reason: format!("{w} is not in [0, inf]") });
            }
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::DuplicateAtom(id));
            }
            ids.push(id);
            weights.push(w);
        }
        let positive = weights.iter().enumerate().filter(|(_, w)| w.is_positive()).map(|(i, _)| i).collect();
        let finite = weights.iter().enumerate().filter(|(_, w)| w.is_finite()).map(|(i, _)| i).collect();
        Ok(Self { ids, weights, index, positive, finite })
    }

    /// Atoms named `x0, x1, …` with the given finite weights.
    pub fn from_weights(weights: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(weights.into_iter().enumerate().map(|(i, w)| (format!("x{i}"), Weight::Finite(w))))
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

    pub fn weight(&self, i: usize) -> &Weight<S> {
        &self.weights[i]
    }

    pub fn weights(&self) -> &[Weight<S>] {
        &self.weights
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownAtom(id.to_string()))
    }

    /// Builds a set from atom identifiers.
    pub fn set_of<T: AsRef<str>>(&self, ids: &[T]) -> Result<AtomSet> {
        ids.iter().map(|id| self.index_of(id.as_ref())).collect()
    }

    pub fn ids_of(&self, set: &AtomSet) -> Vec<String> {
        set.iter().map(|i| self.ids[i].clone()).collect()
    }

    pub fn check_set(&self, set: &AtomSet) -> Result<()> {
        match set.iter().find(|&i| i >= self.len()) {
            Some(i) => Err(Error::UnknownAtom(format!("#{i}"))),
            None => Ok(()),
        }
    }

    pub fn all(&self) -> AtomSet {
        AtomSet::full(self.len())
    }

    /// Atoms of weight `> 0` (including `∞`).
    pub fn positive_atoms(&self) -> &AtomSet {
        &self.positive
    }

    /// Atoms of finite weight (including null atoms).
    pub fn finite_atoms(&self) -> &AtomSet {
        &self.finite
    }

    pub fn null_atoms(&self) -> AtomSet {
        self.all().difference(&self.positive)
    }

    pub fn infinite_atoms(&self) -> AtomSet {
        self.all().difference(&self.finite)
    }

    /// Atoms with `0 < μ({x}) < ∞`.
    pub fn positive_finite_atoms(&self) -> AtomSet {
        self.positive.intersection(&self.finite)
    }

    pub fn measure(&self, set: &AtomSet) -> Weight<S> {
        total(set.iter().map(|i| self.weights[i].clone()))
    }

    /// `∫_A g dμ` for a finite nonnegative density `g`.
    pub fn integrate(&self, g: &[S], set: &AtomSet) -> Weight<S> {
        total(set.iter().map(|i| self.weights[i].scale(&g[i])))
    }

    /// Semi-finite (equivalently localizable) at finite scale: no `∞` atom.
    pub fn is_semi_finite(&self) -> bool {
        self.finite.len() == self.len()
    }

    /// Canonical representative of `A` modulo null sets.
    pub fn class_of(&self, set: &AtomSet) -> NullClass {
        NullClass(set.intersection(&self.positive))
    }

    /// `A ≼ B`, i.e. `μ(A ∖ B) = 0`.
    pub fn preceq(&self, a: &AtomSet, b: &AtomSet) -> bool {
        self.class_of(&a.difference(b)).is_empty()
    }

    pub fn equiv(&self, a: &AtomSet, b: &AtomSet) -> bool {
        self.class_of(a) == self.class_of(b)
    }

    /// Essential supremum of a family; the empty family gives `∅`.
    pub fn essential_supremum(&self, family: &[AtomSet]) -> NullClass {
        let union = family.iter().fold(AtomSet::empty(), |acc, s| acc.union(s));
        self.class_of(&union)
    }

    pub fn classify(&self, set: &AtomSet) -> Classes {
        let in_a0 = self.class_of(set).is_empty();
        let in_af = self.measure(set).is_finite();
        let in_asigma = set.is_subset(&self.finite);
        let in_asigma_c_sigma = in_asigma || set.complement(self.len()).is_subset(&self.finite);
        Classes { in_a0, in_af, in_asigma, in_asigma_c_sigma }
    }

    /// Atoms whose subsets make up the given ring.
    pub fn ring_atoms(&self, ring: SetRing) -> AtomSet {
        match ring {
            SetRing::Sigma => self.finite.clone(),
            SetRing::Full => self.all(),
        }
    }

    /// The space restricted to `set`, together with the original index of
    /// each atom of the restriction.
    pub fn subspace(&self, set: &AtomSet) -> (Self, Vec<usize>) {
        let kept: Vec<usize> = set.iter().filter(|&i| i < self.len()).collect();
        let space = Self::new(kept.iter().map(|&i| (self.ids[i].clone(), self.weights[i].clone())))
            .expect("subspace of a valid space is valid");
        (space, kept)
    }
}

/// Membership flags for the classes `𝔄^0 ⊆ 𝔄^f ⊆ 𝔄^σ ⊆ 𝔄^σcσ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classes {
    pub in_a0: bool,
    pub in_af: bool,
    pub in_asigma: bool,
    pub in_asigma_c_sigma: bool,
}

/// An element of the quotient of the power set by null sets, represented by
/// its unique member without null atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NullClass(AtomSet);

impl NullClass {
    pub fn canonical(&self) -> &AtomSet {
        &self.0
    }

    pub fn into_set(self) -> AtomSet {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn le(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn meet(&self, other: &Self) -> Self {
        NullClass(self.0.intersection(&other.0))
    }

    pub fn join(&self, other: &Self) -> Self {
        NullClass(self.0.union(&other.0))
    }

    pub fn complement<S: Scalar>(&self, space: &FiniteMeasureSpace<S>) -> Self {
        NullClass(space.positive_atoms().difference(&self.0))
    }
}

/// Which ring of sets a set map is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetRing {
    /// `𝔄^σ`: subsets of finite-weight atoms.
    Sigma,
    /// The whole power set.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    /// Largest number of ring atoms checked by full enumeration.
    pub exhaustive_bound: usize,
    /// Seeded sampling used above the bound; `None` makes large inputs an error.
    pub sampling: Option<Sampling>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub seed: u64,
    pub samples: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { exhaustive_bound: 12, sampling: None }
    }
}

impl CheckConfig {
    pub fn sampled(seed: u64, samples: usize) -> Self {
        Self { exhaustive_bound: 12, sampling: Some(Sampling { seed, samples }) }
    }
}

/// Concrete sets on which a condition fails.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub sets: Vec<AtomSet>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Condition {
    fn pass() -> Self {
        Self { passed: true, witness: None }
    }

    fn fail(sets: Vec<AtomSet>, note: impl Into<String>) -> Self {
        Self { passed: false, witness: Some(Witness { sets, note: note.into() }) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize },
}

/// Outcome of checking the regular set isomorphism conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub mode: CheckMode,
    /// Every image lies in the codomain ring.
    pub well_typed: Condition,
    /// Null sets and only null sets map to null sets.
    pub r1: Condition,
    /// Differences are preserved modulo null sets.
    pub r2: Condition,
    /// Every codomain set is an image modulo null sets.
    pub r3: Condition,
    /// Order is preserved and reflected.
    pub r4: Condition,
    /// Unions are preserved modulo null sets.
    pub r5: Condition,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        [&self.well_typed, &self.r1, &self.r2, &self.r3, &self.r4, &self.r5].iter().all(|c| c.passed)
    }

    /// Conditions that define a regular set isomorphism.
    pub fn defining_passed(&self) -> bool {
        self.well_typed.passed && self.r1.passed && self.r2.passed && self.r3.passed
    }
}

fn first_failure<T>(items: impl Iterator<Item = T>, mut check: impl FnMut(&T) -> Option<Condition>) -> Condition {
    for item in items {
        if let Some(c) = check(&item) {
            return c;
        }
    }
    Condition::pass()
}

/// Checks conditions (R1)–(R5) for an arbitrary set map `Λ` between the
/// given rings of `domain` and `codomain`.
///
/// Small rings are enumerated completely: every set for (R1), every pair for
/// (R2), (R4) and (R5), every codomain set for (R3), plus seeded families of
/// three and four sets for (R5). Above `cfg.exhaustive_bound` ring atoms the
/// conditions are sampled, and (R3) searches for preimages atom by atom.
pub fn check_regular_set_iso<S: Scalar>(
    domain: &FiniteMeasureSpace<S>,
    codomain: &FiniteMeasureSpace<S>,
    ring: SetRing,
    map: &dyn Fn(&AtomSet) -> AtomSet,
    cfg: &CheckConfig,
) -> Result<Certificate> {
    let dom_atoms = domain.ring_atoms(ring);
    let cod_atoms = codomain.ring_atoms(ring);
    let exhaustive = dom_atoms.len() <= cfg.exhaustive_bound && cod_atoms.len() <= cfg.exhaustive_bound;
    if !exhaustive && cfg.sampling.is_none() {
        return Err(Error::Configuration(format!(
            "{} domain / {} codomain ring atoms exceed the exhaustive bound {} and sampling is disabled",
            dom_atoms.len(),
            cod_atoms.len(),
            cfg.exhaustive_bound
        )));
    }
    let seed = cfg.sampling.map_or(0, |s| s.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let sets: Vec<AtomSet> = if exhaustive {
        dom_atoms.subsets().collect()
    } else {
        let n = cfg.sampling.map_or(0, |s| s.samples).max(2);
        let mut v = vec![AtomSet::empty(), dom_atoms.clone()];
        v.extend(dom_atoms.iter().map(AtomSet::singleton));
        v.extend((0..n).map(|_| random_subset(&mut rng, &dom_atoms)));
        v
    };
    let images: Vec<AtomSet> = sets.iter().map(map).collect();
    let mode = if exhaustive { CheckMode::Exhaustive } else { CheckMode::Sampled { samples: sets.len() } };

    let well_typed = first_failure(sets.iter().zip(&images), |(a, img)| {
        (!img.is_subset(&cod_atoms))
            .then(|| Condition::fail(vec![(*a).clone(), (*img).clone()], "image leaves the codomain ring"))
    });

    let r1 = first_failure(sets.iter().zip(&images), |(a, img)| {
        let dom_null = domain.class_of(a).is_empty();
        let cod_null = codomain.class_of(img).is_empty();
        (dom_null != cod_null).then(|| {
            Condition::fail(vec![(*a).clone(), (*img).clone()], "Λ(A) ≡ ∅ does not match A ≡ ∅")
        })
    });

    let pairs: Vec<(usize, usize)> = if exhaustive {
        (0..sets.len()).flat_map(|i| (0..sets.len()).map(move |j| (i, j))).collect()
    } else {
        let n = cfg.sampling.map_or(0, |s| s.samples);
        (0..n).map(|_| (rng.gen_range(0..sets.len()), rng.gen_range(0..sets.len()))).collect()
    };

    let r2 = first_failure(pairs.iter(), |&&(i, j)| {
        let lhs = map(&sets[i].difference(&sets[j]));
        let rhs = images[i].difference(&images[j]);
        (!codomain.equiv(&lhs, &rhs)).then(|| {
            Condition::fail(vec![sets[i].clone(), sets[j].clone()], "Λ(A1 ∖ A2) ≢ Λ(A1) ∖ Λ(A2)")
        })
    });

    let r4 = first_failure(pairs.iter(), |&&(i, j)| {
        let dom = domain.preceq(&sets[i], &sets[j]);
        let cod = codomain.preceq(&images[i], &images[j]);
        (dom != cod).then(|| Condition::fail(vec![sets[i].clone(), sets[j].clone()], "Λ(A1) ≼ Λ(A2) differs from A1 ≼ A2"))
    });

    let r5_pairs = first_failure(pairs.iter(), |&&(i, j)| {
        let lhs = images[i].union(&images[j]);
        let rhs = map(&sets[i].union(&sets[j]));
        (!codomain.equiv(&lhs, &rhs))
            .then(|| Condition::fail(vec![sets[i].clone(), sets[j].clone()], "Λ(A1) ∪ Λ(A2) ≢ Λ(A1 ∪ A2)"))
    });
    let r5 = if r5_pairs.passed {
        let families = cfg.sampling.map_or(256, |s| s.samples);
        let fam: Vec<Vec<usize>> = (0..families)
            .map(|_| {
                let k = rng.gen_range(3..=4);
                (0..k).map(|_| rng.gen_range(0..sets.len())).collect()
            })
            .collect();
        first_failure(fam.iter(), |idx| {
            let lhs = idx.iter().fold(AtomSet::empty(), |acc, &i| acc.union(&images[i]));
            let union = idx.iter().fold(AtomSet::empty(), |acc, &i| acc.union(&sets[i]));
            (!codomain.equiv(&lhs, &map(&union))).then(|| {
                Condition::fail(idx.iter().map(|&i| sets[i].clone()).collect(), "union of images ≢ image of union")
            })
        })
    } else {
        r5_pairs
    };

    let image_classes: HashSet<NullClass> = images.iter().map(|b| codomain.class_of(b)).collect();
    let r3 = if exhaustive {
        first_failure(cod_atoms.subsets(), |b| {
            (!image_classes.contains(&codomain.class_of(b)))
                .then(|| Condition::fail(vec![b.clone()], "no A with Λ(A) ≡ B"))
        })
    } else {
        let n = cfg.sampling.map_or(0, |s| s.samples);
        let targets: Vec<AtomSet> = (0..n).map(|_| random_subset(&mut rng, &cod_atoms)).collect();
        first_failure(targets.iter(), |b| {
            let b_class = codomain.class_of(b);
            let candidate: AtomSet = dom_atoms
                .iter()
                .filter(|&a| codomain.class_of(&map(&AtomSet::singleton(a))).le(&b_class))
                .collect();
            (codomain.class_of(&map(&candidate)) != b_class)
                .then(|| Condition::fail(vec![(*b).clone()], "no atom-wise preimage A with Λ(A) ≡ B"))
        })
    };

    Ok(Certificate { mode, well_typed, r1, r2, r3, r4, r5 })
}

fn random_subset(rng: &mut ChaCha8Rng, atoms: &AtomSet) -> AtomSet {
    atoms.iter().filter(|_| rng.gen_bool(0.5)).collect()
}

/// A regular set isomorphism `𝔄^σ → 𝔅^σ`, stored as the bijection it induces
/// between atoms of positive finite weight.
#[derive(Clone, Debug)]
pub struct RegularSetIso<S> {
    domain: Arc<FiniteMeasureSpace<S>>,
    codomain: Arc<FiniteMeasureSpace<S>>,
    forward: Vec<Option<usize>>,
    backward: Vec<Option<usize>>,
    certificate: Certificate,
}

impl<S: Scalar> RegularSetIso<S> {
    /// Builds the isomorphism from atom pairs `(domain, codomain)`.
    ///
    /// The pairs must form a bijection between the positive finite atoms of
    /// the two spaces.
    pub fn new(
        domain: Arc<FiniteMeasureSpace<S>>,
        codomain: Arc<FiniteMeasureSpace<S>>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut forward = vec![None; domain.len()];
        let mut backward = vec![None; codomain.len()];
        let dom_pf = domain.positive_finite_atoms();
        let cod_pf = codomain.positive_finite_atoms();
        for (a, y) in pairs {
            if !dom_pf.contains(a) {
                return Err(Error::Precondition(format!("domain atom #{a} is not of positive finite weight")));
            }
            if !cod_pf.contains(y) {
                return Err(Error::Precondition(format!("codomain atom #{y} is not of positive finite weight")));
            }
            if forward[a].is_some() || backward[y].is_some() {
                return Err(Error::Precondition(format!("atom map is not injective at {} -> {}", domain.id(a), codomain.id(y))));
            }
            forward[a] = Some(y);
            backward[y] = Some(a);
        }
        if let Some(a) = dom_pf.iter().find(|&a| forward[a].is_none()) {
            return Err(Error::Precondition(format!("domain atom `{}` is not mapped", domain.id(a))));
        }
        if let Some(y) = cod_pf.iter().find(|&y| backward[y].is_none()) {
            return Err(Error::Precondition(format!("codomain atom `{}` is not hit", codomain.id(y))));
        }
        let mut iso = Self {
            domain,
            codomain,
            forward,
            backward,
            certificate: Certificate {
                mode: CheckMode::Exhaustive,
                well_typed: Condition::pass(),
                r1: Condition::pass(),
                r2: Condition::pass(),
                r3: Condition::pass(),
                r4: Condition::pass(),
                r5: Condition::pass(),
            },
        };
        let cfg = CheckConfig { exhaustive_bound: 8, sampling: Some(Sampling { seed: 0, samples: 256 }) };
        iso.certificate = iso.certify(&cfg)?;
        Ok(iso)
    }

    pub fn from_ids<T: AsRef<str>>(
        domain: Arc<FiniteMeasureSpace<S>>,
        codomain: Arc<FiniteMeasureSpace<S>>,
        pairs: &[(T, T)],
    ) -> Result<Self> {
        let idx = pairs
            .iter()
            .map(|(a, y)| Ok((domain.index_of(a.as_ref())?, codomain.index_of(y.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, codomain, idx)
    }

    pub fn identity(space: Arc<FiniteMeasureSpace<S>>) -> Self {
        let pairs: Vec<_> = space.positive_finite_atoms().iter().map(|a| (a, a)).collect();
        Self::new(space.clone(), space, pairs).expect("identity is a bijection")
    }

    pub fn domain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FiniteMeasureSpace<S>> {
        &self.codomain
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// Re-runs the condition checks on the derived set map.
    pub fn certify(&self, cfg: &CheckConfig) -> Result<Certificate> {
        check_regular_set_iso(&self.domain, &self.codomain, SetRing::Sigma, &|a| self.apply(a), cfg)
    }

    pub fn image_of_atom(&self, a: usize) -> Option<usize> {
        self.forward.get(a).copied().flatten()
    }

    pub fn preimage_of_atom(&self, y: usize) -> Option<usize> {
        self.backward.get(y).copied().flatten()
    }

    /// Mapped pairs in increasing domain order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().enumerate().filter_map(|(a, y)| y.map(|y| (a, y)))
    }

    /// `Λ(A)` for `A ∈ 𝔄^σ`; atoms outside the positive finite part are null
    /// or not in the ring and contribute nothing.
    pub fn apply(&self, set: &AtomSet) -> AtomSet {
        set.iter().filter_map(|a| self.image_of_atom(a)).collect()
    }

    pub fn preimage(&self, set: &AtomSet) -> AtomSet {
        set.iter().filter_map(|y| self.preimage_of_atom(y)).collect()
    }

    /// Extension to `𝔄^σcσ` through `Λ(Ω ∖ E) := Γ ∖ Λ(E)`.
    pub fn apply_extended(&self, set: &AtomSet) -> Result<AtomSet> {
        let classes = self.domain.classify(set);
        if classes.in_asigma {
            Ok(self.apply(set))
        } else if classes.in_asigma_c_sigma {
            let inner = set.complement(self.domain.len());
            Ok(self.apply(&inner).complement(self.codomain.len()))
        } else {
            Err(Error::Precondition("set is outside the σ-algebra generated by finite-measure sets".into()))
        }
    }

    /// The pushforward measure `μ^Λ` on the codomain.
    pub fn pushforward(&self) -> Result<Pushforward<'_, S>> {
        if !self.certificate.defining_passed() {
            return Err(Error::Precondition("set map is not a certified regular set isomorphism".into()));
        }
        Ok(Pushforward { iso: self })
    }

    /// Restriction to the sub-space `E` of the domain and `Λ(E)` of the
    /// codomain.
    pub fn restrict(&self, e: &AtomSet) -> Result<Restriction<S>> {
        if !self.domain.classify(e).in_asigma {
            return Err(Error::Precondition("restriction set must consist of finite-weight atoms".into()));
        }
        let (dom, domain_atoms) = self.domain.subspace(e);
        let (cod, codomain_atoms) = self.codomain.subspace(&self.apply(e));
        let cod_pos: HashMap<usize, usize> = codomain_atoms.iter().enumerate().map(|(k, &y)| (y, k)).collect();
        let pairs: Vec<(usize, usize)> = domain_atoms
            .iter()
            .enumerate()
            .filter_map(|(k, &a)| self.image_of_atom(a).map(|y| (k, cod_pos[&y])))
            .collect();
        let iso = RegularSetIso::new(Arc::new(dom), Arc::new(cod), pairs)?;
        Ok(Restriction { iso, domain_atoms, codomain_atoms })
    }
}

/// A restricted isomorphism with the original indices of its atoms.
#[derive(Clone, Debug)]
pub struct Restriction<S> {
    pub iso: RegularSetIso<S>,
    pub domain_atoms: Vec<usize>,
    pub codomain_atoms: Vec<usize>,
}

/// `μ^Λ(B) := μ(A)` for `Λ(A) ≡ B`, and `∞` on `𝔅^σcσ ∖ 𝔅^σ`.
#[derive(Clone, Copy, Debug)]
pub struct Pushforward<'a, S> {
    iso: &'a RegularSetIso<S>,
}

impl<S: Scalar> Pushforward<'_, S> {
    pub fn measure_of(&self, set: &AtomSet) -> Result<Weight<S>> {
        let cod = &self.iso.codomain;
        cod.check_set(set)?;
        let classes = cod.classify(set);
        if classes.in_asigma {
            Ok(self.iso.domain.measure(&self.iso.preimage(set)))
        } else if classes.in_asigma_c_sigma {
            Ok(Weight::Infinite)
        } else {
            Err(Error::Precondition("set is outside the σ-algebra generated by finite-measure sets".into()))
        }
    }

    /// `μ(A)` for a caller-chosen representative `A` with `Λ(A) ≡ B`.
    pub fn measure_via(&self, set: &AtomSet, representative: &AtomSet) -> Result<Weight<S>> {
        let dom = &self.iso.domain;
        if !dom.classify(representative).in_asigma {
            return Err(Error::Precondition("representative must lie in the σ-ring".into()));
        }
        if !self.iso.codomain.equiv(&self.iso.apply(representative), set) {
            return Err(Error::Precondition("representative does not map onto the set".into()));
        }
        Ok(dom.measure(representative))
    }

    /// `μ^Λ({y})` for every codomain atom of finite weight; `None` for atoms
    /// of infinite weight.
    pub fn atom_masses(&self) -> Vec<Option<Weight<S>>> {
        (0..self.iso.codomain.len())
            .map(|y| {
                self.iso
                    .codomain
                    .weight(y)
                    .is_finite()
                    .then(|| self.measure_of(&AtomSet::singleton(y)).expect("finite atom is in the ring"))
            })
            .collect()
    }
}

/// Whether a regular set isomorphism `𝔄 → 𝔅` that restricts to one between
/// `𝔄^σ` and `𝔅^σ` exists: the spaces must have equally many positive atoms
/// of finite weight and equally many of infinite weight.
pub fn regular_iso_exists<S: Scalar>(domain: &FiniteMeasureSpace<S>, codomain: &FiniteMeasureSpace<S>) -> bool {
    domain.positive_finite_atoms().len() == codomain.positive_finite_atoms().len()
        && domain.positive_atoms().difference(domain.finite_atoms()).len()
            == codomain.positive_atoms().difference(codomain.finite_atoms()).len()
}
