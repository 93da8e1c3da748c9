//! JSON file formats for instances, partitions, vectors, operators and
//! sup-norm data.
//!
//! Numbers are read from their literal text, so `0.1` becomes exactly
//! `1/10` in exact mode. Exact weights may also be written as
//! `{"num": 1, "den": 3}`. Syntax and shape errors carry the line and column
//! reported by the JSON reader.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::One;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::lamperti::LampertiOperator;
use crate::lp_geometry::LpVector;
use crate::measure::{FiniteMeasureSpace, RegularSetIso};
use crate::radon_nikodym::SubSigmaAlgebra;
use crate::scalar::{Exponent, Scalar, Weight};
use crate::set::AtomSet;
use crate::sup_sphere::{PointSpace, SupVector};
use crate::{Error, Result};

/// Current version of every file written by this module.
pub const SCHEMA_VERSION: u32 = 1;

/// A number, `"inf"`, or an exact fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberSpec {
    Plain(Number),
    Fraction { num: Number, den: Number },
    Word(String),
}

impl NumberSpec {
    /// Writes `x` as a plain number when that is lossless, as a fraction
    /// otherwise.
    pub fn from_scalar<S: Scalar>(x: &S) -> Self {
        let Some(r) = x.to_rational() else {
            return NumberSpec::Word("nan".into());
        };
        if !S::EXACT {
            return NumberSpec::Plain(number_text(&format!("{:?}", x.to_f64_lossy())));
        }
        if r.denom().is_one() {
            NumberSpec::Plain(number_text(&r.numer().to_string()))
        } else {
            NumberSpec::Fraction { num: number_text(&r.numer().to_string()), den: number_text(&r.denom().to_string()) }
        }
    }

    pub fn from_weight<S: Scalar>(w: &Weight<S>) -> Self {
        match w {
            Weight::Finite(x) => Self::from_scalar(x),
            Weight::Infinite => NumberSpec::Word("inf".into()),
        }
    }

    pub fn to_scalar<S: Scalar>(&self, what: &str) -> Result<S> {
        match self {
            NumberSpec::Plain(n) => parse_number(n, what),
            NumberSpec::Fraction { num, den } => {
                let (num, den): (S, S) = (parse_number(num, what)?, parse_number(den, what)?);
                if den.is_zero() {
                    return Err(Error::Parse(format!("{what}: zero denominator")));
                }
                Ok(num / den)
            }
            NumberSpec::Word(w) => Err(Error::Parse(format!("{what}: expected a finite number, found `{w}`"))),
        }
    }

    pub fn to_weight<S: Scalar>(&self, what: &str) -> Result<Weight<S>> {
        match self {
            NumberSpec::Word(w) if w == "inf" => Ok(Weight::Infinite),
            other => Ok(Weight::Finite(other.to_scalar(what)?)),
        }
    }
}

fn number_text(text: &str) -> Number {
    serde_json::from_str(text).expect("formatted number is valid JSON")
}

fn parse_number<S: Scalar>(n: &Number, what: &str) -> Result<S> {
    S::parse_decimal(&n.to_string()).ok_or_else(|| Error::Parse(format!("{what}: `{n}` is not a usable number")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub id: String,
    pub weight: NumberSpec,
}

/// `{"atoms": [{"id": ..., "weight": ...}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub atoms: Vec<AtomSpec>,
}

impl InstanceFile {
    pub fn from_space<S: Scalar>(space: &FiniteMeasureSpace<S>) -> Self {
        let atoms = (0..space.len())
            .map(|i| AtomSpec { id: space.id(i).to_string(), weight: NumberSpec::from_weight(space.weight(i)) })
            .collect();
        Self { schema_version: Some(SCHEMA_VERSION), atoms }
    }

    pub fn to_space<S: Scalar>(&self) -> Result<FiniteMeasureSpace<S>> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((a.id.clone(), a.weight.to_weight(&format!("weight of `{}`", a.id))?)))
            .collect::<Result<Vec<_>>>()?;
        FiniteMeasureSpace::new(atoms)
    }
}

/// `{"blocks": [[ids]], "lambda": [...]}`, optionally naming its instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub blocks: Vec<Vec<String>>,
    pub lambda: Vec<NumberSpec>,
}

impl PartitionFile {
    pub fn from_algebra<S: Scalar>(space: &FiniteMeasureSpace<S>, c: &SubSigmaAlgebra<S>) -> Self {
        Self {
            instance: None,
            blocks: c.blocks().iter().map(|b| space.ids_of(b)).collect(),
            lambda: c.lambda().iter().map(NumberSpec::from_weight).collect(),
        }
    }

    pub fn to_algebra<S: Scalar>(&self, space: &FiniteMeasureSpace<S>) -> Result<SubSigmaAlgebra<S>> {
        let blocks = self.blocks.iter().map(|b| space.set_of(b)).collect::<Result<Vec<AtomSet>>>()?;
        let lambda = self
            .lambda
            .iter()
            .enumerate()
            .map(|(k, w)| w.to_weight(&format!("lambda of block {k}")))
            .collect::<Result<Vec<_>>>()?;
        SubSigmaAlgebra::new(space, blocks, lambda)
    }
}

/// `{"p": ..., "values": {id: number}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub p: Number,
    pub values: BTreeMap<String, NumberSpec>,
}

fn exponent_of(p: &Number) -> Result<Exponent> {
    Exponent::new(parse_number::<f64>(p, "p")?)
}

fn exponent_number(p: Exponent) -> Number {
    number_text(&format!("{:?}", p.get()))
}

impl VectorFile {
    pub fn from_vector<S: Scalar>(v: &LpVector<S>) -> Self {
        let values = (0..v.space().len())
            .map(|i| (v.space().id(i).to_string(), NumberSpec::from_scalar(v.value(i))))
            .collect();
        Self { p: exponent_number(v.p()), values }
    }

    /// Atoms missing from `values` get `0`.
    pub fn to_vector<S: Scalar>(&self, space: Arc<FiniteMeasureSpace<S>>) -> Result<LpVector<S>> {
        let p = exponent_of(&self.p)?;
        let pairs = self
            .values
            .iter()
            .map(|(id, v)| Ok((id.clone(), v.to_scalar(&format!("value at `{id}`"))?)))
            .collect::<Result<Vec<(String, S)>>>()?;
        LpVector::from_ids(space, &pairs, p)
    }
}

/// `{"p": ..., "atom_map": {dom: cod}, "h": {cod: number}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub p: Number,
    pub atom_map: BTreeMap<String, String>,
    pub h: BTreeMap<String, NumberSpec>,
}

impl OperatorFile {
    pub fn from_operator<S: Scalar>(op: &LampertiOperator<S>) -> Self {
        let (mu, nu) = (op.iso().domain(), op.iso().codomain());
        let atom_map = op.iso().pairs().map(|(a, y)| (mu.id(a).to_string(), nu.id(y).to_string())).collect();
        let h = (0..nu.len()).map(|y| (nu.id(y).to_string(), NumberSpec::from_scalar(&op.h()[y]))).collect();
        Self { p: exponent_number(op.p()), atom_map, h }
    }

    /// Rebuilds the operator; codomain atoms missing from `h` get weight `0`.
    pub fn to_operator<S: Scalar>(
        &self,
        domain: Arc<FiniteMeasureSpace<S>>,
        codomain: Arc<FiniteMeasureSpace<S>>,
    ) -> Result<LampertiOperator<S>> {
        let p = exponent_of(&self.p)?;
        let pairs: Vec<(&str, &str)> = self.atom_map.iter().map(|(a, y)| (a.as_str(), y.as_str())).collect();
        let iso = RegularSetIso::from_ids(domain, codomain.clone(), &pairs)?;
        let mut h = vec![S::zero(); codomain.len()];
        for (id, v) in &self.h {
            h[codomain.index_of(id)?] = v.to_scalar(&format!("h at `{id}`"))?;
        }
        LampertiOperator::from_weight(iso, h, p)
    }
}

/// `{"values": {point: number}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupVectorFile {
    pub values: BTreeMap<String, NumberSpec>,
}

impl SupVectorFile {
    pub fn from_vector<S: Scalar>(f: &SupVector<S>) -> Self {
        let values = (0..f.space().len()).map(|i| (f.space().id(i).to_string(), NumberSpec::from_scalar(f.value(i)))).collect();
        Self { values }
    }

    /// The points are taken in key order when `space` is `None`.
    pub fn to_vector<S: Scalar>(&self, space: Option<Arc<PointSpace>>) -> Result<SupVector<S>> {
        let space = match space {
            Some(s) => s,
            None => Arc::new(PointSpace::new(self.values.keys().cloned())?),
        };
        let mut values = vec![S::zero(); space.len()];
        for (id, v) in &self.values {
            values[space.index_of(id)?] = v.to_scalar(&format!("value at `{id}`"))?;
        }
        SupVector::new(space, values)
    }
}

/// `{"sigma": {y: x}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationFile {
    pub sigma: BTreeMap<String, String>,
}

impl PermutationFile {
    pub fn from_sigma(x: &PointSpace, y: &PointSpace, sigma: &[usize]) -> Self {
        Self { sigma: sigma.iter().enumerate().map(|(j, &i)| (y.id(j).to_string(), x.id(i).to_string())).collect() }
    }

    /// `sigma[y] = x` as indices, with both point sets in key order.
    pub fn to_sigma(&self) -> Result<(Arc<PointSpace>, Arc<PointSpace>, Vec<usize>)> {
        let y = Arc::new(PointSpace::new(self.sigma.keys().cloned())?);
        let mut xs: Vec<String> = self.sigma.values().cloned().collect();
        xs.sort();
        let x = Arc::new(PointSpace::new(xs)?);
        let sigma = self.sigma.values().map(|id| x.index_of(id)).collect::<Result<Vec<_>>>()?;
        Ok((x, y, sigma))
    }
}

/// How a bundled oracle is realized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    Planted,
    /// The planted map with the image scaled by `1 + scale` at `atom`.
    Perturbed { scale: Number, atom: String },
    External { command: Vec<String> },
}

/// Manifest tying together the files of one extraction instance. Paths are
/// relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleFile {
    pub schema_version: u32,
    pub domain: String,
    pub codomain: String,
    pub operator: String,
    pub oracle: OracleSpec,
}

/// A bundle with every referenced file loaded.
#[derive(Clone, Debug)]
pub struct Bundle<S> {
    pub manifest: BundleFile,
    pub domain: Arc<FiniteMeasureSpace<S>>,
    pub codomain: Arc<FiniteMeasureSpace<S>>,
    pub operator: LampertiOperator<S>,
}

impl BundleFile {
    pub fn load<S: Scalar>(path: &Path) -> Result<Bundle<S>> {
        let manifest: BundleFile = read_json(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let domain = Arc::new(read_json::<InstanceFile>(&base.join(&manifest.domain))?.to_space()?);
        let codomain = Arc::new(read_json::<InstanceFile>(&base.join(&manifest.codomain))?.to_space()?);
        let operator = read_json::<OperatorFile>(&base.join(&manifest.operator))?.to_operator(domain.clone(), codomain.clone())?;
        Ok(Bundle { manifest, domain, codomain, operator })
    }
}

/// Parses JSON text, reporting syntax and shape errors with their position.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Syntax {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_json(&text, &path.display().to_string())
}

/// Writes pretty-printed JSON followed by a newline, creating parent
/// directories as needed.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let io_err = |source| Error::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    std::fs::write(path, text).map_err(io_err)
}

/// Resolves `name` against the directory holding `anchor`.
pub fn sibling(anchor: &Path, name: &str) -> PathBuf {
    anchor.parent().map_or_else(|| PathBuf::from(name), |d| d.join(name))
}
