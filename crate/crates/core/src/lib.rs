//! Metric-preserving maps between positive unit spheres of finite atomic
//! `L^p` and `C(X)` spaces.
//!
//! Everything is generic over a [`Scalar`]: `f64` and `f32` for fast float
//! work and [`Exact`] (arbitrary-precision rationals) where identities must
//! hold without rounding.

pub mod error;
pub mod io;
pub mod lamperti;
pub mod lp;
pub mod lp_geometry;
pub mod measure;
pub mod radon_nikodym;
pub mod scalar;
pub mod set;
pub mod suites;
pub mod sup_sphere;
pub mod tingley;

pub use error::{Error, Result};
pub use lamperti::LampertiOperator;
pub use lp_geometry::{dist_restricted_sphere, LpVector, SphereVector};
pub use measure::{
    check_regular_set_iso, regular_iso_exists, Certificate, CheckConfig, Classes, FiniteMeasureSpace, NullClass,
    RegularSetIso, SetRing,
};
pub use scalar::{Exponent, Scalar, Weight};
pub use radon_nikodym::{rn_conditions, rn_derivative, Scope, SubSigmaAlgebra};
pub use set::AtomSet;
pub use sup_sphere::{PointSpace, SupVector};
pub use tingley::{extract, SphereMap, Verdict};

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type SpaceF64 = FiniteMeasureSpace<f64>;
pub type SpaceExact = FiniteMeasureSpace<Exact>;
pub type IsoF64 = RegularSetIso<f64>;
pub type IsoExact = RegularSetIso<Exact>;
pub type SpaceF32 = FiniteMeasureSpace<f32>;
pub type OperatorF64 = LampertiOperator<f64>;
pub type OperatorExact = LampertiOperator<Exact>;
pub type VectorF64 = LpVector<f64>;
pub type VectorExact = LpVector<Exact>;
pub type SupVectorF64 = SupVector<f64>;
pub type SupVectorExact = SupVector<Exact>;
