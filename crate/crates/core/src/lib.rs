//! Census and invariants of genus-two square-tiled surfaces, exact class
//! formulas on the associated modular surfaces, and theta-function checks.

pub mod census;
pub mod chow;
pub mod error;
pub mod formulas;
pub mod invariants;
pub mod lattice;
pub mod origami;
pub mod perm;
pub mod theta;

pub use census::{Census, CensusRecord, CountTable, EnumerateConfig, Grade, VerifyReport, VerifyRow};
pub use chow::{derive_t_class, ChowExpression, Generator, Monomial};
pub use error::{Error, Result};
pub use formulas::{DivisorClass, Rational};
pub use invariants::{classify, FlatPoint, PointKind, SurfaceInvariants};
pub use lattice::Lattice2;
pub use origami::{orbit_partition, CanonicalKey, OrbitPartition, Origami, Sl2Generator, Stratum, StratumSignature};
pub use perm::Permutation;
pub use theta::{BaseChangedCharacteristic, Parity, PseudoMatrix, ThetaCharacteristic};
