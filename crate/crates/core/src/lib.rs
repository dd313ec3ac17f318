pub mod algebra;
pub mod cli;
pub mod constructions;
pub mod diagonalize;
pub mod eigen;
pub mod error;
pub mod io;
pub mod module;
pub mod operator;
pub mod verify;

pub use algebra::{AlgebraElement, AlgebraShape, SpectralDecomposition};
pub use constructions::{construct_example8, construct_prop4, Example8, ExpectedPair, Prop4};
pub use diagonalize::{
    diagonalize_normal, diagonalize_selfadjoint, order_eigenvalues, DiagonalizationResult, EigenPair, SlotClass,
};
pub use eigen::{eig_hermitian, eig_normal, CMatrix, HermitianEig, NormalEig};
pub use error::{Error, Result};
pub use module::{orthogonal_complement_trivial, HilbertModule, ModuleElement};
pub use operator::ModuleOperator;
pub use verify::{moment_oracle, verify_definition2, VerificationReport};
