//! Type-DA bimodules over the torus algebra, the box tensor product, and the
//! Hochschild certificate.

pub mod algebra;
pub mod bimodule;
pub mod boxtensor;
pub mod hochschild;
pub mod profile;
pub mod seeds;

pub use algebra::{mult, torus_algebra, Elem, Output, TorusAlgebra};
pub use bimodule::{BimoduleFile, DABimodule, Generator, Term};
pub use boxtensor::{
    box_power, box_power_capped, box_power_fold, box_tensor, box_tensor_capped, for_each_box_term,
    MATERIALIZE_CAP,
};
pub use hochschild::{
    certify, hfk_dimensions, label_fixpoint, profile_certificate, seed_power, seed_product,
    vanishing_certificate, Certificate,
    HfkRow, Property,
};
pub use profile::{box_profile, power_profile, BimoduleProfile, TermProfile};
pub use seeds::{cfda_ta, cfda_tb_inv};

#[derive(Debug, thiserror::Error)]
pub enum FloerError {
    #[error("malformed bimodule: {0}")]
    Malformed(String),
    #[error("term {term}: {msg}")]
    IdempotentChain { term: String, msg: String },
    #[error("term {term} has idempotent input {input}")]
    IdempotentInput { term: String, input: String },
    #[error("zero-input terms form a cycle through {}", .0.join(" → "))]
    ZeroInputCycle(Vec<String>),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("bimodule json: {0}")]
    Json(String),
    #[error("ring mismatch: right gradings {left} vs left gradings {right}")]
    RingMismatch { left: String, right: String },
    #[error("box power {0} is not a positive power of 2")]
    BadPower(usize),
    #[error("product would hold {letters} input letters, cap is {cap}")]
    TooLarge { letters: u64, cap: u64 },
    #[error("certificate refused by {property}: {witness}")]
    Certificate { property: hochschild::Property, witness: String },
    #[error("certificate refused at level {level}: {reason}")]
    CertificateRefused { level: usize, reason: String },
    #[error("level {level}: Hochschild total {floer} differs from staircase {staircase}")]
    DimensionMismatch { level: usize, floer: u128, staircase: u128 },
}
