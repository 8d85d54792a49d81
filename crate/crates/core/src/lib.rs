//! Transmission capacity of translation-invariant stabilizer PEPS on a
//! cylinder, computed in the binary symplectic picture.

pub mod classify;
pub mod error;
pub mod oracle;
pub mod stabgroup;
pub mod symplectic;
pub mod tensor;
pub mod wire;

pub use error::{DataError, ParseError, StabError};
pub use stabgroup::{canonical_bipartite_form, CanonicalBipartiteForm, StabilizerGroup};
pub use symplectic::{BinaryMatrix, BitVec, Letter, PauliVector};
pub use tensor::{OrbitTable, StabilizerTensor};
pub use wire::{capacity, UpdateRule};
