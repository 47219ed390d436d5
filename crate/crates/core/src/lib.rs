//! Exact-simulation laboratory for variational quantum eigensolvers on small
//! molecules: Pauli algebra, fermion-to-qubit encodings, a statevector
//! simulator with adjoint gradients, hardware-efficient and coupled-cluster
//! Ansätze, determinant and CSF references, and the scan driver that ties
//! them together.

pub mod ansatz;
pub mod encoding;
pub mod error;
pub mod fci;
pub mod fermion;
pub mod first_quant;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod pauli;
pub mod statevector;
pub mod symmetry;
#[doc(hidden)]
pub mod testing;
pub mod vqe;

pub use error::{Error, Result};
pub use pauli::{commutator, mul_pauli, Pauli, PauliString, PauliTerm, QubitOperator};
