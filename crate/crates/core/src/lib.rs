pub mod expr;
pub mod frontend;
pub mod hamiltonian;
pub mod jet;
pub mod numeric;
pub mod variational;
