//! Interacting fermionic cellular automaton: free Weyl and Dirac walks, exact
//! classification of isotropic number-preserving cell interactions, and the
//! spectral resolution of the two-particle sector.

pub mod classifier;
pub mod exact;
pub mod fock;
pub mod linalg;
pub mod sim;
pub mod sparse;
pub mod spectral;
pub mod two_particle;
pub mod walks;
