//! repfilt: exact computation of the modified rank filtration and the
//! complexity filtration on representation rings of finite groups, and of
//! the symmetric-product filtration on Burnside rings.
//!
//! Everything is computed with exact integer arithmetic and canonically
//! presented: each filtration stage is a finitely generated abelian group
//! given by generators, integer relations and Smith normal form.

pub mod cli;
pub mod coeffsys;
pub mod error;
pub mod exactalg;
pub mod filtration;
pub mod groups;
pub mod perm;
pub mod posets;
