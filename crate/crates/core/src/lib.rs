//! Partition complexes, rooted-tree posets and the comparison map between
//! them, with operad-labelled variants and two bar constructions. All
//! homotopy-theoretic claims are checked on finite instances with exact
//! integer homology.

pub mod simplicial;
pub mod posets;
pub mod partitions;
pub mod trees;
pub mod comparison;
pub mod operads;
