//! Test support: brute-force oracles that share no code path with the
//! implementations they check, plus synthetic KITTI fixtures.
//!
//! Only plain data types are borrowed from `boxrecycle`; every geometric or
//! statistical quantity is recomputed here from first principles.

pub mod files;
pub mod fixtures;
pub mod oracles;
