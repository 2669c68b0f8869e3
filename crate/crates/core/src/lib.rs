//! Toolkit for layered (hierarchical) UniMorph-style morphological
//! annotation, a templatic Georgian verb paradigm generator, and the
//! dataset splitting, scoring and baseline machinery for reinflection
//! experiments.

pub mod baseline;
pub mod eval;
pub mod georgian;
pub mod schema;
pub mod split;
pub mod unimorph;
