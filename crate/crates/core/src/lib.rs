//! Sparse representation-based classification over local tangent-hyperplane
//! dictionaries.
//!
//! The crate implements the SRC family of classifiers (SRC, LPCA-SRC,
//! pruned SRC), tangent distance classification, and nearest-neighbor
//! baselines, together with the numerical machinery they stand on: a
//! homotopy solver for the l1-regularized least-squares problem, weighted
//! local PCA for tangent-basis estimation, extended-dictionary construction
//! with test-adaptive pruning, a synthetic manifold benchmark, non-centered
//! PCA preprocessing, and an evaluation harness with consecutive
//! cross-validation and paired significance tests.
//!
//! See the `book/` directory of the repository for a guided tour; its code
//! snippets double as this crate's doc-tests.

pub mod classify;
pub mod dataset;
pub mod dictionary;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod lpca;
pub mod preprocess;
pub mod rng;
pub mod solver;
pub mod synth;

pub use dataset::Dataset;
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(sparse_coding, "../../../book/src/sparse-coding.md");
    chapter!(tangent_bases, "../../../book/src/tangent-bases.md");
    chapter!(extended_dictionary, "../../../book/src/extended-dictionary.md");
    chapter!(classifiers, "../../../book/src/classifiers.md");
    chapter!(synthetic_benchmark, "../../../book/src/synthetic-benchmark.md");
    chapter!(evaluation, "../../../book/src/evaluation.md");
    chapter!(preprocessing, "../../../book/src/preprocessing.md");
}
