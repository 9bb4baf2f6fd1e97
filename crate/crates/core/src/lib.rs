//! Semantic similarity over concept taxonomies.
//!
//! A [`Taxonomy`] is a rooted DAG of concepts linked by typed edges. Corpus
//! counts become per-concept probabilities and information content
//! ([`stats`]), which feed the edge-based, node-based and combined measures
//! in [`measures`]. [`evaluation`] scores any measure against human ratings.
//!
//! ```
//! use taxosim::{parse_taxonomy, IcTable, MeasureConfig, Measure, word_similarity};
//!
//! let t = parse_taxonomy("node animal\nnode dog dog\nnode cat cat\n\
//!                         edge dog animal isa\nedge cat animal isa\n".as_bytes())?;
//! let ic = IcTable::from_ic(&t, vec![0.0, 3.0, 2.5], 2.0)?;
//! let r = word_similarity(&t, Some(&ic), &MeasureConfig::default(), Measure::Resnik, "dog", "cat")?;
//! assert_eq!(r.value, 0.0);
//! # Ok::<(), taxosim::Error>(())
//! ```

pub mod error;
pub mod evaluation;
pub mod measures;
pub mod stats;
pub mod taxonomy;

pub use error::{Error, Result};
pub use evaluation::{
    ablate_pair, evaluate_column, evaluate_measure, load_ratings, parameter_sweep, pearson,
    EvalReport, RatingDataset, RatingRow, SkippedPair, SweepGrid, DEFAULT_ALPHAS, DEFAULT_BETAS,
};
pub use measures::{
    combined_distance, combined_edge_weight, concept_measure, distance_to_similarity,
    jc_distance_simplified, link_strength, lsuper, sim_edge_counting, sim_resnik, sussna_distance,
    sussna_edge_weight, word_similarity, LsuperRule, Measure, MeasureConfig, MeasureResult,
    ResultKind,
};
pub use stats::{
    estimate_ic, estimate_probabilities, good_turing_probability, information_content,
    load_frequencies, Estimator, FrequencyKind, FrequencyTable, IcTable, Propagation,
};
pub use taxonomy::{
    parse_taxonomy, parse_taxonomy_with, Concept, ConceptId, Edge, Taxonomy, TaxonomyBuilder,
    TaxonomyOptions,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/taxonomy.md")]
    mod taxonomy {}
    #[doc = include_str!("../../../book/src/information-content.md")]
    mod information_content {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
