//! Corpus statistics: frequency tables, propagation over the hierarchy,
//! probability estimators and information content.

mod frequency;
mod good_turing;
mod ic;

pub use frequency::{
    concept_freq_resnik, concept_freq_richardson, concept_freq_tagged, concept_frequencies,
    load_frequencies, own_frequencies, propagate, ConceptFrequencies, FrequencyKind,
    FrequencyTable, Propagation,
};
pub use good_turing::{good_turing_probability, GoodTuring};
pub use ic::{format_sig, information_content, Estimator, IcTable};

use crate::error::{Error, Result};
use crate::taxonomy::Taxonomy;

/// `freq(c) / N`, clamped to `[0, 1]`.
pub fn mle_probability(cf: &ConceptFrequencies, total_n: u64) -> Result<Vec<f64>> {
    if total_n == 0 {
        return Err(Error::InvalidConfig("corpus size must be positive".into()));
    }
    Ok(cf
        .as_slice()
        .iter()
        .map(|&f| (f / total_n as f64).clamp(0.0, 1.0))
        .collect())
}

/// Per-concept probabilities from raw counts.
///
/// Maximum likelihood divides the propagated frequency by N. Good-Turing
/// smooths each concept's own count as an independent event and then sums
/// the smoothed probabilities over descendant sets, so parents never fall
/// below their children and the root never exceeds 1. A virtual root always
/// gets probability 1.
pub fn estimate_probabilities(
    t: &Taxonomy,
    f: &FrequencyTable,
    scheme: Propagation,
    estimator: Estimator,
) -> Result<Vec<f64>> {
    let own = own_frequencies(t, f, scheme)?;
    let mut prob = match estimator {
        Estimator::Mle => mle_probability(&propagate(t, &own), f.total())?,
        Estimator::GoodTuring => {
            let events: Vec<_> = t.concepts().filter(|&c| !t.is_virtual(c)).collect();
            // fractional shares (word-richardson) are rounded to whole counts
            let counts: Vec<u64> = events
                .iter()
                .map(|&c| own[c.index()].round() as u64)
                .collect();
            let gt = good_turing_probability(&counts, f.total())?;
            let mut smoothed = vec![0.0; t.len()];
            for (c, p) in events.iter().zip(gt.probs) {
                smoothed[c.index()] = p;
            }
            propagate(t, &smoothed)
                .into_vec()
                .into_iter()
                .map(|p| p.min(1.0))
                .collect()
        }
        Estimator::Given => {
            return Err(Error::InvalidConfig(
                "`given` is not an estimator; load an IC file instead".into(),
            ))
        }
    };
    if let Some(v) = t.virtual_root() {
        prob[v.index()] = 1.0;
    }
    Ok(prob)
}

/// Frequencies to [`IcTable`] in one step.
pub fn estimate_ic(
    t: &Taxonomy,
    f: &FrequencyTable,
    scheme: Propagation,
    estimator: Estimator,
    log_base: f64,
) -> Result<IcTable> {
    let prob = estimate_probabilities(t, f, scheme, estimator)?;
    IcTable::from_probabilities(prob, log_base, estimator)
}
