use std::collections::BTreeMap;
use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::taxonomy::{Concept, Taxonomy};

/// What the tokens of a [`FrequencyTable`] name.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyKind {
    Word,
    Sense,
}

/// Pre-counted corpus frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTable {
    kind: FrequencyKind,
    counts: BTreeMap<String, u64>,
    total: u64,
    duplicates: Vec<String>,
}

impl FrequencyTable {
    /// `total` defaults to the sum of counts (at least 1).
    pub fn new(
        kind: FrequencyKind,
        counts: BTreeMap<String, u64>,
        total: Option<u64>,
    ) -> Result<Self> {
        let sum: u64 = counts.values().sum();
        let total = match total {
            Some(0) => return Err(Error::InvalidConfig("corpus size N must be >= 1".into())),
            Some(n) => n,
            None => sum.max(1),
        };
        Ok(FrequencyTable {
            kind,
            counts,
            total,
            duplicates: Vec::new(),
        })
    }

    pub fn kind(&self) -> FrequencyKind {
        self.kind
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// Corpus size N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Tokens that appeared on more than one line; their counts were summed.
    pub fn duplicates(&self) -> &[String] {
        &self.duplicates
    }
}

/// Read `[N <int>]` followed by `<token> <count>` lines.
pub fn load_frequencies<R: BufRead>(source: R, kind: FrequencyKind) -> Result<FrequencyTable> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut declared = None;
    let mut duplicates = Vec::new();
    let mut seen_entry = false;
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: String| Error::Syntax {
            line: line_no,
            message,
        };
        let [token, count] = tokens.as_slice() else {
            if tokens.is_empty() {
                continue;
            }
            return Err(syntax("expected `<token> <count>`".into()));
        };
        let value: i64 = count
            .parse()
            .map_err(|_| syntax(format!("invalid count `{count}`")))?;
        if value < 0 {
            return Err(Error::NegativeCount {
                line: line_no,
                token: token.to_string(),
                count: value,
            });
        }
        if *token == "N" && !seen_entry && declared.is_none() {
            if value == 0 {
                return Err(syntax("corpus size N must be >= 1".into()));
            }
            declared = Some(value as u64);
            continue;
        }
        seen_entry = true;
        match counts.get_mut(*token) {
            Some(slot) => {
                log::warn!("line {line_no}: duplicate token `{token}`, counts summed");
                if !duplicates.iter().any(|d| d == token) {
                    duplicates.push(token.to_string());
                }
                *slot += value as u64;
            }
            None => {
                counts.insert(token.to_string(), value as u64);
            }
        }
    }
    let mut table = FrequencyTable::new(kind, counts, declared)?;
    table.duplicates = duplicates;
    Ok(table)
}

/// How word or sense counts are spread over concepts before propagation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Propagation {
    /// Each word credits its full count to every concept it names.
    WordResnik,
    /// Each word's count is split evenly over the concepts it names.
    WordRichardson,
    /// Counts are keyed by concept id already.
    Sense,
}

impl Propagation {
    pub fn expected_kind(self) -> FrequencyKind {
        match self {
            Propagation::WordResnik | Propagation::WordRichardson => FrequencyKind::Word,
            Propagation::Sense => FrequencyKind::Sense,
        }
    }
}

/// Per-concept frequencies, indexed by [`Concept`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConceptFrequencies(Vec<f64>);

impl ConceptFrequencies {
    pub fn get(&self, c: Concept) -> f64 {
        self.0[c.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// The count each concept receives directly, before propagation.
pub fn own_frequencies(t: &Taxonomy, f: &FrequencyTable, scheme: Propagation) -> Result<Vec<f64>> {
    if f.kind() != scheme.expected_kind() {
        return Err(Error::InvalidConfig(format!(
            "{scheme:?} propagation needs a {:?} frequency table",
            scheme.expected_kind()
        )));
    }
    let mut own = vec![0.0; t.len()];
    match scheme {
        Propagation::WordResnik | Propagation::WordRichardson => {
            for (word, &count) in f.counts() {
                let Ok(senses) = t.senses(word) else { continue };
                let share = match scheme {
                    Propagation::WordRichardson => count as f64 / senses.len() as f64,
                    _ => count as f64,
                };
                for &c in senses {
                    own[c.index()] += share;
                }
            }
        }
        Propagation::Sense => {
            for (id, &count) in f.counts() {
                own[t.concept(id)?.index()] += count as f64;
            }
        }
    }
    Ok(own)
}

/// Sum `own` over each concept's descendant set. A descendant reachable along
/// several paths contributes once.
pub fn propagate(t: &Taxonomy, own: &[f64]) -> ConceptFrequencies {
    let mut freq = vec![0.0; t.len()];
    for c in t.concepts() {
        let v = own[c.index()];
        if v == 0.0 {
            continue;
        }
        for a in t.subsumers(c) {
            freq[a.index()] += v;
        }
    }
    ConceptFrequencies(freq)
}

pub fn concept_frequencies(
    t: &Taxonomy,
    f: &FrequencyTable,
    scheme: Propagation,
) -> Result<ConceptFrequencies> {
    Ok(propagate(t, &own_frequencies(t, f, scheme)?))
}

/// Word counts summed over every word subsumed by each concept.
pub fn concept_freq_resnik(t: &Taxonomy, f: &FrequencyTable) -> Result<ConceptFrequencies> {
    concept_frequencies(t, f, Propagation::WordResnik)
}

/// Like [`concept_freq_resnik`], with each word's count divided by its
/// number of senses.
pub fn concept_freq_richardson(t: &Taxonomy, f: &FrequencyTable) -> Result<ConceptFrequencies> {
    concept_frequencies(t, f, Propagation::WordRichardson)
}

/// Sense-tagged counts: own count plus every descendant's own count.
pub fn concept_freq_tagged(t: &Taxonomy, f: &FrequencyTable) -> Result<ConceptFrequencies> {
    concept_frequencies(t, f, Propagation::Sense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::parse_taxonomy;

    fn table(src: &str, kind: FrequencyKind) -> FrequencyTable {
        load_frequencies(src.as_bytes(), kind).unwrap()
    }

    fn freq_of(t: &Taxonomy, cf: &ConceptFrequencies, id: &str) -> f64 {
        cf.get(t.concept(id).unwrap())
    }

    #[test]
    fn header_and_counts() {
        let f = table("N 100\ncar 10\n", FrequencyKind::Word);
        assert_eq!(f.total(), 100);
        assert_eq!(f.count("car"), 10);
        assert_eq!(f.counts().len(), 1);
        let f = table("# c\ncar 3\nbus 2\n", FrequencyKind::Word);
        assert_eq!(f.total(), 5);
    }

    #[test]
    fn duplicates_are_summed() {
        let f = table("car 3\ncar 4\n", FrequencyKind::Word);
        assert_eq!(f.count("car"), 7);
        assert_eq!(f.duplicates(), ["car"]);
    }

    #[test]
    fn sense_keys() {
        let f = table("n01234 5\n", FrequencyKind::Sense);
        assert_eq!(f.kind(), FrequencyKind::Sense);
        assert_eq!(f.count("n01234"), 5);
    }

    #[test]
    fn bad_lines() {
        let err = load_frequencies("car -2\n".as_bytes(), FrequencyKind::Word).unwrap_err();
        assert!(matches!(
            err,
            Error::NegativeCount {
                line: 1,
                count: -2,
                ..
            }
        ));
        let err = load_frequencies("car 2\nbus two\n".as_bytes(), FrequencyKind::Word).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        let err = load_frequencies("car 2 3\n".as_bytes(), FrequencyKind::Word).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, .. }));
        let err = load_frequencies("N 0\n".as_bytes(), FrequencyKind::Word).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, .. }));
    }

    #[test]
    fn empty_table_gives_zeros() {
        let t = parse_taxonomy("node a\nnode b\nedge b a isa\n".as_bytes()).unwrap();
        let f = table("", FrequencyKind::Word);
        assert_eq!(f.total(), 1);
        let cf = concept_freq_resnik(&t, &f).unwrap();
        assert!(cf.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn chain_propagation() {
        let t = parse_taxonomy("node a\nnode b x\nedge b a isa\n".as_bytes()).unwrap();
        let f = table("x 4\n", FrequencyKind::Word);
        let r = concept_freq_resnik(&t, &f).unwrap();
        assert_eq!(freq_of(&t, &r, "b"), 4.0);
        assert_eq!(freq_of(&t, &r, "a"), 4.0);
        assert_eq!(concept_freq_richardson(&t, &f).unwrap(), r);
    }

    #[test]
    fn polysemous_word_resnik_vs_richardson() {
        let t =
            parse_taxonomy("node a\nnode b w\nnode c w\nedge b a isa\nedge c a isa\n".as_bytes())
                .unwrap();
        let f = table("w 2\nunknown 9\n", FrequencyKind::Word);
        let r = concept_freq_resnik(&t, &f).unwrap();
        assert_eq!(
            (
                freq_of(&t, &r, "b"),
                freq_of(&t, &r, "c"),
                freq_of(&t, &r, "a")
            ),
            (2.0, 2.0, 4.0)
        );
        let q = concept_freq_richardson(&t, &f).unwrap();
        assert_eq!(
            (
                freq_of(&t, &q, "b"),
                freq_of(&t, &q, "c"),
                freq_of(&t, &q, "a")
            ),
            (1.0, 1.0, 2.0)
        );
    }

    #[test]
    fn tagged_counts_diamond_once() {
        let t = parse_taxonomy(
            "node r\nnode a\nnode b\nnode c\nedge a r isa\nedge b r isa\nedge c a isa\nedge c b isa\n"
                .as_bytes(),
        )
        .unwrap();
        let f = table("c 3\n", FrequencyKind::Sense);
        let cf = concept_freq_tagged(&t, &f).unwrap();
        assert_eq!(freq_of(&t, &cf, "a"), 3.0);
        assert_eq!(freq_of(&t, &cf, "b"), 3.0);
        assert_eq!(freq_of(&t, &cf, "r"), 3.0);

        let leaf = parse_taxonomy("node p\nnode l\nedge l p isa\n".as_bytes()).unwrap();
        let cf = concept_freq_tagged(&leaf, &table("l 5\np 0\n", FrequencyKind::Sense)).unwrap();
        assert_eq!(freq_of(&leaf, &cf, "p"), 5.0);
        let cf = concept_freq_tagged(&leaf, &table("l 0\n", FrequencyKind::Sense)).unwrap();
        assert!(cf.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tagged_rejects_unknown_ids_and_wrong_kind() {
        let t = parse_taxonomy("node a\n".as_bytes()).unwrap();
        let f = table("zz 1\n", FrequencyKind::Sense);
        assert_eq!(
            concept_freq_tagged(&t, &f).unwrap_err(),
            Error::UnknownConcept("zz".into())
        );
        let w = table("a 1\n", FrequencyKind::Word);
        assert!(matches!(
            concept_freq_tagged(&t, &w),
            Err(Error::InvalidConfig(_))
        ));
    }
}
