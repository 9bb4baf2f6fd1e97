//! Similarity and distance measures over concept pairs, with the word-level
//! wrapper that takes the best value over all sense pairs.
//!
//! | id              | kind       | needs IC |
//! |-----------------|------------|----------|
//! | `edge`          | similarity | no       |
//! | `resnik`        | similarity | yes      |
//! | `sussna`        | distance   | no       |
//! | `jc`            | distance   | yes      |
//! | `jc-simplified` | distance   | yes      |

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::IcTable;
use crate::taxonomy::{Concept, Edge, Taxonomy};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Edge,
    Resnik,
    Sussna,
    Jc,
    JcSimplified,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Edge,
        Measure::Resnik,
        Measure::Sussna,
        Measure::Jc,
        Measure::JcSimplified,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Measure::Edge => "edge",
            Measure::Resnik => "resnik",
            Measure::Sussna => "sussna",
            Measure::Jc => "jc",
            Measure::JcSimplified => "jc-simplified",
        }
    }

    pub fn kind(self) -> ResultKind {
        match self {
            Measure::Edge | Measure::Resnik => ResultKind::Similarity,
            Measure::Sussna | Measure::Jc | Measure::JcSimplified => ResultKind::Distance,
        }
    }

    pub fn needs_ic(self) -> bool {
        matches!(self, Measure::Resnik | Measure::Jc | Measure::JcSimplified)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultKind {
    Similarity,
    Distance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub kind: ResultKind,
    /// The subsumer the value was computed through, when there is one.
    pub subsumer: Option<Concept>,
    /// Edge count of the path the value was computed along.
    pub path_len: Option<usize>,
    /// Winning sense pair, filled in by [`word_similarity`].
    pub senses: Option<(Concept, Concept)>,
}

impl MeasureResult {
    fn similarity(value: f64) -> Self {
        MeasureResult {
            value,
            kind: ResultKind::Similarity,
            subsumer: None,
            path_len: None,
            senses: None,
        }
    }

    fn distance(value: f64) -> Self {
        MeasureResult {
            kind: ResultKind::Distance,
            ..Self::similarity(value)
        }
    }
}

/// How the joining subsumer of a pair is chosen for the IC distances.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LsuperRule {
    /// Largest information content.
    #[default]
    MostInformative,
    /// Largest depth.
    Deepest,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureConfig {
    /// Depth exponent.
    pub alpha: f64,
    /// Density factor in `[0, 1]`.
    pub beta: f64,
    /// Per-relation link type factor, multiplied into each edge's own factor.
    pub type_factors: BTreeMap<String, f64>,
    pub sussna_min: BTreeMap<String, f64>,
    pub sussna_max: BTreeMap<String, f64>,
    /// `(min, max)` for relations without an explicit entry.
    pub sussna_default: Option<(f64, f64)>,
    /// Distance to similarity constant; `2 * d_max` when unset.
    pub conversion_c: Option<f64>,
    /// Maximum depth; the taxonomy's own maximum when unset.
    pub d_max: Option<usize>,
    pub lsuper: LsuperRule,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            alpha: 0.0,
            beta: 1.0,
            type_factors: BTreeMap::new(),
            sussna_min: BTreeMap::new(),
            sussna_max: BTreeMap::new(),
            sussna_default: Some((1.0, 2.0)),
            conversion_c: None,
            d_max: None,
            lsuper: LsuperRule::MostInformative,
        }
    }
}

impl MeasureConfig {
    pub fn with_alpha_beta(alpha: f64, beta: f64) -> Self {
        MeasureConfig {
            alpha,
            beta,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_inner(false)
    }

    /// Like [`MeasureConfig::validate`], but negative alpha only warns.
    pub fn validate_allowing_negative_alpha(&self) -> Result<()> {
        self.validate_inner(true)
    }

    fn validate_inner(&self, negative_alpha_ok: bool) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !self.alpha.is_finite() {
            return bad(format!("alpha must be finite, got {}", self.alpha));
        }
        if self.alpha < 0.0 {
            if !negative_alpha_ok {
                return bad(format!("alpha must be >= 0, got {}", self.alpha));
            }
            log::warn!(
                "alpha = {} lies outside the documented range alpha >= 0",
                self.alpha
            );
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return bad(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if let Some(v) = self
            .type_factors
            .values()
            .find(|v| !v.is_finite() || **v < 0.0)
        {
            return bad(format!("type factors must be finite and >= 0, got {v}"));
        }
        if self.d_max == Some(0) {
            return bad("d_max must be positive".into());
        }
        if let Some((lo, hi)) = self.sussna_default {
            if lo > hi {
                return bad(format!("sussna min {lo} exceeds max {hi}"));
            }
        }
        let relations = self.sussna_min.keys().chain(self.sussna_max.keys());
        for r in relations {
            let (lo, hi) = self.sussna_range(r)?;
            if lo > hi {
                return bad(format!("sussna min {lo} exceeds max {hi} for `{r}`"));
            }
        }
        Ok(())
    }

    pub fn d_max_for(&self, t: &Taxonomy) -> usize {
        self.d_max.unwrap_or_else(|| t.max_depth())
    }

    pub fn conversion_for(&self, t: &Taxonomy) -> f64 {
        self.conversion_c
            .unwrap_or_else(|| 2.0 * self.d_max_for(t) as f64)
    }

    pub fn sussna_range(&self, relation: &str) -> Result<(f64, f64)> {
        let default = self.sussna_default;
        let lo = self
            .sussna_min
            .get(relation)
            .copied()
            .or(default.map(|d| d.0));
        let hi = self
            .sussna_max
            .get(relation)
            .copied()
            .or(default.map(|d| d.1));
        match (lo, hi) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => Err(Error::UnknownRelation(relation.to_string())),
        }
    }

    /// The edge's own factor times the configured factor for its relation.
    pub fn type_factor(&self, edge: &Edge) -> f64 {
        edge.type_factor
            * self
                .type_factors
                .get(&edge.relation)
                .copied()
                .unwrap_or(1.0)
    }
}

/// `2 * d_max - len(c1, c2)`, or 0 when no path joins them.
pub fn sim_edge_counting(
    t: &Taxonomy,
    c1: Concept,
    c2: Concept,
    cfg: &MeasureConfig,
) -> MeasureResult {
    let ceiling = 2.0 * cfg.d_max_for(t) as f64;
    match t.shortest_path_length(c1, c2) {
        Some(len) => MeasureResult {
            path_len: Some(len),
            ..MeasureResult::similarity(ceiling - len as f64)
        },
        None => MeasureResult::similarity(0.0),
    }
}

/// Information content of the most informative common subsumer.
pub fn sim_resnik(t: &Taxonomy, ic: &IcTable, c1: Concept, c2: Concept) -> Result<MeasureResult> {
    let s = t.most_informative_subsumer(ic, c1, c2)?;
    Ok(MeasureResult {
        subsumer: Some(s),
        ..MeasureResult::similarity(ic.finite_ic(t, s)?)
    })
}

pub fn lsuper(
    t: &Taxonomy,
    ic: &IcTable,
    c1: Concept,
    c2: Concept,
    rule: LsuperRule,
) -> Result<Concept> {
    match rule {
        LsuperRule::MostInformative => t.most_informative_subsumer(ic, c1, c2),
        LsuperRule::Deepest => t.deepest_common_subsumer(ic, c1, c2),
    }
}

fn hierarchy_edges(t: &Taxonomy, x: Concept, y: Concept) -> impl Iterator<Item = &Edge> {
    t.parent_edges(x)
        .filter(move |e| e.parent == y)
        .chain(t.parent_edges(y).filter(move |e| e.parent == x))
        .filter(|e| !e.is_virtual())
}

/// `max_r - (max_r - min_r) / n_r(x)` for the `relation` edge between `x` and
/// `y`, where `n_r(x)` counts the edges of that relation leaving `x` in the
/// same direction (up to parents, or down to children).
pub fn sussna_directed_weight(
    t: &Taxonomy,
    x: Concept,
    y: Concept,
    relation: &str,
    cfg: &MeasureConfig,
) -> Result<f64> {
    let upward = t
        .parent_edges(x)
        .any(|e| e.parent == y && e.relation == relation && !e.is_virtual());
    let downward = t
        .parent_edges(y)
        .any(|e| e.parent == x && e.relation == relation && !e.is_virtual());
    let fanout = if upward {
        t.parent_edges(x).filter(|e| e.relation == relation).count()
    } else if downward {
        t.child_edges(x).filter(|e| e.relation == relation).count()
    } else {
        return Err(Error::NotAdjacent(t.id(x).to_string(), t.id(y).to_string()));
    };
    let (lo, hi) = cfg.sussna_range(relation)?;
    Ok(hi - (hi - lo) / fanout as f64)
}

/// Mean of the two directed weights over the depth of the deeper endpoint.
/// With several relations between the pair the lightest one wins.
pub fn sussna_edge_weight(
    t: &Taxonomy,
    c1: Concept,
    c2: Concept,
    cfg: &MeasureConfig,
) -> Result<f64> {
    let deeper = t.depth(c1).max(t.depth(c2)) as f64;
    let mut best: Option<f64> = None;
    for e in hierarchy_edges(t, c1, c2) {
        let forward = sussna_directed_weight(t, e.child, e.parent, &e.relation, cfg)?;
        let backward = sussna_directed_weight(t, e.parent, e.child, &e.relation, cfg)?;
        let w = (forward + backward) / (2.0 * deeper);
        best = Some(best.map_or(w, |b| b.min(w)));
    }
    best.ok_or_else(|| Error::NotAdjacent(t.id(c1).to_string(), t.id(c2).to_string()))
}

#[derive(PartialEq)]
struct Frontier(f64, usize, Concept);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then(other.1.cmp(&self.1))
            .then(other.2.cmp(&self.2))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lightest total Sussna weight over the undirected hierarchy (virtual edges
/// excluded).
pub fn sussna_distance(
    t: &Taxonomy,
    c1: Concept,
    c2: Concept,
    cfg: &MeasureConfig,
) -> Result<MeasureResult> {
    let mut best = vec![f64::INFINITY; t.len()];
    best[c1.index()] = 0.0;
    let mut heap = BinaryHeap::from([Frontier(0.0, 0, c1)]);
    while let Some(Frontier(d, hops, x)) = heap.pop() {
        if x == c2 {
            return Ok(MeasureResult {
                path_len: Some(hops),
                ..MeasureResult::distance(d)
            });
        }
        if d > best[x.index()] {
            continue;
        }
        let neighbours = t
            .parent_edges(x)
            .filter(|e| !e.is_virtual())
            .map(|e| e.parent)
            .chain(
                t.child_edges(x)
                    .filter(|e| !e.is_virtual())
                    .map(|e| e.child),
            );
        for y in neighbours {
            let nd = d + sussna_edge_weight(t, x, y, cfg)?;
            if nd < best[y.index()] {
                best[y.index()] = nd;
                heap.push(Frontier(nd, hops + 1, y));
            }
        }
    }
    Err(Error::Unreachable(
        t.id(c1).to_string(),
        t.id(c2).to_string(),
    ))
}

/// `IC(c) - IC(p)` across the parent edge `c -> p`.
pub fn link_strength(t: &Taxonomy, ic: &IcTable, c: Concept, p: Concept) -> Result<f64> {
    if t.edge_between(c, p).is_none() {
        return Err(Error::NotAnEdge {
            child: t.id(c).to_string(),
            parent: t.id(p).to_string(),
        });
    }
    Ok(ic.finite_ic(t, c)? - ic.finite_ic(t, p)?)
}

/// Child edges counted for the density factor. A virtual root, which has no
/// real child edges, counts its virtual ones.
fn density_of(t: &Taxonomy, p: Concept) -> usize {
    if t.is_virtual(p) {
        t.child_edges(p).count()
    } else {
        t.local_density(p)
    }
}

/// Weight of the parent edge `c -> p`:
///
/// `(beta + (1 - beta) * E_avg / E(p)) * ((d(p) + 1) / d(p))^alpha * LS(c, p) * T(c, p)`
pub fn combined_edge_weight(
    t: &Taxonomy,
    ic: &IcTable,
    c: Concept,
    p: Concept,
    cfg: &MeasureConfig,
) -> Result<f64> {
    combined_edge_weight_with(t, ic, c, p, cfg, t.average_density())
}

fn combined_edge_weight_with(
    t: &Taxonomy,
    ic: &IcTable,
    c: Concept,
    p: Concept,
    cfg: &MeasureConfig,
    average_density: f64,
) -> Result<f64> {
    let edge = t.edge_between(c, p).ok_or_else(|| Error::NotAnEdge {
        child: t.id(c).to_string(),
        parent: t.id(p).to_string(),
    })?;
    let strength = link_strength(t, ic, c, p)?;
    let local = density_of(t, p) as f64;
    let density = cfg.beta + (1.0 - cfg.beta) * average_density / local;
    let d = t.depth(p) as f64;
    let depth = ((d + 1.0) / d).powf(cfg.alpha);
    Ok(density * depth * strength * cfg.type_factor(edge))
}

/// Sum of [`combined_edge_weight`] over every hop of the path that climbs
/// from each concept to their joining subsumer.
pub fn combined_distance(
    t: &Taxonomy,
    ic: &IcTable,
    c1: Concept,
    c2: Concept,
    cfg: &MeasureConfig,
) -> Result<MeasureResult> {
    let l = lsuper(t, ic, c1, c2, cfg.lsuper)?;
    let average = t.average_density();
    let mut total = 0.0;
    let mut hops = 0;
    for start in [c1, c2] {
        let chain = t
            .upward_chain(start, l)
            .expect("a common subsumer is reachable upward from both concepts");
        for pair in chain.windows(2) {
            total += combined_edge_weight_with(t, ic, pair[0], pair[1], cfg, average)?;
            hops += 1;
        }
    }
    Ok(MeasureResult {
        subsumer: Some(l),
        path_len: Some(hops),
        ..MeasureResult::distance(total)
    })
}

/// `IC(c1) + IC(c2) - 2 * IC(lsuper)`.
pub fn jc_distance_simplified(
    t: &Taxonomy,
    ic: &IcTable,
    c1: Concept,
    c2: Concept,
    cfg: &MeasureConfig,
) -> Result<MeasureResult> {
    let l = lsuper(t, ic, c1, c2, cfg.lsuper)?;
    let value = ic.finite_ic(t, c1)? + ic.finite_ic(t, c2)? - 2.0 * ic.finite_ic(t, l)?;
    Ok(MeasureResult {
        subsumer: Some(l),
        ..MeasureResult::distance(value)
    })
}

/// `conversion_c - distance`; no clamping.
pub fn distance_to_similarity(d: &MeasureResult, conversion_c: f64) -> MeasureResult {
    assert_eq!(
        d.kind,
        ResultKind::Distance,
        "only distances can be converted"
    );
    MeasureResult {
        value: conversion_c - d.value,
        kind: ResultKind::Similarity,
        ..d.clone()
    }
}

/// Evaluate one measure on a concept pair.
pub fn concept_measure(
    t: &Taxonomy,
    ic: Option<&IcTable>,
    cfg: &MeasureConfig,
    measure: Measure,
    c1: Concept,
    c2: Concept,
) -> Result<MeasureResult> {
    let need_ic = || {
        ic.ok_or_else(|| {
            Error::InvalidConfig(format!("measure `{measure}` needs information content"))
        })
    };
    match measure {
        Measure::Edge => Ok(sim_edge_counting(t, c1, c2, cfg)),
        Measure::Resnik => sim_resnik(t, need_ic()?, c1, c2),
        Measure::Sussna => sussna_distance(t, c1, c2, cfg),
        Measure::Jc => combined_distance(t, need_ic()?, c1, c2, cfg),
        Measure::JcSimplified => jc_distance_simplified(t, need_ic()?, c1, c2, cfg),
    }
}

/// Best value over all sense pairs: the maximum for similarities, the
/// minimum for distances. The first best pair in sense order wins ties.
/// Sense pairs with no connecting path are passed over.
pub fn word_similarity(
    t: &Taxonomy,
    ic: Option<&IcTable>,
    cfg: &MeasureConfig,
    measure: Measure,
    w1: &str,
    w2: &str,
) -> Result<MeasureResult> {
    let s1 = t.senses(w1)?;
    let s2 = t.senses(w2)?;
    let mut best: Option<MeasureResult> = None;
    let mut unreachable = None;
    for &a in s1 {
        for &b in s2 {
            let r = match concept_measure(t, ic, cfg, measure, a, b) {
                Ok(r) => r,
                Err(e @ Error::Unreachable(..)) => {
                    unreachable.get_or_insert(e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let better = match (&best, measure.kind()) {
                (None, _) => true,
                (Some(cur), ResultKind::Similarity) => r.value > cur.value,
                (Some(cur), ResultKind::Distance) => r.value < cur.value,
            };
            if better {
                best = Some(MeasureResult {
                    senses: Some((a, b)),
                    ..r
                });
            }
        }
    }
    best.ok_or_else(|| unreachable.expect("every word has at least one sense"))
}
