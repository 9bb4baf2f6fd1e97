//! Concept hierarchy model, structural queries and the taxonomy file parser.
//!
//! A [`Taxonomy`] is a rooted DAG. Every concept is identified by a
//! [`ConceptId`] and addressed internally by a dense [`Concept`] handle.
//! Edges point from a child to a parent and carry a relation tag. Only edges
//! whose relation is listed in [`TaxonomyOptions::hierarchy_relations`]
//! (`isa` by default) take part in depth, density, subsumption and path
//! queries. The rest are stored but never traversed.
//!
//! When more than one root remains after loading, a virtual root is
//! synthesized above all of them, joined by edges tagged `virtual`. Those
//! edges count for depth and subsumption but never for density statistics
//! or edge-counting path lengths.
//!
//! File format, one directive per line:
//!
//! ```text
//! # comment
//! node <id> [word1,word2,...]
//! edge <child-id> <parent-id> <relation> [type_factor]
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::IcTable;

/// Relation tag of the edges joining original roots to a synthesized root.
pub const VIRTUAL_RELATION: &str = "virtual";
/// The default (and usually only) traversable relation.
pub const ISA: &str = "isa";

const VIRTUAL_ROOT_ID: &str = "*ROOT*";

/// Textual concept identifier: non-empty, no whitespace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ConceptId(String);

impl ConceptId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::Syntax {
                line: 0,
                message: format!("invalid concept id `{id}`"),
            });
        }
        Ok(ConceptId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Dense handle of a concept inside one [`Taxonomy`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Concept(u32);

impl Concept {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    fn from_index(i: usize) -> Self {
        Concept(i as u32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub child: Concept,
    pub parent: Concept,
    pub relation: String,
    pub type_factor: f64,
}

impl Edge {
    pub fn is_virtual(&self) -> bool {
        self.relation == VIRTUAL_RELATION
    }
}

#[derive(Clone, Debug)]
pub struct TaxonomyOptions {
    /// Synthesize a shared root when the hierarchy has several.
    pub virtual_root: bool,
    /// Relations that form the traversable hierarchy.
    pub hierarchy_relations: BTreeSet<String>,
}

impl Default for TaxonomyOptions {
    fn default() -> Self {
        TaxonomyOptions {
            virtual_root: true,
            hierarchy_relations: [ISA.to_string()].into_iter().collect(),
        }
    }
}

struct PendingEdge {
    line: usize,
    child: String,
    parent: String,
    relation: String,
    type_factor: f64,
}

/// Incremental construction of a [`Taxonomy`]; validation happens in
/// [`TaxonomyBuilder::build`].
#[derive(Default)]
pub struct TaxonomyBuilder {
    ids: Vec<ConceptId>,
    words: Vec<Vec<String>>,
    by_id: HashMap<String, usize>,
    edges: Vec<PendingEdge>,
}

impl TaxonomyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn concept<I, S>(&mut self, id: &str, words: I) -> Result<&mut Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.concept_at(0, id, words.into_iter().map(Into::into).collect())?;
        Ok(self)
    }

    pub fn edge(&mut self, child: &str, parent: &str, relation: &str) -> Result<&mut Self> {
        self.edge_at(0, child, parent, relation, 1.0)?;
        Ok(self)
    }

    pub fn weighted_edge(
        &mut self,
        child: &str,
        parent: &str,
        relation: &str,
        type_factor: f64,
    ) -> Result<&mut Self> {
        self.edge_at(0, child, parent, relation, type_factor)?;
        Ok(self)
    }

    fn concept_at(&mut self, line: usize, id: &str, words: Vec<String>) -> Result<()> {
        let cid = ConceptId::new(id).map_err(|e| with_line(e, line))?;
        if self.by_id.contains_key(id) {
            return Err(Error::DuplicateConcept {
                line,
                id: id.to_string(),
            });
        }
        if let Some(w) = words
            .iter()
            .find(|w| w.is_empty() || w.contains(char::is_whitespace))
        {
            return Err(Error::Syntax {
                line,
                message: format!("invalid word `{w}` on concept `{id}`"),
            });
        }
        self.by_id.insert(id.to_string(), self.ids.len());
        self.ids.push(cid);
        self.words.push(words);
        Ok(())
    }

    fn edge_at(
        &mut self,
        line: usize,
        child: &str,
        parent: &str,
        relation: &str,
        type_factor: f64,
    ) -> Result<()> {
        let syntax = |message: String| Error::Syntax { line, message };
        if child == parent {
            return Err(syntax(format!("self-loop on `{child}`")));
        }
        if relation.is_empty() {
            return Err(syntax("empty relation tag".into()));
        }
        if relation == VIRTUAL_RELATION {
            return Err(syntax(format!("relation `{VIRTUAL_RELATION}` is reserved")));
        }
        if !type_factor.is_finite() || type_factor < 0.0 {
            return Err(syntax(format!(
                "type factor must be finite and >= 0, got {type_factor}"
            )));
        }
        let dup = self
            .edges
            .iter()
            .any(|e| e.child == child && e.parent == parent && e.relation == relation);
        if dup {
            return Err(Error::DuplicateEdge {
                line,
                child: child.into(),
                parent: parent.into(),
                relation: relation.into(),
            });
        }
        self.edges.push(PendingEdge {
            line,
            child: child.into(),
            parent: parent.into(),
            relation: relation.into(),
            type_factor,
        });
        Ok(())
    }

    pub fn build(self, options: &TaxonomyOptions) -> Result<Taxonomy> {
        let TaxonomyBuilder {
            mut ids,
            mut words,
            by_id,
            edges: pending,
        } = self;
        if ids.is_empty() {
            return Err(Error::Syntax {
                line: 0,
                message: "taxonomy declares no concepts".into(),
            });
        }
        let mut edges = Vec::with_capacity(pending.len());
        for p in pending {
            let lookup = |id: &str| {
                by_id
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::DanglingEndpoint {
                        line: p.line,
                        id: id.to_string(),
                    })
            };
            let child = Concept::from_index(lookup(&p.child)?);
            let parent = Concept::from_index(lookup(&p.parent)?);
            edges.push(Edge {
                child,
                parent,
                relation: p.relation,
                type_factor: p.type_factor,
            });
        }
        check_acyclic(&ids, &edges)?;

        let n = ids.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if options.hierarchy_relations.contains(&e.relation) {
                up[e.child.index()].push(i);
                down[e.parent.index()].push(i);
            }
        }
        let roots: Vec<Concept> = (0..n)
            .filter(|&i| up[i].is_empty())
            .map(Concept::from_index)
            .collect();

        let mut virtual_root = None;
        if options.virtual_root && roots.len() > 1 {
            let mut vid = VIRTUAL_ROOT_ID.to_string();
            while by_id.contains_key(&vid) {
                vid.push('\'');
            }
            let v = Concept::from_index(n);
            ids.push(ConceptId(vid));
            words.push(Vec::new());
            up.push(Vec::new());
            down.push(Vec::new());
            for &r in &roots {
                let i = edges.len();
                edges.push(Edge {
                    child: r,
                    parent: v,
                    relation: VIRTUAL_RELATION.to_string(),
                    type_factor: 1.0,
                });
                up[r.index()].push(i);
                down[v.index()].push(i);
            }
            virtual_root = Some(v);
        }

        let mut word_index: BTreeMap<String, Vec<Concept>> = BTreeMap::new();
        for (i, ws) in words.iter().enumerate() {
            for w in ws {
                let senses = word_index.entry(w.clone()).or_default();
                if !senses.contains(&Concept::from_index(i)) {
                    senses.push(Concept::from_index(i));
                }
            }
        }

        let by_id = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.0.clone(), Concept::from_index(i)))
            .collect();
        let mut t = Taxonomy {
            ids,
            by_id,
            words,
            word_index,
            edges,
            up,
            down,
            roots,
            virtual_root,
            depth: Vec::new(),
            hierarchy_relations: options.hierarchy_relations.clone(),
        };
        t.depth = t.compute_depths();
        Ok(t)
    }
}

fn with_line(e: Error, line: usize) -> Error {
    match e {
        Error::Syntax { message, .. } => Error::Syntax { line, message },
        other => other,
    }
}

fn check_acyclic(ids: &[ConceptId], edges: &[Edge]) -> Result<()> {
    let n = ids.len();
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        out[e.child.index()].push(e.parent.index());
        indegree[e.parent.index()] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop_front() {
        seen += 1;
        for &p in &out[i] {
            indegree[p] -= 1;
            if indegree[p] == 0 {
                queue.push_back(p);
            }
        }
    }
    if seen == n {
        return Ok(());
    }
    let culprit = (0..n)
        .filter(|&i| indegree[i] > 0)
        .map(|i| &ids[i])
        .min()
        .expect("unsorted nodes remain");
    Err(Error::Cycle(culprit.to_string()))
}

/// Immutable concept hierarchy.
#[derive(Clone, Debug)]
pub struct Taxonomy {
    ids: Vec<ConceptId>,
    by_id: HashMap<String, Concept>,
    words: Vec<Vec<String>>,
    word_index: BTreeMap<String, Vec<Concept>>,
    edges: Vec<Edge>,
    // indices into `edges`, hierarchy and virtual edges only
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    roots: Vec<Concept>,
    virtual_root: Option<Concept>,
    depth: Vec<usize>,
    hierarchy_relations: BTreeSet<String>,
}

/// Parse a taxonomy with default options.
pub fn parse_taxonomy<R: BufRead>(source: R) -> Result<Taxonomy> {
    parse_taxonomy_with(source, &TaxonomyOptions::default())
}

pub fn parse_taxonomy_with<R: BufRead>(source: R, options: &TaxonomyOptions) -> Result<Taxonomy> {
    let mut b = TaxonomyBuilder::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: String| Error::Syntax {
            line: line_no,
            message,
        };
        match tokens.as_slice() {
            [] => {}
            ["node", id] => b.concept_at(line_no, id, Vec::new())?,
            ["node", id, words] => {
                let words = words.split(',').map(str::to_string).collect();
                b.concept_at(line_no, id, words)?
            }
            ["edge", child, parent, relation] => {
                b.edge_at(line_no, child, parent, relation, 1.0)?
            }
            ["edge", child, parent, relation, factor] => {
                let factor: f64 = factor
                    .parse()
                    .map_err(|_| syntax(format!("invalid type factor `{factor}`")))?;
                b.edge_at(line_no, child, parent, relation, factor)?
            }
            ["node", ..] => return Err(syntax("expected `node <id> [word,...]`".into())),
            ["edge", ..] => {
                return Err(syntax(
                    "expected `edge <child> <parent> <relation> [type_factor]`".into(),
                ))
            }
            [other, ..] => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    b.build(options)
}

impl Taxonomy {
    /// Number of concepts, including a virtual root when present.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn concepts(&self) -> impl Iterator<Item = Concept> + '_ {
        (0..self.ids.len()).map(Concept::from_index)
    }

    pub fn id(&self, c: Concept) -> &ConceptId {
        &self.ids[c.index()]
    }

    pub fn concept(&self, id: &str) -> Result<Concept> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownConcept(id.to_string()))
    }

    /// Words attached directly to `c`.
    pub fn words_of(&self, c: Concept) -> &[String] {
        &self.words[c.index()]
    }

    /// All concepts the word names (its senses).
    pub fn senses(&self, word: &str) -> Result<&[Concept]> {
        self.word_index
            .get(word)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownWord(word.to_string()))
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, &[Concept])> {
        self.word_index
            .iter()
            .map(|(w, s)| (w.as_str(), s.as_slice()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Roots of the loaded hierarchy (never the virtual root).
    pub fn roots(&self) -> &[Concept] {
        &self.roots
    }

    pub fn virtual_root(&self) -> Option<Concept> {
        self.virtual_root
    }

    pub fn is_virtual(&self, c: Concept) -> bool {
        self.virtual_root == Some(c)
    }

    /// The single top concept, real or virtual, if one exists.
    pub fn effective_root(&self) -> Option<Concept> {
        match (self.virtual_root, self.roots.as_slice()) {
            (Some(v), _) => Some(v),
            (None, [r]) => Some(*r),
            _ => None,
        }
    }

    pub fn hierarchy_relations(&self) -> &BTreeSet<String> {
        &self.hierarchy_relations
    }

    /// Parent edges of `c`, virtual edge included.
    pub fn parent_edges(&self, c: Concept) -> impl Iterator<Item = &Edge> + '_ {
        self.up[c.index()].iter().map(move |&i| &self.edges[i])
    }

    /// Child edges of `c`, virtual edges included.
    pub fn child_edges(&self, c: Concept) -> impl Iterator<Item = &Edge> + '_ {
        self.down[c.index()].iter().map(move |&i| &self.edges[i])
    }

    pub fn parents(&self, c: Concept) -> impl Iterator<Item = Concept> + '_ {
        self.parent_edges(c).map(|e| e.parent)
    }

    pub fn children(&self, c: Concept) -> impl Iterator<Item = Concept> + '_ {
        self.child_edges(c).map(|e| e.child)
    }

    /// The traversable edge from `child` up to `parent`, if any.
    pub fn edge_between(&self, child: Concept, parent: Concept) -> Option<&Edge> {
        self.parent_edges(child).find(|e| e.parent == parent)
    }

    fn compute_depths(&self) -> Vec<usize> {
        let n = self.len();
        let mut depth = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let sources: Vec<Concept> = match self.virtual_root {
            Some(v) => vec![v],
            None => self.roots.clone(),
        };
        for s in sources {
            depth[s.index()] = 1;
            queue.push_back(s);
        }
        while let Some(c) = queue.pop_front() {
            let d = depth[c.index()];
            for child in self.children(c) {
                if depth[child.index()] == usize::MAX {
                    depth[child.index()] = d + 1;
                    queue.push_back(child);
                }
            }
        }
        depth
    }

    /// 1 + the fewest parent edges from `c` to the effective root.
    pub fn depth(&self, c: Concept) -> usize {
        self.depth[c.index()]
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Child edges leaving `p`, virtual edges excluded.
    pub fn local_density(&self, p: Concept) -> usize {
        self.child_edges(p).filter(|e| !e.is_virtual()).count()
    }

    /// Non-virtual child edges per concept that has at least one.
    pub fn average_density(&self) -> f64 {
        let (edges, internal) = self.concepts().fold((0usize, 0usize), |(e, i), c| {
            let d = self.local_density(c);
            (e + d, i + usize::from(d > 0))
        });
        if internal == 0 {
            0.0
        } else {
            edges as f64 / internal as f64
        }
    }

    /// Upward BFS distances from `c` to each ancestor (itself at 0), together
    /// with the BFS predecessor used to rebuild one shortest chain.
    fn upward_bfs(&self, c: Concept) -> Vec<Option<(usize, Concept)>> {
        let mut seen = vec![None; self.len()];
        seen[c.index()] = Some((0, c));
        let mut queue = VecDeque::from([c]);
        while let Some(x) = queue.pop_front() {
            let (d, _) = seen[x.index()].expect("queued nodes are seen");
            for p in self.parents(x) {
                if seen[p.index()].is_none() {
                    seen[p.index()] = Some((d + 1, x));
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Every ancestor of `c`, `c` itself and the virtual root included.
    pub fn subsumers(&self, c: Concept) -> BTreeSet<Concept> {
        self.upward_bfs(c)
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| Concept::from_index(i))
            .collect()
    }

    pub fn common_subsumers(&self, c1: Concept, c2: Concept) -> BTreeSet<Concept> {
        let a = self.subsumers(c1);
        let b = self.subsumers(c2);
        a.intersection(&b).copied().collect()
    }

    /// Common subsumer with the largest IC; ties go to the deeper concept,
    /// then to the smaller id.
    pub fn most_informative_subsumer(
        &self,
        ic: &IcTable,
        c1: Concept,
        c2: Concept,
    ) -> Result<Concept> {
        self.pick_subsumer(c1, c2, |a, b| {
            ic.ic(a)
                .total_cmp(&ic.ic(b))
                .then(self.depth(a).cmp(&self.depth(b)))
        })
    }

    /// Deepest common subsumer; ties go to the larger IC, then the smaller id.
    pub fn deepest_common_subsumer(
        &self,
        ic: &IcTable,
        c1: Concept,
        c2: Concept,
    ) -> Result<Concept> {
        self.pick_subsumer(c1, c2, |a, b| {
            self.depth(a)
                .cmp(&self.depth(b))
                .then(ic.ic(a).total_cmp(&ic.ic(b)))
        })
    }

    fn pick_subsumer<F>(&self, c1: Concept, c2: Concept, rank: F) -> Result<Concept>
    where
        F: Fn(Concept, Concept) -> std::cmp::Ordering,
    {
        self.common_subsumers(c1, c2)
            .into_iter()
            .max_by(|&a, &b| rank(a, b).then_with(|| self.id(b).cmp(self.id(a))))
            .ok_or_else(|| {
                Error::NoCommonSubsumer(self.id(c1).to_string(), self.id(c2).to_string())
            })
    }

    /// Edge count of the shortest undirected path over hierarchy edges,
    /// virtual edges excluded. `None` when no such path exists.
    pub fn shortest_path_length(&self, c1: Concept, c2: Concept) -> Option<usize> {
        if c1 == c2 {
            return Some(0);
        }
        let mut dist = vec![usize::MAX; self.len()];
        dist[c1.index()] = 0;
        let mut queue = VecDeque::from([c1]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x.index()];
            let neighbours = self
                .parent_edges(x)
                .filter(|e| !e.is_virtual())
                .map(|e| e.parent)
                .chain(
                    self.child_edges(x)
                        .filter(|e| !e.is_virtual())
                        .map(|e| e.child),
                );
            for y in neighbours {
                if dist[y.index()] == usize::MAX {
                    if y == c2 {
                        return Some(d + 1);
                    }
                    dist[y.index()] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// One shortest chain of parent edges from `c` up to `ancestor`, both ends
    /// included.
    pub fn upward_chain(&self, c: Concept, ancestor: Concept) -> Option<Vec<Concept>> {
        let seen = self.upward_bfs(c);
        seen[ancestor.index()]?;
        let mut chain = vec![ancestor];
        let mut x = ancestor;
        while x != c {
            x = seen[x.index()].expect("predecessors are seen").1;
            chain.push(x);
        }
        chain.reverse();
        Some(chain)
    }

    /// `c1 … lsuper … c2`: the upward chain from `c1` followed by the reversed
    /// upward chain from `c2`, with `lsuper` listed once.
    pub fn path_through(&self, c1: Concept, c2: Concept, lsuper: Concept) -> Result<Vec<Concept>> {
        let no_common =
            || Error::NoCommonSubsumer(self.id(c1).to_string(), self.id(c2).to_string());
        let mut path = self.upward_chain(c1, lsuper).ok_or_else(no_common)?;
        let back = self.upward_chain(c2, lsuper).ok_or_else(no_common)?;
        path.extend(back.into_iter().rev().skip(1));
        Ok(path)
    }

    /// [`Taxonomy::path_through`] joined at the most informative subsumer.
    pub fn path_through_lsuper(
        &self,
        ic: &IcTable,
        c1: Concept,
        c2: Concept,
    ) -> Result<Vec<Concept>> {
        let l = self.most_informative_subsumer(ic, c1, c2)?;
        self.path_through(c1, c2, l)
    }
}
