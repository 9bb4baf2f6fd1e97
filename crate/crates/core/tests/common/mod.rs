#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taxosim::{Concept, IcTable, Taxonomy, TaxonomyBuilder, TaxonomyOptions};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn open_data(name: &str) -> BufReader<File> {
    BufReader::new(File::open(data_path(name)).expect("shipped data file"))
}

/// Concept ids and `(child, parent)` pairs of a generated hierarchy. Parents
/// always have smaller indices than their children.
#[derive(Clone, Debug)]
pub struct Shape {
    pub n: usize,
    pub parents: Vec<Vec<usize>>,
    pub words: Vec<Vec<String>>,
}

impl Shape {
    pub fn id(i: usize) -> String {
        format!("c{i}")
    }

    pub fn build(&self) -> Taxonomy {
        let mut b = TaxonomyBuilder::new();
        for i in 0..self.n {
            b.concept(&Self::id(i), self.words[i].iter().cloned())
                .unwrap();
        }
        for (i, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                b.edge(&Self::id(i), &Self::id(p), "isa").unwrap();
            }
        }
        b.build(&TaxonomyOptions::default()).unwrap()
    }

    /// Every descendant of `i`, `i` included.
    pub fn descendants(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::from([i]);
        for j in (i + 1)..self.n {
            if self.parents[j].iter().any(|p| out.contains(p)) {
                out.insert(j);
            }
        }
        out
    }

    /// Every ancestor of `i`, `i` included.
    pub fn ancestors(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::from([i]);
        for j in (0..=i).rev() {
            if out.contains(&j) {
                out.extend(self.parents[j].iter().copied());
            }
        }
        out
    }
}

/// A single word per concept, shared with a few other concepts at random.
fn assign_words(rng: &mut impl Rng, n: usize, polysemy: bool) -> Vec<Vec<String>> {
    let pool = (n / 3).max(1);
    (0..n)
        .map(|i| {
            let mut w = vec![format!("w{i}")];
            if polysemy && rng.gen_bool(0.3) {
                w.push(format!("shared{}", rng.gen_range(0..pool)));
            }
            w
        })
        .collect()
}

/// Random rooted tree with `n` nodes; node 0 is the root.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Shape {
    let parents = (0..n)
        .map(|i| {
            if i == 0 {
                vec![]
            } else {
                vec![rng.gen_range(0..i)]
            }
        })
        .collect();
    Shape {
        n,
        parents,
        words: assign_words(rng, n, true),
    }
}

/// Random single-rooted DAG with explicit diamonds: some nodes get a second
/// or third parent, and every fifth node closes a diamond over two siblings.
pub fn random_dag(rng: &mut impl Rng, n: usize) -> Shape {
    let mut parents: Vec<Vec<usize>> = vec![vec![]];
    for i in 1..n {
        let k = if i >= 3 {
            rng.gen_range(1..=3usize).min(i)
        } else {
            1
        };
        let mut ps: Vec<usize> = (0..i).collect();
        ps.shuffle(rng);
        ps.truncate(k);
        if i >= 4 && i % 5 == 0 {
            let top = rng.gen_range(0..i - 3);
            let kids: Vec<usize> = (top + 1..i)
                .filter(|&j| parents[j].contains(&top))
                .collect();
            if kids.len() >= 2 {
                ps = vec![kids[0], kids[1]];
            }
        }
        ps.sort_unstable();
        ps.dedup();
        parents.push(ps);
    }
    Shape {
        n,
        parents,
        words: assign_words(rng, n, true),
    }
}

/// Information content that never decreases from parent to child. The root
/// gets 0 and each child adds a random positive increment to its largest
/// parent value.
pub fn random_monotone_ic(rng: &mut impl Rng, t: &Taxonomy) -> IcTable {
    let mut ic: Vec<Option<f64>> = vec![None; t.len()];
    let order = topological(t);
    for c in order {
        let base = t
            .parents(c)
            .map(|p| ic[p.index()].expect("parents come first"))
            .fold(0.0, f64::max);
        let step = if t.parents(c).next().is_none() && !t.is_virtual(c) {
            rng.gen_range(0.0..1.0)
        } else if t.is_virtual(c) {
            0.0
        } else {
            rng.gen_range(0.05..3.0)
        };
        ic[c.index()] = Some(base + step);
    }
    IcTable::from_ic(t, ic.into_iter().map(Option::unwrap).collect(), 2.0).unwrap()
}

/// Parents before children.
pub fn topological(t: &Taxonomy) -> Vec<Concept> {
    let mut pending: BTreeMap<Concept, usize> =
        t.concepts().map(|c| (c, t.parents(c).count())).collect();
    let mut queue: VecDeque<Concept> = pending
        .iter()
        .filter(|(_, &n)| n == 0)
        .map(|(&c, _)| c)
        .collect();
    let mut out = Vec::new();
    while let Some(c) = queue.pop_front() {
        out.push(c);
        for k in t.children(c) {
            let n = pending.get_mut(&k).unwrap();
            *n -= 1;
            if *n == 0 {
                queue.push_back(k);
            }
        }
    }
    assert_eq!(out.len(), t.len());
    out
}

/// Unweighted undirected shortest paths by breadth-first search over the
/// generated edge list.
pub fn bfs_lengths(shape: &Shape, from: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); shape.n];
    for (c, ps) in shape.parents.iter().enumerate() {
        for &p in ps {
            adj[c].push(p);
            adj[p].push(c);
        }
    }
    let mut dist = vec![None; shape.n];
    dist[from] = Some(0);
    let mut q = VecDeque::from([from]);
    while let Some(x) = q.pop_front() {
        let d = dist[x].unwrap();
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                q.push_back(y);
            }
        }
    }
    dist
}

pub fn concept_of(t: &Taxonomy, i: usize) -> Concept {
    t.concept(&Shape::id(i)).unwrap()
}
