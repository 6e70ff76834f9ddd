//! The Schreier graph of the Grigorchuk group acting on the orbit of `1^∞`.
//!
//! The graph is a one-ended line. Vertex 0 is `1^∞`; vertices are numbered by
//! walking right, alternating `a`-edges and double edges.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::{Generator, GrigElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchreierError {
    #[error("graph needs at least 2 vertices")]
    TooSmall,
    #[error("vertex {vertex} matches no segment template")]
    TemplateMismatch { vertex: usize },
    #[error("the two leftmost vertices do not have the expected shape")]
    BadLeftEnd,
    #[error("orbit walk branched at vertex {0}")]
    NotALine(usize),
}

/// A point `prefix · 1^∞` of the orbit of `1^∞`. The prefix never ends in 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OrbitPoint {
    prefix: Vec<bool>,
}

impl OrbitPoint {
    pub fn new(mut prefix: Vec<bool>) -> Self {
        while prefix.last() == Some(&true) {
            prefix.pop();
        }
        Self { prefix }
    }

    /// Parses a `0`/`1` string.
    pub fn parse(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(Self::new)
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    /// Image under a generator, from the wreath recursion directly.
    pub fn act(&self, gen: Generator) -> OrbitPoint {
        #[derive(Clone, Copy)]
        enum State {
            Id,
            G(Generator),
        }
        let mut out = Vec::with_capacity(self.prefix.len() + 1);
        let mut state = State::G(gen);
        for &x in &self.prefix {
            state = match state {
                State::Id => {
                    out.push(x);
                    State::Id
                }
                State::G(Generator::A) => {
                    out.push(!x);
                    State::Id
                }
                State::G(g) => {
                    out.push(x);

                    match (g, x) {
                        (Generator::B, false) | (Generator::C, false) => State::G(Generator::A),
                        (Generator::D, false) => State::Id,
                        (Generator::B, true) => State::G(Generator::C),
                        (Generator::C, true) => State::G(Generator::D),
                        (Generator::D, true) => State::G(Generator::B),
                        (Generator::A, _) => unreachable!(),
                    }
                }
            };
        }
        // b, c, d fix 1^∞; a turns it into 0 1^∞
        if let State::G(Generator::A) = state {
            out.push(false);
        }
        OrbitPoint::new(out)
    }

    pub fn act_word(&self, word: &[Generator]) -> OrbitPoint {
        word.iter().fold(self.clone(), |p, &g| p.act(g))
    }

    /// Image under a group element, through its portrait sections.
    pub fn act_element(&self, g: &GrigElement) -> OrbitPoint {
        OrbitPoint::new(g.act_ray(&self.prefix))
    }
}

impl fmt::Display for OrbitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.prefix {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: Generator,
}

/// Induced subgraph on the first `n` orbit points, left to right.
#[derive(Debug, Clone)]
pub struct SchreierGraph {
    vertices: Vec<OrbitPoint>,
    index: HashMap<OrbitPoint, usize>,
    /// `neighbor[v][label]`, `None` when the edge leaves the built range.
    neighbor: Vec<[Option<usize>; 4]>,
}

fn label_index(g: Generator) -> usize {
    match g {
        Generator::A => 0,
        Generator::B => 1,
        Generator::C => 2,
        Generator::D => 3,
    }
}

impl SchreierGraph {
    pub fn build(n_vertices: usize) -> Result<Self, SchreierError> {
        if n_vertices < 2 {
            return Err(SchreierError::TooSmall);
        }
        let mut vertices = vec![OrbitPoint::default()];
        while vertices.len() < n_vertices {
            let i = vertices.len() - 1;
            let cur = &vertices[i];
            let prev = i.checked_sub(1).map(|j| &vertices[j]);
            let mut next: Option<OrbitPoint> = None;
            for g in Generator::ALL {
                let w = cur.act(g);
                if &w == cur || Some(&w) == prev {
                    continue;
                }
                match &next {
                    Some(n) if *n != w => return Err(SchreierError::NotALine(i)),
                    _ => next = Some(w),
                }
            }
            vertices.push(next.ok_or(SchreierError::NotALine(i))?);
        }
        let index: HashMap<OrbitPoint, usize> = vertices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let neighbor = vertices
            .iter()
            .map(|p| Generator::ALL.map(|g| index.get(&p.act(g)).copied()))
            .collect();
        Ok(Self {
            vertices,
            index,
            neighbor,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &OrbitPoint {
        &self.vertices[i]
    }

    pub fn index_of(&self, p: &OrbitPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn neighbor(&self, v: usize, g: Generator) -> Option<usize> {
        self.neighbor[v][label_index(g)]
    }

    /// Each undirected edge once (`u <= v`); loops have `u == v`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (u, ns) in self.neighbor.iter().enumerate() {
            for g in Generator::ALL {
                if let Some(v) = ns[label_index(g)] {
                    if u <= v {
                        out.push(Edge { u, v, label: g });
                    }
                }
            }
        }
        out
    }

    /// Label incidences at `v` inside the built range; loops count once.
    pub fn degree(&self, v: usize) -> usize {
        self.neighbor[v].iter().filter(|n| n.is_some()).count()
    }

    pub fn loop_labels(&self, v: usize) -> Vec<Generator> {
        Generator::ALL
            .into_iter()
            .filter(|&g| self.neighbor(v, g) == Some(v))
            .collect()
    }

    /// Labels of edges between `u` and `v`.
    pub fn labels_between(&self, u: usize, v: usize) -> Vec<Generator> {
        Generator::ALL
            .into_iter()
            .filter(|&g| self.neighbor(u, g) == Some(v))
            .collect()
    }

    /// Tab-separated edge list, one `u v label` line per edge.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for e in self.edges() {
            s.push_str(&format!("{}\t{}\t{}\n", e.u, e.v, e.label.as_char()));
        }
        s
    }

    /// Breadth-first search from vertex 0 where each word of `gens` is one
    /// step. Counts are numbers of step sequences along shortest paths.
    pub fn geodesic_count(&self, gens: &[Vec<Generator>]) -> GeodesicReport {
        let n = self.len();
        let mut distance = vec![None; n];
        let mut count = vec![BigUint::zero(); n];
        let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        distance[0] = Some(0);
        count[0] = BigUint::one();
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            let du = distance[u].expect("queued vertices have a distance");
            for (k, w) in gens.iter().enumerate() {
                let Some(v) = self.index_of(&self.vertices[u].act_word(w)) else {
                    continue;
                };
                match distance[v] {
                    None => {
                        distance[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                    Some(dv) if dv != du + 1 => continue,
                    Some(_) => {}
                }
                let c = count[u].clone();
                count[v] += c;
                preds[v].push((u, k));
            }
        }
        GeodesicReport {
            gens: gens.to_vec(),
            distance,
            count,
            preds,
        }
    }

    /// Splits everything right of the two leftmost vertices into copies of the
    /// three segment templates. A trailing block cut off by the end of the
    /// graph is left out.
    pub fn segment_decomposition(&self) -> Result<Vec<Segment>, SchreierError> {
        use Generator::*;
        let n = self.len();
        if n < 3 {
            return Ok(Vec::new());
        }
        if self.loop_labels(0) != [B, C, D]
            || self.labels_between(0, 1) != [A]
            || self.loop_labels(1) != [D]
        {
            return Err(SchreierError::BadLeftEnd);
        }
        if self.labels_between(1, 2) != [B, C] {
            return Err(SchreierError::BadLeftEnd);
        }
        let mut out = Vec::new();
        let mut s = 2;
        loop {
            let mut matched = None;
            for kind in [SegmentKind::S1, SegmentKind::S2, SegmentKind::S3] {
                let len = kind.len();
                if s + len >= n {
                    // the closing double edge is not in the graph
                    return Ok(out);
                }
                if self.matches(kind, s) {
                    matched = Some(kind);
                    break;
                }
            }
            let kind = matched.ok_or(SchreierError::TemplateMismatch { vertex: s })?;
            out.push(Segment { kind, start: s });
            s += kind.len();
        }
    }

    /// Exact comparison of the induced subgraph on `s..s+len` with the
    /// template, plus the `{b, c}` double edges joining it to its neighbours.
    fn matches(&self, kind: SegmentKind, s: usize) -> bool {
        use Generator::*;
        let len = kind.len();
        let (loops, inner): (&[Generator], &[Generator]) = match kind {
            SegmentKind::S1 => (&[D, D], &[]),
            SegmentKind::S2 => (&[D, B, B, D], &[C, D]),
            SegmentKind::S3 => (&[D, C, C, D], &[B, D]),
        };
        for (i, &l) in loops.iter().enumerate() {
            if self.loop_labels(s + i) != [l] {
                return false;
            }
        }
        for i in 0..len {
            for j in (i + 1)..len {
                let expected: &[Generator] = match (i, j) {
                    (0, 1) | (2, 3) => &[A],
                    (1, 2) => inner,
                    _ => &[],
                };
                if self.labels_between(s + i, s + j) != expected {
                    return false;
                }
            }
        }
        self.labels_between(s - 1, s) == [B, C]
            && self.labels_between(s + len - 1, s + len) == [B, C]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    /// Two vertices with `d`-loops joined by `a`.
    S1,
    /// Four vertices, loops `d b b d`, inner double edge `{c, d}`.
    S2,
    /// Four vertices, loops `d c c d`, inner double edge `{b, d}`.
    S3,
}

impl SegmentKind {
    pub fn len(self) -> usize {
        match self {
            SegmentKind::S1 => 2,
            SegmentKind::S2 | SegmentKind::S3 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SegmentKind::S1 => "S1",
            SegmentKind::S2 => "S2",
            SegmentKind::S3 => "S3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
}

impl Segment {
    pub fn rightmost(&self) -> usize {
        self.start + self.kind.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicReport {
    pub gens: Vec<Vec<Generator>>,
    pub distance: Vec<Option<usize>>,
    pub count: Vec<BigUint>,
    /// Shortest-path predecessors `(vertex, generator index)`.
    preds: Vec<Vec<(usize, usize)>>,
}

impl GeodesicReport {
    /// The geodesic to `v` as generator indices, when it is unique.
    pub fn unique_geodesic(&self, v: usize) -> Option<Vec<usize>> {
        if !self.count[v].is_one() {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = v;
        while cur != 0 {
            let &[(u, k)] = self.preds[cur].as_slice() else {
                return None;
            };
            path.push(k);
            cur = u;
        }
        path.reverse();
        Some(path)
    }

    /// Group element of the unique geodesic to `v`: the product of its steps.
    pub fn endpoint_element(&self, v: usize) -> Option<GrigElement> {
        let path = self.unique_geodesic(v)?;
        let word: Vec<Generator> = path
            .iter()
            .flat_map(|&k| self.gens[k].iter().copied())
            .collect();
        Some(GrigElement::from_word(&word))
    }
}

/// The step set `{ada, dad, c}`.
pub fn t_generators() -> Vec<Vec<Generator>> {
    ["ada", "dad", "c"]
        .iter()
        .map(|w| Generator::parse_word(w).expect("fixed words"))
        .collect()
}

/// The step set `{a, b, c, d}`.
pub fn standard_generators() -> Vec<Vec<Generator>> {
    Generator::ALL.iter().map(|&g| vec![g]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;
    use Generator::*;

    fn pt(s: &str) -> OrbitPoint {
        OrbitPoint::parse(s).unwrap()
    }

    #[test]
    fn action_on_the_fixed_ray() {
        let e = OrbitPoint::default();
        for g in [B, C, D] {
            assert_eq!(e.act(g), e);
        }
        assert_eq!(e.act(A), pt("0"));
        assert_eq!(pt("0111"), pt("0"));
        assert_eq!(pt("10").act(C), pt("10"));
        assert_eq!(pt("10").act(B), pt("100"));
    }

    #[test]
    fn generators_act_as_involutions() {
        for s in ["", "0", "0010", "110001", "0101010"] {
            for g in Generator::ALL {
                assert_eq!(pt(s).act(g).act(g), pt(s));
            }
        }
    }

    #[test]
    fn small_graphs() {
        let g = SchreierGraph::build(2).unwrap();
        assert_eq!(g.loop_labels(0), vec![B, C, D]);
        assert_eq!(g.labels_between(0, 1), vec![A]);
        let g = SchreierGraph::build(4).unwrap();
        assert_eq!(g.labels_between(1, 2), vec![B, C]);
        assert!(SchreierGraph::build(1).is_err());
    }

    #[test]
    fn four_regular() {
        let g = SchreierGraph::build(200).unwrap();
        for v in 0..199 {
            assert_eq!(g.degree(v), 4, "vertex {v}");
            // loops count once, multi-edges with multiplicity
            let incidences: usize = g.edges().iter().filter(|e| e.u == v || e.v == v).count();
            assert_eq!(incidences, 4);
        }
        assert!(g.degree(199) < 4);
    }

    #[test]
    fn edge_list_format() {
        let g = SchreierGraph::build(3).unwrap();
        assert_eq!(
            g.edge_list(),
            "0\t1\ta\n0\t0\tb\n0\t0\tc\n0\t0\td\n1\t2\tb\n1\t2\tc\n1\t1\td\n2\t2\td\n"
        );
    }

    #[test]
    fn standard_generator_geodesics() {
        let g = SchreierGraph::build(40).unwrap();
        let r = g.geodesic_count(&standard_generators());
        assert_eq!(r.distance[0], Some(0));
        assert!(r.count[0].is_one());
        for n in 0..=8usize {
            assert_eq!(r.distance[2 * n], Some(2 * n));
            assert_eq!(r.count[2 * n], BigUint::from(1u32) << n);
        }
    }

    #[test]
    fn segments() {
        let g = SchreierGraph::build(200).unwrap();
        let segs = g.segment_decomposition().unwrap();
        // b = (a, c): the first block carries c-loops and a {b, d} double edge
        assert_eq!(segs[0].kind, SegmentKind::S3);
        assert_eq!(segs[0].start, 2);
        let mut next = 2;
        for s in &segs {
            assert_eq!(s.start, next);
            next += s.kind.len();
        }
        assert!(next > 190);
        assert!(segs.iter().any(|s| s.kind == SegmentKind::S1));
        assert!(segs.iter().any(|s| s.kind == SegmentKind::S2));
        for s in segs.iter().filter(|s| s.kind == SegmentKind::S1) {
            assert_eq!(s.kind.len(), 2);
        }
    }

    #[test]
    fn t_geodesics_are_unique_at_segment_ends() {
        let g = SchreierGraph::build(120).unwrap();
        let r = g.geodesic_count(&t_generators());
        let segs = g.segment_decomposition().unwrap();
        let mut lengths = Vec::new();
        for s in segs.iter().take(6) {
            let v = s.rightmost();
            assert!(r.count[v].is_one(), "vertex {v}");
            let path = r.unique_geodesic(v).unwrap();
            assert_eq!(Some(path.len()), r.distance[v]);
            lengths.push(path.len());
            let gv = r.endpoint_element(v).unwrap();
            assert_eq!(OrbitPoint::default().act_element(&gv), *g.vertex(v));
        }
        let mut sorted = lengths.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), lengths.len());
    }

    #[test]
    fn word_action_matches_portraits() {
        let g = SchreierGraph::build(64).unwrap();
        let mut words: Vec<Vec<Generator>> = vec![vec![]];
        for _ in 0..6 {
            let last: Vec<Vec<Generator>> = words
                .iter()
                .filter(|w| w.len() == words.last().unwrap().len())
                .cloned()
                .collect();
            for w in last {
                for x in Generator::ALL {
                    if w.last() != Some(&x) {
                        let mut v = w.clone();
                        v.push(x);
                        words.push(v);
                    }
                }
            }
        }
        for w in &words {
            let elem = GrigElement::from_word(w);
            for v in 0..g.len() {
                let p = g.vertex(v);
                assert_eq!(p.act_word(w), p.act_element(&elem));
            }
        }
        assert!(
            GrigElement::from_word(&words[3]).mul(&GrigElement::ONE)
                == GrigElement::from_word(&words[3])
        );
    }
}
