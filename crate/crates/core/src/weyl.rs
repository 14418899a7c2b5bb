//! Weyl group enumeration, the Bruhat graph and its squares, and the order
//! in which the Verma module maps can be solved.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::root_system::{RootSystem, Weight};

/// Default cap on the number of Weyl group elements that will be enumerated.
pub const DEFAULT_ENUM_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("Weyl group of {cartan_type} has {order} elements, above the enumeration budget of {budget}")]
    BudgetExceeded {
        cartan_type: String,
        order: u128,
        budget: usize,
    },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// An element of the Weyl group, stored as its matrix on simple-root
/// coordinates together with its lexicographically smallest reduced word.
#[derive(Clone, Debug)]
pub struct WeylElement {
    rank: usize,
    /// Row-major `rank × rank` matrix acting on column vectors of coordinates.
    matrix: Vec<i32>,
    word: Vec<usize>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Eq for WeylElement {}

impl std::hash::Hash for WeylElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.matrix.hash(state)
    }
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        let mut matrix = vec![0; rank * rank];
        for i in 0..rank {
            matrix[i * rank + i] = 1;
        }
        WeylElement {
            rank,
            matrix,
            word: Vec::new(),
        }
    }

    fn simple_matrix(rs: &RootSystem, i: usize) -> Vec<i32> {
        let n = rs.rank();
        let mut m = vec![0; n * n];
        for r in 0..n {
            m[r * n + r] = 1;
        }
        for c in 0..n {
            m[i * n + c] -= rs.cartan[i][c];
        }
        m
    }

    fn mat_mul(n: usize, a: &[i32], b: &[i32]) -> Vec<i32> {
        let mut out = vec![0; n * n];
        for r in 0..n {
            for k in 0..n {
                let x = a[r * n + k];
                if x == 0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] += x * b[k * n + c];
                }
            }
        }
        out
    }

    /// The product `s_{i1} s_{i2} ⋯ s_{ik}` (zero-based indices), stored
    /// with its canonical reduced word.
    pub fn from_word(rs: &RootSystem, word: &[usize]) -> Self {
        let n = rs.rank();
        let mut m = WeylElement::identity(n).matrix;
        for &i in word {
            m = Self::mat_mul(n, &m, &Self::simple_matrix(rs, i));
        }
        let mut w = WeylElement {
            rank: n,
            matrix: m,
            word: Vec::new(),
        };
        w.word = w.canonical_word(rs);
        w
    }

    /// Lexicographically smallest reduced word, found by repeatedly
    /// stripping the smallest left descent.
    fn canonical_word(&self, rs: &RootSystem) -> Vec<usize> {
        let n = self.rank;
        let mut cur = self.matrix.clone();
        let mut word = Vec::new();
        let mut len = self.length_of(rs, &cur);
        while len > 0 {
            let mut stepped = false;
            for i in 0..n {
                let next = Self::mat_mul(n, &Self::simple_matrix(rs, i), &cur);
                let l = self.length_of(rs, &next);
                if l < len {
                    word.push(i);
                    cur = next;
                    len = l;
                    stepped = true;
                    break;
                }
            }
            assert!(stepped, "element of positive length without a left descent");
        }
        word
    }

    fn apply_matrix(n: usize, m: &[i32], mu: &Weight) -> Weight {
        let coords: Vec<i32> = (0..n)
            .map(|r| (0..n).map(|c| m[r * n + c] * mu[c]).sum())
            .collect();
        Weight::from_slice(&coords)
    }

    fn length_of(&self, rs: &RootSystem, m: &[i32]) -> usize {
        rs.positive_roots
            .iter()
            .filter(|b| Self::apply_matrix(self.rank, m, b).is_nonpositive())
            .count()
    }

    /// `w(μ)`.
    pub fn apply(&self, mu: &Weight) -> Weight {
        Self::apply_matrix(self.rank, &self.matrix, mu)
    }

    /// The reduced word as zero-based simple reflection indices.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn matrix(&self) -> &[i32] {
        &self.matrix
    }

    /// Number of positive roots sent to negative roots.
    pub fn inversion_count(&self, rs: &RootSystem) -> usize {
        self.length_of(rs, &self.matrix)
    }

    /// The product `self · other`.
    pub fn compose_with(&self, rs: &RootSystem, other: &WeylElement) -> WeylElement {
        let mut w = self.compose(other);
        w.word = w.canonical_word(rs);
        w
    }

    /// The product `self · other`; the word is the (possibly unreduced) concatenation.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        WeylElement {
            rank: self.rank,
            matrix: Self::mat_mul(self.rank, &self.matrix, &other.matrix),
            word,
        }
    }

    /// One-based digit string such as `121`; `e` for the identity.
    pub fn word_string(&self) -> String {
        word_to_string(&self.word)
    }
}

pub fn word_to_string(word: &[usize]) -> String {
    if word.is_empty() {
        return "e".into();
    }
    if word.iter().all(|&i| i < 9) {
        word.iter().map(|&i| char::from(b'1' + i as u8)).collect()
    } else {
        let parts: Vec<String> = word.iter().map(|i| (i + 1).to_string()).collect();
        parts.join(".")
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word_string())
    }
}

/// All elements of the Weyl group, ordered by length and then by reduced word.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub elements: Vec<WeylElement>,
    /// `columns[k]` lists the indices of the elements of length `k`.
    pub columns: Vec<Vec<usize>>,
    by_key: FxHashMap<Weight, usize>,
    two_rho: Weight,
}

impl WeylGroup {
    /// Breadth-first enumeration by left multiplication with simple reflections.
    pub fn enumerate(rs: &RootSystem, budget: usize) -> Result<Self, WeylError> {
        let order = rs.cartan_type.weyl_order();
        if order > budget as u128 {
            return Err(WeylError::BudgetExceeded {
                cartan_type: rs.cartan_type.to_string(),
                order,
                budget,
            });
        }
        let n = rs.rank();
        let simple: Vec<Vec<i32>> = (0..n).map(|i| WeylElement::simple_matrix(rs, i)).collect();
        // w(2ρ) determines w since 2ρ is regular.
        let key = |m: &[i32]| WeylElement::apply_matrix(n, m, &rs.two_rho);

        let id = WeylElement::identity(n);
        let mut by_key: FxHashMap<Weight, usize> = FxHashMap::default();
        by_key.insert(key(&id.matrix), 0);
        let mut elements = vec![id];
        let mut columns = vec![vec![0usize]];
        loop {
            let prev = columns.last().unwrap();
            // candidate key -> (best word, matrix)
            let mut next: FxHashMap<Weight, (Vec<usize>, Vec<i32>)> = FxHashMap::default();
            for &wi in prev {
                let w = &elements[wi];
                for (i, s) in simple.iter().enumerate() {
                    let m = WeylElement::mat_mul(n, s, &w.matrix);
                    let k = key(&m);
                    if by_key.contains_key(&k) {
                        continue;
                    }
                    let mut word = Vec::with_capacity(w.word.len() + 1);
                    word.push(i);
                    word.extend_from_slice(&w.word);
                    match next.get_mut(&k) {
                        Some(entry) => {
                            if word < entry.0 {
                                entry.0 = word;
                            }
                        }
                        None => {
                            next.insert(k, (word, m));
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            let mut level: Vec<(Weight, Vec<usize>, Vec<i32>)> =
                next.into_iter().map(|(k, (w, m))| (k, w, m)).collect();
            level.sort_by(|a, b| a.1.cmp(&b.1));
            let mut col = Vec::with_capacity(level.len());
            for (k, word, matrix) in level {
                let idx = elements.len();
                by_key.insert(k, idx);
                elements.push(WeylElement {
                    rank: n,
                    matrix,
                    word,
                });
                col.push(idx);
            }
            columns.push(col);
        }
        if elements.len() as u128 != order {
            return Err(WeylError::Internal(format!(
                "enumerated {} elements, expected {order}",
                elements.len()
            )));
        }
        Ok(WeylGroup {
            elements,
            columns,
            by_key,
            two_rho: rs.two_rho.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn longest_length(&self) -> usize {
        self.columns.len() - 1
    }

    /// Index of the element `w` with `w(2ρ) = image`.
    pub fn index_by_rho_image(&self, image: &Weight) -> Option<usize> {
        self.by_key.get(image).copied()
    }

    pub fn index_of(&self, w: &WeylElement) -> Option<usize> {
        self.index_by_rho_image(&w.apply(&self.two_rho))
    }

    /// Index of the element with the given (not necessarily reduced) word.
    pub fn index_of_word(&self, rs: &RootSystem, word: &[usize]) -> Option<usize> {
        self.index_of(&WeylElement::from_word(rs, word))
    }
}

/// A covering relation `source → target` with `target = s_β · source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    /// Index of the positive root `β`.
    pub root: usize,
}

/// Two length-two paths `bottom → left → top` and `bottom → right → top`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Square {
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
    pub top: usize,
    /// Edge indices `[bottom→left, left→top, bottom→right, right→top]`.
    pub edges: [usize; 4],
}

/// One step of the map-solving schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolveStep {
    pub square: usize,
    pub target_edge: usize,
}

/// The Bruhat graph of a Weyl group.
#[derive(Clone, Debug)]
pub struct BruhatGraph {
    pub edges: Vec<Edge>,
    pub squares: Vec<Square>,
    edge_index: FxHashMap<(usize, usize), usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    /// Squares containing each edge.
    edge_squares: Vec<Vec<usize>>,
    simple_root_count: usize,
}

impl BruhatGraph {
    pub fn new(rs: &RootSystem, wg: &WeylGroup) -> Result<Self, WeylError> {
        let mut edges = Vec::new();
        for col in &wg.columns {
            for &x in col {
                let lx = wg.elements[x].length();
                let img = wg.elements[x].apply(&rs.two_rho);
                for k in 0..rs.num_positive_roots() {
                    let w = wg
                        .index_by_rho_image(&rs.reflect(&img, k))
                        .ok_or_else(|| WeylError::Internal("reflection left the group".into()))?;
                    if wg.elements[w].length() == lx + 1 {
                        edges.push(Edge {
                            source: x,
                            target: w,
                            root: k,
                        });
                    }
                }
            }
        }
        edges.sort_by_key(|e| (e.source, e.target));
        let nv = wg.len();
        let mut edge_index = FxHashMap::default();
        let mut out_edges = vec![Vec::new(); nv];
        let mut in_edges = vec![Vec::new(); nv];
        for (i, e) in edges.iter().enumerate() {
            edge_index.insert((e.source, e.target), i);
            out_edges[e.source].push(i);
            in_edges[e.target].push(i);
        }
        let mut g = BruhatGraph {
            edges,
            squares: Vec::new(),
            edge_index,
            out_edges,
            in_edges,
            edge_squares: Vec::new(),
            simple_root_count: rs.rank(),
        };
        g.squares = g.enumerate_squares(nv)?;
        let mut edge_squares = vec![Vec::new(); g.edges.len()];
        for (si, s) in g.squares.iter().enumerate() {
            for &e in &s.edges {
                edge_squares[e].push(si);
            }
        }
        g.edge_squares = edge_squares;
        Ok(g)
    }

    fn enumerate_squares(&self, nv: usize) -> Result<Vec<Square>, WeylError> {
        let mut squares = Vec::new();
        for w in 0..nv {
            let mut mids: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
            for &e1 in &self.out_edges[w] {
                let x = self.edges[e1].target;
                for &e2 in &self.out_edges[x] {
                    mids.entry(self.edges[e2].target).or_default().push(x);
                }
            }
            let mut tops: Vec<(usize, Vec<usize>)> = mids.into_iter().collect();
            tops.sort();
            for (top, mut m) in tops {
                if m.len() != 2 {
                    return Err(WeylError::Internal(format!(
                        "interval [{w}, {top}] has {} intermediate elements instead of 2",
                        m.len()
                    )));
                }
                m.sort();
                let (l, r) = (m[0], m[1]);
                squares.push(Square {
                    bottom: w,
                    left: l,
                    right: r,
                    top,
                    edges: [
                        self.edge_index[&(w, l)],
                        self.edge_index[&(l, top)],
                        self.edge_index[&(w, r)],
                        self.edge_index[&(r, top)],
                    ],
                });
            }
        }
        Ok(squares)
    }

    pub fn edge(&self, source: usize, target: usize) -> Option<usize> {
        self.edge_index.get(&(source, target)).copied()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn squares_of_edge(&self, e: usize) -> &[usize] {
        &self.edge_squares[e]
    }

    /// Whether the edge is labelled by a simple reflection. The map on such
    /// an edge is a power of a single generator.
    pub fn is_simple_edge(&self, e: usize) -> bool {
        self.edges[e].root < self.simple_root_count
    }

    /// Order in which the non-simple edges can be solved, each step using a
    /// square whose three other edges are already known.
    ///
    /// Edges are processed by increasing length of their source. Among the
    /// usable squares, ones whose other edges are simple are preferred,
    /// since the resulting linear systems are the smallest.
    pub fn solving_order(&self) -> Result<Vec<SolveStep>, WeylError> {
        let ne = self.edges.len();
        let mut known: Vec<bool> = (0..ne).map(|e| self.is_simple_edge(e)).collect();
        let mut pending: Vec<usize> = (0..ne).filter(|&e| !known[e]).collect();
        // edges are sorted by source index, which is ordered by length
        let mut order = Vec::with_capacity(pending.len());
        while !pending.is_empty() {
            let mut progressed = false;
            let mut still = Vec::new();
            for &e in &pending {
                let mut best: Option<(usize, usize)> = None;
                for &si in &self.edge_squares[e] {
                    let sq = &self.squares[si];
                    if sq.edges.iter().any(|&o| o != e && !known[o]) {
                        continue;
                    }
                    let score = self.square_score(sq, e);
                    if best.is_none_or(|(b, _)| score > b) {
                        best = Some((score, si));
                    }
                }
                match best {
                    Some((_, si)) => {
                        known[e] = true;
                        progressed = true;
                        order.push(SolveStep {
                            square: si,
                            target_edge: e,
                        });
                    }
                    None => still.push(e),
                }
            }
            if !progressed {
                return Err(WeylError::Internal(format!(
                    "{} edges cannot be reached from the simple edges",
                    still.len()
                )));
            }
            pending = still;
        }
        Ok(order)
    }

    /// Preference for solving `target` from `sq`: the edge multiplied with
    /// the target being simple counts most, then the other simple edges.
    fn square_score(&self, sq: &Square, target: usize) -> usize {
        let pos = sq.edges.iter().position(|&e| e == target).unwrap();
        let partner = sq.edges[pos ^ 1];
        let mut score = 0;
        if self.is_simple_edge(partner) {
            score += 4;
        }
        for (i, &e) in sq.edges.iter().enumerate() {
            if i != pos && i != (pos ^ 1) && self.is_simple_edge(e) {
                score += 1;
            }
        }
        score
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::CartanType;
    use std::collections::BTreeSet;

    fn setup(t: &str) -> (RootSystem, WeylGroup, BruhatGraph) {
        let rs = RootSystem::new(t.parse::<CartanType>().unwrap());
        let wg = WeylGroup::enumerate(&rs, DEFAULT_ENUM_BUDGET).unwrap();
        let g = BruhatGraph::new(&rs, &wg).unwrap();
        (rs, wg, g)
    }

    #[test]
    fn group_orders_and_columns() {
        for (t, order, top) in [
            ("A1", 1 * 2, 1),
            ("A2", 6, 3),
            ("A3", 24, 6),
            ("B2", 8, 4),
            ("B3", 48, 9),
            ("C3", 48, 9),
            ("G2", 12, 6),
            ("D4", 192, 12),
        ] {
            let (_, wg, _) = setup(t);
            assert_eq!(wg.len(), order, "{t}");
            assert_eq!(wg.longest_length(), top, "{t}");
            let sizes: Vec<usize> = wg.columns.iter().map(|c| c.len()).collect();
            let rev: Vec<usize> = sizes.iter().rev().cloned().collect();
            assert_eq!(sizes, rev, "{t} columns not symmetric");
        }
        let (_, a2, _) = setup("A2");
        let sizes: Vec<usize> = a2.columns.iter().map(|c| c.len()).collect();
        assert_eq!(sizes, [1, 2, 2, 1]);
    }

    #[test]
    fn length_is_inversion_count_and_words_are_minimal() {
        for t in ["A3", "B3", "G2"] {
            let (rs, wg, _) = setup(t);
            for w in &wg.elements {
                assert_eq!(w.length(), w.inversion_count(&rs));
                let again = WeylElement::from_word(&rs, w.word());
                assert_eq!(&again, w);
                assert_eq!(again.word(), w.word());
            }
            for col in &wg.columns {
                for pair in col.windows(2) {
                    assert!(wg.elements[pair[0]].word() < wg.elements[pair[1]].word());
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let rs = RootSystem::new("E8".parse().unwrap());
        assert!(matches!(
            WeylGroup::enumerate(&rs, DEFAULT_ENUM_BUDGET),
            Err(WeylError::BudgetExceeded { .. })
        ));
    }

    /// All `(x, w)` with `w x^{-1}` a reflection and `ℓ(w) = ℓ(x) + 1`, by brute force over reflections.
    fn edge_oracle(rs: &RootSystem, wg: &WeylGroup) -> BTreeSet<(usize, usize)> {
        let n = rs.rank();
        let mut refl = Vec::new();
        for b in &rs.positive_roots {
            let cols: Vec<Weight> = (0..n)
                .map(|j| {
                    let a = rs.simple_root(j);
                    let c = 2 * rs.inner(&a, b) / rs.inner(b, b);
                    &a - &(c * b)
                })
                .collect();
            refl.push(cols);
        }
        let mut out = BTreeSet::new();
        for (xi, x) in wg.elements.iter().enumerate() {
            for r in &refl {
                let img = x.apply(&rs.two_rho);
                let mut t_img = Weight::zero(n);
                for j in 0..n {
                    t_img += &(img[j] * &r[j]);
                }
                let wi = wg.index_by_rho_image(&t_img).unwrap();
                if wg.elements[wi].length() == x.length() + 1 {
                    out.insert((xi, wi));
                }
            }
        }
        out
    }

    #[test]
    fn edges_match_brute_force() {
        for (t, count) in [("A1", 1), ("A2", 8), ("B2", 12), ("G2", 20)] {
            let (rs, wg, g) = setup(t);
            let ours: BTreeSet<(usize, usize)> =
                g.edges.iter().map(|e| (e.source, e.target)).collect();
            assert_eq!(ours, edge_oracle(&rs, &wg), "{t}");
            assert_eq!(g.edges.len(), count, "{t}");
        }
    }

    /// Square count by enumerating all length-two paths.
    fn square_oracle(g: &BruhatGraph) -> usize {
        let mut paths: FxHashMap<(usize, usize), usize> = FxHashMap::default();
        for e1 in &g.edges {
            for e2 in &g.edges {
                if e1.target == e2.source {
                    *paths.entry((e1.source, e2.target)).or_insert(0) += 1;
                }
            }
        }
        assert!(paths.values().all(|&c| c == 2));
        paths.len()
    }

    #[test]
    fn squares_match_brute_force() {
        for t in ["A1", "A2", "B2", "G2", "A3", "B3"] {
            let (_, _, g) = setup(t);
            assert_eq!(g.squares.len(), square_oracle(&g), "{t}");
        }
        assert_eq!(setup("A2").2.squares.len(), 4);
        assert_eq!(setup("A1").2.squares.len(), 0);
        assert_eq!(setup("G2").2.squares.len(), 16);
    }

    #[test]
    fn solving_order_covers_every_edge() {
        for t in ["A1", "A2", "B2", "G2", "A3", "B3", "C3", "A4"] {
            let (_, _, g) = setup(t);
            let order = g.solving_order().unwrap();
            let mut known: Vec<bool> = (0..g.edges.len()).map(|e| g.is_simple_edge(e)).collect();
            for step in &order {
                let sq = &g.squares[step.square];
                assert!(sq.edges.contains(&step.target_edge));
                assert!(!known[step.target_edge]);
                for &e in &sq.edges {
                    assert!(e == step.target_edge || known[e]);
                }
                known[step.target_edge] = true;
            }
            assert!(known.iter().all(|&k| k), "{t}");
        }
        assert!(setup("A1").2.solving_order().unwrap().is_empty());
    }

    #[test]
    fn a2_has_six_simple_edges() {
        let (_, _, g) = setup("A2");
        let simple = (0..g.edges.len()).filter(|&e| g.is_simple_edge(e)).count();
        assert_eq!(simple, 6);
        assert_eq!(g.solving_order().unwrap().len(), 2);
    }

    #[test]
    fn every_non_simple_edge_lies_in_a_square_with_a_simple_edge() {
        for t in ["A2", "A3", "B2", "B3", "C3", "G2"] {
            let (_, _, g) = setup(t);
            for e in 0..g.edges.len() {
                if g.is_simple_edge(e) {
                    continue;
                }
                let ok = g.squares_of_edge(e).iter().any(|&si| {
                    g.squares[si].edges.iter().any(|&o| o != e && g.is_simple_edge(o))
                });
                assert!(ok, "{t}: edge {e}");
            }
        }
    }

    #[test]
    fn g2_first_step_solves_edge_from_s1_to_s1s2() {
        let (rs, wg, g) = setup("G2");
        let order = g.solving_order().unwrap();
        let first = g.edges[order[0].target_edge];
        assert_eq!(first.source, wg.index_of_word(&rs, &[0]).unwrap());
        assert_eq!(first.target, wg.index_of_word(&rs, &[0, 1]).unwrap());
    }
}
