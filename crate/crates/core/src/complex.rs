//! The maps of the BGG resolution.
//!
//! For dominant `λ` and every Bruhat edge `x → w` the Verma module map
//! `M(w·λ) → M(x·λ)` sends the highest weight vector to `F(x,w)·v_{x·λ}` for
//! an element `F(x,w) ∈ U(n)` of weight `w·λ - x·λ`. On simple edges
//! `w = s_i x` the element is a power of `f_i`. Every other map is the unique
//! solution of a commuting square
//! `F(left,top)·F(bottom,left) = F(right,top)·F(bottom,right)` whose other
//! three maps are known.
//!
//! Maps are kept as exact rational multiples `numer / denom` of integer
//! elements, so that squares commute on the nose. Signs `σ` on the edges
//! then make every square anticommute, which gives `d² = 0`.

use std::sync::Arc;

use dashu_int::IBig;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{gcd, SparseIntMatrix, Solution};
use crate::pbw::{weight_basis, Monomial, PbwAlgebra, PbwElement};
use crate::root_system::{CartanType, ChevalleyConstants, RootSystem, Weight};
use crate::weyl::{BruhatGraph, SolveStep, WeylError, WeylGroup};

/// Default number of single-edge flips allowed when searching for signs.
pub const DEFAULT_SIGN_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum BggError {
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("λ = {0} is not dominant")]
    NotDominant(Weight),
    #[error("weight {lambda} has {got} coordinates, type {cartan_type} needs {want}")]
    WrongRank {
        lambda: Weight,
        cartan_type: CartanType,
        got: usize,
        want: usize,
    },
    #[error("map on edge {edge} could not be solved: {reason}")]
    Solve { edge: String, reason: String },
    #[error("sign search exhausted its budget of {budget} flips with {bad} bad squares left")]
    SignBudget { budget: u64, bad: usize },
}

/// `F(x,w) = numer / denom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VermaMap {
    pub numer: PbwElement,
    pub denom: IBig,
}

impl VermaMap {
    pub fn integral(numer: PbwElement) -> Self {
        VermaMap {
            numer,
            denom: IBig::ONE,
        }
    }

    /// Primitive integer multiple with positive leading coefficient.
    pub fn normalized(&self) -> PbwElement {
        self.numer.normalized()
    }

    fn reduce(&mut self) {
        let c = IBig::from(self.numer.content());
        let g = gcd(&c, &self.denom);
        if g > IBig::ONE {
            self.numer = PbwElement::from_terms(self.numer.iter().map(|(m, v)| (m.clone(), v / &g)));
            self.denom = &self.denom / &g;
        }
    }
}

/// Everything about a root system that does not depend on `λ`: the Weyl
/// group, its Bruhat graph and squares, the map-solving schedule, and a
/// sign assignment.
#[derive(Debug)]
pub struct BggSetup {
    pub rs: RootSystem,
    pub consts: ChevalleyConstants,
    pub weyl: WeylGroup,
    pub graph: BruhatGraph,
    pub schedule: Vec<SolveStep>,
    step_of_edge: Vec<Option<usize>>,
    pub signs: Vec<i8>,
}

impl BggSetup {
    pub fn new(cartan_type: CartanType, budget: usize, seed: u64) -> Result<Self, BggError> {
        let rs = RootSystem::new(cartan_type);
        let consts = ChevalleyConstants::new(&rs);
        let weyl = WeylGroup::enumerate(&rs, budget)?;
        let graph = BruhatGraph::new(&rs, &weyl)?;
        let schedule = graph.solving_order()?;
        let mut step_of_edge = vec![None; graph.edges.len()];
        for (i, s) in schedule.iter().enumerate() {
            step_of_edge[s.target_edge] = Some(i);
        }
        let signs = assign_signs(&graph, seed, DEFAULT_SIGN_BUDGET)?;
        Ok(BggSetup {
            rs,
            consts,
            weyl,
            graph,
            schedule,
            step_of_edge,
            signs,
        })
    }

    pub fn edge_label(&self, e: usize) -> String {
        let edge = &self.graph.edges[e];
        format!(
            "{} → {}",
            self.weyl.elements[edge.source],
            self.weyl.elements[edge.target]
        )
    }
}

/// Randomised greedy search for signs with every square product `-1`.
///
/// Each pass visits the edges in random order and flips an edge whenever
/// that lowers the number of bad squares. A pass without any flip flips
/// `⌈5%⌉` of the edges at random.
pub fn assign_signs(graph: &BruhatGraph, seed: u64, budget: u64) -> Result<Vec<i8>, BggError> {
    let ne = graph.edges.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma = vec![1i8; ne];
    let mut prod: Vec<i8> = vec![1; graph.squares.len()];
    let mut bad = graph.squares.len();
    let mut flips: u64 = 0;
    let flip = |e: usize, sigma: &mut Vec<i8>, prod: &mut Vec<i8>, bad: &mut usize| {
        sigma[e] = -sigma[e];
        for &si in graph.squares_of_edge(e) {
            prod[si] = -prod[si];
            if prod[si] == 1 {
                *bad += 1;
            } else {
                *bad -= 1;
            }
        }
    };
    let mut order: Vec<usize> = (0..ne).collect();
    while bad > 0 {
        order.shuffle(&mut rng);
        let mut any = false;
        for &e in &order {
            let score: i32 = graph.squares_of_edge(e).iter().map(|&si| prod[si] as i32).sum();
            if score > 0 {
                flip(e, &mut sigma, &mut prod, &mut bad);
                flips += 1;
                any = true;
            }
        }
        if !any && bad > 0 {
            let k = ne.div_ceil(20).max(1);
            for _ in 0..k {
                let e = rng.gen_range(0..ne);
                flip(e, &mut sigma, &mut prod, &mut bad);
                flips += 1;
            }
        }
        if flips > budget && bad > 0 {
            return Err(BggError::SignBudget { budget, bad });
        }
    }
    log::debug!("sign search finished after {flips} flips");
    Ok(sigma)
}

/// Result of checking `d² = 0` square by square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DSquaredReport {
    pub squares_checked: usize,
    pub first_failure: Option<usize>,
}

impl DSquaredReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// The BGG resolution of `L(λ)` for one dominant `λ`. Maps are computed on
/// demand together with the maps they depend on.
pub struct BggComplex {
    pub setup: Arc<BggSetup>,
    pub lambda: Weight,
    /// `w·λ` for every Weyl group element, by index.
    pub dot_weights: Vec<Weight>,
    maps: Vec<Option<VermaMap>>,
    alg: PbwAlgebra,
}

impl BggComplex {
    pub fn new(setup: Arc<BggSetup>, lambda: Weight) -> Result<Self, BggError> {
        let rs = &setup.rs;
        if lambda.rank() != rs.rank() {
            return Err(BggError::WrongRank {
                got: lambda.rank(),
                want: rs.rank(),
                cartan_type: rs.cartan_type,
                lambda,
            });
        }
        if !rs.is_dominant(&lambda) {
            return Err(BggError::NotDominant(lambda));
        }
        let dot_weights = setup
            .weyl
            .elements
            .iter()
            .map(|w| rs.dot_action(w, &lambda))
            .collect();
        let alg = PbwAlgebra::new(rs, &setup.consts);
        let maps = vec![None; setup.graph.edges.len()];
        Ok(BggComplex {
            setup,
            lambda,
            dot_weights,
            maps,
            alg,
        })
    }

    pub fn rs(&self) -> &RootSystem {
        &self.setup.rs
    }

    pub fn algebra(&mut self) -> &mut PbwAlgebra {
        &mut self.alg
    }

    /// Weight of `F` on edge `e`: `w·λ - x·λ`.
    pub fn edge_weight(&self, e: usize) -> Weight {
        let edge = &self.setup.graph.edges[e];
        &self.dot_weights[edge.target] - &self.dot_weights[edge.source]
    }

    /// `f_i^m` on a simple edge.
    pub fn base_case_map(&self, e: usize) -> Option<VermaMap> {
        let edge = &self.setup.graph.edges[e];
        let n = self.rs().rank();
        if edge.root >= n {
            return None;
        }
        let m = -self.edge_weight(e)[edge.root];
        debug_assert!(m > 0);
        let mono = Monomial::power(self.rs().num_positive_roots(), edge.root, m as u16);
        Some(VermaMap::integral(PbwElement::monomial(mono)))
    }

    pub fn is_computed(&self, e: usize) -> bool {
        self.maps[e].is_some()
    }

    pub fn computed_count(&self) -> usize {
        self.maps.iter().filter(|m| m.is_some()).count()
    }

    /// The map on edge `e`, computing it and its dependencies if needed.
    pub fn map(&mut self, e: usize) -> Result<&VermaMap, BggError> {
        self.ensure(e)?;
        Ok(self.maps[e].as_ref().unwrap())
    }

    /// A map that has already been computed.
    pub fn cached_map(&self, e: usize) -> Option<&VermaMap> {
        self.maps[e].as_ref()
    }

    pub fn ensure(&mut self, e: usize) -> Result<(), BggError> {
        // iterative dependency walk, so deep schedules do not recurse
        let mut stack = vec![e];
        while let Some(&top) = stack.last() {
            if self.maps[top].is_some() {
                stack.pop();
                continue;
            }
            if let Some(m) = self.base_case_map(top) {
                self.maps[top] = Some(m);
                stack.pop();
                continue;
            }
            let step = self.setup.step_of_edge[top].expect("every non-simple edge is scheduled");
            let sq = self.setup.graph.squares[self.setup.schedule[step].square];
            let missing: Vec<usize> = sq
                .edges
                .iter()
                .copied()
                .filter(|&o| o != top && self.maps[o].is_none())
                .collect();
            if missing.is_empty() {
                let m = self.solve_square(step)?;
                self.maps[top] = Some(m);
                stack.pop();
            } else {
                stack.extend(missing);
            }
        }
        Ok(())
    }

    pub fn compute_all_maps(&mut self) -> Result<(), BggError> {
        for e in 0..self.maps.len() {
            self.ensure(e)?;
        }
        Ok(())
    }

    /// Solves the scheduled square for its unknown edge.
    fn solve_square(&mut self, step: usize) -> Result<VermaMap, BggError> {
        let setup = self.setup.clone();
        let SolveStep { square, target_edge } = setup.schedule[step];
        let sq = setup.graph.squares[square];
        let pos = sq.edges.iter().position(|&x| x == target_edge).unwrap();
        let partner = self.maps[sq.edges[pos ^ 1]].clone().unwrap();
        let (o_low, o_up) = if pos < 2 {
            (sq.edges[2], sq.edges[3])
        } else {
            (sq.edges[0], sq.edges[1])
        };
        let low = self.maps[o_low].clone().unwrap();
        let up = self.maps[o_up].clone().unwrap();
        // the other path: up · low
        let pn = self.alg.multiply(&up.numer, &low.numer);
        let pd = &up.denom * &low.denom;
        let unknown_is_lower = pos % 2 == 0;
        let xi = self.edge_weight(target_edge);
        let basis = weight_basis(self.rs(), &xi);
        let label = || setup.edge_label(target_edge);
        if basis.is_empty() {
            return Err(BggError::Solve {
                edge: label(),
                reason: format!("U(n) has no elements of weight {xi}"),
            });
        }
        // partner·X or X·partner, column by column
        let mut target_index: FxHashMap<Monomial, usize> = FxHashMap::default();
        let mut rows: Vec<Vec<(usize, IBig)>> = Vec::with_capacity(basis.len());
        for m in &basis {
            let prod = if unknown_is_lower {
                let mut acc = PbwElement::zero();
                let mono = PbwElement::monomial(m.clone());
                for (t, c) in partner.numer.iter() {
                    let p = self.alg.mul_monomial_left(t, &mono);
                    acc.add_scaled(&p, c);
                }
                acc
            } else {
                self.alg.mul_monomial_left(m, &partner.numer)
            };
            let mut row = Vec::with_capacity(prod.len());
            for (t, c) in prod.iter() {
                let n = target_index.len();
                let idx = *target_index.entry(t.clone()).or_insert(n);
                row.push((idx, c.clone()));
            }
            rows.push(row);
        }
        // partner_n/partner_d · X = pn/pd  ⇒  partner_n · X' = partner_d · pn with X = X'/pd
        let mut b = vec![IBig::ZERO; target_index.len()];
        for (t, c) in pn.iter() {
            match target_index.get(t) {
                Some(&i) => b[i] = c * &partner.denom,
                None => {
                    return Err(BggError::Solve {
                        edge: label(),
                        reason: "the other path has a monomial outside the image".into(),
                    })
                }
            }
        }
        let mut a = SparseIntMatrix::new(basis.len(), target_index.len());
        for (i, row) in rows.into_iter().enumerate() {
            a.set_row(i, row);
        }
        let sol = match a.solve(&b) {
            Solution::Unique(v) => v,
            Solution::NonUnique(_) => {
                return Err(BggError::Solve {
                    edge: label(),
                    reason: "solution is not unique".into(),
                })
            }
            Solution::Inconsistent => {
                return Err(BggError::Solve {
                    edge: label(),
                    reason: "square equation is inconsistent".into(),
                })
            }
        };
        let numer = PbwElement::from_terms(basis.into_iter().zip(sol.numer));
        if numer.is_zero() {
            return Err(BggError::Solve {
                edge: label(),
                reason: "solution is zero".into(),
            });
        }
        let mut map = VermaMap {
            numer,
            denom: sol.denom * pd,
        };
        map.reduce();
        Ok(map)
    }

    /// Checks unsigned commutation of every square whose maps are all known
    /// (all squares after `compute_all_maps`).
    pub fn verify_commutation(&mut self) -> DSquaredReport {
        self.check_squares(|_| (IBig::ONE, -IBig::ONE))
    }

    /// Checks `σσ F F + σσ F F = 0` on every square whose maps are known.
    pub fn verify_d_squared(&mut self) -> DSquaredReport {
        let signs = self.setup.signs.clone();
        self.verify_d_squared_with(&signs)
    }

    /// As `verify_d_squared`, with a caller supplied sign vector.
    pub fn verify_d_squared_with(&mut self, signs: &[i8]) -> DSquaredReport {
        self.check_squares(|[bl, lt, br, rt]| {
            (
                IBig::from(signs[bl] as i64 * signs[lt] as i64),
                IBig::from(signs[br] as i64 * signs[rt] as i64),
            )
        })
    }

    fn check_squares<F>(&mut self, path_signs: F) -> DSquaredReport
    where
        F: Fn([usize; 4]) -> (IBig, IBig),
    {
        let setup = self.setup.clone();
        let mut checked = 0;
        for (si, sq) in setup.graph.squares.iter().enumerate() {
            if sq.edges.iter().any(|&e| self.maps[e].is_none()) {
                continue;
            }
            checked += 1;
            let [bl, lt, br, rt] = sq.edges;
            let (s1, s2) = path_signs(sq.edges);
            if !self.square_sum_vanishes(bl, lt, br, rt, &s1, &s2) {
                return DSquaredReport {
                    squares_checked: checked,
                    first_failure: Some(si),
                };
            }
        }
        DSquaredReport {
            squares_checked: checked,
            first_failure: None,
        }
    }

    /// `s1·F(lt)F(bl) + s2·F(rt)F(br) == 0`, cross-multiplied by denominators.
    fn square_sum_vanishes(&mut self, bl: usize, lt: usize, br: usize, rt: usize, s1: &IBig, s2: &IBig) -> bool {
        let (mbl, mlt, mbr, mrt) = (
            self.maps[bl].clone().unwrap(),
            self.maps[lt].clone().unwrap(),
            self.maps[br].clone().unwrap(),
            self.maps[rt].clone().unwrap(),
        );
        let p1 = self.alg.multiply(&mlt.numer, &mbl.numer);
        let p2 = self.alg.multiply(&mrt.numer, &mbr.numer);
        let mut total = p1.scale(&(s1 * &mrt.denom * &mbr.denom));
        total.add_scaled(&p2, &(s2 * &mlt.denom * &mbl.denom));
        total.is_zero()
    }

    /// Replaces the map on an edge; used to build negative controls.
    pub fn set_map(&mut self, e: usize, map: VermaMap) {
        self.maps[e] = Some(map);
    }

    /// Every edge with its signed, normalised map.
    pub fn map_records(&mut self) -> Result<Vec<MapRecord>, BggError> {
        self.compute_all_maps()?;
        let setup = self.setup.clone();
        let rs = &setup.rs;
        let mut out = Vec::with_capacity(self.maps.len());
        for (e, edge) in setup.graph.edges.iter().enumerate() {
            let m = self.maps[e].as_ref().unwrap();
            let sign = setup.signs[e];
            let norm = m.normalized();
            let signed = if sign < 0 { norm.scale(&-IBig::ONE) } else { norm };
            out.push(MapRecord {
                source: setup.weyl.elements[edge.source].word_string(),
                target: setup.weyl.elements[edge.target].word_string(),
                reflection_root: rs.positive_roots[edge.root].clone(),
                simple: setup.graph.is_simple_edge(e),
                source_weight: self.dot_weights[edge.source].clone(),
                target_weight: self.dot_weights[edge.target].clone(),
                sign,
                polynomial: signed.render(rs),
                terms: signed.len(),
            });
        }
        Ok(out)
    }
}

/// One edge of the complex in printable form.
#[derive(Clone, Debug, Serialize)]
pub struct MapRecord {
    pub source: String,
    pub target: String,
    pub reflection_root: Weight,
    pub simple: bool,
    pub source_weight: Weight,
    pub target_weight: Weight,
    pub sign: i8,
    pub polynomial: String,
    pub terms: usize,
}
