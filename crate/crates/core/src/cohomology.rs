//! Cohomology of homogeneous bundles `G ×_B E` through the BGG complex
//!
//! `BGG^k(E, λ) = ⊕_{ℓ(w)=k} E[w·λ]`, with differential given on each
//! Bruhat edge `x → w` by the action of the signed map `σ F(x, w)`. The
//! multiplicity of `L(λ)` in `H^k` is `dim BGG^k - rank d_k - rank d_{k-1}`.
//! For `G/P` the module is a `p`-module restricted to `b`.

use std::sync::Arc;

use dashu_int::{IBig, UBig};
use log::info;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{BggComplex, BggError, BggSetup};
use crate::linalg::{lcm, SparseIntMatrix};
use crate::modules::{ActionCache, ActionPlan, WeightModule};
use crate::pbw::pbw_order;
use crate::root_system::{Regularity, RootSystem, Weight};

/// Cohomology multiplicities of one `L(λ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaCohomology {
    pub lambda: Weight,
    /// `dim L(λ)`.
    pub dim: u128,
    /// `dim BGG^k(E, λ)`.
    pub complex_dims: Vec<usize>,
    /// `rank d_k` for `k = 0..ℓ(w₀)`.
    pub ranks: Vec<usize>,
    /// Multiplicity of `L(λ)` in `H^k`.
    pub mults: Vec<usize>,
}

impl LambdaCohomology {
    pub fn euler_characteristic_holds(&self) -> bool {
        let alt = |v: &[usize]| -> i128 {
            v.iter()
                .enumerate()
                .map(|(k, &d)| if k % 2 == 0 { d as i128 } else { -(d as i128) })
                .sum()
        };
        alt(&self.complex_dims) == alt(&self.mults)
    }

    pub fn is_zero(&self) -> bool {
        self.mults.iter().all(|&m| m == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyResult {
    pub module_spec: String,
    pub cartan_type: String,
    /// One-based Levi simple roots of the parabolic.
    pub parabolic: Vec<usize>,
    /// Every candidate weight, including those with no cohomology.
    pub per_lambda: Vec<LambdaCohomology>,
    /// `dim H^k(X, E)`.
    pub dims_by_degree: Vec<u128>,
}

impl CohomologyResult {
    /// `⊕ L(λ)^{m}` in degree `k`, as `(λ, m)` pairs.
    pub fn decomposition(&self, k: usize) -> Vec<(&Weight, usize)> {
        self.per_lambda
            .iter()
            .filter(|l| l.mults[k] > 0)
            .map(|l| (&l.lambda, l.mults[k]))
            .collect()
    }

    /// Index one past the last nonzero degree.
    pub fn top_degree(&self) -> usize {
        self.dims_by_degree
            .iter()
            .rposition(|&d| d > 0)
            .map_or(0, |k| k + 1)
    }
}

/// `∏_{β>0} ⟨λ+ρ, β^∨⟩ / ⟨ρ, β^∨⟩`.
pub fn weyl_dimension(rs: &RootSystem, lambda: &Weight) -> u128 {
    let shifted = &(2 * lambda) + &rs.two_rho;
    let mut num = UBig::ONE;
    let mut den = UBig::ONE;
    for k in 0..rs.num_positive_roots() {
        let a = rs.coroot_pairing(&shifted, k);
        let b = rs.coroot_pairing(&rs.two_rho, k);
        assert!(a > 0, "λ must be dominant");
        num *= UBig::from(a as u32);
        den *= UBig::from(b as u32);
    }
    let q = num / den;
    u128::try_from(&q).expect("dimension fits in 128 bits")
}

/// Computes `H^•(G/B, G ×_B E)` for a fixed module and Cartan type.
pub struct CohomologyEngine {
    pub setup: Arc<BggSetup>,
    pub module: Arc<WeightModule>,
    pub parabolic: Vec<usize>,
    jobs: usize,
}

impl CohomologyEngine {
    pub fn new(setup: Arc<BggSetup>, module: Arc<WeightModule>, parabolic: Vec<usize>) -> Self {
        CohomologyEngine {
            setup,
            module,
            parabolic,
            jobs: 0,
        }
    }

    /// Worker threads for `full_cohomology`; 0 means the rayon default.
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    fn rs(&self) -> &RootSystem {
        &self.setup.rs
    }

    /// Dominant `λ` with some `w·λ` a weight of `E`, in ascending order.
    pub fn candidate_weights(&self) -> Vec<Weight> {
        let mut out: Vec<Weight> = self
            .module
            .weights()
            .filter_map(|(mu, _)| match self.rs().regularity(mu) {
                Regularity::Regular { dominant, .. } => Some(dominant),
                Regularity::Singular => None,
            })
            .collect();
        out.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| a.cmp(b)));
        out.dedup();
        out
    }

    /// Weyl group indices of length `k`.
    fn level(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.setup
            .weyl
            .elements
            .iter()
            .enumerate()
            .filter(move |(_, w)| w.length() == k)
            .map(|(i, _)| i)
    }

    /// `dim E[w·λ]` summed over `ℓ(w) = k`.
    fn level_dim(&self, complex: &BggComplex, k: usize) -> usize {
        self.level(k)
            .map(|w| self.module.component(&complex.dot_weights[w]).len())
            .sum()
    }

    /// Matrix of `d_k: BGG^k → BGG^{k+1}`, one row per basis vector of the
    /// source. The whole matrix is scaled by the lcm of the map denominators.
    pub fn assemble_differential(
        &self,
        complex: &mut BggComplex,
        cache: &mut ActionCache,
        k: usize,
    ) -> Result<SparseIntMatrix, BggError> {
        let m = &*self.module;
        let offsets = |lev: Vec<usize>, complex: &BggComplex| {
            let mut off = Vec::with_capacity(lev.len());
            let mut total = 0;
            for &w in &lev {
                off.push((w, total));
                total += m.component(&complex.dot_weights[w]).len();
            }
            (off, total)
        };
        let (src, nrows) = offsets(self.level(k).collect(), complex);
        let (tgt, ncols) = offsets(self.level(k + 1).collect(), complex);
        let mut mat = SparseIntMatrix::new(nrows, ncols);
        if nrows == 0 || ncols == 0 {
            return Ok(mat);
        }
        let tgt_offset: rustc_hash::FxHashMap<usize, usize> = tgt.iter().copied().collect();
        let graph = &self.setup.graph;
        let mut edges = Vec::new();
        for &(x, row0) in &src {
            if m.component(&complex.dot_weights[x]).is_empty() {
                continue;
            }
            for &e in graph.out_edges(x) {
                let w = graph.edges[e].target;
                if m.component(&complex.dot_weights[w]).is_empty() {
                    continue;
                }
                complex.ensure(e)?;
                edges.push((e, x, w, row0, tgt_offset[&w]));
            }
        }
        let scale = edges.iter().fold(IBig::ONE, |acc, &(e, ..)| {
            lcm(&acc, &complex.cached_map(e).unwrap().denom)
        });
        let order = pbw_order(self.rs());
        let mut rows: Vec<Vec<(usize, IBig)>> = vec![Vec::new(); nrows];
        for (e, x, w, row0, col0) in edges {
            let map = complex.cached_map(e).unwrap();
            let factor = &scale / &map.denom * IBig::from(self.setup.signs[e]);
            let f = map.numer.scale(&factor);
            let plan = ActionPlan::new(&f, &order);
            let src_comp = m.component(&complex.dot_weights[x]);
            let first = m.component(&complex.dot_weights[w])[0];
            for (i, &b) in src_comp.iter().enumerate() {
                for (id, c) in m.act_plan(cache, &plan, &[(b, IBig::ONE)]) {
                    rows[row0 + i].push((col0 + (id - first) as usize, c));
                }
            }
        }
        for (i, mut r) in rows.into_iter().enumerate() {
            if r.is_empty() {
                continue;
            }
            r.sort_unstable_by_key(|e| e.0);
            mat.set_row(i, r);
        }
        Ok(mat)
    }

    /// Multiplicities of `L(λ)` in every degree.
    pub fn cohomology(&self, lambda: &Weight) -> Result<LambdaCohomology, BggError> {
        let mut cache = ActionCache::new();
        self.cohomology_with(lambda, &mut cache)
    }

    fn cohomology_with(&self, lambda: &Weight, cache: &mut ActionCache) -> Result<LambdaCohomology, BggError> {
        let mut complex = BggComplex::new(self.setup.clone(), lambda.clone())?;
        let top = self.setup.weyl.longest_length();
        let dims: Vec<usize> = (0..=top).map(|k| self.level_dim(&complex, k)).collect();
        let mut ranks = vec![0usize; top];
        for k in 0..top {
            if dims[k] == 0 || dims[k + 1] == 0 {
                continue;
            }
            let d = self.assemble_differential(&mut complex, cache, k)?;
            ranks[k] = d.rank();
            info!(
                "{} λ={} k={}: {}x{} rank {}",
                self.setup.rs.cartan_type, lambda, k, dims[k], dims[k + 1], ranks[k]
            );
        }
        let mults = (0..=top)
            .map(|k| {
                let r_out = if k < top { ranks[k] } else { 0 };
                let r_in = if k > 0 { ranks[k - 1] } else { 0 };
                dims[k]
                    .checked_sub(r_out + r_in)
                    .expect("ranks cannot exceed dimensions in a complex")
            })
            .collect();
        let out = LambdaCohomology {
            lambda: lambda.clone(),
            dim: weyl_dimension(self.rs(), lambda),
            complex_dims: dims,
            ranks,
            mults,
        };
        debug_assert!(out.euler_characteristic_holds());
        Ok(out)
    }

    /// Runs `cohomology` for every candidate weight, in parallel.
    pub fn full_cohomology(&self) -> Result<CohomologyResult, BggError> {
        let candidates = self.candidate_weights();
        info!(
            "{} {}: {} candidate weights",
            self.setup.rs.cartan_type,
            self.module.spec,
            candidates.len()
        );
        let run = || -> Result<Vec<LambdaCohomology>, BggError> {
            candidates
                .par_iter()
                .map_init(ActionCache::new, |cache, l| self.cohomology_with(l, cache))
                .collect()
        };
        let per_lambda = if self.jobs == 0 {
            run()?
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.jobs)
                .build()
                .expect("thread pool")
                .install(run)?
        };
        let top = self.setup.weyl.longest_length();
        let mut dims = vec![0u128; top + 1];
        for l in &per_lambda {
            for (k, &m) in l.mults.iter().enumerate() {
                dims[k] += m as u128 * l.dim;
            }
        }
        Ok(CohomologyResult {
            module_spec: self.module.spec.to_string(),
            cartan_type: self.setup.rs.cartan_type.to_string(),
            parabolic: self.parabolic.clone(),
            per_lambda,
            dims_by_degree: dims,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::ModuleSpec;
    use crate::root_system::CartanType;
    use crate::weyl::DEFAULT_ENUM_BUDGET;

    fn engine(t: &str, spec: &str, levi: &[usize]) -> CohomologyEngine {
        let setup = Arc::new(BggSetup::new(t.parse::<CartanType>().unwrap(), DEFAULT_ENUM_BUDGET, 7).unwrap());
        let spec: ModuleSpec = spec.parse().unwrap();
        let m = WeightModule::build(&setup.rs, &setup.consts, &spec, levi).unwrap();
        CohomologyEngine::new(setup, Arc::new(m), levi.to_vec())
    }

    fn w(c: &[i32]) -> Weight {
        Weight::from_slice(c)
    }

    #[test]
    fn weyl_dimension_examples() {
        let rs = RootSystem::new("G2".parse().unwrap());
        assert_eq!(weyl_dimension(&rs, &w(&[0, 0])), 1);
        assert_eq!(weyl_dimension(&rs, &w(&[3, 2])), 14);
        let a1 = RootSystem::new("A1".parse().unwrap());
        // λ = α/2·k is not in the root lattice for odd k; λ = α has ⟨λ,α^∨⟩ = 2
        assert_eq!(weyl_dimension(&a1, &w(&[1])), 3);
        assert_eq!(weyl_dimension(&a1, &w(&[4])), 9);
        let a2 = RootSystem::new("A2".parse().unwrap());
        assert_eq!(weyl_dimension(&a2, &w(&[1, 1])), 8);
        assert_eq!(weyl_dimension(&a2, &w(&[2, 1])), 10);
    }

    /// Freudenthal-free oracle: `dim L(λ)` equals the number of lattice points
    /// of `λ` under the Weyl character, checked here through `Σ dim = |W|·...`
    /// for the adjoint representation, whose dimension is `dim g`.
    #[test]
    fn adjoint_dimension_is_dim_g() {
        for (t, highest) in [
            ("A3", vec![1, 1, 1]),
            ("B3", vec![1, 2, 2]),
            ("C3", vec![2, 2, 1]),
            ("G2", vec![3, 2]),
            ("F4", vec![2, 3, 4, 2]),
        ] {
            let rs = RootSystem::new(t.parse().unwrap());
            let n = rs.rank() + 2 * rs.num_positive_roots();
            assert_eq!(weyl_dimension(&rs, &w(&highest)), n as u128, "{t}");
        }
    }

    #[test]
    fn trivial_module() {
        let e = engine("B2", "C", &[]);
        assert_eq!(e.candidate_weights(), vec![w(&[0, 0])]);
        let r = e.full_cohomology().unwrap();
        assert_eq!(r.dims_by_degree, vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn g2_n_lambda_zero() {
        let e = engine("G2", "n", &[]);
        let l = e.cohomology(&w(&[0, 0])).unwrap();
        assert_eq!(l.mults, vec![0, 2, 0, 0, 0, 0, 0]);
        let mut c = BggComplex::new(e.setup.clone(), w(&[0, 0])).unwrap();
        let d = e.assemble_differential(&mut c, &mut ActionCache::new(), 1).unwrap();
        assert_eq!((d.nrows(), d.ncols()), (2, 0));
    }

    #[test]
    fn sl4_wedge2_candidates_and_h0() {
        let e = engine("A3", "wedge(u,2)", &[]);
        let c = e.candidate_weights();
        for l in [[1, 1, 1], [1, 2, 1], [2, 2, 1], [1, 2, 2]] {
            assert!(c.contains(&w(&l)), "{l:?}");
        }
        let l = e.cohomology(&w(&[1, 1, 1])).unwrap();
        assert_eq!(l.mults[0], 1);
        assert_eq!(l.mults[1], 0);
    }

    #[test]
    fn sl4_wedge2_differential_example() {
        let e = engine("A3", "wedge(u,2)", &[]);
        let lam = w(&[1, 2, 1]);
        let mut c = BggComplex::new(e.setup.clone(), lam.clone()).unwrap();
        let d = e.assemble_differential(&mut c, &mut ActionCache::new(), 0).unwrap();
        assert_eq!(d.nrows(), 2);
        assert_eq!(d.rank(), 2);
        // s1·λ = λ - α1 and s3·λ = λ - α3 are spanned by e2∧e23 and e2∧e12
        let m = &e.module;
        let s1 = m.component(&(&lam - &w(&[1, 0, 0])));
        let s3 = m.component(&(&lam - &w(&[0, 0, 1])));
        assert_eq!(m.render_elem(s1[0]), "e2∧e23");
        assert_eq!(m.render_elem(s3[0]), "e2∧e12");
        assert_eq!(d.ncols(), 2);
        let src = m.component(&lam);
        let names: Vec<String> = src.iter().map(|&i| m.render_elem(i)).collect();
        assert!(names.contains(&"e2∧e123".to_string()));
        assert!(names.contains(&"e12∧e23".to_string()));
    }

    #[test]
    fn euler_identity_and_nonnegative() {
        for (t, spec) in [("A2", "wedge(u,1)"), ("B2", "sym(n,2)"), ("A2", "tensor(b,2)")] {
            let e = engine(t, spec, &[]);
            let r = e.full_cohomology().unwrap();
            for l in &r.per_lambda {
                assert!(l.euler_characteristic_holds(), "{t} {spec} {}", l.lambda);
            }
        }
    }

    #[test]
    fn compressed_rank_matches() {
        let e = engine("B2", "tensor(u,2)", &[]);
        for lam in e.candidate_weights() {
            let mut c = BggComplex::new(e.setup.clone(), lam).unwrap();
            let mut cache = ActionCache::new();
            for k in 0..4 {
                let d = e.assemble_differential(&mut c, &mut cache, k).unwrap();
                assert_eq!(d.rank(), d.compressed().rank());
            }
        }
    }

    /// Borel-Weil-Bott for line bundles: `E = ∧^top n` is one-dimensional of
    /// weight `-2ρ`, so cohomology sits in the degree of the Weyl element
    /// taking it to a dominant weight.
    #[test]
    fn top_wedge_of_n_follows_regularity() {
        for t in ["A2", "B2", "G2"] {
            let rs = RootSystem::new(t.parse().unwrap());
            let top = rs.num_positive_roots();
            let e = engine(t, &format!("wedge(n,{top})"), &[]);
            let r = e.full_cohomology().unwrap();
            let mu = -&rs.two_rho;
            match rs.regularity(&mu) {
                Regularity::Regular { w, dominant } => {
                    let mut want = vec![0u128; top + 1];
                    want[w.length()] = weyl_dimension(&rs, &dominant);
                    assert_eq!(r.dims_by_degree, want, "{t}");
                }
                Regularity::Singular => unreachable!(),
            }
        }
    }

    /// Ω^q of G/B: cohomology is trivial-isotypic, of total rank |W|.
    #[test]
    fn hodge_numbers_of_small_flag_varieties() {
        for (t, want) in [("A2", vec![1, 2, 2, 1]), ("B2", vec![1, 2, 2, 2, 1])] {
            let top = want.len() - 1;
            for (q, &d) in want.iter().enumerate() {
                let e = engine(t, &format!("wedge(n,{q})"), &[]);
                let r = e.full_cohomology().unwrap();
                let mut expect = vec![0u128; top + 1];
                expect[q] = d;
                assert_eq!(r.dims_by_degree, expect, "{t} q={q}");
            }
        }
    }

    #[test]
    fn p1_tangent_bundle() {
        // H⁰(P¹, T) = sl2, H¹ = 0
        let e = engine("A1", "u", &[]);
        let r = e.full_cohomology().unwrap();
        assert_eq!(r.dims_by_degree, vec![3, 0]);
        let r = engine("A1", "wedge(u,0)", &[]).full_cohomology().unwrap();
        assert_eq!(r.dims_by_degree, vec![1, 0]);
    }

    #[test]
    fn projective_plane_as_partial_flag() {
        // X_{α2} for A2 is P²: H⁰(T) = sl3, H⁰(∧²T) = H⁰(O(3)) of dim 10
        let e = engine("A2", "wedge(u,1)", &[2]);
        assert_eq!(e.module.dim(), 2);
        assert_eq!(e.full_cohomology().unwrap().dims_by_degree[0], 8);
        let e = engine("A2", "wedge(u,2)", &[2]);
        assert_eq!(e.full_cohomology().unwrap().dims_by_degree, vec![10, 0, 0, 0]);
    }

    #[test]
    fn jobs_do_not_change_results() {
        let a = engine("B2", "tensor(u,2)", &[]).with_jobs(1).full_cohomology().unwrap();
        let b = engine("B2", "tensor(u,2)", &[]).with_jobs(4).full_cohomology().unwrap();
        assert_eq!(a, b);
    }
}
