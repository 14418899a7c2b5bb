//! Exact arithmetic in `U(n)` in a PBW basis.
//!
//! A monomial is the ordered product `∏ f_β^{a_β}` with its factors sorted
//! by the weight order on `ℤⁿ` applied to `-β`: `ξ < ξ'` when the
//! coordinate sum of `ξ` is smaller, or the sums agree and the first
//! non-zero coordinate of `ξ - ξ'` is negative. Higher roots therefore stand
//! on the left, e.g. `f12·f1·f2` in type `A2`.
//!
//! Exponent vectors are indexed by the fixed root order of the root system;
//! only the written order of the factors follows the weight order.

use std::fmt;
use std::sync::Arc;

use dashu_base::Gcd;
use dashu_base::UnsignedAbs;
use dashu_int::{IBig, UBig};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::root_system::{ChevalleyConstants, RootSystem, Weight};

/// Exponent vector indexed by positive-root index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[u16; 12]>);

impl Monomial {
    pub fn one(npos: usize) -> Self {
        Monomial(SmallVec::from_elem(0, npos))
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    /// `f_k^e`.
    pub fn power(npos: usize, k: usize, e: u16) -> Self {
        let mut m = Monomial::one(npos);
        m.0[k] = e;
        m
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `-Σ a_β β`.
    pub fn weight(&self, rs: &RootSystem) -> Weight {
        let mut w = rs.zero();
        for (k, &e) in self.0.iter().enumerate() {
            if e > 0 {
                w -= &(e as i32 * &rs.positive_roots[k]);
            }
        }
        w
    }

    /// Factors from left to right as root indices, with repetition.
    pub fn factors(&self, order: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for &k in order {
            for _ in 0..self.0[k] {
                out.push(k);
            }
        }
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// A finite linear combination of PBW monomials with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PbwElement {
    terms: FxHashMap<Monomial, IBig>,
}

impl PbwElement {
    pub fn zero() -> Self {
        PbwElement::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(m, IBig::ONE)
    }

    pub fn term(m: Monomial, c: IBig) -> Self {
        let mut terms = FxHashMap::default();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        PbwElement { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, IBig)>>(it: I) -> Self {
        let mut e = PbwElement::zero();
        for (m, c) in it {
            e.add_term(m, &c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> IBig {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: &IBig) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &PbwElement, c: &IBig) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), &(v * c));
        }
    }

    pub fn scale(&self, c: &IBig) -> PbwElement {
        if c.is_zero() {
            return PbwElement::zero();
        }
        PbwElement {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &IBig)> {
        self.terms.iter()
    }

    /// Terms sorted by decreasing monomial, so the leading term comes first.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &IBig)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.cmp(a.0));
        v
    }

    /// The largest monomial and its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &IBig)> {
        self.terms.iter().max_by(|a, b| a.0.cmp(b.0))
    }

    /// Weight of a homogeneous element, `None` if zero or inhomogeneous.
    pub fn weight(&self, rs: &RootSystem) -> Option<Weight> {
        let mut it = self.terms.keys();
        let w = it.next()?.weight(rs);
        if it.all(|m| m.weight(rs) == w) {
            Some(w)
        } else {
            None
        }
    }

    /// Gcd of the coefficients.
    pub fn content(&self) -> UBig {
        let mut g = UBig::ZERO;
        for v in self.terms.values() {
            g = g.gcd(v.unsigned_abs());
            if g == UBig::ONE {
                break;
            }
        }
        g
    }

    /// The primitive integer multiple with positive leading coefficient.
    pub fn normalized(&self) -> PbwElement {
        if self.is_zero() {
            return self.clone();
        }
        let g = IBig::from(self.content());
        let lead_neg = self.leading_term().map(|(_, c)| c.signum() < IBig::ZERO).unwrap_or(false);
        PbwElement {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| {
                    let q = v / &g;
                    (m.clone(), if lead_neg { -q } else { q })
                })
                .collect(),
        }
    }

    /// Renders as `c·f12^3·f1 + ...` with factors in PBW order and
    /// terms by decreasing monomial.
    pub fn render(&self, rs: &RootSystem) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = *c < IBig::ZERO;
            let mag = c.unsigned_abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let body = render_monomial(rs, m);
            if m.is_one() {
                out.push_str(&mag.to_string());
            } else if mag == UBig::ONE {
                out.push_str(&body);
            } else {
                out.push_str(&format!("{mag}·{body}"));
            }
        }
        out
    }
}

/// Root indices in the order in which factors of a PBW monomial are written.
pub fn pbw_order(rs: &RootSystem) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rs.num_positive_roots()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&rs.positive_roots[a], &rs.positive_roots[b]);
        y.height().cmp(&x.height()).then_with(|| y.cmp(x))
    });
    order
}

pub fn render_monomial(rs: &RootSystem, m: &Monomial) -> String {
    if m.is_one() {
        return "1".into();
    }
    let mut parts = Vec::new();
    for k in pbw_order(rs) {
        let e = m.0[k];
        if e == 0 {
            continue;
        }
        let label = rs.root_label(k);
        if e == 1 {
            parts.push(format!("f{label}"));
        } else {
            parts.push(format!("f{label}^{e}"));
        }
    }
    parts.join("·")
}

type Product = Arc<Vec<(Monomial, IBig)>>;

/// `U(n)` with its PBW basis and a memo of products `f_γ · m`.
#[derive(Clone, Debug)]
pub struct PbwAlgebra {
    npos: usize,
    /// Factor order, left to right.
    order: Vec<usize>,
    /// `slot[k]` is the position of root `k` counted from the right end of
    /// `order`, so a word is sorted iff its slots never increase.
    slot: Vec<usize>,
    /// `[f_a, f_b] = c f_s` stored at `a * npos + b`.
    brackets: Vec<Option<(u16, i32)>>,
    memo: FxHashMap<(u16, Monomial), Product>,
}

impl PbwAlgebra {
    pub fn new(rs: &RootSystem, consts: &ChevalleyConstants) -> Self {
        let npos = consts.num_positive_roots();
        let order = pbw_order(rs);
        let mut slot = vec![0; npos];
        for (t, &k) in order.iter().enumerate() {
            slot[k] = npos - 1 - t;
        }
        let mut brackets = vec![None; npos * npos];
        for a in 0..npos {
            for b in 0..npos {
                brackets[a * npos + b] = consts.bracket_f(a, b).map(|(s, c)| (s as u16, c));
            }
        }
        PbwAlgebra {
            npos,
            order,
            slot,
            brackets,
            memo: FxHashMap::default(),
        }
    }

    pub fn num_generators(&self) -> usize {
        self.npos
    }

    /// Root indices in the written order of PBW factors.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Root index of the leftmost factor of `m`.
    fn leftmost(&self, m: &Monomial) -> Option<usize> {
        self.order.iter().copied().find(|&k| m.0[k] > 0)
    }

    pub fn one(&self) -> Monomial {
        Monomial::one(self.npos)
    }

    /// The generator `f_k` as an element.
    pub fn generator(&self, k: usize) -> PbwElement {
        PbwElement::monomial(Monomial::power(self.npos, k, 1))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// `f_γ · m` in PBW form.
    fn left_mul_gen(&mut self, gamma: usize, m: &Monomial) -> Product {
        let j = match self.leftmost(m) {
            Some(j) if self.slot[j] > self.slot[gamma] => j,
            _ => {
                let mut out = m.clone();
                out.0[gamma] += 1;
                return Arc::new(vec![(out, IBig::ONE)]);
            }
        };
        let key = (gamma as u16, m.clone());
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        // f_γ f_j m'' = f_j (f_γ m'') + [f_γ, f_j] m''
        let mut rest = m.clone();
        rest.0[j] -= 1;
        let mut acc: FxHashMap<Monomial, IBig> = FxHashMap::default();
        let inner = self.left_mul_gen(gamma, &rest);
        for (t, c) in inner.iter() {
            let p = self.left_mul_gen(j, t);
            for (u, d) in p.iter() {
                accumulate(&mut acc, u, &(c * d));
            }
        }
        if let Some((s, n)) = self.brackets[gamma * self.npos + j] {
            let p = self.left_mul_gen(s as usize, &rest);
            let n = IBig::from(n);
            for (u, d) in p.iter() {
                accumulate(&mut acc, u, &(&n * d));
            }
        }
        let out: Product = Arc::new(acc.into_iter().collect());
        self.memo.insert(key, out.clone());
        out
    }

    /// `f_γ · x`.
    pub fn left_mul_generator(&mut self, gamma: usize, x: &PbwElement) -> PbwElement {
        let mut acc = FxHashMap::default();
        for (m, c) in &x.terms {
            let p = self.left_mul_gen(gamma, m);
            for (u, d) in p.iter() {
                accumulate(&mut acc, u, &(c * d));
            }
        }
        PbwElement { terms: acc }
    }

    /// `m · x` for a monomial `m`, applying its factors from right to left.
    pub fn mul_monomial_left(&mut self, m: &Monomial, x: &PbwElement) -> PbwElement {
        let mut cur = x.clone();
        for t in (0..self.npos).rev() {
            let k = self.order[t];
            for _ in 0..m.0[k] {
                cur = self.left_mul_generator(k, &cur);
            }
        }
        cur
    }

    /// `m · n` for two monomials.
    pub fn mul_monomials(&mut self, m: &Monomial, n: &Monomial) -> PbwElement {
        self.mul_monomial_left(m, &PbwElement::monomial(n.clone()))
    }

    /// The product `a · b`.
    pub fn multiply(&mut self, a: &PbwElement, b: &PbwElement) -> PbwElement {
        let mut out = PbwElement::zero();
        for (m, c) in &a.terms {
            let p = self.mul_monomial_left(m, b);
            out.add_scaled(&p, c);
        }
        out
    }

    /// Product of a sequence of generators `f_{k1} f_{k2} ⋯`, as written left to right.
    pub fn word(&mut self, gens: &[usize]) -> PbwElement {
        let mut cur = PbwElement::monomial(self.one());
        for &k in gens.iter().rev() {
            cur = self.left_mul_generator(k, &cur);
        }
        cur
    }
}

fn accumulate(acc: &mut FxHashMap<Monomial, IBig>, m: &Monomial, c: &IBig) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(m) {
        Some(v) => {
            *v += c;
            if v.is_zero() {
                acc.remove(m);
            }
        }
        None => {
            acc.insert(m.clone(), c.clone());
        }
    }
}

/// All PBW monomials of weight `xi`, sorted lexicographically by exponent vector.
pub fn weight_basis(rs: &RootSystem, xi: &Weight) -> Vec<Monomial> {
    let target = -xi;
    if !target.is_nonnegative() {
        return Vec::new();
    }
    let n = rs.rank();
    let npos = rs.num_positive_roots();
    let mut out = Vec::new();
    let mut exps = vec![0u16; npos];
    fn rec(
        rs: &RootSystem,
        k: usize,
        n: usize,
        rem: &mut Vec<i32>,
        exps: &mut Vec<u16>,
        out: &mut Vec<Monomial>,
    ) {
        if k < n {
            // the simple roots take whatever is left
            for i in 0..n {
                exps[i] = rem[i] as u16;
            }
            out.push(Monomial::from_exponents(exps));
            for e in exps.iter_mut().take(n) {
                *e = 0;
            }
            return;
        }
        let beta = rs.positive_roots[k].coords();
        let mut e = 0u16;
        loop {
            rec(rs, k - 1, n, rem, exps, out);
            if beta.iter().zip(rem.iter()).any(|(&b, &r)| b > r) {
                break;
            }
            for (r, &b) in rem.iter_mut().zip(beta) {
                *r -= b;
            }
            e += 1;
            exps[k] = e;
        }
        for (r, &b) in rem.iter_mut().zip(beta) {
            *r += e as i32 * b;
        }
        exps[k] = 0;
    }
    let mut rem: Vec<i32> = target.coords().to_vec();
    if npos == n {
        // rank one: only simple roots
        out.push(Monomial::from_exponents(
            &rem.iter().map(|&r| r as u16).collect::<Vec<_>>(),
        ));
    } else {
        rec(rs, npos - 1, n, &mut rem, &mut exps, &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::CartanType;

    fn setup(t: &str) -> (RootSystem, PbwAlgebra) {
        let rs = RootSystem::new(t.parse::<CartanType>().unwrap());
        let c = ChevalleyConstants::new(&rs);
        let alg = PbwAlgebra::new(&rs, &c);
        (rs, alg)
    }

    fn int(v: i64) -> IBig {
        IBig::from(v)
    }

    #[test]
    fn sl3_straightening_step() {
        let (rs, mut alg) = setup("A2");
        assert_eq!(alg.order(), &[2, 0, 1]);
        let p = alg.word(&[1, 0]);
        assert_eq!(p.render(&rs), "f1·f2 - f12");
        let q = alg.word(&[0, 1]);
        assert_eq!(q.render(&rs), "f1·f2");
        let (b2, _) = setup("B2");
        assert_eq!(pbw_order(&b2), vec![3, 2, 0, 1]);
    }

    #[test]
    fn monomial_weight() {
        let (rs, _) = setup("A2");
        let m = Monomial::from_exponents(&[1, 1, 1]);
        assert_eq!(m.weight(&rs), Weight::from_slice(&[-2, -2]));
        assert!(Monomial::one(3).weight(&rs).is_zero());
        let (g2, _) = setup("G2");
        assert_eq!(
            Monomial::power(6, 0, 4).weight(&g2),
            Weight::from_slice(&[-4, 0])
        );
    }

    #[test]
    fn weight_basis_examples() {
        let (rs, _) = setup("A2");
        let b = weight_basis(&rs, &Weight::from_slice(&[-1, -1]));
        assert_eq!(
            b,
            vec![
                Monomial::from_exponents(&[0, 0, 1]),
                Monomial::from_exponents(&[1, 1, 0])
            ]
        );
        assert_eq!(weight_basis(&rs, &Weight::from_slice(&[0, 0])).len(), 1);
        assert_eq!(
            weight_basis(&rs, &Weight::from_slice(&[-5, 0])),
            vec![Monomial::from_exponents(&[5, 0, 0])]
        );
        assert!(weight_basis(&rs, &Weight::from_slice(&[1, -1])).is_empty());
        let (a1, _) = setup("A1");
        assert_eq!(weight_basis(&a1, &Weight::from_slice(&[-3])).len(), 1);
    }

    /// Kostant partition function via the truncated generating function ∏ 1/(1 - x^β).
    fn kostant_oracle(rs: &RootSystem, target: &[i32]) -> u64 {
        let n = rs.rank();
        let dims: Vec<usize> = target.iter().map(|&t| t as usize + 1).collect();
        let size: usize = dims.iter().product();
        let idx = |c: &[usize]| {
            let mut i = 0;
            for k in 0..n {
                i = i * dims[k] + c[k];
            }
            i
        };
        let mut poly = vec![0u64; size];
        poly[0] = 1;
        let mut coords = vec![0usize; n];
        for beta in &rs.positive_roots {
            // multiply by 1/(1 - x^β): p[c] += p[c - β], iterating c upward
            for flat in 0..size {
                let mut r = flat;
                for k in (0..n).rev() {
                    coords[k] = r % dims[k];
                    r /= dims[k];
                }
                if (0..n).all(|k| coords[k] as i32 >= beta[k]) {
                    let prev: Vec<usize> =
                        (0..n).map(|k| coords[k] - beta[k] as usize).collect();
                    poly[flat] += poly[idx(&prev)];
                }
            }
        }
        poly[size - 1]
    }

    #[test]
    fn weight_basis_dimension_is_kostant_count() {
        for (t, targets) in [
            ("A2", vec![vec![3, 2], vec![4, 4], vec![0, 3]]),
            ("B2", vec![vec![3, 3], vec![2, 4], vec![5, 2]]),
            ("G2", vec![vec![4, 1], vec![6, 3], vec![3, 5]]),
            ("A3", vec![vec![2, 3, 2], vec![1, 1, 1], vec![3, 4, 2]]),
            ("C3", vec![vec![2, 3, 2], vec![2, 2, 1]]),
        ] {
            let (rs, _) = setup(t);
            for tg in targets {
                let xi = -Weight::from_slice(&tg);
                let b = weight_basis(&rs, &xi);
                assert_eq!(b.len() as u64, kostant_oracle(&rs, &tg), "{t} {tg:?}");
                for m in &b {
                    assert_eq!(m.weight(&rs), xi);
                }
                let mut sorted = b.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted, b);
            }
        }
    }

    /// Straighten a word over generators by adjacent swaps `f_i f_j = f_j f_i + N f_{i+j}`
    /// whenever `f_j` must stand left of `f_i`, without memoization.
    fn free_algebra_oracle(
        consts: &ChevalleyConstants,
        order: &[usize],
        word: Vec<usize>,
    ) -> FxHashMap<Monomial, i64> {
        let npos = order.len();
        let pos = |k: usize| order.iter().position(|&x| x == k).unwrap();
        let mut stack: Vec<(Vec<usize>, i64)> = vec![(word, 1)];
        let mut out: FxHashMap<Monomial, i64> = FxHashMap::default();
        while let Some((w, c)) = stack.pop() {
            match (0..w.len().saturating_sub(1)).find(|&p| pos(w[p]) > pos(w[p + 1])) {
                None => {
                    let mut e = vec![0u16; npos];
                    for &k in &w {
                        e[k] += 1;
                    }
                    *out.entry(Monomial::from_exponents(&e)).or_insert(0) += c;
                }
                Some(p) => {
                    let mut swapped = w.clone();
                    swapped.swap(p, p + 1);
                    stack.push((swapped, c));
                    if let Some((s, n)) = consts.bracket_f(w[p], w[p + 1]) {
                        let mut shorter = w[..p].to_vec();
                        shorter.push(s);
                        shorter.extend_from_slice(&w[p + 2..]);
                        stack.push((shorter, c * n as i64));
                    }
                }
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn to_i64(e: &PbwElement) -> FxHashMap<Monomial, i64> {
        e.iter()
            .map(|(m, c)| (m.clone(), i64::try_from(c).unwrap()))
            .collect()
    }

    #[test]
    fn multiplication_matches_free_algebra_oracle() {
        for t in ["A1", "A2", "B2", "G2"] {
            let rs = RootSystem::new(t.parse().unwrap());
            let consts = ChevalleyConstants::new(&rs);
            let mut alg = PbwAlgebra::new(&rs, &consts);
            let npos = rs.num_positive_roots();
            let order = pbw_order(&rs);
            // all words of length ≤ 4, and a sample of length 5
            let mut words: Vec<Vec<usize>> = vec![vec![]];
            let mut frontier = words.clone();
            for _ in 0..4 {
                let mut next = Vec::new();
                for w in &frontier {
                    for k in 0..npos {
                        let mut v = w.clone();
                        v.push(k);
                        next.push(v);
                    }
                }
                words.extend(next.iter().cloned());
                frontier = next;
            }
            for w in frontier.iter().step_by(7) {
                for k in 0..npos {
                    let mut v = w.clone();
                    v.push(k);
                    words.push(v);
                }
            }
            for w in words {
                let ours = alg.word(&w);
                assert_eq!(to_i64(&ours), free_algebra_oracle(&consts, &order, w.clone()), "{t} {w:?}");
            }
        }
    }

    #[test]
    fn g2_serre_map_identity() {
        let (rs, mut alg) = setup("G2");
        let f1 = 0;
        let f2 = 1;
        let target = alg.word(&[f1, f1, f1, f1, f2]);
        // 4 f1^3 f2 - 6 f1^2 f2 f1 + 4 f1 f2 f1^2 - f2 f1^3, then times f1
        let mut lhs = PbwElement::zero();
        for (c, w) in [
            (4, vec![f1, f1, f1, f2]),
            (-6, vec![f1, f1, f2, f1]),
            (4, vec![f1, f2, f1, f1]),
            (-1, vec![f2, f1, f1, f1]),
        ] {
            let p = alg.word(&w);
            lhs.add_scaled(&p, &int(c));
        }
        let lhs = alg.multiply(&lhs, &alg.generator(f1));
        assert_eq!(lhs, target);
        assert_eq!(target.weight(&rs), Some(Weight::from_slice(&[-4, -1])));
    }

    #[test]
    fn identity_is_neutral() {
        let (_, mut alg) = setup("B2");
        let one = PbwElement::monomial(alg.one());
        let x = alg.word(&[0, 1, 3, 2, 0]);
        assert_eq!(alg.multiply(&one, &x), x);
        assert_eq!(alg.multiply(&x, &one), x);
    }

    #[test]
    fn normalization() {
        let (rs, _) = setup("A2");
        let e = PbwElement::from_terms([
            (Monomial::from_exponents(&[1, 1, 0]), int(-4)),
            (Monomial::from_exponents(&[0, 0, 1]), int(6)),
        ]);
        let n = e.normalized();
        assert_eq!(n.render(&rs), "2·f1·f2 - 3·f12");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn elem(alg: &mut PbwAlgebra, words: &[(i64, Vec<usize>)]) -> PbwElement {
            let mut out = PbwElement::zero();
            for (c, w) in words {
                let p = alg.word(w);
                out.add_scaled(&p, &int(*c));
            }
            out
        }

        fn word_strategy(npos: usize) -> impl Strategy<Value = Vec<(i64, Vec<usize>)>> {
            proptest::collection::vec(
                (-3i64..4, proptest::collection::vec(0..npos, 0..4)),
                1..3,
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn associative_and_weight_additive(
                ti in 0usize..3,
                a in word_strategy(4), b in word_strategy(4), c in word_strategy(4),
            ) {
                let t = ["A2", "B2", "G2"][ti];
                let (rs, mut alg) = setup(t);
                let npos = rs.num_positive_roots();
                let fix = |v: Vec<(i64, Vec<usize>)>| -> Vec<(i64, Vec<usize>)> {
                    v.into_iter().map(|(c, w)| (c, w.into_iter().map(|k| k % npos).collect())).collect()
                };
                let (a, b, c) = (fix(a), fix(b), fix(c));
                let a = elem(&mut alg, &a);
                let b = elem(&mut alg, &b);
                let c = elem(&mut alg, &c);
                let ab = alg.multiply(&a, &b);
                let bc = alg.multiply(&b, &c);
                prop_assert_eq!(alg.multiply(&ab, &c), alg.multiply(&a, &bc));
                // weight additivity on single monomial pairs
                for (m, _) in a.iter() {
                    for (n, _) in b.iter() {
                        let p = alg.mul_monomials(m, n);
                        let want = &m.weight(&rs) + &n.weight(&rs);
                        for (q, _) in p.iter() {
                            prop_assert_eq!(q.weight(&rs), want.clone());
                        }
                    }
                }
            }
        }
    }
}
