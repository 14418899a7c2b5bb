//! Root systems of the simple Lie algebras, their Chevalley structure
//! constants, and the dot action of the Weyl group on weights.
//!
//! Weights are always expressed in the basis of simple roots. Because `ρ`
//! can have half-integral coordinates in that basis, the root system stores
//! `2ρ` and every formula involving `ρ` is arranged to stay integral.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::weyl::WeylElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    #[error("cannot parse Cartan type `{0}`: expected a letter A-G followed by a rank, e.g. `A3` or `G2`")]
    Parse(String),
    #[error("type {letter}{rank} does not exist: {reason}")]
    InvalidRank {
        letter: char,
        rank: usize,
        reason: &'static str,
    },
}

/// A vector of integers in the simple-root basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(SmallVec<[i32; 8]>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(SmallVec::from_elem(0, rank))
    }

    pub fn from_slice(coords: &[i32]) -> Self {
        Weight(SmallVec::from_slice(coords))
    }

    /// The `i`-th simple root.
    pub fn simple(rank: usize, i: usize) -> Self {
        let mut w = Weight::zero(rank);
        w.0[i] = 1;
        w
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn height(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.0.iter().all(|&c| c <= 0)
    }

    /// Exact division of every coordinate, used to halve `2μ`.
    pub fn div_exact(&self, d: i32) -> Option<Weight> {
        if self.0.iter().all(|c| c % d == 0) {
            Some(Weight(self.0.iter().map(|c| c / d).collect()))
        } else {
            None
        }
    }

    /// Coordinates joined by commas, e.g. `2,1`.
    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        parts.join(",")
    }
}

impl Index<usize> for Weight {
    type Output = i32;
    fn index(&self, i: usize) -> &i32 {
        &self.0[i]
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Renders as a combination of simple roots, e.g. `2α1+α2` or `-α1-2α2`.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "α{}", i + 1)?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Weight {
    type Err = String;

    /// Accepts comma separated coordinates such as `2,1` or `[2, 1]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        if t.trim().is_empty() {
            return Err("empty weight".into());
        }
        let coords = t
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i32>()
                    .map_err(|e| format!("bad coordinate `{}`: {e}", p.trim()))
            })
            .collect::<Result<SmallVec<[i32; 8]>, _>>()?;
        Ok(Weight(coords))
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        &self + &rhs
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        &self - &rhs
    }
}

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, rhs: &Weight) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl SubAssign<&Weight> for Weight {
    fn sub_assign(&mut self, rhs: &Weight) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        -&self
    }
}

impl Mul<&Weight> for i32 {
    type Output = Weight;
    fn mul(self, rhs: &Weight) -> Weight {
        Weight(rhs.0.iter().map(|a| self * a).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSystemError> {
        let letter = family.letter();
        let bad = |reason| Err(RootSystemError::InvalidRank { letter, rank, reason });
        match family {
            Family::A if rank < 1 => bad("rank must be at least 1"),
            Family::B if rank < 2 => bad("rank must be at least 2"),
            Family::C if rank < 2 => bad("rank must be at least 2"),
            Family::D if rank < 4 => bad("rank must be at least 4"),
            Family::E if !(6..=8).contains(&rank) => bad("rank must be 6, 7 or 8"),
            Family::F if rank != 4 => bad("rank must be 4"),
            Family::G if rank != 2 => bad("rank must be 2"),
            _ => Ok(CartanType { family, rank }),
        }
    }

    /// Number of positive roots, from the closed form for each family.
    pub fn num_positive_roots(&self) -> usize {
        let n = self.rank;
        match self.family {
            Family::A => n * (n + 1) / 2,
            Family::B | Family::C => n * n,
            Family::D => n * (n - 1),
            Family::E => match n {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            Family::F => 24,
            Family::G => 6,
        }
    }

    /// Order of the Weyl group.
    pub fn weyl_order(&self) -> u128 {
        let n = self.rank as u128;
        let fact = |k: u128| (1..=k).product::<u128>();
        match self.family {
            Family::A => fact(n + 1),
            Family::B | Family::C => (1u128 << n) * fact(n),
            Family::D => (1u128 << (n - 1)) * fact(n),
            Family::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Family::F => 1152,
            Family::G => 12,
        }
    }

    /// Cartan matrix `a_ij = ⟨α_j, α_i^∨⟩` in Bourbaki numbering.
    pub fn cartan_matrix(&self) -> Vec<Vec<i32>> {
        let n = self.rank;
        let mut a = vec![vec![0i32; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.family {
            Family::A | Family::B | Family::C | Family::F => {
                for i in 0..n.saturating_sub(1) {
                    link(i, i + 1);
                }
            }
            Family::D => {
                for i in 0..n - 2 {
                    link(i, i + 1);
                }
                link(n - 3, n - 1);
            }
            Family::E => {
                link(0, 2);
                link(1, 3);
                for i in 2..n - 1 {
                    link(i, i + 1);
                }
            }
            Family::G => link(0, 1),
        }
        match self.family {
            // α_n short
            Family::B => a[n - 1][n - 2] = -2,
            // α_n long
            Family::C => a[n - 2][n - 1] = -2,
            // α1, α2 long
            Family::F => a[2][1] = -2,
            // α1 short
            Family::G => a[0][1] = -3,
            _ => {}
        }
        a
    }

    /// `d_i` with `(α_i, α_j) = d_i a_ij`, normalised so that short roots have `d = 1`.
    pub fn symmetrizer(&self) -> Vec<i32> {
        let n = self.rank;
        match self.family {
            Family::A | Family::D | Family::E => vec![1; n],
            Family::B => (0..n).map(|i| if i + 1 == n { 1 } else { 2 }).collect(),
            Family::C => (0..n).map(|i| if i + 1 == n { 2 } else { 1 }).collect(),
            Family::F => vec![2, 2, 1, 1],
            Family::G => vec![1, 3],
        }
    }
}

impl Family {
    pub fn letter(&self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for CartanType {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let mut chars = t.chars();
        let letter = chars
            .next()
            .ok_or_else(|| RootSystemError::Parse(s.to_string()))?;
        let family = match letter.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return Err(RootSystemError::Parse(s.to_string())),
        };
        let rest = chars.as_str().trim_start_matches('_');
        let rank: usize = rest
            .parse()
            .map_err(|_| RootSystemError::Parse(s.to_string()))?;
        CartanType::new(family, rank)
    }
}

/// Root datum of a simple Lie algebra.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub cartan_type: CartanType,
    /// `cartan[i][j] = ⟨α_j, α_i^∨⟩`.
    pub cartan: Vec<Vec<i32>>,
    pub symmetrizer: Vec<i32>,
    /// Positive roots ordered by height, then by coordinates descending.
    /// The first `rank` entries are the simple roots in order.
    pub positive_roots: Vec<Weight>,
    root_index: FxHashMap<Weight, usize>,
    /// `2ρ`, the sum of the positive roots.
    pub two_rho: Weight,
    /// `coroot_pairing[k][j] = ⟨α_j, β_k^∨⟩`, so `⟨μ, β_k^∨⟩ = Σ_j μ_j coroot_pairing[k][j]`.
    coroot_pairing: Vec<Vec<i32>>,
    /// `β_k^∨` expanded in simple coroots.
    coroot_coords: Vec<Vec<i32>>,
}

impl RootSystem {
    pub fn new(cartan_type: CartanType) -> Self {
        let n = cartan_type.rank;
        let cartan = cartan_type.cartan_matrix();
        let symmetrizer = cartan_type.symmetrizer();

        let simple_pair = |beta: &Weight, i: usize| -> i32 {
            (0..n).map(|j| cartan[i][j] * beta[j]).sum()
        };

        // Grow root strings level by level: β + α_i is a root iff q > 0,
        // where p - q = ⟨β, α_i^∨⟩ and p is the length of the downward string.
        let mut roots: Vec<Weight> = (0..n).map(|i| Weight::simple(n, i)).collect();
        let mut known: FxHashMap<Weight, ()> = roots.iter().map(|r| (r.clone(), ())).collect();
        let mut level: Vec<Weight> = roots.clone();
        while !level.is_empty() {
            let mut next = Vec::new();
            for beta in &level {
                for i in 0..n {
                    let alpha = Weight::simple(n, i);
                    if *beta == alpha {
                        continue;
                    }
                    let mut p = 0;
                    let mut cur = beta - &alpha;
                    while known.contains_key(&cur) {
                        p += 1;
                        cur = &cur - &alpha;
                    }
                    let q = p - simple_pair(beta, i);
                    if q > 0 {
                        let up = beta + &alpha;
                        if !known.contains_key(&up) {
                            known.insert(up.clone(), ());
                            next.push(up);
                        }
                    }
                }
            }
            roots.extend(next.iter().cloned());
            level = next;
        }
        roots.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| b.cmp(a)));
        assert_eq!(
            roots.len(),
            cartan_type.num_positive_roots(),
            "root generation for {cartan_type} produced the wrong number of roots"
        );

        let root_index = roots
            .iter()
            .enumerate()
            .map(|(k, r)| (r.clone(), k))
            .collect();
        let mut two_rho = Weight::zero(n);
        for r in &roots {
            two_rho += r;
        }

        let mut rs = RootSystem {
            cartan_type,
            cartan,
            symmetrizer,
            positive_roots: roots,
            root_index,
            two_rho,
            coroot_pairing: Vec::new(),
            coroot_coords: Vec::new(),
        };
        let mut pairing = Vec::with_capacity(rs.positive_roots.len());
        let mut coords = Vec::with_capacity(rs.positive_roots.len());
        for beta in &rs.positive_roots {
            let bb = rs.inner(beta, beta);
            let row: Vec<i32> = (0..n)
                .map(|j| {
                    let v = 2 * rs.inner(&Weight::simple(n, j), beta);
                    debug_assert_eq!(v % bb, 0);
                    v / bb
                })
                .collect();
            pairing.push(row);
            // β^∨ = Σ β_i (α_i,α_i)/(β,β) α_i^∨
            let c: Vec<i32> = (0..n)
                .map(|i| {
                    let v = beta[i] * 2 * rs.symmetrizer[i];
                    debug_assert_eq!(v % bb, 0);
                    v / bb
                })
                .collect();
            coords.push(c);
        }
        rs.coroot_pairing = pairing;
        rs.coroot_coords = coords;
        rs
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn simple_root(&self, i: usize) -> Weight {
        Weight::simple(self.rank(), i)
    }

    pub fn zero(&self) -> Weight {
        Weight::zero(self.rank())
    }

    /// Index of a positive root in the fixed order.
    pub fn root_index(&self, beta: &Weight) -> Option<usize> {
        self.root_index.get(beta).copied()
    }

    pub fn is_root(&self, beta: &Weight) -> bool {
        self.root_index.contains_key(beta) || self.root_index.contains_key(&-beta)
    }

    /// Invariant form with short roots of squared length 2.
    pub fn inner(&self, mu: &Weight, nu: &Weight) -> i32 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if mu[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += mu[i] * nu[j] * self.symmetrizer[i] * self.cartan[i][j];
            }
        }
        s
    }

    /// `⟨μ, α_i^∨⟩`.
    pub fn simple_pairing(&self, mu: &Weight, i: usize) -> i32 {
        let row = &self.cartan[i];
        (0..self.rank()).map(|j| row[j] * mu[j]).sum()
    }

    /// `⟨μ, β_k^∨⟩` for the `k`-th positive root.
    pub fn coroot_pairing(&self, mu: &Weight, k: usize) -> i32 {
        let row = &self.coroot_pairing[k];
        (0..self.rank()).map(|j| row[j] * mu[j]).sum()
    }

    /// The coroot `β_k^∨` in the basis of simple coroots.
    pub fn coroot_coords(&self, k: usize) -> &[i32] {
        &self.coroot_coords[k]
    }

    /// `s_i(μ) = μ - ⟨μ, α_i^∨⟩ α_i`.
    pub fn reflect_simple(&self, mu: &Weight, i: usize) -> Weight {
        let mut out = mu.clone();
        out.0[i] -= self.simple_pairing(mu, i);
        out
    }

    /// `s_β(μ)` for the `k`-th positive root `β`.
    pub fn reflect(&self, mu: &Weight, k: usize) -> Weight {
        let c = self.coroot_pairing(mu, k);
        mu - &(c * &self.positive_roots[k])
    }

    /// Whether `⟨λ, α_i^∨⟩ ≥ 0` for all simple roots.
    pub fn is_dominant(&self, lam: &Weight) -> bool {
        (0..self.rank()).all(|i| self.simple_pairing(lam, i) >= 0)
    }

    /// `w·λ = w(λ + ρ) - ρ`, evaluated as `w(λ) + (w(2ρ) - 2ρ)/2`.
    pub fn dot_action(&self, w: &WeylElement, lam: &Weight) -> Weight {
        let shift = &w.apply(&self.two_rho) - &self.two_rho;
        let half = shift
            .div_exact(2)
            .expect("w(ρ) - ρ is always in the root lattice");
        &w.apply(lam) + &half
    }

    /// Decides whether `λ` is dot-regular and if so finds `w` with `w·λ` dominant.
    pub fn regularity(&self, lam: &Weight) -> Regularity {
        let n = self.rank();
        let mut two_mu = &(2 * lam) + &self.two_rho;
        if (0..self.num_positive_roots()).any(|k| self.coroot_pairing(&two_mu, k) == 0) {
            return Regularity::Singular;
        }
        let mut word: Vec<usize> = Vec::new();
        'outer: loop {
            for i in 0..n {
                if self.simple_pairing(&two_mu, i) < 0 {
                    two_mu = self.reflect_simple(&two_mu, i);
                    word.insert(0, i);
                    continue 'outer;
                }
            }
            break;
        }
        let dominant = (&two_mu - &self.two_rho)
            .div_exact(2)
            .expect("dominant representative is integral");
        Regularity::Regular {
            w: WeylElement::from_word(self, &word),
            dominant,
        }
    }

    /// Subscript label of a root built from its coordinates: `α1+2α2` is `122`.
    /// Falls back to a bracketed coordinate list when the rank exceeds 9.
    pub fn root_label(&self, k: usize) -> String {
        let beta = &self.positive_roots[k];
        if self.rank() > 9 {
            return format!("[{}]", beta.to_csv());
        }
        let mut s = String::new();
        for (i, &c) in beta.coords().iter().enumerate() {
            for _ in 0..c {
                s.push(char::from(b'1' + i as u8));
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub enum Regularity {
    Singular,
    Regular { w: WeylElement, dominant: Weight },
}

/// Basis element of `g` in the Chevalley basis.
///
/// Indices `0..N` are `f_β` (weight `-β`), `N..N+n` are `h_i` and
/// `N+n..2N+n` are `e_β` (weight `β`), where `N` is the number of positive
/// roots.
pub type GIndex = usize;

/// Structure constants of `g` in a Chevalley basis.
///
/// The basis vectors `f_β` span `n` and have weight `-β`. The brackets are
/// `[f_β, f_γ] = N_{β,γ} f_{β+γ}`, `[f_β, e_β] = -h_β` with `h_β` the coroot,
/// and `[h_i, x] = ⟨wt(x), α_i^∨⟩ x`. Signs are fixed by declaring the
/// structure constant of every extraspecial pair of `n` positive.
#[derive(Clone, Debug)]
pub struct ChevalleyConstants {
    rank: usize,
    npos: usize,
    /// `n_table[a * 2N + b]` for signed roots `a`, `b`; zero when `a + b` is not a root.
    n_table: Vec<i32>,
    /// Signed index of `a + b` when it is a root.
    sum_table: Vec<u32>,
    /// `⟨-β, α_i^∨⟩` for each signed root index, used for `h` brackets.
    pairings: Vec<Vec<i32>>,
    coroots: Vec<Vec<i32>>,
    weights: Vec<Weight>,
}

const NO_ROOT: u32 = u32::MAX;

impl ChevalleyConstants {
    pub fn new(rs: &RootSystem) -> Self {
        let npos = rs.num_positive_roots();
        let n2 = 2 * npos;
        // Signed root index: k < N is β_k, k ≥ N is -β_{k-N}.
        let signed = |k: usize| -> Weight {
            if k < npos {
                rs.positive_roots[k].clone()
            } else {
                -&rs.positive_roots[k - npos]
            }
        };
        let index_of = |w: &Weight| -> Option<usize> {
            rs.root_index(w)
                .or_else(|| rs.root_index(&-w).map(|k| k + npos))
        };
        let mut sum_table = vec![NO_ROOT; n2 * n2];
        for a in 0..n2 {
            for b in 0..n2 {
                if let Some(c) = index_of(&(&signed(a) + &signed(b))) {
                    sum_table[a * n2 + b] = c as u32;
                }
            }
        }
        let neg = |k: usize| if k < npos { k + npos } else { k - npos };
        let norm = |k: usize| {
            let r = &rs.positive_roots[k % npos];
            rs.inner(r, r)
        };

        // Positive-positive constants, by increasing height of the sum.
        let mut pos: FxHashMap<(usize, usize), i32> = FxHashMap::default();
        // Constant for an arbitrary pair of signed roots whose sum is a root
        // of height lower than the one currently being processed.
        fn lookup(
            pos: &FxHashMap<(usize, usize), i32>,
            sum_table: &[u32],
            npos: usize,
            norm: &dyn Fn(usize) -> i32,
            a: usize,
            b: usize,
        ) -> i32 {
            let n2 = 2 * npos;
            let c = sum_table[a * n2 + b];
            if c == NO_ROOT {
                return 0;
            }
            let c = c as usize;
            let neg = |k: usize| if k < npos { k + npos } else { k - npos };
            let a_pos = a < npos;
            let b_pos = b < npos;
            if a_pos && b_pos {
                return pos[&(a, b)];
            }
            if !a_pos && !b_pos {
                return -pos[&(neg(a), neg(b))];
            }
            // Mixed signs: rotate (a, b, -c) so that the two same-signed roots are paired.
            let c_pos = c < npos;
            if b_pos != c_pos {
                // b and -c share a sign
                let v = lookup(pos, sum_table, npos, norm, b, neg(c)) * norm(c);
                debug_assert_eq!(v % norm(a), 0);
                v / norm(a)
            } else {
                // -c and a share a sign
                let v = lookup(pos, sum_table, npos, norm, neg(c), a) * norm(c);
                debug_assert_eq!(v % norm(b), 0);
                v / norm(b)
            }
        }

        for xi in 0..npos {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for r in 0..npos {
                for s in r + 1..npos {
                    if sum_table[r * n2 + s] == xi as u32 {
                        pairs.push((r, s));
                    }
                }
            }
            if pairs.is_empty() {
                continue;
            }
            // p(r, s): largest k with s - k r a root
            let string_p = |r: usize, s: usize| -> i32 {
                let mut p = 0;
                let mut cur = s;
                loop {
                    let d = sum_table[cur * n2 + neg(r)];
                    if d == NO_ROOT {
                        break;
                    }
                    p += 1;
                    cur = d as usize;
                }
                p
            };
            let (r1, s1) = *pairs.iter().min().unwrap();
            let n11 = string_p(r1, s1) + 1;
            pos.insert((r1, s1), n11);
            pos.insert((s1, r1), -n11);
            for &(r, s) in &pairs {
                if (r, s) == (r1, s1) {
                    continue;
                }
                // N(r,s) = |ξ|²/N(r1,s1) · [ N(s,-r1)N(r,-s1)/|s-r1|² + N(-r1,r)N(s,-s1)/|r-r1|² ]
                let mut num: i64 = 0;
                let mut den: i64 = 1;
                let mut add_term = |x: i64, d: i64| {
                    num = num * d + x * den;
                    den *= d;
                };
                let sr1 = sum_table[s * n2 + neg(r1)];
                if sr1 != NO_ROOT {
                    let t = lookup(&pos, &sum_table, npos, &norm, s, neg(r1)) as i64
                        * lookup(&pos, &sum_table, npos, &norm, r, neg(s1)) as i64;
                    add_term(t, norm(sr1 as usize) as i64);
                }
                let rr1 = sum_table[r * n2 + neg(r1)];
                if rr1 != NO_ROOT {
                    let t = lookup(&pos, &sum_table, npos, &norm, neg(r1), r) as i64
                        * lookup(&pos, &sum_table, npos, &norm, s, neg(s1)) as i64;
                    add_term(t, norm(rr1 as usize) as i64);
                }
                let top = num * norm(xi) as i64;
                let bottom = den * n11 as i64;
                assert_eq!(top % bottom, 0, "non-integral structure constant");
                let v = (top / bottom) as i32;
                assert_eq!(
                    v.abs(),
                    string_p(r, s) + 1,
                    "structure constant has the wrong magnitude"
                );
                pos.insert((r, s), v);
                pos.insert((s, r), -v);
            }
        }

        let mut n_table = vec![0i32; n2 * n2];
        for a in 0..n2 {
            for b in 0..n2 {
                if sum_table[a * n2 + b] != NO_ROOT {
                    n_table[a * n2 + b] = lookup(&pos, &sum_table, npos, &norm, a, b);
                }
            }
        }
        let weights: Vec<Weight> = (0..n2).map(|k| -&signed(k)).collect();
        let pairings = weights
            .iter()
            .map(|w| (0..rs.rank()).map(|i| rs.simple_pairing(w, i)).collect())
            .collect();
        let coroots = (0..npos).map(|k| rs.coroot_coords(k).to_vec()).collect();
        ChevalleyConstants {
            rank: rs.rank(),
            npos,
            n_table,
            sum_table,
            pairings,
            coroots,
            weights,
        }
    }

    pub fn num_positive_roots(&self) -> usize {
        self.npos
    }

    /// Dimension of `g`.
    pub fn dim_g(&self) -> usize {
        2 * self.npos + self.rank
    }

    /// `[f_β, f_γ] = N f_{β+γ}` as `(index of β+γ, N)`.
    pub fn bracket_f(&self, beta: usize, gamma: usize) -> Option<(usize, i32)> {
        let n2 = 2 * self.npos;
        let c = self.sum_table[beta * n2 + gamma];
        if c == NO_ROOT {
            None
        } else {
            Some((c as usize, self.n_table[beta * n2 + gamma]))
        }
    }

    /// `N_{β,γ}` for positive roots, zero when `β+γ` is not a root.
    pub fn n_pos(&self, beta: usize, gamma: usize) -> i32 {
        self.n_table[beta * 2 * self.npos + gamma]
    }

    pub fn f_index(&self, k: usize) -> GIndex {
        k
    }

    pub fn h_index(&self, i: usize) -> GIndex {
        self.npos + i
    }

    pub fn e_index(&self, k: usize) -> GIndex {
        self.npos + self.rank + k
    }

    /// Weight of a basis element of `g`.
    pub fn g_weight(&self, x: GIndex) -> Weight {
        let npos = self.npos;
        if x < npos {
            self.weights[x].clone()
        } else if x < npos + self.rank {
            Weight::zero(self.rank)
        } else {
            self.weights[x - self.rank].clone()
        }
    }

    /// Human readable name of a basis element, given root labels.
    pub fn g_name(&self, rs: &RootSystem, x: GIndex) -> String {
        let npos = self.npos;
        if x < npos {
            format!("f{}", rs.root_label(x))
        } else if x < npos + self.rank {
            format!("h{}", x - npos + 1)
        } else {
            format!("e{}", rs.root_label(x - npos - self.rank))
        }
    }

    /// The Lie bracket `[x, y]` of two basis elements, as a sparse combination.
    pub fn bracket(&self, x: GIndex, y: GIndex) -> SmallVec<[(GIndex, i32); 4]> {
        let npos = self.npos;
        let n = self.rank;
        let mut out = SmallVec::new();
        // Map to signed-root indices: f_β = X_β (signed index k), e_β = X_{-β} (signed k+N).
        let as_root = |z: GIndex| -> Option<usize> {
            if z < npos {
                Some(z)
            } else if z >= npos + n {
                Some(z - n)
            } else {
                None
            }
        };
        let to_g = |k: usize| -> GIndex { if k < npos { k } else { k + n } };
        match (as_root(x), as_root(y)) {
            (Some(a), Some(b)) => {
                let n2 = 2 * npos;
                let neg_a = if a < npos { a + npos } else { a - npos };
                if b == neg_a {
                    // [X_a, X_{-a}] = H_a and h_i = -H_i; for a negative H_a = -H_{-a}.
                    let (k, sign) = if a < npos { (a, -1) } else { (a - npos, 1) };
                    for (i, &c) in self.coroots[k].iter().enumerate() {
                        if c != 0 {
                            out.push((npos + i, sign * c));
                        }
                    }
                } else {
                    let c = self.sum_table[a * n2 + b];
                    if c != NO_ROOT {
                        out.push((to_g(c as usize), self.n_table[a * n2 + b]));
                    }
                }
            }
            (Some(a), None) => {
                // [x, h_i] = -[h_i, x]
                let i = y - npos;
                let v = self.pairings[a][i];
                if v != 0 {
                    out.push((x, -v));
                }
            }
            (None, Some(b)) => {
                let i = x - npos;
                let v = self.pairings[b][i];
                if v != 0 {
                    out.push((y, v));
                }
            }
            (None, None) => {}
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn rs(t: &str) -> RootSystem {
        RootSystem::new(t.parse().unwrap())
    }

    const TYPES: &[&str] = &[
        "A1", "A2", "A3", "A4", "A5", "B2", "B3", "B4", "C3", "C4", "D4", "D5", "G2", "F4", "E6",
    ];

    /// Closure of the simple roots under all simple reflections.
    fn closure_oracle(r: &RootSystem) -> BTreeSet<Weight> {
        let n = r.rank();
        let mut set: BTreeSet<Weight> = (0..n).map(|i| r.simple_root(i)).collect();
        loop {
            let mut grew = false;
            let cur: Vec<Weight> = set.iter().cloned().collect();
            for b in &cur {
                for i in 0..n {
                    let v = r.reflect_simple(b, i);
                    if set.insert(v) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        set.into_iter().filter(|w| w.is_nonnegative()).collect()
    }

    #[test]
    fn positive_roots_match_reflection_closure() {
        for t in TYPES {
            let r = rs(t);
            let ours: BTreeSet<Weight> = r.positive_roots.iter().cloned().collect();
            assert_eq!(ours, closure_oracle(&r), "{t}");
            assert_eq!(r.num_positive_roots(), r.cartan_type.num_positive_roots());
        }
    }

    #[test]
    fn rho_pairs_to_one_with_simple_coroots() {
        for t in TYPES {
            let r = rs(t);
            for i in 0..r.rank() {
                assert_eq!(r.simple_pairing(&r.two_rho, i), 2, "{t}");
            }
        }
    }

    #[test]
    fn a2_and_g2_roots() {
        let a2 = rs("A2");
        let want: Vec<Weight> = [[1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|c| Weight::from_slice(c))
            .collect();
        assert_eq!(a2.positive_roots, want);
        let g2 = rs("G2");
        let labels: Vec<String> = (0..6).map(|k| g2.root_label(k)).collect();
        assert_eq!(labels, ["1", "2", "12", "112", "1112", "11122"]);
        assert_eq!(g2.positive_roots[5], Weight::from_slice(&[3, 2]));
    }

    #[test]
    fn b2_roots_have_short_last_simple_root() {
        let b2 = rs("B2");
        let labels: Vec<String> = (0..4).map(|k| b2.root_label(k)).collect();
        assert_eq!(labels, ["1", "2", "12", "122"]);
        let a1 = b2.simple_root(0);
        let a2 = b2.simple_root(1);
        assert_eq!(b2.inner(&a1, &a1), 4);
        assert_eq!(b2.inner(&a2, &a2), 2);
    }

    #[test]
    fn parse_types() {
        assert_eq!("g2".parse::<CartanType>().unwrap().to_string(), "G2");
        assert!("D3".parse::<CartanType>().is_err());
        assert!("E9".parse::<CartanType>().is_err());
        assert!("X2".parse::<CartanType>().is_err());
        assert!("A".parse::<CartanType>().is_err());
        assert!("A0".parse::<CartanType>().is_err());
    }

    #[test]
    fn sl3_bracket() {
        let r = rs("A2");
        let c = ChevalleyConstants::new(&r);
        assert_eq!(c.bracket_f(0, 1), Some((2, 1)));
        assert_eq!(c.bracket_f(1, 0), Some((2, -1)));
        assert_eq!(c.bracket_f(0, 2), None);
        assert_eq!(c.bracket_f(0, 0), None);
    }

    fn add_into(acc: &mut FxHashMap<GIndex, i64>, terms: &[(GIndex, i32)], scale: i64) {
        for &(k, v) in terms {
            *acc.entry(k).or_insert(0) += scale * v as i64;
        }
    }

    /// `[x, Σ c_k y_k]`.
    fn bracket_vec(c: &ChevalleyConstants, x: GIndex, v: &FxHashMap<GIndex, i64>) -> FxHashMap<GIndex, i64> {
        let mut out = FxHashMap::default();
        for (&y, &a) in v {
            add_into(&mut out, &c.bracket(x, y), a);
        }
        out.retain(|_, v| *v != 0);
        out
    }

    #[test]
    fn jacobi_identity_on_all_triples() {
        for t in ["A1", "A2", "A3", "B2", "B3", "C3", "G2", "D4"] {
            let r = rs(t);
            let c = ChevalleyConstants::new(&r);
            let d = c.dim_g();
            for x in 0..d {
                for y in 0..d {
                    let yz: Vec<FxHashMap<GIndex, i64>> = (0..d)
                        .map(|z| {
                            let mut m = FxHashMap::default();
                            add_into(&mut m, &c.bracket(y, z), 1);
                            m
                        })
                        .collect();
                    for z in 0..d {
                        // [x,[y,z]] - [[x,y],z] - [y,[x,z]]
                        let mut total = bracket_vec(&c, x, &yz[z]);
                        for &(k, v) in c.bracket(x, y).iter() {
                            for &(m, w) in c.bracket(k, z).iter() {
                                *total.entry(m).or_insert(0) -= (v * w) as i64;
                            }
                        }
                        for &(k, v) in c.bracket(x, z).iter() {
                            for &(m, w) in c.bracket(y, k).iter() {
                                *total.entry(m).or_insert(0) -= (v * w) as i64;
                            }
                        }
                        total.retain(|_, v| *v != 0);
                        assert!(total.is_empty(), "{t}: Jacobi fails on ({x},{y},{z})");
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_on_positive_part_large_types() {
        for t in ["F4", "E6", "B4", "C4"] {
            let r = rs(t);
            let c = ChevalleyConstants::new(&r);
            let np = c.num_positive_roots();
            for a in 0..np {
                for b in 0..np {
                    for z in 0..np {
                        let mut acc: FxHashMap<usize, i64> = FxHashMap::default();
                        if let Some((bz, v)) = c.bracket_f(b, z) {
                            if let Some((k, w)) = c.bracket_f(a, bz) {
                                *acc.entry(k).or_insert(0) += (v * w) as i64;
                            }
                        }
                        if let Some((ab, v)) = c.bracket_f(a, b) {
                            if let Some((k, w)) = c.bracket_f(ab, z) {
                                *acc.entry(k).or_insert(0) -= (v * w) as i64;
                            }
                        }
                        if let Some((az, v)) = c.bracket_f(a, z) {
                            if let Some((k, w)) = c.bracket_f(b, az) {
                                *acc.entry(k).or_insert(0) -= (v * w) as i64;
                            }
                        }
                        acc.retain(|_, v| *v != 0);
                        assert!(acc.is_empty(), "{t}");
                    }
                }
            }
        }
    }

    #[test]
    fn antisymmetry_and_magnitude() {
        for t in TYPES {
            let r = rs(t);
            let c = ChevalleyConstants::new(&r);
            let np = c.num_positive_roots();
            for a in 0..np {
                assert_eq!(c.bracket_f(a, a), None);
                for b in 0..np {
                    assert_eq!(c.n_pos(a, b), -c.n_pos(b, a));
                    assert!(c.n_pos(a, b).abs() <= 3);
                }
            }
        }
    }

    #[test]
    fn g2_serre_relations() {
        let r = rs("G2");
        let c = ChevalleyConstants::new(&r);
        // ad(f1)^4 f2 = 0, ad(f1)^3 f2 ≠ 0
        let mut cur = Some((1usize, 1i32));
        let mut steps = 0;
        while let Some((k, v)) = cur {
            cur = c.bracket_f(0, k).map(|(m, w)| (m, v * w));
            steps += 1;
            if steps == 4 {
                break;
            }
        }
        assert!(cur.is_none());
        assert_eq!(
            c.bracket_f(0, c.bracket_f(0, c.bracket_f(0, 1).unwrap().0).unwrap().0)
                .map(|x| x.0),
            Some(4)
        );
        // ad(f2)^2 f1 = 0
        let (k, _) = c.bracket_f(1, 0).unwrap();
        assert_eq!(c.bracket_f(1, k), None);
    }

    #[test]
    fn dominant_weights_are_regular_with_identity() {
        let r = rs("B3");
        let lam = Weight::from_slice(&[2, 3, 4]);
        assert!(r.is_dominant(&lam));
        match r.regularity(&lam) {
            Regularity::Regular { w, dominant } => {
                assert_eq!(w.length(), 0);
                assert_eq!(dominant, lam);
            }
            Regularity::Singular => panic!("dominant weight is regular"),
        }
    }

    #[test]
    fn minus_rho_is_singular() {
        let r = rs("A3");
        // ρ = (3/2, 2, 3/2) is not integral in root coordinates; use -ρ for A2 where ρ = α1+α2.
        let a2 = rs("A2");
        assert!(matches!(
            a2.regularity(&Weight::from_slice(&[-1, -1])),
            Regularity::Singular
        ));
        assert!(matches!(
            r.regularity(&Weight::from_slice(&[-1, -1, -1])),
            Regularity::Singular
        ));
    }

    #[test]
    fn a3_regularity_examples() {
        let r = rs("A3");
        match r.regularity(&Weight::from_slice(&[1, 2, 0])) {
            Regularity::Regular { w, dominant } => {
                assert_eq!(dominant, Weight::from_slice(&[1, 2, 1]));
                assert_eq!(w.word(), &[2]);
            }
            Regularity::Singular => panic!(),
        }
        let s2 = WeylElement::from_word(&r, &[1]);
        assert_eq!(
            r.dot_action(&s2, &Weight::from_slice(&[1, 0, 1])),
            Weight::from_slice(&[1, 1, 1])
        );
    }

    #[test]
    fn g2_dot_action() {
        let r = rs("G2");
        let z = r.zero();
        let s1 = WeylElement::from_word(&r, &[0]);
        let s21 = WeylElement::from_word(&r, &[1, 0]);
        let s12 = WeylElement::from_word(&r, &[0, 1]);
        assert_eq!(r.dot_action(&s1, &z), Weight::from_slice(&[-1, 0]));
        assert_eq!(r.dot_action(&s21, &z), Weight::from_slice(&[-1, -2]));
        assert_eq!(r.dot_action(&s12, &z), Weight::from_slice(&[-4, -1]));
    }

    #[test]
    fn weight_display_and_parse() {
        let w: Weight = "2, -1,0".parse().unwrap();
        assert_eq!(w.to_string(), "2α1-α2");
        assert_eq!(Weight::zero(2).to_string(), "0");
        assert_eq!((-&w).to_string(), "-2α1+α2");
        assert!("".parse::<Weight>().is_err());
        assert!("1,x".parse::<Weight>().is_err());
    }

    mod props {
        use super::*;
        use crate::weyl::WeylGroup;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dot_action_is_a_group_action(
                ti in 0usize..4,
                a in 0usize..1000, b in 0usize..1000,
                c in proptest::collection::vec(-6i32..7, 3),
            ) {
                let t = ["A3", "B3", "C3", "G2"][ti];
                let r = rs(t);
                let wg = WeylGroup::enumerate(&r, 1_000_000).unwrap();
                let x = &wg.elements[a % wg.len()];
                let y = &wg.elements[b % wg.len()];
                let lam = Weight::from_slice(&c[..r.rank()]);
                let xy = x.compose(y);
                prop_assert_eq!(r.dot_action(&xy, &lam), r.dot_action(x, &r.dot_action(y, &lam)));
            }

            #[test]
            fn regular_weights_reach_dominant(
                ti in 0usize..4,
                c in proptest::collection::vec(-8i32..9, 3),
            ) {
                let t = ["A3", "B3", "C3", "G2"][ti];
                let r = rs(t);
                let lam = Weight::from_slice(&c[..r.rank()]);
                if let Regularity::Regular { w, dominant } = r.regularity(&lam) {
                    prop_assert!(r.is_dominant(&dominant));
                    prop_assert_eq!(r.dot_action(&w, &lam), dominant);
                }
            }
        }
    }
}
