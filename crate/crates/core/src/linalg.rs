//! Exact sparse linear algebra over the integers.
//!
//! Elimination is fraction-free: a row is reduced by `a·row - b·pivot` and
//! then divided by the gcd of its entries, so intermediate values stay
//! integral and small. Columns are processed sparsest first.

use dashu_base::Gcd;
use dashu_base::UnsignedAbs;
use dashu_int::{IBig, UBig};
use rustc_hash::FxHashMap;

/// A sparse matrix with arbitrary precision integer entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseIntMatrix {
    nrows: usize,
    ncols: usize,
    /// Row-wise entries sorted by column, without zeros.
    rows: Vec<Vec<(usize, IBig)>>,
}

/// A rational vector `numer / denom` with `denom > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector {
    pub numer: Vec<IBig>,
    pub denom: IBig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(RationalVector),
    /// One solution of a system with a positive-dimensional solution space.
    NonUnique(RationalVector),
    Inconsistent,
}

impl SparseIntMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, IBig)>,
    {
        let mut acc: Vec<FxHashMap<usize, IBig>> = vec![FxHashMap::default(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) out of bounds");
            *acc[r].entry(c).or_default() += v;
        }
        let rows = acc
            .into_iter()
            .map(|m| {
                let mut row: Vec<(usize, IBig)> = m.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                row.sort_by_key(|e| e.0);
                row
            })
            .collect();
        SparseIntMatrix { nrows, ncols, rows }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let nrows = dense.len();
        let ncols = dense.first().map_or(0, |r| r.len());
        let trip = dense.iter().enumerate().flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(move |(c, &v)| (r, c, IBig::from(v)))
        });
        Self::from_triplets(nrows, ncols, trip)
    }

    /// Replaces row `r`, given as unsorted `(col, value)` pairs without repeats.
    pub fn set_row(&mut self, r: usize, mut entries: Vec<(usize, IBig)>) {
        entries.retain(|(_, v)| !v.is_zero());
        entries.sort_by_key(|e| e.0);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.last().is_none_or(|e| e.0 < self.ncols));
        self.rows[r] = entries;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, IBig)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> IBig {
        self.rows[r]
            .binary_search_by_key(&c, |e| e.0)
            .map(|i| self.rows[r][i].1.clone())
            .unwrap_or_default()
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut cols: Vec<Vec<(usize, IBig)>> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                cols[*c].push((r, v.clone()));
            }
        }
        SparseIntMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            rows: cols,
        }
    }

    /// Drops all-zero rows and columns.
    pub fn compressed(&self) -> SparseIntMatrix {
        let mut used = vec![false; self.ncols];
        for row in &self.rows {
            for (c, _) in row {
                used[*c] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.ncols];
        let mut k = 0;
        for c in 0..self.ncols {
            if used[c] {
                remap[c] = k;
                k += 1;
            }
        }
        let rows: Vec<Vec<(usize, IBig)>> = self
            .rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.iter().map(|(c, v)| (remap[*c], v.clone())).collect())
            .collect();
        SparseIntMatrix {
            nrows: rows.len(),
            ncols: k,
            rows,
        }
    }

    /// Multiplies every entry by `c`.
    pub fn scale(&mut self, c: &IBig) {
        for row in &mut self.rows {
            for e in row.iter_mut() {
                e.1 *= c;
            }
        }
    }

    /// `A·x` for an integer vector `x` of length `ncols`.
    pub fn mul_vec(&self, x: &[IBig]) -> Vec<IBig> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(c, v)| v * &x[*c]).sum())
            .collect()
    }

    /// Exact rank over `ℚ`.
    pub fn rank(&self) -> usize {
        let order = column_order(self.ncols, self.rows.iter());
        let mut rows: Vec<Vec<(usize, IBig)>> = self
            .rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| relabel(r, &order))
            .collect();
        rows.sort_by_key(|r| r.len());
        let mut ech = Echelon::default();
        for row in rows {
            ech.insert(row);
        }
        ech.pivots.len()
    }

    /// Solves `Aᵀ v = b` exactly, where `A` is `m × n` and `b` has length `n`.
    pub fn solve(&self, b: &[IBig]) -> Solution {
        assert_eq!(b.len(), self.ncols, "right-hand side has the wrong length");
        let at = self.transpose();
        let nunk = at.ncols;
        // unknown columns get relabelled sparsest first; the right-hand side
        // sits in the last column so it is never chosen as a pivot
        let order = column_order(nunk, at.rows.iter());
        let rhs_col = nunk;
        let mut eqs: Vec<Vec<(usize, IBig)>> = Vec::with_capacity(at.nrows);
        for (t, row) in at.rows.iter().enumerate() {
            let mut r = relabel(row, &order);
            if !b[t].is_zero() {
                r.push((rhs_col, b[t].clone()));
            }
            if !r.is_empty() {
                eqs.push(r);
            }
        }
        eqs.sort_by_key(|r| r.len());
        let mut ech = Echelon::default();
        for row in eqs {
            if let Some(lead) = ech.insert(row) {
                if lead == rhs_col {
                    return Solution::Inconsistent;
                }
            }
        }
        // back substitution from the last pivot column
        let mut values: Vec<Option<(IBig, IBig)>> = vec![None; nunk];
        let mut free = false;
        let mut pivot_cols: Vec<usize> = ech.pivots.keys().copied().collect();
        pivot_cols.sort_unstable_by(|a, b| b.cmp(a));
        for c in 0..nunk {
            if !ech.pivots.contains_key(&c) {
                values[c] = Some((IBig::ZERO, IBig::ONE));
                free = true;
            }
        }
        for c in pivot_cols {
            let row = &ech.pivots[&c];
            let p = &row[0].1;
            // p x_c = rhs - Σ a x
            let mut num = IBig::ZERO;
            let mut den = IBig::ONE;
            for (k, a) in &row[1..] {
                if *k == rhs_col {
                    num += a * &den;
                } else {
                    let (vn, vd) = values[*k].as_ref().expect("later columns solved first");
                    if vn.is_zero() {
                        continue;
                    }
                    // num/den - a·vn/vd
                    num = &num * vd - a * vn * &den;
                    den *= vd;
                    reduce_pair(&mut num, &mut den);
                }
            }
            den *= p;
            reduce_pair(&mut num, &mut den);
            values[c] = Some((num, den));
        }
        let mut denom = IBig::ONE;
        for v in values.iter().flatten() {
            denom = lcm(&denom, &v.1);
        }
        let mut numer = vec![IBig::ZERO; nunk];
        for (orig, &lab) in order.iter().enumerate() {
            let (vn, vd) = values[lab].as_ref().unwrap();
            numer[orig] = vn * &(&denom / vd);
        }
        let sol = RationalVector { numer, denom };
        if free {
            Solution::NonUnique(sol)
        } else {
            Solution::Unique(sol)
        }
    }
}

/// Permutation placing columns in order of increasing entry count:
/// `order[c]` is the new label of column `c`.
fn column_order<'a, I>(ncols: usize, rows: I) -> Vec<usize>
where
    I: Iterator<Item = &'a Vec<(usize, IBig)>>,
{
    let mut count = vec![0usize; ncols];
    for row in rows {
        for (c, _) in row {
            count[*c] += 1;
        }
    }
    let mut cols: Vec<usize> = (0..ncols).collect();
    cols.sort_by_key(|&c| (count[c], c));
    let mut order = vec![0; ncols];
    for (new, &c) in cols.iter().enumerate() {
        order[c] = new;
    }
    order
}

fn relabel(row: &[(usize, IBig)], order: &[usize]) -> Vec<(usize, IBig)> {
    let mut r: Vec<(usize, IBig)> = row.iter().map(|(c, v)| (order[*c], v.clone())).collect();
    r.sort_unstable_by_key(|e| e.0);
    r
}

fn reduce_pair(num: &mut IBig, den: &mut IBig) {
    if num.is_zero() {
        *den = IBig::ONE;
        return;
    }
    let g = IBig::from((&*num).unsigned_abs().gcd((&*den).unsigned_abs()));
    if g != IBig::ONE {
        *num = &*num / &g;
        *den = &*den / &g;
    }
    if *den < IBig::ZERO {
        *num = -&*num;
        *den = -&*den;
    }
}

pub fn lcm(a: &IBig, b: &IBig) -> IBig {
    if a.is_zero() || b.is_zero() {
        return IBig::ZERO;
    }
    let g = IBig::from(a.unsigned_abs().gcd(b.unsigned_abs()));
    IBig::from((a / &g * b).unsigned_abs())
}

pub fn gcd(a: &IBig, b: &IBig) -> IBig {
    IBig::from(a.unsigned_abs().gcd(b.unsigned_abs()))
}

/// Rows in echelon form keyed by their leading column.
#[derive(Default)]
struct Echelon {
    pivots: FxHashMap<usize, Vec<(usize, IBig)>>,
}

impl Echelon {
    /// Reduces `row` against the stored pivots and stores what remains.
    /// Returns the leading column of the new pivot, if any.
    fn insert(&mut self, mut row: Vec<(usize, IBig)>) -> Option<usize> {
        loop {
            let (c, _) = row.first()?;
            let c = *c;
            match self.pivots.get(&c) {
                None => {
                    make_primitive(&mut row);
                    if row[0].1 < IBig::ZERO {
                        for e in row.iter_mut() {
                            e.1 = -&e.1;
                        }
                    }
                    self.pivots.insert(c, row);
                    return Some(c);
                }
                Some(p) => {
                    row = eliminate(&row, p);
                }
            }
        }
    }
}

/// `a·row - b·pivot` with the leading entries cancelled, divided by its content.
fn eliminate(row: &[(usize, IBig)], pivot: &[(usize, IBig)]) -> Vec<(usize, IBig)> {
    let g = gcd(&row[0].1, &pivot[0].1);
    let a = &pivot[0].1 / &g;
    let b = &row[0].1 / &g;
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, &a * &row[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(&b * &pivot[j].1)));
            j += 1;
        } else {
            let v = &a * &row[i].1 - &b * &pivot[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [(usize, IBig)]) {
    let mut g = UBig::ZERO;
    for (_, v) in row.iter() {
        g = g.gcd(v.unsigned_abs());
        if g == UBig::ONE {
            return;
        }
    }
    if g > UBig::ONE {
        let g = IBig::from(g);
        for e in row.iter_mut() {
            e.1 = &e.1 / &g;
        }
    }
}
