//! Exact linear algebra over `F_p`: sparse rows, incremental elimination,
//! canonical reduced row echelon subspaces.
//!
//! The two central pieces:
//!
//! * [`Eliminator`] - a streaming Gaussian eliminator. Rows are fed in one at
//!   a time; each is reduced against the pivot rows found so far inside a
//!   dense scratch buffer (sparse storage, dense processing - wide nearly-full
//!   rows cost the same as in a dense solver, short rows stay cheap). Rank,
//!   nullity, canonical RREF and kernel bases come out at the end.
//! * [`SubspaceBasis`] - a subspace stored as its unique reduced row echelon
//!   basis with increasing pivots. Because the representation is canonical,
//!   subspace equality is row-by-row equality.

use crate::field::PrimeField;
use std::collections::BTreeMap;

/// Sparse vector: strictly increasing column indices, nonzero values in `[1, p)`.
pub type SparseVec = Vec<(u32, u64)>;

/// Immutable sparse matrix in row-major triplet form.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub field: PrimeField,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(field: PrimeField, nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            field,
            rows: vec![Vec::new(); nrows],
        }
    }

    /// Build from dense rows, dropping zeros and reducing mod p.
    pub fn from_dense(field: PrimeField, dense: &[Vec<u64>]) -> Self {
        let ncols = dense.first().map_or(0, |r| r.len());
        let rows = dense
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols, "ragged rows");
                r.iter()
                    .enumerate()
                    .filter_map(|(j, &v)| {
                        let v = field.reduce(v);
                        (v != 0).then_some((j as u32, v))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix {
            nrows: dense.len(),
            ncols,
            field,
            rows,
        }
    }

    pub fn from_rows(field: PrimeField, ncols: usize, rows: Vec<SparseVec>) -> Self {
        for r in &rows {
            debug_assert!(r.windows(2).all(|w| w[0].0 < w[1].0), "unsorted row");
            debug_assert!(r.iter().all(|&(c, v)| (c as usize) < ncols && v != 0 && v < field.p()));
        }
        SparseMatrix {
            nrows: rows.len(),
            ncols,
            field,
            rows,
        }
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn set_row(&mut self, i: usize, row: SparseVec) {
        self.rows[i] = row;
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                rows[j as usize].push((i as u32, v));
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            field: self.field,
            rows,
        }
    }

    /// `self * v` for a dense vector.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.ncols);
        let f = self.field;
        self.rows
            .iter()
            .map(|r| {
                let mut acc = 0u64;
                for &(j, val) in r {
                    acc = f.add(acc, f.mul(val, v[j as usize]));
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut el = Eliminator::new(self.field, self.ncols);
        // Sparsest-first insertion keeps the pivot rows short (the row-choice
        // half of Markowitz pivoting; column choice is fixed by RREF).
        let mut order: Vec<usize> = (0..self.nrows).collect();
        order.sort_by_key(|&i| self.rows[i].len());
        for i in order {
            el.add_row(self.rows[i].clone());
        }
        el.rank()
    }

    /// Canonical RREF basis of the kernel `{v : M v = 0}`.
    pub fn nullspace(&self) -> SubspaceBasis {
        let mut el = Eliminator::new(self.field, self.ncols);
        let mut order: Vec<usize> = (0..self.nrows).collect();
        order.sort_by_key(|&i| self.rows[i].len());
        for i in order {
            el.add_row(self.rows[i].clone());
        }
        el.kernel()
    }
}

/// Free-function form used all over the crate.
pub fn nullspace(m: &SparseMatrix) -> SubspaceBasis {
    m.nullspace()
}

/// Streaming Gaussian elimination over `F_p`.
///
/// Pivot rows are kept in forward echelon form (each row's entries start at
/// its pivot column; pivot value 1). Full reduction above the pivots is
/// deferred to [`Eliminator::into_rref`].
#[derive(Clone)]
pub struct Eliminator {
    field: PrimeField,
    ncols: usize,
    pivots: BTreeMap<u32, SparseVec>,
    scratch: Vec<u64>,
    touched: Vec<u32>,
}

impl Eliminator {
    pub fn new(field: PrimeField, ncols: usize) -> Self {
        Eliminator {
            field,
            ncols,
            pivots: BTreeMap::new(),
            scratch: vec![0; ncols],
            touched: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.pivots.len()
    }

    /// Reduce `row` against the current pivots; if a nonzero residual is left
    /// it becomes a new pivot row. Returns true when the rank grew.
    pub fn add_row(&mut self, row: SparseVec) -> bool {
        if row.is_empty() {
            return false;
        }
        let f = self.field;
        for &(c, v) in &row {
            debug_assert!((c as usize) < self.ncols && v != 0);
            self.scratch[c as usize] = v;
            self.touched.push(c);
        }
        let start = row[0].0;
        // Eliminating against the pivot at column c only introduces entries
        // at columns > c (echelon rows lead at their key), so one ascending
        // pass over the pivot map reduces the row completely.
        let pivot_cols: Vec<u32> = self.pivots.range(start..).map(|(&c, _)| c).collect();
        for c in pivot_cols {
            let coeff = self.scratch[c as usize];
            if coeff == 0 {
                continue;
            }
            let prow = self.pivots.get(&c).unwrap();
            let m = f.neg(coeff);
            for &(pc, pv) in prow {
                let cell = &mut self.scratch[pc as usize];
                let old = *cell;
                *cell = f.add(old, f.mul(m, pv));
                if old == 0 {
                    self.touched.push(pc);
                }
            }
            debug_assert_eq!(self.scratch[c as usize], 0);
        }

        // Collect the residual.
        self.touched.sort_unstable();
        self.touched.dedup();
        let mut residual: SparseVec = Vec::new();
        for &c in &self.touched {
            let v = self.scratch[c as usize];
            if v != 0 {
                residual.push((c, v));
            }
            self.scratch[c as usize] = 0;
        }
        self.touched.clear();
        let Some(&(lead, lv)) = residual.first() else {
            return false;
        };
        let inv = f.inv(lv);
        for e in &mut residual {
            e.1 = f.mul(e.1, inv);
        }
        self.pivots.insert(lead, residual);
        true
    }

    /// Reduce a dense vector against the pivots, in place.
    pub fn reduce_dense(&self, v: &mut [u64]) {
        let f = self.field;
        for (&c, prow) in self.pivots.range(..) {
            let coeff = v[c as usize];
            if coeff == 0 {
                continue;
            }
            let m = f.neg(coeff);
            for &(pc, pv) in prow {
                v[pc as usize] = f.add(v[pc as usize], f.mul(m, pv));
            }
        }
    }

    /// Finish: canonical RREF rows in increasing pivot order.
    pub fn into_rref(self) -> Vec<SparseVec> {
        let f = self.field;
        let mut rows: Vec<SparseVec> = Vec::with_capacity(self.pivots.len());
        let mut pivot_of_col: BTreeMap<u32, usize> = BTreeMap::new();
        // Back-substitute from the right: rows with larger pivots are already
        // fully reduced when they get used.
        let ordered: Vec<(u32, SparseVec)> = self.pivots.into_iter().collect();
        for idx in (0..ordered.len()).rev() {
            let (col, row) = ordered[idx].clone();
            let mut scratch: BTreeMap<u32, u64> = row.into_iter().collect();
            loop {
                // Find the smallest column beyond the pivot that hits an
                // already-finished pivot row.
                let hit = scratch.iter().find_map(|(&c, &v)| {
                    if c == col || v == 0 {
                        return None;
                    }
                    pivot_of_col.get(&c).map(|&ri| (c, v, ri))
                });
                let Some((c, v, ri)) = hit else { break };
                let m = f.neg(v);
                let finished = rows[ri].clone();
                for (pc, pv) in finished {
                    let cell = scratch.entry(pc).or_insert(0);
                    *cell = f.add(*cell, f.mul(m, pv));
                }
                debug_assert_eq!(scratch.get(&c).copied().unwrap_or(0), 0);
                scratch.retain(|_, v| *v != 0);
            }
            let cleaned: SparseVec = scratch.into_iter().filter(|&(_, v)| v != 0).collect();
            rows.push(cleaned);
            pivot_of_col.insert(col, rows.len() - 1);
        }
        rows.reverse();
        // `pivot_of_col` indices referred to the reversed order; rows are now
        // ascending by pivot, which is the canonical presentation.
        rows
    }

    /// Kernel of the rows seen so far, leaving the eliminator usable. More
    /// rows may be added afterwards; they can only shrink the kernel.
    pub fn kernel_snapshot(&self) -> SubspaceBasis {
        self.clone().kernel()
    }

    /// Canonical kernel basis of the row system seen so far, as a subspace of
    /// the column space.
    pub fn kernel(self) -> SubspaceBasis {
        let field = self.field;
        let ncols = self.ncols;
        let rref = self.into_rref();
        let mut is_pivot = vec![false; ncols];
        for r in &rref {
            is_pivot[r[0].0 as usize] = true;
        }
        let mut vectors: Vec<Vec<u64>> = Vec::with_capacity(ncols - rref.len());
        for free in 0..ncols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u64; ncols];
            v[free] = 1;
            for r in &rref {
                if let Ok(pos) = r.binary_search_by_key(&(free as u32), |e| e.0) {
                    v[r[0].0 as usize] = field.neg(r[pos].1);
                }
            }
            vectors.push(v);
        }
        SubspaceBasis::from_rows(field, ncols, vectors)
    }
}

/// A subspace of `F_p^n` held as its canonical reduced row echelon basis.
///
/// Invariants: rows are in RREF with strictly increasing pivot columns, pivot
/// entries are 1 and are the only nonzero entries in their columns. Two
/// `SubspaceBasis` values describe the same subspace exactly when their rows
/// are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    field: PrimeField,
    ambient: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn empty(field: PrimeField, ambient: usize) -> Self {
        SubspaceBasis {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        let mut rows = Vec::with_capacity(ambient);
        for i in 0..ambient {
            let mut r = vec![0u64; ambient];
            r[i] = 1;
            rows.push(r);
        }
        SubspaceBasis {
            field,
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn from_rows(field: PrimeField, ambient: usize, vectors: Vec<Vec<u64>>) -> Self {
        let mut s = SubspaceBasis::empty(field, ambient);
        for v in vectors {
            s.insert(&v);
        }
        s
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Ambient coordinates that are not pivot columns; they index a
    /// complement and serve as coordinates on the quotient space.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&c| !is_pivot[c]).collect()
    }

    /// Residual of `v` after reduction; zero iff `v` is in the subspace.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.ambient);
        let f = self.field;
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let coeff = out[pc];
            if coeff == 0 {
                continue;
            }
            let m = f.neg(coeff);
            for (o, r) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(m, *r));
            }
        }
        out
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Insert a vector, keeping the basis canonical. Returns true if the
    /// dimension grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let f = self.field;
        let mut red = self.reduce(v);
        let Some(lead) = red.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(red[lead]);
        for x in &mut red {
            *x = f.mul(*x, inv);
        }
        // Clear the new pivot column from existing rows to stay reduced.
        for row in &mut self.rows {
            let coeff = row[lead];
            if coeff != 0 {
                let m = f.neg(coeff);
                for (o, r) in row.iter_mut().zip(&red) {
                    *o = f.add(*o, f.mul(m, *r));
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < lead);
        self.pivots.insert(pos, lead);
        self.rows.insert(pos, red);
        true
    }

    /// Coefficients of `v` in terms of the basis rows, if `v` lies inside.
    /// With an RREF basis these are just the pivot coordinates.
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p]).collect())
    }

    pub fn sum(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.ambient, other.ambient);
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r);
        }
        s
    }

    /// Zassenhaus: RREF the block matrix [A|A; B|0]; rows whose left half
    /// vanished have right halves spanning the intersection.
    pub fn intersect(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.ambient, other.ambient);
        let n = self.ambient;
        let mut el = Eliminator::new(self.field, 2 * n);
        for r in &self.rows {
            let mut row: SparseVec = Vec::new();
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    row.push((j as u32, v));
                }
            }
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    row.push(((n + j) as u32, v));
                }
            }
            el.add_row(row);
        }
        for r in &other.rows {
            let row: SparseVec = r
                .iter()
                .enumerate()
                .filter_map(|(j, &v)| (v != 0).then_some((j as u32, v)))
                .collect();
            el.add_row(row);
        }
        let rref = el.into_rref();
        let mut vectors = Vec::new();
        for row in rref {
            if row[0].0 as usize >= n {
                let mut v = vec![0u64; n];
                for &(c, val) in &row {
                    v[c as usize - n] = val;
                }
                vectors.push(v);
            }
        }
        SubspaceBasis::from_rows(self.field, n, vectors)
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }
}

/// Expresses vectors as combinations of a fixed generating list.
///
/// Internally an augmented RREF of rows `[v_i | e_i]`: reducing `[t | 0]`
/// leaves `[0 | -coeffs]` exactly when `t` is in the span.
pub struct LinearExpressor {
    field: PrimeField,
    ambient: usize,
    ngens: usize,
    basis: SubspaceBasis,
}

impl LinearExpressor {
    pub fn new(field: PrimeField, ambient: usize, gens: &[Vec<u64>]) -> Self {
        let mut rows = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            assert_eq!(g.len(), ambient);
            let mut row = vec![0u64; ambient + gens.len()];
            row[..ambient].copy_from_slice(g);
            row[ambient + i] = 1;
            rows.push(row);
        }
        LinearExpressor {
            field,
            ambient,
            ngens: gens.len(),
            basis: SubspaceBasis::from_rows(field, ambient + gens.len(), rows),
        }
    }

    /// Coefficients c with `sum c_i v_i = target`, if solvable.
    pub fn express(&self, target: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(target.len(), self.ambient);
        let f = self.field;
        let mut v = vec![0u64; self.ambient + self.ngens];
        v[..self.ambient].copy_from_slice(target);
        let red = self.basis.reduce(&v);
        if red[..self.ambient].iter().any(|&x| x != 0) {
            return None;
        }
        Some(red[self.ambient..].iter().map(|&c| f.neg(c)).collect())
    }
}

/// Dense row-major matrix for the small operator computations (ad powers,
/// p-th matrix powers, trace forms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub field: PrimeField,
    pub data: Vec<u64>,
}

impl DenseMatrix {
    pub fn zero(field: PrimeField, nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            nrows,
            ncols,
            field,
            data: vec![0; nrows * ncols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = DenseMatrix::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.ncols + j] = self.field.reduce(v);
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: u64) {
        let f = self.field;
        let cell = &mut self.data[i * self.ncols + j];
        *cell = f.add(*cell, f.reduce(v));
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, other.nrows);
        let f = self.field;
        let mut out = DenseMatrix::zero(f, self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.ncols..(k + 1) * other.ncols];
                let out_row = &mut out.data[i * other.ncols..(i + 1) * other.ncols];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o = f.add(*o, f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> DenseMatrix {
        assert_eq!(self.nrows, self.ncols);
        let mut acc = DenseMatrix::identity(self.field, self.nrows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.ncols);
        let f = self.field;
        (0..self.nrows)
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.ncols {
                    acc = f.add(acc, f.mul(self.at(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            field: f,
            data,
        }
    }

    pub fn scale(&self, c: u64) -> DenseMatrix {
        let f = self.field;
        let c = f.reduce(c);
        DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            field: f,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn trace_of_product(&self, other: &DenseMatrix) -> u64 {
        assert_eq!(self.ncols, other.nrows);
        assert_eq!(self.nrows, other.ncols);
        let f = self.field;
        let mut acc = 0;
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                acc = f.add(acc, f.mul(self.at(i, j), other.at(j, i)));
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let rows = (0..self.nrows)
            .map(|i| {
                (0..self.ncols)
                    .filter_map(|j| {
                        let v = self.at(i, j);
                        (v != 0).then_some((j as u32, v))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            field: self.field,
            rows,
        }
    }
}

/// Sparse-vector sum `a + c*b`.
pub fn sparse_axpy(field: PrimeField, a: &SparseVec, c: u64, b: &SparseVec) -> SparseVec {
    let c = field.reduce(c);
    if c == 0 {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                let v = field.add(va, field.mul(c, vb));
                if v != 0 {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                out.push((ca, va));
                i += 1;
            }
            (Some(_), Some(&(cb, vb))) => {
                let v = field.mul(c, vb);
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (Some(&(ca, va)), None) => {
                out.push((ca, va));
                i += 1;
            }
            (None, Some(&(cb, vb))) => {
                let v = field.mul(c, vb);
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Oracle: enumerate all of F_p^n and test membership by matrix action.
    fn kernel_by_enumeration(m: &SparseMatrix) -> Vec<Vec<u64>> {
        let p = m.field.p();
        let n = m.ncols;
        let total = p.pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut v = vec![0u64; n];
            let mut c = code;
            for slot in v.iter_mut() {
                *slot = c % p;
                c /= p;
            }
            if m.apply(&v).iter().all(|&x| x == 0) {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn nullspace_rank_one_example() {
        let f = fp(5);
        let m = SparseMatrix::from_dense(f, &[vec![1, 2], vec![2, 4]]);
        let ker = m.nullspace();
        assert_eq!(ker.dim(), 1);
        // Spans the same line as (3, 1); canonical representative is (1, 2).
        assert!(ker.contains(&[3, 1]));
        assert_eq!(ker.rows(), &[vec![1, 2]]);

        let all = kernel_by_enumeration(&m);
        assert_eq!(all.len(), 5); // q^(dim kernel)
        for v in all {
            assert!(ker.contains(&v));
        }
    }

    #[test]
    fn nullspace_matches_enumeration_small() {
        let cases: Vec<(u64, Vec<Vec<u64>>)> = vec![
            (5, vec![vec![1, 2, 0], vec![0, 1, 4], vec![1, 3, 4]]),
            (3, vec![vec![1, 1, 1, 1], vec![2, 1, 0, 1]]),
            (2, vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]]),
            (7, vec![vec![0, 0], vec![0, 0]]),
        ];
        for (p, rows) in cases {
            let f = fp(p);
            let m = SparseMatrix::from_dense(f, &rows);
            let ker = m.nullspace();
            let all = kernel_by_enumeration(&m);
            assert_eq!(
                all.len() as u64,
                p.pow(ker.dim() as u32),
                "kernel size p={p}"
            );
            for v in &all {
                assert!(ker.contains(v));
            }
        }
    }

    #[test]
    fn identity_has_trivial_kernel_and_full_rank() {
        let f = fp(7);
        let m = DenseMatrix::identity(f, 6).to_sparse();
        assert_eq!(m.rank(), 6);
        assert_eq!(m.nullspace().dim(), 0);
    }

    #[test]
    fn rref_is_canonical_under_row_permutation() {
        let f = fp(5);
        let rows = vec![
            vec![2, 1, 0, 3],
            vec![1, 1, 1, 1],
            vec![0, 4, 2, 0],
            vec![3, 2, 1, 4],
        ];
        let base = SubspaceBasis::from_rows(f, 4, rows.clone());
        let mut perm = rows;
        perm.reverse();
        perm.swap(0, 1);
        let other = SubspaceBasis::from_rows(f, 4, perm);
        assert_eq!(base, other);
    }

    #[test]
    fn zassenhaus_intersection_matches_enumeration() {
        let f = fp(3);
        let a = SubspaceBasis::from_rows(f, 3, vec![vec![1, 0, 1], vec![0, 1, 1]]);
        let b = SubspaceBasis::from_rows(f, 3, vec![vec![1, 1, 2], vec![0, 0, 1]]);
        let cap = a.intersect(&b);
        // Brute force: all 27 vectors.
        let mut count = 0;
        for x in 0..3u64 {
            for y in 0..3u64 {
                for z in 0..3u64 {
                    let v = vec![x, y, z];
                    let inside = a.contains(&v) && b.contains(&v);
                    assert_eq!(inside, cap.contains(&v), "{v:?}");
                    if inside {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 3u64.pow(cap.dim() as u32));
    }

    #[test]
    fn grassmann_dimension_formula() {
        let f = fp(5);
        let a = SubspaceBasis::from_rows(f, 4, vec![vec![1, 2, 0, 0], vec![0, 0, 1, 1]]);
        let b = SubspaceBasis::from_rows(f, 4, vec![vec![1, 2, 1, 1], vec![0, 1, 0, 3]]);
        assert_eq!(
            a.sum(&b).dim() + a.intersect(&b).dim(),
            a.dim() + b.dim()
        );
    }

    fn arb_matrix(p: u64, nrows: usize, ncols: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
        prop::collection::vec(prop::collection::vec(0..p, ncols), nrows)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_is_transpose_invariant(rows in arb_matrix(5, 6, 4)) {
            let m = SparseMatrix::from_dense(fp(5), &rows);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_plus_nullity_is_ncols(rows in arb_matrix(5, 5, 5)) {
            let m = SparseMatrix::from_dense(fp(5), &rows);
            prop_assert_eq!(m.rank() + m.nullspace().dim(), m.ncols);
        }

        #[test]
        fn kernel_vectors_are_killed(rows in arb_matrix(7, 4, 6)) {
            let m = SparseMatrix::from_dense(fp(7), &rows);
            let ker = m.nullspace();
            for v in ker.rows() {
                prop_assert!(m.apply(v).iter().all(|&x| x == 0));
            }
        }

        /// Modular law: U <= W implies U + (V /\ W) = (U + V) /\ W.
        #[test]
        fn modular_law(ugen in arb_matrix(5, 2, 5),
                       vgen in arb_matrix(5, 2, 5),
                       wextra in arb_matrix(5, 1, 5)) {
            let f = fp(5);
            let u = SubspaceBasis::from_rows(f, 5, ugen);
            let v = SubspaceBasis::from_rows(f, 5, vgen);
            let mut wrows: Vec<Vec<u64>> = u.rows().to_vec();
            wrows.extend(wextra);
            let w = SubspaceBasis::from_rows(f, 5, wrows);
            prop_assert!(u.is_subspace_of(&w));
            let lhs = u.sum(&v.intersect(&w));
            let rhs = u.sum(&v).intersect(&w);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn insert_is_order_independent(rows in arb_matrix(5, 5, 4), seed in 0u64..1000) {
            let f = fp(5);
            let fwd = SubspaceBasis::from_rows(f, 4, rows.clone());
            let mut shuffled = rows;
            // Cheap deterministic shuffle.
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(fwd, SubspaceBasis::from_rows(f, 4, shuffled));
        }

        #[test]
        fn matrix_pow_matches_iterated_mul(rows in arb_matrix(5, 3, 3), e in 0u64..6) {
            let f = fp(5);
            let dense = DenseMatrix {
                nrows: 3, ncols: 3, field: f,
                data: rows.into_iter().flatten().map(|x| f.reduce(x)).collect(),
            };
            let mut acc = DenseMatrix::identity(f, 3);
            for _ in 0..e { acc = acc.mul(&dense); }
            prop_assert_eq!(dense.pow(e), acc);
        }
    }
}
