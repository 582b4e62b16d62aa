//! Lie algebras over `F_p` given by structure constants.
//!
//! Brackets are stored for basis pairs `i < j` only; the other half is filled
//! in by antisymmetry, so antisymmetry and `[x, x] = 0` hold by construction
//! and verification reduces to the Jacobi scan.

use crate::field::PrimeField;
use crate::linalg::{DenseMatrix, SparseMatrix, SparseVec, SubspaceBasis};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    field: PrimeField,
    dim: usize,
    labels: Vec<String>,
    /// `pairs[i * dim + j]` holds `[e_i, e_j]` for `i < j`; other slots empty.
    pairs: Vec<SparseVec>,
}

impl LieAlgebra {
    /// Build from explicit `i < j` structure constants. Coefficients must be
    /// reduced; rows must be sorted sparse vectors.
    pub fn new(
        field: PrimeField,
        labels: Vec<String>,
        brackets: Vec<((usize, usize), SparseVec)>,
    ) -> Result<Self> {
        let dim = labels.len();
        let mut pairs = vec![SparseVec::new(); dim * dim];
        for ((i, j), row) in brackets {
            if i >= j || j >= dim {
                return Err(Error::Antisymmetry { i, j });
            }
            for &(k, v) in &row {
                if k as usize >= dim || v == 0 || v >= field.p() {
                    return Err(Error::BadParameter(format!(
                        "bracket [{i},{j}] has bad entry ({k}, {v})"
                    )));
                }
            }
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            pairs[i * dim + j] = row;
        }
        Ok(LieAlgebra {
            field,
            dim,
            labels,
            pairs,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// `[e_i, e_j]` with the sign handled for either orientation.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => SparseVec::new(),
            Less => self.pairs[i * self.dim + j].clone(),
            Greater => {
                let f = self.field;
                self.pairs[j * self.dim + i]
                    .iter()
                    .map(|&(k, v)| (k, f.neg(v)))
                    .collect()
            }
        }
    }

    /// Raw stored row for `i < j` (no clone), for hot loops.
    #[inline]
    pub fn pair_row(&self, i: usize, j: usize) -> &SparseVec {
        debug_assert!(i < j);
        &self.pairs[i * self.dim + j]
    }

    /// `[x, y]` for dense vectors.
    pub fn bracket(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut out = vec![0u64; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 || i == j {
                    continue;
                }
                let c = f.mul(xi, yj);
                if i < j {
                    for &(k, v) in &self.pairs[i * self.dim + j] {
                        out[k as usize] = f.add(out[k as usize], f.mul(c, v));
                    }
                } else {
                    for &(k, v) in &self.pairs[j * self.dim + i] {
                        out[k as usize] = f.sub(out[k as usize], f.mul(c, v));
                    }
                }
            }
        }
        out
    }

    /// `[e_i, v]` for a dense vector, written into a fresh vector.
    pub fn ad_basis_apply(&self, i: usize, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut out = vec![0u64; self.dim];
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0 || j == i {
                continue;
            }
            if i < j {
                for &(k, val) in &self.pairs[i * self.dim + j] {
                    out[k as usize] = f.add(out[k as usize], f.mul(vj, val));
                }
            } else {
                for &(k, val) in &self.pairs[j * self.dim + i] {
                    out[k as usize] = f.sub(out[k as usize], f.mul(vj, val));
                }
            }
        }
        out
    }

    /// Dense matrix of `ad(x): v -> [x, v]`.
    pub fn ad_of_vector(&self, x: &[u64]) -> DenseMatrix {
        let f = self.field;
        let mut m = DenseMatrix::zero(f, self.dim, self.dim);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let row = self.bracket_basis(i, j);
                for &(k, v) in &row {
                    m.add_at(k as usize, j, f.mul(xi, v));
                }
            }
        }
        m
    }

    pub fn ad_basis_matrix(&self, i: usize) -> DenseMatrix {
        let mut x = vec![0u64; self.dim];
        x[i] = 1;
        self.ad_of_vector(&x)
    }

    /// Full Jacobi scan over basis triples, in parallel. Reports the first
    /// offending triple in index order.
    pub fn verify_lie(&self) -> Result<()> {
        let n = self.dim;
        let triples: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let bad = triples
            .par_iter()
            .find_map_first(|&(i, j)| {
                for k in (j + 1)..n {
                    if let Some(nonzero) = self.jacobi_defect(i, j, k) {
                        return Some((i, j, k, nonzero));
                    }
                }
                None
            });
        match bad {
            None => Ok(()),
            Some((i, j, k, nonzero)) => Err(Error::Jacobi { i, j, k, nonzero }),
        }
    }

    /// Nonzero count of `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]`,
    /// or None when the identity holds.
    fn jacobi_defect(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let f = self.field;
        let mut acc = vec![0u64; self.dim];
        let add_term = |outer: usize, inner: &SparseVec, acc: &mut Vec<u64>| {
            for &(m, v) in inner {
                let m = m as usize;
                if m == outer {
                    continue;
                }
                let (lo, hi, flip) = if outer < m {
                    (outer, m, false)
                } else {
                    (m, outer, true)
                };
                for &(t, w) in &self.pairs[lo * self.dim + hi] {
                    let c = f.mul(v, w);
                    let c = if flip { f.neg(c) } else { c };
                    acc[t as usize] = f.add(acc[t as usize], c);
                }
            }
        };
        let jk = self.pair_row(j, k).clone();
        add_term(i, &jk, &mut acc);
        let ij = self.pair_row(i, j).clone();
        add_term(k, &ij, &mut acc);
        // [e_j, [e_k, e_i]] = -[e_j, [e_i, e_k]]
        let ik: SparseVec = self
            .pair_row(i, k)
            .iter()
            .map(|&(m, v)| (m, f.neg(v)))
            .collect();
        add_term(j, &ik, &mut acc);
        let nonzero = acc.iter().filter(|&&x| x != 0).count();
        (nonzero != 0).then_some(nonzero)
    }

    pub fn is_abelian(&self) -> bool {
        self.pairs.iter().all(|r| r.is_empty())
    }

    /// Span of all brackets `[x, y]`, x in `a`, y in `b`.
    pub fn bracket_span(&self, a: &SubspaceBasis, b: &SubspaceBasis) -> SubspaceBasis {
        let mut out = SubspaceBasis::empty(self.field, self.dim);
        for x in a.rows() {
            for y in b.rows() {
                out.insert(&self.bracket(x, y));
            }
        }
        out
    }

    /// Derived series `L >= [L,L] >= [[L,L],[L,L]] >= ...` until it repeats.
    /// The final entry is the stable term.
    pub fn derived_series(&self) -> Vec<SubspaceBasis> {
        let mut series = vec![SubspaceBasis::full(self.field, self.dim)];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_span(last, last);
            if next.dim() == last.dim() {
                break;
            }
            series.push(next);
        }
        series
    }

    pub fn center(&self) -> SubspaceBasis {
        // Rows indexed by (j, k): sum_i x_i [e_i, e_j]_k = 0.
        let f = self.field;
        let mut rows: Vec<SparseVec> = Vec::new();
        for j in 0..self.dim {
            let mut cols: Vec<SparseVec> = vec![SparseVec::new(); self.dim];
            for i in 0..self.dim {
                if i == j {
                    continue;
                }
                let br = self.bracket_basis(i, j);
                for &(k, v) in &br {
                    cols[k as usize].push((i as u32, v));
                }
            }
            rows.extend(cols.into_iter().filter(|r| !r.is_empty()));
        }
        let m = SparseMatrix::from_rows(f, self.dim, rows);
        m.nullspace()
    }

    /// Smallest ideal containing `seed`.
    pub fn ideal_spin(&self, seed: &[u64]) -> Result<SubspaceBasis> {
        if seed.iter().all(|&x| x == 0) {
            return Err(Error::ZeroSeed);
        }
        let mut span = SubspaceBasis::empty(self.field, self.dim);
        let mut queue: Vec<Vec<u64>> = Vec::new();
        if span.insert(seed) {
            queue.push(seed.to_vec());
        }
        while let Some(v) = queue.pop() {
            for i in 0..self.dim {
                let w = self.ad_basis_apply(i, &v);
                if span.insert(&w) {
                    queue.push(w);
                    if span.dim() == self.dim {
                        return Ok(span);
                    }
                }
            }
        }
        Ok(span)
    }

    /// Simplicity of the algebra, i.e. irreducibility of the adjoint module
    /// plus nonabelianness.
    ///
    /// Fast sound rejections first (abelian, nonzero center, a basis seed
    /// spinning to a proper ideal), then a randomized Norton-style
    /// irreducibility certificate: find theta in the enveloping algebra of
    /// ad(L) and an eigenvalue with one-dimensional kernel; if the kernel
    /// vector spins to the whole space and the transpose kernel vector spins
    /// to the whole dual space, no proper nonzero submodule exists. Reducible
    /// outcomes always come with an explicit proper ideal, so a wrong answer
    /// is never returned; exhausted retries surface as `Inconclusive`.
    pub fn is_simple(&self, seed: u64) -> Result<bool> {
        if self.dim == 0 || self.is_abelian() {
            return Ok(false);
        }
        if self.center().dim() > 0 {
            return Ok(false);
        }
        for i in 0..self.dim {
            let mut e = vec![0u64; self.dim];
            e[i] = 1;
            if self.ideal_spin(&e)?.dim() < self.dim {
                return Ok(false);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let attempts = 24;
        for _ in 0..attempts {
            match self.norton_attempt(&mut rng) {
                Some(answer) => return Ok(answer),
                None => continue,
            }
        }
        Err(Error::Inconclusive {
            attempts,
            context: "no enveloping-algebra element with a 1-dimensional eigenspace found".into(),
        })
    }

    fn norton_attempt(&self, rng: &mut ChaCha8Rng) -> Option<bool> {
        let f = self.field;
        let n = self.dim;
        // Random element of the enveloping algebra: a quadratic word in two
        // dense ad elements. Dense factors make the spectrum behave like that
        // of a random matrix, so small eigenvalue kernels show up quickly.
        let dense = |rng: &mut ChaCha8Rng| -> Vec<u64> {
            (0..n).map(|_| rng.gen_range(0..f.p())).collect()
        };
        let a = self.ad_of_vector(&dense(rng));
        let b = self.ad_of_vector(&dense(rng));
        let mut theta = a.mul(&b);
        theta = theta.add(&a.scale(rng.gen_range(0..f.p())));
        theta = theta.add(&b.scale(rng.gen_range(0..f.p())));

        let mut candidates: Vec<(u64, SubspaceBasis)> = Vec::new();
        for lambda in f.elements() {
            let mut shifted = theta.clone();
            for i in 0..n {
                shifted.set(i, i, f.sub(shifted.at(i, i), lambda));
            }
            let ker = shifted.to_sparse().nullspace();
            if ker.dim() > 0 {
                candidates.push((lambda, ker));
            }
        }
        candidates.sort_by_key(|(_, k)| k.dim());
        for (lambda, ker) in &candidates {
            // A kernel vector generating a proper ideal certifies reducibility
            // regardless of the kernel dimension.
            for v in ker.rows() {
                if self.ideal_spin(v).ok()?.dim() < n {
                    return Some(false);
                }
            }
            // Norton's criterion needs every line of the kernel to spin full,
            // not just a basis, so large kernels are skipped as too costly.
            if ker.dim() > 4 {
                continue;
            }
            let lines = kernel_lines(f, ker.rows());
            if lines.len() > 400 {
                continue;
            }
            if lines
                .iter()
                .any(|v| self.ideal_spin(v).map(|s| s.dim() < n).unwrap_or(true))
            {
                return Some(false);
            }
            // Transpose module: spin one kernel line of theta^T under the
            // ad(e_i)^T. If every submodule misses ker(theta), it sits inside
            // the image of theta, whose annihilator contains ker(theta^T); a
            // full transpose spin rules that out, a proper one is itself an
            // invariant subspace annihilating a proper submodule.
            let mut shifted_t = theta.clone();
            for i in 0..n {
                shifted_t.set(i, i, f.sub(shifted_t.at(i, i), *lambda));
            }
            let t_sparse = shifted_t.to_sparse().transpose();
            let ker_t = t_sparse.nullspace();
            debug_assert_eq!(ker_t.dim(), ker.dim());
            let w = &ker_t.rows()[0];
            let mut span = SubspaceBasis::empty(f, n);
            let mut queue = vec![w.clone()];
            span.insert(w);
            let ads_t: Vec<SparseMatrix> = (0..n)
                .map(|i| self.ad_basis_matrix(i).to_sparse().transpose())
                .collect();
            while let Some(v) = queue.pop() {
                for at in &ads_t {
                    let u = at.apply(&v);
                    if span.insert(&u) {
                        queue.push(u);
                    }
                }
                if span.dim() == n {
                    break;
                }
            }
            if span.dim() < n {
                return Some(false);
            }
            // Every kernel line spun full and the dual spun full.
            return Some(true);
        }
        None
    }

    /// Killing form matrix `k(e_i, e_j) = tr(ad e_i . ad e_j)`.
    pub fn killing_form(&self) -> DenseMatrix {
        let f = self.field;
        let n = self.dim;
        // Sparse entry lists (k, j, v) meaning ad_i[k][j] = v.
        let sparse_ads: Vec<Vec<(u32, u32, u64)>> = (0..n)
            .map(|i| {
                let mut entries = Vec::new();
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for &(k, v) in &self.bracket_basis(i, j) {
                        entries.push((k, j as u32, v));
                    }
                }
                entries
            })
            .collect();
        let mut km = DenseMatrix::zero(f, n, n);
        for i in 0..n {
            let dense_i = self.ad_basis_matrix(i);
            for j in i..n {
                let mut acc = 0u64;
                for &(k, col, v) in &sparse_ads[j] {
                    // tr(A_i A_j) = sum over entries A_j[k][col] * A_i[col][k]
                    acc = f.add(acc, f.mul(v, dense_i.at(col as usize, k as usize)));
                }
                km.set(i, j, acc);
                km.set(j, i, acc);
            }
        }
        km
    }

    pub fn killing_radical(&self) -> SubspaceBasis {
        self.killing_form().to_sparse().nullspace()
    }

    /// Simultaneous eigenspace grading for a commuting family of toral
    /// elements. The given basis must consist of joint eigenvectors; weights
    /// are eigenvalue tuples lifted to `[0, p)` with arithmetic mod p.
    pub fn torus_grading(&self, toral: &[Vec<u64>]) -> Result<Grading> {
        let f = self.field;
        let n = self.dim;
        for (a, ta) in toral.iter().enumerate() {
            for tb in toral.iter().skip(a + 1) {
                if self.bracket(ta, tb).iter().any(|&x| x != 0) {
                    return Err(Error::NotDiagonalizable {
                        label: format!("toral[{a}] does not commute with a later element"),
                    });
                }
            }
        }
        let mut weights = vec![vec![0i64; toral.len()]; n];
        for (t_idx, t) in toral.iter().enumerate() {
            let ad = self.ad_of_vector(t);
            // Diagonal on the given basis?
            let mut bad_basis = None;
            for j in 0..n {
                for k in 0..n {
                    if k != j && ad.at(k, j) != 0 {
                        bad_basis = Some(j);
                        break;
                    }
                }
                if bad_basis.is_some() {
                    break;
                }
            }
            if let Some(j) = bad_basis {
                // Distinguish "basis not homogeneous" from "not diagonalizable":
                // sum of eigenspace dimensions must reach n for the former.
                let mut total = 0;
                for lambda in f.elements() {
                    let mut shifted = ad.clone();
                    for i in 0..n {
                        shifted.set(i, i, f.sub(shifted.at(i, i), lambda));
                    }
                    total += shifted.to_sparse().nullspace().dim();
                }
                return if total == n {
                    Err(Error::InhomogeneousBasis { index: j })
                } else {
                    Err(Error::NotDiagonalizable {
                        label: format!("toral[{t_idx}]"),
                    })
                };
            }
            for j in 0..n {
                weights[j][t_idx] = ad.at(j, j) as i64;
            }
        }
        let grading = Grading {
            weights,
            modulus: Some(f.p()),
        };
        grading.verify(self)?;
        Ok(grading)
    }

    /// The restriction of the bracket to a subalgebra, as a standalone
    /// algebra, together with the inclusion (rows of `basis`).
    pub fn subalgebra(&self, basis: &SubspaceBasis) -> Result<LieAlgebra> {
        let d = basis.dim();
        let mut brackets = Vec::new();
        for r in 0..d {
            for s in (r + 1)..d {
                let br = self.bracket(&basis.rows()[r], &basis.rows()[s]);
                let coords = basis.coordinates(&br).ok_or(Error::NotInSubspace {
                    context: "subspace is not closed under the bracket".into(),
                })?;
                let row: SparseVec = coords
                    .iter()
                    .enumerate()
                    .filter_map(|(k, &v)| (v != 0).then_some((k as u32, v)))
                    .collect();
                if !row.is_empty() {
                    brackets.push(((r, s), row));
                }
            }
        }
        let labels = (0..d)
            .map(|r| {
                let row = &basis.rows()[r];
                let pivot = basis.pivots()[r];
                let terms = row.iter().filter(|&&v| v != 0).count();
                if terms == 1 {
                    self.labels[pivot].clone()
                } else {
                    format!("{}+..", self.labels[pivot])
                }
            })
            .collect();
        LieAlgebra::new(self.field, labels, brackets)
    }

    /// Subalgebra on a bracket-closed subspace of a graded algebra, carrying
    /// the grading along. The canonical basis of a graded subspace is
    /// automatically weight-homogeneous (any inhomogeneous reduced row would
    /// have a member of the subspace vanishing at every pivot column), so each
    /// row's weight is read off its support; a mixed-support row is reported
    /// as an error rather than silently regraded.
    pub fn subalgebra_graded(
        &self,
        grading: &Grading,
        basis: &SubspaceBasis,
    ) -> Result<(LieAlgebra, Grading)> {
        let mut weights = Vec::with_capacity(basis.dim());
        for (r, row) in basis.rows().iter().enumerate() {
            let mut weight: Option<Vec<i64>> = None;
            for (c, &v) in row.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                let w = grading.weight_of(c);
                match &weight {
                    None => weight = Some(w),
                    Some(prev) if *prev != w => {
                        return Err(Error::InhomogeneousBasis { index: r })
                    }
                    _ => {}
                }
            }
            weights.push(weight.expect("canonical basis rows are nonzero"));
        }
        let sub = self.subalgebra(basis)?;
        let sub_grading = Grading {
            weights,
            modulus: grading.modulus,
        };
        sub_grading.verify(&sub)?;
        Ok((sub, sub_grading))
    }

    /// Quotient by an ideal; coordinates on the quotient are the non-pivot
    /// columns of the ideal's echelon basis.
    pub fn quotient(&self, ideal: &SubspaceBasis) -> Result<(LieAlgebra, QuotientMap)> {
        // Ideal check.
        for v in ideal.rows() {
            for i in 0..self.dim {
                let w = self.ad_basis_apply(i, v);
                if !ideal.contains(&w) {
                    return Err(Error::NotInSubspace {
                        context: format!("not an ideal: ad(e_{i}) escapes"),
                    });
                }
            }
        }
        let free = ideal.free_columns();
        let qmap = QuotientMap {
            ideal: ideal.clone(),
            free: free.clone(),
        };
        let d = free.len();
        let mut brackets = Vec::new();
        for r in 0..d {
            for s in (r + 1)..d {
                let x = qmap.lift_unit(self.dim, r);
                let y = qmap.lift_unit(self.dim, s);
                let br = self.bracket(&x, &y);
                let coords = qmap.project(&br);
                let row: SparseVec = coords
                    .iter()
                    .enumerate()
                    .filter_map(|(k, &v)| (v != 0).then_some((k as u32, v)))
                    .collect();
                if !row.is_empty() {
                    brackets.push(((r, s), row));
                }
            }
        }
        let labels = free.iter().map(|&c| format!("[{}]", self.labels[c])).collect();
        Ok((LieAlgebra::new(self.field, labels, brackets)?, qmap))
    }
}

/// One representative per line (1-dimensional subspace) of the span of
/// `rows`: coefficient tuples whose first nonzero entry is 1.
fn kernel_lines(f: PrimeField, rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let d = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    for lead in 0..d {
        let count = f.p().pow((d - lead - 1) as u32);
        for code in 0..count {
            let mut coeffs = vec![0u64; d];
            coeffs[lead] = 1;
            let mut rem = code;
            for c in coeffs.iter_mut().skip(lead + 1) {
                *c = rem % f.p();
                rem /= f.p();
            }
            let mut v = vec![0u64; n];
            for (c, row) in coeffs.iter().zip(rows) {
                if *c != 0 {
                    for (slot, &x) in row.iter().enumerate() {
                        v[slot] = f.add(v[slot], f.mul(*c, x));
                    }
                }
            }
            out.push(v);
        }
    }
    out
}

/// Projection data for a quotient `L / I`.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub ideal: SubspaceBasis,
    /// Ambient coordinates representing the quotient basis.
    pub free: Vec<usize>,
}

impl QuotientMap {
    /// Reduce mod the ideal, then read off the free coordinates.
    pub fn project(&self, v: &[u64]) -> Vec<u64> {
        let red = self.ideal.reduce(v);
        self.free.iter().map(|&c| red[c]).collect()
    }

    /// Ambient representative of the r-th quotient basis vector.
    pub fn lift_unit(&self, ambient: usize, r: usize) -> Vec<u64> {
        let mut v = vec![0u64; ambient];
        v[self.free[r]] = 1;
        v
    }

    pub fn lift(&self, ambient: usize, coords: &[u64]) -> Vec<u64> {
        let mut v = vec![0u64; ambient];
        for (r, &c) in coords.iter().enumerate() {
            v[self.free[r]] = c;
        }
        v
    }
}

/// Weight assignment per basis index. `modulus: None` means exact integer
/// weights; `Some(p)` means weight arithmetic mod p (torus gradings).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub weights: Vec<Vec<i64>>,
    pub modulus: Option<u64>,
}

impl Grading {
    pub fn rank(&self) -> usize {
        self.weights.first().map_or(0, |w| w.len())
    }

    /// Canonical form of a weight tuple under the grading's arithmetic.
    pub fn canon(&self, w: &[i64]) -> Vec<i64> {
        match self.modulus {
            None => w.to_vec(),
            Some(p) => w.iter().map(|&x| x.rem_euclid(p as i64)).collect(),
        }
    }

    pub fn weight_of(&self, i: usize) -> Vec<i64> {
        self.canon(&self.weights[i])
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let sum: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x + y).collect();
        self.canon(&sum)
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let diff: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        self.canon(&diff)
    }

    pub fn scale(&self, c: i64, a: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().map(|&x| c * x).collect();
        self.canon(&s)
    }

    /// Check `[L_a, L_b] <= L_{a+b}` on every stored bracket.
    pub fn verify(&self, alg: &LieAlgebra) -> Result<()> {
        if self.weights.len() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: alg.dim(),
                got: self.weights.len(),
                context: "grading weight count".into(),
            });
        }
        for i in 0..alg.dim() {
            for j in (i + 1)..alg.dim() {
                let target = self.add(&self.weight_of(i), &self.weight_of(j));
                for &(k, _) in alg.pair_row(i, j) {
                    if self.weight_of(k as usize) != target {
                        return Err(Error::GradingViolated {
                            i,
                            j,
                            wa: format!("{:?}", self.weight_of(i)),
                            wb: format!("{:?}", self.weight_of(j)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Group basis indices by weight class. Returns (class of each index,
    /// class representative tuples).
    pub fn classes(&self) -> (Vec<usize>, Vec<Vec<i64>>) {
        let mut reps: Vec<Vec<i64>> = Vec::new();
        let mut map = std::collections::HashMap::new();
        let mut class_of = Vec::with_capacity(self.weights.len());
        for w in &self.weights {
            let c = self.canon(w);
            let id = *map.entry(c.clone()).or_insert_with(|| {
                reps.push(c.clone());
                reps.len() - 1
            });
            class_of.push(id);
        }
        (class_of, reps)
    }
}

/// Deterministic permutation of a Lie algebra's basis, for invariance tests.
pub fn permute_basis(alg: &LieAlgebra, perm: &[usize]) -> Result<LieAlgebra> {
    let n = alg.dim();
    assert_eq!(perm.len(), n);
    let f = alg.field();
    // perm[new_index] = old_index
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let labels = perm.iter().map(|&o| alg.label(o).to_string()).collect();
    let mut brackets = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let (i, j) = (perm[a], perm[b]);
            let row = alg.bracket_basis(i, j);
            let mut mapped: SparseVec = row
                .iter()
                .map(|&(k, v)| (inv[k as usize] as u32, f.reduce(v)))
                .collect();
            mapped.sort_by_key(|e| e.0);
            if !mapped.is_empty() {
                brackets.push(((a, b), mapped));
            }
        }
    }
    LieAlgebra::new(f, labels, brackets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// sl(2) with basis (e, h, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
    pub(crate) fn sl2(p: u64) -> LieAlgebra {
        let f = fp(p);
        LieAlgebra::new(
            f,
            vec!["e".into(), "h".into(), "f".into()],
            vec![
                ((0, 1), vec![(0, f.reduce_i64(-2))]), // [e,h] = -2e
                ((0, 2), vec![(1, 1)]),                // [e,f] = h
                ((1, 2), vec![(2, f.reduce_i64(-2))]), // [h,f] = -2f
            ],
        )
        .unwrap()
    }

    /// Heisenberg: [x, y] = z, z central.
    fn heisenberg(p: u64) -> LieAlgebra {
        LieAlgebra::new(
            fp(p),
            vec!["x".into(), "y".into(), "z".into()],
            vec![((0, 1), vec![(2, 1)])],
        )
        .unwrap()
    }

    #[test]
    fn sl2_passes_jacobi_and_is_simple() {
        let l = sl2(5);
        l.verify_lie().unwrap();
        assert_eq!(l.center().dim(), 0);
        assert!(l.is_simple(7).unwrap());
        let series = l.derived_series();
        assert_eq!(series.len(), 1, "perfect algebra stabilizes immediately");
    }

    #[test]
    fn heisenberg_center_and_solvability() {
        let l = heisenberg(5);
        l.verify_lie().unwrap();
        assert_eq!(l.center().dim(), 1);
        assert!(l.center().contains(&[0, 0, 1]));
        let series = l.derived_series();
        let dims: Vec<usize> = series.iter().map(|s| s.dim()).collect();
        assert_eq!(dims, vec![3, 1, 0]);
        assert!(!l.is_simple(1).unwrap());
    }

    #[test]
    fn two_dim_nonabelian_not_simple() {
        // [x, y] = y: the span of y is a proper ideal.
        let l = LieAlgebra::new(
            fp(5),
            vec!["x".into(), "y".into()],
            vec![((0, 1), vec![(1, 1)])],
        )
        .unwrap();
        l.verify_lie().unwrap();
        assert!(!l.is_simple(3).unwrap());
        let ideal = l.ideal_spin(&[0, 1]).unwrap();
        assert_eq!(ideal.dim(), 1);
    }

    #[test]
    fn jacobi_violation_detected() {
        // [e1,e2] = e3, [e1,e3] = e2, [e2,e3] = e2: fails Jacobi.
        let l = LieAlgebra::new(
            fp(5),
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ((0, 1), vec![(2, 1)]),
                ((0, 2), vec![(1, 1)]),
                ((1, 2), vec![(1, 1)]),
            ],
        )
        .unwrap();
        match l.verify_lie() {
            Err(Error::Jacobi { .. }) => {}
            other => panic!("expected Jacobi error, got {other:?}"),
        }
    }

    #[test]
    fn ideal_spin_rejects_zero_seed() {
        let l = sl2(5);
        assert!(matches!(l.ideal_spin(&[0, 0, 0]), Err(Error::ZeroSeed)));
    }

    #[test]
    fn sl2_killing_form_nondegenerate() {
        let l = sl2(5);
        assert_eq!(l.killing_radical().dim(), 0);
        // k(h, h) = 8, k(e, f) = 4 for sl(2).
        let km = l.killing_form();
        assert_eq!(km.at(1, 1), fp(5).reduce(8));
        assert_eq!(km.at(0, 2), fp(5).reduce(4));
    }

    #[test]
    fn sl2_torus_grading() {
        let l = sl2(5);
        let g = l.torus_grading(&[vec![0, 1, 0]]).unwrap();
        assert_eq!(g.weight_of(0), vec![2]); // [h, e] = 2e
        assert_eq!(g.weight_of(1), vec![0]);
        assert_eq!(g.weight_of(2), vec![3]); // -2 mod 5
        assert_eq!(g.modulus, Some(5));
    }

    #[test]
    fn torus_grading_rejects_non_eigenbasis() {
        let l = sl2(5);
        // e is nilpotent: ad(e) is not diagonal on this basis.
        match l.torus_grading(&[vec![1, 0, 0]]) {
            Err(Error::NotDiagonalizable { .. }) | Err(Error::InhomogeneousBasis { .. }) => {}
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn quotient_of_heisenberg_by_center_is_abelian() {
        let l = heisenberg(5);
        let (q, _) = l.quotient(&l.center()).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(q.is_abelian());
    }

    #[test]
    fn grading_violation_reported() {
        let l = sl2(5);
        let g = Grading {
            weights: vec![vec![1], vec![1], vec![1]],
            modulus: Some(5),
        };
        assert!(matches!(g.verify(&l), Err(Error::GradingViolated { .. })));
    }

    #[test]
    fn permuted_basis_still_verifies() {
        let l = sl2(7);
        let p = permute_basis(&l, &[2, 0, 1]).unwrap();
        p.verify_lie().unwrap();
        assert_eq!(p.label(0), "f");
        assert!(p.is_simple(11).unwrap());
    }
}
