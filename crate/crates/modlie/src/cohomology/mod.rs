//! Adjoint cohomology in degrees one and two, ordinary and restricted.
//!
//! Everything is computed from structure constants by exact linear algebra.
//! For a graded algebra the cochain spaces split into weight classes that the
//! differentials respect, so each class yields an independent, much smaller
//! linear system; passing no grading solves the single full-size system. The
//! restricted degree-two space is computed as the space of first-order
//! deformations of the bracket together with the p-map over k[t]/(t^2): a
//! pair (f, omega) subject to the cocycle condition on f and the derived
//! compatibility condition tying omega to f, modulo the pairs induced by a
//! basis change id + t phi.
//!
//! Constraint rows hugely outnumber the rank they contribute, so each class
//! solver watches for a rank plateau, takes a kernel snapshot, and checks the
//! remaining rows against the snapshot by dot products instead of feeding
//! them through elimination. A row orthogonal to the kernel already lies in
//! the accumulated row space and is redundant; a violating row drops the
//! solver back into elimination. The result is exact either way.

pub mod dual;

use crate::field::PrimeField;
use crate::lie::{Grading, LieAlgebra};
use crate::linalg::{Eliminator, SparseVec, SubspaceBasis};
use crate::restricted::RestrictedLieAlgebra;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

/// Dimension of an ordinary cohomology space, with its per-class breakdown.
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub degree: u8,
    pub dimension: usize,
    /// Classes with nonzero contribution, sorted by weight tuple.
    pub by_class: Vec<(Vec<i64>, usize)>,
}

/// Dimension of the restricted degree-two space plus explicit generators.
#[derive(Clone, Debug)]
pub struct RestrictedH2Report {
    pub dimension: usize,
    pub by_class: Vec<(Vec<i64>, usize)>,
    pub generators: Vec<DeformationRep>,
}

/// A first-order deformation: a two-cochain `f` and a p-map shift `omega`,
/// both supported in one weight class.
#[derive(Clone, Debug)]
pub struct DeformationRep {
    pub class: Vec<i64>,
    /// Rows (i, j, f(e_i, e_j)) for i < j, sorted.
    pub two_cochain: Vec<(u32, u32, SparseVec)>,
    /// Rows (i, omega(e_i)), sorted.
    pub pmap_shift: Vec<(u32, SparseVec)>,
}

impl DeformationRep {
    /// f(e_i, e_j) as a dense vector, any orientation.
    pub fn cochain_at(&self, i: usize, j: usize, dim: usize, f: PrimeField) -> Vec<u64> {
        let mut out = vec![0u64; dim];
        if i == j {
            return out;
        }
        let (lo, hi, flip) = orient(i, j);
        if let Ok(pos) = self
            .two_cochain
            .binary_search_by_key(&(lo, hi), |r| (r.0, r.1))
        {
            for &(c, v) in &self.two_cochain[pos].2 {
                out[c as usize] = if flip { f.neg(v) } else { v };
            }
        }
        out
    }

    /// omega(e_i) as a dense vector.
    pub fn shift_at(&self, i: usize, dim: usize) -> Vec<u64> {
        let mut out = vec![0u64; dim];
        if let Ok(pos) = self.pmap_shift.binary_search_by_key(&(i as u32), |r| r.0) {
            for &(c, v) in &self.pmap_shift[pos].1 {
                out[c as usize] = v;
            }
        }
        out
    }
}

/// h1, h2 and restricted h2 of one algebra in a single bundle.
#[derive(Clone, Debug)]
pub struct DeformationSummary {
    pub h1: usize,
    pub h2: usize,
    pub h2_star: usize,
}

fn orient(a: usize, b: usize) -> (u32, u32, bool) {
    if a < b {
        (a as u32, b as u32, false)
    } else {
        (b as u32, a as u32, true)
    }
}

/// Sort accumulated (column, value) pushes and combine duplicates.
fn merge_entries(f: PrimeField, mut entries: Vec<(u32, u64)>) -> SparseVec {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out = SparseVec::with_capacity(entries.len());
    for (c, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = f.add(last.1, v),
            _ => out.push((c, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    out
}

/// Streaming rank engine for one weight class. Feeds rows into an
/// `Eliminator` until the rank stops moving, then switches to checking rows
/// against a kernel snapshot, which is an order of magnitude cheaper than
/// elimination and just as exact.
struct StreamSolver {
    f: PrimeField,
    ncols: usize,
    elim: Eliminator,
    stall: usize,
    stall_limit: usize,
    kernel: Option<Vec<Vec<u64>>>,
}

impl StreamSolver {
    fn new(f: PrimeField, ncols: usize) -> Self {
        StreamSolver {
            f,
            ncols,
            elim: Eliminator::new(f, ncols),
            stall: 0,
            stall_limit: (ncols / 8).max(24),
            kernel: None,
        }
    }

    /// Returns true once the rows span the whole column space, at which
    /// point the kernel is zero and no further rows are informative.
    fn feed(&mut self, row: SparseVec) -> bool {
        if row.is_empty() {
            return false;
        }
        if let Some(kernel) = &self.kernel {
            let clean = kernel.iter().all(|kv| {
                let mut dot = 0u64;
                for &(c, v) in &row {
                    dot = self.f.add(dot, self.f.mul(v, kv[c as usize]));
                }
                dot == 0
            });
            if clean {
                return false;
            }
            self.kernel = None;
        }
        let before = self.elim.rank();
        self.elim.add_row(row);
        let rank = self.elim.rank();
        if rank == self.ncols {
            return true;
        }
        if rank > before {
            self.stall = 0;
        } else {
            self.stall += 1;
            if self.stall >= self.stall_limit {
                self.kernel = Some(self.elim.kernel_snapshot().rows().to_vec());
                self.stall = 0;
            }
        }
        false
    }

    fn rank(&self) -> usize {
        self.elim.rank()
    }

    fn into_kernel(self) -> SubspaceBasis {
        self.elim.kernel()
    }
}

/// Shared precomputations: canonical weights, target lookup by weight, the
/// ad action indexed by output coordinate and by argument, and bracket
/// columns.
struct Setup<'a> {
    lie: &'a LieAlgebra,
    f: PrimeField,
    dim: usize,
    g: Grading,
    w: Vec<Vec<i64>>,
    /// weight -> basis indices with that weight.
    targets: BTreeMap<Vec<i64>, Vec<u32>>,
    /// adt[i][t] lists (u, c) with [e_i, e_u]_t = c.
    adt: Vec<Vec<Vec<(u32, u64)>>>,
    /// adcol[i][u] = [e_i, e_u] as a sparse vector.
    adcol: Vec<Vec<SparseVec>>,
    /// col[a] lists (i, j, c) with i < j and ([e_i, e_j])_a = c.
    col: Vec<Vec<(u32, u32, u64)>>,
}

impl<'a> Setup<'a> {
    fn new(lie: &'a LieAlgebra, grading: Option<&Grading>) -> Result<Setup<'a>> {
        let f = lie.field();
        if f.p() <= 3 {
            return Err(Error::UnsupportedPrime {
                p: f.p(),
                context: "cohomology of the small-characteristic families needs p >= 5".into(),
            });
        }
        let dim = lie.dim();
        let g = match grading {
            Some(g) => {
                g.verify(lie)?;
                g.clone()
            }
            None => Grading {
                weights: vec![Vec::new(); dim],
                modulus: None,
            },
        };
        let w: Vec<Vec<i64>> = (0..dim).map(|i| g.weight_of(i)).collect();
        let mut targets: BTreeMap<Vec<i64>, Vec<u32>> = BTreeMap::new();
        for (i, wi) in w.iter().enumerate() {
            targets.entry(wi.clone()).or_default().push(i as u32);
        }
        let mut adt: Vec<Vec<Vec<(u32, u64)>>> = vec![vec![Vec::new(); dim]; dim];
        let mut adcol: Vec<Vec<SparseVec>> = vec![vec![SparseVec::new(); dim]; dim];
        let mut col: Vec<Vec<(u32, u32, u64)>> = vec![Vec::new(); dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let row = lie.pair_row(i, j);
                if row.is_empty() {
                    continue;
                }
                for &(t, c) in row {
                    // [e_i, e_j]_t = c feeds both directions.
                    adt[i][t as usize].push((j as u32, c));
                    adt[j][t as usize].push((i as u32, f.neg(c)));
                    col[t as usize].push((i as u32, j as u32, c));
                }
                adcol[i][j] = row.to_vec();
                adcol[j][i] = row.iter().map(|&(t, c)| (t, f.neg(c))).collect();
            }
        }
        Ok(Setup {
            lie,
            f,
            dim,
            g,
            w,
            targets,
            adt,
            adcol,
            col,
        })
    }

    fn targets_at(&self, weight: &[i64]) -> &[u32] {
        self.targets.get(weight).map_or(&[], |v| &v[..])
    }

    /// Sparse [e_i, v] for sparse v.
    fn ad_sparse(&self, i: usize, v: &[(u32, u64)]) -> SparseVec {
        let mut acc = Vec::new();
        for &(u, val) in v {
            for &(t, c) in &self.adcol[i][u as usize] {
                acc.push((t, self.f.mul(c, val)));
            }
        }
        merge_entries(self.f, acc)
    }
}

/// Ordered pairs (a, b) grouped by canon(w_b - w_a): the classes of the rank
/// one maps e_a -> e_b spanning C^1.
fn unit_map_buckets(s: &Setup) -> HashMap<Vec<i64>, Vec<(u32, u32)>> {
    let mut buckets: HashMap<Vec<i64>, Vec<(u32, u32)>> = HashMap::new();
    for a in 0..s.dim {
        for b in 0..s.dim {
            let key = s.g.sub(&s.w[b], &s.w[a]);
            buckets.entry(key).or_default().push((a as u32, b as u32));
        }
    }
    buckets
}

fn pair_sum_buckets(s: &Setup) -> HashMap<Vec<i64>, Vec<(u32, u32)>> {
    let mut buckets: HashMap<Vec<i64>, Vec<(u32, u32)>> = HashMap::new();
    for i in 0..s.dim {
        for j in (i + 1)..s.dim {
            let key = s.g.add(&s.w[i], &s.w[j]);
            buckets.entry(key).or_default().push((i as u32, j as u32));
        }
    }
    buckets
}

fn triple_sum_buckets(s: &Setup) -> HashMap<Vec<i64>, Vec<(u32, u32, u32)>> {
    let mut buckets: HashMap<Vec<i64>, Vec<(u32, u32, u32)>> = HashMap::new();
    for i in 0..s.dim {
        for j in (i + 1)..s.dim {
            let wij = s.g.add(&s.w[i], &s.w[j]);
            for l in (j + 1)..s.dim {
                let key = s.g.add(&wij, &s.w[l]);
                buckets
                    .entry(key)
                    .or_default()
                    .push((i as u32, j as u32, l as u32));
            }
        }
    }
    buckets
}

/// First cohomology with adjoint coefficients: outer derivations.
pub fn h1(lie: &LieAlgebra, grading: Option<&Grading>) -> Result<CohomologyReport> {
    let s = Setup::new(lie, grading)?;
    // Unknowns phi(e_i) = sum_m phi_{i,m} e_m in class w_m - w_i.
    let mut members: BTreeMap<Vec<i64>, Vec<(u32, u32)>> = BTreeMap::new();
    for i in 0..s.dim {
        for m in 0..s.dim {
            let key = s.g.sub(&s.w[m], &s.w[i]);
            members.entry(key).or_default().push((i as u32, m as u32));
        }
    }
    let pair_buckets = pair_sum_buckets(&s);
    let classes: Vec<Vec<i64>> = members.keys().cloned().collect();
    let per_class: Vec<(Vec<i64>, usize)> = classes
        .par_iter()
        .map(|class| {
            let mem = &members[class];
            let dim_c = h1_class(&s, class, mem, &pair_buckets);
            (class.clone(), dim_c)
        })
        .collect();
    let mut by_class: Vec<(Vec<i64>, usize)> =
        per_class.into_iter().filter(|(_, d)| *d > 0).collect();
    by_class.sort();
    let dimension = by_class.iter().map(|(_, d)| d).sum();
    Ok(CohomologyReport {
        degree: 1,
        dimension,
        by_class,
    })
}

fn h1_class(
    s: &Setup,
    class: &[i64],
    mem: &[(u32, u32)],
    pair_buckets: &HashMap<Vec<i64>, Vec<(u32, u32)>>,
) -> usize {
    let ncols = mem.len();
    let mut solver = StreamSolver::new(s.f, ncols);
    let local = |i: u32, m: u32| -> u32 {
        mem.binary_search(&(i, m))
            .expect("cocycle row leaves its weight class") as u32
    };
    'rows: for (tw, ts) in &s.targets {
        let wsum = s.g.sub(tw, class);
        let Some(pairs) = pair_buckets.get(&wsum) else {
            continue;
        };
        for &(i, j) in pairs {
            for &t in ts {
                let mut acc: Vec<(u32, u64)> = Vec::new();
                for &(u, c) in &s.adt[i as usize][t as usize] {
                    acc.push((local(j, u), c));
                }
                for &(u, c) in &s.adt[j as usize][t as usize] {
                    acc.push((local(i, u), s.f.neg(c)));
                }
                for &(sc, c) in s.lie.pair_row(i as usize, j as usize) {
                    acc.push((local(sc, t), s.f.neg(c)));
                }
                if solver.feed(merge_entries(s.f, acc)) {
                    break 'rows;
                }
            }
        }
    }
    let nullity = ncols - solver.rank();
    if nullity == 0 {
        return 0;
    }
    // Coboundaries d0(e_b): phi(e_i) = [e_i, e_b], living in class w_b.
    let mut cob = Eliminator::new(s.f, ncols);
    for &b in s.targets_at(class) {
        let mut acc: Vec<(u32, u64)> = Vec::new();
        for i in 0..s.dim {
            for &(t, c) in &s.adcol[i][b as usize] {
                acc.push((local(i as u32, t), c));
            }
        }
        cob.add_row(merge_entries(s.f, acc));
    }
    nullity - cob.rank()
}

/// Second cohomology with adjoint coefficients: infinitesimal deformations of
/// the bracket alone.
pub fn h2(lie: &LieAlgebra, grading: Option<&Grading>) -> Result<CohomologyReport> {
    let s = Setup::new(lie, grading)?;
    let two = TwoCochainSpace::build(&s, None)?;
    let report = two.solve(&s, false)?;
    Ok(CohomologyReport {
        degree: 2,
        dimension: report.dimension,
        by_class: report.by_class,
    })
}

/// Restricted second cohomology: first-order deformations of bracket and
/// p-map jointly, with one explicit generator per dimension.
pub fn restricted_h2(
    alg: &RestrictedLieAlgebra,
    grading: Option<&Grading>,
) -> Result<RestrictedH2Report> {
    let s = Setup::new(&alg.lie, grading)?;
    let two = TwoCochainSpace::build(&s, Some(alg))?;
    two.solve(&s, true)
}

/// h1, h2 and h2* of a restricted algebra under one grading.
pub fn deformation_summary(
    alg: &RestrictedLieAlgebra,
    grading: Option<&Grading>,
) -> Result<DeformationSummary> {
    Ok(DeformationSummary {
        h1: h1(&alg.lie, grading)?.dimension,
        h2: h2(&alg.lie, grading)?.dimension,
        h2_star: restricted_h2(alg, grading)?.dimension,
    })
}

/// The blocked unknown space for degree-two solves: cochain entries
/// f(e_i, e_j)_k in class w_k - w_i - w_j, and for the restricted problem
/// also shift entries omega(e_i)_m in class w_m - p w_i.
struct TwoCochainSpace<'r> {
    f_members: BTreeMap<Vec<i64>, Vec<(u32, u32, u32)>>,
    o_members: BTreeMap<Vec<i64>, Vec<(u32, u32)>>,
    triple_buckets: HashMap<Vec<i64>, Vec<(u32, u32, u32)>>,
    unit_buckets: HashMap<Vec<i64>, Vec<(u32, u32)>>,
    restricted: Option<&'r RestrictedLieAlgebra>,
    /// Sparse p-map images, when restricted.
    psparse: Vec<SparseVec>,
}

impl<'r> TwoCochainSpace<'r> {
    fn build(s: &Setup, restricted: Option<&'r RestrictedLieAlgebra>) -> Result<Self> {
        let mut f_members: BTreeMap<Vec<i64>, Vec<(u32, u32, u32)>> = BTreeMap::new();
        for i in 0..s.dim {
            for j in (i + 1)..s.dim {
                let wij = s.g.add(&s.w[i], &s.w[j]);
                for k in 0..s.dim {
                    let key = s.g.sub(&s.w[k], &wij);
                    f_members
                        .entry(key)
                        .or_default()
                        .push((i as u32, j as u32, k as u32));
                }
            }
        }
        let mut o_members: BTreeMap<Vec<i64>, Vec<(u32, u32)>> = BTreeMap::new();
        let mut psparse = Vec::new();
        if let Some(rl) = restricted {
            let p = s.f.p() as i64;
            for i in 0..s.dim {
                let pw = s.g.scale(p, &s.w[i]);
                let image: SparseVec = rl
                    .pmap
                    .image(i)
                    .iter()
                    .enumerate()
                    .filter_map(|(l, &v)| (v != 0).then_some((l as u32, v)))
                    .collect();
                for &(l, _) in &image {
                    if s.w[l as usize] != pw {
                        return Err(Error::BadParameter(format!(
                            "p-map image of basis vector {i} is not homogeneous \
                             of weight p * w_{i}, so the weight blocking does not apply"
                        )));
                    }
                }
                psparse.push(image);
                for m in 0..s.dim {
                    let key = s.g.sub(&s.w[m], &pw);
                    o_members
                        .entry(key)
                        .or_default()
                        .push((i as u32, m as u32));
                }
            }
        }
        Ok(TwoCochainSpace {
            f_members,
            o_members,
            triple_buckets: triple_sum_buckets(s),
            unit_buckets: unit_map_buckets(s),
            restricted,
            psparse,
        })
    }

    fn solve(&self, s: &Setup, want_generators: bool) -> Result<RestrictedH2Report> {
        let mut classes: Vec<Vec<i64>> = self.f_members.keys().cloned().collect();
        for k in self.o_members.keys() {
            if !self.f_members.contains_key(k) {
                classes.push(k.clone());
            }
        }
        classes.sort();
        let empty_f: Vec<(u32, u32, u32)> = Vec::new();
        let empty_o: Vec<(u32, u32)> = Vec::new();
        let solved: Vec<(Vec<i64>, usize, Vec<DeformationRep>)> = classes
            .par_iter()
            .map(|class| {
                let f_mem = self.f_members.get(class).unwrap_or(&empty_f);
                let o_mem = self.o_members.get(class).unwrap_or(&empty_o);
                let (d, reps) = self.solve_class(s, class, f_mem, o_mem, want_generators);
                (class.clone(), d, reps)
            })
            .collect();
        let mut by_class = Vec::new();
        let mut generators = Vec::new();
        let mut dimension = 0;
        for (class, d, reps) in solved {
            if d > 0 {
                dimension += d;
                by_class.push((class, d));
                generators.extend(reps);
            }
        }
        Ok(RestrictedH2Report {
            dimension,
            by_class,
            generators,
        })
    }

    fn solve_class(
        &self,
        s: &Setup,
        class: &[i64],
        f_mem: &[(u32, u32, u32)],
        o_mem: &[(u32, u32)],
        want_generators: bool,
    ) -> (usize, Vec<DeformationRep>) {
        let nf = f_mem.len();
        let ncols = nf + o_mem.len();
        if ncols == 0 {
            return (0, Vec::new());
        }
        let mut solver = StreamSolver::new(s.f, ncols);
        // Cocycle rows, streamed until the block saturates.
        'cocycle: for (tw, ts) in &s.targets {
            let wsum = s.g.sub(tw, class);
            let Some(triples) = self.triple_buckets.get(&wsum) else {
                continue;
            };
            for &(i, j, l) in triples {
                for &t in ts {
                    if solver.feed(self.d2_row(s, f_mem, i, j, l, t)) {
                        break 'cocycle;
                    }
                }
            }
        }
        // Compatibility rows tying omega to f.
        if self.restricted.is_some() && solver.rank() < ncols {
            let p = s.f.p() as i64;
            'compat: for i in 0..s.dim {
                let base = s.g.add(class, &s.g.scale(p, &s.w[i]));
                for j in 0..s.dim {
                    let tw = s.g.add(&base, &s.w[j]);
                    for &t in s.targets_at(&tw) {
                        if solver.feed(self.b_row(s, f_mem, o_mem, i, j, t as usize)) {
                            break 'compat;
                        }
                    }
                }
            }
        }
        let rank = solver.rank();
        let nullity = ncols - rank;
        if nullity == 0 {
            return (0, Vec::new());
        }
        // Transport: images of the unit maps phi(e_a) = e_b of this class.
        let mut transport = Eliminator::new(s.f, ncols);
        let mut transport_rows: Vec<SparseVec> = Vec::new();
        if let Some(pairs) = self.unit_buckets.get(class) {
            for &(a, b) in pairs {
                let row = self.transport_row(s, f_mem, o_mem, a as usize, b as usize);
                if want_generators {
                    transport_rows.push(row.clone());
                }
                transport.add_row(row);
            }
        }
        let dim_c = nullity - transport.rank();
        if !want_generators || dim_c == 0 {
            return (dim_c, Vec::new());
        }
        // Kernel vectors independent modulo the transport span are the
        // generators.
        let kernel = solver.into_kernel();
        let mut span = SubspaceBasis::empty(s.f, ncols);
        for row in &transport_rows {
            let mut dense = vec![0u64; ncols];
            for &(c, v) in row {
                dense[c as usize] = v;
            }
            span.insert(&dense);
        }
        let mut reps = Vec::new();
        for v in kernel.rows() {
            if reps.len() == dim_c {
                break;
            }
            if span.insert(v) {
                reps.push(self.to_rep(class, f_mem, o_mem, v));
            }
        }
        debug_assert_eq!(reps.len(), dim_c);
        (dim_c, reps)
    }

    /// Row of d2 f = 0 at the triple (i < j < l) and output coordinate t,
    /// in the local coordinates of the class.
    fn d2_row(
        &self,
        s: &Setup,
        f_mem: &[(u32, u32, u32)],
        i: u32,
        j: u32,
        l: u32,
        t: u32,
    ) -> SparseVec {
        let mut acc: Vec<(u32, u64)> = Vec::new();
        let mut put = |a: u32, b: u32, k: u32, c: u64| {
            if c == 0 || a == b {
                return;
            }
            let (lo, hi, flip) = orient(a as usize, b as usize);
            let idx = f_mem
                .binary_search(&(lo, hi, k))
                .expect("cocycle row leaves its weight class") as u32;
            acc.push((idx, if flip { s.f.neg(c) } else { c }));
        };
        // [e_i, f(e_j, e_l)] - [e_j, f(e_i, e_l)] + [e_l, f(e_i, e_j)]
        for &(u, c) in &s.adt[i as usize][t as usize] {
            put(j, l, u, c);
        }
        for &(u, c) in &s.adt[j as usize][t as usize] {
            put(i, l, u, s.f.neg(c));
        }
        for &(u, c) in &s.adt[l as usize][t as usize] {
            put(i, j, u, c);
        }
        // - f([e_i,e_j], e_l) + f([e_i,e_l], e_j) - f([e_j,e_l], e_i)
        for &(sc, c) in s.lie.pair_row(i as usize, j as usize) {
            put(sc, l, t, s.f.neg(c));
        }
        for &(sc, c) in s.lie.pair_row(i as usize, l as usize) {
            put(sc, j, t, c);
        }
        for &(sc, c) in s.lie.pair_row(j as usize, l as usize) {
            put(sc, i, t, s.f.neg(c));
        }
        merge_entries(s.f, acc)
    }

    /// Row of the p-map compatibility condition for basis element i, test
    /// vector e_j and output coordinate t:
    ///
    ///   [omega(e_i), e_j] + f(e_i^[p], e_j)
    ///     = sum_{k=0}^{p-1} (ad e_i)^k f(e_i, (ad e_i)^{p-1-k} e_j).
    fn b_row(
        &self,
        s: &Setup,
        f_mem: &[(u32, u32, u32)],
        o_mem: &[(u32, u32)],
        i: usize,
        j: usize,
        t: usize,
    ) -> SparseVec {
        let nf = f_mem.len();
        let f = s.f;
        let p = f.p() as usize;
        let mut acc: Vec<(u32, u64)> = Vec::new();
        let mut put_f = |a: usize, b: usize, k: u32, c: u64| {
            if c == 0 || a == b {
                return;
            }
            let (lo, hi, flip) = orient(a, b);
            let idx = f_mem
                .binary_search(&(lo, hi, k))
                .expect("compatibility row leaves its weight class")
                as u32;
            acc.push((idx, if flip { f.neg(c) } else { c }));
        };
        // f(e_i^[p], e_j)_t.
        for &(l, pc) in &self.psparse[i] {
            put_f(l as usize, j, t as u32, pc);
        }
        // Right-hand side, subtracted. v runs through (ad e_i)^s e_j and r
        // through the t-th row of (ad e_i)^k.
        let mut v_pow: Vec<SparseVec> = Vec::with_capacity(p);
        v_pow.push(vec![(j as u32, 1)]);
        for _ in 1..p {
            let next = s.ad_sparse(i, v_pow.last().unwrap());
            v_pow.push(next);
        }
        let mut r: SparseVec = vec![(t as u32, 1)];
        for k in 0..p {
            for &(sv_idx, sv) in &v_pow[p - 1 - k] {
                if sv_idx as usize == i {
                    continue;
                }
                for &(u, rv) in &r {
                    put_f(i, sv_idx as usize, u, f.neg(f.mul(sv, rv)));
                }
            }
            if k + 1 < p {
                // r <- r . ad(e_i): new[u] = sum_s r[s] (ad e_i)[s][u].
                let mut next: Vec<(u32, u64)> = Vec::new();
                for &(sidx, rv) in &r {
                    for &(u, c) in &s.adt[i][sidx as usize] {
                        next.push((u, f.mul(rv, c)));
                    }
                }
                r = merge_entries(f, next);
            }
        }
        let mut row = merge_entries(f, acc);
        // [omega(e_i), e_j]_t: coefficient [e_u, e_j]_t on omega(e_i)_u.
        // Entries are keyed by distinct u, so no merging is needed; adt
        // stores [e_j, e_u]_t = c, so [e_u, e_j]_t = -c.
        let mut o_entries: Vec<(u32, u64)> = Vec::new();
        for &(u, c) in &s.adt[j][t] {
            let idx = o_mem
                .binary_search(&(i as u32, u))
                .expect("compatibility row leaves its weight class");
            o_entries.push(((nf + idx) as u32, f.neg(c)));
        }
        o_entries.sort_unstable_by_key(|e| e.0);
        row.extend(o_entries);
        row
    }

    /// Image of the unit map phi(e_a) = e_b under the transport action:
    /// f gains d1(phi), omega(e_i) gains (ad e_i)^{p-1}(phi e_i) - phi(e_i^[p]).
    fn transport_row(
        &self,
        s: &Setup,
        f_mem: &[(u32, u32, u32)],
        o_mem: &[(u32, u32)],
        a: usize,
        b: usize,
    ) -> SparseVec {
        let f = s.f;
        let nf = f_mem.len();
        let mut acc: Vec<(u32, u64)> = Vec::new();
        let mut put_f = |aa: usize, bb: usize, k: u32, c: u64| {
            if c == 0 || aa == bb {
                return;
            }
            let (lo, hi, flip) = orient(aa, bb);
            let idx = f_mem
                .binary_search(&(lo, hi, k))
                .expect("transport row leaves its weight class") as u32;
            acc.push((idx, if flip { f.neg(c) } else { c }));
        };
        // d1(phi)(x, y) = [x, phi y] - [y, phi x] - phi([x, y]).
        for i in 0..s.dim {
            if i == a {
                continue;
            }
            for &(t, c) in &s.adcol[i][b] {
                // Pair (i, a) if i < a (term +[e_i, e_b]), pair (a, i)
                // otherwise (term -[e_i, e_b]).
                if i < a {
                    put_f(i, a, t, c);
                } else {
                    put_f(a, i, t, f.neg(c));
                }
            }
        }
        for &(i, j, c) in &s.col[a] {
            put_f(i as usize, j as usize, b as u32, f.neg(c));
        }
        let mut row = merge_entries(f, acc);
        if self.restricted.is_some() {
            let p = s.f.p();
            let mut o_acc: Vec<((u32, u32), u64)> = Vec::new();
            // (ad e_a)^{p-1}(e_b) lands in omega(e_a).
            let mut v: SparseVec = vec![(b as u32, 1)];
            for _ in 0..(p - 1) {
                v = s.ad_sparse(a, &v);
            }
            for (t, c) in v {
                o_acc.push(((a as u32, t), c));
            }
            // -phi(e_i^[p]) = -(e_i^[p])_a e_b in omega(e_i).
            for i in 0..s.dim {
                if let Ok(pos) = self.psparse[i].binary_search_by_key(&(a as u32), |e| e.0) {
                    o_acc.push(((i as u32, b as u32), f.neg(self.psparse[i][pos].1)));
                }
            }
            let mut o_entries: Vec<(u32, u64)> = Vec::new();
            for ((i, m), c) in o_acc {
                let idx = o_mem
                    .binary_search(&(i, m))
                    .expect("transport row leaves its weight class");
                o_entries.push(((nf + idx) as u32, c));
            }
            row.extend(merge_entries(f, o_entries));
        }
        row
    }

    fn to_rep(
        &self,
        class: &[i64],
        f_mem: &[(u32, u32, u32)],
        o_mem: &[(u32, u32)],
        v: &[u64],
    ) -> DeformationRep {
        let nf = f_mem.len();
        let mut cochain: BTreeMap<(u32, u32), SparseVec> = BTreeMap::new();
        let mut shift: BTreeMap<u32, SparseVec> = BTreeMap::new();
        for (idx, &val) in v.iter().enumerate() {
            if val == 0 {
                continue;
            }
            if idx < nf {
                let (i, j, k) = f_mem[idx];
                cochain.entry((i, j)).or_default().push((k, val));
            } else {
                let (i, m) = o_mem[idx - nf];
                shift.entry(i).or_default().push((m, val));
            }
        }
        let two_cochain = cochain
            .into_iter()
            .map(|((i, j), mut row)| {
                row.sort_unstable_by_key(|e| e.0);
                (i, j, row)
            })
            .collect();
        let pmap_shift = shift
            .into_iter()
            .map(|(i, mut row)| {
                row.sort_unstable_by_key(|e| e.0);
                (i, row)
            })
            .collect();
        DeformationRep {
            class: class.to_vec(),
            two_cochain,
            pmap_shift,
        }
    }
}

/// d1(phi)(e_i, e_j) evaluated directly from a full map phi, for tests and
/// cross-checks against the blocked assembly.
pub fn d1_eval(lie: &LieAlgebra, phi: &[Vec<u64>], i: usize, j: usize) -> Vec<u64> {
    let f = lie.field();
    let mut out = lie.ad_basis_apply(i, &phi[j]);
    let term2 = lie.ad_basis_apply(j, &phi[i]);
    for (o, t) in out.iter_mut().zip(&term2) {
        *o = f.sub(*o, *t);
    }
    for &(sc, c) in &lie.bracket_basis(i, j) {
        for (o, pv) in out.iter_mut().zip(&phi[sc as usize]) {
            *o = f.sub(*o, f.mul(c, *pv));
        }
    }
    out
}

/// d2(f)(e_i, e_j, e_l) evaluated directly; `f` is defined on ordered pairs.
pub fn d2_eval(
    lie: &LieAlgebra,
    two: &dyn Fn(usize, usize) -> Vec<u64>,
    i: usize,
    j: usize,
    l: usize,
) -> Vec<u64> {
    let f = lie.field();
    let fl = |a: usize, b: usize| -> Vec<u64> {
        if a == b {
            return vec![0; lie.dim()];
        }
        let (lo, hi, flip) = orient(a, b);
        let mut v = two(lo as usize, hi as usize);
        if flip {
            for x in v.iter_mut() {
                *x = f.neg(*x);
            }
        }
        v
    };
    let mut out = lie.ad_basis_apply(i, &fl(j, l));
    let t2 = lie.ad_basis_apply(j, &fl(i, l));
    let t3 = lie.ad_basis_apply(l, &fl(i, j));
    for ((o, a), b) in out.iter_mut().zip(&t2).zip(&t3) {
        *o = f.add(f.sub(*o, *a), *b);
    }
    // - f([ij], l) + f([il], j) - f([jl], i)
    let mut add_contract = |x: usize, y: usize, z: usize, sign_neg: bool| {
        for &(sc, c) in &lie.bracket_basis(x, y) {
            let v = fl(sc as usize, z);
            for (o, t) in out.iter_mut().zip(&v) {
                let term = f.mul(c, *t);
                *o = if sign_neg { f.sub(*o, term) } else { f.add(*o, term) };
            }
        }
    };
    add_contract(i, j, l, true);
    add_contract(i, l, j, false);
    add_contract(j, l, i, true);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{hamiltonian, witt};
    use crate::classical::{sl, toral_indices};

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn sl_graded(n: usize, p: u64) -> (RestrictedLieAlgebra, Grading) {
        let alg = sl(n, fp(p)).unwrap();
        let toral: Vec<Vec<u64>> = toral_indices(&alg.lie)
            .into_iter()
            .map(|i| {
                let mut v = vec![0u64; alg.lie.dim()];
                v[i] = 1;
                v
            })
            .collect();
        let g = alg.lie.torus_grading(&toral).unwrap();
        (alg, g)
    }

    #[test]
    fn blocked_equals_unblocked_on_the_smallest_witt_algebra() {
        let w = witt(1, &[1], fp(5)).unwrap();
        let rl = w.restricted().unwrap();
        let blocked = restricted_h2(&rl, Some(&w.grading)).unwrap();
        let unblocked = restricted_h2(&rl, None).unwrap();
        assert_eq!(blocked.dimension, unblocked.dimension);
        assert_eq!(blocked.dimension, 1);
        let h2b = h2(&w.lie, Some(&w.grading)).unwrap();
        let h2u = h2(&w.lie, None).unwrap();
        assert_eq!(h2b.dimension, h2u.dimension);
        let h1b = h1(&w.lie, Some(&w.grading)).unwrap();
        let h1u = h1(&w.lie, None).unwrap();
        assert_eq!(h1b.dimension, h1u.dimension);
    }

    #[test]
    fn witt_restricted_h2_is_one_at_both_small_primes() {
        for p in [5u64, 7] {
            let w = witt(1, &[1], fp(p)).unwrap();
            let rl = w.restricted().unwrap();
            let rep = restricted_h2(&rl, Some(&w.grading)).unwrap();
            assert_eq!(rep.dimension, 1, "p = {p}");
            assert_eq!(rep.generators.len(), 1);
            dual::verify_first_order(&rl, &rep.generators[0], 4, 1001).unwrap();
        }
    }

    #[test]
    fn witt_of_rank_two_has_two_dimensional_restricted_h2() {
        let w = witt(2, &[1, 1], fp(5)).unwrap();
        let rl = w.restricted().unwrap();
        let rep = restricted_h2(&rl, Some(&w.grading)).unwrap();
        assert_eq!(rep.dimension, 2);
        // One class per variable, at weight -p times the variable weight.
        let classes: Vec<Vec<i64>> = rep.by_class.iter().map(|(c, _)| c.clone()).collect();
        assert_eq!(classes, vec![vec![-5, 0], vec![0, -5]]);
        for g in &rep.generators {
            dual::verify_first_order(&rl, g, 2, 900).unwrap();
        }
    }

    #[test]
    fn special_linear_algebras_are_restricted_rigid() {
        for p in [5u64, 7] {
            for n in [2usize, 3] {
                let (alg, g) = sl_graded(n, p);
                let rep = restricted_h2(&alg, Some(&g)).unwrap();
                assert_eq!(rep.dimension, 0, "sl({n}) at p = {p}");
            }
        }
    }

    #[test]
    fn sl2_blocked_and_unblocked_agree_everywhere() {
        let (alg, g) = sl_graded(2, 5);
        for (b, u) in [
            (
                h1(&alg.lie, Some(&g)).unwrap().dimension,
                h1(&alg.lie, None).unwrap().dimension,
            ),
            (
                h2(&alg.lie, Some(&g)).unwrap().dimension,
                h2(&alg.lie, None).unwrap().dimension,
            ),
            (
                restricted_h2(&alg, Some(&g)).unwrap().dimension,
                restricted_h2(&alg, None).unwrap().dimension,
            ),
        ] {
            assert_eq!(b, u);
        }
    }

    #[test]
    fn hamiltonian_h21_restricted_h2_is_three() {
        let h = hamiltonian(2, &[1, 1], fp(5)).unwrap();
        let rl = h.restricted().unwrap();
        let rep = restricted_h2(&rl, Some(&h.grading)).unwrap();
        assert_eq!(rep.dimension, 3);
        assert_eq!(rep.generators.len(), 3);
        for g in &rep.generators {
            dual::verify_first_order(&rl, g, 3, 77).unwrap();
        }
    }

    #[test]
    fn gauge_images_are_honest_first_order_deformations() {
        // The transport of any phi must solve every constraint; run it
        // through the dual-number verifier.
        let w = witt(1, &[1], fp(5)).unwrap();
        let rl = w.restricted().unwrap();
        let f = fp(5);
        let dim = rl.lie.dim();
        let mut rng = 41u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 33) % 5
        };
        let phi: Vec<Vec<u64>> = (0..dim)
            .map(|_| (0..dim).map(|_| next()).collect())
            .collect();
        // f-part: d1(phi). omega-part: (ad e_i)^{p-1}(phi e_i) - phi(e_i^[p]).
        let mut two_cochain = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = d1_eval(&rl.lie, &phi, i, j);
                let row: SparseVec = v
                    .iter()
                    .enumerate()
                    .filter_map(|(k, &x)| (x != 0).then_some((k as u32, x)))
                    .collect();
                if !row.is_empty() {
                    two_cochain.push((i as u32, j as u32, row));
                }
            }
        }
        let mut pmap_shift = Vec::new();
        for i in 0..dim {
            let mut v = phi[i].clone();
            for _ in 0..(f.p() - 1) {
                v = rl.lie.ad_basis_apply(i, &v);
            }
            let image = rl.pmap.image(i);
            for b in 0..dim {
                let mut phi_of_image = 0u64;
                for (l, &c) in image.iter().enumerate() {
                    phi_of_image = f.add(phi_of_image, f.mul(c, phi[l][b]));
                }
                v[b] = f.sub(v[b], phi_of_image);
            }
            let row: SparseVec = v
                .iter()
                .enumerate()
                .filter_map(|(m, &x)| (x != 0).then_some((m as u32, x)))
                .collect();
            if !row.is_empty() {
                pmap_shift.push((i as u32, row));
            }
        }
        let rep = DeformationRep {
            class: Vec::new(),
            two_cochain,
            pmap_shift,
        };
        dual::verify_first_order(&rl, &rep, 4, 505).unwrap();
    }

    #[test]
    fn coboundaries_are_cocycles() {
        // d2 after d1 vanishes identically; checked on pseudo-random maps
        // over two algebras.
        for p in [5u64, 7] {
            let (alg, _) = sl_graded(3, p);
            let dim = alg.lie.dim();
            let mut rng = 9000 + p;
            let mut next = || {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (rng >> 33) % p
            };
            for _ in 0..3 {
                let phi: Vec<Vec<u64>> = (0..dim)
                    .map(|_| (0..dim).map(|_| next()).collect())
                    .collect();
                let lie = &alg.lie;
                let two = |a: usize, b: usize| d1_eval(lie, &phi, a, b);
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        for l in (j + 1)..dim {
                            let v = d2_eval(lie, &two, i, j, l);
                            assert!(v.iter().all(|&x| x == 0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_tiny_characteristic() {
        let alg = sl(2, PrimeField::new(3).unwrap());
        // sl(2) itself refuses p = 3 in this crate; build a by-hand algebra
        // to reach the cohomology check.
        assert!(alg.is_err());
        let f3 = PrimeField::new(3).unwrap();
        let lie = LieAlgebra::new(f3, vec!["a".into(), "b".into()], vec![]).unwrap();
        assert!(matches!(
            h1(&lie, None),
            Err(Error::UnsupportedPrime { .. })
        ));
    }

    #[test]
    fn exactness_inequalities_hold_on_the_small_families() {
        // dim h2* <= dim h2 <= dim h2* + dim L * dim h1.
        for (name, rl, g) in [
            {
                let w = witt(1, &[1], fp(5)).unwrap();
                ("W(1;1)", w.restricted().unwrap(), w.grading.clone())
            },
            {
                let (alg, g) = sl_graded(2, 5);
                ("sl(2)", alg, g)
            },
            {
                let (alg, g) = sl_graded(3, 5);
                ("sl(3)", alg, g)
            },
            {
                let h = hamiltonian(2, &[1, 1], fp(5)).unwrap();
                ("H(2;1)", h.restricted().unwrap(), h.grading.clone())
            },
        ] {
            let s = deformation_summary(&rl, Some(&g)).unwrap();
            assert!(s.h2_star <= s.h2, "{name}");
            assert!(s.h2 <= s.h2_star + rl.lie.dim() * s.h1, "{name}");
        }
    }
}
