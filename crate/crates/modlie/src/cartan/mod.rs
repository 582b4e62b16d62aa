//! Graded Lie algebras of Cartan type: the Witt-Jacobson family W(m;n) and
//! its form-annihilating subfamilies S, H, K, plus the characteristic-5
//! Melikian algebras and the explicit minimal p-envelopes.

pub mod divided;
pub mod forms;
mod melikian;

pub use melikian::melikian;

use crate::field::PrimeField;
use crate::lie::{Grading, LieAlgebra};
use crate::linalg::{LinearExpressor, SparseMatrix, SparseVec, SubspaceBasis};
use crate::restricted::{PMap, RestrictedLieAlgebra};
use crate::{Error, Result};
use divided::{DPElement, DividedPowers, SpecialDerivation};
use forms::{lie_derivative, DifferentialForm};

/// One of the graded Cartan-type constructions, with its natural grading and
/// (when the algebra is restricted, i.e. n = 1) its p-map.
pub struct CartanFamily {
    pub lie: LieAlgebra,
    pub grading: Grading,
    pub pmap: Option<PMap>,
    pub witt_embedding: Option<WittEmbedding>,
}

/// Realization inside W(m;n): the divided power context and each basis
/// vector's coordinates in the Witt basis.
pub struct WittEmbedding {
    pub ctx: DividedPowers,
    pub rows: Vec<Vec<u64>>,
}

impl CartanFamily {
    pub fn restricted(&self) -> Result<RestrictedLieAlgebra> {
        let pmap = self.pmap.clone().ok_or_else(|| {
            Error::BadParameter("algebra is not restricted (needs n = 1)".into())
        })?;
        RestrictedLieAlgebra::new(self.lie.clone(), pmap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShkFamily {
    Special,
    Hamiltonian,
    Contact,
}

/// Witt basis index: monomial-major, derivation index minor.
fn witt_index(ctx: &DividedPowers, mono: u32, i: usize) -> usize {
    mono as usize * ctx.vars() + i
}

fn witt_label(ctx: &DividedPowers, idx: usize) -> String {
    let m = ctx.vars();
    let exps = ctx.exps((idx / m) as u32);
    let tuple = exps
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("x^({})d{}", tuple, idx % m + 1)
}

/// Closed-form Witt bracket on basis vectors:
///
///   [x^(a) d_i, x^(b) d_j] = binom(a+b-e_i, a) x^(a+b-e_i) d_j
///                          - binom(a+b-e_j, b) x^(a+b-e_j) d_i,
///
/// with either term dropped when the shifted exponent leaves the truncation
/// range or its binomial vanishes.
fn witt_bracket_basis(ctx: &DividedPowers, a: u32, i: usize, b: u32, j: usize) -> SparseVec {
    let f = ctx.field();
    let mut out: SparseVec = Vec::with_capacity(2);
    let mut push = |target: usize, value: u64| {
        if value == 0 {
            return;
        }
        match out.iter_mut().find(|e| e.0 == target as u32) {
            Some(e) => {
                e.1 = f.add(e.1, value);
                if e.1 == 0 {
                    out.retain(|x| x.1 != 0);
                }
            }
            None => out.push((target as u32, value)),
        }
    };
    let mut eb = ctx.exps(b);
    if eb[i] > 0 {
        eb[i] -= 1;
        if let Some((mono, c)) = ctx.mul_basis(a, ctx.index(&eb)) {
            push(witt_index(ctx, mono, j), c);
        }
    }
    let mut ea = ctx.exps(a);
    if ea[j] > 0 {
        ea[j] -= 1;
        if let Some((mono, c)) = ctx.mul_basis(b, ctx.index(&ea)) {
            push(witt_index(ctx, mono, i), f.neg(c));
        }
    }
    out.sort_by_key(|e| e.0);
    out
}

/// Natural Z^m weights on the Witt basis: weight(x^(a) d_i) = a - e_i.
fn witt_weights(ctx: &DividedPowers) -> Vec<Vec<i64>> {
    let m = ctx.vars();
    (0..ctx.dim() * m)
        .map(|idx| {
            let exps = ctx.exps((idx / m) as u32);
            let i = idx % m;
            exps.iter()
                .enumerate()
                .map(|(t, &e)| e as i64 - i64::from(t == i))
                .collect()
        })
        .collect()
}

/// W(m;n), the derivation algebra side of O(m;n). Restricted (with the p-fold
/// composition p-map) exactly when every height is 1.
pub fn witt(m: usize, heights: &[u32], field: PrimeField) -> Result<CartanFamily> {
    if m == 0 || heights.len() != m {
        return Err(Error::BadParameter(
            "witt needs one height per variable".into(),
        ));
    }
    let ctx = DividedPowers::new(field, heights)?;
    let q = ctx.dim();
    let dim = q * m;
    let mut brackets = Vec::new();
    for idx_a in 0..dim {
        for idx_b in (idx_a + 1)..dim {
            let row = witt_bracket_basis(
                &ctx,
                (idx_a / m) as u32,
                idx_a % m,
                (idx_b / m) as u32,
                idx_b % m,
            );
            if !row.is_empty() {
                brackets.push(((idx_a, idx_b), row));
            }
        }
    }
    let labels = (0..dim).map(|i| witt_label(&ctx, i)).collect();
    let lie = LieAlgebra::new(field, labels, brackets)?;
    let grading = Grading {
        weights: witt_weights(&ctx),
        modulus: None,
    };
    let restricted = heights.iter().all(|&h| h == 1);
    let embedding: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            let mut v = vec![0u64; dim];
            v[i] = 1;
            v
        })
        .collect();
    let pmap = if restricted {
        Some(composition_pmap(&ctx, &embedding, None)?)
    } else {
        None
    };
    Ok(CartanFamily {
        lie,
        grading,
        pmap,
        witt_embedding: Some(WittEmbedding {
            ctx,
            rows: embedding,
        }),
    })
}

/// p-fold composition power of each basis derivation, expressed back in the
/// given basis. Valid when every derivation of O is special (n = 1), so that
/// D^p is determined by its values on the variables.
fn composition_pmap(
    ctx: &DividedPowers,
    basis_rows: &[Vec<u64>],
    expressor: Option<&LinearExpressor>,
) -> Result<PMap> {
    let f = ctx.field();
    let p = f.p();
    let m = ctx.vars();
    let own;
    let expr = match expressor {
        Some(e) => e,
        None => {
            own = LinearExpressor::new(f, ctx.dim() * m, basis_rows);
            &own
        }
    };
    let mut images = Vec::with_capacity(basis_rows.len());
    for row in basis_rows {
        let d = SpecialDerivation::from_witt_vec(ctx, row);
        let comps: Vec<DPElement> = (0..m)
            .map(|t| {
                let mut exps = vec![0u64; m];
                exps[t] = 1;
                let mut v = ctx.monomial(&exps);
                for _ in 0..p {
                    v = d.apply(ctx, &v);
                }
                v
            })
            .collect();
        let dp = SpecialDerivation { comps };
        let coords = expr
            .express(&dp.to_witt_vec(ctx))
            .ok_or(Error::NotInSubspace {
                context: "p-th composition power leaves the subalgebra".into(),
            })?;
        images.push(coords);
    }
    Ok(PMap { images })
}

/// Rows of the linear condition "L_D omega = 0" over Witt coordinates,
/// one row per (form component, monomial).
fn annihilator_rows(
    witt_alg: &CartanFamily,
    omega: &DifferentialForm,
) -> SparseMatrix {
    let emb = witt_alg.witt_embedding.as_ref().expect("witt family");
    let ctx = &emb.ctx;
    let dim = witt_alg.lie.dim();
    let mut per_eq: std::collections::BTreeMap<(Vec<u8>, u32), SparseVec> =
        std::collections::BTreeMap::new();
    for col in 0..dim {
        let d = SpecialDerivation::from_witt_vec(ctx, &emb.rows[col]);
        let ld = lie_derivative(ctx, &d, omega);
        for (key, coeff) in &ld.comps {
            for (&mono, &c) in coeff {
                per_eq
                    .entry((key.clone(), mono))
                    .or_default()
                    .push((col as u32, c));
            }
        }
    }
    SparseMatrix::from_rows(ctx.field(), dim, per_eq.into_values().collect())
}

/// Rows of the contact condition "L_D omega_K is an O-multiple of omega_K":
/// the multiplier is forced to be the dx_m component of L_D omega_K, and the
/// remaining components must match it.
fn contact_rows(witt_alg: &CartanFamily, omega_k: &DifferentialForm) -> SparseMatrix {
    let emb = witt_alg.witt_embedding.as_ref().expect("witt family");
    let ctx = &emb.ctx;
    let f = ctx.field();
    let m = ctx.vars();
    let last_key = vec![(m - 1) as u8];
    let dim = witt_alg.lie.dim();
    let mut per_eq: std::collections::BTreeMap<(Vec<u8>, u32), SparseVec> =
        std::collections::BTreeMap::new();
    for col in 0..dim {
        let d = SpecialDerivation::from_witt_vec(ctx, &emb.rows[col]);
        let ld = lie_derivative(ctx, &d, omega_k);
        let multiplier = ld.comps.get(&last_key).cloned().unwrap_or_default();
        let mut residual = ld;
        let scaled = omega_k.scaled_by(ctx, &multiplier);
        for (key, coeff) in &scaled.comps {
            let neg: DPElement = coeff.iter().map(|(&k, &v)| (k, f.neg(v))).collect();
            residual.add_term(ctx, key.clone(), &neg, 1);
        }
        debug_assert!(!residual.comps.contains_key(&last_key));
        for (key, coeff) in &residual.comps {
            for (&mono, &c) in coeff {
                per_eq
                    .entry((key.clone(), mono))
                    .or_default()
                    .push((col as u32, c));
            }
        }
    }
    SparseMatrix::from_rows(f, dim, per_eq.into_values().collect())
}

/// Carry a subspace of a graded algebra to a graded subalgebra and compose
/// the Witt-coordinate embedding.
fn graded_piece(
    lie: &LieAlgebra,
    grading: &Grading,
    subspace: &SubspaceBasis,
    embedding: &[Vec<u64>],
) -> Result<(LieAlgebra, Grading, Vec<Vec<u64>>)> {
    let (sub, sub_grading) = lie.subalgebra_graded(grading, subspace)?;
    let f = lie.field();
    let ambient = embedding.first().map_or(0, |r| r.len());
    let rows = subspace
        .rows()
        .iter()
        .map(|coords| {
            let mut acc = vec![0u64; ambient];
            for (c, &v) in coords.iter().enumerate() {
                if v != 0 {
                    for (slot, &e) in embedding[c].iter().enumerate() {
                        acc[slot] = f.add(acc[slot], f.mul(v, e));
                    }
                }
            }
            acc
        })
        .collect();
    Ok((sub, sub_grading, rows))
}

fn shk_core(
    family: ShkFamily,
    m: usize,
    heights: &[u32],
    field: PrimeField,
) -> Result<CartanFamily> {
    if field.p() <= 3 {
        return Err(Error::UnsupportedPrime {
            p: field.p(),
            context: "Cartan-type families are taken at p >= 5".into(),
        });
    }
    match family {
        ShkFamily::Special if m < 3 => {
            return Err(Error::BadParameter("S(m;n) requires m >= 3".into()))
        }
        ShkFamily::Hamiltonian if m < 2 || m % 2 != 0 => {
            return Err(Error::BadParameter("H(2r;n) requires even m >= 2".into()))
        }
        ShkFamily::Contact if m < 3 || m % 2 != 1 => {
            return Err(Error::BadParameter("K(2r+1;n) requires odd m >= 3".into()))
        }
        _ => {}
    }
    let w = witt(m, heights, field)?;
    let emb = w.witt_embedding.as_ref().expect("witt family");
    let ctx = emb.ctx.clone();
    let (system, base_grading, depth) = match family {
        ShkFamily::Special => {
            let keys: Vec<u8> = (0..m as u8).collect();
            let omega = DifferentialForm::basic(&ctx, &keys);
            (annihilator_rows(&w, &omega), w.grading.clone(), 1)
        }
        ShkFamily::Hamiltonian => {
            let omega = hamiltonian_form(&ctx, m / 2);
            (annihilator_rows(&w, &omega), w.grading.clone(), 2)
        }
        ShkFamily::Contact => {
            let r = (m - 1) / 2;
            let omega = contact_form(&ctx, r);
            (contact_rows(&w, &omega), contact_eta_grading(&ctx, r), 1)
        }
    };
    let subspace = system.nullspace();
    let (mut lie, mut grading, mut rows) =
        graded_piece(&w.lie, &base_grading, &subspace, &emb.rows)?;
    for _ in 0..depth {
        let full = SubspaceBasis::full(field, lie.dim());
        let derived = lie.bracket_span(&full, &full);
        let (l2, g2, r2) = graded_piece(&lie, &grading, &derived, &rows)?;
        lie = l2;
        grading = g2;
        rows = r2;
    }
    let pmap = if heights.iter().all(|&h| h == 1) {
        Some(composition_pmap(&ctx, &rows, None)?)
    } else {
        None
    };
    Ok(CartanFamily {
        lie,
        grading,
        pmap,
        witt_embedding: Some(WittEmbedding { ctx, rows }),
    })
}

/// omega_H = dx_1 ∧ dx_{r+1} + ... + dx_r ∧ dx_{2r} (0-based keys).
pub fn hamiltonian_form(ctx: &DividedPowers, r: usize) -> DifferentialForm {
    let mut omega = DifferentialForm::zero(2);
    for i in 0..r {
        omega.add_term(ctx, vec![i as u8, (i + r) as u8], &ctx.one(), 1);
    }
    omega
}

/// omega_K = dx_m + sum_{i<=r} (x_i dx_{i+r} - x_{i+r} dx_i), m = 2r+1.
pub fn contact_form(ctx: &DividedPowers, r: usize) -> DifferentialForm {
    let m = 2 * r + 1;
    let f = ctx.field();
    let mut omega = DifferentialForm::zero(1);
    omega.add_term(ctx, vec![(m - 1) as u8], &ctx.one(), 1);
    for i in 0..r {
        let mut xi = vec![0u64; m];
        xi[i] = 1;
        omega.add_term(ctx, vec![(i + r) as u8], &ctx.monomial(&xi), 1);
        let mut xir = vec![0u64; m];
        xir[i + r] = 1;
        omega.add_term(ctx, vec![i as u8], &ctx.monomial(&xir), f.neg(1));
    }
    omega
}

/// Z^{r+1} weights making the contact form homogeneous: variable x_i carries
/// e_i for i <= r, sigma - e_{i-r} for r < i <= 2r, and sigma = e_{r+1} for
/// x_{2r+1}. Summing the first r coordinates with twice the last recovers the
/// familiar contact weights (1, ..., 1, 2).
fn contact_eta_grading(ctx: &DividedPowers, r: usize) -> Grading {
    let m = ctx.vars();
    let rank = r + 1;
    let var_weight = |t: usize| -> Vec<i64> {
        let mut w = vec![0i64; rank];
        if t < r {
            w[t] = 1;
        } else if t < 2 * r {
            w[r] = 1;
            w[t - r] -= 1;
        } else {
            w[r] = 1;
        }
        w
    };
    let weights = (0..ctx.dim() * m)
        .map(|idx| {
            let exps = ctx.exps((idx / m) as u32);
            let i = idx % m;
            let mut w = vec![0i64; rank];
            for (t, &e) in exps.iter().enumerate() {
                let vw = var_weight(t);
                for (slot, &x) in vw.iter().enumerate() {
                    w[slot] += e as i64 * x;
                }
            }
            for (slot, &x) in var_weight(i).iter().enumerate() {
                w[slot] -= x;
            }
            w
        })
        .collect();
    Grading {
        weights,
        modulus: None,
    }
}

/// Project a contact Z^{r+1} grading onto the scalar contact weights
/// (x_i of weight 1 for i <= 2r, x_{2r+1} of weight 2).
pub fn contact_scalar_grading(grading: &Grading) -> Grading {
    let weights = grading
        .weights
        .iter()
        .map(|w| {
            let r = w.len() - 1;
            let scalar: i64 = w[..r].iter().sum::<i64>() + 2 * w[r];
            vec![scalar]
        })
        .collect();
    Grading {
        weights,
        modulus: grading.modulus,
    }
}

/// S(m;n)^(1): derivations annihilating the volume form, derived once.
pub fn special(m: usize, heights: &[u32], field: PrimeField) -> Result<CartanFamily> {
    shk_core(ShkFamily::Special, m, heights, field)
}

/// H(2r;n)^(2): derivations annihilating the Hamiltonian 2-form, derived twice.
pub fn hamiltonian(two_r: usize, heights: &[u32], field: PrimeField) -> Result<CartanFamily> {
    shk_core(ShkFamily::Hamiltonian, two_r, heights, field)
}

/// K(2r+1;n)^(1): derivations preserving the contact form up to O-multiples,
/// derived once (a no-op unless p divides 2r+4, but computed rather than
/// assumed).
pub fn contact(m: usize, heights: &[u32], field: PrimeField) -> Result<CartanFamily> {
    shk_core(ShkFamily::Contact, m, heights, field)
}

pub fn construct_shk(
    family: ShkFamily,
    m: usize,
    heights: &[u32],
    field: PrimeField,
) -> Result<CartanFamily> {
    shk_core(family, m, heights, field)
}

/// Minimal p-envelope by the closed formula: adjoin the iterated powers
/// d_i^{p^j} for 0 < j < n_i. Structure constants come from the derivation
/// action ([d_i^{p^j}, f d_t] = d_i^{p^j}(f) d_t, and the adjoined operators
/// commute); the p-map is read off operator matrices on O.
pub fn cartan_p_envelope(fam: &CartanFamily) -> Result<RestrictedLieAlgebra> {
    let emb = fam
        .witt_embedding
        .as_ref()
        .ok_or_else(|| Error::BadParameter("envelope formula needs a Witt realization".into()))?;
    let ctx = &emb.ctx;
    let field = ctx.field();
    let p = field.p();
    let m = ctx.vars();
    let d = fam.lie.dim();
    // Adjoined shift operators (variable, power p^j).
    let mut tails: Vec<(usize, u64)> = Vec::new();
    for (i, &h) in ctx.heights().iter().enumerate() {
        let mut shift = p;
        for _ in 1..h {
            tails.push((i, shift));
            shift *= p;
        }
    }
    let total = d + tails.len();
    let expr = LinearExpressor::new(field, ctx.dim() * m, &emb.rows);
    let mut brackets: Vec<((usize, usize), SparseVec)> = Vec::new();
    for a in 0..d {
        for b in (a + 1)..d {
            let row = fam.lie.pair_row(a, b).clone();
            if !row.is_empty() {
                brackets.push(((a, b), row));
            }
        }
    }
    // [x, d_i^{p^j}] = -(shift applied to x), expressed in the family basis.
    for (t, &(var, shift)) in tails.iter().enumerate() {
        for a in 0..d {
            let shifted = shift_witt_vec(ctx, &emb.rows[a], var, shift);
            let coords = expr.express(&shifted).ok_or(Error::NotInSubspace {
                context: "shift operator does not normalize the family".into(),
            })?;
            let row: SparseVec = coords
                .iter()
                .enumerate()
                .filter_map(|(k, &v)| (v != 0).then_some((k as u32, field.neg(v))))
                .collect();
            if !row.is_empty() {
                brackets.push(((a, d + t), row));
            }
        }
    }
    let mut labels: Vec<String> = (0..d).map(|i| fam.lie.label(i).to_string()).collect();
    for &(var, shift) in &tails {
        labels.push(format!("d{}^{}", var + 1, shift));
    }
    let lie = LieAlgebra::new(field, labels, brackets)?;
    // Operator matrices on O for the p-map.
    let q = ctx.dim();
    let mut ops: Vec<Vec<u64>> = Vec::with_capacity(total);
    for row in &emb.rows {
        ops.push(operator_matrix(ctx, &SpecialDerivation::from_witt_vec(ctx, row)));
    }
    for &(var, shift) in &tails {
        ops.push(shift_matrix(ctx, var, shift));
    }
    let op_expr = LinearExpressor::new(field, q * q, &ops);
    let images = ops
        .iter()
        .map(|flat| {
            let mat = crate::linalg::DenseMatrix {
                nrows: q,
                ncols: q,
                field,
                data: flat.clone(),
            };
            op_expr.express(&mat.pow(p).data).ok_or(Error::NotInSubspace {
                context: "envelope is not closed under p-th operator powers".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RestrictedLieAlgebra::new(lie, PMap { images })
}

/// Apply d_var^shift to every coefficient of a Witt vector.
fn shift_witt_vec(ctx: &DividedPowers, v: &[u64], var: usize, shift: u64) -> Vec<u64> {
    let m = ctx.vars();
    let mut out = vec![0u64; v.len()];
    for (slot, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut exps = ctx.exps((slot / m) as u32);
        if exps[var] < shift {
            continue;
        }
        exps[var] -= shift;
        out[witt_index(ctx, ctx.index(&exps), slot % m)] = c;
    }
    out
}

/// Matrix of a special derivation acting on O, column per source monomial.
fn operator_matrix(ctx: &DividedPowers, d: &SpecialDerivation) -> Vec<u64> {
    let q = ctx.dim();
    let mut data = vec![0u64; q * q];
    for src in 0..q as u32 {
        let img = d.apply(ctx, &std::collections::BTreeMap::from([(src, 1u64)]));
        for (&t, &c) in &img {
            data[t as usize * q + src as usize] = c;
        }
    }
    data
}

fn shift_matrix(ctx: &DividedPowers, var: usize, shift: u64) -> Vec<u64> {
    let q = ctx.dim();
    let mut data = vec![0u64; q * q];
    for src in 0..q as u32 {
        let mut exps = ctx.exps(src);
        if exps[var] < shift {
            continue;
        }
        exps[var] -= shift;
        data[ctx.index(&exps) as usize * q + src as usize] = 1;
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restricted::{minimal_p_envelope, pmap_from_ad_powers};

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn witt_small_dimensions_and_defining_bracket() {
        let w11 = witt(1, &[1], fp(5)).unwrap();
        assert_eq!(w11.lie.dim(), 5);
        // [d, x^(1) d] = d
        let d_idx = 0;
        let xd_idx = 1;
        assert_eq!(w11.lie.label(d_idx), "x^(0)d1");
        assert_eq!(w11.lie.label(xd_idx), "x^(1)d1");
        assert_eq!(w11.lie.bracket_basis(d_idx, xd_idx), vec![(0, 1)]);
        let w21 = witt(2, &[1, 1], fp(5)).unwrap();
        assert_eq!(w21.lie.dim(), 50);
        let w12 = witt(1, &[2], fp(5)).unwrap();
        assert_eq!(w12.lie.dim(), 25);
        assert!(w12.pmap.is_none());
    }

    #[test]
    fn witt_families_verify_axioms_and_grading() {
        for (m, heights) in [(1usize, vec![1u32]), (2, vec![1, 1]), (1, vec![2])] {
            let w = witt(m, &heights, fp(5)).unwrap();
            w.lie.verify_lie().unwrap();
            w.grading.verify(&w.lie).unwrap();
            if let Some(_) = &w.pmap {
                w.restricted().unwrap().verify_restricted().unwrap();
            }
        }
    }

    #[test]
    fn witt_pmap_agrees_with_ad_power_solve() {
        for (m, heights) in [(1usize, vec![1u32]), (2, vec![1, 1])] {
            let w = witt(m, &heights, fp(5)).unwrap();
            let direct = w.pmap.clone().unwrap();
            let solved = pmap_from_ad_powers(&w.lie).unwrap();
            assert_eq!(direct, solved);
        }
    }

    #[test]
    fn witt_simple_and_killing_degenerate() {
        let w = witt(1, &[1], fp(5)).unwrap();
        assert!(w.lie.is_simple(21).unwrap());
        assert!(w.lie.killing_radical().dim() > 0);
        let w2 = witt(2, &[1, 1], fp(5)).unwrap();
        assert!(w2.lie.is_simple(22).unwrap());
        assert!(w2.lie.killing_radical().dim() > 0);
    }

    #[test]
    fn hamiltonian_h21_dimension_and_structure() {
        let h = hamiltonian(2, &[1, 1], fp(5)).unwrap();
        assert_eq!(h.lie.dim(), 23);
        h.lie.verify_lie().unwrap();
        h.grading.verify(&h.lie).unwrap();
        let rh = h.restricted().unwrap();
        rh.verify_restricted().unwrap();
        assert!(h.lie.is_simple(23).unwrap());
        assert!(h.lie.killing_radical().dim() > 0);
    }

    #[test]
    fn hamiltonian_annihilates_its_form() {
        let h = hamiltonian(2, &[1, 1], fp(5)).unwrap();
        let emb = h.witt_embedding.as_ref().unwrap();
        let omega = hamiltonian_form(&emb.ctx, 1);
        for row in &emb.rows {
            let d = SpecialDerivation::from_witt_vec(&emb.ctx, row);
            assert!(lie_derivative(&emb.ctx, &d, &omega).is_zero());
        }
    }

    #[test]
    fn special_s31_dimension_and_structure() {
        let s = special(3, &[1, 1, 1], fp(5)).unwrap();
        assert_eq!(s.lie.dim(), 248);
        s.grading.verify(&s.lie).unwrap();
        let rs = s.restricted().unwrap();
        rs.verify_restricted().unwrap();
        assert!(s.lie.is_simple(31).unwrap());
        assert!(s.lie.killing_radical().dim() > 0);
    }

    #[test]
    fn special_fields_have_zero_divergence() {
        let s = special(3, &[1, 1, 1], fp(5)).unwrap();
        let emb = s.witt_embedding.as_ref().unwrap();
        for row in &emb.rows {
            let d = SpecialDerivation::from_witt_vec(&emb.ctx, row);
            assert!(d.divergence(&emb.ctx).is_empty());
        }
    }

    #[test]
    fn contact_k31_dimension_and_structure() {
        let k = contact(3, &[1, 1, 1], fp(5)).unwrap();
        assert_eq!(k.lie.dim(), 125);
        k.lie.verify_lie().unwrap();
        k.grading.verify(&k.lie).unwrap();
        let rk = k.restricted().unwrap();
        rk.verify_restricted().unwrap();
        assert!(k.lie.is_simple(37).unwrap());
        assert!(k.lie.killing_radical().dim() > 0);
    }

    #[test]
    fn contact_fields_scale_the_contact_form() {
        let k = contact(3, &[1, 1, 1], fp(5)).unwrap();
        let emb = k.witt_embedding.as_ref().unwrap();
        let omega = contact_form(&emb.ctx, 1);
        for row in &emb.rows {
            let d = SpecialDerivation::from_witt_vec(&emb.ctx, row);
            let ld = lie_derivative(&emb.ctx, &d, &omega);
            assert!(forms::multiple_of(&emb.ctx, &ld, &omega).is_some());
        }
    }

    #[test]
    fn special_rejects_m_two() {
        assert!(matches!(
            special(2, &[1, 1], fp(5)),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn contact_parity_is_checked() {
        assert!(matches!(
            contact(4, &[1, 1, 1, 1], fp(5)),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn envelope_of_restricted_witt_is_identity_sized() {
        let w = witt(1, &[1], fp(5)).unwrap();
        let env = cartan_p_envelope(&w).unwrap();
        assert_eq!(env.lie.dim(), 5);
        env.verify_restricted().unwrap();
    }

    #[test]
    fn envelope_of_w12_has_dimension_26() {
        let w = witt(1, &[2], fp(5)).unwrap();
        let env = cartan_p_envelope(&w).unwrap();
        assert_eq!(env.lie.dim(), 26);
        env.lie.verify_lie().unwrap();
        env.verify_restricted().unwrap();
        // Cross-check against the generic construction inside Der(W).
        let generic = minimal_p_envelope(&w.lie).unwrap();
        assert_eq!(generic.algebra.lie.dim(), 26);
    }

    #[test]
    fn contact_scalar_weights_match_pinned_assignment() {
        // The x_m variable carries weight 2, the rest weight 1: check on the
        // coordinate fields d_i themselves.
        let k = contact(3, &[1, 1, 1], fp(5)).unwrap();
        let scalar = contact_scalar_grading(&k.grading);
        scalar.verify(&k.lie).unwrap();
        let emb = k.witt_embedding.as_ref().unwrap();
        for (row_idx, row) in emb.rows.iter().enumerate() {
            // d_3 appears as a basis vector of K; its scalar weight is -2.
            let nnz: Vec<usize> = row
                .iter()
                .enumerate()
                .filter_map(|(c, &v)| (v != 0).then_some(c))
                .collect();
            if nnz == vec![witt_index(&emb.ctx, 0, 2)] {
                assert_eq!(scalar.weights[row_idx], vec![-2]);
            }
        }
    }
}
