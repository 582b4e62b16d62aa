//! The Melikian algebras M(n1, n2), defined only over fields of
//! characteristic 5. As a vector space M = O + W + W~ where O = O(2; (n1,n2)),
//! W = W(2; (n1,n2)) and W~ is a second copy of W, with brackets
//!
//!   [D, E]      the Witt bracket,
//!   [D, E~]     = [D, E]~ + 2 div(D) E~,
//!   [D, f]      = D(f) - 2 div(D) f,
//!   [f1 D1~ + f2 D2~, g1 D1~ + g2 D2~] = f1 g2 - f2 g1,
//!   [f, E~]     = f E,
//!   [f, g]      = 2 (g D2(f) - f D2(g)) D1~ + 2 (f D1(g) - g D1(f)) D2~.

use super::{witt_bracket_basis, CartanFamily};
use crate::field::PrimeField;
use crate::lie::{Grading, LieAlgebra};
use crate::linalg::SparseVec;
use crate::restricted::pmap_from_ad_powers;
use crate::{Error, Result};

use super::divided::DividedPowers;

enum Part {
    O(u32),
    W(u32, usize),
    Wt(u32, usize),
}

fn part(q: usize, idx: usize) -> Part {
    if idx < q {
        Part::O(idx as u32)
    } else if idx < 3 * q {
        let local = idx - q;
        Part::W((local / 2) as u32, local % 2)
    } else {
        let local = idx - 3 * q;
        Part::Wt((local / 2) as u32, local % 2)
    }
}

/// x^(a) shifted down in variable `var`, or None at the boundary.
fn lowered(ctx: &DividedPowers, a: u32, var: usize) -> Option<u32> {
    let mut exps = ctx.exps(a);
    if exps[var] == 0 {
        return None;
    }
    exps[var] -= 1;
    Some(ctx.index(&exps))
}

/// x^(g) * d_var(x^(f)) as a scaled monomial.
fn dmul(ctx: &DividedPowers, g: u32, f: u32, var: usize) -> Option<(u32, u64)> {
    let df = lowered(ctx, f, var)?;
    ctx.mul_basis(g, df)
}

/// The graded Lie algebra M(n1, n2) of dimension 5^(n1 + n2 + 1). Restricted
/// exactly for (n1, n2) = (1, 1), where the p-map is solved from ad powers.
pub fn melikian(n1: u32, n2: u32, field: PrimeField) -> Result<CartanFamily> {
    if field.p() != 5 {
        return Err(Error::UnsupportedPrime {
            p: field.p(),
            context: "the Melikian construction exists only at p = 5".into(),
        });
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::BadParameter("Melikian heights must be positive".into()));
    }
    let f = field;
    let ctx = DividedPowers::new(field, &[n1, n2])?;
    let q = ctx.dim();
    let dim = 5 * q;

    let mut labels = Vec::with_capacity(dim);
    for a in 0..q as u32 {
        let e = ctx.exps(a);
        labels.push(format!("x^({},{})", e[0], e[1]));
    }
    for suffix in ["", "~"] {
        for a in 0..q as u32 {
            let e = ctx.exps(a);
            for i in 0..2 {
                labels.push(format!("x^({},{})d{}{}", e[0], e[1], i + 1, suffix));
            }
        }
    }

    let w_slot = |mono: u32, i: usize| q + mono as usize * 2 + i;
    let wt_slot = |mono: u32, i: usize| 3 * q + mono as usize * 2 + i;

    let mut brackets: Vec<((usize, usize), SparseVec)> = Vec::new();
    for idx_a in 0..dim {
        for idx_b in (idx_a + 1)..dim {
            let mut acc: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
            let mut add = |slot: usize, c: u64| {
                if c == 0 {
                    return;
                }
                let e = acc.entry(slot).or_insert(0);
                *e = f.add(*e, c);
                if *e == 0 {
                    acc.remove(&slot);
                }
            };
            match (part(q, idx_a), part(q, idx_b)) {
                (Part::O(a), Part::O(b)) => {
                    // [f, g] lands in W~; both products of each pair share a
                    // target monomial.
                    if let Some((mo, c)) = dmul(&ctx, b, a, 1) {
                        add(wt_slot(mo, 0), f.mul(2, c));
                    }
                    if let Some((mo, c)) = dmul(&ctx, a, b, 1) {
                        add(wt_slot(mo, 0), f.neg(f.mul(2, c)));
                    }
                    if let Some((mo, c)) = dmul(&ctx, a, b, 0) {
                        add(wt_slot(mo, 1), f.mul(2, c));
                    }
                    if let Some((mo, c)) = dmul(&ctx, b, a, 0) {
                        add(wt_slot(mo, 1), f.neg(f.mul(2, c)));
                    }
                }
                (Part::O(a), Part::W(c, t)) => {
                    // Stored orientation is [f, D] = -(D(f) - 2 div(D) f).
                    if let Some((mo, co)) = dmul(&ctx, c, a, t) {
                        add(mo as usize, f.neg(co));
                    }
                    if let Some(dc) = lowered(&ctx, c, t) {
                        if let Some((mo, co)) = ctx.mul_basis(dc, a) {
                            add(mo as usize, f.mul(2, co));
                        }
                    }
                }
                (Part::O(a), Part::Wt(c, t)) => {
                    if let Some((mo, co)) = ctx.mul_basis(a, c) {
                        add(w_slot(mo, t), co);
                    }
                }
                (Part::W(a, i), Part::W(c, t)) => {
                    for (slot, co) in witt_bracket_basis(&ctx, a, i, c, t) {
                        add(q + slot as usize, co);
                    }
                }
                (Part::W(a, i), Part::Wt(c, t)) => {
                    for (slot, co) in witt_bracket_basis(&ctx, a, i, c, t) {
                        add(3 * q + slot as usize, co);
                    }
                    if let Some(da) = lowered(&ctx, a, i) {
                        if let Some((mo, co)) = ctx.mul_basis(da, c) {
                            add(wt_slot(mo, t), f.mul(2, co));
                        }
                    }
                }
                (Part::Wt(a, i), Part::Wt(c, t)) => {
                    if i != t {
                        if let Some((mo, co)) = ctx.mul_basis(a, c) {
                            add(mo as usize, if i == 0 { co } else { f.neg(co) });
                        }
                    }
                }
                _ => unreachable!("parts are ordered O, W, W~ in the basis"),
            }
            if !acc.is_empty() {
                let row: SparseVec = acc.into_iter().map(|(s, c)| (s as u32, c)).collect();
                brackets.push(((idx_a, idx_b), row));
            }
        }
    }
    let lie = LieAlgebra::new(field, labels, brackets)?;

    // Fine Z^2 grading: deg x^(a) = 3a - (1,1), deg x^(a) d_i = 3a - 3 e_i,
    // deg x^(a) d_i~ = 3a - 3 e_i + (1,1).
    let mut weights = Vec::with_capacity(dim);
    for a in 0..q as u32 {
        let e = ctx.exps(a);
        weights.push(vec![3 * e[0] as i64 - 1, 3 * e[1] as i64 - 1]);
    }
    for tilde in [0i64, 1] {
        for a in 0..q as u32 {
            let e = ctx.exps(a);
            for i in 0..2usize {
                weights.push(vec![
                    3 * e[0] as i64 - 3 * i64::from(i == 0) + tilde,
                    3 * e[1] as i64 - 3 * i64::from(i == 1) + tilde,
                ]);
            }
        }
    }
    let grading = Grading {
        weights,
        modulus: None,
    };

    let pmap = if n1 == 1 && n2 == 1 {
        Some(pmap_from_ad_powers(&lie)?)
    } else {
        None
    };
    Ok(CartanFamily {
        lie,
        grading,
        pmap,
        witt_embedding: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m11() -> CartanFamily {
        melikian(1, 1, PrimeField::new(5).unwrap()).unwrap()
    }

    fn find(fam: &CartanFamily, label: &str) -> usize {
        (0..fam.lie.dim())
            .find(|&i| fam.lie.label(i) == label)
            .unwrap_or_else(|| panic!("no basis vector labelled {label}"))
    }

    #[test]
    fn only_characteristic_five_is_accepted() {
        for p in [7u64, 11, 13] {
            assert!(matches!(
                melikian(1, 1, PrimeField::new(p).unwrap()),
                Err(Error::UnsupportedPrime { .. })
            ));
        }
    }

    #[test]
    fn dimension_parts_and_axioms() {
        let m = m11();
        assert_eq!(m.lie.dim(), 125);
        let tildes = (0..125)
            .filter(|&i| m.lie.label(i).ends_with('~'))
            .count();
        let plains = (0..125)
            .filter(|&i| !m.lie.label(i).contains('d'))
            .count();
        assert_eq!(tildes, 50);
        assert_eq!(plains, 25);
        m.lie.verify_lie().unwrap();
        m.grading.verify(&m.lie).unwrap();
    }

    #[test]
    fn simple_with_degenerate_killing_form() {
        let m = m11();
        assert!(m.lie.is_simple(29).unwrap());
        assert!(m.lie.killing_radical().dim() > 0);
    }

    #[test]
    fn restricted_structure_verifies() {
        let m = m11();
        let rm = m.restricted().unwrap();
        rm.verify_restricted().unwrap();
    }

    #[test]
    fn pinned_bracket_values() {
        let m = m11();
        let f = m.lie.field();
        let d1 = find(&m, "x^(0,0)d1");
        let x1d1 = find(&m, "x^(1,0)d1");
        let x1d1t = find(&m, "x^(1,0)d1~");
        let d1t = find(&m, "x^(0,0)d1~");
        let d2t = find(&m, "x^(0,0)d2~");
        let x1 = find(&m, "x^(1,0)");
        let x2 = find(&m, "x^(0,1)");
        let x1t2 = find(&m, "x^(1,0)d2~");
        let x1x2 = find(&m, "x^(1,1)");
        let one = find(&m, "x^(0,0)");

        // div d1 = 0, so [d1, x1 d1~] = ([d1, x1 d1])~ = d1~.
        assert_eq!(m.lie.bracket_basis(d1, x1d1t), vec![(d1t as u32, 1)]);
        // [x1 d1, d1~] = (-d1)~ + 2 d1~ = d1~.
        assert_eq!(m.lie.bracket_basis(x1d1, d1t), vec![(d1t as u32, 1)]);
        // [x1, x2] = -2 x1 d1~ - 2 x2 d2~.
        let mut expected = vec![
            (x1d1t as u32, f.neg(2)),
            (find(&m, "x^(0,1)d2~") as u32, f.neg(2)),
        ];
        expected.sort_by_key(|e| e.0);
        assert_eq!(m.lie.bracket_basis(x1, x2), expected);
        // [1, d1~] = d1 in W.
        assert_eq!(m.lie.bracket_basis(one, d1t), vec![(d1 as u32, 1)]);
        // [x1 d1~, d2~] = x1, and swapping the tilde indices flips the sign.
        assert_eq!(m.lie.bracket_basis(x1d1t, d2t), vec![(x1 as u32, 1)]);
        assert_eq!(m.lie.bracket_basis(x1t2, d1t), vec![(x1 as u32, f.neg(1))]);
        // [x1 d1~, x2 d2~] = x1 x2.
        assert_eq!(
            m.lie.bracket_basis(x1d1t, find(&m, "x^(0,1)d2~")),
            vec![(x1x2 as u32, 1)]
        );
    }

    #[test]
    fn torus_weights_are_twice_the_fine_weights_mod_five() {
        let m = m11();
        let mut t1 = vec![0u64; 125];
        t1[find(&m, "x^(1,0)d1")] = 1;
        let mut t2 = vec![0u64; 125];
        t2[find(&m, "x^(0,1)d2")] = 1;
        let torus = m.lie.torus_grading(&[t1, t2]).unwrap();
        for i in 0..125 {
            for slot in 0..2 {
                let doubled = (2 * m.grading.weights[i][slot]).rem_euclid(5);
                assert_eq!(
                    torus.weights[i][slot].rem_euclid(5),
                    doubled,
                    "basis {} slot {slot}",
                    m.lie.label(i)
                );
            }
        }
    }
}
