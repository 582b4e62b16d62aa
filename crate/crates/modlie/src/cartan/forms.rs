//! Differential forms with divided-power coefficients and the Lie derivative
//! along special derivations. Just enough exterior calculus to express the
//! defining conditions of the S, H, K families.

use super::divided::{DPElement, DividedPowers, SpecialDerivation};
use std::collections::BTreeMap;

/// q-form sum f_I dx_I with strictly increasing index tuples I (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialForm {
    pub degree: usize,
    pub comps: BTreeMap<Vec<u8>, DPElement>,
}

impl DifferentialForm {
    pub fn zero(degree: usize) -> Self {
        DifferentialForm {
            degree,
            comps: BTreeMap::new(),
        }
    }

    /// dx_{i1} ∧ ... ∧ dx_{iq} for an increasing tuple.
    pub fn basic(ctx: &DividedPowers, indices: &[u8]) -> Self {
        assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let mut comps = BTreeMap::new();
        comps.insert(indices.to_vec(), ctx.one());
        DifferentialForm {
            degree: indices.len(),
            comps,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add_term(&mut self, ctx: &DividedPowers, indices: Vec<u8>, coeff: &DPElement, scale: u64) {
        debug_assert_eq!(indices.len(), self.degree);
        let entry = self.comps.entry(indices).or_default();
        ctx.add_scaled(entry, coeff, scale);
        let cleanup: Vec<Vec<u8>> = self
            .comps
            .iter()
            .filter(|(_, v)| v.is_empty())
            .map(|(k, _)| k.clone())
            .collect();
        for k in cleanup {
            self.comps.remove(&k);
        }
    }

    /// Multiply every coefficient by g on the left.
    pub fn scaled_by(&self, ctx: &DividedPowers, g: &DPElement) -> Self {
        let mut out = DifferentialForm::zero(self.degree);
        for (key, f) in &self.comps {
            let prod = ctx.mul(g, f);
            if !prod.is_empty() {
                out.comps.insert(key.clone(), prod);
            }
        }
        out
    }
}

/// Sort `indices` with the wedge sign; None when two indices coincide.
fn normalize_wedge(mut indices: Vec<u8>) -> Option<(Vec<u8>, bool)> {
    let mut negative = false;
    // insertion sort, counting transpositions
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((indices, negative))
}

/// Lie derivative along D, by the Leibniz expansion
///
///   L_D(f dx_I) = D(f) dx_I + sum_j f dx_{i1} ∧ .. ∧ d(D(x_{ij})) ∧ .. ,
///
/// with d(g) = sum_t (d_t g) dx_t substituted in slot j and the wedge
/// reordered with signs.
pub fn lie_derivative(
    ctx: &DividedPowers,
    d: &SpecialDerivation,
    omega: &DifferentialForm,
) -> DifferentialForm {
    let f = ctx.field();
    let mut out = DifferentialForm::zero(omega.degree);
    for (key, coeff) in &omega.comps {
        let df = d.apply(ctx, coeff);
        if !df.is_empty() {
            out.add_term(ctx, key.clone(), &df, 1);
        }
        for (slot, &var) in key.iter().enumerate() {
            let g = &d.comps[var as usize];
            for t in 0..ctx.vars() as u8 {
                let dg_t = ctx.derive(g, t as usize);
                if dg_t.is_empty() {
                    continue;
                }
                let mut new_key = key.clone();
                new_key[slot] = t;
                let Some((sorted, negative)) = normalize_wedge(new_key) else {
                    continue;
                };
                let term = ctx.mul(coeff, &dg_t);
                if term.is_empty() {
                    continue;
                }
                let sign = if negative { f.neg(1) } else { 1 };
                out.add_term(ctx, sorted, &term, sign);
            }
        }
    }
    out
}

/// Write `omega` as g · base when possible. Requires `base` to have some
/// component with coefficient 1 on the constant monomial (the contact form's
/// dx_m component); g is then forced and the identity is checked exactly.
pub fn multiple_of(
    ctx: &DividedPowers,
    omega: &DifferentialForm,
    base: &DifferentialForm,
) -> Option<DPElement> {
    let unit_key = base
        .comps
        .iter()
        .find(|(_, v)| **v == ctx.one())
        .map(|(k, _)| k.clone())?;
    let g = omega.comps.get(&unit_key).cloned().unwrap_or_default();
    if base.scaled_by(ctx, &g) == *omega {
        Some(g)
    } else {
        None
    }
}
