//! Truncated divided power algebras O(m;n) and their special derivations.
//!
//! Monomials x^(a) carry exponent tuples with 0 <= a_i < p^{n_i}; the product
//! rule is x^(a) x^(b) = binom(a+b, a) x^(a+b) with componentwise binomials
//! mod p, and a product overflowing a truncation bound vanishes.

use crate::field::PrimeField;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Sparse element of O(m;n): monomial index to nonzero coefficient.
pub type DPElement = BTreeMap<u32, u64>;

/// Parameter context for O(m;n). Monomial indices enumerate exponent tuples
/// in lexicographic order (x_1 most significant), which fixes basis orderings
/// everywhere downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DividedPowers {
    field: PrimeField,
    heights: Vec<u32>,
    bounds: Vec<u64>,
    strides: Vec<u64>,
    dim: usize,
}

impl DividedPowers {
    pub fn new(field: PrimeField, heights: &[u32]) -> Result<Self> {
        if heights.is_empty() || heights.iter().any(|&h| h == 0) {
            return Err(Error::BadParameter(
                "divided power heights must be positive".into(),
            ));
        }
        let p = field.p();
        let mut bounds = Vec::with_capacity(heights.len());
        let mut dim: u64 = 1;
        for &h in heights {
            let b = p
                .checked_pow(h)
                .ok_or_else(|| Error::BadParameter("truncation bound overflows".into()))?;
            dim = dim
                .checked_mul(b)
                .ok_or_else(|| Error::BadParameter("monomial count overflows".into()))?;
            bounds.push(b);
        }
        if dim > u32::MAX as u64 {
            return Err(Error::BadParameter("monomial count exceeds u32 range".into()));
        }
        let mut strides = vec![1u64; heights.len()];
        for i in (0..heights.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * bounds[i + 1];
        }
        Ok(DividedPowers {
            field,
            heights: heights.to_vec(),
            bounds,
            strides,
            dim: dim as usize,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn vars(&self) -> usize {
        self.heights.len()
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    /// Number of monomials, p^{n_1 + ... + n_m}.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self, exps: &[u64]) -> u32 {
        debug_assert_eq!(exps.len(), self.vars());
        let mut idx = 0u64;
        for (e, s) in exps.iter().zip(&self.strides) {
            idx += e * s;
        }
        idx as u32
    }

    pub fn exps(&self, idx: u32) -> Vec<u64> {
        let mut rest = idx as u64;
        self.strides
            .iter()
            .map(|&s| {
                let e = rest / s;
                rest %= s;
                e
            })
            .collect()
    }

    pub fn monomial(&self, exps: &[u64]) -> DPElement {
        BTreeMap::from([(self.index(exps), 1)])
    }

    pub fn one(&self) -> DPElement {
        BTreeMap::from([(0, 1)])
    }

    /// x^(a) x^(b) as (monomial, coefficient); None when truncated away or
    /// when a base-p binomial digit overflow kills the coefficient.
    pub fn mul_basis(&self, a: u32, b: u32) -> Option<(u32, u64)> {
        let ea = self.exps(a);
        let eb = self.exps(b);
        let mut coeff = 1u64;
        let mut sum = Vec::with_capacity(ea.len());
        for ((&x, &y), &bound) in ea.iter().zip(&eb).zip(&self.bounds) {
            let s = x + y;
            if s >= bound {
                return None;
            }
            coeff = self.field.mul(coeff, self.field.binomial(s, x));
            if coeff == 0 {
                return None;
            }
            sum.push(s);
        }
        Some((self.index(&sum), coeff))
    }

    pub fn add_scaled(&self, acc: &mut DPElement, f: &DPElement, c: u64) {
        if c == 0 {
            return;
        }
        for (&k, &v) in f {
            let merged = self.field.add(*acc.get(&k).unwrap_or(&0), self.field.mul(c, v));
            if merged == 0 {
                acc.remove(&k);
            } else {
                acc.insert(k, merged);
            }
        }
    }

    pub fn mul(&self, f: &DPElement, g: &DPElement) -> DPElement {
        let mut acc = DPElement::new();
        for (&a, &ca) in f {
            for (&b, &cb) in g {
                if let Some((m, c)) = self.mul_basis(a, b) {
                    let term = BTreeMap::from([(m, c)]);
                    self.add_scaled(&mut acc, &term, self.field.mul(ca, cb));
                }
            }
        }
        acc
    }

    /// Partial derivative: x^(a) -> x^(a - e_i), the divided-power rule with
    /// no exponent factor.
    pub fn derive(&self, f: &DPElement, i: usize) -> DPElement {
        let mut out = DPElement::new();
        for (&a, &c) in f {
            let mut e = self.exps(a);
            if e[i] == 0 {
                continue;
            }
            e[i] -= 1;
            out.insert(self.index(&e), c);
        }
        out
    }
}

/// Derivation D = sum_i f_i d_i determined by its values f_i = D(x_i), acting
/// by D(x^(a)) = sum_i x^(a - e_i) f_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialDerivation {
    pub comps: Vec<DPElement>,
}

impl SpecialDerivation {
    pub fn partial(ctx: &DividedPowers, i: usize) -> Self {
        let mut comps = vec![DPElement::new(); ctx.vars()];
        comps[i] = ctx.one();
        SpecialDerivation { comps }
    }

    pub fn apply(&self, ctx: &DividedPowers, f: &DPElement) -> DPElement {
        let mut acc = DPElement::new();
        for (&a, &c) in f {
            let e = ctx.exps(a);
            for (i, comp) in self.comps.iter().enumerate() {
                if e[i] == 0 || comp.is_empty() {
                    continue;
                }
                let mut shifted = e.clone();
                shifted[i] -= 1;
                let base = ctx.monomial(&shifted);
                let prod = ctx.mul(&base, comp);
                ctx.add_scaled(&mut acc, &prod, c);
            }
        }
        acc
    }

    pub fn divergence(&self, ctx: &DividedPowers) -> DPElement {
        let mut acc = DPElement::new();
        for (i, comp) in self.comps.iter().enumerate() {
            let d = ctx.derive(comp, i);
            ctx.add_scaled(&mut acc, &d, 1);
        }
        acc
    }

    /// Coordinates in the Witt basis, monomial-major: slot a_idx * m + i holds
    /// the x^(a)-coefficient of f_i.
    pub fn to_witt_vec(&self, ctx: &DividedPowers) -> Vec<u64> {
        let m = ctx.vars();
        let mut v = vec![0u64; ctx.dim() * m];
        for (i, comp) in self.comps.iter().enumerate() {
            for (&a, &c) in comp {
                v[a as usize * m + i] = c;
            }
        }
        v
    }

    pub fn from_witt_vec(ctx: &DividedPowers, v: &[u64]) -> Self {
        let m = ctx.vars();
        let mut comps = vec![DPElement::new(); m];
        for (slot, &c) in v.iter().enumerate() {
            if c != 0 {
                comps[slot % m].insert((slot / m) as u32, c);
            }
        }
        SpecialDerivation { comps }
    }
}
