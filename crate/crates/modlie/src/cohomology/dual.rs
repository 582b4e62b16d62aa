//! Verification of first-order deformations over the dual numbers k[t]/(t^2).
//!
//! A candidate (f, omega) coming out of the restricted degree-two solver is
//! checked the hard way: the deformed bracket [x,y] + t f(x,y) must satisfy
//! the Jacobi identity with dual coefficients, and the deformed p-map
//! x^[p] + t omega(x) must match the p-th power of the deformed adjoint map
//! on every basis vector and on random dense elements. None of this reuses
//! the solver's row assembly, so a sign slip there fails loudly here.

use super::DeformationRep;
use crate::field::PrimeField;
use crate::restricted::RestrictedLieAlgebra;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// a + b t with t^2 = 0.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Dual {
    pub a: u64,
    pub b: u64,
}

impl Dual {
    pub fn zero() -> Dual {
        Dual { a: 0, b: 0 }
    }

    pub fn scalar(a: u64) -> Dual {
        Dual { a, b: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn add(self, f: PrimeField, o: Dual) -> Dual {
        Dual {
            a: f.add(self.a, o.a),
            b: f.add(self.b, o.b),
        }
    }

    pub fn sub(self, f: PrimeField, o: Dual) -> Dual {
        Dual {
            a: f.sub(self.a, o.a),
            b: f.sub(self.b, o.b),
        }
    }

    pub fn mul(self, f: PrimeField, o: Dual) -> Dual {
        Dual {
            a: f.mul(self.a, o.a),
            b: f.add(f.mul(self.a, o.b), f.mul(self.b, o.a)),
        }
    }
}

/// The deformed structure: bracket and p-map of `alg` shifted by `rep`.
pub struct DeformedStructure<'a> {
    alg: &'a RestrictedLieAlgebra,
    rep: &'a DeformationRep,
    f: PrimeField,
    dim: usize,
}

impl<'a> DeformedStructure<'a> {
    pub fn new(alg: &'a RestrictedLieAlgebra, rep: &'a DeformationRep) -> Self {
        DeformedStructure {
            alg,
            rep,
            f: alg.lie.field(),
            dim: alg.lie.dim(),
        }
    }

    /// Deformed bracket of two dual vectors.
    pub fn bracket(&self, x: &[Dual], y: &[Dual]) -> Vec<Dual> {
        let f = self.f;
        let mut out = vec![Dual::zero(); self.dim];
        for (u, &xu) in x.iter().enumerate() {
            if xu.is_zero() {
                continue;
            }
            for (v, &yv) in y.iter().enumerate() {
                if yv.is_zero() || u == v {
                    continue;
                }
                let c = xu.mul(f, yv);
                for &(t, bc) in &self.alg.lie.bracket_basis(u, v) {
                    out[t as usize] = out[t as usize].add(f, c.mul(f, Dual::scalar(bc)));
                }
                // t-part: c * t * f(e_u, e_v) only keeps the scalar head of c.
                if c.a != 0 {
                    let frow = self.rep.cochain_at(u, v, self.dim, f);
                    for (slot, &fc) in frow.iter().enumerate() {
                        if fc != 0 {
                            out[slot].b = f.add(out[slot].b, f.mul(c.a, fc));
                        }
                    }
                }
            }
        }
        out
    }

    /// Deformed p-map of an ordinary (scalar) element, by the same roll-up
    /// used for the undeformed p-map: iterate over basis components, adding
    /// Jacobson cross terms evaluated with the deformed bracket.
    pub fn pmap(&self, x: &[u64]) -> Vec<Dual> {
        let f = self.f;
        let p = f.p();
        let mut acc = vec![Dual::zero(); self.dim];
        let mut partial = vec![Dual::zero(); self.dim];
        for (i, &ci) in x.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let mut term = vec![Dual::zero(); self.dim];
            term[i] = Dual::scalar(ci);
            if partial.iter().any(|d| !d.is_zero()) {
                for (slot, s) in self.jacobson_sum(&partial, &term).into_iter().enumerate() {
                    acc[slot] = acc[slot].add(f, s);
                }
            }
            let cp = f.pow(ci, p);
            for (l, &v) in self.alg.pmap.image(i).iter().enumerate() {
                if v != 0 {
                    acc[l] = acc[l].add(f, Dual::scalar(f.mul(cp, v)));
                }
            }
            for (l, &v) in self.rep.shift_at(i, self.dim).iter().enumerate() {
                if v != 0 {
                    acc[l].b = f.add(acc[l].b, f.mul(cp, v));
                }
            }
            for (ps, t) in partial.iter_mut().zip(term) {
                *ps = ps.add(f, t);
            }
        }
        acc
    }

    /// Jacobson cross terms for (x + y)^[p] - x^[p] - y^[p], with the
    /// deformed bracket: each word [w_1, [w_2, ... [w_{p-1}, y] ...]] with
    /// letters in {x, y} enters with coefficient -1/r, r the number of x
    /// letters. Same word convention as the scalar version next to the p-map
    /// code, re-executed here in dual arithmetic.
    fn jacobson_sum(&self, x: &[Dual], y: &[Dual]) -> Vec<Dual> {
        let f = self.f;
        let p = f.p();
        let len = (p - 1) as usize;
        let mut acc = vec![Dual::zero(); self.dim];
        for mask in 0u64..(1 << len) {
            let x_count = len as u32 - mask.count_ones();
            if x_count == 0 {
                continue;
            }
            let mut v = y.to_vec();
            for pos in (0..len).rev() {
                let factor = if (mask >> pos) & 1 == 1 { y } else { x };
                v = self.bracket(factor, &v);
            }
            let c = Dual::scalar(f.neg(f.inv(x_count as u64 % p)));
            for (slot, val) in v.into_iter().enumerate() {
                acc[slot] = acc[slot].add(f, c.mul(f, val));
            }
        }
        acc
    }

    fn ad_power_p(&self, x: &[Dual], y: &[Dual]) -> Vec<Dual> {
        let mut v = y.to_vec();
        for _ in 0..self.f.p() {
            v = self.bracket(x, &v);
        }
        v
    }
}

fn lift(x: &[u64]) -> Vec<Dual> {
    x.iter().map(|&a| Dual::scalar(a)).collect()
}

/// Full first-order verification of one deformation representative.
///
/// Checks, over the dual numbers: Jacobi on all basis triples, the p-map
/// axiom ad(x^[p]) = (ad x)^p on all basis pairs, p-th power scaling, and
/// the Jacobson sum identity on `samples` random dense pairs.
pub fn verify_first_order(
    alg: &RestrictedLieAlgebra,
    rep: &DeformationRep,
    samples: usize,
    seed: u64,
) -> Result<()> {
    let d = DeformedStructure::new(alg, rep);
    let f = alg.lie.field();
    let dim = alg.lie.dim();
    let unit = |i: usize| -> Vec<Dual> {
        let mut v = vec![Dual::zero(); dim];
        v[i] = Dual::scalar(1);
        v
    };
    // Jacobi with dual coefficients.
    for i in 0..dim {
        let ei = unit(i);
        for j in (i + 1)..dim {
            let ej = unit(j);
            let bij = d.bracket(&ei, &ej);
            for l in (j + 1)..dim {
                let el = unit(l);
                let mut s = d.bracket(&bij, &el);
                let t2 = d.bracket(&d.bracket(&ej, &el), &ei);
                let t3 = d.bracket(&d.bracket(&el, &ei), &ej);
                for ((a, b), c) in s.iter_mut().zip(t2).zip(t3) {
                    *a = a.add(f, b).add(f, c);
                }
                let nonzero = s.iter().filter(|v| !v.is_zero()).count();
                if nonzero > 0 {
                    return Err(Error::Jacobi {
                        i,
                        j,
                        k: l,
                        nonzero,
                    });
                }
            }
        }
    }
    // p-map axiom on basis pairs: ad(e_i^[p] + t omega(e_i)) = (ad e_i)^p.
    for i in 0..dim {
        let mut xp = lift(alg.pmap.image(i));
        for (slot, &v) in rep.shift_at(i, dim).iter().enumerate() {
            xp[slot].b = f.add(xp[slot].b, v);
        }
        let ei = unit(i);
        for j in 0..dim {
            let ej = unit(j);
            let lhs = d.bracket(&xp, &ej);
            let rhs = d.ad_power_p(&ei, &ej);
            if lhs != rhs {
                return Err(Error::Restricted {
                    axiom: 2,
                    index: i,
                    detail: format!(
                        "deformed p-map fails ad(x^[p]) = (ad x)^p against basis vector {j}"
                    ),
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = f.p();
    for _ in 0..samples {
        let x: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
        let y: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
        // Scaling: (c x)^[p] = c^p x^[p].
        let c = rng.gen_range(1..p);
        let cx: Vec<u64> = x.iter().map(|&v| f.mul(c, v)).collect();
        let lhs = d.pmap(&cx);
        let cp = Dual::scalar(f.pow(c, p));
        let rhs: Vec<Dual> = d.pmap(&x).into_iter().map(|v| cp.mul(f, v)).collect();
        if lhs != rhs {
            return Err(Error::Restricted {
                axiom: 1,
                index: 0,
                detail: "deformed p-map fails p-th power scaling on a random element".into(),
            });
        }
        // Jacobson sum: (x + y)^[p] = x^[p] + y^[p] + cross terms.
        let xy: Vec<u64> = x.iter().zip(&y).map(|(&a, &b)| f.add(a, b)).collect();
        let mut rhs = d.pmap(&x);
        for (slot, v) in d.pmap(&y).into_iter().enumerate() {
            rhs[slot] = rhs[slot].add(f, v);
        }
        let (xd, yd) = (lift(&x), lift(&y));
        for (slot, v) in d.jacobson_sum(&xd, &yd).into_iter().enumerate() {
            rhs[slot] = rhs[slot].add(f, v);
        }
        if d.pmap(&xy) != rhs {
            return Err(Error::Restricted {
                axiom: 3,
                index: 0,
                detail: "deformed p-map fails the Jacobson sum identity on a random pair".into(),
            });
        }
        // And the adjoint axiom at the random element.
        let xp = d.pmap(&x);
        for j in 0..dim {
            let mut ej = vec![Dual::zero(); dim];
            ej[j] = Dual::scalar(1);
            if d.bracket(&xp, &ej) != d.ad_power_p(&xd, &ej) {
                return Err(Error::Restricted {
                    axiom: 2,
                    index: j,
                    detail: "deformed p-map fails ad(x^[p]) = (ad x)^p at a random element"
                        .into(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_arithmetic_kills_t_squared() {
        let f = PrimeField::new(5).unwrap();
        let x = Dual { a: 2, b: 3 };
        let y = Dual { a: 4, b: 1 };
        let z = x.mul(f, y);
        assert_eq!(z, Dual { a: 3, b: 4 });
        assert_eq!(x.mul(f, Dual { a: 0, b: 1 }).mul(f, Dual { a: 0, b: 1 }).a, 0);
        assert_eq!(x.add(f, y).sub(f, y), x);
    }
}
