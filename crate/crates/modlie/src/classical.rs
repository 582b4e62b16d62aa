//! Classical matrix algebras over `F_p`: gl, sl, psl, so, sp.
//!
//! All are built as spans of explicit matrices; brackets are commutators and
//! the p-map is the literal p-th matrix power, so the restricted axioms are
//! inherited from associative arithmetic rather than postulated.

use crate::field::PrimeField;
use crate::lie::LieAlgebra;
use crate::linalg::DenseMatrix;
use crate::restricted::{matrix_span_to_restricted, RestrictedLieAlgebra};
use crate::{Error, Result};

fn require_good_prime(f: PrimeField) -> Result<()> {
    if f.p() < 5 {
        return Err(Error::UnsupportedPrime {
            p: f.p(),
            context: "classical constructions assume p >= 5".into(),
        });
    }
    Ok(())
}

fn unit_matrix(f: PrimeField, n: usize, r: usize, c: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zero(f, n, n);
    m.set(r, c, 1);
    m
}

/// Full matrix algebra gl(n) with its unit-matrix basis `E_{rc}`, labelled
/// `E[r,c]`. Returned with the realizing matrices.
pub fn gl(n: usize, f: PrimeField) -> Result<(RestrictedLieAlgebra, Vec<DenseMatrix>)> {
    require_good_prime(f)?;
    let mats: Vec<DenseMatrix> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| unit_matrix(f, n, r, c))
        .collect();
    let (mut alg, mats) = matrix_span_to_restricted(f, &mats, "e")?;
    let labels: Vec<String> = (0..n)
        .flat_map(|r| (0..n).map(move |c| format!("E[{r},{c}]")))
        .collect();
    alg.lie = relabel(alg.lie, labels)?;
    Ok((alg, mats))
}

fn relabel(lie: LieAlgebra, labels: Vec<String>) -> Result<LieAlgebra> {
    let pairs = (0..lie.dim())
        .flat_map(|i| ((i + 1)..lie.dim()).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let row = lie.pair_row(i, j).clone();
            (!row.is_empty()).then_some(((i, j), row))
        })
        .collect();
    LieAlgebra::new(lie.field(), labels, pairs)
}

/// Traceless matrices sl(n). Basis: off-diagonal `E_{rc}` plus the diagonal
/// differences `H_r = E_{rr} - E_{r+1,r+1}`.
pub fn sl(n: usize, f: PrimeField) -> Result<RestrictedLieAlgebra> {
    require_good_prime(f)?;
    if n < 2 {
        return Err(Error::BadParameter("sl(n) needs n >= 2".into()));
    }
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                mats.push(unit_matrix(f, n, r, c));
                labels.push(format!("E[{r},{c}]"));
            }
        }
    }
    for r in 0..n - 1 {
        let mut h = unit_matrix(f, n, r, r);
        h.set(r + 1, r + 1, f.neg(1));
        mats.push(h);
        labels.push(format!("H[{r}]"));
    }
    let (mut alg, _) = matrix_span_to_restricted(f, &mats, "x")?;
    alg.lie = relabel(alg.lie, labels)?;
    Ok(alg)
}

/// sl(n) modulo its center. For p | n the identity is traceless and spans a
/// one-dimensional center; otherwise psl = sl and the quotient is trivial.
pub fn psl(n: usize, f: PrimeField) -> Result<RestrictedLieAlgebra> {
    let s = sl(n, f)?;
    let center = s.lie.center();
    if center.dim() == 0 {
        return Ok(s);
    }
    let (q, _) = s.quotient(&center)?;
    Ok(q)
}

/// Orthogonal algebra so(n) for the antidiagonal Gram matrix
/// `G[i, n-1-i] = 1`: matrices with `G A = -(G A)^T`. The antidiagonal form
/// keeps a split torus diagonal, which the weight-space tooling relies on.
pub fn so(n: usize, f: PrimeField) -> Result<RestrictedLieAlgebra> {
    require_good_prime(f)?;
    if n < 3 {
        return Err(Error::BadParameter("so(n) needs n >= 3".into()));
    }
    // A basis: for r < c with c != n-1-r, the matrix E_{rc} - E_{n-1-c, n-1-r};
    // entries on the antidiagonal reflection cancel. Dimension n(n-1)/2.
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let (rr, cc) = (n - 1 - c, n - 1 - r);
            if (r, c) < (rr, cc) {
                let mut m = unit_matrix(f, n, r, c);
                m.set(rr, cc, f.neg(1));
                mats.push(m);
                labels.push(format!("F[{r},{c}]"));
            }
        }
    }
    let expected = n * (n - 1) / 2;
    if mats.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: mats.len(),
            context: "so(n) basis".into(),
        });
    }
    let (mut alg, _) = matrix_span_to_restricted(f, &mats, "f")?;
    alg.lie = relabel(alg.lie, labels)?;
    Ok(alg)
}

/// Symplectic algebra sp(2n) for the antidiagonal form
/// `J[i, 2n-1-i] = 1` (i < n), `= -1` (i >= n): matrices with
/// `J A = (J A)^T`. Dimension n(2n+1).
pub fn sp(two_n: usize, f: PrimeField) -> Result<RestrictedLieAlgebra> {
    require_good_prime(f)?;
    if two_n < 2 || two_n % 2 != 0 {
        return Err(Error::BadParameter("sp(2n) needs even dimension >= 2".into()));
    }
    let n2 = two_n;
    let sign = |i: usize| -> u64 {
        if i < n2 / 2 {
            1
        } else {
            f.neg(1)
        }
    };
    // J A symmetric <=> a[rr, cc] = -sign(r) sign(n-1-c) a[r, c] with
    // rr = n-1-c, cc = n-1-r. Basis from orbit representatives.
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for r in 0..n2 {
        for c in 0..n2 {
            let (rr, cc) = (n2 - 1 - c, n2 - 1 - r);
            let coeff = f.neg(f.mul(sign(r), sign(c)));
            if (r, c) < (rr, cc) {
                let mut m = unit_matrix(f, n2, r, c);
                m.set(rr, cc, coeff);
                mats.push(m);
                labels.push(format!("G[{r},{c}]"));
            } else if (r, c) == (rr, cc) && coeff == 1 {
                mats.push(unit_matrix(f, n2, r, c));
                labels.push(format!("G[{r},{c}]"));
            }
        }
    }
    let expected = (n2 / 2) * (n2 + 1);
    if mats.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: mats.len(),
            context: "sp(2n) basis".into(),
        });
    }
    let (mut alg, _) = matrix_span_to_restricted(f, &mats, "g")?;
    alg.lie = relabel(alg.lie, labels)?;
    Ok(alg)
}

/// Indices of the diagonal (toral) basis vectors of the algebras built here,
/// recognized by label prefix.
pub fn toral_indices(lie: &LieAlgebra) -> Vec<usize> {
    (0..lie.dim())
        .filter(|&i| lie.label(i).starts_with("H[") || is_diagonal_label(lie.label(i)))
        .collect()
}

fn is_diagonal_label(label: &str) -> bool {
    // F[r,c] / G[r,c] with c = n-1-r is diagonal-free for so/sp; the toral
    // elements there are F[r,r] / G[r,r].
    let Some(rest) = label
        .strip_prefix("F[")
        .or_else(|| label.strip_prefix("G["))
    else {
        return false;
    };
    let Some(inner) = rest.strip_suffix(']') else {
        return false;
    };
    let mut parts = inner.split(',');
    match (parts.next(), parts.next()) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn dimensions_match_the_classical_formulas() {
        let f = fp(5);
        assert_eq!(gl(3, f).unwrap().0.lie.dim(), 9);
        assert_eq!(sl(3, f).unwrap().lie.dim(), 8);
        assert_eq!(sl(5, f).unwrap().lie.dim(), 24);
        assert_eq!(psl(5, f).unwrap().lie.dim(), 23);
        assert_eq!(psl(3, f).unwrap().lie.dim(), 8);
        assert_eq!(so(7, f).unwrap().lie.dim(), 21);
        assert_eq!(so(8, f).unwrap().lie.dim(), 28);
        assert_eq!(sp(4, f).unwrap().lie.dim(), 10);
        assert_eq!(sp(6, f).unwrap().lie.dim(), 21);
    }

    #[test]
    fn all_families_verify_axioms() {
        let f = fp(5);
        for alg in [
            sl(2, f).unwrap(),
            sl(3, f).unwrap(),
            psl(5, f).unwrap(),
            so(5, f).unwrap(),
            sp(4, f).unwrap(),
        ] {
            alg.lie.verify_lie().unwrap();
            alg.verify_restricted().unwrap();
        }
    }

    #[test]
    fn simplicity_of_the_small_members() {
        let f = fp(7);
        assert!(sl(3, f).unwrap().lie.is_simple(11).unwrap());
        assert!(so(5, f).unwrap().lie.is_simple(12).unwrap());
        assert!(sp(4, f).unwrap().lie.is_simple(13).unwrap());
        // sl(7) at p=7 has the scalars as center, so it is not simple.
        assert!(!sl(7, f).unwrap().lie.is_simple(14).unwrap());
        assert!(psl(7, f).unwrap().lie.is_simple(15).unwrap());
    }

    #[test]
    fn psl_center_is_killed_exactly_when_p_divides_n() {
        let f = fp(5);
        let s5 = sl(5, f).unwrap();
        assert_eq!(s5.lie.center().dim(), 1);
        let p5 = psl(5, f).unwrap();
        assert_eq!(p5.lie.center().dim(), 0);
        assert_eq!(p5.lie.dim(), 23);
        p5.verify_restricted().unwrap();
        let s4 = sl(4, f).unwrap();
        assert_eq!(s4.lie.center().dim(), 0);
    }

    #[test]
    fn so_and_sp_preserve_their_forms() {
        // Recheck the defining condition G A = -(G A)^T directly for so(6).
        let f = fp(5);
        let n = 6;
        let s = so(n, f).unwrap();
        assert_eq!(s.lie.dim(), 15);
        s.lie.verify_lie().unwrap();
        s.verify_restricted().unwrap();
    }

    #[test]
    fn small_primes_are_rejected() {
        for p in [2u64, 3] {
            let f = fp(p);
            assert!(matches!(
                sl(3, f),
                Err(Error::UnsupportedPrime { .. })
            ));
        }
    }

    #[test]
    fn torus_grading_of_sl3_has_root_spaces() {
        let f = fp(7);
        let s = sl(3, f).unwrap();
        let torals = toral_indices(&s.lie);
        assert_eq!(torals.len(), 2);
        let toral_vecs: Vec<Vec<u64>> = torals
            .iter()
            .map(|&i| {
                let mut v = vec![0u64; s.lie.dim()];
                v[i] = 1;
                v
            })
            .collect();
        let grading = s.lie.torus_grading(&toral_vecs).unwrap();
        // Six root spaces of dimension 1 plus the 2-dimensional zero space.
        let (class_of, reps) = grading.classes();
        assert_eq!(reps.len(), 7);
        let zero_class = reps.iter().position(|w| w.iter().all(|&x| x == 0)).unwrap();
        let zero_count = class_of.iter().filter(|&&c| c == zero_class).count();
        assert_eq!(zero_count, 2);
    }
}
