use super::quotient::QuotientAlgebra;
use super::{AlgebraAmbient, FiniteAlgebra};
use crate::error::{CmError, Result};
use crate::exactfield::{left_kernel, poly, unit, Elem, SubspaceBasis};

/// Primitive idempotents of a commutative algebra, in its coordinates.
///
/// The semisimple quotient is split with the Berlekamp subalgebra
/// `{x : x^q = x}` and the pieces are lifted back with `e -> 3e^2 - 2e^3`.
pub fn primitive_idempotents_sc(alg: &QuotientAlgebra) -> Result<Vec<Vec<Elem>>> {
    if !alg.is_commutative() {
        return Err(CmError::pre(
            "primitive idempotents need a commutative algebra",
        ));
    }
    let d = alg.dim();
    if d == 0 {
        return Ok(Vec::new());
    }
    let whole = FiniteAlgebra::full(alg.clone());
    let rad = alg.radical()?;
    let qm = super::quotient::quotient_map(&whole, &rad)?;
    let semisimple = &qm.algebra;
    let split = split_semisimple(semisimple);
    let mut out: Vec<Vec<Elem>> = split
        .iter()
        .map(|e| lift_idempotent(alg, qm.lift(e)))
        .collect();
    out.sort();
    Ok(out)
}

/// Primitive idempotents of a subalgebra, as ambient vectors.
pub fn primitive_idempotents<A: AlgebraAmbient>(alg: &FiniteAlgebra<A>) -> Result<Vec<Vec<Elem>>> {
    let qm = super::quotient::quotient_map(alg, &SubspaceBasis::zero(alg.ambient().dim()))?;
    let mut out: Vec<Vec<Elem>> = primitive_idempotents_sc(&qm.algebra)?
        .iter()
        .map(|e| qm.lift(e))
        .collect();
    out.sort();
    Ok(out)
}

fn lift_idempotent(alg: &QuotientAlgebra, mut e: Vec<Elem>) -> Vec<Elem> {
    let f = alg.field();
    let three = f.from_int(3);
    let two = f.from_int(2);
    loop {
        let e2 = alg.mul(&e, &e);
        if e2 == e {
            return e;
        }
        let e3 = alg.mul(&e2, &e);
        e = e2
            .iter()
            .zip(&e3)
            .map(|(&a, &b)| f.sub(f.mul(three, a), f.mul(two, b)))
            .collect();
    }
}

/// Splits a commutative semisimple algebra into its simple factors.
fn split_semisimple(alg: &QuotientAlgebra) -> Vec<Vec<Elem>> {
    let f = alg.field();
    let d = alg.dim();
    let q = f.order() as u64;
    let rows: Vec<Vec<Elem>> = (0..d)
        .map(|i| {
            let b = unit(d, i);
            let bq = alg.pow(&b, q);
            bq.iter().zip(&b).map(|(&x, &y)| f.sub(x, y)).collect()
        })
        .collect();
    let berlekamp = left_kernel(f, &rows, d);
    let mut idems = vec![alg.one()];
    for b in berlekamp.rows() {
        if idems.len() == berlekamp.dim() {
            break;
        }
        let mut next = Vec::new();
        for e in &idems {
            let y = alg.mul(b, e);
            next.extend(split_by(alg, e, &y));
        }
        idems = next;
    }
    debug_assert_eq!(idems.len(), berlekamp.dim());
    idems
}

/// Splits the idempotent `e` along the distinct eigenvalues of `y in eA`,
/// which satisfies `y^q = y`.
fn split_by(alg: &QuotientAlgebra, e: &[Elem], y: &[Elem]) -> Vec<Vec<Elem>> {
    let f = alg.field();
    let d = alg.dim();
    let mut powers = vec![e.to_vec()];
    let minpoly = loop {
        let next = alg.mul(powers.last().unwrap(), y);
        powers.push(next);
        let ker = left_kernel(f, &powers, d);
        if let Some(row) = ker.rows().first() {
            break poly::monic(f, row);
        }
    };
    if poly::degree(&minpoly) == Some(1) {
        return vec![e.to_vec()];
    }
    let roots = poly::split_roots(f, &minpoly);
    let sub = |lam: Elem| -> Vec<Elem> {
        y.iter()
            .zip(e)
            .map(|(&a, &b)| f.sub(a, f.mul(lam, b)))
            .collect()
    };
    roots
        .iter()
        .map(|&lam| {
            let mut acc = e.to_vec();
            for &mu in roots.iter().filter(|&&m| m != lam) {
                let scale = f.inv(f.sub(lam, mu));
                let factor: Vec<Elem> = sub(mu).iter().map(|&x| f.mul(x, scale)).collect();
                acc = alg.mul(&acc, &factor);
            }
            acc
        })
        .collect()
}
