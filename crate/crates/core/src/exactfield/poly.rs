//! Dense univariate polynomials over a [`Field`], constant term first.
//!
//! The zero polynomial is the empty vector; every function returns trimmed
//! results.

use super::field::{Elem, Field};

pub type Poly = Vec<Elem>;

pub fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[Elem]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn x() -> Poly {
    vec![0, 1]
}

pub fn constant(c: Elem) -> Poly {
    trim(vec![c])
}

pub fn add(f: &Field, a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            f.add(x, y)
        })
        .collect();
    trim(out)
}

pub fn sub(f: &Field, a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            f.sub(x, y)
        })
        .collect();
    trim(out)
}

pub fn scale(f: &Field, a: &[Elem], c: Elem) -> Poly {
    trim(a.iter().map(|&x| f.mul(x, c)).collect())
}

pub fn mul(f: &Field, a: &[Elem], b: &[Elem]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.mul_add(out[i + j], x, y);
        }
    }
    trim(out)
}

/// Quotient and remainder; panics when dividing by zero.
pub fn divrem(f: &Field, a: &[Elem], b: &[Elem]) -> (Poly, Poly) {
    let db = degree(b).expect("division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let lead_inv = f.inv(b[db]);
    let mut quot = vec![0; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        let shift = dr - db;
        quot[shift] = c;
        for (i, &bc) in b[..=db].iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, bc));
        }
        r = trim(r);
    }
    (trim(quot), r)
}

pub fn rem(f: &Field, a: &[Elem], b: &[Elem]) -> Poly {
    divrem(f, a, b).1
}

pub fn monic(f: &Field, a: &[Elem]) -> Poly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => scale(f, a, f.inv(a[d])),
    }
}

/// Monic greatest common divisor.
pub fn gcd(f: &Field, a: &[Elem], b: &[Elem]) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

/// Extended Euclid: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
pub fn xgcd(f: &Field, a: &[Elem], b: &[Elem]) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1) = (constant(1), Vec::new());
    let (mut t0, mut t1) = (Vec::new(), constant(1));
    while !r1.is_empty() {
        let (qt, r) = divrem(f, &r0, &r1);
        let s = sub(f, &s0, &mul(f, &qt, &s1));
        let t = sub(f, &t0, &mul(f, &qt, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    match degree(&r0) {
        None => (r0, s0, t0),
        Some(d) => {
            let c = f.inv(r0[d]);
            (scale(f, &r0, c), scale(f, &s0, c), scale(f, &t0, c))
        }
    }
}

pub fn mulmod(f: &Field, a: &[Elem], b: &[Elem], m: &[Elem]) -> Poly {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &Field, a: &[Elem], mut n: u64, m: &[Elem]) -> Poly {
    let mut base = rem(f, a, m);
    let mut acc = rem(f, &constant(1), m);
    while n > 0 {
        if n & 1 == 1 {
            acc = mulmod(f, &acc, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        n >>= 1;
    }
    acc
}

pub fn eval(f: &Field, a: &[Elem], x: Elem) -> Elem {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Ben-Or style irreducibility test over the field `f`.
pub fn is_irreducible(f: &Field, a: &[Elem]) -> bool {
    let Some(d) = degree(a) else { return false };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let m = monic(f, a);
    let q = f.order() as u64;
    let mut cur = rem(f, &x(), &m);
    for _ in 1..=d / 2 {
        cur = powmod(f, &cur, q, &m);
        let g = gcd(f, &m, &sub(f, &cur, &x()));
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Squarefree-ness via `gcd(a, a')`.
pub fn is_squarefree(f: &Field, a: &[Elem]) -> bool {
    let da = derivative(f, a);
    if da.is_empty() {
        return degree(a).is_none_or(|d| d == 0);
    }
    degree(&gcd(f, a, &da)) == Some(0)
}

pub fn derivative(f: &Field, a: &[Elem]) -> Poly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
            .collect(),
    )
}

/// Distinct roots of a polynomial that splits into distinct linear factors
/// over `f`, found by deterministic equal-degree splitting.
pub fn split_roots(f: &Field, a: &[Elem]) -> Vec<Elem> {
    let a = monic(f, a);
    let mut out = Vec::new();
    split_rec(f, &a, &mut out);
    out.sort_unstable();
    out
}

fn split_rec(f: &Field, a: &[Elem], out: &mut Vec<Elem>) {
    match degree(a) {
        None | Some(0) => {}
        Some(1) => out.push(f.neg(f.div(a[0], a[1]))),
        Some(_) => {
            let q = f.order() as u64;
            for shift in f
                .elements()
                .skip(if f.characteristic() == 2 { 1 } else { 0 })
            {
                let probe = if f.characteristic() == 2 {
                    // Trace of shift*x, valued in F_2.
                    let mut acc = Vec::new();
                    let mut term = rem(f, &vec![0, shift], a);
                    let k = q.trailing_zeros() as usize;
                    for _ in 0..k {
                        acc = add(f, &acc, &term);
                        term = mulmod(f, &term, &term, a);
                    }
                    acc
                } else {
                    let lin = vec![shift, 1];
                    sub(f, &powmod(f, &lin, (q - 1) / 2, a), &constant(1))
                };
                let g = gcd(f, a, &probe);
                let dg = degree(&g).unwrap_or(0);
                if dg > 0 && Some(dg) < degree(a) {
                    let (h, _) = divrem(f, a, &g);
                    split_rec(f, &g, out);
                    split_rec(f, &monic(f, &h), out);
                    return;
                }
            }
            panic!("polynomial does not split into distinct linear factors");
        }
    }
}

/// All roots of `a` in `f` by direct evaluation.
pub fn roots_by_evaluation(f: &Field, a: &[Elem]) -> Vec<Elem> {
    f.elements().filter(|&x| eval(f, a, x) == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_quadratic_over_f2() {
        let f = Field::new(2, 1).unwrap();
        let quads: Vec<Poly> = (0..4)
            .map(|i| vec![i & 1, (i >> 1) & 1, 1])
            .filter(|p| is_irreducible(&f, p))
            .collect();
        assert_eq!(quads, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn irreducible_count_matches_necklace_formula() {
        // Number of monic irreducibles of degree 3 over F_3 is (27-3)/3 = 8.
        let f = Field::new(3, 1).unwrap();
        let mut count = 0;
        for i in 0..27u32 {
            let p = vec![i % 3, (i / 3) % 3, i / 9, 1];
            if is_irreducible(&f, &p) {
                count += 1;
            }
        }
        assert_eq!(count, 8);
    }

    #[test]
    fn divrem_identity() {
        let f = Field::new(5, 1).unwrap();
        let a = vec![1, 2, 3, 4, 1];
        let b = vec![2, 0, 1];
        let (q, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
        assert!(degree(&r).is_none_or(|d| d < 2));
    }

    #[test]
    fn xgcd_bezout() {
        let f = Field::new(7, 1).unwrap();
        let a = vec![3, 1, 4, 1];
        let b = vec![5, 9 % 7, 2];
        let (g, s, t) = xgcd(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &s, &a), &mul(&f, &t, &b)), g);
        assert_eq!(g, gcd(&f, &a, &b));
    }

    #[test]
    fn split_roots_agree_with_evaluation() {
        for (p, e) in [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (7, 1)] {
            let f = Field::new(p, e).unwrap();
            let roots: Vec<Elem> = f.elements().step_by(2).take(4).collect();
            let mut poly = constant(1);
            for &r in &roots {
                poly = mul(&f, &poly, &vec![f.neg(r), 1]);
            }
            let mut expect = roots.clone();
            expect.sort_unstable();
            assert_eq!(split_roots(&f, &poly), expect, "{f:?}");
            assert_eq!(roots_by_evaluation(&f, &poly), expect);
        }
    }
}
