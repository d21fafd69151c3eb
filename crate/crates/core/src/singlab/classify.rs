use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use super::spec::SingularitySpec;
use crate::branches::{AmbientRing, ValuationVector};
use crate::error::Result;
use crate::exactfield::Elem;

/// The pair `(v(x), v(y))`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValuationType {
    pub x: ValuationVector,
    pub y: ValuationVector,
}

impl fmt::Display for ValuationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Debug for ValuationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl ValuationType {
    pub fn permuted(&self, perm: &[usize]) -> Self {
        ValuationType {
            x: self.x.permuted(perm),
            y: self.y.permuted(perm),
        }
    }
}

pub fn valuation_type(spec: &SingularitySpec) -> Result<ValuationType> {
    let amb = spec.ambient()?;
    Ok(ValuationType {
        x: spec.element(&amb, "x")?.valuation(),
        y: spec.element(&amb, "y")?.valuation(),
    })
}

/// Valuation type after greedily replacing `x`, `y` by `g - c*x^a*y^b`
/// (`a + b >= 2`) whenever that raises the valuation vector.
///
/// Such replacements keep the generated algebra and the ideal `(x, y)`, so
/// the result does not depend on substitutions like `y -> y + x^2`.
pub fn normalized_valuation_type(spec: &SingularitySpec) -> Result<ValuationType> {
    let amb = spec.ambient()?;
    let x = spec.element(&amb, "x")?.into_coeffs();
    let y = spec.element(&amb, "y")?.into_coeffs();
    let (x, y) = normalize_pair(&amb, x, y);
    Ok(ValuationType {
        x: amb.valuation_vec(&x),
        y: amb.valuation_vec(&y),
    })
}

fn dominates(new: &ValuationVector, old: &ValuationVector) -> bool {
    let key = |v: &Option<usize>| v.map_or(usize::MAX, |x| x);
    let mut strict = false;
    for (a, b) in new.0.iter().zip(&old.0) {
        match key(a).cmp(&key(b)) {
            std::cmp::Ordering::Less => return false,
            std::cmp::Ordering::Greater => strict = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    strict
}

pub fn normalize_pair(
    amb: &AmbientRing,
    mut x: Vec<Elem>,
    mut y: Vec<Elem>,
) -> (Vec<Elem>, Vec<Elem>) {
    let f = amb.field().clone();
    let n = amb.truncation();
    'outer: loop {
        let monomials = monomials(amb, &x, &y, n);
        for target in 0..2 {
            let g = if target == 0 { &x } else { &y };
            let vg = amb.valuation_vec(g);
            for mu in &monomials {
                for c in 1..f.order() {
                    let cand: Vec<Elem> = g
                        .iter()
                        .zip(mu)
                        .map(|(&a, &m)| f.sub(a, f.mul(c, m)))
                        .collect();
                    if dominates(&amb.valuation_vec(&cand), &vg) {
                        if target == 0 {
                            x = cand;
                        } else {
                            y = cand;
                        }
                        continue 'outer;
                    }
                }
            }
        }
        return (x, y);
    }
}

/// Nonzero `x^a y^b` with `2 <= a + b`, ordered by total degree then `a`.
fn monomials(amb: &AmbientRing, x: &[Elem], y: &[Elem], n: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for deg in 2..=n {
        let mut any = false;
        for a in (0..=deg).rev() {
            let m = amb.mul_vec(&amb.pow_vec(x, a), &amb.pow_vec(y, deg - a));
            if m.iter().any(|&c| c != 0) {
                out.push(m);
                any = true;
            }
        }
        if !any {
            break;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Result of matching a valuation type against the `T` and `P` tables.
///
/// The `P` table has no entries depending on `p, q`, so only the parity
/// row is recoverable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeClass {
    T { p: usize, q: usize },
    P { p: Parity, q: Parity },
    Unrecognized,
}

impl fmt::Display for TypeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeClass::T { p, q } => write!(f, "T({p},{q})"),
            TypeClass::P { p, q } => write!(f, "P({p},{q})"),
            TypeClass::Unrecognized => f.write_str("unrecognized"),
        }
    }
}

impl Serialize for TypeClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn admissible(p: usize, q: usize) -> bool {
    p >= 1 && q >= 1 && 2 * (p + q) <= p * q
}

fn fin(v: &Option<usize>) -> Option<usize> {
    *v
}

fn match_t(a: &ValuationVector, b: &ValuationVector) -> Option<(usize, usize)> {
    let (a, b) = (&a.0, &b.0);
    let (p, q) = match a.len() {
        2 => {
            if a[0] != Some(2) || b[1] != Some(2) {
                return None;
            }
            let p = fin(&a[1])? + 2;
            let q = fin(&b[0])? + 2;
            if p % 2 == 0 || q % 2 == 0 {
                return None;
            }
            (p, q)
        }
        3 => {
            if a[0] != Some(1) || a[1] != Some(1) || b[0].is_some() || b[2] != Some(2) {
                return None;
            }
            let p = fin(&a[2])? + 2;
            let q = 2 * (fin(&b[1])? + 1);
            if p % 2 == 0 {
                return None;
            }
            (p, q)
        }
        4 => {
            if a[0] != Some(1) || a[1] != Some(1) || a[3].is_some() {
                return None;
            }
            if b[1].is_some() || b[2] != Some(1) || b[3] != Some(1) {
                return None;
            }
            (2 * (fin(&a[2])? + 1), 2 * (fin(&b[0])? + 1))
        }
        _ => return None,
    };
    let entries_positive = a.iter().chain(b).all(|v| v.is_none_or(|x| x >= 1));
    (entries_positive && admissible(p, q)).then_some((p, q))
}

fn match_p(a: &ValuationVector, b: &ValuationVector) -> Option<(Parity, Parity)> {
    let (a, b) = (&a.0, &b.0);
    match a.len() {
        2 if a[..] == [Some(2), None] && b[..] == [None, Some(2)] => {
            Some((Parity::Odd, Parity::Odd))
        }
        3 if a[..] == [Some(1), Some(1), None] && b[..] == [None, None, Some(2)] => {
            Some((Parity::Odd, Parity::Even))
        }
        4 if a[..] == [Some(1), Some(1), None, None] && b[..] == [None, None, Some(1), Some(1)] => {
            Some((Parity::Even, Parity::Even))
        }
        _ => None,
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| cur[i] < cur[i + 1])
        else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

/// Matches against the tables up to a simultaneous branch permutation and
/// the swap of `x` and `y` (which exchanges the roles of `p` and `q`).
pub fn classify_type(vt: &ValuationType) -> TypeClass {
    let s = vt.x.len();
    if vt.y.len() != s || !(2..=4).contains(&s) {
        return TypeClass::Unrecognized;
    }
    let perms = permutations(s);
    for swap in [false, true] {
        let (a, b) = if swap { (&vt.y, &vt.x) } else { (&vt.x, &vt.y) };
        for perm in &perms {
            if let Some((p, q)) = match_t(&a.permuted(perm), &b.permuted(perm)) {
                return if swap {
                    TypeClass::T { p: q, q: p }
                } else {
                    TypeClass::T { p, q }
                };
            }
        }
    }
    for swap in [false, true] {
        let (a, b) = if swap { (&vt.y, &vt.x) } else { (&vt.x, &vt.y) };
        for perm in &perms {
            if let Some((p, q)) = match_p(&a.permuted(perm), &b.permuted(perm)) {
                return if swap {
                    TypeClass::P { p: q, q: p }
                } else {
                    TypeClass::P { p, q }
                };
            }
        }
    }
    TypeClass::Unrecognized
}
