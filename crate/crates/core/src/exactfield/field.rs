use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{CmError, Result};

/// A field element: the residue polynomial's base-`p` digits packed into
/// one integer (`c_0 + c_1 p + ... + c_{e-1} p^{e-1}`).
pub type Elem = u32;

/// Largest field order that gets log/antilog tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// Identifies a finite field by characteristic and degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(rename = "char")]
    pub characteristic: u32,
    pub degree: u32,
}

struct Tables {
    exp: Vec<Elem>,
    log: Vec<u32>,
}

struct FieldData {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, low degree first, length `e + 1`.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// Exact arithmetic in `F_{p^e}`.
///
/// Cloning is cheap; all clones share one immutable table set.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.e)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    /// Builds `F_{p^e}` with the lexicographically smallest monic
    /// irreducible modulus (coefficients compared from the constant term up).
    pub fn new(p: u32, e: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(CmError::NotPrime(p as u64));
        }
        if !(1..=8).contains(&e) {
            return Err(CmError::DegreeOutOfRange(e));
        }
        let q = (p as u128).pow(e);
        if q >= (1u128 << 31) {
            return Err(CmError::FieldTooLarge(q));
        }
        let prime = Field(Arc::new(FieldData {
            p,
            e: 1,
            q: p,
            modulus: vec![0, 1],
            tables: None,
        }));
        if e == 1 {
            return Ok(prime);
        }
        let modulus = smallest_irreducible(&prime, e as usize);
        let mut data = FieldData {
            p,
            e,
            q: q as u32,
            modulus,
            tables: None,
        };
        if (q as u64) <= TABLE_LIMIT {
            data.tables = Some(build_tables(&data));
        }
        Ok(Field(Arc::new(data)))
    }

    pub fn from_spec(spec: FieldSpec) -> Result<Field> {
        Field::new(spec.characteristic, spec.degree)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            characteristic: self.0.p,
            degree: self.0.e,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.0.q
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        0
    }

    #[inline]
    pub fn one(&self) -> Elem {
        1
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, v: i64) -> Elem {
        v.rem_euclid(self.0.p as i64) as Elem
    }

    /// Element with the given residue-polynomial coordinates (constant first).
    pub fn from_coords(&self, coords: &[i64]) -> Result<Elem> {
        if coords.len() > self.0.e as usize {
            return Err(CmError::input(format!(
                "coefficient vector of length {} exceeds field degree {}",
                coords.len(),
                self.0.e
            )));
        }
        let mut out = 0u64;
        let mut scale = 1u64;
        for &c in coords {
            out += c.rem_euclid(self.0.p as i64) as u64 * scale;
            scale *= self.0.p as u64;
        }
        Ok(out as Elem)
    }

    pub fn coords(&self, a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.0.e as usize);
        let mut a = a;
        for _ in 0..self.0.e {
            out.push(a % self.0.p);
            a /= self.0.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.0.p;
        if self.0.e == 1 {
            let s = a + b;
            if s >= p {
                s - p
            } else {
                s
            }
        } else if p == 2 {
            a ^ b
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0;
            let mut scale = 1;
            for _ in 0..self.0.e {
                out += ((a % p + b % p) % p) * scale;
                a /= p;
                b /= p;
                scale *= p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.0.p;
        if self.0.e == 1 {
            if a == 0 {
                0
            } else {
                p - a
            }
        } else if p == 2 {
            a
        } else {
            let mut a = a;
            let mut out = 0;
            let mut scale = 1;
            for _ in 0..self.0.e {
                out += ((p - a % p) % p) * scale;
                a /= p;
                scale *= p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.0.e == 1 {
            return ((a as u64 * b as u64) % self.0.p as u64) as Elem;
        }
        if let Some(t) = &self.0.tables {
            let s = t.log[a as usize] + t.log[b as usize];
            return t.exp[s as usize];
        }
        slow_mul(&self.0, a, b)
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        if let Some(t) = &self.0.tables {
            let n = self.0.q - 1;
            let l = t.log[a as usize];
            return t.exp[((n - l) % n) as usize];
        }
        self.pow(a, self.0.q as u64 - 2)
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, mut n: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// `a^p`, the absolute Frobenius.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.0.p as u64)
    }

    /// Inverse of [`Field::frobenius`] iterated `k` times.
    pub fn frobenius_inv_pow(&self, a: Elem, k: u32) -> Elem {
        // Frobenius has order e on F_q.
        let e = self.0.e;
        let steps = (e - k % e) % e;
        let mut x = a;
        for _ in 0..steps {
            x = self.frobenius(x);
        }
        x
    }

    /// Sum `a + b*c`, the inner-loop operation of elimination.
    #[inline]
    pub fn mul_add(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.add(a, self.mul(b, c))
    }
}

/// The embedding `F_{p^e} -> F_{p^E}` (`e | E`) sending the generator to
/// the least root of its modulus.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    source: Field,
    target: Field,
    /// Images of `1, x, .., x^{e-1}`.
    powers: Vec<Elem>,
}

impl FieldEmbedding {
    pub fn new(source: &Field, target: &Field) -> Result<Self> {
        if source.characteristic() != target.characteristic()
            || target.degree() % source.degree() != 0
        {
            return Err(CmError::input(format!(
                "{source:?} does not embed in {target:?}"
            )));
        }
        let modulus: Vec<Elem> = source.modulus().to_vec();
        let alpha = poly::split_roots(target, &modulus)[0];
        let mut powers = Vec::with_capacity(source.degree() as usize);
        let mut acc = target.one();
        for _ in 0..source.degree() {
            powers.push(acc);
            acc = target.mul(acc, alpha);
        }
        Ok(FieldEmbedding {
            source: source.clone(),
            target: target.clone(),
            powers,
        })
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn map(&self, x: Elem) -> Elem {
        let t = &self.target;
        self.source
            .coords(x)
            .into_iter()
            .zip(&self.powers)
            .fold(t.zero(), |acc, (c, &pw)| t.mul_add(acc, c, pw))
    }

    pub fn map_vec(&self, v: &[Elem]) -> Vec<Elem> {
        v.iter().map(|&x| self.map(x)).collect()
    }
}

fn slow_mul(d: &FieldData, a: Elem, b: Elem) -> Elem {
    let p = d.p as u64;
    let e = d.e as usize;
    let da = digits(a, d.p, e);
    let db = digits(b, d.p, e);
    let mut prod = vec![0u64; 2 * e - 1];
    for i in 0..e {
        for j in 0..e {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in d.modulus[..e].iter().enumerate() {
            let idx = k - e + i;
            prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
        }
    }
    let mut out = 0u64;
    let mut scale = 1u64;
    for &c in &prod[..e] {
        out += c * scale;
        scale *= p;
    }
    out as Elem
}

fn digits(a: Elem, p: u32, e: usize) -> Vec<u64> {
    let mut a = a;
    (0..e)
        .map(|_| {
            let d = (a % p) as u64;
            a /= p;
            d
        })
        .collect()
}

fn build_tables(d: &FieldData) -> Tables {
    let n = (d.q - 1) as u64;
    let factors = prime_factors(n);
    let pow_slow = |a: Elem, mut k: u64| {
        let mut base = a;
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = slow_mul(d, acc, base);
            }
            base = slow_mul(d, base, base);
            k >>= 1;
        }
        acc
    };
    let gen = (2..d.q)
        .find(|&g| factors.iter().all(|&r| pow_slow(g, n / r) != 1))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0; 2 * n as usize];
    let mut log = vec![0; d.q as usize];
    let mut x: Elem = 1;
    for i in 0..n as usize {
        exp[i] = x;
        exp[i + n as usize] = x;
        log[x as usize] = i as u32;
        x = slow_mul(d, x, gen);
    }
    Tables { exp, log }
}

fn smallest_irreducible(prime: &Field, e: usize) -> Vec<u32> {
    let p = prime.order() as u64;
    let total = p.pow(e as u32);
    for idx in 0..total {
        // c_0 is the most significant digit so that the iteration order is
        // lexicographic with the constant term compared first.
        let mut coeffs = vec![0u32; e + 1];
        let mut r = idx;
        for i in (0..e).rev() {
            coeffs[i] = (r % p) as u32;
            r /= p;
        }
        coeffs[e] = 1;
        if poly::is_irreducible(prime, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
