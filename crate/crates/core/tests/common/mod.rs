//! Oracles written without the library's linear algebra.

use std::collections::BTreeMap;

use cmlab::exactfield::{Elem, Field, FieldSpec};
use cmlab::singlab::{SingularitySpec, Term};

pub fn fs(p: u32, e: u32) -> FieldSpec {
    FieldSpec {
        characteristic: p,
        degree: e,
    }
}

pub fn spec(
    p: u32,
    branches: usize,
    truncation: usize,
    gens: &[(&str, Vec<Vec<Term>>)],
) -> SingularitySpec {
    SingularitySpec {
        field: fs(p, 1),
        branches,
        truncation,
        generators: gens
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    }
}

pub fn cusp(p: u32) -> SingularitySpec {
    spec(
        p,
        1,
        8,
        &[
            ("x", vec![vec![(2, vec![1])]]),
            ("y", vec![vec![(3, vec![1])]]),
        ],
    )
}

pub fn node(p: u32) -> SingularitySpec {
    spec(
        p,
        2,
        6,
        &[
            ("x", vec![vec![(1, vec![1])], vec![]]),
            ("y", vec![vec![], vec![(1, vec![1])]]),
        ],
    )
}

/// `s` coordinate axes: `x_i = t_i e_i`.
pub fn axes(s: usize, p: u32) -> SingularitySpec {
    let mut gens = BTreeMap::new();
    for i in 0..s {
        let mut per = vec![Vec::new(); s];
        per[i] = vec![(1, vec![1])];
        gens.insert(format!("x{}", i + 1), per);
    }
    SingularitySpec {
        field: fs(p, 1),
        branches: s,
        truncation: 5,
        generators: gens,
    }
}

/// Prime-field residue of an integer coefficient vector (degree 1 only).
fn residue(c: &[i64], p: i64) -> i64 {
    c.first().copied().unwrap_or(0).rem_euclid(p)
}

/// Per-branch order of vanishing read off the raw terms.
pub fn term_valuation(spec: &SingularitySpec, name: &str) -> Vec<Option<usize>> {
    let p = i64::from(spec.field.characteristic);
    spec.generators[name]
        .iter()
        .map(|terms| {
            terms
                .iter()
                .filter(|(_, c)| residue(c, p) != 0)
                .map(|(e, _)| *e)
                .min()
        })
        .collect()
}

/// `d(Lambda_0)` as the branchwise minimum valuation over all generators:
/// `m Lambda_0` is the product of the ideals `t_i^{min}` on each branch.
pub fn d_lambda0_oracle(spec: &SingularitySpec) -> Vec<usize> {
    let mut mins = vec![usize::MAX; spec.branches];
    for name in spec.generators.keys() {
        for (b, v) in term_valuation(spec, name).into_iter().enumerate() {
            if let Some(v) = v {
                mins[b] = mins[b].min(v);
            }
        }
    }
    let mut out: Vec<usize> = mins.into_iter().filter(|&m| m != usize::MAX).collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// The valuation rows of the `T_pq` definition; `None` is infinity. For
/// `p` even and `q` odd the odd/even row of `T(q, p)` with `x`, `y`
/// exchanged.
pub fn tpq_table(p: usize, q: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let s = Some;
    match (p % 2, q % 2) {
        (1, 1) => (vec![s(2), s(p - 2)], vec![s(q - 2), s(2)]),
        (1, 0) => (vec![s(1), s(1), s(p - 2)], vec![None, s(q / 2 - 1), s(2)]),
        (0, 0) => (
            vec![s(1), s(1), s(p / 2 - 1), None],
            vec![s(q / 2 - 1), None, s(1), s(1)],
        ),
        _ => {
            let (x, y) = tpq_table(q, p);
            (y, x)
        }
    }
}

/// Equality of valuation pairs up to a simultaneous branch permutation.
pub fn same_columns(
    a: (&[Option<usize>], &[Option<usize>]),
    b: (&[Option<usize>], &[Option<usize>]),
) -> bool {
    let cols = |x: &[Option<usize>], y: &[Option<usize>]| {
        let mut c: Vec<(Option<usize>, Option<usize>)> =
            x.iter().copied().zip(y.iter().copied()).collect();
        c.sort();
        c
    };
    a.0.len() == b.0.len() && cols(a.0, a.1) == cols(b.0, b.1)
}

/// Product of two branch term lists over the integers, truncated below `n`.
fn mul_terms(a: &[Term], b: &[Term], n: usize) -> Vec<Term> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            if ea + eb < n {
                *acc.entry(ea + eb).or_default() += ca[0] * cb[0];
            }
        }
    }
    acc.into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(e, c)| (e, vec![c]))
        .collect()
}

fn add_terms(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for (e, c) in a.iter().chain(b) {
        *acc.entry(*e).or_default() += c[0];
    }
    acc.into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(e, c)| (e, vec![c]))
        .collect()
}

/// The substitution `y -> y + x^2` with integer coefficients, so that it
/// reads correctly over every prime field; degree-1 specs only.
pub fn shear(spec: &SingularitySpec) -> SingularitySpec {
    let n = spec.truncation;
    let x = spec.generators["x"].clone();
    let mut out = spec.clone();
    let y = out.generators.get_mut("y").expect("y");
    for (yb, xb) in y.iter_mut().zip(&x) {
        *yb = add_terms(yb, &mul_terms(xb, xb, n));
    }
    out
}

/// Every vector of `F^dim`, by counting in base `|F|`.
pub fn all_vectors(f: &Field, dim: usize) -> Vec<Vec<Elem>> {
    let q = f.order();
    let total = (q as usize).pow(dim as u32);
    (0..total)
        .map(|mut i| {
            (0..dim)
                .map(|_| {
                    let d = (i % q as usize) as Elem;
                    i /= q as usize;
                    d
                })
                .collect()
        })
        .collect()
}

/// Rank by plain Gaussian elimination.
pub fn rank(f: &Field, rows: &[Vec<Elem>]) -> usize {
    let mut m: Vec<Vec<Elem>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = f.inv(m[r][c]);
        let pivot: Vec<Elem> = m[r].iter().map(|&x| f.mul(x, inv)).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let k = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = f.sub(*x, f.mul(k, y));
                }
            }
        }
        m[r] = pivot;
        r += 1;
    }
    r
}

/// `[m choose d]_q`.
pub fn gaussian(m: usize, d: usize, q: u128) -> u128 {
    if d > m {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..d {
        num *= q.pow((m - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Multiplication from structure constants `b_i b_j = sum c[(i d + j) d + k] b_k`.
pub fn sc_mul(f: &Field, d: usize, sc: &[Elem], a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut out = vec![0; d];
    for i in 0..d {
        if a[i] == 0 {
            continue;
        }
        for j in 0..d {
            if b[j] == 0 {
                continue;
            }
            let ab = f.mul(a[i], b[j]);
            for (k, o) in out.iter_mut().enumerate() {
                let c = sc[(i * d + j) * d + k];
                if c != 0 {
                    *o = f.add(*o, f.mul(ab, c));
                }
            }
        }
    }
    out
}

/// A commutative algebra as `(dim, structure constants, one)`.
pub type ScAlgebra = (usize, Vec<Elem>, Vec<Elem>);

/// `F_p[x] / (g)` on the basis `1, x, ..., x^{deg g - 1}`; `g` monic, low
/// degree first.
pub fn univariate(f: &Field, g: &[Elem]) -> ScAlgebra {
    let d = g.len() - 1;
    let reduce = |mut c: Vec<Elem>| -> Vec<Elem> {
        for top in (d..c.len()).rev() {
            let k = c[top];
            if k != 0 {
                for (i, &gi) in g.iter().enumerate() {
                    c[top - d + i] = f.sub(c[top - d + i], f.mul(k, gi));
                }
            }
        }
        c.truncate(d);
        c
    };
    let mut sc = vec![0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            let mut c = vec![0; 2 * d];
            c[i + j] = 1;
            let r = reduce(c);
            sc[(i * d + j) * d..(i * d + j + 1) * d].copy_from_slice(&r);
        }
    }
    let mut one = vec![0; d];
    one[0] = 1;
    (d, sc, one)
}

/// `k[x, y] / I` for the monomial ideal whose staircase has column heights
/// `heights` (a partition).
pub fn staircase(heights: &[usize]) -> ScAlgebra {
    let monos: Vec<(usize, usize)> = heights
        .iter()
        .enumerate()
        .flat_map(|(i, &h)| (0..h).map(move |j| (i, j)))
        .collect();
    let d = monos.len();
    let mut sc = vec![0; d * d * d];
    for (a, &(i1, j1)) in monos.iter().enumerate() {
        for (b, &(i2, j2)) in monos.iter().enumerate() {
            if let Some(k) = monos.iter().position(|&m| m == (i1 + i2, j1 + j2)) {
                sc[(a * d + b) * d + k] = 1;
            }
        }
    }
    let mut one = vec![0; d];
    one[monos.iter().position(|&m| m == (0, 0)).unwrap()] = 1;
    (d, sc, one)
}

/// Group algebra of `Z/n1 x Z/n2` over the prime field.
pub fn group_algebra(n1: usize, n2: usize) -> ScAlgebra {
    let d = n1 * n2;
    let mut sc = vec![0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            let (a1, a2) = (a / n2, a % n2);
            let (b1, b2) = (b / n2, b % n2);
            let k = ((a1 + b1) % n1) * n2 + (a2 + b2) % n2;
            sc[(a * d + b) * d + k] = 1;
        }
    }
    let mut one = vec![0; d];
    one[0] = 1;
    (d, sc, one)
}

pub fn product(a: &ScAlgebra, b: &ScAlgebra) -> ScAlgebra {
    let (da, db) = (a.0, b.0);
    let d = da + db;
    let mut sc = vec![0; d * d * d];
    for i in 0..da {
        for j in 0..da {
            for k in 0..da {
                sc[(i * d + j) * d + k] = a.1[(i * da + j) * da + k];
            }
        }
    }
    for i in 0..db {
        for j in 0..db {
            for k in 0..db {
                sc[((da + i) * d + da + j) * d + da + k] = b.1[(i * db + j) * db + k];
            }
        }
    }
    let mut one = a.2.clone();
    one.extend(&b.2);
    (d, sc, one)
}

/// Partitions of `n` as non-increasing part lists.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// A monic polynomial of degree `n` over `f` without roots; irreducible
/// for `n <= 3`.
pub fn rootless(f: &Field, n: usize) -> Vec<Elem> {
    let eval = |g: &[Elem], x: Elem| g.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c));
    for idx in 0..(f.order() as usize).pow(n as u32) {
        let mut g: Vec<Elem> = Vec::with_capacity(n + 1);
        let mut r = idx;
        for _ in 0..n {
            g.push((r % f.order() as usize) as Elem);
            r /= f.order() as usize;
        }
        g.push(1);
        if n == 1 || f.elements().all(|x| eval(&g, x) != 0) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
