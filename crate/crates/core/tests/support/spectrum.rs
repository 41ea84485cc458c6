//! Independent spectrum oracle for small graphs: exact rational
//! characteristic polynomial, square-free factorization, and bisection on
//! the (simple) real roots of each factor.

use num_rational::Rational64;

type Poly = Vec<Rational64>;

fn r(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}

fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&r(0)) {
        p.pop();
    }
    p
}

fn deriv(p: &Poly) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * r(i as i64)).collect())
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| *a.get(i).unwrap_or(&r(0)) - *b.get(i).unwrap_or(&r(0))).collect())
}

/// Quotient and remainder of polynomial division.
fn divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut rem = a.clone();
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![], trim(rem));
    }
    let mut q = vec![r(0); rem.len() - db];
    for k in (0..q.len()).rev() {
        let c = rem[k + db] / b[db];
        q[k] = c;
        for (i, bc) in b.iter().enumerate() {
            rem[k + i] -= c * bc;
        }
    }
    (trim(q), trim(rem))
}

fn monic(p: Poly) -> Poly {
    let lead = *p.last().unwrap();
    p.into_iter().map(|c| c / lead).collect()
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, rem) = divmod(&a, &b);
        a = b;
        b = rem;
    }
    monic(a)
}

/// Characteristic polynomial det(xI - A) via Faddeev-LeVerrier, exact.
fn char_poly(n: usize, edges: &[(usize, usize)]) -> Poly {
    let mut a = vec![vec![r(0); n]; n];
    for &(u, v) in edges {
        a[u][v] = r(1);
        a[v][u] = r(1);
    }
    let mut coeffs = vec![r(0); n + 1];
    coeffs[n] = r(1);
    let mut m = vec![vec![r(0); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![r(0); n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum();
            }
            next[i][i] += coeffs[n - k + 1];
        }
        m = next;
        let trace: Rational64 = (0..n).map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<Rational64>()).sum();
        coeffs[n - k] = -trace / r(k as i64);
    }
    coeffs
}

fn eval(p: &Poly, x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + (*c.numer() as f64 / *c.denom() as f64))
}

fn simple_real_roots(p: &Poly, bound: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = 1e-3;
    let mut x = -bound - 0.000_37;
    let mut fx = eval(p, x);
    while x < bound {
        let y = x + step;
        let fy = eval(p, y);
        if fx == 0.0 {
            roots.push(x);
        } else if fx * fy < 0.0 {
            let (mut lo, mut hi) = (x, y);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if eval(p, lo) * eval(p, mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x = y;
        fx = fy;
    }
    roots
}

/// Adjacency eigenvalues, ascending, with multiplicity from a square-free
/// factorization of the exact characteristic polynomial.
pub fn oracle_eigenvalues(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let f = char_poly(n, edges);
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let fp = deriv(&f);
    let a0 = gcd(&f, &fp);
    let mut b = divmod(&f, &a0).0;
    let mut c = divmod(&fp, &a0).0;
    let mut d = sub(&c, &deriv(&b));
    let mut mult = 1;
    while b.len() > 1 {
        let ai = gcd(&b, &d);
        b = divmod(&b, &ai).0;
        c = divmod(&d, &ai).0;
        d = sub(&c, &deriv(&b));
        for root in simple_real_roots(&ai, n as f64 + 1.0) {
            out.extend(std::iter::repeat_n(root, mult));
        }
        mult += 1;
    }
    out.sort_by(f64::total_cmp);
    out
}
