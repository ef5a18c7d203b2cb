//! Exact rational polynomial arithmetic used as an independent root oracle:
//! expand the product of linear factors into monomial coefficients, split it
//! into square-free parts (Yun), and isolate the real roots of each part with
//! Sturm sequences and rational bisection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use pamix::netmodel::AttachmentRecord;

/// Coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<BigRational>);

fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("zero polynomial")
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    pub fn derivative(&self) -> Poly {
        let mut p = Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        );
        p.trim();
        p
    }

    fn monic(&self) -> Poly {
        let l = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero());
        let mut r = self.clone();
        let mut q = vec![BigRational::zero(); self.0.len().saturating_sub(d.degree()).max(1)];
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let c = r.lead() / d.lead();
            q[shift] += &c;
            let mut term = vec![BigRational::zero(); shift];
            term.extend(d.0.iter().map(|x| x * &c));
            r = r.sub(&Poly(term));
        }
        let mut q = Poly(q);
        q.trim();
        (q, r)
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn sign_at(&self, x: &BigRational) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// The likelihood as a monomial-coefficient polynomial in alpha. Degenerate
/// records are constant factors and only scale it.
pub fn expand(records: &[AttachmentRecord]) -> Poly {
    let mut p = Poly::constant(BigRational::one());
    for r in records {
        let (k, e, n) = (r.k as i128, r.e_prev as i128, r.n_prev as i128);
        // alpha (k/e - 1/n) + 1/n
        let factor = Poly({
            let mut v = vec![rat(1, n), rat(k * n - e, e * n)];
            while v.last().is_some_and(|c| c.is_zero()) {
                v.pop();
            }
            v
        });
        p = p.mul(&factor);
    }
    p
}

/// Yun's algorithm: returns (part, multiplicity) with every part square-free
/// and of positive degree.
pub fn square_free(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.div_rem(&a0).0;
    let mut c = fp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

struct Sturm(Vec<Poly>);

impl Sturm {
    fn new(p: &Poly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            // scaling by a positive constant keeps the sign pattern
            let scale = r.lead().abs();
            seq.push(Poly(r.0.iter().map(|c| -c / &scale).collect()));
        }
        Sturm(seq)
    }

    fn variations(&self, x: &BigRational) -> usize {
        let signs: Vec<i32> = self.0.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in (a, b].
    fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Real roots of a square-free polynomial, each refined by exact bisection
/// until the enclosing interval is narrower than `rel_tol` times its bound.
pub fn real_roots(p: &Poly, rel_tol: f64) -> Vec<f64> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let lead = p.lead().abs();
    let bound = p.0.iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |m, x| if x > m { x } else { m })
        + BigRational::one();
    let sturm = Sturm::new(p);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    let two = rat(2, 1);
    let tol = BigRational::from_float(rel_tol).unwrap();
    while let Some((a, b)) = stack.pop() {
        match sturm.count(&a, &b) {
            0 => {}
            1 => {
                let (mut lo, mut hi) = (a, b);
                let mut lo_sign = p.sign_at(&lo);
                loop {
                    let hi_sign = p.sign_at(&hi);
                    if hi_sign == 0 {
                        out.push(hi.to_f64().unwrap());
                        break;
                    }
                    let scale = if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
                    if &hi - &lo <= &tol * &scale {
                        out.push(((&lo + &hi) / &two).to_f64().unwrap());
                        break;
                    }
                    let mid = (&lo + &hi) / &two;
                    // a simple root is a sign change once lo is not itself a root
                    let left = if lo_sign != 0 {
                        let s = p.sign_at(&mid);
                        s == 0 || s == hi_sign
                    } else {
                        sturm.count(&lo, &mid) == 1
                    };
                    if left {
                        hi = mid;
                    } else {
                        lo = mid;
                        lo_sign = p.sign_at(&lo);
                    }
                }
            }
            _ => {
                let mid = (&a + &b) / &two;
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// (root, multiplicity), ascending, from the expanded polynomial alone.
pub fn oracle_roots(records: &[AttachmentRecord]) -> Vec<(f64, usize)> {
    let f = expand(records);
    let mut roots: Vec<(f64, usize)> = square_free(&f)
        .iter()
        .flat_map(|(part, mult)| real_roots(part, 1e-11).into_iter().map(move |r| (r, *mult)))
        .collect();
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots
}
