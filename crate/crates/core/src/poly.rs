//! Univariate polynomials over a [`FieldContext`], enough for root finding:
//! remainders, gcds, modular powers, equal-degree splitting and radicals.

use num_prime::nt_funcs::factorize128;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldContext, FieldElement};

/// Little-endian coefficients with no trailing zeros; the zero polynomial is
/// empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<FieldElement>);

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.0
    }

    fn lead(&self) -> Option<&FieldElement> {
        self.0.last()
    }
}

impl FieldContext {
    pub fn poly_x(&self) -> Poly {
        Poly::new(vec![self.zero(), self.one()])
    }

    pub fn poly_const(&self, c: FieldElement) -> Poly {
        Poly::new(vec![c])
    }

    pub fn poly_add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        let zero = self.zero();
        Poly::new(
            (0..n)
                .map(|i| self.add(a.0.get(i).unwrap_or(&zero), b.0.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn poly_sub(&self, a: &Poly, b: &Poly) -> Poly {
        let neg = Poly::new(b.0.iter().map(|c| self.neg(c)).collect());
        self.poly_add(a, &neg)
    }

    pub fn poly_mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![self.zero(); a.0.len() + b.0.len() - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn poly_divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = b.degree().expect("division by the zero polynomial");
        let inv_lead = self.inv(b.lead().unwrap()).unwrap();
        let mut rem = a.0.clone();
        let mut quot = vec![self.zero(); rem.len().saturating_sub(db)];
        while rem.len() > db {
            let top = rem.len() - 1;
            let c = self.mul(&rem[top], &inv_lead);
            if !c.is_zero() {
                let shift = top - db;
                quot[shift] = c;
                for (i, bc) in b.0.iter().enumerate() {
                    rem[shift + i] = self.sub(&rem[shift + i], &self.mul(&c, bc));
                }
            }
            rem.pop();
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn poly_rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.poly_divrem(a, b).1
    }

    pub fn poly_monic(&self, a: &Poly) -> Poly {
        match a.lead() {
            None => a.clone(),
            Some(l) => {
                let inv = self.inv(l).unwrap();
                Poly::new(a.0.iter().map(|c| self.mul(c, &inv)).collect())
            }
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn poly_gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        self.poly_monic(&a)
    }

    pub fn poly_powmod(&self, base: &Poly, mut n: u128, modulus: &Poly) -> Poly {
        let mut acc = self.poly_rem(&self.poly_const(self.one()), modulus);
        let mut b = self.poly_rem(base, modulus);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.poly_rem(&self.poly_mul(&acc, &b), modulus);
            }
            b = self.poly_rem(&self.poly_mul(&b, &b), modulus);
            n >>= 1;
        }
        acc
    }

    pub fn poly_eval(&self, f: &Poly, x: &FieldElement) -> FieldElement {
        f.0.iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    pub fn poly_derivative(&self, f: &Poly) -> Poly {
        Poly::new(
            f.0.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| self.mul(&self.from_u32(i as u32), c))
                .collect(),
        )
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self, f: &Poly) -> bool {
        let Some(n) = f.degree() else { return false };
        if n == 0 {
            return false;
        }
        let q = self.order();
        let x = self.poly_x();
        // x^(q^d) mod f for every d up to n, by repeated q-th powering.
        let mut frob = vec![self.poly_rem(&x, f)];
        for _ in 0..n {
            let next = self.poly_powmod(frob.last().unwrap(), q, f);
            frob.push(next);
        }
        if self.poly_sub(&frob[n], &self.poly_rem(&x, f)).degree().is_some() {
            return false;
        }
        factorize128(n as u128).into_keys().all(|l| {
            let d = n / l as usize;
            let h = self.poly_sub(&frob[d], &x);
            self.poly_gcd(&h, f).degree() == Some(0)
        })
    }

    /// Distinct roots in this field, sorted canonically.
    pub(crate) fn roots(&self, f: &Poly) -> Vec<FieldElement> {
        let Some(deg) = f.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let f = self.poly_monic(f);
        // g = product of (x - r) over the rational roots r.
        let xq = self.poly_powmod(&self.poly_x(), self.order(), &f);
        let g = self.poly_gcd(&self.poly_sub(&xq, &self.poly_x()), &f);
        let mut out = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        self.split_linear(g, &mut rng, &mut out);
        out.sort();
        out
    }

    /// Splits a monic product of distinct linear factors.
    fn split_linear(&self, g: Poly, rng: &mut ChaCha8Rng, out: &mut Vec<FieldElement>) {
        match g.degree() {
            None | Some(0) => return,
            Some(1) => {
                out.push(self.neg(&g.0[0]));
                return;
            }
            _ => {}
        }
        if self.order() <= 64 {
            out.extend(self.elements().filter(|e| self.poly_eval(&g, e).is_zero()));
            return;
        }
        loop {
            let delta = self.random(rng);
            let h = if self.characteristic() == 2 {
                // Absolute trace of delta * x mod g.
                let mut acc = self.poly_rem(&Poly::new(vec![self.zero(), delta]), &g);
                let mut term = acc.clone();
                for _ in 1..self.degree() {
                    term = self.poly_rem(&self.poly_mul(&term, &term), &g);
                    acc = self.poly_add(&acc, &term);
                }
                acc
            } else {
                let shifted = Poly::new(vec![delta, self.one()]);
                let pw = self.poly_powmod(&shifted, (self.order() - 1) / 2, &g);
                self.poly_sub(&pw, &self.poly_const(self.one()))
            };
            let d = self.poly_gcd(&h, &g);
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && dd < g.degree().unwrap() {
                let (rest, _) = self.poly_divrem(&g, &d);
                self.split_linear(d, rng, out);
                self.split_linear(self.poly_monic(&rest), rng, out);
                return;
            }
        }
    }

    /// Number of distinct roots over the algebraic closure.
    pub fn closure_root_count(&self, f: &Poly) -> usize {
        self.radical(f).degree().unwrap_or(0)
    }

    /// Product of the distinct monic irreducible factors.
    fn radical(&self, f: &Poly) -> Poly {
        let Some(deg) = f.degree() else {
            return f.clone();
        };
        if deg == 0 {
            return self.poly_const(self.one());
        }
        let f = self.poly_monic(f);
        let df = self.poly_derivative(&f);
        if df.is_zero() {
            return self.radical(&self.pth_root(&f));
        }
        let g = self.poly_gcd(&f, &df);
        let (w, _) = self.poly_divrem(&f, &g);
        let rg = self.radical(&g);
        let common = self.poly_gcd(&w, &rg);
        let (extra, _) = self.poly_divrem(&rg, &common);
        self.poly_monic(&self.poly_mul(&w, &extra))
    }

    /// For `f(x) = h(x^p)`, the polynomial whose p-th power is `f`.
    fn pth_root(&self, f: &Poly) -> Poly {
        let p = self.characteristic() as usize;
        let e = self.order() / self.characteristic() as u128;
        Poly::new(f.0.iter().step_by(p).map(|c| self.pow(c, e)).collect())
    }
}
