//! Exact arithmetic in `F_{p^k}`.
//!
//! Elements are residue polynomials modulo a monic irreducible polynomial of
//! degree `k` over `F_p`, stored as little-endian coefficient arrays. Fields
//! with at most [`TABLE_LIMIT`] elements also carry discrete log/exp tables,
//! which turn multiplication, inversion and square roots into lookups.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_prime::nt_funcs::{factorize128, is_prime64};
use rand::Rng;
use thiserror::Error;

use crate::poly::Poly;

/// Largest supported characteristic.
pub const P_MAX: u32 = 97;
/// Largest supported extension degree.
pub const K_MAX: u32 = 12;
/// Fields up to this many elements get log/exp tables and may be scanned
/// exhaustively.
pub const TABLE_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("characteristic {0} exceeds the supported maximum {P_MAX}")]
    PrimeTooLarge(u32),
    #[error("extension degree {0} exceeds K_MAX = {K_MAX}")]
    DegreeTooLarge(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("field with {0} elements is too large for an exhaustive scan")]
    FieldTooLarge(u128),
    #[error("expected {expected} coefficients, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("operation {0} expects {1} operand(s)")]
    Arity(&'static str, usize),
}

/// An element of `F_{p^k}`.
///
/// The derived ordering compares the field tag first and then the coefficient
/// list lexicographically from the constant term up, which is the canonical
/// element order used for every sorted output in this crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    p: u8,
    k: u8,
    c: [u8; K_MAX as usize],
}

impl FieldElement {
    pub fn characteristic(&self) -> u32 {
        self.p as u32
    }

    pub fn degree(&self) -> u32 {
        self.k as u32
    }

    /// Little-endian coefficients, exactly `k` of them.
    pub fn coeffs(&self) -> &[u8] {
        &self.c[..self.k as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&d| d == 0)
    }

    /// The residue when the element lies in the prime field.
    pub fn as_prime(&self) -> Option<u32> {
        if self.c[1..].iter().all(|&d| d == 0) {
            Some(self.c[0] as u32)
        } else {
            None
        }
    }

    fn same_field(&self, other: &FieldElement) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            return write!(f, "{}", self.c[0]);
        }
        write!(f, "[")?;
        for (i, d) in self.coeffs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Operation selector for [`FieldContext::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u128),
}

struct Tables {
    /// `exp[i] = g^i` as element index, doubled in length to skip a reduction.
    exp: Vec<u32>,
    /// `log[index]`; entry 0 is unused.
    log: Vec<u32>,
}

/// The field `F_{p^k}` together with its defining modulus.
pub struct FieldContext {
    p: u32,
    k: u32,
    order: u128,
    /// Monic, `k + 1` coefficients, constant term first.
    modulus: Vec<u32>,
    tables: Option<Tables>,
    nonresidue: OnceLock<Option<FieldElement>>,
    /// Images of `z -> z^2 + z` on the power basis (characteristic 2 only).
    as_matrix: OnceLock<Vec<u16>>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

fn check_prime(p: u32) -> Result<(), FieldError> {
    if p < 2 || !is_prime64(p as u64) {
        return Err(FieldError::NotPrime(p));
    }
    if p > P_MAX {
        return Err(FieldError::PrimeTooLarge(p));
    }
    Ok(())
}

/// Builds the field `F_{p^k}`; the modulus is the smallest monic irreducible
/// polynomial of degree `k` in canonical (constant-term-first lexicographic)
/// order.
pub fn field_make(p: u32, k: u32) -> Result<FieldContext, FieldError> {
    check_prime(p)?;
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if k > K_MAX {
        return Err(FieldError::DegreeTooLarge(k));
    }
    let modulus = if k == 1 {
        vec![0, 1]
    } else {
        smallest_irreducible(p, k)
    };
    Ok(FieldContext::with_modulus(p, k, modulus))
}

/// Cached variant of [`field_make`]; identical `(p, k)` share one context.
pub fn field(p: u32, k: u32) -> Result<Arc<FieldContext>, FieldError> {
    type Cache = Mutex<HashMap<(u32, u32), Arc<FieldContext>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(ctx) = cache.lock().unwrap().get(&(p, k)) {
        return Ok(Arc::clone(ctx));
    }
    let ctx = Arc::new(field_make(p, k)?);
    let mut guard = cache.lock().unwrap();
    Ok(Arc::clone(guard.entry((p, k)).or_insert(ctx)))
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let base = FieldContext::with_modulus(p, 1, vec![0, 1]);
    // Candidates with zero constant term are divisible by x; start past them.
    let count = (p as u128).pow(k);
    for n in count / p as u128..count {
        // c_0 is the most significant digit of the scan counter.
        let mut digits = vec![0u32; k as usize];
        let mut rest = n;
        for i in (0..k as usize).rev() {
            digits[i] = (rest % p as u128) as u32;
            rest /= p as u128;
        }
        let mut coeffs: Vec<FieldElement> = digits.iter().map(|&d| base.from_u32(d)).collect();
        coeffs.push(base.one());
        if base.is_irreducible(&Poly::new(coeffs)) {
            let mut m = digits;
            m.push(1);
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldContext {
    fn with_modulus(p: u32, k: u32, modulus: Vec<u32>) -> Self {
        let order = (p as u128).pow(k);
        let mut ctx = FieldContext {
            p,
            k,
            order,
            modulus,
            tables: None,
            nonresidue: OnceLock::new(),
            as_matrix: OnceLock::new(),
        };
        if k > 1 && order <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        ctx
    }

    fn build_tables(&self) -> Tables {
        let q = self.order as usize;
        let g = self.primitive_element();
        let mut exp = vec![0u32; 2 * (q - 1)];
        let mut log = vec![0u32; q];
        let mut cur = self.one();
        for i in 0..q - 1 {
            let idx = self.index(&cur) as u32;
            exp[i] = idx;
            exp[i + q - 1] = idx;
            log[idx as usize] = i as u32;
            cur = self.mul_poly(&cur, &g);
        }
        Tables { exp, log }
    }

    /// The first element in canonical order that generates the unit group.
    pub fn primitive_element(&self) -> FieldElement {
        let n = self.order - 1;
        let primes: Vec<u128> = factorize128(n).into_keys().collect();
        self.elements()
            .filter(|e| !e.is_zero())
            .find(|e| primes.iter().all(|&l| !self.is_one(&self.pow(e, n / l))))
            .expect("the multiplicative group is cyclic")
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Number of elements `p^k`.
    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some() || self.k == 1
    }

    fn blank(&self) -> FieldElement {
        FieldElement {
            p: self.p as u8,
            k: self.k as u8,
            c: [0; K_MAX as usize],
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.blank()
    }

    pub fn one(&self) -> FieldElement {
        self.from_u32(1)
    }

    pub fn is_one(&self, a: &FieldElement) -> bool {
        a.c[0] == 1 && a.c[1..].iter().all(|&d| d == 0)
    }

    /// Embeds an integer through the prime field.
    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_u32(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_u32(&self, n: u32) -> FieldElement {
        let mut e = self.blank();
        e.c[0] = (n % self.p) as u8;
        e
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.k as usize {
            return Err(FieldError::BadLength {
                expected: self.k as usize,
                got: coeffs.len(),
            });
        }
        let mut e = self.blank();
        for (slot, &c) in e.c.iter_mut().zip(coeffs) {
            *slot = (c % self.p) as u8;
        }
        Ok(e)
    }

    /// Base-`p` index with `c_0` least significant.
    pub fn index(&self, a: &FieldElement) -> u64 {
        a.coeffs()
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }

    pub fn from_index(&self, mut idx: u64) -> FieldElement {
        let mut e = self.blank();
        for i in 0..self.k as usize {
            e.c[i] = (idx % self.p as u64) as u8;
            idx /= self.p as u64;
        }
        e
    }

    /// Every element, in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let k = self.k as usize;
        let p = self.p as u128;
        (0..self.order).map(move |mut n| {
            let mut e = self.blank();
            for i in (0..k).rev() {
                e.c[i] = (n % p) as u8;
                n /= p;
            }
            e
        })
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let mut e = self.blank();
        for i in 0..self.k as usize {
            e.c[i] = rng.gen_range(0..self.p) as u8;
        }
        e
    }

    pub fn belongs(&self, a: &FieldElement) -> bool {
        a.p as u32 == self.p && a.k as u32 == self.k
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        debug_assert!(a.same_field(b));
        let mut e = self.blank();
        let p = self.p as u16;
        for i in 0..self.k as usize {
            e.c[i] = ((a.c[i] as u16 + b.c[i] as u16) % p) as u8;
        }
        e
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let mut e = self.blank();
        let p = self.p as u16;
        for i in 0..self.k as usize {
            e.c[i] = ((p - a.c[i] as u16) % p) as u8;
        }
        e
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        debug_assert!(a.same_field(b));
        if self.k == 1 {
            let v = (a.c[0] as u32 * b.c[0] as u32) % self.p;
            return self.from_u32(v);
        }
        match &self.tables {
            Some(t) => {
                if a.is_zero() || b.is_zero() {
                    return self.zero();
                }
                let la = t.log[self.index(a) as usize] as usize;
                let lb = t.log[self.index(b) as usize] as usize;
                self.from_index(t.exp[la + lb] as u64)
            }
            None => self.mul_poly(a, b),
        }
    }

    fn mul_poly(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let k = self.k as usize;
        let p = self.p;
        let mut prod = [0u32; 2 * K_MAX as usize];
        for i in 0..k {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] += a.c[i] as u32 * b.c[j] as u32;
            }
        }
        for v in prod.iter_mut() {
            *v %= p;
        }
        // Reduce by the monic modulus from the top down.
        for d in (k..2 * k - 1).rev() {
            let lead = prod[d];
            if lead == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..k {
                let sub = lead * self.modulus[i] % p;
                prod[d - k + i] = (prod[d - k + i] + p - sub) % p;
            }
        }
        let mut e = self.blank();
        for (c, v) in e.c.iter_mut().zip(&prod[..k]) {
            *c = *v as u8;
        }
        e
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FieldElement, mut n: u128) -> FieldElement {
        if let Some(t) = &self.tables {
            if n == 0 {
                return self.one();
            }
            if a.is_zero() {
                return self.zero();
            }
            let l = t.log[self.index(a) as usize] as u128;
            let e = (l * (n % (self.order - 1))) % (self.order - 1);
            return self.from_index(t.exp[e as usize] as u64);
        }
        let mut base = *a;
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let l = t.log[self.index(a) as usize] as usize;
            let q1 = (self.order - 1) as usize;
            return Ok(self.from_index(t.exp[(q1 - l) % q1] as u64));
        }
        Ok(self.pow(a, self.order - 2))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Checked entry point: verifies arity and that every operand belongs to
    /// this context.
    pub fn apply(&self, op: FieldOp, operands: &[FieldElement]) -> Result<FieldElement, FieldError> {
        if operands.iter().any(|e| !self.belongs(e)) {
            return Err(FieldError::ContextMismatch);
        }
        let (name, arity) = match op {
            FieldOp::Add => ("add", 2),
            FieldOp::Sub => ("sub", 2),
            FieldOp::Mul => ("mul", 2),
            FieldOp::Inv => ("inv", 1),
            FieldOp::Pow(_) => ("pow", 1),
        };
        if operands.len() != arity {
            return Err(FieldError::Arity(name, arity));
        }
        let a = &operands[0];
        Ok(match op {
            FieldOp::Add => self.add(a, &operands[1]),
            FieldOp::Sub => self.sub(a, &operands[1]),
            FieldOp::Mul => self.mul(a, &operands[1]),
            FieldOp::Inv => self.inv(a)?,
            FieldOp::Pow(n) => self.pow(a, n),
        })
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: &FieldElement) -> u128 {
        assert!(!a.is_zero());
        let mut n = self.order - 1;
        for (l, _) in factorize128(self.order - 1) {
            while n.is_multiple_of(l) && self.is_one(&self.pow(a, n / l)) {
                n /= l;
            }
        }
        n
    }

    pub fn is_square(&self, a: &FieldElement) -> bool {
        if a.is_zero() || self.p == 2 {
            return true;
        }
        if let Some(t) = &self.tables {
            return t.log[self.index(a) as usize] % 2 == 0;
        }
        self.is_one(&self.pow(a, (self.order - 1) / 2))
    }

    /// A square root, if one exists. For odd `q` the other root is the
    /// negation.
    pub fn sqrt(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return Some(self.zero());
        }
        if self.p == 2 {
            return Some(self.pow(a, self.order / 2));
        }
        if let Some(t) = &self.tables {
            let l = t.log[self.index(a) as usize];
            return (l % 2 == 0).then(|| self.from_index(t.exp[(l / 2) as usize] as u64));
        }
        if !self.is_square(a) {
            return None;
        }
        Some(self.tonelli_shanks(a))
    }

    fn tonelli_shanks(&self, a: &FieldElement) -> FieldElement {
        let q1 = self.order - 1;
        let s = q1.trailing_zeros();
        let odd = q1 >> s;
        let z = self
            .nonresidue
            .get_or_init(|| self.elements().find(|e| !e.is_zero() && !self.is_square(e)))
            .expect("odd fields have non-residues");
        let mut m = s;
        let mut c = self.pow(&z, odd);
        let mut t = self.pow(a, odd);
        let mut r = self.pow(a, odd.div_ceil(2));
        while !self.is_one(&t) {
            let mut i = 0;
            let mut tt = t;
            while !self.is_one(&tt) {
                tt = self.square(&tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = self.square(&b);
            }
            m = i;
            c = self.square(&b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        r
    }

    /// Solves `z^2 + z = d` in characteristic 2. The second solution is `z + 1`.
    pub fn solve_artin_schreier(&self, d: &FieldElement) -> Option<FieldElement> {
        assert_eq!(self.p, 2, "Artin-Schreier solver needs characteristic 2");
        let k = self.k as usize;
        let cols = self.as_matrix.get_or_init(|| {
            (0..k)
                .map(|i| {
                    let mut basis = self.blank();
                    basis.c[i] = 1;
                    let img = self.add(&self.square(&basis), &basis);
                    bits(&img)
                })
                .collect()
        });
        // Gaussian elimination on rows [row bits of matrix | rhs].
        let target = bits(d);
        let mut rows: Vec<(u16, bool)> = (0..k)
            .map(|r| {
                let mut row = 0u16;
                for (c, col) in cols.iter().enumerate() {
                    if col >> r & 1 == 1 {
                        row |= 1 << c;
                    }
                }
                (row, target >> r & 1 == 1)
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..k {
            let Some(pr) = (rank..k).find(|&r| rows[r].0 >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pr);
            let (prow, prhs) = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.0 >> col & 1 == 1 {
                    row.0 ^= prow;
                    row.1 ^= prhs;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        if rows[rank..].iter().any(|&(_, rhs)| rhs) {
            return None;
        }
        let mut z = self.blank();
        for (r, &col) in pivots.iter().enumerate() {
            z.c[col] = rows[r].1 as u8;
        }
        Some(z)
    }

    /// All solutions of `x^n = 1`, sorted canonically.
    pub fn roots_of_unity(&self, n: u64) -> Vec<FieldElement> {
        assert!(n > 0);
        let g = gcd_u128(n as u128, self.order - 1);
        let zeta = match &self.tables {
            Some(t) => self.from_index(t.exp[((self.order - 1) / g) as usize] as u64),
            None => {
                let primes: Vec<u128> = factorize128(g).into_keys().collect();
                self.elements()
                    .filter(|e| !e.is_zero())
                    .map(|e| self.pow(&e, (self.order - 1) / g))
                    .find(|z| primes.iter().all(|&l| !self.is_one(&self.pow(z, g / l))))
                    .expect("cyclic group has elements of every dividing order")
            }
        };
        let mut out = Vec::with_capacity(g as usize);
        let mut cur = self.one();
        for _ in 0..g {
            out.push(cur);
            cur = self.mul(&cur, &zeta);
        }
        out.sort();
        out
    }

    /// All roots in this field of a nonzero polynomial, sorted canonically.
    pub fn polynomial_roots(&self, coeffs: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
        if coeffs.iter().any(|e| !self.belongs(e)) {
            return Err(FieldError::ContextMismatch);
        }
        let f = Poly::new(coeffs.to_vec());
        if f.is_zero() {
            return Err(FieldError::ZeroPolynomial);
        }
        Ok(self.roots(&f))
    }
}

fn bits(e: &FieldElement) -> u16 {
    e.coeffs()
        .iter()
        .enumerate()
        .fold(0u16, |acc, (i, &d)| acc | ((d as u16) << i))
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
