//! Elliptic curves in long Weierstrass form over `F_p`, and their groups of
//! points over extensions `F_{p^k}`.
//!
//! The chord-tangent law is implemented once for the general model
//! `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`, so characteristics 2 and 3
//! need no special cases.

use std::fmt;
use std::sync::Arc;

use num_prime::nt_funcs::factorize128;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{field, FieldContext, FieldElement, FieldError, TABLE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("singular model: discriminant is zero")]
    SingularModel,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("point and curve live over different fields")]
    ContextMismatch,
}

fn modp(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

/// A smooth long Weierstrass model with coefficients in `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeierstrassCurve {
    p: u32,
    a: [u32; 5],
    b2: u32,
    b4: u32,
    b6: u32,
    b8: u32,
    c4: u32,
    c6: u32,
    disc: u32,
    j: u32,
    /// Trace of Frobenius over `F_p`.
    trace: i64,
}

/// Builds `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over `F_p`.
pub fn curve_new(p: u32, a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<WeierstrassCurve, CurveError> {
    let prime = field(p, 1)?;
    let r = |v: i64| modp(v, p) as i64;
    let (a1, a2, a3, a4, a6) = (r(a1), r(a2), r(a3), r(a4), r(a6));
    let b2 = r(a1 * a1 + 4 * a2);
    let b4 = r(2 * a4 + a1 * a3);
    let b6 = r(a3 * a3 + 4 * a6);
    let b8 = r(a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4);
    let c4 = r(b2 * b2 - 24 * b4);
    let c6 = r(-b2 * b2 % p as i64 * b2 + 36 * b2 * b4 - 216 * b6);
    let disc = r(-(b2 * b2 % p as i64) * b8 - 8 * (b4 * b4 % p as i64) * b4 - 27 * b6 * b6 + 9 * (b2 * b4 % p as i64) * b6);
    if disc == 0 {
        return Err(CurveError::SingularModel);
    }
    let c4f = prime.from_u32(c4 as u32);
    let j = prime
        .div(&prime.mul(&prime.square(&c4f), &c4f), &prime.from_u32(disc as u32))?
        .as_prime()
        .unwrap();
    let mut curve = WeierstrassCurve {
        p,
        a: [a1 as u32, a2 as u32, a3 as u32, a4 as u32, a6 as u32],
        b2: b2 as u32,
        b4: b4 as u32,
        b6: b6 as u32,
        b8: b8 as u32,
        c4: c4 as u32,
        c6: c6 as u32,
        disc: disc as u32,
        j,
        trace: 0,
    };
    curve.trace = p as i64 + 1 - curve.count_prime_field_points() as i64;
    Ok(curve)
}

impl WeierstrassCurve {
    pub fn p(&self) -> u32 {
        self.p
    }

    /// `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> [u32; 5] {
        self.a
    }

    pub fn b_invariants(&self) -> [u32; 4] {
        [self.b2, self.b4, self.b6, self.b8]
    }

    pub fn c4(&self) -> u32 {
        self.c4
    }

    pub fn c6(&self) -> u32 {
        self.c6
    }

    pub fn discriminant(&self) -> u32 {
        self.disc
    }

    pub fn j_invariant(&self) -> u32 {
        self.j
    }

    pub fn trace(&self) -> i64 {
        self.trace
    }

    /// Supersingular iff the Frobenius trace over `F_p` vanishes mod `p`.
    pub fn is_supersingular(&self) -> bool {
        self.trace.rem_euclid(self.p as i64) == 0
    }

    /// Brute-force count over `F_p` (both coordinates scanned), including
    /// the point at infinity.
    fn count_prime_field_points(&self) -> u64 {
        let p = self.p as i64;
        let [a1, a2, a3, a4, a6] = self.a.map(|v| v as i64);
        let mut n = 1;
        for x in 0..p {
            let rhs = (x * x % p * x + a2 * x % p * x + a4 * x + a6) % p;
            for y in 0..p {
                if (y * y + a1 * x % p * y + a3 * y - rhs).rem_euclid(p) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    /// `#E(F_{p^k})` from the Frobenius trace recurrence.
    pub fn count_points(&self, k: u32) -> u128 {
        let p = self.p as i128;
        let t = self.trace as i128;
        let (mut prev, mut cur) = (2i128, t);
        for _ in 1..k {
            let next = t * cur - p * prev;
            prev = cur;
            cur = next;
        }
        (p.pow(k) + 1 - cur) as u128
    }

    /// The curve's group of points over `F_{p^k}`.
    pub fn over(&self, k: u32) -> Result<CurveGroup, CurveError> {
        self.over_field(field(self.p, k)?)
    }

    pub fn over_field(&self, ctx: Arc<FieldContext>) -> Result<CurveGroup, CurveError> {
        if ctx.characteristic() != self.p {
            return Err(CurveError::ContextMismatch);
        }
        let a = self.a.map(|v| ctx.from_u32(v));
        let order = self.count_points(ctx.degree());
        Ok(CurveGroup {
            curve: self.clone(),
            field: ctx,
            a,
            order,
            order_primes: factorize128(order).into_keys().collect(),
        })
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = self.a;
        write!(f, "[{a1},{a2},{a3},{a4},{a6}] over F_{}", self.p)
    }
}

/// A point of `E(F_{p^k})`. The derived order puts infinity first and then
/// compares affine points by `x`, then `y`, in canonical element order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
}

impl CurvePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x},{y})"),
        }
    }
}

/// `E(F_q)`: a curve together with the field its points live in.
#[derive(Debug, Clone)]
pub struct CurveGroup {
    curve: WeierstrassCurve,
    field: Arc<FieldContext>,
    a: [FieldElement; 5],
    order: u128,
    order_primes: Vec<u128>,
}

impl CurveGroup {
    pub fn curve(&self) -> &WeierstrassCurve {
        &self.curve
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.field.degree()
    }

    /// Coefficients lifted into the working field.
    pub fn coefficients(&self) -> &[FieldElement; 5] {
        &self.a
    }

    /// `#E(F_q)`.
    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                if !self.field.belongs(x) || !self.field.belongs(y) {
                    return false;
                }
                let f = &self.field;
                let [a1, a2, a3, a4, a6] = &self.a;
                let lhs = f.mul(y, &f.add(y, &f.add(&f.mul(a1, x), a3)));
                let rhs = f.add(
                    &f.mul(&f.add(&f.mul(&f.add(x, a2), x), a4), x),
                    a6,
                );
                lhs == rhs
            }
        }
    }

    pub fn check(&self, pt: &CurvePoint) -> Result<(), CurveError> {
        if let CurvePoint::Affine { x, y } = pt {
            if !self.field.belongs(x) || !self.field.belongs(y) {
                return Err(CurveError::ContextMismatch);
            }
        }
        if self.contains(pt) {
            Ok(())
        } else {
            Err(CurveError::PointNotOnCurve)
        }
    }

    /// `(x, y) -> (x, -y - a1 x - a3)`.
    pub fn neg(&self, pt: &CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let f = &self.field;
                let [a1, _, a3, _, _] = &self.a;
                let ny = f.neg(&f.add(y, &f.add(&f.mul(a1, x), a3)));
                CurvePoint::Affine { x: *x, y: ny }
            }
        }
    }

    /// Group law on points already known to lie on the curve.
    pub fn add(&self, p1: &CurvePoint, p2: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p1, p2) {
            (CurvePoint::Infinity, q) | (q, CurvePoint::Infinity) => return *q,
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = &self.a;
        let (lambda, nu) = if x1 == x2 {
            let denom = f.add(&f.add(&f.add(y1, y2), &f.mul(a1, x2)), a3);
            if denom.is_zero() {
                return CurvePoint::Infinity;
            }
            // Tangent: y1 == y2 here.
            let denom = f.add(&f.add(y1, y1), &f.add(&f.mul(a1, x1), a3));
            let inv = f.inv(&denom).expect("nonzero denominator");
            let x1sq = f.square(x1);
            let num_l = f.sub(
                &f.add(
                    &f.add(&f.mul(&f.from_u32(3), &x1sq), &f.mul(&f.from_u32(2), &f.mul(a2, x1))),
                    a4,
                ),
                &f.mul(a1, y1),
            );
            let num_n = f.sub(
                &f.add(
                    &f.add(&f.neg(&f.mul(&x1sq, x1)), &f.mul(a4, x1)),
                    &f.mul(&f.from_u32(2), a6),
                ),
                &f.mul(a3, y1),
            );
            (f.mul(&num_l, &inv), f.mul(&num_n, &inv))
        } else {
            let inv = f.inv(&f.sub(x2, x1)).expect("distinct x");
            let lambda = f.mul(&f.sub(y2, y1), &inv);
            let nu = f.mul(&f.sub(&f.mul(y1, x2), &f.mul(y2, x1)), &inv);
            (lambda, nu)
        };
        let x3 = f.sub(
            &f.sub(&f.sub(&f.add(&f.square(&lambda), &f.mul(a1, &lambda)), a2), x1),
            x2,
        );
        let y3 = f.sub(
            &f.sub(&f.neg(&f.mul(&f.add(&lambda, a1), &x3)), &nu),
            a3,
        );
        CurvePoint::Affine { x: x3, y: y3 }
    }

    /// Group law with both inputs validated first.
    pub fn try_add(&self, p1: &CurvePoint, p2: &CurvePoint) -> Result<CurvePoint, CurveError> {
        self.check(p1)?;
        self.check(p2)?;
        Ok(self.add(p1, p2))
    }

    pub fn sub(&self, p1: &CurvePoint, p2: &CurvePoint) -> CurvePoint {
        self.add(p1, &self.neg(p2))
    }

    /// `n * P` by double-and-add; negative `n` goes through negation.
    pub fn mul(&self, n: i128, pt: &CurvePoint) -> CurvePoint {
        let base = if n < 0 { self.neg(pt) } else { *pt };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &b);
            }
            k >>= 1;
            if k > 0 {
                b = self.add(&b, &b);
            }
        }
        acc
    }

    /// Least `n >= 1` with `n * P = O`, found by stripping prime factors from
    /// the group order.
    pub fn point_order(&self, pt: &CurvePoint) -> u128 {
        let mut n = self.order;
        for &l in &self.order_primes {
            while n.is_multiple_of(l) && self.mul((n / l) as i128, pt).is_infinity() {
                n /= l;
            }
        }
        n
    }

    /// All points with the given x-coordinate, sorted.
    pub fn points_with_x(&self, x: &FieldElement) -> Vec<CurvePoint> {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = &self.a;
        let b = f.add(&f.mul(a1, x), a3);
        let c = f.add(&f.mul(&f.add(&f.mul(&f.add(x, a2), x), a4), x), a6);
        let mut ys = Vec::with_capacity(2);
        if f.characteristic() == 2 {
            if b.is_zero() {
                ys.extend(f.sqrt(&c));
            } else {
                let d = f.div(&c, &f.square(&b)).unwrap();
                if let Some(z) = f.solve_artin_schreier(&d) {
                    ys.push(f.mul(&b, &z));
                    ys.push(f.mul(&b, &f.add(&z, &f.one())));
                }
            }
        } else {
            // (2y + b)^2 = b^2 + 4c
            let disc = f.add(&f.square(&b), &f.mul(&f.from_u32(4), &c));
            if let Some(s) = f.sqrt(&disc) {
                let half = f.inv(&f.from_u32(2)).unwrap();
                ys.push(f.mul(&f.sub(&s, &b), &half));
                if !s.is_zero() {
                    ys.push(f.mul(&f.sub(&f.neg(&s), &b), &half));
                }
            }
        }
        let mut pts: Vec<CurvePoint> = ys.into_iter().map(|y| CurvePoint::Affine { x: *x, y }).collect();
        pts.sort();
        pts
    }

    /// A random point, affine unless the group is trivial.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> CurvePoint {
        if self.order == 1 {
            return CurvePoint::Infinity;
        }
        loop {
            let x = self.field.random(rng);
            let pts = self.points_with_x(&x);
            if !pts.is_empty() {
                return pts[rng.gen_range(0..pts.len())];
            }
        }
    }

    /// Every point of `E(F_q)`, infinity first, in canonical order.
    pub fn points(&self) -> Result<Vec<CurvePoint>, CurveError> {
        if self.field.order() > TABLE_LIMIT {
            return Err(FieldError::FieldTooLarge(self.field.order()).into());
        }
        let mut out = vec![CurvePoint::Infinity];
        for x in self.field.elements() {
            out.extend(self.points_with_x(&x));
        }
        Ok(out)
    }
}

/// Enumerates `E(F_{p^k})`.
pub fn enumerate_points(curve: &WeierstrassCurve, k: u32) -> Result<Vec<CurvePoint>, CurveError> {
    curve.over(k)?.points()
}
