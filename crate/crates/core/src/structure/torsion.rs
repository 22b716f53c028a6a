//! The `m`-torsion subgroup `E[m]`, located by working one Sylow subgroup of
//! `E(F_q)` at a time.

use std::collections::HashSet;
use std::fmt;

use num_prime::nt_funcs::factorize128;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{StructureError, Tower};
use crate::curve::{CurveGroup, CurvePoint, WeierstrassCurve};

/// Largest torsion order accepted.
pub const M_MAX: u64 = 30;

const MAX_TRIES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TorsionStructure {
    /// `Z/mZ x Z/mZ`, `p` not dividing `m`.
    Rank2 { m: u64 },
    /// `Z/p^eZ` on an ordinary curve.
    Cyclic { order: u64 },
    /// `{O}`, the `p`-power torsion of a supersingular curve.
    Trivial,
    /// `Z/p^e nZ x Z/nZ` on an ordinary curve, `n > 1` prime to `p`.
    Mixed { p_power: u64, n: u64 },
}

impl TorsionStructure {
    pub fn size(&self) -> u64 {
        match *self {
            TorsionStructure::Rank2 { m } => m * m,
            TorsionStructure::Cyclic { order } => order,
            TorsionStructure::Trivial => 1,
            TorsionStructure::Mixed { p_power, n } => p_power * n * n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TorsionStructure::Rank2 { .. } => "rank2",
            TorsionStructure::Cyclic { .. } => "cyclic",
            TorsionStructure::Trivial => "trivial",
            TorsionStructure::Mixed { .. } => "mixed",
        }
    }
}

impl fmt::Display for TorsionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TorsionStructure::Rank2 { m } => write!(f, "Z/{m}Z x Z/{m}Z"),
            TorsionStructure::Cyclic { order } => write!(f, "Z/{order}Z"),
            TorsionStructure::Trivial => f.write_str("trivial"),
            TorsionStructure::Mixed { p_power, n } => write!(f, "Z/{}Z x Z/{n}Z", p_power * n),
        }
    }
}

/// `E[m]` together with the field it was found over.
#[derive(Debug, Clone)]
pub struct TorsionData {
    pub m: u64,
    pub structure: TorsionStructure,
    /// Canonical basis: the first point of maximal order, then (for rank-2
    /// structures) the first point completing it to a direct sum.
    pub basis: Vec<CurvePoint>,
    /// Every point of `E[m]`, sorted.
    pub points: Vec<CurvePoint>,
    pub field_degree: u32,
}

fn valuation(mut n: u128, l: u128) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(l) {
        n /= l;
        v += 1;
    }
    v
}

struct Sylow<'a> {
    group: &'a CurveGroup,
    l: u128,
    rng: ChaCha8Rng,
}

impl Sylow<'_> {
    fn mul(&self, n: u128, pt: &CurvePoint) -> CurvePoint {
        self.group.mul(n as i128, pt)
    }

    /// `a` with `ord(pt) = l^a`, for `pt` in the `l`-Sylow subgroup.
    fn exponent(&self, pt: &CurvePoint) -> u32 {
        let mut cur = *pt;
        let mut a = 0;
        while !cur.is_infinity() {
            cur = self.mul(self.l, &cur);
            a += 1;
        }
        a
    }

    /// `x` with `x * base = target`, where `ord(base) = l^a`.
    fn dlog(&self, target: &CurvePoint, base: &CurvePoint, a: u32) -> Option<u128> {
        if a == 0 {
            return target.is_infinity().then_some(0);
        }
        let gamma = self.mul(self.l.pow(a - 1), base);
        let mut digits = Vec::with_capacity(self.l as usize);
        let mut cur = CurvePoint::Infinity;
        for _ in 0..self.l {
            digits.push(cur);
            cur = self.group.add(&cur, &gamma);
        }
        let mut x: u128 = 0;
        for i in 0..a {
            let rest = self.group.sub(target, &self.mul(x, base));
            let h = self.mul(self.l.pow(a - 1 - i), &rest);
            let d = digits.iter().position(|g| *g == h)? as u128;
            x += d * self.l.pow(i);
        }
        (self.mul(x, base) == *target).then_some(x)
    }

    fn random_element(&mut self, cofactor: u128) -> CurvePoint {
        let pt = self.group.random_point(&mut self.rng);
        self.mul(cofactor, &pt)
    }

    /// A basis of `E[l^e]` when the `l`-Sylow subgroup contains it in full.
    fn full_pair(&mut self, e: u32) -> Result<Option<(CurvePoint, CurvePoint)>, StructureError> {
        let n = self.group.order();
        let v = valuation(n, self.l);
        if v < 2 * e {
            return Ok(None);
        }
        let cofactor = n / self.l.pow(v);
        let mut p1 = CurvePoint::Infinity;
        let mut a = 0;
        for _ in 0..MAX_TRIES {
            let r = self.random_element(cofactor);
            let ra = self.exponent(&r);
            if ra > a {
                p1 = r;
                a = ra;
                if a == v {
                    return Ok(None);
                }
                continue;
            }
            let b = v - a;
            let lb = self.l.pow(b);
            let Some(j) = self.dlog(&self.mul(lb, &r), &p1, a) else {
                continue;
            };
            if j % lb != 0 {
                continue;
            }
            let rc = self.group.sub(&r, &self.mul(j / lb, &p1));
            if self.exponent(&rc) != b {
                continue;
            }
            if self.dlog(&self.mul(self.l.pow(b - 1), &rc), &p1, a).is_some() {
                continue;
            }
            // <p1> + <rc> is direct with |<p1>| |<rc>| = l^v.
            if a.min(b) < e {
                return Ok(None);
            }
            return Ok(Some((
                self.mul(self.l.pow(a - e), &p1),
                self.mul(self.l.pow(b - e), &rc),
            )));
        }
        Err(StructureError::Internal(format!(
            "no certificate for the {}-Sylow subgroup after {MAX_TRIES} samples",
            self.l
        )))
    }

    /// A generator of `E[p^e]` on an ordinary curve, whose `p`-Sylow
    /// subgroup is cyclic.
    fn cyclic_generator(&mut self, e: u32) -> Result<Option<CurvePoint>, StructureError> {
        let n = self.group.order();
        let v = valuation(n, self.l);
        if v < e {
            return Ok(None);
        }
        let cofactor = n / self.l.pow(v);
        for _ in 0..MAX_TRIES {
            let r = self.random_element(cofactor);
            if self.exponent(&r) == v {
                return Ok(Some(self.mul(self.l.pow(v - e), &r)));
            }
        }
        Err(StructureError::Internal(format!(
            "no generator of the {}-Sylow subgroup after {MAX_TRIES} samples",
            self.l
        )))
    }
}

fn check_order(m: u64) -> Result<(), StructureError> {
    if m == 0 || m > M_MAX {
        return Err(StructureError::OrderOutOfRange(m));
    }
    Ok(())
}

/// Splits `m = p^e n` with `gcd(n, p) = 1`.
fn split_order(m: u64, p: u64) -> (u32, u64) {
    let e = valuation(m as u128, p as u128);
    (e, m / p.pow(e))
}

fn trivial(m: u64, k: u32) -> TorsionData {
    TorsionData {
        m,
        structure: TorsionStructure::Trivial,
        basis: Vec::new(),
        points: vec![CurvePoint::Infinity],
        field_degree: k,
    }
}

/// Cheap necessary conditions for `E[m]` to be rational over `F_{p^k}`.
fn may_contain(curve: &WeierstrassCurve, m: u64, k: u32) -> bool {
    let p = curve.p() as u64;
    let (e, n) = split_order(m, p);
    let count = curve.count_points(k);
    let q = (p as u128).pow(k);
    if n > 1 && !(q - 1).is_multiple_of(n as u128) {
        return false;
    }
    if !factorize128(n as u128)
        .into_iter()
        .all(|(l, f)| valuation(count, l) >= 2 * f as u32)
    {
        return false;
    }
    e == 0 || curve.is_supersingular() || valuation(count, p as u128) >= e
}

/// `E[m]` inside `E(F_q)` for the group's field, or `None` when some
/// `m`-torsion point is not rational there.
pub fn torsion_over(group: &CurveGroup, m: u64) -> Result<Option<TorsionData>, StructureError> {
    check_order(m)?;
    let curve = group.curve();
    let k = group.degree();
    let p = curve.p() as u64;
    let (e, n) = split_order(m, p);
    if curve.is_supersingular() && e > 0 {
        if n > 1 {
            return Err(StructureError::UnsupportedMixedOrder { m });
        }
        return Ok(Some(trivial(m, k)));
    }
    if m == 1 {
        return Ok(Some(trivial(m, k)));
    }
    if !may_contain(curve, m, k) {
        return Ok(None);
    }

    let a = curve.coefficients();
    let seed = (p << 40) ^ ((a[3] as u64) << 32) ^ ((a[4] as u64) << 24) ^ ((k as u64) << 16) ^ m;
    let mut g1 = CurvePoint::Infinity;
    let mut g2 = CurvePoint::Infinity;
    for (l, f) in factorize128(n as u128) {
        let mut s = Sylow {
            group,
            l,
            rng: ChaCha8Rng::seed_from_u64(seed ^ ((l as u64) << 8)),
        };
        let Some((b1, b2)) = s.full_pair(f as u32)? else {
            return Ok(None);
        };
        g1 = group.add(&g1, &b1);
        g2 = group.add(&g2, &b2);
    }
    if e > 0 {
        let mut s = Sylow {
            group,
            l: p as u128,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0xff),
        };
        let Some(gp) = s.cyclic_generator(e)? else {
            return Ok(None);
        };
        g1 = group.add(&g1, &gp);
    }
    // g1 has order d1, g2 has order d2 and E[m] = <g1> + <g2>.
    let d1 = m;
    let d2 = n;

    let mut labelled = Vec::with_capacity((d1 * d2) as usize);
    let mut row = CurvePoint::Infinity;
    for j in 0..d2 {
        let mut pt = row;
        for i in 0..d1 {
            labelled.push((pt, (i, j)));
            pt = group.add(&pt, &g1);
        }
        row = group.add(&row, &g2);
    }
    let distinct: HashSet<&CurvePoint> = labelled.iter().map(|(pt, _)| pt).collect();
    if distinct.len() as u64 != d1 * d2
        || labelled.iter().any(|(pt, _)| !group.mul(m as i128, pt).is_infinity())
    {
        return Err(StructureError::Internal(format!("E[{m}] over degree {k} failed verification")));
    }
    labelled.sort();

    let gcd = |a: u64, b: u64| crate::field::gcd_u128(a as u128, b as u128) as u64;
    let order_of = |(i, j): (u64, u64)| {
        let o1 = d1 / gcd(d1, i);
        let o2 = d2 / gcd(d2, j);
        o1 / gcd(o1, o2) * o2
    };
    let (p1, l1) = *labelled
        .iter()
        .find(|(_, l)| order_of(*l) == d1)
        .expect("g1 has maximal order");
    let mut basis = vec![p1];
    if d2 > 1 {
        let span: HashSet<(u64, u64)> = (0..d1)
            .map(|c| (c * l1.0 % d1, c * l1.1 % d2))
            .collect();
        let (p2, _) = labelled
            .iter()
            .find(|(_, l)| {
                order_of(*l) == d2
                    && (1..d2).all(|c| !span.contains(&(c * l.0 % d1, c * l.1 % d2)))
            })
            .expect("a complement exists");
        basis.push(*p2);
    }

    let structure = match (e, n) {
        (0, _) => TorsionStructure::Rank2 { m },
        (_, 1) => TorsionStructure::Cyclic { order: m },
        _ => TorsionStructure::Mixed { p_power: m / n, n },
    };
    Ok(Some(TorsionData {
        m,
        structure,
        basis,
        points: labelled.into_iter().map(|(pt, _)| pt).collect(),
        field_degree: k,
    }))
}

/// `E[m]` over the least `F_{p^k}` in the tower containing all of it.
pub fn torsion_subgroup(curve: &WeierstrassCurve, m: u64, tower: &Tower) -> Result<TorsionData, StructureError> {
    check_order(m)?;
    let (e, n) = split_order(m, curve.p() as u64);
    if curve.is_supersingular() && e > 0 && n > 1 {
        return Err(StructureError::UnsupportedMixedOrder { m });
    }
    for k in 1..=tower.k_max() {
        if !may_contain(curve, m, k) {
            continue;
        }
        if let Some(t) = torsion_over(&curve.over(k)?, m)? {
            return Ok(t);
        }
    }
    Err(tower.exhausted(format!("E[{m}] of {curve}")))
}
