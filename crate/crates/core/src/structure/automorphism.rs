//! Automorphisms of a curve fixing the origin, as Weierstrass coordinate
//! changes `x = u^2 x' + r`, `y = u^3 y' + u^2 s x' + t` that map the model to
//! itself.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{StructureError, Tower};
use crate::curve::{CurveGroup, CurvePoint, WeierstrassCurve};
use crate::field::{FieldContext, FieldElement, TABLE_LIMIT};
use crate::poly::Poly;

/// Number of random point pairs each candidate is tested on.
const VALIDATION_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    pub u: FieldElement,
    pub r: FieldElement,
    pub s: FieldElement,
    pub t: FieldElement,
}

impl Automorphism {
    pub fn identity(f: &FieldContext) -> Self {
        Automorphism {
            u: f.one(),
            r: f.zero(),
            s: f.zero(),
            t: f.zero(),
        }
    }

    /// The `-id` map, `u = -1, r = 0, s = -a1, t = -a3`.
    pub fn negation(group: &CurveGroup) -> Self {
        let f = group.field();
        let [a1, _, a3, _, _] = group.coefficients();
        Automorphism {
            u: f.neg(&f.one()),
            r: f.zero(),
            s: f.neg(a1),
            t: f.neg(a3),
        }
    }

    pub fn field_degree(&self) -> u32 {
        self.u.degree()
    }

    /// The map "apply `self`, then `next`" as a single coordinate change.
    pub fn then(&self, next: &Automorphism, f: &FieldContext) -> Automorphism {
        let (u1, r1, s1, t1) = (&self.u, &self.r, &self.s, &self.t);
        let (u2, r2, s2, t2) = (&next.u, &next.r, &next.s, &next.t);
        let u1sq = f.square(u1);
        Automorphism {
            u: f.mul(u1, u2),
            r: f.add(r1, &f.mul(&u1sq, r2)),
            s: f.add(s1, &f.mul(u1, s2)),
            t: f.add(
                &f.add(t1, &f.mul(&f.mul(&u1sq, s1), r2)),
                &f.mul(&f.mul(&u1sq, u1), t2),
            ),
        }
    }

    /// Coefficients of the model obtained by this coordinate change.
    pub fn transform(&self, a: &[FieldElement; 5], f: &FieldContext) -> [FieldElement; 5] {
        let [a1, a2, a3, a4, a6] = a;
        let (u, r, s, t) = (&self.u, &self.r, &self.s, &self.t);
        let c = |n: i64| f.from_int(n);
        let ui = f.inv(u).expect("u is a unit");
        let ui2 = f.square(&ui);
        let ui3 = f.mul(&ui2, &ui);
        let ui4 = f.square(&ui2);
        let ui6 = f.square(&ui3);
        let rs = f.mul(r, s);
        let n1 = f.add(a1, &f.mul(&c(2), s));
        let n2 = f.sub(&f.add(&f.sub(a2, &f.mul(s, a1)), &f.mul(&c(3), r)), &f.square(s));
        let n3 = f.add(&f.add(a3, &f.mul(r, a1)), &f.mul(&c(2), t));
        let n4 = [
            f.neg(&f.mul(s, a3)),
            f.mul(&c(2), &f.mul(r, a2)),
            f.neg(&f.mul(&f.add(t, &rs), a1)),
            f.mul(&c(3), &f.square(r)),
            f.neg(&f.mul(&c(2), &f.mul(s, t))),
        ]
        .iter()
        .fold(*a4, |acc, v| f.add(&acc, v));
        let n6 = [
            f.mul(r, a4),
            f.mul(&f.square(r), a2),
            f.mul(&f.square(r), r),
            f.neg(&f.mul(t, a3)),
            f.neg(&f.square(t)),
            f.neg(&f.mul(&f.mul(r, t), a1)),
        ]
        .iter()
        .fold(*a6, |acc, v| f.add(&acc, v));
        [
            f.mul(&n1, &ui),
            f.mul(&n2, &ui2),
            f.mul(&n3, &ui3),
            f.mul(&n4, &ui4),
            f.mul(&n6, &ui6),
        ]
    }

    /// Image of a point: the inverse coordinate change applied to its
    /// coordinates.
    pub fn apply(&self, group: &CurveGroup, pt: &CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let f = group.field();
                let ui = f.inv(&self.u).expect("u is a unit");
                let ui2 = f.square(&ui);
                let dx = f.sub(x, &self.r);
                let nx = f.mul(&dx, &ui2);
                let ny = f.mul(&f.sub(&f.sub(y, &f.mul(&self.s, &dx)), &self.t), &f.mul(&ui2, &ui));
                CurvePoint::Affine { x: nx, y: ny }
            }
        }
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u={} r={} s={} t={}", self.u, self.r, self.s, self.t)
    }
}

/// `apply_automorphism` with the point validated against the curve first.
pub fn apply_automorphism(
    group: &CurveGroup,
    aut: &Automorphism,
    pt: &CurvePoint,
) -> Result<CurvePoint, StructureError> {
    group.check(pt)?;
    if !group.field().belongs(&aut.u) {
        return Err(crate::curve::CurveError::ContextMismatch.into());
    }
    Ok(aut.apply(group, pt))
}

/// The five possible automorphism groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AutLabel {
    Cyclic2,
    Cyclic4,
    Cyclic6,
    /// `Z/3Z ⋊ Z/4Z`, characteristic 3.
    Dicyclic12,
    /// `Q ⋊ Z/3Z`, the binary tetrahedral group, characteristic 2.
    BinaryTetrahedral,
}

impl AutLabel {
    pub fn order(&self) -> usize {
        match self {
            AutLabel::Cyclic2 => 2,
            AutLabel::Cyclic4 => 4,
            AutLabel::Cyclic6 => 6,
            AutLabel::Dicyclic12 => 12,
            AutLabel::BinaryTetrahedral => 24,
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, AutLabel::Cyclic2 | AutLabel::Cyclic4 | AutLabel::Cyclic6)
    }
}

impl fmt::Display for AutLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AutLabel::Cyclic2 => "Z/2Z",
            AutLabel::Cyclic4 => "Z/4Z",
            AutLabel::Cyclic6 => "Z/6Z",
            AutLabel::Dicyclic12 => "Z/3Z ⋊ Z/4Z",
            AutLabel::BinaryTetrahedral => "Q ⋊ Z/3Z",
        })
    }
}

/// The automorphism group dictated by `(j, p)`.
pub fn expected_aut_label(curve: &WeierstrassCurve) -> AutLabel {
    let p = curve.p();
    let j = curve.j_invariant();
    if j == 0 {
        match p {
            2 => AutLabel::BinaryTetrahedral,
            3 => AutLabel::Dicyclic12,
            _ => AutLabel::Cyclic6,
        }
    } else if j == 1728 % p {
        AutLabel::Cyclic4
    } else {
        AutLabel::Cyclic2
    }
}

/// `Aut_0(E)` realised over a specific extension, sorted by `(u, r, s, t)`.
#[derive(Debug, Clone)]
pub struct AutGroup {
    pub elements: Vec<Automorphism>,
    pub label: AutLabel,
    pub field_degree: u32,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> &Automorphism {
        self.elements
            .iter()
            .find(|a| a.u.as_prime() == Some(1) && a.r.is_zero() && a.s.is_zero() && a.t.is_zero())
            .expect("identity is always present")
    }

    pub fn is_abelian(&self, f: &FieldContext) -> bool {
        self.elements.iter().all(|a| {
            self.elements
                .iter()
                .all(|b| a.then(b, f) == b.then(a, f))
        })
    }
}

struct Search<'a> {
    group: &'a CurveGroup,
    f: &'a FieldContext,
    complete: bool,
    found: Vec<Automorphism>,
}

impl Search<'_> {
    fn poly(&self, coeffs: Vec<FieldElement>) -> Poly {
        Poly::new(coeffs)
    }

    /// Rational roots of the gcd of the given constraints, noting whether the
    /// gcd splits completely here.
    fn solve(&mut self, constraints: &[Poly]) -> Vec<FieldElement> {
        let g = constraints
            .iter()
            .filter(|c| !c.is_zero())
            .fold(Poly::new(Vec::new()), |acc, c| self.f.poly_gcd(&acc, c));
        assert!(!g.is_zero(), "every stage has a nonzero constraint");
        let roots = self.f.polynomial_roots(g.coeffs()).expect("nonzero gcd");
        if roots.len() != self.f.closure_root_count(&g) {
            self.complete = false;
        }
        roots
    }

    fn run(&mut self) {
        let f = self.f;
        let c = |n: i64| f.from_int(n);
        let curve = self.group.curve();
        let [a1, a2, a3, a4, a6] = *self.group.coefficients();
        let [b2, b4, b6, b8] = curve.b_invariants().map(|v| f.from_u32(v));
        let one = f.one();
        let zero = f.zero();

        // u^12 = 1 always; u^4 = 1 when c4 != 0 and u^6 = 1 when c6 != 0.
        let power_minus_one = |n: usize| {
            let mut v = vec![zero; n + 1];
            v[0] = f.neg(&one);
            v[n] = one;
            Poly::new(v)
        };
        let mut u_constraints = vec![power_minus_one(12)];
        if curve.c4() != 0 {
            u_constraints.push(power_minus_one(4));
        }
        if curve.c6() != 0 {
            u_constraints.push(power_minus_one(6));
        }
        for u in self.solve(&u_constraints) {
            let up = |n: u128| f.pow(&u, n);
            let one_minus = |n: u128| f.sub(&one, &up(n));
            let r_constraints = [
                self.poly(vec![f.mul(&b2, &one_minus(2)), c(12)]),
                self.poly(vec![f.mul(&b4, &one_minus(4)), b2, c(6)]),
                self.poly(vec![f.mul(&b6, &one_minus(6)), f.mul(&c(2), &b4), b2, c(4)]),
                self.poly(vec![
                    f.mul(&b8, &one_minus(8)),
                    f.mul(&c(3), &b6),
                    f.mul(&c(3), &b4),
                    b2,
                    c(3),
                ]),
            ];
            for r in self.solve(&r_constraints) {
                let s_constraints = [
                    self.poly(vec![f.mul(&a1, &one_minus(1)), c(2)]),
                    self.poly(vec![
                        f.sub(&f.sub(&f.mul(&up(2), &a2), &a2), &f.mul(&c(3), &r)),
                        a1,
                        one,
                    ]),
                ];
                for s in self.solve(&s_constraints) {
                    let r2 = f.square(&r);
                    let t3 = f.sub(&f.add(&a3, &f.mul(&r, &a1)), &f.mul(&up(3), &a3));
                    let t4 = [
                        f.neg(&f.mul(&s, &a3)),
                        f.mul(&c(2), &f.mul(&r, &a2)),
                        f.neg(&f.mul(&f.mul(&r, &s), &a1)),
                        f.mul(&c(3), &r2),
                        f.neg(&f.mul(&up(4), &a4)),
                    ]
                    .iter()
                    .fold(a4, |acc, v| f.add(&acc, v));
                    let t6 = [
                        f.neg(&a6),
                        f.neg(&f.mul(&r, &a4)),
                        f.neg(&f.mul(&r2, &a2)),
                        f.neg(&f.mul(&r2, &r)),
                    ]
                    .iter()
                    .fold(f.mul(&up(6), &a6), |acc, v| f.add(&acc, v));
                    let t_constraints = [
                        self.poly(vec![t3, c(2)]),
                        self.poly(vec![t4, f.neg(&f.add(&a1, &f.mul(&c(2), &s)))]),
                        self.poly(vec![t6, f.add(&a3, &f.mul(&r, &a1)), one]),
                    ];
                    for t in self.solve(&t_constraints) {
                        self.found.push(Automorphism { u, r, s, t });
                    }
                }
            }
        }
        self.found.sort();
    }
}

fn validate(group: &CurveGroup, aut: &Automorphism, rng: &mut ChaCha8Rng) -> Result<(), StructureError> {
    let f = group.field();
    if aut.transform(group.coefficients(), f) != *group.coefficients() {
        return Err(StructureError::InvalidAutomorphism(format!(
            "{aut} does not preserve the coefficients"
        )));
    }
    for _ in 0..VALIDATION_POINTS {
        let p = group.random_point(rng);
        let q = group.random_point(rng);
        let (ip, iq) = (aut.apply(group, &p), aut.apply(group, &q));
        if !group.contains(&ip) || aut.apply(group, &group.add(&p, &q)) != group.add(&ip, &iq) {
            return Err(StructureError::InvalidAutomorphism(format!(
                "{aut} is not a homomorphism on sampled points"
            )));
        }
    }
    Ok(())
}

fn check_closure(elements: &[Automorphism], f: &FieldContext) -> bool {
    let set: HashSet<&Automorphism> = elements.iter().collect();
    elements
        .iter()
        .all(|a| elements.iter().all(|b| set.contains(&a.then(b, f))))
}

fn search(group: &CurveGroup) -> Result<(Vec<Automorphism>, bool), StructureError> {
    let mut s = Search {
        group,
        f: group.field(),
        complete: true,
        found: Vec::new(),
    };
    s.run();
    let curve = group.curve();
    let [a1, a2, a3, a4, a6] = curve.coefficients();
    let seed = (curve.p() as u64) << 48
        ^ (a1 as u64) << 40
        ^ (a2 as u64) << 32
        ^ (a3 as u64) << 24
        ^ (a4 as u64) << 16
        ^ (a6 as u64) << 8
        ^ group.degree() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for aut in &s.found {
        validate(group, aut, &mut rng)?;
    }
    Ok((s.found, s.complete))
}

type AutCacheKey = (u32, [u32; 5], u32);

/// `Aut_0(E)` over the group's field. Fails with `NotFoundWithinTower` when
/// some automorphism is only defined over a larger field.
pub fn automorphism_group_over(group: &CurveGroup) -> Result<Arc<AutGroup>, StructureError> {
    static CACHE: OnceLock<Mutex<HashMap<AutCacheKey, Arc<AutGroup>>>> = OnceLock::new();
    let curve = group.curve();
    let key = (curve.p(), curve.coefficients(), group.degree());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(g));
    }
    let (elements, complete) = search(group)?;
    if !complete {
        return Err(StructureError::NotFoundWithinTower {
            what: format!("Aut_0 of {curve}"),
            k_max: group.degree(),
        });
    }
    let label = expected_aut_label(curve);
    if elements.len() != label.order() {
        return Err(StructureError::TableMismatch {
            expected: label.order(),
            found: elements.len(),
            label,
        });
    }
    if !check_closure(&elements, group.field()) {
        return Err(StructureError::Internal(format!("Aut_0 of {curve} is not closed")));
    }
    let g = Arc::new(AutGroup {
        elements,
        label,
        field_degree: group.degree(),
    });
    cache.lock().unwrap().insert(key, Arc::clone(&g));
    Ok(g)
}

/// `Aut_0(E)` over the least `F_{p^k}` containing every automorphism.
pub fn automorphism_group(curve: &WeierstrassCurve, tower: &Tower) -> Result<Arc<AutGroup>, StructureError> {
    for k in 1..=tower.k_max() {
        match automorphism_group_over(&curve.over(k)?) {
            Err(StructureError::NotFoundWithinTower { .. }) => continue,
            other => return other,
        }
    }
    Err(tower.exhausted(format!("Aut_0 of {curve}")))
}

/// Outcome of [`group_structure_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub order: usize,
    pub order_matches_label: bool,
    pub has_identity: bool,
    pub has_negation: bool,
    pub closed: bool,
    pub has_inverses: bool,
    pub abelian: bool,
    pub abelian_matches_label: bool,
    /// Points of order at least 4 whose stabiliser was examined.
    pub points_checked: usize,
    /// Points of order at least 4 fixed by a non-identity automorphism.
    pub stabilizer_violations: usize,
}

impl StructureReport {
    pub fn ok(&self) -> bool {
        self.order_matches_label
            && self.has_identity
            && self.has_negation
            && self.closed
            && self.has_inverses
            && self.abelian_matches_label
            && self.stabilizer_violations == 0
    }
}

/// Verifies the group axioms, the advertised order, and that no
/// non-identity automorphism fixes a point of order at least 4.
pub fn group_structure_check(g: &AutGroup, group: &CurveGroup) -> StructureReport {
    let f = group.field();
    let id = Automorphism::identity(f);
    let set: HashSet<&Automorphism> = g.elements.iter().collect();
    let closed = check_closure(&g.elements, f);
    let has_inverses = g
        .elements
        .iter()
        .all(|a| g.elements.iter().any(|b| a.then(b, f) == id));
    let abelian = g.is_abelian(f);

    let candidates: Vec<CurvePoint> = if f.order() <= 4096.min(TABLE_LIMIT) {
        group.points().unwrap_or_default()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(group.degree() as u64);
        (0..64).map(|_| group.random_point(&mut rng)).collect()
    };
    let mut points_checked = 0;
    let mut stabilizer_violations = 0;
    for a in candidates {
        if group.point_order(&a) < 4 {
            continue;
        }
        points_checked += 1;
        if g.elements.iter().any(|phi| *phi != id && phi.apply(group, &a) == a) {
            stabilizer_violations += 1;
        }
    }
    StructureReport {
        order: g.order(),
        order_matches_label: g.order() == g.label.order(),
        has_identity: set.contains(&id),
        has_negation: set.contains(&Automorphism::negation(group)),
        closed,
        has_inverses,
        abelian,
        abelian_matches_label: abelian == g.label.is_abelian(),
        points_checked,
        stabilizer_violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_new;

    fn aut_order(p: u32, a: [i64; 5]) -> usize {
        let e = curve_new(p, a[0], a[1], a[2], a[3], a[4]).unwrap();
        automorphism_group(&e, &Tower::default()).unwrap().order()
    }

    /// Oracle: every `(u, r, s, t)` over a small field preserving the model,
    /// by exhaustive quadruple loop.
    fn brute_force_automorphisms(group: &CurveGroup) -> Vec<Automorphism> {
        let f = group.field();
        let elems: Vec<_> = f.elements().collect();
        let mut out = Vec::new();
        for &u in elems.iter().filter(|e| !e.is_zero()) {
            for &r in &elems {
                for &s in &elems {
                    for &t in &elems {
                        let a = Automorphism { u, r, s, t };
                        if a.transform(group.coefficients(), f) == *group.coefficients() {
                            out.push(a);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn table_rows() {
        assert_eq!(aut_order(7, [0, 0, 0, 3, 2]), 2);
        assert_eq!(aut_order(5, [0, 0, 0, 0, 1]), 6);
        assert_eq!(aut_order(5, [0, 0, 0, 1, 0]), 4);
        assert_eq!(aut_order(2, [0, 0, 1, 0, 0]), 24);
        assert_eq!(aut_order(3, [0, 0, 0, -1, 0]), 12);
        assert_eq!(aut_order(2, [1, 0, 0, 0, 1]), 2);
    }

    #[test]
    fn labels_and_abelianness() {
        let e = curve_new(2, 0, 0, 1, 0, 0).unwrap();
        let g = automorphism_group(&e, &Tower::default()).unwrap();
        assert_eq!(g.label.to_string(), "Q ⋊ Z/3Z");
        let group = e.over(g.field_degree).unwrap();
        let report = group_structure_check(&g, &group);
        assert!(report.ok(), "{report:?}");
        assert!(!report.abelian);

        let e = curve_new(3, 0, 0, 0, -1, 0).unwrap();
        let g = automorphism_group(&e, &Tower::default()).unwrap();
        assert_eq!(g.label.to_string(), "Z/3Z ⋊ Z/4Z");
        let report = group_structure_check(&g, &e.over(g.field_degree).unwrap());
        assert!(report.ok() && !report.abelian, "{report:?}");
    }

    #[test]
    fn generic_curve_structure_report() {
        let e = curve_new(7, 0, 0, 0, 3, 2).unwrap();
        let g = automorphism_group(&e, &Tower::default()).unwrap();
        assert_eq!(g.field_degree, 1);
        let group = e.over(2).unwrap();
        let g2 = automorphism_group_over(&group).unwrap();
        let report = group_structure_check(&g2, &group);
        assert!(report.ok());
        assert_eq!(report.order, 2);
        assert!(report.points_checked > 0);
    }

    #[test]
    fn cyclic_four_is_generated_by_a_primitive_fourth_root() {
        let e = curve_new(5, 0, 0, 0, 1, 0).unwrap();
        let group = e.over(1).unwrap();
        let g = automorphism_group_over(&group).unwrap();
        let f = group.field();
        let gen = g
            .elements
            .iter()
            .find(|a| f.element_order(&a.u) == 4)
            .unwrap();
        let mut cur = *gen;
        let mut powers = vec![cur];
        for _ in 0..3 {
            cur = cur.then(gen, f);
            powers.push(cur);
        }
        powers.sort();
        assert_eq!(powers, g.elements);
    }

    #[test]
    fn search_matches_exhaustive_quadruple_loop() {
        let cases: &[(u32, [i64; 5], u32)] = &[
            (2, [0, 0, 1, 0, 0], 2),
            (2, [0, 0, 1, 1, 0], 2),
            (2, [1, 0, 0, 0, 1], 2),
            (3, [0, 0, 0, -1, 0], 2),
            (3, [0, 1, 0, 0, 1], 2),
            (5, [0, 0, 0, 0, 1], 2),
            (5, [1, 2, 3, 1, 0], 1),
            (7, [0, 0, 0, 1, 0], 2),
        ];
        for &(p, a, k) in cases {
            let e = curve_new(p, a[0], a[1], a[2], a[3], a[4]).unwrap();
            let group = e.over(k).unwrap();
            let (found, _) = search(&group).unwrap();
            assert_eq!(found, brute_force_automorphisms(&group), "{e} k={k}");
        }
    }

    #[test]
    fn apply_examples() {
        let e = curve_new(7, 0, 0, 0, 0, 1).unwrap();
        let group = e.over(1).unwrap();
        let g = automorphism_group_over(&group).unwrap();
        let f = group.field();
        let p = CurvePoint::Affine { x: f.zero(), y: f.one() };
        assert_eq!(g.identity().apply(&group, &p), p);
        assert_eq!(Automorphism::negation(&group).apply(&group, &p), group.neg(&p));
        let phi = g.elements.iter().find(|a| f.element_order(&a.u) == 6).unwrap();
        let image = apply_automorphism(&group, phi, &p).unwrap();
        assert_eq!(group.point_order(&image), group.point_order(&p));
        assert_eq!(group.point_order(&p), 3);
        let bad = CurvePoint::Affine { x: f.one(), y: f.one() };
        assert!(apply_automorphism(&group, phi, &bad).is_err());
    }

    #[test]
    fn automorphisms_are_homomorphisms_and_preserve_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, a) in [(2u32, [0i64, 0, 1, 0, 0]), (3, [0, 0, 0, -1, 0]), (13, [0, 0, 0, 0, 2]), (13, [0, 0, 0, 2, 0])] {
            let e = curve_new(p, a[0], a[1], a[2], a[3], a[4]).unwrap();
            let k = automorphism_group(&e, &Tower::default()).unwrap().field_degree;
            let group = e.over(k * 3).unwrap();
            let g = automorphism_group_over(&group).unwrap();
            for _ in 0..50 {
                let x = group.random_point(&mut rng);
                let y = group.random_point(&mut rng);
                for phi in &g.elements {
                    assert_eq!(
                        phi.apply(&group, &group.add(&x, &y)),
                        group.add(&phi.apply(&group, &x), &phi.apply(&group, &y))
                    );
                    assert_eq!(group.point_order(&phi.apply(&group, &x)), group.point_order(&x));
                }
            }
        }
    }

    #[test]
    fn incomplete_fields_are_reported() {
        // Over F_7 the fourth roots of unity are missing.
        let e = curve_new(7, 0, 0, 0, 1, 0).unwrap();
        assert!(matches!(
            automorphism_group_over(&e.over(1).unwrap()),
            Err(StructureError::NotFoundWithinTower { .. })
        ));
        assert_eq!(automorphism_group(&e, &Tower::default()).unwrap().field_degree, 2);
        assert!(matches!(
            automorphism_group(&e, &Tower::new(1)),
            Err(StructureError::NotFoundWithinTower { .. })
        ));
    }
}
