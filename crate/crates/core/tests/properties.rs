use std::collections::HashSet;

use fmcount::curve::{curve_new, CurvePoint, WeierstrassCurve};
use fmcount::field::{field, field_make, FieldElement};
use fmcount::fm::{
    fiber_table, unit_group, BaseKind, BundleKind, FmError, Instance, SurfaceDescriptor,
};
use fmcount::structure::{
    automorphism_group, automorphism_group_over, expected_aut_label, torsion_subgroup, Automorphism, StructureError,
    TorsionStructure, Tower,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SMALL_PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn any_curve(primes: &'static [u32]) -> impl Strategy<Value = WeierstrassCurve> {
    (prop::sample::select(primes), prop::array::uniform5(0i64..97))
        .prop_filter_map("singular", |(p, a)| curve_new(p, a[0], a[1], a[2], a[3], a[4]).ok())
}

fn field_params() -> impl Strategy<Value = (u32, u32)> {
    prop::sample::select(vec![(2, 1), (2, 5), (2, 12), (3, 4), (5, 3), (7, 2), (13, 6), (97, 1), (97, 4), (97, 12)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse_and_frobenius((p, k) in field_params(), seed in any::<u64>()) {
        let f = field(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = f.random(&mut rng);
        let y = f.random(&mut rng);
        if !x.is_zero() {
            prop_assert!(f.is_one(&f.mul(&x, &f.inv(&x).unwrap())));
        }
        let frob = |a: &FieldElement| f.pow(a, p as u128);
        prop_assert_eq!(frob(&f.add(&x, &y)), f.add(&frob(&x), &frob(&y)));
        prop_assert_eq!(f.mul(&x, &f.add(&y, &f.one())), f.add(&f.mul(&x, &y), &x));
    }

    #[test]
    fn roots_of_unity_count((p, k) in field_params(), n in 1u64..=24) {
        let f = field(p, k).unwrap();
        let q1 = (p as u128).pow(k) - 1;
        prop_assert_eq!(f.roots_of_unity(n).len() as u64, gcd(n, (q1 % n as u128) as u64));
    }

    #[test]
    fn field_make_is_deterministic((p, k) in field_params()) {
        let a = field_make(p, k).unwrap();
        let b = field_make(p, k).unwrap();
        prop_assert_eq!(a.modulus(), b.modulus());
    }

    #[test]
    fn group_law_axioms(e in any_curve(&SMALL_PRIMES), k in 1u32..=4, seed in any::<u64>()) {
        let g = e.over(k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..16 {
            let (a, b, c) = (g.random_point(&mut rng), g.random_point(&mut rng), g.random_point(&mut rng));
            prop_assert_eq!(g.add(&a, &b), g.add(&b, &a));
            prop_assert_eq!(g.add(&g.add(&a, &b), &c), g.add(&a, &g.add(&b, &c)));
            prop_assert!(g.add(&a, &g.neg(&a)).is_infinity());
            prop_assert_eq!(g.add(&a, &CurvePoint::Infinity), a);
            prop_assert!(g.contains(&g.add(&a, &b)));
        }
    }

    #[test]
    fn lagrange_on_small_groups(e in any_curve(&[2, 3, 5, 7]), k in 1u32..=2) {
        let g = e.over(k).unwrap();
        let pts = g.points().unwrap();
        prop_assert_eq!(pts.len() as u128, g.order());
        for pt in &pts {
            prop_assert_eq!(g.order() % g.point_order(pt), 0);
        }
    }

    #[test]
    fn hasse_bound(e in any_curve(&[2, 3, 5, 7, 11, 13, 17, 31, 53, 89, 97])) {
        let t = e.trace();
        prop_assert!(t * t <= 4 * e.p() as i64);
    }

    #[test]
    fn j_invariant_is_preserved_by_coordinate_changes(
        e in any_curve(&SMALL_PRIMES),
        change in prop::array::uniform4(0u32..97),
    ) {
        let p = e.p();
        let f = field(p, 1).unwrap();
        let u = f.from_u32(change[0] % (p - 1) + 1);
        let [r, s, t] = [change[1], change[2], change[3]].map(|v| f.from_u32(v));
        let phi = Automorphism { u, r, s, t };
        let a = e.coefficients().map(|c| f.from_u32(c));
        let moved = phi.transform(&a, &f).map(|c| c.as_prime().unwrap() as i64);
        let e2 = curve_new(p, moved[0], moved[1], moved[2], moved[3], moved[4]).unwrap();
        prop_assert_eq!(e.j_invariant(), e2.j_invariant());
        prop_assert_eq!(e.trace(), e2.trace());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torsion_when_found(e in any_curve(&[5, 7, 11]), m in 2u64..=12) {
        prop_assume!(m % e.p() as u64 != 0);
        match torsion_subgroup(&e, m, &Tower::new(6)) {
            Ok(t) => {
                let g = e.over(t.field_degree).unwrap();
                prop_assert_eq!(t.points.len() as u64, m * m);
                prop_assert_eq!(t.structure, TorsionStructure::Rank2 { m });
                prop_assert_eq!(t.basis.len(), 2);
                for b in &t.basis {
                    prop_assert_eq!(g.point_order(b), m as u128);
                }
            }
            Err(StructureError::NotFoundWithinTower { .. }) => prop_assume!(false),
            Err(err) => prop_assert!(false, "{}", err),
        }
    }

    #[test]
    fn automorphisms(e in any_curve(&SMALL_PRIMES), seed in any::<u64>()) {
        let g = automorphism_group(&e, &Tower::default()).unwrap();
        let label = expected_aut_label(&e);
        prop_assert_eq!(g.order(), label.order());
        let group = e.over(g.field_degree * 2).unwrap();
        let aut = automorphism_group_over(&group).unwrap();
        prop_assert_eq!(aut.is_abelian(group.field()), !(e.j_invariant() == 0 && e.p() <= 3));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let id = Automorphism::identity(group.field());
        for _ in 0..8 {
            let a = group.random_point(&mut rng);
            let b = group.random_point(&mut rng);
            let order = group.point_order(&a);
            for phi in &aut.elements {
                prop_assert_eq!(phi.apply(&group, &group.add(&a, &b)), group.add(&phi.apply(&group, &a), &phi.apply(&group, &b)));
                prop_assert_eq!(group.point_order(&phi.apply(&group, &a)), order);
                if order >= 4 && phi.apply(&group, &a) == a {
                    prop_assert_eq!(*phi, id);
                }
            }
        }
    }

    #[test]
    fn partner_laws(e in any_curve(&[2, 3, 5, 7, 11, 13]), m in 2u64..=16) {
        let inst = match Instance::resolve(&e, m, &Tower::new(8)) {
            Ok(inst) => inst,
            Err(FmError::Structure(StructureError::NotFoundWithinTower { .. } | StructureError::UnsupportedMixedOrder { .. }))
            | Err(FmError::NoPointOfOrder { .. }) => {
                prop_assume!(false);
                unreachable!()
            }
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        let r = inst.partners().unwrap();
        let units = unit_group(m);
        let h: HashSet<u64> = r.h.members.iter().copied().collect();
        prop_assert!(h.contains(&1) && h.contains(&(m - 1)));
        prop_assert!(r.h.members.iter().all(|&i| r.h.members.iter().all(|&j| h.contains(&(i * j % m)))));
        if m >= 4 {
            prop_assert!([2, 4, 6].contains(&h.len()));
            prop_assert_eq!(inst.aut.order() % h.len(), 0);
        }
        prop_assert_eq!(r.count * h.len() as u64, units.phi);
        prop_assert_eq!(inst.oracle().unwrap(), r.count);
        if m >= 3 {
            prop_assert!(2 * r.count <= units.phi);
            prop_assert_eq!(2 * r.count == units.phi, h.len() == 2);
        }

        // Equivalence straight from points: i ~ j iff phi(i a) = j a.
        let g = &inst.group;
        let mult = |i: u64| g.mul(i as i128, &inst.a);
        let related = |i: u64, j: u64| inst.aut.elements.iter().any(|phi| phi.apply(g, &mult(i)) == mult(j));
        for (x, &i) in r.representatives.iter().enumerate() {
            for &j in &r.representatives[x + 1..] {
                prop_assert!(!related(i, j));
            }
        }
        for &u in &units.elements {
            prop_assert_eq!(r.representatives.iter().filter(|&&i| related(i, u)).count(), 1);
        }
    }

    #[test]
    fn ordinary_p_power_torsion_realises_every_automorphism(e in any_curve(&[2, 3, 5, 7])) {
        let p = e.p() as u64;
        prop_assume!(!e.is_supersingular());
        let m = match p { 2 => 4, 3 => 9, _ => p };
        match Instance::resolve(&e, m, &Tower::default()) {
            Ok(inst) => prop_assert_eq!(inst.h_group().unwrap().size(), inst.aut.order()),
            Err(FmError::Structure(StructureError::NotFoundWithinTower { .. })) => prop_assume!(false),
            Err(err) => prop_assert!(false, "{}", err),
        }
    }
}

#[test]
fn unit_group_is_closed() {
    for m in 2..=30u64 {
        let u = unit_group(m);
        let set: HashSet<u64> = u.elements.iter().copied().collect();
        assert!(u.elements.iter().all(|&a| u.elements.iter().all(|&b| set.contains(&(a * b % m)))));
        assert!(u.elements.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn fiber_table_is_total_and_injective_on_shapes() {
    use BundleKind::*;
    let shapes = [
        SurfaceDescriptor::decomposable(TrivialSum, 5),
        SurfaceDescriptor::decomposable(LineSum { order: 6 }, 5),
        SurfaceDescriptor::decomposable(LineSumInfinite, 5),
        SurfaceDescriptor::decomposable(Indecomposable, 0),
        SurfaceDescriptor::decomposable(Indecomposable, 5),
        SurfaceDescriptor::odd(5, None),
        SurfaceDescriptor::odd(2, Some(BaseKind::Supersingular)),
        SurfaceDescriptor::odd(2, Some(BaseKind::Ordinary)),
    ];
    let rows: HashSet<_> = shapes.iter().map(|d| fiber_table(d).unwrap()).collect();
    assert_eq!(rows.len(), shapes.len());
}
