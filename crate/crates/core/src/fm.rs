//! Fourier–Mukai partner counts for elliptic ruled surfaces `P(O_E ⊕ L)`,
//! where `L` has finite order `m` and corresponds to a point `a` of order `m`.
//! Also the singular-fiber tables and multisection indices of elliptic ruled
//! surfaces.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::curve::{CurveGroup, CurvePoint, WeierstrassCurve};
use crate::field::gcd_u128;
use crate::structure::{
    automorphism_group, automorphism_group_over, torsion_over, torsion_subgroup, AutGroup, Automorphism,
    StructureError, Tower, TorsionData,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FmError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("point order {0} is below 2")]
    OrderTooSmall(u64),
    #[error("the curve has no point of order {m}")]
    NoPointOfOrder { m: u64 },
    #[error("case ({0}) admits no elliptic fibration")]
    NoEllipticFibration(&'static str),
    #[error("inconsistent surface descriptor: {0}")]
    InconsistentDescriptor(String),
}

impl From<crate::curve::CurveError> for FmError {
    fn from(e: crate::curve::CurveError) -> Self {
        FmError::Structure(e.into())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    gcd_u128(a as u128, b as u128) as u64
}

/// `(Z/mZ)*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitGroup {
    pub m: u64,
    pub elements: Vec<u64>,
    pub phi: u64,
}

/// The units modulo `m`. For `m = 1` this is the trivial group `{0}`.
pub fn unit_group(m: u64) -> UnitGroup {
    assert!(m >= 1, "modulus must be positive");
    let elements: Vec<u64> = if m == 1 {
        vec![0]
    } else {
        (1..m).filter(|&i| gcd(i, m) == 1).collect()
    };
    UnitGroup {
        m,
        phi: elements.len() as u64,
        elements,
    }
}

/// Multipliers `i` realised by automorphisms: `φ(a) = i·a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HSubgroup {
    pub m: u64,
    pub members: Vec<u64>,
    pub witness: BTreeMap<u64, Automorphism>,
}

impl HSubgroup {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: u64) -> bool {
        self.members.binary_search(&(i % self.m)).is_ok()
    }

    /// Closed, contains `1` and `m - 1`, and has inverses.
    pub fn is_subgroup(&self) -> bool {
        let m = self.m;
        self.contains(1)
            && self.contains(m - 1)
            && self
                .members
                .iter()
                .all(|&i| self.members.iter().all(|&j| self.contains(i * j % m)))
            && self
                .members
                .iter()
                .all(|&i| self.members.iter().any(|&j| i * j % m == 1 % m))
    }
}

/// The partner count and coset representatives for one `(E, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnerReport {
    pub m: u64,
    pub h: HSubgroup,
    pub representatives: Vec<u64>,
    pub count: u64,
    pub bound_ok: bool,
    pub oracle_count: Option<u64>,
}

/// Scan `0..m` for `i` with `i·a = target`.
fn scan_log(multiples: &[CurvePoint], target: &CurvePoint) -> Option<u64> {
    multiples.iter().position(|q| q == target).map(|i| i as u64)
}

fn multiples(group: &CurveGroup, a: &CurvePoint, m: u64) -> Vec<CurvePoint> {
    let mut out = Vec::with_capacity(m as usize);
    let mut cur = CurvePoint::Infinity;
    for _ in 0..m {
        out.push(cur);
        cur = group.add(&cur, a);
    }
    out
}

fn order_of(group: &CurveGroup, a: &CurvePoint) -> Result<u64, FmError> {
    group.check(a)?;
    let m = group.point_order(a) as u64;
    if m < 2 {
        return Err(FmError::OrderTooSmall(m));
    }
    Ok(m)
}

/// `H^a`, the subgroup of `(Z/mZ)*` realised by `aut` on the point `a`.
pub fn h_group(group: &CurveGroup, aut: &AutGroup, a: &CurvePoint) -> Result<HSubgroup, FmError> {
    let m = order_of(group, a)?;
    let mults = multiples(group, a, m);
    let mut witness = BTreeMap::new();
    for phi in &aut.elements {
        if let Some(i) = scan_log(&mults, &phi.apply(group, a)) {
            witness.entry(i).or_insert(*phi);
        }
    }
    Ok(HSubgroup {
        m,
        members: witness.keys().copied().collect(),
        witness,
    })
}

/// Coset representatives of `H` in `(Z/mZ)*`, the partner count, and the
/// bound `count <= φ(m)/2` for `m >= 3`.
pub fn fm_partners(group: &CurveGroup, aut: &AutGroup, a: &CurvePoint) -> Result<PartnerReport, FmError> {
    let h = h_group(group, aut, a)?;
    let m = h.m;
    let units = unit_group(m);
    let mut covered = vec![false; m as usize];
    let mut representatives = Vec::new();
    for &i in &units.elements {
        if covered[i as usize] {
            continue;
        }
        representatives.push(i);
        for &x in &h.members {
            covered[(i * x % m) as usize] = true;
        }
    }
    let count = units.phi / h.size() as u64;
    let bound_ok = m < 3 || 2 * count <= units.phi;
    Ok(PartnerReport {
        m,
        h,
        representatives,
        count,
        bound_ok,
        oracle_count: None,
    })
}

/// Independent partner count: classes of units under `i ~ j` whenever some
/// automorphism sends `i·a` to `j·a`.
pub fn fm_oracle(group: &CurveGroup, aut: &AutGroup, a: &CurvePoint) -> Result<u64, FmError> {
    let m = order_of(group, a)?;
    let mults = multiples(group, a, m);
    let mut parent: Vec<usize> = (0..m as usize).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let units = unit_group(m);
    for &i in &units.elements {
        for phi in &aut.elements {
            let image = phi.apply(group, &mults[i as usize]);
            if let Some(j) = scan_log(&mults, &image) {
                let (ri, rj) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
                parent[ri] = rj;
            }
        }
    }
    let mut roots: Vec<usize> = units
        .elements
        .iter()
        .map(|&i| find(&mut parent, i as usize))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len() as u64)
}

/// A curve, an order `m`, and everything needed to compute partners: a field
/// holding both `E[m]` and `Aut_0(E)`, and the first basis point of `E[m]`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub m: u64,
    pub group: CurveGroup,
    pub aut: Arc<AutGroup>,
    pub torsion: TorsionData,
    pub a: CurvePoint,
}

impl Instance {
    /// Resolves `(curve, m)` over `F_{p^K}`, `K` the least common multiple of
    /// the degrees where the torsion and the automorphisms become rational.
    pub fn resolve(curve: &WeierstrassCurve, m: u64, tower: &Tower) -> Result<Instance, FmError> {
        let aut = automorphism_group(curve, tower)?;
        let torsion = torsion_subgroup(curve, m, tower)?;
        if torsion.points.len() < 2 {
            return Err(FmError::NoPointOfOrder { m });
        }
        let (kt, ka) = (torsion.field_degree as u64, aut.field_degree as u64);
        let k = (kt / gcd(kt, ka) * ka) as u32;
        if k > tower.k_max() {
            return Err(tower_error(curve, m, tower));
        }
        let group = curve.over(k)?;
        let (aut, torsion) = if k == aut.field_degree && k == torsion.field_degree {
            (aut, torsion)
        } else {
            let t = torsion_over(&group, m)?.ok_or_else(|| tower_error(curve, m, tower))?;
            (automorphism_group_over(&group)?, t)
        };
        let a = torsion.basis[0];
        Ok(Instance {
            m,
            group,
            aut,
            torsion,
            a,
        })
    }

    pub fn h_group(&self) -> Result<HSubgroup, FmError> {
        h_group(&self.group, &self.aut, &self.a)
    }

    pub fn partners(&self) -> Result<PartnerReport, FmError> {
        fm_partners(&self.group, &self.aut, &self.a)
    }

    pub fn oracle(&self) -> Result<u64, FmError> {
        fm_oracle(&self.group, &self.aut, &self.a)
    }
}

fn tower_error(curve: &WeierstrassCurve, m: u64, tower: &Tower) -> FmError {
    FmError::Structure(StructureError::NotFoundWithinTower {
        what: format!("E[{m}] together with Aut_0 of {curve}"),
        k_max: tower.k_max(),
    })
}

/// The rank-2 bundle `E` with `S = P(E)`, for `e = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BundleKind {
    TrivialSum,
    LineSum { order: u64 },
    LineSumInfinite,
    Indecomposable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BaseKind {
    Ordinary,
    Supersingular,
}

/// An elliptic ruled surface, up to the data the fiber tables depend on.
/// `p = 0` stands for characteristic zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SurfaceDescriptor {
    pub e: i8,
    pub bundle: Option<BundleKind>,
    pub p: u32,
    pub base: Option<BaseKind>,
}

impl SurfaceDescriptor {
    pub fn decomposable(bundle: BundleKind, p: u32) -> Self {
        SurfaceDescriptor {
            e: 0,
            bundle: Some(bundle),
            p,
            base: None,
        }
    }

    pub fn odd(p: u32, base: Option<BaseKind>) -> Self {
        SurfaceDescriptor {
            e: -1,
            bundle: None,
            p,
            base,
        }
    }
}

/// A number in a fiber table: either a literal or one of the symbols of the
/// printed table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quantity {
    Lit(u64),
    M,
    P,
    PMinus2,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Lit(n) => write!(f, "{n}"),
            Quantity::M => f.write_str("m"),
            Quantity::P => f.write_str("p"),
            Quantity::PMinus2 => f.write_str("p-2"),
        }
    }
}

/// One multiple fiber: `a/m*` with optional exponent and wild flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FiberEntry {
    pub multiplicity: Quantity,
    pub exponent: Option<Quantity>,
    pub wild: bool,
}

impl fmt::Display for FiberEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.exponent {
            write!(f, "{a}/")?;
        }
        write!(f, "{}{}", self.multiplicity, if self.wild { "*" } else { "" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiberRow {
    /// `i-1` … `ii-3`.
    pub label: &'static str,
    pub entries: Vec<FiberEntry>,
    pub has_elliptic_fibration: bool,
    /// Bundle or base-curve column.
    pub condition: &'static str,
    pub characteristic: &'static str,
}

impl FiberRow {
    /// The multiple-fiber column.
    pub fn fibers(&self) -> String {
        if !self.has_elliptic_fibration {
            return "no elliptic fibrations".into();
        }
        if self.entries.is_empty() {
            return "no multiple fibers".into();
        }
        let mixed = self.entries.iter().any(|e| e.exponent.is_some())
            && self.entries.iter().any(|e| e.exponent.is_none());
        let sep = if mixed { ", " } else { "," };
        let parts: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        format!("({})", parts.join(sep))
    }

    pub fn wild_flags(&self) -> Vec<bool> {
        self.entries.iter().map(|e| e.wild).collect()
    }

    pub fn table_line(&self) -> String {
        format!(
            "({})\t{}\t{}\t{}",
            self.label,
            self.condition,
            self.fibers(),
            self.characteristic
        )
    }
}

fn tame(m: Quantity) -> FiberEntry {
    FiberEntry {
        multiplicity: m,
        exponent: None,
        wild: false,
    }
}

fn wild(a: Quantity, m: Quantity) -> FiberEntry {
    FiberEntry {
        multiplicity: m,
        exponent: Some(a),
        wild: true,
    }
}

/// Row labels in table order.
pub const FIBER_ROW_LABELS: [&str; 8] = ["i-1", "i-2", "i-3", "i-4", "i-5", "ii-1", "ii-2", "ii-3"];

/// The symbolic row as printed, with `m` and `p` unresolved.
pub fn fiber_template(label: &str) -> Option<FiberRow> {
    use Quantity::*;
    let row = |label, entries, has, condition, characteristic| FiberRow {
        label,
        entries,
        has_elliptic_fibration: has,
        condition,
        characteristic,
    };
    Some(match label {
        "i-1" => row("i-1", vec![], true, "O_E + O_E", "p >= 0"),
        "i-2" => row("i-2", vec![tame(M), tame(M)], true, "O_E + L, ord L = m > 1", "p >= 0"),
        "i-3" => row("i-3", vec![], false, "O_E + L, ord L = infinity", "p >= 0"),
        "i-4" => row("i-4", vec![], false, "indecomposable", "p = 0"),
        "i-5" => row("i-5", vec![wild(PMinus2, P)], true, "indecomposable", "p > 0"),
        "ii-1" => row("ii-1", vec![tame(Lit(2)); 3], true, "", "p != 2"),
        "ii-2" => row("ii-2", vec![wild(Lit(1), Lit(2))], true, "supersingular", "p = 2"),
        "ii-3" => row("ii-3", vec![tame(Lit(2)), wild(Lit(0), Lit(2))], true, "ordinary", "p = 2"),
        _ => return None,
    })
}

fn is_prime_or_zero(p: u32) -> bool {
    p == 0 || num_prime::nt_funcs::is_prime64(p as u64)
}

/// The table row a descriptor falls into.
pub fn fiber_row_label(d: &SurfaceDescriptor) -> Result<&'static str, FmError> {
    let bad = |msg: &str| Err(FmError::InconsistentDescriptor(msg.into()));
    if !is_prime_or_zero(d.p) {
        return bad("characteristic must be 0 or prime");
    }
    match d.e {
        0 => match d.bundle {
            None => bad("e = 0 needs a bundle kind"),
            Some(BundleKind::TrivialSum) => Ok("i-1"),
            Some(BundleKind::LineSum { order }) if order > 1 => Ok("i-2"),
            Some(BundleKind::LineSum { .. }) => bad("a line-sum bundle needs order m > 1"),
            Some(BundleKind::LineSumInfinite) => Ok("i-3"),
            Some(BundleKind::Indecomposable) if d.p == 0 => Ok("i-4"),
            Some(BundleKind::Indecomposable) => Ok("i-5"),
        },
        -1 => {
            if d.bundle.is_some() {
                return bad("e = -1 carries no bundle kind");
            }
            match (d.p, d.base) {
                (2, Some(BaseKind::Supersingular)) => Ok("ii-2"),
                (2, Some(BaseKind::Ordinary)) => Ok("ii-3"),
                (2, None) => bad("p = 2 needs the base curve to be ordinary or supersingular"),
                _ => Ok("ii-1"),
            }
        }
        _ => bad("e must be 0 or -1"),
    }
}

/// The fiber-table row of a surface, with `m` and `p` filled in.
pub fn fiber_table(d: &SurfaceDescriptor) -> Result<FiberRow, FmError> {
    let label = fiber_row_label(d)?;
    let mut row = fiber_template(label).expect("known label");
    let m = match d.bundle {
        Some(BundleKind::LineSum { order }) => order,
        _ => 0,
    };
    let p = d.p as u64;
    let resolve = |q: Quantity| match q {
        Quantity::M => Quantity::Lit(m),
        Quantity::P => Quantity::Lit(p),
        Quantity::PMinus2 => Quantity::Lit(p - 2),
        lit => lit,
    };
    for entry in &mut row.entries {
        entry.multiplicity = resolve(entry.multiplicity);
        entry.exponent = entry.exponent.map(resolve);
    }
    Ok(row)
}

/// Least degree of a multisection of the elliptic fibration.
pub fn lambda_multisection(d: &SurfaceDescriptor) -> Result<u64, FmError> {
    let label = fiber_row_label(d)?;
    match label {
        "i-1" => Ok(1),
        "i-2" => match d.bundle {
            Some(BundleKind::LineSum { order }) => Ok(order),
            _ => unreachable!(),
        },
        "i-3" | "i-4" => Err(FmError::NoEllipticFibration(label)),
        "i-5" => Ok(d.p as u64),
        _ => Ok(2),
    }
}

/// Whether the surface can have a non-isomorphic Fourier–Mukai partner at
/// all: only `O_E + L` with `ord L >= 5` qualifies.
pub fn nontriviality_gate(d: &SurfaceDescriptor) -> bool {
    d.e == 0 && matches!(d.bundle, Some(BundleKind::LineSum { order }) if order >= 5)
}
