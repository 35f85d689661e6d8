//! Width `w_k(E) = length ( (pi_* E)^vv / pi_* E )` via truncated module
//! presentations over the cone ring.
//!
//! The section module `M = H^0(ell_D, E)` embeds into `K^2` (`K` the
//! fraction field of the cone ring `R = k_0`), with the `R`-action given by
//! multiplication in the monomial model.  Working with that embedding:
//!
//! * `M` is solved exactly, degree by degree, from the chart-holomorphy
//!   constraints on section coefficients;
//! * minimal generators are picked greedily in `u`-degree order, quotienting
//!   each filtered piece by the one-step multiples of the previous piece;
//! * the dual `Hom_R(M, R)` is the colon module
//!   `{ w in K^2 : w . g in R for every generator g }`, an exact finite
//!   linear condition once generators are known — a hom is stored by its
//!   values `w . g_i` on the generators;
//! * the double dual is the colon of the dual generators, and the width is
//!   the codimension of `M` inside it, computed at truncation `D` and
//!   accepted once two consecutive truncations agree.
//!
//! Relations (syzygies) are computed as nullspaces of the evaluation maps,
//! degree by degree; they document the presentations and feed the dual-side
//! consistency checks, but the colon construction of the dual does not need
//! them to be exhaustive.

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};
use serde::Serialize;

use crate::bundle::{finite_neighborhood_order, BundleSpec};
use crate::error::{Error, Result};
use crate::linalg::{nullspace_of_rows, Rat, SparseRow};
use crate::surface::{ConeRingElement, LaurentPoly2};

// ---------------------------------------------------------------------
// Sparse vectors keyed by (u-degree, z-exponent, component)
// ---------------------------------------------------------------------

/// Coordinate of a Laurent-vector entry: `(r, s, component)`.  The ordering
/// is by `u`-degree first, so the maximal key of a vector determines its
/// `u`-degree.
pub(crate) type Key = (i64, i64, u8);

/// Sparse vector over [`Key`]s: sorted ascending, no zeros.
pub(crate) type KVec = Vec<(Key, Rat)>;

fn kvec_add_scaled(dst: &KVec, src: &KVec, c: &Rat) -> KVec {
    add_scaled_generic(dst, src, c)
}

fn kvec_scale(v: &mut KVec, c: &Rat) {
    for (_, x) in v.iter_mut() {
        *x *= c;
    }
}

/// Multiply by the ring monomial `z^a u^e` (component preserved).
fn kvec_mul_monomial(v: &KVec, a: i64, e: i64) -> KVec {
    v.iter()
        .map(|&((r, s, c), ref x)| ((r + e, s + a, c), x.clone()))
        .collect()
}

/// Rescale to a primitive integer vector (clear denominators, divide by the
/// content).  Exact elimination inflates coefficients; spans and module
/// membership are insensitive to the rescaling, and small entries keep the
/// downstream colon systems cheap.
fn kvec_primitive(v: &mut KVec) {
    use num::bigint::BigInt;
    use num::Integer;
    if v.is_empty() {
        return;
    }
    let mut denom_lcm = BigInt::from(1);
    for (_, x) in v.iter() {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let mut numer_gcd = BigInt::from(0);
    for (_, x) in v.iter() {
        numer_gcd = numer_gcd.gcd(&(x.numer() * &denom_lcm / x.denom()));
    }
    if numer_gcd.is_zero() {
        return;
    }
    let factor = Rat::new(denom_lcm, numer_gcd);
    for (_, x) in v.iter_mut() {
        *x *= &factor;
    }
}

fn add_scaled_generic<K: Ord + Copy>(
    dst: &[(K, Rat)],
    src: &[(K, Rat)],
    c: &Rat,
) -> Vec<(K, Rat)> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        match (dst.get(i), src.get(j)) {
            (Some((ki, vi)), Some((kj, vj))) if ki == kj => {
                let v = vi + &(c * vj);
                if !v.is_zero() {
                    out.push((*ki, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ki, vi)), Some((kj, _))) if ki < kj => {
                out.push((*ki, vi.clone()));
                i += 1;
            }
            (Some(_), Some((kj, vj))) => {
                out.push((*kj, c * vj));
                j += 1;
            }
            (Some((ki, vi)), None) => {
                out.push((*ki, vi.clone()));
                i += 1;
            }
            (None, Some((kj, vj))) => {
                out.push((*kj, c * vj));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Echelon span of [`KVec`]s, pivoting on the *maximal* key, so membership
/// of the filtered pieces `{ max u-degree <= e }` is read off the pivots.
#[derive(Clone, Debug, Default)]
pub(crate) struct KSpan {
    rows: BTreeMap<Key, KVec>,
}

impl KSpan {
    fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, mut v: KVec) -> KVec {
        loop {
            let Some((lead, coeff)) = v.last().cloned() else {
                return v;
            };
            match self.rows.get(&lead) {
                Some(pivot) => {
                    let c = -coeff;
                    v = kvec_add_scaled(&v, pivot, &c);
                }
                None => return v,
            }
        }
    }

    fn insert(&mut self, v: KVec) -> bool {
        let mut v = self.reduce(v);
        let Some((lead, coeff)) = v.last().cloned() else {
            return false;
        };
        let inv = coeff.recip();
        kvec_scale(&mut v, &inv);
        self.rows.insert(lead, v);
        true
    }

    fn contains(&self, v: &KVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    fn basis(&self) -> impl Iterator<Item = &KVec> {
        self.rows.values()
    }
}

// ---------------------------------------------------------------------
// Sheaf models
// ---------------------------------------------------------------------

/// What the section solver works on: a line bundle `O(d)` with transition
/// `(z^-d)`, or a rank-2 extension `[[z^j, p], [0, z^-j]]`.
#[derive(Clone, Debug)]
pub enum SheafModel {
    LineBundle { k: i64, d: i64 },
    Extension(BundleSpec),
}

impl SheafModel {
    pub fn line_bundle(k: i64, d: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter(format!("k must be >= 1, got {k}")));
        }
        Ok(SheafModel::LineBundle { k, d })
    }

    pub fn extension(b: &BundleSpec) -> Self {
        SheafModel::Extension(b.clone())
    }

    pub fn k(&self) -> i64 {
        match self {
            SheafModel::LineBundle { k, .. } => *k,
            SheafModel::Extension(b) => b.k(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            SheafModel::LineBundle { .. } => 1,
            SheafModel::Extension(_) => 2,
        }
    }

    /// `z`-power applied to component `c` on the way to the `V`-frame.
    fn diagonal_shift(&self, c: u8) -> i64 {
        match self {
            SheafModel::LineBundle { d, .. } => -d,
            SheafModel::Extension(b) => {
                if c == 0 {
                    b.j()
                } else {
                    -b.j()
                }
            }
        }
    }

    fn offdiagonal(&self) -> Option<&LaurentPoly2> {
        match self {
            SheafModel::Extension(b) if !b.p().is_zero() => Some(b.p()),
            _ => None,
        }
    }

    /// Default truncation order `D = N + k + 2`.
    pub fn default_truncation(&self) -> i64 {
        let (k, j) = match self {
            SheafModel::LineBundle { k, d } => (*k, d.abs()),
            SheafModel::Extension(b) => (b.k(), b.j()),
        };
        finite_neighborhood_order(k, j) + k + 2
    }

    fn splitting_degree(&self) -> i64 {
        match self {
            SheafModel::LineBundle { d, .. } => d.abs(),
            SheafModel::Extension(b) => b.j(),
        }
    }
}

// ---------------------------------------------------------------------
// Section solver
// ---------------------------------------------------------------------

/// Upper `z`-exponent of a possibly nonzero coefficient of component `c` at
/// `u`-degree `r` in a section (the diagonal `V`-constraint for the last
/// component, the cancellation reach against `p` for the first).
fn section_z_hi(model: &SheafModel, c: u8, r: i64) -> i64 {
    let k = model.k();
    let shift = model.diagonal_shift(c);
    let diag = k * r - shift;
    match (c, model.offdiagonal()) {
        (0, Some(p)) => {
            // z^shift f_0 at u-degree r may reach as high as p f_1 does:
            // a term z^sp u^rp of p against f_1 coefficients of z-degree
            // up to k (r - rp) + j, minus the shift j again.
            let reach = p
                .terms()
                .map(|(m, _)| k * r + (m.s - k * m.r))
                .max()
                .unwrap_or(i64::MIN);
            diag.max(reach)
        }
        _ => diag,
    }
}

/// Exact basis of the space of sections with `u`-degrees in `[umin, umax]`.
/// The holomorphy constraints are imposed at every degree, so the result is
/// `Gamma(Z_k, E)` (or, for `umin < 0`, `Gamma(Z_k - ell, E)`) intersected
/// with the degree window; the inverse limit over the infinitesimal
/// neighbourhoods stabilises to exactly this module.
pub(crate) fn section_solutions(model: &SheafModel, umin: i64, umax: i64) -> Vec<KVec> {
    let k = model.k();
    let rank = model.rank() as u8;
    let mut keys: Vec<Key> = Vec::new();
    for r in umin..=umax {
        for c in 0..rank {
            for s in 0..=section_z_hi(model, c, r) {
                keys.push((r, s, c));
            }
        }
    }
    keys.sort();
    let index: HashMap<Key, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();

    // Constraint rows: every monomial z^s' u^r' with s' > k r' of the first
    // component of the V-frame image must vanish.  The second component's
    // condition is monomialwise and already encoded in the window.
    let mut rows: Vec<SparseRow> = Vec::new();
    if let Some(p) = model.offdiagonal() {
        let shift = model.diagonal_shift(0);
        let max_pu = p.max_u_degree().unwrap_or(0);
        for rp in umin..=(umax + max_pu) {
            let mut hi = shift + section_z_hi(model, 0, rp.min(umax));
            for (m, _) in p.terms() {
                let r1 = rp - m.r;
                if (umin..=umax).contains(&r1) {
                    hi = hi.max(m.s + section_z_hi(model, 1, r1));
                }
            }
            for sp in (k * rp + 1)..=hi {
                let mut row: SparseRow = Vec::new();
                if let Some(&col) = index.get(&(rp, sp - shift, 0)) {
                    row.push((col, Rat::one()));
                }
                for (m, coeff) in p.terms() {
                    if let Some(&col) = index.get(&(rp - m.r, sp - m.s, 1)) {
                        row.push((col, coeff.clone()));
                    }
                }
                if !row.is_empty() {
                    row.sort_by_key(|(c, _)| *c);
                    rows.push(row);
                }
            }
        }
    }

    let solutions = nullspace_of_rows(rows, keys.len());
    let mut span = KSpan::new();
    for sol in solutions {
        let kv: KVec = sol.into_iter().map(|(i, v)| (keys[i], v)).collect();
        span.insert(kv);
    }
    span.basis().cloned().collect()
}

// ---------------------------------------------------------------------
// Presentations
// ---------------------------------------------------------------------

fn kvec_component(v: &KVec, c: u8) -> LaurentPoly2 {
    let mut p = LaurentPoly2::zero();
    for &((r, s, cc), ref x) in v {
        if cc == c {
            p.add_term(x.clone(), s, r);
        }
    }
    p
}

fn max_u_degree(v: &KVec) -> i64 {
    v.last().map(|&((r, _, _), _)| r).unwrap_or(i64::MIN)
}

/// A section expressed on the `U`-chart; `second` is zero for rank-1 models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionVec {
    pub first: LaurentPoly2,
    pub second: LaurentPoly2,
}

impl SectionVec {
    fn from_kvec(v: &KVec) -> Self {
        SectionVec {
            first: kvec_component(v, 0),
            second: kvec_component(v, 1),
        }
    }
}

/// Exact graded basis of the section module up to a truncation degree:
/// entry `d` holds the basis vectors whose maximal `u`-degree is exactly
/// `d`, so the union over degrees `<= e` is a basis of the filtered piece.
#[derive(Clone, Debug, Serialize)]
pub struct SectionBasis {
    pub truncation: i64,
    pub per_degree: Vec<(i64, Vec<SectionVec>)>,
}

impl SectionBasis {
    pub fn dim_up_to(&self, degree: i64) -> usize {
        self.per_degree
            .iter()
            .filter(|(d, _)| *d <= degree)
            .map(|(_, vs)| vs.len())
            .sum()
    }
}

/// Basis of `H^0(ell_D, E)`, organised by `u`-degree.
pub fn section_basis(model: &SheafModel, truncation: i64) -> SectionBasis {
    let basis = section_solutions(model, 0, truncation);
    let mut per_degree: BTreeMap<i64, Vec<SectionVec>> = BTreeMap::new();
    for v in &basis {
        per_degree
            .entry(max_u_degree(v))
            .or_default()
            .push(SectionVec::from_kvec(v));
    }
    SectionBasis {
        truncation,
        per_degree: per_degree.into_iter().collect(),
    }
}

/// A minimal generator of the section module (or of a dual module).
#[derive(Clone, Debug, Serialize)]
pub struct Generator {
    pub degree: i64,
    pub section: SectionVec,
}

/// A relation among generators: coefficient `i` multiplies generator `i`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub coefficients: Vec<ConeRingElement>,
}

/// Truncated presentation of the section module: minimal generators in
/// degree order together with a generating set of syzygies up to the
/// truncation degree.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    pub truncation: i64,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    pub(crate) generator_vectors: Vec<KVec>,
}

/// Greedy minimal generators of the module spanned by `basis` (echelonised
/// by maximal key): at each `u`-degree, a basis of the filtered piece modulo
/// the previous piece and its one-step `x_a`-multiples.  Ties within a
/// degree are broken by ascending leading `(s, component)`.
fn minimal_generator_vectors(basis: &[KVec], k: i64) -> Vec<KVec> {
    let mut by_degree: BTreeMap<i64, Vec<&KVec>> = BTreeMap::new();
    for v in basis {
        by_degree.entry(max_u_degree(v)).or_default().push(v);
    }
    let mut covered = KSpan::new();
    let mut pending: Vec<&KVec> = Vec::new();
    let mut generators = Vec::new();
    for (_e, vecs) in &by_degree {
        for v in pending.drain(..) {
            covered.insert(v.clone());
            for a in 0..=k {
                covered.insert(kvec_mul_monomial(v, a, 1));
            }
        }
        let mut candidates: Vec<&KVec> = vecs.clone();
        candidates.sort_by_key(|v| {
            let (r, s, c) = v.last().unwrap().0;
            (r, s, c)
        });
        for v in candidates {
            if covered.insert(v.clone()) {
                generators.push(v.clone());
            }
        }
        pending.extend(vecs.iter().copied());
    }
    generators
}

/// Generating syzygies of the given module elements, in weighted degrees up
/// to `truncation`; coefficient `i` of each syzygy lies in the cone ring.
fn syzygy_generators(gens: &[KVec], k: i64, truncation: i64) -> Vec<Vec<LaurentPoly2>> {
    let degrees: Vec<i64> = gens.iter().map(max_u_degree).collect();
    let mut unknowns: Vec<(usize, i64, i64)> = Vec::new(); // (gen, a, e)
    for (i, d) in degrees.iter().enumerate() {
        let top = truncation - d;
        for e in 0..=top.max(-1) {
            for a in 0..=k * e {
                unknowns.push((i, a, e));
            }
        }
    }
    if unknowns.is_empty() {
        return Vec::new();
    }
    let mut rows_by_key: BTreeMap<Key, SparseRow> = BTreeMap::new();
    for (col, &(i, a, e)) in unknowns.iter().enumerate() {
        for ((r, s, c), x) in kvec_mul_monomial(&gens[i], a, e) {
            rows_by_key.entry((r, s, c)).or_default().push((col, x));
        }
    }
    let rows: Vec<SparseRow> = rows_by_key
        .into_values()
        .map(|mut row| {
            row.sort_by_key(|(c, _)| *c);
            row
        })
        .collect();
    let raw = nullspace_of_rows(rows, unknowns.len());

    // Syzygy coordinates ordered by weighted degree e + deg(g_i), so the
    // same greedy minimal-generator pass applies with the diagonal action
    // (e, a) -> (e + 1, a + b).
    type SKey = (i64, usize, i64, i64); // (weighted degree, gen, e, a)
    type SVec = Vec<(SKey, Rat)>;
    let to_skey = |col: usize| -> SKey {
        let (i, a, e) = unknowns[col];
        (e + degrees[i], i, e, a)
    };

    struct SSpan {
        rows: BTreeMap<SKey, SVec>,
    }
    impl SSpan {
        fn insert(&mut self, v: SVec) -> bool {
            let mut v = self.reduce(v);
            let Some((lead, coeff)) = v.last().cloned() else {
                return false;
            };
            let inv = coeff.recip();
            for (_, x) in v.iter_mut() {
                *x *= &inv;
            }
            self.rows.insert(lead, v);
            true
        }
        fn reduce(&self, mut v: SVec) -> SVec {
            loop {
                let Some((lead, coeff)) = v.last().cloned() else {
                    return v;
                };
                let Some(pivot) = self.rows.get(&lead) else {
                    return v;
                };
                let c = -coeff;
                v = add_scaled_generic(&v, pivot, &c);
            }
        }
    }

    let mut echelon = SSpan { rows: BTreeMap::new() };
    for sol in &raw {
        let mut v: SVec = sol.iter().map(|(col, x)| (to_skey(*col), x.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        echelon.insert(v);
    }
    let all: Vec<SVec> = echelon.rows.values().cloned().collect();

    let mut by_degree: BTreeMap<i64, Vec<&SVec>> = BTreeMap::new();
    for v in &all {
        by_degree.entry(v.last().unwrap().0 .0).or_default().push(v);
    }
    let mut covered = SSpan { rows: BTreeMap::new() };
    let mut pending: Vec<&SVec> = Vec::new();
    let mut minimal: Vec<SVec> = Vec::new();
    for (_e, vecs) in &by_degree {
        for v in pending.drain(..) {
            covered.insert(v.clone());
            for b in 0..=k {
                let shifted: SVec = v
                    .iter()
                    .map(|&((w, i, e, a), ref x)| ((w + 1, i, e + 1, a + b), x.clone()))
                    .collect();
                covered.insert(shifted);
            }
        }
        for v in vecs {
            if covered.insert((*v).clone()) {
                minimal.push((*v).clone());
            }
        }
        pending.extend(vecs.iter().copied());
    }

    minimal
        .into_iter()
        .map(|v| {
            let mut coeffs = vec![LaurentPoly2::zero(); gens.len()];
            for ((_w, i, e, a), x) in v {
                coeffs[i].add_term(x, a, e);
            }
            coeffs
        })
        .collect()
}

/// Minimal generators and generating relations of `H^0(ell_D, E)`.
pub fn module_presentation(model: &SheafModel, truncation: i64) -> Result<ModulePresentation> {
    let basis = section_solutions(model, 0, truncation);
    let gen_vecs = minimal_generator_vectors(&basis, model.k());
    let relations = cone_relations(model.k(), &gen_vecs, truncation)?;
    let generators = gen_vecs
        .iter()
        .map(|v| Generator {
            degree: max_u_degree(v),
            section: SectionVec::from_kvec(v),
        })
        .collect();
    Ok(ModulePresentation {
        truncation,
        generators,
        relations,
        generator_vectors: gen_vecs,
    })
}

fn cone_relations(k: i64, gens: &[KVec], truncation: i64) -> Result<Vec<Relation>> {
    syzygy_generators(gens, k, truncation)
        .into_iter()
        .map(|coeffs| {
            let coefficients = coeffs
                .into_iter()
                .map(|p| ConeRingElement::new(k, p))
                .collect::<Result<Vec<_>>>()?;
            Ok(Relation { coefficients })
        })
        .collect()
}

// ---------------------------------------------------------------------
// Duals via colon modules
// ---------------------------------------------------------------------

struct DualWindow {
    umin: i64,
    umax: i64,
    zlo: i64,
    /// Allowance above the cone bound `k * max(r, 0)`.
    zslack: i64,
}

/// Exact solutions of `{ w : w . g in R for all g in targets }` within the
/// window.  The pairing is `w . v = sum_c w_c v_c`; every product monomial
/// outside the cone-ring support contributes one linear constraint.
fn colon_solutions(targets: &[KVec], k: i64, rank: u8, window: &DualWindow) -> Vec<KVec> {
    let mut keys: Vec<Key> = Vec::new();
    for r in window.umin..=window.umax {
        let zhi = k * r.max(0) + window.zslack;
        for c in 0..rank {
            for s in window.zlo..=zhi {
                keys.push((r, s, c));
            }
        }
    }
    keys.sort();

    let in_cone = |r: i64, s: i64| r >= 0 && s >= 0 && s <= k * r;
    let mut rows_by_key: HashMap<(usize, i64, i64), SparseRow> = HashMap::new();
    for (col, &(r, s, c)) in keys.iter().enumerate() {
        for (t, g) in targets.iter().enumerate() {
            for &((rg, sg, cg), ref x) in g {
                if cg != c {
                    continue;
                }
                let (rp, sp) = (r + rg, s + sg);
                if !in_cone(rp, sp) {
                    rows_by_key
                        .entry((t, rp, sp))
                        .or_default()
                        .push((col, x.clone()));
                }
            }
        }
    }
    let rows: Vec<SparseRow> = rows_by_key
        .into_values()
        .map(|mut row| {
            row.sort_by_key(|(c, _)| *c);
            row
        })
        .collect();
    let solutions = nullspace_of_rows(rows, keys.len());
    let mut span = KSpan::new();
    for sol in solutions {
        let kv: KVec = sol.into_iter().map(|(i, v)| (keys[i], v)).collect();
        span.insert(kv);
    }
    span.basis().cloned().collect()
}

/// A generator of the dual module, stored by its values on the source
/// generators (each value a cone-ring element).
#[derive(Clone, Debug)]
pub struct DualGenerator {
    pub degree: i64,
    pub images: Vec<ConeRingElement>,
}

/// Truncated presentation of `Hom_R(M, R)`.
#[derive(Clone, Debug)]
pub struct DualPresentation {
    pub truncation: i64,
    pub generators: Vec<DualGenerator>,
    pub relations: Vec<Relation>,
    pub(crate) generator_vectors: Vec<KVec>,
}

fn kvec_dot(w: &KVec, v: &KVec) -> LaurentPoly2 {
    let mut out = LaurentPoly2::zero();
    for &((rw, sw, cw), ref x) in w {
        for &((rv, sv, cv), ref y) in v {
            if cw == cv {
                out.add_term(x * y, sw + sv, rw + rv);
            }
        }
    }
    out
}

fn dual_window_for(model: &SheafModel, gens: &[KVec], round: i64) -> DualWindow {
    let k = model.k();
    let j = model.splitting_degree();
    let d_max = gens.iter().map(|g| max_u_degree(g)).max().unwrap_or(0);
    let n2 = j.div_euclid(k);
    let max_gen_s = gens
        .iter()
        .flat_map(|g| g.iter().map(|&((_, s, _), _)| s.abs()))
        .max()
        .unwrap_or(0);
    // Hom elements pair every generator into the cone ring: poles no deeper
    // than the top generator degree, generation no higher than roughly
    // floor(j/k).  The stabilisation loop widens everything per round.
    DualWindow {
        umin: -(d_max + 2 + round),
        umax: n2 + 2 + round,
        zlo: -(max_gen_s + k + 4 + 2 * round),
        zslack: max_gen_s + j + k + 4 + 2 * round,
    }
}

fn dual_generator_vectors(model: &SheafModel, gens: &[KVec], round: i64) -> Vec<KVec> {
    let window = dual_window_for(model, gens, round);
    let sols = colon_solutions(gens, model.k(), model.rank() as u8, &window);
    minimal_generator_vectors(&sols, model.k())
}

/// Hom module of the presentation: generators determined by their images
/// `g_i -> w . g_i`, plus relations among the hom generators.
pub fn dual_module(model: &SheafModel, mp: &ModulePresentation) -> Result<DualPresentation> {
    let dual_vecs = dual_generator_vectors(model, &mp.generator_vectors, 0);
    let relations = cone_relations(model.k(), &dual_vecs, mp.truncation)?;
    let generators = dual_vecs
        .iter()
        .map(|w| {
            let images = mp
                .generator_vectors
                .iter()
                .map(|g| ConeRingElement::new(model.k(), kvec_dot(w, g)))
                .collect::<Result<Vec<_>>>()?;
            Ok(DualGenerator {
                degree: max_u_degree(w),
                images,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualPresentation {
        truncation: mp.truncation,
        generators,
        relations,
        generator_vectors: dual_vecs,
    })
}

// ---------------------------------------------------------------------
// Width
// ---------------------------------------------------------------------

/// Diagnostics of one width evaluation at a fixed truncation.
#[derive(Clone, Debug)]
pub struct WidthComputation {
    pub truncation: i64,
    pub width: i64,
    pub module_dim: usize,
    pub double_dual_dim: usize,
    pub generator_degrees: Vec<i64>,
    pub dual_generator_degrees: Vec<i64>,
}

fn width_at(model: &SheafModel, truncation: i64, round: i64) -> Result<WidthComputation> {
    let basis = section_solutions(model, 0, truncation);
    let gens = minimal_generator_vectors(&basis, model.k());
    if gens.is_empty() {
        return Ok(WidthComputation {
            truncation,
            width: 0,
            module_dim: 0,
            double_dual_dim: 0,
            generator_degrees: vec![],
            dual_generator_degrees: vec![],
        });
    }
    let duals = dual_generator_vectors(model, &gens, round);

    let k = model.k();
    let j = model.splitting_degree();
    let max_dual_s = duals
        .iter()
        .flat_map(|g| g.iter().map(|&((_, s, _), _)| s.abs()))
        .max()
        .unwrap_or(0);
    let window = DualWindow {
        umin: -(j.div_euclid(k) + 2 + round),
        umax: truncation,
        zlo: -(max_dual_s + k + 4 + 2 * round),
        zslack: max_dual_s + j + k + 4 + 2 * round,
    };
    let ddual = colon_solutions(&duals, k, model.rank() as u8, &window);

    // The evaluation rho: M -> M^vv is the inclusion of these embedded
    // spaces; injectivity holds by construction, and M must land inside the
    // computed double dual.
    let mut ddual_span = KSpan::new();
    for v in &ddual {
        ddual_span.insert(v.clone());
    }
    for v in &basis {
        if !ddual_span.contains(v) {
            return Err(Error::Internal(
                "a section escaped the double dual; enumeration window too small".into(),
            ));
        }
    }

    let width = ddual.len() as i64 - basis.len() as i64;
    if width < 0 {
        return Err(Error::Internal(
            "double dual smaller than the module; enumeration window too small".into(),
        ));
    }
    Ok(WidthComputation {
        truncation,
        width,
        module_dim: basis.len(),
        double_dual_dim: ddual.len(),
        generator_degrees: gens.iter().map(max_u_degree).collect(),
        dual_generator_degrees: duals.iter().map(max_u_degree).collect(),
    })
}

/// Width at one truncation order (no stabilisation loop).
pub fn width_at_truncation(model: &SheafModel, truncation: i64) -> Result<i64> {
    width_at(model, truncation, 0).map(|w| w.width)
}

/// Full diagnostics at one truncation order.
pub fn width_computation(model: &SheafModel, truncation: i64) -> Result<WidthComputation> {
    width_at(model, truncation, 0)
}

/// `dim coker(rho: M -> M^vv)`: evaluated at the default truncation and
/// again one order higher, accepted when two consecutive values agree.
pub fn width_model(model: &SheafModel) -> Result<i64> {
    let d0 = model.default_truncation();
    let mut previous = width_at(model, d0, 0)?.width;
    for round in 1..=6 {
        let current = width_at(model, d0 + round, round)?.width;
        if current == previous {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Stabilisation {
        context: "width truncation loop",
        rounds: 6,
    })
}

/// `w_k(E)` for a rank-2 bundle `(k, j, p)`.
pub fn width(b: &BundleSpec) -> Result<i64> {
    width_model(&SheafModel::extension(b))
}

/// Closed form for line bundles: `w_k(O(j)) = (j+1) n2 - k n2 (n2+1)/2`
/// with `n2 = floor(j/k)` for `j >= 0`, and `w_k(O(-j)) = 0`.
pub fn width_line_bundle(k: i64, d: i64) -> i64 {
    assert!(k >= 1);
    if d <= 0 {
        return 0;
    }
    let n2 = d.div_euclid(k);
    (d + 1) * n2 - k * n2 * (n2 + 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle(k: i64, j: i64, p: &str) -> BundleSpec {
        BundleSpec::new(k, j, p.parse().unwrap()).unwrap()
    }

    #[test]
    fn sections_of_o_minus_3_on_z2() {
        let model = SheafModel::line_bundle(2, -3).unwrap();
        let sb = section_basis(&model, 4);
        assert_eq!(sb.dim_up_to(1), 0);
        let deg2: Vec<_> = sb
            .per_degree
            .iter()
            .filter(|(d, _)| *d == 2)
            .flat_map(|(_, vs)| vs.iter())
            .collect();
        assert_eq!(deg2.len(), 2);
    }

    #[test]
    fn sections_of_trivial_bundle() {
        let b = BundleSpec::new(2, 0, LaurentPoly2::zero()).unwrap();
        let model = SheafModel::extension(&b);
        let sb = section_basis(&model, 2);
        assert_eq!(sb.dim_up_to(0), 2);
    }

    #[test]
    fn sections_of_split_j3_on_z2_at_degree_zero() {
        let b = bundle(2, 3, "0");
        let sb = section_basis(&SheafModel::extension(&b), 3);
        // Degree 0: the O(3) summand contributes 1, z, z^2, z^3.
        assert_eq!(sb.dim_up_to(0), 4);
    }

    #[test]
    fn generators_of_o_minus_3_on_z2() {
        let model = SheafModel::line_bundle(2, -3).unwrap();
        let mp = module_presentation(&model, model.default_truncation()).unwrap();
        assert_eq!(mp.generators.len(), 2);
        assert!(mp.generators.iter().all(|g| g.degree == 2));
        let shown: Vec<String> = mp
            .generators
            .iter()
            .map(|g| g.section.first.to_string())
            .collect();
        assert_eq!(shown, vec!["u^2", "z*u^2"]);
    }

    #[test]
    fn generators_of_o_minus_j_follow_remainder_pattern() {
        // O(-j) with -j = -q k + nu: nu + 1 generators z^i u^q.
        for (k, j) in [(2, 4), (3, 7), (2, 5)] {
            let model = SheafModel::line_bundle(k, -j).unwrap();
            let mp = module_presentation(&model, model.default_truncation()).unwrap();
            let q = (j + k - 1).div_euclid(k);
            let nu = q * k - j;
            assert_eq!(
                mp.generators.len() as i64,
                nu + 1,
                "k={k} j={j} q={q} nu={nu}"
            );
            assert!(mp.generators.iter().all(|g| g.degree == q));
        }
    }

    #[test]
    fn relations_of_o_minus_3_on_z2() {
        let model = SheafModel::line_bundle(2, -3).unwrap();
        let mp = module_presentation(&model, model.default_truncation()).unwrap();
        assert_eq!(mp.relations.len(), 2);
        let polys: Vec<(String, String)> = mp
            .relations
            .iter()
            .map(|rel| {
                (
                    rel.coefficients[0].display_with_generators(),
                    rel.coefficients[1].display_with_generators(),
                )
            })
            .collect();
        let has = |a: &str, b: &str| {
            polys.iter().any(|(x, y)| {
                (x == a && y == &format!("-1*{b}")) || (x == &format!("-1*{a}") && y == b)
            })
        };
        // beta0 y - beta1 x and beta0 w - beta1 y, up to overall sign.
        assert!(has("y", "x"), "missing beta0 y - beta1 x in {polys:?}");
        assert!(has("w", "y"), "missing beta0 w - beta1 y in {polys:?}");
    }

    #[test]
    fn free_module_has_no_relations() {
        let b = BundleSpec::new(2, 0, LaurentPoly2::zero()).unwrap();
        let model = SheafModel::extension(&b);
        let mp = module_presentation(&model, model.default_truncation()).unwrap();
        assert_eq!(mp.generators.len(), 2);
        assert!(mp.relations.is_empty());
    }

    #[test]
    fn dual_of_o_minus_3_is_isomorphic() {
        let model = SheafModel::line_bundle(2, -3).unwrap();
        let mp = module_presentation(&model, model.default_truncation()).unwrap();
        let dual = dual_module(&model, &mp).unwrap();
        assert_eq!(dual.generators.len(), 2);
        assert_eq!(dual.relations.len(), 2);
        let images: Vec<Vec<String>> = dual
            .generators
            .iter()
            .map(|g| {
                g.images
                    .iter()
                    .map(|c| c.display_with_generators())
                    .collect()
            })
            .collect();
        // beta0* : (x, y) and beta1* : (y, w).
        assert!(images.contains(&vec!["x".to_string(), "y".to_string()]), "{images:?}");
        assert!(images.contains(&vec!["y".to_string(), "w".to_string()]), "{images:?}");
    }

    #[test]
    fn dual_of_o3_on_z2_has_two_generators() {
        let model = SheafModel::line_bundle(2, 3).unwrap();
        let mp = module_presentation(&model, model.default_truncation()).unwrap();
        let dual = dual_module(&model, &mp).unwrap();
        assert_eq!(dual.generators.len(), 2);
    }

    #[test]
    fn free_rank_one_dual_is_free() {
        let model = SheafModel::line_bundle(3, 0).unwrap();
        let mp = module_presentation(&model, model.default_truncation()).unwrap();
        let dual = dual_module(&model, &mp).unwrap();
        assert_eq!(dual.generators.len(), 1);
        assert!(dual.relations.is_empty());
    }

    #[test]
    fn width_line_bundle_closed_form() {
        assert_eq!(width_line_bundle(2, 3), 2);
        assert_eq!(width_line_bundle(1, 3), 6);
        assert_eq!(width_line_bundle(5, -7), 0);
    }

    #[test]
    fn width_of_line_bundles_via_engine() {
        for (k, d, expected) in [(2, -3, 0), (2, 3, 2), (1, 3, 6), (3, -5, 0), (3, 4, 2)] {
            let model = SheafModel::line_bundle(k, d).unwrap();
            assert_eq!(width_model(&model).unwrap(), expected, "k={k} d={d}");
            assert_eq!(width_line_bundle(k, d), expected, "closed form k={k} d={d}");
        }
    }

    #[test]
    fn widths_on_z2_j3() {
        for (p, expected) in [("z*u", 0), ("u", 1), ("z^2*u", 1), ("z^2*u^2", 2), ("0", 2)] {
            assert_eq!(width(&bundle(2, 3, p)).unwrap(), expected, "p = {p}");
        }
    }

    #[test]
    fn width_split_additivity_small() {
        for k in 1..=3 {
            for j in 0..=4 {
                let b = BundleSpec::new(k, j, LaurentPoly2::zero()).unwrap();
                let expected = width_line_bundle(k, j) + width_line_bundle(k, -j);
                assert_eq!(width(&b).unwrap(), expected, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn width_truncation_stability() {
        let b = bundle(2, 3, "u");
        let model = SheafModel::extension(&b);
        let d = model.default_truncation();
        assert_eq!(
            width_at_truncation(&model, d).unwrap(),
            width_at_truncation(&model, d + 1).unwrap()
        );
    }

    #[test]
    fn charge_seven_width() {
        let b = bundle(3, 6, "z^-1*u + z^4*u^2");
        assert_eq!(width(&b).unwrap(), 2);
    }
}
