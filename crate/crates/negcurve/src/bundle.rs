//! Rank-2 bundles on `Z_k` with `c_1 = 0` as canonical extension data.
//!
//! Such a bundle of splitting type `j` is an extension of `O(j)` by `O(-j)`
//! with transition matrix `[[z^j, p], [0, z^-j]]` in canonical coordinates.
//! The extension class `p` is kept in the canonical window
//!
//! ```text
//!     p(z, u) = sum over 1 <= r <= N, k r - j + 1 <= s <= j - 1
//!               of p_rs * z^s * u^r,      N = floor((2 j - 2) / k).
//! ```
//!
//! Inputs outside the window are rejected, not reduced; no general algorithm
//! to reduce an arbitrary extension representative to canonical form is in
//! scope.  Note that the window forces `u | p`, so the restriction to the
//! zero section really splits as `O(j) + O(-j)`; the standalone
//! [`splitting_type_on_ell`] exists to detect the drop in splitting type
//! when a `u`-free off-diagonal term is present.

use std::collections::BTreeMap;
use std::str::FromStr;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{nullspace_of_rows, Rat, SparseRow};
use crate::surface::{LaurentPoly2, Monomial2, SurfaceConfig};

/// Order `N = floor((2j - 2)/k)` of the infinitesimal neighbourhood on which
/// height and width of a splitting-type-`j` bundle are already determined
/// (clamped to 0 for `j = 0`, where the formula would go negative).
pub fn finite_neighborhood_order(k: i64, j: i64) -> i64 {
    assert!(k >= 1 && j >= 0);
    if j == 0 {
        0
    } else {
        (2 * j - 2).div_euclid(k)
    }
}

/// The inclusive `s`-range of the canonical window at `u`-degree `r`, or
/// `None` if `r` is not an allowed `u`-degree for `(k, j)`.
pub fn window_s_range(k: i64, j: i64, r: i64) -> Option<(i64, i64)> {
    let n = finite_neighborhood_order(k, j);
    if j == 0 || r < 1 || r > n {
        return None;
    }
    let lo = k * r - j + 1;
    let hi = j - 1;
    (lo <= hi).then_some((lo, hi))
}

/// All monomials of the canonical window for `(k, j)`, ordered by `(r, s)`.
pub fn canonical_window(k: i64, j: i64) -> Vec<Monomial2> {
    let mut out = Vec::new();
    for r in 1..=finite_neighborhood_order(k, j) {
        if let Some((lo, hi)) = window_s_range(k, j, r) {
            for s in lo..=hi {
                out.push(Monomial2::new(s, r));
            }
        }
    }
    out
}

/// A monomial of an extension class that escapes the canonical window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowViolation {
    pub r: i64,
    pub s: i64,
    pub reason: String,
}

impl WindowViolation {
    pub fn describe_all(violations: &[WindowViolation]) -> String {
        violations
            .iter()
            .map(|v| format!("(r={}, s={}): {}", v.r, v.s, v.reason))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Extension class `p` of a splitting-type-`j` bundle: sparse rational
/// coefficients `(r, s) -> p_rs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionClass {
    j: i64,
    poly: LaurentPoly2,
}

impl ExtensionClass {
    /// Wrap a splitting type and polynomial.  Window validation is against a
    /// particular `k`; see [`validate_canonical`].
    pub fn new(j: i64, poly: LaurentPoly2) -> Result<Self> {
        if j < 0 {
            return Err(Error::InvalidParameter(format!(
                "splitting type must be nonnegative, got {j}"
            )));
        }
        Ok(ExtensionClass { j, poly })
    }

    pub fn j(&self) -> i64 {
        self.j
    }

    pub fn poly(&self) -> &LaurentPoly2 {
        &self.poly
    }

    /// Coefficientwise multiplication by a nonzero scalar; the scaled class
    /// represents an isomorphic bundle.
    pub fn scale(&self, lambda: &Rat) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(ExtensionClass {
            j: self.j,
            poly: self.poly.scale(lambda),
        })
    }
}

/// Check every coefficient of `p` against the canonical window of `(k, j)`.
/// An empty list means the class is canonical.
pub fn validate_canonical(k: i64, ext: &ExtensionClass) -> Vec<WindowViolation> {
    let j = ext.j;
    let n = finite_neighborhood_order(k, j);
    let mut violations = Vec::new();
    for (m, _) in ext.poly.terms() {
        match window_s_range(k, j, m.r) {
            None => violations.push(WindowViolation {
                r: m.r,
                s: m.s,
                reason: if m.r < 1 {
                    format!("u-degree {} below 1 (the window requires r >= 1)", m.r)
                } else {
                    format!("u-degree {} exceeds N = {n}", m.r)
                },
            }),
            Some((lo, hi)) => {
                if m.s < lo || m.s > hi {
                    violations.push(WindowViolation {
                        r: m.r,
                        s: m.s,
                        reason: format!("z-exponent outside [{lo}, {hi}]"),
                    });
                }
            }
        }
    }
    violations
}

/// The triple `(k, j, p)` determining a rank-2 bundle with `c_1 = 0` on
/// `Z_k` via its transition matrix `[[z^j, p], [0, z^-j]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSpec {
    surface: SurfaceConfig,
    ext: ExtensionClass,
}

impl BundleSpec {
    /// Validates `k >= 1`, `j >= 0`, and the canonical window.
    pub fn new(k: i64, j: i64, p: LaurentPoly2) -> Result<Self> {
        let surface = SurfaceConfig::new(k)?;
        let ext = ExtensionClass::new(j, p)?;
        let violations = validate_canonical(k, &ext);
        if !violations.is_empty() {
            return Err(Error::Window(violations));
        }
        Ok(BundleSpec { surface, ext })
    }

    pub fn k(&self) -> i64 {
        self.surface.k()
    }

    pub fn j(&self) -> i64 {
        self.ext.j()
    }

    pub fn p(&self) -> &LaurentPoly2 {
        self.ext.poly()
    }

    pub fn ext(&self) -> &ExtensionClass {
        &self.ext
    }

    pub fn surface(&self) -> SurfaceConfig {
        self.surface
    }

    /// `N = floor((2j-2)/k)` for this bundle.
    pub fn neighborhood_order(&self) -> i64 {
        finite_neighborhood_order(self.k(), self.j())
    }

    /// The bundle with extension class `lambda * p` (isomorphic for any
    /// nonzero `lambda`).
    pub fn scaled(&self, lambda: &Rat) -> Result<Self> {
        Ok(BundleSpec {
            surface: self.surface,
            ext: self.ext.scale(lambda)?,
        })
    }
}

/// Transition matrix `[[z^j, p], [0, z^-j]]` as Laurent polynomial entries.
pub fn transition_matrix(b: &BundleSpec) -> [[LaurentPoly2; 2]; 2] {
    let j = b.j();
    [
        [
            LaurentPoly2::monomial(Rat::one(), j, 0),
            b.p().clone(),
        ],
        [
            LaurentPoly2::zero(),
            LaurentPoly2::monomial(Rat::one(), -j, 0),
        ],
    ]
}

/// The embedding `(j, p) -> (j + k, z^k u^2 p)` into the next moduli level.
/// The image class is divisible by `u^2`, i.e. the image bundle splits on
/// the second infinitesimal neighbourhood.  Window membership of the image
/// is automatic; a violation here is an internal error.
pub fn embed_phi(b: &BundleSpec) -> Result<BundleSpec> {
    let k = b.k();
    let image = b.p().mul_monomial(&Rat::one(), k, 2);
    BundleSpec::new(k, b.j() + k, image)
        .map_err(|e| Error::Internal(format!("embedding left the canonical window: {e}")))
}

/// Splitting type of a rank-2 bundle on the projective line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingType {
    /// Nonincreasing degrees; `(a, -a)` in the `c_1 = 0` case.
    pub degrees: Vec<i64>,
}

/// Splitting type on the zero section of the rank-2 bundle on the projective
/// line with transition `[[z^j, q], [0, z^-j]]`, where `q` is a Laurent
/// polynomial in `z` alone (the `u = 0` restriction of an off-diagonal
/// term).  Computed from the dimension profile `t -> h^0(E(t))`: for
/// `E = O(a) + O(-a)` the first twist `t` in `-j..=0` with a section is
/// `t = -a`.
pub fn splitting_type_on_ell(_k: i64, j: i64, q: &LaurentPoly2) -> Result<SplittingType> {
    if j < 0 {
        return Err(Error::InvalidParameter("j must be >= 0".into()));
    }
    if q.terms().any(|(m, _)| m.r != 0) {
        return Err(Error::InvalidParameter(
            "q must be a Laurent polynomial in z only (restrict to u = 0 first)".into(),
        ));
    }
    let mut a = 0;
    for t in -j..=0 {
        if h0_twisted(j, q, t) > 0 {
            a = -t;
            break;
        }
    }
    // Cross-check the whole twist profile against the split model
    // O(a) + O(-a); any mismatch is an internal inconsistency.
    for t in -j..=j {
        let expected = (a + t + 1).max(0) + (-a + t + 1).max(0);
        let got = h0_twisted(j, q, t) as i64;
        if expected != got {
            return Err(Error::Internal(format!(
                "h^0 profile at twist {t}: got {got}, split model with a = {a} gives {expected}"
            )));
        }
    }
    Ok(SplittingType {
        degrees: vec![a, -a],
    })
}

/// `h^0` of the twisted bundle `E(t)` on the projective line, where `E` has
/// transition `[[z^j, q], [0, z^-j]]`.  Sections are pairs of polynomials
/// `(f1, f2)` such that `z^(j-t) f1 + z^-t q f2` and `z^(-j-t) f2` have no
/// positive powers of `z`.
fn h0_twisted(j: i64, q: &LaurentPoly2, t: i64) -> usize {
    let max_q = q.terms().map(|(m, _)| m.s).max();
    // deg f2 <= j + t is forced monomial-by-monomial.
    let deg2 = j + t;
    // f1 only helps where z^(j-t) f1 can cancel against q f2 or reach <= 0.
    let deg1 = (t - j).max(max_q.map_or(i64::MIN, |mq| mq + t));
    let mut cols = Vec::new();
    for a in 0..=deg1.max(-1) {
        cols.push((0u8, a));
    }
    for a in 0..=deg2.max(-1) {
        cols.push((1u8, a));
    }
    if cols.is_empty() {
        return 0;
    }
    let index: BTreeMap<(u8, i64), usize> =
        cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    // Constraint rows: coefficient of z^e, e >= 1, of z^(j-t) f1 + z^-t q f2.
    let mut rows: Vec<SparseRow> = Vec::new();
    let e_hi = (j - t + deg1).max(max_q.map_or(i64::MIN, |mq| mq - t + deg2));
    for e in 1..=e_hi.max(0) {
        let mut row: SparseRow = Vec::new();
        if let Some(&c) = index.get(&(0, e - j + t)) {
            row.push((c, Rat::one()));
        }
        for (m, coeff) in q.terms() {
            if let Some(&c) = index.get(&(1, e + t - m.s)) {
                row.push((c, coeff.clone()));
            }
        }
        row.sort_by_key(|(c, _)| *c);
        if !row.is_empty() {
            rows.push(row);
        }
    }
    nullspace_of_rows(rows, cols.len()).len()
}

// --- JSON serialization ------------------------------------------------

/// Wire format of a bundle: `{"k": .., "j": .., "p": [{"r", "s", "c"}]}`
/// with rational coefficients as strings.
#[derive(Serialize, Deserialize)]
struct BundleSpecWire {
    k: i64,
    j: i64,
    p: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    r: i64,
    s: i64,
    c: String,
}

impl Serialize for BundleSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = BundleSpecWire {
            k: self.k(),
            j: self.j(),
            p: self
                .p()
                .terms()
                .map(|(m, c)| TermWire {
                    r: m.r,
                    s: m.s,
                    c: c.to_string(),
                })
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BundleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = BundleSpecWire::deserialize(deserializer)?;
        let mut poly = LaurentPoly2::zero();
        for term in wire.p {
            let c = Rat::from_str(&term.c)
                .map_err(|e| D::Error::custom(format!("bad coefficient `{}`: {e}", term.c)))?;
            if term.r < 0 {
                return Err(D::Error::custom(format!(
                    "negative u-exponent {} in extension class",
                    term.r
                )));
            }
            poly.add_term(c, term.s, term.r);
        }
        BundleSpec::new(wire.k, wire.j, poly).map_err(D::Error::custom)
    }
}
