//! The two canonical charts of `Z_k` and the cone ring of `X_k`.
//!
//! `Z_k` is covered by `U = {z, u}` and `V = {zeta, v}`, glued by
//! `zeta = z^-1`, `v = z^k u`.  A Laurent monomial `z^s u^r` (always `r >= 0`
//! here) is holomorphic on `U` iff `s >= 0`, and on `V` iff `s <= k r`; the
//! monomials holomorphic on both charts are exactly the global functions,
//! i.e. the cone ring `k_0` of the contracted surface `X_k`.  The abstract
//! presentation `C[x_0, ..., x_k] / (x_i x_{i+h} - x_{i+1} x_{i+h-1})` is
//! never manipulated directly: the lifting `x_i -> z^i u` is injective onto
//! the monomials `z^a u^d` with `0 <= a <= k d`, and we always compute in
//! that faithful monomial model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Rat;

/// Configuration of the surface `Z_k`: the zero section has `ell^2 = -k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceConfig {
    k: i64,
}

impl SurfaceConfig {
    pub fn new(k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter(format!("k must be >= 1, got {k}")));
        }
        Ok(SurfaceConfig { k })
    }

    pub fn k(&self) -> i64 {
        self.k
    }
}

/// A Laurent monomial `z^s u^r` with `s` any integer and `r >= 0`.
///
/// Ordered by `(r, s)`, so polynomial displays list terms by ascending
/// `u`-degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial2 {
    /// Exponent of `u` (nonnegative).
    pub r: i64,
    /// Exponent of `z` (may be negative).
    pub s: i64,
}

impl Monomial2 {
    pub fn new(s: i64, r: i64) -> Self {
        assert!(r >= 0, "u-exponent must be nonnegative, got {r}");
        Monomial2 { r, s }
    }
}

/// `z^s u^r` is holomorphic on the `U`-chart iff `s >= 0`.
pub fn is_holomorphic_u(m: Monomial2) -> bool {
    m.s >= 0
}

/// `z^s u^r` is holomorphic on the `V`-chart iff it is a polynomial in
/// `z^-1` and `z^k u`, i.e. iff `s <= k r`.
pub fn is_holomorphic_v(k: i64, m: Monomial2) -> bool {
    m.s <= k * m.r
}

/// Monomial basis `{ z^a u^d : 0 <= a <= k d }` of the degree-`d` piece of
/// the cone ring under the lifting `x_i -> z^i u`.
pub fn cone_ring_basis(k: i64, d: i64) -> Vec<Monomial2> {
    assert!(d >= 0, "u-degree must be nonnegative");
    (0..=k * d).map(|a| Monomial2::new(a, d)).collect()
}

/// Does `z^s u^r` lie in the cone ring (holomorphic on both charts)?
pub fn is_cone_monomial(k: i64, m: Monomial2) -> bool {
    is_holomorphic_u(m) && is_holomorphic_v(k, m)
}

/// A Laurent polynomial in `z, u` with rational coefficients and `u`-degrees
/// `>= 0`.  No zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly2 {
    terms: BTreeMap<Monomial2, Rat>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        LaurentPoly2::default()
    }

    pub fn one() -> Self {
        LaurentPoly2::monomial(Rat::one(), 0, 0)
    }

    /// The single term `c * z^s * u^r`; the zero polynomial if `c = 0`.
    pub fn monomial(c: Rat, s: i64, r: i64) -> Self {
        let mut p = LaurentPoly2::zero();
        p.add_term(c, s, r);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial2, &Rat)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, s: i64, r: i64) -> Rat {
        self.terms
            .get(&Monomial2::new(s, r))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, c: Rat, s: i64, r: i64) {
        if c.is_zero() {
            return;
        }
        let key = Monomial2::new(s, r);
        let entry = self.terms.entry(key).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(c.clone(), m.s, m.r);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for (_, c) in out.terms.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LaurentPoly2::zero();
        }
        let mut out = self.clone();
        for (_, v) in out.terms.iter_mut() {
            *v *= c;
        }
        out
    }

    /// Multiply by the monomial `c * z^s * u^r`.
    pub fn mul_monomial(&self, c: &Rat, s: i64, r: i64) -> Self {
        let mut out = LaurentPoly2::zero();
        for (m, v) in self.terms() {
            out.add_term(v * c, m.s + s, m.r + r);
        }
        out
    }

    /// Exact product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly2::zero();
        for (m, c) in self.terms() {
            for (n, d) in other.terms() {
                out.add_term(c * d, m.s + n.s, m.r + n.r);
            }
        }
        out
    }

    /// Drop all terms of `u`-degree greater than `max_r`.
    pub fn truncate_u(&self, max_r: i64) -> Self {
        let mut out = LaurentPoly2::zero();
        for (m, c) in self.terms() {
            if m.r <= max_r {
                out.add_term(c.clone(), m.s, m.r);
            }
        }
        out
    }

    /// Smallest `u`-exponent appearing, or `None` for the zero polynomial.
    pub fn min_u_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.r).min()
    }

    pub fn max_u_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.r).max()
    }

    pub fn max_abs_z_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.s.abs()).max().unwrap_or(0)
    }

    /// Restriction to the zero section `u = 0`: the `u`-degree-0 part as a
    /// Laurent polynomial in `z` alone.
    pub fn restrict_u0(&self) -> Self {
        let mut out = LaurentPoly2::zero();
        for (m, c) in self.terms() {
            if m.r == 0 {
                out.add_term(c.clone(), m.s, 0);
            }
        }
        out
    }

    /// True if every term is divisible by `u^d`.
    pub fn divisible_by_u(&self, d: i64) -> bool {
        self.terms.keys().all(|m| m.r >= d)
    }

    /// True if every monomial is holomorphic on both charts of `Z_k`.
    pub fn is_holomorphic_on_zk(&self, k: i64) -> bool {
        self.terms.keys().all(|m| is_cone_monomial(k, *m))
    }
}

/// An element of the cone ring `k_0`, kept in the monomial model: every term
/// `z^a u^d` satisfies `0 <= a <= k d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeRingElement {
    k: i64,
    poly: LaurentPoly2,
}

impl ConeRingElement {
    pub fn new(k: i64, poly: LaurentPoly2) -> Result<Self> {
        if let Some((m, _)) = poly.terms().find(|(m, _)| !is_cone_monomial(k, *m)) {
            return Err(Error::InvalidParameter(format!(
                "z^{}*u^{} is not a global function on Z_{k}",
                m.s, m.r
            )));
        }
        Ok(ConeRingElement { k, poly })
    }

    pub fn poly(&self) -> &LaurentPoly2 {
        &self.poly
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    /// Render degree-1 monomials through the generator names `x_0, ..., x_k`
    /// (for `k = 2` the classical `x, y, w`); higher-degree terms fall back
    /// to the monomial notation.
    pub fn display_with_generators(&self) -> String {
        let name = |a: i64| -> String {
            if self.k == 2 {
                match a {
                    0 => "x".into(),
                    1 => "y".into(),
                    _ => "w".into(),
                }
            } else if self.k == 1 {
                if a == 0 {
                    "x".into()
                } else {
                    "y".into()
                }
            } else {
                format!("x{a}")
            }
        };
        let mut parts = Vec::new();
        for (m, c) in self.poly.terms() {
            let var = if m.r == 1 {
                name(m.s)
            } else {
                format_monomial(m)
            };
            if c.is_one() {
                parts.push(var);
            } else {
                parts.push(format!("{c}*{var}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn format_monomial(m: Monomial2) -> String {
    let mut factors = Vec::new();
    match m.s {
        0 => {}
        1 => factors.push("z".to_string()),
        s => factors.push(format!("z^{s}")),
    }
    match m.r {
        0 => {}
        1 => factors.push("u".to_string()),
        r => factors.push(format!("u^{r}")),
    }
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

impl fmt::Display for LaurentPoly2 {
    /// Renders in the term grammar `c*z^s*u^r` joined by `+`/`-`, e.g.
    /// `z^-1*u + z^4*u^2`.  Round-trips through [`LaurentPoly2::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = format_monomial(m);
            if mag.is_one() && mono != "1" {
                write!(f, "{mono}")?;
            } else if mono == "1" {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for LaurentPoly2 {
    /// Serializes as the grammar string, e.g. `"z^-1*u + z^4*u^2"`.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for LaurentPoly2 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}

impl FromStr for LaurentPoly2 {
    type Err = Error;

    /// Parse the term grammar: terms `c*z^s*u^r` joined by `+`/`-`, with `c`
    /// a rational like `3` or `-2/5`, `s` any integer, `r` nonnegative;
    /// whitespace is ignored and `0` denotes the zero polynomial.
    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial text".into()));
        }
        let mut poly = LaurentPoly2::zero();
        for (sign, term) in split_terms(&compact)? {
            let (c, s, r) = parse_term(term)?;
            poly.add_term(if sign { -c } else { c }, s, r);
        }
        Ok(poly)
    }
}

/// Split on top-level `+`/`-`, keeping each term's sign (true = negative).
/// A `+`/`-` directly after `^` or `/` belongs to the exponent/denominator.
fn split_terms(s: &str) -> Result<Vec<(bool, &str)>> {
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    let mut sign = false;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && i > 0 {
            let prev = bytes[i - 1] as char;
            if !matches!(prev, '^' | '/' | '*' | '+' | '-') {
                terms.push((sign, &s[start..i]));
                sign = c == '-';
                start = i + 1;
                i += 1;
                continue;
            }
        } else if (c == '+' || c == '-') && i == 0 {
            sign = c == '-';
            start = 1;
        }
        i += 1;
    }
    terms.push((sign, &s[start..]));
    if terms.iter().any(|(_, t)| t.is_empty()) {
        return Err(Error::Parse(format!("dangling sign or empty term in `{s}`")));
    }
    Ok(terms)
}

/// Parse one unsigned term `c*z^s*u^r` (each factor optional).
fn parse_term(term: &str) -> Result<(Rat, i64, i64)> {
    let mut coeff = Rat::one();
    let mut s: i64 = 0;
    let mut r: i64 = 0;
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{term}`")));
        }
        let bytes = factor.as_bytes();
        match bytes[0] as char {
            'z' => s += parse_exponent(&factor[1..], factor, true)?,
            'u' => {
                let e = parse_exponent(&factor[1..], factor, false)?;
                if e < 0 {
                    return Err(Error::Parse(format!(
                        "u-exponent must be nonnegative in `{factor}`"
                    )));
                }
                r += e;
            }
            _ => {
                let c = Rat::from_str(factor).map_err(|e| {
                    Error::Parse(format!("bad coefficient `{factor}`: {e}"))
                })?;
                coeff *= c;
            }
        }
    }
    Ok((coeff, s, r))
}

fn parse_exponent(rest: &str, whole: &str, allow_negative: bool) -> Result<i64> {
    if rest.is_empty() {
        return Ok(1);
    }
    let Some(digits) = rest.strip_prefix('^') else {
        return Err(Error::Parse(format!("expected `^` in `{whole}`")));
    };
    let e: i64 = digits
        .parse()
        .map_err(|_| Error::Parse(format!("bad exponent in `{whole}`")))?;
    if !allow_negative && e < 0 {
        return Err(Error::Parse(format!("negative exponent in `{whole}`")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn chart_predicates() {
        assert!(is_holomorphic_u(Monomial2::new(0, 0)));
        assert!(!is_holomorphic_u(Monomial2::new(-1, 1)));
        assert!(is_holomorphic_u(Monomial2::new(3, 2)));

        assert!(is_holomorphic_v(2, Monomial2::new(2, 1)));
        assert!(!is_holomorphic_v(2, Monomial2::new(3, 1)));
        assert!(is_holomorphic_v(7, Monomial2::new(-5, 0)));
    }

    #[test]
    fn cone_basis_enumeration() {
        let b = cone_ring_basis(2, 0);
        assert_eq!(b, vec![Monomial2::new(0, 0)]);

        let b = cone_ring_basis(2, 1);
        assert_eq!(
            b,
            vec![
                Monomial2::new(0, 1),
                Monomial2::new(1, 1),
                Monomial2::new(2, 1)
            ]
        );

        let b = cone_ring_basis(1, 2);
        assert_eq!(
            b,
            vec![
                Monomial2::new(0, 2),
                Monomial2::new(1, 2),
                Monomial2::new(2, 2)
            ]
        );
    }

    #[test]
    fn cone_basis_size_and_both_charts() {
        for k in 1..=4 {
            for d in 0..=5 {
                let basis = cone_ring_basis(k, d);
                assert_eq!(basis.len() as i64, k * d + 1);
                for m in basis {
                    assert!(is_cone_monomial(k, m));
                }
            }
        }
    }

    #[test]
    fn multiply_monomials() {
        let zu = LaurentPoly2::monomial(rat(1, 1), 1, 1);
        let sq = zu.mul(&zu);
        assert_eq!(sq, LaurentPoly2::monomial(rat(1, 1), 2, 2));

        let p: LaurentPoly2 = "z^-1*u + z^4*u^2".parse().unwrap();
        assert_eq!(p.mul(&LaurentPoly2::one()), p);

        let a = LaurentPoly2::monomial(rat(1, 1), -1, 1);
        let b = LaurentPoly2::monomial(rat(1, 1), 4, 2);
        assert_eq!(a.mul(&b), LaurentPoly2::monomial(rat(1, 1), 3, 3));
    }

    #[test]
    fn grammar_round_trip() {
        for text in [
            "0",
            "z*u",
            "z^-1*u + z^4*u^2",
            "-2/5*z^2*u + 3*u^3",
            "1/3*z^-2*u^2 - u",
            "7",
        ] {
            let p: LaurentPoly2 = text.parse().unwrap();
            let shown = p.to_string();
            let q: LaurentPoly2 = shown.parse().unwrap();
            assert_eq!(p, q, "round trip failed for `{text}` -> `{shown}`");
        }
    }

    #[test]
    fn grammar_whitespace_and_signs() {
        let p: LaurentPoly2 = " z^-1 * u  +  z^4 * u^2 ".parse().unwrap();
        assert_eq!(p.coeff(-1, 1), rat(1, 1));
        assert_eq!(p.coeff(4, 2), rat(1, 1));

        let q: LaurentPoly2 = "-z*u - -1*z*u".parse().unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn grammar_rejects_garbage() {
        assert!("".parse::<LaurentPoly2>().is_err());
        assert!("z^".parse::<LaurentPoly2>().is_err());
        assert!("u^-1".parse::<LaurentPoly2>().is_err());
        assert!("2x".parse::<LaurentPoly2>().is_err());
        assert!("z*u +".parse::<LaurentPoly2>().is_err());
    }

    #[test]
    fn cone_element_rejects_bad_monomials() {
        let p = LaurentPoly2::monomial(rat(1, 1), 3, 1);
        assert!(ConeRingElement::new(2, p.clone()).is_err());
        assert!(ConeRingElement::new(3, p).is_ok());
    }

    #[test]
    fn cone_element_generator_names() {
        let y = ConeRingElement::new(2, LaurentPoly2::monomial(rat(1, 1), 1, 1)).unwrap();
        assert_eq!(y.display_with_generators(), "y");
        let w = ConeRingElement::new(2, LaurentPoly2::monomial(rat(1, 1), 2, 1)).unwrap();
        assert_eq!(w.display_with_generators(), "w");
    }

    #[test]
    fn surface_config_validation() {
        assert!(SurfaceConfig::new(0).is_err());
        assert_eq!(SurfaceConfig::new(3).unwrap().k(), 3);
    }
}
