//! Local holomorphic Euler characteristic, sharp bounds, charge gaps, and
//! moduli-stratum scans.
//!
//! For a rank-2 bundle on `Z_k` of splitting type `j > 0` near the
//! contracted curve, `chi = h + w` is the local holomorphic Euler
//! characteristic (the instanton charge when `k | j`).  With
//! `n1 = floor((j-2)/k)` and `n2 = floor(j/k)` the sharp bounds are
//!
//! ```text
//!     j - 1  <=  h  <=  (j-1)(n1+1) - k n1 (n1+1)/2
//!         0  <=  w  <=  (j+1) n2   - k n2 (n2+1)/2       (w >= 1 on Z_1)
//! ```
//!
//! and their sum bounds `chi`; on `Z_1` the `chi` range is `[j, j^2]`.  For
//! instantons (`j = n k`) the charge ranges `[1, k-2]` and `[k+1, 2k-2]`
//! can never occur.
//!
//! [`scan_strata`] walks a finite coefficient grid of extension classes,
//! groups the reports by `(h, w)`, and cross-checks every point against the
//! bounds.  The pair `(h, w)` is constant on scaling orbits `p -> lambda p`,
//! so grid points are genuine stratum witnesses; identifying the "generic"
//! stratum from a finite grid remains a heuristic and is flagged as such in
//! the table metadata.

use std::collections::BTreeMap;

use num::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{canonical_window, BundleSpec};
use crate::error::{Error, Result};
use crate::height::{height, height_line_bundle};
use crate::linalg::Rat;
use crate::surface::LaurentPoly2;
use crate::width::{width, width_line_bundle};

/// Inclusive bounds for one invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Range {
    pub lo: i64,
    pub hi: i64,
}

impl Range {
    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Sharp height bounds for splitting type `j > 0`.
pub fn bounds_height(k: i64, j: i64) -> Range {
    assert!(k >= 1 && j > 0);
    Range {
        lo: j - 1,
        hi: height_line_bundle(k, -j),
    }
}

/// Sharp width bounds for splitting type `j > 0` (`lo = 1` on `Z_1`).
pub fn bounds_width(k: i64, j: i64) -> Range {
    assert!(k >= 1 && j > 0);
    Range {
        lo: if k == 1 { 1 } else { 0 },
        hi: width_line_bundle(k, j),
    }
}

/// Sharp bounds for `chi = h + w` at splitting type `j = n k + b > 0`.
pub fn bounds_chi(k: i64, j: i64) -> Range {
    assert!(k >= 1 && j > 0);
    if k == 1 {
        return Range { lo: j, hi: j * j };
    }
    let n = j.div_euclid(k);
    let b = j.rem_euclid(k);
    let hi = if b == 0 {
        n * n * k
    } else {
        n * n * k + 2 * n * b + b - 1
    };
    Range { lo: j - 1, hi }
}

/// Instanton charge gaps on `Z_k`: the ranges `[1, k-2]` and `[k+1, 2k-2]`
/// (either may be empty) cannot occur as `chi` of a splitting-type-`nk`
/// bundle.
pub fn charge_gap_ranges(k: i64) -> [(i64, i64); 2] {
    assert!(k >= 1);
    [(1, k - 2), (k + 1, 2 * k - 2)]
}

/// Height, width, and Euler characteristic of one bundle, with bound
/// annotations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub k: i64,
    pub j: i64,
    /// Extension class in the term grammar.
    pub p: String,
    pub height: i64,
    pub width: i64,
    pub chi: i64,
    pub bounds_height: Range,
    pub bounds_width: Range,
    pub bounds_chi: Range,
    /// `k` divides `j`: the bundle corresponds to an instanton, and the
    /// `(h, w)` stratification is only claimed Hausdorff in that case.
    pub instanton: bool,
    pub within_bounds: bool,
}

/// Compute height and width and assemble the report.
pub fn invariants(b: &BundleSpec) -> Result<InvariantReport> {
    let (k, j) = (b.k(), b.j());
    let h = height(b)?;
    let w = width(b)?;
    let (bh, bw, bc) = if j > 0 {
        (bounds_height(k, j), bounds_width(k, j), bounds_chi(k, j))
    } else {
        let zero = Range { lo: 0, hi: 0 };
        (zero, zero, zero)
    };
    let chi = h + w;
    Ok(InvariantReport {
        k,
        j,
        p: b.p().to_string(),
        height: h,
        width: w,
        chi,
        bounds_height: bh,
        bounds_width: bw,
        bounds_chi: bc,
        instanton: j % k == 0,
        within_bounds: bh.contains(h) && bw.contains(w) && bc.contains(chi),
    })
}

/// One scanned grid point.
#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub p: String,
    pub report: InvariantReport,
}

/// Scan results grouped by `(height, width)`.
#[derive(Clone, Debug, Serialize)]
pub struct StratumTable {
    pub k: i64,
    pub j: i64,
    /// Description of the coefficient grid that was enumerated.
    pub grid: String,
    pub points: Vec<ScanPoint>,
    /// `(h, w) -> indices into points`, sorted by the grammar string of `p`.
    pub strata: BTreeMap<(i64, i64), Vec<usize>>,
    /// Points whose invariants escaped the sharp bounds (always a failure).
    pub bound_violations: Vec<String>,
}

impl StratumTable {
    /// Representative `p` (first in lexicographic order) for each stratum.
    pub fn representatives(&self) -> Vec<((i64, i64), String)> {
        self.strata
            .iter()
            .map(|(&hw, idxs)| (hw, self.points[idxs[0]].p.clone()))
            .collect()
    }
}

/// Enumerate all extension classes supported on at most `max_terms` window
/// monomials with coefficients drawn from the nonzero elements of
/// `coefficients`, plus the zero class.  Deterministic order, lexicographic
/// in the grammar strings.
pub fn enumerate_grid(
    k: i64,
    j: i64,
    coefficients: &[Rat],
    max_terms: usize,
) -> Vec<LaurentPoly2> {
    let window = canonical_window(k, j);
    let nonzero: Vec<Rat> = coefficients
        .iter()
        .filter(|c| !c.is_zero())
        .cloned()
        .collect();
    let mut out = vec![LaurentPoly2::zero()];
    let mut support = Vec::new();
    // Choose supports of size 1..=max_terms, then coefficient assignments.
    fn rec(
        window: &[crate::surface::Monomial2],
        nonzero: &[Rat],
        support: &mut Vec<usize>,
        start: usize,
        remaining: usize,
        out: &mut Vec<LaurentPoly2>,
    ) {
        if !support.is_empty() {
            let mut assignment = vec![0usize; support.len()];
            loop {
                let mut p = LaurentPoly2::zero();
                for (slot, &mono_idx) in support.iter().enumerate() {
                    let m = window[mono_idx];
                    p.add_term(nonzero[assignment[slot]].clone(), m.s, m.r);
                }
                out.push(p);
                // Advance the mixed-radix assignment counter.
                let mut carry = true;
                for digit in assignment.iter_mut() {
                    if *digit + 1 < nonzero.len() {
                        *digit += 1;
                        carry = false;
                        break;
                    }
                    *digit = 0;
                }
                if carry {
                    break;
                }
            }
        }
        if remaining == 0 {
            return;
        }
        for idx in start..window.len() {
            support.push(idx);
            rec(window, nonzero, support, idx + 1, remaining - 1, out);
            support.pop();
        }
    }
    if !nonzero.is_empty() {
        rec(&window, &nonzero, &mut support, 0, max_terms, &mut out);
    }
    // rec emits each support's assignments when entered, so the zero class
    // added above is the only duplicate risk; supports are distinct.
    out
}

/// Exhaustively scan a coefficient grid and stratify by `(h, w)`.
///
/// Every point is validated against the sharp bounds; violations are
/// collected (they indicate an engine bug, not bad input).  Points are
/// computed in parallel and reported in lexicographic order of `p`.
pub fn scan_strata(
    k: i64,
    j: i64,
    coefficients: &[Rat],
    max_terms: usize,
    max_points: usize,
) -> Result<StratumTable> {
    let grid = enumerate_grid(k, j, coefficients, max_terms);
    if grid.len() > max_points {
        return Err(Error::InvalidParameter(format!(
            "grid has {} points, exceeding the cap of {max_points}; raise --max-points",
            grid.len()
        )));
    }
    let mut polys: Vec<(String, LaurentPoly2)> = grid
        .into_iter()
        .map(|p| (p.to_string(), p))
        .collect();
    polys.sort_by(|a, b| a.0.cmp(&b.0));
    polys.dedup_by(|a, b| a.0 == b.0);

    let reports: Vec<Result<ScanPoint>> = polys
        .par_iter()
        .map(|(text, poly)| {
            let b = BundleSpec::new(k, j, poly.clone())?;
            let report = invariants(&b)?;
            Ok(ScanPoint {
                p: text.clone(),
                report,
            })
        })
        .collect();

    let mut points = Vec::with_capacity(reports.len());
    for r in reports {
        points.push(r?);
    }
    let mut strata: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    let mut bound_violations = Vec::new();
    for (idx, pt) in points.iter().enumerate() {
        strata
            .entry((pt.report.height, pt.report.width))
            .or_default()
            .push(idx);
        if !pt.report.within_bounds {
            bound_violations.push(pt.p.clone());
        }
    }
    let grid_desc = format!(
        "coefficients {{{}}}, supports of <= {max_terms} window monomials",
        coefficients
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(StratumTable {
        k,
        j,
        grid: grid_desc,
        points,
        strata,
        bound_violations,
    })
}

/// CSV rows: `k,j,p,height,width,chi,instanton,in_bounds`, one per point.
pub fn stratum_table_csv(table: &StratumTable) -> String {
    let mut out = String::from("k,j,p,height,width,chi,instanton,in_bounds\n");
    for pt in &table.points {
        let r = &pt.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k, r.j, pt.p, r.height, r.width, r.chi, r.instanton, r.within_bounds
        ));
    }
    out
}

/// JSON mirror of the CSV content plus stratum summaries.
pub fn stratum_table_json(table: &StratumTable) -> serde_json::Value {
    let strata: Vec<serde_json::Value> = table
        .strata
        .iter()
        .map(|(&(h, w), idxs)| {
            serde_json::json!({
                "height": h,
                "width": w,
                "count": idxs.len(),
                "representative": table.points[idxs[0]].p,
            })
        })
        .collect();
    serde_json::json!({
        "k": table.k,
        "j": table.j,
        "grid": table.grid,
        "points": table.points,
        "strata": strata,
        "bound_violations": table.bound_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn bundle(k: i64, j: i64, p: &str) -> BundleSpec {
        BundleSpec::new(k, j, p.parse().unwrap()).unwrap()
    }

    #[test]
    fn bound_tables() {
        assert_eq!(bounds_height(2, 3), Range { lo: 2, hi: 2 });
        assert_eq!(bounds_height(1, 3), Range { lo: 2, hi: 3 });
        assert_eq!(bounds_height(1, 2), Range { lo: 1, hi: 1 });

        assert_eq!(bounds_width(2, 3), Range { lo: 0, hi: 2 });
        assert_eq!(bounds_width(1, 3), Range { lo: 1, hi: 6 });
        assert_eq!(bounds_width(5, 3), Range { lo: 0, hi: 0 });

        assert_eq!(bounds_chi(1, 3), Range { lo: 3, hi: 9 });
        assert_eq!(bounds_chi(2, 3), Range { lo: 2, hi: 4 });
        assert_eq!(bounds_chi(3, 6), Range { lo: 5, hi: 12 });
    }

    #[test]
    fn chi_bounds_sum_of_engine_bounds() {
        // hi(chi) equals hi(h) + hi(w) for every k, j in range.
        for k in 1..=5 {
            for j in 1..=10 {
                let sum = bounds_height(k, j).hi + bounds_width(k, j).hi;
                assert_eq!(bounds_chi(k, j).hi, sum, "k={k} j={j}");
                let lo = bounds_height(k, j).lo + bounds_width(k, j).lo;
                assert_eq!(bounds_chi(k, j).lo, lo, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn charge_gaps() {
        assert_eq!(charge_gap_ranges(3), [(1, 1), (4, 4)]);
        let [a, b] = charge_gap_ranges(2);
        assert!(a.0 > a.1 && b.0 > b.1, "both gaps empty for k = 2");
        assert_eq!(charge_gap_ranges(5), [(1, 3), (6, 8)]);
    }

    #[test]
    fn report_on_z2_j3_split() {
        let r = invariants(&bundle(2, 3, "0")).unwrap();
        assert_eq!((r.height, r.width, r.chi), (2, 2, 4));
        assert!(!r.instanton);
        assert!(r.within_bounds);
    }

    #[test]
    fn report_charge_seven() {
        let r = invariants(&bundle(3, 6, "z^-1*u + z^4*u^2")).unwrap();
        assert_eq!(r.chi, 7);
        assert!(r.instanton);
        assert!(r.within_bounds);
    }

    #[test]
    fn trivial_bundle_report() {
        let r = invariants(&bundle(2, 0, "0")).unwrap();
        assert_eq!((r.height, r.width, r.chi), (0, 0, 0));
        assert!(r.instanton);
    }

    #[test]
    fn grid_enumeration_counts() {
        // Z_2, j = 3: 4 window monomials; {0,1} grid with all supports:
        // 2^4 = 16 distinct classes.
        let coeffs = vec![rat(0, 1), rat(1, 1)];
        let grid = enumerate_grid(2, 3, &coeffs, 4);
        assert_eq!(grid.len(), 16);

        // Single-term classes over {0, 1, -1}: 2 per monomial plus zero.
        let coeffs = vec![rat(0, 1), rat(1, 1), rat(-1, 1)];
        let grid = enumerate_grid(2, 3, &coeffs, 1);
        assert_eq!(grid.len(), 9);
    }

    #[test]
    fn scan_z2_j3_strata() {
        let coeffs = vec![rat(0, 1), rat(1, 1)];
        let table = scan_strata(2, 3, &coeffs, 4, 10_000).unwrap();
        assert!(table.bound_violations.is_empty());
        assert_eq!(table.points.len(), 16);
        let keys: Vec<(i64, i64)> = table.strata.keys().copied().collect();
        assert_eq!(keys, vec![(2, 0), (2, 1), (2, 2)]);
        // p = u and p = z^2 u sit in (2, 1); p = 0 and p = z^2 u^2 in (2, 2).
        assert!(table.strata[&(2, 1)]
            .iter()
            .any(|&i| table.points[i].p == "u"));
        assert!(table.strata[&(2, 2)]
            .iter()
            .any(|&i| table.points[i].p == "0"));
        assert!(table.strata[&(2, 2)]
            .iter()
            .any(|&i| table.points[i].p == "z^2*u^2"));
    }

    #[test]
    fn csv_and_json_agree() {
        let coeffs = vec![rat(0, 1), rat(1, 1)];
        let table = scan_strata(2, 3, &coeffs, 1, 1000).unwrap();
        let csv = stratum_table_csv(&table);
        let json = stratum_table_json(&table);
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), table.points.len());
        assert_eq!(
            json["points"].as_array().unwrap().len(),
            table.points.len()
        );
        for (row, pt) in rows.iter().zip(&table.points) {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields[2], pt.p);
            assert_eq!(fields[3], pt.report.height.to_string());
            assert_eq!(fields[4], pt.report.width.to_string());
        }
    }

    #[test]
    fn grid_cap_is_enforced() {
        let coeffs = vec![rat(0, 1), rat(1, 1)];
        assert!(scan_strata(2, 3, &coeffs, 4, 10).is_err());
    }
}
