//! Balancing of splitting types and admissible sequences.
//!
//! A rank-r bundle of splitting type `j_1 >= ... >= j_r` is *balanced* when
//! `j_1 <= j_r + k - 1`.  One balancing step performs an elementary
//! transformation with respect to the lowest summand, replacing `j_r` by
//! `j_r + k` and re-sorting; the recorded rows of splitting types form an
//! *admissible sequence*: the first row is the input, every later row's sum
//! grows by exactly `k` per step, and the last row is balanced.  The sum
//! grows while the maximum never increases and the minimum never decreases,
//! so the walk terminates.
//!
//! Only the numeric layer lives here; the sheaf-level elementary
//! transformations behind it are not constructed.

use serde::Serialize;

use crate::error::{Error, Result};

/// Table of splitting types produced by balancing: `rows[i]` is the
/// splitting type after `i` steps, each row nonincreasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibleSequence {
    pub k: i64,
    /// Number of recorded rows (the input row counts as step 1).
    pub t: usize,
    pub rank: usize,
    pub rows: Vec<Vec<i64>>,
}

/// Named violation of the admissible-sequence conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AdmissibleViolation {
    Empty,
    RankMismatch { row: usize },
    RowNotNonincreasing { row: usize },
    /// Condition (ii): row `i` must sum to `sum(row 1) + k*i - k`.
    SumMismatch { row: usize, expected: i64, got: i64 },
    /// Condition (iii): the final row must be balanced.
    FinalRowNotBalanced,
}

/// Run the balancing walk for a nonincreasing splitting type of rank >= 2.
pub fn balance(k: i64, splitting_type: &[i64]) -> Result<AdmissibleSequence> {
    if k < 1 {
        return Err(Error::InvalidParameter(format!("k must be >= 1, got {k}")));
    }
    let rank = splitting_type.len();
    if rank < 2 {
        return Err(Error::InvalidParameter(
            "balancing needs rank >= 2".into(),
        ));
    }
    if splitting_type.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "splitting type must be nonincreasing".into(),
        ));
    }
    let mut rows = vec![splitting_type.to_vec()];
    let mut current = splitting_type.to_vec();
    while current[0] > current[rank - 1] + k - 1 {
        current[rank - 1] += k;
        current.sort_unstable_by(|a, b| b.cmp(a));
        rows.push(current.clone());
    }
    Ok(AdmissibleSequence {
        k,
        t: rows.len(),
        rank,
        rows,
    })
}

/// Check conditions (i)-(iii) and monotonicity of the rows; an empty list
/// means the sequence is admissible.
pub fn validate_admissible(seq: &AdmissibleSequence, k: i64) -> Vec<AdmissibleViolation> {
    let mut violations = Vec::new();
    if seq.rows.is_empty() {
        violations.push(AdmissibleViolation::Empty);
        return violations;
    }
    let rank = seq.rank;
    let base_sum: i64 = seq.rows[0].iter().sum();
    for (i, row) in seq.rows.iter().enumerate() {
        if row.len() != rank {
            violations.push(AdmissibleViolation::RankMismatch { row: i + 1 });
            continue;
        }
        if row.windows(2).any(|w| w[0] < w[1]) {
            violations.push(AdmissibleViolation::RowNotNonincreasing { row: i + 1 });
        }
        let expected = base_sum + k * (i as i64);
        let got: i64 = row.iter().sum();
        if got != expected {
            violations.push(AdmissibleViolation::SumMismatch {
                row: i + 1,
                expected,
                got,
            });
        }
    }
    let last = seq.rows.last().unwrap();
    if last.len() == rank && last[0] > last[rank - 1] + k - 1 {
        violations.push(AdmissibleViolation::FinalRowNotBalanced);
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_z2_type_3_minus3() {
        let seq = balance(2, &[3, -3]).unwrap();
        assert_eq!(seq.t, 4);
        assert_eq!(
            seq.rows,
            vec![vec![3, -3], vec![3, -1], vec![3, 1], vec![3, 3]]
        );
        let sums: Vec<i64> = seq.rows.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(sums, vec![0, 2, 4, 6]);
        assert!(validate_admissible(&seq, 2).is_empty());
    }

    #[test]
    fn balance_rank_three() {
        let seq = balance(1, &[2, 0, -2]).unwrap();
        assert_eq!(seq.t, 7);
        assert_eq!(seq.rows.last().unwrap(), &vec![2, 2, 2]);
        assert!(validate_admissible(&seq, 1).is_empty());
    }

    #[test]
    fn already_balanced() {
        let seq = balance(5, &[1, 0]).unwrap();
        assert_eq!(seq.t, 1);
        assert_eq!(seq.rows, vec![vec![1, 0]]);
        assert!(validate_admissible(&seq, 5).is_empty());
    }

    #[test]
    fn validation_catches_sum_error() {
        let mut seq = balance(2, &[3, -3]).unwrap();
        seq.rows[2][0] += 1;
        let violations = validate_admissible(&seq, 2);
        assert!(violations
            .iter()
            .any(|v| matches!(v, AdmissibleViolation::SumMismatch { row: 3, .. })));
    }

    #[test]
    fn validation_catches_unbalanced_tail() {
        let seq = AdmissibleSequence {
            k: 2,
            t: 1,
            rank: 2,
            rows: vec![vec![4, -4]],
        };
        let violations = validate_admissible(&seq, 2);
        assert_eq!(violations, vec![AdmissibleViolation::FinalRowNotBalanced]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(balance(2, &[3]).is_err());
        assert!(balance(2, &[-3, 3]).is_err());
        assert!(balance(0, &[3, -3]).is_err());
    }

    #[test]
    fn termination_and_validity_sweep() {
        for k in 1..=5 {
            for top in -6..=6 {
                for bottom in -6..=top {
                    let seq = balance(k, &[top, bottom]).unwrap();
                    assert!(
                        validate_admissible(&seq, k).is_empty(),
                        "k={k} type=({top},{bottom})"
                    );
                }
            }
        }
    }
}
