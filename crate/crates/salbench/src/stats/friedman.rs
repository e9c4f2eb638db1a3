//! Two-way Friedman test with blocking and tie correction.

use serde::Serialize;

use super::rank::{rank_with_ties, tie_term};
use super::special::chi2_sf;
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FriedmanResult {
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    pub blocks: usize,
}

/// Friedman test on a blocks × treatments score matrix. Scores are ranked
/// within each block; the tie-corrected statistic
///
/// chi² = (k-1) · Σ_j (R_j - b(k+1)/2)² / (A - C)
///
/// with A = Σ r² and C = b·k(k+1)²/4 reduces to the classic
/// 12b/(k(k+1)) · Σ_j (R̄_j - (k+1)/2)² when no ties occur. The p-value comes
/// from the chi-square upper tail with k-1 degrees of freedom.
pub fn friedman_test(matrix: &[Vec<f64>]) -> Result<FriedmanResult, StatsError> {
    let b = matrix.len();
    if b < 2 {
        return Err(StatsError::TooFewBlocks(b));
    }
    let k = matrix[0].len();
    if k < 2 {
        return Err(StatsError::TooFewTreatments(k));
    }
    if matrix.iter().any(|row| row.len() != k) {
        return Err(StatsError::InvalidRankMatrix("ragged score matrix".into()));
    }

    let mut rank_totals = vec![0.0; k];
    let mut sum_sq_ranks = 0.0;
    for row in matrix {
        let ranks = rank_with_ties(row, true)?;
        for (total, r) in rank_totals.iter_mut().zip(&ranks) {
            *total += r;
            sum_sq_ranks += r * r;
        }
        let _ = tie_term(&ranks); // ties are absorbed through sum_sq_ranks
    }

    let bf = b as f64;
    let kf = k as f64;
    let correction = bf * kf * (kf + 1.0) * (kf + 1.0) / 4.0;
    let denom = sum_sq_ranks - correction;
    let effect: f64 = rank_totals
        .iter()
        .map(|r| {
            let d = r - bf * (kf + 1.0) / 2.0;
            d * d
        })
        .sum();

    let (chi_square, p_value) = if denom <= 0.0 {
        // every block fully tied: no information, no effect
        (0.0, 1.0)
    } else {
        let chi = (kf - 1.0) * effect / denom;
        (chi, chi2_sf(chi, k - 1))
    };

    Ok(FriedmanResult {
        chi_square,
        dof: k - 1,
        p_value,
        blocks: b,
    })
}
