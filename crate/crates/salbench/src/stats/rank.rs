//! Tie-aware ranking and the judges × objects rank matrix.

use super::StatsError;

/// Rank scores so the best gets rank 1; tied scores share the average of the
/// ranks they cover.
pub fn rank_with_ties(scores: &[f64], higher_is_better: bool) -> Result<Vec<f64>, StatsError> {
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(StatsError::NonFiniteScore(*bad));
    }
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let cmp = scores[a].partial_cmp(&scores[b]).expect("finite");
        if higher_is_better {
            cmp.reverse()
        } else {
            cmp
        }
    });
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average rank
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    Ok(ranks)
}

/// Sum of (t^3 - t) over tie groups of a rank vector; the standard correction
/// term entering Kendall's W and Friedman's statistic.
pub fn tie_term(ranks: &[f64]) -> f64 {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        total += t * t * t - t;
        i = j + 1;
    }
    total
}

/// m judges × n objects matrix of (possibly tied) average ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMatrix {
    n_objects: usize,
    rows: Vec<Vec<f64>>,
    tie_terms: Vec<f64>,
}

impl RankMatrix {
    /// Build from rank rows, validating that every judge's ranks lie in
    /// [1, n] and sum to n(n+1)/2.
    pub fn from_ranks(rows: Vec<Vec<f64>>) -> Result<RankMatrix, StatsError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(StatsError::InvalidRankMatrix("empty matrix".into()));
        }
        let n = rows[0].len();
        let expected_sum = (n * (n + 1)) as f64 / 2.0;
        for row in &rows {
            if row.len() != n {
                return Err(StatsError::InvalidRankMatrix("ragged rows".into()));
            }
            if row.iter().any(|r| !r.is_finite() || *r < 1.0 || *r > n as f64) {
                return Err(StatsError::InvalidRankMatrix(
                    "rank outside [1, n]".into(),
                ));
            }
            let sum: f64 = row.iter().sum();
            if (sum - expected_sum).abs() > 1e-9 {
                return Err(StatsError::InvalidRankMatrix(format!(
                    "ranks sum to {sum}, expected {expected_sum}"
                )));
            }
        }
        let tie_terms = rows.iter().map(|r| tie_term(r)).collect();
        Ok(RankMatrix {
            n_objects: n,
            rows,
            tie_terms,
        })
    }

    /// Rank each judge's score row (higher score = better rank).
    pub fn from_scores(score_rows: &[Vec<f64>]) -> Result<RankMatrix, StatsError> {
        let rows = score_rows
            .iter()
            .map(|row| rank_with_ties(row, true))
            .collect::<Result<Vec<_>, _>>()?;
        RankMatrix::from_ranks(rows)
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_judges(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn tie_terms(&self) -> &[f64] {
        &self.tie_terms
    }

    /// Column totals R_i over judges.
    pub fn rank_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.n_objects];
        for row in &self.rows {
            for (t, r) in totals.iter_mut().zip(row) {
                *t += r;
            }
        }
        totals
    }
}
