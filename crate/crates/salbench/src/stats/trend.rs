//! Least-squares trend over ordinal category codes, with named exclusions
//! for outlier models.

use serde::Serialize;

use super::StatsError;

#[derive(Debug, Clone, PartialEq)]
pub struct TrendPoint {
    pub model: String,
    /// Ordinal category code (size increases with the code).
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual per fitted point, keyed by model.
    pub residuals: Vec<(String, f64)>,
    /// Models excluded from the fit (still reported, never fitted).
    pub excluded: Vec<String>,
    pub n_used: usize,
}

/// Ordinary least squares y = slope·x + intercept over the points whose
/// model is not excluded.
pub fn ols_trend(points: &[TrendPoint], exclude: &[String]) -> Result<TrendFit, StatsError> {
    let used: Vec<&TrendPoint> = points
        .iter()
        .filter(|p| !exclude.contains(&p.model))
        .collect();
    let n = used.len();
    if n < 2 {
        return Err(StatsError::TooFewPoints(n));
    }
    if used.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(StatsError::NonFiniteScore(f64::NAN));
    }
    let nf = n as f64;
    let mean_x: f64 = used.iter().map(|p| p.x).sum::<f64>() / nf;
    let mean_y: f64 = used.iter().map(|p| p.y).sum::<f64>() / nf;
    let sxx: f64 = used.iter().map(|p| (p.x - mean_x) * (p.x - mean_x)).sum();
    if sxx == 0.0 {
        // a constant design cannot identify a slope
        return Err(StatsError::TooFewPoints(n));
    }
    let sxy: f64 = used.iter().map(|p| (p.x - mean_x) * (p.y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals = used
        .iter()
        .map(|p| (p.model.clone(), p.y - (slope * p.x + intercept)))
        .collect();
    Ok(TrendFit {
        slope,
        intercept,
        residuals,
        excluded: exclude.to_vec(),
        n_used: n,
    })
}
