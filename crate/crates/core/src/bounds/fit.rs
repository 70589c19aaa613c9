use super::BoundsError;

/// Least-squares fit of `tau * t^(r-1) / ln t` to a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub r: usize,
    pub c_hat: f64,
    /// `(t, normalized value, residual)` in ascending t.
    pub rows: Vec<(usize, f64, f64)>,
}

impl ScalingFit {
    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.2).collect()
    }

    /// max / min of the normalized values.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, 0f64), |(lo, hi), r| (lo.min(r.1), hi.max(r.1)));
        hi / lo
    }
}

/// Fits `points = [(t, tau)]`. Points are sorted by t first, so the result
/// does not depend on input order.
pub fn fit_scaling(points: &[(usize, f64)], r: usize) -> Result<ScalingFit, BoundsError> {
    if points.len() < 3 {
        return Err(BoundsError::InvalidParams(format!("need at least 3 points, got {}", points.len())));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(BoundsError::InvalidParams("t values must be distinct".into()));
    }
    if let Some(&(t, _)) = pts.iter().find(|p| p.0 < 3) {
        return Err(BoundsError::InvalidParams(format!("t must be at least 3, got {t}")));
    }
    let normalized: Vec<f64> = pts
        .iter()
        .map(|&(t, tau)| tau * (t as f64).powi(r as i32 - 1) / (t as f64).ln())
        .collect();
    let c_hat = normalized.iter().sum::<f64>() / normalized.len() as f64;
    let rows = pts
        .iter()
        .zip(&normalized)
        .map(|(&(t, _), &y)| (t, y, y - c_hat))
        .collect();
    Ok(ScalingFit { r, c_hat, rows })
}
