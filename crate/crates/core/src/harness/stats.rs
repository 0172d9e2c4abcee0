use serde::{Deserialize, Serialize};

use super::experiment::RegretCurve;
use super::HarnessError;

/// Trailing fraction of episodes used for the summary slope.
pub const SLOPE_WINDOW: f64 = 0.5;

/// Least-squares slope of `ln Reg(k)` against `ln k` over the trailing
/// `window` fraction of `cum` (`cum[k - 1] = Reg(k)`). Non-positive values
/// are left out of the fit.
pub fn slope_estimate(cum: &[f64], window: f64) -> Result<f64, HarnessError> {
    let k_total = cum.len();
    if k_total < 100 {
        return Err(HarnessError::TooFewEpisodes(k_total));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(HarnessError::Config(format!(
            "slope window must lie in (0, 1], got {window}"
        )));
    }
    let len = ((window * k_total as f64).round() as usize).clamp(2, k_total);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (k_total - len..k_total)
        .filter(|&i| cum[i] > 0.0 && cum[i].is_finite())
        .map(|i| (((i + 1) as f64).ln(), cum[i].ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(HarnessError::UndefinedSlope);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
/// A single value has standard error 0.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_id: String,
    pub seeds: usize,
    #[serde(rename = "K")]
    pub episodes: usize,
    pub final_regret_mean: f64,
    pub final_regret_se: f64,
    /// Slope of the seed-mean curve; empty when undefined.
    pub slope: Option<f64>,
}

/// Statistics over curves taken in ascending seed order, so the result
/// depends only on the set of runs.
pub fn summarize(config_id: &str, curves: &[RegretCurve]) -> Summary {
    let mut sorted: Vec<&RegretCurve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.seed);
    let finals: Vec<f64> = sorted.iter().map(|c| c.final_regret()).collect();
    let (mean, se) = mean_se(&finals);
    let episodes = sorted.first().map_or(0, |c| c.episodes());
    let slope = if sorted.iter().all(|c| c.episodes() == episodes) && !sorted.is_empty() {
        let mean_curve = mean_curve(&sorted);
        slope_estimate(&mean_curve, SLOPE_WINDOW).ok()
    } else {
        None
    };
    Summary {
        config_id: config_id.to_string(),
        seeds: sorted.len(),
        episodes,
        final_regret_mean: mean,
        final_regret_se: se,
        slope,
    }
}

pub(crate) fn mean_curve(curves: &[&RegretCurve]) -> Vec<f64> {
    let n = curves.len() as f64;
    (0..curves[0].episodes())
        .map(|i| curves.iter().map(|c| c.points[i].cum_regret).sum::<f64>() / n)
        .collect()
}
