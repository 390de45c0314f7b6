//! Interval summaries over a trajectory: integrated non-Markovianity,
//! mean non-Markov index, and Bloch-volume ratio per interval.

use thiserror::Error;

use crate::nonmarkov::{bloch_volume_ratio, total_nonmarkovianity, GapReport, MeasureError};
use crate::trajectory::Trajectory;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("need at least two boundaries, got {got}")]
    TooFewBoundaries { got: usize },
    #[error("boundaries must be strictly increasing at position {index}")]
    NotIncreasing { index: usize },
    #[error("trajectory has no samples")]
    EmptyTrajectory,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRow {
    pub t1: f64,
    pub t2: f64,
    pub total_f: f64,
    pub mean_n_index: Option<f64>,
    /// None when guard gaps exceed the 1% budget for the window.
    pub bloch_ratio: Option<f64>,
    pub gaps: GapReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalReport {
    pub rows: Vec<IntervalRow>,
}

/// Summarize consecutive boundary pairs [b₀,b₁], [b₁,b₂], ...
pub fn interval_report(
    traj: &Trajectory,
    boundaries: &[f64],
) -> Result<IntervalReport, ReportError> {
    if boundaries.len() < 2 {
        return Err(ReportError::TooFewBoundaries {
            got: boundaries.len(),
        });
    }
    for i in 1..boundaries.len() {
        if boundaries[i] <= boundaries[i - 1] {
            return Err(ReportError::NotIncreasing { index: i });
        }
    }
    if traj.samples.is_empty() {
        return Err(ReportError::EmptyTrajectory);
    }

    let f_series = traj.f_series();
    let sum_series = traj.rate_sum_series();
    let mut rows = Vec::with_capacity(boundaries.len() - 1);
    for w in boundaries.windows(2) {
        let (t1, t2) = (w[0], w[1]);
        let (total_f, gaps) = total_nonmarkovianity(&f_series, t1, t2)?;
        let bloch_ratio = match bloch_volume_ratio(&sum_series, t1, t2) {
            Ok(r) => Some(r),
            Err(MeasureError::TooManyGaps { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        rows.push(IntervalRow {
            t1,
            t2,
            total_f,
            mean_n_index: traj.mean_n_index(t1, t2),
            bloch_ratio,
            gaps,
        });
    }
    Ok(IntervalReport { rows })
}
