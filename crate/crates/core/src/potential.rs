//! Electronic potential-energy curves: analytic families and tabulated
//! curves interpolated by a natural cubic spline.
//!
//! Tabulated curves come from plain-text files with two numeric columns
//! "R_bohr V_hartree", `#` comments, strictly increasing R. No
//! extrapolation is performed beyond the first/last node.

use std::path::Path;

use thiserror::Error;

use crate::grid::SpatialGrid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("r = {r} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("tabulated curve needs at least 2 nodes, got {n}")]
    TooFewNodes { n: usize },
    #[error("tabulated R values must be strictly increasing (node {index})")]
    NotIncreasing { index: usize },
    #[error("non-finite table entry at node {index}")]
    NonFiniteNode { index: usize },
    #[error("cannot parse potential table line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("cannot read potential table: {0}")]
    Io(String),
}

/// Natural cubic spline through strictly increasing nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the nodes, natural boundary (zero at the ends).
    y2: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, PotentialError> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(PotentialError::TooFewNodes { n: n.min(ys.len()) });
        }
        for i in 0..n {
            if !xs[i].is_finite() || !ys[i].is_finite() {
                return Err(PotentialError::NonFiniteNode { index: i });
            }
            if i > 0 && xs[i] <= xs[i - 1] {
                return Err(PotentialError::NotIncreasing { index: i });
            }
        }
        // Tridiagonal solve for the second derivatives (Thomas algorithm).
        let mut y2 = vec![0.0; n];
        if n > 2 {
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            let mut upper = vec![0.0; m];
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            // forward sweep; sub-diagonal equals the previous row's upper value
            for i in 1..m {
                let w = (xs[i + 1] - xs[i]) / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            y2[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                y2[i + 1] = (rhs[i] - upper[i] * y2[i + 2]) / diag[i];
            }
        }
        Ok(Self { xs, ys, y2 })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> Result<f64, PotentialError> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(PotentialError::OutOfRange { r: x, lo, hi });
        }
        let j = match self.xs.partition_point(|&v| v < x) {
            0 => 0,
            p if p >= self.xs.len() => self.xs.len() - 2,
            p => p - 1,
        };
        let h = self.xs[j + 1] - self.xs[j];
        let a = (self.xs[j + 1] - x) / h;
        let b = (x - self.xs[j]) / h;
        Ok(a * self.ys[j]
            + b * self.ys[j + 1]
            + ((a * a * a - a) * self.y2[j] + (b * b * b - b) * self.y2[j + 1]) * h * h / 6.0)
    }
}

/// A single electronic potential curve V(R).
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialCurve {
    Flat {
        offset: f64,
    },
    Harmonic {
        force_constant: f64,
        center: f64,
        offset: f64,
    },
    Morse {
        depth: f64,
        steepness: f64,
        center: f64,
        offset: f64,
    },
    Tabulated(CubicSpline),
}

impl PotentialCurve {
    pub fn flat(offset: f64) -> Self {
        Self::Flat { offset }
    }

    /// Harmonic well ½ m ω² (R-center)² + offset, stored as a force constant.
    pub fn harmonic_from_omega(omega: f64, mass: f64, center: f64, offset: f64) -> Self {
        Self::Harmonic {
            force_constant: mass * omega * omega,
            center,
            offset,
        }
    }

    /// Morse well depth·(1 - e^(-a(R-center)))² + offset.
    pub fn morse(depth: f64, steepness: f64, center: f64, offset: f64) -> Self {
        Self::Morse {
            depth,
            steepness,
            center,
            offset,
        }
    }

    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, PotentialError> {
        Ok(Self::Tabulated(CubicSpline::new(xs, ys)?))
    }

    /// Load a tabulated curve from "R_bohr V_hartree" text.
    pub fn from_table_str(text: &str) -> Result<Self, PotentialError> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64, PotentialError> {
                tok.ok_or_else(|| PotentialError::Parse {
                    line: lineno + 1,
                    reason: "expected two columns".into(),
                })?
                .parse::<f64>()
                .map_err(|e| PotentialError::Parse {
                    line: lineno + 1,
                    reason: e.to_string(),
                })
            };
            xs.push(parse(cols.next())?);
            ys.push(parse(cols.next())?);
            if cols.next().is_some() {
                return Err(PotentialError::Parse {
                    line: lineno + 1,
                    reason: "expected exactly two columns".into(),
                });
            }
        }
        Self::tabulated(xs, ys)
    }

    pub fn from_table_file(path: &Path) -> Result<Self, PotentialError> {
        let text = std::fs::read_to_string(path).map_err(|e| PotentialError::Io(e.to_string()))?;
        Self::from_table_str(&text)
    }

    pub fn value(&self, r: f64) -> Result<f64, PotentialError> {
        match self {
            Self::Flat { offset } => Ok(*offset),
            Self::Harmonic {
                force_constant,
                center,
                offset,
            } => {
                let d = r - center;
                Ok(0.5 * force_constant * d * d + offset)
            }
            Self::Morse {
                depth,
                steepness,
                center,
                offset,
            } => {
                let x = 1.0 - (-steepness * (r - center)).exp();
                Ok(depth * x * x + offset)
            }
            Self::Tabulated(spline) => spline.eval(r),
        }
    }

    /// Sample the curve on every grid point.
    pub fn sample(&self, grid: &SpatialGrid) -> Result<Vec<f64>, PotentialError> {
        grid.positions().map(|r| self.value(r)).collect()
    }

    /// Largest value the curve takes on the grid (for time-step bounds).
    pub fn max_on_grid(&self, grid: &SpatialGrid) -> Result<f64, PotentialError> {
        Ok(self
            .sample(grid)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn min_on_grid(&self, grid: &SpatialGrid) -> Result<f64, PotentialError> {
        Ok(self.sample(grid)?.into_iter().fold(f64::INFINITY, f64::min))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_is_flat() {
        let v = PotentialCurve::flat(0.0);
        for r in [0.0, 1.0, 100.0, -3.0] {
            assert_eq!(v.value(r).unwrap(), 0.0);
        }
    }

    #[test]
    fn morse_minimum_sits_at_center() {
        let v = PotentialCurve::morse(0.01, 1.0, 5.0, 0.0);
        assert_eq!(v.value(5.0).unwrap(), 0.0);
        assert!(v.value(4.9).unwrap() > 0.0);
        assert!(v.value(5.1).unwrap() > 0.0);
    }

    #[test]
    fn tabulated_reproduces_nodes_exactly() {
        let v = PotentialCurve::tabulated(vec![1.0, 2.0, 3.0], vec![0.5, 0.1, 0.4]).unwrap();
        assert_eq!(v.value(2.0).unwrap(), 0.1);
        assert_eq!(v.value(1.0).unwrap(), 0.5);
        assert_eq!(v.value(3.0).unwrap(), 0.4);
    }

    #[test]
    fn tabulated_refuses_extrapolation() {
        let v = PotentialCurve::tabulated(vec![1.0, 2.0, 3.0], vec![0.5, 0.1, 0.4]).unwrap();
        assert!(matches!(
            v.value(0.99),
            Err(PotentialError::OutOfRange { .. })
        ));
        assert!(matches!(
            v.value(3.01),
            Err(PotentialError::OutOfRange { .. })
        ));
    }

    #[test]
    fn table_text_parser() {
        let text = "# comment line\n1.0 0.5\n2.0 0.1   # inline comment\n\n3.0 0.4\n";
        let v = PotentialCurve::from_table_str(text).unwrap();
        assert_eq!(v.value(2.0).unwrap(), 0.1);
        let bad = PotentialCurve::from_table_str("1.0 0.5\n0.5 0.2\n");
        assert!(matches!(
            bad,
            Err(PotentialError::NotIncreasing { index: 1 })
        ));
        let bad = PotentialCurve::from_table_str("1.0 0.5 0.7\n");
        assert!(matches!(bad, Err(PotentialError::Parse { line: 1, .. })));
    }

    /// Interpolation error on a smooth curve falls ~16x when the node
    /// spacing is halved (fourth-order convergence away from the ends).
    #[test]
    fn spline_error_scales_fourth_order() {
        let morse = PotentialCurve::morse(0.05, 0.8, 6.0, 0.0);
        let max_err = |n_nodes: usize| -> f64 {
            let lo = 4.0;
            let hi = 14.0;
            let xs: Vec<f64> = (0..n_nodes)
                .map(|i| lo + (hi - lo) * i as f64 / (n_nodes - 1) as f64)
                .collect();
            let ys: Vec<f64> = xs.iter().map(|&x| morse.value(x).unwrap()).collect();
            let spline = CubicSpline::new(xs, ys).unwrap();
            // measure in the interior; the natural boundary condition costs
            // accuracy in the first/last few intervals
            let mut err: f64 = 0.0;
            let samples = 2000;
            for i in 0..samples {
                let x = 6.0 + (12.0 - 6.0) * i as f64 / (samples - 1) as f64;
                err = err.max((spline.eval(x).unwrap() - morse.value(x).unwrap()).abs());
            }
            err
        };
        let coarse = max_err(41);
        let fine = max_err(81);
        let ratio = coarse / fine;
        assert!(
            (8.0..45.0).contains(&ratio),
            "expected ~16x error drop on halving, got {ratio} ({coarse:e} -> {fine:e})"
        );
    }
}
