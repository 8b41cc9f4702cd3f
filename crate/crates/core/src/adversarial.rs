//! Adversarial interpolants: continuous functions that pass through every
//! data point exactly yet take an arbitrary value at one chosen input,
//! demonstrating that data alone cannot bound prediction error.

use serde::Serialize;

use crate::data::{euclidean, Dataset, NormQ};
use crate::envelope::lq_function_norm;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridLayout};

/// Plain continuous interpolant of a dataset: piecewise linear through the
/// sorted nodes in one dimension, inverse-distance weighting otherwise.
/// Outside the node hull the 1-D rule extends as a constant.
#[derive(Debug, Clone)]
pub struct DataInterpolant {
    rule: Rule,
    dim: usize,
}

#[derive(Debug, Clone)]
enum Rule {
    PiecewiseLinear { nodes: Vec<(f64, f64)> },
    Shepard { nodes: Vec<(Vec<f64>, f64)> },
}

impl DataInterpolant {
    pub fn new(data: &Dataset) -> Result<Self> {
        let points: Vec<(Vec<f64>, f64)> = data
            .samples()
            .iter()
            .map(|s| (s.input().to_vec(), s.output()))
            .collect();
        Self::from_points(points, data.input_dim())
    }

    fn from_points(points: Vec<(Vec<f64>, f64)>, dim: usize) -> Result<Self> {
        // Exact duplicate inputs with conflicting outputs admit no function.
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i].0 == points[j].0 && points[i].1 != points[j].1 {
                    return Err(Error::InvalidParameter(format!(
                        "samples {i} and {j} share an input but disagree in output; no interpolant exists"
                    )));
                }
            }
        }
        let rule = if dim == 1 {
            let mut nodes: Vec<(f64, f64)> = points.into_iter().map(|(u, y)| (u[0], y)).collect();
            nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
            nodes.dedup_by(|a, b| a.0 == b.0);
            Rule::PiecewiseLinear { nodes }
        } else {
            let mut nodes = points;
            nodes.dedup_by(|a, b| a.0 == b.0);
            Rule::Shepard { nodes }
        };
        Ok(Self { rule, dim })
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        Ok(self.evaluate_unchecked(u))
    }

    fn evaluate_unchecked(&self, u: &[f64]) -> f64 {
        match &self.rule {
            Rule::PiecewiseLinear { nodes } => {
                let x = u[0];
                match nodes.binary_search_by(|n| n.0.total_cmp(&x)) {
                    Ok(i) => nodes[i].1,
                    Err(0) => nodes[0].1,
                    Err(i) if i == nodes.len() => nodes[nodes.len() - 1].1,
                    Err(i) => {
                        let (x0, y0) = nodes[i - 1];
                        let (x1, y1) = nodes[i];
                        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                    }
                }
            }
            Rule::Shepard { nodes } => {
                let mut num = 0.0;
                let mut den = 0.0;
                for (node, y) in nodes {
                    let d2: f64 = node.iter().zip(u).map(|(&c, &x)| (x - c) * (x - c)).sum();
                    if d2 < 1e-300 {
                        return *y;
                    }
                    let w = 1.0 / (d2 * d2);
                    num += w * y;
                    den += w;
                }
                num / den
            }
        }
    }
}

/// A continuous function through all data nodes with value `b` at the spike
/// point. One input dimension inserts the spike as a piecewise-linear node;
/// higher dimensions add a compactly supported hat bump to the plain
/// interpolant, with radius half the distance to the nearest node.
#[derive(Debug, Clone)]
pub struct AdversarialInterpolant {
    base: DataInterpolant,
    spike_point: Vec<f64>,
    spike_value: f64,
    /// Hat-bump support radius (multi-dimensional rule only).
    bump_radius: f64,
    bump_height: f64,
    dim: usize,
}

pub fn adversarial_interpolant(
    data: &Dataset,
    u_spike: &[f64],
    b: f64,
) -> Result<AdversarialInterpolant> {
    if u_spike.len() != data.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: data.input_dim(),
            got: u_spike.len(),
        });
    }
    if !b.is_finite() || u_spike.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            context: "adversarial spike".into(),
        });
    }
    let scale = data
        .bounding_box()
        .diameter()
        .max(u_spike.iter().fold(0.0f64, |a, x| a.max(x.abs())))
        .max(1.0);
    let mut nearest = f64::INFINITY;
    for (k, s) in data.samples().iter().enumerate() {
        let d = euclidean(s.input(), u_spike);
        if d <= 1e-12 * scale {
            return Err(Error::SpikeAtNode { index: k });
        }
        nearest = nearest.min(d);
    }

    let dim = data.input_dim();
    if dim == 1 {
        let mut points: Vec<(Vec<f64>, f64)> = data
            .samples()
            .iter()
            .map(|s| (s.input().to_vec(), s.output()))
            .collect();
        points.push((u_spike.to_vec(), b));
        let base = DataInterpolant::from_points(points, 1)?;
        Ok(AdversarialInterpolant {
            base,
            spike_point: u_spike.to_vec(),
            spike_value: b,
            bump_radius: 0.0,
            bump_height: 0.0,
            dim,
        })
    } else {
        let base = DataInterpolant::new(data)?;
        let bump_radius = nearest / 2.0;
        let bump_height = b - base.evaluate_unchecked(u_spike);
        Ok(AdversarialInterpolant {
            base,
            spike_point: u_spike.to_vec(),
            spike_value: b,
            bump_radius,
            bump_height,
            dim,
        })
    }
}

impl AdversarialInterpolant {
    pub fn spike_point(&self) -> &[f64] {
        &self.spike_point
    }

    pub fn spike_value(&self) -> f64 {
        self.spike_value
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        let mut v = self.base.evaluate_unchecked(u);
        if self.dim > 1 {
            let d = euclidean(u, &self.spike_point);
            if d < self.bump_radius {
                v += self.bump_height * (1.0 - d / self.bump_radius);
            }
        }
        Ok(v)
    }
}

/// One spike magnitude's worth of evidence.
#[derive(Debug, Clone, Serialize)]
pub struct UnreliabilityRow {
    pub b: f64,
    /// |f_I^b(spike) - estimate(spike)|.
    pub gap_at_spike: f64,
    /// Sup of |f_I^b - estimate| over the grid plus the spike point.
    pub grid_linf: f64,
    /// Grid L1/L2 norms of the difference; absent on a zero-volume box.
    pub grid_l1: Option<f64>,
    pub grid_l2: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnreliabilityReport {
    pub spike_point: Vec<f64>,
    pub estimate_at_spike: f64,
    pub grid_resolution: usize,
    pub rows: Vec<UnreliabilityRow>,
}

/// For each spike magnitude, builds the adversarial interpolant and reports
/// how far it sits from the given estimate, at the spike and in grid norms
/// over the data box. The gaps grow without bound in `b`.
pub fn demonstrate_unreliability(
    data: &Dataset,
    estimate: &dyn Fn(&[f64]) -> f64,
    u_spike: &[f64],
    b_values: &[f64],
    grid_resolution: usize,
) -> Result<UnreliabilityReport> {
    if b_values.is_empty() {
        return Err(Error::EmptyInput("spike magnitudes"));
    }
    if b_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "spike magnitudes must be sorted ascending".into(),
        ));
    }

    let bounds = data.bounding_box();
    let has_volume = !bounds.nondegenerate_dims().is_empty();
    let sup_grid = Grid::new(bounds, grid_resolution, GridLayout::Endpoints)?;
    let mid_grid = Grid::new(bounds, grid_resolution, GridLayout::Midpoints)?;
    let estimate_at_spike = estimate(u_spike);

    let mut rows = Vec::with_capacity(b_values.len());
    for &b in b_values {
        let f = adversarial_interpolant(data, u_spike, b)?;
        let gap_at_spike = (f.evaluate(u_spike)? - estimate_at_spike).abs();

        let mut grid_linf = gap_at_spike;
        for pt in sup_grid.iter() {
            grid_linf = grid_linf.max((f.evaluate(&pt)? - estimate(&pt)).abs());
        }
        let (grid_l1, grid_l2) = if has_volume {
            let diffs: Vec<f64> = mid_grid
                .iter()
                .map(|pt| f.evaluate(&pt).map(|v| v - estimate(&pt)))
                .collect::<Result<_>>()?;
            (
                Some(lq_function_norm(&diffs, &mid_grid, NormQ::One)?),
                Some(lq_function_norm(&diffs, &mid_grid, NormQ::Two)?),
            )
        } else {
            (None, None)
        };
        rows.push(UnreliabilityRow {
            b,
            gap_at_spike,
            grid_linf,
            grid_l1,
            grid_l2,
        });
    }
    Ok(UnreliabilityReport {
        spike_point: u_spike.to_vec(),
        estimate_at_spike,
        grid_resolution,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scalar(rows: &[(f64, f64)]) -> Dataset {
        Dataset::from_scalar_rows(rows).unwrap()
    }

    #[test]
    fn spike_between_nodes_piecewise_linear() {
        let d = scalar(&[(0.0, 0.0), (1.0, 1.0)]);
        let f = adversarial_interpolant(&d, &[0.5], 100.0).unwrap();
        assert_eq!(f.evaluate(&[0.0]).unwrap(), 0.0);
        assert_eq!(f.evaluate(&[0.5]).unwrap(), 100.0);
        assert_eq!(f.evaluate(&[1.0]).unwrap(), 1.0);
        // Linear between node and spike.
        assert_abs_diff_eq!(f.evaluate(&[0.25]).unwrap(), 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.evaluate(&[0.75]).unwrap(), 50.5, epsilon = 1e-12);
    }

    #[test]
    fn consistent_spike_recovers_plain_interpolant() {
        let d = scalar(&[(0.0, 0.0), (1.0, 1.0)]);
        let f = adversarial_interpolant(&d, &[0.5], 0.5).unwrap();
        let plain = DataInterpolant::new(&d).unwrap();
        for x in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert_abs_diff_eq!(
                f.evaluate(&[x]).unwrap(),
                plain.evaluate(&[x]).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn spike_at_node_is_rejected() {
        let d = scalar(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(matches!(
            adversarial_interpolant(&d, &[1.0], 5.0).unwrap_err(),
            Error::SpikeAtNode { index: 1 }
        ));
    }

    #[test]
    fn multidim_bump_preserves_nodes_and_hits_spike() {
        let d = Dataset::from_rows(&[
            (vec![0.0, 0.0], 1.0),
            (vec![1.0, 0.0], 2.0),
            (vec![0.0, 1.0], 3.0),
        ])
        .unwrap();
        let spike = [0.5, 0.5];
        let f = adversarial_interpolant(&d, &spike, 500.0).unwrap();
        for s in d.samples() {
            assert_abs_diff_eq!(f.evaluate(s.input()).unwrap(), s.output(), epsilon = 1e-9);
        }
        assert_abs_diff_eq!(f.evaluate(&spike).unwrap(), 500.0, epsilon = 1e-9);
        // Outside the bump support the plain interpolant shows through.
        let far = [0.0, 0.9];
        let plain = DataInterpolant::new(&d).unwrap();
        assert_abs_diff_eq!(
            f.evaluate(&far).unwrap(),
            plain.evaluate(&far).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn report_gaps_grow_without_bound() {
        let d = scalar(&[(0.0, 0.0), (1.0, 1.0)]);
        let plain = DataInterpolant::new(&d).unwrap();
        let estimate = move |u: &[f64]| plain.evaluate(u).unwrap();
        let bs: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
        let report = demonstrate_unreliability(&d, &estimate, &[0.5], &bs, 501).unwrap();
        assert_eq!(report.rows.len(), 6);
        for (row, &b) in report.rows.iter().zip(&bs) {
            assert!(row.gap_at_spike >= b - 1.0);
            assert!(row.grid_linf >= row.gap_at_spike);
        }
        for w in report.rows.windows(2) {
            assert!(w[1].gap_at_spike > w[0].gap_at_spike);
            assert!(w[1].grid_l1.unwrap() > w[0].grid_l1.unwrap());
            assert!(w[1].grid_l2.unwrap() > w[0].grid_l2.unwrap());
        }
    }

    #[test]
    fn report_single_b_and_validation() {
        let d = scalar(&[(0.0, 0.0), (1.0, 1.0)]);
        let estimate = |_: &[f64]| 0.0;
        let report = demonstrate_unreliability(&d, &estimate, &[0.5], &[10.0], 101).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(demonstrate_unreliability(&d, &estimate, &[0.5], &[], 101).is_err());
        assert!(demonstrate_unreliability(&d, &estimate, &[0.5], &[10.0, 1.0], 101).is_err());
    }

    #[test]
    fn degenerate_box_skips_integral_norms() {
        let d = scalar(&[(0.0, 0.0)]);
        let estimate = |_: &[f64]| 0.0;
        let report = demonstrate_unreliability(&d, &estimate, &[0.5], &[10.0], 101).unwrap();
        assert!(report.rows[0].grid_l1.is_none());
        assert!(report.rows[0].grid_l2.is_none());
        assert!(report.rows[0].gap_at_spike >= 10.0 - 1e-12);
    }

    #[test]
    fn conflicting_duplicate_inputs_admit_no_interpolant() {
        let d = scalar(&[(0.0, 0.0), (0.0, 3.0)]);
        assert!(DataInterpolant::new(&d).is_err());
    }
}
