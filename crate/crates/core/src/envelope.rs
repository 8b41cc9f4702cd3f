//! Envelope estimators: pointwise-tightest lower/upper bounds on any function
//! consistent with the data and hypotheses, their midpoint estimate, and
//! worst-case L_q errors.
//!
//! The lower envelope is the max over samples of cones `(y_k - eps) -
//! gamma*||u - u_k||`, the upper envelope the min of `(y_k + eps) +
//! gamma*||u - u_k||`; any feasible function lies between them.

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{euclidean, BoundingBox, Dataset, NormQ, NormSpec, SmHypotheses};
use crate::error::{Error, Result};
use crate::falsification::{falsify, Verdict};
use crate::grid::{Grid, GridLayout};

/// Grid sizes below this are evaluated serially.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Lower/central/upper estimate at one input point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lower: f64,
    pub central: f64,
    pub upper: f64,
}

/// Guaranteed interval for the unknown function value at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uncertainty {
    pub lower: f64,
    pub upper: f64,
}

impl Uncertainty {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// True when the cones cross (possible only on falsified hypotheses).
    pub fn is_crossed(&self) -> bool {
        self.upper < self.lower
    }
}

/// Worst-case error of the central estimate in one L_q norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub q: NormQ,
    pub value: f64,
    pub grid_resolution: usize,
    /// Grid point attaining the maximum band width (q = inf only).
    pub argmax_point: Option<Vec<f64>>,
}

/// A dataset bound to unfalsified (or explicitly forced) SM hypotheses.
#[derive(Debug, Clone)]
pub struct Envelope {
    data: Dataset,
    hyp: SmHypotheses,
    verdict: Verdict,
    forced: bool,
}

impl Envelope {
    /// Builds an envelope after checking the hypotheses against the data.
    pub fn new(data: Dataset, hyp: SmHypotheses) -> Result<Self> {
        let verdict = falsify(&data, hyp);
        if verdict.falsified {
            return Err(Error::Falsified(verdict));
        }
        Ok(Self {
            data,
            hyp,
            verdict,
            forced: false,
        })
    }

    /// Builds an envelope even when the hypotheses are falsified. Pointwise
    /// intervals may then cross; see [`Uncertainty::is_crossed`].
    pub fn forced(data: Dataset, hyp: SmHypotheses) -> Self {
        let verdict = falsify(&data, hyp);
        Self {
            data,
            hyp,
            verdict,
            forced: true,
        }
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn hypotheses(&self) -> SmHypotheses {
        self.hyp
    }

    pub fn bounds(&self) -> &BoundingBox {
        self.data.bounding_box()
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    /// True when constructed via [`Envelope::forced`] on falsified hypotheses.
    pub fn is_flagged(&self) -> bool {
        self.forced && self.verdict.falsified
    }

    fn check_dim(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.data.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.data.input_dim(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Evaluates both envelopes and their midpoint at `u`. The point may lie
    /// outside the bounding box; the cone formulas remain defined.
    pub fn evaluate(&self, u: &[f64]) -> Result<Band> {
        self.check_dim(u)?;
        Ok(self.evaluate_unchecked(u))
    }

    pub(crate) fn evaluate_unchecked(&self, u: &[f64]) -> Band {
        let gamma = self.hyp.gamma();
        let eps = self.hyp.epsilon();
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for s in self.data.samples() {
            let d = euclidean(u, s.input());
            lower = lower.max(s.output() - eps - gamma * d);
            upper = upper.min(s.output() + eps + gamma * d);
        }
        Band {
            lower,
            central: (lower + upper) / 2.0,
            upper,
        }
    }

    /// Upper envelope value at `u` (no dimension check).
    pub(crate) fn upper_at(&self, u: &[f64]) -> f64 {
        self.evaluate_unchecked(u).upper
    }

    /// Guaranteed interval for the unknown function at `u`.
    pub fn pointwise_uncertainty(&self, u: &[f64]) -> Result<Uncertainty> {
        let band = self.evaluate(u)?;
        Ok(Uncertainty {
            lower: band.lower,
            upper: band.upper,
        })
    }

    /// Band width `upper - lower` at `u` (negative iff crossed).
    fn width_at(&self, u: &[f64]) -> f64 {
        let band = self.evaluate_unchecked(u);
        band.upper - band.lower
    }

    /// Worst-case error of the central estimate: half the L_q norm of the
    /// band width over the bounding box, approximated on a uniform grid.
    pub fn band_error(&self, spec: NormSpec) -> Result<ErrorReport> {
        let bounds = self.bounds().clone();
        let active = bounds.nondegenerate_dims().len();
        if active > 4 {
            log::warn!(
                "L_q norm over {active} nondegenerate dimensions: grid size grows as resolution^{active}"
            );
        }
        match spec.q {
            NormQ::Inf => {
                let grid = Grid::new(&bounds, spec.grid_resolution, GridLayout::Endpoints)?;
                let widths = self.widths_on(&grid);
                let (idx, max) = argmax_abs(&widths).expect("grid is nonempty");
                Ok(ErrorReport {
                    q: spec.q,
                    value: max / 2.0,
                    grid_resolution: spec.grid_resolution,
                    argmax_point: Some(grid.point(idx)),
                })
            }
            NormQ::One | NormQ::Two => {
                if active == 0 {
                    return Err(Error::DegenerateDomain);
                }
                if active > 6 {
                    return Err(Error::TooManyDimensions { dims: active });
                }
                let grid = Grid::new(&bounds, spec.grid_resolution, GridLayout::Midpoints)?;
                let widths = self.widths_on(&grid);
                let norm = lq_function_norm(&widths, &grid, spec.q)?;
                Ok(ErrorReport {
                    q: spec.q,
                    value: norm / 2.0,
                    grid_resolution: spec.grid_resolution,
                    argmax_point: None,
                })
            }
        }
    }

    fn widths_on(&self, grid: &Grid) -> Vec<f64> {
        if grid.len() >= PARALLEL_THRESHOLD {
            (0..grid.len())
                .into_par_iter()
                .map(|i| self.width_at(&grid.point(i)))
                .collect()
        } else {
            (0..grid.len()).map(|i| self.width_at(&grid.point(i))).collect()
        }
    }
}

/// Index and value of the largest |v|, scanning in order (first max wins).
fn argmax_abs(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        let a = v.abs();
        if best.map(|(_, m)| a > m).unwrap_or(true) {
            best = Some((i, a));
        }
    }
    best
}

/// L_q norm of a scalar field sampled on a grid: the grid maximum of |v| for
/// q = inf, composite midpoint quadrature of |v|^q followed by the q-th root
/// for q in {1, 2}.
pub fn lq_function_norm(values: &[f64], grid: &Grid, q: NormQ) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("grid values"));
    }
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    match q {
        NormQ::Inf => Ok(argmax_abs(values).expect("nonempty").1),
        NormQ::One | NormQ::Two => {
            if grid.active_dims() == 0 {
                return Err(Error::DegenerateDomain);
            }
            let vol = grid.cell_volume();
            match q {
                NormQ::One => Ok(values.iter().map(|v| v.abs() * vol).sum()),
                NormQ::Two => {
                    let sum: f64 = values.iter().map(|v| v * v * vol).sum();
                    Ok(sum.sqrt())
                }
                NormQ::Inf => unreachable!(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DEFAULT_GRID_RESOLUTION;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn envelope(rows: &[(f64, f64)], gamma: f64, eps: f64) -> Envelope {
        Envelope::forced(
            Dataset::from_scalar_rows(rows).unwrap(),
            SmHypotheses::new(gamma, eps).unwrap(),
        )
    }

    #[test]
    fn single_cone_evaluation() {
        let e = envelope(&[(0.0, 0.0)], 2.0, 1.0);
        let b = e.evaluate(&[0.5]).unwrap();
        assert_eq!(b.lower, -2.0);
        assert_eq!(b.central, 0.0);
        assert_eq!(b.upper, 2.0);
    }

    #[test]
    fn two_point_evaluation() {
        // Enumerated by hand over both cone terms:
        //   lower(0.5) = max(0-0.1-2*0.5, 1-0.1-2*0.5) = -0.1
        //   upper(0.5) = min(0+0.1+2*0.5, 1+0.1+2*0.5) = 1.1
        let e = envelope(&[(0.0, 0.0), (1.0, 1.0)], 2.0, 0.1);
        let b = e.evaluate(&[0.5]).unwrap();
        assert_abs_diff_eq!(b.lower, -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(b.central, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b.upper, 1.1, epsilon = 1e-15);
    }

    #[test]
    fn zero_hypotheses_collapse_band() {
        let e = envelope(&[(0.0, 0.0)], 0.0, 0.0);
        let b = e.evaluate(&[7.0]).unwrap();
        assert_eq!((b.lower, b.central, b.upper), (0.0, 0.0, 0.0));
    }

    #[test]
    fn uncertainty_at_data_point_is_noise_band() {
        let e = envelope(&[(0.0, 0.0)], 2.0, 1.0);
        let u = e.pointwise_uncertainty(&[0.0]).unwrap();
        assert_eq!((u.lower, u.upper), (-1.0, 1.0));
        assert!(!u.is_crossed());
    }

    #[test]
    fn crossed_interval_on_falsified_data_is_flagged() {
        // Duplicate inputs disagreeing by 3 > 2*eps: cones cross at u = 0.
        let e = envelope(&[(0.0, 0.0), (0.0, 3.0)], 1.0, 1.0);
        assert!(e.is_flagged());
        let u = e.pointwise_uncertainty(&[0.0]).unwrap();
        assert_eq!(u.lower, 2.0);
        assert_eq!(u.upper, 1.0);
        assert!(u.is_crossed());
        assert_eq!(u.width(), -1.0);
    }

    #[test]
    fn construction_rejects_falsified_hypotheses() {
        let data = Dataset::from_scalar_rows(&[(0.0, 0.0), (0.0, 3.0)]).unwrap();
        let hyp = SmHypotheses::new(1.0, 1.0).unwrap();
        assert!(matches!(
            Envelope::new(data, hyp).unwrap_err(),
            Error::Falsified(_)
        ));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let e = envelope(&[(0.0, 0.0)], 1.0, 0.0);
        assert!(matches!(
            e.evaluate(&[0.0, 1.0]).unwrap_err(),
            Error::DimensionMismatch { expected: 1, got: 2 }
        ));
    }

    #[test]
    fn band_error_on_degenerate_box_inf() {
        let e = envelope(&[(0.0, 0.0)], 2.0, 1.0);
        let r = e
            .band_error(NormSpec::with_default_resolution(NormQ::Inf))
            .unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.argmax_point.as_deref(), Some(&[0.0][..]));
    }

    #[test]
    fn band_error_plateau_case() {
        // Width plateaus at 1.2 on [0.25, 0.75].
        let e = envelope(&[(0.0, 0.0), (1.0, 1.0)], 2.0, 0.1);
        let r = e
            .band_error(NormSpec::with_default_resolution(NormQ::Inf))
            .unwrap();
        assert_abs_diff_eq!(r.value, 0.6, epsilon = 1e-12);
        let p = r.argmax_point.unwrap();
        assert!(p[0] >= 0.25 - 1e-12 && p[0] <= 0.75 + 1e-12);
    }

    #[test]
    fn band_error_constant_band_l2() {
        let e = envelope(&[(0.0, 0.0), (1.0, 0.0)], 0.0, 0.5);
        let r = e
            .band_error(NormSpec::with_default_resolution(NormQ::Two))
            .unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
        assert!(r.argmax_point.is_none());
    }

    #[test]
    fn band_error_refuses_integral_norms_on_point_box() {
        let e = envelope(&[(0.0, 0.0)], 1.0, 0.1);
        assert!(matches!(
            e.band_error(NormSpec::with_default_resolution(NormQ::One))
                .unwrap_err(),
            Error::DegenerateDomain
        ));
    }

    #[test]
    fn lq_norm_constant_fields() {
        let b = BoundingBox::new(vec![0.0], vec![1.0]).unwrap();
        let g = Grid::new(&b, 64, GridLayout::Midpoints).unwrap();
        let ones = vec![1.0; g.len()];
        assert_abs_diff_eq!(lq_function_norm(&ones, &g, NormQ::Two).unwrap(), 1.0, epsilon = 1e-14);
        let neg = vec![-3.0; g.len()];
        assert_eq!(lq_function_norm(&neg, &g, NormQ::Inf).unwrap(), 3.0);
    }

    #[test]
    fn lq_norm_linear_field_midpoint_quadrature() {
        // Midpoint quadrature integrates u on [0,1] exactly: 0.5.
        let b = BoundingBox::new(vec![0.0], vec![1.0]).unwrap();
        let g = Grid::new(&b, 100, GridLayout::Midpoints).unwrap();
        let vals: Vec<f64> = g.iter().map(|p| p[0]).collect();
        assert_abs_diff_eq!(lq_function_norm(&vals, &g, NormQ::One).unwrap(), 0.5, epsilon = 1e-13);
    }

    #[test]
    fn lq_norm_rejects_empty_and_mismatched() {
        let b = BoundingBox::new(vec![0.0], vec![1.0]).unwrap();
        let g = Grid::new(&b, 4, GridLayout::Midpoints).unwrap();
        assert!(lq_function_norm(&[], &g, NormQ::One).is_err());
        assert!(lq_function_norm(&[1.0], &g, NormQ::One).is_err());
    }

    #[test]
    fn default_resolution_matches_contract() {
        assert_eq!(DEFAULT_GRID_RESOLUTION, 201);
    }

    proptest! {
        // Central estimate is the exact midpoint of the envelopes.
        #[test]
        fn central_identity(
            rows in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
            gamma in 0.0f64..5.0,
            eps in 0.0f64..2.0,
            x in -12.0f64..12.0,
        ) {
            let e = envelope(&rows, gamma, eps);
            let b = e.evaluate(&[x]).unwrap();
            prop_assert_eq!(b.central, (b.lower + b.upper) / 2.0);
        }

        // Each envelope is gamma-Lipschitz.
        #[test]
        fn envelope_lipschitz(
            rows in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
            gamma in 0.0f64..5.0,
            eps in 0.0f64..2.0,
            x in -10.0f64..10.0,
            y in -10.0f64..10.0,
        ) {
            let e = envelope(&rows, gamma, eps);
            let bx = e.evaluate(&[x]).unwrap();
            let by = e.evaluate(&[y]).unwrap();
            let lim = gamma * (x - y).abs() + 1e-9;
            prop_assert!((bx.lower - by.lower).abs() <= lim);
            prop_assert!((bx.upper - by.upper).abs() <= lim);
        }

        // Pointwise monotonicity of the envelopes in gamma and epsilon.
        #[test]
        fn envelope_monotone_in_hypotheses(
            rows in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
            gamma in 0.0f64..5.0,
            eps in 0.0f64..2.0,
            dg in 0.0f64..3.0,
            de in 0.0f64..1.0,
            x in -12.0f64..12.0,
        ) {
            let small = envelope(&rows, gamma, eps);
            let big = envelope(&rows, gamma + dg, eps + de);
            let bs = small.evaluate(&[x]).unwrap();
            let bb = big.evaluate(&[x]).unwrap();
            prop_assert!(bb.upper >= bs.upper - 1e-12);
            prop_assert!(bb.lower <= bs.lower + 1e-12);
        }

        // At every data point the envelopes respect the noise band when the
        // hypotheses are unfalsified.
        #[test]
        fn interpolation_consistency(
            rows in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
            gamma in 0.0f64..5.0,
            eps in 0.0f64..2.0,
        ) {
            let data = Dataset::from_scalar_rows(&rows).unwrap();
            let hyp = SmHypotheses::new(gamma, eps).unwrap();
            if let Ok(e) = Envelope::new(data, hyp) {
                for s in e.data().samples() {
                    let b = e.evaluate(s.input()).unwrap();
                    prop_assert!(b.lower <= s.output() + eps + 1e-12);
                    prop_assert!(b.upper >= s.output() - eps - 1e-12);
                }
            }
        }
    }
}
