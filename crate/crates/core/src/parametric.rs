//! Linear-in-parameters model families, least-squares and exact minimax
//! fitting, parametric-hypothesis falsification against a disturbance
//! confidence bound, and the feasibility certificate that caps the fitted
//! model's worst-case error at twice the optimal estimator's.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::{Dataset, SmHypotheses};
use crate::error::{Error, Result};
use crate::falsification::{Verdict, Witness};
use crate::grid::{Grid, GridLayout};
use crate::linprog::{LinearProgram, LpOutcome};

/// Grid density per dimension for gradient-constraint checks.
pub const GRADIENT_GRID_RESOLUTION: usize = 101;

/// SVD cutoff for rank decisions in least-squares solves.
const SVD_EPS: f64 = 1e-12;

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// One user-supplied basis function, optionally with an analytic gradient.
/// Missing gradients fall back to central finite differences.
#[derive(Clone)]
pub struct CustomBasisFn {
    pub name: String,
    pub f: ScalarFn,
    pub grad: Option<GradientFn>,
}

#[derive(Clone)]
enum BasisKind {
    /// Multivariate monomials of total degree <= `degree`, graded-lex order.
    Polynomial { exponents: Vec<Vec<usize>> },
    /// Gaussian bumps exp(-||u - c||^2 / width^2).
    Radial { centers: Vec<Vec<f64>>, width: f64 },
    Custom { functions: Vec<CustomBasisFn> },
}

/// A linear-in-parameters function family f_p(u) = sum_i p_i * basis_i(u).
#[derive(Clone)]
pub struct BasisFamily {
    kind: BasisKind,
    input_dim: usize,
}

impl std::fmt::Debug for BasisFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BasisFamily({}, n_p={})", self.describe(), self.n_params())
    }
}

fn monomial_exponents(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=degree {
        let mut stack = vec![(Vec::new(), total)];
        while let Some((prefix, rest)) = stack.pop() {
            if prefix.len() == dim - 1 {
                let mut e = prefix;
                e.push(rest);
                out.push(e);
            } else {
                // LIFO stack: push ascending so higher leading powers pop first.
                for v in 0..=rest {
                    let mut e = prefix.clone();
                    e.push(v);
                    stack.push((e, rest - v));
                }
            }
        }
    }
    out
}

impl BasisFamily {
    /// Monomials of total degree up to `degree` in `input_dim` variables.
    pub fn polynomial(input_dim: usize, degree: usize) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidParameter("input_dim must be >= 1".into()));
        }
        Ok(Self {
            kind: BasisKind::Polynomial {
                exponents: monomial_exponents(input_dim, degree),
            },
            input_dim,
        })
    }

    /// Gaussian radial bumps at the given centers with a shared width.
    pub fn radial(centers: Vec<Vec<f64>>, width: f64) -> Result<Self> {
        let Some(first) = centers.first() else {
            return Err(Error::EmptyInput("radial centers"));
        };
        let input_dim = first.len();
        if input_dim == 0 {
            return Err(Error::EmptyInput("radial center coordinates"));
        }
        if centers.iter().any(|c| c.len() != input_dim) {
            return Err(Error::DimensionMismatch {
                expected: input_dim,
                got: centers.iter().find(|c| c.len() != input_dim).unwrap().len(),
            });
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radial width must be positive, got {width}"
            )));
        }
        Ok(Self {
            kind: BasisKind::Radial { centers, width },
            input_dim,
        })
    }

    pub fn custom(input_dim: usize, functions: Vec<CustomBasisFn>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::EmptyInput("custom basis functions"));
        }
        if input_dim == 0 {
            return Err(Error::InvalidParameter("input_dim must be >= 1".into()));
        }
        Ok(Self {
            kind: BasisKind::Custom { functions },
            input_dim,
        })
    }

    pub fn n_params(&self) -> usize {
        match &self.kind {
            BasisKind::Polynomial { exponents } => exponents.len(),
            BasisKind::Radial { centers, .. } => centers.len(),
            BasisKind::Custom { functions } => functions.len(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            BasisKind::Polynomial { exponents } => {
                let degree = exponents.iter().map(|e| e.iter().sum::<usize>()).max().unwrap_or(0);
                format!("poly:{degree}")
            }
            BasisKind::Radial { centers, width } => {
                format!("radial:{}:{width}", centers.len())
            }
            BasisKind::Custom { functions } => {
                let names: Vec<&str> = functions.iter().map(|f| f.name.as_str()).collect();
                format!("custom:[{}]", names.join(","))
            }
        }
    }

    pub fn eval(&self, i: usize, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.input_dim);
        match &self.kind {
            BasisKind::Polynomial { exponents } => exponents[i]
                .iter()
                .zip(u)
                .map(|(&e, &x)| x.powi(e as i32))
                .product(),
            BasisKind::Radial { centers, width } => {
                let d2: f64 = centers[i]
                    .iter()
                    .zip(u)
                    .map(|(&c, &x)| (x - c) * (x - c))
                    .sum();
                (-d2 / (width * width)).exp()
            }
            BasisKind::Custom { functions } => (functions[i].f)(u),
        }
    }

    pub fn gradient(&self, i: usize, u: &[f64]) -> Vec<f64> {
        match &self.kind {
            BasisKind::Polynomial { exponents } => {
                let e = &exponents[i];
                (0..u.len())
                    .map(|d| {
                        if e[d] == 0 {
                            return 0.0;
                        }
                        let mut g = e[d] as f64 * u[d].powi(e[d] as i32 - 1);
                        for (dd, (&ed, &x)) in e.iter().zip(u).enumerate() {
                            if dd != d {
                                g *= x.powi(ed as i32);
                            }
                        }
                        g
                    })
                    .collect()
            }
            BasisKind::Radial { centers, width } => {
                let v = self.eval(i, u);
                let w2 = width * width;
                centers[i]
                    .iter()
                    .zip(u)
                    .map(|(&c, &x)| -2.0 * (x - c) / w2 * v)
                    .collect()
            }
            BasisKind::Custom { functions } => match &functions[i].grad {
                Some(g) => g(u),
                None => central_difference(&functions[i].f, u),
            },
        }
    }

    /// Row-per-sample design matrix.
    pub fn design_matrix(&self, data: &Dataset) -> Result<DMatrix<f64>> {
        if data.input_dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: data.input_dim(),
            });
        }
        let m = data.len();
        let n = self.n_params();
        let mut b = DMatrix::zeros(m, n);
        for (k, s) in data.samples().iter().enumerate() {
            for i in 0..n {
                let v = self.eval(i, s.input());
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        context: format!("basis function {i} at sample {k}"),
                    });
                }
                b[(k, i)] = v;
            }
        }
        Ok(b)
    }
}

fn central_difference(f: &ScalarFn, u: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; u.len()];
    let mut probe = u.to_vec();
    for d in 0..u.len() {
        let h = 1e-6 * u[d].abs().max(1.0);
        probe[d] = u[d] + h;
        let hi = f(&probe);
        probe[d] = u[d] - h;
        let lo = f(&probe);
        probe[d] = u[d];
        g[d] = (hi - lo) / (2.0 * h);
    }
    g
}

/// Which cost the fit minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    /// Sum of squared residuals.
    LeastSquares,
    /// Maximum absolute residual.
    Minimax,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitDiagnostics {
    pub cost: CostKind,
    /// Value of the minimized cost at the fitted parameters.
    pub j_value: f64,
    /// Per-sample residuals y_k - f(u_k), in dataset order.
    pub residuals: Vec<f64>,
    pub warnings: Vec<String>,
}

/// A fitted linear-in-parameters model.
#[derive(Debug, Clone)]
pub struct ParametricModel {
    basis: BasisFamily,
    params: Vec<f64>,
    diagnostics: FitDiagnostics,
}

impl ParametricModel {
    pub fn basis(&self) -> &BasisFamily {
        &self.basis
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn diagnostics(&self) -> &FitDiagnostics {
        &self.diagnostics
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.basis.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.input_dim(),
                got: u.len(),
            });
        }
        Ok(self.evaluate_unchecked(u))
    }

    pub(crate) fn evaluate_unchecked(&self, u: &[f64]) -> f64 {
        (0..self.params.len())
            .map(|i| self.params[i] * self.basis.eval(i, u))
            .sum()
    }

    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.basis.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.input_dim(),
                got: u.len(),
            });
        }
        let mut g = vec![0.0; u.len()];
        for i in 0..self.params.len() {
            let gi = self.basis.gradient(i, u);
            for d in 0..u.len() {
                g[d] += self.params[i] * gi[d];
            }
        }
        Ok(g)
    }

    pub fn gradient_norm(&self, u: &[f64]) -> Result<f64> {
        Ok(self.gradient(u)?.iter().map(|g| g * g).sum::<f64>().sqrt())
    }

    /// Residuals of this model on a dataset, in sample order.
    pub fn residuals_on(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.input_dim() != self.basis.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.input_dim(),
                got: data.input_dim(),
            });
        }
        Ok(data
            .samples()
            .iter()
            .map(|s| s.output() - self.evaluate_unchecked(s.input()))
            .collect())
    }
}

fn zero_column_warnings(design: &DMatrix<f64>) -> Vec<String> {
    let mut warnings = Vec::new();
    for i in 0..design.ncols() {
        if design.column(i).iter().all(|&v| v == 0.0) {
            warnings.push(format!(
                "basis function {i} vanishes at every sample; minimum-norm solve leaves its coefficient at 0"
            ));
        }
    }
    warnings
}

/// Least-squares fit; rank-deficient systems take the minimum-norm solution.
pub fn fit_least_squares(data: &Dataset, basis: &BasisFamily) -> Result<ParametricModel> {
    let design = basis.design_matrix(data)?;
    let warnings = zero_column_warnings(&design);
    for w in &warnings {
        log::warn!("{w}");
    }
    let y = DVector::from_iterator(data.len(), data.samples().iter().map(|s| s.output()));
    let svd = design.clone().svd(true, true);
    let params = svd
        .solve(&y, SVD_EPS)
        .map_err(|e| Error::InvalidParameter(format!("svd solve failed: {e}")))?;
    let residuals: Vec<f64> = (&y - &design * &params).iter().copied().collect();
    let j_value = residuals.iter().map(|r| r * r).sum();
    Ok(ParametricModel {
        basis: basis.clone(),
        params: params.iter().copied().collect(),
        diagnostics: FitDiagnostics {
            cost: CostKind::LeastSquares,
            j_value,
            residuals,
            warnings,
        },
    })
}

/// Gradient-norm constraint for [`fit_linf`]: enforce ||grad f_p(u)||_2 <=
/// gamma at every listed point.
#[derive(Debug, Clone)]
pub struct GradBound {
    pub gamma: f64,
    pub points: Vec<Vec<f64>>,
}

impl GradBound {
    /// Constraint points on a uniform grid over the dataset's bounding box.
    pub fn on_grid(data: &Dataset, gamma: f64, resolution: usize) -> Result<Self> {
        let grid = Grid::new(data.bounding_box(), resolution, GridLayout::Endpoints)?;
        Ok(Self {
            gamma,
            points: grid.iter().collect(),
        })
    }
}

/// One linear inequality a'p <= rhs in parameter space.
struct Cut {
    coeffs: Vec<f64>,
    rhs: f64,
}

/// Solves min_p max_k |y_k - (design p)_k| subject to the cuts, via the LP
/// with split variables p = p+ - p- and the band variable t.
fn minimax_lp(design: &DMatrix<f64>, y: &[f64], cuts: &[Cut]) -> Result<(Vec<f64>, f64)> {
    let m = design.nrows();
    let n = design.ncols();
    let vars = 2 * n + 1;
    let mut objective = vec![0.0; vars];
    objective[2 * n] = 1.0;

    let mut rows = Vec::with_capacity(2 * m + cuts.len());
    let mut rhs = Vec::with_capacity(2 * m + cuts.len());
    for k in 0..m {
        let mut up = vec![0.0; vars];
        let mut dn = vec![0.0; vars];
        for i in 0..n {
            up[i] = design[(k, i)];
            up[n + i] = -design[(k, i)];
            dn[i] = -design[(k, i)];
            dn[n + i] = design[(k, i)];
        }
        up[2 * n] = -1.0;
        dn[2 * n] = -1.0;
        rows.push(up);
        rhs.push(y[k]);
        rows.push(dn);
        rhs.push(-y[k]);
    }
    for cut in cuts {
        let mut row = vec![0.0; vars];
        for i in 0..n {
            row[i] = cut.coeffs[i];
            row[n + i] = -cut.coeffs[i];
        }
        rows.push(row);
        rhs.push(cut.rhs);
    }

    match (LinearProgram { objective, rows, rhs }).solve() {
        LpOutcome::Optimal { x, objective } => {
            let p: Vec<f64> = (0..n).map(|i| x[i] - x[n + i]).collect();
            Ok((p, objective))
        }
        LpOutcome::Infeasible => Err(Error::Infeasible),
        LpOutcome::Unbounded => Err(Error::Unbounded),
    }
}

/// Replaces an LP vertex by the minimum-norm point of the optimal face when
/// that point stays feasible; resolves degenerate ties deterministically.
fn min_norm_polish(
    design: &DMatrix<f64>,
    y: &[f64],
    cuts: &[Cut],
    p_vertex: &[f64],
    t_star: f64,
) -> Vec<f64> {
    let m = design.nrows();
    let n = design.ncols();
    let atol = 1e-9 * t_star.abs().max(1.0);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for k in 0..m {
        let pred: f64 = (0..n).map(|i| design[(k, i)] * p_vertex[i]).sum();
        let r = y[k] - pred;
        if t_star <= atol {
            rows.push((0..n).map(|i| design[(k, i)]).collect());
            rhs.push(y[k]);
        } else if r.abs() >= t_star - atol {
            rows.push((0..n).map(|i| design[(k, i)]).collect());
            rhs.push(y[k] - r.signum() * t_star);
        }
    }
    for cut in cuts {
        let lhs: f64 = cut.coeffs.iter().zip(p_vertex).map(|(c, p)| c * p).sum();
        if (lhs - cut.rhs).abs() <= 1e-9 * cut.rhs.abs().max(1.0) {
            rows.push(cut.coeffs.clone());
            rhs.push(cut.rhs);
        }
    }
    if rows.is_empty() {
        return vec![0.0; n];
    }

    let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let Ok(p_mn) = a.svd(true, true).solve(&b, SVD_EPS) else {
        return p_vertex.to_vec();
    };

    // Switch only for a genuine tie-break: the candidate must stay feasible
    // at the optimum AND strictly reduce the parameter norm, otherwise the
    // exact LP vertex is kept.
    let norm_vertex: f64 = p_vertex.iter().map(|p| p * p).sum::<f64>().sqrt();
    let norm_mn: f64 = p_mn.iter().map(|p| p * p).sum::<f64>().sqrt();
    if norm_mn >= norm_vertex * (1.0 - 1e-12) {
        return p_vertex.to_vec();
    }
    let mut worst = 0.0f64;
    for k in 0..m {
        let pred: f64 = (0..n).map(|i| design[(k, i)] * p_mn[i]).sum();
        worst = worst.max((y[k] - pred).abs());
    }
    let cuts_ok = cuts.iter().all(|cut| {
        let lhs: f64 = cut.coeffs.iter().zip(p_mn.iter()).map(|(c, p)| c * p).sum();
        lhs <= cut.rhs + 1e-9 * cut.rhs.abs().max(1.0)
    });
    if worst <= t_star + atol && cuts_ok {
        p_mn.iter().copied().collect()
    } else {
        p_vertex.to_vec()
    }
}

/// Exact minimax fit: minimizes the maximum absolute residual, optionally
/// subject to a gradient-norm bound enforced at the constraint points.
///
/// In one input dimension the gradient bound is two linear inequalities per
/// point; in higher dimensions the Euclidean ball is handled by cutting
/// planes refined until the worst violation is within 1e-9 of the bound.
pub fn fit_linf(
    data: &Dataset,
    basis: &BasisFamily,
    grad_bound: Option<&GradBound>,
) -> Result<ParametricModel> {
    let design = basis.design_matrix(data)?;
    let mut warnings = zero_column_warnings(&design);
    for w in &warnings {
        log::warn!("{w}");
    }
    let y: Vec<f64> = data.samples().iter().map(|s| s.output()).collect();
    let n = basis.n_params();

    let mut cuts: Vec<Cut> = Vec::new();
    if let Some(gb) = grad_bound {
        if !(gb.gamma.is_finite() && gb.gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gradient bound must be finite and nonnegative, got {}",
                gb.gamma
            )));
        }
        for pt in &gb.points {
            if pt.len() != basis.input_dim() {
                return Err(Error::DimensionMismatch {
                    expected: basis.input_dim(),
                    got: pt.len(),
                });
            }
        }
        if basis.input_dim() == 1 {
            // |f_p'(u)| <= gamma is linear in p.
            for pt in &gb.points {
                let coeffs: Vec<f64> = (0..n).map(|i| basis.gradient(i, pt)[0]).collect();
                let neg: Vec<f64> = coeffs.iter().map(|c| -c).collect();
                cuts.push(Cut { coeffs, rhs: gb.gamma });
                cuts.push(Cut { coeffs: neg, rhs: gb.gamma });
            }
        }
    }

    let (mut params, mut j_value) = minimax_lp(&design, &y, &cuts)?;

    // Cutting planes for the Euclidean gradient ball in higher dimensions.
    if let Some(gb) = grad_bound {
        if basis.input_dim() > 1 {
            let dim = basis.input_dim();
            let tol = 1e-9 * gb.gamma.max(1.0);
            let mut converged = false;
            for _round in 0..100 {
                let model = ParametricModel {
                    basis: basis.clone(),
                    params: params.clone(),
                    diagnostics: FitDiagnostics {
                        cost: CostKind::Minimax,
                        j_value,
                        residuals: Vec::new(),
                        warnings: Vec::new(),
                    },
                };
                let mut worst_violation = 0.0f64;
                for pt in &gb.points {
                    let g = model.gradient(pt)?;
                    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > gb.gamma + tol {
                        worst_violation = worst_violation.max(norm - gb.gamma);
                        let dir: Vec<f64> = g.iter().map(|v| v / norm).collect();
                        let coeffs: Vec<f64> = (0..n)
                            .map(|i| {
                                let bg = basis.gradient(i, pt);
                                (0..dim).map(|d| dir[d] * bg[d]).sum()
                            })
                            .collect();
                        cuts.push(Cut { coeffs, rhs: gb.gamma });
                    }
                }
                if worst_violation == 0.0 {
                    converged = true;
                    break;
                }
                let (p, j) = minimax_lp(&design, &y, &cuts)?;
                params = p;
                j_value = j;
            }
            if !converged {
                warnings.push("gradient-ball cutting planes hit the iteration cap".into());
            }
        }
    }

    params = min_norm_polish(&design, &y, &cuts, &params, j_value);

    let residuals: Vec<f64> = (0..data.len())
        .map(|k| y[k] - (0..n).map(|i| design[(k, i)] * params[i]).sum::<f64>())
        .collect();
    let j_value = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    Ok(ParametricModel {
        basis: basis.clone(),
        params,
        diagnostics: FitDiagnostics {
            cost: CostKind::Minimax,
            j_value,
            residuals,
            warnings,
        },
    })
}

/// Disturbance amplitude bound carrying its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceBound {
    pub delta: f64,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
}

impl ConfidenceBound {
    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be finite and nonnegative, got {delta}"
            )));
        }
        Ok(Self {
            delta,
            alpha: None,
            sigma: None,
        })
    }
}

/// Two-sided Gaussian confidence bound: delta = sigma * z with
/// P(|d| <= sigma * z) = alpha%.
pub fn gaussian_delta(sigma: f64, alpha: f64) -> Result<ConfidenceBound> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !(alpha > 0.0 && alpha < 100.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie strictly between 0 and 100, got {alpha}"
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let z = normal.inverse_cdf(0.5 + alpha / 200.0);
    Ok(ConfidenceBound {
        delta: sigma * z,
        alpha: Some(alpha),
        sigma: Some(sigma),
    })
}

/// Rejects a parametric family when no member keeps every residual within
/// the confidence bound: falsified iff min_p max_k |y_k - f_p(u_k)| > delta.
///
/// The witness carries the minimax value as its margin and pairs the most
/// negative with the most positive residual of the optimal fit.
pub fn pp_falsify(data: &Dataset, basis: &BasisFamily, bound: &ConfidenceBound) -> Result<Verdict> {
    let model = fit_linf(data, basis, None)?;
    let j = model.diagnostics().j_value;
    let falsified = j > bound.delta;
    let boundary = (j - bound.delta).abs() <= 1e-12 * j.abs().max(bound.delta).max(1.0);
    let witness = falsified.then(|| {
        let r = &model.diagnostics().residuals;
        let lo = r
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let hi = r
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        Witness {
            pair: (lo, hi),
            margin: j,
        }
    });
    Ok(Verdict {
        falsified,
        witness,
        boundary,
    })
}

/// Feasibility certificate for a fitted model against SM hypotheses.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// Residuals within epsilon and gradient bound satisfied on the grid.
    pub certified: bool,
    /// Worst-case error ratio guaranteed for certified models.
    pub alpha_bound: f64,
    pub max_abs_residual: f64,
    pub max_gradient_norm: f64,
    pub grid_resolution: usize,
}

/// Checks that the fitted model lies in the feasible set: every residual
/// within epsilon and the gradient norm within gamma on a uniform grid over
/// the data box. Certified models approximate any feasible function to at
/// most twice the optimal worst-case error.
pub fn suboptimality_certificate(
    model: &ParametricModel,
    data: &Dataset,
    hyp: SmHypotheses,
) -> Result<Certificate> {
    suboptimality_certificate_with_resolution(model, data, hyp, GRADIENT_GRID_RESOLUTION)
}

pub fn suboptimality_certificate_with_resolution(
    model: &ParametricModel,
    data: &Dataset,
    hyp: SmHypotheses,
    resolution: usize,
) -> Result<Certificate> {
    let residuals = model.residuals_on(data)?;
    let max_abs_residual = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));

    let grid = Grid::new(data.bounding_box(), resolution, GridLayout::Endpoints)?;
    let mut max_gradient_norm = 0.0f64;
    for pt in grid.iter() {
        max_gradient_norm = max_gradient_norm.max(model.gradient_norm(&pt)?);
    }

    Ok(Certificate {
        certified: max_abs_residual <= hyp.epsilon() && max_gradient_norm <= hyp.gamma(),
        alpha_bound: 2.0,
        max_abs_residual,
        max_gradient_norm,
        grid_resolution: resolution,
    })
}
