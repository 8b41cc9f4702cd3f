//! Parametric Set Membership estimation: an envelope built on the residuals
//! of a fitted parametric model. The combined estimate adds the model back,
//! giving tight bounds on the unknown function whose width comes only from
//! the residual hypotheses.

use crate::data::{Dataset, NormSpec, Sample, SmHypotheses};
use crate::envelope::{Envelope, ErrorReport, Uncertainty};
use crate::error::{Error, Result};
use crate::falsification::{falsify, Verdict};
use crate::parametric::ParametricModel;

/// Residual pairs (u_k, y_k - f_p(u_k)) with the model that produced them.
#[derive(Debug, Clone)]
pub struct ResidualDataset {
    base: Dataset,
    model: ParametricModel,
}

impl ResidualDataset {
    pub fn data(&self) -> &Dataset {
        &self.base
    }

    pub fn model(&self) -> &ParametricModel {
        &self.model
    }
}

/// Subtracts the model from each output, preserving sample order.
pub fn residual_dataset(data: &Dataset, model: &ParametricModel) -> Result<ResidualDataset> {
    let residuals = model.residuals_on(data)?;
    let samples = data
        .samples()
        .iter()
        .zip(&residuals)
        .map(|(s, &r)| Sample::new(s.input().to_vec(), r))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualDataset {
        base: Dataset::new(samples)?,
        model: model.clone(),
    })
}

/// Falsification test of the residual hypotheses; delegates to the exact
/// pairwise test on the residual data.
pub fn psm_falsify(residuals: &ResidualDataset, hyp_delta: SmHypotheses) -> Verdict {
    falsify(residuals.data(), hyp_delta)
}

/// A parametric model plus an envelope over its residual function.
#[derive(Debug, Clone)]
pub struct PsmEstimator {
    model: ParametricModel,
    residual_envelope: Envelope,
}

/// Builds the combined estimator, rejecting residual hypotheses that the
/// residual data falsifies.
pub fn build_psm(
    data: &Dataset,
    model: &ParametricModel,
    hyp_delta: SmHypotheses,
) -> Result<PsmEstimator> {
    let residuals = residual_dataset(data, model)?;
    let verdict = psm_falsify(&residuals, hyp_delta);
    if verdict.falsified {
        return Err(Error::Falsified(verdict));
    }
    Ok(PsmEstimator {
        model: model.clone(),
        residual_envelope: Envelope::new(residuals.base, hyp_delta)?,
    })
}

impl PsmEstimator {
    pub fn model(&self) -> &ParametricModel {
        &self.model
    }

    pub fn residual_envelope(&self) -> &Envelope {
        &self.residual_envelope
    }

    /// Combined central estimate: model value plus residual midpoint.
    pub fn estimate(&self, u: &[f64]) -> Result<f64> {
        let band = self.residual_envelope.evaluate(u)?;
        Ok(self.model.evaluate(u)? + band.central)
    }

    /// Tight interval for the unknown function at `u`.
    pub fn bounds(&self, u: &[f64]) -> Result<Uncertainty> {
        let band = self.residual_envelope.evaluate(u)?;
        let f = self.model.evaluate(u)?;
        Ok(Uncertainty {
            lower: f + band.lower,
            upper: f + band.upper,
        })
    }

    /// Worst-case L_q error; the parametric part cancels, so this equals the
    /// residual envelope's band error.
    pub fn error(&self, spec: NormSpec) -> Result<ErrorReport> {
        self.residual_envelope.band_error(spec)
    }

    /// Guaranteed error at one point: half the bounds width.
    pub fn pointwise_error(&self, u: &[f64]) -> Result<f64> {
        let band = self.residual_envelope.evaluate(u)?;
        Ok((band.upper - band.lower) / 2.0)
    }
}
