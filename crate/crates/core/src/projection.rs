//! Long-horizon split of a stored anchor between holders and the custodian.

use rust_decimal::Decimal;

use crate::attenuation::{residual_weight, AttenuationError, AttenuationSpec};
use crate::rounding::{self, RoundingError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProjectionError {
    #[error(transparent)]
    Attenuation(#[from] AttenuationError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub anchor: Decimal,
    /// `anchor * θ^horizon`.
    pub residual: Decimal,
    /// Weight withheld over the horizon; `anchor - residual`.
    pub issuer_share: Decimal,
}

/// Splits `anchor_weight` after `horizon_days` of decay. The two parts sum to
/// the anchor exactly.
pub fn wealth_projection(
    anchor_weight: f64,
    theta: &AttenuationSpec,
    horizon_days: u32,
) -> Result<Projection, ProjectionError> {
    let residual = rounding::exact(residual_weight(anchor_weight, theta, horizon_days)?)?;
    let anchor = rounding::exact(anchor_weight)?;
    Ok(Projection { anchor, residual, issuer_share: anchor - residual })
}
