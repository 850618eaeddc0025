use serde::{Deserialize, Serialize};

use crate::diffusion::DiffusionTrace;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spreads::SpreadPoint;
use crate::uncertainty::CurveBounds;

pub const SCHEMA_VERSION: u32 = 1;

/// What the curve was computed for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub u0: usize,
    pub lambda_max: f64,
    pub eccentricity: f64,
    /// `sqrt(λ_max² + E⁴)`, the scale of the refinement rate.
    pub w: f64,
}

/// A knot; `alpha` is `null` at the two domain ends, whose supporting lines
/// are vertical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotRecord {
    pub alpha: Option<f64>,
    pub s: f64,
    pub g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub schema: u32,
    pub metadata: Metadata,
    pub knots: Vec<KnotRecord>,
    /// Polylines as `[s, g]` pairs sorted by `s`.
    pub lower: Vec<[f64; 2]>,
    pub upper: Vec<[f64; 2]>,
    pub gap: f64,
    pub solves: usize,
}

impl CurveDocument {
    pub fn from_bounds<T: Real>(bounds: &CurveBounds<T>, metadata: Metadata) -> Self {
        let f = |p: &[T; 2]| [p[0].to_f64_lossy(), p[1].to_f64_lossy()];
        CurveDocument {
            schema: SCHEMA_VERSION,
            metadata,
            knots: bounds
                .knots
                .iter()
                .map(|k| KnotRecord {
                    alpha: k.alpha.is_finite().then(|| k.alpha.to_f64_lossy()),
                    s: k.s.to_f64_lossy(),
                    g: k.g.to_f64_lossy(),
                })
                .collect(),
            lower: bounds.lower.iter().map(f).collect(),
            upper: bounds.upper.iter().map(f).collect(),
            gap: bounds.gap.to_f64_lossy(),
            solves: bounds.solves,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CurveDocument = serde_json::from_str(text)?;
        if doc.schema != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!("unsupported schema version {}", doc.schema)));
        }
        Ok(doc)
    }
}

/// A diffusion trace with the same metadata block as [`CurveDocument`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionDocument {
    pub schema: u32,
    pub metadata: Metadata,
    pub times: Vec<f64>,
    pub points: Vec<SpreadPoint<f64>>,
}

impl DiffusionDocument {
    pub fn from_trace<T: Real>(trace: &DiffusionTrace<T>, metadata: Metadata) -> Self {
        DiffusionDocument {
            schema: SCHEMA_VERSION,
            metadata,
            times: trace.times.iter().map(|t| t.to_f64_lossy()).collect(),
            points: trace.points.iter().map(|p| SpreadPoint { s: p.s.to_f64_lossy(), g: p.g.to_f64_lossy() }).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
