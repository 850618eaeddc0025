//! Plain CSV tables with full-precision (17 significant digit) numbers.

use std::io::Write;

use super::document::{CurveDocument, DiffusionDocument};
use crate::error::Result;
use crate::spreads::SpreadPoint;

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// `alpha,s,g` per knot; the vertical end knots get `-inf` / `inf`.
pub fn write_knots_csv<W: Write>(doc: &CurveDocument, mut w: W) -> Result<()> {
    writeln!(w, "alpha,s,g")?;
    for (i, k) in doc.knots.iter().enumerate() {
        let alpha = match k.alpha {
            Some(a) => num(a),
            None if i == 0 => "-inf".into(),
            None => "inf".into(),
        };
        writeln!(w, "{alpha},{},{}", num(k.s), num(k.g))?;
    }
    Ok(())
}

/// `t,s,g` per diffusion sample.
pub fn write_diffusion_csv<W: Write>(doc: &DiffusionDocument, mut w: W) -> Result<()> {
    writeln!(w, "t,s,g")?;
    for (t, p) in doc.times.iter().zip(&doc.points) {
        writeln!(w, "{},{},{}", num(*t), num(p.s), num(p.g))?;
    }
    Ok(())
}

/// `s,gamma` per oracle sample.
pub fn write_oracle_csv<W: Write>(points: &[SpreadPoint<f64>], mut w: W) -> Result<()> {
    writeln!(w, "s,gamma")?;
    for p in points {
        writeln!(w, "{},{}", num(p.s), num(p.g))?;
    }
    Ok(())
}

/// `s,g` per point.
pub fn write_points_csv<W: Write>(points: &[SpreadPoint<f64>], mut w: W) -> Result<()> {
    writeln!(w, "s,g")?;
    for p in points {
        writeln!(w, "{},{}", num(p.s), num(p.g))?;
    }
    Ok(())
}
