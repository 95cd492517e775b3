//! Polygon measures used as independent checks on the support-function
//! formulas for area and length.

use super::EmbeddedCurve;
use crate::error::{FlowError, Result};

fn require_polygon(curve: &EmbeddedCurve) -> Result<()> {
    if curve.x.len() < 3 || curve.x.len() != curve.y.len() {
        return Err(FlowError::invalid("a polygon needs at least 3 points"));
    }
    Ok(())
}

/// Signed area, positive for counterclockwise vertex order.
pub fn shoelace_area(curve: &EmbeddedCurve) -> Result<f64> {
    require_polygon(curve)?;
    let m = curve.x.len();
    let twice: f64 = (0..m)
        .map(|j| {
            let k = (j + 1) % m;
            curve.x[j] * curve.y[k] - curve.x[k] * curve.y[j]
        })
        .sum();
    Ok(0.5 * twice)
}

pub fn polygon_perimeter(curve: &EmbeddedCurve) -> Result<f64> {
    require_polygon(curve)?;
    let m = curve.x.len();
    Ok((0..m)
        .map(|j| {
            let k = (j + 1) % m;
            (curve.x[k] - curve.x[j]).hypot(curve.y[k] - curve.y[j])
        })
        .sum())
}
