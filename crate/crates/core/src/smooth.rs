//! The C^∞ plateau profile shared by the mollifier bump and the dyadic cutoff:
//! exactly 1 on r ≤ 1/2, exactly 0 on r ≥ 1, smooth monotone transition between.

fn ramp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth plateau: 1 for r ≤ 1/2, 0 for r ≥ 1, C^∞ everywhere.
///
/// The plateau branches return exact 0.0/1.0 so dyadic partition sums
/// telescope to machine precision.
pub(crate) fn plateau(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let t = 2.0 * (r - 0.5); // transition coordinate in (0,1)
        let a = ramp(1.0 - t);
        a / (a + ramp(t))
    }
}
