use super::{BracketRule, LieError};
use crate::shift::Config;

/// Radius of `phi_i`, where `phi_0(xi) = xi` and
/// `phi_{i+1}(xi) = [phi_i(xi), c]` for a constant direction `c`.
///
/// The iterate is linear and commutes with shifts because `c` is
/// shift-invariant, so its radius is the largest displacement of a basis
/// input `e^(t)_0` over all vector tracks.
pub fn phi_radius(rule: &BracketRule, c: &Config, i: u64) -> Result<u64, LieError> {
    if !c.deviation().is_empty() {
        return Err(LieError::Shape("phi needs a constant direction".into()));
    }
    let mut radius = 0;
    for t in 0..rule.vector_tracks() {
        let mut x = rule.basis(t, 0)?;
        for _ in 0..i {
            x = rule.eval(&x, c)?;
        }
        if !x.is_finite_support() {
            return Err(LieError::Unsupported("phi produced a nonzero tail".into()));
        }
        if let Some((lo, hi)) = x.support() {
            radius = radius.max(lo.unsigned_abs()).max(hi.unsigned_abs());
        }
    }
    Ok(radius)
}
