//! First-return map of a standard neighbourhood of a saddle closed orbit.
//!
//! Points on the boundary torus pieces are written in coordinates
//! `(rho, alpha, z)`. Incoming points sit on `rho = 1` or `rho = 3` with
//! `0 < |z| < 1`; they leave through `z = +-1` at
//! `rho = 2 -+ |z|`, having turned by `ln |z|` around the orbit.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    pub rho: f64,
    /// Unnormalized angle, so winding stays observable.
    pub alpha: f64,
    pub z: f64,
}

impl TorusPoint {
    pub fn new(rho: f64, alpha: f64, z: f64) -> Self {
        TorusPoint { rho, alpha, z }
    }

    /// `alpha` reduced to `[0, 2pi)`.
    pub fn alpha_mod_2pi(&self) -> f64 {
        self.alpha.rem_euclid(TAU)
    }

    pub fn is_incoming(&self) -> bool {
        (self.rho == 1.0 || self.rho == 3.0) && self.z != 0.0 && self.z.abs() < 1.0
    }

    pub fn is_outgoing(&self) -> bool {
        self.z.abs() == 1.0 && self.rho > 1.0 && self.rho < 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LocalError {
    #[error("z = 0 lies on the stable manifold; the trajectory never returns")]
    NoReturn,
    #[error("point ({rho}, {alpha}, {z}) is outside the incoming domain")]
    Domain { rho: f64, alpha: f64, z: f64 },
}

/// Whether the neighbourhood is a product or carries the half-turn twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NeighbourhoodKind {
    #[default]
    Trivial,
    Twisted,
}

fn check_domain(p: &TorusPoint) -> Result<(), LocalError> {
    let bad = LocalError::Domain { rho: p.rho, alpha: p.alpha, z: p.z };
    if !(p.rho.is_finite() && p.alpha.is_finite() && p.z.is_finite()) {
        return Err(bad);
    }
    if p.rho != 1.0 && p.rho != 3.0 {
        return Err(bad);
    }
    if p.z == 0.0 {
        return Err(LocalError::NoReturn);
    }
    if p.z.abs() >= 1.0 {
        return Err(bad);
    }
    Ok(())
}

/// The map `g` of a trivial neighbourhood: `rho = 2 -+ 1` goes to
/// `2 -+ |z|` with the same sign, `alpha + ln|z|`, and `z` to `sign z`.
pub fn first_return(p: TorusPoint) -> Result<TorusPoint, LocalError> {
    check_domain(&p)?;
    let r = p.z.abs();
    let rho = if p.rho == 1.0 { 2.0 - r } else { 2.0 + r };
    Ok(TorusPoint { rho, alpha: p.alpha + r.ln(), z: p.z.signum() })
}

/// [`first_return`] followed by the central-symmetry identification
/// `(alpha, z) -> (alpha + pi, -z)` when the neighbourhood is twisted.
pub fn first_return_in(kind: NeighbourhoodKind, p: TorusPoint) -> Result<TorusPoint, LocalError> {
    let q = first_return(p)?;
    Ok(match kind {
        NeighbourhoodKind::Trivial => q,
        NeighbourhoodKind::Twisted => TorusPoint { rho: q.rho, alpha: q.alpha + PI, z: -q.z },
    })
}
