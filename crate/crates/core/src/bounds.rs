//! Closed-form upper bounds for the Friedrichs-Velte constant `Gamma` of a
//! star domain and the constant chain `C = Gamma + 1`,
//! `Gamma / 4 <= P <= H (1 + Gamma)`, `Gamma <= 4 P`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::gauss_legendre;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("eta must be >= 1, got {0}")]
    Eta(f64),
    #[error("Q must be >= 0, got {0}")]
    Q(f64),
    #[error("dimension must be >= 2, got {0}")]
    Dim(usize),
    #[error("theta must lie in (0, pi/2], got {0}")]
    Theta(f64),
    #[error("internal consistency: negative radicand {radicand} for n={n}, eta={eta}, Q={q}")]
    NegativeRadicand { n: usize, eta: f64, q: f64, radicand: f64 },
}

fn check_inputs(n: usize, eta: f64, q: f64) -> Result<(), BoundsError> {
    if n < 2 {
        return Err(BoundsError::Dim(n));
    }
    if !(eta >= 1.0 && eta.is_finite()) {
        return Err(BoundsError::Eta(eta));
    }
    if !(q >= 0.0 && q.is_finite()) {
        return Err(BoundsError::Q(q));
    }
    Ok(())
}

/// `eta^n (Q + sqrt(Q^2 + 2Q + (n^2-4)/n - ((n-4)/n) eta^-n))^2`.
pub fn fv_upper_bound(n: usize, eta: f64, q: f64) -> Result<f64, BoundsError> {
    check_inputs(n, eta, q)?;
    let nf = n as f64;
    let eta_n = eta.powi(n as i32);
    let radicand = q * q + 2.0 * q + ((nf * nf - 4.0) - (nf - 4.0) / eta_n) / nf;
    if radicand < 0.0 {
        return Err(BoundsError::NegativeRadicand { n, eta, q, radicand });
    }
    // (q + sqrt r)^2 expanded, so q = 0 returns eta^n r without a sqrt round trip
    Ok(eta_n * (q * q + 2.0 * q * radicand.sqrt() + radicand))
}

/// Three-dimensional variant `(Q + sqrt(Q^2 + 2Q + 2))^2 eta^3`.
pub fn fv_upper_bound_3d(eta: f64, q: f64) -> Result<f64, BoundsError> {
    check_inputs(3, eta, q)?;
    let r = q * q + 2.0 * q + 2.0;
    Ok((q * q + 2.0 * q * r.sqrt() + r) * eta.powi(3))
}

/// Hardy constant of convex domains, any dimension.
pub fn hardy_convex() -> f64 {
    4.0
}

/// Hardy constant bound for simply connected planar domains.
pub fn planar_john_hardy() -> f64 {
    16.0
}

const CONE_PANELS: usize = 8;
const CONE_NODES: usize = 32;

fn sin_power_integral(p: i32, upper: f64) -> f64 {
    let rule = gauss_legendre(CONE_NODES).expect("fixed rule size");
    rule.integrate_composite(0.0, upper, CONE_PANELS, |t| t.sin().powi(p))
}

/// `omega(alpha)`: normalized measure of a spherical cap of angular radius
/// `arcsin(alpha)` in `S^{n-1}`.
pub fn cap_fraction(n: usize, alpha: f64) -> f64 {
    let p = n as i32 - 2;
    sin_power_integral(p, alpha.asin()) / (2.0 * sin_power_integral(p, FRAC_PI_2))
}

/// `16 / (n omega(sin(theta) / 2))` for domains with the `theta`-cone condition.
pub fn hardy_cone(n: usize, theta: f64) -> Result<f64, BoundsError> {
    if n < 2 {
        return Err(BoundsError::Dim(n));
    }
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(BoundsError::Theta(theta));
    }
    Ok(16.0 / (n as f64 * cap_fraction(n, theta.sin() / 2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HardySource {
    User,
    Convex,
    PlanarJohn16,
    Cone { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyEstimate {
    pub value: f64,
    pub source: HardySource,
}

impl HardyEstimate {
    pub fn convex() -> Self {
        Self {
            value: hardy_convex(),
            source: HardySource::Convex,
        }
    }

    pub fn planar_john() -> Self {
        Self {
            value: planar_john_hardy(),
            source: HardySource::PlanarJohn16,
        }
    }

    pub fn user(value: f64) -> Self {
        Self {
            value,
            source: HardySource::User,
        }
    }

    pub fn cone(n: usize, theta: f64) -> Result<Self, BoundsError> {
        Ok(Self {
            value: hardy_cone(n, theta)?,
            source: HardySource::Cone { theta },
        })
    }
}

/// Picks the Hardy constant: user value, then convex family, then the planar
/// bound 16, then the cone bound. `None` if nothing applies.
pub fn select_hardy(
    n: usize,
    user: Option<f64>,
    convex: bool,
    cone_theta: Option<f64>,
) -> Result<Option<HardyEstimate>, BoundsError> {
    if let Some(h) = user {
        return Ok(Some(HardyEstimate::user(h)));
    }
    if convex {
        return Ok(Some(HardyEstimate::convex()));
    }
    if n == 2 {
        return Ok(Some(HardyEstimate::planar_john()));
    }
    cone_theta.map(|t| HardyEstimate::cone(n, t)).transpose()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainInputs {
    pub n: usize,
    pub eta: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantChainReport {
    pub gamma_upper: f64,
    pub c_upper: f64,
    /// `gamma / 4`, set only when `gamma` is the exact constant.
    pub p_lower_if_gamma_tight: Option<f64>,
    pub p_upper: f64,
    pub hardy: HardyEstimate,
    pub gamma_is_exact: bool,
    pub ell: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<ChainInputs>,
}

impl ConstantChainReport {
    pub fn with_inputs(mut self, inputs: ChainInputs) -> Self {
        self.inputs = Some(inputs);
        self
    }
}

pub fn chain_from_gamma(gamma: f64, hardy: HardyEstimate, gamma_is_exact: bool) -> ConstantChainReport {
    debug_assert!(gamma >= 0.0 && hardy.value > 0.0);
    let c_upper = gamma + 1.0;
    ConstantChainReport {
        gamma_upper: gamma,
        c_upper,
        p_lower_if_gamma_tight: gamma_is_exact.then_some(gamma / 4.0),
        p_upper: hardy.value * c_upper,
        hardy,
        gamma_is_exact,
        ell: 1,
        inputs: None,
    }
}

/// `(4 p, 1 + 4 p)`: upper bounds on `Gamma` and `C` from `P`.
pub fn chain_from_p(p: f64) -> (f64, f64) {
    debug_assert!(p >= 0.0);
    (4.0 * p, 1.0 + 4.0 * p)
}
