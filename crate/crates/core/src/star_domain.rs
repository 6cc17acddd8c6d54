//! Domains star-shaped with respect to a ball `B(0, a)`, described by a
//! radial boundary function `r = r0(theta)` over hyperspherical angles.
//!
//! Angles follow the convention
//! `x_1 = r cos t_1`, `x_2 = r sin t_1 cos t_2`, ...,
//! `x_n = r sin t_1 ... sin t_{n-1}`, with `t_1..t_{n-2}` in `[0, pi]` and
//! `t_{n-1}` in `[0, 2 pi)`. In the plane this is the usual polar angle.
//!
//! The shape factor `Q` is the maximum of `|grad_S r0| / r0`, where
//! `grad_S` is the gradient on the unit sphere (equivalently `|r grad r0|`
//! for `r0` extended as a function of the angles only).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::numerics::{gauss_legendre, golden_refine, NumericsError, MAX_GAUSS_POINTS};

/// Default angular grid points for planar domains.
pub const DEFAULT_GRID_2D: usize = 1024;
/// Default grid points per angle for `n >= 3`.
pub const DEFAULT_GRID_ND: usize = 64;
/// Upper bound on the total number of grid points for `n >= 3`.
pub const MAX_GRID_POINTS_ND: usize = 1 << 22;
/// Default acceptance threshold for `refined - grid` of the shape maxima,
/// relative to `max(1, value)`.
pub const DEFAULT_REFINE_TOL: f64 = 1e-3;
/// Relative roundoff allowance when comparing the boundary against `a`.
pub const VALIDATION_SLACK: f64 = 1e-12;
/// Cap on coordinate sweeps when refining maxima over several angles.
const MAX_SWEEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    InvalidParameter,
    NonPositiveRadius,
    BallNotInside,
    TangentDistance,
}

/// One failed domain invariant, located by spec-file field path and, for
/// geometric checks, by the worst angle found on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub kind: ViolationKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid domain: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{quantity} not resolved by the grid: refinement changed it by {estimate:e} (tolerance {tolerance:e})")]
    Unresolved {
        quantity: &'static str,
        estimate: f64,
        tolerance: f64,
    },
    #[error("unsupported dimension {dim}: {what} requires dim = 2")]
    UnsupportedDimension { dim: usize, what: &'static str },
    #[error("quadrature parameter out of range: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Boundary description `r0` of a star domain.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `r0 = radius`, any dimension.
    Ball { radius: f64 },
    /// Axis-aligned ellipsoid, one semi-axis per coordinate.
    Ellipse { semi_axes: Vec<f64> },
    /// Planar `r0 = c + sum_k cos[k-1] cos(k t) + sin[k-1] sin(k t)`.
    RadialFourier {
        constant: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    /// Planar samples on increasing angles in `[0, 2 pi)`, interpolated by a
    /// periodic cubic Hermite spline whose node slopes are central differences.
    Sampled { theta: Vec<f64>, r0: Vec<f64> },
}

impl RadialProfile {
    pub fn family(&self) -> &'static str {
        match self {
            RadialProfile::Ball { .. } => "ball",
            RadialProfile::Ellipse { .. } => "ellipse",
            RadialProfile::RadialFourier { .. } => "radial_fourier",
            RadialProfile::Sampled { .. } => "sampled",
        }
    }

    /// Families that are convex for every admissible parameter choice.
    pub fn is_convex_family(&self) -> bool {
        matches!(self, RadialProfile::Ball { .. } | RadialProfile::Ellipse { .. })
    }
}

/// Unit direction for hyperspherical angles (`angles.len() = n - 1`).
pub fn direction(angles: &[f64]) -> Vec<f64> {
    let n = angles.len() + 1;
    let mut x = vec![0.0; n];
    let mut sin_prod = 1.0;
    for (j, &t) in angles.iter().enumerate() {
        x[j] = sin_prod * t.cos();
        sin_prod *= t.sin();
    }
    x[n - 1] = sin_prod;
    x
}

/// Central slopes of periodic samples, second order on non-uniform grids.
fn periodic_slopes(theta: &[f64], r: &[f64]) -> Vec<f64> {
    let n = theta.len();
    (0..n)
        .map(|i| {
            let ip = (i + 1) % n;
            let im = (i + n - 1) % n;
            let hp = if ip == 0 { theta[0] + 2.0 * PI - theta[i] } else { theta[ip] - theta[i] };
            let hm = if i == 0 { theta[0] + 2.0 * PI - theta[im] } else { theta[i] - theta[im] };
            (hm * hm * (r[ip] - r[i]) + hp * hp * (r[i] - r[im])) / (hm * hp * (hm + hp))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
struct HermiteSpline {
    theta: Vec<f64>,
    r: Vec<f64>,
    slope: Vec<f64>,
}

impl HermiteSpline {
    fn new(theta: Vec<f64>, r: Vec<f64>) -> Self {
        let slope = periodic_slopes(&theta, &r);
        Self { theta, r, slope }
    }

    /// Value and derivative at angle `t`.
    fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.theta.len();
        let mut t = t.rem_euclid(2.0 * PI);
        if t < self.theta[0] {
            t += 2.0 * PI;
        }
        let i = match self.theta.partition_point(|&s| s <= t) {
            0 => n - 1,
            k => k - 1,
        };
        let ip = (i + 1) % n;
        let t0 = self.theta[i];
        let t1 = if ip == 0 { self.theta[0] + 2.0 * PI } else { self.theta[ip] };
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1, m0, m1) = (self.r[i], self.r[ip], self.slope[i] * h, self.slope[ip] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1;
        let dvalue = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (value, dvalue)
    }
}

/// Grid and refinement settings for the shape maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeOptions {
    /// Points per angle; `None` selects the default for the dimension.
    pub grid_per_angle: Option<usize>,
    pub tolerance: f64,
}

impl Default for ShapeOptions {
    fn default() -> Self {
        Self {
            grid_per_angle: None,
            tolerance: DEFAULT_REFINE_TOL,
        }
    }
}

/// Domain star-shaped with respect to the centered ball of radius `star_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarDomain {
    dim: usize,
    star_radius: f64,
    profile: RadialProfile,
    grid: Option<usize>,
    spline: Option<HermiteSpline>,
}

impl StarDomain {
    /// Unvalidated construction; see [`StarDomain::validate`].
    pub fn new(dim: usize, star_radius: f64, profile: RadialProfile) -> Self {
        let spline = match &profile {
            RadialProfile::Sampled { theta, r0 }
                if theta.len() == r0.len() && theta.len() >= 4 =>
            {
                Some(HermiteSpline::new(theta.clone(), r0.clone()))
            }
            _ => None,
        };
        Self {
            dim,
            star_radius,
            profile,
            grid: None,
            spline,
        }
    }

    pub fn ball(dim: usize, radius: f64, star_radius: f64) -> Self {
        Self::new(dim, star_radius, RadialProfile::Ball { radius })
    }

    pub fn ellipse(semi_axes: [f64; 2], star_radius: f64) -> Self {
        Self::new(
            2,
            star_radius,
            RadialProfile::Ellipse {
                semi_axes: semi_axes.to_vec(),
            },
        )
    }

    pub fn radial_fourier(constant: f64, cos: Vec<f64>, sin: Vec<f64>, star_radius: f64) -> Self {
        Self::new(2, star_radius, RadialProfile::RadialFourier { constant, cos, sin })
    }

    /// Overrides the angular grid resolution (points per angle).
    pub fn with_grid(mut self, points: usize) -> Self {
        self.grid = Some(points);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn star_radius(&self) -> f64 {
        self.star_radius
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn grid(&self) -> Option<usize> {
        self.grid
    }

    /// Uniform scaling of both the boundary and the star ball.
    pub fn scaled(&self, lambda: f64) -> Self {
        let profile = match &self.profile {
            RadialProfile::Ball { radius } => RadialProfile::Ball {
                radius: radius * lambda,
            },
            RadialProfile::Ellipse { semi_axes } => RadialProfile::Ellipse {
                semi_axes: semi_axes.iter().map(|p| p * lambda).collect(),
            },
            RadialProfile::RadialFourier { constant, cos, sin } => RadialProfile::RadialFourier {
                constant: constant * lambda,
                cos: cos.iter().map(|c| c * lambda).collect(),
                sin: sin.iter().map(|c| c * lambda).collect(),
            },
            RadialProfile::Sampled { theta, r0 } => RadialProfile::Sampled {
                theta: theta.clone(),
                r0: r0.iter().map(|r| r * lambda).collect(),
            },
        };
        let mut out = Self::new(self.dim, self.star_radius * lambda, profile);
        out.grid = self.grid;
        out
    }

    /// Planar rotation by `phi`: the new boundary is `r0(t - phi)`.
    /// Available for balls and Fourier profiles.
    pub fn rotated(&self, phi: f64) -> Option<Self> {
        let profile = match &self.profile {
            RadialProfile::Ball { .. } => self.profile.clone(),
            RadialProfile::RadialFourier { constant, cos, sin } if self.dim == 2 => {
                let len = cos.len().max(sin.len());
                let mut c2 = vec![0.0; len];
                let mut s2 = vec![0.0; len];
                for k in 0..len {
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let b = sin.get(k).copied().unwrap_or(0.0);
                    let w = (k + 1) as f64 * phi;
                    c2[k] = a * w.cos() - b * w.sin();
                    s2[k] = a * w.sin() + b * w.cos();
                }
                RadialProfile::RadialFourier {
                    constant: *constant,
                    cos: c2,
                    sin: s2,
                }
            }
            _ => return None,
        };
        let mut out = Self::new(self.dim, self.star_radius, profile);
        out.grid = self.grid;
        Some(out)
    }

    /// `r0` and `|grad_S r0|` in the direction given by `angles`.
    pub fn radial(&self, angles: &[f64]) -> (f64, f64) {
        match &self.profile {
            RadialProfile::Ball { radius } => (*radius, 0.0),
            RadialProfile::Ellipse { semi_axes } => {
                let w = direction(angles);
                let g: f64 = w.iter().zip(semi_axes).map(|(wi, p)| wi * wi / (p * p)).sum();
                // tangential part of grad g = 2 w_i / p_i^2
                let grad: Vec<f64> = w.iter().zip(semi_axes).map(|(wi, p)| 2.0 * wi / (p * p)).collect();
                let radial_part: f64 = grad.iter().zip(&w).map(|(a, b)| a * b).sum();
                let tangential: f64 = grad
                    .iter()
                    .zip(&w)
                    .map(|(gi, wi)| (gi - radial_part * wi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (g.powf(-0.5), 0.5 * g.powf(-1.5) * tangential)
            }
            RadialProfile::RadialFourier { .. } | RadialProfile::Sampled { .. } => {
                let (r, dr) = self.planar(angles[0]);
                (r, dr.abs())
            }
        }
    }

    /// Planar `r0(t)` and `r0'(t)`. Panics for `n >= 3` profiles other than
    /// balls.
    pub fn planar(&self, t: f64) -> (f64, f64) {
        match &self.profile {
            RadialProfile::Ball { radius } => (*radius, 0.0),
            RadialProfile::Ellipse { semi_axes } => {
                assert_eq!(semi_axes.len(), 2, "planar evaluation of an ellipsoid");
                let (p, q) = (semi_axes[0], semi_axes[1]);
                let (s, c) = t.sin_cos();
                let den = q * q * c * c + p * p * s * s;
                let r = p * q / den.sqrt();
                (r, r * (q * q - p * p) * s * c / den)
            }
            RadialProfile::RadialFourier { constant, cos, sin } => {
                let mut r = *constant;
                let mut dr = 0.0;
                for (k, a) in cos.iter().enumerate() {
                    let kk = (k + 1) as f64;
                    r += a * (kk * t).cos();
                    dr -= kk * a * (kk * t).sin();
                }
                for (k, b) in sin.iter().enumerate() {
                    let kk = (k + 1) as f64;
                    r += b * (kk * t).sin();
                    dr += kk * b * (kk * t).cos();
                }
                (r, dr)
            }
            RadialProfile::Sampled { .. } => self
                .spline
                .as_ref()
                .expect("sampled profile with valid samples")
                .eval(t),
        }
    }

    fn parameter_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |field: String, message: String| {
            out.push(Violation {
                field,
                kind: ViolationKind::InvalidParameter,
                message,
                angles: None,
            })
        };
        if self.dim < 2 {
            bad("dim".into(), format!("must be at least 2, got {}", self.dim));
        }
        if !(self.star_radius > 0.0 && self.star_radius.is_finite()) {
            bad(
                "star_radius".into(),
                format!("must be a positive finite number, got {}", self.star_radius),
            );
        }
        if self.grid == Some(0) {
            bad("grid.angular".into(), "must be positive".into());
        }
        match &self.profile {
            RadialProfile::Ball { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    bad("params.radius".into(), format!("must be positive, got {radius}"));
                }
            }
            RadialProfile::Ellipse { semi_axes } => {
                if semi_axes.len() != self.dim {
                    bad(
                        "params.semi_axes".into(),
                        format!("expected {} semi-axes, got {}", self.dim, semi_axes.len()),
                    );
                }
                for (i, p) in semi_axes.iter().enumerate() {
                    if !(*p > 0.0 && p.is_finite()) {
                        bad(format!("params.semi_axes[{i}]"), format!("must be positive, got {p}"));
                    }
                }
            }
            RadialProfile::RadialFourier { constant, cos, sin } => {
                if self.dim != 2 {
                    bad("dim".into(), "radial_fourier profiles require dim = 2".into());
                }
                if !constant.is_finite() {
                    bad("params.constant".into(), "must be finite".into());
                }
                for (name, list) in [("cos", cos), ("sin", sin)] {
                    for (i, c) in list.iter().enumerate() {
                        if !c.is_finite() {
                            bad(format!("params.{name}[{i}]"), "must be finite".into());
                        }
                    }
                }
            }
            RadialProfile::Sampled { theta, r0 } => {
                if self.dim != 2 {
                    bad("dim".into(), "sampled profiles require dim = 2".into());
                }
                if theta.len() != r0.len() {
                    bad(
                        "params.r0".into(),
                        format!("length {} differs from params.theta length {}", r0.len(), theta.len()),
                    );
                }
                if theta.len() < 4 {
                    bad("params.theta".into(), "at least 4 samples are required".into());
                }
                if let Some(i) = theta.iter().position(|t| !(0.0..2.0 * PI).contains(t)) {
                    bad(format!("params.theta[{i}]"), "must lie in [0, 2 pi)".into());
                }
                if let Some(i) = theta.windows(2).position(|w| !(w[0] < w[1])) {
                    bad(format!("params.theta[{}]", i + 1), "angles must be strictly increasing".into());
                }
                if let Some(i) = r0.iter().position(|r| !(*r > 0.0 && r.is_finite())) {
                    bad(format!("params.r0[{i}]"), "must be positive".into());
                }
            }
        }
        out
    }

    /// Grid of angle tuples used for maxima and validation.
    fn angle_grid(&self, opts: &ShapeOptions) -> AngleGrid {
        if self.dim == 2 {
            if let RadialProfile::Sampled { theta, .. } = &self.profile {
                let spacing = theta
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .chain(std::iter::once(theta[0] + 2.0 * PI - theta[theta.len() - 1]))
                    .fold(0.0, f64::max);
                return AngleGrid {
                    axes: vec![theta.clone()],
                    spacing: vec![spacing],
                    periodic_last: true,
                };
            }
            let m = opts.grid_per_angle.or(self.grid).unwrap_or(DEFAULT_GRID_2D);
            let h = 2.0 * PI / m as f64;
            return AngleGrid {
                axes: vec![(0..m).map(|k| h * k as f64).collect()],
                spacing: vec![h],
                periodic_last: true,
            };
        }
        let angles = self.dim - 1;
        let cap = (MAX_GRID_POINTS_ND as f64).powf(1.0 / angles as f64).floor() as usize;
        let k = opts
            .grid_per_angle
            .or(self.grid)
            .unwrap_or(DEFAULT_GRID_ND)
            .min(cap)
            .max(3);
        let mut axes = Vec::with_capacity(angles);
        let mut spacing = Vec::with_capacity(angles);
        // odd count so the equator t = pi/2 is a grid point
        let kp = k | 1;
        for _ in 0..angles - 1 {
            let h = PI / (kp - 1) as f64;
            axes.push((0..kp).map(|i| h * i as f64).collect());
            spacing.push(h);
        }
        let h = 2.0 * PI / k as f64;
        axes.push((0..k).map(|i| h * i as f64).collect());
        spacing.push(h);
        AngleGrid {
            axes,
            spacing,
            periodic_last: true,
        }
    }

    /// Checks every invariant; empty iff the domain is valid at grid resolution.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.parameter_violations();
        if !out.is_empty() {
            return out;
        }
        let grid = self.angle_grid(&ShapeOptions::default());
        let a = self.star_radius;
        let mut min_r = (f64::INFINITY, Vec::new());
        let mut min_tangent = (f64::INFINITY, Vec::new());
        grid.for_each(|angles| {
            let (r, _) = self.radial(angles);
            if r < min_r.0 {
                min_r = (r, angles.to_vec());
            }
            if self.dim == 2 {
                let (r, dr) = self.planar(angles[0]);
                let dist = r * r / (r * r + dr * dr).sqrt();
                if dist < min_tangent.0 {
                    min_tangent = (dist, angles.to_vec());
                }
            }
        });
        let field = match &self.profile {
            RadialProfile::Ball { .. } => "params.radius",
            RadialProfile::Ellipse { .. } => "params.semi_axes",
            RadialProfile::RadialFourier { .. } => "params",
            RadialProfile::Sampled { .. } => "params.r0",
        };
        if !(min_r.0 > 0.0) {
            out.push(Violation {
                field: field.into(),
                kind: ViolationKind::NonPositiveRadius,
                message: format!("r0 = {} <= 0 at theta={}", min_r.0, fmt_angles(&min_r.1)),
                angles: Some(min_r.1.clone()),
            });
        }
        if min_r.0 < a * (1.0 - VALIDATION_SLACK) {
            out.push(Violation {
                field: "star_radius".into(),
                kind: ViolationKind::BallNotInside,
                message: format!(
                    "r0 < a at theta={} (r0 = {}, a = {})",
                    fmt_angles(&min_r.1),
                    min_r.0,
                    a
                ),
                angles: Some(min_r.1),
            });
        }
        if self.dim == 2 && min_tangent.0 < a * (1.0 - VALIDATION_SLACK) {
            out.push(Violation {
                field: "star_radius".into(),
                kind: ViolationKind::TangentDistance,
                message: format!(
                    "boundary tangent passes at distance {} < a = {} at theta={}",
                    min_tangent.0,
                    a,
                    fmt_angles(&min_tangent.1)
                ),
                angles: Some(min_tangent.1),
            });
        }
        out
    }

    /// Non-fatal notes about what validation could not check.
    pub fn warnings(&self) -> Vec<String> {
        if self.dim >= 3 {
            vec![format!(
                "star-shapedness with respect to the ball is asserted by the user for dim = {}; only r0 >= a was checked",
                self.dim
            )]
        } else {
            Vec::new()
        }
    }

    pub fn validated(self) -> Result<Self, DomainError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(DomainError::Invalid(v))
        }
    }
}

fn fmt_angles(a: &[f64]) -> String {
    if a.len() == 1 {
        format!("{}", a[0])
    } else {
        format!("{a:?}")
    }
}

struct AngleGrid {
    axes: Vec<Vec<f64>>,
    spacing: Vec<f64>,
    periodic_last: bool,
}

impl AngleGrid {
    fn points_per_angle(&self) -> usize {
        self.axes.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    /// Visits every tuple in lexicographic order (last angle fastest).
    fn for_each<F: FnMut(&[f64])>(&self, mut f: F) {
        let dims = self.axes.len();
        let mut idx = vec![0usize; dims];
        let mut cur: Vec<f64> = self.axes.iter().map(|a| a[0]).collect();
        loop {
            f(&cur);
            let mut d = dims;
            loop {
                if d == 0 {
                    return;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.axes[d].len() {
                    cur[d] = self.axes[d][idx[d]];
                    break;
                }
                idx[d] = 0;
                cur[d] = self.axes[d][0];
            }
        }
    }

    /// Grid maximum followed by golden refinement in a box of one grid
    /// spacing around it. With several angles, coordinate sweeps repeat until
    /// they stop improving.
    fn maximize<F: Fn(&[f64]) -> f64>(&self, f: F) -> Maximum {
        let mut best = (f64::NEG_INFINITY, Vec::new());
        self.for_each(|a| {
            let v = f(a);
            if v > best.0 {
                best = (v, a.to_vec());
            }
        });
        let (grid_value, mut arg) = best;
        let start = arg.clone();
        let mut refined = grid_value;
        let last = self.axes.len() - 1;
        let sweeps = if self.axes.len() == 1 { 1 } else { MAX_SWEEPS };
        for _ in 0..sweeps {
            let before = refined;
            for j in 0..self.axes.len() {
                let h = self.spacing[j];
                let (lo, hi) = if j == last && self.periodic_last {
                    (start[j] - h, start[j] + h)
                } else {
                    ((start[j] - h).max(0.0), (start[j] + h).min(PI))
                };
                let (x, v) = golden_refine(
                    |t| {
                        let mut probe = arg.clone();
                        probe[j] = t;
                        f(&probe)
                    },
                    (lo, hi),
                    1e-12,
                );
                if v > refined {
                    refined = v;
                    arg[j] = x;
                }
            }
            if refined - before <= 1e-15 * refined.abs() {
                break;
            }
        }
        Maximum {
            grid_value,
            value: refined.max(grid_value),
            argmax: arg,
        }
    }
}

struct Maximum {
    grid_value: f64,
    value: f64,
    argmax: Vec<f64>,
}

/// Eccentricity, shape factor and their grid diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeFactors {
    /// `max r0 / a`.
    pub eta: f64,
    /// `max |grad_S r0| / r0`.
    pub q_factor: f64,
    /// Grid points per angle.
    pub grid_resolution: usize,
    /// Refined value minus grid value for `eta`.
    pub eta_error: f64,
    /// Refined value minus grid value for `q_factor`.
    pub q_error: f64,
    pub eta_argmax: Vec<f64>,
    pub q_argmax: Vec<f64>,
}

/// Computes `eta` and `Q` on a validated domain.
pub fn shape_factors(dom: &StarDomain, opts: &ShapeOptions) -> Result<ShapeFactors, DomainError> {
    let v = dom.validate();
    if !v.is_empty() {
        return Err(DomainError::Invalid(v));
    }
    let grid = dom.angle_grid(opts);
    let a = dom.star_radius;
    let eta = grid.maximize(|t| dom.radial(t).0 / a);
    let q = grid.maximize(|t| {
        let (r, g) = dom.radial(t);
        g / r
    });
    let check = |quantity: &'static str, m: &Maximum| {
        let estimate = m.value - m.grid_value;
        let tolerance = opts.tolerance * m.value.abs().max(1.0);
        if estimate > tolerance {
            Err(DomainError::Unresolved {
                quantity,
                estimate,
                tolerance,
            })
        } else {
            Ok(())
        }
    };
    // analytic profiles are evaluated exactly during refinement, so only
    // interpolated samples can be under-resolved
    if matches!(dom.profile, RadialProfile::Sampled { .. }) {
        check("eta", &eta)?;
        check("Q", &q)?;
    }
    Ok(ShapeFactors {
        eta: eta.value.max(1.0),
        q_factor: q.value.max(0.0),
        grid_resolution: grid.points_per_angle(),
        eta_error: eta.value - eta.grid_value,
        q_error: q.value - q.grid_value,
        eta_argmax: eta.argmax,
        q_argmax: q.argmax,
    })
}

/// `max r0 / a` with default options.
pub fn eccentricity(dom: &StarDomain) -> Result<f64, DomainError> {
    Ok(shape_factors(dom, &ShapeOptions::default())?.eta)
}

/// `max |grad_S r0| / r0` with default options.
pub fn shape_factor_q(dom: &StarDomain) -> Result<f64, DomainError> {
    Ok(shape_factors(dom, &ShapeOptions::default())?.q_factor)
}

/// Tensor rule on a planar star domain: `radial_order` Gauss-Legendre nodes on
/// `[0, r0(t)]` per angle and an `angular_points` periodic trapezoid in `t`.
#[derive(Debug, Clone)]
pub struct PolarRule {
    /// `(x1, x2, weight)`.
    pub points: Vec<(f64, f64, f64)>,
    pub radial_order: usize,
    pub angular_points: usize,
}

impl PolarRule {
    pub fn new(dom: &StarDomain, radial_order: usize, angular_points: usize) -> Result<Self, DomainError> {
        if dom.dim() != 2 {
            return Err(DomainError::UnsupportedDimension {
                dim: dom.dim(),
                what: "polar quadrature",
            });
        }
        if !(1..=MAX_GAUSS_POINTS).contains(&radial_order) {
            return Err(DomainError::Quadrature(format!(
                "radial order {radial_order} outside 1..={MAX_GAUSS_POINTS}"
            )));
        }
        if angular_points < 4 {
            return Err(DomainError::Quadrature(format!(
                "angular points {angular_points} < 4"
            )));
        }
        let gl = gauss_legendre(radial_order)?;
        let dt = 2.0 * PI / angular_points as f64;
        let mut points = Vec::with_capacity(radial_order * angular_points);
        for k in 0..angular_points {
            let t = dt * k as f64;
            let (s, c) = t.sin_cos();
            let (r0, _) = dom.planar(t);
            let half = 0.5 * r0;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let r = half * (x + 1.0);
                points.push((r * c, r * s, dt * w * half * r));
            }
        }
        Ok(Self {
            points,
            radial_order,
            angular_points,
        })
    }

    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().map(|&(x, y, w)| w * f(x, y)).sum()
    }
}

/// `int_Omega f` over a planar star domain.
pub fn polar_quadrature<F: Fn(f64, f64) -> f64>(
    dom: &StarDomain,
    f: F,
    radial_order: usize,
    angular_points: usize,
) -> Result<f64, DomainError> {
    Ok(PolarRule::new(dom, radial_order, angular_points)?.integrate(f))
}

/// Shape family tag of the JSON domain file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Ball,
    Ellipse,
    RadialFourier,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub angular: usize,
}

/// JSON domain specification file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub dim: usize,
    pub kind: DomainKind,
    pub star_radius: f64,
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallParams {
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipseParams {
    semi_axes: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FourierParams {
    constant: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledParams {
    theta: Vec<f64>,
    r0: Vec<f64>,
}

fn parse_error(prefix: &str, e: serde_path_to_error::Error<serde_json::Error>) -> DomainError {
    let inner = e.path().to_string();
    let path = if inner == "." || inner.is_empty() {
        prefix.to_string()
    } else if prefix.is_empty() {
        inner
    } else if inner.starts_with('[') {
        format!("{prefix}{inner}")
    } else {
        format!("{prefix}.{inner}")
    };
    let path = if path.is_empty() { "<root>".into() } else { path };
    DomainError::Parse {
        path,
        message: e.into_inner().to_string(),
    }
}

fn params<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, DomainError> {
    serde_path_to_error::deserialize(v).map_err(|e| parse_error("params", e))
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self, DomainError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| parse_error("", e))
    }

    pub fn to_domain(&self) -> Result<StarDomain, DomainError> {
        let profile = match self.kind {
            DomainKind::Ball => {
                let p: BallParams = params(&self.params)?;
                RadialProfile::Ball { radius: p.radius }
            }
            DomainKind::Ellipse => {
                let p: EllipseParams = params(&self.params)?;
                RadialProfile::Ellipse {
                    semi_axes: p.semi_axes,
                }
            }
            DomainKind::RadialFourier => {
                let p: FourierParams = params(&self.params)?;
                RadialProfile::RadialFourier {
                    constant: p.constant,
                    cos: p.cos,
                    sin: p.sin,
                }
            }
            DomainKind::Sampled => {
                let p: SampledParams = params(&self.params)?;
                RadialProfile::Sampled {
                    theta: p.theta,
                    r0: p.r0,
                }
            }
        };
        let mut dom = StarDomain::new(self.dim, self.star_radius, profile);
        if let Some(g) = &self.grid {
            dom = dom.with_grid(g.angular);
        }
        Ok(dom)
    }
}
