use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::region::RegionModelKind;

/// How the eikonal stencil radius is chosen each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilPolicy {
    /// From the largest anisotropy bound of the assembled metrics.
    Auto,
    Fixed(u32),
}

impl FromStr for StencilPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(StencilPolicy::Auto),
            other => match other.parse::<u32>() {
                Ok(r) if r >= 1 => Ok(StencilPolicy::Fixed(r)),
                _ => Err(Error::InvalidParameter(format!(
                    "stencil must be 'auto' or a positive radius, got '{other}'"
                ))),
            },
        }
    }
}

impl fmt::Display for StencilPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StencilPolicy::Auto => write!(f, "auto"),
            StencilPolicy::Fixed(r) => write!(f, "{r}"),
        }
    }
}

/// Parameters of the evolution engine.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFrontConfig {
    /// Band half-width `ℓ`.
    pub ell: f64,
    /// Asymmetry weight `μ`.
    pub mu: f64,
    /// Speed-weight exponent `α`.
    pub alpha: f64,
    /// Gradient smoothing scale.
    pub sigma: f64,
    pub beta: f64,
    pub rho: f64,
    /// Tensor smoothing scale.
    pub q: f64,
    /// Motion vector smoothing scale.
    pub a: f64,
    pub model: RegionModelKind,
    pub max_iters: usize,
    pub stop_fraction: f64,
    pub stencil: StencilPolicy,
    /// Forces `μ = 0`.
    pub symmetric_mode: bool,
    /// `ψ_i ≡ 1` and a symmetric metric on the contour itself.
    pub single_metric_mode: bool,
    pub seed: u64,
    pub em_iters: usize,
    pub bins: usize,
    pub bandwidth: f64,
}

impl Default for DualFrontConfig {
    fn default() -> Self {
        DualFrontConfig {
            ell: 10.0,
            mu: 5.0,
            alpha: 0.2,
            sigma: 1.0,
            beta: 1.0,
            rho: 4.0,
            q: 2.0,
            a: 3.0,
            model: RegionModelKind::PiecewiseConstant,
            max_iters: 200,
            stop_fraction: 0.002,
            stencil: StencilPolicy::Auto,
            symmetric_mode: false,
            single_metric_mode: false,
            seed: 0,
            em_iters: 10,
            bins: 64,
            bandwidth: 2.0,
        }
    }
}

/// Every key accepted by [`DualFrontConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "ell",
    "mu",
    "alpha",
    "sigma",
    "beta",
    "rho",
    "q",
    "a",
    "model",
    "max_iters",
    "stop_fraction",
    "stencil",
    "symmetric_mode",
    "single_metric_mode",
    "seed",
    "em_iters",
    "bins",
    "bandwidth",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("invalid value '{value}' for key '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidParameter(format!(
            "invalid value '{value}' for key '{key}'"
        ))),
    }
}

impl DualFrontConfig {
    /// Sets one field from its textual form. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "ell" => self.ell = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "sigma" => self.sigma = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "rho" => self.rho = parse(key, value)?,
            "q" => self.q = parse(key, value)?,
            "a" => self.a = parse(key, value)?,
            "model" => self.model = value.parse()?,
            "max_iters" => self.max_iters = parse(key, value)?,
            "stop_fraction" => self.stop_fraction = parse(key, value)?,
            "stencil" => self.stencil = value.parse()?,
            "symmetric_mode" => self.symmetric_mode = parse_bool(key, value)?,
            "single_metric_mode" => self.single_metric_mode = parse_bool(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "em_iters" => self.em_iters = parse(key, value)?,
            "bins" => self.bins = parse(key, value)?,
            "bandwidth" => self.bandwidth = parse(key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Current value of `key` in the form accepted by [`set`](Self::set).
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "ell" => self.ell.to_string(),
            "mu" => self.mu.to_string(),
            "alpha" => self.alpha.to_string(),
            "sigma" => self.sigma.to_string(),
            "beta" => self.beta.to_string(),
            "rho" => self.rho.to_string(),
            "q" => self.q.to_string(),
            "a" => self.a.to_string(),
            "model" => self.model.to_string(),
            "max_iters" => self.max_iters.to_string(),
            "stop_fraction" => self.stop_fraction.to_string(),
            "stencil" => self.stencil.to_string(),
            "symmetric_mode" => self.symmetric_mode.to_string(),
            "single_metric_mode" => self.single_metric_mode.to_string(),
            "seed" => self.seed.to_string(),
            "em_iters" => self.em_iters.to_string(),
            "bins" => self.bins.to_string(),
            "bandwidth" => self.bandwidth.to_string(),
            _ => return None,
        })
    }

    /// Asymmetry weight actually used by the engine.
    pub fn effective_mu(&self) -> f64 {
        if self.symmetric_mode {
            0.0
        } else {
            self.mu
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.ell >= 2.0 && self.ell.is_finite()) {
            return bad(format!("ell must be >= 2, got {}", self.ell));
        }
        for (name, v) in [
            ("mu", self.mu),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("rho", self.rho),
            ("q", self.q),
            ("a", self.a),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be > 0, got {}", self.sigma));
        }
        if !(self.stop_fraction > 0.0 && self.stop_fraction < 1.0) {
            return bad(format!("stop_fraction must lie in (0, 1), got {}", self.stop_fraction));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return bad(format!("bandwidth must be > 0, got {}", self.bandwidth));
        }
        if self.bins < 2 {
            return bad(format!("bins must be >= 2, got {}", self.bins));
        }
        Ok(())
    }
}
