//! Entangled two-branch wave function of the test particle and its pointer.
//!
//! Everything is expressed in primed (dimensionless) variables: positions in
//! units of the initial packet widths, time as `t' = v_y t / b`. The state is
//!
//! ```text
//! Ψ = Φ₊ + Φ₋,   Φ± = φ±(x') · φ(y') · Π_n χn±(z'_n)
//! ```
//!
//! where every factor is a freely spreading Gaussian packet. The upper-slit
//! branch `Φ₊` starts at `x' = +d'` and moves with velocity `−ξx`, its pointer
//! packets move with `Ξn⁺`; the lower branch mirrors this.
//!
//! Both branches are kept as `(log R, S)` pairs so that amplitude ratios never
//! under- or overflow. Normalization constants and the spreading prefactor are
//! identical in the two branches and are dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `ρ / max(R₁², R₂²)` a configuration counts as a node.
pub const DEFAULT_NODE_EPSILON: f64 = 1e-13;

fn default_node_epsilon() -> f64 {
    DEFAULT_NODE_EPSILON
}

/// Velocities of the pointer packets in the two branches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Pointer {
    /// `n` particles of one solid pointer: every packet moves with `+xi` in the
    /// upper branch and `−xi` in the lower one.
    Single { xi: f64, n: usize },
    /// Arbitrary per-particle pairs `[Ξn⁺, Ξn⁻]`.
    Table { velocities: Vec<[f64; 2]> },
}

impl Pointer {
    /// One-particle pointer per slit: the first moves only for the upper
    /// branch, the second only for the lower one.
    pub fn two_pointer(xi: f64) -> Self {
        Pointer::Table {
            velocities: vec![[xi, 0.0], [0.0, xi]],
        }
    }

    pub fn n_particles(&self) -> usize {
        match self {
            Pointer::Single { n, .. } => *n,
            Pointer::Table { velocities } => velocities.len(),
        }
    }

    /// `(Ξn⁺, Ξn⁻)` for particle `n` (zero-based).
    #[inline]
    pub fn velocity_pair(&self, n: usize) -> (f64, f64) {
        match self {
            Pointer::Single { xi, .. } => (*xi, -*xi),
            Pointer::Table { velocities } => (velocities[n][0], velocities[n][1]),
        }
    }

    /// The common `Ξ` when every entry is `(+Ξ, −Ξ)`.
    ///
    /// An empty table counts as single-pointer mode with `Ξ = 0`.
    pub fn single_xi(&self) -> Option<f64> {
        match self {
            Pointer::Single { xi, .. } => Some(*xi),
            Pointer::Table { velocities } => {
                let Some(first) = velocities.first() else {
                    return Some(0.0);
                };
                let xi = first[0];
                velocities
                    .iter()
                    .all(|v| v[0] == xi && v[1] == -xi)
                    .then_some(xi)
            }
        }
    }
}

/// Dimensionless parameters of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    /// ξx = m v_x a / ħ
    pub xi_x: f64,
    /// ξy = m v_y b / ħ
    pub xi_y: f64,
    /// a / b
    pub r: f64,
    /// a / c
    #[serde(rename = "R")]
    pub big_r: f64,
    /// m / M
    pub mu: f64,
    /// d / a
    pub d_prime: f64,
    pub pointer: Pointer,
    #[serde(default = "default_node_epsilon")]
    pub node_epsilon: f64,
}

impl ScenarioParams {
    pub fn new(
        xi_x: f64,
        xi_y: f64,
        r: f64,
        big_r: f64,
        mu: f64,
        d_prime: f64,
        pointer: Pointer,
    ) -> Result<Self> {
        let params = ScenarioParams {
            xi_x,
            xi_y,
            r,
            big_r,
            mu,
            d_prime,
            pointer,
            node_epsilon: DEFAULT_NODE_EPSILON,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("xi_y", self.xi_y),
            ("r", self.r),
            ("R", self.big_r),
            ("mu", self.mu),
            ("d_prime", self.d_prime),
            ("node_epsilon", self.node_epsilon),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if !self.xi_x.is_finite() {
            return Err(Error::InvalidParams(format!(
                "xi_x must be finite, got {}",
                self.xi_x
            )));
        }
        match &self.pointer {
            Pointer::Single { xi, .. } if !xi.is_finite() => Err(Error::InvalidParams(format!(
                "pointer xi must be finite, got {xi}"
            ))),
            Pointer::Table { velocities } if velocities.iter().flatten().any(|v| !v.is_finite()) => {
                Err(Error::InvalidParams(
                    "pointer velocity table has non-finite entries".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn n_particles(&self) -> usize {
        self.pointer.n_particles()
    }

    pub fn single_pointer_xi(&self) -> Option<f64> {
        self.pointer.single_xi()
    }

    pub fn is_single_pointer(&self) -> bool {
        self.single_pointer_xi().is_some()
    }

    /// Same scenario with a single-pointer `n` replaced.
    pub fn with_n_particles(&self, n: usize) -> Result<Self> {
        let xi = self.single_pointer_xi().ok_or_else(|| {
            Error::Mode("cannot change N of a heterogeneous pointer table".into())
        })?;
        Ok(ScenarioParams {
            pointer: Pointer::Single { xi, n },
            ..self.clone()
        })
    }

    pub fn with_node_epsilon(mut self, eps: f64) -> Self {
        self.node_epsilon = eps;
        self
    }

    /// Velocity prefactor of the x coordinate, `1 / (r² ξy)`.
    #[inline]
    pub fn lambda_x(&self) -> f64 {
        1.0 / (self.r * self.r * self.xi_y)
    }

    /// Velocity prefactor of the y coordinate, `1 / ξy`.
    #[inline]
    pub fn lambda_y(&self) -> f64 {
        1.0 / self.xi_y
    }

    /// Velocity prefactor of each pointer coordinate, `μ R² / (r² ξy)`.
    #[inline]
    pub fn lambda_z(&self) -> f64 {
        self.mu * self.big_r * self.big_r / (self.r * self.r * self.xi_y)
    }

    /// Primed speed at which the pointer packets separate, `Ξ μ R² / (r² ξy)`.
    pub fn pointer_packet_speed(&self, xi: f64) -> f64 {
        xi * self.lambda_z()
    }

    /// Pointer spreading factor `s(t') = √(1 + 4 λz² t'²)`.
    pub fn pointer_spreading(&self, t_prime: f64) -> f64 {
        let tau = 2.0 * self.lambda_z() * t_prime;
        (1.0 + tau * tau).sqrt()
    }

    pub(crate) fn x_packet(&self, branch: Branch) -> Packet {
        let s = branch.sign();
        Packet::new(s * self.d_prime, -s * self.xi_x, self.lambda_x())
    }

    pub(crate) fn y_packet(&self) -> Packet {
        Packet::new(0.0, self.xi_y, self.lambda_y())
    }

    pub(crate) fn z_packet(&self, branch: Branch, n: usize) -> Packet {
        let (up, down) = self.pointer.velocity_pair(n);
        let k = match branch {
            Branch::Upper => up,
            Branch::Lower => down,
        };
        Packet::new(0.0, k, self.lambda_z())
    }
}

/// Fast-pointer figure of merit `E = (Ξ/ξx) R² d' μ`; `E > 1` means the pointer
/// separates before the test packets meet.
pub fn fast_pointer_e(params: &ScenarioParams) -> Result<f64> {
    let xi = params
        .single_pointer_xi()
        .ok_or_else(|| Error::Mode("E is undefined for a heterogeneous pointer".into()))?;
    Ok(xi / params.xi_x * params.big_r * params.big_r * params.d_prime * params.mu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Upper => Branch::Lower,
            Branch::Lower => Branch::Upper,
        }
    }
}

/// A free Gaussian packet `exp{i k u − (u − u₀ − kλt)² / (1 + 2iλt)}` times its
/// Galilean phase `exp(−i k² λ t / 2)`.
///
/// `λ` is the coordinate's velocity prefactor, so `kλ` is the primed group
/// velocity and `2λt` the spreading parameter.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Packet {
    center0: f64,
    k: f64,
    lambda: f64,
}

impl Packet {
    pub(crate) fn new(center0: f64, k: f64, lambda: f64) -> Self {
        Packet { center0, k, lambda }
    }

    #[inline]
    fn center(&self, t: f64) -> f64 {
        self.center0 + self.k * self.lambda * t
    }

    /// `(log |·|, arg ·)` at `u`.
    #[inline]
    pub(crate) fn value(&self, u: f64, t: f64) -> (f64, f64) {
        let tau = 2.0 * self.lambda * t;
        let den = 1.0 + tau * tau;
        let du = u - self.center(t);
        let q = du * du / den;
        let phase = self.k * u + tau * q - 0.5 * self.k * self.k * self.lambda * t;
        (-q, phase)
    }

    /// `(∂u log |·|, ∂u arg ·)` at `u`.
    #[inline]
    pub(crate) fn gradient(&self, u: f64, t: f64) -> (f64, f64) {
        let tau = 2.0 * self.lambda * t;
        let den = 1.0 + tau * tau;
        let du = u - self.center(t);
        (-2.0 * du / den, self.k + 2.0 * tau * du / den)
    }
}

/// A Bohmian point in configuration space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub t_prime: f64,
    pub x: f64,
    pub y: f64,
    pub z: Vec<f64>,
}

impl Configuration {
    pub fn new(t_prime: f64, x: f64, y: f64, z: Vec<f64>) -> Self {
        Configuration { t_prime, x, y, z }
    }

    pub fn check(&self, params: &ScenarioParams) -> Result<()> {
        if self.z.len() != params.n_particles() {
            return Err(Error::InvalidInput(format!(
                "configuration has {} pointer coordinates, scenario has N={}",
                self.z.len(),
                params.n_particles()
            )));
        }
        let finite = self.t_prime.is_finite()
            && self.x.is_finite()
            && self.y.is_finite()
            && self.z.iter().all(|z| z.is_finite());
        if !finite {
            return Err(Error::InvalidInput("configuration has non-finite entries".into()));
        }
        Ok(())
    }

    /// Reflection through the symmetry plane: `X' → −X'`, `Z'n → −Z'n`.
    pub fn mirrored(&self) -> Self {
        Configuration {
            t_prime: self.t_prime,
            x: -self.x,
            y: self.y,
            z: self.z.iter().map(|z| -z).collect(),
        }
    }

    /// `Σ̂' = Σ Z'n / √N`, zero for an empty pointer.
    pub fn sigma_hat(&self) -> f64 {
        sigma_hat(&self.z)
    }
}

pub fn sigma_hat(z: &[f64]) -> f64 {
    if z.is_empty() {
        0.0
    } else {
        z.iter().sum::<f64>() / (z.len() as f64).sqrt()
    }
}

/// Log-amplitudes and phases of the two branches at one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchEval {
    pub log_r1: f64,
    pub log_r2: f64,
    pub s1: f64,
    pub s2: f64,
    /// `log(R₁/R₂)`
    pub log_omega: f64,
    /// `S₁ − S₂`
    pub delta_s: f64,
}

impl BranchEval {
    pub fn new(log_r1: f64, s1: f64, log_r2: f64, s2: f64) -> Self {
        BranchEval {
            log_r1,
            log_r2,
            s1,
            s2,
            log_omega: log_r1 - log_r2,
            delta_s: s1 - s2,
        }
    }

    pub fn log_r(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Upper => self.log_r1,
            Branch::Lower => self.log_r2,
        }
    }
}

/// Branch values at a configuration. Panics if `config.z` does not have
/// `params.n_particles()` entries.
pub fn eval_branches(config: &Configuration, params: &ScenarioParams) -> BranchEval {
    assert_eq!(
        config.z.len(),
        params.n_particles(),
        "configuration does not match the scenario's pointer size"
    );
    eval_branches_at(config.t_prime, config.x, config.y, &config.z, params)
}

pub(crate) fn eval_branches_at(
    t: f64,
    x: f64,
    y: f64,
    z: &[f64],
    params: &ScenarioParams,
) -> BranchEval {
    let (ly, sy) = params.y_packet().value(y, t);
    let mut out = [(ly, sy); 2];
    for (slot, branch) in out.iter_mut().zip([Branch::Upper, Branch::Lower]) {
        let (lx, sx) = params.x_packet(branch).value(x, t);
        slot.0 += lx;
        slot.1 += sx;
        for (n, &zn) in z.iter().enumerate() {
            let (lz, sz) = params.z_packet(branch, n).value(zn, t);
            slot.0 += lz;
            slot.1 += sz;
        }
    }
    BranchEval::new(out[0].0, out[0].1, out[1].0, out[1].1)
}

/// Branch weights `R₁²/ρ`, `R₂²/ρ`, `R₁R₂/ρ` with `ρ = |Ψ|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingWeights {
    pub w1: f64,
    pub w2: f64,
    pub wc: f64,
    /// `ρ / max(R₁², R₂²)`, in `[0, 4]`.
    pub density: f64,
}

/// Weights computed relative to the dominant branch; fails at a node.
pub fn mixing_weights(be: &BranchEval, eps: f64) -> Result<MixingWeights> {
    // q = R_small / R_large
    let q = (-be.log_omega.abs()).exp();
    let density = 1.0 + q * q + 2.0 * q * be.delta_s.cos();
    if density.is_nan() || density < eps {
        return Err(Error::Node { density });
    }
    let (big, small) = (1.0 / density, q * q / density);
    let (w1, w2) = if be.log_omega >= 0.0 {
        (big, small)
    } else {
        (small, big)
    };
    Ok(MixingWeights {
        w1,
        w2,
        wc: q / density,
        density,
    })
}
