//! Continuous-time stage model with parametric uncertainty, lumped
//! disturbance channels, and band-limited measurement noise.
//!
//! The plant is the two-state servo axis
//!
//! ```text
//! ṗ = v
//! v̇ = −T_v·v + K·u + d(p, v)
//! ```
//!
//! integrated with classical fourth-order Runge–Kutta at a fine substep while
//! the control input is held (zero-order hold). Controllers see the nominal
//! pair (K̄, T̄_v); the true (K, T_v) may differ, which is how parametric
//! uncertainty enters the closed loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// True and nominal dynamics of the stage axis.
///
/// The composite gain `k` lumps actuator gain over moving mass; `t_v` is the
/// viscous coefficient over mass. Controllers are built against the nominal
/// `k_bar`/`t_v_bar`, so any mismatch acts as model uncertainty.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantParams {
    /// True composite gain K (m·s⁻²·V⁻¹), > 0.
    pub k: f64,
    /// True viscous ratio T_v (s⁻¹), ≥ 0.
    pub t_v: f64,
    /// Nominal gain K̄ the controller assumes, > 0.
    pub k_bar: f64,
    /// Nominal viscous ratio T̄_v the controller assumes, ≥ 0.
    pub t_v_bar: f64,
    /// Optional physical fields (mass kg, viscous coefficient N·s/m,
    /// actuator gain N/V); when present they must satisfy k = q/m and
    /// t_v = k_v/m exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalParams>,
}

/// Physical constants behind the composite plant parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Moving mass in kg.
    pub m: f64,
    /// Viscous coefficient in N·s/m.
    pub k_v: f64,
    /// Actuator gain in N/V.
    pub q: f64,
}

impl PlantParams {
    /// Composite parameters with no physical backing.
    pub fn new(k: f64, t_v: f64, k_bar: f64, t_v_bar: f64) -> Result<Self> {
        let params = PlantParams {
            k,
            t_v,
            k_bar,
            t_v_bar,
            physical: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// Derives the composite parameters from physical constants.
    pub fn from_physical(m: f64, k_v: f64, q: f64, k_bar: f64, t_v_bar: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::invalid("m", format!("mass must be positive, got {m}")));
        }
        let params = PlantParams {
            k: q / m,
            t_v: k_v / m,
            k_bar,
            t_v_bar,
            physical: Some(PhysicalParams { m, k_v, q }),
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks the parameter invariants; call after deserializing.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("k", self.k),
            ("t_v", self.t_v),
            ("k_bar", self.k_bar),
            ("t_v_bar", self.t_v_bar),
        ] {
            if !value.is_finite() {
                return Err(Error::invalid("plant", format!("{name} must be finite")));
            }
        }
        if self.k <= 0.0 || self.k_bar <= 0.0 {
            return Err(Error::invalid("plant", "gains k and k_bar must be positive"));
        }
        if self.t_v < 0.0 || self.t_v_bar < 0.0 {
            return Err(Error::invalid("plant", "viscous ratios must be non-negative"));
        }
        if let Some(ph) = self.physical {
            if self.k != ph.q / ph.m || self.t_v != ph.k_v / ph.m {
                return Err(Error::invalid(
                    "plant",
                    "composite fields must equal q/m and k_v/m exactly",
                ));
            }
        }
        Ok(())
    }
}

/// Lumped acceleration-level disturbance d(p, v) in m/s².
///
/// Channels: a bias, a residual sliding friction that opposes the direction
/// of motion, a position-periodic force ripple, and a step that latches on
/// permanently once the stage position reaches the trigger.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DisturbanceSpec {
    /// Constant bias term.
    pub constant: f64,
    /// Residual sliding friction magnitude; enters as −sgn(v)·friction_residual.
    pub friction_residual: f64,
    /// Force-ripple amplitude.
    pub ripple_amplitude: f64,
    /// Spatial period of the ripple in metres (sin(2π·p/period)).
    pub ripple_spatial_period: f64,
    /// Amplitude of the latched step disturbance.
    pub step_amplitude: f64,
    /// Position at which the step latches on.
    pub step_trigger_position: f64,
}

impl DisturbanceSpec {
    /// Checks the spec invariants; call after deserializing.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("constant", self.constant),
            ("friction_residual", self.friction_residual),
            ("ripple_amplitude", self.ripple_amplitude),
            ("ripple_spatial_period", self.ripple_spatial_period),
            ("step_amplitude", self.step_amplitude),
            ("step_trigger_position", self.step_trigger_position),
        ] {
            if !value.is_finite() {
                return Err(Error::invalid("disturbance", format!("{name} must be finite")));
            }
        }
        if self.ripple_amplitude != 0.0 && self.ripple_spatial_period <= 0.0 {
            return Err(Error::invalid(
                "disturbance",
                "ripple requires a positive spatial period",
            ));
        }
        Ok(())
    }

    /// Evaluates d at the given state. `step_latched` reflects whether the
    /// step trigger has already been crossed during the run.
    pub fn eval(&self, p: f64, v: f64, step_latched: bool) -> f64 {
        let mut d = self.constant;
        if self.friction_residual != 0.0 && v != 0.0 {
            d -= self.friction_residual * v.signum();
        }
        if self.ripple_amplitude != 0.0 {
            d += self.ripple_amplitude
                * (2.0 * std::f64::consts::PI * p / self.ripple_spatial_period).sin();
        }
        if step_latched {
            d += self.step_amplitude;
        }
        d
    }

    /// Whether any step channel is configured at all.
    pub fn has_step(&self) -> bool {
        self.step_amplitude != 0.0
    }
}

/// Band-limited white measurement noise: Gaussian samples of the given
/// variance through a one-pole low-pass. A cutoff at or above Nyquist
/// bypasses the filter so the configured variance is delivered exactly.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// White-noise variance per sample (m²); 0 disables the channel.
    pub power: f64,
    /// Low-pass cutoff in Hz.
    pub cutoff_hz: f64,
    /// Stream seed; identical seeds give identical noise.
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            power: 0.0,
            cutoff_hz: f64::INFINITY,
            seed: 0,
        }
    }
}

impl NoiseSpec {
    /// Checks the spec invariants; call after deserializing.
    pub fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power >= 0.0) {
            return Err(Error::invalid("noise", "power must be finite and >= 0"));
        }
        if self.power > 0.0 && !(self.cutoff_hz > 0.0) {
            return Err(Error::invalid("noise", "cutoff_hz must be positive"));
        }
        Ok(())
    }
}

/// Seeded measurement-noise stream realizing a [`NoiseSpec`] at a fixed
/// sample rate.
#[derive(Debug, Clone)]
pub struct NoiseChannel {
    sigma: f64,
    /// One-pole smoothing factor; 1.0 means the filter is bypassed.
    alpha: f64,
    filt: f64,
    rng: ChaCha8Rng,
    normal: Normal<f64>,
}

impl NoiseChannel {
    /// Builds the stream for the given sample rate.
    pub fn new(spec: &NoiseSpec, sample_rate_hz: f64) -> Result<Self> {
        spec.validate()?;
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::invalid(
                "sample_rate_hz",
                format!("must be positive, got {sample_rate_hz}"),
            ));
        }
        let nyquist = sample_rate_hz / 2.0;
        let alpha = if spec.cutoff_hz >= nyquist {
            1.0
        } else {
            1.0 - (-2.0 * std::f64::consts::PI * spec.cutoff_hz / sample_rate_hz).exp()
        };
        let sigma = spec.power.sqrt();
        Ok(NoiseChannel {
            sigma,
            alpha,
            filt: 0.0,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            normal: Normal::new(0.0, 1.0).expect("unit normal is well-formed"),
        })
    }

    /// Draws the next noise value.
    pub fn sample(&mut self) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let white = self.sigma * self.normal.sample(&mut self.rng);
        if self.alpha == 1.0 {
            white
        } else {
            self.filt += self.alpha * (white - self.filt);
            self.filt
        }
    }
}

/// Instantaneous plant state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    /// Position in metres.
    pub p: f64,
    /// Velocity in m/s.
    pub v: f64,
    /// Time in seconds.
    pub t: f64,
}

impl PlantState {
    /// State at rest at the origin.
    pub fn at_rest() -> Self {
        PlantState { p: 0.0, v: 0.0, t: 0.0 }
    }
}

/// Integrates the plant over one control period `h` with the input `u` held
/// constant, using `substeps` RK4 stages of size `h/substeps`.
///
/// The step disturbance latches permanently the first time the position
/// reaches its trigger; the latch is re-checked at every substep boundary and
/// held constant within a substep. Exceeding `v_bound` in speed aborts with a
/// divergence diagnostic, as does any non-finite state.
#[allow(clippy::too_many_arguments)]
pub fn plant_step(
    state: PlantState,
    params: &PlantParams,
    dist: &DisturbanceSpec,
    step_latched: &mut bool,
    u: f64,
    h: f64,
    substeps: u32,
    v_bound: f64,
) -> Result<PlantState> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", format!("step must be positive, got {h}")));
    }
    if substeps == 0 {
        return Err(Error::invalid("substeps", "at least one substep required"));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite {
            context: "control input u".into(),
            t: state.t,
        });
    }

    let dt = h / substeps as f64;
    let mut p = state.p;
    let mut v = state.v;

    for i in 0..substeps {
        if dist.has_step() && !*step_latched && p >= dist.step_trigger_position {
            *step_latched = true;
        }
        let latched = *step_latched;
        let accel = |p_: f64, v_: f64| -> f64 {
            -params.t_v * v_ + params.k * u + dist.eval(p_, v_, latched)
        };

        let k1p = v;
        let k1v = accel(p, v);
        let k2p = v + 0.5 * dt * k1v;
        let k2v = accel(p + 0.5 * dt * k1p, v + 0.5 * dt * k1v);
        let k3p = v + 0.5 * dt * k2v;
        let k3v = accel(p + 0.5 * dt * k2p, v + 0.5 * dt * k2v);
        let k4p = v + dt * k3v;
        let k4v = accel(p + dt * k3p, v + dt * k3v);

        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        let t_sub = state.t + dt * (i + 1) as f64;
        if !p.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite {
                context: "plant state".into(),
                t: t_sub,
            });
        }
        if v.abs() > v_bound {
            return Err(Error::Diverged {
                quantity: "v",
                value: v,
                bound: v_bound,
                t: t_sub,
            });
        }
    }
    if dist.has_step() && !*step_latched && p >= dist.step_trigger_position {
        *step_latched = true;
    }

    Ok(PlantState {
        p,
        v,
        t: state.t + h,
    })
}

/// Position measurement: true position plus the next noise-channel sample.
/// Deterministic for a given seed and call sequence.
pub fn measure(state: &PlantState, noise: &mut NoiseChannel) -> f64 {
    state.p + noise.sample()
}
