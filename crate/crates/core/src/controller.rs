//! The six control laws, their switching nonlinearities, gain schedules,
//! and the closed-form gain / error-bound calculators.
//!
//! All super-twisting variants share the structure
//! `u = u_eq − (h1/K̄)·Φ1(s) − ∫(h2/K̄)·Φ2(s) dt`, differing in the Φ
//! nonlinearity, in whether `h1`/`h2` vary with the acceleration, and in
//! which feedforward terms `u_eq` carries. The PID comparison law lives in
//! the same [`Controller`] so every family runs through one loop.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::PlantParams;
use crate::surface::{SlidingSurface, SurfaceSpec};
use crate::trajectory::Phase;

/// State-dependent exponent of the power-law switching term:
/// `α(s) = (4|s|+1) / (2(|s|+1))`, rising from 1/2 at the origin toward 2
/// for large |s|.
pub fn alpha_exponent(s: f64) -> f64 {
    let m = s.abs();
    (4.0 * m + 1.0) / (2.0 * (m + 1.0))
}

/// Shape of the Φ1/Φ2 switching nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchingForm {
    /// `Φ1 = |s|^{α(s)}·sgn(s)` with the state-dependent exponent.
    PowerLaw,
    /// `Φ1 = |s|^{1/2}·sgn(s)` — the classical constant-gain form.
    SquareRoot,
    /// `Φ1 = |s|^{1/2}·sgn(s) + h3·s` — square root plus a linear term.
    SquareRootLinear,
}

/// First switching nonlinearity Φ1. Odd in `s`; `Φ1(0) = 0`.
pub fn phi1(s: f64, form: SwitchingForm, h3: f64) -> f64 {
    let m = s.abs();
    match form {
        SwitchingForm::PowerLaw => m.powf(alpha_exponent(s)) * s.signum_or_zero(),
        SwitchingForm::SquareRoot => m.sqrt() * s.signum_or_zero(),
        SwitchingForm::SquareRootLinear => m.sqrt() * s.signum_or_zero() + h3 * s,
    }
}

/// Second switching nonlinearity `Φ2 = Φ1′(s)·Φ1(s)`, evaluated from the
/// closed-form derivative of each Φ1.
///
/// For the power-law form this is
/// `|s|^{2α}·sgn(s)·[α/|s| + α′·ln|s|]` with `α′ = 3/(2(|s|+1)²)`; the
/// factors are combined in log space so the `ln|s|` term decays cleanly as
/// `s → 0` instead of producing `0·(−∞)`. `Φ2(0) = 0` by the `sgn(0) = 0`
/// convention.
pub fn phi2(s: f64, form: SwitchingForm, h3: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let m = s.abs();
    let sign = s.signum_or_zero();
    match form {
        SwitchingForm::PowerLaw => {
            let alpha = alpha_exponent(s);
            let alpha_rate = 3.0 / (2.0 * (m + 1.0) * (m + 1.0));
            let log_m = m.ln();
            // |s|^{2α}·α/|s| = α·e^{(2α−1)·ln|s|};  |s|^{2α}·ln|s| in log space.
            sign * (alpha * ((2.0 * alpha - 1.0) * log_m).exp()
                + alpha_rate * (2.0 * alpha * log_m).exp() * log_m)
        }
        SwitchingForm::SquareRoot => 0.5 * sign,
        SwitchingForm::SquareRootLinear => {
            0.5 * sign + 1.5 * h3 * m.sqrt() * sign + h3 * h3 * s
        }
    }
}

/// `sgn` with `sgn(0) = 0`, used by every switching term.
trait SignumOrZero {
    fn signum_or_zero(self) -> Self;
}

impl SignumOrZero for f64 {
    fn signum_or_zero(self) -> f64 {
        if self == 0.0 {
            0.0
        } else {
            self.signum()
        }
    }
}

/// How the super-twisting gains `h1`, `h2` respond to the stage
/// acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainSchedule {
    /// Fixed gains.
    Constant {
        h1: f64,
        h2: f64,
        /// Linear switching-term weight for the square-root-linear forms.
        #[serde(default)]
        h3: f64,
    },
    /// Affine in the acceleration magnitude:
    /// `h1 = h1_slope·|v̇| + h1_offset`, likewise for `h2`.
    AffineInAccel {
        h1_slope: f64,
        h1_offset: f64,
        h2_slope: f64,
        h2_offset: f64,
        #[serde(default)]
        h3: f64,
    },
    /// Stability-derived gains: `h1`, `h2` computed from the quadratic-form
    /// parameters `p1, p2, p4`, the disturbance-bound constants `d1..d4`,
    /// and the target sliding-variable region radius `gamma`.
    Theorem {
        p1: f64,
        p2: f64,
        p4: f64,
        d1: f64,
        d2: f64,
        d3: f64,
        d4: f64,
        gamma: f64,
    },
}

impl GainSchedule {
    /// Validates mode-specific constraints; theorem mode enforces
    /// `p1 > 0`, `p2 < 0`, `p1·p4 − p2² > 0` here so per-sample evaluation
    /// never needs to re-check them.
    pub fn validate(&self) -> Result<()> {
        let finite = |arg: &'static str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(arg, format!("must be finite, got {v}")))
            }
        };
        match *self {
            GainSchedule::Constant { h1, h2, h3 } => {
                if !(h1.is_finite() && h1 > 0.0) || !(h2.is_finite() && h2 > 0.0) {
                    return Err(Error::invalid(
                        "h1/h2",
                        format!("constant gains must be > 0, got h1 = {h1}, h2 = {h2}"),
                    ));
                }
                finite("h3", h3)?;
                if h3 < 0.0 {
                    return Err(Error::invalid("h3", format!("must be ≥ 0, got {h3}")));
                }
            }
            GainSchedule::AffineInAccel {
                h1_slope,
                h1_offset,
                h2_slope,
                h2_offset,
                h3,
            } => {
                for (arg, v) in [
                    ("h1_slope", h1_slope),
                    ("h2_slope", h2_slope),
                    ("h3", h3),
                ] {
                    finite(arg, v)?;
                    if v < 0.0 {
                        return Err(Error::invalid(arg, format!("must be ≥ 0, got {v}")));
                    }
                }
                // Offsets keep the gains positive at zero acceleration.
                if !(h1_offset.is_finite() && h1_offset > 0.0)
                    || !(h2_offset.is_finite() && h2_offset > 0.0)
                {
                    return Err(Error::invalid(
                        "h1_offset/h2_offset",
                        format!(
                            "affine gain offsets must be > 0, got {h1_offset} and {h2_offset}"
                        ),
                    ));
                }
            }
            GainSchedule::Theorem {
                p1,
                p2,
                p4,
                d1,
                d2,
                d3,
                d4,
                gamma,
            } => {
                if !(p1.is_finite() && p1 > 0.0) {
                    return Err(Error::invalid("p1", format!("must be > 0, got {p1}")));
                }
                if !(p2.is_finite() && p2 < 0.0) {
                    return Err(Error::invalid("p2", format!("must be < 0, got {p2}")));
                }
                if !p4.is_finite() || p1 * p4 - p2 * p2 <= 0.0 {
                    return Err(Error::invalid(
                        "p4",
                        format!("requires p1·p4 − p2² > 0, got p1 = {p1}, p2 = {p2}, p4 = {p4}"),
                    ));
                }
                for (arg, v) in [("d1", d1), ("d2", d2), ("d3", d3), ("d4", d4)] {
                    finite(arg, v)?;
                    if v < 0.0 {
                        return Err(Error::invalid(
                            arg,
                            format!("disturbance bounds must be ≥ 0, got {v}"),
                        ));
                    }
                }
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(Error::invalid(
                        "gamma",
                        format!("target region radius must be > 0, got {gamma}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the schedule at a stage acceleration `v_dot`.
    ///
    /// All modes consume the magnitude |v̇|, keeping the gains positive for
    /// either direction of travel. Call [`GainSchedule::validate`] first;
    /// the theorem-mode formulas assume the `p` constraints hold.
    pub fn compute(&self, v_dot: f64) -> (f64, f64) {
        let accel = v_dot.abs();
        match *self {
            GainSchedule::Constant { h1, h2, .. } => (h1, h2),
            GainSchedule::AffineInAccel {
                h1_slope,
                h1_offset,
                h2_slope,
                h2_offset,
                ..
            } => (h1_slope * accel + h1_offset, h2_slope * accel + h2_offset),
            GainSchedule::Theorem {
                p1,
                p2,
                p4,
                d1,
                d2,
                d3,
                d4,
                gamma,
            } => {
                let delta1 = d1 + d2 / phi1(gamma, SwitchingForm::PowerLaw, 0.0);
                let delta2 = d3 * accel + d4;
                let lead = p4 / (p2.powi(3) - p1 * p2 * p4);
                let bracket = (-p2 * delta1 + p4 * delta2).powi(2) / 4.0
                    + p2 * p2 * p1 / p4
                    + p2 * p2 * delta2
                    - p1 * p2 * delta1;
                let h1 = lead * bracket;
                let h2 = (p1 - p2 * h1) / p4;
                (h1, h2)
            }
        }
    }

    /// The linear switching-term weight; zero for schedules without one.
    pub fn h3(&self) -> f64 {
        match *self {
            GainSchedule::Constant { h3, .. } => h3,
            GainSchedule::AffineInAccel { h3, .. } => h3,
            GainSchedule::Theorem { .. } => 0.0,
        }
    }
}

/// The six control laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerFamily {
    /// Power-law fractional variable-gain super-twisting (the full law).
    Pfvsta,
    /// Same law without the reference-acceleration feedforward.
    Ifvsta,
    /// Fractional-surface constant-gain super-twisting.
    Fcgsta,
    /// Variable-gain super-twisting on a linear surface.
    Vgsta,
    /// Constant-gain super-twisting on a linear surface.
    Cgsta,
    /// Variable-proportional-gain PID.
    Vgpid,
}

impl ControllerFamily {
    /// Which switching nonlinearity the family uses; `None` for PID.
    pub fn switching_form(&self) -> Option<SwitchingForm> {
        match self {
            ControllerFamily::Pfvsta | ControllerFamily::Ifvsta => {
                Some(SwitchingForm::PowerLaw)
            }
            ControllerFamily::Cgsta => Some(SwitchingForm::SquareRoot),
            ControllerFamily::Vgsta | ControllerFamily::Fcgsta => {
                Some(SwitchingForm::SquareRootLinear)
            }
            ControllerFamily::Vgpid => None,
        }
    }

    /// Whether the law injects the reference-acceleration feedforward.
    fn feedforward_by_default(&self) -> bool {
        !matches!(self, ControllerFamily::Ifvsta)
    }
}

impl fmt::Display for ControllerFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ControllerFamily::Pfvsta => "PFVSTA",
            ControllerFamily::Ifvsta => "IFVSTA",
            ControllerFamily::Fcgsta => "FCGSTA",
            ControllerFamily::Vgsta => "VGSTA",
            ControllerFamily::Cgsta => "CGSTA",
            ControllerFamily::Vgpid => "VGPID",
        };
        f.write_str(name)
    }
}

/// Gains of the PID comparison law. The proportional gain is raised by
/// `delta_kp_ad` during acceleration/deceleration phases and by
/// `delta_kp_other` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub delta_kp_ad: f64,
    pub delta_kp_other: f64,
}

impl PidGains {
    fn validate(&self) -> Result<()> {
        for (arg, v) in [
            ("kp", self.kp),
            ("ki", self.ki),
            ("kd", self.kd),
            ("delta_kp_ad", self.delta_kp_ad),
            ("delta_kp_other", self.delta_kp_other),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    arg,
                    format!("PID gains must be finite and ≥ 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Full description of one controller: the law, its sliding surface, its
/// gain schedule, and the nominal plant it linearizes against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub family: ControllerFamily,
    pub surface: SurfaceSpec,
    pub gains: GainSchedule,
    /// Nominal input gain K̄ of the plant model the law was derived for.
    pub k_bar: f64,
    /// Nominal velocity-feedback coefficient T̄_v.
    pub t_v_bar: f64,
    /// Inject the reference-acceleration feedforward into `u_eq`. Ignored
    /// (treated as false) by the feedforward-free family.
    #[serde(default = "default_true")]
    pub feedforward_enabled: bool,
    /// Optional symmetric clamp on the super-twisting integral state.
    #[serde(default)]
    pub z_limit: Option<f64>,
    /// PID gains; required by the PID family, ignored by the rest.
    #[serde(default)]
    pub pid: Option<PidGains>,
}

fn default_true() -> bool {
    true
}

impl ControllerSpec {
    /// Validates the surface, the gain schedule, the nominal plant, and
    /// family-specific requirements.
    pub fn validate(&self) -> Result<()> {
        self.surface.validate()?;
        self.gains.validate()?;
        if !(self.k_bar.is_finite() && self.k_bar > 0.0) {
            return Err(Error::invalid(
                "k_bar",
                format!("nominal input gain must be > 0, got {}", self.k_bar),
            ));
        }
        if !(self.t_v_bar.is_finite() && self.t_v_bar >= 0.0) {
            return Err(Error::invalid(
                "t_v_bar",
                format!("nominal velocity feedback must be ≥ 0, got {}", self.t_v_bar),
            ));
        }
        if let Some(limit) = self.z_limit {
            if !(limit.is_finite() && limit > 0.0) {
                return Err(Error::invalid(
                    "z_limit",
                    format!("integral clamp must be > 0, got {limit}"),
                ));
            }
        }
        match (self.family, &self.pid) {
            (ControllerFamily::Vgpid, Some(pid)) => pid.validate()?,
            (ControllerFamily::Vgpid, None) => {
                return Err(Error::invalid(
                    "pid",
                    "the PID family requires a [controller.pid] gain block",
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Whether `u_eq` carries the reference-acceleration term after the
    /// family rule is applied.
    pub fn effective_feedforward(&self) -> bool {
        self.feedforward_enabled && self.family.feedforward_by_default()
    }
}

/// Per-sample inputs to [`Controller::step`].
#[derive(Debug, Clone, Copy)]
pub struct ControlInputs {
    /// Tracking error `e = p − r`.
    pub e: f64,
    /// Error rate `ė`.
    pub e_dot: f64,
    /// Stage velocity estimate (drives the `T̄_v·v` feedforward).
    pub v: f64,
    /// Acceleration signal for the gain schedule.
    pub v_dot: f64,
    /// Reference acceleration feedforward.
    pub r_ddot: f64,
    /// Trajectory phase (switches the PID proportional gain).
    pub phase: Phase,
}

/// One evaluated control sample.
#[derive(Debug, Clone, Copy)]
pub struct ControlSample {
    /// Total command `u = u_eq + u_sw`.
    pub u: f64,
    /// Model-inversion part.
    pub u_eq: f64,
    /// Switching part `−(h1/K̄)Φ1(s) − z`.
    pub u_sw: f64,
    /// Sliding variable at this sample.
    pub s: f64,
    /// Scheduled gains at this sample (zero for PID).
    pub h1: f64,
    pub h2: f64,
    /// Super-twisting integral state *used by this sample's* `u_sw`.
    pub z: f64,
}

/// Stateful controller for one run: owns its sliding surface, the
/// super-twisting integral `z`, and the PID integrator.
#[derive(Debug, Clone)]
pub struct Controller {
    spec: ControllerSpec,
    surface: SlidingSurface,
    step: f64,
    z: f64,
    pid_integral: f64,
    prev_e: f64,
    started: bool,
}

impl Controller {
    /// Builds a controller sampling at `step_s` seconds with `frac_window`
    /// samples of fractional surface memory.
    pub fn new(spec: ControllerSpec, step_s: f64, frac_window: usize) -> Result<Self> {
        spec.validate()?;
        let surface = SlidingSurface::new(spec.surface, step_s, frac_window)?;
        Ok(Controller {
            spec,
            surface,
            step: step_s,
            z: 0.0,
            pid_integral: 0.0,
            prev_e: 0.0,
            started: false,
        })
    }

    /// The spec this controller was built from.
    pub fn spec(&self) -> &ControllerSpec {
        &self.spec
    }

    /// Current super-twisting integral state.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// Consumes one sample and returns the command. `tick` must strictly
    /// increase between calls — internal state advances exactly once per
    /// control sample.
    pub fn step(&mut self, tick: u64, inp: &ControlInputs) -> Result<ControlSample> {
        let sample = self.surface.advance(tick, inp.e, inp.e_dot)?;
        let first = !self.started;
        self.started = true;

        let out = match self.spec.family.switching_form() {
            None => {
                let pid = self.spec.pid.as_ref().expect("validated at construction");
                if !first {
                    self.pid_integral += 0.5 * (self.prev_e + inp.e) * self.step;
                }
                let kp = pid.kp
                    + if inp.phase == Phase::Ad {
                        pid.delta_kp_ad
                    } else {
                        pid.delta_kp_other
                    };
                // Sign convention: positive e (stage ahead of reference)
                // demands a negative command.
                let u = -(kp * inp.e + pid.ki * self.pid_integral + pid.kd * inp.e_dot);
                ControlSample {
                    u,
                    u_eq: 0.0,
                    u_sw: u,
                    s: sample.s,
                    h1: 0.0,
                    h2: 0.0,
                    z: 0.0,
                }
            }
            Some(form) => {
                let (h1, h2) = self.spec.gains.compute(inp.v_dot);
                let h3 = self.spec.gains.h3();
                let k_bar = self.spec.k_bar;
                let z_used = self.z;
                let u_sw = -(h1 / k_bar) * phi1(sample.s, form, h3) - z_used;
                let feedforward = if self.spec.effective_feedforward() {
                    inp.r_ddot
                } else {
                    0.0
                };
                let u_eq = (feedforward
                    - self.spec.surface.k1 * sample.frac_term_derivative
                    - sample.nonlinear_feedback_term
                    + self.spec.t_v_bar * inp.v)
                    / k_bar;
                // Forward-Euler advance of ż = (h2/K̄)·Φ2(s) after the
                // command is formed from the current z.
                self.z += self.step * (h2 / k_bar) * phi2(sample.s, form, h3);
                if let Some(limit) = self.spec.z_limit {
                    self.z = self.z.clamp(-limit, limit);
                }
                ControlSample {
                    u: u_eq + u_sw,
                    u_eq,
                    u_sw,
                    s: sample.s,
                    h1,
                    h2,
                    z: z_used,
                }
            }
        };
        self.prev_e = inp.e;
        if !out.u.is_finite() {
            return Err(Error::NonFinite {
                context: format!("control output of {}", self.spec.family),
                t: tick as f64 * self.step,
            });
        }
        Ok(out)
    }

    /// Clears all per-run state.
    pub fn reset(&mut self) {
        self.surface.reset();
        self.z = 0.0;
        self.pid_integral = 0.0;
        self.prev_e = 0.0;
        self.started = false;
    }
}

/// Outcome of the steady tracking-error bound calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorBound {
    /// The positive root ε of `k1·κ·x^a − k2·x^{1/a} + γ = 0`.
    Finite(f64),
    /// The balance equation has no positive root (possible only at `a = 1`
    /// when the memory term dominates the feedback term).
    NoFiniteBound,
}

impl fmt::Display for ErrorBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorBound::Finite(eps) => write!(f, "{eps:.12e}"),
            ErrorBound::NoFiniteBound => f.write_str("no finite bound"),
        }
    }
}

/// Steady tracking-error bound implied by holding the sliding variable
/// inside |s| ≤ γ: the positive solution ε of
/// `f(x) = k1·κ·x^a − k2·x^{1/a} + γ = 0`,
/// where κ bounds the fractional-integral amplification.
///
/// Solved in closed form where one exists (`k1 = 0` gives `(γ/k2)^a`; at
/// `a = 1` the equation is linear) and by bisection to 10⁻¹² relative
/// accuracy otherwise.
pub fn error_bound_epsilon(
    k1: f64,
    k2: f64,
    a: f64,
    kappa: f64,
    gamma: f64,
) -> Result<ErrorBound> {
    if !k1.is_finite() || k1 < 0.0 {
        return Err(Error::invalid("k1", format!("must be ≥ 0, got {k1}")));
    }
    if !k2.is_finite() || k2 <= 0.0 {
        return Err(Error::invalid("k2", format!("must be > 0, got {k2}")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid("a", format!("must lie in (0,1], got {a}")));
    }
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::invalid("gamma", format!("must be ≥ 0, got {gamma}")));
    }

    if a == 1.0 {
        let slope = k1 * kappa - k2;
        return if slope < 0.0 {
            Ok(ErrorBound::Finite(gamma / -slope))
        } else if gamma == 0.0 {
            Ok(ErrorBound::Finite(0.0))
        } else {
            Ok(ErrorBound::NoFiniteBound)
        };
    }
    if k1 == 0.0 {
        return Ok(ErrorBound::Finite((gamma / k2).powf(a)));
    }
    if gamma == 0.0 && k1 == 0.0 {
        return Ok(ErrorBound::Finite(0.0));
    }

    let f = |x: f64| k1 * kappa * x.powf(a) - k2 * x.powf(1.0 / a) + gamma;
    // 1/a > a for a < 1, so the −k2 term wins for large x: a positive root
    // always exists. Expand to bracket it, then bisect.
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut expansions = 0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 2_000 {
            return Err(Error::invalid(
                "gamma",
                "failed to bracket the error-bound root; parameters out of range",
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(ErrorBound::Finite(0.5 * (lo + hi)))
}

/// Disturbance-bound constants for the theorem gain schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

/// Sufficient disturbance-bound constants from plant-model mismatch and
/// calibration extremes:
///
/// * `d1 = |ΔK/K̄|·h1_max`
/// * `d2 = |ΔK/K̄|·r̈_max + (memory-term rate max) + |d|_max`
/// * `d3 = |K·T̄_v/K̄ − T_v|`
/// * `d4 = |ΔK/K̄|·h2_max`
///
/// `h1_max`/`h2_max` are the largest gains the candidate schedule reaches
/// over the operating envelope; since `d1`/`d4` feed back into the theorem
/// schedule, iterate the estimate externally if the ceiling moves.
pub fn estimate_bound_constants(
    plant: &PlantParams,
    k_bar: f64,
    t_v_bar: f64,
    h1_max: f64,
    h2_max: f64,
    r_ddot_max: f64,
    memory_rate_max: f64,
    disturbance_max: f64,
) -> Result<BoundConstants> {
    if !(k_bar.is_finite() && k_bar > 0.0) {
        return Err(Error::invalid(
            "k_bar",
            format!("nominal input gain must be > 0, got {k_bar}"),
        ));
    }
    for (arg, v) in [
        ("t_v_bar", t_v_bar),
        ("h1_max", h1_max),
        ("h2_max", h2_max),
        ("r_ddot_max", r_ddot_max),
        ("memory_rate_max", memory_rate_max),
        ("disturbance_max", disturbance_max),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::invalid(
                arg,
                format!("calibration extremes must be ≥ 0, got {v}"),
            ));
        }
    }
    let gain_mismatch = ((plant.k - k_bar) / k_bar).abs();
    Ok(BoundConstants {
        d1: gain_mismatch * h1_max,
        d2: gain_mismatch * r_ddot_max + memory_rate_max + disturbance_max,
        d3: (plant.k / k_bar * t_v_bar - plant.t_v).abs(),
        d4: gain_mismatch * h2_max,
    })
}
