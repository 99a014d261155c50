//! Fixed-step closed-loop engine: reference trajectory → controller →
//! plant → measurement, with probe channels and deterministic records.
//!
//! Each control tick samples the (noisy) position measurement, forms the
//! tracking error and its filtered backward-difference rate, evaluates the
//! controller, then holds the command while the plant integrates through the
//! tick (zero-order hold). Runs are bit-reproducible: identical config and
//! seed produce identical sample arrays.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::controller::{phi1, ControlInputs, Controller, ControllerSpec, GainSchedule};
use crate::error::{Error, Result};
use crate::hashing::Fnv1a;
use crate::plant::{measure, plant_step, DisturbanceSpec, NoiseChannel, NoiseSpec, PlantParams, PlantState};
use crate::trajectory::{generate_scan, Phase, ScanProfileSpec, TrajectoryProfile};

/// Which signal drives the acceleration-dependent gain schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AccelSource {
    /// The reference acceleration r̈ — clean, no differentiation noise.
    #[default]
    ReferenceAccel,
    /// Filtered numeric differentiation of the estimated stage velocity.
    MeasuredRate,
}

/// Which optional channels are written when a record is exported.
/// `t, r, p, e, u, s` and the phase label are always exported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSet {
    /// Stage velocity estimate.
    pub velocity: bool,
    /// Scheduled gains h1, h2.
    pub gains: bool,
    /// Super-twisting integral state z.
    pub integral_state: bool,
    /// Lyapunov candidate V (nonzero only for theorem-mode gain runs).
    pub lyapunov: bool,
}

impl Default for ProbeSet {
    fn default() -> Self {
        ProbeSet {
            velocity: true,
            gains: true,
            integral_state: true,
            lyapunov: true,
        }
    }
}

/// Full description of one closed-loop run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Control rate in Hz; must match the trajectory's sample step.
    pub control_rate: f64,
    /// RK4 substeps per control tick.
    pub plant_substeps: u32,
    pub plant: PlantParams,
    pub disturbance: DisturbanceSpec,
    pub noise: NoiseSpec,
    pub controller: ControllerSpec,
    pub trajectory: TrajectoryProfile,
    pub probes: ProbeSet,
    /// Master seed; XOR-mixed into every stochastic channel.
    pub seed: u64,
    pub initial_position: f64,
    pub initial_velocity: f64,
    /// Speed magnitude beyond which the run aborts as diverged.
    pub v_bound: f64,
    /// Low-pass cutoff for the error-rate estimate; pass-through when at or
    /// above the Nyquist rate.
    pub e_dot_cutoff_hz: f64,
    /// Memory horizon of the fractional surface terms, seconds.
    pub frac_horizon_s: f64,
    /// Symmetric amplifier voltage limit applied to the commanded control
    /// input; non-finite disables clipping.
    pub u_limit_v: f64,
    /// Whole control ticks between computing a command and the amplifier
    /// applying it (compute/DAC latency); 0 applies commands immediately.
    pub delay_ticks: u32,
    pub accel_source: AccelSource,
}

impl SimConfig {
    /// A config with conventional loop parameters: the control rate is taken
    /// from the trajectory step, 10 plant substeps, all probes on, raw error
    /// differentiation, a 1-second fractional memory horizon, and the stage
    /// starting at rest on the first reference sample.
    pub fn new(
        plant: PlantParams,
        disturbance: DisturbanceSpec,
        noise: NoiseSpec,
        controller: ControllerSpec,
        trajectory: TrajectoryProfile,
    ) -> Self {
        let initial_position = trajectory.r.first().copied().unwrap_or(0.0);
        SimConfig {
            control_rate: 1.0 / trajectory.h,
            plant_substeps: 10,
            plant,
            disturbance,
            noise,
            controller,
            trajectory,
            probes: ProbeSet::default(),
            seed: 0,
            initial_position,
            initial_velocity: 0.0,
            v_bound: 1e3,
            e_dot_cutoff_hz: f64::INFINITY,
            frac_horizon_s: 1.0,
            u_limit_v: f64::INFINITY,
            delay_ticks: 0,
            accel_source: AccelSource::ReferenceAccel,
        }
    }

    /// Validates every component and the cross-component invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.control_rate.is_finite() && self.control_rate > 0.0) {
            return Err(Error::invalid(
                "control_rate",
                format!("must be > 0 Hz, got {}", self.control_rate),
            ));
        }
        if self.trajectory.is_empty() {
            return Err(Error::invalid(
                "trajectory",
                "must hold at least one sample",
            ));
        }
        let step_mismatch = (self.control_rate * self.trajectory.h - 1.0).abs();
        if step_mismatch > 1e-9 {
            return Err(Error::invalid(
                "control_rate",
                format!(
                    "must match the trajectory sample step ({} s), got {} Hz",
                    self.trajectory.h, self.control_rate
                ),
            ));
        }
        if self.plant_substeps == 0 {
            return Err(Error::invalid("plant_substeps", "at least one required"));
        }
        self.plant.validate()?;
        self.disturbance.validate()?;
        self.noise.validate()?;
        self.controller.validate()?;
        if !self.initial_position.is_finite() || !self.initial_velocity.is_finite() {
            return Err(Error::invalid(
                "initial_position/initial_velocity",
                "must be finite",
            ));
        }
        if !(self.v_bound.is_finite() && self.v_bound > 0.0) {
            return Err(Error::invalid(
                "v_bound",
                format!("divergence bound must be > 0, got {}", self.v_bound),
            ));
        }
        if !(self.e_dot_cutoff_hz > 0.0) {
            return Err(Error::invalid(
                "e_dot_cutoff_hz",
                format!("must be > 0, got {}", self.e_dot_cutoff_hz),
            ));
        }
        if !(self.u_limit_v > 0.0) {
            return Err(Error::invalid(
                "u_limit_v",
                format!("voltage limit must be > 0, got {}", self.u_limit_v),
            ));
        }
        if self.delay_ticks > 1000 {
            return Err(Error::invalid(
                "delay_ticks",
                format!("latency above 1000 ticks is unsupported, got {}", self.delay_ticks),
            ));
        }
        if !(self.frac_horizon_s.is_finite() && self.frac_horizon_s > 0.0) {
            return Err(Error::invalid(
                "frac_horizon_s",
                format!("must be > 0 s, got {}", self.frac_horizon_s),
            ));
        }
        Ok(())
    }

    /// Stable 64-bit fingerprint of everything that shapes the run output.
    /// Wall-clock metadata is excluded, so identical configs fingerprint
    /// identically across machines.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_f64(self.control_rate);
        h.write_u64(u64::from(self.plant_substeps));
        for v in [
            self.plant.k,
            self.plant.t_v,
            self.plant.k_bar,
            self.plant.t_v_bar,
            self.disturbance.constant,
            self.disturbance.friction_residual,
            self.disturbance.ripple_amplitude,
            self.disturbance.ripple_spatial_period,
            self.disturbance.step_amplitude,
            self.disturbance.step_trigger_position,
            self.noise.power,
            self.noise.cutoff_hz,
        ] {
            h.write_f64(v);
        }
        h.write_u64(self.noise.seed);
        // The controller spec's debug form round-trips every float exactly.
        h.write(format!("{:?}", self.controller).as_bytes());
        h.write_f64(self.trajectory.h);
        h.write_u64(self.trajectory.len() as u64);
        for k in 0..self.trajectory.len() {
            h.write_f64(self.trajectory.r[k]);
            h.write_f64(self.trajectory.r_dot[k]);
            h.write_f64(self.trajectory.r_ddot[k]);
            h.write(&[self.trajectory.phase[k] as u8]);
        }
        h.write_u64(self.seed);
        h.write_f64(self.initial_position);
        h.write_f64(self.initial_velocity);
        h.write_f64(self.v_bound);
        h.write_f64(self.e_dot_cutoff_hz);
        h.write_f64(self.frac_horizon_s);
        h.write_f64(self.u_limit_v);
        h.write_u64(u64::from(self.delay_ticks));
        h.write(&[self.accel_source as u8]);
        h.finish()
    }
}

/// Why and where a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct AbortInfo {
    /// Index of the first sample that was *not* completed; recorded arrays
    /// hold exactly this many samples.
    pub index: usize,
    /// Simulation time of the failure.
    pub t: f64,
    pub reason: String,
}

/// Run metadata carried alongside the sample arrays.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub controller: ControllerSpec,
    pub control_rate: f64,
    pub seed: u64,
    pub config_hash: u64,
    /// Constant component of the configured load. The Lyapunov probe uses it
    /// to reconstruct the stability proof's integral coordinate, which is
    /// the gap between the integral action and the load it cancels.
    pub constant_load: f64,
    /// Crate version that produced the record.
    pub version: String,
    /// Wall-clock duration of the run (diagnostic only; never exported).
    pub wall_time_s: f64,
    pub probes: ProbeSet,
}

/// Recorded closed-loop run: equal-length per-sample arrays plus metadata.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub t: Vec<f64>,
    /// Reference position.
    pub r: Vec<f64>,
    /// Measured position (what the controller saw).
    pub p: Vec<f64>,
    /// Tracking error `e = p − r`.
    pub e: Vec<f64>,
    /// Stage velocity estimate.
    pub v: Vec<f64>,
    /// Control command.
    pub u: Vec<f64>,
    /// Sliding variable.
    pub s: Vec<f64>,
    /// Scheduled gains.
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    /// Super-twisting integral state.
    pub z: Vec<f64>,
    /// Lyapunov candidate (zero unless the run used theorem-mode gains).
    pub v_lyap: Vec<f64>,
    pub phase: Vec<Phase>,
    /// Present when the run stopped before the trajectory end.
    pub abort: Option<AbortInfo>,
    pub meta: RunMeta,
}

impl RunRecord {
    /// Number of completed samples.
    pub fn len(&self) -> usize {
        self.t.len()
    }

    /// True when no samples completed.
    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Writes the record as CSV. Always emits `t,r,p,e,u,s,phase`; the
    /// optional channels follow the probe selection. Output is
    /// byte-deterministic for a given record.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let probes = self.meta.probes;
        let mut header = String::from("t,r,p,e");
        if probes.velocity {
            header.push_str(",v");
        }
        header.push_str(",u,s");
        if probes.gains {
            header.push_str(",h1,h2");
        }
        if probes.integral_state {
            header.push_str(",z");
        }
        if probes.lyapunov {
            header.push_str(",V");
        }
        header.push_str(",phase");
        writeln!(w, "{header}")?;
        let mut line = String::new();
        for k in 0..self.len() {
            line.clear();
            write!(
                line,
                "{},{},{},{}",
                self.t[k], self.r[k], self.p[k], self.e[k]
            )
            .expect("writing to a String cannot fail");
            if probes.velocity {
                write!(line, ",{}", self.v[k]).expect("infallible");
            }
            write!(line, ",{},{}", self.u[k], self.s[k]).expect("infallible");
            if probes.gains {
                write!(line, ",{},{}", self.h1[k], self.h2[k]).expect("infallible");
            }
            if probes.integral_state {
                write!(line, ",{}", self.z[k]).expect("infallible");
            }
            if probes.lyapunov {
                write!(line, ",{}", self.v_lyap[k]).expect("infallible");
            }
            write!(line, ",{}", self.phase[k]).expect("infallible");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// First-order low-pass with bypass at or above the Nyquist rate.
#[derive(Debug, Clone)]
struct OnePole {
    alpha: f64,
    y: f64,
    bypass: bool,
}

impl OnePole {
    fn new(cutoff_hz: f64, rate_hz: f64) -> Self {
        let bypass = !cutoff_hz.is_finite() || cutoff_hz >= 0.5 * rate_hz;
        let alpha = if bypass {
            1.0
        } else {
            1.0 - (-2.0 * std::f64::consts::PI * cutoff_hz / rate_hz).exp()
        };
        OnePole {
            alpha,
            y: 0.0,
            bypass,
        }
    }

    fn apply(&mut self, x: f64) -> f64 {
        if self.bypass {
            self.y = x;
        } else {
            self.y += self.alpha * (x - self.y);
        }
        self.y
    }
}

/// Lyapunov candidate `V = ΘᵀPΘ` with `Θ = [Φ1(s), ζ]ᵀ`, where ζ is the
/// integral-channel coordinate of the stability proof: the gap between the
/// constant load and the integral action built to cancel it, `ζ = d − K̄·z`.
/// On a nominal plant under a constant load this evaluation is exact;
/// position- or velocity-dependent load components and model mismatch leave
/// a residual the probe cannot remove.
fn lyapunov_value(
    s: f64,
    z: f64,
    load: f64,
    k_bar: f64,
    spec: &ControllerSpec,
    p1: f64,
    p2: f64,
    p4: f64,
) -> f64 {
    let form = match spec.family.switching_form() {
        Some(f) => f,
        None => return 0.0,
    };
    let theta1 = phi1(s, form, spec.gains.h3());
    let theta2 = load - k_bar * z;
    p1 * theta1 * theta1 + 2.0 * p2 * theta1 * theta2 + p4 * theta2 * theta2
}

/// Executes one closed-loop run.
///
/// Configuration errors surface as `Err`; runtime failures (divergence,
/// non-finite control output) return a *truncated* record whose
/// [`RunRecord::abort`] holds the diagnostic.
pub fn run(config: &SimConfig) -> Result<RunRecord> {
    config.validate()?;
    let started = Instant::now();
    let h = config.trajectory.h;
    let rate = 1.0 / h;
    let n = config.trajectory.len();
    let window = (config.frac_horizon_s / h).ceil() as usize + 1;

    let mut controller = Controller::new(config.controller.clone(), h, window)?;
    let noise_spec = NoiseSpec {
        seed: config.noise.seed ^ config.seed,
        ..config.noise
    };
    let mut noise = NoiseChannel::new(&noise_spec, rate)?;
    let mut e_dot_filter = OnePole::new(config.e_dot_cutoff_hz, rate);
    let mut accel_filter = OnePole::new(config.e_dot_cutoff_hz, rate);

    let theorem_p = match config.controller.gains {
        GainSchedule::Theorem { p1, p2, p4, .. } => Some((p1, p2, p4)),
        _ => None,
    };

    let mut state = PlantState {
        p: config.initial_position,
        v: config.initial_velocity,
        t: 0.0,
    };
    let mut latched = false;
    let mut prev_e: Option<f64> = None;
    let mut prev_v_est: Option<f64> = None;
    let mut pending_u: VecDeque<f64> = VecDeque::with_capacity(config.delay_ticks as usize + 1);
    for _ in 0..config.delay_ticks {
        pending_u.push_back(0.0);
    }

    let mut record = RunRecord {
        t: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        p: Vec::with_capacity(n),
        e: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
        h1: Vec::with_capacity(n),
        h2: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        v_lyap: Vec::with_capacity(n),
        phase: Vec::with_capacity(n),
        abort: None,
        meta: RunMeta {
            controller: config.controller.clone(),
            control_rate: config.control_rate,
            seed: config.seed,
            config_hash: config.fingerprint(),
            constant_load: config.disturbance.constant,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: 0.0,
            probes: config.probes,
        },
    };

    for k in 0..n {
        let t_k = k as f64 * h;
        let meas = measure(&state, &mut noise);
        let r_k = config.trajectory.r[k];
        let e_k = meas - r_k;
        let raw_rate = match prev_e {
            None => 0.0,
            Some(pe) => (e_k - pe) / h,
        };
        let e_dot = e_dot_filter.apply(raw_rate);
        prev_e = Some(e_k);
        let v_est = e_dot + config.trajectory.r_dot[k];
        // Reference-derived channels preview the known latency so feedforward
        // lands time-aligned with the sample it compensates.
        let k_ff = (k + config.delay_ticks as usize).min(n - 1);
        let r_ddot_ff = config.trajectory.r_ddot[k_ff];
        let v_dot = match config.accel_source {
            AccelSource::ReferenceAccel => r_ddot_ff,
            AccelSource::MeasuredRate => {
                let raw = match prev_v_est {
                    None => 0.0,
                    Some(pv) => (v_est - pv) / h,
                };
                accel_filter.apply(raw)
            }
        };
        prev_v_est = Some(v_est);

        let inputs = ControlInputs {
            e: e_k,
            e_dot,
            v: v_est,
            v_dot,
            r_ddot: r_ddot_ff,
            phase: config.trajectory.phase[k],
        };
        let mut out = match controller.step(k as u64, &inputs) {
            Ok(out) => out,
            Err(err) => {
                record.abort = Some(AbortInfo {
                    index: record.len(),
                    t: t_k,
                    reason: err.to_string(),
                });
                break;
            }
        };
        if config.u_limit_v.is_finite() {
            out.u = out.u.clamp(-config.u_limit_v, config.u_limit_v);
        }
        if config.delay_ticks > 0 {
            pending_u.push_back(out.u);
            out.u = pending_u.pop_front().unwrap_or(0.0);
        }

        record.t.push(t_k);
        record.r.push(r_k);
        record.p.push(meas);
        record.e.push(e_k);
        record.v.push(v_est);
        record.u.push(out.u);
        record.s.push(out.s);
        record.h1.push(out.h1);
        record.h2.push(out.h2);
        record.z.push(out.z);
        record.v_lyap.push(match theorem_p {
            Some((p1, p2, p4)) => lyapunov_value(
                out.s,
                out.z,
                config.disturbance.constant,
                config.controller.k_bar,
                &config.controller,
                p1,
                p2,
                p4,
            ),
            None => 0.0,
        });
        record.phase.push(config.trajectory.phase[k]);

        state = match plant_step(
            state,
            &config.plant,
            &config.disturbance,
            &mut latched,
            out.u,
            h,
            config.plant_substeps,
            config.v_bound,
        ) {
            Ok(next) => next,
            Err(err) => {
                record.abort = Some(AbortInfo {
                    index: record.len(),
                    t: t_k + h,
                    reason: err.to_string(),
                });
                break;
            }
        };
    }

    record.meta.wall_time_s = started.elapsed().as_secs_f64();
    Ok(record)
}

/// Decrease statistics of the Lyapunov candidate outside the target region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovStats {
    /// Samples with |s| > γ that have a successor sample.
    pub qualifying: usize,
    /// Qualifying samples whose V decreased at the next sample.
    pub decreasing: usize,
    /// `decreasing / qualifying`; `None` when no sample qualifies.
    pub decrease_fraction: Option<f64>,
    pub v_min: f64,
    pub v_max: f64,
}

/// Evaluates `V = ΘᵀPΘ` per sample from a recorded run and reports how often
/// V decreased while the sliding variable was outside |s| ≤ γ.
pub fn lyapunov_probe(
    record: &RunRecord,
    p1: f64,
    p2: f64,
    p4: f64,
    gamma: f64,
) -> Result<LyapunovStats> {
    if !(p1.is_finite() && p1 > 0.0) || !(p2.is_finite() && p2 < 0.0) {
        return Err(Error::invalid(
            "p1/p2",
            format!("require p1 > 0 and p2 < 0, got p1 = {p1}, p2 = {p2}"),
        ));
    }
    if !p4.is_finite() || p1 * p4 - p2 * p2 <= 0.0 {
        return Err(Error::invalid(
            "p4",
            format!("requires p1·p4 − p2² > 0, got p1 = {p1}, p2 = {p2}, p4 = {p4}"),
        ));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
    }
    let spec = &record.meta.controller;
    if spec.family.switching_form().is_none() {
        return Err(Error::invalid(
            "record",
            "Lyapunov probe requires a super-twisting record with integral state",
        ));
    }
    if record.is_empty() {
        return Err(Error::invalid("record", "holds no samples"));
    }

    let v: Vec<f64> = record
        .s
        .iter()
        .zip(&record.z)
        .map(|(&s, &z)| {
            lyapunov_value(s, z, record.meta.constant_load, spec.k_bar, spec, p1, p2, p4)
        })
        .collect();
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &v {
        v_min = v_min.min(x);
        v_max = v_max.max(x);
    }
    let mut qualifying = 0usize;
    let mut decreasing = 0usize;
    for k in 0..v.len().saturating_sub(1) {
        if record.s[k].abs() > gamma {
            qualifying += 1;
            if v[k + 1] < v[k] {
                decreasing += 1;
            }
        }
    }
    Ok(LyapunovStats {
        qualifying,
        decreasing,
        decrease_fraction: if qualifying == 0 {
            None
        } else {
            Some(decreasing as f64 / qualifying as f64)
        },
        v_min,
        v_max,
    })
}

/// Containment behaviour of the sliding variable around |s| ≤ γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentStats {
    /// First sample index with |s| ≤ γ.
    pub first_entry: Option<usize>,
    pub entry_time: Option<f64>,
    /// Largest |s| at or after first entry.
    pub max_abs_s_after_entry: f64,
    /// `max(0, max|s| − γ)` after entry.
    pub max_excess: f64,
    /// Largest single-sample |Δs| after entry — the discretization slack a
    /// one-step escape can legitimately use.
    pub max_step_after_entry: f64,
}

/// Scans a sliding-variable trace for entry into |s| ≤ γ and any later
/// excursions.
pub fn containment_stats(s: &[f64], step_s: f64, gamma: f64) -> Result<ContainmentStats> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
    }
    if !(step_s.is_finite() && step_s > 0.0) {
        return Err(Error::invalid(
            "step_s",
            format!("must be a positive sample step, got {step_s}"),
        ));
    }
    let first_entry = s.iter().position(|&x| x.abs() <= gamma);
    let (mut max_abs, mut max_step) = (0.0_f64, 0.0_f64);
    if let Some(k0) = first_entry {
        for k in k0..s.len() {
            max_abs = max_abs.max(s[k].abs());
            if k + 1 < s.len() {
                max_step = max_step.max((s[k + 1] - s[k]).abs());
            }
        }
    }
    Ok(ContainmentStats {
        first_entry,
        entry_time: first_entry.map(|k| k as f64 * step_s),
        max_abs_s_after_entry: max_abs,
        max_excess: (max_abs - gamma).max(0.0),
        max_step_after_entry: max_step,
    })
}

/// One parameter axis for [`sweep`].
#[derive(Debug, Clone)]
pub enum SweepAxis {
    /// One run per controller, sharing the base trajectory.
    Controllers(Vec<ControllerSpec>),
    /// One run per peak acceleration, regenerating the scan profile.
    MaxAccel {
        scan: ScanProfileSpec,
        values: Vec<f64>,
    },
    /// One run per master seed.
    Seeds(Vec<u64>),
}

/// Outcome of one sweep variant; failures are collected, not propagated.
#[derive(Debug)]
pub struct SweepRun {
    pub label: String,
    pub outcome: Result<RunRecord>,
}

/// Runs the base config once (no axis) or once per axis value, in input
/// order. Results are deterministic and ordered by the axis definition,
/// never by completion time.
pub fn sweep(base: &SimConfig, axis: Option<&SweepAxis>) -> Vec<SweepRun> {
    match axis {
        None => vec![SweepRun {
            label: "base".to_string(),
            outcome: run(base),
        }],
        Some(SweepAxis::Controllers(specs)) => specs
            .iter()
            .map(|spec| {
                let mut config = base.clone();
                config.controller = spec.clone();
                SweepRun {
                    label: spec.family.to_string(),
                    outcome: run(&config),
                }
            })
            .collect(),
        Some(SweepAxis::MaxAccel { scan, values }) => values
            .iter()
            .map(|&a| {
                let label = format!("accel_{a}");
                let mut spec = scan.clone();
                spec.max_accel = a;
                let outcome = generate_scan(&spec).and_then(|trajectory| {
                    let mut config = base.clone();
                    config.control_rate = 1.0 / trajectory.h;
                    config.trajectory = trajectory;
                    run(&config)
                });
                SweepRun { label, outcome }
            })
            .collect(),
        Some(SweepAxis::Seeds(seeds)) => seeds
            .iter()
            .map(|&seed| {
                let mut config = base.clone();
                config.seed = seed;
                SweepRun {
                    label: format!("seed_{seed}"),
                    outcome: run(&config),
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::{ControllerFamily, PidGains};
    use crate::surface::{SurfaceFamily, SurfaceSpec};

    fn zero_trajectory(n: usize, h: f64) -> TrajectoryProfile {
        TrajectoryProfile {
            h,
            r: vec![0.0; n],
            r_dot: vec![0.0; n],
            r_ddot: vec![0.0; n],
            phase: vec![Phase::Ip; n],
        }
    }

    fn nominal_plant() -> PlantParams {
        PlantParams::new(4.0, 1.0, 4.0, 1.0).unwrap()
    }

    fn quiet_noise() -> NoiseSpec {
        NoiseSpec {
            power: 0.0,
            ..NoiseSpec::default()
        }
    }

    fn pfvsta_spec() -> ControllerSpec {
        ControllerSpec {
            family: ControllerFamily::Pfvsta,
            surface: SurfaceSpec {
                family: SurfaceFamily::Pfss,
                k1: 33.0,
                k2: 10_000.0,
                xi: 0.5,
                a: 0.5,
            },
            gains: GainSchedule::AffineInAccel {
                h1_slope: 0.01,
                h1_offset: 40.0,
                h2_slope: 0.01,
                h2_offset: 20.0,
                h3: 0.0,
            },
            k_bar: 4.0,
            t_v_bar: 1.0,
            feedforward_enabled: true,
            z_limit: None,
            pid: None,
        }
    }

    fn cgsta_spec() -> ControllerSpec {
        ControllerSpec {
            family: ControllerFamily::Cgsta,
            surface: SurfaceSpec {
                family: SurfaceFamily::Lss,
                k1: 0.0,
                k2: 1200.0,
                xi: 0.5,
                a: 1.0,
            },
            gains: GainSchedule::Constant {
                h1: 1500.0,
                h2: 80.0,
                h3: 0.0,
            },
            k_bar: 4.0,
            t_v_bar: 1.0,
            feedforward_enabled: true,
            z_limit: None,
            pid: None,
        }
    }

    fn small_scan() -> TrajectoryProfile {
        generate_scan(&ScanProfileSpec {
            scan_length: 0.01,
            scan_velocity: 0.1,
            idle_time: 0.02,
            accel_time: 0.0,
            max_accel: 10.0,
            hold_time: 0.01,
            sample_rate: 10_000.0,
            shape: Default::default(),
        })
        .unwrap()
    }

    #[test]
    fn quiescent_loop_stays_at_zero() {
        let vgpid = ControllerSpec {
            family: ControllerFamily::Vgpid,
            pid: Some(PidGains {
                kp: 1.2e6,
                ki: 8e6,
                kd: 3e3,
                delta_kp_ad: 0.5e6,
                delta_kp_other: 0.2e6,
            }),
            ..cgsta_spec()
        };
        for spec in [pfvsta_spec(), cgsta_spec(), vgpid] {
            let config = SimConfig::new(
                nominal_plant(),
                DisturbanceSpec::default(),
                quiet_noise(),
                spec,
                zero_trajectory(200, 1e-4),
            );
            let record = run(&config).unwrap();
            assert!(record.abort.is_none());
            assert_eq!(record.len(), 200);
            assert!(record.e.iter().all(|&e| e == 0.0));
            assert!(record.u.iter().all(|&u| u == 0.0));
        }
    }

    #[test]
    fn identical_config_and_seed_reproduce_bitwise() {
        let mut config = SimConfig::new(
            PlantParams::new(3.9124, 1.092, 4.0, 1.0).unwrap(),
            DisturbanceSpec {
                constant: 0.2,
                ..DisturbanceSpec::default()
            },
            NoiseSpec {
                power: 1e-16,
                ..NoiseSpec::default()
            },
            pfvsta_spec(),
            small_scan(),
        );
        config.seed = 42;
        let a = run(&config).unwrap();
        let b = run(&config).unwrap();
        assert!(a.abort.is_none());
        assert_eq!(a.e, b.e);
        assert_eq!(a.u, b.u);
        assert_eq!(a.p, b.p);
        assert_eq!(a.s, b.s);
        assert_eq!(a.meta.config_hash, b.meta.config_hash);

        let mut other = config.clone();
        other.seed = 43;
        let c = run(&other).unwrap();
        assert_ne!(a.p, c.p, "different seed must change the noisy channel");
        assert_ne!(a.meta.config_hash, c.meta.config_hash);
    }

    #[test]
    fn tracking_a_scan_keeps_error_small() {
        let config = SimConfig::new(
            PlantParams::new(3.9124, 1.092, 4.0, 1.0).unwrap(),
            DisturbanceSpec::default(),
            quiet_noise(),
            pfvsta_spec(),
            small_scan(),
        );
        let record = run(&config).unwrap();
        assert!(record.abort.is_none());
        let max_e = record.e.iter().fold(0.0_f64, |m, &e| m.max(e.abs()));
        assert!(max_e < 1e-3, "max |e| = {max_e}");
        // The loop actually moved the stage through the scan.
        assert!((record.r.last().unwrap() - 0.01).abs() < 1e-9);
        assert!((record.p.last().unwrap() - 0.01).abs() < 1e-3);
    }

    #[test]
    fn divergence_truncates_with_diagnostic() {
        let mut config = SimConfig::new(
            nominal_plant(),
            DisturbanceSpec::default(),
            quiet_noise(),
            cgsta_spec(),
            small_scan(),
        );
        config.v_bound = 1e-3; // scan speed is 0.1 m/s: guaranteed trip
        let record = run(&config).unwrap();
        let abort = record.abort.as_ref().expect("run must abort");
        assert_eq!(abort.index, record.len());
        assert!(record.len() < config.trajectory.len());
        assert!(abort.reason.contains("diverged"), "reason: {}", abort.reason);
    }

    #[test]
    fn lyapunov_candidate_is_nonnegative_and_probe_reports_windows() {
        let mut spec = pfvsta_spec();
        spec.gains = GainSchedule::Theorem {
            p1: 2.0,
            p2: -1.0,
            p4: 1.0,
            d1: 0.0,
            d2: 0.401,
            d3: 0.0,
            d4: 0.0,
            gamma: 0.05,
        };
        let mut config = SimConfig::new(
            nominal_plant(),
            DisturbanceSpec {
                constant: 0.3,
                ..DisturbanceSpec::default()
            },
            quiet_noise(),
            spec,
            zero_trajectory(2_000, 1e-4),
        );
        config.initial_position = 0.01;
        let record = run(&config).unwrap();
        assert!(record.abort.is_none());
        assert!(record.v_lyap.iter().all(|&v| v >= -1e-15));

        // Generous γ: every sample is already inside, so none qualify.
        let stats = lyapunov_probe(&record, 2.0, -1.0, 1.0, 1e6).unwrap();
        assert_eq!(stats.qualifying, 0);
        assert_eq!(stats.decrease_fraction, None);
        assert!(stats.v_min >= -1e-15);

        // Invalid P is rejected.
        assert!(lyapunov_probe(&record, 1.0, -2.0, 1.0, 0.05).is_err());
    }

    #[test]
    fn containment_statistics_hand_trace() {
        let s = [0.5, 0.2, 0.05, 0.04, 0.06, 0.03];
        let stats = containment_stats(&s, 0.1, 0.05).unwrap();
        assert_eq!(stats.first_entry, Some(2));
        assert_eq!(stats.entry_time, Some(0.2));
        assert!((stats.max_abs_s_after_entry - 0.06).abs() < 1e-15);
        assert!((stats.max_excess - 0.01).abs() < 1e-15);
        assert!((stats.max_step_after_entry - 0.03).abs() < 1e-15);
        assert!(stats.max_excess <= stats.max_step_after_entry);

        let never = containment_stats(&[1.0, 2.0], 0.1, 0.05).unwrap();
        assert_eq!(never.first_entry, None);
        assert_eq!(never.max_abs_s_after_entry, 0.0);
    }

    #[test]
    fn sweep_without_axis_matches_single_run() {
        let config = SimConfig::new(
            nominal_plant(),
            DisturbanceSpec::default(),
            quiet_noise(),
            cgsta_spec(),
            zero_trajectory(50, 1e-4),
        );
        let runs = sweep(&config, None);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].label, "base");
        let single = run(&config).unwrap();
        assert_eq!(runs[0].outcome.as_ref().unwrap().e, single.e);
    }

    #[test]
    fn controller_axis_shares_the_trajectory_and_collects_failures() {
        let config = SimConfig::new(
            nominal_plant(),
            DisturbanceSpec::default(),
            quiet_noise(),
            cgsta_spec(),
            small_scan(),
        );
        let mut broken = cgsta_spec();
        broken.gains = GainSchedule::Constant {
            h1: -1.0,
            h2: 10.0,
            h3: 0.0,
        };
        let axis = SweepAxis::Controllers(vec![cgsta_spec(), pfvsta_spec(), broken]);
        let runs = sweep(&config, Some(&axis));
        assert_eq!(runs.len(), 3);
        assert_eq!(runs[0].label, "CGSTA");
        assert_eq!(runs[1].label, "PFVSTA");
        let a = runs[0].outcome.as_ref().unwrap();
        let b = runs[1].outcome.as_ref().unwrap();
        assert_eq!(a.r, b.r, "variants share the base trajectory");
        assert!(runs[2].outcome.is_err(), "invalid gains must be collected");
    }

    #[test]
    fn accel_axis_regenerates_trajectories() {
        let scan = ScanProfileSpec {
            scan_length: 0.01,
            scan_velocity: 0.1,
            idle_time: 0.02,
            accel_time: 0.0,
            max_accel: 1.5,
            hold_time: 0.01,
            sample_rate: 10_000.0,
            shape: Default::default(),
        };
        let config = SimConfig::new(
            nominal_plant(),
            DisturbanceSpec::default(),
            quiet_noise(),
            pfvsta_spec(),
            generate_scan(&scan).unwrap(),
        );
        let axis = SweepAxis::MaxAccel {
            scan,
            values: vec![1.5, 10.0],
        };
        let runs = sweep(&config, Some(&axis));
        assert_eq!(runs.len(), 2);
        let low = runs[0].outcome.as_ref().unwrap();
        let high = runs[1].outcome.as_ref().unwrap();
        assert!(low.len() > high.len(), "gentler ramps take longer");
        assert_eq!(runs[0].label, "accel_1.5");
        assert_eq!(runs[1].label, "accel_10");
    }

    #[test]
    fn csv_export_is_deterministic_and_honours_probes() {
        let mut config = SimConfig::new(
            nominal_plant(),
            DisturbanceSpec::default(),
            NoiseSpec {
                power: 1e-16,
                ..NoiseSpec::default()
            },
            cgsta_spec(),
            zero_trajectory(20, 1e-4),
        );
        config.probes = ProbeSet {
            velocity: false,
            gains: false,
            integral_state: false,
            lyapunov: false,
        };
        let record = run(&config).unwrap();
        let mut a = Vec::new();
        record.write_csv(&mut a).unwrap();
        let mut b = Vec::new();
        record.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, "t,r,p,e,u,s,phase");
        assert_eq!(text.lines().count(), 21);
    }

    #[test]
    fn config_validation_rejects_rate_mismatch() {
        let mut config = SimConfig::new(
            nominal_plant(),
            DisturbanceSpec::default(),
            quiet_noise(),
            cgsta_spec(),
            zero_trajectory(10, 1e-4),
        );
        config.control_rate = 5_000.0;
        assert!(matches!(run(&config), Err(Error::InvalidArgument { .. })));
    }
}
