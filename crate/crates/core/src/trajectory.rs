//! Phase-labeled scanning references r(t), ṙ(t), r̈(t).
//!
//! Profiles are built acceleration-first: r̈ is laid out sample-by-sample
//! with every breakpoint snapped to the sample grid and every segment
//! piecewise-linear between samples, then ṙ and r come from cumulative
//! trapezoidal integration. The trapezoid rule is exact for piecewise-linear
//! integrands, so the three arrays are mutually consistent to rounding error
//! by construction, and scan-phase samples carry the commanded velocity
//! exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which phase of the scanning cycle a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    /// Idle / hold: the reference is stationary.
    Ip,
    /// Acceleration or deceleration transient.
    Ad,
    /// Constant-velocity scan.
    Sp,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Ip => "IP",
            Phase::Ad => "AD",
            Phase::Sp => "SP",
        })
    }
}

/// How the acceleration transient is shaped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AccelShape {
    /// Constant acceleration (trapezoidal velocity); the commanded r̈ ramps
    /// over a single sample at each end so the profile stays integrable by
    /// the trapezoid rule without error.
    #[default]
    Trapezoid,
    /// Jerk-limited S-curve: r̈ itself is a trapezoidal pulse. Reconciles an
    /// acceleration window longer than `scan_velocity / max_accel` with the
    /// full acceleration limit.
    SCurve,
}

/// Parameters of a single idle → accel → scan → decel → hold move.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanProfileSpec {
    /// Total travel of the move in metres.
    pub scan_length: f64,
    /// Constant-velocity scan speed in m/s.
    pub scan_velocity: f64,
    /// Dwell before the move starts, seconds.
    pub idle_time: f64,
    /// Duration of each acceleration/deceleration window, seconds. Zero
    /// means "derive from scan_velocity / max_accel".
    pub accel_time: f64,
    /// Acceleration limit in m/s².
    pub max_accel: f64,
    /// Dwell after the move completes, seconds.
    pub hold_time: f64,
    /// Sample rate in Hz. Zero means "inherit the control rate".
    pub sample_rate: f64,
    /// Acceleration transient shape.
    pub shape: AccelShape,
}

impl Default for ScanProfileSpec {
    fn default() -> Self {
        ScanProfileSpec {
            scan_length: 0.0,
            scan_velocity: 0.0,
            idle_time: 0.0,
            accel_time: 0.0,
            max_accel: 0.0,
            hold_time: 0.0,
            sample_rate: 0.0,
            shape: AccelShape::Trapezoid,
        }
    }
}

/// A rectangular acceleration pulse for synthetic excitation profiles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccelPulse {
    /// Pulse height in m/s² (sign matters).
    pub amplitude: f64,
    /// Pulse start time in seconds.
    pub start: f64,
    /// Pulse duration in seconds.
    pub duration: f64,
}

/// A profile made of additive rectangular acceleration pulses.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseProfileSpec {
    /// Sample rate in Hz.
    pub sample_rate: f64,
    /// Total profile duration in seconds.
    pub duration: f64,
    /// The pulses; overlaps add.
    pub pulses: Vec<AccelPulse>,
}

/// Sampled reference trajectory with per-sample phase labels.
#[derive(Debug, Clone)]
pub struct TrajectoryProfile {
    /// Sample step in seconds.
    pub h: f64,
    /// Reference position per sample, metres.
    pub r: Vec<f64>,
    /// Reference velocity per sample, m/s.
    pub r_dot: Vec<f64>,
    /// Reference acceleration per sample, m/s².
    pub r_ddot: Vec<f64>,
    /// Phase label per sample.
    pub phase: Vec<Phase>,
}

impl TrajectoryProfile {
    /// Number of samples.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    /// Whether the profile is empty.
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Time of sample `i` in seconds.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Total duration in seconds (time of the last sample).
    pub fn duration(&self) -> f64 {
        match self.len() {
            0 => 0.0,
            n => (n - 1) as f64 * self.h,
        }
    }

    /// Maximum deviations of the stored arrays from cumulative trapezoidal
    /// integration of each other: (max |∫r̈ − ṙ|, max |∫ṙ − r|).
    pub fn consistency_errors(&self) -> (f64, f64) {
        let vel = cumtrapz(&self.r_ddot, self.h, self.r_dot.first().copied().unwrap_or(0.0));
        let pos = cumtrapz(&self.r_dot, self.h, self.r.first().copied().unwrap_or(0.0));
        let dv = vel
            .iter()
            .zip(&self.r_dot)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let dp = pos
            .iter()
            .zip(&self.r)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        (dv, dp)
    }

    /// Writes the profile as CSV with columns t, r, r_dot, r_ddot, phase.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,r,r_dot,r_ddot,phase")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.time(i),
                self.r[i],
                self.r_dot[i],
                self.r_ddot[i],
                self.phase[i]
            )?;
        }
        Ok(())
    }
}

/// Cumulative trapezoidal integral of `samples` at step `h`, starting from
/// `init`.
fn cumtrapz(samples: &[f64], h: f64, init: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = init;
    for (i, pair) in samples.windows(2).enumerate() {
        if i == 0 {
            out.push(acc);
        }
        acc += 0.5 * (pair[0] + pair[1]) * h;
        out.push(acc);
    }
    if samples.len() == 1 {
        out.push(acc);
    }
    out
}

fn snap_samples(duration: f64, rate: f64, what: &'static str) -> Result<usize> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::invalid(what, format!("must be a non-negative duration, got {duration}")));
    }
    Ok((duration * rate).round() as usize)
}

/// Generates the idle → accel → scan → decel → hold move described by
/// `spec`.
///
/// Segment boundaries are snapped to the sample grid, so the realized total
/// travel can differ from `scan_length` by up to half a sample of scan
/// motion. Scan-phase samples carry `scan_velocity` exactly; junction
/// samples whose kinematics still differ from the adjacent steady phase
/// belong to the acceleration phase.
pub fn generate_scan(spec: &ScanProfileSpec) -> Result<TrajectoryProfile> {
    if !(spec.sample_rate.is_finite() && spec.sample_rate > 0.0) {
        return Err(Error::invalid(
            "sample_rate",
            format!("must be positive, got {}", spec.sample_rate),
        ));
    }
    let fs = spec.sample_rate;
    let h = 1.0 / fs;
    let n_idle = snap_samples(spec.idle_time, fs, "idle_time")?;
    let n_hold = snap_samples(spec.hold_time, fs, "hold_time")?;

    // Degenerate profile: nothing to track, everything is idle.
    if spec.scan_length == 0.0 && spec.scan_velocity == 0.0 {
        let n = n_idle + n_hold + 1;
        return Ok(TrajectoryProfile {
            h,
            r: vec![0.0; n],
            r_dot: vec![0.0; n],
            r_ddot: vec![0.0; n],
            phase: vec![Phase::Ip; n],
        });
    }

    let v = spec.scan_velocity;
    let len = spec.scan_length;
    if !(v.is_finite() && v > 0.0) || !(len.is_finite() && len > 0.0) {
        return Err(Error::invalid(
            "scan_velocity",
            "a move needs positive scan_length and scan_velocity (or both zero)",
        ));
    }
    if !(spec.max_accel.is_finite() && spec.max_accel > 0.0) {
        return Err(Error::invalid(
            "max_accel",
            format!("must be positive, got {}", spec.max_accel),
        ));
    }
    let t_a = if spec.accel_time > 0.0 {
        spec.accel_time
    } else {
        v / spec.max_accel
    };
    if v > spec.max_accel * t_a * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "accel_time",
            format!(
                "cannot reach {v} m/s in {t_a} s under the {} m/s² limit",
                spec.max_accel
            ),
        ));
    }
    let n_a = snap_samples(t_a, fs, "accel_time")?.max(1);

    // Lay out the acceleration event shape (relative sample index → r̈) and
    // note how many samples it spans and where the kinematics settle.
    let (event, scan_per_event): (Vec<f64>, usize) = match spec.shape {
        AccelShape::Trapezoid => {
            // One-sample jerk ramps keep r̈ piecewise-linear on the grid:
            // 0 → a over one sample, flat, a → 0 over one sample. The flat
            // amplitude reproducing v over n_a·h of integral is v/(n_a·h).
            let a = v / (n_a as f64 * h);
            if a > spec.max_accel * (1.0 + 1e-12) {
                return Err(Error::invalid(
                    "accel_time",
                    format!("grid-snapped window needs {a} m/s², above the limit"),
                ));
            }
            let mut ev = vec![0.0; n_a + 2];
            for x in ev.iter_mut().take(n_a + 1).skip(1) {
                *x = a;
            }
            (ev, n_a + 1)
        }
        AccelShape::SCurve => {
            // Trapezoidal r̈ pulse: ramp over t_j, flat, ramp down, with
            // v = a_pk·(t_a − t_j). Using the full acceleration limit fixes
            // t_j = t_a − v/max_accel.
            let t_j = t_a - v / spec.max_accel;
            let n_j = snap_samples(t_j, fs, "jerk ramp")?;
            if n_j == 0 {
                return Err(Error::invalid(
                    "shape",
                    "s_curve needs accel_time > scan_velocity/max_accel; use trapezoid instead",
                ));
            }
            if 2 * n_j > n_a {
                return Err(Error::invalid(
                    "shape",
                    "s_curve jerk ramps overlap; increase accel_time or max_accel",
                ));
            }
            let a_pk = v / ((n_a - n_j) as f64 * h);
            if a_pk > spec.max_accel * (1.0 + 1e-12) {
                return Err(Error::invalid(
                    "shape",
                    format!("grid-snapped s_curve needs {a_pk} m/s², above the limit"),
                ));
            }
            let mut ev = vec![0.0; n_a + 1];
            for (k, x) in ev.iter_mut().enumerate() {
                let up = k as f64 / n_j as f64;
                let down = (n_a - k) as f64 / n_j as f64;
                *x = a_pk * up.min(down).min(1.0);
            }
            (ev, n_a)
        }
    };

    // Each accel event displaces by v·(event span)/2 thanks to the ramp
    // symmetry, so total travel = v·h·(scan_per_event + n_s). Choose the
    // scan-interval count to land closest to the requested length.
    let n_s_float = len / (v * h) - scan_per_event as f64;
    let n_s = n_s_float.round();
    if n_s < 0.0 {
        return Err(Error::invalid(
            "scan_length",
            format!(
                "move of {len} m is shorter than the accel/decel travel alone; \
                 reduce accel_time or scan_velocity"
            ),
        ));
    }
    let n_s = n_s as usize;

    let i0 = n_idle;                       // first accel-event sample
    let i1 = i0 + scan_per_event;          // first scan sample
    let j0 = i1 + n_s;                     // first decel-event sample
    let j1 = j0 + scan_per_event;          // first hold sample
    let n = j1 + n_hold + 1;

    let mut r_ddot = vec![0.0; n];
    for (k, &a) in event.iter().enumerate() {
        r_ddot[i0 + k] = a;
        r_ddot[j0 + k] = -a;
    }

    let mut r_dot = cumtrapz(&r_ddot, h, 0.0);
    let mut phase = vec![Phase::Ip; n];
    for (k, ph) in phase.iter_mut().enumerate() {
        if (i0..i1).contains(&k) || (j0..j1).contains(&k) {
            *ph = Phase::Ad;
        } else if (i1..j0).contains(&k) {
            *ph = Phase::Sp;
        }
    }
    // Snap steady phases onto their exact commanded kinematics; the
    // corrections are pure rounding residue (≤ a few ulp of v).
    for (k, ph) in phase.iter().enumerate() {
        match ph {
            Phase::Sp => r_dot[k] = v,
            Phase::Ip => r_dot[k] = 0.0,
            Phase::Ad => {}
        }
    }
    let r = cumtrapz(&r_dot, h, 0.0);

    Ok(TrajectoryProfile {
        h,
        r,
        r_dot,
        r_ddot,
        phase,
    })
}

/// Builds a profile from additive rectangular acceleration pulses and
/// integrates twice.
///
/// Pulse edges are snapped to the grid and sampled inclusively on both ends,
/// so a pulse of amplitude `a` and duration `T` contributes exactly `a·T` of
/// velocity at its nominal end sample. Samples under any pulse are labeled
/// acceleration phase; remaining samples are scan phase while the reference
/// moves and idle while it rests.
pub fn acceleration_pulse_profile(spec: &PulseProfileSpec) -> Result<TrajectoryProfile> {
    if !(spec.sample_rate.is_finite() && spec.sample_rate > 0.0) {
        return Err(Error::invalid(
            "sample_rate",
            format!("must be positive, got {}", spec.sample_rate),
        ));
    }
    let fs = spec.sample_rate;
    let h = 1.0 / fs;
    let n = snap_samples(spec.duration, fs, "duration")? + 1;

    let mut r_ddot = vec![0.0; n];
    let mut in_pulse = vec![false; n];
    for (idx, pulse) in spec.pulses.iter().enumerate() {
        if !(pulse.amplitude.is_finite() && pulse.start.is_finite() && pulse.duration.is_finite()) {
            return Err(Error::invalid("pulses", format!("pulse {idx} has non-finite fields")));
        }
        if pulse.start < 0.0 || pulse.duration <= 0.0 {
            return Err(Error::invalid(
                "pulses",
                format!("pulse {idx} needs start ≥ 0 and duration > 0"),
            ));
        }
        let k0 = snap_samples(pulse.start, fs, "pulses")?;
        let k1 = snap_samples(pulse.start + pulse.duration, fs, "pulses")?;
        if k1 >= n {
            return Err(Error::invalid(
                "pulses",
                format!("pulse {idx} extends past the profile duration"),
            ));
        }
        for k in k0..=k1 {
            r_ddot[k] += pulse.amplitude;
            in_pulse[k] = true;
        }
    }

    let r_dot = cumtrapz(&r_ddot, h, 0.0);
    let r = cumtrapz(&r_dot, h, 0.0);
    let phase = (0..n)
        .map(|k| {
            if in_pulse[k] {
                Phase::Ad
            } else if r_dot[k].abs() > 1e-12 {
                Phase::Sp
            } else {
                Phase::Ip
            }
        })
        .collect();

    Ok(TrajectoryProfile {
        h,
        r,
        r_dot,
        r_ddot,
        phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case2_spec() -> ScanProfileSpec {
        ScanProfileSpec {
            scan_length: 0.05,
            scan_velocity: 0.1,
            idle_time: 0.2,
            accel_time: 0.0,
            max_accel: 10.0,
            hold_time: 0.1,
            sample_rate: 10_000.0,
            shape: AccelShape::Trapezoid,
        }
    }

    #[test]
    fn derived_accel_time_and_total_travel() {
        let profile = generate_scan(&case2_spec()).unwrap();
        // v/a = 0.01 s of acceleration; total travel lands on the grid.
        let travel = *profile.r.last().unwrap();
        assert!((travel - 0.05).abs() < 1e-12, "travel {travel}");
        let n_ad = profile.phase.iter().filter(|p| **p == Phase::Ad).count();
        assert_eq!(n_ad, 2 * 101); // two events of n_a + 1 samples at t_a = 0.01 s
        let n_sp = profile.phase.iter().filter(|p| **p == Phase::Sp).count();
        assert_eq!(n_sp, 4899); // (0.05/0.1 − 0.01 − h)/h
    }

    #[test]
    fn case1_accel_duration() {
        let spec = ScanProfileSpec {
            max_accel: 1.5,
            ..case2_spec()
        };
        let profile = generate_scan(&spec).unwrap();
        // t_a = v/a = 0.0667 s after grid snapping.
        let n_ad = profile.phase.iter().filter(|p| **p == Phase::Ad).count();
        let t_a = (n_ad / 2 - 1) as f64 * profile.h;
        assert!((t_a - 0.0667).abs() < 1e-9, "t_a {t_a}");
        let peak = profile.r_ddot.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(peak <= 1.5 * (1.0 + 1e-12));
    }

    #[test]
    fn degenerate_profile_is_all_idle() {
        let spec = ScanProfileSpec {
            scan_length: 0.0,
            scan_velocity: 0.0,
            idle_time: 0.05,
            hold_time: 0.05,
            sample_rate: 1_000.0,
            ..Default::default()
        };
        let profile = generate_scan(&spec).unwrap();
        assert!(profile.phase.iter().all(|p| *p == Phase::Ip));
        assert!(profile.r.iter().all(|&x| x == 0.0));
        assert_eq!(profile.len(), 101);
    }

    #[test]
    fn infeasible_specs_are_rejected() {
        let short_window = ScanProfileSpec {
            accel_time: 0.005, // needs 20 m/s² for 0.1 m/s
            ..case2_spec()
        };
        assert!(generate_scan(&short_window).is_err());

        let short_move = ScanProfileSpec {
            scan_length: 1e-4, // shorter than the accel/decel travel
            ..case2_spec()
        };
        assert!(generate_scan(&short_move).is_err());

        let no_rate = ScanProfileSpec {
            sample_rate: 0.0,
            ..case2_spec()
        };
        assert!(generate_scan(&no_rate).is_err());
    }

    #[test]
    fn arrays_are_trapezoid_consistent() {
        for shape in [AccelShape::Trapezoid, AccelShape::SCurve] {
            let spec = ScanProfileSpec {
                accel_time: 0.012,
                shape,
                ..case2_spec()
            };
            let profile = generate_scan(&spec).unwrap();
            let (dv, dp) = profile.consistency_errors();
            assert!(dv < 1e-9, "{shape:?}: velocity consistency {dv}");
            assert!(dp < 1e-9, "{shape:?}: position consistency {dp}");
        }
    }

    #[test]
    fn scan_phase_kinematics_are_exact() {
        let profile = generate_scan(&case2_spec()).unwrap();
        for (k, ph) in profile.phase.iter().enumerate() {
            if *ph == Phase::Sp {
                assert_eq!(profile.r_dot[k], 0.1);
                assert_eq!(profile.r_ddot[k], 0.0);
            }
            if *ph == Phase::Ip {
                assert_eq!(profile.r_dot[k], 0.0);
            }
        }
    }

    #[test]
    fn velocity_is_continuous() {
        for shape in [AccelShape::Trapezoid, AccelShape::SCurve] {
            let spec = ScanProfileSpec {
                accel_time: 0.012,
                shape,
                ..case2_spec()
            };
            let profile = generate_scan(&spec).unwrap();
            let max_jump = profile
                .r_dot
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0f64, f64::max);
            assert!(max_jump <= spec.max_accel * profile.h * (1.0 + 1e-9));
        }
    }

    #[test]
    fn scurve_uses_full_acceleration_limit() {
        // 0.012 s window at 0.1 m/s with a 10 m/s² cap: constant accel would
        // only need 8.33 m/s², but the jerk-limited shape peaks at the cap.
        let spec = ScanProfileSpec {
            accel_time: 0.012,
            shape: AccelShape::SCurve,
            ..case2_spec()
        };
        let profile = generate_scan(&spec).unwrap();
        let peak = profile.r_ddot.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((peak - 10.0).abs() < 1e-9, "peak {peak}");
        let sp_v: Vec<f64> = profile
            .phase
            .iter()
            .zip(&profile.r_dot)
            .filter(|(p, _)| **p == Phase::Sp)
            .map(|(_, v)| *v)
            .collect();
        assert!(sp_v.iter().all(|&v| v == 0.1));
        assert!(!sp_v.is_empty());
    }

    #[test]
    fn scurve_rejects_zero_jerk_window() {
        let spec = ScanProfileSpec {
            accel_time: 0.01, // exactly v/a ⇒ no room for jerk ramps
            shape: AccelShape::SCurve,
            ..case2_spec()
        };
        assert!(generate_scan(&spec).is_err());
    }

    #[test]
    fn phases_partition_every_sample() {
        let profile = generate_scan(&case2_spec()).unwrap();
        assert_eq!(profile.phase.len(), profile.len());
        assert_eq!(profile.r_dot.len(), profile.len());
        assert_eq!(profile.r_ddot.len(), profile.len());
        for ph in [Phase::Ip, Phase::Ad, Phase::Sp] {
            assert!(profile.phase.iter().any(|p| *p == ph));
        }
    }

    #[test]
    fn single_pulse_integrates_exactly() {
        let spec = PulseProfileSpec {
            sample_rate: 10_000.0,
            duration: 0.2,
            pulses: vec![AccelPulse {
                amplitude: 1.0,
                start: 0.0,
                duration: 0.1,
            }],
        };
        let profile = acceleration_pulse_profile(&spec).unwrap();
        let k = 1000; // t = 0.1 s
        assert!((profile.r_dot[k] - 0.1).abs() < 1e-12, "v {}", profile.r_dot[k]);
        assert!((profile.r[k] - 0.005).abs() < 1e-12, "r {}", profile.r[k]);
    }

    #[test]
    fn zero_pulse_profile_is_constant() {
        let spec = PulseProfileSpec {
            sample_rate: 1_000.0,
            duration: 0.5,
            pulses: vec![],
        };
        let profile = acceleration_pulse_profile(&spec).unwrap();
        assert!(profile.r.iter().all(|&x| x == 0.0));
        assert!(profile.phase.iter().all(|p| *p == Phase::Ip));
    }

    #[test]
    fn antisymmetric_pulses_return_to_rest() {
        let spec = PulseProfileSpec {
            sample_rate: 10_000.0,
            duration: 1.0,
            pulses: vec![
                AccelPulse { amplitude: 2.0, start: 0.2, duration: 0.1 },
                AccelPulse { amplitude: -2.0, start: 0.6, duration: 0.1 },
            ],
        };
        let profile = acceleration_pulse_profile(&spec).unwrap();
        assert!(profile.r_dot.last().unwrap().abs() < 1e-15);
        let (dv, dp) = profile.consistency_errors();
        assert!(dv < 1e-9 && dp < 1e-9);
    }

    #[test]
    fn pulse_phase_labels_follow_motion() {
        let spec = PulseProfileSpec {
            sample_rate: 1_000.0,
            duration: 1.0,
            pulses: vec![
                AccelPulse { amplitude: 1.0, start: 0.2, duration: 0.1 },
                AccelPulse { amplitude: -1.0, start: 0.6, duration: 0.1 },
            ],
        };
        let profile = acceleration_pulse_profile(&spec).unwrap();
        let at = |t: f64| profile.phase[(t * 1_000.0).round() as usize];
        assert_eq!(at(0.1), Phase::Ip); // before anything moves
        assert_eq!(at(0.25), Phase::Ad); // inside the first pulse
        assert_eq!(at(0.45), Phase::Sp); // coasting between pulses
        assert_eq!(at(0.9), Phase::Ip); // back at rest
    }

    #[test]
    fn pulse_validation() {
        let base = PulseProfileSpec {
            sample_rate: 1_000.0,
            duration: 0.5,
            pulses: vec![AccelPulse { amplitude: 1.0, start: 0.45, duration: 0.2 }],
        };
        assert!(acceleration_pulse_profile(&base).is_err()); // runs past the end

        let neg = PulseProfileSpec {
            pulses: vec![AccelPulse { amplitude: 1.0, start: -0.1, duration: 0.2 }],
            ..base.clone()
        };
        assert!(acceleration_pulse_profile(&neg).is_err());
    }

    #[test]
    fn csv_export_round_trips_header_and_rows() {
        let profile = generate_scan(&ScanProfileSpec {
            idle_time: 0.001,
            hold_time: 0.001,
            ..case2_spec()
        })
        .unwrap();
        let mut buf = Vec::new();
        profile.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,r,r_dot,r_ddot,phase");
        assert_eq!(lines.count(), profile.len());
    }
}
