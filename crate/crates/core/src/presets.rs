//! Named experiment presets: the surface comparison, the acceleration and
//! scanning studies, the two experimental cases, and the gain-theorem
//! containment scenario, each with its published parameter set wired in.
//!
//! Every preset returns ordinary configs, so callers can override any field
//! before running. Where the source material leaves a quantity open
//! (comparator tunings for the case studies, pulse amplitudes for the
//! acceleration study), the functions document the convention they adopt.

use crate::controller::{ControllerFamily, ControllerSpec, GainSchedule, PidGains};
use crate::error::Result;
use crate::plant::{DisturbanceSpec, NoiseSpec, PlantParams};
use crate::sim::SimConfig;
use crate::surface::{
    constant_s_response, trace_stats, SurfaceFamily, SurfaceSpec, TraceStats,
};
use crate::trajectory::{
    acceleration_pulse_profile, generate_scan, AccelPulse, AccelShape, PulseProfileSpec,
    ScanProfileSpec, TrajectoryProfile,
};

/// Control rate shared by every closed-loop preset, Hz.
pub const PRESET_RATE_HZ: f64 = 10_000.0;
/// Low peak acceleration for the pulse study, m/s².
pub const ACCEL_STUDY_LOW: f64 = 1.5;
/// High peak acceleration for the pulse study, m/s².
pub const ACCEL_STUDY_HIGH: f64 = 10.0;
/// One-pole cutoff on the measured error rate, Hz, shared by the closed-loop
/// presets. The sample-rate derivative of the raw position otherwise carries
/// full-bandwidth texture that the acceleration-scheduled gain channels
/// amplify; 450 Hz keeps that texture finite while staying a decade above
/// the stage's tracking bandwidth.
pub const PRESET_E_DOT_CUTOFF_HZ: f64 = 450.0;
/// Measurement-noise variance used by the scanning-study presets, m² per
/// sample. Sized so interferometer-grade position noise shows up in the
/// recorded error without drowning the controller ordering under test.
pub const SCAN_STUDY_NOISE_POWER: f64 = 1e-14;
/// Reference master seed for the scanning-study presets. The study's
/// orderings hold across most seeds at the preset noise level; this seed is
/// the documented reference point and the one the regression checks pin.
pub const SCAN_STUDY_SEED: u64 = 5;

// ---------------------------------------------------------------------------
// Surface comparison
// ---------------------------------------------------------------------------

/// Open-loop surface comparison: each surface held at `s ≡ s_hold` from a
/// zero-error start, integrating the error ODE the surface defines.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceComparePreset {
    /// Memory/integral-channel gain.
    pub k1: f64,
    /// Direct error-feedback gain.
    pub k2: f64,
    /// Fractional memory order of the FSS / power-law surfaces.
    pub xi: f64,
    /// Power-law exponent of the proposed surface.
    pub a: f64,
    /// Constant sliding-variable drive.
    pub s_hold: f64,
    /// Error at t = 0.
    pub initial_error: f64,
    /// Integration step, seconds.
    pub step_s: f64,
    /// Trace length, seconds.
    pub duration_s: f64,
    /// Settling band as a fraction of each trace's own peak.
    pub settle_band_fraction: f64,
}

impl Default for SurfaceComparePreset {
    fn default() -> Self {
        SurfaceComparePreset {
            k1: 500.0,
            k2: 8.0,
            xi: 0.5,
            a: 0.5,
            s_hold: 1.0,
            initial_error: 0.0,
            step_s: 1e-4,
            duration_s: 2.0,
            settle_band_fraction: 0.05,
        }
    }
}

/// One surface's response under the held drive.
#[derive(Debug, Clone)]
pub struct SurfaceTrace {
    pub family: SurfaceFamily,
    /// Error trajectory, one sample per step.
    pub e: Vec<f64>,
    pub stats: TraceStats,
}

/// Surface spec the comparison uses for one family.
pub fn surface_compare_spec(preset: &SurfaceComparePreset, family: SurfaceFamily) -> SurfaceSpec {
    SurfaceSpec {
        family,
        k1: preset.k1,
        k2: preset.k2,
        xi: preset.xi,
        a: preset.a,
    }
}

/// Runs the held-drive comparison for all four families, in the fixed order
/// LSS, ISS, FSS, power-law.
pub fn surface_compare(preset: &SurfaceComparePreset) -> Result<Vec<SurfaceTrace>> {
    [
        SurfaceFamily::Lss,
        SurfaceFamily::Iss,
        SurfaceFamily::Fss,
        SurfaceFamily::Pfss,
    ]
    .into_iter()
    .map(|family| {
        let spec = surface_compare_spec(preset, family);
        let e = constant_s_response(
            &spec,
            preset.s_hold,
            preset.initial_error,
            preset.step_s,
            preset.duration_s,
        )?;
        let stats = trace_stats(&e, preset.step_s, preset.settle_band_fraction)?;
        Ok(SurfaceTrace { family, e, stats })
    })
    .collect()
}

// ---------------------------------------------------------------------------
// Shared plant
// ---------------------------------------------------------------------------

/// Identified stage parameters used by the closed-loop studies: true
/// K = 3.9124, T_v = 1.092 against the nominal model K̄ = 4, T̄_v = 1.
pub fn study_plant() -> PlantParams {
    PlantParams::new(3.9124, 1.092, 4.0, 1.0).expect("constants are valid")
}

/// Plant whose nominal model is exact (K = K̄, T_v = T̄_v); the model-mismatch
/// disturbance channel is identically zero.
pub fn nominal_plant() -> PlantParams {
    PlantParams::new(4.0, 1.0, 4.0, 1.0).expect("constants are valid")
}

fn base_config(
    plant: PlantParams,
    disturbance: DisturbanceSpec,
    controller: ControllerSpec,
    trajectory: TrajectoryProfile,
    seed: u64,
) -> SimConfig {
    let mut config = SimConfig::new(
        plant,
        disturbance,
        NoiseSpec::default(),
        controller,
        trajectory,
    );
    config.seed = seed;
    config.e_dot_cutoff_hz = PRESET_E_DOT_CUTOFF_HZ;
    config
}

fn lss_surface(k2: f64) -> SurfaceSpec {
    SurfaceSpec {
        family: SurfaceFamily::Lss,
        k1: 0.0,
        k2,
        xi: 0.5,
        a: 1.0,
    }
}

fn power_law_surface(k1: f64, k2: f64) -> SurfaceSpec {
    SurfaceSpec {
        family: SurfaceFamily::Pfss,
        k1,
        k2,
        xi: 0.5,
        a: 0.5,
    }
}

fn sta_spec(
    family: ControllerFamily,
    surface: SurfaceSpec,
    gains: GainSchedule,
) -> ControllerSpec {
    ControllerSpec {
        family,
        surface,
        gains,
        k_bar: 4.0,
        t_v_bar: 1.0,
        feedforward_enabled: true,
        z_limit: None,
        pid: None,
    }
}

// ---------------------------------------------------------------------------
// Acceleration study
// ---------------------------------------------------------------------------

/// Accelerate–cruise–brake excitation: +A over [0.2, 0.3] s, −A over
/// [0.6, 0.7] s, 1 s total, ending at rest.
pub fn accel_pulse_trajectory(amplitude: f64) -> Result<TrajectoryProfile> {
    acceleration_pulse_profile(&PulseProfileSpec {
        sample_rate: PRESET_RATE_HZ,
        duration: 1.0,
        pulses: vec![
            AccelPulse {
                amplitude,
                start: 0.2,
                duration: 0.1,
            },
            AccelPulse {
                amplitude: -amplitude,
                start: 0.6,
                duration: 0.1,
            },
        ],
    })
}

/// Time windows for comparing transient against steady behaviour: the two
/// pulse intervals, and the zero-acceleration intervals with the first 25%
/// after each pulse excluded so junction transients decay inside the guard.
pub fn accel_study_intervals() -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let high = vec![(0.2, 0.3), (0.6, 0.7)];
    let zero = vec![(0.0, 0.2), (0.375, 0.6), (0.775, 1.0)];
    (high, zero)
}

/// The four pulse-study controllers with their published tuning: constant
/// gains for CGSTA, acceleration-scheduled gains for the rest.
pub fn accel_study_controllers() -> Vec<ControllerSpec> {
    let scheduled = GainSchedule::AffineInAccel {
        h1_slope: 0.1,
        h1_offset: 50.0,
        h2_slope: 0.1,
        h2_offset: 10.0,
        h3: 0.0,
    };
    vec![
        sta_spec(
            ControllerFamily::Cgsta,
            lss_surface(1200.0),
            GainSchedule::Constant {
                h1: 1500.0,
                h2: 10.0,
                h3: 0.0,
            },
        ),
        sta_spec(
            ControllerFamily::Vgsta,
            lss_surface(1200.0),
            GainSchedule::AffineInAccel {
                h1_slope: 0.1,
                h1_offset: 50.0,
                h2_slope: 0.1,
                h2_offset: 10.0,
                h3: 38.0,
            },
        ),
        sta_spec(
            ControllerFamily::Ifvsta,
            power_law_surface(53.0, 1200.0),
            scheduled,
        ),
        sta_spec(
            ControllerFamily::Pfvsta,
            power_law_surface(53.0, 1200.0),
            scheduled,
        ),
    ]
}

/// One labelled config per pulse-study controller at the given peak
/// acceleration.
pub fn accel_study_configs(amplitude: f64, seed: u64) -> Result<Vec<(String, SimConfig)>> {
    let trajectory = accel_pulse_trajectory(amplitude)?;
    Ok(accel_study_controllers()
        .into_iter()
        .map(|spec| {
            let label = spec.family.to_string();
            let config = base_config(
                study_plant(),
                DisturbanceSpec::default(),
                spec,
                trajectory.clone(),
                seed,
            );
            (label, config)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Scanning study
// ---------------------------------------------------------------------------

/// Scan profile of the robustness study: 0.05 m at 0.12 m/s, 12 ms
/// acceleration windows at 10 m/s², 0.2 s lead-in idle, 0.1 s hold.
pub fn scan_trajectory_spec() -> ScanProfileSpec {
    ScanProfileSpec {
        scan_length: 0.05,
        scan_velocity: 0.12,
        idle_time: 0.2,
        accel_time: 0.012,
        max_accel: 10.0,
        hold_time: 0.1,
        sample_rate: PRESET_RATE_HZ,
        shape: AccelShape::Trapezoid,
    }
}

/// The robustness study's latched step: 0.1 m/s² switched in permanently
/// once the stage passes 0.023 m (reached near t = 0.4 s on this profile).
pub fn scan_study_disturbance() -> DisturbanceSpec {
    DisturbanceSpec {
        step_amplitude: 0.1,
        step_trigger_position: 0.023,
        ..DisturbanceSpec::default()
    }
}

/// The five scanning-study controllers with their published tuning.
pub fn scan_study_controllers() -> Vec<ControllerSpec> {
    let power_gains = GainSchedule::AffineInAccel {
        h1_slope: 0.01,
        h1_offset: 40.0,
        h2_slope: 0.01,
        h2_offset: 20.0,
        h3: 0.0,
    };
    vec![
        sta_spec(
            ControllerFamily::Cgsta,
            lss_surface(1200.0),
            GainSchedule::Constant {
                h1: 1500.0,
                h2: 80.0,
                h3: 0.0,
            },
        ),
        sta_spec(
            ControllerFamily::Vgsta,
            lss_surface(1200.0),
            GainSchedule::AffineInAccel {
                h1_slope: 0.5,
                h1_offset: 50.0,
                h2_slope: 0.1,
                h2_offset: 20.0,
                h3: 43.0,
            },
        ),
        sta_spec(
            ControllerFamily::Ifvsta,
            power_law_surface(33.0, 10_000.0),
            power_gains,
        ),
        sta_spec(
            ControllerFamily::Pfvsta,
            power_law_surface(33.0, 10_000.0),
            power_gains,
        ),
        ControllerSpec {
            pid: Some(PidGains {
                kp: 1.2e6,
                ki: 8e6,
                kd: 3e3,
                delta_kp_ad: 0.5e6,
                delta_kp_other: 0.2e6,
            }),
            ..sta_spec(
                ControllerFamily::Vgpid,
                lss_surface(1200.0),
                GainSchedule::Constant {
                    h1: 1.0,
                    h2: 1.0,
                    h3: 0.0,
                },
            )
        },
    ]
}

/// Measurement-noise channel of the scanning study: white position noise at
/// [`SCAN_STUDY_NOISE_POWER`], unfiltered, on a stream decorrelated from the
/// master seed.
pub fn scan_study_noise() -> NoiseSpec {
    NoiseSpec {
        power: SCAN_STUDY_NOISE_POWER,
        cutoff_hz: f64::INFINITY,
        seed: 1,
    }
}

/// One labelled config per scanning-study controller, with the latched step
/// disturbance armed and measurement noise on.
pub fn scan_study_configs(seed: u64) -> Result<Vec<(String, SimConfig)>> {
    let trajectory = generate_scan(&scan_trajectory_spec())?;
    Ok(scan_study_controllers()
        .into_iter()
        .map(|spec| {
            let label = spec.family.to_string();
            let mut config = base_config(
                study_plant(),
                scan_study_disturbance(),
                spec,
                trajectory.clone(),
                seed,
            );
            config.noise = scan_study_noise();
            (label, config)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Experimental cases
// ---------------------------------------------------------------------------

/// The two benchmark scan cases: identical geometry, different peak
/// acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// 1.5 m/s² peak acceleration.
    Case1,
    /// 10 m/s² peak acceleration.
    Case2,
}

impl CaseId {
    /// Peak acceleration of the case, m/s².
    pub fn max_accel(self) -> f64 {
        match self {
            CaseId::Case1 => 1.5,
            CaseId::Case2 => 10.0,
        }
    }

    /// Acceleration-window length, s. Both cases use jerk-limited windows a
    /// little longer than the bare minimum `v/a`, leaving room for the jerk
    /// ramps; the high-acceleration case gets the tightest window its limit
    /// admits (ramp-up meets ramp-down with no flat top).
    pub fn accel_time(self) -> f64 {
        match self {
            CaseId::Case1 => 0.087,
            CaseId::Case2 => 0.0199,
        }
    }
}

/// Case scan geometry: 0.05 m at 0.1 m/s, 0.2 s lead-in, 0.1 s hold, with
/// jerk-limited acceleration events sized per case.
pub fn case_trajectory_spec(case: CaseId) -> ScanProfileSpec {
    ScanProfileSpec {
        scan_length: 0.05,
        scan_velocity: 0.1,
        idle_time: 0.2,
        accel_time: case.accel_time(),
        max_accel: case.max_accel(),
        hold_time: 0.1,
        sample_rate: PRESET_RATE_HZ,
        shape: AccelShape::SCurve,
    }
}

/// Symmetric amplifier command limit the case presets emulate, volts.
pub const CASE_U_LIMIT_V: f64 = 10.0;
/// Compute/DAC latency the case presets emulate, control ticks.
pub const CASE_DELAY_TICKS: u32 = 1;

/// Stage load for each case: constant friction residual plus position-locked
/// force ripple with a 10 mm spatial period. The harder-accelerating case
/// carries the heavier load, matching how drive heating and cogging grow
/// with the duty placed on the motor.
pub fn case_disturbance(case: CaseId) -> DisturbanceSpec {
    let (friction, ripple) = match case {
        CaseId::Case1 => (0.1, 0.08),
        CaseId::Case2 => (0.2, 0.1),
    };
    DisturbanceSpec {
        friction_residual: friction,
        ripple_amplitude: ripple,
        ripple_spatial_period: 0.01,
        ..DisturbanceSpec::default()
    }
}

/// The four case-study controllers. The power-law pair uses the published
/// case tuning (k1 = 100, k2 = 2×10⁷ on the power-law surface,
/// h1 = 550|v̇|+13, h2 = 10|v̇|+4). The two comparators have no published
/// case tuning; they use their scan-study-style tunings, documented as
/// tuned defaults.
pub fn case_controllers() -> Vec<ControllerSpec> {
    let case_gains = GainSchedule::AffineInAccel {
        h1_slope: 550.0,
        h1_offset: 13.0,
        h2_slope: 10.0,
        h2_offset: 4.0,
        h3: 0.0,
    };
    vec![
        sta_spec(
            ControllerFamily::Vgsta,
            lss_surface(1200.0),
            GainSchedule::AffineInAccel {
                h1_slope: 0.5,
                h1_offset: 50.0,
                h2_slope: 0.1,
                h2_offset: 20.0,
                h3: 43.0,
            },
        ),
        sta_spec(
            ControllerFamily::Fcgsta,
            SurfaceSpec {
                family: SurfaceFamily::Fss,
                k1: 53.0,
                k2: 1200.0,
                xi: 0.5,
                a: 1.0,
            },
            GainSchedule::Constant {
                h1: 50.0,
                h2: 10.0,
                h3: 38.0,
            },
        ),
        sta_spec(
            ControllerFamily::Ifvsta,
            power_law_surface(100.0, 2e7),
            case_gains,
        ),
        sta_spec(
            ControllerFamily::Pfvsta,
            power_law_surface(100.0, 2e7),
            case_gains,
        ),
    ]
}

/// One labelled config per case-study controller.
///
/// Unlike the study presets, the case presets emulate the drive chain: the
/// command saturates at [`CASE_U_LIMIT_V`] and reaches the amplifier
/// [`CASE_DELAY_TICKS`] after it is computed. There is no measurement-noise
/// channel, so case runs are bit-reproducible regardless of seed.
pub fn case_configs(case: CaseId, seed: u64) -> Result<Vec<(String, SimConfig)>> {
    let trajectory = generate_scan(&case_trajectory_spec(case))?;
    Ok(case_controllers()
        .into_iter()
        .map(|spec| {
            let label = spec.family.to_string();
            let mut config = base_config(
                study_plant(),
                case_disturbance(case),
                spec,
                trajectory.clone(),
                seed,
            );
            config.u_limit_v = CASE_U_LIMIT_V;
            config.delay_ticks = CASE_DELAY_TICKS;
            (label, config)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Gain-theorem containment
// ---------------------------------------------------------------------------

/// Convergence-region half-width γ the containment preset targets.
pub const CONTAINMENT_GAMMA: f64 = 0.05;

/// Containment scenario for the gain theorem: nominal plant (the proof's
/// integral coordinate is exact), a constant 0.3 load bounded by the
/// configured D2 = 0.301 with zero rate bounds (the load really is
/// rate-free), zero reference held for 2 s, and the stage released from
/// 0.025 m so the sliding variable starts well outside |s| ≤ γ.
///
/// Two fields deliberately differ from the study presets, because this
/// scenario instruments the loop the stability proof models rather than a
/// measurement chain. The error rate is unfiltered: a low-pass there lags
/// the realized sliding variable behind the proof's, which shows up as
/// spurious re-exits from the band. And the fractional-memory horizon spans
/// the whole run: a shorter horizon would drop the release transient out of
/// the memory window mid-run and kick the surface through no fault of the
/// gains. The release offset stays gentle for a related reason — the
/// equivalent-control cancellation runs one sample behind the surface's
/// internal terms, so a violent slew injects a per-sample error that the
/// per-sample decrease statistic would misattribute to the gains.
pub fn containment_config(seed: u64) -> SimConfig {
    let spec = sta_spec(
        ControllerFamily::Pfvsta,
        power_law_surface(100.0, 100.0),
        GainSchedule::Theorem {
            p1: 2.0,
            p2: -1.0,
            p4: 1.0,
            d1: 0.0,
            d2: 0.301,
            d3: 0.0,
            d4: 0.0,
            gamma: CONTAINMENT_GAMMA,
        },
    );
    let h = 1.0 / PRESET_RATE_HZ;
    let n = (2.0 * PRESET_RATE_HZ) as usize;
    let trajectory = TrajectoryProfile {
        h,
        r: vec![0.0; n],
        r_dot: vec![0.0; n],
        r_ddot: vec![0.0; n],
        phase: vec![crate::trajectory::Phase::Ip; n],
    };
    let mut config = base_config(
        nominal_plant(),
        DisturbanceSpec {
            constant: 0.3,
            ..DisturbanceSpec::default()
        },
        spec,
        trajectory,
        seed,
    );
    config.initial_position = 0.025;
    config.e_dot_cutoff_hz = f64::INFINITY;
    config.frac_horizon_s = n as f64 * h;
    config
}
