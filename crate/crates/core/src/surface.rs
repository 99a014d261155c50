//! Sliding-surface families and their streaming evaluation.
//!
//! A sliding surface maps the tracking error `e = p − r` and its rate `ė`
//! into a scalar sliding variable `s`; the controllers in this crate regulate
//! `s` to zero. Four families are supported:
//!
//! * `Lss` — linear: `s = ė + k2·e`
//! * `Iss` — integral: `s = ė + k1·∫e dt + k2·e`
//! * `Fss` — fractional: `s = ė + k1·D^{ξ−1}[sig(e)] + k2·e`
//! * `Pfss` — power-law fractional: `s = ė + k1·D^{ξ−1}[sig(e)^a] + k2·sig(e)^{1/a}`
//!
//! where `sig(x)^a = sgn(x)·|x|^a` and `D^{ξ−1}` is the Grünwald–Letnikov
//! fractional integral of order `1 − ξ`. The fractional and integral terms
//! carry per-run memory, so a [`SlidingSurface`] must be advanced exactly once
//! per control sample; re-evaluating a tick is rejected rather than silently
//! corrupting the memory.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac::{sig_pow_raw, FracOrder, GlOperator};

/// Which sliding-surface family a spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceFamily {
    /// Linear surface `s = ė + k2·e`.
    Lss,
    /// Integral surface `s = ė + k1·∫e + k2·e`.
    Iss,
    /// Fractional surface `s = ė + k1·D^{ξ−1}[sig(e)] + k2·e`.
    Fss,
    /// Power-law fractional surface `s = ė + k1·D^{ξ−1}[sig(e)^a] + k2·sig(e)^{1/a}`.
    Pfss,
}

impl fmt::Display for SurfaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SurfaceFamily::Lss => "LSS",
            SurfaceFamily::Iss => "ISS",
            SurfaceFamily::Fss => "FSS",
            SurfaceFamily::Pfss => "PFSS",
        };
        f.write_str(name)
    }
}

/// Coefficients of a sliding surface.
///
/// `k1` weights the memory term (integral or fractional), `k2` the
/// instantaneous error feedback. `xi` and `a` only apply to the fractional
/// families: `Fss` uses `xi` and pins the error exponent at 1, `Pfss` uses
/// both, and the linear/integral families ignore them entirely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSpec {
    /// Surface family.
    pub family: SurfaceFamily,
    /// Memory-term gain (integral or fractional term). Ignored by `Lss`.
    pub k1: f64,
    /// Instantaneous error-feedback gain.
    pub k2: f64,
    /// Fractional order ξ ∈ (0,1); the surface integrates at order 1 − ξ.
    pub xi: f64,
    /// Error exponent a; `Pfss` requires a ∈ (0,1), other families use 1.
    pub a: f64,
}

impl Default for SurfaceSpec {
    /// Defaults to the power-law fractional surface used by the
    /// constant-drive comparison study.
    fn default() -> Self {
        SurfaceSpec {
            family: SurfaceFamily::Pfss,
            k1: 500.0,
            k2: 8.0,
            xi: 0.5,
            a: 0.5,
        }
    }
}

impl SurfaceSpec {
    /// Checks every coefficient the configured family actually uses.
    ///
    /// Ignored fields (for example `xi` on a linear surface) are not
    /// inspected, so a spec can be deserialized with family-appropriate
    /// fields only.
    pub fn validate(&self) -> Result<()> {
        if !self.k2.is_finite() || self.k2 <= 0.0 {
            return Err(Error::invalid(
                "k2",
                format!("error-feedback gain must be > 0, got {}", self.k2),
            ));
        }
        if self.family != SurfaceFamily::Lss && (!self.k1.is_finite() || self.k1 < 0.0) {
            return Err(Error::invalid(
                "k1",
                format!("memory-term gain must be ≥ 0, got {}", self.k1),
            ));
        }
        if self.uses_fractional() && !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(Error::invalid(
                "xi",
                format!("fractional order must lie in (0,1), got {}", self.xi),
            ));
        }
        if self.family == SurfaceFamily::Pfss && !(self.a > 0.0 && self.a < 1.0) {
            return Err(Error::invalid(
                "a",
                format!("error exponent must lie in (0,1), got {}", self.a),
            ));
        }
        Ok(())
    }

    /// Whether this family carries Grünwald–Letnikov memory.
    pub fn uses_fractional(&self) -> bool {
        matches!(self.family, SurfaceFamily::Fss | SurfaceFamily::Pfss)
    }

    /// Error exponent actually applied: `a` for `Pfss`, 1 otherwise.
    pub fn effective_a(&self) -> f64 {
        match self.family {
            SurfaceFamily::Pfss => self.a,
            _ => 1.0,
        }
    }

    /// Time derivative of the instantaneous feedback term of `s`:
    /// `(k2/a)·|e|^{(1−a)/a}·ė`, which reduces to `k2·ė` when `a = 1`.
    ///
    /// For `a < 1` the exponent is positive, so `e = 0` gives 0 — there is
    /// no singularity.
    pub fn nonlinear_feedback_term(&self, e: f64, e_dot: f64) -> f64 {
        let a = self.effective_a();
        (self.k2 / a) * e.abs().powf((1.0 - a) / a) * e_dot
    }

    /// Instantaneous feedback term of `s` itself: `k2·sig(e)^{1/a}`
    /// (`k2·e` when `a = 1`).
    fn position_feedback(&self, e: f64) -> f64 {
        match self.family {
            SurfaceFamily::Pfss => self.k2 * sig_pow_raw(e, 1.0 / self.a),
            _ => self.k2 * e,
        }
    }
}

/// One evaluated sample of a sliding surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    /// The sliding variable `s`.
    pub s: f64,
    /// `D^{ξ}[sig(e)^a]` — time derivative of the fractional memory term
    /// *without* the `k1` weight; zero for the memoryless families.
    pub frac_term_derivative: f64,
    /// `(k2/a)·|e|^{(1−a)/a}·ė` — time derivative of the instantaneous
    /// feedback term, `k2` included.
    pub nonlinear_feedback_term: f64,
}

/// Streaming evaluator for one sliding surface over one run.
///
/// Holds the fractional/integral memory; call [`SlidingSurface::advance`]
/// exactly once per sample with a strictly increasing tick.
#[derive(Debug, Clone)]
pub struct SlidingSurface {
    spec: SurfaceSpec,
    step: f64,
    /// `D^{ξ−1}[sig(e)^a]` — the memory term inside `s`.
    frac_surface: Option<GlOperator>,
    /// `D^{ξ}[sig(e)^a]` — its rate, exposed for equivalent control.
    frac_rate: Option<GlOperator>,
    /// Trapezoidal running integral of `e` for the integral family.
    integral: f64,
    prev_e: f64,
    last_tick: Option<u64>,
}

impl SlidingSurface {
    /// Builds an evaluator with `window` samples of fractional memory at a
    /// fixed sample step of `step_s` seconds.
    pub fn new(spec: SurfaceSpec, step_s: f64, window: usize) -> Result<Self> {
        spec.validate()?;
        if !step_s.is_finite() || step_s <= 0.0 {
            return Err(Error::invalid(
                "step_s",
                format!("must be a positive sample step, got {step_s}"),
            ));
        }
        let (frac_surface, frac_rate) = if spec.uses_fractional() {
            let surf = GlOperator::new(FracOrder::new(spec.xi - 1.0)?, step_s, window)?;
            let rate = GlOperator::new(FracOrder::new(spec.xi)?, step_s, window)?;
            (Some(surf), Some(rate))
        } else {
            (None, None)
        };
        Ok(SlidingSurface {
            spec,
            step: step_s,
            frac_surface,
            frac_rate,
            integral: 0.0,
            prev_e: 0.0,
            last_tick: None,
        })
    }

    /// The spec this evaluator was built from.
    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    /// Consumes one `(e, ė)` sample and returns the sliding variable along
    /// with the two rate terms equivalent control needs.
    ///
    /// `tick` must strictly increase between calls; evaluating the same tick
    /// twice would push duplicate samples into the memory terms and is
    /// rejected with [`Error::TickNotAdvanced`].
    pub fn advance(&mut self, tick: u64, e: f64, e_dot: f64) -> Result<SurfaceSample> {
        if !e.is_finite() {
            return Err(Error::invalid("e", format!("must be finite, got {e}")));
        }
        if !e_dot.is_finite() {
            return Err(Error::invalid(
                "e_dot",
                format!("must be finite, got {e_dot}"),
            ));
        }
        if let Some(last) = self.last_tick {
            if tick <= last {
                return Err(Error::TickNotAdvanced { tick, last });
            }
        }
        let first = self.last_tick.is_none();
        self.last_tick = Some(tick);

        let mut frac_term_derivative = 0.0;
        let s = match self.spec.family {
            SurfaceFamily::Lss => e_dot + self.spec.position_feedback(e),
            SurfaceFamily::Iss => {
                if !first {
                    self.integral += 0.5 * (self.prev_e + e) * self.step;
                }
                e_dot + self.spec.k1 * self.integral + self.spec.position_feedback(e)
            }
            SurfaceFamily::Fss | SurfaceFamily::Pfss => {
                let x = sig_pow_raw(e, self.spec.effective_a());
                let memory = self
                    .frac_surface
                    .as_mut()
                    .expect("fractional family always holds its operators")
                    .step(x)?;
                frac_term_derivative = self
                    .frac_rate
                    .as_mut()
                    .expect("fractional family always holds its operators")
                    .step(x)?;
                e_dot + self.spec.k1 * memory + self.spec.position_feedback(e)
            }
        };
        self.prev_e = e;
        Ok(SurfaceSample {
            s,
            frac_term_derivative,
            nonlinear_feedback_term: self.spec.nonlinear_feedback_term(e, e_dot),
        })
    }

    /// [`SlidingSurface::advance`] returning only `s`.
    pub fn sliding_value(&mut self, tick: u64, e: f64, e_dot: f64) -> Result<f64> {
        self.advance(tick, e, e_dot).map(|sample| sample.s)
    }

    /// Clears all memory; the next sample is treated as a run's first.
    pub fn reset(&mut self) {
        if let Some(op) = self.frac_surface.as_mut() {
            op.reset();
        }
        if let Some(op) = self.frac_rate.as_mut() {
            op.reset();
        }
        self.integral = 0.0;
        self.prev_e = 0.0;
        self.last_tick = None;
    }
}

/// Integrates the autonomous error dynamics under a held sliding value:
/// `ė = s̄ − k1·(memory term) − (instantaneous feedback term)`, forward Euler
/// at `step_s`, with full (untruncated) fractional memory.
///
/// Returns the error trace sampled at `step_s`, starting from `e(0) = e0`;
/// the trace has `round(duration_s / step_s) + 1` samples.
pub fn constant_s_response(
    spec: &SurfaceSpec,
    s_held: f64,
    e0: f64,
    step_s: f64,
    duration_s: f64,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if !s_held.is_finite() {
        return Err(Error::invalid(
            "s_held",
            format!("must be finite, got {s_held}"),
        ));
    }
    if !e0.is_finite() {
        return Err(Error::invalid("e0", format!("must be finite, got {e0}")));
    }
    if !step_s.is_finite() || step_s <= 0.0 {
        return Err(Error::invalid(
            "step_s",
            format!("must be a positive sample step, got {step_s}"),
        ));
    }
    if !duration_s.is_finite() || duration_s <= 0.0 {
        return Err(Error::invalid(
            "duration_s",
            format!("must be a positive duration, got {duration_s}"),
        ));
    }
    let n = (duration_s / step_s).round() as usize + 1;
    let mut memory_op = if spec.uses_fractional() {
        Some(GlOperator::new(FracOrder::new(spec.xi - 1.0)?, step_s, n)?)
    } else {
        None
    };

    let mut e = Vec::with_capacity(n);
    e.push(e0);
    let mut integral = 0.0;
    for k in 0..n - 1 {
        let cur = e[k];
        let memory = match spec.family {
            SurfaceFamily::Lss => 0.0,
            SurfaceFamily::Iss => integral,
            SurfaceFamily::Fss | SurfaceFamily::Pfss => {
                let x = sig_pow_raw(cur, spec.effective_a());
                memory_op
                    .as_mut()
                    .expect("fractional family always holds its operator")
                    .step(x)?
            }
        };
        let e_dot = s_held - spec.k1 * memory - spec.position_feedback(cur);
        if !e_dot.is_finite() {
            return Err(Error::NonFinite {
                context: "constant-drive surface response".into(),
                t: k as f64 * step_s,
            });
        }
        let next = cur + step_s * e_dot;
        integral += 0.5 * (cur + next) * step_s;
        e.push(next);
    }
    // The linear family never consults k1; mirror that in the returned trace.
    Ok(e)
}

/// Summary statistics of an error trace from [`constant_s_response`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStats {
    /// Largest |e| over the trace.
    pub peak: f64,
    /// Value of the last sample.
    pub final_value: f64,
    /// Excursion beyond zero on the far side of the initial rise
    /// (0 when the trace never crosses zero).
    pub overshoot: f64,
    /// Earliest time after which |e| stays within `band_fraction·peak` of
    /// zero; `None` if the trace is still outside at the end.
    pub settle_to_zero: Option<f64>,
    /// Same band, centered on the trace's own final value.
    pub settle_to_final: Option<f64>,
}

/// Computes [`TraceStats`] with the settling band sized as
/// `band_fraction` of the trace's own peak |e|.
pub fn trace_stats(e: &[f64], step_s: f64, band_fraction: f64) -> Result<TraceStats> {
    if e.is_empty() {
        return Err(Error::invalid("e", "trace must hold at least one sample"));
    }
    if !step_s.is_finite() || step_s <= 0.0 {
        return Err(Error::invalid(
            "step_s",
            format!("must be a positive sample step, got {step_s}"),
        ));
    }
    if !band_fraction.is_finite() || band_fraction <= 0.0 {
        return Err(Error::invalid(
            "band_fraction",
            format!("must be > 0, got {band_fraction}"),
        ));
    }
    let peak = e.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let final_value = *e.last().expect("checked non-empty");
    // Side of the initial departure from zero; excursions past zero on the
    // opposite side count as overshoot.
    let rise_sign = e
        .iter()
        .find(|&&x| x != 0.0)
        .map_or(1.0, |&x| x.signum());
    let overshoot = e
        .iter()
        .fold(0.0_f64, |m, &x| m.max(-rise_sign * x));
    let band = band_fraction * peak;
    Ok(TraceStats {
        peak,
        final_value,
        overshoot,
        settle_to_zero: settling_time(e, step_s, 0.0, band),
        settle_to_final: settling_time(e, step_s, final_value, band),
    })
}

/// Earliest time after which the trace stays within `band` of `center`;
/// `None` if the last sample is still outside.
fn settling_time(e: &[f64], step_s: f64, center: f64, band: f64) -> Option<f64> {
    let last_outside = e.iter().rposition(|&x| (x - center).abs() > band);
    match last_outside {
        None => Some(0.0),
        Some(idx) if idx + 1 < e.len() => Some((idx + 1) as f64 * step_s),
        Some(_) => None,
    }
}

/// Trace value at time `t`, nearest-sample lookup.
pub fn value_at(e: &[f64], step_s: f64, t: f64) -> Result<f64> {
    if !step_s.is_finite() || step_s <= 0.0 {
        return Err(Error::invalid(
            "step_s",
            format!("must be a positive sample step, got {step_s}"),
        ));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(
            "t",
            format!("must be a non-negative time, got {t}"),
        ));
    }
    let idx = (t / step_s).round() as usize;
    e.get(idx).copied().ok_or_else(|| {
        Error::invalid("t", format!("t = {t} s lies beyond the trace"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pfss(k1: f64, k2: f64, xi: f64, a: f64) -> SurfaceSpec {
        SurfaceSpec {
            family: SurfaceFamily::Pfss,
            k1,
            k2,
            xi,
            a,
        }
    }

    fn lss(k2: f64) -> SurfaceSpec {
        SurfaceSpec {
            family: SurfaceFamily::Lss,
            k1: 0.0,
            k2,
            xi: 0.5,
            a: 1.0,
        }
    }

    #[test]
    fn linear_surface_is_direct_combination() {
        let mut surf = SlidingSurface::new(lss(500.0), 1e-3, 8).unwrap();
        let s = surf.sliding_value(0, 0.01, 0.0).unwrap();
        assert_eq!(s, 5.0);
        let s = surf.sliding_value(1, -0.002, 0.3).unwrap();
        assert!((s - (0.3 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn power_law_surface_vanishes_at_origin() {
        let mut surf = SlidingSurface::new(pfss(8.0, 500.0, 0.5, 0.5), 1e-3, 8).unwrap();
        let sample = surf.advance(0, 0.0, 0.0).unwrap();
        assert_eq!(sample.s, 0.0);
        assert_eq!(sample.frac_term_derivative, 0.0);
        assert_eq!(sample.nonlinear_feedback_term, 0.0);
    }

    #[test]
    fn constant_error_memory_term_matches_analytic_half_integral() {
        // e ≡ 0.01 at a = 1/2 feeds a constant 0.1 into the order −1/2
        // integral; analytically k1·D^{−1/2}[0.1] at t = 1 is
        // k1·0.1·t^{1/2}/Γ(3/2) = 0.90270333…, and the rate term is
        // k1-free: D^{1/2}[0.1] = 0.1·t^{−1/2}/Γ(1/2) = 0.05641896….
        let h = 1e-3;
        let steps = 1_000;
        let mut surf = SlidingSurface::new(pfss(8.0, 500.0, 0.5, 0.5), h, steps + 1).unwrap();
        let mut last = None;
        for k in 0..=steps {
            last = Some(surf.advance(k as u64, 0.01, 0.0).unwrap());
        }
        let sample = last.unwrap();

        let position_term = 500.0 * 0.01_f64 * 0.01; // k2·sig(e)^{1/a} = k2·e²
        let memory_term = sample.s - position_term;
        let analytic_memory = 0.9027033336764100;
        assert!(
            (memory_term - analytic_memory).abs() < 5e-3 * analytic_memory,
            "memory term {memory_term} vs analytic {analytic_memory}"
        );
        assert!((sample.s - (analytic_memory + 0.05)).abs() < 5e-3);

        let analytic_rate = 0.1 / 1.7724538509055160273;
        assert!(
            (sample.frac_term_derivative - analytic_rate).abs() < 1e-2 * analytic_rate,
            "rate term {} vs analytic {analytic_rate}",
            sample.frac_term_derivative
        );
    }

    #[test]
    fn nonlinear_feedback_reduces_to_linear_rate_at_unit_exponent() {
        let spec = SurfaceSpec {
            family: SurfaceFamily::Fss,
            k1: 53.0,
            k2: 1200.0,
            xi: 0.5,
            a: 1.0,
        };
        assert!((spec.nonlinear_feedback_term(0.04, 0.002) - 2.4).abs() < 1e-12);
        assert!((spec.nonlinear_feedback_term(0.0, 0.002) - 2.4).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_feedback_fractional_exponent() {
        let spec = pfss(0.0, 1.0, 0.5, 0.5);
        // (k2/a)·|e|^{(1−a)/a}·ė = 2·|0.04|¹·1
        assert!((spec.nonlinear_feedback_term(0.04, 1.0) - 0.08).abs() < 1e-15);
        // Positive exponent: no singularity at e = 0.
        assert_eq!(spec.nonlinear_feedback_term(0.0, 5.0), 0.0);
    }

    #[test]
    fn zero_error_history_has_zero_memory_rate() {
        let spec = SurfaceSpec {
            family: SurfaceFamily::Fss,
            k1: 53.0,
            k2: 1200.0,
            xi: 0.5,
            a: 1.0,
        };
        let mut surf = SlidingSurface::new(spec, 1e-3, 64).unwrap();
        for k in 0..10 {
            let sample = surf.advance(k, 0.0, 0.0).unwrap();
            assert_eq!(sample.frac_term_derivative, 0.0);
        }
    }

    #[test]
    fn repeated_tick_is_rejected() {
        let mut surf = SlidingSurface::new(lss(8.0), 1e-3, 8).unwrap();
        surf.advance(5, 0.1, 0.0).unwrap();
        let err = surf.advance(5, 0.1, 0.0).unwrap_err();
        assert!(matches!(
            err,
            Error::TickNotAdvanced { tick: 5, last: 5 }
        ));
        let err = surf.advance(4, 0.1, 0.0).unwrap_err();
        assert!(matches!(
            err,
            Error::TickNotAdvanced { tick: 4, last: 5 }
        ));
        surf.advance(6, 0.1, 0.0).unwrap();
        surf.reset();
        surf.advance(0, 0.1, 0.0).unwrap();
    }

    #[test]
    fn validation_rejects_out_of_range_coefficients() {
        assert!(SurfaceSpec { k2: 0.0, ..pfss(8.0, 0.0, 0.5, 0.5) }
            .validate()
            .is_err());
        assert!(pfss(-1.0, 500.0, 0.5, 0.5).validate().is_err());
        assert!(pfss(8.0, 500.0, 0.0, 0.5).validate().is_err());
        assert!(pfss(8.0, 500.0, 1.0, 0.5).validate().is_err());
        assert!(pfss(8.0, 500.0, 0.5, 1.0).validate().is_err());
        assert!(pfss(8.0, 500.0, 0.5, 0.0).validate().is_err());
        // The linear family ignores k1/xi/a no matter their values.
        let loose = SurfaceSpec {
            family: SurfaceFamily::Lss,
            k1: -3.0,
            k2: 8.0,
            xi: 7.0,
            a: 42.0,
        };
        assert!(loose.validate().is_ok());
    }

    #[test]
    fn integral_surface_accumulates_trapezoids() {
        let spec = SurfaceSpec {
            family: SurfaceFamily::Iss,
            k1: 2.0,
            k2: 3.0,
            xi: 0.5,
            a: 1.0,
        };
        let mut surf = SlidingSurface::new(spec, 0.5, 8).unwrap();
        assert_eq!(surf.sliding_value(0, 0.0, 0.0).unwrap(), 0.0);
        // ∫ grows by ½(0+1)·0.5 = 0.25 → s = 2·0.25 + 3·1 = 3.5
        assert_eq!(surf.sliding_value(1, 1.0, 0.0).unwrap(), 3.5);
        // ∫ grows by ½(1+1)·0.5 = 0.5 → s = 2·0.75 + 3·1 = 4.5
        assert_eq!(surf.sliding_value(2, 1.0, 0.0).unwrap(), 4.5);
    }

    #[test]
    fn zero_memory_gain_reduces_fractional_to_linear() {
        let frac_spec = SurfaceSpec {
            family: SurfaceFamily::Fss,
            k1: 0.0,
            k2: 8.0,
            xi: 0.5,
            a: 1.0,
        };
        let mut frac = SlidingSurface::new(frac_spec, 1e-3, 256).unwrap();
        let mut lin = SlidingSurface::new(lss(8.0), 1e-3, 256).unwrap();
        for k in 0..200u64 {
            let t = k as f64 * 1e-3;
            let e = (31.0 * t).sin() * 0.02;
            let e_dot = 31.0 * (31.0 * t).cos() * 0.02;
            let a = frac.sliding_value(k, e, e_dot).unwrap();
            let b = lin.sliding_value(k, e, e_dot).unwrap();
            assert_eq!(a, b);
        }

        let frac_trace = constant_s_response(&frac_spec, 1.0, 0.0, 1e-3, 0.5).unwrap();
        let lin_trace = constant_s_response(&lss(8.0), 1.0, 0.0, 1e-3, 0.5).unwrap();
        assert_eq!(frac_trace, lin_trace);
    }

    #[test]
    fn constant_drive_study_reproduces_published_orderings() {
        // All four families driven by s̄ = 1 from e(0) = 0. The power-law
        // fractional surface must settle fastest, overshoot less than the
        // integral surface, and sit closest to zero at t = 1.45 s; the
        // linear surface parks at its offset s̄/k2.
        let h = 1e-3;
        let dur = 2.0;
        let k1 = 500.0;
        let k2 = 8.0;
        let specs = [
            lss(k2),
            SurfaceSpec {
                family: SurfaceFamily::Iss,
                k1,
                k2,
                xi: 0.5,
                a: 1.0,
            },
            SurfaceSpec {
                family: SurfaceFamily::Fss,
                k1,
                k2,
                xi: 0.5,
                a: 1.0,
            },
            pfss(k1, k2, 0.5, 0.5),
        ];
        let traces: Vec<Vec<f64>> = specs
            .iter()
            .map(|s| constant_s_response(s, 1.0, 0.0, h, dur).unwrap())
            .collect();
        let stats: Vec<TraceStats> = traces
            .iter()
            .map(|t| trace_stats(t, h, 0.05).unwrap())
            .collect();
        let (lin, int, frac, power) = (&stats[0], &stats[1], &stats[2], &stats[3]);

        // Linear: monotone rise onto the offset 1/k2 = 0.125, no overshoot,
        // never near zero.
        assert!((lin.final_value - 0.125).abs() < 1e-6);
        assert_eq!(lin.overshoot, 0.0);
        assert!(lin.settle_to_zero.is_none());

        // Integral: significant zero-crossing overshoot, slow reconvergence.
        assert!(int.overshoot > 0.018 && int.overshoot < 0.022);
        assert!(int.settle_to_zero.unwrap() > 0.5);

        // Fractional (a = 1): smaller overshoot than the integral surface.
        assert!(frac.overshoot < 0.5 * int.overshoot);

        // Power-law fractional: fastest settling, smallest overshoot.
        let power_settle = power.settle_to_zero.expect("power-law trace settles");
        assert!(power_settle < 0.05, "settled at {power_settle} s");
        for other in [lin, int, frac] {
            assert!(power_settle < other.settle_to_zero.unwrap_or(f64::INFINITY));
        }
        assert!(power.overshoot < 0.01 * int.overshoot);

        // Distance to zero at t = 1.45 s.
        let at = |i: usize| value_at(&traces[i], h, 1.45).unwrap().abs();
        let (d_lin, d_int, d_frac, d_power) = (at(0), at(1), at(2), at(3));
        assert!(d_power < d_int && d_power < d_lin && d_power < d_frac);
        assert!(d_lin > 0.1, "linear surface stays far from zero");
    }

    #[test]
    fn trace_statistics_on_synthetic_trace() {
        let e = [0.0, 1.0, 2.0, 1.0, 0.5, -0.1, 0.0, 0.0, 0.0, 0.0];
        let stats = trace_stats(&e, 1.0, 0.05).unwrap();
        assert_eq!(stats.peak, 2.0);
        assert_eq!(stats.final_value, 0.0);
        assert!((stats.overshoot - 0.1).abs() < 1e-15);
        assert_eq!(stats.settle_to_zero, Some(5.0));
        assert_eq!(stats.settle_to_final, Some(5.0));
        assert_eq!(value_at(&e, 1.0, 3.0).unwrap(), 1.0);
        assert!(value_at(&e, 1.0, 99.0).is_err());

        // A trace that ends away from zero never settles to zero but does
        // settle onto its own final value.
        let rising: Vec<f64> = (0..100).map(|k| 1.0 - (-0.2 * k as f64).exp()).collect();
        let stats = trace_stats(&rising, 1.0, 0.05).unwrap();
        assert!(stats.settle_to_zero.is_none());
        assert!(stats.settle_to_final.is_some());
        assert_eq!(stats.overshoot, 0.0);
    }

    #[test]
    fn constant_s_response_rejects_bad_arguments() {
        let spec = pfss(8.0, 500.0, 0.5, 0.5);
        assert!(constant_s_response(&spec, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(constant_s_response(&spec, 1.0, 0.0, 1e-3, 0.0).is_err());
        assert!(constant_s_response(&spec, f64::NAN, 0.0, 1e-3, 1.0).is_err());
        assert!(constant_s_response(&pfss(8.0, -1.0, 0.5, 0.5), 1.0, 0.0, 1e-3, 1.0).is_err());
    }

    proptest! {
        // Every term of every family is odd in (e, ė), so negating the whole
        // input history negates the sliding variable.
        #[test]
        fn sliding_value_is_odd_under_history_negation(
            samples in prop::collection::vec((-0.05f64..0.05, -1.0f64..1.0), 1..30),
            family_idx in 0usize..4,
        ) {
            let family = [
                SurfaceFamily::Lss,
                SurfaceFamily::Iss,
                SurfaceFamily::Fss,
                SurfaceFamily::Pfss,
            ][family_idx];
            let spec = SurfaceSpec {
                family,
                k1: 500.0,
                k2: 8.0,
                xi: 0.5,
                a: if family == SurfaceFamily::Pfss { 0.5 } else { 1.0 },
            };
            let mut pos = SlidingSurface::new(spec, 1e-3, 64).unwrap();
            let mut neg = SlidingSurface::new(spec, 1e-3, 64).unwrap();
            for (k, &(e, e_dot)) in samples.iter().enumerate() {
                let sp = pos.sliding_value(k as u64, e, e_dot).unwrap();
                let sn = neg.sliding_value(k as u64, -e, -e_dot).unwrap();
                prop_assert!((sp + sn).abs() <= 1e-12 * sp.abs().max(1.0));
            }
        }
    }
}
