//! Scratch probe for the study orderings (not part of the test suite).

use stagesim::metrics::{full_report, log_spaced_bands};
use stagesim::plant::{DisturbanceSpec, NoiseSpec};
use stagesim::presets::*;
use stagesim::sim::{run, RunRecord, SimConfig};
use stagesim::trajectory::{generate_scan, AccelShape};

fn window_vals<'a>(
    rec: &'a RunRecord,
    t0: f64,
    t1: f64,
) -> impl Iterator<Item = f64> + 'a {
    rec.t
        .iter()
        .zip(&rec.e)
        .filter(move |(&tk, _)| tk >= t0 && tk < t1)
        .map(|(_, &ek)| ek)
}

fn wmax(rec: &RunRecord, t0: f64, t1: f64) -> f64 {
    window_vals(rec, t0, t1).fold(0.0_f64, |m, e| m.max(e.abs()))
}

fn wrms(rec: &RunRecord, t0: f64, t1: f64) -> f64 {
    let mut n = 0usize;
    let mut s = 0.0;
    for e in window_vals(rec, t0, t1) {
        n += 1;
        s += e * e;
    }
    (s / n as f64).sqrt()
}

fn overall(rec: &RunRecord) -> f64 {
    rec.e.iter().fold(0.0_f64, |m, &e| m.max(e.abs()))
}

/// |e| envelope: centered-ish moving average over `w` samples.
fn envelope(e: &[f64], w: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(e.len());
    let mut acc = 0.0;
    let mut q = std::collections::VecDeque::new();
    for &x in e {
        acc += x.abs();
        q.push_back(x.abs());
        if q.len() > w {
            acc -= q.pop_front().unwrap();
        }
        out.push(acc / q.len() as f64);
    }
    out
}

struct DistResponse {
    floor: f64,
    peak_excess: f64,
    decay_s: f64,
}

/// Envelope-based step response: pre-trigger floor, peak excess over the
/// floor inside [t_trig, t_end), time for the excess to fall to 10%.
fn disturbance_response(rec: &RunRecord, t_trig: f64, t_end: f64) -> DistResponse {
    let env = envelope(&rec.e, 10);
    let h = rec.t[1] - rec.t[0];
    let k_trig = (t_trig / h) as usize;
    let k_end = ((t_end / h) as usize).min(env.len());
    let k_floor0 = k_trig.saturating_sub(500);
    let floor = env[k_floor0..k_trig].iter().cloned().fold(0.0, f64::max);
    let (peak_idx, peak) = env[k_trig..k_end]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &v)| (k_trig + i, v))
        .unwrap();
    let excess = (peak - floor).max(0.0);
    let thresh = floor + 0.1 * excess;
    let decay_s = env[peak_idx..]
        .iter()
        .position(|&v| v <= thresh)
        .map(|i| i as f64 * h)
        .unwrap_or(f64::INFINITY);
    DistResponse {
        floor,
        peak_excess: excess,
        decay_s,
    }
}

fn with_noise(mut config: SimConfig, power: f64, seed: u64) -> SimConfig {
    config.noise = NoiseSpec {
        power,
        cutoff_hz: f64::INFINITY,
        seed: 1,
    };
    config.seed = seed;
    if let Ok(cutoff) = std::env::var("EDOT_CUTOFF") {
        config.e_dot_cutoff_hz = cutoff.parse().unwrap();
    }
    if let Ok(limit) = std::env::var("U_SAT") {
        config.u_limit_v = limit.parse().unwrap();
    }
    if let Ok(horizon) = std::env::var("FRAC_HORIZON") {
        config.frac_horizon_s = horizon.parse().unwrap();
    }
    if let Ok(k) = std::env::var("PLANT_K") {
        config.plant.k = k.parse().unwrap();
    }
    if let Ok(d) = std::env::var("DELAY") {
        config.delay_ticks = d.parse().unwrap();
    }
    config
}

fn maybe_scurve(mut config: SimConfig, case: CaseId) -> SimConfig {
    if let Ok(t_a) = std::env::var("SCURVE_TA") {
        let scale: f64 = match case {
            CaseId::Case1 => 1.0,
            CaseId::Case2 => std::env::var("SCURVE_TA2_SCALE")
                .map(|s| s.parse().unwrap())
                .unwrap_or(1.0),
        };
        let mut spec = case_trajectory_spec(case);
        spec.accel_time = t_a.parse::<f64>().unwrap() * scale;
        spec.shape = AccelShape::SCurve;
        config.trajectory = generate_scan(&spec).unwrap();
        config.initial_position = config.trajectory.r[0];
    }
    config
}

fn accel_clauses(power: f64, seed: u64) {
    let (high_w, zero_w) = accel_study_intervals();
    let mut overall_by: Vec<(String, f64)> = Vec::new();
    let mut max_ok = true;
    let mut rms_ok = true;
    let mut detail = String::new();
    for (label, config) in accel_study_configs(ACCEL_STUDY_HIGH, 0).unwrap() {
        let rec = run(&with_noise(config, power, seed)).unwrap();
        let hi_max = high_w.iter().map(|&(a, b)| wmax(&rec, a, b)).fold(0.0, f64::max);
        let zero_max = zero_w.iter().map(|&(a, b)| wmax(&rec, a, b)).fold(0.0, f64::max);
        let hi_rms = high_w.iter().map(|&(a, b)| wrms(&rec, a, b)).fold(0.0, f64::max);
        let zero_rms = zero_w.iter().map(|&(a, b)| wrms(&rec, a, b)).fold(0.0, f64::max);
        if hi_max <= zero_max {
            max_ok = false;
        }
        if hi_rms <= zero_rms {
            rms_ok = false;
        }
        detail.push_str(&format!(
            "      {label:7} hiM={hi_max:.2e} zM={zero_max:.2e} hiR={hi_rms:.2e} zR={zero_rms:.2e}\n"
        ));
        overall_by.push((label, overall(&rec)));
    }
    let min = overall_by
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let pf = overall_by.iter().find(|(l, _)| l == "PFVSTA").unwrap();
    let second = overall_by
        .iter()
        .filter(|(l, _)| l != "PFVSTA")
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    println!(
        "accel p={power:.0e} seed={seed}: 6a_max={max_ok} 6a_rms={rms_ok} 6b_min={}({}, margin {:.2})",
        min.0 == "PFVSTA",
        min.0,
        second / pf.1
    );
    print!("{detail}");
}

fn scan_clauses(power: f64, seed: u64) {
    let decel_t = 0.2 + 0.012 + (0.05 - 10.0 * 0.012 * 0.012) / 0.12;
    let mut ad_by: Vec<(String, f64)> = Vec::new();
    let mut resp: Vec<(String, DistResponse)> = Vec::new();
    let mut post_raw: Vec<(String, f64)> = Vec::new();
    for (label, config) in scan_study_configs(0).unwrap() {
        let rec = run(&with_noise(config, power, seed)).unwrap();
        let report = full_report(&rec, 0.95, &log_spaced_bands(1e-12, 1e-2, 160).unwrap()).unwrap();
        ad_by.push((label.clone(), report.ad.unwrap().max));
        let k_trig = rec.p.iter().position(|&p| p >= 0.023).unwrap();
        let t_trig = rec.t[k_trig];
        resp.push((label.clone(), disturbance_response(&rec, t_trig, decel_t)));
        post_raw.push((label, wmax(&rec, t_trig, decel_t)));
    }
    let cg_ad = ad_by.iter().find(|(l, _)| l == "CGSTA").unwrap().1;
    let a7_5way = ad_by
        .iter()
        .filter(|(l, _)| l != "CGSTA")
        .all(|(_, v)| *v < cg_ad);
    let min_excess = resp
        .iter()
        .min_by(|a, b| a.1.peak_excess.partial_cmp(&b.1.peak_excess).unwrap())
        .unwrap();
    let min_raw = post_raw
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let dk = |l: &str| resp.iter().find(|(x, _)| x == l).unwrap().1.decay_s;
    let c7c = dk("VGPID") > dk("CGSTA") && dk("VGPID") > dk("VGSTA");
    println!(
        "scan  p={power:.0e} seed={seed}: 7a5={a7_5way} 7b_excess_min={}({}) 7b_raw_min={}({}) 7c={c7c} [decay VGPID={:.4} CG={:.4} VG={:.4}]",
        min_excess.0 == "PFVSTA",
        min_excess.0,
        min_raw.0 == "PFVSTA",
        min_raw.0,
        dk("VGPID"),
        dk("CGSTA"),
        dk("VGSTA"),
    );
    for (l, r) in &resp {
        let ad = ad_by.iter().find(|(x, _)| x == l).unwrap().1;
        let raw = post_raw.iter().find(|(x, _)| x == l).unwrap().1;
        println!(
            "      {l:7} adM={ad:.2e} postRaw={raw:.2e} floor={:.2e} excess={:.2e} decay={:.4}",
            r.floor, r.peak_excess, r.decay_s
        );
    }
}

fn case_clauses(case: CaseId, power: f64, dist: DisturbanceSpec, seed: u64) {
    let grid = log_spaced_bands(1e-10, 1e-2, 160).unwrap();
    let mut rows = Vec::new();
    for (label, config) in case_configs(case, 0).unwrap() {
        let mut config = maybe_scurve(with_noise(config, power, seed), case);
        config.disturbance = dist;
        let rec = run(&config).unwrap();
        if rec.abort.is_some() {
            println!("  {label} ABORT");
            return;
        }
        let report = full_report(&rec, 0.95, &grid).unwrap();
        rows.push((
            label,
            report.sp.unwrap().rms,
            report.ad.unwrap().rms,
            overall(&rec),
            report.scan.unwrap().tp_over_ts,
        ));
    }
    let min_sp = rows.iter().min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
    let max_peak = rows.iter().max_by(|a, b| a.3.partial_cmp(&b.3).unwrap()).unwrap();
    let pf = rows.iter().find(|r| r.0 == "PFVSTA").unwrap();
    println!(
        "{case:?} p={power:.0e} fr={} rip={} seed={seed}: sp_min={}({}) peak_max={}({}) pf_tp={:.4}",
        dist.friction_residual,
        dist.ripple_amplitude,
        min_sp.0 == "PFVSTA",
        min_sp.0,
        max_peak.0,
        max_peak.3,
        pf.4
    );
    for (l, sp, ad, pk, tp) in &rows {
        println!("      {l:7} spR={sp:.3e} adR={ad:.3e} peak={pk:.3e} tp={tp:.4}");
    }
}

fn sp_split(case: CaseId, power: f64, dist: DisturbanceSpec, seed: u64) {
    use stagesim::trajectory::Phase;
    println!("{case:?} p={power:.0e} seed={seed} SP quarters:");
    for (label, config) in case_configs(case, 0).unwrap() {
        if label != "PFVSTA" && label != "IFVSTA" {
            continue;
        }
        let mut config = maybe_scurve(with_noise(config, power, seed), case);
        config.disturbance = dist;
        let rec = run(&config).unwrap();
        let first = rec.phase.iter().position(|p| *p == Phase::Sp).unwrap();
        let last = rec.phase.iter().rposition(|p| *p == Phase::Sp).unwrap();
        let (t0, t1) = (rec.t[first], rec.t[last]);
        let q = (t1 - t0) / 8.0;
        let rms: Vec<f64> = (0..8)
            .map(|i| wrms(&rec, t0 + i as f64 * q, t0 + (i + 1) as f64 * q))
            .collect();
        println!(
            "  {label:7} {}",
            rms.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>().join(" ")
        );
    }
}

fn powers() -> Vec<f64> {
    match std::env::var("POWERS") {
        Ok(list) => list.split(',').map(|p| p.parse().unwrap()).collect(),
        Err(_) => vec![0.0, 1e-19, 1e-18, 1e-17, 1e-16],
    }
}

fn seeds() -> Vec<u64> {
    match std::env::var("SEEDS") {
        Ok(list) => list.split(',').map(|p| p.parse().unwrap()).collect(),
        Err(_) => vec![0, 1, 2],
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("all");

    if which == "accel" || which == "all" {
        for power in powers() {
            for seed in seeds() {
                accel_clauses(power, seed);
            }
        }
    }
    if which == "scan" || which == "all" {
        for power in powers() {
            for seed in seeds() {
                scan_clauses(power, seed);
            }
        }
    }
    if which == "bake" {
        bake_case(CaseId::Case1);
        bake_case(CaseId::Case2);
    }
    if which == "contain" {
        containment_probe();
    }
    if which == "case" || which == "all" {
        let dists: Vec<(f64, f64)> = match std::env::var("DISTS") {
            Ok(list) => list
                .split(',')
                .map(|pair| {
                    let (f, r) = pair.split_once(':').unwrap();
                    (f.parse().unwrap(), r.parse().unwrap())
                })
                .collect(),
            Err(_) => vec![(0.02, 0.01), (0.3, 0.15)],
        };
        for power in powers() {
            for &(friction, ripple) in &dists {
                let dist = DisturbanceSpec {
                    friction_residual: friction,
                    ripple_amplitude: ripple,
                    ripple_spatial_period: 0.01,
                    ..DisturbanceSpec::default()
                };
                for seed in seeds() {
                    case_probe_both(power, dist, seed);
                }
            }
        }
    }
}

fn bake_case(case: CaseId) {
    let grid = log_spaced_bands(1e-10, 1e-2, 160).unwrap();
    let mut rows = Vec::new();
    for (label, config) in case_configs(case, 0).unwrap() {
        let rec = run(&config).unwrap();
        if let Some(abort) = &rec.abort {
            println!("  {label} ABORT {}", abort.reason);
            return;
        }
        let report = full_report(&rec, 0.95, &grid).unwrap();
        rows.push((
            label,
            report.sp.unwrap().rms,
            report.ad.unwrap().rms,
            overall(&rec),
            report.scan.unwrap().tp_over_ts,
        ));
    }
    let min_sp = rows.iter().min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
    let pf = rows.iter().find(|r| r.0 == "PFVSTA").unwrap();
    println!(
        "BAKED {case:?}: sp_min={}({}) pf_tp={:.4}",
        min_sp.0 == "PFVSTA",
        min_sp.0,
        pf.4
    );
    for (l, sp, ad, pk, tp) in &rows {
        println!("      {l:7} spR={sp:.3e} adR={ad:.3e} peak={pk:.3e} tp={tp:.4}");
    }
}

fn containment_probe() {
    use stagesim::sim::lyapunov_probe;
    let mut config = containment_config(0);
    if let Ok(cutoff) = std::env::var("EDOT_CUTOFF") {
        config.e_dot_cutoff_hz = cutoff.parse().unwrap();
    }
    if let Ok(p0) = std::env::var("INIT_POS") {
        config.initial_position = p0.parse().unwrap();
    }
    let rec = run(&config).unwrap();
    assert!(rec.abort.is_none(), "abort: {:?}", rec.abort);
    let gamma = CONTAINMENT_GAMMA;
    let entry = rec.s.iter().position(|s| s.abs() <= gamma);
    let Some(entry) = entry else {
        println!("contain: |s| never entered the band; min|s|={:.3e}", rec.s.iter().fold(f64::INFINITY, |m, s| m.min(s.abs())));
        return;
    };
    let post = &rec.s[entry..];
    let post_max = post.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    let ds_all = rec.s.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0_f64, f64::max);
    let ds_post = post.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0_f64, f64::max);
    let worst = rec.s[entry..]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .unwrap();
    let stats = lyapunov_probe(&rec, 2.0, -1.0, 1.0, gamma).unwrap();
    println!(
        "contain: entry_k={entry} t={:.4}s post_max|s|={post_max:.4e} excess={:.3e} worst_t={:.4} slack_all={ds_all:.3e} slack_post={ds_post:.3e}",
        rec.t[entry],
        (post_max - gamma).max(0.0),
        rec.t[entry + worst.0],
    );
    println!(
        "contain: qualifying={} decreasing={} frac={:?} v_min={:.3e} v_max={:.3e}",
        stats.qualifying, stats.decreasing, stats.decrease_fraction, stats.v_min, stats.v_max
    );
    let n_show = 12;
    let step = rec.len() / n_show;
    let profile: Vec<String> = (0..n_show)
        .map(|i| format!("{:.2e}", rec.s[i * step].abs()))
        .collect();
    println!("contain: |s| profile {}", profile.join(" "));
    let h1 = rec.h1[rec.len() / 2];
    let h2 = rec.h2[rec.len() / 2];
    println!("contain: mid-run h1={h1:.3} h2={h2:.3} u_mid={:.3} z_mid={:.4}", rec.u[rec.len() / 2], rec.z[rec.len() / 2]);
    let mut fails: Vec<usize> = Vec::new();
    for k in 0..rec.len() - 1 {
        if rec.s[k].abs() > gamma && rec.v_lyap[k + 1] >= rec.v_lyap[k] {
            fails.push(k);
        }
    }
    println!("contain: {} fails, first 10 {:?}", fails.len(), &fails[..fails.len().min(10)]);
    if let (Some(&first), Some(&last)) = (fails.first(), fails.last()) {
        println!("contain: fail span t=[{:.4}, {:.4}]", rec.t[first], rec.t[last]);
    }
    for &k in fails.iter().take(5) {
        println!(
            "      k={k} s={:+.4e} z={:+.6} V {:.6e} -> {:.6e} u={:+.4}",
            rec.s[k], rec.z[k], rec.v_lyap[k], rec.v_lyap[k + 1], rec.u[k]
        );
    }
}

fn case_probe_both(power: f64, dist: DisturbanceSpec, seed: u64) {
    if std::env::var("SP_SPLIT").is_ok() {
        sp_split(CaseId::Case1, power, dist, seed);
        sp_split(CaseId::Case2, power, dist, seed);
        return;
    }
    case_clauses(CaseId::Case1, power, dist, seed);
    case_clauses(CaseId::Case2, power, dist, seed);
}
