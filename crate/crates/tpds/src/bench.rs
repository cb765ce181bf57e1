//! Wall-clock scaling harness comparing the two informativity paths.
//!
//! For each grid point r = 2^p the harness generates seeded data once,
//! runs the unfolding-based check and the transform-based check on that
//! same data, and records the median of several timed repetitions (one
//! warm-up run discarded). Timing covers the decision procedure only;
//! data generation and file I/O sit outside the timers.
//!
//! A per-point wall-clock cap keeps the cubic-cost unfolding path from
//! stalling the suite: the first measurement over the cap is still
//! recorded, and every larger grid point for that method is skipped and
//! marked. Verdicts must agree between the two methods at every point
//! where both ran; disagreement aborts the experiment as a bug.

use std::time::Instant;

use crate::datagen::{assemble, random_system, random_tensor, simulate, Dist};
use crate::error::{Result, TpdsError};
use crate::informativity::{
    informative_controllability, informative_stability, informative_sysid, CheckConfig, Method,
    TestKind,
};
use crate::tensor3::Tensor3;
use crate::{derive_seed, ExecMode};

/// CSV method tag; the unfolding-based oracle is tagged `unfold`.
pub fn method_tag(m: Method) -> &'static str {
    match m {
        Method::Fourier => "fourier",
        Method::Dense => "unfold",
    }
}

/// Grid and measurement settings for one experiment.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub kind: TestKind,
    pub n: usize,
    pub h: usize,
    pub l: usize,
    /// Exponents p; the grid runs r = 2^p. Must be nonempty and ascending.
    pub p_range: Vec<u32>,
    /// Timed repetitions per point (median taken); at least 1.
    pub reps: usize,
    pub seed: u64,
    /// Thread count recorded with each measurement; 1 keeps both methods
    /// sequential so the comparison isolates algorithmic complexity.
    pub threads: usize,
    /// Per-point wall-clock cap in seconds.
    pub cap_s: f64,
}

impl BenchConfig {
    /// Experiment defaults at desk scale: n=2, h=2, l=10, median of 5,
    /// single-threaded, 120 s cap. The default grid depends on the test:
    /// sysid p=2..10, stability p=2..11, controllability p=2..9.
    pub fn default_for(kind: TestKind) -> Self {
        let pmax = match kind {
            TestKind::Stability => 11,
            TestKind::Controllability | TestKind::Stabilizability => 9,
            TestKind::Sysid => 10,
        };
        BenchConfig {
            kind,
            n: 2,
            h: 2,
            l: 10,
            p_range: (2..=pmax).collect(),
            reps: 5,
            seed: 0xbe9c,
            threads: 1,
            cap_s: 120.0,
        }
    }
}

/// One timing measurement; ratios derive from the recorded time.
#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub kind: TestKind,
    pub method: &'static str,
    pub r: usize,
    pub n: usize,
    pub h: usize,
    pub l: usize,
    /// Repetitions the median actually used (fewer than configured when
    /// the cap cut the point short).
    pub reps: usize,
    pub threads: usize,
    pub time_s: f64,
    pub time_per_r: f64,
    pub time_per_r3: f64,
}

impl BenchRecord {
    fn new(
        cfg: &BenchConfig,
        method: &'static str,
        r: usize,
        reps: usize,
        time_s: f64,
    ) -> Self {
        let rf = r as f64;
        BenchRecord {
            kind: cfg.kind,
            method,
            r,
            n: cfg.n,
            h: cfg.h,
            l: cfg.l,
            reps,
            threads: cfg.threads,
            time_s,
            time_per_r: time_s / rf,
            time_per_r3: time_s / (rf * rf * rf),
        }
    }
}

/// A grid point a method did not run because an earlier point hit the cap.
#[derive(Clone, Debug)]
pub struct SkippedPoint {
    pub kind: TestKind,
    pub method: &'static str,
    pub r: usize,
    pub reason: String,
}

/// Verdicts observed at one grid point (None where a method was skipped).
#[derive(Clone, Debug)]
pub struct PointVerdict {
    pub r: usize,
    pub unfold: Option<bool>,
    pub fourier: Option<bool>,
}

/// Everything a run produced: measurements, skip markers, verdicts.
#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<SkippedPoint>,
    pub verdicts: Vec<PointVerdict>,
}

fn validate(cfg: &BenchConfig) -> Result<()> {
    if cfg.p_range.is_empty() {
        return Err(TpdsError::InsufficientData("empty exponent grid".into()));
    }
    if !cfg.p_range.windows(2).all(|w| w[0] < w[1]) {
        return Err(TpdsError::InsufficientData(
            "exponent grid must be strictly ascending".into(),
        ));
    }
    if cfg.reps == 0 {
        return Err(TpdsError::InsufficientData("reps must be at least 1".into()));
    }
    if cfg.threads == 0 {
        return Err(TpdsError::InsufficientData(
            "threads must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Seeded inputs for one grid point; generation stays outside the timers.
fn point_data(cfg: &BenchConfig, r: usize, seed: u64) -> Result<(Tensor3, Option<Tensor3>)> {
    match cfg.kind {
        TestKind::Sysid => Ok((
            random_tensor(cfg.n, cfg.l * cfg.h, r, seed, Dist::StandardNormal),
            None,
        )),
        TestKind::Stability => {
            // trajectory of a stable system so the full procedure runs:
            // rank screen, pseudoinverse, spectral radii
            let a = random_system(cfg.n, r, derive_seed(seed, 1), Some(0.9))?;
            let x_init = random_tensor(cfg.n, cfg.h, r, derive_seed(seed, 2), Dist::StandardNormal);
            let traj = simulate(&a, &x_init, cfg.l)?;
            let data = assemble(&traj)?;
            Ok((data.x0, Some(data.x1)))
        }
        TestKind::Controllability | TestKind::Stabilizability => Ok((
            random_tensor(cfg.n, cfg.l * cfg.h, r, derive_seed(seed, 1), Dist::StandardNormal),
            Some(random_tensor(
                cfg.n,
                cfg.l * cfg.h,
                r,
                derive_seed(seed, 2),
                Dist::StandardNormal,
            )),
        )),
    }
}

fn run_once(
    cfg: &BenchConfig,
    method: Method,
    x0: &Tensor3,
    x1: Option<&Tensor3>,
) -> Result<bool> {
    let check = CheckConfig {
        method,
        tol_rank_rel: None,
        tol_stab: 1e-9,
        seed: derive_seed(cfg.seed, 0xc0de),
        exec: if cfg.threads == 1 {
            ExecMode::Sequential
        } else {
            ExecMode::Parallel
        },
    };
    let report = match cfg.kind {
        TestKind::Sysid => informative_sysid(x0, &check)?,
        TestKind::Stability => informative_stability(
            x0,
            x1.expect("stability bench data carries x1"),
            &check,
        )?,
        TestKind::Controllability | TestKind::Stabilizability => informative_controllability(
            None,
            x0,
            x1.expect("pencil bench data carries x1"),
            &check,
        )?,
    };
    Ok(report.verdict)
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let k = samples.len();
    if k % 2 == 1 {
        samples[k / 2]
    } else {
        0.5 * (samples[k / 2 - 1] + samples[k / 2])
    }
}

/// Run the experiment grid. Both methods see identical data at each point,
/// so their verdicts must match wherever both ran.
pub fn run_experiment(cfg: &BenchConfig) -> Result<BenchOutcome> {
    validate(cfg)?;
    crate::init_threads(Some(cfg.threads));

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut verdicts = Vec::new();
    // once a method hits the cap it stops climbing the grid
    let mut capped: [Option<String>; 2] = [None, None];
    let methods = [Method::Dense, Method::Fourier];

    for &p in &cfg.p_range {
        let r = 1usize << p;
        let (x0, x1) = point_data(cfg, r, derive_seed(cfg.seed, u64::from(p)))?;
        let mut point = PointVerdict {
            r,
            unfold: None,
            fourier: None,
        };

        for (mi, &method) in methods.iter().enumerate() {
            let tag = method_tag(method);
            if let Some(reason) = &capped[mi] {
                skipped.push(SkippedPoint {
                    kind: cfg.kind,
                    method: tag,
                    r,
                    reason: reason.clone(),
                });
                continue;
            }

            // warm-up: discarded from the median, but it still counts
            // against the cap so a single slow point cannot cost 2x
            let t0 = Instant::now();
            let mut verdict = run_once(cfg, method, &x0, x1.as_ref())?;
            let warm_s = t0.elapsed().as_secs_f64();

            let (time_s, reps_used) = if warm_s > cfg.cap_s {
                (warm_s, 1)
            } else {
                let mut samples = Vec::with_capacity(cfg.reps);
                for _ in 0..cfg.reps {
                    let t = Instant::now();
                    verdict = run_once(cfg, method, &x0, x1.as_ref())?;
                    let dt = t.elapsed().as_secs_f64();
                    samples.push(dt);
                    if dt > cfg.cap_s {
                        break;
                    }
                }
                let reps_used = samples.len();
                (median(&mut samples), reps_used)
            };

            if time_s > cfg.cap_s || warm_s > cfg.cap_s {
                capped[mi] = Some(format!(
                    "over budget at r={r}: {time_s:.1}s exceeds cap {}s",
                    cfg.cap_s
                ));
            }
            records.push(BenchRecord::new(cfg, tag, r, reps_used, time_s));
            match method {
                Method::Dense => point.unfold = Some(verdict),
                Method::Fourier => point.fourier = Some(verdict),
            }
        }

        if let (Some(a), Some(b)) = (point.unfold, point.fourier) {
            if a != b {
                return Err(TpdsError::MethodDisagreement(format!(
                    "{} at r={}: unfold says {}, fourier says {}",
                    cfg.kind.as_str(),
                    r,
                    a,
                    b
                )));
            }
        }
        verdicts.push(point);
    }

    Ok(BenchOutcome {
        records,
        skipped,
        verdicts,
    })
}

/// Least-squares slope of log(time) against log(r) over the largest four
/// grid points of one method (or all of them, if fewer). Requires at
/// least three measurements.
pub fn fit_slope(records: &[BenchRecord], method: &str) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|rec| rec.method == method)
        .map(|rec| {
            (
                (rec.r as f64).ln(),
                rec.time_s.max(f64::MIN_POSITIVE).ln(),
            )
        })
        .collect();
    if pts.len() < 3 {
        return Err(TpdsError::InsufficientData(format!(
            "slope fit needs at least 3 points for method {method}, got {}",
            pts.len()
        )));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tail = &pts[pts.len().saturating_sub(4)..];
    let k = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx <= 0.0 {
        return Err(TpdsError::InsufficientData(
            "slope fit needs distinct grid points".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Pairs (previous r, next r) where a method's median time DECREASED by
/// more than the slack factor; empty on cleanly scaling measurements.
pub fn monotone_violations(records: &[BenchRecord], slack: f64) -> Vec<(&'static str, usize, usize)> {
    let mut out = Vec::new();
    for tag in ["unfold", "fourier"] {
        let mut pts: Vec<(usize, f64)> = records
            .iter()
            .filter(|rec| rec.method == tag)
            .map(|rec| (rec.r, rec.time_s))
            .collect();
        pts.sort_by_key(|p| p.0);
        for w in pts.windows(2) {
            if w[1].1 < w[0].1 / slack {
                out.push((tag, w[0].0, w[1].0));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

/// Quote one CSV field per RFC 4180 (only when it needs it).
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "test,method,r,n,h,l,reps,threads,time_s,time_per_r,time_per_r3";

/// Render measurements as CSV, one row per (method, r).
pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for rec in records {
        let row = [
            csv_field(rec.kind.as_str()),
            csv_field(rec.method),
            rec.r.to_string(),
            rec.n.to_string(),
            rec.h.to_string(),
            rec.l.to_string(),
            rec.reps.to_string(),
            rec.threads.to_string(),
            format!("{:e}", rec.time_s),
            format!("{:e}", rec.time_per_r),
            format!("{:e}", rec.time_per_r3),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Free-text sidecar describing how the CSV was produced: seed,
/// tolerances, host, skip markers, and methodology notes.
pub fn sidecar_text(cfg: &BenchConfig, outcome: &BenchOutcome, host: &str) -> String {
    let mut out = String::new();
    out.push_str("benchmark sidecar metadata\n");
    out.push_str(&format!("test={}\n", cfg.kind.as_str()));
    out.push_str(&format!("seed={}\n", cfg.seed));
    out.push_str(&format!(
        "n={} h={} l={} reps={} threads={} cap_s={}\n",
        cfg.n, cfg.h, cfg.l, cfg.reps, cfg.threads, cfg.cap_s
    ));
    out.push_str(&format!(
        "grid=r=2^p for p in {:?}\n",
        cfg.p_range
    ));
    out.push_str("tol_rank_rel=default (max(n*r, l*h*r) * machine epsilon)\n");
    out.push_str("tol_stab=1e-9\n");
    out.push_str(&format!("host={host}\n"));
    out.push_str("timing=median of reps, one warm-up discarded; generation and I/O excluded\n");
    if matches!(
        cfg.kind,
        TestKind::Controllability | TestKind::Stabilizability
    ) {
        out.push_str(
            "note=pencil rank checks use seeded randomized candidate roots with \
             per-candidate verification in place of symbolic rank computation\n",
        );
    }
    for s in &outcome.skipped {
        out.push_str(&format!(
            "skipped method={} r={} reason={}\n",
            s.method, s.r, s.reason
        ));
    }
    for v in &outcome.verdicts {
        let fmt = |o: Option<bool>| match o {
            Some(true) => "informative",
            Some(false) => "not_informative",
            None => "skipped",
        };
        out.push_str(&format!(
            "verdict r={} unfold={} fourier={}\n",
            v.r,
            fmt(v.unfold),
            fmt(v.fourier)
        ));
    }
    out
}

/// Host description for sidecar files.
pub fn host_description() -> String {
    let host = std::env::var("HOSTNAME").unwrap_or_else(|_| "unknown-host".into());
    format!(
        "{} ({} {})",
        host,
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(method: &'static str, times: &[(usize, f64)]) -> Vec<BenchRecord> {
        times
            .iter()
            .map(|&(r, t)| BenchRecord {
                kind: TestKind::Sysid,
                method,
                r,
                n: 2,
                h: 2,
                l: 10,
                reps: 5,
                threads: 1,
                time_s: t,
                time_per_r: t / r as f64,
                time_per_r3: t / (r as f64).powi(3),
            })
            .collect()
    }

    #[test]
    fn slope_recovers_exact_power_laws() {
        let cubic: Vec<(usize, f64)> = (2..=6)
            .map(|p| {
                let r = 1usize << p;
                (r, 3e-9 * (r as f64).powi(3))
            })
            .collect();
        let recs = synthetic("unfold", &cubic);
        assert!((fit_slope(&recs, "unfold").unwrap() - 3.0).abs() < 1e-9);

        let linear: Vec<(usize, f64)> = (2..=6)
            .map(|p| {
                let r = 1usize << p;
                (r, 4e-6 * r as f64)
            })
            .collect();
        let recs = synthetic("fourier", &linear);
        assert!((fit_slope(&recs, "fourier").unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn slope_needs_three_points() {
        let recs = synthetic("unfold", &[(4, 1.0), (8, 2.0)]);
        assert!(matches!(
            fit_slope(&recs, "unfold"),
            Err(TpdsError::InsufficientData(_))
        ));
        // other method's records do not count
        assert!(fit_slope(&recs, "fourier").is_err());
    }

    #[test]
    fn slope_uses_only_largest_four() {
        // quadratic tail after a flat head: the head must not dilute the fit
        let mut pts: Vec<(usize, f64)> = vec![(2, 5.0), (4, 5.0)];
        for p in 3..=6 {
            let r = 1usize << p;
            pts.push((r, 1e-6 * (r as f64).powi(2)));
        }
        let recs = synthetic("unfold", &pts);
        assert!((fit_slope(&recs, "unfold").unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn experiment_record_count_and_determinism() {
        let mut cfg = BenchConfig::default_for(TestKind::Sysid);
        cfg.p_range = vec![2, 3, 4];
        cfg.reps = 1;
        cfg.l = 3;
        let a = run_experiment(&cfg).unwrap();
        assert_eq!(a.records.len(), 6, "2 methods x 3 points");
        assert!(a.skipped.is_empty());

        cfg.reps = 2;
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(b.records.len(), 6, "reps do not change the record count");

        // same seed, same data: verdicts are reproducible
        for (va, vb) in a.verdicts.iter().zip(b.verdicts.iter()) {
            assert_eq!(va.unfold, vb.unfold);
            assert_eq!(va.fourier, vb.fourier);
        }
        for v in &a.verdicts {
            assert_eq!(v.unfold, v.fourier, "methods must agree at r={}", v.r);
        }
    }

    #[test]
    fn stability_and_controllability_grids_run() {
        for kind in [TestKind::Stability, TestKind::Controllability] {
            let mut cfg = BenchConfig::default_for(kind);
            cfg.p_range = vec![2, 3];
            cfg.reps = 1;
            cfg.l = 3;
            let out = run_experiment(&cfg).unwrap();
            assert_eq!(out.records.len(), 4);
            for v in &out.verdicts {
                assert_eq!(v.unfold, v.fourier);
            }
        }
    }

    #[test]
    fn zero_cap_records_first_point_then_skips() {
        let mut cfg = BenchConfig::default_for(TestKind::Sysid);
        cfg.p_range = vec![2, 3, 4];
        cfg.reps = 3;
        cfg.l = 3;
        cfg.cap_s = 0.0;
        let out = run_experiment(&cfg).unwrap();
        // the offending point is still recorded for both methods
        assert_eq!(out.records.len(), 2);
        assert!(out.records.iter().all(|rec| rec.r == 4 && rec.reps == 1));
        // both methods skip the two larger points
        assert_eq!(out.skipped.len(), 4);
        assert!(out.skipped.iter().all(|s| s.r > 4));
        assert!(out.skipped.iter().all(|s| s.reason.contains("over budget")));
    }

    #[test]
    fn grid_validation_rejects_bad_configs() {
        let mut cfg = BenchConfig::default_for(TestKind::Sysid);
        cfg.p_range = vec![];
        assert!(run_experiment(&cfg).is_err());
        cfg.p_range = vec![3, 2];
        assert!(run_experiment(&cfg).is_err());
        cfg.p_range = vec![2];
        cfg.reps = 0;
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn csv_layout_and_quoting() {
        let recs = synthetic("unfold", &[(4, 0.25)]);
        let csv = records_to_csv(&recs);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "test,method,r,n,h,l,reps,threads,time_s,time_per_r,time_per_r3"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("sysid,unfold,4,2,2,10,5,1,"));
        assert_eq!(row.split(',').count(), 11);
        assert!(lines.next().is_none());

        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn monotone_check_flags_only_real_decreases() {
        let recs = synthetic("unfold", &[(4, 1.0), (8, 0.8), (16, 0.2)]);
        // 0.8 is within the 1.5x slack of 1.0; 0.2 is not within slack of 0.8
        let v = monotone_violations(&recs, 1.5);
        assert_eq!(v, vec![("unfold", 8, 16)]);
    }

    #[test]
    fn sidecar_mentions_skips_and_candidate_note() {
        let mut cfg = BenchConfig::default_for(TestKind::Controllability);
        cfg.p_range = vec![2, 3];
        cfg.reps = 1;
        cfg.l = 3;
        cfg.cap_s = 0.0;
        let out = run_experiment(&cfg).unwrap();
        let side = sidecar_text(&cfg, &out, "testhost (linux x86_64)");
        assert!(side.contains("seed="));
        assert!(side.contains("tol_rank_rel="));
        assert!(side.contains("host=testhost"));
        assert!(side.contains("skipped method="));
        assert!(side.contains("candidate roots"));
    }
}
