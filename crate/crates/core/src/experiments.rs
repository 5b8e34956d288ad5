//! Seeded Monte-Carlo runs over the random-instance model.
//!
//! Every trial draws its instance from a seed derived from
//! `(master_seed, n, trial)` alone, and records are returned sorted by
//! `(n, trial)`, so output does not depend on scheduling or worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds;
use crate::error::{Error, Result};
use crate::gen::{sample_instance, GeneratorSpec};
use crate::intgraph::omega_sweep;
use crate::solver::{solve_max_variance, MAX_ENUMERATION_WIDTH};

/// Sizes from which solve timings use the median of three runs.
pub const REPEAT_TIMING_FROM: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    OmegaOnly,
    SolveAndTime,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega_only" | "omega" => Ok(Mode::OmegaOnly),
            "solve_and_time" | "solve" => Ok(Mode::SolveAndTime),
            other => Err(Error::Parse(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub spec: GeneratorSpec,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub mode: Mode,
    /// Instances with a larger clique number are counted but not solved.
    pub omega_cap: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::domain(
                "n values must be a nonempty list of positive sizes",
            ));
        }
        if self.omega_cap > MAX_ENUMERATION_WIDTH {
            return Err(Error::domain(format!(
                "omega cap {} exceeds {MAX_ENUMERATION_WIDTH}",
                self.omega_cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub omega: usize,
    pub solve_ns: Option<u64>,
    pub vertices_examined: Option<u64>,
    pub max_variance: Option<f64>,
}

impl ExperimentRecord {
    pub fn log2_two_pow_omega(&self) -> f64 {
        self.omega as f64
    }

    /// `2^omega`; exact for `omega <= 52`, infinite past the `f64` range.
    pub fn two_pow_omega(&self) -> f64 {
        (self.omega as f64).exp2()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Instance seed of trial `trial` at size `n`.
pub fn trial_seed(master_seed: u64, n: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ n as u64) ^ trial as u64)
}

fn run_trial(config: &ExperimentConfig, n: usize, trial: usize) -> Result<ExperimentRecord> {
    let seed = trial_seed(config.master_seed, n, trial);
    let instance = sample_instance(&config.spec.with_seed(seed), n)?;
    let omega = omega_sweep(&instance);
    let mut record = ExperimentRecord {
        n,
        trial,
        seed,
        omega,
        solve_ns: None,
        vertices_examined: None,
        max_variance: None,
    };
    if config.mode == Mode::SolveAndTime && omega <= config.omega_cap {
        let repeats = if n >= REPEAT_TIMING_FROM { 3 } else { 1 };
        let mut times = Vec::with_capacity(repeats);
        let mut last = None;
        for _ in 0..repeats {
            let t0 = Instant::now();
            let r = solve_max_variance(&instance)?;
            times.push(t0.elapsed().as_nanos() as u64);
            last = Some(r);
        }
        times.sort_unstable();
        let r = last.expect("at least one repeat");
        record.solve_ns = Some(times[times.len() / 2]);
        record.vertices_examined = Some(r.vertices_examined);
        record.max_variance = Some(r.max_variance);
    }
    Ok(record)
}

/// Runs every `(n, trial)` pair on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    let mut records = jobs
        .into_par_iter()
        .map(|(n, t)| run_trial(config, n, t))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.n, r.trial));
    Ok(records)
}

pub const CSV_HEADER: &str =
    "n,trial,seed,omega,log2_two_pow_omega,solve_ns,vertices_examined,max_variance";

pub fn write_csv<W: Write>(records: &[ExperimentRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        write!(
            out,
            "{},{},{},{},{},",
            r.n,
            r.trial,
            r.seed,
            r.omega,
            r.log2_two_pow_omega()
        )?;
        if let Some(t) = r.solve_ns {
            write!(out, "{t}")?;
        }
        out.write_all(b",")?;
        if let Some(v) = r.vertices_examined {
            write!(out, "{v}")?;
        }
        out.write_all(b",")?;
        if let Some(v) = r.max_variance {
            write!(out, "{v:?}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Per-size aggregates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub trials: usize,
    pub mean_omega: f64,
    /// `log2` of the sample mean of `2^omega`, accumulated by log-sum-exp.
    pub log2_mean_two_pow_omega: f64,
    pub omega_min: usize,
    pub omega_median: f64,
    pub omega_p90: usize,
    pub omega_max: usize,
    /// Omega value -> number of trials.
    pub omega_histogram: BTreeMap<usize, usize>,
    pub solved: usize,
    pub mean_solve_ns: Option<f64>,
}

impl Summary {
    pub fn mean_two_pow_omega(&self) -> f64 {
        self.log2_mean_two_pow_omega.exp2()
    }

    /// Fraction of trials with `omega >= threshold`.
    pub fn tail_freq(&self, threshold: usize) -> f64 {
        let hits: usize = self
            .omega_histogram
            .range(threshold..)
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.trials as f64
    }
}

/// `log2(mean(2^w))` without forming `2^w`.
pub fn log2_mean_exp2(omegas: &[usize]) -> f64 {
    let top = *omegas.iter().max().expect("nonempty") as f64;
    let scaled: f64 = omegas.iter().map(|&w| (w as f64 - top).exp2()).sum();
    top + (scaled / omegas.len() as f64).log2()
}

pub fn aggregate(records: &[ExperimentRecord], n: usize) -> Result<Summary> {
    let sel: Vec<&ExperimentRecord> = records.iter().filter(|r| r.n == n).collect();
    if sel.is_empty() {
        return Err(Error::InsufficientData(format!("no records for n = {n}")));
    }
    let mut omegas: Vec<usize> = sel.iter().map(|r| r.omega).collect();
    omegas.sort_unstable();
    let k = omegas.len();
    let mean_omega = omegas.iter().sum::<usize>() as f64 / k as f64;
    let median = if k % 2 == 1 {
        omegas[k / 2] as f64
    } else {
        0.5 * (omegas[k / 2 - 1] + omegas[k / 2]) as f64
    };
    let p90 = omegas[((k as f64 * 0.9).ceil() as usize).clamp(1, k) - 1];
    let mut histogram = BTreeMap::new();
    for &w in &omegas {
        *histogram.entry(w).or_insert(0) += 1;
    }
    let times: Vec<f64> = sel
        .iter()
        .filter_map(|r| r.solve_ns.map(|t| t as f64))
        .collect();
    Ok(Summary {
        n,
        trials: k,
        mean_omega,
        log2_mean_two_pow_omega: log2_mean_exp2(&omegas),
        omega_min: omegas[0],
        omega_median: median,
        omega_p90: p90,
        omega_max: omegas[k - 1],
        omega_histogram: histogram,
        solved: times.len(),
        mean_solve_ns: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
    })
}

/// Least-squares slope of `ln(time)` against `ln(n)` over `(n, mean_time)`.
pub fn scaling_fit(points: &[(usize, f64)]) -> Result<f64> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs 3 distinct sizes, got {}",
            distinct.len()
        )));
    }
    if points.iter().any(|p| !(p.1 > 0.0) || p.0 == 0) {
        return Err(Error::InsufficientData(
            "times and sizes must be positive".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// [`scaling_fit`] over the summaries that carry timings.
pub fn scaling_fit_summaries(summaries: &[Summary]) -> Result<f64> {
    let pts: Vec<(usize, f64)> = summaries
        .iter()
        .filter_map(|s| s.mean_solve_ns.map(|t| (s.n, t)))
        .collect();
    scaling_fit(&pts)
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoryOverlay {
    pub expected_omega_bound: Option<f64>,
    pub expected_two_omega_bound: Option<f64>,
    pub tail_omega_bound: Option<f64>,
}

impl TheoryOverlay {
    pub fn at(n: usize) -> Self {
        let n = n as u64;
        TheoryOverlay {
            expected_omega_bound: bounds::expected_omega_bound(n).ok(),
            expected_two_omega_bound: bounds::expected_two_omega_bound(n).ok(),
            tail_omega_bound: bounds::tail_omega_bound(n).ok(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeReport {
    #[serde(flatten)]
    pub summary: Summary,
    pub mean_two_pow_omega: f64,
    pub theory: TheoryOverlay,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub spec: String,
    pub master_seed: u64,
    pub trials: usize,
    pub mode: Mode,
    pub omega_cap: usize,
    pub sizes: Vec<SizeReport>,
    pub scaling_exponent: Option<f64>,
}

pub fn report(config: &ExperimentConfig, records: &[ExperimentRecord]) -> Result<ExperimentReport> {
    let summaries = config
        .n_values
        .iter()
        .map(|&n| aggregate(records, n))
        .collect::<Result<Vec<_>>>()?;
    let scaling_exponent = scaling_fit_summaries(&summaries).ok();
    Ok(ExperimentReport {
        spec: config.spec.to_string(),
        master_seed: config.master_seed,
        trials: config.trials,
        mode: config.mode,
        omega_cap: config.omega_cap,
        sizes: summaries
            .into_iter()
            .map(|s| SizeReport {
                mean_two_pow_omega: s.mean_two_pow_omega(),
                theory: TheoryOverlay::at(s.n),
                summary: s,
            })
            .collect(),
        scaling_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize, trial: usize, omega: usize) -> ExperimentRecord {
        ExperimentRecord {
            n,
            trial,
            seed: 0,
            omega,
            solve_ns: None,
            vertices_examined: None,
            max_variance: None,
        }
    }

    fn config(spec: &str, n: Vec<usize>, trials: usize, mode: Mode) -> ExperimentConfig {
        ExperimentConfig {
            spec: spec.parse().unwrap(),
            n_values: n,
            trials,
            master_seed: 17,
            mode,
            omega_cap: 30,
        }
    }

    #[test]
    fn aggregate_examples() {
        let same: Vec<_> = (0..5).map(|t| rec(10, t, 4)).collect();
        let s = aggregate(&same, 10).unwrap();
        assert_eq!(s.mean_omega, 4.0);
        assert_eq!(s.mean_two_pow_omega(), 16.0);
        assert_eq!(s.tail_freq(1), 1.0);
        assert_eq!(s.tail_freq(5), 0.0);

        let two = [rec(3, 0, 1), rec(3, 1, 3)];
        let s = aggregate(&two, 3).unwrap();
        assert_eq!(s.mean_omega, 2.0);
        assert!((s.mean_two_pow_omega() - 5.0).abs() < 1e-12);
        assert_eq!(s.tail_freq(2), 0.5);
        assert!(aggregate(&two, 4).is_err());
    }

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let omegas: Vec<usize> = (0..200).map(|k| 1 + (k * 7919) % 30).collect();
        let direct = omegas.iter().map(|&w| (1u64 << w) as f64).sum::<f64>() / omegas.len() as f64;
        assert!((log2_mean_exp2(&omegas).exp2() - direct).abs() <= 1e-12 * direct);
        // survives values far beyond f64 range
        assert!((log2_mean_exp2(&[2000, 2000]) - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_examples() {
        let n = [1_000usize, 10_000, 100_000, 1_000_000];
        let lin: Vec<_> = n.iter().map(|&n| (n, n as f64)).collect();
        assert!((scaling_fit(&lin).unwrap() - 1.0).abs() < 1e-9);
        let quad: Vec<_> = n.iter().map(|&n| (n, (n as f64).powi(2))).collect();
        assert!((scaling_fit(&quad).unwrap() - 2.0).abs() < 1e-9);
        let nlogn: Vec<_> = [10_000usize, 100_000, 1_000_000]
            .iter()
            .map(|&n| (n, 3.0 * n as f64 * (n as f64).ln()))
            .collect();
        let e = scaling_fit(&nlogn).unwrap();
        assert!(e > 1.0 && e < 1.2, "{e}");
        assert!(scaling_fit(&lin[..2]).is_err());
    }

    #[test]
    fn degenerate_radii_give_unit_omega() {
        let cfg = config(
            "center=uniform:0,1 radius=const:0",
            vec![50],
            1,
            Mode::OmegaOnly,
        );
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        let inst = sample_instance(&cfg.spec.with_seed(recs[0].seed), 50).unwrap();
        let mut c = inst.center().to_vec();
        c.sort_by(f64::total_cmp);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(recs[0].omega, 1);
    }

    #[test]
    fn rerun_is_identical_modulo_timing() {
        let cfg = config(
            "center=uniform:0,1 radius=exp:1",
            vec![20, 200],
            6,
            Mode::SolveAndTime,
        );
        let strip = |mut v: Vec<ExperimentRecord>| {
            v.iter_mut().for_each(|r| r.solve_ns = None);
            v
        };
        let a = strip(run_experiment(&cfg).unwrap());
        let b = strip(run_experiment(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.max_variance.is_some()));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = strip(pool.install(|| run_experiment(&cfg)).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn omega_only_mode_leaves_solve_fields_empty() {
        let cfg = config(
            "center=uniform:0,1 radius=dep:0.2",
            vec![10_000],
            2,
            Mode::OmegaOnly,
        );
        let recs = run_experiment(&cfg).unwrap();
        assert!(recs.iter().all(|r| r.solve_ns.is_none()
            && r.vertices_examined.is_none()
            && r.max_variance.is_none()
            && r.omega >= 1));
    }

    #[test]
    fn omega_cap_skips_hard_instances() {
        let mut cfg = config(
            "center=power:0.5 radius=const:1",
            vec![2_000],
            3,
            Mode::SolveAndTime,
        );
        cfg.omega_cap = 5;
        let recs = run_experiment(&cfg).unwrap();
        assert!(recs.iter().all(|r| r.omega > 5 && r.solve_ns.is_none()));
        cfg.omega_cap = 63;
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut r = rec(5, 0, 2);
        r.solve_ns = Some(10);
        r.vertices_examined = Some(9);
        r.max_variance = Some(0.25);
        let mut out = Vec::new();
        write_csv(&[r, rec(5, 1, 1)], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "5,0,0,2,2,10,9,0.25");
        assert_eq!(lines[2], "5,1,0,1,1,,,");
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for n in [10, 100, 1000] {
            for t in 0..100 {
                assert!(seen.insert(trial_seed(1, n, t)));
            }
        }
    }
}
