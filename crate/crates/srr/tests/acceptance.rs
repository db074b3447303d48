//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use srr_core::analysis::{self, BreachReport};
use srr_core::pca::{self, CovarianceDivisor};
use srr_core::pipeline;
use srr_core::regularization::{self, band_edges, within_band, ClampState};
use srr_core::solver::{self, PhiSystem};
use srr_core::{
    run_srr_series, simulate_gbm, DMatrix, DVector, NaiveDate, PcaResult, PipelineConfig,
    ReturnMatrix, SrrEngine, SvdFactors,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn closed_form_two_asset() -> Check {
    let start = Instant::now();
    let mut rng = Mix(101);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let (mu1, mu2) = (rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01));
        let s1 = rng.uniform(-0.5, 0.5);
        let mut s2 = rng.uniform(-0.5, 0.5);
        while (s2 - s1).abs() < 0.05 {
            s2 = rng.uniform(-0.5, 0.5);
        }
        let nu = (mu1 * s2 - mu2 * s1) / (s2 - s1);
        let sp = (mu1 - mu2) / (s2 - s1);
        let sys = solver::build_phi(
            &DMatrix::from_column_slice(2, 1, &[s1, s2]),
            &DVector::from_column_slice(&[mu1, mu2]),
        )
        .map_err(|e| e.to_string())?;
        let lu = solver::solve_lu(&sys).map_err(|e| e.to_string())?;
        let svd = solver::solve_svd(&sys, None).map_err(|e| e.to_string())?;
        let det = solver::solve_determinant(&sys).map_err(|e| e.to_string())?;
        let two = solver::srr_two_asset(mu1, mu2, s1, s2).map_err(|e| e.to_string())?;
        for (route, got_nu, got_sp) in [
            ("two-asset", two.nu, Some(two.sigma_pi)),
            ("lu", lu.nu, Some(lu.sigma_pi_vec[0])),
            ("svd", svd.nu, Some(svd.sigma_pi_vec[0])),
            ("determinant", det, None),
        ] {
            let e_nu = (got_nu - nu).abs() / nu.abs();
            worst = worst.max(e_nu);
            ensure(e_nu <= 1e-10, || {
                format!("case {case} {route}: nu {got_nu} vs {nu}")
            })?;
            if let Some(g) = got_sp {
                let e = (g - sp).abs() / sp.abs();
                worst = worst.max(e);
                ensure(e <= 1e-10, || {
                    format!("case {case} {route}: sigma_pi {g} vs {sp}")
                })?;
            }
        }
    }
    let took = within_time(start, Duration::from_secs(1))?;
    Ok(format!(
        "200 cases, worst relative error {worst:.1e}, {took:.2?}"
    ))
}

fn random_system(rng: &mut Mix, n: usize) -> PhiSystem {
    let sigma = rng.matrix(n, n - 1, 0.02);
    let mu = DVector::from_fn(n, |_, _| 0.001 * rng.normal());
    solver::build_phi(&sigma, &mu).expect("consistent dimensions")
}

fn market_price_identity() -> Check {
    let mut rng = Mix(202);
    let mut checked = 0;
    let mut worst_ratio: f64 = 0.0;
    for case in 0..100 {
        let n = 2 + case % 7;
        let sys = random_system(&mut rng, n);
        let sigma = -sys.phi().columns(1, n - 1).into_owned();
        for (route, sol) in [
            ("lu", solver::solve_lu(&sys)),
            ("svd", solver::solve_svd(&sys, None)),
        ] {
            let sol = sol.map_err(|e| format!("case {case} {route}: {e}"))?;
            if sol.kappa > 1e6 {
                continue;
            }
            checked += 1;
            // μ_j + μ_π + Σ_k σ_jk σ_πk with μ_π = −ν
            let worst = (0..n)
                .map(|j| {
                    (sys.mu()[j] - sol.nu + sigma.row(j).dot(&sol.sigma_pi_vec.transpose())).abs()
                })
                .fold(0.0, f64::max);
            let bound = 1e-10 * sol.kappa * sys.mu().norm();
            worst_ratio = worst_ratio.max(worst / bound);
            ensure(worst <= bound, || {
                format!("case {case} {route}: residual {worst:.3e} > {bound:.3e}")
            })?;
        }
    }
    ensure(checked >= 100, || {
        format!("only {checked} solves had kappa <= 1e6")
    })?;
    Ok(format!(
        "{checked} solves over N = 2..8, worst residual at {worst_ratio:.1e} of the bound"
    ))
}

fn pca_invariants() -> Check {
    let start = Instant::now();
    let mut rng = Mix(303);
    let mut worst = [0.0f64; 3];
    for case in 0..50 {
        let n = 1 + (case * 29) / 49;
        let m = (n + 2).max(10 + case * 490 / 49);
        let x = rng.matrix(m, n, 0.01 + case as f64 * 0.02);
        let p =
            pca::pca_of_panel(&x, CovarianceDivisor::SampleMinusOne).map_err(|e| e.to_string())?;
        let w = &p.eigenvectors;
        let ortho = max_abs(&(w.transpose() * w - DMatrix::<f64>::identity(n, n)));
        ensure(ortho <= 1e-10, || {
            format!("panel {case}: orthonormality {ortho:.2e}")
        })?;
        for k in 1..n {
            ensure(p.eigenvalues[k - 1] >= p.eigenvalues[k], || {
                format!("panel {case}: ordering at {k}")
            })?;
        }
        let lead = p.eigenvalues[0];
        let gram = p.components.transpose() * &p.components;
        let mut cross: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cross = cross.max(gram[(i, j)].abs());
                }
            }
        }
        ensure(cross <= 1e-8 * m as f64 * lead, || {
            format!("panel {case}: PC cross-covariance {cross:.2e}")
        })?;
        let (_, cov) = moments(&x);
        let recon = max_abs(&(w * DMatrix::from_diagonal(&p.eigenvalues) * w.transpose() - cov));
        ensure(recon <= 1e-10, || {
            format!("panel {case}: reconstruction {recon:.2e}")
        })?;
        worst = [
            worst[0].max(ortho),
            worst[1].max(cross / (m as f64 * lead)),
            worst[2].max(recon),
        ];
    }
    let took = within_time(start, Duration::from_secs(10))?;
    Ok(format!(
        "50 panels up to 500x30, orthonormality {:.1e}, cross/(M lambda1) {:.1e}, reconstruction {:.1e}, {took:.2?}",
        worst[0], worst[1], worst[2]
    ))
}

#[derive(serde::Deserialize)]
struct Band {
    replicates: u64,
    steps: usize,
    window: usize,
    nu_true: f64,
    lower: f64,
    upper: f64,
}

fn synthetic_recovery() -> Check {
    let start = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bootstrap_band.json");
    let band: Band = serde_json::from_slice(&std::fs::read(&path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(band.replicates == 200, || {
        "fixture must hold a 200-replicate band".into()
    })?;

    let spec = recovery_spec(5000, 20_240_601);
    ensure(band.steps == spec.steps && band.window == 2500, || {
        "fixture does not match the run".into()
    })?;
    let truth = solver::solve_lu(
        &solver::build_phi(&spec.sigma, &spec.log_drift()).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    ensure((truth.nu - band.nu_true).abs() <= 1e-15, || {
        format!(
            "true nu {} disagrees with the fixture {}",
            truth.nu, band.nu_true
        )
    })?;

    let sim = simulate_gbm(&spec).map_err(|e| e.to_string())?;
    let cfg = PipelineConfig {
        window: 2500,
        ..PipelineConfig::default()
    };
    let rows = srr::run_srr_series_parallel(&sim.returns, &cfg).map_err(|e| e.to_string())?;
    ensure(rows.len() == 2500, || format!("{} rows", rows.len()))?;

    let mut worst_dev: f64 = 0.0;
    let mut worst_allow: f64 = f64::INFINITY;
    for (t, row) in rows.iter().enumerate() {
        let nu = row
            .nu_raw
            .ok_or_else(|| format!("row {t}: raw solve unavailable"))?;
        let w = srr_core::market::window(&sim.returns, cfg.window - 1 + t, cfg.window)
            .map_err(|e| e.to_string())?;
        let mu_norm = DVector::from_fn(5, |j, _| w.values().column(j).mean()).norm();
        let allowance = 1e-10 * row.kappa_raw * mu_norm;
        let dev = nu - truth.nu;
        worst_dev = worst_dev.max(dev.abs());
        worst_allow = worst_allow.min(allowance);
        ensure(
            dev >= band.lower - allowance && dev <= band.upper + allowance,
            || {
                format!("row {t}: nu_raw - nu_true = {dev:.3e} outside [{:.3e}, {:.3e}] + {allowance:.1e}", band.lower, band.upper)
            },
        )?;
    }
    let took = within_time(start, Duration::from_secs(120))?;
    Ok(format!(
        "2500 dates, band [{:.1e}, {:.1e}], max |nu_raw - nu_true| {worst_dev:.1e}, smallest allowance {worst_allow:.1e}, {took:.2?}",
        band.lower, band.upper
    ))
}

fn seeded(prev: f64, eps: f64) -> ClampState {
    let mut s = ClampState::new(eps).expect("valid band");
    s.clamp(prev);
    s
}

/// `|out − prev| ≤ ε|prev|` on the exact binary values, by integer arithmetic
/// on mantissas scaled to a common exponent.
fn exact_ratio_bound(out: f64, prev: f64, eps: f64) -> bool {
    fn parts(x: f64) -> (i128, i32) {
        let bits = x.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1 << 52) - 1)) as i128;
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), exp - 1075)
        };
        (if x < 0.0 { -m } else { m }, e)
    }
    let ((mo, eo), (mp, ep), (me, ee)) = (parts(out), parts(prev), parts(eps));
    // |mo·2^eo − mp·2^ep| against me·|mp|·2^(ee+ep); align on the smallest exponent
    let base = eo.min(ep).min(ee + ep);
    let shift =
        |m: i128, e: i32| -> Option<i128> { m.checked_mul(1i128.checked_shl((e - base) as u32)?) };
    let lhs = match (shift(mo, eo), shift(mp, ep)) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => return within_band(out, prev, eps),
    };
    match shift(me * mp.abs(), ee + ep) {
        Some(rhs) => lhs <= rhs,
        None => within_band(out, prev, eps),
    }
}

fn clamp_properties() -> Check {
    let mut rng = Mix(505);
    let mut ratio_excess: f64 = 0.0;
    let mut state = seeded(1.0, 0.005);
    for step in 0..100_000 {
        let eps = state.epsilon();
        let prev = state.previous().expect("seeded");
        let raw = match step % 4 {
            0 => prev * rng.uniform(0.9, 1.1),
            1 => prev * rng.uniform(0.999, 1.001),
            2 => rng.uniform(-2.0, 2.0),
            _ => prev * (1.0 + eps * rng.uniform(-1.0, 1.0)),
        };
        let (out, next) = regularization::clamp(state, raw);
        let (lo, hi) = band_edges(prev, eps);
        ensure(out >= prev.min(raw) && out <= prev.max(raw), || {
            format!("step {step}: betweenness")
        })?;
        ensure(out >= lo && out <= hi, || {
            format!("step {step}: {out} outside [{lo}, {hi}]")
        })?;
        // |out/prev − 1| ≤ ε, decided exactly rather than through a rounded quotient
        ensure(within_band(out, prev, eps), || {
            format!("step {step}: |out/prev - 1| exceeds {eps:e}")
        })?;
        ensure(exact_ratio_bound(out, prev, eps), || {
            format!("step {step}: rational check disagrees")
        })?;
        ratio_excess = ratio_excess.max((out / prev - 1.0).abs() - eps);
        if raw >= lo && raw <= hi {
            ensure(out == raw, || format!("step {step}: in-band value altered"))?;
        }
        ensure(prev <= 0.0 || out > 0.0, || {
            format!("step {step}: positivity lost")
        })?;
        ensure(prev >= 0.0 || out < 0.0, || {
            format!("step {step}: sign lost")
        })?;
        // re-seed occasionally with a fresh band and start value
        state = if step % 1000 == 999 {
            seeded(rng.uniform(-5.0, 5.0), rng.uniform(1e-4, 0.2))
        } else {
            next
        };
    }

    let sim = simulate_gbm(&recovery_spec(361, 77)).map_err(|e| e.to_string())?;
    let cfg = PipelineConfig {
        window: 60,
        ..PipelineConfig::default()
    };
    let whole = run_srr_series(&sim.returns, &cfg).map_err(|e| e.to_string())?;
    let (first, last) = (pipeline::first_index(&cfg), sim.returns.rows() - 1);
    for split in [first, first + 1, first + 137, last - 1] {
        let mut engine = SrrEngine::new(cfg, 5).map_err(|e| e.to_string())?;
        let mut rows = engine
            .run_range(&sim.returns, first, split)
            .map_err(|e| e.to_string())?;
        rows.extend(
            engine
                .run_range(&sim.returns, split + 1, last)
                .map_err(|e| e.to_string())?,
        );
        ensure(format!("{rows:?}") == format!("{whole:?}"), || {
            format!("warm start split at {split} differs")
        })?;
    }
    Ok(format!(
        "1e5 steps exact; rounded quotient |out/prev - 1| exceeds eps by at most {ratio_excess:.1e}; warm start bit-exact at 4 split points"
    ))
}

fn sign_flip() -> Check {
    let mut rng = Mix(606);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 2 + case % 7;
        let sys = random_system(&mut rng, n);
        let sigma = -sys.phi().columns(1, n - 1).into_owned();
        let col = case % (n - 1);
        let mut flipped = sigma.clone();
        flipped.column_mut(col).neg_mut();
        let other = solver::build_phi(&flipped, sys.mu()).map_err(|e| e.to_string())?;
        let a = solver::solve_svd(&sys, None).map_err(|e| e.to_string())?;
        let b = solver::solve_svd(&other, None).map_err(|e| e.to_string())?;
        let fa = SvdFactors::of(sys.phi()).map_err(|e| e.to_string())?;
        let fb = SvdFactors::of(other.phi()).map_err(|e| e.to_string())?;
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
        let mut errs = vec![
            ("nu", rel(a.nu, b.nu)),
            ("sigma_pi", rel(a.sigma_pi_total, b.sigma_pi_total)),
            ("kappa", rel(a.kappa, b.kappa)),
        ];
        for k in 0..n {
            errs.push(("singular value", (fa.d[k] - fb.d[k]).abs() / fa.d[0]));
        }
        for (what, e) in errs {
            worst = worst.max(e);
            ensure(e <= 1e-12, || {
                format!("case {case}: {what} changed by {e:.2e}")
            })?;
        }
    }
    Ok(format!("100 systems, worst relative change {worst:.1e}"))
}

fn day(i: usize) -> NaiveDate {
    NaiveDate::from_num_days_from_ce_opt(734_000 + i as i32).expect("in range")
}

const IDIOSYNCRATIC_VOL: f64 = 1e-5;

/// A correlated-GBM panel with fresh daily shocks, plus a small idiosyncratic
/// term so the raw estimate is not exact, whose window covariance is
/// pushed toward rank N − 2: one loading column shrinks to 1% of its size over
/// `ramp` dates and then holds for `post` dates. Market prices of risk stay
/// fixed, so the drift follows the loadings.
fn spike_panel(pre: usize, ramp: usize, post: usize) -> ReturnMatrix {
    let n = 4;
    let rows = pre + ramp + post;
    let mut z = srr_core::synthetic::NormalStream::new(4242);
    // N − 1 factor shocks then N idiosyncratic ones per date
    let shocks = DMatrix::from_fn(2 * n - 1, rows, |_, _| z.next()).transpose();
    let sigma0 = DMatrix::from_row_slice(
        n,
        n - 1,
        &[
            0.012, 0.003, 0.002, //
            0.006, 0.011, -0.004, //
            0.009, -0.005, 0.007, //
            0.004, 0.006, 0.010,
        ],
    );
    let (nu0, lambda) = (2e-4, [0.05, -0.03, 0.02]);
    let values = DMatrix::from_fn(rows, n, |t, j| {
        let a = if t < pre {
            0.0
        } else {
            0.99 * (((t - pre + 1) as f64) / ramp as f64).min(1.0)
        };
        let scale = [1.0, 1.0, 1.0 - a];
        (0..n - 1)
            .map(|k| sigma0[(j, k)] * scale[k] * (lambda[k] + shocks[(t, k)]))
            .sum::<f64>()
            + nu0
            + IDIOSYNCRATIC_VOL * shocks[(t, n - 1 + j)]
    });
    ReturnMatrix::new(
        (0..rows).map(day).collect(),
        (0..n).map(|j| format!("A{j}")).collect(),
        values,
    )
    .expect("valid panel")
}

fn spike_regression() -> Check {
    let (window, pre, ramp) = (20, 220, 20);
    let r = spike_panel(pre, ramp, window);
    let cfg = PipelineConfig {
        window,
        ..PipelineConfig::default()
    };
    let rows = run_srr_series(&r, &cfg).map_err(|e| e.to_string())?;
    let first = pipeline::first_index(&cfg);
    // rows whose whole window precedes the ramp
    let pre_rows = &rows[..pre - first];
    let spike_rows = &rows[pre - first..];
    let pre_nu: Vec<f64> = pre_rows.iter().filter_map(|row| row.nu_eps).collect();
    let q = analysis::quantiles(&pre_nu).map_err(|e| e.to_string())?;
    let iqr = q.p75 - q.p25;
    ensure(iqr > 0.0, || "pre-spike interquartile range is zero".into())?;

    let kappa_pre = analysis::quantiles(&pre_rows.iter().map(|r| r.kappa_raw).collect::<Vec<_>>())
        .map_err(|e| e.to_string())?
        .p50;
    let kappa_peak = spike_rows.iter().map(|r| r.kappa_raw).fold(0.0, f64::max);
    ensure(kappa_peak >= 10.0 * kappa_pre, || {
        format!("raw kappa grew only {:.1}x", kappa_peak / kappa_pre)
    })?;

    for pair in rows.windows(2) {
        let (lo, hi) = band_edges(pair[0].d_min_eps, cfg.epsilon);
        ensure(pair[1].d_min_eps >= lo && pair[1].d_min_eps <= hi, || {
            format!("{}: d_min_eps left the band", pair[1].date)
        })?;
    }
    let mut worst: f64 = 0.0;
    let mut worst_raw: f64 = 0.0;
    for row in spike_rows {
        let nu = row
            .nu_eps
            .ok_or_else(|| format!("{}: no regularized value", row.date))?;
        worst = worst.max((nu - q.p50).abs() / iqr);
        if let Some(raw) = row.nu_raw {
            worst_raw = worst_raw.max((raw - q.p50).abs() / iqr);
        }
    }
    ensure(worst <= 5.0, || {
        format!("nu_eps strayed {worst:.1} IQRs from the pre-spike median")
    })?;
    Ok(format!(
        "raw kappa x{:.0}, nu_eps within {worst:.2} IQR (raw nu within {worst_raw:.2})",
        kappa_peak / kappa_pre
    ))
}

fn diagonal_pca(lambda: &[f64], means: &[f64]) -> (PcaResult, DVector<f64>) {
    let n = lambda.len();
    (
        PcaResult {
            eigenvalues: DVector::from_column_slice(lambda),
            eigenvectors: DMatrix::identity(n, n),
            components: DMatrix::zeros(2, n),
            column_means: DVector::zeros(n),
        },
        DVector::from_column_slice(means),
    )
}

fn min_rate_closed_form() -> Check {
    let (p, m) = diagonal_pca(&[4.0, 1.0], &[0.0, 0.0]);
    let res = analysis::min_rate(&p, &m, 1, 1e9, 1e9, BreachReport::Breaching)
        .map_err(|e| e.to_string())?;
    ensure(
        (res.weights[0] - 0.2).abs() <= 1e-12 && (res.weights[1] - 0.8).abs() <= 1e-12,
        || format!("lambda = [4, 1] gave weights {:?}", res.weights.as_slice()),
    )?;

    let mut rng = Mix(808);
    let mut worst_w: f64 = 0.0;
    let mut worst_full: f64 = 0.0;
    for case in 0..50 {
        let n = 2 + case % 9;
        let mut lambda: Vec<f64> = (0..n).map(|_| rng.uniform(0.1, 5.0)).collect();
        lambda.sort_by(|a, b| b.total_cmp(a));
        let means: Vec<f64> = (0..n).map(|_| rng.uniform(-0.01, 0.01)).collect();
        let (p, m) = diagonal_pca(&lambda, &means);
        let res = analysis::min_rate(&p, &m, 1, 1e9, 1e9, BreachReport::Breaching)
            .map_err(|e| e.to_string())?;
        let j = res.j_star;
        let total: f64 = lambda[..j].iter().map(|l| 1.0 / l).sum();
        for i in 0..j {
            worst_w = worst_w.max((res.weights[i] - 1.0 / lambda[i] / total).abs());
        }
        for w in res.path.windows(2) {
            ensure(w[1].sigma <= w[0].sigma, || {
                format!("case {case}: sigma rose at j = {}", w[1].count)
            })?;
        }
        let cov = DMatrix::from_diagonal(&DVector::from_column_slice(&lambda[..j]));
        let full = analysis::compare_full_universe(&DVector::from_column_slice(&means[..j]), &cov)
            .map_err(|e| e.to_string())?;
        worst_full = worst_full
            .max((full.r_n - res.r).abs())
            .max((full.sigma_r_n - res.sigma_r).abs())
            .max((&full.weights - &res.weights).amax());
    }
    ensure(worst_w <= 1e-12, || {
        format!("weights off the 1/lambda form by {worst_w:.2e}")
    })?;
    ensure(worst_full <= 1e-8, || {
        format!("full universe differs by {worst_full:.2e}")
    })?;
    Ok(format!("[4, 1] -> [0.2, 0.8]; 50 diagonal cases, weights {worst_w:.1e}, full universe {worst_full:.1e}"))
}

fn defaults_in_manifest() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_srr");
    let sim = Command::new(bin)
        .current_dir(dir.path())
        .args([
            "simulate",
            "--n",
            "3",
            "--steps",
            "2520",
            "--seed",
            "9",
            "--out",
            "prices.csv",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(sim.status.success(), || {
        String::from_utf8_lossy(&sim.stderr).into_owned()
    })?;
    let run = Command::new(bin)
        .current_dir(dir.path())
        .args(["srr", "--prices", "prices.csv", "--out", "series.csv"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(run.status.success(), || {
        String::from_utf8_lossy(&run.stderr).into_owned()
    })?;
    let text = std::fs::read_to_string(dir.path().join("series.manifest.json"))
        .map_err(|e| e.to_string())?;
    let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let cfg = &json["config"];
    ensure(cfg["window"] == 2500, || {
        format!("window {}", cfg["window"])
    })?;
    ensure(cfg["epsilon"].as_f64() == Some(0.005), || {
        format!("epsilon {}", cfg["epsilon"])
    })?;
    ensure(cfg["delta_nu"].as_f64() == Some(1e-5), || {
        format!("delta_nu {}", cfg["delta_nu"])
    })?;
    ensure(cfg["delta_sigma"].as_f64() == Some(1e-3), || {
        format!("delta_sigma {}", cfg["delta_sigma"])
    })?;
    ensure(json["input"]["algorithm"] == "sha256", || {
        "digest algorithm not stated".into()
    })?;
    Ok(
        "window 2500, epsilon 0.005, delta_nu 1e-5, delta_sigma 1e-3 read back from the manifest"
            .into(),
    )
}

fn main() {
    let checks: [(&str, fn() -> Check); 9] = [
        ("closed-form two-asset oracle", closed_form_two_asset),
        ("market-price-of-risk identity", market_price_identity),
        ("PCA invariants", pca_invariants),
        ("synthetic end-to-end recovery", synthetic_recovery),
        ("clamp band properties", clamp_properties),
        ("sign-flip invariance", sign_flip),
        ("spike regression", spike_regression),
        ("min_rate closed form", min_rate_closed_form),
        ("defaults in manifest", defaults_in_manifest),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {reason}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
