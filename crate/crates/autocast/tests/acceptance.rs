//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use autocast::export::export_bundle;
use autocast::{finalize_and_forecast, run_validation, PipelineConfig};
use autocast_core::cnn::{CnnConfig, Network};
use autocast_core::eval::{summarize, wilcoxon_signed_rank, Alternative, EvaluationSummary};
use autocast_core::metrics::{compute_mape, compute_nrmse, compute_rmse};
use autocast_core::models::{fit_arima_order, lasso_coordinate_descent, ArimaOrder};
use autocast_core::report::{ForecastBundle, ValidationReport};
use autocast_core::rng::SplitMix64;
use autocast_core::synth::{generate_corpus, mixed_specs, ArchetypeKind, ArchetypeSpec};
use autocast_core::{Frequency, Period, SalesSeries};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn criterion_1_metrics_oracle() -> Outcome {
    let mut rng = SplitMix64::new(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 1 + rng.below(40);
        let actual: Vec<f64> =
            (0..n).map(|_| if rng.next_f64() < 0.1 { 0.0 } else { rng.uniform(0.0, 1000.0) }).collect();
        let predicted: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 1000.0)).collect();

        let mut sq = 0.0;
        for i in 0..n {
            sq += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        }
        let rmse = (sq / n as f64).sqrt();
        let (mut lo, mut hi) = (actual[0], actual[0]);
        for &a in &actual {
            lo = lo.min(a);
            hi = hi.max(a);
        }
        let nrmse = if hi > lo { Some(rmse / (hi - lo)) } else { None };
        let (mut ape, mut used, mut skipped) = (0.0, 0usize, 0usize);
        for i in 0..n {
            if actual[i] == 0.0 {
                skipped += 1;
            } else {
                ape += (actual[i] - predicted[i]).abs() / actual[i].abs();
                used += 1;
            }
        }
        let mape = if used > 0 { Some(ape / used as f64) } else { None };

        worst = worst.max(rel_err(compute_rmse(&actual, &predicted).unwrap(), rmse));
        match (compute_nrmse(&actual, &predicted).unwrap(), nrmse) {
            (Some(a), Some(b)) => worst = worst.max(rel_err(a, b)),
            (None, None) => {}
            _ => return outcome(false, "nRMSE definedness differs"),
        }
        let (m, s) = compute_mape(&actual, &predicted).unwrap();
        if s != skipped {
            return outcome(false, "MAPE skip count differs");
        }
        match (m, mape) {
            (Some(a), Some(b)) => worst = worst.max(rel_err(a, b)),
            (None, None) => {}
            _ => return outcome(false, "MAPE definedness differs"),
        }
    }
    outcome(worst <= 1e-12, format!("max relative error {worst:.2e} over 1000 pairs"))
}

fn enumerate_wilcoxon(diffs: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let w: f64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| ranks[i]).sum();
    let (mut ge, mut le) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s >= w {
            ge += 1;
        }
        if s <= w {
            le += 1;
        }
    }
    let p = (2.0 * ge.min(le) as f64 / (1u64 << n) as f64).min(1.0);
    (w, p)
}

fn criterion_2_wilcoxon() -> Outcome {
    let hand = wilcoxon_signed_rank(&[1.0, 2.0, 3.0]).unwrap();
    if hand.p_value != 0.25 {
        return outcome(false, format!("d=[1,2,3] gave p={}", hand.p_value));
    }
    let mut rng = SplitMix64::new(202);
    let mut checked = 0;
    while checked < 200 {
        let n = 1 + rng.below(12);
        let d: Vec<f64> = (0..n)
            .map(|_| if rng.next_f64() < 0.5 { rng.below(11) as f64 - 5.0 } else { rng.uniform(-10.0, 10.0) })
            .collect();
        if d.iter().all(|x| *x == 0.0) {
            continue;
        }
        let (w, p) = enumerate_wilcoxon(&d);
        let r = wilcoxon_signed_rank(&d).unwrap();
        if r.statistic != w || r.p_value.to_bits() != p.to_bits() {
            return outcome(false, format!("mismatch on {d:?}: W {} vs {w}, p {} vs {p}", r.statistic, r.p_value));
        }
        checked += 1;
    }
    outcome(true, "200 samples bit-equal to enumeration; d=[1,2,3] gives p=0.25")
}

fn criterion_3_gradient_check() -> Outcome {
    let config = CnnConfig { input_window: 16, channels: 3, ..CnnConfig::for_frequency(Frequency::Monthly, 3) };
    let mut rng = SplitMix64::new(303);
    let mut net = Network::init(&config, &mut rng, 0.2);
    let mut params = net.parameters();
    for g in net.parameter_groups() {
        if g.0.starts_with("conv") {
            let layer = &net.layers[g.0[4..].parse::<usize>().unwrap() - 1];
            let bias_start = g.1.start + layer.weight.len();
            for p in &mut params[bias_start..g.1.end] {
                *p = rng.uniform(0.05, 0.2);
            }
        }
    }
    net.set_parameters(&params).unwrap();
    let x: Vec<f64> = (0..16).map(|i| 0.8 + 0.4 * (i as f64 * 0.9).sin()).collect();
    let target = 1.3;
    let (_, grads) = net.loss_gradient(&x, target);
    let analytic = grads.parameters();
    let h = 1e-5;
    let mut report = Vec::new();
    let mut worst_all: f64 = 0.0;
    for (name, range) in net.parameter_groups() {
        let mut worst: f64 = 0.0;
        for i in range {
            let mut probe = net.clone();
            let mut p = params.clone();
            p[i] = params[i] + h;
            probe.set_parameters(&p).unwrap();
            let up = probe.loss_gradient(&x, target).0;
            p[i] = params[i] - h;
            probe.set_parameters(&p).unwrap();
            let down = probe.loss_gradient(&x, target).0;
            let numeric = (up - down) / (2.0 * h);
            let err = (numeric - analytic[i]).abs() / numeric.abs().max(analytic[i].abs()).max(1e-6);
            worst = worst.max(err);
        }
        worst_all = worst_all.max(worst);
        report.push(format!("{name} {worst:.1e}"));
    }
    outcome(worst_all < 1e-4, format!("max relative error per layer: {}", report.join(", ")))
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn standardized_system(rng: &mut SplitMix64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = 80;
    let p = 3 + rng.below(6);
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            let c: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
            let mean = c.iter().sum::<f64>() / n as f64;
            let sd = (c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
            c.iter().map(|v| (v - mean) / sd).collect()
        })
        .collect();
    let beta: Vec<f64> = (0..p).map(|_| rng.uniform(-3.0, 3.0)).collect();
    let y = (0..n)
        .map(|i| 5.0 + (0..p).map(|j| beta[j] * columns[j][i]).sum::<f64>() + 0.5 * rng.gaussian())
        .collect();
    (columns, y)
}

fn criterion_4_lasso() -> Outcome {
    let mut rng = SplitMix64::new(404);
    let (mut worst_ls, mut worst_kkt): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let (cols, y) = standardized_system(&mut rng);
        let n = y.len();
        let p = cols.len();
        // Least squares with an intercept column, via the normal equations.
        let design: Vec<Vec<f64>> = std::iter::once(vec![1.0; n]).chain(cols.iter().cloned()).collect();
        let gram: Vec<Vec<f64>> = design
            .iter()
            .map(|a| design.iter().map(|b| a.iter().zip(b).map(|(x, z)| x * z).sum()).collect())
            .collect();
        let rhs: Vec<f64> = design.iter().map(|a| a.iter().zip(&y).map(|(x, z)| x * z).sum()).collect();
        let ls = solve_dense(gram, rhs);
        let fit = lasso_coordinate_descent(&cols, &y, 0.0).unwrap();
        worst_ls = worst_ls.max((fit.intercept - ls[0]).abs());
        for j in 0..p {
            worst_ls = worst_ls.max((fit.coef[j] - ls[j + 1]).abs());
        }

        let lambda_max = (0..p)
            .map(|j| {
                let mean = y.iter().sum::<f64>() / n as f64;
                (cols[j].iter().zip(&y).map(|(x, v)| x * (v - mean)).sum::<f64>() / n as f64).abs()
            })
            .fold(0.0, f64::max);
        let lambda = 0.2 * lambda_max;
        let fit = lasso_coordinate_descent(&cols, &y, lambda).unwrap();
        let resid: Vec<f64> = (0..n)
            .map(|i| y[i] - fit.intercept - (0..p).map(|j| fit.coef[j] * cols[j][i]).sum::<f64>())
            .collect();
        worst_kkt = worst_kkt.max((resid.iter().sum::<f64>() / n as f64).abs());
        for j in 0..p {
            let g = -cols[j].iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>() / n as f64;
            let violation =
                if fit.coef[j] != 0.0 { (g + lambda * fit.coef[j].signum()).abs() } else { (g.abs() - lambda).max(0.0) };
            worst_kkt = worst_kkt.max(violation);
        }
    }
    outcome(
        worst_ls <= 1e-6 && worst_kkt <= 1e-6,
        format!("least-squares gap {worst_ls:.1e}, subgradient violation {worst_kkt:.1e} over 50 systems"),
    )
}

fn config_with_seed(seed: u64) -> PipelineConfig {
    PipelineConfig { seed, ..PipelineConfig::default() }
}

fn run_pipeline(history: &[SalesSeries], config: &PipelineConfig) -> (ValidationReport, ForecastBundle) {
    let report = run_validation(history, config).expect("validation");
    let bundle = finalize_and_forecast(history, &report, config).expect("forecast");
    (report, bundle)
}

fn criterion_5_archetypes() -> Outcome {
    let mut specs = Vec::new();
    for (k, kind) in [ArchetypeKind::Seasonality, ArchetypeKind::SeasonalityTrend].into_iter().enumerate() {
        for s in 0..5u64 {
            let mut spec = ArchetypeSpec::new(format!("{kind:?}-{s}"), kind, 50 + 10 * k as u64 + s);
            spec.length = 48 + 18;
            spec.noise = 0.05;
            specs.push(spec);
        }
    }
    let full = generate_corpus(&specs, 5).unwrap();
    let history: Vec<SalesSeries> = full.iter().map(|s| s.prefix(48).unwrap()).collect();
    let (_, bundle) = run_pipeline(&history, &config_with_seed(5));
    let mut worst: (f64, String) = (0.0, String::new());
    for s in &full {
        let p = bundle.product(s.product_id()).unwrap();
        let f = p.recommended_forecast().unwrap();
        let nrmse = compute_nrmse(&s.values()[48..], f.values()).unwrap().unwrap();
        if nrmse > worst.0 {
            worst = (nrmse, format!("{} via {}", s.product_id(), p.recommended));
        }
    }
    outcome(worst.0 <= 0.25, format!("worst recommended nRMSE {:.3} ({}) over 10 products", worst.0, worst.1))
}

fn mixed_corpus_evaluation() -> EvaluationSummary {
    let full = generate_corpus(&mixed_specs(50, 96), 2024).unwrap();
    let mut history = Vec::new();
    let mut actuals = Vec::new();
    for s in &full {
        let cut = s.len().saturating_sub(12).max(1);
        history.push(s.prefix(cut).unwrap());
        let tail = SalesSeries::new(s.product_id(), s.start().offset(cut), s.values()[cut..].to_vec());
        actuals.extend(tail.ok());
    }
    let (report, bundle) = run_pipeline(&history, &config_with_seed(2024));
    summarize(&report, &bundle, &actuals, Alternative::TwoSided).unwrap()
}

fn criterion_6_beats_naive(summary: &EvaluationSummary) -> Outcome {
    let median = summary.recommended_ratio.map(|q| q.median);
    let p = summary.wilcoxon_recommended.map(|w| w.p_value);
    let pass = matches!((median, p), (Some(m), Some(p)) if m < 1.0 && p < 0.05);
    let show = |v: Option<f64>, prec: usize| v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.prec$}"));
    outcome(
        pass,
        format!(
            "{} products scored, median ratio {}, Wilcoxon p {}",
            summary.products_scored,
            show(median, 3),
            show(p, 4)
        ),
    )
}

fn criterion_7_best_dominates(summary: &EvaluationSummary) -> Outcome {
    let violations = summary
        .products
        .iter()
        .filter(|p| {
            let (best, rec) = (&p.metrics[&p.best], &p.metrics[&p.recommended]);
            match (best.nrmse, rec.nrmse) {
                (Some(b), Some(r)) => b > r,
                _ => best.rmse > rec.rmse,
            }
        })
        .count();
    outcome(
        violations == 0 && summary.products_scored > 0,
        format!("{violations} of {} products violate best <= recommended", summary.products_scored),
    )
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_8_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_autocast");
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"[{"product_id":"a","kind":"Seasonality","length":60},{"product_id":"b","kind":"SeasonalityTrend","length":60},
            {"product_id":"c","kind":"HighVariance","length":48},{"product_id":"d","kind":"ShortHistory"}]"#,
    )
    .unwrap();
    let sales = tmp.path().join("sales.csv");
    let status = Command::new(bin).args(["synth", "--seed", "8", "--spec"]).arg(&spec).arg("--out").arg(&sales).stderr(Stdio::null()).status();
    if !status.map(|s| s.success()).unwrap_or(false) {
        return outcome(false, "synth failed");
    }
    let mut outputs = Vec::new();
    for run in ["run1", "run2"] {
        let out = tmp.path().join(run);
        let status = Command::new(bin)
            .args(["forecast", "--seed", "8", "--input"])
            .arg(&sales)
            .arg("--out")
            .arg(&out)
            .stderr(Stdio::null())
            .status();
        if !status.map(|s| s.success()).unwrap_or(false) {
            return outcome(false, format!("{run} failed"));
        }
        outputs.push(read_dir_bytes(&out));
    }
    let same = outputs[0] == outputs[1];
    outcome(same, format!("{} files compared byte for byte", outputs[0].len()))
}

fn criterion_9_runtime() -> Outcome {
    let specs: Vec<ArchetypeSpec> = (0..100)
        .map(|i| {
            let kind = [ArchetypeKind::Seasonality, ArchetypeKind::SeasonalityTrend, ArchetypeKind::HighVariance][i % 3];
            let mut s = ArchetypeSpec::new(format!("R{i:03}"), kind, i as u64);
            s.length = 96;
            s
        })
        .collect();
    let corpus = generate_corpus(&specs, 9).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let config = config_with_seed(9);
    let start = Instant::now();
    let (report, bundle) = run_pipeline(&corpus, &config);
    export_bundle(&bundle, &report, &corpus, &config, tmp.path()).unwrap();
    let elapsed = start.elapsed();
    let models = bundle.products.iter().map(|p| p.forecasts.len()).min().unwrap_or(0);
    outcome(
        elapsed < Duration::from_secs(300) && bundle.products.len() == 100,
        format!("{:.1} s for 100 products x 96 months, at least {models} models each", elapsed.as_secs_f64()),
    )
}

fn criterion_10_ar_recovery() -> Outcome {
    let mut hits = 0;
    let mut estimates = Vec::new();
    for seed in 0..20u64 {
        let mut rng = SplitMix64::new(1000 + seed);
        let mut y = 0.0;
        let mut values = Vec::new();
        for t in 0..300 {
            y = 0.8 * y + rng.gaussian();
            if t >= 100 {
                values.push(50.0 + y);
            }
        }
        let series = SalesSeries::new("ar", Period::new(Frequency::Monthly, 0), values).unwrap();
        let fit = fit_arima_order(&series, ArimaOrder::new(1, 0, 0), None).unwrap();
        let phi = fit.ar[0];
        estimates.push(phi);
        if (phi - 0.8).abs() <= 0.1 {
            hits += 1;
        }
    }
    let lo = estimates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(hits >= 18, format!("{hits}/20 within 0.1 of 0.8 (estimates {lo:.3}..{hi:.3})"))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {name}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    };
    report("1 metrics oracle", &criterion_1_metrics_oracle);
    report("2 wilcoxon exactness", &criterion_2_wilcoxon);
    report("3 cnn gradient check", &criterion_3_gradient_check);
    report("4 lasso oracle", &criterion_4_lasso);
    report("5 archetype accuracy", &criterion_5_archetypes);
    let start = Instant::now();
    let summary = mixed_corpus_evaluation();
    println!("     mixed corpus pipeline and evaluation: {:.1} s", start.elapsed().as_secs_f64());
    report("6 pipeline beats naive", &|| criterion_6_beats_naive(&summary));
    report("7 best dominates recommended", &|| criterion_7_best_dominates(&summary));
    report("8 determinism", &criterion_8_determinism);
    report("9 end-to-end runtime", &criterion_9_runtime);
    report("10 ar recovery", &criterion_10_ar_recovery);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
