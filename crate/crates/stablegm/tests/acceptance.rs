//! End-to-end acceptance checks. Runs without the libtest harness so that the
//! one-line verdict for each criterion always reaches the output.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use stablegm::Parallel;
use stablegm_core::model::{Dag, DataMatrix, NoiseLaw, SGModel};
use stablegm_core::pipelines::{crossval_with, estimate_sample, run_benchmark_with, sgex_with, BenchmarkSpec};
use stablegm_core::regression::{irls, ols_solve, RegressionProblem};
use stablegm_core::rng::{derive_seed, seeded, uniform, SeededRng};
use stablegm_core::scoring::{fit_family, gaussian_bic};
use stablegm_core::stable::{closed_form_cdf, sample, theta_from_beta, Family};
use stablegm_core::{ScoreKind, SearchConfig, StableParams};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("x{i}")).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn sampler_fidelity() -> Verdict {
    let cases = [(Family::Levy, 0.5, 1.0), (Family::Cauchy, 1.0, 0.0), (Family::Normal, 2.0, 0.0)];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (k, (family, alpha, beta)) in cases.into_iter().enumerate() {
        let params = StableParams::new(alpha, beta, 1.0, 0.0).unwrap();
        let xs = sample(&params, 100_000, 100 + k as u64).unwrap();
        let d = ks_statistic(xs, |x| closed_form_cdf(family, x, &params).unwrap());
        worst = worst.max(d);
        parts.push(format!("{family:?} D={d:.4}"));
    }
    verdict(worst < 0.01, parts.join(", "))
}

fn estimator_accuracy() -> Verdict {
    let seeds = 50;
    let mut ok = true;
    let mut parts = Vec::new();
    let configs = [(0.8, 0.0), (1.1, 0.0), (1.4, 0.0), (1.7, 0.0), (1.4, 0.9)];
    for (alpha, beta) in configs {
        let gamma = 1.5;
        let params = StableParams::new(alpha, beta, gamma, 0.0).unwrap();
        let theta = theta_from_beta(alpha, beta);
        let (mut a_err, mut t_err, mut g_err) = (0.0, 0.0, 0.0);
        for seed in 0..seeds {
            // 2 x 10^4 raw draws give 10^4 pairwise differences
            let xs = sample(&params, 20_000, derive_seed(7, seed)).unwrap();
            let est = estimate_sample(&xs, 10.0).unwrap();
            a_err += (est.alpha - alpha).abs() / seeds as f64;
            t_err += (est.theta - theta).abs() / seeds as f64;
            g_err += ((est.gamma - gamma) / gamma).abs() / seeds as f64;
        }
        ok &= a_err <= 0.05 && g_err <= 0.10 && (beta == 0.0 || t_err <= 0.05);
        parts.push(format!("a={alpha} b={beta}: |da|={a_err:.3} |dth|={t_err:.3} rel dg={g_err:.3}"));
    }
    verdict(ok, parts.join("; "))
}

fn standard_normals(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..n).map(|_| stablegm_core::stable::sample_standard(2.0, 0.0, rng) / 2f64.sqrt()).collect()
}

fn irls_correctness() -> Verdict {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let mut rng = seeded(derive_seed(11, k));
        let m = 1 + (k as usize % 4);
        let n = 30 + 5 * m;
        let cols: Vec<Vec<f64>> = (0..m).map(|_| standard_normals(n, &mut rng)).collect();
        let noise = standard_normals(n, &mut rng);
        let y: Vec<f64> = (0..n)
            .map(|i| cols.iter().enumerate().map(|(j, c)| (j as f64 - 1.0) * c[i]).sum::<f64>() + noise[i])
            .collect();
        let design: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let problem = RegressionProblem::new(design, &y, 2.0);
        let a = irls(&problem).unwrap().coefficients;
        let b = ols_solve(&problem).unwrap().coefficients;
        for (u, v) in a.iter().zip(&b) {
            worst = worst.max((u - v).abs());
        }
    }
    let cauchy = StableParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let (mut e_irls, mut e_ols) = (Vec::new(), Vec::new());
    for seed in 0..50 {
        let mut rng = seeded(derive_seed(12, seed));
        let x = standard_normals(5000, &mut rng);
        let z = sample(&cauchy, 5000, derive_seed(13, seed)).unwrap();
        let y: Vec<f64> = x.iter().zip(&z).map(|(x, z)| 0.5 * x + z).collect();
        let problem = RegressionProblem::new(vec![&x[..]], &y, 0.99);
        e_irls.push((irls(&problem).unwrap().coefficients[0] - 0.5).abs());
        e_ols.push((ols_solve(&problem).unwrap().coefficients[0] - 0.5).abs());
    }
    let (mi, mo) = (median(e_irls), median(e_ols));
    verdict(
        worst <= 1e-8 && mi < mo,
        format!("p=2 max |irls-ols|={worst:.1e}; Cauchy median |w-0.5| irls={mi:.4} ols={mo:.4}"),
    )
}

fn random_model(rng: &mut SeededRng, d: usize, alpha: f64) -> SGModel {
    let mut parents = vec![Vec::new(); d];
    let mut weights = vec![Vec::new(); d];
    for j in 1..d {
        for i in 0..j {
            if uniform(rng, 0.0, 1.0) < 0.5 {
                parents[j].push(i);
                weights[j].push(uniform(rng, -1.5, 1.5));
            }
        }
    }
    let noise = (0..d)
        .map(|_| NoiseLaw { beta: uniform(rng, -1.0, 1.0), gamma: uniform(rng, 0.2, 2.0), mu: uniform(rng, -1.0, 1.0) })
        .collect();
    SGModel::new(Dag::new(names(d), parents).unwrap(), alpha, weights, noise).unwrap()
}

fn representation_equivalence() -> Verdict {
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let mut rng = seeded(derive_seed(21, k));
        let alpha = if k % 4 == 0 { 1.0 } else { uniform(&mut rng, 0.3, 2.0) };
        let d = 2 + (k as usize % 4);
        let model = random_model(&mut rng, d, alpha);
        let (atoms, location) = model.spectral_atoms();
        for _ in 0..100 {
            let q: Vec<f64> = (0..d).map(|_| uniform(&mut rng, -2.0, 2.0)).collect();
            let a = model.characteristic_function(&q);
            let b = stablegm_core::model::spectral_characteristic_function(&atoms, &location, alpha, &q);
            worst = worst.max((a - b).norm());
        }
    }
    verdict(worst < 1e-10, format!("max |product - spectral| = {worst:.1e} over 20 models x 100 q"))
}

/// All 25 DAGs on three labelled nodes as parent lists.
fn three_node_dags() -> Vec<Vec<Vec<usize>>> {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut out = Vec::new();
    for code in 0..27 {
        let mut parents = vec![Vec::new(); 3];
        let mut c = code;
        for &(a, b) in &pairs {
            match c % 3 {
                1 => parents[b].push(a),
                2 => parents[a].push(b),
                _ => {}
            }
            c /= 3;
        }
        if Dag::new(names(3), parents.clone()).is_ok() {
            out.push(parents);
        }
    }
    out
}

fn adjacent(p: &[Vec<usize>], a: usize, b: usize) -> bool {
    p[a].contains(&b) || p[b].contains(&a)
}

fn markov_equivalent(x: &[Vec<usize>], y: &[Vec<usize>]) -> bool {
    let skeleton = |p: &[Vec<usize>]| [(0, 1), (0, 2), (1, 2)].map(|(a, b)| adjacent(p, a, b));
    let colliders = |p: &[Vec<usize>]| {
        let mut v = Vec::new();
        for c in 0..3 {
            for &a in &p[c] {
                for &b in &p[c] {
                    if a < b && !adjacent(p, a, b) {
                        v.push((a, c, b));
                    }
                }
            }
        }
        v
    };
    skeleton(x) == skeleton(y) && colliders(x) == colliders(y)
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

fn mdc_matches_bic() -> Verdict {
    let dags = three_node_dags();
    assert_eq!(dags.len(), 25);
    let p = 2.0 / 1.01;
    let mut agree = 0;
    for seed in 0..20u64 {
        let mut rng = seeded(derive_seed(31, seed));
        let truth = &dags[(uniform(&mut rng, 0.0, 25.0) as usize).min(24)];
        let weights = truth
            .iter()
            .map(|ps| {
                ps.iter()
                    .map(|_| uniform(&mut rng, 0.4, 1.0) * if uniform(&mut rng, -1.0, 1.0) < 0.0 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect();
        let noise = vec![NoiseLaw::symmetric(1.0); 3];
        let model = SGModel::new(Dag::new(names(3), truth.clone()).unwrap(), 2.0, weights, noise).unwrap();
        let data = model.simulate(5000, derive_seed(32, seed)).unwrap();
        let mut mdc = Vec::new();
        let mut bic = Vec::new();
        for parents in &dags {
            let mut s = 0.0;
            let mut ols_weights = Vec::new();
            for (j, ps) in parents.iter().enumerate() {
                s += fit_family(&data, j, ps, ScoreKind::Mdc, p, 1e-8).unwrap().score();
                ols_weights.push(fit_family(&data, j, ps, ScoreKind::Ols, 2.0, 1e-8).unwrap().weights);
            }
            mdc.push(s);
            let fitted = SGModel::new(
                Dag::new(names(3), parents.clone()).unwrap(),
                2.0,
                ols_weights,
                vec![NoiseLaw::symmetric(1.0); 3],
            )
            .unwrap();
            bic.push(gaussian_bic(&fitted, &data).unwrap());
        }
        if markov_equivalent(&dags[argmax(&mdc)], &dags[argmax(&bic)]) {
            agree += 1;
        }
    }
    verdict(agree >= 18, format!("argmax classes agree in {agree}/20 seeds"))
}

fn read_child() -> Dag {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/child.edges");
    stablegm::format::read_topology(&path).unwrap()
}

fn structure_recovery(exec: &Parallel) -> Verdict {
    let spec = BenchmarkSpec {
        beta: 0.9,
        gamma: 1.0,
        rho: 1.0,
        n_samples: 2000,
        n_replicates: 20,
        seed: 3,
        ..BenchmarkSpec::new(read_child(), 1.1)
    };
    let run = |kind| {
        let config = SearchConfig { n_restarts: 10, seed: 3, score_kind: kind, ..SearchConfig::default() };
        run_benchmark_with(&spec, &config, exec).unwrap()
    };
    let mdc = run(ScoreKind::Mdc);
    let ols = run(ScoreKind::Ols);
    let (fp_mdc, fp_ols) = (mdc.fp_at_confidence[50], ols.fp_at_confidence[50]);
    verdict(
        mdc.mean_tp >= ols.mean_tp && mdc.mean_tp >= 15.0 && fp_mdc <= 10 && fp_ols <= 10,
        format!("mean TP mdc={:.2} ols={:.2} of 25; FP@50% mdc={fp_mdc} ols={fp_ols}", mdc.mean_tp, ols.mean_tp),
    )
}

fn cross_validation(exec: &Parallel) -> Verdict {
    let edges = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (2, 6), (5, 7), (6, 7), (7, 8), (8, 9), (1, 9)];
    let dag = Dag::from_edges(names(10), &edges).unwrap();
    let spec = BenchmarkSpec { n_samples: 2000, seed: 41, ..BenchmarkSpec::new(dag, 1.4) };
    let model = spec.generator(0).unwrap();
    let data = model.simulate(2000, derive_seed(41, 1)).unwrap();
    let config = SearchConfig { n_restarts: 10, seed: 42, ..SearchConfig::default() };
    let report = crossval_with(&data, 10, &config, exec).unwrap();
    let better = report.differences().iter().filter(|d| **d < 0.0).count();
    verdict(
        better >= 9,
        format!(
            "learned below null in {better}/10 folds (mean {:.4} vs {:.4})",
            mean(&report.fold_lflom_model),
            mean(&report.fold_lflom_null)
        ),
    )
}

fn sgex_sensitivity(exec: &Parallel) -> Verdict {
    let alpha = 1.5;
    let chain = |gamma2: f64| {
        let noise = vec![NoiseLaw::symmetric(1.0), NoiseLaw::symmetric(1.0), NoiseLaw::symmetric(gamma2)];
        SGModel::new(
            Dag::new(names(3), vec![vec![], vec![0], vec![1]]).unwrap(),
            alpha,
            vec![vec![], vec![0.8], vec![-0.6]],
            noise,
        )
        .unwrap()
    };
    let n = 2000;
    let labels: Vec<String> = ["a", "b", "c"].iter().flat_map(|g| std::iter::repeat_n(g.to_string(), n)).collect();
    let mut held_out = Vec::new();
    let mut null = Vec::new();
    for seed in 0..50u64 {
        let parts = [
            chain(1.0).simulate(n, derive_seed(51, 3 * seed)).unwrap(),
            chain(1.0).simulate(n, derive_seed(51, 3 * seed + 1)).unwrap(),
            chain(2.0).simulate(n, derive_seed(51, 3 * seed + 2)).unwrap(),
        ];
        let cols = (0..3).map(|j| parts.iter().flat_map(|m| m.column(j).to_vec()).collect()).collect();
        let data = DataMatrix::new(names(3), cols).unwrap();
        let config = SearchConfig { n_restarts: 2, seed, ..SearchConfig::default() };
        let de = sgex_with(&data, &labels, &config, exec).unwrap();
        held_out.push(de.delta_ld[2][2]);
        for g in 0..3 {
            null.push(de.delta_ld[g][0]);
            null.push(de.delta_ld[g][1]);
        }
    }
    let target = 2f64.ln() / alpha;
    let shift = mean(&held_out);
    let m = mean(&null);
    let sd = (null.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (null.len() - 1) as f64).sqrt();
    let se = sd / (null.len() as f64).sqrt();
    verdict(
        (shift - target).abs() <= 0.3 * target && m.abs() < 3.0 * se,
        format!("doubled-gamma dLD={shift:.4} (target {target:.4}); null mean {m:.4}, 3 se = {:.4}", 3.0 * se),
    )
}

fn cli(dir: &Path, threads: usize, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_stablegm"))
        .current_dir(dir)
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    std::fs::write(
        root.join("model.json"),
        r#"{"alpha": 1.3, "nodes": [
            {"name": "a", "parents": [], "weights": [], "beta": 0.5, "gamma": 1.0, "mu": 0.0},
            {"name": "b", "parents": ["a"], "weights": [0.9], "beta": 0.0, "gamma": 1.0, "mu": 0.5},
            {"name": "c", "parents": ["a", "b"], "weights": [-0.5, 0.7], "beta": -0.3, "gamma": 2.0, "mu": 0.0}]}"#,
    )
    .unwrap();
    std::fs::write(root.join("net.edges"), "a,b\nb,c\na,c\n").unwrap();
    let labels: String = (0..600).map(|i| if i < 300 { "g1\n" } else { "g2\n" }).collect();
    std::fs::write(root.join("groups.txt"), labels).unwrap();
    if let Err(e) = cli(root, 1, &["sample", "--model", "model.json", "--n", "600", "--seed", "7", "-o", "data.csv"]) {
        return verdict(false, e);
    }
    let verbs: Vec<(&str, Vec<&str>)> = vec![
        ("sample.csv", vec!["sample", "--model", "model.json", "--n", "600", "--seed", "7"]),
        ("estimate.tsv", vec!["estimate", "--data", "data.csv", "--bootstrap", "40", "--seed", "2"]),
        (
            "learn.json",
            vec!["learn", "--data", "data.csv", "--restarts", "6", "--seed", "1", "--trace", "{out}/trace.tsv"],
        ),
        ("score.tsv", vec!["score", "--model", "model.json", "--data", "data.csv", "--kind", "mdc"]),
        ("score_ols.tsv", vec!["score", "--model", "model.json", "--data", "data.csv", "--kind", "ols"]),
        ("score_lflom.tsv", vec!["score", "--model", "model.json", "--data", "data.csv", "--kind", "lflom"]),
        (
            "benchmark.tsv",
            vec![
                "benchmark",
                "--topology",
                "net.edges",
                "--alpha",
                "1.2",
                "--n",
                "300",
                "--replicates",
                "6",
                "--restarts",
                "3",
                "--seed",
                "4",
                "--curve",
                "{out}/curve.csv",
            ],
        ),
        ("crossval.tsv", vec!["crossval", "--data", "data.csv", "--folds", "4", "--restarts", "3", "--seed", "5"]),
        ("sgex.tsv", vec!["sgex", "--data", "data.csv", "--groups", "groups.txt", "--restarts", "3", "--seed", "6"]),
        ("normalize.csv", vec!["normalize", "--data", "data.csv", "--top-k", "2"]),
    ];
    let runs = [("run1", 1), ("run2", 4), ("run3", 1)];
    for (out, threads) in runs {
        std::fs::create_dir(root.join(out)).unwrap();
        for (file, args) in &verbs {
            let target = format!("{out}/{file}");
            let mut full: Vec<String> = args.iter().map(|a| a.replace("{out}", out)).collect();
            full.push("-o".into());
            full.push(target);
            let refs: Vec<&str> = full.iter().map(String::as_str).collect();
            if let Err(e) = cli(root, threads, &refs) {
                return verdict(false, e);
            }
        }
    }
    let mut files: Vec<&str> = verbs.iter().map(|(f, _)| *f).collect();
    files.extend(["trace.tsv", "curve.csv"]);
    let mut differing = Vec::new();
    for file in &files {
        let first = std::fs::read(root.join("run1").join(file)).unwrap();
        for (out, _) in &runs[1..] {
            if std::fs::read(root.join(out).join(file)).unwrap() != first {
                differing.push(format!("{out}/{file}"));
            }
        }
    }
    verdict(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} outputs identical across 3 runs (threads 1, 4, 1)", files.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    )
}

type Check<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn main() {
    let exec = Parallel::new(None).unwrap();
    let checks: Vec<Check> = vec![
        ("sampler fidelity", Box::new(sampler_fidelity)),
        ("estimator accuracy", Box::new(estimator_accuracy)),
        ("IRLS correctness", Box::new(irls_correctness)),
        ("representation equivalence", Box::new(representation_equivalence)),
        ("MDC vs Gaussian BIC at alpha=2", Box::new(mdc_matches_bic)),
        ("CHILD structure recovery", Box::new(|| structure_recovery(&exec))),
        ("cross-validation", Box::new(|| cross_validation(&exec))),
        ("SGEX sensitivity", Box::new(|| sgex_sensitivity(&exec))),
        ("CLI determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({}; {:.1}s)",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
