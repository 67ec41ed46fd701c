//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::Path;
use std::time::Instant;

use mfc_cli::{report::RunReport, run, Cli};
use mfc_core::adversarial::{
    eps2_from_epsinf, grid_attack, linear_worst_case_loss, objective_gradient, objective_value, pgd_attack,
};
use mfc_core::covering::DEFAULT_DELTA;
use mfc_core::rng;
use mfc_core::synthetic::{
    gen_blobs, gen_tradeoff, reference_classifiers, uniform_2d_dataset, BlobSpec, TradeoffDistSpec,
};
use mfc_core::{
    accuracy, build_adjacency, exact_min_cover, kcenter_greedy, solve_eta_mcs, solve_k_mcs,
    solve_k_mcs_per_class, verify_bound, AdjacencyMatrix, AttackConfig, BaselineSpec, BudgetMode, Classifier,
    LabeledDataset, LinearModel, Method, Mlp, Norm, PointSet, SolverConfig, TrainConfig, TrainData,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Oracles.

fn brute_min_cover_size(adj: &AdjacencyMatrix) -> usize {
    let n = adj.len();
    let masks: Vec<u32> = (0..n)
        .map(|i| adj.row(i).iter().fold(0u32, |m, &j| m | 1 << j))
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    (1u32..=full)
        .filter(|s| {
            let covered = (0..n)
                .filter(|&i| s >> i & 1 == 1)
                .fold(0u32, |m, i| m | masks[i]);
            covered == full
        })
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

fn brute_k_radius(ds: &LabeledDataset, k: usize, norm: Norm) -> f64 {
    let mut candidates = vec![0.0];
    for c in ds.present_classes() {
        let idx = ds.class_indices(c);
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                candidates.push(norm.dist(ds.points().point(i), ds.points().point(j)));
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    let size = |r: f64| -> usize {
        ds.present_classes()
            .into_iter()
            .map(|c| {
                brute_min_cover_size(&build_adjacency(
                    &ds.points().select(ds.class_indices(c)),
                    r,
                    norm,
                ))
            })
            .sum()
    };
    candidates.into_iter().find(|&r| size(r) <= k).unwrap()
}

fn random_dataset(rng: &mut impl Rng, n: usize, classes: usize) -> LabeledDataset {
    let coords = (0..2 * n).map(|_| rng.gen::<f64>() * 4.0).collect();
    let mut labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..classes)).collect();
    labels[0] = 0;
    LabeledDataset::new(PointSet::from_flat(2, coords).unwrap(), labels).unwrap()
}

// Criteria.

fn exact_solver_oracle() -> Outcome {
    let mut rng = rng::stream(101);
    for case in 0..100 {
        let n = rng.gen_range(1..=16);
        let pts = PointSet::from_flat(2, (0..2 * n).map(|_| rng.gen::<f64>()).collect()).unwrap();
        let eta = rng.gen::<f64>() * 0.8;
        let adj = build_adjacency(&pts, eta, Norm::L2);
        let exact = exact_min_cover(&adj, 20_000_000).map_err(|e| e.to_string())?;
        let brute = brute_min_cover_size(&adj);
        ensure(adj.is_cover(&exact) && exact.len() == brute, || {
            format!("case {case}: exact {} vs exhaustive {brute}", exact.len())
        })?;
    }
    Ok("100/100 instances match exhaustive search".into())
}

fn bisection_correctness() -> Outcome {
    let mut rng = rng::stream(202);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = rng.gen_range(2..=12);
        let classes = rng.gen_range(1..=2);
        let ds = random_dataset(&mut rng, n, classes);
        let present = ds.present_classes().len();
        let k = rng.gen_range(present..=n);
        let sol = solve_k_mcs(&ds, k, Norm::L2, DEFAULT_DELTA, &SolverConfig::exact())
            .map_err(|e| e.to_string())?;
        let best = brute_k_radius(&ds, k, Norm::L2);
        let err = (sol.eta - best).abs();
        worst = worst.max(err);
        ensure(sol.len() <= k && err <= DEFAULT_DELTA, || {
            format!(
                "case {case}: radius {} vs optimum {best} with {} centers for k = {k}",
                sol.eta,
                sol.len()
            )
        })?;
    }
    Ok(format!("50/50 within delta, worst deviation {worst:.2e}"))
}

fn bound_certification() -> Outcome {
    let eps = 0.5;
    let mut min_gap = f64::INFINITY;
    let mut control = 0.0f64;
    for m in 0..100u64 {
        let ds = gen_blobs(&BlobSpec {
            centers: vec![vec![0.0, 0.0], vec![7.0, 1.0]],
            spread: 1.5,
            sigma: 0.8,
            samples_per_class: 25,
            margin: eps,
            norm: Norm::L2,
            seed: 1000 + m,
        })
        .map_err(|e| e.to_string())?;
        ensure(mfc_core::is_separated(&ds, eps, Norm::L2).unwrap(), || {
            format!("blobs {m} not separated")
        })?;
        let model = LinearModel::random(2, 2, 1.0, m);
        for eta in [0.0, 0.4, 1.0] {
            let sol = solve_eta_mcs(&ds, eta, Norm::L2, &SolverConfig::exact()).map_err(|e| e.to_string())?;
            let r = verify_bound(&model, &ds, &sol, eps, Norm::L2).map_err(|e| e.to_string())?;
            ensure(r.holds && r.gap >= -1e-9, || {
                format!("model {m}, eta {eta}: gap {}", r.gap)
            })?;
            if eta == 0.0 {
                control = control.max(r.gap.abs());
            } else {
                min_gap = min_gap.min(r.gap);
            }
        }
    }
    ensure(control <= 1e-12, || format!("eta = 0 control gap {control:e}"))?;
    Ok(format!(
        "300/300 hold, smallest gap {min_gap:.3e}, control |gap| {control:e}"
    ))
}

fn volume_anchors() -> Outcome {
    let mnist = eps2_from_epsinf(0.1, 784);
    let cifar = eps2_from_epsinf(8.0 / 255.0, 3072);
    ensure(
        (mnist - 1.36).abs() <= 0.005 && (cifar - 0.84).abs() <= 0.005,
        || format!("got {mnist} and {cifar}"),
    )?;
    Ok(format!("{mnist:.4} and {cifar:.4}"))
}

fn tradeoff_example() -> Outcome {
    let spec = TradeoffDistSpec {
        p: 0.8,
        n: 10,
        samples: 100_000,
        seed: 2024,
    };
    let ds = gen_tradeoff(&spec).map_err(|e| e.to_string())?;
    let refs = reference_classifiers(&spec);
    let attack = AttackConfig::exact(1.0 - 1e-9, Norm::LInf);
    let acc = |m: &LinearModel, a: Option<&AttackConfig>| accuracy(m, &ds, a).unwrap();
    let (a_std, a_rob) = (acc(&refs.accurate, None), acc(&refs.accurate, Some(&attack)));
    let (r_std, r_rob) = (acc(&refs.robust, None), acc(&refs.robust, Some(&attack)));
    ensure(a_std == 1.0 && a_rob == 0.0, || {
        format!("f_a accuracies {a_std} / {a_rob}")
    })?;
    ensure((r_std - 0.8).abs() <= 0.01 && (r_rob - 0.8).abs() <= 0.01, || {
        format!("f_r accuracies {r_std} / {r_rob}")
    })?;
    Ok(format!("f_a {a_std} / {a_rob}, f_r {r_std:.4} / {r_rob:.4}"))
}

fn cover_size_monotonicity() -> Outcome {
    let ds = uniform_2d_dataset(200, 1).map_err(|e| e.to_string())?;
    let k = |eta: f64| -> Result<usize, String> {
        Ok(
            exact_min_cover(&build_adjacency(ds.points(), eta, Norm::L2), 20_000_000)
                .map_err(|e| e.to_string())?
                .len(),
        )
    };
    let diameter = mfc_core::metric::diameter(ds.points(), ds.class_indices(0), Norm::L2);
    let etas = [0.7, 0.5, 0.3, 0.1, 0.05];
    let sizes = etas.iter().map(|&e| k(e)).collect::<Result<Vec<_>, _>>()?;
    ensure(sizes.windows(2).all(|w| w[0] <= w[1]), || {
        format!("sizes {sizes:?} for eta {etas:?}")
    })?;
    let (at_diam, at_zero) = (k(diameter)?, k(0.0)?);
    ensure(at_diam == 1 && at_zero == 200, || {
        format!("k(diameter) = {at_diam}, k(0) = {at_zero}")
    })?;
    Ok(format!(
        "k over eta {etas:?} = {sizes:?}, k(diam) = 1, k(0) = 200"
    ))
}

fn pgd_vs_closed_form() -> Outcome {
    let mut rng = rng::stream(707);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let dim = rng.gen_range(1..=6);
        let w: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
        let model = LinearModel::binary(w, rng.gen::<f64>() - 0.5);
        let x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let label = rng.gen_range(0..2);
        let eps = rng.gen::<f64>();
        let cfg = AttackConfig::pgd(eps, Norm::LInf)
            .with_alpha(eps * (1.0 + rng.gen::<f64>()))
            .with_steps(rng.gen_range(1..5));
        let pgd = model.loss(&pgd_attack(&model, &x, label, &cfg), label);
        let exact = linear_worst_case_loss(&model, &x, label, eps, Norm::LInf).unwrap();
        worst = worst.max((pgd - exact).abs());
        ensure((pgd - exact).abs() <= 1e-9, || {
            format!("linear case {case}: pgd {pgd} vs exact {exact}")
        })?;
    }
    let mut excess = f64::NEG_INFINITY;
    for case in 0..100u64 {
        let dim = 1 + (case % 2) as usize;
        let mlp = Mlp::new(dim, 6, 2, case);
        let x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let label = rng.gen_range(0..2);
        let eps = 0.05 + 0.5 * rng.gen::<f64>();
        let norm = [Norm::L1, Norm::L2, Norm::LInf][rng.gen_range(0..3)];
        let pgd = mlp.loss(
            &pgd_attack(&mlp, &x, label, &AttackConfig::pgd(eps, norm).with_steps(20)),
            label,
        );
        let grid = mlp.loss(&grid_attack(&mlp, &x, label, eps, norm, 41).unwrap(), label);
        excess = excess.max(pgd - grid);
        ensure(pgd <= grid + 1e-6, || {
            format!("mlp case {case}: pgd {pgd} above grid {grid}")
        })?;
    }
    Ok(format!(
        "linear max deviation {worst:.1e}; mlp max pgd - grid {excess:.1e}"
    ))
}

fn kcenter_two_approximation() -> Outcome {
    let mut rng = rng::stream(808);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = rng.gen_range(4..=14);
        let ds = random_dataset(&mut rng, n, 2);
        let smallest = ds
            .present_classes()
            .iter()
            .map(|&c| ds.class_indices(c).len())
            .min()
            .unwrap();
        let k = rng.gen_range(1..=smallest);
        let spec = BaselineSpec::new(Method::KcenterGreedy, k, BudgetMode::PerClass, 0);
        let greedy = kcenter_greedy(&ds, &spec, Norm::L2).map_err(|e| e.to_string())?;
        let opt = solve_k_mcs_per_class(&ds, k, Norm::L2, DEFAULT_DELTA, &SolverConfig::exact())
            .map_err(|e| e.to_string())?;
        if opt.eta > 0.0 {
            worst = worst.max(greedy.eta / opt.eta);
        }
        ensure(greedy.eta <= 2.0 * opt.eta + 1e-12, || {
            format!(
                "case {case}: greedy {} vs optimal {} at k = {k}",
                greedy.eta, opt.eta
            )
        })?;
    }
    Ok(format!("50/50 within factor 2, worst ratio {worst:.3}"))
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn gradient_check() -> Outcome {
    let mut rng = rng::stream(909);
    let mut worst = 0.0f64;
    for case in 0..50u64 {
        let n = rng.gen_range(4..=12);
        let ds = random_dataset(&mut rng, n, 2);
        let model = LinearModel::random(2, 2, 1.5, case);
        let eps = 0.05 + 0.4 * rng.gen::<f64>();
        let norm = [Norm::L1, Norm::L2, Norm::LInf][(case % 3) as usize];
        let atk = AttackConfig::exact(eps, norm);
        let sol =
            solve_eta_mcs(&ds, rng.gen::<f64>(), norm, &SolverConfig::exact()).map_err(|e| e.to_string())?;
        let core = sol.coreset(&ds).map_err(|e| e.to_string())?;
        let runs = [
            (TrainConfig::standard(0.1, 1, 0), TrainData::Full(&ds)),
            (TrainConfig::adversarial(0.1, 1, 0, atk), TrainData::Full(&ds)),
            (
                TrainConfig::generalized(0.1, 1, 0, atk, ds.len()),
                TrainData::Coreset {
                    coreset: &core,
                    sol: &sol,
                },
            ),
        ];
        for (cfg, data) in runs {
            let (_, g) = objective_gradient(&model, data, &cfg).map_err(|e| e.to_string())?;
            let base = model.params();
            let fd: Vec<f64> = (0..base.len())
                .map(|i| {
                    let at = |h: f64| {
                        let mut m = model.clone();
                        let mut p = base.clone();
                        p[i] += h;
                        m.set_params(&p);
                        objective_value(&m, data, &cfg).unwrap()
                    };
                    (at(1e-6) - at(-1e-6)) / 2e-6
                })
                .collect();
            let err = relative_error(&g, &fd);
            worst = worst.max(err);
            ensure(err <= 1e-4, || {
                format!("case {case} {:?}: relative error {err:e}", cfg.objective)
            })?;
        }
    }
    Ok(format!("150 gradients, worst relative error {worst:.1e}"))
}

fn cli(args: &[&str]) -> Result<std::path::PathBuf, String> {
    use clap::Parser;
    let cli =
        Cli::try_parse_from(std::iter::once("mfc").chain(args.iter().copied())).map_err(|e| e.to_string())?;
    run(&cli).map_err(|e| e.to_string())
}

fn end_to_end_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (data, cover) = (p("blobs.csv"), p("cover.toml"));
    cli(&[
        "gen-data",
        "blobs",
        "--samples-per-class",
        "30",
        "--centers",
        "0,0;9,0",
        "--margin",
        "1",
        "--seed",
        "5",
        "--out",
        &data,
    ])?;
    let compress = cli(&[
        "compress", "--input", &data, "--norm", "l2", "--eta", "0.6", "--solver", "exact", "--out", &cover,
    ])?;
    let verify = cli(&[
        "verify-bound",
        "--dataset",
        &data,
        "--cover",
        &cover,
        "--eps",
        "0.5",
        "--models",
        "20",
        "--seed",
        "3",
    ])?;
    let mut checked = Vec::new();
    for original in [compress, verify] {
        let before = RunReport::read(&original).map_err(|e| e.to_string())?;
        let replayed = cli(&["replay", "--report", original.to_str().unwrap()])?;
        let after = RunReport::read(&replayed).map_err(|e| e.to_string())?;
        ensure(before.payload() == after.payload(), || {
            format!("{} payload changed", before.command)
        })?;
        ensure(before.config == after.config, || {
            format!("{} config changed", before.command)
        })?;
        checked.push(format!("{} ({} bytes)", before.command, before.payload().len()));
    }
    let report = RunReport::read(Path::new(&(cover.clone() + ".bound.json"))).map_err(|e| e.to_string())?;
    ensure(report.results["holds_for_all"] == true, || {
        "bound failed on blobs".into()
    })?;
    Ok(format!("byte-identical payloads for {}", checked.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact solver matches exhaustive search", exact_solver_oracle),
        (
            "radius bisection matches brute-force k-cover",
            bisection_correctness,
        ),
        ("coreset loss bound holds", bound_certification),
        ("l2 volume-matching radii", volume_anchors),
        ("trade-off example accuracies", tradeoff_example),
        ("cover size monotone in radius", cover_size_monotonicity),
        ("PGD against closed form and grid", pgd_vs_closed_form),
        ("k-center greedy within factor 2", kcenter_two_approximation),
        ("objective gradients match finite differences", gradient_check),
        ("replayed runs reproduce payloads", end_to_end_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.2}s] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.2}s] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
