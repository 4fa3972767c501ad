//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use ro_stability::geometry::{contains_origin_interior, hausdorff, inradius_at_origin, Polytope};
use ro_stability::harness::cli;
use ro_stability::harness::experiments::{convergence_along, degenerate_edge_instance, run_convergence_suite, run_perturbation_suite};
use ro_stability::harness::instances::{random_certified_instance, InstanceSpec};
use ro_stability::harness::io::{problem_to_json, ExperimentConfig};
use ro_stability::harness::perturb::{perturb_problem, PerturbationKind};
use ro_stability::lp::{solve, LinearProgram, Row, Status};
use ro_stability::model::{delta_sigma, robust_counterpart, Constraint, LsioProblem};
use ro_stability::setdist::{check_eps_argmin_lipschitz, eps_argmin};
use ro_stability::stability::{augmented_counterpart, bd_solvable_terms, build_h, distance_to_infeasibility, lipschitz_constant};
use ro_stability::transform::{sample_index_points, verify_transform_distance, SamplePlan};
use ro_stability::Tolerances;

use common::{exact_status, grid_dist_origin_to_h, sweep_inradius, ExactStatus};

type Outcome = Result<String, String>;

const KINDS: [PerturbationKind; 4] =
    [PerturbationKind::Translate, PerturbationKind::Scale, PerturbationKind::VertexJitter, PerturbationKind::ShrinkToPoint];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_points(r: &mut ChaCha8Rng, count: usize, dim: usize, scale: f64, offset: &[f64]) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|k| offset[k] + scale * r.random_range(-1.0..1.0)).collect()).collect()
}

fn c1_example() -> Outcome {
    let s1 = vec![Constraint::new("1", vec![1.0, 0.0], 0.0), Constraint::new("2", vec![0.0, 1.0], 0.0)];
    let swapped = vec![Constraint::new("1", vec![0.0, 1.0], 0.0), Constraint::new("2", vec![1.0, 0.0], 0.0)];
    let start = Instant::now();
    let matched = delta_sigma(&s1, &s1.clone()).map_err(|e| e.to_string())?;
    let swap = delta_sigma(&s1, &swapped).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(matched == 0.0, || format!("matched indexing gave {matched}"))?;
    ensure((swap - 2f64.sqrt()).abs() <= 1e-12, || format!("swapped indexing gave {swap}"))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("matched 0, swapped {swap:.15}"))
}

fn c2_transform() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let nu = r.random_range(1..=8);
        let nv = r.random_range(1..=8);
        let u = Polytope::new(random_points(&mut r, nu, 2, 1.0, &[0.0, 0.0])).unwrap();
        let shift = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
        let v = Polytope::new(random_points(&mut r, nv, 2, 1.0, &shift)).unwrap();
        let b: f64 = r.random_range(-2.0..2.0);
        let plan = SamplePlan { seed: trial, ..SamplePlan::default() };
        let check = verify_transform_distance(&u, &v, b, 1.0, &plan, &tol).map_err(|e| e.to_string())?;
        let points = sample_index_points(&u, &v, &plan, 0, &tol).map_err(|e| e.to_string())?;
        let verts: Vec<Vec<f64>> = u.vertices().iter().chain(v.vertices()).cloned().collect();
        ensure(points[..verts.len()] == verts[..], || format!("trial {trial}: vertices not evaluated first"))?;
        let h = hausdorff(&u, &v).unwrap();
        let gap = (check.report.measured - h).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-6, || format!("trial {trial}: measured {} vs d_H {h}", check.report.measured))?;
    }
    Ok(format!("100 pairs, max |measured - d_H| = {worst:.2e}"))
}

fn c3_lipschitz() -> Outcome {
    let tol = Tolerances::default();
    let mut total = 0;
    let mut min_margin = f64::INFINITY;
    for n in 1..=3usize {
        for inst in 0..20u64 {
            let mut r = rng(3000 + 100 * n as u64 + inst);
            let (rp, _) = random_certified_instance(&mut r, &InstanceSpec::new(n), None, &tol).map_err(|e| e.to_string())?;
            for (k, kind) in KINDS.into_iter().enumerate() {
                let mut cfg = ExperimentConfig::new(&rp);
                cfg.seed = 17 * inst + k as u64;
                cfg.trials = 42;
                cfg.perturbation_kind = kind;
                cfg.relative_magnitudes = true;
                cfg.magnitude_schedule = vec![0.9, 0.5, 0.1, 1e-2, 1e-3, 1e-4];
                let rep = run_perturbation_suite(&rp, &cfg, &tol).map_err(|e| format!("n={n} inst={inst} {kind:?}: {e}"))?;
                total += rep.records.len();
                ensure(rep.pass, || format!("n={n} inst={inst} {kind:?}: {} of {} passed", rep.summary["passed"], rep.records.len()))?;
                let l = rep.summary["L"].as_f64().unwrap();
                let slope = rep.summary["maxSlope"].as_f64().unwrap();
                ensure(slope <= l, || format!("n={n} inst={inst} {kind:?}: slope {slope} > L {l}"))?;
                min_margin = min_margin.min(l - slope);
            }
        }
    }
    ensure(total >= 10_000, || format!("only {total} trials"))?;
    Ok(format!("{total} trials pass, min (L - slope) = {min_margin:.3e}"))
}

fn relabelled(p: &LsioProblem, r: &mut ChaCha8Rng) -> LsioProblem {
    let mut rows: Vec<(Vec<f64>, f64)> = p.constraints.iter().map(|c| (c.a.clone(), c.b)).collect();
    let dups: Vec<(Vec<f64>, f64)> = rows.iter().filter(|_| r.random::<bool>()).cloned().collect();
    rows.extend(dups);
    for i in (1..rows.len()).rev() {
        rows.swap(i, r.random_range(0..=i));
    }
    LsioProblem::from_rows(p.cost.clone(), &rows).unwrap()
}

fn c4_invariance() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 3;
        let (rp, ctx) = random_certified_instance(&mut r, &InstanceSpec::new(n), None, &tol).map_err(|e| e.to_string())?;
        let p = &ctx.augmented.problem;
        let eps = ctx.constants.epsilon;
        let base = lipschitz_constant(p, Some(eps), &tol).map_err(|e| e.to_string())?;
        for _ in 0..2 {
            let q = relabelled(p, &mut r);
            let other = lipschitz_constant(&q, Some(eps), &tol).map_err(|e| e.to_string())?;
            for ((name, a), (_, b)) in base.fields().iter().zip(other.fields().iter()) {
                let d = (a - b).abs();
                worst = worst.max(d);
                ensure(d <= 1e-12, || format!("instance {i} (n={}): {name} {a} vs {b}", rp.n()))?;
            }
        }
    }
    Ok(format!("100 problems x 2 copies, max field difference {worst:.1e}"))
}

fn slater_system(r: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Constraint> {
    let x0: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    (0..m)
        .map(|t| {
            let a: Vec<f64> = (0..n).map(|_| StandardNormal.sample(r)).collect();
            let slack = r.random_range(0.1..1.0);
            let b = common::dot(&a, &x0) - slack;
            Constraint::new(t.to_string(), a, b)
        })
        .collect()
}

fn feasible(system: &[Constraint], shift: &[f64], tol: &Tolerances) -> bool {
    let n = shift.len() - 1;
    let rows = system.iter().map(|c| Row::new(c.a.iter().zip(shift).map(|(a, w)| a - w).collect(), c.b - shift[n])).collect();
    let lp = LinearProgram::new(vec![0.0; n], rows);
    solve(&lp, tol).expect("feasibility LP").status != Status::Infeasible
}

/// Smallest uniform row shift `s w` that makes the system infeasible. Each
/// direction aims at a random perturbation known to break feasibility, so
/// feasibility along the segment is monotone and bisection applies.
fn bisection_oracle(system: &[Constraint], r: &mut ChaCha8Rng, tol: &Tolerances) -> f64 {
    let gens: Vec<Vec<f64>> = system.iter().map(Constraint::stacked).collect();
    let dim = gens[0].len();
    let threshold = |w: &[f64], upper: f64| -> Option<f64> {
        let scaled = |s: f64| w.iter().map(|x| x * s).collect::<Vec<_>>();
        if feasible(system, &scaled(upper), tol) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, upper);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if feasible(system, &scaled(mid), tol) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    };
    let unit = |v: Vec<f64>| {
        let l = common::norm(&v);
        (v.into_iter().map(|x| x / l).collect::<Vec<f64>>(), l)
    };
    let mut best = f64::INFINITY;
    let mut best_w = vec![0.0; dim];
    for _ in 0..1000 {
        let weights: Vec<f64> = (0..gens.len()).map(|_| -r.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = weights.iter().sum();
        let mut p = vec![0.0; dim];
        for (g, wt) in gens.iter().zip(&weights) {
            for (pk, gk) in p.iter_mut().zip(g) {
                *pk += gk * wt / total;
            }
        }
        p[dim - 1] -= 1e-6 - r.random::<f64>().max(1e-300).ln();
        let (w, len) = unit(p);
        if let Some(s) = threshold(&w, len.min(best)) {
            best = s;
            best_w = w;
        }
    }
    let mut step = 0.3;
    for _ in 0..1000 {
        let (w, _) = unit(
            best_w
                .iter()
                .map(|x| {
                    let z: f64 = StandardNormal.sample(r);
                    x + step * z
                })
                .collect(),
        );
        match threshold(&w, best) {
            Some(s) if s < best => {
                best = s;
                best_w = w;
            }
            _ => step = (step * 0.97f64).max(1e-3),
        }
    }
    best
}

fn c5_dist_infeas() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(5);
    let mut worst_grid = 0.0f64;
    let mut count = 0;
    for n in 1..=2 {
        for m in 1..=4 {
            for _ in 0..5 {
                let sys = slater_system(&mut r, n, m);
                let qp = distance_to_infeasibility(n, &sys, &tol).map_err(|e| e.to_string())?;
                let gens: Vec<Vec<f64>> = sys.iter().map(Constraint::stacked).collect();
                let grid = grid_dist_origin_to_h(&gens);
                worst_grid = worst_grid.max((qp - grid).abs());
                ensure((qp - grid).abs() <= 1e-4, || format!("n={n} m={m}: QP {qp} vs grid {grid}"))?;
                count += 1;
            }
        }
    }
    let mut worst_rel = 0.0f64;
    for i in 0..20 {
        // With m <= n the set H has no interior and the breaking shifts
        // form a null set of directions.
        let n = 1 + i % 2;
        let m = n + 1 + (i / 2) % 2;
        let sys = slater_system(&mut r, n, m);
        let qp = distance_to_infeasibility(n, &sys, &tol).map_err(|e| e.to_string())?;
        let search = bisection_oracle(&sys, &mut r, &tol);
        let rel = (search - qp).abs() / qp;
        worst_rel = worst_rel.max(rel);
        ensure(rel <= 0.05, || format!("instance {i}: QP {qp} vs perturbation search {search}"))?;
    }
    ensure(build_h(&[]).is_err(), || "empty system accepted".into())?;
    Ok(format!("{count} grid systems (max diff {worst_grid:.1e}), 20 bisection searches (max rel {worst_rel:.1e})"))
}

fn c6_inradius() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(6);
    let mut done = 0;
    let mut worst = 0.0f64;
    while done < 50 {
        let dim = 2 + done % 2;
        let count = r.random_range(dim + 2..=12);
        let offset: Vec<f64> = (0..dim).map(|_| r.random_range(-0.3..0.3)).collect();
        let p = Polytope::new(random_points(&mut r, count, dim, 1.0, &offset)).unwrap();
        if !contains_origin_interior(&p, &tol).map_err(|e| e.to_string())?.interior {
            continue;
        }
        let value = inradius_at_origin(&p, &tol).map_err(|e| e.to_string())?;
        ensure(!value.estimated, || format!("polytope {done}: exact path not taken"))?;
        let oracle = sweep_inradius(p.vertices());
        worst = worst.max((value.value - oracle).abs());
        ensure((value.value - oracle).abs() <= 1e-6, || format!("polytope {done} (dim {dim}): {} vs sweep {oracle}", value.value))?;
        done += 1;
    }
    Ok(format!("50 polytopes, max diff {worst:.1e}"))
}

fn c7_closedness() -> Outcome {
    let tol = Tolerances::default();
    let (u, seq) = degenerate_edge_instance(0.1, 20).map_err(|e| e.to_string())?;
    let out = convergence_along(&u, &seq, 1e-4, &tol).map_err(|e| e.to_string())?;
    ensure(out.pass(), || format!("degenerate edge: {:?}", out.records.last()))?;
    let mut worst_final = out.records.last().unwrap().dist_to_fopt_u;
    for s in 0..19u64 {
        let n = 1 + (s as usize) % 3;
        let mut r = rng(7000 + s);
        let (rp, _) = random_certified_instance(&mut r, &InstanceSpec::new(n), None, &tol).map_err(|e| e.to_string())?;
        let mut cfg = ExperimentConfig::new(&rp);
        cfg.seed = s;
        cfg.perturbation_kind = [PerturbationKind::Translate, PerturbationKind::VertexJitter, PerturbationKind::Scale][s as usize % 3];
        cfg.relative_magnitudes = true;
        cfg.magnitude_schedule = vec![0.5];
        cfg.steps = 20;
        let (_, out) = run_convergence_suite(&rp, &cfg, &tol).map_err(|e| format!("sequence {s}: {e}"))?;
        ensure(out.converged, || {
            format!("sequence {s}: first {} last {}", out.records[0].dist_to_fopt_u, out.records.last().unwrap().dist_to_fopt_u)
        })?;
        ensure(out.usc_holds, || format!("sequence {s}: USC excess {:?}", out.records.iter().map(|r| r.usc_excess).collect::<Vec<_>>()))?;
        worst_final = worst_final.max(out.records.last().unwrap().dist_to_fopt_u);
    }
    Ok(format!("20 sequences converge, max final distance {worst_final:.1e}"))
}

fn c8_eps_argmin() -> Outcome {
    let tol = Tolerances::default();
    let mut trials = 0;
    let mut inst = 0u64;
    let mut max_ratio = 0.0f64;
    while trials < 200 {
        let n = 1 + (inst as usize) % 2;
        let mut r = rng(8000 + inst);
        inst += 1;
        let (rp, _) = random_certified_instance(&mut r, &InstanceSpec::new(n), None, &tol).map_err(|e| e.to_string())?;
        let aug = augmented_counterpart(&rp, &tol).map_err(|e| e.to_string())?;
        let eta = 0.5 * bd_solvable_terms(&aug.problem, &tol).map_err(|e| e.to_string())?.value();
        let pu = robust_counterpart(&rp).unwrap();
        for (e1, e2) in [(0.1, 0.5), (0.5, 1.0)] {
            let small = eps_argmin(&pu, e1, &tol).map_err(|e| e.to_string())?.to_polytope(&tol).map_err(|e| e.to_string())?;
            let large = eps_argmin(&pu, e2, &tol).map_err(|e| e.to_string())?;
            ensure(small.vertices().iter().all(|x| large.contains(x, 1e-8)), || format!("instance {inst}: eps-argmin not monotone"))?;
        }
        for k in 0..10 {
            let kind = KINDS[k % 4];
            let m = eta * [0.5, 0.1, 0.01][k % 3];
            let v = perturb_problem(&rp, kind, m, &mut r).map_err(|e| e.to_string())?;
            let c =
                check_eps_argmin_lipschitz(&rp, &v, eta, 0.5, None, None, &tol).map_err(|e| format!("instance {inst} trial {k}: {e}"))?;
            ensure(c.report.pass, || format!("instance {inst} trial {k}: {} > {}", c.report.measured, c.report.bound))?;
            ensure(c.d_hat.lower_bound <= c.hausdorff + 1e-9, || {
                format!("instance {inst} trial {k}: d_hat {} > d_H {}", c.d_hat.lower_bound, c.hausdorff)
            })?;
            if c.report.bound > 0.0 {
                max_ratio = max_ratio.max(c.report.measured / c.report.bound);
            }
            trials += 1;
        }
    }
    Ok(format!("{trials} trials pass, max measured/bound = {max_ratio:.2e}"))
}

fn c9_lp() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(9);
    let mut statuses = [0usize; 3];
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = r.random_range(1..=5);
        let m = r.random_range(1..=12);
        let cost: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        let mut rows: Vec<Row> =
            (0..m).map(|_| Row::new((0..n).map(|_| StandardNormal.sample(&mut r)).collect(), StandardNormal.sample(&mut r))).collect();
        if i % 2 == 0 {
            for k in 0..n {
                for s in [1.0, -1.0] {
                    let mut a = vec![0.0; n];
                    a[k] = s;
                    rows.push(Row::new(a, -5.0));
                }
            }
        }
        let lp = LinearProgram::new(cost.clone(), rows.clone());
        let res = solve(&lp, &tol).map_err(|e| format!("LP {i}: {e}"))?;
        let residual = match res.status {
            Status::Optimal => {
                statuses[0] += 1;
                let x = res.solution.as_ref().unwrap();
                let y = res.dual.as_ref().ok_or(format!("LP {i}: no dual"))?;
                let mut atc = cost.iter().map(|c| -c).collect::<Vec<f64>>();
                for (row, yt) in rows.iter().zip(y) {
                    for (k, a) in row.a.iter().enumerate() {
                        atc[k] += yt * a;
                    }
                }
                let primal = rows.iter().map(|row| (row.b - common::dot(&row.a, x)).max(0.0)).fold(0.0, f64::max);
                let neg = y.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
                let by: f64 = rows.iter().zip(y).map(|(row, yt)| row.b * yt).sum();
                let weak = (by - common::dot(&cost, x)).max(0.0);
                atc.iter().map(|v| v.abs()).fold(primal.max(neg).max(weak), f64::max)
            }
            Status::Infeasible => {
                statuses[1] += 1;
                let y = res.farkas.as_ref().ok_or(format!("LP {i}: no Farkas certificate"))?;
                let mut aty = vec![0.0; n];
                for (row, yt) in rows.iter().zip(y) {
                    for (k, a) in row.a.iter().enumerate() {
                        aty[k] += yt * a;
                    }
                }
                let by: f64 = rows.iter().zip(y).map(|(row, yt)| row.b * yt).sum();
                ensure(by > 0.0, || format!("LP {i}: Farkas b.y = {by}"))?;
                let neg = y.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
                aty.iter().map(|v| v.abs()).fold(neg, f64::max)
            }
            Status::Unbounded => {
                statuses[2] += 1;
                let d = res.ray.as_ref().ok_or(format!("LP {i}: no ray"))?;
                let l = common::norm(d);
                ensure(common::dot(&cost, d) / l < 0.0, || format!("LP {i}: ray is not a descent direction"))?;
                rows.iter().map(|row| (-common::dot(&row.a, d) / l).max(0.0)).fold(0.0, f64::max)
            }
        };
        worst = worst.max(residual);
        ensure(residual <= 1e-8, || format!("LP {i} ({:?}): residual {residual:e}", res.status))?;
    }
    let mut exact_counts = [0usize; 3];
    for i in 0..100 {
        let n = r.random_range(1..=3);
        let m = r.random_range(1..=6);
        let c: Vec<i64> = (0..n).map(|_| r.random_range(-3..=3)).collect();
        let rows: Vec<(Vec<i64>, i64)> =
            (0..m).map(|_| ((0..n).map(|_| r.random_range(-3..=3)).collect(), r.random_range(-3..=3))).collect();
        let expected = exact_status(&c, &rows);
        let lp = LinearProgram::new(
            c.iter().map(|v| *v as f64).collect(),
            rows.iter().map(|(a, b)| Row::new(a.iter().map(|v| *v as f64).collect(), *b as f64)).collect(),
        );
        let got = solve(&lp, &tol).map_err(|e| e.to_string())?.status;
        let expected_status = match expected {
            ExactStatus::Optimal => Status::Optimal,
            ExactStatus::Infeasible => Status::Infeasible,
            ExactStatus::Unbounded => Status::Unbounded,
        };
        exact_counts[expected as usize] += 1;
        ensure(got == expected_status, || format!("integer LP {i}: {got:?}, exact {expected:?}; c={c:?} rows={rows:?}"))?;
    }
    Ok(format!("1000 LPs (opt/inf/unb {statuses:?}) max residual {worst:.1e}; 100 integer LPs match exact status ({exact_counts:?})"))
}

fn c10_determinism() -> Outcome {
    let tol = Tolerances::default();
    let (rp, _) = random_certified_instance(&mut rng(10), &InstanceSpec::new(2), None, &tol).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("problem.json"), problem_to_json(&rp)).unwrap();
    let config = r#"{"seed": 42, "trials": 64, "perturbationKind": "vertexJitter", "relativeMagnitudes": true,
        "magnitudeSchedule": [0.5, 0.05], "problemPath": "problem.json"}"#;
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, config).unwrap();
    let run = |threads: usize, out: &str| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = dir.path().join(out);
        let args = ["ro-stability", "perturb", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "json"];
        let (code, stdout) = pool.install(|| cli::run(args));
        (code, stdout, std::fs::read(out).unwrap())
    };
    let (c1, s1, f1) = run(1, "a.json");
    let (c2, s2, f2) = run(4, "b.json");
    ensure(c1 == 0 && c2 == 0, || format!("exit codes {c1}, {c2}: {s1}"))?;
    ensure(s1 == s2, || "stdout reports differ".into())?;
    ensure(f1 == f2, || "report files differ".into())?;
    ensure(f1 == s1.as_bytes(), || "report file differs from stdout".into())?;
    Ok(format!("two runs (1 and 4 threads), {} identical bytes", f1.len()))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("delta_sigma indexing example", 1, c1_example),
        ("transformation identity", 5_000, c2_transform),
        ("value Lipschitz certification", 60_000, c3_lipschitz),
        ("constant invariance", 5_000, c4_invariance),
        ("distance to infeasibility oracles", 30_000, c5_dist_infeas),
        ("inradius vs direction sweep", 10_000, c6_inradius),
        ("closedness and USC", 30_000, c7_closedness),
        ("eps-argmin bound", 60_000, c8_eps_argmin),
        ("LP solver soundness", 30_000, c9_lp),
        ("determinism", 60_000, c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit_ms, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        // The first criterion times its own call; the others include setup.
        let over = i > 0 && elapsed > Duration::from_millis(*limit_ms);
        match (outcome, over) {
            (Ok(detail), false) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", i + 1, elapsed),
            (Ok(detail), true) => {
                failed += 1;
                println!("FAIL {:>2} {name}: runtime {:.2?} over {limit_ms} ms ({detail})", i + 1, elapsed);
            }
            (Err(msg), _) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{:.2?}]", i + 1, elapsed);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
