//! Acceptance criteria. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any criterion fails.

mod common;

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use common::{norm, norm_inf, signs, Dense};
use ql1::bench::{dolan_more_matrix, pareto_points, run_suite, SuiteOptions, SuiteResult};
use ql1::probgen::{
    desk_suite, gen_elastic_net, gen_sigrec, gen_strict_comp, read_problem, read_problem_bytes, write_problem_bytes,
    write_suite, ManifestEntry, Rng,
};
use ql1::solver::{AlphaBalance, AlphaPolicy, Algorithm, RunStatus, RunTrace, SolverConfig, StepKind, Termination};
use ql1::steps::ista_step;
use ql1::QuadraticProblem;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        let detail = match failures.first() {
            None => summary,
            Some(first) => format!("{summary}; {} failure(s), first: {first}", failures.len()),
        };
        Self {
            pass: failures.is_empty(),
            detail,
        }
    }
}

// ---------------------------------------------------------------------------
// 1: prox step against a brute-force grid

fn criterion_prox_grid() -> Outcome {
    let start = Instant::now();
    let mut rng = Rng::new(20_240_501);
    let h = 1e-4;
    let mut failures = Vec::new();
    for trial in 0..10_000 {
        let x = if rng.uniform() < 0.3 { 0.0 } else { 2.0 * rng.normal() };
        let g = 2.0 * rng.normal();
        let tau = rng.uniform();
        let alpha = 0.05 + rng.uniform();
        let model = |z: f64| g * (z - x) + (z - x).powi(2) / (2.0 * alpha) + tau * z.abs();

        let lo = (x - alpha * (g + tau)).min(0.0) - 10.0 * h;
        let hi = (x - alpha * (g - tau)).max(0.0) + 10.0 * h;
        let steps = ((hi - lo) / h).ceil() as usize;
        let mut best = (0.0, model(0.0));
        for k in 0..=steps {
            let z = lo + k as f64 * h;
            let m = model(z);
            if m < best.1 {
                best = (z, m);
            }
        }
        let z = ista_step(&[x], &[g], tau, alpha).unwrap()[0];
        if (z - best.0).abs() > h || model(z) > best.1 + 1e-12 {
            failures.push(format!("trial {trial}: step {z}, grid {}", best.0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        failures.push(format!("took {secs:.1}s"));
    }
    Outcome::new(&failures, format!("10000 coordinates, {secs:.2}s"))
}

// ---------------------------------------------------------------------------
// 2-4: theory-mode runs on small SPD instances

struct TheoryCase {
    name: String,
    oracle: Dense,
    f_star: f64,
    traces: Vec<RunTrace>,
}

impl TheoryCase {
    /// min(c, 1/(8L)) with c = 1/(8L).
    fn beta(&self) -> f64 {
        1.0 / (8.0 * self.oracle.lambda_max)
    }

    /// Objective at `x⁰, x¹, …`, recomputed by the oracle.
    fn f_sequence(&self, t: &RunTrace) -> Vec<f64> {
        std::iter::once(self.oracle.objective(&t.initial_x))
            .chain(t.records.iter().map(|r| self.oracle.objective(r.x.as_ref().unwrap())))
            .collect()
    }

    fn points<'a>(&self, t: &'a RunTrace) -> Vec<&'a [f64]> {
        std::iter::once(t.initial_x.as_slice())
            .chain(t.records.iter().map(|r| r.x.as_deref().unwrap()))
            .collect()
    }
}

fn theory_problems() -> Vec<(String, QuadraticProblem)> {
    let mut out = Vec::new();
    for s in 0..25u64 {
        let n = 10 + (s as usize * 7) % 41;
        let nnz = (n / 4 + s as usize % 5).max(1);
        let cond = 10f64.powi(1 + (s % 3) as i32);
        let tau = 0.05 + 0.02 * s as f64;
        let inst = gen_strict_comp(n, nnz, cond, tau, 0.2, 500 + s).unwrap();
        out.push((format!("strict{s}"), inst.problem));
    }
    for s in 0..25u64 {
        let m = 20 + 10 * (s as usize % 3);
        let n = 15 + s as usize;
        let gamma = [0.05, 0.2, 1.0][s as usize % 3];
        let frac = [0.05, 0.2, 0.5][(s as usize / 3) % 3];
        let base = gen_elastic_net(m, n, 1.0, gamma, 0.0, 600 + s).unwrap().problem;
        let tau = frac * norm_inf(&base.b);
        let p = QuadraticProblem::new(base.op.clone(), base.b.clone(), tau).unwrap();
        out.push((format!("enet{s}"), p));
    }
    out
}

fn theory_cases() -> &'static Vec<TheoryCase> {
    static CASES: OnceLock<Vec<TheoryCase>> = OnceLock::new();
    CASES.get_or_init(|| {
        theory_problems()
            .into_iter()
            .map(|(name, problem)| {
                let oracle = Dense::from_problem(&problem);
                let l = oracle.lambda_max;
                let traces: Vec<RunTrace> = [Algorithm::Iicg1, Algorithm::Iicg2]
                    .into_iter()
                    .map(|alg| {
                        let cfg = SolverConfig {
                            alpha_policy: AlphaPolicy::ConstantInvL,
                            lipschitz: Some(l),
                            c: 1.0 / (8.0 * l),
                            alpha_bal: AlphaBalance::Fixed(1.0 / l),
                            theory_checks: true,
                            termination: Termination::SubgradientNorm,
                            tol: 1e-12,
                            mv_budget: 200_000,
                            ..SolverConfig::new(alg)
                        };
                        ql1::solve(&problem, &cfg).unwrap()
                    })
                    .collect();
                let (_, f_cd) = oracle.coordinate_descent();
                let f_star = traces
                    .iter()
                    .flat_map(|t| t.records.iter().map(|r| oracle.objective(r.x.as_ref().unwrap())))
                    .fold(f_cd, f64::min);
                TheoryCase {
                    name,
                    oracle,
                    f_star,
                    traces,
                }
            })
            .collect()
    })
}

const SLACK: f64 = 1e-10;

fn criterion_lemmas() -> Outcome {
    let start = Instant::now();
    let cases = theory_cases();
    let mut failures = Vec::new();
    let (mut n_ista, mut n_sub, mut n_phi, mut n_cg) = (0, 0, 0, 0);
    for case in cases {
        let o = &case.oracle;
        let alpha = 1.0 / o.lambda_max;
        let lam = o.lambda_min;
        if lam <= 0.0 {
            failures.push(format!("{}: not positive definite", case.name));
            continue;
        }
        for t in &case.traces {
            let f = case.f_sequence(t);
            let xs = case.points(t);
            for (k, x) in xs.iter().enumerate() {
                n_phi += 1;
                let (psi, phi) = (norm(&o.psi(x, alpha)), norm(&o.phi(x)));
                if psi > phi + SLACK {
                    failures.push(format!("{} {} k={k}: ‖ψ‖={psi:e} > ‖φ‖={phi:e}", case.name, t.algorithm));
                }
            }
            for (k, r) in t.records.iter().enumerate() {
                let (before, after) = (f[k] - case.f_star, f[k + 1] - case.f_star);
                match r.step {
                    StepKind::Ista => {
                        n_ista += 1;
                        if after > (1.0 - lam * alpha) * before + SLACK {
                            failures.push(format!("{} {} ista k={}: {after:e} vs {before:e}", case.name, t.algorithm, k + 1));
                        }
                    }
                    StepKind::SubIsta => {
                        n_sub += 1;
                        let (w, p) = (norm(&o.omega(xs[k])), norm(&o.psi(xs[k], alpha)));
                        if w > p {
                            failures.push(format!("{} subspace step without balance at k={k}", case.name));
                        }
                        if after > (1.0 - 0.5 * lam * alpha) * before + SLACK {
                            failures.push(format!("{} {} subista k={}: {after:e} vs {before:e}", case.name, t.algorithm, k + 1));
                        }
                    }
                    StepKind::Cg => {
                        n_cg += 1;
                        let v = norm(&o.v(xs[k]));
                        if f[k + 1] > f[k] - case.beta() * v * v + SLACK {
                            failures.push(format!("{} {} cg k={}: F {} -> {}", case.name, t.algorithm, k + 1, f[k], f[k + 1]));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        failures.push(format!("took {secs:.1}s"));
    }
    Outcome::new(
        &failures,
        format!(
            "{} instances, {n_ista} ista / {n_sub} subspace / {n_cg} cg steps, {n_phi} iterates, {secs:.1}s",
            cases.len()
        ),
    )
}

fn criterion_two_step() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for case in theory_cases() {
        let rate = 1.0 - case.oracle.lambda_min * case.beta() / 2.0;
        for t in &case.traces {
            let f = case.f_sequence(t);
            for k in 0..f.len().saturating_sub(2) {
                checked += 1;
                let lhs = f[k + 2] - case.f_star;
                let rhs = rate * (f[k] - case.f_star) + SLACK;
                if lhs > rhs {
                    failures.push(format!("{} {} k={k}: {lhs:e} > {rhs:e}", case.name, t.algorithm));
                }
            }
        }
    }
    Outcome::new(&failures, format!("{checked} two-step pairs"))
}

fn criterion_work_bound() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for case in theory_cases() {
        let rate = 1.0 - case.oracle.lambda_min * case.beta() / 2.0;
        // Absolute gap and relative accuracy, each against its own bound.
        let targets = [("absolute", 1e-6), ("relative", 1e-6 * case.f_star.abs().max(1e-12))];
        for t in &case.traces {
            let f = case.f_sequence(t);
            let gap0 = f[0] - case.f_star;
            for (kind, eps) in targets {
                let bound = if gap0 <= eps { 0.0 } else { (eps / gap0).ln() / rate.sqrt().ln() };
                let mv = match f.iter().position(|v| v - case.f_star <= eps) {
                    Some(0) => 0,
                    Some(k) => t.records[k - 1].mv - t.initial_mv,
                    None => {
                        failures.push(format!("{} {} ({kind}): never reached eps", case.name, t.algorithm));
                        continue;
                    }
                };
                if mv as f64 > bound {
                    failures.push(format!("{} {} ({kind}): {mv} MV > bound {bound:.1}", case.name, t.algorithm));
                } else if bound > 0.0 {
                    worst = worst.max(mv as f64 / bound);
                }
            }
        }
    }
    Outcome::new(&failures, format!("largest MV/bound ratio {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// 5: finite identification on strictly complementary instances

fn criterion_termination() -> Outcome {
    let mut failures = Vec::new();
    let mut max_v: f64 = 0.0;
    for s in 0..100u64 {
        let cond = 10f64.powi(1 + (s % 4) as i32);
        let nnz = 5 + (s as usize * 7) % 50;
        let tau = 0.01 * (1 + s % 10) as f64;
        let inst = gen_strict_comp(100, nnz, cond, tau, 0.2, 1000 + s).unwrap();
        let x_star = inst.x_star.clone().unwrap();
        let o = Dense::from_problem(&inst.problem);
        let g_star = o.grad(&x_star);
        let margin = (0..100)
            .filter(|i| x_star[*i] == 0.0)
            .map(|i| tau - g_star[i].abs())
            .fold(f64::INFINITY, f64::min);
        if norm_inf(&o.v(&x_star)) > 1e-10 || margin < 0.1 * tau {
            failures.push(format!("seed {s}: generated instance violates its invariants"));
            continue;
        }
        let v0 = norm_inf(&o.v(&vec![0.0; 100]));
        for alg in [Algorithm::Iicg1, Algorithm::Iicg2] {
            let cfg = SolverConfig {
                tol: 0.5e-10 / v0.max(1.0),
                theory_checks: true,
                ..SolverConfig::new(alg)
            };
            let t = ql1::solve(&inst.problem, &cfg).unwrap();
            let v = norm_inf(&o.v(&t.final_x));
            max_v = max_v.max(v);
            if t.status != RunStatus::Converged || v > 1e-10 {
                failures.push(format!("seed {s} {alg}: status {:?}, ‖v‖∞ = {v:e}", t.status));
                continue;
            }
            if signs(&t.final_x) != signs(&x_star) {
                failures.push(format!("seed {s} {alg}: final sign pattern differs from x*"));
            }
            let end = t.records.iter().rposition(|r| r.step.is_cg_phase());
            if let Some(end) = end {
                let begin = t.records[..end].iter().rposition(|r| !r.step.is_cg_phase()).map_or(0, |i| i + 1);
                let first = signs(t.records[begin].x.as_ref().unwrap());
                if t.records[begin..=end].iter().any(|r| signs(r.x.as_ref().unwrap()) != first) {
                    failures.push(format!("seed {s} {alg}: sign pattern changes inside the last CG phase"));
                }
            }
        }
    }
    Outcome::new(&failures, format!("100 instances x 2 variants, max ‖v‖∞ {max_v:.1e}"))
}

// ---------------------------------------------------------------------------
// 6-8: desk-scale suite and tooling

struct Suite {
    _dir: tempfile::TempDir,
    base: PathBuf,
    entries: Vec<ManifestEntry>,
    result: SuiteResult,
}

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let entries = desk_suite().unwrap();
        let manifest = write_suite(dir.path(), &entries).unwrap();
        let entries = ql1::probgen::read_manifest(&manifest).unwrap();
        let opts = SuiteOptions {
            tols: vec![1e-4, 1e-10],
            ..Default::default()
        };
        let result = run_suite(&entries, dir.path(), &opts).unwrap();
        Suite {
            base: dir.path().to_path_buf(),
            _dir: dir,
            entries,
            result,
        }
    })
}

fn criterion_cross_agreement() -> Outcome {
    let s = suite();
    let mut failures = Vec::new();
    let tol = 1e-4;
    for e in &s.entries {
        let rows: Vec<_> = s.result.rows.iter().filter(|r| r.problem == e.id).collect();
        if rows.iter().any(|r| r.is_error()) {
            failures.push(format!("{}: {}", e.id, rows[0].status));
            continue;
        }
        let accs: Vec<f64> = rows.iter().filter(|r| r.tol == tol && r.mv.is_some()).map(|r| r.accuracy).collect();
        let spread = accs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - accs.iter().copied().fold(f64::INFINITY, f64::min);
        if accs.iter().any(|a| a.abs() > 10.0 * tol) || spread > 10.0 * tol {
            failures.push(format!("{}: solver objectives disagree ({accs:?})", e.id));
        }
        if e.is_spd_regime() {
            for alg in ["iicg1", "iicg2"] {
                let solved = rows.iter().any(|r| r.solver == alg && r.tol == 1e-10 && r.mv.is_some_and(|m| m <= 50_000));
                if !solved {
                    failures.push(format!("{}: {alg} did not reach 1e-10", e.id));
                }
            }
        }
    }
    let fails = s.result.rows.iter().filter(|r| r.mv.is_none()).count();
    Outcome::new(
        &failures,
        format!("{} instances, {} cells, {fails} FAIL cells", s.entries.len(), s.result.rows.len()),
    )
}

fn criterion_alpha_sweep() -> Outcome {
    let s = suite();
    let spd: Vec<(String, QuadraticProblem, f64)> = s
        .entries
        .iter()
        .filter(|e| e.is_spd_regime())
        .map(|e| {
            let f_star = s.result.f_star.iter().find(|(id, _)| *id == e.id).and_then(|(_, f)| *f).unwrap();
            (e.id.clone(), read_problem(e.resolve(&s.base)).unwrap(), f_star)
        })
        .collect();
    let res = ql1::bench::alpha_sweep_problems(&spd, &[1.0, 10.0, 100.0], 50_000, ql1::bench::default_threads()).unwrap();
    let mut failures = Vec::new();
    for c in &res.cells {
        if c.mv.is_none() {
            failures.push(format!("{} at factor {}: {:?}", c.problem, c.factor, c.status));
        }
    }
    for r in &res.rows {
        if !r.mean_inflation.is_finite() {
            failures.push(format!("factor {}: inflation not finite", r.factor));
        }
    }
    let summary = res
        .rows
        .iter()
        .map(|r| format!("x{}: {:.3}", r.factor, r.mean_inflation))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(&failures, format!("{} instances, mean inflation {summary}", spd.len()))
}

type Point = (f64, usize);

fn criterion_tooling() -> Outcome {
    let mut failures = Vec::new();
    let names = |n: usize| (0..n).map(|i| format!("s{i}")).collect::<Vec<_>>();

    let p = dolan_more_matrix(&names(2), &names(2), &[vec![Some(1.0), Some(2.0)], vec![Some(2.0), Some(2.0)]]).unwrap();
    if p.curves[0].points != [(1.0, 1.0), (2.0, 1.0)] || p.curves[1].points != [(1.0, 0.5), (2.0, 1.0)] {
        failures.push(format!("profile example: {:?}", p.curves));
    }
    let p = dolan_more_matrix(&names(1), &names(3), &[vec![Some(4.0)], vec![Some(1.0)], vec![Some(9.0)]]).unwrap();
    if p.curves[0].points.iter().any(|(theta, rho)| *theta < 1.0 || *rho != 1.0) {
        failures.push("single-solver profile".into());
    }
    let p = dolan_more_matrix(&names(2), &names(2), &[vec![Some(3.0), None], vec![Some(1.0), None]]).unwrap();
    if p.curves[1].points.iter().any(|(_, rho)| *rho != 0.0) {
        failures.push("failing solver profile".into());
    }

    let examples: [(&[Point], &[Point]); 3] = [
        (&[(0.05, 7), (0.1, 4), (0.2, 2)], &[(0.05, 7), (0.1, 4), (0.2, 2)]),
        (&[(0.05, 4), (0.05, 7)], &[(0.05, 4)]),
        (&[(0.3, 5)], &[(0.3, 5)]),
    ];
    for (input, want) in examples {
        if pareto_points(input) != want {
            failures.push(format!("pareto {input:?}"));
        }
    }

    let instances = [
        gen_elastic_net(13, 21, 5.0, 0.01, 0.7, 1).unwrap().problem,
        gen_sigrec(16, 64, 4, 0.1, 1e-4, 0.05, 2).unwrap().problem,
        gen_strict_comp(25, 6, 1e4, 0.3, 0.2, 3).unwrap().problem,
    ];
    for p in &instances {
        let bytes = write_problem_bytes(p);
        let back = read_problem_bytes(&bytes).unwrap();
        let same = back.op.operator() == p.op.operator()
            && back.b.iter().zip(&p.b).all(|(a, b)| a.to_bits() == b.to_bits())
            && back.tau.to_bits() == p.tau.to_bits()
            && write_problem_bytes(&back) == bytes;
        if !same {
            failures.push("QL1P roundtrip changed an instance".into());
        }
    }

    let entries = desk_suite().unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_suite(a.path(), &entries).unwrap();
    write_suite(b.path(), &entries).unwrap();
    let mut files: Vec<_> = entries.iter().map(|e| e.path.clone()).collect();
    files.push("manifest.csv".into());
    for f in &files {
        let (x, y) = (std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
        if x != y {
            failures.push(format!("{} differs between runs", f.display()));
        }
        if f.extension().is_some_and(|e| e == "ql1p") && write_problem_bytes(&read_problem_bytes(&x).unwrap()) != x {
            failures.push(format!("{} does not roundtrip", f.display()));
        }
    }
    Outcome::new(&failures, format!("profile, pareto, {} suite files compared", files.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("prox step matches grid oracle", criterion_prox_grid),
        ("descent lemmas on SPD instances", criterion_lemmas),
        ("two-step Q-linear recursion", criterion_two_step),
        ("work bound to eps = 1e-6", criterion_work_bound),
        ("finite identification with strict complementarity", criterion_termination),
        ("solver cross-agreement on the desk suite", criterion_cross_agreement),
        ("alpha_bal sensitivity sweep", criterion_alpha_sweep),
        ("benchmark tooling and reproducible files", criterion_tooling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {verdict} {name}: {} [{:.1}s]",
            i + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!outcome.pass);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
