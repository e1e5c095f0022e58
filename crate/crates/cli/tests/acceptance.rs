//! Acceptance criteria. Prints one `criterion N: PASS|FAIL ...` line per
//! criterion and exits non-zero if any fails.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hyperstab::constructions::{complete, cycle, matching, turan_graph, turan_rgraph};
use hyperstab::lagrangian::{gradient, maclaurin_residual, maximize, polynomial, semibipartite_residual, LagrangianOptions, SimplexPoint};
use hyperstab::morphism::{check_blowup_invariance, enumerate_rgraphs, is_isomorphic, EnumOptions};
use hyperstab::rational::ratio;
use hyperstab::stability::{is_krl_colorable, rainbow_partition_direct, scan_extendability, scan_stability, ClassSpec, ScanOptions, StabilityKind};
use hyperstab::symmetrizer::{class_symmetrize_step, ex_bruteforce, ex_via_patterns, symmetrize, vertex_symmetrize_step, SymMode};
use hyperstab::{FamilySpec, RGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240501;

struct Outcome {
    pass: bool,
    summary: String,
    /// Everything the criterion computed, for the reproducibility check.
    transcript: String,
}

fn report(n: usize, o: &Outcome, elapsed: Duration) {
    println!("criterion {n}: {} {} ({:.1} s)", if o.pass { "PASS" } else { "FAIL" }, o.summary, elapsed.as_secs_f64());
}

fn k3() -> FamilySpec {
    FamilySpec::Single(complete(3, 2).unwrap())
}

fn random_free(fam: &FamilySpec, n: usize, rng: &mut ChaCha8Rng) -> RGraph {
    let r = fam.r();
    let mut slots = hyperstab::graph::subsets_of(hyperstab::graph::full_mask(n), r);
    slots.shuffle(rng);
    let target = rng.gen_range(0..=slots.len());
    let mut g = RGraph::empty(r, n).unwrap();
    for e in slots {
        if g.edge_count() >= target {
            break;
        }
        let h = g.with_edge(e);
        if fam.is_free(&h) {
            g = h;
        }
    }
    g
}

fn c1() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut t = String::new();
    for n in 3..=8 {
        let res = ex_bruteforce(n, &k3(), &EnumOptions::default()).unwrap();
        let ok = res.value == n * n / 4 && res.witnesses.len() == 1 && is_isomorphic(&res.witnesses[0], &turan_graph(n, 2).unwrap());
        pass &= ok;
        writeln!(t, "n={n} ex={} witnesses={:?}", res.value, res.witnesses.iter().map(|w| w.edge_lists()).collect::<Vec<_>>()).unwrap();
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    Outcome { pass, summary: "ex(n, K3) = floor(n^2/4) with unique witness T(n,2) for n in 3..=8".to_string(), transcript: t }
}

fn c2() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut t = String::new();
    for n in 4..=6 {
        let res = ex_bruteforce(n, &FamilySpec::Sigma(3), &EnumOptions::default()).unwrap();
        let tur = turan_rgraph(n, 3, 3).unwrap();
        let ok = res.value == tur.edge_count() && !res.witnesses.is_empty() && res.witnesses.iter().all(|w| is_isomorphic(w, &tur));
        pass &= ok;
        writeln!(t, "n={n} ex={} |T3(n,3)|={} witnesses={:?}", res.value, tur.edge_count(), res.witnesses.iter().map(|w| w.edge_lists()).collect::<Vec<_>>()).unwrap();
    }
    pass &= start.elapsed().as_secs_f64() < 600.0;
    Outcome { pass, summary: "ex(n, Sigma3) = |T3(n,3)| with witness T3(n,3) for n in 4..=6".into(), transcript: t }
}

/// Replays a symmetrization step by step with independent checks.
fn replay(h: &RGraph, fam: &FamilySpec, mode: SymMode) -> Result<usize, String> {
    let trace = symmetrize(h, fam, mode).map_err(|e| e.to_string())?;
    let mut cur = h.clone();
    let mut steps = 0;
    loop {
        let next = match mode {
            SymMode::Class => class_symmetrize_step(&cur, fam),
            SymMode::Vertex => vertex_symmetrize_step(&cur, fam),
        }
        .map_err(|e| e.to_string())?;
        let Some(g) = next else { break };
        if !fam.is_free(&g) {
            return Err(format!("step {steps} left the free graphs"));
        }
        let before = (cur.edge_count(), cur.psi());
        let after = (g.edge_count(), g.psi());
        let ok = match mode {
            SymMode::Class => after >= before && g.equivalence_classes().class_count() < cur.equivalence_classes().class_count(),
            SymMode::Vertex => after > before,
        };
        if !ok {
            return Err(format!("step {steps} is not lex-monotone: {before:?} -> {after:?}"));
        }
        let s = &trace.steps.get(steps).ok_or("trace shorter than replay")?;
        if (s.edges_before, s.psi_before, s.edges_after, s.psi_after) != (before.0, before.1, after.0, after.1) {
            return Err(format!("trace step {steps} disagrees with replay"));
        }
        cur = g;
        steps += 1;
    }
    if steps != trace.steps.len() || cur != trace.result {
        return Err("trace and replay end differently".into());
    }
    if !cur.is_symmetrized() || cur.edge_count() < h.edge_count() || !fam.is_free(&cur) {
        return Err("final graph is not a free symmetrized improvement".into());
    }
    Ok(steps)
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = Vec::new();
    let mut t = String::new();
    let mut counts = Vec::new();
    for (fam, ns) in [(k3(), 3..=9), (FamilySpec::Sigma(3), 4..=7)] {
        let mut total_steps = 0;
        let mut total_edges = 0;
        for i in 0..500 {
            let n = rng.gen_range(ns.clone());
            let h = random_free(&fam, n, &mut rng);
            total_edges += h.edge_count();
            let mode = if i % 2 == 0 { SymMode::Class } else { SymMode::Vertex };
            match replay(&h, &fam, mode) {
                Ok(s) => total_steps += s,
                Err(e) => violations.push(format!("{}: {:?}: {e}", fam.id(), h.edge_lists())),
            }
        }
        writeln!(t, "{} inputs=500 edges={total_edges} steps={total_steps}", fam.id()).unwrap();
        counts.push(format!("{total_edges} edges, {total_steps} steps"));
    }
    writeln!(t, "violations={violations:?}").unwrap();
    Outcome {
        pass: violations.is_empty(),
        summary: format!("500 random inputs per family (K3: {}; Sigma3: {}), {} violation(s)", counts[0], counts[1], violations.len()),
        transcript: t,
    }
}

fn c4() -> Outcome {
    let mut pass = true;
    let mut t = String::new();
    let o = EnumOptions::default();
    for (fam, ns) in [(k3(), 3..=8), (FamilySpec::Sigma(3), 4..=6)] {
        for n in ns {
            let a = ex_bruteforce(n, &fam, &o).unwrap().value;
            let b = ex_via_patterns(n, &fam, n, &o).unwrap();
            pass &= a == b.value && !b.heuristic;
            writeln!(t, "{} n={n} brute={a} patterns={}", fam.id(), b.value).unwrap();
        }
    }
    Outcome { pass, summary: "pattern route equals brute force on the pairs of criteria 1 and 2".into(), transcript: t }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn c5() -> Outcome {
    let start = Instant::now();
    let opts = LagrangianOptions { seed: SEED, ..LagrangianOptions::default() };
    let mut worst = 0.0f64;
    let mut t = String::new();
    for m in 2..=8 {
        for r in 2..=m {
            let res = maximize(&complete(m, r).unwrap(), &opts).unwrap();
            let want = binom(m, r) / (m as f64).powi(r as i32);
            worst = worst.max((res.value - want).abs());
            writeln!(t, "K^{r}_{m} value={:.15e} expected={want:.15e}", res.value).unwrap();
        }
    }
    let so = LagrangianOptions { supports: Some(true), ..opts };
    let m32 = maximize(&matching(3, 2).unwrap(), &so).unwrap();
    let dm = (m32.value - 1.0 / 27.0).abs();
    writeln!(t, "M^3_2 value={:.15e}", m32.value).unwrap();
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-9 && dm <= 1e-9 && secs < 60.0,
        summary: format!("max error {worst:.2e} on K^r_m, {dm:.2e} on M^3_2"),
        transcript: t,
    }
}

fn c6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut t = String::new();
    let mut pass = true;
    for (m, r) in [(3, 2), (5, 3), (6, 4), (8, 5)] {
        let mut min = f64::INFINITY;
        for _ in 0..10_000 {
            let x = SimplexPoint::random(m, &mut rng);
            min = min.min(maclaurin_residual(m, r, &x).unwrap());
        }
        pass &= min >= -1e-12;
        writeln!(t, "maclaurin m={m} r={r} min={min:.6e}").unwrap();
    }
    for r in 2..=8 {
        let mut min = f64::INFINITY;
        for i in 0..10_000 {
            let x = i as f64 / 9_999.0;
            min = min.min(semibipartite_residual(r, x).unwrap());
        }
        let z1 = semibipartite_residual(r, 1.0 / r as f64).unwrap();
        let z2 = semibipartite_residual(r, 1.0).unwrap();
        pass &= min >= -1e-12 && z1.abs() <= 1e-12 && z2.abs() <= 1e-12;
        writeln!(t, "semibipartite r={r} min={min:.6e} at 1/r {z1:.3e} at 1 {z2:.3e}").unwrap();
    }
    Outcome { pass, summary: "Maclaurin and semibipartite residuals nonnegative, zero at 1/r and 1".into(), transcript: t }
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r = rng.gen_range(2..=4);
        let n = rng.gen_range(r..=9);
        let masks: Vec<u64> = hyperstab::graph::subsets_of(hyperstab::graph::full_mask(n), r).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        let g = RGraph::from_masks(r, n, masks).unwrap();
        let x = SimplexPoint::random(n, &mut rng);
        let grad = gradient(&g, &x).unwrap();
        for i in 0..n {
            let mut up = x.weights().to_vec();
            let mut down = up.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (polynomial(&g, &up) - polynomial(&g, &down)) / (2.0 * h);
            worst = worst.max((fd - grad[i]).abs());
        }
    }
    Outcome { pass: worst <= 1e-6, summary: format!("max-norm gap {worst:.2e} over 100 random (G, x)"), transcript: format!("worst={worst:.6e}\n") }
}

fn c8() -> Outcome {
    let mut t = String::new();
    let mut disagreements = 0;
    let o = EnumOptions { monotone: false, ..EnumOptions::default() };
    for (r, nmax) in [(2, 7), (3, 6)] {
        let mut checked = 0;
        for n in r..=nmax {
            for h in enumerate_rgraphs(r, n, |_| true, &o).unwrap() {
                for l in r..=n {
                    let a = is_krl_colorable(&h, l).unwrap();
                    let b = rainbow_partition_direct(&h, l);
                    if a.is_some() != b.is_some() || a.as_ref().is_some_and(|p| p.class_count() > l || !p.is_rainbow_for(&h)) {
                        disagreements += 1;
                    }
                    checked += 1;
                }
            }
        }
        writeln!(t, "r={r} n<={nmax} checks={checked}").unwrap();
    }
    writeln!(t, "disagreements={disagreements}").unwrap();
    Outcome { pass: disagreements == 0, summary: format!("{disagreements} disagreement(s) between the two colorability routes"), transcript: t }
}

fn c9() -> Outcome {
    let opts = ScanOptions::default();
    let a = scan_extendability(&k3(), &ClassSpec::krl(2, 2).unwrap(), 1, 9, &ratio(1, 10), &ratio(1, 2), &opts).unwrap();
    let b = scan_extendability(&FamilySpec::Sigma(3), &ClassSpec::krl(3, 3).unwrap(), 1, 6, &ratio(1, 20), &ratio(2, 9), &opts).unwrap();
    let t = serde_json::to_string(&(&a, &b)).unwrap();
    Outcome {
        pass: a.clean() && b.clean(),
        summary: format!(
            "K3/bipartite: {} counterexample(s) over {} checks ({}); Sigma3/K^3_3: {} over {} checks ({})",
            a.counterexamples.len(),
            a.checks,
            a.label,
            b.counterexamples.len(),
            b.checks,
            b.label
        ),
        transcript: t,
    }
}

fn c10() -> Outcome {
    let opts = ScanOptions::default();
    let zero = ratio(0, 1);
    let runs = [
        ("K3", k3(), ClassSpec::krl(2, 2).unwrap(), 5, 9, ratio(1, 10), ratio(1, 2)),
        ("Sigma3", FamilySpec::Sigma(3), ClassSpec::krl(3, 3).unwrap(), 6, 6, ratio(1, 20), ratio(2, 9)),
        ("K4", FamilySpec::Single(complete(4, 2).unwrap()), ClassSpec::krl(2, 3).unwrap(), 6, 8, ratio(1, 10), ratio(2, 3)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    let mut t = String::new();
    for (name, fam, class, a, b, eps, pi) in runs {
        let v = scan_stability(&fam, &class, StabilityKind::Degree, a, b, &eps, &zero, &pi, &opts).unwrap();
        let range_label = v.label.ends_with(&format!("n = {b}")) || v.label.ends_with(&format!("{a}..={b}"));
        pass &= v.clean() && range_label && !v.label.contains("stable");
        parts.push(format!("{name}/{}: {}", class.id(), v.label));
        t.push_str(&serde_json::to_string(&v).unwrap());
        t.push('\n');
    }
    Outcome { pass, summary: parts.join("; "), transcript: t }
}

fn c11() -> Outcome {
    let o = EnumOptions::default();
    let a = check_blowup_invariance(&k3(), 6, &o).unwrap();
    let b = check_blowup_invariance(&FamilySpec::Sigma(3), 5, &o).unwrap();
    let c = check_blowup_invariance(&FamilySpec::Single(cycle(5).unwrap()), 6, &o).unwrap();
    Outcome {
        pass: a.invariant_in_range() && b.invariant_in_range() && !c.invariant_in_range(),
        summary: format!(
            "K3 clean to 6: {}, Sigma3 clean to 5: {}, C5 counterexample: {:?}",
            a.invariant_in_range(),
            b.invariant_in_range(),
            c.counterexample
        ),
        transcript: serde_json::to_string(&(&a, &b, &c)).unwrap(),
    }
}

struct Run {
    stdout: Vec<u8>,
    files: Vec<(String, Vec<u8>)>,
}

fn cli(dir: &Path, args: &[&str]) -> Run {
    std::fs::create_dir_all(dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hyperstab")).args(args).current_dir(dir).output().unwrap();
    assert!(matches!(out.status.code(), Some(0) | Some(4)), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    Run { stdout: out.stdout, files }
}

const CONFIG: &str = r#"{
  "command": "ex",
  "family": "sigma",
  "params": {
    "method": "both",
    "n": "4..6",
    "seed": 7
  },
  "outputs": {
    "record": "record.json",
    "table": "table.csv",
    "witness_dir": "witnesses"
  }
}
"#;

fn cli_commands() -> Vec<Vec<&'static str>> {
    vec![
        vec!["make", "complete:3:2", "--out", "k3.hgr"],
        vec!["make", "gentri:3", "--out", "sigma3.hgr"],
        vec!["ex", "--n", "3..8", "--family", "k3", "--witness-dir", "w"],
        vec!["ex", "--n", "4..6", "--family", "sigma", "--method", "both"],
        vec!["lagrangian", "k3.hgr", "--supports"],
        vec!["lagrangian", "sigma3.hgr", "--restarts", "16", "--multistart"],
        vec!["scan", "--family", "k3", "--class", "bipartite", "--kind", "degree", "--n", "5..9", "--eps", "1/10", "--csv", "scan.csv"],
        vec!["scan", "--family", "sigma", "--class", "krl:3:3", "--kind", "degree", "--n", "6", "--eps", "1/20"],
        vec!["scan", "--family", "k4", "--class", "krl:2:3", "--kind", "degree", "--n", "6..8", "--eps", "1/10"],
        vec!["extendable", "--family", "k3", "--n", "1..9", "--class", "bipartite", "--zeta", "1/10", "--piref", "1/2"],
        vec!["extendable", "--family", "sigma", "--n", "1..6", "--class", "krl:3:3", "--zeta", "1/20", "--piref", "2/9"],
        vec!["invariance", "--family", "c5", "--nmax", "6"],
        vec!["enum", "--r", "3", "--n", "6"],
        vec!["run", "config.json"],
    ]
}

fn c12() -> Outcome {
    let fns: [fn() -> Outcome; 11] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11];
    let mut differing = Vec::new();
    for (i, f) in fns.iter().enumerate() {
        if f().transcript != f().transcript {
            differing.push(format!("library criterion {}", i + 1));
        }
    }
    let tmp = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for round in 0..2 {
        let dir = tmp.path().join(format!("run{round}"));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("config.json"), CONFIG).unwrap();
        let mut outs = Vec::new();
        for args in cli_commands() {
            let mut full = vec!["--seed", "11"];
            full.extend(&args);
            outs.push((args.join(" "), cli(&dir, &full).stdout));
        }
        runs.push((outs, cli(&dir, &["--seed", "11", "check", "k3.hgr"]).files));
    }
    for ((cmd, a), (_, b)) in runs[0].0.iter().zip(&runs[1].0) {
        if a != b {
            differing.push(format!("`{cmd}` stdout"));
        }
    }
    if runs[0].1 != runs[1].1 {
        differing.push("written files".into());
    }
    Outcome {
        pass: differing.is_empty(),
        summary: format!("2 runs of 11 library criteria and {} CLI commands with fixed seeds; differing: {differing:?}", cli_commands().len()),
        transcript: String::new(),
    }
}

fn main() {
    let criteria: [fn() -> Outcome; 12] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12];
    let mut failed = Vec::new();
    for (i, f) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = std::panic::catch_unwind(f).unwrap_or_else(|e| Outcome {
            pass: false,
            summary: format!("panicked: {}", e.downcast_ref::<String>().map_or("?", |s| s.as_str())),
            transcript: String::new(),
        });
        report(i + 1, &o, t.elapsed());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} of 12 criteria pass; failing: {failed:?}", 12 - failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
