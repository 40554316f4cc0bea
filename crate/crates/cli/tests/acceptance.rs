//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use simonforge::attacks::{
    classical_baseline, constant_control_audit, epsilon_audit, instantiate, run_attack, AttackKind,
    AttackSpec,
};
use simonforge::constructions::FeistelMode;
use simonforge::primitives::{random_func, random_perm};
use simonforge::qsim::{orthogonal_character_sum, subroutine_distribution, success_bound, FunctionTable};
use simonforge::rng::{derive_seed, stream};
use simonforge::BitWord;
use simonforge_cli::{margin, run_audit, run_trials, RunConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

// ---- 1: sampler exactness ----

fn corpus() -> Vec<FunctionTable> {
    (0..200u64)
        .map(|i| {
            let h = derive_seed(0x5a3, i);
            let m = 1 + (h % 8) as u32;
            let size = 1u32 << m;
            match i % 4 {
                0 => {
                    let s = 1 + (h >> 8) as u32 % (size - 1).max(1);
                    let s = if m == 1 { 1 } else { s };
                    let p = random_perm(m, h).unwrap();
                    FunctionTable::tabulate(m, m, |x| p.apply(x.min(x ^ s))).unwrap()
                }
                1 => {
                    let p = random_perm(m, h).unwrap();
                    FunctionTable::tabulate(m, m, |x| p.apply(x)).unwrap()
                }
                2 => FunctionTable::tabulate(m, 3, |_| (h % 8) as u32).unwrap(),
                _ => {
                    let out = 1 + (h >> 16) as u32 % 8;
                    let g = random_func(m, out, h).unwrap();
                    FunctionTable::tabulate(m, out, |x| g.apply(x)).unwrap()
                }
            }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let tables = corpus();
    for f in &tables {
        let dist = subroutine_distribution(f);
        let size = f.len() as u32;
        for t in 0..size {
            let lhs: f64 = (0..size)
                .filter(|&y| (y & t).count_ones() % 2 == 0)
                .map(|y| dist[y as usize])
                .sum();
            let hits = (0..size).filter(|&x| f.eval(x) == f.eval(x ^ t)).count();
            let rhs = 0.5 * (1.0 + hits as f64 / size as f64);
            worst = worst.max((lhs - rhs).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && within(Duration::from_secs(10), elapsed),
        format!("{} tables, max deviation {worst:.2e}, {elapsed:.2?}", tables.len()),
    )
}

// ---- 2: character sum identity ----

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0u64;
    let ok = (1..=10u32).all(|n| {
        let size = 1u32 << n;
        pairs += size as u64 * size as u64;
        (0..size).into_par_iter().all(|t| {
            (0..size).all(|x| {
                let sum = orthogonal_character_sum(BitWord::new(n, t).unwrap(), BitWord::new(n, x).unwrap()).unwrap();
                // 2^n g(x) = 2^(n-1) (δ(x,0) + δ(x,t))
                let expect = (1i64 << (n - 1)) * ((x == 0) as i64 + (x == t) as i64);
                sum == expect
            })
        })
    });
    let elapsed = start.elapsed();
    outcome(
        ok && within(Duration::from_secs(5), elapsed),
        format!("{pairs} (t, x) pairs over widths 1..=10, {elapsed:.2?}"),
    )
}

// ---- 3: bound dominance for Even-Mansour ----

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, c) in [(8u32, 6.0), (12, 6.0), (16, 6.0)] {
        let trials = 1000u32;
        let mut cfg = RunConfig::new(AttackKind::EvenMansour, n, 0xe1 + n as u64, trials);
        cfg.c = c;
        let doc = run_trials(&cfg).unwrap();
        let bound = success_bound(0.5, c, n);
        let floor = bound - margin(bound, trials);
        ok &= doc.aggregate.success_rate >= floor;
        lines.push(format!("n={n}: {:.4} vs {:.6}", doc.aggregate.success_rate, floor));
    }
    let elapsed = start.elapsed();
    outcome(
        ok && within(Duration::from_secs(300), elapsed),
        format!("{}, {elapsed:.2?}", lines.join("; ")),
    )
}

// ---- 4: end-to-end secret recovery ----

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let kinds = [
        AttackKind::EvenMansour,
        AttackKind::Lrw,
        AttackKind::Slide,
        AttackKind::Gmac,
        AttackKind::Pmac2,
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for kind in kinds {
        let exact = (0..100u64)
            .into_par_iter()
            .filter(|&i| {
                let mut spec = AttackSpec::new(kind, 12, derive_seed(0x4c, i));
                spec.slide_rounds = 9;
                let report = run_attack(&spec, &mut stream(spec.seed, 1)).unwrap();
                let inst = instantiate(&spec).unwrap();
                report.success
                    && report.period == inst.planted_period()
                    && inst
                        .ground_truth()
                        .iter()
                        .all(|t| report.recovered_value(&t.label) == Some(t.value.value()))
            })
            .count();
        ok &= exact >= 99;
        lines.push(format!("{kind} {exact}/100"));
    }
    let elapsed = start.elapsed();
    outcome(
        ok && within(Duration::from_secs(180), elapsed),
        format!("{}, {elapsed:.2?}", lines.join(", ")),
    )
}

// ---- 5: forgery wins ----

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let kinds = [
        AttackKind::CbcMac,
        AttackKind::Pmac1,
        AttackKind::Pmac2,
        AttackKind::Gmac,
        AttackKind::Gcm,
        AttackKind::OcbAuth,
        AttackKind::OcbEnc,
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for kind in kinds {
        let stats: Vec<(bool, bool, usize, u64)> = (0..50u64)
            .into_par_iter()
            .map(|i| {
                let spec = AttackSpec::new(kind, 8, derive_seed(0x5f, i));
                let r = run_attack(&spec, &mut stream(spec.seed, 1)).unwrap();
                let verified = r.verified_forgeries();
                let all_verified = verified == r.forgeries.len();
                (verified as u64 > r.total_queries, all_verified, verified, r.total_queries)
            })
            .collect();
        let wins = stats.iter().filter(|s| s.0).count();
        let clean = stats.iter().all(|s| s.1);
        ok &= wins == 50 && clean;
        let (f, q) = (stats[0].2, stats[0].3);
        lines.push(format!("{kind} {wins}/50 (e.g. {f} > {q})"));
    }
    let elapsed = start.elapsed();
    outcome(
        ok && within(Duration::from_secs(120), elapsed),
        format!("{}, {elapsed:.2?}", lines.join(", ")),
    )
}

// ---- 6: distinguisher soundness ----

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for kind in [AttackKind::Feistel3, AttackKind::Lrw] {
        let verdicts = (0..100u64)
            .into_par_iter()
            .filter(|&i| {
                let mut spec = AttackSpec::new(kind, 10, derive_seed(0x6d, i));
                spec.null_model = true;
                let r = run_attack(&spec, &mut stream(spec.seed, 1)).unwrap();
                r.failure.as_deref() == Some("dimension 0")
            })
            .count();
        ok &= verdicts >= 95;
        lines.push(format!("{kind} {verdicts}/100"));
    }
    let elapsed = start.elapsed();
    outcome(
        ok && within(Duration::from_secs(60), elapsed),
        format!("{}, {elapsed:.2?}", lines.join(", ")),
    )
}

// ---- 7: ε audits ----

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    let configs: [(&str, AttackKind, FeistelMode); 3] = [
        ("lrw", AttackKind::Lrw, FeistelMode::PermutationRounds),
        ("slide", AttackKind::Slide, FeistelMode::PermutationRounds),
        ("feistel3-function-rounds", AttackKind::Feistel3, FeistelMode::FunctionRounds),
    ];
    for (label, kind, mode) in configs {
        let within_half = (0..100u64)
            .into_par_iter()
            .filter(|&i| {
                let mut spec = AttackSpec::new(kind, 10, derive_seed(0x7e, i));
                spec.feistel_mode = mode;
                epsilon_audit(&spec).unwrap().within_bound
            })
            .count();
        ok &= within_half >= 95;
        lines.push(format!("{label} {within_half}/100"));
    }
    let control = constant_control_audit(10).unwrap();
    ok &= control.epsilon == 1.0 && !control.within_bound;
    lines.push(format!("constant control eps {}", control.epsilon));
    let elapsed = start.elapsed();
    outcome(
        ok && within(Duration::from_secs(120), elapsed),
        format!("{}, {elapsed:.2?}", lines.join(", ")),
    )
}

// ---- 8: query gap ----

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let spec = AttackSpec::new(AttackKind::CbcMac, 16, 0x8a);
    let quantum = run_attack(&spec, &mut stream(spec.seed, 1)).unwrap();
    let sup = quantum.superposition_queries;
    let mut classical: Vec<(u64, bool)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let spec = AttackSpec::new(AttackKind::CbcMac, 16, derive_seed(0x8b, i));
            let r = classical_baseline(&spec, &mut stream(spec.seed, 2)).unwrap();
            (r.queries, r.correct)
        })
        .collect();
    classical.sort_unstable();
    let all_correct = classical.iter().all(|c| c.1);
    let median = (classical[24].0 + classical[25].0) as f64 / 2.0;
    let gap = median / sup as f64;
    let elapsed = start.elapsed();
    outcome(
        quantum.success
            && sup <= 102
            && median >= 256.0
            && gap >= 2.5
            && all_correct
            && within(Duration::from_secs(180), elapsed),
        format!(
            "superposition {sup}, classical median {median} over 50 seeds, gap {gap:.2}x, {elapsed:.2?}"
        ),
    )
}

// ---- 9: reproducibility ----

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn binary_report(threads: usize, dir: &std::path::Path, args: &[&str]) -> Vec<u8> {
    let out = dir.join(format!("report-{threads}-{}.json", args.join("_")));
    let status = Command::new(env!("CARGO_BIN_EXE_simonforge"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .env_remove("SIMONFORGE_SEED")
        .output()
        .unwrap();
    assert!(status.status.code().is_some());
    std::fs::read(out).unwrap()
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let configs = [
        RunConfig::new(AttackKind::EvenMansour, 12, 42, 50),
        RunConfig::new(AttackKind::Gcm, 10, 7, 20),
        RunConfig::new(AttackKind::Feistel3, 8, 3, 20),
    ];
    let mut ok = true;
    for cfg in &configs {
        let docs: Vec<String> = [1usize, 8, 1, 8]
            .iter()
            .map(|&t| in_pool(t, || run_trials(cfg).unwrap().to_json().unwrap()))
            .collect();
        ok &= docs.windows(2).all(|w| w[0] == w[1]);
    }
    let audit_cfg = RunConfig::new(AttackKind::Slide, 8, 5, 10);
    let audits: Vec<String> = [1usize, 8]
        .iter()
        .map(|&t| in_pool(t, || run_audit(&audit_cfg, true).unwrap().to_json().unwrap()))
        .collect();
    ok &= audits[0] == audits[1];

    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run", "--attack", "even-mansour", "--width", "12", "--trials", "50", "--seed", "42",
    ];
    let files: Vec<Vec<u8>> = [1usize, 8, 8]
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let sub = dir.path().join(i.to_string());
            std::fs::create_dir(&sub).unwrap();
            binary_report(t, &sub, &args)
        })
        .collect();
    ok &= !files[0].is_empty() && files.windows(2).all(|w| w[0] == w[1]);
    let elapsed = start.elapsed();
    outcome(
        ok,
        format!(
            "{} run configs and 1 audit across pools of 1 and 8 threads, binary reports {} bytes, {elapsed:.2?}",
            configs.len(),
            files[0].len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sampler exactness", criterion_1),
        ("character sum identity", criterion_2),
        ("bound dominance (even-mansour)", criterion_3),
        ("secret recovery at width 12", criterion_4),
        ("forgeries outnumber queries", criterion_5),
        ("distinguisher soundness", criterion_6),
        ("epsilon audits", criterion_7),
        ("quantum vs classical query gap", criterion_8),
        ("reproducibility", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} {name}: {}", i + 1, o.detail);
        failed += !o.pass as u32;
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() as u32 - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
