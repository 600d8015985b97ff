//! Acceptance criteria 1 to 9. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use shsbm_core::experiments::{fano_experiment, run_batch, sweep, BatchSpec, GridFile, SweepSpec};
use shsbm_core::model::{ModelConfig, WeightDistribution};
use shsbm_core::oracles::{documented_instances, exact_mi, tail_check, verify_lemma, LemmaId, TailBound, VerifyCaps};
use shsbm_core::thresholds::bernoulli_d;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn mi_soundness() -> Outcome {
    let probs = [0.2, 0.5, 0.8];
    let (mut configs, mut worst_slack, mut worst_at) = (0, f64::INFINITY, String::new());
    for n in 3..=5 {
        for k in [2, 3] {
            if k > n {
                continue;
            }
            for &p in &probs {
                for &q in &probs {
                    if p == q {
                        continue;
                    }
                    let c = ModelConfig::new(n, 1, k, 2, p, q).unwrap();
                    let res = exact_mi(&c).unwrap();
                    configs += 1;
                    if res.slack < worst_slack {
                        worst_slack = res.slack;
                        worst_at = format!("n={n} k={k} p={p} q={q}");
                    }
                }
            }
        }
    }
    outcome(worst_slack >= 0.0, format!("{configs} configs, min slack {worst_slack:.3e} at {worst_at}"))
}

fn lemma(id: LemmaId, caps: &VerifyCaps) -> (bool, String) {
    let rep = verify_lemma(id, caps).unwrap();
    let msg = format!("{} {} instances, max violation {:.3e}", id, rep.instances_checked, rep.max_violation);
    (rep.passed, msg)
}

fn signal_identity() -> Outcome {
    let caps = VerifyCaps { max_n: 10, class_cap: 10_000, ..VerifyCaps::default() };
    let (pass, msg) = lemma(LemmaId::SignalIdentity, &caps);
    outcome(pass, msg)
}

fn combinatorial_suite() -> Outcome {
    let caps = VerifyCaps { max_n: 8, max_r: 2, max_k: 4, ..VerifyCaps::default() };
    let ids = [
        LemmaId::DRange,
        LemmaId::PairRelation,
        LemmaId::DtBound,
        LemmaId::LabeledCountBound,
        LemmaId::Decomposition,
        LemmaId::CountFormula,
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for id in ids {
        let (pass, msg) = lemma(id, &caps);
        all &= pass;
        parts.push(if pass { msg } else { format!("FAILED {msg}") });
    }
    outcome(all, parts.join("; "))
}

fn kl_chain() -> Outcome {
    let grid: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let (mut points, mut worst) = (0, f64::NEG_INFINITY);
    for &p in &grid {
        for &q in &grid {
            if p == q {
                continue;
            }
            let rhs = (p - q).powi(2) / (p.min(q) * (1.0 - p.max(q)));
            worst = worst.max(bernoulli_d(p, q) - rhs);
            points += 1;
        }
    }
    outcome(worst <= 0.0, format!("{points} grid points, max d - bound {worst:.3e}"))
}

fn fano_floor() -> Outcome {
    let mut all = true;
    let mut parts = Vec::new();
    for (p, q) in [(0.52, 0.48), (0.7, 0.35)] {
        let c = ModelConfig::new(6, 1, 3, 2, p, q).unwrap();
        let res = fano_experiment(&c, 500, 20_251_016, None).unwrap();
        let ok = res.fano_floor >= 0.3 && res.pass;
        all &= ok;
        parts.push(format!(
            "(p,q)=({p},{q}) floor {:.4} error {:.3} wilson_low {:.4} margin {:.4}",
            res.fano_floor, res.empirical_error, res.wilson_low, res.margin
        ));
    }
    outcome(all, parts.join("; "))
}

fn perfect_separation() -> Outcome {
    let c = ModelConfig::new(12, 2, 4, 3, 1.0, 0.0).unwrap();
    let spec = BatchSpec::new(
        c,
        WeightDistribution::point_mass(1.0).unwrap(),
        WeightDistribution::point_mass(0.0).unwrap(),
        100,
        6,
    );
    let res = run_batch(&spec).unwrap();
    outcome(res.rate == 1.0, format!("{}/{} successes", res.successes, res.trials))
}

fn monotonicity() -> Outcome {
    let ps: Vec<f64> = (2..=9).map(|i| i as f64 / 10.0).collect();
    let points = GridFile::product(8, 1, 4, 2, ps, vec![0.1]).expand().unwrap();
    let res = sweep(&SweepSpec::new(points, 200, 7)).unwrap();
    let rows = &res.rows;
    let mut violations = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            if b.rate < a.rate && b.wilson_high < a.wilson_low {
                violations.push(format!("p={} > p={}", a.p, b.p));
            }
        }
    }
    let rates: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.rate)).collect();
    let lift = rows[rows.len() - 1].rate - rows[0].rate;
    let pass = violations.is_empty() && lift >= 0.3;
    outcome(pass, format!("rates [{}], lift {lift:.3}, violations {violations:?}", rates.join(", ")))
}

fn tails() -> Outcome {
    let mut all = true;
    let mut parts = Vec::new();
    for inst in documented_instances().unwrap() {
        for kind in [TailBound::Bernstein, TailBound::Hoeffding] {
            let c = tail_check(&inst.config, &inst.dist_in, &inst.dist_out, &inst.y, &inst.y_star, 100_000, kind, 99)
                .unwrap();
            let ok = c.report.passed && (c.upper_99 <= c.bound || c.bound >= 1.0);
            all &= ok;
            parts.push(format!("{}/{:?} upper99 {:.3e} bound {:.3e}", inst.name, kind, c.upper_99, c.bound));
        }
    }
    outcome(all, parts.join("; "))
}

fn determinism() -> Outcome {
    let c = ModelConfig::new(8, 2, 3, 2, 0.75, 0.3).unwrap();
    let run = |jobs| {
        let mut spec = BatchSpec::bernoulli(c, 100, 424_242).unwrap();
        spec.jobs = Some(jobs);
        spec.keep_trials = true;
        serde_json::to_vec(&run_batch(&spec).unwrap()).unwrap()
    };
    let a = run(1);
    let same = a == run(8) && a == run(1) && a == run(8);
    outcome(same, format!("{} bytes, identical across jobs 1 and 8", a.len()))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    // libtest flags such as --nocapture or a name filter are accepted and ignored
    let criteria: [Criterion; 9] = [
        ("1 mutual information bound", Duration::from_secs(120), mi_soundness),
        ("2 signal identity", Duration::from_secs(60), signal_identity),
        ("3 combinatorial lemmas", Duration::from_secs(300), combinatorial_suite),
        ("4 KL chain", Duration::from_secs(1), kl_chain),
        ("5 Fano floor", Duration::from_secs(120), fano_floor),
        ("6 perfect separation", Duration::from_secs(60), perfect_separation),
        ("7 phase monotonicity", Duration::from_secs(300), monotonicity),
        ("8 concentration tails", Duration::from_secs(120), tails),
        ("9 determinism", Duration::from_secs(120), determinism),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let in_time = took <= budget;
        let pass = res.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if in_time { String::new() } else { format!(" over budget {budget:?}") };
        println!(
            "{} criterion {name} ({:.2}s{timing}): {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            res.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
