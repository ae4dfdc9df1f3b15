//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use robust_mab::bounds::validate::{self, ValidationConfig};
use robust_mab::bounds::{self, AlgoParams, Mode, Theorem};
use robust_mab::env::{preset, AttackSpec, AttackStrategy, Scenario};
use robust_mab::harness::{compare_theorem, fit_growth, run_experiment, AggregateCurve, ExperimentResult, Growth};
use robust_mab::policies::min_feasible_group;
use robust_mab::{Execution, PolicyConfig};

const TRIALS: u64 = 20;
const SEED: u64 = 42;
const HORIZON: u64 = 100_000;
const FIT_WINDOW: (u64, u64) = (1_000, 100_000);

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn k10(rho: f64, strategy: AttackStrategy) -> Scenario {
    preset("paper-k10")
        .unwrap()
        .with_attack(AttackSpec { rho, strategy })
        .unwrap()
        .with_horizon(HORIZON)
        .unwrap()
}

fn targeted(rho: f64) -> Scenario {
    k10(rho, AttackStrategy::TargetedUniform { magnitude: 1800.0 })
}

fn med_e_ucb() -> PolicyConfig {
    PolicyConfig::MedEUcb {
        b: 4.0,
        omega: 4.0,
        group_size: 1000,
    }
}

fn med_eps_greedy() -> PolicyConfig {
    PolicyConfig::MedEpsGreedy { c: 10.0 }
}

fn tag(t: &str) -> PolicyConfig {
    PolicyConfig::from_tag(t).unwrap()
}

fn experiment(s: &Scenario, policies: &[PolicyConfig]) -> Result<ExperimentResult, String> {
    run_experiment(s, policies, TRIALS, SEED, Execution::default_available()).map_err(|e| e.to_string())
}

fn curve<'a>(r: &'a ExperimentResult, label: &str) -> &'a AggregateCurve {
    r.curve(label).unwrap()
}

fn growth(c: &AggregateCurve) -> Result<Growth, String> {
    fit_growth(c, FIT_WINDOW.0, FIT_WINDOW.1)
        .map(|f| f.classification)
        .map_err(|e| e.to_string())
}

fn final_regret(c: &AggregateCurve) -> f64 {
    c.final_point().unwrap().mean_regret
}

/// Collects per-check notes and remembers whether any failed.
#[derive(Default)]
struct Checks {
    notes: Vec<String>,
    failed: bool,
}

impl Checks {
    fn add(&mut self, ok: bool, note: String) {
        if !ok {
            self.failed = true;
            self.notes.push(format!("[x] {note}"));
        } else {
            self.notes.push(note);
        }
    }

    fn verdict(self) -> Verdict {
        let text = self.notes.join("; ");
        if self.failed {
            Err(text)
        } else {
            Ok(text)
        }
    }
}

/// Rate floor and logarithmic growth for each label.
fn rate_and_log(checks: &mut Checks, r: &ExperimentResult, labels: &[&str], fraction: f64, floor: f64) -> Result<(), String> {
    for &l in labels {
        let c = curve(r, l);
        let rate = c.window_optimal_rate(fraction).unwrap_or(0.0);
        checks.add(rate >= floor, format!("{l} window rate {rate:.4} >= {floor}"));
        let g = growth(c)?;
        checks.add(g == Growth::Logarithmic, format!("{l} {g}"));
    }
    Ok(())
}

fn criterion_1() -> Verdict {
    let s = targeted(0.125);
    let baselines = ["ucb", "eps-greedy", "rucb-mab", "exp3", "catoni-ucb"];
    let mut policies = vec![med_e_ucb(), med_eps_greedy()];
    policies.extend(baselines.iter().map(|t| tag(t)));
    let r = experiment(&s, &policies)?;
    let mut checks = Checks::default();
    rate_and_log(&mut checks, &r, &["med-e-ucb", "med-eps-greedy"], 0.1, 0.95)?;
    let reference = final_regret(curve(&r, "med-e-ucb"));
    for b in baselines {
        let c = curve(&r, b);
        let ratio = final_regret(c) / reference;
        checks.add(ratio >= 10.0, format!("{b} R_T ratio {ratio:.1}"));
        let g = growth(c)?;
        checks.add(g == Growth::Linear, format!("{b} {g}"));
    }
    checks.verdict()
}

fn criterion_2() -> Verdict {
    let s = targeted(0.3);
    let r = experiment(&s, &[med_e_ucb(), med_eps_greedy()])?;
    let mut checks = Checks::default();
    rate_and_log(&mut checks, &r, &["med-e-ucb", "med-eps-greedy"], 0.1, 0.90)?;
    checks.verdict()
}

fn criterion_3() -> Verdict {
    let s = k10(0.3, AttackStrategy::MedianKiller { magnitude: 1e9 });
    let r = experiment(&s, &[tag("rucb-mab"), med_e_ucb()])?;
    let mut checks = Checks::default();
    let rucb = curve(&r, "rucb-mab").final_point().unwrap().optimal_pull_rate;
    let med = curve(&r, "med-e-ucb").final_point().unwrap().optimal_pull_rate;
    checks.add(rucb < 0.05, format!("rucb-mab full-horizon rate {rucb:.4} < 0.05"));
    checks.add(med > 0.90, format!("med-e-ucb full-horizon rate {med:.4} > 0.90"));
    checks.verdict()
}

fn criterion_4() -> Verdict {
    let s = k10(0.0, AttackStrategy::None);
    let r = experiment(&s, &[med_e_ucb(), med_eps_greedy(), tag("ucb")])?;
    let mut checks = Checks::default();
    rate_and_log(&mut checks, &r, &["med-e-ucb", "med-eps-greedy", "ucb"], 0.1, 0.99)?;
    checks.verdict()
}

fn criterion_5() -> Verdict {
    let rho = 0.125;
    let s = targeted(rho);
    let dmin = s.min_gap();
    let g = bounds::gaussian_params(dmin, s.shared_sigma().unwrap(), rho).map_err(|e| e.to_string())?;
    let analysis = g.analysis(s.best_mean(), dmin, rho, 0.05);
    let k = s.num_arms();
    let group = min_feasible_group(k, g.b_min, HORIZON).ok_or("no feasible group below T")?;
    let c = bounds::eps_greedy_c_floor(Theorem::MedEpsGreedyPseudo, s.arms(), &analysis) * 1.0001;
    let algo = AlgoParams {
        b: g.b_min,
        omega: g.omega_min,
        group_size: group,
        c,
    };
    let policies = [
        PolicyConfig::MedEUcb {
            b: algo.b,
            omega: algo.omega,
            group_size: group,
        },
        PolicyConfig::MedEpsGreedy { c },
    ];
    let r = experiment(&s, &policies)?;
    let mut checks = Checks::default();
    for (label, theorem) in [
        ("med-e-ucb", Theorem::MedEUcbPseudo),
        ("med-eps-greedy", Theorem::MedEpsGreedyPseudo),
    ] {
        let report = compare_theorem(curve(&r, label), &s, theorem, &analysis, &algo, Mode::Checked)
            .map_err(|e| format!("{label}: {e}"))?;
        let worst = report.worst().unwrap();
        checks.add(
            report.dominated,
            format!(
                "{label} vs {}: tightest at t={} regret {:.4e} bound {:.4e}, R_T {:.4e}",
                theorem.tag(),
                worst.t,
                worst.mean_regret,
                worst.bound,
                final_regret(curve(&r, label))
            ),
        );
    }
    checks.notes.insert(0, format!("b={:.3} omega={:.3} G={group} c={c:.3}", algo.b, algo.omega));
    checks.verdict()
}

fn criterion_6() -> Verdict {
    let cfg = ValidationConfig {
        execution: Execution::default_available(),
        ..ValidationConfig::default()
    };
    let rows = validate::run_suite(&cfg).map_err(|e| e.to_string())?;
    let mut checks = Checks::default();
    let failures: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
    checks.add(
        failures.is_empty(),
        format!("{} of {} rows pass ({} reps, {} worlds)", rows.len() - failures.len(), rows.len(), cfg.reps, cfg.worlds),
    );
    for f in failures {
        checks.add(false, format!("{} {} empirical {:.4e} > {:.4e}", f.formula, f.params, f.empirical, f.threshold));
    }
    for r in rows.iter().filter(|r| r.formula.contains("coverage")) {
        checks.notes.push(format!("{} miss rate {:.4}", r.params, r.empirical));
    }
    checks.verdict()
}

fn criterion_7() -> Verdict {
    let queries = common::order_statistic_sweep(10_000, 2024)?;
    let worst = common::catoni_sweep(10_000, 77)?;
    Ok(format!("10000 sequences, {queries} query points exact; Catoni max deviation {worst:.2e}"))
}

fn run_cli(out: &Path, parallelism: &str) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_robust-mab"))
        .env_remove("ROBUST_MAB_OUT")
        .args([
            "run", "--preset", "paper-k10", "--rho", "0.125", "--policies", "med-e-ucb,med-eps-greedy", "--trials", "20",
            "--seed", "42", "--per-trial", "--parallelism", parallelism, "--out",
        ])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn criterion_8() -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let serial = tmp.path().join("serial");
    let parallel = tmp.path().join("parallel");
    run_cli(&serial, "1")?;
    run_cli(&parallel, "4")?;
    let mut names = Vec::new();
    for dir in ["", "trials"] {
        for e in std::fs::read_dir(serial.join(dir)).map_err(|e| e.to_string())? {
            let name = Path::new(dir).join(e.map_err(|e| e.to_string())?.file_name());
            if name.extension().is_some_and(|x| x == "csv") {
                names.push(name);
            }
        }
    }
    let mut checks = Checks::default();
    let mut same = 0;
    for n in &names {
        let a = std::fs::read(serial.join(n)).map_err(|e| e.to_string())?;
        let b = std::fs::read(parallel.join(n)).map_err(|e| e.to_string())?;
        if a == b {
            same += 1;
        } else {
            checks.add(false, format!("{} differs", n.display()));
        }
    }
    checks.add(names.len() == 42 && same == names.len(), format!("{same} of {} CSVs byte-identical", names.len()));
    checks.verdict()
}

fn criterion_9() -> Verdict {
    let mut checks = Checks::default();
    for rho in [0.125, 0.3] {
        let s = preset("radio-sinr")
            .unwrap()
            .with_attack(AttackSpec {
                rho,
                strategy: AttackStrategy::ConstantOffset { offset: 40.0 },
            })
            .unwrap()
            .with_horizon(2000)
            .unwrap();
        let policies = [
            PolicyConfig::MedEUcb {
                b: 4.0,
                omega: 4.0,
                group_size: 200,
            },
            med_eps_greedy(),
        ];
        let r = experiment(&s, &policies)?;
        for l in ["med-e-ucb", "med-eps-greedy"] {
            let rate = curve(&r, l).window_optimal_rate(0.25).unwrap_or(0.0);
            checks.add(rate >= 0.85, format!("rho={rho} {l} last-quarter rate {rate:.4}"));
        }
    }
    checks.verdict()
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 robust regret at rho=0.125", criterion_1),
        ("2 robustness at rho=0.3", criterion_2),
        ("3 median-killer separates RUCB-MAB", criterion_3),
        ("4 no-attack sanity", criterion_4),
        ("5 bound dominance with theory constants", criterion_5),
        ("6 concentration lemma suite", criterion_6),
        ("7 estimator oracle equivalence", criterion_7),
        ("8 serial and parallel runs byte-identical", criterion_8),
        ("9 radio-scale preset", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
