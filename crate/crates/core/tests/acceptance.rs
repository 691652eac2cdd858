//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use concat_decode::blockwise::{bisect_threshold, exact_blockwise_recursion};
use concat_decode::bp::BpDecoder;
use concat_decode::code::{five_qubit, repetition3, steane, TableRule};
use concat_decode::montecarlo::{
    run_experiment, sample_error, trial_rng, DecoderKind, Experiment, ExperimentConfig, TrialStats,
};
use concat_decode::oracle::EnumerationOracle;
use concat_decode::{ConcatenatedCode, LogicalDistribution, Syndrome, SyndromeSet};

const SEED: u64 = 1;
const CURVE_PS: [f64; 4] = [0.13, 0.15, 0.1885, 0.19];
const CURVE_LEVELS: std::ops::RangeInclusive<usize> = 1..=6;
const CURVE_TRIALS: u64 = 20_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config(
    code: concat_decode::StabilizerCode,
    ps: &[f64],
    levels: Vec<usize>,
    trials: u64,
    decoders: &[DecoderKind],
) -> ExperimentConfig {
    ExperimentConfig {
        code,
        ps: ps.to_vec(),
        levels,
        trials,
        seed: SEED,
        decoders: decoders.to_vec(),
        table: TableRule::MaxLikelihood,
        threads: None,
    }
}

const BOTH: [DecoderKind; 2] = [DecoderKind::Bp, DecoderKind::Blockwise];

fn curve(
    exp: &Experiment,
    p: f64,
    decoder: DecoderKind,
    levels: impl Iterator<Item = usize>,
) -> Vec<&TrialStats> {
    levels
        .map(|l| exp.row(p, l, decoder).expect("row present"))
        .collect()
}

fn significantly_below(a: &TrialStats, b: &TrialStats) -> bool {
    a.ci_high < b.ci_low
}

fn render(curve: &[&TrialStats]) -> String {
    curve
        .iter()
        .map(|r| format!("{:.4}", r.p_e))
        .collect::<Vec<_>>()
        .join(" ")
}

/// No significant rise between consecutive levels and a significant overall drop.
fn decreasing(curve: &[&TrialStats]) -> bool {
    curve.windows(2).all(|w| !significantly_below(w[0], w[1]))
        && significantly_below(curve[curve.len() - 1], curve[0])
}

/// No significant drop between consecutive levels.
fn non_decreasing(curve: &[&TrialStats]) -> bool {
    curve.windows(2).all(|w| !significantly_below(w[1], w[0]))
}

/// The last point is significantly below the curve's earlier maximum, with
/// no significant rise after that maximum.
fn decreasing_at_tail(curve: &[&TrialStats]) -> bool {
    let last = curve.len() - 1;
    let peak = (0..last)
        .max_by(|&a, &b| curve[a].p_e.total_cmp(&curve[b].p_e))
        .expect("at least two levels");
    significantly_below(curve[last], curve[peak])
        && curve[peak..]
            .windows(2)
            .all(|w| !significantly_below(w[0], w[1]))
}

/// The last point is not significantly below any earlier point.
fn not_decreasing(curve: &[&TrialStats]) -> bool {
    let last = curve[curve.len() - 1];
    curve[..curve.len() - 1]
        .iter()
        .all(|r| !significantly_below(last, r))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for p in [0.05, 0.1, 0.2] {
        let cc = ConcatenatedCode::new(five_qubit(), 1).unwrap();
        let prior = LogicalDistribution::depolarizing(p).unwrap();
        let oracle = EnumerationOracle::build(cc.clone(), prior).unwrap();
        let decoder = BpDecoder::new(cc.clone(), prior);
        let sets: Vec<SyndromeSet> = Syndrome::all(4)
            .map(|s| {
                let mut set = SyndromeSet::empty(&cc);
                set.set(1, 1, s).unwrap();
                set
            })
            .collect();
        let report = oracle.compare(&decoder, &sets).unwrap();
        compared += report.compared;
        worst = worst.max(report.max_deviation);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        compared == 48 && worst <= 1e-12 && secs < 1.0,
        format!("{compared} posteriors, max deviation {worst:.2e} (limit 1e-12), {secs:.3} s (limit 1 s)"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cc = ConcatenatedCode::new(repetition3(), 2).unwrap();
    let prior = LogicalDistribution::depolarizing(0.1).unwrap();
    let oracle = EnumerationOracle::build(cc.clone(), prior).unwrap();
    let decoder = BpDecoder::new(cc.clone(), prior);
    let sets: Vec<SyndromeSet> = (0..100)
        .map(|t| {
            let e = sample_error(&mut trial_rng([2; 32], t), 9, 0.1).unwrap();
            cc.extract(&e).unwrap().0
        })
        .collect();
    let report = oracle.compare(&decoder, &sets).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        report.compared == 100 && report.max_deviation <= 1e-10 && secs < 60.0,
        format!(
            "100 sampled errors vs 4^9 enumeration, max deviation {:.2e} (limit 1e-10), {secs:.2} s (limit 60 s)",
            report.max_deviation
        ),
    )
}

fn criterion_3(exp: &Experiment) -> Outcome {
    let levels = || CURVE_LEVELS;
    let bp = |p| curve(exp, p, DecoderKind::Bp, levels());
    let bw = |p| curve(exp, p, DecoderKind::Blockwise, levels());
    let checks = [
        (
            "p=0.13 bp decreasing",
            decreasing(&bp(0.13)),
            render(&bp(0.13)),
        ),
        (
            "p=0.13 blockwise decreasing",
            decreasing(&bw(0.13)),
            render(&bw(0.13)),
        ),
        (
            "p=0.15 bp decreasing",
            decreasing(&bp(0.15)),
            render(&bp(0.15)),
        ),
        (
            "p=0.15 blockwise non-decreasing from level 2",
            non_decreasing(&bw(0.15)[1..]),
            render(&bw(0.15)),
        ),
        (
            "p=0.1885 bp decreasing up to level 6",
            decreasing_at_tail(&bp(0.1885)),
            render(&bp(0.1885)),
        ),
        (
            "p=0.19 bp not decreasing",
            not_decreasing(&bp(0.19)),
            render(&bp(0.19)),
        ),
    ];
    let pass = checks.iter().all(|c| c.1);
    let detail = checks
        .iter()
        .map(|(name, ok, values)| {
            format!(
                "\n      [{}] {name}: {values}",
                if *ok { "ok" } else { "FAILED" }
            )
        })
        .collect::<String>();
    outcome(
        pass,
        format!("five-qubit, {CURVE_TRIALS} trials/point, levels 1..6{detail}"),
    )
}

fn criterion_4(exp: &Experiment) -> Outcome {
    let code = five_qubit();
    let bp = exp.row(0.1, 4, DecoderKind::Bp).unwrap();
    let exact = |p: f64, levels| {
        exact_blockwise_recursion(&code, p, levels, &code.hard_table(p).unwrap()).unwrap()
    };
    let exact_l4 = exact(0.1, 4)[3].p_e;
    let strictly = [0.05, 0.1].map(|p| {
        let rows = exact(p, 8);
        rows.windows(2).all(|w| w[1].p_e < w[0].p_e) && rows[7].p_e > 0.0
    });
    outcome(
        bp.p_e <= 1e-5 && exact_l4 >= 1e-4 && strictly.iter().all(|&s| s),
        format!(
            "bp p_e {:.2e} ({} / {}, limit 1e-5); exact blockwise level 4 p_e {:.3e} (limit >= 1e-4); exact curves strictly decreasing over 1..8: p=0.05 {}, p=0.1 {}",
            bp.p_e, bp.failures, bp.trials, exact_l4, strictly[0], strictly[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let five = bisect_threshold(&five_qubit(), TableRule::MaxLikelihood, 0.05, 0.3, 1e-5).unwrap();
    let steane_css = bisect_threshold(&steane(), TableRule::Css, 0.05, 0.3, 1e-5).unwrap();
    let steane_ml = bisect_threshold(&steane(), TableRule::MaxLikelihood, 0.05, 0.3, 1e-5).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        (0.13..=0.145).contains(&five) && (0.09..=0.105).contains(&steane_css) && secs < 60.0,
        format!(
            "five-qubit (ml table) {five:.5} in [0.13, 0.145]; steane (css table) {steane_css:.5} in [0.09, 0.105]; {secs:.2} s\n      (info) steane with the p-dependent ml table: {steane_ml:.5}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let exp = run_experiment(&config(
        steane(),
        &[0.18],
        (1..=4).collect(),
        20_000,
        &[DecoderKind::Bp],
    ))
    .unwrap();
    let c = curve(&exp, 0.18, DecoderKind::Bp, 1..=4);
    outcome(
        decreasing(&c),
        format!(
            "steane p=0.18, 20000 trials, bp p_e over levels 1..4: {}",
            render(&c)
        ),
    )
}

fn criterion_7(cells: &[&Experiment]) -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for exp in cells {
        for cell in &exp.pairings {
            let c = cell.counts;
            let phat = c.blockwise_failures as f64 / c.trials as f64;
            let binomial = (c.trials as f64 * phat * (1.0 - phat)).sqrt();
            let sigma = binomial.min(c.difference_sigma());
            let margin = c.blockwise_failures as f64 + 3.0 * sigma - c.bp_failures as f64;
            min_margin = min_margin.min(margin);
            checked += 1;
            if margin < 0.0 {
                violations.push(format!("p={} level={}", cell.p, cell.level));
            }
        }
    }
    outcome(
        violations.is_empty() && checked == 25,
        format!("{checked} paired cells, smallest margin {min_margin:.1} failures, violations: {violations:?}"),
    )
}

fn criterion_8() -> Outcome {
    let decoders = [DecoderKind::Bp];
    let exp = run_experiment(&config(
        five_qubit(),
        &[0.18, 0.1],
        vec![3],
        100_000,
        &decoders,
    ))
    .unwrap();
    let at = |p| exp.row(p, 3, DecoderKind::Bp).unwrap();
    let main = at(0.18);
    let (s, f) = (
        main.mean_conf_success.unwrap(),
        main.mean_conf_failure.unwrap(),
    );
    let low = at(0.1);
    outcome(
        s >= 0.99 && f <= 0.9,
        format!(
            "five-qubit level 3 p=0.18, 100000 trials: {} failures, mean confidence success {s:.4} (limit >= 0.99), failure {f:.4} (limit <= 0.9)\n      (info) exact posteriors make mean confidence equal the success rate {:.4}, so success confidence >= 0.99 needs p_e <= 0.0385\n      (info) p=0.1: {} failures, success {:.4}, failure {:.4}",
            main.failures,
            1.0 - main.p_e,
            low.failures,
            low.mean_conf_success.unwrap(),
            low.mean_conf_failure.unwrap()
        ),
    )
}

fn curves_command() -> Vec<String> {
    let ps = CURVE_PS.map(|p| p.to_string()).join(",");
    [
        "simulate",
        "--code",
        "five-qubit",
        "--p",
        &ps,
        "--levels",
        "1..6",
        "--trials",
        "20000",
        "--decoder",
        "both",
        "--seed",
        "1",
    ]
    .map(str::to_string)
    .to_vec()
}

fn criterion_9(library_csv: &[u8]) -> Outcome {
    let args = curves_command();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_concat-decode"))
            .args(&args)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let (a, b) = (run(), run());
    outcome(
        a == b && a == library_csv,
        format!(
            "two runs of `concat-decode {}`: {} bytes each, identical: {}, equal to library output: {}",
            args.join(" "),
            a.len(),
            a == b,
            a == library_csv
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, title: &str, o: Outcome| {
        println!(
            "[{}] criterion {n}: {title}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    };
    report(1, "level-1 oracle exactness", criterion_1());
    report(2, "level-2 oracle exactness", criterion_2());

    let curves = run_experiment(&config(
        five_qubit(),
        &CURVE_PS,
        CURVE_LEVELS.collect(),
        CURVE_TRIALS,
        &BOTH,
    ))
    .unwrap();
    report(3, "error-rate curves versus level", criterion_3(&curves));

    let deep = run_experiment(&config(five_qubit(), &[0.1], vec![4], 10_000_000, &BOTH)).unwrap();
    report(4, "deep-level error rates at p=0.1", criterion_4(&deep));
    report(5, "blockwise threshold brackets", criterion_5());
    report(6, "steane message passing at p=0.18", criterion_6());
    report(
        7,
        "maximum-likelihood dominance",
        criterion_7(&[&curves, &deep]),
    );
    report(8, "soft-output flagging", criterion_8());

    let mut csv = Vec::new();
    curves.write_csv(&mut csv).unwrap();
    report(9, "byte-identical reruns", criterion_9(&csv));

    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
