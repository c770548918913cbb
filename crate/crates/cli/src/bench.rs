//! Deterministic benchmark suites. Each suite generates `count` instances from
//! a base seed, runs the relevant solvers and checks one guarantee per record.

use std::io::Write;
use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use team_order::bounds::audit_gap;
use team_order::extensions::verify_uniform_equilibrium;
use team_order::instance::{classify, generate, ClassTag, GeneratorKind};
use team_order::solvers::{
    solve_brute, solve_ptas, solve_three_value, Diagnostics, PtasConfig, SolveResult,
};
use team_order::Instance;

use crate::Caps;

pub const EQUAL_TOLERANCE: f64 = 1e-10;
pub const SPREAD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    OracleEquivalence,
    PtasSweep,
    BoundAudit,
    Equilibrium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchRecord {
    pub suite: String,
    pub index: usize,
    pub generator: String,
    pub seed: u64,
    pub n: usize,
    pub class: String,
    pub method: String,
    pub epsilon: Option<f64>,
    pub win_probability: Option<f64>,
    pub brute: Option<f64>,
    /// `brute - win_probability`, present only when brute force ran.
    pub gap: Option<f64>,
    pub below_family: Option<usize>,
    pub above_family: Option<usize>,
    pub bound: Option<f64>,
    pub regime: Option<String>,
    pub spread: Option<f64>,
    pub method_ms: f64,
    pub brute_ms: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub passed: usize,
    pub total: usize,
}

fn class_name(inst: &Instance) -> String {
    match classify(inst).tag {
        ClassTag::General => "general",
        ClassTag::Degenerate => "degenerate",
        ClassTag::ThreeValue { .. } => "three-value",
    }
    .to_string()
}

fn kind_name(kind: &GeneratorKind) -> String {
    serde_json::to_string(kind).expect("serializable")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(index as u64)
}

fn base_record(suite: Suite, index: usize, kind: &GeneratorKind, seed: u64, inst: &Instance) -> BenchRecord {
    BenchRecord {
        suite: suite
            .to_possible_value()
            .expect("named variant")
            .get_name()
            .to_string(),
        index,
        generator: kind_name(kind),
        seed,
        n: inst.n(),
        class: class_name(inst),
        ..BenchRecord::default()
    }
}

fn with_brute(mut rec: BenchRecord, result: &SolveResult, ms: f64, brute: &SolveResult, brute_ms: f64) -> BenchRecord {
    rec.win_probability = Some(result.win_probability());
    rec.brute = Some(brute.win_probability());
    rec.gap = Some(brute.win_probability() - result.win_probability());
    rec.method_ms = ms;
    rec.brute_ms = Some(brute_ms);
    rec
}

pub fn run_one(suite: Suite, seed: u64, index: usize, caps: &Caps) -> Result<BenchRecord> {
    let s = instance_seed(seed, index);
    match suite {
        Suite::OracleEquivalence => {
            let n = 2 + index % 6;
            let values = [(0.9, 0.4), (0.7, 0.2), (0.6, 0.5), (0.8, 0.1)];
            let (alpha, beta) = values[index % values.len()];
            let kind = GeneratorKind::ThreeValue {
                alpha,
                beta,
                density: 0.3 + 0.1 * (index % 6) as f64,
            };
            let inst = generate(kind, n, s)?;
            let (tv, ms) = timed(|| solve_three_value(&inst));
            let (brute, brute_ms) = timed(|| solve_brute(&inst, caps.brute));
            let mut rec = with_brute(base_record(suite, index, &kind, s, &inst), &tv?, ms, &brute?, brute_ms);
            rec.method = "three-value".into();
            rec.pass = rec.gap.is_some_and(|g| g.abs() <= EQUAL_TOLERANCE);
            Ok(rec)
        }
        Suite::PtasSweep => {
            let n = 2 + index % 5;
            let kind = GeneratorKind::FixedFractionalCount {
                count: 1 + index % 4,
            };
            let epsilon = if index.is_multiple_of(2) { 1.0 } else { 0.5 };
            let inst = generate(kind, n, s)?;
            let config = PtasConfig {
                family_cap: caps.ptas_family,
                ..PtasConfig::default()
            };
            let (ptas, ms) = timed(|| solve_ptas(&inst, epsilon, &config));
            let (brute, brute_ms) = timed(|| solve_brute(&inst, caps.brute));
            let (ptas, brute) = (ptas?, brute?);
            let mut rec = with_brute(base_record(suite, index, &kind, s, &inst), &ptas, ms, &brute, brute_ms);
            rec.method = "ptas".into();
            rec.epsilon = Some(epsilon);
            let mut healthy = true;
            if let Diagnostics::Ptas(d) = &ptas.diagnostics {
                rec.below_family = Some(d.below_family);
                rec.above_family = Some(d.above_family);
                healthy = d.assertion_failures.is_empty()
                    && d.check_against_optimum(&inst, &brute.lineup) != Some(false);
            }
            rec.pass = healthy && rec.gap.is_some_and(|g| g <= epsilon);
            Ok(rec)
        }
        Suite::BoundAudit => {
            let n = if index.is_multiple_of(2) { 6 } else { 8 };
            let kind = GeneratorKind::UniformRandom;
            let inst = generate(kind, n, s)?;
            let (audit, ms) = timed(|| audit_gap(&inst, caps.brute));
            let audit = audit?;
            let mut rec = base_record(suite, index, &kind, s, &inst);
            rec.method = "max-weight".into();
            rec.win_probability = Some(audit.baseline);
            rec.brute = Some(audit.optimum);
            rec.gap = Some(audit.true_gap);
            rec.bound = Some(audit.bound.bound);
            rec.regime = Some(
                serde_json::to_value(audit.bound.regime)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
            );
            rec.method_ms = ms;
            rec.pass = audit.holds;
            Ok(rec)
        }
        Suite::Equilibrium => {
            let kind = GeneratorKind::UniformRandom;
            let inst = generate(kind, 4, s)?;
            let (report, ms) = timed(|| verify_uniform_equilibrium(&inst, caps.equilibrium));
            let report = report?;
            let mut rec = base_record(suite, index, &kind, s, &inst);
            rec.method = "uniform".into();
            rec.win_probability = Some(report.game_value);
            rec.spread = Some(report.first_spread.max(report.second_spread));
            rec.method_ms = ms;
            rec.pass = rec.spread.is_some_and(|v| v <= SPREAD_TOLERANCE);
            Ok(rec)
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, count: usize, caps: &Caps) -> Result<Vec<BenchRecord>> {
    (0..count).map(|i| run_one(suite, seed, i, caps)).collect()
}

pub fn summarize(records: &[BenchRecord]) -> Summary {
    Summary {
        passed: records.iter().filter(|r| r.pass).count(),
        total: records.len(),
    }
}

pub fn write_records(records: &[BenchRecord], format: Format, out: impl Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}
