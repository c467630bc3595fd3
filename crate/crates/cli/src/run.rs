//! Seeded ensemble runs comparing the optimizers state by state.

use std::time::Instant;

use qmi_core::gdopt::adam_maximize;
use qmi_core::permopt::{closed_form_d2, disentangle, exhaustive_search, rgnp_two_step, Spectrum};
use qmi_core::states::{
    mutual_info_report, random_pure_state, random_pure_state_with_rank, rho_ab, theorem1_optimal_unitary, Dims,
    TripartitePureState,
};
use serde::{Deserialize, Serialize};

use crate::config::{Method, RunConfig};

/// Slack on the `ΔS ≤ S(ρ_C)` ceiling.
pub const CEILING_TOL: f64 = 1e-9;
/// Relative error is left undefined when Adam's value is at or below this.
pub const ADAM_FLOOR: f64 = 1e-12;

/// Permutation methods in the order they are preferred as the reference for the relative error.
pub const PERM_PRIORITY: [Method; 3] = [Method::ClosedFormD2, Method::Exhaustive, Method::Rgnp];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub delta_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Wall time; kept out of the deterministic outputs.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub state_index: usize,
    pub state_seed: u64,
    pub s_c: f64,
    pub s_ab: f64,
    pub rank_c: usize,
    pub methods: Vec<MethodOutcome>,
    /// `(ΔS_adam − ΔS_perm)/ΔS_adam`; positive when Adam found more.
    pub relative_error: Option<f64>,
    /// Permutation method used as the reference.
    pub relative_to: Option<Method>,
    /// Set when both values exist but Adam's is too small to divide by.
    pub relative_error_flagged: bool,
}

impl ComparisonRecord {
    pub fn delta_s(&self, m: Method) -> Option<f64> {
        self.methods.iter().find(|o| o.method == m).and_then(|o| o.delta_s)
    }

    /// Compares Adam against the preferred permutation method present.
    pub fn fill_relative_error(&mut self) {
        let reference = PERM_PRIORITY.into_iter().find_map(|m| self.delta_s(m).map(|v| (m, v)));
        self.relative_error = None;
        self.relative_to = None;
        self.relative_error_flagged = false;
        if let (Some(adam), Some((m, perm))) = (self.delta_s(Method::Adam), reference) {
            self.relative_to = Some(m);
            if adam > ADAM_FLOOR {
                self.relative_error = Some((adam - perm) / adam);
            } else {
                self.relative_error_flagged = true;
            }
        }
    }

    /// Methods whose value exceeds `S(ρ_C)` beyond [`CEILING_TOL`].
    pub fn ceiling_violations(&self) -> Vec<Method> {
        self.methods
            .iter()
            .filter(|o| o.delta_s.is_some_and(|v| v > self.s_c + CEILING_TOL))
            .map(|o| o.method)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut count = 0;
        let (mut sum, mut min, mut max) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        (count > 0).then(|| Stats { count, mean: sum / count as f64, min, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub delta_s: Option<Stats>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeErrorSummary {
    pub reference: Vec<Method>,
    pub signed: Option<Stats>,
    pub mean_abs: Option<f64>,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ceiling: f64,
    pub adam_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub build: String,
    pub config: RunConfig,
    pub ensemble: String,
    pub tolerances: Tolerances,
    pub methods: Vec<MethodSummary>,
    pub relative_error: RelativeErrorSummary,
    /// Smallest and largest value over all methods and states.
    pub delta_s_range: Option<(f64, f64)>,
    pub ceiling_violations: usize,
    pub records: Vec<ComparisonRecord>,
}

pub fn ensemble_description(cfg: &RunConfig) -> String {
    let dims = format!("d_A = {}, d_B = {}, d_C = {}", cfg.d_a, cfg.d_b, cfg.d_c);
    let base = match cfg.rank_c {
        None => format!("Haar-random pure states on {dims} (normalized i.i.d. complex Gaussians)"),
        Some(r) => format!("random pure states on {dims} with rank(rho_C) = {r} (Gaussian product of rank {r})"),
    };
    format!(
        "{base}; state i uses ChaCha20 seed {} + i; Adam restarts use a per-state seed",
        cfg.seed
    )
}

/// Seed for the Adam restarts of one state.
pub fn adam_seed(state_seed: u64) -> u64 {
    state_seed.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn generate_state(cfg: &RunConfig, state_seed: u64) -> qmi_core::Result<TripartitePureState> {
    let dims = Dims::new(cfg.d_a, cfg.d_b, cfg.d_c);
    match cfg.rank_c {
        None => random_pure_state(dims, state_seed),
        Some(r) => random_pure_state_with_rank(dims, r, state_seed),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

pub fn run_state(cfg: &RunConfig, state_index: usize) -> Result<ComparisonRecord, String> {
    let state_seed = cfg.seed.wrapping_add(state_index as u64);
    let psi = generate_state(cfg, state_seed).map_err(|e| e.to_string())?;
    let report = mutual_info_report(&psi).map_err(|e| e.to_string())?;
    let rho = rho_ab(&psi);
    let (d_a, d_b) = (cfg.d_a, cfg.d_b);

    // the permutation methods share one diagonalization
    let needs_spec = cfg.methods.iter().any(|m| PERM_PRIORITY.contains(m));
    let spec: Option<Result<Spectrum, String>> =
        needs_spec.then(|| disentangle(&rho, d_a, d_b).map(|(_, s)| s).map_err(|e| e.to_string()));

    let mut methods = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let (result, seconds): (Result<f64, String>, f64) = match method {
            Method::Theorem1 if report.rank_c > d_a => {
                (Err(format!("skipped: rank_c = {} > d_A = {d_a}", report.rank_c)), 0.0)
            }
            Method::Theorem1 => timed(|| theorem1_optimal_unitary(&psi).map(|(_, r)| r.delta_s).map_err(|e| e.to_string())),
            Method::Adam => timed(|| {
                adam_maximize(&rho, d_a, d_b, &cfg.adam.to_config(adam_seed(state_seed)))
                    .map(|r| r.best_delta_s)
                    .map_err(|e| e.to_string())
            }),
            perm => {
                let spec = spec.as_ref().expect("spectrum computed for permutation methods");
                timed(|| {
                    let spec = spec.as_ref().map_err(Clone::clone)?;
                    let r = match perm {
                        Method::Exhaustive => exhaustive_search(spec),
                        Method::ClosedFormD2 => closed_form_d2(spec),
                        _ => rgnp_two_step(spec),
                    };
                    r.map(|r| r.delta_s).map_err(|e| e.to_string())
                })
            }
        };
        let (delta_s, note) = match result {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e)),
        };
        methods.push(MethodOutcome { method, delta_s, note, seconds });
    }

    let mut record = ComparisonRecord {
        state_index,
        state_seed,
        s_c: report.s_c,
        s_ab: report.s_ab,
        rank_c: report.rank_c,
        methods,
        relative_error: None,
        relative_to: None,
        relative_error_flagged: false,
    };
    record.fill_relative_error();
    Ok(record)
}

/// Runs every state; a state whose generation fails is recorded with all methods failed.
pub fn run_batch(cfg: &RunConfig, mut progress: impl FnMut(usize, &ComparisonRecord)) -> Vec<ComparisonRecord> {
    (0..cfg.n_states)
        .map(|i| {
            let rec = run_state(cfg, i).unwrap_or_else(|e| ComparisonRecord {
                state_index: i,
                state_seed: cfg.seed.wrapping_add(i as u64),
                s_c: f64::NAN,
                s_ab: f64::NAN,
                rank_c: 0,
                methods: cfg
                    .methods
                    .iter()
                    .map(|&method| MethodOutcome { method, delta_s: None, note: Some(e.clone()), seconds: 0.0 })
                    .collect(),
                relative_error: None,
                relative_to: None,
                relative_error_flagged: false,
            });
            progress(i, &rec);
            rec
        })
        .collect()
}

pub fn summarize(cfg: &RunConfig, records: Vec<ComparisonRecord>) -> Summary {
    let methods = cfg
        .methods
        .iter()
        .map(|&m| MethodSummary {
            method: m,
            delta_s: Stats::of(records.iter().filter_map(|r| r.delta_s(m))),
            failures: records
                .iter()
                .filter(|r| r.delta_s(m).is_none())
                .filter(|r| !r.methods.iter().any(|o| o.method == m && o.note.as_deref().is_some_and(|n| n.starts_with("skipped"))))
                .count(),
        })
        .collect();
    let rel: Vec<f64> = records.iter().filter_map(|r| r.relative_error).collect();
    let mut reference: Vec<Method> = records.iter().filter_map(|r| r.relative_to).collect();
    reference.sort();
    reference.dedup();
    let relative_error = RelativeErrorSummary {
        reference,
        signed: Stats::of(rel.iter().copied()),
        mean_abs: Stats::of(rel.iter().map(|x| x.abs())).map(|s| s.mean),
        flagged: records.iter().filter(|r| r.relative_error_flagged).count(),
    };
    let all = Stats::of(records.iter().flat_map(|r| r.methods.iter().filter_map(|o| o.delta_s)));
    Summary {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        build: env!("QMI_GIT_DESCRIBE").into(),
        config: cfg.clone(),
        ensemble: ensemble_description(cfg),
        tolerances: Tolerances { ceiling: CEILING_TOL, adam_floor: ADAM_FLOOR },
        methods,
        relative_error,
        delta_s_range: all.map(|s| (s.min, s.max)),
        ceiling_violations: records.iter().map(|r| r.ceiling_violations().len()).sum(),
        records,
    }
}
