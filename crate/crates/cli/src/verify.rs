//! Fixture-driven checks run by `qmi verify`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qmi_core::gdopt::{
    build_unitary, delta_s_objective, second_derivative_closed_form_d2, second_derivative_closed_form_d3, D2Family,
    D3Form, GeneratorBasis, ParamVector,
};
use qmi_core::npp::{rgnp, PartitionInput};
use qmi_core::permopt::{apply_assignment, closed_form_d2, d2_coset_assignment, exhaustive_search, random_spectrum, Spectrum};
use qmi_core::qlinalg::{random_unitary, ComplexMatrix};
use qmi_core::states::{
    apply_bipartite_unitary, mutual_info_report, random_pure_state, random_pure_state_with_rank, shannon_entropy,
    theorem1_optimal_unitary, DensityMatrix, Dims, TripartitePureState,
};
use qmi_core::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::kv;

pub const SUITES: [&str; 8] =
    ["rgnp_d6_trace", "d2_optimal_layout", "ghz", "low_rank_ceiling", "coset_invariance", "d2_second_derivatives", "d3_second_derivatives", "mutual_info_sum"];

fn embedded(name: &str) -> Option<&'static str> {
    Some(match name {
        "rgnp_d6_trace" => include_str!("../fixtures/rgnp_d6_trace.kv"),
        "d2_optimal_layout" => include_str!("../fixtures/d2_optimal_layout.kv"),
        "ghz" => include_str!("../fixtures/ghz.kv"),
        "low_rank_ceiling" => include_str!("../fixtures/low_rank_ceiling.kv"),
        "coset_invariance" => include_str!("../fixtures/coset_invariance.kv"),
        "d2_second_derivatives" => include_str!("../fixtures/d2_second_derivatives.kv"),
        "d3_second_derivatives" => include_str!("../fixtures/d3_second_derivatives.kv"),
        "mutual_info_sum" => include_str!("../fixtures/mutual_info_sum.kv"),
        _ => return None,
    })
}

/// Where fixture files come from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum FixtureSource {
    #[default]
    Embedded,
    /// `<dir>/<suite>.kv`
    Dir(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    /// Counts on success; the diff or error on failure.
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let status = if s.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {}: {}", s.name, s.details.lines().next().unwrap_or(""));
            for line in s.details.lines().skip(1) {
                let _ = writeln!(out, "    {line}");
            }
        }
        let failed = self.suites.iter().filter(|s| !s.passed).count();
        let _ = writeln!(out, "{} suites, {} failed", self.suites.len(), failed);
        out
    }
}

/// Unknown suite names are reported by the caller; see [`SUITES`].
pub fn run_suites(source: &FixtureSource, only: Option<&str>) -> VerifyReport {
    let suites = SUITES
        .iter()
        .filter(|n| only.is_none_or(|o| o == **n))
        .map(|&name| {
            let outcome = load(source, name).and_then(|fx| run_suite(name, &fx));
            match outcome {
                Ok(details) => SuiteResult { name: name.into(), passed: true, details },
                Err(details) => SuiteResult { name: name.into(), passed: false, details },
            }
        })
        .collect();
    VerifyReport { suites }
}

struct Fixture(Vec<(String, String)>);

impl Fixture {
    fn raw(&self, key: &str) -> Result<&str, String> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str()).ok_or_else(|| format!("fixture is missing `{key}`"))
    }

    fn has(&self, key: &str) -> bool {
        self.0.iter().any(|(k, _)| k == key)
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)?.parse().map_err(|e| format!("`{key}`: {e}"))
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>, String> {
        kv::parse_floats(self.raw(key)?).map_err(|e| format!("`{key}`: {e}"))
    }

    /// Semicolon-separated groups of integers, e.g. `2 2 4; 3 3 9`.
    fn groups(&self, key: &str) -> Result<Vec<Vec<usize>>, String> {
        self.raw(key)?
            .split(';')
            .map(|g| {
                g.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>().map_err(|e| format!("`{key}`: `{t}`: {e}")))
                    .collect()
            })
            .collect()
    }

    /// `prefix1`, `prefix2`, … until the first gap.
    fn numbered(&self, prefix: &str, start: usize) -> Result<Vec<Vec<f64>>, String> {
        let mut out = Vec::new();
        let mut i = start;
        while self.has(&format!("{prefix}{i}")) {
            out.push(self.floats(&format!("{prefix}{i}"))?);
            i += 1;
        }
        Ok(out)
    }
}

fn load(source: &FixtureSource, name: &str) -> Result<Fixture, String> {
    let text = match source {
        FixtureSource::Embedded => embedded(name).ok_or_else(|| format!("no fixture for `{name}`"))?.to_string(),
        FixtureSource::Dir(dir) => {
            let path = dir.join(format!("{name}.kv"));
            std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?
        }
    };
    kv::parse(&text).map(Fixture).map_err(|e| format!("fixture syntax: {e}"))
}

/// Writes the fixture files to `dir`, e.g. as a starting point for edits.
pub fn export_fixtures(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for name in SUITES {
        std::fs::write(dir.join(format!("{name}.kv")), embedded(name).expect("every suite has a fixture"))?;
    }
    Ok(())
}

fn run_suite(name: &str, fx: &Fixture) -> Result<String, String> {
    match name {
        "rgnp_d6_trace" => rgnp_d6_trace(fx),
        "d2_optimal_layout" => d2_optimal_layout(fx),
        "ghz" => ghz(fx),
        "low_rank_ceiling" => low_rank_ceiling(fx),
        "coset_invariance" => coset_invariance(fx),
        "d2_second_derivatives" => d2_second_derivatives(fx),
        "d3_second_derivatives" => d3_second_derivatives(fx),
        "mutual_info_sum" => mutual_info_sum(fx),
        _ => Err(format!("unknown suite `{name}`")),
    }
}

fn e(err: qmi_core::Error) -> String {
    err.to_string()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn check_close(label: &str, expected: f64, got: f64, tol: f64, diff: &mut String) {
    if !((expected - got).abs() <= tol) {
        let _ = writeln!(diff, "{label}: expected {expected}, got {got} (tol {tol:e})");
    }
}

fn finish(diff: String, summary: String) -> Result<String, String> {
    if diff.is_empty() {
        Ok(summary)
    } else {
        Err(format!("mismatch\n{}", diff.trim_end()))
    }
}

fn rgnp_d6_trace(fx: &Fixture) -> Result<String, String> {
    let (k_a, k_b): (usize, usize) = (fx.num("k_a")?, fx.num("k_b")?);
    let input = PartitionInput::balanced(fx.floats("input")?, k_a, k_b).map_err(e)?;
    let expected = fx.numbered("set", 1)?;
    let got = rgnp(&input).map_err(e)?.sets;
    let mut diff = String::new();
    if expected.len() != got.len() {
        let _ = writeln!(diff, "expected {} sets, got {}", expected.len(), got.len());
    }
    for i in 0..expected.len().max(got.len()) {
        let (a, b) = (expected.get(i), got.get(i));
        if a != b {
            let _ = writeln!(diff, "set{}:", i + 1);
            let _ = writeln!(diff, "- {}", a.map(|v| fmt_list(v)).unwrap_or_else(|| "(none)".into()));
            let _ = writeln!(diff, "+ {}", b.map(|v| fmt_list(v)).unwrap_or_else(|| "(none)".into()));
        }
    }
    finish(diff, format!("{} sets of {k_b} reproduced", got.len()))
}

fn h2(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

fn d2_optimal_layout(fx: &Fixture) -> Result<String, String> {
    let rows = vec![
        fx.floats("row0")?.iter().map(|&x| x as usize).collect::<Vec<_>>(),
        fx.floats("row1")?.iter().map(|&x| x as usize).collect::<Vec<_>>(),
    ];
    let tol: f64 = fx.num("tol")?;
    let mut spectra = fx.numbered("spectrum", 1)?;
    let seed: u64 = fx.num("seed")?;
    for i in 0..fx.num::<u64>("random_spectra")? {
        spectra.push(random_spectrum(2, 2, seed.wrapping_add(i)).probs().to_vec());
    }
    let mut diff = String::new();
    for (i, p) in spectra.iter().enumerate() {
        let spec = Spectrum::from_probs(2, 2, p.clone()).map_err(e)?;
        let r = closed_form_d2(&spec).map_err(e)?;
        if r.assignment.rows() != rows {
            let _ = writeln!(diff, "spectrum {i}: layout\n- {rows:?}\n+ {:?}", r.assignment.rows());
        }
        // rows {p0, p3}, {p1, p2}; columns {p0, p1}, {p3, p2}
        let formula = h2(p[0] + p[3]) - h2(p[0] + p[1]);
        check_close(&format!("spectrum {i}: closed form vs row/column formula"), formula, r.delta_s, tol, &mut diff);
        let best = (0..6)
            .map(|k| apply_assignment(&spec, &d2_coset_assignment(k)).map(|x| x.delta_s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        check_close(&format!("spectrum {i}: closed form vs best coset"), best, r.delta_s, tol, &mut diff);
    }
    finish(diff, format!("{} spectra use the optimal layout", spectra.len()))
}

fn ghz(fx: &Fixture) -> Result<String, String> {
    let tol: f64 = fx.num("tol")?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = h;
    amps[7] = h;
    let psi = TripartitePureState::new(Dims::new(2, 2, 2), amps).map_err(e)?;
    let r = mutual_info_report(&psi).map_err(e)?;
    let mut diff = String::new();
    for (key, got) in [
        ("s_a", r.s_a),
        ("s_b", r.s_b),
        ("s_c", r.s_c),
        ("s_ab", r.s_ab),
        ("i_ac", r.i_ac),
        ("i_bc", r.i_bc),
        ("i_ab_c", r.i_ab_c),
        ("delta_s", r.delta_s),
        ("rank_c", r.rank_c as f64),
    ] {
        check_close(key, fx.num(key)?, got, tol, &mut diff);
    }
    let (_, opt) = theorem1_optimal_unitary(&psi).map_err(e)?;
    for (key, got) in [("optimal_delta_s", opt.delta_s), ("optimal_i_ac", opt.i_ac), ("optimal_i_bc", opt.i_bc)] {
        check_close(key, fx.num(key)?, got, tol, &mut diff);
    }
    finish(diff, "entropies and optimum match".into())
}

fn dims3(g: &[usize], key: &str) -> Result<Dims, String> {
    match g {
        [a, b, c] => Ok(Dims::new(*a, *b, *c)),
        _ => Err(format!("`{key}` groups must have three entries, got {g:?}")),
    }
}

fn low_rank_ceiling(fx: &Fixture) -> Result<String, String> {
    let tol: f64 = fx.num("tol")?;
    let states: u64 = fx.num("states")?;
    let seed: u64 = fx.num("seed")?;
    let mut diff = String::new();
    let mut n = 0;
    for g in fx.groups("dims")? {
        let dims = dims3(&g, "dims")?;
        for i in 0..states {
            let psi = random_pure_state_with_rank(dims, dims.c.min(dims.a), seed.wrapping_add(i)).map_err(e)?;
            let (u, r) = theorem1_optimal_unitary(&psi).map_err(e)?;
            let label = format!("{g:?} state {i}");
            check_close(&format!("{label}: delta_s - s_c"), 0.0, r.delta_s - r.s_c, tol, &mut diff);
            check_close(&format!("{label}: i_bc"), 0.0, r.i_bc, tol, &mut diff);
            // the reported values must be those of the transformed state
            let after = mutual_info_report(&apply_bipartite_unitary(&psi, &u).map_err(e)?).map_err(e)?;
            check_close(&format!("{label}: recomputed delta_s"), r.delta_s, after.delta_s, tol, &mut diff);
            n += 1;
        }
    }
    finish(diff, format!("{n} states reach the ceiling"))
}

fn coset_invariance(fx: &Fixture) -> Result<String, String> {
    let tol: f64 = fx.num("tol")?;
    let seed: u64 = fx.num("seed")?;
    let (spectra, relabelings): (u64, usize) = (fx.num("spectra")?, fx.num("relabelings")?);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut diff = String::new();
    let mut n = 0;
    for g in fx.groups("dims")? {
        let [d_a, d_b] = g[..] else {
            return Err(format!("`dims` groups must have two entries, got {g:?}"));
        };
        for i in 0..spectra {
            let spec = random_spectrum(d_a, d_b, seed.wrapping_add(i));
            let mut cells: Vec<usize> = (0..d_a * d_b).collect();
            cells.shuffle(&mut rng);
            let cell_of = cells.iter().map(|&c| (c / d_b, c % d_b)).collect();
            let s = qmi_core::permopt::LatticeAssignment::new(d_a, d_b, cell_of).map_err(e)?;
            let base = apply_assignment(&spec, &s).map_err(e)?.delta_s;
            for _ in 0..relabelings {
                let mut rows: Vec<usize> = (0..d_a).collect();
                let mut cols: Vec<usize> = (0..d_b).collect();
                rows.shuffle(&mut rng);
                cols.shuffle(&mut rng);
                let t = s.relabel(&rows, &cols).map_err(e)?;
                let v = apply_assignment(&spec, &t).map_err(e)?.delta_s;
                check_close(&format!("{d_a}x{d_b} spectrum {i} rows {rows:?} cols {cols:?}"), base, v, tol, &mut diff);
                n += 1;
            }
        }
    }
    finish(diff, format!("{n} relabelings leave delta_s unchanged"))
}

/// `d²/dt² ΔS(e^{itG} U ρ U† e^{−itG})` at `t = 0` by central differences.
fn second_difference(rho: &DensityMatrix, d: usize, u: &ComplexMatrix, basis: &GeneratorBasis, a: usize, step: f64) -> Result<f64, String> {
    let f = |t: f64| -> Result<f64, String> {
        let mut h = vec![0.0; basis.len()];
        h[a] = t;
        let w = build_unitary(basis, &ParamVector::new(h).map_err(e)?).map_err(e)?;
        delta_s_objective(rho, d, d, &w.matmul(u)).map_err(e)
    };
    Ok((f(step)? - 2.0 * f(0.0)? + f(-step)?) / (step * step))
}

fn d2_second_derivatives(fx: &Fixture) -> Result<String, String> {
    let (step, tol): (f64, f64) = (fx.num("step")?, fx.num("tol")?);
    let seed: u64 = fx.num("seed")?;
    let mut spectra = fx.numbered("spectrum", 1)?;
    for i in 0..fx.num::<u64>("random_spectra")? {
        spectra.push(random_spectrum(2, 2, seed.wrapping_add(i)).probs().to_vec());
    }
    let basis = GeneratorBasis::pauli_product();
    let mut diff = String::new();
    for (i, p) in spectra.iter().enumerate() {
        let spec = Spectrum::from_probs(2, 2, p.clone()).map_err(e)?;
        let rho = DensityMatrix::diagonal(p).map_err(e)?;
        let u = closed_form_d2(&spec).map_err(e)?.unitary;
        for (a, &(m, n)) in basis.labels().iter().enumerate() {
            let closed = second_derivative_closed_form_d2(p, D2Family::of_label(m, n)).map_err(e)?;
            let fd = second_difference(&rho, 2, &u, &basis, a, step)?;
            check_close(&format!("spectrum {i} generator ({m},{n})"), closed, fd, tol, &mut diff);
            if closed > 1e-12 {
                let _ = writeln!(diff, "spectrum {i} generator ({m},{n}): positive second derivative {closed}");
            }
        }
    }
    finish(diff, format!("{} spectra x {} generators agree", spectra.len(), basis.len()))
}

fn d3_second_derivatives(fx: &Fixture) -> Result<String, String> {
    let (step, tol): (f64, f64) = (fx.num("step")?, fx.num("tol")?);
    let seed: u64 = fx.num("seed")?;
    let basis = GeneratorBasis::gell_mann_product(3, 3).map_err(e)?;
    let mut diff = String::new();
    let count = fx.num::<u64>("random_spectra")?;
    for i in 0..count {
        let spec = random_spectrum(3, 3, seed.wrapping_add(i));
        let opt = exhaustive_search(&spec).map_err(e)?;
        let rho = DensityMatrix::diagonal(spec.probs()).map_err(e)?;
        // lattice entries in row-major cell order
        let mut s = vec![0.0; 9];
        for (k, c) in opt.assignment.cells().into_iter().enumerate() {
            s[c] = spec.probs()[k];
        }
        for form in D3Form::ALL {
            let (m, n) = form.generator_label();
            let a = basis.index_of(m, n).ok_or("generator missing from basis")?;
            let closed = second_derivative_closed_form_d3(&s, form).map_err(e)?;
            let fd = second_difference(&rho, 3, &opt.unitary, &basis, a, step)?;
            check_close(&format!("spectrum {i} {form:?}"), closed, fd, tol, &mut diff);
        }
    }
    finish(diff, format!("{count} optima x {} forms agree", D3Form::ALL.len()))
}

fn mutual_info_sum(fx: &Fixture) -> Result<String, String> {
    let tol: f64 = fx.num("tol")?;
    let states: u64 = fx.num("states")?;
    let seed: u64 = fx.num("seed")?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut diff = String::new();
    let mut n = 0;
    for g in fx.groups("dims")? {
        let dims = dims3(&g, "dims")?;
        for i in 0..states {
            let psi = random_pure_state(dims, seed.wrapping_add(i)).map_err(e)?;
            let u = random_unitary(dims.ab(), &mut rng);
            let moved = apply_bipartite_unitary(&psi, &u).map_err(e)?;
            for (which, st) in [("before", &psi), ("after", &moved)] {
                let r = mutual_info_report(st).map_err(e)?;
                check_close(&format!("{g:?} state {i} {which}"), 2.0 * r.s_c, r.i_ac + r.i_bc, tol, &mut diff);
                n += 1;
            }
        }
    }
    finish(diff, format!("{n} states satisfy the identity"))
}
