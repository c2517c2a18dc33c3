//! Convergence studies over `(k, eps2, eps1, N)` grids and their CSV,
//! markdown and JSON emitters.
//!
//! Cases run in table order (rows = eps1, columns = N, one block per
//! `(k, eps2)` pair); a failing case is recorded in place and never aborts
//! the sweep. With `jobs > 1` cases are dispatched to a worker pool, but
//! results are stored by config order, so output is independent of
//! scheduling. The CSV emitter leaves the `elapsed` column empty unless
//! timing is explicitly requested, keeping reruns byte-identical.

use crate::analysis::{run_case, CaseParams, ErrorReport};
use crate::error::{Error, Result};
use crate::linsolve::SolverConfig;
use crate::problem::builtin;
use serde::Serialize;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Markdown,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown output format `{other}` (expected csv, markdown or json)"
            ))),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "md",
            OutputFormat::Json => "json",
        }
    }
}

/// Full description of one study sweep.
#[derive(Debug, Clone, Serialize)]
pub struct StudyConfig {
    pub problem: String,
    pub ks: Vec<usize>,
    pub ns: Vec<usize>,
    pub eps1: Vec<f64>,
    pub eps2: Vec<f64>,
    /// Grading exponent; `None` uses `k + 1` per degree.
    pub tau: Option<f64>,
    pub p: f64,
    pub delta: f64,
    pub quad_assembly: Option<usize>,
    pub quad_error: Option<usize>,
    pub solver: SolverConfig,
    pub jobs: usize,
    /// Report wall-clock times in the CSV `elapsed` column (breaks
    /// byte-identical reruns, hence opt-in).
    pub timing: bool,
}

impl StudyConfig {
    pub fn new(problem: &str) -> Self {
        StudyConfig {
            problem: problem.to_string(),
            ks: vec![1],
            ns: vec![8, 16, 32, 64],
            eps1: vec![1e-6],
            eps2: vec![1e-4],
            tau: None,
            p: 0.5,
            delta: 0.25,
            quad_assembly: None,
            quad_error: None,
            solver: SolverConfig::default(),
            jobs: 1,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() || self.ns.is_empty() || self.eps1.is_empty() || self.eps2.is_empty()
        {
            return Err(Error::Config(
                "k, N, eps1 and eps2 lists must all be nonempty".into(),
            ));
        }
        for &n in &self.ns {
            if n < 8 || n % 4 != 0 {
                return Err(Error::Config(format!(
                    "N must be >= 8 and divisible by 4, got {n}"
                )));
            }
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("N list must be strictly increasing".into()));
        }
        for &k in &self.ks {
            if k < 1 || k > 10 {
                return Err(Error::Config(format!("k must lie in 1..=10, got {k}")));
            }
            if let Some(tau) = self.tau {
                if tau < (k + 1) as f64 {
                    return Err(Error::Config(format!(
                        "tau = {tau} is below the admissible k + 1 = {}",
                        k + 1
                    )));
                }
            }
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be positive".into()));
        }
        Ok(())
    }

    fn tau_for(&self, k: usize) -> f64 {
        self.tau.unwrap_or((k + 1) as f64)
    }
}

/// Outcome of one case: a report or the error message in its place.
#[derive(Debug, Clone, Serialize)]
pub struct CaseOutcome {
    pub n: usize,
    pub k: usize,
    pub eps1: f64,
    pub eps2: f64,
    #[serde(flatten)]
    pub result: CaseResult,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CaseResult {
    Ok { report: ErrorReport },
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub cases: Vec<CaseOutcome>,
}

impl StudyResult {
    pub fn any_failed(&self) -> bool {
        self.cases
            .iter()
            .any(|c| matches!(c.result, CaseResult::Failed { .. }))
    }
}

/// Runs every `(k, eps2, eps1, N)` combination of `config`.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;

    struct CaseSpec {
        k: usize,
        eps2: f64,
        eps1: f64,
        n: usize,
    }
    let mut specs = Vec::new();
    for &k in &config.ks {
        for &eps2 in &config.eps2 {
            for &eps1 in &config.eps1 {
                for &n in &config.ns {
                    specs.push(CaseSpec { k, eps2, eps1, n });
                }
            }
        }
    }

    let run_one = |spec: &CaseSpec| -> CaseOutcome {
        let result = builtin(&config.problem, spec.eps1, spec.eps2).and_then(|problem| {
            let params = CaseParams {
                n: spec.n,
                k: spec.k,
                tau: config.tau_for(spec.k),
                p: config.p,
                delta: config.delta,
                quad_assembly: config.quad_assembly,
                quad_error: config.quad_error,
            };
            run_case(&problem, &params, &config.solver)
        });
        CaseOutcome {
            n: spec.n,
            k: spec.k,
            eps1: spec.eps1,
            eps2: spec.eps2,
            result: match result {
                Ok(report) => CaseResult::Ok { report },
                Err(e) => CaseResult::Failed {
                    error: e.to_string(),
                },
            },
        }
    };

    let mut outcomes: Vec<Option<CaseOutcome>> = (0..specs.len()).map(|_| None).collect();
    let jobs = config.jobs.min(specs.len().max(1));
    if jobs <= 1 {
        for (slot, spec) in outcomes.iter_mut().zip(&specs) {
            *slot = Some(run_one(spec));
        }
    } else {
        let next = AtomicUsize::new(0);
        let slots = Mutex::new(&mut outcomes);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= specs.len() {
                        break;
                    }
                    let outcome = run_one(&specs[i]);
                    slots.lock().unwrap()[i] = Some(outcome);
                });
            }
        });
    }
    let mut cases: Vec<CaseOutcome> = outcomes.into_iter().map(|o| o.unwrap()).collect();

    // Rates along N within each (k, eps2, eps1) series; the doubling
    // formula generalizes to ln(e1/e2) / ln(n2/n1).
    let nn = config.ns.len();
    for series in cases.chunks_mut(nn) {
        for i in 0..nn.saturating_sub(1) {
            let e_next = match &series[i + 1].result {
                CaseResult::Ok { report } => Some((report.n, report.e_energy)),
                CaseResult::Failed { .. } => None,
            };
            if let (CaseResult::Ok { report }, Some((n2, e2))) = (&mut series[i].result, e_next) {
                if report.e_energy > 0.0 && e2 > 0.0 {
                    report.rate_energy =
                        Some((report.e_energy / e2).ln() / (n2 as f64 / report.n as f64).ln());
                }
            }
        }
    }

    Ok(StudyResult {
        config: config.clone(),
        cases,
    })
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    match v {
        Some(x) => format!("{x:.prec$}"),
        None => String::new(),
    }
}

/// One CSV row per case, in study order.
pub fn write_csv(result: &StudyResult, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "N,k,eps1,eps2,tau,p,delta,e_energy,e_l2,e_h1,rate_energy,solver_iters,residual,elapsed"
    )?;
    for case in &result.cases {
        let tau = result.config.tau_for(case.k);
        match &case.result {
            CaseResult::Ok { report } => {
                let elapsed = if result.config.timing {
                    format!("{:.3}", report.solve.elapsed)
                } else {
                    String::new()
                };
                writeln!(
                    out,
                    "{},{},{:e},{:e},{},{},{},{:.6e},{:.6e},{:.6e},{},{},{:.3e},{}",
                    case.n,
                    case.k,
                    case.eps1,
                    case.eps2,
                    tau,
                    result.config.p,
                    result.config.delta,
                    report.e_energy,
                    report.e_l2,
                    report.e_h1,
                    fmt_opt(report.rate_energy, 4),
                    report.solve.iterations,
                    report.solve.residual,
                    elapsed
                )?;
            }
            CaseResult::Failed { .. } => {
                writeln!(
                    out,
                    "{},{},{:e},{:e},{},{},{},,,,,,,",
                    case.n, case.k, case.eps1, case.eps2, tau, result.config.p, result.config.delta
                )?;
            }
        }
    }
    Ok(())
}

/// Markdown tables in the usual convergence-table shape: one block per
/// `(k, eps2)`, one error row and one rate row per eps1.
pub fn write_markdown(result: &StudyResult, out: &mut dyn Write) -> Result<()> {
    let cfg = &result.config;
    writeln!(out, "# study: {}", cfg.problem)?;
    let nn = cfg.ns.len();
    let mut idx = 0usize;
    for &k in &cfg.ks {
        for &eps2 in &cfg.eps2 {
            writeln!(out, "\n## k = {k}, eps2 = {eps2:e}\n")?;
            write!(out, "| eps1 |")?;
            for &n in &cfg.ns {
                write!(out, " N={n} |")?;
            }
            writeln!(out)?;
            write!(out, "|---|")?;
            for _ in &cfg.ns {
                write!(out, "---|")?;
            }
            writeln!(out)?;
            for &eps1 in &cfg.eps1 {
                let series = &result.cases[idx..idx + nn];
                idx += nn;
                write!(out, "| {eps1:e} |")?;
                for case in series {
                    match &case.result {
                        CaseResult::Ok { report } => write!(out, " {:.2e} |", report.e_energy)?,
                        CaseResult::Failed { .. } => write!(out, " err |")?,
                    }
                }
                writeln!(out)?;
                write!(out, "| rate |")?;
                for case in series {
                    match &case.result {
                        CaseResult::Ok { report } => match report.rate_energy {
                            Some(r) => write!(out, " {r:.2} |")?,
                            None => write!(out, " -- |")?,
                        },
                        CaseResult::Failed { .. } => write!(out, " -- |")?,
                    }
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Full records including configuration and warnings.
pub fn write_json(result: &StudyResult, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, result)
        .map_err(|e| Error::Config(format!("study json: {e}")))?;
    writeln!(out)?;
    Ok(())
}

/// Writes `result` in `format` to `<base>.<ext>` and returns the path.
pub fn emit(
    result: &StudyResult,
    format: OutputFormat,
    base: &std::path::Path,
) -> Result<std::path::PathBuf> {
    if result.cases.is_empty() {
        return Err(Error::Config("refusing to emit an empty study".into()));
    }
    let path = base.with_extension(format.extension());
    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    match format {
        OutputFormat::Csv => write_csv(result, &mut file)?,
        OutputFormat::Markdown => write_markdown(result, &mut file)?,
        OutputFormat::Json => write_json(result, &mut file)?,
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> StudyConfig {
        let mut cfg = StudyConfig::new("two-param");
        cfg.ks = vec![1];
        cfg.ns = vec![8, 16];
        cfg.eps1 = vec![1e-6];
        cfg.eps2 = vec![1e-4];
        cfg
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = tiny_config();
        cfg.ns.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = tiny_config();
        cfg.ns = vec![8, 10];
        assert!(cfg.validate().is_err());

        let mut cfg = tiny_config();
        cfg.ns = vec![16, 8];
        assert!(cfg.validate().is_err());

        let mut cfg = tiny_config();
        cfg.tau = Some(1.5);
        assert!(cfg.validate().is_err());

        let mut cfg = tiny_config();
        cfg.jobs = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn case_count_is_cartesian_product() {
        let mut cfg = tiny_config();
        cfg.eps1 = vec![1e-6, 1e-8];
        let result = run_study(&cfg).unwrap();
        assert_eq!(result.cases.len(), 4);
        assert!(!result.any_failed());
        // Rates only where the next N exists.
        for case in &result.cases {
            if let CaseResult::Ok { report } = &case.result {
                assert_eq!(report.rate_energy.is_some(), case.n == 8);
            }
        }
    }

    #[test]
    fn csv_is_deterministic_and_parallel_matches_serial() {
        let mut cfg = tiny_config();
        cfg.eps1 = vec![1e-6, 1e-8];
        let r1 = run_study(&cfg).unwrap();
        let mut buf1 = Vec::new();
        write_csv(&r1, &mut buf1).unwrap();

        let r2 = run_study(&cfg).unwrap();
        let mut buf2 = Vec::new();
        write_csv(&r2, &mut buf2).unwrap();
        assert_eq!(buf1, buf2);

        cfg.jobs = 4;
        let r3 = run_study(&cfg).unwrap();
        let mut buf3 = Vec::new();
        write_csv(&r3, &mut buf3).unwrap();
        assert_eq!(buf1, buf3);
    }

    #[test]
    fn unknown_problem_is_recorded_not_fatal() {
        let mut cfg = tiny_config();
        cfg.problem = "missing".into();
        let result = run_study(&cfg).unwrap();
        assert!(result.any_failed());
        assert_eq!(result.cases.len(), 2);
    }

    #[test]
    fn markdown_shape() {
        let cfg = tiny_config();
        let result = run_study(&cfg).unwrap();
        let mut buf = Vec::new();
        write_markdown(&result, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("## k = 1, eps2 = 1e-4"));
        assert!(text.contains("| eps1 | N=8 | N=16 |"));
        // One error row and one rate row for the single eps1.
        assert_eq!(text.matches("| rate |").count(), 1);
        assert!(text.contains("-- |"));
    }

    #[test]
    fn json_warnings_flag_invalid_regime() {
        let mut cfg = tiny_config();
        cfg.eps1 = vec![1e-4, 1e-6];
        let result = run_study(&cfg).unwrap();
        let mut buf = Vec::new();
        write_json(&result, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let cases = v["cases"].as_array().unwrap();
        for case in cases {
            let eps1 = case["eps1"].as_f64().unwrap();
            let warnings = case["report"]["warnings"].as_array().unwrap();
            if eps1 <= 1e-6 {
                assert!(warnings.is_empty(), "unexpected warnings inside the regime");
            } else {
                assert!(!warnings.is_empty(), "missing warnings at eps1 = {eps1}");
            }
        }
    }

    /// At the default grading constants, warnings appear exactly for the
    /// parameter pairs outside eps1 <= 1e-6, eps2 <= 1e-3 (the regime
    /// where the mesh is fully graded and the rate assumption holds for
    /// the whole N range of the experiments).
    #[test]
    fn warnings_match_valid_regime_across_the_grid() {
        let mut cfg = tiny_config();
        cfg.ns = vec![8];
        cfg.eps1 = vec![1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10];
        cfg.eps2 = vec![1.0, 1e-4, 1e-8];
        let result = run_study(&cfg).unwrap();
        for case in &result.cases {
            let CaseResult::Ok { report } = &case.result else {
                panic!("case failed at ({:e}, {:e})", case.eps1, case.eps2);
            };
            let inside = case.eps1 <= 1e-6 && case.eps2 <= 1e-3;
            assert_eq!(
                report.warnings.is_empty(),
                inside,
                "eps=({:e}, {:e}): warnings {:?}",
                case.eps1,
                case.eps2,
                report.warnings
            );
        }
    }
}
