//! The four subcommands. Each reads its inputs, runs one core operation,
//! writes deterministic artifacts under `--out`, and returns a [`RunReport`].

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gsvkit_core::density::{build_density, check_positivity_chain, density_norm, density_trace};
use gsvkit_core::stat_norm::{rank_by_score, StatMatrix};
use gsvkit_core::{
    brute_force_max, gsv_solve, weighted_gsv_solve, Error as CoreError, GsvSolution, OperatorStack,
    WeightedProblem,
};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::CliError;
use crate::io::{self, fmt_f64, Loaded};
use crate::report::{InputDigest, RunReport, SCHEMA_VERSION};

#[derive(Debug, Clone)]
pub struct GlobalOpts {
    pub gap_rtol: f64,
    pub oracle_samples: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for GlobalOpts {
    fn default() -> Self {
        Self {
            gap_rtol: gsvkit_core::DEFAULT_GAP_RTOL,
            oracle_samples: 0,
            seed: 42,
            out: PathBuf::from("."),
        }
    }
}

struct Run {
    report: RunReport,
    started: Instant,
    out: PathBuf,
}

impl Run {
    fn start(subcommand: &str, opts: &GlobalOpts) -> Result<Self, CliError> {
        if !(opts.gap_rtol > 0.0 && opts.gap_rtol < 1.0) {
            return Err(CliError::Invalid(format!(
                "--gap-rtol must lie in (0, 1), got {}",
                opts.gap_rtol
            )));
        }
        Ok(Self {
            report: RunReport::new(subcommand),
            started: Instant::now(),
            out: opts.out.clone(),
        })
    }

    fn load(&mut self, path: &Path) -> Result<Loaded, CliError> {
        let file = io::load(path)?;
        self.report.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: file.digest.clone(),
        });
        Ok(file)
    }

    fn emit(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        fs::write(&path, contents)?;
        self.report.outputs.push(path.display().to_string());
        Ok(())
    }

    fn record_solution(&mut self, sol: &GsvSolution) {
        self.report.lambda_max = Some(sol.lambda_max);
        self.report.multiplicity = Some(sol.multiplicity());
        self.report.residual = Some(sol.residual);
    }

    fn finish(mut self) -> RunReport {
        self.report.wall_time_ms = self.started.elapsed().as_millis() as u64;
        self.report
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct OracleSummary {
    samples: usize,
    seed: u64,
    lower_bound: f64,
    gap: f64,
}

#[derive(Serialize)]
struct SolutionFile {
    schema: u32,
    lambda_max: f64,
    multiplicity: usize,
    whole_space: bool,
    residual: f64,
    objective_check: f64,
    /// `n` rows of `multiplicity` entries.
    basis: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSummary>,
}

pub fn cmd_solve(matrix_files: &[PathBuf], opts: &GlobalOpts) -> Result<RunReport, CliError> {
    let mut run = Run::start("solve", opts)?;
    if matrix_files.is_empty() {
        return Err(CliError::Invalid("at least one matrix file is required".into()));
    }
    let mut mats = Vec::with_capacity(matrix_files.len());
    for path in matrix_files {
        let file = run.load(path)?;
        let m = io::parse_matrix(&file)?;
        if let Some(first) = mats.first().map(|f: &DMatrix<f64>| f.ncols()) {
            if m.ncols() != first {
                return Err(CliError::input(
                    path,
                    None,
                    format!("matrix has {} columns, expected {}", m.ncols(), first),
                ));
            }
        }
        mats.push(m);
    }
    let stack = OperatorStack::new(mats).map_err(CliError::from_solve)?;
    let sol = gsv_solve(&stack, opts.gap_rtol).map_err(CliError::from_solve)?;

    let oracle = if opts.oracle_samples > 0 {
        let lower_bound =
            brute_force_max(&stack, opts.oracle_samples, opts.seed).map_err(CliError::from_solve)?;
        run.report.seed = Some(opts.seed);
        Some(OracleSummary {
            samples: opts.oracle_samples,
            seed: opts.seed,
            lower_bound,
            gap: sol.lambda_max - lower_bound,
        })
    } else {
        None
    };

    let file = SolutionFile {
        schema: SCHEMA_VERSION,
        lambda_max: sol.lambda_max,
        multiplicity: sol.multiplicity(),
        whole_space: sol.whole_space,
        residual: sol.residual,
        objective_check: sol.objective_check,
        basis: rows_of(&sol.basis),
        oracle,
    };
    run.emit("solution.json", &to_json(&file))?;
    run.record_solution(&sol);
    Ok(run.finish())
}

pub fn cmd_coil(ex: &Path, ey: &Path, ez: &Path, r: &Path, opts: &GlobalOpts) -> Result<RunReport, CliError> {
    let mut run = Run::start("coil", opts)?;
    let mut fields = Vec::with_capacity(3);
    for path in [ex, ey, ez] {
        let file = run.load(path)?;
        let m = io::parse_matrix(&file)?;
        if let Some(first) = fields.first().map(|f: &DMatrix<f64>| f.shape()) {
            if m.shape() != first {
                return Err(CliError::input(
                    path,
                    None,
                    format!("field matrix is {}x{}, expected {}x{}", m.nrows(), m.ncols(), first.0, first.1),
                ));
            }
        }
        fields.push(m);
    }
    let r_file = run.load(r)?;
    let resistance = io::parse_matrix(&r_file)?;
    if resistance.nrows() != resistance.ncols() || resistance.ncols() != fields[0].ncols() {
        return Err(CliError::input(
            r,
            None,
            format!(
                "resistance is {}x{}, expected {n}x{n}",
                resistance.nrows(),
                resistance.ncols(),
                n = fields[0].ncols()
            ),
        ));
    }

    let prob = WeightedProblem::new(fields, resistance.clone()).map_err(|e| match e {
        CoreError::NotSpd { .. } | CoreError::NotSymmetric { .. } => CliError::NotSpd(e),
        other => CliError::from_solve(other),
    })?;
    let sol = weighted_gsv_solve(&prob, opts.gap_rtol).map_err(CliError::from_solve)?;
    let psi = &sol.psi;
    let energy = psi.dot(&(&resistance * psi));

    let psi_col = DMatrix::from_column_slice(psi.len(), 1, psi.as_slice());
    run.emit("psi.csv", &io::write_matrix_csv(&psi_col))?;
    let peak = psi.amax();
    let normalized = if peak > 0.0 { &psi_col / peak } else { psi_col.clone() };
    run.emit("psi_normalized.csv", &io::write_matrix_csv(&normalized))?;

    run.record_solution(&sol.solution);
    run.report.psi_r_psi = Some(energy);
    Ok(run.finish())
}

pub fn cmd_rank(data: &Path, standardize: bool, opts: &GlobalOpts) -> Result<RunReport, CliError> {
    let mut run = Run::start("rank", opts)?;
    let file = run.load(data)?;
    let table = io::parse_data_table(&file)?;
    let matrix = if standardize {
        StatMatrix::from_raw(&table.values).map_err(|e| match e {
            CoreError::ConstantColumn { index } => CliError::ConstantColumn {
                column: table.columns[index].clone(),
            },
            other => CliError::from_solve(other),
        })?
    } else {
        StatMatrix::from_data(table.values.clone()).map_err(CliError::from_solve)?
    };
    let ranking = rank_by_score(&matrix, opts.gap_rtol).map_err(CliError::from_solve)?;

    let mut ranked = String::from("rank,id,score\n");
    for (pos, row) in ranking.rows.iter().enumerate() {
        ranked.push_str(&format!("{},{},{}\n", pos + 1, table.ids[row.index], fmt_f64(row.score)));
    }
    run.emit("ranking.csv", &ranked)?;

    let mut plot = String::from("id,score\n");
    for (id, score) in table.ids.iter().zip(&ranking.scores) {
        plot.push_str(&format!("{},{}\n", id, fmt_f64(*score)));
    }
    run.emit("scores_plot.csv", &plot)?;

    run.record_solution(&ranking.solution);
    Ok(run.finish())
}

#[derive(Serialize)]
struct DensityFile {
    schema: u32,
    states: usize,
    norm: f64,
    support_index: usize,
    trace: f64,
    tail: f64,
    positivity_chain_ok: bool,
    trials: usize,
    seed: u64,
}

pub fn cmd_density(rho: &Path, trials: usize, opts: &GlobalOpts) -> Result<RunReport, CliError> {
    let mut run = Run::start("density", opts)?;
    if trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    let file = run.load(rho)?;
    let probs = io::parse_probabilities(&file)?;
    let model = build_density(&probs).map_err(|e| match e {
        CoreError::NegativeProbability { .. } | CoreError::MassExceedsOne { .. } => CliError::Probabilities(e),
        other => CliError::from_solve(other),
    })?;
    let (norm, support_index) = density_norm(&model);
    let out = DensityFile {
        schema: SCHEMA_VERSION,
        states: model.dim(),
        norm,
        support_index,
        trace: density_trace(&model),
        tail: model.tail(),
        positivity_chain_ok: check_positivity_chain(&model, trials, opts.seed),
        trials,
        seed: opts.seed,
    };
    run.emit("density.json", &to_json(&out))?;
    run.report.seed = Some(opts.seed);
    Ok(run.finish())
}
