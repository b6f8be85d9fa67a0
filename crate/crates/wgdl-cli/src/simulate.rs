//! `simulate`: run an evolution, stream records, write checkpoints and a summary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::Serialize;
use serde_json::json;
use wgdl::diagnostics::{csv_header, csv_row, morawetz_lhs_accumulate, morawetz_rhs_terms, scattering_residual, DiagnosticsRecord};
use wgdl::field::{make_gaussian, make_plane_wave, make_random_smooth, read_checkpoint, write_checkpoint, GaussianParams};
use wgdl::grid::make_grid;
use wgdl::propagator::{evolve, EvolveOptions, Observer, SolverState};
use wgdl::{ComplexField, Error};

use crate::config::{Format, InitialData, RunConfig};

/// Deepest rung of the scattering ladder: `t_end / 2^LADDER_DEPTH`.
pub const LADDER_DEPTH: u32 = 6;

pub struct SimulateArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub force: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Serialize)]
struct Rung {
    t1: f64,
    t2: f64,
    residual: f64,
    post_wrap: bool,
}

#[derive(Serialize)]
struct Summary {
    status: &'static str,
    abort: Option<String>,
    steps: usize,
    t_final: f64,
    /// `"inf"` when nothing propagates.
    t_wrap: serde_json::Value,
    records: usize,
    mass_drift: f64,
    energy_drift: f64,
    c_test: Option<f64>,
    scattering_ladder: Vec<Rung>,
    global_guarantee: bool,
    warnings: Vec<String>,
}

fn finite_or_inf(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn relative_drift(a: f64, b: f64) -> f64 {
    let scale = a.abs();
    if scale == 0.0 {
        (b - a).abs()
    } else {
        (b - a).abs() / scale
    }
}

fn build_initial(cfg: &RunConfig, seed: Option<u64>, force: bool) -> Result<(ComplexField, Vec<String>), RunError> {
    let grid = make_grid(cfg.grid.clone())?;
    let mut warnings = Vec::new();
    let field = match &cfg.initial {
        InitialData::Gaussian {
            width,
            center,
            modulation,
            amplitude,
        } => {
            let params = GaussianParams {
                center: center.clone(),
                width: *width,
                modulation: modulation.clone(),
                amplitude: *amplitude,
            };
            let (f, warn) = make_gaussian(&grid, &params)?;
            if let Some(w) = warn {
                if !force {
                    return Err(Error::Underresolved {
                        ratio: w.edge_tail_ratio,
                        threshold: w.threshold,
                    }
                    .into());
                }
                warnings.push(w.to_string());
            }
            f
        }
        InitialData::PlaneWave { k, amplitude } => make_plane_wave(&grid, k)?.scale(Complex::new(*amplitude, 0.0)),
        InitialData::RandomSmooth { seed: s, amplitude } => {
            make_random_smooth(&grid, seed.unwrap_or(*s))?.scale(Complex::new(*amplitude, 0.0))
        }
        InitialData::Checkpoint(path) => {
            let f: ComplexField = read_checkpoint(std::io::BufReader::new(File::open(path).map_err(io_err(path))?))?;
            if f.grid().spec() != &cfg.grid {
                return Err(Error::Checkpoint(format!("{} does not match the [grid] block", path.display())).into());
            }
            f
        }
    };
    Ok((field, warnings))
}

fn save(path: &Path, f: &ComplexField) -> Result<(), RunError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    write_checkpoint(f, &mut w)?;
    w.flush().map_err(io_err(path))
}

/// Steps at which ladder snapshots are taken, increasing.
fn ladder_steps(steps: usize, record_every: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=LADDER_DEPTH)
        .filter_map(|j| {
            let s = steps >> j;
            (s > 0 && s << j == steps && s % record_every == 0).then_some(s)
        })
        .collect();
    out.reverse();
    out
}

struct Sink<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    format: Format,
    records: BufWriter<File>,
    rhs: Option<BufWriter<File>>,
    header_written: bool,
    ladder_steps: Vec<usize>,
    ladder: Vec<(f64, ComplexField)>,
}

impl Sink<'_> {
    fn write(&mut self, state: &SolverState<f64>, rec: &DiagnosticsRecord) -> Result<(), RunError> {
        let path = self.out.join("records");
        let line = match self.format {
            Format::Ndjson => serde_json::to_string(rec).map_err(Error::from)?,
            Format::Csv => {
                if !self.header_written {
                    writeln!(self.records, "{}", csv_header(rec)).map_err(io_err(&path))?;
                    self.header_written = true;
                }
                csv_row(rec)
            }
        };
        writeln!(self.records, "{line}").map_err(io_err(&path))?;
        if let Some(w) = self.rhs.as_mut() {
            let terms = morawetz_rhs_terms(&state.field, &self.cfg.solver)?;
            let line = json!({ "t": rec.t, "terms": terms, "total": terms.total() });
            writeln!(w, "{line}").map_err(io_err(&self.out.join("morawetz_rhs.ndjson")))?;
        }
        let ce = self.cfg.checkpoint_every;
        if ce > 0 && state.step > 0 && state.step % ce == 0 {
            save(&self.out.join(format!("checkpoint_{:08}.wgdl", state.step)), &state.field)?;
        }
        if self.ladder_steps.contains(&state.step) {
            self.ladder.push((state.t, state.field.clone()));
        }
        Ok(())
    }
}

/// Run the configured evolution. `Ok(true)` means the run aborted on blowup.
pub fn run(args: &SimulateArgs) -> Result<bool, RunError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(f) = args.format {
        cfg.format = f;
    }
    let (initial, mut warnings) = build_initial(&cfg, args.seed, args.force)?;
    std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;

    let ext = match cfg.format {
        Format::Ndjson => "ndjson",
        Format::Csv => "csv",
    };
    let rec_path = args.out.join(format!("records.{ext}"));
    let rhs = if cfg.rhs_terms {
        let p = args.out.join("morawetz_rhs.ndjson");
        Some(BufWriter::new(File::create(&p).map_err(io_err(&p))?))
    } else {
        None
    };
    let mut sink = Sink {
        cfg: &cfg,
        out: &args.out,
        format: cfg.format,
        records: BufWriter::new(File::create(&rec_path).map_err(io_err(&rec_path))?),
        rhs,
        header_written: false,
        ladder_steps: ladder_steps(cfg.solver.steps(), cfg.solver.record_every),
        ladder: Vec::new(),
    };
    // The observer interface speaks library errors; keep the first sink error aside.
    let mut sink_error: Option<RunError> = None;
    let mut observer = |state: &SolverState<f64>, rec: &DiagnosticsRecord| -> wgdl::Result<()> {
        sink.write(state, rec).map_err(|e| {
            let msg = e.to_string();
            sink_error.get_or_insert(e);
            Error::InvalidArgument(msg)
        })
    };
    let observers: &mut [&mut dyn Observer<f64>] = &mut [&mut observer];
    let result = evolve(
        &cfg.solver,
        initial,
        &cfg.plan,
        EvolveOptions { force: args.force },
        observers,
    );
    let evo = match result {
        Ok(e) => e,
        Err(e) => return Err(sink_error.unwrap_or(e.into())),
    };
    let Sink {
        mut records, rhs, ladder, ..
    } = sink;
    records.flush().map_err(io_err(&rec_path))?;
    if let Some(mut w) = rhs {
        w.flush().map_err(io_err(&args.out.join("morawetz_rhs.ndjson")))?;
    }
    save(&args.out.join("final.wgdl"), &evo.final_state.field)?;

    let first = evo.records.first().expect("initial record");
    let last = evo.records.last().expect("initial record");
    let c_test = if cfg.plan.morawetz && !cfg.plan.r_list.is_empty() {
        Some(morawetz_lhs_accumulate(&evo.records)?.c_test)
    } else {
        None
    };
    let mut rungs = Vec::new();
    for w in ladder.windows(2) {
        let ((t1, u1), (t2, u2)) = (&w[0], &w[1]);
        rungs.push(Rung {
            t1: *t1,
            t2: *t2,
            residual: scattering_residual(u1, *t1, u2, *t2, &cfg.solver)?,
            post_wrap: *t2 > evo.t_wrap,
        });
    }
    if rungs.is_empty() && evo.abort.is_none() {
        warnings.push(format!(
            "no scattering ladder: fewer than two dyadic fractions t_end/2^j (j <= {LADDER_DEPTH}) fall on recorded steps"
        ));
    }
    if !evo.global_guarantee {
        warnings.push("focusing run outside the mass-subcritical range: no global existence guarantee".into());
    }
    let status = match &evo.abort {
        None => "ok",
        Some(wgdl::propagator::Abort::Blowup { .. }) => "blowup",
        Some(wgdl::propagator::Abort::NonFinite { .. }) => "nonfinite",
    };
    let summary = Summary {
        status,
        abort: evo.abort.as_ref().map(|a| a.to_string()),
        steps: evo.final_state.step,
        t_final: evo.final_state.t,
        t_wrap: finite_or_inf(evo.t_wrap),
        records: evo.records.len(),
        mass_drift: relative_drift(first.mass, last.mass),
        energy_drift: relative_drift(first.energy, last.energy),
        c_test,
        scattering_ladder: rungs,
        global_guarantee: evo.global_guarantee,
        warnings,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(Error::from)?;
    let sum_path = args.out.join("summary.json");
    std::fs::write(&sum_path, format!("{text}\n")).map_err(io_err(&sum_path))?;
    // A closed stdout (e.g. piped into `head`) must not turn a finished run into a failure.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(evo.abort.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_uses_exact_dyadic_steps() {
        assert_eq!(ladder_steps(1024, 1), vec![16, 32, 64, 128, 256, 512, 1024]);
        assert_eq!(ladder_steps(1024, 64), vec![64, 128, 256, 512, 1024]);
        assert_eq!(ladder_steps(12, 1), vec![3, 6, 12]);
    }

    #[test]
    fn drift_is_relative() {
        assert_eq!(relative_drift(2.0, 2.5), 0.25);
        assert_eq!(relative_drift(0.0, 1e-3), 1e-3);
    }
}
