//! Resolving arguments into validated jobs and executing them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use multirail::figures::{reproduce, Figure};
use multirail::fock::enumerate_basis;
use multirail::hw::{
    basis_cardinalities, check_complementary_set, clock_label, joint_classes, orbit_size,
};
use multirail::lon::{outcome_distribution_with, sample_outcomes, tally, MeasurementSetting};
use multirail::loss::{sweep_lossy, DEFAULT_LOSS_CUTOFF};
use multirail::source::{db_to_r, generate_postselected, linear_grid, sweep_displacement};
use multirail::table::{fmt_num, Table};
use multirail::verifier::{biproducible_bound, Verdict};
use multirail::{Exec, HwIndices, LossChannel, SourceSpec, SparseState, SystemShape, VerifierSpec};
use serde_json::{json, Value};

use crate::args::{Cli, Command, ShapeArgs, SqueezingArgs, VerifierArgs};

/// A fully validated unit of work.
#[derive(Debug)]
pub enum Job {
    Reproduce(Figure),
    Gen {
        shape: SystemShape,
        source: SourceSpec,
    },
    Verify {
        state: SparseState,
        spec: VerifierSpec,
        all_kappa: bool,
    },
    Sweep {
        shape: SystemShape,
        r: f64,
        grid: Vec<f64>,
        spec: VerifierSpec,
        loss: Option<(LossChannel, u32)>,
    },
    Stats {
        state: SparseState,
        setting: MeasurementSetting,
        samples: Option<(usize, u64)>,
    },
    Classes {
        shape: SystemShape,
        indices: Option<HwIndices>,
    },
}

#[derive(Debug)]
pub struct RunConfig {
    pub job: Job,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn shape(a: &ShapeArgs) -> Result<SystemShape> {
    Ok(SystemShape::new(a.parties, a.modes, a.photons.clone())?)
}

fn squeezing(a: &SqueezingArgs) -> Result<f64> {
    let r = match (a.r, a.r_db) {
        (Some(r), _) => r,
        (None, Some(db)) => db_to_r(db),
        (None, None) => bail!("a squeezed source needs --r or --r-db"),
    };
    if !(r > 0.0 && r.is_finite()) {
        bail!("squeezing must be positive, got r = {r} (use a coherent source for r = 0)");
    }
    Ok(r)
}

fn verifier(shape: &SystemShape, a: &VerifierArgs, k: usize, kappa: usize) -> Result<VerifierSpec> {
    let idx = HwIndices::new(shape, a.j.clone())?;
    let m = shape.modes();
    if k >= m || kappa >= m {
        bail!("k and kappa must lie in [0, {m}), got k = {k}, kappa = {kappa}");
    }
    Ok(match &a.labels {
        None => VerifierSpec::full(idx, k, kappa),
        Some(l) => VerifierSpec::new(idx, l, k, kappa)?,
    })
}

fn load_state(path: &Path) -> Result<SparseState> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read state file {}", path.display()))?;
    SparseState::from_json(&text).with_context(|| format!("invalid state file {}", path.display()))
}

fn setting(text: &str, shape: &SystemShape, j: Option<&Vec<usize>>) -> Result<MeasurementSetting> {
    if text == "computational" {
        return Ok(MeasurementSetting::Computational);
    }
    let l: usize = text
        .strip_prefix("l=")
        .ok_or_else(|| anyhow!("setting must be 'computational' or 'l=<int>', got '{text}'"))?
        .parse()
        .with_context(|| format!("bad measurement label in '{text}'"))?;
    let j = j.ok_or_else(|| anyhow!("setting {text} needs --j"))?;
    Ok(MeasurementSetting::hadamard(
        l,
        HwIndices::new(shape, j.clone())?,
    )?)
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self> {
        if cli.threads == Some(0) {
            bail!("--threads must be at least 1");
        }
        let job = match (cli.reproduce, cli.command) {
            (Some(_), Some(_)) => bail!("--reproduce cannot be combined with a subcommand"),
            (Some(fig), None) => Job::Reproduce(fig.parse()?),
            (None, None) => bail!("nothing to do: give a subcommand or --reproduce (see --help)"),
            (None, Some(cmd)) => match cmd {
                Command::Gen(a) => {
                    let shape = shape(&a.shape)?;
                    let source = if a.source == "squeezed" {
                        let x = a.x.ok_or_else(|| anyhow!("a squeezed source needs --x"))?;
                        SourceSpec::Squeezed {
                            r: squeezing(&a.squeezing)?,
                            x,
                        }
                    } else {
                        a.source.parse()?
                    };
                    source.validate()?;
                    Job::Gen { shape, source }
                }
                Command::Verify(a) => {
                    let state = load_state(&a.state)?;
                    let spec = verifier(state.shape(), &a.verifier, a.k, a.kappa)?;
                    Job::Verify {
                        state,
                        spec,
                        all_kappa: a.all_kappa,
                    }
                }
                Command::Sweep(a) => {
                    let shape = shape(&a.shape)?;
                    let r = squeezing(&a.squeezing)?;
                    let grid = linear_grid(a.x_from, a.x_to, a.x_step)?;
                    let spec = verifier(&shape, &a.verifier, a.k, 0)?;
                    let loss = match (a.epsilon, a.cutoff) {
                        (None, None) => None,
                        (None, Some(_)) => bail!("--cutoff only applies together with --epsilon"),
                        (Some(e), c) => {
                            Some((LossChannel::new(e)?, c.unwrap_or(DEFAULT_LOSS_CUTOFF)))
                        }
                    };
                    Job::Sweep {
                        shape,
                        r,
                        grid,
                        spec,
                        loss,
                    }
                }
                Command::Stats(a) => {
                    let state = load_state(&a.state)?;
                    let setting = setting(&a.setting, state.shape(), a.j.as_ref())?;
                    Job::Stats {
                        state,
                        setting,
                        samples: a.samples.map(|n| (n, a.seed)),
                    }
                }
                Command::Classes(a) => {
                    let shape = shape(&a.shape)?;
                    let indices = a.j.map(|j| HwIndices::new(&shape, j)).transpose()?;
                    Job::Classes { shape, indices }
                }
            },
        };
        Ok(Self {
            job,
            output: cli.output,
            threads: cli.threads,
        })
    }

    pub fn execute(&self) -> Result<String> {
        let exec = Exec::default();
        Ok(match &self.job {
            Job::Reproduce(fig) => reproduce(exec, *fig)?.to_csv(),
            Job::Gen { shape, source } => {
                let g = generate_postselected(shape, source)?;
                eprintln!(
                    "postselection probability {}",
                    fmt_num(g.postselect_probability)
                );
                if g.is_empty() {
                    eprintln!("warning: this photon pattern never occurs for {source}; the state is empty");
                }
                g.state.to_json()? + "\n"
            }
            Job::Verify {
                state,
                spec,
                all_kappa,
            } => {
                let mut report = biproducible_bound(state, spec)?;
                if *all_kappa && report.per_kappa.iter().any(|k| k.verdict.detected()) {
                    report.verdict = Verdict::GmeDetected;
                }
                serde_json::to_string_pretty(&report)? + "\n"
            }
            Job::Sweep {
                shape,
                r,
                grid,
                spec,
                loss: None,
            } => {
                let mut t = Table::new(["x", "kappa", "expectation", "bound"]);
                for row in sweep_displacement(exec, shape, *r, grid, spec)? {
                    t.push(vec![
                        fmt_num(row.x),
                        row.kappa.to_string(),
                        fmt_num(row.expectation),
                        fmt_num(row.bound),
                    ]);
                }
                t.to_csv()
            }
            Job::Sweep {
                shape,
                r,
                grid,
                spec,
                loss: Some((channel, cutoff)),
            } => {
                let mut t = Table::new([
                    "x",
                    "kappa",
                    "epsilon",
                    "expectation",
                    "bound",
                    "retained_probability",
                ]);
                let rows = sweep_lossy(exec, shape, *r, grid, spec, *channel, *cutoff)?;
                if let Some(low) = rows.iter().map(|r| r.retained_probability).reduce(f64::min) {
                    if low < multirail::loss::RETAINED_WARNING {
                        eprintln!("warning: loss cutoff {cutoff} retains only {low:.4} of the probability; raise --cutoff");
                    }
                }
                for row in rows {
                    t.push(vec![
                        fmt_num(row.x),
                        row.kappa.to_string(),
                        fmt_num(row.epsilon),
                        fmt_num(row.expectation),
                        fmt_num(row.bound),
                        fmt_num(row.retained_probability),
                    ]);
                }
                t.to_csv()
            }
            Job::Stats {
                state,
                setting,
                samples,
            } => {
                let dist = outcome_distribution_with(exec, state, setting)?;
                let counts: Option<BTreeMap<_, usize>> = samples
                    .map(|(n, seed)| sample_outcomes(&dist, n, seed).map(|s| tally(&s)))
                    .transpose()?;
                let mut header = vec!["basis", "probability"];
                if counts.is_some() {
                    header.push("count");
                }
                let mut t = Table::new(header);
                for (b, p) in &dist {
                    let mut row = vec![b.to_string(), fmt_num(*p)];
                    if let Some(c) = &counts {
                        row.push(c.get(b).copied().unwrap_or(0).to_string());
                    }
                    t.push(row);
                }
                t.to_csv()
            }
            Job::Classes { shape, indices } => {
                serde_json::to_string_pretty(&classes_report(shape, indices.as_ref()))? + "\n"
            }
        })
    }
}

fn classes_report(shape: &SystemShape, indices: Option<&HwIndices>) -> Value {
    let m = shape.modes();
    let local: Vec<Value> = shape
        .photons()
        .iter()
        .map(|&n| {
            let states: Vec<Value> = enumerate_basis(m, n)
                .iter()
                .map(|v| json!({ "state": v.to_string(), "cardinality": orbit_size(v), "clock": clock_label(v) }))
                .collect();
            json!({ "photons": n, "states": states })
        })
        .collect();
    let classes: Vec<Value> = joint_classes(shape)
        .iter()
        .map(|c| {
            let rep = c.representative();
            let mut row =
                json!({ "representative": rep.to_string(), "cardinality": c.cardinality() });
            if let Some(j) = indices {
                row["kappa"] = json!(j.label(rep));
            }
            row
        })
        .collect();
    let mut report = json!({
        "parties": shape.parties(),
        "modes": m,
        "photons": shape.photons(),
        "local_basis": local,
        "classes": classes,
    });
    if let Some(j) = indices {
        // pairwise: {l, l'} is complementary over the whole basis
        let support = basis_cardinalities(shape);
        let matrix: Vec<Vec<bool>> = (0..m)
            .map(|l| {
                (0..m)
                    .map(|lp| check_complementary_set(shape, j, &[l, lp], &support))
                    .collect()
            })
            .collect();
        report["j"] = json!(j.values());
        report["label_validity"] = json!(matrix);
    }
    report
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::resolve(cli)?;
    let text = multirail::par::with_threads(cfg.threads, || cfg.execute())?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
