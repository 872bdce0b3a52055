//! Built-in pipelines for the published figure data, on the
//! `(5,5,5)`-mode `(2,1,1)`-photon configuration.

use crate::error::Result;
use crate::fock::{FockVector, SystemShape};
use crate::hw::HwIndices;
use crate::lon::{outcome_distribution_with, MeasurementSetting};
use crate::loss::{lossy_mixture, sweep_lossy, LossChannel};
use crate::par::{self, Exec};
use crate::source::{db_to_r, generate_postselected, linear_grid, sweep_displacement, SourceSpec};
use crate::table::{fmt_num, Table};
use crate::verifier::{verifier_all_kappa, VerifierSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// Verifier against displacement at 0.5 dB for `j = (1,4,4)` and `(1,1,2)`.
    Fig2a,
    /// Verifier against displacement for several squeezing levels.
    Fig2b,
    /// Loss components and lossy mixtures at 5 dB.
    Fig4,
    /// Measurement statistics at 10 dB, `x = 0`.
    Fig5,
}

impl std::str::FromStr for Figure {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2a" => Ok(Figure::Fig2a),
            "fig2b" => Ok(Figure::Fig2b),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            _ => Err(crate::Error::InvalidParameter(format!(
                "unknown figure '{s}' (expected fig2a, fig2b, fig4 or fig5)"
            ))),
        }
    }
}

pub fn reference_shape() -> SystemShape {
    SystemShape::new(3, 5, vec![2, 1, 1]).expect("valid shape")
}

fn j_label(j: &HwIndices) -> String {
    j.values()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn reproduce(exec: Exec, fig: Figure) -> Result<Table> {
    match fig {
        Figure::Fig2a => fig2a(exec),
        Figure::Fig2b => fig2b(exec),
        Figure::Fig4 => fig4(exec),
        Figure::Fig5 => fig5(exec),
    }
}

fn fig2a(exec: Exec) -> Result<Table> {
    let shape = reference_shape();
    let grid = linear_grid(0.0, 1.0, 0.002)?;
    let r = db_to_r(0.5);
    let mut t = Table::new(["j", "x", "kappa", "expectation", "bound"]);
    for j in [vec![1, 4, 4], vec![1, 1, 2]] {
        let idx = HwIndices::new(&shape, j)?;
        let label = j_label(&idx);
        for row in sweep_displacement(exec, &shape, r, &grid, &VerifierSpec::full(idx, 0, 0))? {
            t.push(vec![
                label.clone(),
                fmt_num(row.x),
                row.kappa.to_string(),
                fmt_num(row.expectation),
                fmt_num(row.bound),
            ]);
        }
    }
    Ok(t)
}

fn fig2b(exec: Exec) -> Result<Table> {
    let shape = reference_shape();
    let grid = linear_grid(0.0, 1.0, 0.005)?;
    let spec = VerifierSpec::full(HwIndices::new(&shape, vec![1, 4, 4])?, 0, 0);
    let mut t = Table::new(["r_db", "x", "kappa", "expectation", "bound"]);
    for db in [0.5, 1.0, 2.0, 5.0, 10.0] {
        for row in sweep_displacement(exec, &shape, db_to_r(db), &grid, &spec)? {
            t.push(vec![
                fmt_num(db),
                fmt_num(row.x),
                row.kappa.to_string(),
                fmt_num(row.expectation),
                fmt_num(row.bound),
            ]);
        }
    }
    Ok(t)
}

/// Loss patterns shown individually.
pub const FIG4_PATTERNS: [[u32; 5]; 5] = [
    [0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [2, 0, 0, 0, 0],
    [1, 1, 0, 0, 0],
    [1, 0, 1, 0, 0],
];
pub const FIG4_EPSILONS: [f64; 4] = [0.0, 0.1, 0.2, 0.25];

fn fig4(exec: Exec) -> Result<Table> {
    let shape = reference_shape();
    let grid = linear_grid(0.0, 1.0, 0.01)?;
    let r = db_to_r(5.0);
    let spec = VerifierSpec::full(HwIndices::new(&shape, vec![1, 4, 4])?, 0, 0);
    let mut t = Table::new([
        "series",
        "nu",
        "epsilon",
        "x",
        "kappa",
        "expectation",
        "bound",
        "retained_probability",
    ]);

    // per-pattern states do not depend on eps; any eps > 0 exposes them all
    let probe = LossChannel::new(0.1)?;
    let comps = par::try_map(exec, &grid, |&x| -> Result<Vec<(String, Vec<f64>)>> {
        let mix = lossy_mixture(
            Exec::Sequential,
            &shape,
            &SourceSpec::Squeezed { r, x },
            probe,
            2,
        )?;
        let mut out = Vec::new();
        for pat in FIG4_PATTERNS {
            let nu = FockVector::new(pat.to_vec());
            if let Some(c) = mix.components.iter().find(|c| c.nu_tot == nu) {
                out.push((nu.to_string(), verifier_all_kappa(&c.state, &spec)?));
            }
        }
        Ok(out)
    })?;
    let bound = crate::verifier::prime_bound(5, 5);
    for (x, per) in grid.iter().zip(comps) {
        for (nu, values) in per {
            for (kappa, v) in values.iter().enumerate() {
                t.push(vec![
                    "component".into(),
                    nu.clone(),
                    String::new(),
                    fmt_num(*x),
                    kappa.to_string(),
                    fmt_num(*v),
                    fmt_num(bound),
                    String::new(),
                ]);
            }
        }
    }
    for eps in FIG4_EPSILONS {
        let rows = sweep_lossy(
            exec,
            &shape,
            r,
            &grid,
            &spec,
            LossChannel::new(eps)?,
            crate::loss::DEFAULT_LOSS_CUTOFF,
        )?;
        for row in rows {
            t.push(vec![
                "mixture".into(),
                String::new(),
                fmt_num(eps),
                fmt_num(row.x),
                row.kappa.to_string(),
                fmt_num(row.expectation),
                fmt_num(row.bound),
                fmt_num(row.retained_probability),
            ]);
        }
    }
    Ok(t)
}

fn fig5(exec: Exec) -> Result<Table> {
    let shape = reference_shape();
    let g = generate_postselected(
        &shape,
        &SourceSpec::Squeezed {
            r: db_to_r(10.0),
            x: 0.0,
        },
    )?;
    let settings = [
        (
            "computational".to_string(),
            MeasurementSetting::Computational,
        ),
        (
            "j=0 0 0 l=0".to_string(),
            MeasurementSetting::hadamard(0, HwIndices::new(&shape, vec![0, 0, 0])?)?,
        ),
        (
            "j=1 4 4 l=1".to_string(),
            MeasurementSetting::hadamard(1, HwIndices::new(&shape, vec![1, 4, 4])?)?,
        ),
    ];
    let mut t = Table::new(["setting", "basis", "probability"]);
    for (name, setting) in settings {
        for (b, p) in outcome_distribution_with(exec, &g.state, &setting)? {
            t.push(vec![name.clone(), b.to_string(), fmt_num(p)]);
        }
    }
    Ok(t)
}
