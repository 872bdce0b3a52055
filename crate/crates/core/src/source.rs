//! Generation scheme: `M` copies of a single-mode source, each fed into a
//! uniform `P`-mode splitter (amplitudes `1/sqrt(P)`), then postselection on
//! the local photon numbers `(N_1, ..., N_P)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{binomial, BasisState, FockVector, SparseState, SystemShape};
use crate::par::{self, Exec};
use crate::verifier::{biproducible_bound, verifier_all_kappa, VerifierSpec};

/// Single-mode input state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceSpec {
    SinglePhoton,
    Fock {
        nu: u32,
    },
    Coherent {
        re: f64,
        im: f64,
    },
    /// Displaced squeezed vacuum with squeezing `r > 0` and displacement `x`.
    Squeezed {
        r: f64,
        x: f64,
    },
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SourceSpec::Fock { nu: 0 } => Err(Error::InvalidSource(
                "a Fock source needs at least one photon".into(),
            )),
            SourceSpec::Coherent { re, im } if !(re.is_finite() && im.is_finite()) => Err(
                Error::InvalidSource("coherent amplitude must be finite".into()),
            ),
            SourceSpec::Squeezed { r, .. } if !(r > 0.0 && r.is_finite()) => {
                Err(Error::InvalidSource(format!(
                    "squeezing r must be positive, got {r} (use a coherent source for r = 0)"
                )))
            }
            SourceSpec::Squeezed { x, .. } if !x.is_finite() => {
                Err(Error::InvalidSource("displacement must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Whether the source has support on more than one photon number.
    pub fn is_gaussian(&self) -> bool {
        matches!(
            self,
            SourceSpec::Coherent { .. } | SourceSpec::Squeezed { .. }
        )
    }
}

/// Parses `single-photon`, `fock:NU`, `coherent:RE[,IM]` and `squeezed:R,X`.
impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidSource(format!("{s}: {e}")))
                })
                .collect()
        };
        let spec = match kind.trim() {
            "single-photon" | "single" => SourceSpec::SinglePhoton,
            "fock" => SourceSpec::Fock {
                nu: args
                    .trim()
                    .parse()
                    .map_err(|e| Error::InvalidSource(format!("{s}: {e}")))?,
            },
            "coherent" => match nums()?.as_slice() {
                [re] => SourceSpec::Coherent { re: *re, im: 0.0 },
                [re, im] => SourceSpec::Coherent { re: *re, im: *im },
                _ => {
                    return Err(Error::InvalidSource(format!(
                        "{s}: expected coherent:RE[,IM]"
                    )))
                }
            },
            "squeezed" => match nums()?.as_slice() {
                [r, x] => SourceSpec::Squeezed { r: *r, x: *x },
                _ => return Err(Error::InvalidSource(format!("{s}: expected squeezed:R,X"))),
            },
            other => {
                return Err(Error::InvalidSource(format!(
                    "unknown source kind '{other}'"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::SinglePhoton => write!(f, "single-photon"),
            SourceSpec::Fock { nu } => write!(f, "fock:{nu}"),
            SourceSpec::Coherent { re, im } => write!(f, "coherent:{re},{im}"),
            SourceSpec::Squeezed { r, x } => write!(f, "squeezed:{r},{x}"),
        }
    }
}

/// `gamma = tanh r`, `zeta = 1 / sqrt(1 - exp(-4 r))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezedParams {
    pub gamma: f64,
    pub zeta: f64,
}

impl SqueezedParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidSource(format!(
                "squeezing r must be positive, got {r}"
            )));
        }
        Ok(Self {
            gamma: r.tanh(),
            zeta: 1.0 / (-(-4.0 * r).exp_m1()).sqrt(),
        })
    }
}

/// `r = dB ln(10) / 20`.
pub fn db_to_r(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

/// Probabilists' Hermite polynomial `h_n(x)`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `h_n(x) / sqrt(n!)` for `n = 0..=cutoff`, by the scaled recurrence
/// (stays bounded where `h_n` itself overflows).
pub fn scaled_hermite(cutoff: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    out.push(1.0);
    if cutoff >= 1 {
        out.push(x);
    }
    for k in 1..cutoff {
        let next = (x * out[k] - (k as f64).sqrt() * out[k - 1]) / ((k + 1) as f64).sqrt();
        out.push(next);
    }
    out
}

/// Photon-number amplitudes `c(n)`, `n = 0..=cutoff`, of one source copy.
pub fn source_amplitudes(spec: &SourceSpec, cutoff: usize) -> Result<Vec<C64>> {
    spec.validate()?;
    let zero = C64::new(0.0, 0.0);
    Ok(match *spec {
        SourceSpec::SinglePhoton => (0..=cutoff)
            .map(|n| if n == 1 { C64::new(1.0, 0.0) } else { zero })
            .collect(),
        SourceSpec::Fock { nu } => (0..=cutoff)
            .map(|n| {
                if n == nu as usize {
                    C64::new(1.0, 0.0)
                } else {
                    zero
                }
            })
            .collect(),
        SourceSpec::Coherent { re, im } => {
            let alpha = C64::new(re, im);
            let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
            let mut out = Vec::with_capacity(cutoff + 1);
            for n in 0..=cutoff {
                out.push(c);
                c = c * alpha / ((n + 1) as f64).sqrt();
            }
            out
        }
        SourceSpec::Squeezed { r, x } => {
            let p = SqueezedParams::new(r)?;
            let zx = p.zeta * x;
            let k = (1.0 - p.gamma * p.gamma).powf(0.25)
                * (-2.0 * p.gamma * zx * zx / (1.0 + p.gamma)).exp();
            scaled_hermite(cutoff, 2.0 * zx)
                .into_iter()
                .enumerate()
                .map(|(n, h)| C64::new(k * p.gamma.powf(n as f64 / 2.0) * h, 0.0))
                .collect()
        }
    })
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Unnormalized postselected amplitudes with `nu[m]` extra photons in input
/// mode `m` that never reach the parties:
/// `prod_m c(n_m + nu_m) sqrt((n_m + nu_m)! / (nu_m! prod_i n_{i,m}!))`,
/// where `n_m` sums the parties' occupations of mode `m`. `amps` must reach
/// index `N_tot + |nu|`.
pub(crate) fn weighted_amplitudes(
    shape: &SystemShape,
    amps: &[C64],
    nu: &FockVector,
) -> Result<Vec<(BasisState, C64)>> {
    let lost = nu.occupations();
    let mut out = Vec::new();
    for b in shape.basis() {
        let tot = b.total();
        let mut a = C64::new(1.0, 0.0);
        let mut weight = b.multinomial()? as f64;
        for (m, &n) in tot.occupations().iter().enumerate() {
            let idx = (n + lost[m]) as usize;
            a *= amps[idx];
            weight *= binomial(n + lost[m], lost[m])? as f64;
        }
        if a != C64::new(0.0, 0.0) {
            out.push((b, a * weight.sqrt()));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub state: SparseState,
    /// Probability that the postselection succeeds.
    pub postselect_probability: f64,
    /// Squared norm of the multinomial-weighted source amplitudes before the
    /// splitter factor, `p P^{N_tot}`.
    pub normalization: f64,
}

impl GenerationResult {
    /// Postselection pattern that never occurs.
    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }
}

/// Normalized `(N_1, ..., N_P)`-postselected state and its probability.
///
/// Impossible patterns (`p = 0`) give an empty state rather than an error.
pub fn generate_postselected(shape: &SystemShape, spec: &SourceSpec) -> Result<GenerationResult> {
    let n_tot = shape.total_photons();
    let amps = source_amplitudes(spec, n_tot as usize)?;
    let raw = weighted_amplitudes(shape, &amps, &FockVector::vacuum(shape.modes()))?;
    let norm: CompensatedSum = raw.iter().map(|(_, a)| a.norm_sqr()).collect();
    let r = norm.value();
    let p = r / (shape.parties() as f64).powi(n_tot as i32);
    if r <= 0.0 {
        return Ok(GenerationResult {
            state: SparseState::empty(shape.clone()),
            postselect_probability: 0.0,
            normalization: 0.0,
        });
    }
    let inv = 1.0 / r.sqrt();
    let state = SparseState::new(shape.clone(), raw.into_iter().map(|(b, a)| (b, a * inv)))?;
    Ok(GenerationResult {
        state,
        postselect_probability: p.min(1.0),
        normalization: r,
    })
}

/// One `(x, kappa)` point of a displacement sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub kappa: usize,
    pub expectation: f64,
    pub bound: f64,
}

fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.iter().any(|x| !x.is_finite()) || x_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "displacement grid must be finite and sorted ascending".into(),
        ));
    }
    Ok(())
}

/// `x_from, x_from + step, ...` up to `x_to` (inclusive within half a step).
pub fn linear_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(to >= from) || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bad grid from {from} to {to} step {step}"
        )));
    }
    let n = ((to - from) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

/// `<V_{k,kappa}>` for every `kappa` over a displacement grid, squeezed input.
pub fn sweep_displacement(
    exec: Exec,
    shape: &SystemShape,
    r: f64,
    x_grid: &[f64],
    spec: &VerifierSpec,
) -> Result<Vec<SweepRow>> {
    check_grid(x_grid)?;
    SqueezedParams::new(r)?;
    let per_point = par::try_map(exec, x_grid, |&x| -> Result<Vec<SweepRow>> {
        let g = generate_postselected(shape, &SourceSpec::Squeezed { r, x })?;
        if g.is_empty() {
            return Err(Error::ZeroNorm);
        }
        let values = verifier_all_kappa(&g.state, spec)?;
        let bound = biproducible_bound(&g.state, spec)?.bound;
        Ok(values
            .into_iter()
            .enumerate()
            .map(|(kappa, expectation)| SweepRow {
                x,
                kappa,
                expectation,
                bound,
            })
            .collect())
    })?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Postselection probabilities of every local photon pattern with the given
/// total, keyed by `(N_1, ..., N_P)`.
pub fn pattern_probabilities(
    parties: usize,
    modes: usize,
    total: u32,
    spec: &SourceSpec,
) -> Result<BTreeMap<Vec<u32>, f64>> {
    let mut out = BTreeMap::new();
    for pattern in crate::fock::enumerate_basis(parties, total) {
        let shape = SystemShape::new(parties, modes, pattern.occupations().to_vec())?;
        out.insert(
            pattern.occupations().to_vec(),
            generate_postselected(&shape, spec)?.postselect_probability,
        );
    }
    Ok(out)
}
