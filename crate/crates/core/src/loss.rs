//! Uniform photon loss on the pre-splitter source modes.
//!
//! Each source mode passes a beam splitter of reflectivity `eps` before the
//! splitters. Conditioned on `nu_m` photons lost from mode `m` and on the
//! postselected pattern, the joint amplitude of `|n_1, ..., n_P>` is
//!
//! `eps^{|nu|/2} (1-eps)^{N/2} P^{-N/2} prod_m c(n_m + nu_m) sqrt((n_m + nu_m)! / (nu_m! prod_i n_{i,m}!))`
//!
//! so the loss weights depend on the source (`r`, `x`), not only on `eps`.
//! Normalizing over all `nu` uses the per-mode series
//! `G(n) = sum_nu eps^nu |c(n + nu)|^2 binom(n + nu, nu)`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, FockVector, SparseState, SystemShape};
use crate::hw::x_class_of;
use crate::par::{self, Exec};
use crate::source::{source_amplitudes, weighted_amplitudes, CompensatedSum, SourceSpec};
use crate::verifier::{
    bound_from_d, d_expectation, is_prime, prime_bound, verifier_all_kappa, VerifierSpec,
};

pub const DEFAULT_LOSS_CUTOFF: u32 = 3;
/// Retained probability below which a mixture is flagged.
pub const RETAINED_WARNING: f64 = 0.5;
const SERIES_TOLERANCE: f64 = 1e-18;
const MAX_SERIES_TERMS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossChannel {
    epsilon: f64,
}

impl LossChannel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "loss rate must lie in [0, 1), got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossComponent {
    /// Photons lost from each pre-splitter mode.
    pub nu_tot: FockVector,
    /// `p(nu | N)`.
    pub probability: f64,
    pub state: SparseState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossyMixture {
    pub epsilon: f64,
    pub cutoff: u32,
    pub components: Vec<LossComponent>,
    /// `sum p(nu | N)` over the retained components.
    pub retained_probability: f64,
    pub warning: Option<String>,
}

/// Source amplitudes long enough for the normalization series to converge.
fn long_amplitudes(spec: &SourceSpec, n_tot: usize, epsilon: f64) -> Result<Vec<C64>> {
    if epsilon == 0.0 {
        return source_amplitudes(spec, n_tot);
    }
    let mut len = n_tot + 64;
    loop {
        let a = source_amplitudes(spec, len)?;
        let tail: f64 = a[len - 16..].iter().map(|c| c.norm_sqr()).sum();
        if tail < 1e-40 || len >= MAX_SERIES_TERMS {
            return Ok(a);
        }
        len *= 2;
    }
}

/// `G(n) = sum_{v >= 0} eps^v |c(n + v)|^2 binom(n + v, v)`.
fn loss_series(amps: &[C64], n: usize, epsilon: f64) -> f64 {
    let mut sum = CompensatedSum::default();
    let mut eps_pow = 1.0;
    let mut binom = 1.0;
    for v in 0..amps.len() - n {
        let term = eps_pow * binom * amps[n + v].norm_sqr();
        sum.add(term);
        if epsilon == 0.0 || (v > n + 8 && term < SERIES_TOLERANCE * sum.value()) {
            break;
        }
        eps_pow *= epsilon;
        binom *= (n + v + 1) as f64 / (v + 1) as f64;
    }
    sum.value()
}

/// Conditional states and weights for every loss pattern with `|nu| <= cutoff`.
///
/// Zero-weight patterns are omitted. Only sources with support on several
/// photon numbers are accepted: for number states the postselection already
/// discards every lossy event.
pub fn lossy_mixture(
    exec: Exec,
    shape: &SystemShape,
    spec: &SourceSpec,
    channel: LossChannel,
    cutoff: u32,
) -> Result<LossyMixture> {
    if !spec.is_gaussian() {
        return Err(Error::InvalidSource(format!(
            "loss mixtures need a coherent or squeezed source, got {spec}"
        )));
    }
    let eps = channel.epsilon();
    let n_tot = shape.total_photons() as usize;
    let amps = long_amplitudes(spec, n_tot + cutoff as usize, eps)?;

    // denominator: sum over all nu factorizes per mode
    let series: Vec<f64> = (0..=n_tot).map(|n| loss_series(&amps, n, eps)).collect();
    let denominator: CompensatedSum = shape
        .basis()
        .iter()
        .map(|b| -> Result<f64> {
            let mult = b.multinomial()? as f64;
            Ok(mult
                * b.total()
                    .occupations()
                    .iter()
                    .map(|&n| series[n as usize])
                    .product::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .collect();
    let denominator = denominator.value();
    if denominator <= 0.0 {
        return Err(Error::ZeroNorm);
    }

    let patterns: Vec<FockVector> = if eps == 0.0 {
        vec![FockVector::vacuum(shape.modes())]
    } else {
        (0..=cutoff)
            .flat_map(|k| enumerate_basis(shape.modes(), k))
            .collect()
    };
    let built = par::try_map(exec, &patterns, |nu| -> Result<Option<LossComponent>> {
        let raw = weighted_amplitudes(shape, &amps, nu)?;
        let mass: CompensatedSum = raw.iter().map(|(_, a)| a.norm_sqr()).collect();
        let mass = mass.value();
        if mass <= 0.0 {
            return Ok(None);
        }
        let probability = eps.powi(nu.photons() as i32) * mass / denominator;
        let inv = 1.0 / mass.sqrt();
        let state = SparseState::new(shape.clone(), raw.into_iter().map(|(b, a)| (b, a * inv)))?;
        Ok(Some(LossComponent {
            nu_tot: nu.clone(),
            probability,
            state,
        }))
    })?;
    let components: Vec<LossComponent> = built
        .into_iter()
        .flatten()
        .filter(|c| c.probability > 0.0)
        .collect();
    let retained: CompensatedSum = components.iter().map(|c| c.probability).collect();
    let retained = retained.value();
    let warning = (retained < RETAINED_WARNING).then(|| {
        format!(
            "loss cutoff {cutoff} retains only {retained:.4} of the probability; raise the cutoff"
        )
    });
    Ok(LossyMixture {
        epsilon: eps,
        cutoff,
        components,
        retained_probability: retained,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossyExpectation {
    /// Convex sum divided by the retained probability.
    pub per_kappa: Vec<f64>,
    /// Convex sum over the retained components as is.
    pub per_kappa_raw: Vec<f64>,
    pub retained_probability: f64,
    /// Biproducible bound of the renormalized mixture.
    pub bound: f64,
}

/// `sum_nu p(nu | N) <V_{k,kappa}>_nu` for every `kappa`.
///
/// Components whose loss patterns differ by a cyclic shift are related by the
/// simultaneous shift, which commutes with the verifier, so each class is
/// evaluated once.
pub fn lossy_verifier_expectation(
    exec: Exec,
    mixture: &LossyMixture,
    spec: &VerifierSpec,
) -> Result<LossyExpectation> {
    let m = spec.modes();
    let mut reps: BTreeMap<FockVector, usize> = BTreeMap::new();
    let mut todo: Vec<&LossComponent> = Vec::new();
    for c in &mixture.components {
        let rep = x_class_of(&c.nu_tot).representative().clone();
        reps.entry(rep).or_insert_with(|| {
            todo.push(c);
            todo.len() - 1
        });
    }
    let values = par::try_map(exec, &todo, |c| verifier_all_kappa(&c.state, spec))?;
    let mut raw = vec![CompensatedSum::default(); m];
    let mut d = CompensatedSum::default();
    for c in &mixture.components {
        let slot = reps[x_class_of(&c.nu_tot).representative()];
        for (acc, v) in raw.iter_mut().zip(&values[slot]) {
            acc.add(c.probability * v);
        }
        d.add(c.probability * d_expectation(&c.state));
    }
    let retained = mixture.retained_probability;
    let per_kappa_raw: Vec<f64> = raw.iter().map(CompensatedSum::value).collect();
    let per_kappa: Vec<f64> = per_kappa_raw.iter().map(|v| v / retained).collect();
    let shape = mixture.components.first().map(|c| c.state.shape().clone());
    let prime_case =
        is_prime(m) && shape.is_some_and(|s| s.photons().iter().all(|&n| n as usize % m != 0));
    let bound = if prime_case {
        prime_bound(m, spec.labels.len())
    } else {
        bound_from_d(d.value() / retained, spec.labels.len())
    };
    Ok(LossyExpectation {
        per_kappa,
        per_kappa_raw,
        retained_probability: retained,
        bound,
    })
}

/// One `(x, kappa)` point of a lossy displacement sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossySweepRow {
    pub x: f64,
    pub kappa: usize,
    pub epsilon: f64,
    pub expectation: f64,
    pub bound: f64,
    pub retained_probability: f64,
}

/// Lossy counterpart of the displacement sweep (squeezed input).
pub fn sweep_lossy(
    exec: Exec,
    shape: &SystemShape,
    r: f64,
    x_grid: &[f64],
    spec: &VerifierSpec,
    channel: LossChannel,
    cutoff: u32,
) -> Result<Vec<LossySweepRow>> {
    if x_grid.iter().any(|x| !x.is_finite()) || x_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "displacement grid must be finite and sorted ascending".into(),
        ));
    }
    let per_point = par::try_map(exec, x_grid, |&x| -> Result<Vec<LossySweepRow>> {
        // inner loops stay sequential; the grid carries the parallelism
        let mix = lossy_mixture(
            Exec::Sequential,
            shape,
            &SourceSpec::Squeezed { r, x },
            channel,
            cutoff,
        )?;
        let e = lossy_verifier_expectation(Exec::Sequential, &mix, spec)?;
        Ok(e.per_kappa
            .iter()
            .enumerate()
            .map(|(kappa, &expectation)| LossySweepRow {
                x,
                kappa,
                epsilon: channel.epsilon(),
                expectation,
                bound: e.bound,
                retained_probability: e.retained_probability,
            })
            .collect())
    })?;
    Ok(per_point.into_iter().flatten().collect())
}
