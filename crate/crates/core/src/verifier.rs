//! Stabilizer projectors, the verifier `V_{k,kappa}` and its biproducible bound.

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{root_of_unity, SparseState};
use crate::hw::{
    find_complementarity_violation, joint_classes_of_support, lambda_power_exponent, orbit_size,
    support_cardinalities, HwIndices, ModeShift, SymmetryLabel,
};

/// Margin above the bound before a value counts as detection.
pub const DETECTION_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierSpec {
    pub indices: HwIndices,
    pub labels: Vec<usize>,
    pub label: SymmetryLabel,
}

impl VerifierSpec {
    /// Labels are reduced mod `M`, sorted and deduplicated.
    pub fn new(indices: HwIndices, labels: &[usize], k: usize, kappa: usize) -> Result<Self> {
        let m = indices.modes();
        if labels.is_empty() {
            return Err(Error::InvalidParameter(
                "measurement label set must not be empty".into(),
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= m) {
            return Err(Error::InvalidParameter(format!(
                "measurement label {bad} must lie in [0, {m})"
            )));
        }
        let labels: Vec<usize> = labels
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Self {
            indices,
            labels,
            label: SymmetryLabel::new(k, kappa, m),
        })
    }

    /// All `M` labels.
    pub fn full(indices: HwIndices, k: usize, kappa: usize) -> Self {
        let labels: Vec<usize> = (0..indices.modes()).collect();
        Self::new(indices, &labels, k, kappa).expect("full label set is valid")
    }

    pub fn modes(&self) -> usize {
        self.indices.modes()
    }

    pub fn with_kappa(&self, kappa: usize) -> Self {
        let mut s = self.clone();
        s.label = SymmetryLabel::new(s.label.k, kappa, self.modes());
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    GmeDetected,
    NotDetected,
}

impl Verdict {
    pub fn decide(value: f64, bound: f64) -> Self {
        if value > bound + DETECTION_MARGIN {
            Verdict::GmeDetected
        } else {
            Verdict::NotDetected
        }
    }

    pub fn detected(self) -> bool {
        self == Verdict::GmeDetected
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaValue {
    pub kappa: usize,
    pub value: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    pub kappa: usize,
    pub labels: Vec<usize>,
    pub d_expectation: f64,
    pub bound: f64,
    pub verifier_value: f64,
    pub verdict: Verdict,
    pub per_kappa: Vec<KappaValue>,
}

/// `<S_Z(m)>` for every `m`: computational-basis mass per j-weighted label.
pub fn sz_distribution(state: &SparseState, indices: &HwIndices) -> Vec<f64> {
    let mut out = vec![0.0; indices.modes()];
    for (b, a) in state.iter() {
        out[indices.label(b)] += a.norm_sqr();
    }
    out
}

pub fn sz_expectation(state: &SparseState, indices: &HwIndices, m: usize) -> f64 {
    sz_distribution(state, indices)[m % indices.modes()]
}

/// `<S_Lambda(l, m)>` for each requested `l` (outer) and every `m` (inner).
///
/// All labels share one pass over the support: the `Lambda_{j l}` power phase
/// is `l` times the `Lambda_j` one, so only the overlaps
/// `psi(b) conj(psi(X^{m'} b))` and their `Lambda_j` exponents are needed.
pub fn s_lambda_table(state: &SparseState, indices: &HwIndices, labels: &[usize]) -> Vec<Vec<f64>> {
    let m = indices.modes();
    let weights = indices.as_weights();
    // traces[l][m'] = <psi| Lambda_{jl}^{m'} |psi>
    let mut traces = vec![vec![C64::new(0.0, 0.0); m]; labels.len()];
    for (b, a) in state.iter() {
        for p in 0..m {
            let target = state.amplitude(&b.shifted(p as i64));
            if target == C64::new(0.0, 0.0) {
                continue;
            }
            let overlap = target.conj() * a;
            let e = lambda_power_exponent(b, &weights, p, m);
            for (t, &l) in traces.iter_mut().zip(labels) {
                t[p] += overlap * root_of_unity(m, (l * e % m) as i64);
            }
        }
    }
    traces
        .iter()
        .map(|t| {
            (0..m)
                .map(|mm| {
                    let s: C64 = (0..m)
                        .map(|p| root_of_unity(m, -((mm * p % m) as i64)) * t[p])
                        .sum();
                    s.re / m as f64
                })
                .collect()
        })
        .collect()
}

pub fn s_lambda_distribution(state: &SparseState, indices: &HwIndices, l: usize) -> Vec<f64> {
    s_lambda_table(state, indices, &[l % indices.modes()]).remove(0)
}

pub fn s_lambda_expectation(state: &SparseState, indices: &HwIndices, l: usize, m: usize) -> f64 {
    s_lambda_distribution(state, indices, l)[m % indices.modes()]
}

fn check_labels(state: &SparseState, spec: &VerifierSpec) -> Result<()> {
    let support = support_cardinalities(state);
    match find_complementarity_violation(state.shape(), &spec.indices, &spec.labels, &support) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// `<V_{k,kappa}>` for every `kappa` at the verifier's `k`.
pub fn verifier_all_kappa(state: &SparseState, spec: &VerifierSpec) -> Result<Vec<f64>> {
    check_labels(state, spec)?;
    let m = spec.modes();
    let k = spec.label.k;
    let sz = sz_distribution(state, &spec.indices);
    let sl = s_lambda_table(state, &spec.indices, &spec.labels);
    let denom = 1.0 + spec.labels.len() as f64;
    Ok((0..m)
        .map(|kappa| {
            let lam: f64 = spec
                .labels
                .iter()
                .zip(&sl)
                .map(|(&l, row)| row[(k + kappa * l) % m])
                .sum();
            (sz[kappa] + lam) / denom
        })
        .collect())
}

/// `<V_{k,kappa}> = (<S_Z(kappa)> + sum_{l in L} <S_Lambda(l, k + kappa l)>) / (1 + |L|)`.
pub fn verifier_expectation(state: &SparseState, spec: &VerifierSpec) -> Result<f64> {
    Ok(verifier_all_kappa(state, spec)?[spec.label.kappa])
}

/// `<D> = sum_b p(b) / min_i |X_{n_i}|`.
pub fn d_expectation(state: &SparseState) -> f64 {
    let total = state.norm_sqr();
    if total == 0.0 {
        return 1.0;
    }
    state
        .iter()
        .map(|(b, a)| {
            let min = b.parts().iter().map(orbit_size).min().unwrap_or(1);
            a.norm_sqr() / min as f64
        })
        .sum::<f64>()
        / total
}

/// `(1 + <D> |L|) / (1 + |L|)`.
pub fn bound_from_d(d: f64, labels: usize) -> f64 {
    (1.0 + d * labels as f64) / (1.0 + labels as f64)
}

/// `(M + |L|) / (M (|L| + 1))`, the value of the bound when every local class
/// has size `M`.
pub fn prime_bound(modes: usize, labels: usize) -> f64 {
    (modes + labels) as f64 / (modes * (labels + 1)) as f64
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Bound, verdict and the full `kappa` table at the verifier's `k`.
pub fn biproducible_bound(state: &SparseState, spec: &VerifierSpec) -> Result<BoundReport> {
    let m = spec.modes();
    let shape = state.shape();
    let d = d_expectation(state);
    let prime_case = is_prime(m) && shape.photons().iter().all(|&n| n as usize % m != 0);
    let bound = if prime_case {
        prime_bound(m, spec.labels.len())
    } else {
        bound_from_d(d, spec.labels.len())
    };
    let values = verifier_all_kappa(state, spec)?;
    let per_kappa: Vec<KappaValue> = values
        .iter()
        .enumerate()
        .map(|(kappa, &value)| KappaValue {
            kappa,
            value,
            verdict: Verdict::decide(value, bound),
        })
        .collect();
    let value = values[spec.label.kappa];
    Ok(BoundReport {
        k: spec.label.k,
        kappa: spec.label.kappa,
        labels: spec.labels.clone(),
        d_expectation: d,
        bound,
        verifier_value: value,
        verdict: Verdict::decide(value, bound),
        per_kappa,
    })
}

/// `|c_{k,kappa}|^2` indexed `[k][kappa]`: weight of the state on the
/// `(k, kappa)` symmetric subspace.
pub fn kappa_decomposition(state: &SparseState, indices: &HwIndices) -> Vec<Vec<f64>> {
    let m = indices.modes();
    let mut out = vec![vec![0.0; m]; m];
    for class in joint_classes_of_support(state) {
        let card = class.cardinality();
        let rep = class.representative();
        let kappa = indices.label(rep);
        let amps: Vec<C64> = (0..m)
            .map(|s| state.amplitude(&rep.shifted(s as i64)))
            .collect();
        let scale = (card as f64).sqrt() / m as f64;
        for k in (0..m).step_by(m / card) {
            let c: C64 = (0..m)
                .map(|s| root_of_unity(m, ((k * s) % m) as i64) * amps[s])
                .sum();
            out[k][kappa] += (c * scale).norm_sqr();
        }
    }
    out
}
