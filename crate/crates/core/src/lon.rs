//! Linear optical networks acting on one party's modes.
//!
//! Convention: creation operators transform as `a_k^+ -> sum_j U[j][k] b_j^+`,
//! so `<m|U|n> = perm(U[m|n]) / sqrt(m! n!)` with rows repeated by the output
//! occupations and columns by the input occupations.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C64;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, BasisState, FockVector, SparseState};
use crate::hw::{raw_clock, HwIndices};
use crate::par::{self, Exec};

pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Square complex matrix checked to be unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    entries: Vec<C64>,
}

impl ModeUnitary {
    pub fn new(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::MatrixShape {
                expected: dim,
                rows: dim,
                cols: bad.len(),
            });
        }
        let u = Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        };
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.entries.chunks(self.dim).map(<[C64]>::to_vec).collect()
    }

    /// `max |(U U^+ - I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    s += self.get(i, k) * self.get(j, k).conj();
                }
                if i == j {
                    s -= 1.0;
                }
                dev = dev.max(s.norm());
            }
        }
        dev
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j).conj();
            }
        }
        Self { dim: n, entries }
    }

    /// `self * other`.
    pub fn compose(&self, other: &ModeUnitary) -> Self {
        let n = self.dim;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        Self { dim: n, entries }
    }
}

/// Matrix permanent by Ryser's formula, iterating subsets in Gray-code order.
pub fn permanent(a: &[Vec<C64>]) -> C64 {
    let n = a.len();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    assert!(n < 64, "permanent dimension too large");
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        let mask = 1u64 << bit;
        let adding = gray & mask == 0;
        gray ^= mask;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += a[i][bit];
            } else {
                *s -= a[i][bit];
            }
        }
        let prod: C64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Generalized Hadamard matrix, entry `(m', m) = tau^{(M-m) m j} omega^{m' m} / sqrt(M)`
/// with `tau = exp(i pi / M)`. `j = 0` is the discrete Fourier transform.
///
/// As a mode unitary it rotates the `Lambda_j` eigenbasis onto the
/// computational basis, so photon counting after it measures `Lambda_j`.
pub fn hadamard_matrix(modes: usize, j: usize) -> ModeUnitary {
    let m = modes as i64;
    let j = (j % modes) as i64;
    let norm = 1.0 / (modes as f64).sqrt();
    let twice = 2 * m;
    let entries = (0..m)
        .flat_map(|row| {
            (0..m).map(move |col| {
                // tau^a omega^b = exp(i pi (a + 2 b) / M)
                let e = (((m - col) * col * j) % twice + 2 * ((row * col) % m)) % twice;
                C64::from_polar(norm, std::f64::consts::PI * e as f64 / m as f64)
            })
        })
        .collect();
    ModeUnitary {
        dim: modes,
        entries,
    }
}

/// `<out|U|input>` for single-party Fock vectors with equal photon number.
pub fn transition_amplitude(u: &ModeUnitary, input: &FockVector, out: &FockVector) -> C64 {
    let cols = input.mode_list();
    let rows = out.mode_list();
    if cols.len() != rows.len() {
        return C64::new(0.0, 0.0);
    }
    let sub: Vec<Vec<C64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| u.get(r, c)).collect())
        .collect();
    let norm = (factorial_f64(input) * factorial_f64(out)).sqrt();
    permanent(&sub) / norm
}

fn factorial_f64(v: &FockVector) -> f64 {
    v.occupations()
        .iter()
        .map(|&n| (1..=n).map(f64::from).product::<f64>())
        .product()
}

/// Full output column of `U` on a single Fock vector, pruned.
pub fn evolve_fock(u: &ModeUnitary, input: &FockVector) -> Vec<(FockVector, C64)> {
    enumerate_basis(u.dim(), input.photons())
        .into_iter()
        .map(|out| {
            let a = transition_amplitude(u, input, &out);
            (out, a)
        })
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .collect()
}

/// Apply `U` to the modes of one party.
pub fn apply_local_unitary(
    state: &SparseState,
    party: usize,
    u: &ModeUnitary,
) -> Result<SparseState> {
    apply_local_unitary_with(Exec::default(), state, party, u)
}

pub fn apply_local_unitary_with(
    exec: Exec,
    state: &SparseState,
    party: usize,
    u: &ModeUnitary,
) -> Result<SparseState> {
    let shape = state.shape();
    if party >= shape.parties() {
        return Err(Error::PartyOutOfRange {
            party,
            parties: shape.parties(),
        });
    }
    if u.dim() != shape.modes() {
        return Err(Error::MatrixShape {
            expected: shape.modes(),
            rows: u.dim(),
            cols: u.dim(),
        });
    }
    let inputs: Vec<FockVector> = state
        .iter()
        .map(|(b, _)| b.part(party).clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let columns = par::map(exec, &inputs, |n| evolve_fock(u, n));
    let table: BTreeMap<&FockVector, &Vec<(FockVector, C64)>> =
        inputs.iter().zip(&columns).collect();
    let mut out: BTreeMap<BasisState, C64> = BTreeMap::new();
    for (b, a) in state.iter() {
        for (m, t) in table[b.part(party)] {
            *out.entry(b.with_part(party, m.clone())).or_default() += a * t;
        }
    }
    Ok(SparseState::from_map_unchecked(shape.clone(), out))
}

/// Which basis the parties' photons are counted in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementSetting {
    Computational,
    Hadamard { l: usize, indices: HwIndices },
}

impl MeasurementSetting {
    pub fn hadamard(l: usize, indices: HwIndices) -> Result<Self> {
        if l >= indices.modes() {
            return Err(Error::InvalidParameter(format!(
                "measurement label l = {l} must lie in [0, {})",
                indices.modes()
            )));
        }
        Ok(Self::Hadamard { l, indices })
    }
}

/// State after the local rotations of a setting (identity for computational).
pub fn rotate_to_setting(
    exec: Exec,
    state: &SparseState,
    setting: &MeasurementSetting,
) -> Result<SparseState> {
    match setting {
        MeasurementSetting::Computational => Ok(state.clone()),
        MeasurementSetting::Hadamard { l, indices } => {
            let modes = state.shape().modes();
            let mut s = state.clone();
            for (party, jl) in indices.scaled(*l).into_iter().enumerate() {
                s = apply_local_unitary_with(exec, &s, party, &hadamard_matrix(modes, jl))?;
            }
            Ok(s)
        }
    }
}

pub fn outcome_distribution(
    state: &SparseState,
    setting: &MeasurementSetting,
) -> Result<BTreeMap<BasisState, f64>> {
    outcome_distribution_with(Exec::default(), state, setting)
}

pub fn outcome_distribution_with(
    exec: Exec,
    state: &SparseState,
    setting: &MeasurementSetting,
) -> Result<BTreeMap<BasisState, f64>> {
    Ok(rotate_to_setting(exec, state, setting)?.probabilities())
}

/// Eigenphase index `m` of `Lambda_{j_1 l} (x) ... (x) Lambda_{j_P l}` read off a
/// photon-counting outcome in the rotated basis.
///
/// The label is `sum_i mu(n_i)` plus a constant offset `(M-1) sum_i j'_i N_i / 2`
/// (with `j'_i = j_i l mod M`) coming from the half-power phases. The offset
/// vanishes for odd `M`.
pub fn hadamard_outcome_label(outcome: &BasisState, indices: &HwIndices, l: usize) -> usize {
    let m = indices.modes();
    let mu: usize = outcome.parts().iter().map(raw_clock).sum();
    let s: usize = indices
        .scaled(l)
        .iter()
        .zip(outcome.parts())
        .map(|(&j, p)| j * p.photons() as usize)
        .sum();
    let offset = if m % 2 == 1 {
        0
    } else {
        ((m - 1) * (s / 2)) % m
    };
    (mu + offset) % m
}

/// `<S_Lambda(l, m)>` for every `m`, obtained by measuring in the rotated basis.
pub fn s_lambda_distribution_by_measurement(
    exec: Exec,
    state: &SparseState,
    indices: &HwIndices,
    l: usize,
) -> Result<Vec<f64>> {
    let setting = MeasurementSetting::hadamard(l % indices.modes(), indices.clone())?;
    let dist = outcome_distribution_with(exec, state, &setting)?;
    let mut out = vec![0.0; indices.modes()];
    for (b, p) in dist {
        out[hadamard_outcome_label(&b, indices, l)] += p;
    }
    Ok(out)
}

/// Seeded i.i.d. draws from a distribution.
pub fn sample_outcomes(
    dist: &BTreeMap<BasisState, f64>,
    count: usize,
    seed: u64,
) -> Result<Vec<BasisState>> {
    let (keys, weights): (Vec<&BasisState>, Vec<f64>) =
        dist.iter().filter(|(_, &p)| p > 0.0).unzip();
    if keys.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let index = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| keys[index.sample(&mut rng)].clone())
        .collect())
}

/// Count occurrences of each outcome.
pub fn tally(samples: &[BasisState]) -> BTreeMap<BasisState, usize> {
    let mut out = BTreeMap::new();
    for s in samples {
        *out.entry(s.clone()).or_insert(0) += 1;
    }
    out
}
