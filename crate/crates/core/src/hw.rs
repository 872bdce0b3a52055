//! Heisenberg-Weyl operators on multi-rail Fock states.
//!
//! `X` shifts every photon to the next mode (cyclically), `Z` multiplies a
//! photon in mode `m` by `omega^m`, and `Lambda_j = X Z^j`. On a Fock vector
//! `Z` acts by the clock label `mu(n) = sum_m m n_m`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{root_of_unity, BasisState, FockVector, SparseState, SystemShape};

/// Cyclic mode shift `X^power`.
pub trait ModeShift: Sized {
    fn shifted(&self, power: i64) -> Self;
}

impl ModeShift for FockVector {
    fn shifted(&self, power: i64) -> Self {
        let occ = self.occupations();
        let m = occ.len() as i64;
        let mut out = vec![0u32; occ.len()];
        for (i, &n) in occ.iter().enumerate() {
            out[(i as i64 + power).rem_euclid(m) as usize] = n;
        }
        FockVector::new(out)
    }
}

impl ModeShift for BasisState {
    fn shifted(&self, power: i64) -> Self {
        BasisState::new(self.parts().iter().map(|p| p.shifted(power)).collect())
    }
}

/// Simultaneous shift `(X^{(x) P})^power` of every basis component.
pub fn mode_shift(state: &SparseState, power: i64) -> SparseState {
    state.map_basis(|b, a| (b.shifted(power), a))
}

/// `mu(n) mod M`.
pub fn clock_label(n: &FockVector) -> usize {
    let m = n.modes();
    raw_clock(n) % m
}

/// `mu(n)` without reduction.
pub fn raw_clock(n: &FockVector) -> usize {
    n.occupations()
        .iter()
        .enumerate()
        .map(|(m, &k)| m * k as usize)
        .sum()
}

/// `sum_i w_i mu(n_i) mod M` for arbitrary integer weights.
pub fn weighted_clock(basis: &BasisState, weights: &[i64], modes: usize) -> usize {
    let s: i64 = basis
        .parts()
        .iter()
        .zip(weights)
        .map(|(p, &w)| w * raw_clock(p) as i64)
        .sum();
    s.rem_euclid(modes as i64) as usize
}

/// `Z^{p_1} (x) ... (x) Z^{p_P}`: each amplitude picks up `omega^{sum_i p_i mu(n_i)}`.
pub fn apply_phase_shift(state: &SparseState, powers: &[i64]) -> SparseState {
    let modes = state.shape().modes();
    state.map_basis(|b, a| {
        let phase = root_of_unity(modes, weighted_clock(b, powers, modes) as i64);
        (b.clone(), a * phase)
    })
}

/// `Lambda_{p_1} (x) ... (x) Lambda_{p_P}` with `Lambda_p = X Z^p`.
pub fn apply_lambda(state: &SparseState, powers: &[i64]) -> SparseState {
    let modes = state.shape().modes();
    state.map_basis(|b, a| {
        let phase = root_of_unity(modes, weighted_clock(b, powers, modes) as i64);
        (b.shifted(1), a * phase)
    })
}

/// Exponent `e` with `(Lambda_{w_1} (x) ... (x) Lambda_{w_P})^power |b> =
/// omega^e X^power |b>`, reduced mod `M`.
///
/// Uses `mu(X n) = mu(n) + |n|`, so the phase accumulated over `power` steps
/// is `sum_i w_i (power mu(n_i) + N_i power (power - 1) / 2)`.
pub fn lambda_power_exponent(
    basis: &BasisState,
    weights: &[i64],
    power: usize,
    modes: usize,
) -> usize {
    let p = power as i64;
    let m = modes as i64;
    let mut e = 0i64;
    for (part, &w) in basis.parts().iter().zip(weights) {
        let mu = raw_clock(part) as i64 % m;
        let n = part.photons() as i64 % m;
        let tri = (p * (p - 1) / 2) % m;
        e = (e + w.rem_euclid(m) * ((p * mu + n * tri) % m)) % m;
    }
    e.rem_euclid(m) as usize
}

/// Size of the orbit of `n` under cyclic shift (its minimal period).
pub fn orbit_size(n: &FockVector) -> usize {
    let occ = n.occupations();
    let m = occ.len();
    (1..=m)
        .find(|&d| m % d == 0 && (0..m).all(|i| occ[i] == occ[(i + d) % m]))
        .unwrap_or(m)
}

/// Orbit size of a joint basis state under the simultaneous shift.
pub fn joint_orbit_size(b: &BasisState) -> usize {
    let m = b.parts().first().map_or(1, FockVector::modes);
    (1..=m)
        .find(|&d| m % d == 0 && b.shifted(d as i64) == *b)
        .unwrap_or(m)
}

/// An orbit under cyclic mode shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XClass<T> {
    members: Vec<T>,
}

impl<T: ModeShift + Ord + Clone> XClass<T> {
    /// Orbit of `seed` under `X^m`, `m = 0..modes`.
    pub fn of(seed: &T, modes: usize) -> Self {
        let set: BTreeSet<T> = (0..modes as i64).map(|m| seed.shifted(m)).collect();
        Self {
            members: set.into_iter().collect(),
        }
    }

    /// First member in canonical basis order, so the lexicographically largest.
    pub fn representative(&self) -> &T {
        &self.members[0]
    }

    /// `|X|`, always a divisor of `M`.
    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    /// Members in canonical order.
    pub fn members(&self) -> &[T] {
        &self.members
    }

    pub fn contains(&self, x: &T) -> bool {
        self.members.binary_search(x).is_ok()
    }
}

/// Local class of a single Fock vector.
pub fn x_class_of(n: &FockVector) -> XClass<FockVector> {
    XClass::of(n, n.modes())
}

/// Joint class of a basis state under `X^{(x) P}`.
pub fn joint_class_of(b: &BasisState) -> XClass<BasisState> {
    let m = b.parts().first().map_or(1, FockVector::modes);
    XClass::of(b, m)
}

/// Partition of the shape's basis into joint classes, ordered by representative.
pub fn joint_classes(shape: &SystemShape) -> Vec<XClass<BasisState>> {
    partition_into_classes(shape.basis().into_iter(), shape.modes())
}

/// Joint classes touched by the state's support.
pub fn joint_classes_of_support(state: &SparseState) -> Vec<XClass<BasisState>> {
    partition_into_classes(state.iter().map(|(b, _)| b.clone()), state.shape().modes())
}

fn partition_into_classes<I: Iterator<Item = BasisState>>(
    basis: I,
    modes: usize,
) -> Vec<XClass<BasisState>> {
    let mut seen: BTreeMap<BasisState, ()> = BTreeMap::new();
    let mut classes = Vec::new();
    for b in basis {
        if seen.contains_key(&b) {
            continue;
        }
        let c = XClass::of(&b, modes);
        for mbr in c.members() {
            seen.insert(mbr.clone(), ());
        }
        classes.push(c);
    }
    classes.sort_by(|a, b| a.representative().cmp(b.representative()));
    classes
}

/// HW indices `j = (j_1, ..., j_P)` satisfying `sum_i j_i N_i = 0 (mod M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HwIndices {
    j: Vec<usize>,
    modes: usize,
}

impl HwIndices {
    pub fn new(shape: &SystemShape, j: Vec<usize>) -> Result<Self> {
        if j.len() != shape.parties() {
            return Err(Error::HwIndexCount {
                expected: shape.parties(),
                found: j.len(),
            });
        }
        let m = shape.modes();
        let j: Vec<usize> = j.into_iter().map(|x| x % m).collect();
        let weighted: u64 = j
            .iter()
            .zip(shape.photons())
            .map(|(&a, &n)| a as u64 * n as u64)
            .sum();
        if weighted % m as u64 != 0 {
            return Err(Error::HwIndexCondition { weighted, modes: m });
        }
        Ok(Self { j, modes: m })
    }

    /// Every index tuple valid for `shape`, in lexicographic order.
    pub fn all_valid(shape: &SystemShape) -> Vec<HwIndices> {
        let m = shape.modes();
        let p = shape.parties();
        let mut out = Vec::new();
        let mut j = vec![0usize; p];
        loop {
            if let Ok(h) = HwIndices::new(shape, j.clone()) {
                out.push(h);
            }
            let mut i = p;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                j[i] += 1;
                if j[i] < m {
                    break;
                }
                j[i] = 0;
            }
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.j
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `(j_i l) mod M` per party.
    pub fn scaled(&self, l: usize) -> Vec<usize> {
        self.j.iter().map(|&j| (j * l) % self.modes).collect()
    }

    pub fn as_weights(&self) -> Vec<i64> {
        self.j.iter().map(|&j| j as i64).collect()
    }

    /// j-weighted clock label `sum_i j_i mu(n_i) mod M`.
    pub fn label(&self, basis: &BasisState) -> usize {
        weighted_clock(basis, &self.as_weights(), self.modes)
    }
}

/// Symmetry indices `(k, kappa)`: `X^{(x)P}` eigenphase `omega^k` and
/// `Z^{j_1} (x) ... (x) Z^{j_P}` eigenphase `omega^kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryLabel {
    pub k: usize,
    pub kappa: usize,
}

impl SymmetryLabel {
    pub fn new(k: usize, kappa: usize, modes: usize) -> Self {
        Self {
            k: k % modes,
            kappa: kappa % modes,
        }
    }
}

/// `|E_k(X)> = sqrt(|X|)/M sum_m omega^{-k m} (X^{(x)P})^m |rep>`.
///
/// The state is an `X^{(x)P}` eigenstate with eigenvalue `omega^k`. `k` must
/// be a multiple of `M/|X|` (zero included), otherwise the sum vanishes.
pub fn build_ek_state(
    shape: &SystemShape,
    class: &XClass<BasisState>,
    k: usize,
) -> Result<SparseState> {
    let m = shape.modes();
    let card = class.cardinality();
    let step = m / card;
    if k % step != 0 {
        return Err(Error::InvalidEigenIndex { k, step });
    }
    let rep = class.representative();
    shape.check_basis(rep)?;
    let scale = (card as f64).sqrt() / m as f64;
    let mut amps: BTreeMap<BasisState, C64> = BTreeMap::new();
    for s in 0..m {
        let phase = root_of_unity(m, -((k * s) as i64));
        *amps.entry(rep.shifted(s as i64)).or_default() += phase * scale;
    }
    SparseState::new(shape.clone(), amps)
}

/// Per-party sets of local class cardinalities `|X_{n_i}|` over the state's
/// support (amplitudes above the pruning threshold).
pub fn support_cardinalities(state: &SparseState) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); state.shape().parties()];
    for (b, _) in state.iter() {
        for (i, part) in b.parts().iter().enumerate() {
            out[i].insert(orbit_size(part));
        }
    }
    out
}

/// Cardinalities over the full basis of the shape.
pub fn basis_cardinalities(shape: &SystemShape) -> Vec<BTreeSet<usize>> {
    shape
        .photons()
        .iter()
        .map(|&n| {
            crate::fock::enumerate_basis(shape.modes(), n)
                .iter()
                .map(orbit_size)
                .collect()
        })
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// First violation of the complementarity condition
/// `gcd(j_i (l - l') N_i |X| / M, |X|) = 1`, if any.
///
/// When `j_i (l - l') N_i |X|` is not divisible by `M` the first argument is
/// not an integer and the pair is reported as a violation.
pub fn find_complementarity_violation(
    shape: &SystemShape,
    indices: &HwIndices,
    labels: &[usize],
    support: &[BTreeSet<usize>],
) -> Option<Error> {
    let m = shape.modes() as u64;
    let labels: BTreeSet<usize> = labels.iter().map(|&l| l % shape.modes()).collect();
    let labels: Vec<usize> = labels.into_iter().collect();
    for (a, &l) in labels.iter().enumerate() {
        for &lp in &labels[a + 1..] {
            let dl = l.abs_diff(lp) as u64;
            for (party, (&j, &n)) in indices.values().iter().zip(shape.photons()).enumerate() {
                for &card in support.get(party).into_iter().flatten() {
                    let c = card as u64;
                    let num = j as u64 * dl * n as u64 * c;
                    let ok = num % m == 0 && gcd(num / m, c) == 1;
                    if !ok {
                        return Some(Error::NotComplementary {
                            l,
                            l_prime: lp,
                            party,
                            cardinality: card,
                        });
                    }
                }
            }
        }
    }
    None
}

/// `true` iff every pair of distinct labels is complementary on every party
/// for every supported class cardinality. Singletons always pass.
pub fn check_complementary_set(
    shape: &SystemShape,
    indices: &HwIndices,
    labels: &[usize],
    support: &[BTreeSet<usize>],
) -> bool {
    find_complementarity_violation(shape, indices, labels, support).is_none()
}
