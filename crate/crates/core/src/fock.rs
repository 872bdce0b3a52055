//! Fock-basis combinatorics and sparse multipartite state vectors.
//!
//! Every party owns `M` modes and a fixed photon number `N_i`. Basis states are
//! tuples of per-party occupation vectors; a [`SparseState`] maps them to
//! complex amplitudes. Iteration order is the canonical basis order:
//! lexicographically descending occupation tuples, party by party.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped from sparse maps.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Largest total photon number for which exact factorial arithmetic is
/// guaranteed (20! fits comfortably in a `u128`, 34! is the hard limit).
pub const MAX_EXACT_PHOTONS: u32 = 20;

/// Party count, modes per party and per-party photon numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemShape {
    parties: usize,
    modes: usize,
    photons: Vec<u32>,
}

impl SystemShape {
    pub fn new(parties: usize, modes: usize, photons: Vec<u32>) -> Result<Self> {
        if parties == 0 {
            return Err(Error::InvalidShape("at least one party is required".into()));
        }
        if modes < 2 {
            return Err(Error::InvalidShape(format!(
                "each party needs at least 2 modes, got {modes}"
            )));
        }
        if photons.len() != parties {
            return Err(Error::InvalidShape(format!(
                "{} photon numbers given for {parties} parties",
                photons.len()
            )));
        }
        Ok(Self {
            parties,
            modes,
            photons,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> &[u32] {
        &self.photons
    }

    pub fn total_photons(&self) -> u32 {
        self.photons.iter().sum()
    }

    /// `exp(2 pi i / M)`.
    pub fn omega(&self) -> C64 {
        root_of_unity(self.modes, 1)
    }

    /// Dimension of the fixed-local-photon-number subspace.
    pub fn dimension(&self) -> u128 {
        self.photons
            .iter()
            .map(|&n| stars_and_bars(self.modes, n))
            .product()
    }

    /// All joint basis states in canonical order.
    pub fn basis(&self) -> Vec<BasisState> {
        let local: Vec<Vec<FockVector>> = self
            .photons
            .iter()
            .map(|&n| enumerate_basis(self.modes, n))
            .collect();
        let mut out = vec![Vec::with_capacity(self.parties)];
        for options in &local {
            let mut next = Vec::with_capacity(out.len() * options.len());
            for prefix in &out {
                for v in options {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(BasisState).collect()
    }

    /// Check that `basis` has one part per party with matching mode and
    /// photon counts.
    pub fn check_basis(&self, basis: &BasisState) -> Result<()> {
        if basis.0.len() != self.parties {
            return Err(Error::BasisMismatch(format!(
                "{} parts for {} parties",
                basis.0.len(),
                self.parties
            )));
        }
        for (i, (part, &n)) in basis.0.iter().zip(&self.photons).enumerate() {
            if part.modes() != self.modes {
                return Err(Error::BasisMismatch(format!(
                    "party {i} has {} modes, expected {}",
                    part.modes(),
                    self.modes
                )));
            }
            if part.photons() != n {
                return Err(Error::BasisMismatch(format!(
                    "party {i} holds {} photons, expected {n}",
                    part.photons()
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n: Vec<String> = self.photons.iter().map(|n| n.to_string()).collect();
        write!(f, "P={} M={} N=({})", self.parties, self.modes, n.join(","))
    }
}

/// `exp(2 pi i power / modes)`, with the power reduced mod `modes` first.
pub fn root_of_unity(modes: usize, power: i64) -> C64 {
    let p = power.rem_euclid(modes as i64) as f64;
    C64::from_polar(1.0, TAU * p / modes as f64)
}

/// Occupation numbers of one party's modes.
///
/// Ordering is the canonical basis order (lexicographically *descending*),
/// so `(1,0) < (0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockVector(Vec<u32>);

impl FockVector {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `prod_m n_m!`, exact.
    pub fn factorial(&self) -> Result<u128> {
        self.0.iter().try_fold(1u128, |acc, &n| {
            acc.checked_mul(factorial(n)?).ok_or(Error::Overflow("n!"))
        })
    }

    /// Mode indices repeated by occupation, e.g. `(2,0,1)` gives `[0,0,2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(m, &n)| std::iter::repeat(m).take(n as usize))
            .collect()
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        debug_assert_eq!(self.modes(), other.modes());
        FockVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for FockVector {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for FockVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.0 {
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl From<Vec<u32>> for FockVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// Joint label `(n_1, ..., n_P)` of a multipartite Fock state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisState(Vec<FockVector>);

impl BasisState {
    pub fn new(parts: Vec<FockVector>) -> Self {
        Self(parts)
    }

    pub fn from_occupations(parts: Vec<Vec<u32>>) -> Self {
        Self(parts.into_iter().map(FockVector).collect())
    }

    pub fn parts(&self) -> &[FockVector] {
        &self.0
    }

    pub fn part(&self, i: usize) -> &FockVector {
        &self.0[i]
    }

    pub fn with_part(&self, i: usize, v: FockVector) -> BasisState {
        let mut parts = self.0.clone();
        parts[i] = v;
        BasisState(parts)
    }

    /// Pre-splitter occupation `n_tot = sum_i n_i`.
    pub fn total(&self) -> FockVector {
        let modes = self.0.first().map_or(0, FockVector::modes);
        let mut acc = vec![0u32; modes];
        for part in &self.0 {
            for (a, n) in acc.iter_mut().zip(part.occupations()) {
                *a += n;
            }
        }
        FockVector(acc)
    }

    /// `n_tot! / (n_1! ... n_P!)` as an exact integer.
    pub fn multinomial(&self) -> Result<u128> {
        let modes = self.0.first().map_or(0, FockVector::modes);
        let mut acc = 1u128;
        for m in 0..modes {
            let mut remaining: u32 = self.0.iter().map(|p| p.0[m]).sum();
            for part in &self.0 {
                let k = part.0[m];
                acc = acc
                    .checked_mul(binomial(remaining, k)?)
                    .ok_or(Error::Overflow("multinomial"))?;
                remaining -= k;
            }
        }
        Ok(acc)
    }

    /// `prod_i n_i!` over every party and mode.
    pub fn factorial(&self) -> Result<u128> {
        self.0.iter().try_fold(1u128, |acc, p| {
            acc.checked_mul(p.factorial()?)
                .ok_or(Error::Overflow("prod n_i!"))
        })
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join("|"))
    }
}

/// Exact `n!`; overflows past 34!.
pub fn factorial(n: u32) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| {
        acc.checked_mul(k).ok_or(Error::Overflow("n!"))
    })
}

/// Exact binomial coefficient.
pub fn binomial(n: u32, k: u32) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::Overflow("binomial"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// `binomial(N + M - 1, M - 1)`: number of ways to place `N` photons in `M` modes.
pub fn stars_and_bars(modes: usize, photons: u32) -> u128 {
    binomial(photons + modes as u32 - 1, modes as u32 - 1).unwrap_or(u128::MAX)
}

/// All occupation vectors of `modes` modes holding `photons` photons, in
/// canonical (lexicographically descending) order.
pub fn enumerate_basis(modes: usize, photons: u32) -> Vec<FockVector> {
    fn rec(prefix: &mut Vec<u32>, remaining: u32, modes: usize, out: &mut Vec<FockVector>) {
        if prefix.len() + 1 == modes {
            prefix.push(remaining);
            out.push(FockVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for n in (0..=remaining).rev() {
            prefix.push(n);
            rec(prefix, remaining - n, modes, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        return out;
    }
    rec(&mut Vec::with_capacity(modes), photons, modes, &mut out);
    out
}

/// Complex amplitudes over the fixed-local-photon-number basis of a shape.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    shape: SystemShape,
    amplitudes: BTreeMap<BasisState, C64>,
}

impl SparseState {
    /// Build a state from `(basis, amplitude)` pairs. Duplicate keys are summed;
    /// amplitudes below [`PRUNE_THRESHOLD`] are dropped. No normalization.
    pub fn new<I>(shape: SystemShape, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisState, C64)>,
    {
        let mut map: BTreeMap<BasisState, C64> = BTreeMap::new();
        for (b, a) in amplitudes {
            shape.check_basis(&b)?;
            *map.entry(b).or_default() += a;
        }
        map.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        Ok(Self {
            shape,
            amplitudes: map,
        })
    }

    /// Skips key validation; callers guarantee every key fits `shape`.
    pub(crate) fn from_map_unchecked(
        shape: SystemShape,
        mut amplitudes: BTreeMap<BasisState, C64>,
    ) -> Self {
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        Self { shape, amplitudes }
    }

    pub fn empty(shape: SystemShape) -> Self {
        Self {
            shape,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn basis_state(shape: SystemShape, basis: BasisState) -> Result<Self> {
        Self::new(shape, [(basis, C64::new(1.0, 0.0))])
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, basis: &BasisState) -> C64 {
        self.amplitudes.get(basis).copied().unwrap_or_default()
    }

    /// Entries in canonical basis order.
    pub fn iter(&self) -> impl Iterator<Item = (&BasisState, &C64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(b, a)| (b.clone(), a * factor))
            .collect();
        Self::from_map_unchecked(self.shape.clone(), amplitudes)
    }

    /// Apply `f` to every basis key, summing amplitudes that collide.
    pub(crate) fn map_basis<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&BasisState, C64) -> (BasisState, C64),
    {
        let mut out: BTreeMap<BasisState, C64> = BTreeMap::new();
        for (b, a) in &self.amplitudes {
            let (nb, na) = f(b, *a);
            *out.entry(nb).or_default() += na;
        }
        Self::from_map_unchecked(self.shape.clone(), out)
    }

    /// Sum of two states on the same shape.
    pub fn plus(&self, other: &SparseState) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        let mut out = self.amplitudes.clone();
        for (b, a) in &other.amplitudes {
            *out.entry(b.clone()).or_default() += a;
        }
        Ok(Self::from_map_unchecked(self.shape.clone(), out))
    }

    /// Computational-basis probabilities `|c|^2`.
    pub fn probabilities(&self) -> BTreeMap<BasisState, f64> {
        self.amplitudes
            .iter()
            .map(|(b, a)| (b.clone(), a.norm_sqr()))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// `<a|b> = sum conj(a) b` over shared keys.
pub fn inner_product(a: &SparseState, b: &SparseState) -> Result<C64> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch);
    }
    let (small, large, conj_small) = if a.len() <= b.len() {
        (a, b, true)
    } else {
        (b, a, false)
    };
    let mut acc = C64::default();
    for (k, x) in &small.amplitudes {
        if let Some(y) = large.amplitudes.get(k) {
            acc += if conj_small {
                x.conj() * y
            } else {
                y.conj() * x
            };
        }
    }
    Ok(acc)
}

/// On-disk state format.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub parties: usize,
    pub modes: usize,
    pub photons: Vec<u32>,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub basis: Vec<Vec<u32>>,
    pub re: f64,
    pub im: f64,
}

impl From<&SparseState> for StateFile {
    fn from(s: &SparseState) -> Self {
        StateFile {
            parties: s.shape.parties,
            modes: s.shape.modes,
            photons: s.shape.photons.clone(),
            amplitudes: s
                .amplitudes
                .iter()
                .map(|(b, a)| AmplitudeEntry {
                    basis: b.0.iter().map(|p| p.0.clone()).collect(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<StateFile> for SparseState {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        let shape = SystemShape::new(f.parties, f.modes, f.photons)?;
        SparseState::new(
            shape,
            f.amplitudes
                .into_iter()
                .map(|e| (BasisState::from_occupations(e.basis), C64::new(e.re, e.im))),
        )
    }
}

impl Serialize for SparseState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        StateFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseState {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let f = StateFile::deserialize(deserializer)?;
        SparseState::try_from(f).map_err(serde::de::Error::custom)
    }
}
