//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use multirail::fock::enumerate_basis;
use multirail::{BasisState, FockVector, HwIndices, ModeUnitary, SparseState, SystemShape};
use num_complex::Complex64 as C64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_c(rng: &mut impl Rng) -> C64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * t.cos(), r * t.sin())
}

/// Random shape with `M <= max_modes`, `P <= max_parties`, `1 <= N_tot <= max_total`.
pub fn random_shape(
    rng: &mut impl Rng,
    max_modes: usize,
    max_parties: usize,
    max_total: u32,
) -> SystemShape {
    let m = rng.gen_range(2..=max_modes);
    let p = rng.gen_range(1..=max_parties);
    let total = rng.gen_range(1..=max_total);
    let mut photons = vec![0u32; p];
    for _ in 0..total {
        photons[rng.gen_range(0..p)] += 1;
    }
    SystemShape::new(p, m, photons).unwrap()
}

/// Normalized state with Gaussian amplitudes on every basis state (or a random subset).
pub fn random_state(rng: &mut impl Rng, shape: &SystemShape, sparse: bool) -> SparseState {
    let mut amps: Vec<(BasisState, C64)> = Vec::new();
    for b in shape.basis() {
        if !sparse || rng.gen_bool(0.5) {
            amps.push((b, gaussian_c(rng)));
        }
    }
    let s = SparseState::new(shape.clone(), amps).unwrap();
    if s.is_empty() {
        return random_state(rng, shape, false);
    }
    s.normalized().unwrap()
}

pub fn random_indices(rng: &mut impl Rng, shape: &SystemShape) -> HwIndices {
    let all = HwIndices::all_valid(shape);
    all[rng.gen_range(0..all.len())].clone()
}

/// Haar-ish unitary from Gram-Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ModeUnitary {
    let mut cols: Vec<Vec<C64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian_c(rng)).collect();
        for c in &cols {
            let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    let rows = (0..n)
        .map(|r| (0..n).map(|c| cols[c][r]).collect())
        .collect();
    ModeUnitary::new(rows).unwrap()
}

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn vec_fact(v: &[u32]) -> f64 {
    v.iter().map(|&n| fact(n)).product()
}

/// Expand `prod_k (sum_j U[j][k] b_j^+)^{n_k} / sqrt(n!)` monomial by monomial.
pub fn creation_operator_expansion(u: &ModeUnitary, input: &FockVector) -> BTreeMap<Vec<u32>, C64> {
    let m = u.dim();
    let mut poly: BTreeMap<Vec<u32>, C64> = BTreeMap::from([(vec![0u32; m], C64::new(1.0, 0.0))]);
    for (k, &n) in input.occupations().iter().enumerate() {
        for _ in 0..n {
            let mut next: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
            for (mono, c) in &poly {
                for j in 0..m {
                    let mut e = mono.clone();
                    e[j] += 1;
                    *next.entry(e).or_default() += c * u.get(j, k);
                }
            }
            poly = next;
        }
    }
    let norm_in = vec_fact(input.occupations()).sqrt();
    poly.into_iter()
        .map(|(mono, c)| {
            let a = c * vec_fact(&mono).sqrt() / norm_in;
            (mono, a)
        })
        .collect()
}

/// Apply `U` to one party via the creation-operator expansion.
pub fn apply_by_expansion(
    state: &SparseState,
    party: usize,
    u: &ModeUnitary,
) -> BTreeMap<BasisState, C64> {
    let mut out: BTreeMap<BasisState, C64> = BTreeMap::new();
    for (b, a) in state.iter() {
        for (mono, t) in creation_operator_expansion(u, b.part(party)) {
            *out.entry(b.with_part(party, FockVector::new(mono)))
                .or_default() += a * t;
        }
    }
    out
}

/// Probabilists' Hermite polynomial straight from its recurrence.
pub fn hermite_plain(n: u32, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = x * b - k as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Displaced squeezed vacuum amplitudes written out term by term.
pub fn squeezed_plain(r: f64, x: f64, cutoff: u32) -> Vec<f64> {
    let g = r.tanh();
    let z = 1.0 / (1.0 - (-4.0 * r).exp()).sqrt();
    let pre = (1.0 - g * g).powf(0.25) * (-2.0 * g * (z * x).powi(2) / (1.0 + g)).exp();
    (0..=cutoff)
        .map(|n| pre * (g.powi(n as i32) / fact(n)).sqrt() * hermite_plain(n, 2.0 * z * x))
        .collect()
}

/// Mixture produced by simulating every source mode against its own
/// environment mode, then the splitters, then postselection.
///
/// Returns `nu -> (weight, normalized conditional state)` with weights
/// normalized over all environment outcomes reachable within the source
/// cutoff.
pub fn explicit_environment_loss(
    shape: &SystemShape,
    source: &[f64],
    eps: f64,
) -> BTreeMap<Vec<u32>, (f64, BTreeMap<BasisState, f64>)> {
    let m = shape.modes();
    let p = shape.parties();
    let cutoff = source.len() as u32 - 1;
    // per mode: list of (kept, lost, amplitude)
    let mut per_mode: Vec<(u32, u32, f64)> = Vec::new();
    for n in 0..=cutoff {
        for lost in 0..=n {
            let kept = n - lost;
            let binom = fact(n) / (fact(lost) * fact(kept));
            let a = source[n as usize]
                * binom.sqrt()
                * eps.powf(lost as f64 / 2.0)
                * (1.0 - eps).powf(kept as f64 / 2.0);
            per_mode.push((kept, lost, a));
        }
    }
    // joint product over modes, restricted to the postselected total
    let total = shape.total_photons();
    let mut joint: Vec<(Vec<u32>, Vec<u32>, f64)> = vec![(vec![], vec![], 1.0)];
    for _ in 0..m {
        let mut next = Vec::new();
        for (kept, lost, a) in &joint {
            let used: u32 = kept.iter().sum();
            for &(k, l, b) in &per_mode {
                if used + k > total {
                    continue;
                }
                let mut kk = kept.clone();
                kk.push(k);
                let mut ll = lost.clone();
                ll.push(l);
                next.push((kk, ll, a * b));
            }
        }
        joint = next;
    }
    // splitter: each mode's kept photons distributed over parties
    let mut by_nu: BTreeMap<Vec<u32>, BTreeMap<BasisState, f64>> = BTreeMap::new();
    for (kept, lost, a) in joint {
        if kept.iter().sum::<u32>() != total {
            continue;
        }
        let per_mode_splits: Vec<Vec<FockVector>> =
            kept.iter().map(|&k| enumerate_basis(p, k)).collect();
        let mut combos: Vec<(Vec<Vec<u32>>, f64)> = vec![(vec![vec![0; m]; p], a)];
        for (mode, splits) in per_mode_splits.iter().enumerate() {
            let mut next = Vec::new();
            for (occ, amp) in &combos {
                for s in splits {
                    let mut o = occ.clone();
                    let mut denom = 1.0;
                    for (party, &c) in s.occupations().iter().enumerate() {
                        o[party][mode] += c;
                        denom *= fact(c);
                    }
                    let coeff =
                        (fact(kept[mode]) / denom / (p as f64).powi(kept[mode] as i32)).sqrt();
                    next.push((o, amp * coeff));
                }
            }
            combos = next;
        }
        for (occ, amp) in combos {
            let ok = occ
                .iter()
                .zip(shape.photons())
                .all(|(o, &n)| o.iter().sum::<u32>() == n);
            if ok {
                *by_nu
                    .entry(lost.clone())
                    .or_default()
                    .entry(BasisState::from_occupations(occ))
                    .or_default() += amp;
            }
        }
    }
    let weights: BTreeMap<Vec<u32>, f64> = by_nu
        .iter()
        .map(|(nu, st)| (nu.clone(), st.values().map(|a| a * a).sum::<f64>()))
        .collect();
    let total_w: f64 = weights.values().sum();
    by_nu
        .into_iter()
        .filter(|(nu, _)| weights[nu] > 0.0)
        .map(|(nu, st)| {
            let w = weights[&nu];
            let inv = 1.0 / w.sqrt();
            let st = st.into_iter().map(|(b, a)| (b, a * inv)).collect();
            (nu, (w / total_w, st))
        })
        .collect()
}

pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
