mod common;

use std::collections::BTreeMap;

use multirail::fock::{enumerate_basis, inner_product};
use multirail::hw::mode_shift;
use multirail::loss::{lossy_mixture, lossy_verifier_expectation, sweep_lossy};
use multirail::source::{
    db_to_r, generate_postselected, linear_grid, pattern_probabilities, source_amplitudes,
    sweep_displacement,
};
use multirail::verifier::{kappa_decomposition, verifier_all_kappa};
use multirail::{
    BasisState, Exec, FockVector, HwIndices, LossChannel, SourceSpec, SystemShape, VerifierSpec,
};
use proptest::prelude::*;

fn fig_shape() -> SystemShape {
    SystemShape::new(3, 5, vec![2, 1, 1]).unwrap()
}

fn fig_spec() -> VerifierSpec {
    VerifierSpec::full(HwIndices::new(&fig_shape(), vec![1, 4, 4]).unwrap(), 0, 0)
}

#[test]
fn squeezed_amplitudes_match_closed_form() {
    for (r, x) in [(0.3, 0.0), (0.576, 0.2), (1.15, -0.7)] {
        let got = source_amplitudes(&SourceSpec::Squeezed { r, x }, 15).unwrap();
        let want = common::squeezed_plain(r, x, 15);
        for (g, w) in got.iter().zip(&want) {
            assert!((g.re - w).abs() < 1e-13 && g.im == 0.0);
        }
    }
}

#[test]
fn squeezed_state_depends_on_hermite_products_only() {
    // amplitude ratios follow h_{n_tot}(2 zeta x) / sqrt(prod n_i!)
    let shape = SystemShape::new(2, 3, vec![2, 1]).unwrap();
    let (r, x) = (0.7, 0.35);
    let g = generate_postselected(&shape, &SourceSpec::Squeezed { r, x }).unwrap();
    let y = 2.0 * multirail::SqueezedParams::new(r).unwrap().zeta * x;
    let raw: Vec<(BasisState, f64)> = shape
        .basis()
        .into_iter()
        .map(|b| {
            let h: f64 = b
                .total()
                .occupations()
                .iter()
                .map(|&n| common::hermite_plain(n, y))
                .product();
            let f = b.factorial().unwrap() as f64;
            (b, h / f.sqrt())
        })
        .collect();
    let norm = raw.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
    for (b, a) in raw {
        assert!((g.state.amplitude(&b).re - a / norm).abs() < 1e-12);
    }
}

#[test]
fn pattern_probabilities_add_up_to_total_photon_probability() {
    let sources = [
        SourceSpec::Squeezed { r: 0.5, x: 0.3 },
        SourceSpec::Coherent { re: 0.6, im: 0.4 },
        SourceSpec::SinglePhoton,
        SourceSpec::Fock { nu: 2 },
    ];
    for m in 2..=3usize {
        for p in 2..=3usize {
            for src in &sources {
                let c = source_amplitudes(src, 4).unwrap();
                for total in 0..=4u32 {
                    // probability of `total` photons in the pre-splitter product state
                    let want: f64 = enumerate_basis(m, total)
                        .iter()
                        .map(|v| {
                            v.occupations()
                                .iter()
                                .map(|&n| c[n as usize].norm_sqr())
                                .product::<f64>()
                        })
                        .sum();
                    let got: f64 = pattern_probabilities(p, m, total, src)
                        .unwrap()
                        .values()
                        .sum();
                    assert!(
                        (got - want).abs() < 1e-12,
                        "M={m} P={p} {src} N={total}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn fock_sources_need_matching_totals() {
    let shape = SystemShape::new(2, 2, vec![3, 1]).unwrap();
    let g = generate_postselected(&shape, &SourceSpec::Fock { nu: 2 }).unwrap();
    assert!(!g.is_empty());
    let shape = SystemShape::new(2, 2, vec![2, 1]).unwrap();
    assert!(generate_postselected(&shape, &SourceSpec::Fock { nu: 2 })
        .unwrap()
        .is_empty());
}

proptest! {
    #![proptest_config(common::proptest_config(24))]

    #[test]
    fn generated_states_are_shift_symmetric(seed in any::<u64>(), kind in 0usize..4, r in 0.05f64..1.5, x in -1.0f64..1.0) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 5, 3, 4);
        let src = match kind {
            0 => SourceSpec::SinglePhoton,
            1 => SourceSpec::Fock { nu: 1 + (seed % 2) as u32 },
            2 => SourceSpec::Coherent { re: x, im: r - 0.5 },
            _ => SourceSpec::Squeezed { r, x },
        };
        let g = generate_postselected(&shape, &src).unwrap();
        prop_assert!((0.0..=1.0).contains(&g.postselect_probability));
        if !g.is_empty() {
            prop_assert!((g.state.norm() - 1.0).abs() < 1e-12);
            let ov = inner_product(&g.state, &mode_shift(&g.state, 1)).unwrap();
            prop_assert!((ov - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn loss_weights_sum_to_one_without_cutoff(r in 0.1f64..1.2, x in 0.0f64..0.5, eps in 0.0f64..0.3) {
        let shape = SystemShape::new(2, 2, vec![1, 1]).unwrap();
        let mix = lossy_mixture(Exec::Sequential, &shape, &SourceSpec::Squeezed { r, x }, LossChannel::new(eps).unwrap(), 40).unwrap();
        prop_assert!((mix.retained_probability - 1.0).abs() < 1e-6);
    }
}

#[test]
fn sweep_rows_are_ordered_and_complete() {
    let grid = linear_grid(0.0, 0.1, 0.05).unwrap();
    let rows = sweep_displacement(
        Exec::Sequential,
        &fig_shape(),
        db_to_r(5.0),
        &grid,
        &fig_spec(),
    )
    .unwrap();
    assert_eq!(rows.len(), 15);
    assert!(rows
        .windows(2)
        .all(|w| (w[0].x, w[0].kappa) < (w[1].x, w[1].kappa)));
    assert!(rows.iter().all(|r| (r.bound - 1.0 / 3.0).abs() < 1e-15));
    let par = sweep_displacement(
        Exec::Parallel,
        &fig_shape(),
        db_to_r(5.0),
        &grid,
        &fig_spec(),
    )
    .unwrap();
    assert_eq!(rows, par);
    assert!(sweep_displacement(
        Exec::Sequential,
        &fig_shape(),
        0.5,
        &[0.2, 0.1],
        &fig_spec()
    )
    .is_err());
}

#[test]
fn lossless_channel_reproduces_lossless_verifier() {
    let shape = fig_shape();
    let src = SourceSpec::Squeezed { r: 0.576, x: 0.2 };
    let mix = lossy_mixture(
        Exec::Sequential,
        &shape,
        &src,
        LossChannel::new(0.0).unwrap(),
        3,
    )
    .unwrap();
    let e = lossy_verifier_expectation(Exec::Sequential, &mix, &fig_spec()).unwrap();
    let g = generate_postselected(&shape, &src).unwrap();
    let v = verifier_all_kappa(&g.state, &fig_spec()).unwrap();
    for (a, b) in e.per_kappa.iter().zip(&v) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((e.retained_probability - 1.0).abs() < 1e-12);
}

#[test]
fn shifted_loss_patterns_give_equal_expectations() {
    let shape = fig_shape();
    let mix = lossy_mixture(
        Exec::Sequential,
        &shape,
        &SourceSpec::Squeezed { r: 0.576, x: 0.3 },
        LossChannel::new(0.15).unwrap(),
        2,
    )
    .unwrap();
    let by_nu: BTreeMap<FockVector, Vec<f64>> = mix
        .components
        .iter()
        .map(|c| {
            (
                c.nu_tot.clone(),
                verifier_all_kappa(&c.state, &fig_spec()).unwrap(),
            )
        })
        .collect();
    let mut compared = 0;
    for (nu, v) in &by_nu {
        use multirail::hw::ModeShift;
        let w = &by_nu[&nu.shifted(1)];
        for (a, b) in v.iter().zip(w) {
            assert!((a - b).abs() < 1e-12);
        }
        compared += 1;
    }
    assert_eq!(compared, 21);
}

#[test]
fn lossy_components_follow_the_weight_law_and_lose_symmetry() {
    let shape = fig_shape();
    let idx = HwIndices::new(&shape, vec![1, 4, 4]).unwrap();
    let mix = lossy_mixture(
        Exec::Sequential,
        &shape,
        &SourceSpec::Squeezed { r: 0.576, x: 0.25 },
        LossChannel::new(0.1).unwrap(),
        2,
    )
    .unwrap();
    for c in &mix.components {
        let weights = kappa_decomposition(&c.state, &idx);
        let v = verifier_all_kappa(&c.state, &fig_spec()).unwrap();
        for kappa in 0..5 {
            assert!((v[kappa] - (1.0 + 5.0 * weights[0][kappa]) / 6.0).abs() < 1e-10);
        }
        let k0: f64 = weights[0].iter().sum();
        if c.nu_tot.photons() > 0 {
            assert!(k0 < 1.0 - 1e-6, "{}: {k0}", c.nu_tot);
        } else {
            assert!((k0 - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn lossy_kappa_sums_stay_below_five_thirds() {
    let grid = linear_grid(0.05, 1.0, 0.05).unwrap();
    let rows = sweep_lossy(
        Exec::Parallel,
        &fig_shape(),
        db_to_r(5.0),
        &grid,
        &fig_spec(),
        LossChannel::new(0.1).unwrap(),
        3,
    )
    .unwrap();
    for chunk in rows.chunks(5) {
        let s: f64 = chunk.iter().map(|r| r.expectation).sum();
        assert!(s < 5.0 / 3.0, "x = {}: {s}", chunk[0].x);
    }
}

#[test]
fn detectable_range_shrinks_with_loss() {
    let grid = linear_grid(0.0, 0.6, 0.01).unwrap();
    let r = db_to_r(5.0);
    let mut last = f64::INFINITY;
    for eps in [0.0, 0.1, 0.2, 0.25] {
        let rows = sweep_lossy(
            Exec::Parallel,
            &fig_shape(),
            r,
            &grid,
            &fig_spec(),
            LossChannel::new(eps).unwrap(),
            3,
        )
        .unwrap();
        let detected = grid
            .iter()
            .filter(|&&x| {
                rows.iter()
                    .any(|row| row.x == x && row.expectation > row.bound + 1e-9)
            })
            .count();
        assert!(
            (detected as f64) <= last,
            "eps = {eps}: {detected} > {last}"
        );
        last = detected as f64;
    }
}

#[test]
fn mixture_state_amplitudes_are_real_for_squeezed_input() {
    let mix = lossy_mixture(
        Exec::Sequential,
        &SystemShape::new(2, 3, vec![1, 1]).unwrap(),
        &SourceSpec::Squeezed { r: 0.4, x: 0.2 },
        LossChannel::new(0.2).unwrap(),
        2,
    )
    .unwrap();
    for c in &mix.components {
        assert!(c.state.iter().all(|(_, a)| a.im == 0.0));
        assert!((c.state.norm() - 1.0).abs() < 1e-12);
    }
}
