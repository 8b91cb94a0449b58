use tcs_core::dynamics::{integrate_bundle, GaussianSeed, TrajectorySample};
use tcs_core::model::OscillatorParams;
use tcs_core::observables::StateKind;
use tcs_core::states;
use tcs_core::verify::{self, QuadratureSpec};
use tcs_core::{Error, C64};

fn sample(p: &OscillatorParams, s: &GaussianSeed, t: f64) -> TrajectorySample {
    let grid = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
    *integrate_bundle(p, s, &grid).unwrap().samples.last().unwrap()
}

#[test]
fn coherent_state_two_i_is_normalized() {
    let p = OscillatorParams::new(1.0, 1.0, 0.5, 1.0).unwrap();
    let s = GaussianSeed::reference(&p, C64::new(0.3, 0.8)).unwrap();
    let smp = sample(&p, &s, 1.7);
    let psi = states::coherent(&p, &s, &smp, C64::new(0.0, 2.0), None).unwrap();
    let spec = QuadratureSpec::for_states(&[&psi]).unwrap();
    let n = verify::inner_product(&psi, &psi, &spec).unwrap();
    assert!((n - 1.0).norm() < 1e-8, "{n}");
}

#[test]
fn coherent_states_overlap_like_textbook() {
    // |⟨α|β⟩|² = e^{−|α−β|²}
    let p = OscillatorParams::new(0.8, 1.3, 0.9, 1.0).unwrap();
    let s = GaussianSeed::new(C64::new(-0.2, 0.7), 0.4, 0.1).unwrap();
    let smp = sample(&p, &s, 2.0);
    let (a, b) = (C64::new(0.5, -1.0), C64::new(-0.3, 0.6));
    let sa = states::coherent(&p, &s, &smp, a, None).unwrap();
    let sb = states::coherent(&p, &s, &smp, b, None).unwrap();
    let spec = QuadratureSpec::for_states(&[&sa, &sb]).unwrap();
    let ov = verify::inner_product(&sa, &sb, &spec).unwrap().norm_sqr();
    assert!((ov - (-(a - b).norm_sqr()).exp()).abs() < 1e-10);
}

#[test]
fn fock_states_stay_orthonormal_under_strong_damping() {
    let p = OscillatorParams::new(1.0, 0.3, 3.0, 0.7).unwrap();
    let s = GaussianSeed::reference(&p, C64::new(0.0, 0.5)).unwrap();
    for t in [0.4, 1.5] {
        let g = verify::gram_matrix(&p, &s, t, 8).unwrap();
        assert!(g.max_deviation < 1e-8, "t={t}: {}", g.max_deviation);
    }
}

#[test]
fn quadrature_honours_node_requirement() {
    let p = OscillatorParams::new(1.0, 1.0, 0.2, 1.0).unwrap();
    let s = GaussianSeed::reference(&p, C64::new(0.0, 1.0)).unwrap();
    let smp = sample(&p, &s, 0.5);
    let high = states::fock(&p, &s, &smp, 30).unwrap();
    let spec = QuadratureSpec::for_states(&[&high]).unwrap();
    assert_eq!(spec.node_count, 120);
    assert!((verify::inner_product(&high, &high, &spec).unwrap() - 1.0).norm() < 1e-10);
    let short = QuadratureSpec { node_count: 79, ..spec };
    assert!(matches!(
        verify::inner_product(&high, &high, &short),
        Err(Error::InsufficientNodes { given: 79, required: 80 })
    ));
}

#[test]
fn top_fock_level_is_normalized_via_recurrence() {
    let p = OscillatorParams::new(1.0, 1.0, 0.2, 1.0).unwrap();
    let s = GaussianSeed::reference(&p, C64::new(0.1, 0.9)).unwrap();
    let smp = sample(&p, &s, 0.5);
    let top = states::FOCK_MAX;
    let spec = QuadratureSpec::new(2 * top + 20, smp.x, states::vacuum(&p, &s, &smp).core.width()).unwrap();
    let mut gram = [[C64::new(0.0, 0.0); 3]; 3];
    for (x, w) in spec.points().unwrap() {
        let v = states::fock_values(&p, &s, &smp, top, x).unwrap();
        let tail = &v[top - 2..];
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] += w * tail[i].conj() * tail[j];
            }
        }
    }
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            let ideal = if i == j { 1.0 } else { 0.0 };
            assert!((g - ideal).norm() < 1e-10, "({i},{j}) = {g}");
        }
    }
}

#[test]
fn residual_shrinks_under_step_refinement() {
    let p = OscillatorParams::new(1.0, 1.0, 0.8, 1.0).unwrap();
    let s = GaussianSeed::reference(&p, C64::new(0.0, 1.0)).unwrap();
    let h = verify::residual_step(&p);
    let coarse = verify::state_residual_with_step(&p, &s, StateKind::Tcs(3), 1.0, 0.0, 8.0 * h).unwrap();
    let fine = verify::state_residual_with_step(&p, &s, StateKind::Tcs(3), 1.0, 0.0, 4.0 * h).unwrap();
    assert!(fine.residual < coarse.residual || fine.residual < 1e-9);
}

#[test]
fn coherent_residual_is_small() {
    let p = OscillatorParams::new(1.0, 1.0, 0.6, 1.0).unwrap();
    let s = GaussianSeed::reference(&p, C64::new(0.1, 0.9)).unwrap();
    let r = verify::state_residual(&p, &s, StateKind::Cs(C64::new(1.0, -0.5)), 1.2, 0.0).unwrap();
    assert!(r.residual < 1e-6, "{r:?}");
}

#[test]
fn critical_damping_moments_agree() {
    let p = OscillatorParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
    let s = GaussianSeed::reference(&p, C64::new(0.2, 0.6)).unwrap();
    for kind in [StateKind::Tcs(3), StateKind::Cs(C64::new(-1.0, 0.4))] {
        let c = verify::crosscheck_moments(&p, &s, 3.0, kind).unwrap();
        assert!(c.max_rel_error < 1e-8, "{kind:?}: {c:?}");
    }
}
