//! Randomized sweeps over the stated invariants of each module.

use ebit::channels::{random_channel, twirl, KrausChannel};
use ebit::hyptest::{dh_neyman_pearson, dh_sdp};
use ebit::linalg::{hermitian_eig, partial_transpose_b, tensor_product, trace_norm};
use ebit::metrics::{fidelity, sine_distance, trace_distance};
use ebit::rains::{ppt_prime_membership, MEMBERSHIP_TOL};
use ebit::rng::SeededRng;
use ebit::sdp::{check_solution, complex_embed, complex_extract, solve, HermitianSdpBuilder, Sense};
use ebit::states::{
    antisym_projector, isotropic_operator, max_entangled, random_density_with, swap_operator, sym_projector, IsotropicCoordinates,
};
use ebit::{ComplexMatrix, HermitianOperator};

fn random_hermitian(n: usize, dims: (usize, usize), rng: &mut SeededRng) -> HermitianOperator {
    let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
    let h = &g + &g.adjoint();
    HermitianOperator::bipartite(h.scale_real(0.5), dims.0, dims.1).unwrap()
}

fn random_state(rng: &mut SeededRng, da: usize, db: usize) -> HermitianOperator {
    let rank = 1 + rng.below(da * db);
    random_density_with(da, db, rank, rng).unwrap().into_operator()
}

#[test]
fn partial_transpose_is_an_involution() {
    let mut rng = SeededRng::new(11, 0);
    for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for _ in 0..10 {
            let x = random_hermitian(da * db, (da, db), &mut rng);
            let back = partial_transpose_b(&partial_transpose_b(&x).unwrap()).unwrap();
            assert_eq!(back.matrix().max_abs_diff(x.matrix()), 0.0);
        }
    }
}

#[test]
fn trace_norm_dominates_trace() {
    let mut rng = SeededRng::new(12, 0);
    for _ in 0..50 {
        let a = random_state(&mut rng, 2, 2);
        let b = random_state(&mut rng, 2, 2);
        let c = rng.uniform();
        let signed = a.combine(1.0, &b, -c).unwrap();
        assert!(trace_norm(&signed).unwrap() >= signed.trace().abs() - 1e-12);
        let psd = a.combine(1.0, &b, c).unwrap();
        assert!((trace_norm(&psd).unwrap() - psd.trace()).abs() < 1e-12);
        let nsd = psd.scale(-1.0);
        assert!((trace_norm(&nsd).unwrap() + nsd.trace()).abs() < 1e-12);
    }
}

#[test]
fn eigendecomposition_reconstructs() {
    let mut rng = SeededRng::new(13, 0);
    for k in 0..100 {
        let n = 1 + k % 36;
        let x = random_hermitian(n, (n, 1), &mut rng);
        let e = hermitian_eig(&x).unwrap();
        let v = &e.eigenvectors;
        let scale = x.matrix().frobenius_norm().max(1.0);
        assert!(e.reconstruct().max_abs_diff(x.matrix()) <= 1e-10 * scale, "n = {n}");
        let gram = v.adjoint().matmul(v).unwrap();
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10, "n = {n}");
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn tensor_product_multiplies_traces() {
    let mut rng = SeededRng::new(14, 0);
    for _ in 0..20 {
        let a = random_hermitian(3, (3, 1), &mut rng);
        let b = random_hermitian(4, (2, 2), &mut rng);
        let t = tensor_product(&a, &b).unwrap();
        assert!((t.trace() - a.trace() * b.trace()).abs() < 1e-10);
    }
}

#[test]
fn swap_and_projector_identities() {
    for d in 2..5 {
        let (s, a, f) = (sym_projector(d).unwrap(), antisym_projector(d).unwrap(), swap_operator(d).unwrap());
        assert!(s.sub(&a).unwrap().matrix().max_abs_diff(f.matrix()) < 1e-15);
        let id = HermitianOperator::bipartite_identity(d, d);
        assert!(s.add(&a).unwrap().matrix().max_abs_diff(id.matrix()) < 1e-15);
        let phi = max_entangled(d).unwrap();
        // T_B(Φ) = F/d
        let pt = partial_transpose_b(&phi).unwrap();
        assert!(pt.matrix().max_abs_diff(f.scale(1.0 / d as f64).matrix()) < 1e-15);
        assert!(twirl(&phi).unwrap().matrix().max_abs_diff(phi.matrix()) < 1e-15);
        let iso = isotropic_operator(&IsotropicCoordinates::new(d, 0.3, 0.6).unwrap()).unwrap();
        let ab = iso.matrix().matmul(phi.matrix()).unwrap();
        let ba = phi.matrix().matmul(iso.matrix()).unwrap();
        assert!(ab.max_abs_diff(&ba) < 1e-15);
    }
}

#[test]
fn fuchs_van_de_graaf_on_500_pairs() {
    let mut rng = SeededRng::new(15, 0);
    for k in 0..500 {
        let (da, db) = [(2, 2), (2, 3), (3, 3)][k % 3];
        let a = random_state(&mut rng, da, db);
        let b = random_state(&mut rng, da, db);
        let f = fidelity(&a, &b).unwrap();
        let t = trace_distance(&a, &b).unwrap();
        assert!(1.0 - f.sqrt() <= t + 1e-9, "pair {k}: F = {f}, T = {t}");
        assert!(t <= (1.0 - f).sqrt() + 1e-9, "pair {k}: F = {f}, T = {t}");
        assert!((f - fidelity(&b, &a).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn sine_distance_triangle_on_1000_triples() {
    let mut rng = SeededRng::new(16, 0);
    for _ in 0..1000 {
        let (a, b, c) = (random_state(&mut rng, 2, 2), random_state(&mut rng, 2, 2), random_state(&mut rng, 2, 2));
        let slack = sine_distance(&a, &b).unwrap() + sine_distance(&b, &c).unwrap() - sine_distance(&a, &c).unwrap();
        assert!(slack >= -1e-10);
    }
}

fn channel_for(rng: &mut SeededRng, d_in: usize) -> KrausChannel {
    let d_out = 2 + rng.below(3);
    let n_kraus = d_in.div_ceil(d_out) + rng.below(3);
    random_channel(d_in, d_out, n_kraus, rng).unwrap()
}

#[test]
fn data_processing_on_200_channels() {
    let mut rng = SeededRng::new(17, 0);
    for k in 0..200 {
        let a = random_state(&mut rng, 2, 2);
        let b = random_state(&mut rng, 2, 2);
        let ch = channel_for(&mut rng, 4);
        let (na, nb) = (ch.apply(&a).unwrap(), ch.apply(&b).unwrap());
        assert!((na.trace() - 1.0).abs() < 1e-10);
        assert!(sine_distance(&a, &b).unwrap() >= sine_distance(&na, &nb).unwrap() - 1e-8, "channel {k}");
        let eps = [0.1, 0.5][k % 2];
        let before = dh_neyman_pearson(&a, &b, eps).unwrap().value_bits;
        let after = dh_neyman_pearson(&na, &nb, eps).unwrap().value_bits;
        assert!(before >= after - 1e-8, "channel {k}: {before} < {after}");
    }
}

#[test]
fn twirl_keeps_ppt_prime_members_inside() {
    let mut rng = SeededRng::new(18, 0);
    let mut members = 0;
    while members < 200 {
        let d = 2 + rng.below(2);
        let x = random_state(&mut rng, d, d);
        // scale into PPT′
        let norm = trace_norm(&partial_transpose_b(&x).unwrap()).unwrap();
        let sigma = x.scale(rng.uniform() / norm);
        assert!(ppt_prime_membership(&sigma).unwrap().is_member());
        let t = ppt_prime_membership(&twirl(&sigma).unwrap()).unwrap();
        assert!(t.is_member(), "pt norm {}", t.pt_trace_norm);
        assert!(t.pt_trace_norm <= 1.0 + MEMBERSHIP_TOL);
        members += 1;
    }
}

#[test]
fn dh_is_monotone_in_eps_and_shifts_under_scaling() {
    let mut rng = SeededRng::new(19, 0);
    for _ in 0..30 {
        let a = random_state(&mut rng, 2, 2);
        let b = random_state(&mut rng, 2, 2);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=20 {
            let eps = k as f64 / 20.0;
            let v = dh_neyman_pearson(&a, &b, eps).unwrap().value_bits;
            assert!(v >= prev - 1e-9);
            prev = v;
        }
        let c = 0.1 + 3.0 * rng.uniform();
        let v = dh_neyman_pearson(&a, &b, 0.3).unwrap().value_bits;
        let scaled = dh_neyman_pearson(&a, &b.scale(c), 0.3).unwrap().value_bits;
        if v.is_infinite() {
            assert!(scaled.is_infinite());
        } else {
            assert!((scaled - (v - c.log2())).abs() < 1e-9, "c = {c}: {scaled} vs {}", v - c.log2());
        }
    }
}

#[test]
fn optimal_test_is_feasible_and_reproduces_the_value() {
    let mut rng = SeededRng::new(20, 0);
    for k in 0..50 {
        let a = random_state(&mut rng, 2, 3);
        let b = random_state(&mut rng, 2, 3);
        let eps = [0.05, 0.3, 0.8][k % 3];
        let r = dh_neyman_pearson(&a, &b, eps).unwrap();
        let e = r.optimal_test.eig().unwrap();
        assert!(e.min_eigenvalue() >= -1e-12 && e.max_eigenvalue() <= 1.0 + 1e-12);
        assert!((r.optimal_test.inner(&a) - (1.0 - eps)).abs() < 1e-9);
        if r.value_bits.is_finite() {
            assert!((-r.optimal_test.inner(&b).log2() - r.value_bits).abs() < 1e-9);
        }
    }
}

#[test]
fn dh_sdp_matches_neyman_pearson_on_50_pairs() {
    let mut rng = SeededRng::new(21, 0);
    for k in 0..50 {
        let (da, db) = [(2, 2), (2, 3), (3, 3), (2, 4)][k % 4];
        let n = da * db;
        let a = random_density_with(da, db, n, &mut rng).unwrap();
        let b = random_density_with(da, db, n, &mut rng).unwrap();
        let eps = [0.1, 0.5][k % 2];
        let np = dh_neyman_pearson(&a, &b, eps).unwrap().value_bits;
        let sdp = dh_sdp(&a, &b, eps, 1e-10).unwrap();
        assert!((np - sdp.value_bits).abs() < 1e-6, "pair {k}: {np} vs {}", sdp.value_bits);
        // bits are -log2 of a minimum, so the dual bound sits above in bits
        assert!(sdp.dual_value_bits >= sdp.value_bits - 1e-8);
    }
}

#[test]
fn solved_programs_pass_independent_certificates() {
    let mut rng = SeededRng::new(22, 0);
    for _ in 0..20 {
        let n = 2 + rng.below(5);
        let h = random_hermitian(n, (n, 1), &mut rng);
        let mut b = HermitianSdpBuilder::new(Sense::Minimize);
        let x = b.hermitian(n);
        b.objective_trace(x, &h, 1.0).unwrap();
        b.scalar_constraint(&[(x, &HermitianOperator::identity(n), 1.0)], &[], 1.0).unwrap();
        let p = b.build().unwrap();
        let sol = solve(&p, 1e-10).unwrap().require_optimal().unwrap();
        let cert = check_solution(&p, &sol);
        assert!(cert.passes(1e-8), "{cert:?}");
        assert!(sol.primal_obj >= sol.dual_obj - 1e-10);
        assert!((sol.primal_obj - h.eig().unwrap().min_eigenvalue()).abs() < 1e-8);
    }
}

#[test]
fn embedding_round_trip() {
    let mut rng = SeededRng::new(23, 0);
    for n in 1..8 {
        let h = random_hermitian(n, (n, 1), &mut rng);
        let e = complex_embed(&h);
        let back = complex_extract(&e).unwrap();
        assert!(back.matrix().max_abs_diff(h.matrix()) < 1e-15);
        assert_eq!(complex_embed(&back), e);
    }
}

#[test]
fn trace_norm_split_matches_eigenvalue_sum() {
    // ‖H‖₁ = min Tr[P + Q] over H = P − Q, P, Q ⪰ 0
    let mut rng = SeededRng::new(24, 0);
    for _ in 0..10 {
        let n = 2 + rng.below(4);
        let h = random_hermitian(n, (n, 1), &mut rng);
        let mut b = HermitianSdpBuilder::new(Sense::Minimize);
        let p = b.hermitian(n);
        let q = b.hermitian(n);
        let id = HermitianOperator::identity(n);
        b.objective_trace(p, &id, 1.0).unwrap();
        b.objective_trace(q, &id, 1.0).unwrap();
        b.matrix_equality(
            &[
                ebit::sdp::MatrixTerm::Var { var: p, coeff: 1.0, transpose_b: false },
                ebit::sdp::MatrixTerm::Var { var: q, coeff: -1.0, transpose_b: false },
            ],
            &h,
        )
        .unwrap();
        let sol = solve(&b.build().unwrap(), 1e-10).unwrap().require_optimal().unwrap();
        assert!((sol.primal_obj - trace_norm(&h).unwrap()).abs() < 1e-7);
    }
}

#[test]
fn channels_preserve_trace() {
    let mut rng = SeededRng::new(25, 0);
    for _ in 0..50 {
        let ch = channel_for(&mut rng, 6);
        assert!(ch.trace_preservation_defect() < 1e-10);
        let rho = random_state(&mut rng, 2, 3);
        assert!((ch.apply(&rho).unwrap().trace() - 1.0).abs() < 1e-10);
    }
}
