//! Dense primal–dual interior-point solver for small block-diagonal SDPs,
//! with a complex Hermitian front end.

pub mod certificate;
pub mod dump;
pub mod hermitian;
pub mod problem;
pub mod solver;

pub use certificate::{check_solution, Certificate};
pub use dump::{read_dump, write_dump};
pub use hermitian::{complex_embed, complex_extract, HermitianSdpBuilder, HermitianVar, MatrixTerm, ScalarVar};
pub use problem::{Constraint, SdpProblem, Sense, SparseSymMatrix, SymEntry};
pub use solver::{solve, solve_with, SdpSolution, SdpStatus, SolverOptions, DEFAULT_TOL, MAX_ITERATIONS};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, HermitianOperator};
    use crate::rng::SeededRng;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn scalar_entry(block: usize, v: f64) -> SparseSymMatrix {
        let mut m = SparseSymMatrix::new();
        m.push(block, 0, 0, v);
        m
    }

    #[test]
    fn one_by_one() {
        let p =
            SdpProblem::new(vec![1], scalar_entry(0, 1.0), vec![Constraint { a: scalar_entry(0, 1.0), b: 1.0 }], Sense::Minimize)
                .unwrap();
        let sol = solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_obj - 1.0).abs() < 1e-8);
        assert!(check_solution(&p, &sol).passes(1e-8));
    }

    #[test]
    fn detects_infeasibility() {
        let p = SdpProblem::new(
            vec![1],
            scalar_entry(0, 1.0),
            vec![Constraint { a: scalar_entry(0, 1.0), b: -1.0 }],
            Sense::Minimize,
        )
        .unwrap();
        let sol = solve(&p, 1e-8).unwrap();
        assert_ne!(sol.status, SdpStatus::Optimal);
        assert!(sol.require_optimal().is_err());
    }

    /// Fractional knapsack: min q·λ s.t. p·λ = target, 0 ≤ λ ≤ 1.
    fn knapsack(p: &[f64], q: &[f64], target: f64) -> f64 {
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.sort_by(|&a, &b| (p[b] * q[a]).partial_cmp(&(p[a] * q[b])).unwrap());
        let (mut need, mut cost) = (target, 0.0);
        for i in idx {
            if need <= 0.0 {
                break;
            }
            let take = (need / p[i]).min(1.0);
            cost += take * q[i];
            need -= take * p[i];
        }
        cost
    }

    #[test]
    fn diagonal_lp_matches_knapsack() {
        let mut rng = SeededRng::new(20, 0);
        for _ in 0..10 {
            let n = 4;
            let mut p: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.05).collect();
            let sp: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= sp);
            let q: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.05).collect();
            let eps = 0.3;
            // blocks: λ_i and w_i as 1x1 blocks, λ_i + w_i = 1
            let blocks = vec![1; 2 * n];
            let mut obj = SparseSymMatrix::new();
            let mut type1 = SparseSymMatrix::new();
            let mut cons = Vec::new();
            for i in 0..n {
                obj.push(i, 0, 0, q[i]);
                type1.push(i, 0, 0, p[i]);
                let mut a = SparseSymMatrix::new();
                a.push(i, 0, 0, 1.0);
                a.push(n + i, 0, 0, 1.0);
                cons.push(Constraint { a, b: 1.0 });
            }
            cons.push(Constraint { a: type1, b: 1.0 - eps });
            let prob = SdpProblem::new(blocks, obj, cons, Sense::Minimize).unwrap();
            let sol = solve(&prob, 1e-10).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!((sol.primal_obj - knapsack(&p, &q, 1.0 - eps)).abs() < 1e-8);
            assert!(sol.primal_obj >= sol.dual_obj - 1e-10);
        }
    }

    #[test]
    fn max_eigenvalue_program() {
        let mut rng = SeededRng::new(21, 0);
        for n in [2, 5, 8] {
            let r = DMatrix::from_fn(n, n, |_, _| rng.gaussian());
            let c = &r + r.transpose();
            let obj = SparseSymMatrix::from_dense_block(0, &c).unwrap();
            let trace = SparseSymMatrix::from_dense_block(0, &DMatrix::identity(n, n)).unwrap();
            let p = SdpProblem::new(vec![n], obj, vec![Constraint { a: trace, b: 1.0 }], Sense::Maximize).unwrap();
            let sol = solve(&p, 1e-9).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            let lmax = SymmetricEigen::new(c).eigenvalues.max();
            assert!((sol.primal_obj - lmax).abs() < 1e-8);
            let cert = check_solution(&p, &sol);
            assert!(cert.passes(1e-9), "{cert:?}");
            // maximization: dual is an upper bound
            assert!(sol.dual_obj >= sol.primal_obj - 1e-10);
        }
    }

    #[test]
    fn hermitian_min_eigenvalue_program() {
        let mut rng = SeededRng::new(22, 0);
        for n in [2, 3, 5] {
            let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
            let g = HermitianOperator::new(&g + &g.adjoint()).unwrap();
            let mut b = HermitianSdpBuilder::new(Sense::Minimize);
            let h = b.hermitian(n);
            b.objective_trace(h, &g, 1.0).unwrap();
            b.scalar_constraint(&[(h, &HermitianOperator::identity(n), 1.0)], &[], 1.0).unwrap();
            let p = b.build().unwrap();
            let sol = solve(&p, 1e-9).unwrap().require_optimal().unwrap();
            let lmin = g.eig().unwrap().min_eigenvalue();
            assert!((sol.primal_obj - lmin).abs() < 1e-8);
            let hv = b.hermitian_value(&sol, h).unwrap();
            assert!((hv.trace() - 1.0).abs() < 1e-8);
            assert!((g.inner(&hv) - lmin).abs() < 1e-7);
        }
    }

    #[test]
    fn matrix_equality_with_scalar_term() {
        // H = t·ρ with Tr H... : max t s.t. H + t·ρ = I, H ⪰ 0  →  t = 1/λmax(ρ)
        let rho = HermitianOperator::from_real_diagonal(&[0.5, 0.25, 0.25]);
        let mut b = HermitianSdpBuilder::new(Sense::Maximize);
        let h = b.hermitian(3);
        let t = b.scalar();
        b.objective_scalar(t, 1.0);
        b.matrix_equality(
            &[MatrixTerm::Var { var: h, coeff: 1.0, transpose_b: false }, MatrixTerm::Scaled { var: t, op: &rho }],
            &HermitianOperator::identity(3),
        )
        .unwrap();
        let p = b.build().unwrap();
        let sol = solve(&p, 1e-9).unwrap().require_optimal().unwrap();
        assert!((b.scalar_value(&sol, t) - 2.0).abs() < 1e-8);
        assert!(check_solution(&p, &sol).passes(1e-9));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let p = SdpProblem::new(vec![1], scalar_entry(0, 1.0), vec![], Sense::Minimize).unwrap();
        assert!(solve(&p, 0.0).is_err());
    }
}
