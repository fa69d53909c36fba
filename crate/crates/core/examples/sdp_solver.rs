//! The interior-point solver on a small Hermitian program:
//! `min Tr[HX]  s.t.  Tr X = 1, X ⪰ 0`, whose optimum is `λ_min(H)`.

use ebit::linalg::min_eigenvalue;
use ebit::sdp::{check_solution, read_dump, solve, write_dump, HermitianSdpBuilder, Sense};
use ebit::states::random_density;
use ebit::HermitianOperator;

fn main() -> ebit::Result<()> {
    let a = random_density(2, 2, 4, 5)?;
    let b = random_density(2, 2, 1, 6)?;
    let h = a.sub(&b)?.without_bipartite();

    let mut builder = HermitianSdpBuilder::new(Sense::Minimize);
    let x = builder.hermitian(h.dim());
    builder.objective_trace(x, &h, 1.0)?;
    builder.scalar_constraint(&[(x, &HermitianOperator::identity(h.dim()), 1.0)], &[], 1.0)?;
    let problem = builder.build()?;

    let sol = solve(&problem, 1e-10)?;
    println!("status {} after {} iterations", sol.status, sol.iterations);
    println!("primal {:.12}  dual {:.12}  lambda_min {:.12}", sol.primal_obj, sol.dual_obj, min_eigenvalue(&h)?);

    let cert = check_solution(&problem, &sol);
    println!(
        "certificate: gap {:.2e}, residuals {:.2e} / {:.2e}, min eig X {:.2e}, S {:.2e}, passes {}",
        cert.gap,
        cert.primal_residual,
        cert.dual_residual,
        cert.min_eig_x,
        cert.min_eig_s,
        cert.passes(1e-8)
    );

    let x_val = builder.hermitian_value(&sol, x)?;
    println!("optimizer trace {:.12}, rank-one weight {:.12}", x_val.trace(), x_val.eig()?.max_eigenvalue());

    let text = write_dump(&problem);
    let back = read_dump(&text)?;
    println!("dump: {} lines, round trip identical: {}", text.lines().count(), write_dump(&back) == text);
    Ok(())
}
