//! The greedy recursion realized as a product of CNOT-type unitaries on the
//! signal mode and an ancilla register with orthonormal tags.

use alpha_coherence::fock::{squeezed_vacuum, Truncation};
use alpha_coherence::gram_schmidt::{build_cnot_unitary, greedy_decompose, gs_unitary_simulate, max_abs};
use alpha_coherence::husimi::SearchConfig;
use alpha_coherence::Result;
use nalgebra::DMatrix;

fn main() -> Result<()> {
    let state = squeezed_vacuum(0.5, 0.0, &Truncation::new(40))?;
    let d = greedy_decompose(&state, 6, 1e-12, 1, &SearchConfig::default())?;
    let canon = &d[0];
    let labels = canon.labels();
    let joint = gs_unitary_simulate(&state, &labels)?;

    println!("sector  greedy |c|^2       unitary weight");
    for (i, t) in canon.terms.iter().enumerate() {
        println!("{:>6}  {:.15}  {:.15}", i + 1, t.coeff.norm_sqr(), joint.sector_weight(i + 1));
    }
    println!("{:>6}  {:.15}  {:.15}", "rest", canon.residual_norm_sq, joint.sector_weight(0));

    let u = build_cnot_unitary(labels[0], 1, state.n_max(), labels.len())?.to_matrix();
    let dim = u.nrows();
    println!("dim U = {dim}, max |U^dag U - 1| = {:.3e}", max_abs(&(u.adjoint() * &u - DMatrix::identity(dim, dim))));
    println!("max |U - U^dag| = {:.3e}", max_abs(&(&u - u.adjoint())));
    Ok(())
}
