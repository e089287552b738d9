//! Matching-pursuit decomposition over coherent states, including the
//! branching that happens when the best overlap is degenerate.

use alpha_coherence::fock::{cat_state, fock_state, CoherentLabel, Parity, Truncation};
use alpha_coherence::gram_schmidt::{greedy_decompose, gs_project};
use alpha_coherence::husimi::SearchConfig;
use alpha_coherence::measures::Measure;
use alpha_coherence::Result;

fn main() -> Result<()> {
    let t = Truncation::new(60);
    let search = SearchConfig::default();

    let cat = cat_state(CoherentLabel::from(1.5), Parity::Even, &t)?;
    let d = greedy_decompose(&cat, 6, 1e-12, 8, &search)?;
    println!("even cat 1.5: {} branch(es)", d.len());
    let canon = &d[0];
    for (i, term) in canon.terms.iter().enumerate() {
        let a = term.label.value();
        println!(
            "  term {i}: alpha = ({:+.5}, {:+.5}), |c|^2 = {:.6}, residual after = {:.3e}",
            a.re,
            a.im,
            term.coeff.norm_sqr(),
            canon.residual_history[i]
        );
    }
    let p = gs_project(canon)?;
    println!("  C_rel at 6 terms = {:.6}", Measure::RelEntropy.of_probabilities(&p));

    // Fock states are rotation invariant: the first maximizer is a whole circle
    let two = fock_state(2, 60)?;
    let d = greedy_decompose(&two, 4, 1e-12, 8, &search)?;
    println!("fock 2: {} branches after 4 terms", d.len());
    for b in &d {
        let v = Measure::RelEntropy.of_probabilities(&gs_project(b)?);
        println!("  branch {:>6}: C_rel = {v:.6}", b.branch_id.to_string());
    }
    Ok(())
}
