//! Truncated-Fock construction of the basic state families, their overlaps,
//! and the Husimi function that drives the greedy search.

use alpha_coherence::fock::{
    apply_displacement, cat_state, coherent_vector, fidelity, fock_state, mean_photon, squeezed_vacuum, CoherentLabel,
    Parity, Truncation,
};
use alpha_coherence::husimi::{husimi, maximize_overlap, SearchConfig};
use alpha_coherence::Result;

fn main() -> Result<()> {
    let t = Truncation::new(60);
    let a = CoherentLabel::new(1.2, 0.4)?;
    let b = CoherentLabel::new(-0.3, 0.9)?;
    let va = coherent_vector(a, &t)?;
    let vb = coherent_vector(b, &t)?;
    let gauss = (-(a.value() - b.value()).norm_sqr()).exp();
    println!("|<a|b>|^2 = {:.12}  (exp(-|a-b|^2) = {gauss:.12})", fidelity(&va, &vb)?);

    for (name, s) in [
        ("even cat 2", cat_state(CoherentLabel::from(2.0), Parity::Even, &t)?),
        ("odd cat 2", cat_state(CoherentLabel::from(2.0), Parity::Odd, &t)?),
        ("fock 3", fock_state(3, 60)?),
        ("squeezed 0.8", squeezed_vacuum(0.8, 0.0, &t)?),
    ] {
        let m = maximize_overlap(&s, &SearchConfig::default())?;
        println!(
            "{name:>13}: <n> = {:.6}, max |<alpha|psi>|^2 = {:.6} at {} point(s), {:?}",
            mean_photon(&s),
            m.value,
            m.maximizers.len(),
            m.degeneracy
        );
    }

    // displacing the vacuum gives the coherent state
    let moved = apply_displacement(&fock_state(0, 60)?, a, &t)?;
    println!("F(D(a)|0>, |a>) = {:.12}", fidelity(&moved, &va)?);
    println!("Q_|a>(a) = {:.12}", husimi(&va, a));
    Ok(())
}
