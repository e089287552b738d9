//! Finite mixtures of coherent states: an explicit extension certifies zero
//! coherence, while the Gram-Schmidt map of the trivial extension only gives
//! an upper bound.

use alpha_coherence::fock::{coherent_vector, CoherentLabel, FockDensity, Truncation};
use alpha_coherence::gram_schmidt::{classical_certificate, gs_map_density};
use alpha_coherence::husimi::SearchConfig;
use alpha_coherence::measures::Measure;
use alpha_coherence::Result;

fn main() -> Result<()> {
    let n_max = 30;
    let mixture = [
        (0.5, CoherentLabel::new(1.0, 0.0)?),
        (0.3, CoherentLabel::new(-0.5, 0.8)?),
        (0.2, CoherentLabel::new(0.2, -1.1)?),
    ];
    let cert = classical_certificate(&mixture, n_max)?;
    println!("certificate: C_rel = {}, max off-diagonal {:.1e}", cert.value, cert.max_off_diagonal);

    let t = Truncation::new(n_max);
    let comps: Vec<_> = mixture.iter().map(|&(w, l)| Ok((w, coherent_vector(l, &t)?))).collect::<Result<_>>()?;
    let rho = FockDensity::mixture(&comps)?;
    for n in [2, 4, 8] {
        let m = gs_map_density(&rho, n, &SearchConfig::default())?;
        println!(
            "Gram-Schmidt map, N = {n}: C_rel = {:.6}, l1 = {:.6}, upper bound: {}",
            m.coherence(Measure::RelEntropy)?,
            m.coherence(Measure::L1)?,
            m.upper_bound
        );
    }
    Ok(())
}
