//! Mixing a nonclassical P density with a classical ancilla on a beam
//! splitter never increases its negativity.

use alpha_coherence::pdist::{mix, negativity, transform_beamsplitter, transform_displace, transform_phase, PDensity};
use alpha_coherence::Result;
use num_complex::Complex64 as C64;

fn main() -> Result<()> {
    let p = PDensity::photon_added_thermal(0.5)?;
    let base = negativity(&p)?.value;
    println!("input negativity {base:.6}");
    for anc in [PDensity::vacuum(), PDensity::thermal(0.2)?, PDensity::thermal(1.0)?] {
        print!("ancilla {:<28}", alpha_coherence::pdist::describe(&anc));
        for k in 1..=9 {
            let out = transform_beamsplitter(&p, &anc, k as f64 / 10.0)?;
            print!(" {:.4}", negativity(&out)?.value);
        }
        println!();
    }

    let moved = transform_phase(&transform_displace(&p, C64::new(0.4, -0.7))?, 1.0)?;
    println!("after displacement and rotation: {:.6}", negativity(&moved)?.value);

    let q = PDensity::thermal(0.3)?;
    for r in [0.25, 0.5, 0.75] {
        println!("mix r = {r}: {:.6} <= {:.6}", negativity(&mix(&p, &q, r)?)?.value, r * base);
    }
    Ok(())
}
