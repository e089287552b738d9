//! Negativity of regular P densities on the quadrature lattice, checked
//! against the closed form for the photon-added thermal state.

use alpha_coherence::pdist::{negativity, negativity_on, photon_added_thermal_negativity, PDensity};
use alpha_coherence::Result;
use num_complex::Complex64 as C64;

fn main() -> Result<()> {
    println!("thermal(1): {}", negativity(&PDensity::thermal(1.0)?)?.value);
    println!("displaced thermal(0.5, 1+i): {}", negativity(&PDensity::displaced_thermal(0.5, C64::new(1.0, 1.0))?)?.value);

    println!("n_bar  grid        h/2         closed form  area");
    for n_bar in [0.2, 0.5, 1.0, 2.0] {
        let p = PDensity::photon_added_thermal(n_bar)?;
        let r = negativity(&p)?;
        let fine = negativity_on(&p, &p.window().refined())?;
        println!(
            "{n_bar:<6} {:<11.7} {:<11.7} {:<12.7} {:.4}",
            r.value,
            fine.value,
            photon_added_thermal_negativity(n_bar),
            r.negative_region_area
        );
    }
    Ok(())
}
