//! Families compared at equal mean photon number.

use alpha_coherence::alpha::{alpha_coherence, ConvergenceSchedule, Family};
use alpha_coherence::fock::{mean_photon, Truncation};
use alpha_coherence::husimi::SearchConfig;
use alpha_coherence::measures::Measure;
use alpha_coherence::Result;

fn main() -> Result<()> {
    // the squeezed state at <n> = 3 needs the larger cutoff
    let t = Truncation::new(100);
    let (sched, search) = (ConvergenceSchedule::default(), SearchConfig::default());
    println!("<n>  family     param    C_rel");
    for target in [1.0, 2.0, 3.0] {
        for f in [Family::Fock, Family::CatEven, Family::CatOdd, Family::Squeezed] {
            let p = f.match_mean_photon(target, 1e-3, &t)?;
            let s = f.state(p, &t)?;
            let r = alpha_coherence(&s, Measure::RelEntropy, &sched, &search)?;
            println!("{:<4} {:<10} {:<8.5} {:.5}  (<n> = {:.5})", target, f.name(), p, r.value, mean_photon(&s));
        }
    }
    Ok(())
}
