//! Schmidt number of the polarization state as the frequency split moves away
//! from degeneracy, for two film thicknesses.

use std::f64::consts::{FRAC_PI_4, PI};

use thinfilm_spdc::greens::DetectionMedium;
use thinfilm_spdc::optics::LayerStack;
use thinfilm_spdc::pump::PumpSpec;
use thinfilm_spdc::spdc::{Biphoton, Chi2Tensor, JointSetting};
use thinfilm_spdc::tomography::{rho_from_biphoton, schmidt_number};

fn main() -> thinfilm_spdc::Result<()> {
    let lp = 500e-9;
    println!("{:>6} {:>12} {:>12}", "r", "K(0.01 lp)", "K(0.1 lp)");
    for step in 0..=14 {
        let ratio = 0.8 + 0.05 * step as f64;
        let mut ks = Vec::new();
        for a in [0.01 * lp, 0.1 * lp] {
            let setting = JointSetting::with_ratio(
                PumpSpec::new(lp, 6.6e5)?,
                LayerStack::gaas_on_silica(a),
                Chi2Tensor::zinc_blende(1.0),
                ratio,
                DetectionMedium::Medium1,
                (FRAC_PI_4, 0.0),
                (FRAC_PI_4, PI),
            )?;
            let rho = rho_from_biphoton(&Biphoton::evaluate(&setting)?)?;
            ks.push(schmidt_number(&rho)?);
        }
        println!("{ratio:>6.2} {:>12.4} {:>12.4}", ks[0], ks[1]);
    }
    Ok(())
}
