//! Sixteen-setting polarization tomography of degenerate pairs from a 5 nm
//! film. Reconstructs the density matrix and compares it with the singlet.

use std::f64::consts::{FRAC_PI_4, PI};

use thinfilm_spdc::greens::DetectionMedium;
use thinfilm_spdc::optics::LayerStack;
use thinfilm_spdc::pump::PumpSpec;
use thinfilm_spdc::spdc::{Chi2Tensor, JointSetting};
use thinfilm_spdc::tomography::{
    fidelity, reconstruct_rho, schmidt_number, singlet, tomography_record, DensityMatrix4,
};

fn main() -> thinfilm_spdc::Result<()> {
    let lp = 500e-9;
    let setting = JointSetting::with_ratio(
        PumpSpec::new(lp, 6.6e5)?,
        LayerStack::gaas_on_silica(0.01 * lp),
        Chi2Tensor::zinc_blende(1.0),
        1.0,
        DetectionMedium::Medium1,
        (FRAC_PI_4, 0.0),
        (FRAC_PI_4, PI),
    )?;
    let record = tomography_record(&setting)?;
    let top = record.entries.iter().map(|e| e.2).fold(0.0, f64::max);
    for (s, i, rate) in &record.entries {
        println!("{}{}  {:.4}", s.label(), i.label(), rate / top);
    }

    let rho = reconstruct_rho(&record)?;
    println!("\nRe(rho):");
    for r in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:+.3}", rho.0[(r, c)].re)).collect();
        println!("  {}", row.join(" "));
    }
    let f = fidelity(&rho, &DensityMatrix4::pure(singlet())?);
    println!("fidelity with (HV - VH)/sqrt2: {f:.6}");
    println!("Schmidt number: {:.6}", schmidt_number(&rho)?);
    Ok(())
}
