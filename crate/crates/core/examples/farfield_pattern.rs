//! Angular emission pattern of a 5 nm GaAs film with the idler detected
//! opposite the signal. Prints the polar peak for a few azimuths and the
//! suppression in the y-z plane.

use thinfilm_spdc::analysis::{phi_symmetric_scan, Axis};
use thinfilm_spdc::greens::DetectionMedium;
use thinfilm_spdc::optics::LayerStack;
use thinfilm_spdc::pump::PumpSpec;
use thinfilm_spdc::spdc::{Chi2Tensor, JointSetting};

fn main() -> thinfilm_spdc::Result<()> {
    let lp = 500e-9;
    let base = JointSetting::with_ratio(
        PumpSpec::new(lp, 6.6e5)?,
        LayerStack::gaas_on_silica(0.01 * lp),
        Chi2Tensor::zinc_blende(1.0),
        1.0,
        DetectionMedium::Medium1,
        (0.0, 0.0),
        (0.0, 0.0),
    )?;
    let theta = Axis::degrees("theta", 0.0, 89.0, 179)?;
    let phi = Axis::degrees("phi", 0.0, 90.0, 7)?;
    let grid = phi_symmetric_scan(&base, theta.clone(), phi.clone())?;
    let top = grid.max();

    println!("{:>8} {:>12} {:>14}", "phi/deg", "peak theta", "peak/global");
    for j in 0..phi.count {
        let col = grid.column(j);
        let (i, v) = col
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        println!(
            "{:>8.1} {:>12.1} {:>14.3e}",
            phi.value(j).to_degrees(),
            theta.value(i).to_degrees(),
            v / top
        );
    }
    Ok(())
}
