//! Rate versus slab thickness at 45 degrees: the oscillation period
//! extracted from the scan next to the optical-path-difference estimate.

use std::f64::consts::FRAC_PI_4;

use thinfilm_spdc::analysis::{opd_period, thickness_scan, Axis, AxisKind, ScanSummary};
use thinfilm_spdc::greens::DetectionMedium;
use thinfilm_spdc::optics::LayerStack;
use thinfilm_spdc::pump::PumpSpec;
use thinfilm_spdc::spdc::{Chi2Tensor, JointSetting};

fn main() -> thinfilm_spdc::Result<()> {
    let lp = 500e-9;
    let base = JointSetting::with_ratio(
        PumpSpec::new(lp, 6.6e5)?,
        LayerStack::gaas_on_silica(lp),
        Chi2Tensor::zinc_blende(1.0),
        1.0,
        DetectionMedium::Medium1,
        (FRAC_PI_4, 0.0),
        (FRAC_PI_4, std::f64::consts::PI),
    )?;
    let axis = Axis::new("a", AxisKind::Length, 0.05 * lp, 5.0 * lp, 400)?;
    let grid = thickness_scan(&base, axis.clone(), FRAC_PI_4, 0.0)?;
    let x: Vec<f64> = axis.values().iter().map(|a| a / lp).collect();
    let summary = ScanSummary::of(&x, &grid.values, 1.0);

    for (a, r) in x.iter().zip(&grid.values).step_by(25) {
        println!("a = {a:5.2} lp   rate = {r:.4e}");
    }
    println!("oscillation period: {:?} lp", summary.oscillation_period);
    println!("path-difference period: {:.4} lp", opd_period(&base.stack, FRAC_PI_4, 2.0 * lp)? / lp);
    Ok(())
}
