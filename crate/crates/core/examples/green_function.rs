//! Plane-wave Green's function of the slab: Fresnel coefficients, the
//! multiple-reflection series and its pointwise closed form.

use thinfilm_spdc::greens::{green, green_at, DetectionMedium};
use thinfilm_spdc::optics::{fresnel, omega_from_wavelength, LayerStack, Role, TransverseWaveVector};

fn main() -> thinfilm_spdc::Result<()> {
    let lambda = 1e-6;
    let omega = omega_from_wavelength(lambda);
    let layers = LayerStack::gaas_on_silica(0.3e-6).at(Role::Signal);
    let k1 = layers.medium(1).k(omega).re;
    let q = TransverseWaveVector::from_angles(k1, 30f64.to_radians(), 0.0);

    let f = fresnel(layers.medium(2), layers.medium(1), q, omega)?;
    println!("slab -> air: r_s = {:.4}, r_p = {:.4}, t_s = {:.4}, t_p = {:.4}", f.r_s, f.r_p, f.t_s, f.t_p);

    let series = green(q, omega, &layers, DetectionMedium::Medium1)?;
    println!("series terms: {}", series.len());
    for z in [-0.3e-6, -0.15e-6, 0.0] {
        let g = green_at(q, omega, &layers, DetectionMedium::Medium1, z)?;
        let s = series.eval(z);
        println!("z = {:5.2} um: g_xx = {:.4e}, g_zx = {:.4e}, series g_xx = {:.4e}", z * 1e6, g[0][0], g[2][0], s[0][0]);
    }
    Ok(())
}
