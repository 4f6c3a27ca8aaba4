use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use proptest::prelude::*;

use thinfilm_spdc::greens::DetectionMedium;
use thinfilm_spdc::optics::LayerStack;
use thinfilm_spdc::pump::PumpSpec;
use thinfilm_spdc::series::{slab_integral, SMALL_KAPPA};
use thinfilm_spdc::spdc::{Biphoton, Chi2Tensor, JointSetting};
use thinfilm_spdc::tomography::{rho_from_biphoton, schmidt_number, DensityMatrix4};

const LP: f64 = 500e-9;

fn setting(a_lp: f64, ratio: f64, signal: (f64, f64), idler: (f64, f64), medium: DetectionMedium) -> JointSetting {
    JointSetting::with_ratio(
        PumpSpec::new(LP, 6.6e5).unwrap(),
        LayerStack::gaas_on_silica(a_lp * LP),
        Chi2Tensor::zinc_blende(1.0),
        ratio,
        medium,
        signal,
        idler,
    )
    .unwrap()
}

fn rate(s: &JointSetting) -> f64 {
    Biphoton::evaluate(s).unwrap().unpolarized_rate()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

fn unitary(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Matrix2<Complex64> {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (c, s) = (gamma.cos(), gamma.sin());
    Matrix2::new(e(alpha) * c, -e(alpha + delta) * s, e(beta) * s, e(beta + delta) * c)
}

fn medium() -> impl Strategy<Value = DetectionMedium> {
    prop_oneof![Just(DetectionMedium::Medium1), Just(DetectionMedium::Medium3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn degenerate_rate_is_symmetric_under_photon_exchange(
        ts in 0.0..1.5f64, ps in 0.0..(2.0 * PI),
        dt in -0.2..0.2f64, dp in -0.3..0.3f64,
        a in 0.005..2.0f64, m in medium(),
    ) {
        let ti = (ts + dt).clamp(0.0, 1.5);
        let pi_ = ps + PI + dp;
        let forward = rate(&setting(a, 1.0, (ts, ps), (ti, pi_), m));
        let swapped = rate(&setting(a, 1.0, (ti, pi_), (ts, ps), m));
        prop_assert!(close(forward, swapped, 1e-10), "{forward} vs {swapped}");
    }

    #[test]
    fn rates_are_finite_and_nonnegative(
        ts in 0.0..1.55f64, ps in 0.0..(2.0 * PI),
        ti in 0.0..1.55f64, pi_ in 0.0..(2.0 * PI),
        ratio in 0.5..2.0f64, a in 0.005..3.0f64, m in medium(),
    ) {
        let b = Biphoton::evaluate(&setting(a, ratio, (ts, ps), (ti, pi_), m)).unwrap();
        let r = b.unpolarized_rate();
        prop_assert!(r.is_finite() && r >= 0.0);
        prop_assert!(b.polarized_rate() >= 0.0);
    }

    #[test]
    fn schmidt_number_lies_between_one_and_two(
        ts in 0.05..1.4f64, dt in -0.1..0.1f64, ratio in 0.7..1.6f64, a in 0.005..2.0f64,
    ) {
        let s = setting(a, ratio, (ts, 0.0), ((ts + dt).clamp(0.0, 1.5), PI), DetectionMedium::Medium1);
        if let Ok(rho) = rho_from_biphoton(&Biphoton::evaluate(&s).unwrap()) {
            let k = schmidt_number(&rho).unwrap();
            prop_assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&k), "K = {k}");
        }
    }

    #[test]
    fn schmidt_number_is_invariant_under_local_unitaries(
        ts in 0.1..1.4f64, ratio in 0.8..1.5f64,
        u in prop::array::uniform4(0.0..(2.0 * PI)),
        v in prop::array::uniform4(0.0..(2.0 * PI)),
    ) {
        let s = setting(0.1, ratio, (ts, 0.0), (ts, PI), DetectionMedium::Medium1);
        let rho = rho_from_biphoton(&Biphoton::evaluate(&s).unwrap()).unwrap();
        let w: Matrix4<Complex64> = unitary(u[0], u[1], u[2], u[3]).kronecker(&unitary(v[0], v[1], v[2], v[3]));
        let rotated = DensityMatrix4::new(w * rho.0 * w.adjoint()).unwrap();
        let (k0, k1) = (schmidt_number(&rho).unwrap(), schmidt_number(&rotated).unwrap());
        prop_assert!((k0 - k1).abs() < 1e-10, "{k0} vs {k1}");
    }

    #[test]
    fn rate_scales_quadratically_with_coupling_and_pump(
        ts in 0.05..1.4f64, ps in 0.0..(2.0 * PI), chi in 0.1..10.0f64, amp in 0.1..10.0f64,
    ) {
        let base = setting(0.05, 1.0, (ts, ps), (ts, ps + PI), DetectionMedium::Medium1);
        let mut scaled = base;
        scaled.chi2 = Chi2Tensor::zinc_blende(chi);
        scaled.pump.amplitude = amp;
        let (r0, r1) = (rate(&base), rate(&scaled));
        prop_assert!(close(r1, r0 * (chi * amp).powi(2), 1e-10));
    }

    #[test]
    fn phi_symmetric_rate_has_mirror_symmetries(
        t in 0.05..1.45f64, phi in 0.0..FRAC_PI_2, a in 0.005..1.0f64,
    ) {
        let r = |p: f64| rate(&setting(a, 1.0, (t, p), (t, p + PI), DetectionMedium::Medium1));
        let base = r(phi);
        prop_assert!(close(base, r(-phi), 1e-9));
        prop_assert!(close(base, r(PI - phi), 1e-9));
    }

    #[test]
    fn depth_integral_is_continuous_at_series_switch(
        a in 1e-9..1e-5f64, arg in 0.0..(2.0 * PI), eps in -1e-3..1e-3f64,
    ) {
        let kappa = |scale: f64| Complex64::from_polar(SMALL_KAPPA * scale / a, arg);
        let below = slab_integral(kappa(1.0 - eps.abs() - 1e-9), a);
        let above = slab_integral(kappa(1.0 + eps.abs() + 1e-9), a);
        prop_assert!((below - above).norm() <= 1e-10 * a);
    }
}
