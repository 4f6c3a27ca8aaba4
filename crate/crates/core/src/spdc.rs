//! Two-photon amplitude and far-field coincidence rates.
//!
//! The amplitude tensor `J` couples the pump, the nonlinear susceptibility
//! and the two slab Green's functions, integrated over the slab depth. All
//! three factors are short exponential series in `z`, so the integral is a
//! finite sum of closed-form terms. Rates are per unit solid angle in
//! arbitrary units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{green, green_at, DetectionMedium};
use crate::linalg::{self, Mat3, Vec3, ZERO, ZERO_MAT};
use crate::optics::{kz, LayerStack, Layers, Role, TransverseWaveVector, SPEED_OF_LIGHT};
use crate::pump::{pump_field_at, pump_in_slab, pump_spectrum, PumpSpec};
use crate::series::slab_integral;

/// Second-order susceptibility `chi[alpha][beta][gamma]`, where `alpha` and
/// `beta` couple the signal and idler fields and `gamma` the pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi2Tensor {
    pub components: [[[f64; 3]; 3]; 3],
}

impl Chi2Tensor {
    pub fn zero() -> Self {
        Self {
            components: [[[0.0; 3]; 3]; 3],
        }
    }

    /// Cubic 43m crystal: `chi0` on the six permutations of `xyz`.
    pub fn zinc_blende(chi0: f64) -> Self {
        let mut c = Self::zero();
        for (a, b, g) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            c.components[a][b][g] = chi0;
        }
        c
    }

    /// `P[alpha][beta] = sum_gamma chi[alpha][beta][gamma] E[gamma]`.
    pub fn contract(&self, e: &Vec3) -> Mat3 {
        let mut p = ZERO_MAT;
        for (a, row) in p.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|g| self.components[a][b][g] * e[g]).sum();
            }
        }
        p
    }
}

/// Polarization states of a single photon in the `{H, V}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolState {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl PolState {
    pub const ALL: [PolState; 6] = [Self::H, Self::V, Self::D, Self::A, Self::R, Self::L];

    /// `(a_H, a_V)`.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            Self::H => [c(1.0, 0.0), c(0.0, 0.0)],
            Self::V => [c(0.0, 0.0), c(1.0, 0.0)],
            Self::D => [c(h, 0.0), c(h, 0.0)],
            Self::A => [c(h, 0.0), c(-h, 0.0)],
            Self::R => [c(h, 0.0), c(0.0, -h)],
            Self::L => [c(h, 0.0), c(0.0, h)],
        }
    }

    pub fn label(self) -> char {
        match self {
            Self::H => 'H',
            Self::V => 'V',
            Self::D => 'D',
            Self::A => 'A',
            Self::R => 'R',
            Self::L => 'L',
        }
    }

    pub fn from_label(label: char) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.label() == label.to_ascii_uppercase())
    }
}

/// Polarization analyzed at a detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Polarization {
    /// Explicit complex 3-vector contracted without conjugation.
    Vector(Vec3),
    /// Analyzer state in the detector's rotated `{H, V}` basis.
    State(PolState),
}

/// Far-field detector for one photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSetting {
    /// Polar angle measured from the outward normal of the detection medium.
    pub theta: f64,
    pub phi: f64,
    pub omega: f64,
    pub medium: DetectionMedium,
    pub polarization: Polarization,
}

impl DetectorSetting {
    pub fn new(theta: f64, phi: f64, omega: f64, medium: DetectionMedium, polarization: Polarization) -> Result<Self> {
        let d = Self {
            theta,
            phi,
            omega,
            medium,
            polarization,
        };
        d.validate()?;
        Ok(d)
    }

    /// Detector with the `H` analyzer.
    pub fn at(theta: f64, phi: f64, omega: f64, medium: DetectionMedium) -> Result<Self> {
        Self::new(theta, phi, omega, medium, Polarization::State(PolState::H))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidAngle(self.theta));
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidAngle(self.phi));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "detector.omega",
                reason: format!("must be positive, got {}", self.omega),
            });
        }
        if let Polarization::Vector(v) = self.polarization {
            let n = linalg::norm_sqr(&v).sqrt();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter {
                    name: "detector.polarization",
                    reason: format!("vector must have unit norm, got {n}"),
                });
            }
        }
        Ok(())
    }

    fn role_layers(&self, stack: &LayerStack, role: Role) -> Layers {
        stack.at(role)
    }

    /// Rotated analyzer axes `(x', y')` built from the spherical unit vectors
    /// at the detector direction.
    pub fn basis(&self) -> [[f64; 3]; 2] {
        let polar = match self.medium {
            DetectionMedium::Medium1 => self.theta,
            DetectionMedium::Medium3 => std::f64::consts::PI - self.theta,
        };
        let (st, ct) = polar.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let theta_hat = [ct * cp, ct * sp, -st];
        let phi_hat = [-sp, cp, 0.0];
        let mix = |a: f64, b: f64| -> [f64; 3] { std::array::from_fn(|k| a * theta_hat[k] + b * phi_hat[k]) };
        [mix(cp, -sp), mix(sp, cp)]
    }

    /// Analyzer vector for a state `(a_H, a_V)`: `conj(a_H) x' + conj(a_V) y'`.
    pub fn analyzer(&self, amplitudes: [Complex64; 2]) -> Vec3 {
        let [x, y] = self.basis();
        std::array::from_fn(|k| amplitudes[0].conj() * x[k] + amplitudes[1].conj() * y[k])
    }

    pub fn polarization_vector(&self) -> Vec3 {
        match self.polarization {
            Polarization::Vector(v) => v,
            Polarization::State(s) => self.analyzer(s.amplitudes()),
        }
    }
}

/// Split of the pump frequency for a degeneracy ratio `r = lambda_s / lambda_i`.
pub fn split_frequency(omega_p: f64, ratio: f64) -> Result<(f64, f64)> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "ratio",
            reason: format!("must be positive, got {ratio}"),
        });
    }
    let omega_s = omega_p / (1.0 + ratio);
    Ok((omega_s, omega_p - omega_s))
}

/// Complete description of one coincidence measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointSetting {
    pub signal: DetectorSetting,
    pub idler: DetectorSetting,
    pub pump: PumpSpec,
    pub stack: LayerStack,
    pub chi2: Chi2Tensor,
}

impl JointSetting {
    /// Validates both detectors and energy conservation.
    pub fn new(
        signal: DetectorSetting,
        idler: DetectorSetting,
        pump: PumpSpec,
        stack: LayerStack,
        chi2: Chi2Tensor,
    ) -> Result<Self> {
        signal.validate()?;
        idler.validate()?;
        let omega_p = pump.omega();
        if ((signal.omega + idler.omega) - omega_p).abs() > 1e-12 * omega_p {
            return Err(Error::InvalidParameter {
                name: "idler.omega",
                reason: "signal and idler frequencies must sum to the pump frequency".into(),
            });
        }
        if signal.medium != idler.medium {
            return Err(Error::InvalidParameter {
                name: "idler.medium",
                reason: "both photons must be detected in the same medium".into(),
            });
        }
        Ok(Self {
            signal,
            idler,
            pump,
            stack,
            chi2,
        })
    }

    /// Setting with the idler frequency fixed by energy conservation, both
    /// detectors in `medium` and `H` analyzers.
    #[allow(clippy::too_many_arguments)]
    pub fn with_ratio(
        pump: PumpSpec,
        stack: LayerStack,
        chi2: Chi2Tensor,
        ratio: f64,
        medium: DetectionMedium,
        signal_angles: (f64, f64),
        idler_angles: (f64, f64),
    ) -> Result<Self> {
        let (ws, wi) = split_frequency(pump.omega(), ratio)?;
        let signal = DetectorSetting::at(signal_angles.0, signal_angles.1, ws, medium)?;
        let idler = DetectorSetting::at(idler_angles.0, idler_angles.1, wi, medium)?;
        Self::new(signal, idler, pump, stack, chi2)
    }

    pub fn signal_layers(&self) -> Layers {
        self.signal.role_layers(&self.stack, Role::Signal)
    }

    pub fn idler_layers(&self) -> Layers {
        self.idler.role_layers(&self.stack, Role::Idler)
    }

    pub fn pump_layers(&self) -> Layers {
        self.stack.at(Role::Pump)
    }

    pub fn signal_q(&self) -> TransverseWaveVector {
        detector_q(&self.signal, &self.signal_layers())
    }

    pub fn idler_q(&self) -> TransverseWaveVector {
        detector_q(&self.idler, &self.idler_layers())
    }

    pub fn with_signal_angles(mut self, theta: f64, phi: f64) -> Self {
        self.signal.theta = theta;
        self.signal.phi = phi;
        self
    }

    pub fn with_idler_angles(mut self, theta: f64, phi: f64) -> Self {
        self.idler.theta = theta;
        self.idler.phi = phi;
        self
    }

    pub fn with_thickness(mut self, thickness: f64) -> Self {
        self.stack.thickness = thickness;
        self
    }
}

fn detector_q(det: &DetectorSetting, layers: &Layers) -> TransverseWaveVector {
    let k = layers.medium(det.medium.index()).k(det.omega).re;
    TransverseWaveVector::from_angles(k, det.theta, det.phi)
}

/// Amplitude tensor `J[sigma_s][sigma_i]` at arbitrary transverse wave
/// vectors. Exactly zero where the pump spectrum vanishes.
pub fn jap_tensor(q_s: TransverseWaveVector, q_i: TransverseWaveVector, setting: &JointSetting) -> Result<Mat3> {
    let q_p = q_s + q_i;
    let pump_layers = setting.pump_layers();
    if pump_spectrum(q_p, &setting.pump, pump_layers.medium(3)) == ZERO {
        return Ok(ZERO_MAT);
    }
    let a = setting.stack.thickness;
    let gs = green(q_s, setting.signal.omega, &setting.signal_layers(), setting.signal.medium)?;
    let gi = green(q_i, setting.idler.omega, &setting.idler_layers(), setting.idler.medium)?;
    let ep = pump_in_slab(q_p, &setting.pump, &pump_layers)?;
    let mut j = ZERO_MAT;
    for p in ep.terms() {
        let pol = setting.chi2.contract(&p.amplitude);
        for s in gs.terms() {
            let sp = linalg::mat_mul(&s.amplitude, &pol);
            for i in gi.terms() {
                let w = slab_integral(p.kappa + s.kappa + i.kappa, a);
                let term = linalg::mat_mul(&sp, &linalg::transpose(&i.amplitude));
                j = linalg::mat_add(&j, &linalg::mat_scale(&term, w));
            }
        }
    }
    Ok(j)
}

/// `e_s . J . e_i`.
pub fn contract(j: &Mat3, e_s: &Vec3, e_i: &Vec3) -> Complex64 {
    linalg::dot(&linalg::left_mul(e_s, j), e_i)
}

/// Two-photon amplitude with the detectors' polarizations.
pub fn jap(q_s: TransverseWaveVector, q_i: TransverseWaveVector, setting: &JointSetting) -> Result<Complex64> {
    let j = jap_tensor(q_s, q_i, setting)?;
    Ok(contract(
        &j,
        &setting.signal.polarization_vector(),
        &setting.idler.polarization_vector(),
    ))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn integrand(q_s: TransverseWaveVector, q_i: TransverseWaveVector, setting: &JointSetting, z: f64) -> Result<Mat3> {
    let gs = green_at(q_s, setting.signal.omega, &setting.signal_layers(), setting.signal.medium, z)?;
    let gi = green_at(q_i, setting.idler.omega, &setting.idler_layers(), setting.idler.medium, z)?;
    let e = pump_field_at(q_s + q_i, &setting.pump, &setting.pump_layers(), z)?;
    let pol = setting.chi2.contract(&e);
    Ok(linalg::mat_mul(&linalg::mat_mul(&gs, &pol), &linalg::transpose(&gi)))
}

fn composite(
    q_s: TransverseWaveVector,
    q_i: TransverseWaveVector,
    setting: &JointSetting,
    panels: usize,
    rule: &[(f64, f64)],
) -> Result<Mat3> {
    let a = setting.stack.thickness;
    let h = a / panels as f64;
    let mut acc = ZERO_MAT;
    for p in 0..panels {
        let mid = -a + (p as f64 + 0.5) * h;
        for &(x, w) in rule {
            let m = integrand(q_s, q_i, setting, mid + 0.5 * h * x)?;
            acc = linalg::mat_add(&acc, &linalg::mat_scale(&m, (0.5 * h * w).into()));
        }
    }
    Ok(acc)
}

/// Independent evaluation of [`jap_tensor`] by composite Gauss-Legendre
/// quadrature of the pointwise integrand, comparing a 64-point and a
/// 128-point rule on the same panels.
pub fn jap_quadrature_tensor(
    q_s: TransverseWaveVector,
    q_i: TransverseWaveVector,
    setting: &JointSetting,
) -> Result<Mat3> {
    let q_p = q_s + q_i;
    if pump_spectrum(q_p, &setting.pump, setting.pump_layers().medium(3)) == ZERO {
        return Ok(ZERO_MAT);
    }
    let kappa = kz(q_s, setting.signal_layers().medium(2), setting.signal.omega).norm()
        + kz(q_i, setting.idler_layers().medium(2), setting.idler.omega).norm()
        + kz(q_p, setting.pump_layers().medium(2), setting.pump.omega()).norm();
    let panels = ((2.0 * kappa * setting.stack.thickness / 16.0).ceil() as usize).max(1);
    let coarse = composite(q_s, q_i, setting, panels, &gauss_legendre(64))?;
    let fine = composite(q_s, q_i, setting, panels, &gauss_legendre(128))?;
    let diff = linalg::mat_max_abs(&linalg::mat_add(&fine, &linalg::mat_scale(&coarse, Complex64::new(-1.0, 0.0))));
    let scale = linalg::mat_max_abs(&fine);
    if diff > 1e-6 * scale {
        return Err(Error::OracleDivergence(diff / scale));
    }
    Ok(fine)
}

pub fn jap_quadrature(q_s: TransverseWaveVector, q_i: TransverseWaveVector, setting: &JointSetting) -> Result<Complex64> {
    let j = jap_quadrature_tensor(q_s, q_i, setting)?;
    Ok(contract(
        &j,
        &setting.signal.polarization_vector(),
        &setting.idler.polarization_vector(),
    ))
}

/// Amplitude tensor at the detector directions together with the factors
/// that turn it into a rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biphoton {
    pub tensor: Mat3,
    /// `n_s n_i (w_s w_i / c^2)^3 |kz_s kz_i|^2`.
    pub scale: f64,
    pub signal: DetectorSetting,
    pub idler: DetectorSetting,
}

impl Biphoton {
    pub fn evaluate(setting: &JointSetting) -> Result<Self> {
        setting.signal.validate()?;
        setting.idler.validate()?;
        let (ls, li) = (setting.signal_layers(), setting.idler_layers());
        let (q_s, q_i) = (setting.signal_q(), setting.idler_q());
        let tensor = jap_tensor(q_s, q_i, setting)?;
        let ms = ls.medium(setting.signal.medium.index());
        let mi = li.medium(setting.idler.medium.index());
        let kzs = kz(q_s, ms, setting.signal.omega);
        let kzi = kz(q_i, mi, setting.idler.omega);
        let c2 = SPEED_OF_LIGHT * SPEED_OF_LIGHT;
        let freq = (setting.signal.omega * setting.idler.omega / c2).powi(3);
        let scale = ms.index().re * mi.index().re * freq * (kzs * kzi).norm_sqr();
        Ok(Self {
            tensor,
            scale,
            signal: setting.signal,
            idler: setting.idler,
        })
    }

    pub fn amplitude(&self, e_s: &Vec3, e_i: &Vec3) -> Complex64 {
        contract(&self.tensor, e_s, e_i)
    }

    pub fn rate(&self, e_s: &Vec3, e_i: &Vec3) -> f64 {
        self.scale * self.amplitude(e_s, e_i).norm_sqr()
    }

    /// Rate with each detector's configured polarization.
    pub fn polarized_rate(&self) -> f64 {
        self.rate(&self.signal.polarization_vector(), &self.idler.polarization_vector())
    }

    /// Sum over the nine Cartesian analyzer pairs.
    pub fn unpolarized_rate(&self) -> f64 {
        self.scale * self.tensor.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Rate for analyzer states given by their `(a_H, a_V)` amplitudes.
    pub fn projection_rate(&self, signal: [Complex64; 2], idler: [Complex64; 2]) -> f64 {
        self.rate(&self.signal.analyzer(signal), &self.idler.analyzer(idler))
    }

    /// `A[j][k]` over `{H, V}` of the signal and idler.
    pub fn amplitude_matrix(&self) -> [[Complex64; 2]; 2] {
        let bs = self.signal.basis().map(linalg::real_vec);
        let bi = self.idler.basis().map(linalg::real_vec);
        std::array::from_fn(|j| std::array::from_fn(|k| self.amplitude(&bs[j], &bi[k])))
    }
}

pub fn farfield_rate(setting: &JointSetting) -> Result<f64> {
    Ok(Biphoton::evaluate(setting)?.polarized_rate())
}

pub fn unpolarized_rate(setting: &JointSetting) -> Result<f64> {
    Ok(Biphoton::evaluate(setting)?.unpolarized_rate())
}

pub fn amplitude_matrix(setting: &JointSetting) -> Result<[[Complex64; 2]; 2]> {
    Ok(Biphoton::evaluate(setting)?.amplitude_matrix())
}
