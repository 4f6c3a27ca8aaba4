//! Fourier-domain dyadic Green's functions of the slab.
//!
//! `g21` propagates a point source at depth `z'` in the slab to medium 1 and
//! `g23` to medium 3. Both are returned as [`ExponentialSeries`] in `z'`; the
//! detector-side phase (`exp(i kz1 z)` or `exp(-i kz3 z)`) is left out since
//! the far-field rate only needs the source-side dependence.
//!
//! Each channel is split into the wave launched upward (`p2+`, `z'`
//! wavenumber `-kz2`) and the one launched downward (`p2-`, `+kz2`), and both
//! are resummed over all Fabry-Pérot bounces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, I};
use crate::optics::{
    fresnel_from_kz, kz, polarization_triad, Channel, Fresnel, Layers, TransverseWaveVector,
};
use crate::series::ExponentialSeries;

/// `|1 - r23 r21 exp(2i kz2 a)|` below this fraction of `|r23 r21|` is a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Medium in which a photon is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectionMedium {
    /// Cladding above the slab (`z > 0`).
    #[serde(rename = "1")]
    Medium1,
    /// Substrate below the slab (`z < -a`).
    #[serde(rename = "3")]
    Medium3,
}

impl DetectionMedium {
    pub fn index(self) -> usize {
        match self {
            Self::Medium1 => 1,
            Self::Medium3 => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionTerm {
    pub amplitude: Complex64,
    /// Wavenumber of the `exp(i kappa z')` dependence.
    pub kappa: Complex64,
}

impl TransmissionTerm {
    pub fn eval(&self, z: f64) -> Complex64 {
        self.amplitude * (I * self.kappa * z).exp()
    }
}

/// Generalized transmission coefficient of one channel, split by the
/// direction in which the wave leaves the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionPair {
    /// Launched toward `+z`.
    pub up: TransmissionTerm,
    /// Launched toward `-z`.
    pub down: TransmissionTerm,
    /// Fabry-Pérot denominator `1 - r23 r21 exp(2i kz2 a)`.
    pub denominator: Complex64,
}

impl TransmissionPair {
    pub fn eval(&self, z: f64) -> Complex64 {
        self.up.eval(z) + self.down.eval(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionSet {
    pub s: TransmissionPair,
    pub p: TransmissionPair,
}

/// Longitudinal wavenumbers and interface coefficients of a slab at one
/// frequency and transverse wave vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SlabOptics {
    pub kz: [Complex64; 3],
    /// From 2 into 1.
    pub f21: Fresnel,
    /// From 2 into 3.
    pub f23: Fresnel,
    /// From 3 into 2.
    pub f32: Fresnel,
}

impl SlabOptics {
    pub fn new(q: TransverseWaveVector, omega: f64, layers: &Layers) -> Result<Self> {
        let [m1, m2, m3] = layers.media;
        let kz = [kz(q, m1, omega), kz(q, m2, omega), kz(q, m3, omega)];
        let pole = || Error::InterfacePole { q: q.norm(), omega };
        Ok(Self {
            kz,
            f21: fresnel_from_kz(m2, m1, kz[1], kz[0]).ok_or_else(pole)?,
            f23: fresnel_from_kz(m2, m3, kz[1], kz[2]).ok_or_else(pole)?,
            f32: fresnel_from_kz(m3, m2, kz[2], kz[1]).ok_or_else(pole)?,
        })
    }

    /// `1 - r23 r21 exp(2i kz2 a)`, rejected when it sits on a pole.
    pub fn denominator(
        &self,
        channel: Channel,
        thickness: f64,
        q: TransverseWaveVector,
        omega: f64,
    ) -> Result<Complex64> {
        let rr = self.f23.reflection(channel) * self.f21.reflection(channel);
        let d = 1.0 - rr * (2.0 * I * self.kz[1] * thickness).exp();
        if d.norm() < POLE_TOLERANCE * rr.norm() || d.norm() == 0.0 {
            return Err(Error::ResonancePole {
                kx: q.kx,
                ky: q.ky,
                omega,
                magnitude: d.norm(),
            });
        }
        Ok(d)
    }
}

/// Generalized transmission from the slab into medium 1.
pub fn t21_series(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    channel: Channel,
) -> Result<TransmissionPair> {
    let optics = SlabOptics::new(q, omega, layers)?;
    t21_from(&optics, q, omega, layers.thickness, channel)
}

fn t21_from(
    optics: &SlabOptics,
    q: TransverseWaveVector,
    omega: f64,
    a: f64,
    channel: Channel,
) -> Result<TransmissionPair> {
    let kz2 = optics.kz[1];
    let d = optics.denominator(channel, a, q, omega)?;
    let t = optics.f21.transmission(channel) / d;
    let r23 = optics.f23.reflection(channel);
    Ok(TransmissionPair {
        up: TransmissionTerm {
            amplitude: t,
            kappa: -kz2,
        },
        down: TransmissionTerm {
            amplitude: t * r23 * (2.0 * I * kz2 * a).exp(),
            kappa: kz2,
        },
        denominator: d,
    })
}

/// Generalized transmission from the slab into medium 3.
pub fn t23_series(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    channel: Channel,
) -> Result<TransmissionPair> {
    let optics = SlabOptics::new(q, omega, layers)?;
    t23_from(&optics, q, omega, layers.thickness, channel)
}

fn t23_from(
    optics: &SlabOptics,
    q: TransverseWaveVector,
    omega: f64,
    a: f64,
    channel: Channel,
) -> Result<TransmissionPair> {
    let kz2 = optics.kz[1];
    let d = optics.denominator(channel, a, q, omega)?;
    let t = optics.f23.transmission(channel) * (I * kz2 * a).exp() / d;
    let r21 = optics.f21.reflection(channel);
    Ok(TransmissionPair {
        up: TransmissionTerm {
            amplitude: t * r21,
            kappa: -kz2,
        },
        down: TransmissionTerm {
            amplitude: t,
            kappa: kz2,
        },
        denominator: d,
    })
}

pub fn t21_set(q: TransverseWaveVector, omega: f64, layers: &Layers) -> Result<TransmissionSet> {
    let optics = SlabOptics::new(q, omega, layers)?;
    Ok(TransmissionSet {
        s: t21_from(&optics, q, omega, layers.thickness, Channel::S)?,
        p: t21_from(&optics, q, omega, layers.thickness, Channel::P)?,
    })
}

pub fn t23_set(q: TransverseWaveVector, omega: f64, layers: &Layers) -> Result<TransmissionSet> {
    let optics = SlabOptics::new(q, omega, layers)?;
    Ok(TransmissionSet {
        s: t23_from(&optics, q, omega, layers.thickness, Channel::S)?,
        p: t23_from(&optics, q, omega, layers.thickness, Channel::P)?,
    })
}

/// Closed-form `(T_up(z'), T_down(z'))` into medium 1, evaluated pointwise.
pub fn t21_at(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    channel: Channel,
    z: f64,
) -> Result<(Complex64, Complex64)> {
    let o = SlabOptics::new(q, omega, layers)?;
    let a = layers.thickness;
    let kz2 = o.kz[1];
    let d = o.denominator(channel, a, q, omega)?;
    let t = o.f21.transmission(channel);
    let up = (-I * kz2 * z).exp() / d * t;
    let down = o.f23.reflection(channel) * (I * kz2 * (2.0 * a + z)).exp() / d * t;
    Ok((up, down))
}

/// Closed-form `(T_up(z'), T_down(z'))` into medium 3, evaluated pointwise.
pub fn t23_at(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    channel: Channel,
    z: f64,
) -> Result<(Complex64, Complex64)> {
    let o = SlabOptics::new(q, omega, layers)?;
    let a = layers.thickness;
    let kz2 = o.kz[1];
    let d = o.denominator(channel, a, q, omega)?;
    let t = o.f23.transmission(channel);
    let up = o.f21.reflection(channel) * (I * kz2 * (a - z)).exp() / d * t;
    let down = (I * kz2 * (a + z)).exp() / d * t;
    Ok((up, down))
}

/// The dyadics of the slab Green's function toward one detection medium:
/// `(ss, p_det p2+, p_det p2-)`.
pub fn dyadics(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    medium: DetectionMedium,
) -> (Mat3, Mat3, Mat3, Complex64) {
    let tri2 = polarization_triad(q, layers.medium(2), omega);
    let tri_det = polarization_triad(q, layers.medium(medium.index()), omega);
    let p_det = match medium {
        DetectionMedium::Medium1 => tri_det.p_up,
        DetectionMedium::Medium3 => tri_det.p_down,
    };
    let s = tri2.s_vec();
    (
        linalg::outer(&s, &s),
        linalg::outer(&p_det, &tri2.p_up),
        linalg::outer(&p_det, &tri2.p_down),
        tri2.kz,
    )
}

fn assemble(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    medium: DetectionMedium,
    set: &TransmissionSet,
) -> ExponentialSeries<Mat3> {
    let (ss, pp_up, pp_down, kz2) = dyadics(q, omega, layers, medium);
    let pre = -I / (2.0 * kz2);
    let mut g = ExponentialSeries::new();
    g.push_scaled(pre * set.s.up.amplitude, &ss, set.s.up.kappa);
    g.push_scaled(pre * set.s.down.amplitude, &ss, set.s.down.kappa);
    g.push_scaled(pre * set.p.up.amplitude, &pp_up, set.p.up.kappa);
    g.push_scaled(pre * set.p.down.amplitude, &pp_down, set.p.down.kappa);
    g
}

/// Slab-to-medium-1 Green's function as a series in the source depth `z'`.
pub fn g21(q: TransverseWaveVector, omega: f64, layers: &Layers) -> Result<ExponentialSeries<Mat3>> {
    let set = t21_set(q, omega, layers)?;
    Ok(assemble(q, omega, layers, DetectionMedium::Medium1, &set))
}

/// Slab-to-medium-3 Green's function as a series in the source depth `z'`.
pub fn g23(q: TransverseWaveVector, omega: f64, layers: &Layers) -> Result<ExponentialSeries<Mat3>> {
    let set = t23_set(q, omega, layers)?;
    Ok(assemble(q, omega, layers, DetectionMedium::Medium3, &set))
}

pub fn green(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    medium: DetectionMedium,
) -> Result<ExponentialSeries<Mat3>> {
    match medium {
        DetectionMedium::Medium1 => g21(q, omega, layers),
        DetectionMedium::Medium3 => g23(q, omega, layers),
    }
}

/// Pointwise Green's function built from the closed-form coefficients.
pub fn green_at(
    q: TransverseWaveVector,
    omega: f64,
    layers: &Layers,
    medium: DetectionMedium,
    z: f64,
) -> Result<Mat3> {
    let coeff = match medium {
        DetectionMedium::Medium1 => t21_at,
        DetectionMedium::Medium3 => t23_at,
    };
    let (s_up, s_down) = coeff(q, omega, layers, Channel::S, z)?;
    let (p_up, p_down) = coeff(q, omega, layers, Channel::P, z)?;
    let (ss, pp_up, pp_down, kz2) = dyadics(q, omega, layers, medium);
    let pre = -I / (2.0 * kz2);
    let m = linalg::mat_add(
        &linalg::mat_scale(&ss, s_up + s_down),
        &linalg::mat_add(
            &linalg::mat_scale(&pp_up, p_up),
            &linalg::mat_scale(&pp_down, p_down),
        ),
    );
    Ok(linalg::mat_scale(&m, pre))
}
