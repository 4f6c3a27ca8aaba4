//! Classical pump field inside the slab.
//!
//! The pump arrives from medium 3 with a truncated Gaussian angular spectrum
//! and is `x`-polarized right before the slab, carrying the longitudinal
//! component required by transversality. Each plane-wave component is split
//! into s and p parts, transmitted into the slab and resummed over all
//! internal reflections.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{SlabOptics, TransmissionPair, TransmissionTerm};
use crate::linalg::{self, Vec3, I, ZERO, ZERO_VEC};
use crate::optics::{
    omega_from_wavelength, polarization_triad, upper_sqrt, Channel, Layers, Medium,
    TransverseWaveVector,
};
use crate::series::ExponentialSeries;

/// Monochromatic pump with a Gaussian angular spectrum `A exp(-q^2/w^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    /// Vacuum wavelength, meters.
    pub wavelength: f64,
    /// Spectral width `w`, 1/m.
    pub width: f64,
    /// Peak amplitude `A`, arbitrary units.
    pub amplitude: f64,
}

impl PumpSpec {
    pub fn new(wavelength: f64, width: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "pump.wavelength",
                reason: format!("must be positive, got {wavelength}"),
            });
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "pump.width",
                reason: format!("must be positive, got {width}"),
            });
        }
        Ok(Self {
            wavelength,
            width,
            amplitude: 1.0,
        })
    }

    /// Spectral width of a beam `exp(-(x^2+y^2)/W^2)`, `w = 2/W`.
    pub fn width_from_waist(waist: f64) -> f64 {
        2.0 / waist
    }

    pub fn omega(&self) -> f64 {
        omega_from_wavelength(self.wavelength)
    }

    /// Radius of the truncation disk, `Re(k3p)`.
    pub fn cutoff(&self, substrate: Medium) -> f64 {
        substrate.k(self.omega()).re
    }
}

/// Angular spectrum at the substrate-slab interface; exactly zero outside
/// `|q| <= k3p`.
pub fn pump_spectrum(q: TransverseWaveVector, spec: &PumpSpec, substrate: Medium) -> Complex64 {
    let cutoff = spec.cutoff(substrate);
    let q2 = q.norm_sqr();
    if q2 > cutoff * cutoff {
        return ZERO;
    }
    Complex64::new(spec.amplitude * (-q2 / (spec.width * spec.width)).exp(), 0.0)
}

/// Cartesian pump field right before the slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceField {
    pub field: Vec3,
    /// Set on the measure-zero set `|ky| = k3p` where the polarization
    /// normalizer vanishes; the field is reported as zero there.
    pub excluded: bool,
}

/// `sqrt(k3^2 - ky^2)`; `None` where it vanishes.
fn normalizer(q: TransverseWaveVector, k3: Complex64) -> Option<Complex64> {
    let n = upper_sqrt(k3 * k3 - q.ky * q.ky);
    (n.norm() > 1e-12 * k3.norm()).then_some(n)
}

pub fn interface_field(q: TransverseWaveVector, spec: &PumpSpec, substrate: Medium) -> InterfaceField {
    let u = pump_spectrum(q, spec, substrate);
    if u == ZERO {
        return InterfaceField {
            field: ZERO_VEC,
            excluded: false,
        };
    }
    let omega = spec.omega();
    let k3 = substrate.k(omega);
    let kz3 = crate::optics::kz(q, substrate, omega);
    match normalizer(q, k3) {
        Some(n) => InterfaceField {
            field: [u * kz3 / n, ZERO, -u * q.kx / n],
            excluded: false,
        },
        None => InterfaceField {
            field: ZERO_VEC,
            excluded: true,
        },
    }
}

/// Amplitudes of the interface field along `s` and `p3+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpAmplitudes {
    pub s: Complex64,
    pub p: Complex64,
    pub excluded: bool,
}

/// s/p decomposition with the `kx -> 0` singularity cancelled analytically:
/// `E_s = -kz3 (ky/q) U / N`, `E_p = -k3 (kx/q) U / N`, and the `q = 0`
/// direction taken along `+kx`.
pub fn sp_decompose(q: TransverseWaveVector, spec: &PumpSpec, substrate: Medium) -> SpAmplitudes {
    let u = pump_spectrum(q, spec, substrate);
    if u == ZERO {
        return SpAmplitudes {
            s: ZERO,
            p: ZERO,
            excluded: false,
        };
    }
    let omega = spec.omega();
    let k3 = substrate.k(omega);
    let kz3 = crate::optics::kz(q, substrate, omega);
    let (ux, uy) = q.direction();
    match normalizer(q, k3) {
        Some(n) => SpAmplitudes {
            s: -kz3 * uy * u / n,
            p: -k3 * ux * u / n,
            excluded: false,
        },
        None => SpAmplitudes {
            s: ZERO,
            p: ZERO,
            excluded: true,
        },
    }
}

/// Generalized transmission of the pump from medium 3 into the slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QCoefficients {
    pub s: TransmissionPair,
    pub p: TransmissionPair,
}

fn q_pair(o: &SlabOptics, q: TransverseWaveVector, omega: f64, a: f64, ch: Channel) -> Result<TransmissionPair> {
    let kz2 = o.kz[1];
    let d = o.denominator(ch, a, q, omega)?;
    let t = o.f32.transmission(ch) * (I * kz2 * a).exp() / d;
    Ok(TransmissionPair {
        up: TransmissionTerm {
            amplitude: t,
            kappa: kz2,
        },
        down: TransmissionTerm {
            amplitude: t * o.f21.reflection(ch),
            kappa: -kz2,
        },
        denominator: d,
    })
}

pub fn q_coefficients(q: TransverseWaveVector, omega_p: f64, layers: &Layers) -> Result<QCoefficients> {
    let o = SlabOptics::new(q, omega_p, layers)?;
    Ok(QCoefficients {
        s: q_pair(&o, q, omega_p, layers.thickness, Channel::S)?,
        p: q_pair(&o, q, omega_p, layers.thickness, Channel::P)?,
    })
}

/// Closed-form `(Q_up(z), Q_down(z))` evaluated pointwise.
pub fn q_at(
    q: TransverseWaveVector,
    omega_p: f64,
    layers: &Layers,
    channel: Channel,
    z: f64,
) -> Result<(Complex64, Complex64)> {
    let o = SlabOptics::new(q, omega_p, layers)?;
    let a = layers.thickness;
    let kz2 = o.kz[1];
    let d = o.denominator(channel, a, q, omega_p)?;
    let t = o.f32.transmission(channel);
    let up = (I * kz2 * (a + z)).exp() / d * t;
    let down = o.f21.reflection(channel) * (I * kz2 * (a - z)).exp() / d * t;
    Ok((up, down))
}

pub type PumpField = ExponentialSeries<Vec3>;

/// Pump field inside the slab as a series in `z`.
pub fn pump_in_slab(q: TransverseWaveVector, spec: &PumpSpec, layers: &Layers) -> Result<PumpField> {
    let mut field = PumpField::new();
    let amps = sp_decompose(q, spec, layers.medium(3));
    if amps.s == ZERO && amps.p == ZERO {
        return Ok(field);
    }
    let omega = spec.omega();
    let coeff = q_coefficients(q, omega, layers)?;
    let tri = polarization_triad(q, layers.medium(2), omega);
    let s = tri.s_vec();
    field.push_scaled(amps.s * coeff.s.up.amplitude, &s, coeff.s.up.kappa);
    field.push_scaled(amps.s * coeff.s.down.amplitude, &s, coeff.s.down.kappa);
    field.push_scaled(amps.p * coeff.p.up.amplitude, &tri.p_up, coeff.p.up.kappa);
    field.push_scaled(amps.p * coeff.p.down.amplitude, &tri.p_down, coeff.p.down.kappa);
    Ok(field)
}

/// Pointwise pump field from the closed-form coefficients.
pub fn pump_field_at(q: TransverseWaveVector, spec: &PumpSpec, layers: &Layers, z: f64) -> Result<Vec3> {
    let amps = sp_decompose(q, spec, layers.medium(3));
    if amps.s == ZERO && amps.p == ZERO {
        return Ok(ZERO_VEC);
    }
    let omega = spec.omega();
    let (qs_up, qs_down) = q_at(q, omega, layers, Channel::S, z)?;
    let (qp_up, qp_down) = q_at(q, omega, layers, Channel::P, z)?;
    let tri = polarization_triad(q, layers.medium(2), omega);
    let s_part = linalg::scale(&tri.s_vec(), amps.s * (qs_up + qs_down));
    let p_part = linalg::add(
        &linalg::scale(&tri.p_up, amps.p * qp_up),
        &linalg::scale(&tri.p_down, amps.p * qp_down),
    );
    Ok(linalg::add(&s_part, &p_part))
}
