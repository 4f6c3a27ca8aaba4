//! Plane-wave primitives of a stratified, isotropic, non-magnetic medium.
//!
//! Conventions used by every other module:
//!
//! * the stack is medium 3 (`z < -a`), the nonlinear slab medium 2
//!   (`-a < z < 0`) and medium 1 (`z > 0`);
//! * the pump arrives from medium 3 travelling towards `+z`;
//! * `kz = sqrt(k^2 - q^2)` is taken with `Im(kz) >= 0`, and with `Re(kz) >= 0`
//!   when the medium is lossless and the wave propagates;
//! * polarization vectors are normalized with the unconjugated product,
//!   `s.s = p.p = 1`.

pub mod material;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Vec3, ONE, ZERO};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Tolerance below which `Im(kz)` counts as zero when breaking the branch tie.
const BRANCH_TOL: f64 = 1e-13;

pub fn omega_from_wavelength(wavelength: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / wavelength
}

pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega
}

/// A homogeneous, isotropic, passive medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub epsilon: Complex64,
}

impl Medium {
    pub fn new(epsilon: Complex64) -> Result<Self> {
        if !(epsilon.re.is_finite() && epsilon.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("non-finite permittivity {epsilon}"),
            });
        }
        if epsilon.im < 0.0 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("gain media are not supported (Im eps = {})", epsilon.im),
            });
        }
        Ok(Self { epsilon })
    }

    pub fn real(epsilon: f64) -> Self {
        Self {
            epsilon: Complex64::new(epsilon, 0.0),
        }
    }

    pub fn vacuum() -> Self {
        Self::real(1.0)
    }

    /// Complex refractive index, principal root.
    pub fn index(&self) -> Complex64 {
        self.epsilon.sqrt()
    }

    /// Wavenumber `n omega / c`.
    pub fn k(&self, omega: f64) -> Complex64 {
        self.index() * (omega / SPEED_OF_LIGHT)
    }
}

/// In-plane wave vector `q = kx x + ky y`, in 1/m.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TransverseWaveVector {
    pub kx: f64,
    pub ky: f64,
}

impl TransverseWaveVector {
    pub const ZERO: Self = Self { kx: 0.0, ky: 0.0 };

    pub fn new(kx: f64, ky: f64) -> Self {
        Self { kx, ky }
    }

    /// `q = k sin(theta) (cos phi, sin phi)`.
    pub fn from_angles(k: f64, theta: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let r = k * theta.sin();
        Self { kx: r * c, ky: r * s }
    }

    pub fn norm(&self) -> f64 {
        self.kx.hypot(self.ky)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.kx * self.kx + self.ky * self.ky
    }

    /// Unit in-plane direction; the `q = 0` limit is taken along `+kx`.
    pub fn direction(&self) -> (f64, f64) {
        let q = self.norm();
        if q == 0.0 {
            (1.0, 0.0)
        } else {
            (self.kx / q, self.ky / q)
        }
    }
}

impl std::ops::Add for TransverseWaveVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.kx + o.kx, self.ky + o.ky)
    }
}

impl std::ops::Neg for TransverseWaveVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.kx, -self.ky)
    }
}

/// Square root with `Im >= 0`; ties on the real axis resolved to `Re >= 0`.
pub fn upper_sqrt(z: Complex64) -> Complex64 {
    let mut r = z.sqrt();
    if r.im < 0.0 {
        r = -r;
    }
    if r.im.abs() <= BRANCH_TOL * r.norm() && r.re < 0.0 {
        r = -r;
    }
    r
}

/// Longitudinal wavenumber `sqrt(k^2 - kx^2 - ky^2)` on the decaying branch.
pub fn kz(q: TransverseWaveVector, medium: Medium, omega: f64) -> Complex64 {
    let k = medium.k(omega);
    upper_sqrt(k * k - q.norm_sqr())
}

/// s and p unit vectors of one medium at fixed `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationTriad {
    pub s_hat: [f64; 3],
    /// Upward (`+kz`) p vector.
    pub p_up: Vec3,
    /// Downward (`-kz`) p vector.
    pub p_down: Vec3,
    pub k: Complex64,
    pub kz: Complex64,
}

impl PolarizationTriad {
    pub fn s_vec(&self) -> Vec3 {
        crate::linalg::real_vec(self.s_hat)
    }

    /// Wave vector `q ± kz z`.
    pub fn k_vec(&self, q: TransverseWaveVector, upward: bool) -> Vec3 {
        let kz = if upward { self.kz } else { -self.kz };
        [q.kx.into(), q.ky.into(), kz]
    }
}

pub fn polarization_triad(
    q: TransverseWaveVector,
    medium: Medium,
    omega: f64,
) -> PolarizationTriad {
    let k = medium.k(omega);
    let kz = kz(q, medium, omega);
    let (ux, uy) = q.direction();
    let qn = q.norm();
    let s_hat = [-uy, ux, 0.0];
    let p = |sign: f64| -> Vec3 {
        [
            -sign * kz * ux / k,
            -sign * kz * uy / k,
            Complex64::new(qn, 0.0) / k,
        ]
    };
    PolarizationTriad {
        s_hat,
        p_up: p(1.0),
        p_down: p(-1.0),
        k,
        kz,
    }
}

/// Single-interface Fresnel coefficients for a wave incident from medium `i`
/// onto medium `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fresnel {
    pub r_s: Complex64,
    pub r_p: Complex64,
    pub t_s: Complex64,
    pub t_p: Complex64,
}

impl Fresnel {
    pub fn reflection(&self, channel: Channel) -> Complex64 {
        match channel {
            Channel::S => self.r_s,
            Channel::P => self.r_p,
        }
    }

    pub fn transmission(&self, channel: Channel) -> Complex64 {
        match channel {
            Channel::S => self.t_s,
            Channel::P => self.t_p,
        }
    }
}

/// Polarization channel of a plane wave at fixed `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    S,
    P,
}

pub fn fresnel(i: Medium, j: Medium, q: TransverseWaveVector, omega: f64) -> Result<Fresnel> {
    let kzi = kz(q, i, omega);
    let kzj = kz(q, j, omega);
    fresnel_from_kz(i, j, kzi, kzj).ok_or(Error::InterfacePole { q: q.norm(), omega })
}

pub(crate) fn fresnel_from_kz(
    i: Medium,
    j: Medium,
    kzi: Complex64,
    kzj: Complex64,
) -> Option<Fresnel> {
    let (ei, ej) = (i.epsilon, j.epsilon);
    let den_s = kzi + kzj;
    let den_p = kzi * ej + kzj * ei;
    let scale = kzi.norm().max(kzj.norm()) * ei.norm().max(ej.norm());
    if den_p.norm() <= 1e-14 * scale || den_s.norm() <= 1e-14 * kzi.norm().max(kzj.norm()) {
        return None;
    }
    if scale == 0.0 {
        // kz = 0 in both media: grazing incidence between identical media
        return Some(Fresnel {
            r_s: ZERO,
            r_p: ZERO,
            t_s: ONE,
            t_p: ONE,
        });
    }
    Some(Fresnel {
        r_s: (kzi - kzj) / den_s,
        r_p: (kzi * ej - kzj * ei) / den_p,
        t_s: 2.0 * kzi / den_s,
        t_p: 2.0 * i.index() * j.index() * kzi / den_p,
    })
}

/// Role of a frequency in the down-conversion process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Pump,
    Signal,
    Idler,
}

/// Permittivity of one layer at the three frequencies involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoleMedia {
    pub pump: Medium,
    pub signal: Medium,
    pub idler: Medium,
}

impl RoleMedia {
    pub fn uniform(medium: Medium) -> Self {
        Self {
            pump: medium,
            signal: medium,
            idler: medium,
        }
    }

    pub fn get(&self, role: Role) -> Medium {
        match role {
            Role::Pump => self.pump,
            Role::Signal => self.signal,
            Role::Idler => self.idler,
        }
    }
}

/// Cladding (medium 1), nonlinear slab (medium 2) and substrate (medium 3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub medium1: RoleMedia,
    pub medium2: RoleMedia,
    pub medium3: RoleMedia,
    /// Slab thickness `a`, meters.
    pub thickness: f64,
}

impl LayerStack {
    pub fn new(medium1: RoleMedia, medium2: RoleMedia, medium3: RoleMedia, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "thickness",
                reason: format!("must be positive, got {thickness}"),
            });
        }
        Ok(Self {
            medium1,
            medium2,
            medium3,
            thickness,
        })
    }

    /// GaAs on SiO2 under air with the constants quoted for a 500 nm pump and
    /// degenerate 1 µm pairs; permittivities held flat in wavelength.
    pub fn gaas_on_silica(thickness: f64) -> Self {
        let air = RoleMedia::uniform(Medium::vacuum());
        let gaas = RoleMedia {
            pump: Medium {
                epsilon: Complex64::new(17.63, 3.83),
            },
            signal: Medium::real(12.06),
            idler: Medium::real(12.06),
        };
        let silica = RoleMedia {
            pump: Medium::real(2.14),
            signal: Medium::real(2.10),
            idler: Medium::real(2.10),
        };
        Self {
            medium1: air,
            medium2: gaas,
            medium3: silica,
            thickness,
        }
    }

    pub fn with_thickness(mut self, thickness: f64) -> Self {
        self.thickness = thickness;
        self
    }

    /// The three layers as seen at one frequency.
    pub fn at(&self, role: Role) -> Layers {
        Layers {
            media: [
                self.medium1.get(role),
                self.medium2.get(role),
                self.medium3.get(role),
            ],
            thickness: self.thickness,
        }
    }
}

/// Three media at a single frequency plus the slab thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layers {
    /// Media 1, 2, 3 in that order.
    pub media: [Medium; 3],
    pub thickness: f64,
}

impl Layers {
    pub fn homogeneous(medium: Medium, thickness: f64) -> Self {
        Self {
            media: [medium; 3],
            thickness,
        }
    }

    pub fn medium(&self, index: usize) -> Medium {
        self.media[index - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const LAMBDA: f64 = 1e-6;

    fn omega() -> f64 {
        omega_from_wavelength(LAMBDA)
    }

    #[test]
    fn kz_normal_incidence_vacuum() {
        let kz = kz(TransverseWaveVector::ZERO, Medium::vacuum(), omega());
        assert_relative_eq!(kz.re, 2.0 * PI * 1e6, max_relative = 1e-14);
        assert_eq!(kz.im, 0.0);
    }

    #[test]
    fn kz_evanescent_vacuum() {
        let kz = kz(TransverseWaveVector::new(1e7, 0.0), Medium::vacuum(), omega());
        // sqrt(1e14 - (2 pi 1e6)^2)
        assert!(kz.re.abs() < 1e-6);
        assert_relative_eq!(kz.im, 7_779_561.838_281_291, max_relative = 1e-12);
    }

    #[test]
    fn kz_lossy_gaas_normal_incidence() {
        let lp = 500e-9;
        let m = Medium {
            epsilon: Complex64::new(17.63, 3.83),
        };
        let kz = kz(TransverseWaveVector::ZERO, m, omega_from_wavelength(lp));
        let k0 = 2.0 * PI / lp;
        assert_relative_eq!(kz.re / k0, 4.223_222_999_904_21, max_relative = 1e-12);
        assert_relative_eq!(kz.im / k0, 0.453_445_153_155_169_8, max_relative = 1e-12);
    }

    #[test]
    fn kz_branch_on_negative_real_axis_with_signed_zero() {
        let z = Complex64::new(-4.0, -0.0);
        let r = upper_sqrt(z);
        assert_eq!(r, Complex64::new(0.0, 2.0));
    }

    #[test]
    fn triad_along_kx() {
        let m = Medium::real(2.25);
        let q = TransverseWaveVector::new(3e6, 0.0);
        let t = polarization_triad(q, m, omega());
        assert_eq!(t.s_hat, [0.0, 1.0, 0.0]);
        let k = t.k;
        assert!((t.p_up[0] + t.kz / k).norm() < 1e-15);
        assert!(t.p_up[1].norm() < 1e-15);
        assert!((t.p_up[2] - 3e6 / k).norm() < 1e-15);
    }

    #[test]
    fn triad_at_normal_incidence_uses_kx_axis_limit() {
        let m = Medium::real(4.0);
        let t = polarization_triad(TransverseWaveVector::ZERO, m, omega());
        assert_eq!(t.s_hat, [0.0, 1.0, 0.0]);
        assert!((t.p_up[0] + 1.0).norm() < 1e-15);
        assert!((t.p_down[0] - 1.0).norm() < 1e-15);
        assert!(t.p_up[2].norm() < 1e-15);
    }

    #[test]
    fn triad_limit_is_continuous_along_kx_axis() {
        let m = Medium::real(3.0);
        let at0 = polarization_triad(TransverseWaveVector::ZERO, m, omega());
        let near = polarization_triad(TransverseWaveVector::new(1e-3, 0.0), m, omega());
        for c in 0..3 {
            assert!((at0.p_up[c] - near.p_up[c]).norm() < 1e-9);
        }
    }

    #[test]
    fn fresnel_normal_incidence_index_two() {
        let f = fresnel(Medium::real(1.0), Medium::real(4.0), TransverseWaveVector::ZERO, omega()).unwrap();
        assert_relative_eq!(f.r_s.re, -1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(f.t_s.re, 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(f.r_p.re, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn fresnel_matched_media() {
        let m = Medium {
            epsilon: Complex64::new(5.0, 0.7),
        };
        let f = fresnel(m, m, TransverseWaveVector::new(1e6, -2e6), omega()).unwrap();
        assert!(f.r_s.norm() < 1e-15 && f.r_p.norm() < 1e-15);
        assert!((f.t_s - 1.0).norm() < 1e-15 && (f.t_p - 1.0).norm() < 1e-15);
    }

    #[test]
    fn fresnel_reports_plasmon_pole() {
        // eps_j = -eps_i with q chosen so kzi eps_j + kzj eps_i = 0
        let i = Medium::real(1.0);
        let j = Medium {
            epsilon: Complex64::new(-2.0, 0.0),
        };
        let k0 = omega() / SPEED_OF_LIGHT;
        // surface plasmon: q = k0 sqrt(ei ej / (ei + ej)) = k0 sqrt(2)
        let q = TransverseWaveVector::new(k0 * 2f64.sqrt(), 0.0);
        // bypass the passive-medium constructor on purpose
        assert!(matches!(fresnel(i, j, q, omega()), Err(Error::InterfacePole { .. })));
    }

    #[test]
    fn medium_rejects_gain() {
        assert!(Medium::new(Complex64::new(2.0, -0.1)).is_err());
        assert!(Medium::new(Complex64::new(2.0, 0.1)).is_ok());
    }

    #[test]
    fn triad_vectors_are_transverse_and_normalized_evanescent() {
        let m = Medium::real(1.0);
        let q = TransverseWaveVector::new(9e6, 4e6);
        let t = polarization_triad(q, m, omega());
        assert!(t.kz.im > 0.0);
        let kp = t.k_vec(q, true);
        assert!(dot(&t.p_up, &kp).norm() < 1e-12 * t.k.norm());
        assert!((dot(&t.p_up, &t.p_up) - 1.0).norm() < 1e-12);
    }
}
