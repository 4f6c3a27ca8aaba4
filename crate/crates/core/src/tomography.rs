//! Polarization tomography of the detected pair.
//!
//! Basis order of two-photon vectors and density matrices is
//! `{HH, HV, VH, VV}` with the signal first.

use std::sync::OnceLock;

use nalgebra::{Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{map_grid, Axis, ScanGrid};
use crate::error::{Error, Result};
use crate::spdc::{Biphoton, JointSetting, PolState};

pub use crate::spdc::PolState as PolarizationState2;

const TOMOGRAPHY_SET: [(PolState, PolState); 16] = {
    use PolState::*;
    [
        (H, H),
        (H, V),
        (V, V),
        (V, H),
        (R, H),
        (R, V),
        (D, V),
        (D, D),
        (R, D),
        (H, D),
        (V, D),
        (V, L),
        (H, L),
        (R, L),
        (D, R),
        (D, H),
    ]
};

/// The sixteen analyzer settings, in measurement order.
pub fn tomographic_states() -> [(PolState, PolState); 16] {
    TOMOGRAPHY_SET
}

/// `|a> (x) |b>` in the `{HH, HV, VH, VV}` basis.
pub fn product_state(a: [Complex64; 2], b: [Complex64; 2]) -> Vector4<Complex64> {
    Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
}

/// Two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(pub Matrix4<Complex64>);

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let rho = Self(m);
        let min = rho.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-8 {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// `|psi><psi|` for a non-zero vector, normalized.
    pub fn pure(psi: Vector4<Complex64>) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::UndefinedState);
        }
        let v = psi / Complex64::from(n);
        Ok(Self(v * v.adjoint()))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let hermitian = (self.0 + self.0.adjoint()) * Complex64::from(0.5);
        let mut ev: Vec<f64> = hermitian.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Reduced state of the signal photon.
    pub fn signal_marginal(&self) -> [[Complex64; 2]; 2] {
        std::array::from_fn(|j| std::array::from_fn(|l| (0..2).map(|k| self.0[(2 * j + k, 2 * l + k)]).sum()))
    }

    /// Reduced state of the idler photon.
    pub fn idler_marginal(&self) -> [[Complex64; 2]; 2] {
        std::array::from_fn(|k| std::array::from_fn(|m| (0..2).map(|j| self.0[(2 * j + k, 2 * j + m)]).sum()))
    }

    /// Probability of the projection onto `|psi>`.
    pub fn expectation(&self, psi: &Vector4<Complex64>) -> f64 {
        (psi.adjoint() * self.0 * psi)[(0, 0)].re
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> [[[f64; 2]; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| [self.0[(i, j)].re, self.0[(i, j)].im]))
    }

    pub fn from_pairs(pairs: &[[[f64; 2]; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| Complex64::new(pairs[i][j][0], pairs[i][j][1])))
    }
}

impl Serialize for DensityMatrix4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix4 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = <[[[f64; 2]; 4]; 4]>::deserialize(d)?;
        Self::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// Hermitian Pauli matrices `1, X, Y, Z`.
fn pauli(i: usize) -> [[Complex64; 2]; 2] {
    let (o, l, j) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    match i {
        0 => [[l, o], [o, l]],
        1 => [[o, l], [l, o]],
        2 => [[o, -j], [j, o]],
        _ => [[l, o], [o, -l]],
    }
}

fn pauli_product(m: usize) -> Matrix4<Complex64> {
    let (a, b) = (pauli(m / 4), pauli(m % 4));
    Matrix4::from_fn(|r, c| a[r / 2][c / 2] * b[r % 2][c % 2])
}

fn analyzer_states() -> [Vector4<Complex64>; 16] {
    TOMOGRAPHY_SET.map(|(s, i)| product_state(s.amplitudes(), i.amplitudes()))
}

/// Inverse of `B[nu][m] = <psi_nu| sigma_m |psi_nu>`.
fn inversion_matrix() -> &'static SMatrix<f64, 16, 16> {
    static INV: OnceLock<SMatrix<f64, 16, 16>> = OnceLock::new();
    INV.get_or_init(|| {
        let states = analyzer_states();
        let b = SMatrix::<f64, 16, 16>::from_fn(|nu, m| {
            let psi = states[nu];
            (psi.adjoint() * pauli_product(m) * psi)[(0, 0)].re
        });
        b.try_inverse().expect("tomographic set is informationally complete")
    })
}

/// Sixteen projection rates in the order of [`tomographic_states`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyRecord {
    pub entries: Vec<(PolState, PolState, f64)>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    state_s: char,
    state_i: char,
    rate: f64,
}

impl TomographyRecord {
    pub fn new(rates: [f64; 16]) -> Self {
        Self {
            entries: TOMOGRAPHY_SET
                .iter()
                .zip(rates)
                .map(|(&(s, i), r)| (s, i, r))
                .collect(),
        }
    }

    /// Noiseless rates `<psi_nu| rho |psi_nu>`.
    pub fn synthetic(rho: &DensityMatrix4) -> Self {
        Self::new(analyzer_states().map(|psi| rho.expectation(&psi)))
    }

    /// Checks the state pairs and the sign of every rate.
    pub fn rates(&self) -> Result<[f64; 16]> {
        if self.entries.len() != 16 {
            return Err(Error::ReconstructionInconsistent(format!(
                "expected 16 projections, got {}",
                self.entries.len()
            )));
        }
        let mut out = [0.0; 16];
        for (k, (&(s, i, r), &(es, ei))) in self.entries.iter().zip(TOMOGRAPHY_SET.iter()).enumerate() {
            if (s, i) != (es, ei) {
                return Err(Error::ReconstructionInconsistent(format!(
                    "projection {k} is {}{}, expected {}{}",
                    s.label(),
                    i.label(),
                    es.label(),
                    ei.label()
                )));
            }
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::ReconstructionInconsistent(format!("projection {k} has rate {r}")));
            }
            out[k] = r;
        }
        Ok(out)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> std::result::Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        for &(s, i, r) in &self.entries {
            wr.serialize(CsvRow {
                state_s: s.label(),
                state_i: i.label(),
                rate: r,
            })?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> std::result::Result<Self, String> {
        let mut rd = csv::Reader::from_reader(r);
        let mut entries = Vec::new();
        for row in rd.deserialize::<CsvRow>() {
            let row = row.map_err(|e| e.to_string())?;
            let s = PolState::from_label(row.state_s).ok_or(format!("unknown state {}", row.state_s))?;
            let i = PolState::from_label(row.state_i).ok_or(format!("unknown state {}", row.state_i))?;
            entries.push((s, i, row.rate));
        }
        Ok(Self { entries })
    }
}

/// Projection rate of the detected pair onto analyzer states.
pub fn projection_rate(setting: &JointSetting, pair: (PolState, PolState)) -> Result<f64> {
    Ok(Biphoton::evaluate(setting)?.projection_rate(pair.0.amplitudes(), pair.1.amplitudes()))
}

pub fn measure(biphoton: &Biphoton) -> TomographyRecord {
    TomographyRecord::new(TOMOGRAPHY_SET.map(|(s, i)| biphoton.projection_rate(s.amplitudes(), i.amplitudes())))
}

pub fn tomography_record(setting: &JointSetting) -> Result<TomographyRecord> {
    Ok(measure(&Biphoton::evaluate(setting)?))
}

/// Linear inversion of the sixteen rates, normalized to unit trace.
pub fn reconstruct_rho(record: &TomographyRecord) -> Result<DensityMatrix4> {
    let rates = record.rates()?;
    let total: f64 = rates.iter().sum();
    if total == 0.0 {
        return Err(Error::UndefinedState);
    }
    let r = SVector::<f64, 16>::from_iterator(rates.iter().map(|v| v / total));
    let x = inversion_matrix() * r;
    let mut m = Matrix4::zeros();
    for (k, c) in x.iter().enumerate() {
        m += pauli_product(k) * Complex64::from(*c);
    }
    let tr = m.trace().re;
    if !(tr > 0.0) {
        return Err(Error::UndefinedState);
    }
    m /= Complex64::from(tr);
    DensityMatrix4::new(m).map_err(|e| Error::ReconstructionInconsistent(e.to_string()))
}

/// The pure polarization state of the detected pair.
pub fn rho_direct(setting: &JointSetting) -> Result<DensityMatrix4> {
    rho_from_biphoton(&Biphoton::evaluate(setting)?)
}

pub fn rho_from_biphoton(b: &Biphoton) -> Result<DensityMatrix4> {
    let a = b.amplitude_matrix();
    DensityMatrix4::pure(Vector4::new(a[0][0], a[0][1], a[1][0], a[1][1]))
}

fn marginal_k(m: &[[Complex64; 2]; 2]) -> f64 {
    let p: f64 = (0..2)
        .flat_map(|j| (0..2).map(move |k| (j, k)))
        .map(|(j, k)| (m[j][k] * m[k][j]).re)
        .sum();
    1.0 / p
}

/// `K = 1 / Tr(rho_s^2)`; for pure input both marginals must agree.
pub fn schmidt_number(rho: &DensityMatrix4) -> Result<f64> {
    let ks = marginal_k(&rho.signal_marginal());
    let ki = marginal_k(&rho.idler_marginal());
    if rho.purity() > 1.0 - 1e-8 && (ks - ki).abs() > 1e-8 {
        return Err(Error::InvalidDensityMatrix(format!(
            "marginal Schmidt numbers disagree: {ks} vs {ki}"
        )));
    }
    Ok(ks)
}

fn sqrt_psd(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let h = (m + m.adjoint()) * Complex64::from(0.5);
    let eig = h.symmetric_eigen();
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|v| Complex64::from(v.max(0.0).sqrt())));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> f64 {
    let s = sqrt_psd(&rho.0);
    let inner = sqrt_psd(&(s * sigma.0 * s));
    inner.trace().re.powi(2)
}

/// `(|HV> - |VH>) / sqrt(2)`.
pub fn singlet() -> Vector4<Complex64> {
    let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    Vector4::new(Complex64::from(0.0), h, -h, Complex64::from(0.0))
}

/// Schmidt number and rate over the idler angles at a fixed signal detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtMap {
    /// `NaN` where the pair amplitude vanishes.
    pub schmidt: ScanGrid,
    pub rate: ScanGrid,
    /// `(theta_i, phi_i)` of the largest Schmidt number.
    pub argmax_schmidt: (f64, f64),
    /// `(theta_i, phi_i)` of the largest unpolarized rate.
    pub argmax_rate: (f64, f64),
}

pub fn schmidt_map(setting: &JointSetting, theta_i_axis: Axis, phi_i_axis: Axis) -> Result<SchmidtMap> {
    let axes = vec![theta_i_axis, phi_i_axis];
    let points = map_grid(&axes, |c| {
        let b = Biphoton::evaluate(&setting.with_idler_angles(c[0], c[1]))?;
        let k = match rho_from_biphoton(&b) {
            Ok(rho) => schmidt_number(&rho)?,
            Err(Error::UndefinedState) => f64::NAN,
            Err(e) => return Err(e),
        };
        Ok((k, b.unpolarized_rate()))
    })?;
    let schmidt = ScanGrid {
        axes: axes.clone(),
        values: points.iter().map(|p| p.0).collect(),
    };
    let pairs = ScanGrid {
        axes,
        values: points.iter().map(|p| p.1).collect(),
    };
    let finite = ScanGrid {
        axes: schmidt.axes.clone(),
        values: schmidt
            .values
            .iter()
            .map(|v| if v.is_nan() { f64::NEG_INFINITY } else { *v })
            .collect(),
    };
    let (ks, _) = finite.argmax();
    let (rs, _) = pairs.argmax();
    Ok(SchmidtMap {
        schmidt,
        rate: pairs,
        argmax_schmidt: (ks[0], ks[1]),
        argmax_rate: (rs[0], rs[1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(k: usize) -> Vector4<Complex64> {
        let mut v = Vector4::zeros();
        v[k] = Complex64::from(1.0);
        v
    }

    #[test]
    fn sixteen_states_in_order() {
        let s = tomographic_states();
        assert_eq!(s.len(), 16);
        assert_eq!(s[0], (PolState::H, PolState::H));
        assert_eq!(s[15], (PolState::D, PolState::H));
        for p in PolState::ALL {
            let a = p.amplitudes();
            assert!((a[0].norm_sqr() + a[1].norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn product_state_round_trip() {
        let rho = DensityMatrix4::pure(basis(1)).unwrap();
        let back = reconstruct_rho(&TomographyRecord::synthetic(&rho)).unwrap();
        assert!((back.0 - rho.0).iter().all(|c| c.norm() < 1e-10));
        assert!((schmidt_number(&back).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singlet_round_trip() {
        let rho = DensityMatrix4::pure(singlet()).unwrap();
        let back = reconstruct_rho(&TomographyRecord::synthetic(&rho)).unwrap();
        assert!((fidelity(&back, &rho) - 1.0).abs() < 1e-10);
        assert!((schmidt_number(&back).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_empty_record() {
        assert_eq!(reconstruct_rho(&TomographyRecord::new([0.0; 16])), Err(Error::UndefinedState));
    }

    #[test]
    fn rejects_reordered_record() {
        let mut rec = TomographyRecord::synthetic(&DensityMatrix4::pure(singlet()).unwrap());
        rec.entries.swap(0, 1);
        assert!(matches!(reconstruct_rho(&rec), Err(Error::ReconstructionInconsistent(_))));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Matrix4::<Complex64>::identity() * Complex64::from(0.25);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix4::new(m), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn csv_round_trip() {
        let rec = TomographyRecord::synthetic(&DensityMatrix4::pure(singlet()).unwrap());
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("state_s,state_i,rate\nH,H,"));
        assert_eq!(TomographyRecord::read_csv(&buf[..]).unwrap(), rec);
    }

    #[test]
    fn json_pairs_round_trip() {
        let rho = DensityMatrix4::pure(singlet()).unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix4 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
    }
}
