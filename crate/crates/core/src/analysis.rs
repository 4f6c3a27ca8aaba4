//! Scan drivers and derived observables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{omega_from_wavelength, LayerStack, Medium, Role, SPEED_OF_LIGHT};
use crate::spdc::{Biphoton, JointSetting};

/// Physical kind of an axis; angles are stored in radians and lengths in
/// meters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    Angle,
    Length,
    Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub kind: AxisKind,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, kind: AxisKind, start: f64, stop: f64, count: usize) -> Result<Self> {
        let name = name.into();
        if count < 2 {
            return Err(Error::InvalidParameter {
                name: "axis.count",
                reason: format!("axis `{name}` needs at least 2 points, got {count}"),
            });
        }
        if !(start.is_finite() && stop.is_finite() && stop > start) {
            return Err(Error::InvalidParameter {
                name: "axis.range",
                reason: format!("axis `{name}` must be increasing, got [{start}, {stop}]"),
            });
        }
        Ok(Self {
            name,
            kind,
            start,
            stop,
            count,
        })
    }

    /// Angle axis given in degrees.
    pub fn degrees(name: impl Into<String>, start: f64, stop: f64, count: usize) -> Result<Self> {
        Self::new(name, AxisKind::Angle, start.to_radians(), stop.to_radians(), count)
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

/// Rates on a one- or two-dimensional grid, row-major with the first axis
/// varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub axes: Vec<Axis>,
    pub values: Vec<f64>,
}

impl ScanGrid {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        let mut flat = 0;
        for (a, &i) in self.axes.iter().zip(index) {
            flat = flat * a.count + i;
        }
        self.values[flat]
    }

    /// Row `i` of a 2D grid, along the second axis.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.axes[1].count;
        &self.values[i * n..(i + 1) * n]
    }

    /// Column `j` of a 2D grid, along the first axis.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let n = self.axes[1].count;
        (0..self.axes[0].count).map(|i| self.values[i * n + j]).collect()
    }

    /// Grid coordinates and value of the global maximum.
    pub fn argmax(&self) -> (Vec<f64>, f64) {
        let (flat, &value) = self
            .values
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |best, cur| if *cur.1 > *best.1 { cur } else { best });
        let mut rest = flat;
        let mut coords = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            coords[k] = a.value(rest % a.count);
            rest /= a.count;
        }
        (coords, value)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Copy scaled so that the maximum is one; an all-zero grid is unchanged.
    pub fn normalized(&self) -> Self {
        let m = self.max();
        let mut out = self.clone();
        if m > 0.0 {
            out.values.iter_mut().for_each(|v| *v /= m);
        }
        out
    }
}

/// Evaluates `f` at every grid point in parallel, in row-major order.
pub fn map_grid<T, F>(axes: &[Axis], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T> + Sync,
{
    let total: usize = axes.iter().map(|a| a.count).product();
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rest = flat;
            let mut coords = vec![0.0; axes.len()];
            for (k, a) in axes.iter().enumerate().rev() {
                coords[k] = a.value(rest % a.count);
                rest /= a.count;
            }
            f(&coords)
        })
        .collect()
}

pub fn evaluate_grid<F>(axes: Vec<Axis>, f: F) -> Result<ScanGrid>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let values = map_grid(&axes, f)?;
    Ok(ScanGrid { axes, values })
}

fn rate(setting: &JointSetting) -> Result<f64> {
    Ok(Biphoton::evaluate(setting)?.unpolarized_rate())
}

/// Unpolarized rate with the idler slaved to `theta_i = theta_s`,
/// `phi_i = phi_s + pi`.
pub fn phi_symmetric_scan(base: &JointSetting, theta_axis: Axis, phi_axis: Axis) -> Result<ScanGrid> {
    evaluate_grid(vec![theta_axis, phi_axis], |c| {
        let (t, p) = (c[0], c[1]);
        rate(&base.with_signal_angles(t, p).with_idler_angles(t, p + std::f64::consts::PI))
    })
}

/// Unpolarized rate versus slab thickness in the phi-symmetric geometry.
pub fn thickness_scan(base: &JointSetting, thickness_axis: Axis, theta: f64, phi: f64) -> Result<ScanGrid> {
    let s = base
        .with_signal_angles(theta, phi)
        .with_idler_angles(theta, phi + std::f64::consts::PI);
    evaluate_grid(vec![thickness_axis], |c| rate(&s.with_thickness(c[0])))
}

/// Unpolarized rate versus the idler polar angle in the opposite half-plane.
pub fn idler_scan(base: &JointSetting, theta_s: f64, phi_s: f64, theta_i_axis: Axis) -> Result<ScanGrid> {
    let s = base.with_signal_angles(theta_s, phi_s);
    evaluate_grid(vec![theta_i_axis], |c| {
        rate(&s.with_idler_angles(c[0], phi_s + std::f64::consts::PI))
    })
}

/// Unpolarized rate over `(theta_s, theta_i)` in the plane `phi_s = phi`,
/// `phi_i = phi + pi`.
pub fn theta_map(base: &JointSetting, theta_s_axis: Axis, theta_i_axis: Axis, phi: f64) -> Result<ScanGrid> {
    evaluate_grid(vec![theta_s_axis, theta_i_axis], |c| {
        rate(&base.with_signal_angles(c[0], phi).with_idler_angles(c[1], phi + std::f64::consts::PI))
    })
}

/// Extracted features of a one-dimensional profile, in the axis' units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub peak_location: Option<f64>,
    pub peak_value: Option<f64>,
    pub fwhm: Option<f64>,
    pub oscillation_period: Option<f64>,
}

impl ScanSummary {
    /// Peak always; FWHM and period where they can be extracted.
    pub fn of(x: &[f64], y: &[f64], skip: f64) -> Self {
        let (loc, val) = peak(x, y);
        Self {
            peak_location: Some(loc),
            peak_value: Some(val),
            fwhm: fwhm(x, y).ok(),
            oscillation_period: oscillation_period(x, y, skip),
        }
    }
}

/// Grid location and value of the global maximum (first one on ties).
pub fn peak(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mut best = 0;
    for (i, v) in y.iter().enumerate() {
        if *v > y[best] {
            best = i;
        }
    }
    (x[best], y[best])
}

/// Full width at half maximum by linear interpolation of the half-max
/// crossings nearest the global peak.
pub fn fwhm(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = y.len();
    if n < 3 || x.len() != n {
        return Err(Error::IncompleteProfile);
    }
    let (_, top) = peak(x, y);
    let ip = y.iter().position(|v| *v == top).unwrap_or(0);
    if ip == 0 || ip == n - 1 || top <= 0.0 {
        return Err(Error::IncompleteProfile);
    }
    let half = 0.5 * top;
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let left = (1..=ip).rev().find(|&i| y[i - 1] < half).map(|i| cross(i - 1, i));
    let right = (ip..n - 1).find(|&i| y[i + 1] < half).map(|i| cross(i, i + 1));
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::IncompleteProfile),
    }
}

/// Mean spacing between local maxima that exceed 20% of the global maximum,
/// ignoring maxima with `x < x[0] + skip`. `None` with fewer than two maxima.
pub fn oscillation_period(x: &[f64], y: &[f64], skip: f64) -> Option<f64> {
    let top = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let start = x.first()? + skip;
    let maxima: Vec<f64> = (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.2 * top && x[i] >= start)
        .map(|i| x[i])
        .collect();
    if maxima.len() < 2 {
        return None;
    }
    Some((maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64)
}

/// Refraction angle from `n_from` into `n_to`.
pub fn snell(n_from: f64, n_to: f64, theta: f64) -> Result<f64> {
    let s = n_from / n_to * theta.sin();
    if s.abs() > 1.0 {
        return Err(Error::InvalidAngle(theta));
    }
    Ok(s.asin())
}

/// Thickness period of constructive interference for the signal,
/// `lambda_s / (2 n2s cos(theta_2s))`, from the detection angle in medium 1.
pub fn opd_period(stack: &LayerStack, theta_1: f64, lambda_s: f64) -> Result<f64> {
    let n1 = stack.medium1.get(Role::Signal).index().re;
    let n2 = stack.medium2.get(Role::Signal).index().re;
    let theta_2 = snell(n1, n2, theta_1)?;
    Ok(lambda_s / (2.0 * n2 * theta_2.cos()))
}

/// Pump penetration depth `1 / Im(k2p)`; infinite for a lossless slab.
pub fn decay_length(eps2_pump: num_complex::Complex64, lambda_p: f64) -> Result<f64> {
    let m = Medium::new(eps2_pump)?;
    let k2 = m.k(omega_from_wavelength(lambda_p)).im;
    Ok(if k2 > 0.0 { 1.0 / k2 } else { f64::INFINITY })
}

/// `pi / |Re(k2p) - k2s cos(theta_2s) - k2i cos(theta_2i)|` for normal pump
/// incidence, with internal angles; infinite under perfect phase matching.
pub fn coherence_length(stack: &LayerStack, theta_2s: f64, theta_2i: f64, omega_s: f64, omega_i: f64) -> f64 {
    let k = |role: Role, omega: f64| stack.medium2.get(role).index().re * omega / SPEED_OF_LIGHT;
    let dk = k(Role::Pump, omega_s + omega_i)
        - k(Role::Signal, omega_s) * theta_2s.cos()
        - k(Role::Idler, omega_i) * theta_2i.cos();
    if dk == 0.0 {
        f64::INFINITY
    } else {
        std::f64::consts::PI / dk.abs()
    }
}

/// Idler polar angle from transverse phase matching,
/// `sin(theta_i) = sin(theta_s) n_s / (r n_i)`.
pub fn idler_angle(ratio: f64, theta_s: f64, n_s: f64, n_i: f64) -> Result<f64> {
    if !(ratio > 0.0) {
        return Err(Error::InvalidParameter {
            name: "ratio",
            reason: format!("must be positive, got {ratio}"),
        });
    }
    let s = theta_s.sin() * n_s / (ratio * n_i);
    if s.abs() > 1.0 {
        return Err(Error::NoPropagatingIdler(s));
    }
    Ok(s.asin())
}
