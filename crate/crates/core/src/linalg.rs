//! Fixed-size complex vector and matrix helpers.
//!
//! Dot products are unconjugated unless the name says otherwise; this is the
//! contraction used throughout the dyadic Green's function algebra.

use num_complex::Complex64;

pub type Vec3 = [Complex64; 3];
pub type Mat3 = [[Complex64; 3]; 3];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub const ZERO_VEC: Vec3 = [ZERO; 3];
pub const ZERO_MAT: Mat3 = [[ZERO; 3]; 3];

pub fn real_vec(v: [f64; 3]) -> Vec3 {
    [v[0].into(), v[1].into(), v[2].into()]
}

pub fn dot(a: &Vec3, b: &Vec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `sum_i conj(a_i) b_i`
pub fn cdot(a: &Vec3, b: &Vec3) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

pub fn norm_sqr(a: &Vec3) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

pub fn scale(a: &Vec3, c: Complex64) -> Vec3 {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn conj(a: &Vec3) -> Vec3 {
    [a[0].conj(), a[1].conj(), a[2].conj()]
}

/// Dyadic product `a b^T`.
pub fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
    let mut m = ZERO_MAT;
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i] * b[j];
        }
    }
    m
}

pub fn mat_scale(m: &Mat3, c: Complex64) -> Mat3 {
    let mut out = *m;
    out.iter_mut().flatten().for_each(|x| *x *= c);
    out
}

pub fn mat_add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for (o, x) in out.iter_mut().flatten().zip(b.iter().flatten()) {
        *o += x;
    }
    out
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = ZERO_MAT;
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    m
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut m = ZERO_MAT;
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[j][i];
        }
    }
    m
}

/// Row contraction `v^T M`.
pub fn left_mul(v: &Vec3, m: &Mat3) -> Vec3 {
    let mut out = ZERO_VEC;
    for (j, o) in out.iter_mut().enumerate() {
        *o = v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j];
    }
    out
}

/// Column contraction `M v`.
pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat_max_abs(m: &Mat3) -> f64 {
    m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (u, v) = (z.re, z.im);
    let eu_m1 = u.exp_m1();
    let half_sin = (0.5 * v).sin();
    Complex64::new(
        eu_m1 * v.cos() - 2.0 * half_sin * half_sin,
        u.exp() * v.sin(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_naive_for_moderate_arguments() {
        for z in [
            Complex64::new(0.3, -1.2),
            Complex64::new(-2.0, 4.0),
            Complex64::new(0.0, 0.5),
        ] {
            assert!((expm1(z) - (z.exp() - 1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn expm1_keeps_precision_near_zero() {
        let z = Complex64::new(1e-12, -3e-12);
        let r = expm1(z);
        // z + z^2/2 is exact to ~1e-36 here
        let series = z + z * z * 0.5;
        assert!((r - series).norm() / z.norm() < 1e-15);
    }

    #[test]
    fn outer_and_left_mul_agree() {
        let a = [ONE, I, Complex64::new(2.0, -1.0)];
        let b = [Complex64::new(0.5, 0.5), ZERO, ONE];
        let m = outer(&a, &b);
        let v = [ONE, ONE, I];
        let lhs = left_mul(&v, &m);
        let rhs = scale(&b, dot(&v, &a));
        for k in 0..3 {
            assert!((lhs[k] - rhs[k]).norm() < 1e-15);
        }
    }
}
