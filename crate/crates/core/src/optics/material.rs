//! Built-in permittivity tables and user-supplied dispersion files.
//!
//! Tables interpolate linearly in wavelength. Outside the tabulated range
//! the nearest endpoint is returned and the lookup is flagged as
//! extrapolated. A single-row table is a wavelength-independent constant.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use super::Medium;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    wavelengths: Vec<f64>,
    epsilon: Vec<Complex64>,
}

/// Result of a permittivity lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookup {
    pub medium: Medium,
    pub extrapolated: bool,
}

impl DispersionTable {
    pub fn new(rows: Vec<(f64, Complex64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dispersion("table has no rows".into()));
        }
        for w in rows.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Dispersion(format!(
                    "wavelengths must be strictly increasing ({:e} follows {:e})",
                    w[1].0, w[0].0
                )));
            }
        }
        for &(l, e) in &rows {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Dispersion(format!("invalid wavelength {l:e}")));
            }
            Medium::new(e).map_err(|err| Error::Dispersion(err.to_string()))?;
        }
        let (wavelengths, epsilon) = rows.into_iter().unzip();
        Ok(Self {
            wavelengths,
            epsilon,
        })
    }

    pub fn constant(epsilon: Complex64) -> Self {
        Self {
            wavelengths: vec![1.0],
            epsilon: vec![epsilon],
        }
    }

    /// Parses `wavelength_m eps_real [eps_imag]` rows; `#` starts a comment.
    /// Columns may be separated by whitespace or commas.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(Error::Dispersion(format!(
                    "line {}: expected 2 or 3 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Dispersion(format!("line {}: bad number `{s}`", lineno + 1)))
            };
            let lambda = num(cols[0])?;
            let re = num(cols[1])?;
            let im = if cols.len() == 3 { num(cols[2])? } else { 0.0 };
            rows.push((lambda, Complex64::new(re, im)));
        }
        Self::new(rows)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Dispersion(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn eval(&self, wavelength: f64) -> Lookup {
        let n = self.wavelengths.len();
        if n == 1 {
            return Lookup {
                medium: Medium {
                    epsilon: self.epsilon[0],
                },
                extrapolated: false,
            };
        }
        let (first, last) = (self.wavelengths[0], self.wavelengths[n - 1]);
        if wavelength <= first || wavelength >= last {
            let idx = if wavelength <= first { 0 } else { n - 1 };
            let exact = wavelength == first || wavelength == last;
            return Lookup {
                medium: Medium {
                    epsilon: self.epsilon[idx],
                },
                extrapolated: !exact,
            };
        }
        let hi = self.wavelengths.partition_point(|&l| l <= wavelength);
        let lo = hi - 1;
        let t = (wavelength - self.wavelengths[lo]) / (self.wavelengths[hi] - self.wavelengths[lo]);
        Lookup {
            medium: Medium {
                epsilon: self.epsilon[lo] * (1.0 - t) + self.epsilon[hi] * t,
            },
            extrapolated: false,
        }
    }
}

/// Named permittivity tables. Names are matched case-insensitively.
#[derive(Debug, Clone, Default)]
pub struct MaterialLibrary {
    tables: BTreeMap<String, DispersionTable>,
}

impl MaterialLibrary {
    pub fn empty() -> Self {
        Self::default()
    }

    /// GaAs, SiO2 at 500 nm and 1 µm, plus air/vacuum.
    pub fn builtin() -> Self {
        let mut lib = Self::default();
        let c = Complex64::new;
        lib.insert(
            "gaas",
            DispersionTable::new(vec![(500e-9, c(17.63, 3.83)), (1000e-9, c(12.06, 0.0))]).unwrap(),
        );
        lib.insert(
            "sio2",
            DispersionTable::new(vec![(500e-9, c(2.14, 0.0)), (1000e-9, c(2.10, 0.0))]).unwrap(),
        );
        lib.insert("air", DispersionTable::constant(c(1.0, 0.0)));
        lib.insert("vacuum", DispersionTable::constant(c(1.0, 0.0)));
        lib
    }

    pub fn insert(&mut self, name: &str, table: DispersionTable) {
        self.tables.insert(name.to_ascii_lowercase(), table);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tables.contains_key(&name.to_ascii_lowercase())
    }

    pub fn lookup(&self, name: &str, wavelength: f64) -> Result<Lookup> {
        self.tables
            .get(&name.to_ascii_lowercase())
            .map(|t| t.eval(wavelength))
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }
}

/// Looks a material up in the built-in table.
pub fn material_lookup(name: &str, wavelength: f64) -> Result<Lookup> {
    MaterialLibrary::builtin().lookup(name, wavelength)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_constants() {
        let g = material_lookup("GaAs", 500e-9).unwrap();
        assert_eq!(g.medium.epsilon, Complex64::new(17.63, 3.83));
        assert!(!g.extrapolated);
        let s = material_lookup("SiO2", 500e-9).unwrap();
        assert_eq!(s.medium.epsilon, Complex64::new(2.14, 0.0));
        for l in [200e-9, 1e-6, 10e-6] {
            let a = material_lookup("air", l).unwrap();
            assert_eq!(a.medium.epsilon, Complex64::new(1.0, 0.0));
            assert!(!a.extrapolated);
        }
    }

    #[test]
    fn interpolates_linearly() {
        let g = material_lookup("gaas", 750e-9).unwrap();
        assert!((g.medium.epsilon - Complex64::new(14.845, 1.915)).norm() < 1e-12);
    }

    #[test]
    fn clamps_and_flags_outside_range() {
        let g = material_lookup("GaAs", 1.5e-6).unwrap();
        assert_eq!(g.medium.epsilon, Complex64::new(12.06, 0.0));
        assert!(g.extrapolated);
        let g = material_lookup("GaAs", 400e-9).unwrap();
        assert_eq!(g.medium.epsilon, Complex64::new(17.63, 3.83));
        assert!(g.extrapolated);
    }

    #[test]
    fn unknown_material() {
        assert_eq!(
            material_lookup("unobtainium", 1e-6),
            Err(Error::UnknownMaterial("unobtainium".into()))
        );
    }

    #[test]
    fn parses_dispersion_file() {
        let text = "# lambda eps_re eps_im\n4e-7 3.0\n\n6e-7, 2.0, 0.5 # trailing\n";
        let t = DispersionTable::parse(text).unwrap();
        let l = t.eval(5e-7);
        assert!((l.medium.epsilon - Complex64::new(2.5, 0.25)).norm() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_and_malformed_files() {
        assert!(DispersionTable::parse("6e-7 2\n4e-7 3\n").is_err());
        assert!(DispersionTable::parse("6e-7 2\n6e-7 3\n").is_err());
        assert!(DispersionTable::parse("6e-7\n").is_err());
        assert!(DispersionTable::parse("6e-7 x\n").is_err());
        assert!(DispersionTable::parse("6e-7 2 -1\n").is_err());
        assert!(DispersionTable::parse("# nothing\n").is_err());
    }
}
