use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::transform::{forward_in_place, inverse_in_place};
use super::Lattice;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// Values at sites `x_j`, `j = -M..M`.
    Physical,
    /// Values of `F_h f(k)`, `k = -M..M` (unnormalized: the `h` and `(2 pi)^{-1}`
    /// factors are applied at the transform boundary).
    Frequency,
}

/// A complex function on the lattice or on its dual, tagged with its representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    lattice: Lattice,
    values: Vec<Complex64>,
    repr: Representation,
}

impl Field {
    pub fn new(lattice: Lattice, values: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::IncompatibleGrids(format!(
                "{} values for a lattice with {} sites",
                values.len(),
                lattice.len()
            )));
        }
        Ok(Self {
            lattice,
            values,
            repr,
        })
    }

    pub fn physical(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        Self::new(lattice, values, Representation::Physical)
    }

    pub fn frequency(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        Self::new(lattice, values, Representation::Frequency)
    }

    pub fn zeros(lattice: Lattice, repr: Representation) -> Self {
        Self {
            lattice,
            values: vec![Complex64::new(0.0, 0.0); lattice.len()],
            repr,
        }
    }

    /// Samples `f(x_j)` at every site.
    pub fn from_fn(lattice: Lattice, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            lattice,
            values: lattice.sites().map(f).collect(),
            repr: Representation::Physical,
        }
    }

    /// Frequency-side field with `F_h f(k) = g(k)`.
    pub fn from_coefficients(lattice: Lattice, g: impl Fn(i64) -> Complex64) -> Self {
        Self {
            lattice,
            values: lattice.frequencies().map(g).collect(),
            repr: Representation::Frequency,
        }
    }

    /// `amplitude * e^{i n x}`, with `n` taken modulo `2M`.
    pub fn plane_wave(lattice: Lattice, n: i64, amplitude: Complex64) -> Self {
        Self::from_fn(lattice, |x| amplitude * Complex64::from_polar(1.0, n as f64 * x))
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            Err(Error::Representation {
                expected: repr,
                found: self.repr,
            })
        }
    }

    /// `F_h f`; the field must be in physical representation.
    pub fn forward_dft(&self) -> Result<Field> {
        self.expect(Representation::Physical)?;
        Ok(self.clone().into_frequency())
    }

    /// `F_h^{-1} g`; the field must be in frequency representation.
    pub fn inverse_dft(&self) -> Result<Field> {
        self.expect(Representation::Frequency)?;
        Ok(self.clone().into_physical())
    }

    /// Converts to frequency representation (no-op if already there).
    pub fn into_frequency(mut self) -> Field {
        if self.repr == Representation::Physical {
            forward_in_place(self.lattice, &mut self.values);
            self.repr = Representation::Frequency;
        }
        self
    }

    /// Converts to physical representation (no-op if already there).
    pub fn into_physical(mut self) -> Field {
        if self.repr == Representation::Frequency {
            inverse_in_place(self.lattice, &mut self.values);
            self.repr = Representation::Physical;
        }
        self
    }

    pub fn to_frequency(&self) -> Field {
        self.clone().into_frequency()
    }

    pub fn to_physical(&self) -> Field {
        self.clone().into_physical()
    }

    /// `F_h f(k)` for a frequency field; `k` is wrapped into the dual range.
    pub fn coefficient(&self, k: i64) -> Result<Complex64> {
        self.expect(Representation::Frequency)?;
        Ok(self.values[self.lattice.slot(k)])
    }

    /// Value at site index `j` for a physical field.
    pub fn at_site(&self, j: i64) -> Result<Complex64> {
        self.expect(Representation::Physical)?;
        Ok(self.values[self.lattice.slot(j)])
    }

    /// Pointwise map preserving the representation.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            lattice: self.lattice,
            values: self.values.iter().map(|&v| f(v)).collect(),
            repr: self.repr,
        }
    }

    /// Multiplies frequency content by `m(k)`; returns a field in the
    /// representation of `self`.
    pub fn apply_multiplier(&self, m: impl Fn(i64) -> Complex64) -> Field {
        let repr = self.repr;
        let mut g = self.to_frequency();
        for (k, v) in self.lattice.frequencies().zip(g.values.iter_mut()) {
            *v *= m(k);
        }
        match repr {
            Representation::Physical => g.into_physical(),
            Representation::Frequency => g,
        }
    }

    /// `self - other`, both taken to the representation of `self`.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        if self.lattice != other.lattice {
            return Err(Error::IncompatibleGrids(format!(
                "M = {} vs M = {}",
                self.lattice.m(),
                other.lattice.m()
            )));
        }
        let other = match self.repr {
            Representation::Physical => other.to_physical(),
            Representation::Frequency => other.to_frequency(),
        };
        Ok(Field {
            lattice: self.lattice,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            repr: self.repr,
        })
    }

    /// `(1 / 2 pi) * sum_k |F_h f(k)|^2`, i.e. the squared `L^2_h` norm via Parseval.
    pub fn spectral_mass(&self) -> f64 {
        let g = self.to_frequency();
        g.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / (2.0 * PI)
    }

    pub fn sup_norm(&self) -> f64 {
        let f = self.to_physical();
        f.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::transform::{forward_direct, inverse_direct};
    use crate::random::random_field;

    fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn constant_transforms_to_zero_mode() {
        let l = Lattice::new(8).unwrap();
        let f = Field::from_fn(l, |_| Complex64::new(1.0, 0.0));
        let g = f.forward_dft().unwrap();
        for k in l.frequencies() {
            let expected = if k == 0 { 2.0 * PI } else { 0.0 };
            assert!((g.coefficient(k).unwrap() - expected).norm() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn plane_wave_transforms_to_kronecker_delta() {
        for m in [5usize, 8, 12] {
            let l = Lattice::new(m).unwrap();
            for n in -(m as i64) + 1..m as i64 {
                let g = Field::plane_wave(l, n, Complex64::new(1.0, 0.0))
                    .forward_dft()
                    .unwrap();
                for k in l.frequencies() {
                    let expected = if k == n { 2.0 * PI } else { 0.0 };
                    assert!((g.coefficient(k).unwrap() - expected).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fast_path_matches_direct_sum() {
        for m in [4usize, 5, 16, 50] {
            let l = Lattice::new(m).unwrap();
            let f = random_field(l, 7 + m as u64);
            let fast = f.forward_dft().unwrap();
            let direct = forward_direct(l, f.values());
            assert!(rel_err(fast.values(), &direct) < 1e-13);
            let back = inverse_direct(l, fast.values());
            assert!(rel_err(&back, f.values()) < 1e-13);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for m in [3usize, 16, 64, 50] {
            let l = Lattice::new(m).unwrap();
            let f = random_field(l, m as u64);
            let back = f.forward_dft().unwrap().inverse_dft().unwrap();
            let tol = 10.0 * f64::EPSILON * l.len() as f64;
            assert!(rel_err(back.values(), f.values()) < tol);
            let mass_phys: f64 = l.h() * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
            assert!((f.spectral_mass() - mass_phys).abs() / mass_phys < tol);
        }
    }

    #[test]
    fn representation_mismatch_is_an_error() {
        let l = Lattice::new(4).unwrap();
        let f = Field::zeros(l, Representation::Frequency);
        assert!(matches!(f.forward_dft(), Err(Error::Representation { .. })));
        let p = Field::zeros(l, Representation::Physical);
        assert!(p.inverse_dft().is_err());
        assert!(Field::physical(l, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }
}
