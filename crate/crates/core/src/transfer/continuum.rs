use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{bracket, Field, Lattice, Representation};

/// A function on the torus, represented by its Fourier coefficients
/// `u_hat(k) = int u e^{-ikx} dx` for `|k| <= K_ref = M_ref/2 - 1`.
///
/// The fine lattice with `M_ref` sites per half period carries the samples;
/// because `4 K_ref < 2 M_ref`, grid sums of `|u|^2` and `|u|^4` are exact
/// integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumField {
    coeffs: Field,
    bandlimit: usize,
}

impl ContinuumField {
    fn bandlimit_of(fine: Lattice) -> usize {
        (fine.m() / 2).saturating_sub(1)
    }

    pub fn zeros(fine: Lattice) -> Self {
        Self {
            coeffs: Field::zeros(fine, Representation::Frequency),
            bandlimit: Self::bandlimit_of(fine),
        }
    }

    /// `u_hat(k) = c(k)` for `|k| <= K_ref`; higher modes are dropped.
    pub fn from_coefficients(fine: Lattice, c: impl Fn(i64) -> Complex64) -> Self {
        let kmax = Self::bandlimit_of(fine) as i64;
        let coeffs = Field::from_coefficients(fine, |k| {
            if k.abs() <= kmax {
                c(k)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self {
            coeffs,
            bandlimit: kmax as usize,
        }
    }

    /// Finite Fourier series; a mode beyond the bandlimit is a resolution error.
    pub fn from_modes(fine: Lattice, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut u = Self::zeros(fine);
        for &(k, c) in modes {
            if k.unsigned_abs() as usize > u.bandlimit {
                return Err(Error::Resolution {
                    k,
                    bandlimit: u.bandlimit,
                });
            }
            let slot = fine.slot(k);
            u.coeffs.values_mut()[slot] += c;
        }
        Ok(u)
    }

    /// Samples `f` on the fine grid and truncates to the bandlimit.
    pub fn from_fn(fine: Lattice, f: impl Fn(f64) -> Complex64) -> Self {
        Self::from_field(&Field::from_fn(fine, f))
    }

    /// Truncation of a fine-grid field to the bandlimit.
    pub fn from_field(f: &Field) -> Self {
        let mut coeffs = f.to_frequency();
        let l = coeffs.lattice();
        let kmax = Self::bandlimit_of(l) as i64;
        for (k, v) in l.frequencies().zip(coeffs.values_mut()) {
            if k.abs() > kmax {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        Self {
            coeffs,
            bandlimit: kmax as usize,
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.coeffs.lattice()
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    /// `u_hat(k)`, zero outside the bandlimit.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.bandlimit {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs.values()[self.lattice().slot(k)]
        }
    }

    /// Nonzero-range modes `(k, u_hat(k))`, `|k| <= K_ref`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let kmax = self.bandlimit as i64;
        (-kmax..=kmax).map(move |k| (k, self.coefficient(k)))
    }

    /// Coefficients as a frequency field on the fine lattice.
    pub fn spectrum(&self) -> &Field {
        &self.coeffs
    }

    /// Samples on the fine grid.
    pub fn to_physical(&self) -> Field {
        self.coeffs.to_physical()
    }

    /// `u(x) = (2 pi)^{-1} sum_k u_hat(k) e^{ikx}` by direct summation.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let kmax = self.bandlimit as i64;
        let z = Complex64::from_polar(1.0, x);
        let mut p = Complex64::from_polar(1.0, -(kmax as f64) * x);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -kmax..=kmax {
            acc += self.coefficient(k) * p;
            p *= z;
        }
        acc / (2.0 * PI)
    }

    /// `||u||_{H^s(T)}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .modes()
            .map(|(k, c)| bracket(k as f64).powf(2.0 * s) * c.norm_sqr())
            .sum();
        (sum / (2.0 * PI)).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// Maximum modulus over the fine grid.
    pub fn sup_norm(&self) -> f64 {
        self.to_physical().sup_norm()
    }

    /// `||u - v||_{L^2(T)}`; the fields may live on different fine grids.
    pub fn distance(&self, other: &ContinuumField) -> f64 {
        let kmax = self.bandlimit.max(other.bandlimit) as i64;
        let sum: f64 = (-kmax..=kmax)
            .map(|k| (self.coefficient(k) - other.coefficient(k)).norm_sqr())
            .sum();
        (sum / (2.0 * PI)).sqrt()
    }

    /// The same function on another fine grid (zero padding or truncation).
    pub fn resample(&self, fine: Lattice) -> ContinuumField {
        ContinuumField::from_coefficients(fine, |k| self.coefficient(k))
    }

    /// Multiplies each coefficient by `m(k)`.
    pub fn apply_multiplier(&self, m: impl Fn(i64) -> Complex64) -> ContinuumField {
        let fine = self.lattice();
        ContinuumField::from_coefficients(fine, |k| self.coefficient(k) * m(k))
    }

    pub fn scale(&self, c: Complex64) -> ContinuumField {
        self.apply_multiplier(|_| c)
    }
}
