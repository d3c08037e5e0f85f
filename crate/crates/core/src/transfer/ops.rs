use std::f64::consts::PI;

use num_complex::Complex64;

use super::ContinuumField;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::spectral::{Field, Lattice, Representation};

/// `(e^{i theta} - 1) / (i theta)`, the symbol of a unit cell average, with value 1 at 0.
pub fn cell_average_factor(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        // Taylor: 1 + i t/2 - t^2/6 - i t^3/24
        let t2 = theta * theta;
        Complex64::new(1.0 - t2 / 6.0, theta / 2.0 - theta * t2 / 24.0)
    } else {
        (Complex64::from_polar(1.0, theta) - 1.0) / Complex64::new(0.0, theta)
    }
}

/// `P_h(k) = (sin(hk/2) / (hk/2))^2`, the symbol of piecewise-linear interpolation.
pub fn interpolation_multiplier(lattice: Lattice, k: i64) -> f64 {
    let z = 0.5 * lattice.h() * k as f64;
    if z == 0.0 {
        1.0
    } else {
        let s = z.sin() / z;
        s * s
    }
}

/// `sum_{q in Z} P_h(k + 2Mq)^2 = 1 - (2/3) sin^2(hk/2)`.
fn alias_energy(lattice: Lattice, k: i64) -> f64 {
    let s = (0.5 * lattice.h() * k as f64).sin();
    1.0 - 2.0 / 3.0 * s * s
}

fn require_refinement(coarse: Lattice, fine: Lattice) -> Result<()> {
    if fine.m() % coarse.m() != 0 {
        return Err(Error::IncompatibleGrids(format!(
            "fine M_ref = {} is not a multiple of coarse M = {}",
            fine.m(),
            coarse.m()
        )));
    }
    Ok(())
}

/// Cell averages `d_h f(x) = (1/h) int_x^{x+h} f` on `coarse`, in frequency representation.
///
/// Mode `k` of `f` lands on `k' = k mod 2M` with factor `(e^{ihk} - 1)/(ihk)`;
/// for `k' = 0` and `k != 0` that factor vanishes exactly and is skipped.
pub fn discretize_dh(f: &ContinuumField, coarse: Lattice) -> Result<Field> {
    require_refinement(coarse, f.lattice())?;
    let h = coarse.h();
    let mut out = Field::zeros(coarse, Representation::Frequency);
    for (k, c) in f.modes() {
        let kp = coarse.wrap_frequency(k);
        if kp == 0 && k != 0 {
            continue;
        }
        out.values_mut()[coarse.slot(kp)] += c * cell_average_factor(h * k as f64);
    }
    Ok(out)
}

/// A continuous piecewise-linear function with nodes on a coarse lattice,
/// sampled on a fine lattice that refines it.
///
/// This is not a [`ContinuumField`]: a piecewise-linear function has
/// Fourier content at every frequency, so it is kept with its exact
/// coefficients `P_h(k) F_h g(k mod 2M)` rather than truncated.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearInterpolant {
    nodes: Field,
    spectrum: Field,
    fine: Lattice,
    samples: Vec<Complex64>,
}

impl LinearInterpolant {
    pub fn nodes(&self) -> &Field {
        &self.nodes
    }

    pub fn fine_lattice(&self) -> Lattice {
        self.fine
    }

    /// Values at the fine-grid sites.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_field(&self) -> Field {
        Field::physical(self.fine, self.samples.clone()).expect("fine length")
    }

    /// Exact Fourier coefficient `int p_h g e^{-ikx} dx`, for any integer `k`.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let l = self.spectrum.lattice();
        self.spectrum.values()[l.slot(k)] * interpolation_multiplier(l, k)
    }

    /// Pointwise value at any real `x`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let l = self.nodes.lattice();
        let h = l.h();
        let s = x / h;
        let j = s.floor();
        let w = s - j;
        let v = self.nodes.values();
        let a = v[l.slot(j as i64)];
        let b = v[l.slot(j as i64 + 1)];
        a * (1.0 - w) + b * w
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Truncation to the fine bandlimit (lossy).
    pub fn to_continuum(&self) -> ContinuumField {
        ContinuumField::from_coefficients(self.fine, |k| self.coefficient(k))
    }
}

/// Piecewise-linear interpolation `p_h g`, evaluated on the fine grid `target`.
pub fn interpolate_ph(g: &Field, target: Lattice) -> Result<LinearInterpolant> {
    let coarse = g.lattice();
    require_refinement(coarse, target)?;
    let nodes = g.to_physical();
    let r = (target.m() / coarse.m()) as i64;
    let v = nodes.values();
    let samples = target
        .indices()
        .map(|i| {
            let j = i.div_euclid(r);
            let w = i.rem_euclid(r) as f64 / r as f64;
            v[coarse.slot(j)] * (1.0 - w) + v[coarse.slot(j + 1)] * w
        })
        .collect();
    Ok(LinearInterpolant {
        spectrum: nodes.to_frequency(),
        nodes,
        fine: target,
        samples,
    })
}

/// `||p_h g - u||_{L^2(T)}`, evaluated exactly on the Fourier side.
///
/// With `G = F_h g`, the interpolant has coefficients `P_h(k) G(k mod 2M)` at
/// every integer `k`. Inside the bandlimit the difference with `u_hat` is
/// summed directly; outside it only the interpolant contributes, and its
/// energy there is `|G(k')|^2` times the alias sum of `P_h^2` minus the
/// in-band part.
pub fn l2_torus_error(g: &Field, u: &ContinuumField) -> Result<f64> {
    let coarse = g.lattice();
    let fine = u.lattice();
    if fine.m() < 8 * coarse.m() {
        return Err(Error::IncompatibleGrids(format!(
            "reference M_ref = {} must be at least 8 M = {}",
            fine.m(),
            8 * coarse.m()
        )));
    }
    let gf = g.to_frequency();
    let gv = gf.values();
    let kmax = u.bandlimit() as i64;
    let mut in_band = 0.0;
    let mut in_band_weight = vec![0.0; coarse.len()];
    for k in -kmax..=kmax {
        let slot = coarse.slot(k);
        let p = interpolation_multiplier(coarse, k);
        in_band += (gv[slot] * p - u.coefficient(k)).norm_sqr();
        in_band_weight[slot] += p * p;
    }
    let tail: f64 = coarse
        .frequencies()
        .zip(gv)
        .zip(&in_band_weight)
        .map(|((k, gk), w)| gk.norm_sqr() * (alias_energy(coarse, k) - w).max(0.0))
        .sum();
    Ok(((in_band + tail) / (2.0 * PI)).sqrt())
}

/// The same functional by Gauss-Legendre quadrature on every fine cell, with
/// `u` evaluated by direct trigonometric summation. Slow; a cross-check only.
pub fn l2_torus_error_quadrature(g: &Field, u: &ContinuumField, nodes: usize) -> Result<f64> {
    let p = interpolate_ph(g, u.lattice())?;
    let fine = u.lattice();
    let hf = fine.h();
    let (xs, ws) = gauss_legendre(nodes);
    let mut total = 0.0;
    for j in fine.indices() {
        let a = fine.site(j);
        let left = p.samples()[fine.slot(j)];
        let right = p.samples()[fine.slot(j + 1)];
        for (x, w) in xs.iter().zip(&ws) {
            let s = 0.5 * (x + 1.0);
            let v = left * (1.0 - s) + right * s - u.evaluate(a + s * hf);
            total += 0.5 * hf * w * v.norm_sqr();
        }
    }
    Ok(total.sqrt())
}

#[cfg(test)]
#[path = "ops_tests.rs"]
mod tests;
