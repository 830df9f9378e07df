//! Fourier analysis and synthesis in the azimuthal angle.
//!
//! Grids are stored row-major as `values[j * ns + i]` for the angle
//! `θ_j = 2πj/N_θ` and the arclength node `i`. Mode `n` of column `i` is
//! `c_n = (1/N_θ) Σ_j f_j e^{-inθ_j}`, so that `f_j = Σ_n c_n e^{inθ_j}` with
//! `n ∈ {-N_θ/2, ..., N_θ/2 - 1}`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Per-mode Fourier coefficients sampled at the arclength nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierStack {
    ntheta: usize,
    ns: usize,
    /// `coeffs[k * ns + i]` for FFT index `k`.
    coeffs: Vec<Complex64>,
}

fn check_ntheta(ntheta: usize) -> Result<()> {
    if ntheta < 2 || !ntheta.is_multiple_of(2) {
        return Err(Error::Parameter(format!("N_θ = {ntheta} must be even and at least 2")));
    }
    Ok(())
}

/// Equispaced angles `2πj/N_θ`.
pub fn theta_grid(ntheta: usize) -> Vec<f64> {
    (0..ntheta).map(|j| 2.0 * std::f64::consts::PI * j as f64 / ntheta as f64).collect()
}

impl FourierStack {
    /// All-zero stack.
    pub fn zeros(ntheta: usize, ns: usize) -> Result<Self> {
        check_ntheta(ntheta)?;
        Ok(Self { ntheta, ns, coeffs: vec![Complex64::new(0.0, 0.0); ntheta * ns] })
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    /// Mode number of FFT index `k`.
    pub fn mode_number(&self, k: usize) -> i64 {
        let half = self.ntheta / 2;
        if k < half {
            k as i64
        } else {
            k as i64 - self.ntheta as i64
        }
    }

    fn index(&self, n: i64) -> Result<usize> {
        let half = (self.ntheta / 2) as i64;
        if n < -half || n >= half {
            return Err(Error::Parameter(format!("mode {n} outside [-{half}, {half})")));
        }
        Ok(n.rem_euclid(self.ntheta as i64) as usize)
    }

    /// Mode numbers in FFT order.
    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.ntheta).map(|k| self.mode_number(k))
    }

    pub fn mode(&self, n: i64) -> Result<&[Complex64]> {
        let k = self.index(n)?;
        Ok(&self.coeffs[k * self.ns..(k + 1) * self.ns])
    }

    pub fn mode_mut(&mut self, n: i64) -> Result<&mut [Complex64]> {
        let k = self.index(n)?;
        let ns = self.ns;
        Ok(&mut self.coeffs[k * ns..(k + 1) * ns])
    }

    /// `max_s |c_n(s)|`.
    pub fn mode_max(&self, n: i64) -> Result<f64> {
        Ok(self.mode(n)?.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// Fourier coefficients of a real grid.
    pub fn decompose(values: &[f64], ntheta: usize, ns: usize) -> Result<Self> {
        check_ntheta(ntheta)?;
        if values.len() != ntheta * ns {
            return Err(Error::Parameter(format!("grid has {} values, expected {}×{}", values.len(), ntheta, ns)));
        }
        let fft = FftPlanner::new().plan_fft_forward(ntheta);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); ntheta * ns];
        let mut column = vec![Complex64::new(0.0, 0.0); ntheta];
        let scale = 1.0 / ntheta as f64;
        for i in 0..ns {
            for j in 0..ntheta {
                column[j] = Complex64::new(values[j * ns + i], 0.0);
            }
            fft.process(&mut column);
            for k in 0..ntheta {
                coeffs[k * ns + i] = column[k] * scale;
            }
        }
        Ok(Self { ntheta, ns, coeffs })
    }

    /// Like [`decompose`](Self::decompose) but checks that `angles` is the
    /// equispaced grid `2πj/N_θ`.
    pub fn decompose_at(angles: &[f64], values: &[f64], ns: usize) -> Result<Self> {
        let expected = theta_grid(angles.len());
        if angles.iter().zip(&expected).any(|(a, e)| (a - e).abs() > 1e-12) {
            return Err(Error::Parameter("azimuthal grid must be equispaced starting at θ = 0".into()));
        }
        Self::decompose(values, angles.len(), ns)
    }

    /// Complex grid values `Σ_n c_n e^{inθ_j}`.
    pub fn synthesize_complex(&self) -> Vec<Complex64> {
        let (nt, ns) = (self.ntheta, self.ns);
        let ifft = FftPlanner::new().plan_fft_inverse(nt);
        let mut out = vec![Complex64::new(0.0, 0.0); nt * ns];
        let mut column = vec![Complex64::new(0.0, 0.0); nt];
        for i in 0..ns {
            for (k, c) in column.iter_mut().enumerate() {
                *c = self.coeffs[k * ns + i];
            }
            ifft.process(&mut column);
            for j in 0..nt {
                out[j * ns + i] = column[j];
            }
        }
        out
    }

    /// Real part of the synthesized grid (exact for conjugate-symmetric stacks).
    pub fn synthesize(&self) -> Vec<f64> {
        self.synthesize_complex().into_iter().map(|c| c.re).collect()
    }

    /// Multiplies mode `n` by `i n`; the unpaired Nyquist mode is zeroed.
    pub fn theta_derivative(&self) -> Self {
        let mut out = self.clone();
        let nyquist = -((self.ntheta / 2) as i64);
        for k in 0..self.ntheta {
            let n = self.mode_number(k);
            let factor = if n == nyquist { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, n as f64) };
            out.coeffs[k * self.ns..(k + 1) * self.ns].iter_mut().for_each(|c| *c *= factor);
        }
        out
    }

    /// Applies `op(n, coefficients)` to every mode.
    pub fn map_modes(&self, mut op: impl FnMut(i64, &mut [Complex64])) -> Self {
        let mut out = self.clone();
        let ns = self.ns;
        for k in 0..self.ntheta {
            let n = self.mode_number(k);
            op(n, &mut out.coeffs[k * ns..(k + 1) * ns]);
        }
        out
    }

    /// Largest deviation from `c_{-n} = conj(c_n)`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let half = (self.ntheta / 2) as i64;
        let mut worst: f64 = 0.0;
        for n in 1..half {
            let (a, b) = (self.mode(n).unwrap(), self.mode(-n).unwrap());
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y.conj()).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(ntheta: usize, ns: usize, f: impl Fn(f64, usize) -> f64) -> Vec<f64> {
        let th = theta_grid(ntheta);
        let mut v = vec![0.0; ntheta * ns];
        for j in 0..ntheta {
            for i in 0..ns {
                v[j * ns + i] = f(th[j], i);
            }
        }
        v
    }

    #[test]
    fn sine_three_has_two_modes() {
        let g = |i: usize| 1.0 + i as f64;
        let v = grid(10, 4, |t, i| (3.0 * t).sin() * g(i));
        let st = FourierStack::decompose(&v, 10, 4).unwrap();
        for n in st.modes().collect::<Vec<_>>() {
            let m = st.mode(n).unwrap();
            for (i, c) in m.iter().enumerate() {
                let expected = match n {
                    3 => Complex64::new(0.0, -0.5 * g(i)),
                    -3 => Complex64::new(0.0, 0.5 * g(i)),
                    _ => Complex64::new(0.0, 0.0),
                };
                assert!((c - expected).norm() < 1e-15, "n={n}");
            }
        }
    }

    #[test]
    fn constant_and_single_mode_synthesis() {
        let st = FourierStack::decompose(&[1.0; 8 * 3], 8, 3).unwrap();
        assert!(st.mode(0).unwrap().iter().all(|c| (c - 1.0).norm() < 1e-15));
        let mut st = FourierStack::zeros(8, 2).unwrap();
        st.mode_mut(2).unwrap().fill(Complex64::new(1.0, 0.0));
        st.mode_mut(-2).unwrap().fill(Complex64::new(1.0, 0.0));
        let g = st.synthesize();
        for (j, t) in theta_grid(8).into_iter().enumerate() {
            assert!((g[j * 2] - 2.0 * (2.0 * t).cos()).abs() < 1e-14);
        }
        assert!(FourierStack::zeros(6, 3).unwrap().synthesize().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn theta_derivative_of_sine() {
        let v = grid(16, 2, |t, _| (3.0 * t).sin());
        let d = FourierStack::decompose(&v, 16, 2).unwrap().theta_derivative().synthesize();
        for (j, t) in theta_grid(16).into_iter().enumerate() {
            assert!((d[j * 2] - 3.0 * (3.0 * t).cos()).abs() < 1e-13);
        }
        let c = FourierStack::decompose(&[2.0; 16], 16, 1).unwrap().theta_derivative();
        assert!(c.synthesize().iter().all(|v| v.abs() < 1e-15));
        // twice: -n²
        let dd = FourierStack::decompose(&v, 16, 2).unwrap().theta_derivative().theta_derivative();
        let back = FourierStack::decompose(&v, 16, 2).unwrap();
        for (a, b) in dd.mode(3).unwrap().iter().zip(back.mode(3).unwrap()) {
            assert!((a + 9.0 * b).norm() < 1e-14);
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(FourierStack::decompose(&[0.0; 5], 5, 1).is_err());
        assert!(FourierStack::zeros(0, 1).is_err());
        let bad = [0.0, 1.0, 3.0, 4.5];
        assert!(FourierStack::decompose_at(&bad, &[0.0; 4], 1).is_err());
        let good = theta_grid(4);
        assert!(FourierStack::decompose_at(&good, &[0.0; 4], 1).is_ok());
        assert!(FourierStack::zeros(4, 1).unwrap().mode(2).is_err());
        let _ = PI;
    }
}
