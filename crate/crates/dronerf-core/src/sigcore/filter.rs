//! Chebyshev type I IIR design and zero-phase application.
//!
//! Coefficients are designed and applied in f64 regardless of the frame
//! dtype; an 8th-order transfer function at the cutoffs used here is well
//! conditioned in double precision.

use num_complex::Complex;

use crate::{Error, Result};

/// Digital IIR filter in transfer-function form, `a[0] == 1`.
#[derive(Debug, Clone)]
pub struct IirFilter {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

impl IirFilter {
    /// Chebyshev type I lowpass. `cutoff` is normalised to Nyquist
    /// (0 < cutoff < 1). The passband ripple is `ripple_db`; the gain is
    /// rescaled so that H(z=1) is exactly 1 (DC passes unchanged).
    pub fn cheby1_lowpass(order: usize, ripple_db: f64, cutoff: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("filter order must be >= 1".into()));
        }
        if !(0.0 < cutoff && cutoff < 1.0) {
            return Err(Error::InvalidInput(format!(
                "cutoff must lie in (0, 1) of Nyquist, got {cutoff}"
            )));
        }
        if !(ripple_db > 0.0) {
            return Err(Error::InvalidInput("ripple must be positive".into()));
        }

        // Analog prototype poles on the Chebyshev ellipse.
        let n = order;
        let eps = (10f64.powf(ripple_db / 10.0) - 1.0).sqrt();
        let mu = (1.0 / eps).asinh() / n as f64;
        let mut poles: Vec<Complex<f64>> = (1..=n)
            .map(|k| {
                let theta = std::f64::consts::PI * (2.0 * k as f64 - 1.0) / (2.0 * n as f64);
                Complex::new(-mu.sinh() * theta.sin(), mu.cosh() * theta.cos())
            })
            .collect();
        let mut gain = poles.iter().fold(Complex::new(1.0, 0.0), |acc, p| acc * (-p)).re;
        if n % 2 == 0 {
            gain /= (1.0 + eps * eps).sqrt();
        }

        // Pre-warped lowpass-to-lowpass transform, then bilinear at fs = 2.
        let fs = 2.0f64;
        let warped = 2.0 * fs * (std::f64::consts::PI * cutoff / fs).tan();
        for p in &mut poles {
            *p *= warped;
        }
        gain *= warped.powi(n as i32);

        let fs2 = 2.0 * fs;
        let mut zpoles = Vec::with_capacity(n);
        let mut denom_prod = Complex::new(1.0, 0.0);
        for p in &poles {
            zpoles.push((Complex::new(fs2, 0.0) + p) / (Complex::new(fs2, 0.0) - p));
            denom_prod *= Complex::new(fs2, 0.0) - p;
        }
        let kz = gain * (Complex::new(1.0, 0.0) / denom_prod).re;
        // All n zeros land at z = -1 under the bilinear transform.
        let zzeros = vec![Complex::new(-1.0, 0.0); n];

        let mut b: Vec<f64> = poly_from_roots(&zzeros).iter().map(|c| c.re * kz).collect();
        let a: Vec<f64> = poly_from_roots(&zpoles).iter().map(|c| c.re).collect();

        // Pin the DC gain to exactly 1.
        let dc = b.iter().sum::<f64>() / a.iter().sum::<f64>();
        for c in &mut b {
            *c /= dc;
        }
        Ok(Self { b, a })
    }

    /// Complex frequency response H(e^{jω}) at `omega` rad/sample.
    pub fn response(&self, omega: f64) -> Complex<f64> {
        let eval = |coeffs: &[f64]| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| Complex::from_polar(*c, -omega * k as f64))
                .sum::<Complex<f64>>()
        };
        eval(&self.b) / eval(&self.a)
    }

    /// |H| in dB at `omega` rad/sample.
    pub fn magnitude_db(&self, omega: f64) -> f64 {
        20.0 * self.response(omega).norm().log10()
    }

    /// Direct-form II transposed filtering with initial state `zi`
    /// (already scaled by the caller).
    fn lfilter(&self, x: &[Complex<f64>], zi: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let order = self.a.len().max(self.b.len()) - 1;
        let mut b = self.b.clone();
        let mut a = self.a.clone();
        b.resize(order + 1, 0.0);
        a.resize(order + 1, 0.0);
        let mut z: Vec<Complex<f64>> = zi.to_vec();
        z.resize(order, Complex::new(0.0, 0.0));

        let mut y = Vec::with_capacity(x.len());
        for &xn in x {
            let yn = b[0] * xn + z[0];
            for i in 0..order {
                let znext = if i + 1 < order { z[i + 1] } else { Complex::new(0.0, 0.0) };
                z[i] = b[i + 1] * xn + znext - a[i + 1] * yn;
            }
            y.push(yn);
        }
        y
    }

    /// Steady-state initial conditions for a unit step, solved from the
    /// transposed companion form; multiplied by the first sample before
    /// use so that constant inputs pass without transients.
    fn step_state(&self) -> Vec<f64> {
        let n = self.a.len().max(self.b.len());
        let mut b = self.b.clone();
        let mut a = self.a.clone();
        b.resize(n, 0.0);
        a.resize(n, 0.0);
        let m = n - 1;

        // M = I - companion(a)^T, rhs = b[1:] - b[0]*a[1:]
        let mut mat = vec![0.0f64; m * m];
        for i in 0..m {
            mat[i * m + i] = 1.0;
            mat[i * m] += a[i + 1];
            if i + 1 < m {
                mat[i * m + (i + 1)] -= 1.0;
            }
        }
        let rhs: Vec<f64> = (0..m).map(|i| b[i + 1] - b[0] * a[i + 1]).collect();
        solve_dense(mat, rhs, m)
    }

    /// Zero-phase filtering: odd-padded forward pass, reversed backward
    /// pass, step-response initial conditions at both ends.
    pub fn filtfilt(&self, x: &[Complex<f64>]) -> Result<Vec<Complex<f64>>> {
        let order = self.a.len().max(self.b.len()) - 1;
        let padlen = 3 * order;
        if x.len() <= padlen {
            return Err(Error::InvalidInput(format!(
                "input of length {} too short for zero-phase filtering (needs > {padlen})",
                x.len()
            )));
        }

        let first = x[0];
        let last = x[x.len() - 1];
        let mut ext = Vec::with_capacity(x.len() + 2 * padlen);
        for i in (1..=padlen).rev() {
            ext.push(first * 2.0 - x[i]);
        }
        ext.extend_from_slice(x);
        for i in (1..=padlen).rev() {
            ext.push(last * 2.0 - x[x.len() - 1 - i]);
        }

        let zi = self.step_state();
        let scale = |v: Complex<f64>| -> Vec<Complex<f64>> { zi.iter().map(|&z| v * z).collect() };

        let fwd = self.lfilter(&ext, &scale(ext[0]));
        let mut rev: Vec<Complex<f64>> = fwd.into_iter().rev().collect();
        rev = self.lfilter(&rev, &scale(rev[0]));
        rev.reverse();
        Ok(rev[padlen..padlen + x.len()].to_vec())
    }
}

/// Expand Π(z - r_i) into monomial coefficients, highest degree first.
fn poly_from_roots(roots: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += *c;
            next[i + 1] -= *c * *r;
        }
        coeffs = next;
    }
    coeffs
}

/// Gaussian elimination with partial pivoting; sizes here are tiny.
fn solve_dense(mut mat: Vec<f64>, mut rhs: Vec<f64>, n: usize) -> Vec<f64> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                mat[i * n + col]
                    .abs()
                    .partial_cmp(&mat[j * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if pivot != col {
            for k in 0..n {
                mat.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        let diag = mat[col * n + col];
        for row in (col + 1)..n {
            let factor = mat[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                mat[row * n + k] -= factor * mat[col * n + k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= mat[row * n + k] * x[k];
        }
        x[row] = acc / mat[row * n + row];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dc_gain_is_unity() {
        let f = IirFilter::cheby1_lowpass(8, 0.05, 0.2).unwrap();
        let h0 = f.response(0.0);
        assert!((h0.re - 1.0).abs() < 1e-12, "dc gain {h0}");
        assert!(h0.im.abs() < 1e-12);
    }

    #[test]
    fn passband_ripple_within_bound() {
        let f = IirFilter::cheby1_lowpass(8, 0.05, 0.2).unwrap();
        // With unit DC gain the equiripple passband lies within [0, rp] dB.
        for i in 0..200 {
            let omega = std::f64::consts::PI * 0.2 * i as f64 / 200.0;
            let db = f.magnitude_db(omega);
            assert!(db > -1e-9 && db < 0.05 + 1e-9, "ripple violated at {omega}: {db} dB");
        }
    }

    #[test]
    fn stopband_attenuation_is_steep() {
        let f = IirFilter::cheby1_lowpass(8, 0.05, 0.2).unwrap();
        assert!(f.magnitude_db(std::f64::consts::PI * 0.4) < -40.0);
    }

    #[test]
    fn filtfilt_passes_constants_exactly() {
        let f = IirFilter::cheby1_lowpass(8, 0.05, 0.2).unwrap();
        let x = vec![Complex::new(1.0, -0.5); 256];
        let y = f.filtfilt(&x).unwrap();
        for v in y {
            assert!((v - Complex::new(1.0, -0.5)).norm() < 1e-9);
        }
    }

    #[test]
    fn filtfilt_rejects_short_input() {
        let f = IirFilter::cheby1_lowpass(8, 0.05, 0.2).unwrap();
        let x = vec![Complex::new(1.0, 0.0); 24];
        assert!(f.filtfilt(&x).is_err());
    }
}
