//! Periodic differentiation, quadrature and trigonometric resampling on
//! uniform grids over `[0, 2π)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Spatial differentiation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Scheme {
    /// Fourier differentiation; exact on resolved trigonometric polynomials.
    Spectral,
    /// Second-order central differences.
    Fd2,
    /// Fourth-order central differences.
    Fd4,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Scheme::Spectral),
            "fd2" => Ok(Scheme::Fd2),
            "fd4" => Ok(Scheme::Fd4),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

thread_local! {
    static FWD_PLANS: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
    static INV_PLANS: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn fft_forward(buf: &mut [Complex64]) {
    let n = buf.len();
    let plan = FWD_PLANS.with(|c| {
        c.borrow_mut()
            .entry(n)
            .or_insert_with(|| FftPlanner::new().plan_fft_forward(n))
            .clone()
    });
    plan.process(buf);
}

fn fft_inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    let plan = INV_PLANS.with(|c| {
        c.borrow_mut()
            .entry(n)
            .or_insert_with(|| FftPlanner::new().plan_fft_inverse(n))
            .clone()
    });
    plan.process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Forward DFT of real samples.
fn spectrum(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    buf
}

/// Signed frequency of DFT bin `k` on an `n`-point grid.
fn signed_freq(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Periodic derivative of uniformly sampled data (derivatives per radian).
///
/// `order` is 1 or 2. For the spectral scheme the Nyquist mode is zeroed
/// for the first derivative, which keeps real inputs real.
pub fn diff_periodic(values: &[f64], order: u32, scheme: Scheme) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 16 {
        return Err(Error::InvalidCurve(format!("grid size {n} below minimum 16")));
    }
    check_finite(values, "diff_periodic input")?;
    assert!(order == 1 || order == 2, "only first and second derivatives supported");
    match scheme {
        Scheme::Spectral => {
            let mut c = spectrum(values);
            for (k, v) in c.iter_mut().enumerate() {
                let f = signed_freq(k, n) as f64;
                if order == 1 {
                    let nyquist = n % 2 == 0 && k == n / 2;
                    *v = if nyquist {
                        Complex64::new(0.0, 0.0)
                    } else {
                        *v * Complex64::new(0.0, f)
                    };
                } else {
                    *v *= -f * f;
                }
            }
            fft_inverse(&mut c);
            Ok(c.iter().map(|v| v.re).collect())
        }
        Scheme::Fd2 => {
            let h = 2.0 * std::f64::consts::PI / n as f64;
            let at = |i: i64| values[i.rem_euclid(n as i64) as usize];
            Ok((0..n as i64)
                .map(|i| {
                    if order == 1 {
                        (at(i + 1) - at(i - 1)) / (2.0 * h)
                    } else {
                        (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h)
                    }
                })
                .collect())
        }
        Scheme::Fd4 => {
            let h = 2.0 * std::f64::consts::PI / n as f64;
            let at = |i: i64| values[i.rem_euclid(n as i64) as usize];
            Ok((0..n as i64)
                .map(|i| {
                    if order == 1 {
                        (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h)
                    } else {
                        (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1)
                            - at(i - 2))
                            / (12.0 * h * h)
                    }
                })
                .collect())
        }
    }
}

/// Periodic trapezoid quadrature over `[0, 2π]`: `(2π/n)·Σ values`.
pub fn quadrature_periodic(values: &[f64]) -> f64 {
    let n = values.len();
    let sum: f64 = values.iter().sum();
    2.0 * std::f64::consts::PI / n as f64 * sum
}

/// Trigonometric resampling from `n` to `new_n` uniform nodes.
///
/// Band-limited inputs are reproduced exactly when `new_n >= n`;
/// downsampling evaluates the interpolant at the coarse nodes
/// (unresolved modes alias).
pub fn resample(values: &[f64], new_n: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 16 || new_n < 16 || n % 2 != 0 || new_n % 2 != 0 {
        return Err(Error::InvalidCurve(format!(
            "resample requires even sizes >= 16, got {n} -> {new_n}"
        )));
    }
    check_finite(values, "resample input")?;
    if new_n == n {
        return Ok(values.to_vec());
    }
    let c = spectrum(values);
    let m = new_n;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let fold = |out: &mut Vec<Complex64>, f: i64, v: Complex64| {
        let idx = f.rem_euclid(m as i64) as usize;
        out[idx] += v;
    };
    for (k, &v) in c.iter().enumerate() {
        let f = signed_freq(k, n);
        if n % 2 == 0 && k == n / 2 {
            // split the Nyquist mode between +n/2 and -n/2
            fold(&mut out, n as i64 / 2, v * 0.5);
            fold(&mut out, -(n as i64) / 2, v * 0.5);
        } else {
            fold(&mut out, f, v);
        }
    }
    let scale = m as f64 / n as f64;
    for v in out.iter_mut() {
        *v *= scale;
    }
    fft_inverse(&mut out);
    Ok(out.iter().map(|v| v.re).collect())
}

/// Zero-mean periodic antiderivative via the spectral inverse of d/dθ.
///
/// The mean of the input is discarded (a nonzero mean has no periodic
/// antiderivative); the output is the unique primitive with zero mean.
pub fn antiderivative_periodic(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 16 || n % 2 != 0 {
        return Err(Error::InvalidCurve(format!(
            "antiderivative requires even size >= 16, got {n}"
        )));
    }
    check_finite(values, "antiderivative input")?;
    let mut c = spectrum(values);
    for (k, v) in c.iter_mut().enumerate() {
        let f = signed_freq(k, n) as f64;
        let nyquist = k == n / 2;
        *v = if k == 0 || nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            *v / Complex64::new(0.0, f)
        };
    }
    fft_inverse(&mut c);
    Ok(c.iter().map(|v| v.re).collect())
}
