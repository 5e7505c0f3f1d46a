use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::dynamics::hamiltonian_diagonal;
use super::SpinSystem;
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;

/// Uniformly sampled free induction decay, `samples[k]` at `t = k·dwell`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fid {
    pub dwell: f64,
    pub samples: Vec<Complex64>,
}

impl Fid {
    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|k| k as f64 * self.dwell).collect()
    }
}

fn check_detect(s: &SpinSystem, rho: &DensityMatrix, detect: usize) -> Result<()> {
    if rho.dim() != s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional state for a {}-spin system",
            rho.dim(),
            s.n()
        )));
    }
    s.check_spin(detect)
}

/// Signal `tr(ρ(t)·(X_d + iY_d))/2^n` under free evolution, sampled at
/// `points` instants spaced `duration/points` apart. With this
/// normalization a single spin starting in `X` gives `e^{i2πνt}`.
pub fn fid(s: &SpinSystem, rho0: &DensityMatrix, detect: usize, duration: f64, points: usize) -> Result<Fid> {
    check_detect(s, rho0, detect)?;
    if !(duration > 0.0 && duration.is_finite()) || points < 2 {
        return Err(Error::InvalidArgument("FID needs duration > 0 and at least 2 points".into()));
    }
    let n = s.n();
    let mask = 1usize << (n - 1 - detect);
    let h = hamiltonian_diagonal(s);
    let m = rho0.matrix();
    let scale = 2.0 / s.dim() as f64;
    // (X + iY) = 2|0⟩⟨1| on the detected spin picks ρ[a, a^mask] with the
    // detected bit of a set.
    let terms: Vec<(Complex64, f64)> = (0..s.dim())
        .filter(|a| a & mask != 0)
        .map(|a| (m[(a, a ^ mask)] * scale, h[a] - h[a ^ mask]))
        .filter(|(c, _)| c.norm() > 0.0)
        .collect();
    let dwell = duration / points as f64;
    let samples = (0..points)
        .map(|k| {
            let t = k as f64 * dwell;
            terms.iter().map(|&(c, w)| c * Complex64::from_polar(1.0, -w * t)).sum()
        })
        .collect();
    Ok(Fid { dwell, samples })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Hz, ascending, uniform spacing `1/(points·dwell)`.
    pub frequencies: Vec<f64>,
    pub intensities: Vec<Complex64>,
    pub dwell: f64,
    pub points: usize,
    pub line_broadening: f64,
}

impl Spectrum {
    /// Frequency of the largest-magnitude point.
    pub fn peak_frequency(&self) -> Option<f64> {
        self.peak_index().map(|i| self.frequencies[i])
    }

    pub fn peak_index(&self) -> Option<usize> {
        self.intensities
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 0.0)
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
    }

    /// Multiplies every intensity by `e^{iφ}`.
    pub fn phased(&self, phi: f64) -> Spectrum {
        let r = Complex64::from_polar(1.0, phi);
        Spectrum { intensities: self.intensities.iter().map(|z| z * r).collect(), ..self.clone() }
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.intensities.iter().map(|z| z.re).collect()
    }

    pub fn norm(&self) -> f64 {
        self.intensities.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Apodizes with `e^{−π·lb·t}`, transforms, and centers the frequency axis.
pub fn spectrum(fid: &Fid, line_broadening: f64) -> Spectrum {
    let points = fid.samples.len();
    let mut buf: Vec<Complex64> = fid
        .samples
        .iter()
        .enumerate()
        .map(|(k, z)| z * (-PI * line_broadening * k as f64 * fid.dwell).exp())
        .collect();
    if points > 0 {
        FftPlanner::new().plan_fft_forward(points).process(&mut buf);
    }
    let half = points / 2;
    buf.rotate_right(half);
    let df = 1.0 / (points as f64 * fid.dwell);
    let frequencies = (0..points).map(|k| (k as f64 - half as f64) * df).collect();
    Spectrum { frequencies, intensities: buf, dwell: fid.dwell, points, line_broadening }
}

/// Zero-order phase that makes the reference's largest peak real and
/// positive.
pub fn zero_order_phase(reference: &Spectrum) -> f64 {
    reference.peak_index().map(|i| -reference.intensities[i].arg()).unwrap_or(0.0)
}

/// `|⟨a,b⟩|/(‖a‖·‖b‖)`; zero if either spectrum vanishes.
pub fn spectral_overlap(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    let same_grid = a.points == b.points
        && a.frequencies.len() == b.frequencies.len()
        && a.frequencies.iter().zip(&b.frequencies).all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(1.0));
    if !same_grid {
        return Err(Error::DimensionMismatch("spectra are on different frequency grids".into()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    let inner: Complex64 = a.intensities.iter().zip(&b.intensities).map(|(x, y)| x.conj() * y).sum();
    Ok((inner.norm() / (na * nb)).min(1.0))
}

/// One resolved line of the detected spin's multiplet.
#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    /// Computational states of the other spins (in spin order).
    pub configuration: Vec<u8>,
    pub frequency: f64,
    /// `tr(ρ·(X_d + iY_d)⊗|c⟩⟨c|)/2^n`: the FID amplitude of this line.
    pub amplitude: Complex64,
}

/// Analytic line list: each configuration `c` of the other spins puts a
/// line at `ν_d + Σ_j s_j·J_dj/2` with `s_j = +1` for `|0⟩`, `−1` for `|1⟩`.
pub fn multiplet_lines(s: &SpinSystem, rho: &DensityMatrix, detect: usize) -> Result<Vec<Line>> {
    check_detect(s, rho, detect)?;
    let n = s.n();
    let others: Vec<usize> = (0..n).filter(|&k| k != detect).collect();
    let m = rho.matrix();
    let scale = 2.0 / s.dim() as f64;
    let mut lines = Vec::with_capacity(1 << others.len());
    for c in 0..1usize << others.len() {
        let configuration: Vec<u8> = (0..others.len()).map(|p| ((c >> (others.len() - 1 - p)) & 1) as u8).collect();
        let mut frequency = s.larmor()[detect];
        let mut down = 0usize;
        for (&k, &bit) in others.iter().zip(&configuration) {
            let sign = if bit == 0 { 1.0 } else { -1.0 };
            frequency += sign * s.coupling(detect, k) / 2.0;
            down |= (bit as usize) << (n - 1 - k);
        }
        let up = down | 1 << (n - 1 - detect);
        lines.push(Line { configuration, frequency, amplitude: m[(up, down)] * scale });
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::{pseudopure_init, PauliProductState};

    fn dev(label: &str) -> DensityMatrix {
        pseudopure_init(&label.parse::<PauliProductState>().unwrap())
    }

    #[test]
    fn single_spin_fid_is_a_complex_exponential() {
        let s = SpinSystem::new(vec![100.0], vec![vec![0.0]]).unwrap();
        let f = fid(&s, &dev("X"), 0, 0.1, 200).unwrap();
        for (t, z) in f.times().iter().zip(&f.samples) {
            assert!((z - Complex64::from_polar(1.0, 2.0 * PI * 100.0 * t)).norm() < 1e-12);
        }
        let zero = fid(&s, &dev("Z"), 0, 0.1, 200).unwrap();
        assert!(zero.samples.iter().all(|z| z.norm() == 0.0));
        assert!(fid(&s, &dev("X"), 1, 0.1, 200).is_err());
        assert!(fid(&s, &dev("X"), 0, 0.0, 200).is_err());
        assert!(fid(&s, &dev("X"), 0, 0.1, 1).is_err());
    }

    #[test]
    fn coupled_pair_oscillates_at_shifted_frequency() {
        let s = SpinSystem::from_upper_triangle(vec![120.0, -40.0], &[50.0]).unwrap();
        let f = fid(&s, &dev("X0"), 0, 0.2, 400).unwrap();
        for (t, z) in f.times().iter().zip(&f.samples) {
            assert!((z - Complex64::from_polar(0.5, 2.0 * PI * 145.0 * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn spectrum_peak_lands_on_the_frequency() {
        let s = SpinSystem::new(vec![-37.5], vec![vec![0.0]]).unwrap();
        let sp = spectrum(&fid(&s, &dev("X"), 0, 1.0, 512).unwrap(), 0.0);
        let df = sp.frequencies[1] - sp.frequencies[0];
        assert!((df - 1.0).abs() < 1e-12);
        assert!((sp.peak_frequency().unwrap() + 37.5).abs() <= df);
        assert_eq!(sp.frequencies.len(), 512);
        let zero = spectrum(&Fid { dwell: 1e-3, samples: vec![Complex64::new(0.0, 0.0); 64] }, 1.0);
        assert!(zero.intensities.iter().all(|z| z.norm() == 0.0));
        assert_eq!(zero.peak_frequency(), None);
    }

    #[test]
    fn overlap_examples() {
        let mk = |nu: f64| {
            let s = SpinSystem::new(vec![nu], vec![vec![0.0]]).unwrap();
            spectrum(&fid(&s, &dev("X"), 0, 1.0, 256).unwrap(), 0.0)
        };
        let a = mk(10.0);
        assert!((spectral_overlap(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(spectral_overlap(&a, &mk(-60.0)).unwrap() < 1e-9);
        assert!((spectral_overlap(&a, &a.phased(0.4)).unwrap() - 1.0).abs() < 1e-12);
        let s = SpinSystem::new(vec![10.0], vec![vec![0.0]]).unwrap();
        let coarse = spectrum(&fid(&s, &dev("X"), 0, 1.0, 128).unwrap(), 0.0);
        assert!(spectral_overlap(&a, &coarse).is_err());
    }

    #[test]
    fn zero_order_phase_makes_peak_real() {
        let s = SpinSystem::new(vec![10.0], vec![vec![0.0]]).unwrap();
        let sp = spectrum(&fid(&s, &dev("Y"), 0, 1.0, 256).unwrap(), 0.0);
        let phased = sp.phased(zero_order_phase(&sp));
        let peak = phased.intensities[phased.peak_index().unwrap()];
        assert!(peak.re > 0.0 && peak.im.abs() < 1e-9 * peak.re);
    }

    #[test]
    fn multiplet_of_two_spins() {
        let s = SpinSystem::from_upper_triangle(vec![100.0, 0.0], &[20.0]).unwrap();
        let lines = multiplet_lines(&s, &dev("XZ"), 0).unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].frequency, 110.0);
        assert_eq!(lines[1].frequency, 90.0);
        assert!((lines[0].amplitude - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((lines[1].amplitude + Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }
}
