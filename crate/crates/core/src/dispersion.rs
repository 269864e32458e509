//! Fixation-stability features: the bivariate contour ellipse, Guzik's index,
//! perpendicular-spread MSE, preferred-retinal-locus count and the sample and
//! approximate entropies of the gaze traces.

use std::f64::consts::PI;
use std::ops::Range;

use serde::Serialize;

use crate::error::DispersionError;

/// Ellipse scale factor for roughly 95% probability mass.
pub const BCEA_K: f64 = 3.0;
pub const MINARC2_PER_DEG2: f64 = 3600.0;
pub const DEFAULT_PRL_MASS: f64 = 0.68;
pub const PRL_GRID: usize = 64;
pub const ENTROPY_M: usize = 2;
pub const ENTROPY_R_FACTOR: f64 = 0.2;
pub const ENTROPY_WINDOW: usize = 3000;
pub const ENTROPY_MIN_TAIL: usize = 1000;
pub const ENTROPY_MIN_LEN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseStats {
    pub mean_h_deg: f64,
    pub mean_v_deg: f64,
    pub sd_h_deg: f64,
    pub sd_v_deg: f64,
    pub rho: f64,
    pub bcea_deg2: f64,
    pub bcea_minarc2: f64,
    pub major_axis_angle_rad: f64,
    pub sd_parallel_deg: f64,
    pub sd_perpendicular_deg: f64,
    pub gi: f64,
    pub mse_deg2: f64,
    /// Eigenvalues of the covariance, larger first.
    pub eigenvalues: (f64, f64),
}

pub fn bcea(sd_h: f64, sd_v: f64, rho: f64) -> f64 {
    2.0 * PI * BCEA_K * sd_h * sd_v * (1.0 - rho * rho).sqrt()
}

/// Ellipse statistics with population (`n`) moments.
///
/// The major axis is the eigenvector of the larger covariance eigenvalue; an
/// isotropic covariance gets angle 0. Parallel and perpendicular spreads are
/// computed by projecting the centered samples onto the axes.
pub fn ellipse_stats(x: &[f64], y: &[f64]) -> Result<EllipseStats, DispersionError> {
    let n = x.len().min(y.len());
    if n < 3 {
        return Err(DispersionError::TooFewPoints { found: n, needed: 3 });
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (vxx, vyy, vxy) = (sxx / nf, syy / nf, sxy / nf);
    let (sd_h, sd_v) = (vxx.sqrt(), vyy.sqrt());
    if !(sd_h > 0.0 && sd_v > 0.0) {
        return Err(DispersionError::DegenerateDistribution);
    }
    let rho = (vxy / (sd_h * sd_v)).clamp(-1.0, 1.0);
    if 1.0 - rho * rho <= 1e-12 {
        return Err(DispersionError::DegenerateDistribution);
    }

    let half_tr = 0.5 * (vxx + vyy);
    let half_diff = 0.5 * (vxx - vyy);
    let disc = half_diff.hypot(vxy);
    let l1 = half_tr + disc;
    let l2 = ((vxx * vyy - vxy * vxy) / l1).max(0.0);
    let angle = if disc == 0.0 {
        0.0
    } else {
        0.5 * (2.0 * vxy).atan2(vxx - vyy)
    };

    let (c, s) = (angle.cos(), angle.sin());
    let (mut par2, mut perp2) = (0.0, 0.0);
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        let p = c * dx + s * dy;
        let q = -s * dx + c * dy;
        par2 += p * p;
        perp2 += q * q;
    }
    let mse = perp2 / nf;
    let sd_par = (par2 / nf).sqrt();
    let sd_perp = mse.sqrt();
    let area = bcea(sd_h, sd_v, rho);
    Ok(EllipseStats {
        mean_h_deg: mx,
        mean_v_deg: my,
        sd_h_deg: sd_h,
        sd_v_deg: sd_v,
        rho,
        bcea_deg2: area,
        bcea_minarc2: MINARC2_PER_DEG2 * area,
        major_axis_angle_rad: angle,
        sd_parallel_deg: sd_par,
        sd_perpendicular_deg: sd_perp,
        gi: (sd_par / sd_perp).max(1.0),
        mse_deg2: mse,
        eigenvalues: (l1, l2),
    })
}

fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Gaussian KDE over the padded bounding box, thresholded at the density
/// level enclosing `mass` of the total; returns the density grid and mask.
pub fn prl_density(
    x: &[f64],
    y: &[f64],
    mass: f64,
) -> Result<(Vec<f64>, Vec<bool>), DispersionError> {
    let n = x.len().min(y.len());
    if n < 10 {
        return Err(DispersionError::TooFewPoints { found: n, needed: 10 });
    }
    let (x, y) = (&x[..n], &y[..n]);
    // Silverman's rule in two dimensions: h = sd * n^(-1/6).
    let factor = (n as f64).powf(-1.0 / 6.0);
    let hx = sample_sd(x) * factor;
    let hy = sample_sd(y) * factor;
    if !(hx > 0.0 && hy > 0.0) {
        return Err(DispersionError::DegenerateDistribution);
    }
    let axis = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.1 * (hi - lo);
        let (lo, hi) = (lo - pad, hi + pad);
        let step = (hi - lo) / (PRL_GRID - 1) as f64;
        (lo, step)
    };
    let (x0, dxg) = axis(x);
    let (y0, dyg) = axis(y);

    // Kernels are truncated at 5 bandwidths (relative weight < 4e-6).
    let reach = 5.0;
    let mut density = vec![0.0; PRL_GRID * PRL_GRID];
    let mut kx = [0.0; PRL_GRID];
    let mut ky = [0.0; PRL_GRID];
    let span = |v: f64, lo: f64, step: f64, h: f64| {
        let a = ((v - reach * h - lo) / step).ceil().max(0.0) as usize;
        let b = ((v + reach * h - lo) / step).floor().min((PRL_GRID - 1) as f64);
        (a, b as isize)
    };
    for i in 0..n {
        let (ax, bx) = span(x[i], x0, dxg, hx);
        let (ay, by) = span(y[i], y0, dyg, hy);
        if bx < ax as isize || by < ay as isize {
            continue;
        }
        let (bx, by) = (bx as usize, by as usize);
        for g in ax..=bx {
            let u = (x0 + g as f64 * dxg - x[i]) / hx;
            kx[g] = (-0.5 * u * u).exp();
        }
        for g in ay..=by {
            let u = (y0 + g as f64 * dyg - y[i]) / hy;
            ky[g] = (-0.5 * u * u).exp();
        }
        for gy in ay..=by {
            let row = &mut density[gy * PRL_GRID..(gy + 1) * PRL_GRID];
            let w = ky[gy];
            for gx in ax..=bx {
                row[gx] += w * kx[gx];
            }
        }
    }

    let total: f64 = density.iter().sum();
    let mut sorted = density.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let target = mass.clamp(0.0, 1.0) * total;
    let mut acc = 0.0;
    let mut level = sorted[0];
    for v in &sorted {
        acc += v;
        level = *v;
        if acc >= target {
            break;
        }
    }
    let mask = density.iter().map(|d| *d >= level && *d > 0.0).collect();
    Ok((density, mask))
}

/// 8-connected components of `true` cells in a `side x side` grid.
pub fn count_components(mask: &[bool], side: usize) -> usize {
    let mut seen = vec![false; mask.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(c) = stack.pop() {
            let (r, col) = ((c / side) as isize, (c % side) as isize);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (nr, nc) = (r + dr, col + dc);
                    if nr < 0 || nc < 0 || nr >= side as isize || nc >= side as isize {
                        continue;
                    }
                    let k = nr as usize * side + nc as usize;
                    if mask[k] && !seen[k] {
                        seen[k] = true;
                        stack.push(k);
                    }
                }
            }
        }
    }
    count
}

/// Number of preferred retinal loci among fixation gaze points.
pub fn count_prls(x: &[f64], y: &[f64], mass: f64) -> Result<usize, DispersionError> {
    let (_, mask) = prl_density(x, y, mass)?;
    Ok(count_components(&mask, PRL_GRID))
}

/// Template-match counts for one window at tolerance `r`.
struct MatchCounts {
    /// Pairs `i < j < N - m` matching over `m` points.
    b: u64,
    /// Of those, pairs also matching at offset `m`.
    a: u64,
    /// Per-template match counts over `N - m + 1` templates of length `m`, self included.
    c_m: Vec<u32>,
    /// Per-template match counts over `N - m` templates of length `m + 1`, self included.
    c_m1: Vec<u32>,
}

fn match_counts(x: &[f64], m: usize, r: f64) -> MatchCounts {
    let n = x.len();
    let tm = n - m + 1;
    let tm1 = n - m;
    let mut c_m = vec![1u32; tm];
    let mut c_m1 = vec![1u32; tm1];
    let (mut a, mut b) = (0u64, 0u64);

    // Pairs are enumerated in order of the first template element, so only
    // neighbours within r of it in sorted order need the full comparison.
    let mut order: Vec<usize> = (0..tm).collect();
    order.sort_unstable_by(|&p, &q| x[p].total_cmp(&x[q]));
    for (p, &i0) in order.iter().enumerate() {
        let xi = x[i0];
        for &j0 in &order[p + 1..] {
            if x[j0] - xi > r {
                break;
            }
            let (i, j) = if i0 < j0 { (i0, j0) } else { (j0, i0) };
            if !(1..m).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                continue;
            }
            c_m[i] += 1;
            c_m[j] += 1;
            if j < tm1 {
                b += 1;
                if (x[i + m] - x[j + m]).abs() <= r {
                    a += 1;
                    c_m1[i] += 1;
                    c_m1[j] += 1;
                }
            }
        }
    }
    MatchCounts { b, a, c_m, c_m1 }
}

fn phi(counts: &[u32]) -> f64 {
    let t = counts.len() as f64;
    counts.iter().map(|&c| (c as f64 / t).ln()).sum::<f64>() / t
}

fn population_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt()
}

/// Sample entropy of one window at an explicit tolerance (Chebyshev
/// distance, self-matches excluded).
pub fn sample_entropy_window(x: &[f64], m: usize, r: f64) -> Result<f64, DispersionError> {
    if x.len() <= m + 1 {
        return Err(DispersionError::SeriesTooShort { len: x.len() });
    }
    let c = match_counts(x, m, r);
    if c.a == 0 || c.b == 0 {
        return Err(DispersionError::UndefinedEntropy);
    }
    Ok(-(c.a as f64 / c.b as f64).ln())
}

/// Approximate entropy of one window at an explicit tolerance (self-matches included).
pub fn approximate_entropy_window(x: &[f64], m: usize, r: f64) -> Result<f64, DispersionError> {
    if x.len() <= m + 1 {
        return Err(DispersionError::SeriesTooShort { len: x.len() });
    }
    let c = match_counts(x, m, r);
    Ok(phi(&c.c_m) - phi(&c.c_m1))
}

/// Window ranges used for entropy estimation: consecutive 3000-sample
/// windows plus a trailing partial one of at least 1000 samples. A series
/// shorter than one window is a single window.
pub fn entropy_windows(len: usize) -> Result<Vec<Range<usize>>, DispersionError> {
    if len < ENTROPY_MIN_LEN {
        return Err(DispersionError::SeriesTooShort { len });
    }
    if len < ENTROPY_WINDOW {
        return Ok(vec![0..len]);
    }
    let full = len / ENTROPY_WINDOW;
    let mut out: Vec<_> = (0..full)
        .map(|k| k * ENTROPY_WINDOW..(k + 1) * ENTROPY_WINDOW)
        .collect();
    if len - full * ENTROPY_WINDOW >= ENTROPY_MIN_TAIL {
        out.push(full * ENTROPY_WINDOW..len);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropies {
    pub sample: Option<f64>,
    pub approximate: f64,
}

/// Windowed sample and approximate entropy with `r = r_factor * SD(window)`.
/// Constant windows contribute 0 to both; windows without any sample-entropy
/// match are left out of the sample-entropy average.
pub fn entropies(series: &[f64], m: usize, r_factor: f64) -> Result<Entropies, DispersionError> {
    let windows = entropy_windows(series.len())?;
    let (mut se_sum, mut se_n) = (0.0, 0usize);
    let mut ap_sum = 0.0;
    for w in &windows {
        let x = &series[w.clone()];
        let sd = population_sd(x);
        if sd == 0.0 {
            se_n += 1;
            continue;
        }
        let c = match_counts(x, m, r_factor * sd);
        if c.a > 0 && c.b > 0 {
            se_sum += -(c.a as f64 / c.b as f64).ln();
            se_n += 1;
        }
        ap_sum += phi(&c.c_m) - phi(&c.c_m1);
    }
    Ok(Entropies {
        sample: (se_n > 0).then(|| se_sum / se_n as f64),
        approximate: ap_sum / windows.len() as f64,
    })
}

pub fn sample_entropy(series: &[f64], m: usize, r_factor: f64) -> Result<f64, DispersionError> {
    entropies(series, m, r_factor)?
        .sample
        .ok_or(DispersionError::UndefinedEntropy)
}

pub fn approximate_entropy(series: &[f64], m: usize, r_factor: f64) -> Result<f64, DispersionError> {
    Ok(entropies(series, m, r_factor)?.approximate)
}

pub const N_DISPERSION_FEATURES: usize = 13;

/// The 13 dispersion-group features in canonical order. `x`/`y` are all
/// non-missing gaze samples in time order; `fx`/`fy` are the gaze samples
/// inside detected fixations.
pub fn dispersion_features(
    x: &[f64],
    y: &[f64],
    fx: &[f64],
    fy: &[f64],
    prl_mass: f64,
) -> [Option<f64>; N_DISPERSION_FEATURES] {
    let mut out = [None; N_DISPERSION_FEATURES];
    if !x.is_empty() {
        out[0] = Some(x.iter().sum::<f64>() / x.len() as f64);
        out[1] = Some(y.iter().sum::<f64>() / y.len() as f64);
    }
    if let Ok(e) = ellipse_stats(x, y) {
        out[2] = Some(e.sd_h_deg);
        out[3] = Some(e.sd_v_deg);
        out[4] = Some(e.rho);
        out[5] = Some(e.bcea_minarc2);
        out[7] = Some(e.gi);
        out[8] = Some(e.mse_deg2);
    }
    out[6] = count_prls(fx, fy, prl_mass).ok().map(|c| c as f64);
    let trace_entropy = |s: &[f64]| {
        if s.len() < 2 || population_sd(s) == 0.0 {
            return (None, None);
        }
        match entropies(s, ENTROPY_M, ENTROPY_R_FACTOR) {
            Ok(e) => (e.sample, Some(e.approximate)),
            Err(_) => (None, None),
        }
    };
    let (se_h, ap_h) = trace_entropy(x);
    let (se_v, ap_v) = trace_entropy(y);
    out[9] = se_h;
    out[10] = se_v;
    out[11] = ap_h;
    out[12] = ap_v;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn bivariate(n: usize, sx: f64, sy: f64, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = Normal::new(0.0, 1.0).unwrap();
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let a: f64 = z.sample(&mut rng);
            let b: f64 = z.sample(&mut rng);
            xs.push(sx * a);
            ys.push(sy * (rho * a + (1.0 - rho * rho).sqrt() * b));
        }
        (xs, ys)
    }

    /// Definition-level sample entropy: every template pair compared directly.
    fn sampen_oracle(x: &[f64], m: usize, r: f64) -> f64 {
        let n = x.len();
        let count = |len: usize| {
            let mut c = 0u64;
            for i in 0..n - m {
                for j in i + 1..n - m {
                    if (0..len).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                        c += 1;
                    }
                }
            }
            c
        };
        -((count(m + 1) as f64) / (count(m) as f64)).ln()
    }

    fn apen_oracle(x: &[f64], m: usize, r: f64) -> f64 {
        let n = x.len();
        let phi = |len: usize| {
            let t = n - len + 1;
            let mut s = 0.0;
            for i in 0..t {
                let c = (0..t)
                    .filter(|&j| (0..len).all(|k| (x[i + k] - x[j + k]).abs() <= r))
                    .count();
                s += (c as f64 / t as f64).ln();
            }
            s / t as f64
        };
        phi(m) - phi(m + 1)
    }

    #[test]
    fn unit_isotropic_anchor() {
        assert!((bcea(1.0, 1.0, 0.0) - 6.0 * PI).abs() < 1e-9);
        assert!((MINARC2_PER_DEG2 * bcea(1.0, 1.0, 0.0) - 67_858.4).abs() < 0.1);
    }

    #[test]
    fn correlated_gaussian_matches_closed_form() {
        let (x, y) = bivariate(10_000, 2.0, 1.0, 0.5, 42);
        let e = ellipse_stats(&x, &y).unwrap();
        let area = 2.0 * PI * 3.0 * 2.0 * 1.0 * 0.75f64.sqrt();
        assert!((e.bcea_deg2 / area - 1.0).abs() < 0.05);
        let l1 = (5.0 + 13f64.sqrt()) / 2.0;
        let l2 = (5.0 - 13f64.sqrt()) / 2.0;
        let gi = (l1 / l2).sqrt();
        assert!((gi - 2.4843).abs() < 1e-4);
        assert!((e.gi / gi - 1.0).abs() < 0.05);
    }

    #[test]
    fn internal_consistency() {
        let (x, y) = bivariate(2000, 1.5, 0.7, -0.3, 3);
        let e = ellipse_stats(&x, &y).unwrap();
        assert!((e.mse_deg2 - e.eigenvalues.1).abs() < 1e-9);
        assert!((e.sd_parallel_deg.powi(2) - e.eigenvalues.0).abs() < 1e-9);
        assert!((e.bcea_minarc2 - 3600.0 * e.bcea_deg2).abs() < 1e-6);
        assert!(e.sd_parallel_deg >= e.sd_perpendicular_deg);
    }

    #[test]
    fn degenerate_inputs() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_eq!(ellipse_stats(&x, &y), Err(DispersionError::DegenerateDistribution));
        assert_eq!(
            ellipse_stats(&[1.0; 10], &x[..10]),
            Err(DispersionError::DegenerateDistribution)
        );
        assert!(matches!(
            ellipse_stats(&[1.0, 2.0], &[1.0, 3.0]),
            Err(DispersionError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn isotropic_ties_have_zero_angle() {
        let x = [1.0, -1.0, 0.0, 0.0];
        let y = [0.0, 0.0, 1.0, -1.0];
        let e = ellipse_stats(&x, &y).unwrap();
        assert_eq!(e.major_axis_angle_rad, 0.0);
        assert!((e.gi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_and_rotation() {
        let (x, y) = bivariate(3000, 1.2, 0.8, 0.4, 9);
        let base = ellipse_stats(&x, &y).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let y2: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        let scaled = ellipse_stats(&x2, &y2).unwrap();
        assert!((scaled.bcea_deg2 / base.bcea_deg2 - 4.0).abs() < 1e-9);
        let th = 30f64.to_radians();
        let (c, s) = (th.cos(), th.sin());
        let xr: Vec<f64> = x.iter().zip(&y).map(|(a, b)| c * a - s * b + 7.0).collect();
        let yr: Vec<f64> = x.iter().zip(&y).map(|(a, b)| s * a + c * b - 3.0).collect();
        let rot = ellipse_stats(&xr, &yr).unwrap();
        assert!((rot.bcea_deg2 - base.bcea_deg2).abs() < 1e-6);
        assert!((rot.mse_deg2 - base.mse_deg2).abs() < 1e-6);
        assert!((rot.gi - base.gi).abs() < 1e-6);
    }

    fn cluster(n: usize, cx: f64, cy: f64, sd: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let (mut x, mut y) = bivariate(n, sd, sd, 0.0, seed);
        x.iter_mut().for_each(|v| *v += cx);
        y.iter_mut().for_each(|v| *v += cy);
        (x, y)
    }

    #[test]
    fn prl_single_and_double_cluster() {
        let (x, y) = cluster(2000, 40.0, 30.0, 0.5, 1);
        assert_eq!(count_prls(&x, &y, 0.68).unwrap(), 1);
        let (mut x, mut y) = cluster(1500, 40.0, 30.0, 0.5, 2);
        let (x2, y2) = cluster(1500, 50.0, 30.0, 0.5, 3);
        x.extend(x2);
        y.extend(y2);
        assert_eq!(count_prls(&x, &y, 0.68).unwrap(), 2);
        assert!(matches!(
            count_prls(&x[..5], &y[..5], 0.68),
            Err(DispersionError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn prl_uniform_scatter() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..3000).map(|_| rng.gen_range(0.0..95.0)).collect();
        let y: Vec<f64> = (0..3000).map(|_| rng.gen_range(0.0..63.0)).collect();
        assert!(count_prls(&x, &y, 0.68).unwrap() >= 1);
    }

    #[test]
    fn entropy_windows_policy() {
        assert!(entropy_windows(99).is_err());
        assert_eq!(entropy_windows(500).unwrap(), vec![0..500]);
        assert_eq!(entropy_windows(6999).unwrap(), vec![0..3000, 3000..6000]);
        assert_eq!(
            entropy_windows(7000).unwrap(),
            vec![0..3000, 3000..6000, 6000..7000]
        );
    }

    #[test]
    fn constant_series_entropy_is_zero() {
        assert_eq!(sample_entropy(&[3.0; 500], 2, 0.2).unwrap(), 0.0);
        assert_eq!(approximate_entropy(&[3.0; 500], 2, 0.2).unwrap(), 0.0);
    }

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = Normal::new(0.0, 1.0).unwrap();
        (0..n).map(|_| z.sample(&mut rng)).collect()
    }

    fn sine(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * PI * 0.5 * i as f64 / 100.0).sin())
            .collect()
    }

    #[test]
    fn entropy_matches_definition() {
        for series in [noise(3000, 17), sine(3000)] {
            let r = 0.2 * population_sd(&series);
            let se = sample_entropy_window(&series, 2, r).unwrap();
            let ap = approximate_entropy_window(&series, 2, r).unwrap();
            assert!((se - sampen_oracle(&series, 2, r)).abs() < 1e-9);
            assert!((ap - apen_oracle(&series, 2, r)).abs() < 1e-9);
            assert!((sample_entropy(&series, 2, 0.2).unwrap() - se).abs() < 1e-12);
            assert!((approximate_entropy(&series, 2, 0.2).unwrap() - ap).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_orders_sine_below_noise() {
        let n = noise(3000, 8);
        let s = sine(3000);
        assert!(sample_entropy(&s, 2, 0.2).unwrap() < sample_entropy(&n, 2, 0.2).unwrap());
        assert!(approximate_entropy(&s, 2, 0.2).unwrap() < approximate_entropy(&n, 2, 0.2).unwrap());
    }

    #[test]
    fn isotropic_features() {
        let (x, y) = bivariate(10_000, 1.0, 1.0, 0.0, 77);
        let f = dispersion_features(&x, &y, &x, &y, 0.68);
        let gi = f[7].unwrap();
        assert!((1.0..=1.05).contains(&gi), "{gi}");
        assert!((f[8].unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn single_point_recording() {
        let x = vec![47.5; 400];
        let y = vec![31.5; 400];
        let f = dispersion_features(&x, &y, &x, &y, 0.68);
        assert_eq!(f[0], Some(47.5));
        assert_eq!(f[1], Some(31.5));
        assert!(f[2..].iter().all(Option::is_none));
    }

    #[test]
    fn two_cluster_feature() {
        let (mut x, mut y) = cluster(1500, 30.0, 30.0, 0.5, 12);
        let (x2, y2) = cluster(1500, 40.0, 30.0, 0.5, 13);
        x.extend(x2);
        y.extend(y2);
        let f = dispersion_features(&x, &y, &x, &y, 0.68);
        assert_eq!(f[6], Some(2.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gi_at_least_one_and_translation_invariant(
            seed in 0u64..10_000,
            sx in 0.1f64..5.0,
            sy in 0.1f64..5.0,
            rho in -0.9f64..0.9,
            tx in -50.0f64..50.0,
            ty in -50.0f64..50.0,
        ) {
            let (x, y) = bivariate(300, sx, sy, rho, seed);
            let e = ellipse_stats(&x, &y).unwrap();
            prop_assert!(e.gi >= 1.0);
            let xt: Vec<f64> = x.iter().map(|v| v + tx).collect();
            let yt: Vec<f64> = y.iter().map(|v| v + ty).collect();
            let t = ellipse_stats(&xt, &yt).unwrap();
            prop_assert!((t.gi - e.gi).abs() < 1e-6 * e.gi);
            prop_assert!((t.rho - e.rho).abs() < 1e-9);
            prop_assert!((t.bcea_deg2 - e.bcea_deg2).abs() < 1e-6 * e.bcea_deg2);
        }
    }
}
