//! Gap segmentation and Savitzky-Golay smoothing of the gaze traces.
//!
//! Smoothing runs per segment and never reads across a missing gap. Boundary
//! samples of a segment are fitted on a truncated, asymmetric window rather
//! than a padded one.

use crate::error::FilterError;
use crate::model::{GazeRecording, Segment};

pub const DEFAULT_WINDOW: usize = 11;
pub const DEFAULT_ORDER: usize = 3;

/// Maximal runs of `true` in `valid`, in order.
pub fn segment_mask(valid: &[bool]) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &v) in valid.iter().enumerate() {
        match (v, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(Segment { start: s, end: i });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Segment {
            start: s,
            end: valid.len(),
        });
    }
    out
}

/// Maximal runs of non-missing gaze samples.
pub fn segment(recording: &GazeRecording) -> Vec<Segment> {
    segment_mask(&recording.gaze_valid)
}

/// Solves `m x = b` in place by Gaussian elimination with partial pivoting.
fn solve_small(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let q = b.len();
    for col in 0..q {
        let piv = (col..q)
            .max_by(|&a, &c| m[a][col].abs().total_cmp(&m[c][col].abs()))
            .unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..q {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..q {
                    m[r][c] -= f * m[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; q];
    for r in (0..q).rev() {
        let mut s = b[r];
        for c in r + 1..q {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    x
}

/// Weights that evaluate the least-squares polynomial of degree `order`,
/// fitted on sample offsets `-left..=right`, at offset 0.
pub fn savgol_weights(left: usize, right: usize, order: usize) -> Vec<f64> {
    let q = order + 1;
    let offsets: Vec<f64> = (0..=left + right)
        .map(|k| k as f64 - left as f64)
        .collect();
    // Normal matrix entries are power sums of the offsets.
    let mut power_sums = vec![0.0; 2 * q - 1];
    for &t in &offsets {
        let mut p = 1.0;
        for s in power_sums.iter_mut() {
            *s += p;
            p *= t;
        }
    }
    let m: Vec<Vec<f64>> = (0..q)
        .map(|r| (0..q).map(|c| power_sums[r + c]).collect())
        .collect();
    let mut e0 = vec![0.0; q];
    e0[0] = 1.0;
    let c = solve_small(m, e0);
    offsets
        .iter()
        .map(|&t| {
            let mut p = 1.0;
            let mut w = 0.0;
            for cj in &c {
                w += cj * p;
                p *= t;
            }
            w
        })
        .collect()
}

/// Savitzky-Golay smoothing of one contiguous segment.
///
/// Segments shorter than `window` pass through unchanged. Near the ends the
/// fit window shrinks to the available samples; the polynomial order is kept
/// unless the truncated window has too few points to support it.
pub fn savgol_smooth(data: &[f64], window: usize, order: usize) -> Result<Vec<f64>, FilterError> {
    if window.is_multiple_of(2) || window <= order {
        return Err(FilterError::InvalidWindow { window, order });
    }
    let n = data.len();
    if n < window || n < order + 1 {
        return Ok(data.to_vec());
    }
    let half = window / 2;
    let interior = savgol_weights(half, half, order);
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let left = i.min(half);
        let right = (n - 1 - i).min(half);
        let start = i - left;
        let slice = &data[start..=i + right];
        *o = if left == half && right == half {
            dot(&interior, slice)
        } else {
            let w = savgol_weights(left, right, order.min(left + right));
            dot(&w, slice)
        };
    }
    Ok(out)
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Gaze after segment-wise smoothing. Values outside segments are zero and
/// flagged invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedGaze {
    pub x_deg: Vec<f64>,
    pub y_deg: Vec<f64>,
    pub valid: Vec<bool>,
    pub segments: Vec<Segment>,
}

/// Segments the recording and smooths x and y independently within each segment.
pub fn smooth_gaze(
    recording: &GazeRecording,
    window: usize,
    order: usize,
) -> Result<SmoothedGaze, FilterError> {
    let segments = segment(recording);
    let n = recording.len();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for seg in &segments {
        let sx = savgol_smooth(&recording.x_deg[seg.start..seg.end], window, order)?;
        let sy = savgol_smooth(&recording.y_deg[seg.start..seg.end], window, order)?;
        x[seg.start..seg.end].copy_from_slice(&sx);
        y[seg.start..seg.end].copy_from_slice(&sy);
    }
    Ok(SmoothedGaze {
        x_deg: x,
        y_deg: y,
        valid: recording.gaze_valid.clone(),
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cubic(i: f64) -> f64 {
        2.0 + 3.0 * i + i * i - 0.5 * i * i * i
    }

    /// Least-squares fit of the 11x4 Vandermonde system via SVD, evaluated
    /// at the window center for an impulse at position 5.
    fn oracle_center_weights() -> Vec<f64> {
        use nalgebra::{DMatrix, DVector};
        let a = DMatrix::from_fn(11, 4, |r, c| (r as f64 - 5.0).powi(c as i32));
        let svd = a.clone().svd(true, true);
        (0..11)
            .map(|k| {
                let mut e = DVector::zeros(11);
                e[k] = 1.0;
                let coef = svd.solve(&e, 1e-14).unwrap();
                coef[0]
            })
            .collect()
    }

    #[test]
    fn segments_from_mask() {
        assert_eq!(
            segment_mask(&[true, true, false, true]),
            vec![Segment { start: 0, end: 2 }, Segment { start: 3, end: 4 }]
        );
        assert!(segment_mask(&[false; 5]).is_empty());
        assert_eq!(segment_mask(&[true; 100]), vec![Segment { start: 0, end: 100 }]);
    }

    #[test]
    fn impulse_center_coefficient() {
        let mut x = vec![0.0; 11];
        x[5] = 1.0;
        let y = savgol_smooth(&x, 11, 3).unwrap();
        assert!((y[5] - 0.2075).abs() < 1e-3);
        let oracle = oracle_center_weights();
        assert!((y[5] - oracle[5]).abs() < 1e-12);
        let w = savgol_weights(5, 5, 3);
        for (a, b) in w.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((w[5] - 89.0 / 429.0).abs() < 1e-12);
    }

    #[test]
    fn reproduces_cubic_everywhere() {
        let x: Vec<f64> = (0..30).map(|i| cubic(i as f64)).collect();
        let y = savgol_smooth(&x, 11, 3).unwrap();
        for i in 0..30 {
            assert!((x[i] - y[i]).abs() <= 1e-9, "i={i} {} {}", x[i], y[i]);
        }
    }

    #[test]
    fn constant_and_short_inputs() {
        let y = savgol_smooth(&[5.0; 40], 11, 3).unwrap();
        assert!(y.iter().all(|v| (v - 5.0).abs() < 1e-12));
        let short = [1.0, 7.0, -2.0, 4.0];
        assert_eq!(savgol_smooth(&short, 11, 3).unwrap(), short.to_vec());
    }

    #[test]
    fn invalid_windows() {
        assert!(savgol_smooth(&[0.0; 20], 10, 3).is_err());
        assert!(savgol_smooth(&[0.0; 20], 3, 3).is_err());
        assert!(savgol_smooth(&[0.0; 20], 5, 3).is_ok());
    }

    #[test]
    fn small_window_drops_order_at_edges() {
        let x: Vec<f64> = (0..12).map(|i| (i * i) as f64).collect();
        let y = savgol_smooth(&x, 5, 3).unwrap();
        assert_eq!(y.len(), 12);
        assert!(y.iter().all(|v| v.is_finite()));
    }

    proptest! {
        #[test]
        fn linearity(
            xs in prop::collection::vec(-50.0f64..50.0, 11..60),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let ys: Vec<f64> = xs.iter().map(|v| v.sin() * 10.0).collect();
            let combo: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
            let lhs = savgol_smooth(&combo, 11, 3).unwrap();
            let sx = savgol_smooth(&xs, 11, 3).unwrap();
            let sy = savgol_smooth(&ys, 11, 3).unwrap();
            for i in 0..xs.len() {
                prop_assert!((lhs[i] - (a * sx[i] + b * sy[i])).abs() < 1e-9);
            }
        }

        #[test]
        fn gap_isolation(
            first in prop::collection::vec(-10.0f64..10.0, 1..40),
            second in prop::collection::vec(-10.0f64..10.0, 1..40),
            gap in 1usize..5,
        ) {
            let n = first.len() + gap + second.len();
            let mut x_deg = first.clone();
            x_deg.extend(std::iter::repeat_n(0.0, gap));
            x_deg.extend(second.iter().copied());
            let mut valid = vec![true; first.len()];
            valid.extend(std::iter::repeat_n(false, gap));
            valid.extend(std::iter::repeat_n(true, second.len()));
            let rec = GazeRecording {
                subject_id: "s".into(),
                condition: crate::model::Condition::Ride,
                fs_hz: 100.0,
                y_deg: x_deg.clone(),
                x_deg,
                gaze_valid: valid,
                pupil_left_mm: crate::model::MaskedSeries::missing(n),
                pupil_right_mm: crate::model::MaskedSeries::missing(n),
            };
            let sm = smooth_gaze(&rec, 11, 3).unwrap();
            let a = savgol_smooth(&first, 11, 3).unwrap();
            let b = savgol_smooth(&second, 11, 3).unwrap();
            prop_assert_eq!(&sm.x_deg[..first.len()], &a[..]);
            prop_assert_eq!(&sm.x_deg[first.len() + gap..], &b[..]);
        }
    }
}
