//! Scalar-generic numeric helpers: tied ranks, Pearson correlation, and
//! ordinary least squares, written against `num-traits` so they run on any
//! float type. The crate root fixes concrete aliases for callers that do
//! not care.

use num_traits::{Float, FromPrimitive};

use crate::Rational;

/// Floating-point scalar the numeric layer is generic over.
pub trait Scalar: Float + FromPrimitive + std::fmt::Debug {}

impl<T> Scalar for T where T: Float + FromPrimitive + std::fmt::Debug {}

pub fn rational_to<R: Scalar>(r: &Rational) -> R {
    R::from_u64(*r.numer()).expect("small count") / R::from_u64(*r.denom()).expect("small count")
}

/// 1-based ranks with ties resolved to the average rank of the tied group.
/// Inputs must be finite.
pub fn ranks<R: Scalar>(values: &[R]) -> Vec<R> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*a].partial_cmp(&values[*b]).expect("finite values"));
    let mut out = vec![R::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Average of ranks i+1 ..= j+1.
        let avg = R::from_usize(i + j + 2).expect("rank fits") / R::from_u8(2).unwrap();
        for k in i..=j {
            out[order[k]] = avg;
        }
        i = j + 1;
    }
    out
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson<R: Scalar>(xs: &[R], ys: &[R]) -> Option<R> {
    assert_eq!(xs.len(), ys.len());
    let n = R::from_usize(xs.len())?;
    let mean = |vs: &[R]| vs.iter().fold(R::zero(), |a, b| a + *b) / n;
    let mx = mean(xs);
    let my = mean(ys);
    let mut cov = R::zero();
    let mut vx = R::zero();
    let mut vy = R::zero();
    for (x, y) in xs.iter().zip(ys) {
        let dx = *x - mx;
        let dy = *y - my;
        cov = cov + dx * dy;
        vx = vx + dx * dx;
        vy = vy + dy * dy;
    }
    if vx.is_zero() || vy.is_zero() {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

/// Least-squares line through (x, y): `Some((slope, intercept))`, or `None`
/// for fewer than two points or zero variance in x.
pub fn linear_fit<R: Scalar>(xs: &[R], ys: &[R]) -> Option<(R, R)> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let n = R::from_usize(xs.len())?;
    let mx = xs.iter().fold(R::zero(), |a, b| a + *b) / n;
    let my = ys.iter().fold(R::zero(), |a, b| a + *b) / n;
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for (x, y) in xs.iter().zip(ys) {
        let dx = *x - mx;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * (*y - my);
    }
    if sxx.is_zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_average_ties() {
        let r = ranks(&[10.0f64, 20.0, 20.0, 30.0]);
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0]);
        let r32 = ranks(&[1.0f32, 3.0, 2.0]);
        assert_eq!(r32, vec![1.0f32, 3.0, 2.0]);
    }

    #[test]
    fn pearson_detects_degenerate_sides() {
        assert!(pearson(&[1.0f64, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
        let r = pearson(&[1.0f64, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0f64, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (slope, intercept) = linear_fit(&xs, &ys).unwrap();
        assert!((slope - 2.5).abs() < 1e-12);
        assert!((intercept + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rational_conversion_is_exact_for_small_counts() {
        let r = Rational::new(3, 4);
        let f: f64 = rational_to(&r);
        assert_eq!(f, 0.75);
        let f32v: f32 = rational_to(&r);
        assert_eq!(f32v, 0.75f32);
    }
}
