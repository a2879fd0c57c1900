//! Adaptive Gauss–Kronrod (7/15) quadrature in one and two dimensions.
//!
//! Two-dimensional integrals with a stationary kernel `K(t1 − t2)` are folded
//! onto the triangle `t2 < t1`, which keeps the `|t1 − t2|` kink on the
//! boundary of every cell.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, max_subdivisions: 4000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// `∫|f|` over the cell, used for the round-off floor.
    magnitude: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn kronrod_cell<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Cell {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
        *slot = (lo, hi);
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (lo, hi)) in fv.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let value = kronrod * half;
    let resabs = abs_sum * half.abs();
    let resasc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Cell { a, b, value, error, magnitude: resabs }
}

/// Adaptive integration over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_with_breakpoints(f, &[a, b], tol)
}

/// Adaptive integration over consecutive intervals `points[i]..points[i+1]`.
pub fn integrate_with_breakpoints<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Estimate> {
    if points.len() < 2 || points[0] == points[points.len() - 1] {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut heap: BinaryHeap<Cell> =
        points.windows(2).filter(|w| w[0] != w[1]).map(|w| kronrod_cell(&mut f, w[0], w[1])).collect();
    let mut evaluations = 15 * heap.len();
    let mut frozen: Vec<Cell> = Vec::new();

    loop {
        let (value, error, magnitude) = heap
            .iter()
            .chain(&frozen)
            .fold((0.0, 0.0, 0.0), |acc, c| (acc.0 + c.value, acc.1 + c.error, acc.2 + c.magnitude));
        let target = tol.abs.max(tol.rel * value.abs()).max(100.0 * f64::EPSILON * magnitude);
        if error <= target {
            return Ok(Estimate { value, error, evaluations });
        }
        let Some(worst) = heap.pop() else {
            return Ok(Estimate { value, error, evaluations });
        };
        if heap.len() + frozen.len() >= tol.max_subdivisions {
            return Err(Error::Quadrature(format!(
                "{} subdivisions exhausted (estimate {value:e}, error {error:e}, target {target:e})",
                tol.max_subdivisions
            )));
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a).abs() < 1e-14 * (worst.a.abs() + worst.b.abs()) {
            frozen.push(worst);
            continue;
        }
        heap.push(kronrod_cell(&mut f, worst.a, mid));
        heap.push(kronrod_cell(&mut f, mid, worst.b));
        evaluations += 30;
    }
}

/// `∫₀ᵗ∫₀ᵗ w(t1) w(t2) K(t1 − t2) dt1 dt2` for an even kernel `K`, evaluated as
/// `2∫₀ᵗ dt1 w(t1) ∫₀^{t1} dt2 w(t2) K(t1 − t2)`.
///
/// `breakpoints` (inside `[0, t]`) split the outer integral; the inner one is
/// split at the same points below `t1`.
pub fn integrate_stationary_square<W, K>(
    weight: W,
    kernel: K,
    t: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate>
where
    W: Fn(f64) -> f64,
    K: Fn(f64) -> f64,
{
    if t <= 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut outer_points: Vec<f64> = std::iter::once(0.0)
        .chain(breakpoints.iter().copied().filter(|&p| p > 0.0 && p < t))
        .chain(std::iter::once(t))
        .collect();
    outer_points.dedup();
    let inner_tol = Tolerance { abs: 0.05 * tol.abs / t, rel: 0.05 * tol.rel, ..tol };
    let mut evaluations = 0usize;
    let mut failure: Option<Error> = None;
    let outer = integrate_with_breakpoints(
        |t1| {
            let w1 = weight(t1);
            if w1 == 0.0 || t1 <= 0.0 {
                return 0.0;
            }
            let mut inner_points: Vec<f64> = outer_points.iter().copied().filter(|&p| p < t1).collect();
            inner_points.push(t1);
            match integrate_with_breakpoints(|t2| weight(t2) * kernel(t1 - t2), &inner_points, inner_tol) {
                Ok(est) => {
                    evaluations += est.evaluations;
                    2.0 * w1 * est.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &outer_points,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut est = outer?;
    est.evaluations += evaluations;
    Ok(est)
}
