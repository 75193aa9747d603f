//! One-dimensional sup/inf search over sampled parameter ranges.
//!
//! Each level samples a uniform grid, polishes the best local extrema by
//! golden-section search inside their grid brackets, and compares against
//! the previous level. Levels double the grid until two consecutive
//! polished results agree.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Max,
    Min,
}

impl Mode {
    fn score(self, v: f64) -> f64 {
        match self {
            Mode::Max => v,
            Mode::Min => -v,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct LineExtremum {
    pub arg: f64,
    pub value: f64,
    pub points: usize,
    pub achieved_tol: f64,
}

const CANDIDATES: usize = 6;
const GOLDEN_ITERS: usize = 60;

fn golden<F>(f: &F, mut a: f64, mut b: f64, mode: Mode) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = mode.score(f(c)?);
    let mut fd = mode.score(f(d)?);
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = mode.score(f(c)?);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = mode.score(f(d)?);
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Samples `n` cells of `[lo, hi]` and polishes the best local extrema.
/// With `periodic`, `hi` is identified with `lo` and not sampled.
pub(crate) fn scan_level<F>(f: &F, lo: f64, hi: f64, n: usize, periodic: bool, mode: Mode) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let count = if periodic { n } else { n + 1 };
    let h = (hi - lo) / n as f64;
    let xs: Vec<f64> = (0..count).map(|j| lo + h * j as f64).collect();
    let raw: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let scores: Vec<f64> = raw.iter().map(|&v| mode.score(v)).collect();

    let neighbour = |j: isize| -> Option<usize> {
        if periodic {
            Some(j.rem_euclid(count as isize) as usize)
        } else if j < 0 || j >= count as isize {
            None
        } else {
            Some(j as usize)
        }
    };

    let mut peaks: Vec<usize> = (0..count)
        .filter(|&j| {
            let s = scores[j];
            let left = neighbour(j as isize - 1).is_none_or(|k| scores[k] <= s);
            let right = neighbour(j as isize + 1).is_none_or(|k| scores[k] <= s);
            left && right
        })
        .collect();
    // deterministic ordering: score, then index
    peaks.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    peaks.truncate(CANDIDATES);

    let mut best_j = 0;
    for j in 1..count {
        if scores[j] > scores[best_j] {
            best_j = j;
        }
    }
    let mut best = (xs[best_j], scores[best_j]);

    let polished: Vec<(f64, f64)> = peaks
        .par_iter()
        .map(|&j| {
            let a = if periodic || j > 0 { xs[j] - h } else { xs[j] };
            let b = if periodic || j + 1 < count { xs[j] + h } else { xs[j] };
            let (a, b) = if !periodic { (a.max(lo), b.min(hi)) } else { (a, b) };
            golden(f, a, b, mode)
        })
        .collect::<Result<Vec<_>>>()?;
    for (x, s) in polished {
        if s > best.1 {
            best = (x, s);
        }
    }
    Ok((best.0, mode.score(best.1)))
}

/// Grid doubling from `2^initial_log2` up to `2^max_log2` cells until
/// successive polished extrema agree within `tol` (relative above 1).
pub(crate) fn refine<F>(
    f: &F,
    lo: f64,
    hi: f64,
    periodic: bool,
    mode: Mode,
    initial_log2: u32,
    max_log2: u32,
    tol: f64,
) -> Result<LineExtremum>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let mut prev: Option<f64> = None;
    let mut points = 0usize;
    for level in initial_log2..=max_log2 {
        let n = 1usize << level;
        let (arg, value) = scan_level(f, lo, hi, n, periodic, mode)?;
        points = n;
        if let Some(p) = prev {
            let gap = (value - p).abs();
            if gap <= tol * value.abs().max(1.0) {
                return Ok(LineExtremum {
                    arg,
                    value,
                    points,
                    achieved_tol: gap,
                });
            }
        }
        prev = Some(value);
    }
    Err(Error::NoConvergence(format!(
        "extremum search did not settle within 2^{max_log2} grid points ({points} sampled)"
    )))
}
