//! Derivative-free root search for angle-valued functions.
//!
//! The residual is wrapped to `(-pi, pi]`; a sign change between adjacent
//! scan points only counts when the wrapped values differ by less than `pi`,
//! which rejects the `+pi -> -pi` jump of the principal branch.

use std::f64::consts::PI;

pub const DEFAULT_SCAN_POINTS: usize = 4096;

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut w = theta.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleRoot {
    pub x: f64,
    /// Wrapped residual at `x`.
    pub residual: f64,
}

/// All roots of `wrap(f(x)) = 0` found by scanning `points` samples of
/// `[lo, hi]` and bisecting every admissible sign change to machine precision.
///
/// Roots closer together than 1.5 scan cells are merged, keeping the one with
/// the smallest residual (then the smallest `|x|`). A run of grid points that
/// are all exact roots therefore collapses to one root.
pub fn angle_roots<F>(f: F, lo: f64, hi: f64, points: usize) -> Vec<AngleRoot>
where
    F: Fn(f64) -> f64,
{
    let points = points.max(2);
    let g = |x: f64| wrap_angle(f(x));
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();

    let mut roots = Vec::new();
    for i in 0..points {
        if gs[i] == 0.0 {
            roots.push(AngleRoot {
                x: xs[i],
                residual: 0.0,
            });
            continue;
        }
        if i + 1 == points {
            break;
        }
        let (ga, gb) = (gs[i], gs[i + 1]);
        if gb == 0.0 || ga.signum() == gb.signum() || (ga - gb).abs() >= PI {
            continue;
        }
        roots.push(bisect(&g, xs[i], xs[i + 1], ga));
    }
    dedupe(roots, 1.5 * step.abs())
}

fn bisect<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64, mut ga: f64) -> AngleRoot {
    let mut gb = g(b);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return AngleRoot {
                x: mid,
                residual: 0.0,
            };
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
            gb = gm;
        }
    }
    if ga.abs() <= gb.abs() {
        AngleRoot { x: a, residual: ga }
    } else {
        AngleRoot { x: b, residual: gb }
    }
}

fn dedupe(mut roots: Vec<AngleRoot>, min_gap: f64) -> Vec<AngleRoot> {
    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut out: Vec<AngleRoot> = Vec::with_capacity(roots.len());
    let mut cluster_end = f64::NEG_INFINITY;
    for r in roots {
        match out.last_mut() {
            Some(best) if r.x - cluster_end <= min_gap => {
                let better = r.residual.abs() < best.residual.abs()
                    || (r.residual.abs() == best.residual.abs() && r.x.abs() < best.x.abs());
                if better {
                    *best = r;
                }
            }
            _ => out.push(r),
        }
        cluster_end = r.x;
    }
    out
}
