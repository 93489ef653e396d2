//! Independent reference implementations used only by the test suite.
//! Everything here works by plain repeated evaluation, never through the
//! jet machinery, so agreement with the primary paths is meaningful.

#![allow(dead_code)]

use nullstat_core::ambient::{AmbientSpace, ConnMode};
use nullstat_core::Expr;

#[derive(Debug, Clone, Copy)]
pub struct FdConfig {
    pub h: f64,
    pub richardson_levels: usize,
}

impl FdConfig {
    pub fn for_order(order: usize) -> FdConfig {
        let h = match order {
            0 | 1 => 1e-5,
            2 => 3e-4,
            _ => 2e-3,
        };
        FdConfig {
            h,
            richardson_levels: 1,
        }
    }
}

fn stencil(f: &dyn Fn(&[f64]) -> f64, point: &[f64], dir: &[f64], order: usize, h: f64) -> f64 {
    let at = |t: f64| -> f64 {
        let shifted: Vec<f64> = point.iter().zip(dir).map(|(p, d)| p + t * d).collect();
        f(&shifted)
    };
    match order {
        0 => at(0.0),
        1 => (at(h) - at(-h)) / (2.0 * h),
        2 => (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h),
        3 => (at(2.0 * h) - 2.0 * at(h) + 2.0 * at(-h) - at(-2.0 * h)) / (2.0 * h * h * h),
        _ => panic!("finite differences implemented up to order 3"),
    }
}

/// Central-difference directional derivative with Richardson extrapolation;
/// error O(h^2 4^-levels) for smooth integrands.
pub fn fd_derivative(
    f: &dyn Fn(&[f64]) -> f64,
    point: &[f64],
    dir: &[f64],
    order: usize,
    cfg: FdConfig,
) -> f64 {
    assert!(cfg.richardson_levels <= 3);
    assert!(cfg.h >= 1e-8 && cfg.h <= 1e-2);
    let mut table: Vec<f64> = (0..=cfg.richardson_levels)
        .map(|k| stencil(f, point, dir, order, cfg.h / f64::powi(2.0, k as i32)))
        .collect();
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    table[0]
}

fn invert_small(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        assert!(d.abs() > 1e-14, "oracle inverse: singular metric");
        for x in m[col].iter_mut() {
            *x /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                for c in 0..2 * n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    m.iter().map(|r| r[n..].to_vec()).collect()
}

/// Curvature of a flat-background connection deformed by a difference
/// tensor: `R(X,Y)Z = (d_X K)(Y,Z) - (d_Y K)(X,Z) + K(X,K(Y,Z)) - K(Y,K(X,Z))`
/// with the coordinate derivative. Requires a constant metric and
/// difference-tensor input mode. Returns `r[a][b][c][d]` with the same
/// index convention as the engine's curvature array.
pub fn flat_deformed_curvature(space: &AmbientSpace, p: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = space.dim();
    let entries = match space.mode() {
        ConnMode::KLower(e) => e,
        ConnMode::Explicit { .. } => panic!("oracle requires difference-tensor mode"),
    };
    // Constant metric: evaluate at p and at a shifted point to confirm.
    let eval_metric = |x: &[f64]| -> Vec<Vec<f64>> {
        space
            .metric_exprs()
            .iter()
            .map(|row| row.iter().map(|e| e.eval(x).unwrap()).collect())
            .collect()
    };
    let g0 = eval_metric(p);
    {
        let shifted: Vec<f64> = p.iter().map(|v| v + 0.1).collect();
        let g1 = eval_metric(&shifted);
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (g0[i][j] - g1[i][j]).abs() < 1e-13,
                    "oracle requires a constant metric"
                );
            }
        }
    }
    let ginv = invert_small(&g0);

    let k_lower = |x: &[f64], a: usize, b: usize, c: usize| -> f64 {
        let mut key = [a, b, c];
        key.sort_unstable();
        entries
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, e): &(_, Expr)| e.eval(x).unwrap())
            .unwrap_or(0.0)
    };
    let k_up = |x: &[f64], a: usize, b: usize, c: usize| -> f64 {
        (0..n).map(|d| ginv[a][d] * k_lower(x, d, b, c)).sum()
    };

    let cfg = FdConfig::for_order(1);
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut dir_c = vec![0.0; n];
                    dir_c[c] = 1.0;
                    let mut dir_d = vec![0.0; n];
                    dir_d[d] = 1.0;
                    let dk_c = fd_derivative(&|x: &[f64]| k_up(x, a, d, b), p, &dir_c, 1, cfg);
                    let dk_d = fd_derivative(&|x: &[f64]| k_up(x, a, c, b), p, &dir_d, 1, cfg);
                    let mut v = dk_c - dk_d;
                    for e in 0..n {
                        v += k_up(p, a, c, e) * k_up(p, e, d, b)
                            - k_up(p, a, d, e) * k_up(p, e, c, b);
                    }
                    r[a][b][c][d] = v;
                }
            }
        }
    }
    r
}
