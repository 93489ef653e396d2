//! Induced curvature against central differences of the induced connection
//! coefficients, with an O(h^2) convergence demonstration, plus the
//! transversal identity set on a wide probe pool.

mod common;

use nullstat_core::ambient::Conn;
use nullstat_core::curvature::{curvature_data, gauss_codazzi_residuals};
use nullstat_core::fixtures;
use nullstat_core::hypersurface::PointCtx;
use nullstat_core::induced::{induced_connection_coeffs_at, PointTensors};
use nullstat_core::sampling::Stream;

fn ind_gamma_at(fx: &fixtures::Fixture, u: &[f64], which: Conn) -> Vec<Vec<Vec<f64>>> {
    let ctx = PointCtx::new(&fx.space, &fx.hyp, u, 3).unwrap();
    let pt = PointTensors::compute(&ctx).unwrap();
    let (g, torsion) = induced_connection_coeffs_at(&pt, which);
    assert!(torsion < 1e-9, "induced torsion {torsion:e}");
    g
}

/// Curvature from centered differences of the induced coefficients at
/// step h (coordinate fields, so no bracket terms).
fn fd_curvature(fx: &fixtures::Fixture, u: &[f64], which: Conn, h: f64) -> Vec<Vec<Vec<Vec<f64>>>> {
    let mp1 = u.len();
    let g0 = ind_gamma_at(fx, u, which);
    let mut dg = vec![vec![vec![vec![0.0; mp1]; mp1]; mp1]; mp1];
    for c in 0..mp1 {
        let mut up = u.to_vec();
        up[c] += h;
        let mut dn = u.to_vec();
        dn[c] -= h;
        let gp = ind_gamma_at(fx, &up, which);
        let gm = ind_gamma_at(fx, &dn, which);
        for l in 0..mp1 {
            for i in 0..mp1 {
                for j in 0..mp1 {
                    dg[c][l][i][j] = (gp[l][i][j] - gm[l][i][j]) / (2.0 * h);
                }
            }
        }
    }
    let mut r = vec![vec![vec![vec![0.0; mp1]; mp1]; mp1]; mp1];
    for l in 0..mp1 {
        for k in 0..mp1 {
            for i in 0..mp1 {
                for j in 0..mp1 {
                    let mut v = dg[i][l][j][k] - dg[j][l][i][k];
                    for e in 0..mp1 {
                        v += g0[l][i][e] * g0[e][j][k] - g0[l][j][e] * g0[e][i][k];
                    }
                    r[l][k][i][j] = v;
                }
            }
        }
    }
    r
}

fn max_error(fx: &fixtures::Fixture, u: &[f64], which: Conn, h: f64) -> f64 {
    let ctx = PointCtx::new(&fx.space, &fx.hyp, u, 3).unwrap();
    let pt = PointTensors::compute(&ctx).unwrap();
    let cd = curvature_data(&ctx, &pt).unwrap();
    let jet_r = match which {
        Conn::D => &cd.ind.r,
        Conn::Dstar => &cd.ind_star.r,
        Conn::D0 => unreachable!(),
    };
    let fd_r = fd_curvature(fx, u, which, h);
    let mp1 = u.len();
    let mut worst: f64 = 0.0;
    for l in 0..mp1 {
        for k in 0..mp1 {
            for i in 0..mp1 {
                for j in 0..mp1 {
                    worst = worst.max((jet_r[l][k][i][j] - fd_r[l][k][i][j]).abs());
                }
            }
        }
    }
    worst
}

#[test]
fn induced_curvature_matches_fd_oracle_with_h2_convergence() {
    for name in [fixtures::PAPER_CONE_LC, fixtures::PAPER_CONE_SYMK] {
        let fx = fixtures::build(name).unwrap();
        let u = [0.2, 1.3, 0.9];
        for which in [Conn::D, Conn::Dstar] {
            let errs: Vec<f64> = [1e-3, 5e-4, 2.5e-4]
                .iter()
                .map(|h| max_error(&fx, &u, which, *h))
                .collect();
            assert!(
                errs.iter().all(|e| *e < 1e-4),
                "{name}: errors {errs:?} exceed 1e-4"
            );
            // Central differences converge at second order; allow slack for
            // the higher-order terms in the ratio.
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                assert!(
                    (2.5..6.5).contains(&ratio),
                    "{name}: convergence ratio {ratio} outside the O(h^2) band ({errs:?})"
                );
            }
        }
    }
}

#[test]
fn p0_curvature_zero_against_oracle() {
    let fx = fixtures::build(fixtures::FLAT_PLANE_P0).unwrap();
    let u = [0.1, -0.4, 0.8];
    assert!(max_error(&fx, &u, Conn::D, 1e-3) < 1e-12);
}

#[test]
fn transversal_identities_hold_on_wide_probe_pools() {
    for name in [fixtures::PAPER_CONE_LC, fixtures::PAPER_CONE_SYMK] {
        let fx = fixtures::build(name).unwrap();
        for (pi, u) in [[0.0, 1.0, 1.0], [0.3, 1.9, 0.7], [0.5, 0.8, 2.2]]
            .iter()
            .enumerate()
        {
            let ctx = PointCtx::new(&fx.space, &fx.hyp, u, 3).unwrap();
            let pt = PointTensors::compute(&ctx).unwrap();
            let cd = curvature_data(&ctx, &pt).unwrap();
            let mut stream = Stream::new(11, "codazzi-wide", pi as u64);
            let mut probes = Vec::new();
            for _ in 0..20 {
                probes.push([stream.vector(3), stream.vector(3), stream.vector(3)]);
            }
            for (check, resid) in gauss_codazzi_residuals(&pt, &cd, &probes) {
                assert!(resid < 1e-5, "{name} {check} residual {resid:e} at {u:?}");
            }
        }
    }
}
