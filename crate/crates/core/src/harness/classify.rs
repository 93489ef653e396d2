//! Hypersurface classification: totally geodesic, umbilical (tangential and
//! normal), the radical sum fit, and screen conformality, each as a
//! least-squares fit with a residual-based verdict.

use alloc::vec;
use alloc::vec::Vec;

use crate::ambient::Conn;
use crate::error::Result;
use crate::math;
use crate::sampling::Stream;

use super::Scene;

#[derive(Debug, Clone)]
pub struct PropertyFit {
    /// "holds" | "fails" | "vacuous".
    pub verdict: &'static str,
    pub max_residual: f64,
    /// Range of the fitted coefficient over the sample points (0 for
    /// coefficient-free properties).
    pub coeff_min: f64,
    pub coeff_max: f64,
}

impl PropertyFit {
    fn vacuous() -> PropertyFit {
        PropertyFit {
            verdict: "vacuous",
            max_residual: 0.0,
            coeff_min: 0.0,
            coeff_max: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub totally_geodesic_d: PropertyFit,
    pub totally_geodesic_dstar: PropertyFit,
    pub tangential_umbilic_d: PropertyFit,
    pub tangential_umbilic_dstar: PropertyFit,
    pub normal_umbilic_d: PropertyFit,
    pub normal_umbilic_dstar: PropertyFit,
    pub umbilic_sum: PropertyFit,
    pub screen_conformal: PropertyFit,
    pub screen_conformal_operators: PropertyFit,
}

struct FitAcc {
    max_residual: f64,
    coeff_min: f64,
    coeff_max: f64,
    any: bool,
    vacuous: bool,
}

impl FitAcc {
    fn new() -> FitAcc {
        FitAcc {
            max_residual: 0.0,
            coeff_min: f64::INFINITY,
            coeff_max: f64::NEG_INFINITY,
            any: false,
            vacuous: false,
        }
    }

    fn add(&mut self, coeff: f64, residual: f64) {
        self.any = true;
        self.max_residual = math::fmax(self.max_residual, residual);
        self.coeff_min = math::fmin(self.coeff_min, coeff);
        self.coeff_max = math::fmax(self.coeff_max, coeff);
    }

    fn finish(self, tol: f64) -> PropertyFit {
        if !self.any || self.vacuous {
            return PropertyFit::vacuous();
        }
        PropertyFit {
            verdict: if self.max_residual < tol {
                "holds"
            } else {
                "fails"
            },
            max_residual: self.max_residual,
            coeff_min: self.coeff_min,
            coeff_max: self.coeff_max,
        }
    }
}

/// Classifies the hypersurface over the configured sample set.
pub fn classify_hypersurface(scene: &Scene<'_>) -> Result<Classification> {
    let points = crate::sampling::sample_points(
        scene.hyp.domain(),
        scene.cfg.points,
        scene.cfg.points / 2,
        scene.cfg.seed,
    );
    let mut data = Vec::with_capacity(points.len());
    for u in &points {
        let ctx =
            crate::hypersurface::PointCtx::new(scene.space, scene.hyp, u, scene.cfg.jet_order)?;
        data.push(crate::induced::PointTensors::compute(&ctx)?);
    }
    classify_points(scene, &data.iter().collect::<Vec<_>>())
}

/// Classification over precomputed per-point tensors.
pub(super) fn classify_points(
    scene: &Scene<'_>,
    pts: &[&crate::induced::PointTensors],
) -> Result<Classification> {
    let cfg = &scene.cfg;
    let tol = cfg.tol2;

    let mut tg = [FitAcc::new(), FitAcc::new()];
    let mut tang_umb = [FitAcc::new(), FitAcc::new()];
    let mut norm_umb = [FitAcc::new(), FitAcc::new()];
    let mut sum_fit = FitAcc::new();
    let mut conf_forms = FitAcc::new();
    let mut conf_ops = FitAcc::new();

    for (pi, pt) in pts.iter().enumerate() {
        let pt = *pt;
        let mp1 = pt.mp1;
        let m = pt.w_amb.len();
        let mut stream = Stream::new(cfg.seed, "classify", pi as u64);
        let mut probes: Vec<Vec<f64>> = vec![pt.xi_param.clone()];
        probes.extend(pt.w_param.iter().cloned());
        for _ in 0..6 {
            probes.push(stream.vector(mp1));
        }
        let screen_probes: Vec<Vec<f64>> = {
            let mut sp: Vec<Vec<f64>> = pt.w_param.to_vec();
            for _ in 0..4 {
                let c = stream.vector(m);
                let mut v = vec![0.0; mp1];
                for (j, cj) in c.iter().enumerate() {
                    for i in 0..mp1 {
                        v[i] += cj * pt.w_param[j][i];
                    }
                }
                sp.push(v);
            }
            sp
        };

        for (si, which) in [(0usize, Conn::D), (1usize, Conn::Dstar)] {
            // Totally geodesic: max |B| over probe pairs.
            let mut max_b: f64 = 0.0;
            for x in &probes {
                for y in &probes {
                    max_b = math::fmax(max_b, math::fabs(pt.b_of(which, x, y)));
                }
            }
            tg[si].add(0.0, max_b);

            // Tangential umbilicity: least-squares k with B ~ k g.
            let mut num = 0.0;
            let mut den = 0.0;
            for x in &probes {
                for y in &probes {
                    let gxy = pt.pair(&pt.push(x), &pt.push(y));
                    num += pt.b_of(which, x, y) * gxy;
                    den += gxy * gxy;
                }
            }
            if den < 1e-12 {
                tang_umb[si].vacuous = true;
            } else {
                let k = num / den;
                let mut resid: f64 = 0.0;
                for x in &probes {
                    for y in &probes {
                        let gxy = pt.pair(&pt.push(x), &pt.push(y));
                        resid = math::fmax(resid, math::fabs(pt.b_of(which, x, y) - k * gxy));
                    }
                }
                tang_umb[si].add(k, resid);
            }

            // Normal umbilicity: shape operator ~ k Id. The shape operator
            // paired with D~ is A*_N (unstarred side), with D~* is A_N;
            // property (v) speaks of A*_N and (vi) of A_N, so side 0 here
            // is "with respect to D~".
            let mut num = 0.0;
            let mut den = 0.0;
            for x in &probes {
                let sx = pt.shape_of(which, x);
                let xa = pt.push(x);
                for a in 0..pt.dim {
                    num += sx[a] * xa[a];
                    den += xa[a] * xa[a];
                }
            }
            if den < 1e-12 {
                norm_umb[si].vacuous = true;
            } else {
                let k = num / den;
                let mut resid: f64 = 0.0;
                for x in &probes {
                    let sx = pt.shape_of(which, x);
                    let xa = pt.push(x);
                    for a in 0..pt.dim {
                        resid = math::fmax(resid, math::fabs(sx[a] - k * xa[a]));
                    }
                }
                norm_umb[si].add(k, resid);
            }
        }

        // Radical sum fit on screen probes: (Abar*_xi + Abar_xi) X ~ rho X.
        {
            let mut num = 0.0;
            let mut den = 0.0;
            for x in &screen_probes {
                let a = pt.abar_of(Conn::D, x);
                let b = pt.abar_of(Conn::Dstar, x);
                let xs = pt.screen_coeffs(x);
                for j in 0..m {
                    num += (a[j] + b[j]) * xs[j];
                    den += xs[j] * xs[j];
                }
            }
            if den < 1e-12 {
                sum_fit.vacuous = true;
            } else {
                let rho = num / den;
                let mut resid: f64 = 0.0;
                for x in &screen_probes {
                    let a = pt.abar_of(Conn::D, x);
                    let b = pt.abar_of(Conn::Dstar, x);
                    let xs = pt.screen_coeffs(x);
                    for j in 0..m {
                        resid = math::fmax(resid, math::fabs(a[j] + b[j] - rho * xs[j]));
                    }
                }
                sum_fit.add(rho, resid);
            }
        }

        // Screen conformality, form version: C + C* ~ sigma (B + B*) on
        // screen pairs.
        {
            let mut num = 0.0;
            let mut den = 0.0;
            for x in &screen_probes {
                for y in &screen_probes {
                    let bsum = pt.b_of(Conn::D, x, y) + pt.b_of(Conn::Dstar, x, y);
                    let csum = pt.c_of(Conn::D, x, &pt.screen_coeffs(y))
                        + pt.c_of(Conn::Dstar, x, &pt.screen_coeffs(y));
                    num += csum * bsum;
                    den += bsum * bsum;
                }
            }
            if den < 1e-12 {
                conf_forms.vacuous = true;
            } else {
                let sigma = num / den;
                let mut resid: f64 = 0.0;
                for x in &screen_probes {
                    for y in &screen_probes {
                        let bsum = pt.b_of(Conn::D, x, y) + pt.b_of(Conn::Dstar, x, y);
                        let csum = pt.c_of(Conn::D, x, &pt.screen_coeffs(y))
                            + pt.c_of(Conn::Dstar, x, &pt.screen_coeffs(y));
                        resid = math::fmax(resid, math::fabs(csum - sigma * bsum));
                    }
                }
                conf_forms.add(sigma, resid);
            }
        }

        // Screen conformality, operator version: A_N ~ phi Abar*_xi and
        // A*_N ~ phi* Abar_xi on screen probes (screen parts compared).
        {
            let mut ok = true;
            let mut worst: f64 = 0.0;
            let mut phis = [0.0f64; 2];
            for (slot, (shape_side, abar_side)) in [(Conn::Dstar, Conn::Dstar), (Conn::D, Conn::D)]
                .iter()
                .enumerate()
            {
                let mut num = 0.0;
                let mut den = 0.0;
                for x in &screen_probes {
                    let shape = pt.shape_of(*shape_side, x);
                    let (s, _b, _n) = screen_split(pt, &shape);
                    let ab = pt.abar_of(*abar_side, x);
                    for j in 0..m {
                        num += s[j] * ab[j];
                        den += ab[j] * ab[j];
                    }
                }
                if den < 1e-12 {
                    ok = false;
                    continue;
                }
                let phi = num / den;
                phis[slot] = phi;
                for x in &screen_probes {
                    let shape = pt.shape_of(*shape_side, x);
                    let (s, _b, _n) = screen_split(pt, &shape);
                    let ab = pt.abar_of(*abar_side, x);
                    for j in 0..m {
                        worst = math::fmax(worst, math::fabs(s[j] - phi * ab[j]));
                    }
                }
            }
            if !ok {
                conf_ops.vacuous = true;
            } else {
                // Non-vanishing conformal factors are part of the property.
                if math::fabs(phis[0]) < 1e-10 || math::fabs(phis[1]) < 1e-10 {
                    worst = math::fmax(worst, 1.0);
                }
                conf_ops.add(phis[0], worst);
            }
        }
    }

    Ok(Classification {
        totally_geodesic_d: tg[0].take_finish(cfg.tol2),
        totally_geodesic_dstar: tg[1].take_finish(cfg.tol2),
        tangential_umbilic_d: tang_umb[0].take_finish(tol),
        tangential_umbilic_dstar: tang_umb[1].take_finish(tol),
        normal_umbilic_d: norm_umb[0].take_finish(tol),
        normal_umbilic_dstar: norm_umb[1].take_finish(tol),
        umbilic_sum: sum_fit.finish(tol),
        screen_conformal: conf_forms.finish(tol),
        screen_conformal_operators: conf_ops.finish(tol),
    })
}

impl FitAcc {
    fn take_finish(&mut self, tol: f64) -> PropertyFit {
        let acc = core::mem::replace(self, FitAcc::new());
        acc.finish(tol)
    }
}

/// Splits an ambient tangent vector into W-basis screen components plus the
/// radical and transversal coefficients, value-level.
fn screen_split(pt: &crate::induced::PointTensors, v: &[f64]) -> (Vec<f64>, f64, f64) {
    // Solve [W | xi | N] c = v with plain f64 via the jets machinery.
    use crate::jet::Jet;
    use crate::linalg;
    let dim = pt.dim;
    let m = pt.w_amb.len();
    let mut cols = linalg::jmat_zero(dim, dim, 0);
    for a in 0..dim {
        for (k, w) in pt.w_amb.iter().enumerate() {
            cols[a][k] = Jet::constant(w[a], 0);
        }
        cols[a][m] = Jet::constant(pt.xi_amb[a], 0);
        cols[a][m + 1] = Jet::constant(pt.n_amb[a], 0);
    }
    let rhs: Vec<Jet> = v.iter().map(|x| Jet::constant(*x, 0)).collect();
    let sol = linalg::lu_solve(&cols, &rhs, "screen split")
        .unwrap_or_else(|_| alloc::vec![Jet::constant(0.0, 0); dim]);
    (
        sol[..m].iter().map(|j| j.val()).collect(),
        sol[m].val(),
        sol[m + 1].val(),
    )
}
