// Check evaluators. Included into harness/mod.rs so the catalog, the
// shared per-point data, and the evaluators stay one module.

/// Induced-derivative data for one ordered field pair.
struct DInd {
    amb: Vec<f64>,
    screen: Vec<f64>,
    eta: f64,
}

/// One frame build along a pool field, with every pool field evaluated on
/// it and the induced derivatives of all pairs precomputed.
struct AtX {
    frame: crate::hypersurface::FrameJets,
    fj: Vec<FieldJets>,
    /// `d[side][y]`: D_X Y for this X, side 0 = unstarred, 1 = starred.
    d: [Vec<DInd>; 2],
}

/// Shared probe-field data at one point: the pool is `xi`, the screen
/// fields, seeded random affine fields, and seeded random screen-valued
/// fields (usable by the screen-only checks).
struct FieldData {
    labels: Vec<String>,
    /// Indices of screen-valued pool entries.
    screen_idx: Vec<usize>,
    param_vals: Vec<Vec<f64>>,
    at: Vec<AtX>,
    /// Lie brackets `[X, Y]` in parameter components, by pool index.
    bracket: Vec<Vec<Vec<f64>>>,
}

const N_RANDOM_FIELDS: usize = 3;
const N_SCREEN_RANDOM_FIELDS: usize = 2;

fn build_field_data(
    scene: &Scene<'_>,
    ctx: &PointCtx<'_>,
    point_index: usize,
) -> Result<FieldData> {
    let hyp = scene.hyp;
    let m = hyp.screen_dim();
    let params: Vec<&str> = hyp.params().iter().map(|s| s.as_str()).collect();

    let mut fields = vec![TangentField::Xi];
    let mut labels = vec![String::from("xi")];
    let mut screen_idx = Vec::new();
    for k in 0..m {
        screen_idx.push(fields.len());
        fields.push(TangentField::Screen(k));
        labels.push(format!("W{}", k + 1));
    }
    let mut stream = Stream::new(scene.cfg.seed, "field-probes", point_index as u64);
    for r in 0..N_RANDOM_FIELDS {
        fields.push(random_linear_field(hyp, &ctx.u0, &mut stream)?);
        labels.push(format!("rnd{r}"));
    }
    // Screen-valued random fields: affine combinations of the declared
    // screen fields.
    if let Some(ws) = hyp.screen_exprs() {
        for r in 0..N_SCREEN_RANDOM_FIELDS {
            let coeffs: Vec<String> = (0..m)
                .map(|_| {
                    let a = stream.symmetric();
                    let b = 0.5 * stream.symmetric();
                    format!("({a} + {b}*({} - {}))", params[0], ctx.u0[0])
                })
                .collect();
            let mut comps = Vec::with_capacity(params.len());
            for c in 0..params.len() {
                let mut text = String::from("0");
                for (j, co) in coeffs.iter().enumerate() {
                    text = format!("{text} + {co}*({})", ws[j][c]);
                }
                comps.push(Expr::parse(&text, &params)?);
            }
            screen_idx.push(fields.len());
            fields.push(TangentField::Coords(comps));
            labels.push(format!("srnd{r}"));
        }
    }

    let n = fields.len();
    let zero = vec![0.0; hyp.n_params()];
    let frame0 = ctx.frame(&zero, 0)?;
    let mut param_vals = Vec::with_capacity(n);
    for f in &fields {
        let fj = field_jets(ctx, &frame0, f)?;
        param_vals.push(linalg::jvec_vals(&fj.param));
    }

    let mut at = Vec::with_capacity(n);
    for x in &fields {
        let probe = field_jets(ctx, &frame0, x)?;
        let dir = linalg::jvec_vals(&probe.param);
        let frame = ctx.frame(&dir, 1)?;
        let fj: Vec<FieldJets> = fields
            .iter()
            .map(|f| field_jets(ctx, &frame, f))
            .collect::<Result<_>>()?;
        let xj = field_jets(ctx, &frame, x)?;
        let mut d: [Vec<DInd>; 2] = [Vec::with_capacity(n), Vec::with_capacity(n)];
        for (si, which) in [(0usize, Conn::D), (1usize, Conn::Dstar)] {
            for yj in &fj {
                let full = crate::induced::dtilde(&frame, which, &xj, yj);
                let (s, b, _nc) = frame.split(&full)?;
                let eta = b.val();
                let screen: Vec<f64> = s.iter().map(|j| j.val()).collect();
                let mut amb = vec![0.0; ctx.space.dim()];
                for a in 0..ctx.space.dim() {
                    let mut acc = b.val() * frame.xi_amb[a].val();
                    for (k, w) in frame.w_amb.iter().enumerate() {
                        acc += screen[k] * w[a].val();
                    }
                    amb[a] = acc;
                }
                d[si].push(DInd { amb, screen, eta });
            }
        }
        at.push(AtX { frame, fj, d });
    }

    let mut bracket = vec![vec![Vec::new(); n]; n];
    for x in 0..n {
        for y in 0..n {
            let br = lie_bracket(&at[0].fj[x], &at[0].fj[y]);
            bracket[x][y] = linalg::jvec_vals(&br);
        }
    }

    Ok(FieldData {
        labels,
        screen_idx,
        param_vals,
        at,
        bracket,
    })
}

struct CheckOutput {
    max: Max,
    details: Vec<(String, f64)>,
}

impl CheckOutput {
    fn new() -> CheckOutput {
        CheckOutput {
            max: Max::new(),
            details: Vec::new(),
        }
    }

    fn detail_max(&mut self, key: &str, v: f64) {
        match self.details.iter_mut().find(|(k, _)| k == key) {
            Some((_, old)) => {
                if v > *old {
                    *old = v;
                }
            }
            None => self.details.push((String::from(key), v)),
        }
    }
}

/// `X g(Y, Z)` from cached jets: the frame along X carries the derivative.
fn xg(atx: &AtX, y: usize, z: usize) -> f64 {
    atx.frame
        .pair(&atx.fj[y].amb, &atx.fj[z].amb)
        .coeff(1)
}

fn pair_vals(pt: &PointTensors, u: &[f64], v: &[f64]) -> f64 {
    pt.pair(u, v)
}

fn evaluate_check(
    id: &str,
    scene: &Scene<'_>,
    per: &[PerPoint<'_>],
    validation: &StatValidationReport,
    classification: &Classification,
) -> Result<CheckOutput> {
    let cfg = &scene.cfg;
    let mut out = CheckOutput::new();

    match id {
        "ID-ambient-statistical" => {
            let r = math::fmax(
                validation.torsion_residual,
                math::fmax(validation.codazzi_residual, validation.duality_residual),
            );
            let (point, probe) = match &validation.duality_worst {
                Some(w) => (
                    per.get(w.point_index).map(|p| p.u.clone()),
                    Some(format!("{},{},{}", w.labels[0], w.labels[1], w.labels[2])),
                ),
                None => (None, None),
            };
            out.max.value = r;
            out.max.point = point;
            out.max.probe = probe;
            out.detail_max("torsion", validation.torsion_residual);
            out.detail_max("codazzi", validation.codazzi_residual);
            out.detail_max("duality", validation.duality_residual);
        }

        "ID-pro5-torsion" => {
            for pp in per {
                out.max
                    .update(pp.pt.unstarred.torsion_residual, &pp.u, "D");
                out.max.update(pp.pt.starred.torsion_residual, &pp.u, "D*");
            }
        }

        "ID-pro5-symB" => {
            for pp in per {
                for (side, label) in [(&pp.pt.unstarred, "B"), (&pp.pt.starred, "B*")] {
                    for i in 0..pp.pt.mp1 {
                        for j in 0..pp.pt.mp1 {
                            out.max.update(
                                math::fabs(side.b[i][j] - side.b[j][i]),
                                &pp.u,
                                label,
                            );
                        }
                    }
                }
            }
        }

        "ID-lhsm1" => {
            for pp in per {
                let fd = &pp.fd;
                let n = fd.labels.len();
                for x in 0..n {
                    let atx = &fd.at[x];
                    for y in 0..n {
                        for z in 0..n {
                            let lead = xg(atx, y, z);
                            let g_dxy_z =
                                pair_vals(&pp.pt, &atx.d[0][y].amb, &pt_amb(pp, &fd.param_vals[z]));
                            let g_y_dsxz =
                                pair_vals(&pp.pt, &pt_amb(pp, &fd.param_vals[y]), &atx.d[1][z].amb);
                            let b = pp.pt.b_of(Conn::D, &fd.param_vals[x], &fd.param_vals[y]);
                            let bs = pp.pt.b_of(Conn::Dstar, &fd.param_vals[x], &fd.param_vals[z]);
                            let eta_z = pp.pt.eta_of(&fd.param_vals[z]);
                            let eta_y = pp.pt.eta_of(&fd.param_vals[y]);
                            let resid = math::fabs(
                                lead - g_dxy_z - g_y_dsxz - b * eta_z - bs * eta_y,
                            );
                            out.max.update(
                                resid,
                                &pp.u,
                                &format!("{},{},{}", fd.labels[x], fd.labels[y], fd.labels[z]),
                            );
                        }
                    }
                }
            }
        }

        "ID-lhsm2" | "ID-classical-nonmetric" => {
            let classical = id == "ID-classical-nonmetric";
            for pp in per {
                let fd = &pp.fd;
                let n = fd.labels.len();
                for x in 0..n {
                    let atx = &fd.at[x];
                    for y in 0..n {
                        for z in 0..n {
                            let lead = xg(atx, y, z);
                            let ya = pt_amb(pp, &fd.param_vals[y]);
                            let za = pt_amb(pp, &fd.param_vals[z]);
                            let dg = |side: usize| -> f64 {
                                lead - pair_vals(&pp.pt, &atx.d[side][y].amb, &za)
                                    - pair_vals(&pp.pt, &ya, &atx.d[side][z].amb)
                            };
                            let b = |which: Conn, u: usize, v: usize| {
                                pp.pt.b_of(which, &fd.param_vals[u], &fd.param_vals[v])
                            };
                            let eta_z = pp.pt.eta_of(&fd.param_vals[z]);
                            let eta_y = pp.pt.eta_of(&fd.param_vals[y]);
                            let resid = if classical {
                                math::fabs(
                                    dg(0) - b(Conn::D, x, y) * eta_z - b(Conn::D, x, z) * eta_y,
                                )
                            } else {
                                let rhs = (b(Conn::D, x, y) + b(Conn::Dstar, x, y)) * eta_z
                                    + (b(Conn::D, x, z) + b(Conn::Dstar, x, z)) * eta_y;
                                math::fabs(dg(0) + dg(1) - rhs)
                            };
                            out.max.update(
                                resid,
                                &pp.u,
                                &format!("{},{},{}", fd.labels[x], fd.labels[y], fd.labels[z]),
                            );
                        }
                    }
                }
            }
        }

        "ID-eq34a" | "ID-classical-Bxi" => {
            for (pi, pp) in per.iter().enumerate() {
                let (vs, labels) = value_pool(&pp.pt, id, pi, cfg.seed, 8);
                for (v, l) in vs.iter().zip(&labels) {
                    let b = pp.pt.b_of(Conn::D, v, &pp.pt.xi_param);
                    let resid = if id == "ID-eq34a" {
                        math::fabs(b + pp.pt.b_of(Conn::Dstar, v, &pp.pt.xi_param))
                    } else {
                        math::fabs(b)
                    };
                    out.max.update(resid, &pp.u, l);
                }
            }
        }

        "ID-eq34b" => {
            for (pi, pp) in per.iter().enumerate() {
                let (vs, labels) = value_pool(&pp.pt, id, pi, cfg.seed, 8);
                for (v, l) in vs.iter().zip(&labels) {
                    let a_star = pp.pt.shape_of(Conn::D, v);
                    let a = pp.pt.shape_of(Conn::Dstar, v);
                    let sum: Vec<f64> = a.iter().zip(&a_star).map(|(p, q)| p + q).collect();
                    out.max
                        .update(math::fabs(pp.pt.pair(&sum, &pp.pt.n_amb)), &pp.u, l);
                }
            }
        }

        "ID-eq18a" | "ID-eq18b" => {
            let (c_side, shape_side) = if id == "ID-eq18a" {
                (Conn::D, Conn::Dstar) // C with A_N
            } else {
                (Conn::Dstar, Conn::D) // C* with A*_N
            };
            for (pi, pp) in per.iter().enumerate() {
                let (vs, labels) = value_pool(&pp.pt, id, pi, cfg.seed, 6);
                for (x, lx) in vs.iter().zip(&labels) {
                    let shape_x = pp.pt.shape_of(shape_side, x);
                    for (y, ly) in vs.iter().zip(&labels) {
                        let py = pp.pt.screen_coeffs(y);
                        let c = pp.pt.c_of(c_side, x, &py);
                        let py_amb = pp.pt.screen_to_ambient(&py);
                        let resid = math::fabs(c - pp.pt.pair(&shape_x, &py_amb));
                        out.max.update(resid, &pp.u, &format!("{lx},{ly}"));
                    }
                }
            }
        }

        "ID-07D" | "ID-08D" | "ID-07L" | "ID-08L" => {
            let (b_side, abar_side) = if id.starts_with("ID-07") {
                (Conn::D, Conn::Dstar)
            } else {
                (Conn::Dstar, Conn::D)
            };
            let literal = id.ends_with('L');
            let other = match b_side {
                Conn::D => Conn::Dstar,
                _ => Conn::D,
            };
            for (pi, pp) in per.iter().enumerate() {
                let (vs, labels) = value_pool(&pp.pt, id, pi, cfg.seed, 6);
                for (x, lx) in vs.iter().zip(&labels) {
                    let abar_x = pp.pt.screen_to_ambient(&pp.pt.abar_of(abar_side, x));
                    let b_other_xi = pp.pt.b_of(other, x, &pp.pt.xi_param);
                    for (y, ly) in vs.iter().zip(&labels) {
                        let b = pp.pt.b_of(b_side, x, y);
                        let g_ab = pp.pt.pair(&abar_x, &pt_amb(pp, y));
                        let resid = if literal {
                            math::fabs(b - g_ab - b_other_xi)
                        } else {
                            math::fabs(b - g_ab + b_other_xi * pp.pt.eta_of(y))
                        };
                        out.max.update(resid, &pp.u, &format!("{lx},{ly}"));
                    }
                }
            }
        }

        "ID-abar-sum" => {
            for pp in per {
                let a = pp.pt.abar_of(Conn::D, &pp.pt.xi_param);
                let b = pp.pt.abar_of(Conn::Dstar, &pp.pt.xi_param);
                let r = a
                    .iter()
                    .zip(&b)
                    .map(|(p, q)| math::fabs(p + q))
                    .fold(0.0, math::fmax);
                out.max.update(r, &pp.u, "xi");
            }
        }

        "ID-pr7-duality" | "ID-pr7-torsion" => {
            for pp in per {
                let fd = &pp.fd;
                for &x in &fd.screen_idx {
                    let atx = &fd.at[x];
                    for &y in &fd.screen_idx {
                        if id == "ID-pr7-torsion" {
                            // nabla_X Y - nabla_Y X - P[X,Y] in the W basis.
                            let aty = &fd.at[y];
                            let pbr = pp.pt.screen_coeffs(&fd.bracket[x][y]);
                            for j in 0..pbr.len() {
                                let r = math::fabs(
                                    atx.d[0][y].screen[j] - aty.d[0][x].screen[j] - pbr[j],
                                );
                                out.max.update(
                                    r,
                                    &pp.u,
                                    &format!("{},{}", fd.labels[x], fd.labels[y]),
                                );
                                let r = math::fabs(
                                    atx.d[1][y].screen[j] - aty.d[1][x].screen[j] - pbr[j],
                                );
                                out.max.update(
                                    r,
                                    &pp.u,
                                    &format!("{},{}", fd.labels[x], fd.labels[y]),
                                );
                            }
                            continue;
                        }
                        for &z in &fd.screen_idx {
                            // X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla*_X Z):
                            // the screen parts pair like the full tangential
                            // parts since g(xi, .) vanishes on TM.
                            let lead = xg(atx, y, z);
                            let nab_y = pp.pt.screen_to_ambient(&atx.d[0][y].screen);
                            let nab_z = pp.pt.screen_to_ambient(&atx.d[1][z].screen);
                            let resid = math::fabs(
                                lead - pair_vals(&pp.pt, &nab_y, &pt_amb(pp, &fd.param_vals[z]))
                                    - pair_vals(&pp.pt, &pt_amb(pp, &fd.param_vals[y]), &nab_z),
                            );
                            out.max.update(
                                resid,
                                &pp.u,
                                &format!("{},{},{}", fd.labels[x], fd.labels[y], fd.labels[z]),
                            );
                        }
                    }
                }
            }
        }

        "ID-eps-tau" => {
            // eps(X) = eta(D_X xi) against the Weingarten reading of tau;
            // the pool index 0 is the radical field.
            for pp in per {
                let fd = &pp.fd;
                for x in 0..fd.labels.len() {
                    let eps_x = fd.at[x].d[0][0].eta;
                    let tau_def: f64 = pp
                        .pt
                        .starred
                        .tau_wein
                        .iter()
                        .zip(&fd.param_vals[x])
                        .map(|(t, v)| t * v)
                        .sum();
                    out.max
                        .update(math::fabs(eps_x + tau_def), &pp.u, &fd.labels[x]);
                }
            }
        }

        "ID-tau-consistency" => {
            for pp in per {
                for i in 0..pp.pt.mp1 {
                    let tau_gap =
                        math::fabs(pp.pt.unstarred.tau_dec[i] - pp.pt.starred.tau_wein[i]);
                    let tau_star_gap =
                        math::fabs(pp.pt.starred.tau_dec[i] - pp.pt.unstarred.tau_wein[i]);
                    out.max.update(tau_gap, &pp.u, "tau");
                    out.max.update(tau_star_gap, &pp.u, "tau*");
                    out.detail_max("tau_gap", tau_gap);
                    out.detail_max("tau_star_gap", tau_star_gap);
                }
            }
        }

        "ID-pr6-witness" => {
            for (pi, pp) in per.iter().enumerate() {
                let (vs, _labels) = value_pool(&pp.pt, id, pi, cfg.seed, 8);
                for v in &vs {
                    out.detail_max(
                        "max_B_X_xi",
                        math::fabs(pp.pt.b_of(Conn::D, v, &pp.pt.xi_param)),
                    );
                    out.detail_max(
                        "max_Bstar_X_xi",
                        math::fabs(pp.pt.b_of(Conn::Dstar, v, &pp.pt.xi_param)),
                    );
                }
                let bxixi = pp.pt.b_of(Conn::D, &pp.pt.xi_param, &pp.pt.xi_param);
                let bsxixi = pp.pt.b_of(Conn::Dstar, &pp.pt.xi_param, &pp.pt.xi_param);
                out.detail_max("B_xi_xi", math::fabs(bxixi));
                out.detail_max("Bstar_xi_xi", math::fabs(bsxixi));
                out.max.update(math::fabs(bxixi), &pp.u, "xi,xi");
            }
        }

        "ID-pr88a" | "ID-pr88b" => {
            let side = if id == "ID-pr88a" { 0 } else { 1 };
            let which = if side == 0 { Conn::D } else { Conn::Dstar };
            for pp in per {
                let fd = &pp.fd;
                for &x in &fd.screen_idx {
                    let atx = &fd.at[x];
                    for &y in &fd.screen_idx {
                        let c_basis =
                            pp.pt
                                .c_of(which, &fd.param_vals[x], &pp.pt.screen_coeffs(&fd.param_vals[y]));
                        let g_dxy_n = atx.d[side][y].eta;
                        out.max.update(
                            math::fabs(c_basis - g_dxy_n),
                            &pp.u,
                            &format!("{},{}", fd.labels[x], fd.labels[y]),
                        );
                    }
                }
            }
        }

        "ID-pr8a" | "ID-pr8b" => {
            let which = if id == "ID-pr8a" { Conn::D } else { Conn::Dstar };
            for pp in per {
                let fd = &pp.fd;
                for &x in &fd.screen_idx {
                    for &y in &fd.screen_idx {
                        let lhs = pp.pt.eta_of(&fd.bracket[x][y]);
                        let cxy = pp.pt.c_of(
                            which,
                            &fd.param_vals[x],
                            &pp.pt.screen_coeffs(&fd.param_vals[y]),
                        );
                        let cyx = pp.pt.c_of(
                            which,
                            &fd.param_vals[y],
                            &pp.pt.screen_coeffs(&fd.param_vals[x]),
                        );
                        out.max.update(
                            math::fabs(lhs - (cxy - cyx)),
                            &pp.u,
                            &format!("{},{}", fd.labels[x], fd.labels[y]),
                        );
                    }
                }
            }
        }

        "ID-classical-B" => {
            for pp in per {
                for i in 0..pp.pt.mp1 {
                    for j in 0..pp.pt.mp1 {
                        out.max.update(
                            math::fabs(pp.pt.unstarred.b[i][j] - pp.pt.starred.b[i][j]),
                            &pp.u,
                            "basis",
                        );
                    }
                }
            }
        }

        "ID-classical-Axixi" => {
            for pp in per {
                let a = pp.pt.abar_of(Conn::D, &pp.pt.xi_param);
                out.max.update(
                    a.iter().map(|v| math::fabs(*v)).fold(0.0, math::fmax),
                    &pp.u,
                    "xi",
                );
            }
        }

        "ID-ambient-curv-duality" => {
            for (pi, pp) in per.iter().enumerate() {
                let mut stream = Stream::new(cfg.seed, id, pi as u64);
                let probes: Vec<Vec<f64>> =
                    (0..5).map(|_| stream.vector(pp.pt.dim)).collect();
                for x in &probes {
                    for y in &probes {
                        for z in &probes {
                            for w in &probes {
                                let rs = pp.cd.r_amb_star.apply(x, y, z);
                                let r = pp.cd.r_amb.apply(x, y, w);
                                let resid = math::fabs(
                                    pair_vals(&pp.pt, &rs, w) + pair_vals(&pp.pt, &r, z),
                                );
                                out.max.update(resid, &pp.u, "random");
                            }
                        }
                    }
                }
            }
        }

        "ID-bianchi1" => {
            for pp in per {
                out.max
                    .update(crate::ambient::bianchi_residual(&pp.cd.r_amb), &pp.u, "R");
                out.max.update(
                    crate::ambient::bianchi_residual(&pp.cd.r_amb_star),
                    &pp.u,
                    "R*",
                );
            }
        }

        "ID-g1" | "ID-g2" | "ID-g3" | "ID-g4" | "ID-g5" | "ID-g6" | "ID-g7" | "ID-g8"
        | "ID-gRxiN" | "ID-gRstarxiN" => {
            let key = &id[3..];
            for (pi, pp) in per.iter().enumerate() {
                let probes = codazzi_probes(&pp.pt, pi, cfg.seed);
                let all = gauss_codazzi_residuals(&pp.pt, &pp.cd, &probes);
                for (name, resid) in all {
                    if name == key {
                        out.max.update(resid, &pp.u, "probe-set");
                    }
                }
            }
        }

        "ID-ric-paths" => {
            for (pi, pp) in per.iter().enumerate() {
                let (vs, labels) = value_pool(&pp.pt, id, pi, cfg.seed, 4);
                for (x, lx) in vs.iter().zip(&labels) {
                    for (y, ly) in vs.iter().zip(&labels) {
                        for which in [Conn::D, Conn::Dstar] {
                            let r = ricci02_at(&pp.pt, &pp.cd, which, x, y);
                            out.max
                                .update(r.difference, &pp.u, &format!("{lx},{ly}"));
                        }
                    }
                }
            }
        }

        "ID-rics" | "ID-ricss" => {
            let which = if id == "ID-rics" { Conn::D } else { Conn::Dstar };
            for (pi, pp) in per.iter().enumerate() {
                let (vs, labels) = value_pool(&pp.pt, id, pi, cfg.seed, 4);
                for (x, lx) in vs.iter().zip(&labels) {
                    for (y, ly) in vs.iter().zip(&labels) {
                        let (_a, _c, resid) = ricci_asymmetry(&pp.pt, &pp.cd, which, x, y);
                        out.max.update(resid, &pp.u, &format!("{lx},{ly}"));
                    }
                }
            }
        }

        "ID-ric-corollary" => {
            let mut max_c: f64 = 0.0;
            let mut max_asym: f64 = 0.0;
            for (pi, pp) in per.iter().enumerate() {
                for row in pp
                    .pt
                    .unstarred
                    .c_w
                    .iter()
                    .chain(pp.pt.starred.c_w.iter())
                {
                    for v in row {
                        max_c = math::fmax(max_c, math::fabs(*v));
                    }
                }
                let (vs, _) = value_pool(&pp.pt, id, pi, cfg.seed, 2);
                for x in &vs {
                    for y in &vs {
                        for which in [Conn::D, Conn::Dstar] {
                            let (a, _c, _r) = ricci_asymmetry(&pp.pt, &pp.cd, which, x, y);
                            max_asym = math::fmax(max_asym, math::fabs(a));
                        }
                    }
                }
            }
            out.detail_max("max_screen_form", max_c);
            out.detail_max("max_asymmetry", max_asym);
            let premise = max_c < cfg.tol2;
            let conclusion = max_asym < cfg.tol1.max(1e-9);
            out.max.value = if !premise || conclusion { 0.0 } else { 1.0 };
            out.max.point = per.first().map(|p| p.u.clone());
            out.max.probe = Some(String::from(if premise {
                "parallel screen"
            } else {
                "premise not met"
            }));
        }

        "ID-eq47" | "ID-12star" | "ID-nul" | "ID-k1n" => {
            let c = scene.space.constant_c();
            for pp in per {
                let sc = curvature_scalars_at(&pp.pt, &pp.cd, c);
                match id {
                    "ID-eq47" => {
                        out.max
                            .update(sc.eq47_residual.unwrap_or(0.0), &pp.u, "screen basis");
                    }
                    "ID-12star" => {
                        out.max.update(sc.reading_12star_sum, &pp.u, "sum reading");
                        out.detail_max("sum_reading", sc.reading_12star_sum);
                        for (i, r) in sc.reading_12star_per_i.iter().enumerate() {
                            out.detail_max(&format!("per_i_reading_{i}"), *r);
                        }
                    }
                    "ID-nul" => {
                        if let Some(r) = sc.nul {
                            out.max.update(r.derived, &pp.u, "eps-weighted");
                            out.detail_max("literal", r.literal);
                            out.detail_max("derived", r.derived);
                        }
                    }
                    _ => {
                        if let Some(r) = sc.k1n {
                            out.max.update(r.derived, &pp.u, "derived");
                            out.detail_max("literal", r.literal);
                            out.detail_max("derived", r.derived);
                        }
                    }
                }
            }
        }

        "ID-tg-equiv-D" | "ID-tg-equiv-Dstar" => {
            let starred = id.ends_with("Dstar");
            let (b_side, abar_side, dt_side) = if starred {
                (Conn::Dstar, Conn::D, 1usize)
            } else {
                (Conn::D, Conn::Dstar, 0usize)
            };
            let mut max_b: f64 = 0.0;
            let mut max_abar: f64 = 0.0;
            let mut max_nonrad: f64 = 0.0;
            let mut max_iv: f64 = 0.0;
            for (pi, pp) in per.iter().enumerate() {
                let (vs, _) = value_pool(&pp.pt, id, pi, cfg.seed, 4);
                for x in &vs {
                    for y in &vs {
                        max_b = math::fmax(max_b, math::fabs(pp.pt.b_of(b_side, x, y)));
                        // Reported only: the cross relation B_other = g(Abar X, Y).
                        let other = if starred { Conn::D } else { Conn::Dstar };
                        let abar_x = pp.pt.screen_to_ambient(&pp.pt.abar_of(other, x));
                        max_iv = math::fmax(
                            max_iv,
                            math::fabs(
                                pp.pt.b_of(other, x, y) - pp.pt.pair(&abar_x, &pt_amb(pp, y)),
                            ),
                        );
                    }
                    let ab = pp.pt.abar_of(abar_side, x);
                    max_abar = math::fmax(
                        max_abar,
                        ab.iter().map(|v| math::fabs(*v)).fold(0.0, math::fmax),
                    );
                }
                // Non-radical part of D~_X xi over the basis.
                let side = if dt_side == 0 {
                    &pp.pt.unstarred
                } else {
                    &pp.pt.starred
                };
                for i in 0..pp.pt.mp1 {
                    let screen_norm = side.abar[i]
                        .iter()
                        .map(|v| math::fabs(*v))
                        .fold(0.0, math::fmax);
                    let b_xi = math::fabs(pp.pt.b_of(b_side, &basis_unit(pp.pt.mp1, i), &pp.pt.xi_param));
                    max_nonrad = math::fmax(max_nonrad, math::fmax(screen_norm, b_xi));
                }
            }
            out.detail_max("max_B", max_b);
            out.detail_max("max_Abar", max_abar);
            out.detail_max("max_nonrad_Dxi", max_nonrad);
            out.detail_max("cross_relation", max_iv);
            let t = cfg.tol2;
            let flags = [max_b < t, max_abar < t, max_nonrad < t];
            let agree = flags.iter().all(|f| *f == flags[0]);
            out.max.value = if agree { 0.0 } else { 1.0 };
            out.max.point = per.first().map(|p| p.u.clone());
            out.max.probe = Some(format!(
                "indicators: B {}, Abar {}, rad-parallel {}",
                flags[0], flags[1], flags[2]
            ));
        }

        "ID-tg-both" => {
            let mut max_b: f64 = 0.0;
            let mut max_abar_sum: f64 = 0.0;
            let mut max_metric_sum: f64 = 0.0;
            let mut max_rad_sum: f64 = 0.0;
            for pp in per {
                let fd = &pp.fd;
                let n = fd.labels.len();
                for x in 0..n {
                    let xv = &fd.param_vals[x];
                    for y in 0..n {
                        let yv = &fd.param_vals[y];
                        max_b = math::fmax(
                            max_b,
                            math::fmax(
                                math::fabs(pp.pt.b_of(Conn::D, xv, yv)),
                                math::fabs(pp.pt.b_of(Conn::Dstar, xv, yv)),
                            ),
                        );
                        for z in 0..n {
                            let zv = &fd.param_vals[z];
                            let atx = &fd.at[x];
                            let lead = xg(atx, y, z);
                            let ya = pt_amb(pp, yv);
                            let za = pt_amb(pp, zv);
                            let dg0 = lead - pair_vals(&pp.pt, &atx.d[0][y].amb, &za)
                                - pair_vals(&pp.pt, &ya, &atx.d[0][z].amb);
                            let dg1 = lead - pair_vals(&pp.pt, &atx.d[1][y].amb, &za)
                                - pair_vals(&pp.pt, &ya, &atx.d[1][z].amb);
                            max_metric_sum = math::fmax(max_metric_sum, math::fabs(dg0 + dg1));
                        }
                    }
                    let a = pp.pt.abar_of(Conn::D, xv);
                    let b = pp.pt.abar_of(Conn::Dstar, xv);
                    let sum_norm = a
                        .iter()
                        .zip(&b)
                        .map(|(p, q)| math::fabs(p + q))
                        .fold(0.0, math::fmax);
                    max_abar_sum = math::fmax(max_abar_sum, sum_norm);
                    // Non-radical part of (D_X + D*_X) xi: screen part is
                    // -(Abar + Abar*) X.
                    max_rad_sum = math::fmax(max_rad_sum, sum_norm);
                }
            }
            out.detail_max("max_B_both", max_b);
            out.detail_max("max_Abar_sum", max_abar_sum);
            out.detail_max("max_metric_sum", max_metric_sum);
            out.detail_max("max_rad_sum", max_rad_sum);
            let t = cfg.tol2;
            let flags = [
                max_b < t,
                max_abar_sum < t,
                max_metric_sum < t,
                max_rad_sum < t,
            ];
            // Joint total geodesy forces the other three indicators to
            // vanish and conversely; individually they are not forced, so
            // the verdict compares (i) against the conjunction.
            let forward = !flags[0] || flags.iter().all(|f| *f);
            let backward = !(flags[1] && flags[2] && flags[3]) || flags[0];
            let agree = forward && backward;
            out.max.value = if agree { 0.0 } else { 1.0 };
            out.max.point = per.first().map(|p| p.u.clone());
            out.max.probe = Some(format!(
                "indicators: B {}, Abar-sum {}, metric-sum {}, rad-sum {}",
                flags[0], flags[1], flags[2], flags[3]
            ));
        }

        "ID-umbilic-sum" => {
            // Joint umbilicity of the pair forces the radical sum operator
            // to be a screen scaling; the converse recovered from the
            // derived transversal relations gives proportionality of
            // B + B* only, so that is the equivalence tested. Individual
            // umbilicity is reported alongside.
            // Pointwise least-squares fit of B + B* against g (the
            // proportionality function varies over the hypersurface).
            let mut bsum_fit_holds = true;
            for (pi, pp) in per.iter().enumerate() {
                let (vs, _) = value_pool(&pp.pt, id, pi, cfg.seed, 4);
                let mut num = 0.0;
                let mut den = 0.0;
                let mut pairs: Vec<(f64, f64)> = Vec::new();
                for x in &vs {
                    for y in &vs {
                        let bsum = pp.pt.b_of(Conn::D, x, y) + pp.pt.b_of(Conn::Dstar, x, y);
                        let gxy = pp.pt.pair(&pt_amb(pp, x), &pt_amb(pp, y));
                        num += bsum * gxy;
                        den += gxy * gxy;
                        pairs.push((bsum, gxy));
                    }
                }
                if den < 1e-12 {
                    continue;
                }
                let k = num / den;
                let resid = pairs
                    .iter()
                    .map(|(b, g)| math::fabs(b - k * g))
                    .fold(0.0, math::fmax);
                out.detail_max("bsum_fit_residual", resid);
                out.detail_max("bsum_fit_coeff", math::fabs(k));
                if resid >= cfg.tol2 {
                    bsum_fit_holds = false;
                }
            }
            let sum_op_holds = classification.umbilic_sum.verdict != "fails";
            out.detail_max(
                "umbilic_d_residual",
                classification.tangential_umbilic_d.max_residual,
            );
            out.detail_max(
                "umbilic_dstar_residual",
                classification.tangential_umbilic_dstar.max_residual,
            );
            out.detail_max("sum_fit_residual", classification.umbilic_sum.max_residual);
            out.max.value = if bsum_fit_holds == sum_op_holds { 0.0 } else { 1.0 };
            out.max.point = per.first().map(|p| p.u.clone());
            out.max.probe = Some(format!(
                "B+B* proportional: {bsum_fit_holds}, sum-op fit: {sum_op_holds}, umbilic individually: {}",
                classification.tangential_umbilic_d.verdict == "holds"
                    && classification.tangential_umbilic_dstar.verdict == "holds"
            ));
        }

        "ID-normal-umbilic" => {
            let premise = classification.normal_umbilic_d.verdict == "holds"
                && classification.normal_umbilic_dstar.verdict == "holds";
            let mut max_csum: f64 = 0.0;
            for pp in per {
                let m = pp.pt.w_amb.len();
                for i in 0..pp.pt.mp1 {
                    for j in 0..m {
                        max_csum = math::fmax(
                            max_csum,
                            math::fabs(
                                pp.pt.unstarred.c_w[i][j] + pp.pt.starred.c_w[i][j],
                            ),
                        );
                    }
                }
            }
            out.detail_max("max_C_plus_Cstar", max_csum);
            let conclusion = max_csum < cfg.tol2;
            out.max.value = if !premise || conclusion { 0.0 } else { 1.0 };
            out.max.point = per.first().map(|p| p.u.clone());
            out.max.probe = Some(String::from(if premise {
                "normally umbilical"
            } else {
                "premise not met"
            }));
        }

        "ID-screen-conformal" => {
            let sc_def = classification.screen_conformal_operators.verdict == "holds";
            let sc_forms = classification.screen_conformal.verdict == "holds";
            let either_vacuous = classification.screen_conformal.verdict == "vacuous"
                || classification.screen_conformal_operators.verdict == "vacuous";
            out.detail_max(
                "operator_fit_residual",
                classification.screen_conformal_operators.max_residual,
            );
            out.detail_max(
                "form_fit_residual",
                classification.screen_conformal.max_residual,
            );
            out.max.value = if either_vacuous || sc_def == sc_forms {
                0.0
            } else {
                1.0
            };
            out.max.point = per.first().map(|p| p.u.clone());
            out.max.probe = Some(format!(
                "operator fit: {sc_def}, form fit: {sc_forms}"
            ));
        }

        "ID-values-flat-plane-P0" => {
            for pp in per {
                let mut worst: f64 = 0.0;
                for side in [&pp.pt.unstarred, &pp.pt.starred] {
                    for row in &side.b {
                        for v in row {
                            worst = math::fmax(worst, math::fabs(*v));
                        }
                    }
                    for row in &side.c_w {
                        for v in row {
                            worst = math::fmax(worst, math::fabs(*v));
                        }
                    }
                    for row in &side.abar {
                        for v in row {
                            worst = math::fmax(worst, math::fabs(*v));
                        }
                    }
                    for row in &side.shape_n {
                        for v in row {
                            worst = math::fmax(worst, math::fabs(*v));
                        }
                    }
                    for v in side.tau_dec.iter().chain(side.tau_wein.iter()) {
                        worst = math::fmax(worst, math::fabs(*v));
                    }
                    for blk in &side.ind_gamma {
                        for row in blk {
                            for v in row {
                                worst = math::fmax(worst, math::fabs(*v));
                            }
                        }
                    }
                }
                out.max.update(worst, &pp.u, "all induced objects");
            }
        }

        "ID-values-paper-cone" => {
            for pp in per {
                cone_value_residuals(pp, false, &mut out);
            }
        }

        "ID-values-paper-cone-LC" => {
            for pp in per {
                cone_value_residuals(pp, true, &mut out);
            }
        }

        other => {
            return Err(crate::error::Error::Invalid {
                message: format!("unknown check id `{other}`"),
            });
        }
    }

    Ok(out)
}

fn basis_unit(mp1: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; mp1];
    v[i] = 1.0;
    v
}

/// Ambient components of a parameter vector at a point.
fn pt_amb(pp: &PerPoint<'_>, v_param: &[f64]) -> Vec<f64> {
    pp.pt.push(v_param)
}

/// Probe triples for the transversal-component identity set: all ordered
/// frame triples plus 10 seeded random triples.
fn codazzi_probes(pt: &PointTensors, point_index: usize, seed: u64) -> Vec<[Vec<f64>; 3]> {
    let mut frame_vs = vec![pt.xi_param.clone()];
    frame_vs.extend(pt.w_param.iter().cloned());
    let mut probes = Vec::new();
    for x in &frame_vs {
        for y in &frame_vs {
            for z in &frame_vs {
                probes.push([x.clone(), y.clone(), z.clone()]);
            }
        }
    }
    let mut stream = Stream::new(seed, "codazzi-probes", point_index as u64);
    for _ in 0..10 {
        probes.push([
            stream.vector(pt.mp1),
            stream.vector(pt.mp1),
            stream.vector(pt.mp1),
        ]);
    }
    probes
}

/// Closed-form value residuals for the cone fixtures. `lc` selects the
/// self-dual variant.
fn cone_value_residuals(pp: &PerPoint<'_>, lc: bool, out: &mut CheckOutput) {
    let u2 = pp.u[1];
    let u3 = pp.u[2];
    let f2 = u2 * u2 + u3 * u3;
    let f = math::sqrt(f2);
    let s2 = math::sqrt(2.0);
    let pt = &pp.pt;
    let w1 = &pt.w_param[0];
    let w2 = &pt.w_param[1];
    let xi = &pt.xi_param;

    let b = |which: Conn, x: &[f64], y: &[f64]| pt.b_of(which, x, y);
    let c = |which: Conn, x: &[f64], y: &[f64]| pt.c_of(which, x, &pt.screen_coeffs(y));

    if lc {
        out.max
            .update(math::fabs(b(Conn::D, w2, w2) + s2 * f2), &pp.u, "B(W2,W2)");
        out.max.update(
            math::fabs(b(Conn::Dstar, w2, w2) + s2 * f2),
            &pp.u,
            "B*(W2,W2)",
        );
        out.max
            .update(math::fabs(b(Conn::D, xi, xi)), &pp.u, "B(xi,xi)");
        out.max.update(
            math::fabs(c(Conn::D, w2, w2) + s2 / 4.0),
            &pp.u,
            "C(W2,W2)",
        );
    } else {
        out.max.update(
            math::fabs(b(Conn::D, w2, w2) + 2.0 * s2 * u2 * u2),
            &pp.u,
            "B(W2,W2)",
        );
        out.max.update(
            math::fabs(b(Conn::Dstar, w2, w2) + 2.0 * s2 * u3 * u3),
            &pp.u,
            "B*(W2,W2)",
        );
        out.max
            .update(math::fabs(b(Conn::D, xi, xi) + s2), &pp.u, "B(xi,xi)");
        out.max.update(
            math::fabs(b(Conn::Dstar, xi, xi) - s2),
            &pp.u,
            "B*(xi,xi)",
        );
        out.max.update(
            math::fabs(c(Conn::D, w2, w2) + 0.5 * s2 * u2 * u2 / f2),
            &pp.u,
            "C(W2,W2)",
        );
        out.max.update(
            math::fabs(c(Conn::Dstar, w2, w2) + 0.5 * s2 * u3 * u3 / f2),
            &pp.u,
            "C*(W2,W2)",
        );
        out.max
            .update(math::fabs(c(Conn::D, xi, w2)), &pp.u, "C(xi,W2)");
    }
    for x in [w1, w2, xi] {
        out.max
            .update(math::fabs(b(Conn::D, x, w1)), &pp.u, "B(X,W1)");
    }
    // Transversal closed form.
    let expect = [
        -1.0 / (4.0 * f),
        1.0 / (4.0 * f),
        s2 * u2 / (4.0 * f2),
        s2 * u3 / (4.0 * f2),
    ];
    for a in 0..4 {
        out.max
            .update(math::fabs(pt.n_amb[a] - expect[a]), &pp.u, "N");
    }
}
