//! The lightlike hypersurface: embedding, induced (degenerate) metric,
//! radical field, screen frame, transversal section, and the assembled null
//! frame at a point.
//!
//! All frame quantities are computed in jet arithmetic along a chosen
//! parameter-space direction, so their derivatives along that direction fall
//! out of the same construction that produces their values. A [`PointCtx`]
//! caches the derivative tensors of the embedding, metric, and declared
//! frame fields at one parameter point; [`FrameJets`] is one frame build at
//! that point along one direction.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ambient::{AmbientSpace, ConnJets};
use crate::error::{Error, Result};
use crate::expr::{Expr, ExprDerivs};
use crate::jet::Jet;
use crate::linalg::{self, JMat, JVec};
use crate::math;

#[derive(Debug, Clone)]
pub struct Hypersurface {
    params: Vec<String>,
    embedding: Vec<Expr>,
    xi: Option<Vec<Expr>>,
    screen: Option<Vec<Vec<Expr>>>,
    domain: Vec<[f64; 2]>,
}

impl Hypersurface {
    pub fn new(
        params: Vec<String>,
        embedding: Vec<Expr>,
        xi: Option<Vec<Expr>>,
        screen: Option<Vec<Vec<Expr>>>,
        domain: Vec<[f64; 2]>,
    ) -> Result<Hypersurface> {
        let m_plus_1 = params.len();
        if m_plus_1 < 2 {
            return Err(Error::Invalid {
                message: String::from("hypersurface needs at least 2 parameters"),
            });
        }
        if let Some(x) = &xi {
            if x.len() != m_plus_1 {
                return Err(Error::Invalid {
                    message: format!("xi has {} components, expected {m_plus_1}", x.len()),
                });
            }
        }
        if let Some(s) = &screen {
            if s.len() != m_plus_1 - 1 || s.iter().any(|w| w.len() != m_plus_1) {
                return Err(Error::Invalid {
                    message: format!(
                        "screen must be {} fields with {m_plus_1} components each",
                        m_plus_1 - 1
                    ),
                });
            }
        }
        if domain.len() != m_plus_1
            || domain
                .iter()
                .any(|r| r[0] >= r[1] || r[0].is_nan() || r[1].is_nan())
        {
            return Err(Error::Invalid {
                message: String::from("domain must give a non-empty interval per parameter"),
            });
        }
        Ok(Hypersurface {
            params,
            embedding,
            xi,
            screen,
            domain,
        })
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    /// Hypersurface dimension `m + 1`.
    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Screen rank `m`.
    pub fn screen_dim(&self) -> usize {
        self.params.len() - 1
    }

    pub fn embedding(&self) -> &[Expr] {
        &self.embedding
    }

    pub fn xi_exprs(&self) -> Option<&Vec<Expr>> {
        self.xi.as_ref()
    }

    pub fn screen_exprs(&self) -> Option<&Vec<Vec<Expr>>> {
        self.screen.as_ref()
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }
}

/// Per-point cache: derivative tensors for the embedding, ambient metric
/// (at the image point), and any declared frame fields.
pub struct PointCtx<'a> {
    pub space: &'a AmbientSpace,
    pub hyp: &'a Hypersurface,
    pub u0: Vec<f64>,
    pub x0: Vec<f64>,
    /// Jet-order capability of the pipeline at this point, clamped to
    /// `[2, 3]`: 3 is what the derivative tensors support and all the
    /// curvature formulas need (order 4 exists for direct jet evaluation
    /// only).
    pub order: usize,
    pub emb_derivs: Vec<ExprDerivs>,
    pub met_derivs: Vec<Vec<ExprDerivs>>,
    pub xi_derivs: Option<Vec<ExprDerivs>>,
    pub screen_derivs: Option<Vec<Vec<ExprDerivs>>>,
}

impl<'a> PointCtx<'a> {
    pub fn new(
        space: &'a AmbientSpace,
        hyp: &'a Hypersurface,
        u0: &[f64],
        order: usize,
    ) -> Result<PointCtx<'a>> {
        if u0.len() != hyp.n_params() {
            return Err(Error::Invalid {
                message: format!(
                    "point has {} coordinates, hypersurface has {} parameters",
                    u0.len(),
                    hyp.n_params()
                ),
            });
        }
        let order = order.clamp(2, 3);
        let x0: Vec<f64> = hyp
            .embedding
            .iter()
            .map(|e| e.eval(u0))
            .collect::<Result<_>>()?;
        let emb_derivs: Vec<ExprDerivs> = hyp
            .embedding
            .iter()
            .map(|e| e.derivs(u0, order))
            .collect::<Result<_>>()?;
        let met_derivs = space.metric_derivs(&x0, order - 1)?;
        let xi_derivs = match &hyp.xi {
            Some(xs) => Some(
                xs.iter()
                    .map(|e| e.derivs(u0, order - 1))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let screen_derivs = match &hyp.screen {
            Some(ws) => Some(
                ws.iter()
                    .map(|w| {
                        w.iter()
                            .map(|e| e.derivs(u0, order - 1))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Ok(PointCtx {
            space,
            hyp,
            u0: u0.to_vec(),
            x0,
            order,
            emb_derivs,
            met_derivs,
            xi_derivs,
            screen_derivs,
        })
    }

    /// Builds the null frame at this point as jets along `dir` (parameter
    /// components, may be zero for a pure value build) at jet order `r`.
    pub fn frame(&self, dir: &[f64], r: usize) -> Result<FrameJets> {
        FrameJets::build(self, dir, r)
    }

    /// Induced Gram matrix and its rank at this point.
    pub fn induced_metric(&self) -> Result<(Vec<Vec<f64>>, usize)> {
        let frame = raw_tangent_data(self, &vec![0.0; self.hyp.n_params()], 0)?;
        let gram = linalg::jmat_vals(&frame.gram);
        let (rank, _) = linalg::sym_rank(&gram, 1e-10);
        Ok((gram, rank))
    }
}

/// Tangent-level data shared by the rank checks and the full frame build.
struct TangentData {
    ujets: Vec<Jet>,
    x: Vec<Jet>,
    t: Vec<JVec>,
    d2phi: Vec<Vec<JVec>>,
    conn: ConnJets,
    gram: JMat,
}

fn raw_tangent_data(ctx: &PointCtx<'_>, dir: &[f64], r: usize) -> Result<TangentData> {
    let n = ctx.space.dim();
    let mp1 = ctx.hyp.n_params();
    let ujets: Vec<Jet> = (0..mp1)
        .map(|i| Jet::variable(ctx.u0[i], dir[i], r))
        .collect();
    let x: Vec<Jet> = ctx
        .hyp
        .embedding
        .iter()
        .map(|e| e.eval_jets(&ujets))
        .collect::<Result<_>>()?;
    // Tangent coordinate frame T_i^a = d phi^a / d u^i and second partials.
    let mut t = vec![linalg::jvec_zero(n, r); mp1];
    let mut d2phi = vec![vec![linalg::jvec_zero(n, r); mp1]; mp1];
    for a in 0..n {
        for i in 0..mp1 {
            t[i][a] = ctx.emb_derivs[a].partial_jet(i, &ujets);
            for j in 0..mp1 {
                d2phi[i][j][a] = ctx.emb_derivs[a].partial2_jet(i, j, &ujets);
            }
        }
    }
    // Jacobian rank check on the value part.
    {
        let mut jtj = vec![vec![0.0; mp1]; mp1];
        for i in 0..mp1 {
            for j in 0..mp1 {
                let mut acc = 0.0;
                for a in 0..n {
                    acc += t[i][a].val() * t[j][a].val();
                }
                jtj[i][j] = acc;
            }
        }
        let (rank, _) = linalg::sym_rank(&jtj, 1e-12);
        if rank != mp1 {
            return Err(Error::DegenerateJacobian);
        }
    }
    let conn = ctx.space.connection_jets(&x, &ctx.met_derivs)?;
    let mut gram = linalg::jmat_zero(mp1, mp1, r);
    for i in 0..mp1 {
        for j in 0..mp1 {
            gram[i][j] = pair_with(&conn.g, &t[i], &t[j]);
        }
    }
    Ok(TangentData {
        ujets,
        x,
        t,
        d2phi,
        conn,
        gram,
    })
}

/// `g(v, w)` for ambient-component jet vectors.
pub fn pair_with(g: &JMat, v: &[Jet], w: &[Jet]) -> Jet {
    let order = v
        .iter()
        .chain(w.iter())
        .map(|j| j.order())
        .max()
        .unwrap_or(0);
    let mut acc = Jet::constant(0.0, order);
    for (a, va) in v.iter().enumerate() {
        for (b, wb) in w.iter().enumerate() {
            acc = acc.add(&g[a][b].mul(&va.mul(wb)));
        }
    }
    acc
}

/// Determinant of a small jet matrix by Laplace expansion.
fn det_jets(m: &[JVec]) -> Jet {
    let n = m.len();
    match n {
        0 => Jet::constant(1.0, 0),
        1 => m[0][0],
        _ => {
            let order = m
                .iter()
                .flat_map(|r| r.iter())
                .map(|j| j.order())
                .max()
                .unwrap_or(0);
            let mut acc = Jet::constant(0.0, order);
            for c in 0..n {
                let minor: Vec<JVec> = (1..n)
                    .map(|r| (0..n).filter(|cc| *cc != c).map(|cc| m[r][cc]).collect())
                    .collect();
                let term = m[0][c].mul(&det_jets(&minor));
                acc = if c % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            acc
        }
    }
}

/// Kernel direction of a symmetric rank-(n-1) jet matrix via its adjugate:
/// for nullity one, every non-zero adjugate column spans the kernel.
fn adjugate_kernel(gram: &JMat) -> Result<JVec> {
    let n = gram.len();
    let order = gram
        .iter()
        .flat_map(|r| r.iter())
        .map(|j| j.order())
        .max()
        .unwrap_or(0);
    let mut best: Option<(f64, JVec)> = None;
    for col in 0..n {
        let mut v = linalg::jvec_zero(n, order);
        for row in 0..n {
            // adj[row][col] = (-1)^{row+col} * minor(col, row)
            let minor: Vec<JVec> = (0..n)
                .filter(|r| *r != col)
                .map(|r| (0..n).filter(|c| *c != row).map(|c| gram[r][c]).collect())
                .collect();
            let m = det_jets(&minor);
            v[row] = if (row + col) % 2 == 0 { m } else { m.neg() };
        }
        let norm2: f64 = v.iter().map(|j| j.val() * j.val()).sum();
        if best.as_ref().map(|(b, _)| norm2 > *b).unwrap_or(true) {
            best = Some((norm2, v));
        }
    }
    let (norm2, v) = best.unwrap();
    if norm2 < 1e-24 {
        return Err(Error::SingularSystem {
            what: String::from("radical kernel extraction (adjugate vanished)"),
        });
    }
    Ok(v)
}

/// Normalises a kernel vector deterministically: Euclidean norm one in the
/// parameter frame, with the first component of largest magnitude positive.
fn normalize_kernel(v: &[Jet]) -> Result<JVec> {
    let order = v.iter().map(|j| j.order()).max().unwrap_or(0);
    let mut norm2 = Jet::constant(0.0, order);
    for j in v {
        norm2 = norm2.add(&j.mul(j));
    }
    let norm = norm2.sqrt()?;
    let mut out: JVec = v.iter().map(|j| j.div(&norm)).collect::<Result<_>>()?;
    let mut arg = 0;
    let mut best = 0.0;
    for (i, j) in out.iter().enumerate() {
        let a = math::fabs(j.val());
        if a > best + 1e-14 {
            best = a;
            arg = i;
        }
    }
    if out[arg].val() < 0.0 {
        out = out.iter().map(|j| j.neg()).collect();
    }
    Ok(out)
}

/// Solves for the unique transversal section: `V` spans the part of the
/// screen-orthogonal complement with `g(V, xi) != 0`, then
/// `N = (V - g(V,V)/(2 g(V,xi)) xi) / g(V,xi)`.
pub fn transversal_from(g: &JMat, w_amb: &[JVec], xi_amb: &JVec) -> Result<JVec> {
    let n = g.len();
    let order = g
        .iter()
        .flat_map(|r| r.iter())
        .map(|j| j.order())
        .max()
        .unwrap_or(0);
    let m = w_amb.len();
    let mut rows = linalg::jmat_zero(m, n, order);
    for (i, w) in w_amb.iter().enumerate() {
        for a in 0..n {
            let mut acc = Jet::constant(0.0, order);
            for b in 0..n {
                acc = acc.add(&g[a][b].mul(&w[b]));
            }
            rows[i][a] = acc;
        }
    }
    let basis = linalg::nullspace(&rows, n - m, "screen-orthogonal complement")?;
    let scale = basis
        .iter()
        .flat_map(|v| v.iter())
        .map(|j| math::fabs(j.val()))
        .fold(0.0, math::fmax)
        .max(1.0);
    let mut v = None;
    let mut best = 1e-10 * scale;
    for cand in &basis {
        let gvxi = pair_with(g, cand, xi_amb);
        if math::fabs(gvxi.val()) > best {
            best = math::fabs(gvxi.val());
            v = Some(cand.clone());
        }
    }
    let v = match v {
        Some(v) => v,
        None => {
            // Fall back to the sum of the basis vectors.
            let sum = linalg::jvec_add(&basis[0], &basis[1]);
            let gvxi = pair_with(g, &sum, xi_amb);
            if math::fabs(gvxi.val()) < 1e-10 * scale {
                return Err(Error::SingularSystem {
                    what: String::from("transversal solve: g-pairing with xi vanishes"),
                });
            }
            sum
        }
    };
    let gvxi = pair_with(g, &v, xi_amb);
    let gvv = pair_with(g, &v, &v);
    let half = gvv.div(&gvxi.scale(2.0))?;
    let shifted = linalg::jvec_sub(&v, &linalg::jvec_scale(xi_amb, &half));
    shifted.iter().map(|j| j.div(&gvxi)).collect()
}

/// Pseudo-orthonormalisation of the screen by modified Gram-Schmidt with
/// sign extraction, pivoting on the largest `|g(v,v)|`.
fn gram_schmidt_indefinite(g: &JMat, w_amb: &[JVec]) -> Result<(Vec<JVec>, Vec<f64>)> {
    let mut remaining: Vec<JVec> = w_amb.to_vec();
    let mut e: Vec<JVec> = Vec::new();
    let mut eps: Vec<f64> = Vec::new();
    let scale = w_amb
        .iter()
        .map(|w| math::fabs(pair_with(g, w, w).val()))
        .fold(0.0, math::fmax)
        .max(1.0);
    while !remaining.is_empty() {
        // Orthogonalise every remaining vector against the accepted ones,
        // then pick the one with the largest |g(v,v)|.
        let mut best: Option<(usize, JVec, Jet)> = None;
        for (idx, cand) in remaining.iter().enumerate() {
            let mut v = cand.clone();
            for (ek, sk) in e.iter().zip(&eps) {
                let coeff = pair_with(g, &v, ek).scale(*sk);
                v = linalg::jvec_sub(&v, &linalg::jvec_scale(ek, &coeff));
            }
            let q = pair_with(g, &v, &v);
            let better = match &best {
                None => true,
                Some((_, _, bq)) => math::fabs(q.val()) > math::fabs(bq.val()) + 1e-14,
            };
            if better {
                best = Some((idx, v, q));
            }
        }
        let (idx, v, q) = best.unwrap();
        if math::fabs(q.val()) < 1e-10 * scale {
            return Err(Error::GramSchmidtBreakdown { pivot: q.val() });
        }
        let sign = if q.val() > 0.0 { 1.0 } else { -1.0 };
        let norm = q.scale(sign).sqrt()?;
        let ek: JVec = v.iter().map(|j| j.div(&norm)).collect::<Result<_>>()?;
        e.push(ek);
        eps.push(sign);
        remaining.remove(idx);
    }
    Ok((e, eps))
}

/// The assembled null frame at one point, as jets along one direction.
pub struct FrameJets {
    pub dir: Vec<f64>,
    pub order: usize,
    pub ujets: Vec<Jet>,
    pub x: Vec<Jet>,
    /// Coordinate tangent frame, ambient components.
    pub t: Vec<JVec>,
    /// Second embedding partials `d2phi[i][j][a]`.
    pub d2phi: Vec<Vec<JVec>>,
    pub conn: ConnJets,
    pub gram: JMat,
    pub xi_param: JVec,
    pub xi_amb: JVec,
    pub w_param: Vec<JVec>,
    pub w_amb: Vec<JVec>,
    pub e_amb: Vec<JVec>,
    pub eps: Vec<f64>,
    pub n_amb: JVec,
    /// LU-ready frame matrix columns `[W_1 .. W_m, xi, N]`.
    frame_cols: JMat,
}

impl FrameJets {
    fn build(ctx: &PointCtx<'_>, dir: &[f64], r: usize) -> Result<FrameJets> {
        let n = ctx.space.dim();
        let mp1 = ctx.hyp.n_params();
        let m = mp1 - 1;
        let td = raw_tangent_data(ctx, dir, r)?;

        let gram_vals = linalg::jmat_vals(&td.gram);
        let (rank, _) = linalg::sym_rank(&gram_vals, 1e-10);
        if rank == mp1 {
            return Err(Error::NonDegenerate);
        }
        if rank != m {
            return Err(Error::NotLightlike { rank, expected: m });
        }

        // Radical field: declared closed form (verified) or adjugate kernel.
        let xi_param: JVec = match &ctx.hyp.xi {
            Some(xs) => {
                let v: JVec = xs
                    .iter()
                    .map(|e| e.eval_jets(&td.ujets))
                    .collect::<Result<_>>()?;
                let scale = gram_vals
                    .iter()
                    .flat_map(|r| r.iter())
                    .map(|x| math::fabs(*x))
                    .fold(0.0, math::fmax)
                    .max(1.0)
                    * v.iter()
                        .map(|j| math::fabs(j.val()))
                        .fold(0.0, math::fmax)
                        .max(1.0);
                let mut worst: f64 = 0.0;
                for i in 0..mp1 {
                    let mut acc = 0.0;
                    for j in 0..mp1 {
                        acc += gram_vals[i][j] * v[j].val();
                    }
                    worst = math::fmax(worst, math::fabs(acc));
                }
                if worst > 1e-9 * scale {
                    return Err(Error::XiNotInKernel { residual: worst });
                }
                v
            }
            None => normalize_kernel(&adjugate_kernel(&td.gram)?)?,
        };
        let xi_amb = push_forward(&td.t, &xi_param);

        // Screen: declared closed forms or coordinate tangents projected
        // against xi in the Euclidean parameter inner product, dropping the
        // most xi-aligned one.
        let w_param: Vec<JVec> = match &ctx.hyp.screen {
            Some(ws) => ws
                .iter()
                .map(|w| {
                    w.iter()
                        .map(|e| e.eval_jets(&td.ujets))
                        .collect::<Result<JVec>>()
                })
                .collect::<Result<_>>()?,
            None => {
                let mut xi2 = Jet::constant(0.0, r);
                for j in &xi_param {
                    xi2 = xi2.add(&j.mul(j));
                }
                let mut drop = 0;
                let mut best = -1.0;
                for (i, j) in xi_param.iter().enumerate() {
                    let a = math::fabs(j.val());
                    if a > best + 1e-14 {
                        best = a;
                        drop = i;
                    }
                }
                let mut out = Vec::with_capacity(m);
                for i in 0..mp1 {
                    if i == drop {
                        continue;
                    }
                    let coeff = xi_param[i].div(&xi2)?;
                    let mut w = linalg::jvec_zero(mp1, r);
                    w[i] = Jet::constant(1.0, r);
                    w = linalg::jvec_sub(&w, &linalg::jvec_scale(&xi_param, &coeff));
                    out.push(w);
                }
                out
            }
        };
        let w_amb: Vec<JVec> = w_param.iter().map(|w| push_forward(&td.t, w)).collect();

        // Screen Gram must be non-degenerate.
        {
            let mut sg = vec![vec![0.0; m]; m];
            for i in 0..m {
                for j in 0..m {
                    sg[i][j] = pair_with(&td.conn.g, &w_amb[i], &w_amb[j]).val();
                }
            }
            let det = linalg::det_vals(&sg);
            let scale = sg
                .iter()
                .flat_map(|r| r.iter())
                .map(|x| math::fabs(*x))
                .fold(0.0, math::fmax)
                .max(1.0);
            if math::fabs(det) < 1e-10 * math::powi(scale, m as i32) {
                return Err(Error::DegenerateScreen { det });
            }
        }

        let (e_amb, eps) = gram_schmidt_indefinite(&td.conn.g, &w_amb)?;
        let n_amb = transversal_from(&td.conn.g, &w_amb, &xi_amb)?;

        // Frame invariants on the value part.
        {
            let g = &td.conn.g;
            let scale = xi_amb
                .iter()
                .chain(n_amb.iter())
                .map(|j| math::fabs(j.val()))
                .fold(0.0, math::fmax)
                .max(1.0);
            let tol = 1e-9 * scale * scale;
            let gnn = pair_with(g, &n_amb, &n_amb).val();
            let gxin = pair_with(g, &xi_amb, &n_amb).val();
            if math::fabs(gnn) > tol || math::fabs(gxin - 1.0) > tol {
                return Err(Error::Invalid {
                    message: format!(
                        "transversal invariants violated: g(N,N) = {gnn:e}, g(xi,N) = {}",
                        gxin
                    ),
                });
            }
            for w in &w_amb {
                let gnw = pair_with(g, &n_amb, w).val();
                if math::fabs(gnw) > tol {
                    return Err(Error::Invalid {
                        message: format!("transversal invariants violated: g(N,W) = {gnw:e}"),
                    });
                }
            }
        }

        let mut frame_cols = linalg::jmat_zero(n, n, r);
        for a in 0..n {
            for (k, w) in w_amb.iter().enumerate() {
                frame_cols[a][k] = w[a];
            }
            frame_cols[a][m] = xi_amb[a];
            frame_cols[a][m + 1] = n_amb[a];
        }

        Ok(FrameJets {
            dir: dir.to_vec(),
            order: r,
            ujets: td.ujets,
            x: td.x,
            t: td.t,
            d2phi: td.d2phi,
            conn: td.conn,
            gram: td.gram,
            xi_param,
            xi_amb,
            w_param,
            w_amb,
            e_amb,
            eps,
            n_amb,
            frame_cols,
        })
    }

    pub fn screen_dim(&self) -> usize {
        self.w_amb.len()
    }

    /// `g(v, w)` with the metric at this frame's point.
    pub fn pair(&self, v: &[Jet], w: &[Jet]) -> Jet {
        pair_with(&self.conn.g, v, w)
    }

    /// `eta(v) = g(v, N)`.
    pub fn eta(&self, v: &[Jet]) -> Jet {
        self.pair(v, &self.n_amb)
    }

    /// Splits an ambient vector over `{W_1..W_m, xi, N}`; returns
    /// (screen coefficients, xi coefficient, N coefficient).
    pub fn split(&self, v: &[Jet]) -> Result<(JVec, Jet, Jet)> {
        let sol = linalg::lu_solve(&self.frame_cols, v, "frame decomposition")?;
        let m = self.screen_dim();
        Ok((sol[..m].to_vec(), sol[m], sol[m + 1]))
    }

    /// Screen projection `P v = v - eta(v) xi` for tangent vectors.
    pub fn project(&self, v: &[Jet]) -> JVec {
        let ev = self.eta(v);
        linalg::jvec_sub(v, &linalg::jvec_scale(&self.xi_amb, &ev))
    }

    /// Tangential part `v - g(v, xi) N` of an ambient vector along the
    /// hypersurface (exact when v is in the span of the frame).
    pub fn tangent_part(&self, v: &[Jet]) -> Result<JVec> {
        let (s, b, _c) = self.split(v)?;
        let mut out = linalg::jvec_scale(&self.xi_amb, &b);
        for (k, w) in self.w_amb.iter().enumerate() {
            linalg::jvec_axpy(&mut out, &s[k], w);
        }
        Ok(out)
    }

    /// |det| of the frame matrix (diagnostic for frame conditioning).
    pub fn frame_det(&self) -> f64 {
        linalg::det_vals(&linalg::jmat_vals(&self.frame_cols))
    }
}

/// Pushes a parameter-frame vector forward through the embedding Jacobian.
pub fn push_forward(t: &[JVec], v_param: &[Jet]) -> JVec {
    let n = t[0].len();
    let order = v_param.iter().map(|j| j.order()).max().unwrap_or(0);
    let mut out = linalg::jvec_zero(n, order);
    for (i, vi) in v_param.iter().enumerate() {
        linalg::jvec_axpy(&mut out, vi, &t[i]);
    }
    out
}

/// Radical direction at a point: the declared field (verified against the
/// Gram kernel, scale preserved) or the normalised kernel vector.
pub fn radical_at(
    space: &AmbientSpace,
    hyp: &Hypersurface,
    u0: &[f64],
    order: usize,
) -> Result<Vec<f64>> {
    let ctx = PointCtx::new(space, hyp, u0, order)?;
    let zero = vec![0.0; hyp.n_params()];
    let frame = ctx.frame(&zero, 0)?;
    Ok(linalg::jvec_vals(&frame.xi_param))
}

/// Value-level snapshot of a frame, for reporting.
#[derive(Debug, Clone)]
pub struct NullFramePoint {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub tangent: Vec<Vec<f64>>,
    pub xi_param: Vec<f64>,
    pub xi_ambient: Vec<f64>,
    pub w_param: Vec<Vec<f64>>,
    pub w_ambient: Vec<Vec<f64>>,
    pub e_ambient: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
    pub n: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
    /// Lowered transversal: `eta(v) = sum_a eta_covector[a] v^a`.
    pub eta_covector: Vec<f64>,
    pub frame_det: f64,
}

/// Assembles the full frame at a parameter point and snapshots it.
pub fn null_frame_at(
    space: &AmbientSpace,
    hyp: &Hypersurface,
    u0: &[f64],
    order: usize,
) -> Result<NullFramePoint> {
    let ctx = PointCtx::new(space, hyp, u0, order)?;
    let zero = vec![0.0; hyp.n_params()];
    let f = ctx.frame(&zero, 0)?;
    let g = linalg::jmat_vals(&f.conn.g);
    let nvals = linalg::jvec_vals(&f.n_amb);
    let dim = space.dim();
    let mut eta_cov = vec![0.0; dim];
    for a in 0..dim {
        for b in 0..dim {
            eta_cov[a] += g[a][b] * nvals[b];
        }
    }
    Ok(NullFramePoint {
        p: u0.to_vec(),
        x: linalg::jvec_vals(&f.x),
        tangent: f.t.iter().map(|t| linalg::jvec_vals(t)).collect(),
        xi_param: linalg::jvec_vals(&f.xi_param),
        xi_ambient: linalg::jvec_vals(&f.xi_amb),
        w_param: f.w_param.iter().map(|w| linalg::jvec_vals(w)).collect(),
        w_ambient: f.w_amb.iter().map(|w| linalg::jvec_vals(w)).collect(),
        e_ambient: f.e_amb.iter().map(|e| linalg::jvec_vals(e)).collect(),
        eps: f.eps.clone(),
        n: nvals,
        gram: linalg::jmat_vals(&f.gram),
        eta_covector: eta_cov,
        frame_det: f.frame_det(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    fn sqrt2() -> f64 {
        math::sqrt(2.0)
    }

    #[test]
    fn p0_gram_rank_and_kernel() {
        let fx = fixtures::build(fixtures::FLAT_PLANE_P0).unwrap();
        let ctx = PointCtx::new(&fx.space, &fx.hyp, &[0.3, -0.2, 0.9], 3).unwrap();
        let (gram, rank) = ctx.induced_metric().unwrap();
        assert_eq!(rank, 2);
        let expect = [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(gram[i][j], expect[i][j], epsilon = 1e-12);
            }
        }
        let nf = null_frame_at(&fx.space, &fx.hyp, &[0.3, -0.2, 0.9], 3).unwrap();
        assert_relative_eq!(nf.xi_ambient[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(nf.xi_ambient[2], 1.0, epsilon = 1e-12);
        assert_relative_eq!(nf.n[0], -0.5, epsilon = 1e-12);
        assert_relative_eq!(nf.n[2], 0.5, epsilon = 1e-12);
        assert_relative_eq!(nf.n[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(nf.n[3], 0.0, epsilon = 1e-12);
        assert_eq!(nf.eps, vec![-1.0, 1.0]);
    }

    #[test]
    fn paper_cone_gram_at_unit_point() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let ctx = PointCtx::new(&fx.space, &fx.hyp, &[0.0, 1.0, 1.0], 3).unwrap();
        let (gram, rank) = ctx.induced_metric().unwrap();
        assert_eq!(rank, 2);
        let expect = [[-2.0, -1.0, -1.0], [-1.0, 0.0, -1.0], [-1.0, -1.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(gram[i][j], expect[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn paper_cone_auto_kernel_direction() {
        // Strip the declared xi and let the kernel solver find it.
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let hyp = Hypersurface::new(
            fx.hyp.params().to_vec(),
            fx.hyp.embedding().to_vec(),
            None,
            fx.hyp.screen_exprs().cloned(),
            fx.hyp.domain().to_vec(),
        )
        .unwrap();
        let ctx = PointCtx::new(&fx.space, &hyp, &[0.0, 1.0, 1.0], 3).unwrap();
        let f = ctx.frame(&[0.0, 0.0, 0.0], 0).unwrap();
        let k = linalg::jvec_vals(&f.xi_param);
        // Kernel direction is (1,-1,-1)/sqrt(3), first-largest made positive.
        let s3 = math::sqrt(3.0);
        assert_relative_eq!(k[0], 1.0 / s3, epsilon = 1e-10);
        assert_relative_eq!(k[1], -1.0 / s3, epsilon = 1e-10);
        assert_relative_eq!(k[2], -1.0 / s3, epsilon = 1e-10);
    }

    #[test]
    fn paper_cone_declared_xi_accepted_and_transversal_matches_closed_form() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        for (u2, u3) in [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)] {
            let nf = null_frame_at(&fx.space, &fx.hyp, &[0.0, u2, u3], 3).unwrap();
            let f2 = u2 * u2 + u3 * u3;
            let f = math::sqrt(f2);
            let expect = [
                -1.0 / (4.0 * f),
                1.0 / (4.0 * f),
                sqrt2() * u2 / (4.0 * f2),
                sqrt2() * u3 / (4.0 * f2),
            ];
            for a in 0..4 {
                assert_relative_eq!(nf.n[a], expect[a], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn paper_cone_screen_normalisation_at_unit_point() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let nf = null_frame_at(&fx.space, &fx.hyp, &[0.0, 1.0, 1.0], 3).unwrap();
        // E1 = W1 / sqrt2 with eps -1; E2 = W2 / f with eps +1.
        assert_eq!(nf.eps, vec![-1.0, 1.0]);
        let s = 1.0 / sqrt2();
        assert_relative_eq!(nf.e_ambient[0][0], s, epsilon = 1e-12);
        assert_relative_eq!(nf.e_ambient[0][1], s, epsilon = 1e-12);
        assert_relative_eq!(nf.e_ambient[1][2], -s, epsilon = 1e-12);
        assert_relative_eq!(nf.e_ambient[1][3], s, epsilon = 1e-12);
    }

    #[test]
    fn wrong_xi_rejected() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        // W2's parameter components are not in the kernel.
        let params = ["u1", "u2", "u3"];
        let bad_xi = vec![
            Expr::parse("0", &params).unwrap(),
            Expr::parse("-u3", &params).unwrap(),
            Expr::parse("u2", &params).unwrap(),
        ];
        let hyp = Hypersurface::new(
            fx.hyp.params().to_vec(),
            fx.hyp.embedding().to_vec(),
            Some(bad_xi),
            fx.hyp.screen_exprs().cloned(),
            fx.hyp.domain().to_vec(),
        )
        .unwrap();
        let ctx = PointCtx::new(&fx.space, &hyp, &[0.0, 1.0, 2.0], 3).unwrap();
        assert!(matches!(
            ctx.frame(&[0.0; 3], 0),
            Err(Error::XiNotInKernel { .. })
        ));
    }

    #[test]
    fn non_degenerate_surface_rejected() {
        // Spacelike 3-plane in R^4_2: induced metric diag(-1,1,1) ... rank 3.
        let fx = fixtures::build(fixtures::FLAT_PLANE_P0).unwrap();
        let params = ["u1", "u2", "u3"];
        let emb = ["0", "u1", "u2", "u3"]
            .iter()
            .map(|s| Expr::parse(s, &params).unwrap())
            .collect();
        let hyp = Hypersurface::new(
            fx.hyp.params().to_vec(),
            emb,
            None,
            None,
            fx.hyp.domain().to_vec(),
        )
        .unwrap();
        let ctx = PointCtx::new(&fx.space, &hyp, &[0.1, 0.2, 0.3], 3).unwrap();
        assert!(matches!(ctx.frame(&[0.0; 3], 0), Err(Error::NonDegenerate)));
    }

    #[test]
    fn transversal_invariant_under_screen_basis_change() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let params = ["u1", "u2", "u3"];
        // Replace (W1, W2) by (2 W1 + W2, W1 - W2).
        let new_screen = vec![
            vec![
                Expr::parse("2", &params).unwrap(),
                Expr::parse("-u3", &params).unwrap(),
                Expr::parse("u2", &params).unwrap(),
            ],
            vec![
                Expr::parse("1", &params).unwrap(),
                Expr::parse("u3", &params).unwrap(),
                Expr::parse("-u2", &params).unwrap(),
            ],
        ];
        let hyp = Hypersurface::new(
            fx.hyp.params().to_vec(),
            fx.hyp.embedding().to_vec(),
            fx.hyp.xi_exprs().cloned(),
            Some(new_screen),
            fx.hyp.domain().to_vec(),
        )
        .unwrap();
        let a = null_frame_at(&fx.space, &fx.hyp, &[0.0, 1.4, 0.8], 3).unwrap();
        let b = null_frame_at(&fx.space, &hyp, &[0.0, 1.4, 0.8], 3).unwrap();
        for i in 0..4 {
            assert_relative_eq!(a.n[i], b.n[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn xi_rescale_halves_transversal() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let params = ["u1", "u2", "u3"];
        let xi2 = vec![
            Expr::parse("2*(-sqrt(u2^2+u3^2))", &params).unwrap(),
            Expr::parse("2*sqrt(2)*u2", &params).unwrap(),
            Expr::parse("2*sqrt(2)*u3", &params).unwrap(),
        ];
        let hyp = Hypersurface::new(
            fx.hyp.params().to_vec(),
            fx.hyp.embedding().to_vec(),
            Some(xi2),
            fx.hyp.screen_exprs().cloned(),
            fx.hyp.domain().to_vec(),
        )
        .unwrap();
        let a = null_frame_at(&fx.space, &fx.hyp, &[0.0, 1.1, 0.9], 3).unwrap();
        let b = null_frame_at(&fx.space, &hyp, &[0.0, 1.1, 0.9], 3).unwrap();
        for i in 0..4 {
            assert_relative_eq!(b.n[i], a.n[i] / 2.0, epsilon = 1e-10);
            assert_relative_eq!(b.xi_ambient[i], 2.0 * a.xi_ambient[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn projection_is_idempotent_and_eta_normalised() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let ctx = PointCtx::new(&fx.space, &fx.hyp, &[0.0, 1.3, 0.7], 3).unwrap();
        let f = ctx.frame(&[0.0; 3], 0).unwrap();
        assert_relative_eq!(f.eta(&f.xi_amb).val(), 1.0, epsilon = 1e-11);
        for w in &f.w_amb {
            assert_relative_eq!(f.eta(w).val(), 0.0, epsilon = 1e-11);
        }
        // P(xi) = 0 and P o P = P on a mixed vector.
        let pxi = f.project(&f.xi_amb);
        for j in &pxi {
            assert_relative_eq!(j.val(), 0.0, epsilon = 1e-11);
        }
        let mixed: JVec = (0..4)
            .map(|a| {
                f.w_amb[0][a]
                    .add(&f.xi_amb[a].scale(3.0))
                    .add(&f.w_amb[1][a])
            })
            .collect();
        let p1 = f.project(&mixed);
        let p2 = f.project(&p1);
        for a in 0..4 {
            assert_relative_eq!(p1[a].val(), p2[a].val(), epsilon = 1e-11);
        }
        // Split of W1 + 3 xi.
        let v: JVec = (0..4)
            .map(|a| f.w_amb[0][a].add(&f.xi_amb[a].scale(3.0)))
            .collect();
        let (s, b, c) = f.split(&v).unwrap();
        assert_relative_eq!(s[0].val(), 1.0, epsilon = 1e-11);
        assert_relative_eq!(s[1].val(), 0.0, epsilon = 1e-11);
        assert_relative_eq!(b.val(), 3.0, epsilon = 1e-11);
        assert_relative_eq!(c.val(), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn default_screen_builds_valid_frame() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let hyp = Hypersurface::new(
            fx.hyp.params().to_vec(),
            fx.hyp.embedding().to_vec(),
            fx.hyp.xi_exprs().cloned(),
            None,
            fx.hyp.domain().to_vec(),
        )
        .unwrap();
        let nf = null_frame_at(&fx.space, &hyp, &[0.0, 1.2, 0.9], 3).unwrap();
        assert!(nf.frame_det.abs() > 1e-6);
        assert_eq!(nf.e_ambient.len(), 2);
    }

    #[test]
    fn radical_wrapper_returns_declared_scale() {
        let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
        let u = [0.0, 1.5, 0.5];
        let xi = radical_at(&fx.space, &fx.hyp, &u, 3).unwrap();
        let f = math::sqrt(1.5f64 * 1.5 + 0.5 * 0.5);
        assert_relative_eq!(xi[0], -f, epsilon = 1e-12);
        assert_relative_eq!(xi[1], math::sqrt(2.0) * 1.5, epsilon = 1e-12);
        assert_relative_eq!(xi[2], math::sqrt(2.0) * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn lightcone_r31_frame() {
        let fx = fixtures::build(fixtures::LIGHTCONE_R31).unwrap();
        let u = [0.8, 1.1, 0.9];
        let nf = null_frame_at(&fx.space, &fx.hyp, &u, 3).unwrap();
        let r2: f64 = u.iter().map(|x| x * x).sum();
        let r = math::sqrt(r2);
        // N = (-r, u1, u2, u3) / (2 r^2).
        assert_relative_eq!(nf.n[0], -r / (2.0 * r2), epsilon = 1e-10);
        for i in 0..3 {
            assert_relative_eq!(nf.n[i + 1], u[i] / (2.0 * r2), epsilon = 1e-10);
        }
        assert_eq!(nf.eps, vec![1.0, 1.0]);
    }
}
