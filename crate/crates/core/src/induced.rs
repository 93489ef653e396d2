//! Induced objects along the hypersurface: the dual Gauss-Weingarten
//! decompositions and everything they define.
//!
//! Star bookkeeping follows the ambient pair exactly; the table below is the
//! single reference for which side produces which operator:
//!
//! ```text
//! Gauss      D~_X Y  = D_X Y  + B (X,Y) N        -> B,  D,  IndGamma
//! Weingarten D~_X N  = -A*_N X + tau*(X) N       -> A*_N,  tau*_def
//! Gauss*     D~*_X Y = D*_X Y + B*(X,Y) N        -> B*, D*, IndGamma*
//! Weingarten*D~*_X N = -A_N X  + tau(X) N        -> A_N,   tau_def
//! radical    D_X xi  = -Abar_xi X  - tau(X) xi   -> Abar_xi,  tau_dec
//! radical*   D*_X xi = -Abar*_xi X - tau*(X) xi  -> Abar*_xi, tau*_dec
//! screen     D_X PY  = nabla_X PY  + C (X,PY) xi -> C,  nabla
//! screen*    D*_X PY = nabla*_X PY + C*(X,PY) xi -> C*, nabla*
//! ```
//!
//! The two readings of `tau` (Weingarten vs radical decomposition) agree
//! exactly when the ambient pair is metric-dual; the engine computes both
//! and reports their difference instead of averaging.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ambient::Conn;
use crate::error::{Error, Result};
use crate::expr::{Expr, ExprDerivs};
use crate::hypersurface::{push_forward, FrameJets, PointCtx};
use crate::jet::Jet;
use crate::linalg::{self, JVec};
use crate::math;

/// A tangent field on the hypersurface, given in parameter-frame components
/// or by naming a declared frame field.
#[derive(Debug, Clone)]
pub enum TangentField {
    Coords(Vec<Expr>),
    Xi,
    Screen(usize),
}

impl TangentField {
    pub fn label(&self, _m: usize) -> String {
        match self {
            TangentField::Coords(_) => String::from("field"),
            TangentField::Xi => String::from("xi"),
            TangentField::Screen(k) => format!("W{}", k + 1),
        }
    }
}

/// A field with values in the ambient tangent bundle along the hypersurface.
#[derive(Debug, Clone)]
pub enum AmbientField {
    Tangent(TangentField),
    /// The transversal section N (pipeline-derived).
    Transversal,
    /// Arbitrary ambient components as expressions in the parameters.
    Components(Vec<Expr>),
}

/// A tangent field evaluated at a frame: component jets, their parameter
/// partials, and the ambient pushforward with its partials.
pub struct FieldJets {
    pub param: JVec,
    /// `dparam[i][k]` = d/du^i of component k, as a jet along the frame
    /// direction.
    pub dparam: Vec<JVec>,
    pub amb: JVec,
    /// `damb[i][a]` = d/du^i of the ambient component a of the pushforward.
    pub damb: Vec<JVec>,
}

fn component_derivs(ctx: &PointCtx<'_>, field: &TangentField) -> Result<Vec<ExprDerivs>> {
    match field {
        TangentField::Coords(exprs) => exprs
            .iter()
            .map(|e| e.derivs(&ctx.u0, ctx.order - 1))
            .collect(),
        TangentField::Xi => ctx.xi_derivs.clone().ok_or_else(|| Error::Invalid {
            message: String::from(
                "radical field has no declared closed form; declare xi to differentiate it",
            ),
        }),
        TangentField::Screen(k) => match &ctx.screen_derivs {
            Some(s) => Ok(s[*k].clone()),
            None => Err(Error::Invalid {
                message: String::from(
                    "screen has no declared closed form; declare screen fields to differentiate them",
                ),
            }),
        },
    }
}

/// Evaluates a tangent field at a frame, with all partials needed by the
/// derivative formulas.
pub fn field_jets(
    ctx: &PointCtx<'_>,
    frame: &FrameJets,
    field: &TangentField,
) -> Result<FieldJets> {
    let mp1 = ctx.hyp.n_params();
    let dim = ctx.space.dim();
    let derivs = component_derivs(ctx, field)?;
    let param: JVec = derivs.iter().map(|d| d.value_jet(&frame.ujets)).collect();
    let mut dparam = vec![linalg::jvec_zero(mp1, frame.order); mp1];
    for i in 0..mp1 {
        for k in 0..mp1 {
            dparam[i][k] = derivs[k].partial_jet(i, &frame.ujets);
        }
    }
    let amb = push_forward(&frame.t, &param);
    // d/du^i (J Y)^a = (d_i d_k phi^a) Y^k + (d_k phi^a) (d_i Y^k)
    let mut damb = vec![linalg::jvec_zero(dim, frame.order); mp1];
    for i in 0..mp1 {
        for a in 0..dim {
            let mut acc = Jet::constant(0.0, frame.order);
            for k in 0..mp1 {
                acc = acc.add(&frame.d2phi[i][k][a].mul(&param[k]));
                acc = acc.add(&frame.t[k][a].mul(&dparam[i][k]));
            }
            damb[i][a] = acc;
        }
    }
    Ok(FieldJets {
        param,
        dparam,
        amb,
        damb,
    })
}

/// `Gamma(u, v)^a = Gamma^a_bc u^b v^c` for the chosen connection.
pub fn conn_apply(frame: &FrameJets, which: Conn, u: &[Jet], v: &[Jet]) -> JVec {
    let arr = frame.conn.pick(which);
    let dim = u.len();
    let order = frame.order;
    let mut out = linalg::jvec_zero(dim, order);
    for a in 0..dim {
        let mut acc = Jet::constant(0.0, order);
        for b in 0..dim {
            for c in 0..dim {
                acc = acc.add(&arr[a][b][c].mul(&u[b].mul(&v[c])));
            }
        }
        out[a] = acc;
    }
    out
}

/// Ambient covariant derivative `D~_X Y` of a tangent field along a tangent
/// field, as jets along the frame direction.
pub fn dtilde(frame: &FrameJets, which: Conn, x: &FieldJets, y: &FieldJets) -> JVec {
    let dim = x.amb.len();
    let mut lead = linalg::jvec_zero(dim, frame.order);
    for (i, xi) in x.param.iter().enumerate() {
        linalg::jvec_axpy(&mut lead, xi, &y.damb[i]);
    }
    linalg::jvec_add(&lead, &conn_apply(frame, which, &x.amb, &y.amb))
}

/// `D~_V Y` for a frozen tangent vector `V` in parameter components.
pub fn dtilde_with_vector(frame: &FrameJets, which: Conn, v_param: &[Jet], y: &FieldJets) -> JVec {
    let dim = y.amb.len();
    let v_amb = push_forward(&frame.t, v_param);
    let mut lead = linalg::jvec_zero(dim, frame.order);
    for (i, vi) in v_param.iter().enumerate() {
        linalg::jvec_axpy(&mut lead, vi, &y.damb[i]);
    }
    linalg::jvec_add(&lead, &conn_apply(frame, which, &v_amb, &y.amb))
}

/// `D~_X Y` for an ambient-components field `Y` given by expressions.
pub fn dtilde_ambient(
    ctx: &PointCtx<'_>,
    frame: &FrameJets,
    which: Conn,
    x: &FieldJets,
    y_exprs: &[Expr],
) -> Result<JVec> {
    let dim = ctx.space.dim();
    let derivs: Vec<ExprDerivs> = y_exprs
        .iter()
        .map(|e| e.derivs(&ctx.u0, ctx.order - 1))
        .collect::<Result<_>>()?;
    let y_amb: JVec = derivs.iter().map(|d| d.value_jet(&frame.ujets)).collect();
    let mut lead = linalg::jvec_zero(dim, frame.order);
    for (i, xi) in x.param.iter().enumerate() {
        let dy: JVec = derivs
            .iter()
            .map(|d| d.partial_jet(i, &frame.ujets))
            .collect();
        linalg::jvec_axpy(&mut lead, xi, &dy);
    }
    Ok(linalg::jvec_add(
        &lead,
        &conn_apply(frame, which, &x.amb, &y_amb),
    ))
}

/// `D~_X N` at the frame's base point. The frame must have been built along
/// the direction `X(p)` at jet order >= 1, so the derivative of the
/// pipeline-valued transversal is available.
pub fn dtilde_n(frame: &FrameJets, which: Conn, x: &FieldJets) -> Result<Vec<f64>> {
    if frame.order < 1 {
        return Err(Error::Invalid {
            message: String::from("dtilde_n requires a frame of jet order >= 1"),
        });
    }
    let worst = frame
        .dir
        .iter()
        .zip(&x.param)
        .map(|(d, j)| math::fabs(d - j.val()))
        .fold(0.0, math::fmax);
    let scale = x
        .param
        .iter()
        .map(|j| math::fabs(j.val()))
        .fold(0.0, math::fmax)
        .max(1.0);
    if worst > 1e-9 * scale {
        return Err(Error::Invalid {
            message: String::from("dtilde_n: frame direction does not match the field value"),
        });
    }
    let dim = x.amb.len();
    let gamma_term = conn_apply(frame, which, &x.amb, &frame.n_amb);
    Ok((0..dim)
        .map(|a| frame.n_amb[a].coeff(1) + gamma_term[a].val())
        .collect())
}

/// Lie bracket `[X, Y]` in parameter components.
pub fn lie_bracket(x: &FieldJets, y: &FieldJets) -> JVec {
    let mp1 = x.param.len();
    let order = x.param.iter().map(|j| j.order()).max().unwrap_or(0);
    let mut out = linalg::jvec_zero(mp1, order);
    for k in 0..mp1 {
        let mut acc = Jet::constant(0.0, order);
        for i in 0..mp1 {
            acc = acc.add(&x.param[i].mul(&y.dparam[i][k]));
            acc = acc.sub(&y.param[i].mul(&x.dparam[i][k]));
        }
        out[k] = acc;
    }
    out
}

/// Induced derivative `D_X Y` (tangential part) and the transversal scalar
/// `B(X,Y)`, from one frame split.
pub fn d_induced(
    frame: &FrameJets,
    which: Conn,
    x: &FieldJets,
    y: &FieldJets,
) -> Result<(JVec, Jet)> {
    let full = dtilde(frame, which, x, y);
    let (s, bxi, bn) = frame.split(&full)?;
    let mut tangent = linalg::jvec_scale(&frame.xi_amb, &bxi);
    for (k, w) in frame.w_amb.iter().enumerate() {
        linalg::jvec_axpy(&mut tangent, &s[k], w);
    }
    Ok((tangent, bn))
}

/// Per-side induced tensors over the coordinate basis at one point.
/// "Side" refers to which ambient connection the Gauss formula was read
/// from; see the module table for the star placement.
pub struct SideTensors {
    /// `ind_gamma[k][i][j]`: D_{d_i} d_j = ind_gamma^k_{ij} d_k.
    pub ind_gamma: Vec<Vec<Vec<f64>>>,
    /// `d_ind_gamma[c][k][i][j]` = d_c of the above.
    pub d_ind_gamma: Vec<Vec<Vec<Vec<f64>>>>,
    /// `b[i][j]` = B(d_i, d_j).
    pub b: Vec<Vec<f64>>,
    /// `db[c][i][j]` = d_c B(d_i, d_j) (plain partial, not yet covariant).
    pub db: Vec<Vec<Vec<f64>>>,
    /// Radical-decomposition transversal one-form on the basis:
    /// tau(d_j) for the unstarred side, tau*(d_j) for the starred side.
    pub tau_dec: Vec<f64>,
    /// `dtau[i][j]` = d_i tau_dec(d_j).
    pub dtau: Vec<Vec<f64>>,
    /// Screen form `c_w[i][j]` = C(d_i, W_j) (C* on the starred side).
    pub c_w: Vec<Vec<f64>>,
    /// Radical shape operator in screen components:
    /// `abar[i][j]`: Abar_xi d_i = sum_j abar[i][j] W_j.
    pub abar: Vec<Vec<f64>>,
    /// Shape operator from this side's Weingarten formula, ambient
    /// components: `shape_n[i]` = A*_N d_i for the unstarred side,
    /// A_N d_i for the starred side.
    pub shape_n: Vec<Vec<f64>>,
    /// Weingarten transversal one-form: tau*(d_i) on the unstarred side,
    /// tau(d_i) on the starred side.
    pub tau_wein: Vec<f64>,
    /// Torsion residual of the induced coefficients.
    pub torsion_residual: f64,
}

/// Everything the identity checks need at one point, over the coordinate
/// basis, for both sides, plus the frame snapshot used to build it.
pub struct PointTensors {
    pub mp1: usize,
    pub dim: usize,
    pub u0: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub tangent: Vec<Vec<f64>>,
    pub xi_param: Vec<f64>,
    pub xi_amb: Vec<f64>,
    pub n_amb: Vec<f64>,
    pub w_amb: Vec<Vec<f64>>,
    pub w_param: Vec<Vec<f64>>,
    pub e_amb: Vec<Vec<f64>>,
    /// Pseudo-orthonormal screen basis in parameter components.
    pub e_param: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
    /// eta on the coordinate basis: `eta_t[i] = eta(d_i)`.
    pub eta_t: Vec<f64>,
    /// Screen coefficients of the coordinate basis: `p_w[i][j]` with
    /// `P d_i = sum_j p_w[i][j] W_j`.
    pub p_w: Vec<Vec<f64>>,
    pub unstarred: SideTensors,
    pub starred: SideTensors,
}

impl PointTensors {
    pub fn compute(ctx: &PointCtx<'_>) -> Result<PointTensors> {
        let mp1 = ctx.hyp.n_params();
        let dim = ctx.space.dim();
        let m = mp1 - 1;
        let zero = vec![0.0; mp1];
        let frame0 = ctx.frame(&zero, 0)?;

        // Frames along each coordinate direction carry the derivative data.
        let mut frames = Vec::with_capacity(mp1);
        for i in 0..mp1 {
            let mut dir = vec![0.0; mp1];
            dir[i] = 1.0;
            frames.push(ctx.frame(&dir, 1)?);
        }

        let xi_field = TangentField::Xi;
        let screen_fields: Vec<TangentField> = (0..m).map(TangentField::Screen).collect();

        let side = |which: Conn| -> Result<SideTensors> {
            let mut ind_gamma = vec![vec![vec![0.0; mp1]; mp1]; mp1];
            let mut d_ind_gamma = vec![vec![vec![vec![0.0; mp1]; mp1]; mp1]; mp1];
            let mut b = vec![vec![0.0; mp1]; mp1];
            let mut db = vec![vec![vec![0.0; mp1]; mp1]; mp1];
            let mut tau_dec = vec![0.0; mp1];
            let mut dtau = vec![vec![0.0; mp1]; mp1];
            let mut shape_n = vec![vec![0.0; dim]; mp1];
            let mut tau_wein = vec![0.0; mp1];

            for (c, frame) in frames.iter().enumerate() {
                let xi_jets = field_jets(ctx, frame, &xi_field)?;
                // Tangent columns [T_1..T_{m+1}, N] for the Gauss split.
                let mut cols = linalg::jmat_zero(dim, dim, frame.order);
                for a in 0..dim {
                    for i in 0..mp1 {
                        cols[a][i] = frame.t[i][a];
                    }
                    cols[a][mp1] = frame.n_amb[a];
                }
                for i in 0..mp1 {
                    for j in 0..mp1 {
                        // D~_{d_i} d_j = d2phi_ij + Gamma(T_i, T_j).
                        let mut v = frame.d2phi[i][j].clone();
                        v = linalg::jvec_add(
                            &v,
                            &conn_apply(frame, which, &frame.t[i], &frame.t[j]),
                        );
                        let sol = linalg::lu_solve(&cols, &v, "induced connection split")?;
                        for k in 0..mp1 {
                            if c == 0 {
                                ind_gamma[k][i][j] = sol[k].val();
                            }
                            d_ind_gamma[c][k][i][j] = sol[k].coeff(1);
                        }
                        if c == 0 {
                            b[i][j] = sol[mp1].val();
                        }
                        db[c][i][j] = sol[mp1].coeff(1);
                    }
                    // tau on the basis, radical-decomposition reading:
                    // tau(d_i) = -g(D~_{d_i} xi, N).
                    let dxi = dtilde_with_vector(
                        frame,
                        which,
                        &basis_vector(mp1, i, frame.order),
                        &xi_jets,
                    );
                    let t = frame.pair(&dxi, &frame.n_amb).neg();
                    if c == 0 {
                        tau_dec[i] = t.val();
                    }
                    dtau[c][i] = t.coeff(1);
                }
                // Weingarten data along this direction: D~_{d_c} N.
                let ec = basis_ek(ctx, frame, c)?;
                let dn = dtilde_n(frame, which, &ec)?;
                let dn_jets: JVec = dn.iter().map(|v| Jet::constant(*v, 0)).collect();
                let (s, bxi, _nco) = frame0.split(&dn_jets)?;
                let mut tangent = linalg::jvec_scale(&frame0.xi_amb, &bxi);
                for (k, w) in frame0.w_amb.iter().enumerate() {
                    linalg::jvec_axpy(&mut tangent, &s[k], w);
                }
                for a in 0..dim {
                    shape_n[c][a] = -tangent[a].val();
                }
                tau_wein[c] = frame0.pair(&dn_jets, &frame0.xi_amb).val();
            }

            // Screen form and radical shape operator at value level.
            let mut c_w = vec![vec![0.0; m]; mp1];
            for (j, wf) in screen_fields.iter().enumerate() {
                let wj = field_jets(ctx, &frames[0], wf)?;
                for i in 0..mp1 {
                    let d = dtilde_with_vector(
                        &frames[0],
                        which,
                        &basis_vector(mp1, i, frames[0].order),
                        &wj,
                    );
                    c_w[i][j] = frames[0].pair(&d, &frames[0].n_amb).val();
                }
            }
            let mut abar = vec![vec![0.0; m]; mp1];
            {
                let xi_jets = field_jets(ctx, &frames[0], &xi_field)?;
                for i in 0..mp1 {
                    let dxi = dtilde_with_vector(
                        &frames[0],
                        which,
                        &basis_vector(mp1, i, frames[0].order),
                        &xi_jets,
                    );
                    let (s, _bxi, _n) = frames[0].split(&dxi)?;
                    for j in 0..m {
                        abar[i][j] = -s[j].val();
                    }
                }
            }

            let mut torsion_residual: f64 = 0.0;
            for k in 0..mp1 {
                for i in 0..mp1 {
                    for j in 0..mp1 {
                        torsion_residual = math::fmax(
                            torsion_residual,
                            math::fabs(ind_gamma[k][i][j] - ind_gamma[k][j][i]),
                        );
                    }
                }
            }

            Ok(SideTensors {
                ind_gamma,
                d_ind_gamma,
                b,
                db,
                tau_dec,
                dtau,
                c_w,
                abar,
                shape_n,
                tau_wein,
                torsion_residual,
            })
        };

        let unstarred = side(Conn::D)?;
        let starred = side(Conn::Dstar)?;

        let g = linalg::jmat_vals(&frame0.conn.g);
        let mut eta_t = vec![0.0; mp1];
        let mut p_w = vec![vec![0.0; m]; mp1];
        for i in 0..mp1 {
            eta_t[i] = frame0.eta(&frame0.t[i]).val();
            let (s, _, _) = frame0.split(&frame0.t[i])?;
            for j in 0..m {
                p_w[i][j] = s[j].val();
            }
        }
        // Screen basis back in parameter components: E_k = sum_i e_param[k][i] d_i.
        let mut tangent_cols = linalg::jmat_zero(dim, dim, 0);
        for a in 0..dim {
            for i in 0..mp1 {
                tangent_cols[a][i] = frame0.t[i][a];
            }
            tangent_cols[a][mp1] = frame0.n_amb[a];
        }
        let mut e_param = Vec::with_capacity(m);
        for e in &frame0.e_amb {
            let sol = linalg::lu_solve(&tangent_cols, e, "screen basis pullback")?;
            e_param.push(sol[..mp1].iter().map(|j| j.val()).collect());
        }

        Ok(PointTensors {
            mp1,
            dim,
            u0: ctx.u0.clone(),
            g,
            tangent: frame0.t.iter().map(|t| linalg::jvec_vals(t)).collect(),
            xi_param: linalg::jvec_vals(&frame0.xi_param),
            xi_amb: linalg::jvec_vals(&frame0.xi_amb),
            n_amb: linalg::jvec_vals(&frame0.n_amb),
            w_amb: frame0.w_amb.iter().map(|w| linalg::jvec_vals(w)).collect(),
            w_param: frame0
                .w_param
                .iter()
                .map(|w| linalg::jvec_vals(w))
                .collect(),
            e_amb: frame0.e_amb.iter().map(|e| linalg::jvec_vals(e)).collect(),
            e_param,
            eps: frame0.eps.clone(),
            eta_t,
            p_w,
            unstarred,
            starred,
        })
    }

    pub fn side(&self, which: Conn) -> &SideTensors {
        match which {
            Conn::D => &self.unstarred,
            Conn::Dstar => &self.starred,
            Conn::D0 => panic!("induced tensors exist for the pair only"),
        }
    }

    /// Ambient metric pairing of plain vectors.
    pub fn pair(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                acc += self.g[a][b] * u[a] * v[b];
            }
        }
        acc
    }

    /// Pushes parameter components to ambient components.
    pub fn push(&self, v_param: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, vi) in v_param.iter().enumerate() {
            for a in 0..self.dim {
                out[a] += vi * self.tangent[i][a];
            }
        }
        out
    }

    pub fn eta_of(&self, v_param: &[f64]) -> f64 {
        v_param.iter().zip(&self.eta_t).map(|(v, e)| v * e).sum()
    }

    /// `B(X, Y)` by bilinear contraction.
    pub fn b_of(&self, which: Conn, x: &[f64], y: &[f64]) -> f64 {
        let b = &self.side(which).b;
        let mut acc = 0.0;
        for i in 0..self.mp1 {
            for j in 0..self.mp1 {
                acc += b[i][j] * x[i] * y[j];
            }
        }
        acc
    }

    /// `tau(X)` (radical-decomposition reading) on the matching side.
    pub fn tau_of(&self, which: Conn, x: &[f64]) -> f64 {
        self.side(which)
            .tau_dec
            .iter()
            .zip(x)
            .map(|(t, v)| t * v)
            .sum()
    }

    /// Screen components (in the W basis) of `P v` for parameter components.
    pub fn screen_coeffs(&self, v_param: &[f64]) -> Vec<f64> {
        let m = self.w_amb.len();
        let mut out = vec![0.0; m];
        for i in 0..self.mp1 {
            for j in 0..m {
                out[j] += v_param[i] * self.p_w[i][j];
            }
        }
        out
    }

    /// `C(X, P Y)` via the basis matrix; `screen_y` are W-basis components.
    pub fn c_of(&self, which: Conn, x: &[f64], screen_y: &[f64]) -> f64 {
        let cw = &self.side(which).c_w;
        let mut acc = 0.0;
        for i in 0..self.mp1 {
            for j in 0..screen_y.len() {
                acc += cw[i][j] * x[i] * screen_y[j];
            }
        }
        acc
    }

    /// `Abar_xi X` in W-basis components (side-matched).
    pub fn abar_of(&self, which: Conn, x: &[f64]) -> Vec<f64> {
        let ab = &self.side(which).abar;
        let m = self.w_amb.len();
        let mut out = vec![0.0; m];
        for i in 0..self.mp1 {
            for j in 0..m {
                out[j] += x[i] * ab[i][j];
            }
        }
        out
    }

    /// Shape operator ambient value: `A*_N X` for `which = D` (the
    /// operator read from the unstarred Weingarten formula), `A_N X` for
    /// `which = Dstar`.
    pub fn shape_of(&self, which: Conn, x: &[f64]) -> Vec<f64> {
        let sn = &self.side(which).shape_n;
        let mut out = vec![0.0; self.dim];
        for i in 0..self.mp1 {
            for a in 0..self.dim {
                out[a] += x[i] * sn[i][a];
            }
        }
        out
    }

    /// Ambient vector from W-basis screen components.
    pub fn screen_to_ambient(&self, screen: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (j, s) in screen.iter().enumerate() {
            for a in 0..self.dim {
                out[a] += s * self.w_amb[j][a];
            }
        }
        out
    }
}

fn basis_vector(mp1: usize, i: usize, order: usize) -> JVec {
    let mut v = linalg::jvec_zero(mp1, order);
    v[i] = Jet::constant(1.0, order);
    v
}

/// FieldJets for the i-th coordinate field (constant components).
fn basis_ek(ctx: &PointCtx<'_>, frame: &FrameJets, i: usize) -> Result<FieldJets> {
    let mp1 = ctx.hyp.n_params();
    let dim = ctx.space.dim();
    let param = basis_vector(mp1, i, frame.order);
    let dparam = vec![linalg::jvec_zero(mp1, frame.order); mp1];
    let amb = frame.t[i].clone();
    let mut damb = vec![linalg::jvec_zero(dim, frame.order); mp1];
    for k in 0..mp1 {
        for a in 0..dim {
            damb[k][a] = frame.d2phi[k][i][a];
        }
    }
    Ok(FieldJets {
        param,
        dparam,
        amb,
        damb,
    })
}

/// The full form package for one ordered field pair at one point.
#[derive(Debug, Clone)]
pub struct Forms {
    pub b: f64,
    pub b_star: f64,
    pub tau_x: f64,
    pub tau_star_x: f64,
    pub tau_x_def: f64,
    pub tau_star_x_def: f64,
    pub tau_consistency: f64,
    pub a_n_x: Vec<f64>,
    pub a_n_star_x: Vec<f64>,
    pub c_x_py: f64,
    pub c_star_x_py: f64,
    pub abar_xi_x: Vec<f64>,
    pub abar_star_xi_x: Vec<f64>,
    pub d_xy_screen: Vec<f64>,
    pub d_xy_eta: f64,
    pub d_xy_ambient: Vec<f64>,
    pub d_star_xy_screen: Vec<f64>,
    pub d_star_xy_eta: f64,
    pub d_star_xy_ambient: Vec<f64>,
    pub reconstruction_residual: f64,
}

/// Computes the full form package for the ordered pair (X, Y) at the
/// context point, using precomputed basis tensors.
pub fn fundamental_forms_at(
    ctx: &PointCtx<'_>,
    pt: &PointTensors,
    x: &TangentField,
    y: &TangentField,
) -> Result<Forms> {
    let mp1 = ctx.hyp.n_params();
    let zero = vec![0.0; mp1];
    let frame = ctx.frame(&zero, 1)?;
    let xj = field_jets(ctx, &frame, x)?;
    let yj = field_jets(ctx, &frame, y)?;
    let xv = linalg::jvec_vals(&xj.param);
    let yv = linalg::jvec_vals(&yj.param);

    let b = pt.b_of(Conn::D, &xv, &yv);
    let b_star = pt.b_of(Conn::Dstar, &xv, &yv);
    let tau_x = pt.tau_of(Conn::D, &xv);
    let tau_star_x = pt.tau_of(Conn::Dstar, &xv);
    // Weingarten readings: tau_def comes from the starred side's Weingarten
    // data and vice versa (see the module table).
    let tau_x_def: f64 = pt
        .starred
        .tau_wein
        .iter()
        .zip(&xv)
        .map(|(t, v)| t * v)
        .sum();
    let tau_star_x_def: f64 = pt
        .unstarred
        .tau_wein
        .iter()
        .zip(&xv)
        .map(|(t, v)| t * v)
        .sum();
    let tau_consistency = math::fmax(
        math::fabs(tau_x - tau_x_def),
        math::fabs(tau_star_x - tau_star_x_def),
    );

    let a_n_star_x = pt.shape_of(Conn::D, &xv);
    let a_n_x = pt.shape_of(Conn::Dstar, &xv);

    let py = pt.screen_coeffs(&yv);
    let c_x_py = pt.c_of(Conn::D, &xv, &py);
    let c_star_x_py = pt.c_of(Conn::Dstar, &xv, &py);

    let abar_xi_x = pt.abar_of(Conn::D, &xv);
    let abar_star_xi_x = pt.abar_of(Conn::Dstar, &xv);

    // Induced derivatives of the actual fields, with decompositions.
    let (d_xy_amb, b_jet) = d_induced(&frame, Conn::D, &xj, &yj)?;
    let (ds_xy_amb, bs_jet) = d_induced(&frame, Conn::Dstar, &xj, &yj)?;
    let (ds1, de1, dn1) = frame.split(&d_xy_amb)?;
    let (ds2, de2, dn2) = frame.split(&ds_xy_amb)?;

    // Reconstruction residuals: Gauss with the computed B against the
    // bilinear-contraction B, and the tangential split's N component.
    let mut recon = math::fmax(
        math::fabs(b_jet.val() - b),
        math::fabs(bs_jet.val() - b_star),
    );
    recon = math::fmax(recon, math::fabs(dn1.val()));
    recon = math::fmax(recon, math::fabs(dn2.val()));

    Ok(Forms {
        b,
        b_star,
        tau_x,
        tau_star_x,
        tau_x_def,
        tau_star_x_def,
        tau_consistency,
        a_n_x,
        a_n_star_x,
        c_x_py,
        c_star_x_py,
        abar_xi_x,
        abar_star_xi_x,
        d_xy_screen: linalg::jvec_vals(&ds1),
        d_xy_eta: de1.val(),
        d_xy_ambient: linalg::jvec_vals(&d_xy_amb),
        d_star_xy_screen: linalg::jvec_vals(&ds2),
        d_star_xy_eta: de2.val(),
        d_star_xy_ambient: linalg::jvec_vals(&ds_xy_amb),
        reconstruction_residual: recon,
    })
}

/// Ambient covariant derivative along the hypersurface.
pub fn ambient_derivative_along(
    ctx: &PointCtx<'_>,
    which: Conn,
    x: &TangentField,
    y: &AmbientField,
) -> Result<Vec<f64>> {
    let mp1 = ctx.hyp.n_params();
    match y {
        AmbientField::Tangent(t) => {
            let zero = vec![0.0; mp1];
            let frame = ctx.frame(&zero, 1)?;
            let xj = field_jets(ctx, &frame, x)?;
            let yj = field_jets(ctx, &frame, t)?;
            Ok(linalg::jvec_vals(&dtilde(&frame, which, &xj, &yj)))
        }
        AmbientField::Components(exprs) => {
            let zero = vec![0.0; mp1];
            let frame = ctx.frame(&zero, 1)?;
            let xj = field_jets(ctx, &frame, x)?;
            Ok(linalg::jvec_vals(&dtilde_ambient(
                ctx, &frame, which, &xj, exprs,
            )?))
        }
        AmbientField::Transversal => {
            let zero = vec![0.0; mp1];
            let probe = ctx.frame(&zero, 0)?;
            let xj0 = field_jets(ctx, &probe, x)?;
            let dir = linalg::jvec_vals(&xj0.param);
            let frame = ctx.frame(&dir, 1)?;
            let xj = field_jets(ctx, &frame, x)?;
            dtilde_n(&frame, which, &xj)
        }
    }
}

/// Induced connection coefficients over the parameter frame, with the
/// torsion residual of the coefficient array.
pub fn induced_connection_coeffs_at(pt: &PointTensors, which: Conn) -> (Vec<Vec<Vec<f64>>>, f64) {
    let side = pt.side(which);
    (side.ind_gamma.clone(), side.torsion_residual)
}

/// Screen connection: `nabla_X Y` (ambient components of the screen part)
/// and `C(X, Y)` for screen-valued `Y`.
pub fn screen_connection_at(
    ctx: &PointCtx<'_>,
    which: Conn,
    x: &TangentField,
    y: &TangentField,
) -> Result<(Vec<f64>, f64)> {
    let mp1 = ctx.hyp.n_params();
    let zero = vec![0.0; mp1];
    let frame = ctx.frame(&zero, 1)?;
    let xj = field_jets(ctx, &frame, x)?;
    let yj = field_jets(ctx, &frame, y)?;
    let eta_y = frame.eta(&yj.amb).val();
    if math::fabs(eta_y) > 1e-9 {
        return Err(Error::Invalid {
            message: format!("screen connection needs a screen-valued field (eta(Y) = {eta_y:e})"),
        });
    }
    let (d_xy, _b) = d_induced(&frame, which, &xj, &yj)?;
    let (s, c_xy, _n) = frame.split(&d_xy)?;
    let mut nabla = vec![0.0; ctx.space.dim()];
    for (k, w) in frame.w_amb.iter().enumerate() {
        for a in 0..ctx.space.dim() {
            nabla[a] += s[k].val() * w[a].val();
        }
    }
    Ok((nabla, c_xy.val()))
}

/// `(P X, eta(X))` at a point.
pub fn eta_project(ctx: &PointCtx<'_>, x: &TangentField) -> Result<(Vec<f64>, f64)> {
    let mp1 = ctx.hyp.n_params();
    let zero = vec![0.0; mp1];
    let frame = ctx.frame(&zero, 0)?;
    let xj = field_jets(ctx, &frame, x)?;
    let eta = frame.eta(&xj.amb).val();
    let p = frame.project(&xj.amb);
    Ok((linalg::jvec_vals(&p), eta))
}

/// Directional derivative of the scalar field `g(Y, Z)` along X at the
/// context point (all three are tangent fields).
pub fn x_of_g_yz(
    ctx: &PointCtx<'_>,
    x: &TangentField,
    y: &TangentField,
    z: &TangentField,
) -> Result<f64> {
    let mp1 = ctx.hyp.n_params();
    let zero = vec![0.0; mp1];
    let probe = ctx.frame(&zero, 0)?;
    let xj0 = field_jets(ctx, &probe, x)?;
    let dir = linalg::jvec_vals(&xj0.param);
    let frame = ctx.frame(&dir, 1)?;
    let yj = field_jets(ctx, &frame, y)?;
    let zj = field_jets(ctx, &frame, z)?;
    Ok(frame.pair(&yj.amb, &zj.amb).coeff(1))
}
