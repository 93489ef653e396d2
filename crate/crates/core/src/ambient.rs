//! The ambient space: a semi-Riemannian metric together with a pair of
//! affine connections defined either by a lowered difference tensor added to
//! the Levi-Civita connection, or by explicit coefficient arrays.
//!
//! In difference-tensor mode the pair is `gamma = gamma0 + K^a_bc` and
//! `gamma_star = gamma0 - K^a_bc`, so their average is Levi-Civita by
//! construction. Explicit mode evaluates both arrays directly and reports
//! the average; it exists so that connection pairs given only by their
//! values on a frame (which may fail metric duality globally) can still be
//! represented and measured.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprDerivs};
use crate::jet::Jet;
use crate::linalg::{self, JMat};
use crate::math;

/// Which connection of the pair (or their Levi-Civita average).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conn {
    D,
    Dstar,
    D0,
}

/// Connection input mode.
#[derive(Debug, Clone)]
pub enum ConnMode {
    /// Sparse fully-lowered difference tensor, keyed by sorted index triple;
    /// unlisted triples are zero.
    KLower(Vec<([usize; 3], Expr)>),
    /// Explicit coefficient arrays `gamma[a][b][c]`, `gamma_star[a][b][c]`.
    Explicit {
        gamma: Vec<Vec<Vec<Expr>>>,
        gamma_star: Vec<Vec<Vec<Expr>>>,
    },
}

#[derive(Debug, Clone)]
pub struct AmbientSpace {
    dim: usize,
    coords: Vec<String>,
    metric: Vec<Vec<Expr>>,
    mode: ConnMode,
    constant_c: Option<f64>,
}

/// Metric data at a point.
#[derive(Debug, Clone)]
pub struct MetricPoint {
    pub g: Vec<Vec<f64>>,
    pub inv: Vec<Vec<f64>>,
    pub signature: Vec<i8>,
    pub det: f64,
}

/// Connection coefficients of the pair at one point.
#[derive(Debug, Clone)]
pub struct ConnPair {
    pub point: Vec<f64>,
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub gamma_star: Vec<Vec<Vec<f64>>>,
    pub gamma0: Vec<Vec<Vec<f64>>>,
}

/// Jet-valued metric and connection data along a curve.
pub struct ConnJets {
    pub g: JMat,
    pub ginv: JMat,
    /// `gamma[a][b][c]`: coefficient of the derivative of the c-th argument
    /// along coordinate direction b, output component a.
    pub gamma0: Vec<JMat>,
    pub gamma: Vec<JMat>,
    pub gamma_star: Vec<JMat>,
}

impl ConnJets {
    pub fn pick(&self, which: Conn) -> &Vec<JMat> {
        match which {
            Conn::D => &self.gamma,
            Conn::Dstar => &self.gamma_star,
            Conn::D0 => &self.gamma0,
        }
    }
}

/// Rank-(1,3) curvature array `R^a_{bcd}` with `R(X,Y)Z^a = R^a_{bcd} Z^b X^c Y^d`.
#[derive(Debug, Clone)]
pub struct Rank13 {
    pub dim: usize,
    data: Vec<f64>,
}

impl Rank13 {
    fn zero(dim: usize) -> Rank13 {
        Rank13 {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.dim + b) * self.dim + c) * self.dim + d]
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[((a * self.dim + b) * self.dim + c) * self.dim + d] = v;
    }

    /// `R(X,Y)Z` contracted with plain vectors.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for a in 0..n {
            let mut acc = 0.0;
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        acc += self.get(a, b, c, d) * z[b] * x[c] * y[d];
                    }
                }
            }
            out[a] = acc;
        }
        out
    }
}

/// Probe vectors at one evaluation point, each with a label and a kind that
/// controls how validation aggregates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Coordinate,
    Frame,
    Random,
}

#[derive(Debug, Clone)]
pub struct Probe {
    pub label: String,
    pub kind: ProbeKind,
    pub components: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WorstOffender {
    pub residual: f64,
    pub point_index: usize,
    pub labels: [String; 3],
}

#[derive(Debug, Clone)]
pub struct FrameDuality {
    pub labels: [String; 3],
    pub max_residual: f64,
    pub point_index: usize,
}

#[derive(Debug, Clone)]
pub struct StatValidationReport {
    pub torsion_residual: f64,
    pub torsion_worst: Option<(usize, [usize; 3])>,
    pub codazzi_residual: f64,
    pub codazzi_worst: Option<WorstOffender>,
    pub duality_residual: f64,
    pub duality_worst: Option<WorstOffender>,
    /// Per-triple duality maxima over frame-kind probes.
    pub frame_duality: Vec<FrameDuality>,
    pub signature: Vec<i8>,
    pub signature_constant: bool,
    pub tolerance: f64,
    pub pass: bool,
}

impl AmbientSpace {
    pub fn new(
        dim: usize,
        coords: Vec<String>,
        metric: Vec<Vec<Expr>>,
        mode: ConnMode,
        constant_c: Option<f64>,
    ) -> Result<AmbientSpace> {
        if coords.len() != dim {
            return Err(Error::Invalid {
                message: format!("{} coordinate names for dimension {dim}", coords.len()),
            });
        }
        if metric.len() != dim || metric.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid {
                message: String::from("metric matrix shape does not match dimension"),
            });
        }
        let mode = match mode {
            ConnMode::KLower(entries) => {
                let mut sorted: Vec<([usize; 3], Expr)> = Vec::new();
                for (idx, expr) in entries {
                    for &i in &idx {
                        if i >= dim {
                            return Err(Error::IndexOutOfRange { index: i, dim });
                        }
                    }
                    let mut key = idx;
                    key.sort_unstable();
                    match sorted.iter().find(|(k, _)| *k == key) {
                        Some((_, existing)) if *existing == expr => {}
                        Some((k, _)) => return Err(Error::AsymmetricK { triple: *k }),
                        None => sorted.push((key, expr)),
                    }
                }
                sorted.sort_by_key(|(k, _)| *k);
                ConnMode::KLower(sorted)
            }
            ConnMode::Explicit { gamma, gamma_star } => {
                for arr in [&gamma, &gamma_star] {
                    let ok = arr.len() == dim
                        && arr
                            .iter()
                            .all(|b| b.len() == dim && b.iter().all(|c| c.len() == dim));
                    if !ok {
                        return Err(Error::Invalid {
                            message: String::from(
                                "explicit connection arrays must be dim x dim x dim",
                            ),
                        });
                    }
                }
                ConnMode::Explicit { gamma, gamma_star }
            }
        };
        Ok(AmbientSpace {
            dim,
            coords,
            metric,
            mode,
            constant_c,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn metric_exprs(&self) -> &Vec<Vec<Expr>> {
        &self.metric
    }

    pub fn mode(&self) -> &ConnMode {
        &self.mode
    }

    pub fn constant_c(&self) -> Option<f64> {
        self.constant_c
    }

    pub fn is_k_mode(&self) -> bool {
        matches!(self.mode, ConnMode::KLower(_))
    }

    /// Looks up the lowered difference tensor entry for a (sorted) triple.
    fn k_lower_entry(&self, a: usize, b: usize, c: usize) -> Option<&Expr> {
        match &self.mode {
            ConnMode::KLower(entries) => {
                let mut key = [a, b, c];
                key.sort_unstable();
                entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e)
            }
            ConnMode::Explicit { .. } => None,
        }
    }

    /// Metric as jets along the curve described by `xjets`, with a symmetry
    /// and degeneracy check on the value part.
    pub fn metric_jets(&self, xjets: &[Jet]) -> Result<JMat> {
        let n = self.dim;
        let mut g = linalg::jmat_zero(n, n, xjets.iter().map(|j| j.order()).max().unwrap_or(0));
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.metric[i][j].eval_jets(xjets)?;
            }
        }
        let vals = linalg::jmat_vals(&g);
        let scale = vals
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| math::fabs(*v))
            .fold(0.0, math::fmax)
            .max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if math::fabs(vals[i][j] - vals[j][i]) > 1e-12 * scale {
                    return Err(Error::Invalid {
                        message: format!(
                            "metric not symmetric at evaluation point: g[{i}][{j}] = {} vs g[{j}][{i}] = {}",
                            vals[i][j], vals[j][i]
                        ),
                    });
                }
            }
        }
        let det = linalg::det_vals(&vals);
        if math::fabs(det) < 1e-12 * math::powi(scale, n as i32) {
            return Err(Error::DegenerateMetric { det });
        }
        Ok(g)
    }

    /// Metric, inverse, and signature at a point.
    pub fn metric_at(&self, x: &[f64]) -> Result<MetricPoint> {
        let xjets: Vec<Jet> = x.iter().map(|v| Jet::constant(*v, 0)).collect();
        let g = self.metric_jets(&xjets)?;
        let ginv = linalg::invert(&g, "metric inverse")?;
        let gv = linalg::jmat_vals(&g);
        let iv = linalg::jmat_vals(&ginv);
        // || g * g^-1 - I ||_inf
        let n = self.dim;
        let mut resid: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += gv[i][k] * iv[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                resid = math::fmax(resid, math::fabs(acc - target));
            }
        }
        if resid > 1e-10 {
            return Err(Error::Invalid {
                message: format!("metric inversion residual {resid:e} exceeds 1e-10"),
            });
        }
        let (eigvals, _) = linalg::sym_eigen(&gv);
        let signature = eigvals
            .iter()
            .map(|v| if *v < 0.0 { -1 } else { 1 })
            .collect();
        Ok(MetricPoint {
            g: gv,
            inv: iv,
            signature,
            det: linalg::det_vals(&linalg::jmat_vals(&self.metric_jets(&xjets)?)),
        })
    }

    /// Derivative tensors of every metric entry at `x0`, for use with
    /// [`ExprDerivs::partial_jet`] along curves through `x0`.
    pub fn metric_derivs(&self, x0: &[f64], order: usize) -> Result<Vec<Vec<ExprDerivs>>> {
        let n = self.dim;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(self.metric[i][j].derivs(x0, order)?);
            }
            out.push(row);
        }
        Ok(out)
    }

    /// Levi-Civita coefficients as jets:
    /// `gamma0^a_bc = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)`.
    fn christoffel_jets(
        &self,
        xjets: &[Jet],
        ginv: &JMat,
        mderivs: &[Vec<ExprDerivs>],
    ) -> Result<Vec<JMat>> {
        let n = self.dim;
        let order = xjets.iter().map(|j| j.order()).max().unwrap_or(0);
        // dg[d][b][c] = d_d g_bc as a jet along the curve.
        let mut dg = vec![linalg::jmat_zero(n, n, order); n];
        for d in 0..n {
            for b in 0..n {
                for c in 0..n {
                    dg[d][b][c] = mderivs[b][c].partial_jet(d, xjets);
                }
            }
        }
        let mut gamma0 = vec![linalg::jmat_zero(n, n, order); n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = Jet::constant(0.0, order);
                    for d in 0..n {
                        let sum = dg[b][d][c].add(&dg[c][d][b]).sub(&dg[d][b][c]);
                        acc = acc.add(&ginv[a][d].mul(&sum));
                    }
                    gamma0[a][b][c] = acc.scale(0.5);
                }
            }
        }
        Ok(gamma0)
    }

    /// Metric, inverse, and the three connections as jets along a curve.
    /// `mderivs` must be built at the curve's base point.
    pub fn connection_jets(&self, xjets: &[Jet], mderivs: &[Vec<ExprDerivs>]) -> Result<ConnJets> {
        let n = self.dim;
        let order = xjets.iter().map(|j| j.order()).max().unwrap_or(0);
        let g = self.metric_jets(xjets)?;
        let ginv = linalg::invert(&g, "metric inverse")?;
        match &self.mode {
            ConnMode::KLower(_) => {
                let gamma0 = self.christoffel_jets(xjets, &ginv, mderivs)?;
                // Raise the first index of the lowered tensor.
                let mut kup = vec![linalg::jmat_zero(n, n, order); n];
                let mut klow = vec![linalg::jmat_zero(n, n, order); n];
                for a in 0..n {
                    for b in 0..n {
                        for c in b..n {
                            if let Some(e) = self.k_lower_entry(a, b, c) {
                                let v = e.eval_jets(xjets)?;
                                klow[a][b][c] = v;
                                klow[a][c][b] = v;
                            }
                        }
                    }
                }
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let mut acc = Jet::constant(0.0, order);
                            for d in 0..n {
                                acc = acc.add(&ginv[a][d].mul(&klow[d][b][c]));
                            }
                            kup[a][b][c] = acc;
                        }
                    }
                }
                let mut gamma = vec![linalg::jmat_zero(n, n, order); n];
                let mut gamma_star = vec![linalg::jmat_zero(n, n, order); n];
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            gamma[a][b][c] = gamma0[a][b][c].add(&kup[a][b][c]);
                            gamma_star[a][b][c] = gamma0[a][b][c].sub(&kup[a][b][c]);
                        }
                    }
                }
                Ok(ConnJets {
                    g,
                    ginv,
                    gamma0,
                    gamma,
                    gamma_star,
                })
            }
            ConnMode::Explicit { gamma, gamma_star } => {
                let mut ga = vec![linalg::jmat_zero(n, n, order); n];
                let mut gs = vec![linalg::jmat_zero(n, n, order); n];
                let mut g0 = vec![linalg::jmat_zero(n, n, order); n];
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            ga[a][b][c] = gamma[a][b][c].eval_jets(xjets)?;
                            gs[a][b][c] = gamma_star[a][b][c].eval_jets(xjets)?;
                            g0[a][b][c] = ga[a][b][c].add(&gs[a][b][c]).scale(0.5);
                        }
                    }
                }
                Ok(ConnJets {
                    g,
                    ginv,
                    gamma0: g0,
                    gamma: ga,
                    gamma_star: gs,
                })
            }
        }
    }

    /// Levi-Civita coefficients at a point, with the metric-compatibility
    /// residual `max |d_c g_ab - G^d_ca g_db - G^d_cb g_ad|`.
    pub fn christoffel_lc_at(&self, x: &[f64]) -> Result<(Vec<Vec<Vec<f64>>>, f64)> {
        let n = self.dim;
        let xjets: Vec<Jet> = x.iter().map(|v| Jet::constant(*v, 0)).collect();
        let mderivs = self.metric_derivs(x, 1)?;
        let g = self.metric_jets(&xjets)?;
        let ginv = linalg::invert(&g, "metric inverse")?;
        let gamma0 = self.christoffel_jets(&xjets, &ginv, &mderivs)?;
        let gv = linalg::jmat_vals(&g);
        let g0: Vec<Vec<Vec<f64>>> = gamma0
            .iter()
            .map(|m| {
                m.iter()
                    .map(|r| r.iter().map(|j| j.val()).collect())
                    .collect()
            })
            .collect();
        let mut resid: f64 = 0.0;
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = mderivs[a][b].grad(c);
                    for d in 0..n {
                        v -= g0[d][c][a] * gv[d][b] + g0[d][c][b] * gv[a][d];
                    }
                    resid = math::fmax(resid, math::fabs(v));
                }
            }
        }
        Ok((g0, resid))
    }

    /// Plain-value connection pair at a point.
    pub fn connection_pair_at(&self, x: &[f64]) -> Result<ConnPair> {
        let xjets: Vec<Jet> = x.iter().map(|v| Jet::constant(*v, 0)).collect();
        let mderivs = self.metric_derivs(x, 1)?;
        let cj = self.connection_jets(&xjets, &mderivs)?;
        let vals = |arr: &Vec<JMat>| -> Vec<Vec<Vec<f64>>> {
            arr.iter()
                .map(|m| {
                    m.iter()
                        .map(|r| r.iter().map(|j| j.val()).collect())
                        .collect()
                })
                .collect()
        };
        Ok(ConnPair {
            point: x.to_vec(),
            gamma: vals(&cj.gamma),
            gamma_star: vals(&cj.gamma_star),
            gamma0: vals(&cj.gamma0),
        })
    }

    /// Curvature array of the chosen connection at an ambient point:
    /// `R^a_{bcd} = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb`.
    pub fn ambient_curvature_at(&self, x: &[f64], which: Conn) -> Result<Rank13> {
        let n = self.dim;
        let order_needed = if self.is_k_mode() { 2 } else { 1 };
        let mderivs = self.metric_derivs(x, order_needed)?;
        // One jet run per coordinate direction gives all first partials of
        // the coefficients.
        let mut gamma_val = vec![vec![vec![0.0; n]; n]; n];
        let mut dgamma = vec![vec![vec![vec![0.0; n]; n]; n]; n]; // [c][a][b][d] = d_c G^a_bd
        for dir in 0..n {
            let xjets: Vec<Jet> = (0..n)
                .map(|i| Jet::variable(x[i], if i == dir { 1.0 } else { 0.0 }, 1))
                .collect();
            let cj = self.connection_jets(&xjets, &mderivs)?;
            let arr = cj.pick(which);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if dir == 0 {
                            gamma_val[a][b][c] = arr[a][b][c].val();
                        }
                        dgamma[dir][a][b][c] = arr[a][b][c].coeff(1);
                    }
                }
            }
        }
        let mut r = Rank13::zero(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut v = dgamma[c][a][d][b] - dgamma[d][a][c][b];
                        for e in 0..n {
                            v += gamma_val[a][c][e] * gamma_val[e][d][b]
                                - gamma_val[a][d][e] * gamma_val[e][c][b];
                        }
                        r.set(a, b, c, d, v);
                    }
                }
            }
        }
        Ok(r)
    }

    /// Max residual of the constant-curvature model
    /// `R(X,Y)Z = c (g(Y,Z) X - g(X,Z) Y)` over ordered probe triples.
    pub fn constant_curvature_residual(
        &self,
        x: &[f64],
        c: f64,
        probes: &[Vec<f64>],
    ) -> Result<f64> {
        let r = self.ambient_curvature_at(x, Conn::D)?;
        let mp = self.metric_at(x)?;
        let pair = |u: &[f64], v: &[f64]| -> f64 {
            let mut acc = 0.0;
            for a in 0..self.dim {
                for b in 0..self.dim {
                    acc += mp.g[a][b] * u[a] * v[b];
                }
            }
            acc
        };
        let mut worst: f64 = 0.0;
        for xv in probes {
            for yv in probes {
                for zv in probes {
                    let rxyz = r.apply(xv, yv, zv);
                    let gyz = pair(yv, zv);
                    let gxz = pair(xv, zv);
                    for a in 0..self.dim {
                        let model = c * (gyz * xv[a] - gxz * yv[a]);
                        worst = math::fmax(worst, math::fabs(rxyz[a] - model));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Evaluates the statistical-structure conditions numerically at the
    /// given points. `probes` is parallel to `points`. A failing validation
    /// is a report, not an error.
    pub fn validate_statistical(
        &self,
        points: &[Vec<f64>],
        probes: &[Vec<Probe>],
        tolerance: f64,
    ) -> Result<StatValidationReport> {
        let n = self.dim;
        let mut report = StatValidationReport {
            torsion_residual: 0.0,
            torsion_worst: None,
            codazzi_residual: 0.0,
            codazzi_worst: None,
            duality_residual: 0.0,
            duality_worst: None,
            frame_duality: Vec::new(),
            signature: Vec::new(),
            signature_constant: true,
            tolerance,
            pass: false,
        };
        let mut frame_duality: Vec<FrameDuality> = Vec::new();

        for (pi, x) in points.iter().enumerate() {
            let mp = self.metric_at(x)?;
            if pi == 0 {
                report.signature = mp.signature.clone();
            } else if report.signature != mp.signature {
                report.signature_constant = false;
            }
            let mderivs = self.metric_derivs(x, 1)?;
            let xjets: Vec<Jet> = x.iter().map(|v| Jet::constant(*v, 0)).collect();
            let cj = self.connection_jets(&xjets, &mderivs)?;
            let gamma: Vec<Vec<Vec<f64>>> = cj
                .gamma
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|r| r.iter().map(|j| j.val()).collect())
                        .collect()
                })
                .collect();
            let gamma_star: Vec<Vec<Vec<f64>>> = cj
                .gamma_star
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|r| r.iter().map(|j| j.val()).collect())
                        .collect()
                })
                .collect();

            // Torsion of both coefficient arrays.
            for arr in [&gamma, &gamma_star] {
                for a in 0..n {
                    for b in 0..n {
                        for c in (b + 1)..n {
                            let t = math::fabs(arr[a][b][c] - arr[a][c][b]);
                            if t > report.torsion_residual {
                                report.torsion_residual = t;
                                report.torsion_worst = Some((pi, [a, b, c]));
                            }
                        }
                    }
                }
            }

            // d_c g_ab at this point.
            let mut dg = vec![vec![vec![0.0; n]; n]; n];
            for c in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        dg[c][a][b] = mderivs[a][b].grad(c);
                    }
                }
            }
            let pair = |u: &[f64], v: &[f64]| -> f64 {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        acc += mp.g[a][b] * u[a] * v[b];
                    }
                }
                acc
            };
            let conn_apply = |arr: &Vec<Vec<Vec<f64>>>, u: &[f64], v: &[f64]| -> Vec<f64> {
                let mut out = vec![0.0; n];
                for a in 0..n {
                    let mut acc = 0.0;
                    for b in 0..n {
                        for c in 0..n {
                            acc += arr[a][b][c] * u[b] * v[c];
                        }
                    }
                    out[a] = acc;
                }
                out
            };
            // (D_X g)(Y,Z) for a frozen-vector probe.
            let nabla_g = |xv: &[f64], yv: &[f64], zv: &[f64]| -> f64 {
                let mut lead = 0.0;
                for c in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            lead += xv[c] * dg[c][a][b] * yv[a] * zv[b];
                        }
                    }
                }
                lead - pair(&conn_apply(&gamma, xv, yv), zv) - pair(yv, &conn_apply(&gamma, xv, zv))
            };

            let ps = &probes[pi];
            for (zi, z) in ps.iter().enumerate() {
                for (xi_, xp) in ps.iter().enumerate() {
                    for (yi, yp) in ps.iter().enumerate() {
                        // Duality defect for the triple (Z, X, Y).
                        let mut lead = 0.0;
                        for c in 0..n {
                            for a in 0..n {
                                for b in 0..n {
                                    lead += z.components[c]
                                        * dg[c][a][b]
                                        * xp.components[a]
                                        * yp.components[b];
                                }
                            }
                        }
                        let defect =
                            lead - pair(
                                &conn_apply(&gamma, &z.components, &xp.components),
                                &yp.components,
                            ) - pair(
                                &xp.components,
                                &conn_apply(&gamma_star, &z.components, &yp.components),
                            );
                        let defect = math::fabs(defect);
                        if defect > report.duality_residual {
                            report.duality_residual = defect;
                            report.duality_worst = Some(WorstOffender {
                                residual: defect,
                                point_index: pi,
                                labels: [z.label.clone(), xp.label.clone(), yp.label.clone()],
                            });
                        }
                        if z.kind == ProbeKind::Frame
                            && xp.kind == ProbeKind::Frame
                            && yp.kind == ProbeKind::Frame
                        {
                            let labels = [z.label.clone(), xp.label.clone(), yp.label.clone()];
                            match frame_duality.iter_mut().find(|f| f.labels == labels) {
                                Some(f) => {
                                    if defect > f.max_residual {
                                        f.max_residual = defect;
                                        f.point_index = pi;
                                    }
                                }
                                None => frame_duality.push(FrameDuality {
                                    labels,
                                    max_residual: defect,
                                    point_index: pi,
                                }),
                            }
                        }

                        // Condition (1) with the actual torsion of gamma.
                        let _ = zi;
                        let _ = xi_;
                        let _ = yi;
                        let torsion_vec: Vec<f64> = {
                            let a1 = conn_apply(&gamma, &xp.components, &yp.components);
                            let a2 = conn_apply(&gamma, &yp.components, &xp.components);
                            a1.iter().zip(&a2).map(|(p, q)| p - q).collect()
                        };
                        let cod = nabla_g(&xp.components, &yp.components, &z.components)
                            - nabla_g(&yp.components, &xp.components, &z.components)
                            - pair(&torsion_vec, &z.components);
                        let cod = math::fabs(cod);
                        if cod > report.codazzi_residual {
                            report.codazzi_residual = cod;
                            report.codazzi_worst = Some(WorstOffender {
                                residual: cod,
                                point_index: pi,
                                labels: [xp.label.clone(), yp.label.clone(), z.label.clone()],
                            });
                        }
                    }
                }
            }
        }

        frame_duality.sort_by(|a, b| a.labels.cmp(&b.labels));
        report.frame_duality = frame_duality;
        report.pass = report.torsion_residual < tolerance
            && report.codazzi_residual < tolerance
            && report.duality_residual < tolerance
            && report.signature_constant;
        Ok(report)
    }
}

/// First Bianchi residual `max |R^a_bcd + R^a_cdb + R^a_dbc|`.
pub fn bianchi_residual(r: &Rank13) -> f64 {
    let n = r.dim;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let s = r.get(a, b, c, d) + r.get(a, c, d, b) + r.get(a, d, b, c);
                    worst = math::fmax(worst, math::fabs(s));
                }
            }
        }
    }
    worst
}

/// Antisymmetry residual in the last index pair: `max |R^a_bcd + R^a_bdc|`.
pub fn antisymmetry_residual(r: &Rank13) -> f64 {
    let n = r.dim;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let s = r.get(a, b, c, d) + r.get(a, b, d, c);
                    worst = math::fmax(worst, math::fabs(s));
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat_r42() -> AmbientSpace {
        let coords = ["x0", "x1", "x2", "x3"];
        let mut metric = Vec::new();
        for i in 0..4 {
            let mut row = Vec::new();
            for j in 0..4 {
                let s = if i != j {
                    "0"
                } else if i < 2 {
                    "-1"
                } else {
                    "1"
                };
                row.push(Expr::parse(s, &coords).unwrap());
            }
            metric.push(row);
        }
        AmbientSpace::new(
            4,
            coords.iter().map(|s| String::from(*s)).collect(),
            metric,
            ConnMode::KLower(Vec::new()),
            Some(0.0),
        )
        .unwrap()
    }

    #[test]
    fn flat_metric_point() {
        let space = flat_r42();
        let mp = space.metric_at(&[0.2, -1.0, 3.0, 4.0]).unwrap();
        assert_eq!(mp.signature, vec![-1, -1, 1, 1]);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i != j {
                    0.0
                } else if i < 2 {
                    -1.0
                } else {
                    1.0
                };
                assert_eq!(mp.g[i][j], expect);
                assert_eq!(mp.inv[i][j], expect);
            }
        }
    }

    #[test]
    fn diagonal_metric_inverse_and_christoffel() {
        // 2-dim metric diag(1, x1^2): the only non-zero coefficients are
        // G^2_12 = G^2_21 = 1/x1 and G^1_22 = -x1 (1-based labels).
        let coords = ["x1", "x2"];
        let metric = vec![
            vec![
                Expr::parse("1", &coords).unwrap(),
                Expr::parse("0", &coords).unwrap(),
            ],
            vec![
                Expr::parse("0", &coords).unwrap(),
                Expr::parse("x1^2", &coords).unwrap(),
            ],
        ];
        let space = AmbientSpace::new(
            2,
            coords.iter().map(|s| String::from(*s)).collect(),
            metric,
            ConnMode::KLower(Vec::new()),
            None,
        )
        .unwrap();
        let mp = space.metric_at(&[2.0, 0.7]).unwrap();
        assert_eq!(mp.g[1][1], 4.0);
        assert_relative_eq!(mp.inv[1][1], 0.25, epsilon = 1e-14);

        let cp = space.connection_pair_at(&[2.0, 0.7]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let expect = match (a, b, c) {
                        (1, 0, 1) | (1, 1, 0) => 0.5,
                        (0, 1, 1) => -2.0,
                        _ => 0.0,
                    };
                    assert_relative_eq!(cp.gamma0[a][b][c], expect, epsilon = 1e-10);
                    // K = 0: pair coincides with Levi-Civita.
                    assert_relative_eq!(cp.gamma[a][b][c], expect, epsilon = 1e-10);
                    assert_relative_eq!(cp.gamma_star[a][b][c], expect, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_metric_rejected() {
        let coords = ["x1", "x2"];
        let metric = vec![
            vec![
                Expr::parse("1", &coords).unwrap(),
                Expr::parse("1", &coords).unwrap(),
            ],
            vec![
                Expr::parse("1", &coords).unwrap(),
                Expr::parse("1", &coords).unwrap(),
            ],
        ];
        let space = AmbientSpace::new(
            2,
            coords.iter().map(|s| String::from(*s)).collect(),
            metric,
            ConnMode::KLower(Vec::new()),
            None,
        )
        .unwrap();
        assert!(matches!(
            space.metric_at(&[1.0, 1.0]),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn conformal_christoffel_spot_values() {
        // e^{2 x2} * diag(1,1) in coordinates (x1, x2):
        // G^1_12 = 1 and G^2_11 = -1.
        let coords = ["x1", "x2"];
        let metric = vec![
            vec![
                Expr::parse("exp(2*x2)", &coords).unwrap(),
                Expr::parse("0", &coords).unwrap(),
            ],
            vec![
                Expr::parse("0", &coords).unwrap(),
                Expr::parse("exp(2*x2)", &coords).unwrap(),
            ],
        ];
        let space = AmbientSpace::new(
            2,
            coords.iter().map(|s| String::from(*s)).collect(),
            metric,
            ConnMode::KLower(Vec::new()),
            None,
        )
        .unwrap();
        let cp = space.connection_pair_at(&[0.3, 0.0]).unwrap();
        assert_relative_eq!(cp.gamma0[0][0][1], 1.0, epsilon = 1e-10);
        assert_relative_eq!(cp.gamma0[1][0][0], -1.0, epsilon = 1e-10);
        assert_relative_eq!(cp.gamma0[0][0][1], -cp.gamma0[1][0][0], epsilon = 1e-12);
    }

    #[test]
    fn symmetric_k_single_entry_pattern() {
        // Lowered K_{222} = x3 over flat R^4_2: gamma - gamma0 must be
        // g^{a2} x3 at (b,c) = (2,2) and zero elsewhere.
        let coords = ["x0", "x1", "x2", "x3"];
        let mut space = flat_r42();
        space.mode = ConnMode::KLower(vec![([2, 2, 2], Expr::parse("x3", &coords).unwrap())]);
        let x = [0.0, 0.0, 1.0, 1.5];
        let cp = space.connection_pair_at(&x).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let expect = if a == 2 && b == 2 && c == 2 { 1.5 } else { 0.0 };
                    assert_relative_eq!(
                        cp.gamma[a][b][c] - cp.gamma0[a][b][c],
                        expect,
                        epsilon = 1e-12
                    );
                    assert_relative_eq!(
                        cp.gamma_star[a][b][c] - cp.gamma0[a][b][c],
                        -expect,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn asymmetric_sparse_k_flagged() {
        let coords = ["x0", "x1", "x2", "x3"];
        let entries = vec![
            ([0usize, 1, 2], Expr::parse("x3", &coords).unwrap()),
            ([1usize, 0, 2], Expr::parse("x2", &coords).unwrap()),
        ];
        let err = AmbientSpace::new(
            4,
            coords.iter().map(|s| String::from(*s)).collect(),
            flat_r42().metric.clone(),
            ConnMode::KLower(entries),
            None,
        )
        .unwrap_err();
        assert_eq!(err, Error::AsymmetricK { triple: [0, 1, 2] });
    }

    #[test]
    fn flat_space_curvature_vanishes() {
        let space = flat_r42();
        let r = space
            .ambient_curvature_at(&[0.1, 0.2, 1.0, 2.0], Conn::D)
            .unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        assert_eq!(r.get(a, b, c, d), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_curvature_residual_flat() {
        let space = flat_r42();
        let probes: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.3, -0.4, 0.9, 0.2],
        ];
        let x = [0.0, 0.0, 1.0, 1.0];
        assert_eq!(
            space.constant_curvature_residual(&x, 0.0, &probes).unwrap(),
            0.0
        );
        // c = 1 on flat space: residual equals the model magnitude.
        let r1 = space.constant_curvature_residual(&x, 1.0, &probes).unwrap();
        let mp = space.metric_at(&x).unwrap();
        let pair = |u: &[f64], v: &[f64]| -> f64 { (0..4).map(|a| mp.g[a][a] * u[a] * v[a]).sum() };
        let mut expect: f64 = 0.0;
        for xv in &probes {
            for yv in &probes {
                for zv in &probes {
                    for a in 0..4 {
                        let model = pair(yv, zv) * xv[a] - pair(xv, zv) * yv[a];
                        expect = expect.max(model.abs());
                    }
                }
            }
        }
        assert_relative_eq!(r1, expect, epsilon = 1e-13);
    }

    #[test]
    fn christoffel_metric_compatibility_residual() {
        let coords = ["x1", "x2"];
        let metric = vec![
            vec![
                Expr::parse("1 + x2^2", &coords).unwrap(),
                Expr::parse("x1*x2", &coords).unwrap(),
            ],
            vec![
                Expr::parse("x1*x2", &coords).unwrap(),
                Expr::parse("2 + x1^2", &coords).unwrap(),
            ],
        ];
        let space = AmbientSpace::new(
            2,
            coords.iter().map(|s| String::from(*s)).collect(),
            metric,
            ConnMode::KLower(Vec::new()),
            None,
        )
        .unwrap();
        let (_g0, resid) = space.christoffel_lc_at(&[0.7, -0.4]).unwrap();
        assert!(resid < 1e-9, "metric compatibility residual {resid:e}");

        // The self-dual Levi-Civita pair of a curved metric validates as
        // statistical (duality defect at round-off).
        let points = vec![vec![0.7, -0.4], vec![1.2, 0.5]];
        let probes: Vec<Vec<Probe>> = points
            .iter()
            .map(|_| {
                let mut ps: Vec<Probe> = (0..2)
                    .map(|i| Probe {
                        label: alloc::format!("e{i}"),
                        kind: ProbeKind::Coordinate,
                        components: (0..2).map(|j| if i == j { 1.0 } else { 0.0 }).collect(),
                    })
                    .collect();
                ps.push(Probe {
                    label: String::from("rnd0"),
                    kind: ProbeKind::Random,
                    components: alloc::vec![0.6, -1.1],
                });
                ps
            })
            .collect();
        let rep = space.validate_statistical(&points, &probes, 1e-10).unwrap();
        assert!(rep.pass, "duality {:e}", rep.duality_residual);
    }

    #[test]
    fn levi_civita_pair_validates_as_statistical() {
        let space = flat_r42();
        let points = vec![vec![0.0, 0.0, 1.0, 1.0], vec![0.5, -0.5, 2.0, 1.0]];
        let probes: Vec<Vec<Probe>> = points
            .iter()
            .map(|_| {
                (0..4)
                    .map(|i| Probe {
                        label: alloc::format!("e{i}"),
                        kind: ProbeKind::Coordinate,
                        components: (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect(),
                    })
                    .collect()
            })
            .collect();
        let rep = space.validate_statistical(&points, &probes, 1e-9).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.torsion_residual, 0.0);
        assert_eq!(rep.duality_residual, 0.0);
    }
}
