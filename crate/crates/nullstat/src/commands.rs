//! Command dispatch: builds the scene from a manifest, runs the requested
//! computation, and renders the report.

use anyhow::{bail, Result};
use serde::Serialize;

use nullstat_core::ambient::Conn;
use nullstat_core::curvature::{curvature_data, curvature_scalars_at, ricci02_at};
use nullstat_core::harness::{run_identity_suite, run_validation, RunConfig, Scene};
use nullstat_core::hypersurface::{null_frame_at, PointCtx};
use nullstat_core::induced::{fundamental_forms_at, PointTensors, TangentField};
use nullstat_core::sampling::sample_points;

use crate::manifest::Manifest;
use crate::report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => bail!("unknown format `{other}` (expected json or csv)"),
        }
    }
}

/// Flag overrides applied on top of the manifest's run section.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub jet_order: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, m: &mut Manifest) {
        if let Some(p) = self.points {
            m.run.points = p;
        }
        if let Some(s) = self.seed {
            m.run.seed = s;
        }
        if let Some(o) = self.jet_order {
            m.run.jet_order = o;
        }
        if let Some(t) = self.tol {
            // --tol sets the first-order tolerance; the higher tiers scale
            // by the same factors as the defaults (1e-9 / 1e-7 / 1e-5).
            m.run.tolerances.tol1 = t;
            m.run.tolerances.tol2 = t * 1e2;
            m.run.tolerances.tol3 = t * 1e4;
        }
    }
}

fn wrap<P: Serialize>(manifest: &Manifest, command: &str, payload: P) -> Report<P> {
    Report {
        engine_version: ENGINE_VERSION,
        manifest_digest: manifest.digest(),
        command: command.to_string(),
        points: manifest.run.points,
        seed: manifest.run.seed,
        jet_order: manifest.run.jet_order,
        payload,
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn frame_field_labels(m: usize) -> Vec<(TangentField, String)> {
    let mut out = vec![(TangentField::Xi, String::from("xi"))];
    for k in 0..m {
        out.push((TangentField::Screen(k), format!("W{}", k + 1)));
    }
    out
}

/// Runs one command against a loaded manifest. Returns the rendered report
/// and the process exit code (0 success, 2 verdict failure).
pub fn run_to_bytes(
    command: &str,
    manifest: &Manifest,
    format: OutputFormat,
) -> Result<(Vec<u8>, i32)> {
    let (space, hyp) = manifest.build()?;
    let cfg: RunConfig = manifest.run_config();
    let scene = Scene {
        space: &space,
        hyp: &hyp,
        cfg: cfg.clone(),
        fixture: manifest.fixture.clone(),
    };

    match command {
        "validate" => {
            let (points, v) = run_validation(&scene)?;
            let exit = if v.pass { 0 } else { 2 };
            let payload = validation_json(&points, &v);
            let bytes = match format {
                OutputFormat::Json => to_json_bytes(&wrap(manifest, command, payload)),
                OutputFormat::Csv => {
                    let header = ["key", "value"].map(String::from).to_vec();
                    let rows = vec![
                        vec!["pass".into(), format!("{}", v.pass)],
                        vec!["torsion_residual".into(), sci(v.torsion_residual)],
                        vec!["codazzi_residual".into(), sci(v.codazzi_residual)],
                        vec!["duality_residual".into(), sci(v.duality_residual)],
                        vec!["tolerance".into(), sci(v.tolerance)],
                    ];
                    Csv { header, rows }.to_bytes()
                }
            };
            Ok((bytes, exit))
        }

        "frame" => {
            let points = sample_points(hyp.domain(), cfg.points, cfg.points / 2, cfg.seed);
            let mut frames = Vec::with_capacity(points.len());
            for u in &points {
                frames.push(frame_json(&null_frame_at(&space, &hyp, u, cfg.jet_order)?));
            }
            let bytes = match format {
                OutputFormat::Json => to_json_bytes(&wrap(manifest, command, frames)),
                OutputFormat::Csv => {
                    let dim = space.dim();
                    let mut header: Vec<String> =
                        hyp.params().iter().map(|p| format!("p_{p}")).collect();
                    for a in 0..dim {
                        header.push(format!("x_{a}"));
                    }
                    for a in 0..dim {
                        header.push(format!("xi_{a}"));
                    }
                    for a in 0..dim {
                        header.push(format!("n_{a}"));
                    }
                    header.push("frame_det".into());
                    let mut rows = Vec::new();
                    for (u, f) in points.iter().zip(&frames) {
                        let mut row: Vec<String> = u.iter().map(|v| sci(*v)).collect();
                        row.extend(f.x.0.iter().map(|v| sci(*v)));
                        row.extend(f.xi_ambient.0.iter().map(|v| sci(*v)));
                        row.extend(f.n.0.iter().map(|v| sci(*v)));
                        row.push(sci(f.frame_det.0));
                        rows.push(row);
                    }
                    Csv { header, rows }.to_bytes()
                }
            };
            Ok((bytes, 0))
        }

        "objects" => {
            let points = sample_points(hyp.domain(), cfg.points, cfg.points / 2, cfg.seed);
            let fields = frame_field_labels(hyp.screen_dim());
            let mut table = Vec::new();
            for u in &points {
                let ctx = PointCtx::new(&space, &hyp, u, cfg.jet_order)?;
                let pt = PointTensors::compute(&ctx)?;
                for (xf, xl) in &fields {
                    for (yf, yl) in &fields {
                        let f = fundamental_forms_at(&ctx, &pt, xf, yf)?;
                        table.push(FormsJson {
                            point: SciVec(u.clone()),
                            pair: [xl.clone(), yl.clone()],
                            b: Sci(f.b),
                            b_star: Sci(f.b_star),
                            tau_x: Sci(f.tau_x),
                            tau_star_x: Sci(f.tau_star_x),
                            tau_consistency: Sci(f.tau_consistency),
                            a_n_x: SciVec(f.a_n_x.clone()),
                            a_n_star_x: SciVec(f.a_n_star_x.clone()),
                            c_x_py: Sci(f.c_x_py),
                            c_star_x_py: Sci(f.c_star_x_py),
                            abar_xi_x: SciVec(f.abar_xi_x.clone()),
                            abar_star_xi_x: SciVec(f.abar_star_xi_x.clone()),
                            d_xy_screen: SciVec(f.d_xy_screen.clone()),
                            d_xy_eta: Sci(f.d_xy_eta),
                            d_xy_ambient: SciVec(f.d_xy_ambient.clone()),
                            d_star_xy_screen: SciVec(f.d_star_xy_screen.clone()),
                            d_star_xy_eta: Sci(f.d_star_xy_eta),
                            d_star_xy_ambient: SciVec(f.d_star_xy_ambient.clone()),
                            reconstruction_residual: Sci(f.reconstruction_residual),
                        });
                    }
                }
            }
            let bytes = match format {
                OutputFormat::Json => to_json_bytes(&wrap(manifest, command, table)),
                OutputFormat::Csv => {
                    let dim = space.dim();
                    let mut header: Vec<String> =
                        hyp.params().iter().map(|p| format!("p_{p}")).collect();
                    header.extend(["pair_x", "pair_y"].map(String::from));
                    header.extend(
                        [
                            "b",
                            "b_star",
                            "tau_x",
                            "tau_star_x",
                            "c_x_py",
                            "c_star_x_py",
                        ]
                        .map(String::from),
                    );
                    for a in 0..dim {
                        header.push(format!("a_n_x_{a}"));
                    }
                    for a in 0..dim {
                        header.push(format!("a_n_star_x_{a}"));
                    }
                    header.push("reconstruction_residual".into());
                    let mut rows = Vec::new();
                    for e in &table {
                        let mut row: Vec<String> = e.point.0.iter().map(|v| sci(*v)).collect();
                        row.push(csv_escape(&e.pair[0]));
                        row.push(csv_escape(&e.pair[1]));
                        for v in [
                            e.b.0,
                            e.b_star.0,
                            e.tau_x.0,
                            e.tau_star_x.0,
                            e.c_x_py.0,
                            e.c_star_x_py.0,
                        ] {
                            row.push(sci(v));
                        }
                        row.extend(e.a_n_x.0.iter().map(|v| sci(*v)));
                        row.extend(e.a_n_star_x.0.iter().map(|v| sci(*v)));
                        row.push(sci(e.reconstruction_residual.0));
                        rows.push(row);
                    }
                    Csv { header, rows }.to_bytes()
                }
            };
            Ok((bytes, 0))
        }

        "curvature" => {
            let points = sample_points(hyp.domain(), cfg.points, cfg.points / 2, cfg.seed);
            let mut out = Vec::with_capacity(points.len());
            for u in &points {
                let ctx = PointCtx::new(&space, &hyp, u, cfg.jet_order)?;
                let pt = PointTensors::compute(&ctx)?;
                let cd = curvature_data(&ctx, &pt)?;
                // Frame triples.
                let mut vecs = vec![(pt.xi_param.clone(), String::from("xi"))];
                for (k, w) in pt.w_param.iter().enumerate() {
                    vecs.push((w.clone(), format!("W{}", k + 1)));
                }
                let mut r_components = Vec::new();
                for (x, lx) in &vecs {
                    for (y, ly) in &vecs {
                        for (z, lz) in &vecs {
                            let r = pt.push(&cd.ind.apply(x, y, z));
                            let rs = pt.push(&cd.ind_star.apply(x, y, z));
                            r_components.push(RComponentJson {
                                triple: [lx.clone(), ly.clone(), lz.clone()],
                                r: SciVec(r),
                                r_star: SciVec(rs),
                            });
                        }
                    }
                }
                // Ricci matrices over {E_i, xi}.
                let mut basis: Vec<Vec<f64>> = pt.e_param.clone();
                basis.push(pt.xi_param.clone());
                let nb = basis.len();
                let mut ricci = vec![vec![0.0; nb]; nb];
                let mut ricci_star = vec![vec![0.0; nb]; nb];
                let mut asym = vec![vec![0.0; nb]; nb];
                for i in 0..nb {
                    for j in 0..nb {
                        ricci[i][j] = ricci02_at(&pt, &cd, Conn::D, &basis[i], &basis[j]).primary;
                        ricci_star[i][j] =
                            ricci02_at(&pt, &cd, Conn::Dstar, &basis[i], &basis[j]).primary;
                    }
                }
                for i in 0..nb {
                    for j in 0..nb {
                        asym[i][j] = ricci[i][j] - ricci[j][i];
                    }
                }
                let sc = curvature_scalars_at(&pt, &cd, space.constant_c());
                out.push(CurvaturePointJson {
                    point: SciVec(u.clone()),
                    r_components,
                    ricci02: sci_mat(&ricci),
                    ricci02_star: sci_mat(&ricci_star),
                    asymmetry_defect: sci_mat(&asym),
                    scalars: CurvatureScalarsJson {
                        point: SciVec(u.clone()),
                        h: Sci(sc.h),
                        r_screen: Sci(sc.r_screen),
                        sigma: Sci(sc.sigma),
                        kappa: sc
                            .kappa
                            .iter()
                            .map(|(i, j, v)| KappaJson {
                                i: *i,
                                j: *j,
                                value: Sci(*v),
                            })
                            .collect(),
                        kappa_null: SciVec(sc.kappa_null.clone()),
                        kappa_in: SciVec(sc.kappa_in.clone()),
                        ricci_xixi: Sci(sc.ricci_xixi),
                        reading_12star_sum: Sci(sc.reading_12star_sum),
                        reading_12star_per_i: SciVec(sc.reading_12star_per_i.clone()),
                        eq47_residual: sc.eq47_residual.map(Sci),
                        nul_literal: sc.nul.as_ref().map(|r| Sci(r.literal)),
                        nul_derived: sc.nul.as_ref().map(|r| Sci(r.derived)),
                        k1n_literal: sc.k1n.as_ref().map(|r| Sci(r.literal)),
                        k1n_derived: sc.k1n.as_ref().map(|r| Sci(r.derived)),
                    },
                });
            }
            let bytes = match format {
                OutputFormat::Json => to_json_bytes(&wrap(manifest, command, out)),
                OutputFormat::Csv => {
                    let m = hyp.screen_dim();
                    let mut header: Vec<String> =
                        hyp.params().iter().map(|p| format!("p_{p}")).collect();
                    header.extend(["h", "r_screen", "sigma", "ricci_xixi"].map(String::from));
                    for i in 0..m {
                        header.push(format!("kappa_null_{i}"));
                    }
                    for i in 0..m {
                        header.push(format!("kappa_in_{i}"));
                    }
                    let mut rows = Vec::new();
                    for e in &out {
                        let mut row: Vec<String> =
                            e.scalars.point.0.iter().map(|v| sci(*v)).collect();
                        for v in [
                            e.scalars.h.0,
                            e.scalars.r_screen.0,
                            e.scalars.sigma.0,
                            e.scalars.ricci_xixi.0,
                        ] {
                            row.push(sci(v));
                        }
                        row.extend(e.scalars.kappa_null.0.iter().map(|v| sci(*v)));
                        row.extend(e.scalars.kappa_in.0.iter().map(|v| sci(*v)));
                        rows.push(row);
                    }
                    Csv { header, rows }.to_bytes()
                }
            };
            Ok((bytes, 0))
        }

        "verify" => {
            let rep = run_identity_suite(&scene)?;
            let exit = if rep.any_failed() { 2 } else { 0 };
            let payload = verify_json(&rep);
            let bytes = match format {
                OutputFormat::Json => to_json_bytes(&wrap(manifest, command, payload)),
                OutputFormat::Csv => {
                    let header = [
                        "id",
                        "verdict",
                        "guard",
                        "points",
                        "max_residual",
                        "tolerance",
                        "argmax_probe",
                    ]
                    .map(String::from)
                    .to_vec();
                    let mut rows = Vec::new();
                    for c in &rep.checks {
                        rows.push(vec![
                            c.id.clone(),
                            c.verdict.as_str().to_string(),
                            csv_escape(&c.guard),
                            format!("{}", c.points),
                            sci(c.max_residual),
                            sci(c.tolerance),
                            csv_escape(c.argmax_probe.as_deref().unwrap_or("")),
                        ]);
                    }
                    Csv { header, rows }.to_bytes()
                }
            };
            Ok((bytes, exit))
        }

        other => bail!("unknown command `{other}`"),
    }
}
