//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Run with `cargo test -p nullstat --test acceptance`.

use std::process::Command;
use std::time::Instant;

use nullstat::manifest::fixture_manifest;
use nullstat::{run_to_bytes, OutputFormat};
use nullstat_core::ambient::Conn;
use nullstat_core::curvature::{
    curvature_data, curvature_scalars_at, gauss_codazzi_residuals, ricci02_at, ricci_asymmetry,
};
use nullstat_core::fixtures;
use nullstat_core::harness::{run_identity_suite, run_validation, RunConfig, Scene, Verdict};
use nullstat_core::hypersurface::{null_frame_at, PointCtx};
use nullstat_core::induced::{
    fundamental_forms_at, induced_connection_coeffs_at, PointTensors, TangentField,
};
use nullstat_core::sampling::Stream;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn scene_cfg(points: usize, seed: u64) -> RunConfig {
    RunConfig {
        points,
        seed,
        ..RunConfig::default()
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nullstat"))
}

fn write_manifest(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn acceptance_01_cone_closed_form_reproduction() {
    let start = Instant::now();
    let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
    let w1 = TangentField::Screen(0);
    let w2 = TangentField::Screen(1);
    let xi = TangentField::Xi;
    for (u2, u3) in [(1.0f64, 1.0f64), (2.0, 1.0), (1.0, 3.0)] {
        let f2 = u2 * u2 + u3 * u3;
        let f = f2.sqrt();
        let ctx = PointCtx::new(&fx.space, &fx.hyp, &[0.0, u2, u3], 3).unwrap();
        let pt = PointTensors::compute(&ctx).unwrap();

        let forms = fundamental_forms_at(&ctx, &pt, &w2, &w2).unwrap();
        assert!((forms.b + 2.0 * SQRT2 * u2 * u2).abs() < 1e-8);
        assert!((forms.b_star + 2.0 * SQRT2 * u3 * u3).abs() < 1e-8);
        assert!((forms.c_x_py + (SQRT2 / 2.0) * (u2 / f).powi(2)).abs() < 1e-8);
        assert!((forms.c_star_x_py + (SQRT2 / 2.0) * (u3 / f).powi(2)).abs() < 1e-8);

        let forms = fundamental_forms_at(&ctx, &pt, &xi, &xi).unwrap();
        assert!((forms.b + SQRT2).abs() < 1e-8);
        assert!((forms.b_star - SQRT2).abs() < 1e-8);

        for x in [&w1, &w2, &xi] {
            let f = fundamental_forms_at(&ctx, &pt, x, &w1).unwrap();
            assert!(f.b.abs() < 1e-8, "B(X, W1) = {}", f.b);
        }
        let forms = fundamental_forms_at(&ctx, &pt, &xi, &w2).unwrap();
        assert!(forms.c_x_py.abs() < 1e-8);

        let nf = null_frame_at(&fx.space, &fx.hyp, &[0.0, u2, u3], 3).unwrap();
        let expect_n = [
            -1.0 / (4.0 * f),
            1.0 / (4.0 * f),
            SQRT2 * u2 / (4.0 * f2),
            SQRT2 * u3 / (4.0 * f2),
        ];
        for a in 0..4 {
            assert!((nf.n[a] - expect_n[a]).abs() < 1e-8, "N[{a}]");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "PASS: criterion 1 - closed-form reproduction on paper-cone at 3 points ({elapsed:?})"
    );
}

#[test]
fn acceptance_02_trivial_fixture() {
    let fx = fixtures::build(fixtures::FLAT_PLANE_P0).unwrap();
    let scene = Scene {
        space: &fx.space,
        hyp: &fx.hyp,
        cfg: scene_cfg(32, 42),
        fixture: Some(fixtures::FLAT_PLANE_P0.to_string()),
    };
    let rep = run_identity_suite(&scene).unwrap();
    for c in &rep.checks {
        assert!(
            c.verdict != Verdict::Fail,
            "{} failed: {:e}",
            c.id,
            c.max_residual
        );
    }
    let values = rep
        .checks
        .iter()
        .find(|c| c.id == "ID-values-flat-plane-P0")
        .unwrap();
    assert_eq!(values.verdict, Verdict::Pass);
    assert!(
        values.max_residual <= 1e-10,
        "induced objects reach {:e}",
        values.max_residual
    );
    assert_eq!(rep.classification.totally_geodesic_d.verdict, "holds");
    assert_eq!(rep.classification.totally_geodesic_dstar.verdict, "holds");
    println!(
        "PASS: criterion 2 - flat plane: all induced objects <= 1e-10 (max {:.2e}), all checks pass, totally geodesic both sides",
        values.max_residual
    );
}

#[test]
fn acceptance_03_statistical_identity_suite() {
    let start = Instant::now();
    let fx = fixtures::build(fixtures::PAPER_CONE_SYMK).unwrap();
    let scene = Scene {
        space: &fx.space,
        hyp: &fx.hyp,
        cfg: scene_cfg(32, 42),
        fixture: Some(fixtures::PAPER_CONE_SYMK.to_string()),
    };
    let rep = run_identity_suite(&scene).unwrap();
    assert!(rep.validation.pass, "symmetric-K ambient must validate");
    let required = [
        "ID-lhsm1",
        "ID-lhsm2",
        "ID-eq34a",
        "ID-eq34b",
        "ID-eq18a",
        "ID-eq18b",
        "ID-07D",
        "ID-08D",
        "ID-abar-sum",
        "ID-pr7-duality",
        "ID-pr7-torsion",
        "ID-eps-tau",
        "ID-pr88a",
        "ID-pr88b",
        "ID-pr8a",
        "ID-pr8b",
    ];
    let mut worst: f64 = 0.0;
    for id in required {
        let c = rep.checks.iter().find(|c| c.id == id).unwrap();
        assert_eq!(c.guard, "run", "{id} must run");
        assert_eq!(c.points, 48, "{id} must evaluate 48 seeded points");
        assert_eq!(
            c.verdict,
            Verdict::Pass,
            "{id} residual {:e}",
            c.max_residual
        );
        assert!(c.max_residual < 1e-6, "{id} residual {:e}", c.max_residual);
        worst = worst.max(c.max_residual);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "PASS: criterion 3 - statistical identity suite on symmetric-K cone, {} checks < 1e-6 at 48 points (worst {:.2e}, {elapsed:?})",
        required.len(),
        worst
    );
}

#[test]
fn acceptance_04_duality_failure_detection() {
    // Library level: the frame-probe duality residual carries the closed
    // form sqrt2 |u3^2 - u2^2| at its argmax point.
    let fx = fixtures::build(fixtures::PAPER_CONE).unwrap();
    let scene = Scene {
        space: &fx.space,
        hyp: &fx.hyp,
        cfg: scene_cfg(32, 42),
        fixture: Some(fixtures::PAPER_CONE.to_string()),
    };
    let (points, v) = run_validation(&scene).unwrap();
    assert!(!v.pass);
    let fd = v
        .frame_duality
        .iter()
        .find(|f| f.labels == ["W2".to_string(), "W2".to_string(), "xi".to_string()])
        .expect("frame triple (W2, W2, xi) must be reported");
    let u = &points[fd.point_index];
    let expect = SQRT2 * (u[2] * u[2] - u[1] * u[1]).abs();
    assert!(
        (fd.max_residual - expect).abs() < 1e-8,
        "duality residual {} vs closed form {expect}",
        fd.max_residual
    );

    // Binary level: verify exits 2 while the closed-form value checks pass.
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(&dir, "pc.json", r#"{"fixture": "paper-cone"}"#);
    let out = bin()
        .args(["verify", "--manifest"])
        .arg(&manifest)
        .args(["--points", "32", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "verify must exit 2");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["payload"]["checks"].as_array().unwrap();
    let gate = checks
        .iter()
        .find(|c| c["id"] == "ID-ambient-statistical")
        .unwrap();
    assert_eq!(gate["verdict"], "fail");
    let values = checks
        .iter()
        .find(|c| c["id"] == "ID-values-paper-cone")
        .unwrap();
    assert_eq!(values["verdict"], "pass");
    println!(
        "PASS: criterion 4 - duality failure {:.6} == sqrt2 |u3^2-u2^2| at the argmax sample, verify exits 2, value checks pass",
        fd.max_residual
    );
}

/// Induced connection coefficients at a point, for the finite-difference
/// curvature oracle.
fn ind_gamma(fx: &fixtures::Fixture, u: &[f64], which: Conn) -> Vec<Vec<Vec<f64>>> {
    let ctx = PointCtx::new(&fx.space, &fx.hyp, u, 3).unwrap();
    let pt = PointTensors::compute(&ctx).unwrap();
    induced_connection_coeffs_at(&pt, which).0
}

fn fd_curvature_error(fx: &fixtures::Fixture, u: &[f64], which: Conn, h: f64) -> f64 {
    let mp1 = u.len();
    let g0 = ind_gamma(fx, u, which);
    let mut dg = vec![vec![vec![vec![0.0; mp1]; mp1]; mp1]; mp1];
    for c in 0..mp1 {
        let mut up = u.to_vec();
        up[c] += h;
        let mut dn = u.to_vec();
        dn[c] -= h;
        let gp = ind_gamma(fx, &up, which);
        let gm = ind_gamma(fx, &dn, which);
        for l in 0..mp1 {
            for i in 0..mp1 {
                for j in 0..mp1 {
                    dg[c][l][i][j] = (gp[l][i][j] - gm[l][i][j]) / (2.0 * h);
                }
            }
        }
    }
    let ctx = PointCtx::new(&fx.space, &fx.hyp, u, 3).unwrap();
    let pt = PointTensors::compute(&ctx).unwrap();
    let cd = curvature_data(&ctx, &pt).unwrap();
    let jet_r = match which {
        Conn::D => &cd.ind.r,
        Conn::Dstar => &cd.ind_star.r,
        Conn::D0 => unreachable!(),
    };
    let mut worst: f64 = 0.0;
    for l in 0..mp1 {
        for k in 0..mp1 {
            for i in 0..mp1 {
                for j in 0..mp1 {
                    let mut fd = dg[i][l][j][k] - dg[j][l][i][k];
                    for e in 0..mp1 {
                        fd += g0[l][i][e] * g0[e][j][k] - g0[l][j][e] * g0[e][i][k];
                    }
                    worst = worst.max((jet_r[l][k][i][j] - fd).abs());
                }
            }
        }
    }
    worst
}

#[test]
fn acceptance_05_curvature_cross_validation() {
    for name in [fixtures::PAPER_CONE_LC, fixtures::PAPER_CONE_SYMK] {
        let fx = fixtures::build(name).unwrap();
        // FD oracle with demonstrated second-order convergence.
        let u = [0.2, 1.3, 0.9];
        for which in [Conn::D, Conn::Dstar] {
            let errs: Vec<f64> = [1e-3, 5e-4, 2.5e-4]
                .iter()
                .map(|h| fd_curvature_error(&fx, &u, which, *h))
                .collect();
            assert!(errs.iter().all(|e| *e < 1e-4), "{name}: {errs:?}");
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                assert!(
                    (2.5..6.5).contains(&ratio),
                    "{name}: convergence ratio {ratio} ({errs:?})"
                );
            }
        }
        // Transversal identity set at 8 points, 20 probe triples each.
        let pts = nullstat_core::sampling::sample_points(fx.hyp.domain(), 8, 0, 42);
        for (pi, u) in pts.iter().enumerate() {
            let ctx = PointCtx::new(&fx.space, &fx.hyp, u, 3).unwrap();
            let pt = PointTensors::compute(&ctx).unwrap();
            let cd = curvature_data(&ctx, &pt).unwrap();
            let mut stream = Stream::new(42, "acceptance-codazzi", pi as u64);
            let probes: Vec<[Vec<f64>; 3]> = (0..20)
                .map(|_| [stream.vector(3), stream.vector(3), stream.vector(3)])
                .collect();
            for (check, resid) in gauss_codazzi_residuals(&pt, &cd, &probes) {
                assert!(resid < 1e-5, "{name} {check}: {resid:e} at {u:?}");
            }
        }
    }
    println!("PASS: criterion 5 - induced curvature matches the FD oracle with O(h^2) convergence; transversal identity set < 1e-5 on 20 triples x 8 points");
}

#[test]
fn acceptance_06_ricci_machinery() {
    let fx = fixtures::build(fixtures::PAPER_CONE_LC).unwrap();
    let pts = nullstat_core::sampling::sample_points(fx.hyp.domain(), 8, 0, 42);
    let mut worst_path: f64 = 0.0;
    let mut worst_asym: f64 = 0.0;
    for (pi, u) in pts.iter().enumerate() {
        let ctx = PointCtx::new(&fx.space, &fx.hyp, u, 3).unwrap();
        let pt = PointTensors::compute(&ctx).unwrap();
        let cd = curvature_data(&ctx, &pt).unwrap();
        let mut stream = Stream::new(42, "acceptance-ricci", pi as u64);
        let mut probes: Vec<Vec<f64>> = vec![pt.xi_param.clone()];
        probes.extend(pt.e_param.iter().cloned());
        for _ in 0..4 {
            probes.push(stream.vector(3));
        }
        for x in &probes {
            for y in &probes {
                for which in [Conn::D, Conn::Dstar] {
                    let r = ricci02_at(&pt, &cd, which, x, y);
                    worst_path = worst_path.max(r.difference);
                    let (_a, _c, resid) = ricci_asymmetry(&pt, &cd, which, x, y);
                    worst_asym = worst_asym.max(resid);
                }
            }
        }
    }
    assert!(worst_path < 1e-6, "path difference {worst_path:e}");
    assert!(worst_asym < 1e-5, "asymmetry residual {worst_asym:e}");

    // Parallel-screen corollary on the flat plane.
    let fx = fixtures::build(fixtures::FLAT_PLANE_P0).unwrap();
    let u = [0.1, -0.3, 0.7];
    let ctx = PointCtx::new(&fx.space, &fx.hyp, &u, 3).unwrap();
    let pt = PointTensors::compute(&ctx).unwrap();
    let cd = curvature_data(&ctx, &pt).unwrap();
    let mut probes: Vec<Vec<f64>> = vec![pt.xi_param.clone()];
    probes.extend(pt.e_param.iter().cloned());
    let mut worst_p0: f64 = 0.0;
    for x in &probes {
        for y in &probes {
            let (asym, _c, _r) = ricci_asymmetry(&pt, &cd, Conn::D, x, y);
            worst_p0 = worst_p0.max(asym.abs());
        }
    }
    assert!(worst_p0 < 1e-9, "flat-plane asymmetry {worst_p0:e}");
    println!(
        "PASS: criterion 6 - Ricci paths agree ({worst_path:.2e}), asymmetry matches the screen-form commutator ({worst_asym:.2e}), parallel-screen asymmetry {worst_p0:.2e}"
    );
}

#[test]
fn acceptance_07_scalar_quantities() {
    let fx = fixtures::build(fixtures::PAPER_CONE_LC).unwrap();
    let ctx = PointCtx::new(&fx.space, &fx.hyp, &[0.0, 1.0, 1.0], 3).unwrap();
    let pt = PointTensors::compute(&ctx).unwrap();
    let cd = curvature_data(&ctx, &pt).unwrap();
    let sc = curvature_scalars_at(&pt, &cd, Some(0.0));
    assert!(
        (sc.h + SQRT2 / 2.0).abs() < 1e-8,
        "H = {} vs -sqrt2/2",
        sc.h
    );
    assert!(sc.eq47_residual.unwrap() < 1e-5);
    // Both readings reported.
    let nul = sc.nul.as_ref().unwrap();
    let k1n = sc.k1n.as_ref().unwrap();
    assert!(nul.literal.is_finite() && nul.derived.is_finite());
    assert!(k1n.literal.is_finite() && k1n.derived.is_finite());
    assert!(sc.reading_12star_sum.is_finite());
    assert!(!sc.reading_12star_per_i.is_empty());

    // The verify report carries the reading entries as evidence checks.
    let fxm = fixture_manifest("paper-cone-LC").unwrap();
    let (bytes, code) = run_to_bytes("verify", &fxm, OutputFormat::Json).unwrap();
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let checks = report["payload"]["checks"].as_array().unwrap();
    for id in ["ID-12star", "ID-nul", "ID-k1n"] {
        let c = checks.iter().find(|c| c["id"] == id).unwrap();
        assert_eq!(c["verdict"], "reported", "{id}");
        assert!(
            !c["details"].as_array().unwrap().is_empty(),
            "{id} must report its readings"
        );
    }
    println!(
        "PASS: criterion 7 - H(1,1) = -sqrt2/2 within 1e-8, screen-scalar identity < 1e-5, alternative readings reported"
    );
}

#[test]
fn acceptance_08_determinism_and_scale_metamorphic() {
    // Byte-identical repeated runs through the binary.
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(
        &dir,
        "symk.json",
        r#"{"fixture": "paper-cone-symK", "run": {"points": 8}}"#,
    );
    let run = || {
        bin()
            .args(["verify", "--manifest"])
            .arg(&manifest)
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "verify output must be byte-identical");

    // Scale metamorphic test: xi -> 2 xi.
    let base = fixture_manifest("paper-cone-symK").unwrap();
    let mut scaled = base.clone();
    scaled.fixture = None; // no longer the bundled geometry
    scaled.hypersurface.xi = Some(
        base.hypersurface
            .xi
            .as_ref()
            .unwrap()
            .iter()
            .map(|s| format!("2*({s})"))
            .collect(),
    );
    let mut base_tagless = base.clone();
    base_tagless.fixture = None;

    let (space_a, hyp_a) = base_tagless.build().unwrap();
    let (space_b, hyp_b) = scaled.build().unwrap();
    let cfg = scene_cfg(8, 42);

    // B doubles and N halves pointwise.
    let pts = nullstat_core::sampling::sample_points(hyp_a.domain(), 4, 2, 42);
    for u in &pts {
        let nf_a = null_frame_at(&space_a, &hyp_a, u, 3).unwrap();
        let nf_b = null_frame_at(&space_b, &hyp_b, u, 3).unwrap();
        for a in 0..4 {
            assert!((nf_b.n[a] - nf_a.n[a] / 2.0).abs() < 1e-9, "N must halve");
        }
        let ctx_a = PointCtx::new(&space_a, &hyp_a, u, 3).unwrap();
        let ctx_b = PointCtx::new(&space_b, &hyp_b, u, 3).unwrap();
        let pt_a = PointTensors::compute(&ctx_a).unwrap();
        let pt_b = PointTensors::compute(&ctx_b).unwrap();
        let w2 = TangentField::Screen(1);
        let fa = fundamental_forms_at(&ctx_a, &pt_a, &w2, &w2).unwrap();
        let fb = fundamental_forms_at(&ctx_b, &pt_b, &w2, &w2).unwrap();
        assert!((fb.b - 2.0 * fa.b).abs() < 1e-9, "B must double");
        assert!((fb.b_star - 2.0 * fa.b_star).abs() < 1e-9);
    }

    // Identity verdicts are unchanged under the rescaling.
    let rep_a = run_identity_suite(&Scene {
        space: &space_a,
        hyp: &hyp_a,
        cfg: cfg.clone(),
        fixture: None,
    })
    .unwrap();
    let rep_b = run_identity_suite(&Scene {
        space: &space_b,
        hyp: &hyp_b,
        cfg,
        fixture: None,
    })
    .unwrap();
    assert_eq!(rep_a.checks.len(), rep_b.checks.len());
    for (ca, cb) in rep_a.checks.iter().zip(&rep_b.checks) {
        assert_eq!(ca.id, cb.id);
        assert_eq!(
            ca.verdict, cb.verdict,
            "{}: verdict changed under xi -> 2 xi ({:e} vs {:e})",
            ca.id, ca.max_residual, cb.max_residual
        );
    }
    println!("PASS: criterion 8 - byte-identical reruns; xi -> 2 xi doubles B, halves N, and preserves every identity verdict");
}
