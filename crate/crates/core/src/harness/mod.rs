//! Identity-check catalog and suite runner.
//!
//! Each check evaluates one named relation between induced objects as a
//! pointwise residual over sampled points and probe fields. Checks carry an
//! applicability guard; a check whose hypothesis fails on the current
//! geometry is listed as skipped, never silently run. Evidence-style
//! entries (witness magnitudes, alternative readings of ambiguous
//! formulas) report values without a pass/fail verdict.

mod classify;

pub use classify::{classify_hypersurface, Classification, PropertyFit};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ambient::{AmbientSpace, Conn, Probe, ProbeKind, StatValidationReport};
use crate::curvature::{
    curvature_data, curvature_scalars_at, gauss_codazzi_residuals, ricci02_at, ricci_asymmetry,
    CurvatureData,
};
use crate::error::Result;
use crate::expr::Expr;
use crate::hypersurface::{Hypersurface, PointCtx};
use crate::induced::{field_jets, lie_bracket, FieldJets, PointTensors, TangentField};
use crate::linalg;
use crate::math;
use crate::sampling::{sample_points, Stream};

/// Run configuration shared by the suite and the CLI.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Number of low-discrepancy grid points; `points / 2` extra seeded
    /// random points are appended.
    pub points: usize,
    pub seed: u64,
    pub jet_order: usize,
    /// First-derivative-content tolerance.
    pub tol1: f64,
    /// Second-derivative-content tolerance.
    pub tol2: f64,
    /// Third-derivative-content tolerance.
    pub tol3: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            points: 32,
            seed: 42,
            jet_order: 3,
            tol1: 1e-9,
            tol2: 1e-7,
            tol3: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Reported,
    Skipped,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Reported => "reported",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub guard: String,
    pub points: usize,
    pub max_residual: f64,
    pub argmax_point: Option<Vec<f64>>,
    pub argmax_probe: Option<String>,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Named witness magnitudes, fit coefficients, or alternative readings.
    pub details: Vec<(String, f64)>,
}

/// Full output of a verification run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub points: Vec<Vec<f64>>,
    pub validation: StatValidationReport,
    pub checks: Vec<CheckResult>,
    pub classification: Classification,
}

impl SuiteReport {
    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }
}

/// Applicability guards in order of strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Guard {
    None,
    TorsionFree,
    Statistical,
    /// Statistical plus declared constant curvature.
    ConstantCurvature,
    /// Constant curvature with c = 0.
    Flat,
    /// The connection pair coincides (K = 0).
    SelfDual,
    /// Fixture-tagged value reproduction.
    Fixture(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    /// Residual compared against a tolerance.
    Residual,
    /// Values reported, no verdict.
    Evidence,
    /// Boolean indicators must agree.
    Equivalence,
    /// Premise => conclusion; passes vacuously when the premise fails.
    Conditional,
}

#[derive(Debug, Clone, Copy)]
enum Tier {
    T1,
    T2,
    T3,
    Abs(f64),
}

struct CheckSpec {
    id: &'static str,
    description: &'static str,
    guard: Guard,
    style: Style,
    tier: Tier,
}

const CATALOG: &[CheckSpec] = &[
    CheckSpec {
        id: "ID-ambient-statistical",
        description: "ambient pair satisfies torsion, symmetry, and metric-duality conditions",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-pro5-torsion",
        description: "induced connections are torsion-free",
        guard: Guard::TorsionFree,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-pro5-symB",
        description: "second fundamental forms are symmetric",
        guard: Guard::TorsionFree,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-lhsm1",
        description: "duality defect of the induced pair equals B(X,Y)eta(Z) + B*(X,Z)eta(Y)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-lhsm2",
        description: "metric-sum identity for (D g) + (D* g)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-eq34a",
        description: "B(X,xi) + B*(X,xi) = 0",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-eq34b",
        description: "g(A_N X + A*_N X, N) = 0",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-eq18a",
        description: "C(X,PY) = g(A_N X, PY)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-eq18b",
        description: "C*(X,PY) = g(A*_N X, PY)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-07D",
        description: "B(X,Y) = g(Abar*_xi X, Y) - B*(X,xi) eta(Y)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-08D",
        description: "B*(X,Y) = g(Abar_xi X, Y) - B(X,xi) eta(Y)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-07L",
        description: "literal reading B(X,Y) = g(Abar*_xi X, Y) + B*(X,xi)",
        guard: Guard::Statistical,
        style: Style::Evidence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-08L",
        description: "literal reading B*(X,Y) = g(Abar_xi X, Y) + B(X,xi)",
        guard: Guard::Statistical,
        style: Style::Evidence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-abar-sum",
        description: "Abar*_xi xi + Abar_xi xi = 0",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-pr7-duality",
        description: "screen connections are metric-dual on screen fields",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-pr7-torsion",
        description: "screen connections are torsion-free on screen fields",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-eps-tau",
        description: "radical transversal form satisfies eps(X) = -tau(X)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-tau-consistency",
        description: "Weingarten and radical-decomposition readings of tau agree",
        guard: Guard::None,
        style: Style::Evidence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-pr6-witness",
        description: "witness magnitudes for non-degeneracy of B and B* on the radical",
        guard: Guard::None,
        style: Style::Evidence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-pr88a",
        description: "C(X,Y) = g(D_X Y, N) on screen fields",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-pr88b",
        description: "C*(X,Y) = g(D*_X Y, N) on screen fields",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-pr8a",
        description: "g([X,Y],N) = C(X,Y) - C(Y,X) on screen fields",
        guard: Guard::TorsionFree,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-pr8b",
        description: "g([X,Y],N) = C*(X,Y) - C*(Y,X) on screen fields",
        guard: Guard::TorsionFree,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-classical-B",
        description: "self-dual pair: B = B*",
        guard: Guard::SelfDual,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-classical-Bxi",
        description: "self-dual pair: B(X,xi) = 0",
        guard: Guard::SelfDual,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-classical-Axixi",
        description: "self-dual pair: A*_xi xi = 0",
        guard: Guard::SelfDual,
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-classical-nonmetric",
        description: "self-dual pair: (D_X g)(Y,Z) = B(X,Y)eta(Z) + B(X,Z)eta(Y)",
        guard: Guard::SelfDual,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-ambient-curv-duality",
        description: "ambient curvature pair satisfies g(R*(X,Y)Z,W) = -g(R(X,Y)W,Z)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-bianchi1",
        description: "first Bianchi identity for both ambient curvatures",
        guard: Guard::TorsionFree,
        style: Style::Residual,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-g1",
        description: "screen component of the ambient curvature expansion (unstarred)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-g2",
        description: "screen component of the ambient curvature expansion (starred)",
        guard: Guard::Statistical,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-g3",
        description: "radical component: Codazzi form with (D_X B)",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-g4",
        description: "radical component: Codazzi form with (D*_X B*)",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-g5",
        description: "transversal component of the curvature expansion (unstarred)",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-g6",
        description: "transversal component of the curvature expansion (starred)",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-g7",
        description: "transversal component on the radical argument (unstarred)",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-g8",
        description: "transversal component on the radical argument (starred)",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-gRxiN",
        description: "g(R(X,Y)xi,N) = C(Y,Abar_xi X) - C(X,Abar_xi Y) - 2 dtau(X,Y)",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-gRstarxiN",
        description: "starred mirror of the displayed g(R(X,Y)xi,N) formula",
        guard: Guard::None,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-ric-paths",
        description: "trace and expansion paths of the Ricci-type tensor agree",
        guard: Guard::Flat,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-rics",
        description: "Ricci asymmetry equals the C*-commutator",
        guard: Guard::ConstantCurvature,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-ricss",
        description: "starred Ricci asymmetry equals the C-commutator",
        guard: Guard::ConstantCurvature,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-ric-corollary",
        description: "parallel screen implies a symmetric Ricci-type tensor",
        guard: Guard::ConstantCurvature,
        style: Style::Conditional,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-eq47",
        description: "screen scalar curvature expansion",
        guard: Guard::ConstantCurvature,
        style: Style::Residual,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-12star",
        description: "readings of R^{D(0,2)}(xi,xi) against null sectional curvature",
        guard: Guard::ConstantCurvature,
        style: Style::Evidence,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-nul",
        description: "readings of the null sectional curvature sum",
        guard: Guard::ConstantCurvature,
        style: Style::Evidence,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-k1n",
        description: "readings of the mixed curvature sum",
        guard: Guard::ConstantCurvature,
        style: Style::Evidence,
        tier: Tier::T3,
    },
    CheckSpec {
        id: "ID-tg-equiv-D",
        description: "totally geodesic equivalences for the unstarred side",
        guard: Guard::Statistical,
        style: Style::Equivalence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-tg-equiv-Dstar",
        description: "totally geodesic equivalences for the starred side",
        guard: Guard::Statistical,
        style: Style::Equivalence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-tg-both",
        description: "joint totally-geodesic equivalences",
        guard: Guard::Statistical,
        style: Style::Equivalence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-umbilic-sum",
        description: "tangential umbilicity of both sides matches Abar*_xi + Abar_xi = rho Id",
        guard: Guard::Statistical,
        style: Style::Equivalence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-normal-umbilic",
        description: "normal umbilicity of both sides forces C + C* = 0",
        guard: Guard::Statistical,
        style: Style::Conditional,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-screen-conformal",
        description: "screen conformality matches C + C* = sigma (B + B*)",
        guard: Guard::Statistical,
        style: Style::Equivalence,
        tier: Tier::T2,
    },
    CheckSpec {
        id: "ID-values-flat-plane-P0",
        description: "all induced objects vanish on the flat plane fixture",
        guard: Guard::Fixture("flat-plane-P0"),
        style: Style::Residual,
        tier: Tier::Abs(1e-10),
    },
    CheckSpec {
        id: "ID-values-paper-cone",
        description: "closed-form B, B*, C, C*, N values on the cone fixture",
        guard: Guard::Fixture("paper-cone"),
        style: Style::Residual,
        tier: Tier::T1,
    },
    CheckSpec {
        id: "ID-values-paper-cone-LC",
        description: "closed-form Levi-Civita values on the cone fixture",
        guard: Guard::Fixture("paper-cone-LC"),
        style: Style::Residual,
        tier: Tier::T1,
    },
];

/// The scene a suite runs over.
pub struct Scene<'a> {
    pub space: &'a AmbientSpace,
    pub hyp: &'a Hypersurface,
    pub cfg: RunConfig,
    /// Set when the manifest came from the bundled catalog; enables the
    /// fixture-tagged value checks.
    pub fixture: Option<String>,
}

struct PerPoint<'a> {
    u: Vec<f64>,
    ctx: PointCtx<'a>,
    pt: PointTensors,
    cd: CurvatureData,
    fd: FieldData,
}

struct GuardState {
    torsion_ok: bool,
    statistical_ok: bool,
    self_dual: bool,
    const_curv: Option<f64>,
    const_curv_ok: bool,
}

fn guard_allows(guard: Guard, gs: &GuardState, fixture: &Option<String>) -> Option<String> {
    let blocked = |why: &str| Some(String::from(why));
    match guard {
        Guard::None => None,
        Guard::TorsionFree => {
            if gs.torsion_ok {
                None
            } else {
                blocked("ambient pair has torsion")
            }
        }
        Guard::Statistical => {
            if gs.statistical_ok {
                None
            } else {
                blocked("ambient validation failed")
            }
        }
        Guard::ConstantCurvature => {
            if !gs.statistical_ok {
                blocked("ambient validation failed")
            } else if gs.const_curv.is_none() {
                blocked("no declared constant curvature")
            } else if !gs.const_curv_ok {
                blocked("declared constant curvature not confirmed")
            } else {
                None
            }
        }
        Guard::Flat => {
            if !gs.statistical_ok {
                blocked("ambient validation failed")
            } else if gs.const_curv != Some(0.0) || !gs.const_curv_ok {
                blocked("requires a flat ambient (c = 0)")
            } else {
                None
            }
        }
        Guard::SelfDual => {
            if gs.self_dual {
                None
            } else {
                blocked("connection pair is not self-dual")
            }
        }
        Guard::Fixture(name) => {
            if fixture.as_deref() == Some(name) {
                None
            } else {
                blocked("fixture-specific value check")
            }
        }
    }
}

/// Accumulates a residual with its argmax location.
struct Max {
    value: f64,
    point: Option<Vec<f64>>,
    probe: Option<String>,
}

impl Max {
    fn new() -> Max {
        Max {
            value: 0.0,
            point: None,
            probe: None,
        }
    }

    fn update(&mut self, v: f64, point: &[f64], probe: &str) {
        if v > self.value || self.point.is_none() {
            self.value = v;
            self.point = Some(point.to_vec());
            self.probe = Some(String::from(probe));
        }
    }
}

/// Random tangent field with affine coefficients centered at the point.
fn random_linear_field(
    hyp: &Hypersurface,
    u0: &[f64],
    stream: &mut Stream,
) -> Result<TangentField> {
    let params: Vec<&str> = hyp.params().iter().map(|s| s.as_str()).collect();
    let mut comps = Vec::with_capacity(params.len());
    for _ in 0..params.len() {
        let a = stream.symmetric();
        let mut text = format!("{a}");
        for (j, pname) in params.iter().enumerate() {
            let b = 0.5 * stream.symmetric();
            text = format!("{text} + {b}*({pname} - {})", u0[j]);
        }
        comps.push(Expr::parse(&text, &params)?);
    }
    Ok(TangentField::Coords(comps))
}

/// Pool of probe value-vectors (parameter components) for tensorial checks.
fn value_pool(
    pt: &PointTensors,
    check_id: &str,
    point_index: usize,
    seed: u64,
    n_random: usize,
) -> (Vec<Vec<f64>>, Vec<String>) {
    let mut vs = vec![pt.xi_param.clone()];
    let mut labels = vec![String::from("xi")];
    for (k, w) in pt.w_param.iter().enumerate() {
        vs.push(w.clone());
        labels.push(format!("W{}", k + 1));
    }
    let mut stream = Stream::new(seed, check_id, point_index as u64);
    for r in 0..n_random {
        vs.push(stream.vector(pt.mp1));
        labels.push(format!("rnd{r}"));
    }
    (vs, labels)
}

include!("checks.rs");

/// Probe set for ambient validation at one sample point: coordinate basis,
/// the hypersurface frame values, and eight seeded random vectors.
fn ambient_probe_set(
    dim: usize,
    w_amb: &[Vec<f64>],
    xi_amb: &[f64],
    seed: u64,
    point_index: usize,
) -> Vec<Probe> {
    let mut probes = Vec::new();
    for a in 0..dim {
        probes.push(Probe {
            label: format!("e{a}"),
            kind: ProbeKind::Coordinate,
            components: (0..dim).map(|b| if a == b { 1.0 } else { 0.0 }).collect(),
        });
    }
    for (k, w) in w_amb.iter().enumerate() {
        probes.push(Probe {
            label: format!("W{}", k + 1),
            kind: ProbeKind::Frame,
            components: w.clone(),
        });
    }
    probes.push(Probe {
        label: String::from("xi"),
        kind: ProbeKind::Frame,
        components: xi_amb.to_vec(),
    });
    let mut stream = Stream::new(seed, "validate", point_index as u64);
    for r in 0..8 {
        probes.push(Probe {
            label: format!("rnd{r}"),
            kind: ProbeKind::Random,
            components: stream.vector(dim),
        });
    }
    probes
}

/// Ambient statistical validation alone, over the configured sample set,
/// with hypersurface frame fields included among the probes.
pub fn run_validation(scene: &Scene<'_>) -> Result<(Vec<Vec<f64>>, StatValidationReport)> {
    let cfg = &scene.cfg;
    let points = sample_points(scene.hyp.domain(), cfg.points, cfg.points / 2, cfg.seed);
    let mut ambient_points = Vec::with_capacity(points.len());
    let mut probe_sets = Vec::with_capacity(points.len());
    for (pi, u) in points.iter().enumerate() {
        let nf = crate::hypersurface::null_frame_at(scene.space, scene.hyp, u, cfg.jet_order)?;
        ambient_points.push(nf.x.clone());
        probe_sets.push(ambient_probe_set(
            scene.space.dim(),
            &nf.w_ambient,
            &nf.xi_ambient,
            cfg.seed,
            pi,
        ));
    }
    let report = scene
        .space
        .validate_statistical(&ambient_points, &probe_sets, cfg.tol1)?;
    Ok((points, report))
}

/// Runs the whole catalog over the configured sample set.
pub fn run_identity_suite(scene: &Scene<'_>) -> Result<SuiteReport> {
    let cfg = &scene.cfg;
    let points = sample_points(scene.hyp.domain(), cfg.points, cfg.points / 2, cfg.seed);

    // Per-point geometry.
    let mut per: Vec<PerPoint<'_>> = Vec::with_capacity(points.len());
    for (pi, u) in points.iter().enumerate() {
        let ctx = PointCtx::new(scene.space, scene.hyp, u, cfg.jet_order)?;
        let pt = PointTensors::compute(&ctx)?;
        let cd = curvature_data(&ctx, &pt)?;
        let fd = build_field_data(scene, &ctx, pi)?;
        per.push(PerPoint {
            u: u.clone(),
            ctx,
            pt,
            cd,
            fd,
        });
    }

    // Ambient validation over the image points with coordinate, frame, and
    // random probes.
    let dim = scene.space.dim();
    let mut ambient_points = Vec::with_capacity(per.len());
    let mut probe_sets = Vec::with_capacity(per.len());
    for (pi, pp) in per.iter().enumerate() {
        ambient_points.push(pp.ctx.x0.clone());
        probe_sets.push(ambient_probe_set(
            dim,
            &pp.pt.w_amb,
            &pp.pt.xi_amb,
            cfg.seed,
            pi,
        ));
    }
    let validation = scene
        .space
        .validate_statistical(&ambient_points, &probe_sets, cfg.tol1)?;

    // Self-duality and constant-curvature guards.
    let mut self_dual = true;
    for pp in per.iter().take(4) {
        let cp = scene.space.connection_pair_at(&pp.ctx.x0)?;
        let mut worst: f64 = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    worst = math::fmax(
                        worst,
                        math::fabs(cp.gamma[a][b][c] - cp.gamma_star[a][b][c]),
                    );
                }
            }
        }
        if worst > cfg.tol1 {
            self_dual = false;
            break;
        }
    }
    let const_curv = scene.space.constant_c();
    let const_curv_ok = match const_curv {
        None => false,
        Some(c) => {
            let mut stream = Stream::new(cfg.seed, "constc", 0);
            let probes: Vec<Vec<f64>> = (0..4).map(|_| stream.vector(dim)).collect();
            let mut worst: f64 = 0.0;
            for pp in per.iter().take(4) {
                worst = math::fmax(
                    worst,
                    scene
                        .space
                        .constant_curvature_residual(&pp.ctx.x0, c, &probes)?,
                );
            }
            worst < cfg.tol2
        }
    };
    let gs = GuardState {
        torsion_ok: validation.torsion_residual < cfg.tol1,
        statistical_ok: validation.pass,
        self_dual,
        const_curv,
        const_curv_ok,
    };

    let classification =
        classify::classify_points(scene, &per.iter().map(|p| &p.pt).collect::<Vec<_>>())?;

    let mut checks = Vec::with_capacity(CATALOG.len());
    for spec in CATALOG {
        let tolerance = match spec.tier {
            Tier::T1 => cfg.tol1,
            Tier::T2 => cfg.tol2,
            Tier::T3 => cfg.tol3,
            Tier::Abs(t) => t,
        };
        if let Some(reason) = guard_allows(spec.guard, &gs, &scene.fixture) {
            checks.push(CheckResult {
                id: String::from(spec.id),
                description: String::from(spec.description),
                guard: format!("skipped: {reason}"),
                points: 0,
                max_residual: 0.0,
                argmax_point: None,
                argmax_probe: None,
                tolerance,
                verdict: Verdict::Skipped,
                details: Vec::new(),
            });
            continue;
        }
        let out = evaluate_check(spec.id, scene, &per, &validation, &classification)?;
        let verdict = match spec.style {
            Style::Residual => {
                if out.max.value < tolerance {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            Style::Evidence => Verdict::Reported,
            Style::Equivalence | Style::Conditional => {
                if out.max.value < 0.5 {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
        };
        checks.push(CheckResult {
            id: String::from(spec.id),
            description: String::from(spec.description),
            guard: String::from("run"),
            points: per.len(),
            max_residual: out.max.value,
            argmax_point: out.max.point,
            argmax_probe: out.max.probe,
            tolerance,
            verdict,
            details: out.details,
        });
    }

    Ok(SuiteReport {
        points,
        validation,
        checks,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use alloc::string::ToString;

    fn suite(name: &str, points: usize, seed: u64) -> SuiteReport {
        let fx = fixtures::build(name).unwrap();
        let scene = Scene {
            space: &fx.space,
            hyp: &fx.hyp,
            cfg: RunConfig {
                points,
                seed,
                ..RunConfig::default()
            },
            fixture: Some(name.to_string()),
        };
        run_identity_suite(&scene).unwrap()
    }

    #[test]
    fn p0_suite_all_pass() {
        let rep = suite(fixtures::FLAT_PLANE_P0, 8, 42);
        assert!(rep.validation.pass);
        for c in &rep.checks {
            assert!(
                c.verdict != Verdict::Fail,
                "{} failed with residual {:e} (probe {:?})",
                c.id,
                c.max_residual,
                c.argmax_probe
            );
        }
        assert_eq!(rep.classification.totally_geodesic_d.verdict, "holds");
        assert_eq!(rep.classification.totally_geodesic_dstar.verdict, "holds");
        assert_eq!(rep.classification.screen_conformal.verdict, "vacuous");
    }

    #[test]
    fn symk_suite_statistical_checks_pass() {
        let rep = suite(fixtures::PAPER_CONE_SYMK, 8, 42);
        assert!(rep.validation.pass, "symmetric-K ambient must validate");
        for c in &rep.checks {
            assert!(
                c.verdict != Verdict::Fail,
                "{} failed with residual {:e} at {:?} (probe {:?})",
                c.id,
                c.max_residual,
                c.argmax_point,
                c.argmax_probe
            );
        }
        let ids: Vec<&str> = rep
            .checks
            .iter()
            .filter(|c| c.guard == "run")
            .map(|c| c.id.as_str())
            .collect();
        for required in [
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
            "ID-pr8a",
            "ID-g1",
            "ID-g5",
            "ID-gRxiN",
        ] {
            assert!(ids.contains(&required), "{required} did not run");
        }
    }

    #[test]
    fn paper_cone_suite_detects_duality_failure() {
        let rep = suite(fixtures::PAPER_CONE, 8, 42);
        assert!(!rep.validation.pass);
        let gate = rep
            .checks
            .iter()
            .find(|c| c.id == "ID-ambient-statistical")
            .unwrap();
        assert_eq!(gate.verdict, Verdict::Fail);
        // Value checks still pass.
        let vals = rep
            .checks
            .iter()
            .find(|c| c.id == "ID-values-paper-cone")
            .unwrap();
        assert_eq!(vals.verdict, Verdict::Pass);
        // Statistical-only checks are skipped, not run.
        let lhsm = rep.checks.iter().find(|c| c.id == "ID-lhsm1").unwrap();
        assert_eq!(lhsm.verdict, Verdict::Skipped);
        // Definitional checks still pass on the non-dual pair.
        for id in ["ID-g3", "ID-g5", "ID-gRxiN", "ID-pr88a", "ID-pro5-torsion"] {
            let c = rep.checks.iter().find(|c| c.id == id).unwrap();
            assert_eq!(c.verdict, Verdict::Pass, "{id}: {:e}", c.max_residual);
        }
        // The frame-probe duality residual carries the closed-form value.
        let fd = rep
            .validation
            .frame_duality
            .iter()
            .find(|f| f.labels == ["W2".to_string(), "W2".to_string(), "xi".to_string()])
            .unwrap();
        let u = &rep.points[fd.point_index];
        let expect = crate::math::sqrt(2.0) * crate::math::fabs(u[2] * u[2] - u[1] * u[1]);
        assert!(
            crate::math::fabs(fd.max_residual - expect) < 1e-8,
            "frame duality residual {} vs closed form {}",
            fd.max_residual,
            expect
        );
    }

    #[test]
    fn lc_cone_suite_passes_with_flat_checks() {
        let rep = suite(fixtures::PAPER_CONE_LC, 8, 42);
        assert!(rep.validation.pass);
        for c in &rep.checks {
            assert!(
                c.verdict != Verdict::Fail,
                "{} failed with residual {:e} (probe {:?})",
                c.id,
                c.max_residual,
                c.argmax_probe
            );
        }
        for id in ["ID-ric-paths", "ID-rics", "ID-eq47", "ID-classical-B"] {
            let c = rep.checks.iter().find(|c| c.id == id).unwrap();
            assert_eq!(c.guard, "run", "{id} should run on the flat self-dual cone");
            assert_eq!(c.verdict, Verdict::Pass);
        }
        assert_eq!(rep.classification.totally_geodesic_d.verdict, "fails");
    }

    #[test]
    fn lightcone_suite_umbilic_branch() {
        let rep = suite(fixtures::LIGHTCONE_R31, 8, 7);
        assert!(rep.validation.pass);
        for c in &rep.checks {
            assert!(
                c.verdict != Verdict::Fail,
                "{} failed with residual {:e} (probe {:?}, details {:?})",
                c.id,
                c.max_residual,
                c.argmax_probe,
                c.details
            );
        }
        // The lightcone is totally tangentially umbilical with k = -1 and
        // the radical sum fit gives rho = -2.
        let cl = &rep.classification;
        assert_eq!(cl.tangential_umbilic_d.verdict, "holds");
        assert!((cl.tangential_umbilic_d.coeff_min + 1.0).abs() < 1e-8);
        assert_eq!(cl.umbilic_sum.verdict, "holds");
        assert!((cl.umbilic_sum.coeff_min + 2.0).abs() < 1e-8);
    }

    #[test]
    fn suite_is_deterministic() {
        let a = suite(fixtures::PAPER_CONE_SYMK, 4, 9);
        let b = suite(fixtures::PAPER_CONE_SYMK, 4, 9);
        assert_eq!(a.checks.len(), b.checks.len());
        for (x, y) in a.checks.iter().zip(&b.checks) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.verdict, y.verdict);
            assert_eq!(x.max_residual.to_bits(), y.max_residual.to_bits());
        }
    }
}
