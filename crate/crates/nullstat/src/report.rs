//! Report structures and emission.
//!
//! Every scalar is serialized as a decimal with 17 significant digits
//! (`{:.16e}`), in JSON and CSV alike, so reports are byte-reproducible for
//! a fixed manifest, seed, and engine version, and the two formats carry
//! identical numeric text.

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use nullstat_core::ambient::StatValidationReport;
use nullstat_core::harness::{CheckResult, Classification, PropertyFit, SuiteReport};
use nullstat_core::hypersurface::NullFramePoint;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats a scalar with 17 significant digits.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("\"{x}\"")
    }
}

/// A scalar that serializes as a raw 17-significant-digit JSON number.
#[derive(Debug, Clone, Copy)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(sci(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// Vector of scalars with the same formatting.
#[derive(Debug, Clone)]
pub struct SciVec(pub Vec<f64>);

impl Serialize for SciVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            seq.serialize_element(&Sci(*x))?;
        }
        seq.end()
    }
}

pub fn sci_mat(m: &[Vec<f64>]) -> Vec<SciVec> {
    m.iter().map(|r| SciVec(r.clone())).collect()
}

#[derive(Debug, Serialize)]
pub struct Report<P: Serialize> {
    pub engine_version: &'static str,
    pub manifest_digest: String,
    pub command: String,
    pub points: usize,
    pub seed: u64,
    pub jet_order: usize,
    pub payload: P,
}

// --- payload shapes ---------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct WorstJson {
    pub residual: Sci,
    pub point: SciVec,
    pub probes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct FrameDualityJson {
    pub probes: Vec<String>,
    pub max_residual: Sci,
    pub point: SciVec,
}

#[derive(Debug, Serialize)]
pub struct ValidationJson {
    pub pass: bool,
    pub tolerance: Sci,
    pub torsion_residual: Sci,
    pub codazzi_residual: Sci,
    pub duality_residual: Sci,
    pub signature: Vec<i8>,
    pub signature_constant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality_worst: Option<WorstJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codazzi_worst: Option<WorstJson>,
    pub frame_duality: Vec<FrameDualityJson>,
}

pub fn validation_json(points: &[Vec<f64>], v: &StatValidationReport) -> ValidationJson {
    let worst = |w: &Option<nullstat_core::ambient::WorstOffender>| {
        w.as_ref().map(|w| WorstJson {
            residual: Sci(w.residual),
            point: SciVec(points[w.point_index].clone()),
            probes: w.labels.to_vec(),
        })
    };
    ValidationJson {
        pass: v.pass,
        tolerance: Sci(v.tolerance),
        torsion_residual: Sci(v.torsion_residual),
        codazzi_residual: Sci(v.codazzi_residual),
        duality_residual: Sci(v.duality_residual),
        signature: v.signature.clone(),
        signature_constant: v.signature_constant,
        duality_worst: worst(&v.duality_worst),
        codazzi_worst: worst(&v.codazzi_worst),
        frame_duality: v
            .frame_duality
            .iter()
            .map(|f| FrameDualityJson {
                probes: f.labels.to_vec(),
                max_residual: Sci(f.max_residual),
                point: SciVec(points[f.point_index].clone()),
            })
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct FrameJson {
    pub p: SciVec,
    pub x: SciVec,
    pub tangent: Vec<SciVec>,
    pub xi_param: SciVec,
    pub xi_ambient: SciVec,
    pub w_param: Vec<SciVec>,
    pub w_ambient: Vec<SciVec>,
    pub e_ambient: Vec<SciVec>,
    pub eps: SciVec,
    pub n: SciVec,
    pub gram: Vec<SciVec>,
    pub eta_covector: SciVec,
    pub frame_det: Sci,
}

pub fn frame_json(nf: &NullFramePoint) -> FrameJson {
    FrameJson {
        p: SciVec(nf.p.clone()),
        x: SciVec(nf.x.clone()),
        tangent: sci_mat(&nf.tangent),
        xi_param: SciVec(nf.xi_param.clone()),
        xi_ambient: SciVec(nf.xi_ambient.clone()),
        w_param: sci_mat(&nf.w_param),
        w_ambient: sci_mat(&nf.w_ambient),
        e_ambient: sci_mat(&nf.e_ambient),
        eps: SciVec(nf.eps.clone()),
        n: SciVec(nf.n.clone()),
        gram: sci_mat(&nf.gram),
        eta_covector: SciVec(nf.eta_covector.clone()),
        frame_det: Sci(nf.frame_det),
    }
}

#[derive(Debug, Serialize)]
pub struct FormsJson {
    pub point: SciVec,
    pub pair: [String; 2],
    pub b: Sci,
    pub b_star: Sci,
    pub tau_x: Sci,
    pub tau_star_x: Sci,
    pub tau_consistency: Sci,
    pub a_n_x: SciVec,
    pub a_n_star_x: SciVec,
    pub c_x_py: Sci,
    pub c_star_x_py: Sci,
    pub abar_xi_x: SciVec,
    pub abar_star_xi_x: SciVec,
    pub d_xy_screen: SciVec,
    pub d_xy_eta: Sci,
    pub d_xy_ambient: SciVec,
    pub d_star_xy_screen: SciVec,
    pub d_star_xy_eta: Sci,
    pub d_star_xy_ambient: SciVec,
    pub reconstruction_residual: Sci,
}

#[derive(Debug, Serialize)]
pub struct CheckJson {
    pub id: String,
    pub description: String,
    pub guard: String,
    pub points: usize,
    pub max_residual: Sci,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_point: Option<SciVec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_probe: Option<String>,
    pub tolerance: Sci,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<DetailJson>,
}

#[derive(Debug, Serialize)]
pub struct DetailJson {
    pub name: String,
    pub value: Sci,
}

pub fn check_json(c: &CheckResult) -> CheckJson {
    CheckJson {
        id: c.id.clone(),
        description: c.description.clone(),
        guard: c.guard.clone(),
        points: c.points,
        max_residual: Sci(c.max_residual),
        argmax_point: c.argmax_point.as_ref().map(|p| SciVec(p.clone())),
        argmax_probe: c.argmax_probe.clone(),
        tolerance: Sci(c.tolerance),
        verdict: c.verdict.as_str(),
        details: c
            .details
            .iter()
            .map(|(k, v)| DetailJson {
                name: k.clone(),
                value: Sci(*v),
            })
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct PropertyJson {
    pub verdict: &'static str,
    pub max_residual: Sci,
    pub coeff_min: Sci,
    pub coeff_max: Sci,
}

fn property_json(p: &PropertyFit) -> PropertyJson {
    PropertyJson {
        verdict: p.verdict,
        max_residual: Sci(p.max_residual),
        coeff_min: Sci(p.coeff_min),
        coeff_max: Sci(p.coeff_max),
    }
}

#[derive(Debug, Serialize)]
pub struct ClassificationJson {
    pub totally_geodesic_d: PropertyJson,
    pub totally_geodesic_dstar: PropertyJson,
    pub tangential_umbilic_d: PropertyJson,
    pub tangential_umbilic_dstar: PropertyJson,
    pub normal_umbilic_d: PropertyJson,
    pub normal_umbilic_dstar: PropertyJson,
    pub umbilic_sum: PropertyJson,
    pub screen_conformal: PropertyJson,
    pub screen_conformal_operators: PropertyJson,
}

pub fn classification_json(c: &Classification) -> ClassificationJson {
    ClassificationJson {
        totally_geodesic_d: property_json(&c.totally_geodesic_d),
        totally_geodesic_dstar: property_json(&c.totally_geodesic_dstar),
        tangential_umbilic_d: property_json(&c.tangential_umbilic_d),
        tangential_umbilic_dstar: property_json(&c.tangential_umbilic_dstar),
        normal_umbilic_d: property_json(&c.normal_umbilic_d),
        normal_umbilic_dstar: property_json(&c.normal_umbilic_dstar),
        umbilic_sum: property_json(&c.umbilic_sum),
        screen_conformal: property_json(&c.screen_conformal),
        screen_conformal_operators: property_json(&c.screen_conformal_operators),
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyJson {
    pub validation: ValidationJson,
    pub checks: Vec<CheckJson>,
    pub classification: ClassificationJson,
    pub failed: usize,
}

pub fn verify_json(rep: &SuiteReport) -> VerifyJson {
    VerifyJson {
        validation: validation_json(&rep.points, &rep.validation),
        checks: rep.checks.iter().map(check_json).collect(),
        classification: classification_json(&rep.classification),
        failed: rep
            .checks
            .iter()
            .filter(|c| c.verdict == nullstat_core::harness::Verdict::Fail)
            .count(),
    }
}

#[derive(Debug, Serialize)]
pub struct CurvatureScalarsJson {
    pub point: SciVec,
    pub h: Sci,
    pub r_screen: Sci,
    pub sigma: Sci,
    pub kappa: Vec<KappaJson>,
    pub kappa_null: SciVec,
    pub kappa_in: SciVec,
    pub ricci_xixi: Sci,
    pub reading_12star_sum: Sci,
    pub reading_12star_per_i: SciVec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq47_residual: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nul_literal: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nul_derived: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1n_literal: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1n_derived: Option<Sci>,
}

#[derive(Debug, Serialize)]
pub struct KappaJson {
    pub i: usize,
    pub j: usize,
    pub value: Sci,
}

#[derive(Debug, Serialize)]
pub struct CurvaturePointJson {
    pub point: SciVec,
    /// `g(R(X,Y)Z, .)`-style components on frame triples, both connections.
    pub r_components: Vec<RComponentJson>,
    pub ricci02: Vec<SciVec>,
    pub ricci02_star: Vec<SciVec>,
    pub asymmetry_defect: Vec<SciVec>,
    pub scalars: CurvatureScalarsJson,
}

#[derive(Debug, Serialize)]
pub struct RComponentJson {
    pub triple: [String; 3],
    pub r: SciVec,
    pub r_star: SciVec,
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json_bytes<P: Serialize>(report: &Report<P>) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    s.push('\n');
    s.into_bytes()
}

/// CSV rendering: one table per command, numeric cells formatted exactly as
/// in JSON.
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out.into_bytes()
    }
}
