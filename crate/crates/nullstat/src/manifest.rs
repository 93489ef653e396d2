//! Manifest loading and validation.
//!
//! A manifest is structured JSON (schema in `docs/manifest-schema.json`);
//! expressions are strings in the engine's DSL. The shorthand
//! `{"fixture": "<name>"}` expands to a bundled manifest; a `run` section
//! next to the shorthand overrides the bundled run defaults. Validation
//! errors carry a JSON-pointer path, and expression errors additionally the
//! byte offset inside the string.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use nullstat_core::ambient::{AmbientSpace, ConnMode};
use nullstat_core::fixtures::{self, ConnDef, FixtureDef};
use nullstat_core::harness::RunConfig;
use nullstat_core::hypersurface::Hypersurface;
use nullstat_core::Expr;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tol1: f64,
    pub tol2: f64,
    pub tol3: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSection {
    pub points: usize,
    pub seed: u64,
    pub jet_order: usize,
    pub tolerances: Tolerances,
}

impl Default for RunSection {
    fn default() -> Self {
        let c = RunConfig::default();
        RunSection {
            points: c.points,
            seed: c.seed,
            jet_order: c.jet_order,
            tolerances: Tolerances {
                tol1: c.tol1,
                tol2: c.tol2,
                tol3: c.tol3,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AmbientSection {
    pub dim: usize,
    pub coords: Vec<String>,
    pub metric: Vec<Vec<String>>,
    pub mode: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub k_lower: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Vec<Vec<String>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_star: Option<Vec<Vec<Vec<String>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_c: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypersurfaceSection {
    pub params: Vec<String>,
    pub embedding: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub screen: Option<Vec<Vec<String>>>,
    pub domain: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    pub ambient: AmbientSection,
    pub hypersurface: HypersurfaceSection,
    pub run: RunSection,
}

impl Manifest {
    /// Canonical bytes: compact JSON of the expanded manifest.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("manifest serialization cannot fail")
    }

    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical_bytes());
        let mut s = String::from("sha256:");
        for b in hash {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            points: self.run.points,
            seed: self.run.seed,
            jet_order: self.run.jet_order,
            tol1: self.run.tolerances.tol1,
            tol2: self.run.tolerances.tol2,
            tol3: self.run.tolerances.tol3,
        }
    }

    /// Parses every expression and builds the engine objects.
    pub fn build(&self) -> Result<(AmbientSpace, Hypersurface)> {
        let a = &self.ambient;
        let coords: Vec<&str> = a.coords.iter().map(|s| s.as_str()).collect();
        let params: Vec<&str> = self
            .hypersurface
            .params
            .iter()
            .map(|s| s.as_str())
            .collect();

        let parse = |text: &str, vars: &[&str], ptr: String| -> Result<Expr> {
            Expr::parse(text, vars).map_err(|e| anyhow!("{ptr}: {e}"))
        };

        let mut metric = Vec::new();
        for (i, row) in a.metric.iter().enumerate() {
            let mut out = Vec::new();
            for (j, s) in row.iter().enumerate() {
                out.push(parse(s, &coords, format!("/ambient/metric/{i}/{j}"))?);
            }
            metric.push(out);
        }
        let mode = match a.mode.as_str() {
            "K_lower" => {
                let mut entries = Vec::new();
                for (key, text) in &a.k_lower {
                    let idx = parse_triple(key)
                        .with_context(|| format!("/ambient/K_lower: bad key `{key}`"))?;
                    entries.push((
                        idx,
                        parse(text, &coords, format!("/ambient/K_lower/{key}"))?,
                    ));
                }
                ConnMode::KLower(entries)
            }
            "explicit" => {
                let g = a
                    .gamma
                    .as_ref()
                    .ok_or_else(|| anyhow!("/ambient/gamma: required in explicit mode"))?;
                let gs = a
                    .gamma_star
                    .as_ref()
                    .ok_or_else(|| anyhow!("/ambient/gamma_star: required in explicit mode"))?;
                let parse3 = |arr: &Vec<Vec<Vec<String>>>,
                              name: &str|
                 -> Result<Vec<Vec<Vec<Expr>>>> {
                    let mut out = Vec::new();
                    for (x, b) in arr.iter().enumerate() {
                        let mut ob = Vec::new();
                        for (y, c) in b.iter().enumerate() {
                            let mut oc = Vec::new();
                            for (z, s) in c.iter().enumerate() {
                                oc.push(parse(s, &coords, format!("/ambient/{name}/{x}/{y}/{z}"))?);
                            }
                            ob.push(oc);
                        }
                        out.push(ob);
                    }
                    Ok(out)
                };
                ConnMode::Explicit {
                    gamma: parse3(g, "gamma")?,
                    gamma_star: parse3(gs, "gamma_star")?,
                }
            }
            other => bail!("/ambient/mode: unknown mode `{other}`"),
        };
        let space = AmbientSpace::new(a.dim, a.coords.clone(), metric, mode, a.constant_c)
            .map_err(|e| anyhow!("/ambient: {e}"))?;

        let h = &self.hypersurface;
        let mut embedding = Vec::new();
        for (i, s) in h.embedding.iter().enumerate() {
            embedding.push(parse(s, &params, format!("/hypersurface/embedding/{i}"))?);
        }
        let xi = match &h.xi {
            Some(xs) => {
                let mut out = Vec::new();
                for (i, s) in xs.iter().enumerate() {
                    out.push(parse(s, &params, format!("/hypersurface/xi/{i}"))?);
                }
                Some(out)
            }
            None => None,
        };
        let screen = match &h.screen {
            Some(ws) => {
                let mut out = Vec::new();
                for (k, w) in ws.iter().enumerate() {
                    let mut comp = Vec::new();
                    for (i, s) in w.iter().enumerate() {
                        comp.push(parse(s, &params, format!("/hypersurface/screen/{k}/{i}"))?);
                    }
                    out.push(comp);
                }
                Some(out)
            }
            None => None,
        };
        let hyp = Hypersurface::new(h.params.clone(), embedding, xi, screen, h.domain.clone())
            .map_err(|e| anyhow!("/hypersurface: {e}"))?;
        Ok((space, hyp))
    }
}

fn parse_triple(key: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 3 {
        bail!("expected `a,b,c`");
    }
    let mut out = [0usize; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p.trim().parse().context("index not an integer")?;
    }
    Ok(out)
}

fn from_fixture_def(def: &FixtureDef) -> Manifest {
    let (mode, k_lower, gamma, gamma_star) = match &def.conn {
        ConnDef::KLower(entries) => {
            let mut map = BTreeMap::new();
            for (idx, s) in entries {
                map.insert(format!("{},{},{}", idx[0], idx[1], idx[2]), s.clone());
            }
            (String::from("K_lower"), map, None, None)
        }
        ConnDef::Explicit { gamma, gamma_star } => (
            String::from("explicit"),
            BTreeMap::new(),
            Some(gamma.clone()),
            Some(gamma_star.clone()),
        ),
    };
    Manifest {
        fixture: Some(String::from(def.name)),
        ambient: AmbientSection {
            dim: def.dim,
            coords: def.coords.clone(),
            metric: def.metric.clone(),
            mode,
            k_lower,
            gamma,
            gamma_star,
            constant_c: def.constant_c,
        },
        hypersurface: HypersurfaceSection {
            params: def.params.clone(),
            embedding: def.embedding.clone(),
            xi: def.xi.clone(),
            screen: def.screen.clone(),
            domain: def.domain.clone(),
        },
        run: RunSection {
            points: def.points,
            seed: def.seed,
            jet_order: def.jet_order,
            tolerances: RunSection::default().tolerances,
        },
    }
}

/// Bundled manifest for a fixture name.
pub fn fixture_manifest(name: &str) -> Result<Manifest> {
    let def = fixtures::fixture(name).map_err(|e| anyhow!("{e}"))?;
    Ok(from_fixture_def(&def))
}

// --- JSON -> Manifest with pointer-tagged validation -----------------------

fn want_obj<'v>(v: &'v Value, ptr: &str) -> Result<&'v serde_json::Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| anyhow!("{ptr}: expected object"))
}

fn want_arr<'v>(v: &'v Value, ptr: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| anyhow!("{ptr}: expected array"))
}

fn want_str(v: &Value, ptr: &str) -> Result<String> {
    v.as_str()
        .map(String::from)
        .ok_or_else(|| anyhow!("{ptr}: expected string"))
}

fn want_usize(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| anyhow!("{ptr}: expected non-negative integer"))
}

fn want_f64(v: &Value, ptr: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| anyhow!("{ptr}: expected number"))
}

fn string_array(v: &Value, ptr: &str) -> Result<Vec<String>> {
    want_arr(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, x)| want_str(x, &format!("{ptr}/{i}")))
        .collect()
}

fn string_matrix(v: &Value, ptr: &str) -> Result<Vec<Vec<String>>> {
    want_arr(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, row)| string_array(row, &format!("{ptr}/{i}")))
        .collect()
}

fn string_cube(v: &Value, ptr: &str) -> Result<Vec<Vec<Vec<String>>>> {
    want_arr(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, m)| string_matrix(m, &format!("{ptr}/{i}")))
        .collect()
}

fn run_section(v: Option<&Value>, base: RunSection) -> Result<RunSection> {
    let mut run = base;
    let Some(v) = v else { return Ok(run) };
    let obj = want_obj(v, "/run")?;
    for (key, val) in obj {
        match key.as_str() {
            "points" => {
                run.points = want_usize(val, "/run/points")?;
                if run.points == 0 {
                    bail!("/run/points: must be at least 1");
                }
            }
            "seed" => {
                run.seed = val
                    .as_u64()
                    .ok_or_else(|| anyhow!("/run/seed: expected unsigned 64-bit integer"))?;
            }
            "jet_order" => {
                run.jet_order = want_usize(val, "/run/jet_order")?;
                if !(2..=4).contains(&run.jet_order) {
                    bail!("/run/jet_order: must be between 2 and 4");
                }
            }
            "tolerances" => {
                let t = want_obj(val, "/run/tolerances")?;
                for (tk, tv) in t {
                    let x = want_f64(tv, &format!("/run/tolerances/{tk}"))?;
                    if x <= 0.0 || x.is_nan() {
                        bail!("/run/tolerances/{tk}: must be positive");
                    }
                    match tk.as_str() {
                        "tol1" => run.tolerances.tol1 = x,
                        "tol2" => run.tolerances.tol2 = x,
                        "tol3" => run.tolerances.tol3 = x,
                        other => bail!("/run/tolerances/{other}: unknown field"),
                    }
                }
            }
            other => bail!("/run/{other}: unknown field"),
        }
    }
    Ok(run)
}

/// Loads a manifest from JSON text, expanding the fixture shorthand.
pub fn load_manifest_str(text: &str) -> Result<Manifest> {
    let v: Value = serde_json::from_str(text).context("manifest is not valid JSON")?;
    let obj = want_obj(&v, "")?;

    if let Some(f) = obj.get("fixture") {
        let name = want_str(f, "/fixture")?;
        for key in obj.keys() {
            if key != "fixture" && key != "run" {
                bail!("/{key}: not allowed alongside the fixture shorthand");
            }
        }
        let mut m = fixture_manifest(&name)?;
        m.run = run_section(obj.get("run"), m.run)?;
        validate_manifest(&m)?;
        return Ok(m);
    }

    let ambient_v = obj
        .get("ambient")
        .ok_or_else(|| anyhow!("/ambient: missing section"))?;
    let hyp_v = obj
        .get("hypersurface")
        .ok_or_else(|| anyhow!("/hypersurface: missing section"))?;
    for key in obj.keys() {
        if !["ambient", "hypersurface", "run"].contains(&key.as_str()) {
            bail!("/{key}: unknown section");
        }
    }

    let a = want_obj(ambient_v, "/ambient")?;
    let dim = want_usize(
        a.get("dim")
            .ok_or_else(|| anyhow!("/ambient/dim: missing"))?,
        "/ambient/dim",
    )?;
    if !(3..=5).contains(&dim) {
        bail!("/ambient/dim: supported dimensions are 3 to 5");
    }
    let coords = string_array(
        a.get("coords")
            .ok_or_else(|| anyhow!("/ambient/coords: missing"))?,
        "/ambient/coords",
    )?;
    if coords.len() != dim {
        bail!("/ambient/coords: expected {dim} names");
    }
    let metric = string_matrix(
        a.get("metric")
            .ok_or_else(|| anyhow!("/ambient/metric: missing"))?,
        "/ambient/metric",
    )?;
    if metric.len() != dim || metric.iter().any(|r| r.len() != dim) {
        bail!("/ambient/metric: expected a {dim}x{dim} matrix");
    }
    let mode = match a.get("mode") {
        None => String::from("K_lower"),
        Some(m) => want_str(m, "/ambient/mode")?,
    };
    let mut k_lower = BTreeMap::new();
    if let Some(k) = a.get("K_lower") {
        for (key, val) in want_obj(k, "/ambient/K_lower")? {
            k_lower.insert(
                key.clone(),
                want_str(val, &format!("/ambient/K_lower/{key}"))?,
            );
        }
    }
    let gamma = match a.get("gamma") {
        Some(g) => Some(string_cube(g, "/ambient/gamma")?),
        None => None,
    };
    let gamma_star = match a.get("gamma_star") {
        Some(g) => Some(string_cube(g, "/ambient/gamma_star")?),
        None => None,
    };
    let constant_c = match a.get("constant_c") {
        Some(c) => Some(want_f64(c, "/ambient/constant_c")?),
        None => None,
    };
    for key in a.keys() {
        if ![
            "dim",
            "coords",
            "metric",
            "mode",
            "K_lower",
            "gamma",
            "gamma_star",
            "constant_c",
        ]
        .contains(&key.as_str())
        {
            bail!("/ambient/{key}: unknown field");
        }
    }

    let h = want_obj(hyp_v, "/hypersurface")?;
    let params = string_array(
        h.get("params")
            .ok_or_else(|| anyhow!("/hypersurface/params: missing"))?,
        "/hypersurface/params",
    )?;
    if params.len() + 1 != dim {
        bail!(
            "/hypersurface/params: expected {} parameters for ambient dimension {dim}",
            dim - 1
        );
    }
    let embedding = string_array(
        h.get("embedding")
            .ok_or_else(|| anyhow!("/hypersurface/embedding: missing"))?,
        "/hypersurface/embedding",
    )?;
    if embedding.len() != dim {
        bail!("/hypersurface/embedding: expected {dim} components");
    }
    let xi = match h.get("xi") {
        Some(x) => {
            let xs = string_array(x, "/hypersurface/xi")?;
            if xs.len() != params.len() {
                bail!("/hypersurface/xi: expected {} components", params.len());
            }
            Some(xs)
        }
        None => None,
    };
    let screen = match h.get("screen") {
        Some(s) => {
            let ws = string_matrix(s, "/hypersurface/screen")?;
            if ws.len() != params.len() - 1 || ws.iter().any(|w| w.len() != params.len()) {
                bail!(
                    "/hypersurface/screen: expected {} fields with {} components each",
                    params.len() - 1,
                    params.len()
                );
            }
            Some(ws)
        }
        None => None,
    };
    let domain_v = h
        .get("domain")
        .ok_or_else(|| anyhow!("/hypersurface/domain: missing"))?;
    let domain_arr = want_arr(domain_v, "/hypersurface/domain")?;
    if domain_arr.len() != params.len() {
        bail!("/hypersurface/domain: expected {} intervals", params.len());
    }
    let mut domain = Vec::new();
    for (i, iv) in domain_arr.iter().enumerate() {
        let pair = want_arr(iv, &format!("/hypersurface/domain/{i}"))?;
        if pair.len() != 2 {
            bail!("/hypersurface/domain/{i}: expected [lo, hi]");
        }
        let lo = want_f64(&pair[0], &format!("/hypersurface/domain/{i}/0"))?;
        let hi = want_f64(&pair[1], &format!("/hypersurface/domain/{i}/1"))?;
        if lo >= hi || lo.is_nan() || hi.is_nan() {
            bail!("/hypersurface/domain/{i}: interval is empty");
        }
        domain.push([lo, hi]);
    }
    for key in h.keys() {
        if !["params", "embedding", "xi", "screen", "domain"].contains(&key.as_str()) {
            bail!("/hypersurface/{key}: unknown field");
        }
    }

    let manifest = Manifest {
        fixture: None,
        ambient: AmbientSection {
            dim,
            coords,
            metric,
            mode,
            k_lower,
            gamma,
            gamma_star,
            constant_c,
        },
        hypersurface: HypersurfaceSection {
            params,
            embedding,
            xi,
            screen,
            domain,
        },
        run: run_section(obj.get("run"), RunSection::default())?,
    };
    validate_manifest(&manifest)?;
    Ok(manifest)
}

/// Full validation: all expressions must parse against their variable lists.
fn validate_manifest(m: &Manifest) -> Result<()> {
    m.build().map(|_| ())
}

pub fn load_manifest_file(path: &std::path::Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    load_manifest_str(&text)
}
