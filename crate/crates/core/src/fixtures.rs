//! Bundled example geometries.
//!
//! Each fixture is a plain-data definition (expression strings plus run
//! defaults) so the same source feeds both the library builders here and the
//! manifest catalog in the CLI crate.
//!
//! The cone fixtures share one embedding over flat `R^4_2`:
//! `x0 = u1 + sqrt(2) f` with `f = sqrt(u2^2 + u3^2)`, radical field
//! `xi = f (d0 - d1) + sqrt2 (x2 d2 + x3 d3)` and screen
//! `{W1 = d0 + d1, W2 = -x3 d2 + x2 d3}`. The `paper-cone` variant carries
//! an explicit connection pair whose values on that frame are:
//!
//! ```text
//! D_X W1 = D_W1 X = 0        D_W2 W2 = -2 x2 d2
//! D_xi xi = sqrt2 xi - sqrt2 N
//! D_W2 xi = D_xi W2 = sqrt2 W2 - sqrt2 W1
//! ```
//!
//! (and the dual pair mirrored through the Levi-Civita average). Those frame
//! values determine the difference tensor only on tangent pairs along the
//! cone; the coefficient arrays below extend it to ambient coordinate fields
//! through the frame coframe, with `K(., N) = K(N, .) = 0`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ambient::{AmbientSpace, ConnMode};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::hypersurface::Hypersurface;

pub const FLAT_PLANE_P0: &str = "flat-plane-P0";
pub const PAPER_CONE: &str = "paper-cone";
pub const PAPER_CONE_LC: &str = "paper-cone-LC";
pub const PAPER_CONE_SYMK: &str = "paper-cone-symK";
pub const LIGHTCONE_R31: &str = "lightcone-R31";

pub const ALL: [&str; 5] = [
    FLAT_PLANE_P0,
    PAPER_CONE,
    PAPER_CONE_LC,
    PAPER_CONE_SYMK,
    LIGHTCONE_R31,
];

/// Connection input in string form.
#[derive(Debug, Clone)]
pub enum ConnDef {
    /// Sparse lowered difference tensor: (triple, expression).
    KLower(Vec<([usize; 3], String)>),
    /// Explicit coefficient arrays `[a][b][c]`.
    Explicit {
        gamma: Vec<Vec<Vec<String>>>,
        gamma_star: Vec<Vec<Vec<String>>>,
    },
}

#[derive(Debug, Clone)]
pub struct FixtureDef {
    pub name: &'static str,
    pub dim: usize,
    pub coords: Vec<String>,
    pub metric: Vec<Vec<String>>,
    pub conn: ConnDef,
    pub constant_c: Option<f64>,
    pub params: Vec<String>,
    pub embedding: Vec<String>,
    pub xi: Option<Vec<String>>,
    pub screen: Option<Vec<Vec<String>>>,
    pub domain: Vec<[f64; 2]>,
    pub points: usize,
    pub seed: u64,
    pub jet_order: usize,
}

/// Built fixture: ambient space plus hypersurface.
pub struct Fixture {
    pub def: FixtureDef,
    pub space: AmbientSpace,
    pub hyp: Hypersurface,
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| String::from(*s)).collect()
}

fn diag_metric(signs: &[i32]) -> Vec<Vec<String>> {
    let n = signs.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i != j {
                        String::from("0")
                    } else if signs[i] < 0 {
                        String::from("-1")
                    } else {
                        String::from("1")
                    }
                })
                .collect()
        })
        .collect()
}

/// Builds one product term `a*b*c`, skipping the whole term when any factor
/// is the literal "0".
fn term(factors: &[&str]) -> Option<String> {
    if factors.contains(&"0") {
        return None;
    }
    Some(
        factors
            .iter()
            .map(|f| format!("({f})"))
            .collect::<Vec<_>>()
            .join("*"),
    )
}

fn sum_terms(terms: Vec<Option<String>>) -> String {
    let live: Vec<String> = terms.into_iter().flatten().collect();
    if live.is_empty() {
        String::from("0")
    } else {
        live.join(" + ")
    }
}

/// Explicit coefficient arrays for the cone connection pair.
///
/// On the tangent coframe `{w2, wxi}` dual to `{W2, xi}` (W1-slots vanish),
/// the difference from Levi-Civita is
/// `K = K22 (w2 x w2) + K2xi (w2 x wxi + wxi x w2) + Kxixi (wxi x wxi)`
/// with `K22 = -x2 d2 + x3 d3`, `K2xi = -sqrt2 W1`, `Kxixi = -sqrt2 N`.
/// `gamma = K` and `gamma_star = -K` over the flat background.
fn cone_gamma_strings(star: bool) -> Vec<Vec<Vec<String>>> {
    let ff = "(x2^2+x3^2)";
    let w2 = [
        String::from("0"),
        String::from("0"),
        format!("-x3/{ff}"),
        format!("x2/{ff}"),
    ];
    let wxi = [
        format!("1/(4*sqrt{ff})"),
        format!("-1/(4*sqrt{ff})"),
        format!("sqrt(2)*x2/(4*{ff})"),
        format!("sqrt(2)*x3/(4*{ff})"),
    ];
    let k22 = ["0", "0", "-x2", "x3"];
    let k2xi = ["-sqrt(2)", "-sqrt(2)", "0", "0"];
    let kxixi = [
        format!("sqrt(2)/(4*sqrt{ff})"),
        format!("-sqrt(2)/(4*sqrt{ff})"),
        format!("-x2/(2*{ff})"),
        format!("-x3/(2*{ff})"),
    ];
    let mut out = vec![vec![vec![String::from("0"); 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let body = sum_terms(vec![
                    term(&[k22[a], &w2[b], &w2[c]]),
                    term(&[k2xi[a], &w2[b], &wxi[c]]),
                    term(&[k2xi[a], &wxi[b], &w2[c]]),
                    term(&[&kxixi[a], &wxi[b], &wxi[c]]),
                ]);
                out[a][b][c] = if star && body != "0" {
                    format!("-({body})")
                } else {
                    body
                };
            }
        }
    }
    out
}

fn cone_base(name: &'static str, conn: ConnDef, constant_c: Option<f64>) -> FixtureDef {
    FixtureDef {
        name,
        dim: 4,
        coords: strs(&["x0", "x1", "x2", "x3"]),
        metric: diag_metric(&[-1, -1, 1, 1]),
        conn,
        constant_c,
        params: strs(&["u1", "u2", "u3"]),
        embedding: strs(&["u1 + sqrt(2)*sqrt(u2^2+u3^2)", "u1", "u2", "u3"]),
        xi: Some(strs(&["-sqrt(u2^2+u3^2)", "sqrt(2)*u2", "sqrt(2)*u3"])),
        screen: Some(vec![strs(&["1", "0", "0"]), strs(&["0", "-u3", "u2"])]),
        domain: vec![[-1.0, 1.0], [0.5, 2.5], [0.5, 2.5]],
        points: 32,
        seed: 42,
        jet_order: 3,
    }
}

pub fn fixture(name: &str) -> Result<FixtureDef> {
    match name {
        FLAT_PLANE_P0 => Ok(FixtureDef {
            name: FLAT_PLANE_P0,
            dim: 4,
            coords: strs(&["x0", "x1", "x2", "x3"]),
            metric: diag_metric(&[-1, -1, 1, 1]),
            conn: ConnDef::KLower(Vec::new()),
            constant_c: Some(0.0),
            params: strs(&["u1", "u2", "u3"]),
            embedding: strs(&["u1", "u2", "u1", "u3"]),
            xi: Some(strs(&["1", "0", "0"])),
            screen: Some(vec![strs(&["0", "1", "0"]), strs(&["0", "0", "1"])]),
            domain: vec![[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
            points: 32,
            seed: 42,
            jet_order: 3,
        }),
        PAPER_CONE => Ok(cone_base(
            PAPER_CONE,
            ConnDef::Explicit {
                gamma: cone_gamma_strings(false),
                gamma_star: cone_gamma_strings(true),
            },
            None,
        )),
        PAPER_CONE_LC => Ok(cone_base(
            PAPER_CONE_LC,
            ConnDef::KLower(Vec::new()),
            Some(0.0),
        )),
        PAPER_CONE_SYMK => Ok(cone_base(
            PAPER_CONE_SYMK,
            ConnDef::KLower(vec![([2, 2, 2], String::from("x3"))]),
            None,
        )),
        LIGHTCONE_R31 => Ok(FixtureDef {
            name: LIGHTCONE_R31,
            dim: 4,
            coords: strs(&["x0", "x1", "x2", "x3"]),
            metric: diag_metric(&[-1, 1, 1, 1]),
            conn: ConnDef::KLower(Vec::new()),
            constant_c: Some(0.0),
            params: strs(&["u1", "u2", "u3"]),
            embedding: strs(&["sqrt(u1^2+u2^2+u3^2)", "u1", "u2", "u3"]),
            xi: Some(strs(&["u1", "u2", "u3"])),
            screen: Some(vec![strs(&["-u2", "u1", "0"]), strs(&["-u3", "0", "u1"])]),
            domain: vec![[0.5, 1.5], [0.5, 1.5], [0.5, 1.5]],
            points: 32,
            seed: 42,
            jet_order: 3,
        }),
        other => Err(Error::Invalid {
            message: format!("unknown fixture `{other}`"),
        }),
    }
}

/// Parses a fixture definition into ambient space and hypersurface objects.
pub fn build_def(def: &FixtureDef) -> Result<(AmbientSpace, Hypersurface)> {
    let coord_refs: Vec<&str> = def.coords.iter().map(|s| s.as_str()).collect();
    let param_refs: Vec<&str> = def.params.iter().map(|s| s.as_str()).collect();
    let metric = def
        .metric
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| Expr::parse(s, &coord_refs))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mode = match &def.conn {
        ConnDef::KLower(entries) => ConnMode::KLower(
            entries
                .iter()
                .map(|(idx, s)| Ok((*idx, Expr::parse(s, &coord_refs)?)))
                .collect::<Result<Vec<_>>>()?,
        ),
        ConnDef::Explicit { gamma, gamma_star } => {
            let parse3 = |arr: &Vec<Vec<Vec<String>>>| -> Result<Vec<Vec<Vec<Expr>>>> {
                arr.iter()
                    .map(|b| {
                        b.iter()
                            .map(|c| {
                                c.iter()
                                    .map(|s| Expr::parse(s, &coord_refs))
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect()
            };
            ConnMode::Explicit {
                gamma: parse3(gamma)?,
                gamma_star: parse3(gamma_star)?,
            }
        }
    };
    let space = AmbientSpace::new(def.dim, def.coords.clone(), metric, mode, def.constant_c)?;
    let embedding = def
        .embedding
        .iter()
        .map(|s| Expr::parse(s, &param_refs))
        .collect::<Result<Vec<_>>>()?;
    let xi = match &def.xi {
        Some(xs) => Some(
            xs.iter()
                .map(|s| Expr::parse(s, &param_refs))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let screen = match &def.screen {
        Some(ws) => Some(
            ws.iter()
                .map(|w| {
                    w.iter()
                        .map(|s| Expr::parse(s, &param_refs))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let hyp = Hypersurface::new(
        def.params.clone(),
        embedding,
        xi,
        screen,
        def.domain.clone(),
    )?;
    Ok((space, hyp))
}

pub fn build(name: &str) -> Result<Fixture> {
    let def = fixture(name)?;
    let (space, hyp) = build_def(&def)?;
    Ok(Fixture { def, space, hyp })
}
