//! Space files and the text literals accepted on the command line.
//!
//! A space file is JSON in one of two shapes:
//!
//! ```text
//! {"points": ["a", "b"], "matrix": [[0, 1], [1, 0]], "base": 0}
//! {"coords": [[0, 0], [1, 0]], "p": 2, "base": 0, "points": ["a", "b"]}
//! ```
//!
//! `p` is a number `≥ 1` or the string `"inf"`; `points` is optional for
//! coordinate files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::free::FreeElement;
use crate::lipschitz::{f_xy, inf_envelope, plateau, LipschitzFunction};
use crate::metric::{validate_metric, DistanceMatrix, EmbeddedPointSet, FiniteMetricSpace, Metric, PNorm, ValidationReport};
use crate::tol::Tolerances;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    points: Vec<String>,
    matrix: Vec<Vec<f64>>,
    base: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoordsFile {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    points: Option<Vec<String>>,
    coords: Vec<Vec<f64>>,
    p: Value,
    base: usize,
}

/// A parsed but not yet validated space.
#[derive(Clone, Debug)]
pub enum RawSpace {
    Matrix(DistanceMatrix),
    Embedded { points: EmbeddedPointSet, names: Option<Vec<String>> },
}

impl RawSpace {
    pub fn to_matrix(&self) -> DistanceMatrix {
        match self {
            RawSpace::Matrix(m) => m.clone(),
            RawSpace::Embedded { points, names } => {
                let n = points.len();
                DistanceMatrix {
                    names: names.clone().unwrap_or_else(|| (0..n).map(|i| format!("p{i}")).collect()),
                    rows: (0..n).map(|i| (0..n).map(|j| points.d(i, j)).collect()).collect(),
                    base: points.base(),
                }
            }
        }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<ValidationReport> {
        validate_metric(&self.to_matrix(), tol)
    }

    pub fn into_space(self) -> Result<FiniteMetricSpace> {
        match self {
            RawSpace::Matrix(m) => FiniteMetricSpace::from_matrix(m),
            RawSpace::Embedded { points, names } => FiniteMetricSpace::from_embedded(points, names),
        }
    }
}

fn parse_p(v: &Value) -> Result<PNorm> {
    match v {
        Value::String(s) if s.eq_ignore_ascii_case("inf") => Ok(PNorm::Infinity),
        Value::Number(n) => PNorm::new(n.as_f64().unwrap_or(f64::NAN)),
        other => Err(Error::Parse(format!("\"p\" must be a number or \"inf\", got {other}"))),
    }
}

pub fn parse_space(text: &str) -> Result<RawSpace> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| Error::Parse("space file must be a JSON object".into()))?;
    if obj.contains_key("matrix") {
        let f: MatrixFile = serde_json::from_value(value).map_err(|e| Error::Parse(format!("matrix file: {e}")))?;
        Ok(RawSpace::Matrix(DistanceMatrix { names: f.points, rows: f.matrix, base: f.base }))
    } else if obj.contains_key("coords") {
        let f: CoordsFile = serde_json::from_value(value).map_err(|e| Error::Parse(format!("coordinate file: {e}")))?;
        let norm = parse_p(&f.p)?;
        let points = EmbeddedPointSet::new(f.coords, norm, f.base)?;
        Ok(RawSpace::Embedded { points, names: f.points })
    } else {
        Err(Error::Parse("space file needs either \"matrix\" or \"coords\"".into()))
    }
}

pub fn read_raw_space(path: &Path) -> Result<RawSpace> {
    parse_space(&std::fs::read_to_string(path)?)
}

/// Read and validate.
pub fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    read_raw_space(path)?.into_space()
}

/// Pretty JSON, coordinate form when the space is embedded.
pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    let text = match space.embedding() {
        Some(e) => {
            let p = match e.norm() {
                PNorm::Infinity => Value::from("inf"),
                PNorm::Finite(p) => Value::from(p),
            };
            serde_json::to_string_pretty(&CoordsFile {
                points: Some(space.names().to_vec()),
                coords: e.coords().to_vec(),
                p,
                base: space.base(),
            })
        }
        None => {
            let m = space.to_matrix();
            serde_json::to_string_pretty(&MatrixFile { points: m.names, matrix: m.rows, base: m.base })
        }
    };
    text.expect("space serializes") + "\n"
}

pub fn write_space(space: &FiniteMetricSpace, path: &Path) -> Result<()> {
    std::fs::write(path, space_to_json(space))?;
    Ok(())
}

pub fn point_index(space: &FiniteMetricSpace, name: &str) -> Result<usize> {
    space
        .index_of(name)
        .ok_or_else(|| Error::Parse(format!("unknown point {name:?}")))
}

/// `"1.0*x - 0.5*y + z"`. Terms and the `+`/`-` between them are separated
/// by whitespace; a term without `*` is a bare point name with coefficient 1.
pub fn parse_element(space: &FiniteMetricSpace, text: &str) -> Result<FreeElement> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut expect_term = true;
    for tok in tokens {
        if expect_term {
            let (coef, name) = match tok.split_once('*') {
                Some((c, name)) => {
                    let c: f64 = c.parse().map_err(|_| Error::Parse(format!("bad coefficient {c:?} in {tok:?}")))?;
                    (c, name)
                }
                None => (1.0, tok),
            };
            terms.push((point_index(space, name)?, sign * coef));
            expect_term = false;
        } else {
            sign = match tok {
                "+" => 1.0,
                "-" => -1.0,
                _ => return Err(Error::Parse(format!("expected + or - between terms, got {tok:?}"))),
            };
            expect_term = true;
        }
    }
    if expect_term {
        return Err(Error::Parse("element ends with an operator".into()));
    }
    FreeElement::from_terms(space, terms)
}

/// Splits on commas outside parentheses, so `(1,0),(0,0)` gives two names.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// A function literal: `"a=0.5;b=-1"` (unlisted points are filled by the
/// inf envelope at the constant of the listed values), or one of the
/// built-ins `fxy:x,y`, `dist-to:p`, `plateau:alpha[,x,y]`. The plateau
/// defaults to `y = base` and `x` the point farthest from it.
pub fn parse_function(space: &FiniteMetricSpace, text: &str) -> Result<LipschitzFunction> {
    let text = text.trim();
    if let Some((head, rest)) = text.split_once(':') {
        let args = split_args(rest);
        let arity = |n: &[usize]| {
            if n.contains(&args.len()) {
                Ok(())
            } else {
                Err(Error::Parse(format!("{head} takes {n:?} arguments, got {}", args.len())))
            }
        };
        return match head {
            "fxy" => {
                arity(&[2])?;
                f_xy(space, point_index(space, args[0])?, point_index(space, args[1])?)
            }
            "dist-to" => {
                arity(&[1])?;
                Ok(LipschitzFunction::distance_to(space, point_index(space, args[0])?))
            }
            "plateau" => {
                arity(&[1, 3])?;
                let alpha: f64 = args[0].parse().map_err(|_| Error::Parse(format!("bad plateau width {:?}", args[0])))?;
                let (x, y) = if args.len() == 3 {
                    (point_index(space, args[1])?, point_index(space, args[2])?)
                } else {
                    let base = space.base();
                    let far = (0..space.len())
                        .max_by(|&a, &b| space.d(base, a).total_cmp(&space.d(base, b)).then(b.cmp(&a)))
                        .unwrap_or(base);
                    (far, base)
                };
                plateau(space, x, y, alpha)
            }
            _ => Err(Error::Parse(format!("unknown function {head:?}; built-ins: fxy, dist-to, plateau"))),
        };
    }
    let mut partial: Vec<(usize, f64)> = Vec::new();
    for entry in text.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (name, value) = entry
            .rsplit_once('=')
            .ok_or_else(|| Error::Parse(format!("expected name=value, got {entry:?}")))?;
        let p = point_index(space, name.trim())?;
        let v: f64 = value.trim().parse().map_err(|_| Error::Parse(format!("bad value in {entry:?}")))?;
        if partial.iter().any(|&(q, _)| q == p) {
            return Err(Error::Parse(format!("point {name:?} listed twice")));
        }
        partial.push((p, v));
    }
    if partial.is_empty() {
        return Err(Error::Parse("empty function".into()));
    }
    let mut lip: f64 = 0.0;
    for (a, &(p, fp)) in partial.iter().enumerate() {
        for &(q, fq) in &partial[a + 1..] {
            lip = lip.max((fp - fq).abs() / space.d(p, q));
        }
    }
    LipschitzFunction::new(space, inf_envelope(space, &partial, lip))
}
