//! JSON document handling: scene manifests, ODE system documents, and the
//! canonical digest used to pin a scene in reports.
//!
//! Indices are 1-based in files and 0-based in memory. All scalars travel
//! as strings so the rational backend never passes through floats. Curve
//! and field coefficient arrays are ascending powers of `s` in the global
//! coordinate; loading recentres them at the manifest's base point.

use crate::error::{Error, Result};
use crate::geometry::{ChartTransition, Connection, Curve, Scene, TensorFieldJet};
use crate::jet::Jet;
use crate::ode::{LinearSystem, SampleGrid};
use crate::poly::MultiPoly;
use crate::scalar::{Backend, Scalar};
use crate::series::GenPowerSeries;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;

fn bad(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::manifest(location, message)
}

fn as_object<'v>(v: &'v Value, location: &str) -> Result<&'v Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| bad(location, "expected an object"))
}

fn as_array<'v>(v: &'v Value, location: &str) -> Result<&'v Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(location, "expected an array"))
}

fn get<'v>(obj: &'v Map<String, Value>, key: &str, location: &str) -> Result<&'v Value> {
    obj.get(key)
        .ok_or_else(|| bad(location, format!("missing field \"{key}\"")))
}

fn parse_usize(v: &Value, location: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| bad(location, "expected a nonnegative integer"))
}

fn parse_scalar(v: &Value, backend: Backend, location: &str) -> Result<Scalar> {
    let text = v
        .as_str()
        .ok_or_else(|| bad(location, "scalars must be strings"))?;
    Scalar::parse(text, backend)
        .map_err(|e| bad(location, format!("unreadable scalar \"{text}\": {e}")))
}

/// 1-based index in the file, 0-based in memory.
fn parse_index(v: &Value, dim: usize, location: &str) -> Result<usize> {
    let raw = parse_usize(v, location)?;
    if raw < 1 || raw > dim {
        return Err(bad(location, format!("index {raw} outside 1..={dim}")));
    }
    Ok(raw - 1)
}

fn parse_poly(v: &Value, dim: usize, backend: Backend, location: &str) -> Result<MultiPoly> {
    let mut terms = Vec::new();
    for (t, term) in as_array(v, location)?.iter().enumerate() {
        let loc = format!("{location}[{t}]");
        let obj = as_object(term, &loc)?;
        let coeff = parse_scalar(get(obj, "coeff", &loc)?, backend, &format!("{loc}.coeff"))?;
        let exp_loc = format!("{loc}.exponents");
        let exps = as_array(get(obj, "exponents", &loc)?, &exp_loc)?;
        if exps.len() != dim {
            return Err(bad(&exp_loc, format!("expected {dim} exponents, got {}", exps.len())));
        }
        let exps = exps
            .iter()
            .map(|e| parse_usize(e, &exp_loc).map(|n| n as u32))
            .collect::<Result<Vec<_>>>()?;
        terms.push((exps, coeff));
    }
    MultiPoly::from_terms(dim, backend, terms)
}

fn poly_to_json(p: &MultiPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(exps, coeff)| {
            json!({
                "coeff": coeff.to_string(),
                "exponents": exps.iter().map(|&e| e as u64).collect::<Vec<_>>(),
            })
        })
        .collect();
    Value::Array(terms)
}

/// Ascending global `s`-coefficients to a jet recentred at `base`: read the
/// array as a univariate polynomial and substitute the variable jet, which
/// is an exact Taylor shift.
fn coeffs_to_jet(
    v: &Value,
    order: usize,
    backend: Backend,
    base: &Scalar,
    location: &str,
) -> Result<Jet> {
    let arr = as_array(v, location)?;
    if arr.len() > order + 1 {
        return Err(bad(
            location,
            format!(
                "{} coefficients exceed jet capacity (order {order} keeps {})",
                arr.len(),
                order + 1
            ),
        ));
    }
    let mut terms = Vec::new();
    for (e, c) in arr.iter().enumerate() {
        let coeff = parse_scalar(c, backend, &format!("{location}[{e}]"))?;
        terms.push((vec![e as u32], coeff));
    }
    let poly = MultiPoly::from_terms(1, backend, terms)?;
    poly.eval_jets(&[Jet::variable(order, base.clone())])
}

/// Jet at base `s0` back to ascending global `s`-coefficients, trailing
/// zeros trimmed.
fn jet_to_coeffs(jet: &Jet) -> Result<Vec<String>> {
    let backend = jet.backend();
    let local = MultiPoly::from_terms(
        1,
        backend,
        jet.coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| (vec![m as u32], c.clone())),
    )?;
    let shift = MultiPoly::variable(1, 0, backend)
        .sub(&MultiPoly::constant(1, jet.base().clone()))?;
    let global = local.compose(&[shift])?;
    let mut out = vec![Scalar::zero(backend); global.total_degree() + 1];
    for (exps, coeff) in global.terms() {
        out[exps[0] as usize] = coeff.clone();
    }
    while out.len() > 1 && out.last().map(Scalar::is_zero) == Some(true) {
        out.pop();
    }
    Ok(out.iter().map(Scalar::to_string).collect())
}

fn field_key_indices(key: &str, p: usize, q: usize, dim: usize, location: &str) -> Result<Vec<usize>> {
    let (upper, lower) = key
        .split_once(';')
        .ok_or_else(|| bad(location, format!("key \"{key}\" needs one ';'")))?;
    let side = |text: &str, count: usize, name: &str| -> Result<Vec<usize>> {
        let parts: Vec<&str> = if text.is_empty() {
            Vec::new()
        } else {
            text.split(',').collect()
        };
        if parts.len() != count {
            return Err(bad(
                location,
                format!("key \"{key}\": expected {count} {name} indices, got {}", parts.len()),
            ));
        }
        parts
            .iter()
            .map(|t| {
                let raw: usize = t
                    .trim()
                    .parse()
                    .map_err(|_| bad(location, format!("key \"{key}\": bad index \"{t}\"")))?;
                if raw < 1 || raw > dim {
                    return Err(bad(location, format!("key \"{key}\": index {raw} outside 1..={dim}")));
                }
                Ok(raw - 1)
            })
            .collect()
    };
    let mut idx = side(upper, p, "upper")?;
    idx.extend(side(lower, q, "lower")?);
    Ok(idx)
}

fn field_key(indices: &[usize], p: usize) -> String {
    let fmt = |slice: &[usize]| {
        slice
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{};{}", fmt(&indices[..p]), fmt(&indices[p..]))
}

/// Parses and fully validates a scene manifest.
pub fn load_manifest(text: &str) -> Result<Scene> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let root = as_object(&doc, "manifest")?;

    let dim = parse_usize(get(root, "dimension", "manifest")?, "dimension")?;
    if dim == 0 {
        return Err(bad("dimension", "must be positive"));
    }
    let order = parse_usize(get(root, "order", "manifest")?, "order")?;
    let backend: Backend = get(root, "backend", "manifest")?
        .as_str()
        .ok_or_else(|| bad("backend", "expected a string"))?
        .parse()
        .map_err(|e: Error| bad("backend", e.to_string()))?;
    let base_point = parse_scalar(get(root, "base_point", "manifest")?, backend, "base_point")?;

    let mut connection = Connection::flat(dim, backend);
    let mut seen = BTreeSet::new();
    for (e, entry) in as_array(get(root, "christoffel", "manifest")?, "christoffel")?
        .iter()
        .enumerate()
    {
        let loc = format!("christoffel[{e}]");
        let obj = as_object(entry, &loc)?;
        let upper = parse_index(get(obj, "upper", &loc)?, dim, &format!("{loc}.upper"))?;
        let lower_loc = format!("{loc}.lower");
        let lower = as_array(get(obj, "lower", &loc)?, &lower_loc)?;
        if lower.len() != 2 {
            return Err(bad(&lower_loc, "expected exactly [j, l]"));
        }
        let j = parse_index(&lower[0], dim, &lower_loc)?;
        let l = parse_index(&lower[1], dim, &lower_loc)?;
        if !seen.insert((upper, j, l)) {
            return Err(bad(&loc, format!("duplicate symbol ({}, {}, {})", upper + 1, j + 1, l + 1)));
        }
        let poly = parse_poly(get(obj, "poly", &loc)?, dim, backend, &format!("{loc}.poly"))?;
        connection.set_gamma(upper, j, l, poly)?;
    }

    let curve_entries = as_array(get(root, "curve", "manifest")?, "curve")?;
    if curve_entries.len() != dim {
        return Err(bad(
            "curve",
            format!("expected {dim} coordinate arrays, got {}", curve_entries.len()),
        ));
    }
    let coords = curve_entries
        .iter()
        .enumerate()
        .map(|(i, v)| coeffs_to_jet(v, order, backend, &base_point, &format!("curve[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let curve = Curve::new(coords)?;

    let field = match root.get("field") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let obj = as_object(v, "field")?;
            let p = parse_usize(get(obj, "p", "field")?, "field.p")?;
            let q = parse_usize(get(obj, "q", "field")?, "field.q")?;
            let comp_loc = "field.components";
            let comps = as_object(get(obj, "components", "field")?, comp_loc)?;
            let mut tensor = TensorFieldJet::zero(dim, p, q, order, base_point.clone());
            for (key, arr) in comps {
                let idx = field_key_indices(key, p, q, dim, comp_loc)?;
                let jet = coeffs_to_jet(
                    arr,
                    order,
                    backend,
                    &base_point,
                    &format!("{comp_loc}[\"{key}\"]"),
                )?;
                tensor.set(&idx, jet);
            }
            Some(tensor)
        }
    };

    let transition = match root.get("transition") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let obj = as_object(v, "transition")?;
            let parse_side = |name: &str| -> Result<Vec<MultiPoly>> {
                let loc = format!("transition.{name}");
                let arr = as_array(get(obj, name, "transition")?, &loc)?;
                if arr.len() != dim {
                    return Err(bad(&loc, format!("expected {dim} polynomials, got {}", arr.len())));
                }
                arr.iter()
                    .enumerate()
                    .map(|(i, p)| parse_poly(p, dim, backend, &format!("{loc}[{i}]")))
                    .collect()
            };
            Some(ChartTransition::new(parse_side("forward")?, parse_side("inverse")?)?)
        }
    };

    let scene = Scene {
        connection,
        curve,
        field,
        transition,
        order,
        backend,
        base_point,
    };
    scene.validate()?;
    Ok(scene)
}

/// Canonical manifest text for a scene: sorted keys, zero entries omitted,
/// stable across load/emit round trips.
pub fn emit_manifest(scene: &Scene) -> Result<String> {
    let dim = scene.dim();
    let mut root = Map::new();
    root.insert("dimension".into(), json!(dim as u64));
    root.insert("order".into(), json!(scene.order as u64));
    root.insert("backend".into(), json!(scene.backend.name()));
    root.insert("base_point".into(), json!(scene.base_point.to_string()));

    let mut christoffel = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            for l in 0..dim {
                let poly = scene.connection.gamma(i, j, l);
                if poly.is_zero() {
                    continue;
                }
                christoffel.push(json!({
                    "upper": (i + 1) as u64,
                    "lower": [(j + 1) as u64, (l + 1) as u64],
                    "poly": poly_to_json(poly),
                }));
            }
        }
    }
    root.insert("christoffel".into(), Value::Array(christoffel));

    let curve: Vec<Value> = scene
        .curve
        .coords()
        .iter()
        .map(|jet| jet_to_coeffs(jet).map(|c| json!(c)))
        .collect::<Result<Vec<_>>>()?;
    root.insert("curve".into(), Value::Array(curve));

    if let Some(field) = &scene.field {
        let (p, q) = field.valence();
        let mut comps = Map::new();
        for flat in 0..field.components().len() {
            let jet = &field.components()[flat];
            if jet.is_zero() {
                continue;
            }
            let idx = field.unflatten(flat);
            comps.insert(field_key(&idx, p), json!(jet_to_coeffs(jet)?));
        }
        root.insert(
            "field".into(),
            json!({"p": p as u64, "q": q as u64, "components": Value::Object(comps)}),
        );
    }

    if let Some(transition) = &scene.transition {
        let side = |polys: &[MultiPoly]| -> Value {
            Value::Array(polys.iter().map(poly_to_json).collect())
        };
        root.insert(
            "transition".into(),
            json!({
                "forward": side(transition.forward()),
                "inverse": side(transition.inverse()),
            }),
        );
    }

    serde_json::to_string_pretty(&Value::Object(root)).map_err(|e| Error::Parse(e.to_string()))
}

/// Hex SHA-256 of the canonical manifest text.
pub fn scene_digest(scene: &Scene) -> Result<String> {
    let text = emit_manifest(scene)?;
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in hasher.finalize() {
        out.push_str(&format!("{byte:02x}"));
    }
    Ok(out)
}

/// Parsed ODE system document. Coefficient jets are built on demand so the
/// jet order can follow the truncation actually requested.
#[derive(Debug, Clone)]
pub struct SystemDoc {
    pub dim: usize,
    pub order_of_system: u8,
    pub backend: Backend,
    pub truncation_n: usize,
    pub grid: SampleGrid,
    f_coeffs: Vec<Vec<Scalar>>,
    g: Vec<GenPowerSeries>,
}

impl SystemDoc {
    /// Builds the system with coefficient jets deep enough for `n_trunc`
    /// table levels plus the residual derivatives.
    pub fn build(&self, n_trunc: usize) -> Result<LinearSystem> {
        let max_deg = self.f_coeffs.iter().map(|c| c.len()).max().unwrap_or(1);
        let order = n_trunc + max_deg + 2;
        let base = Scalar::zero(self.backend);
        let entries = self
            .f_coeffs
            .iter()
            .map(|coeffs| {
                let mut padded = coeffs.clone();
                padded.resize(order + 1, Scalar::zero(self.backend));
                Jet::new(padded, base.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let f = crate::jet::JetMatrix::from_entries(self.dim, entries)?;
        LinearSystem::new(self.order_of_system, f, self.g.clone(), self.grid)
    }
}

/// Parses an ODE system document.
pub fn load_system(text: &str) -> Result<SystemDoc> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let root = as_object(&doc, "system")?;

    let dim = parse_usize(get(root, "dimension", "system")?, "dimension")?;
    if dim == 0 {
        return Err(bad("dimension", "must be positive"));
    }
    let order_of_system = parse_usize(get(root, "order_of_system", "system")?, "order_of_system")?;
    if order_of_system != 1 && order_of_system != 2 {
        return Err(bad("order_of_system", "must be 1 or 2"));
    }
    let backend = match root.get("backend") {
        None | Some(Value::Null) => Backend::Float64,
        Some(v) => v
            .as_str()
            .ok_or_else(|| bad("backend", "expected a string"))?
            .parse()
            .map_err(|e: Error| bad("backend", e.to_string()))?,
    };
    let truncation_n = parse_usize(get(root, "truncation_N", "system")?, "truncation_N")?;

    let rows = as_array(get(root, "f", "system")?, "f")?;
    if rows.len() != dim {
        return Err(bad("f", format!("expected {dim} rows, got {}", rows.len())));
    }
    let mut f_coeffs = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let row_loc = format!("f[{i}]");
        let cells = as_array(row, &row_loc)?;
        if cells.len() != dim {
            return Err(bad(&row_loc, format!("expected {dim} entries, got {}", cells.len())));
        }
        for (j, cell) in cells.iter().enumerate() {
            let loc = format!("f[{i}][{j}]");
            let arr = as_array(cell, &loc)?;
            let coeffs = arr
                .iter()
                .enumerate()
                .map(|(e, c)| parse_scalar(c, backend, &format!("{loc}[{e}]")))
                .collect::<Result<Vec<_>>>()?;
            f_coeffs.push(coeffs);
        }
    }

    let g_entries = as_array(get(root, "g", "system")?, "g")?;
    if g_entries.len() != dim {
        return Err(bad("g", format!("expected {dim} components, got {}", g_entries.len())));
    }
    let mut g = Vec::with_capacity(dim);
    for (i, entry) in g_entries.iter().enumerate() {
        let loc = format!("g[{i}]");
        let mut terms = Vec::new();
        for (t, term) in as_array(entry, &loc)?.iter().enumerate() {
            let term_loc = format!("{loc}[{t}]");
            let obj = as_object(term, &term_loc)?;
            let exponent = parse_scalar(
                get(obj, "exponent", &term_loc)?,
                backend,
                &format!("{term_loc}.exponent"),
            )?;
            let coeff = parse_scalar(
                get(obj, "coeff", &term_loc)?,
                backend,
                &format!("{term_loc}.coeff"),
            )?;
            terms.push((exponent, coeff));
        }
        g.push(GenPowerSeries::from_terms(backend, terms)?);
    }

    let grid_loc = "sample_grid";
    let grid_obj = as_object(get(root, "sample_grid", "system")?, grid_loc)?;
    let grid_num = |key: &str| -> Result<f64> {
        get(grid_obj, key, grid_loc)?
            .as_f64()
            .ok_or_else(|| bad(format!("{grid_loc}.{key}"), "expected a number"))
    };
    let grid = SampleGrid {
        start: grid_num("start")?,
        stop: grid_num("stop")?,
        step: grid_num("step")?,
    };
    let finite = grid.step.is_finite() && grid.start.is_finite() && grid.stop.is_finite();
    if !finite || grid.step <= 0.0 || grid.stop < grid.start {
        return Err(bad(grid_loc, "need finite bounds, step > 0, stop >= start"));
    }

    Ok(SystemDoc {
        dim,
        order_of_system: order_of_system as u8,
        backend,
        truncation_n,
        grid,
        f_coeffs,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::solve_first_order;

    const FLAT_DIM2: &str = r#"{
        "dimension": 2,
        "order": 6,
        "backend": "rational",
        "base_point": "0",
        "christoffel": [],
        "curve": [["0", "1"], ["0", "0", "1"]]
    }"#;

    #[test]
    fn flat_manifest_loads() {
        let scene = load_manifest(FLAT_DIM2).unwrap();
        assert_eq!(scene.dim(), 2);
        assert!(scene.connection.is_flat());
        assert!(scene.field.is_none());
        let v = scene.curve.coords()[1].coeff(2);
        assert_eq!(v, &Scalar::from_i64(1, Backend::Rational));
    }

    #[test]
    fn full_manifest_round_trips() {
        let text = r#"{
            "dimension": 2,
            "order": 8,
            "backend": "rational",
            "base_point": "1/2",
            "christoffel": [
                {"upper": 1, "lower": [1, 2], "poly": [
                    {"coeff": "3/2", "exponents": [1, 0]},
                    {"coeff": "-1", "exponents": [0, 2]}
                ]},
                {"upper": 2, "lower": [2, 1], "poly": [{"coeff": "2", "exponents": [0, 0]}]}
            ],
            "curve": [["0", "1"], ["1", "0", "-1/3"]],
            "field": {"p": 1, "q": 1, "components": {
                "1;1": ["1", "2"],
                "2;1": ["0", "0", "1/4"]
            }},
            "transition": {
                "forward": [
                    [{"coeff": "1", "exponents": [1, 0]}],
                    [{"coeff": "1", "exponents": [0, 1]}, {"coeff": "-1", "exponents": [2, 0]}]
                ],
                "inverse": [
                    [{"coeff": "1", "exponents": [1, 0]}],
                    [{"coeff": "1", "exponents": [0, 1]}, {"coeff": "1", "exponents": [2, 0]}]
                ]
            }
        }"#;
        let scene = load_manifest(text).unwrap();
        let emitted = emit_manifest(&scene).unwrap();
        let reloaded = load_manifest(&emitted).unwrap();
        assert_eq!(scene, reloaded);
        assert_eq!(emitted, emit_manifest(&reloaded).unwrap());
        assert_eq!(scene_digest(&scene).unwrap(), scene_digest(&reloaded).unwrap());
    }

    #[test]
    fn base_point_shift_is_exact() {
        let text = r#"{
            "dimension": 1,
            "order": 5,
            "backend": "rational",
            "base_point": "2",
            "christoffel": [],
            "curve": [["0", "0", "1"]]
        }"#;
        // x(s) = s^2 at base 2: coefficients 4, 4, 1 in (s - 2).
        let scene = load_manifest(text).unwrap();
        let jet = &scene.curve.coords()[0];
        let r = |n: i64| Scalar::from_i64(n, Backend::Rational);
        assert_eq!(jet.coeff(0), &r(4));
        assert_eq!(jet.coeff(1), &r(4));
        assert_eq!(jet.coeff(2), &r(1));
        assert_eq!(jet.coeff(3), &r(0));
        // And back out to global coefficients.
        assert_eq!(jet_to_coeffs(jet).unwrap(), vec!["0", "0", "1"]);
    }

    #[test]
    fn located_errors() {
        let cases: &[(&str, &str)] = &[
            (
                r#"{"dimension": 2, "order": 4, "backend": "rational", "base_point": "0",
                   "christoffel": [], "curve": [["0","1"]]}"#,
                "curve",
            ),
            (
                r#"{"dimension": 2, "order": 4, "backend": "rational", "base_point": "0",
                   "christoffel": [{"upper": 3, "lower": [1,1], "poly": []}],
                   "curve": [["0","1"],["0"]]}"#,
                "christoffel[0].upper",
            ),
            (
                r#"{"dimension": 1, "order": 2, "backend": "rational", "base_point": "0",
                   "christoffel": [], "curve": [["0","1","0","5"]]}"#,
                "curve[0]",
            ),
            (
                r#"{"dimension": 1, "order": 4, "backend": "rational", "base_point": "0",
                   "christoffel": [], "curve": [["0","1"]],
                   "field": {"p": 1, "q": 0, "components": {"1,2;": ["1"]}}}"#,
                "field.components",
            ),
        ];
        for (text, want_location) in cases {
            match load_manifest(text) {
                Err(Error::Manifest { location, .. }) => {
                    assert_eq!(&location, want_location, "in {text}");
                }
                other => panic!("expected located error for {want_location}, got {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_symbols_rejected() {
        let text = r#"{
            "dimension": 1, "order": 4, "backend": "rational", "base_point": "0",
            "christoffel": [
                {"upper": 1, "lower": [1, 1], "poly": [{"coeff": "1", "exponents": [0]}]},
                {"upper": 1, "lower": [1, 1], "poly": [{"coeff": "2", "exponents": [0]}]}
            ],
            "curve": [["0", "1"]]
        }"#;
        assert!(matches!(load_manifest(text), Err(Error::Manifest { .. })));
    }

    #[test]
    fn float_backend_manifest() {
        let text = r#"{
            "dimension": 1, "order": 4, "backend": "float64", "base_point": "0",
            "christoffel": [{"upper": 1, "lower": [1, 1], "poly": [{"coeff": "0.5", "exponents": [0]}]}],
            "curve": [["0", "1.5"]]
        }"#;
        let scene = load_manifest(text).unwrap();
        assert_eq!(scene.backend, Backend::Float64);
        assert_eq!(scene.curve.coords()[0].coeff(1), &Scalar::Float(1.5));
    }

    const UNIT_SYSTEM: &str = r#"{
        "dimension": 1,
        "order_of_system": 1,
        "backend": "float64",
        "f": [[["1"]]],
        "g": [[{"exponent": "0", "coeff": "1"}]],
        "truncation_N": 20,
        "sample_grid": {"start": 0.0, "stop": 1.0, "step": 0.1}
    }"#;

    #[test]
    fn system_doc_loads_and_solves() {
        let doc = load_system(UNIT_SYSTEM).unwrap();
        assert_eq!(doc.dim, 1);
        assert_eq!(doc.truncation_n, 20);
        let sys = doc.build(doc.truncation_n).unwrap();
        let out = solve_first_order(&sys, doc.truncation_n).unwrap();
        for &(s, ref row) in &out.samples {
            assert!((row[0] - (1.0 - (-s).exp())).abs() <= 1e-9);
        }
    }

    #[test]
    fn system_doc_errors_are_located() {
        let bad_rows = r#"{"dimension": 2, "order_of_system": 1,
            "f": [[["1"]]], "g": [[], []], "truncation_N": 5,
            "sample_grid": {"start": 0.0, "stop": 1.0, "step": 0.1}}"#;
        match load_system(bad_rows) {
            Err(Error::Manifest { location, .. }) => assert_eq!(location, "f"),
            other => panic!("{other:?}"),
        }
        let bad_order = r#"{"dimension": 1, "order_of_system": 3,
            "f": [[["1"]]], "g": [[]], "truncation_N": 5,
            "sample_grid": {"start": 0.0, "stop": 1.0, "step": 0.1}}"#;
        assert!(matches!(load_system(bad_order), Err(Error::Manifest { .. })));
    }
}
