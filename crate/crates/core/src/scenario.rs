//! JSON scenarios: validation into typed inputs and execution into a report.
//!
//! A scenario declares one group with its lattices and automorphisms, a matrix
//! dimension, named scalar atoms, named window sets built from atoms, named
//! operators, and an ordered task list. Validation collects every offending
//! field path before giving up.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bounds::{self, Tolerances};
use crate::construct;
use crate::error::{GofError, Result};
use crate::frame::GaborSystem;
use crate::group::{Automorphism, Element, FiniteAbelianGroup, MeasurePair, Subgroup, WeightConvention};
use crate::linalg::CMatrix;
use crate::operator::SpaceOperator;
use crate::perturb::{self, PertParams};
use crate::presets;
use crate::signal::{MatrixSignal, SignalSpace};

pub const TASK_NAMES: [&str; 9] = [
    "ordinary_bounds",
    "theta_bounds",
    "hyponormal",
    "adjointable",
    "tight_construct",
    "omega_check",
    "image_check",
    "pert_check",
    "sum_check",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    OrdinaryBounds { windows: String },
    ThetaBounds { windows: String, theta: String },
    Hyponormal { theta: String },
    Adjointable { theta: String },
    TightConstruct { lambda: f64, theta: String },
    OmegaCheck { windows: String, theta: String },
    ImageCheck { windows: String, theta: String, xi: Option<String> },
    PertCheck { windows: String, perturbed: String, theta: String, params: PertParams, paper_bounds: Option<(f64, f64)> },
    SumCheck { windows: String, psi: String, theta: String, paper_phi: Option<(f64, f64)>, paper_psi: Option<(f64, f64)> },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::OrdinaryBounds { .. } => "ordinary_bounds",
            Task::ThetaBounds { .. } => "theta_bounds",
            Task::Hyponormal { .. } => "hyponormal",
            Task::Adjointable { .. } => "adjointable",
            Task::TightConstruct { .. } => "tight_construct",
            Task::OmegaCheck { .. } => "omega_check",
            Task::ImageCheck { .. } => "image_check",
            Task::PertCheck { .. } => "pert_check",
            Task::SumCheck { .. } => "sum_check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Paper,
    Computed,
}

/// A constant the report must reproduce, addressed by JSON pointer into the results.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub label: String,
    pub path: String,
    pub expected: Value,
    pub tol: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: Option<String>,
    /// The resolved document, echoed into reports.
    pub document: Value,
    pub space: SignalSpace,
    pub lattice: Subgroup,
    pub dual_lattice: Subgroup,
    pub b: Automorphism,
    pub c: Automorphism,
    pub window_sets: BTreeMap<String, Vec<MatrixSignal>>,
    pub operators: BTreeMap<String, SpaceOperator>,
    pub tasks: Vec<Task>,
    pub expectations: Vec<Expectation>,
    pub tolerances: Option<Tolerances>,
}

struct Ctx {
    errs: Vec<String>,
}

impl Ctx {
    fn err(&mut self, path: &str, msg: impl std::fmt::Display) {
        self.errs.push(format!("{}: {msg}", if path.is_empty() { "/" } else { path }));
    }

    fn field<'a>(&mut self, obj: &'a Map<String, Value>, path: &str, key: &str) -> Option<&'a Value> {
        let v = obj.get(key);
        if v.is_none() {
            self.err(&format!("{path}/{key}"), "missing required field");
        }
        v
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a Map<String, Value>> {
        let o = v.as_object();
        if o.is_none() {
            self.err(path, "expected an object");
        }
        o
    }

    fn array<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a Vec<Value>> {
        let a = v.as_array();
        if a.is_none() {
            self.err(path, "expected an array");
        }
        a
    }

    fn string(&mut self, v: &Value, path: &str) -> Option<String> {
        let s = v.as_str().map(str::to_owned);
        if s.is_none() {
            self.err(path, "expected a string");
        }
        s
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        let x = v.as_f64().filter(|x| x.is_finite());
        if x.is_none() {
            self.err(path, "expected a finite number");
        }
        x
    }

    fn integer(&mut self, v: &Value, path: &str) -> Option<i64> {
        let x = v.as_i64();
        if x.is_none() {
            self.err(path, "expected an integer");
        }
        x
    }

    fn positive_usize(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64() {
            Some(x) if x >= 1 => Some(x as usize),
            _ => {
                self.err(path, "expected a positive integer");
                None
            }
        }
    }

    /// A number or a `[re, im]` pair.
    fn complex(&mut self, v: &Value, path: &str) -> Option<Complex64> {
        if let Some(x) = v.as_f64() {
            return Some(Complex64::new(x, 0.0));
        }
        if let Some([re, im]) = v.as_array().map(Vec::as_slice) {
            if let (Some(re), Some(im)) = (re.as_f64(), im.as_f64()) {
                return Some(Complex64::new(re, im));
            }
        }
        self.err(path, "expected a number or a [re, im] pair");
        None
    }

    fn complex_matrix(&mut self, v: &Value, path: &str, rows: usize, cols: usize) -> Option<CMatrix> {
        let outer = self.array(v, path)?;
        if outer.len() != rows {
            self.err(path, format!("expected {rows} rows, found {}", outer.len()));
            return None;
        }
        let mut m = CMatrix::zeros(rows, cols);
        let mut ok = true;
        for (r, row) in outer.iter().enumerate() {
            let rp = format!("{path}/{r}");
            let Some(row) = self.array(row, &rp) else {
                ok = false;
                continue;
            };
            if row.len() != cols {
                self.err(&rp, format!("expected {cols} entries, found {}", row.len()));
                ok = false;
                continue;
            }
            for (c, z) in row.iter().enumerate() {
                match self.complex(z, &format!("{rp}/{c}")) {
                    Some(z) => m[(r, c)] = z,
                    None => ok = false,
                }
            }
        }
        ok.then_some(m)
    }

    fn pair(&mut self, v: &Value, path: &str) -> Option<(f64, f64)> {
        match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => {
                let a = self.number(a, &format!("{path}/0"));
                let b = self.number(b, &format!("{path}/1"));
                Some((a?, b?))
            }
            _ => {
                self.err(path, "expected a [lower, upper] pair");
                None
            }
        }
    }

    fn unknown_keys(&mut self, obj: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&format!("{path}/{k}"), "unknown field");
            }
        }
    }

    /// An integer coordinate list, or a bare integer for rank-one groups.
    fn element(&mut self, g: &FiniteAbelianGroup, v: &Value, path: &str) -> Option<Element> {
        let coords: Vec<i64> = if let Some(x) = v.as_i64() {
            vec![x]
        } else {
            let arr = self.array(v, path)?;
            let mut out = Vec::with_capacity(arr.len());
            for (i, x) in arr.iter().enumerate() {
                out.push(self.integer(x, &format!("{path}/{i}"))?);
            }
            out
        };
        match g.element(&coords) {
            Ok(e) => Some(e),
            Err(e) => {
                self.err(path, e);
                None
            }
        }
    }
}

const TOP_KEYS: [&str; 12] = [
    "name", "description", "group", "n", "atoms", "window_sets", "operators", "tasks", "expect", "tolerances", "source", "$schema",
];

/// Expands a `"source"` preset reference, applying the remaining keys as overrides.
pub fn resolve_source(doc: &Value) -> Result<Value> {
    let Some(obj) = doc.as_object() else {
        return Err(GofError::Schema(vec!["/: expected an object".into()]));
    };
    let Some(src) = obj.get("source") else {
        return Ok(doc.clone());
    };
    let Some(name) = src.as_str() else {
        return Err(GofError::Schema(vec!["/source: expected a preset name".into()]));
    };
    presets::resolve(name, obj)
}

impl Scenario {
    /// Validates a scenario document; relative `data_file` paths resolve against `base_dir`.
    pub fn from_value(doc: &Value, base_dir: Option<&Path>) -> Result<Self> {
        let doc = resolve_source(doc)?;
        let mut cx = Ctx { errs: Vec::new() };
        let parsed = parse(&mut cx, &doc, base_dir);
        match parsed {
            Some(s) if cx.errs.is_empty() => Ok(s),
            _ => {
                if cx.errs.is_empty() {
                    cx.errs.push("/: invalid scenario".into());
                }
                Err(GofError::Schema(cx.errs))
            }
        }
    }

    pub fn from_json_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| {
            GofError::Schema(vec![format!("/: malformed JSON at line {} column {}: {e}", e.line(), e.column())])
        })?;
        Self::from_value(&doc, base_dir)
    }

    /// Scalar system for the construction task: the scenario lattice with its annihilator.
    pub fn parseval_source(&self) -> Result<GaborSystem> {
        construct::scalar_parseval_system(self.space.group(), *self.space.measure(), Some(self.lattice.clone()))
    }

    pub fn system(&self, windows: &str) -> Result<GaborSystem> {
        let w = self
            .window_sets
            .get(windows)
            .ok_or_else(|| GofError::Schema(vec![format!("unknown window set '{windows}'")]))?;
        GaborSystem::new(&self.space, w.clone(), self.lattice.clone(), self.dual_lattice.clone(), self.b.clone(), self.c.clone())
    }

    pub fn operator(&self, name: &str) -> Result<&SpaceOperator> {
        self.operators.get(name).ok_or_else(|| GofError::Schema(vec![format!("unknown operator '{name}'")]))
    }
}

fn parse(cx: &mut Ctx, doc: &Value, base_dir: Option<&Path>) -> Option<Scenario> {
    let root = cx.object(doc, "")?;
    cx.unknown_keys(root, "", &TOP_KEYS);
    let name = root.get("name").and_then(|v| cx.string(v, "/name"));
    if let Some(d) = root.get("description") {
        cx.string(d, "/description");
    }

    let Some((space, lattice, dual_lattice, b, c)) = parse_group(cx, root) else {
        // without a group nothing else can be built; still report what can be checked
        shallow_check(cx, root);
        return None;
    };
    let group = space.group().clone();

    let mut atoms: BTreeMap<String, Vec<Complex64>> = BTreeMap::new();
    if let Some(v) = root.get("atoms") {
        if let Some(obj) = cx.object(v, "/atoms") {
            for (k, a) in obj {
                if let Some(sig) = parse_atom(cx, &group, *space.measure(), a, &format!("/atoms/{k}")) {
                    atoms.insert(k.clone(), sig);
                }
            }
        }
    }

    let mut window_sets = BTreeMap::new();
    if let Some(v) = root.get("window_sets") {
        if let Some(obj) = cx.object(v, "/window_sets") {
            for (k, ws) in obj {
                let path = format!("/window_sets/{k}");
                let Some(list) = cx.array(ws, &path) else { continue };
                let mut windows = Vec::new();
                for (i, w) in list.iter().enumerate() {
                    if let Some(sig) = parse_window(cx, &space, &atoms, w, &format!("{path}/{i}")) {
                        windows.push(sig);
                    }
                }
                window_sets.insert(k.clone(), windows);
            }
        }
    }

    let mut operators = BTreeMap::new();
    if let Some(v) = root.get("operators") {
        if let Some(obj) = cx.object(v, "/operators") {
            for (k, o) in obj {
                if let Some(op) = parse_operator(cx, &space, o, &format!("/operators/{k}"), base_dir) {
                    operators.insert(k.clone(), op);
                }
            }
        }
    }

    let mut tasks = Vec::new();
    if let Some(v) = cx.field(root, "", "tasks") {
        if let Some(list) = cx.array(v, "/tasks") {
            if list.is_empty() {
                cx.err("/tasks", "at least one task is required");
            }
            for (i, t) in list.iter().enumerate() {
                if let Some(task) = parse_task(cx, t, &format!("/tasks/{i}"), &window_sets, &operators) {
                    tasks.push(task);
                }
            }
        }
    }

    let mut expectations = Vec::new();
    if let Some(v) = root.get("expect") {
        if let Some(list) = cx.array(v, "/expect") {
            for (i, e) in list.iter().enumerate() {
                if let Some(x) = parse_expectation(cx, e, &format!("/expect/{i}")) {
                    expectations.push(x);
                }
            }
        }
    }

    let tolerances = root.get("tolerances").and_then(|v| parse_tolerances(cx, v));

    Some(Scenario {
        name,
        document: doc.clone(),
        space,
        lattice,
        dual_lattice,
        b,
        c,
        window_sets,
        operators,
        tasks,
        expectations,
        tolerances,
    })
}

fn shallow_check(cx: &mut Ctx, root: &Map<String, Value>) {
    if let Some(list) = cx.field(root, "", "tasks").and_then(|v| cx.array(v, "/tasks")) {
        if list.is_empty() {
            cx.err("/tasks", "at least one task is required");
        }
        for (i, t) in list.iter().enumerate() {
            let path = format!("/tasks/{i}");
            let Some(obj) = cx.object(t, &path) else { continue };
            if let Some(name) = cx.field(obj, &path, "task").and_then(|t| cx.string(t, &format!("{path}/task"))) {
                if !TASK_NAMES.contains(&name.as_str()) {
                    cx.err(&format!("{path}/task"), format!("unknown task '{name}' (expected one of {})", TASK_NAMES.join(", ")));
                }
            }
        }
    }
    if let Some(list) = root.get("expect").and_then(|v| cx.array(v, "/expect")) {
        for (i, e) in list.iter().enumerate() {
            parse_expectation(cx, e, &format!("/expect/{i}"));
        }
    }
    if let Some(v) = root.get("tolerances") {
        parse_tolerances(cx, v);
    }
}

fn parse_group(
    cx: &mut Ctx,
    root: &Map<String, Value>,
) -> Option<(SignalSpace, Subgroup, Subgroup, Automorphism, Automorphism)> {
    let gv = cx.field(root, "", "group")?;
    let gobj = cx.object(gv, "/group")?;
    cx.unknown_keys(
        gobj,
        "/group",
        &["factors", "lattice_gens", "dual_lattice_gens", "automorphism", "dual_automorphism", "weight_convention"],
    );
    let factors_v = cx.field(gobj, "/group", "factors")?;
    let list = cx.array(factors_v, "/group/factors")?;
    let mut factors = Vec::new();
    for (i, f) in list.iter().enumerate() {
        factors.push(cx.positive_usize(f, &format!("/group/factors/{i}"))?);
    }
    let group = match FiniteAbelianGroup::new(factors) {
        Ok(g) => g,
        Err(e) => {
            cx.err("/group/factors", e);
            return None;
        }
    };
    let convention = match gobj.get("weight_convention") {
        None => WeightConvention::default(),
        Some(v) => match serde_json::from_value::<WeightConvention>(v.clone()) {
            Ok(c) => c,
            Err(_) => {
                cx.err("/group/weight_convention", "expected one of torus_like, counting, symmetric");
                WeightConvention::default()
            }
        },
    };
    let measure = MeasurePair::from_convention(convention, &group);

    let n = match root.get("n") {
        None => {
            cx.err("/n", "missing required field");
            None
        }
        Some(v) => cx.positive_usize(v, "/n"),
    };

    let gens = |cx: &mut Ctx, key: &str| -> Option<Option<Subgroup>> {
        let Some(v) = gobj.get(key) else { return Some(None) };
        let path = format!("/group/{key}");
        let list = cx.array(v, &path)?;
        let mut elems = Vec::new();
        for (i, e) in list.iter().enumerate() {
            elems.push(cx.element(&group, e, &format!("{path}/{i}"))?);
        }
        Some(Some(Subgroup::generated(&group, &elems).expect("checked elements")))
    };
    let lattice = gens(cx, "lattice_gens")?.unwrap_or_else(|| Subgroup::whole(&group));
    let dual_lattice = gens(cx, "dual_lattice_gens")?.unwrap_or_else(|| lattice.annihilator());

    let auto = |cx: &mut Ctx, key: &str| -> Option<Automorphism> {
        let Some(v) = gobj.get(key) else { return Some(Automorphism::identity(&group)) };
        let path = format!("/group/{key}");
        let list = cx.array(v, &path)?;
        let res = if list.iter().all(Value::is_array) {
            let mut matrix = Vec::new();
            for (r, row) in list.iter().enumerate() {
                let row = row.as_array().expect("checked");
                let mut out = Vec::new();
                for (c, x) in row.iter().enumerate() {
                    out.push(cx.integer(x, &format!("{path}/{r}/{c}"))?);
                }
                matrix.push(out);
            }
            Automorphism::from_matrix(&group, matrix)
        } else {
            let mut units = Vec::new();
            for (i, x) in list.iter().enumerate() {
                units.push(cx.integer(x, &format!("{path}/{i}"))?);
            }
            Automorphism::diagonal(&group, &units)
        };
        match res {
            Ok(a) => Some(a),
            Err(e) => {
                cx.err(&path, e);
                None
            }
        }
    };
    let b = auto(cx, "automorphism");
    let c = auto(cx, "dual_automorphism");
    let space = SignalSpace::new(group.clone(), n?, measure).ok()?;
    Some((space, lattice, dual_lattice, b?, c?))
}

fn index_set(cx: &mut Ctx, g: &FiniteAbelianGroup, v: &Value, path: &str) -> Option<Vec<usize>> {
    let list = cx.array(v, path)?;
    let mut out = Vec::new();
    let mut ok = true;
    for (i, e) in list.iter().enumerate() {
        match cx.element(g, e, &format!("{path}/{i}")) {
            Some(e) => out.push(g.index_of(&e)),
            None => ok = false,
        }
    }
    ok.then_some(out)
}

fn parse_atom(cx: &mut Ctx, g: &FiniteAbelianGroup, m: MeasurePair, v: &Value, path: &str) -> Option<Vec<Complex64>> {
    let obj = cx.object(v, path)?;
    if let Some(values) = obj.get("values") {
        cx.unknown_keys(obj, path, &["values"]);
        let list = cx.array(values, &format!("{path}/values"))?;
        if list.len() != g.order() {
            cx.err(&format!("{path}/values"), format!("expected {} samples, found {}", g.order(), list.len()));
            return None;
        }
        let mut out = Vec::new();
        for (i, z) in list.iter().enumerate() {
            out.push(cx.complex(z, &format!("{path}/values/{i}"))?);
        }
        return Some(out);
    }
    cx.unknown_keys(obj, path, &["window", "set", "scale"]);
    let kind = cx.field(obj, path, "window").and_then(|k| cx.string(k, &format!("{path}/window")))?;
    let set = cx.field(obj, path, "set").and_then(|s| index_set(cx, g, s, &format!("{path}/set")))?;
    let scale = match obj.get("scale") {
        Some(s) => cx.complex(s, &format!("{path}/scale"))?,
        None => Complex64::new(1.0, 0.0),
    };
    let mut ind = vec![Complex64::new(0.0, 0.0); g.order()];
    for i in set {
        ind[i] = scale;
    }
    match kind.as_str() {
        "indicator" => Some(ind),
        // the indicator lives on the dual side; pull it back to G
        "fourier_indicator" => Some(g.inverse_fourier(&m, &ind).expect("sized to the group")),
        other => {
            cx.err(&format!("{path}/window"), format!("unknown window kind '{other}' (expected indicator or fourier_indicator)"));
            None
        }
    }
}

fn parse_window(
    cx: &mut Ctx,
    space: &SignalSpace,
    atoms: &BTreeMap<String, Vec<Complex64>>,
    v: &Value,
    path: &str,
) -> Option<MatrixSignal> {
    let n = space.n();
    let order = space.group().order();
    if let Some(obj) = v.as_object() {
        cx.unknown_keys(obj, path, &["values"]);
        let vals = cx.field(obj, path, "values")?;
        let list = cx.array(vals, &format!("{path}/values"))?;
        if list.len() != order {
            cx.err(&format!("{path}/values"), format!("expected {order} samples, found {}", list.len()));
            return None;
        }
        let mut data = Vec::with_capacity(space.dim());
        for (x, m) in list.iter().enumerate() {
            let m = cx.complex_matrix(m, &format!("{path}/values/{x}"), n, n)?;
            for i in 0..n {
                for j in 0..n {
                    data.push(m[(i, j)]);
                }
            }
        }
        return MatrixSignal::from_data(space, data).ok();
    }
    let rows = cx.array(v, path)?;
    if rows.len() != n {
        cx.err(path, format!("expected {n} rows of atom references, found {}", rows.len()));
        return None;
    }
    let mut entries: Vec<Vec<Option<Vec<Complex64>>>> = Vec::new();
    let mut ok = true;
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}/{i}");
        let Some(row) = cx.array(row, &rp) else {
            ok = false;
            continue;
        };
        if row.len() != n {
            cx.err(&rp, format!("expected {n} entries, found {}", row.len()));
            ok = false;
            continue;
        }
        let mut out = Vec::new();
        for (j, e) in row.iter().enumerate() {
            let ep = format!("{rp}/{j}");
            let (name, scale) = match e {
                Value::String(s) => (s.clone(), Complex64::new(1.0, 0.0)),
                Value::Object(o) => {
                    cx.unknown_keys(o, &ep, &["atom", "scale"]);
                    let Some(name) = cx.field(o, &ep, "atom").and_then(|a| cx.string(a, &format!("{ep}/atom"))) else {
                        ok = false;
                        continue;
                    };
                    let scale = match o.get("scale") {
                        Some(s) => cx.complex(s, &format!("{ep}/scale")).unwrap_or_default(),
                        None => Complex64::new(1.0, 0.0),
                    };
                    (name, scale)
                }
                _ => {
                    cx.err(&ep, "expected \"0\", an atom name, or {\"atom\", \"scale\"}");
                    ok = false;
                    continue;
                }
            };
            if name == "0" {
                out.push(None);
            } else if let Some(a) = atoms.get(&name) {
                out.push(Some(a.iter().map(|z| z * scale).collect()));
            } else {
                cx.err(&ep, format!("unknown atom '{name}'"));
                ok = false;
            }
        }
        entries.push(out);
    }
    if !ok {
        return None;
    }
    let refs: Vec<Vec<Option<&[Complex64]>>> =
        entries.iter().map(|row| row.iter().map(|e| e.as_deref()).collect()).collect();
    MatrixSignal::from_components(space, &refs).ok()
}

fn parse_operator(cx: &mut Ctx, space: &SignalSpace, v: &Value, path: &str, base_dir: Option<&Path>) -> Option<SpaceOperator> {
    let obj = cx.object(v, path)?;
    let kind = cx.field(obj, path, "kind").and_then(|k| cx.string(k, &format!("{path}/kind")))?;
    let n = space.n();
    match kind.as_str() {
        "identity" => {
            cx.unknown_keys(obj, path, &["kind"]);
            Some(SpaceOperator::identity(space))
        }
        "entry_map" => {
            cx.unknown_keys(obj, path, &["kind", "n", "matrix"]);
            if let Some(nv) = obj.get("n") {
                if cx.positive_usize(nv, &format!("{path}/n")) != Some(n) {
                    cx.err(&format!("{path}/n"), format!("entry map dimension must equal the scenario n = {n}"));
                    return None;
                }
            }
            let m = cx.field(obj, path, "matrix")?;
            let l = cx.complex_matrix(m, &format!("{path}/matrix"), n * n, n * n)?;
            SpaceOperator::entry_map(space, l).ok()
        }
        "right_multiplication" => {
            cx.unknown_keys(obj, path, &["kind", "matrix"]);
            let m = cx.field(obj, path, "matrix")?;
            let a = cx.complex_matrix(m, &format!("{path}/matrix"), n, n)?;
            SpaceOperator::right_multiplication(space, &a).ok()
        }
        "dense" => {
            cx.unknown_keys(obj, path, &["kind", "data_file"]);
            let file = cx.field(obj, path, "data_file").and_then(|f| cx.string(f, &format!("{path}/data_file")))?;
            let full = match base_dir {
                Some(dir) => dir.join(&file),
                None => Path::new(&file).to_path_buf(),
            };
            let bytes = match std::fs::read(&full) {
                Ok(b) => b,
                Err(e) => {
                    cx.err(&format!("{path}/data_file"), format!("cannot read {}: {e}", full.display()));
                    return None;
                }
            };
            match SpaceOperator::from_dense_bytes(space, &bytes) {
                Ok(op) => Some(op),
                Err(e) => {
                    cx.err(&format!("{path}/data_file"), e);
                    None
                }
            }
        }
        other => {
            cx.err(
                &format!("{path}/kind"),
                format!("unknown operator kind '{other}' (expected entry_map, right_multiplication, dense, identity)"),
            );
            None
        }
    }
}

fn parse_task(
    cx: &mut Ctx,
    v: &Value,
    path: &str,
    windows: &BTreeMap<String, Vec<MatrixSignal>>,
    operators: &BTreeMap<String, SpaceOperator>,
) -> Option<Task> {
    let obj = cx.object(v, path)?;
    let name = cx.field(obj, path, "task").and_then(|t| cx.string(t, &format!("{path}/task")))?;
    let win = |cx: &mut Ctx, key: &str| -> Option<String> {
        let s = cx.field(obj, path, key).and_then(|w| cx.string(w, &format!("{path}/{key}")))?;
        if !windows.contains_key(&s) {
            cx.err(&format!("{path}/{key}"), format!("unknown window set '{s}'"));
            return None;
        }
        Some(s)
    };
    let op = |cx: &mut Ctx, key: &str| -> Option<String> {
        let s = cx.field(obj, path, key).and_then(|w| cx.string(w, &format!("{path}/{key}")))?;
        if !operators.contains_key(&s) {
            cx.err(&format!("{path}/{key}"), format!("unknown operator '{s}'"));
            return None;
        }
        Some(s)
    };
    let num = |cx: &mut Ctx, key: &str, default: Option<f64>| -> Option<f64> {
        match (obj.get(key), default) {
            (Some(v), _) => cx.number(v, &format!("{path}/{key}")),
            (None, Some(d)) => Some(d),
            (None, None) => {
                cx.err(&format!("{path}/{key}"), "missing required field");
                None
            }
        }
    };
    let use_paper = match obj.get("use_paper_bounds") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            cx.err(&format!("{path}/use_paper_bounds"), "expected a boolean");
            false
        }
    };
    let pinned = |cx: &mut Ctx, key: &str| -> Option<Option<(f64, f64)>> {
        match obj.get(key) {
            Some(v) => Some(Some(cx.pair(v, &format!("{path}/{key}"))?)),
            None if use_paper => {
                cx.err(&format!("{path}/{key}"), "required when use_paper_bounds is true");
                None
            }
            None => Some(None),
        }
    };
    let keys: &[&str] = match name.as_str() {
        "ordinary_bounds" => &["task", "label", "windows"],
        "theta_bounds" | "omega_check" => &["task", "label", "windows", "theta"],
        "hyponormal" | "adjointable" => &["task", "label", "theta"],
        "tight_construct" => &["task", "label", "lambda", "theta"],
        "image_check" => &["task", "label", "windows", "theta", "xi"],
        "pert_check" => &["task", "label", "windows", "perturbed", "theta", "lambda", "mu", "eta", "use_paper_bounds", "paper_bounds"],
        "sum_check" => &["task", "label", "windows", "psi", "theta", "use_paper_bounds", "paper_bounds_phi", "paper_bounds_psi"],
        other => {
            cx.err(&format!("{path}/task"), format!("unknown task '{other}' (expected one of {})", TASK_NAMES.join(", ")));
            return None;
        }
    };
    cx.unknown_keys(obj, path, keys);
    if let Some(l) = obj.get("label") {
        cx.string(l, &format!("{path}/label"));
    }
    let task = match name.as_str() {
        "ordinary_bounds" => Task::OrdinaryBounds { windows: win(cx, "windows")? },
        "theta_bounds" => {
            let (w, t) = (win(cx, "windows"), op(cx, "theta"));
            Task::ThetaBounds { windows: w?, theta: t? }
        }
        "omega_check" => {
            let (w, t) = (win(cx, "windows"), op(cx, "theta"));
            Task::OmegaCheck { windows: w?, theta: t? }
        }
        "hyponormal" => Task::Hyponormal { theta: op(cx, "theta")? },
        "adjointable" => Task::Adjointable { theta: op(cx, "theta")? },
        "tight_construct" => {
            let lambda = num(cx, "lambda", None);
            let theta = op(cx, "theta");
            let lambda = lambda?;
            if !(lambda > 0.0) {
                cx.err(&format!("{path}/lambda"), "must be positive");
                return None;
            }
            Task::TightConstruct { lambda, theta: theta? }
        }
        "image_check" => {
            let w = win(cx, "windows");
            let t = op(cx, "theta");
            let xi = obj.contains_key("xi").then(|| op(cx, "xi"));
            let xi = match xi {
                Some(x) => Some(x?),
                None => None,
            };
            Task::ImageCheck { windows: w?, theta: t?, xi }
        }
        "pert_check" => {
            let w = win(cx, "windows");
            let p = win(cx, "perturbed");
            let t = op(cx, "theta");
            let lambda = num(cx, "lambda", Some(0.0));
            let mu = num(cx, "mu", Some(0.0));
            let eta = num(cx, "eta", Some(0.0));
            let paper = pinned(cx, "paper_bounds");
            let params = PertParams { lambda: lambda?, mu: mu?, eta: eta? };
            for (k, x) in [("lambda", params.lambda), ("mu", params.mu), ("eta", params.eta)] {
                if x < 0.0 {
                    cx.err(&format!("{path}/{k}"), "must be nonnegative");
                }
            }
            let paper = paper?;
            Task::PertCheck {
                windows: w?,
                perturbed: p?,
                theta: t?,
                params,
                paper_bounds: if use_paper { paper } else { None },
            }
        }
        "sum_check" => {
            let w = win(cx, "windows");
            let p = win(cx, "psi");
            let t = op(cx, "theta");
            let a = pinned(cx, "paper_bounds_phi");
            let b = pinned(cx, "paper_bounds_psi");
            let (a, b) = (a?, b?);
            Task::SumCheck {
                windows: w?,
                psi: p?,
                theta: t?,
                paper_phi: if use_paper { a } else { None },
                paper_psi: if use_paper { b } else { None },
            }
        }
        _ => unreachable!("filtered above"),
    };
    Some(task)
}

fn parse_expectation(cx: &mut Ctx, v: &Value, path: &str) -> Option<Expectation> {
    let obj = cx.object(v, path)?;
    cx.unknown_keys(obj, path, &["label", "path", "value", "tol", "provenance"]);
    let label = cx.field(obj, path, "label").and_then(|l| cx.string(l, &format!("{path}/label")));
    let ptr = cx.field(obj, path, "path").and_then(|l| cx.string(l, &format!("{path}/path")));
    let expected = cx.field(obj, path, "value").cloned();
    if let Some(e) = &expected {
        if !(e.is_number() || e.is_boolean() || e.is_null()) {
            cx.err(&format!("{path}/value"), "expected a number, boolean or null");
        }
    }
    let tol = match obj.get("tol") {
        Some(t) => cx.number(t, &format!("{path}/tol"))?,
        None => 1e-9,
    };
    let provenance = match obj.get("provenance").and_then(Value::as_str) {
        None | Some("computed") => Provenance::Computed,
        Some("paper") => Provenance::Paper,
        Some(_) => {
            cx.err(&format!("{path}/provenance"), "expected \"paper\" or \"computed\"");
            Provenance::Computed
        }
    };
    Some(Expectation { label: label?, path: ptr?, expected: expected?, tol, provenance })
}

fn parse_tolerances(cx: &mut Ctx, v: &Value) -> Option<Tolerances> {
    let obj = cx.object(v, "/tolerances")?;
    cx.unknown_keys(obj, "/tolerances", &["psd", "kernel", "bisection"]);
    let mut t = Tolerances::default();
    for (key, slot) in [("psd", &mut t.psd), ("kernel", &mut t.kernel), ("bisection", &mut t.bisection)] {
        if let Some(x) = obj.get(key) {
            match cx.number(x, &format!("/tolerances/{key}")) {
                Some(x) if x > 0.0 => *slot = x,
                Some(_) => cx.err(&format!("/tolerances/{key}"), "must be positive"),
                None => {}
            }
        }
    }
    Some(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub label: String,
    pub path: String,
    pub expected: Value,
    pub actual: Value,
    pub tol: f64,
    pub pass: bool,
    pub provenance: Provenance,
}

/// Everything a run produces; timing is kept apart so reports can be compared bytewise.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub results: Vec<Value>,
    pub checks: Vec<CheckOutcome>,
    pub findings: Vec<String>,
    /// `(task index, ascending spectrum)` for every task that computed a frame operator.
    pub spectra: Vec<(usize, Vec<f64>)>,
    pub task_seconds: Vec<f64>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run_task(sc: &Scenario, task: &Task, tol: Tolerances, spectrum: &mut Option<Vec<f64>>, findings: &mut Vec<String>) -> Result<Value> {
    let mut out = Map::new();
    match task {
        Task::OrdinaryBounds { windows } => {
            let sys = sc.system(windows)?;
            let b = bounds::family_ordinary_bounds(sys.family(), tol);
            *spectrum = Some(b.spectrum.clone());
            out.insert("windows".into(), json!(windows));
            out.insert("family_size".into(), json!(sys.family().len()));
            out.insert("bounds".into(), to_value(&b));
        }
        Task::ThetaBounds { windows, theta } => {
            let sys = sc.system(windows)?;
            let op = sc.operator(theta)?;
            let s = sys.frame_operator().to_dense();
            let td = op.to_dense();
            let b = bounds::pencil_bounds(&s, &td, tol);
            *spectrum = Some(b.spectrum.clone());
            let promo = bounds::bounded_below_promotion(&s, &td, tol);
            out.insert("windows".into(), json!(windows));
            out.insert("theta".into(), json!(theta));
            out.insert("theta_norm".into(), json!(op.operator_norm()));
            out.insert("theta_adjoint_lower_bound".into(), json!(op.adjoint().lower_bound_constant()));
            out.insert("bounds".into(), to_value(&b));
            out.insert("promotion".into(), to_value(&promo));
        }
        Task::Hyponormal { theta } | Task::Adjointable { theta } => {
            let op = sc.operator(theta)?;
            out.insert("theta".into(), json!(theta));
            out.insert("diagnostics".into(), to_value(&op.diagnostics(tol.psd)));
        }
        Task::TightConstruct { lambda, theta } => {
            let op = sc.operator(theta)?;
            let scalar = sc.parseval_source()?;
            let t = construct::tight_theta_frame(*lambda, &scalar, sc.space.n(), op, tol)?;
            *spectrum = Some(t.image_theta_bounds.spectrum.clone());
            if !t.hypotheses_hold {
                findings.push(format!("tight_construct: Θ '{theta}' is not both hyponormal and mv-adjointable"));
            }
            out.insert("theta".into(), json!(theta));
            out.insert("construction".into(), to_value(&t));
        }
        Task::OmegaCheck { windows, theta } => {
            let sys = sc.system(windows)?;
            let op = sc.operator(theta)?;
            let o = construct::omega_characterization(sys.family(), op, tol)?;
            let direct = bounds::family_theta_bounds(sys.family(), op, tol)?;
            *spectrum = Some(o.bounds.spectrum.clone());
            let agree = o.lower_exists() == direct.lower_exists && o.upper_exists() == direct.upper_exists;
            if !agree {
                findings.push("omega_check: Ω route and frame-operator route disagree on existence".into());
            }
            out.insert("windows".into(), json!(windows));
            out.insert("theta".into(), json!(theta));
            out.insert("omega".into(), to_value(&o));
            out.insert("theta_bounds".into(), to_value(&direct));
            out.insert("verdicts_agree".into(), json!(agree));
        }
        Task::ImageCheck { windows, theta, xi } => {
            let sys = sc.system(windows)?;
            let op = sc.operator(theta)?;
            out.insert("windows".into(), json!(windows));
            out.insert("theta".into(), json!(theta));
            match xi {
                None => {
                    let r = construct::image_check(sys.family(), op, tol)?;
                    *spectrum = Some(r.image_bounds.spectrum.clone());
                    out.insert("image".into(), to_value(&r));
                }
                Some(x) => {
                    let xo = sc.operator(x)?;
                    let r = construct::composite_image_check(sys.family(), op, xo, tol)?;
                    *spectrum = Some(r.composite_bounds.spectrum.clone());
                    out.insert("xi".into(), json!(x));
                    out.insert("composite".into(), to_value(&r));
                }
            }
        }
        Task::PertCheck { windows, perturbed, theta, params, paper_bounds } => {
            let a = sc.system(windows)?;
            let b = sc.system(perturbed)?;
            let op = sc.operator(theta)?;
            let r = perturb::check_pert(a.family(), b.family(), op, *params, *paper_bounds, tol)?;
            *spectrum = Some(r.perturbed_bounds.spectrum.clone());
            findings.extend(r.findings.iter().map(|f| format!("pert_check: {f}")));
            out.insert("windows".into(), json!(windows));
            out.insert("perturbed".into(), json!(perturbed));
            out.insert("theta".into(), json!(theta));
            out.insert("pert".into(), to_value(&r));
        }
        Task::SumCheck { windows, psi, theta, paper_phi, paper_psi } => {
            let a = sc.system(windows)?;
            let b = sc.system(psi)?;
            let op = sc.operator(theta)?;
            let psi_bounds = bounds::family_theta_bounds(b.family(), op, tol)?;
            let r = perturb::check_sum(a.family(), b.family(), op, *paper_phi, *paper_psi, tol)?;
            *spectrum = Some(r.summed_bounds.spectrum.clone());
            findings.extend(r.findings.iter().map(|f| format!("sum_check: {f}")));
            out.insert("windows".into(), json!(windows));
            out.insert("psi".into(), json!(psi));
            out.insert("theta".into(), json!(theta));
            out.insert("psi_bounds".into(), to_value(&psi_bounds));
            out.insert("sum".into(), to_value(&r));
        }
    }
    Ok(Value::Object(out))
}

fn compare(expected: &Value, actual: &Value, tol: f64) -> bool {
    match (expected, actual) {
        (Value::Number(e), Value::Number(a)) => {
            let (e, a) = (e.as_f64().unwrap_or(f64::NAN), a.as_f64().unwrap_or(f64::NAN));
            (e - a).abs() <= tol
        }
        (e, a) => e == a,
    }
}

/// Executes every task in order and evaluates the expectations.
pub fn run(sc: &Scenario, tol: Tolerances) -> RunOutput {
    let mut results = Vec::new();
    let mut findings = Vec::new();
    let mut spectra = Vec::new();
    let mut task_seconds = Vec::new();
    for (i, task) in sc.tasks.iter().enumerate() {
        let start = Instant::now();
        let mut spectrum = None;
        let mut entry = match run_task(sc, task, tol, &mut spectrum, &mut findings) {
            Ok(Value::Object(m)) => m,
            Ok(_) => unreachable!("tasks return objects"),
            Err(e) => {
                findings.push(format!("task {i} ({}): {e}", task.name()));
                let mut m = Map::new();
                m.insert("error".into(), json!(e.to_string()));
                m
            }
        };
        let label = sc.document.pointer(&format!("/tasks/{i}/label")).cloned();
        let mut head = Map::new();
        head.insert("task".into(), json!(task.name()));
        if let Some(l) = label {
            head.insert("label".into(), l);
        }
        head.append(&mut entry);
        results.push(Value::Object(head));
        if let Some(s) = spectrum {
            spectra.push((i, s));
        }
        task_seconds.push(start.elapsed().as_secs_f64());
    }
    let wrapped = json!({ "tasks": results });
    let checks: Vec<CheckOutcome> = sc
        .expectations
        .iter()
        .map(|e| {
            let actual = wrapped.pointer(&e.path).cloned().unwrap_or(Value::Null);
            let pass = compare(&e.expected, &actual, e.tol);
            CheckOutcome {
                label: e.label.clone(),
                path: e.path.clone(),
                expected: e.expected.clone(),
                actual,
                tol: e.tol,
                pass,
                provenance: e.provenance,
            }
        })
        .collect();
    for c in checks.iter().filter(|c| !c.pass) {
        findings.push(format!("expectation '{}' failed: expected {} got {}", c.label, c.expected, c.actual));
    }
    RunOutput { results, checks, findings, spectra, task_seconds }
}

/// Full report document. Timing is the only nondeterministic part and lives under `"timing"`.
pub fn report(sc: &Scenario, tol: Tolerances, out: &RunOutput) -> Value {
    json!({
        "toolkit_version": crate::VERSION,
        "scenario": sc.document,
        "tolerances": tol,
        "results": { "tasks": out.results },
        "checks": out.checks,
        "all_checks_pass": out.checks.iter().all(|c| c.pass),
        "findings": out.findings,
        "timing": {
            "total_seconds": out.task_seconds.iter().sum::<f64>(),
            "task_seconds": out.task_seconds,
        },
    })
}

/// Report without the `"timing"` member, for reproducibility comparisons.
pub fn strip_timing(report: &Value) -> Value {
    let mut r = report.clone();
    if let Some(o) = r.as_object_mut() {
        o.remove("timing");
    }
    r
}
