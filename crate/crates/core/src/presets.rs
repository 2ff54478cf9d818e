//! Built-in scenarios reproducing the worked examples of the theory.
//!
//! Continuous examples are replaced by finite analogs on `Z_{8M}` with
//! `Λ = M·Z_{8M}`, `Λ′ = Λ⊥ = 8·Z_{8M}` and windows given by indicators on the
//! Fourier side: `φ̂1 = χ_{0..7}`, `φ̂2 = ½·χ_{0..7}`.

use serde_json::{json, Map, Value};

use crate::error::{GofError, Result};

pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: [PresetInfo; 10] = [
    PresetInfo { name: "exb1", description: "scalar Gabor systems on Z_{8M}: the φ1-system is 8-tight, the φ2-system 2-tight (param M, default 2)" },
    PresetInfo { name: "remark-theta0", description: "windows [[0,φ],[0,φ]]: no ordinary frame, but 20-tight for the column selector Θ0" },
    PresetInfo { name: "exper1-negative", description: "10-tight flip-window system; the f11 projection admits no upper (Θ,Θ*) bound" },
    PresetInfo { name: "pertexa", description: "(Θ,Θ*) bounds (5/2, 10) and the perturbation theorem with λ=0, μ=η=1/5" },
    PresetInfo { name: "sumexa", description: "window-sum theorem: Ψ has bounds (1/10, 2/5), predicted interval ((√2.5−2√0.4)², 20.8)" },
    PresetInfo { name: "ex2-negative", description: "flip Θ gives a 10-tight (Θ,Θ*) frame, yet the column-selector image fails for ΞΘ" },
    PresetInfo { name: "thm2-tight", description: "λ-tight (Θ,Θ*) frames from a Parseval system on Z_8 for λ ∈ {0.5, 1, 3, 7}" },
    PresetInfo { name: "ex-after-thm2", description: "3×3 windows on Z_8 with the zero-middle-column Θ: 3-(Θ,Θ*)-tight" },
    PresetInfo { name: "prop1a-image", description: "images of the 10-tight system under adjointable and flip operators keep (10, 10)" },
    PresetInfo { name: "omega-check", description: "synthesis-operator characterisation on the pertexa and exper1 systems" },
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

fn cyclic_group(m: usize) -> Value {
    json!({
        "factors": [8 * m],
        "lattice_gens": [[m]],
        "dual_lattice_gens": [[8]],
        "weight_convention": "torus_like"
    })
}

fn atoms() -> Value {
    json!({
        "phi1": {"window": "fourier_indicator", "set": [0, 1, 2, 3, 4, 5, 6, 7], "scale": 1.0},
        "phi2": {"window": "fourier_indicator", "set": [0, 1, 2, 3, 4, 5, 6, 7], "scale": 0.5}
    })
}

fn scaled(atom: &str, s: f64) -> Value {
    json!({"atom": atom, "scale": s})
}

fn exper1_windows() -> Value {
    json!([
        [["0", "phi1"], ["phi2", "0"]],
        [["0", "phi2"], ["phi1", "0"]]
    ])
}

/// Row-major `vec(f)` order is `(f11, f12, f21, f22)`.
fn entry_map(matrix: Value) -> Value {
    json!({"kind": "entry_map", "n": 2, "matrix": matrix})
}

fn column_selector() -> Value {
    entry_map(json!([[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]]))
}

fn flip() -> Value {
    entry_map(json!([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]))
}

fn pertexa_theta() -> Value {
    entry_map(json!([[0, 0, 0, 2], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]))
}

fn expect(label: &str, path: &str, value: Value, provenance: &str) -> Value {
    json!({"label": label, "path": path, "value": value, "tol": 1e-9, "provenance": provenance})
}

fn exb1(m: usize) -> Value {
    json!({
        "name": "exb1",
        "description": format!("scalar Gabor systems on Z_{}", 8 * m),
        "group": cyclic_group(m),
        "n": 1,
        "atoms": atoms(),
        "window_sets": {"phi1": [[["phi1"]]], "phi2": [[["phi2"]]]},
        "tasks": [
            {"task": "ordinary_bounds", "windows": "phi1", "label": "φ1-system"},
            {"task": "ordinary_bounds", "windows": "phi2", "label": "φ2-system"}
        ],
        "expect": [
            expect("φ1 lower bound", "/tasks/0/bounds/alpha_opt", json!(8.0), "paper"),
            expect("φ1 upper bound", "/tasks/0/bounds/beta_opt", json!(8.0), "paper"),
            expect("φ1 tight", "/tasks/0/bounds/tight", json!(true), "paper"),
            expect("φ2 lower bound", "/tasks/1/bounds/alpha_opt", json!(2.0), "paper"),
            expect("φ2 upper bound", "/tasks/1/bounds/beta_opt", json!(2.0), "paper"),
            expect("φ2 tight", "/tasks/1/bounds/tight", json!(true), "paper")
        ]
    })
}

fn remark_theta0() -> Value {
    json!({
        "name": "remark-theta0",
        "group": cyclic_group(2),
        "n": 2,
        "atoms": atoms(),
        "window_sets": {"phi": [[["0", "phi1"], ["0", "phi1"]], [["0", "phi2"], ["0", "phi2"]]]},
        "operators": {"theta0": column_selector()},
        "tasks": [
            {"task": "ordinary_bounds", "windows": "phi"},
            {"task": "theta_bounds", "windows": "phi", "theta": "theta0"},
            {"task": "hyponormal", "theta": "theta0"}
        ],
        "expect": [
            expect("no ordinary lower bound", "/tasks/0/bounds/lower_exists", json!(false), "paper"),
            expect("α for Θ0", "/tasks/1/bounds/alpha_opt", json!(20.0), "paper"),
            expect("β for Θ0", "/tasks/1/bounds/beta_opt", json!(20.0), "paper"),
            expect("Θ0 self-adjoint hence hyponormal", "/tasks/2/diagnostics/is_hyponormal", json!(true), "computed")
        ]
    })
}

fn exper1_negative() -> Value {
    json!({
        "name": "exper1-negative",
        "group": cyclic_group(2),
        "n": 2,
        "atoms": atoms(),
        "window_sets": {"phi": exper1_windows()},
        "operators": {"keep11": entry_map(json!([[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))},
        "tasks": [
            {"task": "ordinary_bounds", "windows": "phi"},
            {"task": "theta_bounds", "windows": "phi", "theta": "keep11"},
            {"task": "adjointable", "theta": "keep11"},
            {"task": "omega_check", "windows": "phi", "theta": "keep11"}
        ],
        "expect": [
            expect("ordinary lower bound", "/tasks/0/bounds/alpha_opt", json!(10.0), "paper"),
            expect("ordinary upper bound", "/tasks/0/bounds/beta_opt", json!(10.0), "paper"),
            expect("no upper (Θ,Θ*) bound", "/tasks/1/bounds/upper_exists", json!(false), "paper"),
            expect("not mv-adjointable", "/tasks/2/diagnostics/is_mv_adjointable", json!(false), "paper"),
            expect("Ω route: no upper bound", "/tasks/3/omega/bounds/upper_exists", json!(false), "paper"),
            expect("Ω agrees with frame operator", "/tasks/3/verdicts_agree", json!(true), "computed")
        ]
    })
}

fn pertexa_tilde() -> Value {
    json!([
        [[scaled("phi1", 0.2), "phi1"], ["phi2", scaled("phi2", 0.2)]],
        [[scaled("phi2", 0.2), "phi2"], ["phi1", scaled("phi1", 0.2)]]
    ])
}

fn pertexa() -> Value {
    json!({
        "name": "pertexa",
        "group": cyclic_group(2),
        "n": 2,
        "atoms": atoms(),
        "window_sets": {"phi": exper1_windows(), "tilde": pertexa_tilde()},
        "operators": {"theta": pertexa_theta()},
        "tasks": [
            {"task": "theta_bounds", "windows": "phi", "theta": "theta"},
            {"task": "hyponormal", "theta": "theta"},
            {"task": "pert_check", "windows": "phi", "perturbed": "tilde", "theta": "theta",
             "lambda": 0.0, "mu": 0.2, "eta": 0.2, "use_paper_bounds": true, "paper_bounds": [2.5, 10.0]},
            {"task": "theta_bounds", "windows": "tilde", "theta": "theta"}
        ],
        "expect": [
            expect("γ1", "/tasks/0/bounds/alpha_opt", json!(2.5), "paper"),
            expect("δ1", "/tasks/0/bounds/beta_opt", json!(10.0), "paper"),
            expect("‖Θ‖", "/tasks/0/theta_norm", json!(2.0), "paper"),
            expect("m_o", "/tasks/0/theta_adjoint_lower_bound", json!(1.0), "paper"),
            expect("Θ not hyponormal", "/tasks/1/diagnostics/is_hyponormal", json!(false), "computed"),
            expect("hypotheses hold", "/tasks/2/pert/verdict", json!(true), "paper"),
            expect("inequality margin", "/tasks/2/pert/margin", json!(0.0), "computed"),
            expect("ratio", "/tasks/2/pert/ratio", json!(5.25), "computed"),
            expect("predicted lower", "/tasks/2/pert/prediction/lower", json!(0.25), "computed"),
            expect("predicted upper", "/tasks/2/pert/prediction/upper", json!(22.0), "computed"),
            expect("predicted lower valid", "/tasks/2/pert/prediction/lower_valid", json!(true), "computed"),
            expect("predicted upper valid", "/tasks/2/pert/prediction/upper_valid", json!(true), "computed")
        ]
    })
}

fn sumexa() -> Value {
    json!({
        "name": "sumexa",
        "group": cyclic_group(2),
        "n": 2,
        "atoms": atoms(),
        "window_sets": {
            "phi": exper1_windows(),
            "psi": [
                [[scaled("phi1", 0.2), "0"], ["0", scaled("phi2", 0.2)]],
                [[scaled("phi2", 0.2), "0"], ["0", scaled("phi1", 0.2)]]
            ]
        },
        "operators": {"theta": pertexa_theta()},
        "tasks": [
            {"task": "theta_bounds", "windows": "psi", "theta": "theta"},
            {"task": "sum_check", "windows": "phi", "psi": "psi", "theta": "theta"}
        ],
        "expect": [
            expect("γ2", "/tasks/0/bounds/alpha_opt", json!(0.1), "paper"),
            expect("δ2", "/tasks/0/bounds/beta_opt", json!(0.4), "paper"),
            expect("√(γ1/δ2)", "/tasks/1/sum/condition_value", json!(2.5), "paper"),
            expect("‖Θ‖/m_o", "/tasks/1/sum/condition_threshold", json!(2.0), "paper"),
            expect("condition holds", "/tasks/1/sum/verdict", json!(true), "paper"),
            expect("predicted lower", "/tasks/1/sum/prediction/lower", json!(0.1), "computed"),
            expect("predicted upper", "/tasks/1/sum/prediction/upper", json!(20.8), "computed"),
            expect("predicted lower valid", "/tasks/1/sum/prediction/lower_valid", json!(true), "computed"),
            expect("predicted upper valid", "/tasks/1/sum/prediction/upper_valid", json!(true), "computed")
        ]
    })
}

fn ex2_negative() -> Value {
    json!({
        "name": "ex2-negative",
        "group": cyclic_group(2),
        "n": 2,
        "atoms": atoms(),
        "window_sets": {"phi": exper1_windows()},
        "operators": {"flip": flip(), "xi": column_selector()},
        "tasks": [
            {"task": "theta_bounds", "windows": "phi", "theta": "flip"},
            {"task": "hyponormal", "theta": "flip"},
            {"task": "image_check", "windows": "phi", "theta": "flip", "xi": "xi"}
        ],
        "expect": [
            expect("α for flip", "/tasks/0/bounds/alpha_opt", json!(10.0), "paper"),
            expect("β for flip", "/tasks/0/bounds/beta_opt", json!(10.0), "paper"),
            expect("flip hyponormal", "/tasks/1/diagnostics/is_hyponormal", json!(true), "computed"),
            expect("flip not mv-adjointable", "/tasks/1/diagnostics/is_mv_adjointable", json!(false), "computed"),
            expect("ΘΞ* ≠ Ξ*Θ", "/tasks/2/composite/commutes", json!(false), "paper"),
            expect("no upper bound for ΞΘ", "/tasks/2/composite/composite_bounds/upper_exists", json!(false), "paper")
        ]
    })
}

fn thm2_tight() -> Value {
    let lambdas = [0.5, 1.0, 3.0, 7.0];
    let tasks: Vec<Value> = lambdas
        .iter()
        .map(|l| json!({"task": "tight_construct", "lambda": l, "theta": "theta"}))
        .collect();
    let mut checks = Vec::new();
    for (i, l) in lambdas.iter().enumerate() {
        checks.push(expect(&format!("λ={l}: diagonal system tight"), &format!("/tasks/{i}/construction/diagonal_tight_defect"), json!(0.0), "computed"));
        checks.push(expect(&format!("λ={l}: α"), &format!("/tasks/{i}/construction/image_theta_bounds/alpha_opt"), json!(l), "paper"));
        checks.push(expect(&format!("λ={l}: β"), &format!("/tasks/{i}/construction/image_theta_bounds/beta_opt"), json!(l), "paper"));
    }
    json!({
        "name": "thm2-tight",
        "group": {"factors": [8], "lattice_gens": [[2]], "weight_convention": "torus_like"},
        "n": 2,
        "operators": {"theta": {"kind": "right_multiplication", "matrix": [[1, 0], [0, [0, 1]]]}},
        "tasks": tasks,
        "expect": checks
    })
}

fn ex_after_thm2() -> Value {
    let mut l = vec![vec![0; 9]; 9];
    for k in [0, 2, 3, 5, 6, 8] {
        l[k][k] = 1;
    }
    json!({
        "name": "ex-after-thm2",
        "group": {"factors": [8], "lattice_gens": [[2]], "weight_convention": "torus_like"},
        "n": 3,
        "operators": {"theta": {"kind": "entry_map", "n": 3, "matrix": l}},
        "tasks": [
            {"task": "adjointable", "theta": "theta"},
            {"task": "tight_construct", "lambda": 3.0, "theta": "theta"}
        ],
        "expect": [
            expect("Θ mv-adjointable", "/tasks/0/diagnostics/is_mv_adjointable", json!(true), "paper"),
            expect("Θ hyponormal", "/tasks/0/diagnostics/is_hyponormal", json!(true), "computed"),
            expect("(3, 3) valid lower", "/tasks/1/construction/lambda_pair/lower_valid", json!(true), "paper"),
            expect("(3, 3) valid upper", "/tasks/1/construction/lambda_pair/upper_valid", json!(true), "paper"),
            expect("α", "/tasks/1/construction/image_theta_bounds/alpha_opt", json!(3.0), "paper"),
            expect("β", "/tasks/1/construction/image_theta_bounds/beta_opt", json!(3.0), "paper")
        ]
    })
}

fn prop1a_image() -> Value {
    json!({
        "name": "prop1a-image",
        "group": cyclic_group(2),
        "n": 2,
        "atoms": atoms(),
        "window_sets": {"phi": exper1_windows()},
        "operators": {
            "unitary": {"kind": "right_multiplication", "matrix": [[0, 1], [[0, 1], 0]]},
            "flip": flip()
        },
        "tasks": [
            {"task": "image_check", "windows": "phi", "theta": "unitary"},
            {"task": "image_check", "windows": "phi", "theta": "flip"}
        ],
        "expect": [
            expect("hypotheses hold", "/tasks/0/image/hypotheses_hold", json!(true), "computed"),
            expect("(10, 10) valid lower", "/tasks/0/image/source_pair/lower_valid", json!(true), "computed"),
            expect("(10, 10) valid upper", "/tasks/0/image/source_pair/upper_valid", json!(true), "computed"),
            expect("flip image α", "/tasks/1/image/image_bounds/alpha_opt", json!(10.0), "computed"),
            expect("flip image β", "/tasks/1/image/image_bounds/beta_opt", json!(10.0), "computed")
        ]
    })
}

fn omega_check() -> Value {
    json!({
        "name": "omega-check",
        "group": cyclic_group(2),
        "n": 2,
        "atoms": atoms(),
        "window_sets": {"phi": exper1_windows()},
        "operators": {
            "theta": pertexa_theta(),
            "keep11": entry_map(json!([[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
        },
        "tasks": [
            {"task": "omega_check", "windows": "phi", "theta": "theta"},
            {"task": "omega_check", "windows": "phi", "theta": "keep11"}
        ],
        "expect": [
            expect("condition (i)", "/tasks/0/omega/condition_i", json!(true), "computed"),
            expect("α", "/tasks/0/omega/bounds/alpha_opt", json!(2.5), "paper"),
            expect("β", "/tasks/0/omega/bounds/beta_opt", json!(10.0), "paper"),
            expect("verdicts agree", "/tasks/0/verdicts_agree", json!(true), "computed"),
            expect("no upper bound", "/tasks/1/omega/bounds/upper_exists", json!(false), "paper"),
            expect("verdicts agree", "/tasks/1/verdicts_agree", json!(true), "computed")
        ]
    })
}

/// Preset document with default parameters.
pub fn scenario(name: &str) -> Result<Value> {
    resolve(name, &Map::new())
}

/// Preset document with overrides: `M` for `exb1`, `lambda`/`mu`/`eta`/`use_paper_bounds`
/// for every `pert_check` task, and any other top-level key replacing the preset's.
pub fn resolve(name: &str, overrides: &Map<String, Value>) -> Result<Value> {
    let mut errs = Vec::new();
    let mut doc = match name {
        "exb1" => {
            let m = match overrides.get("M") {
                None => 2,
                Some(v) => match v.as_u64() {
                    Some(m) if (1..=8).contains(&m) => m as usize,
                    _ => {
                        errs.push("/M: expected an integer between 1 and 8".to_string());
                        2
                    }
                },
            };
            exb1(m)
        }
        "remark-theta0" => remark_theta0(),
        "exper1-negative" => exper1_negative(),
        "pertexa" => pertexa(),
        "sumexa" => sumexa(),
        "ex2-negative" => ex2_negative(),
        "thm2-tight" => thm2_tight(),
        "ex-after-thm2" => ex_after_thm2(),
        "prop1a-image" => prop1a_image(),
        "omega-check" => omega_check(),
        other => {
            return Err(GofError::Schema(vec![format!(
                "/source: unknown preset '{other}' (available: {})",
                names().join(", ")
            )]))
        }
    };
    let obj = doc.as_object_mut().expect("presets are objects");
    for (k, v) in overrides {
        match k.as_str() {
            "source" | "M" => {}
            "lambda" | "mu" | "eta" | "use_paper_bounds" => {
                let mut hit = false;
                if let Some(tasks) = obj.get_mut("tasks").and_then(Value::as_array_mut) {
                    for t in tasks.iter_mut().filter(|t| t["task"] == "pert_check") {
                        t[k.as_str()] = v.clone();
                        hit = true;
                    }
                }
                if !hit {
                    errs.push(format!("/{k}: preset '{name}' has no pert_check task to override"));
                }
            }
            _ => {
                obj.insert(k.clone(), v.clone());
            }
        }
    }
    if errs.is_empty() { Ok(doc) } else { Err(GofError::Schema(errs)) }
}
