//! Browser bindings for the `ztransport` engine.
//!
//! Every export takes the text of a diagram file and returns a JSON string,
//! so the page never has to mirror the engine's types.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;
use ztransport::cli::{self, parse_diagram};

fn error(message: impl ToString) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// Transport formula or witness for the query in `diagram`.
#[wasm_bindgen]
pub fn run(diagram: &str) -> String {
    let qf = match parse_diagram(diagram) {
        Ok(qf) => qf,
        Err(e) => return error(e),
    };
    match cli::run(&qf) {
        Ok((code, doc)) => json!({ "exit_code": code, "result": doc }).to_string(),
        Err(e) => error(e),
    }
}

/// The c-component listing printed by the `components` subcommand.
#[wasm_bindgen]
pub fn components(diagram: &str) -> String {
    match parse_diagram(diagram) {
        Ok(qf) => json!({ "text": cli::components(&qf) }).to_string(),
        Err(e) => error(e),
    }
}

/// Per-seed errors of the formula against exact ground truth for seeds
/// `first..=last`.
#[wasm_bindgen]
pub fn validate(diagram: &str, first: u32, last: u32, arity: u32) -> String {
    if first > last {
        return error("empty seed range");
    }
    let qf = match parse_diagram(diagram) {
        Ok(qf) => qf,
        Err(e) => return error(e),
    };
    match cli::validate(&qf, first as u64..=last as u64, arity as usize, false) {
        Ok(None) => json!({ "transportable": false }).to_string(),
        Ok(Some(report)) => {
            let errors: Vec<Value> = report.errors.iter().map(|(s, e)| json!({ "seed": s, "error": e })).collect();
            json!({
                "transportable": true,
                "formula": report.formula.to_string(),
                "errors": errors,
                "max_error": report.max_error(),
                "passed": report.passed(),
            })
            .to_string()
        }
        Err(e) => error(e),
    }
}
