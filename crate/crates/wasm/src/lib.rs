//! Browser bindings for the qlab demo page.
//!
//! The plain functions are the tested surface; the `#[wasm_bindgen]` wrappers
//! only translate errors into JS strings.

use qlab_core::report::{run, verify_paper, Command, Overrides};
use qlab_core::scenario::{fixture, parse_scenario, FIXTURES};
use qlab_core::{Error, Result};
use wasm_bindgen::prelude::*;

/// Names of the built-in fixtures as a JSON array.
pub fn fixture_names() -> String {
    serde_json::to_string(&FIXTURES).expect("names serialize")
}

/// Canonical scenario JSON for a built-in fixture.
pub fn fixture_json(name: &str) -> Result<String> {
    Ok(fixture(name)?.to_json())
}

/// Runs `command` on scenario text. A non-finite `norm_cap` or zero `steps`
/// keeps the scenario's own option.
pub fn run_command(command: &str, scenario: &str, norm_cap: f64, steps: u32, json: bool) -> Result<String> {
    let command: Command = command.parse()?;
    let report = if command == Command::VerifyPaper {
        verify_paper()?
    } else {
        let overrides = Overrides {
            norm_cap: norm_cap.is_finite().then_some(norm_cap),
            steps: (steps > 0).then_some(steps as usize),
            ..Overrides::default()
        };
        run(&overrides.apply(&parse_scenario(scenario)?)?, command)?
    };
    Ok(if json { report.to_json() } else { report.to_text() })
}

fn js_error(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen(js_name = fixtureNames)]
pub fn fixture_names_js() -> String {
    fixture_names()
}

#[wasm_bindgen(js_name = fixtureJson)]
pub fn fixture_json_js(name: &str) -> std::result::Result<String, JsValue> {
    fixture_json(name).map_err(js_error)
}

#[wasm_bindgen(js_name = runCommand)]
pub fn run_command_js(
    command: &str,
    scenario: &str,
    norm_cap: f64,
    steps: u32,
    json: bool,
) -> std::result::Result<String, JsValue> {
    run_command(command, scenario, norm_cap, steps, json).map_err(js_error)
}
