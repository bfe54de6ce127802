//! wasm-bindgen bindings for the static demo page in `www/`.

use serde_json::json;
use stackydeg_core::blowup::{mu_action_on_blowup, twisted_blowup, BlowupParams};
use stackydeg_core::curve::to_dot;
use stackydeg_core::degenerate;
use stackydeg_core::dvrlinalg::{smith_normal_form, Mat};
use stackydeg_core::field::RatFunc;
use stackydeg_core::scenarios::{builtin, ScenarioParams};
use wasm_bindgen::prelude::*;

const MAX_DEG: usize = 64;

fn scenario_json(name: &str, k: u32, d: u32, m: u32) -> Result<String, String> {
    let input = builtin(
        name,
        ScenarioParams {
            k: Some(k),
            d: Some(d),
            m: Some(m),
            m2: None,
        },
    )?;
    let out = degenerate(&input).map_err(|e| e.to_string())?;
    let dot = to_dot(&out.limit_curve, Some(&out.limit_multidegree));
    serde_json::to_string_pretty(&json!({ "output": out, "dot": dot })).map_err(|e| e.to_string())
}

fn blowup_json(m: u32, d: u32, mu: u32) -> Result<String, String> {
    let p = BlowupParams { m, d };
    let result = twisted_blowup(p).map_err(|e| e.to_string())?;
    let action = mu_action_on_blowup(mu.max(1), p).map_err(|e| e.to_string())?;
    serde_json::to_string_pretty(&json!({ "result": result, "action": action })).map_err(|e| e.to_string())
}

/// Rows are arrays of entry strings, e.g. `[["t", "t"], ["t", "t^3"]]`.
fn snf_json(rows: &str) -> Result<String, String> {
    let rows: Vec<Vec<String>> = serde_json::from_str(rows).map_err(|e| e.to_string())?;
    let parsed = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| RatFunc::parse_capped(s, MAX_DEG).map_err(|e| format!("{s:?}: {e}")))
                .collect()
        })
        .collect::<Result<Vec<Vec<RatFunc>>, String>>()?;
    let m = Mat::from_rows(parsed).map_err(|e| e.to_string())?;
    let r = smith_normal_form(&m).map_err(|e| e.to_string())?;
    let signed = r.signed_valuations();
    serde_json::to_string_pretty(&json!({ "snf": r, "signed_valuations": signed })).map_err(|e| e.to_string())
}

/// Limit of a built-in scenario as `{"output": ..., "dot": ...}`.
#[wasm_bindgen]
pub fn run_scenario(name: &str, k: u32, d: u32, m: u32) -> Result<String, JsError> {
    scenario_json(name, k, d, m).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn blowup(m: u32, d: u32, mu: u32) -> Result<String, JsError> {
    blowup_json(m, d, mu).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn snf(rows: &str) -> Result<String, JsError> {
    snf_json(rows).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_output_has_dot() {
        let v: serde_json::Value = serde_json::from_str(&scenario_json("theta-example-2", 2, 2, 1).unwrap()).unwrap();
        assert!(v["dot"].as_str().unwrap().starts_with("graph"));
        assert_eq!(v["output"]["limit_multidegree"]["deg"]["1"][0], "1/4");
        assert!(scenario_json("nope", 2, 2, 1).is_err());
    }

    #[test]
    fn blowup_and_snf() {
        let v: serde_json::Value = serde_json::from_str(&blowup_json(1, 2, 1).unwrap()).unwrap();
        assert_eq!(v["result"]["exceptional_self_intersection"], "-1/2");
        assert!(blowup_json(0, 2, 1).is_err());
        let v: serde_json::Value = serde_json::from_str(&snf_json(r#"[["t","t"],["t","t^3"]]"#).unwrap()).unwrap();
        assert_eq!(v["signed_valuations"], json!([1, 1]));
        assert!(snf_json(r#"[["1","1"],["1","1"]]"#).is_err());
        assert!(snf_json(r#"[["t^99"]]"#).is_err());
    }
}
