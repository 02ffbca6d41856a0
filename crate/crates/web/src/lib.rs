//! Browser bindings. Every call returns a JSON table
//! `{"title", "columns", "rows"}` (or a list of them) for the page to render.

use pps_core::classicality::ClassicalityReport;
use pps_core::game::{self, BobStrategy, Game};
use pps_core::rational;
use pps_core::zoo::{self, NamedModel};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_ROUNDS: usize = 1_000_000;

fn model(name: &str) -> Result<NamedModel, String> {
    zoo::by_name(name).map_err(|e| e.to_string())
}

fn prep(p: &str) -> Option<&str> {
    let p = p.trim();
    (!p.is_empty()).then_some(p)
}

fn table(title: &str, columns: &[&str], rows: Vec<Vec<String>>) -> Value {
    json!({ "title": title, "columns": columns, "rows": rows })
}

/// `{:<22}value` lines become two-column rows.
fn key_value_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| {
            let (k, v) = l.split_at(l.len().min(22));
            vec![k.trim().to_string(), v.trim().to_string()]
        })
        .collect()
}

/// Names, preparations and measurements of every built-in model.
#[wasm_bindgen]
pub fn models() -> String {
    let list: Vec<Value> = zoo::all_models()
        .iter()
        .map(|m| {
            json!({
                "name": m.name,
                "default_preparation": m.default_preparation,
                "preparations": m.preparation_names(),
                "measurements": m.measurement_labels(),
            })
        })
        .collect();
    Value::Array(list).to_string()
}

/// Joint distribution of a comma-separated measurement sequence.
#[wasm_bindgen]
pub fn sequence_table(model_name: &str, preparation: &str, sequence: &str) -> Result<String, String> {
    let m = model(model_name)?;
    let seq: Vec<&str> = sequence.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let dist = m.sequence(prep(preparation), &seq).map_err(|e| e.to_string())?;
    let rows = match serde_json::to_value(&dist).map_err(|e| e.to_string())? {
        Value::Array(rows) => rows
            .iter()
            .map(|r| {
                let outcomes: Vec<&str> = r["outcomes"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
                let p = match &r["p"] {
                    Value::String(s) => s.clone(),
                    other => format!("{:.9}", other.as_f64().unwrap_or(f64::NAN)),
                };
                vec![format!("({})", outcomes.join(",")), p]
            })
            .collect(),
        _ => Vec::new(),
    };
    let title = format!("{} from {}: ({})", m.name, prep(preparation).unwrap_or(&m.default_preparation), seq.join(","));
    Ok(table(&title, &["outcomes", "probability"], rows).to_string())
}

/// The classicality report as a two-column table.
#[wasm_bindgen]
pub fn classicality_table(model_name: &str, preparation: &str) -> Result<String, String> {
    let m = model(model_name)?;
    let report = ClassicalityReport::for_model(&m, prep(preparation)).map_err(|e| e.to_string())?;
    let mut rows = key_value_rows(&report.to_string());
    let verdict = if report.passes() { "classical account possible" } else { "no classical account" };
    rows.push(vec!["verdict".into(), verdict.into()]);
    Ok(table("classicality report", &["quantity", "value"], rows).to_string())
}

/// Plays `rounds` rounds and returns the ledger and, when every choice has
/// enough rounds, the umpire's post-selection frequencies.
#[wasm_bindgen]
pub fn play_game(
    model_name: &str,
    preparation: &str,
    strategy: &str,
    p: f64,
    rounds: usize,
    seed: u64,
    odds: &str,
) -> Result<String, String> {
    if rounds == 0 || rounds > MAX_ROUNDS {
        return Err(format!("rounds must be between 1 and {MAX_ROUNDS}"));
    }
    let m = model(model_name)?;
    let strategy = match strategy {
        "random_box" => BobStrategy::RandomBox {
            p_first: 0.5,
            p_control: p,
        },
        "cheat_check" => BobStrategy::CheatCheck { q: p },
        other => return Err(format!("unknown strategy {other:?}")),
    };
    let odds = rational::parse(odds).map_err(|e| e.to_string())?;
    let t = Game::new(&m, prep(preparation))
        .and_then(|g| g.play(&strategy, rounds, seed))
        .map_err(|e| e.to_string())?;
    let ledger = game::settle_bets(&t, &odds).map_err(|e| e.to_string())?;
    let mut tables = vec![table("ledger", &["quantity", "value"], key_value_rows(&ledger.to_string()))];
    if let Ok(u) = game::umpire_frequencies(&t) {
        let rows = u
            .choices
            .iter()
            .map(|c| {
                vec![
                    c.choice.clone(),
                    c.rounds.to_string(),
                    c.post_selected.to_string(),
                    format!("{:.4}", c.frequency),
                    format!("{:.4}", c.sigma),
                ]
            })
            .collect();
        let title = if u.flagged { "umpire: frequencies differ" } else { "umpire: consistent" };
        tables.push(table(title, &["choice", "rounds", "post-selected", "P(A)", "sigma"], rows));
    }
    Ok(Value::Array(tables).to_string())
}
