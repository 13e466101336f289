//! Input documents: a single case or an array of cases. A case is either a
//! bare measure or an object carrying a measure plus the data the command
//! needs.
//!
//! ```text
//! {"measure": <Measure>, "generators": [..], "lemma": [a, b, c], "series": <FnSeries>}
//! ```

use std::path::Path;
use std::sync::Arc;

use fkg_core::formats::{FnSeriesJson, MeasureJson};
use fkg_core::{FnSeries, Measure, SubsetId};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone)]
pub struct Case {
    pub measure: Arc<Measure>,
    pub generators: Option<Vec<SubsetId>>,
    pub lemma: Option<[SubsetId; 3]>,
    pub series: Option<FnSeries>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseJson {
    measure: MeasureJson,
    #[serde(default)]
    generators: Option<Vec<u32>>,
    #[serde(default)]
    lemma: Option<[u32; 3]>,
    #[serde(default)]
    series: Option<FnSeriesJson>,
}

pub fn load(path: &Path) -> Result<Vec<Case>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Vec<Case>, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("input: {e}"))?;
    let items = match doc {
        Value::Array(items) => items,
        other => vec![other],
    };
    if items.is_empty() {
        return Err("input: no cases".into());
    }
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| parse_case(v).map_err(|e| format!("input[{i}].{e}")))
        .collect()
}

fn parse_case(v: Value) -> Result<Case, String> {
    let is_bare = v.get("weights").is_some();
    let json: CaseJson = if is_bare {
        let measure: MeasureJson =
            serde_json::from_value(v).map_err(|e| format!("measure: {e}"))?;
        CaseJson {
            measure,
            generators: None,
            lemma: None,
            series: None,
        }
    } else {
        serde_json::from_value(v).map_err(|e| format!("case: {e}"))?
    };
    let measure = json
        .measure
        .to_measure()
        .map_err(|e| format!("measure.{e}"))?;
    let ground = measure.ground();
    let check = |field: String, g: u32| {
        ground
            .check(SubsetId(g))
            .map_err(|e| format!("{field}: {e}"))
    };
    let generators = json
        .generators
        .map(|gs| {
            gs.iter()
                .enumerate()
                .map(|(i, &g)| check(format!("generators[{i}]"), g))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let lemma = json
        .lemma
        .map(|[a, b, c]| -> Result<_, String> {
            Ok([
                check("lemma[0]".into(), a)?,
                check("lemma[1]".into(), b)?,
                check("lemma[2]".into(), c)?,
            ])
        })
        .transpose()?;
    let series = json
        .series
        .map(|s| s.to_series(ground).map_err(|e| format!("series.{e}")))
        .transpose()?;
    Ok(Case {
        measure: Arc::new(measure),
        generators,
        lemma,
        series,
    })
}

/// JSON form of a case, as accepted by [`parse`].
pub fn case_to_json(case: &Case) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert(
        "measure".into(),
        serde_json::to_value(MeasureJson::from_measure(&case.measure)).expect("serializable"),
    );
    if let Some(gens) = &case.generators {
        obj.insert("generators".into(), gens.iter().map(|g| g.0).collect());
    }
    if let Some(triple) = &case.lemma {
        obj.insert("lemma".into(), triple.iter().map(|g| g.0).collect());
    }
    if let Some(p) = &case.series {
        obj.insert(
            "series".into(),
            serde_json::to_value(FnSeriesJson::from_series(p)).expect("serializable"),
        );
    }
    Value::Object(obj)
}
