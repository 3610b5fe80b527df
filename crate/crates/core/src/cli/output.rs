//! CSV and JSON serialization of traces and scans.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use super::CliError;
use crate::analysis::ResonancePeak;

/// `# key: value` lines, keys sorted, values as compact JSON.
pub fn config_comments(config: &Value) -> String {
    let mut s = String::new();
    match config.as_object() {
        Some(map) => {
            for (k, v) in map {
                let _ = writeln!(s, "# {k}: {v}");
            }
        }
        None => {
            let _ = writeln!(s, "# config: {config}");
        }
    }
    s
}

fn json_err(e: serde_json::Error) -> CliError {
    CliError::Usage(format!("serialization failed: {e}"))
}

/// `{"config": …, …fields of body}`; `body` must serialize to an object.
pub fn json_document(config: &Value, body: &impl Serialize) -> Result<String, CliError> {
    let mut doc = serde_json::to_value(body).map_err(json_err)?;
    match doc.as_object_mut() {
        Some(map) => {
            map.insert("config".into(), config.clone());
        }
        None => doc = serde_json::json!({ "config": config, "data": doc }),
    }
    let mut s = serde_json::to_string_pretty(&doc).map_err(json_err)?;
    s.push('\n');
    Ok(s)
}

/// Column-oriented numeric table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<const N: usize>(columns: [&str; N]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self, config: &Value) -> String {
        let mut s = config_comments(config);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// A scan or cut, laid out like `ScanResult` plus its configuration.
#[derive(Debug, Serialize)]
pub struct TableFile<'a> {
    pub config: &'a Value,
    pub delta1_values: &'a [f64],
    pub delta2_values: &'a [f64],
    pub max_occupation: &'a [Vec<f64>],
    pub argmax_time: &'a [Vec<f64>],
    pub degenerate_vicinity: &'a [Vec<bool>],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peaks: Option<&'a [ResonancePeak]>,
}

impl TableFile<'_> {
    /// Row-major `delta1,delta2,max_occupation,t_at_max`.
    pub fn to_csv(&self) -> String {
        let mut s = config_comments(self.config);
        if let Some(peaks) = self.peaks {
            for p in peaks {
                let _ = writeln!(
                    s,
                    "# peak: delta1={} height={} width={} order_n={} degenerate_vicinity={}",
                    p.delta1,
                    p.height,
                    p.width,
                    p.order_n.map_or("none".to_string(), |n| n.to_string()),
                    p.degenerate_vicinity
                );
            }
        }
        s.push_str("delta1,delta2,max_occupation,t_at_max\n");
        for (i, d1) in self.delta1_values.iter().enumerate() {
            for (j, d2) in self.delta2_values.iter().enumerate() {
                let _ = writeln!(s, "{d1},{d2},{},{}", self.max_occupation[i][j], self.argmax_time[i][j]);
            }
        }
        s
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(json_err)?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_layout() {
        let config = json!({ "b": 2, "a": "x" });
        let mut t = Table::new(["t", "p"]);
        t.rows.push(vec![0.0, 0.25]);
        t.rows.push(vec![0.5, 1.0]);
        assert_eq!(t.to_csv(&config), "# a: \"x\"\n# b: 2\nt,p\n0,0.25\n0.5,1\n");
    }

    #[test]
    fn scan_rows_are_row_major() {
        let config = json!({});
        let f = TableFile {
            config: &config,
            delta1_values: &[1.0, 2.0],
            delta2_values: &[3.0, 4.0],
            max_occupation: &[vec![0.1, 0.2], vec![0.3, 0.4]],
            argmax_time: &[vec![1.0, 2.0], vec![3.0, 4.0]],
            degenerate_vicinity: &[vec![false, false], vec![false, false]],
            peaks: None,
        };
        let csv = f.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows, ["delta1,delta2,max_occupation,t_at_max", "1,3,0.1,1", "1,4,0.2,2", "2,3,0.3,3", "2,4,0.4,4"]);
        let v: Value = serde_json::from_str(&f.to_json().unwrap()).unwrap();
        for key in ["delta1_values", "delta2_values", "max_occupation", "argmax_time", "config"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("peaks").is_none());
    }

    #[test]
    fn json_document_embeds_config() {
        let doc = json_document(&json!({ "command": "x" }), &json!({ "times": [0.0] })).unwrap();
        let v: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["config"]["command"], "x");
        assert_eq!(v["times"][0], 0.0);
    }
}
