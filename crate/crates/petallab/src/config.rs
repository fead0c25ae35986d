//! JSON config files and parsing of flag values.

use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// A config file: global settings plus one optional section per subcommand,
/// keyed like the flags with `_` for `-`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub render: Option<Value>,
    pub trace_boundary: Option<Value>,
    pub census: Option<Value>,
    pub verify_petals: Option<Value>,
    pub verify_metrics: Option<Value>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Overlay the flags actually given (non-null fields of `flags`) on a
/// config-file section.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, section: Option<&Value>) -> Result<T, String> {
    let mut base = match section {
        None => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err("config section must be an object".into()),
    };
    if let Value::Object(over) = serde_json::to_value(flags).map_err(|e| e.to_string())? {
        for (k, v) in over {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| format!("config: {e}"))
}

/// Parses `a+bi`, `a-bi`, `bi`, `-i`, `a` (spaces ignored, `j` accepted for `i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('j', "i");
    let bad = || format!("cannot parse complex number {s:?}");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = Complex64::new;
        assert_eq!(parse_complex("0+0i").unwrap(), c(0.0, 0.0));
        assert_eq!(parse_complex("1.5-2i").unwrap(), c(1.5, -2.0));
        assert_eq!(parse_complex("11i").unwrap(), c(0.0, 11.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex(" 3 + i ").unwrap(), c(3.0, 1.0));
        assert!(parse_complex("x").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn flags_override_file() {
        #[derive(Serialize, Deserialize, Debug, PartialEq)]
        struct A {
            x: Option<i32>,
            y: Option<i32>,
        }
        let file = serde_json::json!({"x": 1, "y": 2});
        let m = merge(&A { x: None, y: Some(5) }, Some(&file)).unwrap();
        assert_eq!(m, A { x: Some(1), y: Some(5) });
    }
}
