use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

/// A failure that ends the run with exit code 2.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    /// Line and column of a JSON syntax or schema error.
    pub position: Option<(usize, usize)>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            position: None,
        }
    }

    pub fn emit(&self, json: bool) {
        if json {
            let mut v = json!({ "error": self.message });
            if let Some((line, column)) = self.position {
                v["line"] = line.into();
                v["column"] = column.into();
            }
            println!("{v}");
        } else {
            eprintln!("error: {}", self.message);
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<qtspp_core::Error> for CliError {
    fn from(e: qtspp_core::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Result of a command that ran to completion: a verdict plus both renderings.
pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

impl Report {
    pub fn new(ok: bool, text: impl Into<String>, json: Value) -> Self {
        Self {
            ok,
            text: text.into(),
            json,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.ok {
            0
        } else {
            1
        }
    }

    pub fn emit(&self, json: bool) {
        if json {
            println!("{}", self.json);
        } else {
            println!("{}", self.text.trim_end());
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let raw = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| CliError {
        message: format!("{}: {e}", path.display()),
        position: Some((e.line(), e.column())),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
    fs::write(path, s + "\n").map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("core types serialize")
}
