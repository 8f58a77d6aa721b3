use std::fmt;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Jsonl,
    Svg,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_possible_value().expect("no skipped variants");
        f.write_str(s.get_name())
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(floor_diagrams::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Lib(floor_diagrams::Error::Parse(_)) => 2,
            CliError::Lib(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<floor_diagrams::Error> for CliError {
    fn from(e: floor_diagrams::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn allow(format: Format, allowed: &[Format], command: &str) -> CliResult<()> {
    if allowed.contains(&format) {
        return Ok(());
    }
    let names: Vec<String> = allowed.iter().map(|f| f.to_string()).collect();
    Err(CliError::Usage(format!("{command} supports --format {}, not {format}", names.join("|"))))
}

/// Every number leaves the program as a decimal string.
pub fn num(x: impl fmt::Display) -> Value {
    Value::String(x.to_string())
}

pub fn obj(command: &str, fields: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    Value::Object(m)
}

pub fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}
