//! JSON-line reports on stdout, summaries on stderr, and the exit-code contract.

use std::fmt;
use std::time::Instant;

use amensweep_core::rational::decimal;
use amensweep_core::{Error, Q};
use serde_json::{Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_FORMAT: i32 = 2;
pub const EXIT_WINDOW: i32 = 3;

/// A failed command: exit code plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub location: Option<String>,
}

impl Failure {
    pub fn domain(message: impl Into<String>) -> Self {
        Failure { code: EXIT_DOMAIN, message: message.into(), location: None }
    }

    pub fn format(message: impl Into<String>) -> Self {
        Failure { code: EXIT_FORMAT, message: message.into(), location: None }
    }

    pub fn at(mut self, location: impl Into<String>) -> Self {
        self.location = Some(location.into());
        self
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(l) => write!(f, "{} (at {l})", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::WindowExhausted { .. } => EXIT_WINDOW,
            Error::Io { .. } | Error::Json(_) => EXIT_FORMAT,
            _ => EXIT_DOMAIN,
        };
        let location = match &e {
            Error::WindowExhausted { element, .. } => Some(format!("element {element}")),
            _ => None,
        };
        Failure { code, message: e.to_string(), location }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

/// One report line under construction.
pub struct Report {
    fields: Map<String, Value>,
    decimal: bool,
    started: Instant,
}

impl Report {
    pub fn new(command: &str, decimal: bool) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), Value::from(command));
        Report { fields, decimal, started: Instant::now() }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), v.into());
        self
    }

    /// A rational field, with an approximate decimal sibling under `--decimal`.
    pub fn q(&mut self, key: &str, x: &Q) -> &mut Self {
        self.fields.insert(key.into(), Value::from(x.to_string()));
        if self.decimal {
            self.fields
                .insert(format!("{key}_approx"), Value::from(format!("~{}", decimal(x))));
        }
        self
    }

    pub fn emit(&mut self) {
        let ms = self.started.elapsed().as_millis() as u64;
        self.fields.insert("elapsed_ms".into(), Value::from(ms));
        println!("{}", Value::Object(std::mem::take(&mut self.fields)));
    }
}

/// Writes the failure as a report line and a summary, returning its exit code.
pub fn emit_failure(command: &str, f: &Failure) -> i32 {
    let mut line = Map::new();
    line.insert("command".into(), Value::from(command));
    line.insert("ok".into(), Value::from(false));
    line.insert("exit_code".into(), Value::from(f.code));
    line.insert("error".into(), Value::from(f.message.clone()));
    if let Some(l) = &f.location {
        line.insert("location".into(), Value::from(l.clone()));
    }
    println!("{}", Value::Object(line));
    eprintln!("amensweep {command}: {f}");
    f.code
}
