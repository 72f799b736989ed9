use pexpl_bench::BenchError;
use pexpl_core::formula::Clause;
use pexpl_core::Error;
use serde_json::{json, Value};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SEMANTIC: u8 = 3;
pub const EXIT_LIMIT: u8 = 4;

/// What a successful command prints.
pub struct Outcome {
    pub text: String,
    pub payload: Value,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn new(text: String, payload: Value) -> Outcome {
        Outcome { text, payload, warnings: Vec::new() }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Tautology
        | Error::InvalidWeight(_)
        | Error::InvalidGamma(_)
        | Error::InvalidK
        | Error::IndexOutOfRange(_)
        | Error::InvalidArgument(_) => EXIT_INPUT,
        Error::InconsistentKb
        | Error::UnsatisfiableHard
        | Error::UnsatisfiableConstraint
        | Error::UnsatisfiableSeed
        | Error::NotEntailed
        | Error::EmptyMember
        | Error::ZeroProbability
        | Error::Timeout => EXIT_SEMANTIC,
        Error::TooManyVariables { .. } => EXIT_LIMIT,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let message = match &e {
            Error::InconsistentKb => "precondition violated: knowledge base is inconsistent".to_string(),
            Error::NotEntailed => "precondition violated: the query is not entailed".to_string(),
            other => other.to_string(),
        };
        Failure { code: exit_code(&e), message }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Failure {
        match e {
            BenchError::Core(inner) => inner.into(),
            BenchError::EmptyBackbone => Failure { code: EXIT_SEMANTIC, message: e.to_string() },
            other => Failure::input(other.to_string()),
        }
    }
}

pub fn render(c: &Clause) -> Vec<i32> {
    c.to_dimacs()
}

pub fn render_line(c: &Clause) -> String {
    let mut s: String = c.to_dimacs().iter().map(|l| format!("{l} ")).collect();
    s.push('0');
    s
}

pub fn json_ok(command: &str, out: &Outcome) -> String {
    json!({ "command": command, "status": "ok", "payload": out.payload }).to_string()
}

pub fn json_err(command: &str, code: u8, message: &str) -> String {
    json!({
        "command": command,
        "status": "error",
        "payload": { "exit_code": code, "message": message },
    })
    .to_string()
}

pub fn fmt_prob(p: f64) -> String {
    format!("{p:.6}")
}

pub fn fmt_opt(p: Option<f64>) -> String {
    p.map_or_else(|| "-".to_string(), fmt_prob)
}
