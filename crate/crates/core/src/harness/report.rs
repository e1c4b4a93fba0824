//! Report rows and their CSV encoding (fixed columns, 17 significant digits).

use super::HarnessError;
use std::io::Write;

pub const COLUMNS: [&str; 11] =
    ["suite", "case", "quantity", "value", "exact", "reference", "error", "tolerance", "tail", "status", "note"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Recorded value with no assertion attached.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub case: String,
    pub quantity: String,
    pub value: f64,
    pub exact: Option<String>,
    pub reference: Option<f64>,
    pub error: Option<f64>,
    pub tolerance: f64,
    pub tail: f64,
    pub status: Status,
    pub note: String,
}

impl Row {
    fn base(case: &str, quantity: &str, value: f64) -> Self {
        Row {
            case: case.into(),
            quantity: quantity.into(),
            value,
            exact: None,
            reference: None,
            error: None,
            tolerance: 0.0,
            tail: 0.0,
            status: Status::Info,
            note: String::new(),
        }
    }

    /// `|value - reference| <= tol`.
    pub fn abs_check(case: &str, quantity: &str, value: f64, reference: f64, tol: f64) -> Self {
        let err = (value - reference).abs();
        Row {
            reference: Some(reference),
            error: Some(err),
            tolerance: tol,
            status: Status::from_bool(err <= tol),
            ..Row::base(case, quantity, value)
        }
    }

    /// `|value - reference| <= tol |reference|`.
    pub fn rel_check(case: &str, quantity: &str, value: f64, reference: f64, tol: f64) -> Self {
        let err = (value - reference).abs() / reference.abs();
        Row {
            reference: Some(reference),
            error: Some(err),
            tolerance: tol,
            status: Status::from_bool(err <= tol),
            ..Row::base(case, quantity, value)
        }
    }

    /// `value <= bound`, with the bound in the tolerance column.
    pub fn at_most(case: &str, quantity: &str, value: f64, bound: f64) -> Self {
        Row { tolerance: bound, status: Status::from_bool(value <= bound), ..Row::base(case, quantity, value) }
    }

    /// A boolean assertion; the value column carries 1 or 0.
    pub fn holds(case: &str, quantity: &str, ok: bool) -> Self {
        Row { status: Status::from_bool(ok), ..Row::base(case, quantity, if ok { 1.0 } else { 0.0 }) }
    }

    /// A recorded value with its tail estimate in both the tail and
    /// tolerance columns.
    pub fn info(case: &str, quantity: &str, value: f64, tail: f64) -> Self {
        Row { tail, tolerance: tail, ..Row::base(case, quantity, value) }
    }

    /// A case that could not be evaluated.
    pub fn failed(case: &str, quantity: &str, message: impl Into<String>) -> Self {
        Row { status: Status::Fail, note: message.into(), ..Row::base(case, quantity, f64::NAN) }
    }

    pub fn with_exact(mut self, exact: impl Into<String>) -> Self {
        self.exact = Some(exact.into());
        self
    }

    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub suite: String,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Report { suite: suite.into(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn write_csv<W: Write>(&self, w: W, header: bool) -> Result<(), HarnessError> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        let io = |e: csv::Error| HarnessError::Io(e.to_string());
        if header {
            out.write_record(COLUMNS).map_err(io)?;
        }
        for r in &self.rows {
            out.write_record([
                self.suite.clone(),
                r.case.clone(),
                r.quantity.clone(),
                num(r.value),
                r.exact.clone().unwrap_or_default(),
                r.reference.map(num).unwrap_or_default(),
                r.error.map(num).unwrap_or_default(),
                num(r.tolerance),
                num(r.tail),
                r.status.as_str().into(),
                r.note.clone(),
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| HarnessError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, true).expect("in-memory write");
        String::from_utf8(buf).expect("utf8")
    }
}

/// 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.25), "2.5000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::new("demo");
        r.push(Row::rel_check("a,b", "ratio", 1.001, 1.0, 1e-2));
        r.push(Row::info("c", "tail", 3.0, 0.5));
        let s = r.to_csv_string();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], COLUMNS.join(","));
        assert!(lines[1].starts_with("demo,\"a,b\",ratio,1.0009999999999999e0,"));
        assert!(lines[1].contains(",PASS,"));
        assert!(lines[2].contains(",INFO,"));
        assert!(r.passed());
        r.push(Row::failed("x", "value", "budget exhausted"));
        assert_eq!(r.failures(), 1);
    }
}
