use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::Result;

/// Outcome of a command. Each status maps to a stable process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// `Tr kappa >= 1`: the channel reaches its fixed point in one step.
    OneStepStationary,
    NoErgodicityCertificate,
    NotErgodic,
    NotMixing,
    ChecksFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::OneStepStationary => 0,
            Status::NoErgodicityCertificate | Status::NotErgodic | Status::NotMixing | Status::ChecksFailed => 2,
        }
    }
}

/// One number, tagged with the method that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub quantity: String,
    pub value: f64,
    pub method: String,
    pub residuals: BTreeMap<String, f64>,
    /// Short description of the reference the value is compared against.
    pub anchor: String,
}

impl ReportRecord {
    pub fn new(quantity: impl Into<String>, value: f64, method: impl Into<String>) -> Self {
        ReportRecord {
            quantity: quantity.into(),
            value,
            method: method.into(),
            residuals: BTreeMap::new(),
            anchor: String::new(),
        }
    }

    pub fn residual(mut self, name: impl Into<String>, value: f64) -> Self {
        self.residuals.insert(name.into(), value);
        self
    }

    pub fn anchor(mut self, anchor: impl Into<String>) -> Self {
        self.anchor = anchor.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub records: Vec<ReportRecord>,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            status: Status::Ok,
            parameters: BTreeMap::new(),
            records: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) -> Result<()> {
        self.parameters.insert(name.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn detail(&mut self, name: &str, value: impl Serialize) -> Result<()> {
        self.details.insert(name.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn push(&mut self, record: ReportRecord) {
        self.records.push(record);
    }

    /// Keeps the more severe of the current and the new status.
    pub fn escalate(&mut self, status: Status) {
        if status.exit_code() > self.status.exit_code() || self.status == Status::Ok {
            self.status = status;
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// First record with this quantity and method.
    pub fn find(&self, quantity: &str, method: &str) -> Option<&ReportRecord> {
        self.records
            .iter()
            .find(|r| r.quantity == quantity && r.method == method)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Records as CSV with residuals flattened to `name=value;...`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
        w.write_record(["quantity", "value", "method", "residuals", "anchor"])
            .map_err(csv_error)?;
        for r in &self.records {
            let residuals = r
                .residuals
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                r.quantity.as_str(),
                &r.value.to_string(),
                r.method.as_str(),
                &residuals,
                r.anchor.as_str(),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_error(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e.to_string()))
}
