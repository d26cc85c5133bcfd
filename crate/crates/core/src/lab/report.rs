use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag in the first column of every CSV row; bumped on any column change.
pub const REPORT_SCHEMA: &str = "sieve-lab-report/1";

/// One lhs/rhs comparison. Parameters that do not apply to an experiment
/// are left empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment: String,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[serde(rename = "P")]
    pub p: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<f64>,
    pub gamma: Option<f64>,
    pub d: Option<String>,
    pub theta: Option<String>,
    /// Index within a trial set; empty on summary rows.
    pub trial: Option<u32>,
    pub trials: u32,
    pub lhs: f64,
    #[serde(rename = "rhs")]
    pub rhs_bound: f64,
    pub ratio: f64,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            experiment: experiment.to_string(),
            trials: 1,
            ..Self::default()
        }
    }

    /// Fills `lhs`, `rhs` and `ratio`; an all-zero comparison has ratio 0.
    pub fn with_sides(mut self, lhs: f64, rhs_bound: f64) -> Self {
        self.lhs = lhs;
        self.rhs_bound = rhs_bound;
        self.ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs_bound };
        self
    }
}

pub fn write_csv<W: Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r).map_err(io_error)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("writing CSV: {e}")))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ExperimentReport>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input)
        .deserialize()
        .map(|r| r.map_err(io_error))
        .collect()
}

pub fn to_json(reports: &[ExperimentReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Invalid(format!("writing JSON: {e}")))
}

fn io_error(e: csv::Error) -> Error {
    Error::Invalid(format!("CSV: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_and_header() {
        let mut r = ExperimentReport::new("hybrid").with_sides(1.5, 3.0);
        r.c = Some(4.0);
        r.t = Some(2.0);
        r.trial = Some(7);
        r.seed = 11;
        let mut buf = Vec::new();
        write_csv(&[r.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "schema,experiment,C,T,P,M,N,gamma,d,theta,trial,trials,lhs,rhs,ratio,seed"
        );
        assert_eq!(read_csv(&buf[..]).unwrap(), vec![r.clone()]);
        assert_eq!(r.ratio, 0.5);
        let json = to_json(&[r]).unwrap();
        assert!(json.contains("\"rhs\": 3.0"));
    }

    #[test]
    fn zero_over_zero_is_zero() {
        assert_eq!(ExperimentReport::new("x").with_sides(0.0, 0.0).ratio, 0.0);
    }
}
