//! Per-tick record of a closed-loop run.

use std::io::Write;

use crate::error::{Error, Result};

/// One controller tick, in absolute output and input units.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub r: f64,
    pub y_m: f64,
    /// Noise-free plant output.
    pub y_p: f64,
    /// Command after controller and plant limits.
    pub u: f64,
    /// Tracking error seen by the controller (includes measurement noise).
    pub e1: f64,
    pub theta: Vec<f64>,
    pub d0: f64,
    pub sat: bool,
}

/// Uniformly sampled record of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
    /// Width of every `theta` vector.
    pub param_count: usize,
}

impl SimTrace {
    pub fn new(param_count: usize) -> Self {
        SimTrace {
            rows: Vec::new(),
            param_count,
        }
    }

    pub fn push(&mut self, row: TraceRow) {
        debug_assert_eq!(row.theta.len(), self.param_count);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, f: impl Fn(&TraceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["t", "r", "y_m", "y_p", "u", "e1"].iter().map(|s| s.to_string()).collect();
        h.extend((0..self.param_count).map(|i| format!("theta_{i}")));
        h.push("d0".into());
        h.push("sat".into());
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec: Vec<String> = [row.t, row.r, row.y_m, row.y_p, row.u, row.e1]
                .iter()
                .chain(row.theta.iter())
                .chain(std::iter::once(&row.d0))
                .map(|v| v.to_string())
                .collect();
            rec.push(u8::from(row.sat).to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(Error::from)
    }

    /// Parses what [`SimTrace::write_csv`] produced.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        let k = header.len().checked_sub(8).ok_or_else(|| Error::Config("trace has too few columns".into()))?;
        let mut trace = SimTrace::new(k);
        if trace.header().iter().map(String::as_str).ne(header.iter()) {
            return Err(Error::Config(format!("unexpected trace header {header:?}")));
        }
        for rec in r.records() {
            let rec = rec?;
            let v: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Config(format!("bad trace value {s:?}: {e}"))))
                .collect::<Result<_>>()?;
            trace.push(TraceRow {
                t: v[0],
                r: v[1],
                y_m: v[2],
                y_p: v[3],
                u: v[4],
                e1: v[5],
                theta: v[6..6 + k].to_vec(),
                d0: v[6 + k],
                sat: v[7 + k] != 0.0,
            });
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = SimTrace::new(2);
        for k in 0..5 {
            t.push(TraceRow {
                t: k as f64 * 0.05,
                r: 0.1,
                y_m: 0.2 / 3.0,
                y_p: -1e-17,
                u: 1.5,
                e1: 0.0,
                theta: vec![0.25, -3.0],
                d0: 0.0,
                sat: k == 3,
            });
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,r,y_m,y_p,u,e1,theta_0,theta_1,d0,sat\n"));
        assert_eq!(SimTrace::read_csv(buf.as_slice()).unwrap(), t);
    }
}
