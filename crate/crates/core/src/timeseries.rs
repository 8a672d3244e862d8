//! Sampled trajectories of observables and their CSV / JSON export.
//!
//! One schema serves the 23-equation integrator, the reduced models and the
//! Lindblad solver (the latter appends a monitor column block). Floats are
//! written with 17 significant digits so parsing an emitted file recovers
//! every value bit-exactly.

use crate::params::PhysParams;
use serde::Serialize;
use std::io::{self, Write};

/// Integrator provenance stored next to the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorInfo {
    pub method: String,
    pub dt: f64,
    pub rel_tol: Option<f64>,
    pub steps: u64,
}

/// Extra per-sample diagnostics (used by the Lindblad solver).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonitorBlock {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// A sampled trajectory: state components per time plus the derived mean
/// phonon number `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub phonon: Vec<f64>,
    pub monitors: Option<MonitorBlock>,
    pub params: PhysParams,
    pub integrator: IntegratorInfo,
}

impl TimeSeries {
    /// Checks the structural invariants (strictly increasing times, equal
    /// lengths, consistent widths).
    pub fn validate(&self) -> Result<(), String> {
        if self.times.len() != self.states.len() || self.times.len() != self.phonon.len() {
            return Err("times/states/phonon lengths differ".into());
        }
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(format!("times not strictly increasing at {} -> {}", w[0], w[1]));
            }
        }
        for s in &self.states {
            if s.len() != self.labels.len() {
                return Err("state width does not match labels".into());
            }
        }
        if let Some(m) = &self.monitors {
            if m.rows.len() != self.times.len() {
                return Err("monitor rows do not match sample count".into());
            }
            for r in &m.rows {
                if r.len() != m.labels.len() {
                    return Err("monitor width does not match monitor labels".into());
                }
            }
        }
        Ok(())
    }

    /// Writes `t,<components…>,m[,<monitors…>]` with full-precision floats.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for l in &self.labels {
            write!(w, ",{l}")?;
        }
        write!(w, ",m")?;
        if let Some(m) = &self.monitors {
            for l in &m.labels {
                write!(w, ",{l}")?;
            }
        }
        writeln!(w)?;
        for i in 0..self.times.len() {
            write!(w, "{}", fmt_f64(self.times[i]))?;
            for v in &self.states[i] {
                write!(w, ",{}", fmt_f64(*v))?;
            }
            write!(w, ",{}", fmt_f64(self.phonon[i]))?;
            if let Some(m) = &self.monitors {
                for v in &m.rows[i] {
                    write!(w, ",{}", fmt_f64(*v))?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// The JSON document as a tree (callers may attach extra keys before
    /// writing with [`write_json_17`]).
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("in-memory serialization");
        serde_json::from_slice(&buf).expect("self-produced json")
    }

    /// Writes the JSON document `{params, integrator, labels, samples:[…]}`.
    pub fn write_json<W: Write>(&self, w: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Sample<'a> {
            t: f64,
            state: &'a [f64],
            m: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            monitors: Option<&'a [f64]>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            params: &'a PhysParams,
            integrator: &'a IntegratorInfo,
            labels: &'a [String],
            #[serde(skip_serializing_if = "Option::is_none")]
            monitor_labels: Option<&'a [String]>,
            samples: Vec<Sample<'a>>,
        }
        let samples = (0..self.times.len())
            .map(|i| Sample {
                t: self.times[i],
                state: &self.states[i],
                m: self.phonon[i],
                monitors: self.monitors.as_ref().map(|m| m.rows[i].as_slice()),
            })
            .collect();
        let doc = Doc {
            params: &self.params,
            integrator: &self.integrator,
            labels: &self.labels,
            monitor_labels: self.monitors.as_ref().map(|m| m.labels.as_slice()),
            samples,
        };
        write_json_17(w, &doc)
    }
}

/// Full-precision float formatting (17 significant digits, exponent form).
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Avoid "-0" noise in outputs.
        return "0e0".into();
    }
    format!("{v:.16e}")
}

/// serde_json serialization with all floats at 17 significant digits.
pub fn write_json_17<W: Write, T: Serialize>(w: W, value: &T) -> io::Result<()> {
    struct Fmt;
    impl serde_json::ser::Formatter for Fmt {
        fn write_f64<W2: ?Sized + Write>(&mut self, writer: &mut W2, value: f64) -> io::Result<()> {
            write!(writer, "{}", fmt_f64(value))
        }
        fn write_f32<W2: ?Sized + Write>(&mut self, writer: &mut W2, value: f32) -> io::Result<()> {
            write!(writer, "{value:e}")
        }
    }
    let mut ser = serde_json::Serializer::with_formatter(w, Fmt);
    value.serialize(&mut ser).map_err(io::Error::other)
}

/// Parses a CSV produced by [`TimeSeries::write_csv`]; returns the header
/// fields and the numeric rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or("empty csv")?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 2)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != header.len() {
            return Err(format!("row {} has {} fields, header has {}", i + 2, row.len(), header.len()));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysParams;
    use proptest::prelude::*;

    fn dummy(times: Vec<f64>, vals: Vec<f64>) -> TimeSeries {
        let states = vals.iter().map(|v| vec![*v, -v]).collect::<Vec<_>>();
        TimeSeries {
            labels: vec!["a".into(), "b".into()],
            phonon: vals.clone(),
            times,
            states,
            monitors: None,
            params: PhysParams::in_gamma_units(0.1, 0.1, 0.01, 0.5, 0.0),
            integrator: IntegratorInfo { method: "rk4".into(), dt: 0.01, rel_tol: None, steps: 3 },
        }
    }

    #[test]
    fn validate_catches_bad_times() {
        let ts = dummy(vec![0.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]);
        assert!(ts.validate().is_err());
        let ts = dummy(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]);
        assert!(ts.validate().is_ok());
    }

    #[test]
    fn json_is_parseable_and_full_precision() {
        let v = 0.1 + 0.2;
        let ts = dummy(vec![0.0, v], vec![1.0 / 3.0, 3.5e-17]);
        let mut buf = Vec::new();
        ts.write_json(&mut buf).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let got = doc["samples"][1]["t"].as_f64().unwrap();
        assert_eq!(got.to_bits(), v.to_bits());
        let got = doc["samples"][0]["m"].as_f64().unwrap();
        assert_eq!(got.to_bits(), (1.0f64 / 3.0).to_bits());
    }

    proptest! {
        #[test]
        fn csv_round_trips_exactly(raw in proptest::collection::vec(-1e300f64..1e300, 1..40)) {
            let times = (0..raw.len()).map(|i| i as f64).collect::<Vec<_>>();
            let ts = dummy(times, raw.clone());
            let mut buf = Vec::new();
            ts.write_csv(&mut buf).unwrap();
            let (header, rows) = parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(header, vec!["t".to_string(), "a".into(), "b".into(), "m".into()]);
            for (i, r) in rows.iter().enumerate() {
                prop_assert_eq!(r[3].to_bits(), raw[i].to_bits());
                prop_assert_eq!(r[1].to_bits(), raw[i].to_bits());
            }
        }
    }
}
