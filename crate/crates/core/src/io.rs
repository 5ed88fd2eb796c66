//! Plot-ready CSV series with fixed headers.
//!
//! | series      | columns                                   |
//! |-------------|-------------------------------------------|
//! | spectrum    | `detuning_MHz,od,phi_rad`                 |
//! | MOT release | `time_s,od,phi_rad`                       |
//! | precession  | `time_s,phi_rad`                          |
//! | pumping     | `time_s,m=-I,…,m=+I,p`                    |
//!
//! Detunings are written as (ω − ω₀)/2π in MHz. Numbers use the shortest
//! representation that reads back to the same `f64`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::experiments::{BeamSpectra, MotTrace};
use crate::halfint::HalfInt;
use crate::pumping::Trajectory;
use crate::units::{mhz_to_rad, rad_to_mhz};

pub const SPECTRUM_HEADER: [&str; 3] = ["detuning_MHz", "od", "phi_rad"];
pub const MOT_HEADER: [&str; 3] = ["time_s", "od", "phi_rad"];
pub const PRECESSION_HEADER: [&str; 2] = ["time_s", "phi_rad"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(headers: &[S]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.headers.len() {
            return Err(Error::domain(format!(
                "row has {} values for {} columns",
                row.len(),
                self.headers.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut table = Table {
            headers,
            rows: Vec::new(),
        };
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(k, field)| {
                    field.parse::<f64>().map_err(|e| Error::Parse {
                        record: format!(
                            "row {} column {}",
                            i + 2,
                            table.headers.get(k).map_or("?", |s| s)
                        ),
                        message: format!("{field:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            table.push(row)?;
        }
        Ok(table)
    }

    /// Errors unless the header row equals `expected`.
    pub fn expect_headers(&self, expected: &[&str]) -> Result<()> {
        if self
            .headers
            .iter()
            .map(String::as_str)
            .ne(expected.iter().copied())
        {
            return Err(Error::Parse {
                record: "header row".into(),
                message: format!(
                    "expected {}, found {}",
                    expected.join(","),
                    self.headers.join(",")
                ),
            });
        }
        Ok(())
    }
}

pub fn spectrum_table(s: &BeamSpectra) -> Table {
    Table {
        headers: SPECTRUM_HEADER.iter().map(|h| h.to_string()).collect(),
        rows: (0..s.omega.len())
            .map(|i| vec![rad_to_mhz(s.omega[i]), s.od[i], s.phi[i]])
            .collect(),
    }
}

/// Reads a spectrum back as ω (rad/s), OD and φ columns.
pub fn read_spectrum<R: Read>(input: R) -> Result<BeamSpectra> {
    let t = Table::read_csv(input)?;
    t.expect_headers(&SPECTRUM_HEADER)?;
    Ok(BeamSpectra {
        omega: t.rows.iter().map(|r| mhz_to_rad(r[0])).collect(),
        od: t.rows.iter().map(|r| r[1]).collect(),
        phi: t.rows.iter().map(|r| r[2]).collect(),
    })
}

pub fn mot_table(tr: &MotTrace) -> Table {
    Table {
        headers: MOT_HEADER.iter().map(|h| h.to_string()).collect(),
        rows: (0..tr.times.len())
            .map(|i| vec![tr.times[i], tr.od[i], tr.phi[i]])
            .collect(),
    }
}

/// (t, OD, φ) rows of a release trace.
pub fn read_mot_trace<R: Read>(input: R) -> Result<Vec<[f64; 3]>> {
    let t = Table::read_csv(input)?;
    t.expect_headers(&MOT_HEADER)?;
    Ok(t.rows.iter().map(|r| [r[0], r[1], r[2]]).collect())
}

pub fn precession_table(times: &[f64], phi: &[f64]) -> Result<Table> {
    if times.len() != phi.len() {
        return Err(Error::domain("time and rotation series differ in length"));
    }
    Ok(Table {
        headers: PRECESSION_HEADER.iter().map(|h| h.to_string()).collect(),
        rows: times.iter().zip(phi).map(|(t, p)| vec![*t, *p]).collect(),
    })
}

pub fn read_precession<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let t = Table::read_csv(input)?;
    t.expect_headers(&PRECESSION_HEADER)?;
    Ok(t.rows.iter().map(|r| (r[0], r[1])).collect())
}

fn sublevel_label(m: HalfInt) -> String {
    if m.twice() > 0 {
        format!("m=+{m}")
    } else {
        format!("m={m}")
    }
}

pub fn pumping_headers(spin: HalfInt) -> Vec<String> {
    let mut h = vec!["time_s".to_string()];
    h.extend(spin.projections().map(sublevel_label));
    h.push("p".into());
    h
}

pub fn trajectory_table(tr: &Trajectory) -> Table {
    Table {
        headers: pumping_headers(tr.spin),
        rows: (0..tr.len())
            .map(|i| {
                let mut row = vec![tr.times[i]];
                row.extend_from_slice(&tr.fractions[i]);
                row.push(tr.polarization(i));
                row
            })
            .collect(),
    }
}
