use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Daily closing prices of an index and its candidate constituents.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    index: DVector<f64>,
    assets: DMatrix<f64>,
    names: Vec<String>,
}

impl PricePanel {
    /// Validates strictly increasing dates and finite positive prices.
    pub fn new(dates: Vec<NaiveDate>, index: DVector<f64>, assets: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        let t = dates.len();
        if t == 0 || assets.ncols() == 0 {
            return Err(Error::invalid("panel needs at least one date and one asset"));
        }
        if index.len() != t || assets.nrows() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                found: if index.len() != t { index.len() } else { assets.nrows() },
            });
        }
        if names.len() != assets.ncols() {
            return Err(Error::DimensionMismatch {
                expected: assets.ncols(),
                found: names.len(),
            });
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!("dates not strictly increasing at {}", w[1])));
        }
        for i in 0..t {
            if !(index[i] > 0.0 && index[i].is_finite()) {
                return Err(Error::invalid(format!("index price on {} must be positive, got {}", dates[i], index[i])));
            }
            for j in 0..assets.ncols() {
                let v = assets[(i, j)];
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::invalid(format!("price of {} on {} must be positive, got {v}", names[j], dates[i])));
                }
            }
        }
        Ok(PricePanel {
            dates,
            index,
            assets,
            names,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn n_assets(&self) -> usize {
        self.assets.ncols()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn index(&self) -> &DVector<f64> {
        &self.index
    }

    pub fn assets(&self) -> &DMatrix<f64> {
        &self.assets
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Reads a panel CSV: header `date,index,<asset>...`, ISO-8601 dates, one row
/// per trading day, no empty cells.
pub fn load_prices(path: &Path) -> Result<PricePanel> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_prices(file, path)
}

/// [`load_prices`] from any reader; `origin` labels error messages.
pub fn read_prices<R: Read>(reader: R, origin: &Path) -> Result<PricePanel> {
    let fail = |message: String| Error::Format {
        path: origin.to_path_buf(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header.len() < 3 || header[0] != "date" || header[1] != "index" {
        return Err(fail("header must be `date,index,<asset>...` with at least one asset".into()));
    }
    let names = header[2..].to_vec();
    if let Some(dup) = names.iter().enumerate().find(|(i, n)| names[..*i].contains(n)) {
        return Err(fail(format!("duplicate asset column `{}`", dup.1)));
    }
    let width = header.len();
    let mut dates = Vec::new();
    let mut values = Vec::new();
    let mut problems = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        if rec.len() != width {
            problems.push(format!("line {line}: expected {width} cells, found {}", rec.len()));
            continue;
        }
        let date = match NaiveDate::parse_from_str(rec[0].trim(), "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                problems.push(format!("line {line}: invalid date `{}`", &rec[0]));
                continue;
            }
        };
        let mut row_vals = Vec::with_capacity(width - 1);
        let mut missing = Vec::new();
        for (c, cell) in rec.iter().enumerate().skip(1) {
            let cell = cell.trim();
            if cell.is_empty() {
                missing.push(header[c].clone());
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => row_vals.push(v),
                Ok(v) => problems.push(format!("line {line}: non-positive price {v} for `{}`", header[c])),
                Err(_) => problems.push(format!("line {line}: cannot parse `{cell}` for `{}`", header[c])),
            }
        }
        if !missing.is_empty() {
            problems.push(format!("line {line} ({date}): missing price for {}", missing.join(", ")));
            continue;
        }
        if let Some(&last) = dates.last() {
            if date == last {
                problems.push(format!("line {line}: duplicate date {date}"));
            } else if date < last {
                problems.push(format!("line {line}: date {date} is earlier than {last}"));
            }
        }
        dates.push(date);
        values.push(row_vals);
    }
    if !problems.is_empty() {
        return Err(fail(problems.join("; ")));
    }
    if dates.is_empty() {
        return Err(fail("no data rows".into()));
    }
    let t = dates.len();
    let p = names.len();
    let index = DVector::from_fn(t, |i, _| values[i][0]);
    let assets = DMatrix::from_fn(t, p, |i, j| values[i][j + 1]);
    PricePanel::new(dates, index, assets, names).map_err(|e| fail(e.to_string()))
}

/// Writes the panel in canonical form: the same schema, shortest round-trip
/// decimal for every price.
pub fn write_panel<W: Write>(panel: &PricePanel, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string(), "index".to_string()];
    header.extend(panel.names.iter().cloned());
    w.write_record(&header)?;
    for (i, d) in panel.dates.iter().enumerate() {
        let mut rec = vec![d.format("%Y-%m-%d").to_string(), panel.index[i].to_string()];
        rec.extend((0..panel.n_assets()).map(|j| panel.assets[(i, j)].to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PricePanel> {
        read_prices(text.as_bytes(), Path::new("mem.csv"))
    }

    #[test]
    fn three_rows_load() {
        let p = parse("date,index,a,b\n2024-01-02,100,10,20\n2024-01-03,101,10.5,19\n2024-01-04,102,11,18.5\n").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(p.assets()[(2, 1)], 18.5);
    }

    #[test]
    fn duplicate_date_is_named() {
        let err = parse("date,index,a\n2024-01-02,100,10\n2024-01-02,101,11\n").unwrap_err();
        assert!(err.to_string().contains("duplicate date 2024-01-02"), "{err}");
    }

    #[test]
    fn bad_rows_reported_together() {
        let err = parse("date,index,a,b\n2024-01-02,100,,2\n2024-01-03,100,1,-2\n2024-01-01,100,1,1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2 (2024-01-02): missing price for a"), "{msg}");
        assert!(msg.contains("line 3: non-positive price -2"), "{msg}");
        assert!(msg.contains("earlier than"), "{msg}");
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse("day,index,a\n2024-01-02,1,1\n").is_err());
        assert!(parse("date,index\n2024-01-02,1\n").is_err());
        assert!(parse("date,index,a,a\n2024-01-02,1,1,1\n").is_err());
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let text = "date,index,a,b\n2024-01-02,100,10.25,20\n2024-01-03,101.5,10.5,19\n";
        let p = parse(text).unwrap();
        let mut out = Vec::new();
        write_panel(&p, &mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), text);
        let again = parse(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(again, p);
    }
}
