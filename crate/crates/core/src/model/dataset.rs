use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Response vector and design matrix of an intercept-free linear model.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let (n, p) = x.shape();
        if n == 0 || p == 0 {
            return Err(Error::invalid(format!("dataset must be non-empty, got {n}x{p}")));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        for j in 0..p {
            for i in 0..n {
                if !x[(i, j)].is_finite() {
                    return Err(Error::NonFinite {
                        location: format!("X[{i}, {j}]"),
                    });
                }
            }
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                location: format!("y[{i}]"),
            });
        }
        Ok(Dataset {
            x,
            y,
            column_names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: names.len(),
            });
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Label of column `j`, falling back to `x{j}` when unnamed.
    pub fn column_name(&self, j: usize) -> String {
        match &self.column_names {
            Some(names) => names[j].clone(),
            None => format!("x{j}"),
        }
    }

    /// Dataset restricted to the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Dataset {
        let x = self.x.select_columns(cols);
        let column_names = self
            .column_names
            .as_ref()
            .map(|names| cols.iter().map(|&j| names[j].clone()).collect());
        Dataset {
            x,
            y: self.y.clone(),
            column_names,
        }
    }

    /// Same design, different response.
    pub fn with_response(&self, y: DVector<f64>) -> Result<Dataset> {
        let mut out = Dataset::new(self.x.clone(), y)?;
        out.column_names = self.column_names.clone();
        Ok(out)
    }

    /// Reads the dataset CSV format: a header row, the response in the first
    /// column, one predictor per remaining column.
    pub fn read_csv(path: &Path) -> Result<Dataset> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let header = reader.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: "need a response column and at least one predictor".into(),
            });
        }
        let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let p = names.len();
        let mut ys = Vec::new();
        let mut cells = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != p + 1 {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    message: format!("row {} has {} fields, expected {}", row + 1, record.len(), p + 1),
                });
            }
            for (col, field) in record.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Format {
                    path: path.to_path_buf(),
                    message: format!("row {}, column {}: cannot parse {field:?}", row + 1, col + 1),
                })?;
                if col == 0 {
                    ys.push(v);
                } else {
                    cells.push(v);
                }
            }
        }
        let n = ys.len();
        let x = DMatrix::from_row_slice(n, p, &cells);
        Dataset::new(x, DVector::from_vec(ys))?.with_names(names)
    }

    /// Writes the dataset using the same layout [`Dataset::read_csv`] accepts,
    /// with round-trip float formatting.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        let mut header = vec!["y".to_string()];
        header.extend((0..self.p()).map(|j| self.column_name(j)));
        writer.write_record(&header)?;
        for i in 0..self.n() {
            let mut row = vec![format!("{:?}", self.y[i])];
            row.extend((0..self.p()).map(|j| format!("{:?}", self.x[(i, j)])));
            writer.write_record(&row)?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(())
    }
}
