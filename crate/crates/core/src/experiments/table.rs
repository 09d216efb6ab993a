use super::ExperimentError;
use std::fmt::Write as _;
use std::path::Path;

/// Bumped whenever the column layout of any experiment changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    /// `1` for dimensionless quantities.
    pub unit: String,
    /// Wall-clock measurements, excluded from reproducibility comparisons.
    pub timing: bool,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            timing: false,
        }
    }

    pub fn timing(name: &str, unit: &str) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            timing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Not applicable to this row (e.g. an order estimate on the first row).
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.12e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Rows of one experiment plus metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub experiment: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form remarks written into the metadata line.
    pub notes: Vec<String>,
    pub seed: Option<u64>,
    pub wall_time: f64,
}

impl ExperimentResult {
    pub fn new(experiment: &str, columns: Vec<Column>) -> Self {
        Self {
            experiment: experiment.into(),
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
            seed: None,
            wall_time: 0.0,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric value of `name` in `row`.
    pub fn num(&self, row: usize, name: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(name)?)? {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn text(&self, row: usize, name: &str) -> Option<&str> {
        match self.rows.get(row)?.get(self.column(name)?)? {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Indices of rows whose text column `name` equals `value`.
    pub fn rows_where(&self, name: &str, value: &str) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| self.text(r, name) == Some(value))
            .collect()
    }

    pub(crate) fn check_finite(&self) -> Result<(), ExperimentError> {
        for (r, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(ExperimentError::Numerical(format!(
                            "non-finite `{}` in row {r}",
                            self.columns[c].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn metadata_line(&self) -> String {
        let mut s = format!(
            "# llhmm-csv v{CSV_SCHEMA_VERSION}; experiment={}; llhmm={}",
            self.experiment,
            env!("CARGO_PKG_VERSION")
        );
        if let Some(seed) = self.seed {
            let _ = write!(s, "; seed={seed}");
        }
        for n in &self.notes {
            let _ = write!(s, "; {n}");
        }
        s
    }

    fn body(&self, keep: impl Fn(&Column) -> bool) -> String {
        let cols: Vec<usize> = (0..self.columns.len())
            .filter(|&c| keep(&self.columns[c]))
            .collect();
        let mut out = String::new();
        let header: Vec<String> = cols
            .iter()
            .map(|&c| format!("{}[{}]", self.columns[c].name, self.columns[c].unit))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = cols.iter().map(|&c| row[c].render()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Full CSV: metadata line, wall-time line, header with units, rows.
    pub fn to_csv(&self) -> String {
        format!(
            "{}\n# wall_time_s={:.3}\n{}",
            self.metadata_line(),
            self.wall_time,
            self.body(|_| true)
        )
    }

    /// The CSV without the wall-time line and without timing columns; equal
    /// configs give equal bytes.
    pub fn metric_csv(&self) -> String {
        format!("{}\n{}", self.metadata_line(), self.body(|c| !c.timing))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), ExperimentError> {
        std::fs::write(path, self.to_csv())
            .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))
    }
}
