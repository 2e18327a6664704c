//! Stage output as named columns, encoded to JSON or CSV from one source so
//! both formats carry the same values.

use opuc_core::C64;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(C64),
    Missing,
}

impl Cell {
    fn to_json(self) -> Value {
        match self {
            Cell::Int(v) => Value::from(v),
            Cell::Real(v) => Value::from(v),
            Cell::Complex(z) => Value::from(vec![z.re, z.im]),
            Cell::Missing => Value::Null,
        }
    }

    fn width(self) -> usize {
        if matches!(self, Cell::Complex(_)) {
            2
        } else {
            1
        }
    }

    // Same digits as the JSON encoder.
    fn csv_fields(self, width: usize) -> Vec<String> {
        let real = |v: f64| {
            if v.is_finite() {
                Value::from(v).to_string()
            } else {
                String::new()
            }
        };
        match self {
            Cell::Int(v) => vec![v.to_string()],
            Cell::Real(v) => vec![real(v)],
            Cell::Complex(z) => vec![real(z.re), real(z.im)],
            Cell::Missing => vec![String::new(); width],
        }
    }
}

pub struct Column {
    pub name: &'static str,
    pub cells: Vec<Cell>,
}

impl Column {
    pub fn new(name: &'static str, cells: impl IntoIterator<Item = Cell>) -> Self {
        Column {
            name,
            cells: cells.into_iter().collect(),
        }
    }

    fn width(&self) -> usize {
        self.cells.iter().map(|c| c.width()).max().unwrap_or(1)
    }
}

pub fn ints(values: impl IntoIterator<Item = i64>) -> impl Iterator<Item = Cell> {
    values.into_iter().map(Cell::Int)
}

pub fn reals(values: &[f64]) -> Vec<Cell> {
    values.iter().map(|&v| Cell::Real(v)).collect()
}

pub fn complexes(values: &[C64]) -> Vec<Cell> {
    values.iter().map(|&v| Cell::Complex(v)).collect()
}

pub struct Report {
    pub stage: &'static str,
    pub family: Value,
    pub scalars: Vec<(&'static str, Cell)>,
    pub columns: Vec<Column>,
}

impl Report {
    pub fn new(stage: &'static str, family: Value) -> Self {
        Report {
            stage,
            family,
            scalars: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn scalar(mut self, name: &'static str, value: Cell) -> Self {
        self.scalars.push((name, value));
        self
    }

    pub fn column(mut self, column: Column) -> Self {
        self.columns.push(column);
        self
    }

    /// One object: `stage`, `family`, the scalars, then one array per column.
    pub fn to_json(&self) -> String {
        let mut map = Map::new();
        map.insert("stage".into(), Value::from(self.stage));
        map.insert("family".into(), self.family.clone());
        for (name, cell) in &self.scalars {
            map.insert((*name).into(), cell.to_json());
        }
        for col in &self.columns {
            map.insert(
                col.name.into(),
                Value::from(col.cells.iter().map(|c| c.to_json()).collect::<Vec<_>>()),
            );
        }
        let mut out = serde_json::to_string(&Value::Object(map)).expect("values are plain JSON");
        out.push('\n');
        out
    }

    /// `# key=value` lines for stage, family and scalars, then a header and
    /// one row per index. Complex columns split into `_re` and `_im`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# stage={}\n# family={}\n", self.stage, self.family);
        for (name, cell) in &self.scalars {
            out += &format!("# {name}={}\n", cell.csv_fields(1).join(","));
        }
        let widths: Vec<usize> = self.columns.iter().map(Column::width).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::new();
        for (col, &width) in self.columns.iter().zip(&widths) {
            if width == 2 {
                header.push(format!("{}_re", col.name));
                header.push(format!("{}_im", col.name));
            } else {
                header.push(col.name.to_string());
            }
        }
        w.write_record(&header).expect("in-memory write");
        let rows = self
            .columns
            .iter()
            .map(|c| c.cells.len())
            .max()
            .unwrap_or(0);
        for i in 0..rows {
            let mut record = Vec::with_capacity(header.len());
            for (col, &width) in self.columns.iter().zip(&widths) {
                record.extend(
                    col.cells
                        .get(i)
                        .copied()
                        .unwrap_or(Cell::Missing)
                        .csv_fields(width),
                );
            }
            w.write_record(&record).expect("in-memory write");
        }
        out + &String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}
