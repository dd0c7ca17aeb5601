//! Result tables: a `#`-prefixed header echoing the resolved configuration,
//! then CSV rows.

use std::io::Write;

use skew_ergodic::scalar::Scalar;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const COLUMNS: [&str; 16] = [
    "sweep", "kind", "n", "param", "t_index", "t", "seed_index", "seed", "value", "value_exact", "limit", "limit_exact", "error",
    "tag", "std_error", "note",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub sweep: Option<String>,
    pub kind: String,
    pub n: Option<u64>,
    pub param: Option<String>,
    pub t_index: Option<usize>,
    pub t: Option<String>,
    pub seed_index: Option<usize>,
    pub seed: Option<u64>,
    pub value: Option<Scalar>,
    pub limit: Option<Scalar>,
    pub error: Option<Scalar>,
    pub tag: String,
    pub std_error: Option<f64>,
    pub note: String,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn float(v: &Option<Scalar>) -> String {
    v.as_ref().map(|x| x.to_f64().to_string()).unwrap_or_default()
}

fn exact(v: &Option<Scalar>) -> String {
    match v {
        Some(s) if s.is_exact() => s.to_string(),
        _ => String::new(),
    }
}

impl Row {
    fn fields(&self) -> [String; 16] {
        [
            opt(&self.sweep),
            self.kind.clone(),
            opt(&self.n),
            opt(&self.param),
            opt(&self.t_index),
            opt(&self.t),
            opt(&self.seed_index),
            opt(&self.seed),
            float(&self.value),
            exact(&self.value),
            float(&self.limit),
            exact(&self.limit),
            float(&self.error),
            self.tag.clone(),
            opt(&self.std_error),
            self.note.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub digest: String,
    pub canonical: String,
    pub rows: Vec<Row>,
}

impl ResultRecord {
    pub fn new(config: &ExperimentConfig, rows: Vec<Row>) -> ResultRecord {
        ResultRecord {
            digest: config.digest(),
            canonical: config.canonical(),
            rows,
        }
    }

    pub fn write_header(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "# skewerg {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# config_sha256 {}", self.digest)?;
        for line in self.canonical.lines() {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }

    /// CSV header line and rows, without the `#` block.
    pub fn write_table(&self, out: &mut impl Write, with_columns: bool) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        if with_columns {
            w.write_record(COLUMNS).map_err(io)?;
        }
        for row in &self.rows {
            w.write_record(row.fields()).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write(&self, out: &mut impl Write) -> Result<(), CliError> {
        self.write_header(out).map_err(|e| CliError::Io(e.to_string()))?;
        self.write_table(out, true)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        buf
    }
}

/// Strips the `#` header, leaving the data table.
pub fn data_table(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}
