use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

use super::kernels::Variant;
use super::stats::{ratio, RatioCell, StatsError, Summary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("table has no rows")]
    EmptyTable,
    #[error("row {config}/{bench} has no value for column '{column}'")]
    MissingCell {
        config: String,
        bench: String,
        column: &'static str,
    },
    #[error("unknown reference configuration '{0}'")]
    UnknownReference(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableKind {
    AbsoluteMicro,
    RelativeMicro,
    AbsoluteLarger,
    RelativeLarger,
    NoConversion,
}

/// One measurement column. Ratio columns divide the first variant by the
/// second; `CrossOverReference` divides by another configuration's cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Host,
    Prolog,
    Cross,
    CrossNc,
    CrossOverHost,
    CrossOverProlog,
    CrossOverReference,
    CrossOverNc,
}

impl Column {
    pub fn plain_header(self) -> &'static str {
        match self {
            Column::Host => "Host",
            Column::Prolog => "Prolog",
            Column::Cross => "Host -> Prolog",
            Column::CrossNc => "Host -nc-> Prolog",
            Column::CrossOverHost => "cross / host",
            Column::CrossOverProlog => "cross / Prolog",
            Column::CrossOverReference => "cross / reference",
            Column::CrossOverNc => "cross / nc",
        }
    }

    fn latex_header(self) -> &'static str {
        match self {
            Column::Host => r"\emph{Host}",
            Column::Prolog => r"\emph{Prolog}",
            Column::Cross => r"\emph{Host} $\rightarrow$ \emph{Prolog}",
            Column::CrossNc => r"\emph{Host} $\overset{nc}{\rightarrow}$ \emph{Prolog}",
            Column::CrossOverHost => {
                r"$\frac{\mbox{\emph{Host}}\rightarrow\mbox{\emph{Prolog}}}{\mbox{\emph{Host}}}$"
            }
            Column::CrossOverProlog => {
                r"$\frac{\mbox{\emph{Host}}\rightarrow\mbox{\emph{Prolog}}}{\mbox{\emph{Prolog}}}$"
            }
            Column::CrossOverReference => {
                r"$\frac{\mbox{\emph{Host}}\rightarrow\mbox{\emph{Prolog}}}{\mbox{\emph{Reference}}}$"
            }
            Column::CrossOverNc => {
                r"$\frac{\mbox{\emph{Host}}\rightarrow\mbox{\emph{Prolog}}}{\mbox{\emph{Host}}\overset{nc}{\rightarrow}\mbox{\emph{Prolog}}}$"
            }
        }
    }
}

impl TableKind {
    pub fn columns(self) -> &'static [Column] {
        use Column::*;
        match self {
            TableKind::AbsoluteMicro => &[Host, Prolog, Cross],
            TableKind::RelativeMicro => &[CrossOverHost, CrossOverProlog, CrossOverReference],
            TableKind::AbsoluteLarger => &[Prolog, Cross],
            TableKind::RelativeLarger => &[CrossOverProlog, CrossOverReference],
            TableKind::NoConversion => &[CrossNc, CrossOverNc],
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            TableKind::AbsoluteMicro => "Absolute times, micro benchmarks",
            TableKind::RelativeMicro => "Relative times, micro benchmarks",
            TableKind::AbsoluteLarger => "Absolute times, larger benchmarks",
            TableKind::RelativeLarger => "Relative times, larger benchmarks",
            TableKind::NoConversion => "Absolute and relative times, no conversion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(Summary),
    Ratio(RatioCell),
    /// Explicitly unavailable, rendered "n/a".
    NotAvailable,
}

impl Cell {
    pub fn plain_text(&self) -> String {
        match self {
            Cell::Value(s) => s.cell_text(),
            Cell::Ratio(r) => r.cell_text(),
            Cell::NotAvailable => "n/a".to_owned(),
        }
    }

    /// The two `&`-separated tabular fields of this cell.
    pub fn latex_text(&self) -> String {
        match self {
            Cell::Value(s) => format!("& {:.3}s & {{\\tiny$\\pm {:.3}$}}", s.mean, s.ci_half_width),
            Cell::Ratio(r) => match r.ci_half_width {
                Some(ci) => format!("& {:.3}$\\times$ & {{\\tiny$\\pm {ci:.3}$}}", r.value),
                None => format!("&{:.3}$\\times$ & ~~", r.value),
            },
            Cell::NotAvailable => "& n/a & ~~".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub config: String,
    pub bench: String,
    cells: IndexMap<Column, Cell>,
}

impl Row {
    pub fn cell(&self, column: Column) -> Option<&Cell> {
        self.cells.get(&column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Plain,
    Latex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    kind: TableKind,
    rows: Vec<Row>,
}

impl ReportTable {
    pub fn new(kind: TableKind) -> Self {
        ReportTable {
            kind,
            rows: Vec::new(),
        }
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Sets one cell, creating the row on first use. Rows keep insertion order.
    pub fn set(&mut self, config: &str, bench: &str, column: Column, cell: Cell) -> &mut Self {
        let pos = match self
            .rows
            .iter()
            .position(|r| r.config == config && r.bench == bench)
        {
            Some(p) => p,
            None => {
                self.rows.push(Row {
                    config: config.to_owned(),
                    bench: bench.to_owned(),
                    cells: IndexMap::new(),
                });
                self.rows.len() - 1
            }
        };
        self.rows[pos].cells.insert(column, cell);
        self
    }

    /// Adds a full row whose cells follow the kind's column order.
    pub fn push_row(&mut self, config: &str, bench: &str, cells: &[Cell]) -> &mut Self {
        for (col, cell) in self.kind.columns().iter().zip(cells) {
            self.set(config, bench, *col, *cell);
        }
        self
    }

    /// Derives a table of `kind` from measured summaries. Ratio columns are
    /// ratios of means; `reference` names the configuration the
    /// cross/reference column divides by.
    pub fn from_results(kind: TableKind, results: &Results, reference: Option<&str>) -> Result<Self, ReportError> {
        if let Some(r) = reference {
            if !results.configs().any(|c| c == r) {
                return Err(ReportError::UnknownReference(r.to_owned()));
            }
        }
        let mut table = ReportTable::new(kind);
        for (config, bench) in results.rows() {
            for &col in kind.columns() {
                let get = |v: Variant| results.get(config, bench, v);
                let div = |num: Option<Measured>, den: Option<Measured>| -> Result<Option<Cell>, ReportError> {
                    Ok(match (num, den) {
                        (Some(Measured::Time(n)), Some(Measured::Time(d))) => Some(Cell::Ratio(ratio(&n, &d)?)),
                        (Some(_), Some(_)) => Some(Cell::NotAvailable),
                        _ => None,
                    })
                };
                let cell = match col {
                    Column::Host => get(Variant::HostOnly).map(Measured::cell),
                    Column::Prolog => get(Variant::PrologOnly).map(Measured::cell),
                    Column::Cross => get(Variant::Cross).map(Measured::cell),
                    Column::CrossNc => get(Variant::CrossNc).map(Measured::cell),
                    Column::CrossOverHost => div(get(Variant::Cross), get(Variant::HostOnly))?,
                    Column::CrossOverProlog => div(get(Variant::Cross), get(Variant::PrologOnly))?,
                    Column::CrossOverNc => div(get(Variant::Cross), get(Variant::CrossNc))?,
                    Column::CrossOverReference => match reference {
                        Some(r) => div(get(Variant::Cross), results.get(r, bench, Variant::Cross))?,
                        None => None,
                    },
                };
                if let Some(cell) = cell {
                    table.set(config, bench, col, cell);
                }
            }
            if !table.rows.iter().any(|r| r.config == config && r.bench == bench) {
                table.rows.push(Row {
                    config: config.to_owned(),
                    bench: bench.to_owned(),
                    cells: IndexMap::new(),
                });
            }
        }
        Ok(table)
    }

    fn check_complete(&self) -> Result<(), ReportError> {
        if self.rows.is_empty() {
            return Err(ReportError::EmptyTable);
        }
        for row in &self.rows {
            for &col in self.kind.columns() {
                if !row.cells.contains_key(&col) {
                    return Err(ReportError::MissingCell {
                        config: row.config.clone(),
                        bench: row.bench.clone(),
                        column: col.plain_header(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Consecutive rows sharing a configuration label.
    fn groups(&self) -> Vec<&[Row]> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.rows.len() {
            if i == self.rows.len() || self.rows[i].config != self.rows[start].config {
                out.push(&self.rows[start..i]);
                start = i;
            }
        }
        out
    }
}

/// Renders `table`. Fails on an empty table or a row missing a cell that
/// was not explicitly marked unavailable.
pub fn emit_table(table: &ReportTable, format: Format) -> Result<String, ReportError> {
    table.check_complete()?;
    Ok(match format {
        Format::Plain => emit_plain(table),
        Format::Latex => emit_latex(table),
    })
}

fn emit_plain(table: &ReportTable) -> String {
    let cols = table.kind.columns();
    let mut grid: Vec<Vec<String>> = vec![std::iter::once("Config".to_owned())
        .chain(std::iter::once("Benchmark".to_owned()))
        .chain(cols.iter().map(|c| c.plain_header().to_owned()))
        .collect()];
    for group in table.groups() {
        for (i, row) in group.iter().enumerate() {
            let label = if i == 0 { row.config.clone() } else { String::new() };
            let mut line = vec![label, row.bench.clone()];
            line.extend(cols.iter().map(|c| row.cells[c].plain_text()));
            grid.push(line);
        }
    }
    let widths: Vec<usize> = (0..grid[0].len())
        .map(|j| grid.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "{}", table.kind.title());
    for (i, line) in grid.iter().enumerate() {
        let mut text = String::new();
        for (j, field) in line.iter().enumerate() {
            let pad = widths[j] - field.chars().count();
            if j > 0 {
                text.push_str("  ");
            }
            // Text columns align left, measurements right.
            if j < 2 {
                text.push_str(field);
                text.extend(std::iter::repeat_n(' ', pad));
            } else {
                text.extend(std::iter::repeat_n(' ', pad));
                text.push_str(field);
            }
        }
        let _ = writeln!(out, "{}", text.trim_end());
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            let _ = writeln!(out, "{}", "-".repeat(total));
        }
    }
    out
}

/// The rows of one configuration group, starting with the `\multirow` label.
pub fn latex_group(rows: &[Row], columns: &[Column]) -> String {
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        if i == 0 {
            let _ = writeln!(out, "\\multirow{{{}}}{{*}}{{{}}} & {}", rows.len(), row.config, row.bench);
        } else {
            let _ = writeln!(out, " & {}", row.bench);
        }
        for c in columns {
            let _ = writeln!(out, "{}", row.cells[c].latex_text());
        }
        out.push_str("\\\\\n");
    }
    out
}

fn emit_latex(table: &ReportTable) -> String {
    let cols = table.kind.columns();
    let mut out = String::new();
    let _ = writeln!(out, "\\begin{{tabular}}{{ll{}}}", "rl".repeat(cols.len()));
    out.push_str("\\toprule\n\\multicolumn{1}{c}{VM}&Benchmark\n");
    for c in cols {
        let _ = writeln!(out, "& \\multicolumn{{2}}{{c}}{{{}}}", c.latex_header());
    }
    out.push_str("\\\\\n");
    for group in table.groups() {
        out.push_str("\\midrule\n");
        out.push_str(&latex_group(group, cols));
    }
    out.push_str("\\bottomrule\n\\end{tabular}\n");
    out
}

/// A measured summary or an explicit "unavailable" marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measured {
    Time(Summary),
    Unavailable,
}

impl Measured {
    fn cell(self) -> Cell {
        match self {
            Measured::Time(s) => Cell::Value(s),
            Measured::Unavailable => Cell::NotAvailable,
        }
    }
}

/// Summaries keyed by (configuration, benchmark, variant), in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Results {
    entries: IndexMap<(String, String, Variant), Measured>,
}

impl Results {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, config: &str, bench: &str, variant: Variant, m: Measured) {
        self.entries
            .insert((config.to_owned(), bench.to_owned(), variant), m);
    }

    pub fn get(&self, config: &str, bench: &str, variant: Variant) -> Option<Measured> {
        self.entries
            .get(&(config.to_owned(), bench.to_owned(), variant))
            .copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn configs(&self) -> impl Iterator<Item = &str> {
        let mut seen: Vec<&str> = Vec::new();
        for (c, _, _) in self.entries.keys() {
            if !seen.contains(&c.as_str()) {
                seen.push(c);
            }
        }
        seen.into_iter()
    }

    /// Distinct (configuration, benchmark) pairs, grouped by configuration.
    pub fn rows(&self) -> Vec<(&str, &str)> {
        let mut out: Vec<(&str, &str)> = Vec::new();
        for config in self.configs() {
            for (c, b, _) in self.entries.keys() {
                if c == config && !out.contains(&(c.as_str(), b.as_str())) {
                    out.push((c, b));
                }
            }
        }
        out
    }
}
