//! Grid evaluation of series solutions, reproduction of the reference
//! comparison table, and CSV/JSON data export for the figure surfaces.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::adm_solver::SeriesSolution;
use crate::numfmt::format_significant;
use crate::special_functions::ComplexValue;
use crate::term_algebra::TermError;

/// Transcribed reference values used by the comparison table and its
/// consistency checks.
pub mod reference {
    /// One row of the reference comparison table: point, orders, the
    /// tabulated exact magnitude, the two approximate magnitudes and the
    /// two absolute-error cells, all as printed.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ReferenceRow {
        pub x: f64,
        pub t: f64,
        pub gamma: f64,
        pub delta: f64,
        pub exact: f64,
        pub cp: f64,
        pub cm: f64,
        pub err_cp: f64,
        pub err_cm: f64,
    }

    /// The (gamma, delta) pairs tabulated per point, in row order.
    pub const ORDER_PAIRS: [(f64, f64); 3] = [(0.25, 0.25), (0.75, 0.75), (1.0, 1.0)];

    /// Exact-solution magnitudes at the five diagonal points (x = t).
    pub const EXACT_DIAGONAL: [(f64, f64); 5] = [
        (0.1, 0.108060),
        (0.3, 0.324180),
        (0.5, 0.540300),
        (0.7, 0.756420),
        (0.9, 0.972540),
    ];

    /// All 15 table rows, transcribed verbatim.
    pub const TABLE: [ReferenceRow; 15] = [
        ReferenceRow {
            x: 0.1,
            t: 0.1,
            gamma: 0.25,
            delta: 0.25,
            exact: 0.108060,
            cp: 0.034850,
            cm: 0.627680,
            err_cp: 0.073309,
            err_cm: 0.519620,
        },
        ReferenceRow {
            x: 0.1,
            t: 0.1,
            gamma: 0.75,
            delta: 0.75,
            exact: 0.108060,
            cp: 0.052744,
            cm: 0.972022,
            err_cp: 0.055315,
            err_cm: 0.863962,
        },
        ReferenceRow {
            x: 0.1,
            t: 0.1,
            gamma: 1.0,
            delta: 1.0,
            exact: 0.108060,
            cp: 0.060835,
            cm: 0.058760,
            err_cp: 0.047224,
            err_cm: 0.049299,
        },
        ReferenceRow {
            x: 0.3,
            t: 0.3,
            gamma: 0.25,
            delta: 0.25,
            exact: 0.324180,
            cp: 0.061912,
            cm: 0.983617,
            err_cp: 0.262268,
            err_cm: 0.659436,
        },
        ReferenceRow {
            x: 0.3,
            t: 0.3,
            gamma: 0.75,
            delta: 0.75,
            exact: 0.324180,
            cp: 0.142055,
            cm: 0.857462,
            err_cp: 0.182126,
            err_cm: 0.533281,
        },
        ReferenceRow {
            x: 0.3,
            t: 0.3,
            gamma: 1.0,
            delta: 1.0,
            exact: 0.324180,
            cp: 0.223340,
            cm: 0.199797,
            err_cp: 0.100841,
            err_cm: 0.124384,
        },
        ReferenceRow {
            x: 0.5,
            t: 0.5,
            gamma: 0.25,
            delta: 0.25,
            exact: 0.540300,
            cp: 0.054601,
            cm: 0.975461,
            err_cp: 0.485698,
            err_cm: 0.435161,
        },
        ReferenceRow {
            x: 0.5,
            t: 0.5,
            gamma: 0.75,
            delta: 0.75,
            exact: 0.540300,
            cp: 0.198301,
            cm: 0.701852,
            err_cp: 0.341999,
            err_cm: 0.161552,
        },
        ReferenceRow {
            x: 0.5,
            t: 0.5,
            gamma: 1.0,
            delta: 1.0,
            exact: 0.540300,
            cp: 0.440288,
            cm: 0.361382,
            err_cp: 0.100012,
            err_cm: 0.178918,
        },
        ReferenceRow {
            x: 0.7,
            t: 0.7,
            gamma: 0.25,
            delta: 0.25,
            exact: 0.756420,
            cp: 0.021153,
            cm: 0.869221,
            err_cp: 0.735269,
            err_cm: 0.112798,
        },
        ReferenceRow {
            x: 0.7,
            t: 0.7,
            gamma: 0.75,
            delta: 0.75,
            exact: 0.756420,
            cp: 0.211584,
            cm: 0.523044,
            err_cp: 0.544839,
            err_cm: 0.233379,
        },
        ReferenceRow {
            x: 0.7,
            t: 0.7,
            gamma: 1.0,
            delta: 1.0,
            exact: 0.756420,
            cp: 0.711680,
            cm: 0.530550,
            err_cp: 0.044743,
            err_cm: 0.225873,
        },
        ReferenceRow {
            x: 0.9,
            t: 0.9,
            gamma: 0.25,
            delta: 0.25,
            exact: 0.972540,
            cp: 0.034267,
            cm: 0.728667,
            err_cp: 0.938276,
            err_cm: 0.243877,
        },
        ReferenceRow {
            x: 0.9,
            t: 0.9,
            gamma: 0.75,
            delta: 0.75,
            exact: 0.972540,
            cp: 0.173940,
            cm: 0.332328,
            err_cp: 0.798597,
            err_cm: 0.640216,
        },
        ReferenceRow {
            x: 0.9,
            t: 0.9,
            gamma: 1.0,
            delta: 1.0,
            exact: 0.972540,
            cp: 1.037520,
            cm: 0.694332,
            err_cp: 0.064976,
            err_cm: 0.278212,
        },
    ];
}

/// Errors from grid evaluation and export.
#[derive(Debug)]
pub enum ReportError {
    InvalidGrid(String),
    /// Evaluation failed at a specific grid node.
    Evaluation {
        x: f64,
        t: f64,
        source: TermError,
    },
    MissingFixture {
        x: f64,
        t: f64,
    },
    MismatchedSeries(String),
    Io(io::Error),
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Self::Evaluation { x, t, source } => {
                write!(f, "evaluation failed at node ({x}, {t}): {source}")
            }
            Self::MissingFixture { x, t } => {
                write!(f, "no exact reference value for the point ({x}, {t})")
            }
            Self::MismatchedSeries(msg) => write!(f, "mismatched series: {msg}"),
            Self::Io(e) => write!(f, "write failure: {e}"),
        }
    }
}

impl std::error::Error for ReportError {}

impl From<io::Error> for ReportError {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

/// A rectangular evaluation grid, open at 0 in both variables (conformable
/// reference terms carry negative x powers for gamma < 0.5).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nx: usize,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        t_min: f64,
        t_max: f64,
        nx: usize,
        nt: usize,
    ) -> Result<Self, ReportError> {
        if !(x_min > 0.0 && x_min <= x_max) || !(t_min > 0.0 && t_min <= t_max) {
            return Err(ReportError::InvalidGrid(format!(
                "need 0 < x_min <= x_max and 0 < t_min <= t_max, got x in [{x_min}, {x_max}], t in [{t_min}, {t_max}]"
            )));
        }
        if nx == 0 || nt == 0 {
            return Err(ReportError::InvalidGrid(
                "nx and nt must be positive".into(),
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            t_min,
            t_max,
            nx,
            nt,
        })
    }

    /// Default figure-surface grid: 50 x 50 nodes on [0.02, 1]^2.
    pub fn figure_default() -> Self {
        Self {
            x_min: 0.02,
            x_max: 1.0,
            t_min: 0.02,
            t_max: 1.0,
            nx: 50,
            nt: 50,
        }
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.nt)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// One evaluated grid node. `abs` is always `hypot(re, im)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRow {
    pub x: f64,
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl SampleRow {
    pub fn new(x: f64, t: f64, value: ComplexValue) -> Self {
        Self {
            x,
            t,
            re: value.re,
            im: value.im,
            abs: value.abs(),
        }
    }
}

/// One comparison-table row: recomputed approximate magnitudes for both
/// senses and their absolute errors against the exact fixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub x: f64,
    pub t: f64,
    pub gamma: f64,
    pub delta: f64,
    pub exact: f64,
    pub cp: f64,
    pub cm: f64,
    pub err_cp: f64,
    pub err_cm: f64,
}

/// Row-major samples (x outer, t inner) of the truncated series sum over
/// the grid.
pub fn evaluate_grid(
    series: &SeriesSolution,
    grid: &GridSpec,
) -> Result<Vec<SampleRow>, ReportError> {
    let mut rows = Vec::with_capacity(grid.nx * grid.nt);
    for &x in &grid.x_nodes() {
        for &t in &grid.t_nodes() {
            let value = series
                .evaluate_sum(x, t)
                .map_err(|source| ReportError::Evaluation { x, t, source })?;
            rows.push(SampleRow::new(x, t, value));
        }
    }
    Ok(rows)
}

/// Exact-magnitude fixtures for the table's evaluation points.
#[derive(Debug, Clone)]
pub struct ExactFixtures {
    points: Vec<(f64, f64, f64)>,
}

impl ExactFixtures {
    pub fn new(points: Vec<(f64, f64, f64)>) -> Self {
        Self { points }
    }

    /// The five diagonal evaluation points of the reference table.
    pub fn reference_points() -> Vec<(f64, f64)> {
        reference::EXACT_DIAGONAL
            .iter()
            .map(|&(p, _)| (p, p))
            .collect()
    }

    /// Reference exact magnitudes at the diagonal points (x = t).
    pub fn reference() -> Self {
        Self::new(
            reference::EXACT_DIAGONAL
                .iter()
                .map(|&(p, e)| (p, p, e))
                .collect(),
        )
    }

    fn lookup(&self, x: f64, t: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|&&(px, pt, _)| (px - x).abs() <= 1e-9 && (pt - t).abs() <= 1e-9)
            .map(|&(_, _, e)| e)
    }
}

/// Build comparison-table rows from paired Caputo/conformable series at the
/// given evaluation points. Every point must have an exact fixture.
///
/// `cp` and `cm` run over the same (gamma, delta) list; the output is
/// point-major, with one row per series pair per point, matching the
/// reference table layout.
pub fn table1(
    cp: &[SeriesSolution],
    cm: &[SeriesSolution],
    points: &[(f64, f64)],
    fixtures: &ExactFixtures,
) -> Result<Vec<Table1Row>, ReportError> {
    if cp.len() != cm.len() {
        return Err(ReportError::MismatchedSeries(format!(
            "{} Caputo series vs {} conformable series",
            cp.len(),
            cm.len()
        )));
    }
    for (a, b) in cp.iter().zip(cm) {
        if (a.spec.gamma - b.spec.gamma).abs() > 1e-12
            || (a.spec.delta - b.spec.delta).abs() > 1e-12
        {
            return Err(ReportError::MismatchedSeries(
                "paired series must share gamma and delta".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(points.len() * cp.len());
    for &(x, t) in points {
        let exact = fixtures
            .lookup(x, t)
            .ok_or(ReportError::MissingFixture { x, t })?;
        for (a, b) in cp.iter().zip(cm) {
            let cp_value = a
                .evaluate_sum(x, t)
                .map_err(|source| ReportError::Evaluation { x, t, source })?
                .abs();
            let cm_value = b
                .evaluate_sum(x, t)
                .map_err(|source| ReportError::Evaluation { x, t, source })?
                .abs();
            rows.push(Table1Row {
                x,
                t,
                gamma: a.spec.gamma,
                delta: a.spec.delta,
                exact,
                cp: cp_value,
                cm: cm_value,
                err_cp: (exact - cp_value).abs(),
                err_cm: (exact - cm_value).abs(),
            });
        }
    }
    Ok(rows)
}

/// A record that knows its CSV header and field list.
pub trait CsvRecord {
    const HEADER: &'static str;
    fn fields(&self) -> Vec<f64>;
}

impl CsvRecord for SampleRow {
    const HEADER: &'static str = "x,t,re,im,abs";
    fn fields(&self) -> Vec<f64> {
        vec![self.x, self.t, self.re, self.im, self.abs]
    }
}

impl CsvRecord for Table1Row {
    const HEADER: &'static str = "x,t,gamma,delta,exact,cp,cm,err_cp,err_cm";
    fn fields(&self) -> Vec<f64> {
        vec![
            self.x,
            self.t,
            self.gamma,
            self.delta,
            self.exact,
            self.cp,
            self.cm,
            self.err_cp,
            self.err_cm,
        ]
    }
}

/// Write rows as CSV: fixed header, comma separators, line-feed endings,
/// every value with 9 significant digits, no locale formatting.
pub fn export_csv<R: CsvRecord>(rows: &[R], out: &mut dyn Write) -> Result<(), ReportError> {
    out.write_all(R::HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        let line = row
            .fields()
            .iter()
            .map(|&v| format_significant(v, 9))
            .collect::<Vec<_>>()
            .join(",");
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Write rows as a JSON array of objects with the same field names as the
/// CSV header, in declaration order, at full float precision (so a parse
/// round-trip is exact).
pub fn export_json<R: Serialize>(rows: &[R], out: &mut dyn Write) -> Result<(), ReportError> {
    let text =
        serde_json::to_string_pretty(rows).map_err(|e| ReportError::Io(io::Error::other(e)))?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}
