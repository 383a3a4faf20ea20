use std::cmp::Ordering;

use super::CliError;

/// Column order of every study CSV.
pub const COLUMNS: [&str; 11] = [
    "study_id", "N", "h", "M", "L", "T", "error", "slope", "constant", "deviation", "notes",
];

/// One CSV record; unset columns are written empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub study_id: String,
    pub n: Option<usize>,
    pub h: Option<f64>,
    pub m: Option<f64>,
    pub l: Option<f64>,
    pub t: Option<f64>,
    pub error: Option<f64>,
    pub slope: Option<f64>,
    pub constant: Option<f64>,
    pub deviation: Option<f64>,
    pub notes: String,
}

impl Row {
    pub fn new(study_id: impl Into<String>) -> Self {
        Self {
            study_id: study_id.into(),
            ..Self::default()
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    pub fn m(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn l(mut self, l: f64) -> Self {
        self.l = Some(l);
        self
    }

    pub fn t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn error(mut self, e: f64) -> Self {
        self.error = Some(e);
        self
    }

    pub fn slope(mut self, s: f64) -> Self {
        self.slope = Some(s);
        self
    }

    pub fn constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn deviation(mut self, d: f64) -> Self {
        self.deviation = Some(d);
        self
    }

    pub fn notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    fn record(&self) -> [String; 11] {
        [
            self.study_id.clone(),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            fmt_opt(self.h),
            fmt_opt(self.m),
            fmt_opt(self.l),
            fmt_opt(self.t),
            fmt_opt(self.error),
            fmt_opt(self.slope),
            fmt_opt(self.constant),
            fmt_opt(self.deviation),
            self.notes.clone(),
        ]
    }
}

/// Shortest round-trip form: plain decimals for moderate magnitudes,
/// scientific notation otherwise.
pub fn fmt_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (a.fract() == 0.0 && a < 1e15) || (1e-3..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn cmp_opt<T>(a: &Option<T>, b: &Option<T>, cmp: impl Fn(&T, &T) -> Ordering) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => cmp(x, y),
    }
}

/// Stable sort by `(N, h, M, L)` with empty cells first.
pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        cmp_opt(&a.n, &b.n, Ord::cmp)
            .then_with(|| cmp_opt(&a.h, &b.h, f64::total_cmp))
            .then_with(|| cmp_opt(&a.m, &b.m, f64::total_cmp))
            .then_with(|| cmp_opt(&a.l, &b.l, f64::total_cmp))
    });
}

/// Serializes sorted rows below a comment line with version and config hash.
pub fn render_csv(rows: &[Row], config_hash: &str) -> Result<String, CliError> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(COLUMNS).map_err(csv_error)?;
    for r in &sorted {
        w.write_record(r.record()).map_err(csv_error)?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io {
        path: "csv buffer".into(),
        message: e.to_string(),
    })?;
    let body = String::from_utf8(body).expect("csv output is utf-8");
    Ok(format!(
        "# magnus-sim {} config_sha256={config_hash}\n{body}",
        env!("CARGO_PKG_VERSION")
    ))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io {
        path: "csv buffer".into(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(32.0), "32");
        assert_eq!(fmt_real(0.0125), "0.0125");
        assert_eq!(fmt_real(1.5e-12), "1.5e-12");
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(2.5e7), "25000000");
        assert_eq!(fmt_real(2.25e7 + 0.5), "2.25000005e7");
        for x in [1.234e-9, 0.1, 3.0e-3, 7.77e8 + 0.1] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rows_sort_with_empty_first() {
        let mut rows = vec![
            Row::new("b").n(128).h(0.1),
            Row::new("a").n(64).h(0.2),
            Row::new("c"),
            Row::new("d").n(64).h(0.1).m(4.0),
            Row::new("e").n(64).h(0.1),
        ];
        sort_rows(&mut rows);
        let ids: Vec<&str> = rows.iter().map(|r| r.study_id.as_str()).collect();
        assert_eq!(ids, ["c", "e", "d", "a", "b"]);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![Row::new("x").n(8).h(0.5).error(1e-7).notes("has, comma")];
        let text = render_csv(&rows, "abc").unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# magnus-sim ") && lines[0].ends_with("config_sha256=abc"));
        assert_eq!(lines[1], "study_id,N,h,M,L,T,error,slope,constant,deviation,notes");
        assert_eq!(lines[2], "x,8,0.5,,,,1e-7,,,,\"has, comma\"");
        assert_eq!(text, render_csv(&rows, "abc").unwrap());
    }
}
