//! Report rows, CSV serialization and SVG charts.

use std::fmt::Write as _;

use affiq_core::Error;

pub const SCHEMA: &str = "# affiq-report v1";
pub const COLUMNS: [&str; 12] = [
    "suite", "case_id", "n", "m", "p", "Q", "lhs", "rhs", "ratio", "tol", "pass", "runtime_ms",
];

/// How the two sides of a row are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// lhs ≤ rhs·(1 + tol).
    AtMost,
    /// lhs ≥ rhs·(1 − tol).
    AtLeast,
    /// |lhs/rhs − 1| ≤ tol.
    Equal,
    /// lhs > 0; rhs is 0 and the ratio column repeats lhs.
    Positive,
}

impl Relation {
    pub fn holds(&self, lhs: f64, rhs: f64, tol: f64) -> bool {
        if !(lhs.is_finite() && rhs.is_finite()) {
            return false;
        }
        match self {
            Relation::AtMost => lhs <= rhs * (1.0 + tol),
            Relation::AtLeast => lhs >= rhs * (1.0 - tol),
            Relation::Equal => rhs != 0.0 && (lhs / rhs - 1.0).abs() <= tol,
            Relation::Positive => lhs > 0.0,
        }
    }

    pub fn ratio(&self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Positive => lhs,
            _ => lhs / rhs,
        }
    }

    pub fn is_inequality(&self) -> bool {
        matches!(self, Relation::AtMost | Relation::AtLeast)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Fail,
    Error(String),
}

impl Outcome {
    pub fn is_pass(&self) -> bool {
        *self == Outcome::Pass
    }

    fn cell(&self) -> String {
        match self {
            Outcome::Pass => "true".into(),
            Outcome::Fail => "false".into(),
            Outcome::Error(t) => format!("error:{t}"),
        }
    }

    fn parse(s: &str) -> Outcome {
        match s {
            "true" => Outcome::Pass,
            "false" => Outcome::Fail,
            _ => Outcome::Error(s.strip_prefix("error:").unwrap_or(s).to_string()),
        }
    }
}

/// Short token naming an error kind.
pub fn error_token(e: &Error) -> String {
    match e {
        Error::InvalidInput(_) => "invalid-input",
        Error::NonFinite { .. } => "non-finite",
        Error::Degenerate(_) => "degenerate",
        Error::OriginNotInterior => "origin-not-interior",
        Error::NotSpanning => "not-spanning",
        Error::Unsupported(_) => "unsupported",
        Error::NoConvergence { .. } => "no-convergence",
        Error::Parse(_) => "parse",
    }
    .to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub suite: String,
    pub case_id: String,
    pub n: usize,
    /// 0 when the row has no Q.
    pub m: usize,
    /// NaN when the row has no exponent.
    pub p: f64,
    pub q: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tol: f64,
    pub pass: Outcome,
    pub runtime_ms: u64,
}

impl Row {
    /// Tag part of the case id.
    pub fn tag(&self) -> &str {
        self.case_id.split('/').next().unwrap_or("")
    }

    pub fn label(&self) -> &str {
        self.case_id.splitn(3, '/').nth(2).unwrap_or("")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

fn parse_num(s: &str) -> f64 {
    match s {
        "" => f64::NAN,
        "inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => s.parse().unwrap_or(f64::NAN),
    }
}

impl Report {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for r in &self.rows {
            match r.pass {
                Outcome::Pass => s.passed += 1,
                Outcome::Fail => s.failed += 1,
                Outcome::Error(_) => s.errors += 1,
            }
        }
        s
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass.is_pass())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.suite.clone(),
                r.case_id.clone(),
                r.n.to_string(),
                r.m.to_string(),
                num(r.p),
                r.q.clone(),
                num(r.lhs),
                num(r.rhs),
                num(r.ratio),
                num(r.tol),
                r.pass.cell(),
                r.runtime_ms.to_string(),
            ])
            .expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
        format!("{SCHEMA}\n{body}")
    }

    pub fn from_csv(text: &str) -> Result<Report, String> {
        let body = text
            .strip_prefix(SCHEMA)
            .ok_or_else(|| format!("missing schema line '{SCHEMA}'"))?;
        let mut rd = csv::ReaderBuilder::new().from_reader(body.trim_start().as_bytes());
        let header = rd.headers().map_err(|e| e.to_string())?.clone();
        if header.iter().ne(COLUMNS) {
            return Err("unexpected CSV header".into());
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let f = |i: usize| rec.get(i).unwrap_or("");
            rows.push(Row {
                suite: f(0).into(),
                case_id: f(1).into(),
                n: f(2).parse().map_err(|_| "bad n")?,
                m: f(3).parse().map_err(|_| "bad m")?,
                p: parse_num(f(4)),
                q: f(5).into(),
                lhs: parse_num(f(6)),
                rhs: parse_num(f(7)),
                ratio: parse_num(f(8)),
                tol: parse_num(f(9)),
                pass: Outcome::parse(f(10)),
                runtime_ms: f(11).parse().map_err(|_| "bad runtime")?,
            });
        }
        Ok(Report { rows })
    }

    /// One chart per suite: ratio against case index, with 1 ± tol drawn as
    /// short ticks at each row.
    pub fn to_svg(&self) -> String {
        let mut suites: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !suites.contains(&r.suite.as_str()) {
                suites.push(&r.suite);
            }
        }
        let (w, h, pad) = (720.0, 220.0, 40.0);
        let total = h * suites.len().max(1) as f64;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{total}" font-family="sans-serif" font-size="11">"#
        );
        for (k, name) in suites.iter().enumerate() {
            let rows: Vec<&Row> = self.rows.iter().filter(|r| r.suite == *name).collect();
            let y0 = k as f64 * h;
            let finite: Vec<f64> = rows
                .iter()
                .map(|r| r.ratio)
                .filter(|x| x.is_finite())
                .collect();
            let (mut lo, mut hi) = finite
                .iter()
                .fold((1.0f64, 1.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
            for r in &rows {
                if r.tol.is_finite() && r.tol > 0.0 {
                    lo = lo.min(1.0 - r.tol);
                    hi = hi.max(1.0 + r.tol);
                }
            }
            let span = (hi - lo).max(1e-9);
            let (lo, hi) = (lo - 0.05 * span, hi + 0.05 * span);
            let px = |i: usize| pad + (w - 2.0 * pad) * (i as f64 + 0.5) / rows.len().max(1) as f64;
            let py = |v: f64| y0 + h - pad / 2.0 - (h - 1.5 * pad) * (v - lo) / (hi - lo);
            let _ = writeln!(
                s,
                r#"<text x="{pad}" y="{}">{name} ({} rows, ratio {lo:.4} to {hi:.4})</text>"#,
                y0 + 16.0,
                rows.len()
            );
            let _ = writeln!(
                s,
                r##"<rect x="{pad}" y="{}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
                py(hi),
                w - 2.0 * pad,
                py(lo) - py(hi)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{pad}" x2="{}" y1="{y}" y2="{y}" stroke="#888" stroke-dasharray="4 3"/>"##,
                w - pad,
                y = py(1.0)
            );
            let mut path = String::new();
            for (i, r) in rows.iter().enumerate() {
                if !r.ratio.is_finite() {
                    continue;
                }
                let cmd = if path.is_empty() { 'M' } else { 'L' };
                let _ = write!(path, "{cmd}{:.2},{:.2} ", px(i), py(r.ratio));
                if r.tol.is_finite() && r.tol > 0.0 {
                    for v in [1.0 - r.tol, 1.0 + r.tol] {
                        let _ = writeln!(
                            s,
                            r##"<line x1="{:.2}" x2="{:.2}" y1="{y:.2}" y2="{y:.2}" stroke="#d33"/>"##,
                            px(i) - 2.0,
                            px(i) + 2.0,
                            y = py(v)
                        );
                    }
                }
            }
            let _ = writeln!(
                s,
                r##"<path d="{}" fill="none" stroke="#236" stroke-width="1"/>"##,
                path.trim_end()
            );
            for (i, r) in rows.iter().enumerate() {
                if r.ratio.is_finite() {
                    let color = if r.pass.is_pass() { "#236" } else { "#d33" };
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="1.8" fill="{color}"/>"#,
                        px(i),
                        py(r.ratio)
                    );
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(case: &str, ratio: f64, pass: Outcome) -> Row {
        Row {
            suite: "relate".into(),
            case_id: case.into(),
            n: 2,
            m: 1,
            p: 1.5,
            q: "segment".into(),
            lhs: ratio,
            rhs: 1.0,
            ratio,
            tol: 0.01,
            pass,
            runtime_ms: 0,
        }
    }

    #[test]
    fn relations() {
        assert!(Relation::AtMost.holds(1.005, 1.0, 0.01));
        assert!(!Relation::AtMost.holds(1.02, 1.0, 0.01));
        assert!(Relation::AtLeast.holds(0.995, 1.0, 0.01));
        assert!(Relation::Equal.holds(0.99, 1.0, 0.011));
        assert!(!Relation::Equal.holds(f64::NAN, 1.0, 0.5));
        assert!(Relation::Positive.holds(1e-9, 0.0, 0.0));
        assert!(!Relation::Positive.holds(0.0, 0.0, 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let mut r = Report {
            rows: vec![
                row("radial-equality/0000/cone", 0.999, Outcome::Pass),
                row("radial-equality/0001/x,y", 1.2, Outcome::Error("no-convergence".into())),
            ],
        };
        r.rows[1].p = f64::INFINITY;
        r.rows[1].lhs = f64::NAN;
        let text = r.to_csv();
        assert!(text.starts_with("# affiq-report v1\nsuite,case_id,n,m,p,Q,lhs,rhs,ratio,tol,pass,runtime_ms\n"));
        let back = Report::from_csv(&text).unwrap();
        assert_eq!(back.rows.len(), 2);
        assert_eq!(back.rows[0], r.rows[0]);
        assert_eq!(back.rows[1].case_id, "radial-equality/0001/x,y");
        assert!(back.rows[1].p.is_infinite() && back.rows[1].lhs.is_nan());
        assert_eq!(back.rows[1].pass, Outcome::Error("no-convergence".into()));
        assert_eq!(back.summary(), Summary { passed: 1, failed: 0, errors: 1 });
    }

    #[test]
    fn svg_has_one_chart_per_suite() {
        let mut r = Report {
            rows: vec![row("a/0000/x", 1.0, Outcome::Pass), row("a/0001/y", 0.98, Outcome::Fail)],
        };
        let mut other = row("b/0000/z", 1.0, Outcome::Pass);
        other.suite = "petty".into();
        r.rows.push(other);
        let svg = r.to_svg();
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
