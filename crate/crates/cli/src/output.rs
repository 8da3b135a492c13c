//! CSV datasets.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use linklab_core::analytic::{Method, Metric, PerformanceCurve, PerformancePoint};

pub const CSV_HEADER: &str = "gamma_avg_db,metric,metric_kind,method,ci_half_width,n_users,regime,relay";

/// 12 significant digits, scientific notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

/// The value a number takes after a trip through [`format_value`].
pub fn quantize(x: f64) -> f64 {
    format_value(x).parse().expect("formatted float parses")
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn to_csv(curves: &[PerformanceCurve<f64>]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for c in curves {
        let mut pts: Vec<&PerformancePoint<f64>> = c.points.iter().collect();
        pts.sort_by(|a, b| a.gamma_avg_db.total_cmp(&b.gamma_avg_db));
        for p in pts {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                format_value(p.gamma_avg_db),
                format_value(p.metric),
                p.metric_kind,
                p.method,
                format_value(p.ci_half_width),
                c.n_users,
                escape(&c.regime),
                escape(&c.relay)
            ));
        }
    }
    s
}

pub fn emit_csv(curves: &[PerformanceCurve<f64>], path: &Path) -> io::Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(to_csv(curves).as_bytes())
}

fn split_row(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(ch) = chars.next() {
        match (ch, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

/// Reads a file written by [`emit_csv`] back into curves. Consecutive rows
/// sharing (method, metric, N, regime, relay) form one curve.
pub fn read_csv(text: &str) -> Result<Vec<PerformanceCurve<f64>>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("unexpected header".into());
    }
    let mut curves: Vec<PerformanceCurve<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let f = split_row(line);
        if f.len() != 8 {
            return Err(format!("row {}: expected 8 fields", i + 2));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 2));
        let metric_kind: Metric = f[2].parse().map_err(|e| format!("row {}: {e}", i + 2))?;
        let method: Method = f[3].parse().map_err(|e| format!("row {}: {e}", i + 2))?;
        let n_users: usize = f[5].parse().map_err(|e| format!("row {}: {e}", i + 2))?;
        let p = PerformancePoint {
            gamma_avg_db: num(&f[0])?,
            metric: num(&f[1])?,
            metric_kind,
            method,
            ci_half_width: num(&f[4])?,
        };
        let same = curves.last().is_some_and(|c| {
            c.method == method
                && c.metric_kind == metric_kind
                && c.n_users == n_users
                && c.regime == f[6]
                && c.relay == f[7]
        });
        if !same {
            curves.push(PerformanceCurve {
                method,
                metric_kind,
                n_users,
                regime: f[6].clone(),
                relay: f[7].clone(),
                points: Vec::new(),
            });
        }
        curves.last_mut().unwrap().points.push(p);
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_value(0.1), "1.00000000000e-1");
        assert_eq!(format_value(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(quantize(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn quoted_fields() {
        assert_eq!(split_row("a,\"b,c\",\"d\"\"e\""), vec!["a", "b,c", "d\"e"]);
    }

    #[test]
    fn empty_set_is_header_only() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }
}
