use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::SchemeResult;
use crate::de::round_to;
use crate::stats::SummaryStats;
use crate::{Error, Result};

/// Share of repetitions each source won for one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinTable {
    pub tolerance: f64,
    pub repeats: usize,
    pub schemes: Vec<String>,
    pub wins: Vec<usize>,
    /// `wins / repeats * 100`; the row may add up to more than 100.
    pub percent: Vec<f64>,
    /// Repetitions where two or more sources reached the same rounded best.
    pub tied_repeats: usize,
}

impl WinTable {
    /// Percentage of repetitions that had a tie on the rounded best.
    pub fn tie_mass(&self) -> f64 {
        100.0 * self.tied_repeats as f64 / self.repeats as f64
    }

    pub fn percent_of(&self, scheme: &str) -> Option<f64> {
        self.schemes.iter().position(|s| s == scheme).map(|i| self.percent[i])
    }
}

/// Per repetition, the winners are the sources with the lowest best fitness
/// rounded to multiples of `tol`, and among those the earliest to reach it.
/// Everyone still tied wins.
pub fn win_table(results: &[SchemeResult], tol: f64) -> Result<WinTable> {
    if results.is_empty() {
        return Err(Error::invalid("win table needs at least one source"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tie tolerance must be positive"));
    }
    let repeats = results[0].records.len();
    if let Some(bad) = results.iter().find(|s| s.records.len() != repeats) {
        return Err(Error::invalid(format!(
            "source {} has {} repeats, expected {repeats}",
            bad.label,
            bad.records.len()
        )));
    }
    if repeats == 0 {
        return Err(Error::invalid("win table needs at least one repeat"));
    }
    let mut wins = vec![0usize; results.len()];
    let mut tied_repeats = 0;
    for r in 0..repeats {
        let keys: Vec<(f64, usize)> = results
            .iter()
            .map(|s| {
                let rec = &s.records[r];
                (round_to(rec.final_best, tol), rec.first_hit_generation(tol))
            })
            .collect();
        let best_value = keys.iter().map(|k| k.0).min_by(f64::total_cmp).expect("non-empty");
        let at_best: Vec<usize> = (0..keys.len()).filter(|&i| keys[i].0.total_cmp(&best_value).is_eq()).collect();
        if at_best.len() > 1 {
            tied_repeats += 1;
        }
        let first = at_best.iter().map(|&i| keys[i].1).min().expect("non-empty");
        for i in at_best {
            if keys[i].1 == first {
                wins[i] += 1;
            }
        }
    }
    Ok(WinTable {
        tolerance: tol,
        repeats,
        schemes: results.iter().map(|s| s.label.clone()).collect(),
        percent: wins.iter().map(|&w| 100.0 * w as f64 / repeats as f64).collect(),
        wins,
        tied_repeats,
    })
}

/// One markdown table, one row per function. All rows must compare the same
/// sources in the same order.
pub fn win_tables_markdown(rows: &[(String, WinTable)]) -> Result<String> {
    let Some((_, first)) = rows.first() else {
        return Err(Error::invalid("no win tables to format"));
    };
    let mut out = String::new();
    let _ = writeln!(out, "| Function | {} |", first.schemes.join(" | "));
    let _ = writeln!(out, "|---|{}", "---:|".repeat(first.schemes.len()));
    for (func, t) in rows {
        if t.schemes != first.schemes {
            return Err(Error::invalid(format!("win table for {func} compares different sources")));
        }
        let cells: Vec<String> = t.percent.iter().map(|p| format!("{p:.0}")).collect();
        let _ = writeln!(out, "| {func} | {} |", cells.join(" | "));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub scheme: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

impl SummaryRow {
    pub fn new(function: impl Into<String>, scheme: impl Into<String>, s: &SummaryStats) -> Self {
        SummaryRow {
            function: function.into(),
            scheme: scheme.into(),
            min: s.min,
            max: s.max,
            mean: s.mean,
            median: s.median,
            std: s.std,
        }
    }

    fn numbers(&self) -> [f64; 5] {
        [self.min, self.max, self.mean, self.median, self.std]
    }
}

pub fn summary_rows(function: &str, results: &[SchemeResult]) -> Vec<SummaryRow> {
    results.iter().map(|s| SummaryRow::new(function, &s.label, &s.summary)).collect()
}

const SUMMARY_HEADER: &str = "| Function | Source | Min. | Max | Mean | Med. | Std. dev. |";

/// Markdown with every value at three decimals.
pub fn summary_table_markdown(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SUMMARY_HEADER}");
    let _ = writeln!(out, "|---|---|---:|---:|---:|---:|---:|");
    for r in rows {
        let nums: Vec<String> = r.numbers().iter().map(|v| format!("{v:.3}")).collect();
        let _ = writeln!(out, "| {} | {} | {} |", r.function, r.scheme, nums.join(" | "));
    }
    out
}

/// Inverse of [`summary_table_markdown`], up to the three-decimal rounding.
pub fn parse_summary_markdown(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some(SUMMARY_HEADER) {
        return Err(Error::invalid("summary table header not found"));
    }
    lines.next();
    lines
        .map(|line| {
            let cells: Vec<&str> = line.trim_matches('|').split('|').map(str::trim).collect();
            if cells.len() != 7 {
                return Err(Error::invalid(format!("summary row needs 7 cells: {line}")));
            }
            let num = |i: usize| {
                cells[i]
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number {:?} in summary row", cells[i])))
            };
            Ok(SummaryRow {
                function: cells[0].to_string(),
                scheme: cells[1].to_string(),
                min: num(2)?,
                max: num(3)?,
                mean: num(4)?,
                median: num(5)?,
                std: num(6)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::de::RunRecord;
    use crate::stats::summary;

    fn record(final_best: f64, hit: usize) -> RunRecord {
        let mut traj = vec![final_best + 50.0; hit];
        traj.resize(10, final_best);
        RunRecord {
            best_by_generation: traj,
            final_best,
            final_vector: vec![],
            evaluations: 0,
        }
    }

    fn scheme(label: &str, recs: Vec<RunRecord>) -> SchemeResult {
        SchemeResult::new(label, recs).unwrap()
    }

    #[test]
    fn tie_rule() {
        let res = vec![
            scheme("a", vec![record(-600.0, 3)]),
            scheme("b", vec![record(-600.0002, 3)]),
            scheme("c", vec![record(-599.9, 1)]),
        ];
        let t = win_table(&res, 1e-3).unwrap();
        assert_eq!(t.wins, vec![1, 1, 0]);
        assert_eq!(t.tied_repeats, 1);
        // the tie is broken by the earlier first hit
        let res = vec![scheme("a", vec![record(-600.0, 4)]), scheme("b", vec![record(-600.0, 2)])];
        assert_eq!(win_table(&res, 1e-3).unwrap().wins, vec![0, 1]);
    }

    #[test]
    fn strict_order_has_unique_winner() {
        let res = vec![
            scheme("a", vec![record(3.0, 0), record(1.0, 0)]),
            scheme("b", vec![record(2.0, 0), record(4.0, 0)]),
        ];
        let t = win_table(&res, 1e-3).unwrap();
        assert_eq!(t.wins, vec![1, 1]);
        assert_eq!(t.percent, vec![50.0, 50.0]);
    }

    #[test]
    fn counting_fixture() {
        // A wins 7, B wins 2, one tie
        let mut a = vec![];
        let mut b = vec![];
        for r in 0..10 {
            let (fa, fb) = match r {
                0..=6 => (1.0, 2.0),
                7 | 8 => (2.0, 1.0),
                _ => (5.0, 5.0),
            };
            a.push(record(fa, 2));
            b.push(record(fb, 2));
        }
        let t = win_table(&[scheme("A", a), scheme("B", b)], 1e-3).unwrap();
        assert_eq!(t.percent, vec![80.0, 30.0]);
        assert!(t.percent.iter().sum::<f64>() > 100.0);
    }

    #[test]
    fn mismatched_repeats() {
        let res = vec![scheme("a", vec![record(1.0, 0)]), scheme("b", vec![record(1.0, 0), record(2.0, 0)])];
        assert!(win_table(&res, 1e-3).is_err());
    }

    #[test]
    fn tolerance_moves_only_tie_mass() {
        // finals that collide at coarse tolerances and separate at fine ones
        let mut mt = crate::source::Mt19937::new(17);
        let schemes: Vec<SchemeResult> = (0..3)
            .map(|s| {
                let recs = (0..40)
                    .map(|_| {
                        let v = -600.0 + (mt.next_f64() * 20.0).floor() * 0.004 + mt.next_f64() * 1e-4;
                        record(v, (mt.next_f64() * 3.0) as usize)
                    })
                    .collect();
                scheme(&format!("s{s}"), recs)
            })
            .collect();
        let tables: Vec<WinTable> = [1e-2, 1e-3, 1e-6].iter().map(|&t| win_table(&schemes, t).unwrap()).collect();
        let bound = tables.iter().map(WinTable::tie_mass).fold(0.0, f64::max);
        assert!(bound > 0.0);
        for x in &tables {
            for y in &tables {
                for i in 0..3 {
                    assert!((x.percent[i] - y.percent[i]).abs() <= bound + 1e-9);
                }
            }
        }
    }

    #[test]
    fn summary_fixture_row() {
        let s = summary(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let md = summary_table_markdown(&[SummaryRow::new("f1", "mt", &s)]);
        assert!(md.contains("| f1 | mt | 1.000 | 4.000 | 2.500 | 2.500 | 1.291 |"), "{md}");
        let c = summary(&[-600.0; 5]).unwrap();
        let md = summary_table_markdown(&[SummaryRow::new("f5", "x", &c)]);
        assert!(md.contains("-600.000 | -600.000 | -600.000 | -600.000 | 0.000"));
    }

    #[test]
    fn summary_markdown_round_trip() {
        let rows = vec![
            SummaryRow::new("f1", "chaos:tinkerbell:atan2", &summary(&[-1400.0, -929.41, 12.5]).unwrap()),
            SummaryRow::new("f22", "mt", &summary(&[3141.59265, 2718.28]).unwrap()),
        ];
        let md = summary_table_markdown(&rows);
        let back = parse_summary_markdown(&md).unwrap();
        let r3 = |v: f64| (v * 1000.0).round() / 1000.0;
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!((&a.function, &a.scheme), (&b.function, &b.scheme));
            for (x, y) in a.numbers().iter().zip(b.numbers()) {
                assert_eq!(r3(*x), y);
            }
        }
        assert_eq!(summary_table_markdown(&back), md);
        assert!(parse_summary_markdown("| nope |").is_err());
    }

    #[test]
    fn win_markdown() {
        let res = vec![scheme("a", vec![record(1.0, 0)]), scheme("b", vec![record(1.0, 0)])];
        let t = win_table(&res, 1e-3).unwrap();
        let md = win_tables_markdown(&[("f1".into(), t)]).unwrap();
        assert!(md.contains("| f1 | 100 | 100 |"), "{md}");
    }
}
