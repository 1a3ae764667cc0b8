//! Normality, variance equality, then either ANOVA followed by pooled
//! one-sided t-tests, or Welch t-tests.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::stats::{
    anova_oneway, f_test_variances, ks_normality, mean, t_test, Alternative, StatConfig, TestOutcome,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normality: Option<TestOutcome>,
    /// Left out of every comparison (zero variance or too few values).
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub a: String,
    pub b: String,
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// All variances judged equal: ANOVA first.
    Anova,
    /// Some pair of variances differs: Welch t-tests.
    Welch,
    /// Fewer than two usable groups.
    Insufficient,
}

/// Relation of the first group's mean to the second's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    Less,
    Greater,
}

impl Verdict {
    fn symbol(self) -> &'static str {
        match self {
            Verdict::Equal => "=",
            Verdict::Less => "<",
            Verdict::Greater => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub a: String,
    pub b: String,
    pub pooled: bool,
    pub two_sided: TestOutcome,
    pub less: TestOutcome,
    pub greater: TestOutcome,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub label: String,
    pub mean: f64,
    /// Number of groups whose mean was found significantly smaller.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub alpha: f64,
    pub groups: Vec<GroupReport>,
    pub variance_tests: Vec<PairTest>,
    pub branch: Branch,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anova: Option<TestOutcome>,
    /// ANOVA did not reject: all usable means declared equal.
    pub means_equal: bool,
    pub comparisons: Vec<PairComparison>,
    /// Usable groups ordered by rank, then mean.
    pub ranking: Vec<RankEntry>,
    pub notices: Vec<String>,
}

impl StatReport {
    pub fn verdict(&self, a: &str, b: &str) -> Option<Verdict> {
        self.comparisons.iter().find_map(|c| {
            if c.a == a && c.b == b {
                Some(c.verdict)
            } else if c.a == b && c.b == a {
                Some(match c.verdict {
                    Verdict::Less => Verdict::Greater,
                    Verdict::Greater => Verdict::Less,
                    Verdict::Equal => Verdict::Equal,
                })
            } else {
                None
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let yes_no = |b: bool| if b { "rejected" } else { "accepted" };
        let _ = writeln!(out, "## Statistical analysis (alpha = {})\n", self.alpha);
        let _ = writeln!(out, "| Group | n | Mean | KS D | KS p | Normality |");
        let _ = writeln!(out, "|---|---:|---:|---:|---:|---|");
        for g in &self.groups {
            let (d, p, v) = match &g.normality {
                Some(t) => (format!("{:.4}", t.statistic), format!("{:.4}", t.p_value), yes_no(t.reject)),
                None => ("-".into(), "-".into(), "excluded"),
            };
            let _ = writeln!(out, "| {} | {} | {:.3} | {d} | {p} | {v} |", g.label, g.n, g.mean);
        }
        if !self.variance_tests.is_empty() {
            let _ = writeln!(out, "\n| Variance test | F | df | p | Equality |");
            let _ = writeln!(out, "|---|---:|---|---:|---|");
            for t in &self.variance_tests {
                let o = &t.outcome;
                let _ = writeln!(
                    out,
                    "| {} vs {} | {:.4} | {} | {:.4} | {} |",
                    t.a, t.b, o.statistic, o.df, o.p_value, yes_no(o.reject)
                );
            }
        }
        let branch = match self.branch {
            Branch::Anova => "ANOVA",
            Branch::Welch => "Welch t-tests",
            Branch::Insufficient => "none (fewer than two usable groups)",
        };
        let _ = writeln!(out, "\nBranch: {branch}");
        if let Some(a) = &self.anova {
            let _ = writeln!(
                out,
                "\n| ANOVA | F | df | p | F crit. | Mean equality |\n|---|---:|---|---:|---:|---|\n| all | {:.4} | {} | {:.4} | {:.4} | {} |",
                a.statistic,
                a.df,
                a.p_value,
                a.critical.unwrap_or(f64::NAN),
                yes_no(a.reject)
            );
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(out, "\n| Comparison | Test | t | df | p (two-sided) | p (less) | p (greater) | Verdict |");
            let _ = writeln!(out, "|---|---|---:|---|---:|---:|---:|---|");
            for c in &self.comparisons {
                let _ = writeln!(
                    out,
                    "| {} vs {} | {} | {:.4} | {} | {:.4} | {:.4} | {:.4} | {} {} {} |",
                    c.a,
                    c.b,
                    if c.pooled { "pooled" } else { "Welch" },
                    c.two_sided.statistic,
                    c.two_sided.df,
                    c.two_sided.p_value,
                    c.less.p_value,
                    c.greater.p_value,
                    c.a,
                    c.verdict.symbol(),
                    c.b
                );
            }
        }
        if !self.ranking.is_empty() {
            let _ = writeln!(out, "\n| Rank | Group | Mean |\n|---:|---|---:|");
            for r in &self.ranking {
                let _ = writeln!(out, "| {} | {} | {:.3} |", r.rank, r.label, r.mean);
            }
        }
        for n in &self.notices {
            let _ = writeln!(out, "\n> {n}");
        }
        out
    }
}

fn compare(a: (&str, &[f64]), b: (&str, &[f64]), pooled: bool, cfg: &StatConfig, two_sided_gate: bool) -> Result<PairComparison> {
    let two_sided = t_test(a.1, b.1, Alternative::TwoSided, pooled, cfg)?;
    let less = t_test(a.1, b.1, Alternative::Less, pooled, cfg)?;
    let greater = t_test(a.1, b.1, Alternative::Greater, pooled, cfg)?;
    let verdict = if two_sided_gate && !two_sided.reject {
        Verdict::Equal
    } else if less.reject {
        Verdict::Less
    } else if greater.reject {
        Verdict::Greater
    } else {
        Verdict::Equal
    };
    Ok(PairComparison {
        a: a.0.to_string(),
        b: b.0.to_string(),
        pooled,
        two_sided,
        less,
        greater,
        verdict,
    })
}

/// Runs the five steps on labelled columns of results.
pub fn stats_pipeline(groups: &[(String, Vec<f64>)], cfg: &StatConfig) -> Result<StatReport> {
    if groups.len() < 2 {
        return Err(Error::invalid("the statistical pipeline needs at least two groups"));
    }
    let mut notices = Vec::new();
    let mut reports = Vec::with_capacity(groups.len());
    for (label, xs) in groups {
        if xs.is_empty() {
            return Err(Error::invalid(format!("group {label} is empty")));
        }
        let m = mean(xs);
        let (normality, excluded) = if xs.len() < 2 {
            notices.push(format!("{label}: fewer than two values, excluded"));
            (None, true)
        } else {
            match ks_normality(xs, cfg) {
                Ok(t) => {
                    if t.reject {
                        notices.push(format!("{label}: normality rejected (p = {:.4}); tests still applied", t.p_value));
                    }
                    (Some(t), false)
                }
                Err(Error::ZeroVariance(_)) => {
                    notices.push(format!("{label}: zero variance, excluded"));
                    (None, true)
                }
                // too few values for KS, but still usable downstream
                Err(Error::InvalidArgument(_)) => {
                    notices.push(format!("{label}: too few values for a normality test"));
                    (None, false)
                }
                Err(e) => return Err(e),
            }
        };
        reports.push(GroupReport {
            label: label.clone(),
            n: xs.len(),
            mean: m,
            normality,
            excluded,
        });
    }

    let usable: Vec<usize> = (0..groups.len()).filter(|&i| !reports[i].excluded).collect();
    let mut report = StatReport {
        alpha: cfg.alpha,
        groups: reports,
        variance_tests: Vec::new(),
        branch: Branch::Insufficient,
        anova: None,
        means_equal: false,
        comparisons: Vec::new(),
        ranking: Vec::new(),
        notices,
    };
    if usable.len() < 2 {
        return Ok(report);
    }
    let pairs: Vec<(usize, usize)> = usable
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| usable[k + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let col = |i: usize| (groups[i].0.as_str(), groups[i].1.as_slice());

    for &(i, j) in &pairs {
        report.variance_tests.push(PairTest {
            a: groups[i].0.clone(),
            b: groups[j].0.clone(),
            outcome: f_test_variances(&groups[i].1, &groups[j].1, cfg)?,
        });
    }
    let equal_variances = report.variance_tests.iter().all(|t| !t.outcome.reject);

    if equal_variances {
        report.branch = Branch::Anova;
        let cols: Vec<&[f64]> = usable.iter().map(|&i| groups[i].1.as_slice()).collect();
        let anova = anova_oneway(&cols, cfg)?;
        report.means_equal = !anova.reject;
        if anova.reject {
            for &(i, j) in &pairs {
                report.comparisons.push(compare(col(i), col(j), true, cfg, false)?);
            }
        }
        report.anova = Some(anova);
    } else {
        report.branch = Branch::Welch;
        for &(i, j) in &pairs {
            report.comparisons.push(compare(col(i), col(j), false, cfg, true)?);
        }
    }

    let mut ranking: Vec<RankEntry> = usable
        .iter()
        .map(|&i| {
            let label = &groups[i].0;
            let rank = usable
                .iter()
                .filter(|&&j| report.verdict(label, &groups[j].0) == Some(Verdict::Greater))
                .count();
            RankEntry {
                label: label.clone(),
                mean: report.groups[i].mean,
                rank,
            }
        })
        .collect();
    ranking.sort_by(|a, b| a.rank.cmp(&b.rank).then(a.mean.total_cmp(&b.mean)));
    report.ranking = ranking;
    Ok(report)
}
