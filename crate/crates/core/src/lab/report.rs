//! Suite reports and their CSV/JSON serialisation.
//!
//! CSV layout: a header `trial,seed,connected,<columns>`, one row per
//! trial (empty cell for a missing value), then `#summary` rows for the
//! statistics, the checks and the overall result.

use serde::Serialize;

use super::config::SuiteId;
use super::runner::TrialSet;
use super::stats::SummaryStats;
use super::LabError;
use crate::fmt::g17;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedStat {
    pub name: String,
    pub stats: SummaryStats,
    /// Theoretical interval the statistic is compared with, if any.
    pub bracket: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    #[serde(skip)]
    pub suite: SuiteId,
    pub trials: TrialSet,
    pub stats: Vec<NamedStat>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: SuiteId, trials: TrialSet) -> Self {
        Report { suite, trials, stats: Vec::new(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn stat(&self, name: &str) -> Option<&NamedStat> {
        self.stats.iter().find(|s| s.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub(crate) fn push_stat(&mut self, name: impl Into<String>, stats: SummaryStats, bracket: Option<(f64, f64)>) {
        self.stats.push(NamedStat { name: name.into(), stats, bracket });
    }

    pub(crate) fn push_check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn to_csv(&self) -> Result<String, LabError> {
        let out = |e: csv::Error| LabError::Output(e.to_string());
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut header = vec!["trial".to_string(), "seed".into(), "connected".into()];
        header.extend(self.trials.columns.iter().cloned());
        w.write_record(&header).map_err(out)?;
        for r in &self.trials.records {
            let mut row = vec![r.trial.to_string(), r.seed.to_string(), r.connected.to_string()];
            row.extend(r.values.iter().map(|&v| if v.is_nan() { String::new() } else { g17(v) }));
            w.write_record(&row).map_err(out)?;
        }
        w.write_record([
            "#summary",
            "stat",
            "name",
            "count",
            "mean",
            "variance",
            "ci_low",
            "ci_high",
            "min",
            "max",
            "violations",
            "bracket_low",
            "bracket_high",
        ])
        .map_err(out)?;
        for s in &self.stats {
            let st = &s.stats;
            let (bl, bh) = s.bracket.map_or((String::new(), String::new()), |(l, h)| (g17(l), g17(h)));
            w.write_record([
                "#summary".to_string(),
                "stat".into(),
                s.name.clone(),
                st.count.to_string(),
                g17(st.mean),
                g17(st.variance),
                g17(st.ci_low),
                g17(st.ci_high),
                g17(st.min),
                g17(st.max),
                st.violations.to_string(),
                bl,
                bh,
            ])
            .map_err(out)?;
        }
        for c in &self.checks {
            w.write_record(["#summary", "check", &c.name, if c.passed { "pass" } else { "fail" }, &c.detail])
                .map_err(out)?;
        }
        for note in &self.notes {
            w.write_record(["#summary", "note", note]).map_err(out)?;
        }
        w.write_record(["#summary", "result", if self.passed() { "pass" } else { "fail" }]).map_err(out)?;
        let bytes = w.into_inner().map_err(|e| LabError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Output(e.to_string()))
    }

    /// JSON document with the records, statistics, checks and result.
    /// Non-finite numbers are written as `null`.
    pub fn to_json(&self) -> Result<String, LabError> {
        #[derive(Serialize)]
        struct Doc<'a> {
            suite: String,
            passed: bool,
            #[serde(flatten)]
            report: &'a Report,
        }
        let doc = Doc { suite: self.suite.to_string(), passed: self.passed(), report: self };
        serde_json::to_string_pretty(&doc).map_err(|e| LabError::Output(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::runner::TrialRecord;

    fn tiny() -> Report {
        let trials = TrialSet {
            n: 3,
            columns: vec!["x".into(), "y".into()],
            records: vec![
                TrialRecord { trial: 0, seed: 7, connected: true, values: vec![0.5, f64::NAN] },
                TrialRecord { trial: 1, seed: 9, connected: false, values: vec![f64::NAN, f64::NAN] },
            ],
        };
        let mut r = Report::new(SuiteId::Ratio, trials);
        r.push_stat("x", SummaryStats::from_values(&[0.5]).unwrap(), Some((0.0, 1.0)));
        r.push_check("x in range", true, "ok");
        r
    }

    #[test]
    fn csv_layout() {
        let csv = tiny().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "trial,seed,connected,x,y");
        assert_eq!(lines[1], "0,7,true,0.5,");
        assert_eq!(lines[2], "1,9,false,,");
        assert!(lines[4].starts_with("#summary,stat,x,1,0.5,0,0.5,0.5,0.5,0.5,0,0,1"));
        assert_eq!(lines[5], "#summary,check,x in range,pass,ok");
        assert_eq!(*lines.last().unwrap(), "#summary,result,pass");
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = tiny();
        r.push_check("bad", false, "");
        assert!(!r.passed());
        assert!(r.to_csv().unwrap().ends_with("#summary,result,fail\n"));
    }

    #[test]
    fn json_has_result() {
        let v: serde_json::Value = serde_json::from_str(&tiny().to_json().unwrap()).unwrap();
        assert_eq!(v["suite"], "ratio");
        assert_eq!(v["passed"], true);
        assert_eq!(v["trials"]["records"][0]["values"][1], serde_json::Value::Null);
    }
}
