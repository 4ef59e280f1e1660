//! Structured run reports. The human and JSON renderings carry the same
//! fields; neither includes wall-clock time, so a fixed seed and fixed inputs
//! reproduce a report byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
    /// Residual dump, filled for failures only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residual: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, detail: String::new(), residual: Vec::new() }
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    /// Attaches the dump when the check failed; passing checks stay terse.
    pub fn residual(mut self, lines: impl FnOnce() -> Vec<String>) -> Self {
        if !self.passed {
            self.residual = lines();
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    /// Computed results (tables, normal forms) that are not pass/fail.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub output: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report { command: command.to_string(), seed, params: BTreeMap::new(), checks: Vec::new(), output: Vec::new() }
    }

    pub fn param(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.params.insert(k.to_string(), v.to_string());
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn line(&mut self, l: impl Into<String>) -> &mut Self {
        self.output.push(l.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Tagged<'a> {
            status: &'static str,
            #[serde(flatten)]
            report: &'a Report,
        }
        let mut s = serde_json::to_string_pretty(&Tagged { status: self.status(), report: self }).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "seed: {}", self.seed);
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k}: {v}");
        }
        for l in &self.output {
            let _ = writeln!(s, "{l}");
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(s, "{tag} {}", c.name);
            } else {
                let _ = writeln!(s, "{tag} {} ({})", c.name, c.detail);
            }
            for r in &c.residual {
                let _ = writeln!(s, "    {r}");
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "status: {} ({passed}/{} checks passed)", self.status(), self.checks.len());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renderings_carry_the_same_checks() {
        let mut r = Report::new("mc check", 0);
        r.param("algebra", "a.json");
        r.check(Check::new("axioms hold", true));
        r.check(Check::new("mc residual vanishes", false).detail("2 components").residual(|| vec!["Alg part".into()]));
        let human = r.to_human();
        assert!(human.contains("PASS axioms hold"));
        assert!(human.contains("FAIL mc residual vanishes (2 components)"));
        assert!(human.contains("    Alg part"));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["status"], "fail");
        assert_eq!(v["checks"][1]["residual"][0], "Alg part");
        assert!(v["checks"][0].get("residual").is_none());
    }
}
