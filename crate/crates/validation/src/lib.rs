//! Verdict bookkeeping for the acceptance runner.

use std::fmt;
use std::time::Duration;

/// Named sub-checks of one criterion.
#[derive(Debug, Default)]
pub struct Verdict {
    items: Vec<(String, bool)>,
}

impl Verdict {
    pub fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.items.push((name.into(), ok));
    }

    pub fn within(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(format!("{name}={got:.10} (want {want} ± {tol:e})"), ok);
    }

    pub fn runtime(&mut self, elapsed: Duration, limit: Duration) {
        self.check(format!("runtime {:.3}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs_f64()), elapsed < limit);
    }

    pub fn passed(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &str> {
        self.items.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str())
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let detail: Vec<&str> = self.items.iter().map(|(n, _)| n.as_str()).collect();
        write!(f, "{} {}", if self.passed() { "PASS" } else { "FAIL" }, detail.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_verdict_fails() {
        let mut v = Verdict::default();
        assert!(!v.passed());
        v.within("x", 1.0, 1.0 + 1e-9, 1e-8);
        assert!(v.passed());
        v.check("bad", false);
        assert_eq!(v.failures().collect::<Vec<_>>(), ["bad"]);
        assert!(v.to_string().starts_with("FAIL"));
    }
}
