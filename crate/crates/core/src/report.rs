use serde::Serialize;

/// Pass/fail status of one axiom together with the failing instances.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    /// Number of instances examined.
    pub checked: usize,
    /// Index tuples (element ids) of failing instances, capped at
    /// [`MAX_WITNESSES`].
    pub failures: Vec<Vec<usize>>,
    pub failure_count: usize,
}

/// Witness lists are truncated to this length; `failure_count` is exact.
pub const MAX_WITNESSES: usize = 32;

impl AxiomCheck {
    pub fn new(axiom: &str) -> Self {
        AxiomCheck {
            axiom: axiom.to_string(),
            passed: true,
            checked: 0,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<usize>) {
        self.checked += 1;
        if !ok {
            self.passed = false;
            self.failure_count += 1;
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(witness());
            }
        }
    }

    pub fn merge(&mut self, other: AxiomCheck) {
        self.checked += other.checked;
        self.failure_count += other.failure_count;
        self.passed &= other.passed;
        for w in other.failures {
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(w);
            }
        }
    }
}

/// Collection of axiom checks; `passed()` iff every check passed.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn push(&mut self, check: AxiomCheck) {
        self.checks.push(check);
    }

    pub fn failed_axioms(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.axiom.as_str())
            .collect()
    }
}
