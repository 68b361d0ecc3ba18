use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the decisive inequality is tightest or broken.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Grid node index, when the witness sits on a grid.
    pub node: Option<usize>,
    /// Named values at the witness, e.g. ("t", 1.57), ("gap", 3e-4).
    pub values: Vec<(String, f64)>,
}

impl Witness {
    pub fn new(node: Option<usize>, values: &[(&str, f64)]) -> Self {
        Witness {
            node,
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.node.iter().map(|i| format!("node {i}")).collect();
        parts.extend(self.values.iter().map(|(k, v)| format!("{k}={v:e}")));
        f.write_str(&parts.join(" "))
    }
}

/// Outcome of a certifier. A `Violated` report always carries a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    verdict: Verdict,
    witness: Option<Witness>,
    tolerance_used: f64,
    notes: Vec<String>,
}

impl CertReport {
    pub fn holds(witness: Option<Witness>, tolerance_used: f64) -> Self {
        CertReport { verdict: Verdict::Holds, witness, tolerance_used, notes: Vec::new() }
    }

    pub fn violated(witness: Witness, tolerance_used: f64) -> Self {
        CertReport { verdict: Verdict::Violated, witness: Some(witness), tolerance_used, notes: Vec::new() }
    }

    pub fn inconclusive(witness: Option<Witness>, tolerance_used: f64, note: impl Into<String>) -> Self {
        CertReport {
            verdict: Verdict::Inconclusive,
            witness,
            tolerance_used,
            notes: vec![note.into()],
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn add_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn tolerance_used(&self) -> f64 {
        self.tolerance_used
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }
}

impl fmt::Display for CertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (tolerance {:e})", self.verdict, self.tolerance_used)?;
        if let Some(w) = &self.witness {
            write!(f, " at {w}")?;
        }
        for n in &self.notes {
            write!(f, "; {n}")?;
        }
        Ok(())
    }
}
