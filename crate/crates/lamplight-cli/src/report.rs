//! Deterministic plain-text reports: a body for humans and a key=value
//! trailer for machines, with the resolved config embedded for audit.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    pub fn code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unknown => 2,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        }
    }
}

pub struct Report {
    pub command: String,
    pub config: Vec<String>,
    pub lines: Vec<String>,
    pub trailer: Vec<(String, String)>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            config: Vec::new(),
            lines: Vec::new(),
            trailer: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn kv(&mut self, key: &str, value: impl ToString) {
        self.trailer.push((key.to_string(), value.to_string()));
    }

    pub fn fail(&mut self) {
        self.verdict = Verdict::Fail;
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("lamplight report: {}\n", self.command));
        out.push_str("\n[config]\n");
        for line in &self.config {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("\n[body]\n");
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("\n[trailer]\n");
        for (k, v) in &self.trailer {
            out.push_str(&format!("{}={}\n", k, v));
        }
        out.push_str(&format!("verdict={}\n", self.verdict.word()));
        out
    }
}
