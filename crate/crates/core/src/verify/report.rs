use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The enclosures overlap the bound; never counted as a pass.
    Inconclusive,
}

impl Status {
    /// Maps a decisive comparison result (`Some(holds)`) to a status.
    pub fn from_decision(d: Option<bool>) -> Status {
        match d {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::Inconclusive,
        }
    }

    /// The worse of two statuses: any failure fails, otherwise any
    /// inconclusive result is inconclusive.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub check: String,
    pub inputs: Value,
    pub computed: Value,
    pub bound: Value,
    /// Distance to the bound in the direction of passing; negative on failure.
    pub margin: Option<f64>,
    pub status: Status,
}

impl Record {
    pub fn new(check: impl Into<String>, status: Status) -> Self {
        Record {
            check: check.into(),
            inputs: Value::Null,
            computed: Value::Null,
            bound: Value::Null,
            margin: None,
            status,
        }
    }

    pub fn inputs(mut self, v: Value) -> Self {
        self.inputs = v;
        self
    }

    pub fn computed(mut self, v: Value) -> Self {
        self.computed = v;
        self
    }

    pub fn bound(mut self, v: Value) -> Self {
        self.bound = v;
        self
    }

    pub fn margin(mut self, m: f64) -> Self {
        self.margin = Some(m);
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, seed: u64) -> Self {
        VerificationReport { suite: suite.into(), seed, summary: Summary::default(), records: Vec::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.summary.total += 1;
        match r.status {
            Status::Pass => self.summary.passed += 1,
            Status::Fail => self.summary.failed += 1,
            Status::Inconclusive => self.summary.inconclusive += 1,
        }
        self.records.push(r);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        for r in other.records {
            self.push(r);
        }
    }

    /// True when every record passed decisively.
    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn status(&self) -> Status {
        self.records.iter().fold(Status::Pass, |acc, r| acc.and(r.status))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.status != Status::Pass)
    }
}
