//! Tri-state verdicts with an evidence trail.

use std::fmt;

use crate::report::Json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "Holds",
            Status::Fails => "Fails",
            Status::Inconclusive => "Inconclusive",
        }
    }

    /// Conjunction: any `Fails` wins, then any `Inconclusive`.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Holds, Status::Holds) => Status::Holds,
            _ => Status::Inconclusive,
        }
    }

    pub fn all<I: IntoIterator<Item = Status>>(items: I) -> Status {
        items.into_iter().fold(Status::Holds, Status::and)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One labelled piece of evidence.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Scalar(f64),
    Int(i64),
    Flag(bool),
    Text(String),
    /// Plain values indexed from `start`.
    Series {
        start: i64,
        values: Vec<f64>,
    },
    /// Natural logs of magnitudes indexed from `start`; `-inf` marks zero.
    LogSeries {
        start: i64,
        ln: Vec<f64>,
    },
    Nested(Vec<(String, Evidence)>),
}

impl Evidence {
    pub fn to_json(&self) -> Json {
        match self {
            Evidence::Scalar(x) => Json::Num(*x),
            Evidence::Int(i) => Json::Int(*i),
            Evidence::Flag(b) => Json::Bool(*b),
            Evidence::Text(s) => Json::Str(s.clone()),
            Evidence::Series { start, values } => Json::obj()
                .with("start", *start)
                .with("values", values.as_slice()),
            Evidence::LogSeries { start, ln } => Json::obj()
                .with("start", *start)
                .with("ln_abs", ln.as_slice()),
            Evidence::Nested(items) => {
                let mut o = Json::obj();
                for (k, v) in items {
                    o.push(k, v.to_json());
                }
                o
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    /// Why the status is what it is; set for every non-`Holds` outcome that
    /// is not self-explanatory.
    pub reason: Option<String>,
    /// Finite certificate backing a `Fails`.
    pub certificate: Option<String>,
    pub evidence: Vec<(String, Evidence)>,
    pub thresholds: Vec<(String, f64)>,
    /// Set when the criterion is only sufficient, so failure proves nothing.
    pub sufficient_only: bool,
}

impl Verdict {
    pub fn new(status: Status) -> Self {
        Verdict {
            status,
            reason: None,
            certificate: None,
            evidence: Vec::new(),
            thresholds: Vec::new(),
            sufficient_only: false,
        }
    }

    pub fn reason(mut self, r: impl Into<String>) -> Self {
        self.reason = Some(r.into());
        self
    }

    pub fn certificate(mut self, c: impl Into<String>) -> Self {
        self.certificate = Some(c.into());
        self
    }

    pub fn evidence(mut self, label: impl Into<String>, e: Evidence) -> Self {
        self.evidence.push((label.into(), e));
        self
    }

    pub fn threshold(mut self, label: impl Into<String>, value: f64) -> Self {
        self.thresholds.push((label.into(), value));
        self
    }

    pub fn find(&self, label: &str) -> Option<&Evidence> {
        self.evidence
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, e)| e)
    }

    pub fn to_json(&self) -> Json {
        let mut evidence = Json::obj();
        for (k, v) in &self.evidence {
            evidence.push(k, v.to_json());
        }
        let mut thresholds = Json::obj();
        for (k, v) in &self.thresholds {
            thresholds.push(k, *v);
        }
        let mut o = Json::obj().with("status", self.status.as_str());
        if let Some(r) = &self.reason {
            o.push("reason", r.as_str());
        }
        if let Some(c) = &self.certificate {
            o.push("certificate", c.as_str());
        }
        if self.sufficient_only {
            o.push("sufficient_only", true);
        }
        o.with("evidence", evidence).with("thresholds", thresholds)
    }
}
