use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QreError, Result};

/// One `(type, action)` choice. `action = 1` is action 1 of the game's
/// convention (flee in the compromise game).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    #[serde(rename = "type")]
    pub t: f64,
    pub action: u8,
    pub subject: Option<String>,
    pub round: Option<i64>,
    pub treatment: Option<String>,
}

impl Observation {
    pub fn new(t: f64, action: u8) -> Self {
        Self {
            t,
            action,
            subject: None,
            round: None,
            treatment: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    rows: Vec<Observation>,
}

impl Dataset {
    pub fn new(rows: Vec<Observation>) -> Result<Self> {
        if rows.is_empty() {
            return Err(QreError::InsufficientData("dataset has no rows".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if !(0.0..=1.0).contains(&r.t) {
                return Err(QreError::Domain(format!("row {i}: type {} outside [0, 1]", r.t)));
            }
            if r.action > 1 {
                return Err(QreError::Domain(format!("row {i}: action {} not in {{0, 1}}", r.action)));
            }
        }
        Ok(Self { rows })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, u8)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(t, a)| Observation::new(t, a)).collect())
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn action_mean(&self) -> f64 {
        self.rows.iter().map(|r| r.action as f64).sum::<f64>() / self.len() as f64
    }

    /// Rows whose treatment label equals `label`.
    pub fn filter_treatment(&self, label: &str) -> Result<Self> {
        Self::new(
            self.rows
                .iter()
                .filter(|r| r.treatment.as_deref() == Some(label))
                .cloned()
                .collect(),
        )
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    /// Reads a CSV with header. `type` and `action` are required; `subject`,
    /// `round`, and `treatment` are optional. Lines starting with `#` are
    /// skipped. Errors cite file line numbers.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(r);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
        let (t_col, a_col) = match (col("type"), col("action")) {
            (Some(t), Some(a)) => (t, a),
            _ => {
                return Err(QreError::Parse {
                    line: 1,
                    message: format!(
                        "header must contain `type` and `action` columns, found {:?}",
                        headers.iter().collect::<Vec<_>>()
                    ),
                })
            }
        };
        let (s_col, r_col, tr_col) = (col("subject"), col("round"), col("treatment"));
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = rec.position().map_or(i as u64 + 2, |p| p.line());
            let err = |message: String| QreError::Parse { line, message };
            let get = |j: usize| rec.get(j).unwrap_or("");
            let raw_t = get(t_col);
            let t: f64 = raw_t
                .parse()
                .map_err(|_| err(format!("invalid type {raw_t:?}")))?;
            if !(0.0..=1.0).contains(&t) {
                return Err(err(format!("type {t} outside [0, 1]")));
            }
            let raw_a = get(a_col);
            let action = match raw_a {
                "0" => 0,
                "1" => 1,
                _ => return Err(err(format!("action {raw_a:?} must be 0 or 1"))),
            };
            let optional = |c: Option<usize>| {
                c.map(|j| get(j).to_string()).filter(|s| !s.is_empty())
            };
            let round = match optional(r_col) {
                None => None,
                Some(s) => Some(
                    s.parse::<i64>()
                        .map_err(|_| err(format!("invalid round {s:?}")))?,
                ),
            };
            rows.push(Observation {
                t,
                action,
                subject: optional(s_col),
                round,
                treatment: optional(tr_col),
            });
        }
        if rows.is_empty() {
            return Err(QreError::Parse {
                line: 2,
                message: "file has a header but no data rows".into(),
            });
        }
        Self::new(rows)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["type", "action", "subject", "round", "treatment"])?;
        for r in &self.rows {
            wtr.write_record([
                r.t.to_string(),
                r.action.to_string(),
                r.subject.clone().unwrap_or_default(),
                r.round.map(|x| x.to_string()).unwrap_or_default(),
                r.treatment.clone().unwrap_or_default(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
