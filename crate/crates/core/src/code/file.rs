//! Plain-text code definitions.
//!
//! ```text
//! # five-qubit code
//! n=5
//! S XZZXI
//! S IXZZX
//! S XIXZZ
//! S ZXIXZ
//! LX XXXXX
//! LZ ZZZZZ
//! ```
//!
//! `T <pauli>` lines are optional; when absent the pure errors are solved for.

use super::{compute_pure_errors, StabilizerCode, Violation};
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// The raw contents of a code-definition file, before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeDefinition {
    pub n: usize,
    pub generators: Vec<PauliOperator>,
    pub logical_x: PauliOperator,
    pub logical_z: PauliOperator,
    pub pure_errors: Option<Vec<PauliOperator>>,
}

impl CodeDefinition {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut generators = Vec::new();
        let mut logical_x = None;
        let mut logical_z = None;
        let mut pure_errors: Vec<PauliOperator> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            if n.is_none() {
                let value = line
                    .strip_prefix("n=")
                    .ok_or_else(|| parse_err(format!("expected \"n=<int>\", found {line:?}")))?;
                let value: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("invalid block length {value:?}")))?;
                n = Some(value);
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(tag), Some(body), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(format!(
                    "expected \"<tag> <pauli>\", found {line:?}"
                )));
            };
            let op: PauliOperator = body.parse().map_err(|e| parse_err(format!("{e}")))?;
            match tag {
                "S" => generators.push(op),
                "LX" if logical_x.is_none() => logical_x = Some(op),
                "LZ" if logical_z.is_none() => logical_z = Some(op),
                "LX" | "LZ" => return Err(parse_err(format!("duplicate {tag} line"))),
                "T" => pure_errors.push(op),
                other => return Err(parse_err(format!("unknown tag {other:?}"))),
            }
        }

        let n = n.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing \"n=<int>\" header".into(),
        })?;
        let missing = |what: &str| Error::Parse {
            line: text.lines().count(),
            message: format!("missing {what} line"),
        };
        Ok(Self {
            n,
            generators,
            logical_x: logical_x.ok_or_else(|| missing("LX"))?,
            logical_z: logical_z.ok_or_else(|| missing("LZ"))?,
            pure_errors: (!pure_errors.is_empty()).then_some(pure_errors),
        })
    }

    fn header_violations(&self) -> Vec<Violation> {
        if self.logical_x.len() != self.n {
            vec![Violation::OperatorLength {
                what: "LX".into(),
                found: self.logical_x.len(),
            }]
        } else {
            vec![]
        }
    }

    /// Every violated invariant. Pure errors are solved for when the file
    /// does not list them.
    pub fn violations(&self) -> Vec<Violation> {
        let header = self.header_violations();
        if !header.is_empty() {
            return header;
        }
        let pure_errors = match &self.pure_errors {
            Some(ts) => ts.clone(),
            None => compute_pure_errors(&self.generators, &self.logical_x, &self.logical_z)
                .unwrap_or_default(),
        };
        let mut violations = StabilizerCode::from_parts(
            "",
            self.generators.clone(),
            self.logical_x.clone(),
            self.logical_z.clone(),
            pure_errors.clone(),
        )
        .validate();
        if self.pure_errors.is_none() && pure_errors.is_empty() {
            // Already explained by the structural violations.
            violations.retain(|v| !matches!(v, Violation::PureErrorCount { .. }));
        }
        violations
    }

    pub fn build(&self, name: impl Into<String>) -> Result<StabilizerCode> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(Error::InvalidCode(violations));
        }
        let name = name.into();
        match &self.pure_errors {
            Some(ts) => StabilizerCode::with_pure_errors(
                name,
                self.generators.clone(),
                self.logical_x.clone(),
                self.logical_z.clone(),
                ts.clone(),
            ),
            None => StabilizerCode::new(
                name,
                self.generators.clone(),
                self.logical_x.clone(),
                self.logical_z.clone(),
            ),
        }
    }
}
