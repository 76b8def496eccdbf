//! Circuits: per-site gate lists with barrier markers.

use fiberq_core::SiteId;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

/// One gate on one site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    /// Table gate by index (0..24).
    Clifford(u8),
    /// Equatorial rotation R(area, phase).
    Rotation { area: f64, phase: f64 },
    /// Virtual-Z by `offset` radians; costs no light time.
    VirtualZ(f64),
    /// Do nothing for `duration` seconds.
    Idle(f64),
}

pub type Moment = BTreeMap<SiteId, Vec<GateOp>>;

/// Gate lists per site, grouped into barrier-delimited moments.
///
/// All gates inside one moment start together at the moment boundary; a
/// barrier closes the moment. Channels that finish early idle until the
/// slowest channel of the moment is done.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    targets: Vec<SiteId>,
    closed: Vec<Moment>,
    current: Moment,
}

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("site {0} is not a target of this circuit")]
    UnknownSite(SiteId),
    #[error("duplicate target site {0}")]
    DuplicateTarget(SiteId),
    #[error("clifford index {0} outside 0..24")]
    UnknownClifford(u8),
    #[error("rotation area {0} is negative")]
    NegativeArea(f64),
    #[error("idle duration {0} is negative")]
    NegativeDuration(f64),
}

#[derive(Debug, Error, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct CircuitParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Circuit {
    pub fn new(mut targets: Vec<SiteId>) -> Result<Self, CircuitError> {
        targets.sort();
        for pair in targets.windows(2) {
            if pair[0] == pair[1] {
                return Err(CircuitError::DuplicateTarget(pair[0]));
            }
        }
        Ok(Circuit {
            targets,
            closed: Vec::new(),
            current: Moment::new(),
        })
    }

    pub fn targets(&self) -> &[SiteId] {
        &self.targets
    }

    pub fn push(&mut self, site: SiteId, op: GateOp) -> Result<(), CircuitError> {
        if !self.targets.contains(&site) {
            return Err(CircuitError::UnknownSite(site));
        }
        match op {
            GateOp::Clifford(k) if k >= 24 => return Err(CircuitError::UnknownClifford(k)),
            GateOp::Rotation { area, .. } if area < 0.0 => {
                return Err(CircuitError::NegativeArea(area))
            }
            GateOp::Idle(d) if d < 0.0 => return Err(CircuitError::NegativeDuration(d)),
            _ => {}
        }
        self.current.entry(site).or_default().push(op);
        Ok(())
    }

    /// Close the current moment. Consecutive barriers collapse.
    pub fn barrier(&mut self) {
        if !self.current.is_empty() {
            self.closed.push(std::mem::take(&mut self.current));
        }
    }

    /// All moments, including the still-open one.
    pub fn moments(&self) -> Vec<&Moment> {
        let mut out: Vec<&Moment> = self.closed.iter().collect();
        if !self.current.is_empty() {
            out.push(&self.current);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty() && self.current.is_empty()
    }

    pub fn gate_count(&self) -> usize {
        self.moments()
            .iter()
            .map(|m| m.values().map(Vec::len).sum::<usize>())
            .sum()
    }

    /// Parse the plain-text circuit format.
    ///
    /// ```text
    /// # comment
    /// targets 1 2 7        (optional; default: every site mentioned)
    /// site 7: clifford 2; rotation pi/2 0; vz pi; idle 1e-3
    /// barrier
    /// ```
    ///
    /// Angles accept plain floats or `pi` forms (`pi`, `-pi`, `pi/2`,
    /// `3pi/4`, ...).
    pub fn parse(text: &str) -> Result<Self, CircuitParseError> {
        let mut declared_targets: Option<Vec<SiteId>> = None;
        // (line number, column, site, ops) collected before targets are known
        let mut staged: Vec<(usize, usize, SiteId, Vec<GateOp>)> = Vec::new();
        let mut barriers: Vec<usize> = Vec::new(); // staged index at which a barrier occurs

        for (line_index, raw) in text.lines().enumerate() {
            let line_no = line_index + 1;
            let line = match raw.find('#') {
                Some(k) => &raw[..k],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let column = raw.len() - raw.trim_start().len() + 1;
            let trimmed = line.trim();

            if let Some(rest) = trimmed.strip_prefix("targets") {
                let mut sites = Vec::new();
                for token in rest.split_whitespace() {
                    let id: usize = token.parse().map_err(|_| CircuitParseError {
                        line: line_no,
                        column: find_column(raw, token),
                        message: format!("invalid site id `{token}`"),
                    })?;
                    sites.push(SiteId(id));
                }
                if sites.is_empty() {
                    return Err(CircuitParseError {
                        line: line_no,
                        column,
                        message: "targets directive needs at least one site".into(),
                    });
                }
                declared_targets = Some(sites);
            } else if trimmed == "barrier" {
                barriers.push(staged.len());
            } else if let Some(rest) = trimmed.strip_prefix("site") {
                let (site_text, gates_text) =
                    rest.split_once(':').ok_or_else(|| CircuitParseError {
                        line: line_no,
                        column,
                        message: "expected `site <id>: <gates>`".into(),
                    })?;
                let site_token = site_text.trim();
                let id: usize = site_token.parse().map_err(|_| CircuitParseError {
                    line: line_no,
                    column: find_column(raw, site_token),
                    message: format!("invalid site id `{site_token}`"),
                })?;
                let mut ops = Vec::new();
                for gate_text in gates_text.split(';') {
                    let gate_text = gate_text.trim();
                    if gate_text.is_empty() {
                        continue;
                    }
                    ops.push(parse_gate(gate_text, raw, line_no)?);
                }
                staged.push((line_no, column, SiteId(id), ops));
            } else {
                return Err(CircuitParseError {
                    line: line_no,
                    column,
                    message: format!("unrecognized directive `{}`", first_word(trimmed)),
                });
            }
        }

        let targets = declared_targets.unwrap_or_else(|| {
            let mut sites: Vec<SiteId> = staged.iter().map(|s| s.2).collect();
            sites.sort();
            sites.dedup();
            sites
        });
        let mut circuit = Circuit::new(targets).map_err(|e| CircuitParseError {
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;

        let mut barrier_iter = barriers.into_iter().peekable();
        for (k, (line_no, column, site, ops)) in staged.into_iter().enumerate() {
            while barrier_iter.peek() == Some(&k) {
                circuit.barrier();
                barrier_iter.next();
            }
            for op in ops {
                circuit.push(site, op).map_err(|e| CircuitParseError {
                    line: line_no,
                    column,
                    message: e.to_string(),
                })?;
            }
        }
        Ok(circuit)
    }
}

fn first_word(s: &str) -> &str {
    s.split_whitespace().next().unwrap_or(s)
}

fn find_column(raw: &str, token: &str) -> usize {
    raw.find(token).map(|k| k + 1).unwrap_or(1)
}

/// Parse a float or a `pi` form: `pi`, `-pi`, `pi/2`, `3pi/4`, `-pi/6`.
fn parse_angle(token: &str) -> Option<f64> {
    if let Ok(x) = token.parse::<f64>() {
        return Some(x);
    }
    let (sign, body) = match token.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, token),
    };
    let (num_text, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().ok()?),
        None => (body, 1.0),
    };
    let num = match num_text.strip_suffix("pi") {
        Some("") => 1.0,
        Some(mult) => mult.parse::<f64>().ok()?,
        None => return None,
    };
    Some(sign * num * PI / den)
}

fn parse_gate(text: &str, raw: &str, line_no: usize) -> Result<GateOp, CircuitParseError> {
    let err = |message: String| CircuitParseError {
        line: line_no,
        column: find_column(raw, first_word(text)),
        message,
    };
    let mut words = text.split_whitespace();
    let head = words.next().ok_or_else(|| err("empty gate".into()))?;
    let args: Vec<&str> = words.collect();
    match head {
        "clifford" => {
            let [k] = args.as_slice() else {
                return Err(err("clifford takes one index".into()));
            };
            let index: u8 = k
                .parse()
                .map_err(|_| err(format!("invalid clifford index `{k}`")))?;
            Ok(GateOp::Clifford(index))
        }
        "rotation" => {
            let [area, phase] = args.as_slice() else {
                return Err(err("rotation takes <area> <phase>".into()));
            };
            let area = parse_angle(area).ok_or_else(|| err(format!("invalid angle `{area}`")))?;
            let phase =
                parse_angle(phase).ok_or_else(|| err(format!("invalid angle `{phase}`")))?;
            Ok(GateOp::Rotation { area, phase })
        }
        "vz" | "virtual_z" => {
            let [offset] = args.as_slice() else {
                return Err(err("vz takes one angle".into()));
            };
            let offset =
                parse_angle(offset).ok_or_else(|| err(format!("invalid angle `{offset}`")))?;
            Ok(GateOp::VirtualZ(offset))
        }
        "idle" => {
            let [duration] = args.as_slice() else {
                return Err(err("idle takes one duration".into()));
            };
            let duration: f64 = duration
                .parse()
                .map_err(|_| err(format!("invalid duration `{duration}`")))?;
            Ok(GateOp::Idle(duration))
        }
        other => Err(err(format!("unknown gate `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_tracks_moments() {
        let mut c = Circuit::new(vec![SiteId(1), SiteId(2)]).unwrap();
        c.push(SiteId(1), GateOp::Clifford(6)).unwrap();
        c.push(SiteId(2), GateOp::Clifford(8)).unwrap();
        c.barrier();
        c.barrier(); // collapses
        c.push(SiteId(1), GateOp::VirtualZ(PI)).unwrap();
        assert_eq!(c.moments().len(), 2);
        assert_eq!(c.gate_count(), 3);
    }

    #[test]
    fn push_validates() {
        let mut c = Circuit::new(vec![SiteId(1)]).unwrap();
        assert_eq!(
            c.push(SiteId(9), GateOp::Clifford(0)),
            Err(CircuitError::UnknownSite(SiteId(9)))
        );
        assert_eq!(
            c.push(SiteId(1), GateOp::Clifford(24)),
            Err(CircuitError::UnknownClifford(24))
        );
        assert_eq!(
            c.push(
                SiteId(1),
                GateOp::Rotation {
                    area: -1.0,
                    phase: 0.0
                }
            ),
            Err(CircuitError::NegativeArea(-1.0))
        );
        assert_eq!(
            c.push(SiteId(1), GateOp::Idle(-1e-6)),
            Err(CircuitError::NegativeDuration(-1e-6))
        );
        assert!(Circuit::new(vec![SiteId(3), SiteId(3)]).is_err());
    }

    #[test]
    fn parse_example() {
        let c = Circuit::parse("site 7: clifford 2\n").unwrap();
        assert_eq!(c.targets(), &[SiteId(7)]);
        assert_eq!(c.moments().len(), 1);
        assert_eq!(c.moments()[0][&SiteId(7)], vec![GateOp::Clifford(2)]);
    }

    #[test]
    fn parse_full_grammar() {
        let text = "\
# a comment
targets 1 2 7
site 7: clifford 2; rotation pi/2 -pi/2; vz 3pi/4
barrier
site 1: idle 1e-3   # trailing comment
";
        let c = Circuit::parse(text).unwrap();
        assert_eq!(c.targets(), &[SiteId(1), SiteId(2), SiteId(7)]);
        assert_eq!(c.moments().len(), 2);
        let ops = &c.moments()[0][&SiteId(7)];
        assert_eq!(ops.len(), 3);
        match ops[1] {
            GateOp::Rotation { area, phase } => {
                assert!((area - PI / 2.0).abs() < 1e-15);
                assert!((phase + PI / 2.0).abs() < 1e-15);
            }
            _ => panic!("expected rotation"),
        }
        match ops[2] {
            GateOp::VirtualZ(x) => assert!((x - 3.0 * PI / 4.0).abs() < 1e-15),
            _ => panic!("expected vz"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = Circuit::parse("site 7: warble 3\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("warble"));
        assert_eq!(err.column, 9);

        let err = Circuit::parse("site 7: clifford 2\nnonsense here\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 1);

        let err = Circuit::parse("targets 1\nsite 7: clifford 2\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("not a target"));
    }

    #[test]
    fn empty_text_is_empty_circuit() {
        let c = Circuit::parse("# nothing\n\n").unwrap();
        assert!(c.is_empty());
        assert!(c.targets().is_empty());
    }
}
