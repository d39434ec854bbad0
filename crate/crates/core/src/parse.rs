//! Text formats: Aldebaran `.aut` for LTSs and a line-oriented native
//! format for Kripke structures.
//!
//! Native format:
//!
//! ```text
//! kripke v1
//! states <N>
//! label <state> <atom> [<atom> ...]
//! edge <src> <dst>
//! ```
//!
//! `states` comes first after the header; `label` and `edge` lines may then
//! appear in any order. Blank lines are ignored. Repeated `label` lines for
//! one state accumulate atoms.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{ModelError, ParseError, ParseErrorKind};
use crate::model::{KripkeBuilder, KripkeStructure, LabelledTs};

const KRIPKE_HEADER: &str = "kripke v1";

fn parse_index(token: &str, line: usize) -> Result<usize, ParseError> {
    token
        .trim()
        .parse::<usize>()
        .map_err(|_| ParseError::new(line, ParseErrorKind::BadNumber(token.trim().to_owned())))
}

fn check_state(state: usize, num_states: usize, line: usize) -> Result<usize, ParseError> {
    if state >= num_states {
        Err(ParseError::new(line, ParseErrorKind::StateOutOfRange { state, num_states }))
    } else {
        Ok(state)
    }
}

/// Splits `(a, b, c)` into its three fields. Commas inside a quoted middle
/// field are kept, since the first and last fields are plain integers.
fn split_triple(line: &str) -> Option<(&str, &str, &str)> {
    let inner = line.trim().strip_prefix('(')?.strip_suffix(')')?;
    let first = inner.find(',')?;
    let last = inner.rfind(',')?;
    if first == last {
        return None;
    }
    Some((&inner[..first], &inner[first + 1..last], &inner[last + 1..]))
}

/// Parses an Aldebaran (`.aut`) file.
///
/// Header `des (<initial>, <transitions>, <states>)`, then one
/// `(<src>, <label>, <dst>)` per line. Labels may be double-quoted.
pub fn parse_aut(text: &str) -> Result<LabelledTs, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());

    let (hline, header) = lines.next().ok_or(ParseError::new(1, ParseErrorKind::Empty))?;
    let malformed = || ParseError::new(hline, ParseErrorKind::MalformedHeader(header.trim().to_owned()));
    let rest = header.trim().strip_prefix("des").ok_or_else(malformed)?;
    let (init, ntrans, nstates) = split_triple(rest).ok_or_else(malformed)?;
    let initial = parse_index(init, hline)?;
    let expected = parse_index(ntrans, hline)?;
    let num_states = parse_index(nstates, hline)?;
    if num_states == 0 {
        return Err(ParseError::new(hline, ParseErrorKind::EmptyStateSpace));
    }
    check_state(initial, num_states, hline)?;

    let mut label_ids: HashMap<String, u32> = HashMap::new();
    let mut label_names = Vec::new();
    let mut transitions = Vec::with_capacity(expected);
    let mut last_line = hline;
    for (lineno, raw) in lines {
        last_line = lineno;
        let (src, label, dst) = split_triple(raw)
            .ok_or_else(|| ParseError::new(lineno, ParseErrorKind::MalformedTransition(raw.trim().to_owned())))?;
        let src = check_state(parse_index(src, lineno)?, num_states, lineno)?;
        let dst = check_state(parse_index(dst, lineno)?, num_states, lineno)?;
        let label = label.trim();
        let label = match label.strip_prefix('"') {
            Some(quoted) => quoted.strip_suffix('"').ok_or_else(|| {
                ParseError::new(lineno, ParseErrorKind::MalformedTransition(raw.trim().to_owned()))
            })?,
            None => label,
        };
        let next = label_names.len() as u32;
        let id = *label_ids.entry(label.to_owned()).or_insert_with(|| {
            label_names.push(label.to_owned());
            next
        });
        transitions.push((src as u32, id, dst as u32));
    }
    if transitions.len() != expected {
        return Err(ParseError::new(
            last_line,
            ParseErrorKind::CountMismatch { expected, found: transitions.len() },
        ));
    }
    Ok(LabelledTs { num_states, initial, transitions, label_names })
}

/// Parses the native Kripke format. Duplicate edges are dropped with a
/// warning (see [`KripkeStructure::duplicates_dropped`]).
pub fn parse_kripke(text: &str) -> Result<KripkeStructure, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());

    let (hline, header) = lines.next().ok_or(ParseError::new(1, ParseErrorKind::Empty))?;
    if header.split_whitespace().collect::<Vec<_>>() != KRIPKE_HEADER.split(' ').collect::<Vec<_>>() {
        return Err(ParseError::new(hline, ParseErrorKind::MalformedHeader(header.trim().to_owned())));
    }

    let mut builder: Option<KripkeBuilder> = None;
    let mut num_states = 0;
    let mut last_line = hline;
    for (lineno, raw) in lines {
        last_line = lineno;
        let mut tokens = raw.split_whitespace();
        let directive = tokens.next().unwrap_or_default();
        let args: Vec<&str> = tokens.collect();
        match directive {
            "states" => {
                if builder.is_some() || args.len() != 1 {
                    return Err(ParseError::new(lineno, ParseErrorKind::MisplacedStates));
                }
                num_states = parse_index(args[0], lineno)?;
                if num_states == 0 {
                    return Err(ParseError::new(lineno, ParseErrorKind::EmptyStateSpace));
                }
                builder = Some(KripkeBuilder::new(num_states));
            }
            "label" | "edge" => {
                let b = builder
                    .as_mut()
                    .ok_or(ParseError::new(lineno, ParseErrorKind::MisplacedStates))?;
                let bad = || ParseError::new(lineno, ParseErrorKind::MalformedTransition(raw.trim().to_owned()));
                if directive == "edge" {
                    if args.len() != 2 {
                        return Err(bad());
                    }
                    let s = check_state(parse_index(args[0], lineno)?, num_states, lineno)?;
                    let t = check_state(parse_index(args[1], lineno)?, num_states, lineno)?;
                    b.add_edge(s, t).map_err(|e| model_to_parse(e, lineno))?;
                } else {
                    if args.is_empty() {
                        return Err(bad());
                    }
                    let s = check_state(parse_index(args[0], lineno)?, num_states, lineno)?;
                    for atom in &args[1..] {
                        b.add_atom(s, atom).map_err(|e| model_to_parse(e, lineno))?;
                    }
                }
            }
            other => return Err(ParseError::new(lineno, ParseErrorKind::UnknownDirective(other.to_owned()))),
        }
    }
    let builder = builder.ok_or(ParseError::new(last_line, ParseErrorKind::MissingStates))?;
    builder.build().map_err(|e| model_to_parse(e, last_line))
}

fn model_to_parse(e: ModelError, line: usize) -> ParseError {
    let kind = match e {
        ModelError::EmptyStateSpace => ParseErrorKind::EmptyStateSpace,
        ModelError::StateOutOfRange { state, num_states } => ParseErrorKind::StateOutOfRange { state, num_states },
        ModelError::Inconsistent(msg) | ModelError::InvalidParameter(msg) => ParseErrorKind::MalformedTransition(msg),
    };
    ParseError::new(line, kind)
}

/// Serializes a structure in the native format. Output is deterministic:
/// labels in state order, then edges sorted by source and target.
pub fn write_kripke(ks: &KripkeStructure) -> String {
    let mut out = String::new();
    writeln!(out, "{KRIPKE_HEADER}").unwrap();
    writeln!(out, "states {}", ks.num_states()).unwrap();
    for s in 0..ks.num_states() {
        let atoms = ks.atoms(s);
        if atoms.is_empty() {
            continue;
        }
        write!(out, "label {s}").unwrap();
        for &a in atoms {
            write!(out, " {}", ks.atom_name(a)).unwrap();
        }
        out.push('\n');
    }
    for (s, t) in ks.edges() {
        writeln!(out, "edge {s} {t}").unwrap();
    }
    out
}

/// Serializes an LTS in Aldebaran format; labels are always quoted.
pub fn write_aut(lts: &LabelledTs) -> String {
    let mut out = String::new();
    writeln!(out, "des ({}, {}, {})", lts.initial, lts.transitions.len(), lts.num_states).unwrap();
    for &(s, l, t) in &lts.transitions {
        writeln!(out, "({s}, \"{}\", {t})", lts.label_names[l as usize]).unwrap();
    }
    out
}
