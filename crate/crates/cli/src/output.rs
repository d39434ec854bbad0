//! Result serialisation.
//!
//! The machine format is line oriented:
//!
//! ```text
//! block <id>: <state>…
//! simulates <a> <b>      states of block b simulate states of block a
//! pair <s> <t>           state t simulates state s
//! stat <name> <value>
//! verify <oracle> MATCH|MISMATCH
//! ```

use std::io::Write;

use simshell_core::algorithms::SimResult;
use simshell_core::StateRelation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Section {
    Partition,
    Relation,
    Preorder,
    Stats,
}

impl Section {
    /// Parses a comma-separated list; `all` selects every section.
    pub fn parse_list(s: &str) -> Result<Vec<Section>, String> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let add: &[Section] = match item {
                "partition" => &[Section::Partition],
                "relation" | "block-relation" => &[Section::Relation],
                "preorder" => &[Section::Preorder],
                "stats" => &[Section::Stats],
                "all" => &[Section::Partition, Section::Relation, Section::Preorder, Section::Stats],
                other => return Err(format!("unknown output section `{other}`")),
            };
            for s in add {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Style {
    #[default]
    Machine,
    Text,
}

/// Writes the selected sections. `preorder` must be supplied when
/// [`Section::Preorder`] is selected.
pub fn write_result(
    out: &mut dyn Write,
    res: &SimResult,
    sections: &[Section],
    style: Style,
    preorder: Option<&StateRelation>,
) -> std::io::Result<()> {
    for section in sections {
        match (section, style) {
            (Section::Partition, Style::Machine) => {
                for (i, b) in res.blocks.iter().enumerate() {
                    write!(out, "block {i}:")?;
                    for s in b {
                        write!(out, " {s}")?;
                    }
                    writeln!(out)?;
                }
            }
            (Section::Partition, Style::Text) => {
                writeln!(out, "partition: {} blocks", res.num_blocks())?;
                for (i, b) in res.blocks.iter().enumerate() {
                    let states: Vec<String> = b.iter().map(usize::to_string).collect();
                    writeln!(out, "  B{i} = {{{}}}", states.join(", "))?;
                }
            }
            (Section::Relation, Style::Machine) => {
                for (a, c) in res.relation_pairs() {
                    writeln!(out, "simulates {a} {c}")?;
                }
            }
            (Section::Relation, Style::Text) => {
                writeln!(out, "block relation (B ≤ C: states of C simulate states of B):")?;
                for (a, c) in res.relation_pairs().filter(|(a, c)| a != c) {
                    writeln!(out, "  B{a} ≤ B{c}")?;
                }
            }
            (Section::Preorder, style) => {
                let rel = preorder.expect("preorder requested but not computed");
                if style == Style::Text {
                    writeln!(out, "simulation preorder: {} pairs", rel.num_pairs())?;
                }
                for (s, t) in rel.pairs() {
                    match style {
                        Style::Machine => writeln!(out, "pair {s} {t}")?,
                        Style::Text => writeln!(out, "  {s} ≤ {t}")?,
                    }
                }
            }
            (Section::Stats, style) => {
                if style == Style::Text {
                    writeln!(out, "statistics:")?;
                }
                for (name, value) in res.stats.entries() {
                    match style {
                        Style::Machine => writeln!(out, "stat {name} {value}")?,
                        Style::Text => writeln!(out, "  {name:<20} {value}")?,
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn write_verify(out: &mut dyn Write, against: &str, ok: bool, style: Style) -> std::io::Result<()> {
    let verdict = if ok { "MATCH" } else { "MISMATCH" };
    match style {
        Style::Machine => writeln!(out, "verify {against} {verdict}"),
        Style::Text => writeln!(out, "verification against {against}: {verdict}"),
    }
}

/// Machine-format output read back into memory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedOutput {
    pub blocks: Vec<(usize, Vec<usize>)>,
    pub simulates: Vec<(usize, usize)>,
    pub pairs: Vec<(usize, usize)>,
    pub stats: Vec<(String, u64)>,
    pub verify: Vec<(String, bool)>,
}

pub fn parse_machine(text: &str) -> Result<ParsedOutput, String> {
    let mut out = ParsedOutput::default();
    let num = |s: &str, line: usize| s.parse::<usize>().map_err(|_| format!("line {line}: bad number `{s}`"));
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["block", id, rest @ ..] => {
                let id = id.strip_suffix(':').ok_or(format!("line {lineno}: missing colon"))?;
                let states = rest.iter().map(|s| num(s, lineno)).collect::<Result<_, _>>()?;
                out.blocks.push((num(id, lineno)?, states));
            }
            ["simulates", a, b] => out.simulates.push((num(a, lineno)?, num(b, lineno)?)),
            ["pair", a, b] => out.pairs.push((num(a, lineno)?, num(b, lineno)?)),
            ["stat", name, value] => {
                let v = value.parse().map_err(|_| format!("line {lineno}: bad value `{value}`"))?;
                out.stats.push((name.to_string(), v));
            }
            ["verify", name, verdict] => {
                let ok = match *verdict {
                    "MATCH" => true,
                    "MISMATCH" => false,
                    v => return Err(format!("line {lineno}: bad verdict `{v}`")),
                };
                out.verify.push((name.to_string(), ok));
            }
            _ => return Err(format!("line {lineno}: unrecognised `{line}`")),
        }
    }
    Ok(out)
}
