use std::fmt::Write as _;

use super::structure::{Elem, FiniteStructure};
use crate::logic::Signature;
use crate::{Error, Result};

/// Parses the structure format:
///
/// ```text
/// domain 3
/// rel P: (0) (2)
/// rel E1: (0,1)
/// ```
///
/// With `close` set, distinguished relations are read as generators and
/// closed; otherwise they must already be symmetric and transitive (the
/// diagonal is always implicit).
pub fn load_structure(text: &str, sig: &Signature, close: bool) -> Result<FiniteStructure> {
    let mut s: Option<FiniteStructure> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fmt = |msg: String| Error::Format { line: no + 1, msg };
        if let Some(rest) = line.strip_prefix("domain") {
            if s.is_some() {
                return Err(fmt("duplicate domain line".into()));
            }
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| fmt(format!("bad domain size `{}`", rest.trim())))?;
            s = Some(FiniteStructure::pre_closure(sig, n));
            continue;
        }
        let Some(rest) = line.strip_prefix("rel") else {
            return Err(fmt(format!("unrecognized line `{line}`")));
        };
        let st = s
            .as_mut()
            .ok_or_else(|| fmt("`rel` before `domain`".into()))?;
        let (name, tuples) = rest
            .split_once(':')
            .ok_or_else(|| fmt("missing `:` after relation name".into()))?;
        let name = name.trim();
        let id = sig
            .id(name)
            .ok_or_else(|| fmt(format!("undeclared symbol `{name}`")))?;
        for tuple in parse_tuples(tuples).map_err(fmt)? {
            st.add_tuple(id, tuple).map_err(|e| fmt(e.to_string()))?;
        }
    }
    let mut s = s.ok_or(Error::Format {
        line: 0,
        msg: "missing `domain` line".into(),
    })?;
    if close {
        s.close_in_place();
    } else {
        for j in 0..sig.k() {
            for a in s.elements() {
                s.add_tuple(sig.dist_id(j), vec![a, a])?;
            }
        }
        s.validate_equivalences()?;
        s.close_in_place();
    }
    Ok(s)
}

fn parse_tuples(text: &str) -> std::result::Result<Vec<Vec<Elem>>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected `(` in `{rest}`"))?;
        let end = body.find(')').ok_or("unclosed tuple")?;
        let tuple = body[..end]
            .split(',')
            .map(|x| x.trim().parse::<Elem>().map_err(|_| format!("bad element `{}`", x.trim())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        out.push(tuple);
        rest = body[end + 1..].trim_start();
    }
    Ok(out)
}

impl FiniteStructure {
    /// Writes the structure format. Distinguished relations are listed
    /// without their diagonal.
    pub fn to_text(&self) -> String {
        let sig = self.sig();
        let mut out = format!("domain {}\n", self.size());
        for id in 0..sig.num_symbols() {
            let tuples: Vec<String> = self
                .rel(id)
                .iter()
                .filter(|t| !(sig.is_dist(id) && t[0] == t[1]))
                .map(|t| {
                    let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                    format!("({})", parts.join(","))
                })
                .collect();
            if !tuples.is_empty() {
                let _ = writeln!(out, "rel {}: {}", sig.name(id), tuples.join(" "));
            }
        }
        out
    }

    /// Graphviz rendering: nodes labelled with their unary symbols, base
    /// binary tuples as arrows, distinguished classes as dashed edges.
    pub fn to_dot(&self) -> String {
        let sig = self.sig();
        let mut out = String::from("graph structure {\n  node [shape=circle];\n");
        for a in self.elements() {
            let labels: Vec<&str> = (0..sig.num_symbols())
                .filter(|&id| !sig.is_dist(id) && sig.arity(id) == 1 && self.holds(id, &[a]))
                .map(|id| sig.name(id))
                .collect();
            let _ = writeln!(out, "  {a} [label=\"{a}\\n{}\"];", labels.join(","));
        }
        for id in 0..sig.num_symbols() {
            if sig.arity(id) != 2 {
                continue;
            }
            for t in self.rel(id) {
                let (a, b) = (t[0], t[1]);
                if sig.is_dist(id) {
                    if a < b {
                        let _ = writeln!(
                            out,
                            "  {a} -- {b} [style=dashed, label=\"{}\"];",
                            sig.name(id)
                        );
                    }
                } else {
                    let _ = writeln!(out, "  {a} -- {b} [dir=forward, label=\"{}\"];", sig.name(id));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new().with_base("P", 1).with_base("R", 2).with_dist("E1")
    }

    #[test]
    fn load_and_write_round_trip() {
        let text = "domain 3\nrel P: (0) (2)\nrel R: (0,1)\nrel E1: (0,1)\n";
        let s = load_structure(text, &sig(), true).unwrap();
        assert!(s.is_valid());
        assert!(s.holds_named("E1", &[1, 0]));
        let again = load_structure(&s.to_text(), &sig(), false).unwrap();
        assert_eq!(again, s);
        assert!(s.to_dot().contains("0 -- 1 [style=dashed"));
    }

    #[test]
    fn strict_mode_rejects_generators() {
        let text = "domain 2\nrel E1: (0,1)\n";
        assert!(matches!(
            load_structure(text, &sig(), false),
            Err(Error::NotEquivalence { .. })
        ));
    }

    #[test]
    fn format_errors() {
        assert!(load_structure("rel P: (0)\n", &sig(), true).is_err());
        assert!(load_structure("domain 2\nrel Q: (0)\n", &sig(), true).is_err());
        assert!(load_structure("domain 2\nrel R: (0)\n", &sig(), true).is_err());
        assert!(load_structure("domain 2\nrel P: (7)\n", &sig(), true).is_err());
        assert!(load_structure("domain x\n", &sig(), true).is_err());
    }
}
