use std::fmt::Write as _;
use std::path::Path;

use super::{FormulaInput, StructureInput};
use crate::construct_nd::TreeNode;
use crate::logic::{parse_formula, to_normal_form, Formula, NormalFormFormula, Signature};
use crate::semantics::check_model;
use crate::structures::{load_structure, Elem, FiniteStructure};
use crate::{Error, Result};

/// Largest number of unknown bits tried when filling in fresh symbols.
const EXPANSION_BITS: usize = 20;

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Format {
        line: 0,
        msg: format!("cannot write {}: {e}", path.display()),
    })
}

pub struct LoadedFormula {
    pub formula: Formula,
    pub sig: Signature,
}

pub fn load_formula(input: &FormulaInput) -> Result<LoadedFormula> {
    let sig = Signature::parse(&read(&input.sig)?)?;
    let parsed = parse_formula(&read(&input.formula)?, &sig)?;
    Ok(LoadedFormula {
        formula: parsed.formula,
        sig,
    })
}

pub fn load_nf(input: &FormulaInput) -> Result<(LoadedFormula, NormalFormFormula)> {
    let f = load_formula(input)?;
    let (nf, _) = to_normal_form(&f.formula, &f.sig)?;
    Ok((f, nf))
}

/// Loads a structure over the normal form's signature. When the file leaves
/// every fresh symbol empty and is not a model as is, the fresh symbols are
/// filled in by search (small structures only).
pub fn load_model(input: &StructureInput, nf: &NormalFormFormula) -> Result<FiniteStructure> {
    let s = load_structure(&read(&input.structure)?, &nf.signature, !input.no_close)?;
    let fresh: Vec<usize> = nf
        .fresh_symbols()
        .iter()
        .map(|n| nf.signature.id(n).expect("fresh symbol declared"))
        .collect();
    if check_model(&s, nf) || fresh.is_empty() || fresh.iter().any(|&id| !s.rel(id).is_empty()) {
        return Ok(s);
    }
    let bits = fresh.len() * s.size();
    if bits > EXPANSION_BITS {
        return Ok(s);
    }
    for code in 0u64..1 << bits {
        let mut cand = s.clone();
        for (i, &id) in fresh.iter().enumerate() {
            for a in s.elements() {
                if code >> (i * s.size() + a as usize) & 1 == 1 {
                    cand.add_tuple(id, vec![a])?;
                }
            }
        }
        if check_model(&cand, nf) {
            return Ok(cand);
        }
    }
    Ok(s)
}

/// `element pattern-element` per line.
pub fn pmap_text(pmap: &[Elem]) -> String {
    let mut out = String::from("# element pattern\n");
    for (b, a) in pmap.iter().enumerate() {
        let _ = writeln!(out, "{b} {a}");
    }
    out
}

/// `element anchor path` per line; the path lists 0-based witness numbers
/// separated by commas, `.` when empty.
pub fn tree_pmap_text(pmap: &[TreeNode]) -> String {
    let mut out = String::from("# element anchor path\n");
    for (b, n) in pmap.iter().enumerate() {
        let path = if n.path.is_empty() {
            ".".to_string()
        } else {
            n.path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        };
        let _ = writeln!(out, "{b} {} {path}", n.anchor);
    }
    out
}

pub enum Pmap {
    Flat(Vec<Elem>),
    Tree(Vec<TreeNode>),
}

pub fn parse_pmap(text: &str) -> Result<Pmap> {
    let mut flat = Vec::new();
    let mut tree = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fmt = |msg: String| Error::Format { line: no + 1, msg };
        let num = |s: &str| s.parse::<u32>().map_err(|_| fmt(format!("bad number `{s}`")));
        let parts: Vec<&str> = line.split_whitespace().collect();
        let b = num(parts[0])? as usize;
        if b != flat.len() + tree.len() {
            return Err(fmt(format!("expected element {}", flat.len() + tree.len())));
        }
        match parts.as_slice() {
            [_, a] if tree.is_empty() => flat.push(num(a)?),
            [_, a, path] if flat.is_empty() => {
                let path = if *path == "." {
                    Vec::new()
                } else {
                    path.split(',')
                        .map(|p| p.parse::<u16>().map_err(|_| fmt(format!("bad path entry `{p}`"))))
                        .collect::<Result<Vec<_>>>()?
                };
                tree.push(TreeNode {
                    anchor: num(a)?,
                    path,
                });
            }
            _ => return Err(fmt(format!("unrecognized line `{line}`"))),
        }
    }
    Ok(if tree.is_empty() {
        Pmap::Flat(flat)
    } else {
        Pmap::Tree(tree)
    })
}

/// Graphviz digraph with one node per label and the given edges.
pub fn graph_dot(name: &str, labels: &[String], edges: &[(usize, usize)]) -> String {
    let mut out = format!("digraph {name} {{\n  node [shape=box];\n");
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{l}\"];");
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  n{a} -> n{b};");
    }
    out.push_str("}\n");
    out
}
