use crate::{Error, Result};

/// Split signature: base symbols with arities, then the distinguished
/// binary symbols that are interpreted as equivalences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    base: Vec<(String, usize)>,
    dist: Vec<String>,
}

/// Index of a symbol in a signature: base symbols first, then distinguished.
pub type SymId = usize;

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_base(&mut self, name: &str, arity: usize) -> Result<()> {
        self.check_fresh(name)?;
        if arity == 0 {
            return Err(Error::Signature(format!("symbol `{name}` has arity 0")));
        }
        self.base.push((name.to_string(), arity));
        Ok(())
    }

    pub fn add_dist(&mut self, name: &str) -> Result<()> {
        self.check_fresh(name)?;
        self.dist.push(name.to_string());
        Ok(())
    }

    pub fn with_base(mut self, name: &str, arity: usize) -> Self {
        self.add_base(name, arity).expect("valid base symbol");
        self
    }

    pub fn with_dist(mut self, name: &str) -> Self {
        self.add_dist(name).expect("valid distinguished symbol");
        self
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if name.is_empty() {
            return Err(Error::Signature("empty symbol name".into()));
        }
        if self.id(name).is_some() {
            return Err(Error::Signature(format!("duplicate symbol `{name}`")));
        }
        Ok(())
    }

    pub fn base(&self) -> &[(String, usize)] {
        &self.base
    }

    pub fn dist(&self) -> &[String] {
        &self.dist
    }

    /// Number of distinguished symbols.
    pub fn k(&self) -> usize {
        self.dist.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.base.len() + self.dist.len()
    }

    pub fn id(&self, name: &str) -> Option<SymId> {
        if let Some(i) = self.base.iter().position(|(n, _)| n == name) {
            return Some(i);
        }
        self.dist
            .iter()
            .position(|n| n == name)
            .map(|j| self.base.len() + j)
    }

    pub fn name(&self, id: SymId) -> &str {
        if id < self.base.len() {
            &self.base[id].0
        } else {
            &self.dist[id - self.base.len()]
        }
    }

    pub fn arity(&self, id: SymId) -> usize {
        if id < self.base.len() {
            self.base[id].1
        } else {
            2
        }
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.id(name).map(|i| self.arity(i))
    }

    pub fn is_dist(&self, id: SymId) -> bool {
        id >= self.base.len()
    }

    /// Position of a distinguished symbol among E_1..E_k.
    pub fn dist_index(&self, name: &str) -> Option<usize> {
        self.dist.iter().position(|n| n == name)
    }

    pub fn dist_id(&self, j: usize) -> SymId {
        self.base.len() + j
    }

    pub fn max_arity(&self) -> usize {
        self.base
            .iter()
            .map(|(_, a)| *a)
            .chain(self.dist.iter().map(|_| 2))
            .max()
            .unwrap_or(0)
    }

    /// Parses the signature header format: `base NAME ARITY` or `eq NAME`
    /// per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sig = Signature::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fmt = |msg: String| Error::Format { line: no + 1, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["base", name, arity] => {
                    let a: usize = arity
                        .parse()
                        .map_err(|_| fmt(format!("bad arity `{arity}`")))?;
                    sig.add_base(name, a).map_err(|e| fmt(e.to_string()))?;
                }
                ["eq", name] => sig.add_dist(name).map_err(|e| fmt(e.to_string()))?,
                _ => return Err(fmt(format!("unrecognized line `{line}`"))),
            }
        }
        Ok(sig)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, a) in &self.base {
            out.push_str(&format!("base {n} {a}\n"));
        }
        for n in &self.dist {
            out.push_str(&format!("eq {n}\n"));
        }
        out
    }

    /// Same symbols, with the distinguished ones demoted to base binary
    /// symbols. Used for the transitive-semantics variant.
    pub fn base_only(&self) -> Signature {
        let mut s = Signature::new();
        for (n, a) in &self.base {
            s.base.push((n.clone(), *a));
        }
        for n in &self.dist {
            s.base.push((n.clone(), 2));
        }
        s
    }
}
