use super::formula::{Formula, Kind, Var, VarNames};
use super::signature::Signature;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    True,
    False,
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Not,
    Eq,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

impl Lexer {
    fn new(text: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let (mut line, mut col) = (1, 1);
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (l0, c0) = (line, col);
            if c == '\n' {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            if c.is_whitespace() {
                col += 1;
                i += 1;
                continue;
            }
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                '.' => Some(Tok::Dot),
                '&' => Some(Tok::And),
                '|' => Some(Tok::Or),
                '~' => Some(Tok::Not),
                '=' => Some(Tok::Eq),
                _ => None,
            };
            if let Some(t) = single {
                toks.push((t, l0, c0));
                col += 1;
                i += 1;
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let t = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                toks.push((t, l0, c0));
                continue;
            }
            return Err(Error::Syntax {
                line: l0,
                col: c0,
                msg: format!("unexpected character `{c}`"),
            });
        }
        toks.push((Tok::End, line, col));
        Ok(Lexer { toks })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    sig: &'a Signature,
    names: VarNames,
}

/// Result of parsing: the tree and the surface names of its variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub formula: Formula,
    pub names: VarNames,
}

/// Parses formula text over `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Parsed> {
    let lx = Lexer::new(text)?;
    let mut p = Parser {
        toks: lx.toks,
        pos: 0,
        sig,
        names: VarNames::default(),
    };
    let formula = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.err("trailing input"));
    }
    Ok(Parsed {
        formula,
        names: p.names,
    })
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err(&self, msg: &str) -> Error {
        let (t, line, col) = &self.toks[self.pos];
        Error::Syntax {
            line: *line,
            col: *col,
            msg: format!("{msg} (found {t:?})"),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&format!("expected {t:?}")))
        }
    }

    fn expr(&mut self) -> Result<Formula> {
        let mut cs = vec![self.conj()?];
        while *self.peek() == Tok::Or {
            self.bump();
            cs.push(self.conj()?);
        }
        Ok(Formula::or(cs))
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut cs = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            cs.push(self.unary()?);
        }
        Ok(Formula::and(cs))
    }

    fn var(&mut self) -> Result<Var> {
        match self.bump() {
            Tok::Ident(n) => {
                if self.sig.id(&n).is_some() {
                    self.pos -= 1;
                    return Err(self.err("symbol used as variable"));
                }
                Ok(self.names.intern(&n))
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected variable"))
            }
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let universal = self.bump() == Tok::Forall;
                let mut vars = vec![self.var()?];
                while matches!(self.peek(), Tok::Ident(_)) {
                    vars.push(self.var()?);
                }
                self.expect(Tok::Dot)?;
                let body = self.expr()?;
                if !universal {
                    return Ok(Formula::exists(vars, body));
                }
                Ok(match body.kind() {
                    Kind::Neg(inner) => Formula::univ_neg(vars, (**inner).clone()),
                    _ => Formula::neg(Formula::exists(vars, Formula::neg(body))),
                })
            }
            Tok::True => {
                self.bump();
                Ok(Formula::truth())
            }
            Tok::False => {
                self.bump();
                Ok(Formula::falsity())
            }
            Tok::LParen => {
                self.bump();
                let f = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                if self.toks[self.pos + 1].0 == Tok::LParen {
                    self.atom(&name)
                } else {
                    let a = self.var()?;
                    self.expect(Tok::Eq)?;
                    let b = self.var()?;
                    Ok(Formula::equality(a, b))
                }
            }
            _ => Err(self.err("expected formula")),
        }
    }

    fn atom(&mut self, name: &str) -> Result<Formula> {
        let Some(arity) = self.sig.arity_of(name) else {
            return Err(Error::UndeclaredSymbol(name.to_string()));
        };
        self.bump();
        self.expect(Tok::LParen)?;
        let mut args = vec![self.var()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.var()?);
        }
        self.expect(Tok::RParen)?;
        if args.len() != arity {
            return Err(Error::Arity {
                sym: name.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        Ok(Formula::atom(name, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with_base("P", 1)
            .with_base("Q", 1)
            .with_base("R", 2)
            .with_dist("E1")
    }

    #[test]
    fn univ_neg_sugar() {
        let s = Signature::new().with_base("P", 2);
        let p = parse_formula("forall x y . ~P(x,y)", &s).unwrap();
        assert_eq!(
            p.formula,
            Formula::univ_neg(vec![0, 1], Formula::atom("P", vec![0, 1]))
        );
    }

    #[test]
    fn single_atom() {
        let p = parse_formula("P(x)", &sig()).unwrap();
        assert_eq!(p.formula, Formula::atom("P", vec![0]));
    }

    #[test]
    fn round_trip_modulo_whitespace() {
        let text = "exists x . (P(x) & ~Q(x))";
        let p = parse_formula(text, &sig()).unwrap();
        let printed = p.formula.pretty(&p.names);
        let strip = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        assert_eq!(strip(&printed), strip("exists x . P(x) & ~Q(x)"));
        assert_eq!(parse_formula(&printed, &sig()).unwrap(), p);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("P(x) &\n  # Q(x)", &sig()) {
            Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            parse_formula("S(x)", &sig()),
            Err(Error::UndeclaredSymbol("S".into()))
        );
        assert!(matches!(parse_formula("R(x)", &sig()), Err(Error::Arity { .. })));
        assert!(parse_formula("P(x) Q(x)", &sig()).is_err());
    }

    #[test]
    fn plain_forall_desugars() {
        let p = parse_formula("forall x . exists y . R(x,y)", &sig()).unwrap();
        let inner = Formula::exists(vec![1], Formula::atom("R", vec![0, 1]));
        assert_eq!(
            p.formula,
            Formula::neg(Formula::exists(vec![0], Formula::neg(inner)))
        );
    }
}
