//! Recursive-descent parser for the formula fragment.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! formula  := temporal ( "&" temporal )*
//! temporal := ("G" | "F") "[" num "," (num | "inf") "]" "(" body ")"
//! body     := lit ( "&" lit )* ( "&" temporal )?
//! lit      := "!"? ident | "true"
//! ```
//!
//! A nested temporal operator is only allowed as the *last* conjunct of an
//! `F` body (building a nested chain); everything else outside the fragment
//! — disjunction, until, negated balls, chains under `G` — is rejected with
//! a dedicated diagnostic.

use super::{AtomTable, FormulaError, FormulaNode, PredicateKind, SeqStep, TimeWindow};

/// Parses `input` against the atoms in `atoms`.
pub fn parse_formula(input: &str, atoms: &AtomTable) -> Result<FormulaNode, FormulaError> {
    let mut parser = Parser {
        input,
        pos: 0,
        atoms,
    };
    let node = parser.parse_sequence()?;
    parser.skip_ws();
    if parser.pos != parser.input.len() {
        return Err(parser.syntax("end of input"));
    }
    Ok(node)
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
    atoms: &'a AtomTable,
}

impl<'a> Parser<'a> {
    fn syntax(&self, expected: &str) -> FormulaError {
        FormulaError::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: char) -> Result<(), FormulaError> {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len_utf8();
            Ok(())
        } else {
            Err(self.syntax(&format!("`{token}`")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// True when the upcoming tokens open a temporal operator (`G[` / `F[`).
    fn at_temporal(&mut self) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if !(rest.starts_with('G') || rest.starts_with('F')) {
            return false;
        }
        // Distinguish the operator from an atom whose name starts with G/F.
        let after = rest[1..].trim_start();
        after.starts_with('[')
    }

    fn parse_ident(&mut self) -> Result<(String, usize), FormulaError> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        let end = rest
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_alphanumeric() || *c == '_')
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .ok_or_else(|| self.syntax("identifier"))?;
        let first = rest.chars().next().unwrap();
        if first.is_ascii_digit() {
            return Err(self.syntax("identifier"));
        }
        self.pos += end;
        Ok((rest[..end].to_string(), start))
    }

    fn parse_number(&mut self) -> Result<f64, FormulaError> {
        self.skip_ws();
        if self.rest().starts_with("inf") {
            self.pos += 3;
            return Ok(f64::INFINITY);
        }
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_digit() || *c == '.')
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .ok_or_else(|| self.syntax("number"))?;
        let text = &rest[..len];
        let value: f64 = text.parse().map_err(|_| self.syntax("number"))?;
        self.pos += len;
        Ok(value)
    }

    /// `formula := temporal ("&" temporal)*`
    fn parse_sequence(&mut self) -> Result<FormulaNode, FormulaError> {
        let mut parts = vec![self.parse_temporal()?];
        while self.peek() == Some('&') {
            self.eat('&')?;
            parts.push(self.parse_temporal()?);
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        if parts
            .iter()
            .any(|p| matches!(p, FormulaNode::SeqNest { .. }))
        {
            return Err(FormulaError::Fragment {
                reason: "a nested chain cannot be combined with `&` at the top level".into(),
            });
        }
        Ok(FormulaNode::SeqConj(parts))
    }

    fn parse_temporal(&mut self) -> Result<FormulaNode, FormulaError> {
        self.skip_ws();
        if !self.at_temporal() {
            // Give until-expressions their own diagnostic: they are valid
            // STL but outside this fragment.
            if let Ok((_, _)) = self.clone_probe_ident() {
                return Err(FormulaError::Fragment {
                    reason: "until and bare predicates are not allowed at the temporal level; \
                             expected `G[..](..)` or `F[..](..)`"
                        .into(),
                });
            }
            return Err(self.syntax("`G` or `F`"));
        }
        let op = self.rest().chars().next().unwrap();
        self.pos += 1;
        self.eat('[')?;
        let lo = self.parse_number()?;
        self.eat(',')?;
        let hi = self.parse_number()?;
        self.eat(']')?;
        let window = TimeWindow::new(lo, hi)?;
        self.eat('(')?;
        let (guard, tail) = self.parse_body()?;
        self.eat(')')?;

        match (op, tail) {
            ('G', None) => Ok(FormulaNode::Always {
                window,
                body: Box::new(guard),
            }),
            ('F', None) => Ok(FormulaNode::Eventually {
                window,
                body: Box::new(guard),
            }),
            ('G', Some(_)) => Err(FormulaError::Fragment {
                reason: "nested temporal operators under `G` are not in the fragment".into(),
            }),
            ('F', Some(tail)) => Ok(match tail {
                FormulaNode::SeqNest {
                    mut steps,
                    terminal,
                } => {
                    steps.insert(0, SeqStep { window, guard });
                    FormulaNode::SeqNest { steps, terminal }
                }
                terminal @ (FormulaNode::Always { .. } | FormulaNode::Eventually { .. }) => {
                    FormulaNode::SeqNest {
                        steps: vec![SeqStep { window, guard }],
                        terminal: Box::new(terminal),
                    }
                }
                _ => unreachable!("tails are always temporal"),
            }),
            _ => unreachable!("operator is G or F"),
        }
    }

    /// Probes for an identifier without committing the cursor.
    fn clone_probe_ident(&mut self) -> Result<(String, usize), FormulaError> {
        let saved = self.pos;
        let out = self.parse_ident();
        self.pos = saved;
        out
    }

    /// `body := lit ("&" lit)* ("&" temporal)?`
    ///
    /// Returns the conjunction of literals plus the optional temporal tail.
    fn parse_body(&mut self) -> Result<(FormulaNode, Option<FormulaNode>), FormulaError> {
        let mut lits = Vec::new();
        let mut tail = None;
        loop {
            if self.at_temporal() {
                if lits.is_empty() {
                    return Err(FormulaError::Fragment {
                        reason: "a nested temporal operator needs at least one guard literal \
                                 before it (use `true` for an empty guard)"
                            .into(),
                    });
                }
                tail = Some(self.parse_temporal()?);
                break;
            }
            lits.push(self.parse_literal()?);
            if self.peek() == Some('&') {
                self.eat('&')?;
            } else {
                break;
            }
        }
        if tail.is_some() && self.peek() == Some('&') {
            return Err(FormulaError::Fragment {
                reason: "the nested temporal operator must be the last conjunct of its body".into(),
            });
        }
        let guard = if lits.len() == 1 {
            lits.pop().unwrap()
        } else {
            FormulaNode::And(lits)
        };
        Ok((guard, tail))
    }

    fn parse_literal(&mut self) -> Result<FormulaNode, FormulaError> {
        self.skip_ws();
        let negated = if self.rest().starts_with('!') {
            self.pos += 1;
            true
        } else {
            false
        };
        let (name, position) = self.parse_ident()?;
        if name == "true" {
            if negated {
                return Err(FormulaError::Fragment {
                    reason: "negation of `true` is not in the fragment".into(),
                });
            }
            return Ok(FormulaNode::True);
        }
        if name == "U" {
            return Err(FormulaError::Fragment {
                reason: "the until operator is not in the fragment".into(),
            });
        }
        let atom = self
            .atoms
            .get(&name)
            .ok_or(FormulaError::UnknownAtom {
                name: name.clone(),
                position,
            })?
            .clone();
        if negated {
            if matches!(atom.kind, PredicateKind::InfBall { .. }) {
                return Err(FormulaError::Fragment {
                    reason: format!("negating ball atom `{name}` would introduce a disjunction"),
                });
            }
            // Check for an until operator following the literal to give the
            // fragment diagnostic instead of a bare syntax error.
            Ok(FormulaNode::NotPred(atom))
        } else {
            self.skip_ws();
            if self.rest().starts_with("U[") {
                return Err(FormulaError::Fragment {
                    reason: "the until operator is not in the fragment".into(),
                });
            }
            Ok(FormulaNode::Pred(atom))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::PredicateAtom;
    use nalgebra::dvector;

    fn atoms() -> AtomTable {
        let mut t = AtomTable::new();
        for name in ["p1", "p2", "p3"] {
            t.insert(
                name.to_string(),
                PredicateAtom::halfspace(name, dvector![1.0, 0.0], 1.0),
            );
        }
        t.insert(
            "ball".to_string(),
            PredicateAtom::inf_ball("ball", vec![0, 1], dvector![0.0, 0.0], 0.5),
        );
        t
    }

    #[test]
    fn parses_single_always() {
        let node = parse_formula("G[0,5](p1 & !p2)", &atoms()).unwrap();
        match &node {
            FormulaNode::Always { window, body } => {
                assert_eq!((window.lo, window.hi), (0.0, 5.0));
                assert!(body.is_spatial());
            }
            other => panic!("expected Always, got {other:?}"),
        }
    }

    #[test]
    fn parses_nested_chain_into_seq_nest() {
        let node = parse_formula("F[7,10](p1 & F[10,20](p2))", &atoms()).unwrap();
        match &node {
            FormulaNode::SeqNest { steps, terminal } => {
                assert_eq!(steps.len(), 1);
                assert_eq!((steps[0].window.lo, steps[0].window.hi), (7.0, 10.0));
                match terminal.as_ref() {
                    FormulaNode::Eventually { window, .. } => {
                        assert_eq!((window.lo, window.hi), (10.0, 20.0));
                    }
                    other => panic!("expected Eventually terminal, got {other:?}"),
                }
            }
            other => panic!("expected SeqNest, got {other:?}"),
        }
    }

    #[test]
    fn parses_ordered_conjunction() {
        let node = parse_formula("F[0,2](p1) & G[3,5](p2)", &atoms()).unwrap();
        assert!(matches!(&node, FormulaNode::SeqConj(children) if children.len() == 2));
    }

    #[test]
    fn rejects_until() {
        let err = parse_formula("p1 U[0,5] p2", &atoms()).unwrap_err();
        assert!(matches!(err, FormulaError::Fragment { .. }), "{err}");
    }

    #[test]
    fn rejects_unknown_atom_with_position() {
        let err = parse_formula("G[0,5](p1 & nope)", &atoms()).unwrap_err();
        match err {
            FormulaError::UnknownAtom { name, position } => {
                assert_eq!(name, "nope");
                assert_eq!(position, 12);
            }
            other => panic!("expected UnknownAtom, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negated_ball() {
        let err = parse_formula("G[0,5](!ball)", &atoms()).unwrap_err();
        assert!(matches!(err, FormulaError::Fragment { .. }), "{err}");
    }

    #[test]
    fn rejects_chain_under_always() {
        let err = parse_formula("G[0,5](p1 & F[0,2](p2))", &atoms()).unwrap_err();
        assert!(matches!(err, FormulaError::Fragment { .. }), "{err}");
    }

    #[test]
    fn rejects_backwards_window() {
        let err = parse_formula("G[5,2](p1)", &atoms()).unwrap_err();
        assert!(matches!(err, FormulaError::Fragment { .. }), "{err}");
    }

    #[test]
    fn accepts_unbounded_upper_endpoint() {
        let node = parse_formula("G[1,inf](p1)", &atoms()).unwrap();
        match node {
            FormulaNode::Always { window, .. } => assert!(window.hi.is_infinite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn display_round_trips_nested_chain() {
        let src = "F[7,10](p1 & F[10,20](p2 & G[0,12](p3 & !p1)))";
        let node = parse_formula(src, &atoms()).unwrap();
        let printed = node.to_string();
        let reparsed = parse_formula(&printed, &atoms()).unwrap();
        assert_eq!(node, reparsed);
        assert_eq!(printed, src);
    }
}
