use crate::engine::{Clause, ClauseError};
use crate::terms::{atoms, Sym, Term, VarId};

use super::error::{ReadError, ReadErrorKind};
use super::lexer::{end_pos, tokenize, Pos, Token, TokenKind};
use super::ops::OperatorTable;

/// A term read from text. Variables are numbered `0..n_vars` in order of
/// first appearance; `var_names` lists the named ones (not `_`).
#[derive(Debug, Clone)]
pub struct ParsedTerm {
    pub term: Term,
    pub var_names: Vec<(String, VarId)>,
    pub n_vars: usize,
}

/// Operator-precedence parser over a token slice.
pub struct Parser<'a> {
    tokens: &'a [Token],
    i: usize,
    ops: &'a OperatorTable,
    var_names: Vec<(String, VarId)>,
    n_vars: usize,
    eof: Pos,
}

type PResult<T> = Result<T, ReadError>;

impl<'a> Parser<'a> {
    pub fn new(tokens: &'a [Token], ops: &'a OperatorTable, eof: Pos) -> Self {
        Parser {
            tokens,
            i: 0,
            ops,
            var_names: Vec::new(),
            n_vars: 0,
            eof,
        }
    }

    pub fn position(&self) -> usize {
        self.i
    }

    /// Forgets variable names so the next term gets fresh cells.
    pub fn reset_vars(&mut self) {
        self.var_names.clear();
        self.n_vars = 0;
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.i)
    }

    fn peek_at(&self, n: usize) -> Option<&'a Token> {
        self.tokens.get(self.i + n)
    }

    fn advance(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.i);
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, kind: ReadErrorKind, pos: Pos) -> PResult<T> {
        Err(ReadError::new(kind, pos))
    }

    fn expect_punct(&mut self, p: &'static str) -> PResult<()> {
        match self.peek() {
            Some(t) if t.is_punct(p) => {
                self.i += 1;
                Ok(())
            }
            Some(t) => self.err(
                ReadErrorKind::Expected {
                    expected: p,
                    found: t.text.clone(),
                },
                t.pos,
            ),
            None => self.err(ReadErrorKind::UnexpectedEof, self.eof),
        }
    }

    fn fresh_var(&mut self) -> Term {
        let v = VarId(self.n_vars);
        self.n_vars += 1;
        Term::Var(v)
    }

    fn named_var(&mut self, name: &str) -> Term {
        if name == "_" {
            return self.fresh_var();
        }
        if let Some((_, v)) = self.var_names.iter().find(|(n, _)| n == name) {
            return Term::Var(*v);
        }
        let t = self.fresh_var();
        if let Term::Var(v) = t {
            self.var_names.push((name.to_owned(), v));
        }
        t
    }

    /// Parses one term of priority at most `max`; the result carries the
    /// variables seen so far.
    pub fn parse_term(&mut self, max: u16) -> PResult<ParsedTerm> {
        let (term, _) = self.parse(max)?;
        Ok(ParsedTerm {
            term,
            var_names: self.var_names.clone(),
            n_vars: self.n_vars,
        })
    }

    fn parse(&mut self, max: u16) -> PResult<(Term, u16)> {
        let (left, prec) = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.primary(max))?;
        self.infix_loop(left, prec, max)
    }

    fn infix_loop(&mut self, mut left: Term, mut left_prec: u16, max: u16) -> PResult<(Term, u16)> {
        while let Some(tok) = self.peek() {
            let Some(name) = tok.op_name() else { break };
            if let Some(def) = self.ops.infix(name) {
                if def.priority <= max && left_prec <= def.left_max() {
                    self.i += 1;
                    let (right, _) = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
                        self.parse(def.right_max())
                    })?;
                    left = Term::compound(Sym::intern(name), vec![left, right]);
                    left_prec = def.priority;
                    continue;
                }
            }
            if let Some(def) = self.ops.postfix(name) {
                if def.priority <= max && left_prec <= def.left_max() {
                    self.i += 1;
                    left = Term::compound(Sym::intern(name), vec![left]);
                    left_prec = def.priority;
                    continue;
                }
            }
            break;
        }
        Ok((left, left_prec))
    }

    fn can_start_term(&self, tok: &Token) -> bool {
        match tok.kind {
            TokenKind::Atom | TokenKind::Var | TokenKind::Int | TokenKind::Float | TokenKind::Str => {
                true
            }
            TokenKind::Punct => matches!(tok.text.as_str(), "(" | "[" | "{"),
            TokenKind::End => false,
        }
    }

    fn primary(&mut self, max: u16) -> PResult<(Term, u16)> {
        let Some(tok) = self.advance() else {
            return self.err(ReadErrorKind::UnexpectedEof, self.eof);
        };
        match tok.kind {
            TokenKind::Int => Ok((self.int(&tok.text, false, tok.pos)?, 0)),
            TokenKind::Float => Ok((Term::Float(self.float(&tok.text)), 0)),
            TokenKind::Var => Ok((self.named_var(&tok.text), 0)),
            TokenKind::Str => self.err(ReadErrorKind::StringsUnsupported, tok.pos),
            TokenKind::End => self.err(ReadErrorKind::UnexpectedToken(".".into()), tok.pos),
            TokenKind::Punct => match tok.text.as_str() {
                "(" => {
                    let (t, _) = self.parse(1200)?;
                    self.expect_punct(")")?;
                    Ok((t, 0))
                }
                "[" => {
                    if self.peek().is_some_and(|t| t.is_punct("]")) {
                        self.i += 1;
                        return self.after_name(atoms::NIL.name(), true, tok, max);
                    }
                    Ok((self.list_body()?, 0))
                }
                "{" => {
                    if self.peek().is_some_and(|t| t.is_punct("}")) {
                        self.i += 1;
                        return self.after_name(atoms::CURLY.name(), true, tok, max);
                    }
                    let (t, _) = self.parse(1200)?;
                    self.expect_punct("}")?;
                    Ok((Term::compound(atoms::CURLY, vec![t]), 0))
                }
                _ => self.err(ReadErrorKind::UnexpectedToken(tok.text.clone()), tok.pos),
            },
            TokenKind::Atom => self.after_name(&tok.text, tok.quoted, tok, max),
        }
    }

    fn after_name(&mut self, name: &str, quoted: bool, tok: &Token, max: u16) -> PResult<(Term, u16)> {
        let next = self.peek();
        if let Some(n) = next {
            if n.is_punct("(") && !n.layout_before {
                self.i += 1;
                let args = self.arg_list()?;
                return Ok((Term::from_name(name, args), 0));
            }
        }
        if quoted {
            return Ok((Term::atom(name), 0));
        }
        if name == "-" {
            if let Some(n) = next {
                if !n.layout_before && matches!(n.kind, TokenKind::Int | TokenKind::Float) {
                    self.i += 1;
                    let value = match n.kind {
                        TokenKind::Int => self.int(&n.text, true, tok.pos)?,
                        _ => Term::Float(-self.float(&n.text)),
                    };
                    return Ok((value, 0));
                }
            }
        }
        if let Some(def) = self.ops.prefix(name) {
            let operand_follows = next.is_some_and(|n| {
                if !self.can_start_term(n) {
                    return false;
                }
                // `- = x` reads `-` as an atom; `- - x` nests prefix operators.
                match n.op_name() {
                    Some(op) if n.kind == TokenKind::Atom => {
                        let after_is_open = self.peek_at(1).is_some_and(|a| a.is_punct("(") && !a.layout_before);
                        self.ops.infix(op).is_none() || self.ops.prefix(op).is_some() || after_is_open
                    }
                    _ => true,
                }
            });
            if operand_follows {
                if def.priority > max {
                    return self.err(ReadErrorKind::PriorityClash(name.to_owned()), tok.pos);
                }
                let (arg, _) = self.parse(def.right_max())?;
                return Ok((Term::from_name(name, vec![arg]), def.priority));
            }
        }
        Ok((Term::atom(name), 0))
    }

    fn arg_list(&mut self) -> PResult<Vec<Term>> {
        let mut args = Vec::new();
        loop {
            let (arg, _) = self.parse(999)?;
            args.push(arg);
            match self.peek() {
                Some(t) if t.is_punct(",") => self.i += 1,
                Some(t) if t.is_punct(")") => {
                    self.i += 1;
                    return Ok(args);
                }
                Some(t) => {
                    return self.err(
                        ReadErrorKind::Expected {
                            expected: "',' or ')'",
                            found: t.text.clone(),
                        },
                        t.pos,
                    )
                }
                None => return self.err(ReadErrorKind::UnexpectedEof, self.eof),
            }
        }
    }

    fn list_body(&mut self) -> PResult<Term> {
        let mut items = Vec::new();
        loop {
            let (item, _) = self.parse(999)?;
            items.push(item);
            match self.peek() {
                Some(t) if t.is_punct(",") => self.i += 1,
                Some(t) if t.is_punct("|") => {
                    self.i += 1;
                    let (tail, _) = self.parse(999)?;
                    self.expect_punct("]")?;
                    return Ok(Term::list_with_tail(items, tail));
                }
                Some(t) if t.is_punct("]") => {
                    self.i += 1;
                    return Ok(Term::list(items));
                }
                Some(t) => {
                    return self.err(
                        ReadErrorKind::Expected {
                            expected: "',', '|' or ']'",
                            found: t.text.clone(),
                        },
                        t.pos,
                    )
                }
                None => return self.err(ReadErrorKind::UnexpectedEof, self.eof),
            }
        }
    }

    fn int(&self, text: &str, negate: bool, pos: Pos) -> PResult<Term> {
        let magnitude: i128 = text
            .parse()
            .map_err(|_| ReadError::new(ReadErrorKind::IntegerOverflow, pos))?;
        let value = if negate { -magnitude } else { magnitude };
        i64::try_from(value)
            .map(Term::Int)
            .map_err(|_| ReadError::new(ReadErrorKind::IntegerOverflow, pos))
    }

    fn float(&self, text: &str) -> f64 {
        text.parse().expect("lexer produced a malformed float")
    }

    /// Requires the next token to be a clause end (or the input to be
    /// exhausted when `allow_eof`).
    fn finish(&mut self, allow_eof: bool) -> PResult<()> {
        match self.peek() {
            None if allow_eof => Ok(()),
            None => self.err(
                ReadErrorKind::Expected {
                    expected: "'.'",
                    found: "end of input".into(),
                },
                self.eof,
            ),
            Some(t) if t.kind == TokenKind::End => {
                self.i += 1;
                Ok(())
            }
            Some(t) => {
                let kind = match t.op_name() {
                    Some(op) if self.ops.infix(op).is_some() || self.ops.postfix(op).is_some() => {
                        ReadErrorKind::PriorityClash(op.to_owned())
                    }
                    _ => ReadErrorKind::UnexpectedToken(t.text.clone()),
                };
                self.err(kind, t.pos)
            }
        }
    }
}

/// Parses a single term from `tokens`. A trailing end token is accepted but
/// not required; anything else left over is an error.
pub fn parse_term(tokens: &[Token], ops: &OperatorTable, max_priority: u16) -> Result<ParsedTerm, ReadError> {
    let eof = tokens.last().map_or(Pos { line: 1, column: 1, offset: 0 }, |t| Pos {
        line: t.pos.line,
        column: t.pos.column + t.text.chars().count(),
        offset: t.pos.offset + t.text.len(),
    });
    let mut parser = Parser::new(tokens, ops, eof);
    let parsed = parser.parse_term(max_priority)?;
    parser.finish(true)?;
    if let Some(t) = parser.peek() {
        return Err(ReadError::new(ReadErrorKind::UnexpectedToken(t.text.clone()), t.pos));
    }
    Ok(parsed)
}

/// Tokenizes and parses one term with the given operator table.
pub fn read_term_with(src: &str, ops: &OperatorTable) -> Result<ParsedTerm, ReadError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser::new(&tokens, ops, end_pos(src));
    let parsed = parser.parse_term(1200)?;
    parser.finish(true)?;
    if let Some(t) = parser.peek() {
        return Err(ReadError::new(ReadErrorKind::UnexpectedToken(t.text.clone()), t.pos));
    }
    Ok(parsed)
}

/// [`read_term_with`] over the standard operator table.
pub fn read_term(src: &str) -> Result<ParsedTerm, ReadError> {
    read_term_with(src, OperatorTable::standard())
}

/// Reads a program: a sequence of `.`-terminated clauses.
pub fn parse_program(src: &str) -> Result<Vec<Clause>, ReadError> {
    parse_program_with(src, OperatorTable::standard())
}

pub fn parse_program_with(src: &str, ops: &OperatorTable) -> Result<Vec<Clause>, ReadError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser::new(&tokens, ops, end_pos(src));
    let mut clauses = Vec::new();
    while let Some(first) = parser.peek() {
        let index = clauses.len();
        let with_index = |mut e: ReadError| {
            e.clause = Some(index);
            e
        };
        parser.reset_vars();
        let parsed = parser.parse_term(1200).map_err(with_index)?;
        parser.finish(false).map_err(with_index)?;
        let clause = clause_from_term(parsed).map_err(|kind| with_index(ReadError::new(kind, first.pos)))?;
        clauses.push(clause);
    }
    Ok(clauses)
}

fn clause_from_term(parsed: ParsedTerm) -> Result<Clause, ReadErrorKind> {
    let (head, body) = match &parsed.term {
        Term::Compound(c) if c.functor() == atoms::NECK && c.arity() == 2 => {
            (c.args()[0].clone(), c.args()[1].clone())
        }
        Term::Compound(c) if c.functor() == atoms::NECK && c.arity() == 1 => {
            return Err(ReadErrorKind::DirectiveUnsupported)
        }
        _ => (parsed.term.clone(), Term::Atom(atoms::TRUE)),
    };
    Clause::new(head, body, parsed.n_vars).map_err(|e| match e {
        ClauseError::HeadNotCallable => ReadErrorKind::NotCallable,
        ClauseError::BodyNotCallable => ReadErrorKind::BodyNotCallable,
        // Source text cannot produce host handles.
        ClauseError::ContainsHandle => unreachable!("handle in parsed clause"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(name: &str, args: Vec<Term>) -> Term {
        Term::from_name(name, args)
    }

    fn read(src: &str) -> Term {
        read_term(src).unwrap().term
    }

    #[test]
    fn precedence() {
        assert_eq!(
            read("1+2*3"),
            t("+", vec![Term::Int(1), t("*", vec![Term::Int(2), Term::Int(3)])])
        );
        assert_eq!(
            read("1-2-3"),
            t("-", vec![t("-", vec![Term::Int(1), Term::Int(2)]), Term::Int(3)])
        );
        assert_eq!(
            read("a:-b,c;d"),
            t(
                ":-",
                vec![
                    Term::atom("a"),
                    t(";", vec![t(",", vec![Term::atom("b"), Term::atom("c")]), Term::atom("d")])
                ]
            )
        );
    }

    #[test]
    fn list_sugar() {
        let parsed = read_term("[a,b|T]").unwrap();
        let tail = Term::Var(VarId(0));
        assert_eq!(
            parsed.term,
            Term::cons(Term::atom("a"), Term::cons(Term::atom("b"), tail))
        );
        assert_eq!(parsed.var_names, vec![("T".to_owned(), VarId(0))]);
        assert_eq!(read("[]"), Term::nil());
        assert_eq!(read("[ ]"), Term::nil());
    }

    #[test]
    fn same_name_shares_cell() {
        let parsed = read_term("X = f(X)").unwrap();
        let x = Term::Var(VarId(0));
        assert_eq!(parsed.term, t("=", vec![x.clone(), t("f", vec![x])]));
        assert_eq!(parsed.n_vars, 1);
    }

    #[test]
    fn anonymous_vars_are_fresh() {
        let parsed = read_term("f(_, _, X, X)").unwrap();
        assert_eq!(parsed.n_vars, 3);
        assert_eq!(parsed.var_names.len(), 1);
    }

    #[test]
    fn parenthesised_conjunction() {
        assert_eq!(
            read("f((a,b))"),
            t("f", vec![t(",", vec![Term::atom("a"), Term::atom("b")])])
        );
        assert_eq!(read("f(a,b)").args().len(), 2);
    }

    #[test]
    fn negative_numbers() {
        assert_eq!(read("-1"), Term::Int(-1));
        assert_eq!(read("- 1"), t("-", vec![Term::Int(1)]));
        assert_eq!(read("-(1)"), t("-", vec![Term::Int(1)]));
        assert_eq!(read("a-1"), t("-", vec![Term::atom("a"), Term::Int(1)]));
        assert_eq!(read("-9223372036854775808"), Term::Int(i64::MIN));
        assert_eq!(read("-2.5"), Term::Float(-2.5));
        assert_eq!(read("- a"), t("-", vec![Term::atom("a")]));
    }

    #[test]
    fn operators_as_atoms() {
        assert_eq!(read("-"), Term::atom("-"));
        assert_eq!(read("f(+, -)"), t("f", vec![Term::atom("+"), Term::atom("-")]));
        assert_eq!(read("- = a"), t("=", vec![Term::atom("-"), Term::atom("a")]));
        assert_eq!(read("(-) - a"), t("-", vec![Term::atom("-"), Term::atom("a")]));
        assert_eq!(read("- - a"), t("-", vec![t("-", vec![Term::atom("a")])]));
        assert_eq!(read("\\+ \\+ a"), t("\\+", vec![t("\\+", vec![Term::atom("a")])]));
    }

    #[test]
    fn curly_terms() {
        assert_eq!(read("{a,b}"), t("{}", vec![t(",", vec![Term::atom("a"), Term::atom("b")])]));
        assert_eq!(read("{}"), Term::atom("{}"));
    }

    #[test]
    fn priority_clash() {
        let err = read_term("a = b = c").unwrap_err();
        assert_eq!(err.kind, ReadErrorKind::PriorityClash("=".into()));
        assert_eq!(err.pos.column, 7);
        let err = read_term("f(:- a)").unwrap_err();
        assert!(matches!(err.kind, ReadErrorKind::PriorityClash(_)));
    }

    #[test]
    fn unbalanced() {
        let err = read_term("f(a").unwrap_err();
        assert_eq!(err.kind, ReadErrorKind::UnexpectedEof);
        assert_eq!(err.pos.to_string(), "1:4");
        let err = read_term("f(a))").unwrap_err();
        assert_eq!(err.kind, ReadErrorKind::UnexpectedToken(")".into()));
        let err = read_term("[a,b").unwrap_err();
        assert_eq!(err.kind, ReadErrorKind::UnexpectedEof);
    }

    #[test]
    fn integer_overflow() {
        let err = read_term("99999999999999999999").unwrap_err();
        assert_eq!(err.kind, ReadErrorKind::IntegerOverflow);
    }

    #[test]
    fn strings_rejected() {
        assert_eq!(
            read_term("X = \"abc\"").unwrap_err().kind,
            ReadErrorKind::StringsUnsupported
        );
    }

    #[test]
    fn program_clauses() {
        let clauses = parse_program("f(0). f(N) :- N > 0.").unwrap();
        assert_eq!(clauses.len(), 2);
        assert!(clauses.iter().all(|c| c.key() == (Sym::intern("f"), 1)));
        assert_eq!(clauses[0].body(), &Term::Atom(atoms::TRUE));
        assert_eq!(clauses[1].n_vars(), 1);
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("  % only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn program_variables_are_clause_scoped() {
        let clauses = parse_program("p(X) :- q(X). r(X, Y).").unwrap();
        assert_eq!(clauses[0].head().args()[0], Term::Var(VarId(0)));
        assert_eq!(clauses[1].head().args()[0], Term::Var(VarId(0)));
        assert_eq!(clauses[1].n_vars(), 2);
    }

    #[test]
    fn program_errors() {
        let err = parse_program(":- dynamic(foo).").unwrap_err();
        assert_eq!(err.kind, ReadErrorKind::DirectiveUnsupported);
        let err = parse_program("a. b :- .").unwrap_err();
        assert_eq!(err.clause, Some(1));
        let err = parse_program("a. b").unwrap_err();
        assert_eq!(err.clause, Some(1));
        assert_eq!(err.pos.to_string(), "1:5");
        let err = parse_program("3 :- a.").unwrap_err();
        assert_eq!(err.kind, ReadErrorKind::NotCallable);
    }

    // Hand-built expected trees for the counting-loop kernel.
    #[test]
    fn counting_loop_program() {
        let src = "count(0) :- !.\ncount(N) :- N1 is N - 1, count(N1).\n";
        let clauses = parse_program(src).unwrap();
        assert_eq!(clauses.len(), 2);
        assert_eq!(clauses[0].head(), &t("count", vec![Term::Int(0)]));
        assert_eq!(clauses[0].body(), &Term::atom("!"));
        let n = Term::Var(VarId(0));
        let n1 = Term::Var(VarId(1));
        assert_eq!(clauses[1].head(), &t("count", vec![n.clone()]));
        assert_eq!(
            clauses[1].body(),
            &t(
                ",",
                vec![
                    t("is", vec![n1.clone(), t("-", vec![n, Term::Int(1)])]),
                    t("count", vec![n1])
                ]
            )
        );
    }
}
