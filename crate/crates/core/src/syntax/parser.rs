use std::collections::{BTreeMap, BTreeSet};

use ordered_float::OrderedFloat;

use super::ast::*;
use super::lexer::{tokenize, Position, Spanned, Token};
use super::SyntaxError;

struct Parser {
    tokens: Vec<Spanned>,
    idx: usize,
    eof: Position,
}

fn end_position(source: &str) -> Position {
    let mut pos = Position { line: 1, column: 1 };
    for c in source.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

/// Where each statement came from, for validation messages.
#[derive(Default)]
struct Origins {
    facts: Vec<Position>,
    distributions: Vec<Position>,
    rules: Vec<Position>,
    annotated: Vec<Position>,
}

impl Parser {
    fn new(source: &str) -> Result<Self, SyntaxError> {
        Ok(Parser { tokens: tokenize(source)?, idx: 0, eof: end_position(source) })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx).map(|s| &s.token)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.idx + offset).map(|s| &s.token)
    }

    fn pos(&self) -> Position {
        self.tokens.get(self.idx).map_or(self.eof, |s| s.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.idx).map(|s| s.token.clone());
        self.idx += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.idx >= self.tokens.len()
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => SyntaxError::parse(self.pos(), format!("expected {expected}, found `{t}`")),
            None => SyntaxError::parse(self.pos(), format!("expected {expected}, found end of input")),
        }
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&want) {
            self.idx += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn parse_term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.idx += 1;
                Ok(Term::number(n))
            }
            Some(Token::Var(v)) => {
                self.idx += 1;
                Ok(Term::Variable(v))
            }
            Some(Token::Atom(name)) => {
                self.idx += 1;
                if self.peek() == Some(&Token::LParen) {
                    let args = self.parse_args()?;
                    Ok(Term::compound(name, args))
                } else {
                    Ok(Term::symbol(name))
                }
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// `( term {, term} )`
    fn parse_args(&mut self) -> Result<Vec<Term>, SyntaxError> {
        self.expect(Token::LParen, "`(`")?;
        let mut args = vec![self.parse_term()?];
        while self.peek() == Some(&Token::Comma) {
            self.idx += 1;
            args.push(self.parse_term()?);
        }
        self.expect(Token::RParen, "`,` or `)`")?;
        Ok(args)
    }

    fn parse_atom(&mut self) -> Result<Atom, SyntaxError> {
        match self.peek().cloned() {
            Some(Token::Atom(name)) => {
                self.idx += 1;
                let args = if self.peek() == Some(&Token::LParen) { self.parse_args()? } else { Vec::new() };
                Ok(Atom::new(name, args))
            }
            _ => Err(self.unexpected("an atom")),
        }
    }

    fn parse_literal(&mut self) -> Result<Literal, SyntaxError> {
        if self.peek() == Some(&Token::Not) {
            self.idx += 1;
            Ok(Literal::neg(self.parse_atom()?))
        } else {
            Ok(Literal::pos(self.parse_atom()?))
        }
    }

    fn parse_body(&mut self) -> Result<Vec<Literal>, SyntaxError> {
        let mut body = vec![self.parse_literal()?];
        while self.peek() == Some(&Token::Comma) {
            self.idx += 1;
            body.push(self.parse_literal()?);
        }
        Ok(body)
    }

    fn probability(&self, p: f64, pos: Position) -> Result<OrderedFloat<f64>, SyntaxError> {
        if (0.0..=1.0).contains(&p) {
            Ok(OrderedFloat(p))
        } else {
            Err(SyntaxError::validation(pos, format!("probability {p} outside [0,1]")))
        }
    }

    /// Parses a label when the upcoming tokens form one followed by `::`.
    fn try_parse_label(&mut self) -> Result<Option<FactLabel>, SyntaxError> {
        let pos = self.pos();
        let label = match self.peek().cloned() {
            Some(Token::Num(p)) => {
                self.idx += 1;
                FactLabel::Probabilistic(self.probability(p, pos)?)
            }
            Some(Token::Opaque(text)) => {
                self.idx += 1;
                FactLabel::Algebraic(text)
            }
            Some(Token::LBracket) => {
                self.idx += 1;
                FactLabel::Indicator(self.parse_constraint()?)
            }
            Some(Token::Atom(ref name))
                if name == "t"
                    && self.peek_at(1) == Some(&Token::LParen)
                    && matches!(self.peek_at(2), Some(Token::Num(_)))
                    && self.peek_at(3) == Some(&Token::RParen)
                    && self.peek_at(4) == Some(&Token::DColon) =>
            {
                let Some(Token::Num(p)) = self.peek_at(2).cloned() else { unreachable!() };
                self.idx += 4;
                FactLabel::Learnable(self.probability(p, pos)?)
            }
            Some(Token::Atom(ref name))
                if name == "nn"
                    && self.peek_at(1) == Some(&Token::LParen)
                    && matches!(self.peek_at(2), Some(Token::Atom(_)))
                    && self.peek_at(3) == Some(&Token::Comma)
                    && self.peek_at(4) == Some(&Token::LBracket) =>
            {
                let Some(Token::Atom(model)) = self.peek_at(2).cloned() else { unreachable!() };
                self.idx += 5;
                let mut inputs = Vec::new();
                if self.peek() != Some(&Token::RBracket) {
                    inputs.push(self.parse_term()?);
                    while self.peek() == Some(&Token::Comma) {
                        self.idx += 1;
                        inputs.push(self.parse_term()?);
                    }
                }
                self.expect(Token::RBracket, "`,` or `]`")?;
                self.expect(Token::RParen, "`)`")?;
                if let Some(t) = inputs.iter().find(|t| !t.is_ground()) {
                    return Err(SyntaxError::validation(
                        pos,
                        format!("neural fact input {} must be ground", super::term_to_string(t)),
                    ));
                }
                FactLabel::Neural { model, inputs }
            }
            _ => return Ok(None),
        };
        self.expect(Token::DColon, "`::`")?;
        Ok(Some(label))
    }

    fn parse_constraint(&mut self) -> Result<ConstraintExpr, SyntaxError> {
        let pos = self.pos();
        let var = self.parse_term()?;
        if !var.is_ground() {
            return Err(SyntaxError::validation(pos, "indicator variable must be ground"));
        }
        let relation = match self.bump() {
            Some(Token::Eq) => Relation::Eq,
            Some(Token::Lt) => Relation::Lt,
            Some(Token::Gt) => Relation::Gt,
            Some(Token::Le) => Relation::Le,
            Some(Token::Ge) => Relation::Ge,
            _ => {
                self.idx -= 1;
                return Err(self.unexpected("a comparison (=, <, >, =<, >=)"));
            }
        };
        let bound = match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.idx += 1;
                n
            }
            Some(Token::Atom(_) | Token::Var(_)) => {
                return Err(SyntaxError::unsupported(
                    self.pos(),
                    "constraints relating several random variables are not supported",
                ))
            }
            _ => return Err(self.unexpected("a numeric bound")),
        };
        self.expect(Token::RBracket, "`]`")?;
        Ok(ConstraintExpr::new(var, relation, bound))
    }

    fn parse_distribution(&mut self) -> Result<DistributionExpr, SyntaxError> {
        let pos = self.pos();
        let term = self.parse_term()?;
        let (name, args) = match &term {
            Term::Compound { functor, args } => (functor.as_str(), args.as_slice()),
            Term::Constant(Constant::Symbol(s)) => (s.as_str(), &[][..]),
            _ => return Err(SyntaxError::validation(pos, "expected a distribution term")),
        };
        let mut nums = Vec::with_capacity(args.len());
        for a in args {
            match a.as_number() {
                Some(n) => nums.push(n),
                None => return Err(SyntaxError::unsupported(pos, "distribution parameters must be numeric constants")),
            }
        }
        let dist = match (name, nums.as_slice()) {
            ("flip", [p]) => DistributionExpr::flip(*p),
            ("beta", [a, b]) => DistributionExpr::beta(*a, *b),
            ("normal", [m, s]) => DistributionExpr::normal(*m, *s),
            ("uniform", [lo, hi]) => DistributionExpr::uniform(*lo, *hi),
            _ => return Err(SyntaxError::validation(pos, format!("unknown distribution {name}/{}", nums.len()))),
        };
        dist.validate().map_err(|m| SyntaxError::validation(pos, m))?;
        Ok(dist)
    }

    fn parse_statement(&mut self, program: &mut Program, origins: &mut Origins) -> Result<(), SyntaxError> {
        let pos = self.pos();
        if let Some(label) = self.try_parse_label()? {
            let head = self.parse_atom()?;
            if self.peek() == Some(&Token::Neck) {
                self.idx += 1;
                let body = self.parse_body()?;
                if matches!(label, FactLabel::Neural { .. } | FactLabel::Indicator(_)) {
                    return Err(SyntaxError::validation(pos, "neural and indicator labels cannot annotate rules"));
                }
                self.expect(Token::Dot, "`,` or `.`")?;
                program.annotated_rules.push(AnnotatedRule { label, clause: Clause::new(head, body) });
                origins.annotated.push(pos);
            } else {
                self.expect(Token::Dot, "`.` or `:-`")?;
                if let FactLabel::Indicator(_) = label {
                    if !head.is_ground() {
                        return Err(SyntaxError::validation(pos, "indicator facts must be ground"));
                    }
                }
                program.facts.push(FactDecl::new(label, head));
                origins.facts.push(pos);
            }
            return Ok(());
        }

        // `term ~ dist` or a plain atom
        let save = self.idx;
        if matches!(self.peek(), Some(Token::Atom(_) | Token::Num(_) | Token::Var(_))) {
            let term = self.parse_term()?;
            if self.peek() == Some(&Token::Tilde) {
                self.idx += 1;
                if !term.is_ground() {
                    return Err(SyntaxError::validation(pos, "random variable must be ground"));
                }
                let dist = self.parse_distribution()?;
                self.expect(Token::Dot, "`.`")?;
                program.distributions.push(DistributionalFact { var: term, dist });
                origins.distributions.push(pos);
                return Ok(());
            }
            self.idx = save;
        }

        let head = self.parse_atom()?;
        match self.peek() {
            Some(Token::Neck) => {
                self.idx += 1;
                let body = self.parse_body()?;
                self.expect(Token::Dot, "`,` or `.`")?;
                program.rules.push(Clause::new(head, body));
                origins.rules.push(pos);
            }
            Some(Token::Dot) => {
                self.idx += 1;
                program.facts.push(FactDecl::logical(head));
                origins.facts.push(pos);
            }
            _ => return Err(self.unexpected("`.` or `:-`")),
        }
        Ok(())
    }
}

/// Parses a whole program and validates its cross-statement invariants.
pub fn parse_program(source: &str) -> Result<Program, SyntaxError> {
    let mut parser = Parser::new(source)?;
    let mut program = Program::default();
    let mut origins = Origins::default();
    while !parser.at_end() {
        parser.parse_statement(&mut program, &mut origins)?;
    }
    validate(&program, &origins)?;
    Ok(program)
}

fn validate(program: &Program, origins: &Origins) -> Result<(), SyntaxError> {
    let mut rule_heads: BTreeMap<PredicateKey, Position> = BTreeMap::new();
    for (r, pos) in program.rules.iter().zip(&origins.rules) {
        rule_heads.entry(r.head.key()).or_insert(*pos);
    }
    for (r, pos) in program.annotated_rules.iter().zip(&origins.annotated) {
        rule_heads.entry(r.clause.head.key()).or_insert(*pos);
    }

    let mut labeled: BTreeSet<&Atom> = BTreeSet::new();
    for (f, pos) in program.facts.iter().zip(&origins.facts) {
        if !f.is_labeled() {
            continue;
        }
        if rule_heads.contains_key(&f.atom.key()) {
            return Err(SyntaxError::validation(
                *pos,
                format!("predicate {} is both a labeled fact and a rule head", f.atom.key()),
            ));
        }
        if !labeled.insert(&f.atom) {
            return Err(SyntaxError::validation(
                *pos,
                format!("duplicate labeled fact {}", super::atom_to_string(&f.atom)),
            ));
        }
    }
    for (f, pos) in program.facts.iter().zip(&origins.facts) {
        if !f.is_labeled() && labeled.contains(&f.atom) {
            return Err(SyntaxError::validation(
                *pos,
                format!("{} is declared both as a logical and as a labeled fact", super::atom_to_string(&f.atom)),
            ));
        }
    }

    let mut declared: BTreeSet<&Term> = BTreeSet::new();
    for (d, pos) in program.distributions.iter().zip(&origins.distributions) {
        if !declared.insert(&d.var) {
            return Err(SyntaxError::validation(
                *pos,
                format!("random variable {} declared more than once", super::term_to_string(&d.var)),
            ));
        }
    }
    for (f, pos) in program.facts.iter().zip(&origins.facts) {
        if let FactLabel::Indicator(c) = &f.label {
            if !declared.contains(&c.var) {
                return Err(SyntaxError::validation(
                    *pos,
                    format!("indicator refers to undeclared random variable {}", super::term_to_string(&c.var)),
                ));
            }
        }
    }
    Ok(())
}

/// Parses a single (possibly non-ground) atom; a trailing `.` is allowed.
pub fn parse_query(text: &str) -> Result<Atom, SyntaxError> {
    let mut parser = Parser::new(text)?;
    let atom = parser.parse_atom()?;
    if parser.peek() == Some(&Token::Dot) {
        parser.idx += 1;
    }
    if !parser.at_end() {
        return Err(parser.unexpected("end of query"));
    }
    Ok(atom)
}
