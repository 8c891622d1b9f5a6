use std::fmt;

use super::lexer::{Token, TokenKind};
use super::ParseError;
use crate::jets::Param;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// The fixed function table. Every entry is unary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        1
    }
}

/// Expression tree over the parameters `u` and `v`.
///
/// `pos` fields hold the byte offset of the operator or function name and are
/// used only for error reporting; [`Ast::same_structure`] ignores them.
#[derive(Debug, Clone)]
pub enum Ast {
    Constant(f64),
    Variable(Param),
    Neg(Box<Ast>),
    Binary {
        op: BinOp,
        lhs: Box<Ast>,
        rhs: Box<Ast>,
        pos: usize,
    },
    Call {
        func: Func,
        arg: Box<Ast>,
        pos: usize,
    },
}

impl Ast {
    /// Structural equality, ignoring source positions.
    pub fn same_structure(&self, other: &Ast) -> bool {
        match (self, other) {
            (Ast::Constant(a), Ast::Constant(b)) => a.to_bits() == b.to_bits(),
            (Ast::Variable(a), Ast::Variable(b)) => a == b,
            (Ast::Neg(a), Ast::Neg(b)) => a.same_structure(b),
            (
                Ast::Binary { op, lhs, rhs, .. },
                Ast::Binary {
                    op: op2,
                    lhs: l2,
                    rhs: r2,
                    ..
                },
            ) => op == op2 && lhs.same_structure(l2) && rhs.same_structure(r2),
            (Ast::Call { func, arg, .. }, Ast::Call { func: f2, arg: a2, .. }) => {
                func == f2 && arg.same_structure(a2)
            }
            _ => false,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Ast::Constant(_) => true,
            Ast::Variable(_) => false,
            Ast::Neg(c) => c.is_constant(),
            Ast::Binary { lhs, rhs, .. } => lhs.is_constant() && rhs.is_constant(),
            Ast::Call { arg, .. } => arg.is_constant(),
        }
    }
}

/// Fully parenthesised rendering; reparses to a structurally identical tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Constant(c) => write!(f, "{c}"),
            Ast::Variable(Param::U) => f.write_str("u"),
            Ast::Variable(Param::V) => f.write_str("v"),
            Ast::Neg(c) => write!(f, "(-{c})"),
            Ast::Binary { op, lhs, rhs, .. } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Ast::Call { func, arg, .. } => write!(f, "{}({arg})", func.name()),
        }
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

/// Parses a token stream produced by [`super::tokenize`].
///
/// Precedence from loosest to tightest: `+ -`, `* /`, unary `-`, `^`
/// (right-associative, constant exponent), calls and parentheses.
pub fn parse(tokens: &[Token]) -> Result<Ast, ParseError> {
    let end = tokens
        .last()
        .map(|t| t.position + t.text.len())
        .unwrap_or(0);
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
    };
    let ast = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::new(
            t.position,
            format!("expected operator or end of input, found '{}'", t.text),
        ));
    }
    Ok(ast)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.position).unwrap_or(self.end)
    }

    fn eat(&mut self, kind: &TokenKind) -> Option<&Token> {
        match self.tokens.get(self.pos) {
            Some(t) if &t.kind == kind => {
                self.pos += 1;
                Some(t)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let (op, pos) = match self.peek() {
                Some(t) if t.kind == TokenKind::Plus => (BinOp::Add, t.position),
                Some(t) if t.kind == TokenKind::Minus => (BinOp::Sub, t.position),
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Ast::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let (op, pos) = match self.peek() {
                Some(t) if t.kind == TokenKind::Star => (BinOp::Mul, t.position),
                Some(t) if t.kind == TokenKind::Slash => (BinOp::Div, t.position),
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Ast::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.eat(&TokenKind::Minus).is_some() {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        let Some(pos) = self.eat(&TokenKind::Caret).map(|t| t.position) else {
            return Ok(base);
        };
        let exp_pos = self.here();
        let exponent = self.exponent()?;
        if !exponent.is_constant() {
            return Err(ParseError::new(exp_pos, "exponent of '^' must be constant"));
        }
        Ok(Ast::Binary {
            op: BinOp::Pow,
            lhs: Box::new(base),
            rhs: Box::new(exponent),
            pos,
        })
    }

    fn exponent(&mut self) -> Result<Ast, ParseError> {
        if self.eat(&TokenKind::Minus).is_some() {
            return Ok(Ast::Neg(Box::new(self.exponent()?)));
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(ParseError::new(self.end, "expected expression, found end of input"));
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Number(x) => Ok(Ast::Constant(x)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                if self.eat(&TokenKind::RParen).is_none() {
                    return Err(ParseError::new(self.here(), "expected ')'"));
                }
                Ok(inner)
            }
            TokenKind::Identifier => self.identifier(&tok),
            _ => Err(ParseError::new(
                tok.position,
                format!("expected expression, found '{}'", tok.text),
            )),
        }
    }

    fn identifier(&mut self, tok: &Token) -> Result<Ast, ParseError> {
        match tok.text.as_str() {
            "u" => return Ok(Ast::Variable(Param::U)),
            "v" => return Ok(Ast::Variable(Param::V)),
            "pi" => return Ok(Ast::Constant(std::f64::consts::PI)),
            "e" => return Ok(Ast::Constant(std::f64::consts::E)),
            _ => {}
        }
        let Some(func) = Func::lookup(&tok.text) else {
            return Err(ParseError::new(
                tok.position,
                format!("unknown identifier '{}'", tok.text),
            ));
        };
        if self.eat(&TokenKind::LParen).is_none() {
            return Err(ParseError::new(
                self.here(),
                format!("expected '(' after function '{}'", tok.text),
            ));
        }
        let mut args = vec![self.expr()?];
        while self.eat(&TokenKind::Comma).is_some() {
            args.push(self.expr()?);
        }
        if self.eat(&TokenKind::RParen).is_none() {
            return Err(ParseError::new(self.here(), "expected ')'"));
        }
        if args.len() != func.arity() {
            return Err(ParseError::new(
                tok.position,
                format!(
                    "function '{}' takes {} argument(s), got {}",
                    func.name(),
                    func.arity(),
                    args.len()
                ),
            ));
        }
        Ok(Ast::Call {
            func,
            arg: Box::new(args.pop().expect("one argument")),
            pos: tok.position,
        })
    }
}
