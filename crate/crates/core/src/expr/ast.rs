use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl UnaryOp {
    pub fn function_name(self) -> Option<&'static str> {
        Some(match self {
            UnaryOp::Neg => return None,
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        })
    }

    pub fn from_function_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "log" | "ln" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Expression tree over coordinate indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn unary(op: UnaryOp, a: Expr) -> Self {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// True when no coordinate occurs in the subtree.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(_) => false,
            Expr::Unary(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Unary(_, a) => a.max_var(),
            Expr::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Fully parenthesized rendering; re-parses to the same tree.
    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names;
        fn sub<'b>(e: &'b Expr, names: &'b [String]) -> ExprDisplay<'b> {
            e.display(names)
        }
        match self.expr {
            Expr::Const(c) => {
                if c.is_finite() && *c >= 0.0 {
                    write!(f, "{c:?}")
                } else {
                    // never produced by the parser; keep the output re-parsable
                    write!(f, "(-{:?})", -c)
                }
            }
            Expr::Var(i) => match self.names.get(*i) {
                Some(n) => f.write_str(n),
                None => write!(f, "x{i}"),
            },
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{})", sub(a, names)),
            Expr::Unary(op, a) => write!(f, "{}({})", op.function_name().unwrap(), sub(a, names)),
            Expr::Binary(op, a, b) => write!(f, "({} {} {})", sub(a, names), op.symbol(), sub(b, names)),
        }
    }
}

/// A parsed scalar expression bound to the coordinate names of its chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpr {
    root: Expr,
    coords: Arc<[String]>,
}

impl ScalarExpr {
    /// Wraps a tree, checking that every variable index is inside the chart.
    pub fn new(root: Expr, coords: Arc<[String]>) -> Option<Self> {
        match root.max_var() {
            Some(i) if i >= coords.len() => None,
            _ => Some(Self { root, coords }),
        }
    }

    pub fn constant(value: f64, coords: Arc<[String]>) -> Self {
        Self {
            root: Expr::Const(value),
            coords,
        }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// True for the literal constant zero (used to skip structurally zero slots).
    pub fn is_zero(&self) -> bool {
        matches!(self.root, Expr::Const(c) if c == 0.0)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.display(&self.coords).fmt(f)
    }
}
