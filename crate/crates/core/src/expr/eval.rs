use super::ast::{BinaryOp, Expr, ScalarExpr, UnaryOp};
use super::jet::Jet2;
use super::ExprError;

/// Integer value of a constant exponent, if it has one.
fn integer_exponent(e: &Expr) -> Option<i32> {
    if !e.is_constant() {
        return None;
    }
    let v = eval_tree_value(e, &[]).ok()?;
    (v.fract() == 0.0 && v.abs() <= f64::from(i32::MAX)).then_some(v as i32)
}

fn domain(e: &Expr, names: &[String], point: &[f64], reason: &str) -> ExprError {
    ExprError::Domain {
        node: e.display(names).to_string(),
        point: point.to_vec(),
        reason: reason.to_string(),
    }
}

struct Ctx<'a> {
    names: &'a [String],
    point: &'a [f64],
}

impl Ctx<'_> {
    fn jet(&self, e: &Expr) -> Result<Jet2, ExprError> {
        let n = self.point.len();
        Ok(match e {
            Expr::Const(c) => Jet2::constant(n, *c),
            Expr::Var(i) => Jet2::variable(n, *i, self.point[*i]),
            Expr::Unary(op, a) => {
                let x = self.jet(a)?;
                let v = x.value();
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Log if v <= 0.0 => {
                        return Err(domain(e, self.names, self.point, "log of a nonpositive value"))
                    }
                    UnaryOp::Log => x.ln(),
                    UnaryOp::Sqrt if v <= 0.0 => {
                        return Err(domain(e, self.names, self.point, "sqrt of a nonpositive value"))
                    }
                    UnaryOp::Sqrt => x.sqrt(),
                    UnaryOp::Abs if v == 0.0 => {
                        return Err(domain(e, self.names, self.point, "abs is not differentiable at 0"))
                    }
                    UnaryOp::Abs => x.abs(),
                }
            }
            Expr::Binary(op, a, b) => {
                let x = self.jet(a)?;
                if *op == BinaryOp::Pow {
                    return self.pow(e, x, b);
                }
                let y = self.jet(b)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div if y.value() == 0.0 => {
                        return Err(domain(e, self.names, self.point, "division by zero"))
                    }
                    BinaryOp::Div => x / y,
                    BinaryOp::Pow => unreachable!(),
                }
            }
        })
    }

    fn pow(&self, node: &Expr, base: Jet2, exponent: &Expr) -> Result<Jet2, ExprError> {
        if let Some(k) = integer_exponent(exponent) {
            if k < 0 && base.value() == 0.0 {
                return Err(domain(node, self.names, self.point, "negative power of zero"));
            }
            return Ok(base.powi(k));
        }
        if base.value() <= 0.0 {
            return Err(domain(
                node,
                self.names,
                self.point,
                "non-integer power of a nonpositive base",
            ));
        }
        if exponent.is_constant() {
            let p = eval_tree_value(exponent, &[])?;
            return Ok(base.powf(p));
        }
        Ok(base.pow(&self.jet(exponent)?))
    }
}

fn eval_tree_value(e: &Expr, point: &[f64]) -> Result<f64, ExprError> {
    value_ctx(e, &[], point)
}

fn value_ctx(e: &Expr, names: &[String], point: &[f64]) -> Result<f64, ExprError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var(i) => point[*i],
        Expr::Unary(op, a) => {
            let v = value_ctx(a, names, point)?;
            match op {
                UnaryOp::Neg => -v,
                UnaryOp::Sin => v.sin(),
                UnaryOp::Cos => v.cos(),
                UnaryOp::Exp => v.exp(),
                UnaryOp::Log if v <= 0.0 => {
                    return Err(domain(e, names, point, "log of a nonpositive value"))
                }
                UnaryOp::Log => v.ln(),
                UnaryOp::Sqrt if v <= 0.0 => {
                    return Err(domain(e, names, point, "sqrt of a nonpositive value"))
                }
                UnaryOp::Sqrt => v.sqrt(),
                UnaryOp::Abs if v == 0.0 => {
                    return Err(domain(e, names, point, "abs is not differentiable at 0"))
                }
                UnaryOp::Abs => v.abs(),
            }
        }
        Expr::Binary(op, a, b) => {
            let x = value_ctx(a, names, point)?;
            if *op == BinaryOp::Pow {
                if let Some(k) = integer_exponent(b) {
                    if k < 0 && x == 0.0 {
                        return Err(domain(e, names, point, "negative power of zero"));
                    }
                    return Ok(x.powi(k));
                }
                if x <= 0.0 {
                    return Err(domain(e, names, point, "non-integer power of a nonpositive base"));
                }
                return Ok(x.powf(value_ctx(b, names, point)?));
            }
            let y = value_ctx(b, names, point)?;
            match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x * y,
                BinaryOp::Div if y == 0.0 => return Err(domain(e, names, point, "division by zero")),
                BinaryOp::Div => x / y,
                BinaryOp::Pow => unreachable!(),
            }
        }
    })
}

fn check_point(e: &ScalarExpr, p: &[f64]) -> Result<(), ExprError> {
    if p.len() != e.dim() {
        return Err(ExprError::PointDimension {
            expected: e.dim(),
            found: p.len(),
        });
    }
    Ok(())
}

/// Value, gradient and Hessian of `e` at `p`.
pub fn eval_jet2(e: &ScalarExpr, p: &[f64]) -> Result<Jet2, ExprError> {
    check_point(e, p)?;
    Ctx {
        names: e.coords(),
        point: p,
    }
    .jet(e.root())
}

/// Value of `e` at `p` without derivative propagation.
pub fn eval_value(e: &ScalarExpr, p: &[f64]) -> Result<f64, ExprError> {
    check_point(e, p)?;
    value_ctx(e.root(), e.coords(), p)
}
