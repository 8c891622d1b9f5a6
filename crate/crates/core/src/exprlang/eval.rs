use super::parser::{Ast, BinOp, Func};
use super::EvalError;
use crate::jets::{Jet2, JetError};
use crate::scalar::Real;

fn wrap(position: usize) -> impl Fn(JetError) -> EvalError {
    move |source| EvalError { position, source }
}

/// Evaluates `ast` over order-2 jets at the parameter point `at`.
pub fn eval_jet<T: Real>(ast: &Ast, at: [T; 2]) -> Result<Jet2<T>, EvalError> {
    Ok(match ast {
        Ast::Constant(c) => Jet2::constant(T::lit(*c)),
        Ast::Variable(p) => Jet2::seed_variable(*p, at),
        Ast::Neg(c) => -eval_jet(c, at)?,
        Ast::Binary { op, lhs, rhs, pos } => {
            let a = eval_jet(lhs, at)?;
            match op {
                BinOp::Add => a + eval_jet(rhs, at)?,
                BinOp::Sub => a - eval_jet(rhs, at)?,
                BinOp::Mul => a * eval_jet(rhs, at)?,
                BinOp::Div => a.try_div(eval_jet(rhs, at)?).map_err(wrap(*pos))?,
                BinOp::Pow => {
                    let k = eval_jet::<T>(rhs, at)?.value;
                    a.pow_const(k).map_err(wrap(*pos))?
                }
            }
        }
        Ast::Call { func, arg, pos } => {
            let a = eval_jet(arg, at)?;
            let r = match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Sinh => a.sinh(),
                Func::Cosh => a.cosh(),
                Func::Tanh => a.tanh(),
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Sqrt => a.sqrt(),
            };
            r.map_err(wrap(*pos))?
        }
    })
}

/// Plain floating point evaluation, no derivatives.
pub fn eval_value(ast: &Ast, at: [f64; 2]) -> f64 {
    match ast {
        Ast::Constant(c) => *c,
        Ast::Variable(p) => at[p.index()],
        Ast::Neg(c) => -eval_value(c, at),
        Ast::Binary { op, lhs, rhs, .. } => {
            let (a, b) = (eval_value(lhs, at), eval_value(rhs, at));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => {
                    if b.fract() == 0.0 && b.abs() < i32::MAX as f64 {
                        a.powi(b as i32)
                    } else {
                        a.powf(b)
                    }
                }
            }
        }
        Ast::Call { func, arg, .. } => {
            let a = eval_value(arg, at);
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Sinh => a.sinh(),
                Func::Cosh => a.cosh(),
                Func::Tanh => a.tanh(),
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Sqrt => a.sqrt(),
            }
        }
    }
}

/// Evaluates an expression that must not depend on `u` or `v`.
pub fn eval_constant(ast: &Ast) -> Option<f64> {
    ast.is_constant().then(|| eval_value(ast, [0.0, 0.0]))
}
