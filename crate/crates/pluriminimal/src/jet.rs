//! Forward propagation of second-order complex jets.
//!
//! A [`Jet2`] carries the value, gradient, and (symmetric) Hessian of a
//! holomorphic function at a point. Because every expression is entire,
//! the Wirtinger derivative in the conjugate directions is identically
//! zero and never needs to be tracked.

use crate::expr::{ExprError, HoloExpr, Node};
use crate::C64;

/// Value, gradient, and upper-triangular Hessian of a holomorphic function
/// of `m` complex variables at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: C64,
    pub grad: Vec<C64>,
    /// Upper triangle of the symmetric Hessian, row-major: entry `(j,k)`
    /// with `j <= k` lives at [`tri_index`]`(m, j, k)`.
    pub hess: Vec<C64>,
}

/// Index of `(j,k)`, `j <= k`, in the packed upper triangle for arity `m`.
pub fn tri_index(m: usize, j: usize, k: usize) -> usize {
    debug_assert!(j <= k && k < m);
    j * m - j * (j + 1) / 2 + k
}

pub fn tri_len(m: usize) -> usize {
    m * (m + 1) / 2
}

impl Jet2 {
    pub fn constant(value: C64, m: usize) -> Self {
        Jet2 {
            value,
            grad: vec![C64::ZERO; m],
            hess: vec![C64::ZERO; tri_len(m)],
        }
    }

    pub fn variable(value: C64, index: usize, m: usize) -> Self {
        let mut jet = Jet2::constant(value, m);
        jet.grad[index] = C64::ONE;
        jet
    }

    pub fn arity(&self) -> usize {
        self.grad.len()
    }

    /// Hessian entry `(j,k)` in either order.
    pub fn hess_at(&self, j: usize, k: usize) -> C64 {
        let m = self.arity();
        if j <= k {
            self.hess[tri_index(m, j, k)]
        } else {
            self.hess[tri_index(m, k, j)]
        }
    }

    pub fn is_finite(&self) -> bool {
        let ok = |c: &C64| c.re.is_finite() && c.im.is_finite();
        ok(&self.value) && self.grad.iter().all(ok) && self.hess.iter().all(ok)
    }

    fn add(&self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a - b).collect(),
        }
    }

    fn neg(&self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|a| -a).collect(),
            hess: self.hess.iter().map(|a| -a).collect(),
        }
    }

    fn mul(&self, rhs: &Jet2) -> Jet2 {
        let m = self.arity();
        let value = self.value * rhs.value;
        let grad: Vec<C64> = (0..m)
            .map(|j| self.value * rhs.grad[j] + rhs.value * self.grad[j])
            .collect();
        let mut hess = vec![C64::ZERO; tri_len(m)];
        for j in 0..m {
            for k in j..m {
                let idx = tri_index(m, j, k);
                hess[idx] = self.value * rhs.hess[idx]
                    + rhs.value * self.hess[idx]
                    + self.grad[j] * rhs.grad[k]
                    + self.grad[k] * rhs.grad[j];
            }
        }
        Jet2 { value, grad, hess }
    }

    /// Chain rule through a scalar analytic function with derivatives
    /// `d1 = f'(u)` and `d2 = f''(u)`.
    fn chain(&self, value: C64, d1: C64, d2: C64) -> Jet2 {
        let m = self.arity();
        let grad: Vec<C64> = self.grad.iter().map(|g| d1 * g).collect();
        let mut hess = vec![C64::ZERO; tri_len(m)];
        for j in 0..m {
            for k in j..m {
                let idx = tri_index(m, j, k);
                hess[idx] = d1 * self.hess[idx] + d2 * self.grad[j] * self.grad[k];
            }
        }
        Jet2 { value, grad, hess }
    }

    fn powu(&self, n: u32) -> Jet2 {
        let m = self.arity();
        match n {
            0 => Jet2::constant(C64::ONE, m),
            1 => self.clone(),
            _ => {
                let u = self.value;
                let value = u.powu(n);
                let d1 = C64::from(n as f64) * u.powu(n - 1);
                let d2 = C64::from((n * (n - 1)) as f64) * u.powu(n - 2);
                self.chain(value, d1, d2)
            }
        }
    }
}

/// Evaluate an expression together with its exact gradient and Hessian.
pub fn eval_jet2(expr: &HoloExpr, z: &[C64]) -> Result<Jet2, ExprError> {
    if z.len() != expr.arity() {
        return Err(ExprError::ArityMismatch { expected: expr.arity(), got: z.len() });
    }
    let jet = eval_node(expr.root(), z, expr.arity());
    if jet.is_finite() {
        Ok(jet)
    } else {
        Err(ExprError::NumericDomain)
    }
}

fn eval_node(node: &Node, z: &[C64], m: usize) -> Jet2 {
    match node {
        Node::Const(c) => Jet2::constant(c.value(), m),
        Node::Var(k) => Jet2::variable(z[*k], *k, m),
        Node::Add(a, b) => eval_node(a, z, m).add(&eval_node(b, z, m)),
        Node::Sub(a, b) => eval_node(a, z, m).sub(&eval_node(b, z, m)),
        Node::Mul(a, b) => eval_node(a, z, m).mul(&eval_node(b, z, m)),
        Node::Pow(a, n) => eval_node(a, z, m).powu(*n),
        Node::Neg(a) => eval_node(a, z, m).neg(),
        Node::Exp(a) => {
            let u = eval_node(a, z, m);
            let e = u.value.exp();
            u.chain(e, e, e)
        }
        Node::Sin(a) => {
            let u = eval_node(a, z, m);
            let (s, c) = (u.value.sin(), u.value.cos());
            u.chain(s, c, -s)
        }
        Node::Cos(a) => {
            let u = eval_node(a, z, m);
            let (s, c) = (u.value.sin(), u.value.cos());
            u.chain(c, -s, -c)
        }
    }
}
