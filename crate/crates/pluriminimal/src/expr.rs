//! Expression trees for entire functions of several complex variables.
//!
//! The grammar (variables are 1-indexed, all functions entire):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := 'z' uint | number | '(' expr ')' | func '(' expr ')' | '-' base
//! func   := exp | sin | cos
//! number := decimal | decimal 'i' | '(' decimal ('+'|'-') decimal 'i' ')'
//! ```
//!
//! Division and logarithms are excluded, so every expression is entire and
//! holomorphic on all of C^m. Constants carry exact rational real/imaginary
//! parts; a cached `Complex64` value backs the floating evaluation paths.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::C64;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable index {index} out of range for arity {arity} (at position {pos})")]
    VarOutOfRange { index: usize, arity: usize, pos: usize },
    #[error("negative exponent at position {pos}")]
    NegativeExponent { pos: usize },
    #[error("non-finite value encountered during evaluation")]
    NumericDomain,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Exact complex constant: rational real/imaginary parts plus a cached double.
#[derive(Debug, Clone)]
pub struct Constant {
    pub re: BigRational,
    pub im: BigRational,
    cached: C64,
}

impl Constant {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        let cached = C64::new(rational_to_f64(&re), rational_to_f64(&im));
        Constant { re, im, cached }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Constant::new(
            BigRational::from_float(re).expect("finite"),
            BigRational::from_float(im).expect("finite"),
        )
    }

    pub fn integer(k: i64) -> Self {
        Constant::new(BigRational::from_integer(k.into()), BigRational::zero())
    }

    pub fn value(&self) -> C64 {
        self.cached
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
}

impl PartialEq for Constant {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Constant),
    /// 0-based variable index.
    Var(usize),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, u32),
    Neg(Arc<Node>),
    Exp(Arc<Node>),
    Sin(Arc<Node>),
    Cos(Arc<Node>),
}

/// An entire function of `arity` complex variables, as an immutable tree.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloExpr {
    root: Arc<Node>,
    arity: usize,
}

impl HoloExpr {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn zero(arity: usize) -> Self {
        HoloExpr { root: Arc::new(Node::Const(Constant::integer(0))), arity }
    }

    pub fn one(arity: usize) -> Self {
        HoloExpr { root: Arc::new(Node::Const(Constant::integer(1))), arity }
    }

    pub fn constant(c: Constant, arity: usize) -> Self {
        HoloExpr { root: Arc::new(Node::Const(c)), arity }
    }

    pub fn constant_f64(re: f64, im: f64, arity: usize) -> Self {
        Self::constant(Constant::from_f64(re, im), arity)
    }

    pub fn integer(k: i64, arity: usize) -> Self {
        Self::constant(Constant::integer(k), arity)
    }

    /// Imaginary unit as a constant expression.
    pub fn i(arity: usize) -> Self {
        Self::constant(Constant::new(BigRational::zero(), BigRational::one()), arity)
    }

    /// Variable `z_{index+1}` (0-based index).
    pub fn var(index: usize, arity: usize) -> Result<Self, ExprError> {
        if index >= arity {
            return Err(ExprError::VarOutOfRange { index: index + 1, arity, pos: 0 });
        }
        Ok(HoloExpr { root: Arc::new(Node::Var(index)), arity })
    }

    fn wrap(&self, node: Node) -> Self {
        HoloExpr { root: Arc::new(node), arity: self.arity }
    }

    fn as_const(&self) -> Option<&Constant> {
        match self.root.as_ref() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_zero_expr(&self) -> bool {
        self.as_const().map(Constant::is_zero).unwrap_or(false)
    }

    fn is_one_expr(&self) -> bool {
        self.as_const().map(Constant::is_one).unwrap_or(false)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.arity, rhs.arity);
        if self.is_zero_expr() {
            return rhs.clone();
        }
        if rhs.is_zero_expr() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return self.wrap(Node::Const(Constant::new(&a.re + &b.re, &a.im + &b.im)));
        }
        self.wrap(Node::Add(self.root.clone(), rhs.root.clone()))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.arity, rhs.arity);
        if rhs.is_zero_expr() {
            return self.clone();
        }
        if self.is_zero_expr() {
            return rhs.neg();
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            return self.wrap(Node::Const(Constant::new(&a.re - &b.re, &a.im - &b.im)));
        }
        self.wrap(Node::Sub(self.root.clone(), rhs.root.clone()))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.arity, rhs.arity);
        if self.is_zero_expr() || rhs.is_zero_expr() {
            return Self::zero(self.arity);
        }
        if self.is_one_expr() {
            return rhs.clone();
        }
        if rhs.is_one_expr() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            let re = &a.re * &b.re - &a.im * &b.im;
            let im = &a.re * &b.im + &a.im * &b.re;
            return self.wrap(Node::Const(Constant::new(re, im)));
        }
        // Pull nested constants together so scalar prefactors fold.
        if self.as_const().is_some() {
            match rhs.root.as_ref() {
                Node::Mul(x, y) => {
                    let ex = HoloExpr { root: x.clone(), arity: self.arity };
                    if ex.as_const().is_some() {
                        let ey = HoloExpr { root: y.clone(), arity: self.arity };
                        return self.mul(&ex).mul(&ey);
                    }
                }
                Node::Neg(x) => {
                    let ex = HoloExpr { root: x.clone(), arity: self.arity };
                    return self.neg().mul(&ex);
                }
                _ => {}
            }
        } else if rhs.as_const().is_some() {
            return rhs.mul(self);
        }
        self.wrap(Node::Mul(self.root.clone(), rhs.root.clone()))
    }

    pub fn neg(&self) -> Self {
        if let Some(c) = self.as_const() {
            return self.wrap(Node::Const(Constant::new(-&c.re, -&c.im)));
        }
        if let Node::Neg(inner) = self.root.as_ref() {
            return HoloExpr { root: inner.clone(), arity: self.arity };
        }
        if let Node::Mul(x, y) = self.root.as_ref() {
            let ex = HoloExpr { root: x.clone(), arity: self.arity };
            if ex.as_const().is_some() {
                let ey = HoloExpr { root: y.clone(), arity: self.arity };
                return ex.neg().mul(&ey);
            }
        }
        self.wrap(Node::Neg(self.root.clone()))
    }

    pub fn pow(&self, n: u32) -> Self {
        match n {
            0 => Self::one(self.arity),
            1 => self.clone(),
            _ => {
                if let Some(c) = self.as_const() {
                    let mut acc = Constant::integer(1);
                    for _ in 0..n {
                        let re = &acc.re * &c.re - &acc.im * &c.im;
                        let im = &acc.re * &c.im + &acc.im * &c.re;
                        acc = Constant::new(re, im);
                    }
                    return self.wrap(Node::Const(acc));
                }
                self.wrap(Node::Pow(self.root.clone(), n))
            }
        }
    }

    pub fn exp(&self) -> Self {
        self.wrap(Node::Exp(self.root.clone()))
    }

    pub fn sin(&self) -> Self {
        self.wrap(Node::Sin(self.root.clone()))
    }

    pub fn cos(&self) -> Self {
        self.wrap(Node::Cos(self.root.clone()))
    }

    /// Scale by an exact rational (used for the 1/2 factors of the family solutions).
    pub fn scale_rational(&self, num: i64, den: i64) -> Self {
        let c = Constant::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        );
        Self::constant(c, self.arity).mul(self)
    }

    /// Replace every variable `k` by variable `map[k]` in an expression of
    /// the given new arity. Used to view a one-variable function as a
    /// function of `z_j` inside a larger chart.
    pub fn remap_vars(&self, map: &[usize], new_arity: usize) -> Result<Self, ExprError> {
        assert_eq!(map.len(), self.arity);
        for &t in map {
            if t >= new_arity {
                return Err(ExprError::VarOutOfRange { index: t + 1, arity: new_arity, pos: 0 });
            }
        }
        fn go(node: &Node, map: &[usize]) -> Node {
            match node {
                Node::Const(c) => Node::Const(c.clone()),
                Node::Var(k) => Node::Var(map[*k]),
                Node::Add(a, b) => Node::Add(Arc::new(go(a, map)), Arc::new(go(b, map))),
                Node::Sub(a, b) => Node::Sub(Arc::new(go(a, map)), Arc::new(go(b, map))),
                Node::Mul(a, b) => Node::Mul(Arc::new(go(a, map)), Arc::new(go(b, map))),
                Node::Pow(a, n) => Node::Pow(Arc::new(go(a, map)), *n),
                Node::Neg(a) => Node::Neg(Arc::new(go(a, map))),
                Node::Exp(a) => Node::Exp(Arc::new(go(a, map))),
                Node::Sin(a) => Node::Sin(Arc::new(go(a, map))),
                Node::Cos(a) => Node::Cos(Arc::new(go(a, map))),
            }
        }
        Ok(HoloExpr { root: Arc::new(go(&self.root, map)), arity: new_arity })
    }

    /// Symbolic partial derivative with respect to variable `j` (0-based).
    pub fn differentiate(&self, j: usize) -> Result<Self, ExprError> {
        if j >= self.arity {
            return Err(ExprError::VarOutOfRange { index: j + 1, arity: self.arity, pos: 0 });
        }
        Ok(self.diff_inner(&self.root, j))
    }

    fn diff_inner(&self, node: &Node, j: usize) -> Self {
        let m = self.arity;
        match node {
            Node::Const(_) => Self::zero(m),
            Node::Var(k) => {
                if *k == j {
                    Self::one(m)
                } else {
                    Self::zero(m)
                }
            }
            Node::Add(a, b) => self.diff_inner(a, j).add(&self.diff_inner(b, j)),
            Node::Sub(a, b) => self.diff_inner(a, j).sub(&self.diff_inner(b, j)),
            Node::Mul(a, b) => {
                let ea = HoloExpr { root: a.clone(), arity: m };
                let eb = HoloExpr { root: b.clone(), arity: m };
                self.diff_inner(a, j).mul(&eb).add(&ea.mul(&self.diff_inner(b, j)))
            }
            Node::Pow(a, n) => {
                let ea = HoloExpr { root: a.clone(), arity: m };
                Self::integer(*n as i64, m)
                    .mul(&ea.pow(n - 1))
                    .mul(&self.diff_inner(a, j))
            }
            Node::Neg(a) => self.diff_inner(a, j).neg(),
            Node::Exp(a) => {
                let ea = HoloExpr { root: a.clone(), arity: m };
                ea.exp().mul(&self.diff_inner(a, j))
            }
            Node::Sin(a) => {
                let ea = HoloExpr { root: a.clone(), arity: m };
                ea.cos().mul(&self.diff_inner(a, j))
            }
            Node::Cos(a) => {
                let ea = HoloExpr { root: a.clone(), arity: m };
                ea.sin().neg().mul(&self.diff_inner(a, j))
            }
        }
    }

    /// Plain value evaluation (no derivatives).
    pub fn eval(&self, z: &[C64]) -> Result<C64, ExprError> {
        if z.len() != self.arity {
            return Err(ExprError::ArityMismatch { expected: self.arity, got: z.len() });
        }
        let v = eval_node(&self.root, z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NumericDomain)
        }
    }

    pub fn parse(text: &str, arity: usize) -> Result<Self, ExprError> {
        Parser::new(text, arity).parse()
    }
}

/// Exact multivariate polynomial coefficients: exponent vector (length =
/// arity) mapped to rational (re, im) parts. Deterministically ordered.
pub type PolyCoeffs = std::collections::BTreeMap<Vec<u32>, (BigRational, BigRational)>;

impl HoloExpr {
    /// Expand to exact polynomial coefficients; `None` when the expression
    /// involves exp/sin/cos.
    pub fn to_polynomial(&self) -> Option<PolyCoeffs> {
        fn prune(mut p: PolyCoeffs) -> PolyCoeffs {
            p.retain(|_, (re, im)| !re.is_zero() || !im.is_zero());
            p
        }
        fn mul_polys(a: &PolyCoeffs, b: &PolyCoeffs, m: usize) -> PolyCoeffs {
            let mut out = PolyCoeffs::new();
            for (ea, (ra, ia)) in a {
                for (eb, (rb, ib)) in b {
                    let exps: Vec<u32> = (0..m).map(|k| ea[k] + eb[k]).collect();
                    let re = ra * rb - ia * ib;
                    let im = ra * ib + ia * rb;
                    let entry = out
                        .entry(exps)
                        .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
                    entry.0 += re;
                    entry.1 += im;
                }
            }
            prune(out)
        }
        fn go(node: &Node, m: usize) -> Option<PolyCoeffs> {
            match node {
                Node::Const(c) => {
                    let mut out = PolyCoeffs::new();
                    if !c.is_zero() {
                        out.insert(vec![0; m], (c.re.clone(), c.im.clone()));
                    }
                    Some(out)
                }
                Node::Var(k) => {
                    let mut exps = vec![0u32; m];
                    exps[*k] = 1;
                    let mut out = PolyCoeffs::new();
                    out.insert(exps, (BigRational::one(), BigRational::zero()));
                    Some(out)
                }
                Node::Add(a, b) | Node::Sub(a, b) => {
                    let mut out = go(a, m)?;
                    let sign = if matches!(node, Node::Sub(..)) { -1 } else { 1 };
                    for (e, (re, im)) in go(b, m)? {
                        let entry = out
                            .entry(e)
                            .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
                        if sign > 0 {
                            entry.0 += re;
                            entry.1 += im;
                        } else {
                            entry.0 -= re;
                            entry.1 -= im;
                        }
                    }
                    Some(prune(out))
                }
                Node::Mul(a, b) => Some(mul_polys(&go(a, m)?, &go(b, m)?, m)),
                Node::Pow(a, n) => {
                    let base = go(a, m)?;
                    let mut acc = PolyCoeffs::new();
                    acc.insert(vec![0; m], (BigRational::one(), BigRational::zero()));
                    for _ in 0..*n {
                        acc = mul_polys(&acc, &base, m);
                    }
                    Some(acc)
                }
                Node::Neg(a) => Some(prune(
                    go(a, m)?
                        .into_iter()
                        .map(|(e, (re, im))| (e, (-re, -im)))
                        .collect(),
                )),
                Node::Exp(_) | Node::Sin(_) | Node::Cos(_) => None,
            }
        }
        go(self.root(), self.arity)
    }
}

fn eval_node(node: &Node, z: &[C64]) -> C64 {
    match node {
        Node::Const(c) => c.value(),
        Node::Var(k) => z[*k],
        Node::Add(a, b) => eval_node(a, z) + eval_node(b, z),
        Node::Sub(a, b) => eval_node(a, z) - eval_node(b, z),
        Node::Mul(a, b) => eval_node(a, z) * eval_node(b, z),
        Node::Pow(a, n) => eval_node(a, z).powu(*n),
        Node::Neg(a) => -eval_node(a, z),
        Node::Exp(a) => eval_node(a, z).exp(),
        Node::Sin(a) => eval_node(a, z).sin(),
        Node::Cos(a) => eval_node(a, z).cos(),
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

/// Exact decimal rendering of a rational whose reduced denominator divides
/// some power of 10; falls back to the shortest f64 form otherwise.
fn decimal_string(r: &BigRational) -> String {
    let r = r.reduced();
    let num = r.numer().clone();
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}", rational_to_f64(&r));
    }
    // Scale to denominator 10^k.
    let k = twos.max(fives);
    let mut scaled = num;
    for _ in 0..(k - twos) {
        scaled *= &two;
    }
    for _ in 0..(k - fives) {
        scaled *= &five;
    }
    let digits = scaled.magnitude().to_string();
    let sign = if scaled.is_negative() { "-" } else { "" };
    if k == 0 {
        return format!("{}{}", sign, digits);
    }
    let k = k as usize;
    let padded = if digits.len() <= k {
        format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - k);
    format!("{}{}.{}", sign, int_part, frac_part)
}

fn fmt_const(c: &Constant, out: &mut String) {
    if c.im.is_zero() {
        if c.re.is_negative() {
            out.push('-');
            out.push_str(&decimal_string(&-&c.re));
        } else {
            out.push_str(&decimal_string(&c.re));
        }
    } else if c.re.is_zero() {
        if c.im.is_negative() {
            out.push('-');
            out.push_str(&decimal_string(&-&c.im));
        } else {
            out.push_str(&decimal_string(&c.im));
        }
        out.push('i');
    } else if c.re.is_negative() {
        // (-a±bi) is outside the literal grammar; print as -(a∓bi).
        out.push('-');
        fmt_const(&Constant::new(-&c.re, -&c.im), out);
    } else {
        out.push('(');
        out.push_str(&decimal_string(&c.re));
        if c.im.is_negative() {
            out.push('-');
            out.push_str(&decimal_string(&-&c.im));
        } else {
            out.push('+');
            out.push_str(&decimal_string(&c.im));
        }
        out.push_str("i)");
    }
}

// Precedence levels: 0 expr (+,-), 1 term (*), 2 factor (^), 3 base.
fn fmt_node(node: &Node, level: u8, out: &mut String) {
    let prec = match node {
        Node::Add(..) | Node::Sub(..) => 0,
        Node::Mul(..) => 1,
        Node::Pow(..) => 2,
        _ => 3,
    };
    let needs_paren = prec < level
        || matches!(node, Node::Const(c) if level >= 2 && (c.re.is_negative() || (c.re.is_zero() && c.im.is_negative())));
    if needs_paren {
        out.push('(');
        fmt_node(node, 0, out);
        out.push(')');
        return;
    }
    match node {
        Node::Const(c) => fmt_const(c, out),
        Node::Var(k) => {
            out.push('z');
            out.push_str(&(k + 1).to_string());
        }
        Node::Add(a, b) => {
            fmt_node(a, 0, out);
            out.push('+');
            fmt_node(b, 1, out);
        }
        Node::Sub(a, b) => {
            fmt_node(a, 0, out);
            out.push('-');
            fmt_node(b, 1, out);
        }
        Node::Mul(a, b) => {
            fmt_node(a, 1, out);
            out.push('*');
            fmt_node(b, 2, out);
        }
        Node::Pow(a, n) => {
            fmt_node(a, 3, out);
            out.push('^');
            out.push_str(&n.to_string());
        }
        Node::Neg(a) => {
            out.push('-');
            fmt_node(a, 3, out);
        }
        Node::Exp(a) => {
            out.push_str("exp(");
            fmt_node(a, 0, out);
            out.push(')');
        }
        Node::Sin(a) => {
            out.push_str("sin(");
            fmt_node(a, 0, out);
            out.push(')');
        }
        Node::Cos(a) => {
            out.push_str("cos(");
            fmt_node(a, 0, out);
            out.push(')');
        }
    }
}

impl fmt::Display for HoloExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        fmt_node(&self.root, 0, &mut s);
        f.write_str(&s)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, arity: usize) -> Self {
        Parser { src: text.as_bytes(), pos: 0, arity }
    }

    fn parse(mut self) -> Result<HoloExpr, ExprError> {
        let e = self.expr()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(e)
    }

    fn err(&self, msg: &str) -> ExprError {
        ExprError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expr(&mut self) -> Result<HoloExpr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.add(&rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<HoloExpr, ExprError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<HoloExpr, ExprError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(ExprError::NegativeExponent { pos: self.pos });
            }
            let n = self.uint()?;
            let n = u32::try_from(n).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<HoloExpr, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.base()?.neg())
            }
            Some(b'z') => {
                self.pos += 1;
                let start = self.pos;
                let idx = self.uint()?;
                if idx == 0 || idx as usize > self.arity {
                    return Err(ExprError::VarOutOfRange {
                        index: idx as usize,
                        arity: self.arity,
                        pos: start,
                    });
                }
                HoloExpr::var(idx as usize - 1, self.arity)
            }
            Some(b'(') => {
                // Either a complex literal "(a+bi)" or a parenthesized expression.
                if let Some(c) = self.try_complex_literal() {
                    return Ok(c);
                }
                self.pos += 1;
                let e = self.expr()?;
                if self.bump() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let re = self.decimal()?;
                if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    Ok(HoloExpr::constant(Constant::new(BigRational::zero(), re), self.arity))
                } else {
                    Ok(HoloExpr::constant(Constant::new(re, BigRational::zero()), self.arity))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .map(|c| c.is_ascii_alphabetic())
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if self.bump() != Some(b'(') {
                    return Err(self.err("expected '(' after function name"));
                }
                let arg = self.expr()?;
                if self.bump() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                match name {
                    "exp" => Ok(arg.exp()),
                    "sin" => Ok(arg.sin()),
                    "cos" => Ok(arg.cos()),
                    _ => {
                        self.pos = start;
                        Err(self.err("unknown function (expected exp, sin, or cos)"))
                    }
                }
            }
            _ => Err(self.err("expected expression")),
        }
    }

    /// Attempt `'(' decimal ('+'|'-') decimal 'i' ')'`, restoring position on failure.
    fn try_complex_literal(&mut self) -> Option<HoloExpr> {
        let save = self.pos;
        let attempt = (|| -> Option<HoloExpr> {
            if self.bump()? != b'(' {
                return None;
            }
            self.skip_ws();
            let re = self.decimal().ok()?;
            let sign = self.bump()?;
            if sign != b'+' && sign != b'-' {
                return None;
            }
            self.skip_ws();
            let mut im = self.decimal().ok()?;
            if self.src.get(self.pos) != Some(&b'i') {
                return None;
            }
            self.pos += 1;
            if self.bump()? != b')' {
                return None;
            }
            if sign == b'-' {
                im = -im;
            }
            Some(HoloExpr::constant(Constant::new(re, im), self.arity))
        })();
        if attempt.is_none() {
            self.pos = save;
        }
        attempt
    }

    fn uint(&mut self) -> Result<u64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .map(|c| c.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected unsigned integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer too large"))
    }

    /// Unsigned decimal literal as an exact rational.
    fn decimal(&mut self) -> Result<BigRational, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .map(|c| c.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected number"));
        }
        let int_part: BigInt = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .unwrap();
        let mut value = BigRational::from_integer(int_part);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac_start = self.pos;
            while self
                .src
                .get(self.pos)
                .map(|c| c.is_ascii_digit())
                .unwrap_or(false)
            {
                self.pos += 1;
            }
            if self.pos == frac_start {
                return Err(self.err("expected digits after decimal point"));
            }
            let digits = std::str::from_utf8(&self.src[frac_start..self.pos]).unwrap();
            let num: BigInt = digits.parse().unwrap();
            let den = BigInt::from(10).pow(digits.len() as u32);
            value += BigRational::new(num, den);
        }
        Ok(value)
    }
}
