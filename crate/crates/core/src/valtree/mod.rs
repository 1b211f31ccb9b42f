//! Points of the Berkovich disc over `Q((x))`, irregularity viewed as a
//! function on the disc, skeleta of such functions, and the blowup plans read
//! off those skeleta.
//!
//! A point `α_{z,r}` is stored as a center `z` (a Puiseux polynomial in `x`
//! with nonnegative exponents) together with `q = -log r`.  Only rational `q`
//! are stored, so every stored point is of type (ii).  Along a path
//! `t -> α_{z, e^-t}` the functions handled here are convex, nonincreasing and
//! piecewise affine with integral slopes; this is what makes an exact
//! reconstruction from values possible, and it also bounds where branches can
//! leave a path: a decreasing side branch forces the slope along the path to
//! jump up, so side branches are only searched at breakpoints.

mod plan;

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::diffmod::{BaseKind, DiffModule};
use crate::error::{Error, Result};
use crate::irregularity::scale_multiset_at;
use crate::series::rat::{denom_u32, lcm_u32, primitive_integer_ray};
use crate::series::{fmt_rat, rat, PuiseuxPoly, Rat, UPoly};
use crate::tropical::{reconstruct_convex, Budget, Piece, Piecewise1D};
use crate::twisted::{cyclic_vector, newton_polygon, RationalFunction};

pub use plan::{blowup_plan, origin_blowup_verdicts, BlowupPlan, ChartVerdict, PlanStep, Valuation};

/// The point `α_{z, e^-q}` with a canonical center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscPoint {
    center: PuiseuxPoly,
    q: Rat,
}

/// Drops the terms of `z` that are at most `e^-q` in norm.
fn truncate_center(z: &PuiseuxPoly, q: &Rat) -> PuiseuxPoly {
    z.terms()
        .filter(|(e, _)| e[0] < *q)
        .fold(PuiseuxPoly::zero().with_arity(1), |acc, (e, c)| &acc + &PuiseuxPoly::monomial(1, e, c.clone()))
        .with_arity(1)
}

fn center_key(z: &PuiseuxPoly) -> String {
    z.to_string_with(&["x"])
}

impl DiscPoint {
    /// Validates the center (a polynomial in `x` with nonnegative exponents)
    /// and the depth `q >= 0`, then canonicalizes.
    pub fn new(center: PuiseuxPoly, q: Rat) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::Input(format!("disc radius e^-q needs q >= 0, got {}", fmt_rat(&q))));
        }
        if center.terms().any(|(e, _)| !e[1].is_zero() || e[0].is_negative()) {
            return Err(Error::Input("disc centers are series in x with nonnegative exponents".into()));
        }
        Ok(DiscPoint { center: truncate_center(&center, &q), q })
    }

    /// The Gauss point `α_{0,1}`.
    pub fn gauss() -> Self {
        DiscPoint { center: PuiseuxPoly::zero().with_arity(1), q: Rat::zero() }
    }

    pub fn center(&self) -> &PuiseuxPoly {
        &self.center
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    /// Degree over `Q((x))`: the ramification needed by the canonical center.
    pub fn degree(&self) -> u32 {
        self.center.minimal_h()
    }

    /// `self >= other`: larger radius and `|z_self - z_other| <= r(self)`.
    pub fn dominates(&self, other: &DiscPoint) -> bool {
        if self.q > other.q {
            return false;
        }
        let d = &self.center - &other.center;
        d.is_zero() || d.min_exp(0).is_some_and(|e| e >= self.q)
    }

    /// The unique point of radius `e^-t` dominating `self` (needs `t <= q`).
    pub fn ancestor(&self, t: &Rat) -> Result<DiscPoint> {
        if *t > self.q || t.is_negative() {
            return Err(Error::Input(format!("no dominating point at depth {} for {}", fmt_rat(t), self)));
        }
        DiscPoint::new(self.center.clone(), t.clone())
    }

    /// Center of the branch at `self` in direction `c`: `z + c x^q`.
    pub fn branch_center(&self, c: &Rat) -> PuiseuxPoly {
        (&self.center + &PuiseuxPoly::monomial(1, [self.q.clone(), Rat::zero()], c.clone())).with_arity(1)
    }

    /// True if `a` and `b` (both strictly below `self`) lie in the same branch.
    pub fn same_branch(&self, a: &DiscPoint, b: &DiscPoint) -> bool {
        let d = &a.center - &b.center;
        d.is_zero() || d.min_exp(0).is_some_and(|e| e > self.q)
    }

    pub fn to_json(&self) -> Value {
        json!({"center": center_key(&self.center), "q": fmt_rat(&self.q), "degree": self.degree()})
    }
}

impl fmt::Display for DiscPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α(z = {}, q = {})", center_key(&self.center), fmt_rat(&self.q))
    }
}

/// A monotone integral subharmonic function on the disc.
#[derive(Clone, Debug)]
pub enum MisFunction {
    /// `α -> F_d(M_α)`, the irregularity of a module over `R21` at `α`.
    Irregularity(DiffModule),
    /// `α -> max{0, log|P|_α}` for `P` in `Q[[x, y]][1/x]`.
    LogNorm(PuiseuxPoly),
}

impl MisFunction {
    pub fn irregularity(m: &DiffModule) -> Result<Self> {
        if m.base().kind != BaseKind::R21 {
            return Err(Error::Input("disc functions are defined for modules over R21".into()));
        }
        if !m.check_flat() {
            return Err(Error::Precondition("module is not integrable".into()));
        }
        Ok(MisFunction::Irregularity(m.clone()))
    }

    pub fn log_norm(p: &PuiseuxPoly) -> Result<Self> {
        if p.arity() > 2 || p.terms().any(|(e, _)| e[1].is_negative() || !e[1].is_integer()) {
            return Err(Error::Input("P must be polynomial in y with Laurent-Puiseux coefficients in x".into()));
        }
        Ok(MisFunction::LogNorm(p.clone().with_arity(2)))
    }

    pub fn describe(&self) -> String {
        match self {
            MisFunction::Irregularity(m) => format!("F_{}({}, ·)", m.rank(), m.name()),
            MisFunction::LogNorm(p) => format!("max{{0, log|{}|}}", p.to_string_with(&["x", "y"])),
        }
    }

    /// Value at a point (not memoized; see [`Evaluator`]).
    pub fn eval(&self, a: &DiscPoint, seed: u64) -> Result<Rat> {
        Evaluator::new(self, seed).at(a.center(), a.q())
    }
}

/// Irregularity of `M_α`: recenter at `z`, then sum the log-scales at weight `(1, q)`.
pub fn eval_irreg_at(m: &DiffModule, a: &DiscPoint, seed: u64) -> Result<Rat> {
    MisFunction::irregularity(m)?.eval(a, seed)
}

enum Recentered {
    Module(DiffModule),
    Poly(PuiseuxPoly),
}

/// Memoizing evaluator along paths `t -> α_{z, e^-t}`.
pub struct Evaluator<'a> {
    f: &'a MisFunction,
    seed: u64,
    recentered: RefCell<BTreeMap<String, std::rc::Rc<Recentered>>>,
    values: RefCell<BTreeMap<(String, Rat), Rat>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(f: &'a MisFunction, seed: u64) -> Self {
        Evaluator { f, seed, recentered: RefCell::new(BTreeMap::new()), values: RefCell::new(BTreeMap::new()) }
    }

    fn recenter(&self, z: &PuiseuxPoly) -> Result<std::rc::Rc<Recentered>> {
        let key = center_key(z);
        if let Some(r) = self.recentered.borrow().get(&key) {
            return Ok(r.clone());
        }
        let r = std::rc::Rc::new(match self.f {
            MisFunction::Irregularity(m) => Recentered::Module(m.pullback_center(z)?),
            MisFunction::LogNorm(p) => Recentered::Poly(p.substitute_center(z)?),
        });
        self.recentered.borrow_mut().insert(key, r.clone());
        Ok(r)
    }

    /// `f(α_{z, e^-t})`.
    pub fn at(&self, z: &PuiseuxPoly, t: &Rat) -> Result<Rat> {
        let z = truncate_center(z, t);
        let key = (center_key(&z), t.clone());
        if let Some(v) = self.values.borrow().get(&key) {
            return Ok(v.clone());
        }
        let r = [Rat::one(), t.clone()];
        let v = match &*self.recenter(&z)? {
            Recentered::Module(mz) => scale_multiset_at(mz, &r, self.seed)?.iter().sum(),
            Recentered::Poly(pz) => match pz.gauss_log_norm(&r) {
                Some(l) if l.is_positive() => l,
                _ => Rat::zero(),
            },
        };
        self.values.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// Exact restriction of `f` to the path through `z` on `[t0, t1]`.
    pub fn restriction(&self, z: &PuiseuxPoly, t0: &Rat, t1: &Rat, budget: &Budget) -> Result<Piecewise1D> {
        reconstruct_convex(|t| self.at(z, t), t0, t1, budget)
    }

    /// Left slope at `α` along the path from the Gauss point.
    pub fn left_slope(&self, a: &DiscPoint, budget: &Budget) -> Result<Rat> {
        if a.q.is_zero() {
            return Err(Error::Input("the Gauss point has no incoming direction".into()));
        }
        let pw = self.restriction(&a.center, &(&a.q / rat(2)), &a.q, budget)?;
        Ok(pw.pieces().last().unwrap().slope.clone())
    }

    /// Right slope at `α` along the branch containing `β < α`.
    pub fn right_slope(&self, a: &DiscPoint, b: &DiscPoint, budget: &Budget) -> Result<Rat> {
        if !(a.dominates(b) && a.q < b.q) {
            return Err(Error::Input(format!("{b} is not strictly below {a}")));
        }
        let pw = self.restriction(&b.center, &a.q, &b.q, budget)?;
        Ok(pw.pieces()[0].slope.clone())
    }

    /// Nonzero coefficients `c` for which the branch `z + c x^q` at `α` may
    /// carry a different value of `f`: the rational roots of the residual
    /// polynomials of the relevant coefficients at `α`.
    ///
    /// Irrational roots of a coefficient that governs a positive scale raise
    /// `ExtensionRequired` with their minimal polynomial in `c`.
    pub fn branch_candidates(&self, a: &DiscPoint) -> Result<Vec<Rat>> {
        let r = [Rat::one(), a.q.clone()];
        let ctx = format!("branch centers below {a}");
        let mut out: Vec<Rat> = Vec::new();
        match &*self.recenter(&a.center)? {
            Recentered::Poly(pz) => {
                if pz.gauss_log_norm(&r).is_some_and(|l| l.is_positive()) {
                    let m = ramification_step(&a.q, lcm_u32(pz.minimal_h(), a.degree()));
                    out.extend(nonzero_roots(&residual(pz, &a.q), m, true, &ctx)?);
                }
            }
            Recentered::Module(mz) => {
                let m = ramification_step(&a.q, lcm_u32(mz.base().h, a.degree()));
                let ray = primitive_integer_ray(&r);
                let w = [Rat::from_integer(ray[0].clone()), Rat::from_integer(ray[1].clone())];
                for (_, block) in mz.blocks() {
                    let coeffs: Vec<(RationalFunction, bool)> = if block.rank() == 1 {
                        let f = block.euler_matrix(&w)[0][0].clone();
                        let relevant = f.gauss_log_norm(&r).is_some_and(|l| l.is_positive());
                        vec![(RationalFunction::poly(f), relevant)]
                    } else {
                        let cv = cyclic_vector(&block, &w, self.seed)?;
                        let np = newton_polygon(&cv.poly, &r);
                        let d = block.rank() as i64;
                        let mut relevant = vec![false; block.rank()];
                        for win in np.vertices.windows(2) {
                            let s = (&win[1].1 - &win[0].1) / rat(win[1].0 - win[0].0);
                            if s < np.cap {
                                for (x, _) in win {
                                    if *x > -d {
                                        relevant[(-x) as usize] = true;
                                    }
                                }
                            }
                        }
                        (0..block.rank()).map(|i| (cv.poly.coeff(i), relevant[i])).collect()
                    };
                    for (c, relevant) in coeffs {
                        if c.is_zero() {
                            continue;
                        }
                        let rn = residual(c.num(), &a.q);
                        let rd = residual(c.den(), &a.q);
                        let g = rn.gcd(&rd);
                        let (num, _) = rn.divrem(&g);
                        let (den, _) = rd.divrem(&g);
                        out.extend(nonzero_roots(&num, m, relevant, &ctx)?);
                        out.extend(nonzero_roots(&den, m, false, &ctx)?);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Residual polynomial of `P` at `α` (only for [`MisFunction::LogNorm`]).
    pub fn residual_polynomial(&self, a: &DiscPoint) -> Result<UPoly> {
        match &*self.recenter(&a.center)? {
            Recentered::Poly(pz) => Ok(residual(pz, &a.q)),
            Recentered::Module(_) => Err(Error::Input("residual polynomials are defined for Laurent polynomials".into())),
        }
    }
}

/// Order of the roots of unity acting on directions `c x^q` over a field
/// of ramification index `h`.
fn ramification_step(q: &Rat, h: u32) -> u32 {
    denom_u32(&(q * rat(h as i64)))
}

/// Substitutes `u = c x^q` into the leading form at weight `(1, q)`; the
/// coefficient of `c^j` is the leading coefficient on `u^j`.
fn residual(p: &PuiseuxPoly, q: &Rat) -> UPoly {
    let r = [Rat::one(), q.clone()];
    let lf = p.leading_form(&r);
    let Some(lo) = lf.terms().map(|(e, _)| e[1].clone()).min() else { return UPoly::zero() };
    let lo = lo.min(Rat::zero());
    let mut coeffs: Vec<Rat> = Vec::new();
    for (e, c) in lf.terms() {
        let j = (&e[1] - &lo).to_integer().to_usize().expect("u-degree fits");
        if coeffs.len() <= j {
            coeffs.resize(j + 1, Rat::zero());
        }
        coeffs[j] += c;
    }
    UPoly::new(coeffs)
}

fn rational_root_of(t: &Rat, m: u32) -> Option<Rat> {
    if m == 1 {
        return Some(t.clone());
    }
    if t.is_negative() && m % 2 == 0 {
        return None;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        let a = n.abs().nth_root(m);
        (num_traits::pow(a.clone(), m as usize) == n.abs()).then(|| if n.is_negative() { -a } else { a })
    };
    Some(Rat::new(root(t.numer())?, root(t.denom())?))
}

/// Nonzero roots `c` of `R`, where `R(c) = c^j0 S(c^m)`; each root `t` of `S`
/// names one branch, represented by a rational `m`-th root when one exists.
fn nonzero_roots(rpoly: &UPoly, m: u32, strict: bool, ctx: &str) -> Result<Vec<Rat>> {
    if rpoly.degree().unwrap_or(0) == 0 {
        return Ok(vec![]);
    }
    let j0 = rpoly.ord0().unwrap_or(0);
    let cs = &rpoly.coeffs()[j0..];
    let m = if cs.iter().enumerate().all(|(j, c)| c.is_zero() || j % m as usize == 0) { m } else { 1 };
    let s = UPoly::new(cs.iter().step_by(m as usize).cloned().collect());
    if s.degree().unwrap_or(0) == 0 {
        return Ok(vec![]);
    }
    let (roots, rest) = s.rational_roots()?;
    let spread = |p: &UPoly| {
        let mut v = vec![Rat::zero(); p.coeffs().len().saturating_sub(1) * m as usize + 1];
        for (k, c) in p.coeffs().iter().enumerate() {
            v[k * m as usize] = c.clone();
        }
        UPoly::new(v)
    };
    let mut out = Vec::new();
    for (t, _) in roots {
        match rational_root_of(&t, m) {
            Some(c) => out.push(c),
            None if strict => {
                let p = spread(&UPoly::linear_root(t));
                return Err(Error::ExtensionRequired { poly: p.monic().to_string_var("c"), context: ctx.to_string() });
            }
            None => {}
        }
    }
    if strict && rest.degree().unwrap_or(0) > 0 {
        let p = spread(&rest);
        return Err(Error::ExtensionRequired { poly: p.monic().to_string_var("c"), context: ctx.to_string() });
    }
    Ok(out)
}

/// Slopes around a point: incoming along the path from the Gauss point, and
/// outgoing along each given branch.
#[derive(Clone, Debug, PartialEq)]
pub struct StarBalance {
    pub point: DiscPoint,
    pub incoming: Rat,
    pub outgoing: Vec<(DiscPoint, Rat)>,
}

impl StarBalance {
    /// `f'_-(α) <= Σ f'_+(α, β_i)`.
    pub fn holds(&self) -> bool {
        let s: Rat = self.outgoing.iter().map(|(_, s)| s.clone()).sum();
        self.incoming <= s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "point": self.point.to_json(),
            "incoming": fmt_rat(&self.incoming),
            "outgoing": self.outgoing.iter().map(|(b, s)| json!({"branch": b.to_json(), "slope": fmt_rat(s)})).collect::<Vec<_>>(),
            "holds": self.holds(),
        })
    }
}

/// Checks the branch inequality at `α` against branches represented by the
/// given points (each strictly below `α`, pairwise in different branches).
pub fn subharmonic_check(f: &MisFunction, a: &DiscPoint, branches: &[DiscPoint], seed: u64, budget: &Budget) -> Result<StarBalance> {
    for (i, b) in branches.iter().enumerate() {
        if !(a.dominates(b) && a.q < b.q) {
            return Err(Error::Input(format!("{b} is not strictly below {a}")));
        }
        if branches[..i].iter().any(|o| a.same_branch(o, b)) {
            return Err(Error::Input(format!("two representatives of the same branch at {a}")));
        }
    }
    let ev = Evaluator::new(f, seed);
    let incoming = ev.left_slope(a, budget)?;
    let outgoing =
        branches.iter().map(|b| Ok((b.clone(), ev.right_slope(a, b, budget)?))).collect::<Result<Vec<_>>>()?;
    Ok(StarBalance { point: a.clone(), incoming, outgoing })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Head,
    Joint,
    Extremity,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Head => "head",
            Role::Joint => "joint",
            Role::Extremity => "extremity",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonNode {
    pub point: DiscPoint,
    pub role: Role,
    pub value: Rat,
}

/// Segment of the skeleton; `pieces` describe `f` along it as a function of `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonEdge {
    pub from: usize,
    pub to: usize,
    pub pieces: Vec<Piece>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    pub function: String,
    pub nodes: Vec<SkeletonNode>,
    pub edges: Vec<SkeletonEdge>,
    pub q_max: Rat,
    /// Nodes where the search stopped at `q_max` while `f` was still decreasing.
    pub inconclusive: Vec<usize>,
}

impl Skeleton {
    pub fn extremities(&self) -> Vec<&SkeletonNode> {
        self.nodes.iter().filter(|n| n.role == Role::Extremity).collect()
    }

    pub fn joints(&self) -> Vec<&SkeletonNode> {
        self.nodes.iter().filter(|n| n.role == Role::Joint).collect()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.from == i).map(|e| e.to).collect()
    }

    pub fn is_conclusive(&self) -> bool {
        self.inconclusive.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "function": self.function,
            "q_max": fmt_rat(&self.q_max),
            "conclusive": self.is_conclusive(),
            "nodes": self.nodes.iter().map(|n| {
                let mut v = n.point.to_json();
                v["role"] = json!(n.role.name());
                v["value"] = json!(fmt_rat(&n.value));
                v
            }).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "from": e.from,
                "to": e.to,
                "pieces": e.pieces.iter().map(|p| json!({
                    "q0": fmt_rat(&p.t0), "q1": fmt_rat(&p.t1), "slope": fmt_rat(&p.slope),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SkeletonOptions {
    pub q_max: Rat,
    /// Maximal number of skeleton nodes.
    pub max_nodes: usize,
    pub seed: u64,
    pub budget: Budget,
}

impl Default for SkeletonOptions {
    fn default() -> Self {
        SkeletonOptions { q_max: rat(64), max_nodes: 256, seed: 0, budget: Budget::default() }
    }
}

struct Search<'a> {
    ev: Evaluator<'a>,
    opts: &'a SkeletonOptions,
    nodes: Vec<SkeletonNode>,
    edges: Vec<SkeletonEdge>,
    inconclusive: Vec<usize>,
}

impl Search<'_> {
    /// Restriction on `[t0, t1]` with `t1` doubling until `f` is flat at the
    /// end; the flag is false when `q_max` is reached first.
    fn until_flat(&self, z: &PuiseuxPoly, t0: &Rat) -> Result<(Piecewise1D, bool)> {
        let mut len = Rat::one();
        loop {
            let mut t1 = t0 + &len;
            let capped = t1 >= self.opts.q_max;
            if capped {
                t1 = self.opts.q_max.clone();
            }
            let pw = self.ev.restriction(z, t0, &t1, &self.opts.budget)?;
            let last = pw.pieces().last().unwrap();
            if !last.slope.is_negative() {
                return Ok((pw, true));
            }
            if capped {
                return Ok((pw, false));
            }
            len *= rat(2);
        }
    }

    fn push_node(&mut self, point: DiscPoint, value: Rat) -> Result<usize> {
        if self.nodes.len() >= self.opts.max_nodes {
            return Err(Error::BudgetExhausted(format!("skeleton search: more than {} nodes", self.opts.max_nodes)));
        }
        self.nodes.push(SkeletonNode { point, role: Role::Joint, value });
        Ok(self.nodes.len() - 1)
    }

    fn explore(&mut self, parent: usize, z: PuiseuxPoly, t0: Rat) -> Result<()> {
        if t0 >= self.opts.q_max {
            self.inconclusive.push(parent);
            return Ok(());
        }
        let (pw, complete) = self.until_flat(&z, &t0)?;
        let mut prev = parent;
        let decreasing: Vec<Piece> = pw.pieces().iter().take_while(|p| p.slope.is_negative()).cloned().collect();
        for p in decreasing {
            if !p.slope.is_integer() {
                return Err(Error::Precondition(format!("non-integral slope {} along a path", fmt_rat(&p.slope))));
            }
            let point = DiscPoint::new(z.clone(), p.t1.clone())?;
            let node = self.push_node(point.clone(), p.v1())?;
            self.edges.push(SkeletonEdge { from: prev, to: node, pieces: vec![p.clone()] });
            prev = node;
            if p.t1 >= self.opts.q_max {
                break;
            }
            for c in self.ev.branch_candidates(&point)? {
                self.explore(node, point.branch_center(&c), point.q.clone())?;
            }
        }
        if !complete && prev != parent {
            self.inconclusive.push(prev);
        }
        Ok(())
    }
}

/// Skeleton of `f` in the open disc: depth-first descent from the Gauss point.
pub fn skeleton(f: &MisFunction, opts: &SkeletonOptions) -> Result<Skeleton> {
    let mut s = Search { ev: Evaluator::new(f, opts.seed), opts, nodes: Vec::new(), edges: Vec::new(), inconclusive: Vec::new() };
    let head = DiscPoint::gauss();
    let v = s.ev.at(head.center(), head.q())?;
    s.nodes.push(SkeletonNode { point: head, role: Role::Head, value: v });
    s.explore(0, PuiseuxPoly::zero().with_arity(1), Rat::zero())?;
    let mut nodes = s.nodes;
    for i in 1..nodes.len() {
        if !s.edges.iter().any(|e| e.from == i) {
            nodes[i].role = Role::Extremity;
        }
    }
    let mut inconclusive = s.inconclusive;
    inconclusive.sort();
    inconclusive.dedup();
    Ok(Skeleton { function: f.describe(), nodes, edges: s.edges, q_max: opts.q_max.clone(), inconclusive })
}

/// Checks the branch inequality at every joint of a computed skeleton, using
/// the children as branch representatives plus the continuation of the
/// joint's own center when no child covers it.
pub fn check_skeleton_joints(f: &MisFunction, sk: &Skeleton, opts: &SkeletonOptions) -> Result<Vec<StarBalance>> {
    let mut out = Vec::new();
    for (i, n) in sk.nodes.iter().enumerate() {
        if n.role != Role::Joint {
            continue;
        }
        let mut branches: Vec<DiscPoint> = sk.children(i).iter().map(|&c| sk.nodes[c].point.clone()).collect();
        let own = DiscPoint::new(n.point.center().clone(), &n.point.q + Rat::one())?;
        if !branches.iter().any(|b| n.point.same_branch(b, &own)) {
            branches.push(own);
        }
        out.push(subharmonic_check(f, &n.point, &branches, opts.seed, &opts.budget)?);
    }
    Ok(out)
}
