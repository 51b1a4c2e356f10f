//! Exact arithmetic in the logarithmic Weyl algebra D(c) of a chart.
//!
//! Elements are kept in PBW normal form: linear combinations of ordered
//! monomials x^a t^b ∂^c θ^d, with b_j = 0 on the idealized directions.
//! Exponent vectors share the chart's cotangent indexing, with ξ_i standing
//! for ∂_i and τ_j for θ_j. Commutation is by closed-form expansion
//! (θ^d t^b = t^b (θ+b)^d and the Leibniz rule for ∂^c x^a); a naive
//! term-rewriting oracle lives in the test suite.

use std::collections::{BTreeMap, BTreeSet};

use crate::chart::Chart;
use crate::comalg::CPoly;
use crate::error::{Error, Result};
use crate::mono::{Mono, TermOrder};
use crate::scalar::Scalar;

/// An element of the log Weyl algebra in PBW normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpElement<K: Scalar> {
    chart: Chart,
    terms: BTreeMap<Mono, K>,
}

impl<K: Scalar> OpElement<K> {
    pub fn zero(chart: &Chart) -> Self {
        OpElement {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: &Chart, c: K) -> Self {
        let mut e = Self::zero(chart);
        e.add_term(Mono::one(chart.nvars()), c);
        e
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, K::one())
    }

    /// x_i, 1-based.
    pub fn x(chart: &Chart, i: usize) -> Result<Self> {
        if i == 0 || i > chart.n_free() {
            return Err(Error::UnknownGenerator(format!("x{}", i)));
        }
        Ok(Self::from_mono(
            chart,
            Mono::var(chart.nvars(), chart.var_x(i)),
        ))
    }

    /// t_j, 1-based. On an idealized direction this is the zero element.
    pub fn t(chart: &Chart, j: usize) -> Result<Self> {
        if j == 0 || j > chart.n_log() {
            return Err(Error::UnknownGenerator(format!("t{}", j)));
        }
        Ok(Self::from_mono(
            chart,
            Mono::var(chart.nvars(), chart.var_t(j)),
        ))
    }

    /// ∂_i, 1-based.
    pub fn d(chart: &Chart, i: usize) -> Result<Self> {
        if i == 0 || i > chart.n_free() {
            return Err(Error::UnknownGenerator(format!("d{}", i)));
        }
        Ok(Self::from_mono(
            chart,
            Mono::var(chart.nvars(), chart.var_xi(i)),
        ))
    }

    /// θ_j, 1-based.
    pub fn th(chart: &Chart, j: usize) -> Result<Self> {
        if j == 0 || j > chart.n_log() {
            return Err(Error::UnknownGenerator(format!("th{}", j)));
        }
        Ok(Self::from_mono(
            chart,
            Mono::var(chart.nvars(), chart.var_tau(j)),
        ))
    }

    fn from_mono(chart: &Chart, m: Mono) -> Self {
        let mut e = Self::zero(chart);
        e.add_term(m, K::one());
        e
    }

    pub fn from_terms(chart: &Chart, it: impl IntoIterator<Item = (Mono, K)>) -> Self {
        let mut e = Self::zero(chart);
        for (m, c) in it {
            e.add_term(m, c);
        }
        e
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &K)> {
        self.terms.iter()
    }

    /// Idealized reduction happens here: monomials containing t_j with j in
    /// the idealized set are identically zero.
    pub fn add_term(&mut self, m: Mono, c: K) {
        if c.is_zero() {
            return;
        }
        for &j in self.chart.idealized() {
            if m.0[self.chart.var_t(j)] > 0 {
                return;
            }
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (m, c) in &other.terms {
            e.add_term(m.clone(), c.clone());
        }
        e
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        OpElement {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        OpElement {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    /// Associative unital product in canonical form.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let mut out = Self::zero(&self.chart);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                for (m, c) in mul_monomials::<K>(&self.chart, m1, m2) {
                    out.add_term(m, c * c1.clone() * c2.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(&self.chart);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Order filtration degree: total degree in ∂, θ. None for the zero element.
    pub fn ord(&self) -> Option<u32> {
        let mask = self.chart.fiber_mask();
        self.terms.keys().map(|m| m.deg_masked(&mask)).max()
    }

    /// Principal symbol: the top order-degree part as a commutative
    /// polynomial in (x, t, ξ, τ). Zero for the zero element.
    pub fn symbol(&self) -> CPoly<K> {
        let mask = self.chart.fiber_mask();
        match self.ord() {
            None => CPoly::zero(self.chart.nvars()),
            Some(d) => CPoly::from_terms(
                self.chart.nvars(),
                self.terms
                    .iter()
                    .filter(|(m, _)| m.deg_masked(&mask) == d)
                    .map(|(m, c)| (m.clone(), c.clone())),
            ),
        }
    }

    /// The transposition anti-automorphism: fixes x, t; negates ∂, θ.
    pub fn transpose(&self) -> Self {
        let chart = &self.chart;
        let n = chart.n_free();
        let r = chart.n_log();
        let nv = chart.nvars();
        let mut out = Self::zero(chart);
        for (m, c) in &self.terms {
            // split (a, b, c', d) and rebuild as (−1)^{|c'|+|d|} θ^d ∂^{c'} · t^b x^a
            let mut fib = vec![0u32; nv];
            let mut base = vec![0u32; nv];
            for v in 0..nv {
                if v < n + r {
                    base[v] = m.0[v];
                } else {
                    fib[v] = m.0[v];
                }
            }
            let fib_deg: u32 = fib.iter().sum();
            let sign = if fib_deg % 2 == 0 { K::one() } else { -K::one() };
            for (mm, cc) in mul_monomials::<K>(chart, &Mono(fib), &Mono(base)) {
                out.add_term(mm, cc * sign.clone() * c.clone());
            }
        }
        out
    }

    /// The algebra automorphism θ_j ↦ θ_j + s_j (x, t, ∂ fixed). `shifts`
    /// is indexed by log direction (1-based j at position j−1).
    pub fn theta_shift(&self, shifts: &[i64]) -> Self {
        assert_eq!(shifts.len(), self.chart.n_log());
        let chart = self.chart.clone();
        let mut out = Self::zero(&chart);
        for (m, c) in &self.terms {
            let mut expansion: Vec<(Mono, K)> = vec![(m.clone(), K::one())];
            for j in 1..=chart.n_log() {
                let s = shifts[j - 1];
                if s == 0 {
                    continue;
                }
                let v = chart.var_tau(j);
                let mut next: Vec<(Mono, K)> = Vec::new();
                for (mm, cc) in expansion {
                    let dj = mm.0[v];
                    // (θ_j + s)^{d_j} = Σ_e C(d_j, e) s^{d_j−e} θ_j^e
                    for e in 0..=dj {
                        let mut coef = K::binomial(dj, e) * cc.clone();
                        for _ in 0..(dj - e) {
                            coef = coef * K::from_int(s);
                        }
                        if coef.is_zero() {
                            continue;
                        }
                        let mut em = mm.0.clone();
                        em[v] = e;
                        next.push((Mono(em), coef));
                    }
                }
                expansion = next;
            }
            for (mm, cc) in expansion {
                out.add_term(mm, cc * c.clone());
            }
        }
        out
    }

    /// The canonical line-bundle twist: θ_j ↦ θ_j ± 1 on every non-idealized
    /// log direction, identity on idealized directions and on x, t, ∂.
    pub fn twist(&self, direction: i64) -> Self {
        let shifts: Vec<i64> = (1..=self.chart.n_log())
            .map(|j| if self.chart.is_idealized(j) { 0 } else { direction })
            .collect();
        self.theta_shift(&shifts)
    }

    /// Leading monomial with respect to a term order.
    pub fn leading(&self, order: &TermOrder) -> Option<(&Mono, &K)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (m, c))
    }

    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let order = TermOrder::Weighted(self.chart.fiber_mask(), Box::new(TermOrder::DegRevLex));
        let mut ms: Vec<&Mono> = self.terms.keys().collect();
        ms.sort_by(|a, b| order.cmp(b, a));
        let mut out = String::new();
        for (i, m) in ms.iter().enumerate() {
            let c = &self.terms[*m];
            let s = format!("{}", c);
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&op_term_string(&self.chart, m, &mag));
        }
        out
    }
}

fn op_term_string(chart: &Chart, m: &Mono, mag: &str) -> String {
    let mut parts = Vec::new();
    if m.is_one() {
        return mag.to_string();
    }
    if mag != "1" {
        parts.push(mag.to_string());
    }
    let n = chart.n_free();
    let r = chart.n_log();
    for (v, &d) in m.0.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let name = if v < n {
            format!("x{}", v + 1)
        } else if v < n + r {
            format!("t{}", v - n + 1)
        } else if v < 2 * n + r {
            format!("d{}", v - n - r + 1)
        } else {
            format!("th{}", v - 2 * n - r + 1)
        };
        if d == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{}^{}", name, d));
        }
    }
    parts.join("*")
}

/// Product of two PBW monomials, as a normal-form term list.
///
/// (x^a t^b ∂^c θ^d)(x^{a'} t^{b'} ∂^{c'} θ^{d'}) =
///   Σ_k [∏ C(c,k)·falling(a',k)] x^{a+a'−k} t^{b+b'} ∂^{c+c'−k} (θ+b')^d θ^{d'}.
pub(crate) fn mul_monomials<K: Scalar>(chart: &Chart, m1: &Mono, m2: &Mono) -> Vec<(Mono, K)> {
    let n = chart.n_free();
    let r = chart.n_log();
    // Leibniz expansion over the x/∂ pairs
    let mut leibniz: Vec<(Vec<u32>, K)> = vec![(vec![0; n], K::one())];
    for i in 0..n {
        let ci = m1.0[chart.var_xi(i + 1)];
        let ai = m2.0[chart.var_x(i + 1)];
        let kmax = ci.min(ai);
        let mut next = Vec::new();
        for (ks, coef) in leibniz {
            for k in 0..=kmax {
                let c = coef.clone() * K::binomial(ci, k) * K::falling(ai, k);
                if c.is_zero() {
                    continue;
                }
                let mut ks2 = ks.clone();
                ks2[i] = k;
                next.push((ks2, c));
            }
        }
        leibniz = next;
    }
    // binomial expansion of (θ+b')^d over the log directions
    let mut theta: Vec<(Vec<u32>, K)> = vec![(vec![0; r], K::one())];
    for j in 0..r {
        let dj = m1.0[chart.var_tau(j + 1)];
        let bj = m2.0[chart.var_t(j + 1)];
        let mut next = Vec::new();
        for (es, coef) in theta {
            if bj == 0 || dj == 0 {
                let mut es2 = es.clone();
                es2[j] = dj;
                next.push((es2, coef));
                continue;
            }
            for e in 0..=dj {
                let mut c = coef.clone() * K::binomial(dj, e);
                for _ in 0..(dj - e) {
                    c = c * K::from_int(bj as i64);
                }
                if c.is_zero() {
                    continue;
                }
                let mut es2 = es.clone();
                es2[j] = e;
                next.push((es2, c));
            }
        }
        theta = next;
    }
    let mut out = Vec::new();
    for (ks, ck) in &leibniz {
        for (es, ce) in &theta {
            let mut exp = vec![0u32; chart.nvars()];
            for i in 1..=n {
                exp[chart.var_x(i)] = m1.0[chart.var_x(i)] + m2.0[chart.var_x(i)] - ks[i - 1];
                exp[chart.var_xi(i)] = m1.0[chart.var_xi(i)] + m2.0[chart.var_xi(i)] - ks[i - 1];
            }
            for j in 1..=r {
                exp[chart.var_t(j)] = m1.0[chart.var_t(j)] + m2.0[chart.var_t(j)];
                exp[chart.var_tau(j)] = es[j - 1] + m2.0[chart.var_tau(j)];
            }
            out.push((Mono(exp), ck.clone() * ce.clone()));
        }
    }
    out
}

/// A raw operator expression tree; `normal_form` evaluates it into PBW form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpExpr {
    Int(i64),
    Ratio(i64, i64),
    X(usize),
    T(usize),
    D(usize),
    Th(usize),
    Neg(Box<OpExpr>),
    Add(Box<OpExpr>, Box<OpExpr>),
    Sub(Box<OpExpr>, Box<OpExpr>),
    Mul(Box<OpExpr>, Box<OpExpr>),
    Pow(Box<OpExpr>, u32),
}

/// Evaluates an expression tree to canonical PBW form. Applying the defining
/// relations to the output changes nothing: the result is already ordered
/// x-t-∂-θ with idealized monomials dropped.
pub fn normal_form<K: Scalar>(chart: &Chart, e: &OpExpr) -> Result<OpElement<K>> {
    match e {
        OpExpr::Int(v) => Ok(OpElement::constant(chart, K::from_int(*v))),
        OpExpr::Ratio(n, d) => Ok(OpElement::constant(chart, K::from_ratio(*n, *d))),
        OpExpr::X(i) => OpElement::x(chart, *i),
        OpExpr::T(j) => OpElement::t(chart, *j),
        OpExpr::D(i) => OpElement::d(chart, *i),
        OpExpr::Th(j) => OpElement::th(chart, *j),
        OpExpr::Neg(a) => Ok(normal_form::<K>(chart, a)?.neg()),
        OpExpr::Add(a, b) => Ok(normal_form::<K>(chart, a)?.add(&normal_form(chart, b)?)),
        OpExpr::Sub(a, b) => Ok(normal_form::<K>(chart, a)?.sub(&normal_form(chart, b)?)),
        OpExpr::Mul(a, b) => normal_form::<K>(chart, a)?.mul(&normal_form(chart, b)?),
        OpExpr::Pow(a, k) => normal_form::<K>(chart, a)?.pow(*k),
    }
}

/// An element of the Ore localization D[t_T^{-1}]: a left denominator
/// monomial t^e over the inverted directions, times a PBW numerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedElement<K: Scalar> {
    chart: Chart,
    inverted: BTreeSet<usize>,
    /// denominator exponent per log direction (1-based j at j−1)
    den: Vec<u32>,
    num: OpElement<K>,
}

impl<K: Scalar> LocalizedElement<K> {
    /// Embeds an operator into the localization.
    pub fn localize(a: &OpElement<K>, invert: impl IntoIterator<Item = usize>) -> Result<Self> {
        let chart = a.chart().clone();
        let inverted: BTreeSet<usize> = invert.into_iter().collect();
        for &j in &inverted {
            if j == 0 || j > chart.n_log() {
                return Err(Error::UnknownGenerator(format!("t{}", j)));
            }
            if chart.is_idealized(j) {
                return Err(Error::InvertIdealized(j));
            }
        }
        Ok(LocalizedElement {
            den: vec![0; chart.n_log()],
            num: a.clone(),
            chart,
            inverted,
        }
        .reduced())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn numerator(&self) -> &OpElement<K> {
        &self.num
    }

    pub fn denominator(&self) -> &[u32] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduced(mut self) -> Self {
        if self.num.is_zero() {
            self.den = vec![0; self.chart.n_log()];
            return self;
        }
        for j in 1..=self.chart.n_log() {
            let e = self.den[j - 1];
            if e == 0 {
                continue;
            }
            let v = self.chart.var_t(j);
            let min = self
                .num
                .terms()
                .map(|(m, _)| m.0[v])
                .min()
                .unwrap_or(0);
            let cut = e.min(min);
            if cut > 0 {
                self.den[j - 1] -= cut;
                self.num = OpElement::from_terms(
                    &self.chart,
                    self.num.terms().map(|(m, c)| {
                        let mut mm = m.0.clone();
                        mm[v] -= cut;
                        (Mono(mm), c.clone())
                    }),
                );
            }
        }
        self
    }

    /// a · t^{-e} as a localized element: t^{-e}·(θ-shifted a). The support
    /// of `e` is added to the inverted set.
    pub fn mul_den(a: &OpElement<K>, e: &[u32], invert: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut inv: BTreeSet<usize> = invert.into_iter().collect();
        for (j, &ej) in e.iter().enumerate() {
            if ej > 0 {
                inv.insert(j + 1);
            }
        }
        let mut loc = Self::localize(a, inv)?;
        let shifts: Vec<i64> = e.iter().map(|&ej| -(ej as i64)).collect();
        loc.num = loc.num.theta_shift(&shifts);
        for (j, &ej) in e.iter().enumerate() {
            loc.den[j] += ej;
        }
        Ok(loc.reduced())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let inverted: BTreeSet<usize> =
            self.inverted.union(&other.inverted).copied().collect();
        let r = self.chart.n_log();
        let mut den = vec![0u32; r];
        for j in 0..r {
            den[j] = self.den[j].max(other.den[j]);
        }
        let lift = |x: &Self, den: &[u32]| {
            let mut m = vec![0u32; x.chart.nvars()];
            for j in 1..=r {
                m[x.chart.var_t(j)] = den[j - 1] - x.den[j - 1];
            }
            OpElement::from_mono(&x.chart, Mono(m))
                .mul(&x.num)
                .expect("same chart")
        };
        let num = lift(self, &den).add(&lift(other, &den));
        Ok(LocalizedElement {
            chart: self.chart.clone(),
            inverted,
            den,
            num,
        }
        .reduced())
    }

    /// (t^{-e} p)(t^{-f} q) = t^{-(e+f)} · θshift_{-f}(p) · q.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let inverted: BTreeSet<usize> =
            self.inverted.union(&other.inverted).copied().collect();
        let shifts: Vec<i64> = other.den.iter().map(|&f| -(f as i64)).collect();
        let p = self.num.theta_shift(&shifts);
        let num = p.mul(&other.num)?;
        let den: Vec<u32> = self
            .den
            .iter()
            .zip(&other.den)
            .map(|(a, b)| a + b)
            .collect();
        Ok(LocalizedElement {
            chart: self.chart.clone(),
            inverted,
            den,
            num,
        }
        .reduced())
    }

    pub fn display(&self) -> String {
        let mut den_parts = Vec::new();
        for (j, &e) in self.den.iter().enumerate() {
            if e == 1 {
                den_parts.push(format!("t{}", j + 1));
            } else if e > 1 {
                den_parts.push(format!("t{}^{}", j + 1, e));
            }
        }
        if den_parts.is_empty() {
            self.num.display()
        } else {
            format!("({})^-1 * ({})", den_parts.join("*"), self.num.display())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn ll() -> Chart {
        Chart::new(0, 1, []).unwrap()
    }

    fn pt() -> Chart {
        Chart::new(0, 1, [1]).unwrap()
    }

    fn lp() -> Chart {
        Chart::new(0, 2, []).unwrap()
    }

    fn a1() -> Chart {
        Chart::new(1, 0, []).unwrap()
    }

    type Op = OpElement<Rat>;

    #[test]
    fn normal_form_theta_t() {
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        let p = th.mul(&t).unwrap();
        assert_eq!(p.display(), "t1*th1 + t1");
    }

    #[test]
    fn normal_form_d_x() {
        let c = a1();
        let d = Op::d(&c, 1).unwrap();
        let x = Op::x(&c, 1).unwrap();
        let p = d.mul(&x).unwrap();
        assert_eq!(p.display(), "x1*d1 + 1");
    }

    #[test]
    fn idealized_reduction() {
        let c = pt();
        let t = Op::t(&c, 1).unwrap();
        let th = Op::th(&c, 1).unwrap();
        assert!(t.is_zero());
        assert!(t.mul(&th).unwrap().is_zero());
        assert!(th.mul(&t).unwrap().is_zero());
    }

    #[test]
    fn multiply_theta_sq_t() {
        // θ² t = tθ² + 2tθ + t
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        let p = th.pow(2).unwrap().mul(&t).unwrap();
        assert_eq!(p.display(), "t1*th1^2 + 2*t1*th1 + t1");
    }

    #[test]
    fn multiply_lp_sum() {
        // (θ1+θ2)(t1−t2) = (t1−t2)(θ1+θ2) + (t1−t2)
        let c = lp();
        let th = Op::th(&c, 1).unwrap().add(&Op::th(&c, 2).unwrap());
        let t = Op::t(&c, 1).unwrap().sub(&Op::t(&c, 2).unwrap());
        let lhs = th.mul(&t).unwrap();
        let rhs = t.mul(&th).unwrap().add(&t);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiply_already_normal() {
        let c = a1();
        let x = Op::x(&c, 1).unwrap();
        let d = Op::d(&c, 1).unwrap();
        assert_eq!(x.mul(&d).unwrap().display(), "x1*d1");
    }

    #[test]
    fn associativity_spot_checks() {
        let c = Chart::new(1, 1, []).unwrap();
        let gens = [
            Op::x(&c, 1).unwrap(),
            Op::t(&c, 1).unwrap(),
            Op::d(&c, 1).unwrap(),
            Op::th(&c, 1).unwrap(),
        ];
        for a in &gens {
            for b in &gens {
                for cc in &gens {
                    let l = a.mul(b).unwrap().mul(cc).unwrap();
                    let r = a.mul(&b.mul(cc).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn leibniz_higher_order() {
        // ∂² x² = x²∂² + 4x∂ + 2
        let c = a1();
        let d = Op::d(&c, 1).unwrap();
        let x = Op::x(&c, 1).unwrap();
        let p = d.pow(2).unwrap().mul(&x.pow(2).unwrap()).unwrap();
        assert_eq!(p.display(), "x1^2*d1^2 + 4*x1*d1 + 2");
    }

    #[test]
    fn ord_subadditive() {
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        let a = th.pow(2).unwrap().add(&t);
        let b = th.mul(&t).unwrap();
        let ab = a.mul(&b).unwrap();
        assert!(ab.ord().unwrap() <= a.ord().unwrap() + b.ord().unwrap());
        assert_eq!(a.ord(), Some(2));
    }

    #[test]
    fn transpose_generators() {
        let c = Chart::new(1, 1, []).unwrap();
        let d = Op::d(&c, 1).unwrap();
        assert_eq!(d.transpose(), d.neg());
        let x = Op::x(&c, 1).unwrap();
        let th = Op::th(&c, 1).unwrap();
        // x and θ commute: transpose(xθ) = (−θ)(x) = −xθ
        let p = x.mul(&th).unwrap();
        assert_eq!(p.transpose(), p.neg());
    }

    #[test]
    fn transpose_anti_homomorphism() {
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        // transpose(θt) = transpose(t)·transpose(θ) = t·(−θ) = −tθ
        let p = th.mul(&t).unwrap();
        assert_eq!(p.transpose(), t.mul(&th).unwrap().neg());
        // general anti-homomorphism property on a sample
        let a = th.pow(2).unwrap().add(&t);
        let b = th.mul(&t).unwrap().add(&Op::one(&c));
        let lhs = a.mul(&b).unwrap().transpose();
        let rhs = b.transpose().mul(&a.transpose()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn transpose_involution_and_symbol() {
        let c = Chart::new(1, 1, []).unwrap();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        let x = Op::x(&c, 1).unwrap();
        let d = Op::d(&c, 1).unwrap();
        let a = th
            .mul(&t)
            .unwrap()
            .add(&d.mul(&x).unwrap())
            .add(&x.mul(&th).unwrap());
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().ord(), a.ord());
        // symbol(transpose) = (−1)^ord · symbol
        let sign = if a.ord().unwrap() % 2 == 0 {
            Rat::from_int(1)
        } else {
            Rat::from_int(-1)
        };
        assert_eq!(a.transpose().symbol(), a.symbol().scale(&sign));
    }

    #[test]
    fn twist_fixtures() {
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        assert_eq!(th.twist(1).display(), "th1 + 1");
        let cpt = pt();
        let thp = Op::th(&cpt, 1).unwrap();
        assert_eq!(thp.twist(1), thp);
        // twist is multiplicative: twist(tθ) = t(θ+1)
        let t = Op::t(&c, 1).unwrap();
        let p = t.mul(&th).unwrap();
        assert_eq!(
            p.twist(1),
            t.mul(&th.add(&Op::one(&c))).unwrap()
        );
        // twist(+1) ∘ twist(−1) = id
        assert_eq!(p.twist(1).twist(-1), p);
    }

    #[test]
    fn localization_basics() {
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        // θ t^{-1} = t^{-1}(θ − 1)
        let l = LocalizedElement::mul_den(&th, &[1], [1]).unwrap();
        assert_eq!(l.display(), "(t1)^-1 * (th1 - 1)");
        // t · t^{-1} = 1
        let l = LocalizedElement::mul_den(&t, &[1], [1]).unwrap();
        assert_eq!(l.display(), "1");
        // ∂ t^{-1} = t^{-1} ∂ (commuting directions)
        let c2 = Chart::new(1, 1, []).unwrap();
        let d = Op::d(&c2, 1).unwrap();
        let l = LocalizedElement::mul_den(&d, &[1], [1]).unwrap();
        assert_eq!(l.display(), "(t1)^-1 * (d1)");
    }

    #[test]
    fn localization_ring_map_and_product() {
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        // embedding is a ring map: loc(θ)·loc(t) = loc(θt)
        let a = LocalizedElement::localize(&th, [1]).unwrap();
        let b = LocalizedElement::localize(&t, [1]).unwrap();
        let prod = a.mul(&b).unwrap();
        let direct = LocalizedElement::localize(&th.mul(&t).unwrap(), [1]).unwrap();
        assert_eq!(prod, direct);
        // t^{-1}θ · t^{-1}θ = t^{-2}(θ−1)θ
        let l = LocalizedElement::mul_den(&th, &[0], [1]).unwrap();
        let tinv_th = LocalizedElement {
            chart: c.clone(),
            inverted: BTreeSet::from([1]),
            den: vec![1],
            num: th.clone(),
        };
        let sq = tinv_th.mul(&tinv_th).unwrap();
        let expect = th.sub(&Op::one(&c)).mul(&th).unwrap();
        assert_eq!(sq.den, vec![2]);
        assert_eq!(sq.num, expect);
        drop(l);
    }

    #[test]
    fn cannot_invert_idealized() {
        let c = pt();
        let th = Op::th(&c, 1).unwrap();
        assert!(matches!(
            LocalizedElement::localize(&th, [1]),
            Err(Error::InvertIdealized(1))
        ));
    }

    #[test]
    fn normal_form_expression_trees() {
        let c = ll();
        // th1*t1 + 2 → t1 th1 + t1 + 2
        let e = OpExpr::Add(
            Box::new(OpExpr::Mul(
                Box::new(OpExpr::Th(1)),
                Box::new(OpExpr::T(1)),
            )),
            Box::new(OpExpr::Int(2)),
        );
        let p: Op = normal_form(&c, &e).unwrap();
        assert_eq!(p.display(), "t1*th1 + t1 + 2");
        // d1*x1 − x1*d1 = 1 on the classical line
        let ca = a1();
        let e = OpExpr::Sub(
            Box::new(OpExpr::Mul(Box::new(OpExpr::D(1)), Box::new(OpExpr::X(1)))),
            Box::new(OpExpr::Mul(Box::new(OpExpr::X(1)), Box::new(OpExpr::D(1)))),
        );
        let p: Op = normal_form(&ca, &e).unwrap();
        assert_eq!(p.display(), "1");
        // t1^2 on the log point is zero
        let e = OpExpr::Pow(Box::new(OpExpr::T(1)), 2);
        let p: Op = normal_form(&pt(), &e).unwrap();
        assert!(p.is_zero());
        // unknown generator
        let e = OpExpr::X(1);
        assert!(normal_form::<Rat>(&c, &e).is_err());
    }

    #[test]
    fn chart_mismatch_rejected() {
        let a = Op::th(&ll(), 1).unwrap();
        let b = Op::th(&lp(), 1).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::ChartMismatch)));
    }
}
