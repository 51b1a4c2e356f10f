//! Commutative toolkit over the cotangent coordinate ring k[x, t, ξ, τ]:
//! Buchberger Gröbner bases for ideals and submodules of free modules,
//! elimination, Krull dimension, radical membership, and minimal primes of
//! squarefree monomial ideals.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::mono::{ModMono, ModOrder, Mono, TermOrder};
use crate::scalar::Scalar;

/// A commutative polynomial over a fixed variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CPoly<K: Scalar> {
    nvars: usize,
    terms: BTreeMap<Mono, K>,
}

impl<K: Scalar> CPoly<K> {
    pub fn zero(nvars: usize) -> Self {
        CPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::one(nvars), c);
        }
        p
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        Self::term(Mono::var(nvars, v), K::one())
    }

    pub fn term(m: Mono, c: K) -> Self {
        let mut p = Self::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Mono, K)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
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

    pub fn add_term(&mut self, m: Mono, c: K) {
        if c.is_zero() {
            return;
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
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(mm, c)| (mm.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            for (m2, c2) in &other.terms {
                p.add_term(m.mul(m2), c.clone() * c2.clone());
            }
        }
        p
    }

    pub fn leading(&self, order: &TermOrder) -> Option<(&Mono, &K)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (m, c))
    }

    /// True when every monomial is supported in the masked variables.
    pub fn supported_in(&self, mask: &[bool]) -> bool {
        self.terms.keys().all(|m| m.supported_in(mask))
    }

    /// Drops every monomial with positive exponent on a masked variable.
    pub fn reduce_mod_vars(&self, kill: &[bool]) -> Self {
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0.iter().zip(kill).all(|(&d, &k)| d == 0 || !k))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Extends the variable list by `extra` fresh trailing variables.
    pub fn lift(&self, extra: usize) -> Self {
        CPoly {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.extend(std::iter::repeat(0).take(extra));
                    (Mono(e), c.clone())
                })
                .collect(),
        }
    }

    /// Total-degree substitution t_v := 0 is `reduce_mod_vars`; this maps the
    /// polynomial onto its single nonzero monomial, if any (used to validate
    /// squarefree-monomial ideals).
    pub fn as_monomial(&self) -> Option<(&Mono, &K)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn display(&self, chart: &Chart) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let order = TermOrder::DegRevLex;
        let mut ms: Vec<&Mono> = self.terms.keys().collect();
        ms.sort_by(|a, b| order.cmp(b, a));
        let mut out = String::new();
        for (i, m) in ms.iter().enumerate() {
            let c = &self.terms[*m];
            let (sign, mag) = coeff_parts(c);
            if i == 0 {
                if sign {
                    out.push('-');
                }
            } else if sign {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&term_string(chart, m, &mag));
        }
        out
    }
}

fn coeff_parts<K: Scalar>(c: &K) -> (bool, String) {
    let s = format!("{}", c);
    match s.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, s),
    }
}

fn term_string<K: std::fmt::Display>(chart: &Chart, m: &Mono, mag: &K) -> String {
    let mut parts = Vec::new();
    let mag = format!("{}", mag);
    if m.is_one() {
        return mag;
    }
    if mag != "1" {
        parts.push(mag);
    }
    for (v, &d) in m.0.iter().enumerate() {
        if d == 0 {
            continue;
        }
        if d == 1 {
            parts.push(chart.var_name(v));
        } else {
            parts.push(format!("{}^{}", chart.var_name(v), d));
        }
    }
    parts.join("*")
}

/// A vector in a free module R^rank over the commutative ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CVec<K: Scalar> {
    rank: usize,
    nvars: usize,
    terms: BTreeMap<ModMono, K>,
}

impl<K: Scalar> CVec<K> {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        CVec {
            rank,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(rank: usize, comp: usize, p: &CPoly<K>) -> Self {
        let mut v = Self::zero(rank, p.nvars());
        for (m, c) in p.terms() {
            v.terms.insert((comp, m.clone()), c.clone());
        }
        v
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModMono, &K)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mm: ModMono, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&mm) {
            None => {
                self.terms.insert(mm, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(mm, s);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.clone();
        for (mm, c) in &other.terms {
            v.add_term(mm.clone(), c.clone());
        }
        v
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank, self.nvars);
        }
        CVec {
            rank: self.rank,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(mm, k)| (mm.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        CVec {
            rank: self.rank,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|((c0, mm), k)| ((*c0, mm.mul(m)), k.clone()))
                .collect(),
        }
    }

    pub fn leading(&self, order: &ModOrder) -> Option<(&ModMono, &K)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (m, c))
    }

    /// The polynomial in one component.
    pub fn component(&self, comp: usize) -> CPoly<K> {
        CPoly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .filter(|((c0, _), _)| *c0 == comp)
                .map(|((_, m), c)| (m.clone(), c.clone())),
        )
    }

    pub fn components_present(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|(c, _)| *c).collect()
    }

    /// Canonical primitive rescaling of the coefficient row.
    pub fn primitive(mut self) -> Self {
        let keys: Vec<ModMono> = self.terms.keys().cloned().collect();
        let mut coeffs: Vec<K> = keys.iter().map(|k| self.terms[k].clone()).collect();
        K::normalize_row(&mut coeffs);
        for (k, c) in keys.into_iter().zip(coeffs) {
            self.terms.insert(k, c);
        }
        self
    }
}

/// Fully reduces `v` against `basis`; returns the remainder.
pub fn module_reduce<K: Scalar>(v: &CVec<K>, basis: &[CVec<K>], order: &ModOrder) -> CVec<K> {
    let mut rem = CVec::zero(v.rank, v.nvars);
    let mut work = v.clone();
    'outer: while let Some((lm, lc)) = work.leading(order).map(|(m, c)| (m.clone(), c.clone())) {
        for b in basis {
            if let Some((bm, bc)) = b.leading(order) {
                if bm.0 == lm.0 && bm.1.divides(&lm.1) {
                    let q = bm.1.div_into(&lm.1);
                    let f = lc.clone() / bc.clone();
                    work = work.add(&b.mul_mono(&q).scale(&(-f)));
                    continue 'outer;
                }
            }
        }
        // leading term irreducible: move it to the remainder
        work.terms.remove(&lm);
        rem.add_term(lm, lc);
    }
    rem
}

/// Buchberger for submodules of free modules. Returns the reduced Gröbner
/// basis: monic, fully inter-reduced, sorted by leading monomial.
pub fn module_gb<K: Scalar>(gens: &[CVec<K>], order: &ModOrder) -> Vec<CVec<K>> {
    let mut basis: Vec<CVec<K>> = Vec::new();
    for g in gens {
        let r = module_reduce(g, &basis, order);
        if !r.is_zero() {
            basis.push(r.primitive());
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let add_pairs = |pairs: &mut Vec<(usize, usize)>, k: usize| {
        for i in 0..k {
            pairs.push((i, k));
        }
    };
    for k in 0..basis.len() {
        add_pairs(&mut pairs, k);
    }
    while let Some(pos) = select_pair(&basis, &pairs, order) {
        let (i, j) = pairs.swap_remove(pos);
        let s = match s_vector(&basis[i], &basis[j], order) {
            None => continue,
            Some(s) => s,
        };
        let r = module_reduce(&s, &basis, order);
        if !r.is_zero() {
            basis.push(r.primitive());
            let k = basis.len() - 1;
            add_pairs(&mut pairs, k);
        }
    }
    inter_reduce(basis, order)
}

fn monic<K: Scalar>(v: CVec<K>, order: &ModOrder) -> CVec<K> {
    let lc = v.leading(order).map(|(_, c)| c.clone());
    match lc {
        None => v,
        Some(c) => v.scale(&(K::one() / c)),
    }
}

fn select_pair<K: Scalar>(
    basis: &[CVec<K>],
    pairs: &[(usize, usize)],
    order: &ModOrder,
) -> Option<usize> {
    // normal strategy: smallest lcm first, ties by indices
    let mut best: Option<(usize, ModMono)> = None;
    for (pos, &(i, j)) in pairs.iter().enumerate() {
        let (mi, _) = basis[i].leading(order)?;
        let (mj, _) = basis[j].leading(order)?;
        if mi.0 != mj.0 {
            continue;
        }
        let l = (mi.0, mi.1.lcm(&mj.1));
        match &best {
            None => best = Some((pos, l)),
            Some((_, bl)) => {
                if order.cmp(&l, bl) == std::cmp::Ordering::Less {
                    best = Some((pos, l));
                }
            }
        }
    }
    match best {
        Some((pos, _)) => Some(pos),
        None => {
            if pairs.is_empty() {
                None
            } else {
                // remaining pairs have mismatched components; discard them
                Some(0)
            }
        }
    }
}

fn s_vector<K: Scalar>(a: &CVec<K>, b: &CVec<K>, order: &ModOrder) -> Option<CVec<K>> {
    let (ma, ca) = a.leading(order)?;
    let (mb, cb) = b.leading(order)?;
    if ma.0 != mb.0 {
        return None;
    }
    // product criterion (commutative case)
    let l = ma.1.lcm(&mb.1);
    if l == ma.1.mul(&mb.1) && !ma.1.is_one() && !mb.1.is_one() {
        return None;
    }
    let qa = ma.1.div_into(&l);
    let qb = mb.1.div_into(&l);
    let ca = ca.clone();
    let cb = cb.clone();
    Some(
        a.mul_mono(&qa)
            .scale(&(K::one() / ca))
            .add(&b.mul_mono(&qb).scale(&(-(K::one() / cb)))),
    )
}

fn inter_reduce<K: Scalar>(mut basis: Vec<CVec<K>>, order: &ModOrder) -> Vec<CVec<K>> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            let v = basis.remove(i);
            let r = module_reduce(&v, &basis, order);
            if r.is_zero() {
                changed = true;
                continue;
            }
            let r = r.primitive();
            if r != v {
                changed = true;
            }
            basis.insert(i, r);
            i += 1;
        }
        if !changed {
            break;
        }
    }
    let mut basis: Vec<CVec<K>> = basis.into_iter().map(|v| monic(v, order)).collect();
    basis.sort_by(|a, b| {
        let la = a.leading(order).map(|(m, _)| m.clone());
        let lb = b.leading(order).map(|(m, _)| m.clone());
        match (la, lb) {
            (Some(x), Some(y)) => order.cmp(&x, &y),
            _ => std::cmp::Ordering::Equal,
        }
    });
    basis
}

// --- ideal layer ---

fn ideal_order(order: &TermOrder) -> ModOrder {
    ModOrder::Pot(order.clone())
}

fn poly_to_vec<K: Scalar>(p: &CPoly<K>) -> CVec<K> {
    CVec::from_poly(1, 0, p)
}

fn vec_to_poly<K: Scalar>(v: &CVec<K>) -> CPoly<K> {
    v.component(0)
}

/// Reduced Gröbner basis of an ideal given by raw generators.
pub fn poly_gb<K: Scalar>(gens: &[CPoly<K>], order: &TermOrder) -> Vec<CPoly<K>> {
    let vecs: Vec<CVec<K>> = gens.iter().map(poly_to_vec).collect();
    module_gb(&vecs, &ideal_order(order))
        .iter()
        .map(vec_to_poly)
        .collect()
}

pub fn poly_reduce<K: Scalar>(p: &CPoly<K>, basis: &[CPoly<K>], order: &TermOrder) -> CPoly<K> {
    let vecs: Vec<CVec<K>> = basis.iter().map(poly_to_vec).collect();
    vec_to_poly(&module_reduce(&poly_to_vec(p), &vecs, &ideal_order(order)))
}

/// An ideal of the cotangent coordinate ring of a chart. The idealized
/// directions' coordinates t_j, j ∈ S, are always among the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommIdeal<K: Scalar> {
    chart: Chart,
    gens: Vec<CPoly<K>>,
}

impl<K: Scalar> CommIdeal<K> {
    pub fn new(chart: Chart, gens: Vec<CPoly<K>>) -> Result<Self> {
        for g in &gens {
            if g.nvars() != chart.nvars() {
                return Err(Error::WrongVariableSet {
                    expected: chart.nvars(),
                    got: g.nvars(),
                });
            }
        }
        let mut ideal = CommIdeal {
            chart,
            gens: Vec::new(),
        };
        for g in gens {
            ideal.push_normalized(g);
        }
        ideal.canonicalize();
        Ok(ideal)
    }

    fn kill_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.chart.nvars()];
        for &j in self.chart.idealized() {
            mask[self.chart.var_t(j)] = true;
        }
        mask
    }

    fn push_normalized(&mut self, g: CPoly<K>) {
        let g = g.reduce_mod_vars(&self.kill_mask());
        if !g.is_zero() {
            self.gens.push(g);
        }
    }

    fn canonicalize(&mut self) {
        for &j in self.chart.idealized().clone().iter() {
            self.gens
                .push(CPoly::var(self.chart.nvars(), self.chart.var_t(j)));
        }
        self.gens.sort_by(|a, b| {
            let ka: Vec<_> = a.terms().map(|(m, _)| m.clone()).collect();
            let kb: Vec<_> = b.terms().map(|(m, _)| m.clone()).collect();
            ka.cmp(&kb)
        });
        self.gens.dedup();
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn generators(&self) -> &[CPoly<K>] {
        &self.gens
    }

    pub fn add_generator(&mut self, g: CPoly<K>) {
        self.push_normalized(g);
        self.canonicalize();
    }

    /// Reduced Gröbner basis, degrevlex by default.
    pub fn gb(&self) -> Vec<CPoly<K>> {
        poly_gb(&self.gens, &TermOrder::DegRevLex)
    }

    pub fn gb_with(&self, order: &TermOrder) -> Vec<CPoly<K>> {
        poly_gb(&self.gens, order)
    }

    /// True when 1 ∈ I.
    pub fn is_trivial(&self) -> bool {
        self.gb()
            .iter()
            .any(|g| g.leading(&TermOrder::DegRevLex).map_or(false, |(m, _)| m.is_one()))
    }

    /// Krull dimension of V(I), or None when V(I) = ∅.
    pub fn krull_dim(&self) -> Option<usize> {
        let gb = self.gb();
        if gb
            .iter()
            .any(|g| g.leading(&TermOrder::DegRevLex).map_or(false, |(m, _)| m.is_one()))
        {
            return None;
        }
        let supports: Vec<Vec<usize>> = gb
            .iter()
            .filter_map(|g| g.leading(&TermOrder::DegRevLex).map(|(m, _)| m.support()))
            .collect();
        Some(max_independent_set(self.chart.nvars(), &supports))
    }

    /// True iff f vanishes on V(I) (Rabinowitsch trick).
    pub fn contains_radical(&self, f: &CPoly<K>) -> bool {
        if f.is_zero() {
            return true;
        }
        let n = self.chart.nvars();
        let mut gens: Vec<CPoly<K>> = self.gens.iter().map(|g| g.lift(1)).collect();
        let y = CPoly::var(n + 1, n);
        gens.push(CPoly::constant(n + 1, K::one()).sub(&y.mul(&f.lift(1))));
        let gb = poly_gb(&gens, &TermOrder::DegRevLex);
        gb.iter()
            .any(|g| g.leading(&TermOrder::DegRevLex).map_or(false, |(m, _)| m.is_one()))
    }

    /// I ∩ k[keep] via a block order; `keep` is a variable mask.
    pub fn eliminate(&self, keep: &[bool]) -> CommIdeal<K> {
        let elim: Vec<bool> = keep.iter().map(|&k| !k).collect();
        let gb = poly_gb(&self.gens, &TermOrder::Elim(elim));
        let kept: Vec<CPoly<K>> = gb
            .into_iter()
            .filter(|g| g.supported_in(keep))
            .collect();
        CommIdeal::new(self.chart.clone(), kept).expect("same chart")
    }

    /// Minimal primes of a squarefree monomial ideal in the t-coordinates,
    /// as sets of log direction indices.
    pub fn minimal_primes_sqfree(&self) -> Result<Vec<BTreeSet<usize>>> {
        let mut t_mask = vec![false; self.chart.nvars()];
        for j in 1..=self.chart.n_log() {
            t_mask[self.chart.var_t(j)] = true;
        }
        let mut edges: Vec<Vec<usize>> = Vec::new();
        for g in &self.gens {
            let (m, _) = g.as_monomial().ok_or(Error::NotSquarefreeMonomial)?;
            if !m.is_squarefree() || !m.supported_in(&t_mask) || m.is_one() {
                return Err(Error::NotSquarefreeMonomial);
            }
            edges.push(
                m.support()
                    .into_iter()
                    .map(|v| v - self.chart.n_free() + 1)
                    .collect(),
            );
        }
        let mut covers = Vec::new();
        minimal_hitting_sets(&edges, &mut BTreeSet::new(), &mut covers);
        // keep only the inclusion-minimal covers, deterministically sorted
        let mut minimal: Vec<BTreeSet<usize>> = Vec::new();
        covers.sort_by_key(|c| (c.len(), c.iter().copied().collect::<Vec<_>>()));
        for c in covers {
            if !minimal.iter().any(|m| m.is_subset(&c)) {
                minimal.push(c);
            }
        }
        Ok(minimal)
    }

    /// Radical containment: V(self) ⊇ V(other) iff every generator of self
    /// vanishes on V(other).
    pub fn variety_contained_in(&self, other: &CommIdeal<K>) -> bool {
        // V(self) ⊆ V(other) iff other's generators vanish on V(self)
        other.gens.iter().all(|g| self.contains_radical(g))
    }

    pub fn equal_radical(&self, other: &CommIdeal<K>) -> bool {
        self.variety_contained_in(other) && other.variety_contained_in(self)
    }

    pub fn display(&self) -> Vec<String> {
        let mut out: Vec<String> = self.gb().iter().map(|g| g.display(&self.chart)).collect();
        out.sort();
        out
    }
}

fn max_independent_set(nvars: usize, supports: &[Vec<usize>]) -> usize {
    // largest U ⊆ vars with no support contained in U
    fn recurse(
        v: usize,
        nvars: usize,
        current: &mut Vec<bool>,
        size: usize,
        supports: &[Vec<usize>],
        best: &mut usize,
    ) {
        if size + (nvars - v) <= *best {
            return;
        }
        if v == nvars {
            *best = (*best).max(size);
            return;
        }
        // try including variable v: allowed unless some leading-term support
        // becomes fully contained in the chosen set
        current[v] = true;
        let ok = !supports.iter().any(|s| s.iter().all(|&w| current[w]));
        if ok {
            recurse(v + 1, nvars, current, size + 1, supports, best);
        }
        current[v] = false;
        recurse(v + 1, nvars, current, size, supports, best);
    }
    if supports.iter().any(|s| s.is_empty()) {
        return 0;
    }
    let mut best = 0;
    let mut current = vec![false; nvars];
    recurse(0, nvars, &mut current, 0, supports, &mut best);
    best
}

fn minimal_hitting_sets(
    edges: &[Vec<usize>],
    acc: &mut BTreeSet<usize>,
    out: &mut Vec<BTreeSet<usize>>,
) {
    match edges.iter().find(|e| e.iter().all(|v| !acc.contains(v))) {
        None => out.push(acc.clone()),
        Some(edge) => {
            for &v in edge {
                acc.insert(v);
                minimal_hitting_sets(edges, acc, out);
                acc.remove(&v);
            }
        }
    }
}
