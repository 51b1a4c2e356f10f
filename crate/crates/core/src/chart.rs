//! Affine idealized log charts X = 𝔸ⁿ × Spec k[ℕ^r]/⟨t_j : j ∈ S⟩ with their
//! log stratification and log dimension arithmetic.
//!
//! Cotangent coordinates are listed x_1..x_n, t_1..t_r, ξ_1..ξ_n, τ_1..τ_r;
//! all exponent vectors in the engine use this indexing.

use std::collections::BTreeSet;

use crate::comalg::CommIdeal;
use crate::error::{Error, Result};
use crate::mono::Mono;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chart {
    n_free: usize,
    n_log: usize,
    /// 1-based indices of the idealized log directions.
    idealized: BTreeSet<usize>,
}

impl Chart {
    pub fn new(n_free: usize, n_log: usize, idealized: impl IntoIterator<Item = usize>) -> Result<Chart> {
        let idealized: BTreeSet<usize> = idealized.into_iter().collect();
        for &j in &idealized {
            if j == 0 || j > n_log {
                return Err(Error::IdealizedOutOfRange(j, n_log));
            }
        }
        Ok(Chart {
            n_free,
            n_log,
            idealized,
        })
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn n_log(&self) -> usize {
        self.n_log
    }

    pub fn idealized(&self) -> &BTreeSet<usize> {
        &self.idealized
    }

    pub fn is_idealized(&self, j: usize) -> bool {
        self.idealized.contains(&j)
    }

    /// dim X = n + r − |S|.
    pub fn dim(&self) -> usize {
        self.n_free + self.n_log - self.idealized.len()
    }

    /// logdim X = n + r.
    pub fn logdim(&self) -> usize {
        self.n_free + self.n_log
    }

    /// Generic rank r_X = |S|.
    pub fn generic_rank(&self) -> usize {
        self.idealized.len()
    }

    /// Number of non-idealized log directions; the stratification depth.
    pub fn depth(&self) -> usize {
        self.n_log - self.idealized.len()
    }

    pub fn non_idealized(&self) -> Vec<usize> {
        (1..=self.n_log).filter(|j| !self.is_idealized(*j)).collect()
    }

    // --- cotangent variable indexing ---

    pub fn nvars(&self) -> usize {
        2 * (self.n_free + self.n_log)
    }

    pub fn var_x(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n_free);
        i - 1
    }

    pub fn var_t(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.n_log);
        self.n_free + j - 1
    }

    pub fn var_xi(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n_free);
        self.n_free + self.n_log + i - 1
    }

    pub fn var_tau(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.n_log);
        2 * self.n_free + self.n_log + j - 1
    }

    pub fn var_name(&self, v: usize) -> String {
        let n = self.n_free;
        let r = self.n_log;
        if v < n {
            format!("x{}", v + 1)
        } else if v < n + r {
            format!("t{}", v - n + 1)
        } else if v < 2 * n + r {
            format!("xi{}", v - n - r + 1)
        } else {
            format!("tau{}", v - 2 * n - r + 1)
        }
    }

    /// Mask selecting the base variables x, t.
    pub fn base_mask(&self) -> Vec<bool> {
        let nr = self.n_free + self.n_log;
        (0..self.nvars()).map(|v| v < nr).collect()
    }

    /// Mask selecting the fiber variables ξ, τ (the order-filtration weight).
    pub fn fiber_mask(&self) -> Vec<bool> {
        let nr = self.n_free + self.n_log;
        (0..self.nvars()).map(|v| v >= nr).collect()
    }

    // --- stratification ---

    /// All stratum components of codimension k: subsets T of the
    /// non-idealized log directions with |T| = k. For k ≤ 0 the single empty
    /// component; empty list when k exceeds the depth.
    pub fn strata_components(&self, k: isize) -> Vec<StratumComponent> {
        if k <= 0 {
            return vec![StratumComponent {
                vanishing: BTreeSet::new(),
            }];
        }
        let k = k as usize;
        let free = self.non_idealized();
        if k > free.len() {
            return vec![];
        }
        let mut out = Vec::new();
        subsets_of_size(&free, k, &mut Vec::new(), &mut out);
        out.sort();
        out.into_iter()
            .map(|v| StratumComponent {
                vanishing: v.into_iter().collect(),
            })
            .collect()
    }

    /// The chart of the closed stratum component: same coordinates, with the
    /// vanishing directions added to the idealized set.
    pub fn stratum_chart(&self, comp: &StratumComponent) -> Result<Chart> {
        for &j in &comp.vanishing {
            if j == 0 || j > self.n_log || self.is_idealized(j) {
                return Err(Error::BadStratumComponent);
            }
        }
        let mut idealized = self.idealized.clone();
        idealized.extend(comp.vanishing.iter().copied());
        Ok(Chart {
            n_free: self.n_free,
            n_log: self.n_log,
            idealized,
        })
    }

    /// Generators of the ideal of X^k in the t-coordinates: the squarefree
    /// monomials of degree depth − k + 1 in the non-idealized directions.
    pub fn stratum_ideal_monomials(&self, k: usize) -> Vec<Mono> {
        let free = self.non_idealized();
        if k == 0 {
            // X^0 = X: zero ideal
            return vec![];
        }
        if k > free.len() {
            // X^k = ∅
            return vec![Mono::one(self.nvars())];
        }
        let d = free.len() - k + 1;
        let mut sets = Vec::new();
        subsets_of_size(&free, d, &mut Vec::new(), &mut sets);
        sets.sort();
        sets.into_iter()
            .map(|s| {
                let mut e = vec![0u32; self.nvars()];
                for j in s {
                    e[self.var_t(j)] = 1;
                }
                Mono(e)
            })
            .collect()
    }

    /// Log dimension of V(J) ⊆ T*X: max_k (dim(V(J) ∩ π⁻¹X^k) + k) + r_X,
    /// or None when V(J) is empty.
    pub fn logdim_subvariety<K: Scalar>(&self, ideal: &CommIdeal<K>) -> Result<Option<isize>> {
        if ideal.chart() != self {
            return Err(Error::ChartMismatch);
        }
        let mut best: Option<isize> = None;
        for k in 0..=self.depth() {
            for comp in self.strata_components(k as isize) {
                let mut cut = ideal.clone();
                for &j in &comp.vanishing {
                    cut.add_generator(crate::comalg::CPoly::var(self.nvars(), self.var_t(j)));
                }
                if let Some(d) = cut.krull_dim() {
                    let v = d as isize + k as isize;
                    best = Some(best.map_or(v, |b: isize| b.max(v)));
                }
            }
        }
        Ok(best.map(|b| b + self.generic_rank() as isize))
    }
}

fn subsets_of_size(pool: &[usize], k: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if acc.len() == k {
        out.push(acc.clone());
        return;
    }
    let start = acc.last().map_or(0, |&last| {
        pool.iter().position(|&p| p == last).unwrap() + 1
    });
    for i in start..pool.len() {
        acc.push(pool[i]);
        subsets_of_size(pool, k, acc, out);
        acc.pop();
    }
}

/// A component of a log stratum: the vanishing set T of log coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StratumComponent {
    vanishing: BTreeSet<usize>,
}

impl StratumComponent {
    pub fn new(vanishing: impl IntoIterator<Item = usize>) -> StratumComponent {
        StratumComponent {
            vanishing: vanishing.into_iter().collect(),
        }
    }

    pub fn vanishing(&self) -> &BTreeSet<usize> {
        &self.vanishing
    }

    pub fn codim(&self) -> usize {
        self.vanishing.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comalg::CPoly;
    use crate::Rat;

    pub(crate) fn log_line() -> Chart {
        Chart::new(0, 1, []).unwrap()
    }

    pub(crate) fn log_point() -> Chart {
        Chart::new(0, 1, [1]).unwrap()
    }

    pub(crate) fn log_plane() -> Chart {
        Chart::new(0, 2, []).unwrap()
    }

    #[test]
    fn logdim_chart_values() {
        assert_eq!(log_line().logdim(), 1);
        assert_eq!(log_point().logdim(), 1);
        assert_eq!(log_plane().logdim(), 2);
        assert_eq!(log_point().dim(), 0);
        assert_eq!(log_point().generic_rank(), 1);
    }

    #[test]
    fn invalid_idealized_index() {
        assert!(Chart::new(0, 1, [2]).is_err());
        assert!(Chart::new(1, 0, [1]).is_err());
    }

    #[test]
    fn strata_component_lists() {
        assert_eq!(log_line().strata_components(1).len(), 1);
        assert_eq!(log_plane().strata_components(1).len(), 2);
        assert_eq!(log_point().strata_components(1).len(), 0);
        assert_eq!(log_plane().strata_components(0).len(), 1);
        assert_eq!(log_plane().strata_components(-3).len(), 1);
        assert_eq!(log_plane().strata_components(3).len(), 0);
    }

    #[test]
    fn stratum_chart_is_idealized() {
        let c = log_line();
        let comps = c.strata_components(1);
        let sub = c.stratum_chart(&comps[0]).unwrap();
        assert_eq!(sub, log_point());
        assert!(c.stratum_chart(&StratumComponent::new([2])).is_err());
        assert!(log_point().stratum_chart(&StratumComponent::new([1])).is_err());
    }

    #[test]
    fn stratum_ideals() {
        let lp = log_plane();
        // X^1 of the log plane is V(t1 t2)
        let gens = lp.stratum_ideal_monomials(1);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].0, vec![1, 1, 0, 0]);
        // X^2 is the origin V(t1, t2)
        let gens = lp.stratum_ideal_monomials(2);
        assert_eq!(gens.len(), 2);
        // X^3 is empty
        assert_eq!(lp.stratum_ideal_monomials(3), vec![Mono::one(4)]);
    }

    fn ideal(c: &Chart, gens: Vec<CPoly<Rat>>) -> CommIdeal<Rat> {
        CommIdeal::new(c.clone(), gens).unwrap()
    }

    #[test]
    fn logdim_subvariety_log_line_fixtures() {
        let c = log_line();
        let t = CPoly::<Rat>::var(c.nvars(), c.var_t(1));
        let tau = CPoly::<Rat>::var(c.nvars(), c.var_tau(1));
        // the origin of T*X has log dimension 1
        let j = ideal(&c, vec![t.clone(), tau.clone()]);
        assert_eq!(c.logdim_subvariety(&j).unwrap(), Some(1));
        // the fiber over the origin has log dimension 2
        let j = ideal(&c, vec![t.clone()]);
        assert_eq!(c.logdim_subvariety(&j).unwrap(), Some(2));
        // the zero section has log dimension 1
        let j = ideal(&c, vec![tau]);
        assert_eq!(c.logdim_subvariety(&j).unwrap(), Some(1));
        // empty variety
        let j = ideal(&c, vec![CPoly::constant(c.nvars(), Rat::from_int(1))]);
        assert_eq!(c.logdim_subvariety(&j).unwrap(), None);
    }

    #[test]
    fn logdim_subvariety_log_plane_excess() {
        // V(t1 − t2, τ1 + τ2) has Krull dimension 2 but log dimension 3
        let c = log_plane();
        let t1 = CPoly::<Rat>::var(c.nvars(), c.var_t(1));
        let t2 = CPoly::<Rat>::var(c.nvars(), c.var_t(2));
        let tau1 = CPoly::<Rat>::var(c.nvars(), c.var_tau(1));
        let tau2 = CPoly::<Rat>::var(c.nvars(), c.var_tau(2));
        let j = ideal(&c, vec![t1.sub(&t2), tau1.add(&tau2)]);
        assert_eq!(c.logdim_subvariety(&j).unwrap(), Some(3));
    }

    #[test]
    fn whole_cotangent_space_logdim() {
        // V(t_S) = T*X has the log dimension of the cotangent chart, 2(n+r)
        for c in [log_line(), log_point(), log_plane(), Chart::new(1, 1, [1]).unwrap()] {
            let j = ideal(&c, vec![]);
            assert_eq!(
                c.logdim_subvariety(&j).unwrap(),
                Some(2 * (c.logdim() as isize))
            );
            // and the zero section has logdim equal to logdim_chart
            let mut zs = Vec::new();
            for i in 1..=c.n_free() {
                zs.push(CPoly::<Rat>::var(c.nvars(), c.var_xi(i)));
            }
            for j in 1..=c.n_log() {
                zs.push(CPoly::<Rat>::var(c.nvars(), c.var_tau(j)));
            }
            let j = ideal(&c, zs);
            assert_eq!(c.logdim_subvariety(&j).unwrap(), Some(c.logdim() as isize));
        }
    }

    #[test]
    fn logdim_monotone_under_inclusion() {
        let c = log_plane();
        let t1 = CPoly::<Rat>::var(c.nvars(), c.var_t(1));
        let tau1 = CPoly::<Rat>::var(c.nvars(), c.var_tau(1));
        let small = ideal(&c, vec![t1.clone()]);
        let big = ideal(&c, vec![t1, tau1]);
        let d_small = c.logdim_subvariety(&small).unwrap().unwrap();
        let d_big = c.logdim_subvariety(&big).unwrap().unwrap();
        assert!(d_small >= d_big);
    }
}
