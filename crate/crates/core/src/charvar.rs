//! Characteristic varieties, log dimension, holonomicity, support,
//! restriction to strata, and the short-exact-sequence-by-support splitting.
//!
//! The characteristic variety of coker(D^p → D^m) is the support of the
//! associated graded module for the order filtration. It is computed from
//! the principal symbols of an order-compatible Gröbner basis of the
//! relation module: for each generator slot j, the colon ideal
//! (gr N : e_j) cuts out the support of the j-th cyclic piece, and the
//! variety is the union of those pieces. Everything downstream compares
//! varieties up to radical.

use std::collections::BTreeSet;

use crate::chart::{Chart, StratumComponent};
use crate::comalg::{module_gb, CPoly, CVec, CommIdeal};
use crate::error::{Error, Result};
use crate::mono::{ModOrder, Mono, TermOrder};
use crate::ncgb::{
    for_symbols_order, free_resolution, GbConfig, ModulePresentation, OpVec, Side,
};
use crate::scalar::Scalar;

/// A finite union of closed conical pieces V(J) of the log cotangent bundle.
/// No pieces means the empty variety.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharVariety<K: Scalar> {
    chart: Chart,
    pieces: Vec<CommIdeal<K>>,
}

impl<K: Scalar> CharVariety<K> {
    pub fn empty(chart: &Chart) -> Self {
        CharVariety {
            chart: chart.clone(),
            pieces: vec![],
        }
    }

    pub fn from_pieces(chart: &Chart, pieces: Vec<CommIdeal<K>>) -> Self {
        let mut kept: Vec<CommIdeal<K>> = Vec::new();
        for p in pieces {
            if p.is_trivial() {
                continue;
            }
            kept.push(p);
        }
        // canonicalize pieces by their reduced GB and deduplicate
        let mut canon: Vec<(Vec<CPoly<K>>, CommIdeal<K>)> = kept
            .into_iter()
            .map(|p| (p.gb(), p))
            .collect();
        canon.sort_by(|a, b| cmp_gens(&a.0, &b.0));
        canon.dedup_by(|a, b| a.0 == b.0);
        let mut pieces: Vec<CommIdeal<K>> = canon.into_iter().map(|(_, p)| p).collect();
        // drop pieces whose variety is contained in another piece's variety
        let mut keep = vec![true; pieces.len()];
        for i in 0..pieces.len() {
            if !keep[i] {
                continue;
            }
            for j in 0..pieces.len() {
                if i == j || !keep[j] {
                    continue;
                }
                // V(pieces[i]) ⊆ V(pieces[j])?
                if pieces[i].variety_contained_in(&pieces[j]) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut it = keep.iter();
        pieces.retain(|_| *it.next().unwrap());
        CharVariety {
            chart: pieces
                .first()
                .map(|p| p.chart().clone())
                .unwrap_or_else(|| chart.clone()),
            pieces,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn pieces(&self) -> &[CommIdeal<K>] {
        &self.pieces
    }

    pub fn is_empty_variety(&self) -> bool {
        self.pieces.is_empty()
    }

    /// A single ideal with the same radical: the product of the pieces.
    pub fn to_single_ideal(&self) -> CommIdeal<K> {
        let nv = self.chart.nvars();
        if self.pieces.is_empty() {
            return CommIdeal::new(
                self.chart.clone(),
                vec![CPoly::constant(nv, K::one())],
            )
            .expect("chart ideal");
        }
        let mut gens: Vec<CPoly<K>> = vec![CPoly::constant(nv, K::one())];
        for p in &self.pieces {
            let pg: Vec<&CPoly<K>> = p.generators().iter().collect();
            let mut next = Vec::new();
            for g in gens {
                for h in &pg {
                    next.push(g.mul(h));
                }
            }
            gens = next;
            if gens.len() > 4096 {
                break;
            }
        }
        CommIdeal::new(self.chart.clone(), gens).expect("chart ideal")
    }

    /// Krull dimension of the union (max over pieces), None when empty.
    pub fn dim(&self) -> Option<usize> {
        self.pieces.iter().filter_map(|p| p.krull_dim()).max()
    }

    /// Log dimension of the union, None when empty.
    pub fn logdim(&self) -> Result<Option<isize>> {
        let mut best = None;
        for p in &self.pieces {
            if let Some(d) = self.chart.logdim_subvariety(p)? {
                best = Some(best.map_or(d, |b: isize| b.max(d)));
            }
        }
        Ok(best)
    }

    /// Dimension of the intersection with π⁻¹X^k (max over pieces and
    /// stratum components), None when that intersection is empty.
    pub fn dim_restricted(&self, k: usize) -> Option<usize> {
        let mut best = None;
        for comp in self.chart.strata_components(k as isize) {
            for p in &self.pieces {
                let mut cut = p.clone();
                for &j in comp.vanishing() {
                    cut.add_generator(CPoly::var(self.chart.nvars(), self.chart.var_t(j)));
                }
                if k > self.chart.depth() {
                    continue;
                }
                if let Some(d) = cut.krull_dim() {
                    best = Some(best.map_or(d, |b: usize| b.max(d)));
                }
            }
        }
        if k > self.chart.depth() {
            return None;
        }
        best
    }

    /// Log dimension of the restriction to π⁻¹X^k computed inside the chart:
    /// max over i ≥ 0 of dim on X^{k+i} plus (k+i) plus r_X.
    pub fn logdim_restricted(&self, k: usize) -> Option<isize> {
        let mut best = None;
        for i in k..=self.chart.depth() {
            if let Some(d) = self.dim_restricted(i) {
                let v = d as isize + i as isize + self.chart.generic_rank() as isize;
                best = Some(best.map_or(v, |b: isize| b.max(v)));
            }
        }
        best
    }

    /// Restriction to a single stratum component, as a variety over the
    /// component's idealized chart.
    pub fn restrict_to_component(&self, comp: &StratumComponent) -> Result<CharVariety<K>> {
        let sub = self.chart.stratum_chart(comp)?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| CommIdeal::new(sub.clone(), p.generators().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(CharVariety::from_pieces(&sub, pieces))
    }

    /// Does every point of the union lie in V(ideal)?
    pub fn contained_in_ideal_variety(&self, ideal: &CommIdeal<K>) -> bool {
        self.pieces
            .iter()
            .all(|p| ideal.generators().iter().all(|g| p.contains_radical(g)))
    }

    /// Union containment up to radical: self ⊆ other.
    pub fn contained_in(&self, other: &CharVariety<K>) -> bool {
        if self.pieces.is_empty() {
            return true;
        }
        if other.pieces.is_empty() {
            return false;
        }
        // V(J) ⊆ ∪_k V(I_k) iff every product of one generator per I_k
        // vanishes on V(J)
        for p in &self.pieces {
            let mut prods: Vec<CPoly<K>> =
                vec![CPoly::constant(self.chart.nvars(), K::one())];
            for q in &other.pieces {
                let mut next = Vec::new();
                for g in &prods {
                    for h in q.generators() {
                        next.push(g.mul(h));
                    }
                }
                prods = next;
            }
            for f in &prods {
                if !p.contains_radical(f) {
                    return false;
                }
            }
        }
        true
    }

    pub fn equal_radical(&self, other: &CharVariety<K>) -> bool {
        self.contained_in(other) && other.contained_in(self)
    }

    /// The support in the base: every piece eliminated onto the x,t block.
    pub fn support(&self) -> CharVariety<K> {
        let mask = self.chart.base_mask();
        let pieces = self.pieces.iter().map(|p| p.eliminate(&mask)).collect();
        CharVariety::from_pieces(&self.chart, pieces)
    }

    /// supp ⊆ X^k: every degree-(depth−k+1) squarefree monomial generator of
    /// the stratum ideal vanishes on the support.
    pub fn support_contained_in_stratum(&self, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        let supp = self.support();
        if supp.pieces.is_empty() {
            return true;
        }
        if k > self.chart.depth() {
            return false;
        }
        let gens = self.chart.stratum_ideal_monomials(k);
        supp.pieces.iter().all(|p| {
            gens.iter()
                .all(|m| p.contains_radical(&CPoly::term(m.clone(), K::one())))
        })
    }

    pub fn display(&self) -> Vec<Vec<String>> {
        self.pieces.iter().map(|p| p.display()).collect()
    }
}

fn cmp_gens<K: Scalar>(a: &[CPoly<K>], b: &[CPoly<K>]) -> std::cmp::Ordering {
    let ka: Vec<Vec<Mono>> = a
        .iter()
        .map(|p| p.terms().map(|(m, _)| m.clone()).collect())
        .collect();
    let kb: Vec<Vec<Mono>> = b
        .iter()
        .map(|p| p.terms().map(|(m, _)| m.clone()).collect())
        .collect();
    ka.cmp(&kb)
}

/// The characteristic variety of a presented left module.
pub fn char_variety<K: Scalar>(
    m: &ModulePresentation<K>,
    cfg: &GbConfig,
) -> Result<CharVariety<K>> {
    char_variety_with(m, &for_symbols_order(m.chart()), cfg)
}

/// Same, with an explicit order-filtration-compatible module order.
pub fn char_variety_with<K: Scalar>(
    m: &ModulePresentation<K>,
    order: &ModOrder,
    cfg: &GbConfig,
) -> Result<CharVariety<K>> {
    if m.side() != Side::Left {
        return Err(Error::SideOrLocalization);
    }
    let chart = m.chart().clone();
    if m.rank() == 0 {
        return Ok(CharVariety::empty(&chart));
    }
    let gb = m.gb(order, cfg);
    let rank = m.rank();
    // symbols of the GB generate gr N; add the idealized coordinate rows
    // since gr D is the coordinate ring modulo t_S
    let mut sym_rows: Vec<CVec<K>> = gb.iter().map(|v| vector_symbol(&chart, v)).collect();
    for &j in chart.idealized() {
        for c in 0..rank {
            sym_rows.push(CVec::from_poly(
                rank,
                c,
                &CPoly::var(chart.nvars(), chart.var_t(j)),
            ));
        }
    }
    let mut pieces = Vec::new();
    for j in 0..rank {
        let colon = colon_component(&sym_rows, rank, j, &chart);
        pieces.push(CommIdeal::new(chart.clone(), colon)?);
    }
    Ok(CharVariety::from_pieces(&chart, pieces))
}

/// The principal symbol of a module vector: the top order-degree part over
/// all components, as a commutative vector.
fn vector_symbol<K: Scalar>(chart: &Chart, v: &OpVec<K>) -> CVec<K> {
    let mask = chart.fiber_mask();
    let top = v.ord().unwrap_or(0);
    let mut w = CVec::zero(v.rank(), chart.nvars());
    for ((comp, m), c) in v.terms() {
        if m.deg_masked(&mask) == top {
            w.add_term((*comp, m.clone()), c.clone());
        }
    }
    w
}

/// Generators of the colon ideal (span(rows) : e_j) by component elimination.
fn colon_component<K: Scalar>(
    rows: &[CVec<K>],
    rank: usize,
    j: usize,
    _chart: &Chart,
) -> Vec<CPoly<K>> {
    let prio: Vec<usize> = (0..rank).filter(|&c| c != j).chain([j]).collect();
    let order = ModOrder::PotPriority(prio, TermOrder::DegRevLex);
    let gb = module_gb(rows, &order);
    gb.iter()
        .filter(|v| v.components_present() == BTreeSet::from([j]))
        .map(|v| v.component(j))
        .collect()
}

/// The characteristic-variety report of a module.
#[derive(Clone, Debug)]
pub struct ChReport<K: Scalar> {
    pub char_variety: CharVariety<K>,
    pub char_ideal: CommIdeal<K>,
    pub stratum_dims: Vec<(usize, Option<usize>)>,
    pub logdim: Option<isize>,
    pub holonomic: bool,
    pub support: CharVariety<K>,
}

/// Log dimension of the characteristic variety (None for the zero module).
pub fn log_dim_ch<K: Scalar>(m: &ModulePresentation<K>, cfg: &GbConfig) -> Result<Option<isize>> {
    char_variety(m, cfg)?.logdim()
}

/// Holonomicity: logdim Ch(F) = logdim X. The zero module is vacuously
/// holonomic with empty log dimension.
pub fn is_holonomic<K: Scalar>(m: &ModulePresentation<K>, cfg: &GbConfig) -> Result<bool> {
    match log_dim_ch(m, cfg)? {
        None => Ok(true),
        Some(d) => Ok(d == m.chart().logdim() as isize),
    }
}

pub fn ch_report<K: Scalar>(m: &ModulePresentation<K>, cfg: &GbConfig) -> Result<ChReport<K>> {
    let ch = char_variety(m, cfg)?;
    let logdim = ch.logdim()?;
    let holonomic = match logdim {
        None => true,
        Some(d) => d == m.chart().logdim() as isize,
    };
    let stratum_dims = (0..=m.chart().depth())
        .map(|k| (k, ch.dim_restricted(k)))
        .collect();
    Ok(ChReport {
        char_ideal: ch.to_single_ideal(),
        stratum_dims,
        logdim,
        holonomic,
        support: ch.support(),
        char_variety: ch,
    })
}

/// Derived restriction to a stratum component: the free resolution reduced
/// modulo ⟨t_T⟩ and its cohomology over the idealized stratum chart.
/// Returns the nonzero cohomology presentations with their degrees.
pub fn restrict_to_stratum<K: Scalar>(
    m: &ModulePresentation<K>,
    comp: &StratumComponent,
    cfg: &GbConfig,
) -> Result<Vec<(isize, ModulePresentation<K>)>> {
    let sub = m.chart().stratum_chart(comp)?;
    let res = free_resolution(m, cfg)?;
    let ranks = res.ranks().to_vec();
    let diffs: Vec<Vec<OpVec<K>>> = res
        .diffs()
        .iter()
        .map(|rows| rows.iter().map(|r| r.reinterpret(&sub)).collect())
        .collect();
    let reduced = crate::ncgb::PresComplex::new(sub.clone(), Side::Left, res.lo(), ranks, diffs)?;
    let mut out = Vec::new();
    for d in reduced.lo()..=reduced.hi() {
        let h = if d == reduced.hi() {
            reduced.coker_at_top()
        } else {
            reduced.homology_at(d, cfg)
        };
        if !h.is_zero_module(cfg) {
            out.push((d, h));
        }
    }
    Ok(out)
}

/// Data of the short exact sequence 0 → G → M → G′ → 0 with
/// Ch(G) ⊆ V(Z) and Ch(G′) ⊆ T*X|_{X^k}: G = I^n M for the least workable n.
#[derive(Clone, Debug)]
pub struct SplitData<K: Scalar> {
    pub exponent: usize,
    pub sub_generators: Vec<OpVec<K>>,
    pub sub: ModulePresentation<K>,
    pub quotient: ModulePresentation<K>,
}

pub fn split_by_support<K: Scalar>(
    m: &ModulePresentation<K>,
    k: usize,
    z: &CommIdeal<K>,
    max_exponent: usize,
    cfg: &GbConfig,
) -> Result<SplitData<K>> {
    let chart = m.chart().clone();
    if z.chart() != &chart {
        return Err(Error::ChartMismatch);
    }
    let ch = char_variety(m, cfg)?;
    // hypothesis: Ch(M) ⊆ V(Z) ∪ T*X|_{X^k}
    let stratum_gens = chart.stratum_ideal_monomials(k);
    let hypothesis = if z.generators().is_empty() {
        true
    } else if k == 0 {
        true
    } else {
        ch.pieces().iter().all(|p| {
            z.generators().iter().all(|zg| {
                stratum_gens.iter().all(|w| {
                    p.contains_radical(&zg.mul(&CPoly::term(w.clone(), K::one())))
                })
            })
        })
    };
    if !hypothesis {
        return Err(Error::SplitHypothesis);
    }
    let ideal_gens: Vec<Mono> = stratum_gens;
    for n in 1..=max_exponent {
        // generators of I^n: all n-fold products of the monomial generators
        let mut powers: Vec<Mono> = vec![Mono::one(chart.nvars())];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &powers {
                for g in &ideal_gens {
                    next.push(p.mul(g));
                }
            }
            next.sort();
            next.dedup();
            powers = next;
        }
        let mut gens: Vec<OpVec<K>> = Vec::new();
        for w in &powers {
            for c in 0..m.rank() {
                let mut v = OpVec::zero(&chart, m.rank());
                v.add_term((c, w.clone()), K::one());
                gens.push(v);
            }
        }
        let sub = m.submodule(&gens, cfg);
        let sub_ch = char_variety(&sub, cfg)?;
        if !sub_ch.contained_in_ideal_variety(z) {
            continue;
        }
        let quotient = m.quotient(&gens);
        let q_ch = char_variety(&quotient, cfg)?;
        if !q_ch.support_contained_in_stratum(k) {
            continue;
        }
        return Ok(SplitData {
            exponent: n,
            sub_generators: gens,
            sub,
            quotient,
        });
    }
    Err(Error::SplitExponentExceeded(max_exponent))
}

/// Presentation of the submodule generated by one vector family inside M,
/// together with the quotient M/⟨family⟩ (used by property suites).
pub fn sub_and_quotient<K: Scalar>(
    m: &ModulePresentation<K>,
    gens: &[OpVec<K>],
    cfg: &GbConfig,
) -> (ModulePresentation<K>, ModulePresentation<K>) {
    (m.submodule(gens, cfg), m.quotient(gens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::OpElement;
    use crate::Rat;

    type Op = OpElement<Rat>;

    fn ll() -> Chart {
        Chart::new(0, 1, []).unwrap()
    }

    fn pt() -> Chart {
        Chart::new(0, 1, [1]).unwrap()
    }

    fn lp() -> Chart {
        Chart::new(0, 2, []).unwrap()
    }

    fn cfg() -> GbConfig {
        GbConfig::default()
    }

    fn structure_sheaf(c: &Chart) -> ModulePresentation<Rat> {
        let ths: Vec<Op> = (1..=c.n_log()).map(|j| Op::th(c, j).unwrap()).collect();
        let ds: Vec<Op> = (1..=c.n_free()).map(|i| Op::d(c, i).unwrap()).collect();
        ModulePresentation::cyclic(c, ths.into_iter().chain(ds).collect())
    }

    fn skyscraper_ll() -> ModulePresentation<Rat> {
        let c = ll();
        ModulePresentation::cyclic(&c, vec![Op::t(&c, 1).unwrap(), Op::th(&c, 1).unwrap()])
    }

    fn big_skyscraper_ll() -> ModulePresentation<Rat> {
        let c = ll();
        ModulePresentation::cyclic(&c, vec![Op::t(&c, 1).unwrap()])
    }

    fn diagonal_lp() -> ModulePresentation<Rat> {
        let c = lp();
        let f = Op::t(&c, 1).unwrap().sub(&Op::t(&c, 2).unwrap());
        let g = Op::th(&c, 1).unwrap().add(&Op::th(&c, 2).unwrap());
        ModulePresentation::cyclic(&c, vec![f, g])
    }

    #[test]
    fn char_ideal_fixtures() {
        let c = ll();
        let ch = char_variety(&structure_sheaf(&c), &cfg()).unwrap();
        assert_eq!(ch.display(), vec![vec!["tau1".to_string()]]);
        let ch = char_variety(&skyscraper_ll(), &cfg()).unwrap();
        assert_eq!(
            ch.display(),
            vec![vec!["t1".to_string(), "tau1".to_string()]]
        );
        let ch = char_variety(&big_skyscraper_ll(), &cfg()).unwrap();
        assert_eq!(ch.display(), vec![vec!["t1".to_string()]]);
    }

    #[test]
    fn logdim_and_holonomic_fixtures() {
        let c = ll();
        assert_eq!(log_dim_ch(&structure_sheaf(&c), &cfg()).unwrap(), Some(1));
        assert!(is_holonomic(&structure_sheaf(&c), &cfg()).unwrap());
        assert_eq!(log_dim_ch(&skyscraper_ll(), &cfg()).unwrap(), Some(1));
        assert!(is_holonomic(&skyscraper_ll(), &cfg()).unwrap());
        assert_eq!(log_dim_ch(&big_skyscraper_ll(), &cfg()).unwrap(), Some(2));
        assert!(!is_holonomic(&big_skyscraper_ll(), &cfg()).unwrap());
        assert_eq!(log_dim_ch(&diagonal_lp(), &cfg()).unwrap(), Some(3));
        assert!(!is_holonomic(&diagonal_lp(), &cfg()).unwrap());
        // the log point structure sheaf
        assert_eq!(log_dim_ch(&structure_sheaf(&pt()), &cfg()).unwrap(), Some(1));
        assert!(is_holonomic(&structure_sheaf(&pt()), &cfg()).unwrap());
    }

    #[test]
    fn zero_module_is_vacuously_holonomic() {
        let c = ll();
        let m = ModulePresentation::cyclic(&c, vec![Op::one(&c)]);
        assert_eq!(log_dim_ch(&m, &cfg()).unwrap(), None);
        assert!(is_holonomic(&m, &cfg()).unwrap());
    }

    #[test]
    fn char_variety_order_refinement_invariance() {
        use crate::ncgb::for_symbols_order_lex;
        for m in [
            structure_sheaf(&ll()),
            skyscraper_ll(),
            big_skyscraper_ll(),
            diagonal_lp(),
        ] {
            let a = char_variety(&m, &cfg()).unwrap();
            let b = char_variety_with(&m, &for_symbols_order_lex(m.chart()), &cfg()).unwrap();
            assert!(a.equal_radical(&b));
        }
    }

    #[test]
    fn support_and_report() {
        let r = ch_report(&skyscraper_ll(), &cfg()).unwrap();
        assert!(r.holonomic);
        assert_eq!(r.logdim, Some(1));
        assert_eq!(r.support.display(), vec![vec!["t1".to_string()]]);
        assert_eq!(r.stratum_dims, vec![(0, Some(0)), (1, Some(0))]);
    }

    #[test]
    fn restriction_structure_sheaf_to_origin() {
        // i*(O_LL) at {t1}: H^0 = O_PT, no H^{-1}
        let c = ll();
        let comp = StratumComponent::new([1]);
        let out = restrict_to_stratum(&structure_sheaf(&c), &comp, &cfg()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 0);
        let h0 = &out[0].1;
        assert_eq!(h0.chart(), &pt());
        let ch = char_variety(h0, &cfg()).unwrap();
        assert_eq!(
            ch.display(),
            vec![vec!["t1".to_string(), "tau1".to_string()]]
        );
    }

    #[test]
    fn restriction_big_skyscraper_has_tor() {
        // i*(D/Dt) at {t1}: t acts by zero, so H^0 and H^{-1} are both free
        let comp = StratumComponent::new([1]);
        let out = restrict_to_stratum(&big_skyscraper_ll(), &comp, &cfg()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].0, -1);
        assert_eq!(out[1].0, 0);
        // H^0 is free of rank one over k[θ]: its char variety is the full
        // τ-line over the idealized origin
        let ch0 = char_variety(&out[1].1, &cfg()).unwrap();
        assert_eq!(ch0.display(), vec![vec!["t1".to_string()]]);
        let ch1 = char_variety(&out[0].1, &cfg()).unwrap();
        assert_eq!(ch1.display(), vec![vec!["t1".to_string()]]);
    }

    #[test]
    fn restriction_lemma_h0_equality() {
        // Ch(H^0(i*F)) = Ch(F)|_{X^1} as radical ideals, on the fixtures
        for m in [
            structure_sheaf(&ll()),
            skyscraper_ll(),
            big_skyscraper_ll(),
            diagonal_lp(),
        ] {
            let chart = m.chart().clone();
            for comp in chart.strata_components(1) {
                let restricted = char_variety(&m, &cfg())
                    .unwrap()
                    .restrict_to_component(&comp)
                    .unwrap();
                let out = restrict_to_stratum(&m, &comp, &cfg()).unwrap();
                let h0 = out
                    .iter()
                    .find(|(d, _)| *d == 0)
                    .map(|(_, h)| char_variety(h, &cfg()).unwrap())
                    .unwrap_or_else(|| CharVariety::empty(&chart.stratum_chart(&comp).unwrap()));
                assert!(
                    h0.equal_radical(&restricted),
                    "restriction lemma failed: {:?} vs {:?}",
                    h0.display(),
                    restricted.display()
                );
            }
        }
    }

    #[test]
    fn restriction_diagonal_lp_fixture() {
        let m = diagonal_lp();
        let comp = StratumComponent::new([1]);
        let out = restrict_to_stratum(&m, &comp, &cfg()).unwrap();
        let h0 = &out.iter().find(|(d, _)| *d == 0).unwrap().1;
        let ch = char_variety(h0, &cfg()).unwrap();
        // ⟨t2, τ1+τ2⟩ plus the idealized t1
        assert_eq!(
            ch.display(),
            vec![vec![
                "t1".to_string(),
                "t2".to_string(),
                "tau1 + tau2".to_string()
            ]]
        );
    }

    #[test]
    fn split_by_support_structure_sheaf() {
        // M = O_LL, k = 1, Z = ⟨τ⟩: n = 1, G = tO with Ch ⊆ V(τ)
        let c = ll();
        let m = structure_sheaf(&c);
        let z = CommIdeal::new(
            c.clone(),
            vec![CPoly::var(c.nvars(), c.var_tau(1))],
        )
        .unwrap();
        let s = split_by_support(&m, 1, &z, 32, &cfg()).unwrap();
        assert_eq!(s.exponent, 1);
        let ch = char_variety(&s.sub, &cfg()).unwrap();
        assert!(ch.contained_in_ideal_variety(&z));
        let qch = char_variety(&s.quotient, &cfg()).unwrap();
        assert!(qch.support_contained_in_stratum(1));
    }

    #[test]
    fn split_by_support_sum_fixture() {
        // M = O ⊕ C0, k=1, Z=⟨τ⟩
        let c = ll();
        let m = structure_sheaf(&c).direct_sum(&skyscraper_ll()).unwrap();
        let z = CommIdeal::new(
            c.clone(),
            vec![CPoly::var(c.nvars(), c.var_tau(1))],
        )
        .unwrap();
        let s = split_by_support(&m, 1, &z, 32, &cfg()).unwrap();
        assert_eq!(s.exponent, 1);
        let ch = char_variety(&s.sub, &cfg()).unwrap();
        assert!(ch.contained_in_ideal_variety(&z));
    }

    #[test]
    fn split_on_already_supported_module() {
        // M = C0 is already supported on X^1: G = tM works at n = 1 with
        // Z = ⟨1⟩ only if Ch(tC0) is empty; indeed t·C0 = 0
        let c = ll();
        let m = skyscraper_ll();
        let z = CommIdeal::new(
            c.clone(),
            vec![CPoly::constant(c.nvars(), Rat::from_int(1))],
        )
        .unwrap();
        let s = split_by_support(&m, 1, &z, 32, &cfg()).unwrap();
        assert_eq!(s.exponent, 1);
        assert!(s.sub.is_zero_module(&cfg()));
        let qch = char_variety(&s.quotient, &cfg()).unwrap();
        assert!(qch.support_contained_in_stratum(1));
    }

    #[test]
    fn bernstein_inequality_on_fixtures() {
        for m in [
            structure_sheaf(&ll()),
            structure_sheaf(&pt()),
            skyscraper_ll(),
            big_skyscraper_ll(),
            diagonal_lp(),
        ] {
            let d = log_dim_ch(&m, &cfg()).unwrap().unwrap();
            assert!(d >= m.chart().logdim() as isize);
        }
    }

    #[test]
    fn additivity_of_char_variety() {
        // V(Ch M) = V(Ch N) ∪ V(Ch M/N) for N generated by one element
        let c = ll();
        let m = structure_sheaf(&c);
        let mut gen = OpVec::zero(&c, 1);
        gen.add_term((0, Mono::var(c.nvars(), c.var_t(1))), Rat::from_int(1));
        let (n, q) = sub_and_quotient(&m, &[gen], &cfg());
        let chm = char_variety(&m, &cfg()).unwrap();
        let chn = char_variety(&n, &cfg()).unwrap();
        let chq = char_variety(&q, &cfg()).unwrap();
        let union = CharVariety::from_pieces(
            &c,
            chn.pieces().iter().chain(chq.pieces()).cloned().collect(),
        );
        assert!(chm.equal_radical(&union));
    }
}
