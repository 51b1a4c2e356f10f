//! Verdier duality on charts with smooth underlying scheme.
//!
//! The dual of a left module is computed by applying Hom(−, D) to a free
//! resolution, converting the resulting right-module complex back to left
//! modules through the transposition anti-automorphism, twisting by the
//! canonical line bundle (θ_j ↦ θ_j + 1 on non-idealized directions), and
//! shifting by dim X. At the matrix level this is the involutive
//! star operation A ↦ (twist ∘ transpose)(A)ᵀ, so the double dual of a
//! resolution returns the identical complex and the canonical isomorphism
//! 𝔻𝔻M ≅ M is the identity on presentations.

use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::charvar::{char_variety, CharVariety};
use crate::error::{Error, Result};
use crate::ncgb::{
    free_resolution, ChainMap, GbConfig, ModulePresentation, OpVec, PresComplex, Side,
};
use crate::opalg::OpElement;
use crate::scalar::Scalar;

/// The star anti-automorphism underlying duality: transpose then twist(+1).
pub fn star<K: Scalar>(p: &OpElement<K>) -> OpElement<K> {
    p.transpose().twist(1)
}

/// Transpose of a matrix (given as rows) with entries mapped by `f`.
fn transpose_matrix_with<K: Scalar>(
    rows: &[OpVec<K>],
    out_cols: usize,
    f: impl Fn(&OpElement<K>) -> OpElement<K>,
) -> Vec<OpVec<K>> {
    if rows.is_empty() {
        return vec![];
    }
    let chart = rows[0].chart().clone();
    let in_cols = rows[0].rank();
    debug_assert_eq!(out_cols, rows.len());
    (0..in_cols)
        .map(|j| {
            let ops: Vec<OpElement<K>> = (0..out_cols)
                .map(|i| f(&rows[i].component(j)))
                .collect();
            OpVec::from_ops(&chart, &ops)
        })
        .collect()
}

/// Hom(−, D) of a complex of free left modules, reconverted to left modules
/// via the transposition (no twist, no shift): the complex computing the
/// Ext modules, in degrees [−hi, −lo].
pub fn hom_dual_complex<K: Scalar>(c: &PresComplex<K>) -> Result<PresComplex<K>> {
    dual_with(c, 0, |p| p.transpose())
}

/// The normalized Verdier dual of a complex: star entries, reversed arrows,
/// shift by dim X.
pub fn verdier_dual_complex<K: Scalar>(c: &PresComplex<K>) -> Result<PresComplex<K>> {
    dual_with(c, c.chart().dim() as isize, star)
}

fn dual_with<K: Scalar>(
    c: &PresComplex<K>,
    shift: isize,
    f: impl Fn(&OpElement<K>) -> OpElement<K> + Copy,
) -> Result<PresComplex<K>> {
    if c.side() != Side::Left {
        return Err(Error::SideOrLocalization);
    }
    if c.is_empty() {
        return Ok(PresComplex::empty(c.chart(), Side::Left));
    }
    let lo = -c.hi() - shift;
    let n = c.ranks().len();
    let ranks: Vec<usize> = (0..n).map(|i| c.ranks()[n - 1 - i]).collect();
    let mut diffs = Vec::new();
    for i in 0..n.saturating_sub(1) {
        // dual differential at position i comes from the source differential
        // ending at source position n−1−i
        let src = &c.diffs()[n - 2 - i];
        diffs.push(transpose_matrix_with(src, src.len(), f));
    }
    PresComplex::new(c.chart().clone(), Side::Left, lo, ranks, diffs)
}

/// The Verdier dual of a chain map: 𝔻f : 𝔻(target) → 𝔻(source).
pub fn verdier_dual_map<K: Scalar>(fmap: &ChainMap<K>) -> Result<ChainMap<K>> {
    let dsource = verdier_dual_complex(&fmap.target)?;
    let dtarget = verdier_dual_complex(&fmap.source)?;
    let shift = fmap.source.chart().dim() as isize;
    let mut maps = BTreeMap::new();
    for d in dsource.lo()..=dsource.hi() {
        let srcdeg = -d - shift;
        let rows = fmap.map_at(srcdeg);
        let out = transpose_matrix_with(&rows, rows.len(), star);
        if !out.is_empty() {
            maps.insert(d, out);
        } else if dsource.rank_at(d) > 0 {
            maps.insert(
                d,
                (0..dsource.rank_at(d))
                    .map(|_| OpVec::zero(dsource.chart(), dtarget.rank_at(d)))
                    .collect(),
            );
        }
    }
    ChainMap::new(dsource, dtarget, maps)
}

/// A Verdier dual with its provenance.
#[derive(Clone, Debug)]
pub struct DualComplex<K: Scalar> {
    pub complex: PresComplex<K>,
    pub resolution: PresComplex<K>,
}

/// Duality engine with a resolution memo table (safe for concurrent use).
pub struct DualityEngine<K: Scalar> {
    pub cfg: GbConfig,
    cache: Mutex<BTreeMap<String, PresComplex<K>>>,
}

impl<K: Scalar> DualityEngine<K> {
    pub fn new(cfg: GbConfig) -> Self {
        DualityEngine {
            cfg,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    fn key(m: &ModulePresentation<K>) -> String {
        let rows: Vec<String> = m.rows().iter().map(|r| r.display()).collect();
        format!("{:?}|{}|{}", m.side(), m.rank(), rows.join(";"))
    }

    pub fn resolution(&self, m: &ModulePresentation<K>) -> Result<PresComplex<K>> {
        let key = Self::key(m);
        if let Some(r) = self.cache.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let res = free_resolution(m, &self.cfg)?;
        self.cache.lock().unwrap().insert(key, res.clone());
        Ok(res)
    }

    /// 𝔻M for a left module, as a complex of left modules.
    pub fn verdier_dual(&self, m: &ModulePresentation<K>) -> Result<DualComplex<K>> {
        let resolution = self.resolution(m)?;
        let complex = verdier_dual_complex(&resolution)?;
        Ok(DualComplex {
            complex,
            resolution,
        })
    }

    /// Ext^i_D(M, D) as a right-module presentation (stored via transpose).
    pub fn ext_module(&self, m: &ModulePresentation<K>, i: isize) -> Result<ModulePresentation<K>> {
        if i < 0 {
            return Err(Error::NegativeExtIndex);
        }
        let res = self.resolution(m)?;
        let hom = hom_dual_complex(&res)?;
        let h = if i > hom.hi() {
            ModulePresentation::new(m.chart().clone(), Side::Left, 0, vec![])
        } else if i == hom.hi() {
            hom.coker_at_top()
        } else {
            hom.homology_at(i, &self.cfg)
        };
        // the data is τ-twisted left data for a right module
        Ok(ModulePresentation::new(
            m.chart().clone(),
            Side::Right,
            h.rank(),
            h.rows().to_vec(),
        ))
    }

    /// All nonzero cohomology modules of 𝔻M with their degrees.
    pub fn dual_cohomology(
        &self,
        m: &ModulePresentation<K>,
    ) -> Result<Vec<(isize, ModulePresentation<K>)>> {
        let dual = self.verdier_dual(m)?;
        complex_cohomology(&dual.complex, &self.cfg)
    }

    /// logdim F = logdim 𝔻F: compares the log dimension of the union of the
    /// characteristic varieties of the dual's cohomologies with logdim Ch(M).
    pub fn check_logdim_duality(&self, m: &ModulePresentation<K>) -> Result<bool> {
        let direct = char_variety(m, &self.cfg)?.logdim()?;
        let mut pieces = Vec::new();
        let chart = m.chart().clone();
        for (_, h) in self.dual_cohomology(m)? {
            pieces.extend(char_variety(&h, &self.cfg)?.pieces().to_vec());
        }
        let dual_logdim = CharVariety::from_pieces(&chart, pieces).logdim()?;
        Ok(direct == dual_logdim)
    }

    /// Table of (degree ℓ, dim Ch H^ℓ(𝔻M), bound logdim X − ℓ, within bound)
    /// for the nonzero cohomologies of the dual.
    pub fn dual_degree_support_bounds(
        &self,
        m: &ModulePresentation<K>,
    ) -> Result<Vec<(isize, usize, isize, bool)>> {
        let logdim = m.chart().logdim() as isize;
        let mut out = Vec::new();
        for (d, h) in self.dual_cohomology(m)? {
            let dim = char_variety(&h, &self.cfg)?.dim();
            if let Some(dim) = dim {
                let bound = logdim - d;
                out.push((d, dim, bound, (dim as isize) <= bound));
            }
        }
        Ok(out)
    }
}

/// All nonzero cohomology presentations of a complex.
pub fn complex_cohomology<K: Scalar>(
    c: &PresComplex<K>,
    cfg: &GbConfig,
) -> Result<Vec<(isize, ModulePresentation<K>)>> {
    let mut out = Vec::new();
    if c.is_empty() {
        return Ok(out);
    }
    for d in c.lo()..=c.hi() {
        let h = if d == c.hi() {
            c.coker_at_top()
        } else {
            c.homology_at(d, cfg)
        };
        if !h.is_zero_module(cfg) {
            out.push((d, h));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::charvar::log_dim_ch;
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

    fn engine() -> DualityEngine<Rat> {
        DualityEngine::new(GbConfig::default())
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
    fn star_is_involutive_antihomomorphism() {
        let c = ll();
        let th = Op::th(&c, 1).unwrap();
        let t = Op::t(&c, 1).unwrap();
        let a = th.mul(&t).unwrap().add(&Op::one(&c));
        let b = t.mul(&th).unwrap().sub(&t);
        assert_eq!(star(&star(&a)), a);
        assert_eq!(
            star(&a.mul(&b).unwrap()),
            star(&b).mul(&star(&a)).unwrap()
        );
    }

    #[test]
    fn dual_of_structure_sheaf_concentrated_degree_zero() {
        let e = engine();
        let hs = e.dual_cohomology(&structure_sheaf(&ll())).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].0, 0);
        // the cohomology is a rank-one module with char ideal ⟨τ⟩
        let ch = char_variety(&hs[0].1, &e.cfg).unwrap();
        assert_eq!(ch.display(), vec![vec!["tau1".to_string()]]);
    }

    #[test]
    fn dual_of_skyscraper_in_degree_one() {
        let e = engine();
        let hs = e.dual_cohomology(&skyscraper_ll()).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].0, 1);
        let ch = char_variety(&hs[0].1, &e.cfg).unwrap();
        assert_eq!(
            ch.display(),
            vec![vec!["t1".to_string(), "tau1".to_string()]]
        );
        assert_eq!(hs[0].1.rank(), 1);
    }

    #[test]
    fn dual_of_big_skyscraper_degree_zero() {
        let e = engine();
        let hs = e.dual_cohomology(&big_skyscraper_ll()).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].0, 0);
        let ch = char_variety(&hs[0].1, &e.cfg).unwrap();
        assert_eq!(ch.display(), vec![vec!["t1".to_string()]]);
    }

    #[test]
    fn dual_of_log_point_structure_sheaf_is_shifted() {
        // 𝔻O_PT = O_PT[−1]: concentrated in degree one, equal presentation
        let e = engine();
        let m = structure_sheaf(&pt());
        let hs = e.dual_cohomology(&m).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].0, 1);
        // on the idealized direction the twist is trivial, so the dual is
        // exactly D/Dθ again
        let gb = hs[0].1.gb(&crate::ncgb::default_order(), &e.cfg);
        let rows: Vec<String> = gb.iter().map(|r| r.display()).collect();
        assert_eq!(rows, vec!["[th1]".to_string()]);
    }

    #[test]
    fn double_dual_is_identity_on_resolutions() {
        let e = engine();
        for m in [
            structure_sheaf(&ll()),
            skyscraper_ll(),
            big_skyscraper_ll(),
            diagonal_lp(),
            structure_sheaf(&pt()),
        ] {
            let res = e.resolution(&m).unwrap();
            let dd = verdier_dual_complex(&verdier_dual_complex(&res).unwrap()).unwrap();
            assert_eq!(res, dd);
        }
    }

    #[test]
    fn ext_modules_of_structure_sheaf() {
        let e = engine();
        let m = structure_sheaf(&ll());
        let e0 = e.ext_module(&m, 0).unwrap();
        assert!(e0.is_zero_module(&e.cfg));
        let e1 = e.ext_module(&m, 1).unwrap();
        assert_eq!(e1.side(), Side::Right);
        // right module D/θD stored via transpose: relation row −θ → GB th1
        let gb = e1.gb(&crate::ncgb::default_order(), &e.cfg);
        let rows: Vec<String> = gb.iter().map(|r| r.display()).collect();
        assert_eq!(rows, vec!["[th1]".to_string()]);
        assert!(e.ext_module(&m, -1).is_err());
    }

    #[test]
    fn ext_two_of_skyscraper() {
        // Ext²(C0, D): rank one with t and (θ−1) acting by zero on the
        // right; stored-left relations are t and θ+1
        let e = engine();
        let m = skyscraper_ll();
        let e2 = e.ext_module(&m, 2).unwrap();
        assert_eq!(e2.side(), Side::Right);
        let gb = e2.gb(&crate::ncgb::default_order(), &e.cfg);
        let rows: Vec<String> = gb.iter().map(|r| r.display()).collect();
        assert_eq!(rows, vec!["[th1 + 1]".to_string(), "[t1]".to_string()]);
    }

    #[test]
    fn logdim_duality_on_fixtures() {
        let e = engine();
        for m in [
            structure_sheaf(&ll()),
            skyscraper_ll(),
            big_skyscraper_ll(),
            diagonal_lp(),
            structure_sheaf(&pt()),
        ] {
            assert!(e.check_logdim_duality(&m).unwrap());
        }
    }

    #[test]
    fn dim_ch_preserved_by_duality() {
        let e = engine();
        for m in [
            structure_sheaf(&ll()),
            skyscraper_ll(),
            big_skyscraper_ll(),
            diagonal_lp(),
        ] {
            let d1 = char_variety(&m, &e.cfg).unwrap().dim();
            let mut pieces = Vec::new();
            for (_, h) in e.dual_cohomology(&m).unwrap() {
                pieces.extend(char_variety(&h, &e.cfg).unwrap().pieces().to_vec());
            }
            let d2 = CharVariety::from_pieces(m.chart(), pieces).dim();
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn degree_support_bound_tables() {
        let e = engine();
        let t = e
            .dual_degree_support_bounds(&structure_sheaf(&ll()))
            .unwrap();
        assert_eq!(t, vec![(0, 1, 1, true)]);
        let t = e.dual_degree_support_bounds(&skyscraper_ll()).unwrap();
        assert_eq!(t, vec![(1, 0, 0, true)]);
        let t = e
            .dual_degree_support_bounds(&big_skyscraper_ll())
            .unwrap();
        assert_eq!(t, vec![(0, 1, 1, true)]);
    }

    #[test]
    fn lowest_dual_degree_matches_dim_ch() {
        // H^ℓ(𝔻M) vanishes below logdim X − dim Ch M and is nonzero there
        let e = engine();
        for m in [
            structure_sheaf(&ll()),
            skyscraper_ll(),
            big_skyscraper_ll(),
            diagonal_lp(),
        ] {
            let dim = char_variety(&m, &e.cfg).unwrap().dim().unwrap() as isize;
            let lmin = m.chart().logdim() as isize - dim;
            let hs = e.dual_cohomology(&m).unwrap();
            assert!(!hs.is_empty());
            assert_eq!(hs[0].0, lmin);
        }
    }

    #[test]
    fn dual_logdim_fixture_values() {
        // logdim of the dual matches the module's on both sides for D/Dt
        let e = engine();
        let m = big_skyscraper_ll();
        let hs = e.dual_cohomology(&m).unwrap();
        let d = log_dim_ch(&hs[0].1, &e.cfg).unwrap();
        assert_eq!(d, Some(2));
    }
}
