//! Exponent vectors and monomial orders shared by the commutative ring
//! k[x, t, ξ, τ] and the PBW basis of the log Weyl algebra.

use std::cmp::Ordering;

/// An exponent vector over a fixed variable list. The derived `Ord` is only
/// the canonical map key; semantic comparisons go through [`TermOrder`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Mono(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn total_deg(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Total degree restricted to the variables selected by `mask`.
    pub fn deg_masked(&self, mask: &[bool]) -> u32 {
        self.0
            .iter()
            .zip(mask)
            .filter(|&(_, &m)| m)
            .map(|(&d, _)| d)
            .sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Mono {
        Mono(self.0.iter().map(|a| a * k).collect())
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// other / self, assuming divisibility.
    pub fn div_into(&self, other: &Mono) -> Mono {
        Mono(
            other
                .0
                .iter()
                .zip(&self.0)
                .map(|(b, a)| b - a)
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// True when the support is contained in the masked variables.
    pub fn supported_in(&self, mask: &[bool]) -> bool {
        self.0.iter().zip(mask).all(|(&d, &m)| d == 0 || m)
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&d| d <= 1)
    }

    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d > 0)
            .map(|(i, _)| i)
            .collect()
    }
}

fn cmp_degrevlex(a: &Mono, b: &Mono) -> Ordering {
    match a.total_deg().cmp(&b.total_deg()) {
        Ordering::Equal => {}
        ord => return ord,
    }
    // revlex tie-break: scanning from the last variable, the first
    // difference decides; smaller exponent there means larger monomial.
    for i in (0..a.0.len()).rev() {
        match a.0[i].cmp(&b.0[i]) {
            Ordering::Equal => {}
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

fn cmp_lex(a: &Mono, b: &Mono) -> Ordering {
    for i in 0..a.0.len() {
        match a.0[i].cmp(&b.0[i]) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    Ordering::Equal
}

fn cmp_degrevlex_masked(a: &Mono, b: &Mono, mask: &[bool]) -> Ordering {
    match a.deg_masked(mask).cmp(&b.deg_masked(mask)) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for i in (0..a.0.len()).rev() {
        if !mask[i] {
            continue;
        }
        match a.0[i].cmp(&b.0[i]) {
            Ordering::Equal => {}
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

/// A monomial order on exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermOrder {
    DegRevLex,
    Lex,
    /// Block order eliminating the masked variables: degrevlex on the
    /// eliminated block first, then degrevlex on the rest.
    Elim(Vec<bool>),
    /// Compare total degree on the masked variables first, then the inner
    /// order. Used with the ξ,τ mask for order-filtration compatibility.
    Weighted(Vec<bool>, Box<TermOrder>),
}

impl TermOrder {
    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        match self {
            TermOrder::DegRevLex => cmp_degrevlex(a, b),
            TermOrder::Lex => cmp_lex(a, b),
            TermOrder::Elim(mask) => match cmp_degrevlex_masked(a, b, mask) {
                Ordering::Equal => {
                    let co: Vec<bool> = mask.iter().map(|&m| !m).collect();
                    cmp_degrevlex_masked(a, b, &co)
                }
                ord => ord,
            },
            TermOrder::Weighted(mask, inner) => {
                match a.deg_masked(mask).cmp(&b.deg_masked(mask)) {
                    Ordering::Equal => inner.cmp(a, b),
                    ord => ord,
                }
            }
        }
    }

    pub fn max<'a>(&self, it: impl Iterator<Item = &'a Mono>) -> Option<&'a Mono> {
        it.max_by(|a, b| self.cmp(a, b))
    }
}

/// A monomial in a free module: component index plus exponent vector.
pub type ModMono = (usize, Mono);

/// Orders on free-module monomials. Component priority is ascending index:
/// in a tie-break between components, the lower index is the larger monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModOrder {
    /// Position over term: component decides first.
    Pot(TermOrder),
    /// Term over position: the term order decides first.
    Top(TermOrder),
    /// Position over term with an explicit priority list: components earlier
    /// in the list are larger. Used for component elimination.
    PotPriority(Vec<usize>, TermOrder),
    /// Two-block order for syzygy tagging: components below the split use the
    /// first order and dominate every tag component; tag components compare
    /// by the second order (with indices shifted down by the split).
    Block(usize, Box<ModOrder>, Box<ModOrder>),
}

fn cmp_component(a: usize, b: usize) -> Ordering {
    // lower index = higher priority = larger
    b.cmp(&a)
}

impl ModOrder {
    pub fn cmp(&self, a: &ModMono, b: &ModMono) -> Ordering {
        self.cmp_parts(a.0, &a.1, b.0, &b.1)
    }

    pub fn cmp_parts(&self, ca: usize, ma: &Mono, cb: usize, mb: &Mono) -> Ordering {
        match self {
            ModOrder::Pot(t) => match cmp_component(ca, cb) {
                Ordering::Equal => t.cmp(ma, mb),
                ord => ord,
            },
            ModOrder::Top(t) => match t.cmp(ma, mb) {
                Ordering::Equal => cmp_component(ca, cb),
                ord => ord,
            },
            ModOrder::PotPriority(prio, t) => {
                let pa = prio.iter().position(|&c| c == ca).unwrap_or(usize::MAX);
                let pb = prio.iter().position(|&c| c == cb).unwrap_or(usize::MAX);
                match pb.cmp(&pa) {
                    Ordering::Equal => t.cmp(ma, mb),
                    ord => ord,
                }
            }
            ModOrder::Block(split, main, tags) => {
                let la = ca < *split;
                let lb = cb < *split;
                match (la, lb) {
                    (true, false) => Ordering::Greater,
                    (false, true) => Ordering::Less,
                    (true, true) => main.cmp_parts(ca, ma, cb, mb),
                    (false, false) => tags.cmp_parts(ca - split, ma, cb - split, mb),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Mono {
        Mono(e.to_vec())
    }

    #[test]
    fn degrevlex_basics() {
        let o = TermOrder::DegRevLex;
        // t1*th2 vs t2*th1 on vars (t1,t2,th1,th2): revlex picks t2*th1
        assert_eq!(o.cmp(&m(&[1, 0, 0, 1]), &m(&[0, 1, 1, 0])), Ordering::Less);
        assert_eq!(o.cmp(&m(&[2, 0]), &m(&[1, 1])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 1])), Ordering::Greater);
    }

    #[test]
    fn elim_blocks() {
        // eliminate var 0: anything containing var 0 beats anything without
        let o = TermOrder::Elim(vec![true, false]);
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 5])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 2]), &m(&[0, 1])), Ordering::Greater);
    }

    #[test]
    fn weighted_order_filtration() {
        // vars (t, tau); weight tau first
        let o = TermOrder::Weighted(vec![false, true], Box::new(TermOrder::DegRevLex));
        assert_eq!(o.cmp(&m(&[5, 0]), &m(&[0, 1])), Ordering::Less);
    }

    #[test]
    fn module_orders() {
        let pot = ModOrder::Pot(TermOrder::DegRevLex);
        // component 0 outranks component 1
        assert_eq!(
            pot.cmp(&(0, m(&[0, 0])), &(1, m(&[9, 9]))),
            Ordering::Greater
        );
        let top = ModOrder::Top(TermOrder::DegRevLex);
        assert_eq!(top.cmp(&(0, m(&[0, 0])), &(1, m(&[1, 0]))), Ordering::Less);
    }
}
