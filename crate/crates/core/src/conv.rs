//! Structure constants of the convolution product on `K_0^T` of the affine
//! Grassmannian, in the basis of Schubert structure sheaves indexed by minimal
//! coset representatives.
//!
//! For a reduced word `u = s_{i_1} … s_{i_n}` the product with `v` is a sum over
//! `x ∈ W` and subsets `J` of positions: positions in `J` apply `s'_{i_k}` and
//! move the label by a Demazure step, the others apply `D'_{i_k}`, and the
//! coefficient is the value at the identity. The subset sum is evaluated as a
//! dynamic program from position `n` down to 1 whose state is the current
//! coset label; classes sharing a label are added, which is lossless because
//! every later step is linear and depends on the label alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanType, CorootVector, RootSystem, Weight};
use crate::error::{Error, Result};
use crate::kclass::{build_steinberg, build_zeta_table, LocVector, SteinbergBasis, ZetaTable};
use crate::laurent::LaurentPoly;
use crate::weyl::{AffElem, WeylGroup};

pub const DEFAULT_LENGTH_CAP: usize = 18;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvStats {
    /// Word length driving the recursion.
    pub word_len: usize,
    /// `|W| · 2^n`, the number of terms of the unexpanded sum.
    pub raw_terms: u128,
    /// Largest number of distinct labels alive at one position.
    pub peak_states: usize,
    /// Nonzero coefficients left after collapsing to coset representatives.
    pub collapsed_terms: usize,
}

/// `w ↦ p^w`, keys in the minimal coset representatives, zeros dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructConstTable {
    entries: BTreeMap<AffElem, LaurentPoly>,
    pub stats: ConvStats,
}

impl StructConstTable {
    /// Rebuilds a table from stored entries; zero coefficients are dropped.
    pub fn from_entries(entries: BTreeMap<AffElem, LaurentPoly>, stats: ConvStats) -> Self {
        let entries = entries.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        StructConstTable { entries, stats }
    }

    pub fn get(&self, w: &AffElem) -> LaurentPoly {
        self.entries.get(w).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AffElem, &LaurentPoly)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<AffElem, LaurentPoly> {
        &self.entries
    }

    /// Same entries, ignoring statistics.
    pub fn same_entries(&self, other: &StructConstTable) -> bool {
        self.entries == other.entries
    }
}

/// Root data, Weyl group, Steinberg basis and ζ-table for one type.
pub struct Convolver {
    group: WeylGroup,
    steinberg: SteinbergBasis,
    zeta: ZetaTable,
    length_cap: usize,
}

impl Convolver {
    pub fn new(cartan_type: CartanType) -> Result<Self> {
        let group = WeylGroup::new(RootSystem::new(cartan_type)?)?;
        let steinberg = build_steinberg(&group);
        let zeta = build_zeta_table(&group, &steinberg)?;
        Ok(Self { group, steinberg, zeta, length_cap: DEFAULT_LENGTH_CAP })
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Self::new(label.parse()?)
    }

    pub fn with_length_cap(mut self, cap: usize) -> Self {
        self.length_cap = cap;
        self
    }

    pub fn length_cap(&self) -> usize {
        self.length_cap
    }

    pub fn group(&self) -> &WeylGroup {
        &self.group
    }

    pub fn root_system(&self) -> &RootSystem {
        self.group.root_system()
    }

    pub fn steinberg(&self) -> &SteinbergBasis {
        &self.steinberg
    }

    pub fn zeta(&self) -> &ZetaTable {
        &self.zeta
    }

    /// `[O_{X^B_u}] ⊙ [O_{X_v}]` for `v` minimal.
    pub fn convolve_borel(&self, u: &AffElem, v: &AffElem) -> Result<StructConstTable> {
        let word = self.group.reduced_word(u);
        self.convolve_borel_word(&word, v)
    }

    /// As [`Self::convolve_borel`], for an explicit reduced word.
    pub fn convolve_borel_word(&self, word: &[usize], v: &AffElem) -> Result<StructConstTable> {
        let g = &self.group;
        if word.len() > self.length_cap {
            return Err(Error::LengthCap { len: word.len(), cap: self.length_cap });
        }
        if !g.is_minimal(v) {
            return Err(Error::Argument("right factor is not a minimal coset representative".into()));
        }
        let u = g.aff_from_word(word)?;
        if g.length_affine(&u) != word.len() {
            return Err(Error::Argument(format!("word {word:?} is not reduced")));
        }

        let mut states: BTreeMap<AffElem, LocVector> = BTreeMap::new();
        for x in g.elements() {
            let xv = g.demazure_product(&AffElem { x, q: CorootVector::zero(g.rank()) }, v);
            let key = g.min_coset_rep(&xv);
            accumulate(&mut states, key, self.zeta.loc(x), g);
        }
        let mut peak = states.len();
        for &i in word.iter().rev() {
            let mut next: BTreeMap<AffElem, LocVector> = BTreeMap::new();
            for (key, vec) in &states {
                accumulate(&mut next, *key, &vec.dprime(g, i), g);
                let moved = g.min_coset_rep(&g.demazure_lmul(i, key));
                accumulate(&mut next, moved, &vec.sprime(g, i), g);
            }
            next.retain(|_, v| !v.is_zero());
            states = next;
            peak = peak.max(states.len());
        }

        let entries: BTreeMap<AffElem, LaurentPoly> = states
            .into_iter()
            .filter_map(|(k, v)| {
                let c = v.abs().clone();
                (!c.is_zero()).then_some((k, c))
            })
            .collect();
        let stats = ConvStats {
            word_len: word.len(),
            raw_terms: (g.order() as u128) << word.len(),
            peak_states: peak,
            collapsed_terms: entries.len(),
        };
        Ok(StructConstTable { entries, stats })
    }

    /// `[O_{X_u}] ⊙ [O_{X_v}]` for minimal `u`, `v`, computed as the Borel
    /// product with `u w_o`.
    ///
    /// Every label is checked against [`Self::support_bound`], which the subset
    /// sum guarantees. The sharper bound `ℓ(w) <= ℓ(u) + ℓ(v)` is not imposed:
    /// the SL2 products `[O_1] ⊙ [O_1]` already carry `[O_3]`.
    pub fn convolve(&self, u: &AffElem, v: &AffElem) -> Result<StructConstTable> {
        let g = &self.group;
        if !g.is_minimal(u) || !g.is_minimal(v) {
            return Err(Error::Argument("both factors must be minimal coset representatives".into()));
        }
        let mut word = g.reduced_word(u);
        word.extend_from_slice(g.word(g.longest()));
        let table = self.convolve_borel_word(&word, v)?;
        let bound = self.support_bound(u, v);
        if let Some((w, _)) = table.iter().find(|(w, _)| g.length_affine(w) > bound) {
            return Err(Error::Integrity(format!(
                "label {:?} exceeds the support bound {bound}",
                g.reduced_word(w)
            )));
        }
        Ok(table)
    }

    /// `ℓ(overline(u w_o * w_o * v))`: every label of the product lies below
    /// this element, since each selected subword is Demazure-below `u w_o` and
    /// each `x * v` is Demazure-below `w_o * v`.
    pub fn support_bound(&self, u: &AffElem, v: &AffElem) -> usize {
        let g = &self.group;
        let wo = AffElem { x: g.longest(), q: CorootVector::zero(g.rank()) };
        let top = g.demazure_product(&g.aff_mul(u, &wo), &g.demazure_product(&wo, v));
        g.length_affine(&g.min_coset_rep(&top))
    }

    pub fn structure_constant(&self, u: &AffElem, v: &AffElem, w: &AffElem) -> Result<LaurentPoly> {
        if !self.group.is_minimal(w) {
            return Err(Error::Argument("target label is not a minimal coset representative".into()));
        }
        Ok(self.convolve(u, v)?.get(w))
    }

    /// Coefficients of `e^λ` pushed through the word: a subset sum of `D_i`
    /// (unselected) and `s_i` (selected) applied from the right end, keyed by
    /// the Demazure product of the selected reflections.
    pub fn line_bundle_expansion(&self, word: &[usize], lambda: Weight) -> Result<BTreeMap<AffElem, LaurentPoly>> {
        let g = &self.group;
        let rs = g.root_system();
        if word.len() > self.length_cap {
            return Err(Error::LengthCap { len: word.len(), cap: self.length_cap });
        }
        if let Some(&bad) = word.iter().find(|&&i| i > g.rank()) {
            return Err(Error::Argument(format!("simple index {bad} out of range")));
        }
        let mut states: BTreeMap<AffElem, LaurentPoly> = BTreeMap::new();
        states.insert(g.aff_identity(), LaurentPoly::monomial(lambda));
        for &i in word.iter().rev() {
            let mut next: BTreeMap<AffElem, LaurentPoly> = BTreeMap::new();
            for (key, f) in &states {
                *next.entry(*key).or_default() += &f.demazure_d(rs, i);
                *next.entry(g.demazure_lmul(i, key)).or_default() += &f.reflect(rs, i);
            }
            next.retain(|_, f| !f.is_zero());
            states = next;
        }
        Ok(states)
    }
}

fn accumulate(states: &mut BTreeMap<AffElem, LocVector>, key: AffElem, v: &LocVector, g: &WeylGroup) {
    *states.entry(key).or_insert_with(|| LocVector::zero(g)) += v;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> Convolver {
        Convolver::from_label("A1").unwrap()
    }

    /// `τ_n = … s_0 s_1 s_0` with `n` factors.
    fn tau(c: &Convolver, n: usize) -> AffElem {
        let word: Vec<usize> = (0..n).map(|k| if (n - 1 - k).is_multiple_of(2) { 0 } else { 1 }).collect();
        c.group().aff_from_word(&word).unwrap()
    }

    fn e_alpha() -> LaurentPoly {
        LaurentPoly::monomial(Weight::from_slice(&[2]))
    }

    #[test]
    fn borel_product_with_s0() {
        let c = a1();
        let s0 = c.group().affine_simple(0);
        for m in 0..=3 {
            let t = c.convolve_borel(&s0, &tau(&c, 2 * m)).unwrap();
            assert_eq!(t.len(), 1);
            assert_eq!(t.get(&tau(&c, 2 * m + 1)), LaurentPoly::one(1));
        }
    }

    #[test]
    fn tau_one_squared() {
        let c = a1();
        let t1 = tau(&c, 1);
        let t = c.convolve(&t1, &t1).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get(&tau(&c, 2)), e_alpha());
        assert_eq!(t.get(&tau(&c, 3)), LaurentPoly::one(1) - e_alpha());
        assert_eq!(c.structure_constant(&t1, &t1, &tau(&c, 2)).unwrap(), e_alpha());
        assert_eq!(t.stats.raw_terms, 2 << 2);
        assert_eq!(t.stats.collapsed_terms, 2);
    }

    #[test]
    fn identity_is_neutral() {
        for label in ["A1", "A2", "C2"] {
            let c = Convolver::from_label(label).unwrap();
            let g = c.group();
            for layer in g.minimal_reps_by_length(3) {
                for v in layer {
                    let t = c.convolve(&g.aff_identity(), &v).unwrap();
                    assert_eq!(t.len(), 1, "{label}");
                    assert_eq!(t.get(&v), LaurentPoly::one(g.rank()));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let c = a1().with_length_cap(4);
        let g = c.group();
        let s1 = g.affine_simple(1);
        assert!(matches!(c.convolve(&s1, &g.aff_identity()), Err(Error::Argument(_))));
        assert!(matches!(c.convolve(&tau(&c, 4), &tau(&c, 1)), Err(Error::LengthCap { .. })));
        assert!(matches!(c.convolve_borel_word(&[1, 1], &g.aff_identity()), Err(Error::Argument(_))));
    }

    #[test]
    fn line_bundle_single_reflection() {
        for label in ["A1", "A2"] {
            let c = Convolver::from_label(label).unwrap();
            let g = c.group();
            let rs = g.root_system();
            let lambda = Weight::from_slice(&vec![3; g.rank()]) - rs.simple_root(1);
            for i in 0..=g.rank() {
                let m = c.line_bundle_expansion(&[i], lambda).unwrap();
                let e = LaurentPoly::monomial(lambda);
                assert_eq!(m.get(&g.affine_simple(i)), Some(&e.reflect(rs, i)));
                assert_eq!(m.get(&g.aff_identity()), Some(&e.demazure_d(rs, i)));
            }
            assert_eq!(
                c.line_bundle_expansion(&[], lambda).unwrap(),
                BTreeMap::from([(g.aff_identity(), LaurentPoly::monomial(lambda))])
            );
            let zero = Weight::zero(g.rank());
            let word = [0, 1, 0, 1, 1];
            let m = c.line_bundle_expansion(&word, zero).unwrap();
            assert_eq!(m, BTreeMap::from([(g.demazure_word(&word), LaurentPoly::one(g.rank()))]));
        }
    }

    /// Brute force over all subsets, one chain per subset, no merging.
    fn brute_force(c: &Convolver, word: &[usize], v: &AffElem) -> BTreeMap<AffElem, LaurentPoly> {
        let g = c.group();
        let n = word.len();
        let mut out: BTreeMap<AffElem, LaurentPoly> = BTreeMap::new();
        for x in g.elements() {
            for mask in 0u32..(1 << n) {
                let mut class = c.zeta().class(x).clone();
                for k in (0..n).rev() {
                    class = if mask >> k & 1 == 1 {
                        class.sprime(g, word[k]).unwrap()
                    } else {
                        class.dprime(g, word[k]).unwrap()
                    };
                }
                let selected: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| word[k]).collect();
                let xv = g.demazure_product(&AffElem { x, q: CorootVector::zero(g.rank()) }, v);
                let key = g.min_coset_rep(&g.demazure_product(&g.demazure_word(&selected), &xv));
                *out.entry(key).or_default() += &class.abs();
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    #[test]
    fn dynamic_program_matches_subset_sum() {
        for (label, words) in [
            ("A1", vec![vec![0, 1], vec![1, 0, 1]]),
            ("A2", vec![vec![0, 1, 2, 1], vec![2, 0, 1]]),
            ("C2", vec![vec![0, 1, 2]]),
        ] {
            let c = Convolver::from_label(label).unwrap();
            let g = c.group();
            for word in words {
                for layer in g.minimal_reps_by_length(2) {
                    for v in layer {
                        let fast = c.convolve_borel_word(&word, &v).unwrap();
                        assert_eq!(*fast.entries(), brute_force(&c, &word, &v), "{label} {word:?}");
                    }
                }
            }
        }
    }
}
