//! Quantum K-theory structure constants of `G/B` read off from affine
//! convolution constants.
//!
//! `[O^x] * [O^y] = Σ d^{z,η}_{x,y} q^η [O^z]` where, for a strictly
//! antidominant depth `d`, `d^{z,η}_{x,y} = p^{z τ_β}_{x τ_d, y τ_d}` and
//! `η = β - 2d`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cartan::{CorootVector, RootSystem};
use crate::conv::Convolver;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::weyl::{AffElem, WeylElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QKEntry {
    pub coeff: LaurentPoly,
    /// The affine label `z τ_β` the constant was read from.
    pub source: AffElem,
}

#[derive(Clone, Debug)]
pub struct QKTable {
    pub x: WeylElem,
    pub y: WeylElem,
    pub depth: CorootVector,
    pub entries: BTreeMap<(WeylElem, CorootVector), QKEntry>,
}

impl QKTable {
    pub fn get(&self, z: WeylElem, eta: CorootVector) -> LaurentPoly {
        self.entries.get(&(z, eta)).map(|e| e.coeff.clone()).unwrap_or_default()
    }

    /// `(z, η) ↦ d`, without the sourcing labels.
    pub fn coefficients(&self) -> BTreeMap<(WeylElem, CorootVector), LaurentPoly> {
        self.entries.iter().map(|(k, e)| (*k, e.coeff.clone())).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The strictly antidominant `q` minimizing `ℓ(τ_q) = -2 Σ q_j`, ties broken
/// lexicographically. This is `-Σ α_i^vee` whenever that is strictly antidominant.
pub fn default_depth(rs: &RootSystem) -> CorootVector {
    let l = rs.rank();
    let minus_sum = CorootVector::from_slice(&vec![-1; l]);
    if rs.is_strictly_antidominant(&minus_sum) {
        return minus_sum;
    }
    for total in l + 1.. {
        // compositions of `total` into `l` positive parts, lexicographic on the negated vector
        let mut found: Option<CorootVector> = None;
        let mut parts = vec![1i32; l];
        compositions(total as i32, 0, &mut parts, &mut |p| {
            let q = CorootVector::from_slice(&p.iter().map(|c| -c).collect::<Vec<_>>());
            if rs.is_strictly_antidominant(&q) && found.is_none_or(|f| q < f) {
                found = Some(q);
            }
        });
        if let Some(q) = found {
            return q;
        }
    }
    unreachable!("a strictly antidominant coroot vector always exists")
}

fn compositions(remaining: i32, k: usize, parts: &mut Vec<i32>, visit: &mut impl FnMut(&[i32])) {
    let l = parts.len();
    if k == l - 1 {
        if remaining >= 1 {
            parts[k] = remaining;
            visit(parts);
        }
        return;
    }
    for c in 1..=remaining - (l - 1 - k) as i32 {
        parts[k] = c;
        compositions(remaining - c, k + 1, parts, visit);
    }
}

/// `[O^x] * [O^y]` through the convolution product of `x τ_d` and `y τ_d`.
pub fn qk_product(conv: &Convolver, x: WeylElem, y: WeylElem, depth: CorootVector) -> Result<QKTable> {
    let g = conv.group();
    let rs = g.root_system();
    if depth.rank() != g.rank() || !rs.is_strictly_antidominant(&depth) {
        return Err(Error::Argument(format!("depth {depth} is not strictly antidominant")));
    }
    let u = AffElem { x, q: depth };
    let v = AffElem { x: y, q: depth };
    let table = conv.convolve(&u, &v)?;
    let mut entries = BTreeMap::new();
    for (w, coeff) in table.iter() {
        let (z, beta) = (w.x, w.q);
        if !g.is_minimal_by_shape(w) {
            return Err(Error::Integrity(format!(
                "label (z = {:?}, beta = {beta}) is not of the form z τ_β with β <= 0, z ∈ W'_β",
                g.word(z)
            )));
        }
        let eta = beta - depth.scale(2);
        if eta.coords().iter().any(|&c| c < 0) {
            return Err(Error::Integrity(format!("quantum degree {eta} lies outside Q_+^vee")));
        }
        entries.insert((z, eta), QKEntry { coeff: coeff.clone(), source: *w });
    }
    Ok(QKTable { x, y, depth, entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub depths: Vec<CorootVector>,
    pub stable: bool,
    pub discrepancies: Vec<String>,
}

/// Compares `qk_product(x, y, d)` across the given depths.
pub fn depth_stability_check(
    conv: &Convolver,
    x: WeylElem,
    y: WeylElem,
    depths: &[CorootVector],
) -> Result<StabilityReport> {
    let mut discrepancies = Vec::new();
    let mut reference: Option<(CorootVector, BTreeMap<(WeylElem, CorootVector), LaurentPoly>)> = None;
    for &d in depths {
        let table = qk_product(conv, x, y, d)?.coefficients();
        match &reference {
            None => reference = Some((d, table)),
            Some((d0, t0)) => {
                for key in t0.keys().chain(table.keys()) {
                    let a = t0.get(key).cloned().unwrap_or_default();
                    let b = table.get(key).cloned().unwrap_or_default();
                    if a != b {
                        discrepancies.push(format!(
                            "z = {:?}, eta = {}: depth {d0} gives {a}, depth {d} gives {b}",
                            conv.group().word(key.0),
                            key.1
                        ));
                    }
                }
            }
        }
    }
    discrepancies.sort();
    discrepancies.dedup();
    Ok(StabilityReport { depths: depths.to_vec(), stable: discrepancies.is_empty(), discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_root_system, Weight};

    fn cv(c: &[i32]) -> CorootVector {
        CorootVector::from_slice(c)
    }

    #[test]
    fn p1_example() {
        let c = Convolver::from_label("A1").unwrap();
        let g = c.group();
        let s = g.simple(1);
        let ea = LaurentPoly::monomial(Weight::from_slice(&[2]));
        for d in [cv(&[-1]), cv(&[-2])] {
            let t = qk_product(&c, s, s, d).unwrap();
            assert_eq!(t.len(), 2);
            assert_eq!(t.get(g.identity(), cv(&[1])), ea);
            assert_eq!(t.get(s, cv(&[0])), LaurentPoly::one(1) - ea.clone());
        }
        let rep = depth_stability_check(&c, s, s, &[cv(&[-1]), cv(&[-2])]).unwrap();
        assert!(rep.stable, "{:?}", rep.discrepancies);
    }

    #[test]
    fn identity_class_is_neutral() {
        for label in ["A1", "A2"] {
            let c = Convolver::from_label(label).unwrap();
            let g = c.group();
            let d = default_depth(g.root_system());
            for y in g.elements() {
                let t = qk_product(&c, g.identity(), y, d).unwrap();
                assert_eq!(t.len(), 1);
                assert_eq!(t.get(y, CorootVector::zero(g.rank())), LaurentPoly::one(g.rank()));
            }
        }
    }

    #[test]
    fn rejects_non_strict_depth() {
        let c = Convolver::from_label("A2").unwrap();
        let g = c.group();
        let e = g.identity();
        assert!(matches!(qk_product(&c, e, e, cv(&[-1, 0])), Err(Error::Argument(_))));
        assert!(matches!(qk_product(&c, e, e, cv(&[0, 0])), Err(Error::Argument(_))));
    }

    #[test]
    fn default_depths() {
        assert_eq!(default_depth(&build_root_system("A1").unwrap()), cv(&[-1]));
        assert_eq!(default_depth(&build_root_system("A2").unwrap()), cv(&[-1, -1]));
        for label in ["C2", "B2", "G2", "A3", "B3", "C3"] {
            let rs = build_root_system(label).unwrap();
            let d = default_depth(&rs);
            assert!(rs.is_strictly_antidominant(&d), "{label}");
            assert_eq!(Some(d), brute_min_depth(&rs), "{label}");
        }
        let c2 = build_root_system("C2").unwrap();
        assert!(!c2.is_strictly_antidominant(&cv(&[-1, -1])));
    }

    // minimum total over a box, ties broken by the vector order
    fn brute_min_depth(rs: &RootSystem) -> Option<CorootVector> {
        let l = rs.rank();
        let mut best: Option<(i32, CorootVector)> = None;
        let mut digits = vec![1i32; l];
        loop {
            let q = cv(&digits.iter().map(|c| -c).collect::<Vec<_>>());
            if rs.is_strictly_antidominant(&q) {
                let t: i32 = digits.iter().sum();
                if best.is_none_or(|b| (t, q) < b) {
                    best = Some((t, q));
                }
            }
            let mut k = 0;
            while k < l && digits[k] == 7 {
                digits[k] = 1;
                k += 1;
            }
            if k == l {
                break;
            }
            digits[k] += 1;
        }
        best.map(|(_, q)| q)
    }

    #[test]
    fn a2_commutative() {
        let c = Convolver::from_label("A2").unwrap();
        let g = c.group();
        let d = default_depth(g.root_system());
        let s1 = g.simple(1);
        let s12 = g.from_word(&[1, 2]).unwrap();
        let a = qk_product(&c, s1, s12, d).unwrap().coefficients();
        let b = qk_product(&c, s12, s1, d).unwrap().coefficients();
        assert_eq!(a, b);
    }
}
