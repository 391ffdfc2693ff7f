//! Finite Weyl group `W` and affine Weyl group `W ⋉ Q^vee`.
//!
//! The finite group is enumerated once; elements are interned as [`WeylElem`]
//! indices into dense tables. The enumeration order is `(length, reduced word)`
//! and is the order used for every localization vector in the crate.
//!
//! Affine elements are pairs `(x, q)` meaning `x τ_q`, with
//! `(x, p)(y, q) = (xy, y^{-1}p + q)`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::cartan::{CorootVector, RootSystem, Weight};
use crate::error::{Error, Result};

/// Enumeration refuses groups larger than this.
pub const MAX_WEYL_ORDER: usize = 10_000;

/// Handle to an element of a particular [`WeylGroup`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WeylElem(u32);

impl WeylElem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// `x τ_q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AffElem {
    pub x: WeylElem,
    pub q: CorootVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerData {
    /// Simple indices `i` with `s_i q = q`.
    pub simple_generators: Vec<usize>,
    /// Every `w` with `w q = q`.
    pub stabilizer: Vec<WeylElem>,
    /// Minimal length representatives of `W / W_q`.
    pub min_reps: Vec<WeylElem>,
}

pub struct WeylGroup {
    rs: RootSystem,
    n: usize,
    /// Row-major `rank x rank` action on fundamental-weight coordinates.
    matrices: Vec<Vec<i32>>,
    coroot_matrices: Vec<Vec<i32>>,
    words: Vec<Vec<usize>>,
    lengths: Vec<usize>,
    mult: Vec<u32>,
    inverse: Vec<u32>,
    /// `lmul[i][w] = s_i w`, `rmul[i][w] = w s_i` for `i` in `1..=rank`.
    lmul: Vec<Vec<u32>>,
    rmul: Vec<Vec<u32>>,
    /// Bit `k` set when `w` sends the `k`-th positive root negative.
    inversions: Vec<u128>,
    longest: u32,
    s_theta: u32,
    bruhat: OnceLock<Vec<Vec<u64>>>,
}

impl fmt::Debug for WeylGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylGroup")
            .field("type", &self.rs.cartan_type())
            .field("order", &self.n)
            .finish()
    }
}

fn mat_mul(a: &[i32], b: &[i32], l: usize) -> Vec<i32> {
    let mut out = vec![0; l * l];
    for i in 0..l {
        for k in 0..l {
            let aik = a[i * l + k];
            if aik == 0 {
                continue;
            }
            for j in 0..l {
                out[i * l + j] += aik * b[k * l + j];
            }
        }
    }
    out
}

fn mat_vec(m: &[i32], v: &[i32], l: usize) -> Vec<i32> {
    (0..l).map(|i| (0..l).map(|j| m[i * l + j] * v[j]).sum()).collect()
}

impl WeylGroup {
    pub fn new(rs: RootSystem) -> Result<Self> {
        let l = rs.rank();
        let a = rs.cartan_matrix().to_vec();
        let npos = rs.positive_roots().len();
        if npos > 128 {
            return Err(Error::Config(format!("{} has too many positive roots", rs.cartan_type())));
        }

        let mut ident = vec![0; l * l];
        for i in 0..l {
            ident[i * l + i] = 1;
        }
        // s_i on weights: column j is e_j - delta_ij alpha_i
        let gens: Vec<Vec<i32>> = (0..l)
            .map(|i| {
                let mut m = ident.clone();
                for k in 0..l {
                    m[k * l + i] -= a[k][i];
                }
                m
            })
            .collect();
        // s_i on coroots: q -> q - <alpha_i, q> alpha_i^vee
        let cogens: Vec<Vec<i32>> = (0..l)
            .map(|i| {
                let mut m = ident.clone();
                for j in 0..l {
                    m[i * l + j] -= a[j][i];
                }
                m
            })
            .collect();

        let mut index: HashMap<Vec<i32>, usize> = HashMap::new();
        let mut mats = vec![ident.clone()];
        let mut comats = vec![ident.clone()];
        let mut dist = vec![0usize];
        index.insert(ident, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(w) = queue.pop_front() {
            for i in 0..l {
                let m = mat_mul(&gens[i], &mats[w], l);
                if index.contains_key(&m) {
                    continue;
                }
                let k = mats.len();
                if k >= MAX_WEYL_ORDER {
                    return Err(Error::Config(format!(
                        "Weyl group of {} exceeds {MAX_WEYL_ORDER} elements",
                        rs.cartan_type()
                    )));
                }
                comats.push(mat_mul(&cogens[i], &comats[w], l));
                index.insert(m.clone(), k);
                mats.push(m);
                dist.push(dist[w] + 1);
                queue.push_back(k);
            }
        }
        let n = mats.len();
        let lm: Vec<Vec<usize>> = (0..l)
            .map(|i| (0..n).map(|w| index[&mat_mul(&gens[i], &mats[w], l)]).collect())
            .collect();

        // greedy reduced words, smallest left descent first
        let mut by_len: Vec<usize> = (0..n).collect();
        by_len.sort_by_key(|&w| dist[w]);
        let mut raw_words: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &w in &by_len {
            if dist[w] == 0 {
                continue;
            }
            let i = (0..l).find(|&i| dist[lm[i][w]] < dist[w]).expect("nonidentity has a descent");
            let mut word = vec![i + 1];
            word.extend_from_slice(&raw_words[lm[i][w]]);
            raw_words[w] = word;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| dist[p].cmp(&dist[q]).then_with(|| raw_words[p].cmp(&raw_words[q])));
        let mut new_of = vec![0usize; n];
        for (k, &old) in order.iter().enumerate() {
            new_of[old] = k;
        }

        let matrices: Vec<Vec<i32>> = order.iter().map(|&o| mats[o].clone()).collect();
        let coroot_matrices: Vec<Vec<i32>> = order.iter().map(|&o| comats[o].clone()).collect();
        let words: Vec<Vec<usize>> = order.iter().map(|&o| raw_words[o].clone()).collect();
        let lengths: Vec<usize> = order.iter().map(|&o| dist[o]).collect();
        let index: HashMap<Vec<i32>, usize> =
            matrices.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();

        let mut mult = vec![0u32; n * n];
        for p in 0..n {
            for q in 0..n {
                mult[p * n + q] = index[&mat_mul(&matrices[p], &matrices[q], l)] as u32;
            }
        }
        let inverse: Vec<u32> = (0..n)
            .map(|p| (0..n).find(|&q| mult[p * n + q] == 0).unwrap() as u32)
            .collect();
        let lmul: Vec<Vec<u32>> = (0..l)
            .map(|i| (0..n).map(|w| new_of[lm[i][order[w]]] as u32).collect())
            .collect();
        let gen_idx: Vec<usize> = (0..l).map(|i| index[&gens[i]]).collect();
        let rmul: Vec<Vec<u32>> = (0..l)
            .map(|i| (0..n).map(|w| mult[w * n + gen_idx[i]]).collect())
            .collect();

        let inversions: Vec<u128> = matrices
            .iter()
            .map(|m| {
                let mut bits = 0u128;
                for (k, alpha) in rs.positive_roots().iter().enumerate() {
                    let img = Weight::from_slice(&mat_vec(m, alpha.coords(), l));
                    if !rs.root_index(&img).expect("W permutes roots").1 {
                        bits |= 1 << k;
                    }
                }
                bits
            })
            .collect();
        let longest = (0..n).max_by_key(|&w| lengths[w]).unwrap() as u32;

        // s_theta: the element acting as lambda -> lambda - <lambda, theta^vee> theta
        let theta = rs.highest_root();
        let tc = rs.theta_coroot();
        let mut st = vec![0; l * l];
        for j in 0..l {
            let c = tc.coords()[j];
            for k in 0..l {
                st[k * l + j] = if k == j { 1 } else { 0 } - c * theta.coords()[k];
            }
        }
        let s_theta = *index
            .get(&st)
            .ok_or_else(|| Error::Integrity("reflection in theta not found in W".into()))?
            as u32;

        let group = Self {
            rs,
            n,
            matrices,
            coroot_matrices,
            words,
            lengths,
            mult,
            inverse,
            lmul,
            rmul,
            inversions,
            longest,
            s_theta,
            bruhat: OnceLock::new(),
        };
        for w in group.elements() {
            if group.inversions[w.index()].count_ones() as usize != group.length(w) {
                return Err(Error::Integrity("inversion count differs from word length".into()));
            }
        }
        let s0 = group.affine_simple(0);
        if group.length_affine(&s0) != 1 {
            return Err(Error::Integrity("affine simple reflection s_0 does not have length 1".into()));
        }
        Ok(group)
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> impl Iterator<Item = WeylElem> + '_ {
        (0..self.n as u32).map(WeylElem)
    }

    pub fn elem(&self, index: usize) -> WeylElem {
        assert!(index < self.n);
        WeylElem(index as u32)
    }

    pub fn identity(&self) -> WeylElem {
        WeylElem(0)
    }

    pub fn longest(&self) -> WeylElem {
        WeylElem(self.longest)
    }

    /// `s_i` for `i` in `0..=rank`; index 0 gives `s_theta`.
    pub fn simple(&self, i: usize) -> WeylElem {
        if i == 0 {
            WeylElem(self.s_theta)
        } else {
            self.lmul(i, self.identity())
        }
    }

    pub fn s_theta(&self) -> WeylElem {
        WeylElem(self.s_theta)
    }

    pub fn length(&self, w: WeylElem) -> usize {
        self.lengths[w.index()]
    }

    /// Reduced word over `1..=rank`.
    pub fn word(&self, w: WeylElem) -> &[usize] {
        &self.words[w.index()]
    }

    pub fn matrix(&self, w: WeylElem) -> &[i32] {
        &self.matrices[w.index()]
    }

    pub fn mul(&self, a: WeylElem, b: WeylElem) -> WeylElem {
        WeylElem(self.mult[a.index() * self.n + b.index()])
    }

    pub fn inv(&self, a: WeylElem) -> WeylElem {
        WeylElem(self.inverse[a.index()])
    }

    /// `s_i w`, `i` in `1..=rank`.
    pub fn lmul(&self, i: usize, w: WeylElem) -> WeylElem {
        WeylElem(self.lmul[i - 1][w.index()])
    }

    /// `w s_i`, `i` in `1..=rank`.
    pub fn rmul(&self, w: WeylElem, i: usize) -> WeylElem {
        WeylElem(self.rmul[i - 1][w.index()])
    }

    /// Bitmask of positive roots sent negative by `w`.
    pub fn inversion_mask(&self, w: WeylElem) -> u128 {
        self.inversions[w.index()]
    }

    pub fn from_word(&self, word: &[usize]) -> Result<WeylElem> {
        let mut w = self.identity();
        for &i in word.iter().rev() {
            if i == 0 || i > self.rank() {
                return Err(Error::Argument(format!("simple index {i} out of range 1..={}", self.rank())));
            }
            w = self.lmul(i, w);
        }
        Ok(w)
    }

    pub fn act_weight(&self, w: WeylElem, lambda: &Weight) -> Weight {
        let l = self.rank();
        Weight::from_slice(&mat_vec(self.matrix(w), lambda.coords(), l))
    }

    pub fn act_coroot(&self, w: WeylElem, q: &CorootVector) -> CorootVector {
        let l = self.rank();
        CorootVector::from_slice(&mat_vec(&self.coroot_matrices[w.index()], q.coords(), l))
    }

    /// Bruhat order on `W`.
    pub fn bruhat_leq(&self, x: WeylElem, y: WeylElem) -> bool {
        let table = self.bruhat.get_or_init(|| self.build_bruhat());
        table[y.index()][x.index() / 64] >> (x.index() % 64) & 1 == 1
    }

    fn build_bruhat(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        let mut table: Vec<Vec<u64>> = vec![vec![0; words]; self.n];
        // [e, y] = [e, sy] ∪ s[e, sy] for a left descent s of y
        for y in self.elements() {
            let mut bits = vec![0u64; words];
            if self.length(y) == 0 {
                bits[0] = 1;
            } else {
                let i = self.word(y)[0];
                let sy = self.lmul(i, y);
                let below = &table[sy.index()];
                for z in 0..self.n {
                    if below[z / 64] >> (z % 64) & 1 == 1 {
                        bits[z / 64] |= 1 << (z % 64);
                        let sz = self.lmul(i, WeylElem(z as u32)).index();
                        bits[sz / 64] |= 1 << (sz % 64);
                    }
                }
            }
            table[y.index()] = bits;
        }
        table
    }

    // ---- affine group ----

    pub fn aff_identity(&self) -> AffElem {
        AffElem { x: self.identity(), q: CorootVector::zero(self.rank()) }
    }

    pub fn translation(&self, q: CorootVector) -> AffElem {
        AffElem { x: self.identity(), q }
    }

    /// `s_i` as a group element; `s_0 = s_theta τ_{-theta^vee}`.
    pub fn affine_simple(&self, i: usize) -> AffElem {
        if i == 0 {
            AffElem { x: self.s_theta(), q: -self.rs.theta_coroot() }
        } else {
            AffElem { x: self.simple(i), q: CorootVector::zero(self.rank()) }
        }
    }

    pub fn aff_mul(&self, a: &AffElem, b: &AffElem) -> AffElem {
        let yinv = self.inv(b.x);
        AffElem { x: self.mul(a.x, b.x), q: self.act_coroot(yinv, &a.q) + b.q }
    }

    pub fn aff_inv(&self, a: &AffElem) -> AffElem {
        // (x, q)^{-1} = (x^{-1}, -x q)
        AffElem { x: self.inv(a.x), q: -self.act_coroot(a.x, &a.q) }
    }

    /// `s_i w` for `i` in `0..=rank`.
    pub fn aff_lmul(&self, i: usize, w: &AffElem) -> AffElem {
        if i == 0 {
            let t = -self.rs.theta_coroot();
            AffElem {
                x: self.mul(self.s_theta(), w.x),
                q: self.act_coroot(self.inv(w.x), &t) + w.q,
            }
        } else {
            AffElem { x: self.lmul(i, w.x), q: w.q }
        }
    }

    /// `w s_i` for `i` in `0..=rank`.
    pub fn aff_rmul(&self, w: &AffElem, i: usize) -> AffElem {
        if i == 0 {
            let st = self.s_theta();
            AffElem {
                x: self.mul(w.x, st),
                q: self.act_coroot(st, &w.q) - self.rs.theta_coroot(),
            }
        } else {
            AffElem { x: self.rmul(w.x, i), q: self.rs.reflect_coroot(w.q, i) }
        }
    }

    /// `ℓ(x τ_q) = Σ_{α>0, xα<0} |α(q)+1| + Σ_{α>0, xα>0} |α(q)|`.
    pub fn length_affine(&self, w: &AffElem) -> usize {
        let mask = self.inversion_mask(w.x);
        let mut total = 0usize;
        for (k, alpha) in self.rs.positive_roots().iter().enumerate() {
            let p = alpha.pair(&w.q);
            let v = if mask >> k & 1 == 1 { p + 1 } else { p };
            total += v.unsigned_abs() as usize;
        }
        total
    }

    /// Greedy reduced word over `0..=rank`, smallest left descent first.
    pub fn reduced_word(&self, w: &AffElem) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = *w;
        let mut len = self.length_affine(&cur);
        while len > 0 {
            let (i, next) = (0..=self.rank())
                .map(|i| (i, self.aff_lmul(i, &cur)))
                .find(|(_, n)| self.length_affine(n) < len)
                .expect("nonidentity affine element has a left descent");
            word.push(i);
            cur = next;
            len -= 1;
        }
        debug_assert_eq!(cur, self.aff_identity());
        word
    }

    pub fn aff_from_word(&self, word: &[usize]) -> Result<AffElem> {
        let mut w = self.aff_identity();
        for &i in word.iter().rev() {
            if i > self.rank() {
                return Err(Error::Argument(format!("simple index {i} out of range 0..={}", self.rank())));
            }
            w = self.aff_lmul(i, &w);
        }
        Ok(w)
    }

    /// `s_i * w`: `s_i w` when that is longer, else `w`.
    pub fn demazure_lmul(&self, i: usize, w: &AffElem) -> AffElem {
        let sw = self.aff_lmul(i, w);
        if self.length_affine(&sw) > self.length_affine(w) {
            sw
        } else {
            *w
        }
    }

    pub fn demazure_product(&self, u: &AffElem, v: &AffElem) -> AffElem {
        self.reduced_word(u)
            .iter()
            .rev()
            .fold(*v, |acc, &i| self.demazure_lmul(i, &acc))
    }

    /// Demazure product of a word (not necessarily reduced), left to right.
    pub fn demazure_word(&self, word: &[usize]) -> AffElem {
        word.iter()
            .rev()
            .fold(self.aff_identity(), |acc, &i| self.demazure_lmul(i, &acc))
    }

    /// Minimal length element of `w W`.
    pub fn min_coset_rep(&self, w: &AffElem) -> AffElem {
        let mut cur = *w;
        let mut len = self.length_affine(&cur);
        'outer: loop {
            for i in 1..=self.rank() {
                let next = self.aff_rmul(&cur, i);
                let nl = self.length_affine(&next);
                if nl < len {
                    cur = next;
                    len = nl;
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// No finite right descent.
    pub fn is_minimal(&self, w: &AffElem) -> bool {
        let len = self.length_affine(w);
        (1..=self.rank()).all(|i| self.length_affine(&self.aff_rmul(w, i)) > len)
    }

    /// `q <= 0` and `x` is a minimal representative of `W / W_q`.
    pub fn is_minimal_by_shape(&self, w: &AffElem) -> bool {
        if !self.rs.is_antidominant(&w.q) {
            return false;
        }
        (1..=self.rank())
            .filter(|&i| self.rs.simple_root(i).pair(&w.q) == 0)
            .all(|i| self.length(self.rmul(w.x, i)) > self.length(w.x))
    }

    pub fn stabilizer_data(&self, q: &CorootVector) -> StabilizerData {
        let simple_generators: Vec<usize> =
            (1..=self.rank()).filter(|&i| self.rs.reflect_coroot(*q, i) == *q).collect();
        let stabilizer: Vec<WeylElem> =
            self.elements().filter(|&w| self.act_coroot(w, q) == *q).collect();
        let min_reps = self
            .elements()
            .filter(|&x| stabilizer.iter().all(|&y| self.length(self.mul(x, y)) >= self.length(x)))
            .collect();
        StabilizerData { simple_generators, stabilizer, min_reps }
    }

    /// All minimal coset representatives, grouped by length `0..=max_len`.
    pub fn minimal_reps_by_length(&self, max_len: usize) -> Vec<Vec<AffElem>> {
        let mut layers: Vec<Vec<AffElem>> = vec![vec![self.aff_identity()]];
        for k in 1..=max_len {
            let mut next = BTreeSet::new();
            for w in &layers[k - 1] {
                for i in 0..=self.rank() {
                    let sw = self.aff_lmul(i, w);
                    if self.length_affine(&sw) == k && self.is_minimal(&sw) {
                        next.insert(sw);
                    }
                }
            }
            layers.push(next.into_iter().collect());
        }
        layers
    }

    pub fn format_word(word: &[usize]) -> String {
        word.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    }
}
