//! Classes in `R(T) ⊗_{R(G)} R(T) ≅ K_T(G/B)`.
//!
//! A [`TensorClass`] is a non-canonical list of pairs; equality goes through
//! its localization vector, a [`LocVector`] indexed by the enumeration order of
//! the finite Weyl group. `loc_z(a ⊗ b) = a · (z b)`.
//!
//! Operators on the first factor accept the affine index 0, acting through
//! `s_theta` with `alpha_0 = -theta`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::Serialize;

use crate::cartan::Weight;
use crate::error::{Error, Result};
use crate::laurent::{solve_row_system, LaurentPoly};
use crate::weyl::{WeylElem, WeylGroup};

/// `Σ a_j ⊗ b_j`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TensorClass {
    pairs: Vec<(LaurentPoly, LaurentPoly)>,
}

/// Localizations `(f(z))_{z ∈ W}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LocVector(pub Vec<LaurentPoly>);

fn check_index(g: &WeylGroup, i: usize, allow_affine: bool) -> Result<()> {
    let lo = if allow_affine { 0 } else { 1 };
    if i < lo || i > g.rank() {
        return Err(Error::Argument(format!("operator index {i} outside {lo}..={}", g.rank())));
    }
    Ok(())
}

/// `s_i z`, with `s_0 = s_theta`.
fn left_by(g: &WeylGroup, i: usize, z: WeylElem) -> WeylElem {
    if i == 0 {
        g.mul(g.s_theta(), z)
    } else {
        g.lmul(i, z)
    }
}

impl TensorClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pure(a: LaurentPoly, b: LaurentPoly) -> Self {
        let mut c = Self::zero();
        c.push(a, b);
        c
    }

    /// `1 ⊗ 1`.
    pub fn one(rank: usize) -> Self {
        Self::pure(LaurentPoly::one(rank), LaurentPoly::one(rank))
    }

    /// `e^λ ⊗ e^μ`.
    pub fn monomial(lambda: Weight, mu: Weight) -> Self {
        Self::pure(LaurentPoly::monomial(lambda), LaurentPoly::monomial(mu))
    }

    pub fn pairs(&self) -> &[(LaurentPoly, LaurentPoly)] {
        &self.pairs
    }

    /// Adds `a ⊗ b`, merging with an existing pair sharing the same `b`.
    pub fn push(&mut self, a: LaurentPoly, b: LaurentPoly) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if let Some(k) = self.pairs.iter().position(|(_, bb)| *bb == b) {
            self.pairs[k].0 += &a;
            if self.pairs[k].0.is_zero() {
                self.pairs.remove(k);
            }
        } else {
            self.pairs.push((a, b));
        }
    }

    fn map_first(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        let mut out = Self::zero();
        for (a, b) in &self.pairs {
            out.push(f(a), b.clone());
        }
        out
    }

    fn map_second(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        let mut out = Self::zero();
        for (a, b) in &self.pairs {
            out.push(a.clone(), f(b));
        }
        out
    }

    /// `|c| = Σ a_j b_j`, which is the localization at `e`.
    pub fn abs(&self) -> LaurentPoly {
        self.pairs.iter().fold(LaurentPoly::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn localize(&self, g: &WeylGroup, z: WeylElem) -> LaurentPoly {
        self.pairs
            .iter()
            .fold(LaurentPoly::zero(), |acc, (a, b)| acc + a * &b.weyl_act(g, z))
    }

    pub fn loc_vector(&self, g: &WeylGroup) -> LocVector {
        LocVector(g.elements().map(|z| self.localize(g, z)).collect())
    }

    /// Semantic equality.
    pub fn equivalent(&self, other: &TensorClass, g: &WeylGroup) -> bool {
        self.loc_vector(g) == other.loc_vector(g)
    }

    /// `s'_i(a ⊗ b) = s_i a ⊗ b`.
    pub fn sprime(&self, g: &WeylGroup, i: usize) -> Result<Self> {
        check_index(g, i, true)?;
        Ok(self.map_first(|a| a.reflect(g.root_system(), i)))
    }

    /// `D'_i(a ⊗ b) = D_i a ⊗ b`.
    pub fn dprime(&self, g: &WeylGroup, i: usize) -> Result<Self> {
        check_index(g, i, true)?;
        Ok(self.map_first(|a| a.demazure_d(g.root_system(), i)))
    }

    /// `D''_i(a ⊗ b) = a ⊗ D_i b`.
    pub fn dsecond(&self, g: &WeylGroup, i: usize) -> Result<Self> {
        check_index(g, i, false)?;
        Ok(self.map_second(|b| b.demazure_d(g.root_system(), i)))
    }

    /// `a ⊗ (b - e^{α_i} s_i b) / (1 - e^{α_i})`.
    pub fn frak_d(&self, g: &WeylGroup, i: usize) -> Result<Self> {
        check_index(g, i, false)?;
        Ok(self.map_second(|b| b.demazure_pushpull(g.root_system(), i)))
    }

    /// `t(a ⊗ b) = b ⊗ a`.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for (a, b) in &self.pairs {
            out.push(b.clone(), a.clone());
        }
        out
    }

    /// `⟨c, O_y⟩ = Σ a_j · (d_{i_1} ∘ … ∘ d_{i_k})(b_j)` along a reduced word of `y`.
    pub fn pairing(&self, g: &WeylGroup, y: WeylElem) -> LaurentPoly {
        let rs = g.root_system();
        let word = g.word(y);
        self.pairs.iter().fold(LaurentPoly::zero(), |acc, (a, b)| {
            let pushed = word.iter().rev().fold(b.clone(), |f, &i| f.demazure_pushpull(rs, i));
            acc + a * &pushed
        })
    }
}

impl Add<&TensorClass> for &TensorClass {
    type Output = TensorClass;
    fn add(self, rhs: &TensorClass) -> TensorClass {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&TensorClass> for TensorClass {
    fn add_assign(&mut self, rhs: &TensorClass) {
        for (a, b) in &rhs.pairs {
            self.push(a.clone(), b.clone());
        }
    }
}

impl Neg for &TensorClass {
    type Output = TensorClass;
    fn neg(self) -> TensorClass {
        self.map_first(|a| -a)
    }
}

impl Sub<&TensorClass> for &TensorClass {
    type Output = TensorClass;
    fn sub(self, rhs: &TensorClass) -> TensorClass {
        self + &(-rhs)
    }
}

/// `(a ⊗ b)(c ⊗ d) = ac ⊗ bd`.
impl Mul<&TensorClass> for &TensorClass {
    type Output = TensorClass;
    fn mul(self, rhs: &TensorClass) -> TensorClass {
        let mut out = TensorClass::zero();
        for (a, b) in &self.pairs {
            for (c, d) in &rhs.pairs {
                out.push(a * c, b * d);
            }
        }
        out
    }
}

impl LocVector {
    pub fn zero(g: &WeylGroup) -> Self {
        LocVector(vec![LaurentPoly::zero(); g.order()])
    }

    pub fn at(&self, z: WeylElem) -> &LaurentPoly {
        &self.0[z.index()]
    }

    /// Value at the identity, i.e. `|·|`.
    pub fn abs(&self) -> &LaurentPoly {
        &self.0[0]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(LaurentPoly::is_zero)
    }

    /// `(s'_i f)(z) = s_i(f(s_i z))`.
    pub fn sprime(&self, g: &WeylGroup, i: usize) -> Self {
        let rs = g.root_system();
        LocVector(
            g.elements()
                .map(|z| self.0[left_by(g, i, z).index()].reflect(rs, i))
                .collect(),
        )
    }

    /// `(D'_i f)(z) = (f(z) - s_i f(s_i z)) / (1 - e^{α_i})`.
    pub fn dprime(&self, g: &WeylGroup, i: usize) -> Self {
        let rs = g.root_system();
        let alpha = rs.simple_root(i);
        LocVector(
            g.elements()
                .map(|z| {
                    let num = &self.0[z.index()] - &self.0[left_by(g, i, z).index()].reflect(rs, i);
                    num.div_one_minus_monomial(&alpha)
                        .expect("D'_i of a localization vector of a class is exact")
                })
                .collect(),
        )
    }

    /// `(D''_i f)(z) = (f(z) - f(z s_i)) / (1 - e^{z α_i})`.
    pub fn dsecond(&self, g: &WeylGroup, i: usize) -> Self {
        let alpha = g.root_system().simple_root(i);
        LocVector(
            g.elements()
                .map(|z| {
                    let num = &self.0[z.index()] - &self.0[g.rmul(z, i).index()];
                    num.div_one_minus_monomial(&g.act_weight(z, &alpha))
                        .expect("D''_i of a localization vector of a class is exact")
                })
                .collect(),
        )
    }

    /// Pointwise product with the localizations of another class.
    pub fn pointwise(&self, other: &LocVector) -> Self {
        LocVector(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        LocVector(self.0.iter().map(|a| a * c).collect())
    }
}

impl AddAssign<&LocVector> for LocVector {
    fn add_assign(&mut self, rhs: &LocVector) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl Add<&LocVector> for &LocVector {
    type Output = LocVector;
    fn add(self, rhs: &LocVector) -> LocVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Neg for &LocVector {
    type Output = LocVector;
    fn neg(self) -> LocVector {
        LocVector(self.0.iter().map(|a| -a).collect())
    }
}

/// The Steinberg basis `e^{δ_x}` of `R(T)` over `R(G)` and the matrix `E_{x,y} = y e^{δ_x}`.
#[derive(Clone, Debug)]
pub struct SteinbergBasis {
    pub delta: Vec<Weight>,
    pub e_matrix: Vec<Vec<LaurentPoly>>,
}

/// `δ_x = x^{-1} Σ_{i : x^{-1} α_i < 0} ω_i`.
pub fn steinberg_weight(g: &WeylGroup, x: WeylElem) -> Weight {
    let rs = g.root_system();
    let xinv = g.inv(x);
    let mut sum = Weight::zero(g.rank());
    for i in 1..=g.rank() {
        let img = g.act_weight(xinv, &rs.simple_root(i));
        if !rs.root_index(&img).expect("image of a root").1 {
            sum += rs.fundamental_weight(i);
        }
    }
    g.act_weight(xinv, &sum)
}

pub fn build_steinberg(g: &WeylGroup) -> SteinbergBasis {
    let delta: Vec<Weight> = g.elements().map(|x| steinberg_weight(g, x)).collect();
    let e_matrix = delta
        .iter()
        .map(|d| g.elements().map(|y| LaurentPoly::monomial(g.act_weight(y, d))).collect())
        .collect();
    SteinbergBasis { delta, e_matrix }
}

/// `ζ̄^x` for every `x`, as tensors and as localization vectors.
#[derive(Clone, Debug)]
pub struct ZetaTable {
    classes: Vec<TensorClass>,
    locs: Vec<LocVector>,
}

/// `Π_{α>0} (1 - e^{-α})`.
pub fn weyl_denominator(g: &WeylGroup) -> LaurentPoly {
    g.root_system()
        .positive_roots()
        .iter()
        .fold(LaurentPoly::one(g.rank()), |acc, a| acc * LaurentPoly::one_minus(-*a))
}

/// Solves for `ζ̄^{w_o}` in the Steinberg basis, then descends with
/// `ζ̄^y = -D'_i ζ̄^{s_i y}` for the smallest ascent `i` of `y`.
pub fn build_zeta_table(g: &WeylGroup, sb: &SteinbergBasis) -> Result<ZetaTable> {
    let n = g.order();
    let wo = g.longest();
    let mut rhs = vec![LaurentPoly::zero(); n];
    rhs[wo.index()] = weyl_denominator(g);
    let r = solve_row_system(&sb.e_matrix, &rhs)?;
    let mut top = TensorClass::zero();
    for (x, rx) in r.into_iter().enumerate() {
        top.push(rx, LaurentPoly::monomial(sb.delta[x]));
    }

    let mut classes: Vec<Option<TensorClass>> = vec![None; n];
    classes[wo.index()] = Some(top);
    let mut order: Vec<WeylElem> = g.elements().collect();
    order.sort_by_key(|&y| std::cmp::Reverse(g.length(y)));
    for y in order {
        if y == wo {
            continue;
        }
        let i = (1..=g.rank())
            .find(|&i| g.length(g.lmul(i, y)) > g.length(y))
            .expect("non-longest element has a left ascent");
        let up = classes[g.lmul(i, y).index()].as_ref().expect("longer classes built first");
        classes[y.index()] = Some(-&up.dprime(g, i)?);
    }
    let classes: Vec<TensorClass> = classes.into_iter().map(Option::unwrap).collect();
    let locs: Vec<LocVector> = classes.iter().map(|c| c.loc_vector(g)).collect();

    let mut total = LocVector::zero(g);
    for l in &locs {
        total += l;
    }
    if total != TensorClass::one(g.rank()).loc_vector(g) {
        return Err(Error::Integrity("sum of zeta classes is not 1 ⊗ 1".into()));
    }
    for x in g.elements() {
        let expect = if x == g.identity() { LaurentPoly::one(g.rank()) } else { LaurentPoly::zero() };
        if *locs[x.index()].abs() != expect {
            return Err(Error::Integrity(format!("|zeta^x| != delta_(x,e) at x = {:?}", g.word(x))));
        }
    }
    Ok(ZetaTable { classes, locs })
}

impl ZetaTable {
    pub fn class(&self, x: WeylElem) -> &TensorClass {
        &self.classes[x.index()]
    }

    pub fn loc(&self, x: WeylElem) -> &LocVector {
        &self.locs[x.index()]
    }

    /// `Σ_{z ≥ x} ζ̄^z` in Bruhat order.
    pub fn opposite_structure_sheaf(&self, g: &WeylGroup, x: WeylElem) -> TensorClass {
        let mut out = TensorClass::zero();
        for z in g.elements().filter(|&z| g.bruhat_leq(x, z)) {
            out += self.class(z);
        }
        out
    }
}
