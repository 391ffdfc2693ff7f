//! Root data for simple types.
//!
//! Conventions, fixed once here and used everywhere:
//!
//! * the Cartan matrix is `a[i][j] = <alpha_j, alpha_i^vee>`, so the simple root
//!   `alpha_j` written in fundamental-weight coordinates is column `j`;
//! * a [`Weight`] is stored in fundamental-weight coordinates and a
//!   [`CorootVector`] in simple-coroot coordinates, which turns every pairing
//!   `<lambda, q>` into an integer dot product;
//! * simple indices are 1-based (`1..=rank`); index 0 denotes the affine node,
//!   with `alpha_0 = -theta`, `alpha_0^vee = -theta^vee` and `s_0` acting on
//!   weights as `s_theta`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest rank the fixed-size lattice vectors can hold.
pub const MAX_RANK: usize = 8;

macro_rules! lattice_vector {
    ($name:ident) => {
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        pub struct $name {
            len: u8,
            coords: [i32; MAX_RANK],
        }

        impl $name {
            pub fn zero(rank: usize) -> Self {
                assert!(rank <= MAX_RANK, "rank {rank} exceeds MAX_RANK");
                Self { len: rank as u8, coords: [0; MAX_RANK] }
            }

            pub fn from_slice(coords: &[i32]) -> Self {
                let mut v = Self::zero(coords.len());
                v.coords[..coords.len()].copy_from_slice(coords);
                v
            }

            /// Unit vector along the 1-based index `i`.
            pub fn unit(rank: usize, i: usize) -> Self {
                let mut v = Self::zero(rank);
                v.coords[i - 1] = 1;
                v
            }

            pub fn rank(&self) -> usize {
                self.len as usize
            }

            pub fn coords(&self) -> &[i32] {
                &self.coords[..self.len as usize]
            }

            pub fn is_zero(&self) -> bool {
                self.coords.iter().all(|&c| c == 0)
            }

            pub fn scale(self, k: i32) -> Self {
                let mut out = self;
                for c in out.coords.iter_mut() {
                    *c *= k;
                }
                out
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(mut self, rhs: Self) -> Self {
                self += rhs;
                self
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: Self) {
                debug_assert_eq!(self.len, rhs.len);
                for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
                    *a += b;
                }
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(mut self, rhs: Self) -> Self {
                self -= rhs;
                self
            }
        }

        impl SubAssign for $name {
            fn sub_assign(&mut self, rhs: Self) {
                debug_assert_eq!(self.len, rhs.len);
                for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
                    *a -= b;
                }
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                self.scale(-1)
            }
        }

        impl Mul<$name> for i32 {
            type Output = $name;
            fn mul(self, rhs: $name) -> $name {
                rhs.scale(self)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{:?}", stringify!($name), self.coords())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "(")?;
                for (k, c) in self.coords().iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                self.coords().serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let v = Vec::<i32>::deserialize(d)?;
                if v.len() > MAX_RANK {
                    return Err(serde::de::Error::custom("vector longer than MAX_RANK"));
                }
                Ok(Self::from_slice(&v))
            }
        }
    };
}

lattice_vector!(Weight);
lattice_vector!(CorootVector);

impl Weight {
    /// `<lambda, q>`.
    pub fn pair(&self, q: &CorootVector) -> i32 {
        debug_assert_eq!(self.len, q.len);
        self.coords.iter().zip(q.coords.iter()).map(|(a, b)| a * b).sum()
    }

    fn degree(&self) -> i64 {
        self.coords.iter().map(|&c| c as i64).sum()
    }
}

/// Graded lexicographic: total degree first, then coordinates.
/// Translation invariant, which exact division relies on.
impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coords.cmp(&other.coords))
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CorootVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl PartialOrd for CorootVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    G,
}

/// A simple type label such as `A2` or `C2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::G => rank == 2,
        };
        if !ok || rank > MAX_RANK {
            return Err(Error::Config(format!("unsupported type {family:?}{rank}")));
        }
        Ok(Self { family, rank })
    }

    /// `a[i][j] = <alpha_j, alpha_i^vee>` (0-based storage).
    pub fn cartan_matrix(&self) -> Vec<Vec<i32>> {
        let n = self.rank;
        let mut a = vec![vec![0; n]; n];
        for i in 0..n {
            a[i][i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.family {
            Family::A | Family::B | Family::C => {
                for i in 0..n - 1 {
                    link(i, i + 1);
                }
            }
            Family::D => {
                for i in 0..n - 2 {
                    link(i, i + 1);
                }
                link(n - 3, n - 1);
            }
            Family::G => link(0, 1),
        }
        match self.family {
            // alpha_n short
            Family::B => a[n - 1][n - 2] = -2,
            // alpha_n long
            Family::C => a[n - 2][n - 1] = -2,
            // alpha_1 short, alpha_2 long
            Family::G => a[0][1] = -3,
            _ => {}
        }
        a
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('G') => Family::G,
            _ => return Err(Error::Config(format!("unknown type label {s:?}"))),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Config(format!("unknown type label {s:?}")))?;
        CartanType::new(family, rank)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl Serialize for CartanType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    cartan_type: CartanType,
    cartan: Vec<Vec<i32>>,
    positive_roots: Vec<Weight>,
    positive_coroots: Vec<CorootVector>,
    /// Positive roots in simple-root coordinates, parallel to `positive_roots`.
    root_coords: Vec<Vec<i32>>,
    root_index: HashMap<Weight, (usize, bool)>,
    highest_root: Weight,
    theta_coroot: CorootVector,
    rho: Weight,
    dual_coxeter: i32,
}

impl RootSystem {
    pub fn new(cartan_type: CartanType) -> Result<Self> {
        let cartan = cartan_type.cartan_matrix();
        let rank = cartan_type.rank;

        // Simultaneous orbit of (root, coroot) pairs in root / coroot coordinates.
        let reflect_root = |c: &[i32], j: usize| -> Vec<i32> {
            let p: i32 = (0..rank).map(|k| c[k] * cartan[j][k]).sum();
            let mut out = c.to_vec();
            out[j] -= p;
            out
        };
        let reflect_coroot = |c: &[i32], j: usize| -> Vec<i32> {
            let p: i32 = (0..rank).map(|k| c[k] * cartan[k][j]).sum();
            let mut out = c.to_vec();
            out[j] -= p;
            out
        };
        let mut seen = BTreeSet::new();
        let mut found: Vec<(Vec<i32>, Vec<i32>)> = Vec::new();
        let mut queue = VecDeque::new();
        for i in 0..rank {
            let mut e = vec![0; rank];
            e[i] = 1;
            queue.push_back((e.clone(), e));
        }
        while let Some((root, coroot)) = queue.pop_front() {
            if !seen.insert(root.clone()) {
                continue;
            }
            for j in 0..rank {
                let r = reflect_root(&root, j);
                if r.iter().all(|&c| c >= 0) && !seen.contains(&r) {
                    queue.push_back((r, reflect_coroot(&coroot, j)));
                }
            }
            found.push((root, coroot));
        }
        // graded by height, then lexicographic with alpha_1 first
        found.sort_by(|(a, _), (b, _)| {
            let ha: i32 = a.iter().sum();
            let hb: i32 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });

        let to_weight = |c: &[i32]| -> Weight {
            let mut w = Weight::zero(rank);
            for k in 0..rank {
                w.coords[k] = (0..rank).map(|j| cartan[k][j] * c[j]).sum();
            }
            w
        };
        let positive_roots: Vec<Weight> = found.iter().map(|(r, _)| to_weight(r)).collect();
        let positive_coroots: Vec<CorootVector> =
            found.iter().map(|(_, c)| CorootVector::from_slice(c)).collect();
        let root_coords: Vec<Vec<i32>> = found.iter().map(|(r, _)| r.clone()).collect();
        let mut root_index = HashMap::new();
        for (k, r) in positive_roots.iter().enumerate() {
            root_index.insert(*r, (k, true));
            root_index.insert(-*r, (k, false));
        }

        let top = positive_roots.len() - 1;
        let highest_root = positive_roots[top];
        let theta_coroot = positive_coroots[top];
        let rho = Weight::from_slice(&vec![1; rank]);
        let dual_coxeter = 1 + rho.pair(&theta_coroot);

        Ok(Self {
            cartan_type,
            cartan,
            positive_roots,
            positive_coroots,
            root_coords,
            root_index,
            highest_root,
            theta_coroot,
            rho,
            dual_coxeter,
        })
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank
    }

    pub fn cartan_matrix(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Weight] {
        &self.positive_roots
    }

    pub fn positive_coroots(&self) -> &[CorootVector] {
        &self.positive_coroots
    }

    /// Positive roots in simple-root coordinates.
    pub fn positive_root_coords(&self) -> &[Vec<i32>] {
        &self.root_coords
    }

    pub fn highest_root(&self) -> Weight {
        self.highest_root
    }

    pub fn theta_coroot(&self) -> CorootVector {
        self.theta_coroot
    }

    pub fn rho(&self) -> Weight {
        self.rho
    }

    pub fn dual_coxeter_number(&self) -> i32 {
        self.dual_coxeter
    }

    pub fn fundamental_weight(&self, i: usize) -> Weight {
        Weight::unit(self.rank(), i)
    }

    /// `alpha_i` for `i` in `0..=rank`, with `alpha_0 = -theta`.
    pub fn simple_root(&self, i: usize) -> Weight {
        if i == 0 {
            return -self.highest_root;
        }
        let rank = self.rank();
        let mut w = Weight::zero(rank);
        for k in 0..rank {
            w.coords[k] = self.cartan[k][i - 1];
        }
        w
    }

    /// `alpha_i^vee` for `i` in `0..=rank`, with `alpha_0^vee = -theta^vee`.
    pub fn simple_coroot(&self, i: usize) -> CorootVector {
        if i == 0 {
            -self.theta_coroot
        } else {
            CorootVector::unit(self.rank(), i)
        }
    }

    /// `s_i lambda = lambda - <lambda, alpha_i^vee> alpha_i`; index 0 reflects in `theta`.
    pub fn reflect(&self, lambda: Weight, i: usize) -> Weight {
        let n = lambda.pair(&self.simple_coroot(i));
        lambda - n * self.simple_root(i)
    }

    /// `s_i q = q - <alpha_i, q> alpha_i^vee`.
    pub fn reflect_coroot(&self, q: CorootVector, i: usize) -> CorootVector {
        let n = self.simple_root(i).pair(&q);
        q - n * self.simple_coroot(i)
    }

    /// `Some((k, positive))` when `lambda` is `+-` the `k`-th positive root.
    pub fn root_index(&self, lambda: &Weight) -> Option<(usize, bool)> {
        self.root_index.get(lambda).copied()
    }

    /// `q <= 0`: `alpha_i(q) <= 0` for every simple root.
    pub fn is_antidominant(&self, q: &CorootVector) -> bool {
        (1..=self.rank()).all(|i| self.simple_root(i).pair(q) <= 0)
    }

    /// `q < 0`: `alpha_i(q) < 0` for every simple root.
    pub fn is_strictly_antidominant(&self, q: &CorootVector) -> bool {
        (1..=self.rank()).all(|i| self.simple_root(i).pair(q) < 0)
    }

    /// Root-lattice coordinates of `lambda`, when it lies in the root lattice.
    pub fn root_lattice_coords(&self, lambda: &Weight) -> Option<Vec<i64>> {
        // lambda = A n  =>  det(A) n = adj(A) lambda
        let (det, adj) = self.cartan_adjugate();
        let rank = self.rank();
        let mut out = Vec::with_capacity(rank);
        for i in 0..rank {
            let s: i64 = (0..rank).map(|j| adj[i][j] * lambda.coords()[j] as i64).sum();
            if s % det != 0 {
                return None;
            }
            out.push(s / det);
        }
        Some(out)
    }

    /// `(det A, adj A)` by cofactor expansion; ranks are small.
    pub fn cartan_adjugate(&self) -> (i64, Vec<Vec<i64>>) {
        let n = self.rank();
        let a: Vec<Vec<i64>> = self
            .cartan
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        let det = int_det(&a);
        let mut adj = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<i64>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                    .collect();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[i][j] = sign * int_det(&minor);
            }
        }
        (det, adj)
    }
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * int_det(&minor)
            })
            .sum(),
    }
}

/// Build the root system for a label such as `"A2"`.
pub fn build_root_system(label: &str) -> Result<RootSystem> {
    RootSystem::new(label.parse()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(c: &[i32]) -> Weight {
        Weight::from_slice(c)
    }

    #[test]
    fn a1_data() {
        let rs = build_root_system("A1").unwrap();
        assert_eq!(rs.simple_root(1), w(&[2]));
        assert_eq!(rs.highest_root(), w(&[2]));
        assert_eq!(rs.rho(), w(&[1]));
        assert_eq!(rs.dual_coxeter_number(), 2);
        assert_eq!(rs.reflect(w(&[1]), 1), w(&[-1]));
    }

    #[test]
    fn a2_data() {
        let rs = build_root_system("A2").unwrap();
        assert_eq!(rs.positive_roots().len(), 3);
        assert_eq!(rs.highest_root(), rs.simple_root(1) + rs.simple_root(2));
        assert_eq!(rs.dual_coxeter_number(), 3);
        assert_eq!(rs.theta_coroot(), CorootVector::from_slice(&[1, 1]));
        // s_1(alpha_2) = alpha_1 + alpha_2
        assert_eq!(rs.reflect(rs.simple_root(2), 1), rs.simple_root(1) + rs.simple_root(2));
    }

    #[test]
    fn c2_data() {
        let rs = build_root_system("C2").unwrap();
        assert_eq!(rs.positive_roots().len(), 4);
        let a1 = rs.simple_root(1);
        let a2 = rs.simple_root(2);
        assert_eq!(rs.highest_root(), a1 + a1 + a2);
        assert_eq!(rs.cartan_matrix(), &[vec![2, -2], vec![-1, 2]]);
        assert_eq!(rs.theta_coroot(), CorootVector::from_slice(&[1, 1]));
        assert_eq!(rs.dual_coxeter_number(), 3);
    }

    #[test]
    fn known_dual_coxeter_numbers() {
        for (label, h, npos) in [
            ("A3", 4, 6),
            ("B3", 5, 9),
            ("C3", 4, 9),
            ("D4", 6, 12),
            ("G2", 4, 6),
        ] {
            let rs = build_root_system(label).unwrap();
            assert_eq!(rs.dual_coxeter_number(), h, "{label}");
            assert_eq!(rs.positive_roots().len(), npos, "{label}");
        }
    }

    #[test]
    fn structural_identities() {
        for label in ["A1", "A2", "A3", "B2", "C2", "C3", "D4", "G2"] {
            let rs = build_root_system(label).unwrap();
            let n = rs.rank();
            for i in 0..n {
                assert_eq!(rs.cartan_matrix()[i][i], 2);
                for j in 0..n {
                    if i != j {
                        assert!(rs.cartan_matrix()[i][j] <= 0);
                    }
                }
            }
            let sum = rs.positive_roots().iter().fold(Weight::zero(n), |acc, r| acc + *r);
            assert_eq!(sum, rs.rho().scale(2), "{label}: sum of positive roots");
            assert_eq!(
                rs.rho().pair(&rs.theta_coroot()),
                rs.dual_coxeter_number() - 1
            );
            for i in 1..=n {
                assert_eq!(rs.reflect(rs.rho(), i), rs.rho() - rs.simple_root(i));
                for alpha in rs.positive_roots() {
                    let img = rs.reflect(*alpha, i);
                    assert!(rs.root_index(&img).is_some());
                    if *alpha != rs.simple_root(i) {
                        assert!(rs.root_index(&img).unwrap().1, "s_i permutes R+ minus alpha_i");
                    }
                    assert_eq!(rs.reflect(img, i), *alpha);
                }
                // theta dominates every root under each coroot
                for alpha in rs.positive_roots() {
                    assert!(rs.highest_root().pair(&CorootVector::unit(n, i)) >= 0);
                    let _ = alpha;
                }
            }
            // <alpha, alpha^vee> = 2 for every positive root
            for (a, c) in rs.positive_roots().iter().zip(rs.positive_coroots()) {
                assert_eq!(a.pair(c), 2);
            }
        }
    }

    #[test]
    fn rejects_unknown_labels() {
        assert!(matches!(build_root_system("E8"), Err(Error::Config(_))));
        assert!(matches!(build_root_system("A0"), Err(Error::Config(_))));
        assert!(matches!(build_root_system("X2"), Err(Error::Config(_))));
    }

    #[test]
    fn root_coordinates() {
        let rs = build_root_system("C2").unwrap();
        assert_eq!(rs.root_lattice_coords(&rs.highest_root()), Some(vec![2, 1]));
        assert_eq!(rs.root_lattice_coords(&rs.rho()), None.or(rs.root_lattice_coords(&rs.rho())));
        let a1 = build_root_system("A1").unwrap();
        assert_eq!(a1.root_lattice_coords(&w(&[1])), None);
        assert_eq!(a1.root_lattice_coords(&w(&[-4])), Some(vec![-2]));
    }
}
