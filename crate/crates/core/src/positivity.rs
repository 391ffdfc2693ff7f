//! Membership of signed structure constants in `Z_+[x_1, …, x_l]` with
//! `x_i = e^{α_i} - 1`, and scans over ranges of products.
//!
//! A FAIL is a report outcome carrying full provenance, never a panic: the
//! predicate is not known to hold, so counterexamples are reported, never panicked on.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::{CorootVector, RootSystem, Weight};
use crate::conv::Convolver;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::qk::qk_product;
use crate::weyl::{AffElem, WeylElem, WeylGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    FailNotInRing,
    FailNegativeCoeff,
}

/// Polynomial in `x_1, …, x_l`, keyed by exponent vectors.
pub type XPoly = BTreeMap<Vec<u32>, BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivityVerdict {
    pub status: Status,
    /// The offending `e^λ` term or `x`-monomial, rendered.
    pub witness: Option<String>,
    /// The expansion of the signed input; empty unless the status is PASS.
    pub x_polynomial: XPoly,
}

impl PositivityVerdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl Serialize for PositivityVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exponent: &'a [u32],
            coeff: String,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            status: Status,
            witness: &'a Option<String>,
            x_polynomial: Vec<Term<'a>>,
        }
        Repr {
            status: self.status,
            witness: &self.witness,
            x_polynomial: self
                .x_polynomial
                .iter()
                .map(|(k, c)| Term { exponent: k, coeff: c.to_string() })
                .collect(),
        }
        .serialize(s)
    }
}

pub fn format_xpoly(p: &XPoly) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, c) in p {
        let mono: Vec<String> = k
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
            .collect();
        let (neg, mag) = (c.is_negative(), c.abs());
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match (mono.is_empty(), mag.is_one()) {
            (true, _) => out.push_str(&mag.to_string()),
            (false, true) => out.push_str(&mono.join("*")),
            (false, false) => out.push_str(&format!("{mag}*{}", mono.join("*"))),
        }
    }
    out
}

/// Substitutes `x_i = e^{α_i} - 1`.
pub fn substitute_x(rs: &RootSystem, p: &XPoly) -> LaurentPoly {
    let l = rs.rank();
    let x: Vec<LaurentPoly> = (1..=l)
        .map(|i| LaurentPoly::monomial(rs.simple_root(i)) - LaurentPoly::one(l))
        .collect();
    let mut out = LaurentPoly::zero();
    for (k, c) in p {
        let mut term = LaurentPoly::constant(l, c.clone());
        for (i, &e) in k.iter().enumerate() {
            for _ in 0..e {
                term = &term * &x[i];
            }
        }
        out += &term;
    }
    out
}

/// Decides positivity; memoizes root-lattice coordinates of exponents.
pub struct PositivityChecker<'a> {
    rs: &'a RootSystem,
    coords: HashMap<Weight, Option<Vec<i64>>>,
}

impl<'a> PositivityChecker<'a> {
    pub fn new(rs: &'a RootSystem) -> Self {
        PositivityChecker { rs, coords: HashMap::new() }
    }

    fn root_coords(&mut self, lambda: &Weight) -> Option<Vec<i64>> {
        let rs = self.rs;
        self.coords.entry(*lambda).or_insert_with(|| rs.root_lattice_coords(lambda)).clone()
    }

    pub fn check(&mut self, c: &LaurentPoly, sign_exponent: i64) -> PositivityVerdict {
        let negate = sign_exponent.rem_euclid(2) == 1;
        let mut xp: XPoly = BTreeMap::new();
        for (lambda, coeff) in c.terms() {
            let coeff = if negate { -coeff.clone() } else { coeff.clone() };
            let n = match self.root_coords(lambda) {
                Some(n) if n.iter().all(|&k| k >= 0) => n,
                _ => {
                    return PositivityVerdict {
                        status: Status::FailNotInRing,
                        witness: Some(format!("{coeff}*e^{lambda}")),
                        x_polynomial: XPoly::new(),
                    }
                }
            };
            // e^{Σ n_i α_i} = Π (1 + x_i)^{n_i}
            let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), coeff)];
            for &ni in &n {
                let ni = ni as u32;
                let mut next = Vec::with_capacity(partial.len() * (ni as usize + 1));
                for (k, c) in &partial {
                    for e in 0..=ni {
                        let mut k2 = k.clone();
                        k2.push(e);
                        next.push((k2, c * binomial(BigInt::from(ni), BigInt::from(e))));
                    }
                }
                partial = next;
            }
            for (k, c) in partial {
                *xp.entry(k).or_insert_with(BigInt::zero) += c;
            }
        }
        xp.retain(|_, c| !c.is_zero());
        if let Some((k, c)) = xp.iter().find(|(_, c)| c.is_negative()) {
            let mut single = XPoly::new();
            single.insert(k.clone(), c.clone());
            return PositivityVerdict {
                status: Status::FailNegativeCoeff,
                witness: Some(format_xpoly(&single)),
                x_polynomial: XPoly::new(),
            };
        }
        PositivityVerdict { status: Status::Pass, witness: None, x_polynomial: xp }
    }
}

/// Tests whether `(-1)^sign_exponent c` lies in `Z_+[e^{α_1} - 1, …, e^{α_l} - 1]`.
pub fn check_positive(rs: &RootSystem, c: &LaurentPoly, sign_exponent: i64) -> PositivityVerdict {
    PositivityChecker::new(rs).check(c, sign_exponent)
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub left: String,
    pub right: String,
    pub target: String,
    pub coeff: String,
    pub sign_exponent: i64,
    pub verdict: PositivityVerdict,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ScanReport {
    pub kind: String,
    pub type_label: String,
    pub pairs: usize,
    pub constants: usize,
    pub passes: usize,
    pub failures: Vec<Failure>,
    /// Set when some pair was skipped because it exceeded a resource cap.
    pub incomplete: bool,
    pub skipped: Vec<String>,
    pub max_abs_coeff: String,
    pub max_x_coeff: String,
}

impl ScanReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn render_aff(g: &WeylGroup, w: &AffElem) -> String {
    format!("[{}]", WeylGroup::format_word(&g.reduced_word(w)))
}

fn render_fin(g: &WeylGroup, w: WeylElem) -> String {
    format!("[{}]", WeylGroup::format_word(g.word(w)))
}

struct PairOutcome {
    checked: Vec<(LaurentPoly, PositivityVerdict, Failure)>,
    skipped: Option<String>,
}

fn aggregate(kind: &str, type_label: String, outcomes: Vec<PairOutcome>) -> ScanReport {
    let mut rep = ScanReport { kind: kind.into(), type_label, pairs: outcomes.len(), ..Default::default() };
    let mut max_abs = BigInt::zero();
    let mut max_x = BigInt::zero();
    for o in outcomes {
        if let Some(s) = o.skipped {
            rep.incomplete = true;
            rep.skipped.push(s);
        }
        for (c, verdict, failure) in o.checked {
            rep.constants += 1;
            max_abs = max_abs.max(c.max_abs_coeff());
            if verdict.passed() {
                rep.passes += 1;
                for v in verdict.x_polynomial.values() {
                    max_x = max_x.clone().max(v.clone());
                }
            } else {
                rep.failures.push(failure);
            }
        }
    }
    rep.max_abs_coeff = max_abs.to_string();
    rep.max_x_coeff = max_x.to_string();
    rep
}

/// Checks `(-1)^{ℓ(u)+ℓ(v)-ℓ(w)} p^w_{u,v}` for unordered pairs of minimal
/// representatives with lengths in `lengths`.
pub fn scan_convolution(conv: &Convolver, lengths: RangeInclusive<usize>) -> Result<ScanReport> {
    let g = conv.group();
    let type_label = g.root_system().cartan_type().to_string();
    if lengths.is_empty() {
        return Ok(aggregate("convolution", type_label, Vec::new()));
    }
    let reps: Vec<AffElem> = g
        .minimal_reps_by_length(*lengths.end())
        .into_iter()
        .skip(*lengths.start())
        .flatten()
        .collect();
    let mut pairs = Vec::new();
    for (a, u) in reps.iter().enumerate() {
        for v in &reps[a..] {
            pairs.push((*u, *v));
        }
    }
    let outcomes: Vec<Result<PairOutcome>> = pairs
        .par_iter()
        .map_init(
            || PositivityChecker::new(g.root_system()),
            |checker, (u, v)| {
                let table = match conv.convolve(u, v) {
                    Ok(t) => t,
                    Err(e @ Error::LengthCap { .. }) => {
                        return Ok(PairOutcome {
                            checked: Vec::new(),
                            skipped: Some(format!("{} x {}: {e}", render_aff(g, u), render_aff(g, v))),
                        })
                    }
                    Err(e) => return Err(e),
                };
                let (lu, lv) = (g.length_affine(u) as i64, g.length_affine(v) as i64);
                let checked = table
                    .iter()
                    .map(|(w, c)| {
                        let s = lu + lv - g.length_affine(w) as i64;
                        let verdict = checker.check(c, s);
                        let failure = Failure {
                            left: render_aff(g, u),
                            right: render_aff(g, v),
                            target: render_aff(g, w),
                            coeff: c.to_string(),
                            sign_exponent: s,
                            verdict: verdict.clone(),
                        };
                        (c.clone(), verdict, failure)
                    })
                    .collect();
                Ok(PairOutcome { checked, skipped: None })
            },
        )
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(aggregate("convolution", type_label, outcomes))
}

/// Checks `(-1)^{ℓ(x)+ℓ(y)-ℓ(z)} d^{z,η}_{x,y}` for all `x, y ∈ W` with
/// `ℓ(x), ℓ(y) <= max_word_len`.
pub fn scan_qk(conv: &Convolver, max_word_len: usize, depth: CorootVector) -> Result<ScanReport> {
    let g = conv.group();
    if !g.root_system().is_strictly_antidominant(&depth) || depth.rank() != g.rank() {
        return Err(Error::Argument(format!("depth {depth} is not strictly antidominant")));
    }
    let elems: Vec<WeylElem> = g.elements().filter(|&x| g.length(x) <= max_word_len).collect();
    let pairs: Vec<(WeylElem, WeylElem)> =
        elems.iter().flat_map(|&x| elems.iter().map(move |&y| (x, y))).collect();
    let outcomes: Vec<Result<PairOutcome>> = pairs
        .par_iter()
        .map_init(
            || PositivityChecker::new(g.root_system()),
            |checker, &(x, y)| {
                let table = match qk_product(conv, x, y, depth) {
                    Ok(t) => t,
                    Err(Error::LengthCap { len, cap }) => {
                        return Ok(PairOutcome {
                            checked: Vec::new(),
                            skipped: Some(format!(
                                "{} x {}: word length {len} exceeds cap {cap}",
                                render_fin(g, x),
                                render_fin(g, y)
                            )),
                        })
                    }
                    Err(e) => return Err(e),
                };
                let checked = table
                    .entries
                    .iter()
                    .map(|((z, eta), entry)| {
                        let s = g.length(x) as i64 + g.length(y) as i64 - g.length(*z) as i64;
                        let verdict = checker.check(&entry.coeff, s);
                        let failure = Failure {
                            left: render_fin(g, x),
                            right: render_fin(g, y),
                            target: format!("{} q^{eta}", render_fin(g, *z)),
                            coeff: entry.coeff.to_string(),
                            sign_exponent: s,
                            verdict: verdict.clone(),
                        };
                        (entry.coeff.clone(), verdict, failure)
                    })
                    .collect();
                Ok(PairOutcome { checked, skipped: None })
            },
        )
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(aggregate("qk", g.root_system().cartan_type().to_string(), outcomes))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SourceConsistencyReport {
    pub constants: usize,
    /// Descriptions of every disagreement; empty when consistent.
    pub mismatches: Vec<String>,
}

/// For every `d^{z,η}_{x,y}` at the given depth: recomputes the sourcing
/// constant `p^{z τ_β}_{y τ_d, x τ_d}` with the factors swapped, checks the
/// lengths `ℓ(x τ_d) = ℓ(τ_d) - ℓ(x)` and the evenness of `ℓ(τ_β)`, and checks
/// that both sign exponents agree mod 2 and give the same verdict.
pub fn qk_source_consistency(conv: &Convolver, depth: CorootVector) -> Result<SourceConsistencyReport> {
    let g = conv.group();
    let rs = g.root_system();
    let mut checker = PositivityChecker::new(rs);
    let mut rep = SourceConsistencyReport::default();
    let tau_len = |q: CorootVector| g.length_affine(&g.translation(q)) as i64;
    for x in g.elements() {
        for y in g.elements() {
            let table = qk_product(conv, x, y, depth)?;
            let u = AffElem { x, q: depth };
            let v = AffElem { x: y, q: depth };
            let swapped = conv.convolve(&v, &u)?;
            for ((z, eta), entry) in &table.entries {
                rep.constants += 1;
                let w = entry.source;
                let tag = format!("x={} y={} z={} eta={eta}", render_fin(g, x), render_fin(g, y), render_fin(g, *z));
                let p = swapped.get(&w);
                if p != entry.coeff {
                    rep.mismatches.push(format!("{tag}: d = {} but swapped p = {p}", entry.coeff));
                }
                for (elem, fin) in [(u, x), (v, y), (w, *z)] {
                    let lhs = g.length_affine(&elem) as i64;
                    let rhs = tau_len(elem.q) - g.length(fin) as i64;
                    if lhs != rhs {
                        rep.mismatches.push(format!("{tag}: length {lhs} of {} is not {rhs}", render_aff(g, &elem)));
                    }
                }
                if tau_len(w.q) % 2 != 0 {
                    rep.mismatches.push(format!("{tag}: translation length {} is odd", tau_len(w.q)));
                }
                let s_qk = g.length(x) as i64 + g.length(y) as i64 - g.length(*z) as i64;
                let s_conv = g.length_affine(&u) as i64 + g.length_affine(&v) as i64 - g.length_affine(&w) as i64;
                if (s_qk - s_conv).rem_euclid(2) != 0 {
                    rep.mismatches.push(format!("{tag}: sign exponents {s_qk} and {s_conv} differ in parity"));
                }
                let a = checker.check(&entry.coeff, s_qk);
                let b = checker.check(&p, s_conv);
                if a != b {
                    rep.mismatches.push(format!("{tag}: verdicts {:?} and {:?} differ", a.status, b.status));
                }
            }
        }
    }
    Ok(rep)
}
