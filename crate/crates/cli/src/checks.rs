//! Golden-value and property checks run by `selftest` and by the acceptance
//! target. Every check is deterministic: sampling uses fixed seeds and all
//! collections iterate in a fixed order.

use std::collections::BTreeMap;

use loopk_core::cartan::{CorootVector, Weight};
use loopk_core::conv::Convolver;
use loopk_core::kclass::{weyl_denominator, TensorClass};
use loopk_core::laurent::{solve_row_system, LaurentPoly};
use loopk_core::positivity::{qk_source_consistency, scan_convolution, scan_qk};
use loopk_core::qk::{default_depth, depth_stability_check, qk_product};
use loopk_core::weyl::{AffElem, WeylGroup};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Convolvers built once per type label.
#[derive(Default)]
pub struct Engines {
    built: BTreeMap<String, Convolver>,
}

impl Engines {
    pub fn get(&mut self, label: &str) -> std::result::Result<&Convolver, String> {
        if !self.built.contains_key(label) {
            let c = Convolver::from_label(label).map_err(|e| e.to_string())?;
            self.built.insert(label.to_string(), c);
        }
        Ok(&self.built[label])
    }
}

/// Restricts checks to the listed type labels; `None` runs everything.
#[derive(Clone, Debug, Default)]
pub struct TypeFilter(pub Option<Vec<String>>);

impl TypeFilter {
    fn allows(&self, label: &str) -> bool {
        self.0.as_ref().is_none_or(|l| l.iter().any(|t| t == label))
    }
}

struct Recorder<'a> {
    criterion: u32,
    filter: &'a TypeFilter,
    out: Vec<Check>,
}

impl Recorder<'_> {
    fn run(&mut self, label: &str, name: &str, engines: &mut Engines, f: impl FnOnce(&Convolver) -> Outcome) {
        if !self.filter.allows(label) {
            return;
        }
        let res = engines.get(label).and_then(f);
        let (passed, detail) = match res {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.out.push(Check { criterion: self.criterion, name: format!("{name} [{label}]"), passed, detail });
    }
}

fn word(g: &WeylGroup, w: &AffElem) -> String {
    format!("[{}]", WeylGroup::format_word(&g.reduced_word(w)))
}

fn render_table(g: &WeylGroup, t: &BTreeMap<AffElem, LaurentPoly>) -> String {
    let parts: Vec<String> = t.iter().map(|(w, c)| format!("{} -> {c}", word(g, w))).collect();
    format!("{{{}}}", parts.join(", "))
}

/// `τ_n = … s_0 s_1 s_0` with `n` letters, in type A1.
pub fn tau_n(g: &WeylGroup, n: usize) -> AffElem {
    let w: Vec<usize> = (0..n).map(|k| if (n - 1 - k).is_multiple_of(2) { 0 } else { 1 }).collect();
    g.aff_from_word(&w).expect("alternating words are valid")
}

fn mono(c: &[i32]) -> LaurentPoly {
    LaurentPoly::monomial(Weight::from_slice(c))
}

fn expect_table(g: &WeylGroup, got: &BTreeMap<AffElem, LaurentPoly>, want: &BTreeMap<AffElem, LaurentPoly>, what: &str) -> Outcome {
    ensure!(got == want, "{what}: got {} want {}", render_table(g, got), render_table(g, want));
    Ok(String::new())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// 1. SL2 convolution golden values

pub fn criterion_1(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 1, filter, out: Vec::new() };
    r.run("A1", "translations are even alternating words", engines, |c| {
        let g = c.group();
        for n in 0..=4 {
            let t = g.translation(CorootVector::from_slice(&[-(n as i32)]));
            ensure!(tau_n(g, 2 * n) == t, "τ_{} is not the translation by -{n} α^vee", 2 * n);
        }
        Ok("n <= 4".into())
    });
    r.run("A1", "[O_n] ⊙ [O_2m] = [O_(n+2m)]", engines, |c| {
        let g = c.group();
        let one = LaurentPoly::one(1);
        for n in 0..=5 {
            for m in 0..=2 {
                let got = c.convolve(&tau_n(g, n), &tau_n(g, 2 * m)).map_err(err)?;
                let want = BTreeMap::from([(tau_n(g, n + 2 * m), one.clone())]);
                expect_table(g, got.entries(), &want, &format!("n={n} m={m}"))?;
            }
        }
        Ok("n <= 5, m <= 2".into())
    });
    r.run("A1", "[O_(2n+1)] ⊙ [O_(2m+1)]", engines, |c| {
        let g = c.group();
        let ea = mono(&[2]);
        for n in 0..=2 {
            for m in 0..=2 {
                let got = c.convolve(&tau_n(g, 2 * n + 1), &tau_n(g, 2 * m + 1)).map_err(err)?;
                let want = BTreeMap::from([
                    (tau_n(g, 2 * n + 2 * m + 2), ea.clone()),
                    (tau_n(g, 2 * n + 2 * m + 3), LaurentPoly::one(1) - ea.clone()),
                ]);
                expect_table(g, got.entries(), &want, &format!("n={n} m={m}"))?;
            }
        }
        Ok("n, m <= 2".into())
    });
    r.run("A1", "[O_1] ⊙ [O_2m] through the Borel word [0,1]", engines, |c| {
        let g = c.group();
        for m in 0..=3 {
            let got = c.convolve_borel_word(&[0, 1], &tau_n(g, 2 * m)).map_err(err)?;
            let want = BTreeMap::from([(tau_n(g, 2 * m + 1), LaurentPoly::one(1))]);
            expect_table(g, got.entries(), &want, &format!("m={m}"))?;
        }
        Ok("m <= 3".into())
    });
    r.run("A1", "[O_1] ⊙ [O_(2m+1)] through the Borel word [0,1]", engines, |c| {
        let g = c.group();
        let ea = mono(&[2]);
        for m in 0..=3 {
            let got = c.convolve_borel_word(&[0, 1], &tau_n(g, 2 * m + 1)).map_err(err)?;
            let want = BTreeMap::from([
                (tau_n(g, 2 * m + 2), ea.clone()),
                (tau_n(g, 2 * m + 3), LaurentPoly::one(1) - ea.clone()),
            ]);
            expect_table(g, got.entries(), &want, &format!("m={m}"))?;
        }
        Ok("m <= 3".into())
    });
    r.out
}

// ---------------------------------------------------------------------------
// 2. Quantum K-theory of P^1

pub fn criterion_2(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 2, filter, out: Vec::new() };
    r.run("A1", "[O^s1] * [O^s1] at depths -1 and -2", engines, |c| {
        let g = c.group();
        let s = g.simple(1);
        let ea = mono(&[2]);
        let want = BTreeMap::from([
            ((g.identity(), CorootVector::from_slice(&[1])), ea.clone()),
            ((s, CorootVector::from_slice(&[0])), LaurentPoly::one(1) - ea.clone()),
        ]);
        let depths = [CorootVector::from_slice(&[-1]), CorootVector::from_slice(&[-2])];
        for d in depths {
            let got = qk_product(c, s, s, d).map_err(err)?.coefficients();
            ensure!(got == want, "depth {d}: got {got:?}");
        }
        let rep = depth_stability_check(c, s, s, &depths).map_err(err)?;
        ensure!(rep.stable, "unstable: {:?}", rep.discrepancies);
        Ok("e^α q^(α^vee) [O^e] + (1 - e^α) [O^s1]".into())
    });
    r.run("A2", "depth stability for all pairs", engines, |c| {
        let g = c.group();
        let d = default_depth(g.root_system());
        for x in g.elements() {
            for y in g.elements() {
                let rep = depth_stability_check(c, x, y, &[d, d.scale(2)]).map_err(err)?;
                ensure!(rep.stable, "{:?} x {:?}: {:?}", g.word(x), g.word(y), rep.discrepancies);
            }
        }
        Ok(format!("depths {d} and {}", d.scale(2)))
    });
    r.out
}

// ---------------------------------------------------------------------------
// 3. ζ-class identities

pub fn criterion_3(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 3, filter, out: Vec::new() };
    r.run("A1", "rank-one ζ classes and their transforms", engines, |c| {
        let g = c.group();
        let z = c.zeta();
        let (e, s) = (g.identity(), g.simple(1));
        let (rho, two_rho) = (Weight::from_slice(&[1]), Weight::from_slice(&[2]));
        let ze = z.class(e);
        let zs = z.class(s);
        let eq = |a: &TensorClass, b: &TensorClass| a.equivalent(b, g);
        let scaled = |k: LaurentPoly, t: &TensorClass| &TensorClass::pure(k, LaurentPoly::one(1)) * t;
        // values
        ensure!(eq(ze, &TensorClass::monomial(-rho, rho)), "ζ^e");
        ensure!(eq(zs, &(&TensorClass::one(1) - &TensorClass::monomial(-rho, rho))), "ζ^s1");
        // s'_0
        ensure!(eq(&ze.sprime(g, 0).map_err(err)?, &TensorClass::monomial(rho, rho)), "s'_0 ζ^e");
        let want = zs + &scaled(LaurentPoly::one_minus(two_rho), ze);
        ensure!(eq(&zs.sprime(g, 0).map_err(err)?, &want), "s'_0 ζ^s1");
        // D'_0
        ensure!(eq(&ze.dprime(g, 0).map_err(err)?, &scaled(-mono(&[2]), ze)), "D'_0 ζ^e");
        ensure!(eq(&zs.dprime(g, 0).map_err(err)?, &scaled(mono(&[2]), ze)), "D'_0 ζ^s1");
        // D'_1
        ensure!(eq(&ze.dprime(g, 1).map_err(err)?, ze), "D'_1 ζ^e");
        ensure!(eq(&zs.dprime(g, 1).map_err(err)?, &-ze), "D'_1 ζ^s1");
        Ok("values, s'_0, D'_0, D'_1".into())
    });
    for label in ["A1", "A2", "C2"] {
        r.run(label, "D'_0 ζ^e closed form", engines, |c| {
            let g = c.group();
            let rs = g.root_system();
            let ze = c.zeta().class(g.identity());
            ensure!(ze.equivalent(&TensorClass::monomial(-rs.rho(), rs.rho()), g), "ζ^e != e^-ρ ⊗ e^ρ");
            let mut factor = LaurentPoly::zero();
            for k in 1..rs.dual_coxeter_number() {
                factor -= &mono(rs.highest_root().scale(k).coords());
            }
            let want = &TensorClass::pure(factor.clone(), LaurentPoly::one(g.rank())) * ze;
            ensure!(ze.dprime(g, 0).map_err(err)?.equivalent(&want, g), "D'_0 ζ^e");
            Ok(format!("h^vee = {}, factor {factor}", rs.dual_coxeter_number()))
        });
        r.run(label, "Σ ζ^x = 1 ⊗ 1 and |ζ^x| = δ(x,e)", engines, |c| {
            let g = c.group();
            let mut total = TensorClass::zero();
            for x in g.elements() {
                let cls = c.zeta().class(x);
                total += cls;
                let want = if x == g.identity() { LaurentPoly::one(g.rank()) } else { LaurentPoly::zero() };
                // |·| on the tensor pairs, not through localization
                ensure!(cls.abs() == want, "|ζ^{:?}| = {}", g.word(x), cls.abs());
            }
            ensure!(total.equivalent(&TensorClass::one(g.rank()), g), "sum of ζ classes");
            Ok(format!("|W| = {}", g.order()))
        });
    }
    for label in ["A1", "A2"] {
        r.run(label, "top ζ class localizations and transpose", engines, |c| {
            let g = c.group();
            let rs = g.root_system();
            let l = g.rank();
            let wo = g.longest();
            let top = c.zeta().class(wo);
            for x in g.elements() {
                let want = if x == wo { weyl_denominator(g) } else { LaurentPoly::zero() };
                ensure!(top.localize(g, x) == want, "ζ^wo at {:?}", g.word(x));
            }
            let sign = if g.length(wo) % 2 == 0 { 1 } else { -1 };
            let rho = rs.rho();
            let t = top.transpose();
            let forms = [
                TensorClass::pure(LaurentPoly::constant(l, sign), mono((-rho.scale(2)).coords())),
                TensorClass::pure(LaurentPoly::constant(l, sign) * mono(rho.coords()), mono((-rho).coords())),
                TensorClass::pure(LaurentPoly::constant(l, sign) * mono(rho.scale(2).coords()), LaurentPoly::one(l)),
            ];
            for (k, f) in forms.iter().enumerate() {
                ensure!(t.equivalent(&(f * top), g), "transpose form {k}");
            }
            Ok("localizations and three transpose forms".into())
        });
        r.run(label, "Steinberg coordinates on either side", engines, |c| {
            let g = c.group();
            let sb = c.steinberg();
            for y in g.elements() {
                let loc = c.zeta().loc(y);
                // r E = (ζ(z))_z and q E = (z ζ(z^{-1}))_z
                let r = solve_row_system(&sb.e_matrix, &loc.0).map_err(err)?;
                let hat: Vec<LaurentPoly> =
                    g.elements().map(|z| loc.at(g.inv(z)).weyl_act(g, z)).collect();
                let q = solve_row_system(&sb.e_matrix, &hat).map_err(err)?;
                let mut left = TensorClass::zero();
                let mut right = TensorClass::zero();
                for (x, d) in sb.delta.iter().enumerate() {
                    left.push(r[x].clone(), mono(d.coords()));
                    right.push(mono(d.coords()), q[x].clone());
                }
                ensure!(left.equivalent(c.zeta().class(y), g), "r-coordinates of ζ^{:?}", g.word(y));
                ensure!(right.equivalent(c.zeta().class(y), g), "q-coordinates of ζ^{:?}", g.word(y));
            }
            Ok(format!("all {} classes", g.order()))
        });
    }
    r.out
}

// ---------------------------------------------------------------------------
// 4. Duality

pub fn criterion_4(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 4, filter, out: Vec::new() };
    for label in ["A1", "A2", "C2"] {
        r.run(label, "pairing(ζ^x, y) = δ(x,y)", engines, |c| {
            let g = c.group();
            for x in g.elements() {
                for y in g.elements() {
                    let p = c.zeta().class(x).pairing(g, y);
                    let want = if x == y { LaurentPoly::one(g.rank()) } else { LaurentPoly::zero() };
                    ensure!(p == want, "x={:?} y={:?}: {p}", g.word(x), g.word(y));
                }
            }
            Ok(format!("{} pairs", g.order() * g.order()))
        });
    }
    r.out
}

// ---------------------------------------------------------------------------
// 5. Operator properties

pub const RANDOM_CASES: usize = 120;

fn random_poly(rng: &mut ChaCha8Rng, rank: usize, terms: usize, spread: i32) -> LaurentPoly {
    let n = rng.gen_range(1..=terms);
    LaurentPoly::from_terms((0..n).map(|_| {
        let c: Vec<i32> = (0..rank).map(|_| rng.gen_range(-spread..=spread)).collect();
        (Weight::from_slice(&c), rng.gen_range(-3i64..=3))
    }))
}

fn nonzero_poly(rng: &mut ChaCha8Rng, rank: usize, terms: usize, spread: i32) -> LaurentPoly {
    loop {
        let p = random_poly(rng, rank, terms, spread);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn criterion_5(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 5, filter, out: Vec::new() };
    for label in ["A1", "A2", "C2"] {
        r.run(label, "D_i idempotent", engines, |c| {
            let rs = c.root_system();
            let mut rng = ChaCha8Rng::seed_from_u64(101);
            for _ in 0..RANDOM_CASES {
                let f = random_poly(&mut rng, rs.rank(), 5, 3);
                for i in 0..=rs.rank() {
                    let d = f.demazure_d(rs, i);
                    ensure!(d.demazure_d(rs, i) == d, "i={i} f={f}");
                    ensure!(d.reflect(rs, i) == d.shift(rs.simple_root(i)), "s_i D_i f != e^α_i D_i f, i={i} f={f}");
                }
            }
            Ok(format!("{RANDOM_CASES} inputs"))
        });
        r.run(label, "twisted Leibniz rule", engines, |c| {
            let rs = c.root_system();
            let mut rng = ChaCha8Rng::seed_from_u64(102);
            for _ in 0..RANDOM_CASES {
                let a = random_poly(&mut rng, rs.rank(), 4, 2);
                let b = random_poly(&mut rng, rs.rank(), 4, 2);
                for i in 0..=rs.rank() {
                    let lhs = (&a * &b).demazure_d(rs, i);
                    let rhs = &a.demazure_d(rs, i) * &b + &a.reflect(rs, i) * &b.demazure_d(rs, i);
                    ensure!(lhs == rhs, "i={i} a={a} b={b}");
                }
            }
            Ok(format!("{RANDOM_CASES} pairs"))
        });
        r.run(label, "D_i kills W-invariants", engines, |c| {
            let g = c.group();
            let rs = c.root_system();
            let mut rng = ChaCha8Rng::seed_from_u64(103);
            for _ in 0..RANDOM_CASES {
                let seed = random_poly(&mut rng, rs.rank(), 2, 2);
                let f = g.elements().fold(LaurentPoly::zero(), |acc, x| acc + seed.weyl_act(g, x));
                for i in 0..=rs.rank() {
                    ensure!(f.demazure_d(rs, i).is_zero(), "i={i} f={f}");
                }
            }
            Ok(format!("{RANDOM_CASES} symmetrized inputs"))
        });
        r.run(label, "exact division round trip", engines, |c| {
            let rs = c.root_system();
            let mut rng = ChaCha8Rng::seed_from_u64(104);
            for _ in 0..RANDOM_CASES {
                let f = random_poly(&mut rng, rs.rank(), 5, 3);
                let h = nonzero_poly(&mut rng, rs.rank(), 3, 2);
                ensure!((&f * &h).exact_div(&h).map_err(err)? == f, "f={f} g={h}");
                for i in 0..=rs.rank() {
                    let a = rs.simple_root(i);
                    let p = &f * &LaurentPoly::one_minus(a);
                    ensure!(p.div_one_minus_monomial(&a).map_err(err)? == f, "(1 - e^α_{i}) f={f}");
                }
            }
            Ok(format!("{RANDOM_CASES} pairs"))
        });
    }
    r.run("A2", "braid relation D1 D2 D1 = D2 D1 D2", engines, |c| {
        let rs = c.root_system();
        let mut rng = ChaCha8Rng::seed_from_u64(105);
        for _ in 0..RANDOM_CASES {
            let f = random_poly(&mut rng, 2, 5, 3);
            let a = f.demazure_d(rs, 1).demazure_d(rs, 2).demazure_d(rs, 1);
            let b = f.demazure_d(rs, 2).demazure_d(rs, 1).demazure_d(rs, 2);
            ensure!(a == b, "f={f}");
        }
        Ok(format!("{RANDOM_CASES} inputs"))
    });
    r.out
}

// ---------------------------------------------------------------------------
// 6. s'_i, D'_i on ζ classes and the transpose identities

pub fn criterion_6(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 6, filter, out: Vec::new() };
    for label in ["A1", "A2", "C2"] {
        r.run(label, "s'_i and D'_i on ζ^x", engines, |c| {
            let g = c.group();
            let l = g.rank();
            let z = c.zeta();
            let mut n = 0;
            for x in g.elements() {
                for i in 1..=l {
                    let sx = g.lmul(i, x);
                    let zx = z.class(x);
                    let ea = TensorClass::pure(mono(g.root_system().simple_root(i).coords()), LaurentPoly::one(l));
                    let (s_want, d_want) = if g.length(sx) > g.length(x) {
                        (&ea * zx, zx.clone())
                    } else {
                        let k = TensorClass::pure(LaurentPoly::one_minus(g.root_system().simple_root(i)), LaurentPoly::one(l));
                        (zx + &(&k * z.class(sx)), -z.class(sx))
                    };
                    ensure!(zx.sprime(g, i).map_err(err)?.equivalent(&s_want, g), "s'_{i} ζ^{:?}", g.word(x));
                    ensure!(zx.dprime(g, i).map_err(err)?.equivalent(&d_want, g), "D'_{i} ζ^{:?}", g.word(x));
                    n += 1;
                }
            }
            Ok(format!("{n} (x, i) cases"))
        });
    }
    r.run("A2", "transpose of ζ^x through D'' and 𝔇 chains", engines, |c| {
        let g = c.group();
        let rs = g.root_system();
        let l = g.rank();
        let z = c.zeta();
        let wo = g.longest();
        let rho = rs.rho();
        for x in g.elements() {
            let chain = g.word(g.mul(wo, g.inv(x))).to_vec();
            let sign = LaurentPoly::constant(l, if g.length(x) % 2 == 0 { 1 } else { -1 });
            let mut dd = z.class(wo).clone();
            let mut fd = z.class(wo).clone();
            for &i in &chain {
                dd = dd.dsecond(g, i).map_err(err)?;
                fd = fd.frak_d(g, i).map_err(err)?;
            }
            let t = z.class(x).transpose();
            let a = &TensorClass::pure(&sign * &mono(rho.scale(2).coords()), LaurentPoly::one(l)) * &dd;
            let twist = TensorClass::pure(&sign * &mono(rho.coords()), mono((-rho).coords()));
            let b = &twist * &fd;
            let cc = &twist * &z.opposite_structure_sheaf(g, g.inv(x));
            ensure!(t.equivalent(&a, g), "D'' form at x={:?}", g.word(x));
            ensure!(t.equivalent(&b, g), "𝔇 form at x={:?}", g.word(x));
            ensure!(t.equivalent(&cc, g), "opposite Schubert form at x={:?}", g.word(x));
        }
        Ok("all x in W".into())
    });
    r.out
}

// ---------------------------------------------------------------------------
// 7. Algebra structure of the convolution product

fn table_of(c: &Convolver, u: &AffElem, v: &AffElem) -> std::result::Result<BTreeMap<AffElem, LaurentPoly>, String> {
    Ok(c.convolve(u, v).map_err(err)?.entries().clone())
}

fn reps_up_to(g: &WeylGroup, max_len: usize) -> Vec<AffElem> {
    g.minimal_reps_by_length(max_len).into_iter().flatten().collect()
}

fn add_scaled(acc: &mut BTreeMap<AffElem, LaurentPoly>, k: &LaurentPoly, t: &BTreeMap<AffElem, LaurentPoly>) {
    for (w, c) in t {
        let e = acc.entry(*w).or_default();
        *e += &(k * c);
    }
    acc.retain(|_, c| !c.is_zero());
}

fn random_antidominant(rng: &mut ChaCha8Rng, c: &Convolver, low: i32) -> CorootVector {
    let rs = c.root_system();
    loop {
        let q: Vec<i32> = (0..rs.rank()).map(|_| rng.gen_range(low..=0)).collect();
        let q = CorootVector::from_slice(&q);
        if rs.is_antidominant(&q) {
            return q;
        }
    }
}

/// Pairs whose tables carry a label longer than `ℓ(u) + ℓ(v)`.
pub fn stated_bound_violations(c: &Convolver, max_len: usize) -> std::result::Result<Vec<String>, String> {
    let g = c.group();
    let reps = reps_up_to(g, max_len);
    let mut out = Vec::new();
    for (a, u) in reps.iter().enumerate() {
        for v in &reps[a..] {
            let t = table_of(c, u, v)?;
            let cap = g.length_affine(u) + g.length_affine(v);
            for (w, coeff) in &t {
                if g.length_affine(w) > cap {
                    out.push(format!(
                        "{} ⊙ {} has {} -> {coeff} with length {} > {cap}",
                        word(g, u),
                        word(g, v),
                        word(g, w),
                        g.length_affine(w)
                    ));
                }
            }
        }
    }
    Ok(out)
}

pub const COMMUTATIVITY_LENGTHS: [(&str, usize); 2] = [("A1", 4), ("A2", 3)];

pub fn criterion_7(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 7, filter, out: Vec::new() };
    for (label, max_len) in COMMUTATIVITY_LENGTHS {
        r.run(label, "commutativity", engines, |c| {
            let g = c.group();
            let reps = reps_up_to(g, max_len);
            let mut n = 0;
            for (a, u) in reps.iter().enumerate() {
                for v in &reps[a + 1..] {
                    let uv = table_of(c, u, v)?;
                    let vu = table_of(c, v, u)?;
                    ensure!(uv == vu, "{} ⊙ {}: {} vs {}", word(g, u), word(g, v), render_table(g, &uv), render_table(g, &vu));
                    n += 1;
                }
            }
            Ok(format!("{n} pairs with lengths <= {max_len}"))
        });
        r.run(label, "labels within the support bound", engines, |c| {
            // convolve refuses to return a table breaking the bound; this makes the sweep explicit
            let g = c.group();
            let reps = reps_up_to(g, max_len);
            for u in &reps {
                for v in &reps {
                    let bound = c.support_bound(u, v);
                    for w in table_of(c, u, v)?.keys() {
                        ensure!(g.length_affine(w) <= bound, "{} in {} ⊙ {}", word(g, w), word(g, u), word(g, v));
                    }
                }
            }
            Ok(format!("lengths <= {max_len}"))
        });
    }
    for (label, max_len, triples) in [("A1", 3, 10), ("A2", 2, 20)] {
        r.run(label, "associativity on sampled triples", engines, |c| {
            let g = c.group();
            let reps = reps_up_to(g, max_len);
            let mut rng = ChaCha8Rng::seed_from_u64(701);
            for _ in 0..triples {
                let a = *reps.choose(&mut rng).unwrap();
                let b = *reps.choose(&mut rng).unwrap();
                let d = *reps.choose(&mut rng).unwrap();
                let mut left = BTreeMap::new();
                for (w, k) in &table_of(c, &a, &b)? {
                    add_scaled(&mut left, k, &table_of(c, w, &d)?);
                }
                let mut right = BTreeMap::new();
                for (w, k) in &table_of(c, &b, &d)? {
                    add_scaled(&mut right, k, &table_of(c, &a, w)?);
                }
                ensure!(left == right, "({} ⊙ {}) ⊙ {}", word(g, &a), word(g, &b), word(g, &d));
            }
            Ok(format!("{triples} triples from lengths <= {max_len}"))
        });
    }
    for label in ["A1", "A2", "C2"] {
        r.run(label, "product with a translation class", engines, |c| {
            let g = c.group();
            let mut rng = ChaCha8Rng::seed_from_u64(702);
            let l = g.rank();
            for k in 0..12 {
                // arbitrary u in the affine group: Borel form
                let len = rng.gen_range(0..=3);
                let uw: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=l)).collect();
                let u = g.aff_from_word(&uw).map_err(err)?;
                let q = random_antidominant(&mut rng, c, if l == 1 { -2 } else { -1 });
                let tq = g.translation(q);
                let got = c.convolve_borel_word(&g.reduced_word(&u), &tq).map_err(err)?;
                let want = BTreeMap::from([(g.min_coset_rep(&g.demazure_product(&u, &tq)), LaurentPoly::one(l))]);
                expect_table(g, got.entries(), &want, &format!("case {k} Borel {}", word(g, &u)))?;
                // minimal u: lengths add and the product is the plain translate
                let um = g.min_coset_rep(&u);
                let prod = g.aff_mul(&um, &tq);
                ensure!(
                    g.length_affine(&prod) == g.length_affine(&um) + g.length_affine(&tq),
                    "lengths do not add for {} τ_{q}",
                    word(g, &um)
                );
                let got = table_of(c, &um, &tq)?;
                expect_table(g, &got, &BTreeMap::from([(prod, LaurentPoly::one(l))]), &format!("case {k}"))?;
            }
            Ok("12 sampled (u, q)".into())
        });
        r.run(label, "translation shift of structure constants", engines, |c| {
            let g = c.group();
            let mut rng = ChaCha8Rng::seed_from_u64(703);
            let reps = reps_up_to(g, 2);
            for k in 0..12 {
                let u = *reps.choose(&mut rng).unwrap();
                let v = *reps.choose(&mut rng).unwrap();
                let q1 = random_antidominant(&mut rng, c, -1);
                let q2 = random_antidominant(&mut rng, c, -1);
                let shift = |w: &AffElem, q: CorootVector| g.aff_mul(w, &g.translation(q));
                let base = table_of(c, &u, &v)?;
                let want: BTreeMap<AffElem, LaurentPoly> =
                    base.iter().map(|(w, p)| (shift(w, q1 + q2), p.clone())).collect();
                let got = table_of(c, &shift(&u, q1), &shift(&v, q2))?;
                expect_table(g, &got, &want, &format!("case {k}: {} {}, q1={q1} q2={q2}", word(g, &u), word(g, &v)))?;
            }
            Ok("12 sampled (u, v, q1, q2)".into())
        });
    }
    r.out
}

// ---------------------------------------------------------------------------
// 8. Positivity scans

pub const SCAN_LENGTHS: [(&str, usize); 2] = [("A1", 8), ("A2", 6)];

pub fn criterion_8(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 8, filter, out: Vec::new() };
    for (label, max_len) in SCAN_LENGTHS {
        r.run(label, "convolution positivity scan", engines, |c| {
            let rep = scan_convolution(c, 0..=max_len).map_err(err)?;
            ensure!(!rep.incomplete, "incomplete: {:?}", rep.skipped);
            ensure!(rep.ok(), "{} FAIL: {}", rep.failures.len(), serde_json::to_string(&rep.failures).unwrap());
            Ok(format!("{} pairs, {} constants, max |coeff| {}", rep.pairs, rep.constants, rep.max_abs_coeff))
        });
        r.run(label, "quantum positivity scan", engines, |c| {
            let g = c.group();
            let d = default_depth(g.root_system());
            let rep = scan_qk(c, g.length(g.longest()), d).map_err(err)?;
            ensure!(!rep.incomplete, "incomplete: {:?}", rep.skipped);
            ensure!(rep.ok(), "{} FAIL: {}", rep.failures.len(), serde_json::to_string(&rep.failures).unwrap());
            Ok(format!("{} pairs, {} constants at depth {d}", rep.pairs, rep.constants))
        });
    }
    r.out
}

// ---------------------------------------------------------------------------
// 9. Quantum constants against their sources

pub fn criterion_9(engines: &mut Engines, filter: &TypeFilter) -> Vec<Check> {
    let mut r = Recorder { criterion: 9, filter, out: Vec::new() };
    for label in ["A1", "A2"] {
        r.run(label, "quantum constants match sourcing convolution constants", engines, |c| {
            let d = default_depth(c.root_system());
            let rep = qk_source_consistency(c, d).map_err(err)?;
            ensure!(rep.mismatches.is_empty(), "{:?}", rep.mismatches);
            ensure!(rep.constants > 0, "no constants checked");
            Ok(format!("{} constants at depth {d}", rep.constants))
        });
    }
    r.out
}

pub type CriterionFn = fn(&mut Engines, &TypeFilter) -> Vec<Check>;

pub const CRITERIA: [(u32, CriterionFn); 9] = [
    (1, criterion_1),
    (2, criterion_2),
    (3, criterion_3),
    (4, criterion_4),
    (5, criterion_5),
    (6, criterion_6),
    (7, criterion_7),
    (8, criterion_8),
    (9, criterion_9),
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub types: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    /// Known disagreements between published bounds and computed tables.
    /// These are reported, not counted as failures; see the README.
    pub discrepancies: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

pub fn run_suite(filter: &TypeFilter) -> SuiteReport {
    let mut engines = Engines::default();
    let mut checks = Vec::new();
    for (_, f) in CRITERIA {
        checks.extend(f(&mut engines, filter));
    }
    let mut discrepancies = Vec::new();
    for (label, max_len) in COMMUTATIVITY_LENGTHS {
        if filter.allows(label) {
            match engines.get(label).and_then(|c| stated_bound_violations(c, max_len)) {
                Ok(v) => discrepancies.extend(v.into_iter().map(|s| format!("[{label}] {s}"))),
                Err(e) => discrepancies.push(format!("[{label}] {e}")),
            }
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    SuiteReport {
        types: filter.0.clone().unwrap_or_default(),
        passed: checks.len() - failed,
        failed,
        checks,
        discrepancies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_words() {
        let c = Convolver::from_label("A1").unwrap();
        let g = c.group();
        assert_eq!(g.reduced_word(&tau_n(g, 3)), vec![0, 1, 0]);
        assert_eq!(g.reduced_word(&tau_n(g, 2)), vec![1, 0]);
        assert_eq!(tau_n(g, 0), g.aff_identity());
    }

    #[test]
    fn filter_skips_other_types() {
        let mut e = Engines::default();
        let f = TypeFilter(Some(vec!["A2".into()]));
        assert!(criterion_1(&mut e, &f).is_empty());
        assert!(!criterion_4(&mut e, &f).is_empty());
    }

    #[test]
    fn failing_check_is_recorded_not_panicking() {
        let mut e = Engines::default();
        let filter = TypeFilter::default();
        let mut r = Recorder { criterion: 0, filter: &filter, out: Vec::new() };
        r.run("A1", "always fails", &mut e, |_| Err("boom".into()));
        r.run("Z9", "bad type", &mut e, |_| Ok(String::new()));
        assert!(r.out.iter().all(|c| !c.passed));
        assert_eq!(r.out[0].detail, "boom");
    }
}
