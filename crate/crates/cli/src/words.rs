//! Parsing of group elements given on the command line.
//!
//! Words are simple-reflection indices separated by commas or spaces; the
//! empty string is the identity. Affine elements may also be written as
//! `x@q`, a finite word and a coroot vector, e.g. `1@-1` or `@-1,-1`.

use loopk_core::cartan::CorootVector;
use loopk_core::weyl::{AffElem, WeylElem, WeylGroup};

/// A parsed element plus a note when the input word was not reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warning: Option<String>,
}

pub fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("invalid index {t:?} in word {s:?}")))
        .collect()
}

fn parse_ints(s: &str) -> Result<Vec<i32>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i32>().map_err(|_| format!("invalid integer {t:?} in {s:?}")))
        .collect()
}

pub fn parse_coroot(g: &WeylGroup, s: &str) -> Result<CorootVector, String> {
    let v = parse_ints(s)?;
    if v.len() != g.rank() {
        return Err(format!("expected {} coordinates, got {:?}", g.rank(), s));
    }
    Ok(CorootVector::from_slice(&v))
}

pub fn parse_finite(g: &WeylGroup, s: &str) -> Result<Parsed<WeylElem>, String> {
    let word = parse_indices(s)?;
    if let Some(&i) = word.iter().find(|&&i| i == 0 || i > g.rank()) {
        return Err(format!("index {i} is outside 1..={}", g.rank()));
    }
    let x = g.from_word(&word).map_err(|e| e.to_string())?;
    let warning = (g.length(x) != word.len()).then(|| {
        format!("word [{}] is not reduced; using [{}]", WeylGroup::format_word(&word), WeylGroup::format_word(g.word(x)))
    });
    Ok(Parsed { value: x, warning })
}

pub fn parse_affine(g: &WeylGroup, s: &str) -> Result<Parsed<AffElem>, String> {
    if let Some((x, q)) = s.split_once('@') {
        let x = parse_finite(g, x)?;
        let q = parse_coroot(g, q)?;
        return Ok(Parsed { value: AffElem { x: x.value, q }, warning: x.warning });
    }
    let word = parse_indices(s)?;
    if let Some(&i) = word.iter().find(|&&i| i > g.rank()) {
        return Err(format!("index {i} is outside 0..={}", g.rank()));
    }
    let w = g.aff_from_word(&word).map_err(|e| e.to_string())?;
    let warning = (g.length_affine(&w) != word.len()).then(|| {
        format!(
            "word [{}] is not reduced; using [{}]",
            WeylGroup::format_word(&word),
            WeylGroup::format_word(&g.reduced_word(&w))
        )
    });
    Ok(Parsed { value: w, warning })
}
