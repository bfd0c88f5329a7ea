//! Group presentations: words over signed generators, the text format used
//! on disk, and the exact invariants used to compare fundamental groups.

mod abelian;
mod finite;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use abelian::{first_homology, relator_matrix, smith_normal_form, Homology, IntegerMatrix};
pub use finite::{count_homomorphisms, FiniteGroupTable, GroupError, HomCountError, HOM_ENUMERATION_BUDGET};

/// 1-based generator index; generator `i` is realized by vase `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u32", into = "u32"))]
pub struct GeneratorId(u32);

impl GeneratorId {
    pub fn new(index: u32) -> Option<Self> {
        (index >= 1).then_some(Self(index))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u32> for GeneratorId {
    type Error = &'static str;

    fn try_from(value: u32) -> Result<Self, Self::Error> {
        Self::new(value).ok_or("generator index must be at least 1")
    }
}

impl From<GeneratorId> for u32 {
    fn from(id: GeneratorId) -> u32 {
        id.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Letter {
    pub generator: GeneratorId,
    pub sign: Sign,
}

impl Letter {
    pub fn new(generator: GeneratorId, sign: Sign) -> Self {
        Self { generator, sign }
    }

    pub fn inverse(self) -> Self {
        Self { generator: self.generator, sign: self.sign.flip() }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.sign != other.sign
    }
}

/// A word in the free group, stored exactly as given (possibly unreduced).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds a word from `(generator index, exponent sign)` pairs, e.g.
    /// `[(1, 1), (2, -1)]` for `g1 g2⁻¹`. Panics on index 0 or sign 0.
    pub fn from_pairs(pairs: &[(u32, i32)]) -> Self {
        pairs
            .iter()
            .map(|&(g, s)| {
                let generator = GeneratorId::new(g).expect("generator index must be >= 1");
                let sign = match s.signum() {
                    1 => Sign::Plus,
                    -1 => Sign::Minus,
                    _ => panic!("letter sign must be nonzero"),
                };
                Letter::new(generator, sign)
            })
            .collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used, 0 for the empty word.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.generator.index()).max().unwrap_or(0)
    }

    pub fn exponent_sum(&self, generator: GeneratorId) -> i64 {
        self.0.iter().filter(|l| l.generator == generator).map(|l| l.sign.value()).sum()
    }

    pub fn inverse(&self) -> Word {
        self.0.iter().rev().map(|l| l.inverse()).collect()
    }

    /// Cancels adjacent `x x⁻¹` pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &letter in &self.0 {
            match out.last() {
                Some(&top) if top.cancels(letter) => {
                    out.pop();
                }
                _ => out.push(letter),
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    /// Renders the word with the given generator names, `'` marking inverses.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        WordDisplay { word: self, names }
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Free-group reduction; see [`Word::free_reduce`].
pub fn free_reduce(word: &Word) -> Word {
    word.free_reduce()
}

struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, letter) in self.word.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            match self.names.get(letter.generator.index() - 1) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "g{}", letter.generator.index())?,
            }
            if letter.sign == Sign::Minus {
                f.write_str("'")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&[]).fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PresentationError {
    #[error("presentation needs at least one generator")]
    NoGenerators,
    #[error("relator {relator} uses generator {generator} but only {count} generators exist")]
    GeneratorOutOfRange { relator: usize, generator: usize, count: usize },
    #[error("relator count {requested} out of range (presentation has {available})")]
    RelatorCountOutOfRange { requested: usize, available: usize },
}

/// `⟨g₁ … gₙ | r₁ … r_K⟩` with human-readable generator names.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        if generators.is_empty() {
            return Err(PresentationError::NoGenerators);
        }
        for (k, r) in relators.iter().enumerate() {
            let g = r.max_generator();
            if g > generators.len() {
                return Err(PresentationError::GeneratorOutOfRange {
                    relator: k + 1,
                    generator: g,
                    count: generators.len(),
                });
            }
        }
        Ok(Self { generators, relators })
    }

    /// Free group on `n` generators named `g1 … gn`.
    pub fn free(n: usize) -> Result<Self, PresentationError> {
        Self::new((1..=n).map(|i| alloc::format!("g{i}")).collect(), Vec::new())
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Same generators, first `k` relators.
    pub fn truncate(&self, k: usize) -> Result<Presentation, PresentationError> {
        if k > self.relators.len() {
            return Err(PresentationError::RelatorCountOutOfRange {
                requested: k,
                available: self.relators.len(),
            });
        }
        Ok(Presentation { generators: self.generators.clone(), relators: self.relators[..k].to_vec() })
    }

    /// Keeps only the first `n` generators. Fails if a relator needs a
    /// dropped generator.
    pub fn restrict_generators(&self, n: usize) -> Result<Presentation, PresentationError> {
        let generators: Vec<String> = self.generators.iter().take(n).cloned().collect();
        Presentation::new(generators, self.relators.clone())
    }

    pub fn with_relators(&self, relators: Vec<Word>) -> Result<Presentation, PresentationError> {
        Presentation::new(self.generators.clone(), relators)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens:")?;
        for g in &self.generators {
            write!(f, " {g}")?;
        }
        for r in &self.relators {
            write!(f, "\nrel: {}", r.display_with(&self.generators))?;
        }
        Ok(())
    }
}

/// `first k relators, same generators`.
pub fn truncate_presentation(p: &Presentation, k: usize) -> Result<Presentation, PresentationError> {
    p.truncate(k)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected `gens:` or `rel:`")]
    UnknownDirective,
    #[error("`rel:` before any `gens:` line")]
    RelatorBeforeGenerators,
    #[error("second `gens:` line")]
    DuplicateGensLine,
    #[error("missing `gens:` line")]
    MissingGenerators,
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Whitespace-separated tokens of `s` with their 0-based byte offsets.
fn tokens(s: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = s;
    let mut offset = 0;
    core::iter::from_fn(move || {
        let skip = rest.len() - rest.trim_start().len();
        rest = &rest[skip..];
        offset += skip;
        if rest.is_empty() {
            return None;
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = (offset, &rest[..end]);
        rest = &rest[end..];
        offset += end;
        Some(tok)
    })
}

/// Parses the line-oriented presentation format:
///
/// ```text
/// gens: a b        # generator order defines indices 1..n
/// rel: a b a' b'   # ' marks an inverse
/// ```
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut generators: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    let err = |line: usize, column: usize, kind| ParseError { line, column, kind };

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let lead = content.len() - content.trim_start().len();
        let body = content.trim_start();
        if body.trim().is_empty() {
            continue;
        }
        let (directive, rest_offset) = if let Some(rest) = body.strip_prefix("gens:") {
            ("gens", (rest, lead + 5))
        } else if let Some(rest) = body.strip_prefix("rel:") {
            ("rel", (rest, lead + 4))
        } else {
            return Err(err(line_no, lead + 1, ParseErrorKind::UnknownDirective));
        };
        let (rest, base) = rest_offset;

        if directive == "gens" {
            if generators.is_some() {
                return Err(err(line_no, lead + 1, ParseErrorKind::DuplicateGensLine));
            }
            let mut names: Vec<String> = Vec::new();
            for (off, tok) in tokens(rest) {
                let column = base + off + 1;
                if !valid_name(tok) {
                    return Err(err(line_no, column, ParseErrorKind::InvalidToken(tok.to_string())));
                }
                if names.iter().any(|n| n == tok) {
                    return Err(err(line_no, column, ParseErrorKind::DuplicateGenerator(tok.to_string())));
                }
                names.push(tok.to_string());
            }
            if names.is_empty() {
                return Err(err(line_no, lead + 1, ParseErrorKind::EmptyGenerators));
            }
            generators = Some(names);
        } else {
            let Some(names) = generators.as_ref() else {
                return Err(err(line_no, lead + 1, ParseErrorKind::RelatorBeforeGenerators));
            };
            let mut letters = Vec::new();
            for (off, tok) in tokens(rest) {
                let column = base + off + 1;
                let (name, sign) = match tok.strip_suffix('\'') {
                    Some(n) => (n, Sign::Minus),
                    None => (tok, Sign::Plus),
                };
                if !valid_name(name) {
                    return Err(err(line_no, column, ParseErrorKind::InvalidToken(tok.to_string())));
                }
                let Some(pos) = names.iter().position(|n| n == name) else {
                    return Err(err(line_no, column, ParseErrorKind::UnknownGenerator(name.to_string())));
                };
                let id = GeneratorId::new(pos as u32 + 1).expect("positions are 0-based");
                letters.push(Letter::new(id, sign));
            }
            relators.push(Word::new(letters));
        }
    }

    let generators = generators.ok_or(err(1, 1, ParseErrorKind::MissingGenerators))?;
    Ok(Presentation { generators, relators })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(pairs: &[(u32, i32)]) -> Word {
        Word::from_pairs(pairs)
    }

    #[test]
    fn parses_cyclic_relator() {
        let p = parse_presentation("gens: a\nrel: a a a").unwrap();
        assert_eq!(p.generator_count(), 1);
        assert_eq!(p.relators(), &[w(&[(1, 1), (1, 1), (1, 1)])]);
    }

    #[test]
    fn parses_commutator_with_comments() {
        let p = parse_presentation("# torus\ngens: a b   # two\n\nrel: a b a' b'\n").unwrap();
        assert_eq!(p.generator_names(), &["a", "b"]);
        assert_eq!(p.relators(), &[w(&[(1, 1), (2, 1), (1, -1), (2, -1)])]);
    }

    #[test]
    fn unknown_generator_reports_position() {
        let e = parse_presentation("gens: a\nrel: a c").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 8);
        assert_eq!(e.kind, ParseErrorKind::UnknownGenerator("c".into()));
    }

    #[test]
    fn rejects_empty_and_missing_generators() {
        assert_eq!(parse_presentation("gens:").unwrap_err().kind, ParseErrorKind::EmptyGenerators);
        assert_eq!(parse_presentation("# nothing\n").unwrap_err().kind, ParseErrorKind::MissingGenerators);
        assert_eq!(
            parse_presentation("rel: a\ngens: a").unwrap_err().kind,
            ParseErrorKind::RelatorBeforeGenerators
        );
        assert_eq!(
            parse_presentation("gens: a a").unwrap_err().kind,
            ParseErrorKind::DuplicateGenerator("a".into())
        );
        assert!(matches!(
            parse_presentation("gens: a\nrel: a''").unwrap_err().kind,
            ParseErrorKind::InvalidToken(_)
        ));
        assert_eq!(parse_presentation("gen: a").unwrap_err().kind, ParseErrorKind::UnknownDirective);
    }

    #[test]
    fn free_reduce_examples() {
        let word = w(&[(1, 1), (2, 1), (2, -1), (1, -1), (1, 1)]);
        assert_eq!(word.free_reduce(), w(&[(1, 1)]));
        assert_eq!(Word::empty().free_reduce(), Word::empty());
        let fixed = w(&[(1, 1), (2, 1), (1, -1)]);
        assert_eq!(fixed.free_reduce(), fixed);
    }

    #[test]
    fn truncation() {
        let p = parse_presentation("gens: a b\nrel: a a\nrel: b b b").unwrap();
        assert_eq!(p.truncate(1).unwrap().relators().len(), 1);
        assert!(p.truncate(0).unwrap().relators().is_empty());
        assert_eq!(p.truncate(2).unwrap(), p);
        assert!(p.truncate(3).is_err());
    }

    #[test]
    fn display_round_trips_through_parser() {
        let p = parse_presentation("gens: x y_1\nrel: x y_1' x").unwrap();
        let again = parse_presentation(&alloc::format!("{p}")).unwrap();
        assert_eq!(p, again);
    }
}
