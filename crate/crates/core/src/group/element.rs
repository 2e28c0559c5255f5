use std::cmp::Ordering;
use std::fmt;

use super::sl2::Mat2;
use super::GroupError;

/// A letter of a free-group word: `+g` is the g-th generator (1-based), `-g` its inverse.
pub type Letter = i32;

/// Canonical form of a group element.
///
/// Each realization has exactly one canonical form per element, so structural
/// equality is group equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Element {
    /// Freely reduced word.
    Word(Vec<Letter>),
    /// Integer vector in ℤⁿ.
    Vector(Vec<i64>),
    /// Row/column index into a finite multiplication table.
    Index(usize),
    /// Integer 2×2 matrix with determinant 1.
    Matrix(Mat2),
    /// Pair (A, v) in SL(2,ℤ)⋉ℤ².
    Affine(Mat2, [i64; 2]),
}

impl Element {
    fn variant_rank(&self) -> u8 {
        match self {
            Element::Word(_) => 0,
            Element::Vector(_) => 1,
            Element::Index(_) => 2,
            Element::Matrix(_) => 3,
            Element::Affine(..) => 4,
        }
    }

    /// Size of the canonical form, used as the primary sort key.
    pub fn canonical_len(&self) -> u64 {
        match self {
            Element::Word(w) => w.len() as u64,
            Element::Vector(v) => v.iter().map(|x| x.unsigned_abs()).sum(),
            Element::Index(i) => *i as u64,
            Element::Matrix(m) => m.entries().iter().map(|x| x.unsigned_abs()).sum(),
            Element::Affine(m, v) => {
                m.entries().iter().map(|x| x.unsigned_abs()).sum::<u64>()
                    + v.iter().map(|x| x.unsigned_abs()).sum::<u64>()
            }
        }
    }

    /// Canonical string used in CSV dumps and multiplier literals.
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }

    /// Parses the output of [`Element::canonical_string`].
    pub fn parse(s: &str) -> Result<Element, GroupError> {
        let s = s.trim();
        let bad = || GroupError::Parse(s.to_string());
        if s.is_empty() {
            return Err(bad());
        }
        if s == "e" {
            return Ok(Element::Word(Vec::new()));
        }
        if let Some(rest) = s.strip_prefix('g') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return rest.parse::<usize>().map(Element::Index).map_err(|_| bad());
            }
        }
        if s.starts_with("([[") {
            let inner = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
            let split = inner.find("]],").ok_or_else(bad)?;
            let m = parse_mat(&inner[..split + 2]).ok_or_else(bad)?;
            let v = parse_ints(&inner[split + 3..]).ok_or_else(bad)?;
            if v.len() != 2 {
                return Err(bad());
            }
            return Ok(Element::Affine(m, [v[0], v[1]]));
        }
        if s.starts_with("[[") {
            return parse_mat(s).map(Element::Matrix).ok_or_else(bad);
        }
        if s.starts_with('(') {
            return parse_ints(s).map(Element::Vector).ok_or_else(bad);
        }
        let mut word = Vec::with_capacity(s.len());
        let mut chars = s.chars();
        while let Some(ch) = chars.next() {
            let letter = match ch {
                'a'..='z' => (ch as i32) - ('a' as i32) + 1,
                'A'..='Z' => -((ch as i32) - ('A' as i32) + 1),
                '<' => {
                    let tok: String = chars.by_ref().take_while(|&c| c != '>').collect();
                    match tok.parse::<Letter>() {
                        Ok(l) if l != 0 => l,
                        _ => return Err(bad()),
                    }
                }
                _ => return Err(bad()),
            };
            word.push(letter);
        }
        Ok(Element::Word(word))
    }
}

fn parse_ints(s: &str) -> Option<Vec<i64>> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn parse_mat(s: &str) -> Option<Mat2> {
    let inner = s.trim().strip_prefix("[[")?.strip_suffix("]]")?;
    let (r0, r1) = inner.split_once("],[")?;
    let a: Vec<i64> = r0.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
    let b: Vec<i64> = r1.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
    if a.len() != 2 || b.len() != 2 {
        return None;
    }
    Some(Mat2::new(a[0], a[1], b[0], b[1]))
}

fn letter_key(l: Letter) -> (u32, bool) {
    (l.unsigned_abs(), l < 0)
}

impl Ord for Element {
    /// Length-lexicographic order on canonical forms.
    fn cmp(&self, other: &Self) -> Ordering {
        let by_variant = self.variant_rank().cmp(&other.variant_rank());
        if by_variant != Ordering::Equal {
            return by_variant;
        }
        let by_len = self.canonical_len().cmp(&other.canonical_len());
        if by_len != Ordering::Equal {
            return by_len;
        }
        match (self, other) {
            (Element::Word(a), Element::Word(b)) => {
                a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l)))
            }
            (Element::Vector(a), Element::Vector(b)) => a.cmp(b),
            (Element::Index(a), Element::Index(b)) => a.cmp(b),
            (Element::Matrix(a), Element::Matrix(b)) => a.entries().cmp(&b.entries()),
            (Element::Affine(a, v), Element::Affine(b, w)) => (a.entries(), v).cmp(&(b.entries(), w)),
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Word(w) if w.is_empty() => write!(f, "e"),
            Element::Word(w) => {
                for &l in w {
                    let g = l.unsigned_abs() - 1;
                    let base = if l > 0 { b'a' } else { b'A' };
                    if g < 26 {
                        write!(f, "{}", (base + g as u8) as char)?;
                    } else {
                        write!(f, "<{l}>")?;
                    }
                }
                Ok(())
            }
            Element::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Element::Index(i) => write!(f, "g{i}"),
            Element::Matrix(m) => write!(f, "{m}"),
            Element::Affine(m, v) => write!(f, "({m},({},{}))", v[0], v[1]),
        }
    }
}
