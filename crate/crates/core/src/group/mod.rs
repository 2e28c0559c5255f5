//! Finitely generated groups with exact arithmetic.
//!
//! Five realizations are supported: free groups, ℤⁿ, finite groups given by a
//! multiplication table, SL(2,ℤ) and the semidirect product SL(2,ℤ)⋉ℤ².
//! Elements are kept in a canonical form so that equality, hashing and the
//! length-lexicographic order all operate on group elements directly.

mod ball;
mod element;
mod quotient;
mod sl2;
pub mod spec;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::C64;

pub use ball::Ball;
pub use element::{Element, Letter};
pub use quotient::QuotientStructure;
pub use sl2::Mat2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("element {0} does not belong to this realization")]
    ForeignElement(String),
    #[error("integer overflow in group arithmetic")]
    Overflow,
    #[error("element {element} lies outside the enumerated horizon of radius {radius}; enlarge the ball")]
    OutsideHorizon { element: String, radius: usize },
    #[error("ball of radius {radius} exceeds the size cap ({size} > {cap})")]
    BallTooLarge { radius: usize, size: usize, cap: usize },
    #[error("this realization has no quotient structure")]
    NoQuotient,
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
    #[error("cannot parse element `{0}`")]
    Parse(String),
}

/// Which group is being realized.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    Free { rank: usize },
    Zn { n: usize },
    Finite { table: Arc<Vec<Vec<usize>>>, identity: usize },
    Sl2z,
    Sl2zSemidirect,
}

/// Resource limits for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupLimits {
    /// Largest number of elements a ball may hold.
    pub ball_size_cap: usize,
    /// Largest BFS radius explored when a word length is requested on a
    /// realization without a normal form.
    pub length_radius_cap: usize,
}

impl Default for GroupLimits {
    fn default() -> Self {
        GroupLimits { ball_size_cap: 2_000_000, length_radius_cap: 12 }
    }
}

/// A computable group together with a finite symmetric generating set.
#[derive(Debug)]
pub struct Group {
    kind: GroupKind,
    generators: Vec<Element>,
    limits: GroupLimits,
    length_cache: RwLock<Option<Arc<Ball>>>,
}

impl Clone for Group {
    fn clone(&self) -> Self {
        Group {
            kind: self.kind.clone(),
            generators: self.generators.clone(),
            limits: self.limits,
            length_cache: RwLock::new(self.length_cache.read().unwrap().clone()),
        }
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.generators == other.generators
    }
}

impl Group {
    fn build(kind: GroupKind, generators: Vec<Element>) -> Group {
        Group { kind, generators, limits: GroupLimits::default(), length_cache: RwLock::new(None) }
    }

    /// Free group on `rank` generators with S = {a, A, b, B, …}.
    pub fn free(rank: usize) -> Group {
        let generators = (1..=rank as Letter).flat_map(|g| [Element::Word(vec![g]), Element::Word(vec![-g])]).collect();
        Group::build(GroupKind::Free { rank }, generators)
    }

    /// ℤⁿ with S = {±e₁, …, ±eₙ}.
    pub fn zn(n: usize) -> Group {
        let mut generators = Vec::with_capacity(2 * n);
        for i in 0..n {
            for sign in [1, -1] {
                let mut v = vec![0; n];
                v[i] = sign;
                generators.push(Element::Vector(v));
            }
        }
        Group::build(GroupKind::Zn { n }, generators)
    }

    /// Finite group from a multiplication table `table[i][j] = i·j`.
    ///
    /// When `generators` is `None`, every non-identity element generates.
    pub fn finite(table: Vec<Vec<usize>>, generators: Option<Vec<usize>>) -> Result<Group, GroupError> {
        let order = table.len();
        let invalid = |m: &str| GroupError::InvalidSpec(m.to_string());
        if order == 0 || table.iter().any(|row| row.len() != order) {
            return Err(invalid("table must be square and non-empty"));
        }
        if table.iter().flatten().any(|&x| x >= order) {
            return Err(invalid("table entry out of range"));
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| invalid("table has no two-sided identity"))?;
        for x in 0..order {
            if !(0..order).any(|y| table[x][y] == identity) {
                return Err(invalid("table has an element without inverse"));
            }
        }
        let mut gens: Vec<usize> = match generators {
            Some(g) => g,
            None => (0..order).filter(|&x| x != identity).collect(),
        };
        if gens.iter().any(|&g| g >= order || g == identity) {
            return Err(invalid("generators must be non-identity table indices"));
        }
        // close under inverse, keeping first-seen order
        let inverse = |x: usize| (0..order).find(|&y| table[x][y] == identity).unwrap();
        let mut i = 0;
        while i < gens.len() {
            let inv = inverse(gens[i]);
            if !gens.contains(&inv) {
                gens.push(inv);
            }
            i += 1;
        }
        let group = Group::build(
            GroupKind::Finite { table: Arc::new(table), identity },
            gens.into_iter().map(Element::Index).collect(),
        );
        let whole = group.ball(order)?;
        if whole.len() != order {
            return Err(invalid("generators do not generate the group"));
        }
        Ok(group)
    }

    /// Cyclic group ℤ/n as a finite table, generated by ±1.
    pub fn cyclic(n: usize) -> Result<Group, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidSpec("cyclic order must be positive".into()));
        }
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let gens = if n == 1 { vec![] } else { vec![1] };
        Group::finite(table, Some(gens))
    }

    /// SL(2,ℤ) with S = {T, T⁻¹, S₀, S₀⁻¹}.
    pub fn sl2z() -> Group {
        let t = Mat2::translation();
        let s = Mat2::rotation();
        let generators = vec![
            Element::Matrix(t),
            Element::Matrix(t.sl_inverse().unwrap()),
            Element::Matrix(s),
            Element::Matrix(s.sl_inverse().unwrap()),
        ];
        Group::build(GroupKind::Sl2z, generators)
    }

    /// SL(2,ℤ)⋉ℤ² with S = (S_SL × {0}) ∪ ({I} × {±e₁, ±e₂}).
    pub fn sl2z_semidirect() -> Group {
        let mut generators: Vec<Element> = Group::sl2z()
            .generators
            .into_iter()
            .map(|g| match g {
                Element::Matrix(m) => Element::Affine(m, [0, 0]),
                _ => unreachable!(),
            })
            .collect();
        for v in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            generators.push(Element::Affine(Mat2::IDENTITY, v));
        }
        Group::build(GroupKind::Sl2zSemidirect, generators)
    }

    pub fn with_limits(mut self, limits: GroupLimits) -> Group {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> GroupLimits {
        self.limits
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// Short name used in reports.
    pub fn name(&self) -> String {
        match &self.kind {
            GroupKind::Free { rank } => format!("free({rank})"),
            GroupKind::Zn { n } => format!("zn({n})"),
            GroupKind::Finite { table, .. } => format!("finite({})", table.len()),
            GroupKind::Sl2z => "sl2z".into(),
            GroupKind::Sl2zSemidirect => "sl2z_semidirect".into(),
        }
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            GroupKind::Free { .. } => Element::Word(Vec::new()),
            GroupKind::Zn { n } => Element::Vector(vec![0; *n]),
            GroupKind::Finite { identity, .. } => Element::Index(*identity),
            GroupKind::Sl2z => Element::Matrix(Mat2::IDENTITY),
            GroupKind::Sl2zSemidirect => Element::Affine(Mat2::IDENTITY, [0, 0]),
        }
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Finite { table, .. } => Some(table.len()),
            GroupKind::Free { rank: 0 } | GroupKind::Zn { n: 0 } => Some(1),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// Whether `t` is a canonical element of this realization.
    pub fn contains(&self, t: &Element) -> bool {
        match (&self.kind, t) {
            (GroupKind::Free { rank }, Element::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupKind::Zn { n }, Element::Vector(v)) => v.len() == *n,
            (GroupKind::Finite { table, .. }, Element::Index(i)) => *i < table.len(),
            (GroupKind::Sl2z, Element::Matrix(m)) => m.is_special(),
            (GroupKind::Sl2zSemidirect, Element::Affine(m, _)) => m.is_special(),
            _ => false,
        }
    }

    fn check(&self, t: &Element) -> Result<(), GroupError> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(GroupError::ForeignElement(t.to_string()))
        }
    }

    /// Parses a canonical string in the context of this realization.
    pub fn parse_element(&self, s: &str) -> Result<Element, GroupError> {
        // `e` is accepted as the identity of every realization
        let t = match (&self.kind, Element::parse(s)?) {
            (_, Element::Word(w)) if w.is_empty() => self.identity(),
            (_, t) => t,
        };
        self.check(&t)?;
        Ok(t)
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (&self.kind, a, b) {
            (GroupKind::Free { .. }, Element::Word(x), Element::Word(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Word(out)
            }
            (GroupKind::Zn { .. }, Element::Vector(x), Element::Vector(y)) => Element::Vector(
                x.iter()
                    .zip(y)
                    .map(|(p, q)| p.checked_add(*q).ok_or(GroupError::Overflow))
                    .collect::<Result<_, _>>()?,
            ),
            (GroupKind::Finite { table, .. }, Element::Index(i), Element::Index(j)) => Element::Index(table[*i][*j]),
            (GroupKind::Sl2z, Element::Matrix(x), Element::Matrix(y)) => Element::Matrix(x.checked_mul(y)?),
            (GroupKind::Sl2zSemidirect, Element::Affine(m, v), Element::Affine(n, w)) => {
                let mw = m.apply(w)?;
                let sum = [
                    v[0].checked_add(mw[0]).ok_or(GroupError::Overflow)?,
                    v[1].checked_add(mw[1]).ok_or(GroupError::Overflow)?,
                ];
                Element::Affine(m.checked_mul(n)?, sum)
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, a: &Element) -> Result<Element, GroupError> {
        self.check(a)?;
        Ok(match (&self.kind, a) {
            (GroupKind::Free { .. }, Element::Word(w)) => Element::Word(w.iter().rev().map(|l| -l).collect()),
            (GroupKind::Zn { .. }, Element::Vector(v)) => Element::Vector(
                v.iter().map(|x| x.checked_neg().ok_or(GroupError::Overflow)).collect::<Result<_, _>>()?,
            ),
            (GroupKind::Finite { table, identity }, Element::Index(i)) => {
                Element::Index((0..table.len()).find(|&j| table[*i][j] == *identity).unwrap())
            }
            (GroupKind::Sl2z, Element::Matrix(m)) => Element::Matrix(m.sl_inverse()?),
            (GroupKind::Sl2zSemidirect, Element::Affine(m, v)) => {
                let inv = m.sl_inverse()?;
                let w = inv.apply(v)?;
                Element::Affine(
                    inv,
                    [w[0].checked_neg().ok_or(GroupError::Overflow)?, w[1].checked_neg().ok_or(GroupError::Overflow)?],
                )
            }
            _ => unreachable!("checked above"),
        })
    }

    /// Product of a sequence of elements, left to right.
    pub fn product<'a, I>(&self, items: I) -> Result<Element, GroupError>
    where
        I: IntoIterator<Item = &'a Element>,
    {
        items.into_iter().try_fold(self.identity(), |acc, x| self.multiply(&acc, x))
    }

    /// Word length with respect to the generating set.
    ///
    /// Free groups and ℤⁿ use their normal forms; the other realizations use
    /// BFS distance in the Cayley graph up to `length_radius_cap`.
    pub fn word_length(&self, t: &Element) -> Result<usize, GroupError> {
        self.check(t)?;
        match (&self.kind, t) {
            (GroupKind::Free { .. }, Element::Word(w)) => Ok(w.len()),
            (GroupKind::Zn { .. }, Element::Vector(v)) => Ok(v.iter().map(|x| x.unsigned_abs() as usize).sum()),
            _ => {
                let ball = self.horizon_ball_containing(t)?;
                let i = ball.index_of(t).expect("located by horizon search");
                Ok(ball.length(i))
            }
        }
    }

    /// A geodesic word for `t` as generator indices (into [`Group::generators`]).
    pub fn word(&self, t: &Element) -> Result<Vec<usize>, GroupError> {
        self.check(t)?;
        match (&self.kind, t) {
            (GroupKind::Free { .. }, Element::Word(w)) => {
                Ok(w.iter().map(|&l| 2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)).collect())
            }
            (GroupKind::Zn { .. }, Element::Vector(v)) => {
                let mut word = Vec::new();
                for (i, &x) in v.iter().enumerate() {
                    let g = 2 * i + usize::from(x < 0);
                    word.extend(std::iter::repeat_n(g, x.unsigned_abs() as usize));
                }
                Ok(word)
            }
            _ => {
                let ball = self.horizon_ball_containing(t)?;
                let i = ball.index_of(t).expect("located by horizon search");
                Ok(ball.word(i))
            }
        }
    }

    fn horizon_ball_containing(&self, t: &Element) -> Result<Arc<Ball>, GroupError> {
        if let Some(ball) = self.length_cache.read().unwrap().as_ref() {
            if ball.contains(t) {
                return Ok(ball.clone());
            }
            if ball.radius() >= self.limits.length_radius_cap || ball.is_exhaustive() {
                return Err(GroupError::OutsideHorizon { element: t.to_string(), radius: ball.radius() });
            }
        }
        let start = self.length_cache.read().unwrap().as_ref().map_or(0, |b| b.radius() + 1);
        for radius in start..=self.limits.length_radius_cap {
            let ball = Arc::new(self.ball(radius)?);
            let found = ball.contains(t);
            let exhaustive = ball.is_exhaustive();
            *self.length_cache.write().unwrap() = Some(ball.clone());
            if found {
                return Ok(ball);
            }
            if exhaustive {
                break;
            }
        }
        Err(GroupError::OutsideHorizon { element: t.to_string(), radius: self.limits.length_radius_cap })
    }

    /// Deterministic BFS enumeration of {t : ℓ(t) ≤ radius}.
    pub fn ball(&self, radius: usize) -> Result<Ball, GroupError> {
        Ball::enumerate(self, radius)
    }

    /// Matrix `M[i][j] = φ(s_i⁻¹ s_j)` for an ordered finite set `F`.
    pub fn gram_matrix<E, F>(&self, elements: &[Element], mut phi: F) -> Result<DMatrix<C64>, E>
    where
        F: FnMut(&Element) -> Result<C64, E>,
        E: From<GroupError>,
    {
        let n = elements.len();
        let inverses: Vec<Element> = elements.iter().map(|s| self.inverse(s)).collect::<Result<_, _>>()?;
        let mut cache: HashMap<Element, C64> = HashMap::new();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let t = self.multiply(&inverses[i], &elements[j])?;
                let v = match cache.get(&t) {
                    Some(v) => *v,
                    None => {
                        let v = phi(&t)?;
                        cache.insert(t, v);
                        v
                    }
                };
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    /// Quotient map onto SL(2,ℤ) with the section A ↦ (A, 0).
    pub fn quotient_structure(&self) -> Result<QuotientStructure, GroupError> {
        match self.kind {
            GroupKind::Sl2zSemidirect => Ok(QuotientStructure::new()),
            _ => Err(GroupError::NoQuotient),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn w(s: &str) -> Element {
        Element::parse(s).unwrap()
    }

    #[test]
    fn free_reduction() {
        let f2 = Group::free(2);
        assert_eq!(f2.multiply(&w("ab"), &w("Ba")).unwrap(), w("aa"));
        assert_eq!(f2.word_length(&w("abA")).unwrap(), 3);
        let t = f2.product([&w("a"), &w("A"), &w("b")]).unwrap();
        assert_eq!(f2.word_length(&t).unwrap(), 1);
        assert_eq!(f2.word_length(&f2.identity()).unwrap(), 0);
    }

    #[test]
    fn unreduced_words_are_foreign() {
        let f2 = Group::free(2);
        assert!(!f2.contains(&Element::Word(vec![1, -1])));
        assert!(!f2.contains(&Element::Word(vec![3])));
        assert!(matches!(f2.multiply(&Element::Vector(vec![1]), &w("a")), Err(GroupError::ForeignElement(_))));
    }

    #[test]
    fn semidirect_law() {
        let g = Group::sl2z_semidirect();
        let a = Element::Affine(Mat2::translation(), [1, 2]);
        let b = Element::Affine(Mat2::rotation(), [3, -1]);
        // (A,v)(B,w) = (AB, v + Aw); A·(3,-1) = (2,-1)
        let expected = Element::Affine(Mat2::translation().checked_mul(&Mat2::rotation()).unwrap(), [3, 1]);
        assert_eq!(g.multiply(&a, &b).unwrap(), expected);
        let ai = g.inverse(&a).unwrap();
        assert_eq!(g.multiply(&a, &ai).unwrap(), g.identity());
        assert_eq!(g.multiply(&ai, &a).unwrap(), g.identity());
    }

    #[test]
    fn zn_addition() {
        let z2 = Group::zn(2);
        let p = g_vec(&[1, 2]);
        let q = g_vec(&[3, -2]);
        assert_eq!(z2.multiply(&p, &q).unwrap(), g_vec(&[4, 0]));
        assert_eq!(z2.word_length(&g_vec(&[3, -2])).unwrap(), 5);
    }

    fn g_vec(v: &[i64]) -> Element {
        Element::Vector(v.to_vec())
    }

    #[test]
    fn sl2z_lengths_via_bfs() {
        let g = Group::sl2z();
        let t = Element::Matrix(Mat2::translation());
        assert_eq!(g.word_length(&g.identity()).unwrap(), 0);
        assert_eq!(g.word_length(&t).unwrap(), 1);
        // -I = S², and no generator equals -I
        let minus = Element::Matrix(Mat2::new(-1, 0, 0, -1));
        assert_eq!(g.word_length(&minus).unwrap(), 2);
        let word = g.word(&minus).unwrap();
        let rebuilt = g.product(word.iter().map(|&i| &g.generators()[i])).unwrap();
        assert_eq!(rebuilt, minus);
    }

    #[test]
    fn horizon_error_for_far_elements() {
        let g = Group::sl2z().with_limits(GroupLimits { ball_size_cap: 100_000, length_radius_cap: 3 });
        let far = Element::Matrix(Mat2::new(1, 40, 0, 1));
        assert!(matches!(g.word_length(&far), Err(GroupError::OutsideHorizon { .. })));
    }

    #[test]
    fn overflow_in_matrix_products() {
        let g = Group::sl2z();
        let big = Element::Matrix(Mat2::new(1, i64::MAX / 2 + 1, 0, 1));
        assert_eq!(g.multiply(&big, &big), Err(GroupError::Overflow));
    }

    #[test]
    fn finite_table_validation() {
        assert!(Group::finite(vec![vec![0, 1], vec![1, 1]], None).is_err());
        let z3 = Group::cyclic(3).unwrap();
        assert_eq!(z3.order(), Some(3));
        assert_eq!(z3.generators().len(), 2);
        assert_eq!(z3.word_length(&Element::Index(2)).unwrap(), 1);
    }

    #[test]
    fn gram_examples() {
        let z = Group::zn(1);
        let f: Vec<Element> = (0..4).map(|i| g_vec(&[i])).collect();
        let ones = z.gram_matrix::<GroupError, _>(&f, |_| Ok(Complex64::new(1.0, 0.0))).unwrap();
        assert!(ones.iter().all(|x| *x == Complex64::new(1.0, 0.0)));
        let delta = z
            .gram_matrix::<GroupError, _>(&f, |t| Ok(Complex64::new(if *t == g_vec(&[0]) { 1.0 } else { 0.0 }, 0.0)))
            .unwrap();
        assert_eq!(delta, DMatrix::identity(4, 4));
        let r: f64 = 0.7;
        let toeplitz = z
            .gram_matrix::<GroupError, _>(&f, |t| match t {
                Element::Vector(v) => Ok(Complex64::new(r.powi(v[0].abs() as i32), 0.0)),
                _ => unreachable!(),
            })
            .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let e = r.powi((i as i32 - j as i32).abs());
                assert!((toeplitz[(i, j)].re - e).abs() < 1e-15);
            }
        }
    }
}
