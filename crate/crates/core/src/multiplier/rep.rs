//! Finite-dimensional (possibly truncated) representations.

use std::sync::Arc;

use crate::group::{Ball, Element, Group, GroupError, GroupKind};
use crate::linalg::{CMatrix, CVector, C64, ZERO};

use super::MultiplierError;

/// `t ↦ π(t)` acting on `ℂ^dim`.
pub trait Representation: Send + Sync {
    fn group(&self) -> &Arc<Group>;
    fn dim(&self) -> usize;
    /// `π(t) v`.
    fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError>;
    /// Claimed `sup_t ‖π(t)‖`; exactly 1 for unitary representations.
    fn norm_bound(&self) -> f64;
    fn is_unitary(&self) -> bool;
    fn label(&self) -> String;

    /// Dense matrix of `π(t)`, column by column.
    fn matrix(&self, t: &Element) -> Result<CMatrix, MultiplierError> {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        let mut e = CVector::zeros(n);
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            m.set_column(j, &self.apply(t, &e)?);
            e[j] = ZERO;
        }
        Ok(m)
    }
}

fn check_dim(rep: &dyn Representation, v: &CVector) -> Result<(), MultiplierError> {
    if v.len() == rep.dim() {
        Ok(())
    } else {
        Err(MultiplierError::Invalid(format!(
            "{}: vector of length {} for dimension {}",
            rep.label(),
            v.len(),
            rep.dim()
        )))
    }
}

fn check_member(group: &Group, t: &Element) -> Result<(), MultiplierError> {
    if group.contains(t) {
        Ok(())
    } else {
        Err(GroupError::ForeignElement(t.to_string()).into())
    }
}

/// The trivial representation on ℂ.
pub struct TrivialRep {
    group: Arc<Group>,
}

impl TrivialRep {
    pub fn new(group: Arc<Group>) -> Self {
        TrivialRep { group }
    }
}

impl Representation for TrivialRep {
    fn group(&self) -> &Arc<Group> {
        &self.group
    }
    fn dim(&self) -> usize {
        1
    }
    fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError> {
        check_member(&self.group, t)?;
        check_dim(self, v)?;
        Ok(v.clone())
    }
    fn norm_bound(&self) -> f64 {
        1.0
    }
    fn is_unitary(&self) -> bool {
        true
    }
    fn label(&self) -> String {
        "trivial".into()
    }
}

/// Left regular representation compressed to `ℓ²(B)` for a ball `B`,
/// with `multiplicity` orthogonal copies.
///
/// On a finite group whose ball is exhaustive this is the genuine (unitary)
/// regular representation; otherwise mass leaving the ball is dropped, which
/// keeps every `‖π(t)‖ ≤ 1` but breaks multiplicativity near the boundary.
pub struct RegularRep {
    group: Arc<Group>,
    ball: Arc<Ball>,
    multiplicity: usize,
}

impl RegularRep {
    pub fn new(group: Arc<Group>, ball: Arc<Ball>, multiplicity: usize) -> Self {
        RegularRep { group, ball, multiplicity: multiplicity.max(1) }
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }
}

impl Representation for RegularRep {
    fn group(&self) -> &Arc<Group> {
        &self.group
    }
    fn dim(&self) -> usize {
        self.ball.len() * self.multiplicity
    }
    fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError> {
        check_dim(self, v)?;
        let b = self.ball.len();
        let mut out = CVector::zeros(v.len());
        for j in 0..b {
            let active = (0..self.multiplicity).any(|c| v[c * b + j] != ZERO);
            if !active {
                continue;
            }
            let target = self.group.multiply(t, self.ball.element(j))?;
            if let Some(i) = self.ball.index_of(&target) {
                for c in 0..self.multiplicity {
                    out[c * b + i] += v[c * b + j];
                }
            }
        }
        Ok(out)
    }
    fn norm_bound(&self) -> f64 {
        1.0
    }
    fn is_unitary(&self) -> bool {
        self.ball.is_exhaustive()
    }
    fn label(&self) -> String {
        if self.ball.is_exhaustive() {
            format!("regular(x{})", self.multiplicity)
        } else {
            format!("regular_truncated(R={},x{})", self.ball.radius(), self.multiplicity)
        }
    }
}

fn zn_rank(group: &Group) -> Result<usize, MultiplierError> {
    match group.kind() {
        GroupKind::Zn { n } => Ok(*n),
        _ => Err(MultiplierError::WrongGroup(format!("expected ℤⁿ, got {}", group.name()))),
    }
}

/// Index of a point of the `n`-dimensional grid with `q` nodes per axis,
/// first coordinate fastest.
fn grid_coords(mut idx: usize, q: usize, n: usize) -> Vec<usize> {
    let mut c = Vec::with_capacity(n);
    for _ in 0..n {
        c.push(idx % q);
        idx /= q;
    }
    c
}

/// Characters of ℤⁿ sampled on the uniform grid of the torus:
/// `π(m) = diag(e^{i m·θ_q})`, `θ_q = 2πq/Q`.
///
/// Coefficients `⟨π(·)ξ, η⟩` with `conj(η_q) ξ_q = w_q` realize the
/// quadrature of the density `w` against the characters.
pub struct DensityRep {
    group: Arc<Group>,
    nodes: usize,
    rank: usize,
    roots: Vec<C64>,
}

impl DensityRep {
    pub fn new(group: Arc<Group>, nodes: usize) -> Result<Self, MultiplierError> {
        let rank = zn_rank(&group)?;
        if nodes == 0 {
            return Err(MultiplierError::Invalid("quadrature needs at least one node".into()));
        }
        nodes
            .checked_pow(rank as u32)
            .filter(|&d| d <= 1 << 24)
            .ok_or_else(|| MultiplierError::Invalid("quadrature grid too large".into()))?;
        let roots =
            (0..nodes).map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64)).collect();
        Ok(DensityRep { group, nodes, rank, roots })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

impl Representation for DensityRep {
    fn group(&self) -> &Arc<Group> {
        &self.group
    }
    fn dim(&self) -> usize {
        self.nodes.pow(self.rank as u32)
    }
    fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError> {
        check_dim(self, v)?;
        let Element::Vector(m) = t else {
            return Err(GroupError::ForeignElement(t.to_string()).into());
        };
        check_member(&self.group, t)?;
        let q = self.nodes;
        let shifts: Vec<usize> = m.iter().map(|x| x.rem_euclid(q as i64) as usize).collect();
        // walk the grid with an odometer, keeping the phase Σ c_i m_i mod Q
        let mut coords = vec![0usize; self.rank];
        let mut phase = 0usize;
        let mut out = CVector::zeros(v.len());
        for idx in 0..v.len() {
            out[idx] = self.roots[phase] * v[idx];
            for (c, s) in coords.iter_mut().zip(&shifts) {
                *c += 1;
                phase = (phase + s) % q;
                if *c < q {
                    break;
                }
                *c = 0;
                // Q steps of s wrapped the phase back to where this axis started
            }
        }
        Ok(out)
    }
    fn norm_bound(&self) -> f64 {
        1.0
    }
    fn is_unitary(&self) -> bool {
        true
    }
    fn label(&self) -> String {
        format!("torus_characters(Q={})", self.nodes)
    }
}

/// ℤⁿ acting by cyclic shifts on `ℓ²((ℤ/L)ⁿ)`: a unitary representation
/// factoring through the finite quotient.
pub struct TorusShiftRep {
    group: Arc<Group>,
    side: usize,
    rank: usize,
}

impl TorusShiftRep {
    pub fn new(group: Arc<Group>, side: usize) -> Result<Self, MultiplierError> {
        let rank = zn_rank(&group)?;
        if side == 0 {
            return Err(MultiplierError::Invalid("torus side must be positive".into()));
        }
        side.checked_pow(rank as u32)
            .filter(|&d| d <= 1 << 24)
            .ok_or_else(|| MultiplierError::Invalid("torus too large".into()))?;
        Ok(TorusShiftRep { group, side, rank })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn index_of(&self, point: &[i64]) -> usize {
        let l = self.side as i64;
        point.iter().rev().fold(0usize, |acc, &x| acc * self.side + x.rem_euclid(l) as usize)
    }
}

impl Representation for TorusShiftRep {
    fn group(&self) -> &Arc<Group> {
        &self.group
    }
    fn dim(&self) -> usize {
        self.side.pow(self.rank as u32)
    }
    fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError> {
        check_dim(self, v)?;
        let Element::Vector(m) = t else {
            return Err(GroupError::ForeignElement(t.to_string()).into());
        };
        check_member(&self.group, t)?;
        let mut out = CVector::zeros(v.len());
        for idx in 0..v.len() {
            if v[idx] == ZERO {
                continue;
            }
            let c = grid_coords(idx, self.side, self.rank);
            let target: Vec<i64> = c.iter().zip(m).map(|(&a, &b)| a as i64 + b).collect();
            out[self.index_of(&target)] += v[idx];
        }
        Ok(out)
    }
    fn norm_bound(&self) -> f64 {
        1.0
    }
    fn is_unitary(&self) -> bool {
        true
    }
    fn label(&self) -> String {
        format!("torus_shift(L={})", self.side)
    }
}

/// Representation given by matrices for each generator, extended along
/// geodesic words.
pub struct MatrixRep {
    group: Arc<Group>,
    generators: Vec<CMatrix>,
    unitary: bool,
    norm_bound: f64,
}

impl MatrixRep {
    pub fn new(group: Arc<Group>, generators: Vec<CMatrix>) -> Result<Self, MultiplierError> {
        if generators.len() != group.generators().len() {
            return Err(MultiplierError::Invalid(format!(
                "{} generator matrices for {} generators",
                generators.len(),
                group.generators().len()
            )));
        }
        let dim = generators.first().map_or(1, |m| m.nrows());
        if generators.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(MultiplierError::Invalid("generator matrices must be square of equal size".into()));
        }
        let id = CMatrix::identity(dim, dim);
        let unitary = generators.iter().all(|m| crate::linalg::max_abs_diff(&(m.adjoint() * m), &id) <= 1e-12);
        Ok(MatrixRep { group, generators, unitary, norm_bound: 1.0 })
    }

    /// Overrides the claimed norm bound (for non-unitary inputs).
    pub fn with_norm_bound(mut self, b: f64) -> Self {
        self.norm_bound = b;
        self
    }
}

impl Representation for MatrixRep {
    fn group(&self) -> &Arc<Group> {
        &self.group
    }
    fn dim(&self) -> usize {
        self.generators.first().map_or(1, |m| m.nrows())
    }
    fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError> {
        check_dim(self, v)?;
        let word = self.group.word(t)?;
        let mut out = v.clone();
        for &g in word.iter().rev() {
            out = &self.generators[g] * out;
        }
        Ok(out)
    }
    fn norm_bound(&self) -> f64 {
        if self.unitary {
            1.0
        } else {
            self.norm_bound
        }
    }
    fn is_unitary(&self) -> bool {
        self.unitary
    }
    fn label(&self) -> String {
        format!("matrix(dim={})", self.dim())
    }
}
