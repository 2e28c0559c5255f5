//! An analytic family `z ↦ π_z` of representations of `F_k` on `ℓ²` of its
//! Cayley tree, truncated to a ball.
//!
//! For a generator `s` and `c = √(1 − z²)` (principal branch):
//!
//! ```text
//! π_z(s) δ_e     = c δ_s + z δ_e
//! π_z(s) δ_{s⁻¹} = −z δ_s + c δ_e
//! π_z(s) δ_v     = δ_{sv}            otherwise
//! ```
//!
//! `π_z(s)` and `π_z(s⁻¹)` are mutually inverse, so this extends to `F_k`;
//! `⟨π_z(t)δ_e, δ_e⟩ = z^{ℓ(t)}`, and for real `z` every `π_z(s)` is a
//! rotation on `span{δ_e, δ_s}` (hence orthogonal). On the ball, mass pushed
//! past radius `R` is dropped, so all checks live on the interior `ℓ ≤ R − 2`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::group::{Ball, Element, Group, GroupKind};
use crate::linalg::{CMatrix, CVector, C64, ONE, ZERO};
use crate::multiplier::{MultiplierError, Representation};

/// Distance from the boundary excluded from every contract check.
pub const INTERIOR_MARGIN: usize = 2;
/// Tolerance for the coefficient, unitarity and homomorphism residuals.
pub const CONTRACT_TOL: f64 = 1e-8;
/// Accepted range of `residual(h)/residual(h/2)` for a second-order scheme.
pub const CR_RATIO_RANGE: (f64, f64) = (3.5, 4.5);
/// Step used for the holomorphy order check.
pub const CR_STEP: f64 = 1e-2;

type Sparse = Vec<(usize, C64)>;

/// A truncated `π_z` on `ℓ²(B_R)` together with lazily computed diagnostics.
pub struct FamilyPoint {
    z: C64,
    group: Arc<Group>,
    ball: Arc<Ball>,
    /// `columns[g][j]` is the sparse column `π_z(s_g) δ_{v_j}`.
    columns: Vec<Vec<Sparse>>,
    inverse_gen: Vec<usize>,
    bound: OnceLock<f64>,
    contract: OnceLock<ContractReport>,
}

impl std::fmt::Debug for FamilyPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyPoint").field("z", &self.z).field("radius", &self.radius()).finish()
    }
}

/// Builds the family point on `F_k` at radius `R`.
pub fn tree_family_point(z: C64, radius: usize, rank: usize) -> Result<FamilyPoint, MultiplierError> {
    if rank == 0 {
        return Err(MultiplierError::Invalid("rank must be at least 1".into()));
    }
    let group = Arc::new(Group::free(rank));
    let ball = Arc::new(group.ball(radius)?);
    FamilyPoint::on_ball(group, ball, z)
}

impl FamilyPoint {
    /// Family point sharing a precomputed ball of a free group.
    pub fn on_ball(group: Arc<Group>, ball: Arc<Ball>, z: C64) -> Result<FamilyPoint, MultiplierError> {
        if !matches!(group.kind(), GroupKind::Free { .. }) {
            return Err(MultiplierError::WrongGroup(format!("tree families need a free group, got {}", group.name())));
        }
        if !(z.norm() < 1.0) {
            return Err(MultiplierError::Invalid(format!("|z| = {} is not inside the unit disk", z.norm())));
        }
        if ball.radius() < 3 {
            return Err(MultiplierError::Invalid("the truncation radius must be at least 3".into()));
        }
        let c = (ONE - z * z).sqrt();
        let gens = group.generators().to_vec();
        let inverse_gen: Vec<usize> = gens
            .iter()
            .map(|s| {
                let inv = group.inverse(s)?;
                Ok(gens.iter().position(|x| *x == inv).expect("generating set is symmetric"))
            })
            .collect::<Result<_, MultiplierError>>()?;
        let mut columns = Vec::with_capacity(gens.len());
        for (g, s) in gens.iter().enumerate() {
            let s_idx = ball.index_of(s).expect("generators lie in the ball");
            let s_inv_idx = ball.index_of(&gens[inverse_gen[g]]).expect("generators lie in the ball");
            let mut cols = Vec::with_capacity(ball.len());
            for (j, v) in ball.elements().iter().enumerate() {
                let col = if j == 0 {
                    vec![(s_idx, c), (0, z)]
                } else if j == s_inv_idx {
                    vec![(s_idx, -z), (0, c)]
                } else {
                    match ball.index_of(&group.multiply(s, v)?) {
                        Some(i) => vec![(i, ONE)],
                        None => Vec::new(),
                    }
                };
                cols.push(col);
            }
            columns.push(cols);
        }
        Ok(FamilyPoint { z, group, ball, columns, inverse_gen, bound: OnceLock::new(), contract: OnceLock::new() })
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    /// Number of basis vectors with `ℓ ≤ R − margin`.
    fn interior_len(&self) -> usize {
        self.ball.sphere(self.radius() - INTERIOR_MARGIN).end
    }

    /// The distinguished vector `ξ = δ_e`.
    pub fn basepoint(&self) -> CVector {
        let mut v = CVector::zeros(self.ball.len());
        v[0] = ONE;
        v
    }

    fn apply_gen_sparse(&self, g: usize, x: &Sparse) -> Sparse {
        let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
        for &(j, a) in x {
            for &(i, c) in &self.columns[g][j] {
                *acc.entry(i).or_insert(ZERO) += a * c;
            }
        }
        acc.into_iter().collect()
    }

    fn apply_word_sparse(&self, word: &[usize], x: Sparse) -> Sparse {
        word.iter().rev().fold(x, |v, &g| self.apply_gen_sparse(g, &v))
    }

    /// `π_z(s_g)` as a dense matrix.
    pub fn generator_matrix(&self, g: usize) -> CMatrix {
        let n = self.ball.len();
        let mut m = CMatrix::zeros(n, n);
        for (j, col) in self.columns[g].iter().enumerate() {
            for &(i, c) in col {
                m[(i, j)] = c;
            }
        }
        m
    }

    /// `⟨π_z(t)ξ, ξ⟩` for the basepoint `ξ = δ_e`.
    pub fn coefficient(&self, t: &Element) -> Result<C64, MultiplierError> {
        let word = self.group.word(t)?;
        let v = self.apply_word_sparse(&word, vec![(0, ONE)]);
        Ok(v.iter().find(|(i, _)| *i == 0).map_or(ZERO, |(_, a)| *a))
    }

    /// `max |⟨π_z(t)ξ, ξ⟩ − z^{ℓ(t)}|` over the interior.
    pub fn coefficient_residual(&self) -> Result<f64, MultiplierError> {
        (0..self.interior_len()).try_fold(0.0f64, |acc, i| {
            let t = self.ball.element(i);
            let expected = super::psi(self.z, self.ball.length(i));
            Ok(acc.max((self.coefficient(t)? - expected).norm()))
        })
    }

    /// `max_s ‖(π_z(s)*π_z(s) − I)|_interior‖_max`; zero up to rounding for real `z`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.ball.len();
        let m = self.interior_len();
        (0..self.columns.len())
            .map(|g| {
                let mut a = CMatrix::zeros(n, m);
                for j in 0..m {
                    for &(i, c) in &self.columns[g][j] {
                        a[(i, j)] = c;
                    }
                }
                let gram = a.adjoint() * &a;
                crate::linalg::max_abs_diff(&gram, &CMatrix::identity(m, m))
            })
            .fold(0.0, f64::max)
    }

    /// `max ‖π_z(s)π_z(s⁻¹)δ_v − δ_v‖` over generators and interior `v`.
    pub fn homomorphism_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for g in 0..self.columns.len() {
            for j in 0..self.interior_len() {
                let v = self.apply_word_sparse(&[g, self.inverse_gen[g]], vec![(j, ONE)]);
                let err: f64 = v
                    .iter()
                    .map(|&(i, a)| if i == j { (a - ONE).norm_sqr() } else { a.norm_sqr() })
                    .sum::<f64>()
                    .sqrt();
                let missing = if v.iter().any(|(i, _)| *i == j) { 0.0 } else { 1.0 };
                worst = worst.max(err.max(missing));
            }
        }
        worst
    }

    /// `max_t ‖π_z(t)‖` over the ball, each `π_z(t)` restricted to the
    /// columns `δ_v` with `ℓ(v) + ℓ(t) ≤ R` (where the truncation is exact).
    ///
    /// Only a sampled stand-in for `sup_t ‖π_z(t)‖`; always reported as
    /// empirical.
    pub fn empirical_bound(&self) -> f64 {
        *self.bound.get_or_init(|| {
            let r = self.radius();
            (1..self.ball.len())
                .into_par_iter()
                .map(|ti| {
                    let t = self.ball.element(ti);
                    let word = self.group.word(t).expect("ball elements have words");
                    let domain = self.ball.sphere(r - self.ball.length(ti)).end;
                    let cols: Vec<Sparse> =
                        (0..domain).map(|j| self.apply_word_sparse(&word, vec![(j, ONE)])).collect();
                    sparse_op_norm(&cols)
                })
                .reduce(|| 1.0, f64::max)
        })
    }

    /// All contract checks at this point (cached).
    pub fn contract(&self) -> &ContractReport {
        self.contract.get_or_init(|| {
            let coefficient_residual = self.coefficient_residual().unwrap_or(f64::INFINITY);
            let unitarity_residual = self.unitarity_residual();
            let homomorphism_residual = self.homomorphism_residual();
            let cr = self.holomorphy_profile(CR_STEP);
            ContractReport {
                z: [self.z.re, self.z.im],
                radius: self.radius(),
                real_point: self.z.im == 0.0,
                unitarity_residual,
                coefficient_residual,
                homomorphism_residual,
                cr_residual: cr.as_ref().map_or(f64::INFINITY, |c| c.0),
                cr_ratio_min: cr.as_ref().map_or(f64::NAN, |c| c.1),
                cr_ratio_max: cr.as_ref().map_or(f64::NAN, |c| c.2),
                empirical_bound: self.empirical_bound(),
            }
        })
    }

    /// `(max residual at h, min ratio, max ratio)` over interior `t` whose
    /// residual at `h/2` clears the rounding floor.
    fn holomorphy_profile(&self, h: f64) -> Option<(f64, f64, f64)> {
        let coarse = Stencil::new(self, h).ok()?;
        let fine = Stencil::new(self, h / 2.0).ok()?;
        let (mut worst, mut lo, mut hi) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..self.interior_len() {
            let t = self.ball.element(i);
            let r1 = coarse.residual(t).ok()?;
            let r2 = fine.residual(t).ok()?;
            worst = worst.max(r1);
            if r2 > 1e-9 {
                lo = lo.min(r1 / r2);
                hi = hi.max(r1 / r2);
            }
        }
        if lo > hi {
            // no element carries a resolvable third derivative (e.g. z = 0, R small)
            lo = 4.0;
            hi = 4.0;
        }
        Some((worst, lo, hi))
    }
}

/// The four family points `z ± h`, `z ± ih`.
struct Stencil {
    h: f64,
    points: [FamilyPoint; 4],
}

impl Stencil {
    fn new(fp: &FamilyPoint, h: f64) -> Result<Stencil, MultiplierError> {
        if !(h > 0.0) {
            return Err(MultiplierError::Invalid("step must be positive".into()));
        }
        let z0 = fp.z();
        let steps = [C64::new(h, 0.0), C64::new(-h, 0.0), C64::new(0.0, h), C64::new(0.0, -h)];
        if steps.iter().any(|s| (z0 + s).norm() >= 1.0) {
            return Err(MultiplierError::Invalid(format!("step {h} leaves the unit disk at z = {z0}")));
        }
        let at = |dz: C64| FamilyPoint::on_ball(fp.group.clone(), fp.ball.clone(), z0 + dz);
        Ok(Stencil { h, points: [at(steps[0])?, at(steps[1])?, at(steps[2])?, at(steps[3])?] })
    }

    fn residual(&self, t: &Element) -> Result<f64, MultiplierError> {
        let f: Vec<C64> = self.points.iter().map(|p| p.coefficient(t)).collect::<Result<_, _>>()?;
        let dx = (f[0] - f[1]) / (2.0 * self.h);
        let dy = (f[2] - f[3]) / C64::new(0.0, 2.0 * self.h);
        Ok((dx - dy).norm())
    }
}

/// Largest singular value of the matrix with the given sparse columns,
/// computed blockwise over connected components of the row-sharing graph.
fn sparse_op_norm(cols: &[Sparse]) -> f64 {
    let n = cols.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for (j, col) in cols.iter().enumerate() {
        for &(i, _) in col {
            match owner.get(&i) {
                Some(&k) => {
                    let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                    parent[a] = b;
                }
                None => {
                    owner.insert(i, j);
                }
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..n {
        let r = find(&mut parent, j);
        comps.entry(r).or_default().push(j);
    }
    let dot = |a: &Sparse, b: &Sparse| -> C64 {
        // both sorted by row
        let (mut i, mut k, mut s) = (0, 0, ZERO);
        while i < a.len() && k < b.len() {
            match a[i].0.cmp(&b[k].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => k += 1,
                std::cmp::Ordering::Equal => {
                    s += a[i].1.conj() * b[k].1;
                    i += 1;
                    k += 1;
                }
            }
        }
        s
    };
    comps
        .values()
        .map(|members| {
            if members.len() == 1 {
                let c = &cols[members[0]];
                return c.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
            }
            let m = members.len();
            let gram = DMatrix::from_fn(m, m, |a, b| dot(&cols[members[a]], &cols[members[b]]));
            crate::linalg::hermitian_eigenvalues(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Cauchy–Riemann residual `|D_x − D_y|` of `z ↦ ⟨π_z(t)ξ, ξ⟩` at `fp.z()`,
/// with central differences `D_x = (f(z+h) − f(z−h))/2h` and
/// `D_y = (f(z+ih) − f(z−ih))/2ih`. For a holomorphic coefficient this is
/// `|f'''(z)| h²/3 + O(h⁴)`.
pub fn holomorphy_check(fp: &FamilyPoint, t: &Element, h: f64) -> Result<f64, MultiplierError> {
    Stencil::new(fp, h)?.residual(t)
}

/// Diagnostics of one family point; serialized as the family JSON report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractReport {
    pub z: [f64; 2],
    #[serde(rename = "R")]
    pub radius: usize,
    pub real_point: bool,
    pub unitarity_residual: f64,
    pub coefficient_residual: f64,
    pub homomorphism_residual: f64,
    pub cr_residual: f64,
    pub cr_ratio_min: f64,
    pub cr_ratio_max: f64,
    pub empirical_bound: f64,
}

impl ContractReport {
    pub fn coefficient_ok(&self) -> bool {
        self.coefficient_residual <= CONTRACT_TOL
    }

    /// Unitarity is only required at real parameters.
    pub fn unitarity_ok(&self) -> bool {
        !self.real_point || self.unitarity_residual <= CONTRACT_TOL
    }

    pub fn holomorphy_ok(&self) -> bool {
        self.cr_ratio_min >= CR_RATIO_RANGE.0 && self.cr_ratio_max <= CR_RATIO_RANGE.1
    }

    pub fn passed(&self) -> bool {
        self.coefficient_ok()
            && self.unitarity_ok()
            && self.homomorphism_residual <= CONTRACT_TOL
            && self.holomorphy_ok()
            && self.empirical_bound.is_finite()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl Representation for FamilyPoint {
    fn group(&self) -> &Arc<Group> {
        &self.group
    }
    fn dim(&self) -> usize {
        self.ball.len()
    }
    fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError> {
        if v.len() != self.dim() {
            return Err(MultiplierError::Invalid(format!("vector of length {} for dimension {}", v.len(), self.dim())));
        }
        let word = self.group.word(t)?;
        let x: Sparse = v.iter().enumerate().filter(|(_, a)| **a != ZERO).map(|(i, a)| (i, *a)).collect();
        let y = self.apply_word_sparse(&word, x);
        let mut out = CVector::zeros(v.len());
        for (i, a) in y {
            out[i] = a;
        }
        Ok(out)
    }
    fn norm_bound(&self) -> f64 {
        self.empirical_bound()
    }
    fn is_unitary(&self) -> bool {
        false
    }
    fn label(&self) -> String {
        format!("tree_family(z={},R={})", self.z, self.radius())
    }
}
