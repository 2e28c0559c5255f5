//! Factorization certificates `φ(t₁⋯t_d) = ξ₁(t₁)⋯ξ_d(t_d)` and their
//! independent verification on ball products.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::family::FamilyPoint;
use crate::group::{Ball, Element, Group, GroupKind};
use crate::linalg::{op_norm, CMatrix, CVector, C64, ONE, ZERO};

use super::rep::{DensityRep, RegularRep, Representation, TorusShiftRep, TrivialRep};
use super::{Multiplier, MultiplierError, Rule};

/// One factor `ξ_i : G → M_{n_{i−1}×n_i}(ℂ)`.
#[derive(Clone)]
pub enum CertMap {
    /// Explicit finite table; elements not listed map to zero.
    Table { rows: usize, cols: usize, entries: BTreeMap<Element, CMatrix> },
    /// `t ↦ η* π(t)` (a row).
    Row { rep: Arc<dyn Representation>, eta: CVector },
    /// `t ↦ π(t)`.
    Rep(Arc<dyn Representation>),
    /// `t ↦ π(t) ξ` (a column).
    Col { rep: Arc<dyn Representation>, xi: CVector },
    /// `t ↦ ⟨π(t)ξ, η⟩` as a 1×1 block.
    Coefficient { rep: Arc<dyn Representation>, xi: CVector, eta: CVector },
}

impl CertMap {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            CertMap::Table { rows, cols, .. } => (*rows, *cols),
            CertMap::Row { rep, .. } => (1, rep.dim()),
            CertMap::Rep(rep) => (rep.dim(), rep.dim()),
            CertMap::Col { rep, .. } => (rep.dim(), 1),
            CertMap::Coefficient { .. } => (1, 1),
        }
    }

    /// `sup_t ‖ξ_i(t)‖` as implied by the representation's norm bound.
    pub fn sup_norm(&self) -> f64 {
        match self {
            CertMap::Table { entries, .. } => entries.values().map(op_norm).fold(0.0, f64::max),
            CertMap::Row { rep, eta } => eta.norm() * rep.norm_bound(),
            CertMap::Rep(rep) => rep.norm_bound(),
            CertMap::Col { rep, xi } => xi.norm() * rep.norm_bound(),
            CertMap::Coefficient { rep, xi, eta } => xi.norm() * eta.norm() * rep.norm_bound(),
        }
    }

    /// `ξ_i(t) v` for a vector `v` of length `n_i`.
    pub fn apply(&self, t: &Element, v: &CVector) -> Result<CVector, MultiplierError> {
        let (rows, cols) = self.shape();
        if v.len() != cols {
            return Err(MultiplierError::Certificate(format!("factor expects {cols} inputs, got {}", v.len())));
        }
        match self {
            CertMap::Table { entries, .. } => Ok(match entries.get(t) {
                Some(m) => m * v,
                None => CVector::zeros(rows),
            }),
            CertMap::Row { rep, eta } => {
                let w = rep.apply(t, v)?;
                Ok(CVector::from_element(1, eta.dotc(&w)))
            }
            CertMap::Rep(rep) => rep.apply(t, v),
            CertMap::Col { rep, xi } => Ok(rep.apply(t, xi)? * v[0]),
            CertMap::Coefficient { rep, xi, eta } => {
                let w = rep.apply(t, xi)?;
                Ok(CVector::from_element(1, eta.dotc(&w) * v[0]))
            }
        }
    }

    pub fn matrix(&self, t: &Element) -> Result<CMatrix, MultiplierError> {
        let (rows, cols) = self.shape();
        let mut m = CMatrix::zeros(rows, cols);
        let mut e = CVector::zeros(cols);
        for j in 0..cols {
            e[j] = ONE;
            m.set_column(j, &self.apply(t, &e)?);
            e[j] = ZERO;
        }
        Ok(m)
    }
}

/// Explicit maps `ξ₁,…,ξ_d` with `n₀ = n_d = 1`.
#[derive(Clone)]
pub struct FactorizationCertificate {
    pub label: String,
    pub degree: usize,
    pub dims: Vec<usize>,
    pub maps: Vec<CertMap>,
    pub sigmas: Vec<f64>,
    /// Set when some `σ_i` is a sampled (not proven) bound.
    pub empirical: bool,
    pub notes: Vec<String>,
}

impl FactorizationCertificate {
    pub fn new(label: impl Into<String>, maps: Vec<CertMap>) -> Result<Self, MultiplierError> {
        if maps.is_empty() {
            return Err(MultiplierError::Certificate("a certificate needs at least one factor".into()));
        }
        let mut dims = vec![maps[0].shape().0];
        for m in &maps {
            dims.push(m.shape().1);
        }
        let sigmas = maps.iter().map(CertMap::sup_norm).collect();
        let cert = FactorizationCertificate {
            label: label.into(),
            degree: maps.len(),
            dims,
            maps,
            sigmas,
            empirical: false,
            notes: Vec::new(),
        };
        cert.validate()?;
        Ok(cert)
    }

    pub fn validate(&self) -> Result<(), MultiplierError> {
        if self.degree != self.maps.len() || self.dims.len() != self.degree + 1 || self.sigmas.len() != self.degree {
            return Err(MultiplierError::Certificate("degree does not match the number of factors".into()));
        }
        if self.dims[0] != 1 || self.dims[self.degree] != 1 {
            return Err(MultiplierError::Certificate(format!(
                "boundary dimensions must be 1, got {} and {}",
                self.dims[0], self.dims[self.degree]
            )));
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.shape() != (self.dims[i], self.dims[i + 1]) {
                return Err(MultiplierError::Certificate(format!(
                    "factor {} has shape {:?}, expected {}×{}",
                    i + 1,
                    m.shape(),
                    self.dims[i],
                    self.dims[i + 1]
                )));
            }
        }
        if self.sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(MultiplierError::Certificate("sup-norms must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn bound(&self) -> f64 {
        self.sigmas.iter().product()
    }

    /// Product of the factors at `(t₁,…,t_d)`.
    pub fn evaluate(&self, ts: &[Element]) -> Result<C64, MultiplierError> {
        if ts.len() != self.degree {
            return Err(MultiplierError::Certificate(format!("{} elements for degree {}", ts.len(), self.degree)));
        }
        let mut v = CVector::from_element(1, ONE);
        for (m, t) in self.maps.iter().zip(ts).rev() {
            v = m.apply(t, &v)?;
        }
        Ok(v[0])
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

impl std::fmt::Debug for FactorizationCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorizationCertificate")
            .field("label", &self.label)
            .field("dims", &self.dims)
            .field("sigmas", &self.sigmas)
            .field("empirical", &self.empirical)
            .finish()
    }
}

/// `∏ σ_i` after a consistency check.
pub fn md_upper_from_certificate(c: &FactorizationCertificate) -> Result<f64, MultiplierError> {
    c.validate()?;
    Ok(c.bound())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Enumerate all of `B^d` when it has at most this many tuples.
    pub exhaustive_cap: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { exhaustive_cap: 1 << 21, samples: 50_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub residual: f64,
    pub tuples: usize,
    pub exhaustive: bool,
    /// Fraction of `B^d` that was checked.
    pub coverage: f64,
}

/// `max |φ(t₁⋯t_d) − ξ₁(t₁)⋯ξ_d(t_d)|` over `d`-tuples from the ball.
pub fn verify_certificate(
    c: &FactorizationCertificate,
    phi: &Multiplier,
    ball: &Ball,
    config: &VerifyConfig,
) -> Result<VerifyReport, MultiplierError> {
    c.validate()?;
    let group = phi.group().clone();
    let d = c.degree;
    let n = ball.len();
    let total = (n as f64).powi(d as i32);
    if total <= config.exhaustive_cap as f64 {
        // right-to-left: carry the partial column ξ_i(t_i)⋯ξ_d(t_d) and the suffix product
        let residual = (0..n)
            .into_par_iter()
            .map(|j| {
                let t = ball.element(j);
                let col = c.maps[d - 1].apply(t, &CVector::from_element(1, ONE))?;
                exhaustive_level(c, phi, &group, ball, d - 1, col, t.clone())
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        return Ok(VerifyReport { residual, tuples: total as usize, exhaustive: true, coverage: 1.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tuples: Vec<Vec<usize>> =
        (0..config.samples).map(|_| (0..d).map(|_| rng.random_range(0..n)).collect()).collect();
    let residual = tuples
        .par_iter()
        .map(|idx| {
            let ts: Vec<Element> = idx.iter().map(|&i| ball.element(i).clone()).collect();
            let product = group.product(ts.iter())?;
            Ok::<f64, MultiplierError>((phi.eval(&product)? - c.evaluate(&ts)?).norm())
        })
        .try_reduce(|| 0.0, |a: f64, b: f64| Ok(a.max(b)))?;
    Ok(VerifyReport { residual, tuples: config.samples, exhaustive: false, coverage: config.samples as f64 / total })
}

fn exhaustive_level(
    c: &FactorizationCertificate,
    phi: &Multiplier,
    group: &Group,
    ball: &Ball,
    level: usize,
    col: CVector,
    suffix: Element,
) -> Result<f64, MultiplierError> {
    if level == 0 {
        return Ok((phi.eval(&suffix)? - col[0]).norm());
    }
    let mut worst: f64 = 0.0;
    for t in ball.elements() {
        let next = c.maps[level - 1].apply(t, &col)?;
        let product = group.multiply(t, &suffix)?;
        worst = worst.max(exhaustive_level(c, phi, group, ball, level - 1, next, product)?);
    }
    Ok(worst)
}

/// Coefficient `⟨π(·)ξ, η⟩` factored as `[η*π] · π ⋯ π · [πξ]` (or a single
/// coefficient block when `d = 1`); the bound is `‖ξ‖‖η‖ · |π|^d`.
pub fn certificate_from_rep(
    rep: Arc<dyn Representation>,
    xi: CVector,
    eta: CVector,
    d: usize,
) -> Result<FactorizationCertificate, MultiplierError> {
    if d == 0 {
        return Err(MultiplierError::Invalid("degree must be at least 1".into()));
    }
    if xi.len() != rep.dim() || eta.len() != rep.dim() {
        return Err(MultiplierError::Invalid(format!(
            "vectors of length {}/{} for a {}-dimensional representation",
            xi.len(),
            eta.len(),
            rep.dim()
        )));
    }
    let label = format!("coefficient[{}](d={d})", rep.label());
    let maps = if d == 1 {
        vec![CertMap::Coefficient { rep: rep.clone(), xi, eta }]
    } else {
        let mut maps = vec![CertMap::Row { rep: rep.clone(), eta }];
        maps.extend((0..d - 2).map(|_| CertMap::Rep(rep.clone())));
        maps.push(CertMap::Col { rep: rep.clone(), xi });
        maps
    };
    let mut cert = FactorizationCertificate::new(label, maps)?;
    cert.empirical = !rep.is_unitary();
    Ok(cert)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Checks `π(s)π(t) = π(st)` and `π(t)*π(t) = I` within `1e−12` on the
/// radius-2 ball (full matrices for small dimensions, random probes otherwise).
fn check_unitary_rep(rep: &dyn Representation) -> Result<(), MultiplierError> {
    const TOL: f64 = 1e-12;
    let group = rep.group().clone();
    let ball = group.ball(2)?;
    let n = rep.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let probes: Vec<CVector> = if n <= 48 {
        (0..n).map(|i| CVector::from_fn(n, |k, _| if k == i { ONE } else { ZERO })).collect()
    } else {
        (0..4).map(|_| random_unit(&mut rng, n)).collect()
    };
    for s in ball.elements() {
        for v in &probes {
            let w = rep.apply(s, v)?;
            if (w.norm() - v.norm()).abs() > TOL {
                return Err(MultiplierError::Representation(format!("{} is not isometric at {s}", rep.label())));
            }
        }
    }
    // isometry on a finite-dimensional space plus surjectivity (π(s⁻¹)π(s) = I) gives unitarity
    for s in ball.elements() {
        for t in ball.elements() {
            let st = group.multiply(s, t)?;
            for v in &probes {
                let lhs = rep.apply(s, &rep.apply(t, v)?)?;
                let rhs = rep.apply(&st, v)?;
                if (lhs - rhs).camax() > TOL {
                    return Err(MultiplierError::Representation(format!(
                        "{} is not multiplicative at ({s}, {t})",
                        rep.label()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Coefficient certificate of a unitary representation; the bound is `‖ξ‖‖η‖`.
pub fn certificate_from_unitary_rep(
    rep: Arc<dyn Representation>,
    xi: CVector,
    eta: CVector,
    d: usize,
) -> Result<FactorizationCertificate, MultiplierError> {
    check_unitary_rep(rep.as_ref())?;
    let mut cert = certificate_from_rep(rep, xi, eta, d)?;
    cert.empirical = false;
    Ok(cert)
}

/// Coefficient certificate of a truncated uniformly bounded family point;
/// bound `b(z)^d ‖ξ‖‖η‖` with the empirical `b(z)`.
pub fn certificate_from_ub_rep(
    fp: Arc<FamilyPoint>,
    xi: CVector,
    eta: CVector,
    d: usize,
) -> Result<FactorizationCertificate, MultiplierError> {
    let report = fp.contract();
    if !report.passed() {
        return Err(MultiplierError::Representation(format!(
            "family point at z = {} fails its contract: {report:?}",
            fp.z()
        )));
    }
    let mut cert = certificate_from_rep(fp.clone(), xi, eta, d)?;
    cert.empirical = true;
    Ok(cert.note(format!(
        "empirical |π_z| = {:.12} sampled on the radius-{} ball; truncated representation",
        fp.empirical_bound(),
        fp.radius()
    )))
}

/// `φ ≡ 1` through the trivial representation.
pub fn trivial_certificate(group: Arc<Group>, d: usize) -> Result<FactorizationCertificate, MultiplierError> {
    let one = CVector::from_element(1, ONE);
    certificate_from_unitary_rep(Arc::new(TrivialRep::new(group)), one.clone(), one, d)
}

fn zn_rank(group: &Group) -> Result<usize, MultiplierError> {
    match group.kind() {
        GroupKind::Zn { n } => Ok(*n),
        _ => Err(MultiplierError::WrongGroup(format!("expected ℤⁿ, got {}", group.name()))),
    }
}

/// `r^{|n|}` on ℤ through the characters sampled at `nodes` points against the
/// Poisson density `P_r(θ) = (1 − r²)/(1 − 2r cos θ + r²)`.
///
/// The coefficient differs from `r^{|n|}` by the aliasing term
/// `(r^{Q−|n|} + r^{Q+|n|} + …)`, negligible once `r^{Q−|n|}` is.
pub fn poisson_certificate(
    group: Arc<Group>,
    r: f64,
    nodes: usize,
    d: usize,
) -> Result<FactorizationCertificate, MultiplierError> {
    if zn_rank(&group)? != 1 {
        return Err(MultiplierError::WrongGroup("the Poisson certificate lives on ℤ".into()));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(MultiplierError::Invalid(format!("Poisson radius {r} outside [0, 1)")));
    }
    let rep = Arc::new(DensityRep::new(group, nodes)?);
    let q = nodes as f64;
    let w = CVector::from_fn(nodes, |k, _| {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / q;
        let p = (1.0 - r * r) / (1.0 - 2.0 * r * theta.cos() + r * r);
        C64::new((p / q).sqrt(), 0.0)
    });
    let mut cert = certificate_from_unitary_rep(rep, w.clone(), w, d)?;
    cert.label = format!("poisson(r={r},Q={nodes},d={d})");
    Ok(cert)
}

/// Exact support of a finitely supported multiplier, including radial tables
/// with a zero tail.
pub(crate) fn finite_support(phi: &Multiplier) -> Result<Vec<(Element, C64)>, MultiplierError> {
    match phi.rule() {
        Rule::Support(s) => Ok(s.iter().map(|(t, v)| (t.clone(), *v)).collect()),
        Rule::RadialTable { coeffs, tail } if *tail == ZERO && !coeffs.is_empty() => {
            let ball = phi.group().ball(coeffs.len() - 1)?;
            Ok(ball
                .elements()
                .iter()
                .zip(ball.lengths())
                .filter(|(_, &l)| coeffs[l] != ZERO)
                .map(|(t, &l)| (t.clone(), coeffs[l]))
                .collect())
        }
        Rule::RadialTable { coeffs, tail } if *tail == ZERO && coeffs.is_empty() => Ok(Vec::new()),
        _ => Err(MultiplierError::NotEvaluable {
            name: phi.name().to_string(),
            element: "*".into(),
            reason: "not finitely supported".into(),
        }),
    }
}

/// Finitely supported `φ` on ℤⁿ as a coefficient of the sampled characters:
/// with `f̂_q = Σ_m φ(m) e^{−i m·θ_q}` on a `Qⁿ` grid, `ξ_q = √(|f̂_q|/Qⁿ)`
/// and `η_q = conj(sgn f̂_q) ξ_q`. The coefficient is the `Q`-periodization of
/// `φ`, exact for products `m` with `m − supp φ` free of nonzero multiples of
/// `Q`. The bound `mean_q |f̂_q|` is the trapezoid rule for the `B(ℤⁿ)` norm
/// `∫|φ̂|`.
pub fn density_certificate(
    phi: &Multiplier,
    nodes: usize,
    d: usize,
) -> Result<FactorizationCertificate, MultiplierError> {
    let group = phi.group().clone();
    let n = zn_rank(&group)?;
    let rep = Arc::new(DensityRep::new(group, nodes)?);
    let dim = rep.dim();
    let mut grid = vec![ZERO; dim];
    let q = nodes as i64;
    for (t, v) in finite_support(phi)? {
        let Element::Vector(m) = t else { unreachable!("ℤⁿ elements are vectors") };
        let idx = m.iter().rev().fold(0usize, |acc, &x| acc * nodes + x.rem_euclid(q) as usize);
        grid[idx] += v;
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nodes);
    // axis i has stride Q^i
    let mut line = vec![ZERO; nodes];
    for axis in 0..n {
        let stride = nodes.pow(axis as u32);
        for base in 0..dim {
            if !(base / stride).is_multiple_of(nodes) {
                continue;
            }
            for (k, x) in line.iter_mut().enumerate() {
                *x = grid[base + k * stride];
            }
            fft.process(&mut line);
            for (k, x) in line.iter().enumerate() {
                grid[base + k * stride] = *x;
            }
        }
    }
    let scale = dim as f64;
    let xi = CVector::from_fn(dim, |k, _| C64::new((grid[k].norm() / scale).sqrt(), 0.0));
    let eta = CVector::from_fn(dim, |k, _| {
        let f = grid[k];
        let a = f.norm();
        if a == 0.0 {
            ZERO
        } else {
            (f / a).conj() * (a / scale).sqrt()
        }
    });
    let mut cert = certificate_from_unitary_rep(rep, xi, eta, d)?;
    cert.label = format!("density[{}](Q={nodes},d={d})", phi.name());
    Ok(cert.note(format!("exact for products m with |m_i| < {} − support radius", nodes)))
}

/// Bound on `|∫|φ̂| − mean_q |f̂_q||` for the `Qⁿ` grid of [`density_certificate`].
///
/// The density certificate is exact for the `Q`-periodization of `φ`; its
/// bound approximates the `B(ℤⁿ)` norm by the trapezoid rule. `|φ̂|` is
/// Lipschitz in `θ_i` with constant `L_i = min_c Σ_m |m_i − c| |φ(m)|`, and the
/// periodic trapezoid rule errs by at most `Σ_i π L_i / (2Q)`.
pub fn density_quadrature_error(phi: &Multiplier, nodes: usize) -> Result<f64, MultiplierError> {
    let n = zn_rank(phi.group())?;
    let support = finite_support(phi)?;
    let mut total = 0.0;
    for axis in 0..n {
        let coord = |t: &Element| match t {
            Element::Vector(m) => m[axis] as f64,
            _ => unreachable!("ℤⁿ elements are vectors"),
        };
        // a weighted median is attained at a support coordinate
        let lipschitz = support
            .iter()
            .map(|(c, _)| support.iter().map(|(t, v)| (coord(t) - coord(c)).abs() * v.norm()).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        if lipschitz.is_finite() {
            total += std::f64::consts::PI * lipschitz / (2.0 * nodes as f64);
        }
    }
    Ok(total)
}

/// Følner approximant `φ_k` on ℤⁿ through shifts on the torus `(ℤ/L)ⁿ` with
/// `ξ = η = |F|^{−1/2} 𝟙_F`; exact for products with `|m_i| ≤ reach`.
pub fn folner_certificate(
    group: Arc<Group>,
    k: usize,
    reach: usize,
    d: usize,
) -> Result<FactorizationCertificate, MultiplierError> {
    let n = zn_rank(&group)?;
    let rep = Arc::new(TorusShiftRep::new(group, k + 1 + reach)?);
    let count = (k + 1).pow(n as u32);
    let mut xi = CVector::zeros(rep.dim());
    let mut point = vec![0i64; n];
    let w = C64::new(1.0 / (count as f64).sqrt(), 0.0);
    for _ in 0..count {
        xi[rep.index_of(&point)] = w;
        for c in point.iter_mut() {
            *c += 1;
            if *c <= k as i64 {
                break;
            }
            *c = 0;
        }
    }
    let mut cert = certificate_from_unitary_rep(rep, xi.clone(), xi, d)?;
    cert.label = format!("folner(k={k},d={d})");
    Ok(cert.note(format!("exact for products with coordinates |m_i| ≤ {reach}")))
}

/// `‖φ‖ ≤ ‖φ‖₂` for finitely supported `φ`, as the coefficient
/// `⟨λ(t)δ_e, conj φ⟩` of the regular representation on a ball large enough
/// to hold every `d`-fold product of radius-`radius` elements.
pub fn l2_certificate(phi: &Multiplier, radius: usize, d: usize) -> Result<FactorizationCertificate, MultiplierError> {
    let group = phi.group().clone();
    let support = finite_support(phi)?;
    let support_radius =
        support.iter().map(|(t, _)| group.word_length(t)).try_fold(0usize, |acc, l| l.map(|l| acc.max(l)))?;
    let ball = Arc::new(group.ball((d * radius).max(support_radius))?);
    let mut eta = CVector::zeros(ball.len());
    for (t, v) in &support {
        eta[ball.index_of(t).expect("support lies in the ball")] = v.conj();
    }
    let mut xi = CVector::zeros(ball.len());
    xi[0] = ONE;
    let rep = Arc::new(RegularRep::new(group, ball, 1));
    let mut cert = certificate_from_rep(rep, xi, eta, d)?;
    // the compression of λ is contractive, and no product along the chain leaves the ball
    cert.empirical = false;
    cert.label = format!("l2[{}](d={d})", phi.name());
    Ok(cert.note(format!("valid for products of radius-{radius} elements")))
}

/// `T = (1/|G|) Σ_s φ(s) λ(s)*` on `ℓ²(G)` for a finite group; `φ(t) = tr(λ(t)T)`.
pub fn fourier_operator(phi: &Multiplier) -> Result<CMatrix, MultiplierError> {
    let group = phi.group();
    let order = group.order().ok_or_else(|| MultiplierError::WrongGroup(format!("{} is infinite", group.name())))?;
    let ball = group.ball(order)?;
    let inverses: Vec<Element> = ball.elements().iter().map(|s| group.inverse(s)).collect::<Result<_, _>>()?;
    let mut t = CMatrix::zeros(order, order);
    for i in 0..order {
        for j in 0..order {
            // λ(s)*[i][j] = 1 iff s_j = s s_i
            let s = group.multiply(ball.element(j), &inverses[i])?;
            t[(i, j)] = phi.eval(&s)? / order as f64;
        }
    }
    Ok(t)
}

/// Optimal `B(G)` certificate on a finite group from the singular value
/// decomposition `T = Σ σ_k u_k v_k*`: `ξ = ⊕ √σ_k u_k`, `η = ⊕ √σ_k v_k` in
/// `rank` copies of the regular representation, bound `‖T‖₁`.
pub fn regular_coefficient_certificate(
    phi: &Multiplier,
    d: usize,
) -> Result<FactorizationCertificate, MultiplierError> {
    let t = fourier_operator(phi)?;
    let order = t.nrows();
    let group = phi.group().clone();
    let ball = Arc::new(group.ball(order)?);
    let svd = t.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > 1e-14 * smax.max(f64::MIN_POSITIVE))
        .collect();
    let mult = keep.len().max(1);
    let mut xi = CVector::zeros(order * mult);
    let mut eta = CVector::zeros(order * mult);
    for (c, &k) in keep.iter().enumerate() {
        let s = C64::new(svd.singular_values[k].sqrt(), 0.0);
        for i in 0..order {
            xi[c * order + i] = u[(i, k)] * s;
            eta[c * order + i] = v_t[(k, i)].conj() * s;
        }
    }
    let rep = Arc::new(RegularRep::new(group, ball, mult));
    let mut cert = certificate_from_unitary_rep(rep, xi, eta, d)?;
    cert.label = format!("regular_svd[{}](d={d})", phi.name());
    Ok(cert)
}
