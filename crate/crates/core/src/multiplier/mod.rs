//! Multipliers on groups and their `M_d` norm brackets.
//!
//! Lower bounds come from Schur norms of Gram truncations (every `M_d` norm
//! dominates the `M_2` norm, which dominates each truncation); upper bounds
//! come from explicit factorization certificates built out of
//! representations.

mod bracket;
mod certificate;
mod extension;
pub mod io;
mod rep;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{Element, Group, GroupError};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::schur::SchurError;

pub use bracket::{m2_lower_bound, sup_on_ball, M2Lower, NormBracket, BRACKET_CSV_HEADER};
pub use certificate::{
    certificate_from_rep, certificate_from_ub_rep, certificate_from_unitary_rep, density_certificate,
    density_quadrature_error, folner_certificate, fourier_operator, l2_certificate, md_upper_from_certificate,
    poisson_certificate, regular_coefficient_certificate, trivial_certificate, verify_certificate, CertMap,
    FactorizationCertificate, VerifyConfig, VerifyReport,
};
pub use extension::{
    coset_average, coset_mismatches, extension_limit, extension_pipeline, extension_probes, extension_run, inflate,
    lifted_quotient_pipeline, lifted_section, ExtensionRun,
};
pub use rep::{DensityRep, MatrixRep, RegularRep, Representation, TorusShiftRep, TrivialRep};

#[derive(Debug, Error)]
pub enum MultiplierError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Schur(#[from] SchurError),
    #[error("multiplier `{name}` is not evaluable at {element}: {reason}")]
    NotEvaluable { name: String, element: String, reason: String },
    #[error("wrong group: {0}")]
    WrongGroup(String),
    #[error("inconsistent certificate: {0}")]
    Certificate(String),
    #[error("representation check failed: {0}")]
    Representation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed multiplier literal: {0}")]
    Parse(String),
}

/// A group homomorphism `Γ → G`, used for restrictions.
pub type Embedding = Arc<dyn Fn(&Element) -> Result<Element, GroupError> + Send + Sync>;

pub type Evaluator = Arc<dyn Fn(&Element) -> Result<C64, MultiplierError> + Send + Sync>;
pub type Profile = Arc<dyn Fn(usize) -> C64 + Send + Sync>;

/// How a multiplier is evaluated.
#[derive(Clone)]
pub enum Rule {
    /// Finitely supported; absent elements are zero.
    Support(BTreeMap<Element, C64>),
    /// `φ(t) = coeffs[ℓ(t)]`, or `tail` beyond the table.
    RadialTable { coeffs: Vec<C64>, tail: C64 },
    /// `φ(t) = f(ℓ(t))` for a closed-form profile `f`.
    RadialFn(Profile),
    /// Arbitrary evaluation rule.
    Lazy(Evaluator),
}

/// A complex-valued function on a group.
#[derive(Clone)]
pub struct Multiplier {
    group: Arc<Group>,
    rule: Rule,
    name: String,
    symmetric: bool,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.rule {
            Rule::Support(s) => format!("support({})", s.len()),
            Rule::RadialTable { coeffs, .. } => format!("radial_table({})", coeffs.len()),
            Rule::RadialFn(_) => "radial_fn".into(),
            Rule::Lazy(_) => "lazy".into(),
        };
        f.debug_struct("Multiplier")
            .field("name", &self.name)
            .field("group", &self.group.name())
            .field("rule", &kind)
            .finish()
    }
}

impl Multiplier {
    fn new(group: Arc<Group>, rule: Rule, name: impl Into<String>) -> Self {
        Multiplier { group, rule, name: name.into(), symmetric: false }
    }

    /// Finitely supported multiplier; zero coefficients are discarded.
    pub fn finite<I>(group: Arc<Group>, entries: I, name: impl Into<String>) -> Result<Self, MultiplierError>
    where
        I: IntoIterator<Item = (Element, C64)>,
    {
        let mut map = BTreeMap::new();
        for (t, v) in entries {
            if !group.contains(&t) {
                return Err(GroupError::ForeignElement(t.to_string()).into());
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(MultiplierError::Invalid(format!("non-finite value at {t}")));
            }
            if v != ZERO {
                *map.entry(t).or_insert(ZERO) += v;
            }
        }
        map.retain(|_, v| *v != ZERO);
        Ok(Multiplier::new(group, Rule::Support(map), name))
    }

    pub fn radial_table(group: Arc<Group>, coeffs: Vec<C64>, tail: C64, name: impl Into<String>) -> Self {
        Multiplier::new(group, Rule::RadialTable { coeffs, tail }, name)
    }

    pub fn radial_fn(group: Arc<Group>, profile: Profile, name: impl Into<String>) -> Self {
        Multiplier::new(group, Rule::RadialFn(profile), name)
    }

    pub fn lazy(group: Arc<Group>, eval: Evaluator, name: impl Into<String>) -> Self {
        Multiplier::new(group, Rule::Lazy(eval), name)
    }

    /// The constant function 1.
    pub fn one(group: Arc<Group>) -> Self {
        Multiplier::radial_table(group, vec![], C64::new(1.0, 0.0), "one")
    }

    /// Marks the multiplier as satisfying `φ(t⁻¹) = conj φ(t)`.
    pub fn with_symmetry(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.rule, Rule::RadialTable { .. } | Rule::RadialFn(_))
    }

    /// Radial profile value at length `l`, for radial multipliers.
    pub fn profile(&self, l: usize) -> Option<C64> {
        match &self.rule {
            Rule::RadialTable { coeffs, tail } => Some(coeffs.get(l).copied().unwrap_or(*tail)),
            Rule::RadialFn(f) => Some(f(l)),
            _ => None,
        }
    }

    /// The exact support, for finitely supported multipliers.
    pub fn support(&self) -> Option<&BTreeMap<Element, C64>> {
        match &self.rule {
            Rule::Support(s) => Some(s),
            _ => None,
        }
    }

    pub fn eval(&self, t: &Element) -> Result<C64, MultiplierError> {
        if !self.group.contains(t) {
            return Err(GroupError::ForeignElement(t.to_string()).into());
        }
        match &self.rule {
            Rule::Support(s) => Ok(s.get(t).copied().unwrap_or(ZERO)),
            Rule::RadialTable { coeffs, tail } => {
                if coeffs.is_empty() {
                    return Ok(*tail);
                }
                let l = self.group.word_length(t)?;
                Ok(coeffs.get(l).copied().unwrap_or(*tail))
            }
            Rule::RadialFn(f) => Ok(f(self.group.word_length(t)?)),
            Rule::Lazy(f) => f(t),
        }
    }

    /// Gram transfer `M[i][j] = φ(s_i⁻¹ s_j)`.
    pub fn gram_matrix(&self, elements: &[Element]) -> Result<CMatrix, MultiplierError> {
        self.group.gram_matrix(elements, |t| self.eval(t))
    }
}

/// A finitely supported function `g` on a group (an element of ℂ[G]).
#[derive(Clone, Debug, PartialEq)]
pub struct FinitelySupportedVector {
    group: Arc<Group>,
    entries: BTreeMap<Element, C64>,
}

impl FinitelySupportedVector {
    pub fn new<I>(group: Arc<Group>, entries: I) -> Result<Self, MultiplierError>
    where
        I: IntoIterator<Item = (Element, C64)>,
    {
        let mut map = BTreeMap::new();
        for (t, v) in entries {
            if !group.contains(&t) {
                return Err(GroupError::ForeignElement(t.to_string()).into());
            }
            *map.entry(t).or_insert(ZERO) += v;
        }
        map.retain(|_, v| *v != ZERO);
        Ok(FinitelySupportedVector { group, entries: map })
    }

    pub fn delta(group: Arc<Group>, t: Element) -> Result<Self, MultiplierError> {
        Self::new(group, [(t, C64::new(1.0, 0.0))])
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn entries(&self) -> &BTreeMap<Element, C64> {
        &self.entries
    }

    pub fn get(&self, t: &Element) -> C64 {
        self.entries.get(t).copied().unwrap_or(ZERO)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn same_group(a: &Group, b: &Group) -> Result<(), MultiplierError> {
    if a == b {
        Ok(())
    } else {
        Err(MultiplierError::WrongGroup(format!("{} vs {}", a.name(), b.name())))
    }
}

/// Duality pairing `⟨φ, g⟩ = Σ_t φ(t) g(t)`.
pub fn pairing(phi: &Multiplier, g: &FinitelySupportedVector) -> Result<C64, MultiplierError> {
    same_group(phi.group(), g.group())?;
    g.entries.iter().try_fold(ZERO, |acc, (t, v)| Ok(acc + phi.eval(t)? * v))
}

/// Left convolution operator `Σ_t g(t) λ(t)` on ℓ²(G) for finite `G`.
pub fn convolution_matrix(g: &FinitelySupportedVector) -> Result<CMatrix, MultiplierError> {
    let group = g.group();
    let order = group.order().ok_or_else(|| MultiplierError::WrongGroup(format!("{} is infinite", group.name())))?;
    let ball = group.ball(order)?;
    let mut m = CMatrix::zeros(order, order);
    for (t, v) in &g.entries {
        for (j, s) in ball.elements().iter().enumerate() {
            let i = ball.index_of(&group.multiply(t, s)?).expect("finite group is exhausted");
            m[(i, j)] += *v;
        }
    }
    Ok(m)
}

/// Full group C*-norm of `g` on a finite group: the operator norm of
/// `Σ g(t) λ(t)` in the left regular representation.
pub fn cstar_norm_finite(g: &FinitelySupportedVector) -> Result<f64, MultiplierError> {
    Ok(crate::linalg::op_norm(&convolution_matrix(g)?))
}

/// Fourier-algebra norm on a finite group, `‖(1/|G|) Σ φ(s) λ(s)*‖₁`.
///
/// This is the exact `B(G)` norm, realized by [`regular_coefficient_certificate`].
pub fn fourier_norm_finite(phi: &Multiplier) -> Result<f64, MultiplierError> {
    let t = certificate::fourier_operator(phi)?;
    Ok(crate::linalg::trace_norm(&t))
}

/// Pullback of `φ` along an embedding `Γ → G`.
pub fn restrict(phi: &Multiplier, subgroup: Arc<Group>, embed: Embedding) -> Multiplier {
    let parent = phi.clone();
    let name = format!("{}|sub", phi.name());
    Multiplier::lazy(subgroup, Arc::new(move |h: &Element| parent.eval(&embed(h)?)), name)
        .with_symmetry(phi.is_symmetric())
}

/// Embedding ℤ → F_k, `n ↦ g^n` for a free generator letter `g` (1-based).
pub fn cyclic_in_free(letter: i32) -> Embedding {
    Arc::new(move |h: &Element| match h {
        Element::Vector(v) if v.len() == 1 => {
            let l = if v[0] >= 0 { letter } else { -letter };
            Ok(Element::Word(vec![l; v[0].unsigned_abs() as usize]))
        }
        other => Err(GroupError::ForeignElement(other.to_string())),
    })
}

/// Følner approximant `φ_k = |F|⁻¹ 𝟙_F ⋆ 𝟙_F⁻¹`, `F = {0,…,k}ⁿ`, on ℤⁿ:
/// `φ_k(m) = ∏ max(0, 1 − |m_i|/(k+1))`.
pub fn folner_approximant(group: Arc<Group>, k: usize) -> Result<Multiplier, MultiplierError> {
    let n = match group.kind() {
        crate::group::GroupKind::Zn { n } => *n,
        _ => return Err(MultiplierError::WrongGroup(format!("Følner boxes need ℤⁿ, got {}", group.name()))),
    };
    let side = k as i64;
    let mut entries = Vec::new();
    let mut point = vec![-side; n];
    loop {
        let v: f64 = point.iter().map(|&m| 1.0 - m.unsigned_abs() as f64 / (k + 1) as f64).product();
        entries.push((Element::Vector(point.clone()), C64::new(v, 0.0)));
        // odometer over [-k, k]^n
        let mut i = 0;
        loop {
            if i == n {
                let name = format!("folner(k={k})");
                return Ok(Multiplier::finite(group, entries, name)?.with_symmetry(true));
            }
            if point[i] < side {
                point[i] += 1;
                break;
            }
            point[i] = -side;
            i += 1;
        }
    }
}
