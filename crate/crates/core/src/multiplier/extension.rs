//! Multipliers on the amenable extension `Γ = ℤ² ◁ SL(2,ℤ)⋉ℤ²`: inflation
//! from the quotient, coset averaging, and the approximants `f̌ ∗ φ̃_k`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::group::{Ball, Element, Group, GroupError, Mat2, QuotientStructure};
use crate::linalg::{C64, ZERO};

use super::certificate::finite_support;
use super::{folner_approximant, same_group, sup_on_ball, FinitelySupportedVector, Multiplier, MultiplierError};

fn quotient_arc(qs: &QuotientStructure) -> Arc<Group> {
    Arc::new(qs.quotient_group().clone())
}

/// `Θ(ψ) = ψ ∘ q`, constant on Γ-cosets.
pub fn inflate(psi: &Multiplier, group: Arc<Group>) -> Result<Multiplier, MultiplierError> {
    let qs = group.quotient_structure()?;
    same_group(psi.group(), qs.quotient_group())?;
    let inner = psi.clone();
    let name = format!("inflate[{}]", psi.name());
    Ok(Multiplier::lazy(group, Arc::new(move |t: &Element| inner.eval(&qs.q(t)?)), name)
        .with_symmetry(psi.is_symmetric()))
}

/// `T(f)(x) = Σ_{q(t)=x} f(t)`; adjoint to inflation under the pairing.
pub fn coset_average(f: &FinitelySupportedVector) -> Result<FinitelySupportedVector, MultiplierError> {
    let qs = f.group().quotient_structure()?;
    let mut sums: BTreeMap<Element, C64> = BTreeMap::new();
    for (t, v) in f.entries() {
        *sums.entry(qs.q(t)?).or_insert(ZERO) += *v;
    }
    FinitelySupportedVector::new(quotient_arc(&qs), sums)
}

fn tent(k: usize, w: &[i64; 2]) -> f64 {
    w.iter().map(|&m| (1.0 - m.unsigned_abs() as f64 / (k + 1) as f64).max(0.0)).product()
}

/// `f̌ ∗ φ̃_k`, i.e. `t ↦ Σ_u f(u) φ̃_k(ut)`, where `φ̃_k` is the Følner
/// approximant of Γ extended by zero. Finitely supported, computed exactly.
pub fn extension_pipeline(f: &FinitelySupportedVector, k: usize) -> Result<Multiplier, MultiplierError> {
    let group = f.group().clone();
    let qs = group.quotient_structure()?;
    let phi_k = folner_approximant(Arc::new(qs.kernel_group().clone()), k)?;
    let box_entries = phi_k.support().expect("Følner approximants are finitely supported");
    let mut out: BTreeMap<Element, C64> = BTreeMap::new();
    for (u, c) in f.entries() {
        let u_inv = group.inverse(u)?;
        for (w, v) in box_entries {
            let t = group.multiply(&u_inv, &qs.embed_kernel(w)?)?;
            *out.entry(t).or_insert(ZERO) += *c * *v;
        }
    }
    Multiplier::finite(group, out, format!("ext(k={k})"))
}

/// Pointwise limit `t ↦ Σ_u f(u) 𝟙_Γ(ut)` of the pipeline as `k → ∞`;
/// constant on every coset `tΓ`.
pub fn extension_limit(f: &FinitelySupportedVector) -> Result<Multiplier, MultiplierError> {
    let group = f.group().clone();
    let qs = group.quotient_structure()?;
    let entries: Vec<(Element, C64)> = f.entries().iter().map(|(t, v)| (t.clone(), *v)).collect();
    let g = group.clone();
    Ok(Multiplier::lazy(
        group,
        Arc::new(move |t: &Element| {
            entries
                .iter()
                .try_fold(ZERO, |acc, (u, v)| Ok(if qs.in_kernel(&g.multiply(u, t)?)? { acc + *v } else { acc }))
        }),
        "ext(k=∞)",
    ))
}

/// `f = Σ_x ψ(x) δ_{σ(x)}` for finitely supported `ψ` on the quotient.
pub fn lifted_section(psi: &Multiplier, group: Arc<Group>) -> Result<FinitelySupportedVector, MultiplierError> {
    let qs = group.quotient_structure()?;
    same_group(psi.group(), qs.quotient_group())?;
    let entries =
        finite_support(psi)?.into_iter().map(|(x, v)| Ok((qs.lift(&x)?, v))).collect::<Result<Vec<_>, GroupError>>()?;
    FinitelySupportedVector::new(group, entries)
}

/// Closed form of `extension_pipeline(lifted_section(ψ), k)`:
/// `(A, v) ↦ ψ(A⁻¹) φ_k(A⁻¹v)`, evaluated lazily.
pub fn lifted_quotient_pipeline(psi: &Multiplier, group: Arc<Group>, k: usize) -> Result<Multiplier, MultiplierError> {
    let qs = group.quotient_structure()?;
    same_group(psi.group(), qs.quotient_group())?;
    let inner = psi.clone();
    Ok(Multiplier::lazy(
        group,
        Arc::new(move |t: &Element| {
            let (x, gamma) = qs.split(t)?;
            let Element::Affine(_, w) = gamma else { unreachable!("split returns an affine Γ-part") };
            let x_inv = match x {
                Element::Matrix(m) => Element::Matrix(m.sl_inverse()?),
                _ => unreachable!("quotient elements are matrices"),
            };
            Ok(inner.eval(&x_inv)? * tent(k, &w))
        }),
        format!("lifted_ext[{}](k={k})", psi.name()),
    ))
}

/// Number of pairs `(t, tγ)`, `t` in the ball and `γ ∈ {±e₁, ±e₂}`, on which
/// `φ` differs (compared exactly), and the number of pairs checked.
pub fn coset_mismatches(phi: &Multiplier, ball: &Ball) -> Result<(usize, usize), MultiplierError> {
    let group = phi.group();
    let qs = group.quotient_structure()?;
    let gammas: Vec<Element> = [[1, 0], [-1, 0], [0, 1], [0, -1]]
        .iter()
        .map(|w| qs.embed_kernel(&Element::Vector(w.to_vec())))
        .collect::<Result<_, _>>()?;
    let mut bad = 0;
    let mut checked = 0;
    for t in ball.elements() {
        let here = phi.eval(t)?;
        for g in &gammas {
            checked += 1;
            if phi.eval(&group.multiply(t, g)?)? != here {
                bad += 1;
            }
        }
    }
    Ok((bad, checked))
}

/// Fixed probe points `e, (I,e₁), σ(T), σ(S₀)(I,e₂), σ(T)σ(S₀)(I,e₁)` in the radius-3 ball.
pub fn extension_probes(group: &Group) -> Result<Vec<Element>, MultiplierError> {
    let qs = group.quotient_structure()?;
    let t = qs.lift(&Element::Matrix(Mat2::translation()))?;
    let s = qs.lift(&Element::Matrix(Mat2::rotation()))?;
    let e1 = qs.embed_kernel(&Element::Vector(vec![1, 0]))?;
    let e2 = qs.embed_kernel(&Element::Vector(vec![0, 1]))?;
    Ok(vec![group.identity(), e1.clone(), t.clone(), group.multiply(&s, &e2)?, group.product([&t, &s, &e1])?])
}

/// One step of the extension experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionRun {
    pub k: usize,
    pub r: f64,
    /// `max |φ_k(t) − 1|` over the probe points.
    pub pointwise_residual: f64,
    /// `sup |φ_k|` on the ball (a lower bound for every `M_d` norm).
    pub lower: f64,
    /// `‖f‖₁` for the lifted section `f` (triangle inequality; `φ̃_k` has norm ≤ 1).
    pub upper: f64,
    pub flags: Vec<String>,
}

/// Runs the lifted pipeline with `ψ_k = Φ_{k, 1−1/(k+1)}` on the quotient.
pub fn extension_run(group: Arc<Group>, k: usize, ball: &Ball) -> Result<ExtensionRun, MultiplierError> {
    let qs = group.quotient_structure()?;
    let r = 1.0 - 1.0 / (k + 1) as f64;
    let psi = crate::family::fejer_multiplier(quotient_arc(&qs), k, r)?;
    let out = lifted_quotient_pipeline(&psi, group.clone(), k)?;
    let pointwise_residual = extension_probes(&group)?
        .iter()
        .try_fold(0.0f64, |acc, t| Ok::<_, MultiplierError>(acc.max((out.eval(t)? - 1.0).norm())))?;
    let lower = sup_on_ball(&out, ball)?;
    let mut flags = vec!["lower=sup".to_string()];
    let upper = match lifted_section(&psi, group.clone()) {
        Ok(f) => {
            flags.push("upper=triangle".into());
            f.l1_norm()
        }
        Err(MultiplierError::Group(GroupError::BallTooLarge { .. })) => {
            flags.push("upper=unavailable(ball cap)".into());
            f64::INFINITY
        }
        Err(e) => return Err(e),
    };
    Ok(ExtensionRun { k, r, pointwise_residual, lower, upper, flags })
}
