//! Radial multipliers `ψ_z(t) = z^{ℓ(t)}`, their Fejér averages `Φ_{N,r}`,
//! and the analytic family of tree representations realizing them.

mod tree;

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::group::{Ball, Group};
use crate::linalg::{C64, ONE, ZERO};
use crate::multiplier::{Multiplier, MultiplierError};

pub use tree::{
    holomorphy_check, tree_family_point, ContractReport, FamilyPoint, CONTRACT_TOL, CR_RATIO_RANGE, CR_STEP,
    INTERIOR_MARGIN,
};

/// Averaged coefficients below this modulus are dropped (and recorded).
pub const COEFF_CUTOFF: f64 = 1e-14;

/// `z^ℓ` with `0⁰ = 1`.
pub fn psi(z: C64, l: usize) -> C64 {
    if l == 0 {
        ONE
    } else {
        z.powu(l as u32)
    }
}

/// The radial multiplier `t ↦ z^{ℓ(t)}`.
pub fn psi_multiplier(group: Arc<Group>, z: C64) -> Result<Multiplier, MultiplierError> {
    if !(z.norm() < 1.0) {
        return Err(MultiplierError::Invalid(format!("|z| = {} is not inside the unit disk", z.norm())));
    }
    Ok(Multiplier::radial_fn(group, Arc::new(move |l| psi(z, l)), format!("psi({z})")).with_symmetry(z.im == 0.0))
}

/// Fourier coefficient `max(0, 1 − |n|/(N+1))` of the Fejér kernel `F_N`.
pub fn fejer_kernel_coeff(n_deg: usize, n: i64) -> f64 {
    (1.0 - n.unsigned_abs() as f64 / (n_deg + 1) as f64).max(0.0)
}

/// `F_N(e^{iθ}) = Σ_{|n|≤N} (1 − |n|/(N+1)) e^{inθ}`, real and nonnegative.
pub fn fejer_kernel(n_deg: usize, theta: f64) -> f64 {
    1.0 + 2.0 * (1..=n_deg).map(|n| fejer_kernel_coeff(n_deg, n as i64) * (n as f64 * theta).cos()).sum::<f64>()
}

/// Degree, radius and quadrature size of a Fejér average.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FejerParams {
    pub n: usize,
    pub r: f64,
    pub nodes: usize,
}

impl FejerParams {
    /// Uses `Q = 4(N+1)` nodes.
    pub fn new(n: usize, r: f64) -> Result<Self, MultiplierError> {
        Self::with_nodes(n, r, 4 * (n + 1))
    }

    pub fn with_nodes(n: usize, r: f64, nodes: usize) -> Result<Self, MultiplierError> {
        if !(0.0..1.0).contains(&r) {
            return Err(MultiplierError::Invalid(format!("Fejér radius {r} outside [0, 1)")));
        }
        if nodes < 4 * (n + 1) {
            return Err(MultiplierError::Invalid(format!("{nodes} nodes is below 4(N+1) = {}", 4 * (n + 1))));
        }
        Ok(FejerParams { n, r, nodes })
    }

    /// `θ_q = 2πq/Q`.
    pub fn theta(&self, q: usize) -> f64 {
        2.0 * std::f64::consts::PI * q as f64 / self.nodes as f64
    }

    /// Largest length at which the trapezoid rule reproduces the integral
    /// exactly; beyond it the kernel aliases (`ℓ ≥ Q − N`).
    pub fn exact_horizon(&self) -> usize {
        self.nodes - self.n - 1
    }
}

/// `Φ_{N,r}(t) = (1 − ℓ(t)/(N+1)) r^{ℓ(t)}` for `ℓ(t) ≤ N`, else 0.
pub fn fejer_multiplier(group: Arc<Group>, n: usize, r: f64) -> Result<Multiplier, MultiplierError> {
    FejerParams::new(n, r)?;
    let coeffs = (0..=n).map(|l| C64::new(fejer_kernel_coeff(n, l as i64) * r.powi(l as i32), 0.0)).collect();
    Ok(Multiplier::radial_table(group, coeffs, ZERO, format!("fejer(N={n},r={r})")).with_symmetry(true))
}

/// Result of averaging radial multipliers length by length.
#[derive(Clone, Debug)]
pub struct Averaged {
    pub multiplier: Multiplier,
    /// `(ℓ, value)` pairs discarded by the cutoff.
    pub dropped: Vec<(usize, C64)>,
    pub dropped_mass: f64,
}

/// `Σ_q w_q φ_q` on lengths `0..=horizon` for radial `φ_q`; averaged
/// coefficients of modulus below [`COEFF_CUTOFF`] become zero and are
/// recorded. The result vanishes beyond `horizon`.
pub fn quadrature_average(
    samples: &[Multiplier],
    weights: &[C64],
    horizon: usize,
) -> Result<Averaged, MultiplierError> {
    if samples.len() != weights.len() {
        return Err(MultiplierError::Invalid(format!("{} samples with {} weights", samples.len(), weights.len())));
    }
    let group = match samples.first() {
        Some(s) => s.group().clone(),
        None => return Err(MultiplierError::Invalid("nothing to average".into())),
    };
    let mut coeffs = vec![ZERO; horizon + 1];
    for (phi, w) in samples.iter().zip(weights) {
        if phi.group() != &group {
            return Err(MultiplierError::WrongGroup("samples live on different groups".into()));
        }
        for (l, c) in coeffs.iter_mut().enumerate() {
            let v = phi.profile(l).ok_or_else(|| MultiplierError::NotEvaluable {
                name: phi.name().to_string(),
                element: format!("length {l}"),
                reason: "only radial samples can be averaged length by length".into(),
            })?;
            *c += w * v;
        }
    }
    let mut dropped = Vec::new();
    for (l, c) in coeffs.iter_mut().enumerate() {
        if *c != ZERO && c.norm() < COEFF_CUTOFF {
            dropped.push((l, *c));
            *c = ZERO;
        }
    }
    while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
        coeffs.pop();
    }
    let dropped_mass = dropped.iter().map(|(_, c)| c.norm()).sum();
    Ok(Averaged { multiplier: Multiplier::radial_table(group, coeffs, ZERO, "average"), dropped, dropped_mass })
}

/// Trapezoid rule for `(1/2π)∫ F_N(e^{iθ}) ψ_{re^{iθ}} dθ` on the `Q`-point grid,
/// materialized up to the exact horizon.
pub fn fejer_quadrature(group: Arc<Group>, p: &FejerParams) -> Result<Averaged, MultiplierError> {
    let samples = (0..p.nodes)
        .map(|q| psi_multiplier(group.clone(), C64::from_polar(p.r, p.theta(q))))
        .collect::<Result<Vec<_>, _>>()?;
    let weights: Vec<C64> =
        (0..p.nodes).map(|q| C64::new(fejer_kernel(p.n, p.theta(q)) / p.nodes as f64, 0.0)).collect();
    let mut avg = quadrature_average(&samples, &weights, p.exact_horizon())?;
    avg.multiplier = avg.multiplier.named(format!("fejer_quadrature(N={},r={},Q={})", p.n, p.r, p.nodes));
    Ok(avg)
}

/// Upper bound for `‖Φ_{N,r}‖_{M_d(F_k)}` by averaging family bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedBound {
    pub params: FejerParams,
    pub d: usize,
    /// `(θ_q, b(re^{iθ_q}))` on the grid.
    pub samples: Vec<(f64, f64)>,
    /// `(1/Q) Σ_q F_N(e^{iθ_q}) b(re^{iθ_q})^d`.
    pub upper: f64,
    pub flags: Vec<String>,
}

/// Triangle inequality through the quadrature: each `ψ_{z_q}` is the
/// coefficient `⟨π_{z_q}(·)δ_e, δ_e⟩` with bound `b(z_q)^d`, and the weights
/// `F_N(e^{iθ_q})/Q` are nonnegative. The bounds `b` are empirical, and the
/// quadrature equals `Φ_{N,r}` only up to the exact horizon.
pub fn averaged_upper_bound(
    p: &FejerParams,
    rank: usize,
    radius: usize,
    d: usize,
) -> Result<AveragedBound, MultiplierError> {
    let group = Arc::new(Group::free(rank));
    let ball = Arc::new(group.ball(radius)?);
    // b(z̄) = b(z): only the upper half of the circle is built
    let half = p.nodes / 2;
    let bounds = (0..=half)
        .into_par_iter()
        .map(|q| {
            let fp = FamilyPoint::on_ball(group.clone(), ball.clone(), C64::from_polar(p.r, p.theta(q)))?;
            Ok(fp.empirical_bound())
        })
        .collect::<Result<Vec<f64>, MultiplierError>>()?;
    let samples: Vec<(f64, f64)> =
        (0..p.nodes).map(|q| (p.theta(q), bounds[if q <= half { q } else { p.nodes - q }])).collect();
    let upper = samples.iter().map(|&(theta, b)| fejer_kernel(p.n, theta).max(0.0) * b.powi(d as i32)).sum::<f64>()
        / p.nodes as f64;
    let flags = vec![
        "empirical".to_string(),
        format!("truncation_R={radius}"),
        format!("exact_to_length={}", p.exact_horizon()),
    ];
    Ok(AveragedBound { params: *p, d, samples, upper, flags })
}

/// `sup_{t∈B} |φ(t) − 1|` on a fixed window.
pub fn pointwise_residual(phi: &Multiplier, window: &Ball) -> Result<f64, MultiplierError> {
    window.elements().iter().try_fold(0.0f64, |acc, t| Ok(acc.max((phi.eval(t)? - ONE).norm())))
}

/// One line of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub big_n: usize,
    pub r: f64,
    pub pointwise_residual: f64,
    pub lower: f64,
    pub upper: f64,
    pub flags: Vec<String>,
}

/// Desk-scale approximation-property evidence for a sequence `φ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub group: String,
    pub d: usize,
    pub window_radius: usize,
    /// The uniform constant `C` that every upper bound must respect.
    pub c: f64,
    /// SUCCESS requires the last residual to be at most this fraction of the first.
    pub target_ratio: f64,
    pub rows: Vec<ConvergenceRow>,
    pub monotone: bool,
    pub bounded: bool,
    pub success: bool,
}

pub const CONVERGENCE_CSV_HEADER: &str = "n,N,r,pointwise_residual,lower,upper,flags";

/// Flags SUCCESS when the window residual decreases monotonically to at
/// most `target_ratio` times its first value while every upper bound stays
/// `≤ C` (up to `1e−9`).
pub fn convergence_report(
    group: &Group,
    d: usize,
    window_radius: usize,
    c: f64,
    target_ratio: f64,
    rows: Vec<ConvergenceRow>,
) -> ConvergenceReport {
    let monotone = rows.windows(2).all(|w| w[1].pointwise_residual <= w[0].pointwise_residual);
    let bounded = rows.iter().all(|r| r.upper <= c + 1e-9);
    let shrinks = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => b.pointwise_residual <= target_ratio * a.pointwise_residual,
        _ => false,
    };
    let success = monotone && bounded && shrinks && rows.len() >= 2;
    ConvergenceReport { group: group.name(), d, window_radius, c, target_ratio, rows, monotone, bounded, success }
}

impl ConvergenceReport {
    /// Header lines prefixed with `#`, then the table.
    pub fn to_csv(&self, extra_header: &[(String, String)]) -> String {
        let mut s = String::new();
        let status = if self.success { "SUCCESS" } else { "NOT_ESTABLISHED" };
        let mut header = vec![
            ("group".to_string(), self.group.clone()),
            ("d".to_string(), self.d.to_string()),
            ("window_radius".to_string(), self.window_radius.to_string()),
            ("C".to_string(), format!("{}", self.c)),
            ("target_ratio".to_string(), format!("{}", self.target_ratio)),
            ("monotone".to_string(), self.monotone.to_string()),
            ("bounded".to_string(), self.bounded.to_string()),
            ("status".to_string(), status.to_string()),
        ];
        header.extend(extra_header.iter().cloned());
        for (k, v) in header {
            writeln!(s, "# {k} = {v}").expect("String write");
        }
        writeln!(s, "{CONVERGENCE_CSV_HEADER}").expect("String write");
        for r in &self.rows {
            let flags = if r.flags.is_empty() { "certified".to_string() } else { r.flags.join(";") };
            writeln!(
                s,
                "{},{},{},{:.12e},{:.12e},{:.12e},{}",
                r.n, r.big_n, r.r, r.pointwise_residual, r.lower, r.upper, flags
            )
            .expect("String write");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Element;

    #[test]
    fn psi_values() {
        assert_eq!(psi(ZERO, 0), ONE);
        assert_eq!(psi(ZERO, 2), ZERO);
        let f2 = Arc::new(Group::free(2));
        let p = psi_multiplier(f2.clone(), C64::new(0.5, 0.0)).unwrap();
        assert_eq!(p.eval(&Element::parse("ab").unwrap()).unwrap(), C64::new(0.25, 0.0));
        let v = psi(C64::new(0.0, 0.5), 3);
        assert!((v - C64::new(0.0, -0.125)).norm() < 1e-16);
        assert!(psi_multiplier(f2, C64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn kernel_coefficients() {
        assert_eq!(fejer_kernel_coeff(7, 0), 1.0);
        assert_eq!(fejer_kernel_coeff(4, 2), 0.6);
        assert_eq!(fejer_kernel_coeff(4, -2), 0.6);
        assert_eq!(fejer_kernel_coeff(4, 7), 0.0);
        // F_N(1) = N + 1
        assert!((fejer_kernel(5, 0.0) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn fejer_closed_form() {
        let z = Arc::new(Group::zn(1));
        let phi = fejer_multiplier(z, 4, 0.9).unwrap();
        assert_eq!(phi.eval(&Element::Vector(vec![0])).unwrap(), ONE);
        assert!((phi.eval(&Element::Vector(vec![-2])).unwrap().re - 0.486).abs() < 1e-15);
        assert_eq!(phi.eval(&Element::Vector(vec![5])).unwrap(), ZERO);
    }

    #[test]
    fn quadrature_reproduces_closed_form() {
        let f2 = Arc::new(Group::free(2));
        for n in [0usize, 3, 8] {
            let p = FejerParams::new(n, 0.7).unwrap();
            let avg = fejer_quadrature(f2.clone(), &p).unwrap();
            let exact = fejer_multiplier(f2.clone(), n, 0.7).unwrap();
            for l in 0..=p.exact_horizon() {
                let diff = (avg.multiplier.profile(l).unwrap() - exact.profile(l).unwrap()).norm();
                assert!(diff < 1e-12, "N={n} l={l}: {diff}");
            }
            assert!(avg.dropped_mass < 1e-13);
        }
    }

    #[test]
    fn averaging_edge_cases() {
        let z = Arc::new(Group::zn(1));
        let one = Multiplier::one(z.clone());
        let avg = quadrature_average(&[one.clone()], &[ONE], 0).unwrap();
        assert_eq!(avg.multiplier.eval(&Element::Vector(vec![0])).unwrap(), ONE);
        let zero = quadrature_average(&[one.clone(), one.clone()], &[ZERO, ZERO], 3).unwrap();
        assert_eq!(zero.multiplier.eval(&Element::Vector(vec![2])).unwrap(), ZERO);
        assert!(quadrature_average(&[one.clone()], &[ONE, ONE], 1).is_err());
        let lazy = Multiplier::lazy(z, Arc::new(|_: &Element| Ok(ONE)), "lazy");
        assert!(quadrature_average(&[lazy], &[ONE], 1).is_err());
    }

    #[test]
    fn averaged_bound_at_unitary_radius() {
        let p = FejerParams::new(2, 0.0).unwrap();
        // r = 0: every sample is ψ_0 = δ_e, bound 1, kernel mass 1
        let b = averaged_upper_bound(&p, 2, 3, 2).unwrap();
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert!(b.flags.contains(&"empirical".to_string()));
    }

    #[test]
    fn convergence_flags() {
        let z = Group::zn(1);
        let row = |n, res| ConvergenceRow {
            n,
            big_n: n,
            r: 0.9,
            pointwise_residual: res,
            lower: 1.0,
            upper: 1.0,
            flags: vec![],
        };
        let good = convergence_report(&z, 2, 1, 1.0, 0.25, vec![row(1, 0.5), row(2, 0.2), row(3, 0.1)]);
        assert!(good.success);
        let stalled = convergence_report(&z, 2, 1, 1.0, 0.25, vec![row(1, 0.5), row(2, 0.4), row(3, 0.35)]);
        assert!(!stalled.success && stalled.monotone);
        let csv = good.to_csv(&[]);
        assert!(csv.contains("# status = SUCCESS"));
        assert!(csv.contains(CONVERGENCE_CSV_HEADER));
    }
}
