//! Two-sided brackets for `‖φ‖_{M_d}`.

use std::fmt::Write as _;

use crate::group::{Ball, Element};
use crate::schur::{schur_norm, SchurProblem};

use super::{Multiplier, MultiplierError};

pub const BRACKET_CSV_HEADER: &str = "phi_id,d,F_radius,lower,upper,lower_provenance,upper_provenance,flags";

/// Schur-norm lower bound from one Gram truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct M2Lower {
    /// Certified dual value; never above the true Schur norm.
    pub lower: f64,
    /// Primal value of the solver (within the tolerance of `lower` when converged).
    pub sdp_upper: f64,
    pub size: usize,
    pub converged: bool,
    pub iterations: usize,
}

/// `‖φ‖_{M_d} ≥ ‖φ‖_{M_2} ≥ ‖[φ(s_i⁻¹s_j)]‖_Schur` for every finite `F`.
pub fn m2_lower_bound(phi: &Multiplier, elements: &[Element], tol: f64) -> Result<M2Lower, MultiplierError> {
    let gram = phi.gram_matrix(elements)?;
    let sol = schur_norm(&SchurProblem::new(gram).with_tol(tol))?;
    Ok(M2Lower {
        lower: sol.lower,
        sdp_upper: sol.upper,
        size: elements.len(),
        converged: sol.converged,
        iterations: sol.iterations,
    })
}

/// `sup_{t∈B} |φ(t)|`, a lower bound for every multiplier norm.
pub fn sup_on_ball(phi: &Multiplier, ball: &Ball) -> Result<f64, MultiplierError> {
    ball.elements().iter().try_fold(0.0f64, |acc, t| Ok(acc.max(phi.eval(t)?.norm())))
}

/// Certified `lower ≤ ‖φ‖_{M_d} ≤ upper` with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct NormBracket {
    pub phi_id: String,
    pub d: usize,
    pub f_radius: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_provenance: String,
    pub upper_provenance: String,
    pub flags: Vec<String>,
}

impl NormBracket {
    pub fn new(phi_id: impl Into<String>, d: usize, f_radius: usize) -> Self {
        NormBracket {
            phi_id: phi_id.into(),
            d,
            f_radius,
            lower: 0.0,
            upper: f64::INFINITY,
            lower_provenance: "none".into(),
            upper_provenance: "none".into(),
            flags: Vec::new(),
        }
    }

    pub fn with_lower(mut self, value: f64, provenance: impl Into<String>) -> Self {
        self.lower = value;
        self.lower_provenance = provenance.into();
        self
    }

    pub fn with_upper(mut self, value: f64, provenance: impl Into<String>) -> Self {
        self.upper = value;
        self.upper_provenance = provenance.into();
        self
    }

    pub fn flag(&mut self, f: impl Into<String>) {
        let f = f.into();
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Flags (and reports) a bracket whose lower end exceeds its upper end.
    pub fn check_soundness(&mut self, tol: f64) -> Result<(), MultiplierError> {
        if self.lower > self.upper + tol {
            self.flag("UNSOUND");
            return Err(MultiplierError::Certificate(format!(
                "bracket for {} is inverted: lower {} > upper {}",
                self.phi_id, self.lower, self.upper
            )));
        }
        Ok(())
    }

    /// A row matching [`BRACKET_CSV_HEADER`]; flags are `;`-separated.
    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let flags = if self.flags.is_empty() { "certified".to_string() } else { self.flags.join(";") };
        write!(
            s,
            "{},{},{},{:.12e},{:.12e},{},{},{}",
            csv_field(&self.phi_id),
            self.d,
            self.f_radius,
            self.lower,
            self.upper,
            csv_field(&self.lower_provenance),
            csv_field(&self.upper_provenance),
            csv_field(&flags)
        )
        .expect("writing to a String");
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
