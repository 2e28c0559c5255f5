use super::{Element, Group, GroupError, Mat2};

/// Normal subgroup Γ = ℤ² inside SL(2,ℤ)⋉ℤ² with quotient SL(2,ℤ).
///
/// The section is σ(A) = (A, 0); it is a homomorphism, so lifted sets carry
/// the quotient's Gram matrices verbatim.
#[derive(Clone, Debug)]
pub struct QuotientStructure {
    quotient: Group,
    kernel: Group,
}

impl QuotientStructure {
    pub(super) fn new() -> Self {
        QuotientStructure { quotient: Group::sl2z(), kernel: Group::zn(2) }
    }

    /// The quotient group G/Γ.
    pub fn quotient_group(&self) -> &Group {
        &self.quotient
    }

    /// Γ as an abstract ℤ² realization.
    pub fn kernel_group(&self) -> &Group {
        &self.kernel
    }

    fn parts(t: &Element) -> Result<(Mat2, [i64; 2]), GroupError> {
        match t {
            Element::Affine(m, v) if m.is_special() => Ok((*m, *v)),
            other => Err(GroupError::ForeignElement(other.to_string())),
        }
    }

    /// Quotient map q(A, v) = A.
    pub fn q(&self, t: &Element) -> Result<Element, GroupError> {
        Ok(Element::Matrix(Self::parts(t)?.0))
    }

    /// Section σ(A) = (A, 0).
    pub fn lift(&self, x: &Element) -> Result<Element, GroupError> {
        match x {
            Element::Matrix(m) if m.is_special() => Ok(Element::Affine(*m, [0, 0])),
            other => Err(GroupError::ForeignElement(other.to_string())),
        }
    }

    pub fn in_kernel(&self, t: &Element) -> Result<bool, GroupError> {
        Ok(Self::parts(t)?.0 == Mat2::IDENTITY)
    }

    /// Inclusion ℤ² → G, w ↦ (I, w).
    pub fn embed_kernel(&self, h: &Element) -> Result<Element, GroupError> {
        match h {
            Element::Vector(w) if w.len() == 2 => Ok(Element::Affine(Mat2::IDENTITY, [w[0], w[1]])),
            other => Err(GroupError::ForeignElement(other.to_string())),
        }
    }

    /// Γ-coordinates of a kernel element (I, w) ↦ w.
    pub fn kernel_coordinates(&self, t: &Element) -> Result<Element, GroupError> {
        match Self::parts(t)? {
            (m, w) if m == Mat2::IDENTITY => Ok(Element::Vector(w.to_vec())),
            _ => Err(GroupError::ForeignElement(t.to_string())),
        }
    }

    /// Returns `(q(t), σ(q(t))⁻¹·t)`; for t = (A, v) the second part is (I, A⁻¹v).
    pub fn split(&self, t: &Element) -> Result<(Element, Element), GroupError> {
        let (m, v) = Self::parts(t)?;
        let w = m.sl_inverse()?.apply(&v)?;
        Ok((Element::Matrix(m), Element::Affine(Mat2::IDENTITY, w)))
    }
}
