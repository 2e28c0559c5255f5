use std::fmt;

use super::GroupError;

/// Integer 2×2 matrix `[[a, b], [c, d]]` with checked arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

fn overflow() -> GroupError {
    GroupError::Overflow
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    /// `T = [[1,1],[0,1]]`.
    pub const fn translation() -> Self {
        Mat2::new(1, 1, 0, 1)
    }

    /// `S = [[0,-1],[1,0]]`.
    pub const fn rotation() -> Self {
        Mat2::new(0, -1, 1, 0)
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Option<i64> {
        self.a.checked_mul(self.d)?.checked_sub(self.b.checked_mul(self.c)?)
    }

    pub fn is_special(&self) -> bool {
        self.det() == Some(1)
    }

    pub fn checked_mul(&self, o: &Mat2) -> Result<Mat2, GroupError> {
        let dot = |x: i64, y: i64, u: i64, v: i64| -> Result<i64, GroupError> {
            x.checked_mul(y).and_then(|p| u.checked_mul(v).and_then(|q| p.checked_add(q))).ok_or_else(overflow)
        };
        Ok(Mat2 {
            a: dot(self.a, o.a, self.b, o.c)?,
            b: dot(self.a, o.b, self.b, o.d)?,
            c: dot(self.c, o.a, self.d, o.c)?,
            d: dot(self.c, o.b, self.d, o.d)?,
        })
    }

    /// Inverse of a determinant-one matrix.
    pub fn sl_inverse(&self) -> Result<Mat2, GroupError> {
        Ok(Mat2 {
            a: self.d,
            b: self.b.checked_neg().ok_or_else(overflow)?,
            c: self.c.checked_neg().ok_or_else(overflow)?,
            d: self.a,
        })
    }

    pub fn apply(&self, v: &[i64; 2]) -> Result<[i64; 2], GroupError> {
        let row = |x: i64, y: i64| -> Result<i64, GroupError> {
            x.checked_mul(v[0]).and_then(|p| y.checked_mul(v[1]).and_then(|q| p.checked_add(q))).ok_or_else(overflow)
        };
        Ok([row(self.a, self.b)?, row(self.c, self.d)?])
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}
