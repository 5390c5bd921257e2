//! Values paired with rigorous absolute error bounds.

use num_complex::Complex64;

/// A computed value together with an absolute error bound: the true
/// mathematical quantity lies within `err` of `value`.
///
/// Error bounds are accumulated conservatively (rounded upward), never as
/// statistical estimates, so inequalities asserted against them are sound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certified<T> {
    pub value: T,
    pub err: f64,
}

pub type CertifiedSum = Certified<Complex64>;
pub type CertifiedReal = Certified<f64>;

impl<T> Certified<T> {
    pub fn new(value: T, err: f64) -> Self {
        debug_assert!(err >= 0.0 && err.is_finite());
        Certified { value, err }
    }

    pub fn exact(value: T) -> Self {
        Certified { value, err: 0.0 }
    }
}

/// a + b rounded so the result never undershoots the true sum.
#[inline]
pub(crate) fn err_add(a: f64, b: f64) -> f64 {
    (a + b).next_up()
}

impl Certified<Complex64> {
    pub fn zero() -> Self {
        Certified {
            value: Complex64::new(0.0, 0.0),
            err: 0.0,
        }
    }

    /// Sum of two certified values; the fresh rounding of the addition is
    /// charged to the bound.
    pub fn add(&self, o: &Self) -> Self {
        let value = self.value + o.value;
        let err = err_add(
            err_add(self.err, o.err),
            f64::EPSILON * (value.re.abs() + value.im.abs()),
        );
        Certified { value, err }
    }

    pub fn conj(&self) -> Self {
        Certified {
            value: self.value.conj(),
            err: self.err,
        }
    }
}

impl Certified<f64> {
    pub fn zero() -> Self {
        Certified {
            value: 0.0,
            err: 0.0,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let value = self.value + o.value;
        let err = err_add(err_add(self.err, o.err), f64::EPSILON * value.abs());
        Certified { value, err }
    }

    /// Embed a certified real as a certified complex value.
    pub fn as_complex(&self) -> Certified<Complex64> {
        Certified {
            value: Complex64::new(self.value, 0.0),
            err: self.err,
        }
    }
}
