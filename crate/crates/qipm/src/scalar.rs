//! Real-scalar abstraction over the two arithmetic backends.
//!
//! Every numeric routine in this crate is generic over [`Scalar`], so the
//! same code runs in hardware `f64` and in software extended precision.
//! The extended backend ([`Extended`]) keeps 352 fraction bits (about 106
//! decimal digits), enough to drive the barrier parameter below literal
//! `2^(-2L)` thresholds and to solve augmented systems to `2^(-4L)` for
//! instances whose binary length `L` is a few tens.
//!
//! Design constraints the trait encodes:
//! - thresholds of the form `2^e` must be representable exactly
//!   ([`Scalar::exp2i`]), otherwise stop rules drift between backends;
//! - conversion to `f64` is always available because run diagnostics
//!   (traces, ledgers, reports) are stored in `f64` regardless of the
//!   working precision;
//! - only field operations, comparison, `abs` and `sqrt` are required,
//!   which keeps software backends honest (no hidden transcendental
//!   dependencies in solver code).

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use dashu_base::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

/// Arithmetic contract required by all solver code.
pub trait Scalar:
    Sized
    + Clone
    + Debug
    + Display
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Short backend name used in reports ("f64", "extended").
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Square root; caller guarantees a nonnegative argument.
    fn sqrt(&self) -> Self;

    /// Exact power of two, valid for positive and negative exponents.
    fn exp2i(e: i64) -> Self;

    /// Unit roundoff of the backend (relative spacing at 1.0).
    fn epsilon() -> Self;

    fn is_finite(&self) -> bool;

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    /// Integer power by repeated squaring.
    fn powi(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc *= base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn max_with(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn min_with(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp2i(e: i64) -> Self {
        f64::exp2(e as f64)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Working precision of the extended backend, in fraction bits.
///
/// 352 bits is about 106 decimal digits. Binary arithmetic with round to
/// even keeps powers of two exact.
pub const EXTENDED_BITS: usize = 352;

type Wide = FBig<HalfEven, 2>;

/// Extended-precision scalar backed by a 352-bit binary float.
///
/// Every constructor normalizes to [`EXTENDED_BITS`] because the
/// underlying arithmetic carries the maximum precision of its operands;
/// admitting a low-precision value would silently truncate everything
/// downstream of it.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Extended(Wide);

impl Extended {
    fn widen(v: Wide) -> Self {
        Extended(v.with_precision(EXTENDED_BITS).value())
    }
}

impl Display for Extended {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Decimal rendering at f64 fidelity; full digits are never needed
        // for display purposes.
        write!(f, "{}", self.to_f64())
    }
}

macro_rules! ext_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait for Extended {
            type Output = Extended;
            fn $method(self, rhs: Extended) -> Extended {
                Extended($trait::$method(self.0, rhs.0))
            }
        }
        impl $assign_trait for Extended {
            fn $assign_method(&mut self, rhs: Extended) {
                let lhs = std::mem::replace(&mut self.0, Wide::ZERO);
                self.0 = $trait::$method(lhs, rhs.0);
            }
        }
    };
}

ext_binop!(Add, add, AddAssign, add_assign);
ext_binop!(Sub, sub, SubAssign, sub_assign);
ext_binop!(Mul, mul, MulAssign, mul_assign);
ext_binop!(Div, div, DivAssign, div_assign);

impl Neg for Extended {
    type Output = Extended;
    fn neg(self) -> Extended {
        Extended(-self.0)
    }
}

impl Scalar for Extended {
    const NAME: &'static str = "extended";

    fn zero() -> Self {
        Extended::widen(Wide::ZERO)
    }

    fn one() -> Self {
        Extended::widen(Wide::ONE)
    }

    fn from_f64(v: f64) -> Self {
        let w = Wide::try_from(v).expect("finite value required for extended scalar");
        Extended::widen(w)
    }

    fn from_i64(v: i64) -> Self {
        Extended::widen(Wide::from(v))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn abs(&self) -> Self {
        if self.0.sign() == dashu_base::Sign::Negative {
            Extended(-self.0.clone())
        } else {
            self.clone()
        }
    }

    fn sqrt(&self) -> Self {
        Extended(self.0.sqrt())
    }

    fn exp2i(e: i64) -> Self {
        Extended::widen(Wide::from_parts(1.into(), e as isize))
    }

    fn epsilon() -> Self {
        Self::exp2i(-(EXTENDED_BITS as i64))
    }

    fn is_finite(&self) -> bool {
        true
    }
}
