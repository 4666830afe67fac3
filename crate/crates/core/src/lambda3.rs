//! Exterior algebra of ℝ³ at the level of a single fiber.
//!
//! A [`Multivector`] stores the 8 coefficients of Λ(ℝ³) = Λ⁰ ⊕ Λ¹ ⊕ Λ² ⊕ Λ³
//! along the basis blades `e_S`, `S ⊆ {1,2,3}`, in the canonical order
//!
//! ```text
//! index:  0   1    2    3    4     5     6     7
//! blade:  ∅  {1}  {2}  {3}  {1,2} {1,3} {2,3} {1,2,3}
//! ```
//!
//! Internally a blade is a bitmask (bit `j-1` set iff `j ∈ S`). Every sign in
//! this module is derived from the wedge product of basis blades; the interior
//! product is the adjoint of `a ∧ ·` for the Euclidean inner product on the
//! coefficients, i.e. `⟨a ∧ u, v⟩ = ⟨u, a ⌟ v⟩`.
//!
//! Coefficients are generic over [`Coeff`] so the same kernels serve real
//! physical samples (`f64`) and Fourier coefficients (`Complex64`).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{MhdError, Result};

/// Bitmask of each canonical basis index.
pub const BLADES: [u8; 8] = [0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111];

/// Canonical index of each bitmask; inverse of [`BLADES`].
const INDEX_OF: [usize; 8] = [0, 1, 2, 4, 3, 5, 6, 7];

/// Canonical index of the blade with the given bitmask.
pub const fn blade_index(bits: u8) -> usize {
    INDEX_OF[(bits & 0b111) as usize]
}

/// Grade of the blade at canonical index `i`.
pub const fn blade_grade(i: usize) -> u8 {
    BLADES[i].count_ones() as u8
}

/// Sign of `e_S ∧ e_T` relative to `e_{S∪T}`, or 0 when `S ∩ T ≠ ∅`.
const fn wedge_sign(s: u8, t: u8) -> i8 {
    if s & t != 0 {
        return 0;
    }
    // Count pairs (i ∈ S, j ∈ T) with i > j: transpositions needed to sort.
    let mut swaps = 0;
    let mut i = 0;
    while i < 3 {
        if s & (1 << i) != 0 {
            let lower = t & ((1 << i) - 1);
            swaps += lower.count_ones();
        }
        i += 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `e_i ⌟ e_T` relative to `e_{T∖{i}}` for the 1-blade `i`, or 0 if `i ∉ T`.
///
/// Forced by the adjunction: `⟨e_i ∧ e_{T∖i}, e_T⟩ = wedge_sign(i, T∖i)`.
const fn interior_sign(i: u8, t: u8) -> i8 {
    if t & i == 0 {
        0
    } else {
        wedge_sign(i, t & !i)
    }
}

/// Scalar types usable as multivector coefficients.
pub trait Coeff:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + PartialEq
    + fmt::Debug
{
    fn zero() -> Self;
    fn norm_sqr(self) -> f64;
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
}

/// Grade `ℓ ∈ {0,1,2,3}` of a homogeneous multivector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grade(u8);

impl Grade {
    pub const SCALAR: Grade = Grade(0);
    pub const ONE: Grade = Grade(1);
    pub const TWO: Grade = Grade(2);
    pub const VOLUME: Grade = Grade(3);

    pub fn new(value: u8) -> Result<Self> {
        if value <= 3 {
            Ok(Grade(value))
        } else {
            Err(MhdError::InvalidGrade(value as i32))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Hodge dual grade `3 - ℓ`.
    pub fn dual(self) -> Grade {
        Grade(3 - self.0)
    }

    /// Canonical indices of the blades of this grade.
    pub fn blades(self) -> impl Iterator<Item = usize> {
        (0..8).filter(move |&i| blade_grade(i) == self.0)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Set of grades, one bit per grade.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct GradeMask(u8);

impl GradeMask {
    pub const EMPTY: GradeMask = GradeMask(0);
    pub const ALL: GradeMask = GradeMask(0b1111);

    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits <= 0b1111 {
            Ok(GradeMask(bits))
        } else {
            Err(MhdError::InvalidGrade(bits as i32))
        }
    }

    pub fn single(grade: Grade) -> Self {
        GradeMask(1 << grade.0)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, grade: Grade) -> bool {
        self.0 & (1 << grade.0) != 0
    }

    pub fn contains_blade(self, index: usize) -> bool {
        self.0 & (1 << blade_grade(index)) != 0
    }

    pub fn union(self, other: GradeMask) -> GradeMask {
        GradeMask(self.0 | other.0)
    }

    /// The mask after an operator that raises every grade by one (grade 3 drops out).
    pub fn raised(self) -> GradeMask {
        GradeMask((self.0 << 1) & 0b1111)
    }

    /// The mask after an operator that lowers every grade by one (grade 0 drops out).
    pub fn lowered(self) -> GradeMask {
        GradeMask(self.0 >> 1)
    }

    /// The mask after the Hodge star (`ℓ ↦ 3 - ℓ`).
    pub fn dual(self) -> GradeMask {
        let mut out = 0;
        for g in 0..4 {
            if self.0 & (1 << g) != 0 {
                out |= 1 << (3 - g);
            }
        }
        GradeMask(out)
    }

    /// The only grade in the mask, if there is exactly one.
    pub fn single_grade(self) -> Option<Grade> {
        if self.0.count_ones() == 1 {
            Some(Grade(self.0.trailing_zeros() as u8))
        } else {
            None
        }
    }

    pub fn grades(self) -> impl Iterator<Item = Grade> {
        (0..4u8).filter(move |g| self.0 & (1 << g) != 0).map(Grade)
    }
}

impl From<Grade> for GradeMask {
    fn from(g: Grade) -> Self {
        GradeMask::single(g)
    }
}

/// Element of Λ(ℝ³) with coefficients in canonical blade order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multivector<T = f64> {
    pub coeffs: [T; 8],
}

impl<T: Coeff> Default for Multivector<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coeff> Multivector<T> {
    pub fn zero() -> Self {
        Multivector {
            coeffs: [T::zero(); 8],
        }
    }

    pub fn new(coeffs: [T; 8]) -> Self {
        Multivector { coeffs }
    }

    /// `value · e_S` for the blade with canonical index `index`.
    pub fn basis(index: usize, value: T) -> Self {
        let mut m = Self::zero();
        m.coeffs[index] = value;
        m
    }

    pub fn scalar(value: T) -> Self {
        Self::basis(0, value)
    }

    /// The 1-vector `v₁e₁ + v₂e₂ + v₃e₃`.
    pub fn vector(v: [T; 3]) -> Self {
        let mut m = Self::zero();
        m.coeffs[1..4].copy_from_slice(&v);
        m
    }

    /// Coefficients of the grade-1 part.
    pub fn vector_part(&self) -> [T; 3] {
        [self.coeffs[1], self.coeffs[2], self.coeffs[3]]
    }

    /// Projection onto Λ^ℓ.
    pub fn grade_part(&self, grade: Grade) -> Self {
        let mut m = Self::zero();
        for i in grade.blades() {
            m.coeffs[i] = self.coeffs[i];
        }
        m
    }

    /// Grades carrying at least one nonzero coefficient.
    pub fn support(&self) -> GradeMask {
        let mut bits = 0;
        for i in 0..8 {
            if self.coeffs[i] != T::zero() {
                bits |= 1 << blade_grade(i);
            }
        }
        GradeMask(bits)
    }

    pub fn is_pure(&self, grade: Grade) -> bool {
        (0..8).all(|i| blade_grade(i) == grade.0 || self.coeffs[i] == T::zero())
    }

    pub fn scale(&self, s: f64) -> Self {
        Multivector {
            coeffs: self.coeffs.map(|c| c * s),
        }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Exterior product `self ∧ other`.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..8 {
            let a = self.coeffs[i];
            if a == T::zero() {
                continue;
            }
            for j in 0..8 {
                let sign = wedge_sign(BLADES[i], BLADES[j]);
                if sign == 0 {
                    continue;
                }
                let k = blade_index(BLADES[i] | BLADES[j]);
                out.coeffs[k] += (a * other.coeffs[j]) * sign as f64;
            }
        }
        out
    }

    /// Interior product `a ⌟ self` for a 1-vector given by its components.
    ///
    /// This is the unchecked kernel behind [`interior`]; `a` is implicitly pure grade 1.
    pub fn interior_by(&self, a: [T; 3]) -> Self {
        let mut out = Self::zero();
        for (axis, &ai) in a.iter().enumerate() {
            let bit = 1u8 << axis;
            for t in 0..8 {
                let sign = interior_sign(bit, BLADES[t]);
                if sign == 0 {
                    continue;
                }
                let k = blade_index(BLADES[t] & !bit);
                out.coeffs[k] += (ai * self.coeffs[t]) * sign as f64;
            }
        }
        out
    }

    /// Left wedge by a 1-vector, `a ∧ self`.
    pub fn wedge_by(&self, a: [T; 3]) -> Self {
        let mut out = Self::zero();
        for (axis, &ai) in a.iter().enumerate() {
            let bit = 1u8 << axis;
            for t in 0..8 {
                let sign = wedge_sign(bit, BLADES[t]);
                if sign == 0 {
                    continue;
                }
                let k = blade_index(BLADES[t] | bit);
                out.coeffs[k] += (ai * self.coeffs[t]) * sign as f64;
            }
        }
        out
    }

    /// Hodge star, `Λ^ℓ → Λ^{3-ℓ}`, fixed by `u ∧ ⋆v = ⟨u, v⟩ e₁₂₃`.
    pub fn hodge_star(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..8 {
            let comp = 0b111 & !BLADES[i];
            let sign = wedge_sign(BLADES[i], comp);
            out.coeffs[blade_index(comp)] = self.coeffs[i] * sign as f64;
        }
        out
    }
}

impl Multivector<f64> {
    /// Euclidean inner product on the coefficients (orthonormal `e_S`).
    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl<T: Coeff> Add for Multivector<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..8 {
            self.coeffs[i] += rhs.coeffs[i];
        }
        self
    }
}

impl<T: Coeff> Sub for Multivector<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..8 {
            self.coeffs[i] = self.coeffs[i] - rhs.coeffs[i];
        }
        self
    }
}

impl<T: Coeff> Neg for Multivector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Multivector {
            coeffs: self.coeffs.map(|c| -c),
        }
    }
}

/// `a ∧ b`.
pub fn wedge<T: Coeff>(a: &Multivector<T>, b: &Multivector<T>) -> Multivector<T> {
    a.wedge(b)
}

/// `a ⌟ u`; `a` must be a pure 1-vector.
pub fn interior<T: Coeff>(a: &Multivector<T>, u: &Multivector<T>) -> Result<Multivector<T>> {
    if !a.is_pure(Grade::ONE) {
        return Err(MhdError::GradeMismatch {
            expected: "pure grade 1 left operand".into(),
            found: format!("support {:04b}", a.support().bits()),
        });
    }
    Ok(u.interior_by(a.vector_part()))
}

/// `⋆u`.
pub fn hodge_star<T: Coeff>(u: &Multivector<T>) -> Multivector<T> {
    u.hodge_star()
}

/// Classical proxy of a homogeneous form in ℝ³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Proxy {
    Scalar(f64),
    Vector([f64; 3]),
}

/// Translate a classical scalar or vector into a form of the given grade.
///
/// * scalar ↔ 0-form `s e_∅` or 3-form density `s e₁₂₃`;
/// * vector ↔ 1-form `v₁e₁ + v₂e₂ + v₃e₃` or 2-form `v₁e₂₃ − v₂e₁₃ + v₃e₁₂ = ⋆v`.
///
/// The 2-form convention makes `d` of a 1-form correspond to `curl`.
pub fn translate_vec_to_form(proxy: Proxy, grade: Grade) -> Result<Multivector> {
    match (proxy, grade.value()) {
        (Proxy::Scalar(s), 0) => Ok(Multivector::basis(0, s)),
        (Proxy::Scalar(s), 3) => Ok(Multivector::basis(7, s)),
        (Proxy::Vector(v), 1) => Ok(Multivector::vector(v)),
        (Proxy::Vector(v), 2) => Ok(Multivector::vector(v).hodge_star()),
        _ => Err(MhdError::GradeMismatch {
            expected: match proxy {
                Proxy::Scalar(_) => "grade 0 or 3 for a scalar".into(),
                Proxy::Vector(_) => "grade 1 or 2 for a vector".into(),
            },
            found: format!("grade {grade}"),
        }),
    }
}

/// Inverse of [`translate_vec_to_form`]; the form must be pure of the given grade.
pub fn translate_form_to_vec(form: &Multivector, grade: Grade) -> Result<Proxy> {
    if !form.is_pure(grade) {
        return Err(MhdError::GradeMismatch {
            expected: format!("pure grade {grade}"),
            found: format!("support {:04b}", form.support().bits()),
        });
    }
    Ok(match grade.value() {
        0 => Proxy::Scalar(form.coeffs[0]),
        3 => Proxy::Scalar(form.coeffs[7]),
        1 => Proxy::Vector(form.vector_part()),
        _ => Proxy::Vector(form.hodge_star().vector_part()),
    })
}

/// Vector proxy of a 1- or 2-form, generic over the coefficient type.
pub fn vector_proxy<T: Coeff>(form: &Multivector<T>, grade: Grade) -> [T; 3] {
    match grade.value() {
        2 => form.hodge_star().vector_part(),
        _ => form.vector_part(),
    }
}

/// 2-form with the given vector proxy, generic over the coefficient type.
pub fn two_form<T: Coeff>(v: [T; 3]) -> Multivector<T> {
    Multivector::vector(v).hodge_star()
}
