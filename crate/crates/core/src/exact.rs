//! Exact arithmetic over quadratic extensions of the rationals and the
//! planar geometric predicates built on top of it.
//!
//! All values are immutable and all operations are pure functions. Two
//! radicand-homogeneous pipelines sit on this module: number theory in
//! `Q(√-D)` and plane geometry in `Q(√3)`. Mixing radicands is a hard error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;

/// Arbitrary-precision rational. `num-rational` maintains the invariants we
/// need: reduced form and positive denominator.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`, `d != 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("radicand mismatch: {0} vs {1}")]
    RadicandMismatch(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no real order for radicand {0} < 0")]
    NoRealOrder(i64),
    #[error("radicand {0} is not square-free")]
    NotSquareFree(i64),
}

/// Sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rat(r: &Rat) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

fn is_square_free(m: i64) -> bool {
    if m == 0 || m == 1 {
        return m == 1;
    }
    let mut n = m.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Exact element `x + y√m` of a quadratic extension of the rationals.
///
/// The radicand `m` is square-free and carried per value; arithmetic between
/// two values requires equal radicands. For `m < 0` the value is a complex
/// number with imaginary part `y·√|m|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    m: i64,
    x: Rat,
    y: Rat,
}

impl QuadExt {
    pub fn new(m: i64, x: Rat, y: Rat) -> Result<QuadExt, ExactError> {
        if !is_square_free(m) {
            return Err(ExactError::NotSquareFree(m));
        }
        Ok(QuadExt { m, x, y })
    }

    /// Purely rational value, tagged with radicand `m`.
    pub fn rational(m: i64, x: Rat) -> QuadExt {
        QuadExt::new(m, x, Rat::zero()).expect("square-free radicand")
    }

    pub fn from_parts(m: i64, x: Rat, y: Rat) -> QuadExt {
        QuadExt::new(m, x, y).expect("square-free radicand")
    }

    pub fn radicand(&self) -> i64 {
        self.m
    }

    pub fn rational_part(&self) -> &Rat {
        &self.x
    }

    pub fn radical_part(&self) -> &Rat {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    fn check_radicand(&self, rhs: &QuadExt) -> Result<(), ExactError> {
        if self.m != rhs.m {
            Err(ExactError::RadicandMismatch(self.m, rhs.m))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.check_radicand(rhs)?;
        Ok(QuadExt {
            m: self.m,
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
        })
    }

    pub fn try_sub(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.check_radicand(rhs)?;
        Ok(QuadExt {
            m: self.m,
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
        })
    }

    pub fn try_mul(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.check_radicand(rhs)?;
        let m = Rat::from_integer(BigInt::from(self.m));
        Ok(QuadExt {
            m: self.m,
            x: &self.x * &rhs.x + &self.y * &rhs.y * &m,
            y: &self.x * &rhs.y + &self.y * &rhs.x,
        })
    }

    /// Multiplicative inverse. Fails on zero.
    pub fn inv(&self) -> Result<QuadExt, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        // 1/(x+y√m) = (x-y√m)/(x²-my²); the norm is nonzero for m square-free.
        let n = self.norm_rat();
        debug_assert!(!n.is_zero());
        Ok(QuadExt {
            m: self.m,
            x: &self.x / &n,
            y: -(&self.y / &n),
        })
    }

    pub fn try_div(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        self.check_radicand(rhs)?;
        self.try_mul(&rhs.inv()?)
    }

    /// Conjugate `x - y√m`.
    pub fn conj(&self) -> QuadExt {
        QuadExt {
            m: self.m,
            x: self.x.clone(),
            y: -self.y.clone(),
        }
    }

    /// Field norm `x² - m·y²` as a rational.
    pub fn norm_rat(&self) -> Rat {
        let m = Rat::from_integer(BigInt::from(self.m));
        &self.x * &self.x - &self.y * &self.y * m
    }

    /// Field norm as a `QuadExt` with zero radical part.
    pub fn norm(&self) -> QuadExt {
        QuadExt::rational(self.m, self.norm_rat())
    }

    pub fn neg(&self) -> QuadExt {
        QuadExt {
            m: self.m,
            x: -self.x.clone(),
            y: -self.y.clone(),
        }
    }

    pub fn scale(&self, r: &Rat) -> QuadExt {
        QuadExt {
            m: self.m,
            x: &self.x * r,
            y: &self.y * r,
        }
    }

    /// Exact sign of the real number `x + y√m`, for `m > 0`, decided by
    /// rational arithmetic alone: case analysis on the signs of `x`, `y`
    /// and comparison of `x²` with `m·y²`.
    pub fn sign(&self) -> Result<Sign, ExactError> {
        if self.m < 0 {
            return Err(ExactError::NoRealOrder(self.m));
        }
        let sx = Sign::of_rat(&self.x);
        let sy = Sign::of_rat(&self.y);
        Ok(match (sx, sy) {
            (s, Sign::Zero) => s,
            (Sign::Zero, s) => s,
            (Sign::Positive, Sign::Positive) => Sign::Positive,
            (Sign::Negative, Sign::Negative) => Sign::Negative,
            (Sign::Positive, Sign::Negative) | (Sign::Negative, Sign::Positive) => {
                // x and y√m pull in opposite directions; compare squares.
                let m = Rat::from_integer(BigInt::from(self.m));
                let xx = &self.x * &self.x;
                let myy = &self.y * &self.y * m;
                match xx.cmp(&myy) {
                    std::cmp::Ordering::Greater => sx,
                    std::cmp::Ordering::Less => sy,
                    std::cmp::Ordering::Equal => Sign::Zero,
                }
            }
        })
    }

    /// `Im(x + y√m) > 0` for `m < 0` is just `y > 0`.
    pub fn imag_sign(&self) -> Result<Sign, ExactError> {
        if self.m >= 0 {
            return Err(ExactError::NoRealOrder(self.m));
        }
        Ok(Sign::of_rat(&self.y))
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            write!(f, "{}", self.x)
        } else if self.x.is_zero() {
            write!(f, "{}*sqrt({})", self.y, self.m)
        } else {
            write!(f, "{} + {}*sqrt({})", self.x, self.y, self.m)
        }
    }
}

macro_rules! qext_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                self.$checked(rhs)
                    .expect("quadratic extension arithmetic on mismatched radicands")
            }
        }
        impl std::ops::$trait for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
    };
}

qext_binop!(Add, add, try_add);
qext_binop!(Sub, sub, try_sub);
qext_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::neg(self)
    }
}

/// Cartesian point of the hexagon plane: both coordinates live in `Q(√3)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanePoint {
    pub px: QuadExt,
    pub py: QuadExt,
}

impl PlanePoint {
    pub fn new(px: QuadExt, py: QuadExt) -> PlanePoint {
        assert_eq!(px.radicand(), 3, "hexagon-plane coordinates use radicand 3");
        assert_eq!(py.radicand(), 3, "hexagon-plane coordinates use radicand 3");
        PlanePoint { px, py }
    }

    /// Point with rational x `a` and y equal to `b·√3`.
    pub fn from_rats(a: Rat, b_sqrt3: Rat) -> PlanePoint {
        PlanePoint {
            px: QuadExt::rational(3, a),
            py: QuadExt::from_parts(3, Rat::zero(), b_sqrt3),
        }
    }
}

/// A line given by two distinct points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLine {
    pub p0: PlanePoint,
    pub p1: PlanePoint,
}

impl ExactLine {
    pub fn new(p0: PlanePoint, p1: PlanePoint) -> ExactLine {
        assert_ne!(p0, p1, "a line needs two distinct points");
        ExactLine { p0, p1 }
    }
}

/// Exact sign of the determinant of `(b-a, c-a)`.
pub fn orient2d(a: &PlanePoint, b: &PlanePoint, c: &PlanePoint) -> Sign {
    let ux = &b.px - &a.px;
    let uy = &b.py - &a.py;
    let vx = &c.px - &a.px;
    let vy = &c.py - &a.py;
    let det = &(&ux * &vy) - &(&uy * &vx);
    det.sign().expect("radicand 3 is positive")
}

/// How a segment sits relative to a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    /// The open segment crosses the line: strict sign change at the endpoints.
    CrossesInterior,
    /// At least one endpoint lies on the line.
    TouchesEndpoint,
    /// Both endpoints strictly on the same side.
    Misses,
}

/// Classify a segment `s0..s1` against `line` via `orient2d` at both endpoints.
pub fn segment_crosses_line(line: &ExactLine, s0: &PlanePoint, s1: &PlanePoint) -> Crossing {
    assert_ne!(s0, s1, "degenerate segment");
    let o0 = orient2d(&line.p0, &line.p1, s0);
    let o1 = orient2d(&line.p0, &line.p1, s1);
    if o0 == Sign::Zero || o1 == Sign::Zero {
        Crossing::TouchesEndpoint
    } else if o0 != o1 {
        Crossing::CrossesInterior
    } else {
        Crossing::Misses
    }
}

/// 2×2 matrix over the two-element field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2Mat2 {
    /// Row-major entries in {0,1}.
    pub entries: [[u8; 2]; 2],
}

impl Gf2Mat2 {
    pub fn new(entries: [[u8; 2]; 2]) -> Gf2Mat2 {
        for row in &entries {
            for &e in row {
                assert!(e <= 1, "entries must be bits");
            }
        }
        Gf2Mat2 { entries }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Gf2Mat2 {
        Gf2Mat2 {
            entries: [
                [(a.rem_euclid(2)) as u8, (b.rem_euclid(2)) as u8],
                [(c.rem_euclid(2)) as u8, (d.rem_euclid(2)) as u8],
            ],
        }
    }

    fn columns(&self) -> [(u8, u8); 2] {
        [
            (self.entries[0][0], self.entries[1][0]),
            (self.entries[0][1], self.entries[1][1]),
        ]
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> u32 {
        self.column_space().len().trailing_zeros()
    }

    /// The column space as a sorted set of bit-vectors (always contains (0,0)).
    pub fn column_space(&self) -> Vec<(u8, u8)> {
        let [c0, c1] = self.columns();
        let mut space = vec![
            (0, 0),
            c0,
            c1,
            ((c0.0 ^ c1.0), (c0.1 ^ c1.1)),
        ];
        space.sort_unstable();
        space.dedup();
        space
    }

    pub fn contains_in_column_space(&self, v: (u8, u8)) -> bool {
        self.column_space().contains(&(v.0 & 1, v.1 & 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(m: i64, xn: i64, xd: i64, yn: i64, yd: i64) -> QuadExt {
        QuadExt::from_parts(m, rat(xn, xd), rat(yn, yd))
    }

    #[test]
    fn alpha_times_conjugate_is_degree() {
        // (1+√-7)/2 times its conjugate is 2.
        let alpha = q(-7, 1, 2, 1, 2);
        let prod = alpha.try_mul(&alpha.conj()).unwrap();
        assert_eq!(prod, QuadExt::rational(-7, rat_int(2)));
    }

    #[test]
    fn add_identity() {
        let u = q(-7, 3, 5, -2, 7);
        let zero = QuadExt::rational(-7, Rat::zero());
        assert_eq!(u.try_add(&zero).unwrap(), u);
    }

    #[test]
    fn alpha_squared_is_alpha_minus_two() {
        // ((1+√-7)/2)² = (-3+√-7)/2, i.e. α² = α - 2 from α²-α+2 = 0.
        let alpha = q(-7, 1, 2, 1, 2);
        let sq = alpha.try_mul(&alpha).unwrap();
        assert_eq!(sq, q(-7, -3, 2, 1, 2));
        let alpha_minus_2 = alpha.try_sub(&QuadExt::rational(-7, rat_int(2))).unwrap();
        assert_eq!(sq, alpha_minus_2);
    }

    #[test]
    fn radicand_mismatch_is_error() {
        let u = q(-7, 1, 1, 1, 1);
        let v = q(3, 1, 1, 1, 1);
        assert_eq!(
            u.try_add(&v).unwrap_err(),
            ExactError::RadicandMismatch(-7, 3)
        );
    }

    #[test]
    fn division_by_zero_is_error() {
        let u = q(3, 1, 1, 0, 1);
        let zero = QuadExt::rational(3, Rat::zero());
        assert_eq!(u.try_div(&zero).unwrap_err(), ExactError::DivisionByZero);
    }

    #[test]
    fn sign_examples() {
        // 1 - (1/2)√3 > 0 since 1² > 3·(1/4).
        assert_eq!(q(3, 1, 1, -1, 2).sign().unwrap(), Sign::Positive);
        // 0 + 0√3 = 0.
        assert_eq!(q(3, 0, 1, 0, 1).sign().unwrap(), Sign::Zero);
        // 2 - 2√3 < 0 since 4 < 12.
        assert_eq!(q(3, 2, 1, -2, 1).sign().unwrap(), Sign::Negative);
        // Negative radicand has no real order.
        assert_eq!(q(-7, 1, 1, 1, 1).sign().unwrap_err(), ExactError::NoRealOrder(-7));
    }

    fn pp(a: Rat, b: Rat) -> PlanePoint {
        PlanePoint::from_rats(a, b)
    }

    #[test]
    fn orient_examples() {
        // (0,0),(1,0),(0,√3) is counterclockwise.
        let a = pp(rat_int(0), rat_int(0));
        let b = pp(rat_int(1), rat_int(0));
        let c = pp(rat_int(0), rat_int(1));
        assert_eq!(orient2d(&a, &b, &c), Sign::Positive);
        // A collinear triple.
        let d = pp(rat_int(2), rat_int(0));
        assert_eq!(orient2d(&a, &b, &d), Sign::Zero);
        // (0,0),(1/4,-√3/4),(3/4,√3/4): det = √3/4 > 0.
        let e = pp(rat(1, 4), rat(-1, 4));
        let f = pp(rat(3, 4), rat(1, 4));
        assert_eq!(orient2d(&a, &e, &f), Sign::Positive);
    }

    #[test]
    fn segment_crossing_examples() {
        // Line through (0,0) and (11/4,-3√3/4); segment (-1/2,0)-(1/2,0)
        // crosses at the interior point (0,0).
        let line = ExactLine::new(pp(rat_int(0), rat_int(0)), pp(rat(11, 4), rat(-3, 4)));
        let s0 = pp(rat(-1, 2), rat_int(0));
        let s1 = pp(rat(1, 2), rat_int(0));
        assert_eq!(segment_crosses_line(&line, &s0, &s1), Crossing::CrossesInterior);

        // Parallel disjoint misses.
        let horiz = ExactLine::new(pp(rat_int(0), rat_int(0)), pp(rat_int(1), rat_int(0)));
        let t0 = pp(rat_int(0), rat_int(1));
        let t1 = pp(rat_int(1), rat_int(1));
        assert_eq!(segment_crosses_line(&horiz, &t0, &t1), Crossing::Misses);

        // Line through a segment endpoint only.
        let diag = ExactLine::new(pp(rat_int(0), rat_int(0)), pp(rat_int(1), rat_int(1)));
        let u0 = pp(rat_int(1), rat_int(1));
        let u1 = pp(rat_int(2), rat_int(1));
        assert_eq!(segment_crosses_line(&diag, &u0, &u1), Crossing::TouchesEndpoint);
    }

    #[test]
    fn gf2_examples() {
        let m = Gf2Mat2::new([[1, 0], [1, 0]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.column_space(), vec![(0, 0), (1, 1)]);

        assert_eq!(Gf2Mat2::new([[0, 0], [0, 0]]).rank(), 0);
        assert_eq!(Gf2Mat2::new([[0, 1], [1, 0]]).rank(), 2);
    }

    /// Rational approximation of √m to within `eps`, by Newton iteration.
    fn sqrt_approx(m: i64, eps: &Rat) -> Rat {
        let m_rat = rat_int(m);
        let mut x = rat_int(m.max(1));
        loop {
            let next = (&x + &m_rat / &x) / rat_int(2);
            let diff = (&next - &x).abs();
            x = next;
            if &diff < eps {
                return x;
            }
        }
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-1000i64..1000, 1i64..60).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_qext3() -> impl Strategy<Value = QuadExt> {
        (arb_rat(), arb_rat()).prop_map(|(x, y)| QuadExt::from_parts(3, x, y))
    }

    fn arb_qext_m7() -> impl Strategy<Value = QuadExt> {
        (arb_rat(), arb_rat()).prop_map(|(x, y)| QuadExt::from_parts(-7, x, y))
    }

    proptest! {
        #[test]
        fn field_axioms(u in arb_qext_m7(), v in arb_qext_m7(), w in arb_qext_m7()) {
            let uv_w = u.try_mul(&v).unwrap().try_mul(&w).unwrap();
            let u_vw = u.try_mul(&v.try_mul(&w).unwrap()).unwrap();
            prop_assert_eq!(uv_w, u_vw);

            let dist_l = u.try_mul(&v.try_add(&w).unwrap()).unwrap();
            let dist_r = u.try_mul(&v).unwrap().try_add(&u.try_mul(&w).unwrap()).unwrap();
            prop_assert_eq!(dist_l, dist_r);

            if !u.is_zero() {
                let one = u.try_mul(&u.inv().unwrap()).unwrap();
                prop_assert_eq!(one, QuadExt::rational(-7, rat_int(1)));
            }
        }

        #[test]
        fn norm_is_self_times_conjugate(u in arb_qext3()) {
            let n = u.norm();
            let prod = u.try_mul(&u.conj()).unwrap();
            prop_assert_eq!(n, prod);
        }

        #[test]
        fn sign_matches_high_precision_float(u in arb_qext3()) {
            // Sanity oracle: rational approximation of √3 to ~1e-40, which is
            // far beyond 80 bits of precision.
            let eps = Rat::new(BigInt::from(1), BigInt::from(10u8).pow(40));
            let s3 = sqrt_approx(3, &eps);
            let approx = u.rational_part() + u.radical_part() * &s3;
            let slack = &eps * (rat_int(1) + u.radical_part().abs());
            // Only decide when the approximation is conclusive.
            if approx.abs() > slack {
                let expected = Sign::of_rat(&approx);
                prop_assert_eq!(u.sign().unwrap(), expected);
            }
        }

        #[test]
        fn sign_order_compatible(u in arb_qext3(), v in arb_qext3(), w in arb_qext3()) {
            // u ≤ v implies u + w ≤ v + w, and multiplying by a positive
            // value preserves order.
            let d = v.try_sub(&u).unwrap();
            let ds = d.sign().unwrap();
            let d2 = v.try_add(&w).unwrap().try_sub(&u.try_add(&w).unwrap()).unwrap();
            prop_assert_eq!(d2.sign().unwrap(), ds);
            if w.sign().unwrap() == Sign::Positive {
                let prod = d.try_mul(&w).unwrap();
                prop_assert_eq!(prod.sign().unwrap(), ds);
            }
        }

        #[test]
        fn orient_antisymmetry_and_translation(
            ax in arb_rat(), ay in arb_rat(),
            bx in arb_rat(), by in arb_rat(),
            cx in arb_rat(), cy in arb_rat(),
            tx in arb_rat(), ty in arb_rat(),
        ) {
            let a = pp(ax, ay);
            let b = pp(bx, by);
            let c = pp(cx, cy);
            prop_assert_eq!(orient2d(&a, &b, &c), orient2d(&a, &c, &b).flip());

            let shift = |p: &PlanePoint| PlanePoint {
                px: &p.px + &QuadExt::rational(3, tx.clone()),
                py: &p.py + &QuadExt::from_parts(3, Rat::zero(), ty.clone()),
            };
            prop_assert_eq!(
                orient2d(&shift(&a), &shift(&b), &shift(&c)),
                orient2d(&a, &b, &c)
            );
        }
    }
}
