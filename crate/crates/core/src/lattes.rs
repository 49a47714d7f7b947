//! Multiplier matrices, lattice parameters, coset representatives, and
//! enumeration of rigid Lattès map data by degree.
//!
//! Points of the lattice `Λ = Z + Zτ` are written as integer pairs `(x, y)`
//! meaning `x + yτ` throughout.

use crate::exact::{rat, rat_int, ExactError, Gf2Mat2, QuadExt, Rat, Sign};
use num_bigint::BigInt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LattesError {
    #[error("matrix must have c > 0, got c = {0}")]
    NonPositiveC(i64),
    #[error("discriminant {0} is not negative")]
    NonNegativeDiscriminant(i64),
    #[error("matrix {0:?} fails the normalization inequalities")]
    NotNormalized((i64, i64, i64, i64)),
    #[error("lattice parameter outside the reduced region: {0}")]
    InvalidTau(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Integer matrix of multiplication by `α` on the ordered basis `(1, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiplierMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl MultiplierMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> MultiplierMatrix {
        MultiplierMatrix { a, b, c, d }
    }

    pub fn scalar(n: i64) -> MultiplierMatrix {
        MultiplierMatrix::new(n, 0, 0, n)
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    /// `ad - bc`, the degree of the corresponding map.
    pub fn degree(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn discriminant(&self) -> i64 {
        (self.a - self.d) * (self.a - self.d) + 4 * self.b * self.c
    }

    /// The four reduction inequalities that pin `τ` to the standard reduced
    /// region and `α` to the closed upper-right quadrant:
    /// `c > 0`; `a ≥ -c/2`; `max{a-c+1, -a} ≤ d ≤ a+c`; `b ≤ -c`, and if
    /// `b = -c` then `d ≥ a`.
    pub fn is_normalized(&self) -> bool {
        let MultiplierMatrix { a, b, c, d } = *self;
        if c <= 0 {
            return false;
        }
        if 2 * a < -c {
            return false;
        }
        let lo = (a - c + 1).max(-a);
        if d < lo || d > a + c {
            return false;
        }
        if b > -c {
            return false;
        }
        if b == -c && d < a {
            return false;
        }
        true
    }

    /// The lattice parameter `τ` (root of `cτ² + (a-d)τ - b` with positive
    /// imaginary part) and `α = a + cτ`, both exact with square-free radicand.
    pub fn tau_and_alpha(&self) -> Result<(TauValue, QuadExt), LattesError> {
        let MultiplierMatrix { a, b: _, c, d } = *self;
        if c <= 0 {
            return Err(LattesError::NonPositiveC(c));
        }
        let disc = self.discriminant();
        if disc >= 0 {
            return Err(LattesError::NonNegativeDiscriminant(disc));
        }
        // disc = s²·m with m square-free (negative).
        let (s, m) = square_free_decompose(disc);
        // τ = ((d-a) + s√m) / (2c)
        let tau = QuadExt::from_parts(m, rat(d - a, 2 * c), rat(s, 2 * c));
        let tau = TauValue::new(tau)?;
        // α = a + cτ = (a+d)/2 + (s/2)√m
        let alpha = QuadExt::from_parts(m, rat(a + d, 2), rat(s, 2));
        Ok((tau, alpha))
    }
}

/// Write `disc < 0` as `s²·m` with `m` square-free and `s > 0`.
fn square_free_decompose(disc: i64) -> (i64, i64) {
    debug_assert!(disc < 0);
    let mut n = (-disc) as u64;
    let mut s = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s as i64, -(n as i64))
}

/// The lattice parameter, constrained to the standard reduced region:
/// `Im(τ) > 0`, `-1/2 < Re(τ) ≤ 1/2`, `|τ| ≥ 1` with `Re(τ) ≥ 0` on `|τ| = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauValue {
    tau: QuadExt,
    on_boundary: bool,
}

impl TauValue {
    pub fn new(tau: QuadExt) -> Result<TauValue, LattesError> {
        if tau.radicand() >= 0 {
            return Err(LattesError::InvalidTau(format!(
                "radicand {} is not negative",
                tau.radicand()
            )));
        }
        if tau.imag_sign()? != Sign::Positive {
            return Err(LattesError::InvalidTau(format!("Im(τ) ≤ 0 for {tau}")));
        }
        let re = tau.rational_part().clone();
        let half = rat(1, 2);
        if re <= -half.clone() || re > half {
            return Err(LattesError::InvalidTau(format!("Re(τ) = {re} outside (-1/2, 1/2]")));
        }
        let norm = tau.norm_rat();
        let one = rat_int(1);
        if norm < one {
            return Err(LattesError::InvalidTau(format!("|τ|² = {norm} < 1")));
        }
        if norm == one && re < Rat::from_integer(BigInt::from(0)) {
            return Err(LattesError::InvalidTau(
                "|τ| = 1 with Re(τ) < 0".to_string(),
            ));
        }
        let on_boundary = norm == one || re == rat(1, 2);
        Ok(TauValue { tau, on_boundary })
    }

    pub fn value(&self) -> &QuadExt {
        &self.tau
    }

    pub fn on_boundary_of_fundamental_domain(&self) -> bool {
        self.on_boundary
    }

    /// `|τ|² = Re² + |m|·y²` as an exact rational.
    pub fn norm_rat(&self) -> Rat {
        self.tau.norm_rat()
    }
}

/// A unit of the lattice, acting on `Λ` in the basis `(1, τ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeUnit {
    pub label: &'static str,
    /// Column-major action: image of `(x, y)` is `mat · (x, y)ᵀ`.
    pub mat: [[i64; 2]; 2],
}

impl LatticeUnit {
    pub fn apply(&self, v: (i64, i64)) -> (i64, i64) {
        (
            self.mat[0][0] * v.0 + self.mat[0][1] * v.1,
            self.mat[1][0] * v.0 + self.mat[1][1] * v.1,
        )
    }
}

/// The units of the lattice with parameter `τ`: `{±1}` in general, `{±1, ±i}`
/// exactly when `τ = i`, and the six sixth-roots of unity exactly when
/// `τ = (1+√-3)/2`.
pub fn lattice_units(tau: &TauValue) -> Vec<LatticeUnit> {
    let id = LatticeUnit { label: "1", mat: [[1, 0], [0, 1]] };
    let neg = LatticeUnit { label: "-1", mat: [[-1, 0], [0, -1]] };
    let t = tau.value();
    let is_i = t == &QuadExt::from_parts(-1, rat_int(0), rat_int(1));
    let is_sixth = t == &QuadExt::from_parts(-3, rat(1, 2), rat(1, 2));
    if is_i {
        // i·1 = τ, i·τ = -1.
        let rot = LatticeUnit { label: "i", mat: [[0, -1], [1, 0]] };
        let rot3 = LatticeUnit { label: "-i", mat: [[0, 1], [-1, 0]] };
        vec![id, neg, rot, rot3]
    } else if is_sixth {
        // ω = τ: ω·1 = τ, ω·τ = ω² = -1 + ω.
        let w = [[0i64, -1], [1, 1]];
        let mul = |p: [[i64; 2]; 2], q: [[i64; 2]; 2]| {
            let mut r = [[0i64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
                }
            }
            r
        };
        let w2 = mul(w, w);
        let negm = |p: [[i64; 2]; 2]| [[-p[0][0], -p[0][1]], [-p[1][0], -p[1][1]]];
        vec![
            id,
            neg,
            LatticeUnit { label: "w", mat: w },
            LatticeUnit { label: "w^2", mat: w2 },
            LatticeUnit { label: "-w", mat: negm(w) },
            LatticeUnit { label: "-w^2", mat: negm(w2) },
        ]
    } else {
        vec![id, neg]
    }
}

/// Coset representatives of `(α+1)Λ + 2Λ` in `Λ`, as integer pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaCoset {
    pub representatives: Vec<(i64, i64)>,
    pub rank: u32,
}

/// The reduction of `[[a+1, b], [c, d+1]]` modulo 2, which controls the
/// subgroup `(α+1)Λ + 2Λ`.
pub fn translation_subgroup_matrix(m: &MultiplierMatrix) -> Gf2Mat2 {
    Gf2Mat2::from_ints(m.a + 1, m.b, m.c, m.d + 1)
}

/// Membership of `v ∈ Λ` in `(α+1)Λ + 2Λ`: since the subgroup contains `2Λ`,
/// this only depends on `v mod 2`, where it is the column space of the
/// reduced matrix.
pub fn in_translation_subgroup(m: &MultiplierMatrix, v: (i64, i64)) -> bool {
    translation_subgroup_matrix(m)
        .contains_in_column_space(((v.0.rem_euclid(2)) as u8, (v.1.rem_euclid(2)) as u8))
}

/// Complete list of distinct coset representatives of `(α+1)Λ + 2Λ` in `Λ`:
/// `{0}` at rank 2, all four of `{0, 1, τ, 1+τ}` at rank 0, and `{0, λ}` at
/// rank 1 where `λ` is the first of `1, τ, 1+τ` outside the column space.
pub fn beta_representatives(m: &MultiplierMatrix) -> BetaCoset {
    let red = translation_subgroup_matrix(m);
    let rank = red.rank();
    let representatives = match rank {
        2 => vec![(0, 0)],
        0 => vec![(0, 0), (1, 0), (0, 1), (1, 1)],
        1 => {
            let lambda = [(1i64, 0i64), (0, 1), (1, 1)]
                .into_iter()
                .find(|&(x, y)| !red.contains_in_column_space((x as u8, y as u8)))
                .expect("rank 1 leaves two cosets");
            vec![(0, 0), lambda]
        }
        _ => unreachable!(),
    };
    BetaCoset { representatives, rank }
}

/// Reduce `v` to the canonical coset representative (first match in the
/// fixed order `0, 1, τ, 1+τ`).
pub fn reduce_to_coset_rep(m: &MultiplierMatrix, v: (i64, i64)) -> (i64, i64) {
    for rep in [(0i64, 0i64), (1, 0), (0, 1), (1, 1)] {
        if in_translation_subgroup(m, (v.0 - rep.0, v.1 - rep.1)) {
            return rep;
        }
    }
    unreachable!("the four residues cover Λ/2Λ")
}

/// One analytic conjugacy class datum: matrix, lattice parameter, multiplier,
/// canonical translation part, degree, and rigidity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LattesClass {
    pub matrix: MultiplierMatrix,
    pub tau: TauValue,
    pub alpha: QuadExt,
    /// Canonical representative of the translation part in basis `(1, τ)`.
    pub beta: (i64, i64),
    pub degree: i64,
    pub rigid: bool,
}

impl LattesClass {
    /// Class datum for a rigid map: requires the normalization inequalities.
    /// The translation part is canonicalized under the full equivalence
    /// `β ~ γβ + δ` over lattice units `γ` and `δ ∈ (α+1)Λ + 2Λ`.
    pub fn new_rigid(matrix: MultiplierMatrix, beta: (i64, i64)) -> Result<LattesClass, LattesError> {
        if !matrix.is_normalized() {
            return Err(LattesError::NotNormalized((matrix.a, matrix.b, matrix.c, matrix.d)));
        }
        let (tau, alpha) = matrix.tau_and_alpha()?;
        let beta = canonical_beta(&matrix, &tau, beta);
        Ok(LattesClass {
            degree: matrix.degree(),
            matrix,
            tau,
            alpha,
            beta,
            rigid: true,
        })
    }

    /// Class datum for a nonrigid map `z ↦ nz + β`; `τ` is a free parameter.
    pub fn new_nonrigid(n: i64, tau: TauValue, beta: (i64, i64)) -> Result<LattesClass, LattesError> {
        assert!(n >= 2, "nonrigid multiplier must be an integer ≥ 2");
        let matrix = MultiplierMatrix::scalar(n);
        let alpha = QuadExt::rational(tau.value().radicand(), rat_int(n));
        let beta = canonical_beta(&matrix, &tau, beta);
        Ok(LattesClass {
            matrix,
            tau,
            alpha,
            beta,
            degree: (n * n),
            rigid: false,
        })
    }
}

/// Canonical representative of `β` under `β ~ γβ + δ`: minimize the reduced
/// coset representative over the unit orbit, in the fixed order
/// `0 < 1 < τ < 1+τ`.
pub fn canonical_beta(m: &MultiplierMatrix, tau: &TauValue, beta: (i64, i64)) -> (i64, i64) {
    let order = |v: (i64, i64)| match v {
        (0, 0) => 0,
        (1, 0) => 1,
        (0, 1) => 2,
        (1, 1) => 3,
        _ => unreachable!(),
    };
    lattice_units(tau)
        .iter()
        .map(|u| reduce_to_coset_rep(m, u.apply(beta)))
        .min_by_key(|&v| order(v))
        .expect("at least ±1")
}

/// Conjugacy key for a rigid matrix plus translation part.
pub fn conjugacy_key(m: &MultiplierMatrix, beta: (i64, i64)) -> Result<LattesClass, LattesError> {
    LattesClass::new_rigid(*m, beta)
}

/// All normalized matrices with `2 ≤ ad - bc ≤ max_degree`, in lexicographic
/// `(degree, c, a, d)` order. `b` is solved from the degree when integral.
pub fn enumerate_rigid(max_degree: i64) -> Vec<MultiplierMatrix> {
    let mut out = Vec::new();
    if max_degree < 2 {
        return out;
    }
    for degree in 2..=max_degree {
        // Lemma-style bound: degree ≥ 3c²/4, so c ≤ √(4·degree/3).
        let mut c = 1i64;
        while 3 * c * c <= 4 * degree {
            let a_min = -(c / 2); // a ≥ -c/2 with integer a, i.e. a ≥ ⌈-c/2⌉
            for a in a_min..=degree {
                let d_lo = (a - c + 1).max(-a);
                let d_hi = a + c;
                for d in d_lo..=d_hi {
                    let num = a * d - degree;
                    if num.rem_euclid(c) != 0 {
                        continue;
                    }
                    let b = num / c;
                    let m = MultiplierMatrix::new(a, b, c, d);
                    if m.is_normalized() && m.degree() == degree {
                        out.push(m);
                    }
                }
            }
            c += 1;
        }
    }
    out
}

// --- serialization ----------------------------------------------------------

/// Serialize a `LattesClass` with fixed field order and all integers as
/// decimal strings.
impl Serialize for LattesClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct TauDto {
            m: String,
            x_num: String,
            x_den: String,
            y_num: String,
            y_den: String,
        }
        let t = self.tau.value();
        let tau = TauDto {
            m: t.radicand().to_string(),
            x_num: t.rational_part().numer().to_string(),
            x_den: t.rational_part().denom().to_string(),
            y_num: t.radical_part().numer().to_string(),
            y_den: t.radical_part().denom().to_string(),
        };
        let mut s = serializer.serialize_struct("LattesClass", 8)?;
        s.serialize_field("a", &self.matrix.a.to_string())?;
        s.serialize_field("b", &self.matrix.b.to_string())?;
        s.serialize_field("c", &self.matrix.c.to_string())?;
        s.serialize_field("d", &self.matrix.d.to_string())?;
        s.serialize_field("tau", &tau)?;
        s.serialize_field("beta", &[self.beta.0.to_string(), self.beta.1.to_string()])?;
        s.serialize_field("degree", &self.degree.to_string())?;
        s.serialize_field("rigid", &self.rigid)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(m: i64, xn: i64, xd: i64, yn: i64, yd: i64) -> QuadExt {
        QuadExt::from_parts(m, rat(xn, xd), rat(yn, yd))
    }

    #[test]
    fn tau_from_matrix_examples() {
        // (0,-2,1,1): τ = α = (1+√-7)/2.
        let m = MultiplierMatrix::new(0, -2, 1, 1);
        let (tau, alpha) = m.tau_and_alpha().unwrap();
        assert_eq!(tau.value(), &q(-7, 1, 2, 1, 2));
        assert_eq!(alpha, q(-7, 1, 2, 1, 2));

        // (5,-3,2,4): τ = (-1+√-23)/4, α = (9+√-23)/2.
        let m = MultiplierMatrix::new(5, -3, 2, 4);
        let (tau, alpha) = m.tau_and_alpha().unwrap();
        assert_eq!(tau.value(), &q(-23, -1, 4, 1, 4));
        assert_eq!(alpha, q(-23, 9, 2, 1, 2));

        // (-1,-2,2,1): τ = (1+√-3)/2, α = √-3.
        let m = MultiplierMatrix::new(-1, -2, 2, 1);
        let (tau, alpha) = m.tau_and_alpha().unwrap();
        assert_eq!(tau.value(), &q(-3, 1, 2, 1, 2));
        assert_eq!(alpha, q(-3, 0, 1, 1, 1));
    }

    #[test]
    fn tau_round_trips_through_multiplication() {
        // The matrix of multiplication by α on (1, τ) equals the input:
        // α·1 = a + cτ and α·τ = b + dτ, checked exactly.
        for m in enumerate_rigid(12) {
            let (tau, alpha) = m.tau_and_alpha().unwrap();
            let t = tau.value();
            let a1 = QuadExt::rational(t.radicand(), rat_int(m.a))
                .try_add(&t.scale(&rat_int(m.c)))
                .unwrap();
            assert_eq!(alpha, a1, "α = a + cτ for {m:?}");
            let at = alpha.try_mul(t).unwrap();
            let bt = QuadExt::rational(t.radicand(), rat_int(m.b))
                .try_add(&t.scale(&rat_int(m.d)))
                .unwrap();
            assert_eq!(at, bt, "α·τ = b + dτ for {m:?}");
        }
    }

    #[test]
    fn normalization_examples() {
        assert!(MultiplierMatrix::new(5, -3, 2, 4).is_normalized());
        // b = 0 violates b ≤ -c.
        assert!(!MultiplierMatrix::new(1, 0, 1, 1).is_normalized());
        // b = -c = -2 and d = 1 ≥ a = -1.
        assert!(MultiplierMatrix::new(-1, -2, 2, 1).is_normalized());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(MultiplierMatrix::new(0, -2, 1, 1).degree(), 2);
        assert_eq!(MultiplierMatrix::new(5, -3, 2, 4).degree(), 26);
        assert_eq!(MultiplierMatrix::new(2, 0, 0, 2).degree(), 4);
    }

    /// Dumb search over a box of entries, filtered by the inequalities.
    fn brute_force(max_degree: i64, bound: i64) -> Vec<MultiplierMatrix> {
        let mut v = Vec::new();
        for c in 1..=bound {
            for a in -bound..=bound {
                for d in -bound..=bound {
                    for b in -bound..=-c {
                        let m = MultiplierMatrix::new(a, b, c, d);
                        let deg = m.degree();
                        if (2..=max_degree).contains(&deg) && m.is_normalized() {
                            v.push(m);
                        }
                    }
                }
            }
        }
        v.sort_by_key(|m| (m.degree(), m.c, m.a, m.d));
        v
    }

    #[test]
    fn enumerate_degree_two() {
        let got = enumerate_rigid(2);
        let want = vec![
            MultiplierMatrix::new(0, -2, 1, 0),
            MultiplierMatrix::new(0, -2, 1, 1),
            MultiplierMatrix::new(1, -1, 1, 1),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_degree_three_stratum() {
        let got: Vec<_> = enumerate_rigid(3)
            .into_iter()
            .filter(|m| m.degree() == 3)
            .collect();
        let want = vec![
            MultiplierMatrix::new(0, -3, 1, 0),
            MultiplierMatrix::new(0, -3, 1, 1),
            MultiplierMatrix::new(1, -2, 1, 1),
            MultiplierMatrix::new(1, -1, 1, 2),
            MultiplierMatrix::new(-1, -2, 2, 1),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_below_two_is_empty() {
        assert!(enumerate_rigid(1).is_empty());
    }

    #[test]
    fn enumerate_matches_brute_force() {
        assert_eq!(enumerate_rigid(10), brute_force(10, 40));
    }

    #[test]
    fn degree_lower_bound_inequality() {
        // ad - bc ≥ 3c²/4 exactly, for every enumerated matrix up to degree 50.
        for m in enumerate_rigid(50) {
            assert!(4 * m.degree() >= 3 * m.c * m.c, "{m:?}");
        }
    }

    #[test]
    fn enumerated_taus_are_reduced() {
        // Every enumerated matrix yields a τ satisfying the reduced-region
        // constraints (the constructor enforces them), and conversely every
        // normalized small matrix round-trips.
        for m in enumerate_rigid(20) {
            let (tau, _alpha) = m.tau_and_alpha().unwrap();
            let re = tau.value().rational_part().clone();
            assert!(re > rat(-1, 2) && re <= rat(1, 2));
            assert!(tau.norm_rat() >= rat_int(1));
        }
        // And a non-normalized matrix with c > 0 produces a τ outside the
        // region, so the constructor rejects it: (1,0,1,1) has b = 0.
        let bad = MultiplierMatrix::new(1, 0, 1, 1);
        assert!(bad.tau_and_alpha().is_err() || !bad.is_normalized());
    }

    #[test]
    fn beta_representative_examples() {
        let m = MultiplierMatrix::new(0, -2, 1, 1);
        let coset = beta_representatives(&m);
        assert_eq!(coset.rank, 1);
        assert_eq!(coset.representatives, vec![(0, 0), (1, 0)]);

        let m = MultiplierMatrix::new(1, -1, 1, 1);
        let coset = beta_representatives(&m);
        assert_eq!(coset.rank, 2);
        assert_eq!(coset.representatives, vec![(0, 0)]);

        let m = MultiplierMatrix::new(1, -2, 2, 1);
        let coset = beta_representatives(&m);
        assert_eq!(coset.rank, 0);
        assert_eq!(coset.representatives, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    }

    /// Brute-force index of the subgroup inside Λ/2Λ.
    fn subgroup_size_mod2(m: &MultiplierMatrix) -> usize {
        let mut residues = std::collections::BTreeSet::new();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                // (α+1)(x + yτ) = (a+1)x + by + ((cx + (d+1)y))τ from the matrix.
                let u = (m.a + 1) * x + m.b * y;
                let w = m.c * x + (m.d + 1) * y;
                residues.insert((u.rem_euclid(2), w.rem_euclid(2)));
            }
        }
        residues.len()
    }

    #[test]
    fn coset_count_matches_rank_and_oracle() {
        for m in enumerate_rigid(25) {
            let coset = beta_representatives(&m);
            assert_eq!(coset.representatives.len() as u32, 4 / 2u32.pow(coset.rank));
            // |Λ/2Λ| / |subgroup mod 2Λ| equals the number of cosets.
            assert_eq!(4 / subgroup_size_mod2(&m), coset.representatives.len());
            // Representatives are pairwise inequivalent.
            for (i, &u) in coset.representatives.iter().enumerate() {
                for &v in &coset.representatives[i + 1..] {
                    assert!(!in_translation_subgroup(&m, (u.0 - v.0, u.1 - v.1)));
                }
            }
        }
    }

    #[test]
    fn unit_counts() {
        let tau_i = TauValue::new(q(-1, 0, 1, 1, 1)).unwrap();
        assert_eq!(lattice_units(&tau_i).len(), 4);
        let tau_w = TauValue::new(q(-3, 1, 2, 1, 2)).unwrap();
        assert_eq!(lattice_units(&tau_w).len(), 6);
        let tau_generic = TauValue::new(q(-2, 0, 1, 1, 1)).unwrap();
        assert_eq!(lattice_units(&tau_generic).len(), 2);
    }

    #[test]
    fn units_preserve_lattice() {
        // Each unit matrix is invertible over Z (determinant ±1).
        for tau in [
            TauValue::new(q(-1, 0, 1, 1, 1)).unwrap(),
            TauValue::new(q(-3, 1, 2, 1, 2)).unwrap(),
        ] {
            for u in lattice_units(&tau) {
                let det = u.mat[0][0] * u.mat[1][1] - u.mat[0][1] * u.mat[1][0];
                assert_eq!(det.abs(), 1, "{}", u.label);
            }
        }
    }

    #[test]
    fn conjugacy_key_examples() {
        let m = MultiplierMatrix::new(0, -2, 1, 1);
        // β = τ has the same key as β = 1.
        let k_tau = conjugacy_key(&m, (0, 1)).unwrap();
        let k_one = conjugacy_key(&m, (1, 0)).unwrap();
        assert_eq!(k_tau.beta, k_one.beta);
        assert_eq!(k_tau, k_one);
        // β = 0 and β = 1 are distinct keys.
        let k_zero = conjugacy_key(&m, (0, 0)).unwrap();
        assert_ne!(k_zero.beta, k_one.beta);
        // β = 0 is always fixed.
        for m in enumerate_rigid(6) {
            assert_eq!(conjugacy_key(&m, (0, 0)).unwrap().beta, (0, 0));
        }
    }

    #[test]
    fn at_most_four_betas_up_to_equivalence() {
        for m in enumerate_rigid(15) {
            let mut keys = std::collections::BTreeSet::new();
            for x in -2i64..=2 {
                for y in -2i64..=2 {
                    keys.insert(conjugacy_key(&m, (x, y)).unwrap().beta);
                }
            }
            assert!(keys.len() <= 4, "{m:?} has {} keys", keys.len());
        }
    }

    #[test]
    fn class_serialization_schema() {
        let m = MultiplierMatrix::new(0, -2, 1, 1);
        let class = conjugacy_key(&m, (1, 0)).unwrap();
        let json = serde_json::to_string(&class).unwrap();
        assert_eq!(
            json,
            "{\"a\":\"0\",\"b\":\"-2\",\"c\":\"1\",\"d\":\"1\",\
             \"tau\":{\"m\":\"-7\",\"x_num\":\"1\",\"x_den\":\"2\",\"y_num\":\"1\",\"y_den\":\"2\"},\
             \"beta\":[\"1\",\"0\"],\"degree\":\"2\",\"rigid\":true}"
        );
    }
}
