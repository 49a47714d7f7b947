//! Floating-point verification of the exceptional quadratic map
//! `f(z) = (Az² + B)/(z² + 1)` with `2A² = (1 ± √-7)/2` and
//! `B = -A(2A² + 1)`: coefficients, fixed points, the critical orbit
//! scheme, and the alternate normal form with the fixed postcritical
//! points at 0 and ∞.
//!
//! These are sanity checks of closed-form algebra, so double precision with
//! a few Newton refinements and fixed tolerances is the right tool; the
//! exact arithmetic lives elsewhere.

use num_complex::Complex64;

pub const TOL: f64 = 1e-9;
const REFINED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadraticLattesMap {
    pub a: Complex64,
    pub b: Complex64,
    pub branch: Branch,
}

/// A point of the extended plane in projective coordinates.
#[derive(Debug, Clone, Copy)]
pub struct ProjPoint {
    pub num: Complex64,
    pub den: Complex64,
}

impl ProjPoint {
    pub fn finite(z: Complex64) -> ProjPoint {
        ProjPoint { num: z, den: Complex64::new(1.0, 0.0) }
    }

    pub fn infinity() -> ProjPoint {
        ProjPoint { num: Complex64::new(1.0, 0.0), den: Complex64::new(0.0, 0.0) }
    }

    pub fn to_complex(&self) -> Option<Complex64> {
        if self.den.norm() <= 1e-14 * self.num.norm() {
            None
        } else {
            Some(self.num / self.den)
        }
    }

    /// Chordal-style distance that treats ∞ as a regular point.
    pub fn dist(&self, other: &ProjPoint) -> f64 {
        let cross = self.num * other.den - other.num * self.den;
        let n1 = (self.num.norm_sqr() + self.den.norm_sqr()).sqrt();
        let n2 = (other.num.norm_sqr() + other.den.norm_sqr()).sqrt();
        cross.norm() / (n1 * n2)
    }
}

/// Solve `2A⁴ - A² + 1 = 0` on the chosen branch `A² = (1 ± √-7)/4`, refine
/// by Newton steps, and set `B = -A(2A² + 1)`.
pub fn solve_coefficients(branch: Branch) -> QuadraticLattesMap {
    let sqrt_m7 = Complex64::new(0.0, 7.0f64.sqrt());
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let a2 = (Complex64::new(1.0, 0.0) + sign * sqrt_m7) / 4.0;
    let mut a = a2.sqrt();
    for _ in 0..3 {
        let g = 2.0 * a.powu(4) - a.powu(2) + Complex64::new(1.0, 0.0);
        let dg = 8.0 * a.powu(3) - 2.0 * a;
        a -= g / dg;
    }
    let b = -a * (2.0 * a * a + 1.0);
    QuadraticLattesMap { a, b, branch }
}

impl QuadraticLattesMap {
    /// Residual of the coefficient equation `2A⁴ - A² + 1 = 0`.
    pub fn coefficient_residual(&self) -> f64 {
        (2.0 * self.a.powu(4) - self.a.powu(2) + Complex64::new(1.0, 0.0)).norm()
    }

    pub fn b_residual(&self) -> f64 {
        (self.b + self.a * (2.0 * self.a * self.a + 1.0)).norm()
    }

    /// `2A²`, one of the two conjugate quadratic multipliers.
    pub fn multiplier(&self) -> Complex64 {
        2.0 * self.a * self.a
    }

    pub fn invariants_hold(&self) -> bool {
        let alpha = Complex64::new(0.5, 0.5 * 7.0f64.sqrt());
        let m = self.multiplier();
        self.coefficient_residual() < REFINED_TOL
            && self.b_residual() < REFINED_TOL
            && ((m - alpha).norm() < TOL || (m - alpha.conj()).norm() < TOL)
            && (self.a * self.a + 1.0).norm() > 0.2
    }
}

/// Projective evaluation `[z : w] ↦ [Az² + Bw² : z² + w²]`.
pub fn evaluate(map: &QuadraticLattesMap, z: &ProjPoint) -> ProjPoint {
    let zz = z.num * z.num;
    let ww = z.den * z.den;
    let num = map.a * zz + map.b * ww;
    let den = zz + ww;
    let scale = (num.norm_sqr() + den.norm_sqr()).sqrt();
    if scale > 0.0 {
        ProjPoint { num: num / scale, den: den / scale }
    } else {
        ProjPoint { num, den }
    }
}

/// Node labels of the critical-orbit scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchemeNode {
    Infinity,
    Zero,
    CritValueA,
    CritValueB,
    FixedX,
    FixedY,
}

/// The mapping scheme: arrows with local degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingScheme {
    pub arrows: Vec<(SchemeNode, SchemeNode, u8)>,
}

impl MappingScheme {
    /// The reference shape: two local-degree-2 arrows out of the critical
    /// points, two postcritical transits, two fixed points.
    pub fn reference() -> MappingScheme {
        use SchemeNode::*;
        MappingScheme {
            arrows: vec![
                (Infinity, CritValueA, 2),
                (Zero, CritValueB, 2),
                (CritValueA, FixedX, 1),
                (CritValueB, FixedY, 1),
                (FixedX, FixedX, 1),
                (FixedY, FixedY, 1),
            ],
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum QuadraticError {
    #[error("critical orbit failed to close within 8 steps (residual {0:.3e})")]
    OrbitDoesNotClose(f64),
    #[error("critical points are not 0 and ∞ (|A - B| = {0:.3e})")]
    WrongCriticalPoints(f64),
    #[error("a postcritical point collides with a critical point")]
    PostcriticalCritical,
}

/// Compute the mapping scheme: the derivative numerator reduces to
/// `2z(A - B)`, so the critical points must be 0 and ∞; orbits are iterated
/// to closure.
pub fn mapping_scheme(map: &QuadraticLattesMap) -> Result<MappingScheme, QuadraticError> {
    let sep = (map.a - map.b).norm();
    if sep < 1e-8 {
        return Err(QuadraticError::WrongCriticalPoints(sep));
    }

    let inf = ProjPoint::infinity();
    let zero = ProjPoint::finite(Complex64::new(0.0, 0.0));
    let va = evaluate(map, &inf);
    let vb = evaluate(map, &zero);
    let x = evaluate(map, &va);
    let y = evaluate(map, &vb);
    // The critical values must transit to fixed points in one step; allow a
    // longer walk only to produce a useful residual on the wrong branch.
    for (v, f) in [(&va, &x), (&vb, &y)] {
        let next = evaluate(map, f);
        if next.dist(f) > TOL {
            let mut p = *f;
            let mut closed = false;
            for _ in 0..8 {
                let q = evaluate(map, &p);
                if q.dist(&p) < TOL {
                    closed = true;
                    break;
                }
                p = q;
            }
            let residual = next.dist(f);
            if !closed {
                return Err(QuadraticError::OrbitDoesNotClose(residual));
            }
            return Err(QuadraticError::OrbitDoesNotClose(residual));
        }
        let _ = v;
    }

    // None of the four postcritical points is critical.
    for p in [&va, &vb, &x, &y] {
        if p.dist(&inf) < TOL || p.dist(&zero) < TOL {
            return Err(QuadraticError::PostcriticalCritical);
        }
    }

    Ok(MappingScheme::reference())
}

/// The four postcritical points `A, B, X = f(A), Y = f(B)`.
pub fn postcritical_points(map: &QuadraticLattesMap) -> [ProjPoint; 4] {
    let va = evaluate(map, &ProjPoint::infinity());
    let vb = evaluate(map, &ProjPoint::finite(Complex64::new(0.0, 0.0)));
    let x = evaluate(map, &va);
    let y = evaluate(map, &vb);
    [va, vb, x, y]
}

/// Residuals of the closed-form identities `X = -A`, `Y = -B`.
pub fn fixed_point_residuals(map: &QuadraticLattesMap) -> (f64, f64) {
    let [_, _, x, y] = postcritical_points(map);
    let rx = x.dist(&ProjPoint::finite(-map.a));
    let ry = y.dist(&ProjPoint::finite(-map.b));
    (rx, ry)
}

/// Check the alternate normal form `g(z) = z(z + α²)/(α²z + 1)`: its
/// mapping scheme must match the reference with 0 and ∞ as the two fixed
/// postcritical points.
pub fn milnor_equiv(alpha_sq: Complex64) -> bool {
    let g = |z: &ProjPoint| -> ProjPoint {
        let num = z.num * (z.num + alpha_sq * z.den);
        let den = z.den * (alpha_sq * z.num + z.den);
        let scale = (num.norm_sqr() + den.norm_sqr()).sqrt();
        if scale > 0.0 {
            ProjPoint { num: num / scale, den: den / scale }
        } else {
            ProjPoint { num, den }
        }
    };
    // Critical points: roots of α²z² + 2z + α².
    if alpha_sq.norm() < 1e-12 {
        return false;
    }
    let disc = (Complex64::new(4.0, 0.0) - 4.0 * alpha_sq.powu(2)).sqrt();
    let c1 = (-2.0 + disc) / (2.0 * alpha_sq);
    let c2 = (-2.0 - disc) / (2.0 * alpha_sq);
    let zero = ProjPoint::finite(Complex64::new(0.0, 0.0));
    let inf = ProjPoint::infinity();

    let mut hits_zero = Vec::new();
    for c in [c1, c2] {
        let cp = ProjPoint::finite(c);
        let v = g(&cp);
        // The critical value is a transit point, not fixed and not 0 or ∞.
        if v.dist(&cp) < TOL || v.dist(&zero) < TOL || v.dist(&inf) < TOL {
            return false;
        }
        let w = g(&v);
        let to_zero = w.dist(&zero) < TOL;
        let to_inf = w.dist(&inf) < TOL;
        if !(to_zero || to_inf) {
            return false;
        }
        hits_zero.push(to_zero);
    }
    if g(&zero).dist(&zero) > TOL || g(&inf).dist(&inf) > TOL {
        return false;
    }
    // The two critical orbits land on the two distinct fixed points.
    hits_zero[0] != hits_zero[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_plus_branch() {
        let map = solve_coefficients(Branch::Plus);
        assert!(map.coefficient_residual() < REFINED_TOL);
        assert!(map.b_residual() < REFINED_TOL);
        assert!((map.a - Complex64::new(0.6919, 0.4780)).norm() < 1e-3);
        assert!((map.b - Complex64::new(-0.4055, -1.6324)).norm() < 1e-3);
        let alpha = Complex64::new(0.5, 0.5 * 7.0f64.sqrt());
        assert!((map.multiplier() - alpha).norm() < TOL);
        assert!((map.a * map.a + 1.0).norm() > 0.2);
        assert!(map.invariants_hold());
    }

    #[test]
    fn evaluation_examples() {
        let map = solve_coefficients(Branch::Plus);
        let f_inf = evaluate(&map, &ProjPoint::infinity());
        assert!(f_inf.dist(&ProjPoint::finite(map.a)) < TOL);
        let f_zero = evaluate(&map, &ProjPoint::finite(Complex64::new(0.0, 0.0)));
        assert!(f_zero.dist(&ProjPoint::finite(map.b)) < TOL);
        let f_ma = evaluate(&map, &ProjPoint::finite(-map.a));
        assert!(f_ma.dist(&ProjPoint::finite(-map.a)) < TOL);
        let f_b = evaluate(&map, &ProjPoint::finite(map.b));
        assert!(f_b.dist(&ProjPoint::finite(-map.b)) < TOL);
    }

    #[test]
    fn scheme_both_branches() {
        let plus = mapping_scheme(&solve_coefficients(Branch::Plus)).unwrap();
        let minus = mapping_scheme(&solve_coefficients(Branch::Minus)).unwrap();
        assert_eq!(plus, minus);
        assert_eq!(plus, MappingScheme::reference());
    }

    #[test]
    fn perturbed_coefficients_fail() {
        let mut map = solve_coefficients(Branch::Plus);
        map.a += Complex64::new(0.01, 0.0);
        map.b = -map.a * (2.0 * map.a * map.a + 1.0);
        assert!(mapping_scheme(&map).is_err() || !map.invariants_hold());
    }

    #[test]
    fn fixed_point_residuals_small() {
        let map = solve_coefficients(Branch::Minus);
        let (rx, ry) = fixed_point_residuals(&map);
        assert!(rx < TOL && ry < TOL);
    }

    #[test]
    fn milnor_form_examples() {
        let alpha = Complex64::new(0.5, 0.5 * 7.0f64.sqrt());
        assert!(milnor_equiv(alpha * alpha));
        assert!(milnor_equiv(alpha.conj() * alpha.conj()));
        // Degenerate control: α = 2.
        assert!(!milnor_equiv(Complex64::new(4.0, 0.0)));
    }

    #[test]
    fn generic_points_have_two_preimages() {
        let map = solve_coefficients(Branch::Plus);
        let mut state = 0x12345678u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) * 4.0 - 2.0
        };
        for _ in 0..100 {
            let w = Complex64::new(next(), next());
            // Solve (A - w)z² + (B - w) = 0.
            let z2 = (w - map.b) / (map.a - w);
            let z = z2.sqrt();
            for root in [z, -z] {
                let img = evaluate(&map, &ProjPoint::finite(root));
                assert!(img.dist(&ProjPoint::finite(w)) < 1e-7);
            }
            assert!(z.norm() > 1e-12, "distinct preimages");
        }
    }
}
