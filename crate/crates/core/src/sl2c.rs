//! The SL(2,C) covering of the restricted Lorentz group and the
//! automorphisms induced by reflections.
//!
//! The spinor map `x ↦ A x̃ A*` with `x̃ = x₀ + Σ xᵢσᵢ` is followed by the
//! exchange of axes 1 and 3, so that the diagonal subgroup covers the boosts
//! along and rotations about the 1-axis, i.e. the stabilizer of `W_R`.

use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poincare::{classify_component, ComponentLabel, LorentzMatrix};
use crate::tolerances::{EPS_DET, EPS_GROUP};

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// A complex 2×2 matrix of unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 4]", into = "[[f64; 2]; 4]")]
pub struct SL2C(Matrix2<C>);

impl SL2C {
    /// `(α β; γ δ)` with `αδ − βγ = 1` to [`EPS_DET`].
    pub fn new(alpha: C, beta: C, gamma: C, delta: C) -> Result<Self> {
        Self::from_matrix(Matrix2::new(alpha, beta, gamma, delta))
    }

    pub fn from_matrix(m: Matrix2<C>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        if (det - 1.0).norm() > EPS_DET {
            return Err(Error::NotUnimodular(format!("det = {det}")));
        }
        Ok(Self(m))
    }

    /// Rescales an invertible matrix to unit determinant (one of the two roots).
    pub fn normalized(m: Matrix2<C>) -> Result<Self> {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        if det.norm() == 0.0 || !det.re.is_finite() || !det.im.is_finite() {
            return Err(Error::NotUnimodular(format!("det = {det}")));
        }
        let s = det.sqrt();
        let n = m.map(|z| z / s);
        let det = n[(0, 0)] * n[(1, 1)] - n[(0, 1)] * n[(1, 0)];
        if (det - 1.0).norm() > EPS_DET {
            return Err(Error::NotUnimodular(format!("det = {det}")));
        }
        Ok(Self(n))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    /// `diag(λ, λ⁻¹)`, an element of the maximally abelian subgroup.
    pub fn diagonal(lambda: C) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(Error::NotUnimodular("λ = 0".into()));
        }
        Self::new(lambda, c(0.0, 0.0), c(0.0, 0.0), lambda.inv())
    }

    /// `(1 z; 0 1)`.
    pub fn upper(z: C) -> Self {
        Self(Matrix2::new(c(1.0, 0.0), z, c(0.0, 0.0), c(1.0, 0.0)))
    }

    /// `(1 0; z 1)`.
    pub fn lower(z: C) -> Self {
        Self(Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), z, c(1.0, 0.0)))
    }

    pub fn matrix(&self) -> &Matrix2<C> {
        &self.0
    }

    pub fn entries(&self) -> (C, C, C, C) {
        (self.0[(0, 0)], self.0[(0, 1)], self.0[(1, 0)], self.0[(1, 1)])
    }

    pub fn inverse(&self) -> Self {
        let (a, b, g, d) = self.entries();
        Self(Matrix2::new(d, -b, -g, a))
    }

    pub fn neg(&self) -> Self {
        Self(-self.0)
    }

    pub fn max_abs_diff(&self, other: &SL2C) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_upper_unipotent(&self, tol: f64) -> bool {
        let (a, _, g, d) = self.entries();
        (a - 1.0).norm() <= tol && (d - 1.0).norm() <= tol && g.norm() <= tol
    }

    pub fn is_lower_unipotent(&self, tol: f64) -> bool {
        let (a, b, _, d) = self.entries();
        (a - 1.0).norm() <= tol && (d - 1.0).norm() <= tol && b.norm() <= tol
    }
}

impl Mul for SL2C {
    type Output = SL2C;
    fn mul(self, rhs: SL2C) -> SL2C {
        SL2C(self.0 * rhs.0)
    }
}

impl TryFrom<[[f64; 2]; 4]> for SL2C {
    type Error = Error;
    fn try_from(e: [[f64; 2]; 4]) -> Result<Self> {
        Self::new(c(e[0][0], e[0][1]), c(e[1][0], e[1][1]), c(e[2][0], e[2][1]), c(e[3][0], e[3][1]))
    }
}

impl From<SL2C> for [[f64; 2]; 4] {
    fn from(a: SL2C) -> Self {
        let (p, q, r, s) = a.entries();
        [[p.re, p.im], [q.re, q.im], [r.re, r.im], [s.re, s.im]]
    }
}

fn pauli() -> [Matrix2<C>; 4] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [Matrix2::new(l, o, o, l), Matrix2::new(o, l, l, o), Matrix2::new(o, -i, i, o), Matrix2::new(l, o, o, -l)]
}

/// Exchange of the coordinate axes 1 and 3.
fn swap13(m: &Matrix4<f64>) -> Matrix4<f64> {
    let p = [0, 3, 2, 1];
    Matrix4::from_fn(|i, j| m[(p[i], p[j])])
}

/// `ρ(A)`: the Lorentz matrix with `ρ(A)x = (A x̃ A*)~` in swapped axes.
pub fn covering_map(a: &SL2C) -> LorentzMatrix {
    let s = pauli();
    let ad = a.0.adjoint();
    // ρ_std(A)_{μν} = ½ tr(σ_μ A σ_ν A*)
    let std = Matrix4::from_fn(|mu, nu| 0.5 * (s[mu] * a.0 * s[nu] * ad).trace().re);
    LorentzMatrix::from_unchecked(swap13(&std))
}

/// A preimage of `Λ ∈ L↑₊` under [`covering_map`], unique up to sign.
///
/// Uses `Σ_ν (Aσ_νA*) C σ_ν = 2 tr(A*C) A` with the Pauli matrix `C` giving
/// the largest result.
pub fn lift(l: &LorentzMatrix) -> Result<SL2C> {
    if classify_component(l) != ComponentLabel::ProperOrthochronous {
        return Err(Error::NotRestricted);
    }
    let s = pauli();
    let m = swap13(l.matrix());
    let images: Vec<Matrix2<C>> =
        (0..4).map(|nu| (0..4).fold(Matrix2::zeros(), |acc, mu| acc + s[mu].map(|z| z * m[(mu, nu)]))).collect();
    let best = s
        .iter()
        .map(|cm| (0..4).fold(Matrix2::zeros(), |acc, nu| acc + images[nu] * cm * s[nu]))
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("four candidates");
    let a = SL2C::normalized(best)?;
    if covering_map(&a).max_abs_diff(l) > EPS_GROUP * (1.0 + l.matrix().amax()).powi(2) {
        return Err(Error::VerificationFailed("lift does not cover the input".into()));
    }
    Ok(a)
}

/// The two reflections acting on the covering group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReflectionKind {
    /// `π(A) = A*⁻¹`, covering conjugation by `T` (equivalently by `P`).
    #[serde(rename = "PT")]
    Pt,
    /// `π₃(A) = −R Ā R*` with `R = diag(i, −i)`, covering conjugation by `P₃`.
    #[serde(rename = "P3")]
    P3,
}

pub fn reflection_action(kind: ReflectionKind, a: &SL2C) -> SL2C {
    match kind {
        ReflectionKind::Pt => SL2C(a.0.adjoint()).inverse(),
        ReflectionKind::P3 => {
            let r = Matrix2::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
            SL2C(-(r * a.0.map(|z| z.conj()) * r.adjoint()))
        }
    }
}

/// The four shapes of `M(A)`: a stabilizer element of `W_R` times
/// `1`, `T`, `P₃` or `TP₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaCase {
    A,
    B,
    C,
    D,
}

impl GammaCase {
    pub const ALL: [GammaCase; 4] = [GammaCase::A, GammaCase::B, GammaCase::C, GammaCase::D];

    /// Case selected by the component of `M(A)`.
    pub fn from_component(label: ComponentLabel) -> Self {
        match label {
            ComponentLabel::ProperOrthochronous => GammaCase::A,
            ComponentLabel::ImproperAntichronous => GammaCase::B,
            ComponentLabel::ImproperOrthochronous => GammaCase::C,
            ComponentLabel::ProperAntichronous => GammaCase::D,
        }
    }

    /// The reflection `1`, `T`, `P₃` or `TP₃` of this case.
    pub fn reflection(self) -> LorentzMatrix {
        let d = match self {
            GammaCase::A => [1.0, 1.0, 1.0, 1.0],
            GammaCase::B => [-1.0, 1.0, 1.0, 1.0],
            GammaCase::C => [1.0, 1.0, 1.0, -1.0],
            GammaCase::D => [-1.0, 1.0, 1.0, -1.0],
        };
        LorentzMatrix::diagonal(d).expect("diagonal signs are Lorentz")
    }
}

/// `γ_A(B)` for the case of `M(A)` and `λ²` of its stabilizer part.
pub fn gamma_case_map(case: GammaCase, lambda2: C, b: &SL2C) -> SL2C {
    let (al, be, ga, de) = b.entries();
    let li = lambda2.inv();
    let m = match case {
        GammaCase::A => Matrix2::new(al, lambda2 * be, li * ga, de),
        GammaCase::B => Matrix2::new(de.conj(), -lambda2 * ga.conj(), -li * be.conj(), al.conj()),
        GammaCase::C => Matrix2::new(al.conj(), -lambda2 * be.conj(), -li * ga.conj(), de.conj()),
        GammaCase::D => Matrix2::new(de, lambda2 * ga, li * be, al),
    };
    SL2C(m)
}

/// `M(A) = ρ(diag(λ, λ⁻¹)) · X` with `X` the reflection of `case`.
pub fn case_matrix(case: GammaCase, lambda2: C) -> Result<LorentzMatrix> {
    let d = SL2C::diagonal(lambda2.sqrt())?;
    Ok(covering_map(&d) * case.reflection())
}

/// Splits `M` into its case and `λ²`, or reports how far the stabilizer part
/// is from the diagonal subgroup.
pub fn decompose_case(m: &LorentzMatrix) -> std::result::Result<(GammaCase, C), f64> {
    let case = GammaCase::from_component(classify_component(m));
    let stab = *m * case.reflection().inverse();
    let d = lift(&stab).map_err(|_| f64::INFINITY)?;
    let (a, b, g, _) = d.entries();
    let off = b.norm().max(g.norm());
    if off > EPS_GROUP * (1.0 + a.norm()) {
        return Err(off);
    }
    Ok((case, a * a))
}

/// Solves `γ_A(X)X⁻¹ = target` for `X ∈ ℒ_C` in case (a).
pub fn solve_lower_twist(lambda2: C, target: &SL2C) -> Result<SL2C> {
    if !target.is_lower_unipotent(EPS_DET) {
        return Err(Error::InvalidParameters("target is not lower unipotent".into()));
    }
    let k = lambda2.inv() - 1.0;
    if k.norm() <= EPS_DET {
        return Err(Error::InvalidParameters("λ² = 1 gives the identity automorphism".into()));
    }
    Ok(SL2C::lower(target.entries().2 / k))
}

/// Largest deviation of `M(A)M(B)` from `M(Aγ_A(B))` over the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEquationReport {
    pub samples: usize,
    pub max_deviation: f64,
    /// Samples whose `M(A)` is not a stabilizer element times a reflection.
    pub undecomposable: usize,
}

pub fn check_functional_equation(m: impl Fn(&SL2C) -> LorentzMatrix, samples: &[(SL2C, SL2C)]) -> FunctionalEquationReport {
    let mut max_deviation: f64 = 0.0;
    let mut undecomposable = 0;
    for (a, b) in samples {
        let ma = m(a);
        match decompose_case(&ma) {
            Ok((case, lambda2)) => {
                let lhs = ma * m(b);
                let rhs = m(&(*a * gamma_case_map(case, lambda2, b)));
                max_deviation = max_deviation.max(lhs.max_abs_diff(&rhs));
            }
            Err(off) => {
                undecomposable += 1;
                max_deviation = max_deviation.max(off);
            }
        }
    }
    FunctionalEquationReport { samples: samples.len(), max_deviation, undecomposable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::{boost, rotation};
    use nalgebra::Vector3;

    fn e1() -> Vector3<f64> {
        Vector3::x()
    }

    fn sample() -> SL2C {
        SL2C::normalized(Matrix2::new(c(1.2, 0.3), c(-0.4, 0.9), c(0.2, -0.7), c(0.8, 0.1))).unwrap()
    }

    #[test]
    fn covering_examples() {
        assert!(covering_map(&SL2C::identity()).max_abs_diff(&LorentzMatrix::identity()) < 1e-15);
        assert!(covering_map(&SL2C::identity().neg()).max_abs_diff(&LorentzMatrix::identity()) < 1e-15);
        let t = 0.9;
        let a = SL2C::diagonal(c((t / 2.0_f64).exp(), 0.0)).unwrap();
        assert!(covering_map(&a).max_abs_diff(&boost(&e1(), t)) < 1e-12);
    }

    #[test]
    fn diagonal_phase_is_rotation_about_axis_one() {
        let phi = 0.7;
        let a = SL2C::diagonal(C::from_polar(1.0, phi / 2.0)).unwrap();
        let r = covering_map(&a);
        let plus = rotation(&e1(), phi).max_abs_diff(&r);
        let minus = rotation(&e1(), -phi).max_abs_diff(&r);
        assert!(plus.min(minus) < 1e-12);
    }

    #[test]
    fn covering_is_homomorphism() {
        let a = sample();
        let b = SL2C::normalized(Matrix2::new(c(0.3, 1.0), c(2.0, 0.0), c(-0.5, 0.5), c(1.0, -0.2))).unwrap();
        let lhs = covering_map(&(a * b));
        let rhs = covering_map(&a) * covering_map(&b);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        assert!(LorentzMatrix::new(*lhs.matrix()).is_ok());
    }

    #[test]
    fn lift_inverts_covering() {
        let a = sample();
        let b = lift(&covering_map(&a)).unwrap();
        assert!(b.max_abs_diff(&a).min(b.max_abs_diff(&a.neg())) < 1e-12);
        // trace zero: rotation by π
        let r = SL2C::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)).unwrap();
        let b = lift(&covering_map(&r)).unwrap();
        assert!(b.max_abs_diff(&r).min(b.max_abs_diff(&r.neg())) < 1e-12);
        let t = LorentzMatrix::diagonal([-1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(lift(&t), Err(Error::NotRestricted));
    }

    #[test]
    fn reflection_examples() {
        assert_eq!(reflection_action(ReflectionKind::Pt, &SL2C::identity()), SL2C::identity());
        let t = 0.6_f64;
        let a = SL2C::diagonal(c((t / 2.0).exp(), 0.0)).unwrap();
        let expect = SL2C::diagonal(c((-t / 2.0).exp(), 0.0)).unwrap();
        assert!(reflection_action(ReflectionKind::Pt, &a).max_abs_diff(&expect) < 1e-15);
        let z = c(0.4, -1.3);
        let got = reflection_action(ReflectionKind::P3, &SL2C::upper(z));
        // −R Ā R* = (−1 z̄; 0 −1), which is −(1 −z̄; 0 1)
        let expect = SL2C::new(c(-1.0, 0.0), z.conj(), c(0.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!(got.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn reflections_cover_conjugations() {
        let a = sample();
        let r = covering_map(&a);
        let t = LorentzMatrix::diagonal([-1.0, 1.0, 1.0, 1.0]).unwrap();
        let p3 = LorentzMatrix::diagonal([1.0, 1.0, 1.0, -1.0]).unwrap();
        assert!(covering_map(&reflection_action(ReflectionKind::Pt, &a)).max_abs_diff(&(t * r * t)) < 1e-12);
        assert!(covering_map(&reflection_action(ReflectionKind::P3, &a)).max_abs_diff(&(p3 * r * p3)) < 1e-12);
    }

    #[test]
    fn gamma_case_examples() {
        let b = sample();
        assert_eq!(gamma_case_map(GammaCase::A, c(1.0, 0.0), &b), b);
        let l2 = c(0.5, 0.8);
        let z = c(1.5, -0.3);
        let got = gamma_case_map(GammaCase::A, l2, &SL2C::lower(z));
        assert!(got.max_abs_diff(&SL2C::lower(z / l2)) < 1e-15);
        let (al, be, ga, de) = b.entries();
        let got = gamma_case_map(GammaCase::D, l2, &b);
        let expect = SL2C(Matrix2::new(de, l2 * ga, be / l2, al));
        assert!(got.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn gamma_cases_cover_conjugation() {
        let b = sample();
        for case in GammaCase::ALL {
            for l2 in [c(1.0, 0.0), c(2.0, 0.5), c(-0.3, 0.7)] {
                let m = case_matrix(case, l2).unwrap();
                let lhs = covering_map(&gamma_case_map(case, l2, &b));
                let rhs = m * covering_map(&b) * m.inverse();
                assert!(lhs.max_abs_diff(&rhs) < 1e-12, "{case:?} {l2}");
                let (back, back_l2) = decompose_case(&m).unwrap();
                assert_eq!(back, case);
                assert!((back_l2 - l2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma_cases_keep_or_swap_triangular_subgroups() {
        let u = SL2C::upper(c(0.3, 0.4));
        let l2 = c(1.5, -0.5);
        for case in GammaCase::ALL {
            let img = gamma_case_map(case, l2, &u);
            let keeps = matches!(case, GammaCase::A | GammaCase::C);
            assert_eq!(img.is_upper_unipotent(1e-15), keeps);
            assert_eq!(img.is_lower_unipotent(1e-15), !keeps);
        }
    }

    #[test]
    fn lower_twist_solve() {
        let l2 = c(0.2, 1.1);
        let target = SL2C::lower(c(-2.0, 0.5));
        let x = solve_lower_twist(l2, &target).unwrap();
        let got = gamma_case_map(GammaCase::A, l2, &x) * x.inverse();
        assert!(got.max_abs_diff(&target) < 1e-14);
        assert!(solve_lower_twist(c(1.0, 0.0), &target).is_err());
    }

    #[test]
    fn functional_equation_examples() {
        let pairs = vec![(sample(), sample().inverse()), (SL2C::upper(c(1.0, 2.0)), sample())];
        let rep = check_functional_equation(|_| LorentzMatrix::identity(), &pairs);
        assert_eq!(rep.max_deviation, 0.0);
        let t = LorentzMatrix::diagonal([-1.0, 1.0, 1.0, 1.0]).unwrap();
        let toy = |a: &SL2C| if a.entries().0.norm() > 1.0 { t } else { LorentzMatrix::identity() };
        let rep = check_functional_equation(toy, &pairs);
        assert!(rep.max_deviation > 0.5);
        // on lower triangular matrices A ↦ |A₀₀| is a homomorphism into the boosts along axis 1
        let borel = |k: f64| SL2C::diagonal(c(0.5 + 0.1 * k, 0.2 * k - 0.6)).unwrap() * SL2C::lower(c(k.sin(), k.cos()));
        let pairs: Vec<(SL2C, SL2C)> = (0..100).map(|k| (borel(k as f64 * 0.13), borel(k as f64 * 0.29 + 1.0))).collect();
        let hom = |a: &SL2C| covering_map(&SL2C::diagonal(c(a.entries().0.norm(), 0.0)).unwrap());
        let rep = check_functional_equation(hom, &pairs);
        assert_eq!(rep.undecomposable, 0);
        assert!(rep.max_deviation < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let a = sample();
        let s = serde_json::to_string(&a).unwrap();
        let b: SL2C = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<SL2C>("[[1,0],[1,0],[0,0],[1,0]]").is_ok());
        assert!(serde_json::from_str::<SL2C>("[[2,0],[0,0],[0,0],[1,0]]").is_err());
    }
}
