//! Poincaré group, its extension by dilations, wedge reflections and
//! transport between wedges.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Rotation3, Unit, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{metric, CharacteristicHyperplane, FourVector, LightlikeDirection, Wedge};
use crate::tolerances::{COCYCLE_COND_MAX, EIGEN_FLOOR_SQRT, EPS_GEOM, EPS_GROUP};

/// A 4×4 matrix preserving the Minkowski metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 4]; 4]", into = "[[f64; 4]; 4]")]
pub struct LorentzMatrix(Matrix4<f64>);

impl LorentzMatrix {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let dev = lorentz_deviation(&m);
        if dev.is_finite() && dev <= EPS_GROUP {
            Ok(Self(m))
        } else {
            Err(Error::NotLorentz(dev))
        }
    }

    pub(crate) fn from_unchecked(m: Matrix4<f64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn diagonal(d: [f64; 4]) -> Result<Self> {
        Self::new(Matrix4::from_diagonal(&Vector4::from(d)))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// `Λ⁻¹ = g Λᵀ g`.
    pub fn inverse(&self) -> Self {
        let g = metric();
        Self(g * self.0.transpose() * g)
    }

    pub fn is_orthochronous(&self) -> bool {
        self.0[(0, 0)] > 0.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        FourVector::from_vector(self.0 * x.as_vector())
    }

    pub fn max_abs_diff(&self, other: &LorentzMatrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;
    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix(self.0 * rhs.0)
    }
}

impl TryFrom<[[f64; 4]; 4]> for LorentzMatrix {
    type Error = Error;
    fn try_from(rows: [[f64; 4]; 4]) -> Result<Self> {
        if rows.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Self::new(Matrix4::from_fn(|i, j| rows[i][j]))
    }
}

impl From<LorentzMatrix> for [[f64; 4]; 4] {
    fn from(l: LorentzMatrix) -> Self {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = l.0[(i, j)];
            }
        }
        out
    }
}

/// `max |ΛᵀgΛ − g|`, relative to the size of `Λ`.
pub fn lorentz_deviation(m: &Matrix4<f64>) -> f64 {
    let g = metric();
    let d = (m.transpose() * g * m - g).amax();
    d / m.amax().powi(2).max(1.0)
}

/// The four connected components of the Lorentz group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentLabel {
    ProperOrthochronous,
    ImproperOrthochronous,
    ProperAntichronous,
    ImproperAntichronous,
}

pub fn classify_component(l: &LorentzMatrix) -> ComponentLabel {
    match (l.det() > 0.0, l.is_orthochronous()) {
        (true, true) => ComponentLabel::ProperOrthochronous,
        (false, true) => ComponentLabel::ImproperOrthochronous,
        (true, false) => ComponentLabel::ProperAntichronous,
        (false, false) => ComponentLabel::ImproperAntichronous,
    }
}

/// Validates and classifies an arbitrary matrix.
pub fn classify_matrix(m: &Matrix4<f64>) -> Result<ComponentLabel> {
    Ok(classify_component(&LorentzMatrix::new(*m)?))
}

/// Action on points, wedges and characteristic hyperplanes.
pub trait Act<T> {
    fn act(&self, target: &T) -> T;
}

/// `x ↦ γΛx + a` with `γ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct ExtendedPoincareElement {
    gamma: f64,
    lambda: LorentzMatrix,
    a: FourVector,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    #[serde(default = "one")]
    gamma: f64,
    lambda: LorentzMatrix,
    a: FourVector,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<ElementRepr> for ExtendedPoincareElement {
    type Error = Error;
    fn try_from(r: ElementRepr) -> Result<Self> {
        Self::new(r.gamma, r.lambda, r.a)
    }
}

impl From<ExtendedPoincareElement> for ElementRepr {
    fn from(e: ExtendedPoincareElement) -> Self {
        ElementRepr { gamma: e.gamma, lambda: e.lambda, a: e.a }
    }
}

impl ExtendedPoincareElement {
    pub fn new(gamma: f64, lambda: LorentzMatrix, a: FourVector) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameters(format!("dilation factor {gamma} must be positive")));
        }
        Ok(Self { gamma, lambda, a })
    }

    pub fn identity() -> Self {
        Self { gamma: 1.0, lambda: LorentzMatrix::identity(), a: FourVector::zero() }
    }

    /// The dilation `x ↦ γx`.
    pub fn dilation(gamma: f64) -> Result<Self> {
        Self::new(gamma, LorentzMatrix::identity(), FourVector::zero())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn lambda(&self) -> &LorentzMatrix {
        &self.lambda
    }
    pub fn a(&self) -> FourVector {
        self.a
    }

    /// The affine matrix `γΛ`.
    pub fn linear(&self) -> Matrix4<f64> {
        self.lambda.0 * self.gamma
    }

    pub fn inverse(&self) -> Self {
        let li = self.lambda.inverse();
        let a = -(1.0 / self.gamma) * li.apply(&self.a);
        Self { gamma: 1.0 / self.gamma, lambda: li, a }
    }

    /// Largest deviation in `γ`, `Λ` and `a`.
    pub fn max_abs_diff(&self, other: &ExtendedPoincareElement) -> f64 {
        let dg = (self.gamma - other.gamma).abs();
        let dl = self.lambda.max_abs_diff(&other.lambda);
        let da = (self.a - other.a).max_abs();
        dg.max(dl).max(da)
    }
}

impl From<PoincareElement> for ExtendedPoincareElement {
    fn from(p: PoincareElement) -> Self {
        Self { gamma: 1.0, lambda: p.lambda, a: p.a }
    }
}

impl Mul for ExtendedPoincareElement {
    type Output = ExtendedPoincareElement;
    fn mul(self, rhs: ExtendedPoincareElement) -> ExtendedPoincareElement {
        let a = self.a + self.gamma * self.lambda.apply(&rhs.a);
        ExtendedPoincareElement { gamma: self.gamma * rhs.gamma, lambda: self.lambda * rhs.lambda, a }
    }
}

impl Act<FourVector> for ExtendedPoincareElement {
    fn act(&self, x: &FourVector) -> FourVector {
        self.gamma * self.lambda.apply(x) + self.a
    }
}

fn future_direction(v: &FourVector) -> LightlikeDirection {
    let s = v.spatial();
    LightlikeDirection::from_spatial(if v.x0() < 0.0 { -s } else { s })
}

impl Act<Wedge> for ExtendedPoincareElement {
    fn act(&self, w: &Wedge) -> Wedge {
        let m1 = self.lambda.apply(&w.l1().vector());
        let m2 = self.lambda.apply(&w.l2().vector());
        let a = self.act(&w.a());
        let (l1, l2) = if self.lambda.is_orthochronous() {
            (future_direction(&m1), future_direction(&m2))
        } else {
            (future_direction(&m2), future_direction(&m1))
        };
        Wedge::from_directions(l1, l2, a).expect("Lorentz images of distinct generators stay distinct")
    }
}

impl Act<CharacteristicHyperplane> for ExtendedPoincareElement {
    fn act(&self, h: &CharacteristicHyperplane) -> CharacteristicHyperplane {
        // {x·ℓ = p} ↦ {y·Λℓ = γp + a·Λℓ}
        let m = self.lambda.apply(&h.l.vector());
        let mut p = self.gamma * h.p + self.a.dot(&m);
        let mut m = m;
        if m.x0() < 0.0 {
            m = -m;
            p = -p;
        }
        let t = m.x0();
        CharacteristicHyperplane { l: future_direction(&m), p: p / t }
    }
}

/// `(Λ, a)`, acting as `x ↦ Λx + a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct PoincareElement {
    lambda: LorentzMatrix,
    a: FourVector,
}

impl TryFrom<ElementRepr> for PoincareElement {
    type Error = Error;
    fn try_from(r: ElementRepr) -> Result<Self> {
        if (r.gamma - 1.0).abs() > EPS_GEOM {
            return Err(Error::InvalidParameters("Poincaré elements carry gamma = 1".into()));
        }
        Ok(Self { lambda: r.lambda, a: r.a })
    }
}

impl From<PoincareElement> for ElementRepr {
    fn from(e: PoincareElement) -> Self {
        ElementRepr { gamma: 1.0, lambda: e.lambda, a: e.a }
    }
}

impl PoincareElement {
    pub fn new(lambda: LorentzMatrix, a: FourVector) -> Self {
        Self { lambda, a }
    }

    pub(crate) fn from_parts_unchecked(m: Matrix4<f64>, a: FourVector) -> Self {
        Self { lambda: LorentzMatrix(m), a }
    }

    pub fn identity() -> Self {
        Self { lambda: LorentzMatrix::identity(), a: FourVector::zero() }
    }

    pub fn translation(a: FourVector) -> Self {
        Self { lambda: LorentzMatrix::identity(), a }
    }

    pub fn linear(lambda: LorentzMatrix) -> Self {
        Self { lambda, a: FourVector::zero() }
    }

    pub fn lambda(&self) -> &LorentzMatrix {
        &self.lambda
    }

    pub fn a(&self) -> FourVector {
        self.a
    }

    pub fn inverse(&self) -> Self {
        let li = self.lambda.inverse();
        Self { lambda: li, a: -li.apply(&self.a) }
    }

    pub fn is_restricted(&self) -> bool {
        classify_component(&self.lambda) == ComponentLabel::ProperOrthochronous
    }

    pub fn max_abs_diff(&self, other: &PoincareElement) -> f64 {
        self.lambda.max_abs_diff(&other.lambda).max((self.a - other.a).max_abs())
    }

    pub fn extended(&self) -> ExtendedPoincareElement {
        (*self).into()
    }
}

impl Mul for PoincareElement {
    type Output = PoincareElement;
    fn mul(self, rhs: PoincareElement) -> PoincareElement {
        PoincareElement { lambda: self.lambda * rhs.lambda, a: self.a + self.lambda.apply(&rhs.a) }
    }
}

impl<T> Act<T> for PoincareElement
where
    ExtendedPoincareElement: Act<T>,
{
    fn act(&self, target: &T) -> T {
        self.extended().act(target)
    }
}

/// Pure boost along the unit direction `n` with rapidity `s`.
pub fn boost(n: &Vector3<f64>, s: f64) -> LorentzMatrix {
    let n = n.normalize();
    let (sh, ch) = (s.sinh(), s.cosh());
    let mut m = Matrix4::identity();
    m[(0, 0)] = ch;
    for i in 0..3 {
        m[(0, i + 1)] = sh * n[i];
        m[(i + 1, 0)] = sh * n[i];
        for j in 0..3 {
            m[(i + 1, j + 1)] += (ch - 1.0) * n[i] * n[j];
        }
    }
    LorentzMatrix(m)
}

/// Pure boost with `B e₀ ∝ (1, v)`, `|v| < 1`.
pub fn boost_velocity(v: &Vector3<f64>) -> LorentzMatrix {
    let speed = v.norm();
    if speed < 1e-300 {
        return LorentzMatrix::identity();
    }
    boost(&(v / speed), speed.atanh())
}

/// Spatial rotation embedded in the Lorentz group.
pub fn spatial(r: &Matrix3<f64>) -> LorentzMatrix {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
    LorentzMatrix(m)
}

/// Rotation about `axis` by `angle`.
pub fn rotation(axis: &Vector3<f64>, angle: f64) -> LorentzMatrix {
    let r = Rotation3::from_axis_angle(&Unit::new_normalize(*axis), angle);
    spatial(r.matrix())
}

/// The `W_R` boost: `cosh 2πt` on the diagonal and `−sinh 2πt` off it, so that
/// `ℓ₁₊` scales by `e^{−2πt}` and `ℓ₁₋` by `e^{2πt}`.
fn right_boost(t: f64) -> Matrix4<f64> {
    let (s, c) = ((2.0 * PI * t).sinh(), (2.0 * PI * t).cosh());
    let mut m = Matrix4::identity();
    m[(0, 0)] = c;
    m[(1, 1)] = c;
    m[(0, 1)] = -s;
    m[(1, 0)] = -s;
    m
}

/// The one-parameter boost group of a wedge.
pub fn standard_boost(t: f64, w: &Wedge) -> PoincareElement {
    let b = PoincareElement::linear(LorentzMatrix(right_boost(t)));
    if *w == Wedge::right() {
        return b;
    }
    let f = wedge_frame(w);
    f * b * f.inverse()
}

/// Rotation taking `e₁` to the unit vector `m`; a half turn about `e₂` when
/// `m = −e₁`.
fn rotation_from_e1(m: &Vector3<f64>) -> Matrix3<f64> {
    match Rotation3::rotation_between(&Vector3::x(), m) {
        Some(r) => *r.matrix(),
        None => *Rotation3::from_axis_angle(&Vector3::y_axis(), PI).matrix(),
    }
}

/// `λ_W ∈ P₊↑` with `λ_W W_R = W`: rotation, then boost, then edge translation.
pub fn wedge_frame(w: &Wedge) -> PoincareElement {
    let n1 = w.l1().spatial();
    let n2 = w.l2().spatial();
    let b = boost_velocity(&((n1 + n2) / 2.0));
    let back = b.inverse().apply(&w.l1().vector());
    let m = back.spatial().normalize();
    let r = rotation_from_e1(&m);
    PoincareElement { lambda: LorentzMatrix(b.0 * spatial(&r).0), a: w.a() }
}

/// The restricted element `λ_{W₂} λ_{W₁}⁻¹` taking `W₁` to `W₂`.
pub fn transport(w1: &Wedge, w2: &Wedge) -> PoincareElement {
    wedge_frame(w2) * wedge_frame(w1).inverse()
}

/// `diag(−1, −1, 1, 1)`.
pub fn reflection_right() -> LorentzMatrix {
    LorentzMatrix(Matrix4::from_diagonal(&Vector4::new(-1.0, -1.0, 1.0, 1.0)))
}

/// `g_W = λ_W (diag(−1,−1,1,1), 0) λ_W⁻¹`.
pub fn wedge_reflection(w: &Wedge) -> PoincareElement {
    let f = wedge_frame(w);
    let lam = f.lambda * reflection_right() * f.lambda.inverse();
    let a = w.a() - lam.apply(&w.a());
    PoincareElement { lambda: lam, a }
}

/// Symmetric square root `B = √(ΛΛᵀ)` and rotation `R = B⁻¹Λ`.
pub fn boost_rotation_split(l: &LorentzMatrix) -> Result<(LorentzMatrix, LorentzMatrix)> {
    if classify_component(l) != ComponentLabel::ProperOrthochronous {
        return Err(Error::NotRestricted);
    }
    let eig = (l.0 * l.0.transpose()).symmetric_eigen();
    let v = eig.eigenvectors;
    let root = eig.eigenvalues.map(|e| e.max(EIGEN_FLOOR_SQRT).sqrt());
    let b = v * Matrix4::from_diagonal(&root) * v.transpose();
    let b_inv = v * Matrix4::from_diagonal(&root.map(|r| 1.0 / r)) * v.transpose();
    let b = (b + b.transpose()) * 0.5;
    Ok((LorentzMatrix(b), LorentzMatrix(b_inv * l.0)))
}

/// `W[(1, n), (1, −n), 0]`.
fn axis_wedge(n: &Vector3<f64>) -> Wedge {
    Wedge::from_directions(LightlikeDirection::from_spatial(*n), LightlikeDirection::from_spatial(-*n), FourVector::zero())
        .expect("opposite directions are distinct")
}

/// A unit vector orthogonal to `n`, chosen deterministically.
fn orthogonal_unit(n: &Vector3<f64>) -> Vector3<f64> {
    let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
    let pick = axes
        .iter()
        .min_by(|a, b| a.dot(n).abs().partial_cmp(&b.dot(n).abs()).unwrap())
        .unwrap();
    (pick - n * pick.dot(n)).normalize()
}

const TRIVIAL_FACTOR: f64 = 1e-13;

/// Wedges `W₁, …, W₂ₖ` with `g_{W₁}⋯g_{W₂ₖ} = e`, using at most six reflections:
/// two each for the translation, the boost and the rotation of `e = T_a·B·R`.
pub fn factor_into_wedge_reflections(e: &PoincareElement) -> Result<Vec<Wedge>> {
    let (b, r) = boost_rotation_split(&e.lambda)?;
    let mut out = Vec::with_capacity(6);

    let a = e.a;
    if a.max_abs() > TRIVIAL_FACTOR {
        let sp = a.spatial();
        let n = if sp.norm() > TRIVIAL_FACTOR { sp.normalize() } else { Vector3::x() };
        let wn = axis_wedge(&n);
        out.push(wn.translate(0.5 * a));
        out.push(wn);
    }

    let col = Vector3::new(b.0[(1, 0)], b.0[(2, 0)], b.0[(3, 0)]);
    if col.norm() > TRIVIAL_FACTOR {
        let n = col.normalize();
        let rapidity = col.norm().asinh();
        let wm = axis_wedge(&orthogonal_unit(&n));
        let half = PoincareElement::linear(boost(&n, rapidity / 2.0));
        out.push(half.act(&wm));
        out.push(wm);
    }

    let r3: Matrix3<f64> = r.0.fixed_view::<3, 3>(1, 1).into_owned();
    if let Some((axis, angle)) = Rotation3::from_matrix(&r3).axis_angle() {
        if angle.abs() > TRIVIAL_FACTOR {
            let n = orthogonal_unit(&axis);
            let m = Rotation3::from_axis_angle(&axis, angle / 2.0) * n;
            out.push(axis_wedge(&m));
            out.push(axis_wedge(&n));
        }
    }
    Ok(out)
}

/// Product `g_{W₁}⋯g_{Wₙ}`.
pub fn reflection_product(ws: &[Wedge]) -> PoincareElement {
    ws.iter().fold(PoincareElement::identity(), |acc, w| acc * wedge_reflection(w))
}

/// Result of conjugating a lightlike translation by a wedge boost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorchersReport {
    pub element: PoincareElement,
    pub expected: PoincareElement,
    pub deviation: f64,
}

/// `B_W(t)·(1, ℓ)·B_W(t)⁻¹`, compared with `(1, e^{∓2πt}ℓ)`.
///
/// The sign is `−` when `W + ℓ ⊂ W` (ℓ along the first generator) and `+`
/// when `W − ℓ ⊂ W`.
pub fn borchers_conjugate(t: f64, l: &LightlikeDirection, w: &Wedge) -> Result<BorchersReport> {
    let factor = if l.is_parallel(&w.l1(), EPS_GEOM) {
        (-2.0 * PI * t).exp()
    } else if l.is_parallel(&w.l2(), EPS_GEOM) {
        (2.0 * PI * t).exp()
    } else {
        return Err(Error::NotCharacteristicDirection);
    };
    let b = standard_boost(t, w);
    let element = b * PoincareElement::translation(l.vector()) * b.inverse();
    let expected = PoincareElement::translation(factor * l.vector());
    Ok(BorchersReport { element, expected, deviation: element.max_abs_diff(&expected) })
}

/// Solves `a(Λ) = (1 − Λ)a` for `a`.
pub fn solve_cocycle(l: &LorentzMatrix, a_of_l: &FourVector) -> Result<FourVector> {
    let m = Matrix4::identity() - l.0;
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= COCYCLE_COND_MAX) {
        return Err(Error::SingularOneMinusLambda(cond));
    }
    let x = svd.solve(a_of_l.as_vector(), 0.0).map_err(|_| Error::SingularOneMinusLambda(cond))?;
    FourVector::try_from_vector(x)
}

/// Outcome of the paired-net bookkeeping for `Â(W) = A(W) ⊗ A(−N(W))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedNetReport {
    /// `(g_{W₀}W, g_{N(W₀)}(−N(W)))` is again of the form `(V, −N(V))`.
    pub reflection_consistent: bool,
    pub reflection_max_deviation: f64,
    pub probes: usize,
    /// Second component transported by the inverse boost, `λ_R(−t)(−N(W))`.
    pub flow_second: Wedge,
    /// Second component demanded by covariance, `−N(λ_R(t)W)`.
    pub flow_expected: Wedge,
    pub flow_agrees: bool,
}

/// `−N(W) = N(W)′`.
pub fn negated_origin_edge(w: &Wedge) -> Wedge {
    w.origin_edge().causal_complement()
}

fn paired_net_probes() -> Vec<Wedge> {
    let v = FourVector::new;
    let lp = |x: f64, y: f64, z: f64| v(1.0, x, y, z);
    let mk = |l1: FourVector, l2: FourVector, a: FourVector| crate::minkowski::make_wedge(l1, l2, a).unwrap();
    vec![
        Wedge::right(),
        Wedge::right().translate(v(0.0, 0.0, 1.0, 0.0)),
        mk(lp(0.0, 1.0, 0.0), lp(0.0, -1.0, 0.0), v(1.0, 0.0, 0.0, 0.0)),
        mk(lp(0.0, 0.0, 1.0), lp(-1.0, 0.0, 0.0), v(0.0, 1.0, 2.0, 0.0)),
        mk(lp(0.6, 0.8, 0.0), lp(0.0, 0.6, -0.8), v(0.5, -1.0, 0.25, 3.0)),
    ]
}

pub fn paired_net_flow_check(w: &Wedge, t: f64) -> PairedNetReport {
    let second = negated_origin_edge(w);
    let mut dev: f64 = 0.0;
    let probes = paired_net_probes();
    for w0 in &probes {
        let g = wedge_reflection(w0);
        let gn = wedge_reflection(&w0.origin_edge());
        let first = g.act(w);
        let image = gn.act(&second);
        dev = dev.max(image.distance(&negated_origin_edge(&first)));
    }
    let boost_r = |s: f64| standard_boost(s, &Wedge::right());
    let moved = boost_r(t).act(w);
    let flow_second = boost_r(-t).act(&second);
    let flow_expected = negated_origin_edge(&moved);
    PairedNetReport {
        reflection_consistent: dev <= EPS_GEOM,
        reflection_max_deviation: dev,
        probes: probes.len(),
        flow_agrees: flow_second.approx_eq(&flow_expected, EPS_GEOM),
        flow_second,
        flow_expected,
    }
}
