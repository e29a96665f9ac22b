//! Wedges, characteristic half-spaces and characteristic families in
//! Minkowski space with metric `g = diag(1, −1, −1, −1)`.
//!
//! A wedge `W[ℓ₁, ℓ₂, a]` is the open set `{x : x·ℓ₂ > a·ℓ₂, x·ℓ₁ < a·ℓ₁}`
//! for future-directed lightlike `ℓ₁`, `ℓ₂` that are not parallel. The right
//! wedge `W_R = {x₁ > |x₀|}` is `W[ℓ₁₊, ℓ₁₋, 0]`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poincare::{transport, Act, PoincareElement};
use crate::tolerances::{EPS_GEOM, EPS_STRICT};

/// The Minkowski metric `diag(1, −1, −1, −1)`.
pub fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// A point or displacement in ℝ⁴.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct FourVector(Vector4<f64>);

impl FourVector {
    /// Builds a vector from coordinates.
    ///
    /// # Panics
    /// Panics on NaN or infinite input; use [`FourVector::try_new`] for
    /// fallible construction.
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self::try_new(x0, x1, x2, x3).expect("FourVector coordinates must be finite")
    }

    pub fn try_new(x0: f64, x1: f64, x2: f64, x3: f64) -> Result<Self> {
        Self::try_from_vector(Vector4::new(x0, x1, x2, x3))
    }

    pub fn try_from_vector(v: Vector4<f64>) -> Result<Self> {
        if v.iter().all(|c| c.is_finite()) {
            Ok(Self(v))
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Wraps a vector produced by internal arithmetic.
    pub(crate) fn from_vector(v: Vector4<f64>) -> Self {
        Self(v)
    }

    pub fn zero() -> Self {
        Self(Vector4::zeros())
    }

    /// Unit vector along coordinate axis `i`.
    pub fn basis(i: usize) -> Self {
        let mut v = Vector4::zeros();
        v[i] = 1.0;
        Self(v)
    }

    pub fn x0(&self) -> f64 {
        self.0[0]
    }
    pub fn x1(&self) -> f64 {
        self.0[1]
    }
    pub fn x2(&self) -> f64 {
        self.0[2]
    }
    pub fn x3(&self) -> f64 {
        self.0[3]
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    /// Minkowski product `x·y = x₀y₀ − x₁y₁ − x₂y₂ − x₃y₃`.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.0[0] * other.0[0] - self.0[1] * other.0[1] - self.0[2] * other.0[2] - self.0[3] * other.0[3]
    }

    /// Minkowski square `x·x`.
    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Spatial part `(x₁, x₂, x₃)`.
    pub fn spatial(&self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }
}

impl TryFrom<[f64; 4]> for FourVector {
    type Error = Error;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        Self::try_new(a[0], a[1], a[2], a[3])
    }
}

impl From<FourVector> for [f64; 4] {
    fn from(v: FourVector) -> Self {
        v.to_array()
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 + rhs.0)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 - rhs.0)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(-self.0)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, rhs: FourVector) -> FourVector {
        FourVector(rhs.0 * self)
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// A future-directed lightlike direction normalized to time component 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FourVector", into = "FourVector")]
pub struct LightlikeDirection(FourVector);

impl LightlikeDirection {
    /// Normalizes a future-directed lightlike vector to `(1, n)` with `|n| = 1`.
    pub fn new(v: FourVector) -> Result<Self> {
        let t = v.x0();
        let n = v.spatial();
        let scale = t.abs().max(n.norm());
        if scale == 0.0 {
            return Err(Error::NotLightlike(0.0));
        }
        let rel = v.square() / (scale * scale);
        if rel.abs() > EPS_GEOM {
            return Err(Error::NotLightlike(rel));
        }
        if t <= 0.0 {
            return Err(Error::PastDirected);
        }
        Ok(Self::from_spatial(n))
    }

    /// Direction `(1, n/|n|)` for a nonzero spatial vector `n`.
    pub fn from_spatial(n: nalgebra::Vector3<f64>) -> Self {
        let u = n / n.norm();
        Self(FourVector::new(1.0, u[0], u[1], u[2]))
    }

    /// `ℓ₁₊ = (1, 1, 0, 0)`.
    pub fn l1p() -> Self {
        Self(FourVector::new(1.0, 1.0, 0.0, 0.0))
    }
    /// `ℓ₁₋ = (1, −1, 0, 0)`.
    pub fn l1m() -> Self {
        Self(FourVector::new(1.0, -1.0, 0.0, 0.0))
    }
    /// `ℓ₂₊ = (1, 0, 1, 0)`.
    pub fn l2p() -> Self {
        Self(FourVector::new(1.0, 0.0, 1.0, 0.0))
    }
    /// `ℓ₂₋ = (1, 0, −1, 0)`.
    pub fn l2m() -> Self {
        Self(FourVector::new(1.0, 0.0, -1.0, 0.0))
    }
    /// `ℓ₃₊ = (1, 0, 0, 1)`.
    pub fn l3p() -> Self {
        Self(FourVector::new(1.0, 0.0, 0.0, 1.0))
    }
    /// `ℓ₃₋ = (1, 0, 0, −1)`.
    pub fn l3m() -> Self {
        Self(FourVector::new(1.0, 0.0, 0.0, -1.0))
    }

    pub fn vector(&self) -> FourVector {
        self.0
    }

    /// Unit spatial direction.
    pub fn spatial(&self) -> nalgebra::Vector3<f64> {
        self.0.spatial()
    }

    pub fn is_parallel(&self, other: &LightlikeDirection, tol: f64) -> bool {
        (self.spatial() - other.spatial()).amax() <= tol
    }
}

impl TryFrom<FourVector> for LightlikeDirection {
    type Error = Error;
    fn try_from(v: FourVector) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LightlikeDirection> for FourVector {
    fn from(l: LightlikeDirection) -> Self {
        l.0
    }
}

/// A wedge `W[ℓ₁, ℓ₂, a]` in canonical form.
///
/// The edge point `a` is the point of the edge plane closest to the origin in
/// the Euclidean norm, so equal point sets have equal fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WedgeRepr", into = "WedgeRepr")]
pub struct Wedge {
    l1: LightlikeDirection,
    l2: LightlikeDirection,
    a: FourVector,
}

#[derive(Serialize, Deserialize)]
struct WedgeRepr {
    l1: FourVector,
    l2: FourVector,
    a: FourVector,
}

impl TryFrom<WedgeRepr> for Wedge {
    type Error = Error;
    fn try_from(r: WedgeRepr) -> Result<Self> {
        make_wedge(r.l1, r.l2, r.a)
    }
}

impl From<Wedge> for WedgeRepr {
    fn from(w: Wedge) -> Self {
        WedgeRepr { l1: w.l1.vector(), l2: w.l2.vector(), a: w.a }
    }
}

/// Builds the canonical wedge `W[l1, l2, a]`.
pub fn make_wedge(l1: FourVector, l2: FourVector, a: FourVector) -> Result<Wedge> {
    Wedge::from_directions(LightlikeDirection::new(l1)?, LightlikeDirection::new(l2)?, a)
}

impl Wedge {
    pub fn from_directions(l1: LightlikeDirection, l2: LightlikeDirection, a: FourVector) -> Result<Self> {
        if l1.is_parallel(&l2, EPS_GEOM) {
            return Err(Error::ParallelGenerators);
        }
        if !a.as_vector().iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { l1, l2, a: canonical_edge_point(&l1, &l2, a.dot(&l1.vector()), a.dot(&l2.vector())) })
    }

    /// `W_R = {x₁ > |x₀|}`.
    pub fn right() -> Self {
        Self { l1: LightlikeDirection::l1p(), l2: LightlikeDirection::l1m(), a: FourVector::zero() }
    }

    pub fn l1(&self) -> LightlikeDirection {
        self.l1
    }
    pub fn l2(&self) -> LightlikeDirection {
        self.l2
    }
    pub fn a(&self) -> FourVector {
        self.a
    }

    /// Offsets `(a·ℓ₁, a·ℓ₂)` of the two boundary hyperplanes.
    pub fn offsets(&self) -> (f64, f64) {
        (self.a.dot(&self.l1.vector()), self.a.dot(&self.l2.vector()))
    }

    /// `W + v`.
    pub fn translate(&self, v: FourVector) -> Wedge {
        Wedge::from_directions(self.l1, self.l2, self.a + v).expect("generators already validated")
    }

    pub fn contains_point(&self, x: &FourVector) -> bool {
        self.contains_point_with(x, EPS_STRICT)
    }

    /// Membership with an explicit margin on both strict inequalities.
    pub fn contains_point_with(&self, x: &FourVector, eps: f64) -> bool {
        let (p1, p2) = self.offsets();
        x.dot(&self.l2.vector()) > p2 + eps && x.dot(&self.l1.vector()) < p1 - eps
    }

    /// The causal complement `W′ = W[ℓ₂, ℓ₁, a]`.
    pub fn causal_complement(&self) -> Wedge {
        Wedge { l1: self.l2, l2: self.l1, a: self.a }
    }

    /// Field-wise comparison of canonical data.
    pub fn approx_eq(&self, other: &Wedge, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Largest deviation between canonical fields, relative to the edge scale.
    pub fn distance(&self, other: &Wedge) -> f64 {
        let dl1 = (self.l1.vector().as_vector() - other.l1.vector().as_vector()).amax();
        let dl2 = (self.l2.vector().as_vector() - other.l2.vector().as_vector()).amax();
        let scale = 1.0 + self.a.max_abs().max(other.a.max_abs());
        let da = (self.a.as_vector() - other.a.as_vector()).amax() / scale;
        dl1.max(dl2).max(da)
    }

    /// Linear inequalities `Aᵢ·x < bᵢ` (Euclidean products) describing the wedge.
    pub fn halfspace_rows(&self) -> [([f64; 4], f64); 2] {
        let (p1, p2) = self.offsets();
        let g1 = lowered(&self.l1.vector());
        let g2 = lowered(&self.l2.vector());
        // x·ℓ₂ > p₂  ⇔  −(gℓ₂)ᵀx < −p₂ ;  x·ℓ₁ < p₁  ⇔  (gℓ₁)ᵀx < p₁
        [([-g2[0], -g2[1], -g2[2], -g2[3]], -p2), (g1, p1)]
    }

    /// `N(W)`: the coherent translate of `W` whose edge contains the origin.
    pub fn origin_edge(&self) -> Wedge {
        Wedge { l1: self.l1, l2: self.l2, a: FourVector::zero() }
    }
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W[{}, {}, {}]", self.l1.vector(), self.l2.vector(), self.a)
    }
}

/// `g x`, turning Minkowski products into Euclidean ones.
pub(crate) fn lowered(x: &FourVector) -> [f64; 4] {
    [x[0], -x[1], -x[2], -x[3]]
}

/// The point `c₁ gℓ₁ + c₂ gℓ₂` with prescribed products `x·ℓ₁ = p1`, `x·ℓ₂ = p2`.
///
/// It is the Euclidean projection of any point with these products onto
/// `span{gℓ₁, gℓ₂}`, hence the minimal-norm point of the edge plane.
fn canonical_edge_point(l1: &LightlikeDirection, l2: &LightlikeDirection, p1: f64, p2: f64) -> FourVector {
    let s = 1.0 + l1.spatial().dot(&l2.spatial());
    let det = 4.0 - s * s;
    let c1 = (2.0 * p1 - s * p2) / det;
    let c2 = (2.0 * p2 - s * p1) / det;
    let g1 = lowered(&l1.vector());
    let g2 = lowered(&l2.vector());
    let v = Vector4::from_fn(|i, _| c1 * g1[i] + c2 * g2[i]);
    FourVector::from_vector(v)
}

/// Sign of a characteristic half-space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// `H_p[ℓ]^± = {x : ±(x·ℓ − p) > 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicHalfSpace {
    pub l: LightlikeDirection,
    pub p: f64,
    pub sign: Sign,
}

impl CharacteristicHalfSpace {
    pub fn contains(&self, x: &FourVector) -> bool {
        let v = x.dot(&self.l.vector()) - self.p;
        match self.sign {
            Sign::Plus => v > 0.0,
            Sign::Minus => v < 0.0,
        }
    }

    pub fn boundary(&self) -> CharacteristicHyperplane {
        CharacteristicHyperplane { l: self.l, p: self.p }
    }
}

/// `H_p[ℓ] = {x : x·ℓ = p}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicHyperplane {
    pub l: LightlikeDirection,
    pub p: f64,
}

impl CharacteristicHyperplane {
    pub fn new(l: LightlikeDirection, p: f64) -> Self {
        Self { l, p }
    }

    /// The hyperplane with normal `ℓ` through `x`.
    pub fn through(l: LightlikeDirection, x: &FourVector) -> Self {
        Self { l, p: x.dot(&l.vector()) }
    }

    pub fn contains(&self, x: &FourVector, tol: f64) -> bool {
        (x.dot(&self.l.vector()) - self.p).abs() <= tol
    }

    pub fn approx_eq(&self, other: &CharacteristicHyperplane, tol: f64) -> bool {
        self.l.is_parallel(&other.l, tol) && (self.p - other.p).abs() <= tol * (1.0 + self.p.abs())
    }
}

/// Which generator a characteristic family translates along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyDirection {
    /// `{W + λℓ₂}`, sweeping `H⁺`.
    Plus,
    /// `{W + λℓ₁}`, sweeping `H⁻`.
    Minus,
}

/// The chain `{W + λℓ : λ ∈ ℝ}` along one generator of `base`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicFamily {
    pub base: Wedge,
    pub direction: FamilyDirection,
}

impl CharacteristicFamily {
    pub fn generator(&self) -> LightlikeDirection {
        match self.direction {
            FamilyDirection::Plus => self.base.l2,
            FamilyDirection::Minus => self.base.l1,
        }
    }

    pub fn member(&self, lambda: f64) -> Wedge {
        self.base.translate(lambda * self.generator().vector())
    }

    /// The half-space swept by the family.
    pub fn union(&self) -> CharacteristicHalfSpace {
        let (p1, p2) = self.base.offsets();
        match self.direction {
            FamilyDirection::Plus => CharacteristicHalfSpace { l: self.base.l2, p: p2, sign: Sign::Plus },
            FamilyDirection::Minus => CharacteristicHalfSpace { l: self.base.l1, p: p1, sign: Sign::Minus },
        }
    }
}

/// Generating half-spaces and characteristic families of a wedge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicData {
    pub h_plus: CharacteristicHalfSpace,
    pub h_minus: CharacteristicHalfSpace,
    pub f_plus: CharacteristicFamily,
    pub f_minus: CharacteristicFamily,
}

pub fn characteristic_data(w: &Wedge) -> CharacteristicData {
    let f_plus = CharacteristicFamily { base: *w, direction: FamilyDirection::Plus };
    let f_minus = CharacteristicFamily { base: *w, direction: FamilyDirection::Minus };
    CharacteristicData { h_plus: f_plus.union(), h_minus: f_minus.union(), f_plus, f_minus }
}

/// `W₁ ⊂ W₂`: equal generators and nested offsets.
pub fn is_subset(w1: &Wedge, w2: &Wedge) -> bool {
    if !(w1.l1.is_parallel(&w2.l1, EPS_GEOM) && w1.l2.is_parallel(&w2.l2, EPS_GEOM)) {
        return false;
    }
    let (p1, p2) = w1.offsets();
    let (q1, q2) = w2.offsets();
    let tol = EPS_GEOM * (1.0 + w1.a.max_abs().max(w2.a.max_abs()));
    p2 >= q2 - tol && p1 <= q1 + tol
}

/// `W₁ ⊂ W₂′`.
pub fn is_spacelike_separated(w1: &Wedge, w2: &Wedge) -> bool {
    is_subset(w1, &w2.causal_complement())
}

/// The relative position of a pair after transporting the first wedge to `W_R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum PairForm {
    /// Second wedge is `W[ℓ₂₊, ℓ, d]`, with `ℓ = (1, a, b, c)`.
    Primary { l: LightlikeDirection, d: FourVector },
    /// Second wedge is `W_R + d`.
    Coherent,
    /// Second wedge is `W_R′ + d`.
    CoherentComplement { d: FourVector },
}

fn parallel_to_axis1(l: &LightlikeDirection) -> bool {
    l.is_parallel(&LightlikeDirection::l1p(), EPS_GEOM) || l.is_parallel(&LightlikeDirection::l1m(), EPS_GEOM)
}

/// Element of the invariance group of `W_R` (boost along and rotation about
/// the 1-axis) taking `l` to `ℓ₂₊`.
fn inv_to_l2p(l: &LightlikeDirection) -> PoincareElement {
    let n = l.spatial();
    let (p, q, r) = (n[0], n[1], n[2]);
    let gamma = 1.0 / (1.0 - p * p).sqrt();
    let mut boost = Matrix4::identity();
    boost[(0, 0)] = gamma;
    boost[(1, 1)] = gamma;
    boost[(0, 1)] = -gamma * p;
    boost[(1, 0)] = -gamma * p;
    let phi = -r.atan2(q);
    let (s, c) = phi.sin_cos();
    let mut rot = Matrix4::identity();
    rot[(2, 2)] = c;
    rot[(2, 3)] = -s;
    rot[(3, 2)] = s;
    rot[(3, 3)] = c;
    PoincareElement::from_parts_unchecked(rot * boost, FourVector::zero())
}

/// Normal form of `(w1, w2)` with `w1` moved to `W_R`.
pub(crate) fn pair_normal_form(w1: &Wedge, w2: &Wedge) -> PairForm {
    let to_right = transport(w1, &Wedge::right());
    let v = to_right.act(w2);
    let (m1, m2) = (v.l1, v.l2);
    match (parallel_to_axis1(&m1), parallel_to_axis1(&m2)) {
        (true, true) => {
            if m1.is_parallel(&LightlikeDirection::l1p(), EPS_GEOM) {
                PairForm::Coherent
            } else {
                PairForm::CoherentComplement { d: v.a }
            }
        }
        (false, _) => {
            let u = inv_to_l2p(&m1).act(&v);
            PairForm::Primary { l: u.l2, d: u.a }
        }
        (true, false) => {
            let u = inv_to_l2p(&m2).act(&v);
            // diag(−1, 1, −1, −1) preserves W_R and swaps the generator slots.
            let rt = PoincareElement::from_parts_unchecked(
                Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, -1.0, -1.0)),
                FourVector::zero(),
            );
            let u = rt.act(&u);
            PairForm::Primary { l: u.l2, d: u.a }
        }
    }
}

fn primary_coefficients(l: &LightlikeDirection, d: &FourVector) -> (f64, f64, f64, f64, f64) {
    let n = l.spatial();
    let (a, b, c) = (n[0], n[1], n[2]);
    let k = (1.0 - b) * d.x0() - a * d.x1();
    let tol = EPS_GEOM * (1.0 + d.max_abs());
    (a, b, c, k, tol)
}

fn primary_disjoint(l: &LightlikeDirection, d: &FourVector) -> bool {
    let (a, b, c, k, tol) = primary_coefficients(l, d);
    c.abs() <= EPS_GEOM && b >= -EPS_GEOM && b < 1.0 && a > 0.0 && k >= -tol
}

/// Whether `W₁ ∩ W₂ = ∅`.
pub fn are_disjoint(w1: &Wedge, w2: &Wedge) -> bool {
    match pair_normal_form(w1, w2) {
        PairForm::Primary { l, d } => primary_disjoint(&l, &d),
        PairForm::Coherent => false,
        PairForm::CoherentComplement { d } => {
            let p = d.dot(&LightlikeDirection::l1p().vector());
            let q = d.dot(&LightlikeDirection::l1m().vector());
            let tol = EPS_GEOM * (1.0 + d.max_abs());
            p >= -tol || q <= tol
        }
    }
}

/// Whether two disjoint wedges form a maximal pair: neither can be enlarged
/// while staying disjoint from the other.
pub fn is_maximal_pair(w1: &Wedge, w2: &Wedge) -> Result<bool> {
    if !are_disjoint(w1, w2) {
        return Err(Error::NotDisjoint);
    }
    Ok(match pair_normal_form(w1, w2) {
        PairForm::Primary { l, d } => {
            let (_, b, _, k, tol) = primary_coefficients(&l, &d);
            b > EPS_GEOM && k.abs() <= tol
        }
        PairForm::Coherent => unreachable!("coherent translates always intersect"),
        // one of the two one-sided relaxations of W stays disjoint from W′ + d
        PairForm::CoherentComplement { .. } => false,
    })
}

/// Image of a wedge under `P(x) = (x₀, x₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HalfPlaneOrAll {
    All,
    /// `{y ∈ ℝ² : normal·y > offset}`.
    HalfPlane { normal: [f64; 2], offset: f64 },
}

impl HalfPlaneOrAll {
    pub fn contains(&self, y: [f64; 2]) -> bool {
        match self {
            HalfPlaneOrAll::All => true,
            HalfPlaneOrAll::HalfPlane { normal, offset } => normal[0] * y[0] + normal[1] * y[1] > *offset,
        }
    }
}

/// Projection of a wedge `W[ℓ₂₊, ℓ, d]` onto the `(x₀, x₁)` plane.
pub fn project_time_x1(w: &Wedge) -> Result<HalfPlaneOrAll> {
    if !w.l1.is_parallel(&LightlikeDirection::l2p(), EPS_GEOM) {
        return Err(Error::NotNormalForm);
    }
    let n = w.l2.spatial();
    let (a, b, c) = (n[0], n[1], n[2]);
    if b < 0.0 || c.abs() > EPS_GEOM {
        return Ok(HalfPlaneOrAll::All);
    }
    let normal = [1.0 - b, -a];
    let offset = normal[0] * w.a.x0() + normal[1] * w.a.x1();
    Ok(HalfPlaneOrAll::HalfPlane { normal, offset })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x0: f64, x1: f64, x2: f64, x3: f64) -> FourVector {
        FourVector::new(x0, x1, x2, x3)
    }

    fn wr() -> Wedge {
        Wedge::right()
    }

    fn w(l1: FourVector, l2: FourVector, a: FourVector) -> Wedge {
        make_wedge(l1, l2, a).unwrap()
    }

    #[test]
    fn make_wedge_right() {
        let w = w(v(1.0, 1.0, 0.0, 0.0), v(1.0, -1.0, 0.0, 0.0), FourVector::zero());
        assert_eq!(w, wr());
        assert!(w.contains_point(&v(0.0, 2.0, 0.0, 0.0)));
        assert!(!w.contains_point(&v(2.0, 1.0, 0.0, 0.0)));
    }

    #[test]
    fn make_wedge_scale_invariant() {
        let w = w(v(2.0, 2.0, 0.0, 0.0), v(3.0, -3.0, 0.0, 0.0), FourVector::zero());
        assert!(w.approx_eq(&wr(), EPS_GEOM));
    }

    #[test]
    fn make_wedge_edge_shift_is_absorbed() {
        // (0,0,5,7) lies in the edge plane of W_R, which already contains the origin.
        let w = w(v(1.0, 1.0, 0.0, 0.0), v(1.0, -1.0, 0.0, 0.0), v(0.0, 0.0, 5.0, 7.0));
        assert!(w.approx_eq(&wr(), EPS_GEOM));
        assert!(w.a().max_abs() < 1e-15);
    }

    #[test]
    fn make_wedge_minimal_norm_point() {
        // Independent check: minimize |a + s·e| over the edge directions by brute force.
        let w = w(v(1.0, 0.6, 0.8, 0.0), v(1.0, 0.0, 0.0, 1.0), v(0.3, -1.0, 2.0, 0.5));
        let (p1, p2) = w.offsets();
        let raw = v(0.3, -1.0, 2.0, 0.5);
        assert!((p1 - raw.dot(&w.l1().vector())).abs() < 1e-12);
        assert!((p2 - raw.dot(&w.l2().vector())).abs() < 1e-12);
        let a = w.a();
        // a must be orthogonal (Euclidean) to the edge directions.
        let e = edge_basis(&w);
        for d in e {
            let dot: f64 = (0..4).map(|i| a[i] * d[i]).sum();
            assert!(dot.abs() < 1e-12);
        }
    }

    fn edge_basis(w: &Wedge) -> Vec<[f64; 4]> {
        let g1 = lowered(&w.l1().vector());
        let g2 = lowered(&w.l2().vector());
        let m = nalgebra::Matrix2x4::from_row_slice(&[g1[0], g1[1], g1[2], g1[3], g2[0], g2[1], g2[2], g2[3]]);
        let svd = m.transpose().svd(true, false);
        let u = svd.u.unwrap();
        let full = nalgebra::Matrix4::from_fn(|i, j| if j < 2 { u[(i, j)] } else { 0.0 });
        let mut out = Vec::new();
        for k in 0..4 {
            let mut e = [0.0; 4];
            e[k] = 1.0;
            let mut r = nalgebra::Vector4::from(e);
            for j in 0..2 {
                let c = full.column(j).dot(&r);
                r -= full.column(j) * c;
            }
            if r.norm() > 1e-6 {
                out.push([r[0], r[1], r[2], r[3]]);
            }
        }
        out
    }

    #[test]
    fn make_wedge_errors() {
        assert_eq!(
            make_wedge(v(1.0, 0.5, 0.0, 0.0), v(1.0, -1.0, 0.0, 0.0), FourVector::zero()),
            Err(Error::NotLightlike(0.75 / 1.0))
        );
        assert_eq!(
            make_wedge(v(-1.0, 1.0, 0.0, 0.0), v(1.0, -1.0, 0.0, 0.0), FourVector::zero()),
            Err(Error::PastDirected)
        );
        assert_eq!(
            make_wedge(v(1.0, 1.0, 0.0, 0.0), v(2.0, 2.0, 0.0, 0.0), FourVector::zero()),
            Err(Error::ParallelGenerators)
        );
        assert_eq!(FourVector::try_new(f64::NAN, 0.0, 0.0, 0.0), Err(Error::NonFinite));
    }

    #[test]
    fn contains_point_examples() {
        assert!(wr().contains_point(&v(0.0, 1.0, 0.0, 0.0)));
        assert!(!wr().contains_point(&v(0.0, -1.0, 0.0, 0.0)));
        assert!(wr().contains_point(&v(0.5, 0.7, 9.0, -3.0)));
        // boundary points are not members
        assert!(!wr().contains_point(&v(1.0, 1.0, 0.0, 0.0)));
        assert!(!wr().contains_point(&FourVector::zero()));
    }

    #[test]
    fn complement_examples() {
        let c = wr().causal_complement();
        assert!(c.contains_point(&v(0.0, -1.0, 0.0, 0.0)));
        assert!(c.contains_point(&v(0.3, -0.5, 4.0, 1.0)));
        assert!(!c.contains_point(&v(0.0, 1.0, 0.0, 0.0)));
        let w23 = Wedge::from_directions(LightlikeDirection::l2p(), LightlikeDirection::l3p(), FourVector::zero()).unwrap();
        let w32 = Wedge::from_directions(LightlikeDirection::l3p(), LightlikeDirection::l2p(), FourVector::zero()).unwrap();
        assert_eq!(w23.causal_complement(), w32);
        let shifted = wr().translate(v(0.0, 0.0, 1.0, 0.0));
        assert!(shifted.causal_complement().approx_eq(&wr().causal_complement().translate(v(0.0, 0.0, 1.0, 0.0)), 1e-12));
        assert_eq!(shifted.causal_complement().causal_complement(), shifted);
    }

    #[test]
    fn subset_examples() {
        let l1p = LightlikeDirection::l1p().vector();
        assert!(is_subset(&wr().translate(l1p), &wr()));
        assert!(is_subset(&wr(), &wr()));
        let shifted = wr().translate(v(0.0, -1.0, 0.0, 0.0));
        assert!(!is_subset(&shifted, &wr()));
        // witness: a point of the shifted wedge outside W_R
        let x = v(0.0, -0.5, 0.0, 0.0);
        assert!(shifted.contains_point(&x) && !wr().contains_point(&x));
    }

    #[test]
    fn disjoint_examples() {
        let l = v(1.0, 0.6, 0.8, 0.0);
        let l2p = LightlikeDirection::l2p().vector();
        assert!(are_disjoint(&wr(), &wr().causal_complement()));
        assert!(are_disjoint(&wr(), &w(l2p, l, FourVector::zero())));
        assert!(are_disjoint(&wr(), &w(l2p, l, v(0.0, -1.0, 0.0, 0.0))));
        assert!(!are_disjoint(&wr(), &wr().translate(v(3.0, 1.0, 0.0, 0.0))));
    }

    #[test]
    fn maximal_examples() {
        let l = v(1.0, 0.6, 0.8, 0.0);
        let l2p = LightlikeDirection::l2p().vector();
        assert_eq!(is_maximal_pair(&wr(), &w(l2p, l, FourVector::zero())), Ok(true));
        assert_eq!(is_maximal_pair(&wr(), &w(l2p, l, v(0.0, -1.0, 0.0, 0.0))), Ok(false));
        assert_eq!(is_maximal_pair(&wr(), &w(l2p, v(1.0, 1.0, 0.0, 0.0), FourVector::zero())), Ok(false));
        assert_eq!(is_maximal_pair(&wr(), &wr().causal_complement()), Ok(false));
        assert_eq!(is_maximal_pair(&wr(), &wr()), Err(Error::NotDisjoint));
    }

    #[test]
    fn projection_examples() {
        let l2p = LightlikeDirection::l2p().vector();
        match project_time_x1(&w(l2p, v(1.0, 0.6, 0.8, 0.0), FourVector::zero())).unwrap() {
            HalfPlaneOrAll::HalfPlane { normal, offset } => {
                assert!((normal[0] - 0.2).abs() < 1e-12 && (normal[1] + 0.6).abs() < 1e-12);
                assert!(offset.abs() < 1e-12);
            }
            HalfPlaneOrAll::All => panic!("expected a half-plane"),
        }
        assert_eq!(project_time_x1(&w(l2p, v(1.0, 0.0, -1.0, 0.0), FourVector::zero())), Ok(HalfPlaneOrAll::All));
        assert_eq!(project_time_x1(&w(l2p, v(1.0, 0.6, 0.0, 0.8), FourVector::zero())), Ok(HalfPlaneOrAll::All));
        assert_eq!(project_time_x1(&wr()), Err(Error::NotNormalForm));
    }

    #[test]
    fn characteristic_data_examples() {
        let d = characteristic_data(&wr());
        assert_eq!(d.h_plus.l, LightlikeDirection::l1m());
        assert_eq!(d.h_plus.sign, Sign::Plus);
        assert_eq!(d.h_plus.p, 0.0);
        assert_eq!(d.h_minus.l, LightlikeDirection::l1p());
        assert_eq!(d.h_minus.sign, Sign::Minus);

        let d = characteristic_data(&wr().translate(v(0.0, 0.0, 4.0, 0.0)));
        assert_eq!(d.h_plus.p, 0.0);
        assert_eq!(d.h_minus.p, 0.0);

        let d = characteristic_data(&wr().translate(LightlikeDirection::l1p().vector()));
        assert!(d.h_minus.p.abs() < 1e-12);
        assert!((d.h_plus.p - 2.0).abs() < 1e-12);
    }

    #[test]
    fn family_members_are_ordered() {
        let f = characteristic_data(&wr()).f_plus;
        for i in -3..3 {
            let a = f.member(i as f64);
            let b = f.member(i as f64 + 1.0);
            assert!(is_subset(&a, &b) || is_subset(&b, &a));
        }
    }

    #[test]
    fn spacelike_separation_examples() {
        assert!(is_spacelike_separated(&wr().translate(v(0.0, 2.0, 0.0, 0.0)), &wr().causal_complement()));
        assert!(!is_spacelike_separated(&wr(), &wr()));
        let l2p = LightlikeDirection::l2p().vector();
        let w2 = w(l2p, v(1.0, 0.6, 0.8, 0.0), FourVector::zero());
        assert!(are_disjoint(&w2, &wr()));
        assert!(!is_spacelike_separated(&w2, &wr()));
    }

    #[test]
    fn json_round_trip() {
        let w = w(v(1.0, 0.6, 0.8, 0.0), v(1.0, 0.0, 0.0, 1.0), v(0.3, -1.0, 2.0, 0.5));
        let s = serde_json::to_string(&w).unwrap();
        let back: Wedge = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&w, 1e-12));
        assert!(serde_json::from_str::<Wedge>(r#"{"l1":[1,1,0,0],"l2":[1,1,0,0],"a":[0,0,0,0]}"#).is_err());
    }
}
