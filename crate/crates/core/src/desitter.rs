//! Wedges of three-dimensional de Sitter space `dS³ = {x·x = −1}` and the
//! Lorentz transformation behind a wedge bijection.
//!
//! A de Sitter wedge is `W̃[ℓ₁, ℓ₂, 0] ∩ dS³`. Every point of an ambient wedge
//! with the origin in its edge is spacelike, so such a wedge meets `dS³`
//! exactly along the rays it contains.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4, Rotation3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{lowered, pair_normal_form, FourVector, LightlikeDirection, PairForm, Wedge};
use crate::poincare::{boost, lorentz_deviation, spatial, wedge_frame, Act, LorentzMatrix, PoincareElement};
use crate::sampling;
use crate::tolerances::{EPS_GEOM, NORMALS_COND_MAX, RECONSTRUCTION_TOL};

/// A point of `dS³`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FourVector", into = "FourVector")]
pub struct DSPoint(FourVector);

impl DSPoint {
    pub fn new(x: FourVector) -> Result<Self> {
        let dev = (x.square() + 1.0).abs();
        if dev <= EPS_GEOM * (1.0 + x.max_abs().powi(2)) {
            Ok(Self(x))
        } else {
            Err(Error::InvalidParameters(format!("x·x = {} is not −1", x.square())))
        }
    }

    /// Rescales a spacelike vector onto the hyperboloid.
    pub fn from_spacelike(x: FourVector) -> Result<Self> {
        let s = x.square();
        if !(s < 0.0) {
            return Err(Error::InvalidParameters("vector is not spacelike".into()));
        }
        Ok(Self((1.0 / (-s).sqrt()) * x))
    }

    pub fn vector(&self) -> FourVector {
        self.0
    }
}

impl TryFrom<FourVector> for DSPoint {
    type Error = Error;
    fn try_from(x: FourVector) -> Result<Self> {
        Self::new(x)
    }
}

impl From<DSPoint> for FourVector {
    fn from(p: DSPoint) -> Self {
        p.0
    }
}

/// `W[ℓ₁, ℓ₂] = W̃[ℓ₁, ℓ₂, 0] ∩ dS³`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DSWedgeRepr", into = "DSWedgeRepr")]
pub struct DSWedge {
    l1: LightlikeDirection,
    l2: LightlikeDirection,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DSWedgeRepr {
    l1: FourVector,
    l2: FourVector,
}

impl TryFrom<DSWedgeRepr> for DSWedge {
    type Error = Error;
    fn try_from(r: DSWedgeRepr) -> Result<Self> {
        Self::new(LightlikeDirection::new(r.l1)?, LightlikeDirection::new(r.l2)?)
    }
}

impl From<DSWedge> for DSWedgeRepr {
    fn from(w: DSWedge) -> Self {
        DSWedgeRepr { l1: w.l1.vector(), l2: w.l2.vector() }
    }
}

impl DSWedge {
    pub fn new(l1: LightlikeDirection, l2: LightlikeDirection) -> Result<Self> {
        if l1.is_parallel(&l2, EPS_GEOM) {
            return Err(Error::ParallelGenerators);
        }
        Ok(Self { l1, l2 })
    }

    /// `W[ℓ₁₊, ℓ₁₋]`.
    pub fn right() -> Self {
        Self { l1: LightlikeDirection::l1p(), l2: LightlikeDirection::l1m() }
    }

    pub fn l1(&self) -> LightlikeDirection {
        self.l1
    }
    pub fn l2(&self) -> LightlikeDirection {
        self.l2
    }

    /// The ambient wedge `W̃[ℓ₁, ℓ₂, 0]`.
    pub fn ambient(&self) -> Wedge {
        Wedge::from_directions(self.l1, self.l2, FourVector::zero()).expect("generators are distinct")
    }

    pub fn from_ambient(w: &Wedge) -> Result<Self> {
        if w.a().max_abs() > EPS_GEOM {
            return Err(Error::InvalidParameters("edge does not contain the origin".into()));
        }
        Self::new(w.l1(), w.l2())
    }

    pub fn contains(&self, x: &DSPoint) -> bool {
        self.ambient().contains_point(&x.vector())
    }

    pub fn causal_complement(&self) -> Self {
        Self { l1: self.l2, l2: self.l1 }
    }

    pub fn approx_eq(&self, other: &DSWedge, tol: f64) -> bool {
        self.l1.is_parallel(&other.l1, tol) && self.l2.is_parallel(&other.l2, tol)
    }

    pub fn distance(&self, other: &DSWedge) -> f64 {
        (self.l1.spatial() - other.l1.spatial()).amax().max((self.l2.spatial() - other.l2.spatial()).amax())
    }
}

/// Image of a de Sitter wedge under a Lorentz transformation.
pub fn act_lorentz(l: &LorentzMatrix, w: &DSWedge) -> DSWedge {
    let v = PoincareElement::linear(*l).act(&w.ambient());
    DSWedge { l1: v.l1(), l2: v.l2() }
}

fn normal_form_disjoint(l: &LightlikeDirection) -> bool {
    let n = l.spatial();
    let (a, b, c) = (n[0], n[1], n[2]);
    a > EPS_GEOM && a <= 1.0 + EPS_GEOM && b >= -EPS_GEOM && b < 1.0 - EPS_GEOM && c.abs() <= EPS_GEOM
}

/// Whether `W₁ ∩ W₂ = ∅`: with `W₁` moved to `W[ℓ₁₊, ℓ₁₋]` and `W₂` to
/// `W[ℓ₂₊, ℓ]`, `ℓ = (1, a, b, c)`, this holds iff `0 < a ≤ 1`, `0 ≤ b < 1`,
/// `c = 0`.
pub fn ds_disjoint(w1: &DSWedge, w2: &DSWedge) -> bool {
    match pair_normal_form(&w1.ambient(), &w2.ambient()) {
        PairForm::Primary { l, .. } => normal_form_disjoint(&l),
        PairForm::Coherent => false,
        PairForm::CoherentComplement { .. } => true,
    }
}

/// `(W[ℓ₁, ℓ₄], W[ℓ₃, ℓ₂])` for the pair `(W[ℓ₁, ℓ₂], W[ℓ₃, ℓ₄])`.
pub fn dual_pair(w1: &DSWedge, w2: &DSWedge) -> Result<(DSWedge, DSWedge)> {
    Ok((DSWedge::new(w1.l1, w2.l2)?, DSWedge::new(w2.l1, w1.l2)?))
}

/// A pair equals its dual iff `ℓ₁ ∥ ℓ₃` or `ℓ₂ ∥ ℓ₄`.
pub fn is_self_dual(w1: &DSWedge, w2: &DSWedge) -> bool {
    w1.l1.is_parallel(&w2.l1, EPS_GEOM) || w1.l2.is_parallel(&w2.l2, EPS_GEOM)
}

/// A restricted Lorentz transformation taking the spacelike unit vector `x`
/// to `(0, 0, 1, 0)`: a boost removing the time component, then a rotation.
pub fn frame_to_e2(x: &DSPoint) -> LorentzMatrix {
    let v = x.vector();
    let s = v.spatial();
    let r = s.norm();
    let b = if v.x0().abs() > 0.0 { boost(&(s / r), (-v.x0() / r).atanh()) } else { LorentzMatrix::identity() };
    let u = b.apply(&v).spatial().normalize();
    let rot = match Rotation3::rotation_between(&u, &Vector3::y()) {
        Some(rot) => rot,
        None => Rotation3::from_axis_angle(&Vector3::z_axis(), PI),
    };
    spatial(rot.matrix()) * b
}

/// Outcome of the line-meeting test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineMeeting {
    pub meets: bool,
    pub b1: f64,
    pub b2: f64,
    pub contains_x: bool,
    pub contains_minus_x: bool,
}

/// Whether the line `ℝx` meets `W`: after moving `x` to `(0,0,1,0)`, iff the
/// 2-components of the generators satisfy `b₁b₂ < 0`.
pub fn line_meets_wedge(x: &DSPoint, w: &DSWedge) -> LineMeeting {
    let f = frame_to_e2(x);
    let moved = act_lorentz(&f, w);
    let b1 = moved.l1.spatial()[1];
    let b2 = moved.l2.spatial()[1];
    let minus = DSPoint(-x.vector());
    LineMeeting { meets: b1 * b2 < 0.0, b1, b2, contains_x: w.contains(x), contains_minus_x: w.contains(&minus) }
}

/// A bijection of de Sitter wedges.
pub trait DSOracle {
    fn forward(&self, w: &DSWedge) -> Result<DSWedge>;
}

/// The bijection induced by a Lorentz transformation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzOracle(pub LorentzMatrix);

impl DSOracle for LorentzOracle {
    fn forward(&self, w: &DSWedge) -> Result<DSWedge> {
        Ok(act_lorentz(&self.0, w))
    }
}

/// An oracle given by a closure.
pub struct FnDSOracle<F>(pub F);

impl<F: Fn(&DSWedge) -> DSWedge> DSOracle for FnDSOracle<F> {
    fn forward(&self, w: &DSWedge) -> Result<DSWedge> {
        Ok((self.0)(w))
    }
}

/// Two generators completing `ℓ` to wedges, away from `ℓ` and each other.
fn partners(l: &LightlikeDirection) -> [LightlikeDirection; 2] {
    let n = l.spatial();
    let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
    let k = axes.iter().min_by(|a, b| a.dot(&n).abs().total_cmp(&b.dot(&n).abs())).expect("three axes");
    let u = (k - n * k.dot(&n)).normalize();
    let w = n.cross(&u);
    [LightlikeDirection::from_spatial(-n * 0.5 + u * 0.75f64.sqrt()), LightlikeDirection::from_spatial(-n * 0.5 + w * 0.75f64.sqrt())]
}

/// The lightlike normal of `τ(H₀[ℓ])`: the generator shared by the images of
/// `W[ℓ, m]` for two choices of `m`.
pub fn ds_image_normal(tau: &dyn DSOracle, l: &LightlikeDirection) -> Result<LightlikeDirection> {
    let [m1, m2] = partners(l);
    let v1 = tau.forward(&DSWedge::new(*l, m1)?)?;
    let v2 = tau.forward(&DSWedge::new(*l, m2)?)?;
    let tol = 1e-7;
    let shared: Vec<LightlikeDirection> =
        [v1.l1, v1.l2].into_iter().filter(|g| g.is_parallel(&v2.l1, tol) || g.is_parallel(&v2.l2, tol)).collect();
    match shared.as_slice() {
        [g] => Ok(*g),
        _ => Err(Error::AmbiguousFamilyDirection),
    }
}

/// `δ(x)`: the image line of three characteristic planes through `ℝx`,
/// normalized to `dS³` and oriented by a wedge containing `x`.
pub fn ds_point_map(tau: &dyn DSOracle, x: &DSPoint) -> Result<DSPoint> {
    let f = frame_to_e2(x);
    let back = f.inverse();
    let mut rows = DMatrix::zeros(3, 4);
    for (i, k) in (0..3).enumerate() {
        let th = 2.0 * PI * k as f64 / 3.0;
        let l = LightlikeDirection::new(back.apply(&FourVector::new(1.0, th.cos(), 0.0, th.sin())))?;
        let m = ds_image_normal(tau, &l)?;
        let g = lowered(&m.vector());
        for j in 0..4 {
            rows[(i, j)] = g[j];
        }
    }
    let svd = rows.svd(false, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= 0.0 || smax / smin > NORMALS_COND_MAX {
        return Err(Error::DegenerateNormals(if smin > 0.0 { smax / smin } else { f64::INFINITY }));
    }
    let vt = svd.v_t.expect("right singular vectors requested");
    // null vector: the right singular vector outside the row space
    let proj = vt.transpose() * &vt;
    let e = (0..4)
        .map(|j| {
            let mut c = nalgebra::DVector::zeros(4);
            c[j] = 1.0;
            &c - &proj * &c
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("four candidates");
    let y = FourVector::try_from_vector(nalgebra::Vector4::new(e[0], e[1], e[2], e[3]))?;
    let y = DSPoint::from_spacelike(y).map_err(|_| Error::VerificationFailed("image line is not spacelike".into()))?;
    let w0 = act_lorentz(&back, &DSWedge::new(LightlikeDirection::l2p(), LightlikeDirection::l2m())?);
    let image = tau.forward(&w0)?;
    let minus = DSPoint(-y.vector());
    match (image.contains(&y), image.contains(&minus)) {
        (true, false) => Ok(y),
        (false, true) => Ok(minus),
        _ => Err(Error::SignUndetermined),
    }
}

/// Points spanning `ℝ⁴` at which the point map is evaluated.
fn reconstruction_frame() -> [FourVector; 4] {
    [
        FourVector::new(0.0, 1.0, 0.0, 0.0),
        FourVector::new(0.0, 0.0, 1.0, 0.0),
        FourVector::new(0.0, 0.0, 0.0, 1.0),
        FourVector::new(1.0, 2f64.sqrt(), 0.0, 0.0),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DSReconstruction {
    pub lambda: LorentzMatrix,
    pub fit_residual: f64,
    pub samples_checked: usize,
}

/// Solves `Λpᵢ = δ(pᵢ)` on four points and checks `Λ` against the oracle on
/// random wedges.
pub fn ds_reconstruct(tau: &dyn DSOracle, verify_samples: usize, seed: u64) -> Result<DSReconstruction> {
    let frame = reconstruction_frame();
    let mut p = Matrix4::zeros();
    let mut y = Matrix4::zeros();
    for (k, x) in frame.iter().enumerate() {
        let img = ds_point_map(tau, &DSPoint::new(*x)?)?;
        p.set_column(k, x.as_vector());
        y.set_column(k, img.vector().as_vector());
    }
    let pinv = p.try_inverse().expect("frame points span ℝ⁴");
    let m = y * pinv;
    let dev = lorentz_deviation(&m);
    if dev > RECONSTRUCTION_TOL {
        return Err(Error::NotLorentz(dev));
    }
    let lambda = LorentzMatrix::from_unchecked(m);
    let mut rng = sampling::rng(seed);
    let mut residual: f64 = 0.0;
    for _ in 0..verify_samples {
        let w = random_ds_wedge(&mut rng);
        residual = residual.max(act_lorentz(&lambda, &w).distance(&tau.forward(&w)?));
    }
    if !(residual <= RECONSTRUCTION_TOL) {
        return Err(Error::VerificationFailed(format!("fit residual {residual:e}")));
    }
    Ok(DSReconstruction { lambda, fit_residual: residual, samples_checked: verify_samples })
}

/// Which of the two admissible forms the reconstructed involution takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionForm {
    /// The wedge reflection `Λ_W`.
    Reflection,
    /// `Λ_W` composed with `x ↦ −x`.
    ReflectionTimesTheta,
}

/// Reconstructs the Lorentz matrix of an involution oracle attached to `w`
/// and classifies it as `Λ_W` or `−Λ_W`.
pub fn reflection_dichotomy(w: &DSWedge, tau: &dyn DSOracle, seed: u64) -> Result<ReflectionForm> {
    let rec = ds_reconstruct(tau, 20, seed)?;
    let f = wedge_frame(&w.ambient());
    let lw = *f.lambda() * crate::poincare::reflection_right() * f.lambda().inverse();
    let plus = rec.lambda.max_abs_diff(&lw);
    let minus = rec.lambda.max_abs_diff(&LorentzMatrix::from_unchecked(-lw.matrix()));
    if plus <= RECONSTRUCTION_TOL {
        Ok(ReflectionForm::Reflection)
    } else if minus <= RECONSTRUCTION_TOL {
        Ok(ReflectionForm::ReflectionTimesTheta)
    } else {
        Err(Error::VerificationFailed(format!("neither form matches (deviations {plus:e}, {minus:e})")))
    }
}

pub fn random_ds_wedge(rng: &mut impl Rng) -> DSWedge {
    loop {
        let l1 = sampling::direction(rng);
        let l2 = sampling::direction(rng);
        if l1.spatial().dot(&l2.spatial()) < 0.98 {
            return DSWedge { l1, l2 };
        }
    }
}

/// A point of `W ∩ dS³`, drawn through the frame of `W` from
/// `W_R ∩ dS³ = {(r sinh η, r cosh η, √(1−r²) cos φ, √(1−r²) sin φ)}`.
pub fn random_point_in(w: &DSWedge, rng: &mut impl Rng) -> DSPoint {
    // half the draws are log-uniform in r so thin regions near the edge are reached
    let r: f64 = if rng.random_bool(0.5) { rng.random_range(0.0..1.0f64).sqrt().max(1e-6) } else { 10f64.powf(rng.random_range(-4.0..0.0)) };
    chart_point(w, [r.ln(), rng.random_range(-5.0..5.0), rng.random_range(0.0..2.0 * PI)])
}

/// Point of `W ∩ dS³` at chart coordinates `(ln r, η, φ)` of the frame of `W`.
fn chart_point(w: &DSWedge, c: [f64; 3]) -> DSPoint {
    let r = c[0].min(0.0).exp();
    let q = (1.0 - r * r).sqrt();
    let x = FourVector::new(r * c[1].sinh(), r * c[1].cosh(), q * c[2].cos(), q * c[2].sin());
    DSPoint(wedge_frame(&w.ambient()).lambda().apply(&x))
}

/// Signed membership margin of `x` in `W`: positive exactly on `W`.
fn membership_margin(w: &DSWedge, x: &DSPoint) -> f64 {
    let v = x.vector();
    v.dot(&w.l2.vector()).min(-v.dot(&w.l1.vector()))
}

/// Sampling oracle for `W₁ ∩ W₂ ≠ ∅` with a budget of `n` membership tests.
/// Half are independent draws from either wedge; the rest climb the
/// membership margin of the other wedge in the chart of each wedge, starting
/// from the best draws.
pub fn sampled_intersect(w1: &DSWedge, w2: &DSWedge, n: usize, rng: &mut impl Rng) -> bool {
    const STARTS: usize = 25;
    let draws = n / 2;
    let mut best: [Vec<([f64; 3], f64)>; 2] = [Vec::new(), Vec::new()];
    for i in 0..draws {
        let (side, w, o) = if i % 2 == 0 { (0, w1, w2) } else { (1, w2, w1) };
        let r: f64 = if rng.random_bool(0.5) { rng.random_range(0.0..1.0f64).sqrt().max(1e-6) } else { 10f64.powf(rng.random_range(-4.0..0.0)) };
        let c = [r.ln(), rng.random_range(-5.0..5.0), rng.random_range(0.0..2.0 * PI)];
        let m = membership_margin(o, &chart_point(w, c));
        if m > 0.0 {
            return true;
        }
        best[side].push((c, m));
    }
    let steps = (n - draws) / (2 * STARTS);
    for (side, (w, o)) in [(w1, w2), (w2, w1)].into_iter().enumerate() {
        let starts = &mut best[side];
        starts.sort_by(|a, b| b.1.total_cmp(&a.1));
        for &(mut c, mut m) in starts.iter().take(STARTS) {
            let mut sigma: f64 = 0.3;
            let mut misses = 0;
            for _ in 0..steps {
                let trial = [
                    (c[0] + sigma * rng.random_range(-1.0..1.0)).clamp(-20.0, 0.0),
                    c[1] + sigma * rng.random_range(-1.0..1.0),
                    c[2] + sigma * rng.random_range(-1.0..1.0),
                ];
                let mt = membership_margin(o, &chart_point(w, trial));
                if mt > 0.0 {
                    return true;
                }
                if mt > m {
                    (c, m) = (trial, mt);
                    misses = 0;
                } else {
                    misses += 1;
                    if misses == 8 {
                        sigma = (sigma * 0.5).max(1e-7);
                        misses = 0;
                    }
                }
            }
        }
    }
    false
}
