//! Recovery of the point transformation behind a wedge bijection.
//!
//! A bijection `τ` of wedges that respects disjointness of closures and
//! inclusion maps characteristic families onto characteristic families, hence
//! characteristic hyperplanes onto characteristic hyperplanes. Intersecting
//! the images of four hyperplanes through `x` yields `δ(x)`, and `δ` is an
//! element of the Poincaré group extended by dilations.

use nalgebra::{Matrix4, Rotation3, Unit, Vector3, Vector4};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{closures_disjoint, max_slack, normalized_margin, strict_feasibility, wedge_system, Feasibility};
use crate::minkowski::{
    are_disjoint, is_subset, lowered, metric, CharacteristicHyperplane, FourVector, LightlikeDirection, Wedge,
};
use crate::poincare::{Act, ExtendedPoincareElement, LorentzMatrix};
use crate::sampling;
use crate::tolerances::{NORMALS_COND_MAX, RECONSTRUCTION_TOL};

/// A black-box bijection of wedges, queried in both directions.
pub trait WedgeOracle {
    fn forward(&self, w: &Wedge) -> Result<Wedge>;
    fn inverse(&self, w: &Wedge) -> Result<Wedge>;

    /// Wedges on which the oracle is defined, when it is not defined everywhere.
    fn domain(&self) -> Option<Vec<Wedge>> {
        None
    }
}

/// The bijection induced by a point transformation `x ↦ γΛx + a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMapOracle {
    element: ExtendedPoincareElement,
    inverse: ExtendedPoincareElement,
}

impl PointMapOracle {
    pub fn new(element: ExtendedPoincareElement) -> Self {
        Self { element, inverse: element.inverse() }
    }
}

impl WedgeOracle for PointMapOracle {
    fn forward(&self, w: &Wedge) -> Result<Wedge> {
        Ok(self.element.act(w))
    }
    fn inverse(&self, w: &Wedge) -> Result<Wedge> {
        Ok(self.inverse.act(w))
    }
}

/// A finite list of `(W, τ(W))` pairs; other wedges are out of its domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TableOracle {
    pub pairs: Vec<(Wedge, Wedge)>,
}

const TABLE_MATCH: f64 = 1e-7;

impl WedgeOracle for TableOracle {
    fn forward(&self, w: &Wedge) -> Result<Wedge> {
        self.pairs.iter().find(|(x, _)| x.approx_eq(w, TABLE_MATCH)).map(|p| p.1).ok_or(Error::OutOfDomain)
    }
    fn inverse(&self, w: &Wedge) -> Result<Wedge> {
        self.pairs.iter().find(|(_, y)| y.approx_eq(w, TABLE_MATCH)).map(|p| p.0).ok_or(Error::OutOfDomain)
    }
    fn domain(&self) -> Option<Vec<Wedge>> {
        Some(self.pairs.iter().map(|p| p.0).collect())
    }
}

/// An oracle given by two closures.
pub struct FnOracle<F, G> {
    pub forward: F,
    pub inverse: G,
}

impl<F, G> WedgeOracle for FnOracle<F, G>
where
    F: Fn(&Wedge) -> Wedge,
    G: Fn(&Wedge) -> Wedge,
{
    fn forward(&self, w: &Wedge) -> Result<Wedge> {
        Ok((self.forward)(w))
    }
    fn inverse(&self, w: &Wedge) -> Result<Wedge> {
        Ok((self.inverse)(w))
    }
}

/// Oracle description accepted on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    Poincare(ExtendedPoincareElement),
    Dilation(f64),
    Table(TableOracle),
}

impl OracleSpec {
    pub fn build(&self) -> Result<Box<dyn WedgeOracle>> {
        Ok(match self {
            OracleSpec::Poincare(e) => Box::new(PointMapOracle::new(*e)),
            OracleSpec::Dilation(g) => Box::new(PointMapOracle::new(ExtendedPoincareElement::dilation(*g)?)),
            OracleSpec::Table(t) => Box::new(t.clone()),
        })
    }
}

/// A violated condition together with the wedges exhibiting it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub first: Wedge,
    pub second: Option<Wedge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub closure_disjoint_pairs: usize,
    pub nested_pairs: usize,
    pub complements_checked: usize,
    pub witness: Option<Violation>,
}

/// Fixed pairs exercising inclusion along generators and complements.
fn anchor_wedges() -> Vec<Wedge> {
    let wr = Wedge::right();
    let l1p = LightlikeDirection::l1p().vector();
    let l1m = LightlikeDirection::l1m().vector();
    let tilted = Wedge::from_directions(
        LightlikeDirection::l2p(),
        LightlikeDirection::from_spatial(Vector3::new(0.6, 0.8, 0.0)),
        FourVector::zero(),
    )
    .expect("distinct generators");
    let sideways = Wedge::from_directions(LightlikeDirection::l2p(), LightlikeDirection::l2m(), FourVector::zero())
        .expect("distinct generators");
    vec![
        wr.translate(l1p),
        wr,
        wr.translate(-1.0 * l1m),
        wr.causal_complement(),
        wr.causal_complement().translate(l1m),
        sideways,
        tilted,
        tilted.translate(FourVector::new(0.0, -1.0, 0.0, 0.0)),
    ]
}

/// Pairs of wedges drawn so that disjoint, nested and generic relative
/// positions all occur.
pub fn sample_pairs(rng: &mut impl Rng, n: usize) -> Vec<(Wedge, Wedge)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let w = sampling::wedge(rng);
        let (l1, l2) = (w.l1().vector(), w.l2().vector());
        let s = rng.random_range(0.05..1.0);
        let r = rng.random_range(0.0..1.0);
        let pair = match i % 4 {
            0 => (w, w.causal_complement().translate(s * l2 - r * l1)),
            1 => (w.translate(s * l1 - r * l2), w),
            2 => (w.translate(s * l1 + r * l2), w),
            _ => (w, sampling::wedge(rng)),
        };
        out.push(pair);
    }
    out
}

struct ConditionCheck<'a> {
    tau: &'a dyn WedgeOracle,
    report: ConditionsReport,
}

impl ConditionCheck<'_> {
    fn fail(&mut self, condition: &str, first: Wedge, second: Option<Wedge>) {
        if self.report.witness.is_none() {
            self.report.witness = Some(Violation { condition: condition.into(), first, second });
        }
        self.report.passed = false;
    }

    /// Checks the pair `(w1, w2)` against its image `(v1, v2)`.
    fn pair(&mut self, w1: &Wedge, w2: &Wedge, v1: &Wedge, v2: &Wedge) {
        self.report.pairs_checked += 1;
        if closures_disjoint(w1, w2) {
            self.report.closure_disjoint_pairs += 1;
            if !are_disjoint(v1, v2) {
                self.fail("A", *w1, Some(*w2));
            }
        }
        if closures_disjoint(v1, v2) && !are_disjoint(w1, w2) {
            self.fail("A (inverse)", *v1, Some(*v2));
        }
        let nested = is_subset(w1, w2);
        if nested {
            self.report.nested_pairs += 1;
        }
        if nested != is_subset(v1, v2) {
            self.fail("B", *w1, Some(*w2));
        }
        if are_disjoint(w1, w2) != are_disjoint(v1, v2) {
            self.fail("disjointness", *w1, Some(*w2));
        }
    }

    fn roundtrip(&mut self, w: &Wedge, v: &Wedge) -> Result<()> {
        let back = self.tau.inverse(v)?;
        if back.distance(w) > RECONSTRUCTION_TOL {
            return Err(Error::OracleInconsistent(format!("τ⁻¹(τ({w})) = {back}")));
        }
        Ok(())
    }

    fn complement(&mut self, w: &Wedge, v: &Wedge) -> Result<()> {
        let image = match self.tau.forward(&w.causal_complement()) {
            Ok(x) => x,
            Err(Error::OutOfDomain) => return Ok(()),
            Err(e) => return Err(e),
        };
        self.report.complements_checked += 1;
        if image.distance(&v.causal_complement()) > RECONSTRUCTION_TOL {
            self.fail("complement", *w, None);
        }
        Ok(())
    }
}

/// Checks the disjointness and inclusion conditions, and their consequences
/// for disjointness and complements, on anchor and sampled pairs.
///
/// Oracles with a finite domain are checked on all pairs of that domain.
pub fn verify_conditions_ab(tau: &dyn WedgeOracle, n_samples: usize, seed: u64) -> Result<ConditionsReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameters("at least one sample is required".into()));
    }
    let report = ConditionsReport {
        passed: true,
        pairs_checked: 0,
        closure_disjoint_pairs: 0,
        nested_pairs: 0,
        complements_checked: 0,
        witness: None,
    };
    let mut chk = ConditionCheck { tau, report };
    if let Some(domain) = tau.domain() {
        let images = domain.iter().map(|w| tau.forward(w)).collect::<Result<Vec<_>>>()?;
        for (w, v) in domain.iter().zip(&images) {
            chk.roundtrip(w, v)?;
            chk.complement(w, v)?;
        }
        for i in 0..domain.len() {
            for j in 0..domain.len() {
                if i != j {
                    chk.pair(&domain[i], &domain[j], &images[i], &images[j]);
                }
            }
        }
        return Ok(chk.report);
    }

    let anchors = anchor_wedges();
    let mut pairs = Vec::new();
    for a in &anchors {
        for b in &anchors {
            if a != b {
                pairs.push((*a, *b));
            }
        }
    }
    let mut rng = sampling::rng(seed);
    pairs.extend(sample_pairs(&mut rng, n_samples));
    for (w1, w2) in &pairs {
        let v1 = tau.forward(w1)?;
        let v2 = tau.forward(w2)?;
        chk.pair(w1, w2, &v1, &v2);
        chk.roundtrip(w1, &v1)?;
        chk.complement(w1, &v1)?;
        // the same pair read as an image pair
        let u1 = tau.inverse(w1)?;
        let u2 = tau.inverse(w2)?;
        chk.pair(&u1, &u2, w1, w2);
    }
    Ok(chk.report)
}

fn near(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-7 * scale
}

/// `τ(H)` for a boundary hyperplane `H` of `via`.
///
/// `via` and its translate along the generator sweeping `H` lie in one
/// characteristic family, and so do their images; the image offset that does
/// not move identifies the image hyperplane.
pub fn image_hyperplane(tau: &dyn WedgeOracle, h: &CharacteristicHyperplane, via: &Wedge) -> Result<CharacteristicHyperplane> {
    let (p1, p2) = via.offsets();
    let scale = 1.0 + via.a().max_abs();
    let generator = if h.l.is_parallel(&via.l1(), 1e-9) && near(h.p, p1, scale) {
        via.l1()
    } else if h.l.is_parallel(&via.l2(), 1e-9) && near(h.p, p2, scale) {
        via.l2()
    } else {
        return Err(Error::NotBoundary);
    };
    let v0 = tau.forward(via)?;
    let v1 = tau.forward(&via.translate(generator.vector()))?;
    if !(v0.l1().is_parallel(&v1.l1(), 1e-7) && v0.l2().is_parallel(&v1.l2(), 1e-7)) {
        return Err(Error::AmbiguousFamilyDirection);
    }
    let (q1, q2) = v0.offsets();
    let (r1, r2) = (v1.a().dot(&v0.l1().vector()), v1.a().dot(&v0.l2().vector()));
    let scale = 1.0 + v0.a().max_abs().max(v1.a().max_abs());
    match (near(q1, r1, scale), near(q2, r2, scale)) {
        (true, false) => Ok(CharacteristicHyperplane::new(v0.l1(), q1)),
        (false, true) => Ok(CharacteristicHyperplane::new(v0.l2(), q2)),
        _ => Err(Error::AmbiguousFamilyDirection),
    }
}

/// Probe generators and the partner generator completing each probe wedge.
fn probes(fallback: bool) -> [(LightlikeDirection, LightlikeDirection); 4] {
    let base = [
        (Vector3::x(), -Vector3::x()),
        (-Vector3::x(), Vector3::x()),
        (Vector3::y(), -Vector3::y()),
        (Vector3::z(), -Vector3::z()),
    ];
    let r = if fallback {
        Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(1.0, 2.0, 3.0)), 0.7)
    } else {
        Rotation3::identity()
    };
    base.map(|(a, b)| (LightlikeDirection::from_spatial(r * a), LightlikeDirection::from_spatial(r * b)))
}

/// The wedges queried by [`point_map`] at `x`, with and without the fallback.
pub fn probe_wedges(x: &FourVector) -> Vec<Wedge> {
    let mut out = Vec::new();
    for fallback in [false, true] {
        for (l, partner) in probes(fallback) {
            let w = Wedge::from_directions(l, partner, *x).expect("probe generators are distinct");
            out.push(w);
            out.push(w.translate(l.vector()));
        }
    }
    out
}

/// `δ(x)` together with the condition number of the image normals.
pub fn point_map_with_condition(tau: &dyn WedgeOracle, x: &FourVector) -> Result<(FourVector, f64)> {
    let mut last = f64::INFINITY;
    for fallback in [false, true] {
        let mut rows = Matrix4::zeros();
        let mut rhs = Vector4::zeros();
        for (i, (l, partner)) in probes(fallback).into_iter().enumerate() {
            let via = Wedge::from_directions(l, partner, *x)?;
            let h = CharacteristicHyperplane::through(l, x);
            let img = image_hyperplane(tau, &h, &via)?;
            let g = lowered(&img.l.vector());
            for j in 0..4 {
                rows[(i, j)] = g[j];
            }
            rhs[i] = img.p;
        }
        let svd = rows.svd(true, true);
        let smin = svd.singular_values.min();
        let cond = if smin > 0.0 { svd.singular_values.max() / smin } else { f64::INFINITY };
        if cond <= NORMALS_COND_MAX {
            let y = svd.solve(&rhs, 0.0).map_err(|_| Error::DegenerateNormals(cond))?;
            return Ok((FourVector::try_from_vector(y)?, cond));
        }
        last = cond;
    }
    Err(Error::DegenerateNormals(last))
}

/// `δ(x)`: the common point of the images of four characteristic hyperplanes
/// through `x`.
pub fn point_map(tau: &dyn WedgeOracle, x: &FourVector) -> Result<FourVector> {
    point_map_with_condition(tau, x).map(|r| r.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub element: ExtendedPoincareElement,
    pub fit_residual: f64,
    pub samples_checked: usize,
    pub condition_estimate: f64,
    /// `τ(τ(W)) = W` on every checked wedge.
    pub involutive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructOptions {
    pub seed: u64,
    pub verify_samples: usize,
    pub tol: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self { seed: 0, verify_samples: 50, tol: RECONSTRUCTION_TOL }
    }
}

pub fn reconstruct(tau: &dyn WedgeOracle) -> Result<ReconstructionReport> {
    reconstruct_with(tau, &ReconstructOptions::default())
}

/// Fits `x ↦ γΛx + a` to `δ` on the affine frame `{0, e₀, …, e₃}` and checks
/// the fit against the oracle.
pub fn reconstruct_with(tau: &dyn WedgeOracle, opts: &ReconstructOptions) -> Result<ReconstructionReport> {
    let domain = tau.domain();
    if domain.is_some() {
        let cond = verify_conditions_ab(tau, 1, opts.seed)?;
        if let Some(v) = cond.witness {
            return Err(Error::VerificationFailed(format!("condition {} fails on {}", v.condition, v.first)));
        }
    }

    let (y0, mut condition) = point_map_with_condition(tau, &FourVector::zero())?;
    let mut a = Matrix4::zeros();
    for k in 0..4 {
        let (yk, c) = point_map_with_condition(tau, &FourVector::basis(k))?;
        condition = condition.max(c);
        a.set_column(k, &(yk - y0).as_vector().clone_owned());
    }
    let g = metric();
    let gram = a.transpose() * g * a;
    let gamma2 = gram[(0, 0)].abs();
    let conformal_dev = (gram - g * gamma2).amax() / gamma2.max(f64::MIN_POSITIVE);
    if !(conformal_dev <= opts.tol) || gamma2 == 0.0 {
        return Err(Error::NotConformal(conformal_dev));
    }
    let gamma = gamma2.sqrt();
    let lam = a / gamma;
    let dev = crate::poincare::lorentz_deviation(&lam);
    if dev > opts.tol {
        return Err(Error::NotLorentz(dev));
    }
    let element = ExtendedPoincareElement::new(gamma, LorentzMatrix::from_unchecked(lam), y0)?;

    let checks = match domain {
        Some(d) => d,
        None => {
            let mut rng = sampling::rng(opts.seed);
            (0..opts.verify_samples).map(|_| sampling::wedge(&mut rng)).collect()
        }
    };
    let mut residual: f64 = 0.0;
    let mut involutive = true;
    for w in &checks {
        let image = tau.forward(w)?;
        residual = residual.max(element.act(w).distance(&image));
        match tau.forward(&image) {
            Ok(back) => involutive &= back.distance(w) <= opts.tol,
            Err(Error::OutOfDomain) => involutive = false,
            Err(e) => return Err(e),
        }
    }
    if !(residual <= opts.tol) {
        return Err(Error::VerificationFailed(format!("fit residual {residual:e}")));
    }
    if involutive && (gamma - 1.0).abs() > opts.tol {
        return Err(Error::VerificationFailed(format!("involutive oracle with dilation {gamma}")));
    }
    Ok(ReconstructionReport { element, fit_residual: residual, samples_checked: checks.len(), condition_estimate: condition, involutive })
}

/// Outcome of the construction on `ℝ⁴ ∖ V̄₊`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub epsilon: f64,
    pub wedges: Vec<Wedge>,
    /// `∩ (Wᵢ)₊` is nonempty.
    pub triple_nonempty: bool,
    pub witness: Vec<f64>,
    pub witness_margin: f64,
    /// `∩ (TWᵢ)₊` is empty.
    pub image_empty: bool,
    /// For each sign pattern `σ`, a certificate that `∩ TWᵢ` misses `{y₀ < σ·ȳ}`.
    pub image_certificates: Vec<SignCertificate>,
    /// Pairs on which `(W₁)₊ ∩ (W₂)₊ = ∅ ⇔ W₁ ∩ W₂ = ∅` was confirmed.
    pub pairs_checked: usize,
    pub pair_level_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignCertificate {
    pub sigma: [f64; 3],
    pub certificate: Vec<f64>,
    pub value: f64,
}

/// `T = diag(−1, 1, 1, 1)` applied to a wedge.
fn time_reflect(w: &Wedge) -> Wedge {
    let t = LorentzMatrix::diagonal([-1.0, 1.0, 1.0, 1.0]).expect("diagonal signs are Lorentz");
    crate::poincare::PoincareElement::linear(t).act(w)
}

/// The five wedges `W[(1, n), (1, −n), (−5, −εn)]`: normals at 120° in the
/// 1-2 plane and `±e₃`. Their intersection is a small neighbourhood of
/// `(−5, 0, 0, 0)`.
pub fn counterexample_wedges(epsilon: f64) -> Result<Vec<Wedge>> {
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameters(format!("ε = {epsilon} must lie in (0, 1)")));
    }
    let s = 3f64.sqrt() / 2.0;
    let normals = [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(-0.5, s, 0.0),
        Vector3::new(-0.5, -s, 0.0),
        Vector3::new(0.0, 0.0, 1.0),
        Vector3::new(0.0, 0.0, -1.0),
    ];
    normals
        .iter()
        .map(|n| {
            let a = FourVector::new(-5.0, -epsilon * n[0], -epsilon * n[1], -epsilon * n[2]);
            Wedge::from_directions(LightlikeDirection::from_spatial(*n), LightlikeDirection::from_spatial(-n), a)
        })
        .collect()
}

fn outside_forward_cone(x: &[f64]) -> bool {
    x[0] < (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt()
}

/// Whether `W₁ ∩ W₂` has a point outside `V̄₊`: tries the half-spaces
/// `x₀ < u·x̄` for the coordinate axes and cube diagonals `u`.
fn pair_meets_outside_cone(w1: &Wedge, w2: &Wedge) -> bool {
    let (mut rows, mut rhs) = wedge_system(&[*w1, *w2]);
    let mut dirs: Vec<[f64; 3]> = Vec::new();
    for i in 0..3 {
        for s in [1.0, -1.0] {
            let mut u = [0.0; 3];
            u[i] = s;
            dirs.push(u);
        }
    }
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                dirs.push([sx, sy, sz]);
            }
        }
    }
    rows.push(vec![0.0; 4]);
    rhs.push(0.0);
    let last = rows.len() - 1;
    dirs.iter().any(|u| {
        rows[last] = vec![1.0, -u[0], -u[1], -u[2]];
        strict_feasibility(&rows, &rhs).is_feasible()
    })
}

/// Partial wedges `W₊ = W ∖ V̄₊` and the map `τ(W₊) = (TW)₊`: three or more
/// partial wedges can have a common point while their images have none, so
/// `τ` preserves pairwise disjointness without coming from a point map.
pub fn counterexample_partial_wedges(epsilon: f64, pair_samples: usize, seed: u64) -> Result<CounterexampleReport> {
    let wedges = counterexample_wedges(epsilon)?;
    let (rows, rhs) = wedge_system(&wedges);
    let (triple_nonempty, witness, witness_margin) = match strict_feasibility(&rows, &rhs) {
        Feasibility::Feasible { witness, .. } => {
            let m = normalized_margin(&rows, &rhs, &witness);
            (outside_forward_cone(&witness), witness, m)
        }
        Feasibility::Infeasible { .. } => (false, Vec::new(), max_slack(&rows, &rhs).slack),
    };

    let images: Vec<Wedge> = wedges.iter().map(time_reflect).collect();
    let (img_rows, img_rhs) = wedge_system(&images);
    let mut image_certificates = Vec::new();
    let mut image_empty = true;
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                // y₀ < σ·ȳ  ⇔  y₀ − σ·ȳ < 0
                let mut r = img_rows.clone();
                let mut b = img_rhs.clone();
                r.push(vec![1.0, -sx, -sy, -sz]);
                b.push(0.0);
                match strict_feasibility(&r, &b) {
                    Feasibility::Infeasible { certificate, value } => {
                        image_certificates.push(SignCertificate { sigma: [sx, sy, sz], certificate, value })
                    }
                    Feasibility::Feasible { .. } => image_empty = false,
                }
            }
        }
    }

    let mut rng = sampling::rng(seed);
    let mut pairs: Vec<(Wedge, Wedge)> = Vec::new();
    for i in 0..wedges.len() {
        for j in i + 1..wedges.len() {
            pairs.push((wedges[i], wedges[j]));
            pairs.push((images[i], images[j]));
        }
    }
    pairs.extend(sample_pairs(&mut rng, pair_samples));
    let pair_level_holds = pairs.iter().all(|(a, b)| are_disjoint(a, b) || pair_meets_outside_cone(a, b));

    Ok(CounterexampleReport {
        epsilon,
        wedges,
        triple_nonempty,
        witness,
        witness_margin,
        image_empty,
        image_certificates,
        pairs_checked: pairs.len(),
        pair_level_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::certificate_is_valid;
    use crate::poincare::{boost, reflection_right, rotation, wedge_reflection, PoincareElement};

    fn v(x0: f64, x1: f64, x2: f64, x3: f64) -> FourVector {
        FourVector::new(x0, x1, x2, x3)
    }

    fn oracle(e: ExtendedPoincareElement) -> PointMapOracle {
        PointMapOracle::new(e)
    }

    fn identity() -> PointMapOracle {
        oracle(ExtendedPoincareElement::identity())
    }

    fn sample_element() -> PoincareElement {
        let l = boost(&Vector3::new(0.2, -0.5, 0.4), 0.9) * rotation(&Vector3::new(1.0, 1.0, 0.0), 2.1);
        PoincareElement::new(l, v(0.3, -1.2, 2.0, 0.7))
    }

    #[test]
    fn conditions_hold_for_point_maps() {
        let rep = verify_conditions_ab(&oracle(sample_element().extended()), 40, 1).unwrap();
        assert!(rep.passed, "{:?}", rep.witness);
        assert!(rep.closure_disjoint_pairs > 0 && rep.nested_pairs > 0 && rep.complements_checked > 0);
        let rep = verify_conditions_ab(&oracle(ExtendedPoincareElement::dilation(2.0).unwrap()), 40, 1).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn swap_violates_inclusion() {
        let wr = Wedge::right();
        let shifted = wr.translate(LightlikeDirection::l1p().vector());
        let swap = move |w: &Wedge| {
            if w.approx_eq(&wr, 1e-9) {
                shifted
            } else if w.approx_eq(&shifted, 1e-9) {
                wr
            } else {
                *w
            }
        };
        let tau = FnOracle { forward: swap, inverse: swap };
        let rep = verify_conditions_ab(&tau, 10, 0).unwrap();
        assert!(!rep.passed);
        let w = rep.witness.unwrap();
        assert_eq!(w.condition, "B");
        assert_eq!((w.first, w.second), (shifted, Some(wr)));
    }

    #[test]
    fn inconsistent_inverse_is_reported() {
        let e = sample_element().extended();
        let tau = FnOracle { forward: move |w: &Wedge| e.act(w), inverse: |w: &Wedge| *w };
        assert!(matches!(verify_conditions_ab(&tau, 5, 0), Err(Error::OracleInconsistent(_))));
    }

    #[test]
    fn image_hyperplane_examples() {
        let wr = Wedge::right();
        let h0 = CharacteristicHyperplane::new(LightlikeDirection::l1p(), 0.0);
        let t = oracle(PoincareElement::translation(v(0.0, 0.0, 1.0, 0.0)).extended());
        assert!(image_hyperplane(&t, &h0, &wr).unwrap().approx_eq(&h0, 1e-12));
        // diag(−1,−1,1,1) sends the normal ℓ₁₊ to −ℓ₁₊, the same hyperplane
        let g = oracle(PoincareElement::linear(reflection_right()).extended());
        assert!(image_hyperplane(&g, &h0, &wr).unwrap().approx_eq(&h0, 1e-12));
        let via = wr.translate(LightlikeDirection::l1p().vector());
        let h2 = CharacteristicHyperplane::new(LightlikeDirection::l1m(), 2.0);
        assert!(image_hyperplane(&identity(), &h2, &via).unwrap().approx_eq(&h2, 1e-12));
        let h5 = CharacteristicHyperplane::new(LightlikeDirection::l2p(), 0.0);
        assert_eq!(image_hyperplane(&identity(), &h5, &wr), Err(Error::NotBoundary));
    }

    #[test]
    fn image_hyperplane_matches_point_images() {
        let e = sample_element();
        let w = sampling::wedge(&mut sampling::rng(4));
        let h = CharacteristicHyperplane::new(w.l2(), w.offsets().1);
        let img = image_hyperplane(&oracle(e.extended()), &h, &w).unwrap();
        assert!(img.approx_eq(&e.act(&h), 1e-9));
    }

    #[test]
    fn point_map_examples() {
        let x = v(0.4, -1.0, 2.5, 3.0);
        assert!((point_map(&identity(), &x).unwrap() - x).max_abs() < 1e-12);
        let e = sample_element();
        let y = point_map(&oracle(e.extended()), &x).unwrap();
        assert!((y - e.act(&x)).max_abs() < 1e-9);
        let d = oracle(ExtendedPoincareElement::dilation(3.0).unwrap());
        let y = point_map(&d, &v(1.0, 2.0, 0.0, 0.0)).unwrap();
        assert!((y - v(3.0, 6.0, 0.0, 0.0)).max_abs() < 1e-12);
    }

    #[test]
    fn swapped_family_is_ambiguous() {
        // maps every wedge onto W_R: translates are no longer distinguished
        let tau = FnOracle { forward: |_: &Wedge| Wedge::right(), inverse: |_: &Wedge| Wedge::right() };
        assert_eq!(point_map(&tau, &FourVector::zero()), Err(Error::AmbiguousFamilyDirection));
    }

    #[test]
    fn reconstruct_examples() {
        let g = oracle(wedge_reflection(&Wedge::right()).extended());
        let rep = reconstruct(&g).unwrap();
        assert!(rep.involutive);
        let expect = ExtendedPoincareElement::new(1.0, reflection_right(), FourVector::zero()).unwrap();
        assert!(rep.element.max_abs_diff(&expect) < 1e-9);

        let rep = reconstruct(&identity()).unwrap();
        assert!(rep.element.max_abs_diff(&ExtendedPoincareElement::identity()) < 1e-12);
        assert!(rep.fit_residual < 1e-12);
        assert_eq!(rep.samples_checked, 50);

        let e = ExtendedPoincareElement::new(1.7, *sample_element().lambda(), v(1.0, 2.0, 3.0, 4.0)).unwrap();
        let rep = reconstruct(&oracle(e)).unwrap();
        assert!(rep.element.max_abs_diff(&e) < 1e-8);
        assert!(!rep.involutive);
    }

    #[test]
    fn reconstruct_rejects_non_point_maps() {
        // complement map: W ↦ W′ reverses inclusions
        let tau = FnOracle { forward: |w: &Wedge| w.causal_complement(), inverse: |w: &Wedge| w.causal_complement() };
        assert!(reconstruct(&tau).is_err());
    }

    #[test]
    fn table_oracle_round_trip() {
        let e = sample_element().extended();
        let mut domain: Vec<Wedge> = Vec::new();
        for k in 0..5 {
            let x = if k == 0 { FourVector::zero() } else { FourVector::basis(k - 1) };
            domain.extend(probe_wedges(&x));
        }
        let table = TableOracle { pairs: domain.iter().map(|w| (*w, e.act(w))).collect() };
        let rep = reconstruct(&table).unwrap();
        assert!(rep.element.max_abs_diff(&e) < 1e-8);
        assert_eq!(table.forward(&Wedge::right().translate(v(0.0, 9.0, 0.0, 0.0))), Err(Error::OutOfDomain));

        let mut bad = table.clone();
        let (w0, v0) = bad.pairs[0];
        bad.pairs[0] = (w0, v0.causal_complement());
        let r = reconstruct(&bad);
        assert!(matches!(r, Err(Error::VerificationFailed(_) | Error::OracleInconsistent(_))), "{r:?}");
        let mut shifted = table.clone();
        shifted.pairs[3].1 = shifted.pairs[3].1.translate(v(0.0, 7.0, 0.0, 0.0));
        let r = reconstruct(&shifted);
        assert!(matches!(r, Err(Error::VerificationFailed(_))), "{r:?}");
    }

    #[test]
    fn oracle_spec_json() {
        let s = r#"{"dilation": 2.0}"#;
        let spec: OracleSpec = serde_json::from_str(s).unwrap();
        let rep = reconstruct(spec.build().unwrap().as_ref()).unwrap();
        assert!((rep.element.gamma() - 2.0).abs() < 1e-9);
        let s = r#"{"poincare": {"gamma": 1.0, "lambda": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]], "a": [0,0,1,0]}}"#;
        let spec: OracleSpec = serde_json::from_str(s).unwrap();
        assert!(matches!(spec, OracleSpec::Poincare(_)));
        assert!(serde_json::from_str::<OracleSpec>(r#"{"dilation": -1.0}"#).unwrap().build().is_err());
        assert!(serde_json::from_str::<OracleSpec>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn counterexample_default() {
        let rep = counterexample_partial_wedges(0.1, 20, 0).unwrap();
        assert!(rep.triple_nonempty);
        assert!(rep.witness_margin >= 1e-8);
        assert!((rep.witness[0] + 5.0).abs() < 0.2);
        assert!(rep.image_empty);
        assert_eq!(rep.image_certificates.len(), 8);
        let images: Vec<Wedge> = rep.wedges.iter().map(time_reflect).collect();
        let (rows, rhs) = wedge_system(&images);
        for c in &rep.image_certificates {
            let mut r = rows.clone();
            let mut b = rhs.clone();
            r.push(vec![1.0, -c.sigma[0], -c.sigma[1], -c.sigma[2]]);
            b.push(0.0);
            assert!(certificate_is_valid(&r, &b, &c.certificate, 1e-9));
        }
        assert!(rep.pair_level_holds);
    }

    #[test]
    fn counterexample_needs_three_wedges() {
        let ws = counterexample_wedges(0.1).unwrap();
        let images: Vec<Wedge> = ws.iter().map(time_reflect).collect();
        for i in 0..ws.len() {
            for j in i + 1..ws.len() {
                assert!(pair_meets_outside_cone(&images[i], &images[j]));
            }
        }
    }

    #[test]
    fn counterexample_rejects_zero_margin() {
        assert!(matches!(counterexample_partial_wedges(0.0, 1, 0), Err(Error::InvalidParameters(_))));
    }
}
