//! Seeded invariant suites and demos shared by the command line and the
//! acceptance tests. Reports contain no timings, so equal seeds give equal
//! reports.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coxeter_index::{
    check_covariance, enumerate_families, fixed_points_transported, fixedpoint_dichotomy_check, generate_group, group_labels,
    PairingConstraint, MAX_ENUMERATION_SIZE,
};
use crate::desitter::{
    act_lorentz, ds_disjoint, ds_reconstruct, dual_pair, line_meets_wedge, random_ds_wedge, random_point_in, reflection_dichotomy,
    sampled_intersect, DSPoint, DSWedge, LorentzOracle, ReflectionForm,
};
use crate::error::Result;
use crate::feasibility::{max_slack, normalized_margin, wedge_system, wedges_intersect};
use crate::minkowski::{
    are_disjoint, characteristic_data, is_maximal_pair, is_spacelike_separated, is_subset, make_wedge, CharacteristicHyperplane,
    FourVector, LightlikeDirection, Wedge,
};
use crate::modular_findim::{
    catalog, cgma_from_modular, family_catalog, group_and_properties, internal_symmetry_kernel, involution_relation_deviation,
    left_qubit, modular_objects, tomita_report, CMatrix, CgmaOutcome, PropertyInputs, StateVector,
};
use crate::poincare::{
    borchers_conjugate, boost, factor_into_wedge_reflections, paired_net_flow_check, reflection_product, rotation, standard_boost,
    transport, wedge_frame, wedge_reflection, Act, ExtendedPoincareElement, LorentzMatrix, PairedNetReport, PoincareElement,
};
use crate::reconstruction::{
    counterexample_partial_wedges, reconstruct, reconstruct_with, CounterexampleReport, FnOracle, PointMapOracle,
    ReconstructOptions,
};
use crate::sampling::{self, SeededRng};
use crate::sl2c::{
    case_matrix, covering_map, gamma_case_map, lift, reflection_action, solve_lower_twist, GammaCase, ReflectionKind, SL2C,
};
use crate::tolerances::{EPS_MODULAR, FEASIBILITY_MARGIN, RECONSTRUCTION_TOL};

/// One checked property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub passed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.passed == self.samples
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Human-readable findings.
    pub lines: Vec<String>,
    /// First failing check with its witness.
    pub witness: Option<String>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Builder {
    suite: String,
    seed: u64,
    checks: Vec<Check>,
    lines: Vec<String>,
    witness: Option<String>,
}

impl Builder {
    fn new(suite: &str, seed: u64) -> Self {
        Self { suite: suite.into(), seed, checks: Vec::new(), lines: Vec::new(), witness: None }
    }

    fn count(&mut self, name: &str, samples: usize, passed: usize, witness: Option<String>) {
        if passed != samples && self.witness.is_none() {
            self.witness = Some(format!("{name}: {}", witness.unwrap_or_else(|| format!("{passed}/{samples}"))));
        }
        self.checks.push(Check { name: name.into(), samples, passed, max_deviation: None, tolerance: None });
    }

    fn flag(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        let w = if ok { None } else { Some(witness()) };
        self.count(name, 1, ok as usize, w);
    }

    fn deviation(&mut self, name: &str, samples: usize, devs: impl IntoIterator<Item = f64>, tol: f64) {
        let mut max: f64 = 0.0;
        let mut passed = 0;
        let mut first_bad = None;
        for (k, d) in devs.into_iter().enumerate() {
            // NaN counts as a failure
            if d <= tol {
                passed += 1;
            } else if first_bad.is_none() {
                first_bad = Some(format!("sample {k}: deviation {d:e} > {tol:e}"));
            }
            max = if d.is_nan() { f64::NAN } else { max.max(d) };
        }
        if passed != samples && self.witness.is_none() {
            self.witness = Some(format!("{name}: {}", first_bad.unwrap_or_else(|| format!("{passed}/{samples}"))));
        }
        self.checks.push(Check { name: name.into(), samples, passed, max_deviation: Some(max), tolerance: Some(tol) });
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn finish(self) -> SuiteReport {
        let passed = self.checks.iter().all(Check::ok);
        SuiteReport { suite: self.suite, seed: self.seed, passed, checks: self.checks, lines: self.lines, witness: self.witness }
    }
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 7] = ["wedges", "poincare", "sl2c", "reconstruction", "desitter", "modular", "coxeter"];

/// Runs a named suite; `tol` overrides the suite's deviation tolerance.
pub fn run_suite(name: &str, seed: u64, tol: Option<f64>) -> Option<SuiteReport> {
    Some(match name {
        "wedges" => verify_wedges(seed),
        "poincare" => verify_poincare(seed, tol.unwrap_or(1e-9)),
        "sl2c" => verify_sl2c(seed, tol.unwrap_or(1e-9)),
        "reconstruction" => verify_reconstruction(seed, 500, 100, tol.unwrap_or(RECONSTRUCTION_TOL)),
        "desitter" => verify_desitter(seed, &DesitterSizes::default(), tol.unwrap_or(RECONSTRUCTION_TOL)),
        "modular" => verify_modular(seed, tol.unwrap_or(EPS_MODULAR)),
        "coxeter" => verify_coxeter(seed),
        _ => return None,
    })
}

fn random_edge_shift(rng: &mut SeededRng, w: &Wedge) -> FourVector {
    // Euclidean projection of a random vector off span{gℓ₁, gℓ₂} lies in the edge directions
    let g = |l: &LightlikeDirection| {
        let v = l.vector();
        nalgebra::Vector4::new(v.x0(), -v.x1(), -v.x2(), -v.x3())
    };
    let (u1, u2) = (g(&w.l1()), g(&w.l2()));
    let e1 = u1.normalize();
    let e2 = (u2 - e1 * e1.dot(&u2)).normalize();
    let r = sampling::four_vector(rng, 3.0).as_vector().clone_owned();
    let v = r - e1 * e1.dot(&r) - e2 * e2.dot(&r);
    FourVector::new(v[0], v[1], v[2], v[3])
}

/// A pair that is disjoint, together with whether it was built maximal.
pub fn disjoint_pair(rng: &mut SeededRng, kind: usize) -> (Wedge, Wedge, bool) {
    let th = rng.random_range(0.05..PI / 2.0 - 0.05);
    let l = FourVector::new(1.0, th.cos(), th.sin(), 0.0);
    let l2p = LightlikeDirection::l2p().vector();
    let (w1, w2, maximal) = match kind % 4 {
        0 => {
            // k = (1−b)d₀ − a d₁ = 0
            let mu = rng.random_range(-2.0..2.0);
            let d = FourVector::new(mu * th.cos(), mu * (1.0 - th.sin()), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            (Wedge::right(), make_wedge(l2p, l, d).expect("distinct generators"), true)
        }
        1 => {
            let k = rng.random_range(0.05..1.0);
            let d1 = rng.random_range(-1.0..1.0);
            let d0 = (k + th.cos() * d1) / (1.0 - th.sin());
            let d = FourVector::new(d0, d1, rng.random_range(-2.0..2.0), 0.0);
            (Wedge::right(), make_wedge(l2p, l, d).expect("distinct generators"), false)
        }
        2 => {
            let w = sampling::wedge(rng);
            let shift = random_edge_shift(rng, &w);
            (w, w.causal_complement().translate(shift), false)
        }
        _ => {
            // the complement pushed into itself along its first generator
            let w = sampling::wedge(rng);
            let c = w.causal_complement();
            let s = rng.random_range(0.1..2.0);
            (w, c.translate(s * c.l1().vector()), false)
        }
    };
    let e = sampling::restricted_element(rng);
    let (a, b) = (e.act(&w1), e.act(&w2));
    if rng.random_bool(0.5) {
        (a, b, maximal)
    } else {
        (b, a, maximal)
    }
}

/// Relaxes one half-space of `w` by `eps`.
fn relaxed(w: &Wedge, first: bool, eps: f64) -> Wedge {
    let (l1, l2) = (w.l1().vector(), w.l2().vector());
    let k = l1.dot(&l2);
    if first {
        w.translate((eps / k) * l2)
    } else {
        w.translate((-eps / k) * l1)
    }
}

/// Maximality by enlargement: each one-sided relaxation of either wedge meets
/// the other.
pub fn maximal_by_enlargement(w1: &Wedge, w2: &Wedge, eps: f64) -> bool {
    [(w1, w2), (w2, w1)].iter().all(|(a, b)| [true, false].iter().all(|&f| wedges_intersect(&[relaxed(a, f, eps), **b])))
}

/// Relaxation used by the enlargement oracle.
pub const ENLARGEMENT_EPS: f64 = 1e-4;

/// Agreement of the analytic maximal-pair predicate with the enlargement
/// oracle on `n` disjoint pairs; returns `(agreements, first disagreement)`.
pub fn maximal_pair_agreement(seed: u64, n: usize) -> (usize, Option<String>) {
    let mut rng = sampling::rng(seed);
    let mut agree = 0;
    let mut witness = None;
    for k in 0..n {
        let (a, b, _) = disjoint_pair(&mut rng, k);
        let analytic = is_maximal_pair(&a, &b);
        let oracle = maximal_by_enlargement(&a, &b, ENLARGEMENT_EPS);
        if analytic == Ok(oracle) {
            agree += 1;
        } else if witness.is_none() {
            witness = Some(format!("pair {k}: predicate {analytic:?}, oracle {oracle}: {a} / {b}"));
        }
    }
    (agree, witness)
}

pub fn verify_wedges(seed: u64) -> SuiteReport {
    let mut s = Builder::new("wedges", seed);
    let mut rng = sampling::rng(seed);
    let n = 200;

    let ws: Vec<Wedge> = (0..n).map(|_| sampling::wedge(&mut rng)).collect();
    let idem = ws
        .iter()
        .filter(|w| {
            let shift = random_edge_shift(&mut rng, w);
            let again = make_wedge(2.0 * w.l1().vector(), 0.5 * w.l2().vector(), w.a() + shift);
            again.is_ok_and(|v| v.approx_eq(w, 1e-9))
        })
        .count();
    s.count("canonical form idempotence", n, idem, None);
    let inv = ws.iter().filter(|w| w.causal_complement().causal_complement() == **w).count();
    s.count("complement involution", n, inv, None);

    let pairs = 1000;
    let mut sym = 0;
    let mut agree = 0;
    let mut witness = None;
    for k in 0..pairs {
        let a = sampling::wedge(&mut rng);
        let b = if k % 3 == 0 {
            sampling::wedge(&mut rng)
        } else {
            a.causal_complement().translate(sampling::four_vector(&mut rng, 1.0))
        };
        let d = are_disjoint(&a, &b);
        sym += (d == are_disjoint(&b, &a)) as usize;
        if d == !wedges_intersect(&[a, b]) {
            agree += 1;
        } else if witness.is_none() {
            witness = Some(format!("{a} / {b}"));
        }
    }
    s.count("disjointness symmetry", pairs, sym, None);
    s.count("disjointness agrees with feasibility", pairs, agree, witness);

    let mut ok = 0;
    for k in 0..n {
        let a = sampling::wedge(&mut rng);
        let b = if k % 2 == 0 {
            sampling::wedge(&mut rng)
        } else {
            a.causal_complement().translate(sampling::four_vector(&mut rng, 1.0))
        };
        let data = characteristic_data(&b);
        let unit = family_unit(&b);
        let all = (-10..=10).all(|j| {
            let l = j as f64 * unit;
            are_disjoint(&a, &data.f_plus.member(l)) && are_disjoint(&a, &data.f_minus.member(l))
        });
        ok += (is_spacelike_separated(&a, &b) == all) as usize;
    }
    s.count("spacelike separation via characteristic families", n, ok, None);

    let (agree, witness) = maximal_pair_agreement(seed ^ 0x5eed, 1000);
    s.count("maximal pair agrees with enlargement", 1000, agree, witness);

    let l2p = LightlikeDirection::l2p().vector();
    let l = FourVector::new(1.0, 0.6, 0.8, 0.0);
    let ex = [
        is_maximal_pair(&Wedge::right(), &make_wedge(l2p, l, FourVector::zero()).expect("valid")),
        is_maximal_pair(&Wedge::right(), &make_wedge(l2p, l, FourVector::new(0.0, -1.0, 0.0, 0.0)).expect("valid")),
        is_maximal_pair(&Wedge::right(), &make_wedge(l2p, FourVector::new(1.0, 1.0, 0.0, 0.0), FourVector::zero()).expect("valid")),
    ];
    s.flag("maximal pair examples", ex == [Ok(true), Ok(false), Ok(false)], || format!("{ex:?}"));

    let mut ordered = 0;
    for _ in 0..100 {
        let w = sampling::wedge(&mut rng);
        let f = characteristic_data(&w).f_plus;
        let (x, y) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let (p, q) = (f.member(x), f.member(y));
        ordered += (is_subset(&p, &q) || is_subset(&q, &p)) as usize;
    }
    s.count("characteristic family linear order", 100, ordered, None);
    s.finish()
}

/// Family parameter unit for generators normalized to `ℓ₁·ℓ₂ = 2`, as for `W_R`.
pub fn family_unit(w: &Wedge) -> f64 {
    2.0 / w.l1().vector().dot(&w.l2().vector())
}

fn random_full_element(rng: &mut SeededRng) -> PoincareElement {
    let e = sampling::restricted_element(rng);
    let signs = [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, 1.0], [-1.0, 1.0, 1.0, 1.0], [-1.0, -1.0, -1.0, -1.0]];
    let r = LorentzMatrix::diagonal(signs[rng.random_range(0..4)]).expect("signs");
    PoincareElement::linear(r) * e
}

/// Max deviation of the Borchers relation on `points` values of `t` in
/// `[−1, 1]`, and of the group law `B(s)B(t) = B(s+t)` on the same grid.
pub fn borchers_grid(points: usize) -> (f64, f64) {
    let grid: Vec<f64> = (0..points).map(|k| -1.0 + 2.0 * k as f64 / (points - 1) as f64).collect();
    let wr = Wedge::right();
    let l = LightlikeDirection::l1p();
    let conj = grid.iter().map(|&t| borchers_conjugate(t, &l, &wr).map(|r| r.deviation).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let mut law: f64 = 0.0;
    for &a in &grid {
        for &b in &grid {
            let lhs = standard_boost(a, &wr) * standard_boost(b, &wr);
            law = law.max(lhs.max_abs_diff(&standard_boost(a + b, &wr)));
        }
    }
    (conj, law)
}

/// Factorization round trips on `n` random restricted elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationDemo {
    pub samples: usize,
    pub passed: usize,
    pub max_deviation: f64,
    pub max_length: usize,
    pub all_even: bool,
}

pub fn demo_factorization(seed: u64, n: usize, tol: f64) -> FactorizationDemo {
    let mut rng = sampling::rng(seed);
    let mut out = FactorizationDemo { samples: n, passed: 0, max_deviation: 0.0, max_length: 0, all_even: true };
    for _ in 0..n {
        let e = sampling::restricted_element(&mut rng);
        match factor_into_wedge_reflections(&e) {
            Ok(ws) => {
                let dev = reflection_product(&ws).max_abs_diff(&e);
                out.max_deviation = out.max_deviation.max(dev);
                out.max_length = out.max_length.max(ws.len());
                out.all_even &= ws.len() % 2 == 0;
                out.passed += (dev <= tol && ws.len() % 2 == 0) as usize;
            }
            Err(_) => out.max_deviation = f64::INFINITY,
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorchersDemo {
    pub grid_points: usize,
    pub max_deviation: f64,
    pub group_law_deviation: f64,
}

pub fn demo_borchers() -> BorchersDemo {
    let (max_deviation, group_law_deviation) = borchers_grid(41);
    BorchersDemo { grid_points: 41, max_deviation, group_law_deviation }
}

pub fn demo_paired_net(seed: u64) -> PairedNetReport {
    let mut rng = sampling::rng(seed);
    let w = sampling::wedge(&mut rng);
    paired_net_flow_check(&w, rng.random_range(0.1..0.5))
}

/// Default `ε` of the partial-wedge counterexample.
pub const COUNTEREXAMPLE_EPS: f64 = 0.1;

pub fn demo_counterexample(seed: u64) -> Result<CounterexampleReport> {
    counterexample_partial_wedges(COUNTEREXAMPLE_EPS, 200, seed)
}

pub fn verify_poincare(seed: u64, tol: f64) -> SuiteReport {
    let mut s = Builder::new("poincare", seed);
    let mut rng = sampling::rng(seed);
    let n = 200;

    let mut assoc = Vec::new();
    let mut inv = Vec::new();
    let mut action = Vec::new();
    let mut complement = Vec::new();
    for _ in 0..n {
        let (a, b, c) = (random_full_element(&mut rng), random_full_element(&mut rng), random_full_element(&mut rng));
        assoc.push(((a * b) * c).max_abs_diff(&(a * (b * c))));
        inv.push((a * a.inverse()).max_abs_diff(&PoincareElement::identity()).max((a.inverse() * a).max_abs_diff(&PoincareElement::identity())));
        let x = sampling::four_vector(&mut rng, 3.0);
        let w = sampling::wedge(&mut rng);
        let h = CharacteristicHyperplane::new(sampling::direction(&mut rng), rng.random_range(-2.0..2.0));
        let hp = (a * b).act(&h);
        let hq = a.act(&b.act(&h));
        let hd = if hp.approx_eq(&hq, 1e-9) { 0.0 } else { f64::INFINITY };
        action.push(((a * b).act(&x) - a.act(&b.act(&x))).max_abs().max((a * b).act(&w).distance(&a.act(&b.act(&w)))).max(hd));
        complement.push(a.act(&w.causal_complement()).distance(&a.act(&w).causal_complement()));
    }
    s.deviation("associativity", n, assoc, 1e-12 * 1e3);
    s.deviation("inverse", n, inv, 1e-12 * 1e3);
    s.deviation("action is a group action", n, action, 1e-9);
    s.deviation("complement equivariance", n, complement, 1e-9);

    let covariance: Vec<f64> = (0..n)
        .map(|_| {
            let l = random_full_element(&mut rng);
            let w = sampling::wedge(&mut rng);
            wedge_reflection(&l.act(&w)).max_abs_diff(&(l * wedge_reflection(&w) * l.inverse()))
        })
        .collect();
    s.deviation("reflection covariance", n, covariance, tol);
    let exact = wedge_reflection(&Wedge::right())
        == PoincareElement::linear(LorentzMatrix::diagonal([-1.0, -1.0, 1.0, 1.0]).expect("signs"));
    s.flag("reflection of W_R", exact, || format!("{:?}", wedge_reflection(&Wedge::right())));

    let r0 = LorentzMatrix::diagonal([1.0, -1.0, 1.0, -1.0]).expect("signs");
    let inversion: Vec<f64> = (0..n)
        .map(|_| {
            let l = boost(&Vector3::x(), rng.random_range(-2.0..2.0)) * rotation(&Vector3::x(), rng.random_range(-PI..PI));
            (r0 * l * r0.inverse()).max_abs_diff(&l.inverse())
        })
        .collect();
    s.deviation("conjugation inversion", n, inversion, 1e-12);

    let f = demo_factorization(seed ^ 0xfac7, n, tol);
    s.count("factorization round trip", f.samples, f.passed, Some(format!("max deviation {:e}", f.max_deviation)));

    let mut ok = 0;
    for _ in 0..n {
        let (a, b) = (sampling::wedge(&mut rng), sampling::wedge(&mut rng));
        let t = transport(&a, &b);
        ok += (t.is_restricted() && t.act(&a).approx_eq(&b, 1e-8)) as usize;
    }
    s.count("transport is restricted and exact", n, ok, None);

    let (conj, law) = borchers_grid(41);
    s.deviation("Borchers relation on 41-point grid", 1, [conj], tol);
    s.deviation("boost group law", 1, [law], 1e-10);
    s.finish()
}

pub fn verify_sl2c(seed: u64, tol: f64) -> SuiteReport {
    let mut s = Builder::new("sl2c", seed);
    let mut rng = sampling::rng(seed);
    let n = 500;
    let samples: Vec<(SL2C, SL2C)> = (0..n).map(|_| (sampling::sl2c(&mut rng), sampling::sl2c(&mut rng))).collect();
    s.deviation(
        "homomorphism",
        n,
        samples.iter().map(|(a, b)| (covering_map(a) * covering_map(b)).max_abs_diff(&covering_map(&(*a * *b)))),
        tol,
    );
    let id = LorentzMatrix::identity();
    let kernel = covering_map(&SL2C::identity().neg()).max_abs_diff(&id);
    s.deviation("kernel contains −1", 1, [kernel], tol);
    s.deviation(
        "lift round trip",
        n,
        samples.iter().map(|(a, _)| {
            let r = covering_map(a);
            lift(&r).map(|b| covering_map(&b).max_abs_diff(&r)).unwrap_or(f64::INFINITY)
        }),
        tol,
    );
    let t = LorentzMatrix::diagonal([-1.0, 1.0, 1.0, 1.0]).expect("signs");
    let p3 = LorentzMatrix::diagonal([1.0, 1.0, 1.0, -1.0]).expect("signs");
    s.deviation(
        "π covers conjugation by T",
        n,
        samples.iter().map(|(a, _)| covering_map(&reflection_action(ReflectionKind::Pt, a)).max_abs_diff(&(t * covering_map(a) * t))),
        tol,
    );
    s.deviation(
        "π₃ covers conjugation by P₃",
        n,
        samples.iter().map(|(a, _)| covering_map(&reflection_action(ReflectionKind::P3, a)).max_abs_diff(&(p3 * covering_map(a) * p3))),
        tol,
    );
    for case in GammaCase::ALL {
        let devs: Vec<f64> = samples
            .iter()
            .map(|(a, b)| {
                let l2 = a.entries().0;
                let l2 = if l2.norm() < 0.1 { Complex64::new(1.0, 0.0) } else { l2 };
                match case_matrix(case, l2) {
                    Ok(m) => covering_map(&gamma_case_map(case, l2, b)).max_abs_diff(&(m * covering_map(b) * m.inverse())),
                    Err(_) => f64::INFINITY,
                }
            })
            .collect();
        s.deviation(&format!("γ case {case:?} covers conjugation"), n, devs, tol);
    }
    let twist: Vec<f64> = (0..100)
        .map(|_| {
            let l2 = Complex64::new(rng.random_range(0.2..3.0), rng.random_range(-1.0..1.0));
            let target = SL2C::lower(Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
            match solve_lower_twist(l2, &target) {
                Ok(x) => (gamma_case_map(GammaCase::A, l2, &x) * x.inverse()).max_abs_diff(&target),
                Err(_) => f64::INFINITY,
            }
        })
        .collect();
    s.deviation("lower unipotent twist is onto", 100, twist, tol);
    s.finish()
}

/// Round trips of `restricted` restricted elements and `extended` elements
/// with `γ ∈ [0.5, 2]`, plus involutive oracles.
pub fn verify_reconstruction(seed: u64, restricted: usize, extended: usize, tol: f64) -> SuiteReport {
    let mut s = Builder::new("reconstruction", seed);
    let mut rng = sampling::rng(seed);
    let opts = ReconstructOptions { seed, verify_samples: 50, tol };
    let round = |e: ExtendedPoincareElement| -> f64 {
        match reconstruct_with(&PointMapOracle::new(e), &opts) {
            Ok(r) => r.element.max_abs_diff(&e),
            Err(_) => f64::INFINITY,
        }
    };
    let devs: Vec<f64> = (0..restricted).map(|_| round(sampling::restricted_element(&mut rng).extended())).collect();
    s.deviation("restricted round trip", restricted, devs, tol);
    let devs: Vec<f64> = (0..extended).map(|_| round(sampling::extended_element(&mut rng, 0.5, 2.0))).collect();
    s.deviation("extended round trip", extended, devs, tol);

    let involutions: Vec<f64> = (0..20)
        .map(|_| {
            let g = wedge_reflection(&sampling::wedge(&mut rng));
            match reconstruct(&PointMapOracle::new(g.extended())) {
                Ok(r) if r.involutive => (r.element.gamma() - 1.0).abs(),
                _ => f64::INFINITY,
            }
        })
        .collect();
    s.deviation("involutive oracle has γ = 1", 20, involutions, tol);

    let mut kept = 0;
    let mut parallel = 0;
    let mut maximal = 0;
    let trials = 100;
    for k in 0..trials {
        let e = sampling::extended_element(&mut rng, 0.5, 2.0);
        let w = sampling::wedge(&mut rng);
        kept += e.act(&w.causal_complement()).approx_eq(&e.act(&w).causal_complement(), 1e-9) as usize;
        let l = sampling::direction(&mut rng);
        let (h1, h2) = (CharacteristicHyperplane::new(l, 0.0), CharacteristicHyperplane::new(l, 1.0));
        let (g1, g2) = (e.act(&h1), e.act(&h2));
        parallel += (g1.l.is_parallel(&g2.l, 1e-9) && (g1.p - g2.p).abs() > 1e-9) as usize;
        let (a, b, _) = disjoint_pair(&mut rng, k);
        maximal += (is_maximal_pair(&a, &b) == is_maximal_pair(&e.act(&a), &e.act(&b))) as usize;
    }
    s.count("complement preservation", trials, kept, None);
    s.count("parallel hyperplanes stay distinct and parallel", trials, parallel, None);
    s.count("maximal pairs map to maximal pairs", trials, maximal, None);
    s.finish()
}

/// Sizes of the de Sitter suite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesitterSizes {
    pub pairs: usize,
    pub points: usize,
    pub round_trips: usize,
}

impl Default for DesitterSizes {
    fn default() -> Self {
        Self { pairs: 1000, points: 10_000, round_trips: 200 }
    }
}

/// Random pair mixing generic pairs, constructed disjoint pairs and
/// constructed intersecting pairs.
pub fn ds_pair(rng: &mut SeededRng, kind: usize) -> (DSWedge, DSWedge) {
    let l = sampling::restricted_lorentz(rng, 1.5);
    let (a, b) = match kind % 3 {
        0 => return (random_ds_wedge(rng), random_ds_wedge(rng)),
        1 => {
            let th = rng.random_range(0.0..PI / 2.0);
            (DSWedge::right(), DSWedge::new(LightlikeDirection::l2p(), LightlikeDirection::from_spatial(Vector3::new(th.cos(), th.sin(), 0.0))))
        }
        _ => {
            let th = rng.random_range(PI / 2.0 + 0.05..2.0 * PI - 0.05);
            let tilt = rng.random_range(-0.5..0.5f64);
            let n = Vector3::new(th.cos(), th.sin(), tilt).normalize();
            (DSWedge::right(), DSWedge::new(LightlikeDirection::l2p(), LightlikeDirection::from_spatial(n)))
        }
    };
    let b = b.expect("distinct generators");
    (act_lorentz(&l, &a), act_lorentz(&l, &b))
}

/// Agreement of the disjointness predicate with sampling.
pub fn ds_disjoint_agreement(seed: u64, pairs: usize, points: usize) -> (usize, Option<String>) {
    let mut rng = sampling::rng(seed);
    let mut agree = 0;
    let mut witness = None;
    for k in 0..pairs {
        let (a, b) = ds_pair(&mut rng, k);
        let predicate = ds_disjoint(&a, &b);
        let sampled = !sampled_intersect(&a, &b, points, &mut rng);
        if predicate == sampled {
            agree += 1;
        } else if witness.is_none() {
            witness = Some(format!("pair {k}: predicate {predicate}, sampling {sampled}"));
        }
    }
    (agree, witness)
}

/// The three tabulated line-meeting examples.
pub fn ds_line_examples() -> [bool; 3] {
    let e2 = DSPoint::new(FourVector::new(0.0, 0.0, 1.0, 0.0)).expect("on dS³");
    let l2p = LightlikeDirection::l2p();
    let w = |x: f64, y: f64| DSWedge::new(l2p, LightlikeDirection::from_spatial(Vector3::new(x, y, 0.0))).expect("distinct");
    [line_meets_wedge(&e2, &w(0.6, -0.8)).meets, line_meets_wedge(&e2, &w(0.6, 0.8)).meets, line_meets_wedge(&e2, &DSWedge::right()).meets]
}

pub fn verify_desitter(seed: u64, sizes: &DesitterSizes, tol: f64) -> SuiteReport {
    let mut s = Builder::new("desitter", seed);
    let (agree, witness) = ds_disjoint_agreement(seed, sizes.pairs, sizes.points);
    s.count("disjointness agrees with sampling", sizes.pairs, agree, witness);

    let mut rng = sampling::rng(seed ^ 0xd5);
    let mut dual_ok = 0;
    for _ in 0..100 {
        let (a, b) = (random_ds_wedge(&mut rng), random_ds_wedge(&mut rng));
        let Ok((c, d)) = dual_pair(&a, &b) else { continue };
        dual_ok += (0..500).all(|k| {
            let x = if k % 2 == 0 { random_point_in(&a, &mut rng) } else { random_point_in(&c, &mut rng) };
            (a.contains(&x) && b.contains(&x)) == (c.contains(&x) && d.contains(&x))
        }) as usize;
    }
    s.count("dual pair has the same intersection", 100, dual_ok, None);

    let mut preserved = 0;
    for k in 0..200 {
        let l = LorentzOracle(sampling::restricted_lorentz(&mut rng, 1.5));
        let (a, b) = ds_pair(&mut rng, k);
        let image = |w: &DSWedge| act_lorentz(&l.0, w);
        preserved += (ds_disjoint(&a, &b) == ds_disjoint(&image(&a), &image(&b))
            && image(&a.causal_complement()).approx_eq(&image(&a).causal_complement(), 1e-9)) as usize;
    }
    s.count("disjointness and complements preserved", 200, preserved, None);

    let theta = LorentzMatrix::diagonal([-1.0; 4]).expect("signs");
    let devs: Vec<f64> = (0..sizes.round_trips)
        .map(|k| {
            let mut l = sampling::restricted_lorentz(&mut rng, 1.5);
            if k % 4 == 3 {
                l = theta * l;
            }
            ds_reconstruct(&LorentzOracle(l), 50, seed).map(|r| r.lambda.max_abs_diff(&l)).unwrap_or(f64::INFINITY)
        })
        .collect();
    s.deviation("reconstruction round trip", sizes.round_trips, devs, tol);

    let lines = ds_line_examples();
    s.flag("line-meeting examples", lines == [true, false, false], || format!("{lines:?}"));

    let mut dichotomy = 0;
    for k in 0..20 {
        let w = random_ds_wedge(&mut rng);
        let f = wedge_frame(&w.ambient());
        let lw = *f.lambda() * crate::poincare::reflection_right() * f.lambda().inverse();
        let (oracle, expect) = if k % 2 == 0 { (lw, ReflectionForm::Reflection) } else { (theta * lw, ReflectionForm::ReflectionTimesTheta) };
        dichotomy += (reflection_dichotomy(&w, &LorentzOracle(oracle), seed) == Ok(expect)) as usize;
    }
    s.count("reflection dichotomy", 20, dichotomy, None);
    s.finish()
}

pub fn verify_modular(seed: u64, tol: f64) -> SuiteReport {
    let mut s = Builder::new("modular", seed);
    let entries = catalog();
    let mut devs = Vec::new();
    let mut abelian_ok = 0;
    for e in &entries {
        match modular_objects(&e.algebra, &e.omega) {
            Ok(mo) => {
                let r = tomita_report(&e.algebra, &e.omega, &mo);
                s.line(format!("{}: max Tomita deviation {:.1e}", e.name, r.max_deviation()));
                devs.push(r.max_deviation());
            }
            Err(err) => {
                s.line(format!("{}: {err}", e.name));
                devs.push(f64::INFINITY);
            }
        }
        abelian_ok += (!e.algebra.is_abelian() || e.algebra.is_maximal_abelian()) as usize;
    }
    s.deviation("Tomita identities on catalog", entries.len(), devs, tol);
    s.count("abelian with cyclic vector is maximal abelian", entries.len(), abelian_ok, None);

    let entangled = modular_objects(&left_qubit(), &StateVector::schmidt(&[0.5, 0.5]).expect("weights")).map(|mo| {
        let mut swap = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(j * 2 + i, i * 2 + j)] = Complex64::new(1.0, 0.0);
            }
        }
        (&mo.delta - CMatrix::identity(4, 4)).camax().max((&mo.j.unitary - swap).camax())
    });
    s.deviation("maximally entangled closed form", 1, [entangled.unwrap_or(f64::INFINITY)], tol);
    let schmidt = modular_objects(&left_qubit(), &StateVector::schmidt(&[0.7, 0.3]).expect("weights")).map(|mo| {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(0.7, 0.0), Complex64::new(0.3, 0.0)]));
        let di = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(1.0 / 0.7, 0.0), Complex64::new(1.0 / 0.3, 0.0)]));
        (&mo.delta - d.kronecker(&di)).camax()
    });
    s.deviation("Schmidt (0.7, 0.3) closed form", 1, [schmidt.unwrap_or(f64::INFINITY)], tol);

    for (name, f) in family_catalog() {
        let modular = match f.modular() {
            Ok(m) => m,
            Err(err) => {
                s.flag(&format!("{name}: CGMA"), false, || err.to_string());
                continue;
            }
        };
        match cgma_from_modular(&f, &modular) {
            Ok(CgmaOutcome::Permutations { taus }) => {
                let abelian: Vec<bool> = f.members().iter().map(|m| m.is_maximal_abelian()).collect();
                let props = group_and_properties(&taus, &PropertyInputs { maximal_abelian: Some(abelian), order: None });
                let perms: Vec<String> = taus.iter().map(|t| t.to_string()).collect();
                match props {
                    Ok(r) => {
                        s.line(format!("{name}: τ = [{}], group {} of order {}", perms.join(", "), r.group.label, r.group.order));
                        s.flag(&format!("{name}: group properties"), r.all_pass(), || format!("{r:?}"));
                    }
                    Err(err) => s.flag(&format!("{name}: group properties"), false, || err.to_string()),
                }
                s.deviation(&format!("{name}: JᵢJⱼJᵢ = J_τᵢ(j)"), 1, [involution_relation_deviation(&modular, &taus)], tol);
                let kernel = internal_symmetry_kernel(&f, &modular, &taus, 2);
                s.flag(&format!("{name}: kernel is internal and central"), kernel.elements.iter().all(|e| e.internal && e.central), || {
                    format!("{kernel:?}")
                });
            }
            Ok(CgmaOutcome::Violation { i, j, .. }) => s.flag(&format!("{name}: CGMA"), false, || format!("J{i} R{j} J{i} matches nothing")),
            Err(err) => s.flag(&format!("{name}: CGMA"), false, || err.to_string()),
        }
    }
    s.finish()
}

pub fn verify_coxeter(seed: u64) -> SuiteReport {
    let mut s = Builder::new("coxeter", seed);
    let labels = |n: usize, c: PairingConstraint| enumerate_families(n, c, true).map(|f| group_labels(&f));
    let show = |set: &std::collections::BTreeSet<String>| {
        if set.is_empty() {
            "none".to_string()
        } else {
            set.iter().cloned().collect::<Vec<_>>().join(", ")
        }
    };
    let checks: [(&str, usize, PairingConstraint, &[&str]); 6] = [
        ("n=2", 2, PairingConstraint::Unconstrained, &["S2"]),
        ("n=2 pairing", 2, PairingConstraint::NonabelianPairing, &["S2"]),
        ("n=3 all-fixed", 3, PairingConstraint::AllFixed, &["S3"]),
        ("n=4 pairing transitive", 4, PairingConstraint::NonabelianPairing, &[]),
        ("n=3 pairing", 3, PairingConstraint::NonabelianPairing, &[]),
        ("n=5 pairing", 5, PairingConstraint::NonabelianPairing, &[]),
    ];
    for (name, n, c, expect) in checks {
        match labels(n, c) {
            Ok(set) => {
                let want: std::collections::BTreeSet<String> = expect.iter().map(|x| x.to_string()).collect();
                let text = match (name, set.len()) {
                    ("n=3 all-fixed", 1) => format!("n=3: {} only", show(&set)),
                    ("n=2", _) => format!("n=2: {}", show(&set)),
                    _ => format!("{name}: {}", show(&set)),
                };
                s.line(text);
                s.flag(name, set == want, || format!("found {set:?}"));
            }
            Err(err) => s.flag(name, false, || err.to_string()),
        }
    }

    let mut total = 0;
    let mut ok = 0;
    for n in 1..=MAX_ENUMERATION_SIZE {
        for c in [PairingConstraint::AllFixed, PairingConstraint::NonabelianPairing, PairingConstraint::Unconstrained] {
            let Ok(all) = enumerate_families(n, c, false) else { continue };
            for e in &all {
                total += 1;
                let Ok(group) = generate_group(n, e.family.taus(), crate::tolerances::CLOSURE_CAP) else { continue };
                ok += (check_covariance(&e.family)
                    && fixed_points_transported(&e.family, &group)
                    && (!e.group.transitive || (fixedpoint_dichotomy_check(&e.family) && e.group.divisors_ok)))
                    as usize;
            }
            if n == MAX_ENUMERATION_SIZE {
                let t = all.iter().filter(|e| e.group.transitive).cloned().collect::<Vec<_>>();
                let mode = match c {
                    PairingConstraint::AllFixed => "all-fixed",
                    PairingConstraint::NonabelianPairing => "pairing",
                    PairingConstraint::Unconstrained => "unconstrained",
                };
                s.line(format!("n=6 {mode} transitive: {}", show(&group_labels(&t))));
            }
        }
    }
    s.count("fixed points transported and dichotomy", total, ok, None);
    let again = enumerate_families(MAX_ENUMERATION_SIZE, PairingConstraint::NonabelianPairing, false);
    let first = enumerate_families(MAX_ENUMERATION_SIZE, PairingConstraint::NonabelianPairing, false);
    s.flag("enumeration is deterministic", again.is_ok() && again == first, || "runs differ".into());
    s.finish()
}

/// Checks the counterexample report against the stated thresholds.
pub fn counterexample_holds(r: &CounterexampleReport) -> bool {
    r.triple_nonempty && r.witness_margin >= FEASIBILITY_MARGIN && r.image_empty && !r.image_certificates.is_empty()
}

/// Margin of `x` in the intersection of `ws`.
pub fn intersection_margin(ws: &[Wedge], x: &[f64]) -> f64 {
    let (rows, rhs) = wedge_system(ws);
    normalized_margin(&rows, &rhs, x)
}

/// Optimal common slack of the intersection of `ws`.
pub fn intersection_slack(ws: &[Wedge]) -> f64 {
    let (rows, rhs) = wedge_system(ws);
    max_slack(&rows, &rhs).slack
}

/// An oracle that is not induced by a point map: it exchanges `W_R` with its
/// complement and fixes every other wedge.
pub fn swap_oracle() -> FnOracle<impl Fn(&Wedge) -> Wedge, impl Fn(&Wedge) -> Wedge> {
    let f = |w: &Wedge| {
        let r = Wedge::right();
        if w.approx_eq(&r, 1e-12) {
            r.causal_complement()
        } else if w.approx_eq(&r.causal_complement(), 1e-12) {
            r
        } else {
            *w
        }
    };
    FnOracle { forward: f, inverse: f }
}
