//! Finite-dimensional modular theory: matrix algebras with a cyclic and
//! separating vector, their modular objects `(Δ, J)`, and the permutations
//! of an algebra family induced by the modular involutions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coxeter_index::{analyze_group, covariance_violation, generate_group, GroupReport, Permutation};
use crate::error::{Error, Result};
use crate::sampling;
use crate::tolerances::{CLOSURE_CAP, EIGEN_FLOOR_MODULAR, EPS_ALG, EPS_MODULAR, SPAN_MATCH};

type C = Complex64;
pub type CMatrix = DMatrix<C>;

/// Largest Hilbert dimension accepted by [`algebra_from_generators`].
pub const MAX_DIM: usize = 16;

/// Relative size below which a Gram–Schmidt residual counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-8;

/// Relative singular value below which a vector family is rank deficient.
const RANK_TOL: f64 = 1e-9;

/// Flow parameters at which `Δ^{it} M Δ^{−it} = M` is checked.
pub const FLOW_TIMES: [f64; 2] = [0.3, 1.7];

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn hs_inner(a: &CMatrix, b: &CMatrix) -> C {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

fn rank(cols: &CMatrix) -> usize {
    let sv = cols.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

fn as_columns(vs: &[DVector<C>], d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, vs.len());
    for (k, v) in vs.iter().enumerate() {
        m.set_column(k, v);
    }
    m
}

/// `Σ cᵢ bᵢ` projected out of `x`, twice for stability.
fn orthogonal_residual(basis: &[CMatrix], x: &CMatrix) -> CMatrix {
    let mut r = x.clone();
    for _ in 0..2 {
        for b in basis {
            let k = hs_inner(b, &r);
            r -= b * k;
        }
    }
    r
}

/// Pauli matrices `σ₁, σ₂, σ₃`.
pub fn pauli() -> [CMatrix; 3] {
    let i = C::i();
    [
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    ]
}

/// Matrix units `E_{ij}` of `M_n`.
pub fn matrix_units(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(i, j)] = c(1.0);
            out.push(e);
        }
    }
    out
}

/// A unital *-subalgebra of `M_d` given by a Hilbert–Schmidt orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixAlgebra {
    dim: usize,
    basis: Vec<CMatrix>,
}

/// The smallest unital *-algebra containing `gens`.
pub fn algebra_from_generators(dim: usize, gens: &[CMatrix]) -> Result<MatrixAlgebra> {
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge(dim));
    }
    if dim == 0 {
        return Err(Error::InvalidParameters("dimension must be positive".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.shape() != (dim, dim)) {
        return Err(Error::InvalidParameters(format!("generator of shape {:?} in dimension {dim}", g.shape())));
    }
    if gens.iter().any(|g| g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    let letters: Vec<CMatrix> = gens.iter().flat_map(|g| [g.clone(), g.adjoint()]).filter(|g| g.norm() > 0.0).collect();
    let mut basis = vec![CMatrix::identity(dim, dim) / c((dim as f64).sqrt())];
    let mut k = 0;
    while k < basis.len() {
        for g in &letters {
            let x = g * &basis[k];
            let scale = x.norm();
            if scale == 0.0 {
                continue;
            }
            let r = orthogonal_residual(&basis, &x);
            let n = r.norm();
            if n > DEPENDENCE_TOL * scale {
                basis.push(r / c(n));
            }
        }
        k += 1;
    }
    Ok(MatrixAlgebra { dim, basis })
}

impl MatrixAlgebra {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Hilbert–Schmidt distance from `x` to the algebra.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        orthogonal_residual(&self.basis, x).norm()
    }

    /// Largest residual of products and adjoints of basis elements.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = self.residual(&CMatrix::identity(self.dim, self.dim));
        for a in &self.basis {
            worst = worst.max(self.residual(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }

    pub fn is_abelian(&self) -> bool {
        self.basis.iter().all(|a| self.basis.iter().all(|b| (a * b - b * a).norm() < EPS_ALG))
    }

    /// `M = M′`.
    pub fn is_maximal_abelian(&self) -> bool {
        span_distance(self, &commutant(self)) < SPAN_MATCH
    }

    /// The algebra `V M V⁻¹` for a unitary `V`.
    pub fn conjugated(&self, v: &CMatrix) -> MatrixAlgebra {
        let va = v.adjoint();
        MatrixAlgebra { dim: self.dim, basis: self.basis.iter().map(|b| v * b * &va).collect() }
    }

    /// `{x ⊗ 1}` on `ℂᵈ ⊗ ℂᵉ`.
    pub fn tensor_left(&self, e: usize) -> MatrixAlgebra {
        let id = CMatrix::identity(e, e) / c((e as f64).sqrt());
        MatrixAlgebra { dim: self.dim * e, basis: self.basis.iter().map(|b| b.kronecker(&id)).collect() }
    }

    /// `{1 ⊗ x}` on `ℂᵉ ⊗ ℂᵈ`.
    pub fn tensor_right(&self, e: usize) -> MatrixAlgebra {
        let id = CMatrix::identity(e, e) / c((e as f64).sqrt());
        MatrixAlgebra { dim: self.dim * e, basis: self.basis.iter().map(|b| id.kronecker(b)).collect() }
    }
}

/// The full matrix algebra `M_n`.
pub fn full_algebra(n: usize) -> MatrixAlgebra {
    MatrixAlgebra { dim: n, basis: matrix_units(n) }
}

/// The diagonal algebra of `M_n`.
pub fn diagonal_algebra(n: usize) -> MatrixAlgebra {
    let basis = (0..n)
        .map(|i| {
            let mut e = CMatrix::zeros(n, n);
            e[(i, i)] = c(1.0);
            e
        })
        .collect();
    MatrixAlgebra { dim: n, basis }
}

/// Largest principal-angle sine between the Hilbert–Schmidt spans; 1 when
/// the dimensions differ.
pub fn span_distance(a: &MatrixAlgebra, b: &MatrixAlgebra) -> f64 {
    if a.dim != b.dim || a.basis.len() != b.basis.len() {
        return 1.0;
    }
    let n = a.basis.len();
    let d2 = a.dim * a.dim;
    let qa = CMatrix::from_fn(d2, n, |i, k| a.basis[k][i]);
    let qb = CMatrix::from_fn(d2, n, |i, k| b.basis[k][i]);
    let r = &qa - &qb * (qb.adjoint() * &qa);
    r.svd(false, false).singular_values.max().min(1.0)
}

/// `{X : [X, b] = 0 for all b ∈ M}`, as the null space of `Σ L_b† L_b` with
/// `L_b vec(X) = vec(Xb − bX)`.
pub fn commutant(m: &MatrixAlgebra) -> MatrixAlgebra {
    let d = m.dim;
    let id = CMatrix::identity(d, d);
    let mut g = CMatrix::zeros(d * d, d * d);
    for b in &m.basis {
        let bt = b.transpose();
        let bc = conj(b);
        let ba = b.adjoint();
        g += (&bc * &bt).kronecker(&id) + id.kronecker(&(&ba * b)) - bc.kronecker(b) - bt.kronecker(&ba);
    }
    let eig = g.symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    let basis = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| e.abs() <= 1e-9 * scale)
        .map(|(k, _)| CMatrix::from_column_slice(d, d, eig.eigenvectors.column(k).as_slice()))
        .collect();
    MatrixAlgebra { dim: d, basis }
}

/// A unit vector of `ℂᵈ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector(DVector<C>);

impl StateVector {
    pub fn new(v: DVector<C>) -> Result<Self> {
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if (v.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameters(format!("state has norm {}", v.norm())));
        }
        Ok(Self(v))
    }

    pub fn normalized(v: DVector<C>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameters("state vector is zero".into()));
        }
        Self::new(v / c(n))
    }

    /// `Σ √pᵢ eᵢ ⊗ eᵢ` on `ℂⁿ ⊗ ℂⁿ`.
    pub fn schmidt(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        let mut v = DVector::zeros(n * n);
        for (i, &p) in weights.iter().enumerate() {
            v[i * n + i] = c(p.max(0.0).sqrt());
        }
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &DVector<C> {
        &self.0
    }
}

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(DVector::from_iterator(v.len(), v.into_iter().map(|[re, im]| C::new(re, im))))
    }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(s: StateVector) -> Self {
        s.0.iter().map(|z| [z.re, z.im]).collect()
    }
}

/// Cyclic iff `{bΩ}` spans `ℂᵈ`; separating iff `{b′Ω}` does for `b′ ∈ M′`.
pub fn is_cyclic_separating(m: &MatrixAlgebra, omega: &StateVector) -> bool {
    if omega.dim() != m.dim {
        return false;
    }
    let images = |a: &MatrixAlgebra| as_columns(&a.basis.iter().map(|b| b * omega.vector()).collect::<Vec<_>>(), a.dim);
    rank(&images(m)) == m.dim && rank(&images(&commutant(m))) == m.dim
}

/// An operator `x ↦ Ux` or, when antilinear, `x ↦ U x̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct JOperator {
    pub unitary: CMatrix,
    pub antilinear: bool,
}

impl JOperator {
    pub fn identity(d: usize) -> Self {
        Self { unitary: CMatrix::identity(d, d), antilinear: false }
    }

    pub fn apply(&self, x: &DVector<C>) -> DVector<C> {
        if self.antilinear {
            &self.unitary * x.map(|z| z.conj())
        } else {
            &self.unitary * x
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &JOperator) -> JOperator {
        let inner = if self.antilinear { conj(&other.unitary) } else { other.unitary.clone() };
        JOperator { unitary: &self.unitary * inner, antilinear: self.antilinear ^ other.antilinear }
    }

    /// `Z b Z⁻¹` for unitary `U`.
    pub fn conjugate(&self, b: &CMatrix) -> CMatrix {
        let inner = if self.antilinear { conj(b) } else { b.clone() };
        &self.unitary * inner * self.unitary.adjoint()
    }

    pub fn conjugate_algebra(&self, m: &MatrixAlgebra) -> MatrixAlgebra {
        MatrixAlgebra { dim: m.dim, basis: m.basis.iter().map(|b| self.conjugate(b)).collect() }
    }

    /// Entrywise distance; infinite for operators of different linearity.
    pub fn distance(&self, other: &JOperator) -> f64 {
        if self.antilinear != other.antilinear {
            return f64::INFINITY;
        }
        (&self.unitary - &other.unitary).camax()
    }
}

/// `Δ` and `J = U ∘ conj` for a pair `(M, Ω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularObjects {
    pub delta: CMatrix,
    pub j: JOperator,
}

impl ModularObjects {
    /// `Δ^{it}`.
    pub fn delta_it(&self, t: f64) -> CMatrix {
        let eig = self.delta.clone().symmetric_eigen();
        let phases = eig.eigenvalues.map(|l| C::from_polar(1.0, t * l.max(EIGEN_FLOOR_MODULAR).ln()));
        &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
    }
}

fn hermitian_power(m: &CMatrix, p: f64) -> CMatrix {
    let eig = m.clone().symmetric_eigen();
    let d = eig.eigenvalues.map(|l| c(l.max(EIGEN_FLOOR_MODULAR).powf(p)));
    &eig.eigenvectors * CMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Builds `S: bΩ ↦ b*Ω` as `S = U_S ∘ conj`, then `Δ = S†S = conj(U_S†U_S)`
/// and `J = SΔ^{−1/2}`.
pub fn modular_objects(m: &MatrixAlgebra, omega: &StateVector) -> Result<ModularObjects> {
    if !is_cyclic_separating(m, omega) {
        return Err(Error::NotCyclicSeparating);
    }
    let d = m.dim;
    let w = omega.vector();
    let vbar = as_columns(&m.basis.iter().map(|b| (b * w).map(|z| z.conj())).collect::<Vec<_>>(), d);
    let targets = as_columns(&m.basis.iter().map(|b| b.adjoint() * w).collect::<Vec<_>>(), d);
    let pinv = vbar.pseudo_inverse(RANK_TOL).map_err(|e| Error::InvalidParameters(e.to_string()))?;
    let us = targets * pinv;
    let delta = conj(&(us.adjoint() * &us));
    let delta = (&delta + delta.adjoint()) * c(0.5);
    let uj = &us * conj(&hermitian_power(&delta, -0.5));
    Ok(ModularObjects { delta, j: JOperator { unitary: uj, antilinear: true } })
}

/// Deviations of the Tomita identities for one pair `(M, Ω)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomitaReport {
    pub j_omega: f64,
    pub delta_omega: f64,
    pub j_squared: f64,
    pub j_delta_j: f64,
    pub commutant_distance: f64,
    pub flow_distance: f64,
}

impl TomitaReport {
    pub fn max_deviation(&self) -> f64 {
        [self.j_omega, self.delta_omega, self.j_squared, self.j_delta_j, self.commutant_distance, self.flow_distance]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation() < tol
    }
}

pub fn tomita_report(m: &MatrixAlgebra, omega: &StateVector, mo: &ModularObjects) -> TomitaReport {
    let w = omega.vector();
    let j = &mo.j;
    let id = CMatrix::identity(m.dim, m.dim);
    let jj = j.compose(j);
    let jdj = j.conjugate(&mo.delta);
    let delta_inv = hermitian_power(&mo.delta, -1.0);
    let flow = FLOW_TIMES
        .iter()
        .map(|&t| {
            let u = JOperator { unitary: mo.delta_it(t), antilinear: false };
            span_distance(&u.conjugate_algebra(m), m)
        })
        .fold(0.0, f64::max);
    TomitaReport {
        j_omega: (j.apply(w) - w).camax(),
        delta_omega: (&mo.delta * w - w).camax(),
        j_squared: if jj.antilinear { f64::INFINITY } else { (&jj.unitary - &id).camax() },
        j_delta_j: (jdj - delta_inv).camax(),
        commutant_distance: span_distance(&j.conjugate_algebra(m), &commutant(m)),
        flow_distance: flow,
    }
}

/// Algebras indexed by `0..n` with a common state.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraFamily {
    members: Vec<MatrixAlgebra>,
    omega: StateVector,
}

impl AlgebraFamily {
    /// Rejects members of the wrong dimension and members that coincide.
    pub fn new(members: Vec<MatrixAlgebra>, omega: StateVector) -> Result<Self> {
        if let Some(m) = members.iter().find(|m| m.dim != omega.dim()) {
            return Err(Error::InvalidParameters(format!("member of dimension {} with state of dimension {}", m.dim, omega.dim())));
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if span_distance(&members[i], &members[j]) <= SPAN_MATCH {
                    return Err(Error::RedundantMember(i + 1, j + 1));
                }
            }
        }
        Ok(Self { members, omega })
    }

    pub fn members(&self) -> &[MatrixAlgebra] {
        &self.members
    }

    pub fn omega(&self) -> &StateVector {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn modular(&self) -> Result<Vec<ModularObjects>> {
        self.members.iter().map(|m| modular_objects(m, &self.omega)).collect()
    }
}

/// Family input: `{"dim": d, "omega": [[re,im]…], "members": [{"generators": [matrix…]}…]}`
/// with matrices as row lists of `[re, im]` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub dim: usize,
    pub omega: Vec<[f64; 2]>,
    pub members: Vec<MemberSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub generators: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn matrix_from_rows(dim: usize, rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidParameters(format!("generator is not {dim}×{dim}")));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| C::new(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl FamilySpec {
    pub fn build(&self) -> Result<AlgebraFamily> {
        if self.dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(self.dim));
        }
        if self.omega.len() != self.dim {
            return Err(Error::InvalidParameters(format!("state has {} entries, expected {}", self.omega.len(), self.dim)));
        }
        let omega = StateVector::try_from(self.omega.clone())?;
        let members = self
            .members
            .iter()
            .map(|m| {
                let gens = m.generators.iter().map(|g| matrix_from_rows(self.dim, g)).collect::<Result<Vec<_>>>()?;
                algebra_from_generators(self.dim, &gens)
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraFamily::new(members, omega)
    }
}

/// Outcome of extracting `τᵢ` from `JᵢℛⱼJᵢ = ℛ_{τᵢ(j)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CgmaOutcome {
    Permutations { taus: Vec<Permutation> },
    /// `JᵢℛⱼJᵢ` matches no member; 1-based indices and distances to every member.
    Violation { i: usize, j: usize, distances: Vec<f64> },
}

pub fn cgma_permutations(f: &AlgebraFamily) -> Result<CgmaOutcome> {
    let modular = f.modular()?;
    cgma_from_modular(f, &modular)
}

pub fn cgma_from_modular(f: &AlgebraFamily, modular: &[ModularObjects]) -> Result<CgmaOutcome> {
    let n = f.len();
    let mut taus = Vec::with_capacity(n);
    for (i, mo) in modular.iter().enumerate() {
        let mut images = Vec::with_capacity(n);
        for (j, m) in f.members.iter().enumerate() {
            let image = mo.j.conjugate_algebra(m);
            let distances: Vec<f64> = f.members.iter().map(|k| span_distance(&image, k)).collect();
            match distances.iter().position(|&dist| dist < SPAN_MATCH) {
                Some(k) => images.push(k),
                None => return Ok(CgmaOutcome::Violation { i: i + 1, j: j + 1, distances }),
            }
        }
        match Permutation::from_images(images) {
            Ok(p) => taus.push(p),
            Err(_) => {
                return Err(Error::VerificationFailed(format!("J{} maps two members onto the same algebra", i + 1)));
            }
        }
    }
    Ok(CgmaOutcome::Permutations { taus })
}

/// Largest `‖JᵢJⱼJᵢ − J_{τᵢ(j)}‖` over all pairs.
pub fn involution_relation_deviation(modular: &[ModularObjects], taus: &[Permutation]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, ji) in modular.iter().enumerate() {
        for (j, jj) in modular.iter().enumerate() {
            let lhs = ji.j.compose(&jj.j).compose(&ji.j);
            worst = worst.max(lhs.distance(&modular[taus[i].apply(j)].j));
        }
    }
    worst
}

/// Optional data for the order-dependent checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropertyInputs {
    /// Whether each member is maximally abelian.
    pub maximal_abelian: Option<Vec<bool>>,
    /// `leq[i][j]` iff `i ≤ j`.
    pub order: Option<Vec<Vec<bool>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPropertiesReport {
    pub group: GroupReport,
    /// `τᵢ² = ι`.
    pub involutive: bool,
    /// `τᵢτⱼτᵢ = τ_{τᵢ(j)}`.
    pub covariant: bool,
    /// `τ(k) = k ⟹ ττ_k = τ_kτ` over the whole group.
    pub stabilizer_commutation: bool,
    /// `τᵢ(i) = i ⟺ ℛᵢ maximally abelian`, and for transitive groups one
    /// fixed index forces all.
    pub fixed_points: Option<bool>,
    /// Fixed indices are atoms of the order.
    pub fixed_points_atoms: Option<bool>,
    /// `i ≤ j ≤ k ≤ l ⟹ τᵢ(j) ≥ τ_l(k)`.
    pub order_reversal: Option<bool>,
}

impl GroupPropertiesReport {
    pub fn all_pass(&self) -> bool {
        self.involutive
            && self.covariant
            && self.stabilizer_commutation
            && self.fixed_points.unwrap_or(true)
            && self.fixed_points_atoms.unwrap_or(true)
            && self.order_reversal.unwrap_or(true)
    }
}

/// Closes `{τᵢ}` and checks the combinatorial consequences of covariance.
pub fn group_and_properties(taus: &[Permutation], inputs: &PropertyInputs) -> Result<GroupPropertiesReport> {
    let n = taus.len();
    if let Some(t) = taus.iter().find(|t| t.n() != n) {
        return Err(Error::InvalidFamily(format!("{t} does not act on {n} points")));
    }
    let group = generate_group(n, taus, CLOSURE_CAP)?;
    let report = analyze_group(n, taus)?;
    let stabilizer_commutation = group.iter().all(|t| (0..n).filter(|&k| t.apply(k) == k).all(|k| t.compose(&taus[k]) == taus[k].compose(t)));
    let fixed: Vec<bool> = (0..n).map(|i| taus[i].apply(i) == i).collect();
    let fixed_points = inputs.maximal_abelian.as_ref().map(|ma| {
        let matches = ma.len() == n && ma.iter().zip(&fixed).all(|(a, f)| a == f);
        let dichotomy = !report.transitive || fixed.iter().all(|&f| f) || fixed.iter().all(|&f| !f);
        matches && dichotomy
    });
    let (fixed_points_atoms, order_reversal) = match &inputs.order {
        None => (None, None),
        Some(leq) => {
            if leq.len() != n || leq.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidParameters("order relation has the wrong size".into()));
            }
            let atoms = (0..n).filter(|&i| fixed[i]).all(|i| (0..n).all(|j| !leq[j][i] || j == i));
            let mut reversal = true;
            for i in 0..n {
                for j in (0..n).filter(|&j| leq[i][j]) {
                    for k in (0..n).filter(|&k| leq[j][k]) {
                        for l in (0..n).filter(|&l| leq[k][l]) {
                            reversal &= leq[taus[l].apply(k)][taus[i].apply(j)];
                        }
                    }
                }
            }
            (Some(atoms), Some(reversal))
        }
    };
    Ok(GroupPropertiesReport {
        group: report,
        involutive: taus.iter().all(Permutation::is_involution),
        covariant: covariance_violation(taus).is_none(),
        stabilizer_commutation,
        fixed_points,
        fixed_points_atoms,
        order_reversal,
    })
}

/// A word `J_{i₁}⋯J_{iₘ}` inducing the identity permutation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelElement {
    /// 1-based letters; empty for the identity.
    pub word: Vec<usize>,
    pub antiunitary: bool,
    /// Fixes the span of every member.
    pub internal: bool,
    /// Commutes with every `Jᵢ`.
    pub central: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub words_checked: usize,
    /// Distinct operators, shortest word first.
    pub elements: Vec<KernelElement>,
}

impl KernelReport {
    /// Kernel elements given by words of even length.
    pub fn even(&self) -> Vec<&KernelElement> {
        self.elements.iter().filter(|e| !e.antiunitary).collect()
    }
}

/// Words of length at most `max_word_len` whose permutation is the identity,
/// deduplicated as operators.
pub fn internal_symmetry_kernel(f: &AlgebraFamily, modular: &[ModularObjects], taus: &[Permutation], max_word_len: usize) -> KernelReport {
    let n = f.len();
    let d = f.omega.dim();
    let mut elements: Vec<(JOperator, KernelElement)> = Vec::new();
    let mut words_checked = 0;
    let mut layer: Vec<(Vec<usize>, Permutation, JOperator)> = vec![(Vec::new(), Permutation::identity(n), JOperator::identity(d))];
    for len in 0..=max_word_len {
        for (word, perm, op) in &layer {
            words_checked += 1;
            if !perm.is_identity() || elements.iter().any(|(o, _)| o.distance(op) < EPS_MODULAR) {
                continue;
            }
            let internal = f.members.iter().all(|m| span_distance(&op.conjugate_algebra(m), m) < EPS_MODULAR);
            let central = modular.iter().all(|mo| op.compose(&mo.j).distance(&mo.j.compose(op)) < EPS_MODULAR);
            elements.push((
                op.clone(),
                KernelElement { word: word.iter().map(|i| i + 1).collect(), antiunitary: op.antilinear, internal, central },
            ));
        }
        if len == max_word_len {
            break;
        }
        layer = layer
            .iter()
            .flat_map(|(word, perm, op)| {
                (0..n).map(move |i| {
                    let mut w = word.clone();
                    w.push(i);
                    (w, perm.compose(&taus[i]), op.compose(&modular[i].j))
                })
            })
            .collect();
    }
    KernelReport { words_checked, elements: elements.into_iter().map(|(_, e)| e).collect() }
}

/// A unitary drawn as the Q factor of a random complex matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    let m = CMatrix::from_fn(d, d, |_, _| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}

/// `M₂ ⊗ 1` on `ℂ² ⊗ ℂ²`.
pub fn left_qubit() -> MatrixAlgebra {
    full_algebra(2).tensor_left(2)
}

/// `1 ⊗ M₂` on `ℂ² ⊗ ℂ²`.
pub fn right_qubit() -> MatrixAlgebra {
    full_algebra(2).tensor_right(2)
}

/// `(e₁⊗e₁ + e₂⊗e₂)/√2`.
pub fn maximally_entangled() -> StateVector {
    StateVector::schmidt(&[0.5, 0.5]).expect("unit weights")
}

/// The qubit state with Bloch vector `(1,1,1)/√3`.
pub fn diagonal_bloch_state() -> StateVector {
    let theta = (1.0 / 3f64.sqrt()).acos();
    let v = DVector::from_vec(vec![c((theta / 2.0).cos()), C::from_polar((theta / 2.0).sin(), PI / 4.0)]);
    StateVector::new(v).expect("unit vector")
}

/// The abelian algebra generated by one Hermitian matrix.
pub fn abelian_algebra(h: &CMatrix) -> MatrixAlgebra {
    algebra_from_generators(h.nrows(), std::slice::from_ref(h)).expect("square generator")
}

/// A named pair `(M, Ω)` with `Ω` cyclic and separating.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: MatrixAlgebra,
    pub omega: StateVector,
}

/// Built-in pairs up to dimension 9.
pub fn catalog() -> Vec<CatalogEntry> {
    let entry = |name: &str, algebra, omega| CatalogEntry { name: name.into(), algebra, omega };
    let mut rng = sampling::rng(2024);
    let v = random_unitary(&mut rng, 9);
    let generic9 = StateVector::normalized(DVector::from_fn(9, |_, _| C::new(rng.random_range(0.2..1.0), rng.random_range(-1.0..1.0))))
        .expect("nonzero");
    let generic3 = StateVector::normalized(DVector::from_vec(vec![C::new(0.6, 0.1), C::new(0.3, -0.5), c(0.5)])).expect("nonzero");
    let [sx, ..] = pauli();
    vec![
        entry("M2⊗1, maximally entangled", left_qubit(), maximally_entangled()),
        entry("1⊗M2, maximally entangled", right_qubit(), maximally_entangled()),
        entry("M2⊗1, Schmidt (0.7, 0.3)", left_qubit(), StateVector::schmidt(&[0.7, 0.3]).expect("unit weights")),
        entry("diagonal in M2, (1,1)/√2", diagonal_algebra(2), StateVector::normalized(DVector::from_element(2, c(1.0))).expect("nonzero")),
        entry("σ₁ algebra, Bloch (1,1,1)/√3", abelian_algebra(&sx), diagonal_bloch_state()),
        entry("diagonal in M3, generic", diagonal_algebra(3), generic3),
        entry("M3⊗1, Schmidt (0.5, 0.3, 0.2)", full_algebra(3).tensor_left(3), StateVector::schmidt(&[0.5, 0.3, 0.2]).expect("unit weights")),
        entry("V(M3⊗1)V*, generic", full_algebra(3).tensor_left(3).conjugated(&v), generic9),
    ]
}

/// `{M₂⊗1, 1⊗M₂}` with a Schmidt state.
pub fn tensor_split_family(weights: &[f64; 2]) -> AlgebraFamily {
    AlgebraFamily::new(vec![left_qubit(), right_qubit()], StateVector::schmidt(weights).expect("unit weights")).expect("distinct members")
}

/// The abelian algebras generated by `σ₁, σ₂, σ₃` with the state of Bloch
/// vector `(1,1,1)/√3`. Each `Jᵢ` reflects the Bloch sphere through the plane
/// spanned by axis `i` and `(1,1,1)`, exchanging the two other axes, so the
/// family realizes the three transpositions of `S₃`.
pub fn s3_family() -> AlgebraFamily {
    let members = pauli().iter().map(abelian_algebra).collect();
    AlgebraFamily::new(members, diagonal_bloch_state()).expect("distinct members")
}

/// `{M₂⊗1, V(M₂⊗1)V*}` for a seeded unitary `V`: covariance fails.
pub fn conjugated_pair_family(seed: u64) -> AlgebraFamily {
    let v = random_unitary(&mut sampling::rng(seed), 4);
    AlgebraFamily::new(vec![left_qubit(), left_qubit().conjugated(&v)], maximally_entangled()).expect("distinct members")
}

/// Built-in families for the covariance checks.
pub fn family_catalog() -> Vec<(String, AlgebraFamily)> {
    vec![
        ("tensor split, maximally entangled".into(), tensor_split_family(&[0.5, 0.5])),
        ("tensor split, Schmidt (0.7, 0.3)".into(), tensor_split_family(&[0.7, 0.3])),
        ("diagonal in M2".into(), AlgebraFamily::new(vec![diagonal_algebra(2)], StateVector::normalized(DVector::from_element(2, c(1.0))).expect("nonzero")).expect("one member")),
        ("Pauli abelian triple".into(), s3_family()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).camax()
    }

    fn swap() -> CMatrix {
        let mut s = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                s[(j * 2 + i, i * 2 + j)] = c(1.0);
            }
        }
        s
    }

    #[test]
    fn generator_examples() {
        let [sx, _, sz] = pauli();
        let diag = algebra_from_generators(2, std::slice::from_ref(&sz)).unwrap();
        assert_eq!(diag.basis().len(), 2);
        let gens: Vec<CMatrix> = matrix_units(2).iter().map(|a| a.kronecker(&CMatrix::identity(2, 2))).collect();
        let left = algebra_from_generators(4, &gens).unwrap();
        assert_eq!(left.basis().len(), 4);
        assert!(span_distance(&left, &left_qubit()) < 1e-12);
        let full = algebra_from_generators(2, &[sx, sz]).unwrap();
        assert_eq!(full.basis().len(), 4);
        assert!(full.closure_residual() < EPS_ALG);
        let again = algebra_from_generators(4, left.basis()).unwrap();
        assert!(span_distance(&again, &left) < 1e-12);
        assert_eq!(algebra_from_generators(17, &[]), Err(Error::DimensionTooLarge(17)));
    }

    #[test]
    fn commutant_examples() {
        assert!(span_distance(&commutant(&left_qubit()), &right_qubit()) < 1e-10);
        assert!(span_distance(&commutant(&diagonal_algebra(2)), &diagonal_algebra(2)) < 1e-10);
        let scalars = commutant(&full_algebra(2));
        assert_eq!(scalars.basis().len(), 1);
        assert!(scalars.residual(&CMatrix::identity(2, 2)) < 1e-10);
        for e in catalog() {
            assert!(span_distance(&commutant(&commutant(&e.algebra)), &e.algebra) < 1e-9, "{}", e.name);
        }
    }

    #[test]
    fn cyclic_separating_examples() {
        assert!(is_cyclic_separating(&left_qubit(), &maximally_entangled()));
        let mut e11 = DVector::zeros(4);
        e11[0] = c(1.0);
        assert!(!is_cyclic_separating(&left_qubit(), &StateVector::new(e11).unwrap()));
        let plus = StateVector::normalized(DVector::from_element(2, c(1.0))).unwrap();
        assert!(is_cyclic_separating(&diagonal_algebra(2), &plus));
    }

    #[test]
    fn maximally_entangled_closed_form() {
        let mo = modular_objects(&left_qubit(), &maximally_entangled()).unwrap();
        assert!(close(&mo.delta, &CMatrix::identity(4, 4)) < 1e-10);
        // J(ξ⊗η) = η̄⊗ξ̄
        assert!(close(&mo.j.unitary, &swap()) < 1e-10);
        let xi = DVector::from_vec(vec![C::new(0.3, 0.4), C::new(-0.2, 0.8)]);
        let eta = DVector::from_vec(vec![C::new(1.0, -0.5), C::new(0.1, 0.6)]);
        let lhs = mo.j.apply(&xi.kronecker(&eta));
        let rhs = eta.map(|z| z.conj()).kronecker(&xi.map(|z| z.conj()));
        assert!((lhs - rhs).camax() < 1e-10);
    }

    #[test]
    fn schmidt_closed_form() {
        let mo = modular_objects(&left_qubit(), &StateVector::schmidt(&[0.7, 0.3]).unwrap()).unwrap();
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.7), c(0.3)]));
        let dinv = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0 / 0.7), c(1.0 / 0.3)]));
        assert!(close(&mo.delta, &d.kronecker(&dinv)) < 1e-10);
    }

    #[test]
    fn abelian_closed_form() {
        let plus = StateVector::normalized(DVector::from_element(2, c(1.0))).unwrap();
        let mo = modular_objects(&diagonal_algebra(2), &plus).unwrap();
        assert!(close(&mo.delta, &CMatrix::identity(2, 2)) < 1e-10);
        assert!(close(&mo.j.unitary, &CMatrix::identity(2, 2)) < 1e-10);
        let mut e11 = DVector::zeros(4);
        e11[0] = c(1.0);
        assert_eq!(modular_objects(&left_qubit(), &StateVector::new(e11).unwrap()), Err(Error::NotCyclicSeparating));
    }

    #[test]
    fn tomita_identities_on_catalog() {
        for e in catalog() {
            let mo = modular_objects(&e.algebra, &e.omega).unwrap();
            let r = tomita_report(&e.algebra, &e.omega, &mo);
            assert!(r.passes(EPS_MODULAR), "{}: {r:?}", e.name);
            if e.algebra.is_abelian() {
                assert!(e.algebra.is_maximal_abelian(), "{}", e.name);
            }
        }
    }

    #[test]
    fn tensor_split_permutations() {
        let f = tensor_split_family(&[0.5, 0.5]);
        let modular = f.modular().unwrap();
        let CgmaOutcome::Permutations { taus } = cgma_from_modular(&f, &modular).unwrap() else { panic!("violation") };
        let swap = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        assert_eq!(taus, vec![swap.clone(), swap]);
        let report = group_and_properties(&taus, &PropertyInputs { maximal_abelian: Some(vec![false, false]), order: None }).unwrap();
        assert_eq!(report.group.label, "S2");
        assert!(report.all_pass());
        assert!(involution_relation_deviation(&modular, &taus) < 1e-8);
    }

    #[test]
    fn abelian_member_is_fixed() {
        let (_, f) = family_catalog().into_iter().find(|(n, _)| n == "diagonal in M2").unwrap();
        let CgmaOutcome::Permutations { taus } = cgma_permutations(&f).unwrap() else { panic!("violation") };
        assert_eq!(taus, vec![Permutation::identity(1)]);
    }

    #[test]
    fn pauli_triple_realizes_s3() {
        let f = s3_family();
        let modular = f.modular().unwrap();
        let CgmaOutcome::Permutations { taus } = cgma_from_modular(&f, &modular).unwrap() else { panic!("violation") };
        let expected: Vec<Permutation> =
            [[2, 3], [1, 3], [1, 2]].iter().map(|c| Permutation::from_cycles(3, &[c.as_slice()]).unwrap()).collect();
        assert_eq!(taus, expected);
        let report = group_and_properties(&taus, &PropertyInputs { maximal_abelian: Some(vec![true; 3]), order: None }).unwrap();
        assert_eq!((report.group.order, report.group.label.as_str()), (6, "S3"));
        assert!(report.all_pass());
        assert!(involution_relation_deviation(&modular, &taus) < 1e-8);
    }

    #[test]
    fn violation_examples() {
        // the listed pair {M₂⊗1, diagonal⊗1} fails cyclicity before covariance
        let f = AlgebraFamily::new(vec![left_qubit(), diagonal_algebra(2).tensor_left(2)], maximally_entangled()).unwrap();
        assert_eq!(cgma_permutations(&f), Err(Error::NotCyclicSeparating));
        match cgma_permutations(&conjugated_pair_family(4)).unwrap() {
            CgmaOutcome::Violation { i, distances, .. } => {
                assert_eq!(i, 1);
                assert!(distances.iter().all(|&d| d > SPAN_MATCH));
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn redundant_member_rejected() {
        assert_eq!(AlgebraFamily::new(vec![left_qubit(), left_qubit()], maximally_entangled()), Err(Error::RedundantMember(1, 2)));
    }

    #[test]
    fn kernel_examples() {
        let f = tensor_split_family(&[0.5, 0.5]);
        let modular = f.modular().unwrap();
        let taus = vec![Permutation::from_cycles(2, &[&[1, 2]]).unwrap(); 2];
        let k = internal_symmetry_kernel(&f, &modular, &taus, 2);
        assert_eq!(k.words_checked, 7);
        assert_eq!(k.elements.len(), 1);
        assert!(k.elements[0].word.is_empty() && k.elements[0].internal && k.elements[0].central);

        let (_, f) = family_catalog().into_iter().find(|(n, _)| n == "diagonal in M2").unwrap();
        let modular = f.modular().unwrap();
        let k = internal_symmetry_kernel(&f, &modular, &[Permutation::identity(1)], 3);
        assert_eq!(k.even().len(), 1);
        // J₁ fixes the maximally abelian member, so the odd word lies in the kernel
        assert_eq!(k.elements.len(), 2);
        assert!(k.elements[1].antiunitary && k.elements[1].word == vec![1]);
        assert!(k.elements.iter().all(|e| e.internal && e.central));
    }

    #[test]
    fn order_reversal_on_chain() {
        // 1 ≤ 2 ≤ 3 ≤ 4 with τᵢ the order reversal i ↦ 5 − i
        let rev = Permutation::from_images(vec![3, 2, 1, 0]).unwrap();
        let leq: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i <= j).collect()).collect();
        let r = group_and_properties(&vec![rev.clone(); 4], &PropertyInputs { maximal_abelian: None, order: Some(leq.clone()) }).unwrap();
        assert_eq!(r.order_reversal, Some(true));
        assert!(r.covariant);
        let r = group_and_properties(&vec![Permutation::identity(4); 4], &PropertyInputs { maximal_abelian: None, order: Some(leq) }).unwrap();
        assert_eq!(r.order_reversal, Some(false));
        assert_eq!(r.fixed_points_atoms, Some(false));
    }

    #[test]
    fn group_property_examples() {
        let t = |n, c: &[&[usize]]| Permutation::from_cycles(n, c).unwrap();
        let r = group_and_properties(&[t(2, &[&[1, 2]]), t(2, &[&[1, 2]])], &PropertyInputs::default()).unwrap();
        assert_eq!(r.group.label, "S2");
        let r = group_and_properties(&[t(3, &[&[2, 3]]), t(3, &[&[1, 3]]), t(3, &[&[1, 2]])], &PropertyInputs::default()).unwrap();
        assert!(r.covariant && r.group.label == "S3");
        let r = group_and_properties(&[t(4, &[&[1, 2]]), t(4, &[&[3, 4]]), t(4, &[]), t(4, &[])], &PropertyInputs::default()).unwrap();
        assert!(!r.group.transitive);
        assert_eq!(r.group.order, 4);
    }

    #[test]
    fn family_json() {
        let s = r#"{"dim":2,"omega":[[0.7071067811865476,0],[0.7071067811865476,0]],
            "members":[{"generators":[[[[1,0],[0,0]],[[0,0],[-1,0]]]]}]}"#;
        let spec: FamilySpec = serde_json::from_str(s).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.len(), 1);
        assert!(span_distance(&f.members()[0], &diagonal_algebra(2)) < 1e-12);
        assert!(serde_json::from_str::<FamilySpec>(r#"{"dim":2,"omega":[],"members":[],"extra":1}"#).is_err());
        let bad = FamilySpec { dim: 2, omega: vec![[1.0, 0.0]], members: vec![] };
        assert!(bad.build().is_err());
    }
}
