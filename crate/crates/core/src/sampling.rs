//! Seeded random draws of group elements, wedges and spinors.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::minkowski::{FourVector, LightlikeDirection, Wedge};
use crate::poincare::{boost, rotation, ExtendedPoincareElement, LorentzMatrix, PoincareElement};
use crate::sl2c::SL2C;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn four_vector(rng: &mut impl Rng, scale: f64) -> FourVector {
    FourVector::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn direction(rng: &mut impl Rng) -> LightlikeDirection {
    LightlikeDirection::from_spatial(unit_vector(rng))
}

/// `B(n, s)·R(k, φ)` with rapidity `s < max_rapidity`.
pub fn restricted_lorentz(rng: &mut impl Rng, max_rapidity: f64) -> LorentzMatrix {
    let b = boost(&unit_vector(rng), rng.random_range(0.0..max_rapidity));
    let r = rotation(&unit_vector(rng), rng.random_range(-PI..PI));
    b * r
}

pub fn restricted_element(rng: &mut impl Rng) -> PoincareElement {
    let l = restricted_lorentz(rng, 1.5);
    PoincareElement::new(l, four_vector(rng, 3.0))
}

/// Restricted element with a dilation `γ ∈ [γ_min, γ_max]`.
pub fn extended_element(rng: &mut impl Rng, gamma_min: f64, gamma_max: f64) -> ExtendedPoincareElement {
    let gamma = rng.random_range(gamma_min..=gamma_max);
    let e = restricted_element(rng);
    ExtendedPoincareElement::new(gamma, *e.lambda(), e.a()).expect("γ is positive")
}

/// A wedge with generators at least 0.2 rad from parallel and edge point in a box.
pub fn wedge(rng: &mut impl Rng) -> Wedge {
    loop {
        let n1 = unit_vector(rng);
        let n2 = unit_vector(rng);
        if n1.dot(&n2) < 0.98 {
            let a = four_vector(rng, 2.0);
            if let Ok(w) = Wedge::from_directions(LightlikeDirection::from_spatial(n1), LightlikeDirection::from_spatial(n2), a)
            {
                return w;
            }
        }
    }
}

/// An element of SL(2,C) with entries of order one.
pub fn sl2c(rng: &mut impl Rng) -> SL2C {
    loop {
        let mut z = || Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let m = Matrix2::new(z(), z(), z(), z());
        let det = m.determinant();
        if det.norm() > 0.25 {
            if let Ok(a) = SL2C::normalized(m) {
                return a;
            }
        }
    }
}
