//! Involution families on finite index sets satisfying the covariance
//! relation `τᵢτⱼτᵢ = τ_{τᵢ(j)}`, their generated groups and an exhaustive
//! classification for small index sets.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::CLOSURE_CAP;

/// Largest index set handled by [`enumerate_families`].
pub const MAX_ENUMERATION_SIZE: usize = 6;

/// A permutation of `{0, …, n−1}`, serialized as its 1-based image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidFamily(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    /// Builds a permutation of `n` points from 1-based cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for c in cycles {
            for (k, &i) in c.iter().enumerate() {
                let j = c[(k + 1) % c.len()];
                if i == 0 || i > n || j == 0 || j > n || touched[i - 1] {
                    return Err(Error::InvalidFamily(format!("bad cycle {c:?} on {n} points")));
                }
                touched[i - 1] = true;
                images[i - 1] = j - 1;
            }
        }
        Self::from_images(images)
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(i, j);
        p
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Self(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_involution(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| self.0[j] == i)
    }

    /// Disjoint cycles of length at least two, 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] || self.0[s] == s {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut i = self.0[s];
            while i != s {
                seen[i] = true;
                c.push(i);
                i = self.0[i];
            }
            out.push(c);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        if v.contains(&0) {
            return Err(Error::InvalidFamily("images are 1-based".into()));
        }
        Self::from_images(v.into_iter().map(|i| i - 1).collect())
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0.into_iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// `i ↦ τᵢ`, one involution per index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Permutation>", into = "Vec<Permutation>")]
pub struct InvolutionFamily {
    taus: Vec<Permutation>,
}

impl InvolutionFamily {
    pub fn new(taus: Vec<Permutation>) -> Result<Self> {
        let n = taus.len();
        for (i, t) in taus.iter().enumerate() {
            if t.n() != n {
                return Err(Error::InvalidFamily(format!("τ{} acts on {} points, expected {n}", i + 1, t.n())));
            }
            if !t.is_involution() {
                return Err(Error::InvalidFamily(format!("τ{} = {t} is not an involution", i + 1)));
            }
        }
        Ok(Self { taus })
    }

    /// Builds a family from 1-based cycle lists, one per index.
    pub fn from_cycles(cycles: &[&[&[usize]]]) -> Result<Self> {
        let n = cycles.len();
        Self::new(cycles.iter().map(|c| Permutation::from_cycles(n, c)).collect::<Result<_>>()?)
    }

    pub fn n(&self) -> usize {
        self.taus.len()
    }

    pub fn tau(&self, i: usize) -> &Permutation {
        &self.taus[i]
    }

    pub fn taus(&self) -> &[Permutation] {
        &self.taus
    }
}

impl TryFrom<Vec<Permutation>> for InvolutionFamily {
    type Error = Error;
    fn try_from(v: Vec<Permutation>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<InvolutionFamily> for Vec<Permutation> {
    fn from(f: InvolutionFamily) -> Self {
        f.taus
    }
}

impl fmt::Display for InvolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.taus.iter().enumerate().map(|(i, t)| format!("τ{}={t}", i + 1)).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// First pair `(i, j)` with `τᵢτⱼτᵢ ≠ τ_{τᵢ(j)}`, 0-based.
pub fn covariance_violation(taus: &[Permutation]) -> Option<(usize, usize)> {
    for (i, ti) in taus.iter().enumerate() {
        for (j, tj) in taus.iter().enumerate() {
            if ti.compose(tj).compose(ti) != taus[ti.apply(j)] {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn check_covariance(f: &InvolutionFamily) -> bool {
    covariance_violation(f.taus()).is_none()
}

/// Closure of `gens` under composition, sorted.
pub fn generate_group(n: usize, gens: &[Permutation], cap: usize) -> Result<Vec<Permutation>> {
    let id = Permutation::identity(n);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.compose(&p);
            if !seen.contains(&q) {
                if seen.len() >= cap {
                    return Err(Error::ClosureCapExceeded(cap));
                }
                seen.insert(q.clone());
                queue.push_back(q);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Orbits of the group generated by `gens`, each sorted, 0-based.
pub fn orbits(n: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut orbit = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < orbit.len() {
            let i = orbit[k];
            for g in gens {
                let j = g.apply(i);
                if !seen[j] {
                    seen[j] = true;
                    orbit.push(j);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// The finest block system in which `0` and `j` share a block, by fusing
/// pairs until the partition is invariant under every generator.
pub fn minimal_block_system(n: usize, gens: &[Permutation], j: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut pending = vec![(0, j)];
    while let Some((a, b)) = pending.pop() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        parent[rb] = ra;
        for g in gens {
            pending.push((g.apply(a), g.apply(b)));
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[index[r]].push(i);
    }
    blocks
}

/// Largest `k` such that the group acts transitively on ordered `k`-tuples
/// of distinct points.
pub fn transitivity_degree(n: usize, group: &[Permutation]) -> usize {
    let mut degree = 0;
    for k in 1..=n {
        let base: Vec<usize> = (0..k).collect();
        let images: HashSet<Vec<usize>> = group.iter().map(|g| base.iter().map(|&i| g.apply(i)).collect()).collect();
        let arrangements: usize = (n - k + 1..=n).product();
        if images.len() == arrangements {
            degree = k;
        } else {
            break;
        }
    }
    degree
}

/// Invariants of a generated permutation group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub order: usize,
    pub abelian: bool,
    pub transitive: bool,
    pub transitivity_degree: usize,
    pub primitive: bool,
    /// Nontrivial minimal block systems, 1-based.
    pub blocks: Vec<Vec<Vec<usize>>>,
    /// Every block size divides the number of points.
    pub divisors_ok: bool,
    pub label: String,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Name from the invariant signature (order, abelian, transitivity degree).
pub fn group_label(n: usize, group: &[Permutation], abelian: bool, degree: usize) -> String {
    let order = group.len();
    if order == 1 {
        return "1".into();
    }
    if degree >= 1 && order == factorial(n) {
        return format!("S{n}");
    }
    let exponent_two = group.iter().all(Permutation::is_involution);
    if abelian && exponent_two {
        let k = order.trailing_zeros();
        return if k == 1 { "Z2".into() } else { format!("Z2^{k}") };
    }
    if abelian {
        return format!("Z{order}");
    }
    let max_order = group.iter().map(element_order).max().unwrap_or(1);
    if order == 6 {
        return "S3".into();
    }
    if max_order == order / 2 {
        return format!("D{max_order}");
    }
    if order == 24 && max_order == 4 && group.iter().all(|g| [1, 2, 3, 4].contains(&element_order(g))) {
        return "S4".into();
    }
    format!("G{order}")
}

pub fn element_order(p: &Permutation) -> usize {
    let mut q = p.clone();
    let mut k = 1;
    while !q.is_identity() {
        q = p.compose(&q);
        k += 1;
    }
    k
}

pub fn analyze_group(n: usize, gens: &[Permutation]) -> Result<GroupReport> {
    let group = generate_group(n, gens, CLOSURE_CAP)?;
    let abelian = gens.iter().all(|a| gens.iter().all(|b| a.compose(b) == b.compose(a)));
    let transitive = orbits(n, gens).len() == 1;
    let degree = if transitive { transitivity_degree(n, &group) } else { 0 };
    let mut systems: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
    if transitive {
        for j in 1..n {
            let s = minimal_block_system(n, gens, j);
            if s.len() > 1 {
                systems.insert(s.into_iter().map(|b| b.into_iter().map(|i| i + 1).collect()).collect());
            }
        }
    }
    let divisors_ok = systems.iter().all(|s| s.iter().all(|b| n.is_multiple_of(b.len())));
    let label = group_label(n, &group, abelian, degree);
    Ok(GroupReport {
        order: group.len(),
        abelian,
        transitive,
        transitivity_degree: degree,
        primitive: transitive && systems.is_empty(),
        blocks: systems.into_iter().collect(),
        divisors_ok,
        label,
    })
}

pub fn family_group(f: &InvolutionFamily) -> Result<GroupReport> {
    analyze_group(f.n(), f.taus())
}

/// Restriction on `τᵢ(i)` used during enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingConstraint {
    /// `i ↦ τᵢ(i) = i′` is a fixed-point-free involution preserved by every
    /// `τⱼ`: `τⱼ(i)′ = τⱼ(i′)`.
    NonabelianPairing,
    /// `τᵢ(i) = i` for every `i`.
    AllFixed,
    Unconstrained,
}

impl PairingConstraint {
    pub fn admits(&self, f: &InvolutionFamily) -> bool {
        let n = f.n();
        match self {
            Self::Unconstrained => true,
            Self::AllFixed => (0..n).all(|i| f.tau(i).apply(i) == i),
            Self::NonabelianPairing => {
                let pair = |i: usize| f.tau(i).apply(i);
                (0..n).all(|i| pair(i) != i && pair(pair(i)) == i)
                    && (0..n).all(|i| (0..n).all(|j| pair(f.tau(j).apply(i)) == f.tau(j).apply(pair(i))))
            }
        }
    }
}

/// `(∃i: τᵢ(i) = i) ⟺ (∀i: τᵢ(i) = i)`.
pub fn fixedpoint_dichotomy_check(f: &InvolutionFamily) -> bool {
    let fixed = (0..f.n()).filter(|&i| f.tau(i).apply(i) == i).count();
    fixed == 0 || fixed == f.n()
}

/// `τᵢ(i) = i ⟹ τ_{σ(i)}(σ(i)) = σ(i)` for every `σ` in `group`.
pub fn fixed_points_transported(f: &InvolutionFamily, group: &[Permutation]) -> bool {
    (0..f.n()).filter(|&i| f.tau(i).apply(i) == i).all(|i| {
        group.iter().all(|s| {
            let k = s.apply(i);
            f.tau(k).apply(k) == k
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumeratedFamily {
    pub family: InvolutionFamily,
    pub group: GroupReport,
}

fn involutions(n: usize) -> Vec<Permutation> {
    fn rec(n: usize, images: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        match (0..n).find(|&i| images[i] == usize::MAX) {
            None => out.push(Permutation(images.clone())),
            Some(i) => {
                images[i] = i;
                rec(n, images, out);
                for j in i + 1..n {
                    if images[j] == usize::MAX {
                        images[i] = j;
                        images[j] = i;
                        rec(n, images, out);
                        images[j] = usize::MAX;
                    }
                }
                images[i] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut vec![usize::MAX; n], &mut out);
    out.sort();
    out
}

fn admissible_at(constraint: PairingConstraint, i: usize, t: &Permutation) -> bool {
    match constraint {
        PairingConstraint::AllFixed => t.apply(i) == i,
        PairingConstraint::NonabelianPairing => t.apply(i) != i,
        PairingConstraint::Unconstrained => true,
    }
}

/// Completes a partial assignment by `τ_{τᵢ(j)} = τᵢτⱼτᵢ`; false on conflict.
fn propagate(taus: &mut [Option<Permutation>], constraint: PairingConstraint) -> bool {
    let n = taus.len();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            let Some(ti) = taus[i].clone() else { continue };
            for j in 0..n {
                let Some(tj) = taus[j].clone() else { continue };
                let k = ti.apply(j);
                let v = ti.compose(&tj).compose(&ti);
                match &taus[k] {
                    Some(tk) if *tk != v => return false,
                    Some(_) => {}
                    None => {
                        if !admissible_at(constraint, k, &v) {
                            return false;
                        }
                        taus[k] = Some(v);
                        changed = true;
                    }
                }
            }
        }
    }
    true
}

fn search(
    taus: &mut [Option<Permutation>],
    candidates: &[Permutation],
    constraint: PairingConstraint,
    out: &mut BTreeSet<InvolutionFamily>,
) {
    let Some(k) = taus.iter().position(Option::is_none) else {
        let f = InvolutionFamily { taus: taus.iter().map(|t| t.clone().expect("assigned")).collect() };
        if constraint.admits(&f) && check_covariance(&f) {
            out.insert(f);
        }
        return;
    };
    for c in candidates.iter().filter(|c| admissible_at(constraint, k, c)) {
        let mut next = taus.to_vec();
        next[k] = Some(c.clone());
        if propagate(&mut next, constraint) {
            search(&mut next, candidates, constraint, out);
        }
    }
}

/// All covariant involution families on `n ≤ 6` points satisfying the
/// constraint, in sorted order.
pub fn enumerate_families(n: usize, constraint: PairingConstraint, transitive_only: bool) -> Result<Vec<EnumeratedFamily>> {
    if n > MAX_ENUMERATION_SIZE {
        return Err(Error::SizeTooLarge(n));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let candidates = involutions(n);
    let mut found = BTreeSet::new();
    search(&mut vec![None; n], &candidates, constraint, &mut found);
    let mut out = Vec::new();
    for family in found {
        let transitive = orbits(n, family.taus()).len() == 1;
        if transitive_only && !transitive {
            continue;
        }
        let group = family_group(&family)?;
        out.push(EnumeratedFamily { family, group });
    }
    Ok(out)
}

/// Distinct group labels among enumerated families.
pub fn group_labels(families: &[EnumeratedFamily]) -> BTreeSet<String> {
    families.iter().map(|f| f.group.label.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> InvolutionFamily {
        InvolutionFamily::from_cycles(&[&[&[2, 3]], &[&[1, 3]], &[&[1, 2]]]).unwrap()
    }

    #[test]
    fn permutation_basics() {
        let p = Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(p.to_string(), "(1 2)(3 4)");
        assert!(p.is_involution());
        let q = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        assert_eq!(q.compose(&q.inverse()), Permutation::identity(3));
        assert!(!q.is_involution());
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,1,4,3]");
        assert!(serde_json::from_str::<Permutation>("[0,1]").is_err());
    }

    #[test]
    fn covariance_examples() {
        let s2 = InvolutionFamily::from_cycles(&[&[&[1, 2]], &[&[1, 2]]]).unwrap();
        assert!(check_covariance(&s2));
        assert!(check_covariance(&s3()));
        let bad = InvolutionFamily::from_cycles(&[&[&[2, 3]], &[&[1, 3]], &[&[1, 3]]]).unwrap();
        assert!(!check_covariance(&bad));
        assert!(covariance_violation(bad.taus()).is_some());
        assert!(InvolutionFamily::new(vec![Permutation::from_cycles(2, &[&[1, 2]]).unwrap()]).is_err());
    }

    #[test]
    fn group_examples() {
        let s2 = family_group(&InvolutionFamily::from_cycles(&[&[&[1, 2]], &[&[1, 2]]]).unwrap()).unwrap();
        assert_eq!((s2.order, s2.transitive, s2.primitive, s2.label.as_str()), (2, true, true, "S2"));
        let g = family_group(&s3()).unwrap();
        assert_eq!((g.order, g.transitive, g.primitive, g.transitivity_degree), (6, true, true, 3));
        assert_eq!(g.label, "S3");
        let k = analyze_group(4, &[Permutation::from_cycles(4, &[&[1, 2]]).unwrap(), Permutation::from_cycles(4, &[&[3, 4]]).unwrap()])
            .unwrap();
        assert_eq!((k.order, k.transitive, k.label.as_str()), (4, false, "Z2^2"));
    }

    #[test]
    fn block_systems() {
        // dihedral group of the square 1-2-3-4: diagonals form blocks
        let gens = [Permutation::from_cycles(4, &[&[2, 4]]).unwrap(), Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap()];
        let g = analyze_group(4, &gens).unwrap();
        assert_eq!(g.order, 8);
        assert!(g.transitive && !g.primitive && g.divisors_ok);
        assert!(g.blocks.contains(&vec![vec![1, 3], vec![2, 4]]));
        assert!(g.blocks.iter().all(|s| s.iter().all(|b| b.len() == 2)));
    }

    #[test]
    fn closure_cap() {
        let gens = [Permutation::from_cycles(5, &[&[1, 2]]).unwrap(), Permutation::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap()];
        assert_eq!(generate_group(5, &gens, 50), Err(Error::ClosureCapExceeded(50)));
        assert_eq!(generate_group(5, &gens, 1000).unwrap().len(), 120);
    }

    #[test]
    fn small_classification() {
        let labels = |n, c| group_labels(&enumerate_families(n, c, true).unwrap());
        assert_eq!(labels(2, PairingConstraint::NonabelianPairing), BTreeSet::from(["S2".to_string()]));
        assert_eq!(labels(2, PairingConstraint::Unconstrained), BTreeSet::from(["S2".to_string()]));
        assert!(labels(2, PairingConstraint::AllFixed).is_empty());
        let s3s = enumerate_families(3, PairingConstraint::AllFixed, true).unwrap();
        assert_eq!(s3s.len(), 1);
        assert_eq!(s3s[0].family, s3());
        assert!(labels(4, PairingConstraint::NonabelianPairing).is_empty());
        assert!(labels(3, PairingConstraint::NonabelianPairing).is_empty());
        assert!(labels(5, PairingConstraint::NonabelianPairing).is_empty());
    }

    #[test]
    fn enumeration_respects_constraints() {
        for n in 1..=5 {
            for c in [PairingConstraint::AllFixed, PairingConstraint::NonabelianPairing, PairingConstraint::Unconstrained] {
                for e in enumerate_families(n, c, false).unwrap() {
                    assert!(check_covariance(&e.family));
                    assert!(c.admits(&e.family));
                    if e.group.transitive {
                        assert!(fixedpoint_dichotomy_check(&e.family));
                        assert!(e.group.divisors_ok);
                    }
                    let g = generate_group(n, e.family.taus(), CLOSURE_CAP).unwrap();
                    assert!(fixed_points_transported(&e.family, &g));
                }
            }
        }
        assert_eq!(enumerate_families(7, PairingConstraint::Unconstrained, true), Err(Error::SizeTooLarge(7)));
    }

    #[test]
    fn family_json() {
        let f = s3();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[1,3,2],[3,2,1],[2,1,3]]");
        assert_eq!(serde_json::from_str::<InvolutionFamily>(&s).unwrap(), f);
        assert!(serde_json::from_str::<InvolutionFamily>("[[2,3,1],[1,2,3],[1,2,3]]").is_err());
    }
}
