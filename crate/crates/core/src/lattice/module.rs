//! Frequency modules generated by holohedry orbits and the integer action of
//! the group on mode indices.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::group::Holohedry;
use crate::error::{Error, Result};

/// Tolerance for integer relations and coordinate matches during construction.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Singular value threshold for the real rank of the generator matrix.
pub const RANK_TOL: f64 = 1e-9;
pub const DEFAULT_RELATION_BOUND: i64 = 2;

/// Integer coordinates of a wavevector with respect to the module generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex(pub Vec<i64>);

impl ModeIndex {
    pub fn zero(p: usize) -> Self {
        ModeIndex(vec![0; p])
    }

    pub fn unit(p: usize, j: usize) -> Self {
        let mut m = vec![0; p];
        m[j] = 1;
        ModeIndex(m)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn neg(&self) -> Self {
        ModeIndex(self.0.iter().map(|x| -x).collect())
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

impl From<Vec<i64>> for ModeIndex {
    fn from(v: Vec<i64>) -> Self {
        ModeIndex(v)
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn from_columns(columns: &[Vec<i64>]) -> Self {
        let n = columns.len();
        let mut data = vec![0; n * n];
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                data[i * n + j] = x;
            }
        }
        IntMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn apply(&self, m: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * m[j]).sum())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        IntMatrix { n, data }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

/// The module generated over the integers by the orbit `{γ k0 : γ ∈ H}`.
///
/// Generators are the rows of the `p × d` matrix `A`; mode `m ∈ Z^p` carries
/// the wavevector `Σ m_j k_j`.
#[derive(Clone, Debug)]
pub struct FrequencyModule {
    holohedry: Arc<Holohedry>,
    base_vector: Vec<f64>,
    scale: f64,
    generators: Vec<Vec<f64>>,
    relation_bound: i64,
    integer_reps: Vec<IntMatrix>,
    uniformly_discrete: bool,
}

/// Calls `f` on every integer vector in `[-bound, bound]^len`, in
/// lexicographic order. Stops early when `f` returns `true`.
pub(crate) fn for_each_bounded(len: usize, bound: i64, mut f: impl FnMut(&[i64]) -> bool) {
    let mut m = vec![-bound; len];
    loop {
        if f(&m) {
            return;
        }
        let mut axis = len;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if m[axis] < bound {
                m[axis] += 1;
                break;
            }
            m[axis] = -bound;
        }
    }
}

fn combination(generators: &[Vec<f64>], m: &[i64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for (k, &c) in generators.iter().zip(m) {
        if c != 0 {
            for (o, x) in out.iter_mut().zip(k) {
                *o += c as f64 * x;
            }
        }
    }
    out
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Closest bounded integer combination of `generators` to `v`, if within `tol`.
fn bounded_coordinates(generators: &[Vec<f64>], v: &[f64], bound: i64, tol: f64) -> Option<Vec<i64>> {
    let d = v.len();
    let mut best: Option<(f64, Vec<i64>)> = None;
    for_each_bounded(generators.len(), bound, |m| {
        let e = dist(&combination(generators, m, d), v);
        if e < tol && best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, m.to_vec()));
        }
        false
    });
    best.map(|(_, m)| m)
}

/// True if some relation `c v + Σ c_j k_j = 0` exists with `2 <= c <= bound`.
fn has_non_unit_relation(generators: &[Vec<f64>], v: &[f64], bound: i64) -> bool {
    let d = v.len();
    let mut found = false;
    for c in 2..=bound {
        let target: Vec<f64> = v.iter().map(|x| -(c as f64) * x).collect();
        for_each_bounded(generators.len(), bound, |m| {
            if dist(&combination(generators, m, d), &target) < CONSTRUCTION_TOL {
                found = true;
            }
            found
        });
        if found {
            break;
        }
    }
    found
}

/// Greedy generator selection over the orbit of `k0`, followed by the
/// integer representation of every group element.
pub fn generate_frequency_module(
    holohedry: Arc<Holohedry>,
    k0: &[f64],
    relation_bound: i64,
) -> Result<FrequencyModule> {
    let d = holohedry.dimension();
    if k0.len() != d {
        return Err(Error::InvalidArgument(format!(
            "base vector has length {}, group dimension is {d}",
            k0.len()
        )));
    }
    let norm = k0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > CONSTRUCTION_TOL {
        return Err(Error::InvalidArgument(format!("|k0| = {norm}, expected 1")));
    }
    if relation_bound < 2 {
        return Err(Error::InvalidArgument("relation bound must be >= 2".into()));
    }
    let mut generators: Vec<Vec<f64>> = Vec::new();
    for g in holohedry.elements() {
        let v = g.apply(k0);
        if bounded_coordinates(&generators, &v, relation_bound, CONSTRUCTION_TOL).is_some() {
            continue;
        }
        if has_non_unit_relation(&generators, &v, relation_bound) {
            return Err(Error::RelationSearchExhausted {
                bound: relation_bound,
                vector: v,
            });
        }
        generators.push(v);
    }
    let mut module = FrequencyModule {
        holohedry,
        base_vector: k0.to_vec(),
        scale: 1.0,
        generators,
        relation_bound,
        integer_reps: Vec::new(),
        uniformly_discrete: false,
    };
    let mut reps = Vec::with_capacity(module.holohedry.order());
    for g in module.holohedry.elements() {
        reps.push(module.integer_representation_of(g).map_err(|e| match e {
            Error::NotRepresentable(vector) => Error::RelationSearchExhausted {
                bound: relation_bound,
                vector,
            },
            other => other,
        })?);
    }
    module.integer_reps = reps;
    module.uniformly_discrete = module.generators.len() == module.real_rank();
    Ok(module)
}

impl FrequencyModule {
    pub fn holohedry(&self) -> &Arc<Holohedry> {
        &self.holohedry
    }

    pub fn base_vector(&self) -> &[f64] {
        &self.base_vector
    }

    /// Length of the base wavevector; generators are `scale · γ k0`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn dimension(&self) -> usize {
        self.holohedry.dimension()
    }

    pub fn relation_bound(&self) -> i64 {
        self.relation_bound
    }

    /// `M_γ` for the group element with index `i`.
    pub fn integer_rep(&self, i: usize) -> &IntMatrix {
        &self.integer_reps[i]
    }

    pub fn integer_reps(&self) -> &[IntMatrix] {
        &self.integer_reps
    }

    /// Same module with every wavevector multiplied by `factor > 0`.
    /// The integer action is unchanged.
    pub fn scaled(&self, factor: f64) -> Result<FrequencyModule> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor {factor}")));
        }
        let mut out = self.clone();
        out.scale = self.scale * factor;
        for k in &mut out.generators {
            for x in k.iter_mut() {
                *x *= factor;
            }
        }
        Ok(out)
    }

    /// The `p × d` matrix whose rows are the generators.
    pub fn generator_matrix(&self) -> DMatrix<f64> {
        let d = self.dimension();
        DMatrix::from_fn(self.rank(), d, |i, j| self.generators[i][j])
    }

    fn real_rank(&self) -> usize {
        real_rank(&self.generators, self.dimension())
    }

    pub fn is_uniformly_discrete(&self) -> bool {
        self.uniformly_discrete
    }

    pub fn mode_wavevector(&self, m: &[i64]) -> Vec<f64> {
        combination(&self.generators, m, self.dimension())
    }

    pub fn wavenumber_sq(&self, m: &[i64]) -> f64 {
        self.mode_wavevector(m).iter().map(|x| x * x).sum()
    }

    /// The unique `m` with `|m|∞ <= R` and `|Σ m_j k_j - v| < tol`.
    pub fn integer_coordinates(&self, v: &[f64], tol: f64) -> Result<ModeIndex> {
        if tol < 0.0 {
            return Err(Error::InvalidArgument("negative tolerance".into()));
        }
        if v.len() != self.dimension() {
            return Err(Error::InvalidArgument("vector dimension mismatch".into()));
        }
        bounded_coordinates(&self.generators, v, self.relation_bound, tol)
            .map(ModeIndex)
            .ok_or_else(|| Error::NotRepresentable(v.to_vec()))
    }

    /// Column `j` holds the integer coordinates of `γ k_j`.
    pub fn integer_representation(&self, g: &super::GroupElement) -> Result<IntMatrix> {
        if let Some(i) = self.holohedry.index_of(&g.matrix) {
            if !self.integer_reps.is_empty() {
                return Ok(self.integer_reps[i].clone());
            }
        }
        self.integer_representation_of(g)
    }

    fn integer_representation_of(&self, g: &super::GroupElement) -> Result<IntMatrix> {
        let cols = self
            .generators
            .iter()
            .map(|k| {
                self.integer_coordinates(&g.apply(k), CONSTRUCTION_TOL)
                    .map(|m| m.0)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix::from_columns(&cols))
    }

    /// Bounded-coefficient approximation of `L* ∩ B(0, radius)`, sorted by
    /// `|k|` and then lexicographically by index.
    pub fn module_points_in_ball(&self, radius: f64, bound: i64) -> Vec<(ModeIndex, Vec<f64>)> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        for_each_bounded(self.rank(), bound, |m| {
            let k = self.mode_wavevector(m);
            let n2: f64 = k.iter().map(|x| x * x).sum();
            if n2 <= r2 * (1.0 + 1e-12) {
                out.push((ModeIndex(m.to_vec()), k));
            }
            false
        });
        out.sort_by(|a, b| {
            let na: f64 = a.1.iter().map(|x| x * x).sum();
            let nb: f64 = b.1.iter().map(|x| x * x).sum();
            na.total_cmp(&nb).then_with(|| a.0.cmp(&b.0))
        });
        out
    }
}

/// Real rank of a list of vectors in `R^d`, by singular values above `RANK_TOL`.
pub fn real_rank(vectors: &[Vec<f64>], d: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let a = DMatrix::from_fn(vectors.len(), d, |i, j| vectors[i][j]);
    a.singular_values().iter().filter(|&&s| s > RANK_TOL).count()
}

/// Rank over the rationals of a list of integer vectors (fraction-free
/// Gaussian elimination in 128-bit integers).
pub fn integer_rank(vectors: &[Vec<i64>]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let cols = first.len();
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in rank + 1..rows.len() {
            if rows[r][c] == 0 {
                continue;
            }
            let (a, b) = (rows[rank][c], rows[r][c]);
            for j in 0..cols {
                rows[r][j] = rows[r][j] * a - rows[rank][j] * b;
            }
            let g = rows[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                rows[r].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_holohedry, SymmetryDescriptor};

    fn module(spec: &str) -> FrequencyModule {
        let d: SymmetryDescriptor = spec.parse().unwrap();
        let h = Arc::new(build_holohedry(&d).unwrap());
        let mut k0 = vec![0.0; d.dimension()];
        k0[0] = 1.0;
        generate_frequency_module(h, &k0, DEFAULT_RELATION_BOUND).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        dist(a, b) < tol
    }

    #[test]
    fn square_module_has_axis_generators() {
        let m = module("dihedral:4");
        assert_eq!(m.rank(), 2);
        assert!(close(&m.generators()[0], &[1.0, 0.0], 1e-15));
        assert!(close(&m.generators()[1], &[0.0, 1.0], 1e-15));
        assert!(m.is_uniformly_discrete());
    }

    #[test]
    fn twelvefold_generators_at_thirty_degree_steps() {
        let m = module("dihedral:12");
        assert_eq!(m.rank(), 4);
        for (j, k) in m.generators().iter().enumerate() {
            let a = (30.0 * j as f64).to_radians();
            assert!(close(k, &[a.cos(), a.sin()], 1e-14), "generator {j}");
        }
        assert!(!m.is_uniformly_discrete());
    }

    #[test]
    fn cyclic_two_rank_one() {
        let m = module("cyclic:2");
        assert_eq!(m.rank(), 1);
        assert!(close(&m.generators()[0], &[1.0, 0.0], 1e-15));
        assert!(m.is_uniformly_discrete());
    }

    #[test]
    fn coordinates_of_rotated_generator() {
        let m = module("dihedral:12");
        let k2 = m.generators()[2].clone();
        assert_eq!(m.integer_coordinates(&k2, 1e-9).unwrap(), ModeIndex::unit(4, 2));
        // 120 degrees = 60 degrees minus 0 degrees
        let a = 120f64.to_radians();
        let v = [a.cos(), a.sin()];
        assert_eq!(
            m.integer_coordinates(&v, 1e-9).unwrap(),
            ModeIndex(vec![-1, 0, 1, 0])
        );
        assert!(matches!(
            m.integer_coordinates(&[0.5, 0.5], 1e-9),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn representation_of_identity_inversion_and_rotation() {
        let m = module("dihedral:12");
        let h = m.holohedry().clone();
        assert_eq!(m.integer_rep(0), &IntMatrix::identity(4));
        let minus = h.minus_identity_index().unwrap();
        assert_eq!(m.integer_rep(minus), &IntMatrix::identity(4).neg());
        // rotation by pi/6 is element 1
        let r = m.integer_representation(h.element(1)).unwrap();
        let expected = IntMatrix::from_columns(&[
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![-1, 0, 1, 0],
        ]);
        assert_eq!(r, expected);
    }

    #[test]
    fn wavevector_of_sum() {
        let m = module("dihedral:12");
        let k = m.mode_wavevector(&[1, 1, 0, 0]);
        let s3 = 3f64.sqrt();
        assert!(close(&k, &[1.0 + s3 / 2.0, 0.5], 1e-14));
        assert!((m.wavenumber_sq(&[1, 1, 0, 0]) - (2.0 + s3)).abs() < 1e-14);
        assert!(close(&m.mode_wavevector(&[0, 0, 0, 0]), &[0.0, 0.0], 0.0 + 1e-300));
    }

    #[test]
    fn points_in_ball() {
        let sq = module("dihedral:4");
        assert_eq!(sq.module_points_in_ball(0.5, 2).len(), 1);
        let pts = sq.module_points_in_ball(1.5, 2);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].0, ModeIndex::zero(2));
        let tw = module("dihedral:12");
        assert_eq!(tw.module_points_in_ball(0.05, 2).len(), 1);
    }

    #[test]
    fn homomorphism_over_full_groups() {
        for spec in ["dihedral:8", "dihedral:12", "icosahedral"] {
            let m = module(spec);
            let h = m.holohedry().clone();
            for i in 0..h.order() {
                for j in 0..h.order() {
                    let ij = h.multiply(i, j);
                    assert_eq!(m.integer_rep(i).mul(m.integer_rep(j)), *m.integer_rep(ij));
                }
            }
        }
    }

    #[test]
    fn crystallographic_restriction() {
        for q in [2, 4, 6] {
            assert!(module(&format!("dihedral:{q}")).is_uniformly_discrete(), "q = {q}");
        }
        for q in [8, 10, 12] {
            assert!(!module(&format!("dihedral:{q}")).is_uniformly_discrete(), "q = {q}");
        }
        let ico = module("icosahedral");
        assert_eq!(ico.rank(), 6);
        assert!(!ico.is_uniformly_discrete());
    }

    #[test]
    fn integer_rank_elimination() {
        assert_eq!(integer_rank(&[vec![1, 0], vec![0, 1], vec![1, 1]]), 2);
        assert_eq!(integer_rank(&[vec![2, 4, 6], vec![1, 2, 3]]), 1);
        assert_eq!(integer_rank(&[]), 0);
        assert_eq!(integer_rank(&[vec![0, 0]]), 0);
    }

    #[test]
    fn bad_inputs() {
        let h = Arc::new(build_holohedry(&"dihedral:4".parse().unwrap()).unwrap());
        assert!(generate_frequency_module(h.clone(), &[2.0, 0.0], 2).is_err());
        assert!(generate_frequency_module(h, &[1.0, 0.0], 1).is_err());
    }
}
