//! Finite orthogonal point groups (holohedries) given as explicit matrix lists.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3, Unit, Vector3};

use crate::error::{Error, Result};

/// Entry tolerance used when matching products against group elements.
pub const CLOSURE_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-12;

/// Text token selecting one of the built-in holohedries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryDescriptor {
    Cyclic(usize),
    Dihedral(usize),
    Icosahedral,
}

impl SymmetryDescriptor {
    /// Ambient dimension of the group.
    pub fn dimension(&self) -> usize {
        match self {
            SymmetryDescriptor::Cyclic(_) | SymmetryDescriptor::Dihedral(_) => 2,
            SymmetryDescriptor::Icosahedral => 3,
        }
    }
}

impl FromStr for SymmetryDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "icosahedral" {
            return Ok(SymmetryDescriptor::Icosahedral);
        }
        let unknown = || Error::UnknownSpec(s.to_string());
        let (kind, order) = s.split_once(':').ok_or_else(unknown)?;
        let q: usize = order.trim().parse().map_err(|_| unknown())?;
        if q == 0 {
            return Err(unknown());
        }
        match kind.trim() {
            "cyclic" => Ok(SymmetryDescriptor::Cyclic(q)),
            "dihedral" => Ok(SymmetryDescriptor::Dihedral(q)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for SymmetryDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryDescriptor::Cyclic(q) => write!(f, "cyclic:{q}"),
            SymmetryDescriptor::Dihedral(q) => write!(f, "dihedral:{q}"),
            SymmetryDescriptor::Icosahedral => write!(f, "icosahedral"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroupElement {
    pub matrix: DMatrix<f64>,
    pub label: String,
}

impl GroupElement {
    pub fn new(matrix: DMatrix<f64>, label: impl Into<String>) -> Result<Self> {
        let el = GroupElement {
            matrix,
            label: label.into(),
        };
        el.validate()?;
        Ok(el)
    }

    fn validate(&self) -> Result<()> {
        let d = self.matrix.nrows();
        if self.matrix.ncols() != d {
            return Err(Error::InvalidArgument("group element is not square".into()));
        }
        let gram = &self.matrix * self.matrix.transpose();
        let id = DMatrix::<f64>::identity(d, d);
        if (gram - id).amax() > ORTHO_TOL {
            return Err(Error::InvalidArgument(format!(
                "{} is not orthogonal",
                self.label
            )));
        }
        if (self.matrix.determinant().abs() - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidArgument(format!(
                "{} has |det| != 1",
                self.label
            )));
        }
        Ok(())
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let d = self.matrix.nrows();
        (0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }
}

/// A finite subgroup of O(d), closed under products and containing -I.
#[derive(Clone, Debug)]
pub struct Holohedry {
    descriptor: SymmetryDescriptor,
    dimension: usize,
    elements: Vec<GroupElement>,
    /// `product[i][j]` is the index of `elements[i] * elements[j]`.
    product: Vec<Vec<usize>>,
}

impl Holohedry {
    pub fn descriptor(&self) -> &SymmetryDescriptor {
        &self.descriptor
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    /// Index of `elements[i] * elements[j]`.
    pub fn multiply(&self, i: usize, j: usize) -> usize {
        self.product[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.product[i]
            .iter()
            .position(|&k| k == 0)
            .expect("closed group has inverses")
    }

    /// Index of the element matching `m` entrywise to `CLOSURE_TOL`.
    pub fn index_of(&self, m: &DMatrix<f64>) -> Option<usize> {
        find_matrix(&self.elements, m)
    }

    pub fn minus_identity_index(&self) -> Option<usize> {
        self.index_of(&(-DMatrix::<f64>::identity(self.dimension, self.dimension)))
    }

    fn from_elements(descriptor: SymmetryDescriptor, elements: Vec<GroupElement>) -> Result<Self> {
        let dimension = descriptor.dimension();
        let n = elements.len();
        let mut product = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let m = &elements[i].matrix * &elements[j].matrix;
                product[i][j] = find_matrix(&elements, &m).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "product {} * {} leaves the group",
                        elements[i].label, elements[j].label
                    ))
                })?;
            }
        }
        let h = Holohedry {
            descriptor,
            dimension,
            elements,
            product,
        };
        if h.minus_identity_index().is_none() {
            return Err(Error::InvalidArgument("-I missing from group".into()));
        }
        Ok(h)
    }
}

fn find_matrix(elements: &[GroupElement], m: &DMatrix<f64>) -> Option<usize> {
    elements
        .iter()
        .position(|e| (&e.matrix - m).amax() < CLOSURE_TOL)
}

fn rotation2(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Builds one of the built-in holohedries.
///
/// Element order is deterministic: identity first, then rotations by
/// increasing angle, then (for dihedral groups) the reflections `R^j S`
/// with `S` the reflection across the first axis.
pub fn build_holohedry(spec: &SymmetryDescriptor) -> Result<Holohedry> {
    match *spec {
        SymmetryDescriptor::Cyclic(q) | SymmetryDescriptor::Dihedral(q) => {
            if q % 2 == 1 {
                return Err(Error::OddOrderNoMinusI(q));
            }
            let mut elements = Vec::with_capacity(2 * q);
            for j in 0..q {
                let r = rotation2(2.0 * PI * j as f64 / q as f64);
                elements.push(GroupElement::new(r, format!("R{j}"))?);
            }
            if matches!(spec, SymmetryDescriptor::Dihedral(_)) {
                let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
                for j in 0..q {
                    let r = rotation2(2.0 * PI * j as f64 / q as f64);
                    elements.push(GroupElement::new(r * &s, format!("R{j}S"))?);
                }
            }
            Holohedry::from_elements(spec.clone(), elements)
        }
        SymmetryDescriptor::Icosahedral => {
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            // Five-fold axis through the vertex (0, 1, phi) of the icosahedron
            // whose two-fold axes are the coordinate axes.
            let axis = Unit::new_normalize(Vector3::new(0.0, 1.0, phi));
            let five: Matrix3<f64> =
                nalgebra::Rotation3::from_axis_angle(&axis, 2.0 * PI / 5.0).into_inner();
            // Three-fold axis along (1, 1, 1): cyclic coordinate permutation.
            let three = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
            let gens: Vec<DMatrix<f64>> = [five, three, -Matrix3::identity()]
                .iter()
                .map(|m| DMatrix::from_column_slice(3, 3, m.as_slice()))
                .collect();
            let closed = close_under_products(DMatrix::identity(3, 3), &gens, 240)?;
            let elements = closed
                .into_iter()
                .enumerate()
                .map(|(i, m)| GroupElement::new(m, format!("g{i}")))
                .collect::<Result<Vec<_>>>()?;
            if elements.len() != 120 {
                return Err(Error::InvalidArgument(format!(
                    "icosahedral closure produced {} elements",
                    elements.len()
                )));
            }
            Holohedry::from_elements(spec.clone(), elements)
        }
    }
}

/// Breadth-first closure of `{identity}` under right multiplication by `gens`.
fn close_under_products(
    identity: DMatrix<f64>,
    gens: &[DMatrix<f64>],
    limit: usize,
) -> Result<Vec<DMatrix<f64>>> {
    let mut found = vec![identity];
    let mut head = 0;
    while head < found.len() {
        let current = found[head].clone();
        head += 1;
        for g in gens {
            let next = &current * g;
            if !found.iter().any(|m| (m - &next).amax() < CLOSURE_TOL) {
                found.push(next);
                if found.len() > limit {
                    return Err(Error::InvalidArgument("group closure does not terminate".into()));
                }
            }
        }
    }
    Ok(found)
}
