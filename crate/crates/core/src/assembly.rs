//! Global assembly of internal forces and tangent stiffness, support
//! modification and the dense linear solve.

use nalgebra::{DMatrix, DVector};

use crate::corotational::{
    element_response, element_tangent_stiffness, ElementDisplacement, ElementGeometry, LocalForces,
};
use crate::error::MechanicsError;
use crate::model::Structure;

pub type GlobalVector = DVector<f64>;
pub type GlobalMatrix = DMatrix<f64>;

/// Relative pivot magnitude below which a factorization is declared singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// Current chord geometry and local forces of one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementState {
    pub geometry: ElementGeometry,
    pub forces: LocalForces,
}

/// Member data for every element, in element order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ElementStateSet {
    pub states: Vec<ElementState>,
}

impl ElementStateSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ElementState> {
        self.states.iter()
    }
}

fn gather(u: &GlobalVector, dofs: &[usize; 6]) -> ElementDisplacement {
    ElementDisplacement::from_fn(|k, _| u[dofs[k]])
}

/// Recomputes member data for a global displacement and assembles the
/// internal force vector.
pub fn update_member_data(
    structure: &Structure,
    u: &GlobalVector,
) -> Result<(ElementStateSet, GlobalVector), MechanicsError> {
    assert_eq!(u.len(), structure.n_dof(), "displacement length mismatch");
    let mut f_int = GlobalVector::zeros(structure.n_dof());
    let mut states = Vec::with_capacity(structure.elements().len());
    for (index, element) in structure.elements().iter().enumerate() {
        let dofs = structure.element_dofs(element);
        let p = gather(u, &dofs);
        let (geometry, forces, q) = element_response(element, &p)
            .map_err(|_| MechanicsError::DegenerateElement { element: index })?;
        for (k, &d) in dofs.iter().enumerate() {
            f_int[d] += q[k];
        }
        states.push(ElementState { geometry, forces });
    }
    Ok((ElementStateSet { states }, f_int))
}

/// Assembles the global tangent stiffness from the element tangents.
pub fn assemble_tangent(structure: &Structure, states: &ElementStateSet) -> GlobalMatrix {
    assemble_tangent_in_order(structure, states, 0..structure.elements().len())
}

/// Assembly over an explicit element order.
pub fn assemble_tangent_in_order(
    structure: &Structure,
    states: &ElementStateSet,
    order: impl IntoIterator<Item = usize>,
) -> GlobalMatrix {
    assert_eq!(states.len(), structure.elements().len());
    let n = structure.n_dof();
    let mut k = GlobalMatrix::zeros(n, n);
    for index in order {
        let element = &structure.elements()[index];
        let state = &states.states[index];
        let ke =
            element_tangent_stiffness(&element.props, element.l0, &state.geometry, &state.forces);
        let dofs = structure.element_dofs(element);
        for (a, &ra) in dofs.iter().enumerate() {
            for (b, &cb) in dofs.iter().enumerate() {
                k[(ra, cb)] += ke[(a, b)];
            }
        }
    }
    k
}

/// Zeros the rows and columns of constrained DOFs and puts 1 on their
/// diagonal, so the solved increment at a support is exactly zero.
pub fn apply_supports(mut k: GlobalMatrix, structure: &Structure) -> GlobalMatrix {
    for &d in structure.constrained_dofs() {
        k.row_mut(d).fill(0.0);
        k.column_mut(d).fill(0.0);
        k[(d, d)] = 1.0;
    }
    k
}

/// Dense LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: GlobalMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Factorizes `a`. Fails when a pivot falls below
    /// [`SINGULAR_PIVOT_RATIO`] times the largest pivot candidate of the
    /// first column step (the largest diagonal magnitude of the input).
    pub fn new(mut a: GlobalMatrix) -> Result<Self, MechanicsError> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
        let threshold = SINGULAR_PIVOT_RATIO * scale;
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            let (pivot_row, pivot) = (col..n)
                .map(|r| (r, a[(r, col)]))
                .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                .expect("non-empty pivot column");
            if !(pivot.abs() > threshold) {
                return Err(MechanicsError::SingularMatrix { row: col, pivot });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                perm.swap(pivot_row, col);
            }
            for r in col + 1..n {
                let factor = a[(r, col)] / pivot;
                if factor == 0.0 {
                    continue;
                }
                a[(r, col)] = factor;
                for c in col + 1..n {
                    a[(r, c)] -= factor * a[(col, c)];
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, rhs: &GlobalVector) -> GlobalVector {
        let n = self.lu.nrows();
        let mut x = GlobalVector::from_fn(n, |i, _| rhs[self.perm[i]]);
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }
}

/// Solves `K_s·x = rhs`.
pub fn solve_linear(
    k_s: &GlobalMatrix,
    rhs: &GlobalVector,
) -> Result<GlobalVector, MechanicsError> {
    Ok(LuFactors::new(k_s.clone())?.solve(rhs))
}
