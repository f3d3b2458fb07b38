//! Structural data model: nodes, elements, supports and nodal loads.
//!
//! A [`Structure`] is validated once in [`build_structure`] and is immutable
//! afterwards, so it can be shared freely between concurrent solves.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Degrees of freedom carried by each node.
pub const DOFS_PER_NODE: usize = 3;

/// Nodal degree-of-freedom component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dof {
    /// Global X translation.
    U,
    /// Global Y translation.
    W,
    /// In-plane rotation.
    Theta,
}

impl Dof {
    pub const ALL: [Dof; 3] = [Dof::U, Dof::W, Dof::Theta];

    fn offset(self) -> usize {
        match self {
            Dof::U => 0,
            Dof::W => 1,
            Dof::Theta => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: usize,
    pub x0: f64,
    pub y0: f64,
}

impl Node {
    pub fn new(id: usize, x0: f64, y0: f64) -> Self {
        Self { id, x0, y0 }
    }
}

/// Bending behaviour of an element.
///
/// A pin-ended element carries axial force only; its end moments are
/// identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementKind {
    Beam,
    PinEnded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementProps {
    /// Young's modulus (Pa).
    pub e_modulus: f64,
    /// Cross-section area (m²).
    pub area: f64,
    /// Second moment of area (m⁴).
    pub inertia: f64,
    pub kind: ElementKind,
}

impl ElementProps {
    pub fn new(e_modulus: f64, area: f64, inertia: f64, kind: ElementKind) -> Self {
        Self {
            e_modulus,
            area,
            inertia,
            kind,
        }
    }

    /// Rectangular `b × h` section, bending about the axis parallel to `b`.
    pub fn rectangular(e_modulus: f64, b: f64, h: f64, kind: ElementKind) -> Self {
        Self::new(e_modulus, b * h, b * h.powi(3) / 12.0, kind)
    }

    fn validate(&self) -> Result<(), String> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.e_modulus) {
            return Err(format!("E must be positive, got {}", self.e_modulus));
        }
        if !ok(self.area) {
            return Err(format!("A must be positive, got {}", self.area));
        }
        if !ok(self.inertia) {
            return Err(format!("I must be positive, got {}", self.inertia));
        }
        Ok(())
    }
}

/// Connectivity and section data for one element before the reference
/// geometry is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementSpec {
    pub node_i: usize,
    pub node_j: usize,
    pub props: ElementProps,
}

impl ElementSpec {
    pub fn new(node_i: usize, node_j: usize, props: ElementProps) -> Self {
        Self {
            node_i,
            node_j,
            props,
        }
    }
}

/// A two-node element with its reference length and inclination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub node_i: usize,
    pub node_j: usize,
    pub props: ElementProps,
    /// Reference length (m).
    pub l0: f64,
    /// Reference inclination in (−π, π].
    pub beta0: f64,
    /// Reference chord vector from node i to node j (m).
    pub chord0: [f64; 2],
}

/// Per-node fixities: `true` means the component is held at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Fixity {
    pub u: bool,
    pub w: bool,
    pub theta: bool,
}

impl Fixity {
    /// Fully clamped node.
    pub const FIXED: Fixity = Fixity {
        u: true,
        w: true,
        theta: true,
    };
    /// Translations held, rotation free.
    pub const PINNED: Fixity = Fixity {
        u: true,
        w: true,
        theta: false,
    };
    /// Horizontal translation and rotation held, vertical free.
    pub const ROLLER: Fixity = Fixity {
        u: true,
        w: false,
        theta: true,
    };

    pub fn is_fixed(&self, dof: Dof) -> bool {
        match dof {
            Dof::U => self.u,
            Dof::W => self.w,
            Dof::Theta => self.theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupportSet {
    constrained: BTreeMap<usize, Fixity>,
}

impl SupportSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, node: usize, fixity: Fixity) -> Self {
        self.insert(node, fixity);
        self
    }

    pub fn insert(&mut self, node: usize, fixity: Fixity) {
        self.constrained.insert(node, fixity);
    }

    pub fn get(&self, node: usize) -> Option<Fixity> {
        self.constrained.get(&node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Fixity)> + '_ {
        self.constrained.iter().map(|(&n, &f)| (n, f))
    }

    pub fn is_empty(&self) -> bool {
        self.constrained.is_empty()
    }

    fn has_translational(&self) -> bool {
        self.constrained.values().any(|f| f.u || f.w)
    }
}

/// Validated structural model.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    nodes: Vec<Node>,
    elements: Vec<Element>,
    supports: SupportSet,
    /// Node id → position in `nodes`, which is also the DOF block index.
    slot: HashMap<usize, usize>,
    /// Sorted list of constrained global DOF indices.
    constrained: Vec<usize>,
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Builds and validates a structure, computing `l0` and `beta0` for every
/// element from the reference nodal coordinates.
pub fn build_structure(
    nodes: Vec<Node>,
    element_specs: &[ElementSpec],
    supports: SupportSet,
) -> Result<Structure, ModelError> {
    let mut slot = HashMap::with_capacity(nodes.len());
    for (k, n) in nodes.iter().enumerate() {
        if !(n.x0.is_finite() && n.y0.is_finite()) {
            return Err(ModelError::NonFiniteCoordinate(n.id));
        }
        if slot.insert(n.id, k).is_some() {
            return Err(ModelError::DuplicateNode(n.id));
        }
    }

    let mut elements = Vec::with_capacity(element_specs.len());
    for (index, spec) in element_specs.iter().enumerate() {
        let (Some(&a), Some(&b)) = (slot.get(&spec.node_i), slot.get(&spec.node_j)) else {
            let node = if slot.contains_key(&spec.node_i) {
                spec.node_j
            } else {
                spec.node_i
            };
            return Err(ModelError::DanglingElement {
                element: index,
                node,
            });
        };
        if spec.node_i == spec.node_j {
            return Err(ModelError::InvalidElement {
                element: index,
                reason: "element connects a node to itself".into(),
            });
        }
        spec.props
            .validate()
            .map_err(|reason| ModelError::InvalidElement {
                element: index,
                reason,
            })?;
        let (ni, nj) = (nodes[a], nodes[b]);
        let dx = nj.x0 - ni.x0;
        let dy = nj.y0 - ni.y0;
        let l0 = dx.hypot(dy);
        if l0 <= 0.0 {
            return Err(ModelError::InvalidElement {
                element: index,
                reason: "end nodes coincide".into(),
            });
        }
        elements.push(Element {
            node_i: spec.node_i,
            node_j: spec.node_j,
            props: spec.props,
            l0,
            beta0: wrap_angle(dy.atan2(dx)),
            chord0: [dx, dy],
        });
    }

    for (node, _) in supports.iter() {
        if !slot.contains_key(&node) {
            return Err(ModelError::UnknownNode(node));
        }
    }
    if !supports.has_translational() {
        return Err(ModelError::UnconstrainedStructure);
    }
    if !is_connected(&nodes, &elements, &slot) {
        return Err(ModelError::Disconnected);
    }

    let mut constrained = Vec::new();
    for (node, fixity) in supports.iter() {
        let base = DOFS_PER_NODE * slot[&node];
        for dof in Dof::ALL {
            if fixity.is_fixed(dof) {
                constrained.push(base + dof.offset());
            }
        }
    }
    constrained.sort_unstable();

    Ok(Structure {
        nodes,
        elements,
        supports,
        slot,
        constrained,
    })
}

fn is_connected(nodes: &[Node], elements: &[Element], slot: &HashMap<usize, usize>) -> bool {
    if nodes.len() <= 1 {
        return true;
    }
    let mut adjacency = vec![Vec::new(); nodes.len()];
    for e in elements {
        let (a, b) = (slot[&e.node_i], slot[&e.node_j]);
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut seen = HashSet::from([0usize]);
    let mut stack = vec![0usize];
    while let Some(k) = stack.pop() {
        for &next in &adjacency[k] {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len() == nodes.len()
}

impl Structure {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn supports(&self) -> &SupportSet {
        &self.supports
    }

    pub fn n_dof(&self) -> usize {
        DOFS_PER_NODE * self.nodes.len()
    }

    pub fn node(&self, id: usize) -> Option<&Node> {
        self.slot.get(&id).map(|&k| &self.nodes[k])
    }

    /// Global index of a nodal DOF: `3·slot + {0, 1, 2}` where `slot` is the
    /// node's position in the node list (equal to its id for 0-based, gap-free
    /// numbering).
    pub fn dof_index(&self, node: usize, dof: Dof) -> Result<usize, ModelError> {
        self.slot
            .get(&node)
            .map(|&k| DOFS_PER_NODE * k + dof.offset())
            .ok_or(ModelError::UnknownNode(node))
    }

    /// The six global DOF indices of an element, node i then node j.
    pub fn element_dofs(&self, element: &Element) -> [usize; 6] {
        let a = DOFS_PER_NODE * self.slot[&element.node_i];
        let b = DOFS_PER_NODE * self.slot[&element.node_j];
        [a, a + 1, a + 2, b, b + 1, b + 2]
    }

    /// Sorted global indices of every constrained DOF.
    pub fn constrained_dofs(&self) -> &[usize] {
        &self.constrained
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained.binary_search(&dof).is_ok()
    }

    pub fn zero_vector(&self) -> DVector<f64> {
        DVector::zeros(self.n_dof())
    }
}

/// Total external nodal load vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadCase {
    f_total: DVector<f64>,
}

impl LoadCase {
    /// Validates length, finiteness and that no load sits on a constrained DOF.
    pub fn new(structure: &Structure, f_total: DVector<f64>) -> Result<Self, ModelError> {
        if f_total.len() != structure.n_dof() {
            return Err(ModelError::LoadLength {
                expected: structure.n_dof(),
                actual: f_total.len(),
            });
        }
        for (d, v) in f_total.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFiniteLoad(d));
            }
            if *v != 0.0 && structure.is_constrained(d) {
                return Err(ModelError::LoadOnConstrainedDof(d));
            }
        }
        Ok(Self { f_total })
    }

    pub fn zero(structure: &Structure) -> Self {
        Self {
            f_total: structure.zero_vector(),
        }
    }

    /// Builds a load case from `(node, component, value)` triples; repeated
    /// entries accumulate.
    pub fn from_nodal(
        structure: &Structure,
        entries: &[(usize, Dof, f64)],
    ) -> Result<Self, ModelError> {
        let mut f = structure.zero_vector();
        for &(node, dof, value) in entries {
            f[structure.dof_index(node, dof)?] += value;
        }
        Self::new(structure, f)
    }

    pub fn f_total(&self) -> &DVector<f64> {
        &self.f_total
    }

    /// The same load pattern multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            f_total: &self.f_total * factor,
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.f_total.norm()
    }
}
