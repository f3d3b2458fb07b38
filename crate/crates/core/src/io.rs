//! File formats: the structure and load JSON documents and the per-increment
//! solve CSV.
//!
//! Structure documents look like
//! `{"nodes":[{"id","x","y"}], "elements":[{"i","j","E","A","I","kind"}],
//! "supports":[{"node","u","w","theta"}]}` in SI units. Documents written for
//! a Fin-Ray finger also carry a `"contact_nodes"` array, which readers ignore.
//!
//! Load documents list concentrated nodal loads:
//! `{"forces":[{"node","fx","fy","moment"}]}`, where omitted components are
//! zero and repeated nodes accumulate.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::finray::FinRayModel;
use crate::model::{
    build_structure, Dof, ElementKind, ElementProps, ElementSpec, Fixity, LoadCase, Node,
    Structure, SupportSet,
};
use crate::solver::SolveResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub i: usize,
    pub j: usize,
    #[serde(rename = "E")]
    pub e_modulus: f64,
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "I")]
    pub inertia: f64,
    pub kind: ElementKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportDoc {
    pub node: usize,
    #[serde(default)]
    pub u: bool,
    #[serde(default)]
    pub w: bool,
    #[serde(default)]
    pub theta: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub nodes: Vec<NodeDoc>,
    pub elements: Vec<ElementDoc>,
    pub supports: Vec<SupportDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_nodes: Option<Vec<usize>>,
}

impl StructureDoc {
    pub fn from_structure(structure: &Structure) -> Self {
        Self {
            nodes: structure
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.id,
                    x: n.x0,
                    y: n.y0,
                })
                .collect(),
            elements: structure
                .elements()
                .iter()
                .map(|e| ElementDoc {
                    i: e.node_i,
                    j: e.node_j,
                    e_modulus: e.props.e_modulus,
                    area: e.props.area,
                    inertia: e.props.inertia,
                    kind: e.props.kind,
                })
                .collect(),
            supports: structure
                .supports()
                .iter()
                .map(|(node, f)| SupportDoc {
                    node,
                    u: f.u,
                    w: f.w,
                    theta: f.theta,
                })
                .collect(),
            contact_nodes: None,
        }
    }

    pub fn from_finray(model: &FinRayModel) -> Self {
        Self {
            contact_nodes: Some(model.contact_nodes.clone()),
            ..Self::from_structure(&model.structure)
        }
    }

    /// Validates the document through [`build_structure`].
    pub fn to_structure(&self) -> Result<Structure, ModelError> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node::new(n.id, n.x, n.y))
            .collect();
        let specs: Vec<ElementSpec> = self
            .elements
            .iter()
            .map(|e| {
                ElementSpec::new(
                    e.i,
                    e.j,
                    ElementProps::new(e.e_modulus, e.area, e.inertia, e.kind),
                )
            })
            .collect();
        let mut supports = SupportSet::new();
        for s in &self.supports {
            supports.insert(
                s.node,
                Fixity {
                    u: s.u,
                    w: s.w,
                    theta: s.theta,
                },
            );
        }
        build_structure(nodes, &specs, supports)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceDoc {
    pub node: usize,
    #[serde(default)]
    pub fx: f64,
    #[serde(default)]
    pub fy: f64,
    #[serde(default)]
    pub moment: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadDoc {
    #[serde(default)]
    pub forces: Vec<ForceDoc>,
}

impl LoadDoc {
    pub fn to_load_case(&self, structure: &Structure) -> Result<LoadCase, ModelError> {
        let entries: Vec<_> = self
            .forces
            .iter()
            .flat_map(|f| {
                [
                    (f.node, Dof::U, f.fx),
                    (f.node, Dof::W, f.fy),
                    (f.node, Dof::Theta, f.moment),
                ]
            })
            .collect();
        LoadCase::from_nodal(structure, &entries)
    }

    /// Nonzero nodal entries of `load`, one record per loaded node.
    pub fn from_load_case(structure: &Structure, load: &LoadCase) -> Self {
        let f = load.f_total();
        let forces = structure
            .nodes()
            .iter()
            .enumerate()
            .filter_map(|(slot, n)| {
                let c = &f.as_slice()[3 * slot..3 * slot + 3];
                c.iter().any(|v| *v != 0.0).then(|| ForceDoc {
                    node: n.id,
                    fx: c[0],
                    fy: c[1],
                    moment: c[2],
                })
            })
            .collect();
        Self { forces }
    }
}

pub const SOLVE_CSV_HEADER: [&str; 7] = [
    "increment",
    "node",
    "u",
    "w",
    "theta",
    "residual_norm",
    "iterations",
];

/// One row per recorded increment and node, in increment then node order.
/// Numbers use the shortest representation that round-trips.
pub fn write_solve_csv<W: Write>(
    out: W,
    structure: &Structure,
    result: &SolveResult,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SOLVE_CSV_HEADER)?;
    for rec in &result.increments {
        let u = rec.displacement.as_slice();
        for (slot, node) in structure.nodes().iter().enumerate() {
            w.write_record([
                rec.increment.to_string(),
                node.id.to_string(),
                u[3 * slot].to_string(),
                u[3 * slot + 1].to_string(),
                u[3 * slot + 2].to_string(),
                rec.residual_norm.to_string(),
                rec.iterations.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
