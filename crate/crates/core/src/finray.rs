//! Parametric Fin-Ray finger generation.
//!
//! Layout (x to the right, y up, units m):
//!
//! ```text
//!              tip (0, h)
//!               /|
//!       front  / |  back fin (vertical, x = 0)
//!        fin  /--|  crossbeam i, rooted on the back fin at y = h·i/(n+1)
//!            /   |
//!           /----|
//!          /     |
//!   (−h·tanα, 0)  (0, 0)        α = top_angle
//! ```
//!
//! Crossbeams leave the back fin perpendicular to it. A positive inclination
//! rotates a crossbeam about its back-fin root so that its front-fin end moves
//! down:
//!
//! ```text
//!     front ●────────● back      0°
//!     front ●
//!             `-._
//!                 `● back        +10°
//! ```
//!
//! Both fin roots are clamped. Contact nodes are numbered from the base
//! toward the tip: the crossbeam junctions on the front fin followed by the
//! front-fin node at the middle of the topmost segment.

use serde::{Deserialize, Serialize};

use crate::error::FinRayError;
use crate::model::{
    build_structure, Dof, ElementKind, ElementProps, ElementSpec, Fixity, LoadCase, Node,
    Structure, SupportSet,
};

/// Joint between crossbeams and fins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connection {
    /// Crossbeam free to rotate at both fins: a single pin-ended member.
    Simple,
    /// Crossbeam welded to the fins and bending with them.
    Rigid,
}

impl std::fmt::Display for Connection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Connection::Simple => "simple",
            Connection::Rigid => "rigid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinRayParams {
    /// Nominal base width (m). The generated base width is `height·tan(top_angle)`.
    pub width: f64,
    /// Finger height (m).
    pub height: f64,
    pub n_crossbeams: usize,
    /// Angle between front and back fin at the tip (degrees).
    pub top_angle: f64,
    /// Crossbeam tilt from the perpendicular to the back fin (degrees).
    pub inclination: f64,
    pub connection: Connection,
    /// Section width (m).
    pub section_b: f64,
    /// Section thickness in the bending plane (m).
    pub section_h: f64,
    /// Young's modulus (Pa).
    pub e_modulus: f64,
    /// Elements per physical segment.
    pub refinement: usize,
}

impl Default for FinRayParams {
    fn default() -> Self {
        Self {
            width: 40e-3,
            height: 72e-3,
            n_crossbeams: 3,
            top_angle: 20.0,
            inclination: 0.0,
            connection: Connection::Rigid,
            section_b: 20e-3,
            section_h: 1e-3,
            e_modulus: 2e7,
            refinement: 4,
        }
    }
}

impl FinRayParams {
    pub fn validate(&self) -> Result<(), FinRayError> {
        let positive = [
            ("width", self.width),
            ("height", self.height),
            ("section_b", self.section_b),
            ("section_h", self.section_h),
            ("e_modulus", self.e_modulus),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(FinRayError::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.top_angle > 0.0 && self.top_angle < 90.0) {
            return Err(FinRayError::InvalidParams(format!(
                "top_angle must lie in (0, 90) degrees, got {}",
                self.top_angle
            )));
        }
        if !(self.inclination.abs() < 45.0) {
            return Err(FinRayError::InvalidParams(format!(
                "inclination must lie in (-45, 45) degrees, got {}",
                self.inclination
            )));
        }
        if self.refinement == 0 {
            return Err(FinRayError::InvalidParams(
                "refinement must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn section(&self, kind: ElementKind) -> ElementProps {
        ElementProps::rectangular(self.e_modulus, self.section_b, self.section_h, kind)
    }

    /// Horizontal distance between the two fin roots.
    pub fn base_width(&self) -> f64 {
        self.height * self.top_angle.to_radians().tan()
    }
}

/// A generated finger with its named loading points.
#[derive(Debug, Clone, PartialEq)]
pub struct FinRayModel {
    pub structure: Structure,
    /// Front-fin node ids available for loading, ordered base → tip.
    pub contact_nodes: Vec<usize>,
    /// Indices of every crossbeam element.
    pub crossbeam_elements: Vec<usize>,
    /// Unit inward normal of the undeformed front fin.
    pub inward_normal: [f64; 2],
    pub front_root: usize,
    pub back_root: usize,
    pub tip: usize,
}

struct Mesh {
    nodes: Vec<Node>,
    specs: Vec<ElementSpec>,
}

impl Mesh {
    fn add_node(&mut self, p: [f64; 2]) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::new(id, p[0], p[1]));
        id
    }

    /// Subdivides the segment `a → b` into `n` elements, returning all node
    /// ids along it including both ends.
    fn segment(&mut self, a: usize, b: usize, n: usize, props: ElementProps) -> Vec<usize> {
        let (pa, pb) = (self.nodes[a], self.nodes[b]);
        let mut chain = vec![a];
        for k in 1..n {
            let t = k as f64 / n as f64;
            chain.push(self.add_node([pa.x0 + t * (pb.x0 - pa.x0), pa.y0 + t * (pb.y0 - pa.y0)]));
        }
        chain.push(b);
        for w in chain.windows(2) {
            self.specs.push(ElementSpec::new(w[0], w[1], props));
        }
        chain
    }
}

/// Builds the finger structure described by `params`.
pub fn generate(params: &FinRayParams) -> Result<FinRayModel, FinRayError> {
    params.validate()?;
    let h = params.height;
    let alpha = params.top_angle.to_radians();
    // The back fin is vertical and the crossbeams start perpendicular to it,
    // so positive inclination tilts their front ends downward.
    let back_root = [0.0, 0.0];
    let tip = [0.0, h];
    let front_root = [-h * alpha.tan(), 0.0];
    let incl = params.inclination.to_radians();
    let dir = [-incl.cos(), -incl.sin()];
    let front_vec = [tip[0] - front_root[0], tip[1] - front_root[1]];

    let n = params.n_crossbeams;
    let mut junctions = Vec::with_capacity(n);
    for i in 1..=n {
        let t_back = i as f64 / (n + 1) as f64;
        let start = [0.0, t_back * h];
        // start + s·dir = front_root + t·front_vec
        let det = dir[0] * (-front_vec[1]) - dir[1] * (-front_vec[0]);
        let rhs = [front_root[0] - start[0], front_root[1] - start[1]];
        let t_front = (dir[0] * rhs[1] - dir[1] * rhs[0]) / det;
        let reach = (rhs[0] * (-front_vec[1]) - rhs[1] * (-front_vec[0])) / det;
        if !(t_front > 0.0 && t_front < 1.0 && reach > 0.0) {
            return Err(FinRayError::GeometryInfeasible(format!(
                "crossbeam {i} meets the front fin at fraction {t_front:.4}, outside (0, 1)"
            )));
        }
        let end = [
            front_root[0] + t_front * front_vec[0],
            front_root[1] + t_front * front_vec[1],
        ];
        junctions.push((t_back, start, t_front, end));
    }
    for w in junctions.windows(2) {
        if !(w[1].2 > w[0].2) {
            return Err(FinRayError::GeometryInfeasible(
                "crossbeam front ends are not in ascending order".into(),
            ));
        }
    }

    let mut mesh = Mesh {
        nodes: Vec::new(),
        specs: Vec::new(),
    };
    let fin = params.section(ElementKind::Beam);
    let r = params.refinement;

    let front_root_id = mesh.add_node(front_root);
    let back_root_id = mesh.add_node(back_root);
    let tip_id = mesh.add_node(tip);
    let front_ids: Vec<usize> = junctions.iter().map(|j| mesh.add_node(j.3)).collect();
    let back_ids: Vec<usize> = junctions.iter().map(|j| mesh.add_node(j.1)).collect();

    let mut contact_nodes = front_ids.clone();
    let mut front_chain_ends = vec![front_root_id];
    front_chain_ends.extend(&front_ids);
    front_chain_ends.push(tip_id);
    let mut top_segment = Vec::new();
    for w in front_chain_ends.windows(2) {
        top_segment = mesh.segment(w[0], w[1], r, fin);
    }
    contact_nodes.push(top_segment[(r + 1) / 2]);

    let mut back_chain_ends = vec![back_root_id];
    back_chain_ends.extend(&back_ids);
    back_chain_ends.push(tip_id);
    for w in back_chain_ends.windows(2) {
        mesh.segment(w[0], w[1], r, fin);
    }

    let mut crossbeam_elements = Vec::new();
    for (&b, &f) in back_ids.iter().zip(&front_ids) {
        let first = mesh.specs.len();
        match params.connection {
            Connection::Rigid => {
                mesh.segment(b, f, r, fin);
            }
            // Interior nodes on a pin-ended chain would be a mechanism.
            Connection::Simple => {
                mesh.segment(b, f, 1, params.section(ElementKind::PinEnded));
            }
        }
        crossbeam_elements.extend(first..mesh.specs.len());
    }

    let supports = SupportSet::new()
        .with(front_root_id, Fixity::FIXED)
        .with(back_root_id, Fixity::FIXED);
    let structure = build_structure(mesh.nodes, &mesh.specs, supports)?;

    let len = front_vec[0].hypot(front_vec[1]);
    let inward_normal = [front_vec[1] / len, -front_vec[0] / len];

    Ok(FinRayModel {
        structure,
        contact_nodes,
        crossbeam_elements,
        inward_normal,
        front_root: front_root_id,
        back_root: back_root_id,
        tip: tip_id,
    })
}

impl FinRayModel {
    pub fn contact_node(&self, rank: usize) -> Result<usize, FinRayError> {
        if rank == 0 || rank > self.contact_nodes.len() {
            return Err(FinRayError::UnknownContactNode {
                rank,
                available: self.contact_nodes.len(),
            });
        }
        Ok(self.contact_nodes[rank - 1])
    }

    /// Single concentrated force at contact node `rank` (1-based). The
    /// direction defaults to the inward normal of the undeformed front fin
    /// and is normalized otherwise.
    pub fn load_at_contact_node(
        &self,
        rank: usize,
        magnitude: f64,
        direction: Option<[f64; 2]>,
    ) -> Result<LoadCase, FinRayError> {
        let node = self.contact_node(rank)?;
        let d = direction.unwrap_or(self.inward_normal);
        let norm = d[0].hypot(d[1]);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(FinRayError::InvalidParams(
                "load direction must be non-zero".into(),
            ));
        }
        let (fx, fy) = (magnitude * d[0] / norm, magnitude * d[1] / norm);
        Ok(LoadCase::from_nodal(
            &self.structure,
            &[(node, Dof::U, fx), (node, Dof::W, fy)],
        )?)
    }
}

/// Free function form of [`FinRayModel::load_at_contact_node`].
pub fn load_at_contact_node(
    model: &FinRayModel,
    node_rank: usize,
    magnitude: f64,
    direction: Option<[f64; 2]>,
) -> Result<LoadCase, FinRayError> {
    model.load_at_contact_node(node_rank, magnitude, direction)
}
