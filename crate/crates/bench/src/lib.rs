//! Fixtures shared by the criterion benches.

use corot_core::finray::{self, FinRayParams};
use corot_core::{
    build_structure, ElementKind, ElementProps, ElementSpec, Fixity, Node, Structure, SupportSet,
};

/// Horizontal cantilever of `n_el` equal beam elements with the default finger
/// section (E = 2e7 Pa, 20 mm × 1 mm).
pub fn cantilever(n_el: usize, length: f64) -> Structure {
    let props = ElementProps::rectangular(2e7, 20e-3, 1e-3, ElementKind::Beam);
    let nodes = (0..=n_el)
        .map(|i| Node::new(i, length * i as f64 / n_el as f64, 0.0))
        .collect();
    let specs: Vec<_> = (0..n_el)
        .map(|i| ElementSpec::new(i, i + 1, props))
        .collect();
    build_structure(nodes, &specs, SupportSet::new().with(0, Fixity::FIXED))
        .expect("cantilever fixture is valid")
}

pub fn baseline_finger(n_crossbeams: usize) -> finray::FinRayModel {
    let params = FinRayParams {
        n_crossbeams,
        ..FinRayParams::default()
    };
    finray::generate(&params).expect("baseline finger is valid")
}
