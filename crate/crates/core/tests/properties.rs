use nalgebra::{DMatrix, Matrix6};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corot_core::assembly::{assemble_tangent, assemble_tangent_in_order, update_member_data};
use corot_core::corotational::{
    current_geometry, element_response, element_tangent_stiffness, local_displacements,
    ElementDisplacement,
};
use corot_core::finray::{generate, Connection, FinRayParams};
use corot_core::{
    build_structure, Dof, Element, ElementKind, ElementProps, ElementSpec, Fixity, GlobalVector,
    Node, Structure, SupportSet,
};

const FD_STEP: f64 = 1e-7;

fn single_element(x: [f64; 4], props: ElementProps) -> Element {
    let s = build_structure(
        vec![Node::new(0, x[0], x[1]), Node::new(1, x[2], x[3])],
        &[ElementSpec::new(0, 1, props)],
        SupportSet::new().with(0, Fixity::FIXED),
    )
    .unwrap();
    s.elements()[0]
}

/// Displacement that rotates the chord rigidly by `phi`, stretches it by
/// `strain`, translates it, and turns the ends by `theta_l` relative to the
/// chord.
fn element_displacement(
    e: &Element,
    phi: f64,
    strain: f64,
    shift: [f64; 2],
    theta_l: [f64; 2],
) -> ElementDisplacement {
    let (c, s) = (phi.cos(), phi.sin());
    let [dx, dy] = e.chord0;
    let chord = [
        (1.0 + strain) * (c * dx - s * dy),
        (1.0 + strain) * (s * dx + c * dy),
    ];
    ElementDisplacement::from_row_slice(&[
        shift[0],
        shift[1],
        phi + theta_l[0],
        shift[0] + chord[0] - dx,
        shift[1] + chord[1] - dy,
        phi + theta_l[1],
    ])
}

fn fd_element_tangent(e: &Element, p: &ElementDisplacement) -> Matrix6<f64> {
    let mut k = Matrix6::zeros();
    for j in 0..6 {
        let mut plus = *p;
        let mut minus = *p;
        plus[j] += FD_STEP;
        minus[j] -= FD_STEP;
        let dq = element_response(e, &plus).unwrap().2 - element_response(e, &minus).unwrap().2;
        k.set_column(j, &(dq / (2.0 * FD_STEP)));
    }
    k
}

fn kind_strategy() -> impl Strategy<Value = ElementKind> {
    prop_oneof![Just(ElementKind::Beam), Just(ElementKind::PinEnded)]
}

prop_compose! {
    fn element_state()(
        x0 in -0.1..0.1f64, y0 in -0.1..0.1f64,
        len in 0.005..0.1f64, beta0 in -3.1..3.1f64,
        h in 0.5e-3..3e-3f64, kind in kind_strategy(),
        phi in -1.0..1.0f64, strain in -0.05..0.05f64,
        sx in -0.05..0.05f64, sy in -0.05..0.05f64,
        t1 in -1.0..1.0f64, t2 in -1.0..1.0f64,
    ) -> (Element, ElementDisplacement) {
        let props = ElementProps::rectangular(2e7, 20e-3, h, kind);
        let e = single_element([x0, y0, x0 + len * beta0.cos(), y0 + len * beta0.sin()], props);
        let p = element_displacement(&e, phi, strain, [sx, sy], [t1, t2]);
        (e, p)
    }
}

fn tangent_at(e: &Element, p: &ElementDisplacement) -> Matrix6<f64> {
    let (geometry, forces, _) = element_response(e, p).unwrap();
    element_tangent_stiffness(&e.props, e.l0, &geometry, &forces)
}

fn frobenius_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn element_tangent_matches_finite_differences((e, p) in element_state()) {
        let k = tangent_at(&e, &p);
        let fd = fd_element_tangent(&e, &p);
        let err = (k - fd).norm() / k.norm();
        prop_assert!(err < 1e-4, "relative error {err:e}");
    }

    #[test]
    fn element_tangent_is_symmetric((e, p) in element_state()) {
        let k = tangent_at(&e, &p);
        prop_assert!((k - k.transpose()).norm() <= 1e-10 * k.norm());
    }

    #[test]
    fn element_forces_are_self_equilibrated((e, p) in element_state()) {
        let (_, _, q) = element_response(&e, &p).unwrap();
        let scale = q.amax().max(1e-30);
        let dx = e.chord0[0] + p[3] - p[0];
        let dy = e.chord0[1] + p[4] - p[1];
        prop_assert!((q[0] + q[3]).abs() <= 1e-10 * scale);
        prop_assert!((q[1] + q[4]).abs() <= 1e-10 * scale);
        // moments about node i
        let moment = q[2] + q[5] + dx * q[4] - dy * q[3];
        prop_assert!(moment.abs() <= 1e-10 * scale * (1.0 + dx.hypot(dy)));
    }

    #[test]
    fn rigid_motion_of_an_element_is_strain_free(
        (e, _) in element_state(),
        phi in -3.14..3.14f64, sx in -1.0..1.0f64, sy in -1.0..1.0f64,
    ) {
        let p = element_displacement(&e, phi, 0.0, [sx, sy], [0.0, 0.0]);
        let g = current_geometry(&e, &p).unwrap();
        let local = local_displacements(&e, &p, &g);
        prop_assert!(local.u_l.abs() <= 1e-10);
        prop_assert!(local.theta_1l.abs() <= 1e-10 && local.theta_2l.abs() <= 1e-10);
        let q = element_response(&e, &p).unwrap().2;
        prop_assert!(q.amax() <= 1e-10);
    }
}

fn finray_strategy() -> impl Strategy<Value = Structure> {
    (
        0usize..5,
        15.0..40.0f64,
        -15.0..15.0f64,
        prop_oneof![Just(Connection::Rigid), Just(Connection::Simple)],
        1usize..4,
    )
        .prop_filter_map(
            "infeasible geometry",
            |(n, top, incl, connection, refinement)| {
                generate(&FinRayParams {
                    n_crossbeams: n,
                    top_angle: top,
                    inclination: incl,
                    connection,
                    refinement,
                    ..FinRayParams::default()
                })
                .ok()
                .map(|m| m.structure)
            },
        )
}

/// Rigid motion `x ↦ R(phi)·x + t` of every node as a global displacement.
fn rigid_displacement(s: &Structure, phi: f64, t: [f64; 2]) -> GlobalVector {
    let (c, sn) = (phi.cos(), phi.sin());
    let mut u = s.zero_vector();
    for (slot, n) in s.nodes().iter().enumerate() {
        u[3 * slot] = c * n.x0 - sn * n.y0 + t[0] - n.x0;
        u[3 * slot + 1] = sn * n.x0 + c * n.y0 + t[1] - n.y0;
        u[3 * slot + 2] = phi;
    }
    u
}

fn fd_global_tangent(s: &Structure, u: &GlobalVector) -> DMatrix<f64> {
    let n = s.n_dof();
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut plus = u.clone();
        let mut minus = u.clone();
        plus[j] += FD_STEP;
        minus[j] -= FD_STEP;
        let df = update_member_data(s, &plus).unwrap().1 - update_member_data(s, &minus).unwrap().1;
        k.set_column(j, &(df / (2.0 * FD_STEP)));
    }
    k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rigid_motion_of_a_structure_is_force_free(
        s in finray_strategy(),
        phi in -3.14..3.14f64, tx in -1.0..1.0f64, ty in -1.0..1.0f64,
    ) {
        let u = rigid_displacement(&s, phi, [tx, ty]);
        let (states, f_int) = update_member_data(&s, &u).unwrap();
        prop_assert!(f_int.amax() <= 1e-10);
        for st in states.iter() {
            prop_assert!(st.forces.n_axial.abs() <= 1e-10);
            prop_assert!(st.forces.m1.abs() <= 1e-10 && st.forces.m2.abs() <= 1e-10);
        }
    }

    #[test]
    fn assembled_tangent_matches_finite_differences(
        s in finray_strategy(),
        phi in -1.0..1.0f64,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = rigid_displacement(&s, phi, [0.01, -0.02]);
        for (slot, _) in s.nodes().iter().enumerate() {
            u[3 * slot] += rng.gen_range(-1e-5..1e-5);
            u[3 * slot + 1] += rng.gen_range(-1e-5..1e-5);
            u[3 * slot + 2] += rng.gen_range(-0.1..0.1);
        }
        let (states, _) = update_member_data(&s, &u).unwrap();
        let k = assemble_tangent(&s, &states);
        prop_assert!(frobenius_error(&k, &fd_global_tangent(&s, &u)) < 1e-4);
        prop_assert!((&k - k.transpose()).norm() <= 1e-10 * k.norm());

        let mut order: Vec<usize> = (0..s.elements().len()).collect();
        order.shuffle(&mut rng);
        let shuffled = assemble_tangent_in_order(&s, &states, order);
        prop_assert!((&k - shuffled).norm() <= 1e-12 * k.norm());
    }

    #[test]
    fn dof_numbering_is_a_bijection(s in finray_strategy()) {
        let mut seen = vec![false; s.n_dof()];
        for n in s.nodes() {
            for dof in Dof::ALL {
                let d = s.dof_index(n.id, dof).unwrap();
                prop_assert!(!seen[d]);
                seen[d] = true;
            }
        }
        prop_assert!(seen.into_iter().all(|v| v));
    }
}
