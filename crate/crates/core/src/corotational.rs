//! Element-level co-rotational mechanics for a two-node planar beam.
//!
//! Each element's motion is split into a rigid-body motion of a frame that
//! follows the chord between its nodes and a small deformation measured in
//! that frame. The local deformation is the triple (axial stretch, rotation of
//! node 1 relative to the chord, rotation of node 2 relative to the chord);
//! the local forces are linear in it. Global internal forces and the tangent
//! stiffness follow from the chord kinematics.
//!
//! DOF order of an element vector is `(u1, w1, θ1, u2, w2, θ2)`.

use nalgebra::{Matrix2, Matrix3, Matrix6, SMatrix, Vector3, Vector6};

use crate::model::{wrap_angle, Element, ElementKind, ElementProps};

/// Element displacement vector `(u1, w1, θ1, u2, w2, θ2)`.
pub type ElementDisplacement = Vector6<f64>;
/// 3×6 map from global element displacement variations to local ones.
pub type TransformationMatrix = SMatrix<f64, 3, 6>;

/// Returned when the displaced end nodes coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegenerateElement;

/// Current chord geometry of a displaced element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub length: f64,
    pub cos_beta: f64,
    pub sin_beta: f64,
}

impl ElementGeometry {
    /// Current chord inclination in (−π, π].
    pub fn beta(&self) -> f64 {
        wrap_angle(self.sin_beta.atan2(self.cos_beta))
    }

    /// `r = [−c, −s, 0, c, s, 0]`, the variation of chord length.
    pub fn r(&self) -> Vector6<f64> {
        let (c, s) = (self.cos_beta, self.sin_beta);
        Vector6::new(-c, -s, 0.0, c, s, 0.0)
    }

    /// `z = [s, −c, 0, −s, c, 0]`; the chord rotation variation is `zᵀδp / L`.
    pub fn z(&self) -> Vector6<f64> {
        let (c, s) = (self.cos_beta, self.sin_beta);
        Vector6::new(s, -c, 0.0, -s, c, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalDisplacements {
    /// Chord stretch `L − L0`.
    pub u_l: f64,
    pub theta_1l: f64,
    pub theta_2l: f64,
}

impl LocalDisplacements {
    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.u_l, self.theta_1l, self.theta_2l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalForces {
    /// Axial force, tension positive.
    pub n_axial: f64,
    pub m1: f64,
    pub m2: f64,
}

impl LocalForces {
    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.n_axial, self.m1, self.m2)
    }
}

/// Current length and direction cosines of the chord.
pub fn current_geometry(
    element: &Element,
    p: &ElementDisplacement,
) -> Result<ElementGeometry, DegenerateElement> {
    let dx = element.chord0[0] + p[3] - p[0];
    let dy = element.chord0[1] + p[4] - p[1];
    let length = dx.hypot(dy);
    if !(length > 1e-14 * element.l0) {
        return Err(DegenerateElement);
    }
    Ok(ElementGeometry {
        length,
        cos_beta: dx / length,
        sin_beta: dy / length,
    })
}

/// Local stretch and end rotations measured from the current chord.
///
/// The chord rotation `β − β0` is taken as `atan2` of the cross and dot
/// products of the current and reference chord directions, so it stays
/// continuous through ±π; the nodal rotations relative to the chord are then
/// wrapped into (−π, π].
pub fn local_displacements(
    element: &Element,
    p: &ElementDisplacement,
    geometry: &ElementGeometry,
) -> LocalDisplacements {
    let (c0, s0) = (
        element.chord0[0] / element.l0,
        element.chord0[1] / element.l0,
    );
    let (c, s) = (geometry.cos_beta, geometry.sin_beta);
    let chord_rotation = (c0 * s - s0 * c).atan2(c0 * c + s0 * s);
    LocalDisplacements {
        u_l: geometry.length - element.l0,
        theta_1l: wrap_angle(p[2] - chord_rotation),
        theta_2l: wrap_angle(p[5] - chord_rotation),
    }
}

/// Local end forces: `N = EA·u_l/L0` and the slope-deflection moments
/// `[M1, M2] = (2EI/L0)·[[2, 1], [1, 2]]·[θ1l, θ2l]`. Pin-ended elements
/// carry no moments.
pub fn local_forces(props: &ElementProps, l0: f64, local: &LocalDisplacements) -> LocalForces {
    let n_axial = props.e_modulus * props.area * local.u_l / l0;
    match props.kind {
        ElementKind::PinEnded => LocalForces {
            n_axial,
            m1: 0.0,
            m2: 0.0,
        },
        ElementKind::Beam => {
            let k = 2.0 * props.e_modulus * props.inertia / l0;
            LocalForces {
                n_axial,
                m1: k * (2.0 * local.theta_1l + local.theta_2l),
                m2: k * (local.theta_1l + 2.0 * local.theta_2l),
            }
        }
    }
}

/// Local constitutive matrix `C_l` mapping `(u_l, θ1l, θ2l)` to `(N, M1, M2)`.
pub fn local_stiffness(props: &ElementProps, l0: f64) -> Matrix3<f64> {
    let ea = props.e_modulus * props.area / l0;
    let mut c = Matrix3::zeros();
    c[(0, 0)] = ea;
    if props.kind == ElementKind::Beam {
        let ei = props.e_modulus * props.inertia / l0;
        c.fixed_view_mut::<2, 2>(1, 1)
            .copy_from(&(Matrix2::new(4.0, 2.0, 2.0, 4.0) * ei));
    }
    c
}

/// `B` with rows `rᵀ`, `T₁ − zᵀ/L`, `T₂ − zᵀ/L`, where `T₁`, `T₂` pick the
/// nodal rotations.
pub fn transformation_matrix(geometry: &ElementGeometry) -> TransformationMatrix {
    let (c, s, l) = (geometry.cos_beta, geometry.sin_beta, geometry.length);
    TransformationMatrix::from_row_slice(&[
        -c,
        -s,
        0.0,
        c,
        s,
        0.0, //
        -s / l,
        c / l,
        1.0,
        s / l,
        -c / l,
        0.0, //
        -s / l,
        c / l,
        0.0,
        s / l,
        -c / l,
        1.0,
    ])
}

/// Element internal forces in global components, `Bᵀ·q_l`.
pub fn global_internal_force(b: &TransformationMatrix, forces: &LocalForces) -> Vector6<f64> {
    b.transpose() * forces.as_vector()
}

/// Consistent tangent stiffness
/// `k = BᵀC_lB + (N/L)·z·zᵀ + ((M1 + M2)/L²)·(r·zᵀ + z·rᵀ)`.
pub fn element_tangent_stiffness(
    props: &ElementProps,
    l0: f64,
    geometry: &ElementGeometry,
    forces: &LocalForces,
) -> Matrix6<f64> {
    let b = transformation_matrix(geometry);
    let c = local_stiffness(props, l0);
    let l = geometry.length;
    let r = geometry.r();
    let z = geometry.z();
    let material = b.transpose() * c * b;
    let axial = z * z.transpose() * (forces.n_axial / l);
    let bending = (r * z.transpose() + z * r.transpose()) * ((forces.m1 + forces.m2) / (l * l));
    material + axial + bending
}

/// Runs the full element chain for a displacement: geometry, local
/// deformation, local forces and global internal force.
pub fn element_response(
    element: &Element,
    p: &ElementDisplacement,
) -> Result<(ElementGeometry, LocalForces, Vector6<f64>), DegenerateElement> {
    let geometry = current_geometry(element, p)?;
    let local = local_displacements(element, p, &geometry);
    let forces = local_forces(&element.props, element.l0, &local);
    let q = global_internal_force(&transformation_matrix(&geometry), &forces);
    Ok((geometry, forces, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn element(x1: f64, y1: f64, x2: f64, y2: f64, kind: ElementKind) -> Element {
        let (dx, dy) = (x2 - x1, y2 - y1);
        Element {
            node_i: 0,
            node_j: 1,
            props: ElementProps::rectangular(2e7, 20e-3, 1e-3, kind),
            l0: dx.hypot(dy),
            beta0: dy.atan2(dx),
            chord0: [dx, dy],
        }
    }

    fn unit_beam() -> Element {
        element(0.0, 0.0, 1.0, 0.0, ElementKind::Beam)
    }

    fn disp(v: [f64; 6]) -> ElementDisplacement {
        ElementDisplacement::from_row_slice(&v)
    }

    #[test]
    fn geometry_examples() {
        let e = unit_beam();
        let g = current_geometry(&e, &disp([0.0; 6])).unwrap();
        assert_eq!((g.length, g.cos_beta, g.sin_beta), (1.0, 1.0, 0.0));

        let g = current_geometry(&e, &disp([0.0, 0.0, 0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!((g.length, g.cos_beta, g.sin_beta), (2.0, 1.0, 0.0));

        let g = current_geometry(&e, &disp([0.0, 0.0, 0.0, -1.0, 1.0, 0.0])).unwrap();
        assert_relative_eq!(g.length, 1.0);
        assert_relative_eq!(g.beta(), FRAC_PI_2);

        assert_eq!(
            current_geometry(&e, &disp([0.0, 0.0, 0.0, -1.0, 0.0, 0.0])),
            Err(DegenerateElement)
        );
    }

    #[test]
    fn local_displacement_examples() {
        let e = unit_beam();
        let p = disp([0.0; 6]);
        let g = current_geometry(&e, &p).unwrap();
        assert_eq!(
            local_displacements(&e, &p, &g),
            LocalDisplacements::default()
        );

        let p = disp([0.0, 0.0, FRAC_PI_2, -1.0, 1.0, FRAC_PI_2]);
        let g = current_geometry(&e, &p).unwrap();
        let l = local_displacements(&e, &p, &g);
        assert!(l.u_l.abs() < 1e-15 && l.theta_1l.abs() < 1e-15 && l.theta_2l.abs() < 1e-15);

        let p = disp([0.0, 0.0, 0.0, 0.001, 0.0, 0.0]);
        let g = current_geometry(&e, &p).unwrap();
        let l = local_displacements(&e, &p, &g);
        assert_relative_eq!(l.u_l, 0.001, max_relative = 1e-12);
        assert_eq!((l.theta_1l, l.theta_2l), (0.0, 0.0));
    }

    #[test]
    fn rotation_past_pi_stays_continuous() {
        // Chord turned by 170° plus a further 20° of nodal rotation.
        let e = unit_beam();
        let a = 170f64.to_radians();
        let p = disp([0.0, 0.0, a + 0.2, a.cos() - 1.0, a.sin(), a + 0.2]);
        let g = current_geometry(&e, &p).unwrap();
        let l = local_displacements(&e, &p, &g);
        assert_relative_eq!(l.theta_1l, 0.2, epsilon = 1e-12);
        assert_relative_eq!(l.theta_2l, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn local_force_examples() {
        let props = ElementProps::rectangular(2e7, 20e-3, 1e-3, ElementKind::Beam);
        assert_relative_eq!(props.area, 2e-5, max_relative = 1e-12);
        let f = local_forces(
            &props,
            0.1,
            &LocalDisplacements {
                u_l: 1e-3,
                ..Default::default()
            },
        );
        assert_relative_eq!(f.n_axial, 4.0, max_relative = 1e-12);

        let phi = 0.01;
        let f = local_forces(
            &props,
            0.1,
            &LocalDisplacements {
                u_l: 0.0,
                theta_1l: phi,
                theta_2l: phi,
            },
        );
        let expected = 6.0 * props.e_modulus * props.inertia * phi / 0.1;
        assert_relative_eq!(f.m1, expected, max_relative = 1e-12);
        assert_relative_eq!(f.m2, expected, max_relative = 1e-12);

        let pin = ElementProps {
            kind: ElementKind::PinEnded,
            ..props
        };
        let local = LocalDisplacements {
            u_l: 1e-3,
            theta_1l: 0.2,
            theta_2l: 0.0,
        };
        let f = local_forces(&pin, 0.1, &local);
        assert_eq!((f.m1, f.m2), (0.0, 0.0));
        assert_relative_eq!(f.n_axial, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn transformation_matrix_examples() {
        let g = ElementGeometry {
            length: 1.0,
            cos_beta: 1.0,
            sin_beta: 0.0,
        };
        let b = transformation_matrix(&g);
        let expected = TransformationMatrix::from_row_slice(&[
            -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, //
            0.0, 1.0, 1.0, 0.0, -1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, -1.0, 1.0,
        ]);
        assert_eq!(b, expected);

        let g = ElementGeometry {
            length: 0.3,
            cos_beta: 0.6,
            sin_beta: 0.8,
        };
        let b = transformation_matrix(&g);
        let translation = disp([0.4, -0.7, 0.0, 0.4, -0.7, 0.0]);
        assert!((b * translation).norm() < 1e-15);
    }

    #[test]
    fn infinitesimal_rigid_rotation_about_midpoint() {
        // Finite-difference check: rotate both ends about the midpoint by a
        // tiny angle and set nodal rotations to the same angle.
        let e = element(0.1, 0.2, 0.4, 0.6, ElementKind::Beam);
        let g = current_geometry(&e, &disp([0.0; 6])).unwrap();
        let b = transformation_matrix(&g);
        let t: f64 = 1e-7;
        let half = [0.5 * e.l0 * e.beta0.cos(), 0.5 * e.l0 * e.beta0.sin()];
        let rot = |x: f64, y: f64| (x * t.cos() - y * t.sin() - x, x * t.sin() + y * t.cos() - y);
        let (du1, dw1) = rot(-half[0], -half[1]);
        let (du2, dw2) = rot(half[0], half[1]);
        let dp = disp([du1, dw1, t, du2, dw2, t]);
        let dl = b * dp;
        assert!(dl.norm() < 1e-12 * dp.norm().max(1.0) + 1e-13, "{dl}");
    }

    #[test]
    fn internal_force_examples() {
        let g = ElementGeometry {
            length: 1.0,
            cos_beta: 1.0,
            sin_beta: 0.0,
        };
        let b = transformation_matrix(&g);
        assert_eq!(
            global_internal_force(&b, &LocalForces::default()),
            Vector6::zeros()
        );
        let q = global_internal_force(
            &b,
            &LocalForces {
                n_axial: 3.0,
                m1: 0.0,
                m2: 0.0,
            },
        );
        assert_eq!(q, disp([-3.0, 0.0, 0.0, 3.0, 0.0, 0.0]));
    }

    #[test]
    fn tangent_at_rest_is_linear_frame_matrix() {
        let e = element(0.0, 0.0, 0.5, 0.0, ElementKind::Beam);
        let g = current_geometry(&e, &disp([0.0; 6])).unwrap();
        let k = element_tangent_stiffness(&e.props, e.l0, &g, &LocalForces::default());
        let (ea, ei, l) = (
            e.props.e_modulus * e.props.area,
            e.props.e_modulus * e.props.inertia,
            e.l0,
        );
        let a = ea / l;
        let b12 = 12.0 * ei / l.powi(3);
        let b6 = 6.0 * ei / l.powi(2);
        let b4 = 4.0 * ei / l;
        let b2 = 2.0 * ei / l;
        #[rustfmt::skip]
        let textbook = Matrix6::from_row_slice(&[
             a,   0.0,  0.0, -a,   0.0,  0.0,
            0.0,  b12,  b6,  0.0, -b12,  b6,
            0.0,  b6,   b4,  0.0, -b6,   b2,
            -a,   0.0,  0.0,  a,   0.0,  0.0,
            0.0, -b12, -b6,  0.0,  b12, -b6,
            0.0,  b6,   b2,  0.0, -b6,   b4,
        ]);
        assert_relative_eq!(k, textbook, max_relative = 1e-12, epsilon = 1e-18);
        assert_relative_eq!(k[(0, 0)], ea / l, max_relative = 1e-14);
    }

    #[test]
    fn pin_ended_tangent_has_no_bending_block() {
        let e = element(0.0, 0.0, 0.5, 0.0, ElementKind::PinEnded);
        let g = current_geometry(&e, &disp([0.0; 6])).unwrap();
        let k = element_tangent_stiffness(&e.props, e.l0, &g, &LocalForces::default());
        for i in 0..6 {
            assert_eq!(k[(2, i)], 0.0);
            assert_eq!(k[(5, i)], 0.0);
            assert_eq!(k[(1, i)], 0.0);
        }
    }
}
