use carbundle::bundle::{
    act_on_configuration, act_on_pose, fundamental_field, pose_to_group, project, section,
    CarParams, ConfigTangent, Configuration, Pose, Shape, ShapeTangent,
};
use carbundle::connection::{
    connection_form, connection_via_gauge_transform, curvature, curvature_via_structure_equation,
    gauge_potential, horizontal_alpha, horizontal_beta, horizontal_lift,
};
use carbundle::group_e2::{AlgebraElement, GroupElement};
use carbundle::heading_field::{equivariance_defect, psi, rho};
use carbundle::maneuvers::{bracket_ha_hb, CycleKind};
use carbundle::transport::{integrate_endpoint, DriverProgram, Segment};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    -7.0..7.0f64
}

fn coord() -> impl Strategy<Value = f64> {
    -5.0..5.0f64
}

fn group() -> impl Strategy<Value = GroupElement> {
    (angle(), coord(), coord()).prop_map(|(t, b1, b2)| GroupElement::new(t, [b1, b2]))
}

fn algebra() -> impl Strategy<Value = AlgebraElement> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| AlgebraElement::new(a, b, c))
}

fn config() -> impl Strategy<Value = Configuration> {
    (angle(), -3.0..3.0f64, coord(), coord(), angle())
        .prop_map(|(a, b, x, y, p)| Configuration::new(a, b, x, y, p))
}

fn tangent() -> impl Strategy<Value = ConfigTangent> {
    (
        -2.0..2.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
    )
        .prop_map(|(a, b, x, y, p)| ConfigTangent::new(a, b, x, y, p))
}

fn params() -> impl Strategy<Value = CarParams> {
    (0.2..3.0f64, 0.3..4.0f64).prop_map(|(r, l)| CarParams::new(r, l).unwrap())
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    (coord(), coord()).prop_map(|(a, b)| [a, b])
}

fn algebra_close(a: AlgebraElement, b: AlgebraElement, tol: f64) -> bool {
    (a - b).max_abs() <= tol * (1.0 + b.max_abs())
}

proptest! {
    #[test]
    fn right_action_law(g1 in group(), g2 in group(), p in point()) {
        let lhs = g1.compose(&g2).act_on_point(p);
        let rhs = g2.act_on_point(g1.act_on_point(p));
        prop_assert!((lhs[0] - rhs[0]).abs() < 1e-10 && (lhs[1] - rhs[1]).abs() < 1e-10);
    }

    #[test]
    fn action_is_isometric(g in group(), p in point(), q in point()) {
        let before = (p[0] - q[0]).hypot(p[1] - q[1]);
        let gp = g.act_on_point(p);
        let gq = g.act_on_point(q);
        let after = (gp[0] - gq[0]).hypot(gp[1] - gq[1]);
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn inverse_cancels(g in group()) {
        prop_assert!(g.compose(&g.inverse()).approx_eq(&GroupElement::identity(), 1e-12));
    }

    #[test]
    fn bracket_antisymmetry_and_jacobi(a in algebra(), b in algebra(), c in algebra()) {
        prop_assert!(algebra_close(a.bracket(&b), -b.bracket(&a), 1e-15));
        let jacobi = a.bracket(&b.bracket(&c)) + b.bracket(&c.bracket(&a)) + c.bracket(&a.bracket(&b));
        prop_assert!(jacobi.max_abs() < 1e-12);
    }

    #[test]
    fn bracket_routes_agree_exactly(a in algebra(), b in algebra()) {
        prop_assert_eq!(a.bracket(&b), a.bracket_by_structure_constants(&b));
    }

    #[test]
    fn exp_is_one_parameter_subgroup(c in algebra(), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let lhs = c.exp(s + t);
        let rhs = c.exp(s).compose(&c.exp(t));
        prop_assert!(lhs.approx_eq(&rhs, 1e-10));
    }

    #[test]
    fn configuration_action_law(g1 in group(), g2 in group(), p in config()) {
        let lhs = act_on_configuration(&g1.compose(&g2), &p);
        let rhs = act_on_configuration(&g2, &act_on_configuration(&g1, &p));
        prop_assert!(lhs.distance_max(&rhs) < 1e-10);
    }

    #[test]
    fn action_is_vertical(g in group(), p in config()) {
        prop_assert_eq!(project(&act_on_configuration(&g, &p)), project(&p));
    }

    #[test]
    fn section_then_project_is_identity(a in angle(), b in angle()) {
        let m = Shape::new(a, b);
        prop_assert_eq!(project(&section(m)), m);
    }

    #[test]
    fn pose_to_group_round_trip(x in coord(), y in coord(), phi in angle()) {
        let e = Pose::new(x, y, phi);
        prop_assert!(act_on_pose(&pose_to_group(&e), &Pose::default()).distance_max(&e) < 1e-12);
    }

    #[test]
    fn pose_action_is_free(x in coord(), y in coord(), phi in angle(), g in group()) {
        // The element fixing e is g_e⁻¹·id·g_e = identity; any other g moves e.
        let e = Pose::new(x, y, phi);
        let frame = pose_to_group(&e);
        let fixing = frame.inverse().compose(&frame);
        prop_assert!(fixing.approx_eq(&GroupElement::identity(), 1e-12));
        let moved = act_on_pose(&g, &e);
        if !g.approx_eq(&GroupElement::identity(), 1e-6) {
            prop_assert!(moved.distance_max(&e) > 1e-9);
        }
    }

    #[test]
    fn fundamental_field_is_linear(a in -3.0..3.0f64, c1 in algebra(), c2 in algebra(), p in config()) {
        let lhs = fundamental_field(&(a * c1 + c2), &p);
        let rhs = a * fundamental_field(&c1, &p) + fundamental_field(&c2, &p);
        prop_assert!((lhs - rhs).max_abs() < 1e-12);
    }

    #[test]
    fn fundamental_field_is_flow_derivative(c in algebra(), p in config()) {
        let h = 1e-5;
        let fwd = act_on_configuration(&c.exp(h), &p);
        let bwd = act_on_configuration(&c.exp(-h), &p);
        let fd = (0.5 / h) * fwd.displacement_from(&bwd);
        prop_assert!((fd - fundamental_field(&c, &p)).max_abs() < 1e-8);
    }

    #[test]
    fn lifts_are_horizontal(p in config(), da in -2.0..2.0f64, db in -2.0..2.0f64, k in params()) {
        let w = ShapeTangent::new(da, db);
        let lift = horizontal_lift(&p, &w, &k);
        prop_assert!(connection_form(&p, &lift, &k).max_abs() < 1e-12);
        prop_assert_eq!(lift.shape_part(), w);
    }

    #[test]
    fn connection_reproduces_generators(c in algebra(), p in config(), k in params()) {
        let w = connection_form(&p, &fundamental_field(&c, &p), &k);
        prop_assert!((w - c).max_abs() < 1e-12);
    }

    #[test]
    fn gauge_route_equals_formula(p in config(), v in tangent(), k in params()) {
        let a = connection_form(&p, &v, &k);
        let b = connection_via_gauge_transform(&p, &v, &k);
        prop_assert!((a - b).max_abs() < 1e-12);
    }

    #[test]
    fn connection_is_linear(p in config(), v in tangent(), w in tangent(), a in -2.0..2.0f64, k in params()) {
        let lhs = connection_form(&p, &(a * v + w), &k);
        let rhs = a * connection_form(&p, &v, &k) + connection_form(&p, &w, &k);
        prop_assert!((lhs - rhs).max_abs() < 1e-12);
    }

    #[test]
    fn potential_is_section_pullback(a in angle(), b in angle(), da in -2.0..2.0f64, db in -2.0..2.0f64, k in params()) {
        let m = Shape::new(a, b);
        let w = ShapeTangent::new(da, db);
        let lhs = gauge_potential(&m, &w, &k);
        let rhs = connection_form(&section(m), &w.through_section(), &k);
        prop_assert!((lhs - rhs).max_abs() < 1e-12);
    }

    #[test]
    fn curvature_is_antisymmetric(p in config(), v1 in tangent(), v2 in tangent(), k in params()) {
        let a = curvature(&p, &v1, &v2, &k);
        let b = curvature(&p, &v2, &v1, &k);
        prop_assert!((a + b).max_abs() < 1e-15);
    }

    #[test]
    fn structure_equation_on_arbitrary_pairs(p in config(), v1 in tangent(), v2 in tangent(), k in params()) {
        // Ω is tensorial: its value on any pair only sees the dα∧dβ part.
        let fd = curvature_via_structure_equation(&p, &v1, &v2, &k);
        let exact = curvature(&p, &v1, &v2, &k);
        prop_assert!((fd - exact).max_abs() < 1e-6, "fd {:?} exact {:?}", fd, exact);
    }

    #[test]
    fn bracket_is_minus_curvature_field(p in config(), k in params()) {
        let omega = curvature(&p, &horizontal_alpha(&p, &k), &horizontal_beta(), &k);
        let field = fundamental_field(&(-omega), &p);
        let bracket = bracket_ha_hb(&p, &k);
        prop_assert!((field - bracket).max_abs() < 1e-12);
        prop_assert_eq!(bracket.d_alpha, 0.0);
        prop_assert_eq!(bracket.d_beta, 0.0);
    }

    #[test]
    fn heading_equivariance(g in group(), p in config()) {
        prop_assert!(equivariance_defect(&g, &p) < 1e-12);
        prop_assert!((psi(&act_on_configuration(&g, &p)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_composition_law(g1 in group(), g2 in group()) {
        // Θ ↦ B(Θ) lands in an abelian group, so both orders hold.
        let product = *rho(&g1.compose(&g2)).matrix();
        prop_assert!((product - rho(&g1).matrix() * rho(&g2).matrix()).abs().max() < 1e-12);
        prop_assert!((product - rho(&g2).matrix() * rho(&g1).matrix()).abs().max() < 1e-12);
        let m = *rho(&g1).matrix();
        prop_assert!((m.transpose() * m - nalgebra::Matrix2::identity()).abs().max() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transport_commutes_with_the_action(
        g in group(),
        p in config(),
        d1 in -1.5..1.5f64,
        d2 in -1.0..1.0f64,
        d3 in -1.5..1.5f64,
        k in params(),
    ) {
        let program = DriverProgram::from_segments(vec![
            Segment::Drive(d1),
            Segment::Steer(d2),
            Segment::Rates { alpha_dot: d3, beta_dot: -0.5, duration: 1.0 },
        ]);
        let moved_start = integrate_endpoint(&program, &act_on_configuration(&g, &p), &k, 1e-3).unwrap();
        let moved_end = act_on_configuration(&g, &integrate_endpoint(&program, &p, &k, 1e-3).unwrap());
        prop_assert!(moved_start.distance_max(&moved_end) < 1e-8);
    }

    #[test]
    fn shape_advances_by_program_total(p in config(), d1 in -2.0..2.0f64, d2 in -2.0..2.0f64, a in -2.0..2.0f64, t in 0.0..1.5f64) {
        let k = CarParams::new(1.0, 2.0).unwrap();
        let program = DriverProgram::from_segments(vec![
            Segment::Drive(d1),
            Segment::Steer(d2),
            Segment::Rates { alpha_dot: a, beta_dot: 0.3, duration: t },
        ]);
        let total = program.total_shape_change();
        let end = integrate_endpoint(&program, &p, &k, 1e-2).unwrap();
        prop_assert!((end.shape.alpha - p.shape.alpha - total.d_alpha).abs() < 1e-12);
        prop_assert!((end.shape.beta - p.shape.beta - total.d_beta).abs() < 1e-12);
    }

    #[test]
    fn cycles_close_in_shape_space(p in config(), eps in 0.01..0.3f64) {
        let k = CarParams::new(1.0, 2.0).unwrap();
        for kind in [CycleKind::Simple, CycleKind::Sideways, CycleKind::Slip] {
            let end = kind.run(&p, eps, &k, 1e-2).unwrap();
            prop_assert!((end.shape.alpha - p.shape.alpha).abs() < 1e-12);
            prop_assert!((end.shape.beta - p.shape.beta).abs() < 1e-12);
        }
    }
}
