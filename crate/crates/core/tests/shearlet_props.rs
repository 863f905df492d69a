use proptest::prelude::*;
use shearwave::shearlet::{FreqSupport, ScaleShear};
use shearwave::{Orientation, ShearletSystem, Variant};

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Horizontal), Just(Orientation::Vertical)]
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Standard), Just(Variant::NarrowPositive)]
}

/// A point of the support drawn from (log-radius, slope offset) coordinates.
fn support_member(sup: &FreqSupport, u: f64, v: f64, sign: f64) -> [f64; 2] {
    let x1 = sign * (0.5 / sup.a) * 4f64.powf(u);
    let x2 = x1 * (sup.s + v * sup.half_width * sup.a.sqrt());
    match sup.orientation {
        Orientation::Horizontal => [x1, x2],
        Orientation::Vertical => [x2, x1],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn nonzero_window_lies_in_support(
        a in 1e-4f64..1.0,
        s in -2.5f64..2.5,
        u in -0.3f64..1.3,
        v in -1.5f64..1.5,
        neg in any::<bool>(),
        o in orientation(),
        var in variant(),
    ) {
        let sys = ShearletSystem::new(var);
        let sup = ScaleShear::new(a, s, o).unwrap().support(var);
        let xi = support_member(&sup, u, v, if neg { -1.0 } else { 1.0 });
        if sys.psi_hat_as(xi, a, s, o) != 0.0 {
            prop_assert!(sup.contains(xi));
        }
    }
}

proptest! {
    #[test]
    fn generator_is_even(x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, o in orientation(), var in variant()) {
        let sys = ShearletSystem::new(var);
        prop_assert_eq!(sys.psi_hat([x1, x2], o), sys.psi_hat([-x1, -x2], o));
    }

    #[test]
    fn support_members_stay_in_scale_band(
        a in 1e-4f64..1.0,
        s in -2.0f64..2.0,
        u in 0.0f64..1.0,
        v in -1.0f64..1.0,
        neg in any::<bool>(),
        o in orientation(),
    ) {
        let sup = ScaleShear::new(a, s, o).unwrap().support(Variant::Standard);
        let xi = support_member(&sup, u, v, if neg { -1.0 } else { 1.0 });
        prop_assume!(sup.contains(xi));
        let r = a * xi[0].hypot(xi[1]);
        let slope = (s.abs() - a.sqrt()).max(0.0);
        let lower = 0.5 * (1.0 + slope * slope).sqrt();
        prop_assert!(r >= lower * (1.0 - 1e-12), "a|xi| = {} below {}", r, lower);
        prop_assert!(r <= 2.0 * 10f64.sqrt() * (1.0 + 1e-12), "a|xi| = {} above 2 sqrt 10", r);
    }

    #[test]
    fn modulus_ignores_translation(
        a in 1e-3f64..1.0,
        s in -1.5f64..1.5,
        u in 0.0f64..1.0,
        v in -1.0f64..1.0,
        t1 in -5.0f64..5.0,
        t2 in -5.0f64..5.0,
    ) {
        let sys = ShearletSystem::default();
        let sup = ScaleShear::new(a, s, Orientation::Horizontal).unwrap().support(Variant::Standard);
        let xi = support_member(&sup, u, v, 1.0);
        let z = sys.psi_hat_ast(xi, a, s, [t1, t2], Orientation::Horizontal);
        let z0 = sys.psi_hat_ast(xi, a, s, [0.0, 0.0], Orientation::Horizontal);
        prop_assert!((z.norm() - z0.norm()).abs() <= 1e-12 * z0.norm().max(1e-300));
    }
}

#[test]
fn scale_band_lower_end_is_reached_at_zero_shear() {
    let a = 0.01;
    let sup = ScaleShear::new(a, 0.0, Orientation::Horizontal).unwrap().support(Variant::Standard);
    let xi = [0.5 / a, 0.0];
    assert!(sup.contains(xi));
    assert!((a * xi[0] - 0.5).abs() < 1e-15);
}
