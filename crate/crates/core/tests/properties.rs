use proptest::prelude::*;
use qastate::linalg::{self, c, ComplexVector};
use qastate::qubit::{self, SpecialUnitary2};
use qastate::spin::{self, Direction, HalfInt, SpinSystem};
use qastate::state_format;

fn direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("away from the origin", |(x, y, z)| x * x + y * y + z * z > 1e-4)
        .prop_map(|(x, y, z)| {
            let n = (x * x + y * y + z * z).sqrt();
            Direction::normalize_near_unit(x / n, y / n, z / n, 1e-9).unwrap()
        })
}

fn near_pole() -> impl Strategy<Value = Direction> {
    (-1e-7f64..1e-7, -1e-7f64..1e-7, prop::bool::ANY).prop_map(|(x, y, up)| {
        let z = (1.0 - x * x - y * y).sqrt();
        Direction::normalize_near_unit(x, y, if up { z } else { -z }, 1e-9).unwrap()
    })
}

fn spin_and_answer() -> impl Strategy<Value = (SpinSystem, HalfInt)> {
    (1i32..=8).prop_flat_map(|t| (Just(t), 0..=t)).prop_map(|(t, k)| {
        (SpinSystem::new(HalfInt::from_twice(t)).unwrap(), HalfInt::from_twice(-t + 2 * k))
    })
}

fn check_eigenstate(sys: &SpinSystem, a: &Direction, h: HalfInt) -> Result<(), TestCaseError> {
    let s = spin::eigenstate_recursion(sys, a, h).unwrap();
    let ja = spin::component_operator(sys, a);
    let res = ja.mul_vec(&s.ket).unwrap().sub(&s.ket.scale(c(h.value(), 0.0))).unwrap().norm();
    prop_assert!(res <= 1e-9, "residual {res}");
    prop_assert!((s.ket.norm() - 1.0).abs() <= 1e-12);
    Ok(())
}

proptest! {
    #[test]
    fn recursion_gives_unit_eigenvectors((sys, h) in spin_and_answer(), a in direction()) {
        check_eigenstate(&sys, &a, h)?;
    }

    #[test]
    fn recursion_is_stable_at_the_poles((sys, h) in spin_and_answer(), a in near_pole()) {
        check_eigenstate(&sys, &a, h)?;
    }

    #[test]
    fn antipodal_answer_gives_the_same_ray((sys, h) in spin_and_answer(), a in direction()) {
        let s = spin::eigenstate_recursion(&sys, &a, h).unwrap();
        let t = spin::eigenstate_recursion(&sys, &a.neg(), h.neg()).unwrap();
        prop_assert!(linalg::phase_equal(&s.ket, &t.ket, 1e-9).unwrap());
    }

    #[test]
    fn state_text_round_trips((sys, h) in spin_and_answer(), a in direction()) {
        let s = spin::eigenstate_recursion(&sys, &a, h).unwrap();
        let text = state_format::emit_state("json", &s).unwrap();
        prop_assert_eq!(state_format::parse_state("json", &text).unwrap(), s);
    }

    #[test]
    fn bloch_direction_recovers_the_question(a in direction()) {
        let half = SpinSystem::new(HalfInt::from_twice(1)).unwrap();
        let s = spin::eigenstate_recursion(&half, &a, HalfInt::from_twice(1)).unwrap();
        let back = qubit::bloch_direction(&s.ket).unwrap();
        prop_assert!(back.angle_to(&a) <= 1e-7);
    }

    #[test]
    fn covering_map_gives_rotations(q in prop::array::uniform4(-1.0f64..1.0)) {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let m = SpecialUnitary2::from_quaternion(q.map(|x| x / n)).unwrap();
        let r = qubit::su2_to_so3(&m).unwrap();
        prop_assert!((r.det() - 1.0).abs() <= 1e-12);
        prop_assert!(r.mul(&r.transpose()).max_deviation(&qubit::Rotation3::identity()) <= 1e-12);
        prop_assert!(r.max_deviation(&qubit::su2_to_so3(&m.neg()).unwrap()) <= 1e-12);
    }

    #[test]
    fn bloch_map_ignores_global_phase(re0 in -1.0f64..1.0, im0 in -1.0f64..1.0, re1 in -1.0f64..1.0, im1 in -1.0f64..1.0, phase in 0.0f64..6.3) {
        let v = ComplexVector::new(vec![c(re0, im0), c(re1, im1)]).unwrap();
        prop_assume!(v.norm() > 1e-3);
        let v = v.normalized().unwrap();
        let w = v.scale(c(phase.cos(), phase.sin()));
        let (a, b) = (qubit::bloch_direction(&v).unwrap(), qubit::bloch_direction(&w).unwrap());
        prop_assert!(a.angle_to(&b) <= 1e-7);
    }
}
