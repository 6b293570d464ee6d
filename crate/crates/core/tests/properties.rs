//! Property tests of the code, decay, detection and correction invariants.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use motional_qec::config::Preset;
use motional_qec::dynamics::{
    check_positive, evolve_effective, evolve_lindblad, LindbladModel, StepControl,
};
use motional_qec::encoding::{
    bogolyubov, branch_probabilities, build_code, check_reversibility, decode, encode, encode_on,
    CodeSubspaces, LogicalQubit, ModeRotation,
};
use motional_qec::hilbert::{annihilation, Axis, CsrMatrix, SpaceSpec};
use motional_qec::protocol::Protocol;
use motional_qec::syndrome::{entangler, Detector};

fn code(levels: usize, phi1: f64, phi2: f64) -> CodeSubspaces {
    build_code(&SpaceSpec::two_mode(5, levels).unwrap(), phi1, phi2).unwrap()
}

fn ideal_protocol() -> &'static Protocol {
    static P: OnceLock<Protocol> = OnceLock::new();
    P.get_or_init(|| Protocol::new(&Preset::builtin("be9").unwrap()).unwrap())
}

fn qubit() -> impl Strategy<Value = LogicalQubit> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("nonzero amplitudes", |a| {
            a.iter().map(|x| x * x).sum::<f64>() > 1e-2
        })
        .prop_map(|a| LogicalQubit::new(C64::new(a[0], a[1]), C64::new(a[2], a[3])).unwrap())
}

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn code_is_orthonormal_for_any_phases(phi1 in -PI..PI, phi2 in -PI..PI) {
        prop_assert!(code(1, phi1, phi2).orthonormality_error().unwrap() < 1e-12);
    }

    #[test]
    fn jump_algebra_holds_for_any_phases(phi1 in -PI..PI, phi2 in -PI..PI, ax in axis()) {
        let c = code(1, phi1, phi2);
        let a = annihilation(c.space(), ax).unwrap();
        for k in 0..2 {
            let img = a.apply(&c.h0[k]).unwrap();
            let overlap = c.jump_basis(ax)[k].inner(&img).unwrap();
            prop_assert!((overlap - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
            prop_assert!((img.norm_sqr() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn encode_then_decode_is_identity(q in qubit(), phi1 in -PI..PI, phi2 in -PI..PI) {
        let c = code(1, phi1, phi2);
        let q = q.with_phases(phi1, phi2);
        let d = decode(&encode(&q, &c).unwrap(), &c).unwrap();
        prop_assert!(d.residual.abs() < 1e-12);
        prop_assert!((d.c_plus - q.c_plus).norm() < 1e-12);
        prop_assert!((d.c_minus - q.c_minus).norm() < 1e-12);
    }

    #[test]
    fn rotated_decay_pairs_are_reversible(theta in 0.0..PI, phi in -PI..PI) {
        let c = code(1, 0.0, 0.0);
        for op in bogolyubov(c.space(), ModeRotation { theta, phi }, 1.0).unwrap() {
            prop_assert!(check_reversibility(&op, &c.h0).unwrap().max_deviation < 1e-10);
        }
    }

    #[test]
    fn no_jump_evolution_is_a_uniform_decay(q in qubit(), gt in 1e-3f64..0.3) {
        let c = code(1, 0.0, 0.0);
        let psi = encode(&q, &c).unwrap();
        let model = LindbladModel::motional_damping(c.space(), 1.0, 0.0).unwrap();
        let out = evolve_effective(&model, &psi, 0.0, gt, StepControl::default()).unwrap();
        prop_assert!((out.norm_sqr() - (-4.0 * gt).exp()).abs() < 1e-9);
        prop_assert!(1.0 - out.normalized().unwrap().fidelity(&psi).unwrap() < 1e-9);
    }

    #[test]
    fn branch_probabilities_are_subnormalized(gt in 0.0f64..2.0) {
        let (p0, px) = branch_probabilities(gt);
        prop_assert!(p0 >= 0.0 && px >= 0.0);
        prop_assert!(p0 + 2.0 * px <= 1.0 + 1e-15);
        prop_assert!((p0 + 2.0 * px - 4.0 * (-3.0 * gt).exp() + 3.0 * (-4.0 * gt).exp()).abs() < 1e-12);
    }

    #[test]
    fn entanglers_are_unitary(theta in -PI..PI, ax in axis()) {
        let s = SpaceSpec::two_mode(4, 2).unwrap();
        let u = entangler(&s, ax, theta).unwrap();
        let c = code(2, 0.0, 0.0);
        let u5 = entangler(c.space(), ax, theta).unwrap();
        for basis in [&c.h0, &c.h1x, &c.h1y] {
            for b in basis {
                prop_assert!((u5.apply(b).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
        let gram = u.dagger().compose(&u).unwrap();
        prop_assert!(gram.matrix().max_abs_diff(&CsrMatrix::identity(s.dim())) < 1e-12);
    }

    #[test]
    fn detection_reveals_nothing_about_the_qubit(q in qubit(), r in qubit()) {
        let c = code(2, 0.0, 0.0);
        let det = Detector::ideal();
        for basis in [&c.h0, &c.h1x, &c.h1y] {
            let probs = |q: &LogicalQubit| {
                let mut p = [0.0; 4];
                for (w, out) in det.detect_branches(&encode_on(q, basis).unwrap(), &c).unwrap() {
                    p[usize::from(out.x_jump) + 2 * usize::from(out.y_jump)] += w;
                }
                p
            };
            let (a, b) = (probs(&q), probs(&r));
            for k in 0..4 {
                prop_assert!((a[k] - b[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_jumps_are_corrected(q in qubit(), ax in axis(), frac in 0.0f64..1.0) {
        let pr = ideal_protocol();
        let q = q.with_phases(pr.code.phi1, pr.code.phi2);
        let f = pr.forced_jump(&q, ax, frac * pr.config.tau).unwrap();
        prop_assert!(f.min_fidelity > 1.0 - 1e-9);
        prop_assert!(f.flagged_probability > 1.0 - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn master_equation_keeps_a_density_matrix(q in qubit(), gamma in 0.1f64..3.0, n_bar in 0.0f64..1.0) {
        let c = code(1, 0.0, 0.0);
        let rho0 = encode(&q, &c).unwrap().density();
        let model = LindbladModel::motional_damping(c.space(), gamma, n_bar).unwrap();
        let rho = evolve_lindblad(&model, &rho0, 0.0, 0.2, StepControl::default()).unwrap();
        prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-8);
        prop_assert!((&rho - rho.adjoint()).iter().all(|z| z.norm() < 1e-12));
        prop_assert!(check_positive(&rho).is_ok());
    }
}
