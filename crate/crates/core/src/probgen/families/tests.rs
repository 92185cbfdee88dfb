use super::*;
use crate::linalg::{norm_inf, sgn};
use crate::probgen::write_problem_bytes;
use crate::subgrad::v_norm_inf;

fn kkt(inst: &GeneratedInstance) -> (f64, f64) {
    let x = inst.x_star.as_ref().unwrap();
    let p = &inst.problem;
    let g = p.eval_gradient(x).unwrap();
    let v = v_norm_inf(x, &g, p.tau);
    let margin = x
        .iter()
        .zip(&g)
        .filter(|(xi, _)| **xi == 0.0)
        .map(|(_, gi)| p.tau - gi.abs())
        .fold(f64::INFINITY, f64::min);
    (v, margin)
}

#[test]
fn generators_are_deterministic() {
    let a = write_problem_bytes(&gen_elastic_net(5, 8, 2.0, 0.1, 0.3, 42).unwrap().problem);
    let b = write_problem_bytes(&gen_elastic_net(5, 8, 2.0, 0.1, 0.3, 42).unwrap().problem);
    assert_eq!(a, b);
    let c = write_problem_bytes(&gen_elastic_net(5, 8, 2.0, 0.1, 0.3, 43).unwrap().problem);
    assert_ne!(a, c);
    let s1 = gen_sigrec(4, 16, 3, 0.1, 0.0, 0.01, 5).unwrap();
    let s2 = gen_sigrec(4, 16, 3, 0.1, 0.0, 0.01, 5).unwrap();
    assert_eq!(write_problem_bytes(&s1.problem), write_problem_bytes(&s2.problem));
}

#[test]
fn elastic_net_draw_order() {
    let inst = gen_elastic_net(2, 3, 10.0, 0.5, 1.0, 9).unwrap();
    let mut rng = Rng::new(9);
    let b: Vec<f64> = (0..6).map(|_| rng.normal()).collect();
    let y: Vec<f64> = (0..2).map(|_| 10.0 * rng.normal()).collect();
    let Operator::Factored { m, n, b: bb, gamma } = inst.problem.op.operator() else {
        panic!("expected factored operator");
    };
    assert_eq!((*m, *n, *gamma), (2, 3, 0.5));
    assert_eq!(bb, &b);
    for j in 0..3 {
        let want = b[j] * y[0] + b[3 + j] * y[1];
        assert!((inst.problem.b[j] - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
}

#[test]
fn overflow_dims_rejected() {
    assert!(matches!(gen_elastic_net(usize::MAX, 2, 1.0, 0.0, 0.0, 0), Err(Error::Argument(_))));
    assert!(matches!(gen_sigrec(1 << 40, 1 << 40, 0, 0.0, 0.0, 0.0, 0), Err(Error::Argument(_))));
    assert!(gen_elastic_net(0, 2, 1.0, 0.0, 0.0, 0).is_err());
    assert!(gen_elastic_net(2, 2, 1.0, -1.0, 0.0, 0).is_err());
    assert!(gen_sigrec(5, 4, 0, 0.0, 0.0, 0.0, 0).is_err());
    assert!(gen_sigrec(2, 4, 5, 0.0, 0.0, 0.0, 0).is_err());
    assert!(gen_strict_comp(4, 5, 10.0, 1.0, 0.5, 0).is_err());
    assert!(gen_strict_comp(4, 2, 10.0, 0.0, 0.5, 0).is_err());
    assert!(gen_strict_comp(4, 2, 10.0, 1.0, 1.0, 0).is_err());
}

#[test]
fn sigrec_zero_signal_is_noise_only() {
    let noise = gen_sigrec(8, 16, 0, 0.5, 0.0, 0.0, 3).unwrap();
    let b_inf = norm_inf(&noise.problem.b);
    assert!(b_inf > 0.0);
    let quiet = gen_sigrec(8, 16, 0, 0.0, 0.0, 0.0, 3).unwrap();
    assert!(quiet.problem.b.iter().all(|v| *v == 0.0));
    // τ ≥ ‖b‖∞ makes zero optimal
    let p = gen_sigrec(8, 16, 0, 0.5, 0.0, b_inf, 3).unwrap().problem;
    let x = vec![0.0; 16];
    let g = p.eval_gradient(&x).unwrap();
    assert_eq!(v_norm_inf(&x, &g, p.tau), 0.0);
}

#[test]
fn strict_comp_invariants() {
    for seed in 0..20 {
        let inst = gen_strict_comp(30, 1 + (seed as usize % 30), 1e4, 0.3, 0.2, seed).unwrap();
        let (v, margin) = kkt(&inst);
        assert!(v <= 1e-12, "seed {seed}: v = {v:e}");
        assert!(margin >= 0.1 * 0.3 || margin == f64::INFINITY, "seed {seed}: margin {margin}");
        let x = inst.x_star.as_ref().unwrap();
        assert_eq!(crate::linalg::nnz(x), 1 + (seed as usize % 30));
        assert!(x.iter().filter(|v| **v != 0.0).all(|v| (0.5..=1.5).contains(&v.abs())));
    }
}

#[test]
fn strict_comp_spectrum() {
    let inst = gen_strict_comp(12, 3, 1e3, 0.5, 0.5, 8).unwrap();
    let a = inst.problem.op.operator().to_dense();
    // symmetric, trace between n/cond and n
    let tr: f64 = (0..12).map(|i| a[i * 12 + i]).sum();
    assert!((12.0 / 1e3..=12.0 + 1e-10).contains(&tr));
    for i in 0..12 {
        for j in 0..12 {
            assert_eq!(a[i * 12 + j], a[j * 12 + i]);
        }
    }
}

#[test]
fn strict_comp_edge_supports() {
    let zero = gen_strict_comp(10, 0, 10.0, 2.0, 0.25, 1).unwrap();
    assert!(zero.x_star.as_ref().unwrap().iter().all(|v| *v == 0.0));
    assert!(norm_inf(&zero.problem.b) <= 0.75 * 2.0);
    let full = gen_strict_comp(10, 10, 10.0, 0.1, 0.25, 1).unwrap();
    let x = full.x_star.as_ref().unwrap();
    assert!(x.iter().all(|v| *v != 0.0));
    let (v, _) = kkt(&full);
    assert!(v <= 1e-12);
    let g = full.problem.eval_gradient(x).unwrap();
    for (xi, gi) in x.iter().zip(&g) {
        assert!((gi + 0.1 * sgn(*xi)).abs() <= 1e-12);
    }
}
