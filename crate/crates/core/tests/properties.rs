mod common;

use fracdg::analysis::eoc;
use fracdg::cli::{coercivity_check, RunConfig};
use fracdg::kernel::{mass_matrix, memory_block, memory_form_matrix, FractionalOrder, KernelConfig};
use fracdg::stepper::{pi_projection, solve, stability_report, DgSolution, ModeProblem, StepperConfig};
use fracdg::timefn::{PowerSeries, TimeFunction};
use fracdg::TimeMesh;
use nalgebra::DVector;
use proptest::prelude::*;

fn mesh_strategy() -> impl Strategy<Value = TimeMesh> {
    prop::collection::vec((0.05f64..1.0, 0usize..=4), 1..7).prop_map(|parts| {
        let mut nodes = vec![0.0];
        let mut degrees = Vec::new();
        for (len, p) in parts {
            nodes.push(nodes.last().unwrap() + len);
            degrees.push(p);
        }
        TimeMesh::manual(nodes, degrees).unwrap()
    })
}

fn polynomial_strategy() -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec(-2.0f64..2.0, 1..5).prop_map(|cs| {
        let mut s = PowerSeries::default();
        for (e, c) in cs.into_iter().enumerate() {
            s.push(c, e as f64);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coercivity_and_continuity(mesh in mesh_strategy(), alpha in -0.95f64..-0.05, seed in 0u64..1000) {
        for t in coercivity_check(&mesh, alpha, seed, 4, &KernelConfig::default()).unwrap() {
            prop_assert!(t.coercivity_ratio >= 1.0 - 1e-10, "{t:?}");
            prop_assert!(t.continuity_ratio <= 1.0 + 1e-10, "{t:?}");
        }
    }

    #[test]
    fn local_block_symmetric_part_is_positive_definite(mesh in mesh_strategy(), alpha in -0.95f64..-0.05) {
        let order = FractionalOrder::new(alpha).unwrap();
        for n in 0..mesh.num_intervals() {
            let b = memory_block(&mesh, n, n, &order, &KernelConfig::default()).unwrap().matrix;
            let sym = (&b + b.transpose()) * 0.5;
            let min = sym.symmetric_eigenvalues().min();
            prop_assert!(min > 0.0, "interval {n}: smallest eigenvalue {min}");
        }
    }

    #[test]
    fn memory_form_matrix_is_assembled_from_blocks(mesh in mesh_strategy(), alpha in -0.95f64..-0.05) {
        let order = FractionalOrder::new(alpha).unwrap();
        let cfg = KernelConfig::default();
        let g = memory_form_matrix(&mesh, &order, &cfg).unwrap();
        let offsets: Vec<usize> = (0..mesh.num_intervals())
            .scan(0, |acc, i| { let o = *acc; *acc += mesh.degree(i) + 1; Some(o) })
            .collect();
        for n in 0..mesh.num_intervals() {
            for j in 0..mesh.num_intervals() {
                let block = g.view((offsets[n], offsets[j]), (mesh.degree(n) + 1, mesh.degree(j) + 1));
                if j > n {
                    // causality: later sources do not act on earlier targets
                    prop_assert!(block.iter().all(|v| *v == 0.0));
                } else {
                    let b = memory_block(&mesh, j, n, &order, &cfg).unwrap();
                    prop_assert!((block - &b.matrix).abs().max() <= 1e-14 * b.matrix.abs().max().max(1.0));
                }
            }
        }
    }

    #[test]
    fn pi_projection_interpolates_and_is_orthogonal(mesh in mesh_strategy(), poly in polynomial_strategy(), shift in 0.0f64..0.9) {
        // add a weakly singular term so the projection is not the identity
        let mut u = poly.clone();
        u.push(0.7, 0.3 + shift);
        let sol = pi_projection(&[TimeFunction::from(u.clone())], &mesh);
        let left = sol.left_traces(0);
        for n in 0..mesh.num_intervals() {
            let (a, b) = mesh.interval(n);
            prop_assert!((left[n] - u.eval(b)).abs() <= 1e-12 * (1.0 + u.eval(b).abs()));
            for q in 0..mesh.degree(n) {
                let inner = common::tanh_sinh(
                    |l, _| {
                        let t = a + l;
                        let x = -1.0 + 2.0 * l / (b - a);
                        (sol.evaluate_on(0, n, t) - u.eval(t)) * common::legendre_explicit(q, x)
                    },
                    b - a,
                    1e-13,
                );
                prop_assert!(inner.abs() <= 1e-10, "interval {n}, q={q}: {inner}");
            }
        }
    }

    #[test]
    fn stability_estimate_holds(
        alpha in -0.95f64..-0.05,
        n in 1usize..8,
        gamma in 1.0f64..3.0,
        p in 1usize..=3,
        lambda in 0.1f64..50.0,
        u0 in -1.0f64..1.0,
        forcing in polynomial_strategy(),
    ) {
        let order = FractionalOrder::new(alpha).unwrap();
        let mesh = TimeMesh::graded(1.0, n, gamma, p, false).unwrap();
        let problems = vec![ModeProblem::new(lambda, forcing.into(), u0).unwrap()];
        let sol = solve(&problems, &mesh, &order, &StepperConfig::default()).unwrap();
        let report = stability_report(&sol, &problems, &order).unwrap();
        prop_assert!(report.min_relative_slack() >= -1e-8, "{report:?}");
    }

    #[test]
    fn graded_mesh_properties(t_final in 0.1f64..5.0, n in 1usize..60, gamma in 1.0f64..4.0, p in 1usize..5, linear: bool) {
        let mesh = TimeMesh::graded(t_final, n, gamma, p, linear).unwrap();
        let nodes = mesh.nodes();
        prop_assert_eq!(nodes.len(), n + 1);
        prop_assert_eq!(nodes[0], 0.0);
        prop_assert_eq!(nodes[n], t_final);
        for i in 0..=n {
            let expected = t_final * (i as f64 / n as f64).powf(gamma);
            prop_assert!((nodes[i] - expected).abs() <= 1e-12 * t_final);
        }
        prop_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        let dofs: usize = mesh.degrees().iter().map(|d| d + 1).sum();
        prop_assert_eq!(mesh.dof_count(), dofs);
        prop_assert_eq!(mesh.degree(0), if linear { 1 } else { p });
    }

    #[test]
    fn geometric_mesh_properties(delta in 0.05f64..0.95, levels in 1usize..12, mu in 0.3f64..2.0) {
        let mesh = TimeMesh::geometric(1.0, 1.0, delta, levels, mu, 1).unwrap();
        let nodes = mesh.nodes();
        prop_assert_eq!(mesh.num_intervals(), levels + 1);
        prop_assert_eq!(nodes[0], 0.0);
        prop_assert_eq!(*nodes.last().unwrap(), 1.0);
        // interior nodes shrink by delta towards the origin
        for i in 1..levels {
            prop_assert!((nodes[i] / nodes[i + 1] - delta).abs() <= 1e-12);
        }
        prop_assert!(mesh.degrees().iter().all(|&d| d >= 1));
        prop_assert!(mesh.degrees().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn evaluation_matches_explicit_legendre(mesh in mesh_strategy(), seed in prop::collection::vec(-1.0f64..1.0, 40), t_frac in 0.0f64..=1.0) {
        let mut it = seed.iter().cycle();
        let coeffs: Vec<DVector<f64>> = (0..mesh.num_intervals())
            .map(|n| DVector::from_fn(mesh.degree(n) + 1, |_, _| *it.next().unwrap()))
            .collect();
        let sol = DgSolution::from_coefficients(mesh.clone(), vec![coeffs.clone()], vec![0.3]).unwrap();
        let t = t_frac * mesh.final_time();
        let value = sol.evaluate(0, t).unwrap();
        if t == 0.0 {
            prop_assert_eq!(value, 0.3);
        } else {
            let n = (0..mesh.num_intervals()).find(|&n| t <= mesh.interval(n).1).unwrap();
            let (a, b) = mesh.interval(n);
            let x = (2.0 * t - a - b) / (b - a);
            let oracle: f64 = coeffs[n].iter().enumerate().map(|(k, c)| c * common::legendre_explicit(k, x)).sum();
            prop_assert!((value - oracle).abs() <= 1e-12);
        }
        // jumps are the difference of the one-sided traces
        let jumps = sol.jumps(0);
        for n in 0..mesh.num_intervals() {
            let (a, _) = mesh.interval(n);
            let right = sol.evaluate_on(0, n, a);
            let left = if n == 0 { 0.3 } else { sol.evaluate_on(0, n - 1, a) };
            prop_assert!((jumps[n] - (right - left)).abs() <= 1e-12);
        }
    }

    #[test]
    fn mass_matrix_gives_l2_norm(mesh in mesh_strategy(), seed in prop::collection::vec(-1.0f64..1.0, 40)) {
        let mut it = seed.iter().cycle();
        let coeffs: Vec<DVector<f64>> = (0..mesh.num_intervals())
            .map(|n| DVector::from_fn(mesh.degree(n) + 1, |_, _| *it.next().unwrap()))
            .collect();
        let flat = DVector::from_iterator(mesh.dof_count(), coeffs.iter().flat_map(|c| c.iter().copied()));
        let sol = DgSolution::from_coefficients(mesh.clone(), vec![coeffs], vec![0.0]).unwrap();
        let via_mass = flat.dot(&(mass_matrix(&mesh) * &flat));
        prop_assert!((via_mass - sol.l2_norm_sq(0)).abs() <= 1e-12 * via_mass.max(1.0));
    }

    #[test]
    fn eoc_recovers_power_law(rate in 0.5f64..5.0, c in 1e-6f64..1.0) {
        let ns = [18usize, 27, 36, 72];
        let errors: Vec<f64> = ns.iter().map(|&n| c * (n as f64).powf(-rate)).collect();
        let rates = eoc(&errors, &ns);
        prop_assert!(rates[0].is_none());
        for r in &rates[1..] {
            prop_assert!((r.unwrap() - rate).abs() <= 1e-10);
        }
    }

    #[test]
    fn config_roundtrip(
        alpha in -0.99f64..-0.01,
        m in 1usize..100,
        seed: u64,
        gamma in 1.0f64..4.0,
        n in 1usize..100,
        p in 1usize..5,
        fl in prop::option::of(any::<bool>()),
        fem: bool,
        gammas in prop::collection::vec(1.0f64..4.0, 0..4),
        error_max in prop::option::of(1e-9f64..1.0),
    ) {
        let mut text = format!(
            "[run]\nalpha = {alpha}\nm = {m}\nseed = {seed}\n[mesh]\ngamma = {gamma}\nn = {n}\np = {p}\nfirst_interval_linear = {}\n",
            fl.map_or("auto".to_string(), |b| b.to_string())
        );
        text.push_str(if fem { "[backend]\nkind = fem\nelements = 16\ndegree = 2\n" } else { "[backend]\nkind = spectral\n" });
        if !gammas.is_empty() {
            let list: Vec<String> = gammas.iter().map(|g| g.to_string()).collect();
            text.push_str(&format!("[study]\ngammas = {}\n", list.join(", ")));
        }
        if let Some(e) = error_max {
            text.push_str(&format!("[expect]\nerror_max = {e}\n"));
        }
        let config = RunConfig::parse(&text).unwrap();
        let again = RunConfig::parse(&config.to_doc().to_string()).unwrap();
        prop_assert_eq!(&config, &again);
        prop_assert_eq!(config.hash(), again.hash());
        prop_assert_eq!(config.to_doc().to_string(), again.to_doc().to_string());
    }
}
