use std::collections::VecDeque;

use coupled_fpi_core::*;
use proptest::prelude::*;

fn p(v: f64) -> Point {
    Point::scalar(v)
}

fn line() -> MetricSpace {
    MetricSpace::real_line()
}

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, dim)
}

fn triple() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..5).prop_flat_map(|d| (Just(d), coords(d), coords(d), coords(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metric_axioms((dim, a, b, c) in triple(), chebyshev in any::<bool>()) {
        let space = if chebyshev {
            MetricSpace::chebyshev(dim).unwrap()
        } else {
            MetricSpace::euclidean(dim).unwrap()
        };
        let (a, b, c) = (Point::new(a), Point::new(b), Point::new(c));
        let ab = space.distance(&a, &b).unwrap();
        let bc = space.distance(&b, &c).unwrap();
        let ac = space.distance(&a, &c).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(space.distance(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab, space.distance(&b, &a).unwrap());
        prop_assert!(ac <= ab + bc + 1e-9 * (1.0 + ab + bc));
        if ab == 0.0 {
            prop_assert_eq!(a, b);
        }
    }
}

proptest! {
    #[test]
    fn product_edges_reverse_second_coordinate(
        x in -10.0..10.0f64, y in -10.0..10.0f64, u in -10.0..10.0f64, v in -10.0..10.0f64,
    ) {
        let g = Digraph::order();
        let a = PairPoint::new(p(x), p(y)).unwrap();
        let b = PairPoint::new(p(u), p(v)).unwrap();
        let e = product_edge(&g, &a, &b).unwrap();
        prop_assert_eq!(e, x <= u && v <= y);
        prop_assert_eq!(e, product_edge(&g, &b.swapped(), &a.swapped()).unwrap());
    }

    #[test]
    fn weak_connectivity_matches_bfs(
        (n, edges) in (1usize..=50).prop_flat_map(|n| {
            (Just(n), prop::collection::vec((0..n, 0..n), 0..(2 * n)))
        })
    ) {
        let vertices: Vec<Point> = (0..n).map(|i| p(i as f64)).collect();
        let g = Digraph::from_index_edges(vertices, &edges).unwrap();

        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        prop_assert_eq!(g.is_weakly_connected().unwrap(), seen.iter().all(|&s| s));
    }

    #[test]
    fn hausdorff_matches_brute_force(
        a in prop::collection::vec(-5.0..5.0f64, 1..8),
        b in prop::collection::vec(-5.0..5.0f64, 1..8),
    ) {
        let one_sided = |s: &[f64], t: &[f64]| {
            s.iter()
                .map(|x| t.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let oracle = one_sided(&a, &b).max(one_sided(&b, &a));
        let sa = FiniteSet::new(a.iter().copied().map(p).collect()).unwrap();
        let sb = FiniteSet::new(b.iter().copied().map(p).collect()).unwrap();
        let h = hausdorff(&line(), &sa, &sb).unwrap();
        prop_assert!((h - oracle).abs() <= 1e-12);
        prop_assert_eq!(h, hausdorff(&line(), &sb, &sa).unwrap());
        prop_assert_eq!(hausdorff(&line(), &sa, &sa).unwrap(), 0.0);
    }

    #[test]
    fn selection_respects_hausdorff(
        a in prop::collection::vec(-5.0..5.0f64, 1..8),
        b in prop::collection::vec(-5.0..5.0f64, 1..8),
        pick in any::<prop::sample::Index>(),
        eps in 1e-9..1.0f64,
    ) {
        let sa = FiniteSet::new(a.iter().copied().map(p).collect()).unwrap();
        let sb = FiniteSet::new(b.iter().copied().map(p).collect()).unwrap();
        let x = pick.get(sa.points()).clone();
        let chosen = select_near(&line(), &sa, &sb, &x, eps).unwrap();
        prop_assert!(sb.contains(&chosen));
        let h = hausdorff(&line(), &sa, &sb).unwrap();
        prop_assert!(line().distance(&x, &chosen).unwrap() <= h + eps);
    }

    #[test]
    fn estimated_constant_passes_its_own_check(
        a in -0.5..0.5f64, b in -0.5..0.5f64, c in -3.0..3.0f64, seed in any::<u64>(),
    ) {
        let f = componentwise(move |x, y| a * x + b * y + c);
        let g = Digraph::full();
        let sampler = SampleSpec::cube(1, -10.0, 10.0, 500, seed);
        let k = estimate_k(&f, &line(), &g, &sampler).unwrap();
        prop_assert!(k <= 2.0 * a.abs().max(b.abs()) + 1e-9);
        let k = k + 1e-9;
        prop_assume!(k < 1.0);
        prop_assert!(check_contraction(&f, &line(), &g, k, &sampler).unwrap().passed());
    }

    #[test]
    fn subgraph_witnesses_are_witnesses(
        n in 2usize..8,
        keep in prop::collection::vec(any::<bool>(), 64),
        seed in any::<u64>(),
    ) {
        // a non-contraction on a small vertex set; every contraction witness
        // found on a subgraph of the full graph is a witness on the full graph
        let f = componentwise(|x, y| x * x / 4.0 - y);
        let vertices: Vec<Point> = (0..n).map(|i| p(i as f64)).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if keep[i * 8 + j] {
                    edges.push((i, j));
                }
            }
        }
        let all: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let sub = Digraph::from_index_edges(vertices.clone(), &edges).unwrap();
        let full = Digraph::from_index_edges(vertices.clone(), &all).unwrap();
        let sampler = SampleSpec::from_points(vertices, 200, seed);
        let cert = check_contraction(&f, &line(), &sub, 0.5, &sampler).unwrap();
        for w in &cert.violations {
            let a = PairPoint::new(w.points[0].clone(), w.points[1].clone()).unwrap();
            let b = PairPoint::new(w.points[2].clone(), w.points[3].clone()).unwrap();
            prop_assert!(product_edge(&full, &a, &b).unwrap());
            prop_assert!(w.measured[0] > w.measured[1]);
        }
    }
}

/// `F(x, y) = a x + b y + c` with `a ≥ 0 ≥ b`: mixed monotone on the order
/// graph with constant `2 max(a, |b|)`.
fn linear_case() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..0.45f64, -0.45..0.0f64, -5.0..5.0f64, 0.0..10.0f64)
        .prop_filter("k bounded away from 0", |(a, b, _, _)| a.max(-b) > 0.01)
}

proptest! {
    #[test]
    fn solver_invariants((a, b, c, r) in linear_case()) {
        let k = 2.0 * a.max(-b);
        let f = componentwise(move |x, y| a * x + b * y + c);
        let z = c / (1.0 - a - b);
        let g = Digraph::order();
        let cfg = SolveConfig::new(k, 1e-11).unwrap().record_edges(true);
        let sol = solve_coupled(&f, &line(), &g, &p(z - r), &p(z + r), &cfg).unwrap();
        prop_assert!(sol.converged());
        let tr = &sol.trace;
        let (xs, ys) = (&sol.fixed_point.x, &sol.fixed_point.y);

        let total: f64 = tr.steps.iter().map(|s| s.step_x + s.step_y).sum();
        prop_assert!(total <= tr.d0 / (1.0 - k) + 1e-9);

        for s in &tr.steps {
            prop_assert_eq!(s.edge_ok_x, Some(true));
            prop_assert_eq!(s.edge_ok_y, Some(true));
            prop_assert!(s.step_x + s.step_y <= 2.0 * step_bound(k, tr.d0, s.n).unwrap() + 1e-12);
            let ex = line().distance(&s.x, xs).unwrap();
            let ey = line().distance(&s.y, ys).unwrap();
            let tail = tail_bound(k, tr.d0, s.n).unwrap();
            prop_assert!(ex + ey <= 2.0 * tail + 1e-9);
            if s.n >= 1 {
                prop_assert!(ex <= tail + 1e-9 && ey <= tail + 1e-9);
            }
            // the sequences climb towards and descend onto the fixed point
            prop_assert!(g.has_edge(&s.x, xs).unwrap());
            prop_assert!(g.has_edge(ys, &s.y).unwrap());
        }
        prop_assert!((xs.coords()[0] - z).abs() <= 1e-9);
        prop_assert!(sol.fixed_point.is_diagonal);
    }

    #[test]
    fn swapping_the_seed_swaps_the_trace(
        a in -0.4..0.4f64, b in -0.4..0.4f64, c in -5.0..5.0f64,
        x0 in -10.0..10.0f64, y0 in -10.0..10.0f64,
    ) {
        prop_assume!(a.abs().max(b.abs()) > 0.01);
        let k = 2.0 * a.abs().max(b.abs());
        let f = componentwise(move |x, y| a * x + b * y + c);
        let g = Digraph::full();
        let cfg = SolveConfig::new(k, 1e-10).unwrap();
        let s1 = solve_coupled(&f, &line(), &g, &p(x0), &p(y0), &cfg).unwrap();
        let s2 = solve_coupled(&f, &line(), &g, &p(y0), &p(x0), &cfg).unwrap();
        prop_assert_eq!(s1.trace.len(), s2.trace.len());
        for (u, v) in s1.trace.steps.iter().zip(&s2.trace.steps) {
            prop_assert_eq!(&u.x, &v.y);
            prop_assert_eq!(&u.y, &v.x);
        }
        prop_assert_eq!(s1.fixed_point.x, s2.fixed_point.y);
    }

    #[test]
    fn monotone_sequences_close_on_the_order_graph(
        start in -10.0..10.0f64,
        incs in prop::collection::vec(0.0..1.0f64, 1..40),
        descending in any::<bool>(),
    ) {
        let sign = if descending { -1.0 } else { 1.0 };
        let mut seq = vec![p(start)];
        let mut cur = start;
        for d in &incs {
            cur += sign * d;
            seq.push(p(cur));
        }
        let dir = if descending { Direction::Descending } else { Direction::Ascending };
        let cert = check_limit_closure(&Digraph::order(), &seq, &p(cur), dir).unwrap();
        prop_assert!(cert.passed());

        // a limit overshot in the wrong direction is caught
        let wrong = p(cur - sign * 1.0);
        let cert = check_limit_closure(&Digraph::order(), &seq, &wrong, dir).unwrap();
        prop_assert_eq!(cert.outcome, Outcome::Failed);
    }
}
