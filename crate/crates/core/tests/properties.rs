use nalgebra::DVector;
use proptest::prelude::*;

use phasetopo_core::analysis::{classify_dynamics, threshold_sweep, ClassifyParams, SweepOptions};
use phasetopo_core::complex::{build_graph, enumerate_cliques, CliqueComplex, Graph, Metric, ThresholdRule};
use phasetopo_core::homology::{
    assemble_dirac, betti_by_kernel, betti_by_rank, betti_exact, betti_rational, boundary_matrix, laplacian,
};
use phasetopo_core::linalg::symmetric_eigenvalues;
use phasetopo_core::odesolve::{euler_integrate, Monomial, OdeSystem, PolynomialField, SolverTag, TimeGrid, Trajectory};
use phasetopo_core::quantum::{pairwise_overlaps, OverlapMode};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

fn brute_force_cliques(g: &Graph, size: usize) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if verts.iter().enumerate().all(|(a, &u)| verts[a + 1..].iter().all(|&w| g.has_edge(u, w))) {
            out.push(verts);
        }
    }
    out.sort();
    out
}

fn full_complex(g: &Graph) -> CliqueComplex {
    enumerate_cliques(g, g.n().max(1))
}

fn trajectory_strategy() -> impl Strategy<Value = Trajectory> {
    (2usize..9, 2usize..4).prop_flat_map(|(m, dim)| {
        proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, dim), m).prop_filter_map("zero sample", move |rows| {
            if rows.iter().any(|r| r.iter().map(|v| v * v).sum::<f64>() < 1e-6) {
                return None;
            }
            let times = (0..m).map(|k| k as f64).collect();
            let states = rows.into_iter().map(DVector::from_vec).collect();
            Trajectory::new(times, states, SolverTag::External).ok()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cliques_match_brute_force(g in graph_strategy(10)) {
        let k = enumerate_cliques(&g, 4);
        for r in 0..=4 {
            prop_assert_eq!(k.simplices(r).to_vec(), brute_force_cliques(&g, r + 1));
        }
    }

    #[test]
    fn complexes_are_closed_and_sorted(g in graph_strategy(11)) {
        let k = enumerate_cliques(&g, 3);
        prop_assert!(k.is_closed());
        for r in 0..=3 {
            let s = k.simplices(r);
            prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.iter().all(|t| t.windows(2).all(|p| p[0] < p[1])));
        }
    }

    #[test]
    fn boundary_of_boundary_is_zero(g in graph_strategy(11)) {
        let k = full_complex(&g);
        for r in 1..=k.r_max().min(4) {
            let a = boundary_matrix(&k, r).unwrap().matrix;
            let b = boundary_matrix(&k, r + 1).unwrap().matrix;
            prop_assert!(a.mul_exact(&b).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn three_betti_routes_agree(g in graph_strategy(9)) {
        let k = full_complex(&g);
        let r_max = k.r_max() - 1;
        let by_rank = betti_by_rank(&k, r_max).unwrap();
        prop_assert_eq!(&by_rank, &betti_by_kernel(&k, r_max).unwrap());
        prop_assert_eq!(&by_rank, &betti_rational(&k, r_max).unwrap());
        prop_assert!(betti_exact(&k, r_max).is_ok());
    }

    #[test]
    fn euler_characteristic_identity(g in graph_strategy(10)) {
        let k = full_complex(&g);
        let top = k.dimension().unwrap_or(0);
        let betti = betti_exact(&k, top).unwrap().betti();
        let alternating: i64 = betti.iter().enumerate().map(|(r, &b)| if r % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        prop_assert_eq!(alternating, k.euler_characteristic());
    }

    #[test]
    fn laplacians_are_symmetric_psd(g in graph_strategy(9)) {
        let k = full_complex(&g);
        for r in 0..=k.dimension().unwrap_or(0) {
            let l = laplacian(&k, r).unwrap().matrix;
            prop_assert_eq!(&l, &l.transpose());
            if l.nrows() > 0 {
                prop_assert!(symmetric_eigenvalues(&l)[0] >= -1e-10);
            }
        }
    }

    #[test]
    fn dirac_structure(g in graph_strategy(8)) {
        let k = full_complex(&g);
        let top = k.dimension().unwrap_or(0);
        let betti = betti_exact(&k, top).unwrap().betti();
        for r in 0..=top {
            let b = assemble_dirac(&k, r).unwrap();
            prop_assert!(b.spectral_asymmetry() <= 1e-9);
            prop_assert!(b.square_off_block_norm() <= 1e-12);
            prop_assert_eq!(b.center_kernel_dim(), betti[r]);
        }
    }

    #[test]
    fn overlap_matrix_invariants(traj in trajectory_strategy(), seed in any::<u64>(), mode in 0usize..3) {
        let mode = [OverlapMode::Exact, OverlapMode::SwapTest, OverlapMode::HadamardTest][mode];
        let a = pairwise_overlaps(&traj, mode, 64, seed).unwrap();
        let b = pairwise_overlaps(&traj, mode, 64, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let m = a.size();
        for i in 0..m {
            prop_assert_eq!(a.get(i, i), 1.0);
            for j in 0..m {
                prop_assert_eq!(a.get(i, j), a.get(j, i));
                prop_assert!((0.0..=1.0).contains(&a.get(i, j)));
            }
        }
    }

    #[test]
    fn edges_and_simplices_grow_with_eps(traj in trajectory_strategy(), e1 in 0.0f64..1.0, e2 in 0.0f64..1.0, euclid in any::<bool>()) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let metric = if euclid { Metric::Euclidean } else { Metric::CosineDissimilarity };
        let scale = if euclid { 2.0 } else { 1.0 };
        let d = pairwise_overlaps(&traj, OverlapMode::Exact, 0, 0).unwrap();
        let g_lo = build_graph(&d, &ThresholdRule::new(metric, lo * scale).unwrap()).unwrap();
        let g_hi = build_graph(&d, &ThresholdRule::new(metric, hi * scale).unwrap()).unwrap();
        prop_assert!(g_lo.edges().iter().all(|&(a, b)| g_hi.has_edge(a, b)));
        let (k_lo, k_hi) = (enumerate_cliques(&g_lo, 3), enumerate_cliques(&g_hi, 3));
        for r in 0..=3 {
            prop_assert!(k_lo.simplices(r).iter().all(|s| k_hi.index_of(s).is_some()));
        }
    }

    #[test]
    fn relabelling_vertices_keeps_the_signature(traj in trajectory_strategy(), shift in 0usize..8) {
        let d = pairwise_overlaps(&traj, OverlapMode::Exact, 0, 0).unwrap();
        let m = d.size();
        let perm: Vec<usize> = (0..m).map(|i| (i * 5 + shift) % m).collect();
        let mut seen = perm.clone();
        seen.sort();
        prop_assume!(seen == (0..m).collect::<Vec<_>>());
        let grid = [0.05, 0.1, 0.2, 0.4, 0.6, 0.8];
        let opts = SweepOptions::new(Metric::CosineDissimilarity, 1);
        let a = threshold_sweep(&d, &grid, &opts).unwrap();
        let b = threshold_sweep(&d.permuted(&perm), &grid, &opts).unwrap();
        for (pa, pb) in a.points.iter().zip(&b.points) {
            prop_assert_eq!(pa.report.betti(), pb.report.betti());
            prop_assert_eq!(&pa.counts, &pb.counts);
        }
        prop_assert_eq!(
            classify_dynamics(&a, ClassifyParams::default()).unwrap(),
            classify_dynamics(&b, ClassifyParams::default()).unwrap()
        );
    }

    #[test]
    fn euler_is_the_recurrence(x0 in -1.0f64..1.0, c in -1.0f64..1.0, steps in 1usize..30) {
        // dx/dt = c x² + t
        let field = PolynomialField::new(vec![vec![Monomial::new(c, vec![2, 0]), Monomial::new(1.0, vec![0, 1])]]).unwrap();
        let grid = TimeGrid::new(0.5, steps).unwrap();
        let traj = euler_integrate(&OdeSystem::from(field), &DVector::from_element(1, x0), &grid).unwrap();
        let h = grid.step();
        let mut x = x0;
        for (j, s) in traj.states().iter().enumerate() {
            prop_assert!((s[0] - x).abs() <= 1e-14 * x.abs().max(1.0));
            x += h * (c * x * x + grid.node(j));
        }
    }

    #[test]
    fn complex_json_round_trip(g in graph_strategy(9)) {
        let k = enumerate_cliques(&g, 3);
        let json = serde_json::to_string(&k).unwrap();
        let back: CliqueComplex = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, k);
    }
}
