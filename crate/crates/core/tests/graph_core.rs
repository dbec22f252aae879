mod common;

use common::TestRng;
use nalgebra::DMatrix;
use netsamp::graph::{BitSet, PopulationGraph};
use netsamp::pattern::{psi, swap_vector, MotifKind, Pattern};
use netsamp::sbm::simulation_pi;
use netsamp::Error;
use proptest::prelude::*;

fn canon(kind: MotifKind) -> Pattern {
    Pattern::canonical(kind).unwrap()
}

#[test]
fn pattern_construction_vectors() {
    let edge = Pattern::new(2, &[(1, 2)]).unwrap();
    assert_eq!((edge.r(), edge.t()), (2, 1));
    let wedge = Pattern::new(3, &[(1, 2), (2, 3)]).unwrap();
    assert_eq!(wedge.t(), 2);
    assert_eq!(wedge.degree(1), 2);
    let tri = Pattern::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
    assert_eq!(tri.t(), 3);
    assert!(matches!(Pattern::new(4, &[(1, 2), (3, 4)]), Err(Error::DisconnectedPattern)));
}

#[test]
fn pattern_validation_errors() {
    assert!(matches!(Pattern::new(1, &[]), Err(Error::TooFewVertices(1))));
    assert!(matches!(Pattern::new(3, &[(1, 1), (1, 2)]), Err(Error::SelfLoop(1))));
    assert!(matches!(Pattern::new(2, &[(1, 2), (2, 1)]), Err(Error::DuplicateEdge(..))));
    assert!(matches!(Pattern::new(3, &[(1, 4)]), Err(Error::IndexOutOfRange(_))));
    assert!(Pattern::new(9, &[(1, 2)]).is_err());
}

#[test]
fn canonical_families() {
    assert_eq!(canon(MotifKind::Complete(4)).t(), 6);
    assert_eq!(canon(MotifKind::Star(4)).edges(), &[(0, 1), (0, 2), (0, 3)]);
    let c3 = canon(MotifKind::Circle(3));
    let k3 = canon(MotifKind::Triangle);
    assert_eq!(c3.edges(), k3.edges());
    assert_eq!(canon(MotifKind::Line(5)).t(), 4);
    assert_eq!(Pattern::line_circle(3, 4).unwrap().r(), 6);
    assert_eq!(Pattern::line_circle(3, 4).unwrap().t(), 6);
    let reg = Pattern::matching_complement(6).unwrap();
    assert!((0..6).all(|v| reg.degree(v) == 4));
}

#[test]
fn parse_text_format() {
    let h = Pattern::parse_text("# wedge\n3\n1 2\n\n2 3\n").unwrap();
    assert_eq!(h.edges(), canon(MotifKind::Wedge).edges());
    assert!(matches!(Pattern::parse_text(""), Err(Error::Parse { .. })));
    assert!(matches!(Pattern::parse_text("3\n1 x\n"), Err(Error::Parse { .. })));
}

#[test]
fn psi_vectors() {
    let pi = simulation_pi();
    let tri = canon(MotifKind::Triangle);
    assert!((psi(&tri, &pi, &[0, 0, 0]).unwrap() - 0.26f64.powi(3)).abs() < 1e-15);
    assert!((psi(&tri, &pi, &[0, 0, 0]).unwrap() - 0.017576).abs() < 1e-12);
    let ones = DMatrix::from_element(4, 4, 1.0);
    assert_eq!(psi(&canon(MotifKind::Complete(5)), &ones, &[0, 3, 2, 1, 0]).unwrap(), 1.0);
    assert_eq!(psi(&canon(MotifKind::Edge), &pi, &[2, 3]).unwrap(), 0.0);
    assert!(psi(&tri, &pi, &[0, 1]).is_err());
    assert!(psi(&tri, &pi, &[0, 1, 4]).is_err());
}

#[test]
fn swap_vector_vectors() {
    assert_eq!(swap_vector(&[1, 2, 3], 0).unwrap(), vec![1, 2, 3]);
    assert_eq!(swap_vector(&[1, 2, 3], 2).unwrap(), vec![3, 2, 1]);
    assert_eq!(swap_vector(&[2, 2, 2], 1).unwrap(), vec![2, 2, 2]);
    assert!(swap_vector(&[1, 2, 3], 3).is_err());
}

#[test]
fn population_graph_basics() {
    let g = PopulationGraph::unlabelled(4, [(0, 1), (1, 2), (2, 1), (3, 3)]);
    assert_eq!(g.edge_count(), 2);
    assert!(g.has_edge(1, 0) && g.has_edge(2, 1));
    assert!(!g.has_edge(3, 3));
    assert_eq!(g.degree(1), 2);
    assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    assert_eq!(g.class_proportions(), vec![1.0]);
}

#[test]
fn bitset_operations() {
    let mut b = BitSet::new(130);
    for i in [0, 63, 64, 129] {
        b.insert(i);
    }
    assert_eq!(b.count(), 4);
    assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
    b.remove(63);
    assert!(!b.contains(63));
    assert_eq!(BitSet::full(130).count(), 130);
}

proptest! {
    #[test]
    fn psi_is_invariant_under_vertex_relabelling(seed in 0u64..500) {
        let mut rng = TestRng::new(seed);
        let r = 3 + rng.below(3);
        let h = common::random_connected_pattern(&mut rng, r);
        let (pi, _, _) = common::random_model(&mut rng, 3);
        let u: Vec<usize> = (0..r).map(|_| rng.below(3)).collect();
        let perm: Vec<usize> = {
            let mut v: Vec<usize> = (0..r).collect();
            for i in (1..r).rev() {
                v.swap(i, rng.below(i + 1));
            }
            v
        };
        let edges: Vec<(usize, usize)> = h.edges().iter().map(|&(a, b)| (perm[a] + 1, perm[b] + 1)).collect();
        let h2 = Pattern::new(r, &edges).unwrap();
        let mut u2 = vec![0; r];
        for v in 0..r {
            u2[perm[v]] = u[v];
        }
        let a = psi(&h, &pi, &u).unwrap();
        let b = psi(&h2, &pi, &u2).unwrap();
        prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
    }

    #[test]
    fn graph_is_symmetric_and_loop_free(n in 2usize..40, seed in 0u64..1000) {
        let mut rng = TestRng::new(seed);
        let g = common::random_graph(&mut rng, n, 0.3);
        for i in 0..n {
            prop_assert!(!g.has_edge(i, i));
            for j in 0..n {
                prop_assert_eq!(g.has_edge(i, j), g.has_edge(j, i));
            }
        }
        let degree_sum: usize = (0..n).map(|i| g.degree(i)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
    }
}
