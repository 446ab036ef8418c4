use approx::assert_relative_eq;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::generators::{generate, GraphKind};

fn square() -> Graph {
    Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], false).unwrap()
}

fn random_graph(nodes: usize, p: f64, directed: bool, seed: u64) -> Graph {
    generate(&GraphKind::Random {
        nodes,
        edge_probability: p,
        directed,
        seed,
    })
    .unwrap()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[test]
fn coboundary_examples() {
    let g = square();
    assert!(coboundary(&g, &VertexVector(vec![3.0; 4])).unwrap().0.iter().all(|&v| v == 0.0));

    let p = generate(&GraphKind::Path(1)).unwrap();
    assert_eq!(coboundary(&p, &VertexVector(vec![0.0, 1.0])).unwrap().0, vec![1.0, -1.0]);

    let a = 0.5f64.sqrt();
    let b = (1.0 - a * a).sqrt();
    let f = VertexVector(vec![0.0, a, a + b, b]);
    for v in coboundary(&g, &f).unwrap().0 {
        assert_relative_eq!(v.abs(), 0.5f64.sqrt(), epsilon = 1e-15);
    }
    assert_eq!(
        coboundary(&g, &VertexVector(vec![0.0; 3])).unwrap_err(),
        Error::DimensionMismatch { expected: 4, actual: 3 }
    );
}

#[test]
fn boundary_adjoint_on_bonds_is_twice_delta() {
    let g = square();
    for &(i, k) in &g.bonds() {
        let out = boundary_adjoint(&g, &bond_vector(&g, i, k).unwrap()).unwrap();
        let mut expected = vec![0.0; 4];
        expected[k] = 2.0;
        expected[i] = -2.0;
        assert_eq!(out.0, expected);
    }
    let df = coboundary(&g, &VertexVector(vec![1.0; 4])).unwrap();
    assert!(boundary_adjoint(&g, &df).unwrap().0.iter().all(|&v| v == 0.0));
}

#[test]
fn adjacency_and_degree_examples() {
    let g = square();
    let a = adjacency(&g).dense().unwrap();
    assert!(a.row_iter().all(|r| r.sum() == 2.0));
    assert_eq!(degree(&g).dense().unwrap(), DMatrix::identity(4, 4) * 2.0);

    let p = generate(&GraphKind::DirectedPath(2)).unwrap();
    let (_, aout) = directed_adjacency(&p);
    let sums: Vec<f64> = aout.dense().unwrap().row_iter().map(|r| r.sum()).collect();
    assert_eq!(sums, vec![1.0, 1.0, 0.0]);
}

#[test]
fn partial_coboundary_products() {
    for seed in 0..10 {
        let g = random_graph(9, 0.4, false, seed);
        let (d1, d2) = partial_coboundaries(&g);
        let (d1, d2) = (d1.dense().unwrap(), d2.dense().unwrap());
        assert_eq!(d1.transpose() * &d2, adjacency(&g).dense().unwrap());
        assert_eq!(d2.transpose() * &d1, adjacency(&g).dense().unwrap());
        assert_eq!(d1.transpose() * &d1, degree(&g).dense().unwrap());
        assert_eq!(d2.transpose() * &d2, degree(&g).dense().unwrap());
        assert_eq!(&d1 - &d2, coboundary_operator(&g).dense().unwrap());

        let h = random_graph(9, 0.3, true, seed);
        let (d1, d2) = partial_coboundaries(&h);
        let (d1, d2) = (d1.dense().unwrap(), d2.dense().unwrap());
        let (vin, vout) = directed_degree(&h);
        let (ain, aout) = directed_adjacency(&h);
        assert_eq!(d1.transpose() * &d1, vin.dense().unwrap());
        assert_eq!(d2.transpose() * &d2, vout.dense().unwrap());
        assert_eq!(d1.transpose() * &d2 + d2.transpose() * &d1, ain.dense().unwrap() + aout.dense().unwrap());
    }
}

#[test]
fn laplacian_identities() {
    let g = square();
    let lap = laplacian(&g);
    assert!(lap.apply(&[2.5; 4]).iter().all(|&v| v == 0.0));

    let neg = -lap.dense().unwrap();
    let mut eig: Vec<f64> = SymmetricEigen::new(neg).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    for (got, want) in eig.iter().zip([0.0, 2.0, 2.0, 4.0]) {
        assert_relative_eq!(*got, want, epsilon = 1e-12);
    }

    for seed in 0..20 {
        let g = random_graph(15, 0.3, seed % 2 == 1, seed);
        let d = coboundary_operator(&g).dense().unwrap();
        let dtd = d.transpose() * &d;
        let factor = if g.is_directed() { -1.0 } else { -2.0 };
        let expected = laplacian(&g).dense().unwrap() * factor;
        assert_eq!(dtd, expected);
    }
}

#[test]
fn dirac_block_structure() {
    let g = square();
    let n = g.node_count();
    let dop = dirac(&g);
    let f = [1.0, -2.0, 0.5, 4.0];
    let mut x = f.to_vec();
    x.extend(std::iter::repeat(0.0).take(g.edge_count()));
    let dx = dop.apply(&x);
    assert!(dx[..n].iter().all(|&v| v == 0.0));
    assert_eq!(&dx[n..], coboundary(&g, &VertexVector(f.to_vec())).unwrap().values());

    let d2x = dop.apply(&dx);
    let minus_two_lap: Vec<f64> = laplacian(&g).apply(&f).iter().map(|v| -2.0 * v).collect();
    assert_eq!(&d2x[..n], &minus_two_lap[..]);
    assert!(d2x[n..].iter().all(|&v| v == 0.0));

    let dm = dop.dense().unwrap();
    let chi = grading(&g).dense().unwrap();
    assert_eq!(&chi * &dm * &chi, -&dm);
    assert_eq!(&chi * &dm + &dm * &chi, DMatrix::zeros(dm.nrows(), dm.ncols()));
    assert_eq!(dm.transpose(), dm);
}

#[test]
fn grading_and_involution() {
    let g = generate(&GraphKind::Cycle(5)).unwrap();
    let chi = grading(&g).dense().unwrap();
    assert_eq!(&chi * &chi, DMatrix::identity(chi.nrows(), chi.ncols()));

    let dim = Space::Total.dim(&g);
    let x: Vec<Complex64> = (0..dim).map(|i| Complex64::new(i as f64, 1.0 - i as f64 * 0.5)).collect();
    assert_eq!(involution(&involution(&x)), x);

    let f: Vec<Complex64> = (0..5).map(|i| Complex64::new(0.3 * i as f64, -(i as f64))).collect();
    let fbar: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
    let jfj = involution(&multiplication_complex(&g, &f, &involution(&x)).unwrap());
    assert_eq!(jfj, multiplication_complex(&g, &fbar, &x).unwrap());

    // real f: J f J = f
    let real: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64, 0.0)).collect();
    assert_eq!(
        involution(&multiplication_complex(&g, &real, &involution(&x)).unwrap()),
        multiplication_complex(&g, &real, &x).unwrap()
    );

    let fm = multiplication(&g, &VertexVector(vec![1.0, 2.0, 3.0, 4.0, 5.0])).unwrap().dense().unwrap();
    assert_eq!(&chi * &fm - &fm * &chi, DMatrix::zeros(dim, dim));
}

#[test]
fn commutator_examples() {
    let p = generate(&GraphKind::Path(1)).unwrap();
    let f = VertexVector(vec![0.0, 1.0]);
    // H0 input f' = (0, 1); edges are (0,1), (1,0)
    let out = commutator_apply(&p, &f, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    assert_eq!(out, vec![0.0, 0.0, 0.0, -1.0]);

    let g = square();
    let c = VertexVector(vec![7.0; 4]);
    let x: Vec<f64> = (0..12).map(|i| i as f64).collect();
    assert!(commutator_apply(&g, &c, &x).unwrap().iter().all(|&v| v == 0.0));
    assert!(commutator_apply(&g, &c, &x[..5]).is_err());
}

#[test]
fn commutator_matches_bimodule_action_on_h0() {
    // [D,f] f' = f' · df, where f' acts on edges through the initial node
    let g = random_graph(8, 0.4, true, 3);
    let f = VertexVector((0..8).map(|i| (i as f64 * 0.7).sin()).collect());
    let fp: Vec<f64> = (0..8).map(|i| (i as f64 * 1.3).cos()).collect();
    let mut x = fp.clone();
    x.extend(vec![0.0; g.edge_count()]);
    let out = commutator_apply(&g, &f, &x).unwrap();
    let df = coboundary(&g, &f).unwrap();
    for (e, &(i, _)) in g.edges().iter().enumerate() {
        assert_relative_eq!(out[8 + e], df.0[e] * fp[i], epsilon = 1e-14);
    }
    assert!(out[..8].iter().all(|&v| v == 0.0));
}

#[test]
fn commutator_norm_examples() {
    let g = square();
    let h = 0.5f64.sqrt();
    let f = VertexVector(vec![0.0, h, 2.0f64.sqrt(), h]);
    assert_relative_eq!(commutator_norm(&g, &f).unwrap(), 1.0, epsilon = 1e-15);
    assert_eq!(commutator_norm(&g, &VertexVector(vec![5.0; 4])).unwrap(), 0.0);

    let p = generate(&GraphKind::DirectedPath(6)).unwrap();
    let f = VertexVector((0..7).map(|k| k as f64).collect());
    assert_eq!(commutator_norm(&p, &f).unwrap(), 1.0);
}

#[test]
fn antisymmetrize_examples() {
    let p = generate(&GraphKind::Path(1)).unwrap();
    let b = bond_vector(&p, 0, 1).unwrap();
    assert_eq!(b.dot(&b), 2.0);
    assert_eq!(antisymmetrize(&p, &b).unwrap(), b);
    assert!(antisymmetrize(&p, &EdgeVector(vec![3.0, 3.0])).unwrap().0.iter().all(|&v| v == 0.0));
    let d = generate(&GraphKind::DirectedPath(2)).unwrap();
    assert_eq!(antisymmetrize(&d, &EdgeVector(vec![1.0, 1.0])).unwrap_err(), Error::RequiresUndirected);

    let g = random_graph(10, 0.4, false, 11);
    let h = EdgeVector((0..g.edge_count()).map(|e| (e as f64).sin()).collect());
    let once = antisymmetrize(&g, &h).unwrap();
    assert_eq!(antisymmetrize(&g, &once).unwrap(), once);
    // self-adjoint projection
    let k = EdgeVector((0..g.edge_count()).map(|e| (e as f64 * 0.3).cos()).collect());
    assert_relative_eq!(once.dot(&k), h.dot(&antisymmetrize(&g, &k).unwrap()), epsilon = 1e-12);
}

#[test]
fn cycle_space_examples() {
    let g = square();
    let dims = cycle_space_dimension(&g).unwrap();
    assert_eq!(dims.kernel_dim, 5);
    assert_eq!(dims.predicted_kernel_dim, 5);
    assert_eq!(dims.rank, 3);
    assert_eq!(dims.antisymmetric_kernel_dim, Some(1));

    let p = generate(&GraphKind::Path(6)).unwrap();
    assert_eq!(cycle_space_dimension(&p).unwrap().antisymmetric_kernel_dim, Some(0));

    // the oriented cycle indicator lies in Ker(d*)
    let mut cyc = EdgeVector::zeros(g.edge_count());
    for (i, k) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        let b = bond_vector(&g, i, k).unwrap();
        for (c, v) in cyc.0.iter_mut().zip(b.0) {
            *c += v;
        }
    }
    assert!(boundary_adjoint(&g, &cyc).unwrap().0.iter().all(|&v| v == 0.0));

    let two = Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4)], false).unwrap();
    let dims = cycle_space_dimension(&two).unwrap();
    assert_eq!(dims.components, 3);
    assert_eq!(dims.kernel_dim, dims.predicted_kernel_dim);
}

#[test]
fn coordinate_export() {
    let p = generate(&GraphKind::Path(1)).unwrap();
    assert_eq!(coboundary_operator(&p).matrix().to_coordinate_text(), "2 2 4\n0 0 -1e0\n0 1 1e0\n1 0 1e0\n1 1 -1e0\n");
}

prop_compose! {
    fn any_graph()(nodes in 1usize..=12, p in 0.0f64..0.8, directed in any::<bool>(), seed in any::<u64>()) -> Graph {
        random_graph(nodes, p, directed, seed)
    }
}

fn vector(len: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

proptest! {
    #[test]
    fn adjointness(g in any_graph(), seed in any::<u64>()) {
        for r in 0..100u64 {
            let f = VertexVector(vector(g.node_count(), seed ^ r));
            let h = EdgeVector(vector(g.edge_count(), seed.wrapping_add(r + 1)));
            let lhs = coboundary(&g, &f).unwrap().dot(&h);
            let rhs = f.dot(&boundary_adjoint(&g, &h).unwrap());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * f.norm() * h.norm() + f64::MIN_POSITIVE);
        }
    }

    #[test]
    fn positivity_and_energy_identity(g in any_graph(), seed in any::<u64>()) {
        let f = VertexVector(vector(g.node_count(), seed));
        let df = coboundary(&g, &f).unwrap();
        let dtdf = boundary_adjoint(&g, &df).unwrap();
        let energy = f.dot(&dtdf);
        prop_assert!(energy >= -1e-12);
        prop_assert!((energy - df.dot(&df)).abs() <= 1e-12 * (1.0 + energy));
        if !g.is_directed() {
            let vf = VertexVector(degree(&g).apply(&f.0));
            let af = VertexVector(adjacency(&g).apply(&f.0));
            let lf = VertexVector(laplacian(&g).apply(&f.0));
            prop_assert!((energy - 2.0 * (f.dot(&vf) - f.dot(&af))).abs() <= 1e-12 * (1.0 + energy));
            prop_assert!((energy + 2.0 * f.dot(&lf)).abs() <= 1e-12 * (1.0 + energy));
        }
    }

    #[test]
    fn dirac_anticommutes_with_grading(g in any_graph()) {
        let dm = dirac(&g).dense().unwrap();
        let chi = grading(&g).dense().unwrap();
        prop_assert_eq!(max_abs(&(&chi * &dm + &dm * &chi)), 0.0);
    }

    #[test]
    fn grading_commutes_with_functions(g in any_graph(), seed in any::<u64>()) {
        let f = VertexVector(vector(g.node_count(), seed));
        let fm = multiplication(&g, &f).unwrap().dense().unwrap();
        let chi = grading(&g).dense().unwrap();
        prop_assert_eq!(max_abs(&(&chi * &fm - &fm * &chi)), 0.0);
    }

    #[test]
    fn commutator_is_d_f_minus_f_d(g in any_graph(), seed in any::<u64>()) {
        let f = VertexVector(vector(g.node_count(), seed));
        let dm = dirac(&g).dense().unwrap();
        let fm = multiplication(&g, &f).unwrap().dense().unwrap();
        let dense = &dm * &fm - &fm * &dm;
        let x = vector(dm.ncols(), seed ^ 0x55);
        let via_op = commutator_apply(&g, &f, &x).unwrap();
        let via_dense = &dense * nalgebra::DVector::from_vec(x);
        for (a, b) in via_op.iter().zip(via_dense.iter()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
