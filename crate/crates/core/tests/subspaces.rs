use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trianalytic::exterior_algebra::exterior_basis;
use trianalytic::quaternion_space::{make_standard_space, Generator, QuaternionicSpace};
use trianalytic::scalar::{rat, Rational};
use trianalytic::torus_lab::random_subtori;
use trianalytic::wirtinger::{
    eta_squared, is_complex_subspace, is_nondegenerately_symplectic_subspace, is_trianalytic_subspace, LinearSubspace,
};

fn coordinate_family(d: usize) -> Vec<LinearSubspace<Rational>> {
    let mut out = Vec::new();
    for k in [2, 4, 6] {
        for blade in exterior_basis(d).blades(k) {
            let basis = blade.indices().iter().map(|&i| (0..d).map(|j| rat(i64::from(i == j), 1)).collect()).collect();
            out.push(LinearSubspace::new(d, basis).unwrap());
        }
    }
    out
}

fn random_family(space: &QuaternionicSpace) -> Vec<LinearSubspace<Rational>> {
    random_subtori(space, 99, 60, 2).unwrap().iter().map(|n| n.tangent().unwrap()).collect()
}

#[test]
fn quaternionic_iff_all_three_ratios_saturate() {
    let s = make_standard_space(2).unwrap();
    let one = rat(1, 1);
    let mut quaternionic = 0;
    for w in coordinate_family(8).into_iter().chain(random_family(&s)) {
        let saturated = Generator::ALL.iter().all(|&g| eta_squared(&s, &w, &s.structure(g)).unwrap() == one);
        let trianalytic = is_trianalytic_subspace(&s, &w).unwrap();
        assert_eq!(saturated, trianalytic, "{:?}", w.basis());
        quaternionic += usize::from(trianalytic);
    }
    assert!(quaternionic >= 2);
}

#[test]
fn trianalytic_subspaces_are_nondegenerately_symplectic() {
    let s = make_standard_space(2).unwrap();
    for w in coordinate_family(8).into_iter().chain(random_family(&s)) {
        if is_trianalytic_subspace(&s, &w).unwrap() {
            assert!(is_nondegenerately_symplectic_subspace(&s, &w).unwrap(), "{:?}", w.basis());
        }
    }
    let plane = LinearSubspace::new(
        4,
        vec![vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)]],
    )
    .unwrap();
    let r4 = make_standard_space(1).unwrap();
    assert!(!is_nondegenerately_symplectic_subspace(&r4, &plane).unwrap());
}

#[test]
fn equality_case_on_random_rational_subspaces() {
    let s = make_standard_space(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let structures = [
        s.structure::<Rational>(Generator::I),
        trianalytic::quaternion_space::induced_structure(&s, rat(2, 3), rat(-1, 3), rat(2, 3)).unwrap(),
    ];
    for _ in 0..200 {
        let k = 2 * rng.random_range(1..=3);
        let basis: Vec<Vec<Rational>> =
            (0..k).map(|_| (0..8).map(|_| rat(rng.random_range(-3..=3), 1)).collect()).collect();
        let Ok(w) = LinearSubspace::new(8, basis) else { continue };
        for l in &structures {
            let eta = eta_squared(&s, &w, l).unwrap();
            assert!(eta <= rat(1, 1));
            assert_eq!(eta == rat(1, 1), is_complex_subspace(&s, &w, l).unwrap());
        }
    }
    // L-complex spans {v, Lv} saturate the bound.
    for _ in 0..20 {
        let v: Vec<Rational> = (0..8).map(|_| rat(rng.random_range(-3..=3), 1)).collect();
        let l = &structures[1];
        let Ok(w) = LinearSubspace::new(8, vec![v.clone(), l.apply(&v)]) else { continue };
        assert_eq!(eta_squared(&s, &w, l).unwrap(), rat(1, 1));
    }
}
