//! Acceptance suite: one pass/fail line per criterion, with its runtime
//! against the allowed budget. Exits non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trianalytic::exterior_algebra::{exterior_basis, integrate_over_torus, Multivector};
use trianalytic::lefschetz_so5::{
    degree_functional, isotypic_component, isotypic_split, so5_closure, verify_integral_identity, IdentityCheck,
};
use trianalytic::linalg::Matrix;
use trianalytic::quaternion_space::{
    holomorphic_symplectic_form, induced_structure, kaehler_form, make_standard_space, random_float_sphere_point,
    sample_rational_structures, Generator, QuaternionicSpace,
};
use trianalytic::scalar::{rat, GaussRat, Rational};
use trianalytic::su2_action::{annihilator_structures, hodge_decomposition, is_su2_invariant, Annihilator};
use trianalytic::torus_lab::{
    check_trianalyticity, compare_couplings, coordinate_subtori, genericity_scan, poincare_dual, random_subtori,
    FlatTorus, Subtorus,
};
use trianalytic::wirtinger::{eta_squared, is_complex_subspace, is_trianalytic_subspace, LinearSubspace};

type M = Multivector<GaussRat>;
type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn space(n: usize) -> QuaternionicSpace {
    make_standard_space(n).expect("standard space")
}

fn real_form(d: usize, k: usize, v: &[Rational]) -> M {
    M::from_vector(d, k, &v.iter().map(|x| GaussRat::new(x.clone(), rat(0, 1))).collect::<Vec<_>>())
}

fn quaternion_identities() -> Check {
    for n in [1, 2] {
        let s = space(n);
        let d = s.dim_r();
        let [i, j, k] = Generator::ALL.map(|g| s.generator_matrix(g).clone());
        let minus_id = Matrix::identity(d).scale(&rat(-1, 1));
        for (name, m) in [("I", &i), ("J", &j), ("K", &k)] {
            ensure(m.mul(m) == minus_id, || format!("{name}^2 != -Id on R^{d}"))?;
        }
        ensure(i.mul(&j) == k, || format!("IJ != K on R^{d}"))?;
        ensure(j.mul(&i) == k.scale(&rat(-1, 1)), || format!("JI != -K on R^{d}"))?;
    }
    Ok(())
}

fn derivation_commutators() -> Check {
    for n in [1, 2] {
        let s = space(n);
        let su2 = s.su2();
        for (a, b, c) in [
            (Generator::I, Generator::J, Generator::K),
            (Generator::J, Generator::K, Generator::I),
            (Generator::K, Generator::I, Generator::J),
        ] {
            let bracket = su2.ad(a).commutator(su2.ad(b)).map_err(|e| e.to_string())?;
            let expected = su2.ad(c).scale(&rat(2, 1));
            for k in 0..=s.dim_r() {
                ensure(bracket.block(k) == expected.block(k), || {
                    format!("[ad {a:?}, ad {b:?}] != 2 ad {c:?} on degree {k} of R^{}", s.dim_r())
                })?;
            }
        }
    }
    Ok(())
}

fn hodge_spectrum() -> Check {
    let s = space(1);
    let su2 = s.su2();
    let ad_i = su2.ad(Generator::I).dense_block(2).map(|x| GaussRat::new(x.clone(), rat(0, 1)));
    let mut multiplicities = Vec::new();
    for lambda in [GaussRat::int(0, 2), GaussRat::int(0, 0), GaussRat::int(0, -2)] {
        let shifted = ad_i.sub(&Matrix::identity(6).scale(&lambda));
        multiplicities.push(shifted.kernel().len());
    }
    ensure(multiplicities == [1, 4, 1], || format!("eigenspace dimensions for 2i, 0, -2i: {multiplicities:?}"))?;
    let invariant = su2.invariant_basis(2).len();
    ensure(invariant == 3, || format!("invariant subspace of degree 2 has dimension {invariant}"))
}

fn invariance_equivalence() -> Check {
    let s = space(1);
    let su2 = s.su2();
    let structures = sample_rational_structures(&s, 20);
    let basis = exterior_basis(4);
    let mut mismatches = 0;
    for k in 0..=4 {
        let mut spanning: Vec<M> = basis.blades(k).iter().map(|b| M::basis(4, &b.indices())).collect();
        spanning.extend(su2.invariant_basis(k).iter().map(|v| real_form(4, k, v)));
        for alpha in &spanning {
            let invariant = is_su2_invariant(&su2, alpha).map_err(|e| e.to_string())?;
            let mut all_pp = true;
            for l in &structures {
                let parts = hodge_decomposition(&s, l, alpha).map_err(|e| e.to_string())?;
                all_pp &= parts.iter().all(|c| c.p == c.q);
            }
            if invariant != all_pp {
                mismatches += 1;
            }
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))
}

fn integral_identity() -> Check {
    let s4 = space(1);
    let one = M::one(4);
    let report = verify_integral_identity(&s4, &s4.su2(), &one, Some(1)).map_err(|e| e.to_string())?;
    let omega: M = holomorphic_symplectic_form(&s4);
    let lhs = integrate_over_torus(&s4, &omega.wedge(&omega.conj()).unwrap()).unwrap();
    ensure(lhs == GaussRat::int(4, 0) && report.equal && report.rhs == GaussRat::int(4, 0), || {
        format!("T^4: lhs {lhs:?}, report {report:?}")
    })?;
    let s8 = space(2);
    let su2 = s8.su2();
    for v in su2.invariant_basis(4) {
        let alpha = real_form(8, 4, &v);
        let r = verify_integral_identity(&s8, &su2, &alpha, Some(1)).map_err(|e| e.to_string())?;
        ensure(r.equal, || format!("T^8 degree 4: lhs {:?} != rhs {:?}", r.lhs, r.rhs))?;
    }
    for (s, n) in [(&s4, 1), (&s8, 2)] {
        let su2 = s.su2();
        for k in (2..=4 * n).step_by(4) {
            for v in su2.invariant_basis(k) {
                let r = verify_integral_identity(s, &su2, &real_form(4 * n, k, &v), None).map_err(|e| e.to_string())?;
                ensure(r.check == IdentityCheck::DegreeVanishes && r.equal, || {
                    format!("deg != 0 on an invariant class of degree {k} on T^{}", 4 * n)
                })?;
            }
        }
    }
    Ok(())
}

fn genericity() -> Check {
    let t = FlatTorus::new(space(1));
    let r = genericity_scan(&t, 2, 1).map_err(|e| e.to_string())?;
    ensure(r.invariant + r.antipodal + r.empty == 729, || {
        format!("enumerated {}", r.invariant + r.antipodal + r.empty)
    })?;
    ensure(r.violations == 0, || format!("{} two-dimensional annihilators", r.violations))?;
    ensure(r.invariant == 27, || format!("{} invariant classes, expected the 27 anti-self-dual ones", r.invariant))?;
    let omega_i: M = kaehler_form(t.space(), &t.space().structure(Generator::I));
    let verdict = annihilator_structures(&t.space().su2(), &omega_i).map_err(|e| e.to_string())?;
    ensure(verdict == Annihilator::AntipodalPair([rat(1, 1), rat(0, 1), rat(0, 1)]), || format!("ω_I: {verdict:?}"))
}

fn wirtinger() -> Check {
    let s = space(2);
    let mut structures: Vec<_> = Generator::ALL.iter().map(|&g| s.structure::<Rational>(g)).collect();
    structures.push(induced_structure(&s, rat(3, 5), rat(4, 5), rat(0, 1)).unwrap());
    structures.push(induced_structure(&s, rat(2, 3), rat(1, 3), rat(2, 3)).unwrap());
    let one = rat(1, 1);
    for k in [2, 4] {
        for blade in exterior_basis(8).blades(k) {
            let basis = blade.indices().iter().map(|&i| (0..8).map(|j| rat(i64::from(i == j), 1)).collect()).collect();
            let w = LinearSubspace::new(8, basis).unwrap();
            for l in &structures {
                let eta = eta_squared(&s, &w, l).map_err(|e| e.to_string())?;
                let complex = is_complex_subspace(&s, &w, l).map_err(|e| e.to_string())?;
                ensure(eta <= one && ((eta == one) == complex), || {
                    format!("{:?} for {:?}: η² = {eta}, complex = {complex}", blade.indices(), l.coefficients())
                })?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let [a, b, c] = random_float_sphere_point(&mut rng);
        let l = induced_structure(&s, a, b, c).map_err(|e| e.to_string())?;
        let basis: Vec<Vec<f64>> = (0..2).map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let w = LinearSubspace::new(8, basis).map_err(|e| e.to_string())?;
        let eta = eta_squared(&s, &w, &l).map_err(|e| e.to_string())?;
        ensure(eta <= 1.0 + 1e-9, || format!("trial {trial}: η² = {eta}"))?;
    }
    Ok(())
}

fn so5_closure_check() -> Check {
    let s = space(1);
    let c = so5_closure::<Rational>(&s).map_err(|e| e.to_string())?;
    ensure(c.dimension() == 10, || format!("closure has dimension {}", c.dimension()))?;
    for (g, op) in Generator::ALL.iter().zip(s.su2().operators()) {
        let coords = c.coordinates(op).ok_or_else(|| format!("ad {g:?} is not in the closure"))?;
        let rebuilt = c.combine(&coords).map_err(|e| e.to_string())?;
        ensure(&rebuilt == op, || format!("ad {g:?} coordinates do not reproduce it"))?;
    }
    Ok(())
}

fn isotypic_machinery() -> Check {
    let s = space(1);
    let c = so5_closure::<Rational>(&s).map_err(|e| e.to_string())?;
    let split = isotypic_split(&s, &c).map_err(|e| e.to_string())?;
    ensure(split.h_o_dim() == 5, || format!("H_o has dimension {}", split.h_o_dim()))?;
    let p = split.projection();
    ensure(p.compose(p).unwrap() == *p, || "projection is not idempotent".into())?;
    for x in c.basis() {
        ensure(p.compose(x).unwrap() == x.compose(p).unwrap(), || "projection does not commute".into())?;
    }
    let s8 = space(2);
    let c8 = so5_closure::<Rational>(&s8).map_err(|e| e.to_string())?;
    let split8 = isotypic_split(&s8, &c8).map_err(|e| e.to_string())?;
    for v in s8.su2().invariant_basis(4) {
        let alpha = real_form(8, 4, &v);
        let alpha_o = isotypic_component(&split8, &alpha).map_err(|e| e.to_string())?;
        for g in Generator::ALL {
            let l = s8.structure(g);
            let (a, b) = (degree_functional(&s8, &l, &alpha).unwrap(), degree_functional(&s8, &l, &alpha_o).unwrap());
            ensure(a == b, || format!("deg_{g:?}: {a:?} vs {b:?}"))?;
        }
    }
    Ok(())
}

fn trianalyticity() -> Check {
    let s = space(2);
    let t = FlatTorus::new(s.clone());
    let mut family = coordinate_subtori(8, &[2, 4]).map_err(|e| e.to_string())?;
    family.extend(random_subtori(&s, 7, 200, 2).map_err(|e| e.to_string())?);
    let reference = s.structure::<Rational>(Generator::I);
    let others = [
        s.structure::<Rational>(Generator::J),
        s.structure::<Rational>(Generator::K),
        induced_structure(&s, rat(3, 5), rat(4, 5), rat(0, 1)).unwrap(),
    ];
    let mut invariant = 0;
    for n in &family {
        let r = check_trianalyticity(&t, n).map_err(|e| e.to_string())?;
        ensure(r.dual_invariant == r.trianalytic, || format!("{:?}: {r:?}", n.basis()))?;
        if r.dual_invariant {
            invariant += 1;
            ensure(n.dim() % 4 == 0, || format!("{:?} has invariant dual and dimension {}", n.basis(), n.dim()))?;
            for l in &others {
                let c = compare_couplings(&t, n, &reference, l).map_err(|e| e.to_string())?;
                ensure(c.equal, || format!("{:?}: couplings {} vs {}", n.basis(), c.lhs, c.rhs))?;
            }
        }
    }
    ensure(invariant > 0, || "no invariant-dual subtori in the family".into())
}

fn negative_controls() -> Check {
    for (n, basis, expected) in [(1, vec![0, 1], None), (2, vec![0, 1, 4, 5], Some((rat(2, 1), rat(0, 1))))] {
        let s = space(n);
        let t = FlatTorus::new(s.clone());
        let sub = Subtorus::coordinate(s.dim_r(), &basis).unwrap();
        let w = sub.tangent::<Rational>().unwrap();
        ensure(is_complex_subspace(&s, &w, &s.structure(Generator::I)).unwrap(), || {
            format!("{basis:?} not I-complex")
        })?;
        ensure(!is_trianalytic_subspace(&s, &w).unwrap(), || format!("{basis:?} is trianalytic"))?;
        let dual: M = poincare_dual(&t, &sub).unwrap();
        ensure(!is_su2_invariant(&s.su2(), &dual).unwrap(), || format!("dual of {basis:?} is invariant"))?;
        let c = compare_couplings(&t, &sub, &s.structure(Generator::I), &s.structure(Generator::J)).unwrap();
        ensure(!c.equal, || format!("{basis:?}: couplings agree"))?;
        if let Some((lhs, rhs)) = expected {
            ensure(c.lhs == lhs && c.rhs == rhs, || format!("{basis:?}: couplings {} vs {}", c.lhs, c.rhs))?;
        }
    }
    Ok(())
}

fn run_cli(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_trianalytic")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn serialization() -> Check {
    let s = space(1);
    let omega: M = holomorphic_symplectic_form(&s);
    let mixed = omega.add(&M::scalar(4, GaussRat::new(rat(-7, 3), rat(1, 9))));
    for m in [&omega, &mixed, &M::zero(4)] {
        let text = m.to_json_string();
        let back = M::from_json_str(&text).map_err(|e| e.to_string())?;
        ensure(&back == m && back.to_json_string() == text, || format!("exact round-trip failed for {text}"))?;
    }
    let float =
        Multivector::<Complex64>::from_terms(4, [(exterior_basis(4).blades(2)[1], Complex64::new(0.1, -1e-300))]);
    let back = Multivector::<Complex64>::from_json_str(&float.to_json_string()).map_err(|e| e.to_string())?;
    ensure(back == float, || "float round-trip is not bit-exact".into())?;
    let w = LinearSubspace::new(8, vec![(0..8).map(|i| rat(i, 7)).collect(), (0..8).map(|i| rat(1, i + 1)).collect()])
        .unwrap();
    ensure(LinearSubspace::<Rational>::from_json(&w.to_json()).unwrap().basis() == w.basis(), || {
        "subspace round-trip".into()
    })?;
    let sub = random_subtori(&space(2), 3, 1, 2).unwrap().remove(0);
    ensure(Subtorus::from_json_str(&sub.to_json_string()).unwrap() == sub, || "subtorus round-trip".into())?;
    let args = ["torus-verify", "--family", "random", "--count", "30", "--seed", "11", "--dim-r", "8"];
    let (code_a, a) = run_cli(&args)?;
    let (code_b, b) = run_cli(&[&args[..], &["--jobs", "1"]].concat())?;
    ensure(code_a == 0 && code_b == 0 && a == b && !a.is_empty(), || "CLI output is not deterministic".into())
}

type Criterion = (&'static str, u64, fn() -> Check);

fn main() {
    let criteria: [Criterion; 12] = [
        ("1 quaternion identities", 1, quaternion_identities),
        ("2 derivation commutators", 10, derivation_commutators),
        ("3 Hodge spectrum on degree 2 of R^4", 1, hodge_spectrum),
        ("4 invariance <=> (p,p) for 20 structures", 10, invariance_equivalence),
        ("5 integral identity and degree vanishing", 30, integral_identity),
        ("6 genericity scan on T^4", 10, genericity),
        ("7 Wirtinger bound", 30, wirtinger),
        ("8 so(5) closure and membership", 30, so5_closure_check),
        ("9 isotypic projection", 60, isotypic_machinery),
        ("10 dual invariance <=> tri-analytic on T^8", 60, trianalyticity),
        ("11 negative controls", 5, negative_controls),
        ("12 serialization and CLI determinism", 60, serialization),
    ];
    let mut failures = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match (&result, elapsed <= Duration::from_secs(budget)) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => format!("FAIL (over the {budget} s budget)"),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        if !verdict.starts_with("PASS") {
            failures += 1;
        }
        println!("criterion {name}: {verdict} [{:.3} s / {budget} s]", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
