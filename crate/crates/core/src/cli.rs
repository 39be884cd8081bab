//! Command-line harness. Every subcommand prints one JSON report; exit code
//! 0 means all checks passed, 1 a property counterexample or certificate
//! failure, 2 an input or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior_algebra::Multivector;
use crate::lefschetz_so5::{
    degree_functional, dual_lefschetz, fit_unit_orbit_constant, isotypic_component, isotypic_split, lefschetz,
    so5_closure, SplitCertificate,
};
use crate::quaternion_space::{
    dim_cap_from_env, induced_structure, Generator, InducedComplexStructure, QuaternionicSpace,
};
use crate::scalar::{
    format_complex, format_rational, rat, ComplexField, GaussRat, Mode, Rational, Real, FLOAT_ZERO_TOL,
};
use crate::su2_action::{
    ad_operator, annihilator_structures, hodge_decomposition, is_su2_invariant, Annihilator, FormOperator, Su2Action,
};
use crate::torus_lab::{
    check_trianalyticity, compare_couplings, coordinate_subtori, genericity_scan, random_subtori, FlatTorus, Subtorus,
};
use crate::wirtinger::{is_trianalytic_subspace, wirtinger_report, LinearSubspace, SubspaceJson};

const DEFAULT_DIM_R: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "trianalytic", version, about = "Verify hyperkähler identities on quaternionic spaces and flat tori")]
pub struct Cli {
    /// Arithmetic: exact rationals or f64.
    #[arg(long, global = true, default_value = "exact")]
    pub mode: Mode,
    /// Real dimension (a positive multiple of 4). Class files carry their own.
    #[arg(long, global = true)]
    pub dim_r: Option<usize>,
    /// Seed for randomized families.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Render the report as `key: value` lines instead of JSON.
    #[arg(long, global = true)]
    pub table: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quaternion relations, derivation brackets, linearity and Lefschetz adjointness.
    Identities,
    /// Hodge components of a class for an induced complex structure.
    Hodge {
        class: PathBuf,
        /// Coefficients `a,b,c` of `aI + bJ + cK`.
        #[arg(long, default_value = "1,0,0")]
        structure: String,
    },
    /// Structures annihilating a class.
    Classify { class: PathBuf },
    /// Wirtinger ratio of a subspace.
    Wirtinger {
        subspace: PathBuf,
        #[arg(long, default_value = "1,0,0")]
        structure: String,
    },
    /// Dual invariance versus tri-analyticity on subtori.
    TorusVerify {
        subtorus: Option<PathBuf>,
        #[arg(long, conflicts_with = "subtorus")]
        family: Option<Family>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Coordinate bound for random families.
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Classify every lattice class of a degree up to a coefficient bound.
    Scan {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        bound: i64,
    },
    /// Component of a class in the submodule generated by the unit.
    Isotypic { class: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Exhaustive,
    Random,
}

/// A report plus whether its checks passed.
struct Outcome {
    report: Value,
    pass: bool,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let result = pool.install(|| dispatch(&cli));
    let (report, code) = match result {
        Ok(outcome) => (outcome.report, if outcome.pass { 0 } else { 1 }),
        Err(e) if e.is_property_failure() => {
            eprintln!("error: {e}");
            (json!({ "error": e.to_string() }), 1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match emit(&cli, &report) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit(cli: &Cli, report: &Value) -> std::io::Result<()> {
    let mut text = if cli.table { render_table(report) } else { serde_json::to_string_pretty(report)? };
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn render_table(report: &Value) -> String {
    match report {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let float_capable = matches!(
        cli.command,
        Command::Identities | Command::Hodge { .. } | Command::Classify { .. } | Command::Wirtinger { .. }
    );
    if cli.mode == Mode::Float && !float_capable {
        return Err(Error::Precondition("this subcommand runs in exact mode only".into()));
    }
    match &cli.command {
        Command::Identities => {
            let space = space_for(cli, None)?;
            match cli.mode {
                Mode::Exact => identities::<Rational>(&space),
                Mode::Float => identities::<f64>(&space),
            }
        }
        Command::Hodge { class, structure } => match cli.mode {
            Mode::Exact => hodge::<GaussRat>(cli, class, structure),
            Mode::Float => hodge::<Complex64>(cli, class, structure),
        },
        Command::Classify { class } => match cli.mode {
            Mode::Exact => classify::<GaussRat>(cli, class),
            Mode::Float => classify::<Complex64>(cli, class),
        },
        Command::Wirtinger { subspace, structure } => match cli.mode {
            Mode::Exact => wirtinger::<Rational>(cli, subspace, structure),
            Mode::Float => wirtinger::<f64>(cli, subspace, structure),
        },
        Command::TorusVerify { subtorus, family, count, bound } => {
            torus_verify(cli, subtorus.as_deref(), *family, *count, *bound)
        }
        Command::Scan { degree, bound } => {
            let torus = FlatTorus::new(space_for(cli, None)?);
            let report = genericity_scan(&torus, *degree, *bound)?;
            Ok(Outcome {
                pass: report.violations == 0,
                report: serde_json::to_value(&report).expect("report serializes"),
            })
        }
        Command::Isotypic { class } => isotypic(cli, class),
    }
}

/// The space of `--dim-r`, or of the input file when one is given.
fn space_for(cli: &Cli, file_dim: Option<usize>) -> Result<QuaternionicSpace> {
    let dim_r = match (cli.dim_r, file_dim) {
        (Some(flag), Some(file)) if flag != file => return Err(Error::DimensionMismatch { left: flag, right: file }),
        (_, Some(file)) => file,
        (Some(flag), None) => flag,
        (None, None) => DEFAULT_DIM_R,
    };
    QuaternionicSpace::from_real_dim(dim_r, dim_cap_from_env()?)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_class<C: ComplexField>(cli: &Cli, path: &Path) -> Result<(QuaternionicSpace, Multivector<C>)> {
    let alpha: Multivector<C> = Multivector::from_json_str(&read_file(path)?)?;
    Ok((space_for(cli, Some(alpha.dim_r()))?, alpha))
}

fn parse_structure<R: Real>(space: &QuaternionicSpace, text: &str) -> Result<InducedComplexStructure<R>> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(Error::Parse(format!("structure {text:?} is not of the form a,b,c")));
    };
    induced_structure(space, R::parse_repr(a)?, R::parse_repr(b)?, R::parse_repr(c)?)
}

fn structure_json<R: Real>(l: &InducedComplexStructure<R>) -> Value {
    json!(l.coefficients().iter().map(Real::to_string_repr).collect::<Vec<_>>())
}

fn approx_zero<R: Real>(op: &FormOperator<R>) -> bool {
    (0..=op.dim_r()).all(|k| op.block(k).iter().all(|(_, _, v)| v.approx_eq(&R::zero(), FLOAT_ZERO_TOL)))
}

fn identities<R: Real>(space: &QuaternionicSpace) -> Result<Outcome> {
    let mut checks: Vec<(String, bool)> = Vec::new();
    checks.push(("quaternion_relations".into(), space.quaternion_relations_hold()));
    checks.push(("structures_orthogonal".into(), space.structures_are_orthogonal()));
    let su2 = Su2Action::<R>::new(space)?;
    for (a, b, c) in [
        (Generator::I, Generator::J, Generator::K),
        (Generator::J, Generator::K, Generator::I),
        (Generator::K, Generator::I, Generator::J),
    ] {
        let bracket = su2.ad(a).commutator(su2.ad(b))?;
        let holds = approx_zero(&bracket.sub(&su2.ad(c).scale(&R::from_i64(2)))?);
        checks.push((format!("bracket_{a:?}{b:?}_eq_2{c:?}"), holds));
    }
    // ad is linear in the structure: ad(aI + bJ + cK) = a ad I + b ad J + c ad K.
    let l = induced_structure(space, R::from_rational(&rat(3, 5)), R::from_rational(&rat(4, 5)), R::zero())?;
    let direct = ad_operator(space, &l)?;
    checks.push(("ad_linearity".into(), approx_zero(&direct.sub(&su2.ad_along(&l))?)));
    for g in Generator::ALL {
        let l = space.structure::<R>(g);
        let up = lefschetz(space, &l)?;
        let down = dual_lefschetz(space, &l)?;
        checks.push((format!("dual_lefschetz_is_adjoint_{g:?}"), approx_zero(&down.sub(&up.transpose())?)));
        // [L, Λ] acts on Λ^k by the scalar k - dim_r/2, with one global sign.
        let weight = up.commutator(&down)?;
        let half = space.dim_r() as i64 / 2;
        let id = FormOperator::<R>::identity(space.dim_r());
        let holds = [1i64, -1].iter().any(|&sign| {
            let blocks =
                (0..=space.dim_r()).map(|k| id.block(k).scale(&R::from_i64(sign * (k as i64 - half)))).collect();
            FormOperator::from_blocks(space.dim_r(), 0, blocks)
                .and_then(|h| weight.sub(&h))
                .is_ok_and(|diff| approx_zero(&diff))
        });
        checks.push((format!("lefschetz_weight_{g:?}"), holds));
    }
    let pass = checks.iter().all(|(_, ok)| *ok);
    let mut report = json!({
        "dim_r": space.dim_r(),
        "mode": Multivector::<R::Complex>::mode(),
        "checks": checks.iter().map(|(name, ok)| json!({ "name": name, "holds": ok })).collect::<Vec<_>>(),
        "pass": pass,
    });
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        report["counterexample"] = json!(name);
    }
    Ok(Outcome { report, pass })
}

fn hodge<C: ComplexField>(cli: &Cli, path: &Path, structure: &str) -> Result<Outcome> {
    let (space, alpha) = read_class::<C>(cli, path)?;
    let l = parse_structure::<C::Re>(&space, structure)?;
    let components = hodge_decomposition(&space, &l, &alpha)?;
    let su2 = Su2Action::<C::Re>::new(&space)?;
    let invariant = is_su2_invariant(&su2, &alpha)?;
    Ok(Outcome {
        report: json!({
            "structure": structure_json(&l),
            "components": components
                .iter()
                .map(|c| json!({ "p": c.p, "q": c.q, "form": c.form.to_json() }))
                .collect::<Vec<_>>(),
            "invariant": invariant,
        }),
        pass: true,
    })
}

fn classify<C: ComplexField>(cli: &Cli, path: &Path) -> Result<Outcome> {
    let (space, alpha) = read_class::<C>(cli, path)?;
    let su2 = Su2Action::<C::Re>::new(&space)?;
    let verdict = annihilator_structures(&su2, &alpha)?;
    let direction = match &verdict {
        Annihilator::AntipodalPair(v) => json!(v.iter().map(Real::to_string_repr).collect::<Vec<_>>()),
        _ => Value::Null,
    };
    Ok(Outcome { report: json!({ "verdict": verdict.label(), "direction": direction }), pass: true })
}

fn wirtinger<R: Real>(cli: &Cli, path: &Path, structure: &str) -> Result<Outcome> {
    let json: SubspaceJson = serde_json::from_str(&read_file(path)?).map_err(|e| Error::Parse(e.to_string()))?;
    let w = LinearSubspace::<R>::from_json(&json)?;
    let space = space_for(cli, Some(w.ambient_dim()))?;
    let l = parse_structure::<R>(&space, structure)?;
    let r = wirtinger_report(&space, &w, &l)?;
    let trianalytic = is_trianalytic_subspace(&space, &w)?;
    Ok(Outcome {
        pass: r.consistent && r.within_bound,
        report: json!({
            "structure": structure_json(&l),
            "eta_squared": r.eta_squared.to_string_repr(),
            "complex": r.complex,
            "trianalytic": trianalytic,
            "consistent": r.consistent,
            "within_bound": r.within_bound,
        }),
    })
}

fn torus_verify(cli: &Cli, file: Option<&Path>, family: Option<Family>, count: usize, bound: i64) -> Result<Outcome> {
    let (space, subtori, label) = match (file, family) {
        (Some(path), _) => {
            let n = Subtorus::from_json_str(&read_file(path)?)?;
            (space_for(cli, Some(n.dim_r()))?, vec![n], "file")
        }
        (None, Some(Family::Exhaustive)) => {
            let space = space_for(cli, None)?;
            let dims: Vec<usize> = [2, 4].into_iter().filter(|&k| k <= space.dim_r()).collect();
            let subtori = coordinate_subtori(space.dim_r(), &dims)?;
            (space, subtori, "exhaustive")
        }
        (None, Some(Family::Random)) => {
            let space = space_for(cli, None)?;
            let subtori = random_subtori(&space, cli.seed, count, bound)?;
            (space, subtori, "random")
        }
        (None, None) => return Err(Error::Precondition("give a subtorus file or --family".into())),
    };
    let torus = FlatTorus::new(space);
    let s = torus.space();
    let reference = s.structure::<Rational>(Generator::I);
    let others = [
        s.structure::<Rational>(Generator::J),
        s.structure::<Rational>(Generator::K),
        induced_structure(s, rat(3, 5), rat(4, 5), rat(0, 1))?,
    ];
    let rows: Vec<(Value, bool, bool, bool)> = subtori
        .par_iter()
        .map(|n| -> Result<_> {
            let main = check_trianalyticity(&torus, n)?;
            let mut couplings = Vec::new();
            let mut mismatch = false;
            if n.dim() % 2 == 0 {
                for l in &others {
                    let c = compare_couplings(&torus, n, &reference, l)?;
                    mismatch |= c.hypothesis_holds && !c.equal;
                    couplings.push(json!({
                        "structure": structure_json(l),
                        "lhs": format_rational(&c.lhs),
                        "rhs": format_rational(&c.rhs),
                        "equal": c.equal,
                    }));
                }
            }
            let dimension_violation = main.dual_invariant && n.dim() % 4 != 0;
            let row = json!({
                "basis": n.basis(),
                "dim": n.dim(),
                "dual_invariant": main.dual_invariant,
                "trianalytic": main.trianalytic,
                "implication_holds": main.implication_holds,
                "converse_holds": main.converse_holds,
                "couplings": couplings,
            });
            Ok((row, !main.implication_holds || !main.converse_holds, mismatch, dimension_violation))
        })
        .collect::<Result<_>>()?;
    let violations = rows.iter().filter(|r| r.1).count();
    let coupling_mismatches = rows.iter().filter(|r| r.2).count();
    let dimension_violations = rows.iter().filter(|r| r.3).count();
    let pass = violations == 0 && coupling_mismatches == 0 && dimension_violations == 0;
    let mut report = json!({
        "family": label,
        "dim_r": torus.dim_r(),
        "count": rows.len(),
        "seed": cli.seed,
        "violations": violations,
        "coupling_mismatches": coupling_mismatches,
        "dimension_violations": dimension_violations,
        "invariant_duals": rows.iter().filter(|r| r.0["dual_invariant"] == true).count(),
        "pass": pass,
    });
    if let Some(bad) = rows.iter().find(|r| r.1 || r.2 || r.3) {
        report["counterexample"] = json!({ "dim_r": torus.dim_r(), "basis": bad.0["basis"].clone() });
    }
    if label == "file" {
        report["subtori"] = json!(rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>());
    }
    Ok(Outcome { report, pass })
}

fn isotypic(cli: &Cli, path: &Path) -> Result<Outcome> {
    let (space, alpha) = read_class::<GaussRat>(cli, path)?;
    let closure = so5_closure::<Rational>(&space)?;
    let split = isotypic_split(&space, &closure)?;
    let alpha_o = isotypic_component(&split, &alpha)?;
    let su2 = space.su2();
    let invariant = is_su2_invariant(&su2, &alpha)?;
    let fit = match alpha.homogeneous_degree() {
        Some(_) => Some(fit_unit_orbit_constant(&space, &split, &su2, &alpha)?),
        None => None,
    };
    let even = alpha.is_zero() || alpha.homogeneous_degree().is_some_and(|k| k % 2 == 0);
    let mut degrees = Vec::new();
    let mut preserved = true;
    if even {
        for g in Generator::ALL {
            let l = space.structure::<Rational>(g);
            let before = degree_functional(&space, &l, &alpha)?;
            let after = degree_functional(&space, &l, &alpha_o)?;
            preserved &= before == after;
            degrees.push(json!({
                "structure": format!("{g:?}"),
                "deg_alpha": format_complex(&before),
                "deg_alpha_o": format_complex(&after),
                "equal": before == after,
            }));
        }
    }
    let certificate = match split.certificate() {
        SplitCertificate::Casimir { eigenvalue } => {
            json!({ "kind": "casimir", "eigenvalue": format_rational(eigenvalue) })
        }
        SplitCertificate::WeightRefinement { stabilizer_dim, generating_vectors } => {
            json!({ "kind": "weight_refinement", "stabilizer_dim": stabilizer_dim, "generating_vectors": generating_vectors })
        }
    };
    let pass = !invariant || preserved;
    Ok(Outcome {
        report: json!({
            "alpha_o": alpha_o.to_json(),
            "h_o_dims": split.h_o_dims(),
            "certificate": certificate,
            "invariant": invariant,
            "degree": fit.as_ref().map(|f| f.degree),
            "line_dim": fit.as_ref().map(|f| f.line_dim),
            "constant": fit.as_ref().and_then(|f| f.constant.as_ref()).map(format_complex),
            "degrees": degrees,
            "pass": pass,
        }),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["trianalytic", "scan", "--degree", "2", "--dim-r", "4", "--seed", "3"]).unwrap();
        assert_eq!(cli.dim_r, Some(4));
        assert_eq!(cli.seed, 3);
        assert!(matches!(cli.command, Command::Scan { degree: 2, bound: 1 }));
    }

    #[test]
    fn structure_parsing() {
        let s = QuaternionicSpace::from_real_dim(4, 16).unwrap();
        let l = parse_structure::<Rational>(&s, "3/5, 4/5, 0").unwrap();
        assert_eq!(l.coefficients()[1], rat(4, 5));
        assert!(matches!(parse_structure::<Rational>(&s, "1,1,0"), Err(Error::NormViolation(_))));
        assert!(matches!(parse_structure::<Rational>(&s, "1,0"), Err(Error::Parse(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["trianalytic", "identities", "--dim-r", "6", "--out", "/dev/null"]), 2);
        assert_eq!(run(["trianalytic", "identities", "--dim-r", "4", "--out", "/dev/null"]), 0);
        assert_eq!(run(["trianalytic", "scan", "--degree", "2", "--mode", "float", "--out", "/dev/null"]), 2);
    }
}
