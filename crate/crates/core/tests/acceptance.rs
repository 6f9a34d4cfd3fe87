//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with a custom harness so the lines always reach the terminal; exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use sdlab::cli;
use sdlab::constructions::{construct_sigma_thm32, projection_membership_rem35, reduce_to_hom_prop34, Membership};
use sdlab::derivations::{
    annihilators, derivation_space, leibniz_residual, lemma22_residual, sigma_tau_derivation_space, symmetrize,
    AnnihilatorSide, DerivationSpace,
};
use sdlab::example26::{build_example26, AlphaSpec};
use sdlab::sampling::{self, CompressedOptions, LabRng, SigmaFamily};
use sdlab::semidirect::{NormBudget, SemidirectContext, SemidirectElement};
use sdlab::{Matrix, StarAlgebra, SuperMap, Tolerances, C64};

use common::{gram_schmidt, principal_angle, rref_nullspace};
use rand::Rng;

const ALGEBRAS: [&[usize]; 4] = [&[2], &[3], &[2, 2], &[2, 3]];

type Product<'a> = Box<dyn Fn(&Matrix) -> Matrix + 'a>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

struct Trial {
    family: SigmaFamily,
    sigma: SuperMap,
    space: DerivationSpace,
}

/// The 100 seeded (σ, derivation space) pairs shared by several criteria.
fn trials() -> Vec<Trial> {
    let tol = Tolerances::default();
    // independent solves; spread over the rayon pool when enabled
    sdlab::par::map_range(100, |k| {
        let alg = StarAlgebra::new(ALGEBRAS[k % 4]).unwrap();
        let family = SigmaFamily::ALL[k % SigmaFamily::ALL.len()];
        let sigma = sampling::random_sigma(&alg, family, &mut sampling::rng(1000 + k as u64));
        let space = derivation_space(&sigma, false, &tol).unwrap();
        Trial { family, sigma, space }
    })
}

fn leibniz_trials(trials: &[Trial]) -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut checked = 0;
    for t in trials {
        for d in &t.space.basis {
            let c = leibniz_residual(d, &t.sigma, &tol).unwrap();
            worst = worst.max(c.residual / c.scale);
            failures += usize::from(!c.passed);
            checked += 1;
        }
    }
    let nonvacuous = trials.iter().filter(|t| t.space.dim() > 0).count();
    let nonvacuous_ok = trials
        .iter()
        .filter(|t| t.family != SigmaFamily::Generic)
        .all(|t| t.space.dim() > 0);
    outcome(
        failures == 0 && nonvacuous_ok,
        format!(
            "{checked} derivations from {} trials ({nonvacuous} with nonzero space), max residual/scale {worst:.2e}",
            trials.len()
        ),
    )
}

/// Orthonormal basis of span{ad_{E_k}} built with Gram-Schmidt.
fn inner_derivation_oracle(alg: &StarAlgebra) -> common::Vectors {
    let vs: Vec<Vec<C64>> = alg
        .basis()
        .iter()
        .map(|x| SuperMap::from_fn(alg, |a| &(x * a) - &(a * x)).unwrap().to_vector())
        .collect();
    gram_schmidt(&vs, 1e-10)
}

fn known_dimension() -> Outcome {
    let tol = Tolerances::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let alg = StarAlgebra::full(n).unwrap();
        let space = derivation_space(&SuperMap::identity(&alg), false, &tol).unwrap();
        let solver: common::Vectors = space.basis.iter().map(SuperMap::to_vector).collect();
        let oracle = inner_derivation_oracle(&alg);
        let angle = principal_angle(&solver, &oracle);
        ok &= space.dim() == n * n - 1 && oracle.len() == n * n - 1 && angle <= 1e-8;
        parts.push(format!(
            "M_{n}: dim {} (oracle {}), angle {angle:.1e}",
            space.dim(),
            oracle.len()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn defect_identity(trials: &[Trial]) -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut checked = 0;
    for t in trials {
        for d in &t.space.basis {
            let c = lemma22_residual(d, &t.sigma, &tol).unwrap();
            worst = worst.max(c.residual / c.scale);
            failures += usize::from(!c.passed);
            checked += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{checked} pairs over all basis triples, max residual/scale {worst:.2e}"),
    )
}

fn random_combination(alg: &StarAlgebra, space: &DerivationSpace, rng: &mut LabRng) -> SuperMap {
    let w: Vec<f64> = (0..space.dim()).map(|_| sampling::gaussian(rng)).collect();
    space.combine(alg, &w)
}

/// Seeded *-preserving σ-derivations with nonzero range, from the star-constrained solver.
fn star_derivations(count: usize, star_sigma: bool, seed: u64) -> Vec<(SuperMap, SuperMap)> {
    let tol = Tolerances::default();
    let algebras: [&[usize]; 3] = [&[2], &[2, 1], &[2, 2]];
    let mut out = Vec::new();
    let mut k = 0u64;
    while out.len() < count && k < 20 * count as u64 {
        let alg = StarAlgebra::new(algebras[(k % 3) as usize]).unwrap();
        let mut rng = sampling::rng(seed + k);
        let family = match (k / 3) % 3 {
            0 => SigmaFamily::StarCompressed,
            1 if !star_sigma => SigmaFamily::Compressed,
            1 => SigmaFamily::Automorphism,
            _ => SigmaFamily::HalfAutomorphism,
        };
        let sigma = sampling::random_sigma(&alg, family, &mut rng);
        let space = derivation_space(&sigma, true, &tol).unwrap();
        if space.dim() > 0 {
            let d = random_combination(&alg, &space, &mut rng);
            out.push((sigma, d));
        }
        k += 1;
    }
    out
}

fn range_construction() -> Outcome {
    let tol = Tolerances::default();
    let cases = star_derivations(50, false, 5000);
    let (mut proj, mut kernel, mut leib) = (0.0f64, 0.0f64, 0.0f64);
    let mut ok = cases.len() == 50;
    for (sigma, d) in &cases {
        let rep = construct_sigma_thm32(d, sigma, &tol).unwrap();
        let idem = rep.residual("projection_idempotent").unwrap();
        let adj = rep.residual("projection_selfadjoint").unwrap();
        let ker = rep.residual("kernel_identity").unwrap();
        let l = leibniz_residual(d, &rep.sigma, &tol).unwrap();
        proj = proj.max(idem).max(adj);
        kernel = kernel.max(ker);
        leib = leib.max(l.residual / l.scale);
        ok &= idem <= 1e-10 && adj <= 1e-10 && ker <= 1e-8 && l.passed;
    }
    outcome(
        ok,
        format!(
            "{} instances: projection defect {proj:.1e}, kernel distance {kernel:.1e}, leibniz/scale {leib:.1e}",
            cases.len()
        ),
    )
}

fn hom_reduction() -> Outcome {
    let tol = Tolerances::default();
    // half with *-preserving d, half with arbitrary d from the unconstrained solver
    let mut cases = star_derivations(25, true, 7000);
    let algebras: [&[usize]; 3] = [&[2], &[2, 1], &[2, 2]];
    let mut k = 0u64;
    while cases.len() < 50 && k < 500 {
        let alg = StarAlgebra::new(algebras[(k % 3) as usize]).unwrap();
        let mut rng = sampling::rng(9000 + k);
        let family = if k.is_multiple_of(2) {
            SigmaFamily::StarCompressed
        } else {
            SigmaFamily::Automorphism
        };
        let sigma = sampling::random_sigma(&alg, family, &mut rng);
        let space = derivation_space(&sigma, false, &tol).unwrap();
        if space.dim() > 0 {
            let w: Vec<f64> = (0..space.dim()).map(|_| sampling::gaussian(&mut rng)).collect();
            let mut d = space.combine(&alg, &w);
            // complex weights as well
            if let Some(b) = space.basis.first() {
                d = d.add(&b.scale_by(C64::new(0.0, sampling::gaussian(&mut rng)))).unwrap();
            }
            cases.push((sigma, d));
        }
        k += 1;
    }
    let mut ok = cases.len() == 50;
    let mut star_cases = 0;
    let mut worst = 0.0f64;
    for (sigma, d) in &cases {
        let rep = reduce_to_hom_prop34(d, sigma, &tol).unwrap();
        let big_sigma_hom = rep.sigma.is_homomorphism(&tol);
        let big_sigma_star = rep.sigma.is_star_linear(&tol);
        let dmap = rep.dmap.as_ref().unwrap();
        let l = leibniz_residual(dmap, &rep.sigma, &tol).unwrap();
        let cs = rep.residual("commutation_sigma").unwrap();
        let cd = rep.residual("commutation_d").unwrap();
        ok &= big_sigma_hom.holds && big_sigma_star.holds && l.passed;
        ok &= tol.passes(cs, rep.scale) && tol.passes(cd, rep.scale);
        if d.is_star_linear(&tol).holds {
            star_cases += 1;
            ok &= dmap.is_star_linear(&tol).holds;
        }
        for r in [big_sigma_hom.residual, big_sigma_star.residual, l.residual, cs, cd] {
            worst = worst.max(r / rep.scale);
        }
    }
    outcome(
        ok && star_cases >= 25,
        format!(
            "{} instances ({star_cases} with *-preserving d), max residual/scale {worst:.2e}",
            cases.len()
        ),
    )
}

/// Pairs (σ, τ) of *-linear maps with nontrivial *(σ,τ)-derivations.
fn sigma_tau_pairs() -> Vec<(SuperMap, SuperMap)> {
    let mut pairs = Vec::new();
    for k in 0..10u64 {
        let alg = StarAlgebra::full(2).unwrap();
        let mut rng = sampling::rng(300 + k);
        let phi = sampling::conjugation_map(&alg, &sampling::random_unitary(2, &mut rng)).unwrap();
        let mu = rng.random_range(0.05..0.95);
        pairs.push((phi.scale_real(mu), phi.scale_real(1.0 - mu)));
    }
    for k in 0..10u64 {
        let alg = StarAlgebra::new(if k.is_multiple_of(2) { &[2, 1] } else { &[2, 2] }).unwrap();
        let mut rng = sampling::rng(400 + k);
        let opts = CompressedOptions {
            star_linear: true,
            block_preserving: false,
        };
        let c = sampling::compressed_sigma(&alg, opts, &mut rng);
        let q = &Matrix::identity(alg.n()) - &c.p;
        let tail = sampling::random_star_linear_map(&alg, &mut rng).map_images(|m| &(&q * m) * &q);
        pairs.push((c.sigma.clone(), c.pi.add(&tail).unwrap()));
    }
    pairs
}

fn symmetrization() -> Outcome {
    let tol = Tolerances::default();
    let mut ok = true;
    let mut found = 0;
    let mut worst = 0.0f64;
    for (sigma, tau) in sigma_tau_pairs() {
        let space = sigma_tau_derivation_space(&sigma, &tau, true, &tol).unwrap();
        for d in &space.basis {
            let (_, rep) = symmetrize(d, &sigma, &tau, &tol).unwrap();
            ok &= rep.forward.passed && rep.swapped.passed && rep.mid.passed;
            worst = worst
                .max(rep.swapped.residual / rep.swapped.scale)
                .max(rep.mid.residual / rep.mid.scale);
            found += 1;
        }
    }
    outcome(
        ok && found > 0,
        format!("{found} *(σ,τ)-derivations from 20 pairs, max residual/scale {worst:.2e}"),
    )
}

fn grid_example() -> Outcome {
    let tol = Tolerances::default();
    let (mut leib, mut half, mut entry) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..20 {
        let inst = build_example26(9, AlphaSpec::Random { seed }).unwrap();
        leib = leib.max(leibniz_residual(&inst.d, &inst.sigma, &tol).unwrap().residual);
        half = half.max(leibniz_residual(&inst.d, &inst.half_map(), &tol).unwrap().residual);
        let rep = construct_sigma_thm32(&inst.d, &inst.sigma, &tol).unwrap();
        let target = inst.support_projection();
        for r in 0..9 {
            for c in 0..9 {
                entry = entry.max((rep.p.get(r, c) - target.get(r, c)).norm());
            }
        }
    }
    outcome(
        leib <= 1e-12 && half <= 1e-12 && entry <= 1e-12,
        format!("20 alphas: leibniz {leib:.1e}, against f/2 {half:.1e}, max |P − indicator| {entry:.1e}"),
    )
}

fn membership() -> Outcome {
    let tol = Tolerances::default();
    let algebras: [&[usize]; 4] = [&[2, 3], &[2, 2], &[1, 2, 2], &[3, 1]];
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    for k in 0..20u64 {
        let alg = StarAlgebra::new(algebras[(k % 4) as usize]).unwrap();
        let mut rng = sampling::rng(600 + k);
        let c = sampling::compressed_sigma(
            &alg,
            CompressedOptions {
                star_linear: true,
                block_preserving: true,
            },
            &mut rng,
        );
        let d = c.star_inner_derivation_in(&alg, &mut rng);
        nonzero += usize::from(d.images().iter().any(|m| m.spectral_norm() > 1e-12));
        let rep = reduce_to_hom_prop34(&d, &c.sigma, &tol).unwrap();
        match projection_membership_rem35(&alg, &rep, &c.sigma, &d, &tol).unwrap() {
            Membership::Holds { residual } => {
                worst = worst.max(residual);
                ok &= residual <= 1e-10;
            }
            other => {
                ok = false;
                eprintln!("  membership instance {k}: {other:?}");
            }
        }
    }
    outcome(
        ok,
        format!("20 instances ({nonzero} with nonzero d), max off-pattern residual {worst:.1e}"),
    )
}

fn semidirect(trials: &[Trial]) -> Outcome {
    let tol = Tolerances::default();
    let mut ok = true;
    let mut hom_worst = 0.0f64;
    let mut embedded = 0;
    for t in trials.iter().filter(|t| t.family.is_homomorphism()) {
        let ctx = SemidirectContext::new(&t.sigma, &tol).unwrap();
        for d in &t.space.basis {
            let phi = ctx.phi_d(d).unwrap();
            let scale = d.scale().max(t.sigma.scale());
            hom_worst = hom_worst.max(phi.hom_residual / scale);
            ok &= phi.injective && phi.hom_residual <= 1e-10 * scale;
            embedded += 1;
        }
    }

    let alg = StarAlgebra::new(&[2, 3]).unwrap();
    let mut rng = sampling::rng(77);
    let sigma = sampling::conjugation_map(&alg, &sampling::random_unitary(5, &mut rng)).unwrap();
    let ctx = SemidirectContext::new(&sigma, &tol).unwrap();
    let size = |u: &SemidirectElement| alg.embed(&u.a).unwrap().spectral_norm() + u.x.spectral_norm();
    let mut assoc_worst = 0.0f64;
    for _ in 0..50 {
        let mut draw = || SemidirectElement {
            a: sampling::random_element(&alg, &mut rng),
            x: sampling::random_matrix(5, &mut rng),
        };
        let (u, v, w) = (draw(), draw(), draw());
        let left = ctx.mul(&ctx.mul(&u, &v).unwrap(), &w).unwrap();
        let right = ctx.mul(&u, &ctx.mul(&v, &w).unwrap()).unwrap();
        let scale = (size(&u) * size(&v) * size(&w)).max(1.0);
        let r = ctx.distance(&left, &right) / scale;
        assoc_worst = assoc_worst.max(r);
        ok &= r <= 1e-10;
    }

    let mut gap = 0.0f64;
    for n in [2usize, 3] {
        let alg = StarAlgebra::full(n).unwrap();
        let ctx = SemidirectContext::new(&SuperMap::identity(&alg), &tol).unwrap();
        for s in 0..5 {
            let x = sampling::random_matrix(n, &mut sampling::rng(800 + s));
            let u = SemidirectElement {
                a: vec![C64::new(0.0, 0.0); alg.dim()],
                x: x.clone(),
            };
            let est = ctx.norm_estimate(&u, NormBudget::default(), s).unwrap();
            let exact = x.spectral_norm();
            let rel = (exact - est.value) / exact;
            gap = gap.max(rel.abs());
            ok &= est.lower_bound && rel.abs() <= 0.01;
        }
    }
    outcome(
        ok && embedded > 0,
        format!(
            "φ_d on {embedded} derivations: max residual/scale {hom_worst:.1e}; associativity {assoc_worst:.1e}; norm gap {:.2}%",
            100.0 * gap
        ),
    )
}

fn annihilator_oracle() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = sampling::rng(900);
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut dims = Vec::new();
    for k in 0..50 {
        let n = 2 + k % 3;
        let side = [AnnihilatorSide::Right, AnnihilatorSide::Left, AnnihilatorSide::Both][k % 3];
        let count = 1 + rng.random_range(0..3);
        let set: Vec<Matrix> = (0..count)
            .map(|_| {
                let rank = rng.random_range(0..n);
                // rank-deficient elements have nontrivial annihilators
                let mut m = Matrix::zeros(n);
                for _ in 0..rank {
                    let u = sampling::random_matrix(n, &mut rng);
                    m = &m + &(&(&u * &Matrix::unit(n, 0, 0)) * &sampling::random_matrix(n, &mut rng));
                }
                m
            })
            .collect();
        let got: common::Vectors = annihilators(n, &set, side, &tol)
            .unwrap()
            .iter()
            .map(Matrix::vec)
            .collect();
        let oracle = gram_schmidt(&rref_nullspace(&annihilator_rows(n, &set, side), n * n, 1e-10), 1e-10);
        let angle = principal_angle(&got, &oracle);
        worst = worst.max(if got.len() == oracle.len() {
            angle
        } else {
            f64::INFINITY
        });
        ok &= got.len() == oracle.len() && angle <= 1e-8;
        dims.push(got.len());
    }
    let positive = dims.iter().filter(|&&d| d > 0).count();
    outcome(
        ok && positive > 0,
        format!("50 sets ({positive} with nonzero annihilator), max angle {worst:.1e}"),
    )
}

/// Row-major system whose nullspace (in column-major vec coordinates) is the annihilator.
fn annihilator_rows(n: usize, set: &[Matrix], side: AnnihilatorSide) -> Vec<Vec<C64>> {
    let mut rows = Vec::new();
    let units: Vec<Matrix> = (0..n * n).map(|k| Matrix::unit(n, k % n, k / n)).collect();
    for e in set {
        let products: Vec<Product> = match side {
            AnnihilatorSide::Right => vec![Box::new(|x: &Matrix| e * x)],
            AnnihilatorSide::Left => vec![Box::new(|x: &Matrix| x * e)],
            AnnihilatorSide::Both => vec![Box::new(|x: &Matrix| e * x), Box::new(|x: &Matrix| x * e)],
        };
        for f in products {
            let cols: Vec<Vec<C64>> = units.iter().map(|u| f(u).vec()).collect();
            for r in 0..n * n {
                rows.push(cols.iter().map(|c| c[r]).collect());
            }
        }
    }
    rows
}

fn cli_paths() -> Outcome {
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let status = |file: &str| cli::run(["run".to_string(), format!("{golden}/{file}")]).status;
    let statuses = [
        status("verify_pass.json"),
        status("verify_fail.json"),
        status("malformed.json"),
    ];
    let args = ["example26", "--n", "9", "--alpha", "random", "--seed", "4"];
    let (a, b) = (cli::run(args), cli::run(args));
    let sd = |_| {
        cli::run([
            "semidirect".to_string(),
            "--sigma".into(),
            format!("{golden}/sigma_identity.json"),
            "--d".into(),
            format!("{golden}/d_ad_e01.json"),
            "--seed".into(),
            "5".into(),
        ])
    };
    let (c, d) = (sd(0), sd(1));
    let identical = a == b && c == d && a.status == 0 && c.status == 0;
    outcome(
        statuses == [0, 1, 2] && identical,
        format!("statuses {statuses:?}, repeated reports identical: {identical}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    eprintln!("sdlab acceptance (parallel: {})", sdlab::par::is_parallel());
    let trials = trials();
    eprintln!(
        "  solved {} derivation spaces in {:.1}s",
        trials.len(),
        start.elapsed().as_secs_f64()
    );
    let criteria: Vec<Criterion> = vec![
        (
            "leibniz verification of solver output",
            Box::new(|| leibniz_trials(&trials)),
        ),
        ("known dimension of ordinary derivations", Box::new(known_dimension)),
        (
            "multiplicativity-defect identity",
            Box::new(|| defect_identity(&trials)),
        ),
        ("range-projection construction", Box::new(range_construction)),
        ("reduction to a *-homomorphism", Box::new(hom_reduction)),
        ("(σ,τ) symmetrization", Box::new(symmetrization)),
        ("grid example", Box::new(grid_example)),
        ("projection membership", Box::new(membership)),
        ("semidirect product", Box::new(|| semidirect(&trials))),
        ("annihilators vs brute force", Box::new(annihilator_oracle)),
        ("CLI exit statuses and determinism", Box::new(cli_paths)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        failed += usize::from(!o.ok);
        println!(
            "criterion {:>2} {}: {} ({}; {:.1}s)",
            i + 1,
            name,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
