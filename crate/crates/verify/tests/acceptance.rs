//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::Rng;
use thn_core::adinvariant::{ad_invariant_solution_space, certify_flat, normalize_ad_invariant, random_ad_invariant, template_dimension};
use thn_core::automorphism::random_automorphism_f64;
use thn_core::complex::{
    abelian_witness, hermitian_family_space, hermitian_template_metric, hermitian_template_space, nijenhuis_witness, normalize_complex_structure,
    solve_integrable_family, NormalizationMethod,
};
use thn_core::curvature::{levi_civita, ricci_from_riemann, ricci_nilpotent_formula, riemann, signature};
use thn_core::forms::{build_omega, certify_pseudo_kahler, closed_invariant_space, pseudo_kahler_metric, random_nondegenerate_params};
use thn_core::metric::{
    act, compare_canonical, equivalent, free_parameter_count, generic_orbit_codimension, random_canonical, random_positive_definite, reduce_to_canonical, seeded_rng,
    Equivalence,
};
use thn_core::{build_thn, pairing_metric, q, BilinearForm, CanonicalMetric, Matrix, OmegaParams, Rational, Scalar, Signature};
use thn_verify::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sample_rational(rng: &mut impl Rng) -> Rational {
    q(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

fn relative_residual(a: &Matrix<f64>, target: &Matrix<f64>) -> f64 {
    a.max_abs_diff(target) / target.max_abs().max(1.0)
}

fn derivation_dimension() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        let start = Instant::now();
        let computed = build_thn(n).unwrap().derivation_algebra().len();
        let elapsed = start.elapsed();
        let oracle = thn_verify::derivation_dimension(n);
        let expected = 6 * n * n + 9 * n + 3;
        let ok = computed == expected && oracle == expected && (n < 4 || elapsed < Duration::from_secs(10));
        pass &= ok;
        parts.push(format!("n={n}: {computed} (oracle {oracle}, expected {expected}, {:.2}s)", elapsed.as_secs_f64()));
    }
    outcome(pass, parts.join("; "))
}

fn moduli_parameter_count() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=5 {
        let free_s4 = 2 * n * (2 * n + 1) / 2 - n;
        let oracle = (n - 1) + free_s4 + 1;
        let template = CanonicalMetric::template_parameter_count(n);
        let expected = n * (2 * n + 1);
        pass &= template == expected && oracle == expected && free_parameter_count(n) == expected;
        parts.push(format!("n={n}: {template}"));
    }
    let codim: Vec<String> = (1..=3).map(|n| generic_orbit_codimension(n, 0).unwrap().to_string()).collect();
    outcome(pass, format!("{} (generic orbit codimension n=1..3: {})", parts.join(", "), codim.join(", ")))
}

fn reduction_soundness() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let c = structure(n);
        let mut rng = seeded_rng(300 + n as u64);
        let mut good = 0;
        let mut worst = 0.0_f64;
        let mut first_error = None;
        for _ in 0..100 {
            let s = BilinearForm::new(random_positive_definite(4 * n + 2, &mut rng)).unwrap();
            let r = match reduce_to_canonical(&s, n) {
                Ok(r) => r,
                Err(e) => {
                    first_error.get_or_insert(e.to_string());
                    continue;
                }
            };
            let f = r.automorphism.matrix();
            let target = r.canonical.reconstruct();
            let res = relative_residual(&f.congruence(s.matrix()), &target);
            let aut = bracket_defect(&c, f) <= 1e-12 * (1.0 + f.max_abs()).powi(2);
            let cm = &r.canonical;
            let sorted = cm.sigma.windows(2).all(|w| w[0] >= w[1] - 1e-9);
            let template =
                sorted && (cm.sigma[n - 1] - 1.0).abs() <= 1e-9 && (0..n).all(|i| cm.s4bar[(i, n + i)].abs() <= 1e-9) && cm.omega4 > 0.0;
            worst = worst.max(res);
            if res <= 1e-9 && aut && template {
                good += 1;
            }
        }
        pass &= good == 100;
        let mut part = format!("n={n}: {good}/100 (worst residual among reduced {worst:.1e})");
        if let Some(e) = first_error {
            part.push_str(&format!(" first error: {e}"));
        }
        parts.push(part);
    }
    outcome(pass, parts.join("; "))
}

fn reduction_invariance() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let mut rng = seeded_rng(400 + n as u64);
        let c = random_canonical(n, &mut rng);
        let base = BilinearForm::new(c.reconstruct()).unwrap();
        let (mut recovered, mut matched) = (0, 0);
        for _ in 0..50 {
            let a = random_automorphism_f64(n, &mut rng).unwrap();
            let s = act(&a, &base).unwrap();
            if let Ok(r) = reduce_to_canonical(&s, n) {
                let mut got = r.canonical.sigma.clone();
                let mut want = c.sigma.clone();
                got.sort_by(f64::total_cmp);
                want.sort_by(f64::total_cmp);
                if got.iter().zip(&want).all(|(x, y)| (x - y).abs() <= 1e-6) {
                    recovered += 1;
                }
                if compare_canonical(&r.canonical, &c, 1e-6) == Equivalence::Equivalent {
                    matched += 1;
                }
            }
        }
        let mut tied = c.clone();
        tied.sigma = vec![1.0; n];
        tied.s4bar[(n, n)] = tied.s4bar[(0, 0)];
        let mut other = tied.clone();
        other.s4bar[(0, 0)] += 0.5;
        other.s4bar[(n, n)] += 0.5;
        let mut verdicts = Vec::new();
        for _ in 0..5 {
            let x = act(&random_automorphism_f64(n, &mut rng).unwrap(), &BilinearForm::new(tied.reconstruct()).unwrap()).unwrap();
            let y = act(&random_automorphism_f64(n, &mut rng).unwrap(), &BilinearForm::new(other.reconstruct()).unwrap()).unwrap();
            verdicts.push(equivalent(&x, &y, n));
        }
        let inconclusive = verdicts.iter().filter(|v| matches!(v, Ok(Equivalence::Inconclusive))).count();
        pass &= recovered == 50 && inconclusive == verdicts.len();
        parts.push(format!("n={n}: sigma recovered {recovered}/50 (full form {matched}/50), repeated-sigma inconclusive {inconclusive}/{}", verdicts.len()));
    }
    outcome(pass, parts.join("; "))
}

fn fits_adinvariant_template(m: &Matrix<Rational>, n: usize) -> bool {
    let h = 2 * n + 1;
    let alpha = m[(0, h)].clone();
    (0..h).all(|r| (0..h).all(|c| m[(h + r, h + c)].is_zero()))
        && (0..h).all(|r| (0..h).all(|c| m[(r, h + c)] == if r == c { alpha.clone() } else { Rational::zero() }))
        && m.is_symmetric(0.0)
}

fn flatten(m: &Matrix<Rational>) -> Vec<Rational> {
    m.to_rows().concat()
}

fn ad_invariant_uniqueness() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let c = structure(n);
        let core = ad_invariant_solution_space(n).unwrap();
        let oracle = ad_invariant_space(n);
        let core_flat: Vec<_> = core.iter().map(flatten).collect();
        let oracle_flat: Vec<_> = oracle.iter().map(flatten).collect();
        let same = core.len() == oracle.len() && in_span(&core_flat, &oracle_flat) && in_span(&oracle_flat, &core_flat);
        let template = core.iter().chain(&oracle).all(|m| fits_adinvariant_template(m, n));
        let dim_ok = core.len() == template_dimension(n);

        let p = pairing_metric::<Rational>(n).unwrap();
        let mut rng = seeded_rng(500 + n as u64);
        let mut normalized = 0;
        for _ in 0..20 {
            let s = random_ad_invariant(n, &mut rng);
            if let Ok(f) = normalize_ad_invariant(&s) {
                if f.matrix().congruence(&s.matrix()) == *p.matrix() && is_automorphism_exact(&c, f.matrix()) {
                    normalized += 1;
                }
            }
        }
        let inertia = pairing_inertia(p.matrix());
        let neutral = inertia == Some((2 * n + 1, 2 * n + 1)) && signature(p.matrix()) == Signature::new(2 * n + 1, 2 * n + 1, 0);

        let nabla = connection(&c, p.matrix());
        let rt = curvature(&c, &nabla);
        let d = c.len();
        let quarter = q(-1, 4);
        let flat = rt.iter().flatten().all(|m| m.is_zero(0.0));
        let ad_route = (0..d).all(|i| {
            (0..d).all(|j| {
                let ad = Matrix::from_fn(d, d, |k, l| bracket(&c, &c[i][j], &unit(d, l))[k].clone());
                rt[i][j] == ad.scale(&quarter)
            })
        });
        let core_flat_cert = certify_flat(n).unwrap().flat();
        let ok = same && template && dim_ok && normalized == 20 && neutral && flat && ad_route && core_flat_cert;
        pass &= ok;
        parts.push(format!(
            "n={n}: dim {} (oracle {}, template {}), normalized {normalized}/20, neutral {neutral}, flat {flat}",
            core.len(),
            oracle.len(),
            template_dimension(n)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn complex_uniqueness() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let c = structure(n);
        let g = build_thn(n).unwrap();
        let j0m = j0(n);
        let core_j0 = thn_core::j0::<Rational>(n).unwrap();
        let integrable = nijenhuis_vanishes(&c, &j0m) && nijenhuis_witness(&core_j0, &g, 0.0).unwrap().is_none() && *core_j0.matrix() == j0m;

        let family = solve_integrable_family(n).unwrap();
        let mut rng = seeded_rng(600 + n as u64);
        let (mut exact_ok, mut float_ok, mut plus, mut minus) = (0, 0, 0, 0);
        for _ in 0..50 {
            let member = family.sample(&mut rng);
            let eps = member.epsilon;
            let j = member.structure().unwrap();
            if let Ok(r) = normalize_complex_structure(&j, n) {
                let f = r.automorphism.matrix();
                let target = j0m.scale(&Rational::from_i64(r.epsilon as i64));
                if r.residual == 0.0
                    && r.method == NormalizationMethod::Family
                    && j.matrix().mul(f) == f.mul(&target)
                    && is_automorphism_exact(&c, f)
                {
                    exact_ok += 1;
                }
            }
            if let Ok(r) = normalize_complex_structure(&j.to_f64(), n) {
                let f = r.automorphism.matrix();
                let target = j0m.to_f64().scale(&(r.epsilon as f64));
                let res = j.matrix().to_f64().mul(f).max_abs_diff(&f.mul(&target)) / (j.matrix().max_abs() * f.max_abs());
                if res <= 1e-9 && r.residual <= 1e-9 {
                    float_ok += 1;
                }
            }
            if eps > 0 {
                plus += 1;
            } else {
                minus += 1;
            }
        }
        let abelian = abelian_witness(&core_j0, &g, 0.0).unwrap();
        let witnessed = abelian.is_some_and(|(a, b)| {
            let d = c.len();
            let (x, y) = (unit(d, a), unit(d, b));
            bracket(&c, &j0m.mul_vec(&x), &j0m.mul_vec(&y)) != bracket(&c, &x, &y)
        });
        let ok = integrable && exact_ok == 50 && float_ok == 50 && witnessed && plus > 0 && minus > 0;
        pass &= ok;
        let names = g.basis_names();
        let w = abelian.map(|(a, b)| format!("({}, {})", names[a], names[b])).unwrap_or_else(|| "none".into());
        parts.push(format!(
            "n={n}: N=0 {integrable}, exact {exact_ok}/50, float {float_ok}/50, eps +{plus}/-{minus}, non-abelian witness {w}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn hermitian_characterization() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=2 {
        let b = Layout { n };
        let t = hermitian_template_space(n).unwrap();
        let f = hermitian_family_space(n).unwrap();
        let expected = n * n + n - 1;
        let j = j0(n);
        let jbar = Matrix::from_fn(2 * n, 2 * n, |r, c| {
            if r == c + n {
                Rational::one()
            } else if c == r + n {
                -Rational::one()
            } else {
                Rational::zero()
            }
        });
        let mut rng = seeded_rng(700 + n as u64);
        let mut checked = 0;
        for space in [&t, &f] {
            for _ in 0..10 {
                let mut x = space.point.clone();
                for dir in &space.directions {
                    let s = sample_rational(&mut rng);
                    for (xi, di) in x.iter_mut().zip(dir) {
                        *xi += &s * di;
                    }
                }
                let s = hermitian_template_metric(n, &x).unwrap();
                let s4 = s.block(b.es(0), b.es(0), 2 * n, 2 * n);
                let herm = j.congruence(&s) == s;
                let shape = s[(b.z(), b.z())].is_one() && jbar.mul(&s4) == s4.mul(&jbar) && (0..n).all(|i| s4[(i, n + i)].is_zero());
                if herm && shape {
                    checked += 1;
                }
            }
        }
        let ok = t.same_as(&f) && t.dim() == expected && f.dim() == expected && checked == 20;
        pass &= ok;
        parts.push(format!("n={n}: affine dim {} / {} (expected {expected}), sampled {checked}/20 Hermitian in family", t.dim(), f.dim()));
    }
    outcome(pass, parts.join("; "))
}

fn closed_invariant_forms() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        let oracle = thn_verify::closed_invariant_space(n);
        let core = closed_invariant_space(n).unwrap();
        let core_coords: Vec<_> = core.iter().map(|w| pair_coordinates(w.matrix())).collect();
        let agree = core.len() == oracle.len() && in_span(&core_coords, &oracle);
        let expected = if n == 1 { 5 } else { (3 * n * n + n + 2) / 2 };
        let template = literal_template(n);
        let in_template = oracle.iter().filter(|v| in_span(std::slice::from_ref(*v), &template)).count();
        let ok = agree && oracle.len() == expected && in_template == oracle.len();
        pass &= ok;
        parts.push(format!(
            "n={n}: dim {} (oracle {}, expected {expected}), basis in reference template {in_template}/{}",
            core.len(),
            oracle.len(),
            oracle.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn pseudo_kahler() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let c = structure(n);
        let b = Layout { n };
        let j = j0(n);
        let space = thn_verify::closed_invariant_space(n);
        let mut rng = seeded_rng(900 + n as u64);
        let mut samples = vec![OmegaParams::mu_only(n, Rational::one())];
        for _ in 0..20 {
            samples.push(random_nondegenerate_params(n, &mut rng).unwrap());
        }
        let (mut certified, mut witnessed) = (0, 0);
        for p in &samples {
            let omega = build_omega(p).unwrap();
            let closed_invariant = in_span(&[pair_coordinates(omega.matrix())], &space);
            let s = j.transpose().mul(omega.matrix());
            let core_s = pseudo_kahler_metric(&omega, n).unwrap();
            let nabla = connection(&c, &s);
            let rt = curvature(&c, &nabla);
            let ric = ricci(&rt);
            let cert = certify_pseudo_kahler(p).unwrap();
            let ok = closed_invariant
                && *core_s.matrix() == s
                && s.is_symmetric(0.0)
                && j.congruence(&s) == s
                && ric.is_zero(0.0)
                && cert.ok();
            if ok {
                certified += 1;
            }
            if !rt[b.e(0)][b.f(0)].is_zero(0.0) && cert.witness.is_some() {
                witnessed += 1;
            }
        }
        let total = samples.len();
        pass &= certified == total && witnessed == total;
        parts.push(format!("n={n}: Ricci-flat Hermitian {certified}/{total}, nonzero R(e1,f1) {witnessed}/{total}"));
    }
    outcome(pass, parts.join("; "))
}

/// `AᵀDA` with `A` a product of integer shears (determinant 1) and `D`
/// diagonal; indefinite unless `definite`.
fn random_metric(n: usize, rng: &mut impl Rng, definite: bool) -> Matrix<Rational> {
    let d = 4 * n + 2;
    let mut a = Matrix::<Rational>::identity(d);
    for _ in 0..2 * d {
        let (i, k) = (rng.gen_range(0..d), rng.gen_range(0..d));
        if i != k {
            let t = Rational::from_i64(if rng.gen_bool(0.5) { 1 } else { -1 });
            let mut e = Matrix::identity(d);
            e[(i, k)] = t;
            a = e.mul(&a);
        }
    }
    let choices = [q(1, 1), q(2, 1), q(1, 2), q(3, 1)];
    let diag: Vec<Rational> = (0..d)
        .map(|_| {
            let v = choices[rng.gen_range(0..choices.len())].clone();
            if !definite && rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect();
    a.transpose().mul(&Matrix::diagonal(&diag)).mul(&a)
}

fn ricci_routes() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let c = structure(n);
        let g = build_thn(n).unwrap();
        let mut rng = seeded_rng(1000 + n as u64);
        let (mut agree, mut indefinite) = (0, 0);
        for k in 0..20 {
            let s = random_metric(n, &mut rng, k % 4 == 0);
            let sig = signature(&s);
            if sig.positive > 0 && sig.negative > 0 {
                indefinite += 1;
            }
            let conn = levi_civita(&g, &s).unwrap();
            let by_riemann = ricci_from_riemann(&riemann(&conn, &g));
            let by_formula = ricci_nilpotent_formula(&g, &s).unwrap().total();
            let oracle = ricci(&curvature(&c, &connection(&c, &s)));
            if by_riemann == by_formula && by_riemann == oracle {
                agree += 1;
            }
        }
        pass &= agree == 20 && indefinite > 0;
        parts.push(format!("n={n}: {agree}/20 agree ({indefinite} indefinite)"));
    }
    outcome(pass, parts.join("; "))
}

fn full_suite_timing() -> Outcome {
    let start = Instant::now();
    let (code, out) = thn_cli::run(["thn", "all", "--json"]);
    let elapsed = start.elapsed();
    let reports: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap_or_default();
    let ran = reports.len() == 3;
    outcome(
        ran && elapsed < Duration::from_secs(60),
        format!("{:.1} s for n = 1..3 ({} reports, exit code {code})", elapsed.as_secs_f64(), reports.len()),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("1", "derivation dimension 6n^2+9n+3, n=1..4", derivation_dimension),
        ("2", "moduli parameter count n(2n+1), n=1..5", moduli_parameter_count),
        ("3", "canonical reduction of random metrics, n=1..3", reduction_soundness),
        ("4", "reduction invariance under automorphisms", reduction_invariance),
        ("5", "ad-invariant uniqueness and flatness", ad_invariant_uniqueness),
        ("6", "complex structure uniqueness", complex_uniqueness),
        ("7", "Hermitian characterization, n=1,2", hermitian_characterization),
        ("8", "closed J0-invariant 2-forms", closed_invariant_forms),
        ("9", "pseudo-Kahler Ricci-flat, not flat", pseudo_kahler),
        ("10", "Ricci by two routes", ricci_routes),
        ("t", "all --n 1..3 under 60 s", full_suite_timing),
    ];
    let mut failed = 0;
    for (id, title, f) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {} {title} [{:.1}s]: {}",
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("{failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
