use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use anyhow::Context;
use serde_json::{json, Value};
use thn_core::adinvariant::{
    ad_invariant_solution_space, certify_flat, is_ad_invariant, normalize_and_check, random_ad_invariant, solution_space_matches_template,
    template_dimension,
};
use thn_core::automorphism::{
    admissible_parameter_count, block_parameter_count, is_automorphism, preserves_center, random_automorphism, random_automorphism_f64,
};
use thn_core::complex::{
    abelian_witness, hermitian_family_space, hermitian_template_space, is_integrable, nijenhuis_witness, normalize_complex_structure,
    normalize_complex_structure_rounded, solve_integrable_family,
};
use thn_core::curvature::{analyze, signature};
use thn_core::forms::{
    all_in_span, build_omega, certify_pseudo_kahler, closed_invariant_space, random_nondegenerate_params, template_basis,
};
use thn_core::lie::heisenberg_cotangent_permutation;
use thn_core::metric::{
    act, compare_canonical, equivalent, free_parameter_count, random_canonical, random_positive_definite, reduce_to_canonical,
    verify_reduction, Equivalence,
};
use thn_core::scalar::rational_to_string;
use thn_core::{
    build_heisenberg, build_thn, cotangent_algebra, j0, pairing_metric, BilinearForm, CanonicalMetric, LieAlgebra, Matrix, OmegaParams,
    Rational, Scalar, Signature,
};

use crate::input::read_metric;
use crate::{Check, Ctx};

type Suite = anyhow::Result<(Vec<Check>, Value)>;

const AUT_SAMPLES: u64 = 5;
const REDUCE_SAMPLES: usize = 10;
const ADINV_SAMPLES: usize = 5;
const FAMILY_SAMPLES: usize = 10;
const CONJUGATE_SAMPLES: u64 = 2;
const KAHLER_SAMPLES: usize = 3;
const SIGMA_TOL: f64 = 1e-6;

fn rat_rows(m: &Matrix<Rational>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(rational_to_string).collect()).collect()
}

fn f64_rows(m: &Matrix<f64>) -> Vec<Vec<f64>> {
    m.to_rows()
}

fn rank(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors).map(|m| m.rank(0.0)).unwrap_or(0)
}

/// Scale-aware bracket tolerance for float automorphisms.
fn aut_tol(m: &Matrix<f64>) -> f64 {
    1e-12 * (1.0 + m.max_abs()).powi(2)
}

fn derivation_formula(n: usize) -> usize {
    6 * n * n + 9 * n + 3
}

fn closed_forms_formula(n: usize) -> usize {
    if n == 1 {
        5
    } else {
        (3 * n * n + n + 2) / 2
    }
}

pub fn algebra(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    let g = build_thn(n)?;
    let mut checks = vec![
        Check::new("jacobi", g.jacobi_holds(), format!("dim {}", g.dim())),
        Check::new("two_step_nilpotent", g.is_two_step_nilpotent(), ""),
    ];
    let center = g.center();
    let derived = g.derived_subalgebra();
    let joint = rank(&center.iter().chain(&derived).cloned().collect::<Vec<_>>());
    checks.push(Check::new(
        "center_is_derived",
        center.len() == 2 * n + 1 && derived.len() == 2 * n + 1 && joint == 2 * n + 1,
        format!("dim center {}, dim derived {}, dim sum {joint}", center.len(), derived.len()),
    ));
    checks.push(Check::from_result("cotangent_isomorphism", (|| {
        let cot = cotangent_algebra(&build_heisenberg(n)?);
        let p = heisenberg_cotangent_permutation(n);
        let ok = cot.is_homomorphism_into(&g, &p, 0.0) && p.rank(0.0) == g.dim();
        Ok((ok, "basis reordering z <-> z*".to_string()))
    })()));
    checks.push(Check::from_result("record_roundtrip", (|| {
        let text = serde_json::to_string(&g.to_record())?;
        let back = LieAlgebra::from_record(&serde_json::from_str(&text)?)?;
        Ok((back.constants() == g.constants(), format!("{} nonzero constants", g.constants().len())))
    })()));
    let der = g.derivation_algebra().len();
    let expected = derivation_formula(n);
    checks.push(Check::new("derivation_dimension", der == expected, format!("computed {der}, formula 6n^2+9n+3 = {expected}")));
    let data = json!({
        "algebra": g.to_record(),
        "derivation_dimension": der,
    });
    Ok((checks, data))
}

pub fn aut(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    let g = build_thn(n)?;
    let samples = (0..AUT_SAMPLES).map(|i| random_automorphism(n, ctx.seed.wrapping_mul(AUT_SAMPLES).wrapping_add(i))).collect::<Result<Vec<_>, _>>()?;
    let mut checks = Vec::new();
    let ok = samples.iter().all(|a| is_automorphism(a.matrix(), &g, 0.0) && preserves_center(a.matrix(), n, 0.0));
    checks.push(Check::new("exact_samples", ok, format!("{AUT_SAMPLES} rational samples preserve brackets and center")));
    let composed = samples.windows(2).all(|w| is_automorphism(w[0].compose(&w[1]).matrix(), &g, 0.0));
    checks.push(Check::new("composition", composed, ""));
    checks.push(Check::from_result("inverse", (|| {
        let mut ok = true;
        for a in &samples {
            let inv = a.inverse(0.0)?;
            ok &= is_automorphism(inv.matrix(), &g, 0.0) && a.compose(&inv).matrix() == &Matrix::identity(g.dim());
        }
        Ok((ok, String::new()))
    })()));
    let mut rng = ctx.rng(2);
    checks.push(Check::from_result("float_samples", (|| {
        let mut worst = 0.0_f64;
        let mut ok = true;
        for _ in 0..AUT_SAMPLES {
            let a = random_automorphism_f64(n, &mut rng)?;
            ok &= is_automorphism(a.matrix(), &g, aut_tol(a.matrix()));
            worst = worst.max(a.matrix().max_abs());
        }
        Ok((ok, format!("max entry {worst:.3}")))
    })()));
    let admissible = admissible_parameter_count(n);
    checks.push(Check::new(
        "parameter_count",
        admissible + if n >= 2 { 2 * n } else { 0 } == block_parameter_count(n),
        format!("admissible {admissible}, block form {}", block_parameter_count(n)),
    ));
    let data = json!({
        "admissible_parameter_count": admissible,
        "block_parameter_count": block_parameter_count(n),
        "sample": rat_rows(samples[0].matrix()),
    });
    Ok((checks, data))
}

fn canonical_json(c: &CanonicalMetric) -> Value {
    json!({ "sigma": c.sigma, "S4bar": f64_rows(&c.s4bar), "omega4": c.omega4 })
}

pub fn reduce(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    if let Some(path) = &ctx.metric {
        let file = read_metric(path)?;
        let s = BilinearForm::new(file.matrix.to_f64())?;
        let r = reduce_to_canonical(&s, n).context("reduction failed")?;
        let mut checks = Vec::new();
        let g = build_thn(n)?;
        let f = r.automorphism.matrix();
        checks.push(Check::new("automorphism", is_automorphism(f, &g, aut_tol(f)), ""));
        let residual = verify_reduction(&s, &r, n, aut_tol(f))?;
        checks.push(Check::new("residual", residual <= ctx.tol, format!("{residual:.3e}")));
        let violation = r.canonical.template_violation(ctx.tol);
        checks.push(Check::new("template", violation.is_none(), violation.unwrap_or_default()));
        if r.canonical.is_degenerate() {
            checks.push(Check::inconclusive("complete_invariant", "repeated sigma or S4bar plane; canonical form not unique"));
        }
        let mut data = canonical_json(&r.canonical);
        data["automorphism"] = json!(f64_rows(f));
        return Ok((checks, data));
    }

    let mut rng = ctx.rng(3);
    let mut checks = Vec::new();
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    let mut first = None;
    for k in 0..REDUCE_SAMPLES {
        let c = random_canonical(n, &mut rng);
        let a = random_automorphism_f64(n, &mut rng)?;
        let s = act(&a, &BilinearForm::new(c.reconstruct())?)?;
        match reduce_to_canonical(&s, n) {
            Ok(r) => {
                let res = verify_reduction(&s, &r, n, aut_tol(r.automorphism.matrix())).unwrap_or(f64::INFINITY);
                let sigma_ok = r.canonical.sigma.iter().zip(&c.sigma).all(|(x, y)| (x - y).abs() <= SIGMA_TOL);
                if res > ctx.tol || !sigma_ok || r.canonical.template_violation(ctx.tol).is_some() {
                    failures.push(k);
                }
                worst = worst.max(res);
                first.get_or_insert(r.canonical);
            }
            Err(_) => failures.push(k),
        }
    }
    checks.push(Check::new(
        "orbit_reduction",
        failures.is_empty(),
        format!("{}/{REDUCE_SAMPLES} recovered sigma, worst residual {worst:.3e}", REDUCE_SAMPLES - failures.len()),
    ));

    let mut reached = 0;
    let mut last_err = String::new();
    for _ in 0..REDUCE_SAMPLES {
        let s = BilinearForm::new(random_positive_definite(4 * n + 2, &mut rng))?;
        match reduce_to_canonical(&s, n) {
            Ok(r) if verify_reduction(&s, &r, n, aut_tol(r.automorphism.matrix())).is_ok_and(|res| res <= ctx.tol) => reached += 1,
            Ok(_) => last_err = "residual above tolerance".into(),
            Err(e) => last_err = e.to_string(),
        }
    }
    let detail = if reached == REDUCE_SAMPLES {
        format!("{reached}/{REDUCE_SAMPLES} generic metrics reduced")
    } else {
        format!("{reached}/{REDUCE_SAMPLES} generic metrics reduced; last error: {last_err}")
    };
    checks.push(Check::new("generic_reduction", reached == REDUCE_SAMPLES, detail));

    let template = CanonicalMetric::template_parameter_count(n);
    let moduli = free_parameter_count(n);
    checks.push(Check::new("parameter_count", template == moduli && moduli == n * (2 * n + 1), format!("template {template}, n(2n+1) = {moduli}")));
    let data = json!({
        "parameter_count": moduli,
        "sample": first.as_ref().map(canonical_json),
        "worst_residual": worst,
    });
    Ok((checks, data))
}

fn verdict_name(e: Equivalence) -> &'static str {
    match e {
        Equivalence::Equivalent => "equivalent",
        Equivalence::Distinct => "distinct",
        Equivalence::Inconclusive => "inconclusive",
    }
}

pub fn equiv(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    if let (Some(a), Some(b)) = (&ctx.metric, &ctx.other) {
        let fa = read_metric(a)?;
        let fb = read_metric(b)?;
        if fa.n != fb.n {
            anyhow::bail!("metrics have different n ({} and {})", fa.n, fb.n);
        }
        let v = equivalent(&BilinearForm::new(fa.matrix.to_f64())?, &BilinearForm::new(fb.matrix.to_f64())?, n)?;
        let check = match v {
            Equivalence::Inconclusive => Check::inconclusive("verdict", "repeated sigma; canonical form not a complete invariant"),
            other => Check::new("verdict", true, verdict_name(other)),
        };
        return Ok((vec![check], json!({ "verdict": verdict_name(v) })));
    }
    if ctx.metric.is_some() {
        anyhow::bail!("equiv needs both --metric and --other");
    }

    let mut rng = ctx.rng(4);
    let image = |c: &CanonicalMetric, rng: &mut _| -> anyhow::Result<BilinearForm<f64>> {
        let a = random_automorphism_f64(n, rng)?;
        Ok(act(&a, &BilinearForm::new(c.reconstruct())?)?)
    };
    let c = random_canonical(n, &mut rng);
    let mut checks = Vec::new();
    let (x, y) = (image(&c, &mut rng)?, image(&c, &mut rng)?);
    let same = equivalent(&x, &y, n);
    checks.push(Check::new("same_orbit", matches!(same, Ok(Equivalence::Equivalent)), format!("{same:?}")));

    let mut shifted = c.clone();
    shifted.sigma[0] += 0.25;
    let z = image(&shifted, &mut rng)?;
    let distinct = equivalent(&x, &z, n);
    checks.push(Check::new("distinct_orbits", matches!(distinct, Ok(Equivalence::Distinct)), format!("{distinct:?}")));

    // repeated sigma (n >= 2) or a round S4bar plane (n = 1)
    let mut tied = c.clone();
    tied.sigma = vec![1.0; n];
    let d = tied.s4bar[(0, 0)];
    tied.s4bar[(n, n)] = d;
    let mut other = tied.clone();
    other.s4bar[(0, 0)] += 0.5;
    other.s4bar[(n, n)] += 0.5;
    let direct = compare_canonical(&tied, &other, SIGMA_TOL);
    checks.push(Check::new(
        "repeated_sigma",
        direct == Equivalence::Inconclusive,
        format!("verdict {}", verdict_name(direct)),
    ));
    let data = json!({
        "same_orbit": same.ok().map(verdict_name),
        "distinct_orbits": distinct.ok().map(verdict_name),
        "repeated_sigma": verdict_name(direct),
    });
    Ok((checks, data))
}

pub fn adinv(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    let g = build_thn(n)?;
    let basis = ad_invariant_solution_space(n)?;
    let mut checks = Vec::new();
    let expected = template_dimension(n);
    checks.push(Check::new("solution_dim", basis.len() == expected, format!("computed {}, template {expected}", basis.len())));
    let template_ok = solution_space_matches_template(&basis);
    checks.push(Check::new("template", template_ok, "every basis element is [[S, aE], [aE, 0]]"));

    let mut rng = ctx.rng(5);
    let mut unique = true;
    for _ in 0..ADINV_SAMPLES {
        let s = random_ad_invariant(n, &mut rng);
        let ok = if ctx.exact {
            normalize_and_check(&s, 0.0).map(|(_, ok)| ok)
        } else {
            let sf = thn_core::AdInvariantForm::new(s.sbar.to_f64(), s.alpha.to_f64())?;
            normalize_and_check(&sf, ctx.tol).map(|(_, ok)| ok)
        };
        unique &= ok.unwrap_or(false);
    }
    let mode = if ctx.exact { "exact" } else { "float" };
    checks.push(Check::new("unique_up_to_aut", unique, format!("{ADINV_SAMPLES} samples normalized to the pairing ({mode})")));

    let p = pairing_metric::<Rational>(n)?;
    checks.push(Check::from_result("pairing_ad_invariant", is_ad_invariant(&p, &g).map(|ok| (ok, String::new())).map_err(Into::into)));
    let sig = signature(p.matrix());
    let neutral = Signature::new(2 * n + 1, 2 * n + 1, 0);
    checks.push(Check::new("signature", sig == neutral, format!("({}, {}, {})", sig.positive, sig.negative, sig.zero)));
    let cert = certify_flat(n)?;
    checks.push(Check::new("flat", cert.flat(), format!("riemann {}, bracket route {}", cert.riemann_route, cert.bracket_route)));
    let data = json!({
        "solution_dim": basis.len(),
        "template_ok": template_ok,
        "unique_up_to_aut": unique,
        "flat": cert.flat(),
        "certificate": cert,
    });
    Ok((checks, data))
}

pub fn complex(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    let g = build_thn(n)?;
    let names = g.basis_names().to_vec();
    let j = j0::<Rational>(n)?;
    let mut checks = Vec::new();
    let witness = nijenhuis_witness(&j, &g, 0.0)?;
    checks.push(Check::new("j0_integrable", witness.is_none() && is_integrable(&j, &g)?, "N_J0 = 0 by both routes"));
    let ab = abelian_witness(&j, &g, 0.0)?;
    checks.push(Check::new(
        "j0_not_abelian",
        ab.is_some(),
        ab.map(|(a, b)| format!("[J{0}, J{1}] != [{0}, {1}]", names[a], names[b])).unwrap_or_default(),
    ));

    let family = solve_integrable_family(n)?;
    let mut rng = ctx.rng(6);
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    let mut normalized = 0;
    let mut worst = 0.0_f64;
    for _ in 0..FAMILY_SAMPLES {
        let member = family.sample(&mut rng);
        let js = member.structure()?;
        let out = if ctx.exact {
            normalize_complex_structure(&js, n).map(|r| (r.epsilon, r.residual))
        } else {
            normalize_complex_structure(&js.to_f64(), n).map(|r| (r.epsilon, r.residual))
        };
        if let Ok((eps, res)) = out {
            if res <= ctx.tol {
                normalized += 1;
                worst = worst.max(res);
                *histogram.entry(format!("{eps:+}")).or_default() += 1;
            }
        }
    }
    let family_ok = normalized == FAMILY_SAMPLES;
    checks.push(Check::new("family_normalization", family_ok, format!("{normalized}/{FAMILY_SAMPLES}, worst residual {worst:.3e}")));

    let mut conj_ok = 0;
    let mut conj_worst = 0.0_f64;
    for k in 0..CONJUGATE_SAMPLES {
        let a = random_automorphism(n, ctx.seed.wrapping_mul(CONJUGATE_SAMPLES).wrapping_add(k).wrapping_add(1 << 32))?;
        let jc = j.conjugate(a.matrix(), 0.0)?;
        if let Ok(r) = normalize_complex_structure_rounded(&jc, n) {
            if r.residual <= ctx.tol {
                conj_ok += 1;
                conj_worst = conj_worst.max(r.residual);
            }
        }
    }
    checks.push(Check::new(
        "conjugate_normalization",
        conj_ok == CONJUGATE_SAMPLES,
        format!("{conj_ok}/{CONJUGATE_SAMPLES} conjugates of J0, worst residual {conj_worst:.3e}"),
    ));

    checks.push(Check::from_result("hermitian_characterization", (|| {
        let t = hermitian_template_space(n)?;
        let f = hermitian_family_space(n)?;
        Ok((t.same_as(&f), format!("affine dimension {}", t.dim())))
    })()));
    let data = json!({
        "family_ok": family_ok,
        "normalized_count": normalized,
        "epsilon_histogram": histogram,
        "family_constraints": family.constraints(),
    });
    Ok((checks, data))
}

fn params_hash(p: &OmegaParams<Rational>) -> anyhow::Result<String> {
    let omega = build_omega(p)?;
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for v in omega.coordinates() {
        rational_to_string(&v).hash(&mut h);
    }
    Ok(format!("{:016x}", h.finish()))
}

pub fn kahler(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    let space = closed_invariant_space(n)?;
    let template = template_basis(n)?;
    let mut checks = Vec::new();
    let params = OmegaParams::<Rational>::parameter_count(n);
    checks.push(Check::new("space_dim", space.len() == params, format!("computed {}, template parameters {params}", space.len())));
    let expected = closed_forms_formula(n);
    checks.push(Check::new("expected_dim", space.len() == expected, format!("computed {}, formula {expected}", space.len())));
    let spans = all_in_span(&space, &template) && all_in_span(&template, &space);
    checks.push(Check::new("template_span", spans, "solver basis and template span the same space"));

    let mut rng = ctx.rng(7);
    let mut samples = vec![OmegaParams::mu_only(n, Rational::from_i64(1))];
    for _ in 0..KAHLER_SAMPLES {
        samples.push(random_nondegenerate_params(n, &mut rng)?);
    }
    let mut records = Vec::new();
    let (mut all_ok, mut witnessed) = (true, true);
    for p in &samples {
        let cert = certify_pseudo_kahler(p)?;
        all_ok &= cert.ok();
        witnessed &= cert.witness.is_some() && !cert.flat;
        records.push(json!({
            "params_hash": params_hash(p)?,
            "nondegenerate": true,
            "ricci_zero": cert.ricci_zero,
            "flat": cert.flat,
            "witness": cert.witness,
            "signature": cert.signature,
        }));
    }
    checks.push(Check::new(
        "ricci_flat",
        all_ok,
        format!("{} metrics symmetric, Hermitian, Ricci = 0 by both routes", samples.len()),
    ));
    checks.push(Check::new("not_flat", witnessed, "nonzero R(e1, f1) component for every sample"));
    let data = json!({
        "space_dim": space.len(),
        "expected_dim": expected,
        "samples": records,
    });
    Ok((checks, data))
}

fn random_rational_metric(n: usize, rng: &mut impl rand::Rng) -> Matrix<Rational> {
    let d = 4 * n + 2;
    loop {
        let mut m = Matrix::zeros(d, d);
        for r in 0..d {
            for c in r..d {
                let v = thn_core::q(rng.gen_range(-3..=3), rng.gen_range(1..=3));
                m[(r, c)] = v.clone();
                m[(c, r)] = v;
            }
        }
        if m.rank(0.0) == d {
            return m;
        }
    }
}

pub fn curvature(ctx: &Ctx) -> Suite {
    let n = ctx.n;
    let g = build_thn(n)?;
    let (s, source) = match &ctx.metric {
        Some(path) => (read_metric(path)?.matrix, "file"),
        None => (random_rational_metric(n, &mut ctx.rng(8)), "random"),
    };
    let rep = analyze(&g, &s, 0.0)?;
    let mut checks = vec![
        Check::new("connection", rep.connection_ok, "torsion-free and metric"),
        Check::new("bianchi", rep.bianchi_ok, "first Bianchi identity and antisymmetry"),
        Check::new("ricci_routes", rep.routes_agree, "Riemann trace equals the nilpotent formula"),
    ];
    if ctx.metric.is_none() {
        let p = pairing_metric::<Rational>(n)?;
        let flat = analyze(&g, p.matrix(), 0.0)?;
        checks.push(Check::new("pairing_flat", flat.flat && flat.routes_agree, ""));
    }
    let data = json!({
        "source": source,
        "connection_ok": rep.connection_ok,
        "bianchi_ok": rep.bianchi_ok,
        "ricci": rat_rows(&rep.ricci),
        "signature": signature(&s),
        "flat": rep.flat,
    });
    Ok((checks, data))
}
