//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ssgraph_core::action::{check_locally_faithful, check_pseudo_free};
use ssgraph_core::algebra::{
    expectation, is_central_on_generators, periodicity_unitary, Element, ExactElement, Monomial,
};
use ssgraph_core::kms::{simplex_summary, verify_kms, KmsState, MonomialSampler, TraceKind, VerifyParams, UNIQUE_VERDICT, EMPTY_VERDICT};
use ssgraph_core::models::{
    build_katsura, build_odometer, builtin_models, check_degenerate_property, fibonacci, gamma_bijection,
    expected_odometer_per, trivial_action_fixture, trivial_extension, vertex_swap_counterexample, DegenerateVerdict,
    KatsuraSpec, ModelKind, OdometerSpec,
};
use ssgraph_core::periodicity::{
    cycline_triples, is_cycline, periodicity_group, periodicity_group_with, witness_group, PeriodicityParams,
};
use ssgraph_core::perron::{
    pf_state_value, rho_kernel_contains, rho_kernel_lattice, spectral_data, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use ssgraph_core::{ActionSystem, Degree};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn odometer(n: &[u32]) -> (OdometerSpec, ActionSystem) {
    let spec = OdometerSpec::new(n.to_vec()).expect("valid odometer");
    let sys = build_odometer(&spec);
    (spec, sys)
}

fn deg(d: &[u32]) -> Degree {
    Degree::new(d.to_vec())
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn odometer_periodicity() -> Outcome {
    let params = PeriodicityParams {
        box_radius: 4,
        ball_radius: 0,
        tol: 1e-9,
    };
    let mut notes = Vec::new();
    for n in [vec![2, 2], vec![2, 3], vec![2, 4], vec![6, 2, 3]] {
        let (spec, sys) = odometer(&n);
        let start = Instant::now();
        let lat = periodicity_group(&sys, &params).map_err(|e| format!("{n:?}: {e}"))?;
        let took = start.elapsed();
        let expected = expected_odometer_per(&spec, 4);
        ensure(lat.lattice == expected, || {
            format!("{n:?}: basis {:?} expected {:?}", lat.basis(), expected.basis())
        })?;
        ensure(took < Duration::from_secs(10), || format!("{n:?} took {}", secs(took)))?;
        notes.push(format!("{n:?} rank {} in {}", lat.rank(), secs(took)));
    }
    Ok(notes.join("; "))
}

fn cross_oracle_cycline() -> Outcome {
    let start = Instant::now();
    let (spec, sys) = odometer(&[2, 4]);
    let g = sys.graph();
    let p = deg(&[2, 0]);
    let q = deg(&[0, 1]);
    let gamma = gamma_bijection(&spec, g, &p, &q).map_err(|e| e.to_string())?;
    ensure(gamma.len() == 4, || format!("gamma has {} pairs", gamma.len()))?;
    let mut found = BTreeSet::new();
    for mu in g.paths_of_degree(&p, None, None) {
        for nu in g.paths_of_degree(&q, None, None) {
            if is_cycline(&sys, &mu, sys.identity(), &nu).map_err(|e| e.to_string())?.verdict {
                found.insert((mu.clone(), nu));
            }
        }
    }
    let expected: BTreeSet<_> = gamma.into_iter().collect();
    ensure(found == expected, || format!("{} cycline pairs, expected the 4 gamma pairs", found.len()))?;
    let triples = cycline_triples(&sys, &p, &q, &[sys.identity()]).map_err(|e| e.to_string())?;
    let from_search: BTreeSet<_> = triples.into_iter().map(|(mu, _, nu)| (mu, nu)).collect();
    ensure(from_search == expected, || "partner search disagrees".into())?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {}", secs(took)))?;
    Ok(format!("4 pairs, exhaustive and partner search agree, {}", secs(took)))
}

fn perron_data() -> Outcome {
    let fib = fibonacci();
    let pd = spectral_data(fib.graph(), DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    ensure((pd.rho[0] - phi).abs() < 1e-9, || format!("rho {}", pd.rho[0]))?;
    let x0 = phi / (phi + 1.0);
    let x = [x0, 1.0 - x0];
    for (a, b) in pd.x.iter().zip(x) {
        ensure((a - b).abs() < 1e-9, || format!("x {:?} expected {x:?}", pd.x))?;
    }
    let mut systems: Vec<(String, ActionSystem)> =
        builtin_models().into_iter().map(|m| (m.name, m.system)).collect();
    systems.push(("vertex swap".into(), vertex_swap_counterexample()));
    let mut worst = 0.0f64;
    for (name, sys) in &systems {
        let pd = spectral_data(sys.graph(), DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| format!("{name}: {e}"))?;
        let r = pd.residuals.iter().cloned().fold(0.0, f64::max);
        ensure(r < 1e-9, || format!("{name}: residual {r:e}"))?;
        worst = worst.max(r);
        for d in Degree::splat(sys.k(), 2).below() {
            let total: f64 = sys
                .graph()
                .paths_of_degree(&d, None, None)
                .iter()
                .map(|mu| pf_state_value(&pd, mu))
                .sum();
            ensure((total - 1.0).abs() < 1e-9, || format!("{name}: mass {total} at degree {d}"))?;
        }
    }
    Ok(format!(
        "Fibonacci rho {:.12}; {} models, max residual {worst:.1e}",
        pd.rho[0],
        systems.len()
    ))
}

fn periodicity_unitaries() -> Outcome {
    let (_, sys) = odometer(&[2, 2]);
    let group = witness_group(&sys, 1).map_err(|e| e.to_string())?;
    let v: ExactElement =
        periodicity_unitary(&sys, &deg(&[1, 0]), &deg(&[0, 1]), &group).map_err(|e| e.to_string())?;
    let v_star = v.adjoint(&sys).map_err(|e| e.to_string())?;
    let one = ExactElement::identity(&sys);
    let mul = |a: &ExactElement, b: &ExactElement| a.multiply(&sys, b).map_err(|e| e.to_string());
    ensure(mul(&v, &v_star)?.equivalent(&sys, &one), || "V V* != 1".into())?;
    ensure(mul(&v_star, &v)?.equivalent(&sys, &one), || "V* V != 1".into())?;
    ensure(is_central_on_generators(&sys, &v).map_err(|e| e.to_string())?, || {
        "V is not central on generators".into()
    })?;
    let v2: ExactElement =
        periodicity_unitary(&sys, &deg(&[2, 0]), &deg(&[0, 2]), &group).map_err(|e| e.to_string())?;
    ensure(mul(&v, &v)?.equivalent(&sys, &v2), || "V^2 != V_{(2,0),(0,2)}".into())?;
    Ok(format!("V has {} terms; unitary, central, V^2 matches", v.len()))
}

fn kms_identity() -> Outcome {
    let start = Instant::now();
    let params = PeriodicityParams::default();
    let verify = VerifyParams {
        exhaustive_degree: 1,
        random_degree: 2,
        samples: 500,
        seed: 7,
        ball_radius: 1,
        tol: 1e-9,
    };
    let mut notes = Vec::new();
    for (n, kind) in [
        (vec![2, 2], TraceKind::Haar),
        (vec![2, 2], TraceKind::Character(vec![0.3])),
        (vec![2, 3], TraceKind::Haar),
    ] {
        let (_, sys) = odometer(&n);
        let st = KmsState::new(&sys, &params, kind.clone()).map_err(|e| e.to_string())?;
        let report = verify_kms(&st, &sys, &verify).map_err(|e| e.to_string())?;
        ensure(report.passed, || {
            format!("{n:?} {kind:?}: deviation {:e} at {:?}", report.max_deviation, report.worst)
        })?;
        notes.push(format!("{n:?} {kind:?} {} pairs max {:.1e}", report.pairs, report.max_deviation));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {}", secs(took)))?;
    notes.push(secs(took));
    Ok(notes.join("; "))
}

fn classification() -> Outcome {
    let params = PeriodicityParams::default();
    let summary = |sys: &ActionSystem| simplex_summary(sys, &params).map_err(|e| e.to_string());
    let (_, o23) = odometer(&[2, 3]);
    let (_, o22) = odometer(&[2, 2]);
    let kat = build_katsura(&KatsuraSpec::new(vec![vec![2]], vec![vec![1]]).map_err(|e| e.to_string())?);
    let swap = vertex_swap_counterexample();
    for (name, sys) in [("odometer(2,3)", &o23), ("katsura([[2]],[[1]])", &kat)] {
        let s = summary(sys)?;
        ensure(s.exists && s.rank == 0 && s.verdict == UNIQUE_VERDICT, || format!("{name}: {s:?}"))?;
    }
    let s = summary(&o22)?;
    ensure(s.exists && s.rank == 1 && s.verdict != UNIQUE_VERDICT, || format!("odometer(2,2): {s:?}"))?;
    for m in builtin_models() {
        let s = summary(&m.system)?;
        ensure((s.verdict == UNIQUE_VERDICT) == (s.rank == 0), || format!("{}: {s:?}", m.name))?;
    }
    let s = summary(&swap)?;
    ensure(!s.exists && s.verdict == EMPTY_VERDICT, || format!("vertex swap: {s:?}"))?;
    Ok("unique for (2,3) and Katsura [[2]]/[[1]], rank 1 for (2,2), empty for the vertex swap".into())
}

fn hypotheses() -> Outcome {
    let mut count = 0;
    for m in builtin_models() {
        if matches!(m.kind, ModelKind::Fibonacci) {
            continue;
        }
        let sys = &m.system;
        let closure = sys.generator_closure().map_err(|e| e.to_string())?;
        ensure(closure.len() == 2, || format!("{}: closure size {}", m.name, closure.len()))?;
        let pf = check_pseudo_free(sys, &closure);
        ensure(pf.holds, || format!("{}: not pseudo free {:?}", m.name, pf.witness))?;
        let lf = check_locally_faithful(sys, &closure);
        ensure(lf.holds, || format!("{}: not locally faithful {:?}", m.name, lf.witness))?;
        let dg = check_degenerate_property(sys, 8).map_err(|e| e.to_string())?;
        ensure(dg == DegenerateVerdict::Yes, || format!("{}: degenerate {dg:?}", m.name))?;
        count += 1;
    }
    let fixture = trivial_action_fixture();
    let closure = fixture.generator_closure().map_err(|e| e.to_string())?;
    let pf = check_pseudo_free(&fixture, &closure);
    ensure(!pf.holds && pf.witness.is_some(), || "trivial action reported pseudo free".into())?;
    let ext = trivial_extension();
    let closure = ext.generator_closure().map_err(|e| e.to_string())?;
    let lf = check_locally_faithful(&ext, &closure);
    ensure(!lf.holds && lf.witness.is_some(), || "trivial extension reported locally faithful".into())?;
    Ok(format!("{count} built-ins hold; both negative fixtures fail with witnesses"))
}

fn structural_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (_, o22) = odometer(&[2, 2]);
    let (_, o23) = odometer(&[2, 3]);
    let params = PeriodicityParams::default();
    let mut worst = 0.0f64;
    let mut samples = 0;
    for (sys, kind) in [(&o22, TraceKind::Character(vec![0.3])), (&o23, TraceKind::Haar)] {
        let st = KmsState::new(sys, &params, kind).map_err(|e| e.to_string())?;
        let sampler = MonomialSampler::new(sys, 2, 1).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let a: Element = sampler.sample_element(sys, &mut rng, 6).map_err(|e| e.to_string())?;
            let ea = expectation(sys, &a).map_err(|e| e.to_string())?;
            let eea = expectation(sys, &ea).map_err(|e| e.to_string())?;
            ensure(ea == eea, || "expectation is not idempotent".into())?;
            let d = (st.evaluate(sys, &a).map_err(|e| e.to_string())?
                - st.evaluate(sys, &ea).map_err(|e| e.to_string())?)
            .norm();
            worst = worst.max(d);
            samples += 1;
        }
    }
    ensure(worst < 1e-9, || format!("phi - phi E deviation {worst:e}"))?;

    let mut identities = 0;
    let group = witness_group(&o22, 1).map_err(|e| e.to_string())?;
    for (m, n) in [(deg(&[1, 0]), deg(&[0, 1])), (deg(&[2, 0]), deg(&[0, 2])), (deg(&[2, 1]), deg(&[1, 2]))] {
        let v: ExactElement = periodicity_unitary(&o22, &m, &n, &group).map_err(|e| e.to_string())?;
        for (t, _) in v.terms() {
            let lhs = ExactElement::from_monomial(Monomial::projection(&t.mu))
                .multiply(&o22, &v)
                .map_err(|e| e.to_string())?;
            let rhs = v
                .multiply(&o22, &ExactElement::from_monomial(Monomial::projection(&t.nu)))
                .map_err(|e| e.to_string())?;
            let mono = ExactElement::from_monomial(t.clone());
            ensure(lhs.equivalent(&o22, &mono) && rhs.equivalent(&o22, &mono), || {
                format!("P_mu V != monomial != V P_nu at {t:?}")
            })?;
            identities += 1;
        }
    }

    let mut pairs = 0;
    let small = PeriodicityParams {
        box_radius: 2,
        ball_radius: 1,
        tol: 1e-9,
    };
    for model in builtin_models() {
        let sys = &model.system;
        let lat = periodicity_group(sys, &small).map_err(|e| format!("{}: {e}", model.name))?;
        let group = witness_group(sys, small.ball_radius).map_err(|e| e.to_string())?;
        for z in &lat.members {
            let (p, q) = ssgraph_core::periodicity::split(z);
            for (mu, _, nu) in cycline_triples(sys, &p, &q, &group).map_err(|e| e.to_string())? {
                let a = ExactElement::from_monomial(Monomial::projection(&mu));
                let b = ExactElement::from_monomial(Monomial::projection(&nu));
                ensure(a.equivalent(sys, &b), || format!("{}: s_mu s_mu* != s_nu s_nu*", model.name))?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{samples} random elements, max |phi - phi E| {worst:.1e}; {identities} exact P V identities; {pairs} cycline projection pairs"
    ))
}

fn lattice_containment() -> Outcome {
    let params = PeriodicityParams::default();
    let mut notes = Vec::new();
    for m in builtin_models() {
        let sys = &m.system;
        let pd = spectral_data(sys.graph(), DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
        let lat = periodicity_group_with(sys, &pd, &params).map_err(|e| format!("{}: {e}", m.name))?;
        let kernel = rho_kernel_lattice(&pd, params.box_radius, params.tol);
        for b in lat.basis() {
            ensure(kernel.contains(b) && rho_kernel_contains(&pd, b, params.tol), || {
                format!("{}: basis vector {b:?} outside the rho kernel", m.name)
            })?;
        }
        notes.push(format!("{} rank {}", m.name, lat.rank()));
    }
    Ok(notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("odometer periodicity lattices", odometer_periodicity),
        ("cross-oracle cycline check", cross_oracle_cycline),
        ("Perron data", perron_data),
        ("periodicity unitaries", periodicity_unitaries),
        ("KMS identity", kms_identity),
        ("classification endpoints", classification),
        ("hypothesis validators", hypotheses),
        ("structural identities", structural_identities),
        ("lattice containment", lattice_containment),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {} {name} [{}]: {detail}", i + 1, secs(start.elapsed())),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} [{}]: {why}", i + 1, secs(start.elapsed()));
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
