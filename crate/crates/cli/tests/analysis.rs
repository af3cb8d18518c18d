use ssgraph_cli::analysis::{
    default_elements, parse_trace, run_analysis, AnalysisParams, ElementSpec, PathSpec, TermSpec,
};
use ssgraph_core::kms::{TraceKind, UNIQUE_VERDICT};
use ssgraph_core::models::{build_katsura, build_odometer, KatsuraSpec, OdometerSpec};
use ssgraph_core::ActionSystem;

fn odometer(n: &[u32]) -> ActionSystem {
    build_odometer(&OdometerSpec::new(n.to_vec()).unwrap())
}

fn params() -> AnalysisParams {
    AnalysisParams {
        box_radius: 3,
        ball_radius: 2,
        ..AnalysisParams::default()
    }
}

#[test]
fn coprime_odometer_is_aperiodic_with_unique_state() {
    let r = run_analysis(&odometer(&[2, 3]), None, &params(), None);
    assert!(r.errors.is_empty(), "{:?}", r.errors);
    let lattice = r.periodicity.unwrap();
    assert!(lattice.aperiodic);
    assert_eq!(lattice.rank, 0);
    assert_eq!(lattice.members, vec![vec![0, 0]]);
    let kms = r.kms.unwrap();
    assert!(kms.exists);
    assert_eq!(kms.verdict, UNIQUE_VERDICT);
    assert_eq!(r.perron.unwrap().integer_rho, Some(vec![2, 3]));
}

#[test]
fn equal_radices_give_rank_one() {
    let r = run_analysis(&odometer(&[2, 2]), None, &params(), None);
    let lattice = r.periodicity.unwrap();
    assert_eq!(lattice.rank, 1);
    assert_eq!(lattice.basis, vec![vec![1, -1]]);
    assert_ne!(r.kms.unwrap().verdict, UNIQUE_VERDICT);
}

#[test]
fn single_loop_katsura_is_unique() {
    let sys = build_katsura(&KatsuraSpec::new(vec![vec![2]], vec![vec![1]]).unwrap());
    let r = run_analysis(&sys, Some("katsura".into()), &params(), None);
    assert!(r.errors.is_empty());
    assert_eq!(r.kms.unwrap().verdict, UNIQUE_VERDICT);
    assert!(r.hypotheses.pseudo_free.unwrap().holds);
}

#[test]
fn haar_and_characters_on_a_periodic_odometer() {
    let sys = odometer(&[2, 2]);
    let elements = default_elements(&sys, &[vec![1, -1]], 2);
    let unitary = elements.iter().position(|e| e.label.starts_with('V')).unwrap();
    let eval = |trace: &str| {
        let r = run_analysis(&sys, None, &params(), Some((parse_trace(trace).unwrap(), elements.clone())));
        r.evaluations.unwrap().values
    };
    let haar = eval("haar");
    assert!((haar[0].re - 1.0).abs() < 1e-12);
    assert!(haar[unitary].re.abs() < 1e-12 && haar[unitary].im.abs() < 1e-12);
    let ch = eval("character:0.25");
    let z = &ch[unitary];
    assert!((z.re.hypot(z.im) - 1.0).abs() < 1e-9);
    let half = eval("mixture:0.5:0;0.5:0.5");
    assert!(half[unitary].re.abs() < 1e-9);
}

#[test]
fn vertex_projections_sum_to_one() {
    let sys = build_katsura(&KatsuraSpec::new(vec![vec![2, 1], vec![1, 2]], vec![vec![1, 1], vec![1, 1]]).unwrap());
    let mut specs = Vec::new();
    for v in 0..2 {
        specs.push(ElementSpec {
            label: format!("p{v}"),
            terms: vec![TermSpec {
                mu: PathSpec { vertex: Some(v), edges: vec![] },
                g: vec![],
                nu: PathSpec { vertex: Some(v), edges: vec![] },
                re: 1.0,
                im: 0.0,
            }],
        });
    }
    let r = run_analysis(&sys, None, &params(), Some((TraceKind::Haar, specs)));
    let total: f64 = r.evaluations.unwrap().values.iter().map(|e| e.re).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn trace_syntax() {
    assert_eq!(parse_trace("haar").unwrap(), TraceKind::Haar);
    assert_eq!(parse_trace("character:0.5,0.25").unwrap(), TraceKind::Character(vec![0.5, 0.25]));
    assert!(parse_trace("mixture:half:0").is_err());
    assert!(parse_trace("character:x").is_err());
    assert!(parse_trace("uniform").is_err());
}

#[test]
fn reports_are_byte_stable() {
    let sys = odometer(&[2, 2]);
    let a = serde_json::to_string_pretty(&run_analysis(&sys, None, &params(), None)).unwrap();
    let b = serde_json::to_string_pretty(&run_analysis(&sys, None, &params(), None)).unwrap();
    assert_eq!(a, b);
}
