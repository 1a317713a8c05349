use proptest::prelude::*;
use slspec_cli::spec::{Axis, BcSpec, Command, ProblemSpec, Tolerances, ZPoints};
use slspec_cli::{execute, parse_spec, render, RunSpec};
use slspec_core::model::Side;

const PI: f64 = std::f64::consts::PI;

fn problem() -> impl Strategy<Value = (ProblemSpec, bool)> {
    // (problem, right end limit circle)
    prop_oneof![
        Just((ProblemSpec { name: "legendre".into(), gamma: None, beta: None }, true)),
        Just((ProblemSpec { name: "regular_free".into(), gamma: None, beta: None }, true)),
        (0.0..0.99f64).prop_map(|g| (ProblemSpec { name: "bessel".into(), gamma: Some(g), beta: None }, false)),
        (0.01..1.99f64).prop_map(|b| (ProblemSpec { name: "laguerre".into(), gamma: None, beta: Some(b) }, false)),
    ]
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

fn axis() -> impl Strategy<Value = Axis> {
    (-5.0..5.0f64, -5.0..5.0f64, 1usize..6).prop_map(|(start, stop, count)| Axis { start, stop, count })
}

fn command(lc_right: bool) -> BoxedStrategy<Command> {
    let angle = 0.0..PI;
    let right_angle = move || proptest::option::of(0.0..PI).prop_map(move |b| if lc_right { b } else { None });
    let points = prop_oneof![
        proptest::collection::vec((-5.0..5.0f64, 0.1..5.0f64), 1..5).prop_map(ZPoints::List),
        (axis(), axis()).prop_map(|(re, im)| ZPoints::Grid { re, im }),
    ];
    let window = (-10.0..10.0f64, 0.1..30.0f64).prop_map(|(lo, w)| (lo, lo + w));
    let separated = (angle.clone(), right_angle()).prop_map(move |(a, b)| BcSpec::Separated {
        alpha: Some(a),
        beta: if lc_right { Some(b.unwrap_or(0.0)) } else { None },
    });
    let bc = prop_oneof![Just(BcSpec::Friedrichs), separated];
    let mut options = vec![
        (side(), proptest::option::of((-3.0..3.0f64, -3.0..3.0f64))).prop_map(|(endpoint, z)| Command::Classify { endpoint, z }).boxed(),
        (bc, window, proptest::option::of(2usize..1000)).prop_map(|(bc, window, panels)| Command::Spectrum { bc, window, panels }).boxed(),
        (angle, right_angle(), points).prop_map(|(alpha, beta, points)| Command::Mscan { alpha, beta, points }).boxed(),
    ];
    // the left end of every catalog problem here is limit circle
    options.push(Just(Command::Bvals { endpoint: Side::Left }).boxed());
    if lc_right {
        options.push(Just(Command::Bvals { endpoint: Side::Right }).boxed());
    }
    proptest::strategy::Union::new(options).boxed()
}

fn run_spec() -> impl Strategy<Value = RunSpec> {
    problem().prop_flat_map(|(p, lc_right)| {
        (
            Just(p),
            command(lc_right),
            proptest::option::of("[a-z]{1,8}\\.csv"),
            proptest::option::of(1e-14..1e-6f64),
            proptest::option::of(1e-16..1e-8f64),
        )
            .prop_map(|(problem, command, output, rel_tol, abs_tol)| RunSpec {
                problem,
                command,
                output,
                tolerances: Tolerances { rel_tol, abs_tol },
            })
    })
}

proptest! {
    #[test]
    fn parse_inverts_render(spec in run_spec()) {
        let text = render(&spec);
        prop_assert_eq!(parse_spec(&text), Ok(spec), "{}", text);
    }

    #[test]
    fn render_is_a_fixed_point(spec in run_spec()) {
        let text = render(&spec);
        prop_assert_eq!(render(&parse_spec(&text).unwrap()), text);
    }
}

#[test]
fn identical_specs_give_identical_bytes() {
    let text = "[problem]\nname = \"laguerre\"\nbeta = 0.5\n[command]\nkind = \"mscan\"\nre = [-1, 1, 3]\nim = [0.5, 2, 2]\n";
    let spec = parse_spec(text).unwrap();
    let a = execute(&spec).unwrap();
    let b = execute(&parse_spec(&render(&spec)).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 7);
}
