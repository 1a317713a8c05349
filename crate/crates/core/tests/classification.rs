use std::time::{Duration, Instant};

use slspec_core::classifier::{classify_endpoint, deficiency_indices, ClassifierConfig, Verdict};
use slspec_core::extensions::friedrichs_from_reports;
use slspec_core::model::Side;
use slspec_core::oracles::catalog;
use slspec_core::{cx, Condition};

fn verdicts(name: &str, params: &[(&str, f64)]) -> [Verdict; 2] {
    let cp = catalog::<f64>(name, params).unwrap();
    let cfg = ClassifierConfig::default();
    [Side::Left, Side::Right].map(|side| {
        let t = Instant::now();
        let r = classify_endpoint(&cp.problem, side, cx(0.0, 1.0), &cfg).unwrap();
        assert!(t.elapsed() < Duration::from_secs(5), "{name} {side}: {:?}", t.elapsed());
        r.verdict
    })
}

#[test]
fn catalog_table() {
    use Verdict::{LimitCircle as Lc, LimitPoint as Lp};
    assert_eq!(verdicts("bessel", &[("gamma", 0.5)]), [Lc, Lp]);
    assert_eq!(verdicts("bessel", &[("gamma", 1.3)])[0], Lp);
    assert_eq!(verdicts("legendre", &[]), [Lc, Lc]);
    for beta in [0.5, 1.0, 1.5] {
        assert_eq!(verdicts("laguerre", &[("beta", beta)]), [Lc, Lp], "beta = {beta}");
    }
    assert_eq!(verdicts("regular_free", &[]), [Lc, Lc]);
}

#[test]
fn friedrichs_follows_classification() {
    let cp = catalog::<f64>("laguerre", &[("beta", 0.5)]).unwrap();
    let cfg = ClassifierConfig::default();
    let l = classify_endpoint(&cp.problem, Side::Left, cx(0.0, 1.0), &cfg).unwrap();
    let r = classify_endpoint(&cp.problem, Side::Right, cx(0.0, 1.0), &cfg).unwrap();
    assert_eq!(deficiency_indices(&l, &r).unwrap(), 1);
    let f: Condition = friedrichs_from_reports(&l, &r).unwrap();
    assert!(f.retains(Side::Left) && !f.retains(Side::Right));
}
