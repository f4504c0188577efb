//! End-to-end acceptance suite over the shipped fixtures. Prints one line per
//! criterion and fails at the end if any of them failed.

use chernres::residues::CurrentEstimate;
use chernres_cli::report::Report;
use chernres_cli::run::{run, Options};
use chernres_cli::scenario::{parse_scenario, Scenario};
use chernres_cli::verify::verify;
use std::path::Path;
use std::time::Instant;

fn load(name: &str) -> Scenario {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{}.toml", name));
    parse_scenario(&p).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

fn timed_run(name: &str) -> (Report, f64) {
    let t = Instant::now();
    let r = run(&load(name), &Options::default()).unwrap_or_else(|e| panic!("{}: {:#}", name, e));
    (r, t.elapsed().as_secs_f64())
}

fn est<'a>(r: &'a Report, phi: &str, test: &str) -> &'a CurrentEstimate {
    &r.estimate(phi, test).unwrap_or_else(|| panic!("no estimate {} @ {}", phi, test)).estimate
}

struct Outcome {
    lines: Vec<String>,
    failed: Vec<usize>,
}

impl Outcome {
    fn record(&mut self, k: usize, pass: bool, what: String) {
        let line = format!("criterion {} {}: {}", k, if pass { "PASS" } else { "FAIL" }, what);
        println!("{}", line);
        self.lines.push(line);
        if !pass {
            self.failed.push(k);
        }
    }
}

fn rel(a: chernres::C64, b: f64) -> f64 {
    (a - b).norm() / b.abs()
}

fn main() {
    let mut out = Outcome { lines: Vec::new(), failed: Vec::new() };

    // 1. O/(z) in one variable: e1 -> 1 within 2% in under a minute
    let (one, t1) = timed_run("point-sheaf-1d");
    let e = est(&one, "e1", "bump");
    let r1 = rel(e.limit, 1.0);
    out.record(1, r1 <= 0.02 && t1 < 60.0, format!("O/(z) e1 = {:.5} (±{:.1e}), relative error {:.2e} <= 0.02, {:.1}s < 60s", e.limit.re, e.error, r1, t1));

    // 2 and 5. the Koszul complex of (z1, z2)
    let (kos, t2) = timed_run("koszul-2d");
    let e = est(&kos, "e2", "bump");
    let r2 = rel(e.limit, -1.0);
    out.record(2, r2 <= 0.05 && t2 < 1200.0, format!("Koszul e2 = {:.5} (±{:.1e}) vs -phi(0) = -1, relative error {:.2e} <= 0.05, {:.0}s < 1200s", e.limit.re, e.error, r2, t2));

    // 3. the double point O/(z^2): twice the point mass
    let (dbl, _) = timed_run("double-point-1d");
    let e = est(&dbl, "e1", "bump");
    let r3 = rel(e.limit, 2.0);
    out.record(3, r3 <= 0.05, format!("O/(z^2) e1 = {:.5} (±{:.1e}) vs 2 phi(0) = 2, relative error {:.2e} <= 0.05", e.limit.re, e.error, r3));

    // 4. O/(z1) on C^2: the integral over the line
    let (hyp, _) = timed_run("hyperplane-sheaf-2d");
    let e = est(&hyp, "e1", "bump-area2");
    let slice = hyp.cycle.first().map(|c| c.expected.re).unwrap_or(f64::NAN);
    let r4 = rel(e.limit, slice);
    out.record(4, r4 <= 0.05, format!("O/(z1) e1 = {:.5} (±{:.1e}) vs slice integral {:.5}, relative error {:.2e} <= 0.05", e.limit.re, e.error, slice, r4));

    // 5. no residue below the codimension
    let a = est(&kos, "e1", "bump-area").limit.norm();
    let b = est(&kos, "e1^2", "bump").limit.norm();
    out.record(5, a < 0.02 && b < 0.02, format!("Koszul |e1 @ 2-form| = {:.2e}, |e1^2| = {:.2e}, both < 0.02", a, b));

    // 6. the linear foliation z1 d/dz1 + 2 z2 d/dz2 against the torus integral
    let (fol, _) = timed_run("linear-foliation-2d");
    let oracle = |phi: &str| fol.oracle.iter().find(|o| o.phi == phi).map(|o| o.value).unwrap();
    let (o11, o2) = (oracle("e1^2"), oracle("e2"));
    let (f11, f2) = (est(&fol, "e1^2", "bump").limit, est(&fol, "e2", "bump").limit);
    let (r11, r22) = ((f11 - o11).norm() / o11.norm(), (f2 - o2).norm() / o2.norm());
    let oracle_ok = (o11.re - 4.5).abs() < 1e-6 && (o2.re - 1.0).abs() < 1e-6;
    out.record(
        6,
        r11 <= 0.05 && r22 <= 0.05 && oracle_ok,
        format!("foliation e1^2 = {:.5} vs {:.5}, e2 = {:.5} vs {:.5}; relative errors {:.2e}, {:.2e} <= 0.05", f11.re, o11.re, f2.re, o2.re, r11, r22),
    );

    // 7. two padded charts agree with the one-chart run
    let (two, _) = timed_run("point-sheaf-1d-two-charts");
    let (x, y) = (est(&two, "e1", "bump"), est(&one, "e1", "bump"));
    let gap = (x.limit - y.limit).norm();
    out.record(7, gap <= x.error + y.error, format!("two charts {:.6} vs one chart {:.6}: gap {:.2e} <= combined error {:.2e}", x.limit.re, y.limit.re, gap, x.error + y.error));

    // 8. transgression between two metrics on the Koszul complex
    let tr = verify(&load("koszul-2d"), "transgression", &Options::default()).unwrap();
    let c = tr.checks.iter().find(|c| c.name.contains("dη")).expect("transgression identity check");
    out.record(8, c.pass && c.value < 1e-7, format!("max |dη - (Φ2 - Φ1)| over 30 points = {:.2e} < 1e-7 ({})", c.value, c.detail));

    // 9. every invariant suite on every fixture, and cutoff independence
    let mut bad = Vec::new();
    let mut count = 0;
    for name in ["point-sheaf-1d", "double-point-1d", "point-sheaf-1d-two-charts", "hyperplane-sheaf-2d", "koszul-2d", "linear-foliation-2d"] {
        let scn = load(name);
        let suite = if scn.cover.is_some() { vec!["algebra", "cech", "connections", "vanishing"] } else { vec!["all"] };
        for s in suite {
            let r = verify(&scn, s, &Options::default()).unwrap();
            count += r.checks.len();
            bad.extend(r.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {} ({:.2e} > {:.1e})", name, c.name, c.value, c.tolerance)));
        }
    }
    let chi: Vec<_> = one.checks.iter().filter(|c| c.suite == "chi").collect();
    count += chi.len();
    bad.extend(chi.iter().filter(|c| !c.pass).map(|c| c.name.clone()));
    out.record(9, bad.is_empty() && !chi.is_empty(), format!("{} invariant checks, {} failed{}", count, bad.len(), if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }));

    if out.failed.is_empty() {
        println!("acceptance: all {} criteria passed", out.lines.len());
    } else {
        eprintln!("acceptance: failed criteria {:?}", out.failed);
        std::process::exit(1);
    }
}
