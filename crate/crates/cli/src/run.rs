//! `run` and `oracle`: residue currents, cycle and oracle comparisons.

use crate::build::{residue_kind, setup, test_form, vector_field};
use crate::report::{ChiEntry, Check, ConfigEcho, CycleEntryReport, EstimateEntry, LocalizedEntry, OracleEntry, Report};
use crate::scenario::{check_ladder, ExpectedSource, Mode, Scenario};
use anyhow::{bail, Context, Result};
use chernres::complexes::{ChiKind, SymmetricPolynomial};
use chernres::residues::*;
use chernres::C64;
use std::collections::BTreeMap;
use std::time::Instant;

/// Command-line overrides shared by all subcommands.
#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub threads: usize,
    pub tolerance_scale: f64,
    pub ladder: Option<Vec<f64>>,
    pub chi: Option<ChiKind>,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 1, threads: rayon::current_num_threads(), tolerance_scale: 1.0, ladder: None, chi: None }
    }
}

impl Options {
    /// Apply the overrides to a scenario.
    pub fn apply(&self, scn: &Scenario) -> Result<Scenario> {
        if !(self.tolerance_scale > 0.0) {
            bail!("--tolerance-scale must be positive");
        }
        let mut s = scn.clone();
        if let Some(l) = &self.ladder {
            let mut errs = Vec::new();
            check_ladder(l, "--epsilon-ladder", &mut errs);
            if let Some(e) = errs.first() {
                bail!("{}", e);
            }
            s.regulator.ladder = Some(l.clone());
        }
        if let Some(c) = self.chi {
            if s.regulator.compare_chi.as_deref() == Some(c.name()) {
                s.regulator.compare_chi = Some(s.regulator.chi.clone());
            }
            s.regulator.chi = c.name().into();
        }
        Ok(s)
    }

    pub fn echo(&self, scn: &Scenario) -> ConfigEcho {
        ConfigEcho {
            seed: self.seed,
            threads: self.threads,
            chi: scn.regulator.chi.clone(),
            compare_chi: scn.regulator.compare_chi.clone(),
            ladder: scn.ladder().values().to_vec(),
            tolerance_scale: self.tolerance_scale,
            quadrature: scn.quadrature.clone(),
        }
    }
}

/// `(-1)^{p-1}(p-1)!` when `φ = e_p`.
fn cycle_coefficient(phi: &SymmetricPolynomial) -> Option<(usize, f64)> {
    let terms: Vec<_> = phi.terms().collect();
    match terms.as_slice() {
        [(parts, c)] if parts.len() == 1 && (*c - 1.0).norm() < 1e-14 => {
            let p = parts[0];
            Some((p, (1..p).map(|k| k as f64).product::<f64>() * if p % 2 == 1 { 1.0 } else { -1.0 }))
        }
        _ => None,
    }
}

fn csv_name(phi_index: usize, test: &str) -> String {
    format!("ladder-phi{}-{}.csv", phi_index, test)
}

pub fn cycle_spec(scn: &Scenario) -> CycleSpec {
    CycleSpec {
        components: scn
            .cycle
            .iter()
            .map(|c| CycleComponent {
                geometry: match (&c.point, &c.subspace) {
                    (Some(p), _) => Geometry::Point(p.iter().map(|x| x.value()).collect()),
                    (_, Some(s)) => Geometry::CoordinateSubspace(s.iter().map(|i| i - 1).collect()),
                    _ => unreachable!("validated"),
                },
                multiplicity: c.multiplicity,
            })
            .collect(),
    }
}

/// Torus oracle for every `Φ`.
pub fn oracle_values(scn: &Scenario) -> Result<Vec<OracleEntry>> {
    let Some(o) = &scn.oracle else { return Ok(Vec::new()) };
    let v = vector_field(scn)?;
    scn.phi
        .iter()
        .zip(scn.phis())
        .map(|(name, p)| {
            let value = grothendieck_oracle(&v, &p, o.radius, o.nodes).with_context(|| format!("oracle for {}", name))?;
            Ok(OracleEntry { phi: name.clone(), radius: o.radius, nodes: o.nodes, value })
        })
        .collect()
}

/// Signed cycle pairings `(-1)^{p-1}(p-1)!⟨[Z]_p, φ⟩` for every `Φ = e_p` and test form of degree `2n - 2p`.
pub fn cycle_values(scn: &Scenario) -> Result<Vec<(String, String, usize, C64)>> {
    if scn.cycle.is_empty() {
        return Ok(Vec::new());
    }
    let n = scn.manifold.n;
    let spec = cycle_spec(scn);
    let mut out = Vec::new();
    for (name, phi) in scn.phi.iter().zip(scn.phis()) {
        let Some((p, coeff)) = cycle_coefficient(&phi) else { continue };
        for t in &scn.test_forms {
            let tf = test_form(t, n)?;
            if tf.degree().unwrap_or(0) as usize != 2 * (n - p) {
                continue;
            }
            let v = cycle_pairing(&spec.part_of_codim(n, p), &tf, &scn.quadrature)?;
            out.push((name.clone(), t.name.clone(), p, v * coeff));
        }
    }
    Ok(out)
}

pub fn run(scn: &Scenario, opts: &Options) -> Result<Report> {
    let started = Instant::now();
    let scn = opts.apply(scn)?;
    let mut report = Report::new("run", &scn.name, opts.echo(&scn));
    let n = scn.manifold.n;
    let ladder = scn.ladder();
    let chi = scn.chi();
    let main = setup(&scn, chi, None)?;
    let other = match &scn.regulator.compare_chi {
        Some(c) => Some((c.clone(), setup(&scn, ChiKind::parse(c)?, None)?)),
        None => None,
    };
    let kind = residue_kind(&scn, &main.charts[0].complex);
    let tests = scn.test_forms.iter().map(|t| Ok((t.name.clone(), test_form(t, n)?))).collect::<Result<Vec<_>>>()?;
    let phis = scn.phis();
    // one family per degree, paired with the test forms of complementary degree
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, p) in phis.iter().enumerate() {
        groups.entry(p.degree()?).or_default().push(k);
    }
    for (ell, members) in &groups {
        let sel: Vec<&(String, TestForm)> = tests.iter().filter(|(_, t)| t.degree().unwrap_or(0) as usize == 2 * (n - ell)).collect();
        if sel.is_empty() {
            continue;
        }
        let tfs: Vec<TestForm> = sel.iter().map(|(_, t)| t.clone()).collect();
        let group_phis: Vec<SymmetricPolynomial> = members.iter().map(|&k| phis[k].clone()).collect();
        let est = residue_current(&main.family(group_phis.clone())?, kind, &tfs, &ladder)
            .with_context(|| format!("residue currents of degree {}", ell))?;
        let est2 = match &other {
            Some((_, s)) => Some(residue_current(&s.family(group_phis)?, kind, &tfs, &ladder)?),
            None => None,
        };
        for (m, &k) in members.iter().enumerate() {
            for (j, (tname, _)) in sel.iter().enumerate() {
                let e = est[m][j].clone();
                let chi_check = match (&other, &est2) {
                    (Some((c, _)), Some(e2)) => {
                        let b = &e2[m][j];
                        let chk = chi_independence(&e, b);
                        report.checks.push(
                            Check::new("chi", format!("{} @ {}: {} vs {}", scn.phi[k], tname, scn.regulator.chi, c), chk.difference, chk.bound)
                                .with_detail("limits with two cutoffs agree within the sum of their error bars"),
                        );
                        Some(ChiEntry { chi: c.clone(), limit: b.limit, error: b.error, difference: chk.difference, bound: chk.bound, agree: chk.agree })
                    }
                    _ => None,
                };
                report.estimates.push(EstimateEntry { phi: scn.phi[k].clone(), test: tname.clone(), csv: csv_name(k, tname), estimate: e, chi_check });
            }
        }
    }
    for (phi, test, p, expected) in cycle_values(&scn)? {
        if let Some(e) = report.estimate(&phi, &test) {
            let limit = e.estimate.limit;
            let relative_error = (limit - expected).norm() / expected.norm().max(1e-300);
            report.cycle.push(CycleEntryReport { phi, test, codimension: p, expected, limit, relative_error });
        }
    }
    report.oracle = oracle_values(&scn)?;
    if let Some(l) = &scn.localize {
        let k = scn.phi.iter().position(|p| p == &l.phi).expect("validated");
        let t = &tests.iter().find(|(name, _)| name == &l.test).expect("validated").1;
        let nbhds: Vec<Neighborhood> =
            l.neighborhoods.iter().map(|nb| Neighborhood { center: nb.center.iter().map(|c| c.value()).collect(), inner: nb.inner, outer: nb.outer }).collect();
        let loc = localized_residue(&main.family(vec![phis[k].clone()])?, kind, t, &nbhds, &ladder)?;
        report.checks.push(
            Check::new("localize", format!("{} @ {}: components sum to the total", l.phi, l.test), loc.defect, loc.bound * opts.tolerance_scale)
                .with_detail("tolerance is the sum of the error bars"),
        );
        report.localized = Some(LocalizedEntry {
            phi: l.phi.clone(),
            test: l.test.clone(),
            components: loc.components.iter().map(|c| c.limit).collect(),
            component_errors: loc.components.iter().map(|c| c.error).collect(),
            total: loc.total.limit,
            total_error: loc.total.error,
            defect: loc.defect,
            bound: loc.bound,
        });
    }
    for x in &scn.expected {
        let name = format!("{} @ {}", x.phi, x.test);
        let target = match (x.value, x.from) {
            (Some(v), _) => Some(v.value()),
            (_, Some(ExpectedSource::Oracle)) => report.oracle.iter().find(|o| o.phi == x.phi).map(|o| o.value),
            (_, Some(ExpectedSource::Cycle)) => report.cycle.iter().find(|c| c.phi == x.phi && c.test == x.test).map(|c| c.expected),
            _ => None,
        };
        let Some(e) = report.estimate(&x.phi, &x.test) else {
            report.checks.push(Check::failed("expected", name, "no estimate for this pair"));
            continue;
        };
        let Some(target) = target else {
            report.checks.push(Check::failed("expected", name, "no target value (is Φ = e_p for a cycle target?)"));
            continue;
        };
        let gap = (e.estimate.limit - target).norm();
        let (value, what) = if x.absolute { (gap, "absolute") } else { (gap / target.norm().max(1e-300), "relative") };
        let mut detail = format!(
            "{} error of {:.6}{:+.6}i (±{:.2e}) against {:.6}{:+.6}i",
            what, e.estimate.limit.re, e.estimate.limit.im, e.estimate.error, target.re, target.im
        );
        if !x.note.is_empty() {
            detail = format!("{}; {}", detail, x.note);
        }
        if e.estimate.flagged {
            detail.push_str("; ladder flagged");
        }
        report.checks.push(Check::new("expected", name, value, x.tolerance * opts.tolerance_scale).with_detail(detail));
    }
    report.finish(started);
    Ok(report)
}

/// Oracle values only: the torus integral for foliations, the signed cycle for sheaves.
pub fn oracle(scn: &Scenario, opts: &Options) -> Result<Report> {
    let started = Instant::now();
    let scn = opts.apply(scn)?;
    let mut report = Report::new("oracle", &scn.name, opts.echo(&scn));
    match scn.mode {
        Mode::Foliation => {
            if scn.oracle.is_none() {
                bail!("scenario {} has no [oracle] section", scn.name);
            }
            report.oracle = oracle_values(&scn)?;
        }
        Mode::Sheaf => {
            if scn.cycle.is_empty() {
                bail!("scenario {} declares no [[cycle]]", scn.name);
            }
            for (phi, test, p, expected) in cycle_values(&scn)? {
                report.cycle.push(CycleEntryReport { phi, test, codimension: p, expected, limit: C64::new(f64::NAN, f64::NAN), relative_error: f64::NAN });
            }
        }
    }
    report.finish(started);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_coefficients_of_elementary_polynomials() {
        let c = |s: &str| cycle_coefficient(&SymmetricPolynomial::parse(s).unwrap());
        assert_eq!(c("e1"), Some((1, 1.0)));
        assert_eq!(c("e2"), Some((2, -1.0)));
        assert_eq!(c("e3"), Some((3, 2.0)));
        assert_eq!(c("e1^2"), None);
        assert_eq!(c("2*e2"), None);
    }
}
