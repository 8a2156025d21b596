use bjss_core::bell::{self, optimal_phases, PhaseSettings};
use bjss_core::closed_form::{self, approx_ratio_table, ApproxId};
use bjss_core::critical::{trace_curve, Axis, SolverConfig};
use bjss_core::fock::{self, LocalProjector, TruncationPolicy};
use bjss_core::reproduce::{self, ReproduceOptions};
use bjss_core::{FormulaSource, ImperfectionParams, InequalityKind, Sign, Site};
use serde::Serialize;

use crate::args::{
    ApproxOpts, AxisArg, CurveOpts, Format, MarginOpts, PhaseOpts, ProbabilitiesOpts, ReproduceOpts,
};
use crate::output::{resolve, sink, write_rows, OUT_DIR_ENV};
use crate::Failure;

fn angle(v: f64, degrees: bool) -> f64 {
    if degrees {
        v.to_radians()
    } else {
        v
    }
}

#[derive(Serialize)]
struct ProbabilityRow {
    quantity: &'static str,
    source: FormulaSource,
    eta: f64,
    l: f64,
    alpha2: f64,
    delta: f64,
    n_c: Option<usize>,
    n_d: Option<usize>,
    value: f64,
    abs_dev_oracle: f64,
}

pub fn probabilities(o: &ProbabilitiesOpts) -> Result<(), Failure> {
    let prm = ImperfectionParams::new(o.point.eta, o.point.l, o.point.alpha2)?;
    let delta = angle(o.delta, o.degrees);
    let default_n = prm.arriving_mean().round().max(1.0) as usize;
    let (n_c, n_d) = (o.nc.unwrap_or(default_n), o.nd.unwrap_or(default_n));
    let policy = match o.nmax {
        Some(n) => TruncationPolicy::new(n, TruncationPolicy::DEFAULT_TAIL)?,
        None => TruncationPolicy::for_mean(prm.arriving_mean()),
    };
    let state = fock::imperfect_state(&prm)?;
    let a = state.reference_amp;

    let single_n = |source: FormulaSource| -> bjss_core::Result<f64> {
        match source {
            FormulaSource::Paper => closed_form::p_plus_n(&prm, n_c),
            FormulaSource::Derived => closed_form::derived_single_n(&prm, Sign::Plus, n_c),
            FormulaSource::Oracle => {
                fock::single_probability(&state, &LocalProjector::new(Site::C, Sign::Plus, n_c, delta, a)?)
            }
        }
    };
    type Eval<'a> = Box<dyn Fn(FormulaSource) -> bjss_core::Result<f64> + 'a>;
    let quantities: [(&'static str, Option<usize>, Option<usize>, Eval); 4] = [
        ("p_plus_n", Some(n_c), None, Box::new(single_n)),
        (
            "p_joint_n",
            Some(n_c),
            Some(n_d),
            Box::new(|s| closed_form::p_joint_n(&prm, n_c, n_d, delta, s)),
        ),
        ("p_plus", None, None, Box::new(|s| closed_form::summed_p_plus(&prm, s, &policy).map(|c| c.value))),
        (
            "p_joint",
            None,
            None,
            Box::new(|s| closed_form::summed_p_joint(&prm, delta, s, &policy).map(|c| c.value)),
        ),
    ];
    let mut rows = Vec::new();
    for (quantity, qc, qd, eval) in &quantities {
        let oracle = eval(FormulaSource::Oracle)?;
        for source in FormulaSource::ALL {
            let value = eval(source)?;
            rows.push(ProbabilityRow {
                quantity,
                source,
                eta: prm.eta,
                l: prm.l,
                alpha2: prm.alpha2,
                delta,
                n_c: *qc,
                n_d: *qd,
                value,
                abs_dev_oracle: (value - oracle).abs(),
            });
        }
    }
    let mut w = sink(o.output.out.as_deref())?;
    write_rows(&rows, o.output.format, &mut w)?;
    Ok(())
}

/// One evaluated inequality in the fixed output schema.
#[derive(Serialize)]
struct MarginRow {
    kind: &'static str,
    source: FormulaSource,
    eta: f64,
    l: f64,
    alpha2: f64,
    phi_c: f64,
    phi_cp: f64,
    phi_d: f64,
    phi_dp: f64,
    value: f64,
    bound: f64,
    violated: bool,
}

impl MarginRow {
    fn new(kind: InequalityKind, source: FormulaSource, prm: &ImperfectionParams, s: &PhaseSettings, m: bell::Margin) -> Self {
        MarginRow {
            kind: kind.as_str(),
            source,
            eta: prm.eta,
            l: prm.l,
            alpha2: prm.alpha2,
            phi_c: s.phi_c,
            phi_cp: s.phi_c_prime,
            phi_d: s.phi_d,
            phi_dp: s.phi_d_prime,
            value: m.value,
            bound: m.bound,
            violated: m.violated,
        }
    }
}

fn user_phases(p: &PhaseOpts) -> Result<Option<PhaseSettings>, Failure> {
    match (p.phi_c, p.phi_cp, p.phi_d, p.phi_dp) {
        (Some(c), Some(cp), Some(d), Some(dp)) => Ok(Some(PhaseSettings::new(
            angle(c, p.degrees),
            angle(cp, p.degrees),
            angle(d, p.degrees),
            angle(dp, p.degrees),
        )?)),
        _ => Ok(None),
    }
}

/// Margin at the canonical optimum; CHSH-type tests also try Daniel's phases shifted by pi.
fn best_margin(
    kind: InequalityKind,
    prm: &ImperfectionParams,
    source: FormulaSource,
) -> bjss_core::Result<(PhaseSettings, bell::Margin)> {
    let s = optimal_phases(kind);
    let m = bell::evaluate(kind, prm, &s, source)?;
    if kind.is_chsh() {
        let f = s.with_d_flipped()?;
        let mf = bell::evaluate(kind, prm, &f, source)?;
        if mf.value > m.value {
            return Ok((f, mf));
        }
    }
    Ok((s, m))
}

pub fn margin(o: &MarginOpts) -> Result<(), Failure> {
    let prm = ImperfectionParams::new(o.point.eta, o.point.l, o.point.alpha2)?;
    let (settings, m) = match user_phases(&o.phases)? {
        Some(s) => (s, bell::evaluate(o.kind, &prm, &s, o.source)?),
        None => best_margin(o.kind, &prm, o.source)?,
    };
    let row = MarginRow::new(o.kind, o.source, &prm, &settings, m);
    let mut w = sink(o.output.out.as_deref())?;
    write_rows(&[row], o.output.format, &mut w)?;
    Ok(())
}

pub fn critical_curve(o: &CurveOpts) -> Result<(), Failure> {
    let kinds = match o.kind {
        Some(k) => vec![k],
        None => vec![
            InequalityKind::WernerCh,
            InequalityKind::Ch,
            InequalityKind::Chsh,
            InequalityKind::ChMixed,
        ],
    };
    let axis = match o.axis {
        AxisArg::Eta => Axis::Eta,
        AxisArg::L => Axis::L,
    };
    let grid = o.grid.clone().map(|g| g.0).unwrap_or_else(|| {
        let lo = if axis == Axis::L { 71 } else { 70 };
        (lo..=100).map(|i| i as f64 / 100.0).collect()
    });
    let mut config = SolverConfig { alpha2: o.alpha2, ..SolverConfig::for_source(o.source) };
    if let Some(tol) = o.tol {
        config.tol = tol;
    }
    config.validate()?;
    ImperfectionParams::new(1.0, 1.0, o.alpha2)?;

    let mut rows = Vec::new();
    for kind in kinds {
        let curve = trace_curve(kind, &grid, axis, &config, o.source);
        let settings = optimal_phases(kind);
        for s in &curve.samples {
            let (eta, l) = s.point(axis);
            let prm = ImperfectionParams::new(eta.clamp(0.0, 1.0), l.clamp(0.0, 1.0), o.alpha2)?;
            let bound = kind.bound();
            let m = bell::Margin { value: bound + s.residual, bound, violated: s.residual > 0.0 };
            rows.push(MarginRow::new(kind, o.source, &prm, &settings, m));
        }
        for skip in &curve.skipped {
            eprintln!("{kind}: no threshold at {} = {}: {}", axis.as_str(), skip.x, skip.reason);
        }
    }
    let mut w = sink(o.output.out.as_deref())?;
    write_rows(&rows, o.output.format, &mut w)?;
    Ok(())
}

#[derive(Serialize)]
struct ApproxRow {
    source: &'static str,
    x: f64,
    alpha2: f64,
    ratio_shifted: f64,
    ratio_weighted: f64,
    ratio_shifted_weighted: f64,
    ratio_plain: f64,
}

pub fn approx_check(o: &ApproxOpts) -> Result<(), Failure> {
    let grid = o
        .grid
        .clone()
        .map(|g| g.0)
        .unwrap_or_else(|| vec![10.0, 20.0, 25.0, 50.0, 100.0, 200.0, 400.0, 800.0]);
    let table = approx_ratio_table(o.x, &grid)?;
    let ratio = |id: ApproxId, alpha2: f64| {
        table
            .iter()
            .find(|r| r.approx_id == id.number() && r.alpha2 == alpha2)
            .map_or(f64::NAN, |r| r.ratio)
    };
    let rows: Vec<ApproxRow> = grid
        .iter()
        .map(|&alpha2| ApproxRow {
            source: "numeric",
            x: o.x,
            alpha2,
            ratio_shifted: ratio(ApproxId::Shifted, alpha2),
            ratio_weighted: ratio(ApproxId::Weighted, alpha2),
            ratio_shifted_weighted: ratio(ApproxId::ShiftedWeighted, alpha2),
            ratio_plain: ratio(ApproxId::Plain, alpha2),
        })
        .collect();
    let mut w = sink(o.output.out.as_deref())?;
    write_rows(&rows, o.output.format, &mut w)?;
    Ok(())
}

pub fn reproduce(o: &ReproduceOpts) -> Result<(), Failure> {
    if let Some(tol) = o.tol {
        if !(tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
    }
    let opts = ReproduceOptions { source: o.source, tol: o.tol };
    let report = reproduce::run_all(&opts)?;
    for c in &report.criteria {
        println!("{}", c.line());
    }
    println!();
    println!("{:<20} {:>8} {:>12}  status", "threshold", "quoted", "computed");
    for t in &report.thresholds {
        println!(
            "{:<20} {:>7}% {:>12.7}  {}",
            t.label,
            t.quoted_percent,
            t.computed,
            if t.pass { "ok" } else { "FAIL" }
        );
    }
    let default_name = match o.format {
        Format::Csv => "ledger.csv",
        Format::Json => "ledger.json",
    };
    let path = o.out.clone().unwrap_or_else(|| default_name.into());
    let mut w = sink(Some(&path))?;
    write_rows(&report.ledger, o.format, &mut w)?;
    println!();
    for e in &report.ledger {
        println!(
            "ledger {:<28} printed {:>12.7} derived {:>12.7} {}",
            e.key,
            e.printed_value,
            e.derived_value,
            if e.agree { "agree" } else { "DIFFER" }
        );
    }
    let shown = resolve(&path);
    println!("ledger written to {} ({OUT_DIR_ENV} overrides the directory)", shown.display());

    let failed = report.criteria.iter().filter(|c| !c.pass).count()
        + report.thresholds.iter().filter(|t| !t.pass).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} reproduction checks failed")));
    }
    Ok(())
}
