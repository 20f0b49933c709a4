use std::path::Path;

use serde_json::{json, Value};

use seer_lab::classical::{self, local_bound, pnc_bound_diachronic, q_to_f64, TwoWingGame};
use seer_lab::games::{self, GameKind, GameSpec, SeerState, Strategy};
use seer_lab::numkit::vec3::V3;
use seer_lab::povm::{self, AxisPreset};
use seer_lab::quantum::{self, hardy_value};
use seer_lab::signet::{check_implication_chain, DirectedImplicationGraph, SignedGraph};

use crate::report::{num, opt_num, Report, Row};
use crate::CliError;

type Out = Result<Report, CliError>;

fn row(pairs: Vec<(&str, Value)>) -> Row {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn verdict(passed: Option<bool>) -> Value {
    json!(match passed {
        Some(true) => "passed",
        Some(false) => "failed",
        None => "none",
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    #[value(name = "ks_ncycle")]
    KsNcycle,
    #[value(name = "bell_ring")]
    BellRing,
    #[value(name = "odd_cycle")]
    OddCycle,
    #[value(name = "pnc")]
    Pnc,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::KsNcycle => "ks_ncycle",
            Family::BellRing => "bell_ring",
            Family::OddCycle => "odd_cycle",
            Family::Pnc => "pnc",
        }
    }
}

pub fn bounds(family: Family, n: Option<usize>) -> Out {
    let n = n.unwrap_or(match family {
        Family::KsNcycle => 5,
        _ => 3,
    });
    let mut args = Row::new();
    args.insert("family".into(), json!(family.name()));
    if family != Family::Pnc {
        args.insert("n".into(), json!(n));
    }
    let mut report = Report::new("bounds", args);

    let (classical, exact, quantum, extra, cert): (
        f64,
        String,
        Option<f64>,
        Vec<(&str, Value)>,
        Option<(bool, f64)>,
    ) = match family {
        Family::KsNcycle => {
            let ks = classical::ks_bound_ncycle(n)?;
            // three rays with consecutive ones orthogonal admit no violation
            let (q, s_q, cert) = if n >= 5 {
                let k = quantum::klyachko_value(n)?;
                let c = quantum::sos_certificate_klyachko(n)?;
                (Some(k.r), Some(k.s), Some((c.passed, c.residual)))
            } else {
                (None, None, None)
            };
            let extra = vec![("s_classical", json!(ks.s)), ("s_quantum", opt_num(s_q))];
            (q_to_f64(ks.r), ks.r.to_string(), q, extra, cert)
        }
        Family::BellRing => {
            let lb = local_bound(&TwoWingGame::os_ring(n)?)?;
            let m = quantum::mermin_value(n)?;
            let c = quantum::sos_certificate_bell(n)?;
            let extra = vec![("s_quantum", num(m.s))];
            (
                lb.to_f64(),
                lb.value.to_string(),
                Some(m.r),
                extra,
                Some((c.passed, c.residual)),
            )
        }
        Family::OddCycle => {
            let lb = local_bound(&TwoWingGame::odd_cycle(n)?)?;
            let q = quantum::odd_cycle_game_value(n)?;
            (lb.to_f64(), lb.value.to_string(), Some(q), vec![], None)
        }
        Family::Pnc => {
            let pnc = pnc_bound_diachronic()?;
            let d = quantum::diachronic_quantum()?;
            let extra = vec![("obliviousness_defect", num(d.obliviousness_defect))];
            (
                q_to_f64(pnc.overall),
                pnc.overall.to_string(),
                Some(d.r),
                extra,
                Some((d.obliviousness_defect < 1e-12, d.obliviousness_defect)),
            )
        }
    };

    let mut r = row(vec![("family", json!(family.name()))]);
    if family != Family::Pnc {
        r.insert("n".into(), json!(n));
    }
    r.insert("classical".into(), num(classical));
    r.insert("classical_exact".into(), json!(exact));
    r.insert("quantum".into(), opt_num(quantum));
    r.insert("ratio".into(), opt_num(quantum.map(|q| q / classical)));
    for (k, v) in extra {
        r.insert(k.into(), v);
    }
    r.insert("certificate".into(), verdict(cert.map(|c| c.0)));
    r.insert("certificate_residual".into(), opt_num(cert.map(|c| c.1)));
    report.rows.push(r);
    if cert.is_some_and(|c| !c.0) {
        return Err(CliError::Verify(
            format!("{} certificate failed", family.name()),
            Box::new(report),
        ));
    }
    Ok(report)
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_axes(spec: &str) -> Result<(String, Vec<V3>), CliError> {
    if let Some(p) = AxisPreset::parse(spec) {
        return Ok((p.name().to_string(), p.axes()));
    }
    let doc = read_json(Path::new(spec))?;
    let bad = || CliError::Usage(format!("{spec}: expected a JSON array of 3-vectors"));
    let axes = doc
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|v| {
            let xs = v.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
            let mut out = [0.0; 3];
            for (o, x) in out.iter_mut().zip(xs) {
                *o = x.as_f64().ok_or_else(bad)?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<V3>, CliError>>()?;
    Ok((spec.to_string(), axes))
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..1 << n)
        .map(|mask| (0..n).filter(|k| mask >> k & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.len() >= 2 || n == 1)
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub fn povm(axes_spec: &str, eta: Option<f64>) -> Out {
    let (label, axes) = parse_axes(axes_spec)?;
    let mut args = row(vec![("axes", json!(label))]);
    if let Some(e) = eta {
        args.insert("eta".into(), num(e));
    }
    let mut report = Report::new("povm", args);
    let n = axes.len();
    let mut pair_threshold = f64::INFINITY;
    for s in subsets(n) {
        let sub: Vec<V3> = s.iter().map(|&k| axes[k]).collect();
        let nec = povm::eta_necessary(&sub)?;
        let suf = povm::eta_sufficient(&sub)?;
        let sim = povm::simulating_povm(&sub)?;
        if s.len() == 2 {
            pair_threshold = pair_threshold.min(suf);
        }
        let mut r = row(vec![
            ("subset", json!(s.iter().map(|k| k + 1).collect::<Vec<_>>())),
            ("size", json!(s.len())),
            ("eta_necessary", num(nec)),
            ("eta_sufficient", num(suf)),
            ("threshold_exact", json!((nec - suf).abs() < 1e-12)),
            ("completeness_defect", num(sim.completeness_defect())),
        ]);
        if let Some(e) = eta {
            r.insert(
                "verdict".into(),
                json!(povm::joint_measurability(&sub, e)?.as_str()),
            );
        }
        report.rows.push(r);
    }

    let mut summary = Row::new();
    if n == 1 {
        summary.insert("threshold".into(), num(povm::eta_sufficient(&axes)?));
    } else {
        summary.insert("pair".into(), num(pair_threshold));
        if n == 3 {
            summary.insert("triple".into(), num(povm::eta_sufficient(&axes)?));
        }
        summary.insert("threshold".into(), num(povm::eta_sufficient(&axes)?));
        let anti = povm::anticorrelation_value(&axes)?;
        summary.insert("anticorr".into(), num(anti.value));
        summary.insert("anticorr_spread".into(), num(anti.spread));
        if n == 3 {
            let nc = povm::nc_bound_noisy(pair_threshold.min(1.0))?;
            summary.insert("nc_bound".into(), num(nc.bound));
            summary.insert(
                "explained_noncontextually".into(),
                json!(anti.value < nc.bound),
            );
        }
    }
    report.summary = Some(summary);
    Ok(report)
}

pub fn network(file: &Path, directed: bool, start: Option<usize>, value: Option<u8>) -> Out {
    let doc = read_json(file)?;
    let looks_directed = doc.get("arcs").is_some()
        || doc["edges"]
            .as_array()
            .and_then(|e| e.first())
            .and_then(|e| e.as_array())
            .is_some_and(|e| e.len() == 4);
    let mut args = row(vec![("file", json!(file.display().to_string()))]);
    if directed || looks_directed {
        let g = DirectedImplicationGraph::from_json(&doc)?;
        let start = start.unwrap_or(1);
        let value = value.unwrap_or(1);
        if start == 0 || start > g.nodes() || value > 1 {
            return Err(CliError::Usage(format!(
                "need 1 ≤ start ≤ {} and value ∈ {{0,1}}",
                g.nodes()
            )));
        }
        args.insert("directed".into(), json!(true));
        args.insert("start".into(), json!(start));
        args.insert("value".into(), json!(value));
        let mut report = Report::new("network", args);
        let out = check_implication_chain(&g, start - 1, value)?;
        for (i, s) in out.trace.iter().enumerate() {
            report.rows.push(row(vec![
                ("step", json!(i + 1)),
                (
                    "implication",
                    json!(format!(
                        "X{}={} ⇒ X{}={}",
                        s.from + 1,
                        s.from_value,
                        s.to + 1,
                        s.to_value
                    )),
                ),
                ("contrapositive", json!(s.contrapositive)),
            ]));
        }
        let conflict = out.conflict.map(|c| {
            format!(
                "X{}={} denies X{}={}",
                c.node + 1,
                c.derived,
                c.node + 1,
                c.held
            )
        });
        report.summary = Some(row(vec![
            ("nodes", json!(g.nodes())),
            ("arcs", json!(g.arcs().len())),
            ("contradiction", json!(out.contradiction)),
            (
                "conflict",
                conflict.map(Value::String).unwrap_or(Value::Null),
            ),
        ]));
        Ok(report)
    } else {
        let g = SignedGraph::from_json(&doc)?;
        let mut report = Report::new("network", args);
        let f = g.is_frustrated();
        report.rows.push(row(vec![
            ("nodes", json!(g.nodes())),
            ("edges", json!(g.edges().len())),
            ("dashed", json!(g.dashed_count())),
            ("frustrated", json!(f.frustrated)),
            (
                "witness",
                f.witness
                    .map(|w| json!(w.iter().map(|k| k + 1).collect::<Vec<_>>()))
                    .unwrap_or(Value::Null),
            ),
            (
                "valuation",
                g.valuation().map(|v| json!(v)).unwrap_or(Value::Null),
            ),
        ]));
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    #[value(name = "seer_ncycle")]
    SeerNcycle,
    #[value(name = "bipartite_os")]
    BipartiteOs,
    #[value(name = "odd_cycle")]
    OddCycle,
    #[value(name = "diachronic")]
    Diachronic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyArg {
    #[value(name = "classical_best", alias = "classical")]
    ClassicalBest,
    #[value(name = "quantum")]
    Quantum,
    #[value(name = "foil")]
    Foil,
}

impl StrategyArg {
    fn name(self) -> &'static str {
        match self {
            StrategyArg::ClassicalBest => "classical_best",
            StrategyArg::Quantum => "quantum",
            StrategyArg::Foil => "foil",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StateArg {
    #[value(name = "axis")]
    Axis,
    #[value(name = "chain")]
    Chain,
}

pub fn game(
    kind: Kind,
    n: Option<usize>,
    strategy: StrategyArg,
    trials: u64,
    seed: u64,
    state: StateArg,
) -> Out {
    let n = n.unwrap_or(match kind {
        Kind::SeerNcycle => 5,
        _ => 3,
    });
    let state = match state {
        StateArg::Axis => SeerState::Axis,
        StateArg::Chain => SeerState::ChainState,
    };
    let game_kind = match kind {
        Kind::SeerNcycle => GameKind::SeerNcycle { n, state },
        Kind::BipartiteOs => GameKind::BipartiteOs { n },
        Kind::OddCycle => GameKind::OddCycle { n },
        Kind::Diachronic => GameKind::Diachronic,
    };
    let strat = match strategy {
        StrategyArg::ClassicalBest => Strategy::ClassicalBest,
        StrategyArg::Quantum => Strategy::Quantum,
        StrategyArg::Foil => Strategy::Foil,
    };
    let mut args = row(vec![("kind", json!(game_kind.name()))]);
    if kind != Kind::Diachronic {
        args.insert("n".into(), json!(n));
    }
    args.insert("strategy".into(), json!(strategy.name()));
    if kind == Kind::SeerNcycle {
        args.insert(
            "state".into(),
            json!(if state == SeerState::Axis {
                "axis"
            } else {
                "chain"
            }),
        );
    }
    args.insert("trials".into(), json!(trials));
    let mut report = Report::new("game", args.clone());
    report.seed = Some(seed);

    let res = games::simulate(&GameSpec {
        kind: game_kind,
        strategy: strat,
        trials,
        seed,
    })?;
    let mut r = args;
    r.insert("wins".into(), json!(res.wins));
    r.insert("empirical".into(), num(res.empirical));
    r.insert("expected".into(), num(res.expected));
    r.insert("std_error".into(), num(res.std_error));
    r.insert("z_score".into(), num(res.z_score));
    r.insert("within_5_sigma".into(), json!(res.within_5_sigma));
    if let Some(d) = res.obliviousness_defect {
        r.insert("obliviousness_defect".into(), num(d));
    }
    report.rows.push(r);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    #[value(name = "klyachko_R")]
    KlyachkoR,
    #[value(name = "mermin_R")]
    MerminR,
    #[value(name = "hardy_p")]
    HardyP,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::KlyachkoR => "klyachko_R",
            Quantity::MerminR => "mermin_R",
            Quantity::HardyP => "hardy_p",
        }
    }
}

const MAX_SWEEP_POINTS: usize = 10_000;

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("range must look like A..B, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn sweep(quantity: Quantity, range: Option<&str>, step: Option<f64>) -> Out {
    let (default_range, default_step) = match quantity {
        Quantity::KlyachkoR => ("5..21", 2.0),
        Quantity::MerminR => ("3..15", 2.0),
        Quantity::HardyP => ("1..3", 0.05),
    };
    let range_text = range.unwrap_or(default_range);
    let (lo, hi) = parse_range(range_text)?;
    let step = step.unwrap_or(default_step);
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage("step must be positive".into()));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > MAX_SWEEP_POINTS {
        return Err(CliError::Usage(format!(
            "sweep of {count} points exceeds {MAX_SWEEP_POINTS}"
        )));
    }
    let params: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
    let integral = quantity != Quantity::HardyP;
    if integral
        && params
            .iter()
            .any(|p| p.fract() != 0.0 || *p < 3.0 || (*p as usize) % 2 == 0)
    {
        return Err(CliError::Usage(format!(
            "{} needs odd integer n; got range {range_text} step {step}",
            quantity.name()
        )));
    }

    let args = row(vec![
        ("quantity", json!(quantity.name())),
        ("range", json!(range_text)),
        ("step", num(step)),
    ]);
    let mut report = Report::new("sweep", args);
    let mut best: Option<(f64, f64)> = None;
    for p in params {
        let (classical, quantum) = match quantity {
            Quantity::KlyachkoR => {
                let n = p as usize;
                (1.0 - 1.0 / p, quantum::klyachko_value(n)?.r)
            }
            Quantity::MerminR => (1.0 - 2.0 / (3.0 * p), quantum::mermin_value(p as usize)?.r),
            // no local model gives the Hardy event positive probability
            Quantity::HardyP => (0.0, hardy_value(p)?.p_hardy),
        };
        if best.is_none_or(|(_, q)| quantum > q) {
            best = Some((p, quantum));
        }
        let param = if integral { json!(p as usize) } else { num(p) };
        report.rows.push(row(vec![
            ("parameter", param),
            ("classical_bound", num(classical)),
            ("quantum_value", num(quantum)),
        ]));
    }
    if let Some((p, q)) = best {
        report.summary = Some(row(vec![("argmax", num(p)), ("max_quantum_value", num(q))]));
    }
    Ok(report)
}
