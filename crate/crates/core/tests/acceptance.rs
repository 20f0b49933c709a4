//! One PASS/FAIL line per acceptance criterion, at pinned tolerances.
//!
//! Run with `cargo test -p seer-lab-core --test acceptance -- --nocapture`
//! to see the lines; the test fails if any criterion does.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use seer_lab::classical::{self, local_bound, pnc_bound_diachronic, TwoWingGame, Q};
use seer_lab::games::{simulate, GameKind, GameSpec, Strategy};
use seer_lab::povm::{self, AxisPreset, NoisySpinSet};
use seer_lab::quantum;
use seer_lab::scenario::{joint_distribution_feasible, CorrelationTable};
use seer_lab::signet::SignedGraph;

struct Check {
    ok: bool,
    lines: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            ok: true,
            lines: Vec::new(),
        }
    }

    fn that(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.lines.push(format!("failed: {what}"));
        }
        self.ok &= ok;
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.that(
            ok,
            format!("{what}: got {got:.15}, want {want:.15} (tol {tol:e})"),
        );
    }
}

fn criterion(id: u32, name: &str, budget: Option<Duration>, body: impl FnOnce(&mut Check)) -> bool {
    let mut c = Check::new();
    let t0 = Instant::now();
    body(&mut c);
    let elapsed = t0.elapsed();
    if let Some(b) = budget {
        c.that(elapsed <= b, format!("runtime {elapsed:?} exceeds {b:?}"));
    }
    let tag = if c.ok { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] criterion {id}: {name} ({:.3} s)",
        elapsed.as_secs_f64()
    );
    for l in &c.lines {
        println!("        {l}");
    }
    c.ok
}

fn ks_cycle_bounds(c: &mut Check) {
    for n in [3usize, 5, 7, 9, 11] {
        let b = classical::ks_bound_ncycle(n).unwrap();
        let ni = n as i64;
        c.that(b.r == Q::new(ni - 1, ni), format!("R_nc({n}) = {}", b.r));
        c.that(b.s == -(ni - 2), format!("S_nc({n}) = {}", b.s));
    }
}

fn klyachko_values(c: &mut Check) {
    let k5 = quantum::klyachko_value(5).unwrap();
    c.close("R_5", k5.r, 2.0 / 5f64.sqrt(), 1e-10);
    c.close("S_5", k5.s, 5.0 - 4.0 * 5f64.sqrt(), 1e-10);
    for n in [7usize, 9, 11] {
        let k = quantum::klyachko_value(n).unwrap();
        let cs = (PI / n as f64).cos();
        c.close(&format!("R_{n}"), k.r, 2.0 * cs / (1.0 + cs), 1e-10);
        c.close(
            &format!("S_{n}"),
            k.s,
            n as f64 - 4.0 * n as f64 * cs / (1.0 + cs),
            1e-10,
        );
    }
}

fn sos_certificates(c: &mut Check) {
    for n in [5usize, 7, 9] {
        let cert = quantum::sos_certificate_klyachko(n).unwrap();
        let nf = n as f64;
        let cs = (PI / nf).cos();
        c.that(
            cert.residual < 1e-9,
            format!("KS identity residual n={n}: {:e}", cert.residual),
        );
        c.close(
            &format!("min eig B_{n}"),
            cert.extremum,
            nf - 4.0 * nf * cs / (1.0 + cs),
            1e-9,
        );
    }
    for n in [3usize, 5, 7] {
        let cert = quantum::sos_certificate_bell(n).unwrap();
        let nf = n as f64;
        c.that(
            cert.residual < 1e-9,
            format!("Bell identity residual n={n}: {:e}", cert.residual),
        );
        c.close(
            &format!("max eig B^[{n}]"),
            cert.extremum,
            nf * (4.0 * (PI / (2.0 * nf)).cos().powi(2) - 1.0),
            1e-9,
        );
    }
}

fn bell_game(c: &mut Check) {
    let lb = local_bound(&TwoWingGame::os_ring(3).unwrap()).unwrap();
    c.that(
        lb.value == Q::new(7, 9),
        format!("local bound n=3: {}", lb.value),
    );
    c.close(
        "quantum n=3",
        quantum::mermin_value(3).unwrap().r,
        5.0 / 6.0,
        1e-10,
    );
    for n in [3usize, 5, 7, 9] {
        let ni = n as i64;
        let lb = local_bound(&TwoWingGame::os_ring(n).unwrap()).unwrap();
        c.that(
            lb.value == Q::new(3 * ni - 2, 3 * ni),
            format!("local bound n={n}: {}", lb.value),
        );
        let q = quantum::mermin_value(n).unwrap().r;
        c.close(
            &format!("quantum n={n}"),
            q,
            1.0 / 3.0 + 2.0 / 3.0 * (PI / (2.0 * n as f64)).cos().powi(2),
            1e-10,
        );
    }
}

fn hardy(c: &mut Check) {
    let h = quantum::hardy_value(3f64.sqrt()).unwrap();
    c.close(
        "p_Hardy(√3)",
        h.p_hardy,
        144.0 / (27.0 + 3f64.sqrt()).powi(2),
        1e-10,
    );
    for (k, p) in h.constraints.iter().enumerate() {
        c.that(p.abs() < 1e-10, format!("zero constraint {}: {p:e}", k + 1));
    }
    let opt = quantum::hardy_optimize(0.5, 5.0, 1e-8).unwrap();
    c.close("optimized p_Hardy", opt.p_hardy, 0.17455, 2e-5);
}

fn transitivity(c: &mut Check) {
    let t = quantum::transitivity_chain_klyachko().unwrap();
    c.close("p(X1=1 | ψ2)", t.p_start, 1.0 - 2.0 / 5f64.sqrt(), 1e-10);
    c.that(t.implications_hold, "implications hold with certainty");
    let cl = quantum::clifton_check().unwrap();
    c.that(
        cl.matches_figure,
        "Clifton orthogonality graph matches the eight-ray figure",
    );
    c.that(
        cl.colorings_psi2_and_l1 == 0,
        format!("colorings with v(ψ2)=v(l1)=1: {}", cl.colorings_psi2_and_l1),
    );
    let rank = quantum::transitivity_chain_rank(7).unwrap();
    c.that(rank == 3, format!("n=7 stacked-normal rank {rank}"));
}

fn pnc(c: &mut Check) {
    let b = pnc_bound_diachronic().unwrap();
    c.that(
        b.overall == Q::new(7, 9),
        format!("PNC bound {}", b.overall),
    );
    let d = quantum::diachronic_quantum().unwrap();
    c.close("quantum diachronic", d.r, 5.0 / 6.0, 1e-10);
    c.that(
        d.obliviousness_defect < 1e-12,
        format!("obliviousness defect {:e}", d.obliviousness_defect),
    );
}

fn povm_thresholds(c: &mut Check) {
    let want = [
        (AxisPreset::Orthogonal2, 1.0 / 2f64.sqrt()),
        (AxisPreset::Orthogonal3, 1.0 / 3f64.sqrt()),
        (AxisPreset::Trine2, 3f64.sqrt() - 1.0),
        (AxisPreset::Trine3, 2.0 / 3.0),
    ];
    for (p, w) in want {
        let axes = p.axes();
        c.close(
            &format!("{} necessary", p.name()),
            povm::eta_necessary(&axes).unwrap(),
            w,
            1e-12,
        );
        c.close(
            &format!("{} sufficient", p.name()),
            povm::eta_sufficient(&axes).unwrap(),
            w,
            1e-12,
        );
        let sim = povm::simulating_povm(&axes).unwrap();
        let set = NoisySpinSet::new(axes, sim.eta).unwrap();
        c.that(
            sim.completeness_defect() < 1e-10,
            format!("{} completeness {:e}", p.name(), sim.completeness_defect()),
        );
        c.that(
            sim.marginal_defect(&set) < 1e-10,
            format!("{} marginals {:e}", p.name(), sim.marginal_defect(&set)),
        );
    }
    let orth = povm::anticorrelation_value(&AxisPreset::Orthogonal3.axes()).unwrap();
    c.close("orthogonal anti-correlation", orth.value, 0.5, 1e-10);
    c.that(
        orth.spread < 1e-10,
        format!("orthogonal spread {:e}", orth.spread),
    );
    let trine = povm::anticorrelation_value(&AxisPreset::Trine3.axes()).unwrap();
    c.close(
        "trine anti-correlation",
        trine.value,
        3f64.sqrt() / (3f64.sqrt() + 1.0),
        1e-10,
    );
    c.that(
        trine.spread < 1e-10,
        format!("trine spread {:e}", trine.spread),
    );
    c.close(
        "NC bound at 1/√2",
        povm::nc_bound_noisy(1.0 / 2f64.sqrt()).unwrap().bound,
        0.76430,
        1e-5,
    );
    c.close(
        "NC bound at √3−1",
        povm::nc_bound_noisy(3f64.sqrt() - 1.0).unwrap().bound,
        0.75598,
        1e-5,
    );
}

fn lp_oracle(c: &mut Check) {
    let mut checked = 0;
    for n in 3..=9usize {
        for mask in 0..1u64 << n {
            let g = SignedGraph::cycle(n, mask).unwrap();
            let t = CorrelationTable::from_signed_graph(&g).unwrap();
            let infeasible = !joint_distribution_feasible(&t).unwrap().is_feasible();
            let odd = mask.count_ones() % 2 == 1;
            if infeasible != odd {
                c.that(
                    false,
                    format!("n={n} mask={mask:0n$b}: LP infeasible={infeasible}, odd parity={odd}"),
                );
            }
            checked += 1;
        }
    }
    c.that(
        checked == (3..=9).map(|n| 1 << n).sum::<usize>(),
        format!("{checked} patterns checked"),
    );
}

fn monte_carlo(c: &mut Check) {
    let spec = |strategy| GameSpec {
        kind: GameKind::BipartiteOs { n: 3 },
        strategy,
        trials: 1_000_000,
        seed: 42,
    };
    let q = simulate(&spec(Strategy::Quantum)).unwrap();
    c.close("quantum expected", q.expected, 5.0 / 6.0, 1e-12);
    c.that(
        q.within_5_sigma,
        format!(
            "quantum empirical {} is {:.2}σ from 5/6",
            q.empirical, q.z_score
        ),
    );
    let f = simulate(&spec(Strategy::Foil)).unwrap();
    c.that(
        f.wins == f.trials,
        format!("foil won {} of {}", f.wins, f.trials),
    );
    let again = simulate(&spec(Strategy::Quantum)).unwrap();
    let bytes = |r| serde_json::to_string(r).unwrap();
    c.that(bytes(&q) == bytes(&again), "rerun is byte-identical");
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        criterion(
            1,
            "KS cycle bounds (1 − 1/n, −(n−2)) for n = 3..11",
            Some(secs(1)),
            ks_cycle_bounds,
        ),
        criterion(
            2,
            "Klyachko R_n and S_n from the Born rule",
            Some(secs(1)),
            klyachko_values,
        ),
        criterion(
            3,
            "SOS certificates for the KS and Bell operators",
            None,
            sos_certificates,
        ),
        criterion(
            4,
            "Bell game: 7/9 local, 5/6 quantum, ring generalization",
            None,
            bell_game,
        ),
        criterion(
            5,
            "Hardy value at √3 and golden-section optimum",
            Some(secs(1)),
            hardy,
        ),
        criterion(
            6,
            "transitivity chain, Clifton colorings, n = 7 rank",
            None,
            transitivity,
        ),
        criterion(
            7,
            "PNC bound 7/9 and quantum diachronic value 5/6",
            None,
            pnc,
        ),
        criterion(
            8,
            "noisy spin thresholds, simulating POVMs, anti-correlation",
            None,
            povm_thresholds,
        ),
        criterion(
            9,
            "LP infeasibility ⇔ odd signed-cycle parity, n ≤ 9",
            Some(secs(30)),
            lp_oracle,
        ),
        criterion(
            10,
            "Monte Carlo bipartite OS game, seed 42, 10⁶ trials",
            Some(secs(60)),
            monte_carlo,
        ),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len(), "some acceptance criteria failed");
}
