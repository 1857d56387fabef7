//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nodalsim::adversary::{AttackEvent, AttackKind, AttackRates, CorruptionMode, TickAttacks};
use nodalsim::config::SimConfig;
use nodalsim::metrics::{Metric, Mode, TrialMetrics};
use nodalsim::protocol::{
    make_message, packet_risk, select_protected_subset, transmit, Classification, MessageIdSource, RiskModel,
};
use nodalsim::topology::{build_figure1, edge, generate_topology, LevelCounts};
use nodalsim::{run_experiment, ExperimentOutput};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn reduction(out: &ExperimentOutput, m: Metric) -> f64 {
    out.report.get(m).percent_change.unwrap_or(f64::NAN)
}

fn undetected_corruption(preset: &ExperimentOutput) -> Check {
    let base = SimConfig::paper_like();
    let at_preset = reduction(preset, Metric::CorruptUndetected);

    // Smallest budget whose coverage reaches 0.90; coverage only grows with
    // the budget because greedy picks are nested.
    let coverage = |budget: u32| {
        let cfg = SimConfig {
            duplication_budget: budget,
            ..base.clone()
        };
        let out = run_experiment(&cfg, None).map_err(|e| e.to_string())?;
        let c = out.corrupted_dual_coverage().ok_or("no corrupted traffic")?;
        Ok::<_, String>((c, out))
    };
    let (mut lo, mut hi) = (0u32, base.messages_per_trial);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if coverage(mid)?.0 < 0.90 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let (cov, out) = coverage(lo)?;
    let at_calibrated = reduction(&out, Metric::CorruptUndetected);
    ensure(
        at_preset >= 80.0 && (cov - 0.90).abs() <= 0.02 && (85.0..=97.0).contains(&at_calibrated),
        format!(
            "preset reduction {at_preset:.1}% (>= 80); sweep budget {lo} coverage {cov:.3} reduction {at_calibrated:.1}% (85..97); preset coverage {:.3}",
            preset.corrupted_dual_coverage().unwrap_or(f64::NAN)
        ),
    )
}

fn packet_loss(preset: &ExperimentOutput) -> Check {
    let r = reduction(preset, Metric::PacketLoss);
    let row = preset.report.get(Metric::PacketLoss);
    ensure(
        (35.0..=65.0).contains(&r),
        format!(
            "reduction {r:.1}% (35..65), means {:.2} -> {:.2}",
            row.baseline_mean, row.protocol_mean
        ),
    )
}

fn retransmissions(preset: &ExperimentOutput) -> Check {
    let r = reduction(preset, Metric::Retransmissions);
    let row = preset.report.get(Metric::Retransmissions);
    let flagged = preset.report.regressions().contains(&Metric::Retransmissions);
    ensure(
        (25.0..=60.0).contains(&r) && !flagged,
        format!(
            "reduction {r:.1}% (25..60), means {:.2} -> {:.2}, flagged {flagged}",
            row.baseline_mean, row.protocol_mean
        ),
    )
}

fn availability_and_connectivity() -> Check {
    let mut worst = (f64::INFINITY, f64::INFINITY);
    for seed in 1..=10 {
        let cfg = SimConfig {
            seed,
            ..SimConfig::paper_like()
        };
        let out = run_experiment(&cfg, None).map_err(|e| e.to_string())?;
        let a = out.report.get(Metric::Availability);
        let c = out.report.get(Metric::MeanConnectivity);
        if a.protocol_mean < a.baseline_mean || c.protocol_mean < c.baseline_mean {
            return Err(format!(
                "seed {seed}: availability {} vs {}, connectivity {} vs {}",
                a.protocol_mean, a.baseline_mean, c.protocol_mean, c.baseline_mean
            ));
        }
        worst = (worst.0.min(a.delta), worst.1.min(c.delta));
    }
    Ok(format!(
        "10 seeds, smallest availability delta {:+.6}, smallest connectivity delta {:+.6}",
        worst.0, worst.1
    ))
}

fn determinism() -> Check {
    let cfg = SimConfig::paper_like();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        run_experiment(&cfg, Some(d.path())).map_err(|e| e.to_string())?;
    }
    for name in ["baseline.csv", "protocol.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        if a != b {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok("baseline.csv and protocol.csv byte-identical across two runs".into())
}

fn tap_invisibility() -> Check {
    let quiet = SimConfig {
        trials: 30,
        ..SimConfig::paper_like().without_attacks()
    };
    let tapped = SimConfig {
        rates: AttackRates {
            tap: 0.05,
            corrupt: 0.0,
            sever: 0.0,
        },
        ..quiet.clone()
    };
    let a = run_experiment(&quiet, None).map_err(|e| e.to_string())?;
    let b = run_experiment(&tapped, None).map_err(|e| e.to_string())?;
    let mut exposures = 0;
    for (x, y) in a
        .baseline
        .iter()
        .chain(&a.protocol)
        .zip(b.baseline.iter().chain(&b.protocol))
    {
        exposures += y.tapped_copies;
        let y = TrialMetrics {
            tapped_copies: x.tapped_copies,
            ..y.clone()
        };
        if *x != y {
            return Err(format!("trial {} {} differs under tapping", x.trial_index, x.mode));
        }
    }
    ensure(
        exposures > 0,
        format!("60 rows identical to the attack-free run apart from {exposures} tapped copies"),
    )
}

fn detection_completeness() -> Check {
    let t = build_figure1(true);
    let nodes = t.nodes().to_vec();
    let (mut dual_cases, mut single_cases) = (0, 0);
    for &e in t.edges() {
        let event = AttackEvent::new(AttackKind::Corrupt, e, 0, 1).unwrap();
        for &src in &nodes {
            for &dst in nodes.iter().filter(|&&d| d != src) {
                let mut ids = MessageIdSource::new();
                let p = make_message(src, dst, vec![0x5a; 64], true, &mut ids).unwrap();
                let path = t.shortest_path(src, dst).unwrap().unwrap();
                let on_primary = path.edges().any(|x| x == e);

                let mut hook = TickAttacks::new([&event], CorruptionMode::Consistent);
                let single = transmit(&t, &p, false, 3, &mut hook).unwrap();
                let expected = if on_primary {
                    Classification::DeliveredCorruptUndetected
                } else {
                    Classification::DeliveredClean
                };
                if single.classification != expected {
                    return Err(format!(
                        "single copy {src}->{dst} with {e} corrupted: {:?}",
                        single.classification
                    ));
                }
                single_cases += u32::from(on_primary);

                let mut hook = TickAttacks::new([&event], CorruptionMode::Consistent);
                let dual = transmit(&t, &p, true, 3, &mut hook).unwrap();
                if !dual.dual {
                    continue;
                }
                let hit = dual.paths_used.iter().any(|q| q.edges().any(|x| x == e));
                let expected = if hit {
                    Classification::DeliveredCorruptDetected
                } else {
                    Classification::DeliveredClean
                };
                if dual.classification != expected {
                    return Err(format!(
                        "dual copy {src}->{dst} with {e} corrupted: {:?}",
                        dual.classification
                    ));
                }
                dual_cases += u32::from(hit);
            }
        }
    }
    ensure(
        dual_cases > 0 && single_cases > 0,
        format!("{dual_cases} corrupted dual sends all detected, {single_cases} corrupted single sends all undetected"),
    )
}

fn disjointness(preset: &ExperimentOutput) -> Check {
    let dual: u64 = preset.diagnostics.iter().map(|(_, p)| p.dual_messages).sum();
    let overlaps = preset.overlapping_paths();
    ensure(
        overlaps == 0 && dual > 0,
        format!("{overlaps} overlapping pairs among {dual} dual-copy messages"),
    )
}

fn oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut edges_checked = 0;
    for _ in 0..50 {
        let counts = loop {
            let c = LevelCounts::new(
                rng.gen_range(1..=3),
                rng.gen_range(1..=3),
                rng.gen_range(1..=3),
                rng.gen_range(1..=4),
            );
            if c.n + c.u + c.l + c.o <= 12 {
                break c;
            }
        };
        let mut t = generate_topology(counts, rng.gen_range(0.0..0.6), rng.gen()).unwrap();
        for e in t.edges().to_vec() {
            if rng.gen_bool(0.15) {
                t.sever_edge(e).unwrap();
            }
        }
        for &e in t.edges() {
            let fast = t.edge_criticality(e).unwrap();
            let slow = common::bfs_criticality(&t, e);
            if fast != slow {
                return Err(format!("criticality of {e}: {fast} vs brute force {slow}"));
            }
            edges_checked += 1;
        }
    }

    let t = generate_topology(LevelCounts::new(2, 3, 3, 6), 0.3, 5).unwrap();
    let outer: Vec<_> = t
        .nodes()
        .iter()
        .copied()
        .filter(|n| n.to_string().starts_with('O'))
        .collect();
    let mut subsets_checked = 0;
    for round in 0..40 {
        let mut rm = RiskModel::zero();
        for &e in t.edges() {
            rm = rm.with_edge(e, f64::from(rng.gen_range(0..4u8)) * 0.5).unwrap();
        }
        let n = rng.gen_range(1..=12);
        let mut ids = MessageIdSource::new();
        let candidates: Vec<_> = (0..n)
            .map(|_| {
                let s = rng.gen_range(0..outer.len());
                let d = (s + rng.gen_range(1..outer.len())) % outer.len();
                let p = make_message(outer[s], outer[d], vec![round as u8], false, &mut ids).unwrap();
                let path = t.shortest_path(p.src, p.dst).unwrap().unwrap();
                (p, path)
            })
            .collect();
        let risks: Vec<f64> = candidates.iter().map(|(p, path)| packet_risk(p, path, &rm)).collect();
        let budget = rng.gen_range(0..=n + 1);
        let k = budget.min(n);
        let chosen = select_protected_subset(&candidates, budget, &rm).unwrap();
        let greedy: f64 = candidates
            .iter()
            .zip(&risks)
            .filter(|((p, _), _)| chosen.contains(&p.key))
            .map(|(_, r)| r)
            .sum();
        let best = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| risks[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        if chosen.len() != k || greedy != best {
            return Err(format!(
                "greedy picked {} worth {greedy}, best {k}-subset worth {best}",
                chosen.len()
            ));
        }
        subsets_checked += 1;
    }

    let cut = build_figure1(false).severed(edge("N1-N2")).unwrap();
    let ratio = cut.connectivity_ratio().unwrap();
    ensure(
        ratio == Ratio::new(32, 72),
        format!("{edges_checked} edges on 50 topologies, {subsets_checked} greedy selections, figure1 cut connectivity {ratio}"),
    )
}

fn conservation(preset: &ExperimentOutput) -> Check {
    for row in preset.baseline.iter().chain(&preset.protocol) {
        row.check_invariants()?;
    }
    Ok(format!(
        "{} rows satisfy the sum identity and availability formula",
        preset.baseline.len() * 2
    ))
}

fn degeneracy() -> Check {
    let cfg = SimConfig {
        duplication_budget: 0,
        critical_fraction: 0.0,
        ..SimConfig::paper_like()
    };
    let out = run_experiment(&cfg, None).map_err(|e| e.to_string())?;
    for (b, p) in out.baseline.iter().zip(&out.protocol) {
        let b = TrialMetrics {
            mode: Mode::Protocol,
            ..b.clone()
        };
        if b != *p {
            return Err(format!("trial {} differs", b.trial_index));
        }
    }
    Ok(format!("{} paired trials metric-identical", out.baseline.len()))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let preset = match run_experiment(&SimConfig::paper_like(), None) {
        Ok(out) => out,
        Err(e) => {
            println!("preset run failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<Criterion> = vec![
        (
            "undetected corruption reduction",
            Box::new(|| undetected_corruption(&preset)),
        ),
        ("packet loss reduction", Box::new(|| packet_loss(&preset))),
        ("retransmission reduction", Box::new(|| retransmissions(&preset))),
        ("availability and connectivity", Box::new(availability_and_connectivity)),
        ("determinism", Box::new(determinism)),
        ("tap invisibility", Box::new(tap_invisibility)),
        ("detection completeness", Box::new(detection_completeness)),
        ("path disjointness", Box::new(|| disjointness(&preset))),
        ("oracle equivalences", Box::new(oracles)),
        ("conservation", Box::new(|| conservation(&preset))),
        ("degeneracy", Box::new(degeneracy)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag} {name}: {detail} [{:.1}s]",
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
