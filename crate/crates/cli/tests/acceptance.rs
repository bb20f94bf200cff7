//! Acceptance suite: statistical outcome gates for the standard experiment
//! setup (75 nodes, 4 topics, 100 steps, small-world seed graphs at
//! saturation 0.15, upd_prob 0.25, unf_thresh 0.5, unf_prob 0.9,
//! friend_prob 0.05, all masks visible), 10 seeded replicas per condition.
//!
//! Each criterion prints one PASS/FAIL line (run with `--nocapture` to see
//! them on success) and asserts its threshold.

use opinet_core::engine::{run, SimConfig, SimResult, SimState};
use opinet_core::graph::NodeId;
use opinet_core::metrics::{
    component_members, detect_oscillation, detect_plateau, MetricFrame, PLATEAU_EPS, PLATEAU_WINDOW,
};
use opinet_core::opinion::Archetype;
use opinet_core::ResOverrides;

const SEED_BASE: u64 = 42;
const REPLICAS: u64 = 10;

fn base75(dist: [f64; 3], seed: u64) -> SimConfig {
    SimConfig {
        type_dist: dist,
        ..SimConfig::base(75, 4, 100, seed)
    }
}

fn run64(config: &SimConfig) -> SimResult<f64> {
    run::<f64>(config).expect("valid acceptance config")
}

fn gate(id: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

fn induced_density(state: &SimState<f64>, members: &[NodeId]) -> f64 {
    let m = members.len();
    if m < 2 {
        return 0.0;
    }
    let set: std::collections::BTreeSet<NodeId> = members.iter().copied().collect();
    let mut edges = 0usize;
    for &i in members {
        for &j in state.graph.neighbors(i).unwrap() {
            if j > i && set.contains(&j) {
                edges += 1;
            }
        }
    }
    2.0 * edges as f64 / (m * (m - 1)) as f64
}

fn archetype_members(state: &SimState<f64>, archetype: Archetype) -> Vec<NodeId> {
    (0..state.graph.node_count())
        .filter(|&i| state.agents[i].archetype == archetype)
        .map(NodeId)
        .collect()
}

fn isolate_fraction(state: &SimState<f64>, archetype: Archetype) -> f64 {
    let members = archetype_members(state, archetype);
    members
        .iter()
        .filter(|&&i| state.graph.degree(i) == 0)
        .count() as f64
        / members.len() as f64
}

fn cross_type_edges(state: &SimState<f64>, a: Archetype, b: Archetype) -> usize {
    state
        .graph
        .edges()
        .filter(|&(i, j)| {
            let (ti, tj) = (
                state.agents[i.index()].archetype,
                state.agents[j.index()].archetype,
            );
            (ti == a && tj == b) || (ti == b && tj == a)
        })
        .count()
}

fn largest_component_camp_count(frame: &MetricFrame<f64>) -> usize {
    frame
        .camps
        .iter()
        .find(|c| c.component_size == frame.largest_component())
        .map(|c| c.camps.len())
        .unwrap_or(0)
}

fn het_betweenness_late(result: &SimResult<f64>) -> f64 {
    let late: Vec<f64> = result
        .frames
        .iter()
        .filter(|f| f.t >= 50)
        .filter_map(|f| f.per_type_betweenness.het.map(|m| m.mean))
        .collect();
    late.iter().sum::<f64>() / late.len() as f64
}

#[test]
fn criterion_01_pure_hom_clusters_to_dense_consensus() {
    let mut passes = 0;
    let mut notes = Vec::new();
    for seed in SEED_BASE..SEED_BASE + REPLICAS {
        let result = run64(&base75([1.0, 0.0, 0.0], seed));
        let frame = result.frames.last().unwrap();
        let members = component_members(&result.final_state.graph);
        let non_singleton = members.iter().filter(|c| c.len() > 1).count();
        let consensus = frame
            .camps
            .iter()
            .filter(|c| c.component_size > 1)
            .all(|c| c.is_consensus());
        let density = induced_density(&result.final_state, &members[0]);
        let ok = non_singleton <= 2 && consensus && density >= 0.95;
        notes.push(format!(
            "seed {seed}: comps {non_singleton} consensus {consensus} density {density:.3}"
        ));
        if ok {
            passes += 1;
        }
    }
    gate(
        "01 pure-hom-consensus",
        passes >= 8,
        &format!("{passes}/10 replicas with <=2 non-singleton consensus components at density >= 0.95 (need >= 8) [{}]", notes.join("; ")),
    );
}

#[test]
fn criterion_02_pure_adv_plateaus_into_two_camps_or_oscillation() {
    let mut passes = 0;
    let mut notes = Vec::new();
    for seed in SEED_BASE..SEED_BASE + REPLICAS {
        let result = run64(&base75([0.0, 0.0, 1.0], seed));
        let density = result.density_series();
        let plateau = detect_plateau(&density, PLATEAU_WINDOW, PLATEAU_EPS);
        let final_density = *density.last().unwrap();
        let oscillation = detect_oscillation(&result.trajectory, 10).unwrap();
        let two_camps = largest_component_camp_count(result.frames.last().unwrap()) == 2;
        let ok = plateau && final_density < 0.95 && (oscillation || two_camps);
        notes.push(format!(
            "seed {seed}: plateau {plateau} density {final_density:.3} osc {oscillation} camps2 {two_camps}"
        ));
        if ok {
            passes += 1;
        }
    }
    gate(
        "02 pure-adv-plateau",
        passes >= 7,
        &format!("{passes}/10 replicas with density plateau (eps 0.01) below 0.95 and oscillation or a two-camp core (need >= 7) [{}]", notes.join("; ")),
    );
}

#[test]
fn criterion_03_pure_het_fully_disconnects() {
    let mut passes = 0;
    let mut notes = Vec::new();
    for seed in SEED_BASE..SEED_BASE + REPLICAS {
        let result = run64(&base75([0.0, 1.0, 0.0], seed));
        let isolates = result.frames.last().unwrap().isolate_count;
        if isolates == 75 {
            passes += 1;
        } else {
            notes.push(format!("seed {seed}: {isolates}/75 isolates"));
        }
    }
    gate(
        "03 pure-het-disconnection",
        passes == 10,
        &format!(
            "{passes}/10 replicas fully disconnected (need 10){}",
            if notes.is_empty() {
                String::new()
            } else {
                format!(" [{}]", notes.join("; "))
            }
        ),
    );
}

#[test]
fn criterion_04_resistant_het_stays_connected_below_max_density() {
    let mut passes = 0;
    let mut notes = Vec::new();
    for seed in SEED_BASE..SEED_BASE + REPLICAS {
        let mut config = base75([0.0, 1.0, 0.0], seed);
        config.res_overrides = Some(ResOverrides {
            het: Some(0.5),
            ..Default::default()
        });
        let result = run64(&config);
        let frame = result.frames.last().unwrap();
        let has_big_component = frame.component_sizes.first().copied().unwrap_or(0) >= 5;
        let density = result.density_series();
        let final_density = *density.last().unwrap();
        let plateau = detect_plateau(&density, PLATEAU_WINDOW, PLATEAU_EPS);
        let ok = has_big_component && final_density < 0.9 && plateau;
        notes.push(format!(
            "seed {seed}: largest {} density {final_density:.3} plateau {plateau}",
            frame.component_sizes.first().copied().unwrap_or(0)
        ));
        if ok {
            passes += 1;
        }
    }
    gate(
        "04 resistant-het-cohesion",
        passes >= 7,
        &format!("{passes}/10 replicas keeping a component >= 5 at plateaued density < 0.9 (need >= 7) [{}]", notes.join("; ")),
    );
}

#[test]
fn criterion_05_hom_het_mix_isolates_het_and_hom_reaches_consensus() {
    let mut passes = 0;
    let mut notes = Vec::new();
    for seed in SEED_BASE..SEED_BASE + REPLICAS {
        let result = run64(&base75([0.5, 0.5, 0.0], seed));
        let state = &result.final_state;
        let het_isolated = isolate_fraction(state, Archetype::Het);
        // Largest component containing a homophilic agent, checked for a
        // single opinion vector.
        let members = component_members(&state.graph);
        let hom_component = members.iter().find(|component| {
            component
                .iter()
                .any(|&i| state.agents[i.index()].archetype == Archetype::Hom)
        });
        let hom_consensus = hom_component.is_some_and(|component| {
            let first = state.profile.row(component[0]);
            component.iter().all(|&i| state.profile.row(i) == first)
        });
        let ok = het_isolated >= 0.8 && hom_consensus;
        notes.push(format!(
            "seed {seed}: het-isolated {het_isolated:.2} hom-consensus {hom_consensus}"
        ));
        if ok {
            passes += 1;
        }
    }
    gate(
        "05 hom-het-separation",
        passes >= 8,
        &format!("{passes}/10 replicas with >= 80% het isolates and hom cohort consensus (need >= 8) [{}]", notes.join("; ")),
    );
}

#[test]
fn criterion_06_mixed_network_sheds_het_and_separates_hom_from_adv() {
    let mut passes = 0;
    let mut notes = Vec::new();
    for seed in SEED_BASE..SEED_BASE + REPLICAS {
        let result = run64(&base75([0.7, 0.15, 0.15], seed));
        let state = &result.final_state;
        let het_isolated = isolate_fraction(state, Archetype::Het);
        let hom_adv = cross_type_edges(state, Archetype::Hom, Archetype::Adv);
        let ok = het_isolated >= 0.8 && hom_adv == 0;
        notes.push(format!(
            "seed {seed}: het-isolated {het_isolated:.2} hom-adv-edges {hom_adv}"
        ));
        if ok {
            passes += 1;
        }
    }
    gate(
        "06 three-cohort-separation",
        passes >= 7,
        &format!(
            "{passes}/10 replicas with >= 80% het isolates and zero hom-adv edges (need >= 7) [{}]",
            notes.join("; ")
        ),
    );
}

#[test]
fn criterion_07_sparse_networks_stay_fragmented() {
    let compositions: [(&str, [f64; 3]); 4] = [
        ("34-33-33", [0.34, 0.33, 0.33]),
        ("50-25-25", [0.50, 0.25, 0.25]),
        ("60-20-20", [0.60, 0.20, 0.20]),
        ("70-15-15", [0.70, 0.15, 0.15]),
    ];
    let mut all_ok = true;
    let mut notes = Vec::new();
    for (name, dist) in compositions {
        let mut passes = 0;
        for seed in SEED_BASE..SEED_BASE + REPLICAS {
            let mut config = base75(dist, seed);
            config.saturation = 0.05;
            let result = run64(&config);
            let largest = result
                .frames
                .last()
                .unwrap()
                .component_sizes
                .first()
                .copied()
                .unwrap_or(0);
            if largest <= 6 {
                passes += 1;
            }
        }
        notes.push(format!("{name}: {passes}/10"));
        all_ok &= passes >= 7;
    }
    gate(
        "07 sparse-fragmentation",
        all_ok,
        &format!(
            "largest component <= 6 in >= 7/10 replicas for every composition [{}]",
            notes.join("; ")
        ),
    );
}

#[test]
fn criterion_08_het_resistance_raises_betweenness_and_retention() {
    let mut btw_wins = 0;
    let mut iso_wins = 0;
    let mut notes = Vec::new();
    for seed in SEED_BASE..SEED_BASE + REPLICAS {
        let mut measured = Vec::new();
        for res in [0.0, 0.25] {
            let mut config = base75([0.34, 0.33, 0.33], seed);
            config.res_overrides = Some(ResOverrides {
                het: Some(res),
                ..Default::default()
            });
            let result = run64(&config);
            measured.push((
                het_betweenness_late(&result),
                isolate_fraction(&result.final_state, Archetype::Het),
            ));
        }
        let (btw_low, iso_low) = measured[0];
        let (btw_high, iso_high) = measured[1];
        if btw_high > btw_low {
            btw_wins += 1;
        }
        if iso_high < iso_low {
            iso_wins += 1;
        }
        notes.push(format!(
            "seed {seed}: btw {btw_low:.5}->{btw_high:.5} iso {iso_low:.2}->{iso_high:.2}"
        ));
    }
    gate(
        "08 het-resistance-effect",
        btw_wins >= 8 && iso_wins >= 7,
        &format!("late het betweenness higher in {btw_wins}/10 pairs (need >= 8), het isolate fraction lower in {iso_wins}/10 pairs (need >= 7) [{}]", notes.join("; ")),
    );
}

#[test]
fn criterion_09_brute_force_oracle_equivalence() {
    let reports = opinet_cli::oracle::check_all();
    let mut ok = true;
    let mut notes = Vec::new();
    for report in &reports {
        ok &= report.passed();
        notes.push(report.line());
    }
    gate("09 oracle-equivalence", ok, &notes.join("; "));
}

#[test]
fn criterion_10_runs_are_byte_reproducible() {
    use opinet_cli::{execute, ExperimentSpec};
    let config = base75([0.7, 0.15, 0.15], SEED_BASE);
    let spec = ExperimentSpec::single(config, 1, SEED_BASE);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    execute(&spec, a.path()).unwrap();
    execute(&spec, b.path()).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for file in ["metrics.csv", "trajectory.csv", "final.dot"] {
        let fa = std::fs::read(a.path().join("run/base/0").join(file)).unwrap();
        let fb = std::fs::read(b.path().join("run/base/0").join(file)).unwrap();
        let same = fa == fb;
        ok &= same;
        notes.push(format!(
            "{file}: {}",
            if same { "identical" } else { "DIFFERS" }
        ));
    }
    gate("10 determinism", ok, &notes.join("; "));
}

#[test]
fn criterion_11_unit_invariants() {
    use opinet_core::engine::{init, step};
    use opinet_core::opinion::{aggregate_opinion, pair_reward};

    let started = std::time::Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();

    // Reward ranges, complementarity, and the heterophilic peak.
    let mut reward_ok = true;
    for step_idx in 0..=1000 {
        let d = step_idx as f64 / 1000.0;
        for archetype in Archetype::ALL {
            let r = pair_reward(archetype, d);
            reward_ok &= (0.0..=1.0).contains(&r);
        }
        reward_ok &=
            (pair_reward(Archetype::Hom, d) + pair_reward(Archetype::Adv, d) - 1.0).abs() < 1e-12;
    }
    reward_ok &= pair_reward(Archetype::Het, 0.5) == 1.0
        && pair_reward(Archetype::Het, 0.0) == 0.0
        && pair_reward(Archetype::Het, 1.0) == 0.0;
    notes.push(format!(
        "reward-ranges {}",
        if reward_ok { "ok" } else { "violated" }
    ));
    ok &= reward_ok;

    // Mask validity and aggregate bounds across mixed-population runs.
    let mut state_ok = true;
    for seed in 0..5u64 {
        let config = SimConfig {
            nodes: 20,
            type_dist: [0.4, 0.3, 0.3],
            saturation: 0.3,
            steps: 10,
            ..SimConfig::base(20, 4, 10, seed)
        };
        let mut state = init::<f64>(&config).unwrap();
        for _ in 0..10 {
            step(&mut state, &config);
            for i in state.graph.nodes() {
                for j in state.graph.nodes() {
                    if i == j {
                        continue;
                    }
                    for k in 0..4 {
                        let entry = state.masks.entry(i, j, k);
                        if state.graph.has_edge(i, j) {
                            state_ok &= entry == 0 || entry == state.profile.get(i, k);
                        } else {
                            state_ok &= entry == 0;
                        }
                    }
                }
                for v in aggregate_opinion(i, &state.graph, &state.profile, &state.masks) {
                    state_ok &= (-1.0..=1.0).contains(&v);
                }
            }
        }
    }
    notes.push(format!(
        "mask-and-aggregate {}",
        if state_ok { "ok" } else { "violated" }
    ));
    ok &= state_ok;

    // The two-agent adversarial oscillator.
    let config = SimConfig {
        type_dist: [0.0, 0.0, 1.0],
        saturation: 1.0,
        generator: opinet_core::GenKind::Random,
        upd_prob: 1.0,
        unf_prob: 0.0,
        friend_prob: 0.0,
        ..SimConfig::base(2, 2, 20, 5)
    };
    let mut state = init::<f64>(&config).unwrap();
    for i in 0..2 {
        for k in 0..2 {
            state.profile.set(NodeId(i), k, 1);
            state.masks.reveal(NodeId(i), NodeId(1 - i), k, 1);
        }
    }
    let mut trajectory = vec![state.profile.rows().to_vec()];
    for _ in 0..20 {
        step(&mut state, &config);
        trajectory.push(state.profile.rows().to_vec());
    }
    let oscillates = detect_oscillation(&trajectory, 10).unwrap();
    notes.push(format!(
        "two-adv-oscillator {}",
        if oscillates { "ok" } else { "violated" }
    ));
    ok &= oscillates;

    let elapsed = started.elapsed();
    let in_time = elapsed.as_secs() < 10;
    notes.push(format!("elapsed {:.2?} (budget 10s)", elapsed));
    gate("11 unit-invariants", ok && in_time, &notes.join("; "));
}
