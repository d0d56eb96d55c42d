use ptmc_core::ising::{
    generate_layered, Coupling, Disorder, Group, IsingModel, LayeredParams, LayeredProblem,
    RegionPartition, SpinState,
};
use ptmc_core::parallel::{Executor, WorkerPriority};
use ptmc_core::persist;
use ptmc_core::ptmc::{
    geometric_ladder, run, sweep_regional, sweep_regional_serial, Chain, CheckpointPolicy,
    Ensemble, Mode, NoObserver, RunOptions,
};
use ptmc_core::rng::{regional_seed, RngStream};
use ptmc_core::Error;

fn problem(qubits: usize, copies: usize, seed: u32) -> LayeredProblem {
    let mut params = LayeredParams::new(qubits, copies);
    params.field_dist = Disorder::Gaussian;
    generate_layered(&params, &mut RngStream::new(seed)).unwrap()
}

fn run_to_bytes(
    p: &LayeredProblem,
    mode: Mode,
    chains: usize,
    sweeps: u64,
    workers: usize,
) -> Vec<u8> {
    let temps = geometric_ladder(0.2, 3.0, chains).unwrap();
    let mut ens = Ensemble::new(&p.model, &temps, 2718, 10, mode, Some(&p.partition)).unwrap();
    let exec = Executor::new(workers, WorkerPriority::Normal).unwrap();
    let opts = RunOptions {
        total_sweeps: sweeps,
        ..RunOptions::default()
    };
    run(
        &mut ens,
        &p.model,
        Some(&p.partition),
        &exec,
        &opts,
        &mut NoObserver,
    )
    .unwrap();
    ens.to_bytes()
}

#[test]
fn coarse_runs_are_worker_count_invariant() {
    let p = problem(8, 4, 1);
    assert_eq!(p.model.num_sites(), 32);
    let reference = run_to_bytes(&p, Mode::Coarse, 16, 1000, 1);
    for workers in [2, 4, 8] {
        assert!(
            run_to_bytes(&p, Mode::Coarse, 16, 1000, workers) == reference,
            "workers={workers}"
        );
    }
}

#[test]
fn regional_runs_are_worker_count_invariant() {
    let p = problem(8, 8, 2);
    let reference = run_to_bytes(&p, Mode::Regional, 6, 200, 1);
    for workers in [2, 4, 8] {
        assert!(
            run_to_bytes(&p, Mode::Regional, 6, 200, workers) == reference,
            "workers={workers}"
        );
    }
}

/// Independent replay of a regional chain: recreate every region stream
/// from its seed, skip the initial-state draws, then sweep the regions in
/// `order` with the plain Metropolis rule.
fn replay_regional(
    model: &IsingModel,
    partition: &RegionPartition,
    beta: f64,
    seed: u32,
    chain: usize,
    order: &[usize],
    sweeps: usize,
) -> SpinState {
    let regions = partition.num_regions();
    let mut rngs: Vec<RngStream> = (0..regions)
        .map(|r| RngStream::new(regional_seed(seed, chain, regions, r).unwrap()))
        .collect();
    let mut spins = vec![0i8; model.num_sites()];
    for r in 0..regions {
        for &site in partition.region(r) {
            spins[site] = if rngs[r].next_u32() >> 31 == 0 { 1 } else { -1 };
        }
    }
    let mut state = SpinState::from_spins(spins).unwrap();
    for _ in 0..sweeps {
        for &r in order {
            for &site in partition.region(r) {
                let d = model.delta_energy(&state, site).unwrap();
                let u = rngs[r].next_unit_f32();
                if d <= 0.0 || (u as f64) < (-beta * d as f64).exp() {
                    state.flip(site);
                }
            }
        }
    }
    state
}

fn group_order(partition: &RegionPartition) -> Vec<usize> {
    partition
        .regions_in(Group::A)
        .chain(partition.regions_in(Group::B))
        .collect()
}

#[test]
fn regional_sweep_matches_serial_replay() {
    let p = problem(8, 8, 3);
    let order = group_order(&p.partition);
    let expected = replay_regional(&p.model, &p.partition, 0.9, 55, 2, &order, 100);

    let mut serial = Chain::regional(&p.model, &p.partition, 0.9, 55, 2).unwrap();
    for _ in 0..100 {
        sweep_regional_serial(&mut serial, &p.model, &p.partition).unwrap();
    }
    assert_eq!(serial.state(), &expected);

    for workers in [1, 4, 8] {
        let exec = Executor::new(workers, WorkerPriority::Normal).unwrap();
        let mut chain = Chain::regional(&p.model, &p.partition, 0.9, 55, 2).unwrap();
        for _ in 0..100 {
            sweep_regional(&mut chain, &p.model, &p.partition, &exec).unwrap();
        }
        assert_eq!(chain, serial, "workers={workers}");
    }
}

#[test]
fn independent_regions_compose_in_any_order() {
    // four disconnected 3-site triangles, one region each
    let mut couplings = Vec::new();
    for block in 0..4 {
        let b = 3 * block;
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            couplings.push(Coupling {
                i: b + i,
                j: b + j,
                strength: if block % 2 == 0 { 1.0 } else { -0.5 },
            });
        }
    }
    let model = IsingModel::new(vec![0.25; 12], couplings).unwrap();
    let regions = (0..4).map(|b| (3 * b..3 * b + 3).collect()).collect();
    let partition =
        RegionPartition::new(regions, vec![Group::A, Group::A, Group::B, Group::A]).unwrap();

    let exec = Executor::new(3, WorkerPriority::Normal).unwrap();
    let mut chain = Chain::regional(&model, &partition, 1.3, 8, 0).unwrap();
    for _ in 0..40 {
        sweep_regional(&mut chain, &model, &partition, &exec).unwrap();
    }
    for order in [vec![0, 1, 3, 2], vec![2, 3, 1, 0], vec![1, 2, 0, 3]] {
        let replay = replay_regional(&model, &partition, 1.3, 8, 0, &order, 40);
        assert_eq!(chain.state(), &replay, "order {order:?}");
    }
}

#[test]
fn regional_sweep_rejects_invalid_partition() {
    let p = problem(4, 4, 4);
    // all slices in one group: ring bonds join same-group regions
    let regions = (0..4).map(|r| p.partition.region(r).to_vec()).collect();
    let bad = RegionPartition::new(regions, vec![Group::A; 4]).unwrap();
    let mut chain = Chain::regional(&p.model, &p.partition, 1.0, 1, 0).unwrap();
    let exec = Executor::new(2, WorkerPriority::Normal).unwrap();
    assert!(matches!(
        sweep_regional(&mut chain, &p.model, &bad, &exec),
        Err(Error::InvalidPartition(_))
    ));
    let temps = [2.0, 1.0];
    assert!(Ensemble::new(&p.model, &temps, 1, 1, Mode::Regional, Some(&bad)).is_err());
}

fn split_run(p: &LayeredProblem, mode: Mode, dir: &std::path::Path) {
    let temps = geometric_ladder(0.3, 2.5, 5).unwrap();
    let sps = 3;
    let exec = Executor::new(3, WorkerPriority::Normal).unwrap();
    let fresh = || Ensemble::new(&p.model, &temps, 99, sps, mode, Some(&p.partition)).unwrap();
    let opts = |phases: u64| RunOptions {
        total_sweeps: phases * sps,
        ..RunOptions::default()
    };

    let mut straight = fresh();
    run(
        &mut straight,
        &p.model,
        Some(&p.partition),
        &exec,
        &opts(100),
        &mut NoObserver,
    )
    .unwrap();

    let path = dir.join(format!("{mode}.ckpt"));
    let mut first = fresh();
    run(
        &mut first,
        &p.model,
        Some(&p.partition),
        &exec,
        &opts(50),
        &mut NoObserver,
    )
    .unwrap();
    persist::save(&first, &p.model, 100 * sps, &path).unwrap();
    let loaded = persist::load(&path, &p.model).unwrap();
    assert_eq!(loaded.ensemble.to_bytes(), first.to_bytes());
    assert_eq!(loaded.total_sweeps, 100 * sps);
    let mut resumed = loaded.ensemble;
    run(
        &mut resumed,
        &p.model,
        Some(&p.partition),
        &exec,
        &opts(100),
        &mut NoObserver,
    )
    .unwrap();

    assert!(resumed.to_bytes() == straight.to_bytes());
    assert_eq!(resumed.swap_counter(), 100);
}

#[test]
fn split_runs_equal_straight_runs() {
    let dir = std::env::temp_dir().join(format!("ptmc-split-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = problem(8, 4, 5);
    split_run(&p, Mode::Coarse, &dir);
    split_run(&p, Mode::Regional, &dir);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn checkpoint_faults_are_detected() {
    let p = problem(8, 4, 6);
    let other = problem(8, 4, 7);
    let temps = [2.0, 1.0, 0.5];
    let ens = Ensemble::new(&p.model, &temps, 1, 1, Mode::Coarse, None).unwrap();
    let bytes = persist::checkpoint_bytes(&ens, &p.model, 10);

    let mut flipped = bytes.clone();
    // inside the first chain's stream: header (60) + ensemble header (34) + beta/energy + spins
    let offset = 60 + 34 + 16 + 32 + 4 + 100;
    flipped[offset] ^= 0x40;
    assert!(matches!(
        persist::parse_checkpoint(&flipped, &p.model),
        Err(Error::Checksum)
    ));

    assert!(persist::parse_checkpoint(&bytes[..bytes.len() / 2], &p.model).is_err());
    assert!(matches!(
        persist::parse_checkpoint(&bytes, &other.model),
        Err(Error::FingerprintMismatch)
    ));
    assert!(persist::parse_checkpoint(&bytes, &p.model).is_ok());
}

#[test]
fn run_writes_periodic_checkpoints() {
    let dir = std::env::temp_dir().join(format!("ptmc-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.ckpt");
    let p = problem(8, 4, 8);
    let mut ens = Ensemble::new(&p.model, &[2.0, 1.0], 3, 2, Mode::Coarse, None).unwrap();
    let exec = Executor::new(1, WorkerPriority::Normal).unwrap();
    let opts = RunOptions {
        total_sweeps: 20,
        checkpoint: Some(CheckpointPolicy {
            path: path.clone(),
            interval: std::time::Duration::ZERO,
        }),
        ..RunOptions::default()
    };
    let report = run(&mut ens, &p.model, None, &exec, &opts, &mut NoObserver).unwrap();
    assert_eq!(report.checkpoints_written, 10);
    let loaded = persist::load(&path, &p.model).unwrap();
    assert_eq!(loaded.ensemble, ens);
    assert!(!dir.join("run.ckpt.tmp").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}
