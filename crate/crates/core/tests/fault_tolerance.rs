mod common;

use crosstalk::ft_runtime::{
    discover, run_workload, BlockBank, BlockFault, EventKind, Health, Rediscover, ScheduledFault,
    TestVectors,
};
use crosstalk::msa_block::MsaMode;

use common::mixed_program;

fn kill(before: usize, block: &str) -> ScheduledFault {
    ScheduledFault {
        before,
        block: block.to_string(),
        fault: BlockFault::Kill,
    }
}

#[test]
fn any_two_dead_blocks_still_serve_everything() {
    let program = mixed_program();
    let bank = BlockBank::msa(3);
    for (x, y) in [
        ("block1", "block2"),
        ("block1", "block3"),
        ("block2", "block3"),
    ] {
        // one kill up front, the other mid-run
        let schedule = [kill(0, x), kill(13, y)];
        let w = run_workload(
            &program,
            &bank,
            Rediscover::Every(1),
            &schedule,
            &TestVectors::exhaustive(),
        )
        .unwrap();
        assert!(w.all_correct(), "{x} {y}");
        assert_eq!(w.count(EventKind::Unrecoverable), 0);
    }
}

#[test]
fn all_dead_is_unrecoverable_everywhere() {
    let program = mixed_program();
    let schedule = [kill(0, "block1"), kill(0, "block2"), kill(0, "block3")];
    let w = run_workload(
        &program,
        &BlockBank::msa(3),
        Rediscover::Every(1),
        &schedule,
        &TestVectors::exhaustive(),
    )
    .unwrap();
    assert_eq!(w.count(EventKind::Unrecoverable), 30);
    assert!(w.results.iter().all(|r| !r.is_correct()));
}

#[test]
fn partial_fault_keeps_unaffected_functions_on_the_block() {
    let mut bank = BlockBank::msa(2);
    // m1 is the multiplier-only term of the OR that drives Y1, so only a
    // stuck-at-0 is mode-local
    bank.inject("block1", &"stuck:m1=0".parse().unwrap())
        .unwrap();
    let t = discover(&bank, &TestVectors::exhaustive()).unwrap();
    assert_eq!(
        t.get("block1", MsaMode::Multiplier),
        Some(Health::Incorrect)
    );
    assert_eq!(t.correct_blocks(MsaMode::Sorter), ["block1", "block2"]);
    assert_eq!(t.correct_blocks(MsaMode::Multiplier), ["block2"]);
}

#[test]
fn workloads_are_deterministic() {
    let program = mixed_program();
    let schedule = [kill(4, "block1"), kill(9, "block3")];
    let bank = BlockBank::msa(3);
    let run = |c| run_workload(&program, &bank, c, &schedule, &TestVectors::exhaustive()).unwrap();
    assert_eq!(run(Rediscover::Every(3)), run(Rediscover::Every(3)));
    assert_eq!(run(Rediscover::Never), run(Rediscover::Never));
}

#[test]
fn twelve_instruction_program_without_faults() {
    let program: Vec<_> = mixed_program().into_iter().take(12).collect();
    let w = run_workload(
        &program,
        &BlockBank::msa(3),
        Rediscover::Never,
        &[],
        &TestVectors::exhaustive(),
    )
    .unwrap();
    assert!(w.all_correct());
    assert_eq!(w.count(EventKind::Discovery), 1);
    assert_eq!(w.count(EventKind::Reroute), 0);
}
