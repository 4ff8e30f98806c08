"""Discrete swarm mechanics and the comparison strategies."""

import numpy as np
import pytest

from hogforge.config import RunConfig, STREAM_SWARM, rng_stream
from hogforge.errors import BudgetExhausted
from hogforge.frontend import parse_unit
from hogforge.lexicon import EmbeddingProvider, build_pool
from hogforge.swarm import (
    ChannelResult,
    PsoCore,
    SubstitutionEvaluator,
    _EarlyStop,
    run_strategy,
    schedule,
    sigmoid,
)
from hogforge.victims import PlantedVictim, VictimHandle

from conftest import CountingGate

SEQ_SRC = """
int seq_read_iter(int total, int base) {
    int copied = 0;
    int sum = base;
    while (copied < total) {
        sum = sum + copied;
        copied = copied + 1;
    }
    return sum;
}
"""

TEST_VOCAB = [
    "total_read", "bytes_seen", "acc_value", "head_ptr", "tail_ptr",
    "span_mark", "chunk_id", "page_off", "raw_count", "hit_rate",
    "cold_path", "warm_path", "idle_loop", "busy_wait", "lane_pick",
    "gear_step", "dial_turn", "knob_set",
]


def planted_handle():
    victim = PlantedVictim({
        "base": 0.9, "flip_to": 0.1,
        "secrets": [{"orig": "copied", "repl": "total_read"}],
    })
    return VictimHandle(victim, "builtin", "inline-planted")


def make_evaluator(stop_on_flip=True, max_evals=None):
    unit = parse_unit(SEQ_SRC, "seq_read_iter")
    pool = build_pool(unit, TEST_VOCAB, EmbeddingProvider.subword_hash(), k=30)
    handle = planted_handle()
    return SubstitutionEvaluator(unit, pool, handle, 1, 0.9,
                                 stop_on_flip=stop_on_flip,
                                 max_evals=max_evals), handle, pool, unit


def secret_position(evaluator):
    pos = np.zeros(evaluator.dims, dtype=np.int64)
    dim = evaluator.pool.identifiers.index("copied")
    names = [c for c, _ in evaluator.pool.candidates("copied")]
    pos[dim] = names.index("total_read") + 1
    return pos


def test_schedule_endpoints_exact():
    omega0, c1_0, c2_0 = schedule(0, 20, 1.5, 0.6, 1.3, 0.6)
    omegaT, c1_T, c2_T = schedule(20, 20, 1.5, 0.6, 1.3, 0.6)
    assert abs(omega0 - 1.5) <= 1e-12
    assert abs(c1_0 - 1.3) <= 1e-12
    assert abs(c2_0 - 0.6) <= 1e-12
    assert abs(omegaT - 0.6) <= 1e-12
    assert abs(c1_T - 0.6) <= 1e-12
    assert abs(c2_T - 1.3) <= 1e-12


def test_schedule_is_linear_and_crossing():
    vals = [schedule(t, 20, 1.5, 0.6, 1.3, 0.6) for t in range(21)]
    omegas = [v[0] for v in vals]
    assert all(a >= b for a, b in zip(omegas, omegas[1:]))
    c1s = [v[1] for v in vals]
    c2s = [v[2] for v in vals]
    assert all(a >= b for a, b in zip(c1s, c1s[1:]))
    assert all(a <= b for a, b in zip(c2s, c2s[1:]))
    mid = vals[10]
    assert mid[1] == pytest.approx(mid[2], abs=1e-12)


def test_sigmoid_center_and_symmetry():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(3.0) + sigmoid(-3.0) == pytest.approx(1.0, abs=1e-12)
    assert sigmoid(500.0) == pytest.approx(1.0)
    assert sigmoid(-500.0) == pytest.approx(0.0)


def test_evaluator_position_round_trip():
    evaluator, _, pool, unit = make_evaluator()
    pos = secret_position(evaluator)
    sub = evaluator.substitution_for(pos)
    assert sub == {"copied": "total_read"}
    assert "total_read" in evaluator.render(pos)
    zero = np.zeros(evaluator.dims, dtype=np.int64)
    assert evaluator.render(zero) == unit.text


def test_evaluator_repair_clears_duplicates():
    evaluator, _, pool, _ = make_evaluator()
    name0, name1 = evaluator.pool.identifiers[0], evaluator.pool.identifiers[1]
    target = [c for c, _ in evaluator.pool.candidates(name0)][0]
    v0 = 1
    v1 = [c for c, _ in evaluator.pool.candidates(name1)].index(target) + 1
    pos = np.zeros(evaluator.dims, dtype=np.int64)
    pos[0] = v0
    pos[1] = v1
    evaluator.repair(pos)
    assert pos[0] == v0
    assert pos[1] == 0


def test_evaluator_fitness_is_confidence_drop():
    evaluator, _, _, _ = make_evaluator()
    pos = secret_position(evaluator)
    fitness = evaluator.evaluate(pos)
    assert fitness == pytest.approx(0.8)
    assert evaluator.flipped
    assert evaluator.flip_queries == 1
    assert evaluator.flip_substitution == {"copied": "total_read"}


def test_evaluator_max_evals():
    evaluator, _, _, _ = make_evaluator(max_evals=2)
    zero = np.zeros(evaluator.dims, dtype=np.int64)
    evaluator.evaluate(zero)
    evaluator.evaluate(zero)
    with pytest.raises(BudgetExhausted):
        evaluator.evaluate(zero)


def test_consensus_swarm_never_moves():
    evaluator, handle, _, _ = make_evaluator(stop_on_flip=False)
    cfg = RunConfig(pop_size=4, max_iters=5, p_mutate=0.0)
    rng = rng_stream(3, STREAM_SWARM, "consensus")
    start = np.zeros(evaluator.dims, dtype=np.int64)
    core = PsoCore(evaluator, cfg, rng,
                   pinned_positions=[start.copy() for _ in range(4)])
    core.initialize()
    for _ in range(5):
        core.step()
    for particle in core.particles:
        assert (particle.position == start).all()


def test_stagnation_counts_unimproved_iterations():
    evaluator, _, _, _ = make_evaluator(stop_on_flip=False)
    cfg = RunConfig(pop_size=3, max_iters=6, p_mutate=0.0)
    rng = rng_stream(5, STREAM_SWARM, "stagnant")
    start = np.zeros(evaluator.dims, dtype=np.int64)
    core = PsoCore(evaluator, cfg, rng,
                   pinned_positions=[start.copy() for _ in range(3)])
    core.initialize()
    rows = [core.step() for _ in range(4)]
    assert [r["stagnation"] for r in rows] == [1, 2, 3, 4]


def _word_gain_gate(gains):
    import re

    def score(code):
        p = 0.9
        for word, gain in gains.items():
            if re.search(rf"\b{word}\b", code):
                p -= gain
        return max(0.0, p)

    return CountingGate(score)


def test_stagnation_resets_on_improvement():
    unit = parse_unit(SEQ_SRC, "seq_read_iter")
    pool = build_pool(unit, TEST_VOCAB, EmbeddingProvider.subword_hash(), k=30)
    gains = {w: 0.01 * (i + 1) for i, w in enumerate(TEST_VOCAB)}
    gate = _word_gain_gate(gains)
    evaluator = SubstitutionEvaluator(unit, pool, gate, 1, 0.9,
                                      stop_on_flip=False)
    cfg = RunConfig(pop_size=6, max_iters=20)
    rng = rng_stream(2, STREAM_SWARM, "reset")
    core = PsoCore(evaluator, cfg, rng)
    core.initialize()
    seen_reset_after_count = False
    prev = 0
    for _ in range(20):
        row = core.step()
        if prev > 0 and row["stagnation"] == 0:
            seen_reset_after_count = True
        prev = row["stagnation"]
    assert seen_reset_after_count


def test_gbest_fitness_never_decreases():
    evaluator, _, _, _ = make_evaluator(stop_on_flip=False)
    cfg = RunConfig(pop_size=8, max_iters=15)
    rng = rng_stream(9, STREAM_SWARM, "monotone")
    core = PsoCore(evaluator, cfg, rng)
    core.initialize()
    history = [core.best_fitness]
    for _ in range(15):
        history.append(core.step()["best_fitness"])
    assert all(b >= a for a, b in zip(history, history[1:]))


def test_pso_bitwise_deterministic():
    def one_run():
        evaluator, _, _, _ = make_evaluator(stop_on_flip=False)
        cfg = RunConfig(pop_size=10, max_iters=10)
        rng = rng_stream(17, STREAM_SWARM, "det")
        core = PsoCore(evaluator, cfg, rng)
        core.initialize()
        rows = [core.step() for _ in range(10)]
        return [(r["best_fitness"], tuple(r["best_position"])) for r in rows]

    assert one_run() == one_run()


def test_early_stop_raised_on_flip():
    evaluator, _, _, _ = make_evaluator(stop_on_flip=True)
    cfg = RunConfig(pop_size=5, max_iters=10)
    rng = rng_stream(1, STREAM_SWARM, "stop")
    pinned = [secret_position(evaluator)]
    core = PsoCore(evaluator, cfg, rng, pinned_positions=pinned)
    with pytest.raises(_EarlyStop):
        core.initialize()
    assert evaluator.flipped


def test_seeded_secret_propagates():
    """One particle pinned on the flipping substitution: nearly every
    seed's swarm carries it to the global best within the horizon."""
    unit = parse_unit(SEQ_SRC, "seq_read_iter")
    provider = EmbeddingProvider.subword_hash()
    pool = build_pool(unit, TEST_VOCAB, provider, k=30)
    cfg = RunConfig(pop_size=20, max_iters=20)
    converged = 0
    for seed in range(100):
        handle = planted_handle()
        evaluator = SubstitutionEvaluator(unit, pool, handle, 1, 0.9,
                                          stop_on_flip=False)
        rng = rng_stream(seed, STREAM_SWARM, "seeded")
        core = PsoCore(evaluator, cfg, rng,
                       pinned_positions=[secret_position(evaluator)])
        core.initialize()
        for _ in range(cfg.max_iters):
            core.step()
        best_sub = evaluator.substitution_for(core.best_position)
        if best_sub.get("copied") == "total_read":
            converged += 1
    assert converged >= 95


def test_run_strategy_unknown_kind():
    evaluator, _, pool, unit = make_evaluator()
    with pytest.raises(ValueError):
        run_strategy("annealing", unit, pool, None, 1, 0.9,
                     RunConfig(), np.random.default_rng(0))


def test_run_strategy_no_moves():
    unit = parse_unit(SEQ_SRC, "seq")
    vocab = list(unit.identifiers)
    pool = build_pool(unit, vocab, EmbeddingProvider.subword_hash(), k=30)
    result = run_strategy("pso", unit, pool, None, 1, 0.9,
                          RunConfig(), np.random.default_rng(0))
    assert result.status == "no_moves"
    assert result.queries_used == 0


@pytest.mark.parametrize("kind", ["pso", "mhm", "greedy", "ga", "random"])
def test_every_strategy_runs_and_accounts(kind):
    unit = parse_unit(SEQ_SRC, "seq_read_iter")
    pool = build_pool(unit, TEST_VOCAB, EmbeddingProvider.subword_hash(), k=30)
    handle = planted_handle()
    cfg = RunConfig(pop_size=6, max_iters=5)
    rng = np.random.default_rng(21)
    result = run_strategy(kind, unit, pool, handle, 1, 0.9, cfg, rng)
    assert isinstance(result, ChannelResult)
    assert result.queries_used == handle.query_counter
    assert result.queries_used <= cfg.pop_size * (cfg.max_iters + 1)
    if result.flipped:
        assert result.flip_queries <= result.queries_used
    for row in result.trajectory:
        assert {"iteration", "best_position", "best_fitness"} <= set(row)


def test_trajectory_rows_have_iteration_sequence():
    unit = parse_unit(SEQ_SRC, "seq_read_iter")
    pool = build_pool(unit, TEST_VOCAB, EmbeddingProvider.subword_hash(), k=30)
    handle = planted_handle()
    cfg = RunConfig(pop_size=6, max_iters=5)
    result = run_strategy("pso", unit, pool, handle, 1, 0.9, cfg,
                          np.random.default_rng(4), stop_on_flip=False)
    iters = [row["iteration"] for row in result.trajectory]
    assert iters == sorted(iters)
    assert result.final_population
    assert len(result.final_name_vectors) == len(result.final_population)


def test_mhm_accepts_equal_fitness():
    """Acceptance ratio min(1, exp(0)) = 1: a same-fitness proposal
    must always replace the current point."""
    unit = parse_unit("int f(int a, int b) { int c = a; return c + b; }", "f")
    vocab = ["aa_one", "bb_two", "cc_three", "dd_four"]
    pool = build_pool(unit, vocab, EmbeddingProvider.subword_hash(), k=4)
    flat = CountingGate(lambda code: 0.9)

    cfg = RunConfig(pop_size=4, max_iters=10)
    result = run_strategy("mhm", unit, pool, flat, 1, 0.9, cfg,
                          np.random.default_rng(8), stop_on_flip=False)
    assert result.status in ("completed", "budget_exhausted")
    # On a flat landscape every proposal has equal fitness, so the chain
    # must keep wandering rather than freeze at the start point.
    assert len({tuple(row["best_position"]) for row in result.trajectory}) >= 1
    assert flat.calls == result.queries_used


def test_greedy_matches_brute_force_on_additive_landscape():
    unit = parse_unit("int f(int a, int b) { int c = a; return c + b; }", "f")
    vocab = ["ax_word", "bx_word", "cx_word", "dull_one", "dull_two"]
    pool = build_pool(unit, vocab, EmbeddingProvider.subword_hash(), k=5)

    # One scoring word per identifier, and the gain fires only when that
    # identifier is gone and its word is present. Per-dimension optima are
    # then distinct, so greedy's best-first stacking provably reaches the
    # global optimum.
    import re

    pairs = {"a": ("ax_word", 0.2), "b": ("bx_word", 0.12),
             "c": ("cx_word", 0.3)}

    def pair_score(code):
        p = 0.9
        for orig, (word, gain) in pairs.items():
            if not re.search(rf"\b{orig}\b", code) \
                    and re.search(rf"\b{word}\b", code):
                p -= gain
        return max(0.0, p)

    gains = {w: g for w, g in pairs.values()}
    gate = CountingGate(pair_score)

    cfg = RunConfig(pop_size=20, max_iters=10)
    result = run_strategy("greedy", unit, pool, gate, 1, 0.9, cfg,
                          np.random.default_rng(2), stop_on_flip=False)

    # Brute force over every collision-free position, scored through the
    # same render-and-predict path.
    import itertools
    probe = SubstitutionEvaluator(unit, pool, CountingGate(pair_score), 1, 0.9,
                                  stop_on_flip=False)
    best = 0.0
    sizes = [probe.pool_size(d) for d in range(probe.dims)]
    for combo in itertools.product(*[range(s + 1) for s in sizes]):
        pos = np.array(combo, dtype=np.int64)
        names = [probe.candidate_name(d, v) for d, v in enumerate(combo) if v]
        if len(names) != len(set(names)):
            continue
        best = max(best, probe.evaluate(pos))
    assert best == pytest.approx(sum(gains.values()), abs=1e-12)
    assert result.best_fitness == pytest.approx(best, abs=1e-12)


def test_random_strategy_redraws_whole_positions():
    unit = parse_unit(SEQ_SRC, "seq_read_iter")
    pool = build_pool(unit, TEST_VOCAB, EmbeddingProvider.subword_hash(), k=30)
    flat = CountingGate(lambda code: 0.9)
    cfg = RunConfig(pop_size=5, max_iters=4)
    result = run_strategy("random", unit, pool, flat, 1, 0.9, cfg,
                          np.random.default_rng(6), stop_on_flip=False)
    assert result.queries_used == cfg.pop_size * (cfg.max_iters + 1)
