"""Discrete particle swarm over identifier substitutions, plus the
comparator strategies (MHM, Greedy, GA, Random) behind one interface.

A position holds one slot per renameable identifier: 0 keeps the
original, j >= 1 picks the j-th ranked candidate. Velocity stays real;
the sigmoid of a slot's velocity gives the probability that the slot
moves toward a guide this iteration. All strategies draw from the same
per-strategy evaluation allowance, pop_size * (max_iters + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExhausted
from .lexicon import CandidatePool, rename
from .transforms import true_class_confidence

STRATEGY_PSO = "pso"
STRATEGY_MHM = "mhm"
STRATEGY_GREEDY = "greedy"
STRATEGY_GA = "ga"
STRATEGY_RANDOM = "random"
ALL_STRATEGIES = (STRATEGY_PSO, STRATEGY_MHM, STRATEGY_GREEDY,
                  STRATEGY_GA, STRATEGY_RANDOM)

STATUS_COMPLETED = "completed"
STATUS_FLIPPED = "flipped"
STATUS_BUDGET = "budget_exhausted"
STATUS_NO_MOVES = "no_moves"


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def schedule(t: int, T: int, omega1: float, omega2: float,
             c1_ori: float, c2_ori: float) -> tuple:
    """Linear decay: momentum shrinks, social weight overtakes personal."""
    omega = (omega1 - omega2) * (T - t) / T + omega2
    c1 = c1_ori - (t / T) * (c1_ori - c2_ori)
    c2 = c2_ori + (t / T) * (c1_ori - c2_ori)
    return omega, c1, c2


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float
    fitness: float


@dataclass
class ChannelResult:
    strategy: str
    best_position: list
    best_substitution: dict
    best_fitness: float
    best_code: str
    queries_used: int
    flipped: bool
    flip_queries: int | None
    status: str
    trajectory: list = field(default_factory=list)
    final_population: list = field(default_factory=list)
    final_name_vectors: list = field(default_factory=list)


class SubstitutionEvaluator:
    """Renders positions and scores them against the victim.

    Fitness is the drop in true-class confidence versus the unperturbed
    baseline. Tracks its own query count and the first flip.
    """

    def __init__(self, unit, pool: CandidatePool, gate, true_label: int,
                 p_orig: float, stop_on_flip: bool = True, max_evals: int | None = None):
        self.unit = unit
        self.pool = pool
        self.gate = gate
        self.true_label = true_label
        self.conf_orig = true_class_confidence(p_orig, true_label)
        self.stop_on_flip = stop_on_flip
        self.max_evals = max_evals
        self.queries = 0
        self.flipped = False
        self.flip_queries = None
        self.flip_code = None
        self.flip_p = None
        self.flip_substitution = None
        self.last_p = None
        self.exhausted = False

    @property
    def dims(self) -> int:
        return len(self.pool.identifiers)

    def pool_size(self, dim: int) -> int:
        return len(self.pool.candidates(self.pool.identifiers[dim]))

    def candidate_name(self, dim: int, value: int) -> str:
        name = self.pool.identifiers[dim]
        if value == 0:
            return name
        return self.pool.candidates(name)[value - 1][0]

    def substitution_for(self, position) -> dict:
        sub = {}
        for dim, value in enumerate(position):
            if value:
                name = self.pool.identifiers[dim]
                sub[name] = self.pool.candidates(name)[value - 1][0]
        return sub

    def name_vector(self, position) -> list:
        return [self.candidate_name(d, int(v)) for d, v in enumerate(position)]

    def render(self, position) -> str:
        return rename(self.unit, self.substitution_for(position)).text

    def repair(self, position) -> None:
        """Reset later slots that duplicate an earlier slot's candidate."""
        seen = set()
        for dim in range(self.dims):
            value = int(position[dim])
            if value == 0:
                continue
            name = self.candidate_name(dim, value)
            if name in seen:
                position[dim] = 0
            else:
                seen.add(name)

    def should_stop(self) -> bool:
        return (self.stop_on_flip and self.flipped) or self.exhausted

    def evaluate(self, position) -> float:
        if self.max_evals is not None and self.queries >= self.max_evals:
            self.exhausted = True
            raise BudgetExhausted("strategy evaluation allowance spent")
        code = self.render(position)
        verdict = self.gate.predict(code)
        self.queries += 1
        self.last_p = verdict.p_vulnerable
        if verdict.label != self.true_label and not self.flipped:
            self.flipped = True
            self.flip_queries = self.queries
            self.flip_code = code
            self.flip_p = verdict.p_vulnerable
            self.flip_substitution = self.substitution_for(position)
        return self.conf_orig - true_class_confidence(verdict.p_vulnerable,
                                                      self.true_label)


def _draw_guided(rng, evaluator: SubstitutionEvaluator, top_k: int) -> np.ndarray:
    position = np.zeros(evaluator.dims, dtype=np.int64)
    for dim in range(evaluator.dims):
        top = min(top_k, evaluator.pool_size(dim))
        position[dim] = rng.integers(0, top + 1)
    return position


def _draw_randomized(rng, evaluator: SubstitutionEvaluator) -> np.ndarray:
    position = np.zeros(evaluator.dims, dtype=np.int64)
    for dim in range(evaluator.dims):
        size = evaluator.pool_size(dim)
        position[dim] = rng.integers(1, size + 1) if size else 0
    return position


def _draw_uniform_value(rng, evaluator: SubstitutionEvaluator, dim: int) -> int:
    return int(rng.integers(0, evaluator.pool_size(dim) + 1))


def init_positions(rng, evaluator: SubstitutionEvaluator, pop_size: int,
                   top_k: int) -> list:
    """Half similarity-guided (rounding up), half fully randomized."""
    guided = (pop_size + 1) // 2
    positions = []
    for index in range(pop_size):
        if index < guided:
            position = _draw_guided(rng, evaluator, top_k)
        else:
            position = _draw_randomized(rng, evaluator)
        evaluator.repair(position)
        positions.append(position)
    return positions


def _finish(evaluator, strategy, best_position, best_fitness, population,
            trajectory, budget_hit) -> ChannelResult:
    if evaluator.flipped:
        status = STATUS_FLIPPED
    elif budget_hit:
        status = STATUS_BUDGET
    else:
        status = STATUS_COMPLETED
    best_position = [int(v) for v in best_position]
    return ChannelResult(
        strategy=strategy,
        best_position=best_position,
        best_substitution=evaluator.substitution_for(best_position),
        best_fitness=best_fitness,
        best_code=evaluator.render(best_position),
        queries_used=evaluator.queries,
        flipped=evaluator.flipped,
        flip_queries=evaluator.flip_queries,
        status=status,
        trajectory=trajectory,
        final_population=[[int(v) for v in p] for p in population],
        final_name_vectors=[evaluator.name_vector(p) for p in population],
    )


class _EarlyStop(Exception):
    pass


class PsoCore:
    """The discrete swarm, one iteration at a time.

    The channel loop drives it: `initialize` evaluates the starting
    population, each `step` runs one full velocity/position/mutation
    pass plus re-evaluation. `pinned_positions` seeds specific
    particles (warm starts); remaining slots follow the two-fold
    initialization. Raises BudgetExhausted from the evaluator; checks
    the evaluator's stop signal after every evaluation.
    """

    def __init__(self, evaluator: SubstitutionEvaluator, params, rng,
                 pinned_positions: list | None = None, start_iteration: int = 0):
        self.evaluator = evaluator
        self.params = params
        self.rng = rng
        self.t = start_iteration
        self.stagnation = 0
        self.particles: list = []
        self.best_position = np.zeros(evaluator.dims, dtype=np.int64)
        self.best_fitness = 0.0
        self.best_p = None
        self._pinned = pinned_positions

    def _note(self, fitness: float, position) -> None:
        if fitness > self.best_fitness:
            self.best_fitness = fitness
            self.best_position = position.copy()
            self.best_p = self.evaluator.last_p

    def initialize(self) -> None:
        evaluator = self.evaluator
        positions = init_positions(self.rng, evaluator, self.params.pop_size,
                                   self.params.top_k)
        if self._pinned:
            for i, pinned in enumerate(self._pinned[:len(positions)]):
                positions[i] = np.array(pinned, dtype=np.int64)
                evaluator.repair(positions[i])
        for position in positions:
            fitness = evaluator.evaluate(position)
            self.particles.append(Particle(
                position=position.copy(),
                velocity=np.zeros(evaluator.dims),
                best_position=position.copy(), best_fitness=fitness,
                fitness=fitness))
            self._note(fitness, position)
            if evaluator.should_stop():
                raise _EarlyStop()

    def step(self) -> dict:
        evaluator = self.evaluator
        params = self.params
        rng = self.rng
        dims = evaluator.dims
        self.t += 1
        omega, c1, c2 = schedule(self.t, params.max_iters, params.omega1,
                                 params.omega2, params.c1_ori, params.c2_ori)
        fitness_before = self.best_fitness
        for particle in self.particles:
            for dim in range(dims):
                r1 = rng.random()
                r2 = rng.random()
                u_move = rng.random()
                x = particle.position[dim]
                pull_personal = c1 * r1 * (1.0 if particle.best_position[dim] != x else 0.0)
                pull_social = c2 * r2 * (1.0 if self.best_position[dim] != x else 0.0)
                velocity = omega * particle.velocity[dim] + pull_personal + pull_social
                particle.velocity[dim] = velocity
                if u_move < sigmoid(velocity):
                    if c2 * r2 >= c1 * r1:
                        particle.position[dim] = self.best_position[dim]
                    else:
                        particle.position[dim] = particle.best_position[dim]
            for dim in range(dims):
                if rng.random() < params.p_mutate:
                    particle.position[dim] = _draw_uniform_value(rng, evaluator, dim)
            evaluator.repair(particle.position)

        for particle in self.particles:
            fitness = evaluator.evaluate(particle.position)
            particle.fitness = fitness
            if fitness > particle.best_fitness:
                particle.best_fitness = fitness
                particle.best_position = particle.position.copy()
            self._note(fitness, particle.position)
            if evaluator.should_stop():
                raise _EarlyStop()

        self.stagnation = self.stagnation + 1 \
            if self.best_fitness == fitness_before else 0
        return {
            "iteration": self.t,
            "best_position": [int(v) for v in self.best_position],
            "best_fitness": self.best_fitness,
            "stagnation": self.stagnation,
        }


def run_pso(evaluator: SubstitutionEvaluator, params, rng,
            pinned_positions: list | None = None) -> ChannelResult:
    core = PsoCore(evaluator, params, rng, pinned_positions)
    trajectory = []
    budget_hit = False
    try:
        core.initialize()
        for _ in range(params.max_iters):
            trajectory.append(core.step())
    except _EarlyStop:
        pass
    except BudgetExhausted:
        budget_hit = True
    population = [p.position for p in core.particles]
    return _finish(evaluator, STRATEGY_PSO, core.best_position,
                   core.best_fitness, population, trajectory, budget_hit)


def run_mhm(evaluator: SubstitutionEvaluator, params, rng) -> ChannelResult:
    """Single-slot Metropolis-Hastings over substitutions."""
    dims = evaluator.dims
    max_evals = params.pop_size * (params.max_iters + 1)
    current = np.zeros(dims, dtype=np.int64)
    current_fitness = 0.0
    best_position = current.copy()
    best_fitness = 0.0
    trajectory = []
    budget_hit = False
    try:
        for step in range(max_evals):
            proposal = current.copy()
            dim = int(rng.integers(0, dims)) if dims else 0
            if dims:
                proposal[dim] = _draw_uniform_value(rng, evaluator, dim)
                evaluator.repair(proposal)
            fitness = evaluator.evaluate(proposal)
            accept = rng.random()
            if fitness >= current_fitness or \
                    accept < math.exp((fitness - current_fitness) / params.mhm_temperature):
                current = proposal
                current_fitness = fitness
            if fitness > best_fitness:
                best_fitness = fitness
                best_position = proposal.copy()
            if (step + 1) % params.pop_size == 0:
                trajectory.append({
                    "iteration": (step + 1) // params.pop_size,
                    "best_position": [int(v) for v in best_position],
                    "best_fitness": best_fitness,
                    "stagnation": 0,
                })
            if evaluator.should_stop():
                break
    except BudgetExhausted:
        budget_hit = True
    return _finish(evaluator, STRATEGY_MHM, best_position, best_fitness,
                   [current], trajectory, budget_hit)


def run_greedy(evaluator: SubstitutionEvaluator, params, rng) -> ChannelResult:
    """Probe every single substitution, then stack them best-first."""
    dims = evaluator.dims
    per_dim_best = []
    budget_hit = False
    best_position = np.zeros(dims, dtype=np.int64)
    best_fitness = 0.0
    try:
        for dim in range(dims):
            best_value, best_drop = 0, 0.0
            for value in range(1, evaluator.pool_size(dim) + 1):
                probe = np.zeros(dims, dtype=np.int64)
                probe[dim] = value
                fitness = evaluator.evaluate(probe)
                if fitness > best_fitness:
                    best_fitness = fitness
                    best_position = probe.copy()
                if fitness > best_drop:
                    best_drop, best_value = fitness, value
                if evaluator.should_stop():
                    raise _EarlyStop()
            per_dim_best.append((best_drop, dim, best_value))

        order = sorted(per_dim_best, key=lambda e: (-e[0], e[1]))
        combined = np.zeros(dims, dtype=np.int64)
        combined_fitness = 0.0
        taken = set()
        for drop, dim, value in order:
            if value == 0:
                continue
            name = evaluator.candidate_name(dim, value)
            if name in taken:
                continue
            candidate = combined.copy()
            candidate[dim] = value
            fitness = evaluator.evaluate(candidate)
            if fitness > combined_fitness:
                combined = candidate
                combined_fitness = fitness
                taken.add(name)
            if fitness > best_fitness:
                best_fitness = fitness
                best_position = candidate.copy()
            if evaluator.should_stop():
                raise _EarlyStop()
    except _EarlyStop:
        pass
    except BudgetExhausted:
        budget_hit = True
    return _finish(evaluator, STRATEGY_GREEDY, best_position, best_fitness,
                   [best_position], [], budget_hit)


def run_ga(evaluator: SubstitutionEvaluator, params, rng) -> ChannelResult:
    """Generational GA: tournament parents, one-point crossover, mutation."""
    dims = evaluator.dims
    pop_size = params.pop_size
    positions = init_positions(rng, evaluator, pop_size, params.top_k)
    fitnesses = []
    best_position = np.zeros(dims, dtype=np.int64)
    best_fitness = 0.0
    trajectory = []
    budget_hit = False
    try:
        for position in positions:
            fitness = evaluator.evaluate(position)
            fitnesses.append(fitness)
            if fitness > best_fitness:
                best_fitness = fitness
                best_position = position.copy()
            if evaluator.should_stop():
                raise _EarlyStop()

        for generation in range(1, params.max_iters + 1):
            elite_order = sorted(range(pop_size),
                                 key=lambda i: (-fitnesses[i], i))
            next_positions = [positions[i].copy()
                              for i in elite_order[:params.ga_elitism]]
            next_fitnesses = [fitnesses[i]
                              for i in elite_order[:params.ga_elitism]]
            while len(next_positions) < pop_size:
                parents = []
                for _ in range(2):
                    contenders = [int(rng.integers(0, pop_size))
                                  for _ in range(params.ga_tournament)]
                    winner = max(contenders, key=lambda i: (fitnesses[i], -i))
                    parents.append(positions[winner])
                if dims >= 2:
                    point = int(rng.integers(1, dims))
                    child = np.concatenate([parents[0][:point], parents[1][point:]])
                else:
                    child = parents[0].copy()
                for dim in range(dims):
                    if rng.random() < params.p_mutate:
                        child[dim] = _draw_uniform_value(rng, evaluator, dim)
                evaluator.repair(child)
                fitness = evaluator.evaluate(child)
                next_positions.append(child)
                next_fitnesses.append(fitness)
                if fitness > best_fitness:
                    best_fitness = fitness
                    best_position = child.copy()
                if evaluator.should_stop():
                    raise _EarlyStop()
            positions = next_positions
            fitnesses = next_fitnesses
            trajectory.append({
                "iteration": generation,
                "best_position": [int(v) for v in best_position],
                "best_fitness": best_fitness,
                "stagnation": 0,
            })
    except _EarlyStop:
        pass
    except BudgetExhausted:
        budget_hit = True
    return _finish(evaluator, STRATEGY_GA, best_position, best_fitness,
                   positions, trajectory, budget_hit)


def run_random(evaluator: SubstitutionEvaluator, params, rng) -> ChannelResult:
    """Uniform resampling of whole positions; the no-learning baseline."""
    dims = evaluator.dims
    max_evals = params.pop_size * (params.max_iters + 1)
    best_position = np.zeros(dims, dtype=np.int64)
    best_fitness = 0.0
    recent = []
    trajectory = []
    budget_hit = False
    try:
        for step in range(max_evals):
            position = np.zeros(dims, dtype=np.int64)
            for dim in range(dims):
                position[dim] = _draw_uniform_value(rng, evaluator, dim)
            evaluator.repair(position)
            fitness = evaluator.evaluate(position)
            recent.append(position)
            if len(recent) > params.pop_size:
                recent.pop(0)
            if fitness > best_fitness:
                best_fitness = fitness
                best_position = position.copy()
            if (step + 1) % params.pop_size == 0:
                trajectory.append({
                    "iteration": (step + 1) // params.pop_size,
                    "best_position": [int(v) for v in best_position],
                    "best_fitness": best_fitness,
                    "stagnation": 0,
                })
            if evaluator.should_stop():
                break
    except BudgetExhausted:
        budget_hit = True
    return _finish(evaluator, STRATEGY_RANDOM, best_position, best_fitness,
                   recent, trajectory, budget_hit)


_RUNNERS = {
    STRATEGY_PSO: run_pso,
    STRATEGY_MHM: run_mhm,
    STRATEGY_GREEDY: run_greedy,
    STRATEGY_GA: run_ga,
    STRATEGY_RANDOM: run_random,
}


def run_strategy(kind: str, unit, pool: CandidatePool, gate, true_label: int,
                 p_orig: float, params, rng,
                 stop_on_flip: bool = True) -> ChannelResult:
    """Common entry point for the lexical-search comparison harness."""
    if kind not in _RUNNERS:
        raise ValueError(f"unknown strategy {kind!r}")
    max_evals = params.pop_size * (params.max_iters + 1)
    evaluator = SubstitutionEvaluator(unit, pool, gate, true_label, p_orig,
                                      stop_on_flip=stop_on_flip,
                                      max_evals=max_evals)
    if evaluator.dims == 0 or all(evaluator.pool_size(d) == 0
                                  for d in range(evaluator.dims)):
        return ChannelResult(
            strategy=kind, best_position=[0] * evaluator.dims,
            best_substitution={}, best_fitness=0.0, best_code=unit.text,
            queries_used=0, flipped=False, flip_queries=None,
            status=STATUS_NO_MOVES)
    if kind == STRATEGY_PSO:
        return run_pso(evaluator, params, rng)
    return _RUNNERS[kind](evaluator, params, rng)
