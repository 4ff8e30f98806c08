"""Dual-channel attack loop: identifier search and structure rewriting
take turns against a shared global best, trading control when the
active channel stagnates and handing off when it runs out of moves.

The structural state keeps original identifier names; the current best
substitution map is applied at render time. Renaming preserves node
identity, so statement importance measured on rendered code addresses
transform sites in the structural state directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import STREAM_SAMPLING, STREAM_SWARM, RunConfig, rng_stream
from .errors import (BudgetExhausted, NoApplicableSite, NoStructures,
                     UnparseableInput)
from .lexicon import EmbeddingProvider, build_pool, rename
from .swarm import PsoCore, SubstitutionEvaluator, _EarlyStop
from .transforms import (apply_transform, compute_importance,
                         extract_profile, sample_transform,
                         true_class_confidence)

CHANNEL_LEXICAL = "lexical"
CHANNEL_STRUCTURAL = "structural"

STATUS_SUCCESS = "success"
STATUS_NO_FLIP = "no_flip"
STATUS_BUDGET = "budget_exhausted"
STATUS_SKIPPED = "skipped_misclassified"
STATUS_UNATTEMPTED = "unattempted"

STINT_STAGNATED = "stagnated"
STINT_EXHAUSTED = "exhausted"


class GlobalQueryPool:
    """Query allowance shared across samples. Sequential mode only."""

    def __init__(self, total: int):
        if total < 1:
            raise ValueError("global budget must be at least 1")
        self.total = total
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.total - self.used

    def take(self) -> None:
        if self.used >= self.total:
            raise BudgetExhausted("global query budget spent")
        self.used += 1


class QueryGate:
    """Budget enforcement in front of a victim handle.

    Counts from the handle's counter at construction, so a reused
    handle still yields per-sample accounting. Refuses before the
    counter moves: queries_used can never exceed the budget.
    """

    def __init__(self, handle, budget: int,
                 global_pool: GlobalQueryPool | None = None):
        self.handle = handle
        self.budget = budget
        self.global_pool = global_pool
        self._start = handle.query_counter

    @property
    def queries_used(self) -> int:
        return self.handle.query_counter - self._start

    def predict(self, code: str):
        if self.queries_used >= self.budget:
            raise BudgetExhausted(
                f"per-sample budget of {self.budget} queries spent")
        if self.global_pool is not None:
            self.global_pool.take()
        return self.handle.predict(code)


@dataclass
class AttackTask:
    unit: object
    true_label: int
    budget: int
    config: RunConfig
    sample_id: str = ""


@dataclass
class AttackOutcome:
    sample_id: str
    status: str
    success: bool
    skipped: bool
    true_label: int
    final_label: int | None
    p_orig: float | None
    p_adv: float | None
    delta_drop: float
    queries_used: int
    adversarial_code: str
    substitution: dict
    transforms: list
    channel_trace: list
    budget_exhausted: bool


def unattempted_outcome(task: AttackTask) -> AttackOutcome:
    """Recorded when a shared global budget ran dry before the sample's
    first query."""
    return AttackOutcome(
        sample_id=task.sample_id or task.unit.unit_id,
        status=STATUS_UNATTEMPTED, success=False, skipped=True,
        true_label=task.true_label, final_label=None, p_orig=None,
        p_adv=None, delta_drop=0.0, queries_used=0,
        adversarial_code=task.unit.text, substitution={}, transforms=[],
        channel_trace=[], budget_exhausted=True)


@dataclass
class _Best:
    """Shared global best across both channels."""
    fitness: float
    code: str
    p: float
    substitution: dict
    transforms: tuple


class _Flip(Exception):
    """Victim label left the true class; carries the winning candidate."""

    def __init__(self, code: str, p: float, substitution: dict,
                 transforms: tuple):
        self.code = code
        self.p = p
        self.substitution = substitution
        self.transforms = transforms


class _Attack:
    def __init__(self, task: AttackTask, gate: QueryGate, vocabulary: list,
                 provider: EmbeddingProvider, sample_id: str):
        self.task = task
        self.cfg = task.config
        self.gate = gate
        self.vocabulary = vocabulary
        self.provider = provider
        self.y = task.true_label
        self.sample_id = sample_id
        self.rng_swarm = rng_stream(self.cfg.seed, STREAM_SWARM, sample_id)
        self.rng_sampling = rng_stream(self.cfg.seed, STREAM_SAMPLING,
                                       sample_id)
        self.trace: list = []
        self.p_orig = 0.5
        self.best = _Best(0.0, task.unit.text, 0.5, {}, ())
        self.struct_unit = task.unit
        self.applied: tuple = ()
        self.lexical_iters_done = 0
        self.lexical_exhausted = False
        self.structural_exhausted = False
        self.switches = 0
        self._evaluator: SubstitutionEvaluator | None = None
        self._core: PsoCore | None = None

    def _event(self, event: str, **extra) -> None:
        row = {"event": event, "queries_used": self.gate.queries_used}
        row.update(extra)
        self.trace.append(row)

    def _fitness_of(self, p: float) -> float:
        return true_class_confidence(self.p_orig, self.y) \
            - true_class_confidence(p, self.y)

    def _note_candidate(self, fitness: float, code: str, p: float,
                        substitution: dict, transforms: tuple) -> None:
        if fitness > self.best.fitness:
            self.best = _Best(fitness, code, p, dict(substitution),
                              transforms)

    def _live_substitution(self, unit) -> dict:
        """Best-map entries that survive on the given unit's identifiers."""
        names = set(unit.identifiers)
        return {k: v for k, v in self.best.substitution.items()
                if k in names}

    # -- lexical channel --------------------------------------------------

    def _pinned_position(self, pool) -> list | None:
        """Map the inherited substitution onto the pool's index space."""
        live = self._live_substitution(self.struct_unit)
        if not live:
            return None
        position = [0] * len(pool.identifiers)
        for dim, name in enumerate(pool.identifiers):
            want = live.get(name)
            if want is None:
                continue
            for index, (candidate, _) in enumerate(pool.candidates(name)):
                if candidate == want:
                    position[dim] = index + 1
                    break
        return position

    def _sync_from_core(self) -> None:
        core, evaluator = self._core, self._evaluator
        if core is None or core.best_p is None:
            return
        if core.best_fitness > self.best.fitness:
            substitution = evaluator.substitution_for(core.best_position)
            self._note_candidate(core.best_fitness,
                                 evaluator.render(core.best_position),
                                 core.best_p, substitution, self.applied)

    def _run_lexical(self, may_switch: bool) -> str:
        cfg = self.cfg
        self._event("channel_start", channel=CHANNEL_LEXICAL,
                    iteration=self.lexical_iters_done)
        pool = build_pool(self.struct_unit, self.vocabulary, self.provider,
                          cfg.top_k)
        evaluator = SubstitutionEvaluator(self.struct_unit, pool, self.gate,
                                          self.y, self.p_orig)
        if evaluator.dims == 0 or all(evaluator.pool_size(d) == 0
                                      for d in range(evaluator.dims)):
            self.lexical_exhausted = True
            return STINT_EXHAUSTED
        pinned = self._pinned_position(pool)
        core = PsoCore(evaluator, cfg, self.rng_swarm,
                       pinned_positions=[pinned] if pinned is not None else None,
                       start_iteration=self.lexical_iters_done)
        self._evaluator = evaluator
        self._core = core
        core.initialize()
        self._sync_from_core()
        while self.lexical_iters_done < cfg.max_iters:
            row = core.step()
            self.lexical_iters_done = core.t
            self._sync_from_core()
            self._event("iteration", channel=CHANNEL_LEXICAL, **row)
            if may_switch and core.stagnation >= cfg.theta:
                return STINT_STAGNATED
        self.lexical_exhausted = True
        return STINT_EXHAUSTED

    # -- structural channel -----------------------------------------------

    def _rendered_struct(self):
        live = self._live_substitution(self.struct_unit)
        return rename(self.struct_unit, live) if live else self.struct_unit

    def _run_structural(self, may_switch: bool) -> str:
        cfg = self.cfg
        self._event("channel_start", channel=CHANNEL_STRUCTURAL)
        try:
            profile = extract_profile(self.struct_unit,
                                      cfg.control_flow_weight)
        except NoStructures:
            self.structural_exhausted = True
            return STINT_EXHAUSTED
        importance = compute_importance(self._rendered_struct(), self.gate,
                                        self.y, cfg.site_cap)
        stagnation = 0
        iteration = 0
        while True:
            iteration += 1
            try:
                op, _ = sample_transform(self.struct_unit, profile,
                                         importance, self.rng_sampling)
            except NoApplicableSite:
                self.structural_exhausted = True
                return STINT_EXHAUSTED
            candidate_unit = apply_transform(self.struct_unit, op)
            live = self._live_substitution(candidate_unit)
            code = rename(candidate_unit, live).text if live \
                else candidate_unit.text
            verdict = self.gate.predict(code)
            if verdict.label != self.y:
                raise _Flip(code, verdict.p_vulnerable, live,
                            self.applied + (op,))
            fitness = self._fitness_of(verdict.p_vulnerable)
            before = self.best.fitness
            improved = fitness > before
            self._note_candidate(fitness, code, verdict.p_vulnerable, live,
                                 self.applied + (op,))
            if improved:
                # Advance the walk; the reparse renumbered nodes, so the
                # sampling distribution and importance map go stale.
                self.struct_unit = candidate_unit
                self.applied = self.applied + (op,)
                profile = extract_profile(self.struct_unit,
                                          cfg.control_flow_weight)
                importance = compute_importance(self._rendered_struct(),
                                                self.gate, self.y,
                                                cfg.site_cap)
            stagnation = stagnation + 1 if self.best.fitness == before else 0
            self._event("iteration", channel=CHANNEL_STRUCTURAL,
                        iteration=iteration, op=op.op, site=op.site,
                        best_fitness=self.best.fitness,
                        stagnation=stagnation)
            if may_switch and stagnation >= cfg.theta:
                return STINT_STAGNATED

    # -- main loop --------------------------------------------------------

    def _exhausted(self, channel: str) -> bool:
        return self.lexical_exhausted if channel == CHANNEL_LEXICAL \
            else self.structural_exhausted

    def run(self) -> AttackOutcome:
        budget_hit = False
        flip: _Flip | None = None
        try:
            verdict = self.gate.predict(self.task.unit.text)
            self.p_orig = verdict.p_vulnerable
            if verdict.label != self.y:
                return self._skipped_outcome()
            self.best = _Best(0.0, self.task.unit.text, self.p_orig, {}, ())
            channel = CHANNEL_LEXICAL
            while True:
                other = CHANNEL_STRUCTURAL if channel == CHANNEL_LEXICAL \
                    else CHANNEL_LEXICAL
                may_switch = not self._exhausted(other) \
                    and self.switches < self.cfg.max_switches
                if channel == CHANNEL_LEXICAL:
                    why = self._run_lexical(may_switch)
                else:
                    why = self._run_structural(may_switch)
                if why == STINT_STAGNATED:
                    self.switches += 1
                    self._event("switch", from_channel=channel,
                                to_channel=other, stagnation=self.cfg.theta,
                                switches=self.switches)
                    channel = other
                    continue
                if self._exhausted(other):
                    break
                # Out of moves here while the other side still has some:
                # hand over without a stagnation switch.
                self._event("handoff", from_channel=channel,
                            to_channel=other)
                channel = other
        except _Flip as caught:
            flip = caught
        except _EarlyStop:
            ev = self._evaluator
            self._sync_from_core()
            flip = _Flip(ev.flip_code, ev.flip_p, ev.flip_substitution,
                         self.applied)
        except BudgetExhausted:
            budget_hit = True
            self._sync_from_core()
        if flip is not None:
            return self._success_outcome(flip)
        return self._no_flip_outcome(budget_hit)

    # -- outcomes ---------------------------------------------------------

    def _skipped_outcome(self) -> AttackOutcome:
        self._event("skipped")
        self._event("end", status=STATUS_SKIPPED)
        return AttackOutcome(
            sample_id=self.sample_id, status=STATUS_SKIPPED, success=False,
            skipped=True, true_label=self.y, final_label=1 - self.y,
            p_orig=self.p_orig, p_adv=self.p_orig, delta_drop=0.0,
            queries_used=self.gate.queries_used,
            adversarial_code=self.task.unit.text, substitution={},
            transforms=[], channel_trace=self.trace, budget_exhausted=False)

    def _success_outcome(self, flip: _Flip) -> AttackOutcome:
        self._event("success", p=flip.p)
        self._event("end", status=STATUS_SUCCESS)
        return AttackOutcome(
            sample_id=self.sample_id, status=STATUS_SUCCESS, success=True,
            skipped=False, true_label=self.y, final_label=1 - self.y,
            p_orig=self.p_orig, p_adv=flip.p,
            delta_drop=self._fitness_of(flip.p),
            queries_used=self.gate.queries_used, adversarial_code=flip.code,
            substitution=dict(flip.substitution),
            transforms=list(flip.transforms), channel_trace=self.trace,
            budget_exhausted=False)

    def _no_flip_outcome(self, budget_hit: bool) -> AttackOutcome:
        # The search never saw a flip. One verification query fixes the
        # final verdict, budget permitting; otherwise the score recorded
        # for the best candidate stands.
        p_adv = self.best.p
        if not budget_hit:
            try:
                p_adv = self.gate.predict(self.best.code).p_vulnerable
                self._event("verification", p=p_adv)
            except BudgetExhausted:
                budget_hit = True
        final_label = 1 if p_adv >= 0.5 else 0
        success = final_label != self.y
        status = STATUS_SUCCESS if success else \
            (STATUS_BUDGET if budget_hit else STATUS_NO_FLIP)
        self._event("end", status=status)
        return AttackOutcome(
            sample_id=self.sample_id, status=status, success=success,
            skipped=False, true_label=self.y, final_label=final_label,
            p_orig=self.p_orig, p_adv=p_adv,
            delta_drop=self._fitness_of(p_adv),
            queries_used=self.gate.queries_used,
            adversarial_code=self.best.code,
            substitution=dict(self.best.substitution),
            transforms=list(self.best.transforms), channel_trace=self.trace,
            budget_exhausted=budget_hit)


def attack(task: AttackTask, handle, vocabulary: list,
           provider: EmbeddingProvider | None = None,
           global_pool: GlobalQueryPool | None = None) -> AttackOutcome:
    """Run the dual-channel attack for one sample against one victim."""
    if task.budget < 1:
        raise ValueError("budget must be at least 1")
    if task.unit.ast is None:
        raise UnparseableInput(f"sample {task.sample_id!r} has no syntax tree")
    if global_pool is not None and global_pool.remaining <= 0:
        return unattempted_outcome(task)
    provider = provider or EmbeddingProvider.subword_hash()
    sample_id = task.sample_id or task.unit.unit_id
    gate = QueryGate(handle, task.budget, global_pool)
    return _Attack(task, gate, vocabulary, provider, sample_id).run()
