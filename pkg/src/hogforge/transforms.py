"""Structure profiling, biased sampling, masked importance, and the six
control-flow rewrites.

Rewrites are guarded: a rewrite that could change behavior (a continue
that would skip a hoisted step, a fallthrough switch) is reported as
inapplicable instead of silently applied. Applying one always goes
copy -> surgery -> print -> reparse, so the result is a canonical unit
with fresh node ids.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .errors import InapplicableTransform, NoApplicableSite, NoStructures
from .frontend import (
    Assign,
    Binary,
    Block,
    Break,
    Call,
    Case,
    Continue,
    Decl,
    DoWhile,
    Empty,
    For,
    If,
    IntLit,
    Return,
    SourceUnit,
    Switch,
    While,
    children,
    walk,
)
from .frontend.printer import function_to_text
from .frontend.unit import parse_unit

KIND_FOR = "For"
KIND_WHILE = "While"
KIND_DO_WHILE = "DoWhile"
KIND_IF_ELSE_CHAIN = "IfElseChain"
KIND_IF_WITH_ELSE = "IfWithElse"
KIND_SWITCH = "Switch"
KIND_DECL_BLOCK = "DeclBlock"
KIND_ASSIGN_BLOCK = "AssignBlock"

CONTROL_FLOW_KINDS = (
    KIND_FOR, KIND_WHILE, KIND_DO_WHILE,
    KIND_IF_ELSE_CHAIN, KIND_IF_WITH_ELSE, KIND_SWITCH,
)
ALL_KINDS = CONTROL_FLOW_KINDS + (KIND_DECL_BLOCK, KIND_ASSIGN_BLOCK)

OP_FOR_TO_WHILE = "For2While"
OP_WHILE_TO_FOR = "While2For"
OP_CHAIN_TO_NESTED = "ChIfElse2Else"
OP_NESTED_TO_CHAIN = "ChElse2ElseIf"
OP_SWITCH_TO_CHAIN = "ChSwitch"
OP_DO_TO_WHILE = "ChDo"

KIND_TO_OP = {
    KIND_FOR: OP_FOR_TO_WHILE,
    KIND_WHILE: OP_WHILE_TO_FOR,
    KIND_DO_WHILE: OP_DO_TO_WHILE,
    KIND_IF_ELSE_CHAIN: OP_CHAIN_TO_NESTED,
    KIND_IF_WITH_ELSE: OP_NESTED_TO_CHAIN,
    KIND_SWITCH: OP_SWITCH_TO_CHAIN,
}

MAX_KIND_RESAMPLES = 8


@dataclass(frozen=True)
class TransformOp:
    op: str
    site: int


@dataclass
class StructureProfile:
    counts: dict
    control_flow_weight: float
    distribution: dict

    def transformable_total(self) -> int:
        return sum(self.counts.get(k, 0) for k in CONTROL_FLOW_KINDS)


@dataclass
class ImportanceMap:
    entries: list = field(default_factory=list)
    baseline_p: float = 0.5
    queries_spent: int = 0

    def drop_for(self, node_id: int) -> float:
        for nid, drop in self.entries:
            if nid == node_id:
                return drop
        return 0.0


def _classify(node):
    if isinstance(node, For):
        return KIND_FOR
    if isinstance(node, While):
        return KIND_WHILE
    if isinstance(node, DoWhile):
        return KIND_DO_WHILE
    if isinstance(node, Switch):
        return KIND_SWITCH
    if isinstance(node, If):
        if isinstance(node.orelse, If):
            return KIND_IF_ELSE_CHAIN
        if isinstance(node.orelse, Block) and len(node.orelse.stmts) == 1 \
                and isinstance(node.orelse.stmts[0], If):
            return KIND_IF_WITH_ELSE
    return None


def structure_sites(unit: SourceUnit) -> dict:
    """Node ids per structure kind, ascending."""
    sites = {kind: [] for kind in CONTROL_FLOW_KINDS}
    for node in walk(unit.ast):
        kind = _classify(node)
        if kind is not None:
            sites[kind].append(node.node_id)
    return sites


def _run_counts(unit: SourceUnit):
    """Maximal runs of consecutive Decl / Assign statements."""
    decl_runs = 0
    assign_runs = 0
    for node in walk(unit.ast):
        stmt_lists = []
        if isinstance(node, Block):
            stmt_lists.append(node.stmts)
        elif isinstance(node, Case):
            stmt_lists.append(node.stmts)
        for stmts in stmt_lists:
            prev = None
            for stmt in stmts:
                if isinstance(stmt, Decl):
                    if prev != "decl":
                        decl_runs += 1
                    prev = "decl"
                elif isinstance(stmt, Assign):
                    if prev != "assign":
                        assign_runs += 1
                    prev = "assign"
                else:
                    prev = None
    return decl_runs, assign_runs


def extract_profile(unit: SourceUnit, control_flow_weight: float) -> StructureProfile:
    if control_flow_weight <= 0:
        raise ValueError("control_flow_weight must be positive")
    sites = structure_sites(unit)
    counts = {kind: len(ids) for kind, ids in sites.items() if ids}
    decl_runs, assign_runs = _run_counts(unit)
    if decl_runs:
        counts[KIND_DECL_BLOCK] = decl_runs
    if assign_runs:
        counts[KIND_ASSIGN_BLOCK] = assign_runs
    if not any(counts.get(k, 0) for k in CONTROL_FLOW_KINDS):
        raise NoStructures(f"unit {unit.unit_id!r} has no transformable structure")
    weights = {}
    for kind in ALL_KINDS:
        count = counts.get(kind, 0)
        if count > 0:
            scale = control_flow_weight if kind in CONTROL_FLOW_KINDS else 1.0
            weights[kind] = scale * count
    total = sum(weights.values())
    distribution = {kind: w / total for kind, w in weights.items()}
    return StructureProfile(counts=counts, control_flow_weight=control_flow_weight,
                            distribution=distribution)


# -- applicability guards -------------------------------------------------

def _jumps_bound_here(stmts, want: str) -> bool:
    """Does any break/continue in these statements bind to the construct
    whose body they are? Inner loops capture both; switches capture break."""
    for stmt in stmts:
        if isinstance(stmt, Break) and want == "break":
            return True
        if isinstance(stmt, Continue) and want == "continue":
            return True
        if isinstance(stmt, (For, While, DoWhile)):
            continue
        if isinstance(stmt, Switch):
            if want == "continue":
                for case in stmt.cases:
                    if _jumps_bound_here(case.stmts, want):
                        return True
            continue
        if isinstance(stmt, Block):
            if _jumps_bound_here(stmt.stmts, want):
                return True
        elif isinstance(stmt, If):
            if _jumps_bound_here(stmt.then.stmts, want):
                return True
            orelse = stmt.orelse
            while isinstance(orelse, If):
                if _jumps_bound_here(orelse.then.stmts, want):
                    return True
                orelse = orelse.orelse
            if isinstance(orelse, Block) and _jumps_bound_here(orelse.stmts, want):
                return True
    return False


def _case_bound_breaks(stmts) -> int:
    count = 0
    for stmt in stmts:
        if isinstance(stmt, Break):
            count += 1
        elif isinstance(stmt, (For, While, DoWhile, Switch)):
            continue
        elif isinstance(stmt, Block):
            count += _case_bound_breaks(stmt.stmts)
        elif isinstance(stmt, If):
            count += _case_bound_breaks(stmt.then.stmts)
            orelse = stmt.orelse
            while isinstance(orelse, If):
                count += _case_bound_breaks(orelse.then.stmts)
                orelse = orelse.orelse
            if isinstance(orelse, Block):
                count += _case_bound_breaks(orelse.stmts)
    return count


def applicability(node) -> str | None:
    """None when the matching rewrite is safe, else the reason it is not."""
    kind = _classify(node)
    if kind == KIND_FOR:
        if _jumps_bound_here(node.body.stmts, "continue"):
            return "continue would skip the hoisted step"
        return None
    if kind == KIND_WHILE:
        return None
    if kind == KIND_DO_WHILE:
        if _jumps_bound_here(node.body.stmts, "break"):
            return "break in the duplicated prefix has no enclosing loop"
        if _jumps_bound_here(node.body.stmts, "continue"):
            return "continue in the duplicated prefix has no enclosing loop"
        return None
    if kind == KIND_SWITCH:
        for call in walk(node.scrutinee):
            if isinstance(call, Call):
                return "scrutinee contains a call; the chain evaluates it repeatedly"
        for case in node.cases:
            if not case.stmts or not isinstance(case.stmts[-1], (Break, Return)):
                return "a case can fall through"
            bound = _case_bound_breaks(case.stmts)
            trailing = 1 if isinstance(case.stmts[-1], Break) else 0
            if bound != trailing:
                return "an early break binds to the switch itself"
        return None
    if kind in (KIND_IF_ELSE_CHAIN, KIND_IF_WITH_ELSE):
        return None
    return "node is not a transformable structure"


def applicable_sites(unit: SourceUnit, kind: str) -> list:
    nodes = {n.node_id: n for n in walk(unit.ast)}
    out = []
    for nid in structure_sites(unit).get(kind, []):
        if applicability(nodes[nid]) is None:
            out.append(nid)
    return out


# -- masked importance ----------------------------------------------------

def _statement_slots(fn):
    """(container list, index, statement) for every maskable statement."""
    slots = []
    for node in walk(fn):
        if isinstance(node, (Block, Case)):
            for i, stmt in enumerate(node.stmts):
                if not isinstance(stmt, Empty):
                    slots.append((node.stmts, i, stmt))
    return slots


def _tree_distances(fn, targets: set) -> dict:
    """Undirected AST distance from every node to the nearest target."""
    adjacency = {}
    for node in walk(fn):
        adjacency.setdefault(node.node_id, [])
        for child in children(node):
            adjacency[node.node_id].append(child.node_id)
            adjacency.setdefault(child.node_id, []).append(node.node_id)
    frontier = sorted(targets)
    distances = {nid: 0 for nid in frontier}
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for nid in frontier:
            for neighbor in adjacency.get(nid, []):
                if neighbor not in distances:
                    distances[neighbor] = depth
                    nxt.append(neighbor)
        frontier = nxt
    return distances


def true_class_confidence(p_vulnerable: float, true_label: int) -> float:
    return p_vulnerable if true_label == 1 else 1.0 - p_vulnerable


def compute_importance(unit: SourceUnit, gate, true_label: int,
                       site_cap: int) -> ImportanceMap:
    """Per-statement confidence drops from masking with ";".

    `gate` is anything with predict(code) -> verdict; one baseline query
    plus one query per masked site, nearest-to-structure sites first.
    """
    if site_cap < 1:
        raise ValueError("site_cap must be >= 1")
    baseline = gate.predict(unit.text)
    conf_orig = true_class_confidence(baseline.p_vulnerable, true_label)
    queries = 1

    structural = set()
    for ids in structure_sites(unit).values():
        structural.update(ids)
    distances = _tree_distances(unit.ast, structural) if structural else {}

    slots = _statement_slots(unit.ast)
    slots.sort(key=lambda slot: (distances.get(slot[2].node_id, 0), slot[2].node_id))
    slots = slots[:site_cap]

    entries = []
    for _, _, stmt in slots:
        masked_fn = copy.deepcopy(unit.ast)
        for container, index, original in _statement_slots(masked_fn):
            if original.node_id == stmt.node_id:
                container[index] = Empty()
                break
        masked_text = function_to_text(masked_fn)
        verdict = gate.predict(masked_text)
        queries += 1
        drop = conf_orig - true_class_confidence(verdict.p_vulnerable, true_label)
        entries.append((stmt.node_id, drop))
    entries.sort(key=lambda e: (-e[1], e[0]))
    return ImportanceMap(entries=entries, baseline_p=baseline.p_vulnerable,
                         queries_spent=queries)


# -- sampling -------------------------------------------------------------

def sample_transform(unit: SourceUnit, profile: StructureProfile,
                     importance: ImportanceMap, rng) -> tuple:
    """Draw a structure kind, then take its strongest applicable site.

    Returns (TransformOp, resample_events). Non-transformable kinds and
    kinds whose sites are all guarded count as resample events; after
    MAX_KIND_RESAMPLES draws the sampler gives up.
    """
    kinds = [k for k in ALL_KINDS if k in profile.distribution]
    probs = [profile.distribution[k] for k in kinds]
    resamples = []
    for _ in range(MAX_KIND_RESAMPLES):
        u = rng.random()
        acc = 0.0
        drawn = kinds[-1]
        for kind, p in zip(kinds, probs):
            acc += p
            if u < acc:
                drawn = kind
                break
        if drawn not in KIND_TO_OP:
            resamples.append(drawn)
            continue
        sites = applicable_sites(unit, drawn)
        if not sites:
            resamples.append(drawn)
            continue
        site = min(sites, key=lambda nid: (-importance.drop_for(nid), nid))
        return TransformOp(op=KIND_TO_OP[drawn], site=site), resamples
    raise NoApplicableSite(
        f"no applicable site after {MAX_KIND_RESAMPLES} draws "
        f"(drew {', '.join(resamples)})")


# -- the six rewrites -----------------------------------------------------

def _find_site(fn, site: int):
    """Locate a node plus its parent slot: ("list", stmts, i) or ("orelse", if_node)."""
    for node in walk(fn):
        if isinstance(node, (Block, Case)):
            for i, stmt in enumerate(node.stmts):
                if stmt.node_id == site:
                    return stmt, ("list", node.stmts, i)
        if isinstance(node, If) and isinstance(node.orelse, If) \
                and node.orelse.node_id == site:
            return node.orelse, ("orelse", node)
    return None, None


def _replace(slot, replacement: list) -> None:
    kind = slot[0]
    if kind == "list":
        _, stmts, index = slot
        stmts[index:index + 1] = replacement
    else:
        _, if_node = slot
        if len(replacement) == 1 and isinstance(replacement[0], If):
            if_node.orelse = replacement[0]
        else:
            if_node.orelse = Block(stmts=list(replacement))


def _rewrite_for(node: For) -> list:
    cond = node.cond if node.cond is not None else IntLit(value=1)
    body = Block(stmts=list(node.body.stmts)
                 + ([node.step] if node.step is not None else []))
    loop = While(cond=cond, body=body)
    if node.init is None:
        return [loop]
    if isinstance(node.init, Decl):
        # The declaration scope must end with the loop, as for-scope does.
        return [Block(stmts=[node.init, loop])]
    return [node.init, loop]


def _rewrite_while(node: While) -> list:
    cond = node.cond
    if isinstance(cond, IntLit) and cond.value == 1:
        cond = None
    return [For(init=None, cond=cond, step=None, body=node.body)]


def _rewrite_do(node: DoWhile) -> list:
    prefix = copy.deepcopy(node.body)
    return [prefix, While(cond=node.cond, body=node.body)]


def _rewrite_chain_to_nested(node: If) -> list:
    return [If(cond=node.cond, then=node.then,
               orelse=Block(stmts=[node.orelse]))]


def _rewrite_nested_to_chain(node: If) -> list:
    return [If(cond=node.cond, then=node.then, orelse=node.orelse.stmts[0])]


def _strip_trailing_break(stmts: list) -> list:
    if stmts and isinstance(stmts[-1], Break):
        return list(stmts[:-1])
    return list(stmts)


def _rewrite_switch(node: Switch) -> list:
    labeled = [c for c in node.cases if c.label is not None]
    default = next((c for c in node.cases if c.label is None), None)
    tail = Block(stmts=_strip_trailing_break(default.stmts)) if default else None
    if not labeled:
        return tail.stmts if tail is not None else []
    chain = None
    for case in reversed(labeled):
        cond = copy.deepcopy(node.scrutinee)
        branch = If(cond=Binary(op="==", left=cond, right=IntLit(value=case.label)),
                    then=Block(stmts=_strip_trailing_break(case.stmts)),
                    orelse=chain if chain is not None else tail)
        chain = branch
        tail = None
    return [chain]


_REWRITERS = {
    OP_FOR_TO_WHILE: (For, _rewrite_for),
    OP_WHILE_TO_FOR: (While, _rewrite_while),
    OP_DO_TO_WHILE: (DoWhile, _rewrite_do),
    OP_CHAIN_TO_NESTED: (If, _rewrite_chain_to_nested),
    OP_NESTED_TO_CHAIN: (If, _rewrite_nested_to_chain),
    OP_SWITCH_TO_CHAIN: (Switch, _rewrite_switch),
}

_OP_EXPECTED_KIND = {
    OP_FOR_TO_WHILE: KIND_FOR,
    OP_WHILE_TO_FOR: KIND_WHILE,
    OP_DO_TO_WHILE: KIND_DO_WHILE,
    OP_CHAIN_TO_NESTED: KIND_IF_ELSE_CHAIN,
    OP_NESTED_TO_CHAIN: KIND_IF_WITH_ELSE,
    OP_SWITCH_TO_CHAIN: KIND_SWITCH,
}


def apply_transform(unit: SourceUnit, op: TransformOp) -> SourceUnit:
    fn = copy.deepcopy(unit.ast)
    node, slot = _find_site(fn, op.site)
    if node is None:
        raise InapplicableTransform(f"no statement with node id {op.site}")
    expected = _OP_EXPECTED_KIND.get(op.op)
    if expected is None:
        raise InapplicableTransform(f"unknown transform {op.op!r}")
    if _classify(node) != expected:
        raise InapplicableTransform(
            f"{op.op} expects a {expected} site, found {type(node).__name__}")
    reason = applicability(node)
    if reason is not None:
        raise InapplicableTransform(reason)
    _, rewriter = _REWRITERS[op.op]
    replacement = rewriter(node)
    _replace(slot, replacement)
    result = parse_unit(function_to_text(fn), unit.unit_id)
    if result.ast == unit.ast:
        raise InapplicableTransform(f"{op.op} left the unit unchanged")
    return result
