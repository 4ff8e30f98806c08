"""Evaluation math: attack success rate, confidence drop, query
efficiency, code similarity, population diversity, and the
vulnerable-class miss rate.

Similarity follows the four-part weighted scheme: plain token BLEU,
keyword-weighted BLEU, shape-only subtree overlap, and dataflow-edge
F1 over canonicalized variables.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (NoAttempts, NoVulnerableSamples, PopulationTooSmall,
                     ZeroQueries)
from .frontend import (Assign, Binary, Block, Call, Case, Decl, Declarator,
                       DoWhile, Empty, ExprStmt, For, FunctionDef, If, Index,
                       IntLit, KEYWORDS, Return, SourceUnit, StrLit, Switch,
                       TokenKind, Unary, Var, While, children, tokenize, walk)

KEYWORD_WEIGHT = 5.0
BLEU_ORDER = 4


@dataclass(frozen=True)
class CodeBleuWeights:
    alpha: float = 0.25
    beta: float = 0.25
    gamma: float = 0.25
    delta: float = 0.25

    def validate(self) -> None:
        total = self.alpha + self.beta + self.gamma + self.delta
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"codebleu weights must sum to 1, got {total}")


# -- aggregate attack metrics ---------------------------------------------

def asr(outcomes: list) -> float:
    """Percent of attempted attacks that flipped the verdict."""
    attempted = [o for o in outcomes if not o.skipped]
    if not attempted:
        raise NoAttempts("no attempted samples")
    return 100.0 * sum(1 for o in attempted if o.success) / len(attempted)


def delta_drop(outcomes: list) -> float:
    """Mean true-class confidence drop over every attempted sample."""
    attempted = [o for o in outcomes if not o.skipped]
    if not attempted:
        raise NoAttempts("no attempted samples")
    return sum(o.delta_drop for o in attempted) / len(attempted)


def apq(asr_percent: float, mean_queries: float) -> float:
    if mean_queries <= 0:
        raise ZeroQueries("mean queries must be positive")
    return asr_percent / mean_queries


def fnr(outcomes: list) -> float:
    """Percent of attempted truly-vulnerable samples judged safe after attack."""
    vulnerable = [o for o in outcomes if not o.skipped and o.true_label == 1]
    if not vulnerable:
        raise NoVulnerableSamples("no attempted vulnerable samples")
    missed = sum(1 for o in vulnerable if o.final_label == 0)
    return 100.0 * missed / len(vulnerable)


# -- BLEU over code tokens ------------------------------------------------

def code_tokens(text: str) -> list:
    return [t.text for t in tokenize(text) if t.kind is not TokenKind.EOF]


def _ngrams(tokens: list, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _ngram_weight(gram: tuple, weighted: bool) -> float:
    if weighted and any(tok in KEYWORDS for tok in gram):
        return KEYWORD_WEIGHT
    return 1.0


def bleu(reference: list, candidate: list, weighted: bool = False) -> float:
    """Corpus-of-one BLEU-4 with brevity penalty and no smoothing.

    Orders with zero possible candidate n-grams are skipped rather than
    scored as zero; an order with possible but unmatched n-grams zeroes
    the whole score.
    """
    precisions = []
    for n in range(1, BLEU_ORDER + 1):
        cand = _ngrams(candidate, n)
        if not cand:
            continue
        ref = _ngrams(reference, n)
        matched = 0.0
        total = 0.0
        for gram, count in cand.items():
            weight = _ngram_weight(gram, weighted)
            total += weight * count
            matched += weight * min(count, ref.get(gram, 0))
        precisions.append(matched / total)
    if not precisions or any(p == 0.0 for p in precisions):
        return 0.0
    log_mean = sum(math.log(p) for p in precisions) / len(precisions)
    c, r = len(candidate), len(reference)
    if c == 0:
        return 0.0
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_mean)


# -- shape-only subtree overlap -------------------------------------------

def _shape(node) -> tuple:
    """Structural fingerprint: node kinds and operators, no names or
    literal values."""
    kind = type(node).__name__
    if isinstance(node, (Binary, Unary)):
        head = (kind, node.op)
    elif isinstance(node, Declarator):
        head = (kind, node.array_size is not None, node.init is not None)
    else:
        head = (kind,)
    return head + tuple(_shape(child) for child in children(node))


def subtree_hashes(unit: SourceUnit) -> Counter:
    return Counter(_shape(node) for node in walk(unit.ast))


def match_ast(reference: SourceUnit, candidate: SourceUnit) -> float:
    ref = subtree_hashes(reference)
    cand = subtree_hashes(candidate)
    total = sum(cand.values())
    if total == 0:
        return 1.0
    overlap = sum(min(count, ref.get(shape, 0)) for shape, count in cand.items())
    return overlap / total


# -- dataflow edges over canonicalized variables --------------------------

def dataflow_edges(unit: SourceUnit) -> Counter:
    """Multiset of (canonical variable, version at use) pairs.

    Variables canonicalize to var_i by first appearance; the version is
    how many writes to that variable precede the use in evaluation
    order. Parameters count as an initial write.
    """
    canon: dict = {}
    versions: dict = {}
    edges: Counter = Counter()

    def name_of(raw: str) -> str:
        if raw not in canon:
            canon[raw] = f"var_{len(canon)}"
        return canon[raw]

    def write(raw: str) -> None:
        key = name_of(raw)
        versions[key] = versions.get(key, -1) + 1

    def use(raw: str) -> None:
        key = name_of(raw)
        edges[(key, versions.get(key, 0))] += 1

    def visit_expr(expr) -> None:
        if isinstance(expr, Var):
            use(expr.name)
        elif isinstance(expr, Index):
            use(expr.name)
            visit_expr(expr.index)
        elif isinstance(expr, (Binary,)):
            visit_expr(expr.left)
            visit_expr(expr.right)
        elif isinstance(expr, Unary):
            visit_expr(expr.operand)
        elif isinstance(expr, Call):
            for arg in expr.args:
                visit_expr(arg)

    def visit_stmt(stmt) -> None:
        if isinstance(stmt, Block):
            for s in stmt.stmts:
                visit_stmt(s)
        elif isinstance(stmt, Decl):
            for decl in stmt.declarators:
                if decl.init is not None:
                    visit_expr(decl.init)
                write(decl.name)
        elif isinstance(stmt, Assign):
            visit_expr(stmt.value)
            if isinstance(stmt.target, Index):
                use(stmt.target.name)
                visit_expr(stmt.target.index)
                write(stmt.target.name)
            else:
                write(stmt.target.name)
        elif isinstance(stmt, If):
            visit_expr(stmt.cond)
            visit_stmt(stmt.then)
            if stmt.orelse is not None:
                visit_stmt(stmt.orelse)
        elif isinstance(stmt, For):
            if stmt.init is not None:
                visit_stmt(stmt.init)
            if stmt.cond is not None:
                visit_expr(stmt.cond)
            visit_stmt(stmt.body)
            if stmt.step is not None:
                visit_stmt(stmt.step)
        elif isinstance(stmt, While):
            visit_expr(stmt.cond)
            visit_stmt(stmt.body)
        elif isinstance(stmt, DoWhile):
            visit_stmt(stmt.body)
            visit_expr(stmt.cond)
        elif isinstance(stmt, Switch):
            visit_expr(stmt.scrutinee)
            for case in stmt.cases:
                for s in case.stmts:
                    visit_stmt(s)
        elif isinstance(stmt, Return):
            if stmt.value is not None:
                visit_expr(stmt.value)
        elif isinstance(stmt, ExprStmt):
            visit_expr(stmt.expr)

    fn: FunctionDef = unit.ast
    for param in fn.params:
        write(param)
    visit_stmt(fn.body)
    return edges


def match_dataflow(reference: SourceUnit, candidate: SourceUnit) -> float:
    ref = dataflow_edges(reference)
    cand = dataflow_edges(candidate)
    ref_total = sum(ref.values())
    cand_total = sum(cand.values())
    if ref_total == 0 and cand_total == 0:
        return 1.0
    if ref_total == 0 or cand_total == 0:
        return 0.0
    overlap = sum(min(count, ref.get(edge, 0)) for edge, count in cand.items())
    precision = overlap / cand_total
    recall = overlap / ref_total
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def codebleu(reference: SourceUnit, candidate: SourceUnit,
             weights: CodeBleuWeights | None = None) -> dict:
    weights = weights or CodeBleuWeights()
    weights.validate()
    ref_tokens = code_tokens(reference.text)
    cand_tokens = code_tokens(candidate.text)
    plain = bleu(ref_tokens, cand_tokens, weighted=False)
    keyword = bleu(ref_tokens, cand_tokens, weighted=True)
    ast_part = match_ast(reference, candidate)
    df_part = match_dataflow(reference, candidate)
    total = (weights.alpha * plain + weights.beta * keyword
             + weights.gamma * ast_part + weights.delta * df_part)
    return {
        "codebleu": total,
        "bleu": plain,
        "bleu_weighted": keyword,
        "match_ast": ast_part,
        "match_dataflow": df_part,
    }


# -- population diversity -------------------------------------------------

def _levenshtein(a, b) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = np.arange(len(b) + 1)
    for i, item_a in enumerate(a, start=1):
        current = np.empty(len(b) + 1, dtype=np.int64)
        current[0] = i
        for j, item_b in enumerate(b, start=1):
            current[j] = min(previous[j] + 1, current[j - 1] + 1,
                             previous[j - 1] + (item_a != item_b))
        previous = current
    return int(previous[-1])


def cad(population: list) -> float:
    """Mean pairwise normalized edit distance between name vectors."""
    n = len(population)
    if n < 2:
        raise PopulationTooSmall("diversity needs at least two vectors")
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            longest = max(len(population[i]), len(population[j]))
            if longest == 0:
                continue
            total += _levenshtein(population[i], population[j]) / longest
    return total * 2.0 / (n * (n - 1))


def cad_raw_chars(codes: list) -> float:
    """Secondary variant: unnormalized character edit distance over
    rendered code."""
    n = len(codes)
    if n < 2:
        raise PopulationTooSmall("diversity needs at least two programs")
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += _levenshtein(codes[i], codes[j])
    return total * 2.0 / (n * (n - 1))
