"""Substitute generation and identifier renaming.

Candidates for each renameable identifier come from a vocabulary ranked
by embedding distance. The default embedding needs no external data: a
word is the unit-normalized sum of deterministic vectors for its
character 3-5-grams. A word2vec-style text file can be loaded instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CaptureCollision, EmptyVocabulary
from .frontend import (
    KEYWORDS,
    Call,
    Decl,
    FunctionDef,
    SourceUnit,
    TokenKind,
    Var,
    Index,
    tokenize,
    walk,
)
from .frontend.printer import function_to_text
from .frontend.unit import parse_unit
from .hashing import fnv1a64, unit_floats

SUBWORD_DIM = 64
SUBWORD_BUCKETS = 2048
SUBWORD_SEED = 0x5EEDF00D
NGRAM_MIN = 3
NGRAM_MAX = 5

_bucket_cache: dict = {}


def _bucket_vector(bucket: int) -> list:
    vec = _bucket_cache.get(bucket)
    if vec is None:
        vec = unit_floats(SUBWORD_SEED ^ (bucket * 0x9E3779B97F4A7C15), SUBWORD_DIM)
        _bucket_cache[bucket] = vec
    return vec


class EmbeddingProvider:
    """Maps identifier strings to fixed-dimension real vectors."""

    def __init__(self, mode: str, dim: int, table: dict | None = None):
        self.mode = mode
        self.dim = dim
        self.table = table or {}
        self._memo: dict = {}

    @classmethod
    def subword_hash(cls) -> "EmbeddingProvider":
        return cls("SubwordHash", SUBWORD_DIM)

    @classmethod
    def from_vector_file(cls, path: str) -> "EmbeddingProvider":
        """Load "count dim" header then "word f1 .. fd" lines."""
        table = {}
        with open(path, "r", encoding="utf-8") as f:
            header = f.readline().split()
            if len(header) != 2:
                raise ValueError(f"{path}: expected 'count dim' header")
            dim = int(header[1])
            for lineno, line in enumerate(f, start=2):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != dim + 1:
                    raise ValueError(f"{path}:{lineno}: expected {dim} components")
                table[parts[0]] = [float(x) for x in parts[1:]]
        return cls("VectorFile", dim, table)

    def embed(self, word: str) -> list:
        cached = self._memo.get(word)
        if cached is not None:
            return cached
        if self.mode == "VectorFile":
            vec = self.table.get(word, [0.0] * self.dim)
        else:
            vec = self._subword_embed(word)
        self._memo[word] = vec
        return vec

    def _subword_embed(self, word: str) -> list:
        padded = f"<{word}>"
        acc = [0.0] * self.dim
        for size in range(NGRAM_MIN, NGRAM_MAX + 1):
            for start in range(len(padded) - size + 1):
                gram = padded[start:start + size]
                bucket = fnv1a64(gram) % SUBWORD_BUCKETS
                vec = _bucket_vector(bucket)
                for i in range(self.dim):
                    acc[i] += vec[i]
        norm = math.sqrt(sum(x * x for x in acc))
        if norm > 0.0:
            acc = [x / norm for x in acc]
        return acc


def similarity(v: str, v_prime: str, provider: EmbeddingProvider) -> float:
    """1 - cosine, in [0, 2]; 0 means identical direction."""
    a = provider.embed(v)
    b = provider.embed(v_prime)
    norm_a = math.sqrt(sum(x * x for x in a))
    norm_b = math.sqrt(sum(x * x for x in b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 1.0
    cos = sum(x * y for x, y in zip(a, b)) / (norm_a * norm_b)
    return 1.0 - max(-1.0, min(1.0, cos))


def unit_name_set(unit: SourceUnit) -> set:
    """Every identifier-like token in the unit, callees and all."""
    names = set()
    for tok in tokenize(unit.text):
        if tok.kind is TokenKind.IDENTIFIER:
            names.add(tok.text)
    return names


@dataclass
class CandidatePool:
    """Ranked substitutes per renameable identifier.

    ranked[name] holds the entire filtered vocabulary sorted by
    (distance, name); the first top_k entries are the similarity-guided
    slice, the full list is the randomized sampling domain.
    """

    identifiers: list
    ranked: dict
    top_k: int
    vocabulary: list = field(default_factory=list)

    def candidates(self, name: str) -> list:
        return self.ranked[name]

    def guided_slice(self, name: str) -> list:
        return self.ranked[name][:self.top_k]


def build_pool(unit: SourceUnit, vocabulary: list, provider: EmbeddingProvider,
               k: int) -> CandidatePool:
    if not vocabulary:
        raise EmptyVocabulary("no vocabulary entries supplied")
    taken = unit_name_set(unit) | set(KEYWORDS)
    seen = set()
    legal = []
    for word in vocabulary:
        if word in taken or word in seen or not word:
            continue
        seen.add(word)
        legal.append(word)
    ranked = {}
    for name in unit.identifiers:
        scored = [(similarity(name, cand, provider), cand) for cand in legal]
        scored.sort()
        ranked[name] = [(cand, dist) for dist, cand in scored]
    return CandidatePool(identifiers=list(unit.identifiers), ranked=ranked,
                         top_k=k, vocabulary=legal)


def harvest_vocabulary(units: list) -> list:
    """Default vocabulary: every identifier declared anywhere in the corpus."""
    seen = set()
    vocab = []
    for unit in units:
        for name in unit.identifiers:
            if name not in seen:
                seen.add(name)
                vocab.append(name)
    return sorted(vocab)


def load_vocabulary(path: str) -> list:
    with open(path, "r", encoding="utf-8") as f:
        words = [line.strip() for line in f]
    return [w for w in words if w and not w.startswith("#")]


def rename(unit: SourceUnit, substitution: dict) -> SourceUnit:
    """Apply identifier substitutions, rejecting any capture.

    A candidate that collides with a keyword, with any name appearing in
    the unit, or with another substitution's chosen value raises
    CaptureCollision rather than silently changing bindings.
    """
    if not substitution:
        return unit
    unknown = set(substitution) - set(unit.identifiers)
    if unknown:
        raise CaptureCollision(sorted(unknown)[0], substitution[sorted(unknown)[0]])
    names_in_unit = unit_name_set(unit)
    chosen = set()
    for source, target in substitution.items():
        if target in KEYWORDS:
            raise CaptureCollision(source, target)
        if target in names_in_unit:
            raise CaptureCollision(source, target)
        if target in chosen:
            raise CaptureCollision(source, target)
        chosen.add(target)

    fn = _rename_ast(unit.ast, substitution)
    return parse_unit(function_to_text(fn), unit.unit_id)


def _rename_ast(fn: FunctionDef, mapping: dict) -> FunctionDef:
    import copy

    clone = copy.deepcopy(fn)
    clone.params = [(t, mapping.get(n, n)) for t, n in clone.params]
    for node in walk(clone):
        if isinstance(node, Var) and node.name in mapping:
            node.name = mapping[node.name]
        elif isinstance(node, Index) and node.name in mapping:
            node.name = mapping[node.name]
        elif isinstance(node, Decl):
            for d in node.declarators:
                if d.name in mapping:
                    d.name = mapping[d.name]
        elif isinstance(node, Call):
            # Callees are never renamed: only locals and parameters move.
            continue
    return clone
