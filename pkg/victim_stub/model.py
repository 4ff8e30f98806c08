"""Token-count heuristic with a published weight sidecar."""

import json
import math
import re
from pathlib import Path

DEFAULT_WEIGHTS_PATH = Path(__file__).resolve().parent / "weights.json"

WORD_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
LOOP_KEYWORDS = frozenset(("for", "while", "do"))

# Keep the logistic output strictly inside (0, 1) even when the linear
# score saturates the float.
_EPS = 1e-9


def logistic(x: float) -> float:
    if x >= 0:
        p = 1.0 / (1.0 + math.exp(-x))
    else:
        e = math.exp(x)
        p = e / (1.0 + e)
    return min(max(p, _EPS), 1.0 - _EPS)


class HeuristicModel:
    """p_vulnerable = logistic(sum(token counts * weights) + loops + bias)."""

    def __init__(self, token_weights: dict, loop_weight: float, bias: float):
        self.token_weights = {str(k): float(v)
                              for k, v in token_weights.items()}
        self.loop_weight = float(loop_weight)
        self.bias = float(bias)

    @classmethod
    def from_file(cls, path=DEFAULT_WEIGHTS_PATH) -> "HeuristicModel":
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        return cls(token_weights=raw["token_weights"],
                   loop_weight=raw["loop_weight"], bias=raw["bias"])

    def linear_score(self, code: str) -> float:
        total = self.bias
        for word in WORD_RE.findall(code):
            total += self.token_weights.get(word, 0.0)
            if word in LOOP_KEYWORDS:
                total += self.loop_weight
        return total

    def score(self, code: str) -> float:
        return logistic(self.linear_score(code))
