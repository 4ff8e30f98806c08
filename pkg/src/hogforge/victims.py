"""Black-box victim abstraction with exact query accounting.

Builtins are pure functions of the code string with published weight
tables; external victims speak either newline-delimited JSON over a
subprocess pipe or HTTP POST /predict. Every predict call bumps the
handle's counter exactly once, transport retries included.
"""

from __future__ import annotations

import json
import math
import re
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import MalformedResponse, UnknownBuiltin, VictimUnavailable
from .hashing import fnv1a64

DATA_DIR = Path(__file__).parent / "data" / "victims"
MAX_TRANSPORT_RETRIES = 2

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[0-9]+")
# Token features for the bag model: words, numbers, operator runs; braces
# carry no signal so structural brace churn cannot move the score.
_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[0-9]+|[^\sA-Za-z0-9_{}]")


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@dataclass(frozen=True)
class VictimVerdict:
    p_vulnerable: float

    @property
    def label(self) -> int:
        return 1 if self.p_vulnerable >= 0.5 else 0


class ConstantVictim:
    def __init__(self, p: float):
        if not 0.0 <= p <= 1.0:
            raise UnknownBuiltin(f"constant victim needs p in [0,1], got {p}")
        self.p = p

    def score(self, code: str) -> float:
        return self.p


class TokenBagVictim:
    """Logistic regression over hashed token counts."""

    def __init__(self, config: dict):
        self.weights = [float(w) for w in config["weights"]]
        self.bias = float(config["bias"])
        self.buckets = len(self.weights)

    def score(self, code: str) -> float:
        z = self.bias
        for token in _TOKEN_RE.findall(code):
            z += self.weights[fnv1a64(token) % self.buckets]
        return sigmoid(z)


class StructSnifferVictim:
    """Sensitive only to structure keywords, never to identifiers."""

    def __init__(self, config: dict):
        self.weight = float(config["keyword_weight"])
        self.bias = float(config["bias"])
        self.keywords = list(config["keywords"])

    def score(self, code: str) -> float:
        z = self.bias
        for kw in self.keywords:
            z += self.weight * len(re.findall(rf"\b{re.escape(kw)}\b", code))
        return sigmoid(z)


# Textual fingerprints for structure edits: the rewrite introduces the
# first keyword and eliminates the second from the unit.
_TRANSFORM_SIGNATURES = {
    "For2While": ("while", "for"),
    "While2For": ("for", "while"),
    "ChDo": ("while", "do"),
    "ChSwitch": ("if", "switch"),
}


class PlantedVictim:
    """Verdict rides a ramp as planted secrets are applied to the code.

    A secret is one of: a substitution {"orig", "repl"} (applied once
    the replacement word appears and the original is gone), a bare
    token {"token"} (applied once the word is gone), or a structure
    edit {"transform"} (applied once the rewrite's keyword fingerprint
    shows). With k of n secrets applied the score moves linearly from
    `base` (k=0) to `flip_to` (k=n).
    """

    def __init__(self, config: dict):
        self.base = float(config["base"])
        self.flip_to = float(config["flip_to"])
        self.secrets = list(config["secrets"])
        if not self.secrets:
            raise UnknownBuiltin("planted victim needs at least one secret")
        for secret in self.secrets:
            if "transform" in secret and secret["transform"] not in _TRANSFORM_SIGNATURES:
                raise UnknownBuiltin(
                    f"planted victim has no fingerprint for transform "
                    f"{secret['transform']!r}")
            if not ({"orig", "repl"} <= secret.keys()
                    or "token" in secret or "transform" in secret):
                raise UnknownBuiltin(f"unusable planted secret: {secret!r}")

    @staticmethod
    def _has_word(code: str, word: str) -> bool:
        return re.search(rf"\b{re.escape(word)}\b", code) is not None

    def _applied(self, code: str, secret: dict) -> bool:
        if "transform" in secret:
            gained, lost = _TRANSFORM_SIGNATURES[secret["transform"]]
            return self._has_word(code, gained) and not self._has_word(code, lost)
        if "token" in secret:
            return not self._has_word(code, secret["token"])
        return self._has_word(code, secret["repl"]) \
            and not self._has_word(code, secret["orig"])

    def score(self, code: str) -> float:
        applied = sum(1 for s in self.secrets if self._applied(code, s))
        p = self.base + (self.flip_to - self.base) * (applied / len(self.secrets))
        return max(0.0, min(1.0, p))


def _load_json(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def builtin_victims() -> dict:
    """Catalog of builtin victim constructors keyed by name."""
    return {
        "token-bag": lambda arg: TokenBagVictim(_load_json(Path(arg) if arg else DATA_DIR / "token_bag.json")),
        "struct-sniffer": lambda arg: StructSnifferVictim(_load_json(Path(arg) if arg else DATA_DIR / "struct_sniffer.json")),
        "planted": lambda arg: PlantedVictim(_load_json(Path(arg) if arg else DATA_DIR / "planted.json")),
    }


class _SubprocessClient:
    """Newline-delimited JSON over a child process's stdin/stdout."""

    def __init__(self, cmd: str, timeout: float):
        self.cmd = cmd
        self.timeout = timeout
        self.proc = None
        self.next_id = 0
        self.pending: dict = {}

    def _ensure(self) -> None:
        if self.proc is None or self.proc.poll() is not None:
            try:
                self.proc = subprocess.Popen(
                    shlex.split(self.cmd), stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE, text=True, bufsize=1)
            except OSError as exc:
                raise VictimUnavailable(f"cannot spawn victim: {exc}")
            self.pending.clear()

    def score(self, code: str) -> float:
        self._ensure()
        request_id = str(self.next_id)
        self.next_id += 1
        try:
            self.proc.stdin.write(json.dumps({"id": request_id, "code": code}) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise VictimUnavailable(f"victim pipe closed: {exc}")
        while True:
            if request_id in self.pending:
                return _validate_p(self.pending.pop(request_id))
            line = self.proc.stdout.readline()
            if not line:
                raise VictimUnavailable("victim closed stdout")
            try:
                message = json.loads(line)
            except json.JSONDecodeError:
                raise MalformedResponse(f"victim sent non-JSON line: {line[:80]!r}")
            if not isinstance(message, dict):
                raise MalformedResponse("victim response is not an object")
            if "error" in message and "p_vulnerable" not in message:
                raise MalformedResponse(f"victim error: {message['error']}")
            self.pending[str(message.get("id"))] = message.get("p_vulnerable")

    def close(self) -> None:
        if self.proc is not None and self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
        self.proc = None


class _HttpClient:
    def __init__(self, url: str, timeout: float):
        if not url.startswith("http://") and not url.startswith("https://"):
            url = "http://" + url
        self.url = url.rstrip("/")
        self.timeout = timeout
        self.next_id = 0
        self.session = requests.Session()

    def score(self, code: str) -> float:
        request_id = str(self.next_id)
        self.next_id += 1
        try:
            resp = self.session.post(
                f"{self.url}/predict",
                json={"id": request_id, "code": code},
                timeout=self.timeout)
        except requests.RequestException as exc:
            raise VictimUnavailable(f"http victim unreachable: {exc}")
        if resp.status_code != 200:
            raise VictimUnavailable(f"http victim returned {resp.status_code}")
        try:
            message = resp.json()
        except ValueError:
            raise MalformedResponse("http victim sent non-JSON body")
        return _validate_p(message.get("p_vulnerable"))

    def close(self) -> None:
        self.session.close()


def _validate_p(value) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise MalformedResponse(f"p_vulnerable missing or non-numeric: {value!r}")
    p = float(value)
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise MalformedResponse(f"p_vulnerable out of range: {p}")
    return p


class VictimHandle:
    """One victim connection with a per-task query counter."""

    def __init__(self, model, kind: str, spec: str, memo: bool = False):
        self.model = model
        self.kind = kind
        self.spec = spec
        self.query_counter = 0
        self.memo_enabled = memo
        self._memo: dict = {}

    def predict(self, code: str) -> VictimVerdict:
        # The counter moves before the call: failed transports that give
        # up still consumed an attack query, and memo hits cost the same
        # as real ones so reported query counts reflect true attack cost.
        self.query_counter += 1
        if self.memo_enabled and code in self._memo:
            return self._memo[code]
        last_error = None
        for attempt in range(1 + MAX_TRANSPORT_RETRIES):
            try:
                verdict = VictimVerdict(p_vulnerable=_validate_p(self.model.score(code)))
                if self.memo_enabled:
                    self._memo[code] = verdict
                return verdict
            except VictimUnavailable as exc:
                last_error = exc
                continue
            except MalformedResponse:
                raise
        raise last_error

    def close(self) -> None:
        closer = getattr(self.model, "close", None)
        if closer is not None:
            closer()


def make_victim(spec: str, memo: bool = False, timeout: float = 30.0) -> VictimHandle:
    """Build a handle from a spec string.

    Forms: `constant:<p>`, `token-bag[:config.json]`,
    `struct-sniffer[:config.json]`, `planted[:config.json]`,
    `subprocess:<command line>`, `http:<base url>`.
    """
    if spec.startswith("constant:"):
        return VictimHandle(ConstantVictim(float(spec.split(":", 1)[1])),
                            "builtin", spec, memo)
    if spec.startswith("subprocess:"):
        cmd = spec.split(":", 1)[1]
        return VictimHandle(_SubprocessClient(cmd, timeout), "subprocess", spec, memo)
    if spec.startswith("http://") or spec.startswith("https://"):
        return VictimHandle(_HttpClient(spec, timeout), "http", spec, memo)
    if spec.startswith("http:"):
        return VictimHandle(_HttpClient(spec.split(":", 1)[1], timeout), "http", spec, memo)
    name, _, arg = spec.partition(":")
    catalog = builtin_victims()
    if name not in catalog:
        raise UnknownBuiltin(f"unknown victim spec {spec!r}")
    return VictimHandle(catalog[name](arg), "builtin", spec, memo)
