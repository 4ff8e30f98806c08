"""Reference external victim: a deterministic heuristic classifier behind
the newline-delimited-JSON stdio protocol and the HTTP /predict protocol.

Standard library only, so integration tests can spawn it with nothing
installed. The scoring weights live in a JSON sidecar next to this package.
"""

from .model import DEFAULT_WEIGHTS_PATH, HeuristicModel
from .server import serve_http, serve_stdio

__all__ = ["DEFAULT_WEIGHTS_PATH", "HeuristicModel", "serve_http",
           "serve_stdio"]
