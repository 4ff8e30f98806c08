"""Both wire frontends over one model.

stdio mode reads one JSON request per line and answers one JSON response
per line. A small worker pool scores requests, so responses can leave in
any order; callers must match on the echoed id. A malformed line gets an
error response and the loop keeps going.

HTTP mode is the same contract behind POST /predict plus GET /healthz.
"""

import json
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .model import HeuristicModel

POOL_WORKERS = 8


def _validate_request(message):
    """Returns (id, code) or raises ValueError with the schema complaint."""
    if not isinstance(message, dict):
        raise ValueError("request must be a JSON object")
    if "code" not in message:
        raise ValueError("request is missing 'code'")
    code = message["code"]
    if not isinstance(code, str):
        raise ValueError("'code' must be a string")
    return message.get("id"), code


def serve_stdio(model: HeuristicModel, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    write_lock = threading.Lock()

    def emit(payload: dict) -> None:
        line = json.dumps(payload, sort_keys=True)
        with write_lock:
            stdout.write(line + "\n")
            stdout.flush()

    def answer(line: str) -> None:
        try:
            message = json.loads(line)
        except json.JSONDecodeError:
            emit({"id": None, "error": "invalid JSON"})
            return
        try:
            request_id, code = _validate_request(message)
        except ValueError as exc:
            request_id = message.get("id") if isinstance(message, dict) else None
            emit({"id": request_id, "error": str(exc)})
            return
        emit({"id": request_id, "p_vulnerable": model.score(code)})

    with ThreadPoolExecutor(max_workers=POOL_WORKERS) as pool:
        for line in stdin:
            if not line.strip():
                continue
            pool.submit(answer, line)


class _PredictHandler(BaseHTTPRequestHandler):
    model = None
    protocol_version = "HTTP/1.1"

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/healthz":
            self._send_json(200, {"status": "ok"})
        elif self.path == "/predict":
            self._send_json(405, {"error": "use POST"})
        else:
            self._send_json(404, {"error": "unknown path"})

    def do_POST(self):
        if self.path != "/predict":
            self._send_json(404, {"error": "unknown path"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            length = 0
        raw = self.rfile.read(length)
        try:
            message = json.loads(raw.decode("utf-8"))
            request_id, code = _validate_request(message)
        except (ValueError, UnicodeDecodeError) as exc:
            self._send_json(400, {"error": str(exc) or "invalid body"})
            return
        self._send_json(200, {"id": request_id,
                              "p_vulnerable": self.model.score(code)})

    def log_message(self, fmt, *args):
        pass


def serve_http(model: HeuristicModel, host: str = "127.0.0.1",
               port: int = 0) -> ThreadingHTTPServer:
    """Builds the server bound to (host, port); caller runs serve_forever."""
    handler = type("BoundPredictHandler", (_PredictHandler,),
                   {"model": model})
    return ThreadingHTTPServer((host, port), handler)
