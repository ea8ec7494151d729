"""HTTP completion service over a loaded model snapshot.

POST /api/complete takes {source, left_context, right_context, typed,
top_k} with plain-string contexts (tokenized server-side by the same
whitespace rule as corpora) and returns {candidates: [{word, score}],
latency_ms}. GET /api/health reports liveness. The bundle is immutable,
so any number of threads may serve from one snapshot; candidate lists
are a pure function of the request. CORS headers are always set so a
browser UI on another origin can call the service directly.
"""

from __future__ import annotations

import json
import logging
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .completer import ModelBundle, build_prefix_index
from .corpus import Vocabulary
from .errors import EmptyCandidateError
from .romanize import Romanizer
from .wpm import load_checkpoint

log = logging.getLogger(__name__)


def build_bundle(
    checkpoint_path,
    src_vocab_path,
    tgt_vocab_path,
    rom_path=None,
    case_fold: bool = False,
) -> ModelBundle:
    """Load every artifact the service (or a CLI one-shot) needs."""
    params, cfg = load_checkpoint(checkpoint_path)
    src_vocab = Vocabulary.load(src_vocab_path)
    tgt_vocab = Vocabulary.load(tgt_vocab_path)
    if len(src_vocab) != cfg.src_vocab_size or len(tgt_vocab) != cfg.tgt_vocab_size:
        raise ValueError("vocabulary sizes do not match the checkpoint config")
    rom = Romanizer.from_file(rom_path) if rom_path else Romanizer.identity()
    index = build_prefix_index(tgt_vocab, rom, case_fold=case_fold)
    return ModelBundle(
        params=params, cfg=cfg, src_vocab=src_vocab, tgt_vocab=tgt_vocab,
        index=index, rom=rom,
    )


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    # --- plumbing

    def _send(self, code: int, payload: dict | None) -> None:
        body = b"" if payload is None else json.dumps(payload).encode("utf-8")
        self.send_response(code)
        if body:
            self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        if body:
            self.wfile.write(body)

    def log_message(self, fmt, *args):  # keep request noise out of stderr
        log.debug("%s %s", self.address_string(), fmt % args)

    # --- endpoints

    def do_OPTIONS(self):
        self._send(204, None)

    def do_GET(self):
        if self.path == "/api/health":
            self._send(200, {"status": "ok"})
        else:
            self._send(404, {"error": f"unknown path {self.path}"})

    def do_POST(self):
        if self.path != "/api/complete":
            self._send(404, {"error": f"unknown path {self.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            request = json.loads(self.rfile.read(length) or b"")
        except (ValueError, json.JSONDecodeError):
            self._send(400, {"error": "body is not valid JSON"})
            return
        try:
            response = handle_complete(self.server.bundle, request)
        except BadRequest as exc:
            self._send(400, {"error": str(exc)})
            return
        self._send(200, response)


class BadRequest(ValueError):
    """Request violates the completion API contract."""


def handle_complete(bundle: ModelBundle, request) -> dict:
    """Validate one completion request and run it; raises BadRequest on
    contract violations so callers can map them to 400s."""
    if not isinstance(request, dict):
        raise BadRequest("request body must be a JSON object")
    typed = request.get("typed")
    if not isinstance(typed, str) or not typed:
        raise BadRequest("field 'typed' must be a nonempty string")
    top_k = request.get("top_k", 5)
    if not isinstance(top_k, int) or isinstance(top_k, bool) or top_k < 1:
        raise BadRequest("field 'top_k' must be a positive integer")
    fields = {}
    for name in ("source", "left_context", "right_context"):
        value = request.get(name, "")
        if not isinstance(value, str):
            raise BadRequest(f"field '{name}' must be a string")
        fields[name] = value.split()
    if not fields["source"]:
        raise BadRequest("field 'source' must contain at least one token")

    start = time.perf_counter()
    try:
        suggestions = bundle.complete(
            fields["source"], fields["left_context"], fields["right_context"],
            typed, top_k,
        )
    except EmptyCandidateError:
        suggestions = []
    latency_ms = (time.perf_counter() - start) * 1000.0
    return {
        "candidates": [{"word": s.word, "score": s.score} for s in suggestions],
        "latency_ms": latency_ms,
    }


class GwlanServer(ThreadingHTTPServer):
    daemon_threads = True
    # default backlog of 5 drops connections under concurrent bursts
    request_queue_size = 128

    def __init__(self, address, bundle: ModelBundle):
        super().__init__(address, _Handler)
        self.bundle = bundle


def build_server(bundle: ModelBundle, port: int, host: str = "127.0.0.1") -> GwlanServer:
    return GwlanServer((host, port), bundle)


def serve(bundle: ModelBundle, port: int, host: str = "127.0.0.1") -> None:
    """Blocking serve loop; Ctrl-C stops it."""
    server = build_server(bundle, port, host)
    log.info("serving on http://%s:%d", host, server.server_address[1])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
