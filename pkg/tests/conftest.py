import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


class FakeEndpoint:
    """Scripted HTTP server speaking the embedding and generation protocols."""

    def __init__(self):
        self.requests = []
        self.ndjson_lines = []
        self.sse_lines = []
        self.embedding = [1.0, 0.0, 0.0]
        self.status = 200
        handler = self._handler()
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}"
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    def _handler(self):
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                outer.requests.append({"path": self.path, "body": body,
                                       "headers": dict(self.headers)})
                if outer.status != 200:
                    self.send_response(outer.status)
                    self.end_headers()
                    self.wfile.write(b"nope")
                    return
                if self.path == "/api/embeddings":
                    payload = json.dumps({"embedding": outer.embedding}).encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(payload)))
                    self.end_headers()
                    self.wfile.write(payload)
                elif self.path == "/api/generate":
                    self.send_response(200)
                    self.send_header("Content-Type", "application/x-ndjson")
                    self.end_headers()
                    for line in outer.ndjson_lines:
                        self.wfile.write(line.encode() + b"\n")
                        self.wfile.flush()
                elif self.path == "/v1/chat/completions":
                    self.send_response(200)
                    self.send_header("Content-Type", "text/event-stream")
                    self.end_headers()
                    for line in outer.sse_lines:
                        self.wfile.write(line.encode() + b"\n\n")
                        self.wfile.flush()
                else:
                    self.send_response(404)
                    self.end_headers()

        return Handler


@pytest.fixture
def endpoint():
    ep = FakeEndpoint()
    ep.thread.start()
    yield ep
    ep.server.shutdown()
    ep.server.server_close()


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Context manager factory: time a named criterion against its limit and log the verdict."""
    import contextlib
    import time

    log = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    @contextlib.contextmanager
    def run(name: str, limit: float):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            log.append(f"FAIL  {name}  ({elapsed:.2f}s / {limit:g}s)  {type(exc).__name__}")
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed < limit
        log.append(f"{'PASS' if ok else 'FAIL'}  {name}  ({elapsed:.2f}s / {limit:g}s)")
        if not ok:
            pytest.fail(f"{name} took {elapsed:.2f}s, limit {limit:g}s")

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
