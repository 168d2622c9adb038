import hashlib
import json
import math
import os
import pathlib
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

MASK = (1 << 64) - 1


def splitmix64(x):
    z = (x + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def fnv1a64(data):
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & MASK
    return h


def word_tokens(text):
    return [t.lower() for t in re.findall(rb"[A-Za-z0-9_]+", text.encode())]


def reference_embedding(text, seed, dim):
    tokens = sorted(word_tokens(text)) or [b""]
    keys = [splitmix64((seed + j) & MASK) for j in range(dim)]
    v = [0.0] * dim
    for t in tokens:
        h = fnv1a64(t)
        for j in range(dim):
            x = splitmix64(h ^ keys[j])
            v[j] += 2.0 * ((x >> 11) * 2.0**-53) - 1.0
    norm = 0.0
    for x in v:
        norm += x * x
    norm = math.sqrt(norm)
    if norm == 0.0:
        v[0] = 1.0
        return v
    return [x / norm for x in v]


def reference_nli(premise, hypothesis):
    covered = set(word_tokens(premise))
    distinct = set(word_tokens(hypothesis))
    c = sum(1 for t in distinct if t in covered) / len(distinct) if distinct else 0.0
    return [(c + 0.01) / 1.03, 0.01 / 1.03, (1.0 - c + 0.01) / 1.03]


class ReferenceSidecar:
    """Stub-mode sidecar speaking the /v1 JSON protocol."""

    def __init__(self, dim):
        self.dim = dim
        self.requests = []
        sidecar = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def reply(self, body):
                data = json.dumps(body).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                if self.path == "/v1/health":
                    self.reply({"ok": True, "models": {}, "stub": True})
                else:
                    self.send_error(404)

            def do_POST(self):
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
                sidecar.requests.append((self.path, body))
                if self.path == "/v1/embed":
                    vectors = [reference_embedding(t, 0, sidecar.dim) for t in body["texts"]]
                    self.reply({"dim": sidecar.dim, "vectors": vectors, "model": "stub-embed"})
                elif self.path == "/v1/nli":
                    probs = [reference_nli(body["premise"], h) for h in body["hypotheses"]]
                    self.reply({"probs": probs, "model": "stub-nli"})
                elif self.path == "/v1/summarize":
                    self.reply({"summary": body["text"][:40], "model": "stub-summarizer"})
                else:
                    self.send_error(404)

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}"
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def sidecar():
    s = ReferenceSidecar(dim=16)
    yield s
    s.close()


@pytest.fixture(scope="session")
def fixture_dir():
    default = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
    return pathlib.Path(os.environ.get("ASSORT_FIXTURE_DIR", default))


def sha256_hex(text):
    return hashlib.sha256(text.encode()).hexdigest()
