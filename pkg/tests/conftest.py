import json
import threading
from datetime import datetime, timedelta
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import settings

from ticketrec.corpus import Corpus, Ticket

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


def deterministic_vector(text, dim):
    seed = sum(ord(c) for c in text) % 97
    return [((seed + i) % 7) / 7.0 for i in range(dim)]


class StubProvider:
    """Tiny HTTP embedding provider for tests; counts requests and can be
    told to fail or to return the wrong dimension."""

    def __init__(self, dim=8):
        self.dim = dim
        self.requests = 0
        self.fail_next = 0
        self.wrong_dim = False
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                stub.requests += 1
                if stub.fail_next > 0:
                    stub.fail_next -= 1
                    self.send_response(500)
                    self.end_headers()
                    return
                length = int(self.headers["Content-Length"])
                body = json.loads(self.rfile.read(length))
                dim = stub.dim - 1 if stub.wrong_dim else stub.dim
                payload = json.dumps(
                    {"values": deterministic_vector(body["text"], dim)}
                ).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def endpoint(self):
        return f"http://127.0.0.1:{self.server.server_port}/embed"

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def provider():
    stub = StubProvider()
    yield stub
    stub.close()


def make_ticket(external_id, title="t", description="d", **kwargs):
    return Ticket(external_id=external_id, title=title, description=description, **kwargs)


def make_corpus(n, prefix="T", start=datetime(2022, 1, 1), **kwargs):
    return Corpus(
        make_ticket(f"{prefix}{i:04d}", date_open=start + timedelta(hours=i), **kwargs)
        for i in range(n)
    )


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")
    return path


@pytest.fixture
def tiny_corpus():
    return Corpus(
        [
            make_ticket("A1", "printer broken", "the printer in room 4 is jammed"),
            make_ticket("A2", "vpn down", "cannot connect to the vpn tunnel"),
            make_ticket("A3", "password reset", "forgot my password please reset"),
            make_ticket("A4", "printer toner", "printer toner cartridge empty"),
        ]
    )
