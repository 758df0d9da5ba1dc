import socket
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from dontknow.conllu import read_conllu_file, write_conllu
from dontknow.realize import Engine

FIXTURES = Path(__file__).parent / "fixtures"
GOLD = FIXTURES / "gold.conllu"
CORPUS = FIXTURES / "questions200.conllu"
QQP_MINI = FIXTURES / "qqp_mini.tsv"
GOLDEN_REPORT = FIXTURES / "golden_report.txt"
CONLLU_FILES = sorted(FIXTURES.glob("*.conllu"))


def pinned_engine(prefix="I am not sure", suffix="", ne_prob=0.0):
    """Engine whose prefix and suffix are fixed, so only the body varies."""
    base = Engine()
    config = base.config.replace(prefix_pool=(prefix,), whether_prefix_pool=("I'm not sure whether",),
                                 suffix_pool=(suffix,), ne_substitution_prob=ne_prob)
    return Engine(base.templates, config)


@pytest.fixture(scope="session")
def engine():
    return Engine()


@pytest.fixture(scope="session")
def gold():
    return {s.id: s for s in read_conllu_file(GOLD)}


@pytest.fixture(scope="session")
def corpus():
    return read_conllu_file(CORPUS)


class _FakeParser(BaseHTTPRequestHandler):
    """Answers POSTed text with the gold parse whose text matches, else 404."""

    parses = {}

    def do_POST(self):
        text = self.rfile.read(int(self.headers.get("Content-Length", 0))).decode("utf-8").strip()
        sentence = self.parses.get(text)
        if sentence is None:
            self.send_response(404)
            self.end_headers()
            return
        body = write_conllu([sentence]).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture(scope="session")
def parser_url():
    _FakeParser.parses = {s.text: s for s in read_conllu_file(CORPUS)}
    server = ThreadingHTTPServer(("127.0.0.1", 0), _FakeParser)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/parse"
    server.shutdown()
    server.server_close()


@pytest.fixture
def dead_url():
    # a port that was just free; nothing listens there
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    return f"http://127.0.0.1:{port}/parse"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
