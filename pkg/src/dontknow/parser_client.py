"""Client for an external dependency parser.

Contract: POST the raw question as ``text/plain`` (UTF-8) to the parser URL;
a 200 reply carries the parse as CoNLL-U. No parser ships with this package.
"""

import socket
import urllib.error
import urllib.request

from .conllu import ConlluError, read_conllu


class ParserUnavailable(RuntimeError):
    """The parser could not be reached or did not return a usable parse."""


def fetch_conllu(url, text, timeout=10.0):
    req = urllib.request.Request(
        url,
        data=text.encode("utf-8"),
        headers={"Content-Type": "text/plain; charset=utf-8", "Accept": "text/plain"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        raise ParserUnavailable(f"parser at {url} answered HTTP {exc.code}") from None
    except (urllib.error.URLError, socket.timeout, ConnectionError) as exc:
        reason = getattr(exc, "reason", exc)
        raise ParserUnavailable(f"parser at {url} unreachable: {reason}") from None


def parse_text(url, text, timeout=10.0):
    """Parse one question remotely; returns the list of Sentences."""
    body = fetch_conllu(url, text, timeout)
    try:
        sentences = read_conllu(body)
    except ConlluError as exc:
        raise ParserUnavailable(f"parser at {url} returned invalid CoNLL-U: {exc}") from None
    if not sentences:
        raise ParserUnavailable(f"parser at {url} returned no sentence")
    return sentences
