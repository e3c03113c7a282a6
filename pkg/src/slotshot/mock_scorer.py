"""A deterministic external scorer for testing the wire protocol.

Speaks line-delimited JSON on stdin/stdout, or on a TCP socket with --port.
Scores are a pure hash of the request content, so a client can verify that
every response was matched to the right request. With --shuffle-window K the
process buffers up to K requests and answers them in reverse order, which
exercises out-of-order id matching.

Run with: python -m slotshot.mock_scorer [--port P] [--shuffle-window K]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import socket
import sys
from typing import IO, Sequence


def _token_score(token: str, position: int, salt: str) -> float:
    digest = hashlib.sha256(f"{salt}:{position}:{token}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") % 1000 / 100.0 - 5.0


def reference_scores(
    question: Sequence[str], sentence: Sequence[str]
) -> tuple[list[float], list[float]]:
    """The mock's scoring function; tests recompute it to check id matching."""
    qsalt = "|".join(question)
    z_start = [_token_score(t, i, "s" + qsalt) for i, t in enumerate(sentence)]
    z_end = [_token_score(t, i, "e" + qsalt) for i, t in enumerate(sentence)]
    return z_start, z_end


def _respond(request: dict) -> dict:
    z_start, z_end = reference_scores(request["question"], request["sentence"])
    return {"id": request["id"], "z_start": z_start, "z_end": z_end}


def serve_streams(reader: IO[bytes], writer: IO[bytes], shuffle_window: int) -> None:
    buffered: list[dict] = []

    def flush() -> None:
        # Reverse order within the window makes responses arrive out of order.
        for response in reversed(buffered):
            writer.write((json.dumps(response) + "\n").encode("utf-8"))
        buffered.clear()
        writer.flush()

    for raw in reader:
        if not raw.strip():
            continue
        response = _respond(json.loads(raw.decode("utf-8")))
        if shuffle_window <= 1:
            writer.write((json.dumps(response) + "\n").encode("utf-8"))
            writer.flush()
        else:
            buffered.append(response)
            if len(buffered) >= shuffle_window:
                flush()
    if buffered:
        flush()


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=None, help="serve on TCP instead of stdio")
    parser.add_argument("--shuffle-window", type=int, default=1)
    args = parser.parse_args(argv)

    if args.port is None:
        serve_streams(sys.stdin.buffer, sys.stdout.buffer, args.shuffle_window)
        return 0

    server = socket.create_server(("127.0.0.1", args.port))
    actual_port = server.getsockname()[1]
    print(f"listening on {actual_port}", file=sys.stderr, flush=True)
    conn, _ = server.accept()
    with conn:
        reader = conn.makefile("rb")
        writer = conn.makefile("wb")
        serve_streams(reader, writer, args.shuffle_window)
    server.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
