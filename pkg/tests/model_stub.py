"""Toy model process speaking the engine's line-delimited JSON protocol.

Used by the provider tests to exercise the subprocess backend: handshake,
deterministic replies, error replies, slow replies, and sudden death.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time


def digest_floats(text: str, count: int) -> list[float]:
    raw = hashlib.sha256(text.encode("utf-8")).digest()
    data = (raw * (count // len(raw) + 1))[:count]
    return [b / 255.0 + 0.001 for b in data]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--dim", type=int, default=8)
    parser.add_argument("--proto", type=int, default=1)
    parser.add_argument("--null-dim", action="store_true")
    parser.add_argument("--sleep", type=float, default=0.0)
    parser.add_argument("--die-after", type=int, default=-1)
    parser.add_argument("--error-on", default=None)
    parser.add_argument("--garbage", action="store_true")
    args = parser.parse_args()

    print(json.dumps({"proto": args.proto, "dim": None if args.null_dim else args.dim}), flush=True)

    served = 0
    for line in sys.stdin:
        if args.die_after >= 0 and served >= args.die_after:
            return
        request = json.loads(line)
        served += 1
        if args.sleep:
            time.sleep(args.sleep)
        if args.garbage:
            print("not json at all", flush=True)
            continue
        text = request["text"]
        if args.error_on is not None and text == args.error_on:
            print(json.dumps({"error": f"refusing {text!r}"}), flush=True)
            continue
        if request["op"] == "sentiment":
            p, n = digest_floats(text, 2)
            print(json.dumps({"positive": round(p / 2, 6), "negative": round(n / 2, 6)}), flush=True)
        else:
            print(json.dumps({"vector": digest_floats(text, args.dim)}), flush=True)


if __name__ == "__main__":
    main()
