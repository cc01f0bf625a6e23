"""Command line for the classification service."""

from __future__ import annotations

import argparse
import logging

from .server import Mode, ServerConfig, serve


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description="Serve a text classifier over NDJSON/TCP.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=7587)
    parser.add_argument("--mode", choices=[m.value for m in Mode], default="score")
    parser.add_argument("--backend", default="linear_bow")
    parser.add_argument("--artifact", required=True, help="Path to the persisted model.")
    parser.add_argument("--max-batch", type=int, default=64)
    parser.add_argument("--num-classes", type=int, default=None,
                        help="Optional check against the hosted model.")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    config = ServerConfig(
        host=args.host,
        port=args.port,
        mode=Mode(args.mode),
        backend=args.backend,
        artifact=args.artifact,
        max_batch=args.max_batch,
        num_classes=args.num_classes,
    )
    try:
        serve(config)
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
