"""``assouad run CONFIG`` and ``assouad reproduce TARGET``.

Exit codes: 0 success, 1 reproduce mismatch, 2 schema error (or unknown
target), 3 refusal (a formula precondition failed), 4 inconclusive.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .errors import InconclusiveError, RefusalError
from .reports import write_csv, write_json

log = logging.getLogger("assouad")

EXIT_OK, EXIT_MISMATCH, EXIT_SCHEMA, EXIT_REFUSAL, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


def _threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("ASSOUAD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer ASSOUAD_THREADS=%r", env)
    return None


def cmd_run(args) -> int:
    from .runner import execute

    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    out_dir = Path(args.out or cfg.output.get("dir", "out"))
    prefix = str(cfg.output.get("prefix", cfg.command))
    log.info("running %s on %s (config %s)", cfg.command, cfg.system_kind, cfg.hash[:12])
    try:
        payload, csvs = execute(cfg, _threads(args.threads))
    except RefusalError as e:
        write_json(out_dir / f"{prefix}.json", {"status": "refused", "error": e.to_json()},
                   cfg.hash, __version__)
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSAL
    except InconclusiveError as e:
        write_json(out_dir / f"{prefix}.json", {"status": "inconclusive", "error": e.to_json()},
                   cfg.hash, __version__)
        print(f"inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ValueError, TypeError, KeyError) as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    payload = dict(payload)
    payload.setdefault("status", "ok")
    path = write_json(out_dir / f"{prefix}.json", payload, cfg.hash, __version__)
    for name, rows in sorted(csvs.items()):
        write_csv(out_dir / name, rows)
    log.info("wrote %s and %d csv file(s)", path, len(csvs))
    print(path)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    import hashlib

    from .reproduce import TARGETS, run_target

    names = sorted(TARGETS) if args.target == "all" else [args.target]
    if any(n not in TARGETS for n in names):
        print(f"unknown target {args.target!r}; known: {', '.join(sorted(TARGETS))}", file=sys.stderr)
        return EXIT_SCHEMA
    failed = 0
    for name in names:
        res = run_target(name)
        line = f"{'PASS' if res.passed else 'FAIL'} {name}"
        print(line)
        if args.out:
            h = hashlib.sha256(f"reproduce:{name}".encode()).hexdigest()
            write_json(Path(args.out) / f"reproduce_{name}.json", res.to_json(), h, __version__)
        failed += not res.passed
    return EXIT_MISMATCH if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="assouad", description="Assouad-type dimensions of measures")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (overrides output.dir)")
    r.add_argument("--threads", type=int, help="worker threads (default: ASSOUAD_THREADS or 1)")
    r.set_defaults(func=cmd_run)
    q = sub.add_parser("reproduce", help="run a pinned target and compare to its reference")
    q.add_argument("target", help="target id, or 'all'")
    q.add_argument("--out", help="directory for the result JSON")
    q.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
