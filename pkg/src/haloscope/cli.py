"""Command-line entry points: serve, generate, validate.

Every flag can also be supplied through an environment variable named
HALOSCOPE_<FLAG> (dashes become underscores); explicit flags win over
the environment, which wins over defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .forest import parse_catalog, validate_forest
from .service import ExplorerService, serve_forever
from .synthetic import DatasetSpec, generate_dataset

ENV_PREFIX = "HALOSCOPE_"


def _env_default(flag: str, fallback=None):
    return os.environ.get(ENV_PREFIX + flag.upper().replace("-", "_"), fallback)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="haloscope")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the explorer HTTP service")
    serve.add_argument("--data-dir", default=_env_default("data-dir"),
                       help="directory containing dataset directories")
    serve.add_argument("--port", type=int, default=int(_env_default("port", 8777)))
    serve.add_argument("--host", default=_env_default("host", "127.0.0.1"))
    serve.add_argument("--grid-n", type=int, default=int(_env_default("grid-n", 64)))

    gen = sub.add_parser("generate", help="generate a synthetic dataset")
    gen.add_argument("--spec", default=_env_default("spec"), help="dataset spec JSON file")
    gen.add_argument("--out", default=_env_default("out"), help="output directory")
    gen.add_argument("--seed", type=int, default=None,
                     help="override the seed in the spec file")

    val = sub.add_parser("validate", help="validate a halo catalog")
    val.add_argument("--catalog", default=_env_default("catalog"), help="catalog csv file")
    return parser


def cmd_serve(args) -> int:
    if not args.data_dir:
        print("serve: --data-dir is required (or set HALOSCOPE_DATA_DIR)", file=sys.stderr)
        return 2
    service = ExplorerService(data_dir=args.data_dir, grid_n=args.grid_n)
    if not service.datasets:
        print(f"serve: no datasets found under {args.data_dir}", file=sys.stderr)
        return 2
    serve_forever(service, args.host, args.port)
    return 0


def cmd_generate(args) -> int:
    if not args.spec or not args.out:
        print("generate: --spec and --out are required", file=sys.stderr)
        return 2
    with open(args.spec, encoding="utf-8") as f:
        payload = json.load(f)
    seed_env = _env_default("seed")
    if args.seed is not None:
        payload["seed"] = args.seed
    elif seed_env is not None:
        payload["seed"] = int(seed_env)
    spec = DatasetSpec.from_json(payload)
    descriptor = generate_dataset(spec, args.out)
    print(json.dumps(descriptor, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    if not args.catalog:
        print("validate: --catalog is required", file=sys.stderr)
        return 2
    # parse without the load-time invariant gate so every violation is listed
    try:
        forest = parse_catalog(args.catalog)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    violations = validate_forest(forest)
    for v in violations:
        print(f"{v.kind}: {v.message}")
    if violations:
        print(f"{len(violations)} violation(s)")
        return 1
    print(f"ok: {len(forest)} halos, {forest.timestep_count} timesteps")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return {"serve": cmd_serve, "generate": cmd_generate, "validate": cmd_validate}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
