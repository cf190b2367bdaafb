"""Command line front end; every subcommand prints one deterministic JSON report."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .engine import (
    REGISTRY,
    EndTheoryHandle,
    certify_contractible,
    eval_algebra,
    synth_operation,
)
from .errors import GlobomegaError, GroupoidFormatError, MalformedTable, UnknownOperation
from .glob_core import parse_table
from .grpd import GroupoidBackend, groupoid_from_json
from .theta0 import from_cell_images, theta0_hom
from .tower import build_tower
from .wfs import DiscreteBackend, FinSet

EXIT_OK, EXIT_INPUT, EXIT_OPERATION = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    dim: int = 1
    name: str | None = None
    output: str | None = None
    pretty: bool = False
    verbose: bool = False
    budget: int | None = None
    seed: int = 0
    backend: str = "groupoid"
    size: int = 2
    max_dim: int = 1
    max_len: int = 3
    oracle: bool = False
    theta: str | None = None
    tables: tuple = ()

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("truncation must be non-negative")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("output")
        d["tables"] = list(self.tables)
        return d


class InputError(Exception):
    """Unreadable or invalid input (exit status 1)."""


def _load(config: RunConfig):
    if config.backend == "discrete":
        digest = hashlib.sha256(f"discrete:{config.size}".encode()).hexdigest()
        return DiscreteBackend(), FinSet.of_size(config.size), digest
    if config.input is None:
        raise InputError("a groupoid file is required for the groupoid backend")
    try:
        data = Path(config.input).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {config.input}: {exc.strerror}") from None
    X = groupoid_from_json(data.decode("utf-8"))
    return GroupoidBackend(), X, hashlib.sha256(data).hexdigest()


def _cmd_tower(config: RunConfig) -> dict:
    backend, X, digest = _load(config)
    tower = build_tower(backend, X, config.dim)
    summary = tower.summary()
    return {"input_sha256": digest, **summary, "verified": tower.certified()}


def _cmd_op(config: RunConfig) -> dict:
    backend, X, digest = _load(config)
    if config.name not in REGISTRY:
        raise UnknownOperation(f"unknown operation {config.name!r}; known: {sorted(REGISTRY)}")
    handle = EndTheoryHandle(build_tower(backend, X, config.dim))
    w = synth_operation(handle, config.name, resolve=True)
    out = w.to_json()
    out["equations"] = {"s.h = f": w.source_ok, "t.h = g": w.target_ok}
    out["verified"] = w.source_ok and w.target_ok
    out["summary"] = REGISTRY[config.name].summary
    out["input_sha256"] = digest
    out["domain"] = backend.describe(handle.product(w.table).apex)
    return out


def _cmd_certify(config: RunConfig) -> dict:
    backend, X, digest = _load(config)
    handle = EndTheoryHandle(build_tower(backend, X, config.max_dim + 1))
    for name in sorted(REGISTRY):
        if REGISTRY[name].dim + 1 <= handle.tower.N:
            synth_operation(handle, name, resolve=True)
    report = certify_contractible(
        handle, config.max_dim, config.max_len, budget=config.budget, oracle=config.oracle, seed=config.seed
    )
    return {
        "input_sha256": digest,
        "operations": sorted(handle.witnesses),
        **report.to_dict(),
        "verified": report.ok(),
    }


def _parse_theta(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"--theta is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "dom" not in doc or "cod" not in doc:
        raise InputError("--theta needs keys dom and cod")
    dom, cod = parse_table(doc["dom"]), parse_table(doc["cod"])
    if "tops" in doc:
        return from_cell_images(dom, cod, doc["tops"])
    if "cells" in doc:
        for th in theta0_hom(dom, cod):
            if th.underlying.as_labels() == doc["cells"]:
                return th
        raise InputError("--theta cells do not describe a globular map")
    raise InputError("--theta needs either tops or cells")


def _cmd_eval(config: RunConfig) -> dict:
    theta = _parse_theta(config.theta or "")
    backend, X, digest = _load(config)
    dim = max(config.dim, theta.dom.max_dim, theta.cod.max_dim)
    handle = EndTheoryHandle(build_tower(backend, X, dim))
    f = eval_algebra(handle, theta)
    return {
        "input_sha256": digest,
        "theta": theta.to_json(),
        "domain": backend.describe(f.dom),
        "codomain": backend.describe(f.cod),
        "morphism": f.to_json(),
    }


def _cmd_theta0(config: RunConfig) -> dict:
    n, m = (parse_table(t) for t in config.tables)
    homs = theta0_hom(n, m)
    return {"dom": str(n), "cod": str(m), "count": len(homs), "morphisms": [h.to_json() for h in homs]}


COMMANDS = {
    "tower": _cmd_tower,
    "op": _cmd_op,
    "certify": _cmd_certify,
    "eval": _cmd_eval,
    "theta0": _cmd_theta0,
}


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one subcommand; returns the exit status and the report."""
    report = {"command": config.command, "config": config.echo()}
    try:
        report.update(COMMANDS[config.command](config))
        status = EXIT_OK
    except (InputError, GroupoidFormatError, MalformedTable, UnicodeDecodeError) as exc:
        status = EXIT_INPUT
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except GlobomegaError as exc:
        status = EXIT_OPERATION
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    report["status"] = status
    return status, report


def render(report: dict, pretty: bool) -> str:
    if not pretty:
        return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"
    lines = [f"{report['command']}: status {report['status']}"]
    for key in sorted(report):
        if key in ("command", "config", "status", "morphism", "morphisms"):
            continue
        lines.append(f"  {key}: {json.dumps(report[key], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="globomega", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["groupoid", "discrete"], default="groupoid")
    common.add_argument("--size", type=int, default=2, help="set size for the discrete backend")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="human-readable summary")
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tower", parents=[common], help="build a path tower")
    p.add_argument("input", nargs="?")
    p.add_argument("--dim", type=int, default=1)

    p = sub.add_parser("op", parents=[common], help="synthesize an operation witness")
    p.add_argument("input", nargs="?")
    p.add_argument("--name", required=True)
    p.add_argument("--dim", type=int, default=2)

    p = sub.add_parser("certify", parents=[common], help="lift every generated parallel pair")
    p.add_argument("input", nargs="?")
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--budget", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check with exhaustive search")

    p = sub.add_parser("eval", parents=[common], help="evaluate a Theta_0 map on a tower")
    p.add_argument("input", nargs="?")
    p.add_argument("--theta", required=True, help='e.g. {"dom": "(0)", "cod": "(1)", "tops": ["0:t0"]}')
    p.add_argument("--dim", type=int, default=0)

    p = sub.add_parser("theta0", parents=[common], help="enumerate Theta_0 homs")
    p.add_argument("action", choices=["hom"])
    p.add_argument("tables", nargs=2)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    fields.pop("action", None)
    if "tables" in fields:
        fields["tables"] = tuple(fields["tables"])
    try:
        config = RunConfig(**fields)
    except ValueError as exc:
        print(json.dumps({"error": str(exc), "status": EXIT_INPUT}), file=sys.stderr)
        return EXIT_INPUT
    status, report = run(config)
    text = render(report, config.pretty)
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)
    if status and config.verbose:
        print(report["error"]["message"], file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
