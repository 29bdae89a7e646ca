"""Command-line front end: ``gauge-integral integrate | verify | convergence | embed``.

Exit codes: 0 when the requested artifact was produced (a NOT-INTEGRABLE
report counts as produced), 1 on a FAIL verdict or a computation that cannot
proceed, 2 on any configuration problem.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

from . import theorems
from .convex import VertexOverflowError, body_from_json, hausdorff
from .integrands import Integrand, Kind, integrand_from_config
from .integrator import (Path, distance, integrate_monotone_bracket, integrate_norm,
                         integrate_order, perturbed_tags, riemann_sum)
from .lattice import NormKind, OSequence
from .partition import (Gauge, MeasurableSet, TagMode, cousin_partition, gauge_from_config,
                        refine, uniform_partition)
from .radstrom import DEFAULT_GRID_SIZE, embed, make_grid, to_csv


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    integrand: Integrand
    dimension: int
    norm: NormKind = NormKind.SUP
    grid_size: int | None = None
    tolerance: float | None = None
    osequence: OSequence | None = None
    index: int | None = None
    tag_mode: TagMode = TagMode.PERRON
    path: Path | None = None
    domain: MeasurableSet | None = None
    max_doublings: int = 24
    levels: list[int] = field(default_factory=list)
    mode: str = "riemann"
    gauge: Gauge | None = None
    oracle: object = None
    record_timing: bool = True
    output: str | None = None

    @property
    def grid(self):
        if self.path is Path.EMBEDDED or self.grid_size is not None:
            return make_grid(self.dimension, self.grid_size)
        return None


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _levels(raw) -> list[int]:
    if raw is None:
        return list(range(1, 13))
    if isinstance(raw, dict):
        levels = list(range(int(raw["from"]), int(raw["to"]) + 1))
    else:
        levels = [int(v) for v in raw]
    if not levels or min(levels) < 0 or max(levels) > 26:
        raise ConfigError("levels must be a nonempty list of integers in [0, 26]")
    return sorted(set(levels))


def parse_config(raw: dict, path_override: str | None = None,
                 dim_override: int | None = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        dim = dim_override if dim_override is not None else raw.get("dimension")
        dim = None if dim is None else int(dim)
        spec = raw.get("integrand")
        if spec is None:
            raise ConfigError("config needs an 'integrand' descriptor")
        if dim is not None and isinstance(spec, dict) and "dim" not in spec:
            spec = {**spec, "dim": dim}
        F = integrand_from_config(spec, dim)
        cfg = ExperimentConfig(integrand=F, dimension=F.dim)
        cfg.norm = NormKind.parse(raw.get("norm", "SUP"))
        if "grid_size" in raw:
            cfg.grid_size = int(raw["grid_size"])
        if "tolerance" in raw:
            cfg.tolerance = float(raw["tolerance"])
            if not cfg.tolerance > 0:
                raise ConfigError("tolerance must be positive")
        if "osequence" in raw:
            o = raw["osequence"]
            cfg.osequence = OSequence(tuple(o["base"]), float(o.get("ratio", 0.5)))
            cfg.index = int(raw.get("index", 0))
            if cfg.index < 0:
                raise ConfigError("order index must be nonnegative")
        cfg.tag_mode = TagMode.parse(raw.get("tag_mode", "PERRON"))
        p = path_override or raw.get("path")
        if F.kind is Kind.MULTI:
            cfg.path = Path.parse(p, F.dim)
        if "domain" in raw:
            cfg.domain = MeasurableSet(raw["domain"])
        cfg.max_doublings = int(raw.get("max_doublings", 24))
        if not 0 <= cfg.max_doublings <= 26:
            raise ConfigError("max_doublings must lie in [0, 26]")
        cfg.levels = _levels(raw.get("levels"))
        cfg.mode = str(raw.get("mode", "riemann")).lower()
        if cfg.mode not in ("riemann", "bracket", "gauge"):
            raise ConfigError(f"unknown convergence mode {cfg.mode!r}")
        if cfg.mode == "gauge":
            cfg.gauge = gauge_from_config(raw.get("gauge", {"kind": "constant", "delta": 1.0}))
        if "oracle" in raw:
            cfg.oracle = (body_from_json(raw["oracle"], F.dim) if F.kind is Kind.MULTI
                          else np.asarray(raw["oracle"], dtype=float))
        cfg.record_timing = bool(raw.get("record_timing", True))
        cfg.output = raw.get("output")
        if cfg.grid_size is not None:
            make_grid(F.dim, cfg.grid_size)
        elif F.dim not in DEFAULT_GRID_SIZE and cfg.path is Path.EMBEDDED:
            raise ConfigError(f"no default direction grid in dimension {F.dim}")
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc) or type(exc).__name__) from exc
    return cfg


# ---------------------------------------------------------------------------
# output


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    target = FsPath(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


class Console:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def info(self, msg: str) -> None:
        if not self.quiet:
            print(msg, file=sys.stderr)

    @staticmethod
    def error(msg: str) -> None:
        print(f"gauge-integral: error: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def cmd_integrate(args, con: Console) -> int:
    cfg = parse_config(read_json(args.config), args.path, args.dim)
    if cfg.tolerance is None and cfg.osequence is None:
        raise ConfigError("config needs 'tolerance' or 'osequence' + 'index'")
    try:
        if cfg.osequence is not None:
            rep = integrate_order(cfg.integrand, cfg.osequence, cfg.index, cfg.tag_mode, cfg.path,
                                  domain=cfg.domain, grid=cfg.grid, max_doublings=cfg.max_doublings)
        else:
            rep = integrate_norm(cfg.integrand, cfg.tolerance, cfg.tag_mode, cfg.path,
                                 domain=cfg.domain, grid=cfg.grid, norm_kind=cfg.norm,
                                 max_doublings=cfg.max_doublings)
    except VertexOverflowError as exc:
        con.error(f"{exc}; use --path embedded")
        return 1
    emit(rep.dumps() + "\n", args.out or cfg.output)
    con.info(f"{rep.status.value} after {rep.refinements} doublings, gap {rep.final_gap:.3e}")
    return 0


def cmd_verify(args, con: Console) -> int:
    if args.config:
        manifest = read_json(args.config)
    else:
        manifest = theorems.default_manifest()
    try:
        theorems.validate_manifest(manifest)
    except theorems.UnknownTheoremError as exc:
        raise ConfigError(f"unknown theorem_id {exc.args[0]!r}") from exc
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    reports = []
    for entry in manifest:
        try:
            r = theorems.run_entry(entry, args.seed)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{entry.get('theorem_id')}: {exc}") from exc
        con.info(f"{r.verdict:8s} {r.theorem_id} {theorems.reports_csv([r]).splitlines()[1]}")
        reports.append(r)
    out = args.out or "verify.json"
    write_atomic(out, theorems.reports_json(reports) + "\n")
    write_atomic(str(FsPath(out).with_suffix(".csv")), theorems.reports_csv(reports))
    failed = sum(r.verdict == theorems.FAIL for r in reports)
    con.info(f"{len(reports)} checks, {failed} failed")
    return 1 if failed else 0


def _fmt(x: float) -> str:
    return repr(float(x))


def convergence_rows(cfg: ExperimentConfig) -> tuple[list[str], list[list[str]]]:
    F = cfg.integrand
    grid = cfg.grid if F.kind is Kind.MULTI and cfg.path is Path.EMBEDDED else None
    oracle = cfg.oracle
    header = ["level", "cells", "hausdorff_gap", "tag_perturbation_gap", "elapsed_ms"]
    if cfg.mode == "bracket":
        header.insert(4, "bound")
    if oracle is not None:
        header.insert(4, "oracle_distance")
    rows = []
    top = max(cfg.levels)
    prev = None
    P = None
    for k in range(top + 1):
        t0 = time.perf_counter()
        if cfg.mode == "bracket":
            n = 2 ** k
            br = integrate_monotone_bracket(F, n)
            current, cells = br.lower, n
            tag_gap = hausdorff(br.lower, br.upper)
            extra = [_fmt(br.bound)]
        else:
            if cfg.mode == "gauge":
                scale_ = 2.0 ** -k
                g = Gauge(lambda t, s=scale_: s * cfg.gauge(t), cfg.gauge.descriptor)
                P = cousin_partition(g, cfg.domain)
                if cfg.tag_mode is TagMode.FREE:
                    P = P.as_free()
            else:
                P = uniform_partition(1, cfg.domain, cfg.tag_mode) if P is None else refine(P)
            current = riemann_sum(F, P, cfg.path, grid)
            cells = len(P)
            tag_gap = max(distance(current, riemann_sum(F, P.with_tags(t), cfg.path, grid), cfg.norm)
                          for t in perturbed_tags(P))
            extra = []
        gap = distance(current, prev, cfg.norm) if prev is not None else float("nan")
        if oracle is not None:
            ref = embed(oracle, grid) if grid is not None else oracle
            extra.insert(0, _fmt(distance(current, ref, cfg.norm)))
        elapsed = (time.perf_counter() - t0) * 1e3 if cfg.record_timing else 0.0
        prev = current
        if k in cfg.levels:
            rows.append([str(k), str(cells), _fmt(gap), _fmt(tag_gap), *extra, f"{elapsed:.3f}"])
    return header, rows


def cmd_convergence(args, con: Console) -> int:
    cfg = parse_config(read_json(args.config), args.path, args.dim)
    if cfg.mode == "bracket" and cfg.integrand.kind is not Kind.MULTI:
        raise ConfigError("bracket mode needs a set-valued integrand")
    try:
        header, rows = convergence_rows(cfg)
    except VertexOverflowError as exc:
        con.error(f"{exc}; use --path embedded")
        return 1
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    emit(buf.getvalue(), args.out or cfg.output)
    return 0


def cmd_embed(args, con: Console) -> int:
    raw = read_json(args.config)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        dim = int(args.dim if args.dim is not None else raw["dimension"])
        grid = make_grid(dim, raw.get("grid_size"))
        bodies = [body_from_json(b, dim) for b in raw.get("bodies", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad body list: {exc}") from exc
    emit(to_csv([embed(C, grid) for C in bodies], grid), args.out or raw.get("output"))
    con.info(f"embedded {len(bodies)} bodies on {grid.m} directions")
    return 0


COMMANDS = {"integrate": cmd_integrate, "verify": cmd_verify,
            "convergence": cmd_convergence, "embed": cmd_embed}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gauge-integral", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("integrate", True), ("verify", False),
                               ("convergence", True), ("embed", True)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config,
                       help="JSON config" if needs_config else "JSON manifest (default: builtin)")
        p.add_argument("--out", help="output file (stdout if omitted)")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized fixtures")
        p.add_argument("--quiet", action="store_true")
        p.add_argument("--path", choices=["geometric", "embedded"], default=None)
        p.add_argument("--dim", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    con = Console(args.quiet)
    try:
        return COMMANDS[args.command](args, con)
    except ConfigError as exc:
        con.error(str(exc))
        return 2
    except OSError as exc:
        con.error(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
