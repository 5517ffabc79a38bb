"""Command-line front end with reproducible runs and an append-only run log.

Each invocation becomes a :class:`RunConfig`; :func:`run` dispatches it,
appends one JSON line to the run log and prints the outcome.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import secrets
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from graphcodes import __version__, bipartite, capacity
from graphcodes.errors import GraphCodesError, ParseError, ProvenanceError, SearchExhausted, ValidationError
from graphcodes.gf2core import BitMatrix

COMMANDS = (
    "codes-sample",
    "codes-verify",
    "codes-search",
    "codes-montecarlo",
    "capacity-bounds",
    "capacity-certify",
    "capacity-mis",
    "capacity-recursion",
)
RANDOMIZED = ("codes-sample", "codes-search", "codes-montecarlo")
DEFAULT_LOG = "runs.log.jsonl"
LOG_ENV = "GRAPHCODES_LOG"


# --- graph files -------------------------------------------------------------

_BUILTIN = re.compile(r"^(cycle|path|complete):(\d+)$")


def parse_graph_text(text: str, fmt: str = "auto") -> capacity.SimpleGraph:
    if fmt == "auto":
        fmt = "edgelist"
        for line in text.splitlines():
            tok = line.split()
            if tok:
                if tok[0] in ("p", "c", "e"):
                    fmt = "dimacs"
                break
    if fmt == "edgelist":
        return _parse_edgelist(text)
    if fmt == "dimacs":
        return _parse_dimacs(text)
    raise ParseError(f"unknown graph format {fmt!r}")


def parse_graph_file(path, fmt: str = "auto") -> capacity.SimpleGraph:
    """Read an edge-list or DIMACS graph; ``cycle:5``-style names build standard graphs."""
    m = _BUILTIN.match(str(path))
    if m and not Path(path).exists():
        return getattr(capacity.SimpleGraph, m.group(1))(int(m.group(2)))
    return parse_graph_text(Path(path).read_text(), fmt)


def _pairs_to_graph(n, pairs):
    seen = set()
    for ln, u, v in pairs:
        if u == v:
            raise ValidationError(f"line {ln}: self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"line {ln}: vertex out of range 0..{n - 1}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(f"line {ln}: duplicate edge ({u}, {v})")
        seen.add(key)
    return capacity.SimpleGraph(n, frozenset(seen))


def _ints(tokens, ln):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", line=ln) from None


def _parse_edgelist(text):
    n = None
    pairs = []
    for ln, line in enumerate(text.splitlines(), start=1):
        tok = line.split()
        if not tok or tok[0].startswith("#"):
            continue
        if n is None:
            if len(tok) != 1:
                raise ParseError("first line must hold the vertex count", line=ln)
            (n,) = _ints(tok, ln)
            if n < 1:
                raise ParseError("vertex count must be positive", line=ln)
            continue
        if len(tok) != 2:
            raise ParseError("expected 'u v'", line=ln)
        u, v = _ints(tok, ln)
        pairs.append((ln, u, v))
    if n is None:
        raise ParseError("empty graph file", line=1)
    return _pairs_to_graph(n, pairs)


def _parse_dimacs(text):
    n = m = None
    pairs = []
    for ln, line in enumerate(text.splitlines(), start=1):
        tok = line.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            if n is not None or len(tok) != 4 or tok[1] not in ("edge", "col"):
                raise ParseError("expected a single 'p edge n m' header", line=ln)
            n, m = _ints(tok[2:], ln)
        elif tok[0] == "e":
            if n is None:
                raise ParseError("edge before 'p' header", line=ln)
            if len(tok) != 3:
                raise ParseError("expected 'e u v'", line=ln)
            u, v = _ints(tok[1:], ln)
            pairs.append((ln, u - 1, v - 1))
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", line=ln)
    if n is None:
        raise ParseError("missing 'p edge n m' header", line=1)
    if len(pairs) != m:
        raise ParseError(f"header declares {m} edges, found {len(pairs)}")
    return _pairs_to_graph(n, pairs)


# --- runs --------------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    emit: str = "table"
    out: str | None = None
    log: str | None = None

    def to_record(self) -> dict:
        return asdict(self)


@dataclass
class RunRecord:
    config: dict
    payload: dict
    status: int
    wall_time: float
    version: str
    timestamp: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _p(params, key, default=None, required=True):
    val = params.get(key, default)
    if val is None and required:
        raise ValidationError(f"missing required parameter --{key.replace('_', '-')}")
    return val


def _model(params):
    return bipartite.ModelParams(
        n=_p(params, "n"),
        epsilon=_p(params, "epsilon"),
        p=_p(params, "p"),
        delta=_p(params, "delta", 0.0),
        gamma=_p(params, "div_gamma", 0.0),
    )


def _constraint(params):
    return bipartite.ConstraintSpec.parse(params.get("constraint") or "always")


def _cmd_codes_sample(cfg):
    mp = _model(cfg.params)
    g = bipartite.sample_bipartite(mp, cfg.seed)
    if cfg.out:
        Path(cfg.out).write_text(g.to_text())
    return {"params": mp.to_record(), "seed": cfg.seed,
            "metrics": bipartite.code_metrics(g).to_record(), "biadjacency": g.to_text()}, 0


def _cmd_codes_verify(cfg):
    path = _p(cfg.params, "graph")
    g = bipartite.BipartiteGraph.from_text(Path(path).read_text())
    metrics = bipartite.code_metrics(g)
    payload = {"graph": str(path), "metrics": metrics.to_record()}
    c = _constraint(cfg.params)
    delta = cfg.params.get("delta")
    div = cfg.params.get("div_gamma")
    flags = {"constraint": bipartite.check_constraint(g, c),
             "rate": metrics.rate >= 1 - g.n_right / g.n_left - 1e-12}
    if delta is not None:
        target = math.floor(bipartite._exact(delta) * g.n_left) + 1
        flags["distance"] = metrics.min_distance is not None and metrics.min_distance >= target
    if div is not None:
        flags["diversity"] = metrics.diversity is not None and metrics.diversity >= div - 1e-12
    payload["satisfied"] = flags
    payload["constraint"] = c.to_record()
    return payload, 0


def _cmd_codes_search(cfg):
    mp = _model(cfg.params)
    c = _constraint(cfg.params)
    res = bipartite.rejection_search(mp, c, cfg.seed, _p(cfg.params, "max_attempts", 1000),
                                     condition=not cfg.params.get("no_condition", False))
    if cfg.out:
        Path(cfg.out).write_text(res.graph.to_text())
    payload = {"params": mp.to_record(), "constraint": c.to_record(), **res.to_record()}
    return payload, 0 if res.ok else SearchExhausted.exit_code


def _cmd_codes_montecarlo(cfg):
    mp = _model(cfg.params)
    c = _constraint(cfg.params)
    event = cfg.params.get("event") or "constraint"
    res = bipartite.monte_carlo_event(mp, event, c, _p(cfg.params, "trials", 1000), cfg.seed)
    return {"params": mp.to_record(), "constraint": c.to_record(), "seed": cfg.seed,
            **res.to_record()}, 0


def _graph(cfg):
    return parse_graph_file(_p(cfg.params, "graph"), cfg.params.get("format") or "auto")


def _cmd_capacity_bounds(cfg):
    g = _graph(cfg)
    gamma = _p(cfg.params, "gamma")
    theta = cfg.params.get("theta")
    source = cfg.params.get("theta_source")
    if theta is None:
        hit = capacity.capacity_registry_lookup(g)
        if hit is None:
            raise ProvenanceError("capacity of this graph is unknown; pass --theta and --theta-source")
        theta, source = hit
    elif not source:
        source = "user supplied"
    certs = ()
    rmax = cfg.params.get("rmax")
    if rmax:
        certs = capacity.capacity_certificate(g, gamma, rmax, cfg.params.get("rule") or "ceil")
    return capacity.capacity_bounds(g, gamma, theta, source, certs).to_record(), 0


def _cmd_capacity_certify(cfg):
    g = _graph(cfg)
    gamma = _p(cfg.params, "gamma")
    rule = cfg.params.get("rule") or "ceil"
    certs = capacity.capacity_certificate(g, gamma, _p(cfg.params, "rmax"), rule)
    return {"gamma": gamma, "rule": rule, "certificates": [c.to_record() for c in certs]}, 0


def _cmd_capacity_mis(cfg):
    g = _graph(cfg)
    r = cfg.params.get("r") or 1
    k = cfg.params.get("k")
    k = r if k is None else k
    target = g if r == 1 and k >= 1 else capacity.restricted_power(g, r, k)
    alpha, witness = capacity.max_stable_set(target)
    if isinstance(target, capacity.ProductGraph):
        witness = [list(target.vertex(i)) for i in witness]
    return {"r": r, "k": k, "vertices": target.num_vertices, "alpha": alpha, "witness": witness}, 0


def _cmd_capacity_recursion(cfg):
    g = _graph(cfg)
    r, d = _p(cfg.params, "r"), _p(cfg.params, "d")
    lhs, rhs = capacity.recursion_terms(g, r, d)
    return {"r": r, "d": d, "A_r_d": lhs, "bound": rhs, "holds": lhs <= rhs}, 0


_DISPATCH = {
    "codes-sample": _cmd_codes_sample,
    "codes-verify": _cmd_codes_verify,
    "codes-search": _cmd_codes_search,
    "codes-montecarlo": _cmd_codes_montecarlo,
    "capacity-bounds": _cmd_capacity_bounds,
    "capacity-certify": _cmd_capacity_certify,
    "capacity-mis": _cmd_capacity_mis,
    "capacity-recursion": _cmd_capacity_recursion,
}


def log_path(cfg: RunConfig) -> Path:
    return Path(cfg.log or os.environ.get(LOG_ENV) or DEFAULT_LOG)


def append_record(path: Path, record: RunRecord):
    # one write() on an O_APPEND descriptor keeps each line intact
    data = (record.to_json() + "\n").encode()
    fd = os.open(path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
    try:
        os.write(fd, data)
    finally:
        os.close(fd)


def run(cfg: RunConfig, stdout=None) -> RunRecord:
    """Execute one command, log it, and print its outcome. Errors propagate."""
    if cfg.command not in _DISPATCH:
        raise ValidationError(f"unknown command {cfg.command!r}")
    if cfg.emit not in ("table", "record", "csv"):
        raise ValidationError(f"unknown output format {cfg.emit!r}")
    if cfg.command in RANDOMIZED and cfg.seed is None:
        cfg.seed = secrets.randbelow(2**32)
        print(f"seed: {cfg.seed}", file=sys.stderr)
    if cfg.seed is not None and cfg.seed < 0:
        raise ValidationError("seed must be non-negative")
    t0 = time.perf_counter()
    payload, status = _DISPATCH[cfg.command](cfg)
    rec = RunRecord(
        config=cfg.to_record(),
        payload=payload,
        status=status,
        wall_time=time.perf_counter() - t0,
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    append_record(log_path(cfg), rec)
    (stdout or sys.stdout).write(render(payload, cfg.emit))
    return rec


# --- output ------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    if v is None:
        return "-"
    return str(v)


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def render(payload: dict, emit: str) -> str:
    if emit == "record":
        return json.dumps(payload, sort_keys=True) + "\n"
    flat = _flatten(payload)
    if emit == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(flat.keys())
        w.writerow(_fmt(v) for v in flat.values())
        return buf.getvalue()
    width = max((len(k) for k in flat), default=0)
    lines = []
    for k, v in flat.items():
        s = _fmt(v)
        if "\n" in s:
            s = "\n" + "\n".join("    " + ln for ln in s.rstrip("\n").splitlines())
        lines.append(f"{k.ljust(width)}  {s}")
    return "\n".join(lines) + "\n"


# --- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--graph")
    common.add_argument("--format", choices=("auto", "edgelist", "dimacs"), default="auto")
    common.add_argument("--gamma", type=float)
    common.add_argument("--rmax", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--p", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--div-gamma", type=float)
    common.add_argument("--constraint")
    common.add_argument("--max-attempts", type=int)
    common.add_argument("--event", choices=bipartite.EVENTS)
    common.add_argument("--theta", type=float, help="full capacity value for capacity-bounds")
    common.add_argument("--theta-source", help="provenance of --theta")
    common.add_argument("--r", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--rule", choices=("ceil", "floor"), help="gamma*r rounding for certificates")
    common.add_argument("--no-condition", action="store_true",
                        help="codes-search: plain rejection, do not fix constraint edges")
    common.add_argument("--out")
    common.add_argument("--emit", choices=("table", "record", "csv"), default="table")
    common.add_argument("--log")

    parser = argparse.ArgumentParser(prog="graphcodes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


_NON_PARAMS = {"command", "seed", "emit", "out", "log"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items() if k not in _NON_PARAMS and v is not None}
    if not params.get("no_condition"):
        params.pop("no_condition", None)
    return RunConfig(command=ns.command, params=params, seed=ns.seed, emit=ns.emit,
                     out=ns.out, log=ns.log)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        rec = run(cfg)
    except GraphCodesError as exc:
        print(f"{cfg.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"{cfg.command}: error: {exc}", file=sys.stderr)
        return 2
    return rec.status


if __name__ == "__main__":
    sys.exit(main())
