"""Random bipartite-graph parity-check codes.

Left vertices ``a_1..a_n`` are codeword positions (matrix columns), right
vertices ``b_1..b_m`` are parity checks (matrix rows). Public functions use
the 1-based vertex names only in docstrings; all indices are 0-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import NormalDist
from typing import Callable

import numpy as np

from graphcodes.errors import (
    DegenerateCodeError,
    DimensionError,
    ParameterError,
    ParseError,
    PreconditionError,
    SizeError,
)
from graphcodes.gf2core import (
    ENUMERATION_CAP,
    BitMatrix,
    LinearCode,
    entropy,
    min_distance,
    nullspace_enumerate,
    rate_and_redundancy,
)


def _exact(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**9)


@dataclass(frozen=True)
class ModelParams:
    n: int
    epsilon: float
    p: float
    delta: float = 0.1
    gamma: float = 0.0
    theta: float = 0.1
    eta: float = 0.1
    t: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be positive")
        if not self.epsilon > 0:
            raise ParameterError("epsilon must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError("p must lie in [0, 1]")
        if self.t < 1:
            raise ParameterError("t must be a positive integer")

    @property
    def m(self) -> int:
        return math.ceil(_exact(self.epsilon) * self.n)

    @property
    def distance_target(self) -> int:
        """Smallest integer minimum distance meeting relative distance delta."""
        return math.floor(_exact(self.delta) * self.n) + 1

    def check_model(self):
        """Enforce the open ranges of the probabilistic model."""
        checks = [
            (0 < self.p < 0.5, "p in (0, 1/2)"),
            (0 < self.theta < 0.25, "theta in (0, 1/4)"),
            (0 < self.eta < 0.5, "eta in (0, 1/2)"),
            (0 < self.delta < 0.5, "delta in (0, 1/2)"),
            (0 <= self.gamma < 1, "gamma in [0, 1)"),
        ]
        bad = [msg for ok, msg in checks if not ok]
        if bad:
            raise ParameterError("invalid model parameters: need " + ", ".join(bad))

    def to_record(self) -> dict:
        return {
            "n": self.n, "epsilon": self.epsilon, "p": self.p, "delta": self.delta,
            "gamma": self.gamma, "theta": self.theta, "eta": self.eta, "t": self.t,
        }


@dataclass(frozen=True)
class BipartiteGraph:
    n_left: int
    n_right: int
    biadjacency: BitMatrix = field(repr=False)

    def __post_init__(self):
        if self.biadjacency.rows != self.n_right or self.biadjacency.cols != self.n_left:
            raise DimensionError("biadjacency must be n_right x n_left")

    @classmethod
    def from_matrix(cls, m: BitMatrix) -> BipartiteGraph:
        return cls(m.cols, m.rows, m)

    def right_neighbours(self, j: int) -> frozenset[int]:
        """R_j: left neighbours of parity node j."""
        row = self.biadjacency.data[j]
        return frozenset(i for i in range(self.n_left) if (row >> i) & 1)

    def left_neighbours(self, i: int) -> frozenset[int]:
        """N_i: parity nodes adjacent to position i."""
        return frozenset(j for j, row in enumerate(self.biadjacency.data) if (row >> i) & 1)

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.biadjacency.data[j] >> i) & 1)

    def to_text(self) -> str:
        return self.biadjacency.to_text()

    @classmethod
    def from_text(cls, text: str) -> BipartiteGraph:
        return cls.from_matrix(BitMatrix.from_text(text))


# --- constraints -----------------------------------------------------------

_PREDICATES: dict[str, Callable[[BipartiteGraph], bool]] = {}


def register_predicate(name: str):
    """Register a named graph predicate usable as ``{"kind": "predicate", "name": ...}``."""

    def deco(fn):
        _PREDICATES[name] = fn
        return fn

    return deco


@dataclass(frozen=True)
class ConstraintSpec:
    kind: str = "always"
    of: tuple[ConstraintSpec, ...] = ()
    name: str | None = None

    def __post_init__(self):
        if self.kind not in ("always", "hn", "and", "predicate"):
            raise ParseError(f"unknown constraint kind {self.kind!r}")
        if self.kind == "predicate" and not self.name:
            raise ParseError("predicate constraint needs a name")

    def to_record(self) -> dict:
        if self.kind == "and":
            return {"kind": "and", "of": [c.to_record() for c in self.of]}
        if self.kind == "predicate":
            return {"kind": "predicate", "name": self.name}
        return {"kind": self.kind}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec) -> ConstraintSpec:
        if isinstance(rec, str):
            return cls(rec)
        if not isinstance(rec, dict) or "kind" not in rec:
            raise ParseError(f"constraint must be an object with a 'kind': {rec!r}")
        kind = rec["kind"]
        if kind == "and":
            return cls("and", tuple(cls.from_record(r) for r in rec.get("of", [])))
        return cls(kind, name=rec.get("name"))

    @classmethod
    def parse(cls, text: str) -> ConstraintSpec:
        """Accept a bare kind (``hn``), a JSON document, or a path to one."""
        text = text.strip()
        if text in ("always", "hn"):
            return cls(text)
        if not text.startswith(("{", "[", '"')):
            path = Path(text)
            if not path.exists():
                raise ParseError(f"constraint {text!r} is neither a kind, JSON, nor a file")
            text = path.read_text()
        try:
            rec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad constraint JSON: {exc.msg}", line=exc.lineno) from None
        return cls.from_record(rec)

    def forced_edges(self, n_left: int, n_right: int) -> frozenset[tuple[int, int]] | None:
        """Edges (row, col) whose joint presence is exactly this event, if it is such an event.

        ``None`` means the constraint is not a pure edge-presence event.
        """
        if self.kind == "always":
            return frozenset()
        if self.kind == "hn":
            _check_hn_size(n_left, n_right)
            return frozenset(_hn_edges(n_left))
        if self.kind == "and":
            out: set[tuple[int, int]] = set()
            for c in self.of:
                sub = c.forced_edges(n_left, n_right)
                if sub is None:
                    return None
                out |= sub
            return frozenset(out)
        return None


def _hn_edges(n_left: int) -> list[tuple[int, int]]:
    # a_i adjacent to b_{i-1} and b_{i+1} for 2 <= i <= floor(sqrt(n))
    out = []
    for i in range(2, math.isqrt(n_left) + 1):
        out.append((i - 2, i - 1))
        out.append((i, i - 1))
    return out


def _check_hn_size(n_left, n_right):
    need = math.isqrt(n_left) + 1
    if n_right < need:
        raise PreconditionError(f"the hn constraint needs at least {need} right nodes, got {n_right}")


def check_constraint(g: BipartiteGraph, c: ConstraintSpec) -> bool:
    if c.kind == "always":
        return True
    if c.kind == "hn":
        _check_hn_size(g.n_left, g.n_right)
        rows = g.biadjacency.data
        return all((rows[r] >> col) & 1 for r, col in _hn_edges(g.n_left))
    if c.kind == "and":
        return all(check_constraint(g, s) for s in c.of)
    try:
        fn = _PREDICATES[c.name]
    except KeyError:
        raise ParameterError(f"no predicate registered under {c.name!r}") from None
    return bool(fn(g))


# --- sampling and code metrics -----------------------------------------------


def sample_bipartite(params: ModelParams, seed, forced=None) -> BipartiteGraph:
    """Draw each of the n*m edges independently with probability ``params.p``.

    ``seed`` is an int or a tuple of ints fed to ``numpy.random.default_rng``;
    trial ``i`` of a run with master seed ``s`` uses ``(s, i)``. Edges in
    ``forced`` (row, col) are set after drawing.
    """
    n, m = params.n, params.m
    rng = np.random.default_rng(list(seed) if isinstance(seed, tuple) else seed)
    arr = rng.random((m, n)) < params.p
    if forced:
        r, c = zip(*forced)
        arr[list(r), list(c)] = True
    return BipartiteGraph(n, m, BitMatrix.from_array(arr))


def code_from_graph(g: BipartiteGraph) -> LinearCode:
    return LinearCode(g.biadjacency)


def diversity_index(g: BipartiteGraph) -> float:
    """min over ordered pairs x != y with R_x nonempty of |R_x - R_y| / |R_x|."""
    if g.n_right < 2:
        raise PreconditionError("diversity index needs at least two parity nodes")
    a = g.biadjacency.to_array().astype(np.int64)
    sizes = a.sum(axis=1)
    diff = sizes[:, None] - a @ a.T
    ratio = np.where(sizes[:, None] > 0, diff / np.maximum(sizes, 1)[:, None], np.inf)
    np.fill_diagonal(ratio, np.inf)
    best = float(ratio.min())
    return 1.0 if math.isinf(best) else best


@dataclass(frozen=True)
class CodeMetrics:
    n: int
    m: int
    rank: int
    dimension: int
    min_distance: int | None
    relative_distance: float | None
    diversity: float | None
    rate: float
    redundancy: float

    def to_record(self) -> dict:
        return dict(self.__dict__)


def code_metrics(g: BipartiteGraph, cap: int = ENUMERATION_CAP) -> CodeMetrics:
    code = code_from_graph(g)
    try:
        d = min_distance(code, cap)
    except DegenerateCodeError:
        d = None
    rate, red = rate_and_redundancy(code)
    return CodeMetrics(
        n=g.n_left,
        m=g.n_right,
        rank=code.rank,
        dimension=code.dimension,
        min_distance=d,
        relative_distance=None if d is None else (d - 1) / g.n_left,
        diversity=diversity_index(g) if g.n_right >= 2 else None,
        rate=rate,
        redundancy=red,
    )


# --- naive re-verification ---------------------------------------------------


def naive_min_distance(g: BipartiteGraph, cap: int = ENUMERATION_CAP) -> int | None:
    """Minimum nonzero weight over the materialised codeword list (None for {0})."""
    words = nullspace_enumerate(g.biadjacency, cap)
    weights = [w.weight for w in words if w.weight]
    return min(weights) if weights else None


def naive_diversity_index(g: BipartiteGraph) -> float:
    sets = [g.right_neighbours(j) for j in range(g.n_right)]
    best = 1.0
    for x, rx in enumerate(sets):
        if not rx:
            continue
        for y, ry in enumerate(sets):
            if x != y:
                best = min(best, len(rx - ry) / len(rx))
    return best


def naive_hn(g: BipartiteGraph) -> bool:
    for i in range(2, math.isqrt(g.n_left) + 1):
        if not (g.has_edge(i - 1, i - 2) and g.has_edge(i - 1, i)):
            return False
    return True


# --- closed-form bounds ------------------------------------------------------


def hn_exact_probability(n: int, p: float) -> float:
    """P(hn) = p^(2(floor(sqrt n) - 1)); the required edges are distinct."""
    if n < 4:
        raise PreconditionError("hn probability needs n >= 4")
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    return p ** (2 * (math.isqrt(n) - 1))


def parity_even_prob(g: int, p: float) -> float:
    """P(Binomial(g, p) is even) = 1/2 + (1 - 2p)^g / 2."""
    if g < 1:
        raise PreconditionError("g must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    return 0.5 + 0.5 * (1.0 - 2.0 * p) ** g


def step1_gamma(theta: float, p: float) -> float:
    """Diversity ratio guaranteed when all neighbourhood sizes concentrate."""
    if not 0 < theta < 0.25 or not 0 < p < 0.5:
        raise ParameterError("need 0 < theta < 1/4 and 0 < p < 1/2")
    return (1 - theta) / (1 + theta) - p


def bound_e_div_raw(params: ModelParams) -> float:
    m, n = params.m, params.n
    return 1.0 - 4.0 * m * m * math.exp(-params.theta**2 * n * params.p**2 / 4.0)


def bound_e_div(params: ModelParams) -> float:
    """Lower bound on P(E_div), clamped to [0, 1]."""
    params.check_model()
    return min(1.0, max(0.0, bound_e_div_raw(params)))


def bound_delta0(params: ModelParams) -> float:
    """Exponent with P(E_low^c) <= exp(-Delta_0); natural logs throughout."""
    n, m, p, t = params.n, params.m, params.p, params.t
    if not 1 <= t < n / 2:
        raise PreconditionError(f"need 1 <= t < n/2, got t={t}, n={n}")
    return m * p * (1 - p) ** (t - 1) - t * math.log(n * math.e / t) - 2 * math.log(t)


def gv_exponent(params: ModelParams) -> float:
    """beta = (1 - eta) * epsilon - H(delta)."""
    return (1 - params.eta) * params.epsilon - entropy(params.delta)


def bound_e_up(params: ModelParams) -> float:
    """Upper bound 2^(-beta n) on P(E_up^c)."""
    beta = gv_exponent(params)
    if beta <= 0:
        raise ParameterError(f"beta = {beta:.6g} <= 0; lower eta or raise epsilon above H(delta)")
    return 2.0 ** (-beta * params.n)


def choose_t(p: float, eta: float) -> int:
    """Least t >= 1 with P(Binomial(t+1, p) even) <= 2^-(1 - eta)."""
    if not 0 < p < 0.5 or not 0 < eta < 0.5:
        raise ParameterError("need 0 < p < 1/2 and 0 < eta < 1/2")
    target = 2.0 ** (-(1 - eta))
    t = 1
    while 0.5 + 0.5 * (1 - 2 * p) ** (t + 1) > target:
        t += 1
    return t


# --- search ------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    graph: BipartiteGraph
    metrics: CodeMetrics
    attempts: int
    seed: int
    satisfied: dict
    conditioned: bool
    verified: bool

    @property
    def ok(self) -> bool:
        return all(self.satisfied.values())

    def to_record(self) -> dict:
        return {
            "ok": self.ok,
            "satisfied": dict(self.satisfied),
            "attempts": self.attempts,
            "seed": self.seed,
            "conditioned": self.conditioned,
            "verified": self.verified,
            "metrics": self.metrics.to_record(),
            "biadjacency": self.graph.to_text(),
        }


def _flags(g: BipartiteGraph, metrics: CodeMetrics, params: ModelParams, c: ConstraintSpec) -> dict:
    d = metrics.min_distance
    div = metrics.diversity
    return {
        "distance": d is not None and d >= params.distance_target,
        "diversity": div is not None and div >= params.gamma - 1e-12,
        "constraint": check_constraint(g, c),
    }


def verify_independently(g: BipartiteGraph, params: ModelParams, c: ConstraintSpec,
                         cap: int = ENUMERATION_CAP) -> dict:
    """Recheck the acceptance properties along code paths separate from the search."""
    d = naive_min_distance(g, cap)
    rank_ok = rate_and_redundancy(code_from_graph(g))[0] >= 1 - g.n_right / g.n_left - 1e-12
    return {
        "distance": d is not None and d >= params.distance_target,
        "diversity": g.n_right >= 2 and naive_diversity_index(g) >= params.gamma - 1e-12,
        "constraint": _naive_constraint(g, c),
        "rate": rank_ok,
    }


def _naive_constraint(g, c):
    if c.kind == "hn":
        return naive_hn(g)
    if c.kind == "and":
        return all(_naive_constraint(g, s) for s in c.of)
    return check_constraint(g, c)


def rejection_search(params: ModelParams, c: ConstraintSpec, seed: int, max_attempts: int,
                     condition: bool = True, cap: int = ENUMERATION_CAP) -> SearchResult:
    """Sample graphs until one meets the distance, diversity and constraint targets.

    Attempt ``a`` samples with seed ``(seed, a)``. When ``condition`` is set and
    the constraint is a pure edge-presence event, its edges are fixed and the
    rest drawn as usual; this samples exactly from the model conditioned on
    the constraint, so accepted graphs have the same law as plain rejection.
    If every attempt fails the best-scoring one is returned with ``ok`` false.
    """
    if max_attempts < 1:
        raise ParameterError("max_attempts must be positive")
    if not 0 <= params.delta < 0.5:
        raise ParameterError("delta must lie in [0, 1/2)")
    if not params.epsilon > entropy(params.delta):
        raise ParameterError("epsilon must exceed H(delta)")
    if params.n - params.m > cap:
        raise SizeError(f"n - m = {params.n - params.m} exceeds the enumeration cap {cap}")
    forced = c.forced_edges(params.n, params.m) if condition else None
    best = None
    best_score = None
    for attempt in range(max_attempts):
        g = sample_bipartite(params, (seed, attempt), forced)
        metrics = code_metrics(g, cap)
        flags = _flags(g, metrics, params, c)
        if all(flags.values()):
            check = verify_independently(g, params, c, cap)
            if not all(check.values()):
                raise RuntimeError(f"independent re-verification disagrees: {check}")
            return SearchResult(g, metrics, attempt + 1, seed, flags, forced is not None, True)
        score = (sum(flags.values()), metrics.min_distance or 0, metrics.diversity or 0.0)
        if best_score is None or score > best_score:
            best_score = score
            best = (g, metrics, flags)
    g, metrics, flags = best
    return SearchResult(g, metrics, max_attempts, seed, flags, forced is not None, False)


# --- Monte Carlo ---------------------------------------------------------------

EVENTS = ("diversity_ge_gamma", "min_distance_ge_target", "constraint")


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class MonteCarloResult:
    event: str
    successes: int
    trials: int
    estimate: float
    ci_low: float
    ci_high: float

    def to_record(self) -> dict:
        return dict(self.__dict__)


def _event_holds(event, g, params, c, cap):
    if event == "constraint":
        return check_constraint(g, c)
    if event == "diversity_ge_gamma":
        return diversity_index(g) >= params.gamma - 1e-12
    # {0} has no nonzero word of weight below the target
    try:
        return min_distance(code_from_graph(g), cap) >= params.distance_target
    except DegenerateCodeError:
        return True


def monte_carlo_event(params: ModelParams, event: str, c: ConstraintSpec, trials: int, seed: int,
                      cap: int = ENUMERATION_CAP) -> MonteCarloResult:
    """Sample frequency of ``event`` over ``trials`` graphs, with a 95% Wilson interval.

    Trial ``i`` uses seed ``(seed, i)``, so the estimate does not depend on
    evaluation order.
    """
    if event not in EVENTS:
        raise ParameterError(f"unknown event {event!r}; expected one of {EVENTS}")
    if trials < 100:
        raise PreconditionError("Monte Carlo needs at least 100 trials")
    hits = sum(bool(_event_holds(event, sample_bipartite(params, (seed, i)), params, c, cap))
               for i in range(trials))
    lo, hi = wilson_interval(hits, trials)
    return MonteCarloResult(event, hits, trials, hits / trials, lo, hi)
