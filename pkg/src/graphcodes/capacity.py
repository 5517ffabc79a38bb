"""Fractional graph capacity: restricted strong powers, exact independence
numbers, finite-order certificates and the degree/capacity bound sandwich."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import networkx as nx

from graphcodes import _backend
from graphcodes.errors import (
    ApplicabilityError,
    DomainError,
    FeasibilityError,
    ProvenanceError,
    SizeError,
    ValidationError,
)
from graphcodes.gf2core import entropy

VERTEX_CAP = 20000
TOL = 1e-9


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("a graph needs at least one vertex")
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.n):
                raise ValidationError(f"edge {e} is not a canonical pair inside 0..{self.n - 1}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> SimpleGraph:
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) has a vertex outside 0..{n - 1}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge ({u}, {v})")
            seen.add(key)
        return cls(n, frozenset(seen))

    @classmethod
    def cycle(cls, n: int) -> SimpleGraph:
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> SimpleGraph:
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def complete(cls, n: int) -> SimpleGraph:
        return cls.from_edges(n, itertools.combinations(range(n), 2))

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> SimpleGraph:
        g = nx.convert_node_labels_to_integers(g, ordering="sorted")
        return cls.from_edges(g.number_of_nodes(), g.edges())

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(sorted(self.edges))
        return g

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    @property
    def num_vertices(self) -> int:
        return self.n

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def closed_neighbourhood(self, v: int) -> list[int]:
        bits = self.adjacency[v] | (1 << v)
        return [u for u in range(self.n) if (bits >> u) & 1]

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())


def degree_stats(g: SimpleGraph) -> tuple[float, int]:
    degs = [g.degree(v) for v in range(g.n)]
    return sum(degs) / g.n, max(degs)


@dataclass(frozen=True)
class ProductGraph:
    """G(r, k): r-tuples adjacent when every coordinate pair is equal or a base
    edge and at most k coordinates differ. ``k == r`` is the strong power."""

    base: SimpleGraph
    r: int
    k: int
    adjacency: tuple[int, ...] = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return len(self.adjacency)

    def vertex(self, index: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.r):
            index, x = divmod(index, self.base.n)
            out.append(x)
        return tuple(reversed(out))

    def index(self, v: tuple[int, ...]) -> int:
        idx = 0
        for x in v:
            idx = idx * self.base.n + x
        return idx

    def edges(self) -> set[tuple[int, int]]:
        return {(i, j) for i, a in enumerate(self.adjacency) for j in range(i + 1, len(self.adjacency))
                if (a >> j) & 1}


def _check_cap(count: int, cap: int):
    if count > cap:
        raise SizeError(f"{count} vertices exceeds the cap of {cap}")


def restricted_power(g: SimpleGraph, r: int, k: int, cap: int = VERTEX_CAP) -> ProductGraph:
    if r < 1:
        raise DomainError("r must be >= 1")
    if not 0 <= k <= r:
        raise DomainError(f"need 0 <= k <= r, got k={k}, r={r}")
    _check_cap(g.n**r, cap)
    nbhd = [g.closed_neighbourhood(v) for v in range(g.n)]
    weights = [g.n ** (r - 1 - i) for i in range(r)]
    adj = []
    for v in itertools.product(range(g.n), repeat=r):
        bits = 0
        for u in itertools.product(*(nbhd[x] for x in v)):
            diff = sum(a != b for a, b in zip(u, v))
            if 0 < diff <= k:
                bits |= 1 << sum(w * x for w, x in zip(weights, u))
        adj.append(bits)
    return ProductGraph(g, r, k, tuple(adj))


def strong_power(g: SimpleGraph, r: int, cap: int = VERTEX_CAP) -> ProductGraph:
    return restricted_power(g, r, r, cap)


def max_stable_set(graph, cap: int = VERTEX_CAP, backend: str | None = None) -> tuple[int, list[int]]:
    """Exact independence number and a deterministic maximum stable set."""
    _check_cap(graph.num_vertices, cap)
    alpha, bits = _backend.max_independent_set(graph.adjacency, backend)
    return alpha, [v for v in range(graph.num_vertices) if (bits >> v) & 1]


def alpha_exact(graph, cap: int = VERTEX_CAP, backend: str | None = None) -> int:
    return max_stable_set(graph, cap, backend)[0]


def ball_size_exact(g: SimpleGraph, r: int, k: int, v: tuple[int, ...], cap: int = VERTEX_CAP) -> int:
    """Closed ball of ``v`` in G(r, k), counted by scanning every tuple."""
    if len(v) != r:
        raise DomainError("tuple length must equal r")
    _check_cap(g.n**r, cap)
    adj = g.adjacency
    count = 0
    for u in itertools.product(range(g.n), repeat=r):
        diff = 0
        for a, b in zip(u, v):
            if a != b:
                if not (adj[a] >> b) & 1:
                    break
                diff += 1
        else:
            if diff <= k:
                count += 1
    return count


def expected_ball_size(g: SimpleGraph, r: int, k: int) -> float:
    """Mean closed-ball size over uniform tuples: sum_{j<=k} C(r, j) d_av^j."""
    d_av, _ = degree_stats(g)
    return float(sum(math.comb(r, j) * d_av**j for j in range(min(k, r) + 1)))


def max_ball_bound(g: SimpleGraph, r: int, k: int) -> int:
    """Worst-case closed-ball size bound sum_{j<=k} C(r, j) Delta^j."""
    _, dmax = degree_stats(g)
    return sum(math.comb(r, j) * dmax**j for j in range(min(k, r) + 1))


def f_bound(gamma: float, x: float) -> float:
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma={gamma} outside (0, 1]")
    if not x >= 1:
        raise DomainError(f"x={x} must be >= 1")
    if gamma < x / (x + 1):
        return 1.0 / (2.0 ** entropy(gamma) * x**gamma)
    return 1.0 / (x + 1)


@dataclass(frozen=True)
class Certificate:
    r: int
    k: int
    alpha: int

    @property
    def value(self) -> float:
        return self.alpha ** (1.0 / self.r)

    def to_record(self) -> dict:
        return {"r": self.r, "k": self.k, "alpha": self.alpha, "value": self.value}


@dataclass(frozen=True)
class CapacityReport:
    gamma: float
    n: int
    d_av: float
    delta_max: int
    lower_bound: float
    upper_bound: float
    lower_terms: tuple[float, float, float]
    theta_value: float
    theta_source: str
    certificates: tuple[Certificate, ...] = ()

    def to_record(self) -> dict:
        return {
            "gamma": self.gamma,
            "n": self.n,
            "d_av": self.d_av,
            "delta_max": self.delta_max,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "lower_terms": {
                "d_av": self.lower_terms[0],
                "delta_max": self.lower_terms[1],
                "n_minus_1": self.lower_terms[2],
            },
            "theta_value": self.theta_value,
            "theta_source": self.theta_source,
            "certificates": [c.to_record() for c in self.certificates],
        }


def capacity_bounds(g: SimpleGraph, gamma: float, theta_value: float, theta_source: str,
                    certificates: Iterable[Certificate] = ()) -> CapacityReport:
    """Degree lower bound and full-capacity upper bound on the gamma-fractional capacity."""
    if g.n < 3 or not g.is_connected():
        raise ApplicabilityError("bounds need a connected graph on at least 3 vertices")
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma={gamma} outside (0, 1]")
    a = alpha_exact(g)
    if not a - TOL <= theta_value <= g.n + TOL:
        raise ProvenanceError(f"capacity value {theta_value} outside [alpha={a}, n={g.n}]")
    d_av, dmax = degree_stats(g)
    terms = tuple(g.n * f_bound(gamma, x) for x in (d_av, dmax, g.n - 1))
    return CapacityReport(
        gamma=gamma,
        n=g.n,
        d_av=d_av,
        delta_max=dmax,
        lower_bound=max(terms),
        upper_bound=g.n * (theta_value / g.n) ** gamma,
        lower_terms=terms,
        theta_value=theta_value,
        theta_source=theta_source,
        certificates=tuple(certificates),
    )


def difference_budget(gamma: float, r: int, rule: str = "ceil") -> int:
    x = Fraction(gamma).limit_denominator(10**9) * r
    if rule == "ceil":
        return math.ceil(x)
    if rule == "floor":
        return math.floor(x)
    raise ValueError(f"unknown rounding rule {rule!r}")


def feasible_orders(g: SimpleGraph, gamma: float, r_max: int, cap: int = VERTEX_CAP) -> list[int]:
    r_min = math.ceil(1 / Fraction(gamma).limit_denominator(10**9))
    return [r for r in range(max(1, r_min), r_max + 1) if g.n**r <= cap]


def capacity_certificate(g: SimpleGraph, gamma: float, r_max: int, rule: str = "ceil",
                         cap: int = VERTEX_CAP, backend: str | None = None) -> list[Certificate]:
    """alpha(G(r, k))^(1/r) for every feasible order r.

    ``rule`` turns gamma*r into the integer budget k. With ``"ceil"`` every
    certificate also respects the full-capacity upper bound; ``"floor"`` is
    the literal "at most gamma*r differences" reading and can exceed it when
    gamma*r is fractional.
    """
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma={gamma} outside (0, 1]")
    orders = feasible_orders(g, gamma, r_max, cap)
    if not orders:
        raise FeasibilityError(f"no order r in [ceil(1/gamma), {r_max}] fits the vertex cap {cap}")
    out = []
    for r in orders:
        k = difference_budget(gamma, r, rule)
        out.append(Certificate(r, k, alpha_exact(restricted_power(g, r, k, cap), cap, backend)))
    return out


def recursion_terms(g: SimpleGraph, r: int, d: int, cap: int = VERTEX_CAP) -> tuple[int, int]:
    """(A(r, d), n^(r-d) A(d, d)) with A(r, d) = alpha(G(r, d))."""
    if not 1 <= d <= r:
        raise DomainError(f"need 1 <= d <= r, got d={d}, r={r}")
    lhs = alpha_exact(restricted_power(g, r, d, cap), cap)
    rhs = g.n ** (r - d) * alpha_exact(restricted_power(g, d, d, cap), cap)
    return lhs, rhs


def recursion_check(g: SimpleGraph, r: int, d: int, cap: int = VERTEX_CAP) -> bool:
    lhs, rhs = recursion_terms(g, r, d, cap)
    return lhs <= rhs


def capacity_registry_lookup(g: SimpleGraph) -> tuple[float, str] | None:
    """Known full capacities: C5, complete graphs, and bipartite graphs or their complements."""
    h = g.to_networkx()
    if g.n == 5 and nx.is_isomorphic(h, nx.cycle_graph(5)):
        return math.sqrt(5), "known value (Lovasz 1979): Theta(C5) = sqrt(5)"
    if len(g.edges) == g.n * (g.n - 1) // 2:
        return 1.0, "complete graph"
    if nx.is_bipartite(h):
        return float(alpha_exact(g)), "perfect graph (bipartite): Theta = alpha (standard result)"
    if nx.is_bipartite(nx.complement(h)):
        return float(alpha_exact(g)), "perfect graph (co-bipartite): Theta = alpha (standard result)"
    return None
