"""Random bipartite-graph parity-check codes and fractional graph capacity."""

__version__ = "0.1.0"

from graphcodes._backend import BACKEND  # noqa: E402
