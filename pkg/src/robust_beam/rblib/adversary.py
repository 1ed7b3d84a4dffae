"""Worst-case deviation scenario for a fixed angle.

The discretized adversarial problem is a resource-constrained shortest path
over a layered graph: layer t holds one node per grid deviation index
0 <= i <= t * G, an arc into index j carries the slot rate at deviation
j * step as weight and j as resource, and the accumulated resource is capped
by the deviation budget B.
"""

from dataclasses import dataclass, field
import logging
import math
from pathlib import Path
from typing import Hashable, Iterator, List, Optional, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd

from robust_beam.rblib.beam_model import LinkParams, slot_rate_angular
from robust_beam.rblib.exceptions import (
    GridConfigError,
    InstanceTooLargeError,
    PreconditionError,
)
from robust_beam.rblib.uncertainty import Scenario, UncertaintySpec
from robust_beam.rblib.util import get_config, write_csv

config = get_config()
logger = logging.getLogger(__name__)

SOURCE = "source"
SINK = "sink"

# tolerance when flooring a ratio of angles onto integer grid steps
STEP_SNAP = 1e-9

_UNREACHABLE = np.iinfo(np.int64).max // 4


def _steps(value: float, step: float) -> int:
    return int(math.floor(value / step + STEP_SNAP))


@dataclass(frozen=True)
class DeviationGrid:
    """Uniform grid of angular deviations i * step_delta.

    Attributes:
        step_delta: grid step [rad].
        gap_steps_G: gap bound in steps, floor(d_gap / step_delta).
        budget_steps_B: budget in steps, floor(d_total / step_delta).
    """

    step_delta: float
    gap_steps_G: int
    budget_steps_B: int

    def __post_init__(self) -> None:
        """Validate the grid on its own."""
        if not (self.step_delta > 0.0 and math.isfinite(self.step_delta)):
            raise GridConfigError(f"step_delta must be positive, got {self.step_delta!r}")
        if self.gap_steps_G < 1:
            raise GridConfigError(
                f"the gap bound must span at least one step, got G={self.gap_steps_G}"
            )
        if self.budget_steps_B < 0:
            raise GridConfigError(f"budget steps must be non-negative, got B={self.budget_steps_B}")

    @classmethod
    def from_step(cls, spec: UncertaintySpec, step_delta: float) -> "DeviationGrid":
        """Grid with the given step, with G and B derived from the set."""
        if not step_delta > 0.0:
            raise GridConfigError(f"step_delta must be positive, got {step_delta!r}")
        return cls(
            step_delta=step_delta,
            gap_steps_G=_steps(spec.d_gap, step_delta),
            budget_steps_B=_steps(spec.d_total, step_delta),
        )

    @classmethod
    def from_spec(
        cls, spec: UncertaintySpec, step_fraction: Optional[float] = None
    ) -> "DeviationGrid":
        """Grid whose step is a fraction of d_gap (configured default 1/10)."""
        if step_fraction is None:
            step_fraction = config["defaults"]["deviation_step_fraction"]
        if not (0.0 < step_fraction <= 1.0):
            raise GridConfigError(f"step fraction must lie in (0, 1], got {step_fraction!r}")
        return cls.from_step(spec, spec.d_gap * step_fraction)

    def refined(self, spec: UncertaintySpec) -> "DeviationGrid":
        """Grid with half the step."""
        return DeviationGrid.from_step(spec, self.step_delta / 2.0)

    def check_consistent(self, spec: UncertaintySpec) -> None:
        """Raise GridConfigError unless G and B are derived from spec and the step."""
        expected_G = _steps(spec.d_gap, self.step_delta)
        expected_B = _steps(spec.d_total, self.step_delta)
        if (self.gap_steps_G, self.budget_steps_B) != (expected_G, expected_B):
            raise GridConfigError(
                f"grid (G={self.gap_steps_G}, B={self.budget_steps_B}) does not match "
                f"the uncertainty set (G={expected_G}, B={expected_B})"
            )

    def deviation(self, index: int) -> float:
        """Angular deviation of a grid index [rad]."""
        return int(index) * self.step_delta


@dataclass
class LayeredGraph:
    """Layered DAG of the adversarial problem for one angle.

    Nodes are SOURCE, SINK and (t, i) tuples. Every arc carries ``weight``
    (slot rate in bit/s of the destination deviation, 0 into SINK) and
    ``resource`` (destination index, 0 into SINK). The dynamic program only
    needs ``weights``; the networkx graph is built on first access for dumps
    and inspection.
    """

    weights: np.ndarray
    T: int
    G: int
    step_delta: float
    theta: float
    _digraph: Optional[nx.DiGraph] = field(default=None, init=False, repr=False, compare=False)

    @property
    def materialized(self) -> bool:
        """Whether the networkx graph has been built."""
        return self._digraph is not None

    @property
    def digraph(self) -> nx.DiGraph:
        """Arc structure as a networkx DiGraph."""
        if self._digraph is None:
            self._digraph = _layered_digraph(self.weights, self.T, self.G)
            logger.debug(
                "layered graph at theta=%r: %d nodes, %d arcs",
                self.theta,
                self._digraph.number_of_nodes(),
                self._digraph.number_of_edges(),
            )
        return self._digraph

    def layer_nodes(self, t: int) -> List[Tuple[int, int]]:
        """Nodes of layer t in index order."""
        return [(t, i) for i in range(1 + t * self.G)]

    def successors(self, node: Hashable) -> List[Tuple[int, int]]:
        """Arc heads of a node, without building the networkx graph."""
        if node == SOURCE:
            return self.layer_nodes(1)
        t, i = node  # type: ignore[misc]
        if t == self.T:
            return []
        return [(t + 1, j) for j in range(max(0, i - self.G), i + self.G + 1)]

    def arcs(self) -> Iterator[Tuple[Hashable, Hashable, dict]]:
        """All arcs with their attributes."""
        return iter(self.digraph.edges(data=True))

    def quantized_weights(self) -> np.ndarray:
        """Weights scaled to integers so path sums compare exactly."""
        return quantize_weights(self.weights)

    def to_df(self) -> pd.DataFrame:
        """Arc table with columns t, i, i_hat, weight_bit_per_s, resource.

        Arcs out of the source have t = 0 and i = -1; arcs into the sink have
        i_hat = -1.
        """
        rows = []
        for u, v, data in self.digraph.edges(data=True):
            t, i = (0, -1) if u == SOURCE else u
            i_hat = -1 if v == SINK else v[1]
            rows.append((t, i, i_hat, data["weight"], data["resource"]))
        rows.sort(key=lambda row: (row[0], row[1], row[2]))
        return pd.DataFrame(rows, columns=config["columns"]["graph"])


def quantize_weights(weights: np.ndarray) -> np.ndarray:
    """Scale rates onto integers with weight_bits of resolution.

    Integer path sums are exact and independent of summation order, so equal
    paths tie exactly in both the dynamic program and the exhaustive search.
    """
    weights = np.asarray(weights, dtype=float)
    top = float(weights.max()) if weights.size else 0.0
    if top <= 0.0:
        return np.zeros(weights.shape, dtype=np.int64)
    scale = float(2 ** int(config["numerics"]["weight_bits"]))
    return np.rint(weights / top * scale).astype(np.int64)


def index_rates(
    params: LinkParams, theta: float, step_delta: float, count: int
) -> np.ndarray:
    """Slot rates of the grid deviations 0..count-1, one evaluation each."""
    return np.array(
        [slot_rate_angular(params, theta, i * step_delta) for i in range(count)], dtype=float
    )


def _layered_digraph(weights: np.ndarray, T: int, G: int) -> nx.DiGraph:
    digraph = nx.DiGraph()
    digraph.add_node(SOURCE)
    for t in range(1, T + 1):
        digraph.add_nodes_from((t, i) for i in range(1 + t * G))
    digraph.add_node(SINK)

    digraph.add_edges_from(
        (SOURCE, (1, i), {"weight": float(weights[i]), "resource": i}) for i in range(G + 1)
    )
    for t in range(1, T):
        for i in range(1 + t * G):
            digraph.add_edges_from(
                ((t, i), (t + 1, j), {"weight": float(weights[j]), "resource": j})
                for j in range(max(0, i - G), i + G + 1)
            )
    digraph.add_edges_from(
        ((T, i), SINK, {"weight": 0.0, "resource": 0}) for i in range(1 + T * G)
    )
    return digraph


def build_graph(
    spec: UncertaintySpec, grid: DeviationGrid, params: LinkParams, theta: float
) -> LayeredGraph:
    """Build the layered graph of the adversarial problem at angle theta.

    Args:
        spec: the uncertainty set.
        grid: deviation grid consistent with spec.
        params: link parameters.
        theta: divergence angle [rad].

    Returns:
        The layered graph with T * G + 1 distinct arc weights.

    Raises:
        GridConfigError: If the grid does not match the uncertainty set.
    """
    grid.check_consistent(spec)
    T, G = spec.T, grid.gap_steps_G
    weights = index_rates(params, theta, grid.step_delta, 1 + T * G)
    return LayeredGraph(weights, T, G, grid.step_delta, theta)


def dump_graph(graph: LayeredGraph, path: Union[str, Path]) -> Path:
    """Write the arc table of a layered graph as CSV."""
    return write_csv(graph.to_df(), path)


def max_adjacent_rate_step(graph: LayeredGraph) -> float:
    """Largest rate change between neighbouring grid deviations [bit/s].

    Bounds how far the grid worst case can sit above the continuous one in
    each slot.
    """
    if graph.weights.size < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(graph.weights))))


@dataclass(frozen=True)
class AdversaryResult:
    """Worst grid scenario for one angle.

    Attributes:
        worst_scenario: the minimizing scenario, entries on the grid.
        worst_sum_rate: its sum rate [bit/s].
        budget_used: sum of its grid indices.
        indices: its grid indices.
        state_count: dynamic program states reached (0 for exhaustive search).
    """

    worst_scenario: Scenario
    worst_sum_rate: float
    budget_used: int
    indices: Tuple[int, ...] = ()
    state_count: int = 0
    theta: float = field(default=float("nan"), compare=False)


def _result(
    graph: LayeredGraph, indices: Tuple[int, ...], state_count: int
) -> AdversaryResult:
    return AdversaryResult(
        worst_scenario=Scenario.from_indices(indices, graph.step_delta),
        worst_sum_rate=math.fsum(float(graph.weights[i]) for i in indices),
        budget_used=int(sum(indices)),
        indices=tuple(int(i) for i in indices),
        state_count=state_count,
        theta=graph.theta,
    )


def solve_rcspp(graph: LayeredGraph, budget_B: int) -> AdversaryResult:
    """Minimum-weight source to sink path with total resource at most budget_B.

    Forward dynamic program over states (layer t, index i, budget used b)
    with per-state predecessor links. Among paths of equal weight the
    lexicographically largest index sequence wins: every reachable state of
    a layer gets a rank in the lexicographic order of its stored prefix, and
    equal-valued predecessors are compared by rank.

    Args:
        graph: layered graph built by build_graph.
        budget_B: resource limit in grid steps.

    Returns:
        The worst scenario with its sum rate, budget use and state count.

    Raises:
        PreconditionError: If budget_B is negative.
    """
    if budget_B < 0:
        raise PreconditionError(f"budget must be non-negative, got {budget_B}")
    T, G = graph.T, graph.G
    B = int(min(budget_B, sum(t * G for t in range(1, T + 1))))
    w = graph.quantized_weights()

    first = min(G, B)
    value = np.full((1 + G, B + 1), _UNREACHABLE, dtype=np.int64)
    rank = np.full((1 + G, B + 1), -1, dtype=np.int64)
    idx = np.arange(first + 1)
    value[idx, idx] = w[idx]
    rank[idx, idx] = idx
    state_count = first + 1
    predecessors: List[np.ndarray] = []

    for t in range(1, T):
        n_next = 1 + (t + 1) * G
        new_value = np.full((n_next, B + 1), _UNREACHABLE, dtype=np.int64)
        new_pred = np.full((n_next, B + 1), -1, dtype=np.int64)
        pred_rank = np.full((n_next, B + 1), -1, dtype=np.int64)
        for j in range(min(n_next - 1, B) + 1):
            lo, hi = max(0, j - G), min(t * G, j + G)
            block = value[lo : hi + 1, : B + 1 - j]
            block_rank = rank[lo : hi + 1, : B + 1 - j]
            best = block.min(axis=0)
            tied_rank = np.where(block == best, block_rank, -1)
            row = tied_rank.argmax(axis=0)
            cols = np.arange(B + 1 - j)
            reached = best < _UNREACHABLE
            new_value[j, j:] = np.where(reached, best + w[j], _UNREACHABLE)
            new_pred[j, j:] = np.where(reached, lo + row, -1)
            pred_rank[j, j:] = np.where(reached, block_rank[row, cols], -1)

        rows, cols = np.nonzero(new_value < _UNREACHABLE)
        order = np.lexsort((rows, pred_rank[rows, cols]))
        new_rank = np.full((n_next, B + 1), -1, dtype=np.int64)
        new_rank[rows[order], cols[order]] = np.arange(order.size)
        state_count += int(rows.size)

        predecessors.append(new_pred)
        value, rank = new_value, new_rank

    rows, cols = np.nonzero(value < _UNREACHABLE)
    finals = value[rows, cols]
    candidates = np.flatnonzero(finals == finals.min())
    pick = candidates[np.argmax(rank[rows[candidates], cols[candidates]])]
    i, b = int(rows[pick]), int(cols[pick])

    indices = [i]
    for pred in reversed(predecessors):
        i, b = int(pred[i, b]), b - i
        indices.append(i)
    indices.reverse()

    logger.debug("rcspp at theta=%r: %d states, path %s", graph.theta, state_count, indices)
    return _result(graph, tuple(indices), state_count)


def _sequence_count(T: int, G: int) -> int:
    return (1 + T * G) ** T


def brute_force_worst_case(
    spec: UncertaintySpec, grid: DeviationGrid, params: LinkParams, theta: float
) -> AdversaryResult:
    """Worst grid scenario by exhaustive enumeration.

    Enumerates every index sequence satisfying the first-slot, gap and
    budget constraints and keeps the minimizer, with the same integer
    weights and tie-break as solve_rcspp.

    Raises:
        InstanceTooLargeError: If (1 + T * G) ** T exceeds the configured limit.
    """
    limit = config["numerics"]["brute_force_limit"]
    T, G, B = spec.T, grid.gap_steps_G, grid.budget_steps_B
    if _sequence_count(T, G) > limit:
        raise InstanceTooLargeError(
            f"(1 + T*G)^T = {_sequence_count(T, G)} sequences exceeds the limit {limit}"
        )
    graph = build_graph(spec, grid, params, theta)
    w = [int(x) for x in graph.quantized_weights()]

    best_key: Optional[Tuple[int, Tuple[int, ...]]] = None
    stack: List[Tuple[Hashable, Tuple[int, ...], int, int]] = [(SOURCE, (), 0, 0)]
    while stack:
        node, prefix, used, total = stack.pop()
        if len(prefix) == T:
            key = (-total, prefix)
            if best_key is None or key > best_key:
                best_key = key
            continue
        for head in graph.successors(node):
            j = head[1]
            if used + j <= B:
                stack.append((head, prefix + (j,), used + j, total + w[j]))

    assert best_key is not None
    return _result(graph, best_key[1], 0)


def solve_adversary(
    spec: UncertaintySpec,
    grid: DeviationGrid,
    params: LinkParams,
    theta: float,
    dump_path: Optional[Union[str, Path]] = None,
) -> AdversaryResult:
    """Build the graph at theta and solve it with the grid's budget."""
    graph = build_graph(spec, grid, params, theta)
    if dump_path is not None:
        dump_graph(graph, dump_path)
    result = solve_rcspp(graph, grid.budget_steps_B)
    logger.debug(
        "grid diagnostic at theta=%r: max adjacent rate step %.6e bit/s",
        theta,
        max_adjacent_rate_step(graph),
    )
    return result
