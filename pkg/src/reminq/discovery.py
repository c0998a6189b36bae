"""Causal structure learning over one-step transition records.

Eight variables enter the search: the four pre-step quantities
(state features and action) and the four post-step ones (next-state
features and reward).  Time splits them into two tiers, which both
constrains the search (nothing points backward) and orients every
cross-tier edge that survives; within-tier edges stay undirected,
so the output is a CPDAG.

Conditional independence is decided by the G-squared likelihood-ratio
test on stratified contingency tables.  The continuous reward column is
quantile-binned before testing.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.stats import chi2

from .data import Dataset

VARIABLES = ("rp_t", "e_t", "c_t", "a_t", "rp_t1", "e_t1", "c_t1", "reward")
TIERS = {
    "rp_t": 0,
    "e_t": 0,
    "c_t": 0,
    "a_t": 0,
    "rp_t1": 1,
    "e_t1": 1,
    "c_t1": 1,
    "reward": 1,
}


class CITestResult(NamedTuple):
    independent: bool
    p_value: float
    g_stat: float
    dof: int
    low_power: bool


def discretize_reward(values: np.ndarray, bins: int = 3) -> np.ndarray:
    """Quantile-bin a continuous column into ``bins`` ordinal codes."""
    if bins < 1:
        raise ValueError(f"bins must be at least 1, got {bins}")
    edges = np.quantile(values, [i / bins for i in range(1, bins)])
    return np.searchsorted(edges, values, side="right").astype(np.int64)


def _recode(column: np.ndarray) -> tuple[np.ndarray, int]:
    levels, coded = np.unique(column, return_inverse=True)
    return coded.astype(np.int64), len(levels)


def _coded_columns(data: Dataset, reward_bins: int) -> dict[str, tuple[np.ndarray, int]]:
    out = {}
    for name in VARIABLES:
        raw = data.column(name)
        if name == "reward":
            raw = discretize_reward(raw, reward_bins)
        out[name] = _recode(raw)
    return out


def _g_statistic(
    x: np.ndarray, kx: int, y: np.ndarray, ky: int, strata: np.ndarray, n_strata: int
) -> tuple[float, int]:
    idx = (strata * kx + x) * ky + y
    counts = np.bincount(idx, minlength=n_strata * kx * ky).astype(np.float64)
    counts = counts.reshape(n_strata, kx, ky)
    totals = counts.sum(axis=(1, 2))
    row_m = counts.sum(axis=2, keepdims=True)
    col_m = counts.sum(axis=1, keepdims=True)
    safe_totals = np.where(totals > 0, totals, 1.0)
    expected = row_m * col_m / safe_totals[:, None, None]
    mask = counts > 0
    g = 2.0 * float(np.sum(counts[mask] * np.log(counts[mask] / expected[mask])))
    dof = (kx - 1) * (ky - 1) * int(np.count_nonzero(totals))
    return g, dof


def g_test_ci(
    data: Dataset,
    x: str,
    y: str,
    z: tuple[str, ...] = (),
    alpha: float = 0.05,
    reward_bins: int = 3,
) -> CITestResult:
    """G-squared conditional independence test of x and y given z.

    Underpowered tables (fewer than 5 samples per degree of freedom)
    refuse to reject: they report independence with ``low_power`` set.
    """
    z = tuple(z)
    if x == y or x in z or y in z:
        raise ValueError("x, y, and z must name distinct variables")
    coded = _coded_columns(data, reward_bins)
    return _g_test_coded(coded, x, y, z, alpha)


def _g_test_coded(
    coded: dict[str, tuple[np.ndarray, int]],
    x: str,
    y: str,
    z: tuple[str, ...],
    alpha: float,
) -> CITestResult:
    xc, kx = coded[x]
    yc, ky = coded[y]
    n = len(xc)
    strata = np.zeros(n, dtype=np.int64)
    n_strata = 1
    for name in z:
        zc, kz = coded[name]
        strata = strata * kz + zc
        n_strata *= kz
    g, dof = _g_statistic(xc, kx, yc, ky, strata, n_strata)
    p = float(chi2.sf(g, dof)) if dof > 0 else 1.0
    if n < 5 * dof:
        return CITestResult(True, p, g, dof, True)
    return CITestResult(p >= alpha, p, g, dof, False)


@dataclass
class CausalGraph:
    """CPDAG over the eight transition variables with temporal tiers."""

    nodes: tuple[str, ...] = VARIABLES
    tiers: dict[str, int] = field(default_factory=lambda: dict(TIERS))
    directed: list[tuple[str, str]] = field(default_factory=list)
    undirected: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.nodes = tuple(self.nodes)
        self.directed = [tuple(e) for e in self.directed]
        self.undirected = [tuple(sorted(e)) for e in self.undirected]
        for a, b in self.directed + self.undirected:
            if a == b:
                raise ValueError(f"self edge on {a}")
            if a not in self.tiers or b not in self.tiers:
                raise ValueError(f"edge touches unknown node: ({a}, {b})")
        for a, b in self.directed:
            if self.tiers[a] >= self.tiers[b]:
                raise ValueError(f"directed edge ({a}, {b}) violates the temporal tiers")
        for a, b in self.undirected:
            if self.tiers[a] != self.tiers[b]:
                raise ValueError(f"cross-tier edge ({a}, {b}) must be directed")
        self.directed.sort()
        self.undirected.sort()

    def skeleton(self) -> set[frozenset[str]]:
        return {frozenset(e) for e in self.directed} | {frozenset(e) for e in self.undirected}

    def neighbors(self, node: str) -> tuple[str, ...]:
        out = set()
        for a, b in self.directed + self.undirected:
            if a == node:
                out.add(b)
            elif b == node:
                out.add(a)
        return tuple(sorted(out))

    def to_json(self) -> str:
        payload = {
            "nodes": list(self.nodes),
            "tiers": self.tiers,
            "directed": [list(e) for e in self.directed],
            "undirected": [list(e) for e in self.undirected],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CausalGraph":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"graph is not valid JSON: {exc}") from exc
        try:
            return cls(
                nodes=tuple(payload["nodes"]),
                tiers={k: int(v) for k, v in payload["tiers"].items()},
                directed=[tuple(e) for e in payload["directed"]],
                undirected=[tuple(e) for e in payload["undirected"]],
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"graph JSON missing or malformed field: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CausalGraph":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def pc_learn(
    data: Dataset,
    alpha: float = 0.05,
    max_cond_size: int = 3,
    reward_bins: int = 3,
) -> CausalGraph:
    """PC-stable skeleton search plus temporal-tier orientation.

    Constant columns cannot carry dependence; they are isolated up front
    with a warning.  Conditioning sets grow from size 0 to
    ``max_cond_size`` and are drawn from current adjacencies, with the
    adjacency snapshot frozen per level so edge order cannot matter.
    """
    if len(data) == 0:
        raise ValueError("dataset is empty")
    coded = _coded_columns(data, reward_bins)

    active = []
    for name in VARIABLES:
        if coded[name][1] < 2:
            warnings.warn(f"variable {name} is constant; isolating it", stacklevel=2)
        else:
            active.append(name)

    adj: dict[str, set[str]] = {v: set(active) - {v} for v in active}
    pairs = [
        (x, y)
        for i, x in enumerate(active)
        for y in active[i + 1 :]
    ]

    for cond_size in range(0, max_cond_size + 1):
        snapshot = {v: tuple(sorted(adj[v], key=VARIABLES.index)) for v in active}
        any_candidate = False
        for x, y in pairs:
            if y not in adj[x]:
                continue
            candidates = []
            for base in (snapshot[x], snapshot[y]):
                pool = tuple(v for v in base if v != x and v != y)
                if len(pool) >= cond_size:
                    any_candidate = True
                    candidates.extend(itertools.combinations(pool, cond_size))
            seen: set[frozenset[str]] = set()
            for cond in candidates:
                key = frozenset(cond)
                if key in seen:
                    continue
                seen.add(key)
                if _g_test_coded(coded, x, y, cond, alpha).independent:
                    adj[x].discard(y)
                    adj[y].discard(x)
                    break
        if not any_candidate and cond_size > 0:
            break

    directed = []
    undirected = []
    for x, y in pairs:
        if y not in adj[x]:
            continue
        if TIERS[x] == TIERS[y]:
            undirected.append(tuple(sorted((x, y))))
        elif TIERS[x] < TIERS[y]:
            directed.append((x, y))
        else:
            directed.append((y, x))
    return CausalGraph(directed=directed, undirected=undirected)
