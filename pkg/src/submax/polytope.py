"""Down-closed constraint bodies with exact capped linear maximization.

Every body C here lives in [0,1]^n, contains the origin, and is down-closed:
y <= x in C implies y in C.  Two oracles are exposed.  ``linear_maximize``
solves  max <w, c>  over  c in C, ||c||_inf <= alpha  by a greedy that is
exact for these families (they are separable or single-row packing systems,
so the capped LP is a fractional knapsack).  ``contains_set`` and
``contains_point`` test membership of 0/1 sets and fractional points, used
by the brute-force verification oracles.

Tie-breaking in every greedy sort is lowest index first, and nonpositive
weights are zeroed before assigning mass: by down-closedness a coordinate
with w_i <= 0 can always be dropped without losing objective value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSubsetError
from .setfn import GroundSet, Point, SubsetLike, as_array, as_ground, as_mask, _mask_bits

FEAS_TOL = 1e-9


@dataclass(frozen=True)
class CapParam:
    """The l-inf cap on oracle outputs; alpha = 1 recovers the plain oracle."""

    alpha: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"cap alpha must lie in (0, 1], got {self.alpha}")


class Polytope:
    kind = "abstract"

    def __init__(self, ground: GroundSet | int):
        self.ground = as_ground(ground)

    @property
    def n(self) -> int:
        return self.ground.n

    def linear_maximize(self, w, cap: CapParam = CapParam(1.0)) -> Point:
        """argmax { <w, c> : c in C, ||c||_inf <= cap.alpha }, exactly."""
        wv = as_array(w)
        if wv.size != self.n:
            raise ValueError(f"weight vector has {wv.size} coordinates, expected {self.n}")
        if not np.all(np.isfinite(wv)):
            raise ValueError("weights must be finite")
        c = np.zeros(self.n)
        self._greedy_fill(wv, float(cap.alpha), c)
        return Point.trusted(c)

    def _greedy_fill(self, w: np.ndarray, alpha: float, out: np.ndarray) -> None:
        raise NotImplementedError

    def contains_set(self, S: SubsetLike) -> bool:
        """Whether the indicator vector of S lies in C."""
        mask = as_mask(S, self.n)
        return bool(self.contains_mask_batch(np.array([mask], dtype=np.int64))[0])

    def contains_mask_batch(self, masks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains_point(self, x) -> bool:
        """Whether x satisfies every defining inequality within tolerance."""
        xv = as_array(x)
        if xv.size != self.n:
            raise ValueError(f"point has {xv.size} coordinates, expected {self.n}")
        if xv.min() < -FEAS_TOL or xv.max() > 1.0 + FEAS_TOL:
            return False
        return self._satisfies(xv)

    def _satisfies(self, x: np.ndarray) -> bool:
        raise NotImplementedError

    def payload(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        return self.kind


def _stable_desc_order(w: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # descending weight, ties by ascending index
    return idx[np.argsort(-w[idx], kind="stable")]


class CardinalityPolytope(Polytope):
    """{ x in [0,1]^n : sum x_i <= k }."""

    kind = "cardinality"

    def __init__(self, ground: GroundSet | int, k: float):
        super().__init__(ground)
        if not (k > 0):
            raise ValueError(f"budget k must be positive, got {k}")
        self.k = float(k)

    def _greedy_fill(self, w, alpha, out):
        order = _stable_desc_order(w, np.nonzero(w > 0)[0])
        remaining = self.k
        for i in order:
            if remaining <= 0:
                break
            out[i] = min(alpha, remaining)
            remaining -= out[i]

    def contains_mask_batch(self, masks):
        bits = _mask_bits(masks, self.n)
        return bits.sum(axis=1) <= self.k + FEAS_TOL

    def _satisfies(self, x):
        return bool(x.sum() <= self.k + FEAS_TOL)

    def payload(self):
        return {"k": self.k}

    def describe(self):
        return f"cardinality(k={self.k:g})"


class PartitionMatroidPolytope(Polytope):
    """Ground set split into disjoint blocks, block b capped at k_b:
    { x in [0,1]^n : sum_{i in block b} x_i <= k_b  for all b }."""

    kind = "partition-matroid"

    def __init__(self, ground: GroundSet | int, blocks, budgets):
        super().__init__(ground)
        self.blocks = [np.array(sorted(int(i) for i in b), dtype=np.int64) for b in blocks]
        self.budgets = np.array(budgets, dtype=float)
        if len(self.blocks) != self.budgets.size:
            raise ValueError("need one budget per block")
        if self.budgets.size == 0 or self.budgets.min() <= 0:
            raise ValueError("block budgets must be positive")
        seen = np.zeros(self.n, dtype=bool)
        for b in self.blocks:
            if b.size == 0:
                raise ValueError("empty blocks are not allowed")
            if b.min() < 0 or b.max() >= self.n:
                raise InvalidSubsetError("block element outside ground set")
            if seen[b].any():
                raise ValueError("blocks must be disjoint")
            seen[b] = True
        if not seen.all():
            raise ValueError("blocks must cover the ground set")

    def _greedy_fill(self, w, alpha, out):
        for b, kb in zip(self.blocks, self.budgets):
            order = _stable_desc_order(w, b[w[b] > 0])
            remaining = kb
            for i in order:
                if remaining <= 0:
                    break
                out[i] = min(alpha, remaining)
                remaining -= out[i]

    def contains_mask_batch(self, masks):
        bits = _mask_bits(masks, self.n)
        ok = np.ones(masks.shape, dtype=bool)
        for b, kb in zip(self.blocks, self.budgets):
            ok &= bits[:, b].sum(axis=1) <= kb + FEAS_TOL
        return ok

    def _satisfies(self, x):
        return all(x[b].sum() <= kb + FEAS_TOL
                   for b, kb in zip(self.blocks, self.budgets))

    def payload(self):
        return {"blocks": [b.tolist() for b in self.blocks],
                "budgets": self.budgets.tolist()}

    def describe(self):
        return f"partition({len(self.blocks)} blocks)"


class KnapsackPolytope(Polytope):
    """{ x in [0,1]^n : <cost, x> <= budget } with strictly positive costs.
    Zero-cost items would make the capped LP assign them unboundedly cheap
    mass, so they are rejected at construction."""

    kind = "knapsack"

    def __init__(self, ground: GroundSet | int, costs, budget: float):
        super().__init__(ground)
        self.costs = np.array(costs, dtype=float)
        if self.costs.size != self.n:
            raise ValueError(f"need one cost per element, got {self.costs.size}")
        if self.costs.min() <= 0 or not np.all(np.isfinite(self.costs)):
            raise ValueError("knapsack costs must be strictly positive and finite")
        if not (budget > 0):
            raise ValueError(f"budget must be positive, got {budget}")
        self.budget = float(budget)

    def _greedy_fill(self, w, alpha, out):
        idx = np.nonzero(w > 0)[0]
        ratio = w[idx] / self.costs[idx]
        order = idx[np.argsort(-ratio, kind="stable")]
        remaining = self.budget
        for i in order:
            if remaining <= 0:
                break
            out[i] = min(alpha, remaining / self.costs[i])
            remaining -= out[i] * self.costs[i]

    def contains_mask_batch(self, masks):
        bits = _mask_bits(masks, self.n)
        return bits.astype(float) @ self.costs <= self.budget + FEAS_TOL

    def _satisfies(self, x):
        return bool(x @ self.costs <= self.budget + FEAS_TOL)

    def payload(self):
        return {"costs": self.costs.tolist(), "budget": self.budget}

    def describe(self):
        return f"knapsack(B={self.budget:g})"
