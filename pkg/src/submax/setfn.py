"""Submodular set functions and their multilinear extension.

A set function f: 2^V -> R+ is submodular when f(A) + f(B) >= f(A|B) + f(A&B)
for all A, B.  Its multilinear extension F(x) = E[f(R(x))] averages f over the
random subset R(x) that keeps element i independently with probability x_i,
so F agrees with f on 0/1 vectors and is linear in each coordinate separately.

Three evaluation modes are supported:

  exact   -- full enumeration of the 2^n subset weights (n <= 25),
  closed  -- the analytically identical polynomial available for the
             structural families (directed cut, weighted coverage),
  mc      -- Monte Carlo sampling of R(x), reproducible from a seed.

Partial derivatives always go through the one-coordinate identity
dF/dx_i = F(x with x_i=1) - F(x with x_i=0).  Because F is multilinear this
is exact; no finite-difference fuzz is ever involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import EstimatorError, InvalidSubsetError

COORD_TOL = 1e-12
EXACT_ENUM_LIMIT = 25   # 2^n subset weights; the desk-scale ceiling
NONNEG_CHECK_LIMIT = 16  # exhaustive nonnegativity check on explicit tables
SUBMOD_CHECK_LIMIT = 12  # exhaustive submodularity check on explicit tables

SubsetLike = Union[int, Iterable[int]]


@dataclass(frozen=True)
class GroundSet:
    """The index set {0, ..., n-1}."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"ground set size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    def elements(self) -> range:
        return range(self.n)


def as_ground(ground: GroundSet | int) -> GroundSet:
    return ground if isinstance(ground, GroundSet) else GroundSet(int(ground))


def as_mask(S: SubsetLike, n: int) -> int:
    """Canonicalize a subset (bitmask int, or iterable of element indices)
    to a bitmask with bit i <-> element i."""
    if isinstance(S, (int, np.integer)):
        m = int(S)
        if m < 0 or m >> n:
            raise InvalidSubsetError(f"bitmask {m} outside ground set of size {n}")
        return m
    m = 0
    for e in S:
        i = int(e)
        if i < 0 or i >= n:
            raise InvalidSubsetError(f"element {i} outside ground set of size {n}")
        m |= 1 << i
    return m


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(int(mask).bit_length()) if (mask >> i) & 1)


class Point:
    """A vector in [0,1]^n with the coordinatewise operations the algorithms
    use: x*y (product), x|y (max), x&y (min), ~x (1-x)."""

    __slots__ = ("v",)

    def __init__(self, coords):
        v = np.array(coords, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("a point is a nonempty 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("point coordinates must be finite")
        if v.min() < -COORD_TOL or v.max() > 1.0 + COORD_TOL:
            raise ValueError(f"coordinates outside [0,1] beyond tolerance: {v}")
        np.clip(v, 0.0, 1.0, out=v)
        v.flags.writeable = False
        self.v = v

    @classmethod
    def trusted(cls, v: np.ndarray) -> "Point":
        # fast path for hot loops; caller guarantees a fresh float array in [0,1]
        p = object.__new__(cls)
        v.flags.writeable = False
        p.v = v
        return p

    @classmethod
    def zeros(cls, n: int) -> "Point":
        return cls(np.zeros(n))

    @classmethod
    def ones(cls, n: int) -> "Point":
        return cls(np.ones(n))

    @classmethod
    def indicator(cls, n: int, S: SubsetLike) -> "Point":
        mask = as_mask(S, n)
        return cls([(mask >> i) & 1 for i in range(n)])

    @property
    def n(self) -> int:
        return self.v.size

    def __mul__(self, other: "Point") -> "Point":
        return Point(self.v * other.v)

    def __or__(self, other: "Point") -> "Point":
        return Point(np.maximum(self.v, other.v))

    def __and__(self, other: "Point") -> "Point":
        return Point(np.minimum(self.v, other.v))

    def __invert__(self) -> "Point":
        return Point(1.0 - self.v)

    def complement(self) -> "Point":
        return ~self

    def __le__(self, other: "Point") -> bool:
        return bool(np.all(self.v <= other.v + COORD_TOL))

    def norm_inf(self) -> float:
        return float(np.max(self.v))

    def norm_1(self) -> float:
        return float(np.sum(self.v))

    def dot(self, other: "Point") -> float:
        return float(self.v @ other.v)

    def __repr__(self):
        return f"Point({self.v.tolist()})"


def as_array(x) -> np.ndarray:
    """Accept a Point or any 1-d array-like; return the coordinate array."""
    if isinstance(x, Point):
        return x.v
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class EstimatorConfig:
    """How to evaluate the multilinear extension.

    ``stream`` extends the seed so that nested runs (per theta, per time
    step) draw from disjoint, reproducible counter-based streams.
    """

    mode: str = "exact"
    sample_count: int = 10_000
    rng_seed: int = 0
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if self.mode not in ("exact", "closed", "mc"):
            raise EstimatorError(f"unknown evaluation mode {self.mode!r}")
        if int(self.sample_count) < 1:
            raise EstimatorError("sample_count must be a positive integer")

    def substream(self, *labels: int) -> "EstimatorConfig":
        return EstimatorConfig(self.mode, self.sample_count, self.rng_seed,
                               self.stream + tuple(int(l) for l in labels))

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=int(self.rng_seed) & (2**64 - 1),
                                     spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(seq))


class SetFunction:
    """Value oracle for a nonnegative submodular f over a ground set."""

    kind = "abstract"
    has_closed_form = False

    def __init__(self, ground: GroundSet | int):
        self.ground = as_ground(ground)
        self._table: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.ground.n

    def value_mask(self, mask: int) -> float:
        return float(self.value_batch(np.array([mask], dtype=np.int64))[0])

    def value(self, S: SubsetLike) -> float:
        return self.value_mask(as_mask(S, self.n))

    def value_batch(self, masks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def closed_form_batch(self, X: np.ndarray) -> np.ndarray:
        raise EstimatorError(f"{self.kind} has no closed-form extension")

    def full_table(self) -> np.ndarray:
        """All 2^n values, indexed by bitmask (bit i = element i). Cached."""
        if self._table is None:
            if self.n > EXACT_ENUM_LIMIT:
                raise EstimatorError(
                    f"exact enumeration limited to n <= {EXACT_ENUM_LIMIT}, got n={self.n}")
            out = np.empty(1 << self.n)
            chunk = 1 << 20
            for lo in range(0, out.size, chunk):
                masks = np.arange(lo, min(lo + chunk, out.size), dtype=np.int64)
                out[lo:lo + masks.size] = self.value_batch(masks)
            self._table = out
        return self._table

    def payload(self) -> dict:
        """Kind-specific payload for serialization."""
        raise NotImplementedError


def _mask_bits(masks: np.ndarray, n: int) -> np.ndarray:
    """(m,) int masks -> (m, n) boolean membership matrix."""
    return (masks[:, None] >> np.arange(n)[None, :]) & 1 != 0


class ExplicitTable(SetFunction):
    """f given by all 2^n values.  Nonnegativity is checked exhaustively for
    n <= 16 and submodularity for n <= 12; invalid tables are rejected, never
    repaired."""

    kind = "explicit-table"

    def __init__(self, ground: GroundSet | int, values):
        super().__init__(ground)
        vals = np.array(values, dtype=float)
        if vals.ndim != 1 or vals.size != (1 << self.n):
            raise ValueError(
                f"explicit table needs exactly 2^{self.n} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("table values must be finite")
        if self.n <= NONNEG_CHECK_LIMIT and vals.min() < 0:
            bad = int(np.argmin(vals))
            raise ValueError(f"negative value {vals[bad]} at subset mask {bad}")
        if self.n <= SUBMOD_CHECK_LIMIT:
            _check_submodular_table(vals, self.n)
        vals.flags.writeable = False
        self.values = vals
        self._table = vals

    def value_batch(self, masks: np.ndarray) -> np.ndarray:
        if masks.size and (masks.min() < 0 or masks.max() >> self.n):
            raise InvalidSubsetError("bitmask outside ground set")
        return self.values[masks]

    def payload(self) -> dict:
        return {"values": self.values.tolist()}


def _check_submodular_table(vals: np.ndarray, n: int, tol: float = 1e-9) -> None:
    """Exhaustive pairwise check: f(S+i) + f(S+j) >= f(S+i+j) + f(S)."""
    masks = np.arange(vals.size, dtype=np.int64)
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            base = masks[(masks & (bi | bj)) == 0]
            gap = vals[base | bi] + vals[base | bj] - vals[base | bi | bj] - vals[base]
            if gap.min() < -tol:
                k = int(base[np.argmin(gap)])
                raise ValueError(
                    f"table is not submodular: violated at S=mask {k}, i={i}, j={j}")


class DirectedCut(SetFunction):
    """Weighted directed cut: f(S) = sum of w(a->b) over arcs with a in S,
    b not in S.  Nonnegative and submodular by construction, and non-monotone
    whenever the graph has at least one arc."""

    kind = "directed-cut"
    has_closed_form = True

    def __init__(self, ground: GroundSet | int, arcs):
        super().__init__(ground)
        arcs = list(arcs)
        src = np.array([a[0] for a in arcs], dtype=np.int64)
        dst = np.array([a[1] for a in arcs], dtype=np.int64)
        w = np.array([a[2] for a in arcs], dtype=float)
        if src.size:
            if src.min() < 0 or src.max() >= self.n or dst.min() < 0 or dst.max() >= self.n:
                raise InvalidSubsetError("arc endpoint outside ground set")
            if np.any(src == dst):
                raise ValueError("self-loop arcs are not allowed")
            if w.min() < 0 or not np.all(np.isfinite(w)):
                raise ValueError("arc weights must be finite and nonnegative")
        self.src, self.dst, self.w = src, dst, w

    def value_batch(self, masks: np.ndarray) -> np.ndarray:
        if masks.size and (masks.min() < 0 or masks.max() >> self.n):
            raise InvalidSubsetError("bitmask outside ground set")
        if self.w.size == 0:
            return np.zeros(masks.shape, dtype=float)
        in_src = (masks[:, None] >> self.src[None, :]) & 1
        in_dst = (masks[:, None] >> self.dst[None, :]) & 1
        return (in_src * (1 - in_dst)).astype(float) @ self.w

    def closed_form_batch(self, X: np.ndarray) -> np.ndarray:
        # F(x) = sum_arcs w * x_src * (1 - x_dst); exact by multilinearity
        if self.w.size == 0:
            return np.zeros(X.shape[0], dtype=float)
        return (X[:, self.src] * (1.0 - X[:, self.dst])) @ self.w

    def payload(self) -> dict:
        return {"arcs": [[int(a), int(b), float(wt)]
                         for a, b, wt in zip(self.src, self.dst, self.w)]}


class Coverage(SetFunction):
    """Weighted coverage: element i covers a fixed item set, and
    f(S) = total weight of items covered by S.  Monotone submodular."""

    kind = "coverage"
    has_closed_form = True

    def __init__(self, ground: GroundSet | int, covers, item_weights):
        super().__init__(ground)
        self.item_weights = np.array(item_weights, dtype=float)
        m = self.item_weights.size
        if m and (self.item_weights.min() < 0 or not np.all(np.isfinite(self.item_weights))):
            raise ValueError("item weights must be finite and nonnegative")
        if len(covers) != self.n:
            raise ValueError(f"need one cover list per element, got {len(covers)}")
        self.covers = [sorted(int(j) for j in c) for c in covers]
        inc = np.zeros((self.n, m), dtype=bool)
        for i, items in enumerate(self.covers):
            for j in items:
                if j < 0 or j >= m:
                    raise InvalidSubsetError(f"item {j} outside item universe of size {m}")
                inc[i, j] = True
        self.incidence = inc

    def value_batch(self, masks: np.ndarray) -> np.ndarray:
        if masks.size and (masks.min() < 0 or masks.max() >> self.n):
            raise InvalidSubsetError("bitmask outside ground set")
        bits = _mask_bits(masks, self.n)
        covered = bits.astype(float) @ self.incidence > 0
        return covered @ self.item_weights

    def closed_form_batch(self, X: np.ndarray) -> np.ndarray:
        # F(x) = sum_j w_j * (1 - prod_{i covers j} (1 - x_i))
        m = self.item_weights.size
        if m == 0:
            return np.zeros(X.shape[0], dtype=float)
        out = np.empty(X.shape[0], dtype=float)
        rows = max(1, (1 << 21) // max(1, self.n * m))
        for lo in range(0, X.shape[0], rows):
            miss = 1.0 - X[lo:lo + rows]
            surv = np.prod(np.where(self.incidence[None, :, :],
                                    miss[:, :, None], 1.0), axis=1)
            out[lo:lo + rows] = (1.0 - surv) @ self.item_weights
        return out

    def payload(self) -> dict:
        return {"covers": [list(c) for c in self.covers],
                "item_weights": self.item_weights.tolist()}


# ---------------------------------------------------------------------------
# Extension evaluation


def _subset_weights_batch(X: np.ndarray) -> np.ndarray:
    """Row r gets the 2^n probabilities prod_{i in S} x_i prod_{i not in S}(1-x_i),
    indexed by subset bitmask."""
    m, n = X.shape
    W = np.ones((m, 1 << n))
    for i in range(n):
        view = W.reshape(m, -1, 2, 1 << i)
        view[:, :, 1, :] *= X[:, i, None, None]
        view[:, :, 0, :] *= (1.0 - X[:, i])[:, None, None]
    return W


def default_config(f: SetFunction, **kw) -> EstimatorConfig:
    """Closed form when the family has one, exact enumeration otherwise."""
    return EstimatorConfig(mode="closed" if f.has_closed_form else "exact", **kw)


def _check_mode(f: SetFunction, cfg: EstimatorConfig) -> None:
    if cfg.mode == "exact" and f.n > EXACT_ENUM_LIMIT:
        raise EstimatorError(
            f"exact enumeration limited to n <= {EXACT_ENUM_LIMIT}, got n={f.n}")
    if cfg.mode == "closed" and not f.has_closed_form:
        raise EstimatorError(
            f"closed-form evaluation is not available for kind {f.kind!r}")


def multilinear_batch(f: SetFunction, X: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    """Evaluate F at every row of X. Exact and closed modes only."""
    _check_mode(f, cfg)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if cfg.mode == "closed":
        return f.closed_form_batch(X)
    if cfg.mode == "exact":
        table = f.full_table()
        out = np.empty(X.shape[0])
        # keep the (rows x 2^n) weight matrix under ~2^24 entries
        chunk = max(1, (1 << 24) >> f.n)
        for lo in range(0, X.shape[0], chunk):
            out[lo:lo + chunk] = _subset_weights_batch(X[lo:lo + chunk]) @ table
        return out
    raise EstimatorError("batch evaluation supports exact and closed modes only")


def _mc_values(f: SetFunction, x: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    """Per-sample values f(R(x)) for cfg.sample_count independent draws."""
    rng = cfg.rng()
    U = rng.random((cfg.sample_count, f.n))
    R = U < x[None, :]
    return _vertex_values(f, R)


def _vertex_values(f: SetFunction, R: np.ndarray) -> np.ndarray:
    if f.has_closed_form:
        return f.closed_form_batch(R.astype(float))
    masks = R @ (np.int64(1) << np.arange(f.n, dtype=np.int64))
    return f.value_batch(masks)


def eval_set(f: SetFunction, S: SubsetLike) -> float:
    """f(S); deterministic value-oracle access."""
    return f.value(S)


def multilinear(f: SetFunction, x, cfg: EstimatorConfig | None = None) -> float:
    """The extension value F(x) under the configured estimator."""
    if cfg is None:
        cfg = default_config(f)
    xv = as_array(x)
    if cfg.mode == "mc":
        return float(_mc_values(f, xv, cfg).mean())
    return float(multilinear_batch(f, xv[None, :], cfg)[0])


def gradient(f: SetFunction, x, cfg: EstimatorConfig | None = None) -> np.ndarray:
    """dF/dx_i = F(x with x_i=1) - F(x with x_i=0) for every coordinate.

    Monte Carlo mode shares one batch of uniforms across all 2n endpoint
    evaluations (common random numbers), which preserves the antitone
    structure of the estimates far better than independent draws.
    """
    if cfg is None:
        cfg = default_config(f)
    xv = as_array(x)
    n = f.n
    if cfg.mode == "mc":
        rng = cfg.rng()
        U = rng.random((cfg.sample_count, n))
        R = U < xv[None, :]
        g = np.empty(n)
        for i in range(n):
            hi = R.copy()
            hi[:, i] = True
            lo = R.copy()
            lo[:, i] = False
            g[i] = _vertex_values(f, hi).mean() - _vertex_values(f, lo).mean()
        return g
    X = np.repeat(xv[None, :], 2 * n, axis=0)
    X[np.arange(n), np.arange(n)] = 1.0
    X[n + np.arange(n), np.arange(n)] = 0.0
    vals = multilinear_batch(f, X, cfg)
    return vals[:n] - vals[n:]


def residual_gradient(f: SetFunction, x, cfg: EstimatorConfig | None = None) -> np.ndarray:
    """gradient(f, x) * (1 - x), the effective gain direction under the
    multiplicative update."""
    xv = as_array(x)
    return gradient(f, xv, cfg) * (1.0 - xv)


def max_singleton(f: SetFunction) -> float:
    """max_i f({i}); the scale constant in the smoothness bounds."""
    singles = np.int64(1) << np.arange(f.n, dtype=np.int64)
    return float(f.value_batch(singles).max())
