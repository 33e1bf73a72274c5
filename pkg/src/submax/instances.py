"""Instance documents, seeded generators, and result records.

Instances are JSON documents with one canonical serialization (sorted keys,
two-space indent, trailing newline), so parse -> serialize is byte-identical
on canonical input and a given generator seed always produces the same file.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .cgreedy import RunConfig, solve
from .errors import InstanceFormatError
from .setfn import Coverage, DirectedCut, ExplicitTable, SetFunction
from .polytope import (CardinalityPolytope, KnapsackPolytope,
                       PartitionMatroidPolytope, Polytope)
from .verify import BRUTE_FORCE_LIMIT, brute_force_opt

SCHEMA_VERSION = 1
FUNCTION_KINDS = ("directed-cut", "coverage", "explicit-table")
CONSTRAINT_KINDS = ("cardinality", "partition-matroid", "knapsack")

CSV_HEADER = "instance,n,constraint,alpha,delta,theta_best,best_value,opt_value,ratio"


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


@dataclass
class InstanceFile:
    n: int
    function: dict
    constraint: dict
    metadata: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def name(self) -> str:
        return self.metadata.get("name", f"instance-n{self.n}")

    def to_json(self) -> str:
        return canonical_json({
            "schema_version": self.schema_version,
            "n": self.n,
            "function": self.function,
            "constraint": self.constraint,
            "metadata": self.metadata,
        })

    @classmethod
    def from_json(cls, text: str) -> "InstanceFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise InstanceFormatError(
                f"not valid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
        if not isinstance(doc, dict):
            raise InstanceFormatError("instance document must be a JSON object")
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise InstanceFormatError(
                f"unsupported schema_version {version!r}; this build reads "
                f"version {SCHEMA_VERSION}")
        for fld in ("n", "function", "constraint"):
            if fld not in doc:
                raise InstanceFormatError(f"missing required field {fld!r}")
        fk = doc["function"].get("kind")
        if fk not in FUNCTION_KINDS:
            raise InstanceFormatError(
                f"unknown function kind {fk!r} (schema_version {SCHEMA_VERSION})")
        ck = doc["constraint"].get("kind")
        if ck not in CONSTRAINT_KINDS:
            raise InstanceFormatError(
                f"unknown constraint kind {ck!r} (schema_version {SCHEMA_VERSION})")
        return cls(n=int(doc["n"]), function=doc["function"],
                   constraint=doc["constraint"],
                   metadata=doc.get("metadata", {}),
                   schema_version=version)

    def build_function(self) -> SetFunction:
        desc = self.function
        kind = desc["kind"]
        try:
            if kind == "directed-cut":
                return DirectedCut(self.n, desc["arcs"])
            if kind == "coverage":
                return Coverage(self.n, desc["covers"], desc["item_weights"])
            return ExplicitTable(self.n, desc["values"])
        except KeyError as e:
            raise InstanceFormatError(
                f"function payload missing field {e.args[0]!r}") from e

    def build_constraint(self) -> Polytope:
        desc = self.constraint
        kind = desc["kind"]
        try:
            if kind == "cardinality":
                return CardinalityPolytope(self.n, desc["k"])
            if kind == "partition-matroid":
                return PartitionMatroidPolytope(self.n, desc["blocks"], desc["budgets"])
            return KnapsackPolytope(self.n, desc["costs"], desc["budget"])
        except KeyError as e:
            raise InstanceFormatError(
                f"constraint payload missing field {e.args[0]!r}") from e

    def build(self) -> tuple[SetFunction, Polytope]:
        return self.build_function(), self.build_constraint()


def parse_instance(text: str) -> InstanceFile:
    return InstanceFile.from_json(text)


def serialize_instance(inst: InstanceFile) -> str:
    return inst.to_json()


# ---------------------------------------------------------------------------
# Seeded generation

_FK_LABEL = {k: i for i, k in enumerate(FUNCTION_KINDS)}
_CK_LABEL = {k: i for i, k in enumerate(CONSTRAINT_KINDS)}


def _rng_for(kind: str, n: int, constraint: str, seed: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                 spawn_key=(_FK_LABEL[kind], _CK_LABEL[constraint], n))
    return np.random.default_rng(seq)


def _gen_cut_payload(rng, n) -> dict:
    while True:
        keep = rng.random((n, n)) < 0.45
        np.fill_diagonal(keep, False)
        pairs = np.argwhere(keep)
        if pairs.size:
            break
    weights = 1.0 - rng.random(pairs.shape[0])  # Uniform(0, 1]
    arcs = [[int(a), int(b), float(w)] for (a, b), w in zip(pairs, weights)]
    return {"kind": "directed-cut", "arcs": arcs}


def _gen_coverage_payload(rng, n) -> dict:
    m = 2 * n
    while True:
        inc = rng.random((n, m)) < 0.3
        if inc.any():
            break
    weights = 1.0 - rng.random(m)
    covers = [np.nonzero(inc[i])[0].tolist() for i in range(n)]
    return {"kind": "coverage", "covers": covers, "item_weights": weights.tolist()}


def _gen_constraint_payload(rng, n, constraint) -> dict:
    if constraint == "cardinality":
        return {"kind": constraint, "k": int(rng.integers(1, max(2, n // 2) + 1))}
    if constraint == "partition-matroid":
        n_blocks = int(rng.integers(2, min(4, n) + 1))
        cuts = np.sort(rng.choice(np.arange(1, n), size=n_blocks - 1, replace=False))
        bounds = [0, *cuts.tolist(), n]
        blocks = [list(range(bounds[i], bounds[i + 1])) for i in range(n_blocks)]
        budgets = [int(rng.integers(1, len(b) + 1)) for b in blocks]
        return {"kind": constraint, "blocks": blocks, "budgets": budgets}
    costs = (0.5 + rng.random(n)).tolist()
    budget = float(rng.uniform(0.25, 0.6) * sum(costs))
    return {"kind": constraint, "costs": costs, "budget": budget}


def _monotone_exhaustive(f: SetFunction) -> bool:
    table = f.full_table()
    masks = np.arange(table.size, dtype=np.int64)
    for i in range(f.n):
        bi = 1 << i
        base = masks[(masks & bi) == 0]
        if np.min(table[base | bi] - table[base]) < -1e-12:
            return False
    return True


def gen(kind: str, n: int, constraint: str, seed: int) -> InstanceFile:
    """Deterministic random instance; identical arguments give identical
    documents, byte for byte."""
    if kind not in FUNCTION_KINDS:
        raise InstanceFormatError(f"unknown function kind {kind!r}")
    if constraint not in CONSTRAINT_KINDS:
        raise InstanceFormatError(f"unknown constraint kind {constraint!r}")
    if n < 2:
        raise InstanceFormatError("generated instances need n >= 2")
    rng = _rng_for(kind, n, constraint, seed)
    if kind == "directed-cut":
        fdesc = _gen_cut_payload(rng, n)
    elif kind == "coverage":
        fdesc = _gen_coverage_payload(rng, n)
    else:
        # nonnegative submodular by construction: coverage plus cut mixture
        cut = DirectedCut(n, _gen_cut_payload(rng, n)["arcs"])
        cov_desc = _gen_coverage_payload(rng, n)
        cov = Coverage(n, cov_desc["covers"], cov_desc["item_weights"])
        table = cut.full_table() + cov.full_table()
        fdesc = {"kind": "explicit-table", "values": table.tolist()}
    cdesc = _gen_constraint_payload(rng, n, constraint)
    inst = InstanceFile(n=n, function=fdesc, constraint=cdesc)
    meta = {"name": f"{kind}-{constraint}-n{n}-s{seed}", "seed": int(seed),
            "generator": f"{kind}/{constraint}"}
    if n <= 12:
        meta["monotone"] = _monotone_exhaustive(inst.build_function())
    inst.metadata = meta
    return inst


def desk_corpus(seed: int = 1) -> list[InstanceFile]:
    """The seeded benchmark corpus: both structural families, all three
    constraint kinds, n in [6, 12], 54 instances."""
    out = []
    idx = 0
    for n, reps in ((6, 2), (8, 2), (9, 1), (10, 2), (12, 2)):
        for kind in ("directed-cut", "coverage"):
            for constraint in CONSTRAINT_KINDS:
                for _ in range(reps):
                    out.append(gen(kind, n, constraint, _child_seed(seed, idx)))
                    idx += 1
    return out


def _child_seed(seed: int, idx: int) -> int:
    seq = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(idx,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def mini_corpus(seed: int = 1) -> list[InstanceFile]:
    """A small battery covering every (kind, constraint) cell, for fast
    verification runs."""
    out = []
    for i, kind in enumerate(FUNCTION_KINDS):
        for j, constraint in enumerate(CONSTRAINT_KINDS):
            out.append(gen(kind, 6, constraint, _child_seed(seed, 100 + i * 3 + j)))
    return out


# ---------------------------------------------------------------------------
# Results


@dataclass
class ResultRecord:
    """Everything one solver run produced.  Identical inputs give identical
    records except for wall_clock."""

    instance: str
    n: int
    constraint: str
    alpha: float
    delta: float
    theta_grid: list[float]
    seed: int
    mode: str
    best_value: float
    opt_value: float | None
    ratio: float | None
    theta_best: float | None
    branch_best: str
    per_theta: list[dict]
    diagnostics: list[dict]
    wall_clock: float

    def to_json(self) -> str:
        return canonical_json(self.__dict__)

    def csv_row(self) -> str:
        def fmt(x):
            return "" if x is None else (repr(x) if isinstance(x, float) else str(x))
        return ",".join([
            self.instance, str(self.n), self.constraint, fmt(self.alpha),
            fmt(self.delta), fmt(self.theta_best), fmt(self.best_value),
            fmt(self.opt_value), fmt(self.ratio)])


def run_instance(inst: InstanceFile, run: RunConfig | None = None,
                 seed: int = 0, compute_opt: bool = True) -> ResultRecord:
    """Solve one instance end to end, with the brute-force optimum and the
    bound diagnostics attached whenever the instance is small enough."""
    if run is None:
        run = RunConfig()
    f, C = inst.build()
    t0 = time.perf_counter()
    opt_value = None
    if compute_opt and f.n <= BRUTE_FORCE_LIMIT:
        _, opt_value = brute_force_opt(f, C)
    report = solve(f, C, run, opt_value=opt_value)
    elapsed = time.perf_counter() - t0
    ratio = None
    if opt_value is not None and opt_value > 0:
        ratio = report.best_value / opt_value
    cfg = run.resolve_cfg(f)
    return ResultRecord(
        instance=inst.name,
        n=inst.n,
        constraint=C.describe(),
        alpha=run.alpha,
        delta=run.delta,
        theta_grid=list(run.theta_grid),
        seed=seed,
        mode=cfg.mode,
        best_value=report.best_value,
        opt_value=opt_value,
        ratio=ratio,
        theta_best=report.best_theta,
        branch_best=report.best_branch,
        per_theta=[{"theta": r.theta, "y1_value": r.y1_value,
                    "z_value": r.z_value} for r in report.per_theta],
        diagnostics=[{"name": d.name, "theta": d.theta, "passed": d.passed,
                      "passed_strict": d.passed_strict}
                     for d in report.diagnostics],
        wall_clock=elapsed,
    )
