"""Conditional expectation on finite measure spaces.

Everything here is exact finite linear algebra: a finite atom list
carries the probabilities, a partition of the atoms plays the role of
the sub-sigma-algebra, and conditional expectation is the block average.
The averaging identity (same integral over every block) is then
machine-checkable, and the L1 construction through truncation at
increasing levels stabilizes after finitely many steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "FiniteMeasureSpace",
    "RandomVariable",
    "ConditionedRV",
    "L1LadderResult",
    "Partition",
    "ConjugateExponents",
    "cond_expectation",
    "cond_expectation_l1",
    "verify_duality",
    "DualityReport",
    "holder_bound_check",
    "HolderReport",
]

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class FiniteMeasureSpace:
    """Finite probability space: labelled atoms with nonnegative masses summing to 1."""

    atoms: tuple[tuple[str, float], ...]

    def __post_init__(self):
        atoms = tuple((str(lab), float(p)) for lab, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("need at least one atom")
        labels = [lab for lab, _ in atoms]
        if len(set(labels)) != len(labels):
            raise ValueError("atom labels must be unique")
        probs = np.array([p for _, p in atoms])
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(probs.sum() - 1.0) > _MASS_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")

    @classmethod
    def uniform(cls, n: int) -> "FiniteMeasureSpace":
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        return cls(tuple((str(k + 1), 1.0 / n) for k in range(n)))

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.atoms)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])


@dataclass(frozen=True)
class RandomVariable:
    """Real values aligned with the atoms of a FiniteMeasureSpace."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not all(np.isfinite(vals)):
            raise ValueError("values must all be finite")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ConditionedRV(RandomVariable):
    """Block-constant conditional expectation; zero-mass blocks hold 0 and are flagged."""

    zero_mass_blocks: tuple[int, ...] = ()


@dataclass(frozen=True)
class L1LadderResult(ConditionedRV):
    """Outcome of the truncation ladder, with per-level history.

    ``ladder`` holds (j, positive-part values, negative-part values) per
    level; ``converged`` records whether truncation became inactive
    (min(X+-, j) = X+-) before j_max, after which the result is exact.
    """

    converged: bool = True
    j_reached: int = 0
    ladder: tuple = ()


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks of atom indices; stands in for a sub-sigma-algebra."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise ValueError("blocks must be nonempty")
        flat = [i for b in blocks for i in b]
        if len(set(flat)) != len(flat):
            raise ValueError("blocks must be pairwise disjoint")
        if min(flat) < 0:
            raise ValueError("negative atom index")

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple((k,) for k in range(n)))

    @classmethod
    def from_spec(cls, spec: str, labels: Sequence[str]) -> "Partition":
        """Parse "a,b|c,d" into blocks of the given atom labels."""
        index = {str(lab): k for k, lab in enumerate(labels)}
        blocks = []
        for chunk in spec.split("|"):
            names = [s.strip() for s in chunk.split(",") if s.strip()]
            if not names:
                raise ValueError(f"empty block in partition spec {spec!r}")
            missing = [s for s in names if s not in index]
            if missing:
                raise ValueError(f"unknown atom label(s) {missing} in {spec!r}")
            blocks.append(tuple(index[s] for s in names))
        part = cls(tuple(blocks))
        covered = {i for b in part.blocks for i in b}
        if covered != set(range(len(labels))):
            left_out = sorted(set(range(len(labels))) - covered)
            raise ValueError(
                f"partition spec {spec!r} does not cover atoms {left_out}"
            )
        return part

    def covers(self, n: int) -> bool:
        return {i for b in self.blocks for i in b} == set(range(n))


@dataclass(frozen=True)
class ConjugateExponents:
    """Exponent pair with 1/p + 1/q = 1; q is derived from p when omitted."""

    p: float
    q: float = None  # type: ignore[assignment]

    def __post_init__(self):
        p = float(self.p)
        if not (1.0 < p < np.inf):
            raise ValueError(f"p must lie in (1, inf), got {p}")
        q = p / (p - 1.0) if self.q is None else float(self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
            raise ValueError(f"1/p + 1/q = {1.0/p + 1.0/q!r}, not 1")


def _check_alignment(X: RandomVariable, G: Partition, space: FiniteMeasureSpace):
    if len(X) != space.n:
        raise ValueError(f"variable has {len(X)} values for {space.n} atoms")
    if not G.covers(space.n):
        raise ValueError("partition does not cover the atom indices of the space")


def cond_expectation(
    X: RandomVariable, G: Partition, space: FiniteMeasureSpace
) -> ConditionedRV:
    """Block-average conditional expectation.

    On each positive-mass block the value is (sum of X*p) / (sum of p),
    which makes the defining identity (equal integrals of X and the
    result over every block) hold to rounding. Zero-mass blocks get the
    value 0 and are reported in ``zero_mass_blocks``; any block-constant
    choice there would do, since those atoms carry no mass.
    """
    _check_alignment(X, G, space)
    p = space.probabilities
    xv = X.array
    xi = np.zeros(space.n)
    flagged = []
    for bi, block in enumerate(G.blocks):
        idx = list(block)
        mass = float(p[idx].sum())
        if mass == 0.0:
            flagged.append(bi)
        else:
            xi[idx] = float(np.dot(xv[idx], p[idx])) / mass
    return ConditionedRV(values=tuple(xi), zero_mass_blocks=tuple(flagged))


def cond_expectation_l1(
    X: RandomVariable, G: Partition, space: FiniteMeasureSpace, j_max: int = 64
) -> L1LadderResult:
    """Conditional expectation via the truncation ladder min(X, j).

    Splits X into positive and negative parts, truncates both at level j,
    and conditions the difference; levels double up to j_max. On a finite
    space the ladder stabilizes exactly once j bounds both parts, at
    which point min(X+-, j) = X+- bitwise and the result coincides with
    cond_expectation(X) exactly; if j_max is too small the last ladder
    state is returned with ``converged=False``.
    """
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    _check_alignment(X, G, space)
    xv = X.array
    x_plus = np.maximum(xv, 0.0)
    x_minus = np.maximum(-xv, 0.0)

    levels = [1]
    while levels[-1] * 2 <= j_max:
        levels.append(levels[-1] * 2)
    if levels[-1] != j_max:
        levels.append(j_max)

    history = []
    result = None
    converged = False
    j_reached = levels[-1]
    for j in levels:
        tp = np.minimum(x_plus, float(j))
        tm = np.minimum(x_minus, float(j))
        xi_p = cond_expectation(RandomVariable(tuple(tp)), G, space)
        xi_m = cond_expectation(RandomVariable(tuple(tm)), G, space)
        result = cond_expectation(RandomVariable(tuple(tp - tm)), G, space)
        history.append((j, xi_p.values, xi_m.values))
        if np.all(x_plus <= j) and np.all(x_minus <= j):
            converged = True
            j_reached = j
            break
    return L1LadderResult(
        values=result.values,
        zero_mass_blocks=result.zero_mass_blocks,
        converged=converged,
        j_reached=j_reached,
        ladder=tuple(history),
    )


@dataclass(frozen=True)
class DualityReport:
    """Per-block residuals of the averaging identity."""

    residuals: tuple[float, ...]
    tol: float
    passed: bool


def verify_duality(
    X: RandomVariable,
    xi: RandomVariable,
    G: Partition,
    space: FiniteMeasureSpace,
    tol: float = 1e-14,
) -> DualityReport:
    """Check that X and xi integrate identically over every block."""
    _check_alignment(X, G, space)
    if len(xi) != space.n:
        raise ValueError(f"candidate has {len(xi)} values for {space.n} atoms")
    p = space.probabilities
    xv, cv = X.array, xi.array
    residuals = []
    for block in G.blocks:
        idx = list(block)
        residuals.append(abs(float(np.dot(xv[idx], p[idx])) - float(np.dot(cv[idx], p[idx]))))
    return DualityReport(
        residuals=tuple(residuals), tol=tol, passed=all(r < tol for r in residuals)
    )


@dataclass(frozen=True)
class HolderReport:
    """Both sides of |E(XY)| <= ||X||_p * ||Y||_q on the finite space."""

    lhs: float
    rhs: float
    p: float
    q: float
    passed: bool


def holder_bound_check(
    X: RandomVariable,
    Y: RandomVariable,
    exps: ConjugateExponents,
    space: FiniteMeasureSpace,
) -> HolderReport:
    """Evaluate both sides of the pairing bound and compare."""
    if len(X) != space.n or len(Y) != space.n:
        raise ValueError("X and Y must align with the atoms of the space")
    p = space.probabilities
    lhs = abs(float(np.dot(X.array * Y.array, p)))
    norm_x = float(np.dot(np.abs(X.array) ** exps.p, p)) ** (1.0 / exps.p)
    norm_y = float(np.dot(np.abs(Y.array) ** exps.q, p)) ** (1.0 / exps.q)
    rhs = norm_x * norm_y
    return HolderReport(
        lhs=lhs, rhs=rhs, p=exps.p, q=exps.q, passed=lhs <= rhs + 1e-12
    )
