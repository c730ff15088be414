"""Remainder-form decomposition machinery.

Builds per-row supporting-vector candidates from Clarke-derivative bounds,
maps each candidate to its corner-point pair, and evaluates three
decomposition-based enclosures:

* the full candidate-minimization form (tightest tractable remainder form),
* the single-candidate sign-selection form (cheaper, always looser or equal),
* direct vertex/corner optimization, exact when every derivative bound is
  sign-stable over the box.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .errors import (
    CandidateExplosion,
    MissingDiagonalValue,
    NotSignStable,
    UnboundedBothSides,
)
from .expr import ClarkeInterval, Expr, JacobianBounds, eval_point
from .interval import Box, Interval, saturate


class Branch(Enum):
    UPPER = "upper"
    LOWER = "lower"
    DIAGONAL = "diagonal"


class TimeSemantics(Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


# diagonal_policy(row_index, is_upper_row) -> diagonal value for coordinate i
DiagonalPolicy = Callable[[int, bool], float]

CANDIDATE_CAP = 2**16


@dataclass(frozen=True)
class SupportingVector:
    """Slope vector selecting a linear remainder and a corner assignment."""

    m: tuple[float, ...]
    branches: tuple[Branch, ...]

    def __post_init__(self):
        if any(not math.isfinite(v) for v in self.m):
            raise UnboundedBothSides(f"non-finite supporting vector {self.m}")


@dataclass(frozen=True)
class DecompEval:
    """Everything needed to evaluate one output row's decomposition."""

    i: int
    jac_row: tuple[ClarkeInterval, ...]
    candidates: tuple[SupportingVector, ...]
    semantics: TimeSemantics


def _coordinate_choices(
    entry: ClarkeInterval,
) -> list[tuple[float, Branch]]:
    """Finite branch values for one coordinate, deduplicated by value."""
    choices: list[tuple[float, Branch]] = []
    if math.isfinite(entry.hi):
        choices.append((max(entry.hi, 0.0), Branch.UPPER))
    if math.isfinite(entry.lo):
        lower = min(entry.lo, 0.0)
        if not (choices and choices[0][0] == lower):
            choices.append((lower, Branch.LOWER))
    if not choices:
        raise UnboundedBothSides(f"derivative bound {entry} has no finite side")
    return choices


def supporting_vectors(
    jac_row: Sequence[ClarkeInterval],
    semantics: TimeSemantics,
    i: int,
    cap: int = CANDIDATE_CAP,
) -> tuple[SupportingVector, ...]:
    """Cartesian product of per-coordinate branch choices for row i."""
    per_coord: list[list[tuple[float, Branch]]] = []
    count = 1
    for j, entry in enumerate(jac_row):
        if semantics is TimeSemantics.CONTINUOUS and j == i:
            per_coord.append([(0.0, Branch.DIAGONAL)])
        else:
            per_coord.append(_coordinate_choices(entry))
        count *= len(per_coord[-1])
        if count > cap:
            raise CandidateExplosion(
                f"row {i}: {count}+ supporting-vector candidates exceed cap {cap}"
            )
    out = []
    for combo in itertools.product(*per_coord):
        out.append(
            SupportingVector(
                m=tuple(v for v, _ in combo),
                branches=tuple(tag for _, tag in combo),
            )
        )
    return tuple(out)


def corner_points(
    m: SupportingVector,
    a: Sequence[float],
    b: Sequence[float],
    semantics: TimeSemantics,
    i: int,
    diagonal_value: float | None = None,
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Corner pair (zeta_plus, zeta_minus) for one candidate.

    a/b are the two evaluation arguments (a >= b componentwise when the
    caller wants the upper bound).
    """
    if semantics is TimeSemantics.CONTINUOUS and diagonal_value is None:
        raise MissingDiagonalValue(f"continuous row {i} needs a diagonal value")
    zp, zm = [], []
    for j, tag in enumerate(m.branches):
        if tag is Branch.DIAGONAL:
            zp.append(diagonal_value)
            zm.append(diagonal_value)
        elif tag is Branch.UPPER:
            zp.append(b[j])
            zm.append(a[j])
        else:
            zp.append(a[j])
            zm.append(b[j])
    return tuple(zp), tuple(zm)


def _dot_diff(m: Sequence[float], u: Sequence[float], v: Sequence[float]) -> float:
    return math.fsum(mj * (uj - vj) for mj, uj, vj in zip(m, u, v))


def _zero_candidate(
    candidates: Sequence[SupportingVector],
) -> SupportingVector | None:
    for cand in candidates:
        if all(v == 0.0 for v in cand.m):
            return cand
    return None


def eval_remainder_upper(
    d: DecompEval,
    f_i: Expr,
    a: Sequence[float],
    b: Sequence[float],
    diagonal_value: float | None = None,
) -> float:
    """min over candidates of f_i(zeta_plus) + m . (zeta_minus - zeta_plus)."""
    # an all-zero slope vector exists only when every coordinate is
    # sign-stable; its corner value is then the exact extremum, so no other
    # candidate can be mathematically smaller (only spuriously, by rounding)
    zero = _zero_candidate(d.candidates)
    if zero is not None:
        zp, _ = corner_points(zero, a, b, d.semantics, d.i, diagonal_value)
        val = eval_point(f_i, zp)
        if not math.isnan(val):
            return val
    best = math.inf
    for cand in d.candidates:
        zp, zm = corner_points(cand, a, b, d.semantics, d.i, diagonal_value)
        val = eval_point(f_i, zp) + _dot_diff(cand.m, zm, zp)
        if val < best:
            best = val
    return best


def eval_remainder_lower(
    d: DecompEval,
    f_i: Expr,
    a: Sequence[float],
    b: Sequence[float],
    diagonal_value: float | None = None,
) -> float:
    """max over candidates of f_i(zeta_minus) + m . (zeta_plus - zeta_minus)."""
    zero = _zero_candidate(d.candidates)
    if zero is not None:
        _, zm = corner_points(zero, a, b, d.semantics, d.i, diagonal_value)
        val = eval_point(f_i, zm)
        if not math.isnan(val):
            return val
    best = -math.inf
    for cand in d.candidates:
        zp, zm = corner_points(cand, a, b, d.semantics, d.i, diagonal_value)
        val = eval_point(f_i, zm) + _dot_diff(cand.m, zp, zm)
        if val > best:
            best = val
    return best


def _default_policy(box: Box) -> DiagonalPolicy:
    return lambda i, is_upper: box.hi[i] if is_upper else box.lo[i]


def t_r_inclusion(
    f: Sequence[Expr],
    jac: JacobianBounds,
    box: Box,
    semantics: TimeSemantics = TimeSemantics.DISCRETE,
    diagonal_policy: DiagonalPolicy | None = None,
    cap: int = CANDIDATE_CAP,
) -> Box:
    """Full candidate-minimization decomposition enclosure over box."""
    if diagonal_policy is None:
        diagonal_policy = _default_policy(box)
    a, b = box.hi, box.lo
    dims = []
    for i, f_i in enumerate(f):
        d = DecompEval(
            i=i,
            jac_row=jac.row(i),
            candidates=supporting_vectors(jac.row(i), semantics, i, cap),
            semantics=semantics,
        )
        up_diag = diagonal_policy(i, True) if semantics is TimeSemantics.CONTINUOUS else None
        lo_diag = diagonal_policy(i, False) if semantics is TimeSemantics.CONTINUOUS else None
        upper = saturate(eval_remainder_upper(d, f_i, a, b, up_diag), upper=True)
        lower = saturate(eval_remainder_lower(d, f_i, a, b, lo_diag), upper=False)
        dims.append(Interval(min(lower, upper), max(lower, upper)))
    return Box(dims)


def _sign_selected_vector(
    jac_row: Sequence[ClarkeInterval],
    semantics: TimeSemantics,
    i: int,
) -> SupportingVector:
    """The single smallest-magnitude branch choice per coordinate."""
    values, tags = [], []
    for j, entry in enumerate(jac_row):
        if semantics is TimeSemantics.CONTINUOUS and j == i:
            values.append(0.0)
            tags.append(Branch.DIAGONAL)
            continue
        lower = min(entry.lo, 0.0)  # -inf when unbounded below
        upper = max(entry.hi, 0.0)  # +inf when unbounded above
        if abs(lower) <= abs(upper):
            if not math.isfinite(lower):
                raise UnboundedBothSides(f"derivative bound {entry} has no finite side")
            values.append(lower)
            tags.append(Branch.LOWER)
        else:
            values.append(upper)
            tags.append(Branch.UPPER)
    return SupportingVector(tuple(values), tuple(tags))


def t_l_inclusion(
    f: Sequence[Expr],
    jac: JacobianBounds,
    box: Box,
    semantics: TimeSemantics = TimeSemantics.DISCRETE,
    diagonal_policy: DiagonalPolicy | None = None,
) -> Box:
    """Single-candidate sign-selection enclosure (member of the full family)."""
    if diagonal_policy is None:
        diagonal_policy = _default_policy(box)
    a, b = box.hi, box.lo
    dims = []
    for i, f_i in enumerate(f):
        cand = _sign_selected_vector(jac.row(i), semantics, i)
        d = DecompEval(i=i, jac_row=jac.row(i), candidates=(cand,), semantics=semantics)
        up_diag = diagonal_policy(i, True) if semantics is TimeSemantics.CONTINUOUS else None
        lo_diag = diagonal_policy(i, False) if semantics is TimeSemantics.CONTINUOUS else None
        upper = saturate(eval_remainder_upper(d, f_i, a, b, up_diag), upper=True)
        lower = saturate(eval_remainder_lower(d, f_i, a, b, lo_diag), upper=False)
        dims.append(Interval(min(lower, upper), max(lower, upper)))
    return Box(dims)


def t_o_vertex_inclusion(
    f: Sequence[Expr],
    jac: JacobianBounds,
    box: Box,
    semantics: TimeSemantics = TimeSemantics.DISCRETE,
    diagonal_policy: DiagonalPolicy | None = None,
) -> Box:
    """Tight corner enclosure; requires every derivative bound sign-stable.

    Sign stability makes each component monotone per coordinate, so the
    vertex optimum is attained at a single directly-selected corner.
    """
    if diagonal_policy is None:
        diagonal_policy = _default_policy(box)
    bad = [
        (i, j)
        for i in range(jac.rows)
        for j, entry in enumerate(jac.row(i))
        if entry.lo < 0.0 < entry.hi
    ]
    if bad:
        raise NotSignStable(bad)
    a, b = box.hi, box.lo
    dims = []
    for i, f_i in enumerate(f):
        up_corner, lo_corner = [], []
        for j, entry in enumerate(jac.row(i)):
            if semantics is TimeSemantics.CONTINUOUS and j == i:
                up_corner.append(diagonal_policy(i, True))
                lo_corner.append(diagonal_policy(i, False))
            elif entry.lo >= 0.0:
                up_corner.append(a[j])
                lo_corner.append(b[j])
            else:
                up_corner.append(b[j])
                lo_corner.append(a[j])
        upper = saturate(eval_point(f_i, tuple(up_corner)), upper=True)
        lower = saturate(eval_point(f_i, tuple(lo_corner)), upper=False)
        dims.append(Interval(min(lower, upper), max(lower, upper)))
    return Box(dims)
