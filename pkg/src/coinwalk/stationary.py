"""Stationary states for rectangular marked blocks on the torus.

Builders for the domino (1x2) state, the layer-peeling construction for
general even-area blocks, and domino-tiling superpositions, plus the three
stationarity conditions and the split of the uniform start state into a
frozen part and a moving remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import Direction, GridState, MarkedSet, uniform_state
from .grid import _shift_into

__all__ = [
    "BlockSpec",
    "Decomposition",
    "DominoPlacement",
    "InvalidTilingError",
    "OddOddBlockError",
    "StationaryCandidate",
    "build_block_layered",
    "build_block_tiling",
    "build_domino_state",
    "check_conditions",
    "decompose_initial",
]

# A domino is its anchor cell plus the right neighbor (horizontal) or the
# down neighbor (vertical).
DominoPlacement = tuple[tuple[int, int], bool]


class OddOddBlockError(ValueError):
    """No stationary construction exists for an odd-by-odd marked block."""


class InvalidTilingError(ValueError):
    """Domino placements overlap or fail to cover the block exactly."""


@dataclass(frozen=True)
class BlockSpec:
    """Rectangular block of marked cells: origin (x, y), width along x, height along y."""

    origin: tuple[int, int]
    width: int
    height: int

    def cells(self, n: int) -> list[tuple[int, int]]:
        ox, oy = self.origin
        return [
            ((ox + i) % n, (oy + j) % n)
            for i in range(self.width)
            for j in range(self.height)
        ]

    def marked_set(self, n: int) -> MarkedSet:
        return MarkedSet.from_block(n, self.origin, self.width, self.height)


@dataclass
class StationaryCandidate:
    """A state built to be step-invariant, with its marked set and unmarked baseline."""

    state: GridState
    marked: MarkedSet
    baseline: float


@dataclass
class Decomposition:
    """Split of the uniform start state: psi0 = stationary + delta."""

    stationary: GridState
    delta: GridState
    delta_norm_sq: float


def _default_baseline(n: int) -> float:
    return 1.0 / math.sqrt(4.0 * n * n)


def _check_baseline(a: float) -> float:
    a = float(a)
    if a == 0.0:
        raise ValueError("baseline amplitude a must be nonzero")
    return a


def build_domino_state(
    n: int,
    cell: tuple[int, int],
    horizontal: bool = True,
    a: float | None = None,
) -> StationaryCandidate:
    """Stationary state for a 1x2 marked pair.

    Every amplitude equals ``a`` except the two amplitudes of the pair that
    point at each other, which equal ``-3 a``. Defaults ``a`` to the uniform
    amplitude 1/sqrt(4N).
    """
    if n < 2:
        raise ValueError(f"grid side must be at least 2, got {n}")
    a = _check_baseline(_default_baseline(n) if a is None else a)
    x, y = cell
    if horizontal:
        marked = MarkedSet.from_block(n, (x, y), 2, 1)
    else:
        marked = MarkedSet.from_block(n, (x, y), 1, 2)
    amp = np.full((n, n, 4), a, dtype=float)
    _place_domino(amp, n, (x, y), horizontal, a)
    return StationaryCandidate(GridState(n, amp), marked, a)


def _place_domino(
    amp: np.ndarray, n: int, cell: tuple[int, int], horizontal: bool, a: float
) -> None:
    """Write the -3a facing pair of one domino into ``amp``."""
    x, y = cell[0] % n, cell[1] % n
    if horizontal:
        amp[x, y, Direction.RIGHT] = -3.0 * a
        amp[(x + 1) % n, y, Direction.LEFT] = -3.0 * a
    else:
        amp[x, y, Direction.DOWN] = -3.0 * a
        amp[x, (y + 1) % n, Direction.UP] = -3.0 * a


def _ring_cycle(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Perimeter cells of [x0..x1] x [y0..y1], clockwise from (x0, y0).

    Requires both sides >= 2; every perimeter cell appears exactly once and
    consecutive cells (cyclically) are grid neighbors.
    """
    top = [(i, y0) for i in range(x0, x1 + 1)]
    right = [(x1, j) for j in range(y0 + 1, y1 + 1)]
    bottom = [(i, y1) for i in range(x1 - 1, x0 - 1, -1)]
    left = [(x0, j) for j in range(y1 - 1, y0, -1)]
    return top + right + bottom + left


_STEP_DIR = {
    (1, 0): Direction.RIGHT,
    (-1, 0): Direction.LEFT,
    (0, 1): Direction.DOWN,
    (0, -1): Direction.UP,
}


def build_block_layered(
    n: int, block: BlockSpec, a: float | None = None
) -> StationaryCandidate:
    """Stationary state for an m x l block via perimeter-layer peeling.

    Each layer is a rectangular ring: every ring cell points at its two
    ring-cycle neighbors with -a and keeps +a on its other two directions.
    A leftover 1 x even strip is filled with dominoes. Raises
    :class:`OddOddBlockError` when both sides are odd, for which no such
    state exists.
    """
    a = _check_baseline(_default_baseline(n) if a is None else a)
    m, l = block.width, block.height
    if m % 2 == 1 and l % 2 == 1:
        raise OddOddBlockError(
            f"no stationary construction for an odd-by-odd block ({m}x{l})"
        )
    marked = block.marked_set(n)
    ox, oy = block.origin
    amp = np.full((n, n, 4), a, dtype=float)

    def assign(i: int, j: int, d: Direction, value: float) -> None:
        amp[(ox + i) % n, (oy + j) % n, d] = value

    x0, y0, x1, y1 = 0, 0, m - 1, l - 1
    while x1 - x0 >= 1 and y1 - y0 >= 1:
        ring = _ring_cycle(x0, y0, x1, y1)
        for p, (i, j) in enumerate(ring):
            for ni, nj in (ring[p - 1], ring[(p + 1) % len(ring)]):
                d = _STEP_DIR[(ni - i, nj - j)]
                assign(i, j, d, -a)
        x0 += 1
        y0 += 1
        x1 -= 1
        y1 -= 1

    rm, rl = x1 - x0 + 1, y1 - y0 + 1  # remaining strip, at most 1 cell wide
    if rm >= 1 and rl >= 1:
        if rm == 1 and rl == 1:
            raise AssertionError("odd-by-odd remainder should have been rejected")
        if rm == 1:
            for s in range(rl // 2):
                _place_domino(amp, n, ((ox + x0) % n, (oy + y0 + 2 * s) % n), False, a)
        else:
            for s in range(rm // 2):
                _place_domino(amp, n, ((ox + x0 + 2 * s) % n, (oy + y0) % n), True, a)

    return StationaryCandidate(GridState(n, amp), marked, a)


def build_block_tiling(
    n: int,
    block: BlockSpec,
    a: float | None = None,
    tiling: Sequence[DominoPlacement] = (),
) -> StationaryCandidate:
    """Stationary state from an explicit domino tiling of the block.

    Every amplitude is ``a`` except each domino's facing pair at ``-3 a``.
    The placements must cover the block's cells exactly once.
    """
    a = _check_baseline(_default_baseline(n) if a is None else a)
    marked = block.marked_set(n)
    covered: set[tuple[int, int]] = set()
    for (x, y), horizontal in tiling:
        c1 = (x % n, y % n)
        c2 = ((x + 1) % n, y % n) if horizontal else (x % n, (y + 1) % n)
        for c in (c1, c2):
            if c not in marked.cells:
                raise InvalidTilingError(f"domino cell {c} lies outside the block")
            if c in covered:
                raise InvalidTilingError(f"domino placements overlap at {c}")
            covered.add(c)
    if covered != marked.cells:
        missing = sorted(marked.cells - covered)
        raise InvalidTilingError(f"tiling leaves {len(missing)} block cells uncovered")

    amp = np.full((n, n, 4), a, dtype=float)
    for cell, horizontal in tiling:
        _place_domino(amp, n, cell, horizontal, a)
    return StationaryCandidate(GridState(n, amp), marked, a)


def check_conditions(
    candidate: StationaryCandidate, tol: float = 1e-12
) -> tuple[bool, bool, bool]:
    """Evaluate the three stationarity conditions.

    1. all unmarked directional amplitudes are equal,
    2. the four amplitudes of each marked cell sum to zero,
    3. amplitudes of adjacent cells pointing at each other are equal
       (equivalently, the state is shift-invariant).

    A state satisfying all three is unchanged by a Grover-coin step.
    """
    amp = candidate.state.amp
    marked = candidate.marked

    unmarked = amp[~marked.mask]
    cond1 = unmarked.size == 0 or bool(
        np.max(np.abs(unmarked - unmarked.mean())) <= tol
    )

    if len(marked):
        sums = amp[marked.xs, marked.ys].sum(axis=1)
        cond2 = bool(np.max(np.abs(sums)) <= tol)
    else:
        cond2 = True

    shifted = np.empty_like(amp)
    _shift_into(amp, shifted)
    cond3 = bool(np.max(np.abs(shifted - amp)) <= tol)

    return cond1, cond2, cond3


def decompose_initial(n: int, candidate: StationaryCandidate) -> Decomposition:
    """Split psi0 into the candidate's stationary part plus a moving remainder.

    Requires the candidate's baseline to equal the uniform amplitude
    1/sqrt(4N) so that the remainder is supported on marked cells only.
    """
    a0 = _default_baseline(n)
    if not math.isclose(candidate.baseline, a0, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(
            f"candidate baseline {candidate.baseline!r} does not match the "
            f"uniform amplitude 1/sqrt(4N) = {a0!r}"
        )
    if candidate.state.n != n:
        raise ValueError(f"candidate grid side {candidate.state.n} differs from {n}")
    delta = uniform_state(n).amp - candidate.state.amp
    norm_sq = float(np.sum(delta * delta))
    return Decomposition(candidate.state.copy(), GridState(n, delta), norm_sq)
