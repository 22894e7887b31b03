"""Verification and bounded search for shift-equivalence witnesses over the
nonnegative integers.

A lag-n witness is a pair of rectangular matrices (R, S) with
A^n = RS, B^n = SR, AR = RB, and BS = SA.  The elementary strong version
drops the lag: A = RS and B = SR.  Searches are exhaustive within explicit
entry bounds; a miss is reported as absence (unknown within bounds), never
as a proof of non-equivalence.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .graphs import GraphError, NonNegMatrix


@dataclass(frozen=True)
class SEWitness:
    R: NonNegMatrix
    S: NonNegMatrix
    lag: int

    def __post_init__(self):
        if self.lag < 1:
            raise GraphError("witness lag must be a positive integer")


@dataclass(frozen=True)
class SSEStep:
    """One elementary step: A = R·S, with the successor matrix S·R."""

    A: NonNegMatrix
    R: NonNegMatrix
    S: NonNegMatrix


def _require_square(a: NonNegMatrix, label: str):
    if not a.is_square:
        raise GraphError(f"matrix {label} must be square")


def verify_se(a: NonNegMatrix, b: NonNegMatrix, w: SEWitness) -> bool:
    """True iff A^n = RS, B^n = SR, AR = RB, and BS = SA hold exactly."""
    _require_square(a, "A")
    _require_square(b, "B")
    if w.R.rows != a.rows or w.R.cols != b.rows:
        raise GraphError("witness R has incompatible index sets")
    if w.S.rows != b.rows or w.S.cols != a.rows:
        raise GraphError("witness S has incompatible index sets")
    return (
        a.matrix_power(w.lag) == w.R @ w.S
        and b.matrix_power(w.lag) == w.S @ w.R
        and a @ w.R == w.R @ b
        and b @ w.S == w.S @ a
    )


def verify_elementary_sse(a: NonNegMatrix, b: NonNegMatrix, r: NonNegMatrix, s: NonNegMatrix) -> bool:
    """True iff A = RS and B = SR hold exactly."""
    if r.rows != a.rows or s.cols != a.cols:
        raise GraphError("R/S have index sets incompatible with A")
    if r.cols != b.rows or s.rows != b.rows:
        raise GraphError("R/S have index sets incompatible with B")
    return a == r @ s and b == s @ r


def _same_entries(x: NonNegMatrix, y: NonNegMatrix) -> bool:
    """Entrywise equality; index labels are bookkeeping and may differ."""
    return x.entries == y.entries


def verify_sse_chain(a: NonNegMatrix, b: NonNegMatrix, steps: tuple[SSEStep, ...]) -> bool:
    """True iff the steps form an elementary chain from A to B."""
    if not steps:
        return _same_entries(a, b)
    current = a
    for step in steps:
        if not _same_entries(step.A, current):
            return False
        if not _same_entries(step.R @ step.S, current):
            return False
        current = step.S @ step.R
    return _same_entries(current, b)


def _matrices(rows: tuple[str, ...], cols: tuple[str, ...], max_entry: int):
    """All matrices over the given index sets with entries in [0, max_entry],
    in lexicographic order of the row-major flattening."""
    nr, nc = len(rows), len(cols)
    for flat in itertools.product(range(max_entry + 1), repeat=nr * nc):
        yield NonNegMatrix(rows, cols, tuple(flat[i * nc : (i + 1) * nc] for i in range(nr)))


def _matrix_at(rows, cols, max_entry: int, index: int) -> NonNegMatrix:
    nr, nc = len(rows), len(cols)
    base = max_entry + 1
    flat = []
    for _ in range(nr * nc):
        flat.append(index % base)
        index //= base
    flat.reverse()
    return NonNegMatrix(rows, cols, tuple(tuple(flat[i * nc : (i + 1) * nc]) for i in range(nr)))


def _flat(m: NonNegMatrix) -> tuple[int, ...]:
    return tuple(x for row in m.entries for x in row)


def _search_lag(a, b, an, bn, max_entry: int, r_indices) -> tuple | None:
    """Scan the given R candidate indices in order; return the smallest hit
    (flat R, flat S, R, S) or None.  Candidates are scanned in index order,
    so the first hit is minimal within the slice."""
    for idx in r_indices:
        r = _matrix_at(a.rows, b.rows, max_entry, idx)
        if a @ r != r @ b:
            continue
        for s in _matrices(b.rows, a.rows, max_entry):
            if b @ s != s @ a:
                continue
            if r @ s == an and s @ r == bn:
                return (_flat(r), _flat(s), r, s)
    return None


def search_se(
    a: NonNegMatrix,
    b: NonNegMatrix,
    max_lag: int,
    max_entry: int,
    threads: int = 1,
) -> SEWitness | None:
    """Exhaustive bounded search for the lexicographically smallest witness,
    ordered by (lag, flattened R, flattened S).

    The candidate space may be partitioned across threads; the result is
    identical to serial execution.
    """
    _require_square(a, "A")
    _require_square(b, "B")
    n_r = (max_entry + 1) ** (len(a.rows) * len(b.rows))
    for lag in range(1, max_lag + 1):
        an = a.matrix_power(lag)
        bn = b.matrix_power(lag)
        if threads <= 1:
            hit = _search_lag(a, b, an, bn, max_entry, range(n_r))
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_search_lag, a, b, an, bn, max_entry, range(t, n_r, threads))
                    for t in range(threads)
                ]
                hits = [f.result() for f in futures]
            hits = [h for h in hits if h is not None]
            hit = min(hits) if hits else None
        if hit is not None:
            return SEWitness(hit[2], hit[3], lag)
    return None


def _search_elementary(a, b, max_entry: int, r_indices) -> tuple | None:
    for idx in r_indices:
        r = _matrix_at(a.rows, b.rows, max_entry, idx)
        for s in _matrices(b.rows, a.rows, max_entry):
            if r @ s == a and s @ r == b:
                return (_flat(r), _flat(s), r, s)
    return None


def search_elementary_sse(
    a: NonNegMatrix,
    b: NonNegMatrix,
    max_inner_dim: int,
    max_entry: int,
    threads: int = 1,
) -> tuple[NonNegMatrix, NonNegMatrix] | None:
    """Bounded search for R, S with A = RS and B = SR, smallest by
    (flattened R, flattened S).

    The factorization forces R and S to be |A|x|B| and |B|x|A|, so the
    inner dimension equals the order of B; when that exceeds
    ``max_inner_dim`` the search reports absence (outside bounds).
    """
    _require_square(a, "A")
    _require_square(b, "B")
    if len(b.rows) > max_inner_dim:
        return None
    n_r = (max_entry + 1) ** (len(a.rows) * len(b.rows))
    if threads <= 1:
        hit = _search_elementary(a, b, max_entry, range(n_r))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_search_elementary, a, b, max_entry, range(t, n_r, threads))
                for t in range(threads)
            ]
            hits = [f.result() for f in futures]
        hits = [h for h in hits if h is not None]
        hit = min(hits) if hits else None
    if hit is None:
        return None
    return hit[2], hit[3]


def search_sse_chain(
    a: NonNegMatrix,
    b: NonNegMatrix,
    max_inner_dim: int,
    max_entry: int,
    depth: int = 1,
) -> tuple[SSEStep, ...] | None:
    """Depth-first bounded search for an elementary chain of at most
    ``depth`` steps from A to B.  Intermediate square matrices range over
    dimensions 1..max_inner_dim.  Deterministic: direct steps are tried
    before longer chains, intermediates in dimension-then-entry order.
    """
    _require_square(a, "A")
    _require_square(b, "B")
    if depth < 1:
        raise GraphError("chain search depth must be >= 1")
    direct = search_elementary_sse(a, b, max_inner_dim, max_entry)
    if direct is not None:
        return (SSEStep(a, direct[0], direct[1]),)
    if depth == 1:
        return None
    for d in range(1, max_inner_dim + 1):
        mid_labels = tuple(f"m{i}" for i in range(1, d + 1))
        for r in _matrices(a.rows, mid_labels, max_entry):
            for s in _matrices(mid_labels, a.rows, max_entry):
                if r @ s != a:
                    continue
                c = s @ r
                rest = search_sse_chain(c, b, max_inner_dim, max_entry, depth - 1)
                if rest is not None:
                    return (SSEStep(a, r, s),) + rest
    return None
