"""Exact atom probabilities of random-sign vector sums.

All counting runs over integer keys: inputs are scaled by the lcm of
their coordinate denominators up front, so the hot loops add machine
integers (or small bigints) and equal sums collide exactly.  The atom
event is exact equality; no epsilon appears anywhere.

Two enumeration strategies:

* direct - sequential convolution of the +-v_i two-point distributions
  into one table, up to DIRECT_LIMIT variables.  Duplicate sums
  collapse as they appear, so the table is bounded by the number of
  distinct sums, not by 2^n pattern count.
* mitm - meet-in-the-middle for single-target probes: tabulate the
  first half, tabulate the second half, then count matching
  complements.  Splitting caps table sizes at 2^(n/2), which extends
  the reach to PROBE_LIMIT variables for point queries.

Full-distribution operations (sum tables, max_atom, rho_max_1d) have no
half-table shortcut and stop at EXHAUSTIVE_LIMIT.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import CapacityError, InputError
from .norms import RVector

DIRECT_LIMIT = 24
PROBE_LIMIT = 44
EXHAUSTIVE_LIMIT = DIRECT_LIMIT


def _canon(q) -> Fraction:
    # Fraction(Fraction(...)) copies; skip it on the hot paths.
    return q if type(q) is Fraction else Fraction(q)


def _as_fractions(a: Sequence) -> tuple[Fraction, ...]:
    out = tuple(_canon(q) for q in a)
    if not out:
        raise InputError("empty coefficient list")
    return out


def _as_vectors(v: Sequence[Sequence]) -> tuple[RVector, ...]:
    out = tuple(tuple(_canon(c) for c in row) for row in v)
    if not out:
        raise InputError("empty vector list")
    d = len(out[0])
    if d == 0 or any(len(row) != d for row in out):
        raise InputError("vectors must share a fixed nonzero dimension")
    return out


def _int_table_1d(values: tuple[int, ...]) -> dict[int, int]:
    table = {0: 1}
    for a in values:
        nxt: dict[int, int] = {}
        get = nxt.get
        for s, c in table.items():
            u = s + a
            nxt[u] = get(u, 0) + c
            u = s - a
            nxt[u] = get(u, 0) + c
        table = nxt
    return table


def _int_table_nd(vectors: tuple[tuple[int, ...], ...],
                  d: int) -> dict[tuple[int, ...], int]:
    table: dict[tuple[int, ...], int] = {(0,) * d: 1}
    for v in vectors:
        nxt: dict[tuple[int, ...], int] = {}
        get = nxt.get
        for s, c in table.items():
            u = tuple(a + b for a, b in zip(s, v))
            nxt[u] = get(u, 0) + c
            u = tuple(a - b for a, b in zip(s, v))
            nxt[u] = get(u, 0) + c
        table = nxt
    return table


# Campaigns probe one vector multiset at many targets; caching both the
# lcm scaling and the scaled tables turns the repeat queries into
# dictionary lookups.  Cached values are shared and must never be mutated.
_cached_table_1d = lru_cache(maxsize=256)(_int_table_1d)
_cached_table_nd = lru_cache(maxsize=256)(_int_table_nd)


@lru_cache(maxsize=512)
def _scaled_1d(coeffs: tuple[Fraction, ...]) -> tuple[tuple[int, ...], int]:
    den = math.lcm(*(q.denominator for q in coeffs))
    return tuple(q.numerator * (den // q.denominator) for q in coeffs), den


@lru_cache(maxsize=512)
def _scaled_nd(vectors: tuple[RVector, ...]) -> tuple[tuple[tuple[int, ...], ...], int]:
    den = math.lcm(*(c.denominator for row in vectors for c in row))
    ints = tuple(tuple(c.numerator * (den // c.denominator) for c in row)
                 for row in vectors)
    return ints, den


def _probe_count_1d(values: tuple[int, ...], target: int) -> int:
    h = len(values) // 2
    left = _int_table_1d(values[:h])
    right = _int_table_1d(values[h:])
    rget = right.get
    return sum(c * rget(target - s, 0) for s, c in left.items())


def _probe_count_nd(vectors: tuple[tuple[int, ...], ...],
                    target: tuple[int, ...]) -> int:
    h = len(vectors) // 2
    d = len(target)
    left = _int_table_nd(vectors[:h], d)
    right = _int_table_nd(vectors[h:], d)
    rget = right.get
    total = 0
    for s, c in left.items():
        total += c * rget(tuple(t - a for t, a in zip(target, s)), 0)
    return total


def _check_probe_size(n: int, method: str) -> str:
    if method == "auto":
        if n > PROBE_LIMIT:
            raise CapacityError(
                f"atom probes support at most {PROBE_LIMIT} vectors, got {n}")
        return "direct" if n <= DIRECT_LIMIT else "mitm"
    if method == "direct":
        if n > DIRECT_LIMIT:
            raise CapacityError(
                f"direct enumeration supports at most {DIRECT_LIMIT} vectors, got {n}")
        return method
    if method == "mitm":
        if n > PROBE_LIMIT:
            raise CapacityError(
                f"meet-in-the-middle supports at most {PROBE_LIMIT} vectors, got {n}")
        return method
    raise InputError(f"unknown method {method!r} (expected auto, direct, or mitm)")


def atom_1d(a: Sequence, t, *, method: str = "auto") -> Fraction:
    """Exact P(sum_i eps_i a_i = t) over uniform independent signs eps_i.

    method "auto" picks direct convolution up to DIRECT_LIMIT variables
    and meet-in-the-middle up to PROBE_LIMIT; "direct" or "mitm" force
    one path (the equivalence tests exercise both against each other).
    """
    coeffs = _as_fractions(a)
    t = _canon(t)
    n = len(coeffs)
    method = _check_probe_size(n, method)
    ints, den = _scaled_1d(coeffs)
    if den % t.denominator:
        return Fraction(0)  # off the lattice spanned by the a_i
    key = t.numerator * (den // t.denominator)
    if method == "direct":
        count = _cached_table_1d(ints).get(key, 0)
    else:
        count = _probe_count_1d(ints, key)
    return Fraction(count, 2 ** n)


def atom_nd(v: Sequence[Sequence], x: Sequence, *, method: str = "auto") -> Fraction:
    """Exact P(sum_i eps_i v_i = x) over uniform independent signs eps_i."""
    vectors = _as_vectors(v)
    target = tuple(_canon(c) for c in x)
    if len(target) != len(vectors[0]):
        raise InputError(
            f"target has dimension {len(target)}, vectors have {len(vectors[0])}")
    n = len(vectors)
    method = _check_probe_size(n, method)
    ints, den = _scaled_nd(vectors)
    if any(den % c.denominator for c in target):
        return Fraction(0)  # off the lattice spanned by the v_i
    key = tuple(c.numerator * (den // c.denominator) for c in target)
    if method == "direct":
        count = _cached_table_nd(ints, len(target)).get(key, 0)
    else:
        count = _probe_count_nd(ints, key)
    return Fraction(count, 2 ** n)


def sum_table_1d(a: Sequence) -> dict[Fraction, int]:
    """Full distribution of sum_i eps_i a_i: sum value -> pattern count.

    Counts total 2^n across the table."""
    coeffs = _as_fractions(a)
    n = len(coeffs)
    if n > EXHAUSTIVE_LIMIT:
        raise CapacityError(
            f"full sum tables support at most {EXHAUSTIVE_LIMIT} vectors, got {n}")
    ints, den = _scaled_1d(coeffs)
    return {Fraction(s, den): c for s, c in _cached_table_1d(ints).items()}


def sum_table_nd(v: Sequence[Sequence]) -> dict[RVector, int]:
    """Full distribution of sum_i eps_i v_i: sum vector -> pattern count."""
    vectors = _as_vectors(v)
    n = len(vectors)
    if n > EXHAUSTIVE_LIMIT:
        raise CapacityError(
            f"full sum tables support at most {EXHAUSTIVE_LIMIT} vectors, got {n}")
    ints, den = _scaled_nd(vectors)
    return {tuple(Fraction(s, den) for s in key): c
            for key, c in _cached_table_nd(ints, len(ints[0])).items()}


def reachable_sums_nd(v: Sequence[Sequence]) -> list[RVector]:
    """All attainable values of sum_i eps_i v_i, sorted lexicographically.

    Sorting happens on the scaled integer keys (same order, since the
    scale factor is positive), which keeps target enumeration cheap for
    campaign sweeps.
    """
    vectors = _as_vectors(v)
    n = len(vectors)
    if n > EXHAUSTIVE_LIMIT:
        raise CapacityError(
            f"full sum tables support at most {EXHAUSTIVE_LIMIT} vectors, got {n}")
    ints, den = _scaled_nd(vectors)
    return [tuple(Fraction(s, den) for s in key)
            for key in sorted(_cached_table_nd(ints, len(ints[0])))]


def max_atom(v: Sequence[Sequence]) -> tuple[RVector, Fraction]:
    """Most probable sum target with its exact probability.

    Ties break to the lexicographically smallest target, so results are
    reproducible across runs and platforms.
    """
    vectors = _as_vectors(v)
    n = len(vectors)
    if n > EXHAUSTIVE_LIMIT:
        raise CapacityError(
            f"max_atom enumerates the full table and supports at most "
            f"{EXHAUSTIVE_LIMIT} vectors, got {n}")
    ints, den = _scaled_nd(vectors)
    table = _cached_table_nd(ints, len(ints[0]))
    best_key = None
    best_count = -1
    # Scaling by a single positive factor preserves lexicographic order,
    # so comparing integer keys picks the same target as comparing the
    # rational sums.
    for key, count in table.items():
        if count > best_count or (count == best_count and key < best_key):
            best_key = key
            best_count = count
    return (tuple(Fraction(s, den) for s in best_key),
            Fraction(best_count, 2 ** n))


def rho_max_1d(a: Sequence) -> Fraction:
    """Largest atom probability max_t P(sum_i eps_i a_i = t)."""
    coeffs = _as_fractions(a)
    n = len(coeffs)
    if n > EXHAUSTIVE_LIMIT:
        raise CapacityError(
            f"rho_max_1d enumerates the full table and supports at most "
            f"{EXHAUSTIVE_LIMIT} vectors, got {n}")
    ints, _ = _scaled_1d(coeffs)
    return Fraction(max(_cached_table_1d(ints).values()), 2 ** n)
