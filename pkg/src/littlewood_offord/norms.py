"""Norm evaluation, exact ceilings, closed-form duals, and dual-optimal
witnesses.

Four exact families are supported: l1, l2, linf, and facet-form
polyhedral norms max_j |<f_j, x>| (the functionals must span the space,
otherwise the form is a seminorm and is rejected).  l2 magnitudes are
carried as exact squares, so every ordering and ceiling decision on
them reduces to integer arithmetic.  The lp family (rational p > 1) is
float-mode only: usable for sampling checks, rejected by every
operation that feeds the exact certification pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, UnsupportedNormOperation
from .exactnum import ceil_sqrt, format_rational, parse_rational

RVector = tuple[Fraction, ...]

L1 = "l1"
L2 = "l2"
LINF = "linf"
POLY = "poly"
LP = "lp"

# NormValue kinds.
RATIONAL = "rational"
SQUARED = "squared"
FLOAT = "float"

_CLOSED_DUAL_KINDS = (L1, L2, LINF)
_DUAL_KIND = {L1: LINF, L2: L2, LINF: L1}


def vector(coords: Iterable) -> RVector:
    """Build an RVector (tuple of Fractions) from an iterable of rationals."""
    v = tuple(c if type(c) is Fraction else Fraction(c) for c in coords)
    if not v:
        raise InputError("empty vector")
    return v


def dot(x: RVector, y: RVector) -> Fraction:
    if len(x) != len(y):
        raise InputError(f"dimension mismatch: {len(x)} vs {len(y)}")
    total = None
    for a, b in zip(x, y):
        total = a * b if total is None else total + a * b
    return total if total is not None else Fraction(0)


def is_zero(x: RVector) -> bool:
    return all(c == 0 for c in x)


def _sign(q: Fraction) -> int:
    # sign(0) = +1 so sign vectors stay in the dual ball of l1
    return -1 if q < 0 else 1


def _rank(rows: Sequence[RVector]) -> int:
    """Rank over the rationals, by exact Gaussian elimination."""
    m = [list(r) for r in rows]
    cols = len(m[0]) if m else 0
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        lead = m[rank][col]
        for r in range(rank + 1, len(m)):
            if m[r][col] != 0:
                f = m[r][col] / lead
                for c in range(col, cols):
                    m[r][c] -= f * m[rank][c]
        rank += 1
        if rank == len(m):
            break
    return rank


@dataclass(frozen=True)
class NormSpec:
    """Tagged description of a norm on rational vectors.

    kind is "l1", "l2", "linf", "poly" (facet form max_j |<f_j, x>|,
    fixed dimension), or "lp" (float mode, exponent p > 1).
    """

    kind: str
    functionals: tuple[RVector, ...] = ()
    p: Fraction | None = None

    def __post_init__(self):
        if self.kind not in (L1, L2, LINF, POLY, LP):
            raise InputError(f"unknown norm kind {self.kind!r}")
        if self.kind == POLY:
            if not self.functionals:
                raise InputError("polyhedral norm needs at least one functional")
            d = len(self.functionals[0])
            if d == 0 or any(len(f) != d for f in self.functionals):
                raise InputError("functionals must share a fixed nonzero dimension")
            if _rank(self.functionals) < d:
                raise InputError(
                    "functionals do not span the space (a seminorm, not a norm)")
        elif self.functionals:
            raise InputError(f"{self.kind} norm takes no functionals")
        if self.kind == LP:
            if self.p is None or self.p <= 1:
                raise InputError("lp norm needs a rational exponent p > 1")
        elif self.p is not None:
            raise InputError(f"{self.kind} norm takes no exponent")

    @classmethod
    def l1(cls) -> "NormSpec":
        return cls(L1)

    @classmethod
    def l2(cls) -> "NormSpec":
        return cls(L2)

    @classmethod
    def linf(cls) -> "NormSpec":
        return cls(LINF)

    @classmethod
    def polyhedral(cls, functionals: Iterable[Iterable]) -> "NormSpec":
        return cls(POLY, tuple(vector(f) for f in functionals))

    @classmethod
    def lp(cls, p) -> "NormSpec":
        return cls(LP, p=Fraction(p))

    @property
    def exact(self) -> bool:
        return self.kind != LP

    @property
    def dimension(self) -> int | None:
        """Fixed dimension for polyhedral specs, None otherwise."""
        return len(self.functionals[0]) if self.kind == POLY else None


@dataclass(frozen=True)
class NormValue:
    """Exact magnitude descriptor.

    kind "rational" stores the magnitude itself; kind "squared" stores
    its exact square (l2 magnitudes are generally irrational); kind
    "float" is the lp sampling mode and is rejected by the exact
    operations.
    """

    kind: str
    value: Fraction | float

    @classmethod
    def rational(cls, q) -> "NormValue":
        q = Fraction(q)
        if q < 0:
            raise InputError("a magnitude cannot be negative")
        return cls(RATIONAL, q)

    @classmethod
    def squared(cls, q2) -> "NormValue":
        q2 = Fraction(q2)
        if q2 < 0:
            raise InputError("a squared magnitude cannot be negative")
        return cls(SQUARED, q2)

    @classmethod
    def approx(cls, x: float) -> "NormValue":
        return cls(FLOAT, float(x))

    @property
    def exact(self) -> bool:
        return self.kind != FLOAT

    def ceil(self) -> int:
        """Exact ceiling of the magnitude."""
        if self.kind == RATIONAL:
            return math.ceil(self.value)
        if self.kind == SQUARED:
            return ceil_sqrt(self.value)
        raise UnsupportedNormOperation("no exact ceiling in float mode")

    def to_float(self) -> float:
        if self.kind == SQUARED:
            return math.sqrt(float(self.value))
        return float(self.value)

    def le_rational(self, q) -> bool:
        """Exact test: magnitude <= q."""
        q = Fraction(q)
        if self.kind == RATIONAL:
            return self.value <= q
        if self.kind == SQUARED:
            return q >= 0 and self.value <= q * q
        raise UnsupportedNormOperation("no exact comparison in float mode")

    def is_zero(self) -> bool:
        return self.exact and self.value == 0

    def equals(self, other: "NormValue") -> bool:
        """Exact equality of magnitudes across the exact kinds."""
        if not (self.exact and other.exact):
            raise UnsupportedNormOperation("no exact equality in float mode")
        if self.kind == other.kind:
            return self.value == other.value
        plain, squared = (self, other) if self.kind == RATIONAL else (other, self)
        return plain.value * plain.value == squared.value


@dataclass(frozen=True)
class Witness:
    """Unnormalized dual-optimal direction w with its exact scale s.

    The witness proper is y = w / s; keeping the scale symbolic lets l2
    carry s = sqrt(<x, x>) exactly.  Invariants: <x, w> = ||x|| * s and
    ||w / s||_* <= 1, both checkable without leaving rational arithmetic.
    """

    direction: RVector
    scale: NormValue


def norm_eval(spec: NormSpec, x: RVector) -> NormValue:
    """Evaluate ||x||: exact descriptor for exact kinds, float for lp."""
    if not x:
        raise InputError("empty vector")
    if spec.kind == POLY and len(x) != spec.dimension:
        raise InputError(
            f"dimension mismatch: norm is on {spec.dimension} coordinates, "
            f"vector has {len(x)}")
    if spec.kind == L1:
        return NormValue.rational(sum(abs(c) for c in x))
    if spec.kind == L2:
        return NormValue.squared(dot(x, x))
    if spec.kind == LINF:
        return NormValue.rational(max(abs(c) for c in x))
    if spec.kind == POLY:
        return NormValue.rational(max(abs(dot(f, x)) for f in spec.functionals))
    p = float(spec.p)
    return NormValue.approx(sum(abs(float(c)) ** p for c in x) ** (1.0 / p))


def ceil_norm(spec: NormSpec, x: RVector) -> int:
    """Exact ceil(||x||); zero iff x = 0.  Rejected for lp (float mode)."""
    if not spec.exact:
        raise UnsupportedNormOperation("ceil_norm needs an exact-mode norm")
    return norm_eval(spec, x).ceil()


def dual_spec(spec: NormSpec) -> NormSpec:
    """The dual norm's spec where a closed form exists:
    l1 <-> linf, l2 self-dual, lp <-> lq with 1/p + 1/q = 1."""
    if spec.kind in _DUAL_KIND:
        return NormSpec(_DUAL_KIND[spec.kind])
    if spec.kind == LP:
        return NormSpec.lp(spec.p / (spec.p - 1))
    raise UnsupportedNormOperation(
        "the dual of a facet-form polyhedral norm has no closed form here")


def dual_eval(spec: NormSpec, u: RVector) -> NormValue:
    """Evaluate the dual norm ||u||_* where a closed form exists."""
    return norm_eval(dual_spec(spec), u)


def dual_witness(spec: NormSpec, x: RVector) -> Witness:
    """Dual-optimal witness for x != 0 under an exact-mode norm.

    Dual-ball membership of y = w / s is structural per variant: l2
    normalizes x by its own length; the l1 witness is a sign vector
    (sup-norm 1); the linf witness is a signed coordinate vector at the
    smallest index of maximal magnitude (1-norm 1); the polyhedral
    witness is a signed defining functional, which lies in the dual
    ball because the norm dominates |<f_j, .>| by definition.
    """
    if not spec.exact:
        raise UnsupportedNormOperation("dual_witness needs an exact-mode norm")
    if spec.kind == POLY and len(x) != spec.dimension:
        raise InputError(
            f"dimension mismatch: norm is on {spec.dimension} coordinates, "
            f"vector has {len(x)}")
    if is_zero(x):
        raise InputError("dual witness undefined for x = 0")
    if spec.kind == L2:
        return Witness(x, NormValue.squared(dot(x, x)))
    one = NormValue.rational(1)
    if spec.kind == L1:
        return Witness(tuple(Fraction(_sign(c)) for c in x), one)
    if spec.kind == LINF:
        best = 0
        for i in range(1, len(x)):
            if abs(x[i]) > abs(x[best]):
                best = i
        w = [Fraction(0)] * len(x)
        w[best] = Fraction(_sign(x[best]))
        return Witness(tuple(w), one)
    vals = [dot(f, x) for f in spec.functionals]
    best = 0
    for j in range(1, len(vals)):
        if abs(vals[j]) > abs(vals[best]):
            best = j
    sigma = _sign(vals[best])
    return Witness(tuple(sigma * c for c in spec.functionals[best]), one)


def holder_check(spec: NormSpec, x: RVector, u: RVector) -> bool:
    """Exact executable check of |<x, u>| <= ||x|| ||u||_*.

    Supported where the dual has an exact closed form (l1, l2, linf).
    The l2 case compares squares, avoiding square roots.
    """
    if spec.kind not in _CLOSED_DUAL_KINDS:
        raise UnsupportedNormOperation("holder_check needs a closed-form dual")
    inner = dot(x, u)
    if spec.kind == L2:
        return inner * inner <= dot(x, x) * dot(u, u)
    nx = norm_eval(spec, x).value
    nu = dual_eval(spec, u).value
    return abs(inner) <= nx * nu


def double_dual_check(spec: NormSpec, x: RVector) -> bool:
    """Exact check that the dual of the dual reproduces ||x||."""
    if spec.kind not in _CLOSED_DUAL_KINDS:
        raise UnsupportedNormOperation("double_dual_check needs a closed-form dual")
    return norm_eval(spec, x).equals(dual_eval(dual_spec(spec), x))


def format_norm(spec: NormSpec) -> str:
    if spec.kind in (L1, L2, LINF):
        return spec.kind
    if spec.kind == LP:
        return f"lp:{format_rational(spec.p)}"
    body = ";".join(
        ",".join(format_rational(c) for c in f) for f in spec.functionals)
    return f"poly:[{body}]"


def parse_norm(text: str) -> NormSpec:
    """Parse "l1" | "l2" | "linf" | "lp:<p>" | "poly:[f1;f2;...]" where
    each functional is a comma-separated list of rationals."""
    s = text.strip()
    if s in (L1, L2, LINF):
        return NormSpec(s)
    if s.startswith("lp:"):
        return NormSpec.lp(parse_rational(s[3:]))
    if s.startswith("poly:"):
        body = s[5:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise InputError(f"malformed polyhedral norm: {text!r}")
        rows = [row for row in body[1:-1].split(";") if row.strip()]
        if not rows:
            raise InputError(f"polyhedral norm needs functionals: {text!r}")
        return NormSpec.polyhedral(
            [parse_rational(c) for c in row.split(",")] for row in rows)
    raise InputError(f"unknown norm spec: {text!r}")
