"""Exact arithmetic in the cyclotomic field Q(zeta_N).

A CycloNumber is a canonical residue modulo the N-th cyclotomic polynomial,
held as a sparse map {power: rational} with powers below phi(N).  Two numbers
are equal as field elements iff their (zero-suppressed) coefficient maps are
identical, so equality is a dict comparison.  The field houses every root of
unity the engine needs: i = zeta_4, sqrt(3) = zeta_12 + zeta_12^-1, and the
phases attached to rational theta characteristics.

The default order is 72 = lcm(8, 9) --- large enough for zeta_4, zeta_6,
zeta_12 and zeta_36 simultaneously.  Values are immutable after construction.
"""

from __future__ import annotations

import cmath
import functools
import math
from fractions import Fraction

from ._rat import QNum, as_fraction, rat, rat_str

DEFAULT_ORDER = 72


class ContextMismatchError(ValueError):
    """Raised when two cyclotomic orders cannot be reconciled by lifting."""


class NotAnExtensionError(ValueError):
    """Raised by lift(a, M) when the target order is not a multiple of N."""


def _poly_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return tuple(out)


def _poly_divmod_exact(num: list[int], den: tuple[int, ...]) -> tuple[int, ...]:
    """Exact division of integer polynomials; raises if it does not divide."""
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    quot = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c % lead:
            raise ArithmeticError("polynomial division is not exact")
        q = c // lead
        quot[k - dd] = q
        if q:
            for j, dj in enumerate(den):
                num[k - dd + j] -= q * dj
    if any(num):
        raise ArithmeticError("polynomial division left a remainder")
    return tuple(quot)


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (ascending, monic) of the n-th cyclotomic polynomial.

    Computed from the defining factorization x^n - 1 = prod_{d|n} Phi_d by
    exact integer division, not hard-coded.
    """
    if n < 1:
        raise ValueError("order must be a positive integer")
    if n == 1:
        return (-1, 1)
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    den: tuple[int, ...] = (1,)
    for d in range(1, n):
        if n % d == 0:
            den = _poly_mul(den, cyclotomic_polynomial(d))
    return _poly_divmod_exact(num, den)


@functools.lru_cache(maxsize=None)
def get_context(order: int = DEFAULT_ORDER) -> "CycloContext":
    """Shared CycloContext instance for a given order."""
    return CycloContext(order)


class CycloContext:
    """Field data for Q(zeta_N): the cyclotomic polynomial and power tables."""

    __slots__ = ("order", "phi", "cyclo_poly", "_xpow_tail", "_xpow_last")

    def __init__(self, order: int = DEFAULT_ORDER):
        self.order = order
        self.cyclo_poly = cyclotomic_polynomial(order)
        self.phi = len(self.cyclo_poly) - 1
        # reduced rows for x^k, k >= phi, grown on demand
        self._xpow_tail: list[tuple[tuple[int, int], ...]] = []
        self._xpow_last: list[int] = []

    def __repr__(self):
        return f"CycloContext(order={self.order})"

    def __eq__(self, other):
        return isinstance(other, CycloContext) and other.order == self.order

    def __hash__(self):
        return hash(("CycloContext", self.order))

    # -- reduced powers of x ------------------------------------------------

    def _xpow_pairs(self, k: int) -> tuple[tuple[int, int], ...]:
        """x^k mod cyclo_poly as ((index, int coefficient), ...), k >= phi."""
        phi = self.phi
        tail = self._xpow_tail
        if not tail:
            # x^phi = -(lower coefficients); the polynomial is monic
            self._xpow_last = [-c for c in self.cyclo_poly[:phi]]
            tail.append(tuple((i, c) for i, c in enumerate(self._xpow_last) if c))
        while len(tail) <= k - phi:
            cur = self._xpow_last
            top = cur[phi - 1]
            nxt = [0] + cur[: phi - 1]
            if top:
                for i in range(phi):
                    nxt[i] -= top * self.cyclo_poly[i]
            self._xpow_last = nxt
            tail.append(tuple((i, c) for i, c in enumerate(nxt) if c))
        return tail[k - phi]

    def _reduce_raw(self, raw: dict) -> dict:
        """Fold powers >= phi and drop zeros; values are exact rationals."""
        phi = self.phi
        out: dict[int, QNum] = {}
        for k, v in raw.items():
            if not v:
                continue
            if k < phi:
                out[k] = out.get(k, 0) + v
            else:
                for i, c in self._xpow_pairs(k):
                    out[i] = out.get(i, 0) + v * c
        return {k: v for k, v in out.items() if v}

    # -- constructors --------------------------------------------------------

    def zero(self) -> "CycloNumber":
        return CycloNumber._make(self, {})

    def one(self) -> "CycloNumber":
        return CycloNumber._make(self, {0: rat(1)})

    def from_rational(self, value) -> "CycloNumber":
        v = rat(value)
        return CycloNumber._make(self, {0: v} if v else {})

    def root_of_unity(self, k: int) -> "CycloNumber":
        """Canonical residue of zeta_N^k (k reduced modulo N)."""
        k %= self.order
        if k < self.phi:
            return CycloNumber._make(self, {k: rat(1)})
        return CycloNumber._make(
            self, {i: rat(c) for i, c in self._xpow_pairs(k)}
        )


def root_of_unity(k: int, ctx: CycloContext | None = None) -> "CycloNumber":
    """zeta_N^k in the given context (default order 72)."""
    return (ctx or get_context()).root_of_unity(k)


def _common(a: "CycloNumber", b: "CycloNumber"):
    na, nb = a.context.order, b.context.order
    if na == nb:
        return a, b
    if nb % na == 0:
        return a.lift(nb), b
    if na % nb == 0:
        return a, b.lift(na)
    raise ContextMismatchError(
        f"cyclotomic orders {na} and {nb}: neither divides the other"
    )


class CycloNumber:
    """An element of Q(zeta_N), stored as a canonical sparse residue.

    Supports +, -, *, /, ** with other CycloNumbers (orders reconciled by
    lifting when one divides the other) and with plain rationals.
    """

    __slots__ = ("context", "_c")

    def __init__(self, context: CycloContext, coeffs):
        """Build from a coefficient sequence or {power: rational} mapping."""
        self.context = context
        if isinstance(coeffs, dict):
            raw = {int(k): rat(v) for k, v in coeffs.items()}
        else:
            raw = {i: rat(v) for i, v in enumerate(coeffs)}
        self._c = context._reduce_raw(raw)

    @classmethod
    def _make(cls, context: CycloContext, reduced: dict) -> "CycloNumber":
        # trusted constructor: `reduced` is already canonical
        self = object.__new__(cls)
        self.context = context
        self._c = reduced
        return self

    # -- inspection ----------------------------------------------------------

    @property
    def coeffs(self) -> tuple:
        """Dense coefficient vector of length phi (the canonical residue)."""
        z = rat(0)
        return tuple(self._c.get(i, z) for i in range(self.context.phi))

    def is_zero(self) -> bool:
        return not self._c

    def is_rational(self) -> bool:
        return not self._c or (len(self._c) == 1 and 0 in self._c)

    def rational_value(self):
        """The value as an exact rational; raises if not rational."""
        if not self._c:
            return rat(0)
        if self.is_rational():
            return self._c[0]
        raise ValueError("value is not rational")

    def approx_complex(self) -> complex:
        """Floating evaluation at zeta_N = e^(2 pi i / N).  Diagnostics only;
        never consulted for a verification verdict."""
        n = self.context.order
        out = 0j
        for k, v in self._c.items():
            out += float(v.numerator) / float(v.denominator) * cmath.exp(
                2j * cmath.pi * k / n
            )
        return out

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c):
            v = rat_str(self._c[k])
            if k == 0:
                parts.append(v)
            elif v == "1":
                parts.append(f"z^{k}")
            else:
                parts.append(f"{v}*z^{k}")
        return " + ".join(parts)

    # -- ring structure --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycloNumber):
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(rat(0)):
            return self.context.from_rational(other)
        return None

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = _common(self, o)
        return a._c == b._c

    def __hash__(self):
        return hash((self.context.order, frozenset(self._c.items())))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = _common(self, o)
        out = dict(a._c)
        for k, v in b._c.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return CycloNumber._make(a.context, out)

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber._make(self.context, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = _common(self, o)
        if not a._c or not b._c:
            return CycloNumber._make(a.context, {})
        raw: dict[int, QNum] = {}
        for i, av in a._c.items():
            for j, bv in b._c.items():
                k = i + j
                raw[k] = raw.get(k, 0) + av * bv
        return CycloNumber._make(a.context, a.context._reduce_raw(raw))

    __rmul__ = __mul__

    def scale(self, value) -> "CycloNumber":
        """Multiply by a plain rational (cheap fast path)."""
        v = rat(value)
        if not v:
            return CycloNumber._make(self.context, {})
        return CycloNumber._make(
            self.context, {k: c * v for k, c in self._c.items()}
        )

    def inverse(self) -> "CycloNumber":
        """Multiplicative inverse; extended euclidean algorithm mod Phi_N."""
        if not self._c:
            raise ZeroDivisionError("inverse of zero in Q(zeta_N)")
        ctx = self.context
        if len(self._c) == 1:
            # c * zeta^k inverts to (1/c) * zeta^(N-k)
            ((k, v),) = self._c.items()
            return ctx.root_of_unity(-k).scale(1 / rat(v))
        phi = ctx.phi
        # dense QNum polynomials, ascending
        r0 = [rat(c) for c in ctx.cyclo_poly]
        r1 = [self._c.get(i, rat(0)) for i in range(phi)]
        t0, t1 = [rat(0)], [rat(1)]

        def deg(p):
            for i in range(len(p) - 1, -1, -1):
                if p[i]:
                    return i
            return -1

        while True:
            d1 = deg(r1)
            if d1 < 0:
                raise ZeroDivisionError("element has no inverse (not coprime)")
            if d1 == 0:
                c = r1[0]
                return CycloNumber(
                    ctx, {i: v / c for i, v in enumerate(t1) if v}
                )
            d0 = deg(r0)
            if d0 < d1:
                r0, r1, t0, t1 = r1, r0, t1, t0
                continue
            # one long-division step: r0 -= (lead0/lead1) x^(d0-d1) r1
            f = r0[d0] / r1[d1]
            sh = d0 - d1
            for i in range(d1 + 1):
                r0[i + sh] -= f * r1[i]
            while len(t0) < len(t1) + sh:
                t0.append(rat(0))
            for i in range(len(t1)):
                t0[i + sh] -= f * t1[i]

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = self.context.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def lift(self, order: int) -> "CycloNumber":
        """Image under zeta_N -> zeta_M^(M/N); requires N | M."""
        n = self.context.order
        if order == n:
            return self
        if order % n:
            raise NotAnExtensionError(f"{n} does not divide {order}")
        t = order // n
        target = get_context(order)
        return CycloNumber._make(
            target, target._reduce_raw({k * t: v for k, v in self._c.items()})
        )


def sqrt3(ctx: CycloContext | None = None) -> CycloNumber:
    """sqrt(3) = zeta_12 + zeta_12^-1, exact (needs 12 | N)."""
    ctx = ctx or get_context()
    step = ctx.order // 12
    if ctx.order % 12:
        raise ContextMismatchError("sqrt(3) needs a context of order divisible by 12")
    return ctx.root_of_unity(step) + ctx.root_of_unity(-step)


def imag_unit(ctx: CycloContext | None = None) -> CycloNumber:
    """i = zeta_4, exact (needs 4 | N)."""
    ctx = ctx or get_context()
    if ctx.order % 4:
        raise ContextMismatchError("i needs a context of order divisible by 4")
    return ctx.root_of_unity(ctx.order // 4)


def phase(turns, ctx: CycloContext | None = None) -> CycloNumber:
    """e^(2 pi i * turns) for rational turns, as an exact root of unity."""
    fr = as_fraction(turns)
    ctx = ctx or get_context()
    if ctx.order % fr.denominator:
        raise ContextMismatchError(
            f"phase with denominator {fr.denominator} needs {fr.denominator} | N"
        )
    return ctx.root_of_unity(fr.numerator * (ctx.order // fr.denominator))


def min_phase_order(*turns) -> int:
    """Smallest cyclotomic order containing e^(2 pi i t) for all given t."""
    out = 1
    for t in turns:
        out = math.lcm(out, as_fraction(t).denominator)
    return out
