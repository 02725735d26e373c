"""Truncated Laurent q-series over cyclotomic rationals, graded by powers of pi.

A PiSeries holds sparse terms {exponent-numerator: CycloNumber} in units of
1/D, a truncation bound (coefficients are exactly known for all exponents
strictly below trunc/D), and an integer pi_grade: the power of pi factored out
of every coefficient.  Every identity the engine verifies is pi-homogeneous,
so adding series of different grades is a malformed-identity error rather than
a computation: terms with different powers of pi can never cancel.

Exponent denominators D and cyclotomic orders N are unified automatically by
lcm (silently, with a debug log line), bounded by a configurable cap on N.
Truncation is propagated pessimistically: a result's trunc never overstates
what is exactly known.  All values are immutable; operations are pure.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from ._rat import QNum, as_fraction, rat, rat_str
from .cyclonum import CycloContext, CycloNumber, get_context

logger = logging.getLogger("cubictheta.qlaurent")

#: Exponents in public APIs are plain reduced fractions.
RationalExp = Fraction

DEFAULT_EXPONENT_DENOMINATOR = 72

_cyclo_order_cap = 2520


class PiGradeMismatchError(ArithmeticError):
    """Adding or comparing series with different pi powers: pi is
    transcendental, so such terms can never cancel; the identity is malformed."""


class NotInvertibleError(ArithmeticError):
    """Series is zero to its truncation; no Laurent inverse exists."""


class ContextCapError(ArithmeticError):
    """Context unification would exceed the cyclotomic-order cap."""


class TruncationError(LookupError):
    """A coefficient beyond the series' knowledge bound was requested."""


def set_cyclo_order_cap(n: int) -> None:
    """Set the maximum cyclotomic order context unification may reach."""
    global _cyclo_order_cap
    _cyclo_order_cap = int(n)


def cyclo_order_cap() -> int:
    return _cyclo_order_cap


@functools.lru_cache(maxsize=None)
def series_context(
    exponent_denominator: int = DEFAULT_EXPONENT_DENOMINATOR,
    cyclo_order: int | None = None,
) -> "SeriesContext":
    """Shared SeriesContext for (D, N)."""
    return SeriesContext(exponent_denominator, get_context(cyclo_order or 72))


class SeriesContext:
    """Exponent denominator D plus the cyclotomic coefficient context."""

    __slots__ = ("D", "cyclo")

    def __init__(self, exponent_denominator: int, cyclo: CycloContext):
        if exponent_denominator < 1:
            raise ValueError("exponent denominator must be >= 1")
        self.D = exponent_denominator
        self.cyclo = cyclo

    def __repr__(self):
        return f"SeriesContext(D={self.D}, N={self.cyclo.order})"

    def __eq__(self, other):
        return (
            isinstance(other, SeriesContext)
            and other.D == self.D
            and other.cyclo == self.cyclo
        )

    def __hash__(self):
        return hash(("SeriesContext", self.D, self.cyclo.order))


@dataclass(frozen=True)
class SeriesComparison:
    """Outcome of equal_to_order: verdict, compared bound, first mismatch."""

    equal: bool
    order: Fraction  # comparison ran for all exponents strictly below this
    first_discrepancy: tuple[Fraction, CycloNumber, CycloNumber] | None = None


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _mul_terms(ta: dict, tb: dict, bound: int, cyc: CycloContext) -> dict:
    """Convolution of raw term maps, keeping exponents strictly below bound."""
    if not ta or not tb:
        return {}
    ia = sorted(ta.items())
    ib = sorted(tb.items())
    if len(ia) > len(ib):  # short outer loop, early-breaking inner loop
        ia, ib = ib, ia
    acc: dict[int, dict] = {}
    reduce_raw = cyc._reduce_raw
    for ea, ca in ia:
        da = ca._c
        rem = bound - ea
        for eb, cb in ib:
            if eb >= rem:
                break
            tgt = acc.get(ea + eb)
            if tgt is None:
                tgt = acc[ea + eb] = {}
            for i, av in da.items():
                for j, bv in cb._c.items():
                    k = i + j
                    tgt[k] = tgt.get(k, 0) + av * bv
    out = {}
    for e, raw in acc.items():
        red = reduce_raw(raw)
        if red:
            out[e] = CycloNumber._make(cyc, red)
    return out


def _invert_unit(u: dict, bound: int, cyc: CycloContext) -> dict:
    """Inverse of u = 1 + h (h with positive lead), by Newton iteration."""
    g = {0: cyc.one()}
    tail = [k for k in u if k != 0]
    if not tail:
        return g
    prec = min(tail)
    two = cyc.from_rational(2)
    while prec < bound:
        prec = min(2 * prec, bound)
        ug = _mul_terms(u, g, prec, cyc)
        r = {e: -c for e, c in ug.items() if e != 0}
        head = two - ug.get(0, cyc.zero())
        if head:
            r[0] = head
        g = _mul_terms(g, r, prec, cyc)
    return g


class PiSeries:
    """Truncated Laurent series sum_e c_e q^e times pi^pi_grade.

    terms maps exponent numerators (units of 1/D, possibly negative, finitely
    many below zero) to nonzero CycloNumbers; all stored numerators are
    strictly below trunc.
    """

    __slots__ = ("context", "pi_grade", "terms", "trunc")

    def __init__(self, context: SeriesContext, pi_grade: int, terms, trunc: int):
        self.context = context
        self.pi_grade = pi_grade
        self.trunc = trunc
        clean: dict[int, CycloNumber] = {}
        order = context.cyclo.order
        for e, c in dict(terms).items():
            if e >= trunc:
                continue
            if not isinstance(c, CycloNumber):
                c = context.cyclo.from_rational(c)
            elif c.context.order != order:
                c = c.lift(order)  # raises NotAnExtensionError if impossible
            if c:
                clean[int(e)] = c
        self.terms = clean

    @classmethod
    def _make(cls, context, pi_grade, terms, trunc) -> "PiSeries":
        # trusted constructor: terms already clean
        self = object.__new__(cls)
        self.context = context
        self.pi_grade = pi_grade
        self.terms = terms
        self.trunc = trunc
        return self

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, context: SeriesContext, pi_grade: int, order) -> "PiSeries":
        return cls._make(context, pi_grade, {}, _order_to_trunc(order, context.D))

    @classmethod
    def one(cls, context: SeriesContext, order) -> "PiSeries":
        return cls.monomial(context, 0, 1, 0, order)

    @classmethod
    def monomial(
        cls, context: SeriesContext, exponent, coeff=1, pi_grade: int = 0, order=None
    ) -> "PiSeries":
        """coeff * q^exponent * pi^pi_grade, known below `order` (default: far)."""
        e = as_fraction(exponent) * context.D
        if e.denominator != 1:
            raise ValueError(f"exponent {exponent} not on the 1/{context.D} grid")
        trunc = _order_to_trunc(order, context.D) if order is not None else 10**9
        return cls(context, pi_grade, {int(e): coeff}, trunc)

    @classmethod
    def from_exponent_map(
        cls, context: SeriesContext, pi_grade: int, mapping: dict, order
    ) -> "PiSeries":
        """Build from {rational exponent: coefficient}, known below `order`."""
        terms = {}
        for exp, c in mapping.items():
            e = as_fraction(exp) * context.D
            if e.denominator != 1:
                raise ValueError(f"exponent {exp} not on the 1/{context.D} grid")
            terms[int(e)] = c
        return cls(context, pi_grade, terms, _order_to_trunc(order, context.D))

    # -- inspection -----------------------------------------------------------

    @property
    def D(self) -> int:
        return self.context.D

    @property
    def cyclo(self) -> CycloContext:
        return self.context.cyclo

    @property
    def lead_num(self) -> int:
        """Smallest stored exponent numerator (trunc when the series is zero)."""
        return min(self.terms) if self.terms else self.trunc

    @property
    def lead_exponent(self) -> Fraction | None:
        return Fraction(min(self.terms), self.D) if self.terms else None

    @property
    def known_order(self) -> Fraction:
        """Coefficients are exactly known strictly below this exponent."""
        return Fraction(self.trunc, self.D)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        """Sorted (exponent: Fraction, coefficient) pairs."""
        d = self.D
        return [(Fraction(e, d), self.terms[e]) for e in sorted(self.terms)]

    def coefficient(self, exponent) -> CycloNumber:
        """Exact coefficient at a rational exponent; error beyond trunc."""
        fr = as_fraction(exponent)
        if fr >= self.known_order:
            raise TruncationError(
                f"coefficient at {fr} is beyond the knowledge bound {self.known_order}"
            )
        e = fr * self.D
        if e.denominator != 1:
            return self.cyclo.zero()  # off-grid exponents below trunc are exact zeros
        return self.terms.get(int(e), self.cyclo.zero())

    def __repr__(self):
        head = ", ".join(
            f"q^{Fraction(e, self.D)}:{self.terms[e]!r}" for e in sorted(self.terms)[:4]
        )
        if len(self.terms) > 4:
            head += ", ..."
        return (
            f"PiSeries(pi^{self.pi_grade} * [{head}], known below q^{self.known_order})"
        )

    # -- arithmetic -------------------------------------------------------------

    def __neg__(self):
        return PiSeries._make(
            self.context, self.pi_grade, {e: -c for e, c in self.terms.items()}, self.trunc
        )

    def __add__(self, other):
        if not isinstance(other, PiSeries):
            return NotImplemented
        a, b = unify(self, other)
        if a.terms and b.terms and a.pi_grade != b.pi_grade:
            raise PiGradeMismatchError(
                f"cannot add pi-grade {a.pi_grade} to pi-grade {b.pi_grade}"
            )
        grade = a.pi_grade if a.terms else b.pi_grade
        trunc = min(a.trunc, b.trunc)
        out = {e: c for e, c in a.terms.items() if e < trunc}
        for e, c in b.terms.items():
            if e >= trunc:
                continue
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return PiSeries._make(a.context, grade, out, trunc)

    def __sub__(self, other):
        if not isinstance(other, PiSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PiSeries):
            return NotImplemented
        a, b = unify(self, other)
        trunc = min(a.trunc + b.lead_num, b.trunc + a.lead_num)
        out = _mul_terms(a.terms, b.terms, trunc, a.cyclo)
        return PiSeries._make(a.context, a.pi_grade + b.pi_grade, out, trunc)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            raise ValueError("negative powers: use invert() explicitly")
        if n == 0:
            return PiSeries._make(self.context, 0, {0: self.cyclo.one()}, self.trunc)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def scale(self, coeff, dpi: int = 0) -> "PiSeries":
        """Multiply every coefficient by `coeff` and shift pi_grade by dpi."""
        if isinstance(coeff, CycloNumber):
            na, nb = self.cyclo.order, coeff.context.order
            n = math.lcm(na, nb)
            if n > _cyclo_order_cap:
                raise ContextCapError(
                    f"cyclotomic order {n} exceeds the cap {_cyclo_order_cap}"
                )
            base = self if n == na else self._with_cyclo(n)
            c = coeff if n == nb else coeff.lift(n)
            out = {}
            for e, v in base.terms.items():
                p = v * c
                if p:
                    out[e] = p
            return PiSeries._make(base.context, base.pi_grade + dpi, out, base.trunc)
        v = rat(coeff)
        if not v:
            return PiSeries._make(self.context, self.pi_grade + dpi, {}, self.trunc)
        return PiSeries._make(
            self.context,
            self.pi_grade + dpi,
            {e: c.scale(v) for e, c in self.terms.items()},
            self.trunc,
        )

    def theta_q(self) -> "PiSeries":
        """The operator q d/dq: c q^e maps to e c q^e (exact rational e)."""
        d = self.D
        out = {}
        for e, c in self.terms.items():
            if e:
                out[e] = c.scale(QNum(e, d))
        return PiSeries._make(self.context, self.pi_grade, out, self.trunc)

    def substitute_power(self, k) -> "PiSeries":
        """The substitution q -> q^k for positive rational k."""
        k = as_fraction(k)
        if k <= 0:
            raise ValueError("substitution exponent must be positive")
        p, r = k.numerator, k.denominator
        d2 = self.D * r
        terms = {e * p: c for e, c in self.terms.items()}
        trunc = self.trunc * p
        g = math.gcd(d2, *terms.keys()) if terms else 1
        if g > 1:
            terms = {e // g: c for e, c in terms.items()}
            trunc = _ceil_div(trunc, g)
            d2 //= g
        ctx = series_context(d2, self.cyclo.order)
        return PiSeries._make(ctx, self.pi_grade, terms, trunc)

    def invert(self) -> "PiSeries":
        """Laurent inverse: f * f.invert() = 1 up to the propagated trunc.

        Knowledge shrinks by twice the leading exponent (and grows when the
        lead is negative); pi_grade and the leading exponent negate.
        """
        if not self.terms:
            raise NotInvertibleError("series is zero to its truncation")
        e0 = min(self.terms)
        c0i = self.terms[e0].inverse()
        bound = self.trunc - e0
        u = {}
        for e, c in self.terms.items():
            v = c * c0i
            if v:
                u[e - e0] = v
        g = _invert_unit(u, bound, self.cyclo)
        out = {}
        for e, c in g.items():
            v = c * c0i
            if v:
                out[e - e0] = v
        return PiSeries._make(self.context, -self.pi_grade, out, self.trunc - 2 * e0)

    def truncate(self, order) -> "PiSeries":
        """Restrict the knowledge bound to exponents strictly below `order`."""
        trunc = min(self.trunc, _order_to_trunc(order, self.D))
        return PiSeries._make(
            self.context,
            self.pi_grade,
            {e: c for e, c in self.terms.items() if e < trunc},
            trunc,
        )

    # -- comparison ---------------------------------------------------------------

    def equal_to_order(self, other: "PiSeries") -> SeriesComparison:
        """Exact comparison below the common knowledge bound.

        Reports the smallest differing exponent and both coefficients on
        failure.  Raises PiGradeMismatchError when both series are nonzero
        with different grades (a malformed identity, not a verdict).
        """
        a, b = unify(self, other)
        if a.terms and b.terms and a.pi_grade != b.pi_grade:
            raise PiGradeMismatchError(
                f"comparing pi-grade {a.pi_grade} against {b.pi_grade}"
            )
        bound = min(a.trunc, b.trunc)
        d = a.D
        for e in sorted(set(a.terms) | set(b.terms)):
            if e >= bound:
                break
            ca = a.terms.get(e)
            cb = b.terms.get(e)
            if ca is None:
                ca = a.cyclo.zero()
            if cb is None:
                cb = b.cyclo.zero()
            if ca != cb:
                return SeriesComparison(False, Fraction(bound, d), (Fraction(e, d), ca, cb))
        return SeriesComparison(True, Fraction(bound, d), None)

    # -- context plumbing ------------------------------------------------------------

    def _with_cyclo(self, order: int) -> "PiSeries":
        ctx = series_context(self.D, order)
        return PiSeries._make(
            ctx,
            self.pi_grade,
            {e: c.lift(order) for e, c in self.terms.items()},
            self.trunc,
        )

    def _with_denominator(self, d2: int) -> "PiSeries":
        f = d2 // self.D
        ctx = series_context(d2, self.cyclo.order)
        return PiSeries._make(
            ctx,
            self.pi_grade,
            {e * f: c for e, c in self.terms.items()},
            self.trunc * f,
        )

    # -- serialization ------------------------------------------------------------------

    def to_json_dict(self) -> dict:
        """Exact JSON form: rationals as strings, no floats."""
        return {
            "pi_grade": self.pi_grade,
            "D": self.D,
            "N": self.cyclo.order,
            "trunc": self.trunc,
            "terms": [
                [e, [rat_str(v) for v in self.terms[e].coeffs]]
                for e in sorted(self.terms)
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PiSeries":
        ctx = series_context(int(obj["D"]), int(obj["N"]))
        terms = {}
        for e, vec in obj["terms"]:
            terms[int(e)] = CycloNumber(ctx.cyclo, [Fraction(v) for v in vec])
        return cls(ctx, int(obj["pi_grade"]), terms, int(obj["trunc"]))


def _order_to_trunc(order, d: int) -> int:
    num = as_fraction(order) * d
    return _ceil_div(num.numerator, num.denominator)


def unify(a: PiSeries, b: PiSeries) -> tuple[PiSeries, PiSeries]:
    """Bring two series to a common (D, N) context by lcm, under the N cap."""
    if a.context is b.context or a.context == b.context:
        return a, b
    d = math.lcm(a.D, b.D)
    n = math.lcm(a.cyclo.order, b.cyclo.order)
    if n > _cyclo_order_cap:
        raise ContextCapError(
            f"unification needs cyclotomic order {n} > cap {_cyclo_order_cap}"
        )
    logger.debug(
        "unifying contexts (D=%s,N=%s) + (D=%s,N=%s) -> (D=%s,N=%s)",
        a.D, a.cyclo.order, b.D, b.cyclo.order, d, n,
    )
    if a.cyclo.order != n:
        a = a._with_cyclo(n)
    if b.cyclo.order != n:
        b = b._with_cyclo(n)
    if a.D != d:
        a = a._with_denominator(d)
    if b.D != d:
        b = b._with_denominator(d)
    return a, b
