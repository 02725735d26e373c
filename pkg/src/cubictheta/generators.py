"""Named q-series of the level-three theory.

Everything here is built from first principles (lattice enumeration, divisor
sums, explicit infinite products, Lambert-series expansion) so the generators
stay independent of the identities they are later used to verify.  All outputs
have pi_grade 0 and rational coefficients.

`order` is always an exclusive exponent bound: coefficients are produced for
every exponent strictly below it, and the returned series' knowledge bound
equals it (or exceeds it where the construction gives more for free).
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from fractions import Fraction

from ._rat import as_fraction, rat
from .qlaurent import PiSeries, SeriesContext, series_context, unify

_RATIONAL_CTX = series_context(1, 1)


class EtaSpecParseError(ValueError):
    """Malformed eta-quotient spec string."""


# -- arithmetic functions -------------------------------------------------------


def legendre3(n: int) -> int:
    """The quadratic character mod 3: +1, -1, 0 for n = 1, 2, 0 mod 3."""
    r = n % 3
    return r if r < 2 else -1


def _divisors(n: int) -> list[int]:
    out = []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
    return out


def sigma(k: int, x) -> int:
    """Divisor-power sum sigma_k; 0 for any x that is not a positive integer.

    The zero convention makes expressions like sigma_1(n/3) meaningful for
    every n without case splits.
    """
    fx = as_fraction(x)
    if fx.denominator != 1 or fx <= 0:
        return 0
    n = fx.numerator
    return sum(d**k for d in _divisors(n))


def d_mod(j: int, k: int, n) -> int:
    """Count of positive divisors of n congruent to j mod k (0 off N)."""
    if not 0 <= j < k:
        raise ValueError("need 0 <= j < k")
    fn = as_fraction(n)
    if fn.denominator != 1 or fn <= 0:
        return 0
    return sum(1 for d in _divisors(fn.numerator) if d % k == j)


# -- eta and eta quotients ----------------------------------------------------------


def eta(m=1, order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """Dedekind eta at multiplier m: q^(m/24) * prod(1 - q^(m n)).

    The product is expanded factor by factor until further factors cannot
    touch exponents below `order`.
    """
    m = as_fraction(m)
    if m <= 0:
        raise ValueError("eta multiplier must be positive")
    pref = m / 24
    d = math.lcm(pref.denominator, m.denominator)
    sctx = series_context(d, 1)
    out = PiSeries.monomial(sctx, pref, 1, 0, order)
    n = 1
    while pref + m * n < order:
        out = out * PiSeries.from_exponent_map(sctx, 0, {0: 1, m * n: -1}, order)
        n += 1
    return _cast(out.truncate(order), ctx)


@dataclass(frozen=True)
class EtaQuotientSpec:
    """A finite product scalar * q^q_shift * prod eta(m_i tau)^e_i.

    Spec strings: factors `m^e` joined by `*`, m a positive rational (`3`,
    `1/3`), e a signed integer; an optional leading rational scalar and an
    optional `q^p/r` monomial. Examples: `1^9*3^-3` (the b-cube quotient),
    `27*3^9*1^-3` (the c-cube quotient; the q prefactor arises from the eta
    prefactors themselves).
    """

    factors: tuple[tuple[Fraction, int], ...]
    scalar: Fraction = Fraction(1)
    q_shift: Fraction = Fraction(0)

    def __post_init__(self):
        for m, _e in self.factors:
            if m <= 0:
                raise ValueError("eta multipliers must be positive")

    @property
    def prefactor_exponent(self) -> Fraction:
        """The exact leading exponent sum(m*e)/24 + q_shift."""
        return sum((m * e for m, e in self.factors), Fraction(0)) / 24 + self.q_shift

    @classmethod
    def parse(cls, text: str) -> "EtaQuotientSpec":
        factors: list[tuple[Fraction, int]] = []
        scalar = Fraction(1)
        q_shift = Fraction(0)
        if not text.strip():
            raise EtaSpecParseError("empty eta-quotient spec")
        for part in text.split("*"):
            part = part.strip()
            if not part:
                raise EtaSpecParseError(f"empty factor in {text!r}")
            try:
                if part == "q" or part.startswith("q^"):
                    q_shift += Fraction(part[2:]) if part != "q" else 1
                elif "^" in part:
                    mtxt, etxt = part.split("^", 1)
                    m = Fraction(mtxt)
                    e = int(etxt)
                    if m <= 0:
                        raise ValueError
                    factors.append((m, e))
                else:
                    value = Fraction(part)
                    if factors or q_shift:
                        raise EtaSpecParseError(
                            f"scalar {part!r} must lead the spec {text!r}"
                        )
                    scalar *= value
            except EtaSpecParseError:
                raise
            except (ValueError, ZeroDivisionError) as exc:
                raise EtaSpecParseError(f"bad factor {part!r} in {text!r}") from exc
        return cls(tuple(factors), scalar, q_shift)


def eta_quotient(
    spec: EtaQuotientSpec, order: int = 40, ctx: SeriesContext | None = None
) -> PiSeries:
    """Evaluate an eta quotient, with Laurent inversion for negative powers.

    Inverting a factor with positive leading exponent costs knowledge, so the
    constituents are computed with padding and the result is re-padded until
    the requested order is certified.
    """
    pad = sum(abs(e) * m for m, e in spec.factors) / 24 + 1
    lead = spec.prefactor_exponent
    if lead < 0:
        pad -= lead
    while True:
        inner = as_fraction(order) + pad
        out = PiSeries.monomial(_RATIONAL_CTX, 0, spec.scalar, 0, inner)
        if spec.q_shift:
            d = spec.q_shift.denominator
            out = out * PiSeries.monomial(series_context(d, 1), spec.q_shift, 1, 0, inner)
        for m, e in spec.factors:
            f = eta(m, inner)
            piece = f if e > 0 else f.invert()
            for _ in range(abs(e)):
                out = out * piece
        if out.known_order >= order:
            return _cast(out.truncate(order), ctx)
        pad *= 2


# -- Eisenstein series -----------------------------------------------------------------


_EISENSTEIN = {2: (1, -24), 4: (3, 240), 6: (5, -504)}


def eisenstein(k: int, m: int = 1, order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """E_k(q^m) for k in {2, 4, 6}: 1 + c_k * sum sigma_{k-1}(n) q^(m n)."""
    if k not in _EISENSTEIN:
        raise ValueError("Eisenstein weight must be 2, 4 or 6")
    power, c = _EISENSTEIN[k]
    terms = {0: rat(1)}
    n = 1
    while m * n < order:
        terms[m * n] = rat(c * sigma(power, n))
        n += 1
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


# -- the cubic theta series a(q) ----------------------------------------------------------


def a_lattice(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """a(q) by brute-force enumeration of the quadratic form m^2 + mn + n^2.

    For each n the exact m-window follows from the discriminant of the form
    in m; membership is still checked against the form value directly.
    """
    counts: dict[int, int] = {}
    nbound = math.isqrt((4 * order) // 3) + 2
    for n in range(-nbound, nbound + 1):
        disc = 4 * order - 3 * n * n
        if disc < 0:
            continue
        r = math.isqrt(disc) + 2
        m_lo = (-n - r) // 2 - 1
        m_hi = (-n + r) // 2 + 1
        for m in range(m_lo, m_hi + 1):
            v = m * m + m * n + n * n
            if v < order:
                counts[v] = counts.get(v, 0) + 1
    return _cast(PiSeries(_RATIONAL_CTX, 0, {e: rat(c) for e, c in counts.items()}, order), ctx)


def a_divisor(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """a(q) in divisor form: 1 + 6 sum (d_{1,3}(n) - d_{2,3}(n)) q^n."""
    terms = {0: rat(1)}
    for n in range(1, order):
        c = 6 * (d_mod(1, 3, n) - d_mod(2, 3, n))
        if c:
            terms[n] = rat(c)
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


def b_cubed_series(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """b^3(q) in divisor form: 1 - 9 sum q^n sum_{d|n} d^2 (d/3)."""
    terms = {0: rat(1)}
    for n in range(1, order):
        s = sum(d * d * legendre3(d) for d in _divisors(n))
        if s:
            terms[n] = rat(-9 * s)
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


def c_cubed_series(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """c^3(q) in divisor form: 27 sum q^n sum_{d|n} d^2 (n/d / 3)."""
    terms = {}
    for n in range(1, order):
        s = sum(d * d * legendre3(n // d) for d in _divisors(n))
        if s:
            terms[n] = rat(27 * s)
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


B_CUBED_ETA_SPEC = EtaQuotientSpec(((Fraction(1), 9), (Fraction(3), -3)))
C_CUBED_ETA_SPEC = EtaQuotientSpec(((Fraction(3), 9), (Fraction(1), -3)), scalar=Fraction(27))


# -- Lambert-series companions --------------------------------------------------------------


def huber_P_script(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """1 - 6 sum_n cos(2 n pi / 3) n q^n / (1 - q^n), expanded geometrically.

    cos(2 n pi / 3) is 1 for 3 | n and -1/2 otherwise, kept exact.
    """
    terms = {0: rat(1)}
    for n in range(1, order):
        c = rat(n) if n % 3 == 0 else rat(Fraction(-n, 2))
        c = -6 * c
        e = n
        while e < order:
            terms[e] = terms.get(e, rat(0)) + c
            e += n
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


def huber_P_cal(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """9 sum_n n (q^n + q^(2n)) / (1 - q^(3n)), expanded geometrically."""
    terms: dict[int, object] = {}
    for n in range(1, order):
        for start in (n, 2 * n):
            e = start
            while e < order:
                terms[e] = terms.get(e, rat(0)) + rat(9 * n)
                e += 3 * n
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


# -- divisor forms of products with a^2 ---------------------------------------------------------


def a_sq_b3_series(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """Divisor form of a^2 b^3: 1 + 3 sum q^n sum_{d|n} d^4 (d/3)."""
    terms = {0: rat(1)}
    for n in range(1, order):
        s = sum(d**4 * legendre3(d) for d in _divisors(n))
        if s:
            terms[n] = rat(3 * s)
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


def a_sq_c3_series(order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """Divisor form of a^2 c^3: 27 sum q^n sum_{d|n} d^4 (n/d / 3)."""
    terms = {}
    for n in range(1, order):
        s = sum(d**4 * legendre3(n // d) for d in _divisors(n))
        if s:
            terms[n] = rat(27 * s)
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


def a_power_closed_form(k: int, order: int = 40, ctx: SeriesContext | None = None) -> PiSeries:
    """Closed form of a(q)^k for k in 1..6 (divisor sums, plus one eta
    product in the k = 6 case), independent of convolution."""
    if k == 1:
        return a_divisor(order, ctx)
    if k == 3:
        return b_cubed_series(order, ctx) + c_cubed_series(order, ctx)
    if k == 5:
        return a_sq_b3_series(order, ctx) + a_sq_c3_series(order, ctx)
    terms = {0: rat(1)}
    if k == 2:
        for n in range(1, order):
            terms[n] = rat(12 * (sigma(1, n) - 3 * sigma(1, Fraction(n, 3))))
    elif k == 4:
        for n in range(1, order):
            terms[n] = rat(24 * (sigma(3, n) + 9 * sigma(3, Fraction(n, 3))))
    elif k == 6:
        for n in range(1, order):
            terms[n] = rat(
                Fraction(252, 13) * (sigma(5, n) - 27 * sigma(5, Fraction(n, 3)))
            )
        eta_part = eta_quotient(
            EtaQuotientSpec(((Fraction(1), 6), (Fraction(3), 6))), order
        ).scale(Fraction(216, 13))
        return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order) + eta_part, ctx)
    else:
        raise ValueError("closed forms exist for k in 1..6")
    return _cast(PiSeries(_RATIONAL_CTX, 0, terms, order), ctx)


def _cast(f: PiSeries, ctx: SeriesContext | None) -> PiSeries:
    if ctx is None or ctx == f.context:
        return f
    out, _ = unify(f, PiSeries.zero(ctx, f.pi_grade, f.known_order))
    return out
