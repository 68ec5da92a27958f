"""Arbitrary-precision evaluation of the classical modular quantities.

Everything is computed through q-series on the upper half plane: the
Eisenstein series of weights 4 and 6, the discriminant combination, j, the
Weierstrass pe-function, the indexed division-value functions built from pe
(here "torsion-value functions"), and the unit-group-normalized pe value
attached to a fractional ideal.  The pi powers cancel out of every exposed
weight-zero combination, so all results come from E4, E6 and the pe sum
alone; the series are truncated at an explicit tail threshold.

No global precision state: each public function builds a private mpmath
context from the Precision it was handed, and contexts never leak.  Complex
results are mpmath mpc values; they are exchangeable across contexts.

Normalization is pinned at import by two self-checks, j(i) = 1728 and
j(rho) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .forms import IDENT, S_FLIP, UnimodMatrix, t_power
from .qfield import (
    Discriminant,
    FieldElement,
    InternalCheckError,
    LatticeBasis,
    QFieldError,
    mobius,
)
from .rayclass import GaloisDescriptor

_MAX_TERMS = 200000


@dataclass(frozen=True)
class Precision:
    """Working precision: decimal digits plus the series tail threshold.

    tail_cutoff None means 10^-(digits+20).  An explicit cutoff must not be
    looser than 10^-(digits+10), or the tail would pollute the result.
    """

    digits: int = 80
    tail_cutoff: float | Fraction | None = None

    def __post_init__(self):
        if self.digits < 30:
            raise QFieldError(f"need at least 30 digits, got {self.digits}")
        if self.tail_cutoff is not None:
            cut = Fraction(self.tail_cutoff)
            if not 0 < cut <= Fraction(10) ** -(self.digits + 10):
                raise QFieldError(
                    f"tail cutoff {self.tail_cutoff} too loose for {self.digits} digits"
                )


def _ctx(p: Precision) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.ctx_mp.MPContext()
    ctx.dps = p.digits + 10
    return ctx


def _cutoff(ctx, p: Precision):
    if p.tail_cutoff is None:
        return ctx.mpf(10) ** -(p.digits + 20)
    cut = Fraction(p.tail_cutoff)
    return ctx.mpf(cut.numerator) / cut.denominator


def _fr(ctx, x: Fraction):
    return ctx.mpf(x.numerator) / x.denominator


def _embed(ctx, x: FieldElement):
    """Numeric image of u*tau + v under the upper-half-plane embedding."""
    d = x.disc
    tau = (ctx.mpc(-d.b0, ctx.sqrt(-d.d))) / 2
    return tau * _fr(ctx, x.u) + _fr(ctx, x.v)


def _ensure_finite(ctx, value):
    for part in (value.real, value.imag):
        if ctx.isnan(part) or ctx.isinf(part):
            raise InternalCheckError("non-finite value escaped a series evaluation")
    return value


@dataclass(frozen=True)
class FrickeLabel:
    """Index (i, [r/N, s/N]) of a torsion-value function of level N.

    The row is stored reduced to [0, N)^2 and must not be integral.
    """

    i: int
    r: int
    s: int
    level: int

    def __post_init__(self):
        if self.i not in (1, 2, 3):
            raise QFieldError(f"function index must be 1, 2 or 3, got {self.i}")
        if self.level < 1:
            raise QFieldError(f"level must be positive, got {self.level}")
        object.__setattr__(self, "r", self.r % self.level)
        object.__setattr__(self, "s", self.s % self.level)
        if self.r == 0 and self.s == 0:
            raise QFieldError("row (0, 0) mod N indexes no torsion point")

    def row(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.r, self.level), Fraction(self.s, self.level)

    def __str__(self) -> str:
        return f"{self.i}:{self.r},{self.s},{self.level}"


def parse_fricke_label(text: str) -> FrickeLabel:
    try:
        head, tail = text.split(":")
        r, s, level = (int(x) for x in tail.split(","))
        return FrickeLabel(int(head), r, s, level)
    except ValueError as exc:
        raise QFieldError(f"expected 'i:r,s,N', got {text!r}") from exc


def _sigma(n: int, k: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**k
            if d != n // d:
                total += (n // d) ** k
        d += 1
    return total


def _eisenstein(ctx, q, weight: int, cutoff):
    # E4 = 1 + 240 sum sigma3(n) q^n;  E6 = 1 - 504 sum sigma5(n) q^n
    coeff, power = (240, 3) if weight == 4 else (-504, 5)
    total = ctx.mpf(1)
    qn = ctx.mpc(1)
    aq = abs(q)
    for n in range(1, _MAX_TERMS):
        qn *= q
        total += coeff * _sigma(n, power) * qn
        # sigma_k(n) <= n^(k+1); bound the whole remaining tail crudely
        if abs(coeff) * ctx.mpf(n) ** (power + 1) * aq**n / (1 - aq) < cutoff:
            return total
    raise InternalCheckError("Eisenstein series did not reach the tail cutoff")


def _wp_sum(ctx, x, y, tau, cutoff):
    """The pi-free pe series at z = x*tau + y, with x, y in [-1/2, 1/2].

    Returns S with pe(z; [tau, 1]) = -4 pi^2 S.
    """
    q = ctx.exp(2j * ctx.pi * tau)
    w = ctx.exp(2j * ctx.pi * (x * tau + y))
    total = ctx.mpf(1) / 12 + w / (1 - w) ** 2
    qn = ctx.mpc(1)
    aq = abs(q)
    winv = 1 / w
    for n in range(1, _MAX_TERMS):
        qn *= q
        total += qn * w / (1 - qn * w) ** 2
        total += qn * winv / (1 - qn * winv) ** 2
        total -= 2 * qn / (1 - qn) ** 2
        # |w| lies between |q|^(1/2) and |q|^(-1/2)
        bound = 4 * aq ** (n + ctx.mpf(1) / 2) / (1 - aq) ** 3
        if bound < cutoff:
            return total
    raise InternalCheckError("pe series did not reach the tail cutoff")


def _reduce_tau(ctx, t):
    if t.imag <= 0:
        raise QFieldError("point is not in the upper half plane")
    edge = 1 - ctx.mpf(10) ** -(ctx.dps - 5)
    g = IDENT
    for _ in range(10000):
        shift = int(ctx.nint(t.real))
        if shift:
            t = t - shift
            g = g @ t_power(shift)
        if abs(t) < edge:
            t = -1 / t
            g = g @ S_FLIP
        else:
            return t, g
    raise InternalCheckError("fundamental domain reduction did not terminate")


def reduce_to_fundamental(tau, p: Precision = Precision()):
    """Move tau into |Re| <= 1/2, |tau| >= 1; returns (tau0, g) with
    tau = g(tau0) and g an exact unimodular matrix."""
    ctx = _ctx(p)
    return _reduce_tau(ctx, ctx.mpc(tau))


def _combo(ctx, i: int, s_val, e4, e6):
    """Weight-zero combination number i; pi powers cancel by construction."""
    dd = e4**3 - e6**2
    if i == 1:
        return -2 * e4 * e6 * s_val / (3 * dd)
    if i == 2:
        return 12 * e4**2 * s_val**2 / dd
    return -8 * e6 * s_val**3 / dd


def _torsion_value(ctx, i: int, v1: Fraction, v2: Fraction, tau0, cutoff):
    # v1, v2 are exact; shift into [-1/2, 1/2] before embedding
    r1 = v1 - round(v1)
    r2 = v2 - round(v2)
    if r1 == 0 and r2 == 0:
        raise QFieldError("row is integral: the point sits on the lattice")
    q = ctx.exp(2j * ctx.pi * tau0)
    e4 = _eisenstein(ctx, q, 4, cutoff)
    e6 = _eisenstein(ctx, q, 6, cutoff)
    s_val = _wp_sum(ctx, _fr(ctx, r1), _fr(ctx, r2), tau0, cutoff)
    return _ensure_finite(ctx, ctx.mpc(_combo(ctx, i, s_val, e4, e6)))


def eisenstein_j(tau, p: Precision = Precision()):
    """The j-invariant of [tau, 1], via E4 and E6 after domain reduction."""
    ctx = _ctx(p)
    t0, _ = _reduce_tau(ctx, ctx.mpc(tau))
    cutoff = _cutoff(ctx, p)
    q = ctx.exp(2j * ctx.pi * t0)
    e4 = _eisenstein(ctx, q, 4, cutoff)
    e6 = _eisenstein(ctx, q, 6, cutoff)
    return _ensure_finite(ctx, ctx.mpc(1728 * e4**3 / (e4**3 - e6**2)))


def wp(z, tau, p: Precision = Precision()):
    """Weierstrass pe of z relative to [tau, 1], z reduced into the
    fundamental cell first."""
    ctx = _ctx(p)
    t = ctx.mpc(tau)
    if t.imag <= 0:
        raise QFieldError("lattice parameter is not in the upper half plane")
    zz = ctx.mpc(z)
    x = zz.imag / t.imag
    y = zz.real - x * t.real
    x -= ctx.nint(x)
    y -= ctx.nint(y)
    tol = ctx.mpf(10) ** -(p.digits // 2)
    if abs(x) < tol and abs(y) < tol:
        raise QFieldError("z is too close to a lattice point")
    s_val = _wp_sum(ctx, x, y, t, _cutoff(ctx, p))
    return _ensure_finite(ctx, -4 * ctx.pi**2 * s_val)


def fricke(label: FrickeLabel, tau, p: Precision = Precision()):
    """The indexed torsion-value function at tau.

    tau is reduced to the fundamental domain and the row index is pushed
    through the same matrix, so the series always run on a fat lattice.
    """
    ctx = _ctx(p)
    t0, g = _reduce_tau(ctx, ctx.mpc(tau))
    v1, v2 = label.row()
    w1 = v1 * g.p + v2 * g.r
    w2 = v1 * g.q + v2 * g.s
    return _torsion_value(ctx, label.i, w1, w2, t0, _cutoff(ctx, p))


def _basis_pair(basis) -> tuple[FieldElement, FieldElement]:
    if isinstance(basis, LatticeBasis):
        return basis.g1, basis.g2
    g1, g2 = basis
    return g1, g2


def weber_index(disc: Discriminant) -> int:
    """Exponent attached to the unit group: half its order."""
    if disc.d == -4:
        return 2
    if disc.d == -3:
        return 3
    return 1


def weber(z, basis, p: Precision = Precision()):
    """Unit-normalized pe value of z relative to the lattice of the basis.

    Scale invariance reduces everything to a [tau, 1] lattice with tau in
    the fundamental domain; the case split on the discriminant picks the
    exponent killing the extra units.
    """
    g1, g2 = _basis_pair(basis)
    if g1.disc != g2.disc:
        raise QFieldError("basis elements from different fields")
    ratio = g1 / g2
    if not ratio.in_upper_half_plane():
        g1, g2 = g2, g1
        ratio = g1 / g2
        if not ratio.in_upper_half_plane():
            raise QFieldError("basis is degenerate")
    ctx = _ctx(p)
    if isinstance(z, FieldElement):
        z_scaled = _embed(ctx, z / g2)
    else:
        z_scaled = ctx.mpc(z) / _embed(ctx, g2)
    t0, g = _reduce_tau(ctx, _embed(ctx, ratio))
    # [ratio, 1] = (1/(r*t0+s)) [t0, 1], and the value has weight zero
    z_final = (g.r * t0 + g.s) * z_scaled
    x = z_final.imag / t0.imag
    y = z_final.real - x * t0.real
    x -= ctx.nint(x)
    y -= ctx.nint(y)
    tol = ctx.mpf(10) ** -(p.digits // 2)
    if abs(x) < tol and abs(y) < tol:
        raise QFieldError("z is too close to a lattice point")
    cutoff = _cutoff(ctx, p)
    q = ctx.exp(2j * ctx.pi * t0)
    e4 = _eisenstein(ctx, q, 4, cutoff)
    e6 = _eisenstein(ctx, q, 6, cutoff)
    s_val = _wp_sum(ctx, x, y, t0, cutoff)
    i = weber_index(g1.disc)
    return _ensure_finite(ctx, ctx.mpc(_combo(ctx, i, s_val, e4, e6)))


def _totient(n: int) -> int:
    result = 1
    m = n
    f = 2
    while f * f <= m:
        if m % f == 0:
            power = 1
            while m % f == 0:
                m //= f
                power *= f
            result *= power - power // f
        f += 1
    if m > 1:
        result *= m - 1
    return result


def _descriptor_index(desc: GaloisDescriptor, i) -> int:
    """The function index may arrive bare, as a base label with row (1, 0)
    at the descriptor's level, or not at all (unit-group default)."""
    if i is None:
        return weber_index(desc.point.disc)
    if isinstance(i, FrickeLabel):
        level = desc.eval_matrix[1][1]
        if (i.r, i.s) != (1, 0) or i.level != level:
            raise QFieldError(
                f"base label must be row (1, 0) at level {level}, got {i}"
            )
        return i.i
    return i


def eval_descriptor(desc: GaloisDescriptor, i=None, p: Precision = Precision()):
    """Numeric value attached to a descriptor: the torsion-value function
    with twisted row [0, a_inv/N] at the matrix image of the base point.

    i is an index, a base label carrying one, or None for half the unit
    group order, the index for which this value is a class invariant.
    """
    i = _descriptor_index(desc, i)
    level = desc.eval_matrix[1][1]
    label = FrickeLabel(i, 0, desc.a_inv, level)
    point = mobius(desc.eval_matrix, desc.point)
    ctx = _ctx(p)
    return fricke(label, _embed(ctx, point), p)


def eval_descriptor_unreduced(desc: GaloisDescriptor, i=None, p: Precision = Precision()):
    """Same value along the unreduced route: row numerator a^(phi(N)-1) and
    the matrix scaled by a, exactly as the product-ideal basis hands them
    over.  Agreement with eval_descriptor is a checkable identity, not a
    private shortcut; keep the two code paths separate.
    """
    i = _descriptor_index(desc, i)
    level = desc.eval_matrix[1][1]
    a = Fraction(1) / desc.point.u
    if a.denominator != 1:
        raise InternalCheckError("descriptor point does not determine the form leader")
    a = int(a)
    (a1, dq_over_a), _ = desc.eval_matrix
    scaled = ((a1 * a, dq_over_a * a), (0, level * a))
    point = mobius(scaled, desc.point)
    v2 = Fraction(a ** (_totient(level) - 1), level)
    ctx = _ctx(p)
    t0, g = _reduce_tau(ctx, _embed(ctx, point))
    w1 = v2 * g.r
    w2 = v2 * g.s
    return _torsion_value(ctx, i, w1, w2, t0, _cutoff(ctx, p))


def complex_to_json(value, p: Precision = Precision()) -> dict:
    ctx = _ctx(p)
    v = ctx.mpc(value)
    return {
        "re": ctx.nstr(v.real, p.digits, strip_zeros=False),
        "im": ctx.nstr(v.imag, p.digits, strip_zeros=False),
    }


def _startup_check():
    p = Precision(30)
    ctx = _ctx(p)
    square = eisenstein_j(ctx.mpc(0, 1), p)
    if abs(square - 1728) > ctx.mpf(10) ** -25:
        raise InternalCheckError(f"normalization self-test failed: j(i) = {square}")
    hexagonal = eisenstein_j(ctx.mpc(-1, ctx.sqrt(3)) / 2, p)
    if abs(hexagonal) > ctx.mpf(10) ** -25:
        raise InternalCheckError(f"normalization self-test failed: j(rho) = {hexagonal}")


_startup_check()
