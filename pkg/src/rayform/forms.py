"""Integral binary quadratic forms under the unimodular right action.

A form (a, b, c) acts through Q^g(x, y) = Q(px + qy, rx + sy); the package
only ever works with primitive positive definite forms.  Reduction follows
the classical normalize-then-swap loop and reports a witness matrix, so the
caller can chain witnesses instead of re-deriving them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .qfield import (
    Discriminant,
    FieldElement,
    InternalCheckError,
    QFieldError,
    _egcd,
    mobius,
)


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self) -> int:
        return math.gcd(math.gcd(abs(self.a), abs(self.b)), abs(self.c))

    def coeffs(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return -a < b <= a <= c and not (a == c and b < 0)

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c}"


def make_form(a: int, b: int, c: int) -> QuadForm:
    """Validated constructor: primitive and positive definite."""
    form = QuadForm(a, b, c)
    if a <= 0 or form.disc() >= 0:
        raise QFieldError(f"form ({a},{b},{c}) is not positive definite")
    if form.content() != 1:
        raise QFieldError(f"form ({a},{b},{c}) is not primitive")
    return form


def parse_form(text: str) -> QuadForm:
    parts = text.split(",")
    if len(parts) != 3:
        raise QFieldError(f"expected 'a,b,c', got {text!r}")
    try:
        a, b, c = (int(p) for p in parts)
    except ValueError as exc:
        raise QFieldError(f"non-integer form {text!r}") from exc
    return make_form(a, b, c)


def form_to_json(form: QuadForm) -> dict:
    return {"a": form.a, "b": form.b, "c": form.c}


@dataclass(frozen=True)
class UnimodMatrix:
    """Element of SL2(Z), rows (p, q) and (r, s)."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise QFieldError(
                f"matrix [[{self.p},{self.q}],[{self.r},{self.s}]] has determinant != 1"
            )

    def __matmul__(self, other: "UnimodMatrix") -> "UnimodMatrix":
        return UnimodMatrix(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def inv(self) -> "UnimodMatrix":
        return UnimodMatrix(self.s, -self.q, -self.r, self.p)

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.p, self.q), (self.r, self.s))

    def entry_bound(self) -> int:
        return max(abs(self.p), abs(self.q), abs(self.r), abs(self.s))

    def apply(self, z: FieldElement) -> FieldElement:
        return mobius(self.rows(), z)


IDENT = UnimodMatrix(1, 0, 0, 1)
NEG_IDENT = UnimodMatrix(-1, 0, 0, -1)
S_FLIP = UnimodMatrix(0, -1, 1, 0)


def t_power(k: int) -> UnimodMatrix:
    return UnimodMatrix(1, k, 0, 1)


def act(form: QuadForm, g: UnimodMatrix) -> QuadForm:
    """Right action Q^g; satisfies act(act(Q, g), h) == act(Q, g @ h)."""
    a, b, c = form.a, form.b, form.c
    p, q, r, s = g.p, g.q, g.r, g.s
    return QuadForm(
        form(p, r),
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        form(q, s),
    )


def omega(form: QuadForm, disc: Discriminant) -> FieldElement:
    """Upper half plane root of Q(x, 1), as an exact field element."""
    if form.disc() != disc.d:
        raise QFieldError(
            f"form discriminant {form.disc()} does not match field {disc.d}"
        )
    if form.a <= 0:
        raise QFieldError("form must be positive definite")
    return disc.element(
        Fraction(1, form.a), Fraction(disc.b0 - form.b, 2 * form.a)
    )


def reduce(form: QuadForm) -> tuple[QuadForm, UnimodMatrix]:
    """Gauss reduction with witness: returns (R, g) with form == act(R, g)."""
    if form.a <= 0 or form.disc() >= 0:
        raise QFieldError(f"cannot reduce indefinite or negative form {form}")
    current, trail = form, IDENT
    for _ in range(10000):
        a, b, c = current.a, current.b, current.c
        if current.is_reduced():
            return current, trail.inv()
        if b <= -a or b > a:
            step = t_power((a - b) // (2 * a))
        else:
            step = S_FLIP
        current = act(current, step)
        trail = trail @ step
    raise InternalCheckError(f"reduction did not terminate for {form}")


def reduced_forms(disc: Discriminant) -> tuple[QuadForm, ...]:
    """All primitive reduced forms of the discriminant, sorted by (a, b, c)."""
    d = disc.d
    found = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if math.gcd(math.gcd(a, abs(b)), c) == 1:
                found.append(QuadForm(a, b, c))
        a += 1
    return tuple(sorted(found, key=QuadForm.coeffs))


def automorphs(form: QuadForm) -> tuple[UnimodMatrix, ...]:
    """The stabilizer of the form inside SL2(Z).

    Plus and minus identity except over discriminants -3 and -4, where the
    extra units of the order show up.  The special cases are found by brute
    force on the reduced form (entries up to 2 suffice there) and conjugated
    back along the reduction witness.
    """
    reduced, g = reduce(form)
    d = form.disc()
    if d not in (-3, -4):
        return (IDENT, NEG_IDENT)
    stab = []
    for p in range(-2, 3):
        for q in range(-2, 3):
            for r in range(-2, 3):
                for s in range(-2, 3):
                    if p * s - q * r != 1:
                        continue
                    h = UnimodMatrix(p, q, r, s)
                    if act(reduced, h) == reduced:
                        stab.append(h)
    expected = 6 if d == -3 else 4
    if len(stab) != expected:
        raise InternalCheckError(
            f"automorph count {len(stab)} for {form}, expected {expected}"
        )
    ginv = g.inv()
    conj = [ginv @ h @ g for h in stab]
    return tuple(sorted(conj, key=lambda m: (m.p, m.q, m.r, m.s)))


def coprime_normalize(form: QuadForm, modulus: int) -> tuple[QuadForm, UnimodMatrix]:
    """A form in the same proper class whose leading coefficient is coprime
    to the given modulus, together with the witness: returns (Q', g) with
    Q' == act(Q, g).

    The primitive vector becoming the first column of g is the first hit in
    a deterministic ring search; when the form already qualifies the witness
    is the identity.
    """
    if modulus <= 0:
        raise QFieldError(f"modulus must be positive, got {modulus}")
    if math.gcd(form.a, modulus) == 1:
        return form, IDENT
    for ring in range(1, 2 * modulus + 3):
        for x in range(-ring, ring + 1):
            for y in range(-ring, ring + 1):
                if max(abs(x), abs(y)) != ring:
                    continue
                if math.gcd(x, y) != 1:
                    continue
                if math.gcd(form(x, y), modulus) != 1:
                    continue
                # complete (x, y) to the first column of a unimodular matrix
                _, inv_x, inv_y = _egcd(x, y)
                g = UnimodMatrix(x, -inv_y, y, inv_x)
                result = act(form, g)
                if math.gcd(result.a, modulus) != 1:
                    raise InternalCheckError("normalized leading coefficient not coprime")
                return result, g
    raise InternalCheckError(
        f"no primitive value of {form} coprime to {modulus} within search bound"
    )
