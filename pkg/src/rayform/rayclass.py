"""Form classes over a ray modulus of an imaginary quadratic field.

The modulus is a nontrivial integral ideal n of the maximal order, with level
N the least positive integer it contains.  Among primitive positive definite
forms of the field discriminant, those with leading coefficient coprime to N
split into finitely many classes under a congruence-constrained unimodular
equivalence; the classes form a group isomorphic to the ray class group mod n,
with composition matching ideal multiplication.  Everything in this module is
exact integer or Fraction arithmetic.

Two independent routes to the same questions are kept side by side on
purpose: the witness-matrix equivalence test against the ideal-theoretic
`equivalent_oracle`, and the class enumeration against
`ray_class_number_oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .forms import (
    IDENT,
    QuadForm,
    UnimodMatrix,
    act,
    automorphs,
    coprime_normalize,
    omega,
    reduce,
    reduced_forms,
    t_power,
)
from .qfield import (
    Discriminant,
    FieldElement,
    IdealTriple,
    InternalCheckError,
    QFieldError,
    _egcd,
    canonicalize_ideal,
    crt2,
    ideal_product,
    is_mult_congruent_one,
    make_ideal_triple,
    make_lattice_basis,
    minimal_norm_elements,
    ray_class_number_oracle,
)

RowVec = tuple[int, int]


@dataclass(frozen=True)
class Modulus:
    disc: Discriminant
    ideal: IdealTriple

    @property
    def level(self) -> int:
        """N, the least positive rational integer in the ideal."""
        return self.ideal.c

    def cm_point(self) -> FieldElement:
        """(a1*tau + a2)/N, the upper half plane point attached to the ideal."""
        n = self.ideal
        return self.disc.element(Fraction(n.a1, n.c), Fraction(n.a2, n.c))


def make_modulus(disc: Discriminant, a1: int, a2: int, c: int) -> Modulus:
    ideal = make_ideal_triple(disc, a1, a2, c)
    if (a1, a2, c) == (1, 0, 1):
        raise QFieldError("modulus must be a proper ideal of the order")
    return Modulus(disc, ideal)


@dataclass(frozen=True)
class FormClass:
    """One class, tagged with the reduced-form index and row it came from."""

    rep: QuadForm
    base_index: int
    row: RowVec


@dataclass(frozen=True)
class ClassGroup:
    modulus: Modulus
    classes: tuple[FormClass, ...]
    table: tuple[tuple[int, ...], ...] | None = None
    invariant_factors: tuple[int, ...] | None = None


@dataclass(frozen=True)
class GaloisDescriptor:
    """Exact data describing the Galois action attached to a form class.

    eval_matrix composed with the point is where a torsion-point function
    gets evaluated; a_inv twists the function index, and the fixed twist
    marker records the extra inversion letter.
    """

    a_inv: int
    eval_matrix: tuple[tuple[int, int], tuple[int, int]]
    point: FieldElement
    twist: str = "S"


def _require_form(form: QuadForm, mod: Modulus) -> None:
    if form.a <= 0 or form.disc() >= 0:
        raise QFieldError(f"form {form} is not positive definite")
    if form.content() != 1:
        raise QFieldError(f"form {form} is not primitive")
    if form.disc() != mod.disc.d:
        raise QFieldError(
            f"form discriminant {form.disc()} does not match field {mod.disc.d}"
        )
    if math.gcd(form.a, mod.level) != 1:
        raise QFieldError(
            f"leading coefficient {form.a} shares a factor with level {mod.level}"
        )


def _half(n: int) -> int:
    if n % 2:
        raise InternalCheckError(f"{n} is odd where an even integer was forced")
    return n // 2


def canonical_offset(form: QuadForm, mod: Modulus) -> int:
    """The unique integer locating the product ideal's canonical basis.

    Congruent to a2 - a1*(b + b0)/2 mod N, divisible by a, and windowed so
    that 0 <= offset + a1*(b + b0)/2 < N*a.
    """
    _require_form(form, mod)
    n, N, a = mod.ideal, mod.level, form.a
    shift = n.a1 * _half(form.b + mod.disc.b0)
    base = crt2((n.a2 - shift) % N, N, 0, a)
    period = N * a
    return (base + shift) % period - shift


def product_basis(form: QuadForm, mod: Modulus) -> tuple[tuple[int, int], tuple[int, int]]:
    """Basis matrix [[a1, offset], [0, N*a]] of the modulus times the form's
    conjugate ideal, written over (-a*conj(omega), 1)."""
    off = canonical_offset(form, mod)
    return ((mod.ideal.a1, off), (0, mod.level * form.a))


def in_gamma_n(g: UnimodMatrix, mod: Modulus) -> bool:
    """Membership in the congruence subgroup attached to the modulus."""
    N, a1 = mod.level, mod.ideal.a1
    return (
        (g.p - 1) % N == 0
        and g.q % (N // a1) == 0
        and g.r % a1 == 0
        and (g.s - 1) % N == 0
    )


def t_normalize(g: UnimodMatrix, k: int, mod: Modulus) -> tuple[int, int]:
    """Shear exponents (m, n) with t^n * g * t^m in the congruence subgroup.

    Requires the bottom row to satisfy r = 0 mod a1 and s = 1 + k*r mod N.
    """
    N, a1 = mod.level, mod.ideal.a1
    if g.r % a1 or (g.s - 1 - k * g.r) % N:
        raise QFieldError(f"matrix {g} does not satisfy the witness congruence")
    m = -k
    sheared = g @ t_power(m)
    sub = N // a1
    if sub == 1:
        n = 0
    else:
        n = (-sheared.q * pow(sheared.s, -1, sub)) % sub
    result = t_power(n) @ g @ t_power(m)
    if not in_gamma_n(result, mod):
        raise InternalCheckError(f"shear normalization left the subgroup: {result}")
    return m, n


def _witness_slope(form: QuadForm, mod: Modulus) -> int:
    # k with the witness condition s = 1 + k*r mod N, built from the form
    n, N = mod.ideal, mod.level
    a_inv = pow(form.a, -1, N)
    return (a_inv * (n.a2 // n.a1 - _half(mod.disc.b0 - form.b))) % N


def _satisfies_witness(g: UnimodMatrix, form: QuadForm, mod: Modulus) -> bool:
    k = _witness_slope(form, mod)
    return g.r % mod.ideal.a1 == 0 and (g.s - 1 - k * g.r) % mod.level == 0


def equivalent(
    form1: QuadForm, form2: QuadForm, mod: Modulus
) -> UnimodMatrix | None:
    """Witness matrix alpha with form1 == act(form2, alpha) meeting the
    congruence conditions, or None when the classes differ.

    Candidates are the proper equivalences between the two forms, which all
    differ by an automorph; each is tested against the bottom-row congruence
    relative to form1.
    """
    _require_form(form1, mod)
    _require_form(form2, mod)
    red1, g1 = reduce(form1)
    red2, g2 = reduce(form2)
    if red1 != red2:
        return None
    gamma0 = g2.inv() @ g1
    for h in automorphs(form1):
        alpha = gamma0 @ h
        if _satisfies_witness(alpha, form1, mod):
            if act(form2, alpha) != form1:
                raise InternalCheckError("witness does not transport the form")
            return alpha
    return None


def _form_ideal(form: QuadForm, disc: Discriminant) -> IdealTriple:
    # the integral ideal [a*omega, a], norm a
    g1 = disc.element(1, _half(disc.b0 - form.b))
    g2 = disc.element(0, form.a)
    return canonicalize_ideal(make_lattice_basis(g1, g2))


def _form_ideal_conj(form: QuadForm, disc: Discriminant) -> IdealTriple:
    # the integral ideal [a*(-conj(omega)), a], norm a
    g1 = disc.element(1, _half(disc.b0 + form.b))
    g2 = disc.element(0, form.a)
    return canonicalize_ideal(make_lattice_basis(g1, g2))


def equivalent_oracle(form1: QuadForm, form2: QuadForm, mod: Modulus) -> bool:
    """Independent equivalence test straight from the ray class definition.

    Forms are sent to their upper-half-plane ideals, the quotient ideal is
    scaled to an integral ideal coprime to the modulus, and principality plus
    the multiplicative congruence of some generator is checked by minimal
    norm enumeration.  No witness matrices are involved.
    """
    _require_form(form1, mod)
    _require_form(form2, mod)
    disc = mod.disc
    quotient = ideal_product(
        _form_ideal(form1, disc), _form_ideal_conj(form2, disc)
    )
    generators = minimal_norm_elements(quotient.lattice())
    for gen in generators:
        candidate = gen / form1.a
        if is_mult_congruent_one(candidate, mod.ideal):
            return True
    return False


def decompose(
    alpha: UnimodMatrix, form: QuadForm, mod: Modulus
) -> tuple[int, UnimodMatrix, int]:
    """Split a witness as t^u * g * t^v with g in the congruence subgroup.

    The returned g additionally satisfies the bottom-row condition
    g.r*v + g.s = 1 + k*g.r mod N for the witness slope k of the form.
    """
    _require_form(form, mod)
    k = _witness_slope(form, mod)
    if not _satisfies_witness(alpha, form, mod):
        raise QFieldError("matrix does not satisfy the witness congruence")
    m, n = t_normalize(alpha, k, mod)
    g = t_power(n) @ alpha @ t_power(m)
    u, v = -n, -m
    if t_power(u) @ g @ t_power(v) != alpha:
        raise InternalCheckError("shear decomposition does not recompose")
    if (g.r * v + g.s - 1 - k * g.r) % mod.level:
        raise InternalCheckError("decomposition lost the bottom-row condition")
    return u, g, v


def witness_matrix(form: QuadForm, mod: Modulus, k: int, j: int) -> UnimodMatrix:
    """A matrix meeting the witness congruence for the form, parametrized by
    two free integers: k picks the bottom-left entry a1*k, j shears the top
    row.  Acting by its inverse yields a form in the same class.
    """
    _require_form(form, mod)
    N, a1 = mod.level, mod.ideal.a1
    r = a1 * k
    s0 = (1 + _witness_slope(form, mod) * r) % N
    s = None
    for m in range(0, 2 * abs(r) + N + 2):
        for cand in (s0 + N * m, s0 - N * m):
            if math.gcd(r, cand) == 1:
                s = cand
                break
        if s is not None:
            break
    if s is None:
        raise InternalCheckError(f"no coprime completion of bottom row ({r}, ...)")
    _, x, y = _egcd(s, r)
    g = UnimodMatrix(x + j * r, -y + j * s, r, s)
    if not _satisfies_witness(g, form, mod):
        raise InternalCheckError(f"constructed matrix {g} fails the congruence")
    return g


def class_translate(form: QuadForm, mod: Modulus, k: int, j: int) -> QuadForm | None:
    """A different representative of the form's class, or None when the
    parameters land outside the coprime-leading-coefficient domain."""
    g = witness_matrix(form, mod, k, j)
    moved = act(form, g.inv())
    if moved.a <= 0 or math.gcd(moved.a, mod.level) != 1:
        return None
    if equivalent(form, moved, mod) is None:
        raise InternalCheckError("translate left the class")
    return moved


def row_in_vq(form: QuadForm, row: RowVec, level: int) -> bool:
    """Whether the row (u, v) indexes an admissible torsion point for the form."""
    u, v = row
    return math.gcd(level, form(v, -u)) == 1


def unit_rows(disc: Discriminant) -> tuple[RowVec, ...]:
    """Coordinate rows (m, n) of the units m*tau + n of the order."""
    rows = [(0, 1), (0, -1)]
    if disc.d == -4:
        rows += [(1, 0), (-1, 0)]
    elif disc.d == -3:
        rows += [(1, 0), (-1, 0), (1, 1), (-1, -1)]
    return tuple(rows)


def _row_times(row: RowVec, m: tuple[tuple[int, int], tuple[int, int]]) -> RowVec:
    return (
        row[0] * m[0][0] + row[1] * m[1][0],
        row[0] * m[0][1] + row[1] * m[1][1],
    )


def rows_equivalent(form: QuadForm, row1: RowVec, row2: RowVec, mod: Modulus) -> bool:
    """Congruence identifying rows that give the same ray class.

    Both rows are pushed through the form's coordinate change; row2 may
    additionally be twisted by any unit of the order.  Equality is mod N in
    both components.
    """
    _require_form(form, mod)
    n, N = mod.ideal, mod.level
    b0, c0 = mod.disc.b0, mod.disc.c0
    e_mat = ((1, _half(b0 - form.b)), (0, form.a))
    f_mat = ((N // n.a1, -(n.a2 // n.a1)), (0, 1))
    left = _row_times(_row_times(row1, e_mat), f_mat)
    base = _row_times(row2, e_mat)
    for m, nn in unit_rows(mod.disc):
        u_mat = ((-m * b0 + nn, -m * c0), (m, nn))
        right = _row_times(_row_times(base, u_mat), f_mat)
        if (left[0] - right[0]) % N == 0 and (left[1] - right[1]) % N == 0:
            return True
    return False


def row_classes(form: QuadForm, mod: Modulus) -> tuple[RowVec, ...]:
    """Lexicographically least representatives of admissible rows up to the
    row congruence."""
    _require_form(form, mod)
    N = mod.level
    reps: list[RowVec] = []
    for u in range(N):
        for v in range(N):
            if not row_in_vq(form, (u, v), N):
                continue
            if not any(rows_equivalent(form, (u, v), r, mod) for r in reps):
                reps.append((u, v))
    return tuple(reps)


def lift_bottom_row(row: RowVec, level: int) -> UnimodMatrix:
    """A unimodular matrix whose bottom row is (u, v) mod the level.

    The lift adjusts (u, v) by multiples of the level to a coprime pair,
    preferring small shifts, then completes the row canonically.
    """
    u, v = row
    if math.gcd(math.gcd(u, v), level) != 1:
        raise QFieldError(f"row {row} is not unimodular mod {level}")
    for total in range(0, 2 * level + 3):
        for k in range(-total, total + 1):
            rem = total - abs(k)
            for l in sorted({-rem, rem}):
                r = u + k * level
                s = v + l * level
                if math.gcd(r, s) == 1:
                    _, x, y = _egcd(s, r)
                    return UnimodMatrix(x, -y, r, s)
    raise InternalCheckError(f"no coprime lift of {row} mod {level} within bound")


def enumerate_classes(mod: Modulus) -> ClassGroup:
    """All classes of the modulus, each as an explicit representative form.

    Walks the reduced forms, renormalizes leading coefficients against the
    level, splits the admissible rows into congruence classes and pulls each
    back through a lifted matrix.  The count is checked against the
    ideal-theoretic ray class number and the representatives are checked
    pairwise inequivalent, so a miscount cannot pass silently.
    """
    disc, N = mod.disc, mod.level
    reps: list[FormClass] = []
    for index, base in enumerate(reduced_forms(disc)):
        normalized, _ = coprime_normalize(base, N)
        for row in row_classes(normalized, mod):
            gamma = lift_bottom_row(row, N)
            rep = act(normalized, gamma.inv())
            reps.append(FormClass(rep, index, row))
    expected = ray_class_number_oracle(disc, mod.ideal)
    if len(reps) != expected:
        raise InternalCheckError(
            f"enumerated {len(reps)} classes, oracle says {expected}"
        )
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if equivalent(reps[i].rep, reps[j].rep, mod) is not None:
                raise InternalCheckError(
                    f"representatives {reps[i].rep} and {reps[j].rep} collide"
                )
    principal = QuadForm(1, disc.b0, disc.c0)
    identity = [fc for fc in reps if equivalent(fc.rep, principal, mod) is not None]
    if len(identity) != 1:
        raise InternalCheckError("identity class not found exactly once")
    rest = sorted(
        (fc for fc in reps if fc is not identity[0]),
        key=lambda fc: fc.rep.coeffs(),
    )
    return ClassGroup(mod, tuple(identity + rest))


def compose(form1: QuadForm, form2: QuadForm, mod: Modulus) -> QuadForm:
    """Class composition compatible with ideal multiplication.

    form2 is first moved inside its class so the two leading coefficients
    are coprime (and coprime to 2, N and the discriminant, which is stronger
    than needed but cheap); the middle coefficient is aligned by CRT; the
    correcting matrix comes from expressing 1 in the product ideal.
    """
    _require_form(form1, mod)
    _require_form(form2, mod)
    disc, N, d = mod.disc, mod.level, mod.disc.d
    a, b = form1.a, form1.b
    moved, gamma = coprime_normalize(form2, 2 * a * N * abs(d))
    a2, b2 = moved.a, moved.b
    if math.gcd(a, a2) != 1:
        raise InternalCheckError("leading coefficients not coprime after move")
    # B = b mod 2a, B = b2 mod 2a2; the strengthened move makes gcd(2a, 2a2) = 2
    t = (_half(b2 - b) * pow(a, -1, a2)) % a2
    big_b = (b + 2 * a * t) % (2 * a * a2)
    if (big_b - b) % (2 * a) or (big_b - b2) % (2 * a2):
        raise InternalCheckError("middle coefficient misses its congruences")
    if (big_b * big_b - d) % (4 * a * a2):
        raise InternalCheckError("middle coefficient square congruence failed")
    big_a = a * a2
    product = QuadForm(big_a, big_b, (big_b * big_b - d) // (4 * big_a))
    if product.content() != 1:
        raise InternalCheckError(f"composite form {product} is not primitive")
    # bottom row of the correcting matrix from 1 = x*nu1 + y*nu2
    cocycle = omega(moved, disc) * gamma.r + gamma.s
    nu = disc.element(Fraction(1, big_a), Fraction(disc.b0 - big_b, 2 * big_a))
    nu1 = nu / cocycle
    nu2 = disc.one() / cocycle
    det = nu1.u * nu2.v - nu1.v * nu2.u
    x = -nu2.u / det
    y = nu1.u / det
    if x.denominator != 1 or y.denominator != 1:
        raise InternalCheckError("unit expansion in the product ideal not integral")
    x, y = int(x), int(y)
    if math.gcd(math.gcd(x, y), N) != 1:
        raise InternalCheckError("unit expansion row not unimodular mod level")
    sigma = lift_bottom_row((x % N, y % N), N)
    result = act(product, sigma.inv())
    if math.gcd(result.a, N) != 1 or result.content() != 1 or result.a <= 0:
        raise InternalCheckError(f"composite representative {result} is invalid")
    return result


def _class_index(form: QuadForm, group: ClassGroup) -> int:
    for idx, fc in enumerate(group.classes):
        if equivalent(form, fc.rep, group.modulus) is not None:
            return idx
    raise InternalCheckError(f"form {form} matches no enumerated class")


def _cyclic_order(table, identity: int, g: int) -> int:
    k, x = 1, g
    while x != identity:
        x = table[x][g]
        k += 1
    return k


def _invariant_factors(table: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    """Invariant factors of an abelian group given by its full table,
    ascending, each dividing the next."""
    size = len(table)
    elements = list(range(size))
    identity = next(e for e in elements if all(table[e][x] == x for x in elements))
    factors: list[int] = []
    # peel off a maximal-order cyclic factor until the group is trivial
    while size > 1:
        orders = {e: _cyclic_order(table, identity, e) for e in elements}
        exponent = max(orders.values())
        gen = min(e for e in elements if orders[e] == exponent)
        cyclic = [identity]
        x = gen
        while x != identity:
            cyclic.append(x)
            x = table[x][gen]
        cosets: dict[int, int] = {}
        labels: list[int] = []
        for e in elements:
            members = sorted(table[e][h] for h in cyclic)
            key = members[0]
            if key not in cosets:
                cosets[key] = len(labels)
                labels.append(key)
            cosets[e] = cosets[key]
        quotient_size = size // exponent
        if len(labels) != quotient_size:
            raise InternalCheckError("coset count does not match index")
        new_table = tuple(
            tuple(cosets[table[labels[i]][labels[j]]] for j in range(quotient_size))
            for i in range(quotient_size)
        )
        factors.append(exponent)
        table, size, elements = new_table, quotient_size, list(range(quotient_size))
        identity = next(e for e in elements if all(table[e][x] == x for x in elements))
    for small, large in zip(factors[1:], factors):
        if large % small:
            raise InternalCheckError("invariant factors fail divisibility")
    return tuple(reversed(factors))


def group_table(mod: Modulus) -> ClassGroup:
    """Enumerate the classes and fill in the full composition table plus the
    invariant factor decomposition."""
    group = enumerate_classes(mod)
    size = len(group.classes)
    table = []
    for i in range(size):
        row = []
        for j in range(size):
            composite = compose(group.classes[i].rep, group.classes[j].rep, mod)
            row.append(_class_index(composite, group))
        table.append(tuple(row))
    table = tuple(table)
    for j in range(size):
        if table[0][j] != j:
            raise InternalCheckError("identity row is not the identity permutation")
    for i in range(size):
        if sorted(table[i]) != list(range(size)):
            raise InternalCheckError("table row is not a permutation")
        for j in range(size):
            if table[i][j] != table[j][i]:
                raise InternalCheckError("composition table is not commutative")
    return ClassGroup(mod, group.classes, table, _invariant_factors(table))


def descriptor(form: QuadForm, mod: Modulus) -> GaloisDescriptor:
    """Exact Galois-action data of the class of the form: the twisted index,
    the evaluation matrix, and the conjugate root as base point."""
    _require_form(form, mod)
    N, a = mod.level, form.a
    off = canonical_offset(form, mod)
    if off % a:
        raise InternalCheckError("offset not divisible by the leading coefficient")
    point = mod.disc.element(
        Fraction(1, a), Fraction(mod.disc.b0 + form.b, 2 * a)
    )
    return GaloisDescriptor(
        a_inv=pow(a, -1, N),
        eval_matrix=((mod.ideal.a1, off // a), (0, N)),
        point=point,
    )


def class_group_to_json(group: ClassGroup) -> dict:
    data = {
        "dK": group.modulus.disc.d,
        "ideal": str(group.modulus.ideal),
        "classes": [
            {"a": fc.rep.a, "b": fc.rep.b, "c": fc.rep.c} for fc in group.classes
        ],
        "table": [list(row) for row in group.table] if group.table else None,
        "invariant_factors": list(group.invariant_factors)
        if group.invariant_factors is not None
        else None,
    }
    return data
