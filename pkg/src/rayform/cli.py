"""Command line front end.

Subcommands map one-to-one onto engine operations; all output goes to
stdout as JSON by default or as aligned text with --format text.  Exit
status: 0 success, 2 invalid input, 3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

import mpmath

from . import modular
from .forms import QuadForm, act, parse_form, reduce, reduced_forms
from .qfield import (
    Discriminant,
    InternalCheckError,
    QFieldError,
    canonicalize_ideal,
    element_to_json,
    make_discriminant,
    make_lattice_basis,
    parse_ideal_triple,
    ray_class_number_oracle,
)
from .rayclass import (
    Modulus,
    class_group_to_json,
    class_translate,
    compose,
    descriptor,
    enumerate_classes,
    equivalent,
    equivalent_oracle,
    group_table,
    make_modulus,
)

_VERIFY_SEED = 911


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rayform",
        description="Exact form-class arithmetic over ray moduli, with numeric checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ideal=True):
        p.add_argument("--dk", type=int, required=True, help="fundamental discriminant")
        if ideal:
            p.add_argument("--ideal", help="modulus as canonical triple a1,a2,N")
            p.add_argument(
                "--ideal-gens",
                help="modulus as two generators 'u1,v1;u2,v2' in coordinates over (tau, 1)",
            )
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("reduced", help="reduced forms of the discriminant")
    common(p, ideal=False)

    p = sub.add_parser("enumerate", help="all classes of the modulus")
    common(p)

    p = sub.add_parser("table", help="classes, composition table, invariant factors")
    common(p)

    p = sub.add_parser("equiv", help="test two forms for class equality, both routes")
    common(p)
    p.add_argument("--form", action="append", required=True, help="form as a,b,c (twice)")

    p = sub.add_parser("compose", help="compose the classes of two forms")
    common(p)
    p.add_argument("--form", action="append", required=True, help="form as a,b,c (twice)")

    p = sub.add_parser("descriptor", help="exact Galois-action data of a form's class")
    common(p)
    p.add_argument("--form", required=True, help="form as a,b,c")

    p = sub.add_parser("eval", help="numeric value of a form's descriptor")
    common(p)
    p.add_argument("--form", required=True, help="form as a,b,c")
    p.add_argument("--index", type=int, default=None, help="function index 1, 2 or 3")
    p.add_argument("--digits", type=int, default=None)

    p = sub.add_parser("verify", help="run the property suite for one modulus")
    common(p)
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--tolerance-exponent", type=int, default=None)

    p = sub.add_parser("oracle", help="ray class number by the index formula")
    common(p)

    return parser


def _digits(args) -> int:
    if getattr(args, "digits", None):
        return args.digits
    env = os.environ.get("RAYFORM_DIGITS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise QFieldError(f"RAYFORM_DIGITS={env!r} is not an integer") from exc
    return 80


def _modulus(args, disc: Discriminant) -> Modulus:
    if getattr(args, "ideal", None) and getattr(args, "ideal_gens", None):
        raise QFieldError("give either --ideal or --ideal-gens, not both")
    if getattr(args, "ideal", None):
        t = parse_ideal_triple(disc, args.ideal)
    elif getattr(args, "ideal_gens", None):
        try:
            pairs = [tuple(int(x) for x in part.split(",")) for part in args.ideal_gens.split(";")]
            (u1, v1), (u2, v2) = pairs
        except ValueError as exc:
            raise QFieldError(
                f"expected --ideal-gens 'u1,v1;u2,v2', got {args.ideal_gens!r}"
            ) from exc
        t = canonicalize_ideal(make_lattice_basis(disc.element(u1, v1), disc.element(u2, v2)))
    else:
        raise QFieldError("a modulus is required: --ideal or --ideal-gens")
    return make_modulus(disc, t.a1, t.a2, t.c)


def _two_forms(args) -> tuple[QuadForm, QuadForm]:
    if len(args.form) != 2:
        raise QFieldError("exactly two --form arguments are required")
    return parse_form(args.form[0]), parse_form(args.form[1])


def _form_json(form: QuadForm) -> dict:
    return {"a": form.a, "b": form.b, "c": form.c}


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines():
            print(line)


def _cmd_reduced(args) -> int:
    disc = make_discriminant(args.dk)
    forms = reduced_forms(disc)
    payload = {"dK": disc.d, "forms": [_form_json(f) for f in forms]}
    _emit(args, payload, lambda: [str(f) for f in forms])
    return 0


def _group_text(group) -> list[str]:
    lines = ["classes:"]
    for idx, fc in enumerate(group.classes):
        lines.append(f"  {idx}: {fc.rep}")
    if group.table is not None:
        lines.append("table:")
        width = len(str(len(group.classes) - 1))
        for row in group.table:
            lines.append("  " + " ".join(f"{x:>{width}}" for x in row))
    if group.invariant_factors is not None:
        lines.append(
            "invariant factors: " + " ".join(str(x) for x in group.invariant_factors)
        )
    return lines


def _cmd_enumerate(args) -> int:
    disc = make_discriminant(args.dk)
    group = enumerate_classes(_modulus(args, disc))
    _emit(args, class_group_to_json(group), lambda: _group_text(group))
    return 0


def _cmd_table(args) -> int:
    disc = make_discriminant(args.dk)
    group = group_table(_modulus(args, disc))
    _emit(args, class_group_to_json(group), lambda: _group_text(group))
    return 0


def _cmd_equiv(args) -> int:
    disc = make_discriminant(args.dk)
    mod = _modulus(args, disc)
    f1, f2 = _two_forms(args)
    witness = equivalent(f1, f2, mod)
    oracle = equivalent_oracle(f1, f2, mod)
    if (witness is not None) != oracle:
        raise InternalCheckError(
            f"equivalence routes disagree on {f1} vs {f2}: "
            f"witness={witness is not None}, ideal route={oracle}"
        )
    payload = {"equivalent": oracle}
    if witness is not None:
        payload["witness"] = [list(r) for r in witness.rows()]
    _emit(
        args,
        payload,
        lambda: [f"equivalent: {str(oracle).lower()}"]
        + ([f"witness: {witness.rows()}"] if witness is not None else []),
    )
    return 0


def _cmd_compose(args) -> int:
    disc = make_discriminant(args.dk)
    mod = _modulus(args, disc)
    f1, f2 = _two_forms(args)
    result = compose(f1, f2, mod)
    _emit(args, {"form": _form_json(result)}, lambda: [str(result)])
    return 0


def _descriptor_json(d) -> dict:
    return {
        "a_inv": d.a_inv,
        "eval_matrix": [list(d.eval_matrix[0]), list(d.eval_matrix[1])],
        "point": element_to_json(d.point),
        "twist": d.twist,
    }


def _cmd_descriptor(args) -> int:
    disc = make_discriminant(args.dk)
    mod = _modulus(args, disc)
    d = descriptor(parse_form(args.form), mod)
    _emit(
        args,
        _descriptor_json(d),
        lambda: [
            f"a_inv: {d.a_inv}",
            f"eval_matrix: {d.eval_matrix}",
            f"point: {d.point.u}*tau + {d.point.v}",
            f"twist: {d.twist}",
        ],
    )
    return 0


def _cmd_eval(args) -> int:
    disc = make_discriminant(args.dk)
    mod = _modulus(args, disc)
    d = descriptor(parse_form(args.form), mod)
    p = modular.Precision(_digits(args))
    index = args.index if args.index is not None else modular.weber_index(disc)
    value = modular.eval_descriptor(d, index, p)
    label = modular.FrickeLabel(index, 0, d.a_inv, mod.level)
    payload = {"label": str(label), "value": modular.complex_to_json(value, p)}
    _emit(
        args,
        payload,
        lambda: [f"label: {label}", f"value: {payload['value']['re']} + {payload['value']['im']}*i"],
    )
    return 0


def _cmd_oracle(args) -> int:
    disc = make_discriminant(args.dk)
    mod = _modulus(args, disc)
    count = ray_class_number_oracle(disc, mod.ideal)
    _emit(args, {"ray_class_number": count}, lambda: [str(count)])
    return 0


def _translates(form, mod, rng, want: int) -> list[QuadForm]:
    out = []
    while len(out) < want:
        moved = class_translate(form, mod, rng.randrange(-6, 7), rng.randrange(-4, 5))
        if moved is not None:
            out.append(moved)
    return out


def _cmd_verify(args) -> int:
    disc = make_discriminant(args.dk)
    mod = _modulus(args, disc)
    digits = _digits(args)
    tol_exp = args.tolerance_exponent or digits // 2
    p = modular.Precision(digits)
    tol = Fraction(10) ** -tol_exp
    rng = random.Random(_VERIFY_SEED)
    checks = []

    def record(name: str, passed: bool, detail: str):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    group = group_table(mod)
    expected = ray_class_number_oracle(disc, mod.ideal)
    record(
        "class count vs ideal-theoretic oracle",
        len(group.classes) == expected,
        f"{len(group.classes)} classes, oracle {expected}",
    )

    reps = [fc.rep for fc in group.classes]
    agree = 0
    trials = 0
    for i, f1 in enumerate(reps):
        for f2 in reps[i:]:
            trials += 1
            if (equivalent(f1, f2, mod) is not None) == equivalent_oracle(f1, f2, mod):
                agree += 1
    for rep in reps:
        for moved in _translates(rep, mod, rng, 2):
            trials += 1
            if (equivalent(rep, moved, mod) is not None) and equivalent_oracle(
                rep, moved, mod
            ):
                agree += 1
    record(
        "witness equivalence vs ideal route",
        agree == trials,
        f"{agree}/{trials} pairs agree",
    )

    def class_index(form) -> int:
        for idx, fc in enumerate(group.classes):
            if equivalent(form, fc.rep, mod) is not None:
                return idx
        return -1

    stable = 0
    comp_trials = 0
    for _ in range(10):
        i = rng.randrange(len(reps))
        j = rng.randrange(len(reps))
        moved_i = _translates(reps[i], mod, rng, 1)[0]
        moved_j = _translates(reps[j], mod, rng, 1)[0]
        comp_trials += 1
        if class_index(compose(moved_i, moved_j, mod)) == group.table[i][j]:
            stable += 1
    record(
        "composition is class-level well-defined",
        stable == comp_trials,
        f"{stable}/{comp_trials} translate trials match the table",
    )

    worst = Fraction(0)

    def track(residual):
        nonlocal worst
        r = Fraction(str(residual))
        if r > worst:
            worst = r

    ratio_ok = True
    for _ in range(5):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.4, 1.4))
        level = rng.randrange(2, 8)
        row = (rng.randrange(level), rng.randrange(1, level))
        f1 = modular.fricke(modular.FrickeLabel(1, row[0], row[1], level), tau, p)
        f2 = modular.fricke(modular.FrickeLabel(2, row[0], row[1], level), tau, p)
        f3 = modular.fricke(modular.FrickeLabel(3, row[0], row[1], level), tau, p)
        jv = modular.eisenstein_j(tau, p)
        if abs(jv) < 1e-5 or abs(jv - 1728) < 1e-5:
            continue
        r2 = abs(f2 - 46656 * f1**2 / (jv - 1728))
        r3 = abs(f3 - 80621568 * f1**3 / (jv * (jv - 1728)))
        track(r2)
        track(r3)
        if Fraction(str(r2)) > tol or Fraction(str(r3)) > tol:
            ratio_ok = False
    record("power relations between the three indexed values", ratio_ok, f"worst residual {float(worst):.3e}")

    law_ok = True
    worst = Fraction(0)
    hp = mpmath.ctx_mp.MPContext()
    hp.dps = digits + 10
    for _ in range(5):
        tau = hp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.4, 1.4))
        level = rng.randrange(2, 8)
        row = (rng.randrange(level), rng.randrange(1, level))
        g = modular.reduce_to_fundamental(complex(rng.uniform(-2, 2), rng.uniform(0.2, 2)))[1]
        label = modular.FrickeLabel(1, row[0], row[1], level)
        moved_label = modular.FrickeLabel(
            1, row[0] * g.p + row[1] * g.r, row[0] * g.q + row[1] * g.s, level
        )
        num = (g.p * tau + g.q) / (g.r * tau + g.s)
        resid = abs(modular.fricke(label, num, p) - modular.fricke(moved_label, tau, p))
        track(resid)
        if Fraction(str(resid)) > tol:
            law_ok = False
    record("row transformation law", law_ok, f"worst residual {float(worst):.3e}")

    xi = mod.cm_point()
    direct = modular.weber(disc.one(), mod.ideal.lattice(), p)
    via_label = modular.eval_descriptor(
        descriptor(QuadForm(1, disc.b0, disc.c0), mod), None, p
    )
    resid = abs(direct - via_label)
    record(
        "identity-class value equals the unit-normalized lattice value",
        Fraction(str(resid)) <= tol,
        f"residual {float(resid):.3e} at xi = ({xi.u})*tau + ({xi.v})",
    )

    inv_ok = True
    worst = Fraction(0)
    for fc in group.classes:
        base = modular.eval_descriptor(descriptor(fc.rep, mod), None, p)
        for moved in _translates(fc.rep, mod, rng, 2):
            resid = abs(base - modular.eval_descriptor(descriptor(moved, mod), None, p))
            track(resid)
            if Fraction(str(resid)) > tol:
                inv_ok = False
    record("descriptor value constant on classes", inv_ok, f"worst residual {float(worst):.3e}")

    two_ok = True
    worst = Fraction(0)
    for fc in group.classes:
        d = descriptor(fc.rep, mod)
        resid = abs(
            modular.eval_descriptor(d, None, p)
            - modular.eval_descriptor_unreduced(d, None, p)
        )
        track(resid)
        if Fraction(str(resid)) > tol:
            two_ok = False
    record("descriptor route vs unreduced route", two_ok, f"worst residual {float(worst):.3e}")

    passed = all(c["passed"] for c in checks)
    payload = {"dK": disc.d, "ideal": str(mod.ideal), "passed": passed, "checks": checks}
    _emit(
        args,
        payload,
        lambda: [
            f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail']}"
            for c in checks
        ]
        + [f"overall: {'PASS' if passed else 'FAIL'}"],
    )
    return 0 if passed else 3


_HANDLERS = {
    "reduced": _cmd_reduced,
    "enumerate": _cmd_enumerate,
    "table": _cmd_table,
    "equiv": _cmd_equiv,
    "compose": _cmd_compose,
    "descriptor": _cmd_descriptor,
    "eval": _cmd_eval,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except QFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
