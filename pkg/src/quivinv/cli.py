"""Command-line front end.

Subcommands: validate, derive, generators, bpf, verify.  Inputs and outputs
are the JSON documents of the library modules; stdout carries a short human
summary and --out the machine-readable report.  Every run is deterministic
given its inputs, flags and seed, and every report embeds its configuration.

Exit codes: 0 success, 1 domain violation or failed check, 2 parse error,
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .field import FieldError, Mat, field_from_spec
from .generators import BudgetError, bpf_generators, sigma_generators
from .poly import Polynomial, PolyMatrix, parse_polynomial
from .quiver import (
    SettingError,
    derived_to_json,
    double_setting,
    is_normalized,
    load_setting,
    loop_setting,
    normalize_setting,
    path_matrix,
    reduce_setting,
    setting_to_json,
    validate,
)
from .tableau import TableauError, block_embedding_sign, bpf, tableau_from_json
from .verify import Report, check_invariance

OK, DOMAIN_ERROR, PARSE_ERROR, BUDGET_ERROR = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _write_json(doc: dict, path: str | None):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (json.JSONDecodeError, OSError) as exc:
        raise CliError(f"cannot read {path}: {exc}", PARSE_ERROR) from exc


def _load_setting(path: str):
    doc = _load_json(path)
    try:
        from .quiver import setting_from_json

        return setting_from_json(doc)
    except (KeyError, TypeError) as exc:
        raise CliError(f"bad setting document {path}: {exc}", PARSE_ERROR) from exc
    except SettingError as exc:
        raise CliError(f"invalid setting {path}: {exc}", DOMAIN_ERROR) from exc


def cmd_validate(args) -> int:
    setting = _load_setting(args.setting)
    violations = validate(setting, characteristic=args.characteristic)
    if not violations:
        print(f"{args.setting}: valid mixed quiver setting "
              f"({setting.vertices} vertices, {len(setting.quiver.arrows)} arrows)")
        return OK
    for v in violations:
        print(str(v))
    return DOMAIN_ERROR


def cmd_derive(args) -> int:
    setting = _load_setting(args.setting)
    builders = {
        "normalize": normalize_setting,
        "double": double_setting,
        "loop": loop_setting,
        "reduce": reduce_setting,
    }
    try:
        derived = builders[args.what](setting)
    except SettingError as exc:
        raise CliError(str(exc), DOMAIN_ERROR) from exc
    doc = derived_to_json(derived)
    _write_json(doc, args.out)
    added = [a.name for a in derived.setting.quiver.arrows if a.name not in {b.name for b in setting.quiver.arrows}]
    print(f"{args.what}: {derived.setting.vertices} vertices, "
          f"{len(derived.setting.quiver.arrows)} arrows (added: {', '.join(added) if added else 'none'})")
    if args.out:
        print(f"wrote {args.out}")
    return OK


def _auto_normalize(setting):
    if is_normalized(setting):
        return setting, ()
    derived = normalize_setting(setting)
    return derived.setting, derived.twins


def cmd_generators(args) -> int:
    setting = _load_setting(args.setting)
    try:
        field = field_from_spec(args.field)
    except FieldError as exc:
        raise CliError(str(exc), PARSE_ERROR) from exc
    try:
        working, twins = _auto_normalize(setting)
        sigmas = sigma_generators(working, args.max_path_len, max_generators=args.budget)
        bpfs = bpf_generators(
            working,
            max_weight=args.max_weight,
            max_path_len=args.max_path_len,
            max_cells=args.max_cells,
            budget=args.budget,
        )
    except BudgetError as exc:
        raise CliError(str(exc), BUDGET_ERROR) from exc
    except SettingError as exc:
        raise CliError(str(exc), DOMAIN_ERROR) from exc
    descriptors = sigmas + bpfs
    report = Report(field=field.name, seed=args.seed, trials=args.trials)
    for idx, desc in enumerate(descriptors):
        name = f"{desc.kind}[{idx}]"
        sub = check_invariance(working, desc.polynomial, trials=args.trials, seed=args.seed + idx, field=field, name=name)
        report.add(sub.checks[0])
    doc = {
        "config": {
            "seed": args.seed,
            "field": field.name,
            "trials": args.trials,
            "max_path_len": args.max_path_len,
            "max_weight": args.max_weight,
            "max_cells": args.max_cells,
            "budget": args.budget,
        },
        "setting": setting_to_json(setting),
        "normalization": {"twins": [list(p) for p in twins]},
        "generators": {
            "sigma": [d.to_json() for d in sigmas],
            "bpf": [d.to_json() for d in bpfs],
        },
        "verification": report.to_json(),
    }
    _write_json(doc, args.out)
    dup = sum(1 for d in descriptors if d.duplicate_of is not None)
    print(
        f"{len(sigmas)} sigma generators, {len(bpfs)} tableau generators "
        f"({dup} flagged duplicates); verification "
        f"{'passed' if report.ok else 'FAILED'} over {field.name}"
    )
    if args.out:
        print(f"wrote {args.out}")
    if args.figures:
        _render_figures(args.figures, setting, descriptors, doc["verification"]["checks"])
        print(f"figures in {args.figures}")
    return OK if report.ok else DOMAIN_ERROR


def _render_figures(directory, setting, descriptors, checks):
    from . import figures

    os.makedirs(directory, exist_ok=True)
    figures.render_setting(setting, os.path.join(directory, "setting.png"))
    figures.render_generator_degrees(descriptors, os.path.join(directory, "generators_by_degree.png"))
    figures.render_verification_summary(checks, os.path.join(directory, "verification.png"))
    figures.write_generator_csv(descriptors, os.path.join(directory, "generators.csv"))


def _matrix_from_json(rows) -> PolyMatrix:
    grid = []
    for row in rows:
        out = []
        for value in row:
            out.append(Polynomial.constant(Fraction(str(value))))
        grid.append(out)
    return PolyMatrix(grid)


def cmd_bpf(args) -> int:
    doc = _load_json(args.tableau)
    try:
        tab, weight, paths = tableau_from_json(doc)
    except (KeyError, TypeError) as exc:
        raise CliError(f"bad tableau document: {exc}", PARSE_ERROR) from exc
    except TableauError as exc:
        raise CliError(str(exc), DOMAIN_ERROR) from exc
    mats: dict = {}
    for sub in doc.get("substitution", ()):
        lbl = sub["label"]
        if "matrix" in sub:
            mats[lbl] = _matrix_from_json(sub["matrix"])
    if paths:
        if not args.setting:
            raise CliError("tableau uses path substitutions; pass --setting", DOMAIN_ERROR)
        setting = _load_setting(args.setting)
        source = double_setting(setting) if args.double else setting
        try:
            for lbl, path in paths.items():
                mats[lbl] = path_matrix(source, path)
        except SettingError as exc:
            raise CliError(str(exc), DOMAIN_ERROR) from exc
    try:
        ordered = [mats[lbl] for lbl in range(1, tab.label_count + 1)]
    except KeyError as exc:
        raise CliError(f"missing substitution for label {exc}", PARSE_ERROR) from exc
    try:
        value = bpf(tab, ordered)
        sign = block_embedding_sign(tab, ordered)
    except TableauError as exc:
        raise CliError(str(exc), DOMAIN_ERROR) from exc
    text = str(value)
    print(text)
    print(f"embedding sign: {'+1' if sign > 0 else '-1'}")
    _write_json({"polynomial": text, "sign": sign, "columns": list(tab.columns)}, args.out)
    return OK


def _polynomials_from_document(doc) -> list:
    polys = []
    if "polynomials" in doc:
        for text in doc["polynomials"]:
            polys.append(("poly", parse_polynomial(text)))
    elif "generators" in doc:
        for kind in ("sigma", "bpf"):
            for idx, desc in enumerate(doc["generators"].get(kind, [])):
                if "polynomial" in desc:
                    polys.append((f"{kind}[{idx}]", parse_polynomial(desc["polynomial"])))
    else:
        raise CliError("expected a 'polynomials' list or a generator report", PARSE_ERROR)
    return polys


def cmd_verify(args) -> int:
    setting = _load_setting(args.setting)
    try:
        field = field_from_spec(args.field)
    except FieldError as exc:
        raise CliError(str(exc), PARSE_ERROR) from exc
    doc = _load_json(args.polys)
    try:
        polys = _polynomials_from_document(doc)
    except ValueError as exc:
        raise CliError(f"bad polynomial text: {exc}", PARSE_ERROR) from exc
    report = Report(field=field.name, seed=args.seed, trials=args.trials)
    for idx, (name, f) in enumerate(polys):
        label = name if name != "poly" else f"poly[{idx}]"
        sub = check_invariance(setting, f, trials=args.trials, seed=args.seed + idx, field=field, name=label)
        report.add(sub.checks[0])
    _write_json(report.to_json(), args.out)
    for c in report.checks:
        print(f"{c.name}: {'ok' if c.ok else 'FAIL'}")
    print(f"verification {'passed' if report.ok else 'FAILED'} "
          f"({len(report.checks)} checks, {args.trials} trials, {field.name}, seed {args.seed})")
    if args.out:
        print(f"wrote {args.out}")
    return OK if report.ok else DOMAIN_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quivinv",
        description="Exact invariants of mixed quiver settings: validation, derived settings, generators, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the compatibility conditions of a setting")
    p.add_argument("setting")
    p.add_argument("--characteristic", type=int, default=0, help="field characteristic for condition b)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("derive", help="build a derived setting with its substitution table")
    p.add_argument("setting")
    p.add_argument("--what", choices=("normalize", "double", "loop", "reduce"), required=True)
    p.add_argument("--out", help="write the derived setting JSON here")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("generators", help="enumerate bounded generator families and verify them")
    p.add_argument("setting")
    p.add_argument("--max-path-len", type=int, default=2)
    p.add_argument("--max-weight", type=int, default=1)
    p.add_argument("--max-cells", type=int, default=6)
    p.add_argument("--budget", type=int, default=200_000)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--field", default="rational")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the generator report JSON here")
    p.add_argument("--figures", help="directory for rendered figures and the CSV table")
    p.set_defaults(func=cmd_generators)

    p = sub.add_parser("bpf", help="evaluate a tableau's block pfaffian")
    p.add_argument("tableau")
    p.add_argument("--setting", help="setting providing path substitutions")
    p.add_argument("--double", action="store_true", help="resolve paths in the double of the setting")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bpf)

    p = sub.add_parser("verify", help="randomized exact invariance checks")
    p.add_argument("setting")
    p.add_argument("polys", help="polynomials file or generator report")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--field", default="rational")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BUDGET_ERROR
    except (SettingError, TableauError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
