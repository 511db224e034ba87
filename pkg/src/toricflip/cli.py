"""Command line driver.

Every subcommand reads one fan document (a file argument, or standard input
when the argument is missing or ``-``) and prints either a short human
readable summary or, with ``--json``, one JSON object.

Exit status: 0 pass, 1 usage or parse error, 2 violation, 3 not applicable.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from . import io
from . import lattice as lat
from .contraction import (Contraction, d_invariant, length, minus,
                          mld_in_exceptional_locus, relative_picard_rank, relative_positivity,
                          anticanonical_intersections, check_length_bound)
from .errors import (CatalogError, DegenerateHeights, NotApplicable, NotDContraction,
                     NotLogCanonical, NotRCartier, ParseError, ToricError)
from .fan import Fan, make_cone, validate, validate_refinement
from .flip import check_lemma, check_monotonicity, d_flip, validate_qflip
from .lab import catalog as cat
from .lab.checks import check_borisov, check_conj_mineq, check_conj_mld
from .lab.fuzz import fuzz_instance
from .report import NOT_APPLICABLE, PASS, VIOLATION, CheckReport, _jsonable
from .toricpair import ToricPair, mld

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_NA = 0, 1, 2, 3
EXIT_FOR = {PASS: EXIT_OK, VIOLATION: EXIT_VIOLATION, NOT_APPLICABLE: EXIT_NA}

PRECONDITION = (NotApplicable, NotDContraction, NotRCartier, NotLogCanonical, DegenerateHeights)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; 2 means violation here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# -- input -------------------------------------------------------------------


def _read(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(args):
    """(document, parsed object), after validating every fan involved."""
    doc = io.loads(_read(args.file))
    obj = io.from_dict(doc)
    diags = _diagnostics(obj)
    if diags:
        raise ParseError("invalid fan: " + "; ".join(diags))
    return doc, obj


def _diagnostics(obj) -> list:
    if isinstance(obj, Contraction):
        diags = validate_refinement(obj.refinement)
        pair = obj.pair
    elif isinstance(obj, ToricPair):
        diags, pair = validate(obj.fan), obj
    else:
        diags, pair = validate(obj), None
    if pair is not None and not diags and not pair.is_boundary:
        diags.append("boundary coefficients must lie in [0, 1]")
    return diags


def _pair(obj) -> ToricPair:
    if isinstance(obj, Contraction):
        return obj.pair
    if isinstance(obj, ToricPair):
        return obj
    return ToricPair(obj)


def _contraction(obj) -> Contraction:
    if not isinstance(obj, Contraction):
        raise UsageError("this command needs a document with a coarse fan")
    return obj


def _fan(obj) -> Fan:
    return _pair(obj).fan


def _cone(text: str):
    try:
        return make_cone(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"cone must be a list of ray indices, got {text!r}") from None


def _divisor(text, doc: dict, c: Contraction, default_log: bool = True):
    """--divisor value: K, K+B, or rationals separated by commas or spaces."""
    fine = c.fine
    if text is None:
        found = io.divisor_from_dict(doc, fine)
        if found is not None:
            return found
        return c.pair.k_plus_b if default_log else None
    key = text.replace(" ", "").upper()
    if key == "K":
        return tuple(lat.parse_rational(-1) for _ in fine.rays)
    if key == "K+B":
        return c.pair.k_plus_b
    parts = text.replace(",", " ").split()
    if len(parts) != len(fine.rays):
        raise UsageError(f"divisor needs {len(fine.rays)} coefficients, got {len(parts)}")
    try:
        return tuple(lat.parse_rational(p) for p in parts)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad divisor coefficient: {exc}") from None


# -- output ------------------------------------------------------------------


def _emit_json(payload: dict):
    print(json.dumps(dict(_jsonable(payload), schema=io.SCHEMA), sort_keys=True,
                     separators=(",", ":")))


def _fmt(x) -> str:
    j = _jsonable(x)
    if isinstance(j, list):
        return " ".join(_fmt(v) for v in x) if not any(isinstance(v, (list, tuple)) for v in x) \
            else ", ".join("(" + _fmt(v) + ")" for v in x)
    return str(j)


def _report(args, report: CheckReport, doc=None) -> int:
    if doc is not None and not report.fingerprint:
        report.fingerprint = io.fingerprint(doc)
    if args.json:
        _emit_json(report.to_dict())
    else:
        print(f"{report.check}: {report.verdict}")
        for k, v in report.values.items():
            print(f"  {k}: {_fmt(v) if not isinstance(v, dict) else json.dumps(_jsonable(v))}")
        for w in report.witnesses:
            print(f"  witness: {json.dumps(_jsonable(w))}")
        for note in report.notes:
            print(f"  note: {note}")
    return EXIT_FOR[report.verdict]


def _lines(args, payload: dict, lines: list) -> int:
    if args.json:
        _emit_json(payload)
    else:
        print("\n".join(lines))
    return EXIT_OK


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = io.loads(_read(args.file))
    try:
        obj = io.from_dict(doc)
        diags = _diagnostics(obj)
    except ParseError:
        raise
    except ToricError as exc:
        diags = [str(exc)]
    kind = type(obj).__name__ if not diags else None
    if args.json:
        _emit_json({"valid": not diags, "diagnostics": diags, "kind": kind})
    else:
        print(f"valid {kind}" if not diags else "invalid")
        for d in diags:
            print(f"  {d}")
    return EXIT_VIOLATION if diags else EXIT_OK


def _point_centers(obj):
    if isinstance(obj, Contraction):
        ref = obj.refinement
        n = obj.n
        centers = [t for t in obj.fine.all_cones
                   if t and obj.coarse.cone_dim(ref.coarse_cone_of(t)) == n]
        minimal = [t for t in centers if not any(set(o) < set(t) for o in centers)]
        return minimal, False
    fan = _fan(obj)
    full = [c for c in fan.cones if fan.cone_dim(c) == fan.dim]
    if not full:
        raise NotApplicable("the fan has no torus fixed point")
    return full, True


def cmd_mld(args) -> int:
    doc, obj = _load(args)
    pair = _pair(obj)
    if args.exceptional:
        value, witness = mld_in_exceptional_locus(_contraction(obj))
        if witness is None:
            raise NotApplicable("empty exceptional locus")
        where = "E"
    elif args.cone is not None:
        cone = _cone(args.cone)
        value, witness = mld(pair, [cone], exact=True)
        where = f"V{list(cone)}"
    else:
        centers, exact = _point_centers(obj)
        if not centers:
            raise NotApplicable("no cone lies over a torus fixed point of the base")
        value, witness = mld(pair, centers, exact=exact)
        where = "point"
    return _lines(args, {"mld": value, "witness": witness, "center": where},
                  [lat.format_rational(value), f"witness: {_fmt(witness)}"])


def cmd_contract(args) -> int:
    doc, obj = _load(args)
    c = _contraction(obj)
    e = c.exceptional_locus
    d_min, d_max, pure = d_invariant(c)
    out = {"n": c.n, "small": c.is_small, "components": list(e.components),
           "codims": list(e.codims), "d_min": d_min, "d_max": d_max, "pure": pure,
           "picard_rank": relative_picard_rank(c)}
    try:
        out["minus_k_plus_b"] = relative_positivity(c, minus(c.pair.k_plus_b))
    except NotRCartier:
        out["minus_k_plus_b"] = "not R-Cartier"
    if not e.is_empty and c.pair.is_log_canonical:
        out["a"], out["a_witness"] = mld_in_exceptional_locus(c)
    kind = "isomorphism" if e.is_empty else ("small" if c.is_small else "divisorial")
    lines = [f"{kind} contraction in dimension {c.n}, relative Picard rank {out['picard_rank']}",
             f"exceptional locus: {_fmt(out['components']) or '-'}",
             f"d: {_fmt(d_min)}..{_fmt(d_max)}{' (pure)' if pure else ''}",
             f"-(K+B) over Z: {out['minus_k_plus_b']}"]
    if "a" in out:
        lines.append(f"a(X, B, E): {_fmt(out['a'])} at {_fmt(out['a_witness'])}")
    return _lines(args, out, lines)


def cmd_length(args) -> int:
    doc, obj = _load(args)
    c = _contraction(obj)
    value = length(c)
    walls = [(list(w), x) for w, x in anticanonical_intersections(c)]
    report = check_length_bound(c)
    out = {"l": value, "walls": walls, "bound": report.verdict}
    lines = [lat.format_rational(value)]
    if args.verbose:
        lines += [f"  wall {_fmt(w)}: {_fmt(x)}" for w, x in walls]
    _lines(args, out, lines)
    return EXIT_VIOLATION if report.verdict == VIOLATION else EXIT_OK


def _flip(args):
    doc, obj = _load(args)
    c = _contraction(obj)
    D = _divisor(args.divisor, doc, c)
    return doc, c, d_flip(c, D)


def cmd_flip(args) -> int:
    doc, c, rec = _flip(args)
    if args.emit:
        print(io.dumps(io.contraction_to_dict(rec.target, rec.D_plus)))
        return EXIT_OK
    problems = validate_qflip(rec)
    ok = not any(problems.values())
    if args.json:
        _emit_json(dict(io.record_to_dict(rec), diagnostics=problems))
    else:
        t = rec.target.fine
        print("trivial: -D is numerically trivial over Z" if rec.trivial else
              f"flip: {len(t.rays)} rays, {len(t.cones)} maximal cones"
              f"{' (tie broken by pulling)' if rec.non_unique else ''}")
        print(f"rays: {_fmt(t.rays)}")
        print(f"cones: {_fmt(t.cones)}")
        print(f"D+: {_fmt(rec.D_plus)}")
        print(f"transform of E: {_fmt(rec.transform_E) or '-'}")
        print(f"c+: {_fmt(rec.c_plus_min)}..{_fmt(rec.c_plus_max)}")
        for k, v in problems.items():
            for p in v:
                print(f"  {k}: {p}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_check_lemma(args) -> int:
    doc, c, rec = _flip(args)
    return _report(args, check_lemma(rec), doc)


def cmd_check_monotonicity(args) -> int:
    doc, c, rec = _flip(args)
    bound = lat.parse_rational(args.bound) if args.bound is not None else None
    return _report(args, check_monotonicity(rec, bound), doc)


def cmd_check_conj_mld(args) -> int:
    doc, obj = _load(args)
    pair = _pair(obj)
    if args.cone is not None:
        return _report(args, check_conj_mld(pair, _cone(args.cone)), doc)
    reports = {t: check_conj_mld(pair, t) for t in pair.fan.all_cones if t}
    verdicts = [r.verdict for r in reports.values()]
    verdict = VIOLATION if VIOLATION in verdicts else PASS if PASS in verdicts else NOT_APPLICABLE
    values = {" ".join(map(str, t)): f"{r.verdict} (mld {_fmt(r.values['mld'])})"
              if "mld" in r.values else r.verdict for t, r in reports.items()}
    witnesses = [dict(w, cone=list(t)) for t, r in reports.items() for w in r.witnesses]
    notes = sorted({n for r in reports.values() for n in r.notes})
    return _report(args, CheckReport("conj_mld", verdict, values, witnesses, notes=notes), doc)


def cmd_check_conj_mineq(args) -> int:
    doc, obj = _load(args)
    c = _contraction(obj)
    D = _divisor(args.divisor, doc, c, default_log=False)
    return _report(args, check_conj_mineq(c, D), doc)


def cmd_check_borisov(args) -> int:
    doc, obj = _load(args)
    fan = _contraction(obj).coarse if isinstance(obj, Contraction) else _fan(obj)
    return _report(args, check_borisov(fan), doc)


def cmd_catalog(args) -> int:
    if args.name == "list":
        print("\n".join(cat.NAMES))
        return EXIT_OK
    entry = cat.catalog(args.name, *args.params)
    c = entry.contraction
    if args.emit:
        print(io.dumps(io.contraction_to_dict(c, entry.flip_divisor)))
        return EXIT_OK
    out = {"name": entry.name, "parameters": list(entry.parameters),
           "expected": entry.expected, "provenance": entry.provenance,
           "flip_divisor": entry.flip_divisor}
    lines = [f"{entry.name}{tuple(entry.parameters) if entry.parameters else ''}"]
    lines += [f"  {k} = {_fmt(v)}  [{entry.provenance.get(k, '')}]"
              for k, v in entry.expected.items()]
    return _lines(args, out, lines)


def cmd_fuzz(args) -> int:
    if not 2 <= args.n <= 5:
        raise UsageError("--n must lie between 2 and 5")
    work = partial(fuzz_instance, args.n, args.seed, budget=args.budget)
    status = EXIT_OK
    if args.jobs > 1:
        pool = ProcessPoolExecutor(args.jobs)
        stream = pool.map(work, range(args.count), chunksize=4)
    else:
        pool = None
        stream = map(work, range(args.count))
    try:
        for report in stream:
            _emit_json(report.to_dict())
            sys.stdout.flush()
            if report.verdict == VIOLATION:
                status = EXIT_VIOLATION
                if not args.keep_going:
                    break
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return status


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toricflip", description="Exact toric contractions, flips and mld checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_text, document=True):
        s = sub.add_parser(name, help=help_text, description=help_text)
        if document:
            s.add_argument("file", nargs="?", help="fan document (default: standard input)")
        s.add_argument("--json", action="store_true", help="machine readable output")
        s.set_defaults(func=func)
        return s

    command("validate", cmd_validate, "diagnose a fan document")
    s = command("mld", cmd_mld, "minimal log discrepancy")
    where = s.add_mutually_exclusive_group()
    where.add_argument("--point", action="store_true",
                       help="over the torus fixed point(s) of the base (default)")
    where.add_argument("--cone", help="at the generic point of V(cone), e.g. 0,1")
    where.add_argument("--exceptional", action="store_true", help="over the exceptional locus")
    command("contract", cmd_contract, "exceptional locus, d, Picard rank and positivity")
    s = command("length", cmd_length, "minimal -(K+B).C over contracted curves")
    s.add_argument("-v", "--verbose", action="store_true", help="list every wall")
    for name, func, text in (("flip", cmd_flip, "compute the D-flip"),
                             ("check-lemma", cmd_check_lemma, "c+ <= d + 1 on the D-flip"),
                             ("check-monotonicity", cmd_check_monotonicity,
                              "log discrepancies do not drop under the D-flip")):
        s = command(name, func, text)
        s.add_argument("--divisor", help="K, K+B or one rational per ray "
                                         "(default: the document's divisor, else K+B)")
        if name == "flip":
            s.add_argument("--emit", action="store_true", help="print the flipped fan document")
        if name == "check-monotonicity":
            s.add_argument("--bound", help="search bound on log discrepancy (default n+2)")
    s = command("check-conj-mld", cmd_check_conj_mld, "mld at V(cone) is at most its codim")
    s.add_argument("--cone", help="one cone; default checks every cone and reports the worst")
    s = command("check-conj-mineq", cmd_check_conj_mineq, "d >= ceil(a - 1) and its equality case")
    s.add_argument("--divisor", help="flip divisor used in the equality case of a flop")
    command("check-borisov", cmd_check_borisov, "mld bound at an isolated toric point")
    s = command("catalog", cmd_catalog, "named examples ('list' shows them)", document=False)
    s.add_argument("name")
    s.add_argument("params", nargs="*", type=int)
    s.add_argument("--emit", action="store_true", help="print the entry's fan document")
    s = command("fuzz", cmd_fuzz, "random instances as a JSON-lines report stream",
                document=False)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=50, help="retries per degenerate draw")
    s.add_argument("--jobs", type=int, default=1, help="worker processes; output order is fixed")
    s.add_argument("--keep-going", action="store_true", help="do not stop at a violation")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PRECONDITION as exc:
        print(f"not applicable: {exc}", file=sys.stderr)
        return EXIT_NA
    except ToricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
