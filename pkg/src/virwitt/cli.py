"""Command-line front end.

Exit status: 0 on success, 1 on malformed input, 2 on a domain error.
Payload arguments may be given inline or as ``@path`` to read a file.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .dloc import canonicalize, orbit_dim, orbit_equal, orbit_invariant
from .errors import DomainError, ParseError
from .exactalg import LaurentPoly
from .grammar import parse_rational
from .liealg import AlgebraTag, bracket, parse_element
from .localfn import eval_local, locality_sequence, parse_local_function, rank_b, recurrence_detect
from .subalg import SubalgebraPresentation, classify, vir_express_z
from .sympoisson import SymPoly, p_gamma_map, poisson_bracket
from .weyl import NVector, WeylElement, cyclic_span, pi_gamma_word, weyl_act_N, weyl_mul


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _payload(text: str) -> str:
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {text[1:]}: {exc.strerror}") from None
    return text


def _rat(v: Fraction | None) -> str | None:
    return None if v is None else str(v)


def _emit(args, text: str, data) -> None:
    if args.format == "json":
        payload = {"version": __version__}
        payload.update(data if isinstance(data, dict) else {"result": data})
        print(json.dumps(payload))
    else:
        print(text)


def cmd_bracket(args):
    tag = AlgebraTag.parse(args.algebra)
    r = bracket(parse_element(args.u, tag), parse_element(args.v, tag))
    _emit(args, str(r), {"result": str(r)})


def cmd_poisson(args):
    r = poisson_bracket(SymPoly.parse(args.p), SymPoly.parse(args.q), central=args.central)
    _emit(args, str(r), {"result": str(r)})


def cmd_pgamma(args):
    r = p_gamma_map(SymPoly.parse(args.p), parse_rational(args.gamma))
    _emit(args, str(r), {"result": str(r)})


def cmd_eval(args):
    chi = parse_local_function(_payload(args.chi))
    r = eval_local(chi, parse_element(args.u, chi.tag))
    _emit(args, str(r), {"result": str(r)})


def cmd_rank(args):
    r = rank_b(parse_local_function(_payload(args.chi)))
    _emit(args, str(r), {"result": r})


def cmd_locality(args):
    if args.chi:
        chi = parse_local_function(_payload(args.chi))
        f = LaurentPoly.parse(args.f)
        seq = locality_sequence(chi, f, args.terms or 2 * args.dmax + 2)
    else:
        if args.sequence is None:
            raise ParseError("give a comma-separated sequence or --chi")
        seq = [parse_rational(s) for s in _payload(args.sequence).split(",") if s.strip()]
    h = recurrence_detect(seq, args.dmax)
    text = "none" if h is None else str(h)
    _emit(args, text, {"result": None if h is None else str(h)})


def cmd_canonicalize(args):
    chi = parse_local_function(_payload(args.chi))
    cf = canonicalize(chi)
    data = {
        "x": str(cf.x),
        "order": cf.order,
        "c": str(cf.c),
        "b": _rat(cf.b),
        "k": cf.k,
        "form": {"tag": chi.tag.value, "points": [{"x": str(cf.x), "coeffs": [str(a) for a in cf.form.coeffs]}], "central": "0"},
        "witness": [str(c) for c in cf.witness.s.c],
    }
    text = f"c = {cf.c}" + ("" if cf.b is None else f", b = {cf.b} (index {cf.k})")
    _emit(args, text, data)


def _inv_json(inv) -> dict:
    def cell(v):
        return [None if a is None else (str(a) if isinstance(a, Fraction) else a) for a in v]

    return {
        "partition": list(inv.partition),
        "invariants": [cell(v) for v in inv.invariants],
        "zero_component": None if inv.zero_component is None else cell(inv.zero_component),
    }


def cmd_orbit_eq(args):
    r = orbit_equal(parse_local_function(_payload(args.chi1)), parse_local_function(_payload(args.chi2)))
    _emit(args, "true" if r else "false", {"result": r})


def cmd_orbit_dim(args):
    r = orbit_dim(parse_local_function(_payload(args.chi)))
    _emit(args, str(r), {"result": r})


def cmd_orbit_invariant(args):
    data = _inv_json(orbit_invariant(parse_local_function(_payload(args.chi))))
    _emit(args, json.dumps(data), data)


def cmd_classify(args):
    c = classify(SubalgebraPresentation.from_json(_payload(args.presentation)))
    _emit(args, str(c), c.to_json())


def cmd_express_z(args):
    f = LaurentPoly.parse(args.f)
    lifts = None
    if args.lifts:
        try:
            raw = json.loads(_payload(args.lifts))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", args.lifts, exc.pos) from None
        if not isinstance(raw, dict):
            raise ParseError("lifts must be a JSON object")
        try:
            lifts = {int(p): parse_rational(v) for p, v in raw.items()}
        except ValueError:
            raise ParseError("lift exponents must be integers") from None
    e = vir_express_z(f, lifts)
    text = " + ".join(f"({c})*[v_{p}, v_{q}]" for c, p, q in e.terms)
    _emit(args, f"z = {text}", {"terms": [[str(c), p, q] for c, p, q in e.terms]})


def cmd_weyl_mul(args):
    r = weyl_mul(WeylElement.parse(args.a), WeylElement.parse(args.b))
    _emit(args, str(r), {"result": str(r)})


def cmd_weyl_pi(args):
    word = [parse_element(u) for u in args.elements]
    r = pi_gamma_word(word, parse_rational(args.gamma))
    _emit(args, str(r), {"result": str(r)})


def cmd_weyl_act(args):
    r = weyl_act_N(WeylElement.parse(args.a), NVector.from_json(_payload(args.vector)))
    _emit(args, json.dumps(r.to_json()), {"result": r.to_json()})


def cmd_weyl_span(args):
    r = cyclic_span(NVector.from_json(_payload(args.vector)), parse_rational(args.gamma), args.bound)
    text = f"dimension {r.dimension}, delta {'reached' if r.reaches_delta else 'not reached'}"
    _emit(args, text, {"dimension": r.dimension, "reaches_delta": r.reaches_delta})


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="virwitt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("bracket", cmd_bracket, "Lie bracket of two fields (f, or f + c*z in Vir)")
    sp.add_argument("u")
    sp.add_argument("v")
    sp.add_argument("--algebra", default="W", help="W, Wgeq-1, Wgeq0, Wgeq1 or Vir")

    sp = add("poisson", cmd_poisson, "Poisson bracket in S(W)")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.add_argument("--central", action="store_true", help="use the Virasoro bracket")

    sp = add("pgamma", cmd_pgamma, "image under p_gamma in k[t, t^-1, y]")
    sp.add_argument("p")
    sp.add_argument("--gamma", default="0")

    sp = add("eval", cmd_eval, "value of a local function on a field")
    sp.add_argument("chi")
    sp.add_argument("u")

    sp = add("rank", cmd_rank, "rank of B_chi")
    sp.add_argument("chi")

    sp = add("locality", cmd_locality, "minimal linear recurrence of a sequence")
    sp.add_argument("sequence", nargs="?")
    sp.add_argument("--dmax", type=int, required=True)
    sp.add_argument("--chi", help="use chi(f t^i d/dt) as the sequence")
    sp.add_argument("--f", default="1")
    sp.add_argument("--terms", type=int)

    sp = add("canonicalize", cmd_canonicalize, "normal form of a one-point local function")
    sp.add_argument("chi")

    sp = add("orbit-eq", cmd_orbit_eq, "whether two local functions have the same Poisson core")
    sp.add_argument("chi1")
    sp.add_argument("chi2")

    sp = add("orbit-dim", cmd_orbit_dim, "coadjoint orbit dimension")
    sp.add_argument("chi")

    sp = add("orbit-invariant", cmd_orbit_invariant, "complete orbit invariant")
    sp.add_argument("chi")

    sp = add("classify-subalg", cmd_classify, "name a subalgebra of codimension <= 3")
    sp.add_argument("presentation")

    sp = add("express-z", cmd_express_z, "write z through brackets of lifts of f t^p d/dt")
    sp.add_argument("f")
    sp.add_argument("--lifts", help='JSON map {"p": lambda_p}')

    wp = sub.add_parser("weyl", help="Weyl algebra operations")
    wsub = wp.add_subparsers(dest="weyl_command", required=True, parser_class=_Parser)

    def wadd(name, func, help_):
        sp = wsub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = wadd("mul", cmd_weyl_mul, "product in normal order (d stands for d/dt)")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = wadd("pi", cmd_weyl_pi, "image of a product of fields under pi_gamma")
    sp.add_argument("elements", nargs="+")
    sp.add_argument("--gamma", default="0")
    sp = wadd("act", cmd_weyl_act, "action on a vector of N_x")
    sp.add_argument("a")
    sp.add_argument("vector")
    sp = wadd("span", cmd_weyl_span, "cyclic span under W acting through pi_gamma")
    sp.add_argument("vector")
    sp.add_argument("--gamma", default="0")
    sp.add_argument("--bound", type=int, default=6)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
