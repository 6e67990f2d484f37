"""Command-line interface and the JSON file formats.

Polynomial files hold ``{"kind": "polynomial", "p", "degree",
"coefficients"}`` with the coefficient matrices listed leading first and
every entry written as an ``[re, im]`` pair.  Fraction files hold
``{"kind": "fraction", "p", "Q": {...}, "P": {...}}`` where ``Q`` and ``P``
carry their own ``degree`` and ``coefficients``.  Files are written in a
canonical form (sorted keys, two-space indent, trailing newline), so
reading and rewriting a file reproduces it byte for byte.

Exit codes: 0 Stable (or HN certified), 1 Unstable (or not HN),
2 Inconclusive, 3 bad input or usage, 4 a mathematical precondition failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bezout import hankel_definiteness, right_coprime
from .exceptions import MatStabError
from .herglotz import HNStatus, classify_hn, partial_fraction
from .markov import RationalMatrixFraction, block_hankel, markov_parameters
from .matpoly import MatrixPolynomial, even_odd_split
from .stability import (Verdict, analyze, build_rf, build_rf_tilde, build_rzf, build_rzf_tilde,
                        random_structured, stable_part_properties)
from .tolerances import default_tolerances

SCHEMA_VERSION = "1.0"
MAX_MARKOV = 200

EXIT_STABLE, EXIT_UNSTABLE, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_INPUT, EXIT_MATH = 3, 4

_VERDICT_EXIT = {Verdict.STABLE: EXIT_STABLE, Verdict.UNSTABLE: EXIT_UNSTABLE,
                 Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}
_HN_EXIT = {HNStatus.CERTIFIED: 0, HNStatus.NOT_HN: 1, HNStatus.INCONCLUSIVE: 2}


class InputError(ValueError):
    """A file that does not parse or does not match its format."""


# -- encoding ----------------------------------------------------------------

def _num(x):
    x = complex(x)
    return [float(x.real), float(x.imag)]


def _matrix(M):
    return [[_num(v) for v in row] for row in np.atleast_2d(M)]


def _real(x):
    x = float(x)
    return x if math.isfinite(x) else None


def canonical_dumps(obj):
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def polynomial_to_dict(F, name=None, seed=None):
    out = {"kind": "polynomial", "p": F.p, "degree": max(F.degree, 0),
           "coefficients": [_matrix(C) for C in F.coeffs]}
    if name is not None:
        out["name"] = name
    if seed is not None:
        out["seed"] = seed
    return out


def fraction_to_dict(Q, P, name=None):
    out = {"kind": "fraction", "p": P.p,
           "Q": {"degree": max(Q.degree, 0), "coefficients": [_matrix(C) for C in Q.coeffs]},
           "P": {"degree": max(P.degree, 0), "coefficients": [_matrix(C) for C in P.coeffs]}}
    if name is not None:
        out["name"] = name
    return out


# -- decoding ----------------------------------------------------------------

def _where(path):
    return "/" + "/".join(str(k) for k in path)


def _decode_coefficients(node, p, degree, path):
    if not isinstance(node, list):
        raise InputError(f"{_where(path)}: expected an array of matrices")
    if len(node) != degree + 1:
        raise InputError(f"{_where(path)}: degree {degree} needs {degree + 1} matrices, "
                         f"found {len(node)}")
    out = np.zeros((degree + 1, p, p), dtype=complex)
    for k, M in enumerate(node):
        if not isinstance(M, list) or len(M) != p:
            raise InputError(f"{_where(path + [k])}: expected {p} rows")
        for i, row in enumerate(M):
            if not isinstance(row, list) or len(row) != p:
                raise InputError(f"{_where(path + [k, i])}: expected {p} entries")
            for j, z in enumerate(row):
                here = _where(path + [k, i, j])
                if (not isinstance(z, list) or len(z) != 2
                        or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                   for v in z)):
                    raise InputError(f"{here}: expected an [re, im] number pair")
                if not all(math.isfinite(v) for v in z):
                    raise InputError(f"{here}: numbers must be finite")
                out[k, i, j] = complex(z[0], z[1])
    return out


def _int_field(obj, key, path, minimum):
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise InputError(f"{_where(path + [key])}: expected an integer >= {minimum}")
    return v


def _decode_poly(obj, p, path):
    if not isinstance(obj, dict):
        raise InputError(f"{_where(path)}: expected an object")
    degree = _int_field(obj, "degree", path, 0)
    coeffs = _decode_coefficients(obj.get("coefficients"), p, degree, path + ["coefficients"])
    return MatrixPolynomial(coeffs)


def parse_document(text):
    """Decode a polynomial or fraction file.

    Returns ``(kind, payload, raw)`` where ``payload`` is a
    :class:`MatrixPolynomial` or a ``(Q, P)`` pair.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InputError("/: expected an object")
    kind = raw.get("kind", "polynomial")
    p = _int_field(raw, "p", [], 1)
    if kind == "polynomial":
        degree = _int_field(raw, "degree", [], 0)
        F = MatrixPolynomial(_decode_coefficients(raw.get("coefficients"), p, degree,
                                                  ["coefficients"]))
        return kind, F, raw
    if kind == "fraction":
        Q = _decode_poly(raw.get("Q"), p, ["Q"])
        P = _decode_poly(raw.get("P"), p, ["P"])
        return kind, (Q, P), raw
    raise InputError(f"/kind: expected 'polynomial' or 'fraction', found {kind!r}")


def read_document(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        kind, payload, raw = parse_document(text)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    return kind, payload, raw


def read_polynomial(path):
    kind, payload, raw = read_document(path)
    if kind != "polynomial":
        raise InputError(f"{path}: expected a polynomial file, found a {kind} file")
    return payload, raw


def write_document(obj, path):
    Path(path).write_text(canonical_dumps(obj))


def digest(raw):
    return "sha256:" + hashlib.sha256(canonical_dumps(raw).encode()).hexdigest()


# -- report sections ---------------------------------------------------------

def _spectrum_list(spec):
    return [{"value": _num(lam), "multiplicity": int(k)} for lam, k in spec]


def _hankel_entry(H):
    return {"j": H.j, "k": H.k, "class": H.cls.value, "margin": _real(H.margin),
            "eigenvalues": [float(e) for e in np.asarray(H.eigenvalues).real],
            "zeroFilled": bool(H.zero_filled)}


def _markov_section(R, count):
    S = markov_parameters(R, N=count)
    return {"polynomialPart": [_matrix(C) for C in S.poly_part],
            "proper": [_matrix(C) for C in S.proper]}


def _fraction_sections(label, builder, F, tol, grid, full):
    """Markov, Hankel, Bezout and HN data for one associated fraction."""
    out = {"fraction": label}
    try:
        R = builder(F, tol)
    except MatStabError as exc:
        out["error"] = str(exc)
        return out
    out["degP"] = R.m
    out["selfAdjoint"] = bool(R.is_self_adjoint())
    out["markov"] = _markov_section(R, max(2 * R.m, 1))
    try:
        inert = hankel_definiteness(R, tol)
        out["hankel"] = dict(_hankel_entry(inert.hankel), certifiedBy=inert.method,
                             certifiedClass=inert.cls.value, certifiedMargin=_real(inert.margin))
    except MatStabError as exc:
        out["hankel"] = {"error": str(exc)}
    try:
        ok, ev = right_coprime(R.Q, R.P, tol)
        out["bezout"] = {"coprime": bool(ok), "method": ev.method, "rank": ev.rank,
                         "size": ev.size, "gap": _real(ev.gap)}
    except MatStabError as exc:
        out["bezout"] = {"error": str(exc)}
    if out["selfAdjoint"]:
        out["herglotz"] = _herglotz_section(R, tol, grid, full)
    return out


def _herglotz_section(R, tol, grid, full):
    v = classify_hn(R, tol, grid)
    sec = {"status": v.status.value,
           "checks": [_check(c) for c in v.checks],
           "consequences": [_check(c) for c in v.consequences]}
    if v.advisory:
        sec["advisory"] = {k: (_num(x) if isinstance(x, complex) else
                               _real(x) if isinstance(x, float) else x)
                           for k, x in v.advisory.items()
                           if isinstance(x, (int, float, complex, str))}
    if full and v.certified:
        try:
            pf = partial_fraction(R, tol)
            sec["partialFraction"] = {
                "A": _matrix(pf.A), "B": _matrix(pf.B),
                "poles": [{"value": float(np.real(pl.value)), "mass": _matrix(pl.mass),
                           "multiplicity": int(pl.multiplicity)} for pl in pf.poles]}
        except MatStabError as exc:
            sec["partialFraction"] = {"error": str(exc)}
    return sec


def _check(c):
    return {"name": c.name, "passed": bool(c.passed), "margin": _real(c.margin),
            "detail": c.detail}


def _criterion_entry(r):
    return {"verdict": r.verdict.value, "applicable": bool(r.applicable), "reason": r.reason,
            "agreesWithOracle": r.agrees_with_oracle,
            "conditions": [c.to_dict() for c in r.conditions]}


def _envelope(command, path, raw, tol):
    return {"schemaVersion": SCHEMA_VERSION, "tool": f"matstab {__version__}",
            "command": command,
            "input": {"path": str(path), "digest": digest(raw), "document": raw},
            "tolerances": tol.as_dict(), "warnings": []}


# -- commands ----------------------------------------------------------------

def cmd_analyze(path, tol, criterion="all", oracle=True, grid=10, full=False):
    F, raw = read_polynomial(path)
    a = analyze(F, tol, criterion=criterion, oracle=oracle, grid=grid)
    rep = _envelope("analyze", path, raw, tol)
    rep["verdict"] = a.verdict.value
    rep["stability"] = {"verdict": a.verdict.value, "primary": a.primary,
                        "consistent": bool(a.consistent), "advisories": list(a.advisories),
                        "criteria": {n: _criterion_entry(r) for n, r in a.reports.items()}}
    if a.oracle is not None:
        rep["oracle"] = {"verdict": a.oracle.verdict.value, "maxReal": _real(a.oracle.max_real),
                         "spectrum": _spectrum_list(a.oracle.spectrum)}
    Fe, Fo = even_odd_split(F)
    rep["parts"] = {"even": polynomial_to_dict(Fe)["coefficients"],
                    "odd": polynomial_to_dict(Fo)["coefficients"]}
    try:
        props = stable_part_properties(F, tol)
        rep["parts"].update(
            coprime=bool(props.coprime), evenSimple=bool(props.fe_simple),
            oddSimple=bool(props.fo_simple), evenNegativeReal=bool(props.fe_negative_real),
            oddNegativeReal=bool(props.fo_negative_real),
            commonZeros=[_num(z) for z in props.common_zeros])
    except MatStabError as exc:
        rep["parts"]["error"] = str(exc)
    builders = [("R_F", build_rf), ("R_zF", build_rzf),
                ("Rt_F", build_rf_tilde), ("Rt_zF", build_rzf_tilde)]
    rep["fractions"] = [_fraction_sections(lbl, b, F, tol, grid, full) for lbl, b in builders]
    return rep, _VERDICT_EXIT[a.verdict]


def cmd_hn(path, tol, grid=10):
    kind, payload, raw = read_document(path)
    if kind != "fraction":
        raise InputError(f"{path}: the hn command needs a fraction file")
    R = RationalMatrixFraction(*payload, tol=tol)
    v = classify_hn(R, tol, grid)
    rep = _envelope("hn", path, raw, tol)
    rep["verdict"] = v.status.value
    rep["herglotz"] = _herglotz_section(R, tol, grid, full=True)
    rep["markov"] = _markov_section(R, max(2 * R.m, 1))
    try:
        ok, ev = right_coprime(R.Q, R.P, tol)
        rep["bezout"] = {"coprime": bool(ok), "method": ev.method, "rank": ev.rank,
                         "size": ev.size, "gap": _real(ev.gap)}
    except MatStabError as exc:
        rep["bezout"] = {"error": str(exc)}
    return rep, _HN_EXIT[v.status]


def cmd_markov(path, tol, N=None, hankels=(), fraction="auto"):
    kind, payload, raw = read_document(path)
    if kind == "fraction":
        R = RationalMatrixFraction(*payload, tol=tol)
    else:
        F = payload
        name = fraction
        if name == "auto":
            name = "rt_f" if F.degree % 2 else "r_f"
        R = {"r_f": build_rf, "r_zf": build_rzf, "rt_f": build_rf_tilde,
             "rt_zf": build_rzf_tilde}[name](F, tol)
    rep = _envelope("markov", path, raw, tol)
    needed = max([2 * R.m] + [j + 2 * k for j, k in hankels] + ([N] if N is not None else []))
    if needed > MAX_MARKOV:
        msg = f"requested s_0..s_{needed} capped at s_{MAX_MARKOV}"
        warnings.warn(msg, stacklevel=2)
        rep["warnings"].append(msg)
        needed = MAX_MARKOV
    count = needed if N is None else min(N, needed)
    rep["markov"] = _markov_section(R, max(count, 0))
    S = markov_parameters(R, N=needed)
    entries = []
    for j, k in hankels:
        try:
            entries.append(_hankel_entry(block_hankel(S, j, k, tol.definiteness, tol.hermitian)))
        except MatStabError as exc:
            entries.append({"j": j, "k": k, "error": str(exc)})
    rep["hankel"] = entries
    rep["verdict"] = "ok"
    return rep, 0


def cmd_gen(p, n, kind, seed, out=None):
    F = random_structured(p, n, seed=seed, kind=kind)
    doc = polynomial_to_dict(F, name=f"{kind}-p{p}-n{n}", seed=seed)
    if out is not None:
        write_document(doc, out)
    return doc


# -- text rendering ----------------------------------------------------------

def _fmt(z):
    re, im = z
    if abs(im) < 1e-12 * max(1.0, abs(re)):
        return f"{re:.8g}"
    return f"{re:.8g}{'+' if im >= 0 else '-'}{abs(im):.8g}i"


def _mat_text(rows):
    M = np.array([[complex(*z) for z in row] for row in rows])
    if np.abs(M.imag).max(initial=0.0) == 0.0:
        M = M.real
    return np.array2string(M, precision=6, separator=", ").replace("\n", "")


def render_text(rep):
    lines = [f"{rep['command']}: {rep['verdict']}", f"input: {rep['input']['path']} "
             f"({rep['input']['digest'][:19]})"]
    if "stability" in rep:
        st = rep["stability"]
        lines.append(f"primary criterion: {st['primary']}  consistent: {st['consistent']}")
        for name, c in st["criteria"].items():
            flag = "" if c["applicable"] else f"  (not applicable: {c['reason']})"
            lines.append(f"  {name:12s} {c['verdict']}{flag}")
            for cond in c["conditions"]:
                m = cond["margin"]
                ms = f" margin {m:.3g}" if m is not None else ""
                lines.append(f"      [{cond['status']}] {cond['name']}{ms}")
        lines += [f"  advisory: {a}" for a in st["advisories"]]
    if "oracle" in rep:
        o = rep["oracle"]
        spec = ", ".join(f"{_fmt(e['value'])}" + (f" (x{e['multiplicity']})"
                                                  if e["multiplicity"] > 1 else "")
                         for e in o["spectrum"])
        lines.append(f"oracle: {o['verdict']}  max Re = {o['maxReal']:.6g}")
        lines.append(f"  zeros: {spec}")
    common = rep.get("parts", {}).get("commonZeros")
    if common:
        lines.append("common zeros of F_e, F_o: " + ", ".join(_fmt(z) for z in common))
    if rep["command"] == "hn":
        h = rep["herglotz"]
        for c in h["checks"] + h["consequences"]:
            lines.append(f"  [{'pass' if c['passed'] else 'fail'}] {c['name']}")
        for pole in h.get("partialFraction", {}).get("poles", []):
            lines.append(f"  pole {pole['value']:.8g}: mass {_mat_text(pole['mass'])}")
    if rep["command"] == "markov":
        for j, s in enumerate(rep["markov"]["polynomialPart"]):
            lines.append(f"  s_{-(j + 1)} = {_mat_text(s)}")
        for j, s in enumerate(rep["markov"]["proper"]):
            lines.append(f"  s_{j} = {_mat_text(s)}")
        for h in rep["hankel"]:
            lines.append(f"  H_{h['j']},{h['k']}: {h.get('class', h.get('error'))}")
    lines += [f"warning: {w}" for w in rep["warnings"]]
    return "\n".join(lines) + "\n"


# -- argument parsing --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors, which would read as Inconclusive."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _hankel_spec(text):
    try:
        j, k = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected J,K, got {text!r}") from None
    return j, k


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-def", type=_positive, help="definiteness tolerance")
    common.add_argument("--tol-rank", type=_positive, help="numerical rank tolerance")
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", dest="fmt", action="store_const", const="json",
                     help="print the JSON report")
    out.add_argument("--pretty", dest="fmt", action="store_const", const="pretty",
                     help="print a human-readable summary (default)")
    common.add_argument("-o", "--output", help="also write the JSON report to this file")

    parser = _Parser(prog="matstab", description="Hurwitz stability of matrix polynomials.")
    parser.add_argument("--version", action="version", version=f"matstab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="decide Hurwitz stability")
    a.add_argument("path")
    a.add_argument("--criterion", choices=["markov", "alt", "hn", "all"], default="all")
    a.add_argument("--grid", type=int, default=10, help="sampling grid size for HN advisories")
    a.add_argument("--no-oracle", action="store_true", help="skip the eigenvalue oracle")
    a.add_argument("--full", action="store_true",
                   help="add partial fractions of the certified HN fractions")

    h = sub.add_parser("hn", parents=[common], help="classify Q P^-1 as Herglotz-Nevanlinna")
    h.add_argument("path")
    h.add_argument("--grid", type=int, default=10)

    m = sub.add_parser("markov", parents=[common], help="Markov parameters and Hankel classes")
    m.add_argument("path")
    m.add_argument("-N", type=int, default=None, help="last proper Markov parameter to print")
    m.add_argument("--hankel", type=_hankel_spec, action="append", default=[],
                   metavar="J,K", help="classify H_{J,K}; may be repeated")
    m.add_argument("--fraction", choices=["auto", "r_f", "r_zf", "rt_f", "rt_zf"],
                   default="auto", help="fraction built from a polynomial file")

    g = sub.add_parser("gen", help="write a seeded random structured polynomial")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--kind", choices=["stable", "unstable", "boundary"], default="stable")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output file (stdout if omitted)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            doc = cmd_gen(args.p, args.n, args.kind, args.seed, args.out)
            if args.out is None:
                sys.stdout.write(canonical_dumps(doc))
            return 0
        tol = default_tolerances().with_(definiteness=args.tol_def, rank=args.tol_rank)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "analyze":
                rep, code = cmd_analyze(args.path, tol, args.criterion, not args.no_oracle,
                                        args.grid, args.full)
            elif args.command == "hn":
                rep, code = cmd_hn(args.path, tol, args.grid)
            else:
                rep, code = cmd_markov(args.path, tol, args.N, args.hankel, args.fraction)
        for w in caught:
            if str(w.message) not in rep["warnings"]:
                rep["warnings"].append(str(w.message))
    except InputError as exc:
        print(f"matstab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MatStabError, ValueError) as exc:
        print(f"matstab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    if args.output:
        write_document(rep, args.output)
    if args.fmt == "json":
        sys.stdout.write(canonical_dumps(rep))
    else:
        sys.stdout.write(render_text(rep))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
