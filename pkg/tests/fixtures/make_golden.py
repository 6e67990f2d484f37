"""Regenerate the golden corpus in ``golden/``.

Expected exit codes for polynomial files come from the eigenvalues of a
block companion matrix built here with plain numpy, independent of the
package's own spectrum code.  Run from the repository root:

    python tests/fixtures/make_golden.py
"""

import json
from pathlib import Path

import numpy as np

from matstab.cli import canonical_dumps, fraction_to_dict, polynomial_to_dict
from matstab.matpoly import MatrixPolynomial as MP
from matstab.stability import random_structured

HERE = Path(__file__).parent / "golden"


def companion_max_real(F):
    """Largest real part of the zeros of a monic matrix polynomial."""
    c = F.coeffs
    n, p = F.degree, F.p
    C = np.zeros((n * p, n * p), dtype=complex)
    C[:p, :] = -np.hstack(list(c[1:]))
    C[p:, :-p] = np.eye((n - 1) * p)
    return np.linalg.eigvals(C).real.max()


def expected_exit(F):
    return 0 if companion_max_real(F) < -1e-9 else 1


def main():
    HERE.mkdir(exist_ok=True)
    manifest = {}

    def poly(name, F, note, **meta):
        (HERE / f"{name}.json").write_text(canonical_dumps(polynomial_to_dict(F, name=name, **meta)))
        manifest[f"{name}.json"] = {"command": "analyze", "exit": expected_exit(F), "note": note}

    def frac(name, Q, P, code, note):
        (HERE / f"{name}.json").write_text(canonical_dumps(fraction_to_dict(Q, P, name=name)))
        manifest[f"{name}.json"] = {"command": "hn", "exit": code, "note": note}

    # the two worked examples
    frac("example_hn_2x2", MP([[[4, -1], [-1, -1]], [[-2, 4], [-1, -2]]]),
         MP([[[1, 0], [0, 1]], [[0, 1], [1, 0]]]), 0, "2x2 HN fraction with poles +-1")
    poly("example_diag_cubics", MP.diag([1, 18, 108, 216], [1, 3, 12, 20]),
         "diag(z^3+18z^2+108z+216, z^3+3z^2+12z+20)")

    # scalar instances
    s = MP.scalar
    poly("scalar_z3_plus_z", s([1, 0, 1, 0]), "zeros 0, +-i")
    poly("scalar_stable_quadratic", s([1, 3, 2]), "zeros -1, -2")
    poly("scalar_unstable_quadratic", s([1, -3, 2]), "zeros 1, 2")
    poly("scalar_stable_cubic", s([1, 3, 12, 20]), "zeros -2, -1/2 +- i sqrt(39)/2")
    poly("scalar_axis_cubic", s([1, 1, 1, 1]), "zeros -1, +-i")

    # structured random instances
    specs = [(1, 5, "stable", 11), (2, 4, "stable", 12), (3, 3, "stable", 13),
             (2, 6, "stable", 14), (3, 8, "stable", 15), (1, 7, "unstable", 16),
             (2, 5, "unstable", 17), (3, 4, "unstable", 18), (2, 8, "unstable", 19),
             (3, 2, "unstable", 20), (2, 4, "boundary", 21)]
    for p, n, kind, seed in specs:
        poly(f"random_{kind}_p{p}_n{n}_s{seed}", random_structured(p, n, seed=seed, kind=kind),
             f"random_structured(p={p}, n={n}, kind={kind})", seed=seed)

    # fractions
    frac("fraction_inv_z", s([1]), s([1, 0]), 1, "I/z has H_0 = I, not HN")
    frac("fraction_pole_at_one", s([-1]), s([1, -1]), 0, "-1/(z-1) = 1/(1-z), mass 1")
    zI = MP([[[1, 0], [0, 1]], [[0, 0], [0, 0]]])
    frac("fraction_not_self_adjoint", MP([[[0, 1], [0, 0]]]), zI, 4,
         "[[0,1],[0,0]] / z is not self-adjoint")

    (HERE / "malformed.json").write_text('{"kind": "polynomial", "p": 1,\n  "degree": 2,\n'
                                         '  "coefficients": [[[[1, 0]]], [[[3, 0]]]]\n}\n')
    manifest["malformed.json"] = {"command": "analyze", "exit": 3,
                                  "note": "degree 2 but only two coefficients"}

    (HERE / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
