"""Acceptance suite: one PASS/FAIL line per criterion.

Each test records its line in ``conftest.ACCEPTANCE`` (printed in the
terminal summary) and also prints it, so ``pytest -s`` shows it inline.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, diag_cubics, hn_2x2
from matstab.bezout import bezoutian, common_zeros, hankel_congruence, right_coprime
from matstab.exceptions import MatStabError
from matstab.herglotz import (HNStatus, classify_hn, partial_fraction, sample_imag_positivity,
                              whw_identity_check)
from matstab.markov import RationalMatrixFraction, block_hankel, markov_parameters
from matstab.matpoly import MatrixPolynomial as MP
from matstab.stability import (Verdict, analyze, build_rf, build_rf_tilde, build_rzf,
                               build_rzf_tilde, random_structured, stable_part_properties)

SWEEP_SIZE = 240
BUILDERS = (build_rf, build_rzf, build_rf_tilde, build_rzf_tilde)


def record(n, ok, detail):
    line = f"C{n} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE[n] = line
    print(line)
    return ok


def sweep_instance(i):
    rng = np.random.default_rng(1000 + i)
    p, n = int(rng.integers(1, 4)), int(rng.integers(1, 9))
    kind = ("stable", "unstable")[i % 2]
    return p, n, kind, random_structured(p, n, seed=i, kind=kind)


@pytest.fixture(scope="module")
def sweep():
    """Run every criterion on the seeded corpus once; time only the analysis."""
    t0 = time.perf_counter()
    rows = []
    for i in range(SWEEP_SIZE):
        p, n, kind, F = sweep_instance(i)
        rows.append((i, p, n, kind, F, analyze(F)))
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def certified(sweep):
    """Every HN-certified associated fraction of the sweep."""
    rows, _ = sweep
    out = []
    for i, _, _, _, F, _ in rows:
        for build in BUILDERS:
            try:
                R = build(F)
            except MatStabError:
                continue
            if R.m == 0 or not R.is_self_adjoint():
                continue
            v = classify_hn(R)
            if v.certified:
                out.append((i, build.__name__, R, v))
    return out


def random_self_adjoint(rng, p, m, linear):
    U, _ = np.linalg.qr(rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p)))
    dens = [np.poly(rng.uniform(-3, 3, m)) for _ in range(p)]
    nums = [np.r_[rng.uniform(0.5, 2), rng.standard_normal(m + int(linear))] for _ in range(p)]
    rot = lambda F: MP(U[None] @ F.coeffs @ U.conj().T[None])  # noqa: E731
    return RationalMatrixFraction(rot(MP.diag(*nums)), rot(MP.diag(*dens)))


def scalar_hn(lams, weights):
    r = len(lams)
    den = np.poly(lams) * (-1) ** r
    num = np.zeros(1)
    for j, w in enumerate(weights):
        num = np.polyadd(num, w * np.atleast_1d(np.poly(np.delete(lams, j))) * (-1) ** (r - 1))
    return RationalMatrixFraction(MP.scalar(num), MP.scalar(den))


# -- 1 ---------------------------------------------------------------------------

def test_c1_two_by_two_example():
    t0 = time.perf_counter()
    Q, P = hn_2x2()
    R = RationalMatrixFraction(Q, P)
    atol = 1e-9
    S = markov_parameters(R)
    B = bezoutian(P.vee, Q.vee, P, Q).data
    E1 = partial_fraction(R).mass_at(1.0)
    Em1 = partial_fraction(R).mass_at(-1.0)
    coprime, _ = right_coprime(Q, P)
    zeros = common_zeros(P, Q)
    checks = {
        "B": np.allclose(S.s(-1), [[4, -1], [-1, -1]], atol=atol),
        "s0": np.allclose(S.s(0), -np.eye(2), atol=atol),
        "H-2,0": np.allclose(block_hankel(S, -2, 0).data, 0, atol=atol),
        "H0": (np.allclose(block_hankel(S, 0, 0).data, -np.eye(2), atol=atol)
               and block_hankel(S, 0, 0).cls.negative_definite),
        "E(1)": np.allclose(E1, [[0.5, -0.5], [-0.5, 0.5]], atol=atol),
        # the residue at -1 is [[1/2, 1/2], [1/2, 1/2]]; see the README
        "E(-1)": np.allclose(Em1, [[0.5, 0.5], [0.5, 0.5]], atol=atol),
        "coprime": coprime,
        "common zero 1": len(zeros) == 1 and abs(zeros[0] - 1) < atol,
        "HN": classify_hn(R).status is HNStatus.CERTIFIED,
        "bezoutian symmetric": np.allclose(B, B.conj().T, atol=atol),
    }
    elapsed = time.perf_counter() - t0
    failed = [k for k, ok in checks.items() if not ok]
    ok = not failed and elapsed < 1.0
    assert record(1, ok, f"2x2 HN example, {len(checks)} checks at 1e-9, "
                         f"failed={failed}, {elapsed:.2f}s (< 1 s)")


# -- 2 ---------------------------------------------------------------------------

def test_c2_diag_cubics_example():
    t0 = time.perf_counter()
    F = diag_cubics()
    a = analyze(F)
    spec = a.oracle.spectrum
    want = [(-6, 3), (-2, 1), (complex(-0.5, np.sqrt(39) / 2), 1),
            (complex(-0.5, -np.sqrt(39) / 2), 1)]
    spec_ok = len(spec) == 4 and all(
        any(abs(lam - w) < 1e-8 and k == mult for lam, k in spec) for w, mult in want)
    verdicts = {n: r.verdict for n, r in a.reports.items()}
    verdict_ok = (set(verdicts) == {"markov-odd", "alt-odd", "hn", "hn-tilde", "corollary"}
                  and all(v is Verdict.STABLE for v in verdicts.values()))
    pf = partial_fraction(build_rzf_tilde(F))
    mass_ok = (np.allclose(pf.mass_at(0.0), np.diag([2, 5 / 3]), atol=1e-9)
               and np.allclose(pf.mass_at(-108.0), np.diag([16, 0]), atol=1e-9)
               and np.allclose(pf.mass_at(-12.0), np.diag([0, 4 / 3]), atol=1e-9))
    props = stable_part_properties(F, verdict=a.verdict)
    zero_ok = len(props.common_zeros) == 1 and abs(props.common_zeros[0] + 12) < 1e-8
    elapsed = time.perf_counter() - t0
    ok = spec_ok and verdict_ok and mass_ok and zero_ok and props.all_hold and elapsed < 1.0
    assert record(2, ok, f"diag cubics: spectrum={spec_ok} five criteria Stable={verdict_ok} "
                         f"masses={mass_ok} common zero -12={zero_ok}, {elapsed:.2f}s (< 1 s)")


# -- 3 ---------------------------------------------------------------------------

def test_c3_oracle_sweep(sweep):
    rows, elapsed = sweep
    applicable = disagree = 0
    bad = []
    for i, p, n, kind, F, a in rows:
        assert p <= 3 and n <= 8 and kind != "boundary"
        for name, r in a.reports.items():
            if not r.applicable:
                continue
            applicable += 1
            if r.verdict is not a.oracle.verdict:
                disagree += 1
                bad.append((i, name, r.verdict.value))
    kinds = {row[3] for row in rows}
    ok = len(rows) >= 200 and disagree == 0 and elapsed < 60 and kinds == {"stable", "unstable"}
    assert record(3, ok, f"{len(rows)} instances, {applicable} applicable criterion runs, "
                         f"{disagree} disagreements (Inconclusive counts as one) {bad[:5]}, "
                         f"{elapsed:.1f}s (< 60 s)")


# -- 4 ---------------------------------------------------------------------------

def test_c4_congruence_identities():
    rng = np.random.default_rng(4)
    worst = {"a": 0.0, "b": 0.0}
    count = {"a": 0, "b": 0}
    for k in range(50):
        p, m = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        res = hankel_congruence(random_self_adjoint(rng, p, m, linear=k % 2 == 0))
        worst[res.case] = max(worst[res.case], res.residual)
        count[res.case] += 1
    ok = sum(count.values()) == 50 and min(count.values()) > 0 and max(worst.values()) <= 1e-8
    assert record(4, ok, f"50 self-adjoint instances, case a: {count['a']} (worst "
                         f"{worst['a']:.1e}), case b: {count['b']} (worst {worst['b']:.1e}), "
                         f"bound 1e-8")


# -- 5 ---------------------------------------------------------------------------

def test_c5_whw_identity(certified):
    worst, not_pd, methods = 0.0, [], {}
    for i, name, R, _ in certified:
        res = whw_identity_check(R)
        worst = max(worst, res.residual)
        methods[res.pd_method] = methods.get(res.pd_method, 0) + 1
        if not res.positive_definite:
            not_pd.append((i, name))
    ok = bool(certified) and worst <= 1e-8 and not not_pd
    assert record(5, ok, f"{len(certified)} HN-certified sweep fractions, worst residual "
                         f"{worst:.1e} (<= 1e-8), not positive definite: {not_pd[:5]}, "
                         f"decided by {methods}")


# -- 6 ---------------------------------------------------------------------------

def test_c6_scalar_pole_sums():
    rng = np.random.default_rng(6)
    good = flipped = 0
    for _ in range(50):
        r = int(rng.integers(1, 6))
        while True:
            lams = np.sort(rng.uniform(-5, 5, r))
            if r == 1 or np.min(np.diff(lams)) > 0.05:
                break
        w = rng.uniform(0.1, 3.0, r)
        good += classify_hn(scalar_hn(lams, w)).status is HNStatus.CERTIFIED
        w[rng.integers(r)] *= -1
        flipped += classify_hn(scalar_hn(lams, w)).status is HNStatus.NOT_HN
    ok = good == 50 and flipped == 50
    assert record(6, ok, f"50 scalar HN sums: {good}/50 certified, {flipped}/50 flipped "
                         f"refuted")


# -- 7 ---------------------------------------------------------------------------

def test_c7_hn_consequences(certified):
    failures = []
    rank_checked = 0
    for i, name, R, v in certified:
        gap = R.Q.degree - R.m if not R.Q.is_zero() else 0
        if abs(gap) > 1 or not v.consequences_hold:
            failures.append((i, name, "consequence"))
            continue
        if sample_imag_positivity(R)[0] < -1e-8:
            failures.append((i, name, "Im R"))
        if not common_zeros(R.P, R.Q):
            rank_checked += 1
            scale = max(1.0, max(np.linalg.norm(c) for c in R.Q.coeffs))
            for pole in partial_fraction(R).poles:
                if np.linalg.matrix_rank(pole.mass, tol=1e-9 * scale) != pole.multiplicity:
                    failures.append((i, name, f"rank E at {pole.value:.4g}"))
    ok = bool(certified) and not failures
    assert record(7, ok, f"{len(certified)} HN-certified fractions: degree gap, simple real "
                         f"P, coprime, sampled Im R >= -1e-8, rank E_j = l_j on "
                         f"{rank_checked} without common zeros; failures {failures[:5]}")
