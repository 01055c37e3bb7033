"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line; the lines are
also collected into the pytest terminal summary.  Run directly with
``python3 tests/test_acceptance.py`` to get just the ten lines.
"""

import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from twistsym import (
    ONE,
    ZERO,
    IBDPError,
    InvariantChain,
    JetContext,
    MatrixExpr,
    OdeSystem,
    ParseDiagnostic,
    VectorField,
    add,
    canon,
    check_maurer_cartan,
    check_symmetry,
    commutator_identity_report,
    equal_numeric,
    exp,
    find_first_invariants,
    ibdp_next,
    is_zero,
    mu_difference,
    mu_from_A,
    mul,
    parse_expression,
    power,
    prolong,
    prolong_chi,
    prolong_lambda,
    prolong_mu,
    prolong_sigma,
    reduce_by_invariants,
    substitute,
    sub,
    sym,
    tables_equal,
    to_text,
    try_parse,
    verify_gauge_lambda,
    verify_gauge_mu,
    verify_gauge_sigma,
    verify_prolong_commutator,
)
from twistsym.fuzz import (
    lambda_symmetric_ode,
    rand_constant_invertible,
    rand_expr,
    rand_liepoint_field,
    rand_matrix,
    rand_nonsingular,
    rand_nowhere_zero,
    rand_poly,
    rand_vertical_field,
)

ROOT = Path(__file__).resolve().parents[1]
RESULTS: dict = {}
TIME_LIMIT = 10.0


def record(n: int, ok: bool, detail: str, started: float):
    took = time.perf_counter() - started
    ok = ok and took < TIME_LIMIT
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({took:.1f}s) {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


# 1 ------------------------------------------------------------------------------------------


def test_criterion_1_degeneration_lattice():
    t0 = time.perf_counter()
    rng = random.Random(101)
    failures, fields = [], 0
    while fields < 100:
        p, n = rng.randint(1, 3), rng.randint(1, 3)
        ctx = JetContext(1, p, n)
        j1 = ctx.coordinates(1)
        X = rand_liepoint_field(ctx, rng, 2, 2)
        X2 = rand_liepoint_field(ctx, rng, 2, 2)
        V1, V2 = rand_vertical_field(ctx, rng, 2), rand_vertical_field(ctx, rng, 2)
        fields += 4
        lam = rand_poly(j1, rng, 1, 2)
        Lam = rand_matrix(j1, rng, p, p, 1, 1)
        S = rand_matrix(j1, rng, 2, 2, 1, 1)
        Zp, Z1, Z2 = MatrixExpr.zeros(p), MatrixExpr.zeros(1), MatrixExpr.zeros(2)
        std = prolong(X, n)
        checks = {
            "Lambda(0)": tables_equal(prolong_lambda(X, ZERO, n), std),
            "Mu(0)": tables_equal(prolong_mu(X, [Zp], n), std),
            "Mu(lam I)": tables_equal(prolong_mu(X, [MatrixExpr.scalar(lam, p)], n), prolong_lambda(X, lam, n)),
            "Sigma(0) r=1": tables_equal(prolong_sigma([X], Z1, n)[0], std),
            "Sigma(lam) r=1": tables_equal(prolong_sigma([X], MatrixExpr.of([[lam]]), n)[0], prolong_lambda(X, lam, n)),
        }
        s0 = prolong_sigma([X, X2], Z2, n)
        checks["Sigma(0) r=2"] = tables_equal(s0[1], prolong(X2, n))
        for a, (c, m) in enumerate(zip(prolong_chi([V1, V2], Lam, Z2, n), (V1, V2))):
            checks[f"Chi(L,0)={a + 1}"] = tables_equal(c, prolong_mu(m, [Lam], n))
        rho = MatrixExpr.scalar(lam, 2) + S
        for a, (c, s) in enumerate(zip(prolong_chi([V1, V2], MatrixExpr.scalar(lam, p), S, n), prolong_sigma([V1, V2], rho, n))):
            checks[f"Chi(lam I,S)={a + 1}"] = tables_equal(c, s)
        failures += [k for k, v in checks.items() if not v]
    record(1, not failures, f"{fields} fuzzed fields, {len(failures)} lattice failures {failures[:3]}", t0)


# 2 ------------------------------------------------------------------------------------------


def test_criterion_2_prolongation_of_commutators():
    t0 = time.perf_counter()
    rng = random.Random(202)
    bad = 0
    for k in range(100):
        ctx = JetContext(rng.randint(1, 2), rng.randint(1, 2), 2)
        X, Y = rand_liepoint_field(ctx, rng, 2, 2), rand_liepoint_field(ctx, rng, 2, 2)
        bad += not verify_prolong_commutator(X, Y, 2)
    record(2, bad == 0, f"100 lie-point pairs, {bad} failures", t0)


# 3 ------------------------------------------------------------------------------------------


def test_criterion_3_gauge_diagrams():
    t0 = time.perf_counter()
    rng = random.Random(303)
    bad = {"lambda": 0, "mu": 0, "sigma": 0}
    for k in range(50):
        d = "forward" if k % 2 == 0 else "inverse"
        c1 = JetContext(1, 1, 2)
        X = rand_liepoint_field(c1, rng, 2, 2)
        beta = rand_nowhere_zero(c1.coordinates(0), rng)
        bad["lambda"] += not verify_gauge_lambda(X, beta, 2, d)
        c2 = JetContext(1, 2, 2)
        Q = rand_vertical_field(c2, rng, 2, 0, 2)
        A = rand_nonsingular(c2.coordinates(0), rng, 2)
        bad["mu"] += not verify_gauge_mu(Q, A, 2, d)
        Xs = [rand_liepoint_field(c2, rng, 1, 2), rand_liepoint_field(c2, rng, 1, 2)]
        G = rand_nonsingular(c2.coordinates(0), rng, 2)
        bad["sigma"] += not verify_gauge_sigma(Xs, G, 2, d)
    record(3, not any(bad.values()), f"50 each of (X, beta), (Q, A), ({{X_a}}, Gamma), both directions; failures {bad}", t0)


# 4 ------------------------------------------------------------------------------------------


def test_criterion_4_pure_gauge_flatness():
    t0 = time.perf_counter()
    rng = random.Random(404)
    ctx = JetContext(2, 2, 2)
    bad = 0
    for k in range(50):
        A = rand_nonsingular(ctx.coordinates(0), rng, 2)
        bad += not check_maurer_cartan(ctx, mu_from_A(ctx, A, "forward" if k % 2 == 0 else "inverse", None))
    rep = check_maurer_cartan(ctx, [MatrixExpr.zeros(2), MatrixExpr.scalar(ctx.x(0), 2)])
    R = rep.residuals[(0, 1)]
    residual_is_I = all(equal_numeric(R[i, j], ONE if i == j else ZERO) for i in range(2) for j in range(2))
    ok = bad == 0 and not rep and residual_is_I
    record(4, ok, f"50 fuzzed A flat ({bad} failures); non-flat example fails with residual I: {residual_is_I}", t0)


# 5 ------------------------------------------------------------------------------------------


def test_criterion_5_mu_difference():
    t0 = time.perf_counter()
    rng = random.Random(505)
    bad_sum, bad_inv = 0, 0
    for k in range(50):
        if k % 2 == 0:
            ctx = JetContext(1, rng.randint(1, 2), 3)
            Lams = [rand_matrix(ctx.coordinates(1), rng, ctx.p, ctx.p, 1, 2)]
        else:
            ctx = JetContext(2, 2, 2)
            Lams = mu_from_A(ctx, rand_nonsingular(ctx.coordinates(0), rng, 2), "forward", None)
        Q = rand_vertical_field(ctx, rng, 2, rng.randint(0, 1), 2)
        d = mu_difference(Q, Lams, 2)
        bad_sum += not d
        bad_inv += not d.vanishes_on_invariant_sections()
    record(5, bad_sum == 0 and bad_inv == 0, f"50 fuzzed (Q, Lambda): Psi = Phi + F failures {bad_sum}, F|Q=0 failures {bad_inv}", t0)


# 6 ------------------------------------------------------------------------------------------


def test_criterion_6_ibdp():
    t0 = time.perf_counter()
    ctx = JetContext(1, 1, 3, ("c",))
    P = lambda t, c=ctx: parse_expression(t, c)  # noqa: E731
    Y = prolong_lambda(VectorField(ctx, [ZERO], [ONE]), P("c"), 3)
    ext = ibdp_next(Y, P("x"), P("u_[1] - c*u"))
    lam_ok = equal_numeric(ext, P("u_[2] - c*u_[1]")) and is_zero(Y.apply(P("u_[2] - c*u_[1]")))

    rng = random.Random(606)
    c2 = JetContext(1, 2, 3)
    bad, found = 0, 0
    for k in range(20):
        Cm = rand_constant_invertible(rng, 2)
        fields = [VectorField.vertical(c2, [Cm[a, 0], Cm[a, 1]]) for a in range(2)]
        sigma = rand_matrix(["x"], rng, 2, 2, 1, 2)
        Ys = prolong_sigma(fields, sigma, 3)
        fi = find_first_invariants(Ys, 2, 0)
        if fi.eta is None or len(fi.zetas) != 2:
            bad += 1
            continue
        found += 1
        for z in fi.zetas:
            nxt = ibdp_next(Ys, fi.eta, z)
            bad += not all(is_zero(Yk.apply(nxt)) for Yk in Ys)
    mu_ctx = JetContext(1, 2, 3)
    Ymu = prolong_mu(VectorField.vertical(mu_ctx, [ONE, ZERO]), [MatrixExpr.of([[0, 1], [1, 0]])], 3)
    try:
        ibdp_next(Ymu, mu_ctx.x(), mu_ctx.u(1, 1))
        refused = False
    except IBDPError:
        refused = True
    ok = bool(lam_ok) and bad == 0 and found == 20 and refused
    record(6, ok, f"lambda chain ok: {bool(lam_ok)}; sigma systems with full invariant sets {found}/20, failures {bad}; general mu refused: {refused}", t0)


# 7 ------------------------------------------------------------------------------------------


def test_criterion_7_commutator_identities():
    t0 = time.perf_counter()
    rng = random.Random(707)
    bad = {"LAcomm": 0, "commsig": 0, "chisomm": 0}
    for k in range(20):
        c1 = JetContext(1, 1, 2)
        X = rand_liepoint_field(c1, rng, 2, 2)
        rep = commutator_identity_report([prolong_lambda(X, rand_poly(c1.coordinates(1), rng, 1, 2), 2)], 10)
        bad["LAcomm"] += not (rep and rep.identity == "LAcomm")
        c2 = JetContext(1, 2, 2)
        Xs = [rand_liepoint_field(c2, rng, 1, 2) for _ in range(2)]
        S = rand_matrix(c2.coordinates(1), rng, 2, 2, 1, 1)
        rep = commutator_identity_report(prolong_sigma(Xs, S, 2), 10)
        bad["commsig"] += not (rep and rep.identity == "commsig")
        Vs = [rand_vertical_field(c2, rng, 2) for _ in range(2)]
        lam = rand_poly(c2.coordinates(1), rng, 1, 2)
        rep = commutator_identity_report(prolong_chi(Vs, MatrixExpr.scalar(lam, 2), S, 2), 10)
        bad["chisomm"] += not (rep and rep.identity == "chisomm")
    record(7, not any(bad.values()), f"20 instances each, basket of 10 test functions; failures {bad}", t0)


# 8 ------------------------------------------------------------------------------------------


def test_criterion_8_end_to_end_reduction():
    t0 = time.perf_counter()
    ctx = JetContext(1, 1, 2, ("c",))
    P = lambda t, c=ctx: parse_expression(t, c)  # noqa: E731
    system = OdeSystem(ctx, (P("c*u_[1] + (u_[1] - c*u)^2"),), (2,))
    X = VectorField(ctx, [ZERO], [ONE])
    Y = prolong_lambda(X, P("c"), 2)
    certified = bool(check_symmetry(system, Y))
    red = reduce_by_invariants(system, InvariantChain([Y], P("x"), [[P("u_[1] - c*u")]]))
    emitted = f"{red.system.ctx.u_name(0, (1,))} = {to_text(red.system.rhs[0])}"
    rctx = red.system.ctx
    resid_ok = True
    for K in (3, Fraction(7, 2), 5):
        z = P(f"-1/(x + {K})")
        # z solves the reduced equation z_x = z^2
        resid_ok &= bool(is_zero(substitute(red.system.equations()[0], rctx.section_bindings([z], 1))))
        # family: u_x = c u + z, u_xx = c u_x + z_x; residual of Delta must vanish
        u1 = add(mul(sym("c"), sym("u")), z)
        u2 = add(mul(sym("c"), u1), ctx.D(z))
        resid = substitute(system.equations()[0], {"u_[1]": u1, "u_[2]": u2})
        resid_ok &= bool(is_zero(resid))
    ok = certified and emitted == "u_[1] = u^2" and resid_ok
    record(8, ok, f"lambda-symmetry certified: {certified}; reduced: z_x = z^2 as '{emitted}'; family residual zero: {resid_ok}", t0)


# 9 ------------------------------------------------------------------------------------------


def test_criterion_9_gauge_stable_verdicts():
    t0 = time.perf_counter()
    rng = random.Random(909)
    ctx = JetContext(1, 1, 3)
    changed, positives = 0, 0
    for k in range(20):
        F, lam = lambda_symmetric_ode(ctx, rng)
        if k % 4 == 3:
            F = add(F, mul(rng.choice([1, -1]), sym("u")))  # break the symmetry
        system = OdeSystem(ctx, (F,), (2,))
        Y = prolong_lambda(VectorField(ctx, [ZERO], [ONE]), lam, 2)
        gamma = rand_nowhere_zero(["x", "u"], rng)
        v0 = bool(check_symmetry(system, Y))
        v1 = bool(check_symmetry(system, Y.scale(gamma)))
        positives += v0
        changed += v0 != v1
    record(9, changed == 0 and positives == 15, f"20 fuzzed (Delta, Y) rescaled by nowhere-zero gamma(x,u): {changed} verdicts changed ({positives} symmetric, {20 - positives} not)", t0)


# 10 -----------------------------------------------------------------------------------------


_CLI_LOOP = """
import sys
from twistsym.cli import main
out = sys.argv[1]
for k, f in enumerate(sys.argv[2:]):
    code = main(["--problem", f, "--seed", "0", "--report", f"{out}/{k}.txt", "--json", f"{out}/{k}.json"])
    print(k, code)
"""


def _cli_outputs(files, out: Path) -> list[bytes]:
    """Run the CLI over ``files`` in one fresh interpreter; return exit codes and report bytes."""
    out.mkdir()
    r = subprocess.run([sys.executable, "-c", _CLI_LOOP, str(out), *map(str, files)], capture_output=True, check=True)
    return [r.stdout] + [(out / f"{k}.{ext}").read_bytes() for k in range(len(files)) for ext in ("txt", "json")]


def test_criterion_10_parser_and_cli(tmp_path):
    t0 = time.perf_counter()
    rng = random.Random(1010)
    ctx = JetContext(2, 2, 2, ("c",))
    names = ctx.coordinates(1) + ["c"]
    mismatches = 0
    for _ in range(1000):
        e = rand_expr(names, rng, 4)
        mismatches += parse_expression(to_text(e), ctx) != canon(e)
    c1 = JetContext(1, 1, 2)
    t1 = parse_expression("u_[1] - 3/2*u", c1)
    ex1 = t1 == sub(sym("u_[1]"), mul(Fraction(3, 2), sym("u"))) and to_text(t1) == "u_[1] - 3/2*u"
    t2 = parse_expression("exp(x)^2", c1)
    ex2 = t2 == power(exp(sym("x")), 2) and to_text(t2) == "exp(x)^2"
    d = try_parse("2x", c1)
    ex3 = isinstance(d, ParseDiagnostic) and (d.message, d.offset) == ("expected operator", 1)
    files = sorted((ROOT / "problems").glob("*.tw"))
    reproducible = _cli_outputs(files, tmp_path / "a") == _cli_outputs(files, tmp_path / "b")
    ok = mismatches == 0 and ex1 and ex2 and ex3 and reproducible and len(files) >= 3
    record(10, ok, f"round trip 1000 exprs ({mismatches} mismatches); grammar examples {ex1}/{ex2}/{ex3}; {len(files)} problem files byte-reproducible: {reproducible}", t0)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
