"""Newton evaluation, singularity bracketing, and the oracle file format.

Reference values come from closed forms: the ternary singularity is
tau/(1+tau^3) with tau^3 = 1/2, the binary one is 1/2, the oneormore
discriminant (1+x-x^2)^2 = 4x vanishes at (3-sqrt5)/2, the attrs
discriminant gives the real root of 8x^3+4x^2-1, and the feed sequence
hits its pole where x(1+x) = 1, i.e. the reciprocal golden ratio."""

import math

import pytest

from boltzxml import (
    AUTO_BACKOFF,
    BRACKET_WIDTH,
    DivergedError,
    NoFiniteSingularityError,
    OracleMismatchError,
    SystemFormatError,
    compile_grammar,
    estimate_singularity,
    load_oracle,
    newton_evaluate,
    parse_grammar,
    save_oracle,
    solve,
    verify_oracle,
)

RNG = 'xmlns="http://relaxng.org/ns/structure/1.0"'

TERNARY_RHO = 2 ** (-1.0 / 3.0) / 1.5
ONEORMORE_RHO = (3.0 - math.sqrt(5.0)) / 2.0
FEED_RHO = (math.sqrt(5.0) - 1.0) / 2.0


def attrs_rho():
    # real root of 8x^3 + 4x^2 - 1 by plain bisection
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if 8 * mid**3 + 4 * mid**2 - 1 < 0:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# evaluation


def test_ternary_value_matches_plain_fixpoint(systems):
    x = 0.4
    t = 0.0
    for _ in range(500):
        t = x * (1.0 + t**3)
    result = newton_evaluate(systems["ternary"], x)
    assert abs(result.values["t"] - t) < 1e-14
    assert result.residual < 1e-12


def test_binary_value_matches_closed_form(systems):
    # b = x + x b^2 solves to (1 - sqrt(1-4x^2)) / (2x)
    for x in (0.1, 0.25, 0.4, 0.49):
        closed = (1.0 - math.sqrt(1.0 - 4.0 * x * x)) / (2.0 * x)
        result = newton_evaluate(systems["binary"], x)
        assert abs(result.values["b"] - closed) < 1e-12, x


def test_evaluation_at_zero(systems):
    for name, system in systems.items():
        result = newton_evaluate(system, 0.0)
        assert all(v == 0.0 for v in result.values.values()), name


def test_quadratic_convergence_iteration_count(systems):
    # far below the singularity Newton needs only a handful of steps
    assert newton_evaluate(systems["ternary"], 0.3).iterations <= 10


def test_diverges_past_singularity(systems):
    with pytest.raises(DivergedError):
        newton_evaluate(systems["ternary"], 0.56)


def test_feed_rejects_negative_branch(systems):
    # past the pole the fixpoint that Newton can reach has a negative
    # sequence component; it must be classified as divergence
    with pytest.raises(DivergedError):
        newton_evaluate(systems["feed"], 0.65)


# ---------------------------------------------------------------------------
# singularity bracketing


def test_bracket_invariant(systems):
    est = estimate_singularity(systems["ternary"])
    assert est.upper - est.lower <= BRACKET_WIDTH * 1.001
    newton_evaluate(systems["ternary"], est.lower)
    with pytest.raises(DivergedError):
        newton_evaluate(systems["ternary"], est.upper)


@pytest.mark.parametrize(
    "name,rho",
    [
        ("ternary", TERNARY_RHO),
        ("binary", 0.5),
        ("oneormore", ONEORMORE_RHO),
        ("attrs", attrs_rho()),
        ("feed", FEED_RHO),
    ],
)
def test_bracket_contains_analytic_singularity(systems, name, rho):
    est = estimate_singularity(systems[name])
    assert est.lower <= rho <= est.upper, (name, est.lower, rho, est.upper)


def test_no_finite_singularity():
    grammar = parse_grammar(
        '<element name="a" %s><empty/></element>' % RNG
    )
    system = compile_grammar(grammar)
    with pytest.raises(NoFiniteSingularityError):
        estimate_singularity(system)
    with pytest.raises(NoFiniteSingularityError):
        solve(system, "auto")


# ---------------------------------------------------------------------------
# solve


def test_auto_point_sits_just_below_bracket(oracles):
    oracle = oracles["ternary"]
    assert oracle.x == oracle.rho_lower * (1.0 - AUTO_BACKOFF)
    assert oracle.rho_lower < TERNARY_RHO < oracle.rho_upper


def test_explicit_solve_records_no_bracket(systems):
    oracle = solve(systems["ternary"], 0.4)
    assert oracle.rho_lower is None and oracle.rho_upper is None
    assert oracle.x == 0.4


def test_explicit_divergence_reports_bracket(systems):
    with pytest.raises(DivergedError) as info:
        solve(systems["ternary"], 0.6)
    bracket = info.value.bracket
    assert bracket is not None
    assert bracket[0] <= TERNARY_RHO <= bracket[1]


def test_feed_divergence_reports_golden_bracket(systems):
    with pytest.raises(DivergedError) as info:
        solve(systems["feed"], 0.9)
    lo, hi = info.value.bracket
    assert lo <= FEED_RHO <= hi


def test_solve_carries_system_digest(systems, oracles):
    assert oracles["binary"].system_digest == systems["binary"].digest()


# ---------------------------------------------------------------------------
# oracle file


def test_oracle_round_trip(oracles, tmp_path):
    for name, oracle in oracles.items():
        path = tmp_path / (name + ".oracle")
        save_oracle(oracle, path)
        back = load_oracle(path)
        assert back == oracle, name  # 17 digits round-trip doubles exactly


def test_load_oracle_verifies_against_system(systems, oracles, tmp_path):
    path = tmp_path / "t.oracle"
    save_oracle(oracles["ternary"], path)
    load_oracle(path, system=systems["ternary"])
    with pytest.raises(OracleMismatchError, match="re-run solve"):
        load_oracle(path, system=systems["binary"])


def test_verify_rejects_missing_class(systems, oracles):
    import dataclasses

    oracle = oracles["feed"]
    clipped = dataclasses.replace(
        oracle,
        values={k: v for k, v in oracle.values.items() if k != "item"},
    )
    with pytest.raises(OracleMismatchError, match="item"):
        verify_oracle(clipped, systems["feed"])


def test_load_oracle_rejects_wrong_header(tmp_path, systems):
    path = tmp_path / "x.gfs"
    systems["ternary"].save(path)
    with pytest.raises(SystemFormatError, match="oracle"):
        load_oracle(path)


@pytest.mark.parametrize(
    "text,match",
    [
        ("boltzxml-oracle 1\nx 0.4\niterations 3\nresidual 0\n", "system"),
        (
            "boltzxml-oracle 1\nsystem ab\nx 0.4\niterations 3\nresidual 0\n"
            "class t 0.5\nclass t 0.5\n",
            "duplicate",
        ),
        (
            "boltzxml-oracle 1\nsystem ab\nx 0.4\niterations 3\nresidual 0\n"
            "class t nope\n",
            "bad value",
        ),
        (
            "boltzxml-oracle 1\nsystem ab\nx 0.4\niterations 3\nresidual 0\n"
            "wat 1\n",
            "unrecognized",
        ),
    ],
)
def test_load_oracle_rejects_malformed(tmp_path, text, match):
    path = tmp_path / "bad.oracle"
    path.write_text(text)
    with pytest.raises(SystemFormatError, match=match):
        load_oracle(path)


def test_written_precision_is_17_significant_digits(oracles, tmp_path):
    path = tmp_path / "p.oracle"
    save_oracle(oracles["ternary"], path)
    for line in path.read_text().splitlines():
        if line.startswith("class t "):
            digits = line.split()[-1].replace(".", "").replace("-", "").lstrip("0")
            assert len(digits) >= 16
