"""Numerical evaluation of generating functions and singularity search.

newton_evaluate solves Y = Phi(x, Y) by Newton iteration from Y = 0,
solving the dense linear system (I - J) d = Phi(Y) - Y each step with
partial pivoting.  Below the dominant singularity the iteration converges
quadratically to the combinatorial fixed point; past it the values run
away, hit a singular matrix, or settle on a branch with negative
components, each of which is classified as divergence.  That dichotomy
drives the bisection in estimate_singularity.

Defaults: tolerance 1e-12 on both the update and the residual, value
ceiling 1e8, iteration cap 500, bisection bracket width 1e-8, automatic
evaluation point rho_lower * (1 - 1e-7).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergedError,
    NoFiniteSingularityError,
    OracleMismatchError,
    SystemFormatError,
)

__all__ = [
    "TOLERANCE",
    "VALUE_CEILING",
    "ITERATION_CAP",
    "BRACKET_WIDTH",
    "AUTO_BACKOFF",
    "NewtonResult",
    "SingularityEstimate",
    "OracleTable",
    "newton_evaluate",
    "estimate_singularity",
    "solve",
    "save_oracle",
    "load_oracle",
]

TOLERANCE = 1e-12
VALUE_CEILING = 1e8
ITERATION_CAP = 500
BRACKET_WIDTH = 1e-8
AUTO_BACKOFF = 1e-7

_ORACLE_HEADER = "boltzxml-oracle 1"


class _NumSystem:
    """Index-based float view of a GfSystem for fast Phi and Jacobian."""

    def __init__(self, system):
        self.names = list(system.classes)
        index = {name: i for i, name in enumerate(self.names)}
        self.eqs = []
        for name in self.names:
            mons = []
            for mon in system.equations[name]:
                powers = tuple((index[c], e) for c, e in mon.powers)
                mons.append((float(mon.coeff), mon.xexp, powers))
            self.eqs.append(mons)
        self.m = len(self.names)

    def bind(self, x):
        """Pre-multiply each monomial coefficient by x**xexp."""
        bound = []
        for mons in self.eqs:
            bound.append(
                [(c * x**xe, powers) for c, xe, powers in mons]
            )
        return bound

    @staticmethod
    def phi(bound, Y):
        out = np.zeros(len(bound))
        for i, mons in enumerate(bound):
            total = 0.0
            for cx, powers in mons:
                term = cx
                for j, e in powers:
                    term *= Y[j] ** e
                total += term
            out[i] = total
        return out

    @staticmethod
    def jacobian(bound, Y):
        m = len(bound)
        J = np.zeros((m, m))
        for i, mons in enumerate(bound):
            for cx, powers in mons:
                for k, (j, e) in enumerate(powers):
                    term = cx * e * Y[j] ** (e - 1)
                    for jj, ee in powers[:k] + powers[k + 1:]:
                        term *= Y[jj] ** ee
                    J[i, j] += term
        return J


@dataclass
class NewtonResult:
    values: dict
    iterations: int
    residual: float


def _as_num(system):
    if isinstance(system, _NumSystem):
        return system
    return _NumSystem(system)


def newton_evaluate(
    system,
    x,
    *,
    tolerance=TOLERANCE,
    ceiling=VALUE_CEILING,
    iteration_cap=ITERATION_CAP,
):
    """Evaluate all class generating functions at x, or raise DivergedError."""
    num = _as_num(system)
    bound = num.bind(x)
    m = num.m
    Y = np.zeros(m)
    eye = np.eye(m)
    for it in range(1, iteration_cap + 1):
        F = num.phi(bound, Y)
        if not np.all(np.isfinite(F)) or np.any(F > ceiling):
            raise DivergedError(x, "values exceeded the ceiling %g" % ceiling)
        J = num.jacobian(bound, Y)
        try:
            delta = np.linalg.solve(eye - J, F - Y)
        except np.linalg.LinAlgError:
            raise DivergedError(x, "singular Newton matrix") from None
        Y = Y + delta
        if not np.all(np.isfinite(Y)) or np.any(np.abs(Y) > ceiling):
            raise DivergedError(x, "values exceeded the ceiling %g" % ceiling)
        if np.max(np.abs(delta)) < tolerance:
            residual = float(np.max(np.abs(num.phi(bound, Y) - Y)))
            if residual >= tolerance:
                continue
            if np.min(Y) < -1e-9:
                raise DivergedError(
                    x, "converged to a branch with negative components"
                )
            Y = np.maximum(Y, 0.0)
            values = {name: float(Y[i]) for i, name in enumerate(num.names)}
            return NewtonResult(values, it, residual)
    raise DivergedError(x, "no convergence within %d iterations" % iteration_cap)


@dataclass
class SingularityEstimate:
    rho: float
    lower: float
    upper: float


def estimate_singularity(
    system,
    *,
    xmax=1.0,
    bracket_width=BRACKET_WIDTH,
    tolerance=TOLERANCE,
    ceiling=VALUE_CEILING,
    iteration_cap=ITERATION_CAP,
):
    """Bisection estimate of the dominant singularity.

    Invariant: Newton converges at the lower end and diverges at the upper
    end.  Raises NoFiniteSingularityError if it converges at xmax."""
    num = _as_num(system)

    def converges(x):
        try:
            newton_evaluate(
                num, x, tolerance=tolerance, ceiling=ceiling,
                iteration_cap=iteration_cap,
            )
            return True
        except DivergedError:
            return False

    if converges(xmax):
        raise NoFiniteSingularityError(xmax)
    lo, hi = 0.0, xmax
    while hi - lo > bracket_width:
        mid = 0.5 * (lo + hi)
        if converges(mid):
            lo = mid
        else:
            hi = mid
    return SingularityEstimate(rho=lo, lower=lo, upper=hi)


@dataclass
class OracleTable:
    """Solved evaluation point: x, one value per class, and metadata."""

    x: float
    values: dict
    rho_lower: "float | None"
    rho_upper: "float | None"
    iterations: int
    residual: float
    system_digest: str

    def value(self, cls):
        return self.values[cls]


def solve(
    system,
    x="auto",
    *,
    backoff=AUTO_BACKOFF,
    xmax=1.0,
    bracket_width=BRACKET_WIDTH,
    tolerance=TOLERANCE,
    ceiling=VALUE_CEILING,
    iteration_cap=ITERATION_CAP,
):
    """Produce an OracleTable for a system.

    With x="auto" the singularity is bracketed first and the evaluation
    point is rho_lower * (1 - backoff).  With an explicit x the values are
    computed directly; if Newton diverges there, the singularity is
    bracketed and reported in the error."""
    kw = dict(tolerance=tolerance, ceiling=ceiling, iteration_cap=iteration_cap)
    num = _NumSystem(system)
    digest = system.digest()
    if x == "auto":
        est = estimate_singularity(
            num, xmax=xmax, bracket_width=bracket_width, **kw
        )
        point = est.rho * (1.0 - backoff)
        result = newton_evaluate(num, point, **kw)
        return OracleTable(
            x=point,
            values=result.values,
            rho_lower=est.lower,
            rho_upper=est.upper,
            iterations=result.iterations,
            residual=result.residual,
            system_digest=digest,
        )
    x = float(x)
    try:
        result = newton_evaluate(num, x, **kw)
    except DivergedError as exc:
        try:
            est = estimate_singularity(
                num, xmax=xmax, bracket_width=bracket_width, **kw
            )
            bracket = (est.lower, est.upper)
        except NoFiniteSingularityError:
            bracket = None
        raise DivergedError(x, exc.reason, bracket=bracket) from None
    return OracleTable(
        x=x,
        values=result.values,
        rho_lower=None,
        rho_upper=None,
        iterations=result.iterations,
        residual=result.residual,
        system_digest=digest,
    )


# ---------------------------------------------------------------------------
# oracle file format


def _fmt(v):
    return "%.17g" % v


def save_oracle(oracle, path):
    lines = [
        _ORACLE_HEADER,
        "system %s" % oracle.system_digest,
        "x %s" % _fmt(oracle.x),
        "rho-lo %s" % (_fmt(oracle.rho_lower) if oracle.rho_lower is not None else "none"),
        "rho-hi %s" % (_fmt(oracle.rho_upper) if oracle.rho_upper is not None else "none"),
        "iterations %d" % oracle.iterations,
        "residual %s" % _fmt(oracle.residual),
    ]
    for name, value in oracle.values.items():
        lines.append("class %s %s" % (name, _fmt(value)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_oracle(path, system=None):
    """Read an oracle file; verify its digest against a system if given."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != _ORACLE_HEADER:
        raise SystemFormatError("%s: not an oracle file (missing header)" % path)
    fields = {}
    values = {}
    for lineno, line in enumerate(lines[1:], 2):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "class":
            if len(parts) != 3:
                raise SystemFormatError("line %d: bad class line" % lineno)
            if parts[1] in values:
                raise SystemFormatError(
                    "line %d: duplicate class %r" % (lineno, parts[1])
                )
            try:
                values[parts[1]] = float(parts[2])
            except ValueError:
                raise SystemFormatError(
                    "line %d: bad value %r" % (lineno, parts[2])
                ) from None
        elif parts[0] in ("system", "x", "rho-lo", "rho-hi", "iterations", "residual"):
            if len(parts) != 2:
                raise SystemFormatError("line %d: bad %s line" % (lineno, parts[0]))
            fields[parts[0]] = parts[1]
        else:
            raise SystemFormatError("line %d: unrecognized line %r" % (lineno, line))
    missing = {"system", "x", "iterations", "residual"} - set(fields)
    if missing:
        raise SystemFormatError(
            "%s: missing field(s): %s" % (path, ", ".join(sorted(missing)))
        )

    def opt_float(key):
        raw = fields.get(key, "none")
        return None if raw == "none" else float(raw)

    try:
        oracle = OracleTable(
            x=float(fields["x"]),
            values=values,
            rho_lower=opt_float("rho-lo"),
            rho_upper=opt_float("rho-hi"),
            iterations=int(fields["iterations"]),
            residual=float(fields["residual"]),
            system_digest=fields["system"],
        )
    except ValueError as exc:
        raise SystemFormatError("%s: %s" % (path, exc)) from None
    if system is not None:
        verify_oracle(oracle, system)
    return oracle


def verify_oracle(oracle, system):
    digest = system.digest()
    if oracle.system_digest != digest:
        raise OracleMismatchError(
            "oracle was solved for system %s... but this system is %s...; "
            "re-run solve to refresh it"
            % (oracle.system_digest[:12], digest[:12])
        )
    missing = set(system.classes) - set(oracle.values)
    if missing:
        raise OracleMismatchError(
            "oracle lacks values for class(es): %s" % ", ".join(sorted(missing))
        )


def file_digest(path):
    """sha256 of a file's bytes, for manifest chaining."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
