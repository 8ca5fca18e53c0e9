"""Polynomial equation systems over counting generating functions.

A grammar compiles to one equation per combinatorial class: one class per
element definition, one per repetition node, plus a synthetic start class
when the start pattern is a choice.  Each equation is a polynomial with
nonnegative integer coefficients in the size variable x and the class
variables.  Size counts elements and attributes, each contributing one
factor of x; text, data and value leaves contribute none.

Translation rules: choice adds, group multiplies, an element definition e
with content pattern p yields e = x * poly(p), an attribute multiplies by
x, and oneOrMore over p introduces a fresh class s = poly(p) + poly(p) * s.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import ast
from .errors import CompileError, IllFoundedSystemError, SystemFormatError

__all__ = [
    "Monomial",
    "GfSystem",
    "compile_grammar",
    "load_system",
    "save_system",
]

_FORMAT_HEADER = "boltzxml-system 1"


@dataclass(frozen=True)
class Monomial:
    """coeff * x**xexp * product(class**exp for class, exp in powers)."""

    coeff: int
    xexp: int
    powers: tuple  # ((class_name, exponent), ...) sorted by class name

    def format(self):
        parts = [str(self.coeff), str(self.xexp)]
        parts.extend("%s:%d" % (name, exp) for name, exp in self.powers)
        return " ".join(parts)


class GfSystem:
    """An ordered set of polynomial class equations with a start class."""

    def __init__(self, classes, equations, start, provenance=None, grammar_digest=None):
        self.classes = list(classes)
        self.equations = {name: tuple(equations[name]) for name in self.classes}
        self.start = start
        self.provenance = provenance or {}
        self.grammar_digest = grammar_digest
        if start not in self.equations:
            raise SystemFormatError("start class %r has no equation" % start)

    @property
    def n_equations(self):
        return len(self.classes)

    @property
    def n_monomials(self):
        return sum(len(eq) for eq in self.equations.values())

    def __eq__(self, other):
        if not isinstance(other, GfSystem):
            return NotImplemented
        return (
            self.classes == other.classes
            and self.equations == other.equations
            and self.start == other.start
        )

    def to_text(self):
        lines = [
            _FORMAT_HEADER,
            "grammar-digest %s" % (self.grammar_digest or "none"),
            "classes %d" % len(self.classes),
            "start %s" % self.start,
        ]
        for name in self.classes:
            eq = self.equations[name]
            body = " + ".join(m.format() for m in eq) if eq else "0"
            lines.append("eq %s = %s" % (name, body))
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())


# ---------------------------------------------------------------------------
# grammar -> system

_ONE = (0, ())


def _p_add(a, b):
    out = dict(a)
    for key, coeff in b.items():
        out[key] = out.get(key, 0) + coeff
    return out


def _p_mul(a, b):
    out = {}
    for (xa, pa), ca in a.items():
        for (xb, pb), cb in b.items():
            powers = dict(pa)
            for name, exp in pb:
                powers[name] = powers.get(name, 0) + exp
            key = (xa + xb, tuple(sorted(powers.items())))
            out[key] = out.get(key, 0) + ca * cb
    return out


def _p_shift(a):
    return {(x + 1, p): c for (x, p), c in a.items()}


def _canon(poly):
    return tuple(sorted(poly.items()))


class _Compiler:
    def __init__(self, grammar):
        self.grammar = grammar
        self.classes = []
        self.equations = {}
        self.provenance = {}
        self.seq_cache = {}
        self.seq_serial = 0

    def class_order(self):
        """Definitions reachable from the start pattern, depth first."""
        order = []
        seen = set()

        def refs_of(pattern):
            return [
                n.name for n in ast.iter_nodes(pattern) if isinstance(n, ast.Ref)
            ]

        def visit(name):
            if name in seen:
                return
            seen.add(name)
            order.append(name)
            for ref in refs_of(self.grammar.defines[name]):
                visit(ref)

        for ref in refs_of(self.grammar.start):
            visit(ref)
        return order

    def poly(self, pattern):
        p = pattern
        if isinstance(p, (ast.Empty, ast.Text, ast.Data, ast.Value)):
            return {_ONE: 1}
        if isinstance(p, ast.NotAllowed):
            return {}
        if isinstance(p, ast.Ref):
            return {(0, ((p.name, 1),)): 1}
        if isinstance(p, ast.Attribute):
            return _p_shift(self.poly(p.content))
        if isinstance(p, ast.Choice):
            return _p_add(self.poly(p.left), self.poly(p.right))
        if isinstance(p, ast.Group):
            return _p_mul(self.poly(p.left), self.poly(p.right))
        if isinstance(p, ast.OneOrMore):
            return self.seq_class(p)
        raise CompileError("unexpected pattern node %s" % type(p).__name__)

    def seq_class(self, node):
        pp = self.poly(node.child)
        # constant term: class variables all have zero constant term, so
        # only the bare (x^0, no classes) monomial contributes
        if pp.get(_ONE, 0):
            line = node.loc[0] if node.loc else None
            raise CompileError(
                "oneOrMore applied to a pattern that can match empty "
                "content, which would allow unbounded repetition at no size",
                line=line,
            )
        key = _canon(pp)
        name = self.seq_cache.get(key)
        if name is None:
            self.seq_serial += 1
            name = "seq:%d" % self.seq_serial
            self.seq_cache[key] = name
            self.classes.append(name)
            self_term = {(0, ((name, 1),)): 1}
            self.equations[name] = _p_add(pp, _p_mul(pp, self_term))
            self.provenance[name] = node
        return {(0, ((name, 1),)): 1}

    def run(self, grammar_digest=None):
        g = self.grammar
        define_order = self.class_order()

        start_name = None
        if isinstance(g.start, ast.Ref):
            start_name = g.start.name
        else:
            start_name = "start"
            serial = 1
            while start_name in g.defines:
                serial += 1
                start_name = "start.%d" % serial
            self.classes.append(start_name)

        self.classes.extend(define_order)
        if start_name not in define_order:
            self.equations[start_name] = self.poly(g.start)
            self.provenance[start_name] = g.start
        for name in define_order:
            body = g.defines[name]
            self.equations[name] = _p_shift(self.poly(body.content))
            self.provenance[name] = body

        classes, equations = self.prune_empty(start_name)
        eq_tuples = {
            name: tuple(
                Monomial(coeff, xexp, powers)
                for (xexp, powers), coeff in sorted(equations[name].items())
            )
            for name in classes
        }
        system = GfSystem(
            classes,
            eq_tuples,
            start_name,
            provenance=self.provenance,
            grammar_digest=grammar_digest,
        )
        check_well_founded(system)
        return system

    def prune_empty(self, start_name):
        """Drop classes whose generating function is identically zero."""
        nonempty = set()
        changed = True
        while changed:
            changed = False
            for name in self.classes:
                if name in nonempty:
                    continue
                for (xexp, powers), coeff in self.equations[name].items():
                    if all(cls in nonempty for cls, _ in powers):
                        nonempty.add(name)
                        changed = True
                        break
        if start_name not in nonempty:
            raise CompileError("the start pattern matches no documents")
        classes = [c for c in self.classes if c in nonempty]
        equations = {}
        for name in classes:
            equations[name] = {
                key: coeff
                for key, coeff in self.equations[name].items()
                if all(cls in nonempty for cls, _ in key[1])
            }
        return classes, equations


def compile_grammar(grammar, grammar_digest=None):
    """Compile a normalized grammar into its generating-function system."""
    return _Compiler(grammar).run(grammar_digest=grammar_digest)


# ---------------------------------------------------------------------------
# well-foundedness

_CONST_CAP = 1 << 63


def check_well_founded(system):
    """Verify the system defines finitely many objects of every size.

    Two-step test: the constant vector (all generating functions at x = 0)
    must reach a fixpoint, and the class dependency graph through
    zero-size monomials, weighted by that fixpoint, must be acyclic."""
    classes = system.classes
    const = {c: 0 for c in classes}
    for _ in range(len(classes) + 2):
        nxt = {}
        for name in classes:
            total = 0
            for mon in system.equations[name]:
                if mon.xexp:
                    continue
                term = mon.coeff
                for cls, exp in mon.powers:
                    term *= const[cls] ** exp
                total += term
                if total > _CONST_CAP:
                    raise IllFoundedSystemError(
                        "constant terms grow without bound (class %r)" % name
                    )
            nxt[name] = total
        if nxt == const:
            break
        const = nxt
    else:
        raise IllFoundedSystemError("constant terms never reach a fixpoint")

    edges = {c: set() for c in classes}
    for name in classes:
        for mon in system.equations[name]:
            if mon.xexp:
                continue
            for cls, exp in mon.powers:
                rest = mon.coeff * (exp if const[cls] else 1)
                if exp > 1 and const[cls] == 0:
                    continue
                for other, oexp in mon.powers:
                    if other != cls:
                        rest *= const[other] ** oexp
                if rest > 0:
                    edges[name].add(cls)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {c: WHITE for c in classes}

    def dfs(node, trail):
        color[node] = GRAY
        trail.append(node)
        for nxt in sorted(edges[node]):
            if color[nxt] == GRAY:
                cycle = trail[trail.index(nxt):] + [nxt]
                raise IllFoundedSystemError(
                    "zero-size recursion cycle: %s" % " -> ".join(cycle)
                )
            if color[nxt] == WHITE:
                dfs(nxt, trail)
        trail.pop()
        color[node] = BLACK

    for c in classes:
        if color[c] == WHITE:
            dfs(c, [])
    return const


# ---------------------------------------------------------------------------
# file format

def save_system(system, path):
    system.save(path)


def _parse_monomial(token, lineno):
    parts = token.split()
    if len(parts) < 2:
        raise SystemFormatError("line %d: monomial needs coeff and xexp" % lineno)
    try:
        coeff = int(parts[0])
        xexp = int(parts[1])
    except ValueError:
        raise SystemFormatError(
            "line %d: bad integer in monomial %r" % (lineno, token)
        ) from None
    if coeff < 1 or xexp < 0:
        raise SystemFormatError(
            "line %d: coefficients must be positive and exponents "
            "nonnegative" % lineno
        )
    powers = {}
    for part in parts[2:]:
        if ":" not in part:
            raise SystemFormatError(
                "line %d: class factor %r is not name:exp" % (lineno, part)
            )
        name, _, exp_s = part.rpartition(":")
        try:
            exp = int(exp_s)
        except ValueError:
            raise SystemFormatError(
                "line %d: bad exponent in %r" % (lineno, part)
            ) from None
        if exp < 1:
            raise SystemFormatError("line %d: exponents must be >= 1" % lineno)
        powers[name] = powers.get(name, 0) + exp
    return coeff, xexp, tuple(sorted(powers.items()))


def load_system(path):
    """Read a system file, validate it and re-run the well-founded check."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != _FORMAT_HEADER:
        raise SystemFormatError("%s: not a system file (missing header)" % path)

    grammar_digest = None
    declared = None
    start = None
    classes = []
    raw_eqs = {}
    for lineno, line in enumerate(lines[1:], 2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("grammar-digest "):
            value = line.split(None, 1)[1]
            grammar_digest = None if value == "none" else value
        elif line.startswith("classes "):
            try:
                declared = int(line.split(None, 1)[1])
            except ValueError:
                raise SystemFormatError("line %d: bad class count" % lineno) from None
        elif line.startswith("start "):
            start = line.split(None, 1)[1]
        elif line.startswith("eq "):
            head, _, body = line[3:].partition("=")
            name = head.strip()
            if not name:
                raise SystemFormatError("line %d: equation has no class name" % lineno)
            if name in raw_eqs:
                raise SystemFormatError(
                    "line %d: duplicate equation for %r" % (lineno, name)
                )
            classes.append(name)
            body = body.strip()
            if body == "0":
                raw_eqs[name] = []
            else:
                raw_eqs[name] = [
                    _parse_monomial(tok.strip(), lineno)
                    for tok in body.split("+")
                ]
        else:
            raise SystemFormatError("line %d: unrecognized line %r" % (lineno, line))

    if declared is None or start is None:
        raise SystemFormatError("%s: missing classes or start header line" % path)
    if declared != len(classes):
        raise SystemFormatError(
            "%s: header declares %d classes but %d equations found"
            % (path, declared, len(classes))
        )
    known = set(classes)
    if start not in known:
        raise SystemFormatError(
            "%s: start class %r has no equation" % (path, start)
        )
    equations = {}
    for name in classes:
        merged = {}
        for coeff, xexp, powers in raw_eqs[name]:
            for cls, _ in powers:
                if cls not in known:
                    raise SystemFormatError(
                        "%s: equation for %r references undeclared class %r"
                        % (path, name, cls)
                    )
            key = (xexp, powers)
            merged[key] = merged.get(key, 0) + coeff
        equations[name] = tuple(
            Monomial(coeff, xexp, powers)
            for (xexp, powers), coeff in sorted(merged.items())
        )
    system = GfSystem(classes, equations, start, grammar_digest=grammar_digest)
    check_well_founded(system)
    return system
