"""Exact coefficient extraction and exhaustive document enumeration.

count_coefficients runs a truncated power-series fixpoint on the equation
system using arbitrary-precision integers, layer by layer: products of
class series are maintained incrementally through a shared chain of pairwise
convolutions, so the total cost is O(chains * cutoff^2) big-int operations.

enumerate_documents lists every derivation of a given size, producing
documents with canonical leaf values; the list length equals the counting
coefficient for that size.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .datatypes import canonical_value
from .errors import EnumerationBoundError, IllFoundedSystemError
from .serialize import DocNode
from .system import compile_grammar

__all__ = ["CountingTable", "count_coefficients", "enumerate_documents"]


@dataclass
class CountingTable:
    """Coefficient table: counts[cls][n] objects of size n in class cls."""

    counts: dict
    cutoff: int
    start: str

    def coefficient(self, n, cls=None):
        if not 0 <= n <= self.cutoff:
            raise ValueError("size %d outside table range 0..%d" % (n, self.cutoff))
        return self.counts[cls or self.start][n]

    def series(self, cls=None):
        return list(self.counts[cls or self.start])


def _build_chains(system):
    """Rewrite monomials so every class product is a chain of pairwise
    convolutions; chains are shared across monomials by common prefix."""
    helper_index = {}
    helpers = []  # (left_src, right_class_name)

    def chain_for(factors):
        if len(factors) == 1:
            return ("cls", factors[0])
        key = factors
        if key in helper_index:
            return helper_index[key]
        left = chain_for(factors[:-1])
        helpers.append((left, factors[-1]))
        src = ("h", len(helpers) - 1)
        helper_index[key] = src
        return src

    plans = {}
    for name in system.classes:
        plan = []
        for mon in system.equations[name]:
            factors = []
            for cls, exp in mon.powers:
                factors.extend([cls] * exp)
            src = chain_for(tuple(factors)) if factors else None
            plan.append((mon.coeff, mon.xexp, src))
        plans[name] = plan
    return plans, helpers


def count_coefficients(system, cutoff):
    """Exact counts of objects of size 0..cutoff for every class."""
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    plans, helpers = _build_chains(system)
    series = {name: [0] * (cutoff + 1) for name in system.classes}
    hseries = [[0] * (cutoff + 1) for _ in helpers]

    def src_val(src, k):
        if k < 0:
            return 0
        if src[0] == "cls":
            return series[src[1]][k]
        return hseries[src[1]][k]

    max_passes = len(system.classes) + len(helpers) + 2
    for n in range(cutoff + 1):
        for _ in range(max_passes):
            changed = False
            for idx, (left, right) in enumerate(helpers):
                rs = series[right]
                total = 0
                for j in range(n + 1):
                    lv = src_val(left, j)
                    if lv:
                        rv = rs[n - j]
                        if rv:
                            total += lv * rv
                if total != hseries[idx][n]:
                    hseries[idx][n] = total
                    changed = True
            for name in system.classes:
                total = 0
                for coeff, xexp, src in plans[name]:
                    k = n - xexp
                    if k < 0:
                        continue
                    if src is None:
                        if k == 0:
                            total += coeff
                    else:
                        v = src_val(src, k)
                        if v:
                            total += coeff * v
                if total != series[name][n]:
                    series[name][n] = total
                    changed = True
            if not changed:
                break
        else:
            raise IllFoundedSystemError(
                "coefficient recursion does not settle at size %d" % n
            )
    return CountingTable(series, cutoff, system.start)


# ---------------------------------------------------------------------------
# exhaustive enumeration


def _enum_value(pattern):
    """All canonical string values an attribute content pattern can take."""
    p = pattern
    if isinstance(p, ast.Text):
        return (canonical_value("string"),)
    if isinstance(p, ast.Data):
        return (canonical_value(p.type),)
    if isinstance(p, ast.Value):
        return (p.literal,)
    if isinstance(p, ast.Empty):
        return ("",)
    if isinstance(p, ast.NotAllowed):
        return ()
    if isinstance(p, ast.Choice):
        return _enum_value(p.left) + _enum_value(p.right)
    if isinstance(p, ast.Group):
        return tuple(
            a + b for a in _enum_value(p.left) for b in _enum_value(p.right)
        )
    raise ValueError("unsupported pattern inside attribute: %s" % type(p).__name__)


def enumerate_documents(grammar, size, *, bound=10000, system=None, table=None):
    """Every document of exactly the given size, as DocNode trees.

    The result length equals the size-n counting coefficient of the start
    class (each derivation is listed once).  Raises EnumerationBoundError
    when that coefficient exceeds the bound."""
    if system is None:
        system = compile_grammar(grammar)
    if table is None:
        table = count_coefficients(system, size)
    total = table.coefficient(size)
    if total > bound:
        raise EnumerationBoundError(total, bound)

    memo = {}

    def enum(pattern, budget):
        key = (id(pattern), budget)
        hit = memo.get(key)
        if hit is not None:
            return hit
        result = compute(pattern, budget)
        memo[key] = result
        return result

    def compute(p, budget):
        if isinstance(p, ast.Empty):
            return ((),) if budget == 0 else ()
        if isinstance(p, ast.NotAllowed):
            return ()
        if isinstance(p, (ast.Text, ast.Data, ast.Value)):
            if budget != 0:
                return ()
            if isinstance(p, ast.Text):
                text = canonical_value("string")
            elif isinstance(p, ast.Data):
                text = canonical_value(p.type)
            else:
                text = p.literal
            return ((("t", text),),)
        if isinstance(p, ast.Attribute):
            if budget != 1:
                return ()
            return tuple((("a", p.name, v),) for v in _enum_value(p.content))
        if isinstance(p, ast.Ref):
            return enum(grammar.defines[p.name], budget)
        if isinstance(p, ast.Element):
            if budget < 1:
                return ()
            docs = []
            for frag in enum(p.content, budget - 1):
                attrs = tuple((item[1], item[2]) for item in frag if item[0] == "a")
                children = tuple(
                    item[1] for item in frag if item[0] in ("e", "t")
                )
                docs.append((("e", DocNode(p.name, attrs, children)),))
            return tuple(docs)
        if isinstance(p, ast.Choice):
            return enum(p.left, budget) + enum(p.right, budget)
        if isinstance(p, ast.Group):
            out = []
            for k in range(budget + 1):
                lefts = enum(p.left, k)
                if not lefts:
                    continue
                rights = enum(p.right, budget - k)
                for a in lefts:
                    for b in rights:
                        out.append(a + b)
            return tuple(out)
        if isinstance(p, ast.OneOrMore):
            return enum_seq(p, budget)
        raise ValueError("unexpected pattern %s" % type(p).__name__)

    seq_memo = {}

    def enum_seq(node, budget):
        key = (id(node), budget)
        hit = seq_memo.get(key)
        if hit is not None:
            return hit
        out = []
        for j in range(1, budget + 1):
            firsts = enum(node.child, j)
            if not firsts:
                continue
            if j == budget:
                out.extend(firsts)
            else:
                rests = enum_seq(node, budget - j)
                for a in firsts:
                    for rest in rests:
                        out.append(a + rest)
        result = tuple(out)
        seq_memo[key] = result
        return result

    docs = []
    for frag in enum(grammar.start, size):
        items = [item for item in frag]
        assert len(items) == 1 and items[0][0] == "e"
        docs.append(items[0][1])
    return docs
