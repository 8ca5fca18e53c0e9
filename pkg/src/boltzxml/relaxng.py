"""RELAX NG (XML syntax) parser producing the normalized pattern AST.

The supported subset covers named elements and attributes, choice, group,
interleave, optional, zeroOrMore, oneOrMore, mixed, ref/define, text, empty,
notAllowed, data (with params) and value.  Name classes (anyName, nsName),
externalRef, include, list and the compact syntax are rejected with an error
naming the feature.

Normalization performed here, in order: syntactic sugar is rewritten
(zeroOrMore, optional, mixed become choice/oneOrMore/group forms, interleave
is approximated by group, n-ary choice and group fold to binary), every
inline element pattern is hoisted to a fresh named definition, every
definition whose body is not an element is inlined at its use sites, unused
definitions are dropped.  The result satisfies ast.check_normal_form, and
recursion is guaranteed to pass through an element: a definition cycle that
never crosses one is reported as an error during inlining.
"""

from __future__ import annotations

import re

from . import ast
from ._xmlread import XmlNode, read_xml
from .errors import GrammarError

__all__ = ["RNG_NS", "parse_grammar", "parse_grammar_file"]

RNG_NS = "http://relaxng.org/ns/structure/1.0"

_UNSUPPORTED = {
    "externalRef": "externalRef",
    "include": "include",
    "parentRef": "parentRef",
    "list": "list",
    "anyName": "anyName name class",
    "nsName": "nsName name class",
    "except": "except",
    "grammar": "nested grammar",
}

# QName: optional prefix, both parts NCName-shaped
_NAME_RE = re.compile(r"^[^\W\d][\w.\-]*(:[^\W\d][\w.\-]*)?$")


class _Builder:
    def __init__(self, source):
        self.source = source

    def err(self, message, node):
        line = getattr(node, "line", None)
        col = getattr(node, "column", None)
        raise GrammarError(message, source=self.source, line=line, column=col)

    # -- helpers ----------------------------------------------------------

    def rng_children(self, node):
        out = []
        for child in node.children:
            if isinstance(child, XmlNode) and child.uri == RNG_NS:
                out.append(child)
            # character data and foreign-namespace annotations are ignored
        return out

    def loc(self, node):
        return (node.line, node.column)

    def named_pattern(self, node, kind, ns):
        """Extract the name of an element or attribute pattern and return
        (name, remaining pattern children)."""
        children = self.rng_children(node)
        if "name" in node.attrs:
            name = node.attrs["name"].strip()
            if not _NAME_RE.match(name):
                self.err("invalid %s name %r" % (kind, name), node)
            return name, children
        if children and children[0].local in ("anyName", "nsName", "choice"):
            feature = children[0].local
            if feature == "choice":
                feature = "name-class choice"
            self.err("unsupported RELAX NG feature: %s" % feature, children[0])
        if children and children[0].local == "name":
            name = children[0].text().strip()
            if not _NAME_RE.match(name):
                self.err("invalid %s name %r" % (kind, name), children[0])
            return name, children[1:]
        self.err("%s pattern has no name" % kind, node)

    def fold(self, node, patterns, cls):
        if not patterns:
            self.err("%s needs at least one pattern" % node.local, node)
        result = patterns[-1]
        for p in reversed(patterns[:-1]):
            result = cls(p, result, loc=self.loc(node))
        return result

    def build_list(self, nodes, ns):
        return [self.build(c, ns) for c in nodes]

    def group_of(self, node, children, ns):
        return self.fold(node, self.build_list(children, ns), ast.Group)

    # -- pattern dispatch -------------------------------------------------

    def build(self, node, ns):
        if node.uri != RNG_NS:
            self.err("element %r is not in the RELAX NG namespace" % node.local, node)
        if "ns" in node.attrs:
            ns = node.attrs["ns"] or None
        local = node.local
        loc = self.loc(node)

        if local == "element":
            name, rest = self.named_pattern(node, "element", ns)
            if not rest:
                self.err("element %r has no content pattern" % name, node)
            content = self.group_of(node, rest, ns)
            return ast.Element(name, content, ns=ns, loc=loc)

        if local == "attribute":
            # attribute ns is not inherited; only an explicit ns applies
            own_ns = node.attrs.get("ns") or None
            name, rest = self.named_pattern(node, "attribute", ns)
            if rest:
                content = self.group_of(node, rest, ns)
            else:
                content = ast.Text(loc=loc)  # default attribute content
            return ast.Attribute(name, content, ns=own_ns, loc=loc)

        if local == "choice":
            return self.fold(node, self.build_list(self.rng_children(node), ns), ast.Choice)
        if local in ("group", "div"):
            return self.group_of(node, self.rng_children(node), ns)
        if local == "interleave":
            # approximated by an ordered group; document order is kept
            return self.group_of(node, self.rng_children(node), ns)
        if local == "optional":
            inner = self.group_of(node, self.rng_children(node), ns)
            return ast.Choice(ast.Empty(loc=loc), inner, loc=loc)
        if local == "zeroOrMore":
            inner = self.group_of(node, self.rng_children(node), ns)
            return ast.Choice(ast.Empty(loc=loc), ast.OneOrMore(inner, loc=loc), loc=loc)
        if local == "oneOrMore":
            inner = self.group_of(node, self.rng_children(node), ns)
            return ast.OneOrMore(inner, loc=loc)
        if local == "mixed":
            inner = self.group_of(node, self.rng_children(node), ns)
            return ast.Group(ast.Text(loc=loc), inner, loc=loc)
        if local == "ref":
            name = node.attrs.get("name", "").strip()
            if not name:
                self.err("ref has no name attribute", node)
            return ast.Ref(name, loc=loc)
        if local == "text":
            return ast.Text(loc=loc)
        if local == "empty":
            return ast.Empty(loc=loc)
        if local == "notAllowed":
            return ast.NotAllowed(loc=loc)
        if local == "value":
            return ast.Value(node.attrs.get("type", "token"), node.text(), loc=loc)
        if local == "data":
            dtype = node.attrs.get("type")
            if not dtype:
                self.err("data pattern has no type attribute", node)
            params = []
            for child in self.rng_children(node):
                if child.local == "param":
                    pname = child.attrs.get("name")
                    if not pname:
                        self.err("param has no name attribute", child)
                    params.append((pname, child.text()))
                elif child.local == "except":
                    self.err("unsupported RELAX NG feature: data/except", child)
                else:
                    self.err("unexpected %r inside data" % child.local, child)
            return ast.Data(dtype, tuple(params), loc=loc)
        if local in _UNSUPPORTED:
            self.err("unsupported RELAX NG feature: %s" % _UNSUPPORTED[local], node)
        self.err("unknown RELAX NG element %r" % local, node)

    # -- grammar container ------------------------------------------------

    def combine(self, node, entries, what):
        """Apply RELAX NG combine semantics to [(combine, pattern, node)]."""
        plain = [e for e in entries if e[0] is None]
        methods = {e[0] for e in entries if e[0] is not None}
        if len(plain) > 1 or (plain and len(entries) > 1 and not methods):
            self.err("multiple definitions of %s without combine" % what, node)
        if len(methods) > 1:
            self.err("conflicting combine methods for %s" % what, node)
        if len(entries) > 1 and not methods:
            self.err("multiple definitions of %s without combine" % what, node)
        patterns = [e[1] for e in entries]
        if len(patterns) == 1:
            return patterns[0]
        cls = ast.Choice if methods == {"choice"} else ast.Group
        result = patterns[-1]
        for p in reversed(patterns[:-1]):
            result = cls(p, result, loc=self.loc(node))
        return result

    def grammar_body(self, node, ns, starts, defines):
        for child in self.rng_children(node):
            if child.local == "start":
                inner = self.group_of(child, self.rng_children(child), ns)
                starts.append((child.attrs.get("combine"), inner, child))
            elif child.local == "define":
                name = child.attrs.get("name", "").strip()
                if not name:
                    self.err("define has no name attribute", child)
                inner = self.group_of(child, self.rng_children(child), ns)
                defines.setdefault(name, []).append(
                    (child.attrs.get("combine"), inner, child)
                )
            elif child.local == "div":
                self.grammar_body(child, child.attrs.get("ns", ns), starts, defines)
            elif child.local == "include":
                self.err("unsupported RELAX NG feature: include", child)
            else:
                self.err("unexpected %r inside grammar" % child.local, child)


def parse_grammar(data, source="<grammar>"):
    """Parse RELAX NG XML (bytes or str) into a normalized Grammar."""
    b = _Builder(source)
    root = read_xml(data, source=source)
    if root.uri != RNG_NS:
        raise GrammarError(
            "root element is not in the RELAX NG namespace (%s)" % RNG_NS,
            source=source,
            line=root.line,
            column=root.column,
        )
    ns = root.attrs.get("ns") or None
    if root.local == "grammar":
        starts, defines_raw = [], {}
        b.grammar_body(root, ns, starts, defines_raw)
        if not starts:
            b.err("grammar has no start pattern", root)
        start = b.combine(starts[0][2], starts, "start")
        defines = {
            name: b.combine(entries[0][2], entries, "define %r" % name)
            for name, entries in defines_raw.items()
        }
    else:
        start = b.build(root, ns)
        defines = {}
    return _normalize(start, defines, source)


def parse_grammar_file(path):
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_grammar(data, source=str(path))


# ---------------------------------------------------------------------------
# normalization passes


def _normalize(start, defines, source):
    _check_refs(start, defines, source)
    start, defines = _hoist(start, defines, source)
    start, defines = _inline(start, defines, source)
    defines = _prune(start, defines)
    _check_start(start, source)
    _check_attributes(start, defines, source)
    grammar = ast.Grammar(start, defines, source=source)
    ast.check_normal_form(grammar)
    return grammar


def _located(source, node):
    line, col = node.loc if node.loc else (None, None)
    return dict(source=source, line=line, column=col)


def _check_refs(start, defines, source):
    for pat in [start, *defines.values()]:
        for node in ast.iter_nodes(pat):
            if isinstance(node, ast.Ref) and node.name not in defines:
                raise GrammarError(
                    "reference to undefined pattern %r" % node.name,
                    **_located(source, node),
                )


def _hoist(start, defines, source):
    """Give every inline element pattern a fresh named definition."""
    used = set(defines)
    new_defines = {}

    def alloc(element_name):
        base = element_name.split(":")[-1]
        name = base
        serial = 1
        while name in used:
            serial += 1
            name = "%s.%d" % (base, serial)
        used.add(name)
        return name

    def tx(p, at_root):
        if isinstance(p, ast.Element):
            content = tx(p.content, False)
            elem = ast.Element(p.name, content, ns=p.ns, loc=p.loc)
            if at_root:
                return elem
            fresh = alloc(p.name)
            new_defines[fresh] = elem
            return ast.Ref(fresh, loc=p.loc)
        if isinstance(p, (ast.Choice, ast.Group)):
            return type(p)(tx(p.left, False), tx(p.right, False), loc=p.loc)
        if isinstance(p, ast.OneOrMore):
            return ast.OneOrMore(tx(p.child, False), loc=p.loc)
        if isinstance(p, ast.Attribute):
            return ast.Attribute(p.name, tx(p.content, False), ns=p.ns, loc=p.loc)
        return p

    start2 = tx(start, False)
    out = {}
    for name, body in defines.items():
        out[name] = tx(body, isinstance(body, ast.Element))
    out.update(new_defines)
    return start2, out


def _inline(start, defines, source):
    """Substitute non-element definitions into their use sites.

    A cycle among such definitions means recursion that never crosses an
    element, which would admit infinitely many documents of one size."""
    element_defs = {n: b for n, b in defines.items() if isinstance(b, ast.Element)}
    other_defs = {n: b for n, b in defines.items() if n not in element_defs}
    resolved = {}

    def expand(name, trail):
        if name in resolved:
            return resolved[name]
        if name in trail:
            cycle = trail[trail.index(name):] + [name]
            node = other_defs[name]
            raise GrammarError(
                "recursive definition without an intervening element: %s"
                % " -> ".join(cycle),
                **_located(source, node),
            )
        result = subst(other_defs[name], trail + [name])
        resolved[name] = result
        return result

    def subst(p, trail):
        if isinstance(p, ast.Ref):
            if p.name in other_defs:
                return expand(p.name, trail)
            return p
        if isinstance(p, (ast.Choice, ast.Group)):
            return type(p)(subst(p.left, trail), subst(p.right, trail), loc=p.loc)
        if isinstance(p, ast.OneOrMore):
            return ast.OneOrMore(subst(p.child, trail), loc=p.loc)
        if isinstance(p, ast.Attribute):
            return ast.Attribute(p.name, subst(p.content, trail), ns=p.ns, loc=p.loc)
        if isinstance(p, ast.Element):
            return ast.Element(p.name, subst(p.content, trail), ns=p.ns, loc=p.loc)
        return p

    start2 = subst(start, [])
    out = {}
    for name, body in element_defs.items():
        out[name] = subst(body, [])
    return start2, out


def _prune(start, defines):
    reachable = set()
    stack = [start]
    while stack:
        pat = stack.pop()
        for node in ast.iter_nodes(pat):
            if isinstance(node, ast.Ref) and node.name not in reachable:
                reachable.add(node.name)
                stack.append(defines[node.name])
    return {n: defines[n] for n in defines if n in reachable}


def _check_start(start, source):
    stack = [start]
    while stack:
        node = stack.pop()
        if isinstance(node, ast.Choice):
            stack.extend((node.left, node.right))
        elif not isinstance(node, (ast.Ref, ast.NotAllowed)):
            raise GrammarError(
                "start pattern must be a choice of element patterns, "
                "found %s" % type(node).__name__.lower(),
                **_located(source, node),
            )


def _check_attributes(start, defines, source):
    for pat in [start, *defines.values()]:
        for node in ast.iter_nodes(pat):
            if isinstance(node, ast.Attribute):
                for inner in ast.iter_nodes(node.content):
                    if isinstance(inner, (ast.Element, ast.Ref)):
                        raise GrammarError(
                            "attribute %r contains an element pattern" % node.name,
                            **_located(source, node),
                        )
                    if isinstance(inner, ast.Attribute) and inner is not node:
                        raise GrammarError(
                            "attribute %r contains another attribute" % node.name,
                            **_located(source, node),
                        )
            elif isinstance(node, ast.OneOrMore):
                # a repeated attribute would always serialize as a duplicate
                for inner in ast.iter_nodes(node.child):
                    if isinstance(inner, ast.Attribute):
                        raise GrammarError(
                            "attribute %r inside oneOrMore would repeat"
                            % inner.name,
                            **_located(source, inner),
                        )
