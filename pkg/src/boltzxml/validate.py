"""Structural re-validation of documents against a grammar.

The matcher follows the pattern AST directly and checks structure only:
element names, attribute names and their order, child order and counts.
Leaf lexical content (text bodies, attribute values) is deliberately
ignored, matching what the counting semantics distinguish.

Accepts either DocNode trees or xml.etree elements.
"""

from __future__ import annotations

import sys
from xml.etree import ElementTree

from . import ast
from .serialize import DocNode

__all__ = ["matches"]


def _doc_depth(doc):
    depth = 0
    stack = [(doc, 1)]
    while stack:
        node, d = stack.pop()
        depth = max(depth, d)
        children = (
            [c for c in node.children if isinstance(c, DocNode)]
            if isinstance(node, DocNode)
            else list(node)
        )
        stack.extend((c, d + 1) for c in children)
    return depth


def _split_ns(tag):
    if tag.startswith("{"):
        uri, _, local = tag[1:].partition("}")
        return uri, local
    return None, tag


def _view(node):
    """(ns, name, attribute names in order, element children)."""
    if isinstance(node, DocNode):
        return (
            None,
            node.name,
            [n for n, _ in node.attrs],
            [c for c in node.children if isinstance(c, DocNode)],
        )
    if isinstance(node, ElementTree.Element):
        uri, local = _split_ns(node.tag)
        names = [_split_ns(k)[1] for k in node.attrib]
        return uri, local, names, list(node)
    raise TypeError("cannot validate %r" % type(node).__name__)


class _Matcher:
    def __init__(self, grammar):
        self.grammar = grammar
        self.elem_memo = {}

    def match_element(self, node, pattern):
        key = (id(node), id(pattern))
        hit = self.elem_memo.get(key)
        if hit is not None:
            return hit
        uri, local, attr_names, children = _view(node)
        ok = local in (pattern.name, pattern.name.split(":")[-1])
        if ok and pattern.ns is not None and uri is not None:
            ok = uri == pattern.ns
        if ok:
            final = (len(attr_names), len(children))
            states = self.states(pattern.content, (0, 0), attr_names, children)
            ok = final in states
        self.elem_memo[key] = ok
        return ok

    def states(self, pattern, state, attr_names, children):
        """All (attrs consumed, children consumed) states reachable by
        matching the pattern starting from the given state."""
        memo = {}

        def st(p, s):
            key = (id(p), s)
            hit = memo.get(key)
            if hit is not None:
                return hit
            memo[key] = frozenset()  # cycle guard; cycles consume nothing
            result = compute(p, s)
            memo[key] = result
            return result

        def compute(p, s):
            a, c = s
            if isinstance(p, (ast.Empty, ast.Text, ast.Data, ast.Value)):
                return frozenset((s,))
            if isinstance(p, ast.NotAllowed):
                return frozenset()
            if isinstance(p, ast.Attribute):
                if a < len(attr_names) and attr_names[a] in (
                    p.name,
                    p.name.split(":")[-1],
                ):
                    return frozenset(((a + 1, c),))
                return frozenset()
            if isinstance(p, ast.Ref):
                body = self.grammar.defines[p.name]
                if c < len(children) and self.match_element(children[c], body):
                    return frozenset(((a, c + 1),))
                return frozenset()
            if isinstance(p, ast.Element):
                if c < len(children) and self.match_element(children[c], p):
                    return frozenset(((a, c + 1),))
                return frozenset()
            if isinstance(p, ast.Choice):
                return st(p.left, s) | st(p.right, s)
            if isinstance(p, ast.Group):
                out = set()
                for mid in st(p.left, s):
                    out |= st(p.right, mid)
                return frozenset(out)
            if isinstance(p, ast.OneOrMore):
                seen = set(st(p.child, s))
                frontier = set(seen)
                while frontier:
                    nxt = set()
                    for mid in frontier:
                        nxt |= st(p.child, mid)
                    frontier = nxt - seen
                    seen |= nxt
                return frozenset(seen)
            raise TypeError("unexpected pattern %s" % type(p).__name__)

        return st(pattern, state)


def matches(grammar, doc):
    """True when the document's structure is derivable from the grammar.

    doc is a DocNode or an xml.etree Element (the document root)."""
    matcher = _Matcher(grammar)

    def start_ok(pattern):
        if isinstance(pattern, ast.Choice):
            return start_ok(pattern.left) or start_ok(pattern.right)
        if isinstance(pattern, ast.Ref):
            return matcher.match_element(doc, grammar.defines[pattern.name])
        return False

    # matching recurses once per nesting level; deep documents need headroom
    limit = sys.getrecursionlimit()
    needed = 64 * _doc_depth(doc) + 1000
    if needed > limit:
        sys.setrecursionlimit(needed)
    try:
        return start_ok(grammar.start)
    finally:
        if needed > limit:
            sys.setrecursionlimit(limit)
