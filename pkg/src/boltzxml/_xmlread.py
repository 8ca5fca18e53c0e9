"""Small namespace-aware XML reader used by the grammar parser.

Built on expat so that every node keeps its source line and column, which
the stdlib ElementTree API does not expose.
"""

from __future__ import annotations

from xml.parsers import expat

from .errors import GrammarError

_SEP = " "  # cannot occur inside a namespace URI


class XmlNode:
    __slots__ = ("uri", "local", "attrs", "children", "line", "column")

    def __init__(self, uri, local, attrs, line, column):
        self.uri = uri
        self.local = local
        self.attrs = attrs
        self.children = []  # XmlNode and str (character data) interleaved
        self.line = line
        self.column = column

    def text(self):
        """Concatenated character data of direct children."""
        return "".join(c for c in self.children if isinstance(c, str))

    def element_children(self):
        return [c for c in self.children if isinstance(c, XmlNode)]

    def __repr__(self):
        return "<XmlNode %s line %d>" % (self.local, self.line)


def _split_name(name):
    if _SEP in name:
        uri, local = name.split(_SEP, 1)
        return uri, local
    return "", name


def read_xml(data, source=None):
    """Parse bytes or str into an XmlNode tree; raise GrammarError on
    malformed input."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    parser = expat.ParserCreate(namespace_separator=_SEP)
    root = XmlNode("", "#document", {}, 0, 0)
    stack = [root]

    def start(name, attrs):
        uri, local = _split_name(name)
        plain_attrs = {}
        for k, v in attrs.items():
            auri, alocal = _split_name(k)
            # foreign-namespace attributes carry no meaning here; keep the
            # local name only when the attribute is unprefixed
            if auri == "":
                plain_attrs[alocal] = v
        node = XmlNode(
            uri, local, plain_attrs, parser.CurrentLineNumber, parser.CurrentColumnNumber + 1
        )
        stack[-1].children.append(node)
        stack.append(node)

    def end(name):
        stack.pop()

    def chars(text):
        top = stack[-1]
        if top.children and isinstance(top.children[-1], str):
            top.children[-1] += text
        else:
            top.children.append(text)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise GrammarError(
            "malformed XML: %s" % expat.errors.messages[exc.code],
            source=source,
            line=exc.lineno,
            column=exc.offset + 1,
        ) from None
    if not root.element_children():
        raise GrammarError("document has no root element", source=source)
    return root.element_children()[0]
