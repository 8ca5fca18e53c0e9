"""Access to the grammars shipped with the package."""

from __future__ import annotations

from importlib import resources

__all__ = ["list_bundled_grammars", "bundled_grammar_path", "load_bundled_grammar"]

_NAMES = ("ternary", "binary", "attrs", "oneormore", "feed")


def list_bundled_grammars():
    return list(_NAMES)


def bundled_grammar_path(name):
    """Filesystem path of a bundled grammar by short name."""
    if name not in _NAMES:
        raise KeyError(
            "unknown bundled grammar %r (have: %s)" % (name, ", ".join(_NAMES))
        )
    path = resources.files(__package__) / "grammars" / ("%s.rng" % name)
    return str(path)


def load_bundled_grammar(name):
    from .relaxng import parse_grammar_file

    return parse_grammar_file(bundled_grammar_path(name))
