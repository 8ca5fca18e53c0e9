"""Coefficient extraction against closed-form tree counts, and exhaustive
enumeration of small size classes."""

import math

import pytest

from boltzxml import (
    EnumerationBoundError,
    count_coefficients,
    doc_to_xml,
    enumerate_documents,
    newton_evaluate,
    skeleton_key,
    events_from_doc,
)


def fuss_catalan(m):
    # ternary trees with m internal nodes
    return math.comb(3 * m, m) // (2 * m + 1)


def catalan(m):
    return math.comb(2 * m, m) // (m + 1)


def test_ternary_counts_match_fuss_catalan(systems):
    table = count_coefficients(systems["ternary"], 40)
    series = table.series()
    for n in range(41):
        if n % 3 == 1:
            assert series[n] == fuss_catalan((n - 1) // 3), n
        else:
            assert series[n] == 0, n


def test_ternary_pinned_values(systems):
    table = count_coefficients(systems["ternary"], 13)
    assert [table.coefficient(n) for n in (1, 4, 7, 10, 13)] == [1, 1, 3, 12, 55]


def test_binary_counts_match_catalan(systems):
    series = count_coefficients(systems["binary"], 21).series()
    for n in range(22):
        if n % 2 == 1:
            assert series[n] == catalan((n - 1) // 2), n
        else:
            assert series[n] == 0, n


def test_attrs_small_counts(systems):
    # size 2: item with its required attribute; size 3: the two lang values
    series = count_coefficients(systems["attrs"], 6).series()
    assert series[:4] == [0, 0, 1, 2]


def test_oneormore_small_counts(systems):
    series = count_coefficients(systems["oneormore"], 4).series()
    assert series == [0, 0, 1, 1, 2]


def test_truncated_series_approaches_newton(systems):
    # partial sums at a point well below the singularity converge to the
    # Newton value; the tail bound is the dropped term over 1 - ratio
    for name, x in (("ternary", 0.4), ("binary", 0.38)):
        system = systems[name]
        series = count_coefficients(system, 260).series()
        total = sum(t * x**n for n, t in enumerate(series))
        assert series[-1] * x**260 < 1e-12
        value = newton_evaluate(system, x).values[system.start]
        assert abs(total - value) < 1e-10, name


def test_per_class_series(systems):
    table = count_coefficients(systems["oneormore"], 6)
    # entries are one element plus either nothing or a whole list
    entry = table.series("entry")
    assert entry[1] == 1 and entry[3] == 1


def test_enumerate_binary_size9(grammars, systems):
    docs = enumerate_documents(grammars["binary"], 9, system=systems["binary"])
    assert len(docs) == 14
    keys = {skeleton_key(events_from_doc(d)) for d in docs}
    assert len(keys) == 14


def test_enumerate_matches_coefficients(grammars, systems):
    for name in ("ternary", "binary", "attrs", "oneormore", "feed"):
        table = count_coefficients(systems[name], 7)
        for n in range(1, 8):
            docs = enumerate_documents(
                grammars[name], n, system=systems[name], table=table
            )
            assert len(docs) == table.coefficient(n), (name, n)
            assert len({doc_to_xml(d) for d in docs}) == len(docs), (name, n)


def test_enumerate_empty_size_class(grammars):
    assert enumerate_documents(grammars["ternary"], 2) == []


def test_enumerate_bound(grammars):
    # t_16 = 273 ternary trees
    with pytest.raises(EnumerationBoundError) as info:
        enumerate_documents(grammars["ternary"], 16, bound=100)
    assert info.value.count == 273
    assert info.value.bound == 100


def test_out_of_range_size(systems):
    table = count_coefficients(systems["ternary"], 5)
    with pytest.raises(ValueError):
        table.coefficient(6)
