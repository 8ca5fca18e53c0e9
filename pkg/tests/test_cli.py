"""The boltzxml command line: pipeline wiring, exit codes, output formats."""

import json

import pytest

from boltzxml import (
    Sampler,
    SamplerConfig,
    SizeWindow,
    load_oracle,
    load_system,
    parse_grammar_file,
)
from boltzxml.cli import (
    EXIT_EXHAUSTED,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_PARTIAL,
    EXIT_SOLVER,
    main,
)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, grammar_paths):
    """ternary grammar compiled and solved once for the sample tests."""
    root = tmp_path_factory.mktemp("cli")
    grammar = root / "ternary.rng"
    grammar.write_bytes(grammar_paths["ternary"].read_bytes())
    assert main(["compile", str(grammar)]) == EXIT_OK
    assert main(["solve", str(root / "ternary.gfs")]) == EXIT_OK
    return root


def test_compile_reports_and_writes(tmp_path, grammar_paths, capsys):
    grammar = tmp_path / "binary.rng"
    grammar.write_bytes(grammar_paths["binary"].read_bytes())
    out = tmp_path / "custom.gfs"
    assert main(["compile", str(grammar), "-o", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "1 equations, 2 monomials, 1 element definitions" in printed
    system = load_system(out)
    assert system.start == "b"
    # the grammar digest inside ties the file to its source bytes
    import hashlib

    assert system.grammar_digest == hashlib.sha256(grammar.read_bytes()).hexdigest()


def test_solve_auto_prints_bracket(workdir, capsys):
    capsys.readouterr()
    assert main(["solve", str(workdir / "ternary.gfs"), "-o",
                 str(workdir / "again.oracle")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "singularity bracket [" in out
    assert "x 0.52913" in out
    assert "iterations" in out and "residual" in out
    oracle = load_oracle(workdir / "again.oracle")
    assert oracle.rho_lower is not None


def test_solve_explicit_x(workdir, capsys):
    capsys.readouterr()
    assert main(["solve", str(workdir / "ternary.gfs"), "--x", "0.4",
                 "-o", str(workdir / "at04.oracle")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "bracket" not in out
    assert "x 0.4" in out
    assert load_oracle(workdir / "at04.oracle").rho_lower is None


def test_sample_to_stdout(workdir, capsys):
    code = main([
        "sample", str(workdir / "ternary.rng"), str(workdir / "ternary.oracle"),
        "-n", "13", "-e", "0.5", "--seed", "4",
    ])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("<t") and out.endswith("\n")


def test_sample_to_directory_with_stats(workdir, tmp_path, capsys):
    docs = tmp_path / "docs"
    stats_path = tmp_path / "stats.ndjson"
    code = main([
        "sample", str(workdir / "ternary.rng"), str(workdir / "ternary.oracle"),
        "-n", "25", "-e", "0.2", "--seed", "7", "--count", "3",
        "--out", str(docs), "--stats", str(stats_path),
    ])
    assert code == EXIT_OK
    files = sorted(p.name for p in docs.iterdir())
    assert files == ["doc-00000.xml", "doc-00001.xml", "doc-00002.xml"]
    records = [json.loads(line) for line in stats_path.read_text().splitlines()]
    assert len(records) == 3
    for index, record in enumerate(records):
        assert set(record) == {"docIndex", "attempts", "size", "seed", "millis"}
        assert record["docIndex"] == index
        assert record["seed"] == 7 + index
        assert 20 <= record["size"] <= 30
        assert record["attempts"] >= 1


def test_sample_documents_are_deterministic(workdir, tmp_path):
    outs = []
    for run in ("one", "two"):
        docs = tmp_path / run
        assert main([
            "sample", str(workdir / "ternary.rng"),
            str(workdir / "ternary.oracle"),
            "-n", "25", "-e", "0.2", "--seed", "11", "--count", "2",
            "--out", str(docs),
        ]) == EXIT_OK
        outs.append([p.read_bytes() for p in sorted(docs.iterdir())])
    assert outs[0] == outs[1]


def test_xml_declaration_flag(workdir, capsys):
    assert main([
        "sample", str(workdir / "ternary.rng"), str(workdir / "ternary.oracle"),
        "-n", "4", "-e", "0.5", "--xml-declaration",
    ]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith('<?xml version="1.0" encoding="UTF-8"?>')


def test_exact_size_warning(workdir, capsys):
    assert main([
        "sample", str(workdir / "ternary.rng"), str(workdir / "ternary.oracle"),
        "-n", "13", "-e", "0", "--seed", "1",
    ]) == EXIT_OK
    err = capsys.readouterr().err
    assert "quadratic" in err


def test_datatype_plugin(tmp_path, grammar_paths, capsys):
    grammar = tmp_path / "attrs.rng"
    grammar.write_bytes(grammar_paths["attrs"].read_bytes())
    assert main(["compile", str(grammar)]) == EXIT_OK
    assert main(["solve", str(tmp_path / "attrs.gfs")]) == EXIT_OK
    plugin = tmp_path / "values.json"
    plugin.write_text(json.dumps({"integer": ["12321"]}))
    capsys.readouterr()
    assert main([
        "sample", str(grammar), str(tmp_path / "attrs.oracle"),
        "-n", "8", "-e", "0.5", "--seed", "3",
        "--datatype-plugin", str(plugin),
    ]) == EXIT_OK
    assert 'id="12321"' in capsys.readouterr().out


# ---------------------------------------------------------------------------
# failure exit codes


def test_missing_grammar_file(tmp_path, capsys):
    code = main(["compile", str(tmp_path / "ghost.rng")])
    assert code == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_malformed_grammar(tmp_path, capsys):
    bad = tmp_path / "bad.rng"
    bad.write_text("<grammar><start>")
    assert main(["compile", str(bad)]) == EXIT_INPUT
    assert "malformed" in capsys.readouterr().err


def test_solver_divergence_exit_code(tmp_path, grammar_paths, capsys):
    grammar = tmp_path / "feed.rng"
    grammar.write_bytes(grammar_paths["feed"].read_bytes())
    assert main(["compile", str(grammar)]) == EXIT_OK
    code = main(["solve", str(tmp_path / "feed.gfs"), "--x", "0.9"])
    assert code == EXIT_SOLVER
    assert "error:" in capsys.readouterr().err


def test_digest_mismatch(workdir, tmp_path, grammar_paths, capsys):
    other = tmp_path / "binary.rng"
    other.write_bytes(grammar_paths["binary"].read_bytes())
    code = main([
        "sample", str(other), str(workdir / "ternary.oracle"),
        "-n", "9", "-e", "0.5",
    ])
    assert code == EXIT_INPUT
    err = capsys.readouterr().err
    assert "re-run 'boltzxml solve'" in err


def test_bad_plugin_file(workdir, tmp_path, capsys):
    plugin = tmp_path / "nope.json"
    plugin.write_text("[]")
    code = main([
        "sample", str(workdir / "ternary.rng"), str(workdir / "ternary.oracle"),
        "-n", "13", "-e", "0.5", "--datatype-plugin", str(plugin),
    ])
    assert code == EXIT_INPUT
    assert "value table" in capsys.readouterr().err


def test_all_documents_exhausted(workdir, capsys):
    # no ternary document has size 2
    code = main([
        "sample", str(workdir / "ternary.rng"), str(workdir / "ternary.oracle"),
        "-n", "2", "-e", "0", "--max-attempts", "30", "--count", "2",
    ])
    assert code == EXIT_EXHAUSTED
    err = capsys.readouterr().err
    assert "document 0" in err and "document 1" in err


def test_partial_success(workdir, capsys):
    # find neighboring seeds where one succeeds and one fails within the
    # attempt budget; the scan is deterministic, so the pair is stable
    grammar = parse_grammar_file(workdir / "ternary.rng")
    oracle = load_oracle(workdir / "ternary.oracle")
    system = load_system(workdir / "ternary.gfs")
    sampler = Sampler(grammar, oracle, system=system)
    budget = 40
    window = SizeWindow(40, 0.0)

    def succeeds(seed):
        try:
            sampler.sample_in_window(
                SamplerConfig(window=window, seed=seed, max_attempts=budget)
            )
            return True
        except Exception:
            return False

    pair = None
    prev = succeeds(0)
    for seed in range(1, 400):
        cur = succeeds(seed)
        if prev != cur:
            pair = seed - 1
            break
        prev = cur
    assert pair is not None, "no mixed adjacent seed pair found in scan"

    code = main([
        "sample", str(workdir / "ternary.rng"), str(workdir / "ternary.oracle"),
        "-n", "40", "-e", "0", "--seed", str(pair), "--count", "2",
        "--max-attempts", str(budget),
    ])
    assert code == EXIT_PARTIAL
    capsys.readouterr()


def test_usage_error_exits_nonzero():
    with pytest.raises(SystemExit):
        main(["sample"])  # missing required arguments
