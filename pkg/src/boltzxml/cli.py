"""Command line pipeline: compile, solve, sample.

    boltzxml compile grammar.rng -o grammar.gfs
    boltzxml solve grammar.gfs -o grammar.oracle [--x auto]
    boltzxml sample grammar.rng grammar.oracle -n 500 [-e 0.1] [options]

Exit codes: 0 success, 1 sampling exhausted for every requested document,
2 input error (bad grammar, file format, digest mismatch), 3 solver error,
4 partial success (some documents sampled, some exhausted).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .datatypes import load_value_table
from .errors import (
    BoltzXmlError,
    ExhaustedError,
    OracleMismatchError,
    SamplingError,
    SolverError,
)
from .newton import load_oracle, save_oracle, solve
from .relaxng import parse_grammar
from .sampler import Sampler, SamplerConfig, SizeWindow
from .system import compile_grammar, load_system

__all__ = ["main", "PipelineManifest", "build_manifest"]

EXIT_OK = 0
EXIT_EXHAUSTED = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_PARTIAL = 4


def _file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class PipelineManifest:
    """Digest chain tying a sampling run to its inputs.

    system_digest is the digest of the system recompiled from the grammar;
    it must equal the digest recorded inside the oracle."""

    grammar_path: str
    grammar_sha256: str
    system_digest: str
    oracle_path: str
    oracle_sha256: str
    oracle_system_digest: str

    def verify(self):
        if self.system_digest != self.oracle_system_digest:
            raise OracleMismatchError(
                "oracle %s was solved for a different system "
                "(grammar compiles to %s..., oracle records %s...); "
                "re-run 'boltzxml solve' on the current grammar"
                % (
                    self.oracle_path,
                    self.system_digest[:12],
                    self.oracle_system_digest[:12],
                )
            )


def build_manifest(grammar_path, oracle_path, *, grammar=None, system=None, oracle=None):
    if grammar is None:
        with open(grammar_path, "rb") as fh:
            data = fh.read()
        grammar = parse_grammar(data, source=str(grammar_path))
    if system is None:
        system = compile_grammar(grammar)
    if oracle is None:
        oracle = load_oracle(oracle_path)
    return PipelineManifest(
        grammar_path=str(grammar_path),
        grammar_sha256=_file_sha256(grammar_path),
        system_digest=system.digest(),
        oracle_path=str(oracle_path),
        oracle_sha256=_file_sha256(oracle_path),
        oracle_system_digest=oracle.system_digest,
    )


# ---------------------------------------------------------------------------


def cmd_compile(args):
    grammar_path = Path(args.grammar)
    with open(grammar_path, "rb") as fh:
        data = fh.read()
    grammar = parse_grammar(data, source=str(grammar_path))
    system = compile_grammar(
        grammar, grammar_digest=hashlib.sha256(data).hexdigest()
    )
    out = Path(args.output) if args.output else grammar_path.with_suffix(".gfs")
    system.save(out)
    print(
        "%d equations, %d monomials, %d element definitions -> %s"
        % (system.n_equations, system.n_monomials, len(grammar.defines), out)
    )
    return EXIT_OK


def cmd_solve(args):
    system = load_system(args.system)
    x = args.x if args.x == "auto" else float(args.x)
    started = time.perf_counter()
    oracle = solve(system, x)
    elapsed = time.perf_counter() - started
    out = Path(args.output) if args.output else Path(args.system).with_suffix(".oracle")
    save_oracle(oracle, out)
    if oracle.rho_lower is not None:
        print(
            "singularity bracket [%.17g, %.17g]"
            % (oracle.rho_lower, oracle.rho_upper)
        )
    print("x %.17g" % oracle.x)
    print("iterations %d" % oracle.iterations)
    print("residual %.3g" % oracle.residual)
    print("solved in %.1f ms -> %s" % (elapsed * 1000.0, out))
    return EXIT_OK


def cmd_sample(args):
    grammar_path = Path(args.grammar)
    with open(grammar_path, "rb") as fh:
        data = fh.read()
    grammar = parse_grammar(data, source=str(grammar_path))
    system = compile_grammar(
        grammar, grammar_digest=hashlib.sha256(data).hexdigest()
    )
    oracle = load_oracle(args.oracle)
    manifest = build_manifest(
        grammar_path, args.oracle, grammar=grammar, system=system, oracle=oracle
    )
    manifest.verify()

    overrides = load_value_table(args.datatype_plugin) if args.datatype_plugin else None
    sampler = Sampler(grammar, oracle, registry=overrides, system=system)
    window = SizeWindow(args.size, args.tolerance)
    if args.tolerance == 0.0:
        print(
            "warning: exact-size sampling (tolerance 0) has quadratic "
            "expected cost in the target size",
            file=sys.stderr,
        )

    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    stats_fh = open(args.stats, "w", encoding="utf-8") if args.stats else None

    produced = 0
    exhausted = 0
    try:
        for index in range(args.count):
            seed = args.seed + index
            config = SamplerConfig(
                window=window, seed=seed, max_attempts=args.max_attempts
            )
            started = time.perf_counter()
            try:
                if out_dir:
                    target = out_dir / ("doc-%05d.xml" % index)
                    with open(target, "wb") as sink:
                        stats = sampler.sample_to_sink(
                            config, sink, xml_declaration=args.xml_declaration
                        )
                else:
                    stats = sampler.sample_to_sink(
                        config,
                        sys.stdout.buffer,
                        xml_declaration=args.xml_declaration,
                    )
                    sys.stdout.buffer.write(b"\n")
                    sys.stdout.buffer.flush()
            except ExhaustedError as exc:
                exhausted += 1
                print(
                    "document %d: %s" % (index, exc),
                    file=sys.stderr,
                )
                continue
            produced += 1
            millis = (time.perf_counter() - started) * 1000.0
            if stats_fh:
                record = {
                    "docIndex": index,
                    "attempts": stats.attempts,
                    "size": stats.size,
                    "seed": seed,
                    "millis": round(millis, 3),
                }
                stats_fh.write(json.dumps(record) + "\n")
    finally:
        if stats_fh:
            stats_fh.close()

    if produced and not exhausted:
        return EXIT_OK
    if produced:
        return EXIT_PARTIAL
    return EXIT_EXHAUSTED


# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="boltzxml",
        description="Uniform random XML documents from RELAX NG grammars.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compile = sub.add_parser(
        "compile", help="translate a grammar into its equation system"
    )
    p_compile.add_argument("grammar", help="RELAX NG grammar file (XML syntax)")
    p_compile.add_argument("-o", "--output", help="system file to write (.gfs)")
    p_compile.set_defaults(func=cmd_compile)

    p_solve = sub.add_parser(
        "solve", help="locate the singularity and evaluate the system"
    )
    p_solve.add_argument("system", help="system file produced by compile")
    p_solve.add_argument("-o", "--output", help="oracle file to write")
    p_solve.add_argument(
        "--x",
        default="auto",
        help="evaluation point, or 'auto' to back off from the singularity",
    )
    p_solve.set_defaults(func=cmd_solve)

    p_sample = sub.add_parser(
        "sample", help="draw random documents of controlled size"
    )
    p_sample.add_argument("grammar", help="RELAX NG grammar file")
    p_sample.add_argument("oracle", help="oracle file produced by solve")
    p_sample.add_argument(
        "-n", "--size", type=int, required=True, help="target document size"
    )
    p_sample.add_argument(
        "-e",
        "--tolerance",
        type=float,
        default=0.1,
        help="relative size window half-width (default 0.1; 0 = exact size)",
    )
    p_sample.add_argument("--seed", type=int, default=0, help="base random seed")
    p_sample.add_argument(
        "--count", type=int, default=1, help="number of documents to draw"
    )
    p_sample.add_argument(
        "--max-attempts",
        type=int,
        default=10000,
        help="rejection attempts per document before giving up",
    )
    p_sample.add_argument(
        "--datatype-plugin",
        help="JSON file of datatype name -> list of values",
    )
    p_sample.add_argument("--out", help="directory for doc-NNNNN.xml files")
    p_sample.add_argument("--stats", help="NDJSON per-document stats file")
    p_sample.add_argument(
        "--xml-declaration",
        action="store_true",
        help="start each document with an XML declaration",
    )
    p_sample.set_defaults(func=cmd_sample)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    except (SamplingError, ExhaustedError) as exc:
        # sampling setup problems are input errors; per-document exhaustion
        # is handled inside cmd_sample
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (BoltzXmlError, OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
