"""
The three-step command line pipeline
====================================

Grammar to system, system to oracle, oracle to documents.  Each step
writes a plain text artifact the next one reads, so the expensive
solving work is done once and the sampling step can be repeated with
different sizes and seeds.  This script drives the real CLI through
subprocess, exactly as a shell user would.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from boltzxml import bundled_grammar_path


def run(*args):
    cmd = [sys.executable, "-m", "boltzxml", *map(str, args)]
    print("$ boltzxml " + " ".join(map(str, args)))
    proc = subprocess.run(cmd, capture_output=True, text=True, check=True)
    for line in (proc.stdout + proc.stderr).splitlines():
        print("  " + line)
    print()


grammar = bundled_grammar_path("ternary")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    system = tmp / "ternary.gfs"
    oracle = tmp / "ternary.oracle"
    docs = tmp / "docs"
    stats = tmp / "stats.ndjson"

    # step 1: grammar -> polynomial system (text format, diffable)
    run("compile", grammar, "-o", system)

    # step 2: bracket the singularity, evaluate just inside it
    run("solve", system, "-o", oracle, "--x", "auto")

    # step 3: draw five documents of about 500 elements
    run(
        "sample", grammar, oracle,
        "-n", 500, "-e", 0.2, "--seed", 42, "--count", 5,
        "--max-attempts", 100000, "--out", docs, "--stats", stats,
    )

    print("artifacts")
    print("---------")
    for path in (system, oracle):
        first = path.read_text().splitlines()[0]
        print("  %-16s %5d bytes, starts %r" % (path.name, path.stat().st_size, first))
    for path in sorted(docs.iterdir()):
        print("  %-16s %5d bytes" % (path.name, path.stat().st_size))
    print()

    print("per-document stats (one JSON object per line)")
    for line in stats.read_text().splitlines():
        row = json.loads(line)
        print("  doc %(docIndex)d: size %(size)d in %(attempts)d attempts, "
              "%(millis).1f ms, seed %(seed)d" % row)
