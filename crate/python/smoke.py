#!/usr/bin/env python3
"""Smoke test for the argtrace Python extension.

Builds nothing itself: it looks for the compiled cdylib under target/ and
imports it directly. Build first with either of:

    cargo build -p argtrace-py --release
    cargo build -p argtrace-py
"""

import importlib.util
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libargtrace.so", "argtrace.so", "libargtrace.dylib", "argtrace.pyd")
    ]
    for path in candidates:
        if path.exists():
            spec = importlib.util.spec_from_file_location("argtrace", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit(
        "argtrace extension not found under target/; "
        "run `cargo build -p argtrace-py` first"
    )


def main():
    argtrace = load_module()

    arguments = [
        ("a", 0), ("b", 1), ("c", 2), ("d", 3), ("e", 4), ("f", 5), ("g", 6),
        ("h", 7), ("i", 7), ("j", 8), ("k", 9), ("l", 10), ("m", 11), ("n", 12),
    ]
    attacks = [
        ("b", "a"), ("h", "c"), ("d", "c"), ("i", "c"), ("n", "c"),
        ("h", "l"), ("d", "l"), ("i", "l"), ("m", "l"), ("e", "d"),
        ("f", "e"), ("g", "f"), ("j", "h"), ("k", "i"), ("n", "m"),
    ]

    session = argtrace.Session(arguments, attacks)

    assert session.final_time() == 31, session.final_time()
    assert session.final_acceptable() == ["b", "e", "g", "j", "k", "l", "n"]
    assert "enunciate(e)" in session.events_at(6)
    assert "makesUnacc(e,d)" in session.events_at(7)
    assert session.check() == []

    # The engine's verdict matches the standalone oracle.
    names = [name for name, _ in arguments]
    assert argtrace.grounded(names, attacks) == session.final_acceptable()

    causes = session.causes("not-acc(c)@final")
    assert any(cause == "enunciate(d)@4" for _, cause, _ in causes), causes

    table = session.table("csv")
    assert table.splitlines()[0].startswith("argument,a,b,c")

    dot = session.timeline_dot(6, 9)
    assert dot.count("shape=box") == 4, dot.count("shape=box")

    program = session.asp_program()
    assert program.count("argument(") == 14

    # Errors surface as ValueError.
    try:
        argtrace.Session([("x", 0), ("y", 1)], [("x", "y"), ("y", "x")])
    except ValueError as e:
        assert "cycle" in str(e)
    else:
        sys.exit("expected a cycle error")

    print("smoke test passed")


if __name__ == "__main__":
    main()
