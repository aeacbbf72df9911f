#!/usr/bin/env python3
"""Prepend a license header to every C++ source under the given directories.

Files that already start with the header's first line are left alone.
"""
import argparse
import pathlib

SUFFIXES = {".hpp", ".cpp", ".h", ".cc"}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("header", type=pathlib.Path)
    ap.add_argument("roots", nargs="+", type=pathlib.Path)
    args = ap.parse_args()

    header = args.header.read_text()
    if not header.endswith("\n"):
        header += "\n"
    first = header.splitlines()[0]
    changed = 0
    for root in args.roots:
        for path in sorted(root.rglob("*")):
            if path.suffix not in SUFFIXES or not path.is_file():
                continue
            text = path.read_text()
            if text.startswith(first):
                continue
            path.write_text(header + "\n" + text)
            changed += 1
    print(f"{changed} file(s) updated")


if __name__ == "__main__":
    main()
