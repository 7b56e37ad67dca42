#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Freeze unified-diff reference outputs produced by Python's difflib.

Writes NN.old / NN.new / NN.diff triples into tests/fixtures/difflib/.
Lines are split on '\\n' (a final newline adds no line) and stripped of
trailing whitespace before diffing, matching the C++ normalization.

    python3 tests/oracles/gen_difflib_fixtures.py [--out DIR] [--count 50]
"""

import argparse
import difflib
import pathlib
import random

VOCAB = [
    "{", "}", "", "  return 0;", "  iVar1 = iVar1 + 1;", "  local_18 = param_1;",
    "  if (iVar1 < 0) {", "  }", "  free(pvVar3);", "  pvVar3 = malloc(0x40);",
    "  sVar2 = strlen((char *)param_1);", "  FUN_00101000(local_18);",
    "  printf(\"%d\\n\",iVar1);", "  do {", "  } while (iVar1 != 0);", "  break;",
]


def normalize(text):
    if text == "":
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line.rstrip(" \t\r\f\v") for line in lines]


def reference_diff(old, new):
    out = difflib.unified_diff(normalize(old), normalize(new), "old", "new", lineterm="")
    return "".join(line + "\n" for line in out)


def random_line(rng, unique):
    if rng.random() < 0.55:
        return rng.choice(VOCAB)
    return "  uVar%d = 0x%x;" % (next(unique), rng.randrange(1 << 16))


def make_pair(rng, index, unique):
    # A few fixed edge cases first, then random documents and edit scripts.
    if index == 0:
        return "", "int f(void)\n{\n  return 0;\n}\n"
    if index == 1:
        return "int f(void)\n{\n  return 0;\n}\n", ""
    if index == 2:
        return "a\nb\nc\n", "a\nb\nc\n"
    if index == 3:
        return "a  \nb\t\nc\n", "a\nb\nc"
    if index == 4:
        return "x\n", "y\n"

    if index < 15:
        size = rng.randrange(1, 30)
    elif index < 40:
        size = rng.randrange(30, 180)
    else:
        size = rng.randrange(200, 420)  # triggers difflib's popular-line heuristic
    old = [random_line(rng, unique) for _ in range(size)]
    new = list(old)
    for _ in range(rng.randrange(1, 12)):
        op = rng.randrange(4)
        pos = rng.randrange(len(new) + 1)
        if op == 0 or not new:
            for k in range(rng.randrange(1, 5)):
                new.insert(pos + k, random_line(rng, unique))
        elif op == 1:
            del new[min(pos, len(new) - 1):min(pos, len(new) - 1) + rng.randrange(1, 5)]
        elif op == 2:
            new[min(pos, len(new) - 1)] = random_line(rng, unique)
        else:
            new[min(pos, len(new) - 1)] += "   "  # whitespace-only change
    old_text = "\n".join(old) + ("\n" if rng.random() < 0.8 else "")
    new_text = "\n".join(new) + ("\n" if rng.random() < 0.8 else "")
    return old_text, new_text


def main():
    here = pathlib.Path(__file__).resolve().parent
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", type=pathlib.Path, default=here.parent / "fixtures" / "difflib")
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=20240917)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    unique = iter(range(1, 1 << 30))
    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        old, new = make_pair(rng, i, unique)
        stem = "%02d" % i
        (args.out / (stem + ".old")).write_text(old)
        (args.out / (stem + ".new")).write_text(new)
        (args.out / (stem + ".diff")).write_text(reference_diff(old, new))


if __name__ == "__main__":
    main()
