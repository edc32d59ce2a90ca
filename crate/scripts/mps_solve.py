#!/usr/bin/env python3
"""Solve a fixed-format MPS file written by goalrec with SciPy.

usage: mps_solve.py MODEL.mps lp|ip

Prints `optimal <objective>`, `infeasible` or `unbounded`. Only the subset
goalrec writes is understood: one objective row, G/L/E/N rows, integer
markers, RHS, RANGES and UP/LO/FX/PL/MI bounds. Names contain no spaces.
"""

import math
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp


def read_mps(path):
    objective = None
    row_kind = {}
    row_order = []
    cols = {}
    col_order = []
    rhs = {}
    ranges = {}
    lower = {}
    upper = {}
    integer = set()
    in_int = False
    section = None
    with open(path) as f:
        for raw in f:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                continue
            tok = line.split()
            if section == "ROWS":
                kind, name = tok
                if kind == "N" and objective is None:
                    objective = name
                else:
                    row_kind[name] = kind
                    row_order.append(name)
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    in_int = tok[2] == "'INTORG'"
                    continue
                col = tok[0]
                if col not in cols:
                    cols[col] = {}
                    col_order.append(col)
                if in_int:
                    integer.add(col)
                for name, value in zip(tok[1::2], tok[2::2]):
                    cols[col][name] = cols[col].get(name, 0.0) + float(value)
            elif section == "RHS":
                for name, value in zip(tok[1::2], tok[2::2]):
                    rhs[name] = float(value)
            elif section == "RANGES":
                for name, value in zip(tok[1::2], tok[2::2]):
                    ranges[name] = float(value)
            elif section == "BOUNDS":
                kind, col = tok[0], tok[2]
                value = float(tok[3]) if len(tok) > 3 else None
                if kind == "UP":
                    upper[col] = value
                elif kind == "LO":
                    lower[col] = value
                elif kind == "FX":
                    lower[col] = upper[col] = value
                elif kind == "MI":
                    lower[col] = -math.inf
                elif kind == "PL":
                    upper[col] = math.inf
                else:
                    raise ValueError(f"unsupported bound type {kind}")
            elif section == "ENDATA":
                break
    return objective, row_kind, row_order, cols, col_order, rhs, ranges, lower, upper, integer


def solve(path, mode):
    objective, row_kind, row_order, cols, col_order, rhs, ranges, lower, upper, integer = read_mps(path)
    n = len(col_order)
    rows = [r for r in row_order if row_kind[r] != "N"]
    c = np.array([cols[j].get(objective, 0.0) for j in col_order])
    a = np.zeros((len(rows), n))
    index = {r: i for i, r in enumerate(rows)}
    for k, j in enumerate(col_order):
        for name, value in cols[j].items():
            if name in index:
                a[index[name], k] = value
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for i, r in enumerate(rows):
        b = rhs.get(r, 0.0)
        kind = row_kind[r]
        if kind == "E":
            lo[i] = hi[i] = b
        elif kind == "G":
            lo[i] = b
            if r in ranges:
                hi[i] = b + abs(ranges[r])
        elif kind == "L":
            hi[i] = b
            if r in ranges:
                lo[i] = b - abs(ranges[r])
    bounds = Bounds(
        [lower.get(j, 0.0) for j in col_order],
        [upper.get(j, np.inf) for j in col_order],
    )
    integrality = np.array([1 if (mode == "ip" and j in integer) else 0 for j in col_order])
    constraints = [LinearConstraint(a, lo, hi)] if rows else []
    res = milp(c, constraints=constraints, bounds=bounds, integrality=integrality)
    if res.status == 0:
        return f"optimal {res.fun:.12g}"
    if res.status == 2:
        return "infeasible"
    if res.status == 3:
        return "unbounded"
    raise RuntimeError(res.message)


def main(argv):
    if len(argv) != 3 or argv[2] not in ("lp", "ip"):
        print(__doc__.strip().splitlines()[2], file=sys.stderr)
        return 2
    print(solve(argv[1], argv[2]))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
