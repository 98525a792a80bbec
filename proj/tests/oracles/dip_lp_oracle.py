"""Independent dip oracle by linear programming.

For sorted distinct data x_1 < ... < x_n, a unimodal CDF can be taken piecewise
linear on the data grid with a unimodal slope sequence. For every candidate peak
segment k the smallest sup-distance t to the ECDF (both one-sided limits at each
data point) is a linear program; the dip is the minimum over k.

Prints C++ initializer rows: {values...}, expected_dip
"""
import sys

import numpy as np
from scipy.optimize import linprog


def dip_lp(x):
    x = np.sort(np.asarray(x, dtype=float))
    n = len(x)
    best = np.inf
    nseg = n - 1
    for k in range(nseg):
        # variables G_1..G_n, t
        nv = n + 1
        A, b = [], []
        for i in range(n):
            for level in (i / n, (i + 1) / n):
                row = np.zeros(nv); row[i] = 1; row[-1] = -1
                A.append(row); b.append(level)
                row = np.zeros(nv); row[i] = -1; row[-1] = -1
                A.append(row); b.append(-level)

        def slope(i):
            row = np.zeros(nv)
            h = x[i + 1] - x[i]
            row[i + 1] += 1 / h; row[i] -= 1 / h
            return row
        for i in range(nseg):
            A.append(-slope(i)); b.append(0.0)
        for i in range(nseg - 1):
            if i < k:
                A.append(slope(i) - slope(i + 1)); b.append(0.0)
            else:
                A.append(slope(i + 1) - slope(i)); b.append(0.0)
        c = np.zeros(nv); c[-1] = 1
        bounds = [(0, 1)] * n + [(0, None)]
        res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds,
                      method="highs", options={"primal_feasibility_tolerance": 1e-10,
                                               "dual_feasibility_tolerance": 1e-10})
        if res.status == 0:
            best = min(best, res.fun)
    return best


if __name__ == "__main__":
    rng = np.random.default_rng(20240611)
    print("// generated by tests/oracles/dip_lp_oracle.py")
    cases = []
    cases.append([0.0, 1.0])
    cases.append([1.0, 2.0, 3.0, 4.0, 5.0])
    cases.append([0.0, 0.1, 0.2, 5.0, 5.1, 5.2])
    cases.append([0.0, 1.0, 1.5, 1.7, 1.8, 2.5, 4.0])
    for trial in range(24):
        n = int(rng.integers(3, 16))
        kind = trial % 3
        if kind == 0:
            v = rng.uniform(0, 1, n)
        elif kind == 1:
            v = np.concatenate([rng.normal(0, 1, n // 2), rng.normal(4, 1, n - n // 2)])
        else:
            v = rng.exponential(1.0, n)
        cases.append(list(np.round(v, 6)))
    for v in cases:
        d = dip_lp(v)
        vals = ", ".join(repr(float(a)) for a in v)
        print(f"    {{{{{vals}}}, {d:.12f}}},")
