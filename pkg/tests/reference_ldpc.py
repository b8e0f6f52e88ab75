"""Independent plain-LDPC BP decoder, written as slow explicit loops.

Used only as a cross-check: it shares no code with the package decoder
(edge messages live in dicts, products are taken in row order) but follows
the same flooding schedule, saturation, and stopping rule.
"""

import math


def reference_bp_trace(check_rows, llr, i_max, sat=30.0):
    """Hard decisions after every flooding iteration; stops on zero syndrome.

    check_rows: list of per-check variable-index lists.
    """
    n = len(llr)
    checks_of = {}
    for c, row in enumerate(check_rows):
        for v in row:
            checks_of.setdefault(v, []).append(c)
    c2v = {(c, v): 0.0 for c, row in enumerate(check_rows) for v in row}
    trace = []
    for _ in range(i_max):
        v2c = {}
        for (c, v) in c2v:
            total = llr[v]
            for c2 in checks_of[v]:
                if c2 != c:
                    total += c2v[(c2, v)]
            v2c[(c, v)] = total
        for c, row in enumerate(check_rows):
            for v in row:
                prod = 1.0
                for v2 in row:
                    if v2 == v:
                        continue
                    m = max(min(v2c[(c, v2)], sat), -sat)
                    prod *= math.tanh(m / 2.0)
                prod = max(min(prod, 1.0 - 1e-15), -1.0 + 1e-15)
                c2v[(c, v)] = 2.0 * math.atanh(prod)
        posterior = [llr[v] + sum(c2v[(c, v)] for c in checks_of[v]) for v in range(n)]
        hard = [1 if p < 0 else 0 for p in posterior]
        trace.append(hard)
        if all(sum(hard[v] for v in row) % 2 == 0 for row in check_rows):
            break
    return trace
