"""Quasi-cyclic lifting of the all-ones base matrix and girth machinery.

A profile is a J x K array of left-shift parameters in normalized form
(first row and first column all zero).  Expansion replaces entry (i, j)
with the s x s identity circularly left-shifted by shifts[i, j].  Girth is
checked two ways: an algebraic condition on alternating shift sums over
closed base-matrix walks (fast pre-filter) and direct BFS cycle search on
the expanded graph (the arbiter).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import product

import numpy as np


@dataclass(frozen=True)
class QcProfile:
    """Shift parameters for lifting the all-ones J x K base matrix."""

    J: int
    K: int
    s: int
    shifts: np.ndarray = field(repr=False)

    def __post_init__(self):
        sh = np.asarray(self.shifts, dtype=np.int64)
        object.__setattr__(self, "shifts", sh)
        if sh.shape != (self.J, self.K):
            raise ValueError(f"shifts shape {sh.shape} does not match ({self.J}, {self.K})")
        if self.s < 1:
            raise ValueError("lifting factor must be positive")
        if np.any(sh < 0) or np.any(sh >= self.s):
            raise ValueError("shifts must lie in [0, s)")
        if np.any(sh[0, :] != 0) or np.any(sh[:, 0] != 0):
            raise ValueError("profile not normalized: first row and column must be zero")

    @property
    def n(self) -> int:
        return self.K * self.s

    @property
    def n_checks(self) -> int:
        return self.J * self.s


def expand(profile: QcProfile) -> np.ndarray:
    """Expanded (J*s) x (K*s) parity-check matrix of circulant blocks."""
    s = profile.s
    h = np.zeros((profile.J * s, profile.K * s), dtype=np.uint8)
    r = np.arange(s)
    for i in range(profile.J):
        for j in range(profile.K):
            # left shift by t: row r of the block has its 1 at column (r+t) mod s
            h[i * s + r, j * s + (r + profile.shifts[i, j]) % s] = 1
    return h


def girth_condition_holds(profile: QcProfile, target_girth: int) -> bool:
    """Algebraic girth test on the base matrix.

    The expanded graph has girth >= target iff every closed non-backtracking
    walk on the base matrix of length 2m, m <= target/2 - 1, has a nonzero
    alternating shift sum mod s.  Walks alternate check rows and variable
    columns; consecutive rows must differ and consecutive columns must
    differ (cyclically), because each circulant block carries exactly one
    edge per expanded node.
    """
    if target_girth % 2 or target_girth < 6:
        raise ValueError("target girth must be an even number >= 6")
    m_max = target_girth // 2 - 1
    sh = profile.shifts
    s = profile.s
    J, K = sh.shape
    for j0 in range(J):
        for k0 in range(K):
            seen = set()
            stack = [(j1, k0, int(sh[j0, k0] - sh[j1, k0]) % s, 1)
                     for j1 in range(J) if j1 != j0]
            while stack:
                state = stack.pop()
                if state in seen:
                    continue
                seen.add(state)
                j_cur, k_prev, delta, m = state
                if m >= 2 and j_cur == j0 and k_prev != k0 and delta == 0:
                    return False
                if m >= m_max:
                    continue
                for k in range(K):
                    if k == k_prev:
                        continue
                    step = delta + sh[j_cur, k]
                    for j in range(J):
                        if j != j_cur:
                            stack.append((j, k, int(step - sh[j, k]) % s, m + 1))
    return True


def _adjacency(h: np.ndarray) -> list:
    """Combined adjacency: variables 0..n-1, checks n..n+m-1."""
    m, n = h.shape
    adj = [[] for _ in range(n + m)]
    for r, c in zip(*np.nonzero(h)):
        adj[c].append(n + r)
        adj[n + r].append(c)
    return adj


def girth_of(h) -> float:
    """Shortest cycle length in the Tanner graph of ``h``; inf when acyclic.

    BFS from every variable node; a non-tree edge met at distances d_u, d_v
    witnesses a cycle of length d_u + d_v + 1, and scanning all roots makes
    the minimum exact.
    """
    h = np.asarray(h, dtype=np.uint8)
    if h.ndim != 2 or not h.any():
        raise ValueError("expected a nonzero 2-D matrix")
    n = h.shape[1]
    adj = _adjacency(h)
    best = math.inf
    dist = np.empty(len(adj), dtype=np.int64)
    parent = np.empty(len(adj), dtype=np.int64)
    for root in range(n):
        dist.fill(-1)
        dist[root] = 0
        parent[root] = -1
        q = deque([root])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 2 > best:
                continue
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    q.append(v)
                elif v != parent[u]:
                    cand = dist[u] + dist[v] + 1
                    if cand < best:
                        best = cand
        if best == 4:
            break  # bipartite minimum, cannot improve
    return best


def _is_prime(x: int) -> bool:
    if x < 2:
        return False
    d = 2
    while d * d <= x:
        if x % d == 0:
            return False
        d += 1
    return True


def power_shifts(a: int, b: int, s: int, K: int) -> np.ndarray:
    """Row-one shift values a*b^j mod s for columns j = 1..K-1."""
    if not _is_prime(s):
        raise ValueError(f"lifting factor {s} is not prime")
    if a % s == 0 or b % s == 0:
        raise ValueError("a and b must be nonzero mod s")
    return np.array([(a * pow(b, j, s)) % s for j in range(1, K)], dtype=np.int64)


def _profile_from_rows(J, K, s, free_rows) -> QcProfile:
    """Assemble a normalized profile from rows 1..J-1, columns 1..K-1."""
    sh = np.zeros((J, K), dtype=np.int64)
    for i, row in enumerate(free_rows, start=1):
        sh[i, 1:] = row
    return QcProfile(J=J, K=K, s=s, shifts=sh)


def search_shifts(s: int, J: int, K: int, target_girth: int,
                  strategy: str = "power-sweep", seed: int = 0,
                  max_tries: int = 200_000) -> QcProfile:
    """Find a normalized profile whose expanded graph has girth >= target.

    Strategies (all deterministic; first verified candidate wins):
      power-sweep    row 1 from a*b^j mod s, (a, b) ascending; J must be 2
      random         free shifts sampled uniformly from a seeded generator
      exhaustive-row all row-1 tuples in lexicographic order; J must be 2

    Candidates are pre-filtered with the algebraic condition and verified
    with BFS on the expanded matrix before being returned.
    """
    if target_girth % 2 or target_girth < 6:
        raise ValueError("target girth must be an even number >= 6")
    if J == 2 and target_girth > 2 * K:
        raise ValueError(
            f"girth {target_girth} impossible for J=2, K={K}: a cycle of length "
            f"2c exists for some c <= {K}")

    def verified(profile):
        return (girth_condition_holds(profile, target_girth)
                and girth_of(expand(profile)) >= target_girth)

    if strategy == "power-sweep":
        if J != 2:
            raise ValueError("power-sweep builds a single free row; requires J=2")
        if not _is_prime(s):
            raise ValueError(f"lifting factor {s} is not prime")
        for a in range(1, s):
            for b in range(1, s):
                profile = _profile_from_rows(J, K, s, [power_shifts(a, b, s, K)])
                if verified(profile):
                    return profile
        raise RuntimeError(f"power sweep exhausted without reaching girth {target_girth}")

    if strategy == "random":
        rng = np.random.default_rng(seed)
        for _ in range(max_tries):
            rows = rng.integers(0, s, size=(J - 1, K - 1))
            profile = _profile_from_rows(J, K, s, rows)
            if verified(profile):
                return profile
        raise RuntimeError(f"random search exhausted after {max_tries} tries")

    if strategy == "exhaustive-row":
        if J != 2:
            raise ValueError("exhaustive-row enumerates a single row; requires J=2")
        for row in product(range(s), repeat=K - 1):
            profile = _profile_from_rows(J, K, s, [np.array(row)])
            if verified(profile):
                return profile
        raise RuntimeError(f"exhausted all row tuples without reaching girth {target_girth}")

    raise ValueError(f"unknown strategy {strategy!r}")


def enumerate_short_cycles(h, max_len: int = 10):
    """All simple cycles of length <= max_len in the Tanner graph of ``h``.

    Yields (length, check_rows) with check_rows the sorted tuple of parity
    rows on the cycle.  Each cycle is reported exactly once (smallest
    variable node as root, direction fixed by the smaller neighbor).
    """
    h = np.asarray(h, dtype=np.uint8)
    n = h.shape[1]
    adj = _adjacency(h)
    out = []

    def dfs(root, node, path, on_path):
        for nxt in adj[node]:
            if nxt == root and len(path) >= 4:
                if path[1] < path[-1]:  # count one direction only
                    checks = tuple(sorted(p - n for p in path if p >= n))
                    out.append((len(path), checks))
                continue
            if nxt <= root or nxt in on_path:
                continue
            if len(path) == max_len:
                continue
            path.append(nxt)
            on_path.add(nxt)
            dfs(root, nxt, path, on_path)
            on_path.remove(nxt)
            path.pop()

    for root in range(n):
        dfs(root, root, [root], {root})
    return out


def scan_error_structures(h, gc_checks=None, max_len: int = 10) -> dict:
    """Count the short-cycle structures that dominate the error floor.

    Returns counts of: pairs of 4-cycles sharing a generalized check node
    (structure_1), 8-cycles whose checks are all single parity checks
    (structure_2), and all simple cycles of length <= max_len.  ``gc_checks``
    is an iterable or boolean mask of generalized check rows; omitted means
    every check is a plain parity check.
    """
    h = np.asarray(h, dtype=np.uint8)
    m = h.shape[0]
    gc = np.zeros(m, dtype=bool)
    if gc_checks is not None:
        gc_idx = np.asarray(gc_checks)
        if gc_idx.dtype == bool:
            gc[:] = gc_idx
        else:
            gc[gc_idx] = True
    cycles = enumerate_short_cycles(h, max_len=max_len)
    four = [set(checks) for length, checks in cycles if length == 4]
    structure_1 = 0
    for i in range(len(four)):
        for j in range(i + 1, len(four)):
            if any(gc[c] for c in four[i] & four[j]):
                structure_1 += 1
    structure_2 = sum(
        1 for length, checks in cycles
        if length == 8 and not any(gc[c] for c in checks))
    return {
        "structure_1": structure_1,
        "structure_2": structure_2,
        "cycles_total": len(cycles),
    }
