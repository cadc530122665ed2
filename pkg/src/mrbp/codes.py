"""Parity-check codes: alist parsing, Tanner-graph adjacency, GF(2) oracles.

The alist format (MacKay's code database convention) is the interchange
format:

    line 1: n m                  (columns/variable nodes, rows/checks)
    line 2: max_col_deg max_row_deg
    line 3: n column degrees
    line 4: m row degrees
    next n lines: per-VN list of 1-indexed check indices
    next m lines: per-check list of 1-indexed VN indices

Entries beyond the stated degree may be zero-padded.  Indices are converted
to 0-based at parse time.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class AlistParseError(ValueError):
    """Malformed alist input; the message names the offending line."""


@dataclass(eq=False)
class ParityCheckCode:
    """Immutable binary code given by an m x n parity-check matrix.

    Adjacency is kept in flat edge arrays for the message-passing kernels:
    edge e sits in check edge_cn[e] and touches VN edge_vn[e]; edges are
    grouped by check (chk_ptr) and reachable per VN through var_ptr/var_edges.
    """

    n: int
    m: int
    chk_ptr: np.ndarray   # int32 (m+1,)
    edge_vn: np.ndarray   # int32 (E,), grouped by check, ascending VN inside a check
    edge_cn: np.ndarray   # int32 (E,)
    var_ptr: np.ndarray   # int32 (n+1,)
    var_edges: np.ndarray   # int32 (E,), edge ids grouped by VN, ascending check
    source: str = field(default="", repr=False)

    @classmethod
    def from_rows(cls, n: int, m: int, rows: list[list[int]], source: str = "") -> "ParityCheckCode":
        """Build from per-check VN index lists (0-based)."""
        counts = [len(set(r)) for r in rows]
        if any(len(r) != c for r, c in zip(rows, counts)):
            raise ValueError("duplicate VN index inside a check")
        for j, r in enumerate(rows):
            for v in r:
                if not (0 <= v < n):
                    raise ValueError(f"check {j}: VN index {v} out of range 0..{n - 1}")
        chk_ptr = np.zeros(m + 1, dtype=np.int32)
        for j in range(m):
            chk_ptr[j + 1] = chk_ptr[j] + len(rows[j])
        edge_vn = np.concatenate([np.sort(np.asarray(r, dtype=np.int32)) for r in rows]) \
            if chk_ptr[-1] else np.zeros(0, dtype=np.int32)
        edge_cn = np.repeat(np.arange(m, dtype=np.int32), np.diff(chk_ptr))
        order = np.lexsort((edge_cn, edge_vn)).astype(np.int32)  # group by VN, then check
        var_edges = order
        var_ptr = np.zeros(n + 1, dtype=np.int32)
        np.add.at(var_ptr, edge_vn + 1, 1)
        var_ptr = np.cumsum(var_ptr, dtype=np.int32)
        return cls(n, m, chk_ptr, edge_vn, edge_cn, var_ptr.astype(np.int32), var_edges, source)

    @classmethod
    def from_matrix(cls, h: np.ndarray, source: str = "") -> "ParityCheckCode":
        h = np.asarray(h)
        m, n = h.shape
        rows = [list(np.flatnonzero(h[j])) for j in range(m)]
        return cls.from_rows(n, m, rows, source)

    # -- structure ---------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return int(self.edge_vn.size)

    def check_vns(self, j: int) -> np.ndarray:
        """VN indices of check j."""
        return self.edge_vn[self.chk_ptr[j]:self.chk_ptr[j + 1]]

    def vn_checks(self, i: int) -> np.ndarray:
        """Check indices incident to VN i."""
        return self.edge_cn[self.var_edges[self.var_ptr[i]:self.var_ptr[i + 1]]]

    def to_matrix(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        h[self.edge_cn, self.edge_vn] = 1
        return h

    @cached_property
    def rank(self) -> int:
        return len(_rref(self._row_ints(), self.n)[0])

    @cached_property
    def k(self) -> int:
        """Code dimension n - rank(H); equals n - m only for full-rank H."""
        return self.n - self.rank

    def degree_profile(self) -> tuple[dict[int, int], dict[int, int]]:
        """Returns ({vn_degree: count}, {check_degree: count})."""
        vdeg = np.diff(self.var_ptr)
        cdeg = np.diff(self.chk_ptr)
        vprof = {int(d): int(c) for d, c in zip(*np.unique(vdeg, return_counts=True))}
        cprof = {int(d): int(c) for d, c in zip(*np.unique(cdeg, return_counts=True))}
        return vprof, cprof

    def identity_hash(self) -> str:
        return hashlib.sha256(to_alist(self).encode()).hexdigest()

    def _row_ints(self) -> list[int]:
        """Rows of H as bit-packed integers (bit i = column i)."""
        out = []
        for j in range(self.m):
            r = 0
            for v in self.check_vns(j):
                r |= 1 << int(v)
            out.append(r)
        return out

    # -- GF(2) operations ---------------------------------------------------

    def syndrome(self, v: np.ndarray) -> np.ndarray:
        """Per-check XOR of v (length n) -> uint8 vector of length m."""
        v = np.asarray(v)
        if v.shape != (self.n,):
            raise ValueError(f"expected length-{self.n} vector, got shape {v.shape}")
        sums = np.bincount(self.edge_cn, weights=v[self.edge_vn].astype(np.float64),
                           minlength=self.m)
        return (sums.astype(np.int64) & 1).astype(np.uint8)

    def is_codeword(self, v: np.ndarray) -> bool:
        return not self.syndrome(v).any()


# -- alist I/O --------------------------------------------------------------

def parse_alist(text: str) -> ParityCheckCode:
    """Parse alist text into a validated ParityCheckCode."""
    lines = text.splitlines()

    def ints(lineno: int, expect: int | None = None) -> list[int]:
        if lineno > len(lines):
            raise AlistParseError(f"line {lineno}: unexpected end of input")
        try:
            vals = [int(t) for t in lines[lineno - 1].split()]
        except ValueError:
            raise AlistParseError(f"line {lineno}: non-integer token") from None
        if expect is not None and len(vals) != expect:
            raise AlistParseError(
                f"line {lineno}: expected {expect} entries, got {len(vals)}")
        return vals

    header = ints(1)
    if len(header) != 2 or header[0] <= 0 or header[1] <= 0:
        raise AlistParseError("line 1: header must be two positive integers 'n m'")
    n, m = header
    maxdeg = ints(2)
    if len(maxdeg) != 2:
        raise AlistParseError("line 2: expected 'max_col_degree max_row_degree'")
    max_cdeg, max_rdeg = maxdeg
    col_deg = ints(3, n)
    row_deg = ints(4, m)
    if any(d < 0 or d > max_cdeg for d in col_deg):
        raise AlistParseError("line 3: column degree outside 0..max_col_degree")
    if any(d < 0 or d > max_rdeg for d in row_deg):
        raise AlistParseError("line 4: row degree outside 0..max_row_degree")

    def adjacency(first_line: int, count: int, degrees: list[int], limit: int,
                  what: str) -> list[list[int]]:
        out = []
        for idx in range(count):
            lineno = first_line + idx
            vals = ints(lineno)
            deg = degrees[idx]
            if len(vals) < deg:
                raise AlistParseError(
                    f"line {lineno}: {len(vals)} entries but stated degree {deg}")
            entries = vals[:deg]
            if any(e == 0 for e in entries):
                raise AlistParseError(
                    f"line {lineno}: zero entry within the stated degree")
            if any(e < 1 or e > limit for e in entries):
                raise AlistParseError(
                    f"line {lineno}: {what} index out of range 1..{limit}")
            if any(e != 0 for e in vals[deg:]):
                raise AlistParseError(
                    f"line {lineno}: nonzero padding beyond the stated degree")
            if len(set(entries)) != deg:
                raise AlistParseError(f"line {lineno}: duplicate {what} index")
            out.append([e - 1 for e in entries])
        return out

    cols = adjacency(5, n, col_deg, m, "check")
    rows = adjacency(5 + n, m, row_deg, n, "VN")

    col_sets = [set(c) for c in cols]
    for j, r in enumerate(rows):
        for v in r:
            if j not in col_sets[v]:
                raise AlistParseError(
                    f"line {5 + n + j}: row {j + 1} lists VN {v + 1} but column "
                    f"{v + 1} does not list check {j + 1}")
    if sum(col_deg) != sum(row_deg):
        raise AlistParseError("degree lists disagree on total edge count")
    return ParityCheckCode.from_rows(n, m, rows)


def load_alist(path) -> ParityCheckCode:
    with open(path) as f:
        code = parse_alist(f.read())
    code.source = str(path)
    return code


def to_alist(code: ParityCheckCode) -> str:
    """Canonical (unpadded, ascending-index) alist serialization."""
    cols = [code.vn_checks(i) + 1 for i in range(code.n)]
    rows = [code.check_vns(j) + 1 for j in range(code.m)]
    out = [f"{code.n} {code.m}",
           f"{max(len(c) for c in cols)} {max(len(r) for r in rows)}",
           " ".join(str(len(c)) for c in cols),
           " ".join(str(len(r)) for r in rows)]
    out += [" ".join(str(x) for x in c) for c in cols]
    out += [" ".join(str(x) for x in r) for r in rows]
    return "\n".join(out) + "\n"


# -- small-code oracles ------------------------------------------------------

def _rref(row_ints: list[int], n: int) -> tuple[list[int], list[int]]:
    """GF(2) reduced row echelon form on bit-packed rows.

    Returns (pivot_columns, reduced_rows); rank = len(pivot_columns).
    """
    rows = list(row_ints)
    pivots = []
    r = 0
    for col in range(n):
        mask = 1 << col
        piv = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots, rows[:r]


def generator_matrix(code: ParityCheckCode) -> np.ndarray:
    """k x n generator derived from H by GF(2) elimination (G H^T = 0)."""
    pivots, rows = _rref(code._row_ints(), code.n)
    pivot_set = set(pivots)
    free_cols = [c for c in range(code.n) if c not in pivot_set]
    g = np.zeros((len(free_cols), code.n), dtype=np.uint8)
    for gi, f in enumerate(free_cols):
        g[gi, f] = 1
        for ri, p in enumerate(pivots):
            g[gi, p] = (rows[ri] >> f) & 1
    return g


ENUMERATION_LIMIT = 16


def enumerate_codewords(code: ParityCheckCode, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """All 2^k codewords as a (2^k, n) uint8 array; requires k <= limit."""
    if code.k > limit:
        raise ValueError(f"k={code.k} exceeds enumeration limit {limit}")
    g = generator_matrix(code)
    k = g.shape[0]
    msgs = ((np.arange(2 ** k, dtype=np.uint32)[:, None] >> np.arange(k, dtype=np.uint32)) & 1)
    return (msgs.astype(np.uint8) @ g % 2).astype(np.uint8)


def brute_force_mld(code: ParityCheckCode, y: np.ndarray,
                    limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """Codeword minimizing ||y - (-1)^c||; ties -> lexicographically smallest."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.n,):
        raise ValueError(f"expected length-{code.n} vector, got shape {y.shape}")
    cws = enumerate_codewords(code, limit)
    d = ((y - (1.0 - 2.0 * cws)) ** 2).sum(axis=1)
    ties = cws[d == d.min()]
    return ties[np.lexsort(ties.T[::-1])[0]]
