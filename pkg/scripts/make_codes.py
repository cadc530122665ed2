#!/usr/bin/env python3
"""Construct the alist files shipped in codes/.

- hamming_7_4.alist: the classic single-error-correcting (7,4) code.
- qc_96_48.alist: a rate-1/2 quasi-cyclic irregular LDPC code, built from a
  6x12 base with circulant size Z=8, column degrees (4,4,3,...,3,2,2) and
  row degree 6.  A seeded random search picks circulant shifts until the
  lifted graph has girth >= 6 and H has full rank 48.

Deterministic: re-running reproduces identical files.
"""

import sys
from itertools import combinations
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mrbp.codes import ParityCheckCode, to_alist  # noqa: E402

Z = 8
BASE_ROWS, BASE_COLS = 6, 12
COL_DEGREES = [4, 4, 3, 3, 3, 3, 3, 3, 3, 3, 2, 2]
ROW_DEGREE = 6


def sample_base(rng: np.random.Generator) -> np.ndarray | None:
    """Random 0/1 base with the exact degree profile, or None on a dead end."""
    slots = np.repeat(np.arange(BASE_COLS), COL_DEGREES)
    for _ in range(200):
        rng.shuffle(slots)
        rows = slots.reshape(BASE_ROWS, ROW_DEGREE)
        if all(len(set(r)) == ROW_DEGREE for r in rows):
            base = np.zeros((BASE_ROWS, BASE_COLS), dtype=np.uint8)
            for i, r in enumerate(rows):
                base[i, r] = 1
            return base
    return None


def shifts_without_4_cycles(base: np.ndarray, rng: np.random.Generator):
    """Circulant shifts such that the lifted graph has no 4-cycles."""
    for _ in range(2000):
        s = rng.integers(0, Z, size=base.shape)
        ok = True
        for a, b in combinations(range(BASE_ROWS), 2):
            shared = np.flatnonzero(base[a] & base[b])
            diffs = (s[a, shared] - s[b, shared]) % Z
            if len(set(diffs.tolist())) != len(shared):
                ok = False
                break
        if ok:
            return s
    return None


def lift(base: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    h = np.zeros((BASE_ROWS * Z, BASE_COLS * Z), dtype=np.uint8)
    for i in range(BASE_ROWS):
        for j in range(BASE_COLS):
            if base[i, j]:
                for z in range(Z):
                    h[i * Z + z, j * Z + (z + int(shifts[i, j])) % Z] = 1
    return h


def girth_at_least_6(code: ParityCheckCode) -> bool:
    h = code.to_matrix().astype(np.int64)
    overlap = h @ h.T
    np.fill_diagonal(overlap, 0)
    return overlap.max() <= 1  # two checks never share two VNs


def build_qc() -> ParityCheckCode:
    rng = np.random.default_rng(20240521)
    while True:
        base = sample_base(rng)
        if base is None:
            continue
        shifts = shifts_without_4_cycles(base, rng)
        if shifts is None:
            continue
        code = ParityCheckCode.from_matrix(lift(base, shifts))
        if code.rank == BASE_ROWS * Z and girth_at_least_6(code):
            return code


def build_hamming() -> ParityCheckCode:
    h = np.array([[1, 0, 1, 0, 1, 0, 1],
                  [0, 1, 1, 0, 0, 1, 1],
                  [0, 0, 0, 1, 1, 1, 1]], dtype=np.uint8)
    return ParityCheckCode.from_matrix(h)


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "codes"
    out_dir.mkdir(exist_ok=True)
    for name, code in (("hamming_7_4", build_hamming()), ("qc_96_48", build_qc())):
        path = out_dir / f"{name}.alist"
        path.write_text(to_alist(code))
        vprof, cprof = code.degree_profile()
        print(f"{path.name}: n={code.n} m={code.m} k={code.k} "
              f"edges={code.num_edges} vdeg={vprof} cdeg={cprof}")


if __name__ == "__main__":
    main()
