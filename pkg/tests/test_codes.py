import numpy as np
import pytest

from mrbp.codes import (AlistParseError, ParityCheckCode, brute_force_mld,
                        enumerate_codewords, generator_matrix, parse_alist,
                        to_alist)

from conftest import TOY_ALIST


def test_parse_toy_alist():
    code = parse_alist(TOY_ALIST)
    assert (code.n, code.m, code.k) == (3, 2, 1)
    assert [list(code.vn_checks(i)) for i in range(3)] == [[0], [0, 1], [1]]
    assert [list(code.check_vns(j)) for j in range(2)] == [[0, 1], [1, 2]]


def test_parse_accepts_zero_padding():
    padded = """3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""
    code = parse_alist(padded)
    assert code.num_edges == 4


def test_parse_rejects_inconsistent_adjacency():
    bad = TOY_ALIST.replace("2 3", "1 3")  # row 2 claims VN 1, column 1 disagrees
    with pytest.raises(AlistParseError, match="line 9"):
        parse_alist(bad)


@pytest.mark.parametrize("mutate, where", [
    (lambda t: t.replace("3 2", "x 2", 1), "line 1"),
    (lambda t: t.replace("1 2 1", "1 2 9", 1), "line 3"),
    (lambda t: t.replace("\n1\n", "\n9\n", 1), "line 5"),
    (lambda t: t.replace("\n1\n", "\n0\n", 1), "line 5"),
    (lambda t: t.replace("1 2\n2\n", "1 2\n2 7\n", 1), "line 7"),
])
def test_parse_errors_name_lines(mutate, where):
    with pytest.raises(AlistParseError, match=where):
        parse_alist(mutate(TOY_ALIST))


def test_serialize_reparse_idempotent(hamming, qc96, toy):
    for code in (hamming, qc96, toy):
        text = to_alist(code)
        again = parse_alist(text)
        assert to_alist(again) == text
        assert again.n == code.n and again.m == code.m
        np.testing.assert_array_equal(again.edge_vn, code.edge_vn)
        np.testing.assert_array_equal(again.var_edges, code.var_edges)


def test_syndrome_examples(toy):
    np.testing.assert_array_equal(toy.syndrome(np.array([1, 1, 0])), [0, 1])
    np.testing.assert_array_equal(toy.syndrome(np.array([1, 1, 1])), [0, 0])
    with pytest.raises(ValueError):
        toy.syndrome(np.zeros(4, dtype=np.uint8))


def test_syndrome_linearity(hamming):
    rng = np.random.default_rng(0)
    for c in enumerate_codewords(hamming):
        e = rng.integers(0, 2, hamming.n).astype(np.uint8)
        np.testing.assert_array_equal(hamming.syndrome((c + e) % 2),
                                      hamming.syndrome(e))


def test_is_codeword(toy, hamming):
    assert toy.is_codeword(np.zeros(3, dtype=np.uint8))
    unit = np.zeros(7, dtype=np.uint8)
    unit[0] = 1
    assert not hamming.is_codeword(unit)
    for c in enumerate_codewords(hamming):
        assert hamming.is_codeword(c)


def test_enumerate_codewords(toy):
    cws = enumerate_codewords(toy)
    assert sorted(map(tuple, cws)) == [(0, 0, 0), (1, 1, 1)]
    # exhaustive cross-check: every length-3 vector is a codeword iff listed
    listed = set(map(tuple, cws))
    for v in range(8):
        vec = np.array([(v >> i) & 1 for i in range(3)], dtype=np.uint8)
        assert (tuple(vec) in listed) == toy.is_codeword(vec)


def test_enumerate_repetition_code():
    rep = ParityCheckCode.from_matrix(np.array([[1, 1]], dtype=np.uint8))
    assert sorted(map(tuple, enumerate_codewords(rep))) == [(0, 0), (1, 1)]


def test_enumerate_count_and_rank():
    # duplicated row: rank-deficient H, k = n - rank
    h = np.array([[1, 1, 0], [1, 1, 0]], dtype=np.uint8)
    code = ParityCheckCode.from_matrix(h)
    assert code.rank == 1 and code.k == 2
    assert len(enumerate_codewords(code)) == 2 ** code.k


def test_enumeration_limit(qc96):
    with pytest.raises(ValueError, match="limit"):
        enumerate_codewords(qc96)


def test_generator_matrix(hamming, qc96):
    for code in (hamming, qc96):
        g = generator_matrix(code)
        assert g.shape == (code.k, code.n)
        h = code.to_matrix()
        assert not ((g @ h.T) % 2).any()
        # rows independent: all 2^k sums distinct on a small code
        if code.k <= 12:
            assert len({tuple(c) for c in enumerate_codewords(code)}) == 2 ** code.k


def test_mld_examples(toy):
    np.testing.assert_array_equal(brute_force_mld(toy, np.array([0.9, 0.8, 1.2])),
                                  [0, 0, 0])
    np.testing.assert_array_equal(brute_force_mld(toy, np.array([-1.0, -1.0, -1.0])),
                                  [1, 1, 1])


def test_mld_matches_exhaustive_scan(hamming):
    # oracle: scan all 2^7 vectors, keep those with zero syndrome, take argmin
    all_cws = [np.array([(v >> i) & 1 for i in range(7)], dtype=np.uint8)
               for v in range(128)]
    all_cws = [c for c in all_cws if hamming.is_codeword(c)]
    assert len(all_cws) == 16
    rng = np.random.default_rng(3)
    for _ in range(50):
        y = rng.normal(size=7)
        d = [((y - (1 - 2.0 * c)) ** 2).sum() for c in all_cws]
        expect = all_cws[int(np.argmin(d))]
        got = brute_force_mld(hamming, y)
        np.testing.assert_array_equal(got, expect)
        assert hamming.is_codeword(got)


def test_mld_tie_breaks_lexicographically(toy):
    # equidistant from 000 and 111
    got = brute_force_mld(toy, np.array([0.0, 0.0, 0.0]))
    np.testing.assert_array_equal(got, [0, 0, 0])
