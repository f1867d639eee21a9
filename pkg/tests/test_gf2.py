from itertools import product

import numpy as np
import pytest

from wiretap_ldpc.degrees import regular
from wiretap_ldpc.gf2 import (
    DegenerateGraphError,
    codeword_in_original_order,
    encode,
    parity_violations,
    triangularize,
)
from wiretap_ldpc.tanner import TannerGraph, sample_graph


def graph_from_dense(h):
    h = np.asarray(h, dtype=np.uint8)
    return TannerGraph(
        n_var=h.shape[1],
        n_chk=h.shape[0],
        chk_adj=[np.flatnonzero(row).astype(np.int32) for row in h],
    )


def row_space(h):
    """All GF(2) combinations of the rows (exponential; tiny inputs only)."""
    h = np.asarray(h, dtype=np.uint8)
    out = set()
    for coeffs in product([0, 1], repeat=h.shape[0]):
        v = np.zeros(h.shape[1], dtype=np.uint8)
        for c, row in zip(coeffs, h):
            if c:
                v ^= row
        out.add(v.tobytes())
    return out


def reassembled_dense(tri):
    """[A|B] pushed back through the column permutation."""
    r = tri.n_parity
    h = np.zeros((r, tri.n_total), dtype=np.uint8)
    a = tri.a_dense()
    b = tri.b_dense()
    h[:, : tri.n_info] = a
    h[:, tri.n_info :] = b
    out = np.zeros_like(h)
    out[:, tri.column_perm] = h
    return out


def test_already_triangular_is_fixed_point():
    # H = [A | lower-triangular B] with message positions leading
    h = np.array(
        [
            [1, 0, 1, 0, 0],
            [0, 1, 1, 1, 0],
            [1, 1, 0, 1, 1],
        ],
        dtype=np.uint8,
    )
    tri = triangularize(graph_from_dense(h), message_positions=[0])
    assert tri.n_info == 2
    b = tri.b_dense()
    assert np.all(np.triu(b, 1) == 0)
    assert np.all(np.diag(b) == 1)
    assert row_space(reassembled_dense(tri)) == row_space(h)


def test_three_by_six_row_space_oracle():
    h = np.array(
        [
            [1, 1, 0, 1, 0, 0],
            [0, 1, 1, 0, 1, 0],
            [1, 1, 1, 0, 0, 1],
        ],
        dtype=np.uint8,
    )
    for msg in ([0], [2, 4], [5]):
        tri = triangularize(graph_from_dense(h), message_positions=msg)
        assert row_space(reassembled_dense(tri)) == row_space(h)
        assert list(tri.column_perm[: len(msg)]) == list(msg)


def test_random_50x100_codewords_satisfy_original_checks(rate541):
    g = sample_graph(rate541, 100, seed=21, remove_cycles=False)
    rng = np.random.default_rng(0)
    tri = triangularize(g, rng.choice(100, size=10, replace=False))
    for _ in range(50):
        u = rng.integers(0, 2, tri.n_info)
        cw = encode(tri, u)
        x = codeword_in_original_order(tri, cw)
        assert parity_violations(g, x) == 0


def test_encode_zero_maps_to_zero(small_code):
    cw = encode(small_code.tri, np.zeros(small_code.n_info, dtype=np.uint8))
    assert not cw.any()


def test_encode_linearity(small_code):
    rng = np.random.default_rng(2)
    tri = small_code.tri
    for _ in range(20):
        u1 = rng.integers(0, 2, tri.n_info).astype(np.uint8)
        u2 = rng.integers(0, 2, tri.n_info).astype(np.uint8)
        assert np.array_equal(
            encode(tri, u1) ^ encode(tri, u2), encode(tri, u1 ^ u2)
        )


def test_thousand_random_encodings_parity_oracle(small_code):
    rng = np.random.default_rng(3)
    tri = small_code.tri
    g = tri.graph
    violations = 0
    for _ in range(1000):
        u = rng.integers(0, 2, tri.n_info)
        x = codeword_in_original_order(tri, encode(tri, u))
        violations += parity_violations(g, x)
    assert violations == 0


def test_b_lower_triangular_unit_diagonal(small_code):
    b = small_code.tri.b_dense()
    assert np.all(np.triu(b, 1) == 0)
    assert np.all(np.diag(b) == 1)


def test_dependent_rows_dropped():
    h = np.array(
        [
            [1, 1, 0, 0],
            [0, 1, 1, 0],
            [1, 0, 1, 0],  # sum of the first two
        ],
        dtype=np.uint8,
    )
    tri = triangularize(graph_from_dense(h), message_positions=[])
    assert tri.n_dropped_rows == 1
    assert tri.n_info == 2
    assert row_space(reassembled_dense(tri)) == row_space(h)


def test_message_only_row_rejected():
    # the second check involves only the message column
    h = np.array(
        [
            [1, 1, 0],
            [1, 0, 0],
        ],
        dtype=np.uint8,
    )
    with pytest.raises(DegenerateGraphError):
        triangularize(graph_from_dense(h), message_positions=[0])


def test_too_many_message_positions_rejected():
    g = sample_graph(regular(3, 6), 24, seed=5, remove_cycles=False)
    with pytest.raises((DegenerateGraphError, ValueError)):
        triangularize(g, message_positions=range(20))


def test_encode_wrong_length_rejected(small_code):
    with pytest.raises(ValueError):
        encode(small_code.tri, np.zeros(3, dtype=np.uint8))
