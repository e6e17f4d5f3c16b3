import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarkit.core import (
    CodeConfig,
    embed_message,
    generator_matrix,
    polar_transform,
    row_weight,
)


def test_transform_all_zero_fixed_point():
    assert np.array_equal(polar_transform([0, 0, 0, 0]), np.zeros(4, np.uint8))


def test_transform_n1_by_hand():
    # (1,1) times [[1,0],[1,1]] = (0,1)
    assert np.array_equal(polar_transform([1, 1]), np.array([0, 1], np.uint8))


def test_transform_n2_last_row_all_ones():
    assert np.array_equal(polar_transform([0, 0, 0, 1]), np.ones(4, np.uint8))


@pytest.mark.parametrize("n", range(0, 8))
def test_transform_matches_matrix_oracle(n, rng):
    G = generator_matrix(n)
    N = 1 << n
    for _ in range(25):
        u = rng.integers(0, 2, N).astype(np.uint8)
        assert np.array_equal(polar_transform(u, n), (u @ G) % 2)


def test_transform_rejects_bad_length():
    with pytest.raises(ValueError):
        polar_transform([0, 1, 0])
    with pytest.raises(ValueError):
        polar_transform([0, 1], n=2)


@given(st.integers(0, 7), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_transform_involution_and_linearity(n, rnd):
    N = 1 << n
    u = np.array([rnd.randint(0, 1) for _ in range(N)], np.uint8)
    v = np.array([rnd.randint(0, 1) for _ in range(N)], np.uint8)
    assert np.array_equal(polar_transform(polar_transform(u)), u)
    assert np.array_equal(
        polar_transform(u ^ v), polar_transform(u) ^ polar_transform(v)
    )


@pytest.mark.parametrize(
    "i,n,expected", [(1, 2, 1), (4, 2, 4), (1, 0, 1), (2, 3, 2), (8, 3, 8)]
)
def test_row_weight_examples(i, n, expected):
    assert row_weight(i, n) == expected


@pytest.mark.parametrize("n", range(0, 11))
def test_row_weight_closed_form_vs_explicit_rows(n):
    G = generator_matrix(n)
    for i in range(1, (1 << n) + 1):
        assert row_weight(i, n) == int(G[i - 1].sum())


def test_row_weight_out_of_range():
    with pytest.raises(ValueError):
        row_weight(0, 2)
    with pytest.raises(ValueError):
        row_weight(5, 2)


def test_embed_identity_when_full_rate():
    cfg = CodeConfig.from_info_set(4, (1, 2, 3, 4))
    v = np.array([1, 0, 1, 1], np.uint8)
    assert np.array_equal(embed_message(v, cfg), v)


def test_embed_direct_placement():
    cfg = CodeConfig.from_info_set(4, (3, 4))
    assert np.array_equal(embed_message([1, 0], cfg), np.array([0, 0, 1, 0], np.uint8))
    cfg = CodeConfig.from_info_set(4, (4,))
    assert np.array_equal(embed_message([1], cfg), np.array([0, 0, 0, 1], np.uint8))


def test_embed_length_mismatch():
    cfg = CodeConfig.from_info_set(4, (3, 4))
    with pytest.raises(ValueError):
        embed_message([1], cfg)


def test_code_config_invariants():
    cfg = CodeConfig.from_info_set(8, (8, 4, 6, 7))
    assert cfg.A == (4, 6, 7, 8)  # stored ascending
    assert cfg.K == 4 and cfg.n == 3
    assert set(cfg.A) | set(cfg.F) == set(range(1, 9))
    assert not set(cfg.A) & set(cfg.F)
    assert cfg.a(1) == 4 and cfg.a(4) == 8
    with pytest.raises(IndexError):
        cfg.a(5)
    assert cfg.frozen_mask.tolist() == [1, 1, 1, 0, 1, 0, 0, 0]


def test_code_config_validation():
    with pytest.raises(ValueError):
        CodeConfig.from_info_set(6, (1,))
    with pytest.raises(ValueError):
        CodeConfig.from_info_set(4, (0, 1))
    with pytest.raises(ValueError):
        CodeConfig.from_info_set(4, (1, 1))


def test_code_config_json_round_trip():
    cfg = CodeConfig.from_info_set(16, (8, 12, 14, 15, 16))
    again = CodeConfig.from_json_dict(cfg.to_json_dict())
    assert again == cfg
