"""Configuration container: geometry accessors, connectivity, CSV format."""

import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chainform.chain import (
    ETA_CONN,
    ChainError,
    Configuration,
    chain_vectors,
    reconstruct,
)
from conftest import max_chain, random_2d


def test_positions_validated():
    with pytest.raises(ChainError):
        Configuration(np.zeros((3, 3)))
    with pytest.raises(ChainError):
        Configuration(np.zeros((1, 2)))


def test_positions_immutable():
    cfg = max_chain(4)
    with pytest.raises(ValueError):
        cfg.positions[0, 0] = 5.0


def test_basic_geometry():
    cfg = Configuration([(0.0, 0.0), (0.5, 0.0), (0.5, 0.4)])
    assert np.allclose(cfg.vectors(), [(0.5, 0.0), (0.0, 0.4)])
    assert np.allclose(cfg.edge_lengths(), [0.5, 0.4])
    assert cfg.length == pytest.approx(0.9)
    assert cfg.endpoint_distance == pytest.approx(np.hypot(0.5, 0.4))
    assert cfg.n == 3


def test_connectivity_predicate():
    assert max_chain(5).is_connected()
    stretched = Configuration([(0.0, 0.0), (1.5, 0.0)])
    assert not stretched.is_connected()
    with pytest.raises(ChainError):
        stretched.require_connected()
    # right at the tolerance boundary
    assert Configuration([(0.0, 0.0), (1.0 + ETA_CONN / 2, 0.0)]).is_connected()


@settings(max_examples=20, deadline=None)
@given(n=st.integers(3, 32), seed=st.integers(0, 2**63 - 1))
def test_reconstruct_round_trip(n, seed):
    cfg = random_2d(n, seed)
    w = chain_vectors(cfg)
    again = reconstruct(w, anchor=cfg.positions[0])
    assert np.allclose(again.positions, cfg.positions, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 32), seed=st.integers(0, 2**63 - 1))
def test_csv_round_trip_lossless(n, seed):
    rng = np.random.default_rng(seed)
    cfg = Configuration(rng.standard_normal((n, 2)) * 100.0)
    buf = io.StringIO()
    cfg.to_csv(buf)
    back = Configuration.from_csv(io.StringIO(buf.getvalue()))
    assert np.array_equal(back.positions, cfg.positions)  # bit exact


def test_csv_header_and_index_validation():
    with pytest.raises(ChainError):
        Configuration.from_csv(io.StringIO("x,y\n0,0\n1,0\n"))
    with pytest.raises(ChainError):
        Configuration.from_csv(io.StringIO("i,x,y\n1,0,0\n3,1,0\n"))


def test_csv_rows_sorted_by_index():
    text = "i,x,y\n2,1.0,0.0\n1,0.0,0.0\n3,2.0,0.0\n"
    cfg = Configuration.from_csv(io.StringIO(text))
    assert np.allclose(cfg.positions, [(0, 0), (1, 0), (2, 0)])
