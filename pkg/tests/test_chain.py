import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import floyd_warshall as _scipy_fw

from heisbcp.chain import (
    ChainFamily,
    ChainSpace,
    DepthError,
    MetricError,
    build_chain_counterexample,
    chain_distance,
    check_chain_space,
    check_metric,
    floyd_warshall,
    smallest_n0,
    space_from_json,
    theta_weight,
    verify_chain_family,
)
from heisbcp.serialize import dumps, family_from_json


def scipy_floyd_warshall(w):
    # sparse input: scipy's dense path treats weights below 1e-8 as missing edges
    return _scipy_fw(csr_matrix(w), directed=False)


def line():
    return ChainSpace.from_line("1/n", 40, 0.9)


def test_n0_scan():
    assert smallest_n0(0.9) == 10
    assert smallest_n0(0.5) == 2
    for c in (0.3, 0.75, 0.99):
        n0 = smallest_n0(c)
        assert c * (n0 + 1) < n0 and not c * n0 < n0 - 1
    with pytest.raises(ValueError):
        smallest_n0(1.0)


def test_theta_weight_case_split():
    s = line()
    x10, x9, x3 = s.index_of(10), s.index_of(9), s.index_of(3)
    assert theta_weight(s, 0, x10) == s.rho[9] == pytest.approx(1 / 11)
    assert theta_weight(s, x10, 0) == s.rho[9]
    assert theta_weight(s, 0, x9) == s.base_d[0, x9] == 1 / 9
    assert theta_weight(s, x3, x10) == s.base_d[x3, x10]


def test_line_instance_values():
    s = line()
    assert s.n0 == 10 and s.dropped == ()
    d = chain_distance(s)
    assert abs(d[s.index_of(10), 0] - 1 / 11) <= 1e-15
    assert np.all(np.diag(d) == 0) and np.array_equal(d, d.T)


def test_floyd_warshall_matches_scipy():
    for xn, N in (("1/n", 40), ("2^-n", 60), ("1/n^2", 30)):
        s = ChainSpace.from_line(xn, N, 0.9)
        w = s.weights()
        assert np.max(np.abs(floyd_warshall(w) - scipy_floyd_warshall(w))) == 0
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, (30, 2))
    base = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    s = ChainSpace.build(base, 0.8)
    assert np.allclose(s.dbar(), scipy_floyd_warshall(s.weights()), rtol=0, atol=1e-15)


@pytest.mark.parametrize("xn, N", [("1/n", 40), ("2^-n", 62), ("1/n^2", 40)])
def test_chain_lemmas(xn, N):
    chk = check_chain_space(ChainSpace.from_line(xn, N, 0.9))
    assert chk.passed, chk.to_json()


def test_isolated_lemma_is_nontrivial_on_geometric_sequence():
    chk = check_chain_space(ChainSpace.from_line("2^-n", 60, 0.9))
    assert chk.isolated_checked == 854 and chk.isolated_violations == 0
    assert check_chain_space(line()).isolated_checked == 0


def _random_space(seed, n):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(0.01, 1, n))[::-1]
    pts = np.concatenate([[0.0], x])
    return np.abs(pts[:, None] - pts[None])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(3, 25), st.floats(0.3, 0.95))
def test_equivalence_and_metric_on_random_lines(seed, n, c):
    s = ChainSpace.build(_random_space(seed, n), c)
    chk = check_chain_space(s)
    assert chk.equivalence_ok and chk.metric_error is None
    assert np.all(np.diff(s.rho) < 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(4, 25), st.floats(0.3, 0.95))
def test_enlarging_point_set_never_increases_dbar(seed, n, c):
    base = _random_space(seed, n)
    s_full = ChainSpace.build(base, c)
    # superset: one extra point on the line that is not part of the sequence
    rng = np.random.default_rng(seed)
    extra = rng.uniform(-1, 2)
    pts = np.concatenate([base[0], [extra]])
    big = np.abs(pts[:, None] - pts[None])
    if np.any(big[-1, :-1] == 0):
        return
    s_big = ChainSpace.build(big, c, seq=list(s_full.seq))
    assert s_big.seq == s_full.seq
    assert np.all(s_big.dbar()[:-1, :-1] <= s_full.dbar())


def test_ingestion_reindexes_to_decreasing_rho():
    # x_2 is farther from xbar than x_1, so it cannot be the second term
    pts = np.array([0.0, 0.5, 0.9, 0.2, 0.1])
    s = ChainSpace.build(np.abs(pts[:, None] - pts[None]), 0.9)
    assert s.seq == (1, 3, 4) and s.dropped == (2,)
    assert np.all(np.diff(s.rho) < 0)


def test_base_metric_validation():
    bad = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    with pytest.raises(MetricError):
        ChainSpace.build(bad, 0.9)
    assert check_metric(np.array([[0, 1], [2, 0]], dtype=float)) == "matrix is not symmetric"
    assert check_metric(np.array([[0, 0], [0, 0]], dtype=float)).startswith("distinct points")
    with pytest.raises(ValueError):
        ChainSpace.build(np.abs(np.subtract.outer([0.0, 1.0], [0.0, 1.0])), 0.9, seq=[0])


def test_counterexample_on_line_instance():
    s = line()
    f = build_chain_counterexample(s, 1)
    assert verify_chain_family(f).valid and f.seq_positions == (10,)
    with pytest.raises(DepthError, match="element 1"):
        build_chain_counterexample(s, 3)
    with pytest.raises(DepthError):
        build_chain_counterexample(ChainSpace.from_line("1/n", 5, 0.9), 1)


def test_counterexample_on_geometric_sequence():
    s = ChainSpace.from_line("2^-n", 62, 0.9)
    f = build_chain_counterexample(s, 6)
    rep = verify_chain_family(f)
    assert rep.valid and rep.cardinality == 6 and rep.exclusion_margin > 0
    assert f.seq_positions == (10, 17, 26, 36, 47, 59)
    with pytest.raises(DepthError, match="element 6"):
        build_chain_counterexample(s, 7)


def test_chain_family_json_round_trip():
    f = build_chain_counterexample(ChainSpace.from_line("2^-n", 40, 0.9), 4)
    text = dumps(f.to_json())
    g = family_from_json(json.loads(text))
    assert isinstance(g, ChainFamily)
    assert np.array_equal(g.matrix, f.matrix) and g.centers == f.centers
    assert np.array_equal(g.radii, f.radii)
    assert verify_chain_family(g).valid
    with pytest.raises(ValueError):
        ChainFamily.from_json({**f.to_json(), "balls": [{"center": 99, "radius": 1.0}]})


def test_verify_chain_family_detects_overlap():
    s = ChainSpace.from_line("2^-n", 40, 0.9)
    f = build_chain_counterexample(s, 2)
    # enlarge the second radius so it swallows the first center
    g = ChainFamily(f.matrix, f.centers, np.array([f.radii[0], 1.0]))
    assert not verify_chain_family(g).valid


def test_space_from_json():
    s = space_from_json({"c": 0.9, "line_sequence": {"xn": "1/n", "N": 40}})
    assert s.n0 == 10 and s.size == 41
    pts = np.array([0.0, 1.0, 0.5])
    m = np.abs(pts[:, None] - pts[None]).tolist()
    assert space_from_json({"c": 0.5, "base": {"points": 3, "matrix": m}}).size == 3
    with pytest.raises(ValueError):
        space_from_json({"c": 0.5, "base": {"points": 4, "matrix": m}})
    with pytest.raises(ValueError):
        space_from_json({"c": 0.5})
    with pytest.raises(ValueError):
        space_from_json({"line_sequence": {"xn": "log n", "N": 4}})
