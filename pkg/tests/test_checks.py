import numpy as np

from aelq.checks import (
    coset_pair_certificates,
    duality_pairing_violations,
    lambda_crosscheck,
    partial_minimizer_violations,
    random_pairs,
    random_pseudocodeword,
    run_suite,
    trace_pairing_violations,
)
from aelq.gf import field_make
from aelq.graph import graph_complete, graph_random_regular
from instances import instance


def test_suite_passes_on_mixed_instances():
    names = ["main", "tiny", "k3_parity", "r64_422", "r63_qgrs8"]
    res = run_suite({n: instance(n) for n in names}, {"R84": graph_random_regular(8, 4, 3)}, seed=1, samples=50)
    failed = [r for r in res if not r.ok]
    assert not failed, failed
    kinds = {r.name for r in res}
    assert kinds == {
        "dual_space_identity",
        "duality_maps",
        "partial_minimizer",
        "distance",
        "johnson_covering",
        "correlation_rounding",
        "eml_pseudoexpectation",
        "lambda_matches_sigma2",
        "scalar_eml",
    }
    assert {r.instance for r in res if r.name == "scalar_eml"} == {f"{n}.graph" for n in names} | {"R84"}


def test_suite_is_deterministic():
    a = run_suite({"tiny": instance("tiny")}, seed=4, samples=20)
    b = run_suite({"tiny": instance("tiny")}, seed=4, samples=20)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_suite_records_library_errors(monkeypatch):
    import aelq.checks as checks
    from aelq.errors import InvariantViolation

    def boom(*a, **k):
        raise InvariantViolation("forced")

    monkeypatch.setattr(checks, "ael_distance", boom)
    res = run_suite({"tiny": instance("tiny")}, samples=5)
    bad = [r for r in res if not r.ok]
    assert [r.name for r in bad] == ["distance"] and "forced" in bad[0].detail


def test_pairing_helpers():
    for name in ("main", "r63_qgrs8"):
        assert duality_pairing_violations(instance(name).maps) == 0
    for m in (2, 3, 4):
        assert trace_pairing_violations(field_make(2, m)) == 0
    assert trace_pairing_violations(field_make(3, 2)) == 0


def test_partial_minimizer_helper(rng):
    code = instance("r84_422")
    Z, H = random_pairs(code, 200, rng)
    assert Z.shape == H.shape == (200, code.length)
    assert all(v == 0 for v in partial_minimizer_violations(code, Z, H).values())


def test_lambda_crosscheck():
    assert lambda_crosscheck(graph_complete(5)) < 1e-9
    assert lambda_crosscheck(graph_random_regular(10, 3, 0)) < 1e-9


def test_coset_pair_certificates():
    pairs, worst = coset_pair_certificates(instance("main"))
    assert pairs > 0 and worst >= -1e-9


def test_random_pseudocodeword(rng):
    code = instance("main")
    P = random_pseudocodeword(code, rng, size=3)
    assert len(P) == 3
    assert np.isclose(np.sum(P.weights), 1.0)
    assert np.all(code.ex.contains(P.support))
