import dataclasses
import itertools

import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, integers, permutations

from squareham import (
    Certificate,
    Graph,
    FailureReport,
    InputError,
    PipelineConfig,
    brute_force_square_ham,
    complete_graph,
    find_square_ham,
    gnp_generate,
    is_square_cycle,
    is_square_path,
    verify_certificate,
)
from squareham.hamiltonian import (
    STAGES,
    almost_spanning_square_path,
    certificate_from_json_obj,
    certificate_to_json_obj,
    cover_with_square_paths,
    failure_report_to_json_obj,
    match_leftover,
)

from strategies import gnp_graphs


def square_cycle_host(n: int) -> Graph:
    edges = {
        tuple(sorted((i, (i + d) % n))) for i in range(n) for d in (1, 2)
    }
    return Graph(n, sorted(edges))


@given(permutations(list(range(8))))
def test_certificates_on_complete_hosts_always_verify(order: list[int]) -> None:
    g = complete_graph(8)
    check = verify_certificate(g, Certificate(tuple(order)))
    assert check.ok
    assert check.missing is None


def test_verification_pinpoints_the_first_gap() -> None:
    n = 9
    host = square_cycle_host(n)
    cert = Certificate(tuple(range(n)))
    assert verify_certificate(host, cert).ok
    broken = host.remove_edges([(2, 4)])
    check = verify_certificate(broken, cert)
    assert not check.ok
    assert check.missing == (2, 4)
    assert check.position == 2
    assert check.distance == 2


def test_verification_rejects_malformed_certificates() -> None:
    g = complete_graph(6)
    with pytest.raises(InputError):
        verify_certificate(g, Certificate((0, 1, 2, 3, 4, 4)))
    with pytest.raises(InputError):
        verify_certificate(g, Certificate((0, 1, 2)))
    with pytest.raises(InputError):
        verify_certificate(complete_graph(2), Certificate((0, 1)))


@given(integers(min_value=3, max_value=9))
def test_exhaustive_search_succeeds_on_complete_hosts(n: int) -> None:
    res = brute_force_square_ham(complete_graph(n))
    assert res.status == "found"
    assert verify_certificate(complete_graph(n), res.certificate).ok


def test_exhaustive_search_proves_absence_on_a_path() -> None:
    g = Graph(8, [(i, i + 1) for i in range(7)])
    res = brute_force_square_ham(g)
    assert res.status == "none"
    assert res.certificate is None


def test_exhaustive_search_respects_its_budget() -> None:
    g = gnp_generate(40, 0.5, 0)
    res = brute_force_square_ham(g, budget=50)
    assert res.status == "unknown"
    assert res.nodes <= 51


@settings(max_examples=30)
@given(gnp_graphs(min_n=5, max_n=10, min_p=0.3, max_p=1.0))
def test_small_instance_results_match_exhaustive_existence(g) -> None:
    outcome = find_square_ham(g)
    oracle = brute_force_square_ham(g)
    if isinstance(outcome, Certificate):
        assert oracle.status == "found"
        assert verify_certificate(g, outcome).ok
    else:
        assert oracle.status == "none"
        assert outcome.stage in STAGES


@settings(max_examples=10)
@given(integers(min_value=0, max_value=30), floats(min_value=0.1, max_value=0.4))
def test_almost_spanning_paths_are_square_and_meet_coverage(
    seed: int, eps: float
) -> None:
    g = gnp_generate(80, 0.6, seed)
    res = almost_spanning_square_path(g, eps=eps, seed=seed)
    assert is_square_path(g, res.path).ok
    assert res.coverage >= 1 - eps
    assert len(res.path) == len(set(res.path))


def test_almost_spanning_is_deterministic() -> None:
    g = gnp_generate(80, 0.6, 4)
    a = almost_spanning_square_path(g, eps=0.25, seed=9)
    b = almost_spanning_square_path(g, eps=0.25, seed=9)
    assert a.path == b.path


@settings(max_examples=10)
@given(integers(min_value=0, max_value=30))
def test_cover_paths_are_disjoint_square_and_account_for_everything(
    seed: int,
) -> None:
    g = gnp_generate(120, 0.6, seed)
    targets = [v for v in range(g.n) if v % 3 != 0]
    res = cover_with_square_paths(g, targets, eps=0.3, seed=seed, class_floor=8)
    seen: set[int] = set()
    for path in res.paths:
        assert is_square_path(g, path).ok
        assert not set(path) & seen
        seen |= set(path)
    assert seen | set(res.leftover) == set(targets)
    assert not seen & set(res.leftover)
    assert res.leftover_fraction <= 0.3


def test_cover_rejects_vertices_outside_the_host() -> None:
    g = gnp_generate(20, 0.5, 0)
    with pytest.raises(InputError):
        cover_with_square_paths(g, [5, 25], eps=0.3, seed=0)


def test_leftover_matching_pairs_into_the_absorbee_set() -> None:
    g = complete_graph(12)
    res = match_leftover(g, [0, 1, 2], [3, 4, 5, 6])
    assert res.ok
    matched = [x for _, x in res.pairs]
    assert len(set(matched)) == 3
    assert set(matched) <= {3, 4, 5, 6}
    for q, x in res.pairs:
        assert g.has_edge(q, x)
    with pytest.raises(InputError):
        match_leftover(g, [0, 1], [1, 2])


def test_leftover_matching_reports_deficiency() -> None:
    g = gnp_generate(10, 0.0, 0)
    res = match_leftover(g, [0, 1], [2, 3])
    assert not res.ok
    assert res.violator is not None


def test_pipeline_succeeds_and_certifies_on_a_dense_instance() -> None:
    g = gnp_generate(100, 0.6, 12)
    outcome = find_square_ham(g, config=PipelineConfig(seed=12))
    assert isinstance(outcome, Certificate)
    assert verify_certificate(g, outcome).ok
    assert is_square_cycle(g, outcome.order).ok


def test_pipeline_is_deterministic() -> None:
    g = gnp_generate(100, 0.6, 3)
    cfg = PipelineConfig(seed=8)
    first = find_square_ham(g, config=cfg)
    second = find_square_ham(g, config=cfg)
    assert type(first) == type(second)
    if isinstance(first, Certificate):
        assert first.order == second.order


def test_pipeline_failure_reports_name_a_stage() -> None:
    g = gnp_generate(100, 0.05, 0)
    outcome = find_square_ham(g, config=PipelineConfig(seed=0, restarts=2))
    assert isinstance(outcome, FailureReport)
    assert outcome.stage in STAGES
    assert outcome.diagnostics


def test_pipeline_delegates_small_hosts_to_exhaustive_search() -> None:
    g = Graph(8, [(i, i + 1) for i in range(7)])
    outcome = find_square_ham(g)
    assert isinstance(outcome, FailureReport)
    assert outcome.stage == "partition"
    assert outcome.diagnostics["mode"] == "small-instance-delegation"
    assert outcome.diagnostics["brute_status"] == "none"


def test_pipeline_checks_the_host_relation() -> None:
    g = complete_graph(30)
    tiny = gnp_generate(30, 0.1, 0)
    with pytest.raises(InputError):
        find_square_ham(g, gamma_host=tiny)


def test_config_validation_rejects_nonsense() -> None:
    with pytest.raises(InputError):
        PipelineConfig(eps=0.0)
    with pytest.raises(InputError):
        PipelineConfig(connector_length=10)
    with pytest.raises(InputError):
        PipelineConfig(restarts=0)
    with pytest.raises(InputError):
        PipelineConfig(assembly_lengths=(3,))


def test_certificate_and_failure_serialization_round_trip() -> None:
    cert = Certificate((2, 0, 1, 3))
    clone = certificate_from_json_obj(certificate_to_json_obj(cert))
    assert clone == cert
    report = FailureReport("covering", {"leftover": [1, 2]})
    obj = failure_report_to_json_obj(report)
    assert obj["stage"] == "covering"
    assert obj["diagnostics"]["leftover"] == [1, 2]
    with pytest.raises(InputError):
        certificate_from_json_obj({"not-order": []})
    with pytest.raises(InputError):
        FailureReport("no-such-stage", {"a": 1})
    with pytest.raises(InputError):
        FailureReport("covering", {})
