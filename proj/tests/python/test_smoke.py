import itertools

import pytest

import camnet


@pytest.fixture(scope="module")
def tiny():
    return camnet.generate(preset="tiny")


def test_presets_listed():
    assert set(camnet.preset_names()) == {"paper-scale", "tiny", "shifted"}


def test_generate_is_deterministic(tiny):
    assert camnet.generate(preset="tiny") == tiny
    assert camnet.generate(preset="tiny", seed=6) != tiny
    assert len(tiny["truth"]) == len(tiny["observations"])


def test_generate_rejects_unknown_camera():
    spec = {"preset": "tiny", "edges": [{"u": 0, "v": 81, "mean_travel": 10}]}
    with pytest.raises(camnet.ConfigError, match="81"):
        camnet.generate(spec=spec)


def test_ldd_matches_brute_force(tiny):
    ldd = camnet.solve(tiny, algo="ldd")
    brute = camnet.solve(tiny, algo="oracle-brute-linear")
    assert ldd.result["energy"]["linear"] == pytest.approx(brute.result["energy"]["linear"], abs=1e-9)
    assert ldd.iterations
    assert set(ldd.iterations[0]) == set(camnet.ITERATION_FIELDS)


def test_weak_duality_in_report(tiny):
    sol = camnet.solve(tiny, algo="qdd", max_iters=200)
    best = float("-inf")
    for row in sol.iterations:
        assert row["dual"] <= row["best_primal"] + 1e-9
        assert row["best_dual"] >= best
        best = row["best_dual"]


def test_distributed_matches_centralized(tiny):
    central = camnet.solve(tiny, algo="qdd")
    dist = camnet.solve(tiny, algo="qdd", execution="distributed")
    assert dist.partition == central.partition
    assert [r["dual"] for r in dist.iterations] == [r["dual"] for r in central.iterations]
    cameras = tiny["topology"]["cameras"]
    edges = {tuple(sorted(e)) for e in tiny["topology"]["edges"]}
    assert dist.messages
    for m in dist.messages:
        assert m["sender"] in cameras and m["receiver"] in cameras
        assert tuple(sorted((m["sender"], m["receiver"]))) in edges


def test_evaluate(tiny):
    sol = camnet.solve(tiny)
    ev = camnet.evaluate(sol, tiny)
    assert 0.0 <= ev["precision"] <= 1.0
    assert camnet.evaluate(sol, tiny) == ev

    perfect = dict(sol.result)
    tracks = {}
    for entry in tiny["truth"]:
        tracks.setdefault(entry["person"], []).append(entry["observation"])
    perfect["partition"] = list(tracks.values())
    assert camnet.evaluate(perfect, tiny)["f_measure"] == 1.0

    blind = {k: v for k, v in tiny.items() if k != "truth"}
    with pytest.raises(camnet.InputError):
        camnet.evaluate(sol, blind)


def test_capped_oracle_raises_size_error():
    crowd = camnet.generate(spec={"preset": "tiny", "persons": 6, "duration": 100})
    assert len(crowd["observations"]) >= 20
    with pytest.raises(camnet.SizeError):
        camnet.solve(crowd, algo="oracle-lrmcf")


def test_bad_options():
    with pytest.raises(camnet.ConfigError):
        camnet.solve(camnet.generate(preset="tiny"), algo="simplex")
    with pytest.raises(camnet.ConfigError):
        camnet.solve(camnet.generate(preset="tiny"), algo="oracle-assignment", execution="distributed")


def test_solve_assignment_against_enumeration():
    cost = [[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]]
    assignment, total = camnet.solve_assignment(cost)
    best = min(sum(cost[i][p[i]] for i in range(3)) for p in itertools.permutations(range(3)))
    assert total == best
    assert sorted(assignment) == [0, 1, 2]


def test_solve_assignment_replicable_and_infeasible():
    assignment, total = camnet.solve_assignment([[1.0, 5.0], [1.0, 5.0]], replicable={0})
    assert assignment == [0, 0] and total == 2.0
    with pytest.raises(camnet.InfeasibleProblemError):
        camnet.solve_assignment([[1.0, None], [2.0, None]])
