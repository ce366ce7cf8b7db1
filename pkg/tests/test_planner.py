import math

import numpy as np
import numpy.testing as npt
import pytest

from spheredubins.errors import DomainRadiusError
from spheredubins.planner import (
    WORDS,
    CandidatePath,
    SolverConfig,
    enumerate_words,
    max_steering_for_radius,
    plan,
    plan_between,
    radius_in_domain,
    solve_word,
    word_endpoint,
    word_in_family,
)
from spheredubins.sabban import SabbanParams
from spheredubins.so3 import random_rotation
from spheredubins.spherical import SphericalConfig, to_rotation

ISOLATED = 1.0 / math.sqrt(2.0)

# scipy expm product for word LGR, u_max = 1, lengths (0.9, 1.1, 0.7);
# frozen
LGR_ENDPOINT = np.array([
    [-0.8409846022740949, -0.5106699527338331, -0.17877667105275946],
    [0.3151915797385995, -0.1938308965730185, -0.9290230630052121],
    [0.4397717212370166, -0.837642992514427, 0.3239676685901039],
])

# scipy expm for a single left turn of length 1.2 at radius 0.45
# (u_max = 1.984507899943528); frozen
LEFT_12_R045 = np.array([
    [0.6174113699368595, -0.2057726819861148, 0.7592501587888744],
    [0.20577268198611476, -0.8893265682130393, -0.40835751299401213],
    [0.759250158788874, 0.40835751299401213, -0.5067379381498989],
])


def test_word_family_contents():
    assert len(WORDS) == 15
    assert len(set(WORDS)) == 15
    assert enumerate_words() == WORDS
    for w in ("G", "L", "R", "GL", "GR", "LG", "LR", "RG", "RL",
              "LGL", "LGR", "LRL", "RGL", "RGR", "RLR"):
        assert word_in_family(w)
    for w in ("", "GG", "LL", "RR", "GLG", "LRG", "GRL", "LGLG", "lg", "X"):
        assert not word_in_family(w)


def test_radius_domain():
    assert radius_in_domain(0.1)
    assert radius_in_domain(0.5)
    assert radius_in_domain(ISOLATED)
    assert radius_in_domain(ISOLATED + 5e-13)
    assert not radius_in_domain(0.0)
    assert not radius_in_domain(-0.2)
    assert not radius_in_domain(0.6)
    assert not radius_in_domain(ISOLATED + 1e-9)
    assert not radius_in_domain(1.0)


def test_max_steering_for_radius():
    assert max_steering_for_radius(0.5) == pytest.approx(math.sqrt(3.0))
    assert max_steering_for_radius(ISOLATED) == 1.0
    assert max_steering_for_radius(1.0) == 0.0
    assert max_steering_for_radius(0.45) == pytest.approx(
        1.984507899943528, abs=1e-14)
    with pytest.raises(DomainRadiusError):
        max_steering_for_radius(0.0)
    with pytest.raises(DomainRadiusError):
        max_steering_for_radius(1.2)


def test_word_endpoint_matches_expm_oracle():
    params = SabbanParams(1.0)
    g = word_endpoint("LGR", (0.9, 1.1, 0.7), params)
    npt.assert_allclose(g, LGR_ENDPOINT, atol=1e-12)


def test_word_endpoint_zero_lengths_identity():
    params = SabbanParams(1.5)
    npt.assert_allclose(word_endpoint("LGL", (0.0, 0.0, 0.0), params),
                        np.eye(3), atol=1e-15)


def test_candidate_path_helpers():
    params = SabbanParams(2.0)
    cand = CandidatePath(word="RG", lengths=(0.5, 1.25),
                         total_length=1.75, residual=0.0)
    segs = cand.segments()
    assert [s.kind for s in segs] == ["R", "G"]
    assert [s.length for s in segs] == [0.5, 1.25]
    assert cand.controls(params) == [(-2.0, 0.5), (0.0, 1.25)]
    npt.assert_allclose(cand.endpoint(params),
                        word_endpoint("RG", (0.5, 1.25), params),
                        atol=1e-15)


def test_solve_word_round_trip():
    params = SabbanParams(1.0)
    rng = np.random.default_rng(41)
    for word in ("L", "GR", "LGR", "RLR"):
        periods = [2.0 * math.pi if ch == "G"
                   else 2.0 * math.pi / math.sqrt(2.0) for ch in word]
        lengths = tuple(float(rng.uniform(0.15, 0.45) * p)
                        for p in periods)
        target = word_endpoint(word, lengths, params)
        found = solve_word(word, target, params)
        assert found, f"no solution recovered for {word}"
        best = min(found, key=lambda c: c.total_length)
        assert best.residual < 1e-9
        assert best.total_length <= sum(lengths) + 1e-7
        npt.assert_allclose(best.endpoint(params), target, atol=1e-8)


def test_solve_word_identity_has_trivial_and_full_period():
    params = SabbanParams(1.0)
    found = solve_word("L", np.eye(3), params)
    totals = sorted(c.total_length for c in found)
    period = 2.0 * math.pi / math.sqrt(2.0)
    assert totals[0] == pytest.approx(0.0, abs=1e-9)
    assert any(abs(t - period) < 1e-6 for t in totals)
    # deduplication leaves no near-identical length vectors
    for i, a in enumerate(found):
        for b in found[i + 1:]:
            assert max(abs(x - y) for x, y in zip(a.lengths, b.lengths)) > 1e-6


def test_plan_identity_target():
    res = plan(np.eye(3), 0.45)
    assert res.best.total_length < 1e-9
    assert res.best.residual < 1e-9
    # the great-circle loop shows up as a full-period candidate
    assert any(c.word == "G" and abs(c.total_length - 2.0 * math.pi) < 1e-6
               for c in res.candidates)


def test_plan_recovers_single_turn():
    res = plan(LEFT_12_R045, 0.45)
    assert res.best.word == "L"
    assert res.best.total_length == pytest.approx(1.2, abs=1e-9)
    assert res.best.residual < 1e-9


def test_plan_inverse_turn_completes_the_loop():
    # the inverse of a 1.2 left turn is the same left circle traversed
    # for the remaining period - 1.2 (the right turn traces a different
    # circle and cannot reach it)
    res = plan(LEFT_12_R045.T, 0.45)
    period = 2.0 * math.pi * 0.45
    assert res.best.word == "L"
    assert res.best.total_length == pytest.approx(period - 1.2, abs=1e-9)


def test_plan_random_targets_reach_and_rank():
    rng = np.random.default_rng(7)
    for _ in range(3):
        target = random_rotation(rng)
        res = plan(target, 0.5)
        assert res.best.residual < 1e-9
        totals = [c.total_length for c in res.candidates]
        assert all(b >= a - 1e-9 for a, b in zip(totals, totals[1:]))
        npt.assert_allclose(res.best.endpoint(res.params), target,
                            atol=1e-7)


def test_plan_domain_guard():
    target = random_rotation(np.random.default_rng(3))
    with pytest.raises(DomainRadiusError):
        plan(target, 0.65)
    res = plan(target, 0.65, allow_out_of_domain=True)
    assert res.best.residual < 1e-9


def test_plan_solver_config_is_honored():
    target = random_rotation(np.random.default_rng(9))
    cfg = SolverConfig(starts_per_length=6)
    res = plan(target, 0.45, config=cfg)
    assert res.best.residual < 1e-9


def test_plan_between_matches_relative_plan():
    c0 = SphericalConfig(0.2, -0.4, 1.1)
    c1 = SphericalConfig(-0.3, 0.9, -0.5)
    res_pair = plan_between(c0, c1, 0.5)
    g0 = to_rotation(c0)
    g1 = to_rotation(c1)
    res_rel = plan(g0.T @ g1, 0.5)
    assert res_pair.best.word == res_rel.best.word
    assert res_pair.best.total_length == pytest.approx(
        res_rel.best.total_length, abs=1e-12)
    # matrices are accepted directly too
    res_mat = plan_between(g0, g1, 0.5)
    assert res_mat.best.word == res_rel.best.word


def test_plan_between_rejects_bad_shapes():
    with pytest.raises(ValueError):
        plan_between(np.eye(4), np.eye(3), 0.5)
