import json
import os
import pathlib

import pytest

import cotpot

FIXTURES = pathlib.Path(os.environ.get("COTPOT_FIXTURE_DIR", pathlib.Path(__file__).parents[1] / "fixtures"))


def fixture(name):
    return json.loads((FIXTURES / name).read_text())


def test_budget_is_exact():
    assert cotpot.estimate_budget(128, 15, 32768) == 33_554_432


def test_grading():
    r = cotpot.grade_text("so \\boxed{042}", "42")
    assert r["correct"] and r["extracted"] == "042"
    assert cotpot.count_tokens("a  b\nc") == 3


def test_pass_at_k():
    outcomes = [[False, True], [False, False]]
    assert cotpot.pass_at_k(outcomes, 1) == 0.0
    assert cotpot.pass_at_k(outcomes, 2) == 0.5
    assert cotpot.corrected_pass_at_k(outcomes, [[False, True], [False, False]], 2) == 0.0


def test_classify_flat_curve():
    assert cotpot.classify([0.5] * 20) == {"insight": False, "tangent": False, "late_spike": False, "monotone": True}
    spike = [0.0] * 18 + [0.02, 1.0]
    assert cotpot.classify(spike)["late_spike"] is True
    assert cotpot.classify(spike, {"late_spike_level": 0.01})["late_spike"] is False


def test_exact_potential_and_martingale():
    assert cotpot.exact_potential(fixture("chain3.json"), "1", "A") == pytest.approx(0.375, abs=1e-12)
    report = cotpot.check_martingale(fixture("witness.json"), "1")
    assert report["holds"]
    assert report["correct_probability"] == pytest.approx(0.55)
    assert cotpot.check_martingale(cotpot.random_fixture(4), "1")["holds"]


def test_monte_carlo_curve_tracks_oracle():
    points = cotpot.potential_curve(fixture("curve3.json"), "1", "A A \\boxed{1}", 2, n_samples=1024, seed=3)
    assert [f for f, _ in points] == [0.0, 0.5, 1.0]
    assert points[1][1] == pytest.approx(0.75, abs=3 * (0.75 * 0.25 / 1024) ** 0.5)
    assert points[2][1] == 1.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(cotpot.UsageError):
        cotpot.estimate_budget(0, 15, 32768)
    with pytest.raises(cotpot.Error):
        cotpot.exact_potential(fixture("chain3.json"), "1", "C A")


def test_cli_round_trip(tmp_path):
    code, out, err = cotpot.run_cli("budget", "--n-samples", 128, "--n-chunks", 15, "--tokens", 32768)
    assert (code, out) == (0, "33554432\n")
    code, out, _ = cotpot.run_cli("gen-fixture", "--seed", 2)
    assert code == 0 and json.loads(out) == cotpot.random_fixture(2)
    assert cotpot.run_cli("no-such-command")[0] == 1
