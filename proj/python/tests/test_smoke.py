import math

import pytest

import evobench


def test_function_values():
    assert "ackley" in evobench.function_names()
    assert evobench.value("ackley", [0.0] * 5) == pytest.approx(0.0, abs=1e-12)
    assert evobench.value("rastrigin", [1.0, 0.0]) == pytest.approx(1.0)
    g = evobench.gradient("rastrigin", [0.25, -0.1])
    assert len(g) == 2 and g[0] > 0 and g[1] < 0


def test_bad_dimension_raises():
    with pytest.raises(ValueError):
        evobench.value("schafferf6", [0.0, 0.0, 0.0])


def test_minimize_quadratic_basin():
    r = evobench.minimize("rastrigin", [0.1, -0.2, 0.05])
    assert r.status == "converged"
    assert r.value < 1e-10


def test_run_reproducible():
    a = evobench.run("rastrigin", 4, "Portugal:1", locopt=True, seed=3, pool_size=50, max_steps=20000)
    b = evobench.run("rastrigin", 4, "Portugal:1", locopt=True, seed=3, pool_size=50, max_steps=20000)
    assert a.success and a.steps == b.steps and a.best_value == b.best_value
    assert a.init.locopt_calls >= 50


def test_power_law():
    fit = evobench.fit_power_law([10, 20, 40, 80], [3 * d**1.5 for d in (10, 20, 40, 80)])
    assert fit.ok and math.isclose(fit.exponent, 1.5, abs_tol=1e-9)


def test_grunge_roundtrip(tmp_path):
    l = evobench.grunge_generate(2, 5, 7)
    path = tmp_path / "l.txt"
    l.save(path)
    again = evobench.grunge_load(path)
    assert again.name == "GRUNGE[2,5]"
    assert again.value([3.0, 4.0]) == l.value([3.0, 4.0])
    cat = evobench.grunge_enumerate(l, 30)
    assert 1 <= len(cat.entries) <= 5
    r = evobench.run(f"grunge:{path}", 0, "Germany", locopt=True, pool_size=20, fill_diversity=False,
                     max_steps=10000, target=cat.best.value)
    assert r.success
