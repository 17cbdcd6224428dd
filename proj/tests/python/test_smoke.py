import math

import pytest

import graphcurv as gc


def test_builtins_listed():
    names = gc.builtin_names()
    assert "sphere-cap" in names
    assert "scherk" in names


def test_sphere_cap_oracle():
    g = gc.load_graph("builtin:sphere-cap")
    assert (g.n, g.k) == (2, 1)
    pg = gc.point_geometry(g, [0.0, 0.0], depth=4)
    assert pg["normA2"] == pytest.approx(0.5, abs=1e-10)
    assert pg["normH2"] == pytest.approx(1.0, abs=1e-10)
    assert pg["w"] == pytest.approx(1.0, abs=1e-12)
    assert pg["K2"] == pytest.approx(0.0, abs=1e-12)


def test_expression_roundtrip_and_eval():
    printed = gc.parse_expression("x1^2+sin( x2 )", 2)
    assert gc.parse_expression(printed, 2) == printed
    assert gc.eval_expression("x1 * x2 + 1", [2.0, 3.0]) == pytest.approx(7.0)
    with pytest.raises(ValueError):
        gc.parse_expression("x3", 2)


def test_identity_checks():
    g = gc.load_graph("builtin:scherk")
    for name in ("gauss", "codazzi", "ricci", "simons_identity", "jacobi"):
        rep = gc.check(g, name, [0.3, 0.2])
        assert rep["pass"], name


def test_scaling_and_checks_on_json_graph():
    g = gc.load_graph('{"n": 2, "k": 1, "psi": ["x1^2 + x2^2"]}')
    pg = gc.point_geometry(g, [0.0, 0.0], depth=2)
    assert pg["normA2"] == pytest.approx(8.0)  # principal curvatures 2, 2
    half = gc.scale_graph(g, 2.0)
    ph = gc.point_geometry(half, [0.0, 0.0], depth=2)
    assert ph["normA2"] == pytest.approx(2.0)


def test_stability_report():
    g = gc.load_graph("builtin:rank-one-flat")
    rep = gc.stability(g, [0.0, 0.0], 0.4, cells=6, jobs=2)
    assert rep["pass"]
    assert rep["left"] <= rep["right"]


def test_integral_estimate_window():
    g = gc.load_graph("builtin:scherk")
    with pytest.raises(RuntimeError):
        gc.integral_estimate(g, 6.0, [0.0, 0.0], 0.5)


def test_area_ratio_bracketing():
    g = gc.load_graph("builtin:plane")
    lower, upper = gc.area_ratio(g, [0.0, 0.0], 1.0, cells=6, subdiv=5)
    assert lower <= math.pi <= upper


def test_sweep_rows():
    g = gc.load_graph("builtin:affine")
    rep = gc.sup_sweep(g, [0.0, 0.0], [1.0, 2.0], cells=4, gauss=3)
    assert [row["sup_normA2_R2"] for row in rep["rows"]] == [0.0, 0.0]
    csv = gc.sup_sweep_csv(g, [0.0, 0.0], [1.0], cells=4, gauss=3)
    assert csv.startswith("R,sup_normA2_R2,area_ratio")


def test_load_graph_from_file(tmp_path):
    path = tmp_path / "cap.json"
    path.write_text(
        '{"n": 2, "k": 1, "psi": ["sqrt(4 - x1^2 - x2^2)"],'
        ' "domain": [[-1.4, 1.4], [-1.4, 1.4]]}'
    )
    g = gc.load_graph(str(path))
    pg = gc.point_geometry(g, [0.0, 0.0], depth=2)
    assert pg["normA2"] == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(ValueError):
        gc.load_graph(str(tmp_path / "missing.json"))


def test_mean_value_and_domain_errors():
    g = gc.load_graph("builtin:sphere-cap")
    rep = gc.mean_value(g, [0.0, 0.0], 0.25, 8.0, cells=6)
    assert rep["ratio"] > 0.0
    with pytest.raises(ValueError):
        gc.point_geometry(g, [5.0, 0.0])
    with pytest.raises(RuntimeError):
        gc.mean_value(g, [0.0, 0.0], 1.0, 8.0)
