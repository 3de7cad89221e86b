import math

import pytest

afem_py = pytest.importorskip("afem_py")


def test_problem_catalog():
    assert set(afem_py.problems()) == {"square-ones", "square-sin", "lshape-ones"}


def test_total_energy_closed_forms():
    bottom = afem_py.total_energy("square-ones")
    assert abs(bottom["G"] - 0.5) < 1e-12
    assert abs(bottom["est2"] - 1.5) < 1e-12
    assert bottom["J"] == 0.0
    level2 = afem_py.total_energy("square-ones", uniform_level=2)
    assert abs(level2["G"] - 1.0 / 9.0) < 1e-12
    assert abs(level2["J"] + 1.0 / 72.0) < 1e-12
    assert level2["osc2"] == 0.0


def test_run_records():
    records = afem_py.run("square-ones", mu=0.5, max_iters=4)
    assert len(records) == 4
    assert records[0]["G"] == pytest.approx(0.5)
    gs = [r["G"] for r in records]
    assert gs == sorted(gs, reverse=True)
    persons = [r["persons"] for r in records]
    assert persons == sorted(persons)
    assert records[0]["marked"] >= 1


def test_run_with_linear_marker():
    records = afem_py.run("lshape-ones", marker="linear", max_dofs=400)
    assert records[-1]["dofs"] >= 400
    assert all(r["est2"] > 0 for r in records)


def test_h1_error_tracks_the_exact_solution():
    records = afem_py.run("square-sin", max_dofs=800)
    errs = [r["h1err"] for r in records]
    assert all(not math.isnan(e) for e in errs)
    assert errs[-1] < errs[0]


def test_gopt_table():
    table = afem_py.gopt("square-ones", m_max=2)
    assert [row["m"] for row in table] == [0, 1, 2]
    assert table[0]["gopt"] == pytest.approx(0.5)
    assert table[1]["gopt"] == pytest.approx(17.0 / 72.0)
    assert table[2]["gopt"] <= table[1]["gopt"]


def test_mesh_info():
    info = afem_py.mesh_info("square-ones")
    assert info["triangles"] == 2
    assert info["vertices"] == 4
    assert info["edges"] == 5
    assert info["shape_regularity"] == pytest.approx(2.0)


def test_verify_suite_roundtrip():
    result = afem_py.verify("closed-form")
    assert result["pass"] is True
    assert result["name"] == "closed-form"
    assert any("G_opt[1]" in line for line in result["lines"])


def test_invalid_input_raises():
    with pytest.raises(afem_py.AfemError):
        afem_py.run("square-ones", mu=2.0, max_iters=1)
    with pytest.raises(afem_py.AfemError):
        afem_py.total_energy("no-such-problem")
