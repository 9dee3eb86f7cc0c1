import json
import os

import pytest

try:
    import embjet as ej
except ImportError:
    import _embjet as ej


def var(i, nvars, order):
    return ej.Jet.variable(i, nvars, order)


def const(value, nvars, order):
    return ej.Jet.constant(nvars, order, value)


def model_metric_2d(order):
    x1, x2 = var(0, 2, order), var(1, 2, order)
    zero = ej.Jet(2, order)
    g22 = x1 * x1 + x2 * x2
    return ej.make_metric(2, [[const(1, 2, order), zero], [zero, g22]])


def test_jet_arithmetic_is_exact():
    x = var(0, 2, 4)
    y = var(1, 2, 4)
    sq = (x + y) * (x + y)
    assert sq.coeff((2, 0)) == "1"
    assert sq.coeff((1, 1)) == "2"
    assert sq.coeff((0, 2)) == "1"
    assert ej.differentiate(sq, 0) == (x + y).scale(2).truncated(3)


def test_sqrt_and_reciprocal_roundtrip():
    a = const(1, 2, 5) + var(0, 2, 5)
    r = ej.sqrt_jet(a)
    assert (r * r).truncated(5) == a
    assert (ej.reciprocal(a) * a).truncated(5) == const(1, 2, 5)


def test_admissibility_and_singular_data():
    g = model_metric_2d(12)
    adm = ej.check_admissible(g, 1)
    assert adm.ok
    assert adm.violations == []
    data = ej.build_singular_data(adm.metric, "9/10", 4)
    assert data.ambient == 3
    assert data.singular
    assert data.Delta.coeff((0,)) == "0"
    assert data.Delta.coeff((1,)) != "0"
    rep = ej.constraint_residual(data, adm.metric)
    assert rep.ok
    assert rep.max_abs() == 0.0


def test_cartan_janet_flat_exact():
    n, order = 2, 5
    zero = ej.Jet(n, order + 1)
    one = const(1, n, order + 1)
    g = ej.make_metric(n, [[one, zero], [zero, one]])
    u = ej.embed_cartan_janet(g, order)
    assert u.ambient == 3
    rep = ej.first_order_residual(u, g)
    assert rep.ok and rep.max_abs() == 0.0


def test_off_singularity_solve_and_characteristic_error():
    g = model_metric_2d(16)
    adm = ej.check_admissible(g, 1)
    data = ej.build_singular_data(adm.metric, "9/10", 5)
    sols = ej.solve_at_base_points(adm.metric, data, [[0.1], [-0.1]], 5)
    assert [s.point for s in sols] == [[0.1], [-0.1]]
    assert all(s.max_residual <= 1e-9 for s in sols)
    with pytest.raises(ej.CharacteristicError):
        ej.solve_at_base_points(adm.metric, data, [[0.0]], 5)


def test_leray_uniformization_and_conoid():
    order = 6
    p1 = ej.Jet.variable(2, 4, order)  # g = p1 in (x1, x2, p1, p2)
    sym = ej.PrincipalSymbol.scalar(p1, 2)
    x1, x2 = var(0, 2, order), var(1, 2, order)
    s = x2 - x1 * x1
    m = ej.solve_hj_series(sym, s, order)
    # xi = x2 - (x1 - t)^2, variables (x1, x2, t)
    assert m.xi.coeff((0, 1, 0)) == "1"
    assert m.xi.coeff((2, 0, 0)) == "-1"
    assert m.xi.coeff((1, 0, 1)) == "2"
    assert m.xi.coeff((0, 0, 2)) == "-1"
    cls = ej.is_characteristic(sym, ["0", "0"], s)
    assert cls.characteristic
    cert = ej.is_nonexceptional(sym, ["0", "0"], s)
    assert cert.nonexceptional and cert.value == "-2"
    conoid = ej.conoid_sample(sym, [0.0, 0.0], s, 4, 0.0, 1.0)
    assert not conoid.exceptional
    assert all(abs(x[1]) <= 1e-12 for st in conoid.strips for x in st.x)


def test_hamilton_flow_conserves():
    order = 6
    p1, p2 = ej.Jet.variable(2, 4, order), ej.Jet.variable(3, 4, order)
    sym = ej.PrincipalSymbol.scalar(p1 * p1 + p2 * p2, 2)
    s = var(0, 2, order) + var(1, 2, order).scale(2)
    strip = ej.hamilton_flow(sym, [0.25, -0.5], s, 0.0, 1.0, 1e-3)
    assert strip.max_drift <= 1e-8
    assert len(strip.t) == 1001


def test_run_pipeline_writes_report(tmp_path):
    data_dir = os.environ.get("EMBJET_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))
    code, out, err = ej.run_pipeline(
        input=os.path.join(data_dir, "model2d.json"),
        out_dir=str(tmp_path),
        stages=["normal-form", "admissibility", "singular-data"],
        order=4,
        eps="9/10",
    )
    assert code == 0, err
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["summary"]["pass"] is True
    assert report["stages"]["singular-data"]["residual"]["pass"] is True
