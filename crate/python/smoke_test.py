"""Smoke test for the approachability Python bindings."""

import math

import approachability_py as ap


def main():
    m = ap.example1_matrix(0.5)
    assert (m.d, m.actions) == (2, 2)
    orthant = ap.TargetSet.negative_orthant(2, "inf")
    assert abs(ap.phi_star(m, orthant) - 2.5) < 1e-9
    x = ap.best_response(m, orthant)
    assert abs(sum(x.weights) - 1.0) < 1e-12
    r = ap.combine(x, m)
    assert abs(orthant.distance(r) - 2.5) < 1e-9

    assert ap.closed_form_value("example1_cav", 0.3) == 4.0
    assert abs(ap.closed_form_value("example2_phi_xstar", 0.0, 0.0) - 1.0 / 3.0) < 1e-15
    assert ap.project_to_simplex([2.0, 0.0]).weights == [1.0, 0.0]

    s = ap.BlockStrategy(2, 2, "example1")
    for t in range(1, 201):
        s.act()
        s.observe(ap.example1_matrix(1.0 if t % 2 else 0.0))
    assert s.rounds == 200 and s.block == 20
    gap, bound = s.certificate(4.7)
    assert gap <= bound, (gap, bound)
    assert math.isclose(bound, ap.certificate_bound(4.7, 2, 200))

    w = ap.PolynomialWeights(3)
    w.observe([1.0, 0.0, 0.0])
    assert len(w.regret) == 3

    csv_text = ap.run_config(
        """
[scenario]
kind = "example1"
[strategy]
kind = "block"
[adversary]
kind = "random_iid"
[run]
horizon = 500
seed = 1
metrics = ["phi_xstar"]
"""
    )
    assert csv_text.startswith("# ")
    assert ap.fit_rate([(t, t ** -0.5) for t in (10, 100, 1000, 10000, 100000)], 1) is not None

    checks = ap.verify_targets()
    assert checks and all(c[3] for c in checks), checks

    try:
        ap.MixedAction([0.5, -0.2])
    except ap.ApproachabilityError:
        pass
    else:
        raise AssertionError("invalid mixed action accepted")
    print("python smoke test passed")


if __name__ == "__main__":
    main()
