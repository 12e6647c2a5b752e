"""Smoke test for the `dmpa` extension module.

Build it first, e.g. `maturin develop -m crates/python/Cargo.toml`, or copy
`target/release/libdmpa.so` to `dmpa.so` somewhere on `sys.path`.
"""

import math

import dmpa


def main():
    params = dmpa.Params(r=0.35, p=0.25, q=0.25, rho_blue=0.5, rho_red=0.5, delta=2.0)
    assert params.is_analytic()

    report = dmpa.solve(params)
    theta_in, theta_out = report.theta_star
    assert abs(theta_in - 0.35) < 1e-9 and abs(theta_out - 0.35) < 1e-9
    assert abs(report.constants("red")[0] - 0.375) < 1e-12
    assert report.exponents("red") == report.exponents("blue")
    assert report.glass_ceiling()[0] == "no_gce"
    assert report.to_dict()["gce_verdict"] == "no_gce"

    ceiling = dmpa.solve(dmpa.Params(0.3, 0.1, 0.2, 0.0, 1.0, 2.0))
    assert ceiling.glass_ceiling()[0] == "blue_faces_gce"
    assert math.isinf(ceiling.exponents("blue")[1])

    try:
        dmpa.Params(0.5, 0.7, 0.5, 0.5, 0.5, 2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("p + q > 1 was accepted")

    graph = dmpa.simulate(params, seed=7, steps=20_000)
    assert graph.edge_count == 20_002
    assert sum(graph.in_degrees()) == graph.edge_count
    again = dmpa.Graph.from_edge_list(graph.to_edge_list())
    assert again.edges() == graph.edges()
    t_in, t_out = graph.theta()
    assert abs(t_in - 0.35) < 0.05 and abs(t_out - 0.35) < 0.05

    stat = graph.gce_statistic(4)
    assert stat["k"] == 4 and stat["ratio"] > 0

    counts = {}
    for d in graph.out_degrees():
        counts[d] = counts.get(d, 0) + 1
    fit = dmpa.fit_power_law(counts)
    assert 1.5 < fit["gamma_hat"] < 6.0 and fit["n_tail"] >= 10

    print("smoke test passed:", report.exponents("red"), fit["gamma_hat"])


if __name__ == "__main__":
    main()
