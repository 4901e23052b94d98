"""Smoke test for the pyks18 extension module.

Build and install first:
    pip install -e crates/py --no-build-isolation
"""

import json
import math

import pyks18


def close(a, b, tol=1e-9):
    return math.isclose(a, b, abs_tol=tol)


def main():
    g = pyks18.Graph.ks18()
    assert g.n == 18 and g.edge_count() == 63
    alpha, witness = g.independence_number()
    assert alpha == 4 and len(witness) == 4
    value, exact = g.fractional_packing()
    assert exact == "9/2" and close(value, 4.5)
    assert close(g.lovasz_theta(), 4.5, 1e-6)
    cover = g.clique_cover(5.0)
    assert cover["size"] == 18 and cover["valid"]
    assert pyks18.ks18_uncolorable()

    for code in ("v1", "v24", "rho28"):
        s = pyks18.State.catalog(code)
        assert close(s.sigma(), 4.5) and close(s.xi(), 4.5)
    for seed in range(20):
        s = pyks18.State.random_pure(seed)
        assert close(s.sigma(), 4.5, 1e-12)
        assert close(pyks18.State.random_mixed(seed).xi(), 4.5, 1e-12)
    s = pyks18.State.from_amplitudes([1, 1j, 0, 0])
    assert len(s.terms()) == 18
    assert close(s.with_noise(0.9).sigma(), 4.5)

    eps, se = pyks18.estimate_epsilon()
    assert abs(eps - 0.014) < 0.002 and se > 0
    assert close(pyks18.corrected_bound(0.014), 4.196)
    lo, hi = pyks18.expected_band(0.014)
    assert close(lo, 4.437) and close(hi, 4.689)
    report = pyks18.certify()
    assert report["advantage_count"] == 28

    code, out, _ = pyks18.run_cli(["invariants", "--format", "json"])
    assert code == 0 and json.loads(out)["alpha"] == 4
    code, _, _ = pyks18.run_cli(["no-such-command"])
    assert code == 2

    print(f"pyks18 smoke test passed (epsilon = {eps:.6f} +/- {se:.6f})")


if __name__ == "__main__":
    main()
