"""Smoke test for the pyblockshift extension module.

Build and install first, e.g. `maturin develop` or
`pip install --no-build-isolation .` from crates/python, then run
`python python/smoke_test.py`.
"""

import json
import math
import pathlib
import sys
import tempfile

import pyblockshift as pb

FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "core" / "fixtures"
HALF_SQRT2 = math.sqrt(2) / 2


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    assert close(pb.jordan_radius(3), HALF_SQRT2)
    assert close(pb.numerical_radius([[0, 1], [0, 0]]), 0.5, 1e-8)
    assert close(pb.singular_values([[3, 0], [0, 4j]])[0], 4.0)

    ex35 = pb.load(str(FIXTURES / "example35.json"))
    assert ex35.k == 3 and ex35.dims == [1, 2, 1]
    assert close(ex35.numerical_radius(), HALF_SQRT2)
    report = ex35.bounds_report()
    assert close(report["w_A"], HALF_SQRT2)
    assert close(report["w_lower"], HALF_SQRT2)
    assert close(report["w_upper"], 1.0)
    assert report["gamma_applicable"] is False

    cert = ex35.certify("lower")
    assert cert["status"] == "equality-hypothesis-violated", cert["status"]
    assert cert["kernel_intersection_trivial"] is True

    ex23 = pb.load(str(FIXTURES / "example23.json"))
    assert ex23.certify("upper")["status"] == "equality-hypothesis-violated"

    padded = pb.BlockShift([[[math.sqrt(2)], [0]]])
    cert = padded.certify("upper", seed=1)
    assert cert["status"] == "equality-with-summand", cert["reason"]
    assert cert["residuals"]["reconstruction"] <= 1e-8

    w = ex35.witness(seed=3)
    assert w["perturbed"] is True
    assert w["attained"] >= w["floor"]
    norm = math.sqrt(sum(re * re + im * im for re, im in w["v"]))
    assert close(norm, 1.0, 1e-12)

    moved = ex35.perturb(1e-3)
    chain = moved.blocks()
    product = sum(chain[0][0][i] * chain[1][i][0] for i in range(2))
    assert abs(product) > 0

    again = pb.BlockShift.from_json(ex35.to_json("copy"))
    assert again == ex35
    with tempfile.TemporaryDirectory() as d:
        path = pathlib.Path(d) / "j4.json"
        path.write_text(pb.BlockShift.jordan(4).to_json())
        assert close(pb.load(str(path)).numerical_radius(), math.cos(math.pi / 5))
    json.dumps(report)

    for bad in (lambda: pb.BlockShift([[[1, 1]], [[1], [2], [3]]]), lambda: ex35.certify("sideways")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("pyblockshift smoke test passed")


if __name__ == "__main__":
    sys.exit(main())
