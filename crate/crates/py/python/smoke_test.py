"""Smoke test for the semiflow_py extension module.

Build and install first:
    pip install --no-build-isolation -e crates/py
then run:
    python crates/py/python/smoke_test.py
"""

import math

import semiflow_py as sf


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    names = [name for name, _ in sf.scenarios()]
    assert len(names) == 7 and "remark2-jordan" in names, names

    close(sf.si(1.0), 0.946083070367183, 1e-13)
    close(sf.si(40.0), sf.si_asymptotic(40.0), 1e-12)
    close(sf.si(-2.0), -sf.si(2.0), 0.0)
    close(sf.sinc(0.0), 1.0, 0.0)

    value, err, evals = sf.adaptive_simpson(math.sin, 0.0, math.pi, 1e-12)
    close(value, 2.0, 1e-10)
    assert err >= 0.0 and evals > 0

    try:
        sf.adaptive_simpson(lambda x: 1.0 / 0.0, 0.0, 1.0)
    except ZeroDivisionError:
        pass
    else:
        raise AssertionError("integrand exception was swallowed")

    assert sf.jordan(1.0, 2.0, 3.0) == (7.0, 2.0)
    close(sf.jordan_m(1.0, 0.0), 1.0, 1e-12)
    close(sf.jordan_m(1.0, -math.e), math.e, 1e-9)

    e = sf.matrix_exp([[0.0, 1.0], [0.0, 0.0]], 2.5)
    close(e[0][1], 2.5, 1e-12)

    close(sf.distance_to_span([1.0, 1.0], [[1.0, 0.0]]), 1.0, 1e-12)
    close(sf.angle([[1.0, 0.0]], [[1.0, 0.0]]), 0.0, 1e-12)
    assert sf.angle([[1.0, 0.0]], [[0.0, 1.0]]) > 0.9

    try:
        sf.run_bundle("no-such-scenario")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown scenario accepted")

    b = sf.run_bundle("remark2-jordan")
    assert b["passed"], [c for c in b["checks"] if not c["passed"]]
    close(b["residuals"]["m(1,0)"], 1.0, 1e-12)

    b = sf.run_bundle("ex2-multiplication", k_max=100)
    close(b["series"]["terms"][3], 0.08192, 1e-4)

    print("semiflow_py smoke test passed")


if __name__ == "__main__":
    main()
