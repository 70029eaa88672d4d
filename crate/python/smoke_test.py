"""Smoke test for the pyfiadi extension module.

Build and install first, e.g. ``cd crates/python && maturin build --release``
followed by ``pip install`` of the wheel.
"""

import math
import tempfile

import numpy as np

import pyfiadi as fa


def check(name, ok, detail=""):
    print(f"{'ok' if ok else 'FAIL'} {name} {detail}")
    if not ok:
        raise SystemExit(1)


def main():
    p = fa.SylvesterProblem.random_normal("interval", 30, 24, 4, seed=1)
    a, b, f = (np.array(m) for m in (p.a(), p.b(), p.rhs()))
    x = np.array(p.solve_dense())
    check("dense residual", np.linalg.norm(a @ x - x @ b - f) <= 1e-12 * np.linalg.norm(f))

    nx = np.linalg.norm(x, 2)
    for eps in (1e-4, 1e-8, 1e-12):
        lr = p.fi_adi(eps)
        err = np.linalg.norm(np.array(lr.to_dense()) - x, 2) / nx
        check(f"fi_adi eps={eps:g}", err <= 2 * eps, f"rank {lr.rank}, error {err:.2e}")

    xk = np.array(p.fadi(6).to_dense())
    check("fadi decreases error", np.linalg.norm(xk - x, 2) < np.linalg.norm(np.array(p.fadi(2).to_dense()) - x, 2))

    # A problem built from Python data.
    rng = np.random.default_rng(0)
    da = -np.linspace(1.0, 50.0, 12)
    db = np.linspace(2.0, 40.0, 9)
    g = rng.standard_normal((12, 2)) @ rng.standard_normal((2, 9))
    q = fa.SylvesterProblem(np.diag(da).tolist(), np.diag(db).tolist(), g.tolist(),
                            fa.SpectralSet.interval(-50.0, -1.0), fa.SpectralSet.interval(2.0, 40.0))
    exact = g / (da[:, None] - db[None, :])
    got = np.array(q.fi_adi(1e-10).to_dense())
    check("diagonal problem", np.linalg.norm(got - exact, 2) <= 2e-10 * np.linalg.norm(exact, 2))

    s = fa.singular_values(x.tolist())
    check("singular values", np.allclose(s, np.linalg.svd(x, compute_uv=False), rtol=1e-10, atol=1e-14 * s[0]))

    check("mu1", abs(fa.mu1(30.0, 10.0) - (17 + 12 * math.sqrt(2))) < 1e-12)
    gamma_q = math.gamma(0.25)
    check("elliptic K", abs(fa.elliptic_k(1 / math.sqrt(2)) - gamma_q**2 / (4 * math.sqrt(math.pi))) < 1e-13)

    c = np.array(fa.ctilde(120, 30.0, 10.0, seed=3))
    sv = np.linalg.svd(c, compute_uv=False)
    for eps in (1e-4, 1e-8):
        rank = int(np.sum(sv > eps * sv[0]))
        check(f"eps-rank bound eps={eps:g}", rank <= fa.eps_rank_bound(eps, 120, 30.0, 10.0))
        lr = fa.ctilde_lowrank(120, 30.0, 10.0, eps, seed=3)
        err = np.linalg.norm(np.array(lr.to_dense()) - c, 2) / sv[0]
        check(f"ctilde lowrank eps={eps:g}", err <= 2 * eps, f"rank {lr.rank}")
    ts = [1, 3, 6, 10]
    check("bound dominates", all(sv[t] / sv[0] <= v for t, v in zip(ts, fa.bound_disk(30.0, 10.0, 120, ts))))

    rhs = fa.poisson_rhs("gaussian", 64)
    direct = np.array(fa.poisson_direct(rhs))
    low = fa.poisson_lowrank(rhs, 1e-10)
    err = np.linalg.norm(np.array(low.to_dense()) - direct, 2) / np.linalg.norm(direct, 2)
    check("poisson", err <= 2e-10, f"rank {low.rank}, error {err:.2e}")

    with tempfile.TemporaryDirectory() as d:
        low.save(d)
        back = fa.LowRank.load(d)
        check("bundle round trip", back.shape == low.shape and np.array_equal(np.array(back.to_dense()), np.array(low.to_dense())))

    try:
        fa.SpectralSet.interval(2.0, 1.0)
    except ValueError:
        check("invalid set raises", True)
    else:
        check("invalid set raises", False)


if __name__ == "__main__":
    main()
