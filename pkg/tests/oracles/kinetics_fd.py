"""Oracle: central finite differences of the kinetics at the equilibrium.

Checks the closed-form Taylor coefficients against 2nd/4th-order central
differences of the raw kinetics expressions, written out here independently
of the package (plain Python, no imports from diskwave).

Run:  python3 tests/oracles/kinetics_fd.py
"""


def make_kinetics(alpha, K, d):
    def f(u, v):
        return u * (1 - u / K) - alpha * u * v / (u + 1)

    def g(w, v):
        return -d * v + alpha * w * v / (w + 1)

    return f, g


def d2(fun, x0, y0, wx, wy, h=1e-4):
    # wx+wy = 2 mixed/pure second derivative by central differences
    if (wx, wy) == (2, 0):
        return (fun(x0 + h, y0) - 2 * fun(x0, y0) + fun(x0 - h, y0)) / h**2
    if (wx, wy) == (0, 2):
        return (fun(x0, y0 + h) - 2 * fun(x0, y0) + fun(x0, y0 - h)) / h**2
    return (fun(x0 + h, y0 + h) - fun(x0 + h, y0 - h)
            - fun(x0 - h, y0 + h) + fun(x0 - h, y0 - h)) / (4 * h**2)


def d3(fun, x0, y0, wx, wy, h=1e-3):
    if (wx, wy) == (3, 0):
        return (fun(x0 + 2 * h, y0) - 2 * fun(x0 + h, y0)
                + 2 * fun(x0 - h, y0) - fun(x0 - 2 * h, y0)) / (2 * h**3)
    if (wx, wy) == (2, 1):
        def dv(x, y):
            return (fun(x, y + h) - fun(x, y - h)) / (2 * h)
        return (dv(x0 + h, y0) - 2 * dv(x0, y0) + dv(x0 - h, y0)) / h**2
    raise ValueError((wx, wy))


def richardson(estimate, h):
    """One Richardson step on an O(h^2) central-difference estimator."""
    return (4.0 * estimate(h / 2) - estimate(h)) / 3.0


def main() -> None:
    alpha, K, d = 1.0, 6.0, 0.8
    us = d / (alpha - d)
    vs = (K - us) * (1 + us) / (K * alpha)
    f, g = make_kinetics(alpha, K, d)
    print(f"equilibrium: u*={us!r} v*={vs!r}")
    rows = [
        ("f_uu", richardson(lambda h: d2(f, us, vs, 2, 0, h), 1e-3)),
        ("f_uv", richardson(lambda h: d2(f, us, vs, 1, 1, h), 1e-3)),
        ("f_vv", richardson(lambda h: d2(f, us, vs, 0, 2, h), 1e-3)),
        ("f_uuu", richardson(lambda h: d3(f, us, vs, 3, 0, h), 1e-2)),
        ("f_uuv", richardson(lambda h: d3(f, us, vs, 2, 1, h), 1e-2)),
        ("g_ww", richardson(lambda h: d2(g, us, vs, 2, 0, h), 1e-3)),
        ("g_wv", richardson(lambda h: d2(g, us, vs, 1, 1, h), 1e-3)),
        ("g_vv", richardson(lambda h: d2(g, us, vs, 0, 2, h), 1e-3)),
        ("g_www", richardson(lambda h: d3(g, us, vs, 3, 0, h), 1e-2)),
        ("g_wwv", richardson(lambda h: d3(g, us, vs, 2, 1, h), 1e-2)),
    ]
    for name, val in rows:
        print(f"{name:6s} = {val:+.12f}")


if __name__ == "__main__":
    main()
