"""Independent reference values for the unit and acceptance tests.

Builds Dirichlet Laplacians with scipy.sparse, computes exit distributions
as absorbing Markov chains, and prints every frozen constant used by the
C++ tests.  Run: python3 tests/oracles/compute_oracles.py
"""
import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import mpmath


def square_interior(N):
    return [(x, y) for x in range(-N + 1, N) for y in range(-N + 1, N)]


def ball_interior(c, R):
    r = int(math.ceil(R)) + 1
    return [(c[0] + x, c[1] + y) for x in range(-r, r + 1) for y in range(-r, r + 1)
            if x * x + y * y < R * R]


NB = [(1, 0), (-1, 0), (0, 1), (0, -1)]


class Region:
    def __init__(self, interior):
        self.pts = list(interior)
        self.idx = {p: i for i, p in enumerate(self.pts)}
        bset = set()
        for (x, y) in self.pts:
            for dx, dy in NB:
                q = (x + dx, y + dy)
                if q not in self.idx:
                    bset.add(q)
        self.boundary = sorted(bset)
        n = len(self.pts)
        rows, cols, vals = [], [], []
        for i, (x, y) in enumerate(self.pts):
            rows.append(i); cols.append(i); vals.append(4.0)
            for dx, dy in NB:
                j = self.idx.get((x + dx, y + dy))
                if j is not None:
                    rows.append(i); cols.append(j); vals.append(-1.0)
        self.L = sp.csc_matrix((vals, (rows, cols)), shape=(n, n))
        self.lu = spla.splu(self.L)

    def green_col(self, p):
        e = np.zeros(len(self.pts)); e[self.idx[p]] = 1.0
        return self.lu.solve(e)

    def quad(self, w):
        """w: dict vertex -> weight; entries off the interior are dropped."""
        v = np.zeros(len(self.pts))
        for p, a in w.items():
            if p in self.idx:
                v[self.idx[p]] += a
        return float(v @ self.lu.solve(v))


def exit_distribution(interior, v):
    """P(walk from v leaves the interior first at b) via the absorbing chain."""
    reg = Region(interior)
    n = len(reg.pts)
    P = sp.lil_matrix((n, n))
    bidx = {b: k for k, b in enumerate(reg.boundary)}
    PB = sp.lil_matrix((n, len(reg.boundary)))
    for i, (x, y) in enumerate(reg.pts):
        for dx, dy in NB:
            q = (x + dx, y + dy)
            if q in reg.idx:
                P[i, reg.idx[q]] += 0.25
            else:
                PB[i, bidx[q]] += 0.25
    A = sp.identity(n, format="csc") - P.tocsc()
    H = spla.spsolve(A, PB.tocsc().toarray())
    row = H[reg.idx[v]]
    return {b: float(row[k]) for b, k in bidx.items()}


def circle(R, center=(0, 0)):
    hm = exit_distribution(ball_interior((0, 0), R), (0, 0))
    return {(b[0] + center[0], b[1] + center[1]): w for b, w in hm.items()}


def ladder_r(N, k):
    return math.exp(-k) * N


def window_radii(N, k, kind, gamma=0.5):
    r = ladder_r(N, k)
    d = r ** (-gamma)
    rs = {"center": r, "plus": (1 + d) * r, "minus": (1 - d) * r}[kind]
    hw = 0.25 * r ** (-gamma) * rs
    lo = max(1, math.ceil(rs - hw)); hi = math.floor(rs + hw)
    radii = list(range(lo, hi + 1))
    if not radii:
        radii = [max(1, round(rs))]
    return radii


def window_weights(N, k, kind):
    radii = window_radii(N, k, kind)
    out = {}
    for R in radii:
        for p, w in circle(R).items():
            out[p] = out.get(p, 0.0) + w / len(radii)
    return out


def combine(a, ca, b, cb):
    out = dict((p, ca * w) for p, w in a.items())
    for p, w in b.items():
        out[p] = out.get(p, 0.0) + cb * w
    return out


def main():
    np.set_printoptions(precision=17)
    print("== Green function G_{Q_N}(0,0)")
    for N in (4, 8, 16, 32):
        reg = Region(square_interior(N))
        print(N, repr(reg.green_col((0, 0))[reg.idx[(0, 0)]]))

    print("== Q_8 Green entries")
    q8 = Region(square_interior(8))
    for a, b in [((0, 0), (1, 0)), ((0, 0), (2, 3)), ((1, 1), (-2, 3)), ((-5, 4), (6, -7))]:
        print(a, b, repr(q8.green_col(a)[q8.idx[b]]))
    print("H^-1 norm of delta_0 - delta_e1 on Q_8:", repr(math.sqrt(q8.quad({(0, 0): 1.0, (1, 0): -1.0}))))
    print("rho^T G rho on Q_8, rho = d0 + 2 d(1,2) - d(-3,1):",
          repr(q8.quad({(0, 0): 1.0, (1, 2): 2.0, (-3, 1): -1.0})))

    print("== exit distribution B_2(0) from 0")
    hm = exit_distribution(ball_interior((0, 0), 2.0), (0, 0))
    for b in sorted(hm):
        print(b, repr(hm[b]))

    print("== Var C_8(0) on Q_64")
    q64 = Region(square_interior(64))
    print(repr(q64.quad(circle(8.0))))

    print("== ladder N=64 windows")
    for k, kind in [(0, "center"), (0, "minus"), (1, "center"), (1, "plus"), (1, "minus"), (2, "center")]:
        print(k, kind, window_radii(64, k, kind))
    w1 = window_weights(64, 1, "center")
    print("Var X_{r_1} N=64:", repr(q64.quad(w1)))
    rho1 = combine(window_weights(64, 2, "center"), 1.0, window_weights(64, 1, "minus"), -1.0)
    print("rho N=64 k=1: sum", repr(sum(rho1.values())), "l1", repr(sum(abs(x) for x in rho1.values())))
    for p in [(8, 0), (9, 0), (6, 6), (18, 0), (19, 0), (13, 13)]:
        print(" rho", p, repr(rho1.get(p, 0.0)))

    print("== N=32 oracles")
    q32 = Region(square_interior(32))
    print("G00:", repr(q32.green_col((0, 0))[q32.idx[(0, 0)]]))
    print("Var C_8:", repr(q32.quad(circle(8.0))))
    for k, kind in [(1, "center"), (1, "minus"), (2, "center")]:
        print(k, kind, window_radii(32, k, kind))
    rho32 = combine(window_weights(32, 2, "center"), 1.0, window_weights(32, 1, "minus"), -1.0)
    print("Var A_1:", repr(q32.quad(rho32)))

    print("== factorization Gaussian variances N=64 k=1")
    wL = window_weights(64, 1, "center")
    wO = window_weights(64, 0, "center")
    rhoA = combine(window_weights(64, 1, "center"), 1.0, window_weights(64, 0, "minus"), -1.0)
    b64 = Region(ball_interior((0, 0), 64.0))
    print("lhs:", repr(q64.quad(wL)))
    print("outer:", repr(q64.quad(wO)))
    print("inner:", repr(b64.quad(rhoA)))

    print("== wrapped Gaussian kappa=4: first Fourier coefficient")
    kappa = mpmath.mpf(4)
    f = lambda th: mpmath.nsum(lambda n: mpmath.sqrt(kappa / (2 * mpmath.pi))
                               * mpmath.exp(-kappa * (th + 2 * mpmath.pi * n) ** 2 / 2), [-mpmath.inf, mpmath.inf])
    val = mpmath.quad(lambda th: mpmath.cos(th) * f(th), [-mpmath.pi, 0, mpmath.pi])
    print(mpmath.nstr(val, 17))

    print("== tau energy k=4 on Q_16")
    def tau(k, b, x, y):
        r = abs(x) + abs(y)
        if r <= 2 ** (k - 1):
            return b
        if r < 2 ** k:
            return b * (1 - r / 2 ** k)
        return 0.0
    for b in (0.5, 1.0, 2.0):
        e = 0.0
        for x in range(-16, 17):
            for y in range(-16, 17):
                for dx, dy in [(1, 0), (0, 1)]:
                    if abs(x + dx) <= 16 and abs(y + dy) <= 16:
                        e += (tau(4, b, x + dx, y + dy) - tau(4, b, x, y)) ** 2
        print(b, repr(e), repr(e / b / b))

    print("== Poincare f = 1 on the level-2 cube")
    cube = [(x, y) for x in range(-4, 5) for y in range(-4, 5)]
    reg = Region(cube)
    lhs = math.sqrt(reg.quad({p: 1.0 for p in cube}) / 81.0)
    rhs = 1.0 + 1.0 + 3.0
    print("lhs", repr(lhs), "rhs", repr(rhs), "C", repr(lhs / rhs))

    print("== oscillation of u = x1 on the level-2 cube")
    u = {p: float(p[0]) for p in cube}
    mean = sum(u.values()) / 81.0
    osc = math.sqrt(sum((v - mean) ** 2 for v in u.values()) / 81.0)
    gx = {p: (1.0 if (p[0] + 1, p[1]) in u else 0.0) for p in cube}
    gy = {p: 0.0 for p in cube}
    gn = math.sqrt((reg.quad(gx) + reg.quad(gy)) / 81.0)
    print("osc", repr(osc), "grad", repr(gn), "C", repr(osc / gn))

    print("== single-site conditional, cos_perturbed eps=0.5, four zero neighbours")
    from scipy.integrate import quad as q1
    h = lambda t: 4.0 * (0.5 * t * t + 0.5 * math.cos(t))
    Z = q1(lambda t: math.exp(-h(t)), -20, 20, epsabs=1e-14)[0]
    print("variance", repr(q1(lambda t: t * t * math.exp(-h(t)), -20, 20, epsabs=1e-14)[0] / Z))

    print("== Phi_R on Q_32: f = 1 on edges (x, x + e1), x in [-8, 7] x [-8, 8], R = 8")
    q32 = Region(square_interior(32))
    div = {}
    for y in range(-8, 9):
        div[(8, y)] = div.get((8, y), 0.0) + 1.0
        div[(-8, y)] = div.get((-8, y), 0.0) - 1.0
    print("Var Phi_R:", repr(q32.quad(div) / 64.0))


if __name__ == "__main__":
    main()
