"""Killing metric, Cartan decomposition, and geodesics of the period domain.

The isometry Lie algebra so(N_R) = {X : X^T G + G X = 0} splits at a
positive 2-plane P into k_P (preserving P and its complement) and m_P
(swapping them); the Killing form B(X, Y) = (rank - 2) Tr(XY) is positive
definite on m_P and induces the invariant metric.

For a tube point x + iy over v0 the hyperbolic plane spanned by (v0, -x)
yields a one-parameter subgroup acting as x + iy -> x + i e^lambda y; these
orbits are the linear degenerations into the cusp [v0], and they are
geodesics.  An independent verification oracle integrates the geodesic ODE
in chart coordinates with a finite-difference metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    DegeneratePlaneError,
    EmptyBoxError,
    NotInLieAlgebraError,
    StepTooLargeError,
)
from .domain import (
    FrameVec,
    HyperbolicSplit,
    PeriodPoint,
    TubeBox,
    TubePoint,
    exp_frame,
    exp_point,
    gram_np,
    log_tube,
    proj_distance,
    theta,
    tube_point,
)
from .lattice import IntegerLattice


# ---------------------------------------------------------------------------
# Lie algebra elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LieElem:
    """Element of so(N_R): X^T G + G X = 0."""

    lattice: IntegerLattice
    matrix: np.ndarray

    def validate(self, tol: float = 1e-10):
        g = gram_np(self.lattice)
        x = self.matrix
        resid = np.max(np.abs(x.T @ g + g @ x))
        scale = max(1.0, float(np.max(np.abs(x))))
        if resid > tol * scale:
            raise NotInLieAlgebraError(f"X^T G + G X residual {resid:.2e}")
        return self


_SO_BASIS_CACHE: dict[tuple, tuple] = {}


def so_basis(lat: IntegerLattice) -> tuple[LieElem, ...]:
    """Basis u w^T G - w u^T G over coordinate pairs u = e_i, w = e_j."""
    cached = _SO_BASIS_CACHE.get(lat.gram)
    if cached is not None:
        return cached
    g = gram_np(lat)
    n = lat.rank
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            x = np.zeros((n, n))
            x[i, :] += g[j, :]
            x[j, :] -= g[i, :]
            x.setflags(write=False)
            out.append(LieElem(lat, x))
    _SO_BASIS_CACHE[lat.gram] = tuple(out)
    return _SO_BASIS_CACHE[lat.gram]


def killing_form(x: LieElem, y: LieElem) -> float:
    """B(X, Y) = rho Tr(X Y) with rho = rank - 2."""
    x.validate()
    y.validate()
    rho = x.lattice.rank - 2
    return float(rho * np.trace(x.matrix @ y.matrix))


@dataclass(frozen=True)
class PlaneFrame:
    """Positive definite 2-plane given by two spanning vectors."""

    lattice: IntegerLattice
    p1: np.ndarray
    p2: np.ndarray

    @staticmethod
    def from_frame(frame: FrameVec) -> "PlaneFrame":
        return PlaneFrame(frame.lattice, frame.re.copy(), frame.im.copy())

    def basis(self) -> np.ndarray:
        return np.stack([self.p1, self.p2], axis=1)

    def projector(self) -> np.ndarray:
        """G-orthogonal projector onto the plane."""
        g = gram_np(self.lattice)
        b = self.basis()
        m = b.T @ g @ b
        if np.linalg.det(m) <= 0 or np.trace(m) <= 0:
            raise DegeneratePlaneError("plane is not positive definite")
        return b @ np.linalg.solve(m, b.T @ g)


def cartan_project(x: LieElem, plane: PlaneFrame
                   ) -> tuple[LieElem, LieElem]:
    """X = k + m with k preserving P and P^perp, m swapping them.

    Uses the G-orthogonal involution s = 2 pi_P - 1: k and m are the +1/-1
    conjugation eigenparts, and the split is B-orthogonal.
    """
    x.validate()
    s = 2.0 * plane.projector() - np.eye(x.lattice.rank)
    sxs = s @ x.matrix @ s
    k = LieElem(x.lattice, 0.5 * (x.matrix + sxs))
    m = LieElem(x.lattice, 0.5 * (x.matrix - sxs))
    return k, m


def _m_basis_raw(lat: IntegerLattice, s: np.ndarray,
                 tol: float = 1e-9) -> list[np.ndarray]:
    rho = lat.rank - 2
    coeff = float(rho)
    basis: list[np.ndarray] = []
    for x in so_basis(lat):
        m = 0.5 * (x.matrix - s @ x.matrix @ s)
        if np.max(np.abs(m)) <= tol:
            continue
        w = m.copy()
        for b in basis:
            w -= coeff * np.trace(w @ b) * b
        nrm2 = coeff * np.trace(w @ w)
        if nrm2 > tol:
            basis.append(w / math.sqrt(nrm2))
        if len(basis) == 2 * rho:
            break
    return basis


def m_basis(lat: IntegerLattice, plane: PlaneFrame,
            tol: float = 1e-9) -> list[LieElem]:
    """B-orthonormal basis of m_P (dimension 2 rho)."""
    s = 2.0 * plane.projector() - np.eye(lat.rank)
    return [LieElem(lat, b) for b in _m_basis_raw(lat, s, tol)]


# ---------------------------------------------------------------------------
# the cusp-direction generator and its one-parameter subgroup
# ---------------------------------------------------------------------------

def a_generator(pt: TubePoint) -> LieElem:
    """Generator acting as +1 on v0, -1 on x1 = -x, 0 on their complement.

    Exponentials scale y: exp(lambda A) exp_v(x + iy) = exp_v(x + i e^lambda y).
    """
    lat = pt.split.lattice
    g = gram_np(lat)
    v0 = pt.split.v_np()
    x1 = -pt.x
    a = np.outer(v0, g @ x1) - np.outer(x1, g @ v0)
    return LieElem(lat, a)


def one_param(a: LieElem, lam: float) -> np.ndarray:
    """exp(lambda A): exact sinh/cosh block form when A^3 = A, Pade otherwise."""
    a.validate()
    m = a.matrix
    if np.max(np.abs(m @ m @ m - m)) < 1e-9 * max(1.0, float(np.max(np.abs(m)))):
        return (np.eye(a.lattice.rank)
                + math.sinh(lam) * m
                + (math.cosh(lam) - 1.0) * (m @ m))
    return expm(lam * m)


def geodesic_point(pt: TubePoint, t: float) -> PeriodPoint:
    """exp_v(x + i e^t y): the constant-speed geodesic through the point."""
    scaled = TubePoint(pt.split, pt.x, math.exp(t) * pt.y)
    return exp_point(scaled)


# ---------------------------------------------------------------------------
# chart metric and speed
# ---------------------------------------------------------------------------

def _chart_fast(split: HyperbolicSplit, z: np.ndarray) -> np.ndarray:
    """Chart coordinates of theta([z]) without dataclass overhead."""
    g = gram_np(split.lattice)
    u = z.real
    w = z.imag
    e1 = u / math.sqrt(float(u @ g @ u))
    w1 = w - float(w @ g @ e1) * e1
    e2 = w1 / math.sqrt(float(w1 @ g @ w1))
    zz = e1 + 1j * e2
    vv = split.v_np()
    zz = -zz / complex(zz @ g @ vv)
    xr, yr = zz.real, zz.imag
    x = xr + 0.5 * float(xr @ g @ xr) * vv
    y = yr + float(yr @ g @ x) * vv
    r = split.comp_np()
    gli = split._gram_L_inv
    return np.concatenate([gli @ (r.T @ g @ x), gli @ (r.T @ g @ y)])


def chart_metric(split: HyperbolicSplit, pt: TubePoint,
                 eps: float = 1e-6) -> np.ndarray:
    """Killing metric in the chart coordinates (a, b) at the given point.

    Builds a B-orthonormal basis of m_P and its pushforward to the chart by
    symmetric differences; the metric is the inverse Gram of that frame.
    """
    lat = split.lattice
    g = gram_np(lat)
    zf = exp_frame(pt).z
    b2 = np.stack([zf.real, zf.imag], axis=1)
    pi = b2 @ np.linalg.solve(b2.T @ g @ b2, b2.T @ g)
    s = 2.0 * pi - np.eye(lat.rank)
    basis = _m_basis_raw(lat, s)
    dim = 2 * split.rho
    if len(basis) != dim:
        raise DegeneratePlaneError("m_P basis has unexpected dimension")
    n = lat.rank
    eye = np.eye(n)
    cols = []
    for m in basis:
        m2 = 0.5 * eps * eps * (m @ m)
        gp = eye + eps * m + m2
        gm = eye - eps * m + m2
        cp = _chart_fast(split, gp @ zf)
        cm = _chart_fast(split, gm @ zf)
        cols.append((cp - cm) / (2.0 * eps))
    d = np.stack(cols, axis=1)  # chart directions of the orthonormal basis
    dinv = np.linalg.inv(d)
    return dinv.T @ dinv  # metric: |q|^2 = |D^{-1} q|^2


def speed(pt: TubePoint, t: float, h: float = 1e-5) -> float:
    """Killing norm of the m_P-velocity of s -> exp_v(x + i e^s y) at s = t.

    The chart velocity is measured by Richardson-refined central differences
    and paired with the chart metric at the evaluated point.
    """
    sp = pt.split
    a0, b0 = pt.chart()

    def chart_at(s: float) -> np.ndarray:
        return np.concatenate([a0, math.exp(s) * b0])

    d1 = (chart_at(t + h) - chart_at(t - h)) / (2 * h)
    d2 = (chart_at(t + 2 * h) - chart_at(t - 2 * h)) / (4 * h)
    vel = (4.0 * d1 - d2) / 3.0
    here = tube_point(sp, a0, math.exp(t) * b0)
    g = chart_metric(sp, here)
    return math.sqrt(float(vel @ g @ vel))


# ---------------------------------------------------------------------------
# independent geodesic oracle (chart ODE with finite-difference Christoffels)
# ---------------------------------------------------------------------------

@dataclass
class OracleResult:
    ts: np.ndarray
    chart: np.ndarray       # samples x (2 rho)
    energy_drift: float

    def points(self, split: HyperbolicSplit) -> list[PeriodPoint]:
        rho = split.rho
        return [exp_point(tube_point(split, row[:rho], row[rho:]))
                for row in self.chart]


def geodesic_oracle(pt: TubePoint, t_max: float, steps: int,
                    drift_tol: float = 1e-4) -> OracleResult:
    """Integrate the geodesic ODE in the chart, independent of one_param.

    Explicit midpoint steps on q'' = -Gamma(q)(q', q') with Christoffel
    symbols from central differences of the chart metric.  The initial
    velocity is that of s -> x + i e^s y at s = 0, i.e. (0, y).  Energy
    g(q')(q', q') is monitored; drift beyond ``drift_tol`` raises.
    """
    if steps < 100:
        raise ValueError("steps must be >= 100")
    sp = pt.split
    rho = sp.rho
    dim = 2 * rho
    a0, b0 = pt.chart()
    q = np.concatenate([a0, b0])
    qdot = np.concatenate([np.zeros(rho), b0])

    hfd = 1e-4

    def metric(qv: np.ndarray) -> np.ndarray:
        return chart_metric(sp, tube_point(sp, qv[:rho], qv[rho:]))

    def accel(qv: np.ndarray, vv: np.ndarray) -> np.ndarray:
        g0 = metric(qv)
        dg = np.zeros((dim, dim, dim))
        for k in range(dim):
            e = np.zeros(dim)
            e[k] = hfd
            dg[k] = (metric(qv + e) - metric(qv - e)) / (2 * hfd)
        # Gamma^a_{bc} = 1/2 g^{ad} (dg[b][d,c] + dg[c][d,b] - dg[d][b,c])
        ginv = np.linalg.inv(g0)
        rhs = np.zeros(dim)
        for a in range(dim):
            s = 0.0
            for b in range(dim):
                for c in range(dim):
                    gam = 0.0
                    for d in range(dim):
                        gam += ginv[a, d] * (dg[b][d, c] + dg[c][d, b]
                                             - dg[d][b, c])
                    s += 0.5 * gam * vv[b] * vv[c]
            rhs[a] = -s
        return rhs

    h = t_max / steps if steps else 0.0
    ts = [0.0]
    samples = [q.copy()]
    e0 = float(qdot @ metric(q) @ qdot)
    max_drift = 0.0
    for k in range(steps):
        if h == 0.0:
            break
        a1 = accel(q, qdot)
        qm = q + 0.5 * h * qdot
        vm = qdot + 0.5 * h * a1
        a2 = accel(qm, vm)
        q = q + h * vm
        qdot = qdot + h * a2
        ts.append((k + 1) * h)
        samples.append(q.copy())
        e = float(qdot @ metric(q) @ qdot)
        max_drift = max(max_drift, abs(e - e0) / e0)
        if max_drift > drift_tol:
            raise StepTooLargeError(
                f"energy drift {max_drift:.2e} after step {k + 1}")
    return OracleResult(np.array(ts), np.stack(samples), max_drift)


def oracle_deviation(pt: TubePoint, result: OracleResult) -> float:
    """Max projective distance between oracle samples and geodesic_point."""
    worst = 0.0
    for t, row in zip(result.ts, result.chart):
        rho = pt.split.rho
        p_oracle = exp_point(tube_point(pt.split, row[:rho], row[rho:]))
        p_formula = geodesic_point(pt, float(t))
        worst = max(worst, proj_distance(p_oracle, p_formula))
    return worst


# ---------------------------------------------------------------------------
# linear degenerations and Looijenga neighborhoods
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSpec:
    """Path in the tube model of v.

    kind 'linear_degeneration': t -> exp_v(x0 + i t y0) in chart coordinates;
    kind 'piecewise_tube': explicit (t, a, b) samples.
    """

    kind: str
    split: HyperbolicSplit
    a0: tuple[float, ...] = ()
    b0: tuple[float, ...] = ()
    samples: tuple = ()

    def at(self, t: float) -> TubePoint:
        if self.kind == "linear_degeneration":
            return tube_point(self.split, np.array(self.a0),
                              t * np.array(self.b0))
        ts = [s[0] for s in self.samples]
        if not ts:
            raise ValueError("empty piecewise path")
        idx = int(np.searchsorted(ts, t))
        idx = min(max(idx, 0), len(ts) - 1)
        _, a, b = self.samples[idx]
        return tube_point(self.split, np.array(a), np.array(b))


def linear_degeneration(split: HyperbolicSplit, x0, y0) -> PathSpec:
    p = tube_point(split, x0, y0)  # validates the tube data
    del p
    return PathSpec("linear_degeneration", split,
                    tuple(float(x) for x in x0),
                    tuple(float(x) for x in y0))


def looijenga_member(p: PeriodPoint, split: HyperbolicSplit, box: TubeBox,
                     gamma_v_gens=None, word_depth: int = 2,
                     cone_grid: int = 5) -> bool:
    """Membership in U(K, v): translation semigroup times the box.

    The x-part of the semigroup is all of L(v)_R, so membership reduces to
    the cone condition: some k in the y-box with y - k in the positive cone
    component of the box.  Optionally closes over supplied isometries fixing
    v (breadth-first, bounded word length); without closure the test is
    sufficient, not necessary.
    """
    if any(l > h for l, h in zip(box.b_lo, box.b_hi)):
        raise EmptyBoxError("empty neighborhood box")
    sp = split
    gl = sp.gram_L_np()
    ref = np.array([0.5 * float(l + h)
                    for l, h in zip(box.b_lo, box.b_hi)])

    def cone_test(bvec: np.ndarray) -> bool:
        axes = [np.linspace(float(l), float(h), cone_grid)
                for l, h in zip(box.b_lo, box.b_hi)]
        import itertools as it
        for kpt in it.product(*axes):
            w = bvec - np.array(kpt)
            if float(w @ gl @ w) > 0 and float(w @ gl @ ref) > 0:
                return True
        # k on the boundary of the box counts (closure of the semigroup orbit)
        return False

    candidates = [p]
    if gamma_v_gens:
        seen = set()
        frontier = [p]
        for _ in range(word_depth):
            nxt = []
            for q in frontier:
                for g in gamma_v_gens:
                    if g.apply(sp.v) != sp.v:
                        raise ValueError("generator does not fix v")
                    m = np.array([list(r) for r in g.matrix], dtype=float)
                    img = PeriodPoint(q.lattice, m @ q.z)
                    key = tuple(np.round(img.z / np.max(np.abs(img.z)), 9))
                    if key not in seen:
                        seen.add(key)
                        nxt.append(img)
            candidates.extend(nxt)
            frontier = nxt
    for q in candidates:
        try:
            pt = log_tube(q, sp)
        except Exception:
            continue
        _, b = pt.chart()
        if cone_test(np.asarray(b)):
            return True
    return False
