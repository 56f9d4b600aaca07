"""Fuchsian systems dY/dz = sum_i A_i/(z - u_i) Y with sum_i A_i = 0.

Schlesinger flow dA_i = sum_{j != i} [A_j, A_i] d(u_j - u_i)/(u_j - u_i),
numeric monodromy with a deterministic loop basis, per-pole Levelt data in
the local variable x = z - u_i, the finite-difference Schlesinger residual
separating strong (Schlesinger) from weak (non-Schlesinger) families, and
the explicit rational counterexample family with trivial monodromy but
u-dependent connection matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, WallError
from .levelt import LeveltData, build_levelt_solution, compute_levelt_exponents
from .matrixcore import as_square
from .isoflow import UPath


@dataclass(frozen=True)
class FuchsianSystem:
    """Pole positions and residues; the residues must sum to zero.

    With sum_i A_i = 0 the point z = infinity is regular, so the monodromy
    matrices compose to the identity in the loop basis below.
    """

    poles: np.ndarray
    residues: tuple[np.ndarray, ...]
    zero_sum_tol: float = 1e-12

    def __post_init__(self):
        poles = np.asarray(self.poles, dtype=complex).reshape(-1)
        res = tuple(as_square(A) for A in self.residues)
        if len(res) != len(poles):
            raise ValueError("need one residue per pole")
        n = res[0].shape[0]
        for A in res:
            if A.shape[0] != n:
                raise ValueError("residues must share one dimension")
        if len(set(map(complex, poles))) != len(poles):
            raise WallError("poles must be pairwise distinct")
        total = sum(res)
        if np.max(np.abs(total)) > self.zero_sum_tol * max(
            1.0, max(np.max(np.abs(A)) for A in res)
        ):
            raise ValueError(
                f"residues do not sum to zero (|sum| = {np.max(np.abs(total)):.3e})"
            )
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", res)

    @property
    def N(self) -> int:
        return len(self.poles)

    @property
    def n(self) -> int:
        return self.residues[0].shape[0]

    def coefficient(self, z: complex) -> np.ndarray:
        W = np.zeros((self.n, self.n), dtype=complex)
        for ui, Ai in zip(self.poles, self.residues):
            W += Ai / (z - ui)
        return W

    def nearest_gap(self, i: int) -> float:
        d = np.abs(self.poles - self.poles[i])
        d[i] = np.inf
        return float(d.min())


def schlesinger_rhs(sys: FuchsianSystem) -> np.ndarray:
    """All partials: out[i, j] = dA_i/du_j.

    Off-diagonal: [A_j, A_i]/(u_j - u_i); diagonal: minus the row sum, so
    sum_j dA_i/du_j = 0 exactly and sum_i A_i = 0 is preserved.
    """
    N, n = sys.N, sys.n
    out = np.zeros((N, N, n, n), dtype=complex)
    for i in range(N):
        diag = np.zeros((n, n), dtype=complex)
        for j in range(N):
            if j == i:
                continue
            C = (sys.residues[j] @ sys.residues[i] - sys.residues[i] @ sys.residues[j]) / (
                sys.poles[j] - sys.poles[i]
            )
            out[i, j] = C
            diag -= C
        out[i, i] = diag
    return out


@dataclass
class SchlesingerTrace:
    t: np.ndarray
    u: np.ndarray  # (m, N)
    A: np.ndarray  # (m, N, n, n)


def integrate_schlesinger(
    sys: FuchsianSystem, path: UPath, tol: float = 1e-11,
    samples_per_segment: int = 9, guard: float | None = None,
) -> tuple[FuchsianSystem, SchlesingerTrace]:
    """Transport the residues along a pole-position path.

    The path lives in the space of pole tuples; segments whose sampled poles
    collide within the guard band are refused.
    """
    N, n = sys.N, sys.n
    if len(path.waypoints[0]) != N:
        raise ValueError("path dimension disagrees with the number of poles")
    if np.linalg.norm(path.waypoints[0] - sys.poles) > 1e-12:
        raise ValueError("path must start at the system's poles")
    scale = max(1.0, float(np.max(np.abs(path.waypoints))))
    if guard is None:
        guard = 1e-6 * scale
    if path.min_gap() < guard:
        raise WallError("path approaches a pole collision")

    y = np.concatenate([A.ravel() for A in sys.residues])
    ts, us, As = [], [], []
    for seg_idx, (a, b) in enumerate(zip(path.waypoints[:-1], path.waypoints[1:])):
        delta = b - a

        def f(t, yv):
            u = a + t * delta
            mats = [yv[k * n * n : (k + 1) * n * n].reshape(n, n) for k in range(N)]
            out = []
            for i in range(N):
                dAi = np.zeros((n, n), dtype=complex)
                for j in range(N):
                    if j == i:
                        continue
                    C = (mats[j] @ mats[i] - mats[i] @ mats[j]) / (u[j] - u[i])
                    dAi += C * (delta[j] - delta[i])
                out.append(dAi.ravel())
            return np.concatenate(out)

        sol = solve_ivp(
            f, (0.0, 1.0), y, method="DOP853", rtol=tol, atol=tol,
            t_eval=np.linspace(0.0, 1.0, samples_per_segment),
        )
        if not sol.success:
            raise IntegrationError(
                f"Schlesinger flow failed on segment {seg_idx}: {sol.message}"
            )
        for m, t in enumerate(sol.t):
            ts.append(seg_idx + t)
            us.append(a + t * delta)
            col = sol.y[:, m]
            As.append(
                np.array([col[k * n * n : (k + 1) * n * n].reshape(n, n) for k in range(N)])
            )
        y = sol.y[:, -1]

    final = FuchsianSystem(
        poles=path.waypoints[-1],
        residues=tuple(y[k * n * n : (k + 1) * n * n].reshape(n, n) for k in range(N)),
        zero_sum_tol=1e-8,
    )
    trace = SchlesingerTrace(t=np.array(ts), u=np.array(us), A=np.array(As))
    return final, trace


def _loop_segments(z0: complex, center: complex, radius: float, refine: int = 12):
    """Spoke-circle-spoke loop around one pole, as (z(t), dz(t)) callables."""
    d = center - z0
    entry = center - radius * d / abs(d)  # circle point nearest the basepoint

    segs = []

    def line(a, b):
        def zf(t, a=a, b=b):
            return a + t * (b - a)

        def dzf(t, a=a, b=b):
            return b - a

        return zf, dzf

    segs.append(line(z0, entry))
    phi0 = math.atan2((entry - center).imag, (entry - center).real)
    for k in range(refine):
        t0 = phi0 + 2 * math.pi * k / refine
        t1 = phi0 + 2 * math.pi * (k + 1) / refine

        def zf(t, t0=t0, t1=t1):
            th = t0 + t * (t1 - t0)
            return center + radius * complex(math.cos(th), math.sin(th))

        def dzf(t, t0=t0, t1=t1):
            th = t0 + t * (t1 - t0)
            return 1j * (t1 - t0) * radius * complex(math.cos(th), math.sin(th))

        segs.append((zf, dzf))
    segs.append(line(entry, z0))
    return segs


def _transport(rhs, Y0, segs, tol):
    n = Y0.shape[0]
    Y = Y0
    for zf, dzf in segs:
        def f(t, y):
            return (dzf(t) * (rhs(zf(t)) @ y.reshape(n, n))).ravel()

        sol = solve_ivp(f, (0.0, 1.0), Y.ravel(), method="DOP853", rtol=tol, atol=tol)
        if not sol.success:
            raise IntegrationError(f"monodromy transport failed: {sol.message}")
        Y = sol.y[:, -1].reshape(n, n)
    return Y


def default_basepoint(sys: FuchsianSystem) -> complex:
    """Deterministic basepoint below and outside the pole configuration."""
    mean = complex(np.mean(sys.poles))
    dev = float(np.max(np.abs(sys.poles - mean)))
    offset = 2.0 * (abs(mean) + dev + 1.0)
    return complex(mean.real, float(sys.poles.imag.min()) - offset)


def _infinity_frame(sys: FuchsianSystem, z0: complex, tol: float) -> np.ndarray:
    """Value at z0 of the solution normalized to I at z = infinity.

    In w = 1/z the system reads dY/dw = -sum_i A_i u_i/(1 - u_i w) Y, which
    is regular at w = 0 because the residues sum to zero; a straight
    w-segment from 0 to 1/z0 stays clear of the singularities 1/u_i when the
    basepoint lies outside the pole configuration.
    """
    w0 = 1.0 / z0
    for ui in sys.poles:
        if ui == 0:
            continue
        if abs(w0) > 0.7 / abs(ui):
            raise ValueError(
                "basepoint too close to the pole configuration for the "
                "infinity-normalized frame"
            )

    def rhs_w(w):
        W = np.zeros((sys.n, sys.n), dtype=complex)
        for ui, Ai in zip(sys.poles, sys.residues):
            W -= Ai * ui / (1.0 - ui * w)
        return W

    seg = ((lambda t: t * w0), (lambda t: w0))
    return _transport(rhs_w, np.eye(sys.n, dtype=complex), [seg], tol)


def fuchs_monodromy(
    sys: FuchsianSystem, z0: complex | None = None, tol: float = 1e-12,
    radius_factor: float = 0.25, normalize_at_infinity: bool = True,
) -> list[np.ndarray]:
    """Monodromy matrices M_1..M_N with Y(gamma_i z) = Y(z) M_i.

    Loops are circles of radius `radius_factor` times the nearest-other-pole
    distance, joined to the basepoint by straight spokes; composition order is
    increasing pole index.  With the default basepoint below the poles and a
    configuration angularly ordered by index, the basis-order product
    M_1 M_2 ... M_N = I up to tolerance (z = infinity is regular).

    By default the underlying solution is normalized to the identity at
    z = infinity, the frame in which Schlesinger flows keep the monodromy
    matrices constant entrywise; `normalize_at_infinity=False` uses
    Y(z0) = I instead (same conjugacy classes, u-dependent frame).
    """
    if z0 is None:
        z0 = default_basepoint(sys)
    z0 = complex(z0)
    if np.min(np.abs(sys.poles - z0)) < 1e-9:
        raise ValueError("basepoint coincides with a pole")
    Y0 = (
        _infinity_frame(sys, z0, tol)
        if normalize_at_infinity
        else np.eye(sys.n, dtype=complex)
    )
    out = []
    for i in range(sys.N):
        radius = radius_factor * sys.nearest_gap(i)
        segs = _loop_segments(z0, complex(sys.poles[i]), radius)
        Yi = _transport(sys.coefficient, Y0, segs, tol)
        out.append(np.linalg.solve(Y0, Yi))
    return out


def pole_levelt(sys: FuchsianSystem, i: int, K: int = 20, tol: float = 1e-8) -> LeveltData:
    """Levelt data of the system at pole i, in the local variable x = z - u_i.

    The holomorphic part has Taylor coefficients
    C_m = -sum_{j != i} A_j/(u_j - u_i)^{m+1}.
    """
    if not 0 <= i < sys.N:
        raise ValueError("pole index out of range")
    Ai = sys.residues[i]

    def hol(m):
        C = np.zeros((sys.n, sys.n), dtype=complex)
        for j in range(sys.N):
            if j == i:
                continue
            C -= sys.residues[j] / (sys.poles[j] - sys.poles[i]) ** (m + 1)
        return C

    ld = compute_levelt_exponents(Ai, tol=tol)
    return build_levelt_solution(Ai, hol, ld=ld, K=K, tol=tol)


def schlesinger_residual(family, u, h: float = 1e-5, moving=None) -> float:
    """Finite-difference Schlesinger defect of a residue family A_i(u).

    `family(u)` returns the list of residues at pole configuration u.  The
    returned value is the max norm over (i, j) of the centered-difference
    dA_i/du_j minus the Schlesinger right-hand side; small means the family
    is a (strong, isoprincipal) Schlesinger deformation, large means weak /
    non-Schlesinger.  `moving` restricts the scanned directions j for
    families defined along a sub-family of pole motions (e.g. a single
    moving pole).
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    N = len(u)
    if moving is None:
        moving = range(N)
    base = [as_square(A) for A in family(u)]
    sys = FuchsianSystem(poles=u, residues=tuple(base), zero_sum_tol=1e-6)
    rhs = schlesinger_rhs(sys)
    worst = 0.0
    for j in moving:
        up, um = u.copy(), u.copy()
        up[j] += h
        um[j] -= h
        Ap = [as_square(A) for A in family(up)]
        Am = [as_square(A) for A in family(um)]
        for i in range(N):
            fd = (Ap[i] - Am[i]) / (2 * h)
            worst = max(worst, float(np.linalg.norm(fd - rhs[i, j], 2)))
    return worst


def max_integer_spread(A, tol: float = 1e-8) -> int:
    """Largest integer offset spread within one mod-1 eigenvalue class of A.

    This is the pole order bound m_i in the non-Schlesinger form of the
    isomonodromy 1-form; 0 for non-resonant matrices.
    """
    ld = compute_levelt_exponents(as_square(A), tol=tol)
    best = 0
    for _, _, offsets in ld.blocks:
        if offsets:
            best = max(best, max(offsets) - min(offsets))
    return best


@dataclass(frozen=True)
class KVBundle:
    """Closed-form weak-isomonodromic family with trivial monodromy.

    Poles sit at (u, 1, 2, 3); the fundamental matrix is rational in z, so
    every monodromy matrix is the identity, yet the connection matrix C_1 at
    z = 1 depends on u: the family is weakly but not strongly isomonodromic,
    and its residues do not satisfy the Schlesinger equations.
    """

    u: complex
    h_coeffs: tuple[complex, ...]
    system: FuchsianSystem
    C1: np.ndarray

    def h(self, u: complex) -> complex:
        return sum(c * u**k for k, c in enumerate(self.h_coeffs))

    def Y(self, z: complex) -> np.ndarray:
        u, h = self.u, self.h(self.u)
        return np.array(
            [
                [
                    (z - u) / (z - 1),
                    -2 * u * (z - u) * h / ((z - 1) * (z - 3) * (u - 3)),
                ],
                [0.0, (z - 2) / (z - 3)],
            ],
            dtype=complex,
        )

    def residues_at(self, u) -> list[np.ndarray]:
        """Residues at the moving parameter; accepts the scalar u or the full
        pole vector (u, 1, 2, 3) as handed around by schlesinger_residual."""
        arr = np.asarray(u, dtype=complex).reshape(-1)
        return _kv_residues(self.h_coeffs, complex(arr[0]))


def _kv_residues(coeffs, u: complex) -> list[np.ndarray]:
    h = sum(c * u**k for k, c in enumerate(coeffs))
    g = u * h / (u - 3)
    return [
        np.array([[1, 0], [0, 0]], dtype=complex),
        np.array([[-1, (1 - u) * g], [0, 0]], dtype=complex),
        np.array([[0, 2 * (u - 2) * g], [0, 1]], dtype=complex),
        np.array([[0, -u * h], [0, -1]], dtype=complex),
    ]


def kv_family(h_coeffs, u: complex) -> KVBundle:
    """The explicit resonant family at poles (u, 1, 2, 3).

    `h_coeffs` are the polynomial coefficients of h (constant first); h only
    needs to be holomorphic at u = 0, and polynomials cover every test.  The
    parameter must avoid {1, 2, 3}.
    """
    u = complex(u)
    if min(abs(u - w) for w in (1.0, 2.0, 3.0)) < 1e-9:
        raise ValueError("u must avoid the fixed poles 1, 2, 3")
    coeffs = tuple(complex(c) for c in h_coeffs)
    h = sum(c * u**k for k, c in enumerate(coeffs))
    poles = np.array([u, 1.0, 2.0, 3.0], dtype=complex)
    system = FuchsianSystem(poles=poles, residues=tuple(_kv_residues(coeffs, u)))
    C1 = np.array(
        [[0.0, 0.5], [1.0 - u, u * (1.0 - u) * h / (u - 3.0)]], dtype=complex
    )
    return KVBundle(u=u, h_coeffs=coeffs, system=system, C1=C1)
