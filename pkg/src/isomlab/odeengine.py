"""High-accuracy transport of fundamental solutions in the punctured z-plane.

Paths live on the universal cover: every waypoint carries both the complex
value z and a continuous argument, and no implicit principal branch is used
anywhere.  Transport integrates dY/dz = W(z) Y along parametrized segments
(lines and origin-centered arcs) with an adaptive high-order Runge-Kutta
scheme; the Wronskian identity

    det Y(z) = det Y(z0) * exp((z - z0) tr Lambda) * (z/z0)^{tr A}

is monitored on every call and its drift reported with the result.

Sectorial solutions Y_r are seeded with the optimally truncated formal
series on the mid-half-plane direction of S_r and carried to the requested
point; Stokes matrices are extracted in the F-gauge

    S_r = E(z*)^{-1} (Fhat_r^{-1} Fhat_{r+1}) E(z*),   E(z) = z^B e^{z Lambda},

so that no exponentially graded matrix is ever inverted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BranchMismatchError, IntegrationError, SectorError
from .formal import (
    FormalSolution,
    IrregularSystem,
    compute_formal_coefficients,
    eval_series_factor,
    eval_truncated_formal,
    optimal_truncation,
)
from .geometry import SectorFrame, sector_bounds
from .levelt import LeveltData, eval_levelt

DEFAULT_TOL = 1e-11
DEFAULT_SEED_RADIUS = 20.0
MAX_ARC_SWEEP = math.pi / 2


@dataclass(frozen=True)
class PathPoint:
    """A point of the universal cover: z together with a continuous arg."""

    z: complex
    arg: float

    def __post_init__(self):
        z = complex(self.z)
        if z == 0:
            raise ValueError("path points must avoid the origin")
        expected = math.atan2(z.imag, z.real)
        if abs(math.remainder(self.arg - expected, 2 * math.pi)) > 1e-9:
            raise ValueError(
                f"arg {self.arg:.6g} is not a lift of arg({z:.6g}) = {expected:.6g}"
            )
        object.__setattr__(self, "z", z)

    @property
    def radius(self) -> float:
        return abs(self.z)

    @staticmethod
    def from_polar(radius: float, arg: float) -> "PathPoint":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return PathPoint(z=radius * complex(math.cos(arg), math.sin(arg)), arg=arg)


@dataclass(frozen=True)
class Segment:
    kind: str  # "line" | "arc"
    a: PathPoint
    b: PathPoint

    def __post_init__(self):
        if self.kind not in ("line", "arc"):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.kind == "arc":
            if abs(self.a.radius - self.b.radius) > 1e-9 * max(self.a.radius, 1.0):
                raise ValueError("arc endpoints must share the same radius")
            if abs(self.b.arg - self.a.arg) > MAX_ARC_SWEEP + 1e-12:
                raise ValueError("arc sweep exceeds pi/2; split the arc")
        else:
            if abs(self.b.arg - self.a.arg) >= math.pi:
                raise ValueError("line segment with |Delta arg| >= pi; re-route")

    def parametrize(self):
        """Return (z(t), dz/dt(t)) on t in [0, 1]."""
        if self.kind == "line":
            za, zb = self.a.z, self.b.z

            def zfun(t):
                return za + t * (zb - za)

            def dzfun(t):
                return zb - za

        else:
            rho = self.a.radius
            t0, t1 = self.a.arg, self.b.arg

            def zfun(t):
                th = t0 + t * (t1 - t0)
                return rho * complex(math.cos(th), math.sin(th))

            def dzfun(t):
                return 1j * (t1 - t0) * zfun(t)

        return zfun, dzfun


@dataclass(frozen=True)
class ZPath:
    """Piecewise path on the cover; consecutive points are joined by segments."""

    segments: tuple[Segment, ...]

    @property
    def start(self) -> PathPoint:
        return self.segments[0].a

    @property
    def end(self) -> PathPoint:
        return self.segments[-1].b

    @staticmethod
    def line(a: PathPoint, b: PathPoint) -> "ZPath":
        return ZPath(segments=(Segment("line", a, b),))

    @staticmethod
    def arc(a: PathPoint, arg_to: float) -> "ZPath":
        """Origin-centered arc from a to the given argument, split in <= pi/2 sweeps."""
        sweeps = []
        cur = a
        total = arg_to - a.arg
        nseg = max(1, math.ceil(abs(total) / MAX_ARC_SWEEP))
        for k in range(1, nseg + 1):
            nxt = PathPoint.from_polar(a.radius, a.arg + total * k / nseg)
            sweeps.append(Segment("arc", cur, nxt))
            cur = nxt
        return ZPath(segments=tuple(sweeps))

    @staticmethod
    def radial(a: PathPoint, radius_to: float) -> "ZPath":
        b = PathPoint.from_polar(radius_to, a.arg)
        return ZPath(segments=(Segment("line", a, b),))

    @staticmethod
    def loop(a: PathPoint, winding: int) -> "ZPath":
        """Circle |z| = |a| traversed `winding` times (sign = orientation)."""
        if winding == 0:
            return ZPath(segments=())
        return ZPath.arc(a, a.arg + 2 * math.pi * winding)

    def then(self, other: "ZPath") -> "ZPath":
        if self.segments and other.segments:
            ea, sb = self.end, other.start
            if abs(ea.z - sb.z) > 1e-9 or abs(ea.arg - sb.arg) > 1e-9:
                raise ValueError("paths do not join")
        return ZPath(segments=self.segments + other.segments)


@dataclass(frozen=True)
class SolutionHandle:
    """A fundamental-matrix value anchored at a point of the cover."""

    system: IrregularSystem
    point: PathPoint
    value: np.ndarray
    provenance: str = "identity"
    seed_error: float = 0.0
    wronskian_drift: float = 0.0

    def __post_init__(self):
        V = np.asarray(self.value, dtype=complex)
        if V.shape != (self.system.n, self.system.n):
            raise ValueError("value shape does not match the system dimension")
        sign, logdet = np.linalg.slogdet(V)
        if sign == 0 or not np.isfinite(logdet):
            raise ValueError("fundamental matrix must be invertible")
        object.__setattr__(self, "value", V)


def transport_matrix(rhs, Y0, segments, tol: float = DEFAULT_TOL):
    """Integrate dY/dz = rhs(z) Y along parametrized segments.

    `rhs(z)` returns the coefficient matrix; Y0 may be a full matrix or a
    single column.  Raises IntegrationError on solver failure.  Returns the
    final value.
    """
    Y = np.asarray(Y0, dtype=complex)
    shape = Y.shape
    n = shape[0]
    cols = 1 if Y.ndim == 1 else shape[1]
    for seg in segments:
        zfun, dzfun = seg.parametrize()

        def f(t, y):
            z = zfun(t)
            return (dzfun(t) * (rhs(z) @ y.reshape(n, cols))).ravel()

        sol = solve_ivp(
            f,
            (0.0, 1.0),
            Y.ravel(),
            method="DOP853",
            rtol=tol,
            atol=tol,
            dense_output=False,
        )
        if not sol.success:
            raise IntegrationError(f"transport failed on {seg.kind} segment: {sol.message}")
        Y = sol.y[:, -1].reshape(shape)
    return Y


def integrate_path(
    sys: IrregularSystem, start: SolutionHandle, path: ZPath, tol: float = DEFAULT_TOL
) -> SolutionHandle:
    """Transport a solution handle along a path of the cover.

    The path must begin at the handle's basepoint (same z and same branch of
    arg).  The Wronskian drift |log det Y(end) - predicted| accumulates into
    the returned handle.
    """
    if not path.segments:
        return start
    s = path.start
    if abs(s.z - start.point.z) > 1e-9:
        raise ValueError("path does not start at the handle's basepoint")
    if abs(s.arg - start.point.arg) > 1e-9:
        raise BranchMismatchError(
            f"path starts on branch arg = {s.arg:.6g} but the handle sits on "
            f"arg = {start.point.arg:.6g}"
        )
    Y = transport_matrix(sys.coefficient, start.value, path.segments, tol=tol)
    end = path.end
    # Wronskian: d log det Y = (tr Lambda + tr A / z) dz along the path
    trL = np.trace(sys.Lambda)
    trA = np.trace(sys.A)
    w0 = np.log(abs(s.z)) + 1j * s.arg
    w1 = np.log(abs(end.z)) + 1j * end.arg
    sg0, ld0 = np.linalg.slogdet(start.value)
    sg1, ld1 = np.linalg.slogdet(Y)
    predicted = ld0 + np.log(sg0) + trL * (end.z - s.z) + trA * (w1 - w0)
    actual = ld1 + np.log(sg1)
    drift = abs(np.exp(actual - predicted) - 1.0)
    return replace(
        start,
        point=end,
        value=Y,
        wronskian_drift=float(start.wronskian_drift + drift),
    )


@dataclass(frozen=True)
class StokesConfig:
    tau: float
    radius: float = DEFAULT_SEED_RADIUS
    tol: float = DEFAULT_TOL
    order: int = 30
    widened: bool = False
    uC: tuple | None = None


def _frame(sys, r, cfg: StokesConfig) -> SectorFrame:
    return sector_bounds(
        sys.u, cfg.tau, r, widened=cfg.widened, uC=cfg.uC
    )


def _column_seed_directions(u, frame: SectorFrame, grid: int = 720):
    """Per-column seed directions: the deepest recessive angle in the sector.

    For column j the contamination of the truncated-series seed by other
    solutions scales like exp(|z| Re(e^{i theta}(u_j - u_i))); picking theta
    where u_j is most recessive against every other exponential drives those
    admixtures below the truncation error.  Returns (angles, margins) where
    margin > 0 means genuinely recessive with that depth.
    """
    u = np.asarray(u, dtype=complex)
    n = len(u)
    pad = min(0.05, 0.1 * frame.opening)
    thetas = np.linspace(frame.lo + pad, frame.hi - pad, grid)
    e = np.exp(1j * thetas)  # (grid,)
    best_angles = np.empty(n)
    best_margins = np.empty(n)
    for j in range(n):
        depth = np.full(grid, np.inf)
        total = np.zeros(grid)
        for i in range(n):
            if i == j or u[i] == u[j]:
                continue
            d = -np.real(e * (u[j] - u[i]))
            depth = np.minimum(depth, d)
            total += d
        if not np.any(np.isfinite(depth)):
            depth = np.zeros(grid)
        # tie-break flat plateaus (tightly coalescing pairs cap the min) in
        # favour of directions recessive against the remaining pairs too
        k = int(np.argmax(depth + 1e-3 * total))
        best_angles[j] = thetas[k]
        best_margins[j] = depth[k]
    return best_angles, best_margins


def _column_path(seed_pt: PathPoint, zstar: PathPoint, rho_arc: float) -> ZPath:
    """Radial leg in, argument sweep at moderate radius, radial leg out."""
    path = ZPath.radial(seed_pt, rho_arc)
    path = path.then(ZPath.arc(PathPoint.from_polar(rho_arc, seed_pt.arg), zstar.arg))
    if abs(zstar.radius - rho_arc) > 1e-12:
        path = path.then(
            ZPath.radial(PathPoint.from_polar(rho_arc, zstar.arg), zstar.radius)
        )
    return path


def actual_solution(
    sys: IrregularSystem,
    r: int,
    tau: float,
    radius: float = DEFAULT_SEED_RADIUS,
    zstar: PathPoint | None = None,
    tol: float = DEFAULT_TOL,
    fs: FormalSolution | None = None,
    order: int = 30,
    widened: bool = False,
    uC=None,
    coalesce_tol: float = 0.0,
) -> SolutionHandle:
    """Sectorial solution Y_r assembled at `zstar` (default: sector midpoint
    at the seed radius).

    Each column is seeded with the optimally truncated formal series at
    |z| = radius on the direction inside S_r where its exponential is most
    recessive (there the seed's contamination by other solutions is below
    the truncation error) and transported to the common point.  The reported
    `seed_error` is the first-omitted-term bound, inflated by exp(R d) when
    some column is only recessive up to a defect d < 0.
    """
    frame = sector_bounds(sys.u, tau, r, widened=widened, uC=uC)
    if zstar is None:
        zstar = PathPoint.from_polar(radius, frame.midpoint)
    elif not frame.contains(zstar.arg):
        raise SectorError(
            f"zstar argument {zstar.arg:.6g} outside sector "
            f"({frame.lo:.6g}, {frame.hi:.6g})"
        )
    if fs is None:
        fs = compute_formal_coefficients(sys, K=order, coalesce_tol=coalesce_tol)
    k_opt, bound = optimal_truncation(fs, radius)
    angles, margins = _column_seed_directions(sys.u, frame)
    # a column seeded at recessive depth d against pair (i, j) can still pick
    # up an admixture of that solution at the e^{-R d} level (the Stokes
    # leakage of the sector boundary); with no recessive direction available
    # (d <= 0) the admixture is order of the pair's Stokes activity, which
    # near-coalescing pairs of vanishing-compatible families reduce with the
    # separation
    leakage = 0.0
    for j in range(sys.n):
        ej = np.exp(1j * float(angles[j]))
        for i in range(sys.n):
            if i == j or sys.u[i] == sys.u[j]:
                continue
            depth = -float(np.real(ej * (sys.u[j] - sys.u[i])))
            weight = min(1.0, float(abs(sys.u[i] - sys.u[j])))
            leakage = max(leakage, weight * math.exp(-radius * max(depth, 0.0)))
    # argument sweeps at large |z| let the dominant exponential swamp the
    # recessive one inside the step-error control; sweep at moderate radius
    rho_max = float(np.max(np.abs(sys.u[:, None] - sys.u[None, :])))
    rho_arc = min(zstar.radius, radius, max(0.5, 4.0 / max(rho_max, 1e-6)))
    n = sys.n
    eye = np.eye(n, dtype=complex)
    w_star = np.log(zstar.radius) + 1j * zstar.arg
    Y = np.empty((n, n), dtype=complex)
    for j in range(n):
        seed_pt = PathPoint.from_polar(radius, float(angles[j]))
        # transport in the column's own scalar gauge y e^{-z u_j} z^{-b_j},
        # which stays O(1) along the whole path and keeps the step-error
        # control meaningful for exponentially small columns
        col = eval_series_factor(fs, seed_pt.z, K=k_opt)[:, j]
        uj, bj = fs.u[j], fs.b[j]

        def gauged(z, uj=uj, bj=bj):
            return sys.coefficient(z) - (uj + bj / z) * eye

        tilde = transport_matrix(
            gauged, col, _column_path(seed_pt, zstar, rho_arc).segments, tol=tol
        )
        Y[:, j] = tilde * np.exp(uj * zstar.z + bj * w_star)
    return SolutionHandle(
        system=sys,
        point=zstar,
        value=Y,
        provenance=f"formal-seeded({r})",
        seed_error=float(bound + leakage),
    )


@dataclass(frozen=True)
class StokesResult:
    """Stokes matrix S_r with its structure diagnostics.

    `required_zero` lists ((i, j), |entry|) for the positions forced to
    vanish by the triangular structure: Re(e^{i arg z*}(u_i - u_j)) > 0 in
    the sector overlap.  `error_estimate` combines seed bounds with the
    round-off amplification of the exponential regrading.
    """

    r: int
    S: np.ndarray
    zstar: PathPoint
    overlap: tuple[float, float]
    diag_residual: float
    required_zero: tuple[tuple[tuple[int, int], float], ...]
    error_estimate: float


def stokes_matrix(sys: IrregularSystem, r: int, cfg: StokesConfig,
                  fs: FormalSolution | None = None,
                  coalesce_tol: float = 0.0) -> StokesResult:
    """S_r = Y_r(z*)^{-1} Y_{r+1}(z*) at the sector-overlap midpoint, |z*| = R/2.

    Both sectorial solutions are transported to the same point of the cover;
    the quotient is formed in the F-gauge and regraded entrywise, so required
    zeros are damped rather than amplified.
    """
    frame_r = _frame(sys, r, cfg)
    frame_r1 = _frame(sys, r + 1, cfg)
    lo, hi = frame_r1.lo, frame_r.hi
    if not hi - lo > 1e-9:
        raise SectorError(f"sectors {r} and {r + 1} do not overlap: ({lo}, {hi})")
    theta = 0.5 * (lo + hi)
    zstar = PathPoint.from_polar(cfg.radius / 2.0, theta)
    if fs is None:
        fs = compute_formal_coefficients(sys, K=cfg.order, coalesce_tol=coalesce_tol)
    Yr = actual_solution(
        sys, r, cfg.tau, radius=cfg.radius, zstar=zstar, tol=cfg.tol, fs=fs,
        widened=cfg.widened, uC=cfg.uC,
    )
    Yr1 = actual_solution(
        sys, r + 1, cfg.tau, radius=cfg.radius, zstar=zstar, tol=cfg.tol, fs=fs,
        widened=cfg.widened, uC=cfg.uC,
    )
    n = sys.n
    w = np.log(zstar.radius) + 1j * zstar.arg
    grading = np.exp(fs.b * w + zstar.z * sys.u)  # E(z*) diagonal
    Fr = Yr.value / grading[None, :]
    Fr1 = Yr1.value / grading[None, :]
    try:
        W = np.linalg.solve(Fr, Fr1)
    except np.linalg.LinAlgError as exc:
        raise IntegrationError(f"conditioning failure at z* = {zstar.z:.6g}: {exc}") from exc
    ratio = grading[None, :] / grading[:, None]  # E_jj / E_ii
    S = W * ratio

    ed = complex(math.cos(theta), math.sin(theta))
    req = []
    for i in range(n):
        for j in range(n):
            if i != j and (ed * (sys.u[i] - sys.u[j])).real > 0:
                req.append(((i, j), float(abs(S[i, j]))))
    diag_residual = float(np.max(np.abs(np.diag(S) - 1.0)))
    amp = float(np.max(np.abs(ratio)))
    # seed admixtures act as basis-coefficient perturbations, so they enter
    # the quotient scaled by the size of S itself; regrading only amplifies
    # round-off and integration noise
    s_scale = 1.0 + float(np.max(np.abs(S)))
    err = (Yr.seed_error + Yr1.seed_error) * s_scale + amp * (10 * cfg.tol + 1e-14)
    return StokesResult(
        r=r,
        S=S,
        zstar=zstar,
        overlap=(lo, hi),
        diag_residual=diag_residual,
        required_zero=tuple(req),
        error_estimate=float(err),
    )


def levelt_handle(
    sys: IrregularSystem,
    ld: LeveltData,
    arg: float,
    radius: float | None = None,
) -> SolutionHandle:
    """Levelt solution evaluated near the origin on the requested branch.

    The Taylor factor converges on all of C for this system, but the
    truncated series is accurate only near 0; the default evaluation radius
    is 0.5 min |u_i| over nonzero entries, or 0.1 if Lambda has zero entries.
    """
    if radius is None:
        nz = np.abs(sys.u[np.abs(sys.u) > 0])
        radius = 0.1 if len(nz) < sys.n else 0.5 * float(nz.min())
    pt = PathPoint.from_polar(radius, arg)
    Y0 = eval_levelt(ld, pt.z, pt.arg)
    return SolutionHandle(system=sys, point=pt, value=Y0, provenance="levelt")


def connection_matrix(
    sys: IrregularSystem,
    r: int,
    ld: LeveltData,
    tau: float,
    radius: float = DEFAULT_SEED_RADIUS,
    tol: float = DEFAULT_TOL,
    fs: FormalSolution | None = None,
    zstar: PathPoint | None = None,
    widened: bool = False,
    uC=None,
) -> np.ndarray:
    """C_r with Y_r = Y^{(0)} C_r, matched at a common point of the cover.

    The Levelt solution is evaluated at small radius on the branch of z* and
    transported outward radially; both factors therefore carry the same arg
    bookkeeping and the quotient is branch-consistent.
    """
    frame = sector_bounds(sys.u, tau, r, widened=widened, uC=uC)
    if zstar is None:
        zstar = PathPoint.from_polar(radius / 2.0, frame.midpoint)
    elif not frame.contains(zstar.arg):
        raise SectorError("zstar outside the sector of Y_r")
    Yr = actual_solution(
        sys, r, tau, radius=radius, zstar=zstar, tol=tol, fs=fs,
        widened=widened, uC=uC,
    )
    lev = levelt_handle(sys, ld, zstar.arg)
    lev = integrate_path(sys, lev, ZPath.radial(lev.point, zstar.radius), tol=tol)
    return np.linalg.solve(lev.value, Yr.value)


def monodromy_loop(
    sys: IrregularSystem,
    start: SolutionHandle,
    winding: int = 1,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """M with Y(after loop) = Y(before) M for a loop of given winding around 0."""
    if winding == 0:
        return np.eye(sys.n, dtype=complex)
    after = integrate_path(sys, start, ZPath.loop(start.point, winding), tol=tol)
    return np.linalg.solve(start.value, after.value)
