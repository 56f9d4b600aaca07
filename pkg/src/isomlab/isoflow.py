"""The nonlinear isomonodromy flow dA/du_j = [omega_j(0,u), A].

omega_j(0,u) = [F_1(u), E_j] + D_j(u), with entries
A_ab (delta_aj - delta_bj)/(u_a - u_b) plus an optional diagonal gauge D_j.
Strong flows have D = 0; weak flows carry a polynomial diagonal D(u) whose
partials D_j = dD/du_j are differentiated exactly, so the closedness of
sum_j D_j du_j is automatic.

Also here: the Frobenius-integrability residual probed by finite
differences, the vanishing-order fit A_ij = O(u_i - u_j) used near the
coalescence locus, and the Laurent reduction of Pfaffian coefficients with
poles in z (downward Sylvester chain, which forces all negative coefficients
to vanish for non-resonant A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, ResonanceError, WallError
from .matrixcore import as_square, solve_sylvester
from .odeengine import PathPoint


@dataclass(frozen=True)
class DiagonalGauge:
    """Diagonal matrix function D(u) with polynomial entries.

    Each monomial is (entry index a, coefficient, exponent tuple); the entry
    D_aa(u) is the sum of its monomials c * prod_j u_j^{alpha_j}.  Partials
    are differentiated term by term, so D_j = dD/du_j exactly.
    """

    n: int
    terms: tuple[tuple[int, complex, tuple[int, ...]], ...]

    def __post_init__(self):
        for a, _, alpha in self.terms:
            if not 0 <= a < self.n:
                raise ValueError(f"gauge entry index {a} out of range")
            if len(alpha) != self.n:
                raise ValueError("monomial exponent tuple has wrong length")

    @staticmethod
    def linear(C) -> "DiagonalGauge":
        """D_aa(u) = sum_j C[a, j] u_j."""
        M = np.asarray(C, dtype=complex)
        n = M.shape[0]
        terms = []
        for a in range(n):
            for j in range(n):
                if M[a, j] != 0:
                    alpha = tuple(1 if k == j else 0 for k in range(n))
                    terms.append((a, complex(M[a, j]), alpha))
        return DiagonalGauge(n=n, terms=tuple(terms))

    def value(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        out = np.zeros(self.n, dtype=complex)
        for a, c, alpha in self.terms:
            out[a] += c * np.prod(u**np.array(alpha))
        return out

    def partial(self, u, j: int) -> np.ndarray:
        """Diagonal of D_j(u) = dD/du_j."""
        u = np.asarray(u, dtype=complex)
        out = np.zeros(self.n, dtype=complex)
        for a, c, alpha in self.terms:
            if alpha[j] == 0:
                continue
            dalpha = list(alpha)
            dalpha[j] -= 1
            out[a] += c * alpha[j] * np.prod(u**np.array(dalpha))
        return out


@dataclass(frozen=True)
class DeformationState:
    """A point (u, A) of the deformation space, plus the gauge selecting the mode.

    gauge=None runs the strong flow (D = 0); a DiagonalGauge runs the weak
    flow.  Along strong flows diag(A) and the spectrum of A are invariants;
    along weak flows only the spectrum is.
    """

    u: np.ndarray
    A: np.ndarray
    gauge: DiagonalGauge | None = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        A = as_square(self.A)
        if A.shape[0] != len(u):
            raise ValueError("A and u dimensions disagree")
        if self.gauge is not None and self.gauge.n != len(u):
            raise ValueError("gauge dimension disagrees with u")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class UPath:
    """Piecewise-straight path in u-space."""

    waypoints: tuple[np.ndarray, ...]

    def __post_init__(self):
        pts = tuple(np.asarray(w, dtype=complex).reshape(-1) for w in self.waypoints)
        if len(pts) < 2:
            raise ValueError("a path needs at least two waypoints")
        n = len(pts[0])
        for w in pts:
            if len(w) != n or not (
                np.all(np.isfinite(w.real)) and np.all(np.isfinite(w.imag))
            ):
                raise ValueError("waypoints must be finite and of equal length")
        object.__setattr__(self, "waypoints", pts)

    @staticmethod
    def line(a, b) -> "UPath":
        return UPath(waypoints=(a, b))

    def min_gap(self, samples: int = 256) -> float:
        """Smallest pairwise |u_i - u_j| over sampled segment points."""
        best = math.inf
        for a, b in zip(self.waypoints[:-1], self.waypoints[1:]):
            for t in np.linspace(0.0, 1.0, samples):
                u = a + t * (b - a)
                d = np.abs(u[:, None] - u[None, :])
                d[np.diag_indices(len(u))] = np.inf
                best = min(best, float(d.min()))
        return best


def omega_zero_part(A, u, j: int, Dj=None) -> np.ndarray:
    """omega_j(0,u): entry (a,b) = A_ab (delta_aj - delta_bj)/(u_a - u_b), plus D_j.

    Satisfies [Lambda, omega_j(0)] = [E_j, A] exactly, and the gauge-free
    parts telescope to zero over j.
    """
    A = as_square(A)
    u = np.asarray(u, dtype=complex).reshape(-1)
    n = A.shape[0]
    if not 0 <= j < n:
        raise ValueError(f"index j = {j} out of range")
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(np.abs(diff) == 0):
        raise WallError("coincident u entries; omega_j(0) has a pole there")
    P = A / diff
    W = np.zeros((n, n), dtype=complex)
    W[j, :] = P[j, :]
    W[:, j] = -P[:, j]
    W[j, j] = 0.0
    if Dj is not None:
        W = W + np.diag(np.asarray(Dj, dtype=complex).reshape(-1))
    return W


def _omega_stack(A, u, gauge):
    """All omega_j(0,u) as an (n, n, n) stack."""
    n = A.shape[0]
    out = np.empty((n, n, n), dtype=complex)
    for j in range(n):
        Dj = gauge.partial(u, j) if gauge is not None else None
        out[j] = omega_zero_part(A, u, j, Dj=Dj)
    return out


@dataclass
class FlowTrace:
    t: np.ndarray
    u: np.ndarray
    A: np.ndarray
    G: np.ndarray | None = None
    Y: np.ndarray | None = None


@dataclass
class FlowResult:
    state: DeformationState
    trace: FlowTrace
    gauge_matrix: np.ndarray | None = None
    frame_value: np.ndarray | None = None


def integrate_flow(
    state: DeformationState,
    path: UPath,
    tol: float = 1e-11,
    rhs_sign: float = 1.0,
    carry_gauge=None,
    carry_frame: tuple[PathPoint, np.ndarray] | None = None,
    samples_per_segment: int = 17,
    guard: float | None = None,
    exempt_pairs: frozenset | set = frozenset(),
) -> FlowResult:
    """Integrate dA = sum_j [omega_j(0,u), A] du_j along a piecewise-straight path.

    Optionally co-integrates a gauge matrix G with dG = (sum_j omega_j(0) du_j) G
    (`carry_gauge` = initial G) and a fundamental-matrix frame at a fixed
    z-point with dY = sum_j (z E_j + omega_j(0)) du_j Y (`carry_frame` =
    (PathPoint, Y0)).  `rhs_sign` scales the whole right-hand side; -1 is the
    corrupted flow used by sensitivity checks.

    A guard band refuses segments whose sampled minimal pair gap falls below
    `guard` (default 1e-6 times the u scale) unless every shrinking pair is
    listed in `exempt_pairs` (pairs whose vanishing check already passed).
    """
    if len(path.waypoints[0]) != state.n:
        raise ValueError("path dimension disagrees with the state")
    if np.linalg.norm(path.waypoints[0] - state.u) > 1e-12:
        raise ValueError("path must start at the state's u")
    n = state.n
    scale = max(1.0, float(np.max(np.abs(path.waypoints))))
    if guard is None:
        guard = 1e-6 * scale
    gap = path.min_gap()
    if gap < guard:
        close = _closest_pairs(path)
        if not set(close) <= set(exempt_pairs):
            raise WallError(
                f"path approaches the coalescence locus (min gap {gap:.3e} < "
                f"guard {guard:.3e}) for pairs {sorted(close)}"
            )

    gauge = state.gauge
    blocks = [n * n]
    if carry_gauge is not None:
        blocks.append(n * n)
    if carry_frame is not None:
        blocks.append(n * n)

    y0_parts = [state.A.ravel()]
    if carry_gauge is not None:
        y0_parts.append(np.asarray(carry_gauge, dtype=complex).ravel())
    zfixed = None
    if carry_frame is not None:
        pt, Y0 = carry_frame
        zfixed = pt.z
        y0_parts.append(np.asarray(Y0, dtype=complex).ravel())
    y = np.concatenate(y0_parts)

    ts, us, As, Gs, Ys = [], [], [], [], []

    for seg_idx, (a, b) in enumerate(zip(path.waypoints[:-1], path.waypoints[1:])):
        delta = b - a

        def f(t, yv):
            u = a + t * delta
            A = yv[: n * n].reshape(n, n)
            W = _omega_stack(A, u, gauge)
            dA = np.zeros((n, n), dtype=complex)
            for j in range(n):
                dA += delta[j] * (W[j] @ A - A @ W[j])
            parts = [rhs_sign * dA.ravel()]
            off = n * n
            if carry_gauge is not None:
                G = yv[off : off + n * n].reshape(n, n)
                dG = np.zeros((n, n), dtype=complex)
                for j in range(n):
                    dG += delta[j] * (W[j] @ G)
                parts.append(rhs_sign * dG.ravel())
                off += n * n
            if carry_frame is not None:
                Y = yv[off : off + n * n].reshape(n, n)
                dY = np.zeros((n, n), dtype=complex)
                for j in range(n):
                    Ej = np.zeros((n, n), dtype=complex)
                    Ej[j, j] = zfixed
                    dY += delta[j] * ((Ej + W[j]) @ Y)
                parts.append(rhs_sign * dY.ravel())
            return np.concatenate(parts)

        t_eval = np.linspace(0.0, 1.0, samples_per_segment)
        sol = solve_ivp(
            f, (0.0, 1.0), y, method="DOP853", rtol=tol, atol=tol, t_eval=t_eval
        )
        if not sol.success:
            raise IntegrationError(f"flow failed on segment {seg_idx}: {sol.message}")
        for m, t in enumerate(sol.t):
            ts.append(seg_idx + t)
            us.append(a + t * delta)
            col = sol.y[:, m]
            As.append(col[: n * n].reshape(n, n))
            off = n * n
            if carry_gauge is not None:
                Gs.append(col[off : off + n * n].reshape(n, n))
                off += n * n
            if carry_frame is not None:
                Ys.append(col[off : off + n * n].reshape(n, n))
        y = sol.y[:, -1]

    A_end = y[: n * n].reshape(n, n)
    off = n * n
    G_end = None
    if carry_gauge is not None:
        G_end = y[off : off + n * n].reshape(n, n)
        off += n * n
    Y_end = None
    if carry_frame is not None:
        Y_end = y[off : off + n * n].reshape(n, n)

    trace = FlowTrace(
        t=np.array(ts),
        u=np.array(us),
        A=np.array(As),
        G=np.array(Gs) if Gs else None,
        Y=np.array(Ys) if Ys else None,
    )
    final = DeformationState(u=path.waypoints[-1], A=A_end, gauge=gauge)
    return FlowResult(state=final, trace=trace, gauge_matrix=G_end, frame_value=Y_end)


def _closest_pairs(path: UPath, samples: int = 256):
    """Pairs attaining (near-)minimal gaps along the path."""
    n = len(path.waypoints[0])
    best = math.inf
    pairs = set()
    for a, b in zip(path.waypoints[:-1], path.waypoints[1:]):
        for t in np.linspace(0.0, 1.0, samples):
            u = a + t * (b - a)
            for i in range(n):
                for j in range(i + 1, n):
                    g = abs(u[i] - u[j])
                    if g < best * 0.999:
                        best = g
                        pairs = {(i, j)}
                    elif g <= best * 1.5:
                        pairs.add((i, j))
    return pairs


def integrability_residual(state: DeformationState, h: float = 1e-5,
                           rhs_sign: float = 1.0) -> float:
    """Max-norm Frobenius mismatch d_k omega_j(0) - d_j omega_k(0) + [omega_j, omega_k].

    Partial derivatives are centered finite differences taken along the flow
    itself: A(u +- h e_k) is obtained by integrating the deformation equations
    over the short displacement, so a corrupted flow (`rhs_sign` = -1) shows
    up as an O(1) residual while a faithful one converges at O(h^2).  For
    n = 2 the residual vanishes structurally (omega_1 = -omega_0 plus
    translation invariance), so sensitivity checks need n >= 3.
    """
    n = state.n
    u0 = state.u

    def omega_at(u_disp, A_disp, j):
        Dj = state.gauge.partial(u_disp, j) if state.gauge is not None else None
        return omega_zero_part(A_disp, u_disp, j, Dj=Dj)

    # displaced states along the flow
    disp = {}
    for k in range(n):
        for sgn in (+1, -1):
            target = u0.copy()
            target[k] += sgn * h
            res = integrate_flow(
                state, UPath.line(u0, target), tol=1e-12, rhs_sign=rhs_sign
            )
            disp[(k, sgn)] = res.state

    W0 = _omega_stack(state.A, u0, state.gauge)
    worst = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            sp, sm = disp[(k, +1)], disp[(k, -1)]
            dWj_duk = (omega_at(sp.u, sp.A, j) - omega_at(sm.u, sm.A, j)) / (2 * h)
            sp, sm = disp[(j, +1)], disp[(j, -1)]
            dWk_duj = (omega_at(sp.u, sp.A, k) - omega_at(sm.u, sm.A, k)) / (2 * h)
            resid = dWj_duk - dWk_duj + W0[j] @ W0[k] - W0[k] @ W0[j]
            worst = max(worst, float(np.linalg.norm(resid, 2)))
    return worst


@dataclass(frozen=True)
class VanishingFit:
    slope: float
    intercept: float
    pair: tuple[int, int]
    passed: bool
    gaps: np.ndarray
    magnitudes: np.ndarray


def vanishing_order_check(gaps, magnitudes, pair=(0, 1), slope_threshold: float = 0.9,
                          floor: float = 1e-13) -> VanishingFit:
    """Fit log|A_ij| against log|u_i - u_j| and compare the slope to 0.9.

    Entries identically below `floor` pass with slope = +inf (the zero-entry
    convention).  Requires at least 5 samples.
    """
    g = np.asarray(gaps, dtype=float)
    m = np.asarray(magnitudes, dtype=float)
    if len(g) != len(m) or len(g) < 5:
        raise ValueError("need at least 5 (gap, magnitude) samples")
    if np.all(m <= floor):
        return VanishingFit(
            slope=math.inf, intercept=-math.inf, pair=tuple(pair), passed=True,
            gaps=g, magnitudes=m,
        )
    mask = m > floor
    x, yv = np.log(g[mask]), np.log(m[mask])
    slope, intercept = np.polyfit(x, yv, 1)
    return VanishingFit(
        slope=float(slope),
        intercept=float(intercept),
        pair=tuple(pair),
        passed=bool(slope >= slope_threshold),
        gaps=g,
        magnitudes=m,
    )


def vanishing_from_trace(trace: FlowTrace, pair: tuple[int, int],
                         slope_threshold: float = 0.9) -> VanishingFit:
    """Vanishing-order fit taken directly off a flow trace.

    Uses the sampled gaps |u_i - u_j| and entry magnitudes |A_ij| of the
    trace; the trace should approach the coalescence locus monotonically in
    the fitted pair.
    """
    i, j = pair
    gaps = np.abs(trace.u[:, i] - trace.u[:, j])
    mags = np.abs(trace.A[:, i, j])
    return vanishing_order_check(gaps, mags, pair=pair, slope_threshold=slope_threshold)


@dataclass(frozen=True)
class LaurentCoefficients:
    """Laurent data of one Pfaffian coefficient omega_j(z, u) at z = 0."""

    j: int
    negative: tuple[np.ndarray, ...]  # omega^(-p) .. omega^(-1)
    omega0: np.ndarray | None
    positive: tuple[np.ndarray, ...]  # omega^(1), omega^(2), ...


@dataclass(frozen=True)
class LaurentReport:
    forced_zero_norms: tuple[float, ...]
    diag_rule_residual: float
    truncated_positive: int


def laurent_reduce(
    A,
    u,
    raw: LaurentCoefficients,
    n_positive: int = 3,
    tol: float = 1e-8,
) -> tuple[LaurentCoefficients, LaurentReport]:
    """Reduce a Laurent Pfaffian coefficient against a non-resonant residue A.

    Downward chain ((A + m) X - X A = [previous, Lambda], m = p..1): for
    non-resonant A each operator is invertible, so every negative coefficient
    comes out zero.  The z^0 relation determines the off-diagonal of
    omega^(0) from omega^(1) and constrains diag(omega^(1)); the upward chain
    then propagates omega^(m+1) from omega^(m).  Resonant A raises
    ResonanceError naming the eigenvalue pair.
    """
    A = as_square(A)
    u = np.asarray(u, dtype=complex).reshape(-1)
    n = A.shape[0]
    j = raw.j
    if not 0 <= j < n:
        raise ValueError("coefficient index out of range")
    Lam = np.diag(u)
    eye = np.eye(n, dtype=complex)

    p = len(raw.negative)
    negative = []
    forced = []
    prev = np.zeros((n, n), dtype=complex)
    for m in range(p, 0, -1):
        rhs = prev @ Lam - Lam @ prev  # [prev, Lambda] with prev = omega^(-m-1)
        try:
            X = solve_sylvester(A + m * eye, A, rhs, tol=tol)
        except ResonanceError as exc:
            raise ResonanceError(
                f"Laurent reduction blocked at order -{m}: {exc}", pair=exc.pair,
                order=-m,
            ) from exc
        negative.append(X)
        forced.append(float(np.linalg.norm(X, 2)))
        prev = X
    negative.reverse()  # stored omega^(-p) .. omega^(-1)

    om1 = raw.positive[0] if raw.positive else _unit_diag(n, j)
    om1 = as_square(om1)
    # diagonal rule of the z^0 relation
    diag_expected = np.zeros(n, dtype=complex)
    for a in range(n):
        s = 1.0 if a == j else 0.0
        acc = sum(
            om1[a, b] * A[b, a] - A[a, b] * om1[b, a] for b in range(n) if b != a
        )
        diag_expected[a] = s - acc
    diag_resid = float(np.max(np.abs(np.diag(om1) - diag_expected)))

    # off-diagonal of omega^(0); the diagonal is the gauge freedom D_j
    comm = om1 @ A - A @ om1
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0):
        raise WallError("coincident u entries in Laurent reduction")
    om0 = (comm + om1) / diff
    np.fill_diagonal(om0, 0.0)
    if raw.omega0 is not None:
        om0 += np.diag(np.diag(as_square(raw.omega0)))

    positive = [om1]
    prev = om1
    for m in range(1, n_positive):
        rhs = prev @ Lam - Lam @ prev
        X = solve_sylvester(A - (m + 1) * eye, A, rhs, tol=tol)
        positive.append(X)
        prev = X

    out = LaurentCoefficients(
        j=j, negative=tuple(negative), omega0=om0, positive=tuple(positive)
    )
    report = LaurentReport(
        forced_zero_norms=tuple(forced),
        diag_rule_residual=diag_resid,
        truncated_positive=n_positive,
    )
    return out, report


def _unit_diag(n, j):
    E = np.zeros((n, n), dtype=complex)
    E[j, j] = 1.0
    return E
