"""Formal fundamental solution Y_F(z,u) = F(z,u) z^B e^{z Lambda}.

Provides the formal monodromy exponent B = diag(A), the coefficient
recursions for F_1..F_K (generic, coalescence-aware and isomonodromic
variants), resonance detection on the diagonal of A, and truncated
evaluation with explicit arg-branch bookkeeping.

The generic recursion comes from matching Laurent coefficients of
d/dz Y = (Lambda + A/z + sum_j A_j z^-j) Y order by order:

    (u_j - u_i)(F_k)_{ij} = (A_ii - A_jj + k - 1)(F_{k-1})_{ij}
                            + sum_{p != i} A_ip (F_{k-1})_{pj}
                            + sum_{m >= 2} (A_m F_{k-m})_{ij},
    k (F_k)_{ii} = -sum_{p != i} A_ip (F_k)_{pi}
                   - sum_{m >= 2} (A_m F_{k+1-m})_{ii}.

When u_i = u_j the left side degenerates; the entry (F_k)_{ij} is instead
determined by the order-(k+1) relation, which is solvable exactly when
A_ii - A_jj is not a negative integer.  That degenerate branch requires the
vanishing pattern A_ij = 0 on coalesced pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPointsError, ResonanceError
from .matrixcore import as_square


@dataclass(frozen=True)
class IrregularSystem:
    """The data (Lambda, A, optional higher poles) of the linear system.

    `u` holds the eigenvalues of Lambda = diag(u_1..u_n); `higher` holds the
    coefficients A_2..A_p of additional poles at z = 0.  Distinctness of the
    u_i is *not* enforced here; operations that need it check at call time.
    """

    u: np.ndarray
    A: np.ndarray
    higher: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        A = as_square(self.A)
        if A.shape[0] != len(u):
            raise ValueError(f"A is {A.shape} but u has length {len(u)}")
        higher = tuple(as_square(H) for H in self.higher)
        for H in higher:
            if H.shape != A.shape:
                raise ValueError("higher-pole coefficients must match A's shape")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "higher", higher)

    @property
    def n(self) -> int:
        return len(self.u)

    @property
    def Lambda(self) -> np.ndarray:
        return np.diag(self.u)

    def coefficient(self, z: complex) -> np.ndarray:
        """Lambda + A/z + sum_m A_m z^-m."""
        W = self.Lambda + self.A / z
        zm = z
        for H in self.higher:
            zm *= z
            W = W + H / zm
        return W

    def min_gap(self) -> float:
        d = np.abs(self.u[:, None] - self.u[None, :])
        d[np.diag_indices(self.n)] = np.inf
        return float(d.min())


@dataclass(frozen=True)
class FormalSolution:
    """Formal monodromy exponent and truncated series coefficients.

    F stores F_1..F_K (F_0 = I implicitly); `b` is the diagonal of A.
    """

    b: np.ndarray
    u: np.ndarray
    F: tuple[np.ndarray, ...]
    mode: str = "generic"

    @property
    def K(self) -> int:
        return len(self.F)

    @property
    def B(self) -> np.ndarray:
        return np.diag(self.b)


def formal_monodromy(sys: IrregularSystem) -> np.ndarray:
    """B(u) = diag(A_11, ..., A_nn) as a diagonal matrix."""
    return np.diag(np.diag(sys.A))


def check_resonances(A, tol: float = 1e-8) -> list[tuple[int, int, int]]:
    """Ordered pairs (i, j, k) with A_ii - A_jj within tol of an integer k != 0.

    An empty list certifies that the formal solution of the coalesced system
    is unique.  Indices are 0-based.
    """
    M = as_square(A)
    d = np.diag(M)
    out = []
    n = len(d)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            diff = d[i] - d[j]
            k = int(round(diff.real))
            if k != 0 and abs(diff - k) <= tol:
                out.append((i, j, k))
    return out


def _higher_term(sys, F_all, order):
    """sum_{m>=2} A_m F_{order-m} with F_0 = I, F_{<0} = 0."""
    n = sys.n
    out = np.zeros((n, n), dtype=complex)
    for m, H in enumerate(sys.higher, start=2):
        idx = order - m
        if idx < 0:
            continue
        out += H @ (np.eye(n, dtype=complex) if idx == 0 else F_all[idx - 1])
    return out


def _coalesced_entries(sys, F_all, Fk, k, groups, pattern_tol):
    """Fill entries of F_k for coalesced pairs from the order-(k+1) relation.

    For each column j and each coalescence group containing at least two
    indices, the relation at order k+1 couples the unknown entries
    (F_k)_{ij} (i in the group, i != j) linearly; the diagonal coefficient is
    A_ii - A_jj + k, nonzero when diag(A) has no negative-integer resonance
    inside the group.
    """
    A = sys.A
    n = sys.n
    d = np.diag(A)
    group_of = {}
    for g, idxs in enumerate(groups):
        for i in idxs:
            group_of[i] = g
    hi = _higher_term(sys, F_all, k + 1)
    for j in range(n):
        gj = group_of[j]
        rows = [i for i in groups[gj] if i != j]
        if not rows:
            continue
        m = len(rows)
        Mmat = np.zeros((m, m), dtype=complex)
        rhs = np.zeros(m, dtype=complex)
        for a, i in enumerate(rows):
            Mmat[a, a] = d[i] - d[j] + k
            acc = 0.0 + 0.0j
            for p in range(n):
                if p == i:
                    continue
                if p != j and group_of.get(p) == gj:
                    # unknown within the same group couples into the system
                    Mmat[a, rows.index(p)] += A[i, p]
                else:
                    acc += A[i, p] * Fk[p, j]
            rhs[a] = -(acc + hi[i, j])
        try:
            x = np.linalg.solve(Mmat, rhs)
        except np.linalg.LinAlgError as exc:
            raise ResonanceError(
                f"coalesced recursion singular at order {k} (diagonal resonance)",
                order=k,
            ) from exc
        for a, i in enumerate(rows):
            Fk[i, j] = x[a]


def compute_formal_coefficients(
    sys: IrregularSystem,
    K: int = 10,
    mode: str = "generic",
    du=None,
    coalesce_tol: float = 0.0,
    pattern_tol: float = 1e-10,
) -> FormalSolution:
    """Compute F_1..F_K of the formal solution.

    mode="generic" runs the z-side Laurent recursion; it requires pairwise
    distinct u_i unless `coalesce_tol` > 0, in which case pairs with
    |u_i - u_j| <= coalesce_tol are treated as coalesced (their A-entries
    must vanish to `pattern_tol`, and their diagonal entries must not differ
    by negative integers).

    mode="isomonodromic" determines off-diagonal entries of F_{l+1} from the
    u-side relation [F_{l+1}, E_i] = [F_1, E_i] F_l - d_i F_l using the
    supplied derivative oracle `du(l) -> list of d/du_i F_l`, and diagonals
    from the z-side diagonal rule, which both sides share.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    if mode not in ("generic", "isomonodromic"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "isomonodromic" and du is None:
        raise ValueError("isomonodromic mode needs a derivative oracle du")

    A = sys.A
    u = sys.u
    n = sys.n
    d = np.diag(A)

    # coalescence bookkeeping
    groups: list[tuple[int, ...]] = []
    if coalesce_tol > 0:
        seen = set()
        for i in range(n):
            if i in seen:
                continue
            grp = [i] + [
                j for j in range(i + 1, n) if abs(u[i] - u[j]) <= coalesce_tol
            ]
            seen.update(grp)
            groups.append(tuple(grp))
        for grp in groups:
            for i in grp:
                for j in grp:
                    if i != j and abs(A[i, j]) > pattern_tol:
                        raise CoincidentPointsError(
                            f"vanishing condition violated: A[{i},{j}] = "
                            f"{A[i, j]:.3e} but u_{i} = u_{j}"
                        )
                    if i != j:
                        kk = round((d[i] - d[j]).real)
                        if kk < 0 and abs(d[i] - d[j] - kk) <= pattern_tol:
                            raise ResonanceError(
                                "diagonal entries of coalesced pair differ by a "
                                f"non-zero integer ({i},{j}): formal solution not unique",
                                pair=(complex(d[i]), complex(d[j])),
                            )
    else:
        if sys.min_gap() == 0.0:
            raise CoincidentPointsError("coincident u_i; recursion divides by u_j - u_i")
        groups = [(i,) for i in range(n)]

    coalesced_pair = np.zeros((n, n), dtype=bool)
    for grp in groups:
        for i in grp:
            for j in grp:
                if i != j:
                    coalesced_pair[i, j] = True

    F_all: list[np.ndarray] = []
    for k in range(1, K + 1):
        Fk = np.zeros((n, n), dtype=complex)
        Fprev = F_all[k - 2] if k >= 2 else np.eye(n, dtype=complex)
        hi = _higher_term(sys, F_all, k)
        if mode == "generic":
            for i in range(n):
                for j in range(n):
                    if i == j or coalesced_pair[i, j]:
                        continue
                    num = (d[i] - d[j] + k - 1) * Fprev[i, j]
                    num += sum(A[i, p] * Fprev[p, j] for p in range(n) if p != i)
                    num += hi[i, j]
                    Fk[i, j] = num / (u[j] - u[i])
        else:
            if any(len(g) > 1 for g in groups):
                raise ValueError("isomonodromic mode does not support coalesced u")
            dF = du(k - 1)  # list over i of d/du_i F_{k-1}; for k=1, d F_0 = 0
            F1 = F_all[0] if F_all else _first_coefficient(sys)
            Fl = Fprev
            for i in range(n):
                comm = _commutator_with_E(F1, i)
                Rhs = comm @ Fl - dF[i]
                # [F_{l+1}, E_i] has column i equal to (F_{l+1})_{ai}, row i
                # equal to -(F_{l+1})_{ib}
                for a in range(n):
                    if a != i:
                        Fk[a, i] = Rhs[a, i]
                for b in range(n):
                    if b != i:
                        Fk[i, b] = -Rhs[i, b]
        if any(len(g) > 1 for g in groups):
            _coalesced_entries(sys, F_all, Fk, k, groups, pattern_tol)
        # diagonal rule shared by both modes
        hi_diag = _higher_term(sys, F_all + [Fk], k + 1)
        for i in range(n):
            acc = sum(A[i, p] * Fk[p, i] for p in range(n) if p != i)
            Fk[i, i] = -(acc + hi_diag[i, i]) / k
        F_all.append(Fk)

    return FormalSolution(b=d.copy(), u=u.copy(), F=tuple(F_all), mode=mode)


def _first_coefficient(sys):
    """Closed form F_1: (F_1)_{ij} = A_ij/(u_j - u_i), diagonal by the k=1 rule."""
    fs = compute_formal_coefficients(sys, K=1)
    return fs.F[0]


def _commutator_with_E(M, i):
    E = np.zeros_like(M)
    E[i, i] = 1.0
    return M @ E - E @ M


def flow_derivative_oracle(sys, flow_step, h: float = 1e-5, K: int = 10):
    """Centered finite-difference oracle for d/du_i F_l along a flow.

    `flow_step(j, delta)` must return the matrix A at u + delta*e_j obtained
    by the isomonodromy flow.  The oracle computes the generic-recursion
    coefficients at the displaced points, so combining it with
    mode="isomonodromic" cross-validates the two recursions.
    """
    n = sys.n
    cache: dict[tuple[int, int], FormalSolution] = {}

    def displaced(j, sgn):
        key = (j, sgn)
        if key not in cache:
            A_disp = flow_step(j, sgn * h)
            u_disp = sys.u.copy()
            u_disp[j] += sgn * h
            cache[key] = compute_formal_coefficients(
                IrregularSystem(u=u_disp, A=A_disp, higher=sys.higher), K=K
            )
        return cache[key]

    def du(l):
        if l == 0:
            return [np.zeros((n, n), dtype=complex) for _ in range(n)]
        out = []
        for j in range(n):
            fp = displaced(j, +1).F[l - 1]
            fm = displaced(j, -1).F[l - 1]
            out.append((fp - fm) / (2 * h))
        return out

    return du


def eval_series_factor(fs: FormalSolution, z: complex, K: int | None = None) -> np.ndarray:
    """The truncated series factor I + sum_{k<=K} F_k z^-k alone."""
    z = complex(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    if K is None:
        K = fs.K
    n = len(fs.b)
    F = np.eye(n, dtype=complex)
    zk = 1.0 + 0.0j
    for k in range(1, K + 1):
        zk /= z
        F = F + fs.F[k - 1] * zk
    return F


def eval_truncated_formal(
    fs: FormalSolution, z: complex, arg_branch: float, K: int | None = None
) -> np.ndarray:
    """(I + sum_{k<=K} F_k z^-k) z^B e^{z Lambda} at a point of the cover.

    z^B uses the supplied continuous argument; B and Lambda are diagonal so
    the two exponential factors are evaluated entrywise.
    """
    F = eval_series_factor(fs, z, K)
    w = np.log(abs(z)) + 1j * arg_branch
    scale = np.exp(fs.b * w + complex(z) * fs.u)
    return F * scale[None, :]


def optimal_truncation(fs: FormalSolution, radius: float) -> tuple[int, float]:
    """Index minimizing ||F_k|| R^-k and the value there (seed error bound).

    Stops before the smallest-magnitude term of the divergent series; the
    returned bound is the magnitude of the first omitted term.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    best_k, best = 0, np.inf
    for k in range(1, fs.K + 1):
        t = float(np.linalg.norm(fs.F[k - 1], 2)) * radius ** (-k)
        if t < best:
            best_k, best = k, t
    return best_k, best


def ode_laurent_residuals(sys: IrregularSystem, fs: FormalSolution) -> list[float]:
    """Norms of the Laurent coefficients of the defining-identity residual.

    Substituting the truncated series into dY/dz = (Lambda + A/z + ...) Y and
    collecting powers z^-1..z^-K must give zero; entry k-1 of the returned
    list is the norm of the coefficient of z^-k, relative to ||A||.
    """
    n = sys.n
    A = sys.A
    B = np.diag(np.diag(A))
    Lam = sys.Lambda
    out = []
    Fm = [np.eye(n, dtype=complex)] + list(fs.F)
    for k in range(1, fs.K + 1):
        # [Lambda, F_k] + (k-1) F_{k-1} - F_{k-1} B + A F_{k-1} + higher = 0
        terms = [
            Lam @ Fm[k] - Fm[k] @ Lam,
            (k - 1) * Fm[k - 1],
            -Fm[k - 1] @ B,
            A @ Fm[k - 1],
            _higher_term(sys, list(fs.F), k),
        ]
        resid = sum(terms)
        scale = max(max(np.linalg.norm(t, 2) for t in terms), 1.0)
        out.append(float(np.linalg.norm(resid, 2)) / scale)
    return out
