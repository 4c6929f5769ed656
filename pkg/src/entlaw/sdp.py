"""Dense primal-dual interior-point solver for small block-diagonal SDPs.

Standard form (real symmetric blocks)::

    primal:  minimize  <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
    dual:    maximize  b^T y    s.t.  sum_i y_i A_i + S = C,  S >= 0

Iterations follow the infeasible-start path-following scheme with the HKM
search direction and Mehrotra's predictor-corrector. Hermitian data enters
through :func:`complex_embed`; inequalities are written with slack variables
in 1x1 blocks.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

__all__ = [
    "Certificate",
    "ProblemBuilder",
    "SdpProblem",
    "SdpSolution",
    "SdpStatus",
    "check_certificate",
    "complex_embed",
    "complex_unembed",
    "dump_problem",
    "hermitian_basis",
    "load_problem",
    "recording",
    "solve",
]

STEP_FRACTION = 0.98
DEFAULT_TOL = 1e-8
MAX_ITER = 100


class SdpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class SdpProblem:
    """Block-diagonal SDP in standard form.

    ``a[k]`` holds the constraint data for block ``k`` as ``(rows, mats)``:
    ``mats[r]`` is the block-``k`` part of constraint ``rows[r]``; constraints
    not listed have a zero block there. ``sense="max"`` means the caller wants
    ``max <C, X>``; it is solved as ``min <-C, X>`` and objectives are
    reported in the caller's sense.
    """

    blocks: Tuple[int, ...]
    c: Tuple[np.ndarray, ...]
    a: Tuple[Tuple[np.ndarray, np.ndarray], ...]
    b: np.ndarray
    sense: str = "min"

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def dof(self) -> int:
        return sum(n * (n + 1) // 2 for n in self.blocks)

    def constraint_block(self, i: int, k: int) -> np.ndarray:
        rows, mats = self.a[k]
        hit = np.nonzero(rows == i)[0]
        n = self.blocks[k]
        return mats[hit[0]] if hit.size else np.zeros((n, n))


class ProblemBuilder:
    """Assemble an :class:`SdpProblem` block by block.

    >>> pb = ProblemBuilder()
    >>> x = pb.block(1)
    >>> pb.objective(x, [[1.0]])
    >>> pb.constraint({x: [[1.0]]}, 1.0)
    >>> prob = pb.build()
    """

    def __init__(self):
        self._sizes: List[int] = []
        self._obj: Dict[int, np.ndarray] = {}
        self._rows: List[Dict[int, np.ndarray]] = []
        self._rhs: List[float] = []

    def block(self, size: int) -> int:
        self._sizes.append(int(size))
        return len(self._sizes) - 1

    def objective(self, blk: int, mat) -> None:
        self._obj[blk] = self._obj.get(blk, 0) + np.asarray(mat, dtype=float)

    def constraint(self, terms: Dict[int, object], rhs: float) -> None:
        self._rows.append({k: np.asarray(v, dtype=float) for k, v in terms.items()})
        self._rhs.append(float(rhs))

    def build(self, sense: str = "min") -> SdpProblem:
        if sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
        c = []
        for k, n in enumerate(self._sizes):
            ck = self._obj.get(k, np.zeros((n, n)))
            ck = np.broadcast_to(ck, (n, n)).astype(float)
            c.append(_checked_sym(ck, f"objective block {k}"))
        a = []
        for k, n in enumerate(self._sizes):
            rows = [i for i, row in enumerate(self._rows) if k in row]
            mats = np.zeros((len(rows), n, n))
            for r, i in enumerate(rows):
                mats[r] = _checked_sym(np.broadcast_to(self._rows[i][k], (n, n)), f"constraint {i} block {k}")
            a.append((np.array(rows, dtype=int), mats))
        prob = SdpProblem(tuple(self._sizes), tuple(c), tuple(a), np.array(self._rhs), sense)
        if prob.m > prob.dof:
            raise ValueError(f"{prob.m} constraints exceed {prob.dof} degrees of freedom")
        return prob


def _checked_sym(m: np.ndarray, what: str) -> np.ndarray:
    m = np.array(m, dtype=float)
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(m), initial=0.0)):
        raise ValueError(f"{what} is not symmetric")
    return 0.5 * (m + m.T)


# ----------------------------------------------------------------------------
# Complex Hermitian <-> real symmetric


def complex_embed(h) -> np.ndarray:
    """``H -> [[Re H, -Im H], [Im H, Re H]]``.

    Eigenvalues are doubled in multiplicity, so ``H >= 0`` iff the embedding
    is, and ``Tr[emb(H) emb(K)] = 2 Tr[H K]``.
    """
    h = np.asarray(getattr(h, "data", h))
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def complex_unembed(x: np.ndarray) -> np.ndarray:
    """Hermitian matrix represented by a real symmetric ``2n x 2n`` block.

    Averages the two copies, so it is a left inverse of :func:`complex_embed`
    and maps PSD blocks to PSD Hermitian matrices.
    """
    n = x.shape[0] // 2
    re = 0.5 * (x[:n, :n] + x[n:, n:])
    im = 0.5 * (x[n:, :n] - x[:n, n:])
    return re + 1j * im


def hermitian_basis(n: int) -> List[np.ndarray]:
    """Orthonormal basis (Hilbert-Schmidt) of ``n x n`` Hermitian matrices."""
    basis = []
    for j in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    s = 1.0 / math.sqrt(2.0)
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = e[k, j] = s
            basis.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = 1j * s
            e[k, j] = -1j * s
            basis.append(e)
    return basis


# ----------------------------------------------------------------------------
# Solver


@dataclass
class SdpSolution:
    x: List[np.ndarray]
    y: np.ndarray
    s: List[np.ndarray]
    primal_obj: float
    dual_obj: float
    gap: float
    status: SdpStatus
    iterations: int = 0
    primal_residual: float = math.inf
    dual_residual: float = math.inf
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is SdpStatus.OPTIMAL


def _op_a(prob: SdpProblem, blocks) -> np.ndarray:
    out = np.zeros(prob.m)
    for (rows, mats), xk in zip(prob.a, blocks):
        if rows.size:
            out[rows] += np.einsum("rij,ij->r", mats, xk)
    return out


def _op_at(prob: SdpProblem, y: np.ndarray) -> List[np.ndarray]:
    out = []
    for (rows, mats), n in zip(prob.a, prob.blocks):
        if rows.size:
            out.append(np.einsum("r,rij->ij", y[rows], mats))
        else:
            out.append(np.zeros((n, n)))
    return out


def _inner(xs, ys) -> float:
    return float(sum(np.vdot(x, y) for x, y in zip(xs, ys)))


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _schur(prob: SdpProblem, x, sinv) -> np.ndarray:
    m = np.zeros((prob.m, prob.m))
    for (rows, mats), xk, sk in zip(prob.a, x, sinv):
        r = rows.size
        if not r:
            continue
        t = xk @ mats @ sk
        m[np.ix_(rows, rows)] += mats.reshape(r, -1) @ t.reshape(r, -1).T
    return _sym(m)


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest ``a`` with ``x + a dx >= 0`` (``x`` positive definite)."""
    if x.shape[0] == 1:
        return math.inf if dx[0, 0] >= 0 else -x[0, 0] / dx[0, 0]
    chol = np.linalg.cholesky(x)
    linv = sla.solve_triangular(chol, np.eye(x.shape[0]), lower=True)
    lam = np.linalg.eigvalsh(_sym(linv @ dx @ linv.T))[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _step(xs, dxs) -> float:
    a = min(_max_step(x, dx) for x, dx in zip(xs, dxs))
    return min(1.0, STEP_FRACTION * a)


def _spd_inverse(s: np.ndarray) -> np.ndarray:
    c = sla.cho_factor(s)
    return _sym(sla.cho_solve(c, np.eye(s.shape[0])))


class _SchurSolver:
    def __init__(self, m: np.ndarray):
        try:
            self._c = sla.cho_factor(m)
            self._fallback = None
        except np.linalg.LinAlgError:
            self._c = None
            self._fallback = m

    def __call__(self, rhs):
        if self._c is not None:
            return sla.cho_solve(self._c, rhs)
        return np.linalg.lstsq(self._fallback, rhs, rcond=None)[0]


_RECORDER: contextvars.ContextVar = contextvars.ContextVar("sdp_recorder", default=None)


@contextlib.contextmanager
def recording():
    """Collect ``(problem, solution)`` for every :func:`solve` in the block.

    >>> with recording() as log:
    ...     pass
    >>> log
    []
    """
    log: List[Tuple[SdpProblem, "SdpSolution"]] = []
    token = _RECORDER.set(log)
    try:
        yield log
    finally:
        _RECORDER.reset(token)


def solve(
    prob: SdpProblem,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_ITER,
    feas_tol: Optional[float] = None,
) -> SdpSolution:
    """Solve ``prob`` to absolute duality gap ``<= tol``.

    Feasibility residuals must reach ``feas_tol`` (default ``min(tol, 1e-8)``).
    Iteration-cap exhaustion or a stalled step returns
    ``NUMERICAL_FAILURE``; diverging iterates return ``INFEASIBLE``.
    """
    feas_tol = min(tol, 1e-8) if feas_tol is None else feas_tol
    sign = -1.0 if prob.sense == "max" else 1.0
    c = [sign * ck for ck in prob.c]
    b = prob.b
    ntot = sum(prob.blocks)

    a_norms = [
        np.linalg.norm(mats.reshape(mats.shape[0], -1), axis=1) if rows.size else np.zeros(0)
        for rows, mats in prob.a
    ]
    a_max = max((float(v.max()) for v in a_norms if v.size), default=0.0)
    xi = max(10.0, math.sqrt(ntot), float(np.max((1.0 + np.abs(b)) / (1.0 + a_max), initial=0.0)))
    eta = max(10.0, math.sqrt(ntot), a_max, max(float(np.linalg.norm(ck)) for ck in c))
    x = [xi * np.eye(n) for n in prob.blocks]
    s = [eta * np.eye(n) for n in prob.blocks]
    y = np.zeros(prob.m)

    status = SdpStatus.NUMERICAL_FAILURE
    message = f"iteration limit {max_iter} reached"
    stall = 0
    it = 0
    pinf = dinf = math.inf
    for it in range(max_iter + 1):
        rp = b - _op_a(prob, x)
        aty = _op_at(prob, y)
        rd = [ck - ak - sk for ck, ak, sk in zip(c, aty, s)]
        pobj = _inner(c, x)
        dobj = float(b @ y)
        pinf = float(np.max(np.abs(rp), initial=0.0))
        dinf = max(float(np.max(np.abs(r), initial=0.0)) for r in rd)
        if pinf <= feas_tol and dinf <= feas_tol and abs(pobj - dobj) <= tol:
            status, message = SdpStatus.OPTIMAL, "converged"
            break
        if it == max_iter:
            break
        if float(np.max(np.abs(y), initial=0.0)) > 1e12 or max(float(np.trace(xk)) for xk in x) > 1e12:
            status = SdpStatus.INFEASIBLE
            message = "primal infeasible (dual diverges)" if dobj > 0 else "dual infeasible (primal diverges)"
            break

        mu = _inner(x, s) / ntot
        try:
            sinv = [_spd_inverse(sk) for sk in s]
        except np.linalg.LinAlgError:
            message = "slack matrix lost definiteness"
            break
        schur = _SchurSolver(_schur(prob, x, sinv))
        h = _op_a(prob, [xk @ rk @ sk for xk, rk, sk in zip(x, rd, sinv)])

        def direction(g):
            dy = schur(b - _op_a(prob, g) + h)
            ds = [rk - ak for rk, ak in zip(rd, _op_at(prob, dy))]
            dx = [_sym(gk - xk - xk @ dsk @ sk) for gk, xk, dsk, sk in zip(g, x, ds, sinv)]
            return dx, dy, ds

        try:
            dx_a, dy_a, ds_a = direction([np.zeros_like(xk) for xk in x])
            ap = _step(x, dx_a)
            ad = _step(s, ds_a)
            mu_aff = _inner([xk + ap * d for xk, d in zip(x, dx_a)], [sk + ad * d for sk, d in zip(s, ds_a)]) / ntot
            sigma = min(1.0, max(0.0, mu_aff / mu) ** 3)
            g = [
                (sigma * mu * np.eye(n) - dxk @ dsk) @ sk
                for n, dxk, dsk, sk in zip(prob.blocks, dx_a, ds_a, sinv)
            ]
            dx, dy, ds = direction(g)
            ap = _step(x, dx)
            ad = _step(s, ds)
        except np.linalg.LinAlgError:
            message = "iterate lost definiteness"
            break

        x = [xk + ap * d for xk, d in zip(x, dx)]
        y = y + ad * dy
        s = [sk + ad * d for sk, d in zip(s, ds)]
        stall = stall + 1 if max(ap, ad) < 1e-8 else 0
        if stall >= 3:
            message = "step length stalled"
            break

    pobj = sign * _inner(c, x)
    dobj = sign * float(b @ y)
    sol = SdpSolution(
        x=x,
        y=y,
        s=s,
        primal_obj=pobj,
        dual_obj=dobj,
        gap=abs(pobj - dobj),
        status=status,
        iterations=it,
        primal_residual=pinf,
        dual_residual=dinf,
        message=message,
    )
    log = _RECORDER.get()
    if log is not None:
        log.append((prob, sol))
    return sol


@dataclass(frozen=True)
class Certificate:
    """Optimality evidence recomputed from ``(X, y, S)`` and the problem data."""

    primal_residual: float
    dual_residual: float
    gap: float
    min_eig_x: float
    min_eig_s: float

    def passes(self, tol: float = DEFAULT_TOL, psd_tol: float = 1e-8) -> bool:
        return (
            self.primal_residual <= tol
            and self.dual_residual <= tol
            and self.gap <= tol
            and self.min_eig_x >= -psd_tol
            and self.min_eig_s >= -psd_tol
        )


def check_certificate(prob: SdpProblem, sol: SdpSolution) -> Certificate:
    """Independently recompute residuals and the duality gap of ``sol``."""
    sign = -1.0 if prob.sense == "max" else 1.0
    c = [sign * ck for ck in prob.c]
    rp = prob.b - _op_a(prob, sol.x)
    rd = [ck - ak - sk for ck, ak, sk in zip(c, _op_at(prob, sol.y), sol.s)]
    pobj = _inner(c, sol.x)
    dobj = float(prob.b @ sol.y)
    return Certificate(
        primal_residual=float(np.max(np.abs(rp), initial=0.0)),
        dual_residual=max(float(np.max(np.abs(r), initial=0.0)) for r in rd),
        gap=abs(pobj - dobj),
        min_eig_x=min(float(np.linalg.eigvalsh(xk)[0]) for xk in sol.x),
        min_eig_s=min(float(np.linalg.eigvalsh(sk)[0]) for sk in sol.s),
    )


# ----------------------------------------------------------------------------
# Plain-text interchange (SDPA sparse format)


def dump_problem(prob: SdpProblem, path) -> None:
    """Write ``prob`` in SDPA sparse format (``.dat-s``).

    The SDPA dual ``max F0.Y s.t. Fi.Y = c_i`` is mapped to this module's
    primal with ``F0 = -C`` (``+C`` for ``sense="max"``), ``Fi = A_i`` and
    ``c = b``. Only upper-triangle nonzeros are written.
    """
    sign = 1.0 if prob.sense == "max" else -1.0
    lines = [
        f'"entlaw sdp sense={prob.sense}"',
        str(prob.m),
        str(len(prob.blocks)),
        " ".join(str(n) for n in prob.blocks),
        " ".join(repr(float(v)) for v in prob.b),
    ]

    def emit(matno, blk, mat):
        iu, ju = np.triu_indices(mat.shape[0])
        for i, j in zip(iu, ju):
            v = mat[i, j]
            if v != 0.0:
                lines.append(f"{matno} {blk + 1} {i + 1} {j + 1} {float(v)!r}")

    for k, ck in enumerate(prob.c):
        emit(0, k, sign * ck)
    entries = []
    for k, (rows, mats) in enumerate(prob.a):
        for r, i in enumerate(rows):
            entries.append((int(i), k, mats[r]))
    for i, k, mat in sorted(entries, key=lambda e: (e[0], e[1])):
        emit(i + 1, k, mat)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_problem(path) -> SdpProblem:
    """Inverse of :func:`dump_problem`."""
    with open(path) as fh:
        raw = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("*")]
    sense = "min"
    if raw[0].startswith('"'):
        if "sense=max" in raw[0]:
            sense = "max"
        raw = raw[1:]
    m = int(raw[0])
    nblocks = int(raw[1])
    sizes = [abs(int(v)) for v in raw[2].replace(",", " ").split()][:nblocks]
    b = np.array([float(v) for v in raw[3].replace(",", " ").split()][:m])
    sign = 1.0 if sense == "max" else -1.0
    c = [np.zeros((n, n)) for n in sizes]
    rows: Dict[Tuple[int, int], np.ndarray] = {}
    for line in raw[4:]:
        matno, blk, i, j, v = line.split()
        matno, blk, i, j, v = int(matno), int(blk) - 1, int(i) - 1, int(j) - 1, float(v)
        if matno == 0:
            target = c[blk]
            v *= sign
        else:
            target = rows.setdefault((matno - 1, blk), np.zeros((sizes[blk], sizes[blk])))
        target[i, j] = v
        target[j, i] = v
    a = []
    for k, n in enumerate(sizes):
        idx = sorted(i for (i, kk) in rows if kk == k)
        mats = np.array([rows[(i, k)] for i in idx]).reshape(len(idx), n, n)
        a.append((np.array(idx, dtype=int), mats))
    return SdpProblem(tuple(sizes), tuple(c), tuple(a), b, sense)
