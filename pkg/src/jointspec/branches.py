"""Spectral resolution of the leading matrix and local branch tracking.

Near a reducibility point the joint spectrum decomposes locally into
analytic branches x_1 = v_j(t) through 1/lambda (or, in the x_1 = 1 chart,
eigenvalue branches through 0 when lambda = 0).  Branches are tracked down
a geometric ladder of the line parameter by nearest-neighbor continuation
and differentiated at 0 by Richardson extrapolation.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import extrapolate
from .errors import (
    BranchCollisionError,
    NotNormalError,
    TrackingError,
    UnknownEigenvalueError,
)
from .pencil import MatrixTuple, det_proper, normality_report, opnorm
from .pencil import slice_roots as _slice_roots
from .serialize import complex_to_pair


def _cluster_values(values, tol):
    """Single-linkage clustering of complex values at absolute tolerance tol."""
    values = np.asarray(values, dtype=complex)
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[pi] = pj
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = [(values[idx].mean(), list(idx)) for idx in groups.values()]
    clusters.sort(key=lambda c: (c[0].real, c[0].imag))
    return clusters


@dataclass(frozen=True)
class SpectralResolution:
    """Distinct eigenvalues of a normal matrix with orthogonal eigenprojections."""

    eigenvalues: np.ndarray
    projections: tuple
    multiplicities: tuple

    def projection_for(self, lam, tol=1e-6):
        i = self.index_of(lam, tol)
        return self.projections[i]

    def index_of(self, lam, tol=1e-6):
        d = np.abs(self.eigenvalues - complex(lam))
        i = int(np.argmin(d))
        if d[i] > tol * (1.0 + abs(lam)):
            raise UnknownEigenvalueError(
                f"{lam} is not an eigenvalue of the resolved matrix (nearest: {self.eigenvalues[i]})"
            )
        return i


def spectral_resolution(a1, cluster_tol=None):
    """Eigenvalue clusters and orthogonal spectral projections of a normal matrix.

    Rejects non-normal input: limit projections can diverge there, and the
    norm-profile diagnostics are the supported path for such matrices.
    """
    a1 = np.asarray(a1, dtype=complex)
    rep = normality_report(a1)
    if not rep.is_normal:
        raise NotNormalError(rep.commutator_norm, rep.tolerance)
    if cluster_tol is None:
        cluster_tol = 1e-8 * max(1.0, opnorm(a1))
    t, z = scipy.linalg.schur(a1, output="complex")
    clusters = _cluster_values(np.diag(t), cluster_tol)
    eigenvalues = np.array([c for c, _ in clusters])
    projections = []
    multiplicities = []
    for _, idx in clusters:
        cols = z[:, idx]
        projections.append(cols @ cols.conj().T)
        multiplicities.append(len(idx))
    return SpectralResolution(eigenvalues, tuple(projections), tuple(multiplicities))


@dataclass(frozen=True)
class TOperator:
    """Reduced resolvent sum_{mu != lambda} P_mu / (lambda - mu)."""

    base_eigenvalue: complex
    matrix: np.ndarray


def t_operator(res: SpectralResolution, lam):
    i = res.index_of(lam)
    lam = complex(res.eigenvalues[i])
    n = res.projections[0].shape[0]
    acc = np.zeros((n, n), dtype=complex)
    for j, mu in enumerate(res.eigenvalues):
        if j == i:
            continue
        acc += res.projections[j] / (lam - mu)
    return TOperator(base_eigenvalue=lam, matrix=acc)


@dataclass(frozen=True)
class Branch:
    """One locally analytic spectrum component through 1/lambda (or 0).

    samples runs down the ladder (largest t first); values are x_1 for the
    nonzero kind and x_{n+1} (the tracked eigenvalue) for the zero kind.
    multiplicity is the size of the coincident-root cluster the branch tracks.
    """

    lam: complex
    kind: str  # "nonzero" | "zero"
    direction: tuple
    index: int
    samples: tuple  # ((t, value), ...) with t decreasing
    multiplicity: int
    d1: complex = None
    d2: complex = None
    d1_error: float = None
    d2_error: float = None
    residuals: tuple = field(default=())

    @property
    def limit_value(self):
        return 0.0 if self.kind == "zero" else 1.0 / self.lam

    def to_json(self):
        return {
            "lambda": complex_to_pair(self.lam),
            "j": self.index,
            "kind": self.kind,
            "direction": [complex_to_pair(v) for v in self.direction],
            "d1": None if self.d1 is None else complex_to_pair(self.d1),
            "d2": None if self.d2 is None else complex_to_pair(self.d2),
            "multiplicity": self.multiplicity,
            "samples": [[t, *complex_to_pair(v)] for t, v in self.samples],
            "residuals": list(self.residuals),
        }


def _reference_spectrum(t: MatrixTuple, cluster_tol=None):
    a1 = t.matrices[0]
    if cluster_tol is None:
        cluster_tol = 1e-8 * max(1.0, opnorm(a1))
    return _cluster_values(np.linalg.eigvals(a1), cluster_tol)


def _match_reference(clusters, lam):
    centers = np.array([c for c, _ in clusters])
    d = np.abs(centers - complex(lam))
    i = int(np.argmin(d))
    if d[i] > 1e-6 * (1.0 + abs(lam)):
        raise UnknownEigenvalueError(
            f"{lam} is not an eigenvalue of A1 (nearest: {centers[i]})"
        )
    return centers[i], len(clusters[i][1])


def _roots_at(t: MatrixTuple, kind, xhat, tval):
    if kind == "zero":
        b = sum(c * m for c, m in zip(xhat, t.matrices[1:]))
        return np.linalg.eigvals(t.matrices[0] + tval * b)
    return _slice_roots(t, xhat, tval).finite


def _det_along(t: MatrixTuple, kind, xhat, tval, v):
    if kind == "zero":
        b = sum(c * m for c, m in zip(xhat, t.matrices[1:]))
        m = t.matrices[0] + tval * b - v * np.eye(t.dim)
        return complex(np.linalg.det(m))
    x = np.concatenate(([v], tval * xhat))
    return det_proper(t, x)


def _sample_residual(t, kind, xhat, tval, v):
    # Newton-step length relative to |v|: a scale-free distance-to-root proxy.
    h = 1e-6 * (1.0 + abs(v))
    f = _det_along(t, kind, xhat, tval, v)
    fp = (_det_along(t, kind, xhat, tval, v + h) - _det_along(t, kind, xhat, tval, v - h)) / (2 * h)
    if fp == 0:
        return float("inf") if f != 0 else 0.0
    return abs(f / fp) / (1.0 + abs(v))


def local_branches(t: MatrixTuple, lam, xhat, t_max=1e-2, samples=8, coincide_tol=None):
    """Track the spectrum branches through 1/lambda (or 0) along the line t*xhat.

    Solves the slice eigenproblem on the geometric ladder t_k = t_max * 2^-k,
    clusters coincident roots (multiplicity), and continues clusters between
    adjacent levels by predicted nearest-neighbor matching.  A match is
    accepted only when the nearest candidate is 4x closer than the second
    nearest; anything else is reported as a branch collision.
    """
    xhat = np.asarray(xhat, dtype=complex).reshape(-1)
    if xhat.shape[0] != t.n - 1:
        raise TrackingError(f"direction must have n-1={t.n - 1} coordinates")
    nrm = np.linalg.norm(xhat)
    if nrm == 0:
        raise TrackingError("direction must be nonzero")
    xhat = xhat / nrm
    if samples < 2:
        raise TrackingError("need at least two ladder levels")

    refs = _reference_spectrum(t)
    lam0, mult_lam = _match_reference(refs, lam)
    kind = "zero" if abs(lam0) <= 1e-9 * max(1.0, opnorm(t.matrices[0])) else "nonzero"
    if kind == "zero":
        center = 0.0 + 0.0j
        others = [c for c, _ in refs if abs(c - lam0) > 0]
        sel_radius = 0.5 * min((abs(c) for c in others), default=1.0 + opnorm(t.matrices[0]))
    else:
        center = 1.0 / lam0
        others = [c for c, _ in refs if abs(c - lam0) > 0 and abs(c) > 1e-12]
        sel_radius = 0.5 * min(
            (abs(1.0 / c - center) for c in others), default=1.0 + abs(center)
        )
    if coincide_tol is None:
        coincide_tol = 1e-6 * (1.0 + abs(center))

    ts = t_max * 2.0 ** (-np.arange(samples))
    levels = []
    for tk in ts:
        roots = _roots_at(t, kind, xhat, tk)
        sel = roots[np.abs(roots - center) <= sel_radius]
        clusters = [(c, len(idx)) for c, idx in _cluster_values(sel, coincide_tol)]
        levels.append(clusters)

    counts = {len(lv) for lv in levels}
    if len(counts) != 1:
        raise TrackingError(
            f"tracked cluster count changed along the ladder: {[len(lv) for lv in levels]}"
        )
    total = sum(sz for _, sz in levels[-1])
    if total != mult_lam:
        raise TrackingError(
            f"found total multiplicity {total} near {center}, expected {mult_lam}"
        )

    # continue clusters coarse -> fine with linear prediction toward the center
    tracks = [[cl] for cl in levels[0]]
    for lv in levels[1:]:
        cands = list(lv)
        used = [False] * len(cands)
        for track in tracks:
            prev, size = track[-1]
            pred = center + 0.5 * (prev - center)
            dists = np.array([abs(c - pred) for c, _ in cands])
            order = np.argsort(dists)
            best = int(order[0])
            if len(cands) > 1 and dists[order[0]] > 0.25 * dists[order[1]]:
                raise BranchCollisionError(
                    f"ambiguous branch continuation near t-level with values "
                    f"{[c for c, _ in cands]}"
                )
            if used[best]:
                raise BranchCollisionError("two tracked branches matched the same root cluster")
            if cands[best][1] != size:
                raise TrackingError("branch multiplicity changed along the ladder")
            used[best] = True
            track.append(cands[best])

    branches = []
    order = sorted(range(len(tracks)), key=lambda i: (tracks[i][0][0].real, tracks[i][0][0].imag))
    for j, i in enumerate(order):
        vals = [c for c, _ in tracks[i]]
        mult = tracks[i][0][1]
        res = tuple(
            _sample_residual(t, kind, xhat, tk, v) for tk, v in zip(ts, vals)
        )
        d1 = d2 = None
        e1 = e2 = None
        if samples >= 5:
            d1, e1 = extrapolate.first_derivative(ts, vals, center)
            d2, e2 = extrapolate.second_derivative(ts, vals, center)
        branches.append(
            Branch(
                lam=complex(lam0),
                kind=kind,
                direction=tuple(xhat.tolist()),
                index=j,
                samples=tuple((float(tk), complex(v)) for tk, v in zip(ts, vals)),
                multiplicity=mult,
                d1=d1,
                d2=d2,
                d1_error=e1,
                d2_error=e2,
                residuals=res,
            )
        )
    return branches


@dataclass(frozen=True)
class DerivativeEstimate:
    d1: complex
    d2: complex
    d1_error: float
    d2_error: float


def branch_derivatives(b: Branch):
    """Richardson-extrapolated derivatives of a branch at t = 0.

    Needs at least 5 ladder samples; the exact limit value (1/lambda or 0)
    anchors the difference quotients.
    """
    if len(b.samples) < 5:
        raise TrackingError("branch derivatives need at least 5 ladder samples")
    ts = np.array([t for t, _ in b.samples])
    vals = [v for _, v in b.samples]
    d1, e1 = extrapolate.first_derivative(ts, vals, b.limit_value)
    d2, e2 = extrapolate.second_derivative(ts, vals, b.limit_value)
    return DerivativeEstimate(d1=d1, d2=d2, d1_error=e1, d2_error=e2)


@dataclass(frozen=True)
class RegularityReport:
    """Numeric proxies for the local regularity conditions at lambda.

    condition_a: every branch tracks a finite simple root cluster.
    condition_b: expanded first derivatives are pairwise distinct, so the
    sheets through the base point are transversal.
    """

    lam: complex
    condition_a: bool
    condition_b: bool
    branch_derivative_gaps: float
    tangency_margin: float
    tangency_ok: bool
    branches: tuple = ()
    failure: str = None

    def to_json(self):
        return {
            "lambda": complex_to_pair(self.lam),
            "condition_a": self.condition_a,
            "condition_b": self.condition_b,
            "branch_derivative_gaps": self.branch_derivative_gaps,
            "tangency_margin": self.tangency_margin,
            "tangency_ok": self.tangency_ok,
            "failure": self.failure,
        }


def check_regularity(t: MatrixTuple, lam, xhat, t_max=1e-2, samples=8, gap_tol=1e-6):
    """Check conditions a) and b) (or their lambda = 0 analogues) along xhat."""
    try:
        branches = local_branches(t, lam, xhat, t_max=t_max, samples=samples)
    except (BranchCollisionError, TrackingError) as exc:
        return RegularityReport(
            lam=complex(lam),
            condition_a=False,
            condition_b=False,
            branch_derivative_gaps=0.0,
            tangency_margin=0.0,
            tangency_ok=False,
            failure=str(exc),
        )

    cond_a = all(b.multiplicity == 1 for b in branches)

    # expand derivatives by multiplicity: a repeated sheet has gap 0
    d1s = []
    for b in branches:
        d1s.extend([b.d1] * b.multiplicity)
    if len(d1s) < 2:
        gap = float("inf")
    else:
        gap = min(
            abs(d1s[i] - d1s[j]) for i in range(len(d1s)) for j in range(i + 1, len(d1s))
        )
    scale = 1.0 + max((abs(d) for d in d1s), default=0.0)
    cond_b = bool(gap > gap_tol * scale)

    if len(branches) < 2:
        margin = 0.0 if not cond_b else float("inf")
    else:
        margin = float("inf")
        for i in range(len(branches)):
            for j in range(i + 1, len(branches)):
                for (tk, vi), (_, vj) in zip(branches[i].samples, branches[j].samples):
                    margin = min(margin, abs(vi - vj) / tk)
    if any(b.multiplicity > 1 for b in branches):
        margin = 0.0

    return RegularityReport(
        lam=branches[0].lam,
        condition_a=cond_a,
        condition_b=cond_b,
        branch_derivative_gaps=float(gap) if np.isfinite(gap) else float("inf"),
        tangency_margin=margin,
        tangency_ok=bool(margin > 1e-6),
        branches=tuple(branches),
    )


def probe_regularity(t: MatrixTuple, lam, n_directions=4, seed=0, **kwargs):
    """check_regularity along several seeded random complex directions.

    For n > 2 a single direction only tests condition b) necessarily, not
    sufficiently; probing many directions tightens (but cannot complete)
    the test.
    """
    rng = np.random.default_rng(seed)
    reports = []
    for _ in range(n_directions):
        v = rng.standard_normal(t.n - 1) + 1j * rng.standard_normal(t.n - 1)
        reports.append(check_regularity(t, lam, v / np.linalg.norm(v), **kwargs))
    return reports
