"""Coxeter representations, their joint-spectrum catalog, and rigidity checks.

A Coxeter matrix fixes relations (g_i g_j)^{m_ij} = 1 between involutive
generators.  Dihedral (two-generator) pieces have 1- and 2-dimensional
irreducible representations only; the 2-dimensional ones are parametrized by
an angle and their pair spectra are lines and "complex ellipses" with
explicit equations.  The rigidity pipeline tests whether a candidate matrix
tuple that contains the spectrum of a representation (globally, and locally
near the coordinate points) carries an invariant subspace on which it is a
genuine copy of that representation.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AssignmentError, EmptySubspaceError
from .pencil import MatrixTuple, is_spectral_point, line_roots, opnorm
from .serialize import matrix_to_json

INF = math.inf

ONE_DIM_SIGNS = {
    "one_dim_pp": (1.0, 1.0),
    "one_dim_mm": (-1.0, -1.0),
    "one_dim_pm": (1.0, -1.0),
    "one_dim_mp": (-1.0, 1.0),
}


@dataclass(frozen=True)
class CoxeterMatrix:
    """Symmetric order matrix: m_ii = 1, off-diagonal entries in {2,3,...} or inf."""

    orders: tuple

    def __init__(self, orders):
        rows = tuple(tuple(float(v) for v in row) for row in orders)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("Coxeter matrix must be square")
            if rows[i][i] != 1:
                raise ValueError("Coxeter matrix must have ones on the diagonal")
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("Coxeter matrix must be symmetric")
                if i != j and rows[i][j] < 2:
                    raise ValueError("off-diagonal Coxeter orders must be >= 2")
        object.__setattr__(self, "orders", rows)

    @property
    def n(self):
        return len(self.orders)

    def order(self, i, j):
        return self.orders[i][j]

    def to_json(self):
        return [["inf" if math.isinf(v) else int(v) for v in row] for row in self.orders]

    @classmethod
    def from_json(cls, rows):
        return cls([[INF if v in ("inf", 0) else v for v in row] for row in rows])


def dihedral(m):
    """Coxeter matrix of the two-generator group with product order m."""
    return CoxeterMatrix([[1, m], [m, 1]])


@dataclass(frozen=True)
class DihedralIrrep:
    """Irreducible representation of a dihedral pair in canonical form."""

    kind: str
    angle: float = None

    def __post_init__(self):
        if self.kind == "two_dim":
            if self.angle is None or not (0.0 < self.angle < math.pi):
                raise AssignmentError("two_dim irreps need an angle in (0, pi)")
        elif self.kind not in ONE_DIM_SIGNS:
            raise AssignmentError(f"unknown dihedral irrep kind {self.kind!r}")

    @property
    def dim(self):
        return 2 if self.kind == "two_dim" else 1

    @property
    def generator_matrices(self):
        if self.kind == "two_dim":
            c, s = math.cos(self.angle), math.sin(self.angle)
            g1 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
            g2 = np.array([[c, s], [s, -c]], dtype=complex)
            return g1, g2
        e1, e2 = ONE_DIM_SIGNS[self.kind]
        return (np.array([[e1]], dtype=complex), np.array([[e2]], dtype=complex))


@dataclass(frozen=True)
class SpectrumComponentDescriptor:
    """One irreducible spectrum component of a dihedral pair, by equation.

    shape 'line'/'gen_line' carries a sign pair (s1, s2) for s1 x1 + s2 x2 = 1;
    'ellipse' is x1^2 + 2 c x1 x2 + x2^2 = 1 and 'gen_ellipse_z' is
    x1^2 - x2^2 + 2 c x2 = 1 with c = cos(angle).
    """

    shape: str
    parameters: tuple

    def evaluate(self, x1, x2):
        x1, x2 = complex(x1), complex(x2)
        if self.shape in ("line", "gen_line"):
            s1, s2 = self.parameters
            return s1 * x1 + s2 * x2 - 1.0
        (c,) = self.parameters
        if self.shape == "ellipse":
            return x1 * x1 + 2.0 * c * x1 * x2 + x2 * x2 - 1.0
        if self.shape == "gen_ellipse_z":
            return x1 * x1 - x2 * x2 + 2.0 * c * x2 - 1.0
        raise ValueError(f"unknown shape {self.shape!r}")

    def sample(self, count, rng):
        """Real points on the component (the real trace is always nonempty)."""
        pts = []
        if self.shape in ("line", "gen_line"):
            s1, s2 = self.parameters
            for u in rng.uniform(-1.5, 1.5, size=count):
                pts.append(((1.0 - s2 * u) / s1, u))
        elif self.shape == "ellipse":
            (c,) = self.parameters
            q = np.array([[1.0, c], [c, 1.0]])
            root = scipy.linalg.sqrtm(np.linalg.inv(q)).real
            for th in rng.uniform(0.0, 2.0 * math.pi, size=count):
                v = root @ np.array([math.cos(th), math.sin(th)])
                pts.append((v[0], v[1]))
        else:
            (c,) = self.parameters
            for u in rng.uniform(-1.5, 1.5, size=count):
                x1 = math.sqrt(max(1.0 + u * u - 2.0 * c * u, 0.0))
                pts.append((x1 if rng.uniform() < 0.5 else -x1, u))
        return np.array(pts, dtype=complex)


def dihedral_component_catalog(irrep: DihedralIrrep):
    """Spectrum component descriptors for (g1, g2) and for (g1, g1 g2)."""
    if irrep.kind == "two_dim":
        c = math.cos(irrep.angle)
        return (
            SpectrumComponentDescriptor("ellipse", (c,)),
            SpectrumComponentDescriptor("gen_ellipse_z", (c,)),
        )
    e1, e2 = ONE_DIM_SIGNS[irrep.kind]
    return (
        SpectrumComponentDescriptor("line", (e1, e2)),
        SpectrumComponentDescriptor("gen_line", (e1, e1 * e2)),
    )


def random_unitary(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@dataclass(frozen=True)
class CoxeterRep:
    """Concrete generator matrices of (a candidate for) a Coxeter representation."""

    cm: CoxeterMatrix
    generators: tuple

    @property
    def dim(self):
        return self.generators[0].shape[0]

    @property
    def n(self):
        return len(self.generators)

    def as_tuple(self):
        return MatrixTuple(self.generators)

    def pair(self, i):
        """The (g1, g_i) pair as a matrix tuple (i is 1-based, 2 <= i <= n)."""
        return MatrixTuple([self.generators[0], self.generators[i - 1]])

    def relation_residuals(self):
        res = {}
        for i in range(self.n):
            for j in range(i, self.n):
                m = self.cm.order(i, j)
                if math.isinf(m):
                    continue
                w = self.generators[i] @ self.generators[j]
                res[(i + 1, j + 1)] = opnorm(np.linalg.matrix_power(w, int(m)) - np.eye(self.dim))
        return res


def geometric_representation(cm: CoxeterMatrix):
    """Unitarized reflection representation from the cosine form.

    Only defined for finite type (positive-definite cosine matrix).
    """
    n = cm.n
    b = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m = cm.order(i, j)
            b[i, j] = -math.cos(math.pi / m) if not math.isinf(m) else -1.0
    evs = np.linalg.eigvalsh(b)
    if evs[0] <= 1e-12:
        raise AssignmentError("geometric summand needs a finite-type Coxeter matrix")
    sqrt_b = scipy.linalg.sqrtm(b).real
    inv_sqrt_b = np.linalg.inv(sqrt_b)
    gens = []
    for i in range(n):
        s = np.eye(n) - 2.0 * np.outer(np.eye(n)[i], b[i])
        gens.append((sqrt_b @ s @ inv_sqrt_b).astype(complex))
    return gens


def _block_diag(mats):
    total = sum(m.shape[0] for m in mats)
    out = np.zeros((total, total), dtype=complex)
    pos = 0
    for m in mats:
        k = m.shape[0]
        out[pos : pos + k, pos : pos + k] = m
        pos += k
    return out


def build_representation(cm: CoxeterMatrix, assignment, seed=None):
    """Assemble a representation from summands and validate the relations.

    For two generators the summands are DihedralIrrep values (or
    (kind, angle) pairs); for more generators the named full-group summands
    'geometric', 'trivial' and 'sign' are supported.  A seed conjugates the
    block-diagonal result by a random unitary.  Summands that break a group
    relation (e.g. a two_dim angle that is not 2*pi*k/m) are rejected.
    """
    summands = []
    for spec in assignment:
        if isinstance(spec, DihedralIrrep):
            if cm.n != 2:
                raise AssignmentError("dihedral summands require a two-generator Coxeter matrix")
            summands.append(spec.generator_matrices)
        elif isinstance(spec, str) and spec in ONE_DIM_SIGNS and cm.n == 2:
            summands.append(DihedralIrrep(spec).generator_matrices)
        elif isinstance(spec, (tuple, list)) and len(spec) == 2 and spec[0] == "two_dim":
            if cm.n != 2:
                raise AssignmentError("dihedral summands require a two-generator Coxeter matrix")
            summands.append(DihedralIrrep("two_dim", float(spec[1])).generator_matrices)
        elif spec == "geometric":
            summands.append(geometric_representation(cm))
        elif spec == "trivial":
            summands.append(tuple(np.eye(1, dtype=complex) for _ in range(cm.n)))
        elif spec == "sign":
            summands.append(tuple(-np.eye(1, dtype=complex) for _ in range(cm.n)))
        else:
            raise AssignmentError(f"unsupported summand {spec!r}")

    gens = []
    for k in range(cm.n):
        gens.append(_block_diag([s[k] for s in summands]))
    if seed is not None:
        u = random_unitary(gens[0].shape[0], np.random.default_rng(seed))
        gens = [u @ g @ u.conj().T for g in gens]
    rep = CoxeterRep(cm=cm, generators=tuple(gens))

    for g in rep.generators:
        if opnorm(g @ g - np.eye(rep.dim)) > 1e-10 or opnorm(g - g.conj().T) > 1e-10:
            raise AssignmentError("generators must be unitary involutions")
    for (i, j), r in rep.relation_residuals().items():
        if r > 1e-10:
            raise AssignmentError(
                f"assignment breaks the relation (g{i} g{j})^{cm.order(i - 1, j - 1)} = 1 "
                f"(residual {r:.2e})"
            )
    return rep


def dihedral_pair_decomposition(u1, u2, angle_tol=1e-8):
    """Decompose the representation generated by two unitary involutions.

    Returns a list of (kind, angle, multiplicity) with angle None for the
    one-dimensional kinds.  Grouping uses the rotation u1 u2: eigenvalue
    pairs e^{±i theta} give two_dim(theta) copies; the ±1 eigenspaces split
    one-dimensional characters by the sign of u1 on them.
    """
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    w = u1 @ u2
    t, z = scipy.linalg.schur(w, output="complex")
    evs = np.diag(t)

    out = []
    plus = np.abs(evs - 1.0) <= angle_tol
    minus = np.abs(evs + 1.0) <= angle_tol
    for mask, kinds in ((plus, ("one_dim_pp", "one_dim_mm")), (minus, ("one_dim_pm", "one_dim_mp"))):
        if mask.any():
            basis = z[:, mask]
            restr = basis.conj().T @ u1 @ basis
            signs = np.linalg.eigvalsh((restr + restr.conj().T) / 2.0)
            n_plus = int(np.sum(signs > 0))
            n_minus = int(signs.size - n_plus)
            if n_plus:
                out.append((kinds[0], None, n_plus))
            if n_minus:
                out.append((kinds[1], None, n_minus))

    rest = evs[~(plus | minus)]
    thetas = np.abs(np.angle(rest))
    seen = []
    for th in sorted(thetas):
        for k, (t0, c) in enumerate(seen):
            if abs(th - t0) <= angle_tol:
                seen[k] = (t0, c + 1)
                break
        else:
            seen.append((th, 1))
    for th, c in seen:
        if c % 2 != 0:
            raise ValueError("rotation eigenvalues failed to pair up; inputs may not be involutions")
        out.append(("two_dim", float(th), c // 2))
    out.sort(key=lambda kam: (kam[0], -1.0 if kam[1] is None else kam[1]))
    return out


def check_condition_star(rep: CoxeterRep, angle_tol=1e-8):
    """No irreducible repeats in any (g1, g_i) pair restriction."""
    result = {}
    for i in range(2, rep.n + 1):
        dec = dihedral_pair_decomposition(rep.generators[0], rep.generators[i - 1], angle_tol)
        result[i] = all(mult <= 1 for _, _, mult in dec)
    return result


def _random_direction(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _sample_spectrum_near(tup: MatrixTuple, center, radius, count, rng, tries=None):
    """Points of the proper joint spectrum within the ball |x - center| <= radius."""
    center = np.asarray(center, dtype=complex)
    pts = []
    tries = tries if tries is not None else 8 * count
    for _ in range(tries):
        if len(pts) >= count:
            break
        y = center + 0.4 * radius * _random_direction(rng, tup.n) * rng.uniform()
        u = _random_direction(rng, tup.n)
        roots = line_roots(tup, y, u).finite
        for s in roots:
            p = y + s * u
            if np.linalg.norm(p - center) <= radius:
                pts.append(p)
    return pts[:count]


def check_condition_I(t: MatrixTuple, rep: CoxeterRep, sample_count=200, seed=0, tol=1e-8):
    """Sampled inclusion sigma_p(rep) in sigma_p(t); returns (ok, witness)."""
    if rep.n != t.n:
        raise ValueError("tuple and representation must have the same number of generators")
    rng = np.random.default_rng(seed)
    rep_tup = rep.as_tuple()
    checked = 0
    # random lines through the origin across the full representation spectrum
    for _ in range(4 * sample_count):
        if checked >= sample_count // 2:
            break
        u = _random_direction(rng, t.n)
        for s in line_roots(rep_tup, np.zeros(t.n), u).finite:
            if abs(s) > 4.0:
                continue
            p = s * u
            if not is_spectral_point(t, p, tol):
                return False, p
            checked += 1
    # lines in the coordinate planes of each (g1, g_i) pair
    for _ in range(4 * sample_count):
        if checked >= sample_count:
            break
        i = int(rng.integers(2, rep.n + 1))
        u2 = _random_direction(rng, 2)
        pair = rep.pair(i)
        for s in line_roots(pair, np.zeros(2), u2).finite:
            if abs(s) > 4.0:
                continue
            p = np.zeros(t.n, dtype=complex)
            p[0] = s * u2[0]
            p[i - 1] = s * u2[1]
            if not is_spectral_point(t, p, tol):
                return False, p
            checked += 1
    return True, None


def extended_tuple(t: MatrixTuple):
    """(A_1, ..., A_n, A_1 A_2, ..., A_1 A_n)."""
    a1 = t.matrices[0]
    return MatrixTuple(list(t.matrices) + [a1 @ m for m in t.matrices[1:]])


def check_condition_II(
    t: MatrixTuple, rep: CoxeterRep, epsilon=0.15, sample_count=40, seed=0, tol=1e-8
):
    """Two-sided sampled set equality near the coordinate points.

    For every generator coordinate j and sign, points of either extended
    spectrum inside the epsilon-ball around ±e_j must belong to the other.
    Returns (per-point dict {(j, sign): bool}, witnesses).
    """
    ext_a = extended_tuple(t)
    ext_r = extended_tuple(rep.as_tuple())
    rng = np.random.default_rng(seed)
    results = {}
    witnesses = {}
    for j in range(1, t.n + 1):
        for sign in (1, -1):
            center = np.zeros(ext_a.n, dtype=complex)
            center[j - 1] = sign
            ok = True
            for src, dst in ((ext_r, ext_a), (ext_a, ext_r)):
                for p in _sample_spectrum_near(src, center, epsilon, sample_count, rng):
                    if not is_spectral_point(dst, p, tol):
                        ok = False
                        witnesses[(j, sign)] = p
                        break
                if not ok:
                    break
            results[(j, sign)] = ok
    return results, witnesses


@dataclass(frozen=True)
class InvariantSubspace:
    """Orthonormal basis of the span of the ±1 eigenvectors of A1."""

    basis: np.ndarray
    dim: int
    invariance_residuals: tuple
    restrictions: tuple


def extract_invariant_subspace(t: MatrixTuple, eig_tol=1e-8):
    """L = span of the ±1-eigenvectors of A1, with invariance diagnostics."""
    a1 = t.matrices[0]
    scale = max(1.0, opnorm(a1))
    tri, z = scipy.linalg.schur(np.asarray(a1, dtype=complex), output="complex")
    evs = np.diag(tri)
    mask = (np.abs(evs - 1.0) <= eig_tol * scale) | (np.abs(evs + 1.0) <= eig_tol * scale)
    if not mask.any():
        raise EmptySubspaceError("A1 has no eigenvalues at +1 or -1")
    v = z[:, mask]
    proj = v @ v.conj().T
    eye = np.eye(t.dim)
    residuals = tuple(opnorm((eye - proj) @ m @ proj) for m in t.matrices)
    restrictions = tuple(v.conj().T @ m @ v for m in t.matrices)
    return InvariantSubspace(
        basis=v, dim=int(v.shape[1]), invariance_residuals=residuals, restrictions=restrictions
    )


def recovered_pair_order(u1, u2, max_order=24, tol=1e-8):
    """Smallest m <= max_order with (u1 u2)^m = 1, or None."""
    w = np.asarray(u1, dtype=complex) @ np.asarray(u2, dtype=complex)
    p = np.eye(w.shape[0], dtype=complex)
    for m in range(1, max_order + 1):
        p = p @ w
        if opnorm(p - np.eye(w.shape[0])) <= tol:
            return m
    return None


def exponent_candidates(angle, max_order=24, tol=1e-9):
    """All coprime (k, m) with |angle - 2 pi k / m| <= tol, m <= max_order."""
    out = []
    for m in range(2, max_order + 1):
        for k in range(1, m // 2 + 1):
            if math.gcd(k, m) != 1:
                continue
            if abs(angle - 2.0 * math.pi * k / m) <= tol:
                out.append((k, m))
    return out


@dataclass(frozen=True)
class RestrictionReport:
    """Residuals and spectral comparisons for the restricted tuple."""

    unitary_residuals: tuple
    selfadjoint_residuals: tuple
    relation_residuals: dict
    recovered_orders: dict
    expected_orders: dict
    exponents_ok: bool
    exponent_candidates: dict
    exponent_ambiguous: bool
    spectra_match: bool
    spectra_witness: object


def verify_restriction(sub: InvariantSubspace, cm: CoxeterMatrix, rep: CoxeterRep = None,
                       sample_count=120, seed=0, tol=1e-8):
    """Check the restricted generators are a unitary self-adjoint Coxeter tuple.

    When rep is given, the joint spectra of the restriction and of rep are
    compared by two-sided sampled inclusion, and the pair orders recovered
    from the restriction are compared with the orders of rep's pairs.
    """
    gens = sub.restrictions
    eye = np.eye(sub.dim)
    unit = tuple(opnorm(g.conj().T @ g - eye) for g in gens)
    sa = tuple(opnorm(g - g.conj().T) for g in gens)
    restricted = CoxeterRep(cm=cm, generators=tuple(gens))
    rel = restricted.relation_residuals()

    recovered = {}
    expected = {}
    candidates = {}
    ambiguous = False
    for i in range(2, len(gens) + 1):
        recovered[i] = recovered_pair_order(gens[0], gens[i - 1])
        if rep is not None:
            expected[i] = recovered_pair_order(rep.generators[0], rep.generators[i - 1])
        dec = dihedral_pair_decomposition(gens[0], gens[i - 1])
        angs = [a for kind, a, _ in dec if kind == "two_dim"]
        cands = [exponent_candidates(a) for a in angs]
        candidates[i] = cands
        ambiguous = ambiguous or any(len(c) != 1 for c in cands)
    exponents_ok = rep is None or all(recovered[i] == expected[i] for i in recovered)

    match, witness = True, None
    if rep is not None:
        rt = MatrixTuple(gens)
        ok1, w1 = check_condition_I(rt, rep, sample_count=sample_count, seed=seed, tol=tol)
        rep_as = CoxeterRep(cm=cm, generators=tuple(rt.matrices))
        ok2, w2 = check_condition_I(rep.as_tuple(), rep_as, sample_count=sample_count,
                                    seed=seed + 1, tol=tol)
        match = ok1 and ok2
        witness = w1 if w1 is not None else w2

    return RestrictionReport(
        unitary_residuals=unit,
        selfadjoint_residuals=sa,
        relation_residuals=rel,
        recovered_orders=recovered,
        expected_orders=expected,
        exponents_ok=exponents_ok,
        exponent_candidates=candidates,
        exponent_ambiguous=ambiguous,
        spectra_match=match,
        spectra_witness=witness,
    )


@dataclass(frozen=True)
class EquivalenceEvidence:
    max_discrepancy: float
    words_checked: int
    worst_word: tuple


def equivalence_evidence(generators_a, generators_b, word_length_cap=8):
    """Compare traces of all generator words up to the cap.

    For unitary representations of a finite group whose classes are
    exhausted by short words, equal character tables imply equivalence;
    for infinite groups this is evidence only.
    """
    a = [np.asarray(g, dtype=complex) for g in generators_a]
    b = [np.asarray(g, dtype=complex) for g in generators_b]
    if a[0].shape != b[0].shape or len(a) != len(b):
        raise ValueError("trace comparison needs tuples of equal shape")
    worst = ()
    worst_gap = 0.0
    count = 0
    stack = [((), np.eye(a[0].shape[0], dtype=complex), np.eye(b[0].shape[0], dtype=complex))]
    while stack:
        word, pa, pb = stack.pop()
        if word:
            gap = abs(np.trace(pa) - np.trace(pb))
            count += 1
            if gap > worst_gap:
                worst_gap = gap
                worst = word
        if len(word) < word_length_cap:
            for k in reversed(range(len(a))):
                stack.append((word + (k + 1,), pa @ a[k], pb @ b[k]))
    return EquivalenceEvidence(max_discrepancy=float(worst_gap), words_checked=count, worst_word=worst)


def coxeter_type(cm: CoxeterMatrix):
    """Rough classification: 'dihedral', 'A', 'B', 'D' or 'other'."""
    n = cm.n
    if n == 2:
        return "dihedral" if not math.isinf(cm.order(0, 1)) else "other"
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            m = cm.order(i, j)
            if m > 2:
                edges[(i, j)] = m
    deg = [0] * n
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    labels = sorted(edges.values())
    if any(math.isinf(v) for v in labels) or len(edges) not in (n - 1,):
        return "other"
    if max(deg) <= 2 and deg.count(1) == 2:  # path
        if all(v == 3 for v in labels):
            return "A"
        if labels == [3] * (n - 2) + [4]:
            ends = [k for k in range(n) if deg[k] == 1]
            for (i, j), m in edges.items():
                if m == 4 and (i in ends or j in ends):
                    return "B"
        return "other"
    if max(deg) == 3 and deg.count(3) == 1 and all(v == 3 for v in labels):
        hub = deg.index(3)
        leaf_neighbors = sum(
            1 for (i, j) in edges if (i == hub and deg[j] == 1) or (j == hub and deg[i] == 1)
        )
        if leaf_neighbors >= 2:
            return "D"
    return "other"


def is_nonspecial(cm: CoxeterMatrix):
    return coxeter_type(cm) in ("dihedral", "A", "B", "D")


@dataclass(frozen=True)
class RigidityReport:
    """Everything the rigidity pipeline measured for one candidate tuple."""

    condition_star: dict
    condition_I: bool
    condition_I_witness: object
    condition_II: dict
    condition_II_witnesses: dict
    applicable: bool
    generator_norms: tuple
    norms_ok: bool
    dim_L: int
    L_basis: np.ndarray
    invariance_residuals: tuple
    restriction: RestrictionReport
    equivalence: EquivalenceEvidence
    nonspecial: bool
    seed: int
    epsilon: float
    failure: str = None

    def to_json(self):
        def vec(w):
            return None if w is None else [[complex(v).real, complex(v).imag] for v in w]

        out = {
            "condition_star": {str(k): v for k, v in sorted(self.condition_star.items())},
            "condition_I": self.condition_I,
            "condition_I_witness": vec(self.condition_I_witness),
            "condition_II": {f"{j}{'+' if s > 0 else '-'}": v
                             for (j, s), v in sorted(self.condition_II.items())},
            "condition_II_witnesses": {
                f"{j}{'+' if s > 0 else '-'}": vec(w)
                for (j, s), w in sorted(self.condition_II_witnesses.items())
            },
            "applicable": self.applicable,
            "generator_norms": list(self.generator_norms),
            "norms_ok": self.norms_ok,
            "dim_L": self.dim_L,
            "invariance_residuals": list(self.invariance_residuals),
            "nonspecial": self.nonspecial,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "failure": self.failure,
        }
        if self.L_basis is not None:
            out["L_basis"] = matrix_to_json(self.L_basis)
        if self.restriction is not None:
            out["restriction"] = {
                "unitary_residuals": list(self.restriction.unitary_residuals),
                "selfadjoint_residuals": list(self.restriction.selfadjoint_residuals),
                "relation_residuals": {f"{i},{j}": v for (i, j), v
                                       in sorted(self.restriction.relation_residuals.items())},
                "recovered_orders": {str(k): v for k, v
                                     in sorted(self.restriction.recovered_orders.items())},
                "exponents_ok": self.restriction.exponents_ok,
                "exponent_ambiguous": self.restriction.exponent_ambiguous,
                "spectra_match": self.restriction.spectra_match,
            }
        if self.equivalence is not None:
            out["equivalence"] = {
                "max_discrepancy": self.equivalence.max_discrepancy,
                "words_checked": self.equivalence.words_checked,
                "worst_word": list(self.equivalence.worst_word),
            }
        return out


def rigidity_check(t: MatrixTuple, rep: CoxeterRep, epsilon=0.15, sample_count=120,
                   seed=0, word_length_cap=8, tol=1e-8):
    """Run the full rigidity pipeline for a candidate tuple against rep.

    When the multiplicity-free condition fails the report is marked not
    applicable: the invariant subspace is still extracted for inspection,
    but no representation claim is attached to it.
    """
    norms = tuple(opnorm(m) for m in t.matrices)
    norms_ok = all(abs(v - 1.0) <= 1e-8 for v in norms[1:])
    star = check_condition_star(rep)
    cond1, w1 = check_condition_I(t, rep, sample_count=sample_count, seed=seed, tol=tol)
    cond2, w2 = check_condition_II(t, rep, epsilon=epsilon,
                                   sample_count=max(sample_count // 3, 20),
                                   seed=seed + 1, tol=tol)
    applicable = all(star.values()) and cond1 and all(cond2.values()) and norms_ok

    failure = None
    dim_l = 0
    basis = None
    inv_res = ()
    restriction = None
    equivalence = None
    try:
        sub = extract_invariant_subspace(t)
        dim_l = sub.dim
        basis = sub.basis
        inv_res = sub.invariance_residuals
        restriction = verify_restriction(sub, rep.cm, rep=rep,
                                         sample_count=sample_count, seed=seed + 2, tol=tol)
        if sub.dim == rep.dim:
            equivalence = equivalence_evidence(sub.restrictions, rep.generators,
                                               word_length_cap=word_length_cap)
    except EmptySubspaceError as exc:
        failure = str(exc)

    return RigidityReport(
        condition_star=star,
        condition_I=cond1,
        condition_I_witness=w1,
        condition_II=cond2,
        condition_II_witnesses=w2,
        applicable=applicable,
        generator_norms=norms,
        norms_ok=norms_ok,
        dim_L=dim_l,
        L_basis=basis,
        invariance_residuals=inv_res,
        restriction=restriction,
        equivalence=equivalence,
        nonspecial=is_nonspecial(rep.cm),
        seed=seed,
        epsilon=epsilon,
        failure=failure,
    )
