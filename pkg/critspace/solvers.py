"""Critical points of the squared distance d_f(x) = q(f - x, f - x) on the rank-one varieties.

Three solvers share one reporting path:

- ``binary_eigenvectors``: exact, through the companion matrix of D_01 f.
- ``singular_tuples``: multistart Newton over C on random affine charts.
- ``grassmann_critical_points``: multistart Newton on the chart
  V = Q[:k] + Z·Q[k:] of the Grassmann cone.

Every converged point is re-certified with a chart-free residual, clustered
projectively and scored against H_f.
"""

from typing import Callable, List, Literal, NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, Field

from .codec import TensorDocument, decode_complex, encode_complex
from .config import SolverConfig
from .critical_space import (
    GeneratorSet,
    coordinates,
    eigen_minor_residual,
    from_coordinates,
    generators_for,
    inner,
    membership_residual,
    minor_residual,
    norm,
    rotation_generator,
)
from .exterior import AlternatingTensor, decomposable, tangent_frame
from .tensor_core import PSTensor, VectorTuple, fix_phase, gradient_contraction, gradient_hessian, rank_one

Tensor = Union[PSTensor, AlternatingTensor]
ProgressCallback = Callable[[int, int, str], None]
LogCallback = Callable[[str], None]

ISOTROPIC_TOL = 1e-10
DEGENERATE_TOL = 1e-8
DIVERGENCE_BOUND = 1e8


class OrbitDegenerateError(ValueError):
    """D_01 f vanishes identically: f is fixed by the rotation group."""


class CriticalPointReport(BaseModel):
    kind: Literal["eigenvector", "singular_tuple", "plane", "approximant"]
    point: List[List[List[float]]] = Field(default_factory=list)
    approximant: Optional[TensorDocument] = None
    first_order_residual: float = Field(ge=0)
    membership_residual: float = Field(ge=0)
    rescaling_residual: Optional[float] = None
    scale: Optional[List[float]] = None
    cluster_size: int = 1
    seed: int = 0
    restart_index: int = 0
    isotropic: bool = False
    real: bool = False
    distance: Optional[float] = None
    stationarity: Optional[float] = None
    converged: Optional[bool] = None

    def vectors(self) -> List[np.ndarray]:
        return [decode_complex(v) for v in self.point]


class SolverDiagnostics(BaseModel):
    restarts: int = 0
    converged: int = 0
    diverged: int = 0
    uncertified: int = 0
    certified: int = 0
    degenerate: int = 0
    clusters: int = 0


class SolveResult(BaseModel):
    """Non-isotropic critical points, the isotropic bucket and restart bookkeeping."""

    points: List[CriticalPointReport] = Field(default_factory=list)
    isotropic: List[CriticalPointReport] = Field(default_factory=list)
    diagnostics: SolverDiagnostics = Field(default_factory=SolverDiagnostics)
    config: Optional[SolverConfig] = None

    @property
    def all_points(self) -> List[CriticalPointReport]:
        return self.points + self.isotropic

    @property
    def count(self) -> int:
        return len(self.points) + len(self.isotropic)

    @property
    def total_multiplicity(self) -> int:
        return sum(p.cluster_size for p in self.all_points)


# --- projective clustering -------------------------------------------------


class ProjectiveCluster(NamedTuple):
    representative: int
    members: tuple

    @property
    def size(self) -> int:
        return len(self.members)


def fubini_study(u, v) -> float:
    """Angle between the complex lines through u and v, in [0, π/2]."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    overlap = np.vdot(u, v)
    perp = np.linalg.norm(v - overlap * u)
    return float(np.arctan2(perp, abs(overlap)))


def point_distance(a: Sequence, b: Sequence) -> float:
    """Max over factors of the Fubini–Study distance."""
    if len(a) != len(b):
        raise ValueError("points live in different products of projective spaces")
    return max(fubini_study(u, v) for u, v in zip(a, b))


def dedupe_projective(points: Sequence[Sequence], tol: float) -> List[ProjectiveCluster]:
    """Greedy clustering in input order; each cluster is represented by its medoid."""
    groups: List[List[int]] = []
    for idx, pt in enumerate(points):
        for group in groups:
            if point_distance(points[group[0]], pt) <= tol:
                group.append(idx)
                break
        else:
            groups.append([idx])
    clusters = []
    for group in groups:
        if len(group) == 1:
            clusters.append(ProjectiveCluster(group[0], tuple(group)))
            continue
        spread = [sum(point_distance(points[i], points[j]) for j in group) for i in group]
        clusters.append(ProjectiveCluster(group[int(np.argmin(spread))], tuple(group)))
    return clusters


# --- shared reporting ------------------------------------------------------


class _Candidate(NamedTuple):
    restart_index: int
    key: List[np.ndarray]
    vectors: List[np.ndarray]
    x: Tensor
    residual: float


def _is_real(key: Sequence[np.ndarray], tol: float) -> bool:
    return point_distance(key, VectorTuple(key).conjugate().vectors) <= tol


def _report(
    kind: str,
    cand: _Candidate,
    f: Tensor,
    gens: GeneratorSet,
    cfg_seed: int,
    dedupe_tol: float,
    cluster_size: int,
) -> CriticalPointReport:
    x = cand.x
    qxx = inner(x, x)
    isotropic = abs(qxx) <= ISOTROPIC_TOL * norm(x) ** 2
    scale = rescaling = None
    if not isotropic:
        lam = inner(x, f) / qxx
        scale = [float(lam.real), float(lam.imag)]
        rescaled = x * lam
        denom = norm(rescaled) * norm(f)
        rescaling = abs(inner(rescaled, rescaled - f)) / denom if denom > 0 else 0.0
    return CriticalPointReport(
        kind=kind,
        point=[encode_complex(v) for v in cand.vectors],
        first_order_residual=cand.residual,
        membership_residual=membership_residual(x, f, gens),
        rescaling_residual=rescaling,
        scale=scale,
        cluster_size=cluster_size,
        seed=cfg_seed,
        restart_index=cand.restart_index,
        isotropic=isotropic,
        real=_is_real(cand.key, dedupe_tol),
    )


def _is_degenerate(report: CriticalPointReport, x: Tensor, f: Tensor) -> bool:
    """λx collapses to the cone vertex."""
    if report.scale is None:
        return False
    lam = complex(*report.scale)
    return abs(lam) * norm(x) <= DEGENERATE_TOL * norm(f)


def _assemble(
    kind: str,
    f: Tensor,
    candidates: List[_Candidate],
    gens: GeneratorSet,
    seed: int,
    dedupe_tol: float,
    diagnostics: SolverDiagnostics,
    drop_degenerate: bool = True,
) -> SolveResult:
    clusters = dedupe_projective([c.key for c in candidates], dedupe_tol)
    diagnostics.clusters = len(clusters)
    result = SolveResult(diagnostics=diagnostics)
    for cluster in clusters:
        cand = candidates[cluster.representative]
        report = _report(kind, cand, f, gens, seed, dedupe_tol, cluster.size)
        if drop_degenerate and _is_degenerate(report, cand.x, f):
            diagnostics.degenerate += 1
            continue
        (result.isotropic if report.isotropic else result.points).append(report)
    return result


def _newton_step(jac: np.ndarray, residual: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(jac, -residual)
    except np.linalg.LinAlgError:
        return scipy.linalg.lstsq(jac, -residual)[0]


def _complex_normal(rng: np.random.Generator, *size: int) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


# --- binary forms ----------------------------------------------------------


def binary_eigenvectors(f: PSTensor, dedupe_tol: float = 1e-6, root_tol: float = 1e-12) -> SolveResult:
    """All eigenvectors of a binary form, as the roots of D_01 f in P^1.

    D_01 f = Σ_j c_j x0^{d-j} x1^j. Trailing coefficients below ``root_tol``
    (relative) are roots at [0:1]; the rest come from the companion matrix of
    the dehomogenization in t = x1/x0. Cluster sizes carry the multiplicity,
    so ``total_multiplicity`` is d.

    Raises:
        OrbitDegenerateError: if D_01 f vanishes identically.
    """
    if not isinstance(f, PSTensor) or f.shape.k != 1 or f.shape.dims != (2,):
        raise ValueError("binary_eigenvectors needs a binary form (one factor of dimension 2)")
    d = f.shape.degrees[0]
    if d < 1:
        raise ValueError("cannot differentiate degree 0")
    if not np.any(f.coeffs):
        raise ValueError("f must be nonzero")

    coeffs = rotation_generator(f, 0, 0, 1).flat
    if np.max(np.abs(coeffs)) <= root_tol * d * np.max(np.abs(f.coeffs)):
        raise OrbitDegenerateError("f is orbit-degenerate: D01 f vanishes identically")

    floor = root_tol * np.max(np.abs(coeffs))
    at_infinity = 0
    while at_infinity < d and abs(coeffs[d - at_infinity]) <= floor:
        at_infinity += 1
    finite = coeffs[: d + 1 - at_infinity]

    roots: List[np.ndarray] = []
    if finite.size > 1:
        for t in np.linalg.eigvals(P.polycompanion(finite)):
            roots.append(fix_phase(np.array([1.0, t])))
    roots.extend(np.array([0.0, 1.0], dtype=complex) for _ in range(at_infinity))

    gens = generators_for(f)
    candidates = [
        _Candidate(0, [v], [v], rank_one(VectorTuple([v]), f.shape), eigen_minor_residual(f, v)) for v in roots
    ]
    diagnostics = SolverDiagnostics(certified=len(candidates), converged=len(candidates))
    return _assemble("eigenvector", f, candidates, gens, 0, dedupe_tol, diagnostics, drop_degenerate=False)


# --- singular tuples -------------------------------------------------------


def tuple_residual(f: PSTensor, t: VectorTuple) -> float:
    """max_p of the normalized 2×2 minors of (∇_p f(t), v_p)."""
    return max(minor_residual(gradient_contraction(f, t, p), t[p]) for p in range(t.k))


class _TupleChart(NamedTuple):
    charts: List[np.ndarray]
    covectors: List[np.ndarray]
    projections: List[np.ndarray]


def _tuple_system(f: PSTensor, z: np.ndarray, offsets: np.ndarray, chart: _TupleChart):
    dims = np.diff(offsets)
    vs = [z[offsets[p]:offsets[p + 1]] for p in range(len(dims))]
    grads, hessian = gradient_hessian(f, VectorTuple(vs))
    size = offsets[-1]
    rows, jac = [], []
    for p, v in enumerate(vs):
        block = slice(offsets[p], offsets[p + 1])
        g, m, proj = grads[p], chart.covectors[p], chart.projections[p]
        s = m @ v
        mg = m @ g
        lam = mg / s
        G = hessian[block, :]
        E = np.zeros((dims[p], size), dtype=complex)
        E[:, block] = np.eye(dims[p])
        dlam = (m @ G) / s - mg * (m @ E) / s**2
        dr = G - np.outer(v, dlam) - lam * E
        rows.append(np.concatenate([[chart.charts[p] @ v - 1], proj @ (g - lam * v)]))
        jac.append(np.vstack([chart.charts[p] @ E, proj @ dr]))
    return np.concatenate(rows), np.vstack(jac)


def _solve_tuple(f: PSTensor, rng: np.random.Generator, cfg: SolverConfig):
    """One restart. Returns (tuple or None, converged)."""
    dims = f.shape.dims
    offsets = np.concatenate([[0], np.cumsum(dims)])
    chart = _TupleChart(
        charts=[_complex_normal(rng, n) for n in dims],
        covectors=[_complex_normal(rng, n) for n in dims],
        projections=[_complex_normal(rng, n - 1, n) for n in dims],
    )
    vs = []
    for p, n in enumerate(dims):
        v = _complex_normal(rng, n)
        vs.append(v / (chart.charts[p] @ v))
    z = np.concatenate(vs)
    converged = False
    for _ in range(cfg.max_iters):
        try:
            residual, jac = _tuple_system(f, z, offsets, chart)
        except (ValueError, ZeroDivisionError):
            return None, False
        if not (np.all(np.isfinite(residual)) and np.all(np.isfinite(jac))):
            return None, False
        step = _newton_step(jac, residual)
        z = z + step
        if not np.all(np.isfinite(z)) or np.linalg.norm(z) > DIVERGENCE_BOUND:
            return None, False
        if np.linalg.norm(step) <= cfg.newton_tol * max(1.0, np.linalg.norm(z)):
            converged = True
            break
    try:
        return VectorTuple([z[offsets[p]:offsets[p + 1]] for p in range(len(dims))]), converged
    except ValueError:
        return None, False


def singular_tuples(
    f: PSTensor,
    cfg: Optional[SolverConfig] = None,
    on_log: Optional[LogCallback] = None,
    on_progress: Optional[ProgressCallback] = None,
) -> SolveResult:
    """Complex singular tuples of f by multistart Newton.

    Per restart and factor p the unknown v_p satisfies the chart equation
    ℓ_p·v_p = 1 and B_p(∇_p f - λ_p v_p) = 0 with λ_p = m_p·∇_p f / m_p·v_p;
    ℓ_p, m_p and B_p are drawn from the restart's RNG stream.

    Args:
        f: partially symmetric tensor with every degree at least 1
        cfg: solver settings; restart r draws from (master_seed, r)
        on_log: Logging callback for messages
        on_progress: Progress callback (done, total, description)

    Returns:
        SolveResult with certified, deduplicated tuples
    """
    cfg = cfg or SolverConfig()
    if not isinstance(f, PSTensor):
        raise ValueError("singular_tuples needs a partially symmetric tensor")
    if any(d < 1 for d in f.shape.degrees):
        raise ValueError("cannot differentiate degree 0")
    if not np.any(f.coeffs):
        raise ValueError("f must be nonzero")

    diagnostics = SolverDiagnostics(restarts=cfg.restarts)
    candidates: List[_Candidate] = []
    for r in range(cfg.restarts):
        t, converged = _solve_tuple(f, cfg.restart_rng(r), cfg)
        if t is not None:
            residual = tuple_residual(f, t)
            if residual <= cfg.certify_tol:
                diagnostics.certified += 1
                diagnostics.converged += 1
                unit = t.normalized()
                candidates.append(_Candidate(r, list(unit), list(unit), rank_one(unit, f.shape), residual))
            elif converged:
                diagnostics.converged += 1
                diagnostics.uncertified += 1
            else:
                diagnostics.diverged += 1
        else:
            diagnostics.diverged += 1
        if on_progress:
            on_progress(r + 1, cfg.restarts, "restarts")

    result = _assemble("singular_tuple", f, candidates, generators_for(f), cfg.master_seed, cfg.dedupe_tol, diagnostics)
    result.config = cfg
    if on_log:
        on_log(
            f"{f.shape.label()}: {diagnostics.certified}/{cfg.restarts} restarts certified, "
            f"{len(result.points)} points, {len(result.isotropic)} isotropic"
        )
    return result


# --- Grassmann planes ------------------------------------------------------


def grassmann_residual(f: AlternatingTensor, vs) -> float:
    """Tangency residual: normalized minors of (q(f, τ), q(w, τ)) over the tangent frame τ at w."""
    vs = np.atleast_2d(np.asarray(vs, dtype=complex))
    frame = tangent_frame(vs)
    w = decomposable(vs).coeffs
    return minor_residual(frame @ f.coeffs, frame @ w)


def _replaced(mat: np.ndarray, rows: dict) -> np.ndarray:
    out = mat.copy()
    for idx, row in rows.items():
        out[idx] = row
    return out


def _grassmann_system(f: np.ndarray, z: np.ndarray, frame: np.ndarray, k: int):
    m = frame.shape[0] - k
    km = k * m
    Z = z[:km].reshape(k, m)
    sigma = z[km]
    V = frame[:k] + Z @ frame[k:]
    pairs = [(a, b) for a in range(k) for b in range(m)]
    w = decomposable(V).coeffs
    taus = np.array([decomposable(_replaced(V, {a: frame[k + b]})).coeffs for a, b in pairs])
    second = np.zeros((km, km, w.size), dtype=complex)
    for i1, (a, b) in enumerate(pairs):
        for i2 in range(i1 + 1, km):
            c, d = pairs[i2]
            if c != a:
                second[i1, i2] = second[i2, i1] = decomposable(_replaced(V, {a: frame[k + b], c: frame[k + d]})).coeffs

    tf, tw = taus @ f, taus @ w
    residual = np.concatenate([tf - sigma * tw, [f @ w - sigma * (w @ w)]])
    jac = np.zeros((km + 1, km + 1), dtype=complex)
    jac[:km, :km] = second @ f - sigma * (taus @ taus.T + second @ w)
    jac[:km, km] = -tw
    jac[km, :km] = tf - 2 * sigma * tw
    jac[km, km] = -(w @ w)
    return residual, jac, V


def _solve_plane(f: AlternatingTensor, k: int, rng: np.random.Generator, cfg: SolverConfig):
    n1 = f.n_plus_1
    frame = _complex_normal(rng, n1, n1)
    Z = _complex_normal(rng, k, n1 - k)
    V = frame[:k] + Z @ frame[k:]
    w = decomposable(V).coeffs
    ww = w @ w
    sigma = (f.coeffs @ w) / ww if abs(ww) > 0 else 1.0
    z = np.concatenate([Z.ravel(), [sigma]])
    converged = False
    for _ in range(cfg.max_iters):
        residual, jac, V = _grassmann_system(f.coeffs, z, frame, k)
        if not (np.all(np.isfinite(residual)) and np.all(np.isfinite(jac))):
            return None, False
        step = _newton_step(jac, residual)
        z = z + step
        if not np.all(np.isfinite(z)) or np.linalg.norm(z) > DIVERGENCE_BOUND:
            return None, False
        if np.linalg.norm(step) <= cfg.newton_tol * max(1.0, np.linalg.norm(z)):
            converged = True
            break
    km = k * (n1 - k)
    V = frame[:k] + z[:km].reshape(k, n1 - k) @ frame[k:]
    return V, converged


def orthonormal_rows(V: np.ndarray) -> np.ndarray:
    """A Hermitian-orthonormal basis (as rows) of the row space of V."""
    q, _ = np.linalg.qr(np.asarray(V, dtype=complex).T)
    return q.T


def grassmann_critical_points(
    f: AlternatingTensor,
    k: Optional[int] = None,
    cfg: Optional[SolverConfig] = None,
    on_log: Optional[LogCallback] = None,
    on_progress: Optional[ProgressCallback] = None,
) -> SolveResult:
    """Critical k-planes of d_f on the Grassmann cone by multistart Newton.

    Unknowns are the chart matrix Z and the scalar σ; the equations are
    q(f - σw, τ) = 0 for the chart tangent vectors τ and for τ = w itself.
    Points are certified with ``grassmann_residual`` and deduplicated on
    their Plücker vectors.
    """
    cfg = cfg or SolverConfig()
    if not isinstance(f, AlternatingTensor):
        raise ValueError("grassmann_critical_points needs an alternating tensor")
    k = f.k if k is None else k
    if k != f.k:
        raise ValueError(f"exterior power mismatch: f lives in degree {f.k}, asked for k={k}")
    if not 1 <= k < f.n_plus_1:
        raise ValueError(f"k must satisfy 1 <= k <= n, got k={k}, n+1={f.n_plus_1}")
    if not np.any(f.coeffs):
        raise ValueError("f must be nonzero")

    diagnostics = SolverDiagnostics(restarts=cfg.restarts)
    candidates: List[_Candidate] = []
    for r in range(cfg.restarts):
        V, converged = _solve_plane(f, k, cfg.restart_rng(r), cfg)
        if V is None:
            diagnostics.diverged += 1
        else:
            rows = orthonormal_rows(V)
            residual = grassmann_residual(f, rows)
            w = decomposable(rows)
            if residual <= cfg.certify_tol and np.any(w.coeffs):
                diagnostics.certified += 1
                diagnostics.converged += 1
                key = fix_phase(w.coeffs)
                candidates.append(_Candidate(r, [key], list(rows), w, residual))
            elif converged:
                diagnostics.converged += 1
                diagnostics.uncertified += 1
            else:
                diagnostics.diverged += 1
        if on_progress:
            on_progress(r + 1, cfg.restarts, "restarts")

    result = _assemble("plane", f, candidates, generators_for(f), cfg.master_seed, cfg.dedupe_tol, diagnostics)
    result.config = cfg
    if on_log:
        on_log(f"∧{k} C{f.n_plus_1}: {diagnostics.certified}/{cfg.restarts} restarts certified, {len(result.points)} planes")
    return result


# --- real points -----------------------------------------------------------


def point_tensor(report: CriticalPointReport, f: Tensor) -> Tensor:
    """The unscaled point on the cone described by ``report``."""
    if report.kind == "plane":
        return decomposable(report.vectors())
    if report.kind == "approximant":
        raise ValueError("approximant reports carry their tensor directly")
    return rank_one(VectorTuple(report.vectors()), f.shape)


def closest_real_point(result: SolveResult, f: Tensor) -> Optional[CriticalPointReport]:
    """Among real non-isotropic critical points, the one whose λ-rescaling is nearest to f.

    The returned report has ``distance`` set to |f - λx|. None when no real
    point was found.
    """
    best: Optional[CriticalPointReport] = None
    for report in result.points:
        if not report.real:
            continue
        x = point_tensor(report, f)
        x = from_coordinates(f, fix_phase(coordinates(x)).real)
        qxx = inner(x, x)
        if abs(qxx) == 0:
            continue
        lam = inner(x, f) / qxx
        distance = norm(f - x * lam)
        if best is None or distance < best.distance:
            best = report.model_copy(update={"distance": float(distance)})
    return best
