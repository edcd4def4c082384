"""Best rank-q approximation of ordinary tensors by alternating least squares.

Only the all-degrees-1 (Segre) case: there the Frobenius weights are all 1 and
the raw coefficient array is the tensor itself.
"""

from functools import reduce
from typing import Callable, List, Optional

import numpy as np
import scipy.linalg

from .codec import encode_complex, tensor_to_document
from .config import SolverConfig
from .critical_space import generators_for, membership_residual
from .solvers import CriticalPointReport
from .tensor_core import PSTensor

RIDGE = 1e-12


def unfold(X: np.ndarray, n: int) -> np.ndarray:
    """Mode-n matricization, remaining modes in C order."""
    return np.moveaxis(X, n, 0).reshape(X.shape[n], -1)


def khatri_rao(matrices: List[np.ndarray]) -> np.ndarray:
    return reduce(scipy.linalg.khatri_rao, matrices)


def full(factors: List[np.ndarray]) -> np.ndarray:
    """Σ_r u_r ⊗ v_r ⊗ ... from factor matrices with one column per term."""
    rank = factors[0].shape[1]
    out = np.zeros(tuple(u.shape[0] for u in factors))
    for r in range(rank):
        out += reduce(np.multiply.outer, [u[:, r] for u in factors])
    return out


def rebalance(factors: List[np.ndarray]) -> List[np.ndarray]:
    """Equalize column norms across modes without changing the represented tensor."""
    norms = np.array([np.linalg.norm(u, axis=0) for u in factors])
    total = np.prod(norms, axis=0)
    target = np.where(total > 0, total, 1.0) ** (1.0 / len(factors))
    safe = np.where(norms > 0, norms, 1.0)
    return [u * (target / safe[n]) for n, u in enumerate(factors)]


def _solve_normal(grams: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve U·grams = rhs via Cholesky with a small ridge; lstsq on failure."""
    ridged = grams + RIDGE * np.eye(grams.shape[0])
    try:
        c = scipy.linalg.cho_factor(ridged, overwrite_a=False)
        return scipy.linalg.cho_solve(c, rhs.T, overwrite_b=False).T
    except np.linalg.LinAlgError:
        return scipy.linalg.lstsq(ridged, rhs.T)[0].T


def stationarity(X: np.ndarray, factors: List[np.ndarray]) -> float:
    """max_n |∂/∂U_n ½|X̂ - X|²| normalized by |X|·|KR_n|."""
    diff = full(factors) - X
    nx = np.linalg.norm(X)
    worst = 0.0
    for n in range(X.ndim):
        kr = khatri_rao([factors[j] for j in range(X.ndim) if j != n])
        scale = nx * np.linalg.norm(kr)
        if scale > 0:
            worst = max(worst, float(np.linalg.norm(unfold(diff, n) @ kr) / scale))
    return worst


def _fit(X: np.ndarray, rank: int, rng: np.random.Generator, cfg: SolverConfig):
    normX = np.linalg.norm(X)
    factors = [rng.standard_normal((dim, rank)) for dim in X.shape]
    previous = np.inf
    converged = False
    for _ in range(cfg.max_iters):
        for n in range(X.ndim):
            factors = rebalance(factors)
            components = [factors[j] for j in range(X.ndim) if j != n]
            grams = np.prod([u.T @ u for u in components], axis=0)
            factors[n] = _solve_normal(grams, unfold(X, n) @ khatri_rao(components))
        error = np.linalg.norm(full(factors) - X) / normX
        if abs(previous - error) <= cfg.newton_tol * max(1.0, error) or error <= cfg.newton_tol:
            converged = True
            break
        previous = error
    return factors, float(np.linalg.norm(full(factors) - X) / normX), converged


def cp_als(
    f: PSTensor,
    rank: int,
    cfg: Optional[SolverConfig] = None,
    on_log: Optional[Callable[[str], None]] = None,
) -> CriticalPointReport:
    """Fits a rank-``rank`` CP model to a real tensor with every degree 1.

    Each of ``cfg.restarts`` Gaussian initializations runs until the relative
    fit changes by at most ``cfg.newton_tol`` or ``cfg.max_iters`` sweeps; the
    best fit wins.

    Args:
        f: real tensor of an ordinary (all degrees 1) shape
        rank: number of rank-one terms, at least 1
        cfg: solver settings; initialization r draws from (master_seed, r)
        on_log: Logging callback for messages

    Returns:
        CriticalPointReport with the approximant, its stationarity residual and
        its membership residual against H_f
    """
    cfg = cfg or SolverConfig()
    if not isinstance(f, PSTensor) or any(d != 1 for d in f.shape.degrees):
        raise ValueError("cp_als needs an ordinary tensor: every degree must be 1")
    if f.shape.k < 2:
        raise ValueError("cp_als needs at least two factors")
    if rank < 1:
        raise ValueError("rank must be at least 1")
    scale = np.max(np.abs(f.coeffs))
    if scale == 0:
        raise ValueError("f must be nonzero")
    if np.max(np.abs(f.coeffs.imag)) > 1e-14 * scale:
        raise ValueError("cp_als works over the reals; f has complex coefficients")
    X = np.ascontiguousarray(f.coeffs.real)

    best = None
    for r in range(cfg.restarts):
        factors, error, converged = _fit(X, rank, cfg.restart_rng(r), cfg)
        if best is None or error < best[1]:
            best = (factors, error, converged, r)
    factors, error, converged, index = best
    if on_log:
        on_log(f"{f.shape.label()} rank {rank}: relative error {error:.3e}, converged={converged}")

    approximant = f.like(full(factors))
    stat = stationarity(X, factors)
    return CriticalPointReport(
        kind="approximant",
        point=[encode_complex(u[:, t]) for t in range(rank) for u in factors],
        approximant=tensor_to_document(approximant),
        first_order_residual=stat,
        membership_residual=membership_residual(approximant, f, generators_for(f)),
        seed=cfg.master_seed,
        restart_index=index,
        real=True,
        distance=error * float(np.linalg.norm(X)),
        stationarity=stat,
        converged=converged,
    )
