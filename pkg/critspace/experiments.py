"""Seeded random instances, verification campaigns and their reports.

A campaign expands into a grid of instances ordered by (shape index, sample
index). Instance seeds are derived from (master_seed, shape index, sample
index), so the report is a pure function of the campaign definition and the
master seed. Instances run on worker threads bounded by a semaphore and are
gathered back in grid order.
"""

import asyncio
import csv
import time
from functools import partial
from itertools import product
from math import comb, factorial
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, computed_field

from . import frobenius
from .als import cp_als
from .config import Campaign, ExteriorShape, FlagRange
from .critical_space import (
    apply_generator,
    eigen_minor_residual,
    generators_for,
    inner,
    membership_residual,
    norm,
    orbit_dimension,
)
from .ed_degree import (
    FlagWeight,
    binary_segre_veronese_eddegree,
    flag_degree,
    flag_dimension,
    flag_euler_characteristic,
    flag_hilbert,
    hilbert_top_difference,
    so_dimension,
)
from .exterior import AlternatingTensor, decomposable, gram_inner
from .solvers import (
    OrbitDegenerateError,
    binary_eigenvectors,
    closest_real_point,
    dedupe_projective,
    grassmann_critical_points,
    singular_tuples,
)
from .tensor_core import PSTensor, Shape, VectorTuple, rank_one

SCHEMA_VERSION = 1
ALS_CONVERGED_FRACTION = 0.95
Field_ = Literal["real", "complex"]
Status = Literal["pass", "fail", "inconclusive", "excluded"]


class InstanceRecord(BaseModel):
    shape: str
    shape_index: int
    sample_index: int
    seed: int
    status: Status
    count: Optional[int] = None
    expected_count: Optional[int] = None
    max_membership_residual: Optional[float] = None
    max_first_order_residual: Optional[float] = None
    detail: str = ""


class CampaignReport(BaseModel):
    """Per-instance records plus aggregate pass rates; wall-clock stays out of the JSON."""

    schema_version: int = SCHEMA_VERSION
    campaign: str
    kind: str
    master_seed: int
    records: List[InstanceRecord] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    thresholds_met: bool = True
    wall_clock_seconds: float = Field(default=0.0, exclude=True)

    @computed_field
    @property
    def status_counts(self) -> Dict[str, int]:
        counts = {"pass": 0, "fail": 0, "inconclusive": 0, "excluded": 0}
        for record in self.records:
            counts[record.status] += 1
        return counts

    @computed_field
    @property
    def pass_rate(self) -> float:
        considered = [r for r in self.records if r.status != "excluded"]
        if not considered:
            return 1.0
        return sum(r.status == "pass" for r in considered) / len(considered)

    @computed_field
    @property
    def passed(self) -> bool:
        return self.thresholds_met and self.status_counts["fail"] == 0


# --- random instances ------------------------------------------------------


def instance_seed(master_seed: int, shape_index: int, sample_index: int) -> int:
    return int(np.random.SeedSequence([master_seed, shape_index, sample_index]).generate_state(1, np.uint64)[0])


def _gaussian(rng: np.random.Generator, size: int, field: Field_) -> np.ndarray:
    coords = rng.standard_normal(size).astype(complex)
    if field == "complex":
        coords = coords + 1j * rng.standard_normal(size)
    return coords / np.linalg.norm(coords)


def random_tensor(shape: Shape, seed: int, field: Field_ = "real") -> PSTensor:
    """Gaussian coordinates in the weighted basis, normalized to Hermitian norm 1."""
    rng = np.random.default_rng(seed)
    return frobenius.from_weighted_coordinates(shape, _gaussian(rng, shape.basis_size, field))


def random_alternating(n_plus_1: int, k: int, seed: int, field: Field_ = "real") -> AlternatingTensor:
    rng = np.random.default_rng(seed)
    return AlternatingTensor(n_plus_1, k, _gaussian(rng, comb(n_plus_1, k), field))


def random_vectors(dims, rng: np.random.Generator, field: Field_ = "complex") -> List[np.ndarray]:
    return [_gaussian(rng, n, field) for n in dims]


# --- instances -------------------------------------------------------------

InstanceFn = Callable[[], InstanceRecord]


def _record(label: str, shape_index: int, sample_index: int, seed: int, **fields) -> InstanceRecord:
    return InstanceRecord(shape=label, shape_index=shape_index, sample_index=sample_index, seed=seed, **fields)


def _worst(values) -> Optional[float]:
    values = list(values)
    return float(max(values)) if values else None


def _main_instance(c: Campaign, target: Union[Shape, ExteriorShape], idx: int, sample: int) -> InstanceRecord:
    seed = instance_seed(c.cfg.master_seed, idx, sample)
    tol = c.tolerance("membership", 1e-8)
    label = target.label()
    if isinstance(target, ExteriorShape):
        f = random_alternating(target.dim, target.k, seed, c.field)
    else:
        f = random_tensor(target, seed, c.field)
    self_residual = membership_residual(f, f)
    if self_residual > c.tolerance("self", 1e-12):
        return _record(label, idx, sample, seed, status="fail", detail=f"f not in H_f: {self_residual:.3e}")

    expected = None
    cfg = c.cfg.model_copy(update={"master_seed": seed})
    if isinstance(f, AlternatingTensor):
        result = grassmann_critical_points(f, f.k, cfg)
    elif f.shape.k == 1 and f.shape.dims == (2,):
        result = binary_eigenvectors(f, cfg.dedupe_tol)
        expected = f.shape.degrees[0]
    else:
        result = singular_tuples(f, cfg)
        if all(n == 2 for n in f.shape.dims):
            expected = binary_segre_veronese_eddegree(f.shape.degrees)

    points = result.all_points
    if not points:
        return _record(label, idx, sample, seed, status="inconclusive", count=0, expected_count=expected,
                       detail="no certified critical points")
    worst = _worst(p.membership_residual for p in points)
    detail = ""
    if c.field == "real" and isinstance(f, PSTensor):
        nearest = closest_real_point(result, f)
        if nearest is not None:
            detail = f"closest real point: distance {nearest.distance:.6f}, membership {nearest.membership_residual:.3e}"
    return _record(
        label, idx, sample, seed,
        status="pass" if worst <= tol else "fail",
        count=result.count,
        expected_count=expected,
        max_membership_residual=worst,
        max_first_order_residual=_worst(p.first_order_residual for p in points),
        detail=detail,
    )


def _converse_instance(c: Campaign, shape: Shape, idx: int, sample: int) -> InstanceRecord:
    seed = instance_seed(c.cfg.master_seed, idx, sample)
    tol = c.tolerance("membership", 1e-8)
    match_tol = c.tolerance("match", 1e-6)
    label = shape.label()
    f = random_tensor(shape, seed, c.field)
    try:
        roots = binary_eigenvectors(f, c.cfg.dedupe_tol)
    except OrbitDegenerateError as e:
        return _record(label, idx, sample, seed, status="excluded", detail=str(e))
    d = shape.degrees[0]
    failures = []
    if roots.isotropic:
        failures.append(f"{len(roots.isotropic)} isotropic roots")

    root_vectors = [p.vectors() for p in roots.all_points]
    gens = generators_for(f)
    worst_membership = 0.0
    worst_minor = 0.0
    for (v,) in root_vectors:
        worst_membership = max(worst_membership, membership_residual(rank_one(VectorTuple([v]), shape), f, gens))
        worst_minor = max(worst_minor, eigen_minor_residual(f, v))
    if worst_membership > tol or worst_minor > tol:
        failures.append(f"root residuals {worst_membership:.3e}/{worst_minor:.3e}")

    # random Veronese points stay clear of H_f
    rng = np.random.default_rng([seed, 1])
    for _ in range(int(c.tolerance("random_points", 20))):
        v = random_vectors((2,), rng)[0]
        if membership_residual(rank_one(VectorTuple([v]), shape), f, gens) <= 100 * tol:
            failures.append("random Veronese point passed membership")
            break

    solved = singular_tuples(f, c.cfg.model_copy(update={"master_seed": seed}))
    solved_vectors = [p.vectors() for p in solved.all_points]
    merged = dedupe_projective(root_vectors + solved_vectors, match_tol)
    if len(root_vectors) != d:
        failures.append(f"{len(root_vectors)} distinct roots, expected {d}")
    if len(solved_vectors) != len(root_vectors) or len(merged) != len(root_vectors):
        failures.append(f"solver found {len(solved_vectors)} eigenvectors, roots {len(root_vectors)}, union {len(merged)}")

    return _record(
        label, idx, sample, seed,
        status="fail" if failures else "pass",
        count=len(root_vectors),
        expected_count=d,
        max_membership_residual=worst_membership,
        max_first_order_residual=worst_minor,
        detail="; ".join(failures),
    )


def _count_instance(c: Campaign, shape: Shape, idx: int, sample: int) -> InstanceRecord:
    seed = instance_seed(c.cfg.master_seed, idx, sample)
    label = shape.label()
    f = random_tensor(shape, seed, c.field)
    expected = binary_segre_veronese_eddegree(shape.degrees)
    result = singular_tuples(f, c.cfg.model_copy(update={"master_seed": seed}))
    count = result.count
    diag = result.diagnostics
    detail = (f"restarts {diag.restarts}, certified {diag.certified}, diverged {diag.diverged}, "
              f"uncertified {diag.uncertified}, degenerate {diag.degenerate}")
    if count > expected:
        status = "fail"
    elif count < expected:
        status = "inconclusive"
    else:
        status = "pass"
    return _record(
        label, idx, sample, seed,
        status=status,
        count=count,
        expected_count=expected,
        max_membership_residual=_worst(p.membership_residual for p in result.all_points),
        max_first_order_residual=_worst(p.first_order_residual for p in result.all_points),
        detail=detail,
    )


def _als_instance(c: Campaign, shape: Shape, rank: int, idx: int, sample: int) -> InstanceRecord:
    seed = instance_seed(c.cfg.master_seed, idx, sample)
    label = f"{shape.label()} q={rank}"
    f = random_tensor(shape, seed, "real")
    report = cp_als(f, rank, c.cfg.model_copy(update={"master_seed": seed}))
    bound = max(c.tolerance("membership_floor", 1e-6), 10 * report.stationarity)
    if not report.converged:
        status = "inconclusive"
    else:
        status = "pass" if report.membership_residual <= bound else "fail"
    return _record(
        label, idx, sample, seed,
        status=status,
        max_membership_residual=report.membership_residual,
        max_first_order_residual=report.stationarity,
        detail=f"converged={report.converged}, bound {bound:.3e}",
    )


DEGENERATE_SHAPE = Shape.of((2, 1), (2, 1), (2, 1))
ISOTROPIC = {"+": np.array([1.0, 1j]), "-": np.array([1.0, -1j])}


def isotropic_slice_tensor(position: int, sign: str, M: np.ndarray) -> PSTensor:
    """u ⊗ M in C2⊗C2⊗C2 with u = (1, ±i) placed in factor ``position``."""
    u = ISOTROPIC[sign]
    if position == 0:
        coeffs = np.einsum("a,bc->abc", u, M)
    elif position == 1:
        coeffs = np.einsum("b,ac->abc", u, M)
    else:
        coeffs = np.einsum("c,ab->abc", u, M)
    return PSTensor(DEGENERATE_SHAPE, coeffs)


def degenerate_slices() -> List[Tuple[int, str]]:
    return [(p, sign) for p in range(3) for sign in ("+", "-")]


def _degenerate_instance(c: Campaign, slice_: Optional[Tuple[int, str]], idx: int, sample: int) -> InstanceRecord:
    seed = instance_seed(c.cfg.master_seed, idx, sample)
    tol = c.cfg.rank_tol
    if slice_ is None:
        label = "generic"
        f = random_tensor(DEGENERATE_SHAPE, seed, c.field)
    else:
        position, sign = slice_
        label = f"isotropic{sign}@{position}"
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        f = isotropic_slice_tensor(position, sign, M)
    info = orbit_dimension(generators_for(f), tol, f)
    if slice_ is None:
        ok = info.orbit_dimension == 3
    else:
        ok = info.projective_orbit_dimension <= 2
    return _record(
        label, idx, sample, seed,
        status="pass" if ok else "fail",
        count=info.projective_orbit_dimension,
        detail=f"orbit dimension {info.orbit_dimension}, projective {info.projective_orbit_dimension}",
    )


def _self_instance(c: Campaign, target: Union[Shape, ExteriorShape], idx: int, sample: int) -> InstanceRecord:
    seed = instance_seed(c.cfg.master_seed, idx, sample)
    if isinstance(target, ExteriorShape):
        f = random_alternating(target.dim, target.k, seed, c.field)
    else:
        f = random_tensor(target, seed, c.field)
    residual = membership_residual(f, f)
    return _record(
        target.label(), idx, sample, seed,
        status="pass" if residual <= c.tolerance("self", 1e-12) else "fail",
        max_membership_residual=residual,
    )


def _identity_instance(c: Campaign, target: Union[Shape, ExteriorShape], idx: int, sample: int) -> InstanceRecord:
    """Rank-one/Gram-determinant identity plus antisymmetry of every generator."""
    seed = instance_seed(c.cfg.master_seed, idx, sample)
    tol = c.tolerance("identity", 1e-10)
    rng = np.random.default_rng(seed)
    if isinstance(target, ExteriorShape):
        V = np.array(random_vectors([target.dim] * target.k, rng, c.field))
        W = np.array(random_vectors([target.dim] * target.k, rng, c.field))
        lhs = gram_inner(decomposable(V), decomposable(W))
        rhs = np.linalg.det(V @ W.T)
        x = random_alternating(target.dim, target.k, int(rng.integers(2**63)), c.field)
        y = random_alternating(target.dim, target.k, int(rng.integers(2**63)), c.field)
    else:
        s = VectorTuple(random_vectors(target.dims, rng, c.field))
        t = VectorTuple(random_vectors(target.dims, rng, c.field))
        lhs = inner(rank_one(s, target), rank_one(t, target))
        rhs = np.prod([frobenius.q_W(u, v) ** d for u, v, d in zip(s, t, target.degrees)])
        x = random_tensor(target, int(rng.integers(2**63)), c.field)
        y = random_tensor(target, int(rng.integers(2**63)), c.field)
    form_error = abs(lhs - rhs) / max(1.0, abs(rhs))
    scale = norm(x) * norm(y)
    anti_error = 0.0
    for label in generators_for(x).labels:
        total = inner(apply_generator(x, label), y) + inner(x, apply_generator(y, label))
        anti_error = max(anti_error, abs(total) / scale)
    worst = max(form_error, anti_error)
    return _record(
        target.label(), idx, sample, seed,
        status="pass" if worst <= tol else "fail",
        max_first_order_residual=worst,
        detail=f"form {form_error:.3e}, antisymmetry {anti_error:.3e}",
    )


def _flag_instance(label: str, idx: int, check: Callable[[], Tuple[bool, str]]) -> InstanceRecord:
    ok, detail = check()
    return _record(label, idx, 0, 0, status="pass" if ok else "fail", detail=detail)


def _check_weight(w: FlagWeight) -> Tuple[bool, str]:
    degree = flag_degree(w)
    top = hilbert_top_difference(w)
    ok = degree == top and flag_dimension(w.n) == so_dimension(w.n + 1)
    detail = f"degree {degree}, top difference {top}, dim F_n = dim SO(n+1) = {flag_dimension(w.n)}"
    if all(x == 1 for x in w.a):
        full = factorial(flag_dimension(w.n))
        hilbert_ok = all(flag_hilbert(w, t) == (t + 1) ** flag_dimension(w.n) for t in range(11))
        ok = ok and degree == full and hilbert_ok
        detail += f", C(n+1,2)! = {full}, Hilbert (t+1)^N {'holds' if hilbert_ok else 'fails'}"
    return ok, detail


def _check_planar(a: int, b: int) -> Tuple[bool, str]:
    degree = flag_degree(FlagWeight(n=2, a=(a, b)))
    return degree == 3 * a * b * (a + b), f"degree {degree}, 3ab(a+b) = {3 * a * b * (a + b)}"


def _check_euler(n: int) -> Tuple[bool, str]:
    value = flag_euler_characteristic(n)
    return value == factorial(n + 1), f"χ = {value}"


# --- planning --------------------------------------------------------------


def _grid(c: Campaign) -> List[Union[Shape, ExteriorShape]]:
    return list(c.shapes) + list(c.exterior)


def plan_instances(c: Campaign) -> List[InstanceFn]:
    """Instance thunks in (shape index, sample index) order."""
    samples = range(c.samples)
    if c.kind in ("main", "self_membership", "form_identities"):
        runner = {"main": _main_instance, "self_membership": _self_instance, "form_identities": _identity_instance}[c.kind]
        return [partial(runner, c, target, idx, s) for idx, target in enumerate(_grid(c)) for s in samples]
    if c.kind == "converse":
        return [partial(_converse_instance, c, shape, idx, s) for idx, shape in enumerate(c.shapes) for s in samples]
    if c.kind == "count_binary":
        return [partial(_count_instance, c, shape, idx, s) for idx, shape in enumerate(c.shapes) for s in samples]
    if c.kind == "als":
        pairs = [(shape, rank) for shape in c.shapes for rank in c.ranks]
        return [partial(_als_instance, c, shape, rank, idx, s) for idx, (shape, rank) in enumerate(pairs) for s in samples]
    if c.kind == "degenerate_locus":
        slices = [None] + degenerate_slices()
        return [partial(_degenerate_instance, c, slice_, idx, s) for idx, slice_ in enumerate(slices) for s in samples]
    if c.kind == "flag_formulas":
        bounds = c.flags or FlagRange()
        fns: List[InstanceFn] = []
        weights = [
            FlagWeight(n=n, a=a)
            for n in range(1, bounds.max_n + 1)
            for a in product(range(1, bounds.max_a + 1), repeat=n)
        ]
        for w in weights:
            fns.append(partial(_flag_instance, f"n={w.n} a={w.a}", len(fns), partial(_check_weight, w)))
        for a in range(1, 11):
            for b in range(1, 11):
                fns.append(partial(_flag_instance, f"n=2 a=({a}, {b})", len(fns), partial(_check_planar, a, b)))
        for n in range(1, max(6, bounds.max_n) + 1):
            fns.append(partial(_flag_instance, f"euler n={n}", len(fns), partial(_check_euler, n)))
        return fns
    raise ValueError(f"unknown campaign kind: {c.kind}")


def _thresholds(c: Campaign, records: List[InstanceRecord]) -> Tuple[bool, List[str]]:
    notes = []
    ok = True
    if c.kind == "count_binary" and records:
        exact = sum(r.status == "pass" for r in records) / len(records)
        need = c.tolerance("exact_fraction", 0.95)
        notes.append(f"exact count on {exact:.1%} of instances (need {need:.0%})")
        ok = exact >= need
    if c.kind == "als" and records:
        converged = sum(r.status != "inconclusive" for r in records) / len(records)
        need = c.tolerance("converged_fraction", ALS_CONVERGED_FRACTION)
        notes.append(f"converged on {converged:.1%} of instances (need {need:.0%})")
        ok = converged >= need
    if c.kind == "main" and records:
        inconclusive = sum(r.status == "inconclusive" for r in records)
        if inconclusive:
            notes.append(f"{inconclusive} instances without certified critical points")
    return ok, notes


async def _run_all(
    fns: List[InstanceFn],
    workers: int,
    on_progress: Optional[Callable[[int, int, str], None]],
    description: str,
) -> List[InstanceRecord]:
    sem = asyncio.Semaphore(workers)
    total = len(fns)
    done = 0

    async def worker(fn: InstanceFn) -> InstanceRecord:
        nonlocal done
        async with sem:
            record = await asyncio.to_thread(fn)
        done += 1
        if on_progress:
            on_progress(done, total, description)
        return record

    return await asyncio.gather(*(worker(fn) for fn in fns))


def run_campaign(
    c: Campaign,
    on_log: Optional[Callable[[str], None]] = None,
    on_progress: Optional[Callable[[int, int, str], None]] = None,
) -> CampaignReport:
    """Run every instance of ``c`` and assemble the ordered report.

    Args:
        c: campaign definition
        on_log: Logging callback for messages
        on_progress: Progress callback (done, total, description)

    Returns:
        CampaignReport ordered by (shape index, sample index)
    """
    fns = plan_instances(c)
    if on_log:
        on_log(f"{c.name}: {len(fns)} instances on {c.workers} workers")
    start = time.perf_counter()
    records = asyncio.run(_run_all(fns, c.workers, on_progress, c.name))
    ok, notes = _thresholds(c, records)
    report = CampaignReport(
        campaign=c.name,
        kind=c.kind,
        master_seed=c.cfg.master_seed,
        records=records,
        notes=notes,
        thresholds_met=ok,
        wall_clock_seconds=time.perf_counter() - start,
    )
    if on_log:
        on_log(f"{c.name}: {report.status_counts} in {report.wall_clock_seconds:.2f}s")
    return report


def campaign_verify_main(c: Campaign, **callbacks) -> CampaignReport:
    return run_campaign(c.model_copy(update={"kind": "main"}), **callbacks)


def campaign_verify_converse(c: Campaign, **callbacks) -> CampaignReport:
    return run_campaign(c.model_copy(update={"kind": "converse"}), **callbacks)


def campaign_count_binary(c: Campaign, **callbacks) -> CampaignReport:
    return run_campaign(c.model_copy(update={"kind": "count_binary"}), **callbacks)


def campaign_als_membership(c: Campaign, **callbacks) -> CampaignReport:
    return run_campaign(c.model_copy(update={"kind": "als"}), **callbacks)


def campaign_degenerate_locus(samples: int = 100, master_seed: int = 0, **callbacks) -> CampaignReport:
    c = Campaign(name="degenerate-locus", kind="degenerate_locus", samples=samples)
    return run_campaign(c.with_seed(master_seed), **callbacks)


# --- output ----------------------------------------------------------------

CSV_FIELDS = list(InstanceRecord.model_fields)


def emit_report(report: CampaignReport, fmt: Literal["json", "csv"], path: Union[str, Path]) -> None:
    """Write ``report`` as versioned JSON or as CSV with one row per instance.

    Raises:
        RuntimeError: if the file cannot be written
    """
    path = Path(path)
    try:
        if fmt == "json":
            path.write_text(report.model_dump_json(indent=2) + "\n")
        elif fmt == "csv":
            with path.open("w", newline="") as handle:
                writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
                writer.writeheader()
                for record in report.records:
                    writer.writerow(record.model_dump())
        else:
            raise ValueError(f"unknown report format: {fmt}")
    except OSError as e:
        raise RuntimeError(f"cannot write report to {path}: {e}") from e


def load_report(path: Union[str, Path]) -> CampaignReport:
    return CampaignReport.model_validate_json(Path(path).read_text())
