"""Runtime-scaling benchmark: seeded synthetic catalogs, per-phase timings.

Reproduces the scaling experiment setup: catalogs of equal image/service
counts are generated with random in-range attribute values, evaluated with
no requirements, and combined with the feasibility filter skipped (every
pair evaluated), which increases the number of combinations but removes
filtering effort. Timings are wall-clock (perf_counter) with warm-up runs
excluded; model generation is timed separately from the pipeline phases so
both views are available.

The total-time-versus-size curve is summarized by an ordinary least
squares quadratic fit; the evaluation phases scale linearly and the
combination phase quadratically, so the fit's R^2 should be high whenever
the machine is not heavily disturbed. The cyclic garbage collector is
paused during timed phases (as timeit does): collection passes scale with
the whole live heap and would otherwise distort the scaling shape, while
everything the pipeline allocates is acyclic and reclaimed by reference
counting regardless.
"""

from __future__ import annotations

import csv
import gc
import time
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .catalog import generate_synthetic_catalog
from .errors import ValidationError
from .evaluation import CombinationWeights, combine, evaluate_images, evaluate_services
from .session import default_image_hierarchy, default_service_hierarchy

PHASES = ("generation", "image_eval", "service_eval", "combination", "total")


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[tuple[int, int], ...] = tuple((k, k) for k in range(100, 1001, 100))
    repetitions: int = 20
    seed: int = 0
    skip_feasibility_filter: bool = True
    warmups: int = 2
    parallel: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValidationError("repetitions must be >= 1")
        if not self.sizes:
            raise ValidationError("sizes must be non-empty")
        for m, n in self.sizes:
            if m < 1 or n < 1:
                raise ValidationError("sizes must be >= 1")
        if self.warmups < 0:
            raise ValidationError("warmups must be >= 0")


@dataclass(frozen=True)
class Sample:
    m: int
    n: int
    phase: str
    rep: int
    seconds: float


@dataclass(frozen=True)
class SizeRow:
    """Aggregated timing stats for one catalog size."""

    m: int
    n: int
    stats: dict[str, dict[str, float]]  # phase -> {mean, min, max}
    top_image: tuple[str, float]
    top_service: tuple[str, float]
    best_value: float
    error: str | None = None


@dataclass(frozen=True)
class QuadraticFit:
    a2: float
    a1: float
    a0: float
    r_squared: float


@dataclass(frozen=True)
class BenchReport:
    config: BenchConfig
    samples: list[Sample]
    rows: list[SizeRow]
    fit: QuadraticFit | None


def fit_quadratic(points) -> QuadraticFit:
    """OLS fit of t = a2 s^2 + a1 s + a0 over (size, time) points."""
    points = [(float(s), float(t)) for s, t in points]
    if len(points) < 3:
        raise ValidationError("quadratic fit needs at least 3 points")
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    if np.all(xs == xs[0]):
        raise ValidationError("quadratic fit needs at least two distinct sizes")
    coeffs = np.polyfit(xs, ys, 2)
    predicted = np.polyval(coeffs, xs)
    ss_res = float(np.sum((ys - predicted) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res <= 1e-12 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return QuadraticFit(float(coeffs[0]), float(coeffs[1]), float(coeffs[2]), r_squared)


def _time_pipeline(catalog, config: BenchConfig) -> tuple[dict[str, float], tuple, tuple, float]:
    image_hierarchy = default_image_hierarchy()
    service_hierarchy = default_service_hierarchy()
    weights = CombinationWeights()
    dependencies = None if config.skip_feasibility_filter else catalog.dependencies

    gc_was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        start_total = time.perf_counter()
        t0 = time.perf_counter()
        images = evaluate_images(catalog, [], image_hierarchy, 0, config.parallel)
        t1 = time.perf_counter()
        services = evaluate_services(catalog, [], service_hierarchy, 0, config.parallel)
        t2 = time.perf_counter()
        combined = combine(
            images.results, services.results, dependencies, weights, config.parallel
        )
        t3 = time.perf_counter()
    finally:
        if gc_was_enabled:
            gc.enable()

    timings = {
        "image_eval": t1 - t0,
        "service_eval": t2 - t1,
        "combination": t3 - t2,
        "total": t3 - start_total,
    }
    top_image = (images.results[0].entity_id, images.results[0].value)
    top_service = (services.results[0].entity_id, services.results[0].value)
    best_value = combined[0].combined_value if combined else 0.0
    return timings, top_image, top_service, best_value


def run_bench(config: BenchConfig) -> BenchReport:
    """Run the timing sweep; per-size failures are recorded, not fatal."""
    samples: list[Sample] = []
    rows: list[SizeRow] = []
    for index, (m, n) in enumerate(config.sizes):
        size_seed = config.seed * 100_003 + index
        try:
            t0 = time.perf_counter()
            dep_mode = "none" if config.skip_feasibility_filter else "all"
            catalog = generate_synthetic_catalog(m, n, size_seed, dependencies=dep_mode)
            generation = time.perf_counter() - t0

            for _ in range(config.warmups):
                _time_pipeline(catalog, config)

            per_phase: dict[str, list[float]] = {p: [] for p in PHASES if p != "generation"}
            top_image = top_service = ("", 0.0)
            best_value = 0.0
            for rep in range(1, config.repetitions + 1):
                timings, top_image, top_service, best_value = _time_pipeline(catalog, config)
                for phase, seconds in timings.items():
                    per_phase[phase].append(seconds)
                    samples.append(Sample(m, n, phase, rep, seconds))
            samples.append(Sample(m, n, "generation", 0, generation))

            stats = {
                phase: {
                    "mean": sum(values) / len(values),
                    "min": min(values),
                    "max": max(values),
                }
                for phase, values in per_phase.items()
            }
            stats["generation"] = {"mean": generation, "min": generation, "max": generation}
            rows.append(SizeRow(m, n, stats, top_image, top_service, best_value))
        except MemoryError:
            rows.append(
                SizeRow(m, n, {}, ("", 0.0), ("", 0.0), 0.0, error="memory exhausted")
            )

    fit = None
    usable = [r for r in rows if r.error is None and r.m == r.n]
    if len(usable) >= 3 and len({r.m for r in usable}) >= 2:
        fit = fit_quadratic([(r.m, r.stats["total"]["mean"]) for r in usable])
    return BenchReport(config=config, samples=samples, rows=rows, fit=fit)


def write_csv(report: BenchReport, target: Path | IO) -> None:
    """Emit per-rep samples as `m,n,phase,rep,seconds` rows."""

    def _write(handle) -> None:
        writer = csv.writer(handle)
        writer.writerow(["m", "n", "phase", "rep", "seconds"])
        for s in report.samples:
            writer.writerow([s.m, s.n, s.phase, s.rep, f"{s.seconds:.9f}"])

    if isinstance(target, Path):
        with target.open("w", newline="", encoding="utf-8") as handle:
            _write(handle)
    else:
        _write(target)


def summary_document(report: BenchReport) -> dict:
    doc: dict[str, object] = {
        "config": {
            "sizes": [list(s) for s in report.config.sizes],
            "repetitions": report.config.repetitions,
            "seed": report.config.seed,
            "skip_feasibility_filter": report.config.skip_feasibility_filter,
            "warmups": report.config.warmups,
            "parallel": report.config.parallel,
        },
        "rows": [
            {
                "m": row.m,
                "n": row.n,
                "error": row.error,
                "stats": row.stats,
                "top_image": {"id": row.top_image[0], "value": row.top_image[1]},
                "top_service": {"id": row.top_service[0], "value": row.top_service[1]},
                "best_combination_value": row.best_value,
            }
            for row in report.rows
        ],
        "fit": (
            None
            if report.fit is None
            else {
                "a2": report.fit.a2,
                "a1": report.fit.a1,
                "a0": report.fit.a0,
                "r_squared": report.fit.r_squared,
            }
        ),
    }
    return doc


def parse_bench_config(doc: dict | None) -> BenchConfig:
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ValidationError("bench config must be a map")
    kwargs: dict[str, object] = {}
    if "sizes" in doc:
        raw = doc["sizes"]
        if not isinstance(raw, list):
            raise ValidationError("sizes must be a list", "sizes")
        sizes = []
        for i, item in enumerate(raw):
            if isinstance(item, int):
                sizes.append((item, item))
            elif isinstance(item, (list, tuple)) and len(item) == 2:
                sizes.append((int(item[0]), int(item[1])))
            else:
                raise ValidationError("size must be an int or an [m, n] pair", f"sizes[{i}]")
        kwargs["sizes"] = tuple(sizes)
    for key in ("repetitions", "seed", "warmups"):
        if key in doc:
            kwargs[key] = int(doc[key])
    for key in ("skip_feasibility_filter", "parallel"):
        if key in doc:
            kwargs[key] = bool(doc[key])
    return BenchConfig(**kwargs)
