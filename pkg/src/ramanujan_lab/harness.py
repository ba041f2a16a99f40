"""Seeded ensemble sweeps, per-cell persistence and aggregation.

A *cell* is one ``(family label, N, d)`` combination. Every sample slot in a
cell owns a random stream derived from ``(master_seed, label, N, d, slot)``,
so results do not depend on worker count or completion order. A slot whose
eigensolve fails to converge is recorded as discarded and redrawn from the
same, continuing stream.

On disk a run is a directory with one CSV per cell and ``manifest.json``
holding the configuration and per-cell aggregates.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import eigh

from ._validation import as_generator, check_int
from .ensembles import EnsembleSpec, sample_ensemble
from .exceptions import SamplingExhaustedError
from .spectra import SpectralSummary, extremal_nontrivial, ramanujan_bound
from .stats import (
    chi_square_gof,
    correlation,
    fit_exponents,
    standardize,
    z_mass_left,
)
from .tracy_widom import REFERENCE_NAMES, reference_distribution

log = logging.getLogger(__name__)

FULL_N_GRID = (
    26, 32, 40, 50, 64, 80, 100, 126, 158, 200, 252, 316, 400, 502, 632,
    796, 1002, 1262, 1588, 2000, 2516, 3168, 3990, 5022, 6324, 7962,
    10022, 12618, 15886, 20000,
)
DESK_N_GRID = tuple(n for n in FULL_N_GRID if n <= 5022)
STUDY_DEGREES = (3, 4, 7, 10)
DEFAULT_FAMILIES = ("CI", "SCI", "CB", "SCB")

# N windows used for exponent fits; bounds are inclusive
FIT_WINDOWS = (
    (26, 20000), (80, 20000), (252, 20000),
    (26, 64), (80, 200), (252, 632), (796, 2000), (2516, 6324), (7962, 20000),
)

CSV_COLUMNS = (
    "family", "N", "d", "seed", "lambda_plus", "lambda_minus", "lambda_abs",
    "is_ramanujan", "converged", "rejections",
)
MAX_DISCARDS_PER_SLOT = 100

ENV_OUT = "RAMANUJAN_LAB_OUT"
ENV_THREADS = "RAMANUJAN_LAB_THREADS"


def default_output_path():
    return os.environ.get(ENV_OUT, "runs")


def default_workers():
    raw = os.environ.get(ENV_THREADS)
    if raw:
        return max(1, int(raw))
    return 1


def task_seed(master_seed, label, n, d, index):
    """64-bit seed for one sample slot."""
    ss = np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=(zlib.crc32(label.encode()), int(n), int(d), int(index)),
    )
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


@dataclass(frozen=True)
class GraphRecord:
    family: str
    N: int
    d: int
    seed: int
    lambda_plus: float
    lambda_minus: float
    lambda_abs: float
    is_ramanujan: bool
    converged: bool
    rejections: int

    @property
    def summary(self):
        return SpectralSummary(
            self.lambda_plus, self.lambda_minus, self.lambda_abs,
            self.is_ramanujan, self.converged,
        )


def simulate_slot(spec, master_seed, index, tol=1e-10, budget_factor=300):
    """Records for one slot: any discarded draws, then the converged one."""
    seed = task_seed(master_seed, spec.label, spec.n_vertices, spec.degree, index)
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(MAX_DISCARDS_PER_SLOT):
        g, rejections = sample_ensemble(spec, rng)
        s = extremal_nontrivial(g, tol=tol, budget_factor=budget_factor)
        records.append(GraphRecord(
            spec.label, spec.n_vertices, spec.degree, seed,
            s.lambda_plus, s.lambda_minus, s.lambda_abs,
            s.is_ramanujan, s.converged, rejections,
        ))
        if s.converged:
            return records
    raise RuntimeError(f"slot {index}: {MAX_DISCARDS_PER_SLOT} consecutive eigensolve failures")


def _simulate_chunk(args):
    spec, master_seed, indices, tol, budget_factor = args
    return [simulate_slot(spec, master_seed, i, tol, budget_factor) for i in indices]


def run_cell(spec, samples, master_seed, workers=1, tol=1e-10, budget_factor=300):
    """All records for one cell, in slot order."""
    samples = check_int(samples, "samples", minimum=1)
    indices = list(range(samples))
    if workers <= 1:
        slots = _simulate_chunk((spec, master_seed, indices, tol, budget_factor))
    else:
        chunk = max(1, math.ceil(samples / (4 * workers)))
        jobs = [
            (spec, master_seed, indices[i:i + chunk], tol, budget_factor)
            for i in range(0, samples, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            slots = [s for part in pool.map(_simulate_chunk, jobs) for s in part]
    return [r for slot in slots for r in slot]


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_records(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        return [
            GraphRecord(
                row["family"], int(row["N"]), int(row["d"]), int(row["seed"]),
                float(row["lambda_plus"]), float(row["lambda_minus"]),
                float(row["lambda_abs"]), row["is_ramanujan"] == "1",
                row["converged"] == "1", int(row["rejections"]),
            )
            for row in reader
        ]


def cell_filename(label, n, d):
    return f"{label}_N{n}_d{d}.csv"


def _atomic_write(path, text):
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


@dataclass
class ExperimentConfig:
    families: tuple = DEFAULT_FAMILIES
    N_list: tuple = DESK_N_GRID
    d_list: tuple = (3,)
    samples_per_cell: int = 1000
    master_seed: int = 0
    output_path: str = field(default_factory=default_output_path)
    max_rejections: int = 10_000
    workers: int = field(default_factory=default_workers)
    tol: float = 1e-10
    budget_factor: int = 300

    def __post_init__(self):
        self.families = tuple(
            f.label if isinstance(f, EnsembleSpec) else str(f).upper() for f in self.families
        )
        self.N_list = tuple(check_int(n, "N", minimum=2, even=True) for n in self.N_list)
        self.d_list = tuple(check_int(d, "d", minimum=1) for d in self.d_list)
        check_int(self.samples_per_cell, "samples_per_cell", minimum=1)
        check_int(self.master_seed, "master_seed", minimum=0)

    @classmethod
    def full_grid(cls, **kwargs):
        return cls(N_list=FULL_N_GRID, **kwargs)

    def cells(self):
        for label in self.families:
            for d in self.d_list:
                for n in self.N_list:
                    yield EnsembleSpec.from_label(label, n, d, max_rejections=self.max_rejections)

    def as_dict(self):
        out = asdict(self)
        out.pop("output_path")
        out.pop("workers")
        return out

    def config_hash(self):
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class CellData:
    label: str
    N: int
    d: int
    records: list

    @property
    def key(self):
        return (self.label, self.N, self.d)

    @property
    def converged(self):
        return [r for r in self.records if r.converged]

    @property
    def discarded(self):
        return len(self.records) - len(self.converged)

    @property
    def bipartite(self):
        return self.label.endswith("B")

    def lambda_plus(self):
        return np.array([r.lambda_plus for r in self.converged])

    def lambda_minus(self):
        return np.array([r.lambda_minus for r in self.converged])

    def summaries(self):
        return [r.summary for r in self.converged]


@dataclass
class CellAggregate:
    label: str
    N: int
    d: int
    n: int
    discarded: int
    mean_plus: float
    std_plus: float
    mean_minus: float
    std_minus: float
    chi2_plus: dict
    chi2_minus: dict
    z_plus: dict
    z_minus: dict
    correlation: float | None
    percent_ramanujan: float

    def as_dict(self):
        return asdict(self)


def aggregate_cell(cell, refs=REFERENCE_NAMES):
    """Per-cell statistics against every reference distribution.

    ``lambda_minus`` enters the tests as ``-lambda_minus`` so that its
    extreme tail points the same way as ``lambda_plus``.
    """
    lp = cell.lambda_plus()
    lm = -cell.lambda_minus()
    sp = standardize(lp)
    sm = standardize(lm) if np.ptp(lm) > 0 else None
    chi_p, chi_m, z_p, z_m = {}, {}, {}, {}
    for name in refs:
        ref = reference_distribution(name)
        theta = ref.mass_left_of_mean
        z_p[name] = z_mass_left(lp, theta).z
        z_m[name] = z_mass_left(lm, theta).z
        if len(lp) >= 100:
            chi_p[name] = chi_square_gof(sp, ref).statistic
            if sm is not None:
                chi_m[name] = chi_square_gof(sm, ref).statistic
    corr = None
    if not cell.bipartite and len(lp) >= 2:
        corr = correlation(lp, cell.lambda_minus()).r
    bound = ramanujan_bound(cell.d)
    lam = np.maximum(np.abs(lp), np.abs(lm))
    return CellAggregate(
        label=cell.label, N=cell.N, d=cell.d, n=len(lp), discarded=cell.discarded,
        mean_plus=sp.mean, std_plus=sp.std,
        mean_minus=float(-np.mean(lm)), std_minus=float(np.std(lm, ddof=1)),
        chi2_plus=chi_p, chi2_minus=chi_m, z_plus=z_p, z_minus=z_m,
        correlation=corr, percent_ramanujan=float(np.mean(lam <= bound)),
    )


class RunStore:
    """Cells of one run directory, keyed by ``(label, N, d)``."""

    def __init__(self, path, cells=None):
        self.path = Path(path)
        self.cells = dict(cells or {})

    @classmethod
    def load(cls, path):
        path = Path(path)
        store = cls(path)
        for csv_path in sorted(path.glob("*.csv")):
            records = read_records(csv_path)
            if not records:
                continue
            r0 = records[0]
            store.add(CellData(r0.family, r0.N, r0.d, records))
        return store

    def add(self, cell):
        self.cells[cell.key] = cell

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(sorted(self.cells.values(), key=lambda c: (c.label, c.d, c.N)))

    def aggregates(self, refs=REFERENCE_NAMES):
        return [aggregate_cell(c, refs) for c in self if len(c.converged) >= 2]

    def fit_windows(self, windows=FIT_WINDOWS):
        """Exponent fits of the ``lambda_plus`` mean and spread per N window."""
        groups = {}
        for c in self:
            if len(c.converged) >= 2:
                groups.setdefault((c.label, c.d), []).append(c)
        out = []
        for (label, d), cells in sorted(groups.items()):
            for lo, hi in windows:
                sel = [c for c in cells if lo <= c.N <= hi]
                if len(sel) < 3:
                    continue
                lp = [c.lambda_plus() for c in sel]
                try:
                    fit = fit_exponents(
                        [c.N for c in sel], [x.mean() for x in lp],
                        [x.std(ddof=1) for x in lp], d,
                    )
                except ValueError as exc:
                    log.warning("fit %s d=%d [%d, %d] skipped: %s", label, d, lo, hi, exc)
                    continue
                out.append(((label, d, lo, hi), fit))
        return out


def _manifest_path(root):
    return Path(root) / "manifest.json"


def _load_manifest(root):
    p = _manifest_path(root)
    if p.exists():
        return json.loads(p.read_text())
    return {"cells": {}}


def _write_manifest(root, manifest):
    _atomic_write(_manifest_path(root), json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def write_cell(root, spec, records):
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    path = root / cell_filename(spec.label, spec.n_vertices, spec.degree)
    _atomic_write(path, records_to_csv(records))
    return path


def run_experiment(config):
    """Sample, solve and aggregate every cell of ``config``.

    Cells whose CSV already holds enough converged rows are reused, so an
    interrupted run can be restarted. A cell whose sampling is exhausted is
    logged in the manifest and skipped.
    """
    root = Path(config.output_path)
    root.mkdir(parents=True, exist_ok=True)
    manifest = _load_manifest(root)
    manifest["config"] = config.as_dict()
    manifest["config_hash"] = config.config_hash()
    cells_meta = manifest.setdefault("cells", {})
    store = RunStore(root)
    for spec in config.cells():
        name = cell_filename(spec.label, spec.n_vertices, spec.degree)
        path = root / name
        records = None
        if path.exists():
            old = read_records(path)
            if sum(r.converged for r in old) >= config.samples_per_cell:
                records = old
        if records is None:
            log.info("cell %s N=%d d=%d", spec.label, spec.n_vertices, spec.degree)
            try:
                records = run_cell(
                    spec, config.samples_per_cell, config.master_seed,
                    workers=config.workers, tol=config.tol,
                    budget_factor=config.budget_factor,
                )
            except SamplingExhaustedError as exc:
                cells_meta[name] = {"error": str(exc)}
                _write_manifest(root, manifest)
                log.error("%s", exc)
                continue
            write_cell(root, spec, records)
        cell = CellData(spec.label, spec.n_vertices, spec.degree, records)
        store.add(cell)
        meta = {"rows": len(records), "discarded": cell.discarded}
        if len(cell.converged) >= 2:
            meta["aggregate"] = aggregate_cell(cell).as_dict()
        cells_meta[name] = meta
        _write_manifest(root, manifest)
    return store


@dataclass(frozen=True)
class GOEReport:
    N: int
    count: int
    values: np.ndarray = field(repr=False)
    mean: float = 0.0
    std: float = 0.0
    z: object = None
    chi2: object = None


def goe_largest_scaled(N, count, rng=None):
    """``(lambda_max - 2 sqrt N) N^{1/6}`` for ``count`` GOE matrices.

    Off-diagonal entries are N(0, 1) and diagonal entries N(0, 2).
    """
    rng = as_generator(rng)
    out = np.empty(count)
    scale = 1.0 / math.sqrt(2.0)
    for k in range(count):
        x = rng.standard_normal((N, N))
        a = (x + x.T) * scale
        top = eigh(a, eigvals_only=True, subset_by_index=[N - 1, N - 1])[0]
        out[k] = (top - 2.0 * math.sqrt(N)) * N ** (1.0 / 6.0)
    return out


def goe_validate(N=200, count=5000, rng=None):
    """Test standardized GOE edge fluctuations against normalized TW1."""
    N = check_int(N, "N", minimum=50)
    count = check_int(count, "count", minimum=1000)
    values = goe_largest_scaled(N, count, rng)
    ref = reference_distribution("tw1")
    st = standardize(values)
    return GOEReport(
        N=N, count=count, values=values, mean=st.mean, std=st.std,
        z=z_mass_left(values, ref.mass_left_of_mean),
        chi2=chi_square_gof(st, ref),
    )


FIGURES = (
    "histogram", "mean_vs_N", "loglog_mean", "loglog_std",
    "correlation_vs_logN", "percent_ramanujan", "percent_ramanujan_vs_logN",
)


def emit_plot_data(store, figure_id, bins=40):
    """``(x, y, series)`` triples for one figure."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure {figure_id!r}; expected one of {FIGURES}")
    cells = [c for c in store if len(c.converged) >= 2]
    if not cells:
        raise ValueError("store holds no usable cells")
    rows = []
    for c in cells:
        lp = c.lambda_plus()
        series = f"{c.label} d={c.d}"
        bound = ramanujan_bound(c.d)
        if figure_id == "histogram":
            dens, edges = np.histogram(lp, bins=bins, density=True)
            centers = 0.5 * (edges[1:] + edges[:-1])
            rows += [(x, y, f"{c.label} d={c.d} N={c.N}") for x, y in zip(centers, dens)]
        elif figure_id == "mean_vs_N":
            rows.append((c.N, lp.mean(), series))
        elif figure_id == "loglog_mean":
            gap = bound - lp.mean()
            if gap > 0:
                rows.append((math.log(c.N), math.log(gap), series))
        elif figure_id == "loglog_std":
            rows.append((math.log(c.N), math.log(lp.std(ddof=1)), series))
        elif figure_id == "correlation_vs_logN":
            if not c.bipartite:
                rows.append((math.log(c.N), correlation(lp, c.lambda_minus()).r, series))
        else:
            lam = np.array([r.lambda_abs for r in c.converged])
            frac = float(np.mean(lam <= bound))
            x = c.N if figure_id == "percent_ramanujan" else math.log(c.N)
            rows.append((x, frac, series))
    return [(float(x), float(y), s) for x, y, s in rows]
