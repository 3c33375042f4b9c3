"""Raster scans of the Bowditch test over a slice of complex parameters.

Every pixel is an independent job: build a seed from the pixel value, run
``check_bq`` under a small budget and record the verdict.  Results are placed
into the grid by index, so output bytes do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .bowditch import INCONCLUSIVE, SATISFIED, VIOLATED, BQConfig, check_bq
from .identities import DomainError, sum_main, z_branch
from .markoff import TraceOverflow, from_seed

log = logging.getLogger(__name__)

MODES = ("vary_z", "vary_mu", "vary_xy_diagonal")
UNDEFINED = "undefined"

# gray levels; violated pixels get a dark shade scaled by depth
SATISFIED_GRAY = 255
INCONCLUSIVE_GRAY = 160
UNDEFINED_GRAY = 200
VIOLATED_MAX_GRAY = 120


def scan_bq_config() -> BQConfig:
    return BQConfig(max_depth=24, max_vertices=4000)


@dataclass(frozen=True)
class ScanConfig:
    mode: str
    fixed_values: dict
    center: complex
    width: float
    height: float
    resolution: tuple[int, int]
    bq: BQConfig = field(default_factory=scan_bq_config)
    with_sum: bool = False
    sum_tol: float = 1e-8

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        w, h = self.resolution
        if w < 1 or h < 1:
            raise ValueError("resolution must be positive")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("window must have positive width and height")
        need = {"vary_z": ("x", "y"), "vary_mu": ("x", "y"), "vary_xy_diagonal": ("mu",)}[self.mode]
        missing = [k for k in need if k not in self.fixed_values]
        if missing:
            raise ValueError(f"mode {self.mode} needs fixed values for {', '.join(missing)}")

    def pixel_value(self, i: int, j: int) -> complex:
        """Centre of pixel column ``i``, row ``j`` (row 0 at the top)."""
        w, h = self.resolution
        re = self.center.real + self.width * (2 * i + 1 - w) / (2 * w)
        im = self.center.imag + self.height * (h - 1 - 2 * j) / (2 * h)
        return complex(re, im)

    def seed(self, p: complex) -> tuple[complex, complex, complex]:
        f = self.fixed_values
        if self.mode == "vary_z":
            return f["x"], f["y"], p
        if self.mode == "vary_mu":
            return f["x"], f["y"], z_branch(f["x"], f["y"], p)
        return p, p, z_branch(p, p, f["mu"])


@dataclass(frozen=True)
class PixelRecord:
    status: str
    depth_to_verdict: int
    sum_value: complex | None = None


@dataclass
class ScanResult:
    config: ScanConfig
    grid: list  # rows of PixelRecord, grid[j][i]

    def counts(self) -> dict:
        out = {s: 0 for s in (SATISFIED, VIOLATED, INCONCLUSIVE, UNDEFINED)}
        for row in self.grid:
            for r in row:
                out[r.status] += 1
        return out

    def gray(self, r: PixelRecord) -> int:
        if r.status == SATISFIED:
            return SATISFIED_GRAY
        if r.status == INCONCLUSIVE:
            return INCONCLUSIVE_GRAY
        if r.status == UNDEFINED:
            return UNDEFINED_GRAY
        cap = max(self.config.bq.max_depth, 1)
        return VIOLATED_MAX_GRAY * min(r.depth_to_verdict, cap) // cap

    def pgm_bytes(self) -> bytes:
        w, h = self.config.resolution
        body = bytes(self.gray(r) for row in self.grid for r in row)
        return b"P5\n%d %d\n255\n" % (w, h) + body

    def csv_text(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["i", "j", "re", "im", "status", "depth", "sum_re", "sum_im"])
        for j, row in enumerate(self.grid):
            for i, r in enumerate(row):
                p = self.config.pixel_value(i, j)
                s = r.sum_value
                out.writerow([i, j, repr(p.real), repr(p.imag), r.status, r.depth_to_verdict,
                              "" if s is None else repr(s.real), "" if s is None else repr(s.imag)])
        return buf.getvalue()

    def summary(self) -> dict:
        c = self.config
        return {
            "mode": c.mode,
            "center": [c.center.real, c.center.imag],
            "width": c.width,
            "height": c.height,
            "resolution": list(c.resolution),
            "max_depth": c.bq.max_depth,
            "counts": self.counts(),
        }


def scan_pixel(cfg: ScanConfig, i: int, j: int) -> PixelRecord:
    """Verdict for one pixel; depends only on ``cfg`` and ``(i, j)``."""
    try:
        m = from_seed(*cfg.seed(cfg.pixel_value(i, j)))
        report = check_bq(m, cfg.bq)
    except (DomainError, TraceOverflow, ZeroDivisionError, OverflowError):
        return PixelRecord(UNDEFINED, 0)
    value = None
    if cfg.with_sum and report.satisfied:
        try:
            value = sum_main(m, tol=cfg.sum_tol, max_depth=cfg.bq.max_depth, bq=cfg.bq).value
        except (DomainError, ZeroDivisionError, ArithmeticError):
            value = None
    return PixelRecord(report.status, report.max_depth_explored, value)


def _scan_row(args) -> list[PixelRecord]:
    cfg, j = args
    return [scan_pixel(cfg, i, j) for i in range(cfg.resolution[0])]


def run_scan(cfg: ScanConfig, workers: int = 1) -> ScanResult:
    w, h = cfg.resolution
    grid: list = [None] * h
    if workers <= 1:
        for j in range(h):
            grid[j] = _scan_row((cfg, j))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_scan_row, (cfg, j)): j for j in range(h)}
            for fut, j in futures.items():
                grid[j] = fut.result()
    log.info("scan %dx%d done", w, h)
    return ScanResult(cfg, grid)
