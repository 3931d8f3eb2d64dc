"""Monte Carlo experiments comparing generalized and classic deduplication.

Every trial draws ``C_max`` chunks from a fixed source and streams the same
chunks through both encoders, recording cumulative payload lengths at the
record points. Per-point statistics are accumulated as exact integer sums so
the result does not depend on how trials are split across workers.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import statistics
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from . import analysis
from .bitstream import BitWriter
from .code import CodeSpec
from .codec import Encoder
from .rng import SplitMix64
from .source import SourceConfig, build_source

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "C",
    "mean_len_gen",
    "mean_len_classic",
    "delta_gen",
    "delta_classic",
    "ratio",
    "theta_L_gen",
    "theta_U_gen",
    "theta_L_classic",
    "theta_U_classic",
    "baseline_len",
)


class BaselineError(RuntimeError):
    pass


def default_record_points(C_max: int) -> tuple[int, ...]:
    """Every C up to 256, then powers of two, then ``C_max`` itself."""
    points = list(range(1, min(C_max, 256) + 1))
    p = 512
    while p <= C_max:
        points.append(p)
        p *= 2
    if points[-1] != C_max:
        points.append(C_max)
    return tuple(points)


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceConfig
    C_max: int
    trials: int = 1000
    k_mode: str = "full"
    baseline_enabled: bool = False
    record_points: tuple[int, ...] = ()
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1 or self.C_max < 1:
            raise ValueError("trials and C_max must be at least 1")
        if not self.record_points:
            object.__setattr__(self, "record_points", default_record_points(self.C_max))
        pts = self.record_points
        if list(pts) != sorted(set(pts)) or pts[0] < 1 or pts[-1] > self.C_max:
            raise ValueError("record_points must be strictly ascending within [1, C_max]")

    @property
    def gen_spec(self) -> CodeSpec:
        spec = self.source.spec
        if spec.is_trivial:
            return spec
        return CodeSpec.hamming(spec.m, self.k_mode)  # type: ignore[arg-type]


@dataclass
class Row:
    C: int
    mean_len_gen: float
    mean_len_classic: float
    delta_gen: float | None
    delta_classic: float | None
    ratio: float
    theta_L_gen: float
    theta_U_gen: float
    theta_L_classic: float
    theta_U_classic: float
    baseline_len: float | None = None
    se_len_gen: float = 0.0
    se_len_classic: float = 0.0
    se_delta_gen: float = 0.0
    se_delta_classic: float = 0.0
    se_ratio: float = 0.0
    se_baseline: float = 0.0


@dataclass
class ExperimentTable:
    """Per-C results. ``theta_U_classic`` already has ``C`` subtracted."""

    m: int
    n: int
    active: int
    k_mode: str
    trials: int
    seed: int
    bases: tuple[int, ...]
    rows: list[Row] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.n - self.m if self.k_mode == "compact" else self.n

    @property
    def y_size(self) -> int:
        return self.n + 1 if self.m else 1

    def row(self, C: int) -> Row:
        for r in self.rows:
            if r.C == C:
                return r
        raise KeyError(C)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


# accumulator layout per record point
_FIELDS = ("sg", "ssg", "sd", "ssd", "sgd", "cg", "ccg", "cd", "ccd", "sb", "ssb")


def _deflate_bits(data: bytes) -> int:
    try:
        comp = zlib.compressobj(9, zlib.DEFLATED, -15, 9)
        return 8 * len(comp.compress(data) + comp.flush())
    except zlib.error as exc:
        raise BaselineError(str(exc)) from exc


def deflate_baseline(chunks: Sequence[int], n: int) -> int:
    """Raw DEFLATE (level 9) size in bits of the chunks packed MSB-first."""
    w = BitWriter()
    for c in chunks:
        w.write_wide(c, n)
    return _deflate_bits(w.to_bytes())


def _run_trials(
    source: SourceConfig,
    gen_spec: CodeSpec,
    C_max: int,
    record_points: tuple[int, ...],
    baseline: bool,
    trial_ids: Sequence[int],
) -> dict[str, list[int]]:
    npts = len(record_points)
    acc = {f: [0] * npts for f in _FIELDS}
    sg, ssg, sd, ssd, sgd = acc["sg"], acc["ssg"], acc["sd"], acc["ssd"], acc["sgd"]
    cg, ccg, cd, ccd, sb, ssb = acc["cg"], acc["ccg"], acc["cd"], acc["ccd"], acc["sb"], acc["ssb"]
    bases = source.active_bases
    nx, ny, n = source.x_size, source.y_size, source.spec.n
    for t in trial_ids:
        rng = SplitMix64(source.seed + t)
        below = rng.below
        gen = Encoder(gen_spec, "generalized", keep_bits=False)
        dd = Encoder(gen_spec, "classic", keep_bits=False)
        gpush, dpush = gen.push, dd.push
        packed = BitWriter() if baseline else None
        lg = ld = 0
        ri = 0
        nxt = record_points[0]
        for c in range(1, C_max + 1):
            # same draw order as source.sample_chunk
            b = below(nx)
            d = below(ny)
            z = bases[b] ^ (1 << (d - 1)) if d else bases[b]
            wg = gpush(z)[1]
            wd = dpush(z)[1]
            lg += wg
            ld += wd
            if packed is not None:
                packed.write_wide(z, n)
            if c == nxt:
                sg[ri] += lg
                ssg[ri] += lg * lg
                sd[ri] += ld
                ssd[ri] += ld * ld
                sgd[ri] += lg * ld
                cg[ri] += wg
                ccg[ri] += wg * wg
                cd[ri] += wd
                ccd[ri] += wd * wd
                if packed is not None:
                    bl = _deflate_bits(packed.to_bytes())
                    sb[ri] += bl
                    ssb[ri] += bl * bl
                ri += 1
                if ri == npts:
                    break
                nxt = record_points[ri]
    return acc


def _mean_se(s: int, ss: int, T: int) -> tuple[float, float]:
    mean = s / T
    if T < 2:
        return mean, 0.0
    var = (ss * T - s * s) / (T * (T - 1))
    return mean, math.sqrt(max(var, 0.0) / T)


def run_experiment(cfg: ExperimentConfig) -> ExperimentTable:
    """Average both coders over ``cfg.trials`` trials; deterministic given the seed."""
    source, T = cfg.source, cfg.trials
    pts = cfg.record_points
    C_top = pts[-1]
    gen_spec = cfg.gen_spec
    ids = list(range(T))
    baseline = cfg.baseline_enabled
    args = (source, gen_spec, C_top, pts)

    def run(blocks: list[list[int]], use_baseline: bool) -> dict[str, list[int]]:
        if cfg.workers > 1 and len(blocks) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
                parts = list(ex.map(_run_trials, *zip(*[(*args, use_baseline, b) for b in blocks])))
        else:
            parts = [_run_trials(*args, use_baseline, b) for b in blocks]
        total = {f: [0] * len(pts) for f in _FIELDS}
        for part in parts:
            for f in _FIELDS:
                total[f] = [a + b for a, b in zip(total[f], part[f])]
        return total

    w = max(1, min(cfg.workers, T))
    blocks = [ids[i::w] for i in range(w)]
    try:
        acc = run(blocks, baseline)
    except BaselineError as exc:
        log.warning("DEFLATE baseline failed (%s); continuing without it", exc)
        baseline = False
        acc = run(blocks, False)

    nx, ny = source.x_size, source.y_size
    k, n = gen_spec.k, gen_spec.n
    tl_g = analysis.theta_lower_series(C_top, nx, ny, k)
    tu_g = analysis.theta_upper_series(C_top, nx, ny, k)
    tl_d, tu_d = analysis.dedup_bounds_series(C_top, nx * ny, n)

    table = ExperimentTable(
        m=source.spec.m,
        n=n,
        active=nx,
        k_mode=gen_spec.k_mode,
        trials=T,
        seed=source.seed,
        bases=source.active_bases,
    )
    for i, C in enumerate(pts):
        mg, se_g = _mean_se(acc["sg"][i], acc["ssg"][i], T)
        md, se_d = _mean_se(acc["sd"][i], acc["ssd"][i], T)
        dg, se_dg = _mean_se(acc["cg"][i], acc["ccg"][i], T)
        dc, se_dc = _mean_se(acc["cd"][i], acc["ccd"][i], T)
        ratio = md / mg
        se_ratio = 0.0
        if T > 1:
            cov = (acc["sgd"][i] * T - acc["sg"][i] * acc["sd"][i]) / (T * (T - 1))
            var_g = (se_g**2) * T
            var_d = (se_d**2) * T
            v = (var_d + ratio**2 * var_g - 2 * ratio * cov) / (mg**2 * T)
            se_ratio = math.sqrt(max(v, 0.0))
        bl = se_b = None
        if baseline:
            bl, se_b = _mean_se(acc["sb"][i], acc["ssb"][i], T)
        table.rows.append(
            Row(
                C=C,
                mean_len_gen=mg,
                mean_len_classic=md,
                delta_gen=dg,
                delta_classic=dc,
                ratio=ratio,
                theta_L_gen=tl_g[C - 1],
                theta_U_gen=tu_g[C - 1],
                theta_L_classic=tl_d[C - 1],
                theta_U_classic=tu_d[C - 1],
                baseline_len=bl,
                se_len_gen=se_g,
                se_len_classic=se_d,
                se_delta_gen=se_dg,
                se_delta_classic=se_dc,
                se_ratio=se_ratio,
                se_baseline=se_b or 0.0,
            )
        )
    return table


@dataclass(frozen=True)
class SweepRecord:
    m: int
    n: int
    max_ratio: float
    argmax_C: int


def sweep_chunk_length(
    m_values: Sequence[int],
    active_count: int,
    trials: int,
    C_max: int,
    seed: int = 0,
    k_mode: str = "full",
    workers: int = 1,
) -> list[SweepRecord]:
    """Peak generalization ratio for each chunk length ``n = 2**m - 1``."""
    out = []
    for m in m_values:
        src = build_source(m, active_count, seed)
        table = run_experiment(ExperimentConfig(src, C_max, trials, k_mode, workers=workers))
        best = max(table.rows, key=lambda r: r.ratio)
        out.append(SweepRecord(m, src.spec.n, best.ratio, best.C))
    return out


def sweep_slope(records: Sequence[SweepRecord]) -> float:
    """Least-squares slope of peak ratio against chunk length."""
    return statistics.linear_regression([r.n for r in records], [r.max_ratio for r in records]).slope


# ---------------------------------------------------------------------------
# CSV


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))


def export_csv(table: ExperimentTable, path: str | os.PathLike) -> None:
    if not table.rows:
        raise ValueError("table is empty")
    bases = ";".join(f"{b:#x}" for b in table.bases)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(
                f"# m={table.m}, active={table.active}, k_mode={table.k_mode}, "
                f"trials={table.trials}, seed={table.seed}, bases={bases}\n"
            )
            fh.write(f"# n={table.n}, k={table.k}, |Y|={table.y_size}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in table.rows:
                w.writerow([r.C] + [_fmt(getattr(r, c)) for c in CSV_COLUMNS[1:]])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path: str | os.PathLike) -> ExperimentTable:
    meta: dict[str, str] = {}
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc
    body = []
    for line in lines:
        if line.startswith("#"):
            for part in line[1:].split(","):
                key, _, val = part.strip().partition("=")
                meta[key] = val
        elif line:
            body.append(line)
    reader = csv.DictReader(body)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
    m = int(meta.get("m", 0))
    n = int(meta["n"]) if "n" in meta else (1 << m) - 1
    bases = tuple(int(b, 16) for b in meta.get("bases", "").split(";") if b)
    table = ExperimentTable(
        m=m,
        n=n,
        active=int(meta.get("active", len(bases))),
        k_mode=meta.get("k_mode", "full"),
        trials=int(meta.get("trials", 0)),
        seed=int(meta.get("seed", 0)),
        bases=bases,
    )
    for rec in reader:
        vals = {c: (float(rec[c]) if rec[c] != "" else None) for c in CSV_COLUMNS[1:]}
        table.rows.append(Row(C=int(rec["C"]), **vals))  # type: ignore[arg-type]
    return table


# ---------------------------------------------------------------------------
# SVG charts

_W, _H = 720, 440
_L, _R, _T, _B = 70, 190, 30, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _svg_chart(title: str, ylabel: str, series: list[tuple[str, list[tuple[float, float]], bool]]) -> str:
    pts = [p for _, s, _ in series for p in s]
    xs = [math.log10(x) for x, _ in pts]
    ys = [y for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = _W - _L - _R, _H - _T - _B

    def px(x: float) -> float:
        return _L + (math.log10(x) - x0) / (x1 - x0) * pw

    def py(y: float) -> float:
        return _T + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{_L}" y="{_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for e in range(math.ceil(x0), math.floor(x1) + 1):
        gx = _L + (e - x0) / (x1 - x0) * pw
        out.append(f'<line x1="{gx:.1f}" y1="{_T}" x2="{gx:.1f}" y2="{_T + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{gx:.1f}" y="{_T + ph + 16}" text-anchor="middle" font-size="11">1e{e}</text>')
    for i in range(5):
        v = y0 + (y1 - y0) * i / 4
        gy = py(v)
        out.append(f'<text x="{_L - 6}" y="{gy + 4:.1f}" text-anchor="end" font-size="11">{v:.4g}</text>')
    out.append(f'<text x="{_L + pw / 2:.0f}" y="{_H - 10}" text-anchor="middle" font-size="12">chunks C</text>')
    out.append(
        f'<text x="16" y="{_T + ph / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {_T + ph / 2:.0f})">{escape(ylabel)}</text>'
    )
    for i, (name, s, dashed) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in s)
        dash = ' stroke-dasharray="5,4"' if dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{coords}"/>')
        ly = _T + 14 + 18 * i
        out.append(f'<text x="{_W - _R + 12}" y="{ly}" font-size="11" fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _pairs(rows: list[Row], attr: str) -> list[tuple[float, float]]:
    return [(r.C, getattr(r, attr)) for r in rows if getattr(r, attr) is not None]


def emit_plot(table: ExperimentTable, path: str | os.PathLike) -> list[Path]:
    """Write length, per-chunk-cost and ratio charts as three SVG files.

    ``path`` is used as a stem: ``out.svg`` yields ``out-length.svg``,
    ``out-delta.svg`` and ``out-ratio.svg``.
    """
    if not table.rows:
        raise ValueError("table is empty")
    rows = table.rows
    has_baseline = any(r.baseline_len is not None for r in rows)
    stem = Path(path)
    if stem.suffix == ".svg":
        stem = stem.with_suffix("")

    length = [
        ("generalized", _pairs(rows, "mean_len_gen"), False),
        ("classic", _pairs(rows, "mean_len_classic"), False),
        ("gen lower", _pairs(rows, "theta_L_gen"), True),
        ("gen upper", _pairs(rows, "theta_U_gen"), True),
        ("classic lower", _pairs(rows, "theta_L_classic"), True),
        ("classic upper", _pairs(rows, "theta_U_classic"), True),
    ]
    if has_baseline:
        length.append(("DEFLATE", _pairs(rows, "baseline_len"), False))

    C_top = rows[-1].C
    xs, ys = table.active, table.y_size
    tl_g = analysis.theta_lower_series(C_top, xs, ys, table.k)
    tu_g = analysis.theta_upper_series(C_top, xs, ys, table.k)
    tl_d, tu_d = analysis.dedup_bounds_series(C_top, xs * ys, table.n)

    def incr(series: list[float]) -> list[tuple[float, float]]:
        return [(r.C, series[r.C - 1] - (series[r.C - 2] if r.C > 1 else 0.0)) for r in rows]

    delta = [
        ("generalized", _pairs(rows, "delta_gen"), False),
        ("classic", _pairs(rows, "delta_classic"), False),
        ("gen lower", incr(tl_g), True),
        ("gen upper", incr(tu_g), True),
        ("classic lower", incr(tl_d), True),
        ("classic upper", incr(tu_d), True),
    ]
    if has_baseline:
        prev: dict[int, float] = {r.C: r.baseline_len for r in rows if r.baseline_len is not None}
        bd = [(C, v - prev[C - 1]) for C, v in prev.items() if C - 1 in prev]
        if bd:
            delta.append(("DEFLATE", bd, False))

    ratio = [
        ("simulated", _pairs(rows, "ratio"), False),
        ("lower", [(r.C, r.theta_L_classic / r.theta_U_gen) for r in rows], True),
        ("upper", [(r.C, r.theta_U_classic / r.theta_L_gen) for r in rows], True),
    ]

    charts = {
        "length": ("Expected coded length", "bits", length),
        "delta": ("Bits per additional chunk", "bits/chunk", delta),
        "ratio": ("Generalization ratio", "classic / generalized", ratio),
    }
    written = []
    for suffix, (title, ylabel, series) in charts.items():
        target = stem.parent / f"{stem.name}-{suffix}.svg"
        try:
            target.write_text(_svg_chart(title, ylabel, series))
        except OSError as exc:
            raise OSError(f"cannot write plot to {target}: {exc}") from exc
        written.append(target)
    return written

