"""Run record serialization.

A run directory is named {strategy}_{seed}_{confighash} and holds:

    config.ini    canonical config text the hash was computed from
    trace.csv     one row per scored step (selection, reward, fusion stats)
    final.rt      final tensor, raw format
    final.png     8-bit preview (optional)
    metrics.txt   deterministic "key value" block ending with the sentinel
    timing.txt    wall-clock figures, kept out of the metric block on purpose
    latents/      refined latent per (iteration, timestep), opt-in

The metric block is byte-stable for a given (config, seed, dataset); wall
time lives in timing.txt so reruns can be compared bytewise. metrics.txt is
written last and terminated with an "end" line so interrupted runs are
detectable.
"""

import csv
import io
import os

from .errors import MissingInputError
from .tensorfile import write_png, write_tensor

METRICS_NAME = "metrics.txt"
TRACE_NAME = "trace.csv"
SENTINEL = "end"

_TRACE_FIELDS = (
    "iteration", "timestep", "chosen", "reward", "segment", "wall_ms",
    "topk", "topk_weights", "adain_dmean", "adain_dstd",
)


def run_dir_name(strategy: str, seed: int, config_hash: str) -> str:
    return f"{strategy}_{seed}_{config_hash}"


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_metrics(metrics: dict) -> str:
    lines = [f"{key} {_fmt(metrics[key])}" for key in sorted(metrics)]
    lines.append(SENTINEL)
    return "\n".join(lines) + "\n"


def write_run(record, out_dir, config_text: str = None, png: bool = True):
    """Write a RunRecord to `out_dir`; metrics go last (crash detection)."""
    os.makedirs(out_dir, exist_ok=True)
    if config_text is not None:
        with open(os.path.join(out_dir, "config.ini"), "w", encoding="utf-8") as fh:
            fh.write(config_text)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_TRACE_FIELDS)
    for row in record.trace:
        writer.writerow([
            row.iteration, row.timestep, row.chosen, _fmt(row.reward), row.segment,
            _fmt(row.wall_ms),
            "|".join(str(i) for i in row.topk),
            "|".join(repr(w) for w in row.topk_weights),
            _fmt(row.adain_dmean), _fmt(row.adain_dstd),
        ])
    with open(os.path.join(out_dir, TRACE_NAME), "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    write_tensor(os.path.join(out_dir, "final.rt"), record.final)
    if png:
        write_png(os.path.join(out_dir, "final.png"), record.final)
    if record.latents:
        latent_dir = os.path.join(out_dir, "latents")
        os.makedirs(latent_dir, exist_ok=True)
        for (i, t), latent in sorted(record.latents.items()):
            write_tensor(os.path.join(latent_dir, f"latent_i{i:02d}_t{t:02d}.rt"), latent)
    with open(os.path.join(out_dir, "timing.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"wall_time_s {record.wall_time_s!r}\n")
        if record.trace:
            mean_ms = sum(r.wall_ms for r in record.trace) / len(record.trace)
            fh.write(f"mean_step_ms {mean_ms!r}\n")
    block = dict(record.metrics)
    block.setdefault("strategy", record.strategy)
    block.setdefault("seed", record.seed)
    block.setdefault("iterations", record.iterations)
    block.setdefault("timesteps", record.timesteps)
    block.setdefault("denoiser_calls", record.denoiser_calls)
    with open(os.path.join(out_dir, METRICS_NAME), "w", encoding="utf-8") as fh:
        fh.write(render_metrics(block))


def read_metrics(run_dir):
    """Parse metrics.txt; a missing file or absent sentinel raises
    MissingInputError (the record is incomplete)."""
    path = os.path.join(run_dir, METRICS_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise MissingInputError(f"metric block not found: {path}") from None
    if not lines or lines[-1] != SENTINEL:
        raise MissingInputError(f"metric block incomplete (no terminal sentinel): {path}")
    out = {}
    for line in lines[:-1]:
        key, _, raw = line.partition(" ")
        if not raw:
            raise MissingInputError(f"malformed metric line {line!r} in {path}")
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        out[key] = value
    return out


def read_trace(run_dir):
    path = os.path.join(run_dir, TRACE_NAME)
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    except FileNotFoundError:
        raise MissingInputError(f"trace not found: {path}") from None
