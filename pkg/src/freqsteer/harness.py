"""Command implementations behind the CLI.

Each cmd_* function takes parsed inputs, performs the work, prints plain
log lines, and returns an exit code (0 on success). Typed errors bubble up
to the CLI, which maps them to exit codes.
"""

import csv
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import dataset as ds
from . import records
from .config import RunConfig
from .diffusion import SyntheticSrDenoiser, TextureBank
from .errors import ConfigError, MissingInputError
from .metrics import psnr, ssim
from .rewards import perceptual_proxy, structural_proxy
from .spectral import rapsd
from .strategies import run_strategy
from .tensorfile import read_tensor

QUALITY_KEYS = ("psnr", "ssim", "perceptual", "structural", "combined")
# Direction for best/second-best markers in comparison tables.
_LOWER_BETTER = {"structural"}


def build_denoiser(cfg, lr, noise_schedule):
    model = cfg.values["model"]
    bank = TextureBank(seed=model["texture_seed"], detail_rms=model["detail_rms"],
                       mix=model["texture_mix"])
    return SyntheticSrDenoiser(lr, noise_schedule, cfg.get("dataset", "factor"), bank,
                               detail_gain=model["detail_gain"])


def quality_metrics(final, hr, reward_schedule):
    perceptual = perceptual_proxy(final, cutoff=reward_schedule.cutoff)
    structural = structural_proxy(final, hr)
    return {
        "psnr": psnr(final, hr),
        "ssim": ssim(final, hr),
        "perceptual": perceptual,
        "structural": structural,
        "combined": perceptual - structural / reward_schedule.structural_scale,
    }


def run_one(cfg, out_root, item, seed, noise_schedule, png=True):
    """Run the configured strategy on one dataset item and persist it."""
    idx = item[0]
    data_root = cfg.get("dataset", "root")
    hr, lr = ds.load_item(data_root, item)
    denoiser = build_denoiser(cfg, lr, noise_schedule)
    strategy_cfg = cfg.strategy_config()
    record = run_strategy(strategy_cfg, denoiser, noise_schedule, seed)
    record.metrics = quality_metrics(record.final, hr, strategy_cfg.schedule)
    record.metrics["item"] = idx
    record.config_hash = cfg.hash
    out_dir = os.path.join(out_root, f"item_{idx:03d}",
                           records.run_dir_name(record.strategy, seed, cfg.hash))
    records.write_run(record, out_dir, config_text=cfg.canonical_text(), png=png)
    return out_dir, record


def cmd_gen_dataset(cfg):
    d = cfg.values["dataset"]
    rows = ds.generate_dataset(d["root"], d["count"], d["size"], d["channels"],
                               d["factor"], d["noise_std"], d["seed"])
    print(f"wrote {len(rows)} items under {d['root']}")
    return 0


def cmd_run(cfg, out_override=None, threads=None, save_latents=None, seed_override=None):
    if save_latents:
        cfg.values["output"]["save_latents"] = True
    if seed_override is not None:
        cfg.values["run"]["seed"] = seed_override
        cfg.values["run"]["seeds"] = None
    out_root = out_override or cfg.get("output", "root")
    data_root = cfg.get("dataset", "root")
    _, items = ds.load_manifest(data_root)
    noise_schedule = cfg.noise_schedule()
    png = cfg.get("output", "png")
    seeds = cfg.seed_list()
    workers = threads or cfg.get("run", "threads")
    tasks = [(item, seed) for item in items for seed in seeds]

    def job(task):
        item, seed = task
        return run_one(cfg, out_root, item, seed, noise_schedule, png=png)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, tasks))
    else:
        results = [job(t) for t in tasks]
    for out_dir, record in results:
        print(f"wrote {out_dir} calls={record.denoiser_calls} wall={record.wall_time_s:.2f}s")
    return 0


def _parse_sweep(spec: str):
    """Sweep forms: N=5,10,20 (particles), K=0,1,2 (fusion neighbors),
    n=1,2,3 or n=1:5 (outer iterations), tau (full threshold grid)."""
    spec = spec.strip()
    if spec == "tau":
        return "tau", None
    name, _, raw = spec.partition("=")
    name = name.strip()
    if name not in ("N", "K", "n") or not raw:
        raise ConfigError(f"bad sweep {spec!r}; use N=..., K=..., n=..., or tau")
    try:
        if ":" in raw:
            lo, hi = raw.split(":", 1)
            values = list(range(int(lo), int(hi)))
        else:
            values = [int(v) for v in raw.split(",")]
    except ValueError:
        raise ConfigError(f"bad sweep values in {spec!r}") from None
    if not values:
        raise ConfigError(f"empty sweep {spec!r}")
    return name, values


def _cell_configs(cfg, kind, values):
    """Yield (cell label fields, modified config) per sweep cell; invalid
    threshold cells yield None configs so the caller can print the skip."""
    if kind == "N":
        for v in values:
            c = _with_strategy(cfg, particles=v)
            yield {"particles": v}, c
    elif kind == "n":
        for v in values:
            yield {"iterations": v}, _with_strategy(cfg, iterations=v)
    elif kind == "K":
        for v in values:
            c = _clone(cfg)
            c.values["afs"]["top_k"] = v
            yield {"top_k": v}, c
    else:
        for tau_c in range(0, 10):
            for tau_l in range(0, 10):
                label = {"tau_clipiqa": tau_c, "tau_lpips": tau_l}
                if tau_l < tau_c or tau_l > cfg.get("diffusion", "timesteps"):
                    yield label, None
                    continue
                c = _clone(cfg)
                c.values["schedule"]["tau_clipiqa"] = tau_c
                c.values["schedule"]["tau_lpips"] = tau_l
                yield label, c


def _clone(cfg):
    return RunConfig({s: dict(kv) for s, kv in cfg.values.items()})


def _with_strategy(cfg, **kv):
    c = _clone(cfg)
    c.values["strategy"].update(kv)
    return c


def cmd_ablate(cfg, sweep_spec, out_override=None, threads=None):
    kind, values = _parse_sweep(sweep_spec)
    out_root = out_override or cfg.get("output", "root")
    os.makedirs(out_root, exist_ok=True)
    data_root = cfg.get("dataset", "root")
    _, items = ds.load_manifest(data_root)
    seeds = cfg.seed_list()
    rows = []
    label_keys = None
    for label, cell_cfg in _cell_configs(cfg, kind, values):
        label_keys = list(label)
        if cell_cfg is None:
            print(f"skip {label}: threshold ordering violation")
            continue
        try:
            strategy_cfg = cell_cfg.strategy_config()
        except (ConfigError, ValueError) as exc:
            print(f"skip {label}: {exc}")
            continue
        noise_schedule = cell_cfg.noise_schedule()
        per_key = {k: [] for k in QUALITY_KEYS}
        for item in items:
            hr, lr = ds.load_item(data_root, item)
            denoiser = build_denoiser(cell_cfg, lr, noise_schedule)
            for seed in seeds:
                record = run_strategy(strategy_cfg, denoiser, noise_schedule, seed)
                q = quality_metrics(record.final, hr, strategy_cfg.schedule)
                for k in QUALITY_KEYS:
                    per_key[k].append(q[k])
        row = dict(label)
        for k in QUALITY_KEYS:
            row[k] = statistics.median(per_key[k])
        rows.append(row)
        print(f"cell {label}: combined={row['combined']:.6g}")
    if not rows:
        raise ConfigError(f"sweep {sweep_spec!r} produced no valid cells")
    out_path = os.path.join(out_root, f"ablate_{kind}.csv")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(label_keys + list(QUALITY_KEYS))
        for row in rows:
            writer.writerow([row[k] for k in label_keys] + [repr(row[k]) for k in QUALITY_KEYS])
    print(f"wrote {out_path} ({len(rows)} rows)")
    return 0


def cmd_spectra(run_dir, out_override=None):
    latent_dir = os.path.join(run_dir, "latents")
    if not os.path.isdir(latent_dir):
        raise MissingInputError(
            f"no latents under {run_dir}; rerun the strategy with --save-latents")
    names = sorted(n for n in os.listdir(latent_dir) if n.endswith(".rt"))
    if not names:
        raise MissingInputError(
            f"latent directory is empty: {latent_dir}; rerun with --save-latents")
    out_dir = out_override or os.path.join(run_dir, "spectra")
    os.makedirs(out_dir, exist_ok=True)
    tiny = 1e-300
    for name in names:
        x = read_tensor(os.path.join(latent_dir, name))
        profile = rapsd(x)
        out_path = os.path.join(out_dir, name.replace("latent_", "spectra_").replace(".rt", ".csv"))
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["radius", "power", "log10_power"])
            for r, p in zip(profile.radii, profile.power):
                writer.writerow([int(r), repr(float(p)), repr(float(np.log10(p + tiny)))])
    print(f"wrote {len(names)} spectra files under {out_dir}")
    return 0


def _collect_runs(run_dirs):
    """Read metric blocks; incomplete records are skipped with a warning,
    missing directories are hard errors."""
    collected = []
    for d in run_dirs:
        if not os.path.isdir(d):
            raise MissingInputError(f"run directory not found: {d}")
        try:
            collected.append((d, records.read_metrics(d)))
        except MissingInputError as exc:
            print(f"warning: skipping incomplete record: {exc}")
    return collected


def cmd_compare(run_dirs, out_override=None):
    if len(run_dirs) < 2:
        raise ConfigError("compare needs at least two run directories")
    collected = _collect_runs(run_dirs)
    if not collected:
        raise MissingInputError("no complete run records to compare")
    key_sets = {frozenset(k for k in m if k in QUALITY_KEYS) for _, m in collected}
    if len(key_sets) > 1:
        union = set().union(*key_sets)
        common = set.intersection(*(set(s) for s in key_sets))
        raise MissingInputError(
            f"metric keys differ across runs: {sorted(union - common)}")
    keys = sorted(next(iter(key_sets)))
    by_strategy = {}
    for _, m in collected:
        by_strategy.setdefault(str(m.get("strategy", "?")), []).append(m)
    table_rows = []
    for strategy in sorted(by_strategy):
        row = {"strategy": strategy, "runs": len(by_strategy[strategy])}
        for k in keys:
            row[k] = statistics.median(m[k] for m in by_strategy[strategy])
        table_rows.append(row)
    lines = ["| strategy | runs | " + " | ".join(keys) + " |",
             "|" + "---|" * (len(keys) + 2)]
    marks = {}
    for k in keys:
        ordered = sorted(table_rows, key=lambda r: r[k], reverse=k not in _LOWER_BETTER)
        marks[k] = [r["strategy"] for r in ordered[:2]]
    for row in table_rows:
        cells = [row["strategy"], str(row["runs"])]
        for k in keys:
            text = f"{row[k]:.6g}"
            if len(table_rows) > 1:
                if marks[k][0] == row["strategy"]:
                    text = f"**{text}**"
                elif len(marks[k]) > 1 and marks[k][1] == row["strategy"]:
                    text = f"*{text}*"
            cells.append(text)
        lines.append("| " + " | ".join(cells) + " |")
    table = "\n".join(lines)
    print(table)
    if out_override:
        os.makedirs(out_override, exist_ok=True)
        path = os.path.join(out_override, "compare.md")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(table + "\n")
        print(f"wrote {path}")
    return 0


def cmd_metrics(run_dirs):
    for d in run_dirs:
        if not os.path.isdir(d):
            raise MissingInputError(f"run directory not found: {d}")
        block = records.read_metrics(d)
        for key in sorted(block):
            print(f"{d} {key} {block[key]}")
    return 0
