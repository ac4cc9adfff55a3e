"""Run configuration: a small INI surface with a canonical hash.

Every key has a default, unknown sections or keys are hard errors, and the
merged (defaults + file) state renders to one canonical text whose sha256
prefix names the run directory. Two configs agree iff their hashes agree.
"""

import configparser
import hashlib
import io
from dataclasses import dataclass

from .diffusion import NoiseSchedule, geometric_schedule
from .errors import ConfigError, MissingInputError
from .rewards import RewardSchedule
from .steering import AfsConfig
from .strategies import StrategyConfig

# section -> key -> (type tag, default). Tags: int, float, bool, str and
# their optional variants where the empty string means "unset".
SCHEMA = {
    "run": {
        "seed": ("int", 0),
        "seeds": ("optstr", None),  # "a:b" half-open range or comma list
        "threads": ("int", 1),
    },
    "dataset": {
        "root": ("str", "dataset"),
        "count": ("int", 8),
        "size": ("int", 64),
        "channels": ("int", 3),
        "factor": ("int", 4),
        "noise_std": ("float", 0.0),
        "seed": ("int", 0),
    },
    "diffusion": {
        "timesteps": ("int", 15),
        "sigma_max": ("float", 1.0),
        "sigma_min": ("float", 0.05),
    },
    "model": {
        "kind": ("str", "synthetic-sr"),
        "detail_gain": ("float", 1.0),
        "detail_rms": ("float", 0.25),
        "texture_mix": ("float", 0.25),
        "texture_seed": ("int", 0),
    },
    "schedule": {
        "kind": ("str", "segmented"),
        "tau_clipiqa": ("int", 4),
        "tau_lpips": ("int", 7),
        "structural_scale": ("float", 0.5),
        "cutoff": ("optfloat", None),
    },
    "strategy": {
        "kind": ("str", "iafs"),
        "particles": ("int", 10),
        "iterations": ("int", 3),
        "beams": ("int", 5),
        "branch": ("int", 2),
        "fk_temperature": ("float", 1.0),
        "kds_step": ("float", 0.5),
        "kds_bandwidth": ("optfloat", None),
    },
    "afs": {
        "enabled": ("bool", True),
        "top_k": ("int", 2),
        "split": ("str", "spatial"),
        "kernel": ("int", 9),
        "sigma": ("float", 1.0),
        "cutoff": ("optfloat", None),
        "similarity_on_clean": ("bool", False),
    },
    "output": {
        "root": ("str", "runs"),
        "save_latents": ("bool", False),
        "png": ("bool", True),
    },
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _coerce(section, key, tag, raw):
    where = f"{section}.{key}"
    if tag in ("optstr", "optfloat") and raw.strip() == "":
        return None
    try:
        if tag == "int":
            return int(raw)
        if tag in ("float", "optfloat"):
            return float(raw)
        if tag == "bool":
            word = raw.strip().lower()
            if word not in _BOOL_WORDS:
                raise ValueError(raw)
            return _BOOL_WORDS[word]
        return raw.strip()
    except ValueError:
        raise ConfigError(f"bad value for {where}: {raw!r} (expected {tag})") from None


def _render(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class RunConfig:
    values: dict  # section -> key -> typed value

    def get(self, section, key):
        return self.values[section][key]

    def canonical_text(self) -> str:
        lines = []
        for section in sorted(self.values):
            for key in sorted(self.values[section]):
                lines.append(f"{section}.{key} = {_render(self.values[section][key])}")
        return "\n".join(lines) + "\n"

    @property
    def hash(self) -> str:
        """Eight hex chars over the canonical text minus the [run] section.

        Seeds and thread counts identify an invocation, not the experiment;
        the seed is already part of the run directory name.
        """
        lines = [ln for ln in self.canonical_text().splitlines() if not ln.startswith("run.")]
        return hashlib.sha256(("\n".join(lines) + "\n").encode()).hexdigest()[:8]

    def noise_schedule(self) -> NoiseSchedule:
        d = self.values["diffusion"]
        return geometric_schedule(d["timesteps"], d["sigma_max"], d["sigma_min"])

    def reward_schedule(self) -> RewardSchedule:
        s = self.values["schedule"]
        try:
            return RewardSchedule(
                kind=s["kind"],
                timesteps=self.values["diffusion"]["timesteps"],
                tau_clipiqa=s["tau_clipiqa"],
                tau_lpips=s["tau_lpips"],
                structural_scale=s["structural_scale"],
                cutoff=s["cutoff"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def afs_config(self) -> AfsConfig:
        a = self.values["afs"]
        try:
            return AfsConfig(
                enabled=a["enabled"],
                top_k=a["top_k"],
                split=a["split"],
                kernel=a["kernel"],
                sigma=a["sigma"],
                cutoff=a["cutoff"],
                similarity_on_clean=a["similarity_on_clean"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def strategy_config(self) -> StrategyConfig:
        s = self.values["strategy"]
        return StrategyConfig(
            kind=s["kind"],
            particles=s["particles"],
            iterations=s["iterations"],
            beams=s["beams"],
            branch=s["branch"],
            fk_temperature=s["fk_temperature"],
            kds_step=s["kds_step"],
            kds_bandwidth=s["kds_bandwidth"],
            afs=self.afs_config(),
            schedule=self.reward_schedule(),
            save_latents=self.values["output"]["save_latents"],
        )

    def seed_list(self):
        spec = self.values["run"]["seeds"]
        if spec is None:
            return [self.values["run"]["seed"]]
        return parse_seed_list(spec)


def parse_seed_list(spec: str):
    """Parse "a:b" as the half-open range [a, b) or "1,2,3" as a list."""
    spec = spec.strip()
    try:
        if ":" in spec:
            lo, hi = spec.split(":", 1)
            lo, hi = int(lo), int(hi)
            if hi <= lo:
                raise ValueError
            return list(range(lo, hi))
        return [int(part) for part in spec.split(",")]
    except ValueError:
        raise ConfigError(f"bad seed list {spec!r}; use 'a:b' or comma-separated integers") from None


def default_config() -> RunConfig:
    return RunConfig({s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()})


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    cfg = default_config()
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            tag = SCHEMA[section][key][0]
            cfg.values[section][key] = _coerce(section, key, tag, raw)
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise MissingInputError(f"config file not found: {path}") from None
    return parse_config(text)


def _validate(cfg: RunConfig):
    model = cfg.get("model", "kind")
    if model != "synthetic-sr":
        raise ConfigError(f"unknown model kind {model!r}")
    if cfg.get("dataset", "factor") < 1:
        raise ConfigError("dataset.factor must be >= 1")
    if cfg.get("dataset", "size") % max(cfg.get("dataset", "factor"), 1) != 0:
        raise ConfigError("dataset.size must be divisible by dataset.factor")
    if cfg.get("diffusion", "timesteps") < 1:
        raise ConfigError("diffusion.timesteps must be >= 1")
    if not 0 < cfg.get("diffusion", "sigma_min") <= cfg.get("diffusion", "sigma_max"):
        raise ConfigError("need 0 < sigma_min <= sigma_max")
    if cfg.get("run", "threads") < 1:
        raise ConfigError("run.threads must be >= 1")
    # Strategy and reward construction double as validation.
    try:
        cfg.strategy_config()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
