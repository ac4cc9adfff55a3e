"""Config parsing, canonicalization and hashing."""

import pytest

from freqsteer.config import (
    RunConfig,
    default_config,
    load_config,
    parse_config,
    parse_seed_list,
)
from freqsteer.errors import ConfigError, MissingInputError


def test_defaults_round_numbers():
    cfg = default_config()
    assert cfg.get("diffusion", "timesteps") == 15
    assert cfg.get("strategy", "kind") == "iafs"
    assert cfg.get("strategy", "particles") == 10
    assert cfg.get("strategy", "iterations") == 3
    assert cfg.get("schedule", "tau_clipiqa") == 4
    assert cfg.get("schedule", "tau_lpips") == 7
    assert cfg.get("dataset", "size") == 64
    assert cfg.get("dataset", "factor") == 4


def test_canonical_text_sorted_and_stable():
    cfg = default_config()
    text = cfg.canonical_text()
    lines = [ln for ln in text.splitlines() if ln]
    assert lines == sorted(lines)
    assert text == cfg.canonical_text()
    assert "diffusion.timesteps = 15" in lines


def test_hash_ignores_formatting():
    a = parse_config("[diffusion]\ntimesteps = 12\n")
    b = parse_config("\n[diffusion]\n\ntimesteps   =   12\n\n")
    assert a.hash == b.hash
    c = parse_config("[diffusion]\ntimesteps = 13\n")
    assert c.hash != a.hash


def test_hash_ignores_run_section():
    a = parse_config("[run]\nseed = 1\n")
    b = parse_config("[run]\nseed = 999\nthreads = 8\n")
    assert a.hash == b.hash == default_config().hash
    assert len(a.hash) == 8
    int(a.hash, 16)  # hex digest prefix


def test_hash_sensitive_to_every_other_section():
    base = default_config().hash
    for text in (
        "[dataset]\nnoise_std = 0.01\n",
        "[schedule]\ntau_lpips = 9\n",
        "[strategy]\nparticles = 7\n",
        "[afs]\ntop_k = 3\n",
        "[output]\npng = false\n",
    ):
        assert parse_config(text).hash != base, text


def test_unknown_section_and_key():
    with pytest.raises(ConfigError, match="section"):
        parse_config("[turbo]\nx = 1\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("[diffusion]\nwarp = 9\n")


def test_bad_values():
    with pytest.raises(ConfigError):
        parse_config("[diffusion]\ntimesteps = soon\n")
    with pytest.raises(ConfigError):
        parse_config("[diffusion]\ntimesteps = 0\n")
    with pytest.raises(ConfigError):
        parse_config("[diffusion]\nsigma_min = 2.0\n")  # above sigma_max
    with pytest.raises(ConfigError):
        parse_config("[dataset]\nsize = 65\n")  # not divisible by factor 4
    with pytest.raises(ConfigError):
        parse_config("[model]\nkind = resnet\n")
    with pytest.raises(ConfigError):
        parse_config("[strategy]\nkind = dream\n")
    with pytest.raises(ConfigError):
        parse_config("[schedule]\ntau_clipiqa = 9\ntau_lpips = 3\n")
    with pytest.raises(ConfigError):
        # segmented thresholds must fit under the ladder length
        parse_config("[diffusion]\ntimesteps = 5\n")
    with pytest.raises(ConfigError):
        parse_config("[run]\nthreads = 0\n")
    with pytest.raises(ConfigError):
        parse_config("not an ini file")


def test_seed_list_parsing():
    assert parse_seed_list("0:5") == [0, 1, 2, 3, 4]
    assert parse_seed_list("3:4") == [3]
    assert parse_seed_list("7") == [7]
    assert parse_seed_list("1,5,2") == [1, 5, 2]
    with pytest.raises(ConfigError):
        parse_seed_list("5:5")
    with pytest.raises(ConfigError):
        parse_seed_list("a:b")
    with pytest.raises(ConfigError):
        parse_seed_list("1;2")


def test_seed_list_from_config():
    assert parse_config("[run]\nseed = 9\n").seed_list() == [9]
    assert parse_config("[run]\nseeds = 0:3\n").seed_list() == [0, 1, 2]


def test_typed_accessors_build_objects():
    cfg = parse_config(
        "[diffusion]\ntimesteps = 8\n"
        "[strategy]\nkind = beam\nbeams = 2\nbranch = 3\n"
        "[afs]\nsplit = dft\ncutoff = 4.0\n"
        "[schedule]\nkind = linear\n"
    )
    ns = cfg.noise_schedule()
    assert ns.timesteps == 8
    sc = cfg.strategy_config()
    assert sc.kind == "beam" and sc.beams == 2 and sc.branch == 3
    assert sc.afs.split == "dft" and sc.afs.cutoff == 4.0
    assert sc.schedule.kind == "linear"
    assert sc.schedule.timesteps == 8  # follows the diffusion ladder


def test_bool_and_none_rendering():
    cfg = parse_config("[output]\nsave_latents = true\npng = false\n")
    text = cfg.canonical_text()
    assert "output.save_latents = true" in text
    assert "output.png = false" in text
    assert "afs.cutoff = \n" in text  # None renders empty


def test_load_config_missing_file(tmp_path):
    with pytest.raises(MissingInputError):
        load_config(tmp_path / "nope.ini")
    p = tmp_path / "ok.ini"
    p.write_text("[diffusion]\ntimesteps = 12\n")
    assert load_config(p).get("diffusion", "timesteps") == 12
