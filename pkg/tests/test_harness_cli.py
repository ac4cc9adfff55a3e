"""End-to-end command-line flows in temporary directories."""

import os

import pytest

from freqsteer.cli import main
from freqsteer.config import load_config


@pytest.fixture
def workspace(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        f"[dataset]\nroot = {tmp_path / 'data'}\ncount = 2\nsize = 16\nfactor = 4\n"
        "[diffusion]\ntimesteps = 6\n"
        "[schedule]\ntau_clipiqa = 2\ntau_lpips = 4\n"
        "[strategy]\nkind = iafs\nparticles = 2\niterations = 2\n"
        f"[output]\nroot = {tmp_path / 'runs'}\npng = false\n"
        "[run]\nseed = 3\n"
    )
    assert main(["gen-dataset", "--config", str(cfg)]) == 0
    return tmp_path, cfg


def _run_dirs(out_root):
    found = []
    for item in sorted(os.listdir(out_root)):
        item_dir = os.path.join(out_root, item)
        for leaf in sorted(os.listdir(item_dir)):
            found.append(os.path.join(item_dir, leaf))
    return found


def test_gen_dataset_writes_manifest(workspace):
    tmp_path, _ = workspace
    names = os.listdir(tmp_path / "data")
    assert "manifest.txt" in names
    assert "hr_000.rt" in names and "lr_001.rt" in names


def test_run_and_metrics_flow(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out.count("wrote") == 2  # one line per dataset item
    assert "calls=24" in out  # 2 particles * 2 iterations * 6 steps

    dirs = _run_dirs(tmp_path / "runs")
    assert len(dirs) == 2
    parsed = load_config(cfg)
    assert os.path.basename(dirs[0]) == f"iafs_3_{parsed.hash}"
    assert os.path.basename(os.path.dirname(dirs[0])) == "item_000"

    assert main(["metrics", dirs[0]]) == 0
    lines = capsys.readouterr().out
    for key in ("psnr", "ssim", "perceptual", "structural", "combined", "denoiser_calls"):
        assert f" {key} " in lines


def test_rerun_is_byte_identical(workspace):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg)]) == 0
    first = {}
    for d in _run_dirs(tmp_path / "runs"):
        first[d] = ((open(os.path.join(d, "metrics.txt"), "rb").read()),
                    open(os.path.join(d, "final.rt"), "rb").read())
    assert main(["run", "--config", str(cfg)]) == 0
    for d, (metrics, final) in first.items():
        assert open(os.path.join(d, "metrics.txt"), "rb").read() == metrics
        assert open(os.path.join(d, "final.rt"), "rb").read() == final


def test_threaded_run_matches_serial(workspace):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "serial")]) == 0
    assert main(["run", "--config", str(cfg), "--threads", "2",
                 "--out", str(tmp_path / "par")]) == 0
    serial = _run_dirs(tmp_path / "serial")
    par = _run_dirs(tmp_path / "par")
    assert [os.path.relpath(d, tmp_path / "serial") for d in serial] == \
           [os.path.relpath(d, tmp_path / "par") for d in par]
    for a, b in zip(serial, par):
        assert open(os.path.join(a, "metrics.txt"), "rb").read() == \
               open(os.path.join(b, "metrics.txt"), "rb").read()


def test_seed_override_changes_dir_name(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg), "--seed", "9"]) == 0
    capsys.readouterr()
    dirs = _run_dirs(tmp_path / "runs")
    assert all(os.path.basename(d).startswith("iafs_9_") for d in dirs)


def test_compare_flow(workspace, capsys):
    tmp_path, cfg = workspace
    cfg2 = tmp_path / "vanilla.ini"
    cfg2.write_text(cfg.read_text().replace("kind = iafs", "kind = vanilla"))
    assert main(["run", "--config", str(cfg)]) == 0
    assert main(["run", "--config", str(cfg2)]) == 0
    capsys.readouterr()
    dirs = _run_dirs(tmp_path / "runs")
    assert len(dirs) == 4
    assert main(["compare", *dirs, "--out", str(tmp_path / "report")]) == 0
    out = capsys.readouterr().out
    assert "| strategy |" in out
    assert "**" in out  # best-value marker
    assert "iafs" in out and "vanilla" in out
    assert (tmp_path / "report" / "compare.md").exists()


def test_compare_needs_two_dirs(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg)]) == 0
    capsys.readouterr()
    d = _run_dirs(tmp_path / "runs")[0]
    assert main(["compare", d]) == 2
    assert "config error" in capsys.readouterr().err


def test_compare_missing_dir_exits_3(workspace, capsys):
    tmp_path, _ = workspace
    assert main(["compare", str(tmp_path / "no_a"), str(tmp_path / "no_b")]) == 3
    assert "missing input" in capsys.readouterr().err


def test_compare_skips_incomplete_records(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg)]) == 0
    capsys.readouterr()
    dirs = _run_dirs(tmp_path / "runs")
    broken = os.path.join(dirs[1], "metrics.txt")
    with open(broken) as fh:
        text = fh.read()
    with open(broken, "w") as fh:
        fh.write(text.replace("end\n", ""))
    assert main(["compare", *dirs]) == 0
    out = capsys.readouterr().out
    assert "skipping incomplete" in out


def test_compare_key_mismatch_exits_3(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg)]) == 0
    capsys.readouterr()
    dirs = _run_dirs(tmp_path / "runs")
    with open(os.path.join(dirs[1], "metrics.txt"), "w") as fh:
        fh.write("psnr 30.0\nstrategy iafs\nend\n")
    assert main(["compare", *dirs]) == 3
    assert "metric keys differ" in capsys.readouterr().err


def test_spectra_requires_saved_latents(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg)]) == 0
    capsys.readouterr()
    d = _run_dirs(tmp_path / "runs")[0]
    assert main(["spectra", d]) == 3
    assert "--save-latents" in capsys.readouterr().err


def test_spectra_exports_per_step_profiles(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["run", "--config", str(cfg), "--save-latents"]) == 0
    capsys.readouterr()
    d = _run_dirs(tmp_path / "runs")[0]
    assert main(["spectra", d]) == 0
    spectra = sorted(os.listdir(os.path.join(d, "spectra")))
    assert len(spectra) == 12  # 2 iterations x 6 timesteps
    assert spectra[0] == "spectra_i01_t01.csv"
    with open(os.path.join(d, "spectra", spectra[0])) as fh:
        header = fh.readline().strip()
    assert header == "radius,power,log10_power"


def test_ablate_particle_sweep(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["ablate", "N=2,3", "--config", str(cfg),
                 "--out", str(tmp_path / "abl")]) == 0
    out = capsys.readouterr().out
    assert "cell {'particles': 2}" in out
    csv_path = tmp_path / "abl" / "ablate_N.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "particles,psnr,ssim,perceptual,structural,combined"
    assert len(lines) == 3


def test_ablate_tau_grid_skips_invalid_cells(workspace, capsys):
    tmp_path, cfg = workspace
    fast = tmp_path / "fast.ini"
    fast.write_text(cfg.read_text()
                    .replace("kind = iafs", "kind = iafs")
                    .replace("iterations = 2", "iterations = 1"))
    assert main(["ablate", "tau", "--config", str(fast),
                 "--out", str(tmp_path / "abl")]) == 0
    out = capsys.readouterr().out
    assert "threshold ordering violation" in out
    # grid is 10x10; with T=6 the valid region is tau_c <= tau_l <= 6
    valid = sum(1 for tc in range(10) for tl in range(10) if tc <= tl <= 6)
    assert out.count("cell {") == valid
    assert out.count("skip {") == 100 - valid
    assert (tmp_path / "abl" / "ablate_tau.csv").exists()


def test_ablate_bad_sweep_exits_2(workspace, capsys):
    tmp_path, cfg = workspace
    assert main(["ablate", "Q=1,2", "--config", str(cfg)]) == 2
    assert "config error" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[diffusion]\nwarp = 9\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_run_without_dataset_exits_3(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(f"[dataset]\nroot = {tmp_path / 'void'}\n")
    assert main(["run", "--config", str(cfg)]) == 3
    assert "missing input" in capsys.readouterr().err


def test_missing_config_file_exits_3(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "ghost.ini")]) == 3
    assert "missing input" in capsys.readouterr().err
