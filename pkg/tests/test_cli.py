import json
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from assouad import __version__
from assouad.cli import _threads, main
from assouad.config import ConfigError, load_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

EXPECTED = {
    "cantor_formula": 0,
    "cantor_estimate": 0,
    "gallery_scan": 0,
    "gibbs_formula": 0,
    "gibbs_ruelle": 0,
    "reference_carpet": 0,
    "osc_guard": 3,
}


def _run(cfg, out, *extra):
    return main(["run", str(cfg), "--out", str(out), *extra])


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_config_exit_codes(name, tmp_path):
    assert _run(CONFIGS / f"{name}.yaml", tmp_path) == EXPECTED[name]
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1
    doc = json.loads(files[0].read_text())
    assert doc["version"] == __version__
    assert doc["config_hash"] == load_config(CONFIGS / f"{name}.yaml").hash
    assert doc["status"] == ("refused" if EXPECTED[name] == 3 else "ok")


@pytest.mark.parametrize("name", ["cantor_estimate", "gallery_scan", "gibbs_ruelle", "reference_carpet"])
def test_reruns_are_byte_identical(name, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(CONFIGS / f"{name}.yaml", a) == 0
    assert _run(CONFIGS / f"{name}.yaml", b, "--threads", "3") == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_formula_json_content(tmp_path):
    _run(CONFIGS / "cantor_formula.yaml", tmp_path)
    doc = json.loads((tmp_path / "cantor_formula.json").read_text())
    assert doc["exact"] == "2*log(2)/log(3)"
    assert doc["witness"] == {"letter": 0}


def test_refusal_payload(tmp_path):
    _run(CONFIGS / "osc_guard.yaml", tmp_path)
    doc = json.loads(next(tmp_path.glob("*.json")).read_text())
    assert doc["error"]["details"]["min_growth"] >= 1.4


def _write(tmp_path, doc):
    p = tmp_path / "c.yaml"
    p.write_text(yaml.safe_dump(doc) if not isinstance(doc, str) else doc)
    return p


BAD = [
    "system: [unclosed",
    {"system": {"kind": "cantor"}, "weights": {"kind": "constant", "p": ["1/2", "1/2"]},
     "command": {"name": "formula"}, "extra": 1},
    {"system": {"kind": "nope"}, "command": {"name": "formula"}},
    {"system": {"kind": "cantor"}, "weights": {"kind": "constant", "p": ["1/2", "1/3"]},
     "command": {"name": "formula"}},
    {"system": {"kind": "cantor"}, "weights": {"kind": "constant", "p": ["1/2", "1/2"]},
     "command": {"name": "estimate", "samples": 3}},
    {"system": {"kind": "cantor"}, "weights": {"kind": "constant", "p": ["1/2", "1/2"]},
     "command": {"name": "estimate", "points": ["0"], "depth": 100000}},
    {"system": {"kind": "cantor"}, "weights": {"kind": "constant", "p": ["1/2", "1/2"]},
     "command": {"name": "sponge"}},
    {"system": {"kind": "cantor"}, "command": {"name": "unknown"}},
]


@pytest.mark.parametrize("i", range(len(BAD)))
def test_schema_errors_exit_2(i, tmp_path):
    p = _write(tmp_path, BAD[i])
    with pytest.raises(ConfigError):
        load_config(p)
    assert _run(p, tmp_path / "out") == 2


def test_missing_file_exit_2(tmp_path):
    assert _run(tmp_path / "absent.yaml", tmp_path) == 2


def test_reproduce_exit_codes(tmp_path, capsys):
    assert main(["reproduce", "no-such-target"]) == 2
    assert main(["reproduce", "constant-weight-reduction", "--out", str(tmp_path)]) == 0
    assert "PASS constant-weight-reduction" in capsys.readouterr().out
    assert json.loads((tmp_path / "reproduce_constant-weight-reduction.json").read_text())["passed"] is True
    # the recorded reference for this example disagrees with the theorem value
    assert main(["reproduce", "bm-example"]) == 1


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("ASSOUAD_THREADS", "5")
    assert _threads(None) == 5
    assert _threads(2) == 2
    monkeypatch.setenv("ASSOUAD_THREADS", "many")
    assert _threads(None) is None
    monkeypatch.delenv("ASSOUAD_THREADS")
    assert _threads(None) is None


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "assouad", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout


def test_natural_scale_base(tmp_path):
    doc = {"system": {"kind": "cantor"}, "weights": {"kind": "constant", "p": ["1/4", "3/4"]},
           "command": {"name": "estimate", "points": ["0"], "depth": 16, "min_gap": 4,
                       "scale_base": "natural"}}
    assert _run(_write(tmp_path, doc), tmp_path / "o") == 0
    out = json.loads((tmp_path / "o" / "estimate.json").read_text())
    assert out["scale_base"] == 3
    enc = out["points"][0]["pointwise"]["enclosure"]
    # on triadic scales the Bernoulli ball at 0 is exactly a cylinder
    assert enc["lo"] == enc["hi"] == pytest.approx(1.2618595071429148, rel=1e-14)
    doc["system"] = {"kind": "similarity", "ratios": ["1/3", "1/4"], "translations": ["0", "3/4"]}
    assert _run(_write(tmp_path, doc), tmp_path / "p") == 2
    doc["command"]["scale_base"] = "1/2"
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, doc))
