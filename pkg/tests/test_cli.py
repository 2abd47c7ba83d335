import json
import math

import pytest

from susyphoton import cli, fock_core, susy_states
from susyphoton.susy_states import SpinorState


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    lines = text.strip().splitlines()
    assert lines[0].startswith("# ")
    meta = json.loads(lines[0][2:])
    return meta, lines[1].split(","), [line.split(",") for line in lines[2:]]


def test_hur_scalar_limits(capsys):
    code, out, _ = run(capsys, "hur", "--m", "2", "--j", "1", "--z", "1e-4")
    assert code == 0
    meta, header, rows = csv_rows(out)
    assert header == ["re_z", "im_z", "sigma_q", "sigma_p", "product"]
    assert float(rows[0][-1]) == pytest.approx(1.5, abs=1e-6)
    assert meta["command"] == "hur"


def test_hur_susy_constant_column(capsys):
    code, out, _ = run(capsys, "hur", "--kind", "susy", "--z-grid", "-2:2:5,-1:1:3", "--k2", "0")
    assert code == 0
    _, _, rows = csv_rows(out)
    assert len(rows) == 15
    assert all(float(r[-1]) == pytest.approx(0.5, abs=1e-10) for r in rows)


def test_hur_multiple_k2_writes_one_file_each(tmp_path, capsys):
    out = tmp_path / "h.csv"
    code, _, _ = run(capsys, "hur", "--kind", "susy", "--z", "1", "--k2", "0", "1", "--out", str(out))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["h.k2_0.csv", "h.k2_1.csv"]


def test_empty_range_gives_header_only(capsys):
    code, out, _ = run(capsys, "hur", "--z-grid", "0:1:0")
    assert code == 0
    _, header, rows = csv_rows(out)
    assert header and rows == []


def test_bad_subspace_is_usage_error(capsys):
    code, _, err = run(capsys, "hur", "--m", "2", "--j", "2")
    assert code == 2
    assert "usage error" in err


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["hur", "--bogus"])
    assert exc.value.code == 2


def test_mandel_roots(capsys):
    code, out, _ = run(capsys, "mandel", "--kind", "susy", "--m", "1", "--z", "2", "--find-root")
    assert code == 0
    roots = [float(r[0]) for r in csv_rows(out)[2]]
    assert min(abs(r - 0.97561) for r in roots) < 1e-3
    code, out, _ = run(capsys, "mandel", "--kind", "susy", "--m", "2", "--j", "1", "--z", "3", "--find-root")
    assert min(abs(float(r[0]) - 0.48326) for r in csv_rows(out)[2]) < 1e-3


def test_mandel_no_crossing(capsys):
    code, _, err = run(capsys, "mandel", "--kind", "susy", "--m", "1", "--z", "2", "--find-root",
                       "--root-range", "2:4")
    assert code == 1
    assert "no Poissonian crossing" in err


def test_mandel_scalar_m1_is_zero(capsys):
    code, out, _ = run(capsys, "mandel", "--z-grid", "0.5:3:6")
    assert code == 0
    assert all(abs(float(r[1])) < 1e-10 for r in csv_rows(out)[2])


def test_wigner_outputs(tmp_path, capsys):
    path = tmp_path / "w.json"
    code, _, _ = run(capsys, "wigner", "--m", "2", "--z", "2.5", "--grid=-8:8:97,-8:8:97", "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["meta"]["min_value"] < 0
    assert len(doc["grid"]) == 97 * 97
    code, out, _ = run(capsys, "wigner", "--m", "1", "--z", "0", "--grid=-8:8:65,-8:8:65", "--format", "csv")
    assert code == 0
    meta, header, rows = csv_rows(out)
    assert header == ["q", "p", "W"] and len(rows) == 65 * 65
    assert meta["normalization_residual"] < 1e-8


def test_wigner_susy_caption(capsys):
    code, out, _ = run(capsys, "wigner", "--kind", "susy", "--m", "3", "--z", "2", "--k2", "0.6805165",
                       "--grid=-8:8:97,-8:8:97")
    assert code == 0
    assert json.loads(out)["meta"]["min_value"] < -1e-3


def test_wigner_small_grid_fails(capsys):
    code, _, err = run(capsys, "wigner", "--m", "2", "--z", "2.5", "--grid=-1:1:21,-1:1:21")
    assert code == 1
    assert "--grid=" in err


def test_phase_rows(capsys):
    code, out, _ = run(capsys, "phase", "--kind", "susy", "--z", "0.5", "1.5", "--k2", "0")
    assert code == 0
    _, header, rows = csv_rows(out)
    assert header[-1] == "status"
    betas = [float(r[4]) for r in rows]
    assert betas[1] - betas[0] == pytest.approx(2 * math.pi * (1.5**2 - 0.5**2), rel=1e-10)
    assert all(r[-1] == "ok" for r in rows)


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--m", "3", "--j", "1", "--z", "1")
    assert code == 0
    assert len(csv_rows(out)[2]) == 3


def test_config_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('m = 3\nj = 2\nz = ["1e-4"]\n')
    code, out, _ = run(capsys, "hur", "--config", str(cfg))
    assert float(csv_rows(out)[2][0][-1]) == pytest.approx(2.5, abs=1e-6)
    code, out, _ = run(capsys, "hur", "--config", str(cfg), "--j", "1")
    assert float(csv_rows(out)[2][0][-1]) == pytest.approx(1.5, abs=1e-6)
    cfg.write_text("nonsense = 1\n")
    code, _, _ = run(capsys, "hur", "--config", str(cfg))
    assert code == 2


def test_output_is_deterministic(tmp_path, monkeypatch, capsys):
    args = ["hur", "--kind", "susy", "--m", "3", "--j", "1", "--z-grid", "-2:2:9,-2:2:9", "--k2", "1.3"]
    first = run(capsys, *args)[1]
    monkeypatch.setenv("SUSYPHOTON_THREADS", "1")
    second = run(capsys, *args)[1]
    assert first == second


def test_verify_quick_passes(capsys):
    code, out, _ = run(capsys, "verify", "quick")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] and not doc["failures"]


def test_verify_catches_sign_flip(monkeypatch, capsys):
    honest = susy_states.sao_power_apply

    def flipped(k2, m, s):
        good = honest(k2, m, s)
        lower = s.lower if m == 1 else fock_core.power_annihilate(s.lower, m - 1)
        shift = lower * (m * k2)
        return SpinorState(good.upper - 2 * shift, good.lower)

    monkeypatch.setattr(susy_states, "sao_power_apply", flipped)
    code, out, _ = run(capsys, "verify", "quick")
    assert code == 1
    failures = json.loads(out)["failures"]
    assert any("eigen-residual" in f for f in failures)
