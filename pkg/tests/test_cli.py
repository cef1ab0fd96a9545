import hashlib
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from moulin.cli import main, share_name


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_params_table(capsys):
    code, out, _ = run(capsys, "params", "4", "3", "3", "2")
    assert code == 0
    rows = {line.split("\t")[0]: line.split("\t") for line in out.splitlines()[1:]}
    assert rows["alpha"][1:] == ["3", "3", "ok"]
    assert rows["beta"][1:] == ["1", "1", "ok"]
    assert rows["M"][1:] == ["6", "6", "ok"]
    assert "MISMATCH" not in out


def test_params_json(capsys):
    code, out, _ = run(capsys, "params", "7", "4", "6", "5", "--json", "--c", "2")
    data = json.loads(out)
    assert code == 0
    assert (data["alpha"], data["beta"], data["M"]) == (81, 27, 324)
    assert [r["quantity"] for r in data["rows"]][3:5] == ["beta_1", "beta_2"]
    assert data["rows"][4]["closed_form"] == 45


def test_params_rejects_bad_input(capsys):
    code, _, err = run(capsys, "params", "3", "3", "3", "2")
    assert code == 2 and "error" in err


def test_params_plot(capsys, tmp_path):
    code, _, _ = run(capsys, "params", "6", "4", "5", "3", "--plot", str(tmp_path / "t.png"))
    assert code == 0
    assert (tmp_path / "t.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


@pytest.fixture
def encoded(tmp_path, rng, capsys):
    data = rng.bytes(3000)
    src = tmp_path / "in.bin"
    src.write_bytes(data)
    out = tmp_path / "shares"
    assert run(capsys, "encode", str(src), "--params", "5", "3", "4", "3", "--out", str(out))[0] == 0
    return data, out


def test_encode_decode_roundtrip(encoded, tmp_path, capsys):
    data, out = encoded
    assert sorted(p.name for p in out.iterdir()) == [share_name(h) for h in range(1, 6)]
    dst = tmp_path / "out.bin"
    code, _, _ = run(capsys, "decode", str(out / share_name(5)), str(out / share_name(2)),
                     str(out / share_name(4)), "-o", str(dst))
    assert code == 0 and dst.read_bytes() == data


def test_encode_is_deterministic(encoded, tmp_path, capsys):
    data, out = encoded
    src = tmp_path / "in.bin"
    again = tmp_path / "again"
    run(capsys, "encode", str(src), "--params", "5", "3", "4", "3", "--out", str(again))
    for h in range(1, 6):
        assert (out / share_name(h)).read_bytes() == (again / share_name(h)).read_bytes()


def test_empty_file(tmp_path, capsys):
    src = tmp_path / "empty"
    src.write_bytes(b"")
    run(capsys, "encode", str(src), "--params", "4", "3", "3", "2", "--out", str(tmp_path / "s"))
    # M=6, so the 8-byte length prefix alone fills two chunks of alpha=3 two-byte symbols
    assert len((tmp_path / "s" / share_name(1)).read_bytes()) == 35 + 2 * 3 * 2
    run(capsys, "encode", str(src), "--params", "7", "4", "6", "5", "--out", str(tmp_path / "big"))
    assert len((tmp_path / "big" / share_name(1)).read_bytes()) == 35 + 81 * 2
    dst = tmp_path / "o"
    shares = [str(tmp_path / "s" / share_name(h)) for h in (1, 2, 3)]
    assert run(capsys, "decode", *shares, "-o", str(dst))[0] == 0
    assert dst.read_bytes() == b""


def test_corrupt_share_then_decode_from_others(encoded, tmp_path, capsys):
    data, out = encoded
    victim = out / share_name(1)
    raw = bytearray(victim.read_bytes())
    raw[40] ^= 0xFF
    raw[:4] = b"JUNK"
    victim.write_bytes(bytes(raw))
    code, _, err = run(capsys, "decode", str(victim), str(out / share_name(2)),
                       str(out / share_name(3)), "-o", str(tmp_path / "x"))
    assert code == 2 and "magic" in err
    dst = tmp_path / "y"
    others = [str(out / share_name(h)) for h in (2, 3, 4)]
    assert run(capsys, "decode", *others, "-o", str(dst))[0] == 0
    assert dst.read_bytes() == data


def test_decode_needs_k_shares(encoded, tmp_path, capsys):
    _, out = encoded
    code, _, err = run(capsys, "decode", str(out / share_name(1)), str(out / share_name(2)),
                       "-o", str(tmp_path / "x"))
    assert code == 2 and "k=3" in err


def test_repair_rebuilds_identical_share(encoded, tmp_path, capsys):
    _, out = encoded
    original = hashlib.sha256((out / share_name(3)).read_bytes()).hexdigest()
    helpers = [str(out / share_name(h)) for h in (1, 2, 4, 5)]
    code, stdout, _ = run(capsys, "repair", *helpers, "--failed", "3", "--out", str(tmp_path / "r"), "--json")
    report = json.loads(stdout)
    assert code == 0
    assert report["per_helper_per_chunk"] == report["expected_beta_c"] == 3
    rebuilt = (tmp_path / "r" / share_name(3)).read_bytes()
    assert hashlib.sha256(rebuilt).hexdigest() == original


def test_repair_errors(encoded, tmp_path, capsys):
    _, out = encoded
    helpers = [str(out / share_name(h)) for h in (1, 2, 4, 5)]
    code, _, err = run(capsys, "repair", *helpers, "--failed", "9", "--out", str(tmp_path / "r"))
    assert code == 2 and "no node 9" in err
    code, _, err = run(capsys, "repair", *helpers[:3], "--failed", "3", "--out", str(tmp_path / "r"))
    assert code == 2 and "d=4" in err


def test_mixed_codes_rejected(encoded, tmp_path, capsys):
    _, out = encoded
    src = tmp_path / "in.bin"
    run(capsys, "encode", str(src), "--params", "4", "3", "3", "2", "--out", str(tmp_path / "other"))
    code, _, err = run(capsys, "decode", str(out / share_name(1)), str(out / share_name(2)),
                       str(tmp_path / "other" / share_name(3)), "-o", str(tmp_path / "x"))
    assert code == 2 and "different code" in err


def test_simulate_with_figures(tmp_path, capsys):
    script = tmp_path / "s.txt"
    script.write_text("STORE 68656c6c6f\nFAIL 2\nREPAIR\nFAIL 1,3\nREPAIR\nCHECK\n")
    code, out, _ = run(capsys, "simulate", str(script), "--params", "7", "3", "4", "3",
                       "--seed", "3", "--figures", str(tmp_path / "fig"))
    report = json.loads(out)
    assert code == 0 and report["integrity"] is True
    assert [r["total"] for r in report["ledger"]["records"]] == [4 * 3, 4 * 5]
    for name in ("ledger.png", "tradeoff.png"):
        assert (tmp_path / "fig" / name).stat().st_size > 0


def test_simulate_reports_bad_event(tmp_path, capsys):
    script = tmp_path / "s.txt"
    script.write_text("STORE random\nFAIL 1\nFAIL 1\n")
    code, _, err = run(capsys, "simulate", str(script), "--params", "5", "3", "4", "3")
    assert code == 2 and "event 2" in err


def test_simulate_seed_from_env(tmp_path, capsys, monkeypatch):
    script = tmp_path / "s.txt"
    script.write_text("STORE random\nFAIL 1\nREPAIR\n")
    monkeypatch.setenv("MOULIN_SEED", "17")
    _, a, _ = run(capsys, "simulate", str(script), "--params", "5", "3", "4", "3")
    _, b, _ = run(capsys, "simulate", str(script), "--params", "5", "3", "4", "3")
    assert json.loads(a)["seed"] == 17 and a == b


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--seed", "1")
    assert code == 0
    assert out.count("PASS") == len(out.splitlines())


def test_console_script_installed():
    exe = shutil.which("moulin")
    cmd = [exe] if exe else [sys.executable, "-m", "moulin.cli"]
    res = subprocess.run(cmd + ["params", "5", "3", "4", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and "alpha" in res.stdout


@pytest.mark.parametrize("nkds", [(4, 3, 3, 2), (5, 3, 4, 3), (6, 4, 5, 3), (8, 4, 7, 5)])
def test_one_mebibyte_roundtrip(nkds, tmp_path, capsys):
    data = np.random.default_rng(sum(nkds)).bytes(1 << 20)
    src = tmp_path / "in.bin"
    src.write_bytes(data)
    n, k = nkds[0], nkds[1]
    assert main(["encode", str(src), "--params", *map(str, nkds), "--out", str(tmp_path / "s")]) == 0
    last = [str(tmp_path / "s" / share_name(h)) for h in range(n - k + 1, n + 1)]
    assert main(["decode", *last, "-o", str(tmp_path / "o")]) == 0
    capsys.readouterr()
    assert (tmp_path / "o").read_bytes() == data
