import io
import json
import subprocess
import sys

from smcperiod.cli import main


def run_cli(args, stdin_text=None, monkeypatch=None):
    if stdin_text is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin_text))
    return main(args)


def test_generate_writes_fasta(tmp_path, capsys):
    out = tmp_path / "u.fa"
    rc = main(["generate", "--kind", "uniform", "--length", "90", "--seed", "4",
               "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.startswith(">synthetic kind=uniform length=90 seed=4")
    seq = "".join(text.splitlines()[1:])
    assert len(seq) == 90 and set(seq) <= set("ACGT")


def test_generate_deterministic_stdout(capsys):
    assert main(["generate", "--kind", "periodic", "--length", "30", "--seed", "1"]) == 0
    first = capsys.readouterr().out
    assert main(["generate", "--kind", "periodic", "--length", "30", "--seed", "1"]) == 0
    assert capsys.readouterr().out == first


def test_analyze_csv_pipeline(tmp_path, capsys):
    fa = tmp_path / "p.fa"
    assert main(["generate", "--kind", "periodic", "--length", "240", "--seed", "2",
                 "--out", str(fa)]) == 0
    assert main(["analyze", str(fa)]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "state,k,cycle,p,logp,R,color"
    assert "# d=3" in lines
    n_rows = len([l for l in lines if not l.startswith("#")]) - 1
    assert n_rows == 3 * 4 * 80


def test_analyze_stdin_json(monkeypatch, capsys):
    fasta = ">demo\n" + "ACGTAAGCT" * 20 + "\n"
    rc = run_cli(["analyze", "-", "--format", "json", "--d", "3"],
                 stdin_text=fasta, monkeypatch=monkeypatch)
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["metadata"]["sequence"] == "demo"
    assert doc["metadata"]["n_cycles"] == 60
    assert len(doc["rows"]) == 3 * 4 * 60


def test_analyze_plain_input(monkeypatch, capsys):
    rc = run_cli(["analyze", "-", "--input-format", "plain", "--s", "1"],
                 stdin_text="ACGT" * 30, monkeypatch=monkeypatch)
    assert rc == 0
    out = capsys.readouterr().out
    assert "# s=1" in out.splitlines()


def test_analyze_env_overrides(monkeypatch, capsys):
    monkeypatch.setenv("SMCPERIOD_M_MAX", "7")
    monkeypatch.setenv("SMCPERIOD_WARMUP", "12")
    rc = run_cli(["analyze", "-", "--input-format", "plain"],
                 stdin_text="ACGTAAGCT" * 20, monkeypatch=monkeypatch)
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert "# m_max=7" in lines
    assert "# warmup_cycles=12" in lines
    # explicit flags beat the environment
    monkeypatch.setattr(sys, "stdin", io.StringIO("ACGTAAGCT" * 20))
    assert main(["analyze", "-", "--input-format", "plain", "--m-max", "9"]) == 0
    assert "# m_max=9" in capsys.readouterr().out.splitlines()


def test_bad_env_value(monkeypatch, capsys):
    monkeypatch.setenv("SMCPERIOD_M_MAX", "seven")
    rc = run_cli(["analyze", "-", "--input-format", "plain"],
                 stdin_text="ACGT" * 30, monkeypatch=monkeypatch)
    assert rc == 1
    assert "SMCPERIOD_M_MAX" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert main(["generate", "--kind", "nope", "--length", "5"]) == 1
    assert main(["generate", "--kind", "embedded", "--length", "10",
                 "--intervals", "5..8"]) == 1
    assert main([]) == 1


def test_input_errors_exit_1(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "missing.fa")]) == 1
    err = capsys.readouterr().err
    assert "error:" in err
    short = tmp_path / "short.fa"
    short.write_text(">s\nACGT\n")
    assert main(["analyze", str(short)]) == 1
    assert "warm-up minimum" in capsys.readouterr().err


def test_unknown_symbol_policy(tmp_path, capsys):
    fa = tmp_path / "n.fa"
    fa.write_text(">s\n" + "ACGTN" * 30 + "\n")
    assert main(["analyze", str(fa)]) == 0
    capsys.readouterr()
    assert main(["analyze", str(fa), "--policy", "error"]) == 1
    assert "unknown symbol" in capsys.readouterr().err


def test_verify_exit_codes(capsys):
    assert main(["verify", "--n", "5", "--models", "2", "--nh-models", "1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS")
    assert main(["verify", "--horizon", "5", "--models", "2", "--nh-models", "1"]) == 0
    capsys.readouterr()
    assert main(["verify", "--n", "0", "--models", "2", "--nh-models", "1"]) == 0
    capsys.readouterr()
    assert main(["verify", "--n", "4", "--models", "1", "--nh-models", "0",
                 "--perturb", "1e-5"]) == 2
    out = capsys.readouterr().out
    assert out.startswith("FAIL")
    assert "seed=" in out


def test_console_script_installed():
    proc = subprocess.run(["smcperiod", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("smcperiod ")
