# tests/test_smoke.py
from __future__ import annotations

import pytest  # pyright: ignore[reportMissingImports]


def test_import_package():
    import em_memory  # noqa: F401


def test_cli_entrypoint(monkeypatch, capsys):
    from em_memory.__main__ import cli

    monkeypatch.setattr("sys.argv", ["em-memory", "--help"])
    code = cli()
    assert isinstance(code, int)
    assert code == 0
    assert "bns-energy" in capsys.readouterr().out


@pytest.mark.slow
def test_cli_validate(monkeypatch, tmp_path):
    from em_memory.__main__ import cli

    monkeypatch.setattr(
        "sys.argv", ["em-memory", "validate", "--output-dir", str(tmp_path), "--l-max", "4"]
    )
    assert cli() == 0


def test_cli_unknown_command_returns_config_code(tmp_path):
    from em_memory.__main__ import cli

    assert cli(["no-such-command", "--output-dir", str(tmp_path / "out")]) == 2
