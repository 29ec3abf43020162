# tests/test_settings.py
"""
Tests pour le module settings (options, fichier JSON, résolution).
"""

import json

import pytest

from em_memory.core.exceptions import ConfigError
from em_memory.core.models import Parity
from em_memory.settings import flatten_config, load_config_file, parse_config


def _write_config(tmp_path, payload, name="run.json"):
    path = tmp_path / name
    if isinstance(payload, str):
        path.write_bytes(payload.encode("utf-8"))
    else:
        path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class TestDefaults:
    """Tests des valeurs par défaut."""

    def test_bns_defaults(self, output_dir):
        """Test scénario par défaut et provenance."""
        cfg = parse_config(["bns-energy", "--output-dir", output_dir])
        assert cfg.command == "bns-energy"
        assert cfg.scenario.total_mass == 2.0
        assert cfg.scenario.kappa == "quarter"
        assert cfg.sources["output_dir"] == "flag"
        assert cfg.sources["scenario.total_mass"] == "default"
        assert cfg.conflicts == {}

    def test_generate_defaults(self, output_dir):
        """Test grille en u et impulsion quadrupolaire par défaut."""
        cfg = parse_config(["generate", "--output-dir", output_dir])
        assert cfg.l_max == 8
        assert cfg.times.n_u == 1201
        assert len(cfg.pulses) == 1
        assert cfg.pulses[0].l == 2
        assert cfg.af_pulses == []

    def test_output_dir_env(self, tmp_path, monkeypatch):
        """Test dossier de sortie tiré de la variable d'environnement."""
        monkeypatch.setenv("EMM_OUTPUT_DIR", str(tmp_path / "env"))
        cfg = parse_config(["bns-energy"])
        assert cfg.output_dir == str(tmp_path / "env")


class TestFlags:
    """Tests des options de ligne de commande."""

    def test_pulse_flag(self, output_dir):
        """Test --pulse AMP,CENTER,WIDTH,L,M,PARITY répétable."""
        cfg = parse_config(
            [
                "generate",
                "--output-dir",
                output_dir,
                "--pulse",
                "1,0,0.5",
                "--pulse",
                "0.2,1,0.4,3,-1,B",
            ]
        )
        assert [p.l for p in cfg.pulses] == [2, 3]
        assert cfg.pulses[1].parity is Parity.MAGNETIC
        assert cfg.pulses[1].m == -1

    @pytest.mark.parametrize("pulse", ["1,2", "a,b,c", "1,0,0.5,2,0,E,extra"])
    def test_bad_pulse(self, output_dir, pulse):
        """Test impulsion mal formée."""
        with pytest.raises(ConfigError):
            parse_config(["generate", "--output-dir", output_dir, "--pulse", pulse])

    @pytest.mark.parametrize("mode", ["quarter", "paper", "published", "analytic"])
    def test_kappa_modes(self, output_dir, mode):
        """Test --kappa nommé."""
        cfg = parse_config(["bns-energy", "--output-dir", output_dir, "--kappa", mode.upper()])
        assert cfg.scenario.kappa == mode

    def test_kappa_number(self, output_dir):
        """Test --kappa numérique."""
        cfg = parse_config(["bns-energy", "--output-dir", output_dir, "--kappa", "0.3"])
        assert cfg.scenario.kappa == 0.3

    @pytest.mark.parametrize("kappa", ["bogus", "0", "-1", "inf", "nan"])
    def test_bad_kappa(self, output_dir, kappa):
        """Test --kappa invalide refusé à l'analyse des options."""
        with pytest.raises(ConfigError, match="kappa"):
            parse_config(["bns-energy", "--output-dir", output_dir, "--kappa", kappa])

    def test_non_finite_flag(self, output_dir):
        """Test rayon infini refusé."""
        with pytest.raises(ConfigError, match="finite"):
            parse_config(["order-check", "--output-dir", output_dir, "--radii", "1e20", "inf"])

    def test_unknown_flag(self, output_dir):
        """Test option inconnue."""
        with pytest.raises(ConfigError):
            parse_config(["validate", "--output-dir", output_dir, "--bogus", "1"])

    def test_missing_command(self):
        """Test sous-commande absente."""
        with pytest.raises(ConfigError):
            parse_config([])

    @pytest.mark.parametrize("l_max", ["1", "257"])
    def test_l_max_bounds(self, output_dir, l_max):
        """Test l_max hors de [2, 256]."""
        with pytest.raises(ConfigError):
            parse_config(["validate", "--output-dir", output_dir, "--l-max", l_max])

    def test_detector_config(self, output_dir, train_files):
        """Test DetectorConfig construite depuis les options."""
        cfg = parse_config(
            [
                "detector",
                "--output-dir",
                output_dir,
                "--xi",
                train_files["xi"],
                "--theta",
                "1.0",
                "--d0",
                "2",
                "--r",
                "1e5",
            ]
        )
        assert cfg.detector.theta == 1.0
        assert cfg.detector.ratio == pytest.approx(2e-5)

    def test_detector_theta_pole(self, output_dir, train_files):
        """Test θ = 0 refusé."""
        with pytest.raises(ConfigError):
            parse_config(
                ["detector", "--output-dir", output_dir, "--xi", train_files["xi"], "--theta", "0"]
            )


class TestTrainFiles:
    """Tests des fichiers de trains référencés."""

    def test_missing_xi_flag(self, output_dir):
        """Test memory sans --xi."""
        with pytest.raises(ConfigError, match="--xi"):
            parse_config(["memory", "--output-dir", output_dir])

    def test_missing_xi_file(self, output_dir, tmp_path):
        """Test fichier Ξ inexistant."""
        with pytest.raises(ConfigError, match="not found"):
            parse_config(["memory", "--output-dir", output_dir, "--xi", str(tmp_path / "no.emt")])


class TestConfigFile:
    """Tests du fichier JSON."""

    def test_flag_overrides_file(self, tmp_path, output_dir):
        """Test l'option l'emporte et le conflit est enregistré."""
        path = _write_config(tmp_path, {"l_max": 4, "seed": 3})
        cfg = parse_config(
            ["validate", "--config", path, "--output-dir", output_dir, "--l-max", "5"]
        )
        assert cfg.l_max == 5
        assert cfg.seed == 3
        assert cfg.sources["l_max"] == "flag"
        assert cfg.sources["seed"] == "file"
        assert cfg.conflicts == {"l_max": {"file": 4, "flag": 5}}
        assert cfg.to_manifest()["conflicts"] == cfg.conflicts

    def test_same_value_no_conflict(self, tmp_path, output_dir):
        """Test valeur identique: pas de conflit."""
        path = _write_config(tmp_path, {"l_max": 4})
        cfg = parse_config(
            ["validate", "--config", path, "--output-dir", output_dir, "--l-max", "4"]
        )
        assert cfg.conflicts == {}

    def test_nested_sections(self, tmp_path, output_dir):
        """Test sections scenario et pulses."""
        path = _write_config(
            tmp_path,
            {
                "scenario": {"b0": 1e13, "dbdt": 1e13, "merge_time_ms": 1000.0},
                "pulses": [{"amplitude": 2.0, "center": 0.5, "width": 0.4}],
            },
        )
        cfg = parse_config(["bns-energy", "--config", path, "--output-dir", output_dir])
        assert cfg.scenario.b0 == 1e13
        assert cfg.pulses[0].amplitude == 2.0
        assert cfg.sources["scenario.b0"] == "file"

    def test_malformed_json_byte_offset(self, tmp_path):
        """Test position en octets (é compte pour deux)."""
        path = _write_config(tmp_path, '{"a": "é", x}')
        with pytest.raises(ConfigError, match="byte 12"):
            load_config_file(path)

    def test_not_an_object(self, tmp_path):
        """Test JSON valide mais pas un objet."""
        with pytest.raises(ConfigError, match="object"):
            load_config_file(_write_config(tmp_path, [1, 2]))

    def test_unreadable(self, tmp_path):
        """Test fichier absent."""
        with pytest.raises(ConfigError):
            load_config_file(str(tmp_path / "absent.json"))

    @pytest.mark.parametrize(
        "payload",
        [
            {"bogus": 1},
            {"scenario": {"bogus": 1}},
            {"amplitudes": {"bogus": 1}},
            {"pulses": [{"amplitude": 1.0, "center": 0.0, "width": 0.5, "bogus": 1}]},
            {"af_pulses": [{"amplitude": 1.0, "center": 0.0, "width": 0.5, "bogus": 1}]},
        ],
    )
    def test_unknown_keys(self, payload):
        """Test clés inconnues refusées à tous les niveaux."""
        with pytest.raises(ConfigError, match="Unknown key"):
            flatten_config(payload)

    def test_pulse_missing_width(self):
        """Test impulsion incomplète."""
        with pytest.raises(ConfigError, match="missing"):
            flatten_config({"pulses": [{"amplitude": 1.0, "center": 0.0}]})

    @pytest.mark.parametrize("payload", [{"l_max": 4.5}, {"seed": "x"}, {"radii": 3}])
    def test_bad_types(self, tmp_path, output_dir, payload):
        """Test types invalides."""
        path = _write_config(tmp_path, payload)
        with pytest.raises(ConfigError):
            parse_config(["validate", "--config", path, "--output-dir", output_dir])

    def test_bad_kappa_in_file(self, tmp_path, output_dir):
        """Test mode de κ inconnu dans le fichier."""
        path = _write_config(tmp_path, {"scenario": {"kappa": "bogus"}})
        with pytest.raises(ConfigError, match="kappa"):
            parse_config(["bns-energy", "--config", path, "--output-dir", output_dir])

    @pytest.mark.parametrize(
        "text",
        ['{"l_max": Infinity}', '{"d0": NaN}', '{"scenario": {"b0": -Infinity}}'],
    )
    def test_non_finite_constants(self, tmp_path, text):
        """Test NaN et Infinity refusés à la lecture."""
        path = _write_config(tmp_path, text)
        with pytest.raises(ConfigError, match="non-finite"):
            load_config_file(path)

    def test_non_finite_integer_value(self, output_dir):
        """Test entier non fini refusé sans OverflowError."""
        from em_memory.settings import _as_int

        with pytest.raises(ConfigError, match="integer"):
            _as_int("l_max", float("inf"))
        with pytest.raises(ConfigError, match="integer"):
            _as_int("l_max", float("nan"))
