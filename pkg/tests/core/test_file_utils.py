# tests/core/test_file_utils.py
"""
Tests pour core.file_utils.
"""

import json
import os
import struct

import numpy as np
import pytest

from em_memory.core.exceptions import FieldIOError
from em_memory.core.file_utils import (
    read_field,
    read_train,
    sha256_file,
    write_csv,
    write_dict_csv,
    write_field,
    write_json,
    write_manifest,
    write_train,
)
from em_memory.core.sphere import ScalarField, tensor_synthesize
from em_memory.core.validation import random_tensor_coeffs, random_train_pair
from em_memory.core.waveform import TrainKind


class TestFields:
    """Tests pour write_field / read_field."""

    def test_bit_exact(self, grid4, rng, tmp_path):
        """Test relecture bit à bit d'un tenseur."""
        field = tensor_synthesize(random_tensor_coeffs(4, rng), grid4)
        path = write_field(str(tmp_path / "t.emm"), field)
        loaded = read_field(path)
        assert type(loaded) is type(field)
        assert loaded.grid == grid4
        np.testing.assert_array_equal(loaded.data, field.data)

    def test_header_layout(self, grid4, tmp_path):
        """Test magie puis kind, l_max, n_theta, n_phi en int32 little-endian."""
        path = write_field(str(tmp_path / "s.emm"), ScalarField.zeros(grid4))
        with open(path, "rb") as fh:
            raw = fh.read()
        assert raw[:4] == b"EMM1"
        assert struct.unpack_from("<iiii", raw, 4)[1:] == (4, 5, 10)
        assert len(raw) == 4 + 16 + 5 * 10 * 8

    def test_missing_file(self, tmp_path):
        """Test fichier absent."""
        with pytest.raises(FieldIOError):
            read_field(str(tmp_path / "absent.emm"))

    def test_bad_magic(self, tmp_path):
        """Test magie invalide."""
        path = tmp_path / "bad.emm"
        path.write_bytes(b"NOPE" + bytes(64))
        with pytest.raises(FieldIOError, match="magic"):
            read_field(str(path))

    def test_truncated(self, grid4, tmp_path):
        """Test charge utile tronquée."""
        path = write_field(str(tmp_path / "s.emm"), ScalarField.zeros(grid4))
        with open(path, "rb") as fh:
            raw = fh.read()
        with open(path, "wb") as fh:
            fh.write(raw[:-8])
        with pytest.raises(FieldIOError, match="truncated"):
            read_field(path)

    def test_trailing_bytes(self, grid4, tmp_path):
        """Test octets surnuméraires."""
        path = write_field(str(tmp_path / "s.emm"), ScalarField.zeros(grid4))
        with open(path, "ab") as fh:
            fh.write(b"\x00" * 3)
        with pytest.raises(FieldIOError, match="trailing"):
            read_field(path)

    def test_invalid_header(self, tmp_path):
        """Test l_max hors bornes dans l'en-tête."""
        path = tmp_path / "h.emm"
        path.write_bytes(b"EMM1" + struct.pack("<iiii", 0, 999, 3, 4))
        with pytest.raises(FieldIOError, match="header"):
            read_field(str(path))


class TestTrains:
    """Tests pour write_train / read_train."""

    def test_bit_exact(self, grid4, rng, tmp_path):
        """Test relecture d'un train Ξ et d'un train A_F."""
        xi, af = random_train_pair(grid4, rng)
        for name, train in (("xi.emt", xi), ("af.emt", af)):
            loaded = read_train(write_train(str(tmp_path / name), train))
            assert loaded.kind is train.kind
            assert loaded.times == train.times
            np.testing.assert_array_equal(loaded.data, train.data)

    def test_not_a_train(self, grid4, tmp_path):
        """Test fichier champ lu comme train."""
        path = write_field(str(tmp_path / "s.emm"), ScalarField.zeros(grid4))
        with pytest.raises(FieldIOError, match="bad magic"):
            read_train(path)

    def test_mixed_record(self, grid4, rng, tmp_path):
        """Test enregistrement vecteur dans un train tensoriel."""
        xi, af = random_train_pair(grid4, rng)
        path = str(tmp_path / "mixed.emt")
        write_train(path, af)
        with open(path, "r+b") as fh:
            fh.seek(4)
            fh.write(struct.pack("<q", int(TrainKind.XI)))
        with pytest.raises(FieldIOError, match="record inside"):
            read_train(path)

    def test_trailing_bytes(self, grid4, rng, tmp_path):
        """Test octets après le dernier enregistrement."""
        xi, _ = random_train_pair(grid4, rng)
        path = write_train(str(tmp_path / "xi.emt"), xi)
        with open(path, "ab") as fh:
            fh.write(b"\x01")
        with pytest.raises(FieldIOError, match="trailing"):
            read_train(path)


class TestTextOutputs:
    """Tests pour JSON et CSV."""

    def test_json_sorted(self, tmp_path):
        """Test clés triées et saut de ligne final."""
        path = write_json(str(tmp_path / "a.json"), {"b": 1, "a": [1.5, 2]})
        text = open(path, encoding="utf-8").read()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
        assert json.loads(text) == {"a": [1.5, 2], "b": 1}

    def test_json_non_finite_as_null(self, tmp_path):
        """Test NaN et ±inf écrits null, y compris imbriqués."""
        payload = {"slope": float("nan"), "rows": [np.inf, {"x": -np.inf}], "ok": 1.0}
        text = open(write_json(str(tmp_path / "a.json"), payload), encoding="utf-8").read()
        assert "NaN" not in text and "Infinity" not in text
        assert json.loads(text) == {"ok": 1.0, "rows": [None, {"x": None}], "slope": None}

    def test_csv_full_precision(self, tmp_path):
        """Test flottants écrits avec 17 chiffres significatifs."""
        path = write_csv(str(tmp_path / "a.csv"), ["x", "y"], [(1.0 / 3.0, 2)])
        lines = open(path, encoding="utf-8").read().splitlines()
        assert lines[0] == "x,y"
        assert float(lines[1].split(",")[0]) == 1.0 / 3.0

    def test_dict_csv(self, tmp_path):
        """Test en-tête issu des clés de la première ligne."""
        path = write_dict_csv(str(tmp_path / "d.csv"), [{"r": 1.0, "q": 2.0}, {"r": 3.0, "q": 4.0}])
        assert open(path, encoding="utf-8").read().splitlines()[0] == "r,q"


class TestManifest:
    """Tests pour write_manifest."""

    def test_content(self, tmp_path):
        """Test sommes SHA-256, chemins relatifs et versions."""
        out = write_json(str(tmp_path / "result.json"), {"x": 1})
        path = write_manifest(str(tmp_path), "memory", {"command": "memory"}, outputs=[out])
        manifest = json.load(open(path, encoding="utf-8"))
        assert os.path.basename(path) == "manifest.json"
        assert manifest["command"] == "memory"
        assert manifest["outputs"] == {"result.json": sha256_file(out)}
        assert manifest["inputs"] == {}
        assert {"em_memory", "numpy", "scipy", "python"} <= set(manifest["versions"])

    def test_deterministic(self, tmp_path):
        """Test deux écritures identiques octet à octet (pas d'horodatage)."""
        out = write_json(str(tmp_path / "result.json"), {"x": 1})
        first = open(write_manifest(str(tmp_path), "bns-energy", {}, outputs=[out]), "rb").read()
        second = open(write_manifest(str(tmp_path), "bns-energy", {}, outputs=[out]), "rb").read()
        assert first == second

    def test_fixed_keys(self, tmp_path):
        """Test le manifeste ne porte que ses cinq clés et refuse un argument extra."""
        path = write_manifest(str(tmp_path), "generate", {"l_max": 4})
        manifest = json.load(open(path, encoding="utf-8"))
        assert set(manifest) == {"command", "config", "inputs", "outputs", "versions"}
        with pytest.raises(TypeError):
            write_manifest(str(tmp_path), "generate", {}, extra={"x": 1})
