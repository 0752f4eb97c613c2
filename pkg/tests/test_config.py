"""Config parsing and manifest round trips."""

import pytest

from nsgvd.config import Config, dump_config, parse_config_text
from nsgvd.errors import ConfigError, DataError
from nsgvd.manifest import ManifestEntry, read_manifest, write_manifest


class TestConfigText:
    def test_sections_flatten_to_dotted_keys(self):
        text = """
        # run setup
        seed = 7
        [nsg]
        lambda = 0.1   # stabilizer
        [train]
        batch_size = 24
        """
        values = parse_config_text(text)
        assert values == {"seed": "7", "nsg.lambda": "0.1", "train.batch_size": "24"}

    def test_bad_line(self):
        with pytest.raises(ConfigError):
            parse_config_text("just words\n")

    def test_dump_is_sorted_and_reparseable(self):
        values = {"b.x": "2", "a": "1"}
        text = dump_config(values)
        assert text == "a = 1\nb.x = 2\n"
        assert parse_config_text(text) == values

    def test_typed_getters_and_overrides(self):
        cfg = Config({"n": "3", "x": "2.5", "flag": "true", "taus": "0.7, 0.9,1.1"})
        cfg = cfg.override(["n=4"])
        assert cfg.get_int("n", 0) == 4
        assert cfg.get_float("x", 0.0) == 2.5
        assert cfg.get_bool("flag", False) is True
        assert cfg.get_floats("taus", "") == [0.7, 0.9, 1.1]
        assert cfg.get_int("missing", 9) == 9
        with pytest.raises(ConfigError):
            cfg.override(["no-equals"])
        with pytest.raises(ConfigError):
            Config({"n": "abc"}).get_int("n", 0)


class TestManifest:
    def test_roundtrip_with_empty_fields(self, tmp_path):
        entries = [
            ManifestEntry("real-00000", "real", "videos/a.nsgt", "scores/a.nsgt", ""),
            ManifestEntry("fake-00000", "fake", "videos/b.nsgt", "", ""),
        ]
        path = tmp_path / "manifest.tsv"
        write_manifest(path, entries)
        assert read_manifest(path) == entries

    def test_bad_label(self):
        with pytest.raises(DataError):
            ManifestEntry("x", "maybe")

    def test_bad_field_count(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("id\treal\n")
        with pytest.raises(DataError, match="expected 5 fields"):
            read_manifest(path)

    def test_with_paths(self):
        entry = ManifestEntry("v", "real", "a", "b", "")
        assert entry.with_paths(feature_path="f").feature_path == "f"
