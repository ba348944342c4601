import json

import pytest

from sapphire.errors import SapphireError
from sapphire.manifest import (
    RunManifest,
    file_digest,
    manifest_path_for,
    verify_manifest,
    write_manifest,
)


def make_artifact(tmp_path, name="out.jsonl", content='{"id":"a"}\n'):
    path = tmp_path / name
    path.write_text(content)
    return path


class TestManifest:
    def test_write_and_verify_clean(self, tmp_path):
        artifact = make_artifact(tmp_path)
        manifest = RunManifest(command=["split"], seeds={"seed": 13})
        manifest.add_output(artifact)
        path = write_manifest(manifest, manifest_path_for(artifact))
        assert path.name == "out.jsonl.manifest.json"
        assert verify_manifest(path) == []

    def test_tamper_detected(self, tmp_path):
        artifact = make_artifact(tmp_path)
        manifest = RunManifest(command=["x"])
        manifest.add_output(artifact)
        path = write_manifest(manifest, manifest_path_for(artifact))
        artifact.write_text("tampered\n")
        problems = verify_manifest(path)
        assert len(problems) == 1 and "digest" in problems[0]

    def test_missing_file_detected(self, tmp_path):
        artifact = make_artifact(tmp_path)
        manifest = RunManifest(command=["x"])
        manifest.add_output(artifact)
        path = write_manifest(manifest, manifest_path_for(artifact))
        artifact.unlink()
        problems = verify_manifest(path)
        assert problems and "missing" in problems[0]

    def test_inputs_checked_too(self, tmp_path):
        src = make_artifact(tmp_path, "in.jsonl")
        out = make_artifact(tmp_path, "out.jsonl")
        manifest = RunManifest(command=["x"])
        manifest.add_input(src)
        manifest.add_output(out)
        path = write_manifest(manifest, manifest_path_for(out))
        src.write_text("changed")
        assert any("inputs" in p for p in verify_manifest(path))

    def test_non_manifest_rejected(self, tmp_path):
        bogus = tmp_path / "x.json"
        bogus.write_text(json.dumps({"schema": "other"}))
        with pytest.raises(SapphireError):
            verify_manifest(bogus)

    def test_digest_stability(self, tmp_path):
        artifact = make_artifact(tmp_path)
        assert file_digest(artifact) == file_digest(artifact)

    def test_manifest_records_core_fields(self, tmp_path):
        artifact = make_artifact(tmp_path)
        manifest = RunManifest(command=["augment", "--k", "2"], config={"k": 2},
                               seeds={"seed": 7}, providers=["stub-embedder"])
        manifest.add_output(artifact)
        path = write_manifest(manifest, manifest_path_for(artifact))
        data = json.loads(path.read_text())
        assert data["command"] == ["augment", "--k", "2"]
        assert data["seeds"] == {"seed": 7}
        assert data["providers"] == ["stub-embedder"]
        assert data["started"] and data["finished"]
        assert data["version"]
