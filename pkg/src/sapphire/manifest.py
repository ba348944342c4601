"""Run manifests: config snapshots and artifact digests for reproducibility.

Every pipeline output file is paired with a manifest that records the
command line, the effective config, seeds, provider identities, and
sha256 digests of inputs and outputs.  verify-manifest recomputes the
digests to prove a run has not been touched.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import SapphireError


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: list[str]
    config: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    providers: list[str] = field(default_factory=list)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    started: str = field(default_factory=_now)
    finished: str | None = None
    version: str = __version__

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path: str | Path) -> None:
        self.outputs[str(path)] = file_digest(path)

    def finish(self) -> None:
        self.finished = _now()

    def to_dict(self) -> dict:
        return {
            "schema": "sapphire-manifest/1",
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "seeds": self.seeds,
            "providers": self.providers,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "started": self.started,
            "finished": self.finished,
        }


def manifest_path_for(artifact: str | Path) -> Path:
    return Path(str(artifact) + ".manifest.json")


def write_manifest(manifest: RunManifest, path: str | Path) -> Path:
    """Write the manifest last, after all artifacts are on disk."""
    path = Path(path)
    manifest.finish()
    path.write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def verify_manifest(path: str | Path) -> list[str]:
    """Recompute digests; return a list of mismatch descriptions (empty = pass)."""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("schema") != "sapphire-manifest/1":
        raise SapphireError(f"{path}: not a sapphire manifest")
    problems: list[str] = []
    for section in ("inputs", "outputs"):
        for file_path, recorded in data.get(section, {}).items():
            p = Path(file_path)
            if not p.exists():
                problems.append(f"{section}: {file_path} missing")
                continue
            actual = file_digest(p)
            if actual != recorded:
                problems.append(f"{section}: {file_path} digest {actual[:12]}.. != recorded {recorded[:12]}..")
    return problems
