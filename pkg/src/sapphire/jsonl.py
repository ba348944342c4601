"""Small JSONL helpers shared by the CLI and pipelines."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ParseError


def read_jsonl(path: str | Path) -> Iterator[dict]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                yield json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", str(path), lineno) from exc


def write_jsonl(records: Iterable[dict], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


def load_texts(path: str | Path) -> dict[str, str]:
    """id -> text mapping from a texts/generations file.

    Accepts {"id", "text"} or {"id", "output"} records.
    """
    texts: dict[str, str] = {}
    for lineno, record in enumerate(read_jsonl(path), start=1):
        if "id" not in record:
            raise ParseError("record missing 'id'", str(path), lineno)
        value = record.get("text", record.get("output"))
        if value is None:
            raise ParseError("record missing 'text'/'output'", str(path), lineno)
        texts[str(record["id"])] = str(value)
    return texts
