"""Tab-separated dataset manifests.

One record per line: id, label (real|fake), video_path, score_path,
feature_path. Empty fields are allowed before the corresponding stage has
run. This format is shared with external extractors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DataError

LABELS = ("real", "fake")
N_FIELDS = 5


@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    label: str
    video_path: str = ""
    score_path: str = ""
    feature_path: str = ""

    def __post_init__(self):
        if self.label not in LABELS:
            raise DataError(f"label must be one of {LABELS}, got {self.label!r}")

    def with_paths(self, **kwargs) -> "ManifestEntry":
        return replace(self, **kwargs)


def write_manifest(path, entries) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            fh.write(
                "\t".join([e.video_id, e.label, e.video_path, e.score_path, e.feature_path])
                + "\n"
            )


def read_manifest(path) -> list[ManifestEntry]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != N_FIELDS:
                raise DataError(f"{path}:{lineno}: expected {N_FIELDS} fields, got {len(fields)}")
            entries.append(ManifestEntry(*fields))
    return entries
