"""Synthetic metadata dumps with known violation statistics.

Every builder returns a :class:`Dumps` triple of record lists in the
ingestion format, so fixtures exercise the same code path as real data.
Upstream artifacts are always fresh nodes; downstream artifacts are
shared in chunks of at most ``CHUNK`` upstream links to keep node counts
moderate.

The stage pattern fixtures (bundled as ``fixtures/table3_*``) carry
fixed per-stage violation pattern counts at desk size; each row's share
of violations and the stage violation rate hold at one decimal.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

CHUNK = 50

# Pattern rows: (upstream license, downstream license, count). The first
# ten rows of each stage follow the target ranking; "filler" rows make
# up the remaining violations with patterns that rank below the tenth.
STAGE_PATTERNS = {
    "dataset-model": {
        "evaluated": 5600,
        "rows": [
            ("CC-BY-SA-4.0", "Apache-2.0", 367),          # SA -> P
            ("CC-BY-NC-4.0", "MIT", 184),                 # NC -> P
            ("GPL-3.0-only", "MIT", 167),                 # CL -> P
            ("CC-BY-NC-SA-4.0", "MIT", 70),               # NC-SA -> P
            ("CC-BY-NC-ND-4.0", "MIT", 55),               # NC-ND -> P
            ("OpenRAIL-M", "Apache-2.0", 39),             # ML -> P
            ("MIT", "CC0-1.0", 24),                       # P -> PD
            ("CC-BY-NC-4.0", "OpenRAIL-M", 16),           # NC -> ML
            ("CC-BY-NC-SA-4.0", "OpenRAIL-M", 14),        # NC-SA -> ML
            ("CC-BY-NC-SA-4.0", "CC-BY-SA-4.0", 12),      # NC-SA -> SA
        ],
        "filler": [
            ("CC-BY-ND-4.0", "MIT", 11),                  # ND -> P
            ("GPL-3.0-only", "OpenRAIL-M", 11),           # CL -> ML
            ("CC-BY-SA-4.0", "OpenRAIL-M", 10),           # SA -> ML
        ],
        "compliant": ("MIT", "Apache-2.0"),
    },
    "model-repo": {
        "evaluated": 11800,
        "rows": [
            ("OpenRAIL-M", "MIT", 3558),                  # ML -> P
            ("CC-BY-NC-4.0", "MIT", 293),                 # NC -> P
            ("CC-BY-NC-SA-4.0", "MIT", 109),              # NC-SA -> P
            ("MIT", "CC0-1.0", 69),                       # P -> PD
            ("GPL-3.0-only", "MIT", 55),                  # CL -> P
            ("CC-BY-SA-4.0", "MIT", 43),                  # SA -> P
            ("OpenRAIL-M", "CC0-1.0", 35),                # ML -> PD
            ("OpenRAIL-M", "CC-BY-SA-4.0", 14),           # ML -> SA
            ("CC-BY-NC-ND-4.0", "MIT", 9),                # NC-ND -> P
            ("CC-BY-NC-4.0", "CC0-1.0", 2),               # NC -> PD
        ],
        "filler": [
            ("CC-BY-ND-4.0", "MIT", 1),                   # ND -> P
            ("GPL-3.0-only", "OpenRAIL-M", 1),            # CL -> ML
        ],
        "compliant": ("Apache-2.0", "MIT"),
    },
    "dataset-repo": {
        "evaluated": 5420,
        "rows": [
            ("CC-BY-SA-4.0", "MIT", 859),                 # SA -> P
            ("GPL-3.0-only", "MIT", 218),                 # CL -> P
            ("CC-BY-NC-4.0", "MIT", 171),                 # NC -> P
            ("MIT", "CC0-1.0", 52),                       # P -> PD
            ("CC-BY-NC-SA-4.0", "MIT", 27),               # NC-SA -> P
            ("CC-BY-SA-4.0", "CC0-1.0", 10),              # SA -> PD
            ("OpenRAIL-M", "MIT", 9),                     # ML -> P
            ("CC-BY-NC-ND-4.0", "MIT", 6),                # NC-ND -> P
            ("GPL-3.0-only", "CC0-1.0", 2),               # CL -> PD
            ("CC-BY-NC-4.0", "CC0-1.0", 1),               # NC -> PD
        ],
        "filler": [],
        "compliant": ("Apache-2.0", "MIT"),
    },
}


@dataclass
class Dumps:
    datasets: list[dict] = field(default_factory=list)
    models: list[dict] = field(default_factory=list)
    repos: list[dict] = field(default_factory=list)

    def extend(self, other: Dumps) -> Dumps:
        self.datasets += other.datasets
        self.models += other.models
        self.repos += other.repos
        return self

    def shuffled(self, seed: int) -> Dumps:
        rng = random.Random(seed)
        out = Dumps(list(self.datasets), list(self.models), list(self.repos))
        for rows in (out.datasets, out.models, out.repos):
            rng.shuffle(rows)
        return out

    def write(self, directory: str | Path) -> None:
        import json

        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        for name, rows in (("datasets", self.datasets), ("models", self.models), ("repos", self.repos)):
            with open(out / f"{name}.jsonl", "w", encoding="utf-8", newline="\n") as fh:
                for row in rows:
                    fh.write(json.dumps(row, sort_keys=True) + "\n")


class _Ids:
    def __init__(self, prefix: str) -> None:
        self.prefix = prefix
        self.n = {"ds": 0, "model": 0, "repo": 0}

    def next(self, kind: str) -> str:
        self.n[kind] += 1
        base = f"{self.prefix}/{kind}-{self.n[kind]:05d}"
        return f"github.com/{base}" if kind == "repo" else base


def _licenses(value: str | Sequence[str]) -> list[str]:
    return [value] if isinstance(value, str) else list(value)


def _repo(rid: str, licenses: Iterable[str], models: Iterable[str], terms_preserved: bool = False) -> dict:
    rec = {
        "id": rid,
        "detected_licenses": [{"spdx": lic, "source_file": "LICENSE"} for lic in licenses],
        "model_matches": [
            {"model_id": m, "file": "app.py", "signature_id": "hf-any-from-pretrained"} for m in models
        ],
    }
    if terms_preserved:
        rec["terms_preserved"] = True
    return rec


def dataset_model_dumps(
    downstreams: Iterable[tuple[str | Sequence[str], Sequence[str | Sequence[str]]]],
    prefix: str = "fx",
) -> Dumps:
    """One model per entry, tagged with one fresh dataset per upstream license entry."""
    ids = _Ids(prefix)
    out = Dumps()
    for model_lic, upstream in downstreams:
        tags = []
        for up in upstream:
            did = ids.next("ds")
            out.datasets.append({"id": did, "license_tags": _licenses(up)})
            tags.append(did)
        out.models.append({"id": ids.next("model"), "license_tags": _licenses(model_lic), "dataset_tags": tags})
    return out


def model_repo_dumps(
    downstreams: Iterable[tuple[str | Sequence[str], Sequence[str | Sequence[str]]]],
    prefix: str = "fx",
    terms_preserved: bool = False,
) -> Dumps:
    """One repository per entry, matching one fresh model per upstream license entry."""
    ids = _Ids(prefix)
    out = Dumps()
    for repo_lic, upstream in downstreams:
        mids = []
        for up in upstream:
            mid = ids.next("model")
            out.models.append({"id": mid, "license_tags": _licenses(up), "dataset_tags": []})
            mids.append(mid)
        out.repos.append(_repo(ids.next("repo"), _licenses(repo_lic), mids, terms_preserved))
    return out


def dataset_repo_dumps(groups: Iterable[tuple[str, str, int]], prefix: str = "fx") -> Dumps:
    """Chains dataset -> model -> repositories yielding *n* closure links per group.

    The model shares its dataset's license, so every closure link pairs
    the dataset license with a repository license.
    """
    ids = _Ids(prefix)
    out = Dumps()
    for up, down, n in groups:
        for start in range(0, n, CHUNK):
            did, mid = ids.next("ds"), ids.next("model")
            out.datasets.append({"id": did, "license_tags": [up]})
            out.models.append({"id": mid, "license_tags": [up], "dataset_tags": [did]})
            for _ in range(min(CHUNK, n - start)):
                out.repos.append(_repo(ids.next("repo"), [down], [mid]))
    return out


def _chunked(groups: Iterable[tuple[str, str, int]]) -> list[tuple[str, list[str]]]:
    out = []
    for up, down, n in groups:
        for start in range(0, n, CHUNK):
            out.append((down, [up] * min(CHUNK, n - start)))
    return out


def pattern_dumps(stage: str, groups: Iterable[tuple[str, str, int]], prefix: str = "fx") -> Dumps:
    """Dumps with exactly *n* links of each (upstream, downstream) license pair."""
    if stage == "dataset-model":
        return dataset_model_dumps(_chunked(groups), prefix)
    if stage == "model-repo":
        return model_repo_dumps(_chunked(groups), prefix)
    if stage == "dataset-repo":
        return dataset_repo_dumps(groups, prefix)
    raise ValueError(f"unknown stage {stage!r}")


def stage_pattern_groups(stage: str) -> list[tuple[str, str, int]]:
    frame = STAGE_PATTERNS[stage]
    violating = frame["rows"] + frame["filler"]
    n_viol = sum(n for _, _, n in violating)
    up, down = frame["compliant"]
    return violating + [(up, down, frame["evaluated"] - n_viol)]


def stage_pattern_dumps(stage: str) -> Dumps:
    short = {"dataset-model": "dm", "model-repo": "mr", "dataset-repo": "dr"}[stage]
    return pattern_dumps(stage, stage_pattern_groups(stage), prefix=f"vp{short}")


# Fixability: downstream license plus the license of each upstream link.
# Models pulling both a non-commercial and a GPL dataset cannot be
# relicensed; the others can.
_UNRESOLVABLE_PAIR = ["CC-BY-NC-4.0", "GPL-3.0-only"]
_UNRESOLVABLE_TRIPLE = ["CC-BY-NC-4.0", "GPL-3.0-only", "CC-BY-NC-SA-4.0"]
_FIXABLE_SINGLES = ["CC-BY-SA-4.0", "CC-BY-NC-4.0", "GPL-3.0-only", "CC-BY-NC-SA-4.0",
                    "CC-BY-NC-ND-4.0", "OpenRAIL-M"]


def fixability_specs(fixable: int, unresolvable: int, compliant: int = 25) -> list[tuple[str, list[str]]]:
    if unresolvable == 1 or fixable < 2:
        raise ValueError("need at least 2 unresolvable (or 0) and 2 fixable violations")
    specs: list[tuple[str, list[str]]] = []
    # One downstream whose two violating upstreams share NC_SA as a way out.
    specs.append(("MIT", ["CC-BY-NC-4.0", "CC-BY-NC-SA-4.0"]))
    for i in range(fixable - 2):
        specs.append(("MIT", [_FIXABLE_SINGLES[i % len(_FIXABLE_SINGLES)]]))
    left = unresolvable
    if left % 2:
        specs.append(("MIT", list(_UNRESOLVABLE_TRIPLE)))
        left -= 3
    specs += [("MIT", list(_UNRESOLVABLE_PAIR)) for _ in range(left // 2)]
    specs += [("MIT", ["Apache-2.0"]) for _ in range(compliant)]
    return specs


def fixability_dumps(stage: str, fixable: int, unresolvable: int) -> Dumps:
    specs = fixability_specs(fixable, unresolvable)
    if stage == "dataset-model":
        return dataset_model_dumps(specs, prefix="fixdm")
    if stage == "model-repo":
        return model_repo_dumps(specs, prefix="fixmr")
    raise ValueError(f"fixability fixtures cover dataset-model and model-repo, not {stage!r}")


FIXABILITY = {"dataset-model": (39, 11), "model-repo": (108, 17)}

# Transition fixtures: per upstream license, 1000 links split over
# downstream licenses. The diagonal share is the category retention.
RETENTION = {
    "dataset-model": {
        "MIT": [("Apache-2.0", 828), ("GPL-3.0-only", 90), ("OpenRAIL-M", 60), ("CC0-1.0", 22)],
        "CC-BY-NC-4.0": [("CC-BY-NC-4.0", 207), ("MIT", 600), ("CC-BY-NC-SA-4.0", 193)],
        "CC-BY-SA-4.0": [("CC-BY-SA-4.0", 39), ("Apache-2.0", 700), ("GPL-3.0-only", 261)],
    },
    "model-repo": {
        "MIT": [("Apache-2.0", 919), ("GPL-3.0-only", 60), ("CC0-1.0", 21)],
        "GPL-3.0-only": [("GPL-3.0-only", 253), ("MIT", 600), ("CC-BY-SA-4.0", 147)],
        "OpenRAIL-M": [("OpenRAIL", 4), ("MIT", 900), ("GPL-3.0-only", 60), ("CC0-1.0", 36)],
        "CC-BY-NC-4.0": [("CC-BY-NC-4.0", 67), ("MIT", 500), ("OpenRAIL-M", 433)],
        "CC-BY-SA-4.0": [("CC-BY-SA-4.0", 17), ("MIT", 700), ("GPL-3.0-only", 283)],
    },
}


def retention_dumps(stage: str) -> Dumps:
    groups = [(up, down, n) for up, rows in RETENTION[stage].items() for down, n in rows]
    return pattern_dumps(stage, groups, prefix=f"ret{'dm' if stage == 'dataset-model' else 'mr'}")


def minimal_dumps() -> Dumps:
    """One dataset, one model trained on it, one repository using the model."""
    return Dumps(
        datasets=[{"id": "demo-org/tiny-corpus", "license_tags": ["cc-by-sa-4.0"], "likes": 3}],
        models=[{"id": "demo-org/tiny-model", "license_tags": ["apache-2.0"],
                 "dataset_tags": ["tiny-corpus"], "likes": 42}],
        repos=[_repo("github.com/demo-org/tiny-app", ["MIT"], ["demo-org/tiny-model"])],
    )


BUNDLED = {
    "table3_dm": lambda: stage_pattern_dumps("dataset-model"),
    "table3_mr": lambda: stage_pattern_dumps("model-repo"),
    "table3_dr": lambda: stage_pattern_dumps("dataset-repo"),
    "minimal": minimal_dumps,
}
