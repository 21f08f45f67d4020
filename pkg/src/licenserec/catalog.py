"""License catalog: canonical ids, aliases, categories and clause profiles.

Membership and profiles live in ``data/catalog.json``; this module only
loads, validates and queries that data.
"""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType

from licenserec.errors import DuplicateAlias, SchemaError

__all__ = [
    "ACTIONS",
    "Catalog",
    "CatalogEntry",
    "Category",
    "ClauseProfile",
    "Status",
    "check_coherence",
    "default_catalog",
    "is_unknown",
    "load_catalog",
    "load_whitelist",
    "unknown_token",
]

UNKNOWN_PREFIX = "UNKNOWN:"


class Category(str, Enum):
    PERMISSIVE = "PERMISSIVE"
    COPYLEFT = "COPYLEFT"
    SHARE_ALIKE = "SHARE_ALIKE"
    ML_LICENSE = "ML_LICENSE"
    NC = "NC"
    NC_SA = "NC_SA"
    NC_ND = "NC_ND"
    ND = "ND"
    PUBLIC_DOMAIN = "PUBLIC_DOMAIN"
    UNKNOWN = "UNKNOWN"

    @property
    def short(self) -> str:
        """Abbreviation used in pattern tables, e.g. ``NC-SA``."""
        return _SHORT[self]

    @property
    def code(self) -> str:
        """Export code: the enum value, with ``ML`` for ML licenses."""
        return "ML" if self is Category.ML_LICENSE else self.value

    @classmethod
    def from_code(cls, code: str) -> Category:
        return cls.ML_LICENSE if code == "ML" else cls(code)

    @classmethod
    def known(cls) -> tuple[Category, ...]:
        return tuple(c for c in cls if c is not cls.UNKNOWN)


_SHORT = {
    Category.PERMISSIVE: "P",
    Category.COPYLEFT: "CL",
    Category.SHARE_ALIKE: "SA",
    Category.ML_LICENSE: "ML",
    Category.NC: "NC",
    Category.NC_SA: "NC-SA",
    Category.NC_ND: "NC-ND",
    Category.ND: "ND",
    Category.PUBLIC_DOMAIN: "PD",
    Category.UNKNOWN: "UNKNOWN",
}

# Repository license occurrences per category; the fallback frequency
# weight pool when an entry carries no count of its own.
REPO_CATEGORY_COUNTS: Mapping[Category, int] = MappingProxyType({
    Category.PERMISSIVE: 465_053,
    Category.COPYLEFT: 32_603,
    Category.ML_LICENSE: 995,
    Category.SHARE_ALIKE: 2_409,
    Category.PUBLIC_DOMAIN: 3_938,
    Category.NC: 4_844,
    Category.NC_SA: 2_672,
    Category.NC_ND: 842,
    Category.ND: 41,
})


class Status(str, Enum):
    PERMISSION = "Permission"
    DUTY = "Duty"
    PROHIBITION = "Prohibition"
    SILENT = "Silent"


ACTIONS: tuple[str, ...] = (
    "commercial_use",
    "create_derivatives",
    "distribute",
    "relicense_permissively",
    "share_alike_same_terms",
    "disclose_source",
    "attribution",
    "include_license_terms",
    "use_restrictions_ethical",
)


@dataclass(frozen=True)
class ClauseProfile:
    """One :class:`Status` per action in :data:`ACTIONS`."""

    statuses: tuple[tuple[str, Status], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Status | str]) -> ClauseProfile:
        statuses = []
        for action in ACTIONS:
            raw = mapping.get(action, Status.SILENT)
            statuses.append((action, Status(raw)))
        return cls(tuple(statuses))

    @classmethod
    def silent(cls) -> ClauseProfile:
        return cls.from_mapping({})

    def __getitem__(self, action: str) -> Status:
        for name, status in self.statuses:
            if name == action:
                return status
        raise KeyError(action)

    def as_dict(self) -> dict[str, str]:
        return {name: status.value for name, status in self.statuses}

    @property
    def all_silent(self) -> bool:
        return all(s is Status.SILENT for _, s in self.statuses)

    def actions_with(self, status: Status) -> tuple[str, ...]:
        return tuple(name for name, s in self.statuses if s is status)


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    aliases: frozenset[str]
    category: Category
    profile: ClauseProfile
    frequency_weight: int
    cc_family: tuple[str, str] | None = None
    whitelisted: bool = False

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "aliases": sorted(self.aliases),
            "category": self.category.value,
            "profile": self.profile.as_dict(),
            "frequency_weight": self.frequency_weight,
            "whitelisted": self.whitelisted,
        }
        if self.cc_family:
            out["cc_family"] = {"family": self.cc_family[0], "version": self.cc_family[1]}
        return out


def unknown_token(raw: str) -> str:
    return f"{UNKNOWN_PREFIX}{raw.strip()}"


def is_unknown(license_id: str) -> bool:
    return license_id.startswith(UNKNOWN_PREFIX)


def _tag_key(raw: str) -> str:
    key = raw.strip().casefold()
    if key.startswith("license:"):
        key = key[len("license:"):]
    key = re.sub(r"[\s_]+", "-", key)
    return key.strip("-")


def _is_cc_id(license_id: str) -> bool:
    upper = license_id.upper()
    return upper.startswith("CC-") or upper.startswith("CC0")


@dataclass(frozen=True)
class Catalog:
    entries: tuple[CatalogEntry, ...]
    _by_id: Mapping[str, CatalogEntry] = field(repr=False, compare=False)
    _aliases: Mapping[str, str] = field(repr=False, compare=False)

    @classmethod
    def from_entries(cls, entries: Iterable[CatalogEntry]) -> Catalog:
        """Build a catalog, validating alias uniqueness and CC family markers."""
        ordered = tuple(sorted(entries, key=lambda e: e.id.casefold()))
        by_id: dict[str, CatalogEntry] = {}
        aliases: dict[str, str] = {}
        for entry in ordered:
            if entry.id.casefold() in by_id:
                raise SchemaError(f"duplicate license id {entry.id!r}", "id")
            if bool(entry.cc_family) != _is_cc_id(entry.id):
                raise SchemaError(
                    f"cc_family must be present exactly for Creative Commons ids: {entry.id!r}",
                    "cc_family",
                )
            if entry.category is Category.UNKNOWN:
                raise SchemaError(f"catalog entry {entry.id!r} cannot be UNKNOWN", "category")
            by_id[entry.id.casefold()] = entry
        for entry in ordered:
            for tag in sorted({entry.id, *entry.aliases}):
                key = _tag_key(tag)
                owner = aliases.get(key)
                if owner is not None and owner != entry.id:
                    raise DuplicateAlias(tag, owner, entry.id)
                aliases[key] = entry.id
        return cls(ordered, MappingProxyType(by_id), MappingProxyType(aliases))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.entries)

    def get(self, license_id: str) -> CatalogEntry | None:
        if is_unknown(license_id):
            return None
        return self._by_id.get(license_id.casefold())

    def __contains__(self, license_id: str) -> bool:
        return self.get(license_id) is not None

    def normalize_license_tag(self, raw: str) -> str:
        """Resolve a raw tag to a canonical id, or wrap it as an UNKNOWN token.

        Matching ignores case, a ``license:`` prefix, and runs of spaces or
        underscores. A trailing ``+`` selects the ``-or-later`` variant when
        the catalog has one.
        """
        if is_unknown(raw):
            return raw
        key = _tag_key(raw)
        if key in self._aliases:
            return self._aliases[key]
        if key.endswith("+"):
            base = key[:-1]
            stem = base[: -len("-only")] if base.endswith("-only") else base
            for candidate in (f"{stem}-or-later", base):
                if candidate in self._aliases:
                    return self._aliases[candidate]
        return unknown_token(raw)

    def categorize(self, license_id: str) -> Category:
        entry = self.get(license_id)
        return entry.category if entry else Category.UNKNOWN

    def clause_profile(self, license_id: str) -> ClauseProfile:
        entry = self.get(license_id)
        return entry.profile if entry else ClauseProfile.silent()

    def whitelist(self) -> frozenset[str]:
        return frozenset(e.id for e in self.entries if e.whitelisted)

    def with_frequencies(self, counts: Mapping[str, int]) -> Catalog:
        """Return a copy whose weights are replaced by corpus *counts* where given."""
        lowered = {self.normalize_license_tag(k).casefold(): v for k, v in counts.items()}
        return Catalog.from_entries(
            replace(e, frequency_weight=int(lowered.get(e.id.casefold(), e.frequency_weight)))
            for e in self.entries
        )

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


def _entry_from_json(obj: object, index: int) -> tuple[CatalogEntry, bool]:
    where = f"entry {index}"
    if not isinstance(obj, dict):
        raise SchemaError("catalog entries must be objects", where)
    try:
        license_id = obj["id"]
        category = Category(obj["category"])
    except KeyError as exc:
        raise SchemaError(f"missing field {exc.args[0]!r}", where) from None
    except ValueError:
        raise SchemaError(f"bad category {obj.get('category')!r}", f"{where}.category") from None
    if not isinstance(license_id, str) or not license_id.strip():
        raise SchemaError("id must be a non-empty string", f"{where}.id")
    aliases = obj.get("aliases", [])
    if not isinstance(aliases, list) or not all(isinstance(a, str) for a in aliases):
        raise SchemaError("aliases must be a list of strings", f"{where}.aliases")
    profile_raw = obj.get("profile")
    if not isinstance(profile_raw, dict):
        raise SchemaError("profile must be an object", f"{where}.profile")
    unknown_actions = set(profile_raw) - set(ACTIONS)
    if unknown_actions:
        raise SchemaError(f"unknown actions {sorted(unknown_actions)}", f"{where}.profile")
    try:
        profile = ClauseProfile.from_mapping(profile_raw)
    except ValueError as exc:
        raise SchemaError(str(exc), f"{where}.profile") from None
    weight = obj.get("frequency_weight")
    has_weight = weight is not None
    if has_weight and (not isinstance(weight, int) or isinstance(weight, bool) or weight < 0):
        raise SchemaError("frequency_weight must be a non-negative integer", f"{where}.frequency_weight")
    cc = obj.get("cc_family")
    cc_family = None
    if cc is not None:
        if not isinstance(cc, dict) or not {"family", "version"} <= set(cc):
            raise SchemaError("cc_family needs family and version", f"{where}.cc_family")
        cc_family = (str(cc["family"]), str(cc["version"]))
    entry = CatalogEntry(
        id=license_id,
        aliases=frozenset(aliases),
        category=category,
        profile=profile,
        frequency_weight=weight if has_weight else 0,
        cc_family=cc_family,
        whitelisted=bool(obj.get("whitelisted", False)),
    )
    return entry, has_weight


def catalog_from_json(data: object) -> Catalog:
    if not isinstance(data, list) or not data:
        raise SchemaError("catalog must be a non-empty JSON array")
    parsed = [_entry_from_json(obj, i) for i, obj in enumerate(data)]
    # Entries without a weight share their category's repository count pool.
    unweighted: dict[Category, int] = {}
    for entry, has_weight in parsed:
        if not has_weight:
            unweighted[entry.category] = unweighted.get(entry.category, 0) + 1
    entries = []
    for entry, has_weight in parsed:
        if not has_weight:
            pool = REPO_CATEGORY_COUNTS.get(entry.category, 0)
            entry = replace(entry, frequency_weight=pool // unweighted[entry.category])
        entries.append(entry)
    return Catalog.from_entries(entries)


def load_catalog(path: str | Path) -> Catalog:
    """Load and validate a catalog file.

    Raises:
        SchemaError: empty or malformed file.
        DuplicateAlias: one tag resolves to two entries.
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise SchemaError("empty catalog file", str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    return catalog_from_json(data)


@lru_cache(maxsize=1)
def _bundled_catalog() -> Catalog:
    with resources.as_file(resources.files("licenserec") / "data" / "catalog.json") as path:
        return load_catalog(path)


def default_catalog() -> Catalog:
    return _bundled_catalog()


def load_whitelist(path: str | Path, catalog: Catalog) -> frozenset[str]:
    """Read a whitelist: a JSON array of ids, or one id per line (``#`` comments)."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
        if not all(isinstance(x, str) for x in raw):
            raise SchemaError("whitelist entries must be strings", str(path))
    else:
        raw = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        raw = [ln for ln in raw if ln]
    out = set()
    for tag in raw:
        canonical = catalog.normalize_license_tag(tag)
        if is_unknown(canonical):
            raise SchemaError(f"whitelist names unknown license {tag!r}", str(path))
        out.add(canonical)
    return frozenset(out)


def check_coherence(catalog: Catalog) -> list[str]:
    """Report entries whose clause profile contradicts their category."""
    problems = []
    P, D = Status.PROHIBITION, Status.DUTY
    for e in catalog:
        prof, cat = e.profile, e.category
        if cat in (Category.NC, Category.NC_SA, Category.NC_ND) and prof["commercial_use"] is not P:
            problems.append(f"{e.id}: {cat.value} entry lacks Prohibition(commercial_use)")
        if cat in (Category.ND, Category.NC_ND) and prof["create_derivatives"] is not P:
            problems.append(f"{e.id}: {cat.value} entry lacks Prohibition(create_derivatives)")
        if cat in (Category.SHARE_ALIKE, Category.COPYLEFT, Category.NC_SA) and prof["share_alike_same_terms"] is not D:
            problems.append(f"{e.id}: {cat.value} entry lacks Duty(share_alike_same_terms)")
        if cat is Category.ML_LICENSE:
            if prof["include_license_terms"] is not D:
                problems.append(f"{e.id}: ML_LICENSE entry lacks Duty(include_license_terms)")
            if prof["use_restrictions_ethical"] is Status.SILENT:
                problems.append(f"{e.id}: ML_LICENSE entry is Silent on use_restrictions_ethical")
        if cat is Category.PUBLIC_DOMAIN and (prof.actions_with(D) or prof.actions_with(P)):
            problems.append(f"{e.id}: PUBLIC_DOMAIN entry carries a Duty or Prohibition")
    return problems
