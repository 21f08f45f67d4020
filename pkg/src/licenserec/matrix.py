"""Directional license compatibility.

``verdict(u, d)`` answers: may a work licensed under ``d`` incorporate or
derive from a work licensed under ``u``? Rules are consulted in order:

1. identical license: always Compatible;
2. explicit (u, d) entries from the matrix file;
3. the matrix's category-level default;
4. clause-profile derivation, only when the category cell is ``Unknown``.

A ``ConditionalOnTermsPreservation`` result is resolved against
``EdgeContext.terms_preserved`` before it is returned.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType

from licenserec.catalog import Catalog, Category, ClauseProfile, Status, default_catalog, is_unknown
from licenserec.errors import MissingCategoryPair, SchemaError
from licenserec.spdx_expr import Conjunction, Disjunction, LicenseExpression, Leaf, parse_expression

__all__ = [
    "BUNDLED_MATRICES",
    "CompatibilityMatrix",
    "CompatibleSet",
    "EdgeContext",
    "RuleSource",
    "check_invariants",
    "Verdict",
    "VerdictKind",
    "default_matrix",
    "derive_fallback_verdict",
    "load_matrix",
    "resolve_matrix",
]

BUNDLED_MATRICES = ("licenserec-default", "peatmoss-style", "eu-jla-style")


class VerdictKind(str, Enum):
    COMPATIBLE = "Compatible"
    INCOMPATIBLE = "Incompatible"
    CONDITIONAL = "ConditionalOnTermsPreservation"
    UNKNOWN = "Unknown"


class RuleSource(str, Enum):
    EXPLICIT = "ExplicitMatrix"
    CATEGORY = "CategoryDefault"
    DERIVED = "ClauseDerivation"


# Higher is stricter; used when comparing derivation with category defaults.
STRICTNESS = {VerdictKind.COMPATIBLE: 0, VerdictKind.CONDITIONAL: 1, VerdictKind.INCOMPATIBLE: 2}


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    reason: str
    source: RuleSource
    trail: tuple[str, ...] = ()

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "reason": self.reason, "source": self.source.value}
        if self.trail:
            out["trail"] = list(self.trail)
        return out


@dataclass(frozen=True)
class EdgeContext:
    terms_preserved: bool = False


DEFAULT_CONTEXT = EdgeContext()


class CompatibleSet(frozenset):
    """A frozenset of license ids; ``unknown`` marks an unevaluable upstream."""

    unknown: bool

    def __new__(cls, items: Iterable[str] = (), unknown: bool = False):
        obj = super().__new__(cls, items)
        obj.unknown = unknown
        return obj


def derive_fallback_verdict(pu: ClauseProfile, pd: ClauseProfile) -> Verdict:
    """Derive a verdict from clause statuses alone.

    A conflict is a Duty on one side that the other side Prohibits, or an
    upstream Prohibition on something the downstream grants to everyone
    (``grant_contradiction``). Without a conflict, an upstream duty to pass
    its license terms along makes the result conditional.
    """
    if pu.all_silent or pd.all_silent:
        return Verdict(VerdictKind.UNKNOWN, "silent_profile", RuleSource.DERIVED)
    for (action, su), (_, sd) in zip(pu.statuses, pd.statuses):
        if su is Status.DUTY and sd is Status.PROHIBITION:
            return Verdict(VerdictKind.INCOMPATIBLE, f"duty_prohibited:{action}", RuleSource.DERIVED)
        if su is Status.PROHIBITION and sd is Status.DUTY:
            return Verdict(VerdictKind.INCOMPATIBLE, f"prohibited_duty:{action}", RuleSource.DERIVED)
        if su is Status.PROHIBITION and sd is Status.PERMISSION:
            return Verdict(VerdictKind.INCOMPATIBLE, f"grant_contradiction:{action}", RuleSource.DERIVED)
    if pu["include_license_terms"] is Status.DUTY:
        return Verdict(VerdictKind.CONDITIONAL, "must_include_license_terms", RuleSource.DERIVED)
    return Verdict(VerdictKind.COMPATIBLE, "no_conflict", RuleSource.DERIVED)


def _resolve(raw: Verdict, ctx: EdgeContext) -> Verdict:
    if raw.kind is not VerdictKind.CONDITIONAL:
        return raw
    trail = raw.trail + (VerdictKind.CONDITIONAL.value, raw.reason)
    if ctx.terms_preserved:
        return Verdict(VerdictKind.COMPATIBLE, "ml_terms_preserved", raw.source, trail)
    return Verdict(VerdictKind.INCOMPATIBLE, "ml_terms_not_preserved", raw.source, trail)


@dataclass(frozen=True)
class CompatibilityMatrix:
    name: str
    category_defaults: Mapping[tuple[Category, Category], VerdictKind]
    explicit: Mapping[tuple[str, str], VerdictKind]
    catalog: Catalog = field(repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def _canonical(self, license_id: str) -> str | None:
        entry = self.catalog.get(self.catalog.normalize_license_tag(license_id))
        return entry.id if entry else None

    def has_explicit(self, u: str, d: str) -> bool:
        return (u.casefold(), d.casefold()) in self.explicit

    def lookup(self, u: str, d: str) -> Verdict:
        """Unresolved verdict: may return ``ConditionalOnTermsPreservation``."""
        key = ("raw", u, d)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        cu, cd = self._canonical(u), self._canonical(d)
        if cu is None or cd is None:
            result = Verdict(VerdictKind.UNKNOWN, "unknown_license", RuleSource.CATEGORY)
        elif cu.casefold() == cd.casefold():
            result = Verdict(VerdictKind.COMPATIBLE, "identical_license", RuleSource.EXPLICIT)
        elif (kind := self.explicit.get((cu.casefold(), cd.casefold()))) is not None:
            result = Verdict(kind, "explicit_rule", RuleSource.EXPLICIT)
        else:
            cat_u, cat_d = self.catalog.categorize(cu), self.catalog.categorize(cd)
            kind = self.category_defaults[(cat_u, cat_d)]
            if kind is not VerdictKind.UNKNOWN:
                result = Verdict(kind, f"category_default:{cat_u.short}->{cat_d.short}", RuleSource.CATEGORY)
            else:
                result = derive_fallback_verdict(
                    self.catalog.clause_profile(cu), self.catalog.clause_profile(cd)
                )
        self._cache[key] = result
        return result

    def verdict(self, u: str, d: str, ctx: EdgeContext = DEFAULT_CONTEXT) -> Verdict:
        return _resolve(self.lookup(u, d), ctx)

    def compatible_set(self, u: str, ctx: EdgeContext = DEFAULT_CONTEXT) -> CompatibleSet:
        """Every catalog id ``d`` with ``verdict(u, d, ctx)`` Compatible."""
        key = ("set", u, ctx.terms_preserved)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self._canonical(u) is None:
            result = CompatibleSet(unknown=True)
        else:
            result = CompatibleSet(
                d for d in self.catalog.ids
                if self.verdict(u, d, ctx).kind is VerdictKind.COMPATIBLE
            )
        self._cache[key] = result
        return result

    def expression_verdict(
        self,
        upstream: str | LicenseExpression,
        downstream: str | LicenseExpression,
        ctx: EdgeContext = DEFAULT_CONTEXT,
    ) -> Verdict:
        """Verdict between two expressions.

        OR means the licensee may pick any branch, so one Compatible branch
        suffices; AND requires every branch. Downstream alternatives are
        expanded first, so one downstream choice must satisfy all upstream
        conjuncts.
        """
        if isinstance(upstream, str):
            upstream = parse_expression(upstream)
        if isinstance(downstream, str):
            downstream = parse_expression(downstream)
        return self._expr(upstream, downstream, ctx)

    def _expr(self, u: LicenseExpression, d: LicenseExpression, ctx: EdgeContext) -> Verdict:
        if isinstance(d, Disjunction):
            return _any(self._expr(u, c, ctx) for c in d.children)
        if isinstance(d, Conjunction):
            return _all(self._expr(u, c, ctx) for c in d.children)
        if isinstance(u, Disjunction):
            return _any(self._expr(c, d, ctx) for c in u.children)
        if isinstance(u, Conjunction):
            return _all(self._expr(c, d, ctx) for c in u.children)
        assert isinstance(u, Leaf) and isinstance(d, Leaf)
        return self.verdict(u.token, d.token, ctx)


def _any(verdicts: Iterable[Verdict]) -> Verdict:
    seen = list(verdicts)
    for kind in (VerdictKind.COMPATIBLE, VerdictKind.UNKNOWN):
        for v in seen:
            if v.kind is kind:
                return v
    return seen[0]


def _all(verdicts: Iterable[Verdict]) -> Verdict:
    seen = list(verdicts)
    for kind in (VerdictKind.INCOMPATIBLE, VerdictKind.UNKNOWN):
        for v in seen:
            if v.kind is kind:
                return v
    return seen[0]


def matrix_from_json(data: object, catalog: Catalog) -> CompatibilityMatrix:
    if not isinstance(data, dict):
        raise SchemaError("matrix file must be a JSON object")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise SchemaError("matrix needs a non-empty name", "name")
    table = data.get("category_defaults")
    if not isinstance(table, dict):
        raise SchemaError("category_defaults must be an object", "category_defaults")
    defaults: dict[tuple[Category, Category], VerdictKind] = {}
    for u_code, row in table.items():
        try:
            cat_u = Category(u_code)
        except ValueError:
            raise SchemaError(f"unknown category {u_code!r}", "category_defaults") from None
        if not isinstance(row, dict):
            raise SchemaError(f"row {u_code} must be an object", "category_defaults")
        for d_code, kind in row.items():
            try:
                defaults[(cat_u, Category(d_code))] = VerdictKind(kind)
            except ValueError:
                raise SchemaError(f"bad cell {u_code}->{d_code}: {kind!r}", "category_defaults") from None
    for cat_u in Category.known():
        for cat_d in Category.known():
            if (cat_u, cat_d) not in defaults:
                raise MissingCategoryPair(cat_u.value, cat_d.value)
    explicit: dict[tuple[str, str], VerdictKind] = {}
    rows = data.get("explicit", [])
    if not isinstance(rows, list):
        raise SchemaError("explicit must be an array", "explicit")
    for i, row in enumerate(rows):
        where = f"explicit[{i}]"
        if not isinstance(row, dict) or not {"u", "d", "kind"} <= set(row):
            raise SchemaError("explicit entries need u, d and kind", where)
        try:
            kind = VerdictKind(row["kind"])
        except ValueError:
            raise SchemaError(f"bad kind {row['kind']!r}", where) from None
        ids = []
        for side in ("u", "d"):
            canonical = catalog.normalize_license_tag(row[side])
            if is_unknown(canonical):
                raise SchemaError(f"{side}={row[side]!r} is not in the catalog", where)
            ids.append(canonical.casefold())
        key = (ids[0], ids[1])
        if key in explicit and explicit[key] is not kind:
            raise SchemaError(f"conflicting explicit entries for {row['u']} -> {row['d']}", where)
        explicit[key] = kind
    return CompatibilityMatrix(name, MappingProxyType(defaults), MappingProxyType(explicit), catalog)


def load_matrix(path: str | Path, catalog: Catalog | None = None) -> CompatibilityMatrix:
    """Load a matrix file and bind it to *catalog* (the bundled one by default).

    Raises:
        SchemaError: malformed file or explicit ids missing from the catalog.
        MissingCategoryPair: the 9x9 category table is incomplete.
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise SchemaError("empty matrix file", str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    return matrix_from_json(data, catalog or default_catalog())


@lru_cache(maxsize=None)
def _bundled(name: str) -> CompatibilityMatrix:
    with resources.as_file(resources.files("licenserec") / "data" / "matrices" / f"{name}.json") as p:
        return load_matrix(p, default_catalog())


def default_matrix(name: str = "licenserec-default") -> CompatibilityMatrix:
    if name not in BUNDLED_MATRICES:
        raise KeyError(f"no bundled matrix named {name!r}")
    return _bundled(name)


def resolve_matrix(name_or_path: str | Path, catalog: Catalog | None = None) -> CompatibilityMatrix:
    """Accept a bundled matrix name or a file path."""
    if str(name_or_path) in BUNDLED_MATRICES and catalog is None:
        return default_matrix(str(name_or_path))
    if str(name_or_path) in BUNDLED_MATRICES:
        with resources.as_file(
            resources.files("licenserec") / "data" / "matrices" / f"{name_or_path}.json"
        ) as p:
            return load_matrix(p, catalog)
    return load_matrix(name_or_path, catalog)


def check_invariants(matrix: CompatibilityMatrix) -> dict[str, list[str]]:
    """Row-level rules every ML-aware matrix is expected to satisfy.

    Checked over all ordered pairs of distinct catalog ids using unresolved
    verdicts, plus reflexivity. Returns failures keyed by check name.
    """
    cat = matrix.catalog
    C, I, K = VerdictKind.COMPATIBLE, VerdictKind.INCOMPATIBLE, VerdictKind.CONDITIONAL
    failures: dict[str, list[str]] = {
        "reflexivity": [], "pd_row": [], "p_row": [], "cl_row": [], "ml_row": [], "nd_rows": [],
    }
    entries = list(cat)
    for eu in entries:
        if matrix.lookup(eu.id, eu.id).kind is not C:
            failures["reflexivity"].append(eu.id)
        for ed in entries:
            if ed is eu:
                continue
            kind = matrix.lookup(eu.id, ed.id).kind
            cu, cd = eu.category, ed.category
            if cu is Category.PUBLIC_DOMAIN and kind is not C:
                failures["pd_row"].append(f"{eu.id} -> {ed.id}: {kind.value}")
            elif cu is Category.PERMISSIVE:
                want = I if cd is Category.PUBLIC_DOMAIN else C
                if kind is not want:
                    failures["p_row"].append(f"{eu.id} -> {ed.id}: {kind.value}")
            elif cu is Category.COPYLEFT and cd is not Category.COPYLEFT and kind is not I:
                failures["cl_row"].append(f"{eu.id} -> {ed.id}: {kind.value}")
            elif cu is Category.ML_LICENSE and kind is not K:
                failures["ml_row"].append(f"{eu.id} -> {ed.id}: {kind.value}")
            elif cu in (Category.ND, Category.NC_ND) and kind is not I:
                failures["nd_rows"].append(f"{eu.id} -> {ed.id}: {kind.value}")
    return failures
