"""Find model invocations in Python source with a syntax tree.

A signature names a call path such as ``*.from_pretrained`` or
``pipeline``. A call matches when its callee path fits the pattern and,
for ``model_id_in_string_arg`` signatures, one of its direct string
arguments mentions a queried model id. Comments never reach the syntax
tree and docstrings are not call arguments, so neither can match.
"""

from __future__ import annotations

import ast
import json
import logging
import os
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from licenserec.errors import DataError, DuplicateSignatureId, SchemaError

logger = logging.getLogger(__name__)

__all__ = [
    "ARG_MATCH_KINDS",
    "ParseFailure",
    "Signature",
    "SignatureSet",
    "UsageMatch",
    "UsageReport",
    "default_signatures",
    "load_signatures",
    "scan_source",
    "scan_tree",
    "signatures_from_json",
]

ARG_MATCH_KINDS = ("model_id_in_string_arg", "any")
_SEGMENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ParseFailure(DataError):
    def __init__(self, file: str, message: str, line: int | None = None) -> None:
        self.file = file
        self.line = line
        where = f"{file}:{line}" if line else file
        super().__init__(f"cannot parse {where}: {message}")

    def to_json(self) -> dict:
        return {"file": self.file, "line": self.line, "error": str(self)}


@dataclass(frozen=True)
class Signature:
    id: str
    callee_pattern: str
    arg_match: str = "model_id_in_string_arg"

    def __post_init__(self) -> None:
        if not self.id:
            raise SchemaError("signature id must be non-empty")
        if not self.callee_pattern:
            raise SchemaError(f"signature {self.id}: empty callee_pattern")
        segments = self.callee_pattern.split(".")
        for i, seg in enumerate(segments):
            if seg == "*" and i == 0 and len(segments) > 1:
                continue
            if not _SEGMENT.match(seg):
                raise SchemaError(f"signature {self.id}: bad pattern segment {seg!r}")
        if self.arg_match not in ARG_MATCH_KINDS:
            raise SchemaError(f"signature {self.id}: arg_match must be one of {ARG_MATCH_KINDS}")

    @property
    def wildcard(self) -> bool:
        return self.callee_pattern.startswith("*.")

    @property
    def specificity(self) -> tuple[int, int, int]:
        # Exact paths beat wildcards, longer beats shorter, arg checks beat "any".
        return (
            0 if self.wildcard else 1,
            self.callee_pattern.count("."),
            1 if self.arg_match == "model_id_in_string_arg" else 0,
        )

    def matches_callee(self, path: str) -> bool:
        if self.wildcard:
            suffix = self.callee_pattern[1:]
            return path.endswith(suffix) and len(path) > len(suffix)
        return path == self.callee_pattern

    def to_json(self) -> dict:
        return {"id": self.id, "callee_pattern": self.callee_pattern, "arg_match": self.arg_match}


@dataclass(frozen=True)
class SignatureSet:
    signatures: tuple[Signature, ...] = ()

    def __len__(self) -> int:
        return len(self.signatures)

    def __iter__(self) -> Iterator[Signature]:
        return iter(self.signatures)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.signatures)


def signatures_from_json(data: object) -> SignatureSet:
    """Validate a decoded signature file.

    Raises:
        SchemaError: not a list of signature objects.
        DuplicateSignatureId: two signatures share an id.
    """
    if not isinstance(data, list):
        raise SchemaError("signature file must be a JSON array")
    seen: set[str] = set()
    sigs = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise SchemaError("signature must be an object", f"signature {i}")
        sig_id, pattern = obj.get("id"), obj.get("callee_pattern")
        if not isinstance(sig_id, str) or not isinstance(pattern, str):
            raise SchemaError("id and callee_pattern must be strings", f"signature {i}")
        if sig_id in seen:
            raise DuplicateSignatureId(sig_id)
        seen.add(sig_id)
        sigs.append(Signature(sig_id, pattern, obj.get("arg_match", "model_id_in_string_arg")))
    return SignatureSet(tuple(sigs))


def load_signatures(path: str | Path) -> SignatureSet:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return SignatureSet()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", str(path)) from None
    return signatures_from_json(data)


@lru_cache(maxsize=1)
def default_signatures() -> SignatureSet:
    ref = resources.files("licenserec") / "data" / "signatures.json"
    return signatures_from_json(json.loads(ref.read_text(encoding="utf-8")))


@dataclass(frozen=True, order=True)
class UsageMatch:
    file: str
    line: int
    signature: str
    model_id: str
    context: str = "ActiveCode"

    def to_json(self) -> dict:
        return {"file": self.file, "line": self.line, "signature": self.signature, "model_id": self.model_id}


def callee_path(func: ast.expr) -> str | None:
    """Dotted path of a callee; non-name bases such as calls become ``?``.

    ``AutoModel.from_pretrained`` -> ``AutoModel.from_pretrained``;
    ``get_cls().from_pretrained`` -> ``?.from_pretrained``.
    """
    parts = []
    node = func
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
    elif parts:
        parts.append("?")
    else:
        return None
    return ".".join(reversed(parts))


def _string_args(call: ast.Call) -> Iterator[str]:
    for arg in list(call.args) + [kw.value for kw in call.keywords]:
        if isinstance(arg, ast.Constant) and isinstance(arg.value, str):
            yield arg.value
        elif isinstance(arg, ast.JoinedStr):
            # Only the literal pieces of an f-string are known statically.
            yield "".join(
                v.value for v in arg.values if isinstance(v, ast.Constant) and isinstance(v.value, str)
            )


def _mentions(text: str, model_id: str) -> bool:
    """Case-insensitive containment that respects id boundaries.

    ``org/model`` is found in ``"hf://org/model"`` but not in
    ``"org/model-large"`` or ``"myorg/model"``.
    """
    hay, needle = text.casefold(), model_id.casefold()
    start = 0
    while (i := hay.find(needle, start)) >= 0:
        before = hay[i - 1] if i > 0 else ""
        after = hay[i + len(needle)] if i + len(needle) < len(hay) else ""
        if not _id_char(before) and not _id_char(after):
            return True
        start = i + 1
    return False


def _id_char(ch: str) -> bool:
    return bool(ch) and (ch.isalnum() or ch in "-_.")


def scan_source(
    text: str,
    sigs: Iterable[Signature] | SignatureSet,
    model_ids: Iterable[str],
    file: str = "<string>",
) -> list[UsageMatch]:
    """Matches for every signature-matching call in *text*.

    Each (call, model id) pair yields at most one match, attributed to the
    most specific matching signature. ``any`` signatures report the call's
    string arguments that name a queried id, or ``*`` if none.

    Raises:
        ParseFailure: *text* is not valid Python.
    """
    try:
        tree = ast.parse(text, filename=file)
    except (SyntaxError, ValueError) as exc:
        raise ParseFailure(file, getattr(exc, "msg", str(exc)), getattr(exc, "lineno", None)) from None
    ordered = sorted(sigs, key=lambda s: (tuple(-x for x in s.specificity), s.id))
    ids = sorted(set(model_ids))
    found: set[UsageMatch] = set()
    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        path = callee_path(node.func)
        if path is None:
            continue
        candidates = [s for s in ordered if s.matches_callee(path)]
        if not candidates:
            continue
        strings = list(_string_args(node))
        named = [m for m in ids if any(_mentions(s, m) for s in strings)]
        claimed: set[str] = set()
        for sig in candidates:
            if sig.arg_match == "model_id_in_string_arg":
                hits = named
            else:
                hits = named or ["*"]
            for model_id in hits:
                if model_id in claimed:
                    continue
                claimed.add(model_id)
                found.add(UsageMatch(file, node.lineno, sig.id, model_id))
    return sorted(found)


@dataclass(frozen=True)
class UsageReport:
    repo: str
    matches: tuple[UsageMatch, ...] = ()
    failures: tuple[dict, ...] = field(default_factory=tuple)

    def model_matches(self) -> list[dict]:
        """Rows for the ``model_matches`` field of a repository dump record."""
        return [
            {"model_id": m.model_id, "file": m.file, "signature_id": m.signature}
            for m in self.matches if m.model_id != "*"
        ]

    def to_json(self) -> dict:
        return {
            "repo": self.repo,
            "matches": [m.to_json() for m in self.matches],
            "failures": list(self.failures),
        }


def scan_tree(
    root: str | Path,
    sigs: Iterable[Signature] | SignatureSet,
    model_ids: Iterable[str],
    *,
    extensions: Iterable[str] = (".py",),
    repo: str | None = None,
) -> UsageReport:
    """Scan every source file under *root*; unreadable or unparseable files are recorded."""
    root_path = Path(root)
    sig_list = list(sigs)
    ids = set(model_ids)
    exts = tuple(e.lower() for e in extensions)
    matches: list[UsageMatch] = []
    failures: list[dict] = []
    files = []
    for dirpath, dirnames, filenames in os.walk(root_path, onerror=lambda e: failures.append(
            {"file": str(getattr(e, "filename", root_path)), "line": None, "error": str(e)})):
        dirnames.sort()
        for name in filenames:
            if name.lower().endswith(exts):
                files.append(Path(dirpath) / name)
    for path in sorted(files, key=lambda p: p.relative_to(root_path).as_posix()):
        rel = path.relative_to(root_path).as_posix()
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            failures.append({"file": rel, "line": None, "error": f"cannot read {rel}: {exc}"})
            continue
        try:
            matches.extend(scan_source(text, sig_list, ids, rel))
        except ParseFailure as exc:
            logger.warning("%s", exc)
            failures.append(exc.to_json())
    failures.sort(key=lambda f: f["file"])
    return UsageReport(repo or root_path.name, tuple(sorted(matches)), tuple(failures))
