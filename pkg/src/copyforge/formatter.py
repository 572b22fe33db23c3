"""Parsing of raw model output and deterministic text normalization.

parse_generation turns a verbatim completion into raw CopyDrafts by
extracting the first well-formed JSON array or object, tolerating prose
and code-fence noise around it. apply_rules then normalizes each
component through an ordered ruleset. The composed default ruleset is
idempotent, which the test suite checks by property.
"""

from __future__ import annotations

import json
import re
import uuid
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from .errors import ParseFailure
from .model import FORMAT_RULE_IDS, CopyDraft, CopyStructure


@dataclass(frozen=True)
class FormatRule:
    """One normalization step; parameters reserved for per-rule options."""

    rule_id: str
    parameters: dict[str, Any] = field(default_factory=dict)


#: Shipped default ruleset. Order matters: comma handling must see the
#: original coordinator ("and" or "&") before substitution rewrites it,
#: and punctuation stripping must run before whitespace cleanup so a
#: bare separator is never left dangling at the end.
BRAND_DEFAULT_V1: tuple[FormatRule, ...] = tuple(
    FormatRule(rule_id) for rule_id in FORMAT_RULE_IDS
)

RULESETS: dict[str, tuple[FormatRule, ...]] = {"brand-default-v1": BRAND_DEFAULT_V1}


def ruleset_for(format_rules: tuple[str, ...] | None) -> tuple[FormatRule, ...]:
    """Resolve a use case's rule id list; None selects the builtin default."""
    if format_rules is None:
        return BRAND_DEFAULT_V1
    return tuple(FormatRule(rule_id) for rule_id in format_rules)


def _default_id() -> str:
    return "copy-" + uuid.uuid4().hex[:12]


def _extract_json(raw: str) -> Any:
    """First well-formed JSON array or object embedded anywhere in raw."""
    decoder = json.JSONDecoder()
    for i, ch in enumerate(raw):
        if ch in "[{":
            try:
                value, _ = decoder.raw_decode(raw, i)
            except ValueError:
                continue
            return value
    raise ParseFailure("no JSON array or object found in response")


def _valid_item(item: Any, components: tuple[str, ...]) -> dict[str, str] | None:
    if not isinstance(item, dict):
        return None
    out: dict[str, str] = {}
    for name in components:
        value = item.get(name)
        if not isinstance(value, str):
            return None
        out[name] = value
    return out


def parse_generation(
    raw: str,
    structure: CopyStructure,
    expected_count: int,
    usecase_id: str = "",
    exact: bool = True,
    make_id: Callable[[], str] | None = None,
) -> list[CopyDraft]:
    """Split one generation response into raw drafts.

    With exact=True (the default) the response must contain exactly
    expected_count items, each carrying every structure component as a
    string; anything else raises ParseFailure. With exact=False the
    valid items are salvaged, capped at expected_count, and the caller
    absorbs the deficit. A single JSON object counts as a one-item batch.
    """
    if expected_count < 1:
        raise ValueError("expected_count must be positive")
    new_id = make_id or _default_id

    value = _extract_json(raw)
    if isinstance(value, dict):
        items: list[Any] = [value]
    elif isinstance(value, list):
        items = value
    else:
        raise ParseFailure("extracted JSON is neither an array nor an object")

    parsed = [_valid_item(item, structure.components) for item in items]

    if exact:
        if len(items) != expected_count:
            raise ParseFailure(
                f"expected {expected_count} copies, response contains {len(items)}"
            )
        for idx, components in enumerate(parsed):
            if components is None:
                missing = [
                    name
                    for name in structure.components
                    if not isinstance(items[idx], dict)
                    or not isinstance(items[idx].get(name), str)
                ]
                raise ParseFailure(
                    f"item {idx} is missing required keys: {', '.join(missing) or 'not an object'}"
                )
        good = [c for c in parsed if c is not None]
    else:
        good = [c for c in parsed if c is not None][:expected_count]

    return [
        CopyDraft(copy_id=new_id(), usecase_id=usecase_id, components=c, formatted=False)
        for c in good
    ]


def parse_refinement(raw: str, structure: CopyStructure) -> dict[str, str]:
    """Parse a single refined copy from a refinement response.

    Accepts a bare JSON object or a one-element array wrapping it.
    """
    value = _extract_json(raw)
    if isinstance(value, list):
        if len(value) != 1:
            raise ParseFailure(
                f"refinement response must hold one copy, found {len(value)}"
            )
        value = value[0]
    components = _valid_item(value, structure.components)
    if components is None:
        raise ParseFailure("refinement response is missing required component keys")
    return components


# --- normalization rules ---------------------------------------------------

# A comma counts as serial only when an earlier comma shows the text is a
# list of three or more items; two-item coordinations keep their comma.
_COORDINATOR = re.compile(r",\s+(?:and\b|&)", re.IGNORECASE)

_STANDALONE_AND = re.compile(r"\band\b", re.IGNORECASE)

_SENTENCE_ENDERS = ".!?"
_STRIPPABLE = ".!;,"


def _serial_comma_removal(text: str) -> str:
    # A removal can expose a fresh serial pair (",, &" collapses to ", &"
    # with the survivor now adjacent), so each removal restarts the scan.
    # Commas only ever disappear, so this terminates.
    out = text
    pos = 0
    while True:
        m = _COORDINATOR.search(out, pos)
        if m is None:
            return out
        if "," in out[: m.start()]:
            out = out[: m.start()] + out[m.start() + 1 :]
            pos = 0
        else:
            pos = m.start() + 1


def _ampersand_substitution(text: str) -> str:
    return _STANDALONE_AND.sub("&", text)


def _terminal_punctuation_strip(text: str) -> str:
    # Strips to a fixpoint rather than one character: a single-character
    # strip can leave another separator exposed, breaking idempotence.
    # Multi-sentence components (a sentence ender anywhere before the
    # final position) are left alone, and a trailing "?" is always kept.
    out = text.rstrip()
    while out and out[-1] in _STRIPPABLE:
        body = out[:-1]
        if any(ch in _SENTENCE_ENDERS for ch in body):
            break
        out = body.rstrip()
    return out


def _whitespace_collapse(text: str) -> str:
    return " ".join(text.split())


_RULE_FUNCS: dict[str, Callable[[str], str]] = {
    "serial_comma_removal": _serial_comma_removal,
    "ampersand_substitution": _ampersand_substitution,
    "terminal_punctuation_strip": _terminal_punctuation_strip,
    "whitespace_collapse": _whitespace_collapse,
}


def apply_rule(rule: FormatRule, text: str) -> str:
    func = _RULE_FUNCS.get(rule.rule_id)
    if func is None:
        raise ValueError(f"unknown format rule: {rule.rule_id!r}")
    return func(text)


def apply_rules(
    draft: CopyDraft, ruleset: tuple[FormatRule, ...] = BRAND_DEFAULT_V1
) -> CopyDraft:
    """Normalize every component through the ruleset, in order."""
    components = dict(draft.components)
    for name, text in components.items():
        for rule in ruleset:
            text = apply_rule(rule, text)
        components[name] = text
    return replace(draft, components=components, formatted=True)
