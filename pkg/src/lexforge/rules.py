"""Context-sensitive rewrite rules over phone sequences.

Rule files use one rule per line:

    RULE <id> <category> <mode>  <focus> -> <replacement> / <left> _ <right>

``<focus>``, ``<left>`` and ``<right>`` are space-separated phone symbols
or ``[CLASS]`` references, ``∅`` is the empty sequence, ``#`` matches a
word boundary (start of the pronunciation in the left context, end in the
right).  Classes are declared as ``CLASS <NAME> = <sym> <sym> ...``.
Lines whose first non-blank character is ``#`` are comments ('#' cannot
start an inline comment because it doubles as the boundary symbol).

Obligatory rules rewrite deterministically (switch packs); optional rules
drive variant generation with subset-over-rules semantics: a chosen rule
fires at all of its matching sites, rules apply in list order, and a rule
may feed a later one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    DuplicateRule,
    InvalidCap,
    ModeConflict,
    ParseError,
    UnknownPhone,
)
from .phones import PhoneInventory

CATEGORIES = ("switch", "connected-speech", "variety-specific", "manual-template")
MODES = ("obligatory", "optional")

EMPTY_MARK = "∅"


class _Boundary:
    __slots__ = ()

    def __repr__(self):
        return "#"


#: Sentinel for the word-boundary symbol in context patterns.
BOUNDARY = _Boundary()

# A pattern atom is a literal symbol, a resolved feature class, or BOUNDARY.
Atom = Union[str, frozenset, _Boundary]


def _atom_matches(atom: Atom, symbol: str) -> bool:
    if isinstance(atom, frozenset):
        return symbol in atom
    return atom == symbol


@dataclass(frozen=True)
class RewriteRule:
    id: str
    category: str
    mode: str
    focus: tuple[Atom, ...]
    replacement: tuple[str, ...]
    left_context: tuple[Atom, ...] = ()
    right_context: tuple[Atom, ...] = ()

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown rule category {self.category!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown rule mode {self.mode!r}")
        if not self.focus and self.category != "manual-template":
            raise ValueError(f"rule {self.id!r} has an empty focus")
        if self.category == "switch" and self.mode != "obligatory":
            raise ModeConflict(f"switch rule {self.id!r} must be obligatory")
        if self.category in ("connected-speech", "variety-specific") and self.mode != "optional":
            raise ModeConflict(f"{self.category} rule {self.id!r} must be optional")


class RuleSet:
    """Ordered list of rewrite rules; application order is list order."""

    def __init__(self, rules: Iterable[RewriteRule], name: str = "rules"):
        self.name = name
        self.rules: tuple[RewriteRule, ...] = tuple(rules)
        seen = set()
        for rule in self.rules:
            if rule.id in seen:
                raise DuplicateRule(f"duplicate rule id {rule.id!r}")
            seen.add(rule.id)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def of_mode(self, mode: str) -> "RuleSet":
        return RuleSet([r for r in self.rules if r.mode == mode], name=f"{self.name}:{mode}")

    def of_category(self, category: str) -> "RuleSet":
        return RuleSet(
            [r for r in self.rules if r.category == category], name=f"{self.name}:{category}"
        )


def _parse_atoms(tokens, classes, lineno, allow_boundary):
    atoms = []
    for tok in tokens:
        if tok == EMPTY_MARK:
            continue
        if tok == "#":
            if not allow_boundary:
                raise ParseError("word boundary '#' is only valid in contexts", line=lineno)
            atoms.append(BOUNDARY)
        elif tok.startswith("[") and tok.endswith("]"):
            name = tok[1:-1]
            if name not in classes:
                raise ParseError(f"undeclared feature class [{name}]", line=lineno)
            atoms.append(classes[name])
        else:
            atoms.append(tok)
    return tuple(atoms)


def _parse_symbols(tokens, lineno, what):
    symbols = []
    for tok in tokens:
        if tok == EMPTY_MARK:
            continue
        if tok == "#" or (tok.startswith("[") and tok.endswith("]")):
            raise ParseError(f"{what} must contain only phone symbols, got {tok!r}", line=lineno)
        symbols.append(tok)
    return tuple(symbols)


def parse_rule_file(text: str, name: str = "rules") -> RuleSet:
    """Parse a rule file into a RuleSet with feature classes resolved."""
    classes: dict[str, frozenset] = {}
    # Classes first so packs can keep declarations anywhere in the file.
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("CLASS "):
            body = line[len("CLASS "):]
            if "=" not in body:
                raise ParseError("expected 'CLASS <NAME> = <sym> ...'", line=lineno)
            cname, members = body.split("=", 1)
            cname = cname.strip()
            if not cname:
                raise ParseError("empty class name", line=lineno)
            if cname in classes:
                raise ParseError(f"duplicate class {cname!r}", line=lineno)
            classes[cname] = frozenset(members.split())

    rules = []
    ids = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("CLASS "):
            continue
        if not line.startswith("RULE "):
            raise ParseError(f"expected RULE or CLASS, got {raw.strip()!r}", line=lineno)
        fields = line.split(None, 4)
        if len(fields) < 5:
            raise ParseError("expected 'RULE <id> <category> <mode> <pattern>'", line=lineno)
        _, rule_id, category, mode, pattern = fields
        if category not in CATEGORIES:
            raise ParseError(f"unknown category {category!r}", line=lineno)
        if mode not in MODES:
            raise ParseError(f"unknown mode {mode!r}", line=lineno)
        if rule_id in ids:
            raise DuplicateRule(f"duplicate rule id {rule_id!r}", line=lineno)

        if "->" not in pattern:
            raise ParseError("missing '->' in rule pattern", line=lineno)
        lhs, rhs = pattern.split("->", 1)
        if "/" in rhs:
            replacement_part, context_part = rhs.split("/", 1)
            if context_part.count("_") != 1:
                raise ParseError("context must contain exactly one '_'", line=lineno)
            left_part, right_part = context_part.split("_", 1)
        else:
            replacement_part, left_part, right_part = rhs, "", ""

        focus = _parse_atoms(lhs.split(), classes, lineno, allow_boundary=False)
        replacement = _parse_symbols(replacement_part.split(), lineno, "replacement")
        left = _parse_atoms(left_part.split(), classes, lineno, allow_boundary=True)
        right = _parse_atoms(right_part.split(), classes, lineno, allow_boundary=True)

        try:
            rule = RewriteRule(rule_id, category, mode, focus, replacement, left, right)
        except ModeConflict as exc:
            raise ModeConflict(str(exc), line=lineno) from None
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        rules.append(rule)
        ids.add(rule_id)
    return RuleSet(rules, name=name)


def match_context(rule: RewriteRule, pron: Sequence[str], position: int) -> bool:
    """True iff the rule's focus and both contexts match at ``position``."""
    flen = len(rule.focus)
    if flen == 0 or position < 0 or position + flen > len(pron):
        return False
    for k, atom in enumerate(rule.focus):
        if not _atom_matches(atom, pron[position + k]):
            return False
    i = position
    for atom in reversed(rule.left_context):
        if atom is BOUNDARY:
            if i != 0:
                return False
        else:
            if i == 0 or not _atom_matches(atom, pron[i - 1]):
                return False
            i -= 1
    j = position + flen
    for atom in rule.right_context:
        if atom is BOUNDARY:
            if j != len(pron):
                return False
        else:
            if j >= len(pron) or not _atom_matches(atom, pron[j]):
                return False
            j += 1
    return True


def apply_rule(pron: Sequence[str], rule: RewriteRule) -> tuple[tuple[str, ...], bool]:
    """Apply one rule left-to-right, exhaustively, at all matching sites.

    The left context sees already-rewritten material, the right context
    the not-yet-rewritten remainder (sed semantics).  Returns the result
    and whether the rule fired at least once.
    """
    if not rule.focus:
        return tuple(pron), False
    seq = list(pron)
    fired = False
    i = 0
    while i + len(rule.focus) <= len(seq):
        if match_context(rule, seq, i):
            seq[i : i + len(rule.focus)] = rule.replacement
            fired = True
            i += len(rule.replacement)
        else:
            i += 1
    return tuple(seq), fired


def _check_replacement(rule: RewriteRule, inventory: Optional[PhoneInventory]):
    if inventory is None:
        return
    for symbol in rule.replacement:
        if symbol not in inventory:
            raise UnknownPhone(
                f"rule {rule.id!r} introduces {symbol!r}, absent from inventory"
                f" {inventory.name!r}"
            )


def apply_obligatory(
    pron: Sequence[str], rules: RuleSet, inventory: Optional[PhoneInventory] = None
) -> tuple[str, ...]:
    """Deterministically rewrite ``pron`` with an obligatory rule pack."""
    for rule in rules:
        if rule.mode != "obligatory":
            raise ValueError(f"rule {rule.id!r} is not obligatory")
    seq = tuple(pron)
    for rule in rules:
        seq, fired = apply_rule(seq, rule)
        if fired:
            _check_replacement(rule, inventory)
    return seq


def generate_variants(
    pron: Sequence[str],
    rules: RuleSet,
    cap: int = 64,
    inventory: Optional[PhoneInventory] = None,
) -> list[tuple[str, ...]]:
    """All pronunciations reachable by firing any subset of optional rules.

    A chosen rule fires at all of its matching sites; rules apply in list
    order with feeding enabled.  The result always contains the input
    pronunciation, is deduplicated, and is truncated to ``cap`` variants
    by priority: fewer rules fired first, then lexicographically by the
    sequence of fired rule ids.
    """
    if cap < 1:
        raise InvalidCap(f"cap must be >= 1, got {cap}")
    for rule in rules:
        if rule.mode != "optional":
            raise ValueError(f"rule {rule.id!r} is not optional")

    canonical = tuple(pron)
    best: dict[tuple[str, ...], tuple[int, tuple[str, ...]]] = {}

    def record(seq, signature):
        key = (len(signature), signature)
        if seq not in best or key < best[seq]:
            best[seq] = key

    def visit(seq, index, signature):
        if index == len(rules.rules):
            record(seq, signature)
            return
        rule = rules.rules[index]
        rewritten, fired = apply_rule(seq, rule)
        visit(seq, index + 1, signature)
        if fired:
            _check_replacement(rule, inventory)
            visit(rewritten, index + 1, signature + (rule.id,))

    visit(canonical, 0, ())
    ranked = sorted(best.items(), key=lambda item: item[1])
    return [seq for seq, _ in ranked[:cap]]
