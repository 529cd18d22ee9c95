"""Pronunciation lexicon data model, builders, statistics and serialization.

Lexicon files are UTF-8 text, one variant per line::

    <word>\t<phone> <phone> ...[\t<prob>]

sorted by word, variants in stored order.  Manual-addenda files use the
same format preceded by a ``# manual`` header line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ConflictingCanonical, ParseError, UnknownWord
from .phones import PhoneInventory
from .rules import RuleSet, apply_obligatory, generate_variants

FLAVORS = ("standard", "allPVs", "usedPVs", "likelyPVs", "custom")
PROVENANCES = ("canonical", "rule", "manual", "aligned")

Pronunciation = tuple[str, ...]


@dataclass(frozen=True)
class Variant:
    pron: Pronunciation
    provenance: str
    probability: Optional[float] = None

    def __post_init__(self):
        if not self.pron:
            raise ValueError("empty pronunciation")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.probability is not None and not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability out of range: {self.probability}")


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    variants: tuple[Variant, ...]
    language_tag: Optional[str] = None

    def __post_init__(self):
        if not self.word or any(c.isspace() for c in self.word):
            raise ValueError(f"bad word {self.word!r}")
        if not self.variants:
            raise ValueError(f"entry {self.word!r} has no variants")
        prons = [v.pron for v in self.variants]
        if len(set(prons)) != len(prons):
            raise ValueError(f"entry {self.word!r} has duplicate pronunciations")
        if sum(1 for v in self.variants if v.provenance == "canonical") != 1:
            raise ValueError(f"entry {self.word!r} must have exactly one canonical variant")

    @property
    def canonical(self) -> Variant:
        return next(v for v in self.variants if v.provenance == "canonical")


@dataclass
class Lexicon:
    entries: dict[str, LexiconEntry] = field(default_factory=dict)
    flavor: str = "custom"

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        for word, entry in self.entries.items():
            if word != entry.word:
                raise ValueError(f"entry key {word!r} != entry word {entry.word!r}")

    def __len__(self):
        return len(self.entries)

    def __contains__(self, word: str):
        return word in self.entries

    def __getitem__(self, word: str) -> LexiconEntry:
        return self.entries[word]

    @property
    def variant_count(self) -> int:
        return sum(len(e.variants) for e in self.entries.values())


@dataclass(frozen=True)
class LexiconStats:
    entry_count: int
    variant_count: int
    avg_variants_per_word: float
    max_variants_single_word: int
    empty: bool = False


def build_standard(
    words: Iterable[tuple],
    switch_rules: RuleSet,
    inventory: Optional[PhoneInventory] = None,
) -> Lexicon:
    """Build the canonical one-variant-per-word lexicon.

    ``words`` yields ``(word, canonical_pron)`` or ``(word, canonical_pron,
    language_tag)`` tuples.  Each canonical pronunciation is passed through
    the obligatory switch pack; entries with a language tag keep their
    tool-provided pronunciation untouched (foreign words).  A duplicate
    word with a conflicting canonical pronunciation is an error.
    """
    raw: dict[str, tuple[Pronunciation, Optional[str]]] = {}
    for item in words:
        word, pron = item[0], tuple(item[1])
        tag = item[2] if len(item) > 2 else None
        if word in raw:
            if raw[word][0] != pron:
                raise ConflictingCanonical(
                    f"word {word!r}: {' '.join(raw[word][0])} vs {' '.join(pron)}"
                )
            continue
        raw[word] = (pron, tag)

    entries = {}
    for word, (pron, tag) in raw.items():
        if tag is None:
            pron = apply_obligatory(pron, switch_rules, inventory)
        entries[word] = LexiconEntry(word, (Variant(pron, "canonical"),), language_tag=tag)
    return Lexicon(entries, flavor="standard")


def build_all_pvs(
    standard: Lexicon,
    variant_rules: RuleSet,
    manual: Sequence[tuple[str, Sequence[str]]] = (),
    cap: int = 64,
    inventory: Optional[PhoneInventory] = None,
) -> Lexicon:
    """Expand a standard lexicon with rule-generated and manual variants."""
    if standard.flavor != "standard":
        raise ValueError(f"expected a standard lexicon, got flavor {standard.flavor!r}")
    manual_by_word: dict[str, list[Pronunciation]] = {}
    for word, pron in manual:
        if word not in standard:
            raise UnknownWord(f"manual variant for unknown word {word!r}")
        manual_by_word.setdefault(word, []).append(tuple(pron))

    entries = {}
    for word, entry in standard.entries.items():
        canonical = entry.canonical.pron
        prons = generate_variants(canonical, variant_rules, cap=cap, inventory=inventory)
        variants = [Variant(canonical, "canonical")]
        variants.extend(Variant(p, "rule") for p in prons if p != canonical)
        present = {v.pron for v in variants}
        for pron in manual_by_word.get(word, []):
            if pron not in present:
                variants.append(Variant(pron, "manual"))
                present.add(pron)
        entries[word] = LexiconEntry(word, tuple(variants), language_tag=entry.language_tag)
    return Lexicon(entries, flavor="allPVs")


def read_manual_addenda(text: str) -> list[tuple[str, Pronunciation]]:
    """Read a ``# manual`` addenda file into (word, pronunciation) pairs."""
    stripped = text.lstrip()
    if not stripped.startswith("# manual"):
        raise ParseError("manual addenda file must start with a '# manual' header")
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, pron, _ = _parse_lexicon_line(raw, lineno)
        pairs.append((word, pron))
    return pairs


def _parse_lexicon_line(raw: str, lineno: int) -> tuple[str, Pronunciation, Optional[float]]:
    parts = raw.rstrip("\n").split("\t")
    if len(parts) < 2 or not parts[1].split():
        raise ParseError(f"expected '<word>\\t<phones>[\\t<prob>]', got {raw!r}", line=lineno)
    word = parts[0].strip()
    if not word:
        raise ParseError("empty word field", line=lineno)
    pron = tuple(parts[1].split())
    prob = None
    if len(parts) >= 3 and parts[2].strip():
        try:
            prob = float(parts[2])
        except ValueError:
            raise ParseError(f"bad probability {parts[2]!r}", line=lineno) from None
        if not 0.0 <= prob <= 1.0:
            raise ParseError(f"probability out of range: {parts[2]}", line=lineno)
    return word, pron, prob


def read_lexicon(text: str, flavor: str = "custom") -> tuple[Lexicon, int]:
    """Parse a lexicon file.

    The first variant of each word is taken as its canonical form.
    Duplicate (word, pronunciation) pairs are collapsed; the second
    return value counts the collapsed lines.
    """
    variants_by_word: dict[str, list[tuple[Pronunciation, Optional[float]]]] = {}
    collapsed = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        word, pron, prob = _parse_lexicon_line(raw, lineno)
        existing = variants_by_word.setdefault(word, [])
        if any(p == pron for p, _ in existing):
            collapsed += 1
            continue
        existing.append((pron, prob))

    entries = {}
    for word, variants in variants_by_word.items():
        entries[word] = LexiconEntry(
            word,
            tuple(
                Variant(pron, "canonical" if i == 0 else "rule", prob)
                for i, (pron, prob) in enumerate(variants)
            ),
        )
    return Lexicon(entries, flavor=flavor), collapsed


def write_lexicon(lex: Lexicon) -> str:
    """Serialize deterministically: words sorted, variants in stored order."""
    lines = []
    for word in sorted(lex.entries):
        for variant in lex.entries[word].variants:
            line = f"{word}\t{' '.join(variant.pron)}"
            if variant.probability is not None:
                line += f"\t{variant.probability!r}"
            lines.append(line)
    return "\n".join(lines) + "\n" if lines else ""


def lexicon_stats(lex: Lexicon) -> LexiconStats:
    if not lex.entries:
        return LexiconStats(0, 0, 0.0, 0, empty=True)
    counts = [len(e.variants) for e in lex.entries.values()]
    total = sum(counts)
    return LexiconStats(
        entry_count=len(counts),
        variant_count=total,
        avg_variants_per_word=total / len(counts),
        max_variants_single_word=max(counts),
    )


def merge_lexicons(a: Lexicon, b: Lexicon) -> tuple[Lexicon, list[str]]:
    """Union of two lexicons.

    Variants are unioned per word with provenance preserved.  When both
    lexicons know a word with different canonical pronunciations, a's
    canonical wins and b's is kept as a plain non-canonical (manual)
    variant; the conflict is recorded in the returned notes.
    """
    notes = []
    entries = dict(a.entries)
    for word, b_entry in b.entries.items():
        if word not in entries:
            entries[word] = b_entry
            continue
        a_entry = entries[word]
        variants = list(a_entry.variants)
        present = {v.pron for v in variants}
        for variant in b_entry.variants:
            if variant.pron in present:
                continue
            if variant.provenance == "canonical":
                notes.append(
                    f"{word}: conflicting canonicals"
                    f" {' '.join(a_entry.canonical.pron)} vs {' '.join(variant.pron)}"
                )
                variant = Variant(variant.pron, "manual", variant.probability)
            variants.append(variant)
            present.add(variant.pron)
        entries[word] = LexiconEntry(word, tuple(variants), language_tag=a_entry.language_tag)
    return Lexicon(entries, flavor=a.flavor), notes
