"""Phone inventory, articulatory features and phone-set reduction.

The reduction transforms operate on SAMPA-style symbols:

* R1 devoices every voiced alveolar or postalveolar fricative/affricate
  (z -> s, Z -> S, dZ -> tS).
* R2 splits every diphthong into its two annotated component phones.
* R3 merges every long vowel with its short counterpart (a: -> a).

Pronunciations are plain tuples of phone symbols throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    DuplicatePhone,
    MissingCounterpart,
    MissingDiphthongComponents,
    ParseError,
    UnknownPhone,
)

MANNERS = ("plosive", "fricative", "affricate", "nasal", "liquid", "glide", "vowel")
PLACES = ("labial", "alveolar", "postalveolar", "palatal", "velar", "glottal", "none")

# Sonorants are voiced unless the inventory file says otherwise.
_SONORANT_MANNERS = frozenset({"vowel", "nasal", "liquid", "glide"})

REDUCTION_RULES = ("R1", "R2", "R3")


@dataclass(frozen=True)
class Phone:
    """One phone symbol with the features the reduction rules need.

    ``diphthong`` is ``None`` for non-diphthongs, an empty tuple for a
    phone marked as a diphthong whose components are unknown, and a pair
    of component symbols otherwise.
    """

    symbol: str
    manner: str
    place: str = "none"
    voiced: bool = False
    long: bool = False
    diphthong: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not self.symbol or any(c.isspace() for c in self.symbol):
            raise ValueError(f"phone symbol must be non-empty without whitespace: {self.symbol!r}")
        if self.manner not in MANNERS:
            raise ValueError(f"unknown manner {self.manner!r} for phone {self.symbol!r}")
        if self.place not in PLACES:
            raise ValueError(f"unknown place {self.place!r} for phone {self.symbol!r}")
        if self.diphthong is not None and self.manner != "vowel":
            raise ValueError(f"diphthong annotation on non-vowel {self.symbol!r}")
        if self.long and self.manner != "vowel":
            raise ValueError(f"length mark on non-vowel {self.symbol!r}")

    @property
    def is_diphthong(self) -> bool:
        return self.diphthong is not None


class PhoneInventory:
    """Ordered, unique set of phones addressable by symbol."""

    def __init__(self, phones: Iterable[Phone], name: str = "inventory"):
        self.name = name
        self._phones: list[Phone] = []
        self._by_symbol: dict[str, Phone] = {}
        for phone in phones:
            if phone.symbol in self._by_symbol:
                raise DuplicatePhone(f"duplicate phone symbol {phone.symbol!r}")
            self._by_symbol[phone.symbol] = phone
            self._phones.append(phone)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    def __getitem__(self, symbol: str) -> Phone:
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise UnknownPhone(f"phone {symbol!r} not in inventory {self.name!r}") from None

    def __iter__(self):
        return iter(self._phones)

    def __len__(self) -> int:
        return len(self._phones)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(p.symbol for p in self._phones)


@dataclass(frozen=True)
class PhoneMap:
    """Total mapping from source phone symbols to target symbol sequences."""

    entries: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __getitem__(self, symbol: str) -> tuple[str, ...]:
        try:
            return self.entries[symbol]
        except KeyError:
            raise UnknownPhone(f"phone {symbol!r} has no mapping") from None

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.entries


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    unknown_symbols: tuple[str, ...] = ()
    empty: bool = False


def parse_inventory(text: str, name: str = "inventory") -> PhoneInventory:
    """Parse an inventory file.

    One phone per line: ``<symbol> <manner> [place=<p>] [voiced] [long]
    [diph=<s1>+<s2>]``.  A bare ``diph`` marks a diphthong whose
    components are not annotated.  ``#`` starts a comment, blank lines
    are ignored.
    """
    phones = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ParseError(f"expected '<symbol> <manner> ...', got {raw!r}", line=lineno)
        symbol, manner = fields[0], fields[1]
        place = "none"
        voiced = None
        long_ = False
        diphthong = None
        for item in fields[2:]:
            if item == "voiced":
                voiced = True
            elif item == "long":
                long_ = True
            elif item == "diph":
                diphthong = ()
            elif item.startswith("place="):
                place = item.split("=", 1)[1]
            elif item.startswith("diph="):
                parts = item.split("=", 1)[1].split("+")
                if len(parts) != 2 or not all(parts):
                    raise ParseError(f"malformed diphthong annotation {item!r}", line=lineno)
                diphthong = tuple(parts)
            else:
                raise ParseError(f"unknown feature field {item!r}", line=lineno)
        if symbol in seen:
            raise DuplicatePhone(f"duplicate phone symbol {symbol!r}", line=lineno)
        seen.add(symbol)
        if voiced is None:
            voiced = manner in _SONORANT_MANNERS
        try:
            phone = Phone(symbol, manner, place, voiced, long_, diphthong)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        phones.append(phone)
    return PhoneInventory(phones, name=name)


def _r1_stage(inv: PhoneInventory) -> dict[str, tuple[str, ...]]:
    stage = {}
    for phone in inv:
        if (
            phone.voiced
            and phone.manner in ("fricative", "affricate")
            and phone.place in ("alveolar", "postalveolar")
        ):
            counterparts = [
                q.symbol
                for q in inv
                if q.manner == phone.manner and q.place == phone.place and not q.voiced
            ]
            if not counterparts:
                raise MissingCounterpart(
                    f"no voiceless counterpart for {phone.symbol!r} in {inv.name!r}"
                )
            stage[phone.symbol] = (counterparts[0],)
    return stage


def _r2_stage(inv: PhoneInventory) -> tuple[dict[str, tuple[str, ...]], list[Phone]]:
    stage = {}
    introduced = []
    known = set(inv.symbols)
    for phone in inv:
        if phone.diphthong is None:
            continue
        if len(phone.diphthong) != 2:
            raise MissingDiphthongComponents(
                f"diphthong {phone.symbol!r} lacks component annotations"
            )
        stage[phone.symbol] = phone.diphthong
        for comp in phone.diphthong:
            if comp not in known:
                # Components absent from the inventory become new short/long
                # vowels; the ':' suffix is the SAMPA length convention.
                introduced.append(Phone(comp, "vowel", long=comp.endswith(":")))
                known.add(comp)
    return stage, introduced


def _r3_stage(inv: PhoneInventory) -> dict[str, tuple[str, ...]]:
    stage = {}
    for phone in inv:
        if phone.manner == "vowel" and phone.long and phone.diphthong is None:
            if not phone.symbol.endswith(":"):
                raise MissingCounterpart(
                    f"long vowel {phone.symbol!r} has no derivable short counterpart"
                )
            target = phone.symbol[:-1]
            if target not in inv:
                raise MissingCounterpart(
                    f"short counterpart {target!r} of {phone.symbol!r} not in inventory"
                )
            stage[phone.symbol] = (target,)
    return stage


def _apply_stage(
    inv: PhoneInventory, stage: dict[str, tuple[str, ...]], introduced: Sequence[Phone] = ()
) -> PhoneInventory:
    by_symbol = {p.symbol: p for p in introduced}
    phones = []
    present = set()
    for phone in inv:
        if phone.symbol in stage:
            for comp in stage[phone.symbol]:
                if comp in present or (comp in inv and comp not in by_symbol):
                    continue
                if comp in by_symbol:
                    phones.append(by_symbol[comp])
                    present.add(comp)
        elif phone.symbol not in present:
            phones.append(phone)
            present.add(phone.symbol)
    return PhoneInventory(phones, name=inv.name)


def build_reduction(
    inv: PhoneInventory, rules: Iterable[str] = REDUCTION_RULES
) -> tuple[PhoneInventory, PhoneMap]:
    """Apply the requested reduction rules in the fixed order R1, R2, R3.

    Returns the reduced inventory and the composed total phone map
    (identity entries for untouched phones).
    """
    requested = set(rules)
    unknown = requested - set(REDUCTION_RULES)
    if unknown:
        raise ValueError(f"unknown reduction rules: {sorted(unknown)}")

    total = {symbol: (symbol,) for symbol in inv.symbols}
    current = inv
    for rule in REDUCTION_RULES:
        if rule not in requested:
            continue
        if rule == "R1":
            stage, introduced = _r1_stage(current), ()
        elif rule == "R2":
            stage, introduced = _r2_stage(current)
        else:
            stage, introduced = _r3_stage(current), ()
        total = {
            src: tuple(t for sym in image for t in stage.get(sym, (sym,)))
            for src, image in total.items()
        }
        current = _apply_stage(current, stage, introduced)
    return current, PhoneMap(total)


def map_pronunciation(pron: Sequence[str], phone_map: PhoneMap) -> tuple[str, ...]:
    """Concatenate the per-phone images of ``pron`` under ``phone_map``."""
    out = []
    for symbol in pron:
        if symbol not in phone_map:
            raise UnknownPhone(f"phone {symbol!r} has no mapping")
        out.extend(phone_map[symbol])
    return tuple(out)


def validate_pronunciation(pron: Sequence[str], inv: PhoneInventory) -> ValidationResult:
    """Check that ``pron`` is non-empty and fully covered by ``inv``."""
    if not pron:
        return ValidationResult(ok=False, empty=True)
    unknown = tuple(dict.fromkeys(s for s in pron if s not in inv))
    return ValidationResult(ok=not unknown, unknown_symbols=unknown)
