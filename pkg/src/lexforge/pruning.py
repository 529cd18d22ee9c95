"""Alignment-driven variant counting, probability estimation and the
usedPVs / likelyPVs lexicon builders.

Alignment files are UTF-8 TSV, one aligned token per line::

    <utterance_id>\t<conversation_id>\t<speaker_id>\t<word>\t<phones>\t<start_s>\t<dur_s>
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ParseError, UnknownPhone
from .lexicon import Lexicon, LexiconEntry, Variant
from .phones import PhoneInventory

SCHEMES = ("sum-normalized", "max-normalized")


@dataclass(frozen=True)
class AlignmentObservation:
    utterance_id: str
    conversation_id: str
    speaker_id: str
    word: str
    pronunciation: tuple[str, ...]
    start: float
    duration: float

    def __post_init__(self):
        if not self.word or not self.pronunciation:
            raise ValueError("word and pronunciation must be non-empty")
        if self.duration <= 0:
            raise ValueError(f"duration must be positive, got {self.duration}")


@dataclass(frozen=True)
class PronStat:
    pron: tuple[str, ...]
    count: int
    probability: Optional[float] = None


@dataclass(frozen=True)
class PronProbTable:
    """Per-word variant counts, optionally with estimated probabilities."""

    words: dict[str, tuple[PronStat, ...]]
    total_tokens: int
    scheme: Optional[str] = None

    def count(self, word: str, pron: Sequence[str]) -> int:
        pron = tuple(pron)
        for stat in self.words.get(word, ()):
            if stat.pron == pron:
                return stat.count
        return 0

    def probability(self, word: str, pron: Sequence[str]) -> Optional[float]:
        pron = tuple(pron)
        for stat in self.words.get(word, ()):
            if stat.pron == pron:
                return stat.probability
        return None


@dataclass(frozen=True)
class OutOfLexiconObservation:
    observation: AlignmentObservation
    reason: str


def ingest_alignments(
    text: str, inventory: Optional[PhoneInventory] = None
) -> list[AlignmentObservation]:
    """Parse an alignment file into observations, in file order."""
    observations = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 7:
            raise ParseError(f"expected 7 tab-separated fields, got {len(parts)}", line=lineno)
        utt, conv, spk, word, phones, start_s, dur_s = parts
        pron = tuple(phones.split())
        if not pron:
            raise ParseError("missing pronunciation field", line=lineno)
        if inventory is not None:
            for symbol in pron:
                if symbol not in inventory:
                    raise UnknownPhone(f"line {lineno}: unknown phone {symbol!r}")
        try:
            start, duration = float(start_s), float(dur_s)
        except ValueError:
            raise ParseError(f"bad start/duration: {start_s!r} {dur_s!r}", line=lineno) from None
        try:
            obs = AlignmentObservation(utt, conv, spk, word.strip(), pron, start, duration)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        observations.append(obs)
    return observations


def count_variants(observations: Iterable[AlignmentObservation]) -> PronProbTable:
    """Count realized (word, pronunciation) pairs.  Probabilities stay unset."""
    counts: dict[str, dict[tuple[str, ...], int]] = {}
    total = 0
    for obs in observations:
        by_pron = counts.setdefault(obs.word, {})
        by_pron[obs.pronunciation] = by_pron.get(obs.pronunciation, 0) + 1
        total += 1
    words = {
        word: tuple(
            PronStat(pron, count)
            for pron, count in sorted(by_pron.items(), key=lambda kv: (-kv[1], kv[0]))
        )
        for word, by_pron in sorted(counts.items())
    }
    return PronProbTable(words=words, total_tokens=total)


def estimate_probs(counts: PronProbTable, scheme: str = "sum-normalized") -> PronProbTable:
    """Turn counts into per-word probabilities.

    sum-normalized: p = count / word total (probabilities sum to 1);
    max-normalized: p = count / word maximum (top variant gets 1).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    words = {}
    for word, stats in counts.words.items():
        denom = sum(s.count for s in stats) if scheme == "sum-normalized" else max(
            s.count for s in stats
        )
        words[word] = tuple(
            PronStat(s.pron, s.count, s.count / denom if denom else 0.0) for s in stats
        )
    return PronProbTable(words=words, total_tokens=counts.total_tokens, scheme=scheme)


def _prune(entry: LexiconEntry, keep) -> LexiconEntry:
    # The canonical variant survives every pruning so the lexicon keeps
    # covering the full vocabulary.
    kept = tuple(v for v in entry.variants if v.provenance == "canonical" or keep(v))
    return LexiconEntry(entry.word, kept, language_tag=entry.language_tag)


def build_used_pvs(
    all_pvs: Lexicon, counts: PronProbTable
) -> tuple[Lexicon, list[OutOfLexiconObservation]]:
    """Keep the variants actually realized in the alignments.

    Observed pronunciations absent from the allPVs lexicon are reported,
    never added.  Returns the usedPVs lexicon and that side report.
    """
    if all_pvs.flavor != "allPVs":
        raise ValueError(f"expected an allPVs lexicon, got flavor {all_pvs.flavor!r}")
    entries = {
        word: _prune(entry, lambda v, w=word: counts.count(w, v.pron) >= 1)
        for word, entry in all_pvs.entries.items()
    }
    report = []
    for word, stats in counts.words.items():
        if word not in all_pvs:
            report.extend(
                OutOfLexiconObservation(_stat_as_observation(word, s), "unknown-word")
                for s in stats
            )
            continue
        known = {v.pron for v in all_pvs[word].variants}
        report.extend(
            OutOfLexiconObservation(_stat_as_observation(word, s), "unlisted-variant")
            for s in stats
            if s.pron not in known
        )
    return Lexicon(entries, flavor="usedPVs"), report


def _stat_as_observation(word: str, stat: PronStat) -> AlignmentObservation:
    # Aggregate report row; the per-token ids are not kept by the count
    # table, so the observation stands for `count` identical tokens.
    return AlignmentObservation("-", "-", "-", word, stat.pron, 0.0, float(stat.count))


def build_likely_pvs(
    all_pvs: Lexicon, probs: PronProbTable, threshold: float = 0.65
) -> Lexicon:
    """Keep variants whose estimated probability exceeds ``threshold``.

    The canonical variant is always retained and all surviving variants
    carry equal weight (no probabilities in the output lexicon).
    """
    if all_pvs.flavor != "allPVs":
        raise ValueError(f"expected an allPVs lexicon, got flavor {all_pvs.flavor!r}")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    if probs.scheme is None:
        raise ValueError("probabilities not estimated; run estimate_probs first")

    def keep(word):
        def check(variant):
            p = probs.probability(word, variant.pron)
            return p is not None and p > threshold

        return check

    entries = {
        word: _prune(entry, keep(word)) for word, entry in all_pvs.entries.items()
    }
    return Lexicon(entries, flavor="likelyPVs")


def write_out_of_lexicon_report(report: Sequence[OutOfLexiconObservation]) -> str:
    """Alignment TSV plus a reason column, deterministically ordered."""
    lines = [
        "\t".join(
            (
                row.observation.utterance_id,
                row.observation.conversation_id,
                row.observation.speaker_id,
                row.observation.word,
                " ".join(row.observation.pronunciation),
                repr(row.observation.start),
                repr(row.observation.duration),
                row.reason,
            )
        )
        for row in sorted(
            report, key=lambda r: (r.observation.word, r.observation.pronunciation, r.reason)
        )
    ]
    return "\n".join(lines) + "\n" if lines else ""
