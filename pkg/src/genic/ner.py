"""Dictionary-based gene name recognition and synonym canonicalization.

Matching is longest-match, left-to-right over token sequences. Variant
generation is limited to the lexicon's case policy plus hyphen/space
alternation; anything fancier belongs in the lexicon file itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .corpus import Sentence, tokenize


class CasePolicy(str, Enum):
    EXACT = "exact"
    FOLD_FIRST_CHAR = "fold_first_char"
    FOLD_ALL = "fold_all"


class SynonymCycleError(ValueError):
    """Raised when synonym pairs form a cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("cyclic synonym pairs: " + " -> ".join(cycle))


@dataclass(frozen=True)
class GeneMention:
    sentence_ref: tuple[str, int]  # (doc_id, sentence index)
    token_range: tuple[int, int]  # inclusive token indices
    surface: str
    canonical: str


def _fold_token(tok: str, policy: CasePolicy) -> str:
    if policy == CasePolicy.FOLD_ALL:
        return tok.lower()
    if policy == CasePolicy.FOLD_FIRST_CHAR and tok:
        return tok[0].lower() + tok[1:]
    return tok


def _variant_keys(variant: str, policy: CasePolicy) -> set[tuple[str, ...]]:
    """Token-tuple keys for a surface variant, with hyphen/space alternation."""
    forms = {variant}
    if "-" in variant:
        forms.add(variant.replace("-", " "))
    if " " in variant:
        forms.add(variant.replace(" ", "-"))
    keys = set()
    for form in forms:
        toks = tuple(_fold_token(t.text, policy) for t in tokenize(form))
        if toks:
            keys.add(toks)
    return keys


class GeneLexicon:
    """Canonical gene names with surface variants."""

    def __init__(self, entries: dict[str, set[str]] | None = None,
                 case_policy: CasePolicy = CasePolicy.FOLD_FIRST_CHAR):
        self.case_policy = case_policy
        self.entries: dict[str, set[str]] = {}
        self._index: dict[tuple[str, ...], str] = {}
        self._max_len = 0
        if entries:
            for canonical, variants in entries.items():
                self.add(canonical, variants)

    def add(self, canonical: str, variants: set[str] | None = None) -> None:
        variants = set(variants or ())
        variants.add(canonical)
        self.entries.setdefault(canonical, set()).update(variants)
        for v in variants:
            for key in _variant_keys(v, self.case_policy):
                owner = self._index.get(key)
                if owner is not None and owner != canonical:
                    raise ValueError(f"variant {v!r} maps to both {owner!r} and {canonical!r}")
                self._index[key] = canonical
                self._max_len = max(self._max_len, len(key))

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, tokens: tuple[str, ...]) -> str | None:
        key = tuple(_fold_token(t, self.case_policy) for t in tokens)
        return self._index.get(key)

    @property
    def max_variant_tokens(self) -> int:
        return self._max_len

    @classmethod
    def from_file(cls, path: str | Path, case_policy: CasePolicy = CasePolicy.FOLD_FIRST_CHAR) -> "GeneLexicon":
        """Load `canonical<TAB>variant1|variant2|...` lines."""
        lex = cls(case_policy=case_policy)
        for raw in Path(path).read_text("utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            canonical = parts[0].strip()
            variants = set()
            if len(parts) > 1 and parts[1].strip():
                variants = {v.strip() for v in parts[1].split("|") if v.strip()}
            lex.add(canonical, variants)
        return lex


def find_gene_mentions(sentence: Sentence, lexicon: GeneLexicon) -> list[GeneMention]:
    """Longest-match, left-to-right, non-overlapping dictionary matching."""
    mentions = []
    toks = sentence.tokens
    i = 0
    n = len(toks)
    while i < n:
        matched = None
        for width in range(min(lexicon.max_variant_tokens, n - i), 0, -1):
            window = tuple(t.text for t in toks[i:i + width])
            canonical = lexicon.lookup(window)
            if canonical is not None:
                matched = (width, canonical)
                break
        if matched is None:
            i += 1
            continue
        width, canonical = matched
        start = toks[i].span[0]
        end = toks[i + width - 1].span[1]
        mentions.append(GeneMention(
            sentence_ref=(sentence.doc_id, sentence.index),
            token_range=(i, i + width - 1),
            surface=sentence.text[start:end],
            canonical=canonical,
        ))
        i += width
    return mentions


@dataclass
class SynonymTable:
    """alternate -> preferred mapping with per-pair provenance.

    Alias chains are resolved to their terminal preferred name at build time;
    cyclic input is rejected.
    """

    mapping: dict[str, str] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)  # keyed by alternate

    @classmethod
    def from_pairs(cls, pairs: list[tuple[str, str]] | list[tuple[str, str, str]]) -> "SynonymTable":
        """Build from (preferred, alternate[, provenance]) pairs with closure."""
        raw: dict[str, str] = {}
        prov: dict[str, str] = {}
        for pair in pairs:
            preferred, alternate = pair[0], pair[1]
            p = pair[2] if len(pair) > 2 else "manual"
            if preferred == alternate:
                raise ValueError(f"self-pair for {preferred!r}")
            if alternate in raw and raw[alternate] != preferred:
                raise ValueError(f"alternate {alternate!r} has two preferred names")
            raw[alternate] = preferred
            prov[alternate] = p

        table = cls()
        for alternate in raw:
            seen = [alternate]
            target = raw[alternate]
            while target in raw:
                if target in seen:
                    raise SynonymCycleError(seen + [target])
                seen.append(target)
                target = raw[target]
            table.mapping[alternate] = target
            table.provenance[alternate] = prov[alternate]
        return table

    def resolve(self, name: str) -> str:
        return self.mapping.get(name, name)

    def pairs(self) -> set[tuple[str, str]]:
        return {(pref, alt) for alt, pref in self.mapping.items()}

    def write(self, path: str | Path) -> None:
        lines = [f"{pref}\t{alt}\t{self.provenance.get(alt, 'manual')}"
                 for alt, pref in sorted(self.mapping.items())]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "SynonymTable":
        pairs = []
        for raw in Path(path).read_text("utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"bad synonym line: {raw!r}")
            pairs.append((parts[0], parts[1], parts[2] if len(parts) > 2 else "manual"))
        return cls.from_pairs(pairs)


def canonicalize(mention: GeneMention, table: SynonymTable) -> GeneMention:
    preferred = table.resolve(mention.canonical)
    if preferred == mention.canonical:
        return mention
    return GeneMention(sentence_ref=mention.sentence_ref, token_range=mention.token_range,
                       surface=mention.surface, canonical=preferred)
