"""Phoneme inventory, articulatory feature vectors and weighted phonemic edit distance.

Phonemes are identified throughout the package by their stress-free ARPABET
code ("T", "SH", "AH"). Every function that takes a phoneme also accepts an
IPA symbol, an ARPABET code with a stress digit, or a :class:`Phoneme`.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import EmptyInputError, FormatError, UnknownPhonemeError

VALUE_CODES = {"+": 1, "-": -1, "0": 0}
VALUE_SYMBOLS = {v: k for k, v in VALUE_CODES.items()}
_STRESS = re.compile(r"^([A-Z]+)[012]$")

# ASCII spellings people type for IPA symbols the table stores in IPA proper.
IPA_ALIASES = {"g": "ɡ", "r": "ɹ", "ʧ": "tʃ", "ʤ": "dʒ", "ə": "ʌ", "ɚ": "ɝ", "ɜ": "ɝ"}


@dataclass(frozen=True)
class Phoneme:
    ipa: str
    arpabet: str
    klass: str
    initial_legal: bool

    @property
    def is_consonant(self):
        return self.klass == "consonant"

    def __str__(self):
        return f"/{self.ipa}/"


def strip_stress(code: str) -> str:
    """Drop a trailing 0/1/2 stress digit from an ARPABET code."""
    m = _STRESS.match(code)
    return m.group(1) if m else code


class PhonemeFeatureTable:
    """Ternary feature rows plus per-feature weights for a fixed inventory.

    Rows hold +1 (present), -1 (absent) or 0 (unspecified). Row order is
    significant: it is the iteration order used for tie-breaking.
    """

    def __init__(self, features: Sequence[str], weights: Sequence[float],
                 phonemes: Sequence[Phoneme], rows: Sequence[Sequence[int]]):
        self.features = tuple(features)
        self.weights = np.asarray(weights, dtype=float)
        if self.weights.shape != (len(self.features),):
            raise ValueError("need exactly one weight per feature")
        if (self.weights < 0).any() or not (self.weights > 0).any():
            raise ValueError("weights must be non-negative with at least one positive")
        self.phonemes = tuple(phonemes)
        self.matrix = np.asarray(rows, dtype=np.int8)
        if self.matrix.shape != (len(self.phonemes), len(self.features)):
            raise ValueError("every phoneme needs one value per feature")
        if not np.isin(self.matrix, (-1, 0, 1)).all():
            raise ValueError("feature values must be -1, 0 or +1")

        self._index = {}
        self._by_ipa = {}
        for i, p in enumerate(self.phonemes):
            if p.arpabet in self._index or p.ipa in self._by_ipa:
                raise ValueError(f"duplicate phoneme {p.ipa}/{p.arpabet}")
            self._index[p.arpabet] = i
            self._by_ipa[p.ipa] = p
        # per-feature disagreement: 0 equal, 1 for +/-, 0.5 when one side is 0
        diff = np.abs(self.matrix[:, None, :].astype(float) - self.matrix[None, :, :]) / 2.0
        self._dist = diff @ self.weights

    def __len__(self):
        return len(self.phonemes)

    def __iter__(self):
        return iter(self.phonemes)

    def __contains__(self, symbol):
        try:
            self.lookup(symbol)
        except UnknownPhonemeError:
            return False
        return True

    def lookup(self, symbol) -> Phoneme:
        """Resolve a Phoneme, ARPABET code (stress optional) or IPA symbol."""
        if isinstance(symbol, Phoneme):
            symbol = symbol.arpabet
        if not isinstance(symbol, str) or not symbol:
            raise UnknownPhonemeError(symbol)
        s = symbol.strip("/[]")
        code = strip_stress(s.upper()) if s.isascii() and s.upper() == s else None
        if code is not None and code in self._index:
            return self.phonemes[self._index[code]]
        s = IPA_ALIASES.get(s, s)
        if s in self._by_ipa:
            return self._by_ipa[s]
        raise UnknownPhonemeError(symbol)

    def index_of(self, symbol) -> int:
        return self._index[self.lookup(symbol).arpabet]

    def vector(self, symbol) -> np.ndarray:
        return self.matrix[self.index_of(symbol)].copy()

    def distance(self, a, b) -> float:
        return float(self._dist[self.index_of(a), self.index_of(b)])

    @property
    def max_distance(self) -> float:
        return float(self._dist.max())

    @property
    def indel_cost(self) -> float:
        """Insertion/deletion cost: half the largest substitution cost in the table."""
        return self.max_distance / 2.0

    def word_initial_set(self) -> list[Phoneme]:
        """Consonants legal word-initially, in table row order."""
        return [p for p in self.phonemes if p.is_consonant and p.initial_legal]

    def with_weights(self, weights) -> "PhonemeFeatureTable":
        return PhonemeFeatureTable(self.features, weights, self.phonemes, self.matrix)

    def dumps(self) -> str:
        lines = ["features\t" + ",".join(self.features),
                 "weights\t" + ",".join(repr(float(w)) for w in self.weights)]
        for p, row in zip(self.phonemes, self.matrix):
            lines.append("\t".join([p.ipa, p.arpabet, p.klass,
                                    "yes" if p.initial_legal else "no",
                                    ",".join(VALUE_SYMBOLS[int(v)] for v in row)]))
        return "\n".join(lines) + "\n"


def parse_feature_table(source: TextIO | str) -> PhonemeFeatureTable:
    """Parse the tab-separated feature table format.

    Layout: ``#`` comment lines, a ``features<TAB>f1,...,fn`` header, a
    ``weights<TAB>w1,...,wn`` line, then one row per phoneme as
    ``IPA<TAB>ARPABET<TAB>klass<TAB>yes|no<TAB>v1,...,vn`` with values in +,-,0.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    features = weights = None
    phonemes, rows = [], []
    seen_ipa, seen_arpa = set(), set()
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if cols[0] == "features":
            if len(cols) != 2 or features is not None:
                raise FormatError("malformed or repeated features header", lineno)
            features = [f.strip() for f in cols[1].split(",")]
            continue
        if cols[0] == "weights":
            if len(cols) != 2 or weights is not None:
                raise FormatError("malformed or repeated weights line", lineno)
            try:
                weights = [float(w) for w in cols[1].split(",")]
            except ValueError as exc:
                raise FormatError(f"bad weight: {exc}", lineno) from None
            if any(w < 0 or not math.isfinite(w) for w in weights) or not any(w > 0 for w in weights):
                raise FormatError("weights must be finite, non-negative, and not all zero", lineno)
            continue
        if features is None:
            raise FormatError("phoneme row before features header", lineno)
        if len(cols) != 5:
            raise FormatError(f"expected 5 tab-separated columns, got {len(cols)}", lineno)
        ipa, arpa, klass, initial, values = cols
        if klass not in ("consonant", "vowel"):
            raise FormatError(f"class must be consonant or vowel, got {klass!r}", lineno)
        if initial not in ("yes", "no"):
            raise FormatError(f"initial column must be yes or no, got {initial!r}", lineno)
        if not ipa or not arpa or not arpa.isalpha() or arpa.upper() != arpa:
            raise FormatError("IPA and upper-case ARPABET symbols required", lineno)
        vals = values.split(",")
        if len(vals) != len(features):
            raise FormatError(f"expected {len(features)} values, got {len(vals)}", lineno)
        try:
            rows.append([VALUE_CODES[v] for v in vals])
        except KeyError as exc:
            raise FormatError(f"feature value must be +, - or 0, got {exc.args[0]!r}", lineno) from None
        if ipa in seen_ipa or arpa in seen_arpa:
            raise FormatError(f"duplicate phoneme {ipa}/{arpa}", lineno)
        seen_ipa.add(ipa)
        seen_arpa.add(arpa)
        phonemes.append(Phoneme(ipa, arpa, klass, initial == "yes"))
    if features is None or weights is None:
        raise FormatError("missing features header or weights line")
    if len(weights) != len(features):
        raise FormatError(f"{len(weights)} weights for {len(features)} features")
    try:
        return PhonemeFeatureTable(features, weights, phonemes, rows)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def load_feature_table(path) -> PhonemeFeatureTable:
    with open(path, encoding="utf-8") as fh:
        return parse_feature_table(fh)


@lru_cache(maxsize=None)
def default_table() -> PhonemeFeatureTable:
    """The bundled General American table."""
    text = resources.files("tonguetwist.data").joinpath("features.tsv").read_text("utf-8")
    return parse_feature_table(text)


def _table(table):
    return default_table() if table is None else table


def feature_vector(p, table: PhonemeFeatureTable | None = None) -> dict[str, int]:
    """Feature name -> +1/-1/0 for one phoneme."""
    t = _table(table)
    return dict(zip(t.features, (int(v) for v in t.vector(p))))


def phoneme_distance(a, b, table: PhonemeFeatureTable | None = None) -> float:
    return _table(table).distance(a, b)


def sequence_ped(a: Sequence, b: Sequence, table: PhonemeFeatureTable | None = None,
                 indel_cost: float | None = None) -> float:
    """Weighted phonemic edit distance between two phoneme sequences.

    Substitutions cost the weighted feature distance; insertions and
    deletions cost ``indel_cost`` (the table's default when omitted).
    """
    t = _table(table)
    ia = [t.index_of(p) for p in a]
    ib = [t.index_of(p) for p in b]
    indel = t.indel_cost if indel_cost is None else float(indel_cost)
    dist = t._dist

    prev = [j * indel for j in range(len(ib) + 1)]
    for i, x in enumerate(ia, 1):
        cur = [i * indel]
        for j, y in enumerate(ib, 1):
            cur.append(min(prev[j - 1] + dist[x, y], prev[j] + indel, cur[j - 1] + indel))
        prev = cur
    return float(prev[-1])


def nearest_phoneme(target, candidates: Iterable, table: PhonemeFeatureTable | None = None) -> Phoneme:
    """Closest candidate to ``target``; the first one reached wins ties."""
    t = _table(table)
    best = best_d = None
    for c in candidates:
        d = t.distance(target, c)
        if best_d is None or d < best_d:
            best, best_d = c, d
    if best is None:
        raise EmptyInputError("nearest_phoneme needs at least one candidate")
    return t.lookup(best)


def arpabet_to_ipa(code: str, table: PhonemeFeatureTable | None = None) -> str:
    t = _table(table)
    if not isinstance(code, str) or not code.isascii():
        raise UnknownPhonemeError(code)
    return t.lookup(code.upper()).ipa


def ipa_to_arpabet(symbol: str, table: PhonemeFeatureTable | None = None) -> str:
    t = _table(table)
    s = IPA_ALIASES.get(symbol, symbol)
    p = t._by_ipa.get(s)
    if p is None:
        raise UnknownPhonemeError(symbol)
    return p.arpabet
