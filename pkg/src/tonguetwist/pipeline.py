"""Dataset generation and refinement.

Generation: topic -> phoneme pair -> ranked word banks -> prompted LLM call.
Refinement stages, in their default order:

    refine      Prompt-A outputs are re-fed through a rewrite prompt
    ppl         drop twisters whose perplexity exceeds reference mean + std
    phonemic    drop twisters whose iPED (or oPED) exceeds reference mean + std
    dedup       drop twisters with token-sort-ratio > threshold vs an earlier kept one
    profanity   drop twisters containing a banked token
    topic_dedup drop later records repeating an earlier topic

Kept records are then enriched with ARPABET and IPA transcriptions (and an
optional paraphrase).
"""

from __future__ import annotations

import json
import logging
import random
import re
import statistics
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, NamedTuple, Sequence

from .errors import EmptyCandidateListError, EmptyInputError, FormatError, MissingAssetError, TwisterError
from .lexicon import Lexicon, default_lexicon, transcribe_text
from .lm.base import DEFAULT_MAX_TOKENS, DEFAULT_TEMPERATURE, perplexity
from .lm.ngram import sentence_tokens
from .metrics import iped, oped
from .phonology import PhonemeFeatureTable, default_table
from .vocab import (DEFAULT_N, EmbeddingTable, build_candidate_list, default_embeddings,
                    default_pos_lists, sample_topic, word_initial_set)

log = logging.getLogger(__name__)

PARAPHRASE_SYSTEM = (
    "In this task you will pretend that you're an author who is rewriting existing works into a "
    "non-literary form that more resembles prose. You will be presented with a tongue-twister and "
    "asked to rewrite it using synonym replacement so that there are no longer high levels of "
    "phonetic overlap and sound repetition. Example 1: INPUT = \"She sells sea shells by the "
    "seashore.\" OUTPUT = \"The girl sells conches by the ocean.\" Example 2: INPUT = \"Peter Piper "
    "picks pickled peppers\" OUTPUT = \"Peter Piper selects preserved capsicums\""
)

PROMPTS = {
    "A": ("Generate a sensible and grammatical tongue-twister using words from the following list: "
          "{payload}. The output should be a single sentence and be grammatical and coherent"),
    "B": ("Generate a tongue-twister by primarily using words from the following list: "
          "{payload}. The output should be grammatical and coherent"),
    "refine": ("Improve the following tongue-twister by editing it so that is makes more sense "
               "and is grammatical: {payload}"),
    "paraphrase": PARAPHRASE_SYSTEM + '\n\nINPUT = "{payload}", OUTPUT = ',
    "topic2twister": 'Generate a tongue-twister on the topic of "{payload}"',
    "styletransfer": "Generate a tongue-twister by rewriting the following text: {payload}",
}
LIST_VARIANTS = ("A", "B")

DEFAULT_STAGES = ("refine", "ppl", "phonemic", "dedup", "profanity", "topic_dedup")
DEFAULT_DEDUP_THRESHOLD = 60.0
PROMPT_A_SHARE = 11500 / 17500


def build_prompt(variant: str, payload) -> str:
    """Instantiate a prompt template. A/B take a word list, the rest a string."""
    if variant not in PROMPTS:
        raise ValueError(f"unknown prompt variant {variant!r}; choose from {sorted(PROMPTS)}")
    if variant in LIST_VARIANTS:
        if isinstance(payload, str) or not payload:
            raise ValueError(f"prompt {variant} needs a non-empty word list")
        payload = ", ".join(payload)
    elif not isinstance(payload, str):
        raise ValueError(f"prompt {variant} needs a text payload")
    return PROMPTS[variant].format(payload=payload)


# ---------------------------------------------------------------------------
# records

@dataclass
class TwisterRecord:
    tt_id: int
    topic: str
    source: str
    prompt_variant: str
    twister: str
    paraphrase: str | None = None
    twister_arpabet: str = ""
    twister_ipa: str = ""

    def __post_init__(self):
        if self.prompt_variant not in ("A", "B", "human"):
            raise ValueError(f"prompt_variant must be A, B or human, got {self.prompt_variant!r}")
        if not self.twister or not self.twister.strip():
            raise ValueError(f"record {self.tt_id}: empty twister")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TwisterRecord":
        names = {f.name for f in fields(cls)}
        missing = {"tt_id", "topic", "source", "prompt_variant", "twister"} - d.keys()
        if missing:
            raise ValueError(f"record missing fields: {sorted(missing)}")
        return cls(**{k: v for k, v in d.items() if k in names})


def dumps_records(records: Iterable[TwisterRecord]) -> str:
    return "".join(json.dumps(r.to_dict(), ensure_ascii=False) + "\n" for r in records)


def loads_records(text: str) -> list[TwisterRecord]:
    out, seen = [], set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = TwisterRecord.from_dict(json.loads(line))
        except (json.JSONDecodeError, ValueError, TypeError) as exc:
            raise FormatError(str(exc), lineno) from None
        if rec.tt_id in seen:
            raise FormatError(f"duplicate tt_id {rec.tt_id}", lineno)
        seen.add(rec.tt_id)
        out.append(rec)
    return out


def enrich(record: TwisterRecord, lex: Lexicon | None = None,
           table: PhonemeFeatureTable | None = None) -> TwisterRecord:
    tr = transcribe_text(record.twister, lex)
    record.twister_arpabet = tr.arpabet()
    record.twister_ipa = tr.ipa(table)
    return record


# ---------------------------------------------------------------------------
# filters

@dataclass(frozen=True)
class Removal:
    record: TwisterRecord
    reason: str
    value: float | None = None


class FilterResult(NamedTuple):
    kept: list
    removed: list


class StageError(TwisterError):
    """A stage failed part-way; ``partial`` holds what was decided so far."""

    def __init__(self, stage, partial: FilterResult, cause):
        self.stage = stage
        self.partial = partial
        super().__init__(f"stage {stage} failed: {cause}")


@dataclass(frozen=True)
class ReferenceStats:
    ppl_mean: float
    ppl_std: float
    phon_mean: float
    phon_std: float
    source_label: str = "reference"

    def __post_init__(self):
        if self.ppl_std < 0 or self.phon_std < 0:
            raise ValueError("standard deviations must be non-negative")

    @property
    def ppl_threshold(self):
        return self.ppl_mean + self.ppl_std

    @property
    def phon_threshold(self):
        return self.phon_mean + self.phon_std


_METRICS = {"iped": iped, "oped": oped}


def text_perplexity(scorer, text: str) -> float:
    return perplexity(scorer, sentence_tokens(text))


def reference_stats(texts: Sequence[str], scorer, table=None, lex=None, metric: str = "iped",
                    label: str = "reference") -> ReferenceStats:
    """Mean and population standard deviation over a reference set of twisters."""
    ppl = [text_perplexity(scorer, t) for t in texts]
    phon = []
    for t in texts:
        try:
            phon.append(_METRICS[metric](transcribe_text(t, lex), table))
        except EmptyInputError:
            continue
    if not ppl or not phon:
        raise EmptyInputError("reference set too small")
    return ReferenceStats(statistics.fmean(ppl), statistics.pstdev(ppl),
                          statistics.fmean(phon), statistics.pstdev(phon), label)


def ppl_filter(records: Sequence[TwisterRecord], scorer, stats: ReferenceStats) -> FilterResult:
    """Keep records with perplexity <= mean + std (boundary inclusive)."""
    kept, removed = [], []
    limit = stats.ppl_threshold
    for r in records:
        try:
            p = text_perplexity(scorer, r.twister)
        except Exception as exc:
            raise StageError("ppl", FilterResult(kept, removed), exc) from exc
        if p <= limit:
            kept.append(r)
        else:
            removed.append(Removal(r, f"perplexity {p:.4f} > {limit:.4f}", p))
    return FilterResult(kept, removed)


def phonemic_filter(records: Sequence[TwisterRecord], table: PhonemeFeatureTable | None,
                    stats: ReferenceStats, metric: str = "iped", lex: Lexicon | None = None) -> FilterResult:
    """Keep records whose phonemic distance score is <= mean + std."""
    fn = _METRICS[metric]
    kept, removed = [], []
    limit = stats.phon_threshold
    for r in records:
        try:
            v = fn(transcribe_text(r.twister, lex), table)
        except EmptyInputError as exc:
            removed.append(Removal(r, f"transcription: {exc}"))
            continue
        if v <= limit:
            kept.append(r)
        else:
            removed.append(Removal(r, f"{metric} {v:.4f} > {limit:.4f}", v))
    return FilterResult(kept, removed)


_NON_WORD = re.compile(r"[^\w\s]")


def _sort_tokens(s: str) -> str:
    return " ".join(sorted(_NON_WORD.sub("", s.lower()).split()))


def lcs_length(a: str, b: str) -> int:
    """Longest common subsequence length, bit-parallel over ``a``."""
    if not a or not b:
        return 0
    masks: dict[str, int] = {}
    for i, ch in enumerate(a):
        masks[ch] = masks.get(ch, 0) | (1 << i)
    full = (1 << len(a)) - 1
    v = full
    for ch in b:
        u = v & masks.get(ch, 0)
        v = ((v + u) | (v - u)) & full
    return len(a) - bin(v).count("1")


def indel_distance(a: str, b: str) -> int:
    return len(a) + len(b) - 2 * lcs_length(a, b)


def token_sort_ratio(a: str, b: str) -> float:
    """Order-insensitive similarity in [0, 100] from indel distance over sorted tokens."""
    sa, sb = _sort_tokens(a), _sort_tokens(b)
    total = len(sa) + len(sb)
    if total == 0:
        return 100.0
    return 100.0 * (1.0 - indel_distance(sa, sb) / total)


def dedup(records: Sequence[TwisterRecord], threshold: float = DEFAULT_DEDUP_THRESHOLD) -> FilterResult:
    """Greedy pass in id order: drop a record whose ratio to any earlier kept one exceeds threshold."""
    if not 0 < threshold <= 100:
        raise ValueError("threshold must be in (0, 100]")
    kept_ids, removed, kept_norm = set(), [], []
    for r in sorted(records, key=lambda r: r.tt_id):
        norm = _sort_tokens(r.twister)
        hit = None
        for other, other_norm in kept_norm:
            total = len(norm) + len(other_norm)
            ratio = 100.0 if total == 0 else 100.0 * (1 - indel_distance(norm, other_norm) / total)
            if ratio > threshold:
                hit = (other, ratio)
                break
        if hit:
            removed.append(Removal(r, f"overlap {hit[1]:.1f} with {hit[0].tt_id}", hit[1]))
        else:
            kept_ids.add(r.tt_id)
            kept_norm.append((r, norm))
    kept = [r for r in records if r.tt_id in kept_ids]
    return FilterResult(kept, removed)


_WORDS = re.compile(r"[\w']+")


def load_bank(path) -> frozenset[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return frozenset(l.strip().lower() for l in fh if l.strip() and not l.startswith("#"))
    except FileNotFoundError:
        raise MissingAssetError(f"offensive-word bank not found: {path}") from None


def default_bank() -> frozenset[str]:
    from importlib import resources
    text = resources.files("tonguetwist.data").joinpath("profanity.txt").read_text("utf-8")
    return frozenset(l.strip().lower() for l in text.splitlines() if l.strip() and not l.startswith("#"))


def profanity_filter(records: Sequence[TwisterRecord], bank: Iterable[str]) -> FilterResult:
    """Whole-token match against the bank; substrings do not count."""
    bank = frozenset(w.lower() for w in bank)
    kept, removed = [], []
    for r in records:
        hits = sorted({t.strip("'") for t in _WORDS.findall(r.twister.lower())} & bank)
        if hits:
            removed.append(Removal(r, "offensive: " + ",".join(hits)))
        else:
            kept.append(r)
    return FilterResult(kept, removed)


def normalize_topic(topic: str) -> str:
    return " ".join(topic.lower().split())


def dedup_topics(records: Sequence[TwisterRecord]) -> FilterResult:
    seen, kept, removed = {}, [], []
    for r in records:
        key = normalize_topic(r.topic)
        if key in seen:
            removed.append(Removal(r, f"duplicate topic of {seen[key]}"))
        else:
            seen[key] = r.tt_id
            kept.append(r)
    return FilterResult(kept, removed)


# ---------------------------------------------------------------------------
# generators and the end-to-end run

class StubGenerator:
    """Offline stand-in for the remote LLM.

    Generation prompts get the next canned twister (cycling); refine and
    paraphrase prompts echo their payload back unchanged.
    """

    def __init__(self, canned: Sequence[str]):
        if not canned:
            raise ValueError("stub generator needs at least one canned twister")
        self.canned = list(canned)
        self.calls: list[str] = []
        self._i = 0

    def generate(self, prompt: str, max_tokens: int = DEFAULT_MAX_TOKENS,
                 temperature: float = DEFAULT_TEMPERATURE) -> str:
        self.calls.append(prompt)
        refine_head = PROMPTS["refine"].split("{payload}")[0]
        if prompt.startswith(refine_head):
            return prompt[len(refine_head):]
        if prompt.startswith(PARAPHRASE_SYSTEM):
            m = re.search(r'INPUT = "(.*)", OUTPUT = $', prompt[len(PARAPHRASE_SYSTEM):], re.S)
            return m.group(1) if m else ""
        out = self.canned[self._i % len(self.canned)]
        self._i += 1
        return out


@dataclass
class PipelineConfig:
    n_topics: int = 10
    seed: int = 13
    n_candidates: int = DEFAULT_N
    prompt_a_share: float = PROMPT_A_SHARE
    stages: tuple[str, ...] = DEFAULT_STAGES
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD
    phonemic_metric: str = "iped"
    paraphrase: bool = False
    max_tokens: int = DEFAULT_MAX_TOKENS
    temperature: float = DEFAULT_TEMPERATURE
    source_label: str = "GPT-3.5"
    start_id: int = 1

    def __post_init__(self):
        unknown = set(self.stages) - set(DEFAULT_STAGES)
        if unknown:
            raise ValueError(f"unknown stages: {sorted(unknown)}")
        if self.phonemic_metric not in _METRICS:
            raise ValueError("phonemic_metric must be iped or oped")


@dataclass
class StageSummary:
    stage: str
    input: int
    kept: int
    removed: int
    reasons: list[dict] = field(default_factory=list)
    changed: int = 0


@dataclass
class PipelineReport:
    generated: int = 0
    skipped_topics: int = 0
    stages: list[StageSummary] = field(default_factory=list)
    enriched: int = 0
    reference: dict | None = None
    error: str | None = None

    def to_dict(self):
        return asdict(self)

    @property
    def stage_order(self) -> list[str]:
        return [s.stage for s in self.stages]


def generate_records(cfg: PipelineConfig, generator, lex: Lexicon, emb: EmbeddingTable,
                     table: PhonemeFeatureTable, pos_lists=None) -> tuple[list[TwisterRecord], int]:
    mods, nouns = default_pos_lists() if pos_lists is None else pos_lists
    wip = word_initial_set(table)
    rng = random.Random(cfg.seed)
    records, skipped = [], 0
    for i in range(cfg.n_topics):
        topic_seed = cfg.seed * 100003 + i
        topic = sample_topic(topic_seed, mods, nouns)
        try:
            cl = build_candidate_list(topic, wip, lex, emb, cfg.n_candidates, topic_seed, table)
        except EmptyCandidateListError:
            skipped += 1
            continue
        variant = "A" if rng.random() < cfg.prompt_a_share else "B"
        text = generator.generate(build_prompt(variant, cl.tokens),
                                  max_tokens=cfg.max_tokens, temperature=cfg.temperature).strip()
        if not text:
            skipped += 1
            continue
        records.append(TwisterRecord(cfg.start_id + len(records), str(topic), cfg.source_label,
                                     variant, text))
    return records, skipped


def refine(records: Sequence[TwisterRecord], generator, cfg: PipelineConfig) -> tuple[list, int]:
    out, changed = [], 0
    for r in records:
        if r.prompt_variant == "A":
            new = generator.generate(build_prompt("refine", r.twister), max_tokens=cfg.max_tokens,
                                     temperature=cfg.temperature).strip()
            if new and new != r.twister:
                r = TwisterRecord(**{**r.to_dict(), "twister": new})
                changed += 1
        out.append(r)
    return out, changed


def run_pipeline(cfg: PipelineConfig, generator, scorer, stats: ReferenceStats | None = None,
                 records: Sequence[TwisterRecord] | None = None, lex: Lexicon | None = None,
                 table: PhonemeFeatureTable | None = None, emb: EmbeddingTable | None = None,
                 bank: Iterable[str] | None = None,
                 reference_texts: Sequence[str] | None = None) -> tuple[list[TwisterRecord], PipelineReport]:
    """Generate (unless ``records`` is given), refine, filter and enrich.

    On a stage failure the exception carries the partial report as
    ``exc.report``.
    """
    lex = default_lexicon() if lex is None else lex
    table = default_table() if table is None else table
    bank = default_bank() if bank is None else frozenset(bank)
    report = PipelineReport()

    if records is None:
        emb = default_embeddings() if emb is None else emb
        records, report.skipped_topics = generate_records(cfg, generator, lex, emb, table)
    records = list(records)
    report.generated = len(records)

    if stats is None and ({"ppl", "phonemic"} & set(cfg.stages)):
        if reference_texts is None:
            from importlib import resources
            reference_texts = resources.files("tonguetwist.data").joinpath(
                "classic_twisters.txt").read_text("utf-8").splitlines()
        stats = reference_stats([t for t in reference_texts if t.strip()], scorer, table, lex,
                                cfg.phonemic_metric)
    if stats is not None:
        report.reference = asdict(stats)

    current = records
    for stage in cfg.stages:
        n_in = len(current)
        changed = 0
        try:
            if stage == "refine":
                current, changed = refine(current, generator, cfg)
                removed = []
            else:
                if stage == "ppl":
                    res = ppl_filter(current, scorer, stats)
                elif stage == "phonemic":
                    res = phonemic_filter(current, table, stats, cfg.phonemic_metric, lex)
                elif stage == "dedup":
                    res = dedup(current, cfg.dedup_threshold)
                elif stage == "profanity":
                    res = profanity_filter(current, bank)
                else:
                    res = dedup_topics(current)
                current, removed = res
        except Exception as exc:
            report.error = f"{stage}: {exc}"
            partial = exc.partial if isinstance(exc, StageError) else FilterResult([], [])
            report.stages.append(StageSummary(stage, n_in, len(partial.kept), len(partial.removed),
                                              [_reason(r) for r in partial.removed]))
            exc.report = report
            raise
        report.stages.append(StageSummary(stage, n_in, len(current), len(removed),
                                          [_reason(r) for r in removed], changed))
        log.info("stage %s: %d in, %d kept, %d removed", stage, n_in, len(current), len(removed))

    for r in current:
        if cfg.paraphrase:
            r.paraphrase = generator.generate(build_prompt("paraphrase", r.twister),
                                              max_tokens=cfg.max_tokens,
                                              temperature=cfg.temperature).strip()
        enrich(r, lex, table)
    report.enriched = len(current)
    return current, report


def _reason(removal: Removal) -> dict:
    return {"tt_id": removal.record.tt_id, "reason": removal.reason, "value": removal.value}
