"""Text preprocessing: sentence splitting, tokenization and vocabulary building.

Documents flow through as: raw text -> sentences -> lowercased tokens ->
vocabulary indices. The splitter is rule based (deterministic, no external
models) with a small guard list for common abbreviations.
"""

import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import ConfigurationError

UNK_TOKEN = "<unk>"
PAD_TOKEN = "<pad>"
UNK_INDEX = 0
PAD_INDEX = 1
URL_TOKEN = "<url>"

# Abbreviations that end with '.' but do not terminate a sentence.
_ABBREVIATIONS = frozenset(
    ["e.g.", "i.e.", "etc.", "vs.", "cf.", "dr.", "mr.", "mrs.", "ms.", "approx."]
)

_TERMINATORS = ".!?"
_URL_RE = re.compile(r"^(https?://|www\.)\S+", re.IGNORECASE)
_PUNCT = "\"'`()[]{}<>,.;:!?*~^#@&/\\|="


@dataclass(frozen=True)
class TokenizedDocument:
    sentences: tuple  # tuple of tuples of token strings, each non-empty
    raw_text: str


@dataclass(frozen=True)
class Vocabulary:
    token_to_index: dict
    index_to_token: tuple

    def __len__(self):
        return len(self.index_to_token)

    def index_of(self, token: str) -> int:
        return self.token_to_index.get(token, UNK_INDEX)

    def token_of(self, index: int) -> str:
        return self.index_to_token[index]

    def fingerprint(self) -> int:
        """Order-sensitive 64-bit FNV-1a hash of the token list."""
        h = 0xCBF29CE484222325
        for tok in self.index_to_token:
            for byte in tok.encode("utf-8") + b"\x00":
                h ^= byte
                h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
        return h


def split_sentences(text: str) -> list:
    """Split on '.', '!' or '?' followed by whitespace or end of text.

    A terminator inside a guarded abbreviation does not split. Whitespace-only
    input yields a single UNK sentence.
    """
    if not text or not text.strip():
        return [UNK_TOKEN]
    text = text.strip()
    sentences = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS and (i + 1 == n or text[i + 1].isspace()):
            candidate = text[start : i + 1]
            last_word = candidate.rsplit(None, 1)[-1].lower() if candidate.split() else ""
            if ch == "." and last_word in _ABBREVIATIONS:
                i += 1
                continue
            if candidate.strip():
                sentences.append(candidate.strip())
            start = i + 1
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    if not sentences:
        sentences = [text]
    return sentences


def tokenize(sentence: str) -> list:
    """Lowercase, split on whitespace, strip surrounding punctuation.

    URLs collapse to a single <url> token; tokens that are pure punctuation
    are dropped. An empty result falls back to a single UNK token.
    """
    tokens = []
    for piece in sentence.split():
        if piece == UNK_TOKEN:
            tokens.append(UNK_TOKEN)
            continue
        if _URL_RE.match(piece):
            tokens.append(URL_TOKEN)
            continue
        stripped = piece.strip(_PUNCT).lower()
        if stripped:
            tokens.append(stripped)
    return tokens if tokens else [UNK_TOKEN]


def tokenize_document(text: str) -> TokenizedDocument:
    sentences = tuple(tuple(tokenize(s)) for s in split_sentences(text))
    return TokenizedDocument(sentences=sentences, raw_text=text)


def build_vocab(corpus, min_count: int = 1) -> Vocabulary:
    """Vocabulary over all tokens with frequency >= min_count.

    Indices 0 and 1 are reserved for UNK and PAD. Remaining tokens are ordered
    by descending frequency, ties broken lexicographically, so the result is
    independent of document order.
    """
    if min_count < 1:
        raise ConfigurationError(f"min_count must be >= 1, got {min_count}")
    corpus = list(corpus)
    if not corpus:
        raise ConfigurationError("cannot build a vocabulary from an empty corpus")
    counts = Counter()
    for doc in corpus:
        for sent in doc.sentences:
            counts.update(sent)
    counts.pop(UNK_TOKEN, None)
    counts.pop(PAD_TOKEN, None)
    kept = sorted(
        (tok for tok, c in counts.items() if c >= min_count),
        key=lambda t: (-counts[t], t),
    )
    index_to_token = (UNK_TOKEN, PAD_TOKEN) + tuple(kept)
    token_to_index = {tok: i for i, tok in enumerate(index_to_token)}
    return Vocabulary(token_to_index=token_to_index, index_to_token=index_to_token)


def index_document(doc: TokenizedDocument, vocab: Vocabulary) -> list:
    """Map every token to its vocabulary index; unknown tokens map to UNK."""
    return [[vocab.index_of(tok) for tok in sent] for sent in doc.sentences]
