"""Static pretrained word vectors: word2vec binary/text loaders and lookup.

Vectors are loaded once and never change afterwards. Out-of-vocabulary tokens
resolve to the all-zero vector, which is neutral under the convolution.
"""

import numpy as np

from .errors import ParseError


class EmbeddingTable:
    """Read-only token -> float64 vector map of a fixed dimension."""

    def __init__(self, dim: int, vectors: dict):
        if dim <= 0:
            raise ParseError(f"embedding dimension must be positive, got {dim}")
        for tok, vec in vectors.items():
            if vec.shape != (dim,):
                raise ParseError(f"vector for {tok!r} has length {vec.shape[0]}, expected {dim}")
        self.dim = dim
        self._vectors = vectors
        self.oov_vector = np.zeros(dim, dtype=np.float64)

    def __len__(self):
        return len(self._vectors)

    def __contains__(self, token):
        return token in self._vectors

    def tokens(self):
        return self._vectors.keys()

    def lookup(self, token: str) -> np.ndarray:
        """Exact match, then lowercase, then capitalized; zeros on miss."""
        for candidate in (token, token.lower(), token.capitalize()):
            vec = self._vectors.get(candidate)
            if vec is not None:
                return vec
        return self.oov_vector


def load_word2vec_binary(path, limit: int | None = None) -> EmbeddingTable:
    """Parse the canonical word2vec .bin format.

    Header is an ASCII "V D\\n" line; each record is a space-terminated token
    followed by D little-endian float32 values and an optional newline.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    newline = data.find(b"\n")
    if newline < 0:
        raise ParseError(f"{path}: missing header line (byte offset 0)")
    try:
        vocab_size, dim = (int(x) for x in data[:newline].split())
    except ValueError:
        raise ParseError(f"{path}: malformed header {data[:newline]!r} (byte offset 0)") from None
    if vocab_size <= 0 or dim <= 0:
        raise ParseError(f"{path}: non-positive header counts {vocab_size} {dim}")
    if limit is not None:
        vocab_size = min(vocab_size, limit)
    vectors = {}
    offset = newline + 1
    record_bytes = 4 * dim
    for _ in range(vocab_size):
        space = data.find(b" ", offset)
        if space < 0:
            raise ParseError(f"{path}: truncated token at byte offset {offset}")
        token = data[offset:space].decode("utf-8", errors="replace").lstrip("\n")
        start = space + 1
        end = start + record_bytes
        if end > len(data):
            raise ParseError(f"{path}: truncated record for {token!r} at byte offset {start}")
        vec = np.frombuffer(data[start:end], dtype="<f4").astype(np.float64)
        vectors[token] = vec
        offset = end
        if offset < len(data) and data[offset : offset + 1] == b"\n":
            offset += 1
    return EmbeddingTable(dim, vectors)


def load_word2vec_text(path) -> EmbeddingTable:
    """Parse "token v1 ... vD" lines; a leading "V D" header is auto-detected."""
    vectors = {}
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\n").split()
            if not fields:
                continue
            if lineno == 1 and len(fields) == 2 and all(_is_int(f) for f in fields):
                continue  # header line
            token, values = fields[0], fields[1:]
            if not values:
                raise ParseError(f"{path}: no vector values at line {lineno}")
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise ParseError(f"{path}: non-numeric value at line {lineno}") from None
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise ParseError(
                    f"{path}: inconsistent dimension at line {lineno}: "
                    f"got {vec.shape[0]}, expected {dim}"
                )
            vectors[token] = vec
    if dim is None:
        raise ParseError(f"{path}: no vectors found")
    return EmbeddingTable(dim, vectors)


def save_word2vec_text(table: EmbeddingTable, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for token in table.tokens():
            values = " ".join(repr(float(v)) for v in table.lookup(token))
            fh.write(f"{token} {values}\n")


def random_table(tokens, dim: int, seed: int) -> EmbeddingTable:
    """Seeded uniform [-0.25, 0.25] vectors, one per token.

    Each vector is derived from (seed, hash(token)), so the same token always
    gets the same vector regardless of iteration order or vocabulary makeup.
    """
    vectors = {}
    for token in tokens:
        ss = np.random.SeedSequence([seed, _fnv64(token)])
        rng = np.random.default_rng(ss)
        vectors[token] = rng.uniform(-0.25, 0.25, size=dim)
    return EmbeddingTable(dim, vectors)


def _fnv64(token: str) -> int:
    h = 0xCBF29CE484222325
    for byte in token.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def _is_int(s: str) -> bool:
    try:
        int(s)
        return True
    except ValueError:
        return False
