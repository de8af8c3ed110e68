"""Walk a raw developer comment through sentence splitting, tokenization,
vocabulary construction, and embedding lookup.
"""

from sentihier.classifiers import embedding_matrix_for
from sentihier.embeddings import random_table
from sentihier.textprep import build_vocab, index_document, tokenize_document

text = ("The build is broken again, e.g. the CI fails on every commit! "
        "See https://ci.example.com/job/42 for logs. Can someone take a look?")

doc = tokenize_document(text)
for i, sentence in enumerate(doc.sentences):
    print(f"sentence {i}: {sentence}")

vocab = build_vocab([doc])
print(f"\nvocabulary size (incl. <unk>/<pad>): {len(vocab)}")
print(f"vocabulary fingerprint: {vocab.fingerprint():#018x}")

indexed = index_document(doc, vocab)
print(f"indexed first sentence: {indexed[0]}")

# With no pretrained file at hand, each token gets a seeded vector that
# depends only on (seed, token) — identical no matter what else is in the
# vocabulary, which is what makes per-fold vocabularies reproducible.
table = random_table(["broken", "build"], dim=8, seed=3)
print(f"\nrandom vector for 'broken': {table.lookup('broken')[:4]} ...")

matrix = embedding_matrix_for(vocab, None, 8, embedding_seed=3)
print(f"embedding matrix shape: {matrix.shape}; UNK row is all zero: "
      f"{not matrix[0].any()}")
