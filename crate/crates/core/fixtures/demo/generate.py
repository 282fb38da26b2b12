"""Regenerates the demo fixture: 20 synthetic sentences and two bundles.

tokens/    one 8-dimensional vector per token (word vector plus a small
           position term), so clouds have as many rows as the sentence
           has words
sentences/ one 16-dimensional vector per sentence (random projection of
           the mean word vector plus noise)

Run from this directory: python3 generate.py
"""
import json
import os
import random

SEED = 20240611
VOCAB = ("the a cat dog bird sat ran flew over under near quickly slowly "
         "red blue small large tree house river").split()

rng = random.Random(SEED)
word_vec = {w: [rng.gauss(0, 1) for _ in range(8)] for w in VOCAB}
proj = [[rng.gauss(0, 0.5) for _ in range(8)] for _ in range(16)]

sentences = []
for i in range(20):
    length = rng.randint(3, 9)
    sentences.append([rng.choice(VOCAB) for _ in range(length)])


def fmt(x):
    return f"{x:.6f}"


def write_bundle(name, dim, rows_for):
    os.makedirs(name, exist_ok=True)
    entries = []
    for i, words in enumerate(sentences):
        rows = rows_for(words)
        fname = f"{i}.csv"
        with open(os.path.join(name, fname), "w") as f:
            for r in rows:
                f.write(",".join(fmt(v) for v in r) + "\n")
        entries.append({"id": i, "file": fname})
    with open(os.path.join(name, "manifest.json"), "w") as f:
        json.dump({"name": name, "dim": dim, "sentences": entries}, f, indent=2)
        f.write("\n")


def token_rows(words):
    return [[v + 0.05 * pos * rng.gauss(0, 1) for v in word_vec[w]]
            for pos, w in enumerate(words)]


def sentence_rows(words):
    mean = [sum(word_vec[w][k] for w in words) / len(words) for k in range(8)]
    return [[sum(p[k] * mean[k] for k in range(8)) + rng.gauss(0, 0.05) for p in proj]]


with open("corpus.txt", "w") as f:
    for words in sentences:
        f.write(" ".join(words) + "\n")
write_bundle("tokens", 8, token_rows)
write_bundle("sentences", 16, sentence_rows)
