#!/usr/bin/env python3
"""Build data/lexicon.txt and data/bigrams.tsv from public word-frequency lists.

Inputs:
  --words      dictionary word list, one word per line (e.g. the ENABLE list)
  --unigrams   `word<TAB>count` web unigram counts
  --bigrams    `w1 w2<TAB>count` web bigram counts
  --wordnet    optional WordNet dict directory; its single-word lemmas are
               added as lexicon candidates (proper nouns such as weekdays)

A word enters the lexicon when it is a dictionary or WordNet word, is made of
letters only, and is among the most frequent unigrams. Single letters other
than "a" and "i" are dropped.
"""
import argparse
import collections
import pathlib
import re

LETTERS = re.compile(r"^[a-z]+$")


def wordnet_lemmas(wn_dir):
    lemmas = set()
    for pos in ("noun", "verb", "adj", "adv"):
        for line in open(wn_dir / f"index.{pos}", encoding="latin-1"):
            if line.startswith(" "):
                continue
            lemma = line.split(" ", 1)[0]
            if LETTERS.match(lemma):
                lemmas.add(lemma)
    return lemmas


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--words", required=True, type=pathlib.Path)
    ap.add_argument("--unigrams", required=True, type=pathlib.Path)
    ap.add_argument("--bigrams", required=True, type=pathlib.Path)
    ap.add_argument("--wordnet", type=pathlib.Path)
    ap.add_argument("--size", type=int, default=80000)
    ap.add_argument("--out-dir", required=True, type=pathlib.Path)
    args = ap.parse_args()

    candidates = {w.strip().lower() for w in open(args.words)}
    if args.wordnet:
        candidates |= wordnet_lemmas(args.wordnet)
    candidates = {w for w in candidates if LETTERS.match(w)}
    candidates = {w for w in candidates if len(w) > 1 or w in ("a", "i")}

    ranked = []
    for line in open(args.unigrams):
        word, count = line.rstrip("\n").split("\t")
        if word in candidates:
            ranked.append((int(count), word))
    ranked.sort(key=lambda item: (-item[0], item[1]))
    lexicon = sorted(word for _, word in ranked[: args.size])
    lexset = set(lexicon)

    counts = collections.Counter()
    for line in open(args.bigrams):
        pair, count = line.rstrip("\n").split("\t")
        parts = pair.split(" ")
        if len(parts) == 2 and parts[0] in lexset and parts[1] in lexset:
            counts[(parts[0], parts[1])] += int(count)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "lexicon.txt").write_text("\n".join(lexicon) + "\n")
    with open(args.out_dir / "bigrams.tsv", "w") as out:
        for (w1, w2), count in sorted(counts.items()):
            out.write(f"{w1}\t{w2}\t{count}\n")
    print(f"lexicon: {len(lexicon)} words, bigrams: {len(counts)} pairs")


if __name__ == "__main__":
    main()
