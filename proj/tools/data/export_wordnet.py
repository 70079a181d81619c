#!/usr/bin/env python3
"""Export a WordNet 3.x database directory into the taxonomy TSV files.

Writes synsets.tsv (`id<TAB>pos<TAB>word1,word2,...`), edges.tsv
(`child_id<TAB>parent_id`, hypernym and instance-hypernym links) and
counts.tsv (`id<TAB>count`, SemCor sense-tag counts plus one).

Only nouns and verbs are exported since they are the parts of speech with an
is-a hierarchy. With --lexicon, inflected lexicon words (games, walking) are
attached to the synsets of their base lemma using WordNet's morphological
exception lists and suffix rules.
"""
import argparse
import collections
import pathlib
import re

LETTERS = re.compile(r"^[a-z]+$")

SUFFIX_RULES = {
    "n": [("s", ""), ("ses", "s"), ("xes", "x"), ("zes", "z"), ("ches", "ch"),
          ("shes", "sh"), ("men", "man"), ("ies", "y")],
    "v": [("s", ""), ("ies", "y"), ("es", "e"), ("es", ""), ("ed", "e"),
          ("ed", ""), ("ing", "e"), ("ing", "")],
}
FILES = {"n": "noun", "v": "verb"}


def read_synsets(wn_dir, pos):
    synsets, edges = {}, []
    for line in open(wn_dir / f"data.{FILES[pos]}", encoding="latin-1"):
        if line.startswith(" "):
            continue
        fields = line.split(" ")
        offset = fields[0]
        sid = f"{pos}{offset}"
        n_words = int(fields[3], 16)
        words = []
        for i in range(n_words):
            lemma = fields[4 + 2 * i].lower()
            lemma = re.sub(r"\(.*\)$", "", lemma)
            if LETTERS.match(lemma) and lemma not in words:
                words.append(lemma)
        at = 4 + 2 * n_words
        n_ptrs = int(fields[at])
        at += 1
        for _ in range(n_ptrs):
            symbol, target, target_pos = fields[at], fields[at + 1], fields[at + 2]
            at += 4
            if symbol in ("@", "@i") and target_pos == pos:
                edges.append((sid, f"{pos}{target}"))
        synsets[sid] = words
    return synsets, edges


def read_exceptions(wn_dir, pos):
    exc = collections.defaultdict(list)
    for line in open(wn_dir / f"{FILES[pos]}.exc", encoding="latin-1"):
        parts = line.split()
        exc[parts[0]].extend(parts[1:])
    return exc


def base_forms(word, pos, lemmas, exc):
    forms = [b for b in exc.get(word, []) if b in lemmas]
    for suffix, repl in SUFFIX_RULES[pos]:
        if word.endswith(suffix) and len(word) > len(suffix):
            base = word[: -len(suffix)] + repl
            if base in lemmas:
                forms.append(base)
    return forms


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wordnet", required=True, type=pathlib.Path)
    ap.add_argument("--lexicon", type=pathlib.Path)
    ap.add_argument("--out-dir", required=True, type=pathlib.Path)
    args = ap.parse_args()

    synsets, edges, pos_of = {}, [], {}
    for pos in ("n", "v"):
        s, e = read_synsets(args.wordnet, pos)
        synsets.update(s)
        edges.extend(e)
        for sid in s:
            pos_of[sid] = pos

    if args.lexicon:
        lexicon = [w.strip() for w in open(args.lexicon) if w.strip()]
        for pos in ("n", "v"):
            index = collections.defaultdict(list)
            for sid, words in synsets.items():
                if pos_of[sid] == pos:
                    for w in words:
                        index[w].append(sid)
            exc = read_exceptions(args.wordnet, pos)
            for word in lexicon:
                if word in index:
                    continue
                for base in base_forms(word, pos, index, exc):
                    for sid in index[base]:
                        if word not in synsets[sid]:
                            synsets[sid].append(word)

    counts = collections.Counter()
    for line in open(args.wordnet / "index.sense", encoding="latin-1"):
        key, offset, _, tag_cnt = line.split()
        ss_type = int(key.split("%")[1].split(":")[0])
        pos = {1: "n", 2: "v"}.get(ss_type)
        if pos and int(tag_cnt) > 0:
            counts[f"{pos}{offset}"] += int(tag_cnt)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.out_dir / "synsets.tsv", "w") as out:
        for sid in sorted(synsets):
            out.write(f"{sid}\t{pos_of[sid]}\t{','.join(synsets[sid])}\n")
    with open(args.out_dir / "edges.tsv", "w") as out:
        for child, parent in sorted(set(edges)):
            out.write(f"{child}\t{parent}\n")
    with open(args.out_dir / "counts.tsv", "w") as out:
        for sid in sorted(counts):
            out.write(f"{sid}\t{counts[sid] + 1}\n")
    print(f"synsets: {len(synsets)}, edges: {len(set(edges))}, counted: {len(counts)}")


if __name__ == "__main__":
    main()
