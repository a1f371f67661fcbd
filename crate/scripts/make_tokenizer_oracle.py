#!/usr/bin/env python3
"""Writes fixtures/tokenizer_expected.json: the tokens Python's `re` engine
produces for every string of fixtures/tokenizer_corpus.json, under both
patterns, after lowercasing."""

import json
import os
import re

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
IMPROVED = re.compile(r"[a-zA-Z]+|[=\[\]]", re.ASCII)
LEGACY = re.compile(r"\b\w\w+\b")

with open(os.path.join(ROOT, "tokenizer_corpus.json")) as f:
    corpus = json.load(f)
out = [
    {"improved": IMPROVED.findall(text.lower()), "legacy": LEGACY.findall(text.lower())}
    for text in corpus
]
with open(os.path.join(ROOT, "tokenizer_expected.json"), "w") as f:
    json.dump(out, f, indent=0, ensure_ascii=False)
    f.write("\n")
print(len(out))
