"""Derives the expected FAQ pairs for a chatlog CSV by hand-applying the
question gate, snippet window, strict answer threshold and dedup rules.

usage: faq_oracle.py CHATLOG.csv [--window 6] [--threshold 0.75] [--explain]
prints the expected JSON array.
"""

import argparse
import csv
import json
import sys

from baseline_rules import collapse, label_scores, answer_score, join_tokens, tokenize


def load(path):
    dialogs = {}
    order = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            did = collapse(row["dialog_id"])
            if did not in dialogs:
                dialogs[did] = []
                order.append(did)
            sp = collapse(row["speaker"]).lower()
            dialogs[did].append(("C" if sp in ("customer", "c") else "S", collapse(row["text"])))
    return [(d, dialogs[d]) for d in order]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--window", type=int, default=6)
    ap.add_argument("--threshold", type=float, default=0.75)
    ap.add_argument("--explain", action="store_true")
    args = ap.parse_args()

    pairs = []
    for did, turns in load(args.csv):
        valid = [i for i, (sp, t) in enumerate(turns)
                 if sp == "C" and all(s >= 0.5 for s in label_scores(t))]
        for q in valid:
            best = None
            for i in range(q + 1, min(len(turns), q + args.window)):
                if i in valid:
                    break
                sp, t = turns[i]
                if sp != "S":
                    continue
                s = answer_score(turns[q][1], t)
                if args.explain:
                    print(f"{did} q{q} a{i} {s:.4f} | {turns[q][1]} | {t}", file=sys.stderr)
                if best is None or s > best[0]:
                    best = (s, i)
            if best is not None and best[0] > args.threshold:
                pairs.append({"question": turns[q][1], "answer": turns[best[1]][1], "score": best[0],
                              "dialog_id": did, "question_index": q, "answer_index": best[1]})

    pairs.sort(key=lambda p: (-p["score"], p["dialog_id"], p["question_index"]))
    seen, out = set(), []
    for p in pairs:
        key = join_tokens(tokenize(p["question"]))
        if key not in seen:
            seen.add(key)
            out.append(p)
    json.dump(out, sys.stdout, indent=2, ensure_ascii=False, sort_keys=True)
    print()


if __name__ == "__main__":
    main()
