#!/usr/bin/env python3
"""Generates the bundled synthetic corpus files under data/.

Sentence spec: (tokens, spans, relations) where spans are
(start, end_inclusive, TYPE) and relations are (dep_last_token,
head_last_token, LABEL).
"""
import os

SENTENCES = [
    # (tokens, spans, relations)
    ("Anna Smith lives in Paris .",
     [(0, 1, "PER"), (4, 4, "LOC")], [(1, 4, "LivesIn")]),
    ("Bob Jones works for Acme Corp .",
     [(0, 1, "PER"), (4, 5, "ORG")], [(1, 5, "WorksFor")]),
    ("Acme Corp is based in Berlin .",
     [(0, 1, "ORG"), (5, 5, "LOC")], [(1, 5, "LocatedIn")]),
    ("Carla Diaz lives in Rome and works for Rialto Labs .",
     [(0, 1, "PER"), (4, 4, "LOC"), (8, 9, "ORG")],
     [(1, 4, "LivesIn"), (1, 9, "WorksFor")]),
    ("David Kim works for Nordwind .",
     [(0, 1, "PER"), (4, 4, "ORG")], [(1, 4, "WorksFor")]),
    ("Nordwind is based in Oslo .",
     [(0, 0, "ORG"), (4, 4, "LOC")], [(0, 4, "LocatedIn")]),
    ("Eva Brown lives in Madrid .",
     [(0, 1, "PER"), (4, 4, "LOC")], [(1, 4, "LivesIn")]),
    ("Frank Moore works for Acme Corp and lives in Berlin .",
     [(0, 1, "PER"), (4, 5, "ORG"), (9, 9, "LOC")],
     [(1, 5, "WorksFor"), (1, 9, "LivesIn")]),
    ("Rialto Labs is based in Rome .",
     [(0, 1, "ORG"), (5, 5, "LOC")], [(1, 5, "LocatedIn")]),
    ("Grace Lee lives in Oslo .",
     [(0, 1, "PER"), (4, 4, "LOC")], [(1, 4, "LivesIn")]),
    ("Henry Ford works for Zephyr Group .",
     [(0, 1, "PER"), (4, 5, "ORG")], [(1, 5, "WorksFor")]),
    ("Zephyr Group is based in Madrid .",
     [(0, 1, "ORG"), (5, 5, "LOC")], [(1, 5, "LocatedIn")]),
    ("Irene Costa lives in Lisbon .",
     [(0, 1, "PER"), (4, 4, "LOC")], [(1, 4, "LivesIn")]),
    ("Jack White works for Nordwind and lives in Oslo .",
     [(0, 1, "PER"), (4, 4, "ORG"), (8, 8, "LOC")],
     [(1, 4, "WorksFor"), (1, 8, "LivesIn")]),
    ("Acme Corp hired Anna Smith .",
     [(0, 1, "ORG"), (3, 4, "PER")], [(4, 1, "WorksFor")]),
    ("Karl Novak lives in Berlin .",
     [(0, 1, "PER"), (4, 4, "LOC")], [(1, 4, "LivesIn")]),
    ("Lena Park works for Rialto Labs .",
     [(0, 1, "PER"), (4, 5, "ORG")], [(1, 5, "WorksFor")]),
    ("Miguel Sosa lives in Madrid and works for Zephyr Group .",
     [(0, 1, "PER"), (4, 4, "LOC"), (8, 9, "ORG")],
     [(1, 4, "LivesIn"), (1, 9, "WorksFor")]),
    ("Zephyr Group opened offices in Lisbon .",
     [(0, 1, "ORG"), (5, 5, "LOC")], [(1, 5, "LocatedIn")]),
    ("Nina Wolf works for Acme Corp and lives in Paris .",
     [(0, 1, "PER"), (4, 5, "ORG"), (9, 9, "LOC")],
     [(1, 5, "WorksFor"), (1, 9, "LivesIn")]),
]

DEV_SENTENCES = [
    ("Anna Smith works for Nordwind .",
     [(0, 1, "PER"), (4, 4, "ORG")], [(1, 4, "WorksFor")]),
    ("Bob Jones lives in Rome .",
     [(0, 1, "PER"), (4, 4, "LOC")], [(1, 4, "LivesIn")]),
    ("Acme Corp is based in Madrid .",
     [(0, 1, "ORG"), (5, 5, "LOC")], [(1, 5, "LocatedIn")]),
    ("Grace Lee works for Zephyr Group and lives in Berlin .",
     [(0, 1, "PER"), (4, 5, "ORG"), (9, 9, "LOC")],
     [(1, 5, "WorksFor"), (1, 9, "LivesIn")]),
    ("Rialto Labs is based in Oslo .",
     [(0, 1, "ORG"), (5, 5, "LOC")], [(1, 5, "LocatedIn")]),
]


def render(sentences):
    blocks = []
    for text, spans, relations in sentences:
        tokens = text.split()
        n = len(tokens)
        tags = ["O"] * n
        finals = set()
        for start, end, typ in spans:
            assert 0 <= start <= end < n, (text, start, end)
            tags[start] = "B-" + typ
            for i in range(start + 1, end + 1):
                tags[i] = "I-" + typ
            finals.add(end)
        arcs = {i: [] for i in range(n)}
        for dep, head, label in relations:
            assert dep in finals and head in finals, (text, dep, head)
            arcs[dep].append((head, label))
        lines = []
        for i, tok in enumerate(tokens):
            alist = arcs[i] or [(i, "N")]
            heads = ",".join(str(h) for h, _ in alist)
            labels = ",".join(l for _, l in alist)
            lines.append(f"{i}\t{tok}\t{tags[i]}\t{heads}\t{labels}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def main():
    root = os.path.join(os.path.dirname(__file__), "..", "data")
    os.makedirs(root, exist_ok=True)
    with open(os.path.join(root, "fixture_train.txt"), "w") as f:
        f.write(render(SENTENCES))
    with open(os.path.join(root, "fixture_dev.txt"), "w") as f:
        f.write(render(DEV_SENTENCES))
    print(f"wrote {len(SENTENCES)} train and {len(DEV_SENTENCES)} dev sentences")


if __name__ == "__main__":
    main()
