"""Expected AUROC of the toy n-gram pipeline on tests/fixtures/ngram/.

Re-implements the interpolated add-delta bigram model independently and runs
the reference pipeline; writes tests/fixtures/ngram/manifest.json.
"""

import collections
import json
import math
import pathlib

import numpy as np

import reference_pipeline as ref

DIR = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "ngram"
ORDER = 2
DELTA = 0.1
BACKOFF = 0.4


def read(name):
    return [line.split() for line in (DIR / name).read_text().splitlines() if line.strip()]


class Bigram:
    def __init__(self, corpus):
        self.vocab = sorted({t for doc in corpus for t in doc} | {"<unk>"})
        self.index = set(self.vocab)
        self.uni = collections.Counter(t for doc in corpus for t in doc)
        self.total = sum(self.uni.values())
        self.ctx = collections.defaultdict(collections.Counter)
        for doc in corpus:
            for a, b in zip(doc, doc[1:]):
                self.ctx[a][b] += 1

    def prob(self, prev, word):
        word = word if word in self.index else "<unk>"
        prev = prev if prev in self.index else "<unk>"
        v = len(self.vocab)
        p = (self.uni[word] + DELTA) / (self.total + DELTA * v)
        if prev is not None and prev in self.ctx:
            row = self.ctx[prev]
            own = (row[word] + DELTA) / (sum(row.values()) + DELTA * v)
            p = (1 - BACKOFF) * own + BACKOFF * p
        return p

    def surprisals(self, doc):
        return np.array([-math.log(self.prob(doc[t - 1], doc[t])) for t in range(1, len(doc))])


def main():
    lm = Bigram(read("proxy.txt"))
    s = {name: [lm.surprisals(d) for d in read(name + ".txt")]
         for name in ("human_ref", "machine_ref", "human_test", "machine_test")}
    aurocs = []
    k = None
    for seed in range(5):
        auc, k = ref.detection_auroc(s["human_ref"], s["machine_ref"], s["human_test"], s["machine_test"],
                                     seed=seed)
        aurocs.append(auc)
    manifest = {
        "oracle": "tests/oracles/ngram_oracle.py",
        "order": ORDER,
        "delta": DELTA,
        "k": k,
        "mean_surprisal": {name: float(np.mean(np.concatenate(v))) for name, v in s.items()},
        "expected_auroc": ref.summary(aurocs),
    }
    (DIR / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(json.dumps(manifest, indent=2))


if __name__ == "__main__":
    main()
