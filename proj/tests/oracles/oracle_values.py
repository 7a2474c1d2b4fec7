"""Independent reference computations for values frozen into the C++ tests.

Run: python3 tests/oracles/oracle_values.py
"""
import math
from collections import Counter, defaultdict


def ngrams(toks, n):
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def corpus_bleu(hyps, refs):
    m = [0] * 4
    c = [0] * 4
    hl = rl = 0
    for h, r in zip(hyps, refs):
        h, r = h.split(), r.split()
        hl += len(h)
        rl += len(r)
        for n in range(1, 5):
            hc, rc = ngrams(h, n), ngrams(r, n)
            m[n - 1] += sum(min(v, rc[g]) for g, v in hc.items())
            c[n - 1] += max(len(h) - n + 1, 0)
    p = [1.0 if c[i] == 0 else m[i] / c[i] for i in range(4)]
    bp = 1.0 if hl >= rl else math.exp(1 - rl / hl)
    if min(p) == 0:
        return 0.0, p, bp
    return bp * math.exp(sum(math.log(x) for x in p) / 4), p, bp


def sentence_bleu(h, r):
    h, r = h.split(), r.split()
    p = []
    for n in range(1, 5):
        hc, rc = ngrams(h, n), ngrams(r, n)
        mm = sum(min(v, rc[g]) for g, v in hc.items())
        cc = max(len(h) - n + 1, 0)
        p.append(mm / cc if n == 1 else (mm + 1) / (cc + 1))
    bp = 1.0 if len(h) >= len(r) else math.exp(1 - len(r) / len(h))
    if min(p) == 0:
        return 0.0
    return bp * math.exp(sum(math.log(x) for x in p) / 4)


def model1(bitext, iters, p_null=0.08):
    t = {}
    cooc = defaultdict(set)
    for s, f in bitext:
        for e in ["<null>"] + s.split():
            for w in f.split():
                cooc[e].add(w)
    for e, ws in cooc.items():
        for w in ws:
            t[(e, w)] = 1.0 / len(ws)
    for _ in range(iters):
        cnt = defaultdict(float)
        for s, f in bitext:
            src = s.split()
            for w in f.split():
                ws = [p_null * t[("<null>", w)]] + [(1 - p_null) / len(src) * t[(e, w)] for e in src]
                z = sum(ws)
                for e, x in zip(["<null>"] + src, ws):
                    cnt[(e, w)] += x / z
        tot = defaultdict(float)
        for (e, w), v in cnt.items():
            tot[e] += v
        t = {(e, w): cnt[(e, w)] / tot[e] for (e, w) in t}
    return t


CORPORA = [
    (["a b c d"], ["a b c d e"]),
    (["the cat sat on the mat today", "a dog ran in the park"],
     ["the cat sat on the red mat today", "the dog ran in the park"]),
    (["he went to the market to buy fresh bread", "she likes green tea"],
     ["he went to the market to buy bread", "she really likes green tea"]),
    (["one two three four five", "six seven eight nine ten eleven", "x y z"],
     ["one two three four five", "six seven eight nine ten twelve", "x y w z"]),
    (["a a a a a a", "b b b b"], ["a a a b b b", "b b c c"]),
]

if __name__ == "__main__":
    for hyps, refs in CORPORA:
        v, p, bp = corpus_bleu(hyps, refs)
        print("corpus_bleu", repr(v), [round(x, 10) for x in p], repr(bp))
    print("sentence the cat sat / down", repr(sentence_bleu("the cat sat", "the cat sat down")))
    print("similarity abcd / abcx", repr(0.5 * (sentence_bleu("a b c d", "a b c x") + sentence_bleu("a b c x", "a b c d"))))
    t = model1([("a", "a"), ("a b", "a b")], 5)
    print("t(a|a) after 5", repr(t[("a", "a")]))
    t = model1([("das haus", "the house"), ("das buch", "the book")], 2)
    print("das/the after 2", repr(t[("das", "the")]), repr(t[("das", "house")]))
