"""Regenerates the end-to-end fixture: five candidate corpora, a low-resource
target, a lexicon and a pipeline config.

Run: python3 tests/fixtures/make_fixture.py
The output is committed; rerunning must reproduce it byte for byte.
"""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
LINES = 300
TARGET_LINES = 100
CONCEPTS = 160
ENTITIES = 20
LANGS = ["tgt", "aa", "bb", "cc", "dd", "ee"]
SYLLABLES = ["ka", "lo", "mi", "nu", "pe", "ra", "si", "to", "ve", "zu", "ba", "de", "fo", "gi", "ha", "ju"]
NAME_SYLLABLES = ["xan", "wel", "qor", "yth", "owy", "exq", "iwo", "uxa"]


def pseudo_words(rng, count, taken, syllables=SYLLABLES):
    words = []
    while len(words) < count:
        w = "".join(rng.choice(syllables) for _ in range(rng.randint(2, 3)))
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def main():
    rng = random.Random(20240611)
    taken = set()
    lexicons = {lang: pseudo_words(rng, CONCEPTS, taken) for lang in LANGS}

    # Entity surfaces: a shared stem with per-language spelling; two are
    # multi-token in some languages.
    stems = [w.capitalize() for w in pseudo_words(rng, ENTITIES, taken, NAME_SYLLABLES)]
    entities = {}
    for e, stem in enumerate(stems):
        forms = {}
        for li, lang in enumerate(LANGS):
            form = stem if li % 2 == 0 else stem + "a"
            if e in (3, 11) and lang in ("aa", "ee"):
                form = form + " Ben"
            forms[lang] = form
        entities[f"E{e:02d}"] = forms

    verses = []
    for i in range(LINES):
        length = rng.randint(5, 12)
        slots = [("c", rng.randrange(CONCEPTS)) for _ in range(length)]
        if rng.random() < 0.5:
            slots.insert(rng.randrange(len(slots) + 1), ("e", rng.randrange(ENTITIES)))
        verses.append(slots)

    def render(slots, lang):
        out = []
        for kind, v in slots:
            if kind == "c":
                out.append(lexicons[lang][v])
            else:
                out.extend(entities[f"E{v:02d}"][lang].split())
        return out

    noise_words = pseudo_words(rng, 200, taken)
    texts = {lang: [] for lang in LANGS}
    for i, slots in enumerate(verses):
        texts["tgt"].append(render(slots, "tgt"))
        texts["aa"].append(render(slots, "aa"))
        bb = render(slots, "bb")
        texts["bb"].append([rng.choice(noise_words) if rng.random() < 0.3 else w for w in bb])
        cc = render(slots, "cc")
        rng.shuffle(cc)
        texts["cc"].append(cc)
        other = verses[rng.randrange(LINES)]
        texts["dd"].append(render([("c", rng.randrange(CONCEPTS)) for _ in other], "dd"))
        ee = render(slots, "ee")
        for j in range(len(ee) - 1):
            if rng.random() < 0.2:
                ee[j], ee[j + 1] = ee[j + 1], ee[j]
        texts["ee"].append([rng.choice(noise_words) if rng.random() < 0.1 else w for w in ee])

    ids = [f"V{i:03d}" for i in range(LINES)]
    target_ids = sorted(rng.sample(range(LINES), TARGET_LINES))
    (HERE / "candidates").mkdir(exist_ok=True)
    for lang in LANGS:
        if lang == "tgt":
            rows = [f"{ids[i]}\t{' '.join(texts[lang][i])}\n" for i in target_ids]
            path = HERE / "tgt.txt"
        else:
            rows = [f"{ids[i]}\t{' '.join(texts[lang][i])}\n" for i in range(LINES)]
            path = HERE / "candidates" / f"{lang}.txt"
        path.write_text("".join(rows), encoding="utf-8")

    with open(HERE / "lexicon.tsv", "w", encoding="utf-8") as f:
        for ent, forms in entities.items():
            for lang in LANGS:
                f.write(f"{ent}\t{lang}\t{forms[lang]}\n")

    config = {
        "target_language": "tgt",
        "target_corpus": "tgt.txt",
        "candidate_dir": "candidates",
        "lexicon": "lexicon.tsv",
        "family": "famd",
        "k": 3,
        "output_dir": "out",
        "seeds": {"split": 7},
        "alignment": {"iterations": 5, "p_null": 0.08},
    }
    (HERE / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
