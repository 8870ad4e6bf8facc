"""Regenerates the retrieval fixture collection (corpus.trec, topics.txt, qrels.txt).

Relevant documents use inflected forms of the topic vocabulary, distractors
repeat the literal query words in long documents, and queries contain
stopwords, so stemming, stopping, length normalization and term-frequency
saturation all change the ranking.
"""

import random

TOPICS = [
    ("bear attack", [["bear", "bears"], ["attack", "attacks", "attacked", "attacking"], ["hiker", "hikers"],
                     ["ranger", "rangers"], ["injure", "injured", "injuries"], ["trail", "trails"]]),
    ("stock crash", [["stock", "stocks"], ["crash", "crashed", "crashes", "crashing"], ["investor", "investors"],
                     ["trade", "trading", "traded"], ["panic", "panicked"], ["loss", "losses"]]),
    ("tobacco export", [["tobacco"], ["export", "exports", "exported", "exporting"], ["cigarette", "cigarettes"],
                        ["overseas"], ["smoke", "smoking", "smoked"], ["tariff", "tariffs"]]),
    ("crime syndicate", [["crime", "crimes"], ["syndicate", "syndicates"], ["extort", "extortion", "extorted"],
                         ["racket", "rackets"], ["launder", "laundering", "laundered"], ["boss", "bosses"]]),
    ("cult commune", [["cult", "cults"], ["commune", "communes"], ["member", "members"],
                      ["ritual", "rituals"], ["isolate", "isolated", "isolation"], ["leader", "leaders"]]),
    ("flood rescue", [["flood", "floods", "flooded", "flooding"], ["rescue", "rescued", "rescuing"],
                      ["river", "rivers"], ["evacuate", "evacuated", "evacuation"], ["boat", "boats"], ["levee", "levees"]]),
    ("vaccine trial", [["vaccine", "vaccines"], ["trial", "trials"], ["dose", "doses", "dosing"],
                       ["volunteer", "volunteers"], ["immune", "immunity"], ["placebo"]]),
    ("satellite launch", [["satellite", "satellites"], ["launch", "launched", "launches", "launching"],
                          ["rocket", "rockets"], ["orbit", "orbits", "orbiting"], ["payload", "payloads"], ["booster", "boosters"]]),
    ("wine harvest", [["wine", "wines"], ["harvest", "harvested", "harvesting"], ["grape", "grapes"],
                      ["vineyard", "vineyards"], ["ferment", "fermented", "fermentation"], ["cellar", "cellars"]]),
    ("bridge collapse", [["bridge", "bridges"], ["collapse", "collapsed", "collapsing"], ["girder", "girders"],
                         ["engineer", "engineers"], ["inspect", "inspection", "inspected"], ["concrete"]]),
]

STOP = ["the", "of", "and", "a", "in", "to", "was", "for", "on", "with", "as", "by", "at", "from", "that", "it"]

BACKGROUND = """
city report week people year government official meeting council plan budget school road weather
morning evening family house market price company office court police law member state county
village garden music film book paper radio station street corner window table letter phone
ticket season holiday museum library hospital doctor teacher student worker farmer driver
island mountain valley forest desert ocean beach harbor airport train truck bicycle engine
bread cheese coffee dinner kitchen recipe shirt jacket shoe color picture story voice
question answer number minute hour moment reason result change problem history future
""".split()


def words(rng, pool, n):
    return [rng.choice(pool) for _ in range(n)]


def sentence_mix(rng, content, n_background, n_stop):
    toks = content + words(rng, BACKGROUND, n_background) + words(rng, STOP, n_stop)
    rng.shuffle(toks)
    return " ".join(toks)


def main():
    rng = random.Random(20240917)
    docs = []
    qrels = []
    topics = []
    for t, (query, families) in enumerate(TOPICS):
        tid = str(401 + t)
        qfams = families[:2]
        topics.append((tid, f"the {query}" if t % 2 == 0 else query))
        # highly relevant: inflected forms of query and expansion families
        for i in range(5):
            content = []
            for fam in qfams:
                forms = fam[1:] or fam
                content += [rng.choice(forms) for _ in range(rng.randint(1, 3))]
            for fam in rng.sample(families[2:], 3):
                content += [rng.choice(fam) for _ in range(rng.randint(1, 3))]
            docs.append((f"{tid}-r{i}", sentence_mix(rng, content, rng.randint(10, 40), rng.randint(5, 15)), 2))
        # partially relevant: one query family, literal or inflected, plus expansions
        for i in range(4):
            fam = rng.choice(qfams)
            content = [rng.choice(fam)] + [rng.choice(f) for f in rng.sample(families[2:], 2)]
            docs.append((f"{tid}-p{i}", sentence_mix(rng, content, rng.randint(20, 60), rng.randint(10, 25)), 1))
        # distractors: literal query words repeated in long documents
        for i in range(6):
            fam = rng.choice(qfams)
            content = [fam[0]] * rng.randint(3, 9)
            if i % 3 == 0:
                content += [qfams[1 - qfams.index(fam)][0]]
            other = TOPICS[(t + 1 + i) % len(TOPICS)][1]
            content += [rng.choice(f) for f in rng.sample(other, 3)]
            docs.append((f"{tid}-n{i}", sentence_mix(rng, content, rng.randint(80, 200), rng.randint(40, 80)), 0))
    for i in range(50):
        docs.append((f"bg{i:02d}", sentence_mix(rng, [], rng.randint(20, 120), rng.randint(10, 40)), None))

    rng.shuffle(docs)
    with open("corpus.trec", "w") as f:
        for n, (_, text, _) in enumerate(docs):
            f.write(f"<DOC>\n<DOCNO> FX{n + 1:03d} </DOCNO>\n<TEXT>\n{text}\n</TEXT>\n</DOC>\n")
    with open("topics.txt", "w") as f:
        for tid, title in topics:
            f.write(f"<top>\n<num> Number: {tid}\n<title> {title}\n</top>\n\n")
    with open("qrels.txt", "w") as f:
        judged = [(key.split("-")[0], f"FX{n + 1:03d}", grade) for n, (key, _, grade) in enumerate(docs) if grade is not None]
        for topic, docno, grade in sorted(judged):
            f.write(f"{topic} 0 {docno} {grade}\n")


if __name__ == "__main__":
    main()
