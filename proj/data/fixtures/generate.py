#!/usr/bin/env python3
"""Regenerates the synthetic demo corpus in this directory.

500 headlines over 250 two-article events in the society category. Even
events publish from one country (Not-crossed-GB), odd events from two
(Crossed-GB). The class signal is planted three ways:

  * a weak signal word inside the headline itself (plain-mode ceiling),
  * the headline's sentiment word, drawn from a large pool so individual
    words are too rare for TF-IDF to learn, while the sentiment class
    stays 90% consistent with the label,
  * commonsense triples whose tails correlate with the label.

Run from this directory: python3 generate.py
"""

import json
import random

rng = random.Random(20)

SYLLABLES = ["ba", "do", "ke", "lu", "mi", "na", "po", "ra", "su", "ti", "vo", "zel",
             "gor", "fen", "qua", "wix"]


def pseudo_word(i, tag):
    parts = [SYLLABLES[(i * 7 + k * 3 + len(tag)) % len(SYLLABLES)] for k in range(3)]
    return tag + "".join(parts) + str(i % 10)


POSITIVE_POOL = [pseudo_word(i, "cheer") for i in range(200)]
NEGATIVE_POOL = [pseudo_word(i, "grim") for i in range(200)]

FILLER = [
    "council", "meeting", "river", "bridge", "museum", "festival", "harvest", "station",
    "library", "garden", "market", "summer", "winter", "morning", "evening", "village",
    "city", "region", "minister", "mayor", "committee", "project", "school", "theatre",
    "concert", "exhibition", "railway", "harbor", "airport", "forest", "mountain", "valley",
    "parade", "tournament", "lecture", "workshop", "survey", "census", "budget", "archive",
]

CROSSED_SIGNAL = ["transnational", "worldwide", "crossborder", "overseas", "global", "foreign"]
LOCAL_SIGNAL = ["hometown", "district", "neighborhood", "municipal", "parish", "borough"]

CROSSED_TAILS = [
    ("causes", "tension beyond borders"),
    ("react", "alarmed worldwide"),
    ("want", "to reach foreign readers"),
]
LOCAL_TAILS = [
    ("react", "pleased hometown"),
    ("want", "to celebrate locally"),
    ("causes", "pride in the district"),
]
NEUTRAL_TAILS = [
    ("need", "to issue a statement"),
    ("hasSubEvent", "press briefing"),
    ("isFilledBy", "official remarks"),
    ("intent", "to inform readers"),
]

COUNTRIES = ["Nordavia", "Sudland", "Ostreich", "Westfall"]
PUBLISHERS = [
    ("daily-nordavia.example", "Nordavia", "English", "centre-right"),
    ("nordavia-post.example", "Nordavia", "English", "left-wing"),
    ("sudland-times.example", "Sudland", "English", "conservatism"),
    ("sudland-echo.example", "Sudland", "Spanish", "neutral"),
    ("ostreich-journal.example", "Ostreich", "German", "centre-right"),
    ("ostreich-kurier.example", "Ostreich", "German", "left-wing"),
    ("westfall-gazette.example", "Westfall", "English", "neutral"),
    ("westfall-daily.example", "Westfall", "English", "conservatism"),
]


def headline(crossed):
    words = rng.sample(FILLER, rng.randint(5, 8))
    if rng.random() < 0.45:
        words.insert(rng.randrange(len(words)),
                     rng.choice(CROSSED_SIGNAL if crossed else LOCAL_SIGNAL))
    elif rng.random() < 0.25:
        words.insert(rng.randrange(len(words)),
                     rng.choice(LOCAL_SIGNAL if crossed else CROSSED_SIGNAL))
    negative_sentiment = rng.random() < 0.9 if crossed else rng.random() >= 0.9
    words.insert(rng.randrange(len(words)),
                 rng.choice(NEGATIVE_POOL if negative_sentiment else POSITIVE_POOL))
    return " ".join(words)


def main():
    articles = []
    inferences = []
    by_country = {}
    for domain, country, lang, align in PUBLISHERS:
        by_country.setdefault(country, []).append(domain)

    minute = 0
    for event in range(250):
        crossed = event % 2 == 1
        if crossed:
            home, away = rng.sample(COUNTRIES, 2)
            domains = [rng.choice(by_country[home]), rng.choice(by_country[away])]
        else:
            home = rng.choice(COUNTRIES)
            domains = [rng.choice(by_country[home]), rng.choice(by_country[home])]
        for a, domain in enumerate(domains):
            article_id = f"art{event:04d}{chr(ord('a') + a)}"
            minute += 1
            articles.append({
                "article_id": article_id,
                "event_id": f"ev{event:04d}",
                "title": headline(crossed),
                "publisher_domain": domain,
                "published_at": "2019-%02d-%02dT%02d:%02d:00Z" % (
                    1 + (minute // 1200) % 12, 1 + (minute // 40) % 28,
                    (minute // 60) % 24, minute % 60),
                "category": "society",
            })
            tails = list(NEUTRAL_TAILS)
            planted_pool = CROSSED_TAILS if crossed else LOCAL_TAILS
            if rng.random() < 0.9:
                planted = rng.choice(planted_pool)
            else:
                planted = rng.choice(LOCAL_TAILS if crossed else CROSSED_TAILS)
            triples = [planted] + rng.sample(tails, rng.randint(0, 2))
            for relation, tail in triples:
                inferences.append((article_id, relation, tail))

    with open("articles.jsonl", "w") as f:
        for article in articles:
            f.write(json.dumps(article, sort_keys=True) + "\n")

    with open("publishers.tsv", "w") as f:
        f.write("# domain\tcountry\tpublishing_language\tpolitical_alignment\n")
        for domain, country, lang, align in PUBLISHERS:
            f.write(f"{domain}\t{country}\t{lang}\t{align}\n")

    with open("countries.tsv", "w") as f:
        f.write("# country\t6 cultural\t12 economic\tlat\tlon\n")
        for i, country in enumerate(COUNTRIES):
            cultural = [str(round(10 + 20 * i + rng.uniform(0, 8), 1)) for _ in range(6)]
            economic = [str(round(15 + 18 * i + rng.uniform(0, 6), 1)) for _ in range(12)]
            lat = str(round(rng.uniform(-60, 60), 3))
            lon = str(round(rng.uniform(-150, 150), 3))
            f.write("\t".join([country] + cultural + economic + [lat, lon]) + "\n")

    with open("inferences.tsv", "w") as f:
        f.write("# article_id\trelation\ttail\n")
        for article_id, relation, tail in inferences:
            f.write(f"{article_id}\t{relation}\t{tail}\n")

    with open("lexicon.tsv", "w") as f:
        f.write("# token\tvalence\n")
        for word in POSITIVE_POOL:
            f.write(f"{word}\t{round(rng.uniform(1.5, 3.5), 1)}\n")
        for word in NEGATIVE_POOL:
            f.write(f"{word}\t{round(rng.uniform(-3.5, -1.5), 1)}\n")

    config = {
        "paths": {
            "articles": "articles.jsonl",
            "publishers": "publishers.tsv",
            "countries": "countries.tsv",
            "inferences": "inferences.tsv",
            "lexicon": "lexicon.tsv",
            "negators": "../negators.txt",
            "boosters": "../boosters.tsv",
            "stopwords": "../stopwords.txt",
            "out_dir": "out",
        },
        "barriers": ["geographical"],
        "categories": ["society"],
        "modes": ["plain", "augmented"],
        "models": ["logreg"],
        "seed": 20,
    }
    with open("config.json", "w") as f:
        json.dump(config, f, indent=2, sort_keys=True)
        f.write("\n")

    print(f"{len(articles)} articles, {len(inferences)} triples")


if __name__ == "__main__":
    main()
