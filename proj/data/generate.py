#!/usr/bin/env python3
"""Regenerates the bundled desk-scale dataset.

Outputs (relative to this directory):
  ssa/yobYYYY.txt            name,sex,count files
  dblp.xml                   DBLP-shaped corpus, 1950-1953, 1960, 1970, 1980
  labels.csv                 person_key,raw_name,label,evidence
  fixtures/providers.jsonl   recorded answers of the three services
  fixtures/table3.jsonl      the eight misread women, all three services
  audit.conf                 sample configuration for `cgaudit audit`

Everything is synthetic except the handful of named people and values that
anchor the tests. Output is deterministic.
"""

import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
RNG = random.Random(20210509)

# ---------------------------------------------------------------------------
# Names. For each first name: historical p(F) by birth decade and the modern
# p(F) reported by (genderapi, namsor, genderize).

MALE = """Aaron Abraham Adam Alan Albert Alexander Alfred Allen Alonzo Andrew Anthony
Arnold Arthur Barry Benjamin Bernard Bruce Carl Charles Clarence Daniel David Dean
Dennis Donald Douglas Earl Edgar Edward Edwin Elliott Emil Eric Ernest Eugene Frank
Frederick Gary Gene George Gerald Gordon Harold Harry Harvey Henry Herbert Herman
Howard Hugh Irving Jack Jacob James Jeffrey Jerome John Joseph Kenneth Kurt Larry
Lawrence Leonard Louis Martin Maurice Melvin Michael Milton Morris Nathan Norman
Oscar Patrick Paul Peter Philip Ralph Raymond Richard Robert Roger Ronald Samuel
Saul Seymour Stanley Stephen Steven Theodore Thomas Walter Warren William Willard""".split()

FEMALE = """Alice Anna Barbara Betty Carol Doris Dorothy Edith Elaine Eleanor Elizabeth
Evelyn Frances Grace Harriet Helen Irene Janet Judith Linda Margaret Marian Mary
Nancy Patricia Phyllis Ruth Sandra Shirley Susan Virginia""".split()

# Ambiguous or drifting names: historical p(F) at birth years 1920-1950 and the
# modern provider values (several are the values quoted for real authors).
AMBIGUOUS = {
    "Leslie": (0.40, (0.91, 0.88, 0.93)),
    "Chris": (0.09, (0.33, 0.28, 0.30)),
    "Jan": (0.70, (0.38, 0.31, 0.36)),
    "Lee": (0.08, (0.49, 0.41, 0.44)),
    "Hao": (0.0, (0.12, 0.23, 0.10)),
    "Noam": (0.0, (0.05, 0.31, 0.08)),
    "Satoshi": (0.0, (0.02, 0.39, 0.04)),
    "Dominique": (0.35, (0.55, 0.49, 0.51)),
    "Carmen": (0.93, (0.98, 0.92, 0.96)),
    "Arie": (0.61, (0.64, 0.44, 0.57)),
    "Augustine": (0.29, (0.12, 0.21, 0.15)),
    "Willy": (0.18, (0.09, 0.16, 0.12)),
    "Ian": (0.08, (0.02, 0.06, 0.03)),
    "Shen": (0.0, (0.22, 0.35, 0.27)),
    "Chacko": (0.0, (0.05, 0.29, 0.10)),
    "Schiller": (0.0, (0.28, 0.12, 0.20)),
    "Marion": (0.62, (0.70, 0.66, 0.74)),
    "Jean": (0.85, (0.11, 0.12, 0.05)),
}

# Identified women misread by the services: full name -> (genderapi, namsor, genderize) p(F).
MISREAD_WOMEN = [
    ("Mandalay Grems", "Local obituary", 1960, (0.42, 0.51, 0.58)),
    ("Florence Jessie MacWilliams", "NYT obituary", 1970, (0.84, 0.86, 0.79)),
    ("Jean Estelle Rubin", "Wikipedia", 1970, (0.11, 0.12, 0.05)),
    ("Love H. Seawright", "IEEE DL", 1970, (1.0, 0.83, 0.59)),
    ("Joan Marie Francioni", "Google-info", 1980, (0.44, 0.52, 0.31)),
    ("Shigeko Seki", "Fresno State", 1980, (0.02, 0.59, 1.00)),
    ("Harriet H. Kagiwada", "NAP report", 1970, (0.96, 0.69, 0.97)),
    ("Mildred S. Joseph", "Univ Texas", 1980, (0.97, 0.64, 0.97)),
]

RARE_FEMALE = {"Mandalay": 0.97, "Love": 0.71, "Shigeko": 1.0, "Joan": 0.998,
               "Florence": 0.997, "Mildred": 0.998, "Rozsa": 1.0, "Ruth": 0.996}

SURNAMES = """Abbott Adams Aldrich Ames Archer Arden Bach Baker Barnes Barton Beck Bell
Benson Berger Bishop Blair Bloch Boyd Brandt Brooks Burke Burns Carver Chandler
Church Clark Cohen Cole Conway Cooper Craig Curry Dahl Davis Dean Decker Dixon
Doyle Duncan Dunn Eaton Ellis Emery Engel Evans Farmer Fischer Fleming Ford Foster
Fox Frank Fuller Gardner Garrett Gibbs Gilbert Glass Gordon Graham Grant Gray Green
Gross Hale Hall Hammond Hardy Harper Hayes Hecht Hill Hoffman Holt Horn Howe Hughes
Hunt Irwin Jacobs Jensen Jordan Kahn Kaplan Keller Kemp King Klein Knight Koch Kraft
Lamb Lang Larson Lewis Lowe Lynch Mann Marsh Mason Meyer Miller Moore Morgan Morse
Nash Neal Newman Nolan Norris Olsen Owen Page Palmer Parker Pearson Perry Pratt
Quinn Ramsey Reed Reiss Rhodes Rice Roberts Rose Ross Roth Russell Sachs Sanders
Schmidt Scott Shaw Shepard Silver Simon Slater Spencer Stark Stone Strauss Sutton
Swift Taylor Thorne Tucker Turner Vance Wagner Walsh Ward Weber Weiss West Wheeler
White Wolf Wood Wright Young Zimmerman""".split()


def male_modern():
    return tuple(round(RNG.uniform(0.005, 0.03), 2) or 0.01 for _ in range(3))


def male_modern_namsor(values):
    g, _, z = values
    return (g, round(RNG.uniform(0.02, 0.06), 2), z)


def female_modern():
    return tuple(round(RNG.uniform(0.95, 0.995), 2) for _ in range(3))


MODERN = {}
HISTORICAL = {}
for name in MALE:
    MODERN[name] = male_modern_namsor(male_modern())
    HISTORICAL[name] = round(RNG.uniform(0.002, 0.012), 4)
for name in FEMALE:
    MODERN[name] = female_modern()
    HISTORICAL[name] = round(RNG.uniform(0.985, 0.998), 4)
for name, (hist, modern) in AMBIGUOUS.items():
    MODERN[name] = modern
    HISTORICAL[name] = hist
for full, _, _, values in MISREAD_WOMEN:
    MODERN[full.split()[0]] = values
for name, hist in RARE_FEMALE.items():
    HISTORICAL[name] = hist
    MODERN.setdefault(name, female_modern())
MODERN["Rozsa"] = (0.97, 0.91, 0.95)
MODERN["Ruth"] = (0.98, 0.97, 0.98)

# ---------------------------------------------------------------------------
# SSA files

def write_ssa():
    out_dir = os.path.join(HERE, "ssa")
    os.makedirs(out_dir, exist_ok=True)
    for f in os.listdir(out_dir):
        if f.startswith("yob"):
            os.remove(os.path.join(out_dir, f))

    def counts(p, total):
        female = round(p * total)
        return female, total - female

    files = {}
    for year in (1920, 1921, 1922, 1923, 1930, 1940, 1950):
        rows = []
        for name, p in sorted(HISTORICAL.items()):
            if p == 0.0:
                continue  # names with no US births in these years
            total = RNG.randint(400, 9000)
            f, m = counts(p, total)
            rows.append((name, f, m))
        files[year] = rows

    # Anchors for lookups and shift detection.
    def set_counts(year, name, f, m):
        rows = [r for r in files.setdefault(year, []) if r[0] != name]
        rows.append((name, f, m))
        files[year] = rows

    set_counts(1900, "Leslie", 80, 920)       # 8% female
    set_counts(1950, "Leslie", 2600, 2400)    # 52% female
    set_counts(2000, "Leslie", 960, 40)       # 96% female
    set_counts(1900, "Mary", 16706, 0)
    set_counts(2000, "Mary", 6178, 0)
    set_counts(1900, "John", 0, 9829)
    set_counts(2000, "John", 0, 10742)
    set_counts(1900, "Anna", 9218, 0)
    set_counts(2000, "Anna", 7250, 0)
    set_counts(1965, "Jan", 800, 200)         # 80% female
    set_counts(2005, "Jan", 240, 360)         # 40% female
    set_counts(1940, "Chris", 9, 91)          # 9% female

    for year, rows in files.items():
        lines = []
        for name, f, m in sorted(rows, key=lambda r: (-(r[1] + r[2]), r[0])):
            if f:
                lines.append(f"{name},F,{f}")
        for name, f, m in sorted(rows, key=lambda r: (-(r[1] + r[2]), r[0])):
            if m:
                lines.append(f"{name},M,{m}")
        with open(os.path.join(out_dir, f"yob{year}.txt"), "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Corpus

class Person:
    def __init__(self, name, label=None, evidence="", pid=None, xml_name=None):
        self.name = name
        self.xml_name = xml_name or name
        self.label = label
        self.evidence = evidence
        self.pid = pid

    @property
    def key(self):
        if self.pid:
            return "pid:" + self.pid
        return None


PID_COUNTER = [1000]


def new_pid():
    PID_COUNTER[0] += 1
    n = PID_COUNTER[0]
    return f"{n // 100:02d}/{n:04d}"


def random_person(female, year, used):
    pool = FEMALE + list(RARE_FEMALE)[:0] if female else MALE
    for _ in range(1000):
        if not female and RNG.random() < 0.08:
            first = RNG.choice([n for n, (h, _) in AMBIGUOUS.items() if h < 0.5])
        elif female and RNG.random() < 0.1:
            first = RNG.choice(["Marion", "Carmen", "Jan", "Leslie"])
        else:
            first = RNG.choice(pool)
        middle = f" {RNG.choice('ABCDEFGHJKLMNPRSTW')}." if RNG.random() < 0.4 else ""
        name = f"{first}{middle} {RNG.choice(SURNAMES)}"
        if name not in used:
            used.add(name)
            return name
    raise RuntimeError("name pool exhausted")


def initials_person(used):
    for _ in range(1000):
        name = f"{RNG.choice('ABCDEFGHJKLMNPRSTW')}. {RNG.choice('ABCDEFGHJKLMNPRSTW')}. {RNG.choice(SURNAMES)}"
        if name not in used:
            used.add(name)
            return name
    raise RuntimeError("name pool exhausted")


EVIDENCE_M = ["Wikipedia", "MacTutor", "obituary", "faculty page", "IEEE DL", "ACM DL"]
EVIDENCE_F = ["Wikipedia", "obituary", "faculty page", "IEEE DL"]


def build_people(year, size, women, identified, fixed=()):
    """Persons of one year: `fixed` first, then random ones."""
    used = {p.name for p in fixed}
    people = list(fixed)
    fixed_women = sum(1 for p in fixed if p.label == "F")
    n_women = max(0, women - fixed_women)
    while len(people) < size:
        female = n_women > 0 and RNG.random() < (n_women / max(1, size - len(people)))
        if female:
            n_women -= 1
        if not female and RNG.random() < 0.05:
            name = initials_person(used)
        else:
            name = random_person(female, year, used)
        people.append(Person(name, "F" if female else "M", pid=new_pid()))
    # Unidentified persons keep no label; U marks a researched dead end.
    candidates = [p for p in people if p not in fixed]
    n_unknown = size - identified
    RNG.shuffle(candidates)
    for i, p in enumerate(candidates[:n_unknown]):
        if i % 7 == 0:
            p.label = "U"
            p.evidence = "not found"
        else:
            p.label = None
    for p in people:
        if p.label in ("F", "M") and not p.evidence:
            p.evidence = RNG.choice(EVIDENCE_F if p.label == "F" else EVIDENCE_M)
    return people


def assign_articles(people, n_articles, extra_mentions):
    """Every person writes at least one article; extra co-authorships fill up."""
    articles = [[] for _ in range(n_articles)]
    order = list(range(n_articles))
    RNG.shuffle(order)
    for i, person in enumerate(people):
        articles[order[i % n_articles] if i < n_articles else RNG.randrange(n_articles)].append(person)
    for _ in range(extra_mentions):
        a = RNG.randrange(n_articles)
        p = RNG.choice(people)
        if p not in articles[a]:
            articles[a].append(p)
    for a in articles:
        if not a:
            a.append(RNG.choice(people))
    return articles


TITLE_WORDS = """algebra automata axioms calculus codes complexity computation decision
deduction equations errors functions grammars graphs languages lattices logic machines
matrices networks numbers operators orders programs proofs recursion relations sequences
sets storage systems theorems types""".split()


def title():
    w = RNG.sample(TITLE_WORDS, 3)
    return f"On {w[0]} and {w[1]} of {w[2]}."


def xml_escape(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_corpus():
    years = []
    # 1950: 28 records, 26 in symbolic logic, 22 persons, two women.
    marcus = Person("Ruth Barcan Marcus", "F", "Wikipedia", pid="m/RuthBarcanMarcus")
    peter = Person("Rózsa Péter", "F", "Wikipedia", xml_name="R&oacute;zsa P&eacute;ter")
    woodger = Person("J. H. Woodger", "M", "Wikipedia")
    church = Person("Alonzo Church", "M", "Wikipedia", pid="c/AlonzoChurch")
    people1950 = build_people(1950, 22, 2, 22, fixed=[marcus, peter, woodger, church])
    for p in people1950:
        if p not in (marcus, church):
            p.pid = None  # the earliest entries carry no person ids
    years.append((1950, people1950, 28, 4, "J. Symb. Log.", 2))

    kalicki = Person("Jan Kalicki", "M", "MacTutor", pid=new_pid())
    wang = Person("Hao Wang", "M", "Wikipedia", pid=new_pid())
    years.append((1951, build_people(1951, 24, 0, 22, fixed=[kalicki, wang]), 25, 3,
                  "J. Symb. Log.", 0))
    scroggs = Person("Schiller Joe Scroggs", "M", "MacTutor", pid=new_pid())
    shen = Person("Shen Yuting", "M", "Wikipedia", pid=new_pid())
    years.append((1952, build_people(1952, 33, 0, 30, fixed=[scroggs, shen]), 40, 4,
                  "J. Symb. Log.", 0))
    marcus53 = Person(marcus.name, "F", "Wikipedia", pid=marcus.pid)
    cahn = Person("Lee Cahn", "M", "IEEE DL", pid=new_pid())
    years.append((1953, build_people(1953, 94, 1, 84, fixed=[marcus53, cahn]), 128, 12,
                  None, 0))

    t3 = {y: [] for y in (1960, 1970, 1980)}
    for full, evidence, year, _ in MISREAD_WOMEN:
        t3[year].append(Person(full, "F", evidence, pid=new_pid()))
    chomsky = Person("Noam Chomsky", "M", "Wikipedia", pid=new_pid())
    abraham = Person("Chacko Abraham", "M", "IEEE DL", pid=new_pid())
    watanabe = Person("Satoshi Watanabe", "M", "Wikipedia", pid=new_pid())
    years.append((1960, build_people(1960, 620, 17, 530, fixed=t3[1960] + [chomsky, abraham]),
                  484, 160, None, 0))
    perrin = Person("Dominique Perrin", "M", "Wikipedia", pid=new_pid())
    palermo = Person("Carmen Palermo", "M", "obituary", pid=new_pid())
    years.append((1970, build_people(1970, 3000, 93, 2508,
                                     fixed=t3[1970] + [watanabe, perrin, palermo]),
                  2039, 1200, None, 0))
    years.append((1980, build_people(1980, 9000, 367, 7416, fixed=t3[1980]), 7359, 4200,
                  None, 0))

    venues = ["Commun. ACM", "J. ACM", "IBM J. Res. Dev.", "Inf. Control.",
              "Oper. Res.", "Manag. Sci.", "IRE Trans. Electron. Comput.", "Math. Comput."]
    labels = {}
    key_counter = 0
    with open(os.path.join(HERE, "dblp.xml"), "w", encoding="utf-8", newline="\n") as out:
        out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
        out.write('<!DOCTYPE dblp SYSTEM "dblp.dtd">\n<dblp>\n')
        for year, people, n_articles, extra, venue, books in years:
            articles = assign_articles(people, n_articles, extra)
            for i, authors in enumerate(articles):
                key_counter += 1
                is_book = i >= n_articles - books
                if is_book:
                    tag = "book"
                    key = f"books/synthetic/B{key_counter}"
                else:
                    tag = "article"
                    v = venue or RNG.choice(venues)
                    key = f"journals/{v.split('.')[0].lower().replace(' ', '')}/K{key_counter}"
                out.write(f'<{tag} key="{key}" mdate="2020-01-01">\n')
                for p in authors:
                    pid = f' pid="{p.pid}"' if p.pid else ""
                    out.write(f"<author{pid}>{p.xml_name}</author>\n")
                out.write(f"<title>{xml_escape(title())}</title>\n")
                if is_book:
                    out.write("<publisher>Synthetic Press</publisher>\n")
                else:
                    out.write(f"<journal>{xml_escape(venue or RNG.choice(venues))}</journal>\n")
                out.write(f"<year>{year}</year>\n</{tag}>\n")
            for p in people:
                if p.label:
                    key = p.key or fold(p.name)
                    labels[key] = (p.name, p.label, p.evidence)
        # A homepage record, which the reader must not count as a publication.
        out.write('<www key="homepages/synthetic/1"><author>Alonzo Church</author>'
                  "<title>Home Page</title></www>\n")
        out.write("</dblp>\n")

    with open(os.path.join(HERE, "labels.csv"), "w", encoding="utf-8", newline="") as out:
        out.write("person_key,raw_name,label,evidence\r\n")
        for key in sorted(labels):
            name, label, evidence = labels[key]
            out.write(",".join(csv_field(x) for x in (key, name, label, evidence)) + "\r\n")


def csv_field(text):
    if any(c in text for c in ',"\r\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def fold(name):
    import unicodedata
    decomposed = unicodedata.normalize("NFKD", name)
    ascii_only = "".join(c for c in decomposed if not unicodedata.combining(c))
    return " ".join(ascii_only.lower().split())


# ---------------------------------------------------------------------------
# Provider payloads

def payloads(name, values, samples):
    key = fold(name)
    g, n, z = values
    gapi_gender = "female" if g >= 0.5 else "male"
    gapi_acc = round(100 * (g if g >= 0.5 else 1 - g))
    nam_gender = "female" if n >= 0.5 else "male"
    nam_prob = round(n if n >= 0.5 else 1 - n, 4)
    gen_gender = "female" if z >= 0.5 else "male"
    gen_prob = round(z if z >= 0.5 else 1 - z, 4)
    return [
        ("genderapi", {"name": key, "name_sanitized": key.capitalize(), "country": None,
                       "gender": gapi_gender, "samples": samples, "accuracy": gapi_acc,
                       "duration": "12ms", "credits_used": 1}),
        ("namsor", {"id": f"synthetic-{key}", "firstName": name, "lastName": "",
                    "likelyGender": nam_gender,
                    "genderScale": round(2 * n - 1, 4),
                    "score": 10.0, "probabilityCalibrated": nam_prob}),
        ("genderize", {"count": samples, "name": key, "gender": gen_gender,
                       "probability": gen_prob}),
    ]


def write_fixtures():
    fetched = "2021-05-09T12:00:00Z"
    with open(os.path.join(HERE, "fixtures", "providers.jsonl"), "w", encoding="utf-8",
              newline="\n") as out:
        for name in sorted(MODERN):
            for provider, payload in payloads(name, MODERN[name], RNG.randint(50, 90000)):
                out.write(json.dumps({"provider": provider, "name": fold(name),
                                      "payload": json.dumps(payload, sort_keys=True),
                                      "fetched_at": fetched}, ensure_ascii=False) + "\n")
    with open(os.path.join(HERE, "fixtures", "table3.jsonl"), "w", encoding="utf-8",
              newline="\n") as out:
        for full, _, _, values in MISREAD_WOMEN:
            first = full.split()[0]
            for provider, payload in payloads(first, values, RNG.randint(50, 9000)):
                out.write(json.dumps({"provider": provider, "name": fold(first),
                                      "payload": json.dumps(payload, sort_keys=True),
                                      "fetched_at": fetched}, ensure_ascii=False) + "\n")


def write_config():
    with open(os.path.join(HERE, "audit.conf"), "w", newline="\n") as out:
        out.write("# Paths are relative to the repository root.\n")
        out.write('ssa-dir = "data/ssa"\n')
        out.write('corpus = "data/dblp.xml"\n')
        out.write('labels = "data/labels.csv"\n')
        out.write('replay = "data/fixtures/providers.jsonl"\n')
        out.write('years = "1950-1980"\n')
        out.write("offset = 30\n")
        out.write("window = 5\n")
        out.write("seed = 1\n")
        out.write('provider = "all"\n')


if __name__ == "__main__":
    write_ssa()
    write_corpus()
    write_fixtures()
    write_config()
