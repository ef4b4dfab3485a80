"""Regenerates corpus.txt. Deterministic for a fixed seed."""
import csv
import random
from pathlib import Path

HERE = Path(__file__).parent
rng = random.Random(20231)

morph = [row[0] for row in csv.reader(open(HERE / "morphtable.tsv"), delimiter="\t")]
function = ("the a he she it we they you was were is are in on at of and to with for by his her their that "
            "this but not all very so then you you the the a of").split()
content = ("house garden river morning evening window school street friend mother father little table letter "
           "city night green small old young road people during under after yesterday together").split()
subjects = ["He", "She", "They", "We", "You", "The teacher", "My friend"]
syllables = ["ka", "lo", "vi", "zu", "ren", "tor", "mex", "qui", "bra", "dax", "yo", "ter", "nix", "po", "sel", "gri"]


def pseudo():
    return "".join(rng.choice(syllables) for _ in range(rng.randint(2, 6)))


def word():
    r = rng.random()
    if r < 0.45:
        return rng.choice(function)
    if r < 0.65:
        return rng.choice(content)
    if r < 0.85:
        return rng.choice(morph)
    return pseudo()


def sentence():
    r = rng.random()
    if r < 0.2:
        return "He was investigating diligently."
    if r < 0.3:
        return f"you know, {word()} {word()} {word()}."
    if r < 0.5:
        return f"{rng.choice(subjects)} {rng.choice(['was', 'were', 'is'])} {rng.choice(morph)} in the {rng.choice(content)} {pseudo()}."
    words = [word() for _ in range(rng.randint(6, 14))]
    if rng.random() < 0.3:
        i = rng.randrange(len(words))
        words[i] = words[i] + ","
    if rng.random() < 0.1:
        words.insert(0, "``")
        words.append("''")
    words[0] = words[0][0].upper() + words[0][1:]
    return " ".join(words) + rng.choice([".", ".", ".", "!", "?"])


lines = [sentence() for _ in range(3000)]
(HERE / "corpus.txt").write_text("\n".join(lines) + "\n")
