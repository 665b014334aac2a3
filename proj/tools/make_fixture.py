#!/usr/bin/env python3
"""Regenerate the synthetic fixture under data/fixture.

Everything is seeded, so running this twice produces identical files. The
lexicon is a small hand-written dictionary in the LIWC .dic layout; it is not
derived from any licensed word list.
"""

import argparse
import json
import random
import re
import struct
from pathlib import Path

CATEGORIES = [
    (1, "pronoun"), (2, "ppron"), (3, "i"), (4, "we"), (5, "you"), (6, "shehe"),
    (7, "they"), (9, "ipron"), (10, "article"), (11, "prep"), (12, "auxverb"),
    (13, "adverb"), (14, "conj"), (15, "negate"), (20, "verb"), (21, "adj"),
    (22, "compare"), (23, "interrog"), (24, "number"), (25, "quant"),
    (30, "affect"), (31, "posemo"), (32, "negemo"), (33, "anx"), (34, "anger"),
    (35, "sad"), (40, "social"), (41, "family"), (42, "friend"),
    (50, "cogproc"), (51, "insight"), (52, "cause"), (53, "discrep"),
    (54, "tentat"), (55, "certain"), (60, "percept"), (61, "see"), (62, "hear"),
    (63, "feel"), (70, "bio"), (71, "body"), (72, "health"), (73, "sleep"),
    (80, "time"), (81, "work"), (82, "home"), (90, "interj"), (91, "swear"),
    (92, "gratitude"), (93, "hedge"), (94, "request"), (95, "emosupport"),
    (96, "infosupport"),
]

# word -> categories; a trailing '*' marks a prefix entry.
ENTRIES = {
    "i": "pronoun ppron i", "me": "pronoun ppron i", "my": "pronoun ppron i",
    "myself": "pronoun ppron i", "i'm": "pronoun ppron i auxverb verb",
    "i've": "pronoun ppron i auxverb verb", "i'd": "pronoun ppron i auxverb verb",
    "we": "pronoun ppron we", "us": "pronoun ppron we", "our": "pronoun ppron we",
    "you": "pronoun ppron you social", "your": "pronoun ppron you social",
    "yourself": "pronoun ppron you social", "you're": "pronoun ppron you auxverb verb social",
    "he": "pronoun ppron shehe social", "she": "pronoun ppron shehe social",
    "her": "pronoun ppron shehe social", "him": "pronoun ppron shehe social",
    "they": "pronoun ppron they social", "them": "pronoun ppron they social",
    "their": "pronoun ppron they social",
    "it": "pronoun ipron", "it's": "pronoun ipron auxverb verb", "this": "pronoun ipron",
    "that": "pronoun ipron", "something": "pronoun ipron", "anything": "pronoun ipron",
    "everything": "pronoun ipron", "nothing": "pronoun ipron negate",
    "what": "pronoun ipron interrog", "which": "pronoun ipron interrog",
    "a": "article", "an": "article", "the": "article",
    "to": "prep", "in": "prep", "on": "prep", "at": "prep", "for": "prep",
    "with": "prep", "about": "prep", "from": "prep", "of": "prep", "into": "prep",
    "through": "prep", "after": "prep time", "before": "prep time",
    "am": "auxverb verb", "is": "auxverb verb", "are": "auxverb verb",
    "was": "auxverb verb", "were": "auxverb verb", "be": "auxverb verb",
    "been": "auxverb verb", "have": "auxverb verb", "has": "auxverb verb",
    "had": "auxverb verb", "do": "auxverb verb", "does": "auxverb verb",
    "did": "auxverb verb", "can": "auxverb verb", "could": "auxverb verb tentat",
    "would": "auxverb verb discrep", "should": "auxverb verb discrep",
    "will": "auxverb verb", "might": "auxverb verb tentat", "may": "auxverb verb tentat",
    "don't": "auxverb verb negate", "can't": "auxverb verb negate",
    "didn't": "auxverb verb negate", "isn't": "auxverb verb negate",
    "really": "adverb", "very": "adverb", "just": "adverb", "so": "adverb conj",
    "too": "adverb", "always": "adverb certain time", "never": "adverb negate time",
    "often": "adverb time", "sometimes": "adverb tentat time", "still": "adverb time",
    "also": "adverb", "gently": "adverb", "slowly": "adverb", "truly": "adverb certain",
    "and": "conj", "but": "conj", "or": "conj", "because": "conj cause cogproc",
    "if": "conj tentat", "while": "conj time", "although": "conj",
    "not": "negate", "no": "negate", "nobody": "negate social",
    "feel": "verb feel percept", "feeling": "verb feel percept affect",
    "felt": "verb feel percept", "think": "verb cogproc insight",
    "know": "verb cogproc insight", "understand": "verb cogproc insight",
    "try": "verb tentat", "trying": "verb tentat", "talk": "verb social",
    "talking": "verb social", "help": "verb social infosupport",
    "want": "verb discrep", "need": "verb discrep", "go": "verb", "get": "verb",
    "make": "verb", "take": "verb", "see": "verb see percept", "hear": "verb hear percept",
    "sleep": "verb sleep bio", "work": "verb work", "reach": "verb social",
    "call": "verb social", "find": "verb", "keep": "verb", "let": "verb",
    "good": "adj posemo affect", "bad": "adj negemo affect", "hard": "adj negemo",
    "alone": "adj sad negemo affect", "lonely": "adj sad negemo affect social",
    "tired": "adj bio", "better": "adj compare posemo affect", "worse": "adj compare negemo affect",
    "small": "adj", "new": "adj", "little": "adj quant", "important": "adj",
    "normal": "adj", "valid": "adj emosupport", "brave": "adj posemo affect emosupport",
    "strong": "adj posemo affect emosupport", "okay": "adj posemo",
    "more": "quant compare", "less": "quant compare", "all": "quant", "some": "quant",
    "many": "quant", "every": "quant", "few": "quant",
    "how": "interrog", "why": "interrog cause", "when": "interrog time", "where": "interrog",
    "one": "number", "two": "number", "three": "number", "first": "number",
    "happy": "posemo affect", "hope": "posemo affect", "love": "posemo affect social",
    "care": "posemo affect social", "glad": "posemo affect", "proud": "posemo affect emosupport",
    "sad": "sad negemo affect", "cry": "sad negemo affect", "crying": "sad negemo affect",
    "hurt": "negemo affect", "pain": "negemo affect body health",
    "anxious": "anx negemo affect", "anxiety": "anx negemo affect health",
    "worried": "anx negemo affect", "scared": "anx negemo affect",
    "panic": "anx negemo affect", "afraid": "anx negemo affect",
    "angry": "anger negemo affect", "hate": "anger negemo affect",
    "depress*": "sad negemo affect health", "stress*": "anx negemo affect",
    "friend*": "friend social", "family": "family social", "mom": "family social",
    "dad": "family social", "people": "social", "someone": "social",
    "therap*": "health infosupport", "doctor": "health infosupport",
    "counsel*": "health infosupport", "medic*": "health", "hotline": "infosupport",
    "resource*": "infosupport", "exercise": "bio health infosupport",
    "routine": "infosupport time", "journal*": "infosupport", "breath*": "bio body",
    "body": "body bio", "head": "body bio", "heart": "body bio",
    "night": "time", "today": "time", "week": "time", "day": "time", "days": "time",
    "time": "time", "year": "time", "job": "work", "school": "work", "home": "home",
    "room": "home", "bed": "home sleep",
    "cause*": "cause cogproc", "reason*": "cause cogproc", "realize*": "insight cogproc",
    "maybe": "tentat hedge", "perhaps": "tentat hedge", "probably": "tentat hedge",
    "possibly": "tentat hedge", "certainly": "certain", "definitely": "certain",
    "look": "verb see percept", "sound*": "hear percept",
    "oh": "interj", "hey": "interj", "wow": "interj", "ugh": "interj negemo",
    "damn": "swear anger", "hell": "swear", "crap": "swear",
    "thanks": "gratitude", "thank": "gratitude", "grateful": "gratitude posemo affect",
    "appreciate*": "gratitude", "please": "request", "sorry": "hedge emosupport sad",
    "hug*": "emosupport posemo", "here": "emosupport", "matter*": "emosupport",
    "deserve*": "emosupport", "support*": "emosupport social",
    "consider": "infosupport cogproc", "recommend*": "infosupport", "suggest*": "infosupport",
    "option*": "infosupport", "step*": "infosupport", "plan*": "infosupport",
}

OPENERS_POST = [
    "I don't know who else to talk to.",
    "This is my first post here.",
    "Sorry if this is long.",
    "I have been feeling like this for weeks.",
    "Throwaway account because my friends know my main.",
]
MIDDLES_POST = [
    "Every night I lie in bed and my head will not stop racing.",
    "My anxiety gets worse at school and I can't focus on anything.",
    "I feel so alone even when people are around me.",
    "My mom says I should just try harder but it's not that simple.",
    "I stopped going to the gym and now I barely sleep.",
    "Work has been hard and I cry in the car before my shift.",
    "I moved to a new city and I have no friends here yet.",
    "Sometimes the panic comes out of nowhere and my heart pounds.",
    "I keep thinking that nobody would notice if I disappeared.",
    "My therapist moved away and I haven't found a new one.",
    "I'm tired all the time and nothing feels good anymore.",
    "My dad and I argued again and I hate how it ended.",
]
CLOSERS_POST = [
    "How do you deal with this?",
    "Does anyone else feel this way?",
    "Any advice would help.",
    "I just needed to say it somewhere.",
    "What should I do?",
]

HUMAN_REPLIES = [
    "Same here. It sucks.",
    "I feel you, man. Hang in there.",
    "Have you tried talking to a doctor? It helped me a lot.",
    "You're not alone. I went through the same thing last year.",
    "Honestly just take it one day at a time.",
    "ugh that's rough. sending hugs.",
    "Try going outside for a walk, even for ten minutes.",
    "My mom was like that too. It got better when I moved out.",
    "Please reach out to a hotline if it gets bad. They really do help.",
    "I'm sorry you're going through this. Do you have a friend you can call?",
    "lol I do the same thing at night. Podcasts help me sleep.",
    "It's okay to not be okay. Thanks for posting this.",
    "Damn, that sounds hard. What helped me was a routine.",
    "DM me if you want to talk.",
    "Maybe write it down before bed? Journaling helped my anxiety.",
]

MODEL_A_PARAGRAPHS = [
    "I'm really sorry you're going through this, and thank you for sharing something so personal.",
    "What you are describing sounds exhausting, and it makes sense that you feel overwhelmed.",
    "You deserve support, and reaching out here is a brave and important first step.",
    "It might help to consider talking with a counselor or a doctor, who can suggest options that fit your situation.",
    "Small steps, such as a regular sleep routine, gentle exercise, or journaling for a few minutes each night, can make a difference over time.",
    "If you ever feel unsafe, please contact a crisis hotline or someone you trust right away.",
    "Your feelings are valid, and you matter more than you might realize right now.",
    "Remember that healing is rarely linear; some days will be harder than others, and that is normal.",
]
MODEL_B_PARAGRAPHS = [
    "That sounds really hard, and I'm glad you posted.",
    "You are not alone in feeling this way; many people experience something similar.",
    "One option is to talk with a therapist or counselor about what has been happening.",
    "Try to keep a simple routine: sleep, meals, and a short walk each day.",
    "Please reach out to a friend or a hotline if things feel too heavy.",
    "You matter, and things can get better with support.",
]


def tokens(text):
    return re.findall(r"[a-z0-9]+(?:'[a-z0-9]+)*", text.lower().replace("’", "'"))


def write_lexicon(path):
    ids = {name: cid for cid, name in CATEGORIES}
    lines = ["%"]
    lines += [f"{cid}\t{name}" for cid, name in CATEGORIES]
    lines.append("%")
    for word in sorted(ENTRIES):
        cats = [str(ids[c]) for c in ENTRIES[word].split()]
        lines.append(word + "\t" + "\t".join(cats))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_corpus(rng, n_posts):
    communities = ["depression", "Anxiety", "lonely", "mentalhealth"]
    posts, responses = [], []
    base_time = 1_600_000_000
    for k in range(n_posts):
        pid = f"p{k:03d}"
        body = " ".join(
            [rng.choice(OPENERS_POST)]
            + rng.sample(MIDDLES_POST, rng.randint(2, 4))
            + [rng.choice(CLOSERS_POST)]
        )
        if k == 7:
            body = "   "  # rejected on load, along with its replies
        title = rng.choice(["Need to vent", "Can't sleep", "Feeling stuck", "Is this normal?", "Help"])
        posts.append({"post_id": pid, "community": rng.choice(communities),
                      "created_utc": base_time + 3600 * k, "title": title, "body": body})
        for j in range(rng.randint(1, 4)):
            text = " ".join(rng.sample(HUMAN_REPLIES, rng.randint(1, 3)))
            responses.append({"response_id": f"{pid}::h{j}", "post_id": pid, "source": "human",
                              "body": text, "created_utc": base_time + 3600 * k + 60 * (j + 1)})
    return posts, responses


def model_responses(rng, posts, model, paragraphs, lo, hi, skip=()):
    out = []
    for post in posts:
        if post["post_id"] in skip:
            continue
        text = " ".join(rng.sample(paragraphs, rng.randint(lo, hi)))
        out.append({"response_id": f"{post['post_id']}::{model}", "post_id": post["post_id"],
                    "source": model, "body": text, "created_utc": post["created_utc"] + 30})
    return out


def write_jsonl(path, records):
    with path.open("w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def write_embeddings(rng, vocab, dim, text_path, bin_path):
    vectors = [(w, [round(rng.gauss(0.0, 1.0), 4) for _ in range(dim)]) for w in vocab]
    with text_path.open("w", encoding="utf-8") as f:
        f.write(f"{len(vectors)} {dim}\n")
        for w, v in vectors:
            f.write(w + " " + " ".join(repr(x) for x in v) + "\n")
    with bin_path.open("wb") as f:
        f.write(f"{len(vectors)} {dim}\n".encode())
        for w, v in vectors:
            f.write(w.encode() + b" " + struct.pack(f"<{dim}f", *v) + b"\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "fixture"))
    ap.add_argument("--posts", type=int, default=24)
    ap.add_argument("--seed", type=int, default=20240521)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    write_lexicon(out / "lexicon.dic")
    posts, human = build_corpus(rng, args.posts)
    stub_a = model_responses(rng, posts, "stub-a", MODEL_A_PARAGRAPHS, 4, 7)
    stub_b = model_responses(rng, posts, "stub-b", MODEL_B_PARAGRAPHS, 2, 4, skip={"p003"})
    write_jsonl(out / "posts.jsonl", posts)
    write_jsonl(out / "responses.jsonl", human + stub_a + stub_b)

    vocab = set()
    for r in posts + human + stub_a + stub_b:
        vocab.update(tokens(r["body"]))
    # A handful of words stay out of vocabulary on purpose.
    vocab -= {"lol", "dm", "podcasts", "throwaway"}
    write_embeddings(rng, sorted(vocab), 16, out / "embeddings.txt", out / "embeddings.bin")

    (out / "config.ini").write_text(
        "[paths]\n"
        "posts = data/fixture/posts.jsonl\n"
        "responses = data/fixture/responses.jsonl\n"
        "lexicon = data/fixture/lexicon.dic\n"
        "embeddings = data/fixture/embeddings.txt\n"
        "embeddings_format = text\n"
        "out = out\n"
        "\n[report]\n"
        "effect_size = pooled\n"
        "ks_level = post\n"
        "lexicon_categories = article, prep, auxverb, adverb, conj, negate, ppron, ipron, affect, posemo, negemo, anx, sad, cogproc, social\n",
        encoding="utf-8")


if __name__ == "__main__":
    main()
