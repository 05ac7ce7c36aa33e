import random

from hypothesis import strategies as st

from imteval.text import Sentence

VOCAB = ["the", "a", "cat", "dog", "sat", "ran", "big", "on", "mat", "now"]


def word_sentence(words, lang="en"):
    return Sentence(" ".join(words), lang)


@st.composite
def hyp_ref_pairs(draw):
    """Random (hypothesis, reference) word-sequence pairs over a small shared
    vocabulary, so overlaps and corruptions of every shape occur."""
    ref_words = draw(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=8))
    hyp_words = draw(st.lists(st.sampled_from(VOCAB), min_size=0, max_size=8))
    return word_sentence(hyp_words), word_sentence(ref_words)


def random_pair(rng: random.Random, max_len=8):
    ref = [rng.choice(VOCAB) for _ in range(rng.randint(1, max_len))]
    hyp = [rng.choice(VOCAB) for _ in range(rng.randint(0, max_len))]
    return word_sentence(hyp), word_sentence(ref)
