"""Character n-gram language identification.

A small rank-profile classifier in the Cavnar-Trenkle style, shipped with
built-in profiles for en/de/fr/es/it so the engine works offline. Any
object with a ``detect(text) -> (code, confidence)`` method can replace it
wherever a detector is accepted.
"""

from __future__ import annotations

import logging
import re
from collections import Counter

logger = logging.getLogger(__name__)

PROFILE_SIZE = 900
_NGRAM_SIZES = (1, 2, 3)

# Short generic passages, one per supported language. Translations of the
# same text so the profiles differ mainly in function words and morphology.
_SEED_TEXTS = {
    "en": (
        "The history of the city begins with a small settlement on the river. "
        "People lived and worked there for many years, and the town grew into an "
        "important place of trade between the north and the south. The weather in "
        "the north is cold in winter and warm in summer. Children go to school in "
        "the morning and play in the park after lunch. The government of the "
        "country announced a new plan for roads, schools, and hospitals. The "
        "quick brown fox jumps over the lazy dog while people watch from the "
        "field. Science and art are part of everyday life, and the people of the "
        "region are proud of their long history and their culture."
    ),
    "de": (
        "Die Geschichte der Stadt beginnt mit einer kleinen Siedlung am Fluss. "
        "Die Menschen lebten und arbeiteten dort viele Jahre, und der Ort wurde "
        "ein wichtiger Platz für den Handel zwischen dem Norden und dem Süden. "
        "Das Wetter im Norden ist im Winter kalt und im Sommer warm. Die Kinder "
        "gehen morgens zur Schule und spielen nach dem Mittagessen im Park. Die "
        "Regierung des Landes kündigte einen neuen Plan für Straßen, Schulen und "
        "Krankenhäuser an. Der schnelle braune Fuchs springt über den faulen "
        "Hund, während die Leute vom Feld aus zusehen. Wissenschaft und Kunst "
        "gehören zum täglichen Leben, und die Menschen der Region sind stolz auf "
        "ihre lange Geschichte und ihre Kultur."
    ),
    "fr": (
        "L'histoire de la ville commence avec un petit village au bord de la "
        "rivière. Les gens y ont vécu et travaillé pendant de nombreuses années, "
        "et la ville est devenue un lieu important pour le commerce entre le nord "
        "et le sud. Le temps dans le nord est froid en hiver et chaud en été. Les "
        "enfants vont à l'école le matin et jouent dans le parc après le "
        "déjeuner. Le gouvernement du pays a annoncé un nouveau plan pour les "
        "routes, les écoles et les hôpitaux. Le rapide renard brun saute "
        "par-dessus le chien paresseux pendant que les gens regardent depuis le "
        "champ. La science et l'art font partie de la vie quotidienne, et les "
        "habitants de la région sont fiers de leur longue histoire et de leur "
        "culture."
    ),
    "es": (
        "La historia de la ciudad comienza con un pequeño pueblo a la orilla del "
        "río. La gente vivió y trabajó allí durante muchos años, y el pueblo se "
        "convirtió en un lugar importante para el comercio entre el norte y el "
        "sur. El tiempo en el norte es frío en invierno y cálido en verano. Los "
        "niños van a la escuela por la mañana y juegan en el parque después del "
        "almuerzo. El gobierno del país anunció un nuevo plan para carreteras, "
        "escuelas y hospitales. El rápido zorro marrón salta sobre el perro "
        "perezoso mientras la gente mira desde el campo. La ciencia y el arte "
        "forman parte de la vida diaria, y la gente de la región está orgullosa "
        "de su larga historia y de su cultura."
    ),
    "it": (
        "La storia della città comincia con un piccolo villaggio sulla riva del "
        "fiume. La gente ha vissuto e lavorato lì per molti anni, e il paese è "
        "diventato un luogo importante per il commercio tra il nord e il sud. Il "
        "tempo nel nord è freddo in inverno e caldo in estate. I bambini vanno a "
        "scuola la mattina e giocano nel parco dopo il pranzo. Il governo del "
        "paese ha annunciato un nuovo piano per strade, scuole e ospedali. La "
        "rapida volpe bruna salta sopra il cane pigro mentre la gente guarda dal "
        "campo. La scienza e l'arte fanno parte della vita quotidiana, e la "
        "gente della regione è orgogliosa della sua lunga storia e della sua "
        "cultura."
    ),
}

_NON_LETTER = re.compile(r"[^\W\d_]+", re.UNICODE)


def _words(text: str) -> list[str]:
    return _NON_LETTER.findall(text.lower())


def ngram_counts(text: str) -> Counter:
    """Frequency of padded word n-grams (sizes 1..3) in lowercased text."""
    counts: Counter = Counter()
    for word in _words(text):
        padded = f" {word} "
        for size in _NGRAM_SIZES:
            for start in range(len(padded) - size + 1):
                counts[padded[start : start + size]] += 1
    return counts


def rank_profile(text: str, size: int = PROFILE_SIZE) -> dict[str, int]:
    """Top n-grams ranked by frequency (rank 0 = most frequent).

    Frequency ties break lexicographically so profiles are deterministic.
    """
    counts = ngram_counts(text)
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:size]
    return {gram: rank for rank, (gram, _) in enumerate(ordered)}


def profile_distance(query: dict[str, int], reference: dict[str, int]) -> float:
    """Rank-weighted out-of-place distance in [0, 1].

    Each query n-gram pays its out-of-place penalty (capped at the profile
    size), weighted by how prominent the n-gram is in the query so that
    frequent grams dominate the verdict.
    """
    if not query:
        return 1.0
    size = PROFILE_SIZE
    total = 0.0
    weight_sum = 0.0
    for gram, qrank in query.items():
        weight = float(size - qrank)
        rrank = reference.get(gram)
        penalty = float(size) if rrank is None else float(abs(qrank - rrank))
        if penalty > size:
            penalty = float(size)
        total += weight * penalty
        weight_sum += weight
    return total / (weight_sum * size)


class NgramLanguageDetector:
    """Rank-profile classifier over a fixed set of language profiles."""

    def __init__(self, profiles: dict[str, dict[str, int]] | None = None):
        self.profiles = profiles if profiles is not None else built_in_profiles()

    def detect(self, text: str) -> tuple[str, float]:
        """Most likely language code and a confidence in [0, 1].

        Empty or letter-free input falls back to ("en", 0.0).
        """
        query = rank_profile(text)
        if not query:
            logger.debug("language detection fallback to ('en', 0.0) for empty input")
            return ("en", 0.0)
        best_code = "en"
        best_conf = -1.0
        for code in sorted(self.profiles):
            conf = 1.0 - profile_distance(query, self.profiles[code])
            if conf > best_conf:
                best_code, best_conf = code, conf
        return (best_code, max(0.0, best_conf))


_BUILT_IN: dict[str, dict[str, int]] | None = None
_DEFAULT: NgramLanguageDetector | None = None


def built_in_profiles() -> dict[str, dict[str, int]]:
    global _BUILT_IN
    if _BUILT_IN is None:
        _BUILT_IN = {code: rank_profile(text) for code, text in _SEED_TEXTS.items()}
    return _BUILT_IN


def default_detector() -> NgramLanguageDetector:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = NgramLanguageDetector()
    return _DEFAULT


def predict_language(text: str) -> tuple[str, float]:
    """Detect the language of `text` with the built-in profiles."""
    return default_detector().detect(text)
