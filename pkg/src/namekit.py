"""Нормализация испанских имён и генерация вариантов для поиска авторов."""

import csv
import re
import unicodedata
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

from roster import Researcher

_FOLD_TABLE = str.maketrans("áéíóúüñÁÉÍÓÚÜÑ", "aeiouunAEIOUUN")

_SEPARATORS = re.compile(r"[-‐‑‒–—'’‘`´]")

# Частицы фамилий; многословные идут первыми, чтобы "de la" не съела "de"
SURNAME_PARTICLES = (("de", "la"), ("de", "las"), ("de", "los"), ("de",), ("del",), ("van",), ("von",))


class InvalidNameError(ValueError):
    """Имя пустое после нормализации"""

    pass


class VariantKind(StrEnum):
    AS_GIVEN = "AsGiven"
    ACCENT_FOLDED = "AccentFolded"
    ACCENT_RESTORED = "AccentRestored"
    INITIALS_GIVEN = "InitialsGiven"
    FIRST_GIVEN_ONLY = "FirstGivenOnly"
    FIRST_SURNAME_ONLY = "FirstSurnameOnly"
    PREPOSITION_JOINED = "PrepositionJoined"


@dataclass(frozen=True, slots=True)
class NormalizedName:
    text: str
    tokens: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class NameVariant:
    text: str
    kind: VariantKind
    # Сколько ведущих токенов нормализованного текста относятся к именам
    given_count: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.text or self.text != self.text.strip():
            raise ValueError(f"Invalid variant text {self.text!r}")


@dataclass(frozen=True)
class AccentLexicon:
    """Словарь "токен без ударений → токен с ударениями", например jose → josé."""

    entries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for folded, accented in self.entries.items():
            if fold_accents(accented) != folded:
                raise ValueError(f"Lexicon key {folded!r} is not the folded form of {accented!r}")

    def restore(self, token: str) -> str:
        return self.entries.get(token, token)


@dataclass(frozen=True, slots=True)
class MatchVerdict:
    matched: bool
    variant: NameVariant | None = None

    def __post_init__(self):
        if self.matched != (self.variant is not None):
            raise ValueError("A match verdict carries a witness exactly when matched")


def fold_accents(s: str) -> str:
    """
    Снимает испанские диакритики: á/é/í/ó/ú/ü → a/e/i/o/u/u, ñ → n.

    Регистр сохраняется, остальные символы не меняются.

    Example:
        >>> fold_accents("Pérez Ibáñez")
        "Perez Ibanez"
    """
    return s.translate(_FOLD_TABLE)


def _strip_marks(s: str) -> str:
    # Прочие диакритики (ç, ã, ø...) для сравнения имён из других языков
    decomposed = unicodedata.normalize("NFKD", s)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _clean_token(token: str) -> str:
    letters = "".join(ch for ch in token if ch.isalpha())
    if not letters:
        return ""
    if len(letters) == 1 and "." in token:
        return letters + "."
    return letters


def normalize(raw: str) -> NormalizedName:
    """
    Приводит имя к канонической форме для сравнения.

    Нижний регистр, без ударений, дефисы и апострофы заменены пробелом,
    пунктуация удалена (точка остаётся только после инициала).

    Raises:
        InvalidNameError: если после нормализации ничего не осталось
    """
    text = _strip_marks(fold_accents(raw)).lower()
    text = _SEPARATORS.sub(" ", text)
    # "j.r." → "j. r."
    text = text.replace(".", ". ")
    tokens = tuple(token for token in (_clean_token(t) for t in text.split()) if token)
    if not tokens:
        raise InvalidNameError(f"Name {raw!r} is empty after normalization")
    return NormalizedName(text=" ".join(tokens), tokens=tokens)


def _try_normalize(raw: str) -> NormalizedName | None:
    try:
        return normalize(raw)
    except InvalidNameError:
        return None


def _is_initial(token: str) -> bool:
    return len(token) == 1 or (len(token) == 2 and token.endswith("."))


def _given_compatible(candidate: str, variant: str) -> bool:
    if candidate == variant:
        return True
    if _is_initial(candidate):
        return variant.startswith(candidate[0])
    if _is_initial(variant):
        return candidate.startswith(variant[0])
    return False


def _surname_units(tokens: list[str]) -> list[list[str]]:
    """Группирует нормализованные токены фамилии, приклеивая частицы к следующему слову."""
    units: list[list[str]] = []
    i = 0
    while i < len(tokens):
        particle = next(
            (p for p in SURNAME_PARTICLES if tuple(tokens[i : i + len(p)]) == p and i + len(p) < len(tokens)),
            None,
        )
        size = len(particle) + 1 if particle else 1
        units.append(tokens[i : i + size])
        i += size
    return units


def load_lexicon(path: Path) -> AccentLexicon:
    """
    Загружает словарь ударений из CSV с колонками folded,accented.

    Если ключ не совпадает со "сложенной" формой значения, AccentLexicon
    выбрасывает ValueError.
    """
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            folded = (row.get("folded") or "").strip().lower()
            accented = (row.get("accented") or "").strip().lower()
            if folded and accented:
                entries[folded] = accented
    return AccentLexicon(entries=entries)


def generate_variants(r: Researcher, lex: AccentLexicon) -> list[NameVariant]:
    """
    Строит упорядоченный набор вариантов имени для запросов к API.

    Порядок правил фиксирован: AsGiven, AccentFolded, AccentRestored,
    InitialsGiven, FirstGivenOnly, FirstSurnameOnly/PrepositionJoined.
    Дубликаты отбрасываются по точному тексту в нижнем регистре, первый выигрывает.
    Формы, различающиеся только диакритикой (AsGiven "josé pérez" и AccentFolded
    "jose perez"), остаются отдельными вариантами и отдельными запросами;
    names_match сравнивает имена уже после normalize().
    """
    given_raw = r.given_names.lower().split()
    surnames_raw = r.surnames.lower().split()
    given_name = _try_normalize(r.given_names)
    given = list(given_name.tokens) if given_name else []
    surnames = list(normalize(r.surnames).tokens)
    g = len(given)

    candidates: list[NameVariant] = []

    def add(tokens: list[str], kind: VariantKind, given_count: int) -> None:
        text = " ".join(tokens).strip()
        if text:
            candidates.append(NameVariant(text=text, kind=kind, given_count=given_count))

    add(given_raw + surnames_raw, VariantKind.AS_GIVEN, g)
    add(given + surnames, VariantKind.ACCENT_FOLDED, g)
    add([lex.restore(t) for t in given + surnames], VariantKind.ACCENT_RESTORED, g)
    add([f"{t[0]}." for t in given] + surnames, VariantKind.INITIALS_GIVEN, g)
    if g >= 2:
        add(given[:1] + surnames, VariantKind.FIRST_GIVEN_ONLY, 1)
    units = _surname_units(surnames)
    if len(units) >= 2:
        first = units[0]
        kind = VariantKind.PREPOSITION_JOINED if len(first) > 1 else VariantKind.FIRST_SURNAME_ONLY
        add(given + first, kind, g)

    variants: list[NameVariant] = []
    seen: set[str] = set()
    for variant in candidates:
        if variant.text in seen:
            continue
        seen.add(variant.text)
        variants.append(variant)
    return variants


def _variant_matches(candidate: NormalizedName, variant: NameVariant) -> bool:
    target = normalize(variant.text)
    if candidate.text == target.text:
        return True
    if len(candidate.tokens) != len(target.tokens):
        return False
    g = variant.given_count
    return all(
        _given_compatible(c, v) if i < g else c == v
        for i, (c, v) in enumerate(zip(candidate.tokens, target.tokens, strict=True))
    )


def names_match(candidate_display_name: str, r: Researcher, lex: AccentLexicon) -> MatchVerdict:
    """
    Проверяет, совпадает ли отображаемое имя автора OpenAlex с исследователем.

    Сравнение идёт в нормализованном виде; имена (но не фамилии) могут быть
    сокращены до инициалов с любой стороны. Свидетелем служит первый подходящий
    вариант в порядке генерации.
    """
    candidate = _try_normalize(candidate_display_name)
    if candidate is None:
        return MatchVerdict(matched=False)
    for variant in generate_variants(r, lex):
        if _variant_matches(candidate, variant):
            return MatchVerdict(matched=True, variant=variant)
    return MatchVerdict(matched=False)
