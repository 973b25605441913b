# src/utils/validators.py

import re
from datetime import date


def validate_iso_date(date_str: str) -> tuple[bool, str | None]:
    """
    Проверяет дату в формате ISO-8601 (YYYY-MM-DD).

    Args:
        date_str: Строка даты для проверки

    Returns:
        Tuple (is_valid, error_message)
    """
    if not date_str or not date_str.strip():
        return False, "Date must not be empty"

    if not re.match(r"^\d{4}-\d{2}-\d{2}$", date_str.strip()):
        return False, f"Invalid date {date_str!r}: expected YYYY-MM-DD"

    try:
        date.fromisoformat(date_str.strip())
    except ValueError:
        return False, f"Invalid calendar date {date_str!r}"

    return True, None


def validate_country_code(code: str) -> tuple[bool, str | None]:
    """
    Проверяет код страны ISO-3166 alpha-2.

    Args:
        code: Код страны (например, "AR")

    Returns:
        Tuple (is_valid, error_message)
    """
    if not code or not re.match(r"^[A-Z]{2}$", code):
        return False, f"Country code must be two uppercase letters, got {code!r}"
    return True, None


def validate_fraction(value: float) -> tuple[bool, str | None]:
    """Проверяет, что значение является долей в [0, 1]."""
    if not 0.0 <= value <= 1.0:
        return False, f"Value must be in [0, 1], got {value}"
    return True, None


def validate_positive_int(value: int) -> tuple[bool, str | None]:
    """Проверяет, что значение является положительным целым."""
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        return False, f"Value must be a positive integer, got {value!r}"
    return True, None


def sanitize_text_input(text: str | None) -> str:
    """
    Очищает текстовое поле из входного файла.

    Args:
        text: Исходный текст (может быть None для пустой ячейки)

    Returns:
        Текст без крайних пробелов и с одиночными пробелами внутри
    """
    if not text:
        return ""

    return " ".join(text.split())
