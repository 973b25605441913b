"""Утилиты для расчёта и форматирования долей и процентов в отчётах."""

from decimal import ROUND_HALF_UP, Decimal


def calculate_percent(done: int, total: int, digits: int = 1) -> float:
    """
    Вычисляет процент, округлённый половиной вверх.

    Считается в Decimal, поэтому ровно половинные значения
    (1/80 = 1.25%) округляются вверх без двоичной погрешности.

    Args:
        done: Числитель
        total: Знаменатель
        digits: Знаков после запятой

    Returns:
        Процент (0-100); 0.0 при нулевом знаменателе
    """
    if total == 0:
        return 0.0
    percent = Decimal(done) * 100 / Decimal(total)
    return float(percent.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP))


def round_half_up(value: float, digits: int = 1) -> float:
    """
    Округляет "по-бухгалтерски" (половина вверх), как в таблицах покрытия.

    Example:
        >>> round_half_up(98.65)
        98.7
        >>> round_half_up(80.25)
        80.3
    """
    quantum = Decimal(1).scaleb(-digits)
    # repr даёт кратчайшее десятичное представление, без хвоста двоичной погрешности
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def format_percent(value: float) -> str:
    """
    Форматирует процент с одним знаком после запятой.

    Example:
        >>> format_percent(93.06)
        "93.1"
    """
    return f"{round_half_up(value, 1):.1f}"


def safe_share(part: int, total: int) -> float:
    """Доля part/total; 0.0 при пустом знаменателе."""
    if total == 0:
        return 0.0
    return part / total
